//! Declarative experiments: a spec names one operation and its parameters,
//! each run emits self-describing records that re-run to identical results.

use std::io::Write;
use std::time::Instant;

use anyhow::{anyhow, bail, Context};
use chrono::{SecondsFormat, Utc};
use clap::ValueEnum;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::analytic;
use crate::boolean_lab::exact::{exact_influences, exact_noise_correlation, exact_success_prob_of, ratio_to_f64};
use crate::boolean_lab::golden::{format_ratio, parse_ratio};
use crate::boolean_lab::revealment::{tribes_revealment, tribes_revealment_mc};
use crate::boolean_lab::BooleanFunctionSpec;
use crate::estimator::{
    estimate_influence_of, estimate_noise_corr_of, estimate_pc_of, estimate_success_of, estimate_window_of,
    maj_covariance_of, Bootstrap, McParams, PcSearchParams, PcSearchResult, Precision, TrialFunction,
    DEFAULT_MAX_DOUBLINGS, DEFAULT_Z,
};
use crate::topology::{build_complete, build_lattice, build_random_regular, edge_cheeger, GraphTopology, LatticeKind};

pub const TOOL_VERSION: &str = concat!("percolab ", env!("CARGO_PKG_VERSION"));

pub const DEFAULT_TRIALS: u64 = 10_000;
pub const DEFAULT_TRIALS_PER_STEP: u64 = 2_000;
pub const DEFAULT_PRECISION: f64 = 1e-3;
/// Relative bracket width of the critical-density search behind `--at-pc`.
pub const AT_PC_RELATIVE_PRECISION: f64 = 0.02;
pub const DEFAULT_LEVELS: (f64, f64) = (0.25, 0.75);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Analytic,
    Exact,
    Success,
    Pc,
    Corr,
    Influence,
    Window,
    Majcov,
    Reveal,
    Sweep,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum AnalyticOp {
    Pstar,
    Yhat,
    H,
    R,
    Kk,
    Witness,
    Pcref,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ExactOp {
    Success,
    Influences,
    Corr,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum GraphName {
    Torus,
    Box,
    Cycle,
    Complete,
    /// Uniform simple random regular graph.
    #[value(alias = "random-regular")]
    Rr,
    /// Majority of `n` bits.
    Majority,
    /// Tribes with tribe size `n`.
    Tribes,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum SweepAxis {
    N,
    P,
    Eps,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Jsonl,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepGrid {
    pub command: Command,
    pub axis: SweepAxis,
    pub values: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputSpec {
    pub path: Option<String>,
    pub format: Format,
}

/// One experiment. Densities are kept as text so exact commands see the
/// rational the user typed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub command: Command,
    pub analytic: Option<AnalyticOp>,
    pub exact: Option<ExactOp>,
    pub graph: Option<GraphName>,
    pub n: Option<usize>,
    pub d: Option<usize>,
    /// Seed of the random regular graph; defaults to `seed`.
    pub graph_seed: Option<u64>,
    pub k: Option<usize>,
    pub p: Option<String>,
    pub eps: Option<String>,
    /// Majority shift parameter: `s = 2 L sqrt(n)`.
    pub l: Option<f64>,
    /// Vertex whose influence is estimated.
    pub x: Option<usize>,
    pub y: Option<f64>,
    pub w: Option<f64>,
    pub h_e: Option<f64>,
    pub lambda: Option<f64>,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
    pub z: Option<f64>,
    pub precision: Option<f64>,
    pub target: Option<f64>,
    pub levels: Option<(f64, f64)>,
    pub trials_per_step: Option<u64>,
    pub at_pc: bool,
    pub sweep: Option<SweepGrid>,
    pub output: Option<OutputSpec>,
}

impl ExperimentSpec {
    pub fn new(command: Command) -> Self {
        Self {
            command,
            analytic: None,
            exact: None,
            graph: None,
            n: None,
            d: None,
            graph_seed: None,
            k: None,
            p: None,
            eps: None,
            l: None,
            x: None,
            y: None,
            w: None,
            h_e: None,
            lambda: None,
            trials: None,
            seed: None,
            z: None,
            precision: None,
            target: None,
            levels: None,
            trials_per_step: None,
            at_pc: false,
            sweep: None,
            output: None,
        }
    }

    /// Commands drawing random samples.
    pub fn is_stochastic(&self) -> bool {
        match self.command {
            Command::Success | Command::Pc | Command::Corr | Command::Influence | Command::Window | Command::Majcov => {
                true
            }
            Command::Reveal => self.trials.is_some(),
            Command::Sweep => self.sweep.as_ref().is_some_and(|s| {
                ExperimentSpec {
                    command: s.command,
                    ..self.clone()
                }
                .is_stochastic()
            }),
            Command::Analytic | Command::Exact => matches!(self.graph, Some(GraphName::Rr)),
        }
    }

    /// Expands a sweep into one spec per grid cell; other specs expand to
    /// themselves.
    pub fn cells(&self) -> anyhow::Result<Vec<ExperimentSpec>> {
        let Some(grid) = &self.sweep else {
            if self.command == Command::Sweep {
                bail!("sweep needs a grid: give a comma-separated list for one of --n, --p, --eps");
            }
            return Ok(vec![self.clone()]);
        };
        if grid.command == Command::Sweep {
            bail!("a sweep cannot sweep another sweep");
        }
        if grid.values.is_empty() {
            bail!("sweep grid over {:?} is empty", grid.axis);
        }
        grid.values
            .iter()
            .map(|v| {
                let mut cell = ExperimentSpec {
                    command: grid.command,
                    sweep: None,
                    ..self.clone()
                };
                match grid.axis {
                    SweepAxis::N => cell.n = Some(v.trim().parse().with_context(|| format!("bad --n value {v:?}"))?),
                    SweepAxis::P => cell.p = Some(v.trim().to_string()),
                    SweepAxis::Eps => cell.eps = Some(v.trim().to_string()),
                }
                Ok(cell)
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Ok,
    Error,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub spec: ExperimentSpec,
    pub status: Status,
    pub result: Option<Value>,
    pub error: Option<String>,
    pub started_at: String,
    pub finished_at: String,
    pub wall_time_s: f64,
    pub tool_version: String,
}

impl ExperimentRecord {
    /// The record without timestamps, wall time and output destination.
    pub fn result_fields(&self) -> Value {
        json!({
            "spec": ExperimentSpec { output: None, ..self.spec.clone() },
            "status": self.status,
            "result": self.result,
            "error": self.error,
            "tool_version": self.tool_version,
        })
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("records serialize")
    }

    pub fn from_json_line(line: &str) -> anyhow::Result<Self> {
        serde_json::from_str(line).context("not an experiment record")
    }
}

fn need<T: Copy>(v: Option<T>, flag: &str, cmd: &str) -> anyhow::Result<T> {
    v.ok_or_else(|| anyhow!("{cmd} needs --{flag}"))
}

fn parse_unit(text: &Option<String>, flag: &str, cmd: &str) -> anyhow::Result<BigRational> {
    let text = text.as_ref().ok_or_else(|| anyhow!("{cmd} needs --{flag}"))?;
    let r = parse_ratio(text).map_err(|e| anyhow!("--{flag}: {e}"))?;
    let (zero, one) = (BigRational::from_integer(0.into()), BigRational::from_integer(1.into()));
    if r < zero || r > one {
        bail!("--{flag} must lie in [0, 1], got {text}");
    }
    Ok(r)
}

fn parse_unit_f64(text: &Option<String>, flag: &str, cmd: &str) -> anyhow::Result<f64> {
    parse_unit(text, flag, cmd).map(|r| ratio_to_f64(&r))
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("results serialize")
}

enum Subject {
    Graph(GraphTopology, usize),
    Function(BooleanFunctionSpec),
}

impl Subject {
    fn build(spec: &ExperimentSpec, cmd: &str) -> anyhow::Result<Self> {
        let graph = need(spec.graph, "graph", cmd)?;
        let n = need(spec.n, "n", cmd)?;
        let lattice = |kind| -> anyhow::Result<GraphTopology> {
            let d = if kind == LatticeKind::Cycle {
                1
            } else {
                need(spec.d, "d", cmd)?
            };
            Ok(build_lattice(kind, n, d)?)
        };
        let topology = match graph {
            GraphName::Majority => return Ok(Subject::Function(BooleanFunctionSpec::majority(n)?)),
            GraphName::Tribes => return Ok(Subject::Function(BooleanFunctionSpec::tribes(n)?)),
            GraphName::Torus => lattice(LatticeKind::Torus)?,
            GraphName::Box => lattice(LatticeKind::Box)?,
            GraphName::Cycle => lattice(LatticeKind::Cycle)?,
            GraphName::Complete => build_complete(n)?,
            GraphName::Rr => {
                let seed = spec
                    .graph_seed
                    .or(spec.seed)
                    .ok_or_else(|| anyhow!("random regular graphs need --graph-seed or --seed"))?;
                build_random_regular(n, need(spec.d, "d", cmd)?, seed)?
            }
        };
        let k = need(spec.k, "k", cmd)?;
        Bootstrap::new(&topology, k)?;
        Ok(Subject::Graph(topology, k))
    }

    fn function(self) -> anyhow::Result<BooleanFunctionSpec> {
        Ok(match self {
            Subject::Graph(g, k) => BooleanFunctionSpec::bootstrap(g, k)?,
            Subject::Function(f) => f,
        })
    }

    fn with<R>(&self, body: impl FnOnce(&dyn DynTrial) -> R) -> R {
        match self {
            Subject::Graph(g, k) => body(&Bootstrap { graph: g, k: *k }),
            Subject::Function(f) => body(f),
        }
    }
}

/// Object-safe front for the generic estimators.
trait DynTrial {
    fn success(&self, p: f64, params: &McParams) -> crate::Result<crate::estimator::EstimateWithCI>;
    fn corr(&self, p: f64, eps: f64, params: &McParams) -> crate::Result<crate::estimator::EstimateWithCI>;
    fn influence(&self, p: f64, x: usize, params: &McParams) -> crate::Result<crate::estimator::EstimateWithCI>;
    fn majcov(&self, p: f64, l: f64, params: &McParams) -> crate::Result<crate::estimator::EstimateWithCI>;
    fn pc(&self, params: &PcSearchParams) -> crate::Result<PcSearchResult>;
    fn window(&self, levels: (f64, f64), params: &PcSearchParams) -> crate::Result<crate::estimator::WindowResult>;
}

impl<F: TrialFunction> DynTrial for F {
    fn success(&self, p: f64, params: &McParams) -> crate::Result<crate::estimator::EstimateWithCI> {
        estimate_success_of(self, p, params)
    }
    fn corr(&self, p: f64, eps: f64, params: &McParams) -> crate::Result<crate::estimator::EstimateWithCI> {
        estimate_noise_corr_of(self, p, eps, params)
    }
    fn influence(&self, p: f64, x: usize, params: &McParams) -> crate::Result<crate::estimator::EstimateWithCI> {
        estimate_influence_of(self, p, x, params)
    }
    fn majcov(&self, p: f64, l: f64, params: &McParams) -> crate::Result<crate::estimator::EstimateWithCI> {
        maj_covariance_of(self, p, l, params)
    }
    fn pc(&self, params: &PcSearchParams) -> crate::Result<PcSearchResult> {
        estimate_pc_of(self, params)
    }
    fn window(&self, levels: (f64, f64), params: &PcSearchParams) -> crate::Result<crate::estimator::WindowResult> {
        estimate_window_of(self, levels, params)
    }
}

fn mc_params(spec: &ExperimentSpec) -> anyhow::Result<McParams> {
    Ok(McParams {
        trials: spec.trials.unwrap_or(DEFAULT_TRIALS),
        seed: need(spec.seed, "seed", "a Monte Carlo run")?,
        z: spec.z.unwrap_or(DEFAULT_Z),
    })
}

fn pc_params(spec: &ExperimentSpec, target: f64, precision: Precision) -> anyhow::Result<PcSearchParams> {
    Ok(PcSearchParams {
        target,
        precision,
        trials_per_step: spec.trials_per_step.unwrap_or(DEFAULT_TRIALS_PER_STEP),
        seed: need(spec.seed, "seed", "a Monte Carlo run")?,
        z: spec.z.unwrap_or(DEFAULT_Z),
        max_doublings: DEFAULT_MAX_DOUBLINGS,
    })
}

/// The density for an estimator: `--p`, or the estimated critical density
/// under `--at-pc`.
fn density(spec: &ExperimentSpec, subject: &dyn DynTrial, cmd: &str) -> anyhow::Result<(f64, Option<PcSearchResult>)> {
    if spec.at_pc {
        if spec.p.is_some() {
            bail!("--p and --at-pc are mutually exclusive");
        }
        let params = pc_params(
            spec,
            spec.target.unwrap_or(0.5),
            Precision::Relative(AT_PC_RELATIVE_PRECISION),
        )?;
        let pc = subject.pc(&params)?;
        Ok((pc.p_c_hat, Some(pc)))
    } else {
        Ok((parse_unit_f64(&spec.p, "p", cmd)?, None))
    }
}

fn run_estimator(spec: &ExperimentSpec) -> anyhow::Result<Value> {
    let cmd = format!("{:?}", spec.command).to_lowercase();
    let subject = Subject::build(spec, &cmd)?;
    subject.with(|f| -> anyhow::Result<Value> {
        match spec.command {
            Command::Pc => {
                let precision = Precision::Absolute(spec.precision.unwrap_or(DEFAULT_PRECISION));
                Ok(to_value(&f.pc(&pc_params(
                    spec,
                    spec.target.unwrap_or(0.5),
                    precision,
                )?)?))
            }
            Command::Window => {
                let precision = Precision::Absolute(spec.precision.unwrap_or(DEFAULT_PRECISION));
                let levels = spec.levels.unwrap_or(DEFAULT_LEVELS);
                Ok(to_value(&f.window(levels, &pc_params(spec, 0.5, precision)?)?))
            }
            _ => {
                let params = mc_params(spec)?;
                let (p, pc) = density(spec, f, &cmd)?;
                let estimate = match spec.command {
                    Command::Success => f.success(p, &params)?,
                    Command::Corr => f.corr(p, parse_unit_f64(&spec.eps, "eps", &cmd)?, &params)?,
                    Command::Influence => f.influence(p, spec.x.unwrap_or(0), &params)?,
                    Command::Majcov => f.majcov(p, need(spec.l, "l", &cmd)?, &params)?,
                    _ => unreachable!("dispatched above"),
                };
                Ok(json!({ "p": p, "pc": pc, "estimate": estimate }))
            }
        }
    })
}

fn run_exact(spec: &ExperimentSpec) -> anyhow::Result<Value> {
    let op = need(spec.exact, "exact operation", "exact")?;
    let f = Subject::build(spec, "exact")?.function()?;
    let p = parse_unit(&spec.p, "p", "exact")?;
    let canonical = f.canonical();
    Ok(match op {
        ExactOp::Success => {
            let r = exact_success_prob_of(&f, &p)?;
            json!({
                "function": canonical,
                "value": format_ratio(&r.value),
                "value_f64": r.to_f64(),
                "enumeration_size": r.enumeration_size,
            })
        }
        ExactOp::Influences => {
            let inf = exact_influences(&f, &p)?;
            json!({
                "function": canonical,
                "per_bit": inf.per_bit.iter().map(format_ratio).collect::<Vec<_>>(),
                "total": format_ratio(&inf.total),
                "total_f64": ratio_to_f64(&inf.total),
                "sum_squares": format_ratio(&inf.sum_squares),
                "enumeration_size": inf.enumeration_size,
            })
        }
        ExactOp::Corr => {
            let eps = parse_unit(&spec.eps, "eps", "exact corr")?;
            let c = exact_noise_correlation(&f, &p, &eps)?;
            json!({
                "function": canonical,
                "mean": format_ratio(&c.mean),
                "variance": format_ratio(&c.variance),
                "covariance": format_ratio(&c.covariance),
                "correlation": c.correlation.as_ref().map(format_ratio),
                "correlation_f64": c.correlation.as_ref().map(ratio_to_f64),
                "enumeration_size": c.enumeration_size,
            })
        }
    })
}

fn run_analytic(spec: &ExperimentSpec) -> anyhow::Result<Value> {
    let op = need(spec.analytic, "analytic operation", "analytic")?;
    let cmd = format!("analytic {}", format!("{op:?}").to_lowercase());
    let d = || need(spec.d, "d", &cmd);
    let k = || need(spec.k, "k", &cmd);
    Ok(match op {
        AnalyticOp::Pstar => to_value(&analytic::p_star(d()?, k()?)?),
        AnalyticOp::Yhat => {
            let p = parse_unit_f64(&spec.p, "p", &cmd)?;
            json!({ "p": p, "d": d()?, "k": k()?, "y_hat": analytic::y_hat(p, d()?, k()?)? })
        }
        AnalyticOp::H => {
            let (p, y) = (parse_unit_f64(&spec.p, "p", &cmd)?, need(spec.y, "y", &cmd)?);
            json!({ "p": p, "y": y, "d": d()?, "k": k()?, "h": analytic::h_function(y, p, d()?, k()?)? })
        }
        AnalyticOp::R => {
            let y = need(spec.y, "y", &cmd)?;
            json!({ "y": y, "d": d()?, "k": k()?, "r": analytic::r_function(y, d()?, k()?)? })
        }
        AnalyticOp::Kk => {
            let p = parse_unit(&spec.p, "p", &cmd)?;
            let eps = parse_unit_f64(&spec.eps, "eps", &cmd)?;
            let w = match spec.w {
                Some(w) => w,
                None => {
                    let f = Subject::build(spec, &cmd)
                        .context("analytic kk needs --w or a function to enumerate")?
                        .function()?;
                    let inf = exact_influences(&f, &p)?;
                    let per_bit: Vec<f64> = inf.per_bit.iter().map(ratio_to_f64).collect();
                    analytic::weighted_influence_sum(ratio_to_f64(&p), &per_bit)
                }
            };
            to_value(&analytic::kk_bound(w, eps, ratio_to_f64(&p))?)
        }
        AnalyticOp::Witness => {
            let h_e = match spec.h_e {
                Some(h) => h,
                None => match Subject::build(spec, &cmd).context("analytic witness needs --h-e or a graph")? {
                    Subject::Graph(g, _) => {
                        let r = edge_cheeger(&g)?;
                        *r.numer() as f64 / *r.denom() as f64
                    }
                    Subject::Function(_) => bail!("analytic witness needs a graph, not a Boolean function"),
                },
            };
            json!({ "h_e": h_e, "d": d()?, "k": k()?, "c": analytic::witness_fraction(h_e, d()?, k()?)? })
        }
        AnalyticOp::Pcref => {
            let n = need(spec.n, "n", &cmd)? as f64;
            let lambda = need(spec.lambda, "lambda", &cmd)?;
            json!({
                "n": n, "d": d()?, "k": k()?, "lambda": lambda,
                "p_c_reference": analytic::pc_box_reference(n, d()?, k()?, lambda)?,
            })
        }
    })
}

fn run_reveal(spec: &ExperimentSpec) -> anyhow::Result<Value> {
    let k = need(spec.k, "k", "reveal")?;
    let rev = match spec.trials {
        Some(trials) => tribes_revealment_mc(k, trials, need(spec.seed, "seed", "reveal")?)?,
        None => tribes_revealment(k)?,
    };
    let mut v = to_value(&rev);
    if let (Some(exact), Value::Object(map)) = (&rev.delta_exact, &mut v) {
        map.insert("delta_exact".into(), Value::String(format_ratio(exact)));
    }
    Ok(v)
}

fn run_cell(spec: &ExperimentSpec) -> anyhow::Result<Value> {
    match spec.command {
        Command::Analytic => run_analytic(spec),
        Command::Exact => run_exact(spec),
        Command::Reveal => run_reveal(spec),
        Command::Sweep => bail!("nested sweep"),
        _ => run_estimator(spec),
    }
}

fn now() -> String {
    Utc::now().to_rfc3339_opts(SecondsFormat::Millis, true)
}

/// Runs every cell of `spec`, handing each record to `emit` as soon as it
/// is complete. Stops after the first failed cell and returns its error.
pub fn run_with(
    spec: &ExperimentSpec,
    mut emit: impl FnMut(ExperimentRecord) -> anyhow::Result<()>,
) -> anyhow::Result<()> {
    let cells = match spec.cells() {
        Ok(cells) => cells,
        Err(e) => {
            let t = now();
            emit(ExperimentRecord {
                spec: spec.clone(),
                status: Status::Error,
                result: None,
                error: Some(format!("{e:#}")),
                started_at: t.clone(),
                finished_at: t,
                wall_time_s: 0.0,
                tool_version: TOOL_VERSION.into(),
            })?;
            return Err(e);
        }
    };
    for cell in cells {
        let started_at = now();
        let clock = Instant::now();
        let outcome = run_cell(&cell);
        let wall_time_s = clock.elapsed().as_secs_f64();
        let (status, result, error) = match &outcome {
            Ok(v) => (Status::Ok, Some(v.clone()), None),
            Err(e) => (Status::Error, None, Some(format!("{e:#}"))),
        };
        emit(ExperimentRecord {
            spec: cell,
            status,
            result,
            error,
            started_at,
            finished_at: now(),
            wall_time_s,
            tool_version: TOOL_VERSION.into(),
        })?;
        outcome?;
    }
    Ok(())
}

/// Collects the records of [`run_with`]; error records are kept and the
/// error is not propagated.
pub fn run(spec: &ExperimentSpec) -> Vec<ExperimentRecord> {
    let mut out = Vec::new();
    let _ = run_with(spec, |r| {
        out.push(r);
        Ok(())
    });
    out
}

/// Flattens nested objects and arrays into dotted keys.
pub fn flatten(value: &Value) -> Map<String, Value> {
    fn go(prefix: &str, v: &Value, out: &mut Map<String, Value>) {
        let join = |key: &str| {
            if prefix.is_empty() {
                key.to_string()
            } else {
                format!("{prefix}.{key}")
            }
        };
        match v {
            Value::Object(map) if !map.is_empty() => {
                for (key, inner) in map {
                    go(&join(key), inner, out);
                }
            }
            Value::Array(items) if !items.is_empty() => {
                for (i, inner) in items.iter().enumerate() {
                    go(&join(&i.to_string()), inner, out);
                }
            }
            _ => {
                out.insert(prefix.to_string(), v.clone());
            }
        }
    }
    let mut out = Map::new();
    go("", value, &mut out);
    out
}

/// CSV with dotted headers over the union of all record fields.
pub fn write_csv<W: Write>(records: &[ExperimentRecord], out: W) -> anyhow::Result<()> {
    let rows: Vec<Map<String, Value>> = records.iter().map(|r| flatten(&to_value(r))).collect();
    let mut header: Vec<String> = Vec::new();
    for row in &rows {
        for key in row.keys() {
            if !header.contains(key) {
                header.push(key.clone());
            }
        }
    }
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(&header)?;
    for row in &rows {
        writer.write_record(header.iter().map(|key| match row.get(key) {
            None | Some(Value::Null) => String::new(),
            Some(Value::String(s)) => s.clone(),
            Some(v) => v.to_string(),
        }))?;
    }
    writer.flush()?;
    Ok(())
}
