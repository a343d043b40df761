//! `percolab` command line.

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::PathBuf;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand};

use crate::experiment::{
    run_with, write_csv, AnalyticOp, Command, ExactOp, ExperimentRecord, ExperimentSpec, Format, GraphName, OutputSpec,
    SweepAxis, SweepGrid,
};

#[derive(Debug, Parser)]
#[command(
    name = "percolab",
    version,
    about = "Bootstrap percolation and noise-sensitivity experiments"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Cmd,
    /// Worker threads for Monte Carlo trials.
    #[arg(long, global = true, env = "PERCOLAB_WORKERS")]
    pub workers: Option<usize>,
    /// Write records here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Jsonl)]
    pub format: Format,
}

#[derive(Debug, Subcommand)]
pub enum Cmd {
    /// Tree critical points, KK bound, witness fraction, reference scaling.
    Analytic {
        #[arg(value_enum)]
        op: AnalyticOp,
        #[command(flatten)]
        params: Params,
    },
    /// Exact values by enumeration.
    Exact {
        #[arg(value_enum)]
        op: ExactOp,
        #[command(flatten)]
        params: Params,
    },
    /// Probability of complete occupation.
    Success(Params),
    /// Critical density at `--target`.
    Pc(Params),
    /// Noise correlation.
    Corr(Params),
    /// Influence of vertex `--x`.
    Influence(Params),
    /// Transition window between `--levels`.
    Window(Params),
    /// Covariance with the shifted majority.
    Majcov(Params),
    /// Revealment of the tribes query algorithm.
    Reveal(Params),
    /// Runs a command over a comma-separated grid in one of --n, --p, --eps.
    Sweep {
        #[arg(value_enum)]
        command: Command,
        /// Operation for `analytic` and `exact`.
        op: Option<String>,
        #[command(flatten)]
        params: Params,
    },
    /// Re-runs the specs of a JSONL record file.
    Replay {
        file: PathBuf,
        /// Compare results with the recorded ones and fail on mismatch.
        #[arg(long)]
        check: bool,
    },
}

#[derive(Debug, Clone, Default, Args)]
pub struct Params {
    #[arg(long, value_enum)]
    pub graph: Option<GraphName>,
    #[arg(long)]
    pub n: Option<String>,
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long)]
    pub graph_seed: Option<u64>,
    #[arg(long)]
    pub k: Option<usize>,
    /// Density, as a decimal or a fraction such as 1/2.
    #[arg(long)]
    pub p: Option<String>,
    #[arg(long)]
    pub eps: Option<String>,
    /// Majority shift: s = 2 L sqrt(n).
    #[arg(long = "L", alias = "l")]
    pub l: Option<f64>,
    #[arg(long)]
    pub x: Option<usize>,
    #[arg(long)]
    pub y: Option<f64>,
    #[arg(long)]
    pub w: Option<f64>,
    #[arg(long)]
    pub h_e: Option<f64>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub trials: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub z: Option<f64>,
    #[arg(long)]
    pub precision: Option<f64>,
    #[arg(long)]
    pub target: Option<f64>,
    /// Two levels, e.g. 0.25,0.75.
    #[arg(long)]
    pub levels: Option<String>,
    #[arg(long)]
    pub trials_per_step: Option<u64>,
    /// Run at the estimated critical density.
    #[arg(long)]
    pub at_pc: bool,
}

fn split_list(s: &str) -> Vec<String> {
    s.split(',').map(|v| v.trim().to_string()).collect()
}

fn single(value: &Option<String>, flag: &str) -> anyhow::Result<Option<String>> {
    match value {
        Some(v) if v.contains(',') => bail!("--{flag} takes a single value outside sweep, got {v:?}"),
        other => Ok(other.clone()),
    }
}

impl Params {
    fn into_spec(self, command: Command) -> anyhow::Result<ExperimentSpec> {
        let levels = match &self.levels {
            None => None,
            Some(s) => match split_list(s).as_slice() {
                [a, b] => Some((
                    a.parse().with_context(|| format!("bad level {a:?}"))?,
                    b.parse().with_context(|| format!("bad level {b:?}"))?,
                )),
                _ => bail!("--levels takes two comma-separated values, got {s:?}"),
            },
        };
        let n = single(&self.n, "n")?
            .map(|v| v.parse::<usize>().with_context(|| format!("bad --n value {v:?}")))
            .transpose()?;
        Ok(ExperimentSpec {
            graph: self.graph,
            n,
            d: self.d,
            graph_seed: self.graph_seed,
            k: self.k,
            p: single(&self.p, "p")?,
            eps: single(&self.eps, "eps")?,
            l: self.l,
            x: self.x,
            y: self.y,
            w: self.w,
            h_e: self.h_e,
            lambda: self.lambda,
            trials: self.trials,
            seed: self.seed,
            z: self.z,
            precision: self.precision,
            target: self.target,
            levels,
            trials_per_step: self.trials_per_step,
            at_pc: self.at_pc,
            ..ExperimentSpec::new(command)
        })
    }

    fn into_sweep(mut self, inner: Command, op: Option<String>) -> anyhow::Result<ExperimentSpec> {
        let lists: Vec<(SweepAxis, String)> = [
            (SweepAxis::N, self.n.take()),
            (SweepAxis::P, self.p.take()),
            (SweepAxis::Eps, self.eps.take()),
        ]
        .into_iter()
        .filter_map(|(axis, v)| v.map(|v| (axis, v)))
        .collect();
        let swept: Vec<&(SweepAxis, String)> = lists.iter().filter(|(_, v)| v.contains(',')).collect();
        let (axis, values) = match swept.as_slice() {
            [one] => (one.0, split_list(&one.1)),
            [] => bail!("sweep needs a comma-separated list in one of --n, --p, --eps"),
            _ => bail!("sweep accepts a list in only one of --n, --p, --eps"),
        };
        for (other, v) in &lists {
            match other {
                _ if *other == axis => {}
                SweepAxis::N => self.n = Some(v.clone()),
                SweepAxis::P => self.p = Some(v.clone()),
                SweepAxis::Eps => self.eps = Some(v.clone()),
            }
        }
        let mut spec = self.into_spec(Command::Sweep)?;
        set_op(&mut spec, inner, op.as_deref())?;
        spec.sweep = Some(SweepGrid {
            command: inner,
            axis,
            values,
        });
        Ok(spec)
    }
}

fn set_op(spec: &mut ExperimentSpec, command: Command, op: Option<&str>) -> anyhow::Result<()> {
    use clap::ValueEnum;
    match (command, op) {
        (Command::Analytic, Some(op)) => {
            spec.analytic = Some(AnalyticOp::from_str(op, true).map_err(|e| anyhow!("{e}"))?)
        }
        (Command::Exact, Some(op)) => spec.exact = Some(ExactOp::from_str(op, true).map_err(|e| anyhow!("{e}"))?),
        (Command::Analytic | Command::Exact, None) => bail!("sweep {command:?} needs an operation"),
        (_, Some(op)) => bail!("unexpected operation {op:?}"),
        (_, None) => {}
    }
    Ok(())
}

/// Builds the spec for a run command; `None` for `replay`.
pub fn spec_of(cmd: Cmd) -> anyhow::Result<Option<ExperimentSpec>> {
    Ok(Some(match cmd {
        Cmd::Analytic { op, params } => ExperimentSpec {
            analytic: Some(op),
            ..params.into_spec(Command::Analytic)?
        },
        Cmd::Exact { op, params } => ExperimentSpec {
            exact: Some(op),
            ..params.into_spec(Command::Exact)?
        },
        Cmd::Success(p) => p.into_spec(Command::Success)?,
        Cmd::Pc(p) => p.into_spec(Command::Pc)?,
        Cmd::Corr(p) => p.into_spec(Command::Corr)?,
        Cmd::Influence(p) => p.into_spec(Command::Influence)?,
        Cmd::Window(p) => p.into_spec(Command::Window)?,
        Cmd::Majcov(p) => p.into_spec(Command::Majcov)?,
        Cmd::Reveal(p) => p.into_spec(Command::Reveal)?,
        Cmd::Sweep { command, op, params } => params.into_sweep(command, op)?,
        Cmd::Replay { .. } => return Ok(None),
    }))
}

struct Sink {
    format: Format,
    out: Box<dyn Write>,
    pending: Vec<ExperimentRecord>,
}

impl Sink {
    fn open(path: Option<&PathBuf>, format: Format) -> anyhow::Result<Self> {
        let out: Box<dyn Write> = match path {
            Some(p) => Box::new(BufWriter::new(
                File::create(p).with_context(|| format!("cannot create {}", p.display()))?,
            )),
            None => Box::new(io::stdout().lock()),
        };
        Ok(Self {
            format,
            out,
            pending: Vec::new(),
        })
    }

    fn emit(&mut self, record: ExperimentRecord) -> anyhow::Result<()> {
        match self.format {
            Format::Jsonl => {
                writeln!(self.out, "{}", record.to_json_line())?;
                self.out.flush()?;
            }
            Format::Csv => self.pending.push(record),
        }
        Ok(())
    }

    fn finish(mut self) -> anyhow::Result<()> {
        if self.format == Format::Csv {
            write_csv(&self.pending, &mut self.out)?;
        }
        self.out.flush()?;
        Ok(())
    }
}

fn replay(file: &PathBuf, check: bool, sink: &mut Sink) -> anyhow::Result<bool> {
    let reader = BufReader::new(File::open(file).with_context(|| format!("cannot open {}", file.display()))?);
    let mut all_match = true;
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let recorded = ExperimentRecord::from_json_line(&line).with_context(|| format!("line {}", i + 1))?;
        let mut fresh = Vec::new();
        // Errors are captured in the records themselves.
        let _ = run_with(&recorded.spec, |r| {
            fresh.push(r);
            Ok(())
        });
        for record in fresh {
            if check && record.result_fields() != recorded.result_fields() {
                eprintln!("percolab: line {} does not reproduce", i + 1);
                all_match = false;
            }
            sink.emit(record)?;
        }
    }
    Ok(all_match)
}

fn execute_inner(cli: Cli) -> anyhow::Result<bool> {
    let mut sink = Sink::open(cli.output.as_ref(), cli.format)?;
    match cli.workers {
        Some(0) => bail!("--workers must be positive"),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("cannot size the worker pool")?,
        None => {}
    }
    let ok = match cli.command {
        Cmd::Replay { file, check } => replay(&file, check, &mut sink)?,
        cmd => {
            let mut spec = spec_of(cmd)?.expect("run command");
            if spec.seed.is_none() && spec.is_stochastic() {
                let seed: u64 = rand::random();
                eprintln!("percolab: no --seed given, using seed {seed}");
                spec.seed = Some(seed);
            }
            spec.output = Some(OutputSpec {
                path: cli.output.as_ref().map(|p| p.display().to_string()),
                format: cli.format,
            });
            run_with(&spec, |r| sink.emit(r)).is_ok()
        }
    };
    sink.finish()?;
    Ok(ok)
}

/// Runs a parsed command line and returns the process exit code.
pub fn execute(cli: Cli) -> i32 {
    match execute_inner(cli) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            let record = serde_json::json!({ "status": "error", "error": format!("{e:#}") });
            println!("{record}");
            eprintln!("percolab: {e:#}");
            2
        }
    }
}
