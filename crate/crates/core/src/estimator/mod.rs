//! Seeded Monte Carlo estimators.
//!
//! Trial `t` of an estimator with seed `s` reads its initial configuration
//! from stream `(s, Config, t)` and its noise from `(s, Noise, t)`. Per-trial
//! outcomes are reduced through integer sums, so results are bit-identical
//! for any worker count. Bits are drawn as `u < p` from a fixed sequence of
//! uniforms, so configurations at `p < p'` with the same seed are coupled
//! monotonically.

mod search;

pub use search::{
    bisect_level, estimate_pc, estimate_pc_of, estimate_window, estimate_window_of, PcSearchParams, PcSearchResult,
    Precision, WindowResult, DEFAULT_MAX_DOUBLINGS,
};

use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::boolean_lab::BooleanFunctionSpec;
use crate::bootstrap::{check_inputs, check_threshold, ClosureEngine};
use crate::config::BitConfig;
use crate::error::{Error, Result};
use crate::rng::{bernoulli_threshold, draw, StreamFactory, StreamTag};
use crate::topology::GraphTopology;

/// Two-sided 99% normal quantile.
pub const DEFAULT_Z: f64 = 2.5758;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McParams {
    pub trials: u64,
    pub seed: u64,
    pub z: f64,
}

impl McParams {
    pub fn new(trials: u64, seed: u64) -> Self {
        Self {
            trials,
            seed,
            z: DEFAULT_Z,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub function: String,
    pub k: Option<usize>,
    pub p: Option<f64>,
    pub eps: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateWithCI {
    pub mean: f64,
    pub trials: u64,
    /// `z * sqrt(v / trials)` with `v` the empirical per-trial variance.
    pub ci_half_width: f64,
    pub z: f64,
    pub seed: u64,
    pub provenance: Provenance,
}

impl EstimateWithCI {
    /// Standard error, `ci_half_width / z`.
    pub fn sigma(&self) -> f64 {
        self.ci_half_width / self.z
    }

    fn from_variance(mean: f64, variance: f64, params: &McParams, provenance: Provenance) -> Self {
        let variance = variance.max(0.0);
        Self {
            mean,
            trials: params.trials,
            ci_half_width: params.z * (variance / params.trials as f64).sqrt(),
            z: params.z,
            seed: params.seed,
            provenance,
        }
    }
}

/// A `{-1, +1}`-valued function evaluated once or twice per trial.
pub trait TrialFunction: Sync {
    fn arity(&self) -> usize;
    fn eval(&self, cfg: &BitConfig, engine: &mut ClosureEngine) -> bool;
    fn is_monotone(&self) -> bool;
    fn describe(&self) -> String;
    fn threshold(&self) -> Option<usize> {
        None
    }
}

/// Complete occupation of `graph` under the `k`-neighbour rule.
#[derive(Debug, Clone, Copy)]
pub struct Bootstrap<'a> {
    pub graph: &'a GraphTopology,
    pub k: usize,
}

impl<'a> Bootstrap<'a> {
    pub fn new(graph: &'a GraphTopology, k: usize) -> Result<Self> {
        check_threshold(graph, k)?;
        Ok(Self { graph, k })
    }
}

impl TrialFunction for Bootstrap<'_> {
    fn arity(&self) -> usize {
        self.graph.vertex_count()
    }

    #[inline]
    fn eval(&self, cfg: &BitConfig, engine: &mut ClosureEngine) -> bool {
        engine.complete_unchecked(self.graph, self.k, cfg)
    }

    fn is_monotone(&self) -> bool {
        true
    }

    fn describe(&self) -> String {
        self.graph.kind().to_string()
    }

    fn threshold(&self) -> Option<usize> {
        Some(self.k)
    }
}

impl TrialFunction for BooleanFunctionSpec {
    fn arity(&self) -> usize {
        BooleanFunctionSpec::arity(self)
    }

    fn eval(&self, cfg: &BitConfig, engine: &mut ClosureEngine) -> bool {
        self.eval_with(cfg, engine)
    }

    fn is_monotone(&self) -> bool {
        BooleanFunctionSpec::is_monotone(self)
    }

    fn describe(&self) -> String {
        self.canonical()
    }
}

fn check_unit(name: &str, x: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::Domain(format!("{name} must lie in [0, 1], got {x}")));
    }
    Ok(())
}

fn check_trials(trials: u64, min: u64) -> Result<()> {
    if trials < min {
        return Err(Error::Domain(format!("need at least {min} trials, got {trials}")));
    }
    Ok(())
}

fn fill_config(cfg: &mut BitConfig, threshold: u64, rng: &mut ChaCha8Rng) {
    for v in 0..cfg.len() {
        cfg.set(v, draw(rng, threshold));
    }
}

fn fill_noise(cfg: &mut BitConfig, eps_threshold: u64, p_threshold: u64, rng: &mut ChaCha8Rng) {
    for v in 0..cfg.len() {
        // Two draws per bit regardless of outcome keep the stream aligned.
        let resample = draw(rng, eps_threshold);
        let fresh = draw(rng, p_threshold);
        if resample {
            cfg.set(v, fresh);
        }
    }
}

/// Initial configuration of trial `trial`: each bit occupied with
/// probability `p`.
pub fn sample_config(m: usize, p: f64, seed: u64, trial: u64) -> Result<BitConfig> {
    check_unit("p", p)?;
    let mut cfg = BitConfig::vacant(m);
    cfg.p = p;
    fill_config(
        &mut cfg,
        bernoulli_threshold(p),
        &mut StreamFactory::new(seed, StreamTag::Config).stream(trial),
    );
    Ok(cfg)
}

/// Resamples each bit of `omega` from `Bernoulli(p)` with probability `eps`.
pub fn apply_noise(omega: &BitConfig, eps: f64, p: f64, seed: u64, trial: u64) -> Result<BitConfig> {
    check_unit("eps", eps)?;
    check_unit("p", p)?;
    let mut out = omega.clone();
    fill_noise(
        &mut out,
        bernoulli_threshold(eps),
        bernoulli_threshold(p),
        &mut StreamFactory::new(seed, StreamTag::Noise).stream(trial),
    );
    Ok(out)
}

struct TrialState {
    engine: ClosureEngine,
    cfg: BitConfig,
    other: BitConfig,
}

/// Runs `per_trial` over all trial indices and sums the integer outcome
/// vectors.
fn sum_trials<const N: usize>(
    arity: usize,
    trials: u64,
    per_trial: impl Fn(&mut TrialState, u64) -> [i64; N] + Sync,
) -> [i64; N] {
    (0..trials)
        .into_par_iter()
        .map_init(
            || TrialState {
                engine: ClosureEngine::new(),
                cfg: BitConfig::vacant(arity),
                other: BitConfig::vacant(arity),
            },
            |state, t| per_trial(state, t),
        )
        .reduce(
            || [0i64; N],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        )
}

fn bernoulli_estimate(hits: i64, params: &McParams, provenance: Provenance) -> EstimateWithCI {
    let n = params.trials as f64;
    let mean = hits as f64 / n;
    let variance = if params.trials > 1 {
        mean * (1.0 - mean) * n / (n - 1.0)
    } else {
        0.0
    };
    EstimateWithCI::from_variance(mean, variance, params, provenance)
}

pub fn estimate_success_of<F: TrialFunction>(f: &F, p: f64, params: &McParams) -> Result<EstimateWithCI> {
    check_unit("p", p)?;
    check_trials(params.trials, 1)?;
    let streams = StreamFactory::new(params.seed, StreamTag::Config);
    let threshold = bernoulli_threshold(p);
    let [hits] = sum_trials(f.arity(), params.trials, |st, t| {
        fill_config(&mut st.cfg, threshold, &mut streams.stream(t));
        [f.eval(&st.cfg, &mut st.engine) as i64]
    });
    Ok(bernoulli_estimate(
        hits,
        params,
        Provenance {
            function: f.describe(),
            k: f.threshold(),
            p: Some(p),
            eps: None,
        },
    ))
}

/// Fraction of trials whose closure occupies every vertex.
pub fn estimate_success(g: &GraphTopology, k: usize, p: f64, params: &McParams) -> Result<EstimateWithCI> {
    estimate_success_of(&Bootstrap::new(g, k)?, p, params)
}

/// Delta-method variance of `(m_ab - m_a m_b) / sqrt((1 - m_a^2)(1 - m_b^2))`
/// for `{-1, +1}` pairs.
fn pearson_pm1(m_ab: f64, m_a: f64, m_b: f64) -> (f64, f64) {
    let va = 1.0 - m_a * m_a;
    let vb = 1.0 - m_b * m_b;
    let s = (va * vb).sqrt();
    let num = m_ab - m_a * m_b;
    let r = num / s;
    let g = [
        1.0 / s,
        -m_b / s + num * m_a / (va * s),
        -m_a / s + num * m_b / (vb * s),
    ];
    let cov = covariance_pm1(m_ab, m_a, m_b);
    (r, quad_form(&g, &cov))
}

/// Per-trial covariance matrix of `(ab, a, b)` for `a, b` in `{-1, +1}`.
fn covariance_pm1(m_ab: f64, m_a: f64, m_b: f64) -> [[f64; 3]; 3] {
    let c01 = m_b - m_ab * m_a;
    let c02 = m_a - m_ab * m_b;
    let c12 = m_ab - m_a * m_b;
    [
        [1.0 - m_ab * m_ab, c01, c02],
        [c01, 1.0 - m_a * m_a, c12],
        [c02, c12, 1.0 - m_b * m_b],
    ]
}

fn quad_form(g: &[f64; 3], m: &[[f64; 3]; 3]) -> f64 {
    (0..3).map(|i| (0..3).map(|j| g[i] * m[i][j] * g[j]).sum::<f64>()).sum()
}

pub fn estimate_noise_corr_of<F: TrialFunction>(f: &F, p: f64, eps: f64, params: &McParams) -> Result<EstimateWithCI> {
    check_unit("p", p)?;
    check_unit("eps", eps)?;
    check_trials(params.trials, 2)?;
    let config_streams = StreamFactory::new(params.seed, StreamTag::Config);
    let noise_streams = StreamFactory::new(params.seed, StreamTag::Noise);
    let p_threshold = bernoulli_threshold(p);
    let eps_threshold = bernoulli_threshold(eps);
    let [sa, sb, sab] = sum_trials(f.arity(), params.trials, |st, t| {
        fill_config(&mut st.cfg, p_threshold, &mut config_streams.stream(t));
        let a = if f.eval(&st.cfg, &mut st.engine) { 1 } else { -1 };
        st.other.clone_from(&st.cfg);
        fill_noise(&mut st.other, eps_threshold, p_threshold, &mut noise_streams.stream(t));
        let b = if f.eval(&st.other, &mut st.engine) { 1 } else { -1 };
        [a, b, a * b]
    });
    let n = params.trials as f64;
    let (m_a, m_b, m_ab) = (sa as f64 / n, sb as f64 / n, sab as f64 / n);
    if sa.unsigned_abs() == params.trials || sb.unsigned_abs() == params.trials {
        return Err(Error::Degenerate(format!(
            "f was constant over all {} trials at p={p}; the correlation is undefined",
            params.trials
        )));
    }
    let (r, variance) = pearson_pm1(m_ab, m_a, m_b);
    Ok(EstimateWithCI::from_variance(
        r,
        variance,
        params,
        Provenance {
            function: f.describe(),
            k: f.threshold(),
            p: Some(p),
            eps: Some(eps),
        },
    ))
}

/// Empirical correlation of `f(omega)` and `f(omega^eps)`.
pub fn estimate_noise_corr(g: &GraphTopology, k: usize, p: f64, eps: f64, params: &McParams) -> Result<EstimateWithCI> {
    estimate_noise_corr_of(&Bootstrap::new(g, k)?, p, eps, params)
}

/// Probability that bit `x` is pivotal: each trial samples the other bits
/// and evaluates `f` with `x` occupied and with `x` vacant.
pub fn estimate_influence_of<F: TrialFunction>(f: &F, p: f64, x: usize, params: &McParams) -> Result<EstimateWithCI> {
    check_unit("p", p)?;
    check_trials(params.trials, 1)?;
    if x >= f.arity() {
        return Err(Error::Domain(format!("bit {x} out of range for arity {}", f.arity())));
    }
    let streams = StreamFactory::new(params.seed, StreamTag::Config);
    let threshold = bernoulli_threshold(p);
    let monotone = f.is_monotone();
    let [hits] = sum_trials(f.arity(), params.trials, |st, t| {
        fill_config(&mut st.cfg, threshold, &mut streams.stream(t));
        st.cfg.set(x, true);
        let up = f.eval(&st.cfg, &mut st.engine);
        if monotone && !up {
            return [0];
        }
        st.cfg.set(x, false);
        let down = f.eval(&st.cfg, &mut st.engine);
        [(up != down) as i64]
    });
    Ok(bernoulli_estimate(
        hits,
        params,
        Provenance {
            function: f.describe(),
            k: f.threshold(),
            p: Some(p),
            eps: None,
        },
    ))
}

pub fn estimate_influence(g: &GraphTopology, k: usize, p: f64, x: usize, params: &McParams) -> Result<EstimateWithCI> {
    check_inputs(g, k, &BitConfig::vacant(g.vertex_count()))?;
    estimate_influence_of(&Bootstrap::new(g, k)?, p, x, params)
}

/// `Cov_p(f, Maj)` where `Maj = sign(sum_i (x_i - (2p - 1)) - 2 L sqrt(n))`
/// with unit weights and `sign(0) = +1`.
pub fn maj_covariance_of<F: TrialFunction>(f: &F, p: f64, l: f64, params: &McParams) -> Result<EstimateWithCI> {
    check_unit("p", p)?;
    check_trials(params.trials, 2)?;
    let n = f.arity();
    let shift = 2.0 * l * (n as f64).sqrt();
    let streams = StreamFactory::new(params.seed, StreamTag::Config);
    let threshold = bernoulli_threshold(p);
    let [sf, sm, sfm] = sum_trials(n, params.trials, |st, t| {
        fill_config(&mut st.cfg, threshold, &mut streams.stream(t));
        let fv: i64 = if f.eval(&st.cfg, &mut st.engine) { 1 } else { -1 };
        // sum_i (x_i - (2p - 1)) = 2 * occupied - 2 n p
        let centred = 2.0 * st.cfg.count_occupied() as f64 - 2.0 * n as f64 * p;
        let mv: i64 = if centred - shift >= 0.0 { 1 } else { -1 };
        [fv, mv, fv * mv]
    });
    let trials = params.trials as f64;
    let (m_f, m_m, m_fm) = (sf as f64 / trials, sm as f64 / trials, sfm as f64 / trials);
    let cov = m_fm - m_f * m_m;
    let g = [1.0, -m_m, -m_f];
    let variance = quad_form(&g, &covariance_pm1(m_fm, m_f, m_m));
    Ok(EstimateWithCI::from_variance(
        cov,
        variance,
        params,
        Provenance {
            function: f.describe(),
            k: f.threshold(),
            p: Some(p),
            eps: None,
        },
    ))
}

pub fn maj_covariance(g: &GraphTopology, k: usize, p: f64, l: f64, params: &McParams) -> Result<EstimateWithCI> {
    maj_covariance_of(&Bootstrap::new(g, k)?, p, l, params)
}
