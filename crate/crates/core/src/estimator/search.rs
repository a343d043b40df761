//! Stochastic bisection for level crossings of `p -> P_p(f = +1)`.
//!
//! Every evaluation reuses the same seed, so the empirical curve at a fixed
//! trial count is monotone in `p`. A midpoint whose confidence interval
//! straddles the target is re-evaluated with doubled trials; once the
//! doubling budget is spent the point estimate decides and the result is
//! flagged as degraded.

use serde::{Deserialize, Serialize};

use super::{estimate_success_of, Bootstrap, EstimateWithCI, McParams, TrialFunction, DEFAULT_Z};
use crate::error::{Error, Result};
use crate::topology::GraphTopology;

/// Trials may grow to `trials_per_step << DEFAULT_MAX_DOUBLINGS`.
pub const DEFAULT_MAX_DOUBLINGS: u32 = 6;
const MAX_STEPS: u32 = 200;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "lowercase")]
pub enum Precision {
    /// Stop once `p_hi - p_lo <= width`.
    Absolute(f64),
    /// Stop once `p_hi - p_lo <= fraction * (p_lo + p_hi) / 2`.
    Relative(f64),
}

impl Precision {
    fn reached(self, lo: f64, hi: f64) -> bool {
        match self {
            Precision::Absolute(w) => hi - lo <= w,
            Precision::Relative(f) => hi - lo <= f * 0.5 * (lo + hi),
        }
    }

    fn check(self) -> Result<()> {
        let v = match self {
            Precision::Absolute(v) | Precision::Relative(v) => v,
        };
        if !(v > 0.0 && v < 1.0) {
            return Err(Error::Domain(format!("precision must lie in (0, 1), got {v}")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PcSearchParams {
    pub target: f64,
    pub precision: Precision,
    pub trials_per_step: u64,
    pub seed: u64,
    pub z: f64,
    pub max_doublings: u32,
}

impl PcSearchParams {
    pub fn new(target: f64, precision: Precision, trials_per_step: u64, seed: u64) -> Self {
        Self {
            target,
            precision,
            trials_per_step,
            seed,
            z: DEFAULT_Z,
            max_doublings: DEFAULT_MAX_DOUBLINGS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PcSearchResult {
    pub p_c_hat: f64,
    pub target: f64,
    pub p_lo: f64,
    pub p_hi: f64,
    /// Estimate that moved `p_lo`, absent while `p_lo = 0`.
    pub estimate_lo: Option<EstimateWithCI>,
    /// Estimate that moved `p_hi`, absent while `p_hi = 1`.
    pub estimate_hi: Option<EstimateWithCI>,
    pub precision: Precision,
    pub trials_per_step: u64,
    pub total_trials: u64,
    pub steps: u32,
    /// Some step was decided by a point estimate inside its interval.
    pub degraded: bool,
}

impl PcSearchResult {
    pub fn width(&self) -> f64 {
        self.p_hi - self.p_lo
    }
}

/// Bisection on `[0, 1]` for the crossing of `curve` through `params.target`.
/// `curve(p, trials)` must be non-decreasing in `p`.
pub fn bisect_level(
    mut curve: impl FnMut(f64, u64) -> Result<EstimateWithCI>,
    params: &PcSearchParams,
) -> Result<PcSearchResult> {
    if !(params.target > 0.0 && params.target < 1.0) {
        return Err(Error::Domain(format!(
            "target level must lie in (0, 1), got {}",
            params.target
        )));
    }
    params.precision.check()?;
    if params.trials_per_step == 0 {
        return Err(Error::Domain("trials_per_step must be positive".into()));
    }
    let cap = params
        .trials_per_step
        .checked_shl(params.max_doublings)
        .ok_or_else(|| Error::Domain("doubling budget overflows".into()))?;
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let (mut est_lo, mut est_hi) = (None, None);
    let mut degraded = false;
    let mut total_trials = 0u64;
    let mut steps = 0u32;
    while !params.precision.reached(lo, hi) && steps < MAX_STEPS {
        let mid = 0.5 * (lo + hi);
        let mut trials = params.trials_per_step;
        let above = loop {
            let est = curve(mid, trials)?;
            total_trials += trials;
            if est.mean - est.ci_half_width > params.target {
                break (true, est);
            }
            if est.mean + est.ci_half_width < params.target {
                break (false, est);
            }
            if trials >= cap {
                degraded = true;
                break (est.mean >= params.target, est);
            }
            trials *= 2;
        };
        match above {
            (true, est) => {
                hi = mid;
                est_hi = Some(est);
            }
            (false, est) => {
                lo = mid;
                est_lo = Some(est);
            }
        }
        steps += 1;
    }
    Ok(PcSearchResult {
        p_c_hat: 0.5 * (lo + hi),
        target: params.target,
        p_lo: lo,
        p_hi: hi,
        estimate_lo: est_lo,
        estimate_hi: est_hi,
        precision: params.precision,
        trials_per_step: params.trials_per_step,
        total_trials,
        steps,
        degraded,
    })
}

pub fn estimate_pc_of<F: TrialFunction>(f: &F, params: &PcSearchParams) -> Result<PcSearchResult> {
    bisect_level(
        |p, trials| {
            estimate_success_of(
                f,
                p,
                &McParams {
                    trials,
                    seed: params.seed,
                    z: params.z,
                },
            )
        },
        params,
    )
}

/// Density at which the probability of complete occupation crosses
/// `params.target`.
pub fn estimate_pc(g: &GraphTopology, k: usize, params: &PcSearchParams) -> Result<PcSearchResult> {
    estimate_pc_of(&Bootstrap::new(g, k)?, params)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowResult {
    pub levels: (f64, f64),
    pub p_at_low_level: f64,
    pub p_at_high_level: f64,
    pub lower: PcSearchResult,
    pub upper: PcSearchResult,
    /// `upper.p_c_hat - lower.p_c_hat`.
    pub width: f64,
    pub degraded: bool,
}

/// Distance between the crossings of the two `levels`, both searched with
/// the same seed.
pub fn estimate_window(
    g: &GraphTopology,
    k: usize,
    levels: (f64, f64),
    params: &PcSearchParams,
) -> Result<WindowResult> {
    estimate_window_of(&Bootstrap::new(g, k)?, levels, params)
}

pub fn estimate_window_of<F: TrialFunction>(
    f: &F,
    levels: (f64, f64),
    params: &PcSearchParams,
) -> Result<WindowResult> {
    if levels.0 > levels.1 {
        return Err(Error::Domain(format!(
            "window levels must be ordered, got ({}, {})",
            levels.0, levels.1
        )));
    }
    let lower = estimate_pc_of(
        f,
        &PcSearchParams {
            target: levels.0,
            ..*params
        },
    )?;
    let upper = estimate_pc_of(
        f,
        &PcSearchParams {
            target: levels.1,
            ..*params
        },
    )?;
    Ok(WindowResult {
        levels,
        p_at_low_level: lower.p_c_hat,
        p_at_high_level: upper.p_c_hat,
        width: upper.p_c_hat - lower.p_c_hat,
        degraded: lower.degraded || upper.degraded,
        lower,
        upper,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimator::Provenance;
    use crate::topology::{build_lattice, LatticeKind};

    fn exact_curve(f: impl Fn(f64) -> f64) -> impl FnMut(f64, u64) -> Result<EstimateWithCI> {
        move |p, trials| {
            Ok(EstimateWithCI {
                mean: f(p),
                trials,
                ci_half_width: 0.0,
                z: DEFAULT_Z,
                seed: 0,
                provenance: Provenance::default(),
            })
        }
    }

    #[test]
    fn bisection_on_exact_curve() {
        let params = PcSearchParams::new(0.5, Precision::Absolute(1e-6), 10, 0);
        let res = bisect_level(exact_curve(|p| p * p), &params).unwrap();
        assert!((res.p_c_hat - 0.5f64.sqrt()).abs() < 1e-6);
        assert!(!res.degraded);
        assert!(res.width() <= 1e-6);
    }

    #[test]
    fn relative_precision() {
        let params = PcSearchParams::new(0.5, Precision::Relative(0.02), 10, 0);
        let res = bisect_level(exact_curve(|p| (p / 0.01).min(1.0)), &params).unwrap();
        assert!((res.p_c_hat - 0.005).abs() <= 0.02 * 0.005);
    }

    #[test]
    fn flat_curve_degrades() {
        let params = PcSearchParams::new(0.5, Precision::Absolute(0.1), 4, 0);
        let curve = |_p: f64, trials: u64| {
            Ok(EstimateWithCI {
                mean: 0.5,
                trials,
                ci_half_width: 0.1,
                z: DEFAULT_Z,
                seed: 0,
                provenance: Provenance::default(),
            })
        };
        let res = bisect_level(curve, &params).unwrap();
        assert!(res.degraded);
        assert_eq!(res.total_trials, res.steps as u64 * (4 + 8 + 16 + 32 + 64 + 128 + 256));
    }

    #[test]
    fn invalid_parameters() {
        let c = || exact_curve(|p| p);
        assert!(bisect_level(c(), &PcSearchParams::new(1.0, Precision::Absolute(0.1), 10, 0)).is_err());
        assert!(bisect_level(c(), &PcSearchParams::new(0.5, Precision::Absolute(0.0), 10, 0)).is_err());
        assert!(bisect_level(c(), &PcSearchParams::new(0.5, Precision::Absolute(0.1), 0, 0)).is_err());
    }

    #[test]
    fn bracket_straddles_target() {
        let g = build_lattice(LatticeKind::Torus, 16, 2).unwrap();
        let params = PcSearchParams::new(0.5, Precision::Absolute(0.01), 400, 3);
        let res = estimate_pc(&g, 2, &params).unwrap();
        assert!(res.width() <= 0.01);
        if !res.degraded {
            assert!(res.estimate_lo.as_ref().is_none_or(|e| e.mean < 0.5));
            assert!(res.estimate_hi.as_ref().is_none_or(|e| e.mean > 0.5));
        }
    }

    #[test]
    fn equal_levels_have_zero_width() {
        let g = build_lattice(LatticeKind::Torus, 8, 2).unwrap();
        let params = PcSearchParams::new(0.5, Precision::Absolute(0.02), 200, 1);
        let w = estimate_window(&g, 2, (0.5, 0.5), &params).unwrap();
        assert_eq!(w.width, 0.0);
    }
}
