//! Boolean functions on `{-1, 1}^m`: bootstrap occupation, majority, tribes
//! and generalized majority, plus exhaustive oracles over the hypercube.

pub mod exact;
pub mod golden;
pub mod revealment;

pub use exact::{
    exact_influences, exact_noise_correlation, exact_success_prob, exact_success_prob_of, influence_polynomials,
    success_polynomial, CountPolynomial, ExactResult, InfluencePolynomials, Influences, NoiseCorrelation,
    ENUMERATION_CAP, JOINT_ENUMERATION_CAP,
};
pub use golden::{format_ratio, parse_ratio, OracleGolden};
pub use revealment::{
    tribes_revealment, tribes_revealment_exact, tribes_revealment_fixed_order, tribes_revealment_mc, Revealment,
    REVEALMENT_EXACT_CAP,
};

use rayon::prelude::*;

use crate::bootstrap::{check_threshold, ClosureEngine};
use crate::config::{BitConfig, Bits};
use crate::error::{Error, Result};
use crate::topology::GraphTopology;

#[derive(Debug, Clone, PartialEq)]
pub enum BooleanFunctionSpec {
    /// `+1` iff the `k`-neighbour closure occupies every vertex of `graph`.
    BootstrapOccupation {
        graph: GraphTopology,
        k: usize,
    },
    Majority {
        m: usize,
    },
    /// `2^k` disjoint tribes of `k` consecutive bits; `+1` iff some tribe is
    /// all `+1`.
    Tribes {
        k: usize,
    },
    /// `sign(sum_i w_i (x_i - (2p - 1)) - shift)` with `sign(0) = +1`.
    GeneralizedMajority {
        weights: Vec<f64>,
        shift: f64,
        p: f64,
    },
}

impl BooleanFunctionSpec {
    pub fn bootstrap(graph: GraphTopology, k: usize) -> Result<Self> {
        check_threshold(&graph, k)?;
        Ok(Self::BootstrapOccupation { graph, k })
    }

    pub fn majority(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::Domain("majority needs at least one bit".into()));
        }
        Ok(Self::Majority { m })
    }

    pub fn tribes(k: usize) -> Result<Self> {
        if k == 0 || k > 5 {
            return Err(Error::Domain(format!("tribe size must be in [1, 5], got {k}")));
        }
        Ok(Self::Tribes { k })
    }

    pub fn generalized_majority(weights: Vec<f64>, shift: f64, p: f64) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::Domain("generalized majority needs at least one weight".into()));
        }
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Domain(format!("density must lie in [0, 1], got {p}")));
        }
        Ok(Self::GeneralizedMajority { weights, shift, p })
    }

    pub fn arity(&self) -> usize {
        match self {
            Self::BootstrapOccupation { graph, .. } => graph.vertex_count(),
            Self::Majority { m } => *m,
            Self::Tribes { k } => k << k,
            Self::GeneralizedMajority { weights, .. } => weights.len(),
        }
    }

    pub fn is_monotone(&self) -> bool {
        match self {
            Self::GeneralizedMajority { weights, .. } => weights.iter().all(|&w| w >= 0.0),
            _ => true,
        }
    }

    /// Stable textual key, used by the oracle golden file.
    pub fn canonical(&self) -> String {
        match self {
            Self::BootstrapOccupation { graph, k } => {
                format!("bootstrap[{}; k={k}]", graph.kind())
            }
            Self::Majority { m } => format!("majority[m={m}]"),
            Self::Tribes { k } => format!("tribes[k={k}]"),
            Self::GeneralizedMajority { weights, shift, p } => {
                let w: Vec<String> = weights.iter().map(|x| x.to_string()).collect();
                format!("genmaj[w={}; s={shift}; p={p}]", w.join(","))
            }
        }
    }

    /// Function value in `{-1, +1}`.
    pub fn eval(&self, omega: &BitConfig) -> Result<i8> {
        if omega.len() != self.arity() {
            return Err(Error::LengthMismatch {
                expected: self.arity(),
                got: omega.len(),
            });
        }
        let mut engine = ClosureEngine::new();
        Ok(if self.eval_with(omega, &mut engine) { 1 } else { -1 })
    }

    /// `true` for `+1`. Length must already match the arity.
    pub fn eval_with(&self, omega: &BitConfig, engine: &mut ClosureEngine) -> bool {
        match self {
            Self::BootstrapOccupation { graph, k } => engine.complete_unchecked(graph, *k, omega),
            Self::Majority { m } => 2 * omega.count_occupied() >= *m,
            Self::Tribes { k } => {
                let k = *k;
                let bits = omega.bits();
                bits.chunks(k).any(|tribe| tribe.all())
            }
            Self::GeneralizedMajority { weights, shift, p } => {
                let centre = 2.0 * p - 1.0;
                let s: f64 = weights
                    .iter()
                    .enumerate()
                    .map(|(i, w)| w * (f64::from(omega.spin(i)) - centre))
                    .sum();
                s - shift >= 0.0
            }
        }
    }

    /// Values on every point of the hypercube: bit `x` of the result is
    /// `f(omega)` for the configuration whose vertex `i` is occupied iff bit
    /// `i` of `x` is set.
    pub fn truth_table(&self) -> Result<Bits> {
        let m = self.arity();
        if m > ENUMERATION_CAP {
            return Err(Error::SizeCap {
                what: "hypercube enumeration",
                cap: ENUMERATION_CAP,
                got: m,
            });
        }
        let size = 1u64 << m;
        const CHUNK: u64 = 1 << 12;
        let chunks: Vec<Vec<bool>> = (0..size.div_ceil(CHUNK))
            .into_par_iter()
            .map(|c| {
                let mut engine = ClosureEngine::new();
                let lo = c * CHUNK;
                let hi = (lo + CHUNK).min(size);
                (lo..hi)
                    .map(|x| self.eval_with(&BitConfig::from_mask(x, m), &mut engine))
                    .collect()
            })
            .collect();
        Ok(chunks.into_iter().flatten().collect())
    }
}
