//! Exhaustive hypercube oracles with exact rational arithmetic.
//!
//! Success probabilities and influences are kept as count polynomials
//! `sum_j c_j p^j (1-p)^(m-j)`, so one enumeration serves every density and
//! the derivative in `p` is available exactly.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::BooleanFunctionSpec;
use crate::error::{Error, Result};
use crate::topology::GraphTopology;

/// Maximum arity for single-hypercube enumeration.
pub const ENUMERATION_CAP: usize = 20;
/// Maximum arity for noise correlations (joint law of a pair of points).
pub const JOINT_ENUMERATION_CAP: usize = 13;

#[derive(Debug, Clone, PartialEq)]
pub struct ExactResult {
    pub value: BigRational,
    pub enumeration_size: u64,
}

impl ExactResult {
    pub fn to_f64(&self) -> f64 {
        ratio_to_f64(&self.value)
    }
}

pub(crate) fn ratio_to_f64(r: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

fn check_unit(name: &str, x: &BigRational) -> Result<()> {
    if x.is_negative() || *x > BigRational::one() {
        return Err(Error::Domain(format!("{name} must lie in [0, 1], got {x}")));
    }
    Ok(())
}

fn powers(x: &BigRational, upto: usize) -> Vec<BigRational> {
    let mut out = Vec::with_capacity(upto + 1);
    let mut acc = BigRational::one();
    for _ in 0..=upto {
        out.push(acc.clone());
        acc *= x;
    }
    out
}

/// `sum_j counts[j] p^j (1-p)^(m-j)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CountPolynomial {
    pub m: usize,
    pub counts: Vec<u64>,
}

impl CountPolynomial {
    pub fn eval(&self, p: &BigRational) -> BigRational {
        let q = BigRational::one() - p;
        let pp = powers(p, self.m);
        let qp = powers(&q, self.m);
        self.counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(j, &c)| BigRational::from_integer(BigInt::from(c)) * &pp[j] * &qp[self.m - j])
            .fold(BigRational::zero(), |a, b| a + b)
    }

    pub fn eval_f64(&self, p: f64) -> f64 {
        let q = 1.0 - p;
        self.counts
            .iter()
            .enumerate()
            .map(|(j, &c)| c as f64 * p.powi(j as i32) * q.powi((self.m - j) as i32))
            .sum()
    }

    /// Exact derivative in `p`.
    pub fn derivative(&self, p: &BigRational) -> BigRational {
        let q = BigRational::one() - p;
        let pp = powers(p, self.m);
        let qp = powers(&q, self.m);
        let mut total = BigRational::zero();
        for (j, &c) in self.counts.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let c = BigRational::from_integer(BigInt::from(c));
            let mj = self.m - j;
            if j > 0 {
                total += &c * BigRational::from_integer(BigInt::from(j)) * &pp[j - 1] * &qp[mj];
            }
            if mj > 0 {
                total -= &c * BigRational::from_integer(BigInt::from(mj)) * &pp[j] * &qp[mj - 1];
            }
        }
        total
    }

    /// Density where the (monotone) polynomial crosses `level`, by bisection
    /// on `[0, 1]`.
    pub fn level_crossing(&self, level: f64) -> f64 {
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.eval_f64(mid) < level {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }
}

/// Count polynomial of `P(f = +1)`.
pub fn success_polynomial(f: &BooleanFunctionSpec) -> Result<CountPolynomial> {
    let m = f.arity();
    let table = f.truth_table()?;
    let mut counts = vec![0u64; m + 1];
    for x in table.iter_ones() {
        counts[(x as u64).count_ones() as usize] += 1;
    }
    Ok(CountPolynomial { m, counts })
}

pub fn exact_success_prob_of(f: &BooleanFunctionSpec, p: &BigRational) -> Result<ExactResult> {
    check_unit("p", p)?;
    let poly = success_polynomial(f)?;
    Ok(ExactResult {
        value: poly.eval(p),
        enumeration_size: 1 << f.arity(),
    })
}

/// Probability that the `k`-neighbour closure of a `Bernoulli(p)` initial
/// set occupies all of `g`.
pub fn exact_success_prob(g: &GraphTopology, k: usize, p: &BigRational) -> Result<ExactResult> {
    let f = BooleanFunctionSpec::bootstrap(g.clone(), k)?;
    exact_success_prob_of(&f, p)
}

/// Per-bit pivotality count polynomials over the other `m - 1` bits.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InfluencePolynomials {
    pub per_bit: Vec<CountPolynomial>,
}

pub fn influence_polynomials(f: &BooleanFunctionSpec) -> Result<InfluencePolynomials> {
    let m = f.arity();
    let table = f.truth_table()?;
    let mut per_bit = vec![vec![0u64; m]; m];
    for x in 0..(1usize << m) {
        let fx = table[x];
        let others = (x as u64).count_ones() as usize;
        for (i, counts) in per_bit.iter_mut().enumerate() {
            let bit = 1usize << i;
            if x & bit == 0 && table[x | bit] != fx {
                counts[others] += 1;
            }
        }
    }
    Ok(InfluencePolynomials {
        per_bit: per_bit
            .into_iter()
            .map(|counts| CountPolynomial {
                m: m.saturating_sub(1),
                counts,
            })
            .collect(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Influences {
    pub per_bit: Vec<BigRational>,
    /// Total influence, equal to the expected number of pivotal bits.
    pub total: BigRational,
    pub sum_squares: BigRational,
    pub enumeration_size: u64,
}

pub fn exact_influences(f: &BooleanFunctionSpec, p: &BigRational) -> Result<Influences> {
    check_unit("p", p)?;
    let polys = influence_polynomials(f)?;
    let per_bit: Vec<BigRational> = polys.per_bit.iter().map(|c| c.eval(p)).collect();
    let total = per_bit.iter().fold(BigRational::zero(), |a, b| a + b);
    let sum_squares = per_bit.iter().fold(BigRational::zero(), |a, b| a + b * b);
    Ok(Influences {
        per_bit,
        total,
        sum_squares,
        enumeration_size: 1 << f.arity(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct NoiseCorrelation {
    /// `E f` for the `{-1, +1}`-valued function.
    pub mean: BigRational,
    pub variance: BigRational,
    pub covariance: BigRational,
    /// `None` when the function is constant under `P_p`.
    pub correlation: Option<BigRational>,
    pub enumeration_size: u64,
}

/// Exact `Cov` and `Corr` of `(f(omega), f(omega^eps))`, where each bit of
/// `omega^eps` is independently resampled from `Bernoulli(p)` with
/// probability `eps`.
///
/// The per-bit kernel `K(x -> x') = (1-eps) 1{x'=x} + eps P_p(x')` is applied
/// one coordinate at a time to the truth table, which equals the double sum
/// over pairs of points.
pub fn exact_noise_correlation(
    f: &BooleanFunctionSpec,
    p: &BigRational,
    eps: &BigRational,
) -> Result<NoiseCorrelation> {
    check_unit("p", p)?;
    check_unit("eps", eps)?;
    let m = f.arity();
    if m > JOINT_ENUMERATION_CAP {
        return Err(Error::SizeCap {
            what: "noise correlation enumeration",
            cap: JOINT_ENUMERATION_CAP,
            got: m,
        });
    }
    let table = f.truth_table()?;
    let size = 1usize << m;
    let one = BigRational::one();
    let q = &one - p;
    let keep = &one - eps;
    let values: Vec<BigRational> = (0..size)
        .map(|x| if table[x] { one.clone() } else { -one.clone() })
        .collect();

    let mut smoothed = values.clone();
    for i in 0..m {
        let bit = 1usize << i;
        for x in 0..size {
            if x & bit != 0 {
                continue;
            }
            let a = smoothed[x].clone();
            let b = smoothed[x | bit].clone();
            let fresh = p * &b + &q * &a;
            let mixed = eps * &fresh;
            smoothed[x] = &keep * &a + &mixed;
            smoothed[x | bit] = &keep * &b + mixed;
        }
    }

    let pp = powers(p, m);
    let qp = powers(&q, m);
    let mut mean = BigRational::zero();
    let mut joint = BigRational::zero();
    for x in 0..size {
        let ones = x.count_ones() as usize;
        let weight = &pp[ones] * &qp[m - ones];
        if weight.is_zero() {
            continue;
        }
        let fx = &values[x];
        joint += &weight * fx * &smoothed[x];
        mean += weight * fx;
    }
    let variance = &one - &mean * &mean;
    let covariance = joint - &mean * &mean;
    let correlation = if variance.is_zero() {
        None
    } else {
        Some(&covariance / &variance)
    };
    Ok(NoiseCorrelation {
        mean,
        variance,
        covariance,
        correlation,
        enumeration_size: 1u64 << (2 * m),
    })
}
