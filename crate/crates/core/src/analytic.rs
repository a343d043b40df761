//! Closed forms and root finding for bootstrap percolation on regular trees
//! and random regular graphs, the Keller-Kindler noise bound, the witness
//! fraction bound and the Euclidean reference scaling.

use serde::Serialize;

use crate::error::{Error, Result};

const GRID_INTERVALS: usize = 1024;
const GOLDEN_TOL: f64 = 1e-12;

fn binomial(n: usize, j: usize) -> f64 {
    if j > n {
        return 0.0;
    }
    let j = j.min(n - j);
    (0..j).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `P(Binomial(n, q) < k)` as a sum of nonnegative terms.
pub fn binomial_cdf_below(n: usize, q: f64, k: usize) -> f64 {
    (0..k.min(n + 1))
        .map(|j| binomial(n, j) * q.powi(j as i32) * (1.0 - q).powi((n - j) as i32))
        .sum()
}

fn check_tree_params(d: usize, k: usize) -> Result<()> {
    if d < 3 || k < 2 || k > d - 1 {
        return Err(Error::Domain(format!(
            "tree parameters need d >= 3 and 2 <= k <= d-1, got d={d}, k={k}"
        )));
    }
    Ok(())
}

/// `D(y) = P(Binomial(d-1, 1-y) < k) / y`, a polynomial on `[0, 1]`.
/// `R = 1 / D`, which extends `R` continuously to `y = 0`.
fn tail_over_y(y: f64, d: usize, k: usize) -> f64 {
    (0..k)
        .map(|j| binomial(d - 1, j) * (1.0 - y).powi(j as i32) * y.powi((d - 2 - j) as i32))
        .sum()
}

fn tail_over_y_derivative(y: f64, d: usize, k: usize) -> f64 {
    let mut total = 0.0;
    for j in 0..k {
        let c = binomial(d - 1, j);
        let e = d - 2 - j;
        if j > 0 {
            total -= c * j as f64 * (1.0 - y).powi(j as i32 - 1) * y.powi(e as i32);
        }
        if e > 0 {
            total += c * e as f64 * (1.0 - y).powi(j as i32) * y.powi(e as i32 - 1);
        }
    }
    total
}

fn r_extended(y: f64, d: usize, k: usize) -> f64 {
    let denom = tail_over_y(y, d, k);
    if denom <= 0.0 {
        f64::INFINITY
    } else {
        1.0 / denom
    }
}

/// `R(y) = y / P(Binomial(d-1, 1-y) < k)`.
pub fn r_function(y: f64, d: usize, k: usize) -> Result<f64> {
    check_tree_params(d, k)?;
    if !(y > 0.0 && y <= 1.0) {
        return Err(Error::Domain(format!("y must lie in (0, 1], got {y}")));
    }
    Ok(r_extended(y, d, k))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TreeCritical {
    pub d: usize,
    pub k: usize,
    /// Interior minimiser of `R`; `None` when the infimum is the limit
    /// `y -> 0` (the case `k = d - 1`).
    pub y_star: Option<f64>,
    pub p_star: f64,
}

/// `p* = 1 - inf_{y in (0,1)} R(y)`.
///
/// `R` is bracketed on a 1024-interval grid, refined by golden-section search
/// and then polished by bisection on the sign of `R'`.
pub fn p_star(d: usize, k: usize) -> Result<TreeCritical> {
    check_tree_params(d, k)?;
    let grid: Vec<f64> = (0..=GRID_INTERVALS)
        .map(|i| r_extended(i as f64 / GRID_INTERVALS as f64, d, k))
        .collect();
    let best = grid
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .expect("grid is nonempty");
    if best == 0 {
        return Ok(TreeCritical {
            d,
            k,
            y_star: None,
            p_star: 1.0 - grid[0],
        });
    }
    let lo = (best - 1) as f64 / GRID_INTERVALS as f64;
    let hi = ((best + 1).min(GRID_INTERVALS)) as f64 / GRID_INTERVALS as f64;
    let mut y = golden_section(|y| r_extended(y, d, k), lo, hi, GOLDEN_TOL);

    // R' has the sign of -D'.
    let (mut a, mut b) = (lo, hi);
    if tail_over_y_derivative(a, d, k) > 0.0 && tail_over_y_derivative(b, d, k) < 0.0 {
        for _ in 0..200 {
            let mid = 0.5 * (a + b);
            if mid <= a || mid >= b {
                break;
            }
            if tail_over_y_derivative(mid, d, k) > 0.0 {
                a = mid;
            } else {
                b = mid;
            }
        }
        y = 0.5 * (a + b);
    }
    Ok(TreeCritical {
        d,
        k,
        y_star: Some(y),
        p_star: 1.0 - r_extended(y, d, k),
    })
}

fn golden_section(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

/// Closed forms: `k = 2 < d - 1` gives `y* = (d-1)(d-3)/(d-2)^2` and
/// `p* = 1 - (d-2)^(2d-5) / ((d-1)^(d-2) (d-3)^(d-3))`; `k = d - 1` gives
/// `p* = 1 - 1/(d-1)`. `None` for other `(d, k)`.
pub fn p_star_closed_form(d: usize, k: usize) -> Option<(Option<f64>, f64)> {
    if d >= 3 && k == d - 1 {
        return Some((None, 1.0 - 1.0 / (d - 1) as f64));
    }
    if k == 2 && d > 3 {
        let df = d as f64;
        let y = (df - 1.0) * (df - 3.0) / ((df - 2.0) * (df - 2.0));
        let log_ratio =
            (2.0 * df - 5.0) * (df - 2.0).ln() - (df - 2.0) * (df - 1.0).ln() - (df - 3.0) * (df - 3.0).ln();
        return Some((Some(y), 1.0 - log_ratio.exp()));
    }
    None
}

/// The larger root `y` of `p = 1 - R(y)` in `(0, 1)`; at `p = p*` (for
/// `k < d - 1`) the double root `y*`.
pub fn y_hat(p: f64, d: usize, k: usize) -> Result<f64> {
    check_tree_params(d, k)?;
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain(format!("p must lie in [0, 1], got {p}")));
    }
    let crit = p_star(d, k)?;
    let boundary = (p - crit.p_star).abs() <= 1e-12;
    let (lo, hi) = match crit.y_star {
        Some(y_star) => {
            if boundary {
                return Ok(y_star);
            }
            (y_star, 1.0)
        }
        None => (0.0, 1.0),
    };
    if p > crit.p_star || (boundary && crit.y_star.is_none()) {
        return Err(Error::NoRoot { p, p_star: crit.p_star });
    }
    if p == 0.0 {
        return Ok(1.0);
    }
    let target = 1.0 - p;
    let (mut a, mut b) = (lo, hi);
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        if r_extended(mid, d, k) < target {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok(0.5 * (a + b))
}

/// `h(y) = (1 - p) P(Binomial(d, 1-y) < k)`.
pub fn h_function(y: f64, p: f64, d: usize, k: usize) -> Result<f64> {
    if !(y > 0.0 && y <= 1.0) {
        return Err(Error::Domain(format!("y must lie in (0, 1], got {y}")));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain(format!("p must lie in [0, 1], got {p}")));
    }
    if k == 0 || k > d {
        return Err(Error::Domain(format!("need 1 <= k <= d, got d={d}, k={k}")));
    }
    Ok((1.0 - p) * binomial_cdf_below(d, 1.0 - y, k))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KKBoundReport {
    pub p: f64,
    pub eps: f64,
    /// Hypercontractivity constant `B(p)`.
    pub b: f64,
    pub alpha: f64,
    /// `p (1-p) sum_i I_i^2`.
    pub w: f64,
    pub bound: f64,
}

/// `B(p) = ((1-p)/p - p/(1-p)) / (2 log((1-p)/p))`, equal to `sinh(u)/u`
/// with `u = log((1-p)/p)`; `B(1/2) = 1`.
pub fn hypercontractivity_constant(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain(format!("p must lie in (0, 1), got {p}")));
    }
    let u = ((1.0 - p) / p).ln();
    Ok(if u.abs() < 1e-4 {
        1.0 + u * u / 6.0
    } else {
        u.sinh() / u
    })
}

/// `alpha(eps) = 1 / (eps + log(2 B e) + 3 log log(2 B e))`.
pub fn kk_alpha(eps: f64, p: f64) -> Result<f64> {
    let b = hypercontractivity_constant(p)?;
    let l = (2.0 * b * std::f64::consts::E).ln();
    Ok(1.0 / (eps + l + 3.0 * l.ln()))
}

/// `(6e + 1) W^(alpha(eps) eps)`.
pub fn kk_bound(w: f64, eps: f64, p: f64) -> Result<KKBoundReport> {
    if w.is_nan() || w < 0.0 {
        return Err(Error::Domain(format!("W must be nonnegative, got {w}")));
    }
    if !(0.0..=1.0).contains(&eps) {
        return Err(Error::Domain(format!("eps must lie in [0, 1], got {eps}")));
    }
    let b = hypercontractivity_constant(p)?;
    let alpha = kk_alpha(eps, p)?;
    let bound = (6.0 * std::f64::consts::E + 1.0) * w.powf(alpha * eps);
    Ok(KKBoundReport {
        p,
        eps,
        b,
        alpha,
        w,
        bound,
    })
}

/// `W = p (1-p) sum_i I_i^2`.
pub fn weighted_influence_sum(p: f64, influences: &[f64]) -> f64 {
    p * (1.0 - p) * influences.iter().map(|i| i * i).sum::<f64>()
}

/// Lower bound `c = (h_E + 2k - d) / (4k)` on the fraction of vertices any
/// occupying initial set must contain; needs `d < 2k + h_E`.
pub fn witness_fraction(h_e: f64, d: usize, k: usize) -> Result<f64> {
    if k == 0 {
        return Err(Error::Domain("k must be positive".into()));
    }
    let slack = h_e + 2.0 * k as f64 - d as f64;
    if slack.is_nan() || slack <= 0.0 {
        return Err(Error::WitnessInapplicable { h_e, d, k });
    }
    Ok(slack / (4.0 * k as f64))
}

/// `(lambda / log_(k-1) n)^(d-k+1)` with `log_(j)` the `j`-fold iterated
/// natural logarithm. `lambda` is supplied by the caller.
pub fn pc_box_reference(n: f64, d: usize, k: usize, lambda: f64) -> Result<f64> {
    if k < 2 || k > d {
        return Err(Error::Domain(format!("need 2 <= k <= d, got d={d}, k={k}")));
    }
    let mut x = n;
    for _ in 0..k - 1 {
        if x.is_nan() || x <= 0.0 {
            break;
        }
        x = x.ln();
    }
    if x.is_nan() || x <= 0.0 {
        return Err(Error::Domain(format!(
            "the {}-fold iterated logarithm of n={n} is not positive",
            k - 1
        )));
    }
    Ok((lambda / x).powi((d - k + 1) as i32))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn r_examples() {
        assert_eq!(r_function(1.0, 5, 3).unwrap(), 1.0);
        assert!(close(r_function(0.75, 4, 2).unwrap(), 8.0 / 9.0, 1e-15));
        assert!(close(r_function(0.5, 4, 2).unwrap(), 1.0, 1e-15));
        assert!(r_function(0.0, 4, 2).is_err());
        assert!(r_function(0.5, 4, 4).is_err());
        assert!(r_function(0.5, 4, 1).is_err());
    }

    #[test]
    fn r_matches_direct_ratio() {
        for (d, k) in [(4, 2), (6, 3), (7, 2), (5, 4)] {
            for i in 1..20 {
                let y = i as f64 / 20.0;
                let direct = y / binomial_cdf_below(d - 1, 1.0 - y, k);
                let r = r_function(y, d, k).unwrap();
                assert!(close(r, direct, 1e-12 * direct), "d={d} k={k} y={y}: {r} vs {direct}");
            }
        }
    }

    #[test]
    fn p_star_examples() {
        let c = p_star(4, 2).unwrap();
        assert!(close(c.y_star.unwrap(), 0.75, 1e-12));
        assert!(close(c.p_star, 1.0 / 9.0, 1e-12));
        let c = p_star(4, 3).unwrap();
        assert_eq!(c.y_star, None);
        assert!(close(c.p_star, 2.0 / 3.0, 1e-15));
        assert!(close(p_star(5, 2).unwrap().p_star, 13.0 / 256.0, 1e-12));
    }

    #[test]
    fn p_star_matches_closed_forms() {
        for (d, k) in [(4, 2), (5, 2), (6, 2), (3, 2), (4, 3), (5, 4), (6, 5)] {
            let numeric = p_star(d, k).unwrap();
            let (y, p) = p_star_closed_form(d, k).unwrap();
            assert!(close(numeric.p_star, p, 1e-10), "d={d} k={k}");
            match (numeric.y_star, y) {
                (Some(a), Some(b)) => assert!(close(a, b, 1e-10)),
                (None, None) => {}
                other => panic!("minimiser mismatch {other:?}"),
            }
        }
    }

    #[test]
    fn derivative_vanishes_at_minimiser() {
        for (d, k) in [(5, 2), (6, 3), (7, 4), (8, 2)] {
            let y = p_star(d, k).unwrap().y_star.unwrap();
            assert!(tail_over_y_derivative(y, d, k).abs() < 1e-12);
        }
    }

    #[test]
    fn p_star_increasing_in_k() {
        let ps: Vec<f64> = (2..=5).map(|k| p_star(6, k).unwrap().p_star).collect();
        assert!(ps.windows(2).all(|w| w[0] < w[1]), "{ps:?}");
    }

    #[test]
    fn y_hat_examples() {
        let crit = p_star(4, 2).unwrap();
        assert!(close(y_hat(crit.p_star, 4, 2).unwrap(), 0.75, 1e-12));
        assert!(matches!(y_hat(1.0 / 9.0 + 0.01, 4, 2), Err(Error::NoRoot { .. })));
        let y = y_hat(0.05, 4, 2).unwrap();
        assert!(y > 0.75 && y < 1.0);
        assert!((r_function(y, 4, 2).unwrap() - 0.95).abs() <= 1e-12);
    }

    #[test]
    fn y_hat_resubstitution_grid() {
        for (d, k) in [(4, 2), (5, 2), (6, 3), (4, 3), (5, 4)] {
            let ps = p_star(d, k).unwrap().p_star;
            for i in 0..10 {
                let p = ps * i as f64 / 10.0;
                let y = y_hat(p, d, k).unwrap();
                assert!(
                    (r_function(y, d, k).unwrap() + p - 1.0).abs() < 1e-10,
                    "d={d} k={k} p={p}"
                );
            }
        }
    }

    #[test]
    fn h_examples() {
        assert!(close(h_function(1.0, 0.3, 4, 2).unwrap(), 0.7, 1e-15));
        assert!(close(h_function(0.75, 1.0 / 9.0, 4, 2).unwrap(), 21.0 / 32.0, 1e-15));
        assert_eq!(h_function(0.4, 1.0, 4, 2).unwrap(), 0.0);
        assert!(h_function(0.0, 0.5, 4, 2).is_err());
    }

    #[test]
    fn kk_examples() {
        assert_eq!(hypercontractivity_constant(0.5).unwrap(), 1.0);
        let p = 1.0 / (1.0 + std::f64::consts::E);
        assert!(close(hypercontractivity_constant(p).unwrap(), 1f64.sinh(), 1e-12));
        let rep = kk_bound(0.01, 0.1, 0.5).unwrap();
        assert!(close(rep.alpha, 0.29650, 5e-5));
        assert!(close(rep.bound, 15.10, 5e-3));
        assert!(kk_bound(0.01, 0.1, 0.0).is_err());
        assert!(kk_bound(-1.0, 0.1, 0.5).is_err());
    }

    #[test]
    fn b_is_smooth_through_one_half() {
        let a = hypercontractivity_constant(0.5 - 1e-6).unwrap();
        let b = hypercontractivity_constant(0.5 - 1e-3).unwrap();
        assert!(a >= 1.0 && b > a);
        let u = ((0.5f64 + 1e-3) / (0.5 - 1e-3)).ln();
        assert!(close(b, u.sinh() / u, 1e-14));
    }

    #[test]
    fn kk_monotonicity_and_symmetry() {
        for p in [0.05, 0.2, 0.5, 0.7] {
            let b1 = hypercontractivity_constant(p).unwrap();
            let b2 = hypercontractivity_constant(1.0 - p).unwrap();
            assert!(close(b1, b2, 1e-12));
            for w in [1e-4, 1e-2, 0.3] {
                let bounds: Vec<f64> = (1..10)
                    .map(|i| kk_bound(w, i as f64 / 10.0, p).unwrap().bound)
                    .collect();
                assert!(bounds.windows(2).all(|x| x[1] <= x[0]));
            }
            let by_w: Vec<f64> = [0.0, 1e-4, 1e-2, 0.3, 1.0]
                .iter()
                .map(|&w| kk_bound(w, 0.2, p).unwrap().bound)
                .collect();
            assert!(by_w.windows(2).all(|x| x[0] <= x[1]));
        }
    }

    #[test]
    fn witness_examples() {
        assert!(close(witness_fraction(2.0, 5, 3).unwrap(), 0.25, 1e-15));
        assert!(close(witness_fraction(0.7, 6, 3).unwrap(), 0.7 / 12.0, 1e-15));
        assert!(matches!(
            witness_fraction(0.5, 6, 2),
            Err(Error::WitnessInapplicable { .. })
        ));
    }

    #[test]
    fn reference_scaling() {
        let e = std::f64::consts::E;
        assert!(close(pc_box_reference(e.powi(10), 2, 2, 1.0).unwrap(), 0.1, 1e-12));
        let n = 1e6f64;
        assert!(close(
            pc_box_reference(n, 3, 2, 0.7).unwrap(),
            (0.7 / n.ln()).powi(2),
            1e-15
        ));
        assert!(close(pc_box_reference(e.powf(e), 3, 3, 1.0).unwrap(), 1.0, 1e-12));
        assert!(pc_box_reference(1.0, 2, 2, 1.0).is_err());
        assert!(pc_box_reference(2.0, 3, 3, 1.0).is_err());
    }
}
