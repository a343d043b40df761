use std::path::Path;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use percolab::boolean_lab::golden::{parse_ratio, OracleGolden};
use percolab::boolean_lab::{
    exact_influences, exact_noise_correlation, exact_success_prob_of, success_polynomial, BooleanFunctionSpec,
};
use percolab::{build_lattice, pivotal_set, BitConfig, LatticeKind};

fn r(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn subject(canonical: &str) -> BooleanFunctionSpec {
    let boot = |kind, n, d, k| BooleanFunctionSpec::bootstrap(build_lattice(kind, n, d).unwrap(), k).unwrap();
    let f = match canonical {
        "bootstrap[box n=2 d=2; k=2]" => boot(LatticeKind::Box, 2, 2, 2),
        "bootstrap[box n=3 d=2; k=2]" => boot(LatticeKind::Box, 3, 2, 2),
        "bootstrap[torus n=3 d=2; k=2]" => boot(LatticeKind::Torus, 3, 2, 2),
        "bootstrap[cycle n=5; k=1]" => boot(LatticeKind::Cycle, 5, 1, 1),
        "majority[m=3]" => BooleanFunctionSpec::majority(3).unwrap(),
        "majority[m=5]" => BooleanFunctionSpec::majority(5).unwrap(),
        "majority[m=9]" => BooleanFunctionSpec::majority(9).unwrap(),
        "tribes[k=1]" => BooleanFunctionSpec::tribes(1).unwrap(),
        "tribes[k=2]" => BooleanFunctionSpec::tribes(2).unwrap(),
        other => panic!("unknown golden subject {other}"),
    };
    assert_eq!(f.canonical(), canonical);
    f
}

#[test]
fn golden_file_matches_enumeration() {
    let golden = OracleGolden::load(&Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/oracle.json")).unwrap();
    assert!(golden.entries.len() > 50);
    for (key, expected) in &golden.entries {
        let mut parts = key.split('|');
        let f = subject(parts.next().unwrap());
        let quantity = parts.next().unwrap();
        let mut p = None;
        let mut eps = None;
        for param in parts {
            let (name, value) = param.split_once('=').unwrap();
            let value = parse_ratio(value).unwrap();
            match name {
                "p" => p = Some(value),
                "eps" => eps = Some(value),
                other => panic!("unknown parameter {other}"),
            }
        }
        let p = p.unwrap();
        let got = match quantity {
            "success" => exact_success_prob_of(&f, &p).unwrap().value,
            "influence_total" => exact_influences(&f, &p).unwrap().total,
            "influence_sum_squares" => exact_influences(&f, &p).unwrap().sum_squares,
            "influence_0" => exact_influences(&f, &p).unwrap().per_bit[0].clone(),
            "covariance" => {
                exact_noise_correlation(&f, &p, eps.as_ref().unwrap())
                    .unwrap()
                    .covariance
            }
            "correlation" => exact_noise_correlation(&f, &p, eps.as_ref().unwrap())
                .unwrap()
                .correlation
                .unwrap(),
            other => panic!("unknown quantity {other}"),
        };
        assert_eq!(got, parse_ratio(expected).unwrap(), "{key}");
    }
}

#[test]
fn golden_round_trip_through_the_writer() {
    let f = subject("majority[m=3]");
    let p = r(1, 3);
    let mut golden = OracleGolden::default();
    let key = OracleGolden::key(&f.canonical(), "success", &[("p", &p)]);
    golden.insert(key.clone(), &exact_success_prob_of(&f, &p).unwrap().value);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.json");
    golden.save(&path).unwrap();
    // P(at least 2 of 3) at p = 1/3: 3 (1/9)(2/3) + 1/27 = 7/27
    assert_eq!(OracleGolden::load(&path).unwrap().get(&key).unwrap(), Some(r(7, 27)));
}

#[test]
fn small_box_closed_forms() {
    let f = subject("bootstrap[box n=2 d=2; k=2]");
    let poly = success_polynomial(&f).unwrap();
    // P = 2p^2 - p^4 on the 2x2 box
    for (n, d) in [(1, 3), (1, 2), (3, 4), (1, 10)] {
        let p = r(n, d);
        let p2 = &p * &p;
        assert_eq!(poly.eval(&p), r(2, 1) * &p2 - &p2 * &p2);
        assert_eq!(poly.derivative(&p), r(4, 1) * &p - r(4, 1) * &p2 * &p);
    }
    let root = (1.0 - 0.5f64.sqrt()).sqrt();
    assert!((poly.level_crossing(0.5) - root).abs() < 1e-9);
    let inf = exact_influences(&f, &r(1, 2)).unwrap();
    assert!(inf.per_bit.iter().all(|i| *i == r(3, 8)));
    assert_eq!(inf.total, r(3, 2));
}

/// `d/dp P_p(C) = E_p |Piv|`, with the right side summed directly over all
/// configurations from their pivotal sets.
#[test]
fn russo_identity_on_small_torus() {
    let g = build_lattice(LatticeKind::Torus, 3, 2).unwrap();
    let f = BooleanFunctionSpec::bootstrap(g.clone(), 2).unwrap();
    let poly = success_polynomial(&f).unwrap();
    for p in [r(1, 10), r(1, 5), r(3, 10)] {
        let q = BigRational::one() - &p;
        let mut expected_pivotal = BigRational::zero();
        for mask in 0u64..512 {
            let cfg = BitConfig::from_mask(mask, 9);
            let ones = mask.count_ones() as i32;
            let w = num_traits::pow(p.clone(), ones as usize) * num_traits::pow(q.clone(), (9 - ones) as usize);
            let piv = pivotal_set(&g, 2, &cfg).unwrap().count_ones();
            expected_pivotal += w * BigRational::from_integer(BigInt::from(piv));
        }
        assert_eq!(poly.derivative(&p), expected_pivotal, "p = {p}");
        assert_eq!(exact_influences(&f, &p).unwrap().total, expected_pivotal);
    }
}

fn binomial(n: u64, k: u64) -> BigInt {
    (0..k).fold(BigInt::one(), |acc, i| acc * BigInt::from(n - i) / BigInt::from(i + 1))
}

#[test]
fn tribes_influence_formula() {
    for k in 1..=2u32 {
        let f = BooleanFunctionSpec::tribes(k as usize).unwrap();
        let half = r(1, 2);
        // (1/2)^(k-1) (1 - (1/2)^k)^(2^k - 1)
        let formula = num_traits::pow(half.clone(), (k - 1) as usize)
            * num_traits::pow(
                BigRational::one() - num_traits::pow(half.clone(), k as usize),
                (1usize << k) - 1,
            );
        let inf = exact_influences(&f, &half).unwrap();
        assert!(inf.per_bit.iter().all(|i| *i == formula), "k = {k}");
    }
}

#[test]
fn majority_influence_formula() {
    for m in [3u64, 5, 7] {
        let f = BooleanFunctionSpec::majority(m as usize).unwrap();
        let formula = BigRational::new(binomial(m - 1, m / 2), BigInt::one() << (m - 1));
        let inf = exact_influences(&f, &r(1, 2)).unwrap();
        assert!(inf.per_bit.iter().all(|i| *i == formula), "m = {m}");
    }
}

#[test]
fn noise_correlation_endpoints() {
    let f = subject("bootstrap[torus n=3 d=2; k=2]");
    let p = r(3, 10);
    let zero = exact_noise_correlation(&f, &p, &BigRational::zero()).unwrap();
    assert_eq!(zero.correlation, Some(BigRational::one()));
    let one = exact_noise_correlation(&f, &p, &BigRational::one()).unwrap();
    assert_eq!(one.correlation, Some(BigRational::zero()));
}
