//! Revealment of the natural query algorithm for tribes at `p = 1/2`.
//!
//! Tribes are visited in a uniformly random order and the bits of each tribe
//! in a uniformly random order. A tribe is abandoned at its first `-1`; the
//! algorithm stops with `+1` as soon as one tribe is found all `+1`.

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::seq::SliceRandom;
use rand::RngCore;
use rayon::prelude::*;
use serde::Serialize;

use super::exact::ratio_to_f64;
use crate::error::{Error, Result};
use crate::rng::{StreamFactory, StreamTag};

/// Largest arity `k * 2^k` handled by exact enumeration.
pub const REVEALMENT_EXACT_CAP: usize = 12;
const DEFAULT_MC_TRIALS: u64 = 100_000;

#[derive(Debug, Clone, Serialize)]
pub struct Revealment {
    pub k: usize,
    pub arity: usize,
    /// `max_i P(bit i is queried)`.
    pub delta: f64,
    #[serde(skip)]
    pub delta_exact: Option<BigRational>,
    pub expected_queries: f64,
    /// Monte Carlo trial count, 0 for exact results.
    pub trials: u64,
    pub seed: Option<u64>,
}

fn check_k(k: usize) -> Result<()> {
    // Configurations are packed into a u64, so k * 2^k <= 64.
    if k == 0 || k > 4 {
        return Err(Error::Domain(format!("tribe size must be in [1, 4], got {k}")));
    }
    Ok(())
}

/// Exact when `k * 2^k <= 12`, otherwise Monte Carlo with 10^5 trials and
/// seed 0.
pub fn tribes_revealment(k: usize) -> Result<Revealment> {
    check_k(k)?;
    if k << k <= REVEALMENT_EXACT_CAP {
        tribes_revealment_exact(k)
    } else {
        tribes_revealment_mc(k, DEFAULT_MC_TRIALS, 0)
    }
}

/// Runs the query algorithm; `queried[bit]` is incremented for every read.
fn run_queries(k: usize, config: u64, tribe_order: &[usize], bit_orders: &[&[usize]], queried: &mut [u64]) {
    for &t in tribe_order {
        let mut all_ones = true;
        for &j in bit_orders[t] {
            let bit = t * k + j;
            queried[bit] += 1;
            if config >> bit & 1 == 0 {
                all_ones = false;
                break;
            }
        }
        if all_ones {
            return;
        }
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn go(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                go(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::with_capacity(n), &mut vec![false; n], &mut out);
    out
}

fn summarize(k: usize, counts: &[u64], total: u64, trials: u64, seed: Option<u64>) -> Revealment {
    let arity = counts.len();
    let max = counts.iter().copied().max().unwrap_or(0);
    let delta_exact = (trials == 0).then(|| BigRational::new(BigInt::from(max), BigInt::from(total)));
    let sum: u64 = counts.iter().sum();
    Revealment {
        k,
        arity,
        delta: delta_exact
            .as_ref()
            .map(ratio_to_f64)
            .unwrap_or(max as f64 / total as f64),
        delta_exact,
        expected_queries: sum as f64 / total as f64,
        trials,
        seed,
    }
}

/// Exact revealment by enumerating every configuration, tribe order and
/// within-tribe order.
pub fn tribes_revealment_exact(k: usize) -> Result<Revealment> {
    check_k(k)?;
    let tribes = 1usize << k;
    let arity = k * tribes;
    if arity > REVEALMENT_EXACT_CAP {
        return Err(Error::SizeCap {
            what: "exact revealment",
            cap: REVEALMENT_EXACT_CAP,
            got: arity,
        });
    }
    let tribe_perms = permutations(tribes);
    let bit_perms = permutations(k);
    let within_combos = bit_perms.len().pow(tribes as u32);
    let mut counts = vec![0u64; arity];
    let mut bit_orders: Vec<&[usize]> = vec![&bit_perms[0]; tribes];
    for config in 0..(1u64 << arity) {
        for tribe_order in &tribe_perms {
            for combo in 0..within_combos {
                let mut rest = combo;
                for slot in bit_orders.iter_mut() {
                    *slot = &bit_perms[rest % bit_perms.len()];
                    rest /= bit_perms.len();
                }
                run_queries(k, config, tribe_order, &bit_orders, &mut counts);
            }
        }
    }
    let total = (1u64 << arity) * tribe_perms.len() as u64 * within_combos as u64;
    Ok(summarize(k, &counts, total, 0, None))
}

pub fn tribes_revealment_mc(k: usize, trials: u64, seed: u64) -> Result<Revealment> {
    check_k(k)?;
    if trials == 0 {
        return Err(Error::Domain("revealment needs at least one trial".into()));
    }
    let tribes = 1usize << k;
    let arity = k * tribes;
    let streams = StreamFactory::new(seed, StreamTag::Revealment);
    let counts = (0..trials)
        .into_par_iter()
        .fold(
            || vec![0u64; arity],
            |mut acc, trial| {
                let mut rng = streams.stream(trial);
                let config = rng.next_u64() & (u64::MAX >> (64 - arity));
                let mut tribe_order: Vec<usize> = (0..tribes).collect();
                tribe_order.shuffle(&mut rng);
                let orders: Vec<Vec<usize>> = (0..tribes)
                    .map(|_| {
                        let mut o: Vec<usize> = (0..k).collect();
                        o.shuffle(&mut rng);
                        o
                    })
                    .collect();
                let refs: Vec<&[usize]> = orders.iter().map(Vec::as_slice).collect();
                run_queries(k, config, &tribe_order, &refs, &mut acc);
                acc
            },
        )
        .reduce(
            || vec![0u64; arity],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
    Ok(summarize(k, &counts, trials, trials, Some(seed)))
}

/// Degenerate deterministic variant: tribes and bits in index order, exact
/// over configurations.
pub fn tribes_revealment_fixed_order(k: usize) -> Result<Revealment> {
    check_k(k)?;
    let tribes = 1usize << k;
    let arity = k * tribes;
    if arity > 20 {
        return Err(Error::SizeCap {
            what: "fixed-order revealment",
            cap: 20,
            got: arity,
        });
    }
    let order: Vec<usize> = (0..tribes).collect();
    let within: Vec<usize> = (0..k).collect();
    let refs: Vec<&[usize]> = vec![&within; tribes];
    let mut counts = vec![0u64; arity];
    for config in 0..(1u64 << arity) {
        run_queries(k, config, &order, &refs, &mut counts);
    }
    Ok(summarize(k, &counts, 1u64 << arity, 0, None))
}
