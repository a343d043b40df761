//! The k-neighbour bootstrap closure and single-bit pivotality.
//!
//! A vertex becomes occupied once at least `k` of its neighbours are
//! occupied; occupied vertices stay occupied. The closure is computed with a
//! round-by-round work queue and per-vertex occupied-neighbour counters, so
//! `generation[v]` is the synchronous round at which `v` was occupied.

use crate::config::{BitConfig, Bits};
use crate::error::{Error, Result};
use crate::topology::GraphTopology;

/// Generation value of a vertex that is never occupied.
pub const NEVER: u32 = u32::MAX;

#[derive(Debug, Clone, PartialEq)]
pub struct ClosureResult {
    pub occupied: Bits,
    /// The eventually vacant set.
    pub vacant: Bits,
    generation: Vec<u32>,
    pub complete: bool,
}

impl ClosureResult {
    pub fn generation(&self, v: usize) -> Option<u32> {
        match self.generation[v] {
            NEVER => None,
            g => Some(g),
        }
    }

    pub fn generations(&self) -> &[u32] {
        &self.generation
    }

    /// Number of synchronous rounds until the fixed point.
    pub fn rounds(&self) -> u32 {
        self.generation
            .iter()
            .copied()
            .filter(|&g| g != NEVER)
            .max()
            .unwrap_or(0)
    }

    pub fn vacant_count(&self) -> usize {
        self.vacant.count_ones()
    }
}

pub(crate) fn check_inputs(g: &GraphTopology, k: usize, init: &BitConfig) -> Result<()> {
    if init.len() != g.vertex_count() {
        return Err(Error::LengthMismatch {
            expected: g.vertex_count(),
            got: init.len(),
        });
    }
    check_threshold(g, k)
}

pub(crate) fn check_threshold(g: &GraphTopology, k: usize) -> Result<()> {
    if k == 0 || k > g.degree_bound() {
        return Err(Error::InvalidThreshold {
            k,
            max_degree: g.degree_bound(),
        });
    }
    Ok(())
}

/// Reusable scratch space for repeated closures on graphs of similar size.
#[derive(Debug, Default, Clone)]
pub struct ClosureEngine {
    counts: Vec<u32>,
    generation: Vec<u32>,
    frontier: Vec<u32>,
    next: Vec<u32>,
}

impl ClosureEngine {
    pub fn new() -> Self {
        Self::default()
    }

    /// Runs the closure and returns the number of occupied vertices at the
    /// fixed point. Inputs are assumed validated.
    fn propagate(&mut self, g: &GraphTopology, k: usize, init: &BitConfig) -> usize {
        let nv = g.vertex_count();
        let k = k as u32;
        self.counts.clear();
        self.counts.resize(nv, 0);
        self.generation.clear();
        self.generation.resize(nv, NEVER);
        self.frontier.clear();
        for v in init.occupied_iter() {
            self.generation[v] = 0;
            self.frontier.push(v as u32);
        }
        let mut occupied = self.frontier.len();
        let mut round = 0u32;
        while !self.frontier.is_empty() {
            self.next.clear();
            for &v in &self.frontier {
                for &u in g.neighbours(v as usize) {
                    let u = u as usize;
                    if self.generation[u] != NEVER {
                        continue;
                    }
                    self.counts[u] += 1;
                    if self.counts[u] == k {
                        self.generation[u] = round + 1;
                        self.next.push(u as u32);
                    }
                }
            }
            occupied += self.next.len();
            std::mem::swap(&mut self.frontier, &mut self.next);
            round += 1;
        }
        occupied
    }

    pub fn closure(&mut self, g: &GraphTopology, k: usize, init: &BitConfig) -> Result<ClosureResult> {
        check_inputs(g, k, init)?;
        let occupied_count = self.propagate(g, k, init);
        let occupied: Bits = self.generation.iter().map(|&x| x != NEVER).collect();
        let vacant = !occupied.clone();
        Ok(ClosureResult {
            occupied,
            vacant,
            generation: self.generation.clone(),
            complete: occupied_count == g.vertex_count(),
        })
    }

    /// Whether the closure occupies every vertex. Inputs must already be
    /// validated (see [`is_complete`] for the checked form).
    #[inline]
    pub fn complete_unchecked(&mut self, g: &GraphTopology, k: usize, init: &BitConfig) -> bool {
        self.propagate(g, k, init) == g.vertex_count()
    }

    pub fn is_complete(&mut self, g: &GraphTopology, k: usize, init: &BitConfig) -> Result<bool> {
        check_inputs(g, k, init)?;
        Ok(self.complete_unchecked(g, k, init))
    }
}

pub fn closure(g: &GraphTopology, k: usize, init: &BitConfig) -> Result<ClosureResult> {
    ClosureEngine::new().closure(g, k, init)
}

pub fn is_complete(g: &GraphTopology, k: usize, init: &BitConfig) -> Result<bool> {
    ClosureEngine::new().is_complete(g, k, init)
}

/// Bits whose flip changes whether the closure is complete.
///
/// If `cfg` percolates only occupied bits can be pivotal, otherwise only
/// vacant ones; each candidate is settled by a fresh closure.
pub fn pivotal_set(g: &GraphTopology, k: usize, cfg: &BitConfig) -> Result<Bits> {
    check_inputs(g, k, cfg)?;
    let mut engine = ClosureEngine::new();
    let base = engine.complete_unchecked(g, k, cfg);
    let mut pivotal = Bits::repeat(false, cfg.len());
    let mut probe = cfg.clone();
    for x in 0..cfg.len() {
        if cfg.is_occupied(x) != base {
            continue;
        }
        probe.flip(x);
        if engine.complete_unchecked(g, k, &probe) != base {
            pivotal.set(x, true);
        }
        probe.flip(x);
    }
    Ok(pivotal)
}
