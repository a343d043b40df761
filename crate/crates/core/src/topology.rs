//! Finite graphs: Euclidean tori and boxes, cycles, complete graphs and
//! uniformly random simple regular graphs.
//!
//! Lattice vertices are numbered row-major over their coordinates, the first
//! coordinate being the most significant. Adjacency lists are sorted.

use std::fmt;

use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest graph accepted by [`edge_cheeger`].
pub const CHEEGER_MAX_VERTICES: usize = 24;

/// Configuration-model attempts before [`build_random_regular`] gives up.
pub const RANDOM_REGULAR_MAX_ATTEMPTS: u32 = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum GraphKind {
    Torus { n: usize, d: usize },
    Box { n: usize, d: usize },
    Cycle { n: usize },
    Complete { n: usize },
    RandomRegular { n: usize, d: usize, seed: u64 },
}

impl GraphKind {
    /// Side length and dimension for the lattice kinds.
    pub fn lattice_shape(&self) -> Option<(usize, usize)> {
        match *self {
            GraphKind::Torus { n, d } | GraphKind::Box { n, d } => Some((n, d)),
            GraphKind::Cycle { n } => Some((n, 1)),
            _ => None,
        }
    }

    pub fn wraps(&self) -> bool {
        matches!(self, GraphKind::Torus { .. } | GraphKind::Cycle { .. })
    }
}

impl fmt::Display for GraphKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            GraphKind::Torus { n, d } => write!(f, "torus n={n} d={d}"),
            GraphKind::Box { n, d } => write!(f, "box n={n} d={d}"),
            GraphKind::Cycle { n } => write!(f, "cycle n={n}"),
            GraphKind::Complete { n } => write!(f, "complete n={n}"),
            GraphKind::RandomRegular { n, d, seed } => {
                write!(f, "random_regular n={n} d={d} seed={seed}")
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LatticeKind {
    Torus,
    Box,
    Cycle,
}

/// Immutable finite graph in compressed adjacency form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphTopology {
    kind: GraphKind,
    offsets: Vec<usize>,
    neighbours: Vec<u32>,
    degree_bound: usize,
}

impl GraphTopology {
    fn from_lists(kind: GraphKind, mut lists: Vec<Vec<u32>>) -> Self {
        let mut offsets = Vec::with_capacity(lists.len() + 1);
        let mut neighbours = Vec::new();
        let mut degree_bound = 0;
        offsets.push(0);
        for list in lists.iter_mut() {
            list.sort_unstable();
            degree_bound = degree_bound.max(list.len());
            neighbours.extend_from_slice(list);
            offsets.push(neighbours.len());
        }
        Self {
            kind,
            offsets,
            neighbours,
            degree_bound,
        }
    }

    pub fn kind(&self) -> GraphKind {
        self.kind
    }

    pub fn vertex_count(&self) -> usize {
        self.offsets.len() - 1
    }

    #[inline]
    pub fn neighbours(&self, v: usize) -> &[u32] {
        &self.neighbours[self.offsets[v]..self.offsets[v + 1]]
    }

    #[inline]
    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    /// Maximum degree.
    pub fn degree_bound(&self) -> usize {
        self.degree_bound
    }

    pub fn edge_count(&self) -> usize {
        self.neighbours.len() / 2
    }

    /// Row-major coordinates of `v` for lattice kinds.
    pub fn coords(&self, v: usize) -> Option<Vec<usize>> {
        let (n, d) = self.kind.lattice_shape()?;
        Some(index_to_coords(v, n, d))
    }

    pub fn vertex_at(&self, coords: &[usize]) -> Option<usize> {
        let (n, d) = self.kind.lattice_shape()?;
        if coords.len() != d || coords.iter().any(|&c| c >= n) {
            return None;
        }
        Some(coords_to_index(coords, n))
    }

    /// Unit translation along `axis` on a torus or cycle.
    pub fn translate(&self, v: usize, axis: usize) -> Option<usize> {
        if !self.kind.wraps() {
            return None;
        }
        let (n, d) = self.kind.lattice_shape()?;
        if axis >= d {
            return None;
        }
        let mut c = index_to_coords(v, n, d);
        c[axis] = (c[axis] + 1) % n;
        Some(coords_to_index(&c, n))
    }

    /// Text dump: a header line `"<n_vertices> <kind> <params>"` followed by
    /// one `"id: sorted neighbour ids"` line per vertex.
    pub fn dump(&self) -> String {
        let mut out = format!("{} {}\n", self.vertex_count(), self.kind);
        for v in 0..self.vertex_count() {
            let ids: Vec<String> = self.neighbours(v).iter().map(|u| u.to_string()).collect();
            out.push_str(&format!("{}: {}\n", v, ids.join(" ")));
        }
        out
    }
}

pub(crate) fn index_to_coords(mut v: usize, n: usize, d: usize) -> Vec<usize> {
    let mut c = vec![0; d];
    for axis in (0..d).rev() {
        c[axis] = v % n;
        v /= n;
    }
    c
}

pub(crate) fn coords_to_index(c: &[usize], n: usize) -> usize {
    c.iter().fold(0, |acc, &x| acc * n + x)
}

/// Nearest-neighbour lattice graph on `[n]^d` (box), `(Z/nZ)^d` (torus) or
/// the cycle `C_n`.
pub fn build_lattice(kind: LatticeKind, n: usize, d: usize) -> Result<GraphTopology> {
    if n == 0 || d == 0 {
        return Err(Error::InvalidGraph(format!(
            "side length and dimension must be positive (n={n}, d={d})"
        )));
    }
    let (graph_kind, d, wrap) = match kind {
        LatticeKind::Torus => {
            if n < 3 {
                return Err(Error::InvalidGraph(format!(
                    "torus needs n >= 3, got n={n} (smaller sides create multi-edges)"
                )));
            }
            (GraphKind::Torus { n, d }, d, true)
        }
        LatticeKind::Box => (GraphKind::Box { n, d }, d, false),
        LatticeKind::Cycle => {
            if n < 3 {
                return Err(Error::InvalidGraph(format!("cycle needs n >= 3, got n={n}")));
            }
            (GraphKind::Cycle { n }, 1, true)
        }
    };
    let count = n
        .checked_pow(d as u32)
        .filter(|&c| c <= u32::MAX as usize)
        .ok_or_else(|| Error::InvalidGraph(format!("{n}^{d} vertices is too many")))?;

    let mut stride = vec![1usize; d];
    for axis in (0..d.saturating_sub(1)).rev() {
        stride[axis] = stride[axis + 1] * n;
    }
    let mut lists = Vec::with_capacity(count);
    for v in 0..count {
        let c = index_to_coords(v, n, d);
        let mut adj = Vec::with_capacity(2 * d);
        for axis in 0..d {
            let x = c[axis];
            if x + 1 < n {
                adj.push((v + stride[axis]) as u32);
            } else if wrap {
                adj.push((v - x * stride[axis]) as u32);
            }
            if x > 0 {
                adj.push((v - stride[axis]) as u32);
            } else if wrap {
                adj.push((v + (n - 1) * stride[axis]) as u32);
            }
        }
        lists.push(adj);
    }
    Ok(GraphTopology::from_lists(graph_kind, lists))
}

pub fn build_complete(n: usize) -> Result<GraphTopology> {
    if n == 0 {
        return Err(Error::InvalidGraph("complete graph needs n >= 1".into()));
    }
    let lists = (0..n)
        .map(|v| (0..n).filter(|&u| u != v).map(|u| u as u32).collect())
        .collect();
    Ok(GraphTopology::from_lists(GraphKind::Complete { n }, lists))
}

/// Uniform simple `d`-regular graph on `n` vertices via the configuration
/// model, rejecting any matching with a loop or a repeated edge.
pub fn build_random_regular(n: usize, d: usize, seed: u64) -> Result<GraphTopology> {
    build_random_regular_with_cap(n, d, seed, RANDOM_REGULAR_MAX_ATTEMPTS)
}

pub fn build_random_regular_with_cap(n: usize, d: usize, seed: u64, max_attempts: u32) -> Result<GraphTopology> {
    if (n * d) % 2 == 1 {
        return Err(Error::DegreeParity { n, d });
    }
    if d < 3 || d >= n {
        return Err(Error::InvalidGraph(format!(
            "random regular graph needs 3 <= d < n (n={n}, d={d})"
        )));
    }
    if n > u32::MAX as usize {
        return Err(Error::InvalidGraph(format!("n={n} is too large")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut stubs: Vec<u32> = Vec::with_capacity(n * d);
    let mut lists: Vec<Vec<u32>> = vec![Vec::with_capacity(d); n];

    'attempt: for _ in 0..max_attempts {
        stubs.clear();
        for v in 0..n as u32 {
            stubs.extend(std::iter::repeat_n(v, d));
        }
        lists.iter_mut().for_each(Vec::clear);
        let len = stubs.len();
        // Incremental Fisher-Yates: consecutive positions form the matching.
        // Aborting at the first defect leaves the accepted law unchanged.
        let mut i = 0;
        while i < len {
            let j = rng.gen_range(i..len);
            stubs.swap(i, j);
            let j = rng.gen_range(i + 1..len);
            stubs.swap(i + 1, j);
            let (a, b) = (stubs[i], stubs[i + 1]);
            if a == b || lists[a as usize].contains(&b) {
                continue 'attempt;
            }
            lists[a as usize].push(b);
            lists[b as usize].push(a);
            i += 2;
        }
        return Ok(GraphTopology::from_lists(
            GraphKind::RandomRegular { n, d, seed },
            lists,
        ));
    }
    Err(Error::RetryCapExhausted {
        n,
        d,
        attempts: max_attempts,
    })
}

/// Exact edge Cheeger constant `min |boundary(S)| / |S|` over nonempty `S`
/// with `|S| <= |V|/2`, by exhaustive enumeration in Gray-code order.
pub fn edge_cheeger(g: &GraphTopology) -> Result<Ratio<u64>> {
    let nv = g.vertex_count();
    if nv > CHEEGER_MAX_VERTICES {
        return Err(Error::SizeCap {
            what: "edge_cheeger",
            cap: CHEEGER_MAX_VERTICES,
            got: nv,
        });
    }
    if nv < 2 {
        return Err(Error::InvalidGraph(
            "edge Cheeger constant needs at least 2 vertices".into(),
        ));
    }
    let masks: Vec<u32> = (0..nv)
        .map(|v| g.neighbours(v).iter().fold(0u32, |m, &u| m | (1 << u)))
        .collect();
    let half = nv / 2;
    let mut set = 0u32;
    let mut size = 0usize;
    let mut degree_sum = 0u64;
    let mut internal = 0u64;
    let mut best: Option<(u64, u64)> = None;
    for step in 1u64..(1u64 << nv) {
        let v = step.trailing_zeros() as usize;
        let bit = 1u32 << v;
        if set & bit == 0 {
            internal += (masks[v] & set).count_ones() as u64;
            set |= bit;
            size += 1;
            degree_sum += g.degree(v) as u64;
        } else {
            set &= !bit;
            internal -= (masks[v] & set).count_ones() as u64;
            size -= 1;
            degree_sum -= g.degree(v) as u64;
        }
        if size == 0 || size > half {
            continue;
        }
        let boundary = degree_sum - 2 * internal;
        let better = match best {
            None => true,
            Some((b, s)) => boundary * s < b * size as u64,
        };
        if better {
            best = Some((boundary, size as u64));
        }
    }
    let (b, s) = best.expect("at least one admissible subset");
    Ok(Ratio::new(b, s))
}
