//! Axis-parallel rectangles in tori and boxes, the restricted closure that
//! decides whether a rectangle is internally spanned, and the scale scan
//! used for the Aizenman-Lebowitz property.

use serde::{Deserialize, Serialize};

use crate::config::BitConfig;
use crate::error::{Error, Result};
use crate::topology::{coords_to_index, index_to_coords, GraphKind, GraphTopology};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Rectangle {
    pub anchor: Vec<usize>,
    pub sides: Vec<usize>,
}

impl Rectangle {
    pub fn new(anchor: Vec<usize>, sides: Vec<usize>) -> Self {
        Self { anchor, sides }
    }

    pub fn longest_side(&self) -> usize {
        self.sides.iter().copied().max().unwrap_or(0)
    }

    pub fn volume(&self) -> usize {
        self.sides.iter().product()
    }
}

#[derive(Debug, Clone, Copy)]
struct Host {
    n: usize,
    d: usize,
    wrap: bool,
}

fn host_of(g: &GraphTopology) -> Result<Host> {
    match g.kind() {
        GraphKind::Torus { n, d } => Ok(Host { n, d, wrap: true }),
        GraphKind::Cycle { n } => Ok(Host { n, d: 1, wrap: true }),
        GraphKind::Box { n, d } => Ok(Host { n, d, wrap: false }),
        other => Err(Error::RectangleOutOfBounds(format!(
            "rectangles need a torus or box host, got {other}"
        ))),
    }
}

fn check_rect(host: Host, r: &Rectangle) -> Result<()> {
    if r.anchor.len() != host.d || r.sides.len() != host.d {
        return Err(Error::RectangleOutOfBounds(format!(
            "expected {} coordinates, got anchor {:?} sides {:?}",
            host.d, r.anchor, r.sides
        )));
    }
    for (axis, (&a, &s)) in r.anchor.iter().zip(&r.sides).enumerate() {
        let fits = s >= 1 && a < host.n && if host.wrap { s <= host.n } else { a + s <= host.n };
        if !fits {
            return Err(Error::RectangleOutOfBounds(format!(
                "axis {axis}: anchor {a}, side {s}, host side {}",
                host.n
            )));
        }
    }
    Ok(())
}

/// Scratch buffers for closures restricted to a rectangle.
#[derive(Debug, Default)]
struct RectEngine {
    occupied: Vec<bool>,
    counts: Vec<u8>,
    queue: Vec<u32>,
    strides: Vec<usize>,
    local: Vec<usize>,
    global: Vec<usize>,
}

impl RectEngine {
    /// Closure of the induced subgraph on `r` using only bits inside `r`;
    /// true iff it fills `r`.
    fn spanned(&mut self, host: Host, k: usize, cfg: &BitConfig, r: &Rectangle) -> bool {
        let d = host.d;
        let vol = r.volume();
        self.strides.clear();
        self.strides.resize(d, 1);
        for axis in (0..d.saturating_sub(1)).rev() {
            self.strides[axis] = self.strides[axis + 1] * r.sides[axis + 1];
        }
        self.occupied.clear();
        self.occupied.resize(vol, false);
        self.counts.clear();
        self.counts.resize(vol, 0);
        self.queue.clear();
        self.local.clear();
        self.local.resize(d, 0);
        self.global.clear();
        self.global.resize(d, 0);

        for cell in 0..vol {
            let mut rest = cell;
            for axis in 0..d {
                let c = rest / self.strides[axis];
                rest %= self.strides[axis];
                let x = r.anchor[axis] + c;
                self.global[axis] = if x >= host.n { x - host.n } else { x };
            }
            if cfg.is_occupied(coords_to_index(&self.global, host.n)) {
                self.occupied[cell] = true;
                self.queue.push(cell as u32);
            }
        }
        let mut filled = self.queue.len();
        if filled == vol {
            return true;
        }
        let k = k as u8;
        let mut head = 0;
        while head < self.queue.len() {
            let cell = self.queue[head] as usize;
            head += 1;
            let mut rest = cell;
            for axis in 0..d {
                self.local[axis] = rest / self.strides[axis];
                rest %= self.strides[axis];
            }
            for axis in 0..d {
                let side = r.sides[axis];
                let c = self.local[axis];
                let stride = self.strides[axis];
                // The band wraps onto itself only when it spans the torus.
                let full_wrap = host.wrap && side == host.n && side >= 3;
                let up = if c + 1 < side {
                    Some(cell + stride)
                } else if full_wrap {
                    Some(cell - c * stride)
                } else {
                    None
                };
                let down = if c > 0 {
                    Some(cell - stride)
                } else if full_wrap {
                    Some(cell + (side - 1) * stride)
                } else {
                    None
                };
                for u in [up, down].into_iter().flatten() {
                    if self.occupied[u] {
                        continue;
                    }
                    self.counts[u] += 1;
                    if self.counts[u] == k {
                        self.occupied[u] = true;
                        self.queue.push(u as u32);
                        filled += 1;
                    }
                }
            }
        }
        filled == vol
    }
}

pub fn is_internally_spanned(g: &GraphTopology, k: usize, cfg: &BitConfig, r: &Rectangle) -> Result<bool> {
    crate::bootstrap::check_inputs(g, k, cfg)?;
    let host = host_of(g)?;
    check_rect(host, r)?;
    Ok(RectEngine::default().spanned(host, k, cfg, r))
}

/// Finds an internally spanned rectangle (threshold 2) whose longest side
/// lies in `[ell, 2*ell]`. Candidates are tried by increasing longest side,
/// then lexicographic anchor, then side lengths from largest to smallest
/// (so the full `m x ... x m` cube comes first).
pub fn al_rectangle_scan(g: &GraphTopology, cfg: &BitConfig, ell: usize) -> Result<Option<Rectangle>> {
    if cfg.len() != g.vertex_count() {
        return Err(Error::LengthMismatch {
            expected: g.vertex_count(),
            got: cfg.len(),
        });
    }
    let host = host_of(g)?;
    if ell == 0 || ell > host.n {
        return Err(Error::Domain(format!("scale must lie in [1, {}], got {ell}", host.n)));
    }
    let mut engine = RectEngine::default();
    let anchors = g.vertex_count();
    for m in ell..=(2 * ell).min(host.n) {
        let mut shapes = shapes_with_longest_side(host.d, m);
        shapes.reverse();
        for a in 0..anchors {
            let anchor = index_to_coords(a, host.n, host.d);
            for sides in &shapes {
                let fits = host.wrap || anchor.iter().zip(sides).all(|(&x, &s)| x + s <= host.n);
                if !fits {
                    continue;
                }
                let r = Rectangle::new(anchor.clone(), sides.clone());
                if engine.spanned(host, 2, cfg, &r) {
                    return Ok(Some(r));
                }
            }
        }
    }
    Ok(None)
}

/// All side tuples in `[1, m]^d` with maximum exactly `m`, lexicographic.
fn shapes_with_longest_side(d: usize, m: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = vec![1usize; d];
    loop {
        if cur.contains(&m) {
            out.push(cur.clone());
        }
        let mut axis = d;
        loop {
            if axis == 0 {
                return out;
            }
            axis -= 1;
            if cur[axis] < m {
                cur[axis] += 1;
                for later in cur.iter_mut().skip(axis + 1) {
                    *later = 1;
                }
                break;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bootstrap::closure;
    use crate::topology::{build_lattice, LatticeKind};

    #[test]
    fn shapes_enumeration() {
        let s = shapes_with_longest_side(2, 2);
        assert_eq!(s, vec![vec![1, 2], vec![2, 1], vec![2, 2]]);
        assert_eq!(shapes_with_longest_side(2, 4).len(), 7);
        assert_eq!(shapes_with_longest_side(3, 1), vec![vec![1, 1, 1]]);
    }

    #[test]
    fn fully_occupied_rectangle_is_spanned() {
        let g = build_lattice(LatticeKind::Box, 6, 2).unwrap();
        let cfg = BitConfig::occupied(36);
        let r = Rectangle::new(vec![1, 2], vec![3, 4]);
        assert!(is_internally_spanned(&g, 2, &cfg, &r).unwrap());
    }

    #[test]
    fn line_with_a_hole() {
        let g = build_lattice(LatticeKind::Box, 6, 2).unwrap();
        for hole in 0..5 {
            let mut cfg = BitConfig::occupied(36);
            cfg.set(g.vertex_at(&[2, 1 + hole]).unwrap(), false);
            let r = Rectangle::new(vec![2, 1], vec![1, 5]);
            let interior = hole != 0 && hole != 4;
            assert_eq!(is_internally_spanned(&g, 2, &cfg, &r).unwrap(), interior);
        }
    }

    #[test]
    fn diagonal_square_inside_larger_box() {
        let g = build_lattice(LatticeKind::Box, 5, 2).unwrap();
        let mut cfg = BitConfig::vacant(25);
        for i in 0..3 {
            cfg.set(g.vertex_at(&[1 + i, 2 + i]).unwrap(), true);
        }
        let r = Rectangle::new(vec![1, 2], vec![3, 3]);
        assert!(is_internally_spanned(&g, 2, &cfg, &r).unwrap());
        // Outside bits must not help.
        let r2 = Rectangle::new(vec![1, 2], vec![2, 3]);
        assert!(!is_internally_spanned(&g, 2, &cfg, &r2).unwrap());
    }

    #[test]
    fn out_of_bounds_rejected() {
        let g = build_lattice(LatticeKind::Box, 4, 2).unwrap();
        let cfg = BitConfig::occupied(16);
        let r = Rectangle::new(vec![2, 2], vec![3, 1]);
        assert!(matches!(
            is_internally_spanned(&g, 2, &cfg, &r),
            Err(Error::RectangleOutOfBounds(_))
        ));
        let t = build_lattice(LatticeKind::Torus, 4, 2).unwrap();
        assert!(is_internally_spanned(&t, 2, &cfg, &r).unwrap());
        let too_long = Rectangle::new(vec![0, 0], vec![5, 1]);
        assert!(is_internally_spanned(&t, 2, &cfg, &too_long).is_err());
    }

    #[test]
    fn full_torus_rectangle_matches_global_closure() {
        let g = build_lattice(LatticeKind::Torus, 5, 2).unwrap();
        for mask in [0b1000001000001000001u64, 0b11, 0b1_0000_1000_0100_0010_0001] {
            let cfg = BitConfig::from_mask(mask, 25);
            let r = Rectangle::new(vec![0, 0], vec![5, 5]);
            assert_eq!(
                is_internally_spanned(&g, 2, &cfg, &r).unwrap(),
                closure(&g, 2, &cfg).unwrap().complete
            );
        }
    }

    #[test]
    fn scan_all_occupied() {
        let g = build_lattice(LatticeKind::Box, 8, 2).unwrap();
        let r = al_rectangle_scan(&g, &BitConfig::occupied(64), 2).unwrap().unwrap();
        assert_eq!(r, Rectangle::new(vec![0, 0], vec![2, 2]));
        assert_eq!(r.longest_side(), 2);
    }

    #[test]
    fn scan_all_vacant_finds_nothing() {
        let g = build_lattice(LatticeKind::Box, 6, 2).unwrap();
        assert_eq!(al_rectangle_scan(&g, &BitConfig::vacant(36), 2).unwrap(), None);
    }
}
