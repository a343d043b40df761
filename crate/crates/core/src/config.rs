use std::fmt;

use bitvec::prelude::*;

use crate::error::{Error, Result};

pub type Bits = BitVec<u64, Lsb0>;

/// Initial occupation configuration in `{-1, +1}^V`, packed one bit per
/// vertex. A set bit is `+1` (occupied).
#[derive(Debug, Clone, PartialEq)]
pub struct BitConfig {
    bits: Bits,
    /// Density the configuration was drawn at; provenance only.
    pub p: f64,
}

impl BitConfig {
    pub fn vacant(len: usize) -> Self {
        Self {
            bits: bitvec![u64, Lsb0; 0; len],
            p: 0.0,
        }
    }

    pub fn occupied(len: usize) -> Self {
        Self {
            bits: bitvec![u64, Lsb0; 1; len],
            p: 1.0,
        }
    }

    pub fn from_bits(bits: Bits, p: f64) -> Self {
        Self { bits, p }
    }

    pub fn from_bools(values: &[bool]) -> Self {
        Self {
            bits: values.iter().copied().collect(),
            p: f64::NAN,
        }
    }

    /// Low `len` bits of `mask`, bit `i` giving vertex `i`.
    pub fn from_mask(mask: u64, len: usize) -> Self {
        let mut bits = bitvec![u64, Lsb0; 0; len];
        for i in 0..len {
            bits.set(i, (mask >> i) & 1 == 1);
        }
        Self { bits, p: f64::NAN }
    }

    pub fn from_spins(spins: &[i8]) -> Result<Self> {
        let mut bits = Bits::with_capacity(spins.len());
        for &s in spins {
            match s {
                1 => bits.push(true),
                -1 => bits.push(false),
                other => return Err(Error::Domain(format!("spin must be +1 or -1, got {other}"))),
            }
        }
        Ok(Self { bits, p: f64::NAN })
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    #[inline]
    pub fn is_occupied(&self, v: usize) -> bool {
        self.bits[v]
    }

    #[inline]
    pub fn spin(&self, v: usize) -> i8 {
        if self.bits[v] {
            1
        } else {
            -1
        }
    }

    #[inline]
    pub fn set(&mut self, v: usize, occupied: bool) {
        self.bits.set(v, occupied);
    }

    pub fn flip(&mut self, v: usize) {
        let b = self.bits[v];
        self.bits.set(v, !b);
    }

    pub fn flipped(&self, v: usize) -> Self {
        let mut c = self.clone();
        c.flip(v);
        c
    }

    pub fn count_occupied(&self) -> usize {
        self.bits.count_ones()
    }

    pub fn bits(&self) -> &Bits {
        &self.bits
    }

    pub fn occupied_iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.iter_ones()
    }

    /// `self <= other` bitwise.
    pub fn is_dominated_by(&self, other: &BitConfig) -> bool {
        self.len() == other.len() && self.bits.iter_ones().all(|i| other.bits[i])
    }

    /// One-line dump: `p=<density> seed=<seed>` followed by the bits as
    /// '0'/'1' characters in vertex order.
    pub fn dump(&self, seed: u64) -> String {
        let body: String = self.bits.iter().map(|b| if *b { '1' } else { '0' }).collect();
        format!("p={} seed={} {}", self.p, seed, body)
    }

    pub fn parse_dump(line: &str) -> Result<(Self, u64)> {
        let mut parts = line.split_whitespace();
        let p = parts
            .next()
            .and_then(|s| s.strip_prefix("p="))
            .and_then(|s| s.parse::<f64>().ok())
            .ok_or_else(|| Error::Parse(format!("missing p=<density> in {line:?}")))?;
        let seed = parts
            .next()
            .and_then(|s| s.strip_prefix("seed="))
            .and_then(|s| s.parse::<u64>().ok())
            .ok_or_else(|| Error::Parse(format!("missing seed=<seed> in {line:?}")))?;
        let body = parts.next().unwrap_or("");
        let mut bits = Bits::with_capacity(body.len());
        for ch in body.chars() {
            match ch {
                '0' => bits.push(false),
                '1' => bits.push(true),
                other => return Err(Error::Parse(format!("unexpected character {other:?}"))),
            }
        }
        Ok((Self { bits, p }, seed))
    }
}

impl fmt::Display for BitConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.bits.iter() {
            f.write_str(if *b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dump_round_trip() {
        let mut c = BitConfig::from_mask(0b1011, 6);
        c.p = 0.25;
        let line = c.dump(42);
        assert_eq!(line, "p=0.25 seed=42 110100");
        let (back, seed) = BitConfig::parse_dump(&line).unwrap();
        assert_eq!(seed, 42);
        assert_eq!(back.bits(), c.bits());
        assert_eq!(back.p, 0.25);
    }

    #[test]
    fn spins() {
        let c = BitConfig::from_spins(&[1, -1, 1]).unwrap();
        assert_eq!(c.spin(0), 1);
        assert_eq!(c.spin(1), -1);
        assert!(BitConfig::from_spins(&[0]).is_err());
    }
}
