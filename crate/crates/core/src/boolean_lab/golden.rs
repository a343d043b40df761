use std::collections::BTreeMap;
use std::path::Path;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `"num/den"`, always with an explicit denominator.
pub fn format_ratio(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Accepts `"num/den"`, an integer, or a finite decimal such as `"0.15"`.
pub fn parse_ratio(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational number: {s:?}"));
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d == BigInt::from(0) {
            return Err(bad());
        }
        return Ok(BigRational::new(n, d));
    }
    let (sign, body) = match s.strip_prefix('-') {
        Some(rest) => (-1, rest),
        None => (1, s),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if int.is_empty() && frac.is_empty() {
        return Err(bad());
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits: BigInt = format!("{int}{frac}").parse().map_err(|_| bad())?;
    let den = BigInt::from(10).pow(frac.len() as u32);
    Ok(BigRational::new(digits * sign, den))
}

/// Oracle golden file: canonical query key to exact `"num/den"` value.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct OracleGolden {
    pub entries: BTreeMap<String, String>,
}

impl OracleGolden {
    pub fn key(canonical_fn: &str, quantity: &str, params: &[(&str, &BigRational)]) -> String {
        let mut key = format!("{canonical_fn}|{quantity}");
        for (name, value) in params {
            key.push_str(&format!("|{name}={}", format_ratio(value)));
        }
        key
    }

    pub fn insert(&mut self, key: String, value: &BigRational) {
        self.entries.insert(key, format_ratio(value));
    }

    pub fn get(&self, key: &str) -> Result<Option<BigRational>> {
        self.entries.get(key).map(|s| parse_ratio(s)).transpose()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("string map serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_json(&text)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json() + "\n").map_err(|e| Error::Parse(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratio_parsing() {
        let r = |n: i64, d: i64| BigRational::new(n.into(), d.into());
        assert_eq!(parse_ratio("7/16").unwrap(), r(7, 16));
        assert_eq!(parse_ratio("0.15").unwrap(), r(3, 20));
        assert_eq!(parse_ratio("1").unwrap(), r(1, 1));
        assert_eq!(parse_ratio("-.5").unwrap(), r(-1, 2));
        assert!(parse_ratio("1/0").is_err());
        assert!(parse_ratio("abc").is_err());
        assert!(parse_ratio("1e-3").is_err());
        assert_eq!(format_ratio(&r(4, 2)), "2/1");
    }

    #[test]
    fn golden_round_trip() {
        let mut g = OracleGolden::default();
        let half = BigRational::new(1.into(), 2.into());
        let key = OracleGolden::key("majority[m=3]", "success", &[("p", &half)]);
        assert_eq!(key, "majority[m=3]|success|p=1/2");
        g.insert(key.clone(), &half);
        let back = OracleGolden::from_json(&g.to_json()).unwrap();
        assert_eq!(back.get(&key).unwrap(), Some(half));
    }
}
