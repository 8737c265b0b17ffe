//! Exact rational parameters.
//!
//! Physical parameters such as `c = 7/3` or `dx = 1/7` are kept as reduced
//! fractions so that fingerprints and file headers never depend on float
//! formatting.

use std::fmt;
use std::str::FromStr;

use num_rational::Rational64;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Exact(Rational64);

impl Exact {
    pub fn new(numer: i64, denom: i64) -> Self {
        Exact(Rational64::new(numer, denom))
    }

    pub fn integer(v: i64) -> Self {
        Exact(Rational64::from_integer(v))
    }

    pub fn value(&self) -> f64 {
        // i64 -> f64 is exact for the magnitudes used here, so this is a
        // single correctly rounded division.
        self.0.numer().to_f64().unwrap_or(f64::NAN) / self.0.denom().to_f64().unwrap_or(f64::NAN)
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn ratio(&self) -> Rational64 {
        self.0
    }
}

impl From<i64> for Exact {
    fn from(v: i64) -> Self {
        Exact::integer(v)
    }
}

impl fmt::Display for Exact {
    /// Canonical form: `p` for integers, `p/q` otherwise.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if *self.0.denom() == 1 {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl FromStr for Exact {
    type Err = Error;

    /// Accepts `p/q`, integers and plain decimals (`0.25`, `-10`, `.5`).
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let bad = |why: &str| Error::Parse(s.to_string(), why.to_string());
        if let Some((p, q)) = t.split_once('/') {
            let p = parse_decimal(p.trim()).ok_or_else(|| bad("bad numerator"))?;
            let q = parse_decimal(q.trim()).ok_or_else(|| bad("bad denominator"))?;
            if q.is_zero() {
                return Err(bad("zero denominator"));
            }
            return Ok(Exact(p / q));
        }
        parse_decimal(t).map(Exact).ok_or_else(|| bad("expected p/q or a decimal"))
    }
}

fn parse_decimal(s: &str) -> Option<Rational64> {
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    if body.is_empty() {
        return None;
    }
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let numer: i64 = if digits.is_empty() { 0 } else { digits.parse().ok()? };
    let denom = 10i64.checked_pow(frac_part.len() as u32)?;
    let r = Rational64::new(numer, denom);
    Some(if neg { -r } else { r })
}

/// Shortest round-trip float text; scientific outside `[1e-4, 1e15)` so
/// that tiny densities do not print as hundreds of zeros.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Num(pub f64);

impl fmt::Display for Num {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let a = self.0.abs();
        if a == 0.0 || !a.is_finite() || (1e-4..1e15).contains(&a) {
            write!(f, "{}", self.0)
        } else {
            write!(f, "{:e}", self.0)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_decimals() {
        assert_eq!("7/3".parse::<Exact>().unwrap(), Exact::new(7, 3));
        assert_eq!("0.25".parse::<Exact>().unwrap(), Exact::new(1, 4));
        assert_eq!("-10".parse::<Exact>().unwrap(), Exact::integer(-10));
        assert_eq!("14/6".parse::<Exact>().unwrap(), Exact::new(7, 3));
        assert_eq!(".5".parse::<Exact>().unwrap(), Exact::new(1, 2));
        assert_eq!("1.5/2".parse::<Exact>().unwrap(), Exact::new(3, 4));
    }

    #[test]
    fn rejects_garbage() {
        for s in ["", "abc", "1/0", "1e-3", "--1", "1/", "."] {
            assert!(s.parse::<Exact>().is_err(), "{s}");
        }
    }

    #[test]
    fn canonical_display() {
        assert_eq!(Exact::new(7, 3).to_string(), "7/3");
        assert_eq!(Exact::new(8, 2).to_string(), "4");
        assert_eq!(Exact::new(-1, 4).to_string(), "-1/4");
    }

    #[test]
    fn value_is_correctly_rounded() {
        assert_eq!(Exact::new(7, 3).value(), 7.0 / 3.0);
        assert_eq!(Exact::new(1, 7).value(), 1.0 / 7.0);
    }

    #[test]
    fn num_round_trips() {
        for x in [0.0, 1.0, 2.5, -3.25e-196, 1e300, 1e-4, 9.99e-5, 5.31202e3, f64::MIN_POSITIVE] {
            let text = Num(x).to_string();
            assert_eq!(text.parse::<f64>().unwrap().to_bits(), x.to_bits(), "{text}");
        }
        assert_eq!(Num(3.273618634767462e-196).to_string(), "3.273618634767462e-196");
        assert_eq!(Num(0.25).to_string(), "0.25");
    }
}
