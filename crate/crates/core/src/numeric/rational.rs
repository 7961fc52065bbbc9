// Copyright 2026 the pmoments authors
// SPDX-License-Identifier: Apache-2.0

//! Arbitrary-precision rationals and the small set of helpers the exact
//! path needs on top of `num_rational`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serializer};

use crate::error::{Error, Result};

/// Exact rational scalar. `BigRational` keeps itself reduced with a positive
/// denominator, which is all the invariants we need.
pub type Rational = BigRational;

pub fn rat(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn int(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // Ratio::to_f64 gives up on huge components; fall back to scaling.
        let n = r.numer().to_f64().unwrap_or(f64::INFINITY);
        let d = r.denom().to_f64().unwrap_or(f64::INFINITY);
        n / d
    })
}

pub fn pow(r: &Rational, k: u32) -> Rational {
    num_traits::pow(r.clone(), k as usize)
}

pub fn min(a: &Rational, b: &Rational) -> Rational {
    if a <= b {
        a.clone()
    } else {
        b.clone()
    }
}

pub fn max(a: &Rational, b: &Rational) -> Rational {
    if a >= b {
        a.clone()
    } else {
        b.clone()
    }
}

/// `n!` as a rational.
pub fn factorial(n: u32) -> Rational {
    Rational::from_integer((1..=n as u64).map(BigInt::from).product())
}

/// Binomial coefficient `C(n, k)`.
pub fn binomial(n: u32, k: u32) -> Rational {
    if k > n {
        return Rational::zero();
    }
    factorial(n) / (factorial(k) * factorial(n - k))
}

/// Parses `"a/b"`, `"a"` or a finite decimal such as `"-0.25"`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {s:?}")));
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let negative = whole.starts_with('-');
        let whole_digits = whole.trim_start_matches(['-', '+']);
        let digits = format!("{}{}", if whole_digits.is_empty() { "0" } else { whole_digits }, frac);
        let n: BigInt = digits.parse().map_err(|_| bad())?;
        let d = num_traits::pow(BigInt::from(10), frac.len());
        let r = Rational::new(n, d);
        return Ok(if negative { -r } else { r });
    }
    let n: BigInt = s.parse().map_err(|_| bad())?;
    Ok(Rational::from_integer(n))
}

/// `"a/b"`, or `"a"` for integers.
pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Rigorous rational bracket `(lo, hi)` of `x^(num/den)` for `x ≥ 0`, with
/// `hi - lo ≤ 2^-bits` (and `lo == hi` when the power is exactly rational
/// at that resolution).
pub fn power_bracket(x: &Rational, num: u32, den: u32, bits: u32) -> (Rational, Rational) {
    assert!(!x.is_negative(), "power_bracket needs x >= 0");
    assert!(den > 0);
    if x.is_zero() {
        let z = if num == 0 { Rational::one() } else { Rational::zero() };
        return (z.clone(), z);
    }
    let scale = num_traits::pow(BigInt::from(2), bits as usize);
    let n = num_traits::pow(x.numer().clone(), num as usize) * num_traits::pow(scale.clone(), den as usize);
    let d = num_traits::pow(x.denom().clone(), num as usize);
    let q = &n / &d;
    let root = q.nth_root(den);
    let lo = Rational::new(root.clone(), scale.clone());
    let exact = (&n % &d).is_zero() && num_traits::pow(root.clone(), den as usize) == q;
    if exact {
        (lo.clone(), lo)
    } else {
        (lo, Rational::new(root + 1, scale))
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RatRepr {
    Str(String),
    Int(i64),
}

impl RatRepr {
    fn into_rational(self) -> Result<Rational> {
        match self {
            RatRepr::Str(s) => parse_rational(&s),
            RatRepr::Int(i) => Ok(int(i)),
        }
    }
}

/// Serde adapters: rationals travel as `"a/b"` strings; integers are also
/// accepted on input.
pub mod serde_rational {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        RatRepr::deserialize(d)?
            .into_rational()
            .map_err(serde::de::Error::custom)
    }

    pub mod vec {
        use super::*;
        use serde::ser::SerializeSeq;

        pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(v.len()))?;
            for r in v {
                seq.serialize_element(&format_rational(r))?;
            }
            seq.end()
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Rational>, D::Error> {
            Vec::<RatRepr>::deserialize(d)?
                .into_iter()
                .map(|r| r.into_rational().map_err(serde::de::Error::custom))
                .collect()
        }
    }

    pub mod vec2 {
        use super::*;
        use serde::ser::SerializeSeq;

        pub fn serialize<S: Serializer>(v: &[Vec<Rational>], s: S) -> std::result::Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(v.len()))?;
            for row in v {
                let row: Vec<String> = row.iter().map(format_rational).collect();
                seq.serialize_element(&row)?;
            }
            seq.end()
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Vec<Rational>>, D::Error> {
            Vec::<Vec<RatRepr>>::deserialize(d)?
                .into_iter()
                .map(|row| {
                    row.into_iter()
                        .map(|r| r.into_rational().map_err(serde::de::Error::custom))
                        .collect()
                })
                .collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_all_forms() {
        assert_eq!(parse_rational("3/6").unwrap(), rat(1, 2));
        assert_eq!(parse_rational("-7").unwrap(), int(-7));
        assert_eq!(parse_rational("-0.25").unwrap(), rat(-1, 4));
        assert_eq!(parse_rational(".5").unwrap(), rat(1, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("1.2.3").is_err());
    }

    #[test]
    fn formats_reduced() {
        assert_eq!(format_rational(&rat(4, -6)), "-2/3");
        assert_eq!(format_rational(&int(5)), "5");
    }

    #[test]
    fn bracket_contains_power() {
        let (lo, hi) = power_bracket(&rat(2, 1), 1, 2, 40);
        let s = std::f64::consts::SQRT_2;
        assert!(to_f64(&lo) <= s && s <= to_f64(&hi));
        assert!(&hi - &lo <= rat(1, 1 << 40));
        let (lo, hi) = power_bracket(&rat(9, 4), 3, 2, 20);
        assert_eq!(lo, rat(27, 8));
        assert_eq!(hi, rat(27, 8));
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), int(10));
        assert_eq!(factorial(0), int(1));
    }
}
