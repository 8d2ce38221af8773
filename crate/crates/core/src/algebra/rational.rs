//! Rational helpers on top of `num_rational::BigRational`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::AlgebraError;

pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Formats as `p` for integers and `p/q` otherwise.
pub fn fmt_rational(r: &Rational) -> String {
    r.to_string()
}

pub fn parse_rational(s: &str) -> Result<Rational, AlgebraError> {
    let s = s.trim();
    let bad = || AlgebraError::Parse(format!("not a rational: {s:?}"));
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().map_err(|_| bad())?;
            let q: BigInt = q.trim().parse().map_err(|_| bad())?;
            if q.is_zero() {
                return Err(bad());
            }
            Ok(Rational::new(p, q))
        }
        None => {
            let p: BigInt = s.parse().map_err(|_| bad())?;
            Ok(Rational::from_integer(p))
        }
    }
}

/// 2-adic valuation of a nonzero integer.
pub fn two_adic_int(n: &BigInt) -> u64 {
    n.trailing_zeros().unwrap_or(0)
}

/// 2-adic valuation of a nonzero rational.
pub fn two_adic(r: &Rational) -> i64 {
    two_adic_int(r.numer()) as i64 - two_adic_int(r.denom()) as i64
}

/// Returns true when the reduced denominator is a power of two.
pub fn is_dyadic(r: &Rational) -> bool {
    let d = r.denom();
    let tz = two_adic_int(d);
    (d >> tz as usize).is_one()
}

pub fn pow2(e: i64) -> Rational {
    if e >= 0 {
        Rational::from_integer(BigInt::one() << e as usize)
    } else {
        Rational::new(BigInt::one(), BigInt::one() << (-e) as usize)
    }
}

pub fn rational_pow(r: &Rational, e: i32) -> Rational {
    if e >= 0 {
        num_traits::pow(r.clone(), e as usize)
    } else {
        num_traits::pow(r.recip(), (-e) as usize)
    }
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // very large numerators or denominators: scale by bit lengths
        let nb = r.numer().bits() as i64;
        let db = r.denom().bits() as i64;
        let shift = nb - db;
        let scaled = if shift > 0 {
            Rational::new(r.numer().clone(), r.denom() << shift as usize)
        } else {
            Rational::new(r.numer() << (-shift) as usize, r.denom().clone())
        };
        scaled.to_f64().unwrap_or(0.0) * 2f64.powi(shift as i32)
    })
}

/// Exact rational approximation of a finite `f64` (its binary value).
pub fn from_f64(x: f64) -> Option<Rational> {
    Rational::from_float(x)
}

pub fn lcm_denoms<'a>(it: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    it.into_iter().fold(BigInt::one(), |acc, r| acc.lcm(r.denom()))
}

pub fn abs(r: &Rational) -> Rational {
    r.abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_rational("-35/24").unwrap(), rat(-35, 24));
        assert_eq!(parse_rational("6/4").unwrap(), rat(3, 2));
        assert_eq!(fmt_rational(&rat(-10, 2)), "-5");
        assert_eq!(fmt_rational(&rat(3, -6)), "-1/2");
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn valuations() {
        assert_eq!(two_adic(&rat(5, 16)), -4);
        assert_eq!(two_adic(&rat(12, 5)), 2);
        assert!(is_dyadic(&rat(3, 64)));
        assert!(!is_dyadic(&rat(1, 48)));
    }
}
