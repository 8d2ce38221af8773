//! Extended-precision floating point helpers (binary `FBig` at 256 bits).

use std::sync::OnceLock;

use dashu_float::round::mode::HalfEven;
use dashu_float::FBig;
use num_bigint::{BigInt, Sign};
use num_traits::{One, Signed, Zero};

use crate::algebra::Rational;

pub type F = FBig<HalfEven, 2>;

/// Working precision in bits.
pub const PREC: usize = 256;

pub fn fixed(x: F) -> F {
    x.with_precision(PREC).value()
}

pub fn from_i64(n: i64) -> F {
    fixed(F::from(n))
}

pub fn from_f64(x: f64) -> F {
    fixed(F::try_from(x).expect("finite float"))
}

pub fn from_bigint(n: &BigInt) -> F {
    let (sign, digits) = n.to_u64_digits();
    let base = fixed(F::from(1u64 << 32)) * fixed(F::from(1u64 << 32));
    let mut acc = from_i64(0);
    for d in digits.iter().rev() {
        acc = acc * &base + fixed(F::from(*d));
    }
    if sign == Sign::Minus {
        -acc
    } else {
        acc
    }
}

pub fn from_rational(r: &Rational) -> F {
    from_bigint(r.numer()) / from_bigint(r.denom())
}

pub fn to_f64(x: &F) -> f64 {
    x.to_f64().value()
}

pub fn pi() -> F {
    static PI: OnceLock<F> = OnceLock::new();
    PI.get_or_init(|| F::pi(PREC)).clone()
}

pub fn sqrt(x: &F) -> F {
    x.sqrt()
}

/// `x^y` for `x > 0`.
pub fn powf(x: &F, y: &F) -> F {
    (x.ln() * y).exp()
}

/// Decimal rendering with `digits` significant digits.
pub fn to_decimal_string(x: &F, digits: usize) -> String {
    if x == &from_i64(0) {
        return "0".to_string();
    }
    let d = x.to_decimal().value().with_precision(digits).value();
    d.to_string()
}

/// Bernoulli numbers `B_0..B_n` with `B_1 = -1/2`.
pub fn bernoulli(n: usize) -> Rational {
    static TABLE: OnceLock<Vec<Rational>> = OnceLock::new();
    let t = TABLE.get_or_init(|| bernoulli_table(160));
    if n < t.len() {
        t[n].clone()
    } else {
        bernoulli_table(n)[n].clone()
    }
}

fn bernoulli_table(n: usize) -> Vec<Rational> {
    let mut b: Vec<Rational> = Vec::with_capacity(n + 1);
    b.push(Rational::one());
    for m in 1..=n {
        // Σ_{k<m} C(m+1, k) B_k + (m+1) B_m = 0
        let mut acc = Rational::zero();
        let mut binom = BigInt::one();
        for (k, bk) in b.iter().enumerate() {
            acc += bk * Rational::from_integer(binom.clone());
            binom = binom * BigInt::from(m + 1 - k) / BigInt::from(k + 1);
        }
        b.push(-acc / Rational::from_integer(BigInt::from(m + 1)));
    }
    b
}

/// `ln Γ(x)` for `x > 0`: upward recurrence to `x ≥ 64`, then the Stirling
/// series with 40 Bernoulli terms.
pub fn ln_gamma(x: &F) -> F {
    assert!(x > &from_i64(0), "ln_gamma needs a positive argument");
    let threshold = from_i64(64);
    let mut shift_log = from_i64(0);
    let mut y = x.clone();
    let mut prod = from_i64(1);
    let mut count = 0;
    while y < threshold {
        prod *= &y;
        y += from_i64(1);
        count += 1;
        if count % 16 == 0 {
            shift_log += prod.ln();
            prod = from_i64(1);
        }
    }
    shift_log += prod.ln();
    let half = from_rational(&Rational::new(1.into(), 2.into()));
    let two_pi = pi() * from_i64(2);
    let mut s = (&y - &half) * y.ln() - &y + two_pi.ln() * &half;
    let y2 = &y * &y;
    let mut ypow = y.clone();
    for k in 1..=40usize {
        let b = bernoulli(2 * k);
        let denom = Rational::from_integer(BigInt::from(2 * k * (2 * k - 1)));
        s += from_rational(&(b / denom)) / &ypow;
        ypow *= &y2;
    }
    s - shift_log
}

pub fn gamma(x: &F) -> F {
    ln_gamma(x).exp()
}

/// A Gamma-function value together with its argument.
#[derive(Clone, Debug)]
pub struct GammaEval {
    pub argument: f64,
    pub value: F,
}

impl GammaEval {
    pub fn new(argument: f64) -> Self {
        Self {
            argument,
            value: gamma(&from_f64(argument)),
        }
    }
}

/// Rational approximation of `sqrt(r)` when `r` is a perfect square.
pub fn rational_sqrt(r: &Rational) -> Option<Rational> {
    if r.is_negative() {
        return None;
    }
    let n = r.numer().sqrt();
    let d = r.denom().sqrt();
    (&n * &n == *r.numer() && &d * &d == *r.denom()).then(|| Rational::new(n, d))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rat;

    #[test]
    fn bernoulli_values() {
        assert_eq!(bernoulli(1), rat(-1, 2));
        assert_eq!(bernoulli(2), rat(1, 6));
        assert_eq!(bernoulli(3), rat(0, 1));
        assert_eq!(bernoulli(4), rat(-1, 30));
        assert_eq!(bernoulli(12), rat(-691, 2730));
    }

    #[test]
    fn gamma_values() {
        let g = gamma(&from_i64(5));
        assert!((to_f64(&g) - 24.0).abs() < 1e-12);
        // Γ(1/2)² = π
        let h = gamma(&from_rational(&rat(1, 2)));
        let d = &h * &h - pi();
        assert!(to_f64(&d).abs() < 1e-60);
        let big = ln_gamma(&from_i64(1001));
        let mut exact = from_i64(0);
        for k in 2..=1000 {
            exact += from_i64(k).ln();
        }
        assert!(to_f64(&(big - exact)).abs() < 1e-60);
    }

    #[test]
    fn conversions() {
        let r = rat(-123456789, 1024);
        assert_eq!(to_f64(&from_rational(&r)), -123456789.0 / 1024.0);
        let big: BigInt = "123456789012345678901234567890".parse().unwrap();
        assert!((to_f64(&from_bigint(&big)) / 1.2345678901234568e29 - 1.0).abs() < 1e-15);
        assert_eq!(rational_sqrt(&rat(9, 4)), Some(rat(3, 2)));
        assert_eq!(rational_sqrt(&rat(2, 1)), None);
    }
}
