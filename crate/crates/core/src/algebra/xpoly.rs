//! Laurent polynomials in `X = 2/β` with rational coefficients.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_traits::{One, Zero};

use super::rational::{fmt_rational, rational_pow, Rational};

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct XPoly {
    terms: BTreeMap<i32, Rational>,
}

impl XPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::monomial(c, 0)
    }

    pub fn monomial(c: Rational, j: i32) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(j, c);
        }
        Self { terms }
    }

    /// The variable `X`.
    pub fn x() -> Self {
        Self::monomial(Rational::one(), 1)
    }

    /// `β = 2/X`.
    pub fn beta() -> Self {
        Self::monomial(Rational::from_integer(2.into()), -1)
    }

    pub fn from_pairs<I: IntoIterator<Item = (i32, Rational)>>(pairs: I) -> Self {
        let mut p = Self::zero();
        for (j, c) in pairs {
            p.add_term(j, c);
        }
        p
    }

    /// Builds from integer coefficients listed from `X^0` upwards.
    pub fn from_ints(coeffs: &[i64]) -> Self {
        Self::from_pairs(
            coeffs
                .iter()
                .enumerate()
                .map(|(j, &c)| (j as i32, Rational::from_integer(c.into()))),
        )
    }

    pub fn add_term(&mut self, j: i32, c: Rational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(j) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, j: i32) -> Rational {
        self.terms.get(&j).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (i32, &Rational)> {
        self.terms.iter().map(|(j, c)| (*j, c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> Option<i32> {
        self.terms.keys().next_back().copied()
    }

    pub fn min_degree(&self) -> Option<i32> {
        self.terms.keys().next().copied()
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(j, a)| (*j, a * c)).collect(),
        }
    }

    /// Multiplies by `X^k`.
    pub fn shift(&self, k: i32) -> Self {
        Self {
            terms: self.terms.iter().map(|(j, a)| (j + k, a.clone())).collect(),
        }
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for (j, c) in &self.terms {
            acc += c * rational_pow(x, *j);
        }
        acc
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.terms
            .iter()
            .map(|(j, c)| super::rational::to_f64(c) * x.powi(*j))
            .sum()
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|j| *j == 0)
    }

    pub fn constant_term(&self) -> Rational {
        self.coeff(0)
    }

    /// Inverse of a single-term polynomial.
    pub fn monomial_inverse(&self) -> Option<Self> {
        if self.terms.len() != 1 {
            return None;
        }
        let (j, c) = self.terms.iter().next().unwrap();
        Some(Self::monomial(c.recip(), -j))
    }

    /// Canonical form: `[exponent, "p/q"]` pairs, highest exponent first.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(
            self.terms
                .iter()
                .rev()
                .map(|(j, c)| serde_json::json!([j, fmt_rational(c)]))
                .collect(),
        )
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self, crate::error::AlgebraError> {
        use crate::error::AlgebraError;
        let arr = v
            .as_array()
            .ok_or_else(|| AlgebraError::Parse("XPoly must be an array".into()))?;
        let mut p = Self::zero();
        for item in arr {
            let pair = item.as_array().filter(|a| a.len() == 2).ok_or_else(|| {
                AlgebraError::Parse("XPoly term must be [exponent, coefficient]".into())
            })?;
            let j = pair[0]
                .as_i64()
                .ok_or_else(|| AlgebraError::Parse("bad XPoly exponent".into()))?;
            let c = pair[1]
                .as_str()
                .ok_or_else(|| AlgebraError::Parse("bad XPoly coefficient".into()))?;
            p.add_term(j as i32, super::rational::parse_rational(c)?);
        }
        Ok(p)
    }
}

impl fmt::Display for XPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (j, c) in self.terms.iter().rev() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match j {
                0 => write!(f, "{}", fmt_rational(c))?,
                1 => write!(f, "({})*X", fmt_rational(c))?,
                _ => write!(f, "({})*X^{}", fmt_rational(c), j)?,
            }
        }
        Ok(())
    }
}

impl From<Rational> for XPoly {
    fn from(c: Rational) -> Self {
        Self::constant(c)
    }
}

impl Add<&XPoly> for &XPoly {
    type Output = XPoly;
    fn add(self, rhs: &XPoly) -> XPoly {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Add for XPoly {
    type Output = XPoly;
    fn add(mut self, rhs: XPoly) -> XPoly {
        self += &rhs;
        self
    }
}

impl AddAssign<&XPoly> for XPoly {
    fn add_assign(&mut self, rhs: &XPoly) {
        for (j, c) in &rhs.terms {
            self.add_term(*j, c.clone());
        }
    }
}

impl SubAssign<&XPoly> for XPoly {
    fn sub_assign(&mut self, rhs: &XPoly) {
        for (j, c) in &rhs.terms {
            self.add_term(*j, -c.clone());
        }
    }
}

impl Sub<&XPoly> for &XPoly {
    type Output = XPoly;
    fn sub(self, rhs: &XPoly) -> XPoly {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Sub for XPoly {
    type Output = XPoly;
    fn sub(mut self, rhs: XPoly) -> XPoly {
        self -= &rhs;
        self
    }
}

impl Neg for &XPoly {
    type Output = XPoly;
    fn neg(self) -> XPoly {
        XPoly {
            terms: self.terms.iter().map(|(j, c)| (*j, -c.clone())).collect(),
        }
    }
}

impl Neg for XPoly {
    type Output = XPoly;
    fn neg(self) -> XPoly {
        -&self
    }
}

impl Mul<&XPoly> for &XPoly {
    type Output = XPoly;
    fn mul(self, rhs: &XPoly) -> XPoly {
        let mut out = XPoly::zero();
        for (i, a) in &self.terms {
            for (j, b) in &rhs.terms {
                out.add_term(i + j, a * b);
            }
        }
        out
    }
}

impl Mul for XPoly {
    type Output = XPoly;
    fn mul(self, rhs: XPoly) -> XPoly {
        &self * &rhs
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::rat;

    #[test]
    fn arithmetic() {
        let p = XPoly::from_ints(&[-39, 27, -5]);
        let q = XPoly::from_ints(&[0, 18]);
        let r = (&p - &q).scale(&rat(1, 24));
        assert_eq!(r, XPoly::from_pairs([(2, rat(-5, 24)), (1, rat(3, 8)), (0, rat(-13, 8))]));
        assert_eq!(r.eval(&rat(1, 1)), rat(-35, 24));
        assert!((&p - &p).is_zero());
        assert_eq!((&XPoly::beta() * &XPoly::x()), XPoly::constant(rat(2, 1)));
    }

    #[test]
    fn json_round_trip() {
        let p = XPoly::from_pairs([(2, rat(-5, 24)), (-1, rat(3, 8))]);
        let v = p.to_json();
        assert_eq!(v.to_string(), r#"[[2,"-5/24"],[-1,"3/8"]]"#);
        assert_eq!(XPoly::from_json(&v).unwrap(), p);
    }
}
