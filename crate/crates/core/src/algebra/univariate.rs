//! Univariate tools in `α`: partial fractions and Laurent expansions.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use super::factor::Factor;
use super::poly::{Mono, ZPoly, SLOT_ALPHA, SLOT_X};
use super::rational::Rational;
use super::ratfn::FactoredRatFn;
use super::xpoly::XPoly;
use crate::error::AlgebraError;

/// Dense polynomial in `α` with `X`-polynomial coefficients, lowest power first.
pub type UPoly = Vec<XPoly>;

fn trim(mut p: UPoly) -> UPoly {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
    p
}

pub fn upoly_add(a: &[XPoly], b: &[XPoly]) -> UPoly {
    let n = a.len().max(b.len());
    let mut out = vec![XPoly::zero(); n];
    for (i, c) in a.iter().enumerate() {
        out[i] += c;
    }
    for (i, c) in b.iter().enumerate() {
        out[i] += c;
    }
    trim(out)
}

pub fn upoly_sub(a: &[XPoly], b: &[XPoly]) -> UPoly {
    let neg: UPoly = b.iter().map(|c| -c).collect();
    upoly_add(a, &neg)
}

pub fn upoly_mul(a: &[XPoly], b: &[XPoly]) -> UPoly {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![XPoly::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += &(x * y);
        }
    }
    trim(out)
}

/// Multiplies by a rational polynomial.
pub fn upoly_mul_rat(a: &[XPoly], b: &[Rational]) -> UPoly {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![XPoly::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            if !y.is_zero() {
                out[i + j] += &x.scale(y);
            }
        }
    }
    trim(out)
}

/// Division by a monic rational polynomial: `(quotient, remainder)`.
pub fn upoly_divrem(a: &[XPoly], d: &[Rational]) -> (UPoly, UPoly) {
    let dn = d.len() - 1;
    assert!(d[dn].is_one(), "divisor must be monic");
    let mut rem: UPoly = a.to_vec();
    if rem.len() <= dn {
        return (vec![], trim(rem));
    }
    let mut quot = vec![XPoly::zero(); rem.len() - dn];
    for i in (dn..rem.len()).rev() {
        let c = std::mem::take(&mut rem[i]);
        if c.is_zero() {
            continue;
        }
        for j in 0..dn {
            let t = c.scale(&d[j]);
            rem[i - dn + j] -= &t;
        }
        quot[i - dn] = c;
    }
    rem.truncate(dn);
    (trim(quot), trim(rem))
}

/// Coefficients of `p(r + ε)` in powers of `ε`.
pub fn taylor_shift(p: &[XPoly], r: &Rational) -> UPoly {
    let mut c: UPoly = p.to_vec();
    let n = c.len();
    // repeated synthetic division by (α - r)
    for i in 0..n {
        for j in (i..n - 1).rev() {
            let t = c[j + 1].scale(r);
            c[j] += &t;
        }
    }
    c
}

pub fn rat_taylor_shift(p: &[Rational], r: &Rational) -> Vec<Rational> {
    let mut c = p.to_vec();
    let n = c.len();
    for i in 0..n {
        for j in (i..n - 1).rev() {
            let t = &c[j + 1] * r;
            c[j] += t;
        }
    }
    c
}

/// Exact quotient of a rational polynomial by `α - r`.
fn rat_div_root(p: &[Rational], r: &Rational) -> Vec<Rational> {
    let n = p.len();
    let mut q = vec![Rational::zero(); n - 1];
    let mut acc = Rational::zero();
    for i in (1..n).rev() {
        acc = &p[i] + &acc * r;
        q[i - 1] = acc.clone();
    }
    debug_assert!((&p[0] + &acc * r).is_zero());
    q
}

/// Truncated inverse of a power series with nonzero constant term.
pub fn series_inverse(s: &[Rational], n: usize) -> Vec<Rational> {
    assert!(!s[0].is_zero());
    let inv0 = s[0].recip();
    let mut out = vec![Rational::zero(); n];
    if n == 0 {
        return out;
    }
    out[0] = inv0.clone();
    for k in 1..n {
        let mut acc = Rational::zero();
        for j in 1..=k.min(s.len() - 1) {
            acc += &s[j] * &out[k - j];
        }
        out[k] = -acc * &inv0;
    }
    out
}

fn rat_poly_mul(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![Rational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Rational coefficients of an α-factor, lowest power first.
pub fn factor_coeffs(f: Factor) -> Vec<Rational> {
    let one = Rational::one();
    match f {
        Factor::Alpha => vec![Rational::zero(), one],
        Factor::AlphaMinus1 => vec![-one.clone(), one],
        Factor::AlphaPlus1 => vec![one.clone(), one],
        Factor::AlphaSqPlus1 => vec![one.clone(), Rational::zero(), one],
        _ => panic!("factor {f} involves a z-variable"),
    }
}

/// The root of a linear α-factor.
pub fn factor_root(f: Factor) -> Option<Rational> {
    match f {
        Factor::Alpha => Some(Rational::zero()),
        Factor::AlphaMinus1 => Some(Rational::one()),
        Factor::AlphaPlus1 => Some(-Rational::one()),
        _ => None,
    }
}

/// Splits an α-only function into numerator coefficients (scale included)
/// and its denominator factors.
pub fn alpha_parts(f: &FactoredRatFn) -> Result<(UPoly, Vec<(Factor, u32)>), AlgebraError> {
    if !f.is_alpha_only() {
        return Err(AlgebraError::NotUnivariate);
    }
    let mut num: UPoly = vec![];
    for (m, c) in f.numerator().terms() {
        let i = m.exp(SLOT_ALPHA) as usize;
        if num.len() <= i {
            num.resize(i + 1, XPoly::zero());
        }
        num[i].add_term(
            m.exp(SLOT_X) as i32,
            Rational::from_integer(c.clone()) * f.scale(),
        );
    }
    let den = f.denominator().iter().map(|(k, v)| (*k, *v)).collect();
    Ok((trim(num), den))
}

/// Builds an α-only function from numerator coefficients and denominator.
pub fn from_alpha_parts(
    nz: usize,
    num: &[XPoly],
    den: &[(Factor, u32)],
) -> Result<FactoredRatFn, AlgebraError> {
    let mut raw: Vec<(Mono, Rational)> = vec![];
    for (i, c) in num.iter().enumerate() {
        for (j, r) in c.terms() {
            if j < 0 {
                return Err(AlgebraError::NotRepresentable(format!(
                    "X^{j} in a numerator"
                )));
            }
            raw.push((
                Mono::var(SLOT_ALPHA, i as u32).mul(Mono::var(SLOT_X, j as u32)),
                r.clone(),
            ));
        }
    }
    let q = super::rational::lcm_denoms(raw.iter().map(|(_, c)| c));
    let qr = Rational::from_integer(q.clone());
    let terms = raw
        .into_iter()
        .map(|(m, c)| (m, (c * &qr).to_integer()))
        .collect();
    Ok(FactoredRatFn::from_parts(
        nz,
        qr.recip(),
        ZPoly::from_terms(terms),
        den.iter().copied().collect::<BTreeMap<_, _>>(),
    ))
}

/// One partial-fraction term `(constant + linear·α) / factor^power`.
#[derive(Clone, Debug, PartialEq)]
pub struct PfTerm {
    pub factor: Factor,
    pub power: u32,
    pub constant: XPoly,
    /// Nonzero only for the quadratic factor `α²+1`.
    pub linear: XPoly,
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct PartialFractions {
    /// Polynomial part, lowest power of α first.
    pub polynomial: UPoly,
    pub terms: Vec<PfTerm>,
}

impl PartialFractions {
    /// Coefficient of `1/factor^power` (constant part).
    pub fn coeff(&self, f: Factor, power: u32) -> XPoly {
        self.terms
            .iter()
            .find(|t| t.factor == f && t.power == power)
            .map(|t| t.constant.clone())
            .unwrap_or_default()
    }

    pub fn recombine(&self, nz: usize) -> Result<FactoredRatFn, AlgebraError> {
        let mut parts = vec![from_alpha_parts(nz, &self.polynomial, &[])?];
        for t in &self.terms {
            parts.push(from_alpha_parts(
                nz,
                &[t.constant.clone(), t.linear.clone()],
                &[(t.factor, t.power)],
            )?);
        }
        Ok(FactoredRatFn::sum(parts.iter()))
    }
}

/// Exact partial-fraction decomposition of an α-only function.
pub fn partial_fractions(f: &FactoredRatFn) -> Result<PartialFractions, AlgebraError> {
    let (num, den) = alpha_parts(f)?;
    let mut full: Vec<Rational> = vec![Rational::one()];
    for (fac, e) in &den {
        for _ in 0..*e {
            full = rat_poly_mul(&full, &factor_coeffs(*fac));
        }
    }
    let (poly, rem) = upoly_divrem(&num, &full);
    let mut out = PartialFractions {
        polynomial: poly,
        terms: vec![],
    };
    // principal parts at the linear roots
    let mut lin_num: UPoly = vec![];
    let mut lin_den: Vec<Rational> = vec![Rational::one()];
    let mut quad_power = 0u32;
    for (fac, e) in &den {
        if *fac == Factor::AlphaSqPlus1 {
            quad_power = *e;
            continue;
        }
        for _ in 0..*e {
            lin_den = rat_poly_mul(&lin_den, &factor_coeffs(*fac));
        }
    }
    for (fac, e) in &den {
        let Some(r) = factor_root(*fac) else { continue };
        let e = *e as usize;
        let mut rest: Vec<Rational> = vec![Rational::one()];
        for (g, k) in &den {
            if g != fac {
                for _ in 0..*k {
                    rest = rat_poly_mul(&rest, &factor_coeffs(*g));
                }
            }
        }
        let shifted_rest = rat_taylor_shift(&rest, &r);
        let inv = series_inverse(&shifted_rest, e);
        let shifted_num = taylor_shift(&rem, &r);
        // coefficients of rem/rest at r, i.e. f·(α-r)^e
        for j in 1..=e {
            let idx = e - j;
            let mut c = XPoly::zero();
            for i in 0..=idx {
                if i < shifted_num.len() {
                    c += &shifted_num[i].scale(&inv[idx - i]);
                }
            }
            if c.is_zero() {
                continue;
            }
            // add c·lin_den/(α-r)^j to lin_num
            let mut cof = lin_den.clone();
            for _ in 0..j {
                cof = rat_div_root(&cof, &r);
            }
            lin_num = upoly_add(&lin_num, &upoly_mul_rat(&[c.clone()], &cof));
            out.terms.push(PfTerm {
                factor: *fac,
                power: j as u32,
                constant: c,
                linear: XPoly::zero(),
            });
        }
    }
    if quad_power > 0 {
        let mut q = vec![Rational::one()];
        for _ in 0..quad_power {
            q = rat_poly_mul(&q, &factor_coeffs(Factor::AlphaSqPlus1));
        }
        let diff = upoly_sub(&rem, &upoly_mul_rat(&lin_num, &q));
        let (t, r) = upoly_divrem(&diff, &lin_den);
        debug_assert!(r.is_empty());
        let mut t = t;
        let quad = factor_coeffs(Factor::AlphaSqPlus1);
        for j in 0..quad_power {
            let (qq, r) = upoly_divrem(&t, &quad);
            let c0 = r.first().cloned().unwrap_or_default();
            let c1 = r.get(1).cloned().unwrap_or_default();
            if !(c0.is_zero() && c1.is_zero()) {
                out.terms.push(PfTerm {
                    factor: Factor::AlphaSqPlus1,
                    power: quad_power - j,
                    constant: c0,
                    linear: c1,
                });
            }
            t = qq;
        }
    }
    out.terms.sort_by(|a, b| a.factor.cmp(&b.factor).then(b.power.cmp(&a.power)));
    Ok(out)
}

/// Laurent series in `ε = α - r` with `X`-polynomial coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct LaurentSeries {
    pub min_exponent: i64,
    pub coeffs: Vec<XPoly>,
    /// Exclusive truncation order.
    pub truncation: i64,
}

impl LaurentSeries {
    pub fn coeff(&self, j: i64) -> XPoly {
        if j < self.min_exponent || j >= self.truncation {
            return XPoly::zero();
        }
        self.coeffs
            .get((j - self.min_exponent) as usize)
            .cloned()
            .unwrap_or_default()
    }

    pub fn leading(&self) -> Option<&XPoly> {
        self.coeffs.first().filter(|c| !c.is_zero())
    }

    /// Product truncated at the smaller relative precision.
    pub fn mul(&self, o: &LaurentSeries) -> LaurentSeries {
        let min = self.min_exponent + o.min_exponent;
        let trunc = (self.truncation + o.min_exponent).min(o.truncation + self.min_exponent);
        let n = (trunc - min).max(0) as usize;
        let mut coeffs = vec![XPoly::zero(); n];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                if i + j < n {
                    coeffs[i + j] += &(a * b);
                }
            }
        }
        LaurentSeries {
            min_exponent: min,
            coeffs,
            truncation: trunc,
        }
        .normalized()
    }

    fn normalized(mut self) -> Self {
        let lead = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        if lead == self.coeffs.len() {
            self.coeffs.clear();
            self.min_exponent = self.truncation;
        } else {
            self.coeffs.drain(..lead);
            self.min_exponent += lead as i64;
        }
        self
    }

    pub fn truncate(&self, order: i64) -> LaurentSeries {
        let trunc = order.min(self.truncation);
        let keep = (trunc - self.min_exponent).max(0) as usize;
        LaurentSeries {
            min_exponent: self.min_exponent,
            coeffs: self.coeffs.iter().take(keep).cloned().collect(),
            truncation: trunc,
        }
    }
}

/// The first `nterms` terms of the Laurent expansion at `α = r`, starting
/// from the exact leading order.
pub fn laurent_at(
    f: &FactoredRatFn,
    r: &Rational,
    nterms: usize,
) -> Result<LaurentSeries, AlgebraError> {
    let (num, den) = alpha_parts(f)?;
    if num.is_empty() {
        return Ok(LaurentSeries {
            min_exponent: nterms as i64,
            coeffs: vec![],
            truncation: nterms as i64,
        });
    }
    let mut pole = 0i64;
    let mut rest: Vec<Rational> = vec![Rational::one()];
    for (fac, e) in &den {
        let c = factor_coeffs(*fac);
        let v = rat_taylor_shift(&c, r);
        if v[0].is_zero() {
            // linear factor vanishing at r: contributes ε^e
            pole += *e as i64;
        } else {
            for _ in 0..*e {
                rest = rat_poly_mul(&rest, &c);
            }
        }
    }
    let shifted = taylor_shift(&num, r);
    let zeros = shifted.iter().take_while(|c| c.is_zero()).count();
    let body = &shifted[zeros..];
    let inv = series_inverse(&rat_taylor_shift(&rest, r), nterms);
    let mut coeffs = vec![XPoly::zero(); nterms];
    for (k, slot) in coeffs.iter_mut().enumerate() {
        for i in 0..=k.min(body.len().saturating_sub(1)) {
            if !inv[k - i].is_zero() {
                *slot += &body[i].scale(&inv[k - i]);
            }
        }
    }
    let min = zeros as i64 - pole;
    Ok(LaurentSeries {
        min_exponent: min,
        coeffs,
        truncation: min + nterms as i64,
    })
}

/// Expansion at `α = 1`, correct through `ε^{depth-1}`.
pub fn laurent_expand(f: &FactoredRatFn, depth: i64) -> Result<LaurentSeries, AlgebraError> {
    let probe = laurent_at(f, &Rational::one(), 1)?;
    let needed = (depth - probe.min_exponent).max(1) as usize;
    Ok(laurent_at(f, &Rational::one(), needed)?.truncate(depth))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::rat;

    fn f(s: &str) -> FactoredRatFn {
        FactoredRatFn::parse(0, s).unwrap()
    }

    #[test]
    fn partial_fraction_examples() {
        let pf = partial_fractions(&f("2*a/((a-1)*(a+1))")).unwrap();
        assert_eq!(pf.coeff(Factor::AlphaMinus1, 1), XPoly::one());
        assert_eq!(pf.coeff(Factor::AlphaPlus1, 1), XPoly::one());
        let pf = partial_fractions(&f("1/((a-1)^2*(a+1))")).unwrap();
        assert_eq!(pf.coeff(Factor::AlphaMinus1, 2), XPoly::constant(rat(1, 2)));
        assert_eq!(pf.coeff(Factor::AlphaMinus1, 1), XPoly::constant(rat(-1, 4)));
        assert_eq!(pf.coeff(Factor::AlphaPlus1, 1), XPoly::constant(rat(1, 4)));
        let g = f("(a^3 + X*a + 2)/(a^2*(a^2+1)^2*(a-1))");
        let pf = partial_fractions(&g).unwrap();
        assert_eq!(pf.recombine(0).unwrap(), g);
    }

    #[test]
    fn laurent_examples() {
        let s = laurent_expand(&f("1/(a^2-1)^3"), 0).unwrap();
        assert_eq!(s.min_exponent, -3);
        assert_eq!(s.coeff(-3), XPoly::constant(rat(1, 8)));
        assert_eq!(s.coeff(-2), XPoly::constant(rat(-3, 16)));
        let s = laurent_expand(&f("(a^2-1)/a^3"), 3).unwrap();
        assert_eq!(s.min_exponent, 1);
        assert_eq!(s.coeff(1), XPoly::constant(rat(2, 1)));
        assert_eq!(s.coeff(2), XPoly::constant(rat(-5, 1)));
    }
}
