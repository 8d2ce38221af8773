//! Right-tail series of `F_1`, `F_2`, `F_4` computed from the
//! Hastings–McLeod solution of `q'' = 2q³ + sq`, as an independent check on
//! the tail expansion.
//!
//! Only the leading exponential grade is kept: `q` is grade 1, `q²` and
//! `R = ∫_s^∞ q²` grade 2, and `q³` never contributes.

use num_traits::{One, Zero};

use crate::algebra::rational::{fmt_rational, rat, Rational};
use crate::error::OracleError;
use crate::tail::{PrefactorExponents, TailExpansion, TailKind};

/// `constant · π^{pi_half/2} · s^{-power} · e^{-rate s^{3/2}} · Σ_j c_j s^{-3j/2}`.
#[derive(Clone, Debug, PartialEq)]
pub struct GradedAsySeries {
    pub rate: Rational,
    pub power: Rational,
    pub constant: Rational,
    pub pi_half: i32,
    pub coeffs: Vec<Rational>,
}

impl GradedAsySeries {
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn truncate(mut self, n: usize) -> Self {
        self.coeffs.truncate(n);
        self
    }

    /// Exact `d/ds` of the finite sum (one term longer).
    pub fn differentiate(&self) -> Self {
        let g = &self.rate * rat(3, 2);
        let n = self.coeffs.len();
        let mut d = vec![Rational::zero(); n + 1];
        for (j, slot) in d.iter_mut().enumerate() {
            let mut v = Rational::zero();
            if j < n {
                v -= &g * &self.coeffs[j];
            }
            if j >= 1 {
                let k = &self.power + rat(3 * (j as i64 - 1), 2);
                v -= k * &self.coeffs[j - 1];
            }
            *slot = v;
        }
        Self {
            power: &self.power - rat(1, 2),
            coeffs: d,
            ..self.clone()
        }
    }

    /// `∫_s^∞` through `n` coefficients.
    pub fn integrate_grade(&self, n: usize) -> Self {
        let g = &self.rate * rat(3, 2);
        let power = &self.power + rat(1, 2);
        let mut b: Vec<Rational> = Vec::with_capacity(n);
        for j in 0..n {
            let mut v = self.coeffs.get(j).cloned().unwrap_or_default();
            if j >= 1 {
                v -= (&power + rat(3 * (j as i64 - 1), 2)) * &b[j - 1];
            }
            b.push(v / &g);
        }
        Self {
            power,
            coeffs: b,
            ..self.clone()
        }
    }

    pub fn mul(&self, o: &Self, n: usize) -> Self {
        let mut c = vec![Rational::zero(); n];
        for (i, a) in self.coeffs.iter().enumerate().take(n) {
            for (j, b) in o.coeffs.iter().enumerate().take(n - i) {
                c[i + j] += a * b;
            }
        }
        Self {
            rate: &self.rate + &o.rate,
            power: &self.power + &o.power,
            constant: &self.constant * &o.constant,
            pi_half: self.pi_half + o.pi_half,
            coeffs: c,
        }
    }

    /// Multiplies by `s^k`.
    pub fn times_power_of_s(&self, k: i64) -> Self {
        Self {
            power: &self.power - Rational::from_integer(k.into()),
            ..self.clone()
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self {
            constant: &self.constant * c,
            ..self.clone()
        }
    }

    /// `self + other`, both on the same grade and power.
    pub fn add(&self, o: &Self) -> Result<Self, OracleError> {
        if self.rate != o.rate || self.power != o.power || self.pi_half != o.pi_half {
            return Err(OracleError::Mismatch {
                what: "series shape in addition".into(),
                expected: format!("rate {} power {}", self.rate, self.power),
                actual: format!("rate {} power {}", o.rate, o.power),
            });
        }
        let n = self.len().min(o.len());
        let coeffs = (0..n)
            .map(|j| &self.constant * &self.coeffs[j] + &o.constant * &o.coeffs[j])
            .collect();
        Ok(Self {
            constant: Rational::one(),
            coeffs,
            ..self.clone()
        })
    }

    /// Moves the first nonzero coefficient into the constant.
    pub fn normalize(&self) -> Self {
        let lead = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        if lead == self.coeffs.len() {
            return Self {
                constant: Rational::zero(),
                coeffs: vec![],
                ..self.clone()
            };
        }
        let c0 = self.coeffs[lead].clone();
        Self {
            power: &self.power + rat(3 * lead as i64, 2),
            constant: &self.constant * &c0,
            coeffs: self.coeffs[lead..].iter().map(|c| c / &c0).collect(),
            ..self.clone()
        }
    }

    /// Substitutes `s → 2^{2/3} s`; needs `2·power/3` integral.
    pub fn double_cube_argument(&self) -> Result<Self, OracleError> {
        let e = &self.power * rat(2, 3);
        if !e.is_integer() {
            return Err(OracleError::Mismatch {
                what: "rescaled power".into(),
                expected: "multiple of 3/2".into(),
                actual: fmt_rational(&self.power),
            });
        }
        let e: i64 = e.to_integer().try_into().unwrap_or(0);
        let mut scale = Rational::one();
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| {
                let v = c * &scale;
                scale /= rat(2, 1);
                v
            })
            .collect();
        Ok(Self {
            rate: &self.rate * rat(2, 1),
            constant: &self.constant * crate::algebra::rational::pow2(-e),
            coeffs,
            ..self.clone()
        })
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "rate": fmt_rational(&self.rate),
            "power": fmt_rational(&self.power),
            "constant": fmt_rational(&self.constant),
            "pi_half_power": self.pi_half,
            "coeffs": self.coeffs.iter().map(fmt_rational).collect::<Vec<_>>(),
        })
    }
}

/// Hastings–McLeod `q ≈ Ai(s)` at grade 1 through `n` coefficients,
/// fixed by `q'' = sq` and `q ~ s^{-1/4} e^{-2s^{3/2}/3} / (2√π)`.
pub fn q_series(n: usize) -> GradedAsySeries {
    let mut q = GradedAsySeries {
        rate: rat(2, 3),
        power: rat(1, 4),
        constant: rat(1, 2),
        pi_half: -1,
        coeffs: vec![Rational::one()],
    };
    let residual = |q: &GradedAsySeries, j: usize| -> Rational {
        let d2 = q.differentiate().differentiate();
        let sq = q.times_power_of_s(1);
        debug_assert_eq!(d2.power, sq.power);
        d2.coeffs.get(j).cloned().unwrap_or_default() - sq.coeffs.get(j).cloned().unwrap_or_default()
    };
    for k in 1..n {
        q.coeffs.push(Rational::zero());
        let r0 = residual(&q, k + 1);
        q.coeffs[k] = Rational::one();
        let r1 = residual(&q, k + 1);
        q.coeffs[k] = -&r0 / (r1 - &r0);
    }
    q
}

/// `∫_s^∞ q`, `R = ∫_s^∞ q²` and `∫_s^∞ R` through `n` coefficients.
pub struct PainleveSeries {
    pub q: GradedAsySeries,
    pub int_q: GradedAsySeries,
    pub r: GradedAsySeries,
    pub int_r: GradedAsySeries,
}

pub fn painleve_series(n: usize) -> PainleveSeries {
    let q = q_series(n + 2);
    let int_q = q.integrate_grade(n);
    let q2 = q.mul(&q, n + 2);
    let r = q2.integrate_grade(n + 1);
    let int_r = r.integrate_grade(n);
    PainleveSeries { q: q.truncate(n), int_q, r, int_r }
}

/// `1 - F_β` at leading grade (`β = 4` in the `2^{2/3}s` scaling) with `n`
/// coefficients after normalization.
pub fn f_beta_series(beta: u32, n: usize) -> Result<GradedAsySeries, OracleError> {
    let ps = painleve_series(n + 1);
    let out = match beta {
        // E H = 1 - ½∫q + …
        1 => ps.int_q.scale(&rat(1, 2)),
        // H² = 1 - ∫R + …
        2 => ps.int_r,
        // ½(E + 1/E) H = 1 + (∫q)²/8 - ½∫R + …
        4 => {
            let sq = ps.int_q.mul(&ps.int_q, n + 1).scale(&rat(-1, 8));
            ps.int_r.scale(&rat(1, 2)).add(&sq)?.normalize().double_cube_argument()?
        }
        b => return Err(OracleError::UnsupportedBeta(b.to_string())),
    };
    Ok(out.normalize().truncate(n))
}

/// Exact `(rational, π half-power)` value of a tail prefactor at
/// `β ∈ {1, 2, 4}`.
pub fn exact_prefactor(kind: TailKind, beta: u32) -> Result<(Rational, i32), OracleError> {
    let (log2_beta, gamma_pi_half) = match beta {
        // Γ(1/2) = √π, Γ(1) = Γ(2) = 1
        1 => (0i64, 1),
        2 => (1, 0),
        4 => (2, 0),
        b => return Err(OracleError::UnsupportedBeta(b.to_string())),
    };
    let x = rat(2, beta as i64);
    let pe = PrefactorExponents::for_kind(kind);
    let two = pe.two.eval(&x) + pe.beta.eval(&x) * Rational::from_integer(log2_beta.into());
    let gamma = pe.gamma.eval(&x);
    let pi = pe.pi.eval(&x);
    if !two.is_integer() || !gamma.is_integer() || !pi.is_integer() {
        return Err(OracleError::UnsupportedBeta(beta.to_string()));
    }
    let two: i64 = two.to_integer().try_into().unwrap_or(0);
    let gamma: i32 = gamma.to_integer().try_into().unwrap_or(0);
    let pi: i32 = pi.to_integer().try_into().unwrap_or(0);
    Ok((crate::algebra::rational::pow2(two), gamma * gamma_pi_half + 2 * pi))
}

#[derive(Clone, Debug, PartialEq)]
pub struct CrossValidation {
    pub beta: u32,
    pub order: usize,
    pub complement: GradedAsySeries,
    pub density: GradedAsySeries,
    pub coefficients_checked: usize,
}

fn check(what: String, expected: &Rational, actual: &Rational) -> Result<(), OracleError> {
    if expected == actual {
        Ok(())
    } else {
        Err(OracleError::Mismatch {
            what,
            expected: fmt_rational(expected),
            actual: fmt_rational(actual),
        })
    }
}

fn check_shape(
    label: &str,
    s: &GradedAsySeries,
    kind: TailKind,
    beta: u32,
    x: &Rational,
) -> Result<(), OracleError> {
    check(format!("{label} rate"), &-TailExpansion::rate().eval(x), &s.rate)?;
    check(format!("{label} power"), &-TailExpansion::log_power(kind).eval(x), &s.power)?;
    let (c, pi_half) = exact_prefactor(kind, beta)?;
    check(format!("{label} constant"), &c, &s.constant)?;
    if pi_half != s.pi_half {
        return Err(OracleError::Mismatch {
            what: format!("{label} power of pi"),
            expected: format!("{}/2", pi_half),
            actual: format!("{}/2", s.pi_half),
        });
    }
    Ok(())
}

/// Compares the complement and density expansions with the Painlevé
/// series at `β ∈ {1, 2, 4}` through `order` correction coefficients.
pub fn cross_validate(
    beta: u32,
    te: &TailExpansion,
    order: usize,
) -> Result<CrossValidation, OracleError> {
    if order > te.order() {
        return Err(crate::error::TailError::OrderTooHigh {
            requested: order,
            available: te.order(),
        }
        .into());
    }
    let x = rat(2, beta as i64);
    let complement = f_beta_series(beta, order + 1)?;
    let density = complement.differentiate().scale(&rat(-1, 1)).normalize().truncate(order + 1);
    check_shape("complement", &complement, TailKind::Complement, beta, &x)?;
    check_shape("density", &density, TailKind::Density, beta, &x)?;
    for m in 1..=order {
        check(
            format!("complement coefficient {m}"),
            &complement.coeffs[m],
            &te.complement_expanded[m].eval(&x),
        )?;
        check(
            format!("density coefficient {m}"),
            &density.coeffs[m],
            &te.density_expanded[m].eval(&x),
        )?;
    }
    Ok(CrossValidation {
        beta,
        order,
        complement,
        density,
        coefficients_checked: 2 * order,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn airy_coefficients() {
        let q = q_series(3);
        assert_eq!(q.coeffs, vec![rat(1, 1), rat(-5, 48), rat(385, 4608)]);
    }

    #[test]
    fn prefactors() {
        assert_eq!(exact_prefactor(TailKind::Complement, 1).unwrap(), (rat(1, 4), -1));
        assert_eq!(exact_prefactor(TailKind::Complement, 2).unwrap(), (rat(1, 16), -2));
        assert_eq!(exact_prefactor(TailKind::Complement, 4).unwrap(), (rat(1, 512), -2));
        assert!(exact_prefactor(TailKind::Density, 3).is_err());
    }
}
