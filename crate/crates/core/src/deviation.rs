//! Right large deviations of `λ_max`: closed forms for the `N¹` and `N⁰`
//! exponent terms, exact corrections from the one-point correlators, and
//! numeric evaluation of the truncated density.
//!
//! With `a = √t(α + 1/α)` the log-density is
//!
//! ```text
//! ln 𝒢 = ln C_N + N·orderN(α) + orderOne(α)
//!      + Σ_{m≥1} N^{-m} ( -B_{m+1}/(m(m+1)) X^m + β I_{m+1}(α) ),
//! I_k(α) = -∫_α^∞ ω_1^{[k]}(α') dα',
//! C_N = N^{1-β/2} (β/2)^{1-β/2} Γ(β/2) / (2π √t).
//! ```

use num_traits::{One, Zero};

use crate::algebra::univariate::{alpha_parts, factor_coeffs, from_alpha_parts};
use crate::algebra::{partial_fractions, rat, Factor, FactoredRatFn, Rational, XPoly};
use crate::error::DeviationError;
use crate::loops::{wall_restriction, CorrelatorTable};
use crate::numeric::{self, F};

/// `-B_{m+1}/(m(m+1)) · X^m`.
pub fn bernoulli_term(m: usize) -> XPoly {
    assert!(m >= 1, "bernoulli_term needs m >= 1");
    let b = numeric::bernoulli(m + 1);
    let c = -b / Rational::from_integer(((m * (m + 1)) as i64).into());
    XPoly::monomial(c, m as i32)
}

/// `-∫_α^∞ ω_1^{[k]}(α') dα'` as an exact rational function of `α`.
pub fn integrate_correction(
    k: usize,
    table: &CorrelatorTable,
) -> Result<FactoredRatFn, DeviationError> {
    let c = table
        .get(1, k)
        .ok_or(crate::error::RecursionError::MissingDependency { n: 1, k })?;
    let w = wall_restriction(c)?;
    antiderivative_at_infinity(&w, k)
}

/// `-∫_α^∞ f` for an α-only `f` decaying at least like `α^{-2}`.
fn antiderivative_at_infinity(f: &FactoredRatFn, k: usize) -> Result<FactoredRatFn, DeviationError> {
    let pf = partial_fractions(f)?;
    if pf.polynomial.iter().any(|c| !c.is_zero()) {
        return Err(DeviationError::Divergent(k));
    }
    let mut residue_sum = XPoly::zero();
    for t in &pf.terms {
        if t.power == 1 {
            if t.factor == Factor::AlphaSqPlus1 {
                residue_sum += &t.linear;
            } else {
                residue_sum += &t.constant;
            }
        }
    }
    if !residue_sum.is_zero() {
        return Err(DeviationError::Divergent(k));
    }
    let mut parts = Vec::new();
    for t in &pf.terms {
        if t.power == 1 {
            return Err(DeviationError::LogTermPresent(k));
        }
        let j = Rational::from_integer((t.power as i64 - 1).into());
        if t.factor == Factor::AlphaSqPlus1 {
            if !t.constant.is_zero() {
                return Err(DeviationError::LogTermPresent(k));
            }
            // ∫_α^∞ c α'/(α'²+1)^p = c/(2(p-1)(α²+1)^{p-1})
            let c = t.linear.scale(&(Rational::one() / (j.clone() * rat(2, 1))));
            parts.push(from_alpha_parts(0, &[-c], &[(t.factor, t.power - 1)])?);
        } else {
            // ∫_α^∞ c/(α'-r)^p = c/((p-1)(α-r)^{p-1})
            let c = t.constant.scale(&j.recip());
            parts.push(from_alpha_parts(0, &[-c], &[(t.factor, t.power - 1)])?);
        }
    }
    Ok(FactoredRatFn::sum(parts.iter()))
}

/// Sum of `coefficient · rational function of α` plus
/// `coefficient · ln(monic polynomial in α)` terms.
#[derive(Clone, Debug, PartialEq)]
pub struct ClosedForm {
    pub rational_terms: Vec<(XPoly, FactoredRatFn)>,
    /// Log arguments as monic polynomials, lowest power first.
    pub log_terms: Vec<(XPoly, Vec<Rational>)>,
}

impl ClosedForm {
    /// `d/dα` as a list of `coefficient · rational function` terms.
    pub fn derivative(&self) -> Result<Vec<(XPoly, FactoredRatFn)>, DeviationError> {
        let mut out = Vec::new();
        for (c, f) in &self.rational_terms {
            out.push((c.clone(), f.derivative(crate::algebra::Var::Alpha)?));
        }
        for (c, p) in &self.log_terms {
            let (num, den) = log_derivative(p)?;
            out.push((c.clone(), from_alpha_parts(0, &num, &den)?));
        }
        Ok(out)
    }

    /// Numeric value at `α > 1` for `X = x`.
    pub fn eval(&self, alpha: &F, x: &Rational) -> F {
        let mut acc = numeric::from_i64(0);
        for (c, f) in &self.rational_terms {
            acc += numeric::from_rational(&c.eval(x)) * eval_alpha(f, alpha, x);
        }
        for (c, p) in &self.log_terms {
            let v = horner_rat(p, alpha);
            acc += numeric::from_rational(&c.eval(x)) * v.ln();
        }
        acc
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "rational_terms": self.rational_terms.iter().map(|(c, f)| serde_json::json!({
                "coeff": c.to_json(),
                "function": f.to_json(),
            })).collect::<Vec<_>>(),
            "log_terms": self.log_terms.iter().map(|(c, p)| serde_json::json!({
                "coeff": c.to_json(),
                "argument": p.iter().rev().map(crate::algebra::rational::fmt_rational).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
        })
    }
}

/// `p'/p` for a monic product of allowed α-factors.
fn log_derivative(p: &[Rational]) -> Result<(Vec<XPoly>, Vec<(Factor, u32)>), DeviationError> {
    let factor = [
        Factor::Alpha,
        Factor::AlphaMinus1,
        Factor::AlphaPlus1,
        Factor::AlphaSqPlus1,
    ]
    .into_iter()
    .find(|f| factor_coeffs(*f) == p)
    .ok_or_else(|| {
        DeviationError::InvalidParameter("log argument is not an allowed factor".into())
    })?;
    let dp: Vec<XPoly> = p
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| XPoly::constant(c * Rational::from_integer((i as i64).into())))
        .collect();
    Ok((dp, vec![(factor, 1)]))
}

fn horner_rat(p: &[Rational], x: &F) -> F {
    let mut acc = numeric::from_i64(0);
    for c in p.iter().rev() {
        acc = acc * x + numeric::from_rational(c);
    }
    acc
}

/// Value of an α-only function at a real `α` for `X = x`.
pub fn eval_alpha(f: &FactoredRatFn, alpha: &F, x: &Rational) -> F {
    let (num, den) = alpha_parts(f).expect("alpha-only function");
    let coeffs: Vec<Rational> = num.iter().map(|c| c.eval(x)).collect();
    let mut v = horner_rat(&coeffs, alpha);
    for (fac, e) in den {
        let d = horner_rat(&factor_coeffs(fac), alpha);
        for _ in 0..e {
            v /= &d;
        }
    }
    v
}

fn alpha_fn(src: &str) -> FactoredRatFn {
    FactoredRatFn::parse(0, src).expect("closed form parses")
}

/// The `N¹` and `N⁰` exponent terms as functions of `α`:
/// `orderN = -β(α² - α^{-2})/4 + β ln α` and
/// `orderOne = (1 - 3β/2) ln((α²-1)/α) + (β/2 - 1) ln α`.
pub fn closed_forms_low_orders() -> (ClosedForm, ClosedForm) {
    let beta = XPoly::beta();
    let order_n = ClosedForm {
        rational_terms: vec![(beta.clone(), alpha_fn("-(a^4-1)/(4*a^2)"))],
        log_terms: vec![(beta.clone(), vec![rat(0, 1), rat(1, 1)])],
    };
    let one_minus = &XPoly::one() - &beta.scale(&rat(3, 2));
    let log_alpha = &(&beta.scale(&rat(1, 2)) - &XPoly::one()) - &one_minus;
    let order_one = ClosedForm {
        rational_terms: vec![],
        log_terms: vec![
            (one_minus.clone(), vec![rat(-1, 1), rat(1, 1)]),
            (one_minus, vec![rat(1, 1), rat(1, 1)]),
            (log_alpha, vec![rat(0, 1), rat(1, 1)]),
        ],
    };
    (order_n, order_one)
}

/// Combines `coefficient · function` terms into one function after
/// multiplying by `X^shift` (which must clear all negative powers of `X`).
pub fn collect_terms(
    terms: &[(XPoly, FactoredRatFn)],
    shift: i32,
) -> Result<FactoredRatFn, DeviationError> {
    let mut parts = Vec::new();
    for (c, f) in terms {
        let nz = f.nz();
        parts.push(f.mul(&FactoredRatFn::from_xpoly(nz, &c.shift(shift))?));
    }
    Ok(FactoredRatFn::sum(parts.iter()))
}

/// The constant in front of the exponential, in both the exact (Selberg)
/// and the large-`N` (Stirling) forms.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactPrefactor;

impl ExactPrefactor {
    /// `Γ(β/2) / (√(2π) Γ(1 + Nβ/2)) · (Nβ/2)^{(βN + 3 - β)/2}` times the
    /// `N`-linear factor `e^{-Nβ/2}` that the Stirling form moves into the
    /// exponent, so that the two forms are directly comparable.
    pub fn selberg(n: u64, beta: &Rational) -> F {
        let b = numeric::from_rational(beta);
        let nn = numeric::from_i64(n as i64);
        let half = numeric::from_rational(&rat(1, 2));
        let m = &nn * &b * &half;
        let one = numeric::from_i64(1);
        let expo = (&b * &nn + numeric::from_i64(3) - &b) * &half;
        let ln = numeric::ln_gamma(&(&b * &half)) - (numeric::pi() * numeric::from_i64(2)).ln() * &half
            - numeric::ln_gamma(&(&one + &m))
            + m.ln() * expo
            - &m;
        ln.exp()
    }

    /// `Γ(β/2)/(2π) (Nβ/2)^{1-β/2} exp(Σ_{m ≤ order} N^{-m} B-term)`.
    pub fn stirling(n: u64, beta: &Rational, order: usize) -> F {
        let b = numeric::from_rational(beta);
        let nn = numeric::from_i64(n as i64);
        let half = numeric::from_rational(&rat(1, 2));
        let m = &nn * &b * &half;
        let one = numeric::from_i64(1);
        let x = rat(2, 1) / beta;
        let mut ln = numeric::ln_gamma(&(&b * &half)) - (numeric::pi() * numeric::from_i64(2)).ln()
            + m.ln() * (&one - &b * &half);
        for k in 1..=order {
            let c = bernoulli_term(k).eval(&x);
            ln += numeric::from_rational(&c) / numeric::from_i64(n.pow(k as u32) as i64);
        }
        ln.exp()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "exact": "Gamma(beta/2)/(sqrt(2*pi)*Gamma(1+N*beta/2)) * (N*beta/2)^((beta*N+3-beta)/2) * t^((beta-1-beta*N)/2) * a^((N-1)*beta) * exp(-N*beta*a^2/(4*t))",
            "large_n": "N^(1-beta/2) * (beta/2)^(1-beta/2) * Gamma(beta/2) / (2*pi*sqrt(t))",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Correction {
    pub m: usize,
    pub bernoulli: XPoly,
    /// `-∫_α^∞ ω_1^{[m+1]}`; enters the exponent multiplied by `β`.
    pub integral: FactoredRatFn,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DeviationExpansion {
    pub prefactor: ExactPrefactor,
    pub order_n: ClosedForm,
    pub order_one: ClosedForm,
    pub corrections: Vec<Correction>,
}

impl DeviationExpansion {
    pub fn order(&self) -> usize {
        self.corrections.len()
    }

    /// All coefficients evaluated at `X = x`.
    pub fn specialize(&self, x: &Rational) -> Self {
        let cf = |c: &ClosedForm| ClosedForm {
            rational_terms: c
                .rational_terms
                .iter()
                .map(|(p, f)| (XPoly::constant(p.eval(x)), f.specialize_x(x)))
                .collect(),
            log_terms: c
                .log_terms
                .iter()
                .map(|(p, l)| (XPoly::constant(p.eval(x)), l.clone()))
                .collect(),
        };
        Self {
            prefactor: ExactPrefactor,
            order_n: cf(&self.order_n),
            order_one: cf(&self.order_one),
            corrections: self
                .corrections
                .iter()
                .map(|c| Correction {
                    m: c.m,
                    bernoulli: XPoly::constant(c.bernoulli.eval(x)),
                    integral: c.integral.specialize_x(x),
                })
                .collect(),
        }
    }

    /// Exponent coefficient of `N^{-m}` as a numeric value.
    pub fn correction_value(&self, m: usize, alpha: &F, x: &Rational) -> F {
        let c = &self.corrections[m - 1];
        let beta = rat(2, 1) / x;
        numeric::from_rational(&c.bernoulli.eval(x))
            + numeric::from_rational(&beta) * eval_alpha(&c.integral, alpha, x)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "kind": "deviation",
            "order": self.order(),
            "prefactor": self.prefactor.to_json(),
            "order_n": self.order_n.to_json(),
            "order_one": self.order_one.to_json(),
            "corrections": self.corrections.iter().map(|c| serde_json::json!({
                "m": c.m,
                "bernoulli": c.bernoulli.to_json(),
                "integral": c.integral.to_json(),
            })).collect::<Vec<_>>(),
        })
    }
}

pub fn assemble_deviation(
    order: usize,
    table: &CorrelatorTable,
) -> Result<DeviationExpansion, DeviationError> {
    let (order_n, order_one) = closed_forms_low_orders();
    let mut corrections = Vec::with_capacity(order);
    for m in 1..=order {
        corrections.push(Correction {
            m,
            bernoulli: bernoulli_term(m),
            integral: integrate_correction(m + 1, table)?,
        });
    }
    Ok(DeviationExpansion {
        prefactor: ExactPrefactor,
        order_n,
        order_one,
        corrections,
    })
}

/// `α = (a + √(a² - 4t)) / (2√t)`.
pub fn alpha_of(a: &F, t: &F) -> F {
    let disc = a * a - numeric::from_i64(4) * t;
    (a + disc.sqrt()) / (numeric::from_i64(2) * t.sqrt())
}

/// Large-deviation rate `Φ(α) = (α² - α^{-2})/4 - ln α`.
pub fn rate(alpha: &F) -> F {
    let a2 = alpha * alpha;
    (&a2 - numeric::from_i64(1) / &a2) / numeric::from_i64(4) - alpha.ln()
}

#[derive(Clone, Debug)]
pub struct DensityValue {
    pub value: F,
    pub ln_value: F,
    /// Magnitude of the last included `N^{-m}` exponent term.
    pub last_term: f64,
}

fn check_params(n: u64, beta: &Rational, t: &Rational, a: f64) -> Result<(), DeviationError> {
    if n < 2 {
        return Err(DeviationError::InvalidParameter("N must be at least 2".into()));
    }
    if *beta <= Rational::zero() || *t <= Rational::zero() {
        return Err(DeviationError::InvalidParameter(
            "beta and t must be positive".into(),
        ));
    }
    let edge = 2.0 * crate::algebra::rational::to_f64(t).sqrt();
    if !(a > edge) || !a.is_finite() {
        return Err(DeviationError::OutsideRegime { a, edge });
    }
    Ok(())
}

/// Logarithm of the truncated density at `a`.
pub fn ln_density(
    n: u64,
    beta: &Rational,
    t: &Rational,
    a: &F,
    order: usize,
    exp: &DeviationExpansion,
) -> Result<(F, f64), DeviationError> {
    if order > exp.order() {
        return Err(DeviationError::OrderTooHigh {
            requested: order,
            available: exp.order(),
        });
    }
    let tf = numeric::from_rational(t);
    let alpha = alpha_of(a, &tf);
    let x = rat(2, 1) / beta;
    let b = numeric::from_rational(beta);
    let nn = numeric::from_i64(n as i64);
    let half = numeric::from_rational(&rat(1, 2));
    let one = numeric::from_i64(1);
    let mut ln = nn.ln() * (&one - &b * &half) - tf.ln() * &half
        + (&b * &half).ln() * (&one - &b * &half)
        + numeric::ln_gamma(&(&b * &half))
        - (numeric::pi() * numeric::from_i64(2)).ln();
    ln += &nn * exp.order_n.eval(&alpha, &x);
    ln += exp.order_one.eval(&alpha, &x);
    let mut last = 0.0;
    let mut npow = one.clone();
    for m in 1..=order {
        npow *= &nn;
        let term = exp.correction_value(m, &alpha, &x) / &npow;
        last = numeric::to_f64(&term).abs();
        ln += term;
    }
    Ok((ln, last))
}

pub fn eval_density(
    n: u64,
    beta: &Rational,
    t: &Rational,
    a: f64,
    order: usize,
    exp: &DeviationExpansion,
) -> Result<DensityValue, DeviationError> {
    check_params(n, beta, t, a)?;
    let (ln_value, last_term) = ln_density(n, beta, t, &numeric::from_f64(a), order, exp)?;
    Ok(DensityValue {
        value: ln_value.exp(),
        ln_value,
        last_term,
    })
}

/// `μ[λ_max > a] = ∫_a^∞ 𝒢` by double-exponential quadrature of the
/// truncated density. Returns the probability and its logarithm.
pub fn predicted_tail(
    n: u64,
    beta: &Rational,
    t: &Rational,
    a: f64,
    order: usize,
    exp: &DeviationExpansion,
) -> Result<(f64, f64), DeviationError> {
    check_params(n, beta, t, a)?;
    let (ln0, _) = ln_density(n, beta, t, &numeric::from_f64(a), order, exp)?;
    let ln0f = numeric::to_f64(&ln0);
    let ratio = |y: f64| -> f64 {
        match ln_density(n, beta, t, &numeric::from_f64(y), order, exp) {
            Ok((l, _)) => (numeric::to_f64(&l) - ln0f).exp(),
            Err(_) => 0.0,
        }
    };
    // extend the upper limit until the density has dropped by e^{-60}
    let mut width = 0.25;
    while ratio(a + width) > (-60f64).exp() && width < 1e3 {
        width *= 2.0;
    }
    let out = quadrature::double_exponential::integrate(ratio, a, a + width, 1e-10);
    let ln_p = ln0f + out.integral.ln();
    Ok((ln_p.exp(), ln_p))
}
