//! Right tail of the Tracy–Widom β laws from the edge behaviour of the
//! one-point correlators.
//!
//! Near the edge `ω_1^{[m+1]}(α) = -R̆_m(X)/(2^{p_m+1}(α-1)^{3m+1}) + …`.
//! With `y = s^{-3/2}` the complement and the density read
//!
//! ```text
//! 1 - TW_β(s) = Γ(β/2)/((4β)^{β/2} 2π) s^{-3β/4} e^{-2βs^{3/2}/3} exp(Σ X^{-1} R_m y^m)
//! TW_β'(s)    = Γ(1+β/2)/((4β)^{β/2} π) s^{1/2-3β/4} e^{-2βs^{3/2}/3} exp(Σ X^{-1} R̆_m/(2^{p_m} 3m) y^m)
//! ```

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};

use crate::algebra::rational::{fmt_rational, is_dyadic, pow2, two_adic};
use crate::algebra::univariate::rat_taylor_shift;
use crate::algebra::{laurent_at, rat, FactoredRatFn, Rational, XPoly};
use crate::deviation::{ClosedForm, DeviationExpansion};
use crate::error::TailError;
use crate::loops::{wall_restriction, CorrelatorTable};
use crate::numeric::{self, F};

#[derive(Clone, Debug, PartialEq)]
pub struct BreveEntry {
    pub m: usize,
    pub p: u32,
    pub poly: XPoly,
}

impl BreveEntry {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({"m": self.m, "p": self.p, "poly": self.poly.to_json()})
    }
}

/// Leading edge data of `ω_1^{[m+1]}`: substitute `z = α`, then expand at
/// `α = 1`.
pub fn breve_extract(m: usize, table: &CorrelatorTable) -> Result<BreveEntry, TailError> {
    let k = m + 1;
    let c = table
        .get(1, k)
        .ok_or(crate::error::RecursionError::MissingDependency { n: 1, k })?;
    let w = wall_restriction(c)?;
    let series = laurent_at(&w, &Rational::one(), 1)?;
    let expected = -(3 * m as i64 + 1);
    let lead = match series.leading() {
        Some(l) if series.min_exponent == expected => l.clone(),
        _ => {
            return Err(TailError::WrongPoleOrder {
                k,
                found: -series.min_exponent,
                expected: -expected,
            })
        }
    };
    if lead.terms().any(|(_, c)| !is_dyadic(c)) {
        return Err(TailError::NonDyadicDenominator(k));
    }
    let v = lead.terms().map(|(_, c)| two_adic(c)).min().unwrap();
    let p = -v - 1;
    if p < 0 {
        return Err(TailError::NonDyadicDenominator(k));
    }
    let poly = lead.scale(&-pow2(-v));
    Ok(BreveEntry {
        m,
        p: p as u32,
        poly,
    })
}

/// Density exponent coefficient `R̆_m/(2^{p_m} 3m)` (without the `β/2`).
pub fn breve_coefficient(e: &BreveEntry) -> XPoly {
    e.poly.scale(&(pow2(-(e.p as i64)) / Rational::from_integer((3 * e.m as i64).into())))
}

fn check_contiguous(entries: &[BreveEntry]) -> Result<(), TailError> {
    if entries.iter().enumerate().any(|(i, e)| e.m != i + 1) {
        return Err(TailError::NonContiguous);
    }
    Ok(())
}

/// Solves the triangular system for `R_1..R_M`:
/// `R_m = R̆_m/(2^{p_m} 3m) - X [w^m] ln(1 - Y)`,
/// `Y = -(3/4)(w + Σ_{i≥2} (i-1) R_{i-1} w^i)`.
pub fn breve_to_r(entries: &[BreveEntry]) -> Result<Vec<XPoly>, TailError> {
    check_contiguous(entries)?;
    let big_m = entries.len();
    let mut r: Vec<XPoly> = Vec::with_capacity(big_m);
    for (idx, e) in entries.iter().enumerate() {
        let m = idx + 1;
        // Y through w^m; only R_1..R_{m-1} enter
        let mut y = vec![XPoly::zero(); m + 1];
        y[1] = XPoly::constant(rat(-3, 4));
        for i in 2..=m {
            y[i] = r[i - 2].scale(&rat(-3 * (i as i64 - 1), 4));
        }
        // -ln(1 - Y) = Σ_j Y^j / j
        let mut acc = XPoly::zero();
        let mut pow = y.clone();
        for j in 1..=m {
            acc += &pow[m].scale(&rat(1, j as i64));
            pow = series_mul(&pow, &y, m);
        }
        r.push(&breve_coefficient(e) + &acc.shift(1));
    }
    debug_assert_eq!(r.len(), big_m);
    Ok(r)
}

/// Truncated product of power series with `X`-polynomial coefficients.
pub fn series_mul(a: &[XPoly], b: &[XPoly], order: usize) -> Vec<XPoly> {
    let mut out = vec![XPoly::zero(); order + 1];
    for (i, x) in a.iter().enumerate().take(order + 1) {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(order + 1 - i) {
            out[i + j] += &(x * y);
        }
    }
    out
}

/// `exp(e)` for a series with `e[0] = 0`.
pub fn series_exp(e: &[XPoly]) -> Vec<XPoly> {
    let n = e.len();
    let mut c = vec![XPoly::zero(); n];
    if n == 0 {
        return c;
    }
    c[0] = XPoly::one();
    for k in 1..n {
        let mut acc = XPoly::zero();
        for j in 1..=k {
            acc += &(&e[j] * &c[k - j]).scale(&Rational::from_integer((j as i64).into()));
        }
        c[k] = acc.scale(&rat(1, k as i64));
    }
    c
}

/// Inverse of [`series_exp`] for a series with `c[0] = 1`.
pub fn series_log(c: &[XPoly]) -> Vec<XPoly> {
    let n = c.len();
    let mut e = vec![XPoly::zero(); n];
    for k in 1..n {
        let mut acc = c[k].scale(&Rational::from_integer((k as i64).into()));
        for j in 1..k {
            acc -= &(&e[j] * &c[k - j]).scale(&Rational::from_integer((j as i64).into()));
        }
        e[k] = acc.scale(&rat(1, k as i64));
    }
    e
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TailKind {
    Complement,
    Density,
}

/// Symbolic constant `Γ(β/2)^{gamma} 2^{two} β^{beta} π^{pi}` with
/// exponents in `X`.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct PrefactorExponents {
    pub gamma: XPoly,
    pub two: XPoly,
    pub beta: XPoly,
    pub pi: XPoly,
}

impl PrefactorExponents {
    pub fn for_kind(kind: TailKind) -> Self {
        // (4β)^{-β/2} = 2^{-β} β^{-β/2}; Γ(1+β/2) = (β/2) Γ(β/2)
        let b = XPoly::beta();
        let half_b = b.scale(&rat(1, 2));
        match kind {
            TailKind::Complement => Self {
                gamma: XPoly::one(),
                two: &(-&b) - &XPoly::one(),
                beta: -&half_b,
                pi: XPoly::constant(rat(-1, 1)),
            },
            TailKind::Density => Self {
                gamma: XPoly::one(),
                two: &(-&b) - &XPoly::one(),
                beta: &XPoly::one() - &half_b,
                pi: XPoly::constant(rat(-1, 1)),
            },
        }
    }

    pub fn ln_value(&self, beta: &Rational) -> F {
        let x = rat(2, 1) / beta;
        let b = numeric::from_rational(beta);
        let half = numeric::from_rational(&rat(1, 2));
        numeric::ln_gamma(&(&b * &half)) * numeric::from_rational(&self.gamma.eval(&x))
            + numeric::from_i64(2).ln() * numeric::from_rational(&self.two.eval(&x))
            + b.ln() * numeric::from_rational(&self.beta.eval(&x))
            + numeric::pi().ln() * numeric::from_rational(&self.pi.eval(&x))
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "gamma_half_beta": self.gamma.to_json(),
            "two": self.two.to_json(),
            "beta": self.beta.to_json(),
            "pi": self.pi.to_json(),
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TailExpansion {
    pub entries: Vec<BreveEntry>,
    /// `R_1..R_M`; the complement exponent coefficients are `X^{-1} R_m`.
    pub r: Vec<XPoly>,
    /// Complement exponent coefficients, index `m` (index 0 unused, zero).
    pub complement_exponent: Vec<XPoly>,
    pub density_exponent: Vec<XPoly>,
    /// Expanded series `1 + c_1 y + …`, index = power of `y = s^{-3/2}`.
    pub complement_expanded: Vec<XPoly>,
    pub density_expanded: Vec<XPoly>,
}

impl TailExpansion {
    pub fn order(&self) -> usize {
        self.entries.len()
    }

    /// Rate coefficient of `s^{3/2}`: `-2β/3`.
    pub fn rate() -> XPoly {
        XPoly::beta().scale(&rat(-2, 3))
    }

    /// Power of `s` in front: `-3β/4` or `1/2 - 3β/4`.
    pub fn log_power(kind: TailKind) -> XPoly {
        let base = XPoly::beta().scale(&rat(-3, 4));
        match kind {
            TailKind::Complement => base,
            TailKind::Density => &base + &XPoly::constant(rat(1, 2)),
        }
    }

    pub fn exponent(&self, kind: TailKind) -> &[XPoly] {
        match kind {
            TailKind::Complement => &self.complement_exponent,
            TailKind::Density => &self.density_exponent,
        }
    }

    pub fn expanded(&self, kind: TailKind) -> &[XPoly] {
        match kind {
            TailKind::Complement => &self.complement_expanded,
            TailKind::Density => &self.density_expanded,
        }
    }

    /// Canonical JSON; `beta = None` keeps coefficients symbolic in `X`.
    pub fn to_json(&self, beta: Option<&Rational>, order: usize) -> serde_json::Value {
        let order = order.min(self.order());
        let x = beta.map(|b| rat(2, 1) / b);
        let coeff = |p: &XPoly| -> (&'static str, serde_json::Value) {
            match &x {
                Some(x) => ("coeff", serde_json::Value::String(fmt_rational(&p.eval(x)))),
                None => ("poly", p.to_json()),
            }
        };
        let list = |v: &[XPoly], start: usize| -> Vec<serde_json::Value> {
            (start..=order)
                .map(|m| {
                    let (key, val) = coeff(&v[m]);
                    serde_json::json!([["m", m], [key, val]])
                })
                .collect()
        };
        let prefactor = |kind: TailKind| {
            let pe = PrefactorExponents::for_kind(kind);
            let mut v = pe.to_json();
            let (key, val) = coeff(&Self::log_power(kind));
            v["log_power"] = serde_json::json!({key: val});
            let (key, val) = coeff(&Self::rate());
            v["rate"] = serde_json::json!({key: val});
            v
        };
        serde_json::json!({
            "kind": "tail",
            "beta": beta.map_or("sym".to_string(), fmt_rational),
            "order": order,
            "prefactor": prefactor(TailKind::Complement),
            "exponent_terms": list(&self.complement_exponent, 1),
            "expanded_terms": list(&self.complement_expanded, 1),
            "r": (1..=order).map(|m| serde_json::json!({"m": m, "poly": self.r[m - 1].to_json()})).collect::<Vec<_>>(),
            "density": {
                "prefactor": prefactor(TailKind::Density),
                "exponent_terms": list(&self.density_exponent, 1),
                "expanded_terms": list(&self.density_expanded, 1),
            },
        })
    }
}

pub fn assemble_tail(big_m: usize, entries: &[BreveEntry]) -> Result<TailExpansion, TailError> {
    if entries.len() < big_m {
        return Err(TailError::OrderTooHigh {
            requested: big_m,
            available: entries.len(),
        });
    }
    let entries = entries[..big_m].to_vec();
    let r = breve_to_r(&entries)?;
    let mut complement_exponent = vec![XPoly::zero(); big_m + 1];
    let mut density_exponent = vec![XPoly::zero(); big_m + 1];
    for m in 1..=big_m {
        complement_exponent[m] = r[m - 1].shift(-1);
        density_exponent[m] = breve_coefficient(&entries[m - 1]).shift(-1);
    }
    let complement_expanded = series_exp(&complement_exponent);
    let density_expanded = series_exp(&density_exponent);
    Ok(TailExpansion {
        entries,
        r,
        complement_exponent,
        density_exponent,
        complement_expanded,
        density_expanded,
    })
}

/// `prefactor · s^{power} · e^{rate} · Σ_{j≤order} c_j s^{-3j/2}`; also
/// returns the size of the last included term relative to the leading one.
pub fn eval_tail_f(
    s: f64,
    beta: &Rational,
    order: usize,
    te: &TailExpansion,
    kind: TailKind,
) -> Result<(F, f64), TailError> {
    if !(s > 0.0) || !s.is_finite() {
        return Err(TailError::NonPositiveS);
    }
    if order > te.order() {
        return Err(TailError::OrderTooHigh {
            requested: order,
            available: te.order(),
        });
    }
    let x = rat(2, 1) / beta;
    let sf = numeric::from_f64(s);
    let ln_s = sf.ln();
    let y = numeric::from_i64(1) / (&sf * sf.sqrt());
    let coeffs = te.expanded(kind);
    let mut sum = numeric::from_i64(0);
    let mut ypow = numeric::from_i64(1);
    let mut last = numeric::from_i64(1);
    for c in coeffs.iter().take(order + 1) {
        last = numeric::from_rational(&c.eval(&x)) * &ypow;
        sum += &last;
        ypow *= &y;
    }
    let ln_pref = PrefactorExponents::for_kind(kind).ln_value(beta);
    let ln_rest = numeric::from_rational(&TailExpansion::log_power(kind).eval(&x)) * &ln_s
        + numeric::from_rational(&TailExpansion::rate().eval(&x)) * &sf * sf.sqrt();
    let value = (ln_pref + ln_rest).exp() * sum;
    Ok((value, numeric::to_f64(&last).abs()))
}

pub fn eval_tail(
    s: f64,
    beta: &Rational,
    order: usize,
    te: &TailExpansion,
    kind: TailKind,
) -> Result<(f64, f64), TailError> {
    let (v, last) = eval_tail_f(s, beta, order, te, kind)?;
    Ok((numeric::to_f64(&v), last))
}

/// Key `(power of u, power of σ, ln u present, ln σ present)`.
type Key = (i32, i32, u8, u8);

/// Terms of the double-scaling substitution `(α-1)²/α = u² σ²` with
/// `u = N^{-1/3}` and `σ = √s`; positive powers of `u` are dropped.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ScalingTerms {
    pub terms: BTreeMap<Key, XPoly>,
    /// Logarithms of constants, keyed by `"2"`, `"beta"`, `"pi"`,
    /// `"gamma"` (for `Γ(β/2)`) or a rational.
    pub consts: BTreeMap<String, XPoly>,
}

impl ScalingTerms {
    fn add(&mut self, key: Key, c: XPoly) {
        if key.0 > 0 || c.is_zero() {
            return;
        }
        let e = self.terms.entry(key).or_default();
        *e += &c;
        if e.is_zero() {
            self.terms.remove(&key);
        }
    }

    fn add_const(&mut self, name: &str, c: XPoly) {
        let e = self.consts.entry(name.to_string()).or_default();
        *e += &c;
        if e.is_zero() {
            self.consts.remove(name);
        }
    }

    pub fn get(&self, key: Key) -> XPoly {
        self.terms.get(&key).cloned().unwrap_or_default()
    }

    pub fn constant(&self, name: &str) -> XPoly {
        self.consts.get(name).cloned().unwrap_or_default()
    }
}

/// `U(τ) = ε/τ`, the solution of `U² = 1 + τU`, through `τ^n`.
fn edge_unit_series(n: usize) -> Vec<Rational> {
    let mut u = vec![Rational::zero(); n + 1];
    u[0] = Rational::one();
    for k in 1..=n {
        let mut acc = u[k - 1].clone();
        for i in 1..k {
            acc -= &u[i] * &u[k - i];
        }
        u[k] = acc / rat(2, 1);
    }
    u
}

fn rmul(a: &[Rational], b: &[Rational], n: usize) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); n + 1];
    for (i, x) in a.iter().enumerate().take(n + 1) {
        for (j, y) in b.iter().enumerate().take(n + 1 - i) {
            out[i + j] += x * y;
        }
    }
    out
}

fn rinv(a: &[Rational], n: usize) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); n + 1];
    out[0] = a[0].recip();
    for k in 1..=n {
        let mut acc = Rational::zero();
        for j in 1..=k.min(a.len() - 1) {
            acc += &a[j] * &out[k - j];
        }
        out[k] = -acc * &out[0];
    }
    out
}

fn rpow(a: &[Rational], e: i64, n: usize) -> Vec<Rational> {
    let base = if e < 0 { rinv(a, n) } else { a[..a.len().min(n + 1)].to_vec() };
    let mut out = vec![Rational::zero(); n + 1];
    out[0] = Rational::one();
    for _ in 0..e.abs() {
        out = rmul(&out, &base, n);
    }
    out
}

/// `ln a` for `a[0] = 1`, through `τ^n`.
fn rlog(a: &[Rational], n: usize) -> Vec<Rational> {
    let mut e = vec![Rational::zero(); n + 1];
    let c: Vec<Rational> = (0..=n).map(|i| a.get(i).cloned().unwrap_or_default()).collect();
    for k in 1..=n {
        let mut acc = &c[k] * Rational::from_integer((k as i64).into());
        for j in 1..k {
            acc -= &e[j] * &c[k - j] * Rational::from_integer((j as i64).into());
        }
        e[k] = acc / Rational::from_integer((k as i64).into());
    }
    e
}

/// Adds `coef · f(α)` multiplied by `u^{ushift}`.
fn expand_rational(
    out: &mut ScalingTerms,
    coef: &XPoly,
    f: &FactoredRatFn,
    ushift: i32,
) -> Result<(), TailError> {
    let dmax = -ushift;
    let probe = laurent_at(f, &Rational::one(), 1)?;
    let j0 = probe.min_exponent;
    if j0 > dmax as i64 {
        return Ok(());
    }
    let nterms = (dmax as i64 - j0 + 1) as usize;
    let series = laurent_at(f, &Rational::one(), nterms)?;
    let u = edge_unit_series(nterms);
    for (idx, a) in series.coeffs.iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        let j = j0 + idx as i64;
        let room = (dmax as i64 - j) as usize;
        let uj = rpow(&u, j, room);
        for (d, w) in uj.iter().enumerate() {
            let deg = (j + d as i64) as i32;
            out.add((ushift + deg, deg, 0, 0), (coef * a).scale(w));
        }
    }
    Ok(())
}

/// Adds `coef · ln p(α)` multiplied by `u^{ushift}`.
fn expand_log(
    out: &mut ScalingTerms,
    coef: &XPoly,
    p: &[Rational],
    ushift: i32,
) -> Result<(), TailError> {
    if ushift > 0 {
        return Ok(());
    }
    let dmax = (-ushift) as usize;
    let shifted = rat_taylor_shift(p, &Rational::one());
    let ord = shifted.iter().take_while(|c| c.is_zero()).count();
    let lead = shifted[ord].clone();
    if lead.is_negative() {
        return Err(TailError::Algebra(crate::error::AlgebraError::NotRepresentable(
            "logarithm of a negative constant".into(),
        )));
    }
    if lead != Rational::one() {
        if ushift != 0 {
            return Err(TailError::ResidualNPower {
                power: ushift as i64,
                coeff: format!("({coef})*ln({lead})"),
            });
        }
        let v = two_adic(&lead);
        if pow2(v) == lead {
            out.add_const("2", coef.scale(&Rational::from_integer(v.into())));
        } else {
            out.add_const(&fmt_rational(&lead), coef.clone());
        }
    }
    let u = edge_unit_series(dmax);
    if ord > 0 {
        let c = coef.scale(&Rational::from_integer((ord as i64).into()));
        out.add((ushift, 0, 1, 0), c.clone());
        out.add((ushift, 0, 0, 1), c.clone());
        for (d, w) in rlog(&u, dmax).iter().enumerate().skip(1) {
            out.add((ushift + d as i32, d as i32, 0, 0), c.scale(w));
        }
    }
    // ln(rest(ε)) with rest(0) = 1 and ε = τU(τ)
    let rest: Vec<Rational> = shifted[ord..].iter().map(|c| c / &lead).collect();
    let eps: Vec<Rational> = std::iter::once(Rational::zero()).chain(u.iter().cloned()).take(dmax + 1).collect();
    let mut composed = vec![Rational::zero(); dmax + 1];
    let mut epow = vec![Rational::zero(); dmax + 1];
    epow[0] = Rational::one();
    for c in &rest {
        for (d, w) in epow.iter().enumerate() {
            composed[d] += c * w;
        }
        epow = rmul(&epow, &eps, dmax);
    }
    for (d, w) in rlog(&composed, dmax).iter().enumerate().skip(1) {
        out.add((ushift + d as i32, d as i32, 0, 0), coef.scale(w));
    }
    Ok(())
}

fn expand_closed_form(out: &mut ScalingTerms, cf: &ClosedForm, ushift: i32) -> Result<(), TailError> {
    for (c, f) in &cf.rational_terms {
        expand_rational(out, c, f, ushift)?;
    }
    for (c, p) in &cf.log_terms {
        expand_log(out, c, p, ushift)?;
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
pub struct DoubleScalingReport {
    /// Coefficient of `s^{3/2}` in the log-density.
    pub rate: XPoly,
    /// Coefficients of `ln s`.
    pub density_log_power: XPoly,
    pub complement_log_power: XPoly,
    pub density_prefactor: PrefactorExponents,
    pub complement_prefactor: PrefactorExponents,
    /// Net power of `u = N^{-1/3}` in `𝒢` before the `N^{-2/3}` rescaling.
    pub density_u_power: XPoly,
    /// Density exponent coefficients of `s^{-3m/2}`, index `m`.
    pub density_exponent: Vec<XPoly>,
    /// Leftover `u^0` terms other than the ones above (must be empty).
    pub stray: Vec<(Key, XPoly)>,
    /// The collected terms, for inspection.
    pub terms: ScalingTerms,
}

impl DoubleScalingReport {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "kind": "double_scaling",
            "rate": self.rate.to_json(),
            "density_log_power": self.density_log_power.to_json(),
            "complement_log_power": self.complement_log_power.to_json(),
            "density_prefactor": self.density_prefactor.to_json(),
            "complement_prefactor": self.complement_prefactor.to_json(),
            "density_u_power": self.density_u_power.to_json(),
            "density_exponent": (1..self.density_exponent.len()).map(|m| serde_json::json!({"m": m, "poly": self.density_exponent[m].to_json()})).collect::<Vec<_>>(),
            "stray_terms": self.stray.len(),
        })
    }
}

/// Substitutes `a = 2 + N^{-2/3}s` (`t = 1`) into the large-deviation
/// expansion, keeps the `N`-independent part and checks that all negative
/// powers of `N^{-1/3}` and all `ln N` terms cancel.
pub fn double_scaling_check(
    exp: &DeviationExpansion,
    big_m: usize,
) -> Result<DoubleScalingReport, TailError> {
    if big_m > exp.order() {
        return Err(TailError::OrderTooHigh {
            requested: big_m,
            available: exp.order(),
        });
    }
    let beta = XPoly::beta();
    let one = XPoly::one();
    let half_b = beta.scale(&rat(1, 2));
    let mut st = ScalingTerms::default();
    // ln C_N = (1 - β/2) ln N + (1 - β/2) ln(β/2) + ln Γ(β/2) - ln 2π
    let c = &one - &half_b;
    st.add((0, 0, 1, 0), c.scale(&rat(-3, 1)));
    st.add_const("beta", c.clone());
    st.add_const("2", -&c);
    st.add_const("2", XPoly::constant(rat(-1, 1)));
    st.add_const("pi", XPoly::constant(rat(-1, 1)));
    st.add_const("gamma", one.clone());
    expand_closed_form(&mut st, &exp.order_n, -3)?;
    expand_closed_form(&mut st, &exp.order_one, 0)?;
    for m in 1..=big_m {
        // the Bernoulli part sits at u^{3m} and drops out
        expand_rational(&mut st, &beta, &exp.corrections[m - 1].integral, 3 * m as i32)?;
    }
    let density_u_power = st.get((0, 0, 1, 0));
    // TW' = lim N^{-2/3} 𝒢 = lim u² 𝒢
    st.add((0, 0, 1, 0), XPoly::constant(rat(2, 1)));

    for (key, c) in &st.terms {
        if key.0 < 0 {
            return Err(TailError::ResidualNPower {
                power: key.0 as i64,
                coeff: format!("{c}"),
            });
        }
    }
    let lnu = st.get((0, 0, 1, 0));
    if !lnu.is_zero() {
        return Err(TailError::ResidualNPower {
            power: 0,
            coeff: format!("({lnu})*ln u"),
        });
    }
    let rate = st.get((0, 3, 0, 0));
    let density_log_power = st.get((0, 0, 0, 1)).scale(&rat(1, 2));
    let mut density_exponent = vec![XPoly::zero(); big_m + 1];
    for (m, slot) in density_exponent.iter_mut().enumerate().skip(1) {
        *slot = st.get((0, -3 * m as i32, 0, 0));
    }
    let stray: Vec<(Key, XPoly)> = st
        .terms
        .iter()
        .filter(|(k, _)| {
            !(**k == (0, 3, 0, 0)
                || **k == (0, 0, 0, 1)
                || (k.2 == 0 && k.3 == 0 && k.1 < 0 && k.1 % 3 == 0 && -k.1 / 3 <= big_m as i32))
        })
        .map(|(k, v)| (*k, v.clone()))
        .collect();
    let density_prefactor = PrefactorExponents {
        gamma: st.constant("gamma"),
        two: st.constant("2"),
        beta: st.constant("beta"),
        pi: st.constant("pi"),
    };
    // the complement is the density integrated from s to ∞: leading
    // factor 1/(β s^{1/2})
    let mut complement_prefactor = density_prefactor.clone();
    complement_prefactor.beta -= &one;
    let complement_log_power = &density_log_power - &XPoly::constant(rat(1, 2));
    Ok(DoubleScalingReport {
        rate,
        density_log_power,
        complement_log_power,
        density_prefactor,
        complement_prefactor,
        density_u_power,
        density_exponent,
        stray,
        terms: st,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn edge_series() {
        let u = edge_unit_series(3);
        assert_eq!(u, vec![rat(1, 1), rat(1, 2), rat(1, 8), rat(0, 1)]);
    }

    #[test]
    fn exp_log_round_trip() {
        let e = vec![XPoly::zero(), XPoly::from_ints(&[1, 2]), XPoly::constant(rat(3, 7)), XPoly::x()];
        let c = series_exp(&e);
        assert_eq!(series_log(&c), e);
    }

    #[test]
    fn r1_from_printed_breve() {
        let e = BreveEntry {
            m: 1,
            p: 3,
            poly: XPoly::from_ints(&[-39, 27, -5]),
        };
        let r = breve_to_r(&[e]).unwrap();
        assert_eq!(r[0], XPoly::from_ints(&[-39, 9, -5]).scale(&rat(1, 24)));
    }
}
