//! Multivariate rational functions with a factored denominator.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::factor::{Factor, Image};
use super::poly::{Mono, ZPoly, MAX_Z, NSLOTS, SLOT_ALPHA, SLOT_X};
use super::rational::{fmt_rational, Rational};
use super::xpoly::XPoly;
use crate::error::AlgebraError;

/// A variable of a rational function. `Z(i)` is 0-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Var {
    Z(usize),
    Alpha,
}

impl Var {
    pub fn slot(self) -> usize {
        match self {
            Var::Z(i) => i,
            Var::Alpha => SLOT_ALPHA,
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::Z(i) => write!(f, "z{}", i + 1),
            Var::Alpha => write!(f, "a"),
        }
    }
}

/// Right-hand side of a substitution.
#[derive(Clone, Debug, PartialEq)]
pub enum Binding {
    Var(Var),
    Value(Rational),
}

/// `scale * num / Π factor^exp`, with `num` primitive and positive-leading
/// and no denominator factor dividing `num`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactoredRatFn {
    nz: usize,
    scale: Rational,
    num: ZPoly,
    den: BTreeMap<Factor, u32>,
}

impl FactoredRatFn {
    pub fn zero(nz: usize) -> Self {
        assert!(nz <= MAX_Z, "at most {MAX_Z} z-variables are supported");
        Self {
            nz,
            scale: Rational::zero(),
            num: ZPoly::zero(),
            den: BTreeMap::new(),
        }
    }

    pub fn one(nz: usize) -> Self {
        Self::constant(nz, Rational::one())
    }

    pub fn constant(nz: usize, c: Rational) -> Self {
        Self::from_parts(nz, c, ZPoly::one(), BTreeMap::new())
    }

    pub fn from_xpoly(nz: usize, p: &XPoly) -> Result<Self, AlgebraError> {
        let mut out = Self::zero(nz);
        for (j, c) in p.terms() {
            if j < 0 {
                return Err(AlgebraError::NotRepresentable(format!(
                    "X^{j} in a numerator"
                )));
            }
            let t = Self::from_parts(
                nz,
                c.clone(),
                ZPoly::term(Mono::var(SLOT_X, j as u32), BigInt::one()),
                BTreeMap::new(),
            );
            out = out.add(&t);
        }
        Ok(out)
    }

    pub fn var(nz: usize, v: Var) -> Self {
        Self::from_parts(
            nz,
            Rational::one(),
            ZPoly::term(Mono::var(v.slot(), 1), BigInt::one()),
            BTreeMap::new(),
        )
    }

    /// The parameter `X = 2/β`.
    pub fn x(nz: usize) -> Self {
        Self::from_parts(
            nz,
            Rational::one(),
            ZPoly::term(Mono::var(SLOT_X, 1), BigInt::one()),
            BTreeMap::new(),
        )
    }

    /// `f^e` for an allowed factor; negative `e` puts it in the denominator.
    pub fn factor_pow(nz: usize, f: Factor, e: i32) -> Self {
        if e >= 0 {
            Self::from_parts(nz, Rational::one(), f.poly().pow(e as u32), BTreeMap::new())
        } else {
            Self::from_parts(
                nz,
                Rational::one(),
                ZPoly::one(),
                BTreeMap::from([(f, (-e) as u32)]),
            )
        }
    }

    pub fn from_parts(
        nz: usize,
        scale: Rational,
        num: ZPoly,
        den: BTreeMap<Factor, u32>,
    ) -> Self {
        assert!(nz <= MAX_Z, "at most {MAX_Z} z-variables are supported");
        Self { nz, scale, num, den }.normalize()
    }

    pub fn nz(&self) -> usize {
        self.nz
    }

    pub fn scale(&self) -> &Rational {
        &self.scale
    }

    pub fn numerator(&self) -> &ZPoly {
        &self.num
    }

    pub fn denominator(&self) -> &BTreeMap<Factor, u32> {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// Embeds into a space with more z-variables.
    pub fn with_nz(&self, nz: usize) -> Self {
        assert!(nz >= self.used_nz() && nz <= MAX_Z);
        let mut out = self.clone();
        out.nz = nz;
        out
    }

    /// One more than the largest z-slot actually used.
    pub fn used_nz(&self) -> usize {
        let from_num = (0..MAX_Z).rev().find(|&s| self.num.uses_slot(s)).map_or(0, |s| s + 1);
        let from_den = self
            .den
            .keys()
            .filter_map(|f| f.max_z_slot())
            .map(|s| s + 1)
            .max()
            .unwrap_or(0);
        from_num.max(from_den)
    }

    pub fn depends_on(&self, v: Var) -> bool {
        self.num.uses_slot(v.slot()) || self.den.keys().any(|f| f.uses_slot(v.slot()))
    }

    /// True when no z-variable occurs.
    pub fn is_alpha_only(&self) -> bool {
        self.used_nz() == 0
    }

    fn normalize(mut self) -> Self {
        if self.num.is_zero() || self.scale.is_zero() {
            return Self::zero(self.nz);
        }
        let mut den = std::mem::take(&mut self.den);
        for (f, e) in den.iter_mut() {
            let (m, c) = f.binomial();
            while *e > 0 {
                match self.num.div_binomial(m, c) {
                    Some(q) => {
                        self.num = q;
                        *e -= 1;
                    }
                    None => break,
                }
            }
        }
        den.retain(|_, e| *e > 0);
        self.den = den;
        self.fix_content()
    }

    fn fix_content(mut self) -> Self {
        let g = self.num.content();
        if !g.is_one() {
            self.num = self.num.div_int_exact(&g);
            self.scale *= Rational::from_integer(g);
        }
        if self.num.leading_is_negative() {
            self.num = self.num.neg();
            self.scale = -self.scale;
        }
        self
    }

    pub fn neg(&self) -> Self {
        let mut out = self.clone();
        out.scale = -out.scale;
        out
    }

    pub fn scale_by(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero(self.nz);
        }
        let mut out = self.clone();
        out.scale *= c;
        out
    }

    pub fn mul_xpoly(&self, p: &XPoly) -> Result<Self, AlgebraError> {
        Ok(self.mul(&Self::from_xpoly(self.nz, p)?))
    }

    /// Sum with a single common denominator and one cancellation pass.
    pub fn sum<'a>(items: impl IntoIterator<Item = &'a FactoredRatFn>) -> Self {
        let items: Vec<&FactoredRatFn> = items.into_iter().collect();
        let nz = items.iter().map(|f| f.nz).max().unwrap_or(0);
        let live: Vec<&FactoredRatFn> = items.into_iter().filter(|f| !f.is_zero()).collect();
        match live.len() {
            0 => return Self::zero(nz),
            1 => return live[0].with_nz(nz),
            _ => {}
        }
        let mut den: BTreeMap<Factor, u32> = BTreeMap::new();
        for f in &live {
            for (fac, e) in &f.den {
                let slot = den.entry(*fac).or_insert(0);
                *slot = (*slot).max(*e);
            }
        }
        let q = live
            .iter()
            .fold(BigInt::one(), |acc, f| acc.lcm(f.scale.denom()));
        let mut num = ZPoly::zero();
        for f in &live {
            let mut term = f.num.clone();
            for (fac, e) in &den {
                let have = f.den.get(fac).copied().unwrap_or(0);
                let (m, c) = fac.binomial();
                for _ in have..*e {
                    term = term.mul_binomial(m, c);
                }
            }
            let k = f.scale.numer() * (&q / f.scale.denom());
            num = num.add_scaled(&term, &k);
        }
        Self {
            nz,
            scale: Rational::new(BigInt::one(), q),
            num,
            den,
        }
        .normalize()
    }

    pub fn add(&self, o: &Self) -> Self {
        Self::sum([self, o])
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self::sum([self, &o.neg()])
    }

    pub fn mul(&self, o: &Self) -> Self {
        let nz = self.nz.max(o.nz);
        if self.is_zero() || o.is_zero() {
            return Self::zero(nz);
        }
        let mut den = self.den.clone();
        for (f, e) in &o.den {
            *den.entry(*f).or_insert(0) += e;
        }
        Self {
            nz,
            scale: &self.scale * &o.scale,
            num: self.num.mul(&o.num),
            den,
        }
        .normalize()
    }

    /// Multiplies by `f^e` without a full cancellation pass.
    pub fn mul_factor(&self, f: Factor, e: i32) -> Self {
        if self.is_zero() || e == 0 {
            return self.clone();
        }
        let mut out = self.clone();
        let (m, c) = f.binomial();
        if e > 0 {
            let mut left = e as u32;
            if let Some(d) = out.den.get_mut(&f) {
                let k = (*d).min(left);
                *d -= k;
                left -= k;
                if *d == 0 {
                    out.den.remove(&f);
                }
            }
            for _ in 0..left {
                out.num = out.num.mul_binomial(m, c);
            }
            out.fix_content()
        } else {
            let mut left = (-e) as u32;
            while left > 0 {
                match out.num.div_binomial(m, c) {
                    Some(q) => {
                        out.num = q;
                        left -= 1;
                    }
                    None => break,
                }
            }
            if left > 0 {
                *out.den.entry(f).or_insert(0) += left;
            }
            out.fix_content()
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(self.nz);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Inverse, when the numerator is a product of allowed factors.
    pub fn try_inverse(&self) -> Result<Self, AlgebraError> {
        if self.is_zero() {
            return Err(AlgebraError::NotInvertible);
        }
        let mut rest = self.num.clone();
        let mut found: BTreeMap<Factor, u32> = BTreeMap::new();
        for f in Factor::all(self.nz) {
            let (m, c) = f.binomial();
            while let Some(q) = rest.div_binomial(m, c) {
                rest = q;
                *found.entry(f).or_insert(0) += 1;
            }
        }
        let unit = rest.as_constant().ok_or(AlgebraError::NotInvertible)?;
        let mut num = ZPoly::one();
        for (f, e) in &self.den {
            num = num.mul(&f.poly().pow(*e));
        }
        let scale = (self.scale.clone() * Rational::from_integer(unit)).recip();
        Ok(Self::from_parts(self.nz, scale, num, found))
    }

    pub fn div(&self, o: &Self) -> Result<Self, AlgebraError> {
        Ok(self.mul(&o.try_inverse()?))
    }

    fn check_var(&self, v: Var) -> Result<(), AlgebraError> {
        match v {
            Var::Z(i) if i >= self.nz => Err(AlgebraError::UnknownVariable(v.to_string())),
            _ => Ok(()),
        }
    }

    pub fn derivative(&self, v: Var) -> Result<Self, AlgebraError> {
        self.check_var(v)?;
        if self.is_zero() {
            return Ok(self.clone());
        }
        let slot = v.slot();
        let dep: Vec<(Factor, u32)> = self
            .den
            .iter()
            .filter(|(f, _)| f.uses_slot(slot))
            .map(|(f, e)| (*f, *e))
            .collect();
        // N' Π f - N Σ e_i f_i' Π_{j≠i} f_j
        let mut prod = ZPoly::one();
        for (f, _) in &dep {
            prod = prod.mul(&f.poly());
        }
        let mut g = ZPoly::zero();
        for (i, (f, e)) in dep.iter().enumerate() {
            let mut t = f.poly().derivative(slot).scale(&BigInt::from(*e));
            for (j, (h, _)) in dep.iter().enumerate() {
                if i != j {
                    t = t.mul(&h.poly());
                }
            }
            g = g.add(&t);
        }
        let num = self.num.derivative(slot).mul(&prod).sub(&self.num.mul(&g));
        let mut den = self.den.clone();
        for (f, _) in &dep {
            *den.get_mut(f).unwrap() += 1;
        }
        Ok(Self::from_parts(self.nz, self.scale.clone(), num, den))
    }

    /// General variable substitution into a space of `nz_out` z-variables.
    ///
    /// `zimg[i]` is the image of `z_{i+1}`, `aimg` the image of `α`.
    /// `ximg` optionally fixes `X` to a value.
    pub fn remap(
        &self,
        nz_out: usize,
        zimg: &[Image],
        aimg: &Image,
        ximg: Option<&Rational>,
    ) -> Result<Self, AlgebraError> {
        assert!(zimg.len() >= self.used_nz());
        assert!(!matches!(aimg, Image::Z(_)), "alpha can only map to itself or a value");
        let resolve = |i: usize| -> Image {
            match &zimg[i] {
                Image::Alpha => aimg.clone(),
                other => other.clone(),
            }
        };
        let mut scale = self.scale.clone();
        let mut den: BTreeMap<Factor, u32> = BTreeMap::new();
        for (f, e) in &self.den {
            let (c, fs) = f.substitute(&|i| zimg[i].clone(), aimg)?;
            scale /= super::rational::rational_pow(&c, *e as i32);
            for g in fs {
                *den.entry(g).or_insert(0) += e;
            }
        }
        // numerator: per-slot target slot or value p/q
        let mut target = [None::<usize>; NSLOTS];
        let mut values: Vec<(usize, BigInt, BigInt, u32)> = Vec::new();
        for s in 0..NSLOTS {
            let img = if s < MAX_Z {
                if s < zimg.len() {
                    resolve(s)
                } else {
                    Image::Z(s)
                }
            } else if s == SLOT_ALPHA {
                aimg.clone()
            } else {
                match ximg {
                    Some(x) => Image::Value(x.clone()),
                    None => Image::Z(SLOT_X),
                }
            };
            match img {
                Image::Z(t) => target[s] = Some(t),
                Image::Alpha => target[s] = Some(SLOT_ALPHA),
                Image::Value(r) => {
                    let d = self.num.max_exp(s);
                    values.push((s, r.numer().clone(), r.denom().clone(), d));
                }
            }
        }
        let mut terms = Vec::with_capacity(self.num.len());
        let pow_tables: Vec<(Vec<BigInt>, Vec<BigInt>)> = values
            .iter()
            .map(|(_, p, q, d)| {
                let mut pp = vec![BigInt::one()];
                let mut qq = vec![BigInt::one()];
                for _ in 0..*d {
                    pp.push(pp.last().unwrap() * p);
                    qq.push(qq.last().unwrap() * q);
                }
                (pp, qq)
            })
            .collect();
        for (m, a) in self.num.terms() {
            let mut nm = Mono::ONE;
            for s in 0..NSLOTS {
                let e = m.exp(s);
                if e > 0 {
                    if let Some(t) = target[s] {
                        nm = nm.mul(Mono::var(t, e));
                    }
                }
            }
            let mut c = a.clone();
            for ((s, _, _, d), (pp, qq)) in values.iter().zip(&pow_tables) {
                let e = m.exp(*s);
                c *= &pp[e as usize];
                c *= &qq[(*d - e) as usize];
            }
            terms.push((nm, c));
        }
        for ((_, _, q, d), _) in values.iter().zip(&pow_tables) {
            scale /= Rational::from_integer(num_traits::pow(q.clone(), *d as usize));
        }
        Ok(Self::from_parts(nz_out, scale, ZPoly::from_terms(terms), den))
    }

    /// Simultaneous substitution keeping the variable count.
    pub fn substitute(&self, bindings: &[(Var, Binding)]) -> Result<Self, AlgebraError> {
        let mut zimg: Vec<Image> = (0..self.nz).map(Image::Z).collect();
        let mut aimg = Image::Alpha;
        for (v, b) in bindings {
            self.check_var(*v)?;
            let img = match b {
                Binding::Value(r) => Image::Value(r.clone()),
                Binding::Var(Var::Z(j)) => {
                    self.check_var(Var::Z(*j))?;
                    Image::Z(*j)
                }
                Binding::Var(Var::Alpha) => Image::Alpha,
            };
            match v {
                Var::Z(i) => zimg[*i] = img,
                Var::Alpha => match img {
                    Image::Value(_) | Image::Alpha => aimg = img,
                    Image::Z(_) => {
                        return Err(AlgebraError::NotRepresentable(
                            "alpha bound to a z-variable".into(),
                        ))
                    }
                },
            }
        }
        self.remap(self.nz, &zimg, &aimg, None)
    }

    /// Fixes `X` to a rational value.
    pub fn specialize_x(&self, x: &Rational) -> Self {
        let zimg: Vec<Image> = (0..self.nz).map(Image::Z).collect();
        self.remap(self.nz, &zimg, &Image::Alpha, Some(x))
            .expect("fixing X never touches the denominator")
    }

    /// Exchanges two z-variables.
    pub fn swap(&self, i: usize, j: usize) -> Self {
        let mut zimg: Vec<Image> = (0..self.nz).map(Image::Z).collect();
        zimg.swap(i, j);
        self.remap(self.nz, &zimg, &Image::Alpha, None)
            .expect("renaming is total")
    }

    /// Exact quotient by `v - w`.
    pub fn div_difference(&self, v: Var, w: Var) -> Result<Self, AlgebraError> {
        let num = self
            .num
            .div_difference(v.slot(), w.slot())
            .ok_or(AlgebraError::NoncancellingSingularity)?;
        Ok(Self {
            nz: self.nz,
            scale: self.scale.clone(),
            num,
            den: self.den.clone(),
        }
        .fix_content())
    }

    /// Exact value at a rational point.
    pub fn eval(
        &self,
        z: &[Rational],
        alpha: Option<&Rational>,
        x: &Rational,
    ) -> Result<Rational, AlgebraError> {
        let mut zimg: Vec<Image> = (0..self.nz).map(Image::Z).collect();
        for (i, v) in z.iter().enumerate().take(self.nz) {
            zimg[i] = Image::Value(v.clone());
        }
        let aimg = alpha.map_or(Image::Alpha, |a| Image::Value(a.clone()));
        let r = self.remap(self.nz, &zimg, &aimg, Some(x))?;
        if r.is_zero() {
            return Ok(Rational::zero());
        }
        match (r.num.as_constant(), r.den.is_empty()) {
            (Some(c), true) => Ok(r.scale * Rational::from_integer(c)),
            _ => Err(AlgebraError::UnknownVariable(
                "not all variables were bound".into(),
            )),
        }
    }

    /// Numerator coefficients grouped by z/α monomial, as `X`-polynomials
    /// including the overall scale.
    pub fn numerator_groups(&self) -> BTreeMap<Mono, XPoly> {
        let mut out: BTreeMap<Mono, XPoly> = BTreeMap::new();
        for (m, c) in self.num.terms() {
            let j = m.exp(SLOT_X);
            let key = m.with_exp(SLOT_X, 0);
            out.entry(key)
                .or_default()
                .add_term(j as i32, Rational::from_integer(c.clone()) * &self.scale);
        }
        out
    }

    pub fn x_degree(&self) -> u32 {
        self.num.max_exp(SLOT_X)
    }

    /// Canonical JSON: exponent vectors `[e_z1..e_zn, e_a]` in graded
    /// lexicographic order (highest first) with X-polynomial coefficients.
    pub fn to_json(&self) -> serde_json::Value {
        let mut groups: Vec<(Vec<u32>, XPoly)> = self
            .numerator_groups()
            .into_iter()
            .map(|(m, p)| {
                let mut v: Vec<u32> = (0..self.nz).map(|s| m.exp(s)).collect();
                v.push(m.exp(SLOT_ALPHA));
                (v, p)
            })
            .collect();
        groups.sort_by(|a, b| {
            let da: u32 = a.0.iter().sum();
            let db: u32 = b.0.iter().sum();
            db.cmp(&da).then_with(|| b.0.cmp(&a.0))
        });
        serde_json::json!({
            "nvars": self.nz,
            "numerator": groups
                .iter()
                .map(|(v, p)| serde_json::json!([v, p.to_json()]))
                .collect::<Vec<_>>(),
            "denominator": self
                .den
                .iter()
                .map(|(f, e)| serde_json::json!([f.id(), e]))
                .collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self, AlgebraError> {
        let bad = |s: &str| AlgebraError::Parse(s.to_string());
        let nz = v["nvars"].as_u64().ok_or_else(|| bad("missing nvars"))? as usize;
        if nz > MAX_Z {
            return Err(bad("too many variables"));
        }
        let mut raw: Vec<(Mono, Rational)> = Vec::new();
        for item in v["numerator"].as_array().ok_or_else(|| bad("missing numerator"))? {
            let exps = item[0].as_array().ok_or_else(|| bad("bad exponent vector"))?;
            if exps.len() != nz + 1 {
                return Err(bad("exponent vector length"));
            }
            let mut m = Mono::ONE;
            for (i, e) in exps.iter().enumerate() {
                let e = e.as_u64().ok_or_else(|| bad("bad exponent"))? as u32;
                let slot = if i == nz { SLOT_ALPHA } else { i };
                m = m.mul(Mono::var(slot, e));
            }
            for (j, c) in XPoly::from_json(&item[1])?.terms() {
                if j < 0 {
                    return Err(bad("negative X power in numerator"));
                }
                raw.push((m.mul(Mono::var(SLOT_X, j as u32)), c.clone()));
            }
        }
        let q = super::rational::lcm_denoms(raw.iter().map(|(_, c)| c));
        let terms = raw
            .into_iter()
            .map(|(m, c)| (m, (c * Rational::from_integer(q.clone())).to_integer()))
            .collect();
        let mut den = BTreeMap::new();
        for item in v["denominator"].as_array().ok_or_else(|| bad("missing denominator"))? {
            let f = Factor::from_id(item[0].as_str().ok_or_else(|| bad("bad factor"))?)?;
            if f.max_z_slot().is_some_and(|s| s >= nz) {
                return Err(bad("factor index out of range"));
            }
            let e = item[1].as_u64().ok_or_else(|| bad("bad factor exponent"))? as u32;
            if e == 0 {
                return Err(bad("zero factor exponent"));
            }
            den.insert(f, e);
        }
        Ok(Self::from_parts(
            nz,
            Rational::new(BigInt::one(), q),
            ZPoly::from_terms(terms),
            den,
        ))
    }

    /// Parses expressions like `(X-1)/2*(1/(z1-1) + 1/(z1+1)) - 2/(z1-1/a)`.
    pub fn parse(nz: usize, src: &str) -> Result<Self, AlgebraError> {
        let tokens = tokenize(src)?;
        let mut p = Parser { toks: &tokens, pos: 0, nz };
        let out = p.expr()?;
        if p.pos != tokens.len() {
            return Err(AlgebraError::Parse(format!("trailing input in {src:?}")));
        }
        Ok(out)
    }
}

impl fmt::Display for FactoredRatFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        write!(f, "({})*(", fmt_rational(&self.scale))?;
        let mut first = true;
        for (m, c) in self.num.terms().iter().rev() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{c}")?;
            for s in 0..NSLOTS {
                let e = m.exp(s);
                if e == 0 {
                    continue;
                }
                let name = match s {
                    SLOT_ALPHA => "a".to_string(),
                    SLOT_X => "X".to_string(),
                    _ => format!("z{}", s + 1),
                };
                if e == 1 {
                    write!(f, "*{name}")?;
                } else {
                    write!(f, "*{name}^{e}")?;
                }
            }
        }
        write!(f, ")")?;
        for (fac, e) in &self.den {
            write!(f, "/({fac})^{e}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Op(char),
}

fn tokenize(src: &str) -> Result<Vec<Tok>, AlgebraError> {
    let mut out = Vec::new();
    let chars: Vec<char> = src.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            out.push(Tok::Num(s.parse().unwrap()));
        } else if c.is_ascii_alphabetic() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_alphanumeric() {
                i += 1;
            }
            out.push(Tok::Ident(chars[start..i].iter().collect()));
        } else if "+-*/^()".contains(c) {
            out.push(Tok::Op(c));
            i += 1;
        } else {
            return Err(AlgebraError::Parse(format!("unexpected character {c:?}")));
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: &'a [Tok],
    pos: usize,
    nz: usize,
}

impl Parser<'_> {
    fn peek_op(&self) -> Option<char> {
        match self.toks.get(self.pos) {
            Some(Tok::Op(c)) => Some(*c),
            _ => None,
        }
    }

    fn expr(&mut self) -> Result<FactoredRatFn, AlgebraError> {
        let mut terms = vec![self.term()?];
        while let Some(op @ ('+' | '-')) = self.peek_op() {
            self.pos += 1;
            let t = self.term()?;
            terms.push(if op == '-' { t.neg() } else { t });
        }
        Ok(FactoredRatFn::sum(terms.iter()))
    }

    fn term(&mut self) -> Result<FactoredRatFn, AlgebraError> {
        let mut acc = self.unary()?;
        while let Some(op @ ('*' | '/')) = self.peek_op() {
            self.pos += 1;
            let rhs = self.unary()?;
            acc = if op == '*' { acc.mul(&rhs) } else { acc.div(&rhs)? };
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<FactoredRatFn, AlgebraError> {
        if self.peek_op() == Some('-') {
            self.pos += 1;
            return Ok(self.unary()?.neg());
        }
        let base = self.atom()?;
        if self.peek_op() == Some('^') {
            self.pos += 1;
            match self.toks.get(self.pos) {
                Some(Tok::Num(n)) => {
                    self.pos += 1;
                    let e: u32 = n
                        .try_into()
                        .map_err(|_| AlgebraError::Parse("exponent too large".into()))?;
                    return Ok(base.pow(e));
                }
                _ => return Err(AlgebraError::Parse("expected integer exponent".into())),
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<FactoredRatFn, AlgebraError> {
        let tok = self
            .toks
            .get(self.pos)
            .cloned()
            .ok_or_else(|| AlgebraError::Parse("unexpected end of input".into()))?;
        self.pos += 1;
        match tok {
            Tok::Num(n) => Ok(FactoredRatFn::constant(self.nz, Rational::from_integer(n))),
            Tok::Ident(name) => match name.as_str() {
                "a" => Ok(FactoredRatFn::var(self.nz, Var::Alpha)),
                "X" => Ok(FactoredRatFn::x(self.nz)),
                _ => {
                    let i: usize = name
                        .strip_prefix('z')
                        .and_then(|s| s.parse().ok())
                        .filter(|i| *i >= 1 && *i <= self.nz)
                        .ok_or_else(|| AlgebraError::UnknownVariable(name.clone()))?;
                    Ok(FactoredRatFn::var(self.nz, Var::Z(i - 1)))
                }
            },
            Tok::Op('(') => {
                let e = self.expr()?;
                if self.peek_op() != Some(')') {
                    return Err(AlgebraError::Parse("expected ')'".into()));
                }
                self.pos += 1;
                Ok(e)
            }
            Tok::Op(c) => Err(AlgebraError::Parse(format!("unexpected {c:?}"))),
        }
    }
}

impl FactoredRatFn {
    /// Largest absolute numerator coefficient, for diagnostics.
    pub fn max_coeff_bits(&self) -> u64 {
        self.num
            .terms()
            .iter()
            .map(|(_, c)| c.abs().bits())
            .max()
            .unwrap_or(0)
    }
}
