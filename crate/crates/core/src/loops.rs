//! Schwinger–Dyson recursion for the correlators `ω_n^{[k]}` of the Gaussian
//! β-ensemble with a wall, in the uniformizing coordinate `x = z + 1/z`
//! (`t = 1`, wall at `a = α + 1/α`).
//!
//! With `X = 2/β` and `I = {2..n}`, each step solves
//!
//! ```text
//! ω_n^{[k]}(z, z_I) = z³/((z-1)²(z+1)²) · [ ω_{n+1}^{[k-2]}(z, z, z_I)
//!     + Σ' ω_{|J|+1}^{[k']}(z, z_J) ω_{n-|J|}^{[k-k']}(z, z_{I\J})
//!     + (1 - X) x'(z) ∂_z(ω_n^{[k-1]}/x')
//!     + 2 x'(z)² zα (F(z) - F(α)) / ((z-α)(αz-1)),   F = ω_n^{[k-1]}/x'
//!     + X Σ_i x'(z)² ∂_{z_i}[ z z_i (G(z) - G(z_i)) / ((z-z_i)(z z_i-1)) ],  G = ω_{n-1}^{[k]}/x'
//!     - δ_{n1} δ_{k1} x'(z)² ]
//! ```
//!
//! where `x'(z) = (z²-1)/z²` and `Σ'` omits `(J,k') = (∅,0)` and `(I,k)`.
//! The difference quotients are formed by exact polynomial division.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::algebra::{Factor, FactoredRatFn, Image, Mono, Var, MAX_Z};
use crate::algebra::poly::{NSLOTS, SLOT_ALPHA, SLOT_X};
use crate::error::{AlgebraError, RecursionError};

/// Cache file format tag.
pub const FORMAT_VERSION: &str = "twbeta-correlators-1";

#[derive(Clone, Debug, PartialEq)]
pub struct Correlator {
    pub n: usize,
    pub k: usize,
    pub value: FactoredRatFn,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct CorrelatorTable {
    entries: BTreeMap<(usize, usize), Correlator>,
    max_layer: usize,
}

impl CorrelatorTable {
    pub fn new() -> Self {
        let mut t = Self::default();
        t.insert(seed_omega_1_0());
        t.max_layer = 1;
        t
    }

    pub fn get(&self, n: usize, k: usize) -> Option<&Correlator> {
        self.entries.get(&(n, k))
    }

    pub fn value(&self, n: usize, k: usize) -> Result<&FactoredRatFn, RecursionError> {
        self.get(n, k)
            .map(|c| &c.value)
            .ok_or(RecursionError::MissingDependency { n, k })
    }

    pub fn contains(&self, n: usize, k: usize) -> bool {
        self.entries.contains_key(&(n, k))
    }

    pub fn insert(&mut self, c: Correlator) {
        self.max_layer = self.max_layer.max(c.n + c.k);
        self.entries.insert((c.n, c.k), c);
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn max_layer(&self) -> usize {
        self.max_layer
    }

    pub fn keys(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.entries.keys().copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Correlator> {
        self.entries.values()
    }

    /// Largest `k` with `ω_1^{[k]}` present and all lower `ω_1` present too.
    pub fn max_one_point(&self) -> usize {
        (0..).take_while(|k| self.contains(1, *k)).last().unwrap_or(0)
    }

    /// Computes every missing entry of `wanted` together with its dependencies.
    pub fn extend(&mut self, wanted: &[(usize, usize)]) -> Result<(), RecursionError> {
        let mut needed = BTreeSet::new();
        for &(n, k) in wanted {
            collect_deps(n, k, &mut needed)?;
        }
        let missing: Vec<(usize, usize)> = needed
            .into_iter()
            .filter(|key| !self.contains(key.0, key.1))
            .collect();
        let mut layers: BTreeMap<usize, Vec<(usize, usize)>> = BTreeMap::new();
        for (n, k) in missing {
            layers.entry(n + k).or_default().push((n, k));
        }
        for (_, layer) in layers {
            let done: Vec<Result<Correlator, RecursionError>> =
                layer.par_iter().map(|&(n, k)| sd_step(n, k, self)).collect();
            for c in done {
                self.insert(c?);
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "format": FORMAT_VERSION,
            "max_layer": self.max_layer,
            "entries": self.entries.values().map(|c| serde_json::json!({
                "n": c.n,
                "k": c.k,
                "value": c.value.to_json(),
            })).collect::<Vec<_>>(),
        })
    }

    /// `Ok(None)` when the document has another format version.
    pub fn from_json(v: &serde_json::Value) -> Result<Option<Self>, AlgebraError> {
        if v["format"].as_str() != Some(FORMAT_VERSION) {
            return Ok(None);
        }
        let bad = |s: &str| AlgebraError::Parse(s.to_string());
        let mut t = Self::default();
        for e in v["entries"].as_array().ok_or_else(|| bad("missing entries"))? {
            let n = e["n"].as_u64().ok_or_else(|| bad("bad n"))? as usize;
            let k = e["k"].as_u64().ok_or_else(|| bad("bad k"))? as usize;
            let value = FactoredRatFn::from_json(&e["value"])?;
            if value.nz() != n {
                return Err(bad("variable count does not match n"));
            }
            t.insert(Correlator { n, k, value });
        }
        if !t.contains(1, 0) {
            return Err(bad("cache lacks the seed correlator"));
        }
        Ok(Some(t))
    }

    pub fn save(&self, path: &Path) -> std::io::Result<()> {
        let text = serde_json::to_string(&self.to_json()).map_err(std::io::Error::other)?;
        let tmp = path.with_extension("tmp");
        std::fs::write(&tmp, text)?;
        std::fs::rename(tmp, path)
    }

    /// Reads a cache file. Missing file or version mismatch give `Ok(None)`;
    /// a file that exists but cannot be parsed is an error.
    pub fn load(path: &Path) -> Result<Option<Self>, AlgebraError> {
        let text = match std::fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(AlgebraError::Parse(format!("cannot read cache: {e}"))),
        };
        let v: serde_json::Value = serde_json::from_str(&text)
            .map_err(|e| AlgebraError::Parse(format!("corrupt cache: {e}")))?;
        Self::from_json(&v)
    }
}

/// `ω_1^{[0]} = 1/z - 1/z³`.
pub fn seed_omega_1_0() -> Correlator {
    let value = FactoredRatFn::factor_pow(1, Factor::ZMinus1(0), 1)
        .mul_factor(Factor::ZPlus1(0), 1)
        .mul_factor(Factor::Z(0), -3);
    Correlator { n: 1, k: 0, value }
}

/// Direct dependencies of `ω_n^{[k]}`.
pub fn dependencies(n: usize, k: usize) -> Vec<(usize, usize)> {
    let mut out = BTreeSet::new();
    if k >= 2 {
        out.insert((n + 1, k - 2));
    }
    for j in 0..n {
        for kp in 0..=k {
            if (j == 0 && kp == 0) || (j == n - 1 && kp == k) {
                continue;
            }
            out.insert((j + 1, kp));
            out.insert((n - j, k - kp));
        }
    }
    if k >= 1 {
        out.insert((n, k - 1));
    }
    if n >= 2 {
        out.insert((n - 1, k));
    }
    out.into_iter().collect()
}

fn collect_deps(
    n: usize,
    k: usize,
    acc: &mut BTreeSet<(usize, usize)>,
) -> Result<(), RecursionError> {
    if n == 0 {
        return Err(RecursionError::Invalid("n must be at least 1".into()));
    }
    if n > MAX_Z {
        return Err(RecursionError::TooManyVariables(n));
    }
    if !acc.insert((n, k)) {
        return Ok(());
    }
    if (n, k) == (1, 0) {
        return Ok(());
    }
    for (a, b) in dependencies(n, k) {
        collect_deps(a, b, acc)?;
    }
    Ok(())
}

/// All `ω_n^{[k]}` with `n + k ≤ max_layer`.
pub fn build_table(max_layer: usize) -> Result<CorrelatorTable, RecursionError> {
    if max_layer == 0 {
        return Err(RecursionError::Invalid("max layer must be at least 1".into()));
    }
    let mut t = CorrelatorTable::new();
    let wanted: Vec<(usize, usize)> = (1..=max_layer)
        .flat_map(|n| (0..=max_layer - n).map(move |k| (n, k)))
        .collect();
    t.extend(&wanted)?;
    Ok(t)
}

/// The correlators needed for `ω_1^{[0..=k_max]}`.
pub fn build_one_point(k_max: usize) -> Result<CorrelatorTable, RecursionError> {
    let mut t = CorrelatorTable::new();
    let wanted: Vec<(usize, usize)> = (0..=k_max).map(|k| (1, k)).collect();
    t.extend(&wanted)?;
    Ok(t)
}

fn ids(n: usize) -> Vec<Image> {
    (0..n).map(Image::Z).collect()
}

/// `x'(z_s) = (z_s-1)(z_s+1)/z_s²` raised to `e`.
fn xprime_pow(f: &FactoredRatFn, s: usize, e: i32) -> FactoredRatFn {
    f.mul_factor(Factor::ZMinus1(s as u8), e)
        .mul_factor(Factor::ZPlus1(s as u8), e)
        .mul_factor(Factor::Z(s as u8), -2 * e)
}

/// Places a function of `slots.len()` variables into `nz` variables.
fn embed(f: &FactoredRatFn, nz: usize, slots: &[usize]) -> Result<FactoredRatFn, AlgebraError> {
    let zimg: Vec<Image> = slots.iter().map(|&s| Image::Z(s)).collect();
    f.remap(nz, &zimg, &Image::Alpha, None)
}

fn singular(n: usize, k: usize, term: &'static str) -> impl Fn(AlgebraError) -> RecursionError {
    move |e| match e {
        AlgebraError::NoncancellingSingularity => {
            RecursionError::NoncancellingSingularity { n, k, term }
        }
        other => RecursionError::Algebra(other),
    }
}

/// One step of the recursion: `ω_n^{[k]}` from lower layers.
pub fn sd_step(n: usize, k: usize, table: &CorrelatorTable) -> Result<Correlator, RecursionError> {
    if n == 0 || (n, k) == (1, 0) {
        return Err(RecursionError::Invalid(format!(
            "sd_step is not defined for (n, k) = ({n}, {k})"
        )));
    }
    if n > MAX_Z {
        return Err(RecursionError::TooManyVariables(n));
    }
    for (a, b) in dependencies(n, k) {
        if !table.contains(a, b) {
            return Err(RecursionError::MissingDependency { n: a, k: b });
        }
    }
    let mut terms: Vec<FactoredRatFn> = Vec::new();

    if k >= 2 {
        let w = table.value(n + 1, k - 2)?;
        let mut zimg = vec![Image::Z(0), Image::Z(0)];
        zimg.extend((2..=n).map(|j| Image::Z(j - 1)));
        terms.push(w.remap(n, &zimg, &Image::Alpha, None)?);
    }

    terms.extend(quadratic_terms(n, k, table)?);

    if k >= 1 {
        let w = table.value(n, k - 1)?;
        let f = xprime_pow(w, 0, -1);
        let c = xprime_pow(&f.derivative(Var::Z(0))?, 0, 1);
        let one_minus_x = FactoredRatFn::one(n).sub(&FactoredRatFn::x(n));
        terms.push(c.mul(&one_minus_x));

        let mut zimg = ids(n);
        zimg[0] = Image::Alpha;
        let fa = f.remap(n, &zimg, &Image::Alpha, None)?;
        let q = f
            .sub(&fa)
            .div_difference(Var::Z(0), Var::Alpha)
            .map_err(singular(n, k, "wall"))?;
        let d = xprime_pow(&q, 0, 2)
            .mul_factor(Factor::Z(0), 1)
            .mul_factor(Factor::Alpha, 1)
            .mul_factor(Factor::AlphaZMinus1(0), -1);
        terms.push(d.scale_by(&crate::algebra::rat(2, 1)));
    }

    if n >= 2 {
        let e1 = difference_term(n, k, table)?;
        let x = FactoredRatFn::x(n);
        terms.push(e1.mul(&x));
        for i in 2..n {
            terms.push(e1.swap(1, i).mul(&x));
        }
    }

    if (n, k) == (1, 1) {
        terms.push(xprime_pow(&FactoredRatFn::one(1), 0, 2).neg());
    }

    let bracket = FactoredRatFn::sum(terms.iter());
    let value = xprime_pow(&bracket, 0, -2).mul_factor(Factor::Z(0), -1);
    Ok(Correlator { n, k, value })
}

/// The `Σ'` products, using the symmetry in `z_I` to reuse one product per
/// orbit of subsets.
fn quadratic_terms(
    n: usize,
    k: usize,
    table: &CorrelatorTable,
) -> Result<Vec<FactoredRatFn>, RecursionError> {
    let rest: Vec<usize> = (1..n).collect();
    let mut out = Vec::new();
    for j in 0..n {
        for kp in 0..=k {
            if (j == 0 && kp == 0) || (j == n - 1 && kp == k) {
                continue;
            }
            // representative J = first j elements of I
            let (left, right) = rest.split_at(j);
            let mut ls = vec![0];
            ls.extend_from_slice(left);
            let mut rs = vec![0];
            rs.extend_from_slice(right);
            let a = embed(table.value(j + 1, kp)?, n, &ls)?;
            let b = embed(table.value(n - j, k - kp)?, n, &rs)?;
            let prod = a.mul(&b);
            for subset in subsets(&rest, j) {
                // permutation of I sending the representative onto `subset`
                let complement: Vec<usize> =
                    rest.iter().copied().filter(|x| !subset.contains(x)).collect();
                let target: Vec<usize> = subset.iter().chain(&complement).copied().collect();
                if target == rest {
                    out.push(prod.clone());
                } else {
                    let mut zimg = vec![Image::Z(0)];
                    zimg.extend(target.iter().map(|&s| Image::Z(s)));
                    out.push(prod.remap(n, &zimg, &Image::Alpha, None)?);
                }
            }
        }
    }
    Ok(out)
}

fn subsets(items: &[usize], size: usize) -> Vec<Vec<usize>> {
    if size == 0 {
        return vec![vec![]];
    }
    if items.len() < size {
        return vec![];
    }
    let mut out = Vec::new();
    for (i, &first) in items.iter().enumerate() {
        for mut tail in subsets(&items[i + 1..], size - 1) {
            tail.insert(0, first);
            out.push(tail);
        }
    }
    out
}

/// The `i = 2` difference-quotient term (without the factor `X`).
fn difference_term(
    n: usize,
    k: usize,
    table: &CorrelatorTable,
) -> Result<FactoredRatFn, RecursionError> {
    let w = table.value(n - 1, k)?;
    let g = xprime_pow(w, 0, -1);
    let others: Vec<usize> = (2..n).collect();
    let mut at_z = vec![0];
    at_z.extend_from_slice(&others);
    let mut at_zi = vec![1];
    at_zi.extend_from_slice(&others);
    let gz = embed(&g, n, &at_z)?;
    let gzi = embed(&g, n, &at_zi)?;
    let q = gz
        .sub(&gzi)
        .div_difference(Var::Z(0), Var::Z(1))
        .map_err(singular(n, k, "difference"))?;
    let inner = q
        .mul_factor(Factor::Z(0), 1)
        .mul_factor(Factor::Z(1), 1)
        .mul_factor(Factor::zz(0, 1), -1);
    Ok(xprime_pow(&inner.derivative(Var::Z(1))?, 0, 2))
}

/// `ω_1(z)` at `z = α`.
pub fn wall_restriction(c: &Correlator) -> Result<FactoredRatFn, RecursionError> {
    if c.n != 1 {
        return Err(RecursionError::Invalid(
            "wall restriction needs a one-point correlator".into(),
        ));
    }
    Ok(c.value.remap(0, &[Image::Alpha], &Image::Alpha, None)?)
}

/// Pole order at the collision point `z_i = α = 1` and the `X`-degree of the
/// leading coefficient there.
///
/// Evaluates along the line `z_i = 1 + λw_i`, `α = 1 + λv` with fixed
/// pseudo-random directions, modulo the prime `2^61 - 1`; each factor
/// `z_i-1`, `αz_i-1`, `z_iz_j-1`, `α-1` vanishes to first order in `λ`.
pub fn collision_order(f: &FactoredRatFn) -> (i64, u32) {
    let den_order: i64 = f
        .denominator()
        .iter()
        .filter(|(g, _)| g.vanishes_at_one())
        .map(|(_, e)| *e as i64)
        .sum();
    let mut best: Option<(i64, u32)> = None;
    for seed in [11u64, 29] {
        let (ord, xdeg) = numerator_order(f, seed);
        best = Some(match best {
            None => (ord, xdeg),
            Some((o, _)) if ord < o => (ord, xdeg),
            Some((o, x)) if ord == o => (o, x.max(xdeg)),
            Some(b) => b,
        });
    }
    let (ord, xdeg) = best.unwrap();
    (den_order - ord, xdeg)
}

const P61: u64 = (1 << 61) - 1;

fn mulmod(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % P61 as u128) as u64
}

fn powmod(mut a: u64, mut e: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, a);
        }
        a = mulmod(a, a);
        e >>= 1;
    }
    r
}

fn invmod(a: u64) -> u64 {
    powmod(a, P61 - 2)
}

fn bigint_mod(c: &num_bigint::BigInt) -> u64 {
    use num_traits::ToPrimitive;
    let m = num_bigint::BigInt::from(P61);
    let r = ((c % &m) + &m) % &m;
    r.to_u64().unwrap()
}

/// Lowest order in `λ` of the numerator along a line, and the largest
/// `X`-power attaining it.
fn numerator_order(f: &FactoredRatFn, seed: u64) -> (i64, u32) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dirs: Vec<u64> = (0..NSLOTS).map(|_| rng.random_range(1..1000u64)).collect();
    let mut groups: BTreeMap<u32, Vec<(Mono, u64)>> = BTreeMap::new();
    for (m, c) in f.numerator().terms() {
        groups
            .entry(m.exp(SLOT_X))
            .or_default()
            .push((m.with_exp(SLOT_X, 0), bigint_mod(c)));
    }
    let mut best: Option<(i64, u32)> = None;
    for (xpow, terms) in groups {
        let deg = terms.iter().map(|(m, _)| m.degree()).max().unwrap_or(0) as usize;
        let npts = deg + 1;
        let slots: Vec<usize> = (0..SLOT_X).filter(|&s| s < MAX_Z || s == SLOT_ALPHA).collect();
        // values[p] = polynomial at λ = p + 1
        let mut values = vec![0u64; npts];
        for (p, val) in values.iter_mut().enumerate() {
            let lam = (p + 1) as u64;
            let mut pows: Vec<Vec<u64>> = Vec::with_capacity(NSLOTS);
            for s in 0..NSLOTS {
                let base = (1 + mulmod(lam, dirs[s])) % P61;
                let maxe = if slots.contains(&s) { deg } else { 0 };
                let mut row = vec![1u64; maxe + 1];
                for e in 1..=maxe {
                    row[e] = mulmod(row[e - 1], base);
                }
                pows.push(row);
            }
            let mut acc = 0u64;
            for (m, c) in &terms {
                let mut t = *c;
                for &s in &slots {
                    let e = m.exp(s) as usize;
                    if e > 0 {
                        t = mulmod(t, pows[s][e]);
                    }
                }
                acc = (acc + t) % P61;
            }
            *val = acc;
        }
        let coeffs = interpolate(&values);
        let ord = match coeffs.iter().position(|c| *c != 0) {
            Some(o) => o as i64,
            None => continue,
        };
        best = Some(match best {
            None => (ord, xpow),
            Some((o, _)) if ord < o => (ord, xpow),
            Some((o, x)) if ord == o => (o, x.max(xpow)),
            Some(b) => b,
        });
    }
    best.unwrap_or((i64::MAX / 2, 0))
}

/// Monomial coefficients of the polynomial through `(p+1, values[p])`.
fn interpolate(values: &[u64]) -> Vec<u64> {
    let n = values.len();
    let xs: Vec<u64> = (1..=n as u64).collect();
    // Newton divided differences
    let mut dd = values.to_vec();
    for j in 1..n {
        for i in (j..n).rev() {
            let num = (dd[i] + P61 - dd[i - 1]) % P61;
            let den = (xs[i] + P61 - xs[i - j]) % P61;
            dd[i] = mulmod(num, invmod(den));
        }
    }
    // expand Newton form
    let mut poly = vec![0u64; n];
    for i in (0..n).rev() {
        // poly = poly * (λ - x_i) + dd[i]
        let mut next = vec![0u64; n];
        for d in 0..n {
            if poly[d] == 0 {
                continue;
            }
            if d + 1 < n {
                next[d + 1] = (next[d + 1] + poly[d]) % P61;
            }
            next[d] = (next[d] + P61 - mulmod(poly[d], xs[i])) % P61;
        }
        next[0] = (next[0] + dd[i]) % P61;
        poly = next;
    }
    poly
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dependency_sets() {
        assert_eq!(dependencies(1, 1), vec![(1, 0)]);
        assert_eq!(dependencies(2, 0), vec![(1, 0)]);
        assert!(dependencies(1, 2).contains(&(2, 0)));
    }

    #[test]
    fn interpolation_recovers_coefficients() {
        // 3 + 0 λ + 5 λ²
        let vals: Vec<u64> = (1..=3u64).map(|l| 3 + 5 * l * l).collect();
        assert_eq!(interpolate(&vals), vec![3, 0, 5]);
    }

    #[test]
    fn subsets_enumerate() {
        assert_eq!(subsets(&[1, 2, 3], 2).len(), 3);
        assert_eq!(subsets(&[1, 2], 0), vec![Vec::<usize>::new()]);
    }
}
