//! Sparse integer polynomials in `z_1..z_6, α, X` with packed exponents.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rustc_hash::FxHashMap;

/// Number of z-variable slots.
pub const MAX_Z: usize = 6;
pub const SLOT_ALPHA: usize = 6;
pub const SLOT_X: usize = 7;
pub const NSLOTS: usize = 8;

const BITS: usize = 16;
const SLOT_MASK: u128 = 0xffff;
const HIGH: u128 = 0x8000_8000_8000_8000_8000_8000_8000_8000;

/// A monomial with eight 16-bit exponent slots packed into a `u128`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Mono(u128);

impl Mono {
    pub const ONE: Mono = Mono(0);

    pub fn var(slot: usize, e: u32) -> Mono {
        assert!(e < 0x8000, "exponent overflow");
        Mono((e as u128) << (BITS * slot))
    }

    pub fn from_exps(exps: &[u32]) -> Mono {
        exps.iter()
            .enumerate()
            .fold(Mono::ONE, |m, (s, &e)| m.mul(Mono::var(s, e)))
    }

    #[inline]
    pub fn exp(self, slot: usize) -> u32 {
        ((self.0 >> (BITS * slot)) & SLOT_MASK) as u32
    }

    pub fn exps(self) -> [u32; NSLOTS] {
        let mut out = [0; NSLOTS];
        for (s, e) in out.iter_mut().enumerate() {
            *e = self.exp(s);
        }
        out
    }

    #[inline]
    pub fn mul(self, o: Mono) -> Mono {
        assert!((self.0 | o.0) & HIGH == 0, "exponent overflow");
        Mono(self.0 + o.0)
    }

    /// Slotwise quotient, if `o` divides `self`.
    #[inline]
    pub fn div(self, o: Mono) -> Option<Mono> {
        let d = self.0.wrapping_sub(o.0);
        // a borrow in any slot shows up as a set high bit somewhere or as wraparound
        if self.0 < o.0 {
            return None;
        }
        for s in 0..NSLOTS {
            if self.exp(s) < o.exp(s) {
                return None;
            }
        }
        Some(Mono(d))
    }

    pub fn with_exp(self, slot: usize, e: u32) -> Mono {
        let cleared = self.0 & !(SLOT_MASK << (BITS * slot));
        Mono(cleared).mul(Mono::var(slot, e))
    }

    pub fn pow(self, k: u32) -> Mono {
        (0..k).fold(Mono::ONE, |m, _| m.mul(self))
    }

    /// Sum of the z and α exponents.
    pub fn degree(self) -> u32 {
        (0..SLOT_X).map(|s| self.exp(s)).sum()
    }

    pub fn is_one(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Debug for Mono {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.exps())
    }
}

/// Sparse polynomial with integer coefficients, terms sorted by packed monomial.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ZPoly {
    terms: Vec<(Mono, BigInt)>,
}

impl ZPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(BigInt::one())
    }

    pub fn constant(c: BigInt) -> Self {
        Self::term(Mono::ONE, c)
    }

    pub fn term(m: Mono, c: BigInt) -> Self {
        if c.is_zero() {
            Self::zero()
        } else {
            Self { terms: vec![(m, c)] }
        }
    }

    /// `m - c`.
    pub fn binomial(m: Mono, c: i64) -> Self {
        Self::from_terms(vec![(m, BigInt::one()), (Mono::ONE, BigInt::from(-c))])
    }

    /// Sorts and combines arbitrary terms.
    pub fn from_terms(mut terms: Vec<(Mono, BigInt)>) -> Self {
        terms.sort_unstable_by_key(|t| t.0);
        let mut out: Vec<(Mono, BigInt)> = Vec::with_capacity(terms.len());
        for (m, c) in terms {
            match out.last_mut() {
                Some(last) if last.0 == m => last.1 += c,
                _ => {
                    if let Some(last) = out.last() {
                        if last.1.is_zero() {
                            out.pop();
                        }
                    }
                    out.push((m, c));
                }
            }
        }
        if matches!(out.last(), Some(l) if l.1.is_zero()) {
            out.pop();
        }
        Self { terms: out }
    }

    fn from_map(map: FxHashMap<Mono, BigInt>) -> Self {
        let mut terms: Vec<_> = map.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        terms.sort_unstable_by_key(|t| t.0);
        Self { terms }
    }

    pub fn terms(&self) -> &[(Mono, BigInt)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn leading(&self) -> Option<&(Mono, BigInt)> {
        self.terms.last()
    }

    /// The constant value, if the polynomial has no variables.
    pub fn as_constant(&self) -> Option<BigInt> {
        match self.terms.as_slice() {
            [] => Some(BigInt::zero()),
            [(m, c)] if m.is_one() => Some(c.clone()),
            _ => None,
        }
    }

    pub fn neg(&self) -> Self {
        Self {
            terms: self.terms.iter().map(|(m, c)| (*m, -c)).collect(),
        }
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        if k.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(m, c)| (*m, c * k)).collect(),
        }
    }

    pub fn div_int_exact(&self, k: &BigInt) -> Self {
        Self {
            terms: self.terms.iter().map(|(m, c)| (*m, c / k)).collect(),
        }
    }

    pub fn shift(&self, m: Mono) -> Self {
        Self {
            terms: self.terms.iter().map(|(t, c)| (t.mul(m), c.clone())).collect(),
        }
    }

    /// `self + k * other`.
    pub fn add_scaled(&self, other: &ZPoly, k: &BigInt) -> Self {
        let (a, b) = (&self.terms, &other.terms);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Less => {
                    out.push(a[i].clone());
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push((b[j].0, &b[j].1 * k));
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    let c = &a[i].1 + &b[j].1 * k;
                    if !c.is_zero() {
                        out.push((a[i].0, c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend(b[j..].iter().map(|(m, c)| (*m, c * k)));
        Self { terms: out }
    }

    pub fn add(&self, other: &ZPoly) -> Self {
        self.add_scaled(other, &BigInt::one())
    }

    pub fn sub(&self, other: &ZPoly) -> Self {
        self.add_scaled(other, &-BigInt::one())
    }

    pub fn mul(&self, other: &ZPoly) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let (small, big) = if self.len() <= other.len() {
            (self, other)
        } else {
            (other, self)
        };
        if small.len() == 1 {
            let (m, c) = &small.terms[0];
            return Self {
                terms: big.terms.iter().map(|(t, d)| (t.mul(*m), d * c)).collect(),
            };
        }
        if small.len() <= 4 {
            let mut acc = Self::zero();
            for (m, c) in &small.terms {
                acc = acc.add_scaled(&big.shift(*m), c);
            }
            return acc;
        }
        let mut map: FxHashMap<Mono, BigInt> =
            FxHashMap::with_capacity_and_hasher(big.len() * 2, Default::default());
        for (m1, c1) in &small.terms {
            for (m2, c2) in &big.terms {
                let prod = c1 * c2;
                map.entry(m1.mul(*m2))
                    .and_modify(|e| *e += &prod)
                    .or_insert(prod);
            }
        }
        Self::from_map(map)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Multiplies by the binomial `m - c`.
    pub fn mul_binomial(&self, m: Mono, c: i64) -> Self {
        let shifted = self.shift(m);
        if c == 0 {
            shifted
        } else {
            shifted.add_scaled(self, &BigInt::from(-c))
        }
    }

    /// Exact division by the binomial `m - c` with `c ∈ {0, 1, -1}`.
    ///
    /// Terms are grouped by their `m`-free part so that each group is a
    /// univariate polynomial in `T = m`; synthetic division is done per group.
    pub fn div_binomial(&self, m: Mono, c: i64) -> Option<Self> {
        debug_assert!((-1..=1).contains(&c));
        let slots: Vec<(usize, u32)> = (0..NSLOTS)
            .filter_map(|s| {
                let e = m.exp(s);
                (e > 0).then_some((s, e))
            })
            .collect();
        let power_of = |t: Mono| -> u32 {
            slots
                .iter()
                .map(|&(s, e)| t.exp(s) / e)
                .min()
                .unwrap_or(0)
        };
        if c == 0 {
            let mut out = Vec::with_capacity(self.len());
            for (t, a) in &self.terms {
                if power_of(*t) == 0 {
                    return None;
                }
                out.push((t.div(m).unwrap(), a.clone()));
            }
            return Some(Self { terms: out });
        }
        let mut groups: FxHashMap<Mono, Vec<(u32, &BigInt)>> = FxHashMap::default();
        for (t, a) in &self.terms {
            let r = power_of(*t);
            let base = t.div(m.pow(r)).unwrap();
            groups.entry(base).or_default().push((r, a));
        }
        // p(c) must vanish on every group
        for g in groups.values() {
            let mut s = BigInt::zero();
            for (r, a) in g {
                if c == -1 && r % 2 == 1 {
                    s -= *a;
                } else {
                    s += *a;
                }
            }
            if !s.is_zero() {
                return None;
            }
        }
        let mut out = Vec::with_capacity(self.len());
        for (base, mut g) in groups {
            g.sort_unstable_by_key(|x| std::cmp::Reverse(x.0));
            let top = g[0].0;
            let low = g.last().unwrap().0;
            let mut dense = vec![BigInt::zero(); (top - low + 1) as usize];
            for (r, a) in g {
                dense[(r - low) as usize] = a.clone();
            }
            let mut q = BigInt::zero();
            for j in (1..dense.len()).rev() {
                q = if c == 1 { &dense[j] + &q } else { &dense[j] - &q };
                if !q.is_zero() {
                    out.push((base.mul(m.pow(low + j as u32 - 1)), q.clone()));
                }
            }
        }
        Some(Self::from_terms(out))
    }

    /// Exact division by `x_v - x_w`.
    pub fn div_difference(&self, v: usize, w: usize) -> Option<Self> {
        if self.is_zero() {
            return Some(Self::zero());
        }
        let mut by_power: Vec<Vec<(Mono, BigInt)>> = Vec::new();
        for (t, a) in &self.terms {
            let r = t.exp(v) as usize;
            if by_power.len() <= r {
                by_power.resize_with(r + 1, Vec::new);
            }
            by_power[r].push((t.with_exp(v, 0), a.clone()));
        }
        let coeffs: Vec<ZPoly> = by_power.into_iter().map(Self::from_terms).collect();
        let xw = Mono::var(w, 1);
        let mut out = Self::zero();
        let mut q = Self::zero();
        for j in (1..coeffs.len()).rev() {
            q = coeffs[j].add(&q.shift(xw));
            out = out.add(&q.shift(Mono::var(v, j as u32 - 1)));
        }
        let rem = coeffs[0].add(&q.shift(xw));
        rem.is_zero().then_some(out)
    }

    pub fn derivative(&self, slot: usize) -> Self {
        let unit = Mono::var(slot, 1);
        let terms = self
            .terms
            .iter()
            .filter(|(t, _)| t.exp(slot) > 0)
            .map(|(t, a)| (t.div(unit).unwrap(), a * BigInt::from(t.exp(slot))))
            .collect();
        Self { terms }
    }

    pub fn map_monomials(&self, f: impl Fn(Mono) -> Mono) -> Self {
        Self::from_terms(self.terms.iter().map(|(t, a)| (f(*t), a.clone())).collect())
    }

    /// Nonnegative gcd of the coefficients.
    pub fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for (_, a) in &self.terms {
            g = g.gcd(a);
            if g.is_one() {
                break;
            }
        }
        g
    }

    pub fn max_exp(&self, slot: usize) -> u32 {
        self.terms.iter().map(|(t, _)| t.exp(slot)).max().unwrap_or(0)
    }

    pub fn uses_slot(&self, slot: usize) -> bool {
        self.terms.iter().any(|(t, _)| t.exp(slot) > 0)
    }

    pub fn leading_is_negative(&self) -> bool {
        self.terms.last().is_some_and(|(_, c)| c.is_negative())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(i: usize) -> Mono {
        Mono::var(i, 1)
    }

    #[test]
    fn binomial_division_round_trip() {
        // (z0^2 z1 - 3 z0 + 5)(z0 z1 - 1) / (z0 z1 - 1)
        let p = ZPoly::from_terms(vec![
            (z(0).pow(2).mul(z(1)), 1.into()),
            (z(0), (-3).into()),
            (Mono::ONE, 5.into()),
        ]);
        let m = z(0).mul(z(1));
        for c in [-1, 0, 1] {
            let prod = p.mul_binomial(m, c);
            assert_eq!(prod.div_binomial(m, c).unwrap(), p);
        }
        assert!(p.div_binomial(z(0), 1).is_none());
        assert!(p.div_binomial(z(1), 0).is_none());
    }

    #[test]
    fn difference_division() {
        let p = ZPoly::from_terms(vec![(z(0).pow(3), 1.into()), (z(2).pow(3), (-1).into())]);
        let q = p.div_difference(0, 2).unwrap();
        let back = q.shift(z(0)).sub(&q.shift(z(2)));
        assert_eq!(back, p);
        assert!(ZPoly::from_terms(vec![(z(0), 1.into())]).div_difference(0, 2).is_none());
    }

    #[test]
    fn mono_packing() {
        let m = Mono::from_exps(&[1, 0, 3, 0, 0, 0, 2, 1]);
        assert_eq!(m.exp(2), 3);
        assert_eq!(m.exp(SLOT_ALPHA), 2);
        assert_eq!(m.degree(), 6);
        assert_eq!(m.with_exp(2, 0).exp(2), 0);
        assert!(m.div(Mono::var(1, 1)).is_none());
    }
}
