//! The fixed set of irreducible denominator factors.

use std::fmt;

use super::poly::{Mono, ZPoly, SLOT_ALPHA};
use super::rational::Rational;
use crate::error::AlgebraError;
use num_traits::{One, Zero};

/// Allowed denominator factors; z-indices are 0-based slots.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Factor {
    Z(u8),
    ZMinus1(u8),
    ZPlus1(u8),
    AlphaZMinus1(u8),
    ZZMinus1(u8, u8),
    Alpha,
    AlphaMinus1,
    AlphaPlus1,
    AlphaSqPlus1,
}

/// Where a variable is sent by a substitution.
#[derive(Clone, Debug, PartialEq)]
pub enum Image {
    Z(usize),
    Alpha,
    Value(Rational),
}

impl Factor {
    /// The factor as `m - c`.
    pub fn binomial(self) -> (Mono, i64) {
        let z = |i: u8| Mono::var(i as usize, 1);
        let a = Mono::var(SLOT_ALPHA, 1);
        match self {
            Factor::Z(i) => (z(i), 0),
            Factor::ZMinus1(i) => (z(i), 1),
            Factor::ZPlus1(i) => (z(i), -1),
            Factor::AlphaZMinus1(i) => (a.mul(z(i)), 1),
            Factor::ZZMinus1(i, j) => (z(i).mul(z(j)), 1),
            Factor::Alpha => (a, 0),
            Factor::AlphaMinus1 => (a, 1),
            Factor::AlphaPlus1 => (a, -1),
            Factor::AlphaSqPlus1 => (a.pow(2), -1),
        }
    }

    pub fn poly(self) -> ZPoly {
        let (m, c) = self.binomial();
        ZPoly::binomial(m, c)
    }

    pub fn uses_slot(self, slot: usize) -> bool {
        self.binomial().0.exp(slot) > 0
    }

    pub fn max_z_slot(self) -> Option<usize> {
        match self {
            Factor::Z(i) | Factor::ZMinus1(i) | Factor::ZPlus1(i) | Factor::AlphaZMinus1(i) => {
                Some(i as usize)
            }
            Factor::ZZMinus1(_, j) => Some(j as usize),
            _ => None,
        }
    }

    /// True for the factors that vanish at `z_i = α = 1`.
    pub fn vanishes_at_one(self) -> bool {
        matches!(
            self,
            Factor::ZMinus1(_) | Factor::AlphaZMinus1(_) | Factor::ZZMinus1(_, _) | Factor::AlphaMinus1
        )
    }

    pub fn zz(i: usize, j: usize) -> Factor {
        assert_ne!(i, j);
        Factor::ZZMinus1(i.min(j) as u8, i.max(j) as u8)
    }

    /// All allowed factors for `nz` z-variables.
    pub fn all(nz: usize) -> Vec<Factor> {
        let mut out = Vec::new();
        for i in 0..nz as u8 {
            out.extend([
                Factor::Z(i),
                Factor::ZMinus1(i),
                Factor::ZPlus1(i),
                Factor::AlphaZMinus1(i),
            ]);
            for j in i + 1..nz as u8 {
                out.push(Factor::ZZMinus1(i, j));
            }
        }
        out.extend([
            Factor::Alpha,
            Factor::AlphaMinus1,
            Factor::AlphaPlus1,
            Factor::AlphaSqPlus1,
        ]);
        out
    }

    /// Canonical text id, e.g. `z1-1`, `a*z2-1`, `z1*z3-1`, `a^2+1`.
    pub fn id(self) -> String {
        match self {
            Factor::Z(i) => format!("z{}", i + 1),
            Factor::ZMinus1(i) => format!("z{}-1", i + 1),
            Factor::ZPlus1(i) => format!("z{}+1", i + 1),
            Factor::AlphaZMinus1(i) => format!("a*z{}-1", i + 1),
            Factor::ZZMinus1(i, j) => format!("z{}*z{}-1", i + 1, j + 1),
            Factor::Alpha => "a".into(),
            Factor::AlphaMinus1 => "a-1".into(),
            Factor::AlphaPlus1 => "a+1".into(),
            Factor::AlphaSqPlus1 => "a^2+1".into(),
        }
    }

    pub fn from_id(s: &str) -> Result<Factor, AlgebraError> {
        let bad = || AlgebraError::Parse(format!("unknown factor id {s:?}"));
        let zidx = |t: &str| -> Result<u8, AlgebraError> {
            let i: u8 = t.strip_prefix('z').ok_or_else(bad)?.parse().map_err(|_| bad())?;
            if i == 0 {
                return Err(bad());
            }
            Ok(i - 1)
        };
        Ok(match s {
            "a" => Factor::Alpha,
            "a-1" => Factor::AlphaMinus1,
            "a+1" => Factor::AlphaPlus1,
            "a^2+1" => Factor::AlphaSqPlus1,
            _ => {
                if let Some(rest) = s.strip_prefix("a*") {
                    Factor::AlphaZMinus1(zidx(rest.strip_suffix("-1").ok_or_else(bad)?)?)
                } else if let Some(body) = s.strip_suffix("-1") {
                    match body.split_once('*') {
                        Some((l, r)) => {
                            let (i, j) = (zidx(l)?, zidx(r)?);
                            if i >= j {
                                return Err(bad());
                            }
                            Factor::ZZMinus1(i, j)
                        }
                        None => Factor::ZMinus1(zidx(body)?),
                    }
                } else if let Some(body) = s.strip_suffix("+1") {
                    Factor::ZPlus1(zidx(body)?)
                } else {
                    Factor::Z(zidx(s)?)
                }
            }
        })
    }

    /// Image of the factor under a substitution, as a constant times allowed factors.
    pub fn substitute(
        self,
        zimg: &dyn Fn(usize) -> Image,
        aimg: &Image,
    ) -> Result<(Rational, Vec<Factor>), AlgebraError> {
        use Image as I;
        let zi = |i: u8| match zimg(i as usize) {
            I::Alpha => aimg.clone(),
            other => other,
        };
        let one = Rational::one();
        let hit = || AlgebraError::PoleHit(self.id());
        let nonzero = |c: Rational| -> Result<(Rational, Vec<Factor>), AlgebraError> {
            if c.is_zero() {
                Err(hit())
            } else {
                Ok((c, vec![]))
            }
        };
        // image of `x - c` for a single variable image
        let shifted = |img: I, c: i64| -> Result<(Rational, Vec<Factor>), AlgebraError> {
            match img {
                I::Value(r) => nonzero(r - Rational::from_integer(c.into())),
                I::Z(j) => Ok((
                    one.clone(),
                    vec![match c {
                        0 => Factor::Z(j as u8),
                        1 => Factor::ZMinus1(j as u8),
                        _ => Factor::ZPlus1(j as u8),
                    }],
                )),
                I::Alpha => Ok((
                    one.clone(),
                    vec![match c {
                        0 => Factor::Alpha,
                        1 => Factor::AlphaMinus1,
                        _ => Factor::AlphaPlus1,
                    }],
                )),
            }
        };
        // image of `x*y - 1`
        let product = |p: I, q: I| -> Result<(Rational, Vec<Factor>), AlgebraError> {
            match (p, q) {
                (I::Value(r), I::Value(s)) => nonzero(r * s - &one),
                (I::Value(r), other) | (other, I::Value(r)) => {
                    if r.is_zero() {
                        Ok((-one.clone(), vec![]))
                    } else if r == one {
                        shifted(other, 1)
                    } else if r == -one.clone() {
                        let (c, f) = shifted(other, -1)?;
                        Ok((-c, f))
                    } else {
                        Err(AlgebraError::NotRepresentable(format!(
                            "{} with a value {r}",
                            self.id()
                        )))
                    }
                }
                (I::Z(i), I::Z(j)) if i == j => Ok((
                    one.clone(),
                    vec![Factor::ZMinus1(i as u8), Factor::ZPlus1(i as u8)],
                )),
                (I::Z(i), I::Z(j)) => Ok((one.clone(), vec![Factor::zz(i, j)])),
                (I::Z(i), I::Alpha) | (I::Alpha, I::Z(i)) => {
                    Ok((one.clone(), vec![Factor::AlphaZMinus1(i as u8)]))
                }
                (I::Alpha, I::Alpha) => {
                    Ok((one.clone(), vec![Factor::AlphaMinus1, Factor::AlphaPlus1]))
                }
            }
        };
        match self {
            Factor::Z(i) => shifted(zi(i), 0),
            Factor::ZMinus1(i) => shifted(zi(i), 1),
            Factor::ZPlus1(i) => shifted(zi(i), -1),
            Factor::AlphaZMinus1(i) => product(aimg.clone(), zi(i)),
            Factor::ZZMinus1(i, j) => product(zi(i), zi(j)),
            Factor::Alpha => shifted(aimg.clone(), 0),
            Factor::AlphaMinus1 => shifted(aimg.clone(), 1),
            Factor::AlphaPlus1 => shifted(aimg.clone(), -1),
            Factor::AlphaSqPlus1 => match aimg {
                I::Value(r) => nonzero(r * r + &one),
                _ => Ok((one, vec![Factor::AlphaSqPlus1])),
            },
        }
    }
}

impl fmt::Display for Factor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.id())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_round_trip() {
        for f in Factor::all(4) {
            assert_eq!(Factor::from_id(&f.id()).unwrap(), f);
        }
        assert!(Factor::from_id("z2*z1-1").is_err());
        assert!(Factor::from_id("b-1").is_err());
    }
}
