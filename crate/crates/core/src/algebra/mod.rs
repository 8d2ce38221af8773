//! Exact arithmetic: rationals, `X`-polynomials, factored rational functions,
//! partial fractions and Laurent expansions.

pub mod factor;
pub mod poly;
pub mod rational;
pub mod ratfn;
pub mod univariate;
pub mod xpoly;

pub use factor::{Factor, Image};
pub use poly::{Mono, ZPoly, MAX_Z};
pub use rational::{rat, Rational};
pub use ratfn::{Binding, FactoredRatFn, Var};
pub use univariate::{laurent_at, laurent_expand, partial_fractions, LaurentSeries, PartialFractions, PfTerm};
pub use xpoly::XPoly;
