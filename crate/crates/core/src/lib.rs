//! Exact loop-equation machinery for the Gaussian β-ensemble.
//!
//! Correlators of the ensemble with a hard wall are computed in exact
//! rational arithmetic; from them the large-deviation expansion of the
//! largest eigenvalue and the right-tail expansion of the Tracy–Widom laws
//! are assembled and checked against an independent Painlevé/Airy series
//! and a Monte-Carlo sampler of the tridiagonal model.

pub mod algebra;
pub mod error;
pub mod loops;
pub mod reference;
pub mod numeric;
pub mod deviation;
pub mod tail;
pub mod painleve;
pub mod mc;
