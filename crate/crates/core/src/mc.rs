//! Monte-Carlo sampling of the largest eigenvalue through the β-Hermite
//! tridiagonal model.
//!
//! The standard model (diagonal `N(0,2)/√2`, off-diagonal `χ_{β(N-i)}/√2`)
//! has joint eigenvalue weight `e^{-Σμ²/2}|Δ|^β`; `λ = √(2t/(βN)) μ` turns
//! it into `e^{-(Nβ/2)Σλ²/(2t)}|Δ|^β`, with the edge at `2√t`.
//!
//! Every sample draws from its own `ChaCha8` stream: the generator is
//! seeded with the 64-bit seed and `set_stream` selects the sample index.
//! Results therefore do not depend on the thread count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};
use rayon::prelude::*;

use crate::algebra::rational::to_f64 as rational_to_f64;
use crate::algebra::Rational;
use crate::deviation::{predicted_tail, DeviationExpansion};
use crate::error::McError;

/// Replacement for an exactly vanishing pivot in the Sturm recursion,
/// relative to the matrix scale.
pub const PIVOT_EPS: f64 = 1e-300;

/// Normal quantile used for confidence intervals (95%).
pub const Z95: f64 = 1.959963984540054;

#[derive(Clone, Debug, PartialEq)]
pub struct TridiagMatrix {
    pub diag: Vec<f64>,
    pub offdiag: Vec<f64>,
}

impl TridiagMatrix {
    pub fn new(diag: Vec<f64>, offdiag: Vec<f64>) -> Result<Self, McError> {
        if diag.is_empty() || offdiag.len() + 1 != diag.len() {
            return Err(McError::InvalidParameter("need N diagonal and N-1 off-diagonal entries".into()));
        }
        if offdiag.iter().any(|b| !(*b >= 0.0)) {
            return Err(McError::InvalidParameter("off-diagonal entries must be nonnegative".into()));
        }
        Ok(Self { diag, offdiag })
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn gershgorin(&self) -> (f64, f64) {
        let n = self.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let r = if i > 0 { self.offdiag[i - 1] } else { 0.0 }
                + if i + 1 < n { self.offdiag[i] } else { 0.0 };
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        (lo, hi)
    }
}

fn check_model(n: usize, beta: f64, t: f64) -> Result<(), McError> {
    if n == 0 {
        return Err(McError::InvalidParameter("N must be at least 1".into()));
    }
    if !(beta > 0.0 && beta.is_finite()) || !(t > 0.0 && t.is_finite()) {
        return Err(McError::InvalidParameter("beta and t must be positive".into()));
    }
    Ok(())
}

/// One draw of the scaled β-Hermite matrix.
pub fn sample_tridiag<R: rand::Rng>(n: usize, beta: f64, t: f64, rng: &mut R) -> Result<TridiagMatrix, McError> {
    check_model(n, beta, t)?;
    let mut m = TridiagMatrix {
        diag: vec![0.0; n],
        offdiag: vec![0.0; n.saturating_sub(1)],
    };
    fill_tridiag(&mut m, beta, t, rng);
    Ok(m)
}

fn fill_tridiag<R: rand::Rng>(m: &mut TridiagMatrix, beta: f64, t: f64, rng: &mut R) {
    let n = m.diag.len();
    let nf = n as f64;
    let sd = (2.0 * t / (beta * nf)).sqrt();
    let so = (t / (beta * nf)).sqrt();
    for d in m.diag.iter_mut() {
        let z: f64 = StandardNormal.sample(rng);
        *d = sd * z;
    }
    for (i, o) in m.offdiag.iter_mut().enumerate() {
        // χ_k = √(2 Γ(k/2, 1)), k = β(N - 1 - i)
        let k = beta * (nf - 1.0 - i as f64);
        let g = Gamma::new(k / 2.0, 1.0).expect("positive shape");
        *o = so * (2.0 * g.sample(rng)).sqrt();
    }
}

/// Number of eigenvalues `< x` from the negative pivots of `LDLᵀ` of
/// `m - x`.
pub fn sturm_count(m: &TridiagMatrix, x: f64) -> usize {
    let mut count = 0;
    let mut d = m.diag[0] - x;
    if d == 0.0 {
        d = -PIVOT_EPS;
    }
    if d < 0.0 {
        count += 1;
    }
    for i in 1..m.diag.len() {
        let b = m.offdiag[i - 1];
        d = m.diag[i] - x - b * b / d;
        if d == 0.0 {
            d = -PIVOT_EPS;
        }
        if d < 0.0 {
            count += 1;
        }
    }
    count
}

/// Largest eigenvalue by bisection within the Gershgorin interval.
pub fn lambda_max(m: &TridiagMatrix, tol: f64) -> f64 {
    let n = m.len();
    let (lo0, hi0) = m.gershgorin();
    let (mut lo, mut hi) = (lo0 - tol, hi0 + tol);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if sturm_count(m, mid) == n {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Semicircle distribution function on `[-2√t, 2√t]`.
pub fn semicircle_cdf(x: f64, t: f64) -> f64 {
    let r = 2.0 * t.sqrt();
    if x <= -r {
        return 0.0;
    }
    if x >= r {
        return 1.0;
    }
    0.5 + x * (r * r - x * x).sqrt() / (4.0 * std::f64::consts::PI * t)
        + (x / r).asin() / std::f64::consts::PI
}

/// Wilson score interval for `hits` successes out of `n`.
pub fn wilson_interval(hits: u64, n: u64, z: f64) -> (f64, f64) {
    let nf = n as f64;
    let p = hits as f64 / nf;
    let z2 = z * z;
    let denom = 1.0 + z2 / nf;
    let centre = (p + z2 / (2.0 * nf)) / denom;
    let half = z * (p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

#[derive(Clone, Debug, PartialEq)]
pub struct TailEstimate {
    pub p_hat: f64,
    pub stderr: f64,
    pub hits: u64,
    pub n_samples: u64,
    pub seed: u64,
    pub n: usize,
    pub beta: f64,
    pub t: f64,
    pub a: f64,
    pub wilson: (f64, f64),
}

impl TailEstimate {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "p_hat": self.p_hat,
            "stderr": self.stderr,
            "hits": self.hits,
            "n_samples": self.n_samples,
            "seed": self.seed,
            "params": {"N": self.n, "beta": self.beta, "t": self.t, "a": self.a},
            "wilson95": [self.wilson.0, self.wilson.1],
        })
    }
}

const CHUNK: u64 = 4096;

/// Estimates `μ[λ_max > a]`: a sample hits when fewer than `N` eigenvalues
/// lie below `a`.
pub fn estimate_tail(n: usize, beta: f64, t: f64, a: f64, n_samples: u64, seed: u64) -> Result<TailEstimate, McError> {
    check_model(n, beta, t)?;
    if n_samples == 0 {
        return Err(McError::InvalidParameter("need at least one sample".into()));
    }
    let chunks = n_samples.div_ceil(CHUNK);
    let hits: u64 = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut m = TridiagMatrix {
                diag: vec![0.0; n],
                offdiag: vec![0.0; n - 1],
            };
            let mut h = 0u64;
            for i in c * CHUNK..((c + 1) * CHUNK).min(n_samples) {
                let mut rng = sample_rng(seed, i);
                fill_tridiag(&mut m, beta, t, &mut rng);
                if sturm_count(&m, a) < n {
                    h += 1;
                }
            }
            h
        })
        .sum();
    let p = hits as f64 / n_samples as f64;
    Ok(TailEstimate {
        p_hat: p,
        stderr: (p * (1.0 - p) / n_samples as f64).sqrt(),
        hits,
        n_samples,
        seed,
        n,
        beta,
        t,
        a,
        wilson: wilson_interval(hits, n_samples, Z95),
    })
}

/// `λ_max` of each sample, in sample order.
pub fn sample_lambda_max(n: usize, beta: f64, t: f64, n_samples: u64, seed: u64, tol: f64) -> Result<Vec<f64>, McError> {
    check_model(n, beta, t)?;
    if !(tol > 0.0) {
        return Err(McError::InvalidParameter("tolerance must be positive".into()));
    }
    Ok((0..n_samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = sample_rng(seed, i);
            let m = sample_tridiag(n, beta, t, &mut rng).expect("checked parameters");
            lambda_max(&m, tol)
        })
        .collect())
}

/// Kolmogorov–Smirnov distance between the averaged empirical spectral
/// distribution of `n_samples` matrices and the semicircle, on a grid of
/// `grid` points.
pub fn semicircle_ks(n: usize, beta: f64, t: f64, n_samples: u64, seed: u64, grid: usize) -> Result<f64, McError> {
    check_model(n, beta, t)?;
    let r = 2.0 * t.sqrt();
    let xs: Vec<f64> = (0..grid).map(|i| -1.2 * r + 2.4 * r * i as f64 / (grid - 1) as f64).collect();
    let counts: Vec<u64> = (0..n_samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = sample_rng(seed, i);
            let m = sample_tridiag(n, beta, t, &mut rng).expect("checked parameters");
            xs.iter().map(|x| sturm_count(&m, *x) as u64).collect::<Vec<_>>()
        })
        .reduce(
            || vec![0; grid],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
    let total = (n as u64 * n_samples) as f64;
    Ok(xs
        .iter()
        .zip(counts)
        .map(|(x, c)| (c as f64 / total - semicircle_cdf(*x, t)).abs())
        .fold(0.0, f64::max))
}

#[derive(Clone, Debug, PartialEq)]
pub struct DeviationComparison {
    pub estimate: TailEstimate,
    pub order: usize,
    pub predicted: f64,
    pub ln_predicted: f64,
    pub ratio: f64,
    pub ln_difference: f64,
    /// Relative statistical error plus the size of the last included
    /// correction.
    pub uncertainty: f64,
}

impl DeviationComparison {
    pub fn to_json(&self) -> serde_json::Value {
        let mut v = self.estimate.to_json();
        v["order"] = self.order.into();
        v["predicted"] = self.predicted.into();
        v["ln_predicted"] = self.ln_predicted.into();
        v["ratio"] = self.ratio.into();
        v["ln_difference"] = self.ln_difference.into();
        v["uncertainty"] = self.uncertainty.into();
        v
    }
}

/// Direct MC estimate of `μ[λ_max > a]` against the integrated truncated
/// large-deviation density.
#[allow(clippy::too_many_arguments)]
pub fn compare_deviation(
    n: usize,
    beta: &Rational,
    t: &Rational,
    a: f64,
    n_samples: u64,
    order: usize,
    seed: u64,
    exp: &DeviationExpansion,
) -> Result<DeviationComparison, McError> {
    let (predicted, ln_predicted) = predicted_tail(n as u64, beta, t, a, order, exp)?;
    let expected_hits = predicted * n_samples as f64;
    if !(expected_hits >= 100.0) {
        return Err(McError::RegimeTooRare { expected_hits });
    }
    let bf = rational_to_f64(beta);
    let tf = rational_to_f64(t);
    let estimate = estimate_tail(n, bf, tf, a, n_samples, seed)?;
    let last = crate::deviation::eval_density(n as u64, beta, t, a, order, exp)?.last_term;
    let rel_stat = if estimate.p_hat > 0.0 { estimate.stderr / estimate.p_hat } else { f64::INFINITY };
    Ok(DeviationComparison {
        ratio: estimate.p_hat / predicted,
        ln_difference: (estimate.p_hat.ln() - ln_predicted).abs(),
        uncertainty: rel_stat + last,
        estimate,
        order,
        predicted,
        ln_predicted,
    })
}
