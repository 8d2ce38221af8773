use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use twbeta_core::algebra::rat;
use twbeta_core::deviation::assemble_deviation;
use twbeta_core::error::McError;
use twbeta_core::loops::build_one_point;
use twbeta_core::mc::{
    compare_deviation, estimate_tail, lambda_max, sample_lambda_max, sample_tridiag, semicircle_cdf,
    semicircle_ks, sturm_count, wilson_interval, TridiagMatrix,
};

fn tri(d: &[f64], o: &[f64]) -> TridiagMatrix {
    TridiagMatrix::new(d.to_vec(), o.to_vec()).unwrap()
}

#[test]
fn sturm_and_bisection_examples() {
    let m = tri(&[0.0, 0.0], &[1.0]);
    assert_eq!(sturm_count(&m, 0.0), 1);
    assert_eq!(sturm_count(&m, 1e6), 2);
    assert_eq!(sturm_count(&m, -1e6), 0);
    assert!((lambda_max(&m, 1e-12) - 1.0).abs() < 1e-12);
    let d = tri(&[3.0, 1.0, 2.0], &[0.0, 0.0]);
    assert!((lambda_max(&d, 1e-12) - 3.0).abs() < 1e-12);
    assert!(TridiagMatrix::new(vec![0.0, 0.0], vec![-1.0]).is_err());
    assert!(TridiagMatrix::new(vec![0.0, 0.0], vec![]).is_err());
}

#[test]
fn dense_eigensolver_agreement() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for beta in [1.0, 2.0, 4.0, 0.7] {
        for _ in 0..25 {
            let m = sample_tridiag(50, beta, 1.0, &mut rng).unwrap();
            let mut dense = DMatrix::<f64>::zeros(50, 50);
            for i in 0..50 {
                dense[(i, i)] = m.diag[i];
                if i + 1 < 50 {
                    dense[(i, i + 1)] = m.offdiag[i];
                    dense[(i + 1, i)] = m.offdiag[i];
                }
            }
            let mut ev: Vec<f64> = dense.symmetric_eigen().eigenvalues.iter().copied().collect();
            ev.sort_by(f64::total_cmp);
            assert!((lambda_max(&m, 1e-13) - ev[49]).abs() < 1e-10);
            // counts between consecutive eigenvalues
            for (i, w) in ev.windows(2).enumerate() {
                if w[1] - w[0] > 1e-8 {
                    assert_eq!(sturm_count(&m, 0.5 * (w[0] + w[1])), i + 1);
                }
            }
        }
    }
}

#[test]
fn single_eigenvalue_gaussian_tail() {
    // N = 1: λ ~ N(0, 2t/β), P[λ > 2] = erfc(√2)/2 at β = 2, t = 1
    let exact = 0.022750131948179195;
    let e = estimate_tail(1, 2.0, 1.0, 2.0, 100_000, 3).unwrap();
    assert!((e.p_hat - exact).abs() < 3.0 * e.stderr, "{} vs {exact}", e.p_hat);
    assert!(e.wilson.0 < exact && exact < e.wilson.1);
    let far = estimate_tail(10, 2.0, 1.0, 50.0, 1000, 3).unwrap();
    assert_eq!(far.p_hat, 0.0);
}

#[test]
fn semicircle_limit() {
    let ks = semicircle_ks(1000, 2.0, 1.0, 100, 5, 2001).unwrap();
    assert!(ks <= 0.01, "{ks}");
    assert_eq!(semicircle_cdf(0.0, 1.0), 0.5);
    assert_eq!(semicircle_cdf(2.5, 1.0), 1.0);
}

#[test]
fn second_moment() {
    // E tr(H²)/N = 2t/(βN) + t(N-1)/N
    for beta in [1.0, 2.0, 4.0] {
        let n = 20;
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let k = 4000;
        let (mut s1, mut s2, mut s2sq) = (0.0, 0.0, 0.0);
        for _ in 0..k {
            let m = sample_tridiag(n, beta, 1.0, &mut rng).unwrap();
            let tr: f64 = m.diag.iter().sum();
            let tr2: f64 = m.diag.iter().map(|d| d * d).sum::<f64>() + 2.0 * m.offdiag.iter().map(|o| o * o).sum::<f64>();
            s1 += tr / n as f64;
            s2 += tr2 / n as f64;
            s2sq += (tr2 / n as f64).powi(2);
        }
        let kf = k as f64;
        let mean2 = s2 / kf;
        let sd2 = ((s2sq / kf - mean2 * mean2) / kf).sqrt();
        let want = 2.0 / (beta * n as f64) + (n as f64 - 1.0) / n as f64;
        assert!((mean2 - want).abs() < 4.0 * sd2, "β = {beta}: {mean2} vs {want}");
        let sd1 = (2.0 / (beta * n as f64 * n as f64) / kf).sqrt();
        assert!((s1 / kf).abs() < 4.0 * sd1);
    }
}

#[test]
fn scaling_in_t() {
    let one = sample_lambda_max(30, 2.0, 1.0, 50, 17, 1e-13).unwrap();
    let four = sample_lambda_max(30, 2.0, 4.0, 50, 17, 1e-13).unwrap();
    for (a, b) in one.iter().zip(&four) {
        assert!((2.0 * a - b).abs() < 1e-11);
    }
}

#[test]
fn deterministic_across_thread_counts() {
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| estimate_tail(25, 1.0, 1.0, 2.1, 20_000, 42).unwrap())
    };
    assert_eq!(run(1), run(4));
    let l1 = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap().install(|| sample_lambda_max(10, 4.0, 1.0, 100, 1, 1e-12).unwrap());
    let l3 = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap().install(|| sample_lambda_max(10, 4.0, 1.0, 100, 1, 1e-12).unwrap());
    assert_eq!(l1, l3);
}

#[test]
fn wilson_interval_contains_estimate() {
    let (lo, hi) = wilson_interval(30, 1000, 1.96);
    assert!(lo < 0.03 && 0.03 < hi);
    let (lo, hi) = wilson_interval(0, 1000, 1.96);
    assert_eq!(lo, 0.0);
    assert!(hi > 0.0 && hi < 0.01);
}

#[test]
fn comparison_with_deviation_expansion() {
    let t = build_one_point(3).unwrap();
    let e = assemble_deviation(2, &t).unwrap();
    let c = compare_deviation(20, &rat(2, 1), &rat(1, 1), 2.2, 400_000, 2, 1, &e).unwrap();
    assert!(c.ratio > 2.0 / 3.0 && c.ratio < 1.5, "{}", c.ratio);
    let rare = compare_deviation(80, &rat(2, 1), &rat(1, 1), 2.2, 1_000_000, 2, 1, &e);
    assert!(matches!(rare, Err(McError::RegimeTooRare { .. })));
    let c = compare_deviation(10, &rat(1, 1), &rat(1, 1), 2.3, 200_000, 2, 2, &e).unwrap();
    assert!(c.ratio > 0.8 && c.ratio < 1.25, "{}", c.ratio);
    // at β = 4 the regime where the expansion applies is out of reach of direct sampling
    let b4 = compare_deviation(6, &rat(4, 1), &rat(1, 1), 2.5, 1_000_000, 2, 2, &e);
    assert!(matches!(b4, Err(McError::RegimeTooRare { .. })));
}
