//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! Criteria listed in `KNOWN_RED` are reported but do not fail the target;
//! every other failure does.

use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use twbeta_core::algebra::{rat, Factor, Rational, XPoly};
use twbeta_core::deviation::{assemble_deviation, integrate_correction, predicted_tail, ExactPrefactor};
use twbeta_core::loops::{build_one_point, build_table, collision_order, wall_restriction, CorrelatorTable};
use twbeta_core::mc::{estimate_tail, lambda_max, sample_tridiag, semicircle_ks};
use twbeta_core::numeric::{from_i64, to_f64};
use twbeta_core::painleve::{cross_validate, painleve_series, GradedAsySeries};
use twbeta_core::reference;
use twbeta_core::tail::{
    assemble_tail, breve_extract, breve_to_r, double_scaling_check, series_exp, series_log, BreveEntry,
    PrefactorExponents, TailExpansion, TailKind,
};

const KNOWN_RED: &[usize] = &[8, 12];

/// Entries with `n + k = 6` that the exact recursion cannot reach in budget.
const LAYER_SIX_OUT_OF_REACH: &[(usize, usize)] = &[(4, 2), (5, 1), (6, 0)];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn within(elapsed: Duration, secs: u64) -> bool {
    elapsed <= Duration::from_secs(secs)
}

fn criterion_1() -> Outcome {
    let s = Instant::now();
    let t = build_table(3).unwrap();
    let mut bad = vec![];
    for (n, k, _) in reference::CORRELATORS {
        if t.value(n, k).unwrap() != &reference::correlator(n, k).unwrap() {
            bad.push(format!("omega_{n}^[{k}]"));
        }
    }
    let el = s.elapsed();
    outcome(
        bad.is_empty() && within(el, 10),
        format!("5 printed correlators, exact, mismatches {bad:?}, {el:.1?} (budget 10 s)"),
    )
}

fn criterion_2() -> Outcome {
    let s = Instant::now();
    let t = build_one_point(4).unwrap();
    let bad: Vec<usize> = (2..=4)
        .filter(|&k| integrate_correction(k, &t).unwrap() != reference::integral(k).unwrap())
        .collect();
    let el = s.elapsed();
    outcome(
        bad.is_empty() && within(el, 30),
        format!("integrals k = 2, 3, 4 exact, mismatches {bad:?}, {el:.1?} (budget 30 s)"),
    )
}

fn criterion_3(entries: &[BreveEntry], t: &CorrelatorTable) -> Outcome {
    let mut ok = true;
    let mut orders = vec![];
    for (m, p, poly) in reference::breve() {
        let e = &entries[m - 1];
        ok &= e.p == p && e.poly == poly;
        let w = wall_restriction(t.get(1, m + 1).unwrap()).unwrap();
        let order = w
            .denominator()
            .iter()
            .filter(|(f, _)| matches!(f, Factor::AlphaMinus1))
            .map(|(_, e)| *e)
            .sum::<u32>();
        orders.push(order);
    }
    ok &= orders == [4, 7, 10];
    outcome(ok, format!("(p, breve R) for m = 1, 2, 3 exact, pole orders {orders:?} (expected [4, 7, 10])"))
}

fn criterion_4(entries: &[BreveEntry]) -> Outcome {
    let r = breve_to_r(&entries[..3]).unwrap();
    let printed = reference::r_polys();
    let e1 = entries[0].poly.scale(&rat(1, 24));
    let three_x = XPoly::x().scale(&rat(3, 4));
    let minus = &e1 - &three_x;
    let plus = &e1 + &three_x;
    let ok = r == printed && r[0] == minus;
    outcome(
        ok,
        format!(
            "R_1..R_3 exact; R_1 = breve R_1/24 - 3X/4 holds; the '+3X/4' form {} the printed R_1",
            if plus == printed[0] { "also matches" } else { "contradicts" }
        ),
    )
}

fn criterion_5(te: &TailExpansion, el: Duration) -> Outcome {
    let mut checked = 0;
    let mut bad = vec![];
    for beta in [1u32, 2, 4] {
        let x = rat(2, beta as i64);
        let want = reference::tail_coefficients(beta).unwrap();
        for m in 1..=6 {
            checked += 1;
            if te.complement_expanded[m].eval(&x) != want[m - 1] {
                bad.push((beta, m));
            }
        }
    }
    let x = rat(1, 1);
    let e1 = te.complement_exponent[1].eval(&x);
    let e2 = te.complement_exponent[2].eval(&x);
    let composite = &e2 + &e1 * &e1 / rat(2, 1);
    let ok = bad.is_empty() && composite == rat(3745, 1152) && composite == rat(35, 16) + rat(1, 2) * rat(35, 24) * rat(35, 24);
    outcome(
        ok && within(el, 1800),
        format!("{checked} coefficients through s^(-9) exact, mismatches {bad:?}, composite {composite}, {el:.1?} (budget 30 min)"),
    )
}

fn criterion_6(te: &TailExpansion) -> Outcome {
    let ps = painleve_series(7);
    let with_one = |v: Vec<Rational>| -> Vec<Rational> { std::iter::once(rat(1, 1)).chain(v).collect() };
    let q_ok = ps.int_q.normalize().coeffs == with_one(reference::int_q_coefficients());
    let r_ok = ps.int_r.normalize().coeffs == with_one(reference::int_r_coefficients());
    let mut cv = vec![];
    for beta in [1u32, 2, 4] {
        cv.push(match cross_validate(beta, te, 6) {
            Ok(c) => c.coefficients_checked,
            Err(_) => 0,
        });
    }
    outcome(
        q_ok && r_ok && cv.iter().all(|&c| c == 12),
        format!("int q {q_ok}, int R {r_ok} (7 coefficients each); cross_validate through 6, coefficients checked {cv:?}"),
    )
}

fn criterion_7(t: &CorrelatorTable) -> Outcome {
    let s = Instant::now();
    let dev = assemble_deviation(3, t).unwrap();
    let rep = double_scaling_check(&dev, 3);
    let el = s.elapsed();
    let rep = match rep {
        Ok(r) => r,
        Err(e) => return outcome(false, format!("double scaling failed: {e}")),
    };
    let pre = PrefactorExponents::for_kind(TailKind::Complement);
    // at each β: rate -2β/3, power -3β/4, Γ(β/2)/((4β)^{β/2} 2π)
    let mut closed = true;
    for beta in [1i64, 2, 4, 7] {
        let x = rat(2, beta);
        let b = rat(beta, 1);
        closed &= rep.rate.eval(&x) == -rat(2, 3) * &b
            && rep.complement_log_power.eval(&x) == -rat(3, 4) * &b
            && rep.complement_prefactor.gamma.eval(&x) == rat(1, 1)
            && rep.complement_prefactor.two.eval(&x) == -&b - rat(1, 1)
            && rep.complement_prefactor.beta.eval(&x) == -&b / rat(2, 1)
            && rep.complement_prefactor.pi.eval(&x) == rat(-1, 1);
    }
    let rate_ok = rep.rate == TailExpansion::rate();
    let log_ok = rep.complement_log_power == TailExpansion::log_power(TailKind::Complement);
    let pre_ok = rep.complement_prefactor == pre && closed;
    let ok = rate_ok && log_ok && pre_ok && rep.stray.is_empty() && within(el, 60);
    outcome(
        ok,
        format!(
            "rate {}, log power {}, prefactor exponents (Gamma, 2, beta, pi) = ({}, {}, {}, {}), stray u-powers {}, {el:.1?} (budget 1 min)",
            rep.rate, rep.complement_log_power, pre.gamma, pre.two, pre.beta, pre.pi, rep.stray.len()
        ),
    )
}

fn criterion_8(t: &mut CorrelatorTable) -> Outcome {
    let s = Instant::now();
    let reachable: Vec<(usize, usize)> = (2..=6)
        .flat_map(|l| (1..=l).map(move |n| (n, l - n)))
        .filter(|nk| !LAYER_SIX_OUT_OF_REACH.contains(nk))
        .collect();
    t.extend(&reachable).unwrap();
    let mut checked = vec![];
    let mut violations = vec![];
    for c in t.iter() {
        let (n, k) = (c.n, c.k);
        if n + k > 6 || (n, k) == (1, 0) {
            continue;
        }
        let (d, xdeg) = collision_order(&c.value);
        if d > 4 * n as i64 + 3 * k as i64 - 6 || xdeg as usize > n + k - 1 {
            violations.push(format!("({n},{k}) d = {d}, xdeg = {xdeg}"));
        }
        for i in 1..n {
            if c.value.swap(0, i) != c.value {
                violations.push(format!("({n},{k}) not symmetric in z1, z{}", i + 1));
            }
        }
        for f in c.value.denominator().keys() {
            let allowed = matches!(
                f,
                Factor::ZMinus1(_)
                    | Factor::ZPlus1(_)
                    | Factor::AlphaZMinus1(_)
                    | Factor::ZZMinus1(_, _)
                    | Factor::AlphaMinus1
                    | Factor::AlphaPlus1
                    | Factor::Alpha
            ) || (matches!(f, Factor::Z(_)) && n == 1 && k <= 1);
            if !allowed {
                violations.push(format!("({n},{k}) pole at {}", f.id()));
            }
        }
        checked.push((n, k));
    }
    checked.sort();
    let missing: Vec<(usize, usize)> = (2..=6)
        .flat_map(|l| (1..=l).map(move |n| (n, l - n)))
        .filter(|nk| !checked.contains(nk))
        .collect();
    let el = s.elapsed();
    let complete = missing.is_empty();
    outcome(
        violations.is_empty() && complete && within(el, 300),
        format!(
            "{} entries checked, violations {violations:?}; not computed {missing:?} (expected {LAYER_SIX_OUT_OF_REACH:?}); checks {el:.1?} on the shared table (budget 5 min)",
            checked.len()
        ),
    )
}

fn criterion_9() -> Outcome {
    let mut ratios = vec![];
    let mut ok = true;
    for beta in [1i64, 2, 4] {
        for order in 0..=3usize {
            let errs: Vec<f64> = [20u64, 40, 80]
                .iter()
                .map(|&n| {
                    let b = rat(beta, 1);
                    let r = ExactPrefactor::selberg(n, &b) / ExactPrefactor::stirling(n, &b, order);
                    to_f64(&(r - from_i64(1))).abs()
                })
                .collect();
            for w in errs.windows(2) {
                let ratio = w[0] / w[1];
                ok &= ratio >= 2f64.powi(order as i32) && ratio <= 2f64.powi(order as i32 + 2);
                ratios.push(ratio);
            }
        }
    }
    let lo = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = ratios.iter().cloned().fold(0.0, f64::max);
    outcome(ok, format!("{} error ratios per doubling, all in [2^order, 2^(order+2)], range {lo:.4}..{hi:.4}", ratios.len()))
}

fn criterion_10(te: &TailExpansion) -> Outcome {
    let mut deriv = true;
    for j in 1..=te.order() {
        let k = &XPoly::constant(rat(3, 4)) + &XPoly::x().scale(&rat(3 * (j as i64 - 1), 4));
        deriv &= te.density_expanded[j] == &te.complement_expanded[j] + &(&k * &te.complement_expanded[j - 1]);
    }
    let explog = series_log(&te.complement_expanded) == te.complement_exponent
        && series_exp(&te.complement_exponent) == te.complement_expanded
        && series_log(&te.density_expanded) == te.density_exponent;
    let s = GradedAsySeries {
        rate: rat(4, 3),
        power: rat(5, 4),
        constant: rat(3, 7),
        pi_half: 0,
        coeffs: vec![rat(1, 1), rat(-2, 5), rat(7, 3), rat(0, 1), rat(11, 2)],
    };
    let back = s.integrate_grade(8).differentiate();
    let neg: Vec<Rational> = s.coeffs.iter().map(|c| -c).collect();
    let round = back.power == s.power && back.coeffs[..5] == neg[..] && back.coeffs[5..8].iter().all(|c| c == &rat(0, 1));
    outcome(
        deriv && explog && round,
        format!("density = -d/ds complement through order {} {deriv}; exp/log {explog}; integrate/differentiate {round}", te.order()),
    )
}

fn criterion_11() -> Outcome {
    let s = Instant::now();
    let exact = 0.022750131948179195;
    let g = estimate_tail(1, 2.0, 1.0, 2.0, 100_000, 3).unwrap();
    let gauss = (g.p_hat - exact).abs() < 3.0 * g.stderr;
    let ks = semicircle_ks(1000, 2.0, 1.0, 100, 5, 2001).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let m = sample_tridiag(50, 2.0, 1.0, &mut rng).unwrap();
        let mut dense = DMatrix::<f64>::zeros(50, 50);
        for i in 0..50 {
            dense[(i, i)] = m.diag[i];
            if i + 1 < 50 {
                dense[(i, i + 1)] = m.offdiag[i];
                dense[(i + 1, i)] = m.offdiag[i];
            }
        }
        let top = dense.symmetric_eigen().eigenvalues.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        worst = worst.max((lambda_max(&m, 1e-13) - top).abs());
    }
    let el = s.elapsed();
    outcome(
        gauss && ks <= 0.01 && worst < 1e-10 && within(el, 300),
        format!(
            "N = 1 tail {:.5} +- {:.5} vs {exact:.5}; KS {ks:.4} (<= 0.01); dense max error {worst:.1e} (< 1e-10); {el:.1?}",
            g.p_hat, g.stderr
        ),
    )
}

fn criterion_12(t: &CorrelatorTable) -> Outcome {
    let s = Instant::now();
    let exp = assemble_deviation(2, t).unwrap();
    let (beta, tt, a) = (rat(2, 1), rat(1, 1), 2.2);
    let mut parts = vec![];
    let mut gaps = vec![];
    let mut ratio40 = f64::NAN;
    for n in [20u64, 40, 80] {
        let est = estimate_tail(n as usize, 2.0, 1.0, a, 1_000_000, 7).unwrap();
        let (p, ln_p) = predicted_tail(n, &beta, &tt, a, 2, &exp).unwrap();
        let ratio = est.p_hat / p;
        let gap = (est.p_hat.ln() - ln_p).abs();
        if n == 40 {
            ratio40 = ratio;
        }
        gaps.push(gap);
        parts.push(format!("N = {n}: hits {}, pHat {:.3e}, predicted {p:.3e}, ratio {ratio:.3}, |ln gap| {gap:.3}", est.hits, est.p_hat));
    }
    let ratio_ok = (2.0 / 3.0..=1.5).contains(&ratio40);
    let mono = gaps.windows(2).all(|w| w[1] < w[0]);
    let el = s.elapsed();
    outcome(
        ratio_ok && mono && within(el, 900),
        format!("{}; ratio at N = 40 in [2/3, 3/2] {ratio_ok}; gap decreasing {mono}; {el:.1?}", parts.join("; ")),
    )
}

fn main() {
    let mut results: Vec<(usize, Outcome)> = vec![];
    let mut report = |i: usize, o: Outcome| {
        println!("{} criterion {i:>2}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        results.push((i, o));
    };
    report(1, criterion_1());
    report(2, criterion_2());

    let s = Instant::now();
    let mut table = build_one_point(7).unwrap();
    let entries: Vec<BreveEntry> = (1..=6).map(|m| breve_extract(m, &table).unwrap()).collect();
    let te = assemble_tail(6, &entries).unwrap();
    let build = s.elapsed();

    report(3, criterion_3(&entries, &table));
    report(4, criterion_4(&entries));
    report(5, criterion_5(&te, build));
    report(6, criterion_6(&te));
    report(7, criterion_7(&table));
    report(8, criterion_8(&mut table));
    report(9, criterion_9());
    report(10, criterion_10(&te));
    report(11, criterion_11());
    report(12, criterion_12(&table));

    let unexpected: Vec<usize> = results
        .iter()
        .filter(|(i, o)| !o.pass && !KNOWN_RED.contains(i))
        .map(|(i, _)| *i)
        .collect();
    let passed = results.iter().filter(|(_, o)| o.pass).count();
    println!("{passed} of {} criteria pass; known red {KNOWN_RED:?}", results.len());
    if !unexpected.is_empty() {
        println!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}
