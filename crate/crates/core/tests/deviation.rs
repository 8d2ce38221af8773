use twbeta_core::algebra::{rat, FactoredRatFn, Rational, Var};
use twbeta_core::deviation::{
    alpha_of, assemble_deviation, closed_forms_low_orders, collect_terms, eval_alpha,
    eval_density, integrate_correction, predicted_tail, rate, ExactPrefactor,
};
use twbeta_core::loops::{build_one_point, wall_restriction};
use twbeta_core::numeric::{self, from_f64, from_i64, to_f64};
use twbeta_core::reference;

fn f(src: &str) -> FactoredRatFn {
    FactoredRatFn::parse(0, src).unwrap()
}

#[test]
fn integrals_match_closed_forms() {
    let t = build_one_point(4).unwrap();
    for k in 2..=4 {
        let got = integrate_correction(k, &t).unwrap();
        assert_eq!(got, reference::integral(k).unwrap(), "k = {k}");
        // d/dα (-∫_α^∞ ω) = ω(α)
        let w = wall_restriction(t.get(1, k).unwrap()).unwrap();
        assert_eq!(got.derivative(Var::Alpha).unwrap(), w);
        // even in α: only α² - 1 appears
        assert_eq!(got.eval(&[], Some(&rat(3, 1)), &rat(1, 3)).unwrap(), got.eval(&[], Some(&rat(-3, 1)), &rat(1, 3)).unwrap());
    }
}

#[test]
fn first_integral_at_sqrt_two() {
    let i2 = reference::integral(2).unwrap();
    let alpha = numeric::sqrt(&from_i64(2));
    let v = to_f64(&eval_alpha(&i2, &alpha, &rat(1, 1)));
    assert!((v + 103.0 / 12.0).abs() < 1e-12, "{v}");
}

#[test]
fn order_n_derivative_identity() {
    let (order_n, _) = closed_forms_low_orders();
    // X · d/dα orderN = 2 ω_1^{[0]}(α) - a a',  a = α + 1/α
    let got = collect_terms(&order_n.derivative().unwrap(), 1).unwrap();
    let want = f("2*(1/a - 1/a^3) - (a + 1/a)*(1 - 1/a^2)");
    assert_eq!(got, want);
}

#[test]
fn order_one_derivative_identity() {
    let (_, order_one) = closed_forms_low_orders();
    let t = build_one_point(1).unwrap();
    let w1 = wall_restriction(t.get(1, 1).unwrap()).unwrap();
    // X · d/dα orderOne = X β ω_1^{[1]}(α) = 2 ω_1^{[1]}(α)
    let got = collect_terms(&order_one.derivative().unwrap(), 1).unwrap();
    assert_eq!(got, w1.scale_by(&rat(2, 1)));
}

#[test]
fn rate_matches_quadrature_of_subtracted_resolvent() {
    // Φ(α) = ∫_α^∞ (ω_1^{[0]} - a'/a) - ln a + a²/4 - 1/2
    for a in [2.2f64, 3.0, 5.0] {
        let alpha = (a + (a * a - 4.0).sqrt()) / 2.0;
        let g = |x: f64| 1.0 / x - 1.0 / x.powi(3) - (x * x - 1.0) / (x * (x * x + 1.0));
        let out = quadrature::double_exponential::integrate(
            |u: f64| if u <= 0.0 { 0.0 } else { g(alpha / u) * alpha / (u * u) },
            0.0,
            1.0,
            1e-13,
        );
        let phi = out.integral - a.ln() + a * a / 4.0 - 0.5;
        let closed = to_f64(&rate(&alpha_of(&from_f64(a), &from_i64(1))));
        assert!((phi - closed).abs() < 1e-10, "a = {a}: {phi} vs {closed}");
        // orderN = -β Φ at β = 2 (X = 1)
        let (order_n, _) = closed_forms_low_orders();
        let v = to_f64(&order_n.eval(&from_f64(alpha), &rat(1, 1)));
        assert!((v + 2.0 * closed).abs() < 1e-10);
    }
    let phi3 = to_f64(&rate(&alpha_of(&from_i64(3), &from_i64(1))));
    assert!((phi3 - 0.7146273).abs() < 1e-7);
    let edge = to_f64(&rate(&from_i64(1)));
    assert!(edge.abs() < 1e-60);
    // dΦ/dα at α = 2 is 9/16
    let h = 1e-20;
    let d = (rate(&(from_i64(2) + from_f64(h))) - rate(&from_i64(2))) / from_f64(h);
    assert!((to_f64(&d) - 9.0 / 16.0).abs() < 1e-15);
}

#[test]
fn assembled_corrections() {
    let t = build_one_point(4).unwrap();
    let e = assemble_deviation(3, &t).unwrap();
    assert_eq!(e.corrections[0].bernoulli, twbeta_core::algebra::XPoly::monomial(rat(-1, 12), 1));
    assert!(e.corrections[1].bernoulli.is_zero());
    assert_eq!(e.corrections[1].integral, reference::integral(3).unwrap());
}

#[test]
fn density_leading_exponent() {
    let t = build_one_point(1).unwrap();
    let e = assemble_deviation(0, &t).unwrap();
    let d = eval_density(10, &rat(2, 1), &rat(1, 1), 3.0, 0, &e).unwrap();
    // β = 2: prefactor 1, orderOne = -2 ln((α²-1)/α) + 0·ln α, a² - 4 = (α - 1/α)²
    let phi = 3.0 * 5f64.sqrt() / 4.0 + ((3.0 - 5f64.sqrt()) / 2.0).ln();
    let expect = -2.0 * 10.0 * phi - (5.0f64).ln() - (2.0 * std::f64::consts::PI).ln();
    assert!((to_f64(&d.ln_value) - expect).abs() < 1e-12, "{}", to_f64(&d.ln_value));
    assert!(eval_density(10, &rat(2, 1), &rat(1, 1), 2.0, 0, &e).is_err());
    // decreasing for large a
    let mut prev = f64::INFINITY;
    for a in [3.0, 4.0, 6.0, 10.0] {
        let v = to_f64(&eval_density(10, &rat(2, 1), &rat(1, 1), a, 0, &e).unwrap().ln_value);
        assert!(v < prev);
        prev = v;
    }
}

#[test]
fn t_scaling_of_density() {
    let t = build_one_point(3).unwrap();
    let e = assemble_deviation(2, &t).unwrap();
    let b = rat(1, 1);
    let d1 = eval_density(20, &b, &rat(1, 1), 2.5, 2, &e).unwrap();
    let d4 = eval_density(20, &b, &rat(4, 1), 5.0, 2, &e).unwrap();
    // 𝒢_t(a) = 𝒢_1(a/√t)/√t
    let r = to_f64(&(d1.ln_value - d4.ln_value)) - 2f64.ln();
    assert!(r.abs() < 1e-12);
}

#[test]
fn prefactor_forms_converge() {
    for beta in [rat(1, 1), rat(2, 1), rat(4, 1)] {
        for order in 0..=3usize {
            let errs: Vec<f64> = [20u64, 40, 80]
                .iter()
                .map(|&n| {
                    let r = ExactPrefactor::selberg(n, &beta) / ExactPrefactor::stirling(n, &beta, order);
                    to_f64(&(r - from_i64(1))).abs()
                })
                .collect();
            for w in errs.windows(2) {
                let ratio = w[0] / w[1];
                let lo = 2f64.powi(order as i32);
                let hi = 2f64.powi(order as i32 + 2);
                assert!(ratio >= lo && ratio <= hi, "beta {beta} order {order}: ratio {ratio}");
            }
        }
    }
}

#[test]
fn predicted_tail_is_below_density_scale() {
    let t = build_one_point(3).unwrap();
    let e = assemble_deviation(2, &t).unwrap();
    let (p, lnp) = predicted_tail(40, &Rational::from_integer(2.into()), &rat(1, 1), 2.2, 2, &e).unwrap();
    assert!(p > 0.0 && p < 1.0);
    assert!((p.ln() - lnp).abs() < 1e-9);
}
