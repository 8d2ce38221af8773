use twbeta_core::algebra::{rat, Rational};
use twbeta_core::error::OracleError;
use twbeta_core::loops::build_one_point;
use twbeta_core::painleve::{cross_validate, f_beta_series, painleve_series, q_series, GradedAsySeries};
use twbeta_core::reference;
use twbeta_core::tail::{assemble_tail, breve_extract};

fn with_one(v: Vec<Rational>) -> Vec<Rational> {
    std::iter::once(rat(1, 1)).chain(v).collect()
}

#[test]
fn int_q_and_int_r_match_printed_series() {
    let ps = painleve_series(7);
    let iq = ps.int_q.normalize();
    assert_eq!((iq.rate.clone(), iq.power.clone()), (rat(2, 3), rat(3, 4)));
    assert_eq!((iq.constant.clone(), iq.pi_half), (rat(1, 2), -1));
    assert_eq!(iq.coeffs, with_one(reference::int_q_coefficients()));
    let ir = ps.int_r.normalize();
    assert_eq!((ir.rate.clone(), ir.power.clone()), (rat(4, 3), rat(3, 2)));
    assert_eq!((ir.constant.clone(), ir.pi_half), (rat(1, 16), -2));
    assert_eq!(ir.coeffs, with_one(reference::int_r_coefficients()));
}

#[test]
fn r_identity_at_grade_two() {
    // R = q'² - s q² - q⁴, and q⁴ is grade 4
    let n = 8;
    let q = q_series(n);
    let dq = q.differentiate();
    let lhs = painleve_series(n).r.normalize();
    let rhs = dq
        .mul(&dq, n)
        .add(&q.mul(&q, n).times_power_of_s(1).scale(&rat(-1, 1)))
        .unwrap()
        .normalize();
    // the s^{1/2} orders cancel, leaving s^{-1}
    assert_eq!(rhs.power, rat(1, 1));
    assert_eq!((&lhs.power, &lhs.constant), (&rhs.power, &rhs.constant));
    let k = lhs.len().min(rhs.len());
    assert!(k >= 6);
    assert_eq!(lhs.coeffs[..k], rhs.coeffs[..k]);
}

#[test]
fn ode_residual_vanishes() {
    let q = q_series(10);
    let d2 = q.differentiate().differentiate();
    let sq = q.times_power_of_s(1);
    // the last two slots of q'' see the truncation
    for j in 0..9 {
        assert_eq!(d2.coeffs[j], sq.coeffs[j], "j = {j}");
    }
}

#[test]
fn integrate_differentiate_round_trip() {
    let s = GradedAsySeries {
        rate: rat(4, 3),
        power: rat(5, 4),
        constant: rat(3, 7),
        pi_half: 0,
        coeffs: vec![rat(1, 1), rat(-2, 5), rat(7, 3), rat(0, 1), rat(11, 2)],
    };
    let back = s.integrate_grade(8).differentiate();
    assert_eq!(back.power, s.power);
    assert_eq!(&back.coeffs[..5], &s.coeffs.iter().map(|c| -c).collect::<Vec<_>>()[..]);
    assert!(back.coeffs[5..8].iter().all(|c| c == &rat(0, 1)));
}

#[test]
fn cross_validation_through_three() {
    let t = build_one_point(4).unwrap();
    let e: Vec<_> = (1..=3).map(|m| breve_extract(m, &t).unwrap()).collect();
    let te = assemble_tail(3, &e).unwrap();
    for beta in [1, 2, 4] {
        let cv = cross_validate(beta, &te, 3).unwrap();
        assert_eq!(cv.coefficients_checked, 6);
        let want = reference::tail_coefficients(beta).unwrap();
        assert_eq!(&cv.complement.coeffs[1..], &want[..3]);
    }
    assert!(matches!(cross_validate(3, &te, 3), Err(OracleError::UnsupportedBeta(_))));
}

#[test]
fn beta_four_leading_orders_cancel() {
    let s = f_beta_series(4, 4).unwrap();
    // prefactor 1/(512π) and s^{-3}
    assert_eq!(s.power, rat(3, 1));
    assert_eq!(s.constant, rat(1, 512));
    assert_eq!(s.rate, rat(8, 3));
}
