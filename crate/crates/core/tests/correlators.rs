use std::time::Instant;

use twbeta_core::algebra::{Factor, FactoredRatFn};
use twbeta_core::loops::{build_one_point, build_table, collision_order, sd_step, CorrelatorTable};
use twbeta_core::reference;

fn table3() -> CorrelatorTable {
    build_table(3).unwrap()
}

#[test]
fn low_order_correlators_match_closed_forms() {
    let t = table3();
    for (n, k, _) in reference::CORRELATORS {
        let got = &t.get(n, k).unwrap().value;
        let want = reference::correlator(n, k).unwrap();
        assert_eq!(got, &want, "omega_{n}^[{k}]:\n got {got}\nwant {want}");
    }
}

#[test]
fn sd_step_is_reproducible_from_table() {
    let t = table3();
    let again = sd_step(2, 1, &t).unwrap();
    assert_eq!(&again.value, &t.get(2, 1).unwrap().value);
}

#[test]
fn correlators_are_symmetric() {
    let t = build_table(4).unwrap();
    for c in t.iter() {
        for i in 1..c.n {
            assert_eq!(c.value.swap(0, i), c.value, "omega_{}^[{}] not symmetric", c.n, c.k);
        }
    }
}

#[test]
fn poles_only_at_allowed_places() {
    let t = build_table(4).unwrap();
    for c in t.iter() {
        for f in c.value.denominator().keys() {
            let ok = matches!(
                f,
                Factor::ZMinus1(_)
                    | Factor::ZPlus1(_)
                    | Factor::AlphaZMinus1(_)
                    | Factor::ZZMinus1(_, _)
                    | Factor::AlphaMinus1
                    | Factor::AlphaPlus1
                    | Factor::Alpha
            ) || (matches!(f, Factor::Z(_)) && c.n == 1 && c.k <= 1);
            assert!(ok, "omega_{}^[{}] has pole at {}", c.n, c.k, f.id());
        }
    }
}

#[test]
fn degree_bounds_hold() {
    let t = build_table(4).unwrap();
    for c in t.iter() {
        let (d, xdeg) = collision_order(&c.value);
        let (n, k) = (c.n as i64, c.k as i64);
        if (n, k) == (1, 0) {
            continue;
        }
        assert!(d <= 4 * n + 3 * k - 6, "omega_{n}^[{k}]: d = {d}");
        assert!(xdeg as i64 <= n + k - 1, "omega_{n}^[{k}]: xdeg = {xdeg}");
    }
}

#[test]
fn beta_two_drops_the_derivative_term() {
    // at β = 2 the (1 - X) terms drop: ω_1^{[1]} reduces to 1/z - 2/(z - 1/α)
    let t = table3();
    let w = t.get(1, 1).unwrap().value.specialize_x(&twbeta_core::algebra::rat(1, 1));
    let want = FactoredRatFn::parse(1, "1/z1 - 2/(z1-1/a)").unwrap();
    assert_eq!(w, want);
}

#[test]
#[ignore]
fn timing() {
    let s = Instant::now();
    let t = build_one_point(7).unwrap();
    eprintln!("closure(7): {} entries in {:?}", t.len(), s.elapsed());
    let s = Instant::now();
    let t = build_table(6).unwrap();
    eprintln!("table(6): {} entries in {:?}", t.len(), s.elapsed());
}
