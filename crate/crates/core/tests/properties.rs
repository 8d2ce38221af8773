use proptest::prelude::*;
use twbeta_core::algebra::{laurent_expand, partial_fractions, rat, Factor, FactoredRatFn, Rational, Var, XPoly};
use twbeta_core::tail::{series_exp, series_log};

const FACTORS: [Factor; 8] = [
    Factor::ZMinus1(0),
    Factor::ZPlus1(1),
    Factor::AlphaZMinus1(0),
    Factor::AlphaZMinus1(1),
    Factor::ZZMinus1(0, 1),
    Factor::AlphaMinus1,
    Factor::AlphaPlus1,
    Factor::Alpha,
];

const ALPHA_FACTORS: [Factor; 4] = [Factor::AlphaMinus1, Factor::AlphaPlus1, Factor::Alpha, Factor::AlphaSqPlus1];

type Term = (i64, i64, u8, [u8; 3], usize, u8);

fn term() -> impl Strategy<Value = Term> {
    (-6i64..=6, 1i64..=4, 0u8..=2, [0u8..=2, 0u8..=2, 0u8..=2], 0usize..8, 0u8..=2)
}

fn power(f: FactoredRatFn, nz: usize, v: Var, e: u8) -> FactoredRatFn {
    (0..e).fold(f, |acc, _| acc.mul(&FactoredRatFn::var(nz, v)))
}

fn build(terms: &[Term], alpha_only: bool) -> FactoredRatFn {
    let nz = if alpha_only { 0 } else { 2 };
    let parts: Vec<FactoredRatFn> = terms
        .iter()
        .map(|&(n, d, xp, [e1, e2, ea], fi, pole)| {
            let mut f = FactoredRatFn::constant(nz, rat(n, d));
            for _ in 0..xp {
                f = f.mul(&FactoredRatFn::x(nz));
            }
            if !alpha_only {
                f = power(f, nz, Var::Z(0), e1);
                f = power(f, nz, Var::Z(1), e2);
            }
            f = power(f, nz, Var::Alpha, ea);
            let fac = if alpha_only { ALPHA_FACTORS[fi % 4] } else { FACTORS[fi] };
            f.mul(&FactoredRatFn::factor_pow(nz, fac, -(pole as i32)))
        })
        .collect();
    FactoredRatFn::sum(parts.iter())
}

fn func() -> impl Strategy<Value = FactoredRatFn> {
    prop::collection::vec(term(), 1..4).prop_map(|t| build(&t, false))
}

fn alpha_func() -> impl Strategy<Value = FactoredRatFn> {
    prop::collection::vec(term(), 1..4).prop_map(|t| build(&t, true))
}

/// Points of modulus at least 2 avoid every allowed pole.
fn point() -> impl Strategy<Value = Rational> {
    prop::sample::select(vec![rat(2, 1), rat(3, 1), rat(-3, 1), rat(5, 2), rat(-7, 3), rat(11, 4), rat(-9, 2)])
}

fn xval() -> impl Strategy<Value = Rational> {
    prop::sample::select(vec![rat(1, 1), rat(2, 1), rat(1, 2), rat(2, 7)])
}

fn ev(f: &FactoredRatFn, z: &[Rational], a: &Rational, x: &Rational) -> Rational {
    f.eval(z, Some(a), x).unwrap()
}

fn xseries() -> impl Strategy<Value = Vec<XPoly>> {
    prop::collection::vec(prop::collection::vec(-5i64..=5, 0..3), 1..6).prop_map(|cs| {
        std::iter::once(XPoly::zero()).chain(cs.iter().map(|c| XPoly::from_ints(c))).collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn arithmetic_commutes_with_evaluation(f in func(), g in func(), z1 in point(), z2 in point(), a in point(), x in xval()) {
        let z = [z1, z2];
        let (fv, gv) = (ev(&f, &z, &a, &x), ev(&g, &z, &a, &x));
        prop_assert_eq!(ev(&f.add(&g), &z, &a, &x), &fv + &gv);
        prop_assert_eq!(ev(&f.mul(&g), &z, &a, &x), &fv * &gv);
        prop_assert_eq!(ev(&f.swap(0, 1), &[z[1].clone(), z[0].clone()], &a, &x), fv);
    }

    #[test]
    fn leibniz_rule(f in func(), g in func()) {
        for v in [Var::Z(0), Var::Z(1), Var::Alpha] {
            let lhs = f.mul(&g).derivative(v).unwrap();
            let rhs = f.derivative(v).unwrap().mul(&g).add(&f.mul(&g.derivative(v).unwrap()));
            prop_assert!(lhs.sub(&rhs).is_zero());
        }
    }

    #[test]
    fn swap_is_an_involution(f in func()) {
        prop_assert_eq!(f.swap(0, 1).swap(0, 1), f);
    }

    #[test]
    fn divided_difference_confluence(f in func(), a in point(), b in point(), al in point(), x in xval()) {
        // g(z1, z2) = f(z1, ·) - f(z2, ·) with the second slot frozen at α
        let f1 = f.substitute(&[(Var::Z(1), twbeta_core::algebra::Binding::Var(Var::Alpha))]);
        prop_assume!(f1.is_ok());
        let f1 = f1.unwrap();
        let g = f1.sub(&f1.swap(0, 1));
        let dd = g.div_difference(Var::Z(0), Var::Z(1)).unwrap();
        if a != b {
            let want = (ev(&f1, &[a.clone(), b.clone()], &al, &x) - ev(&f1, &[b.clone(), a.clone()], &al, &x)) / (&a - &b);
            prop_assert_eq!(ev(&dd, &[a.clone(), b.clone()], &al, &x), want);
        }
        // at z1 = z2 the quotient is the derivative
        let d = f1.derivative(Var::Z(0)).unwrap();
        prop_assert_eq!(ev(&dd, &[a.clone(), a.clone()], &al, &x), ev(&d, &[a.clone(), b], &al, &x));
    }

    #[test]
    fn partial_fractions_recombine(f in alpha_func()) {
        let pf = partial_fractions(&f).unwrap();
        prop_assert!(pf.recombine(0).unwrap().sub(&f).is_zero());
    }

    #[test]
    fn laurent_expansion_is_multiplicative(f in alpha_func(), g in alpha_func()) {
        prop_assume!(!f.is_zero() && !g.is_zero());
        let fg = f.mul(&g);
        let lf = laurent_expand(&f, 4).unwrap();
        let lg = laurent_expand(&g, 4).unwrap();
        let prod = lf.mul(&lg);
        let lfg = laurent_expand(&fg, prod.truncation).unwrap();
        for j in prod.min_exponent.min(lfg.min_exponent)..prod.truncation {
            prop_assert_eq!(prod.coeff(j), lfg.coeff(j), "j = {}", j);
        }
    }

    #[test]
    fn exp_and_log_are_inverse(e in xseries()) {
        let c = series_exp(&e);
        prop_assert_eq!(c[0].clone(), XPoly::one());
        prop_assert_eq!(series_log(&c), e);
    }
}
