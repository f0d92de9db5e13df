//! Randomized structural properties of the expression kernel.

use liesym::expr::{
    eval_rat, is_zero, rat, ratio, total_derivative, Direction, ExactEnv, Expr, Rat,
    SamplerConfig, Symbol,
};
use proptest::prelude::*;

fn small_rat() -> impl Strategy<Value = Rat> {
    (-3i64..=3, 1i64..=3).prop_map(|(p, q)| ratio(p, q))
}

/// Random polynomial trees over t, x, u with rational coefficients.
fn arb_expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        small_rat().prop_map(Expr::Num),
        Just(Expr::t()),
        Just(Expr::x(0)),
        Just(Expr::u()),
    ];
    leaf.prop_recursive(8, 48, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::add2(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::mul2(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::sub(a, b)),
            inner.clone().prop_map(Expr::neg),
            (inner, 1i64..=3).prop_map(|(a, n)| Expr::powi(a, n)),
        ]
    })
}

fn env(t: &Rat, x: &Rat, u: &Rat) -> ExactEnv {
    let mut env = ExactEnv::new();
    env.set(Symbol::Time, t.clone());
    env.set(Symbol::Space(0), x.clone());
    env.set(Symbol::u(), u.clone());
    env
}

fn cfg() -> SamplerConfig {
    SamplerConfig {
        samples: 32,
        ..SamplerConfig::seeded(5)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn normalization_is_idempotent(e in arb_expr()) {
        let n = e.normalize();
        prop_assert_eq!(n.clone().normalize(), n);
    }

    #[test]
    fn normalization_preserves_exact_values(
        e in arb_expr(),
        t in small_rat(),
        x in small_rat(),
        u in small_rat(),
    ) {
        let env = env(&t, &x, &u);
        prop_assert_eq!(
            eval_rat(&e, &env).unwrap(),
            eval_rat(&e.clone().normalize(), &env).unwrap()
        );
    }

    #[test]
    fn evaluation_is_a_homomorphism(
        a in arb_expr(),
        b in arb_expr(),
        t in small_rat(),
        x in small_rat(),
        u in small_rat(),
    ) {
        let env = env(&t, &x, &u);
        let va = eval_rat(&a, &env).unwrap();
        let vb = eval_rat(&b, &env).unwrap();
        prop_assert_eq!(eval_rat(&Expr::add2(a.clone(), b.clone()), &env).unwrap(), &va + &vb);
        prop_assert_eq!(eval_rat(&Expr::mul2(a, b), &env).unwrap(), &va * &vb);
    }

    #[test]
    fn differentiation_satisfies_the_product_rule(a in arb_expr(), b in arb_expr()) {
        let s = Symbol::u();
        let lhs = Expr::mul2(a.clone(), b.clone()).diff(&s);
        let rhs = Expr::add2(
            Expr::mul2(a.diff(&s), b.clone()),
            Expr::mul2(a, b.diff(&s)),
        );
        prop_assert!(is_zero(&Expr::sub(lhs, rhs), &cfg()).unwrap().is_zero);
    }

    #[test]
    fn total_derivatives_commute(e in arb_expr()) {
        let xt = total_derivative(&total_derivative(&e, Direction::T).unwrap(), Direction::X(0))
            .unwrap();
        let tx = total_derivative(&total_derivative(&e, Direction::X(0)).unwrap(), Direction::T)
            .unwrap();
        prop_assert!(is_zero(&Expr::sub(xt, tx), &cfg()).unwrap().is_zero);
    }

    #[test]
    fn nonzero_monomials_are_detected(
        c in (1i64..=5).prop_map(rat),
        a in 0u32..=6,
        b in 0u32..=6,
    ) {
        let m = Expr::mul2(
            Expr::Num(c),
            Expr::mul2(
                Expr::powi(Expr::x(0), a as i64),
                Expr::powi(Expr::u(), b as i64),
            ),
        );
        let r = is_zero(&m, &cfg()).unwrap();
        prop_assert!(!r.is_zero);
        prop_assert!(r.witness.is_some());
    }
}
