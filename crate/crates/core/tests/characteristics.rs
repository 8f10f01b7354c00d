use std::f64::consts::PI;

use lieconserve::characteristics::{
    shock_time, simpson, verify_law, CharError, CharacteristicSolution, CheckMode, Domain, InitialProfile,
    InstantiatedLaw,
};
use lieconserve::conservation::{burgers_claw_catalog, ConservedVector};
use lieconserve::expr::Polynomial;
use lieconserve::{parse, FunctionTable};
use proptest::prelude::*;

fn sine_solution(a: Polynomial) -> CharacteristicSolution {
    CharacteristicSolution::new(a, InitialProfile::sine(), Domain::periodic(0.0, 2.0 * PI).unwrap()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// `u(x, t) = u0(x - a(u) t)` and `u_x = u0' / (1 + t a' u0')`.
    #[test]
    fn solution_satisfies_the_implicit_relation(x in 0.0f64..(2.0 * PI), frac in 0.0f64..0.95) {
        let a = Polynomial::new(vec![0.0, 1.0, 0.0, 0.5]);
        let sol = sine_solution(a.clone());
        let t = frac * sol.shock_time();
        let (u, u_x) = sol.solve_at(x, t).unwrap();
        let xi = x - a.eval(u) * t;
        prop_assert!((u - xi.sin()).abs() < 1e-10);
        let expected = xi.cos() / (1.0 + t * a.derivative().eval(u) * xi.cos());
        prop_assert!((u_x - expected).abs() < 1e-8 * (1.0 + expected.abs()));
    }

    /// Shock time of `a = c u` with `u0 = sin` is `1/c`.
    #[test]
    fn linear_speed_shock_time(c in 0.2f64..5.0) {
        let t_star = shock_time(
            &Polynomial::new(vec![0.0, c]),
            &InitialProfile::sine(),
            &Domain::periodic(0.0, 2.0 * PI).unwrap(),
        )
        .unwrap();
        prop_assert!((t_star - 1.0 / c).abs() < 1e-9 / c);
    }
}

#[test]
fn simpson_is_exact_for_cubics_and_checks_nodes() {
    let v = simpson(|x| Ok(x * x * x - 2.0 * x + 1.0), 0.0, 2.0, 64).unwrap();
    assert!((v - 2.0).abs() < 1e-12, "{v}");
    assert!(matches!(simpson(Ok, 0.0, 1.0, 63), Err(CharError::Nodes(63))));
    assert!(matches!(simpson(Ok, 0.0, 1.0, 32), Err(CharError::Nodes(32))));
}

#[test]
fn every_catalog_law_is_conserved_numerically() {
    let table = FunctionTable::burgers();
    let a = Polynomial::identity();
    let sol =
        CharacteristicSolution::new(a.clone(), InitialProfile::bump(), Domain::compact(-2.0, 3.0).unwrap()).unwrap();
    for (label, cv) in burgers_claw_catalog() {
        // l2 and l4 carry a/a' terms that are fine for a = u.
        let law = InstantiatedLaw::new(&cv, &a, &table, &label).unwrap();
        let rep = verify_law(&sol, &law, &[0.1, 0.3], 2048, 1e-5).unwrap();
        assert!(rep.passed, "{label}: {rep:?}");
    }
}

#[test]
fn catalog_entries_at_cubic_speed() {
    let table = FunctionTable::burgers();
    let a = Polynomial::new(vec![1.0, 1.0, 0.0, 1.0 / 3.0]);
    let sol = sine_solution(a.clone());
    for label in ["l1", "l3"] {
        let cv = burgers_claw_catalog().into_iter().find(|(l, _)| l == label).unwrap().1;
        let law = InstantiatedLaw::new(&cv, &a, &table, label).unwrap();
        let times: Vec<f64> = [0.2, 0.5, 0.8].iter().map(|f| f * sol.shock_time()).collect();
        let rep = verify_law(&sol, &law, &times, 2048, 1e-8).unwrap();
        assert_eq!(rep.mode, CheckMode::QConstancy);
        assert!(rep.passed, "{label}: {rep:?}");
    }
}

#[test]
fn expression_profiles_are_supported() {
    let t = FunctionTable::new();
    let u0 = InitialProfile::from_expr(parse("1/(1 + x^2)", &t).unwrap(), &t).unwrap();
    let sol = CharacteristicSolution::new(Polynomial::identity(), u0, Domain::compact(-40.0, 40.0).unwrap()).unwrap();
    // min of d/dx 1/(1 + x^2) is -3 sqrt(3)/8 at x = 1/sqrt(3).
    assert!((sol.shock_time() - 8.0 / (3.0 * 3f64.sqrt())).abs() < 1e-9);
}

#[test]
fn wrong_density_is_not_flagged_when_it_is_conserved() {
    // Any g(u) is conserved by smooth solutions, u^3 included.
    let table = FunctionTable::burgers();
    let sol = sine_solution(Polynomial::identity());
    let cv = ConservedVector::custom(parse("u^3", &table).unwrap(), parse("3*u^4/4", &table).unwrap());
    let law = InstantiatedLaw::new(&cv, &Polynomial::identity(), &table, "u^3").unwrap();
    let rep = verify_law(&sol, &law, &[0.25, 0.5, 0.75, 0.9], 2048, 1e-6).unwrap();
    assert!(rep.passed);
    assert!(rep.drift < 1e-10);
}
