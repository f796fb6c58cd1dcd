use proptest::prelude::*;

use weighted_entropy::distributions::{wmrl, Affine, Lifetime, ParametricDistribution as PD};
use weighted_entropy::empirical::{empirical_gwfe, empirical_gwse, EstimatorVariant, Sample};
use weighted_entropy::entropy::{
    affine_identity_check, bound_check, classify_gdwse_monotonicity, default_grid, evaluate, gdwse, gwse,
    EntropyKind, EntropyOrder, Method, Monotonicity,
};
use weighted_entropy::QuadratureConfig;

fn order_strategy() -> impl Strategy<Value = EntropyOrder> {
    (1.0f64..3.0, 0.05f64..0.95).prop_map(|(beta, frac)| EntropyOrder::new(beta - 1.0 + frac, beta).unwrap())
}

fn family_strategy() -> impl Strategy<Value = PD> {
    prop_oneof![
        (0.2f64..5.0).prop_map(|r| PD::exponential(r).unwrap()),
        (0.2f64..3.0).prop_map(|r| PD::rayleigh(r).unwrap()),
        (0.8f64..4.0).prop_map(|k| PD::weibull(k).unwrap()),
        (1.0f64..6.0).prop_map(|q| PD::gamma(q).unwrap()),
        (0.0f64..2.0, 0.3f64..3.0).prop_map(|(a, w)| PD::uniform(a, a + w).unwrap()),
        (0.3f64..4.0, 0.5f64..3.0).prop_map(|(c, b)| PD::power(c, b).unwrap()),
    ]
}

fn cfg() -> QuadratureConfig {
    QuadratureConfig::default()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn closed_form_agrees_with_quadrature(d in family_strategy(), o in order_strategy()) {
        let auto = evaluate(&d, &o, EntropyKind::Gwse, None, Method::Auto, &cfg()).unwrap();
        let quad = evaluate(&d, &o, EntropyKind::Gwse, None, Method::Quadrature, &cfg()).unwrap();
        prop_assert!((auto.integral() - quad.integral()).abs() <= 1e-8 * auto.integral());
    }

    #[test]
    fn affine_decomposition(d in family_strategy(), o in order_strategy(), a in 0.2f64..5.0, b in 0.0f64..3.0) {
        let r = affine_identity_check(&d, &o, a, b, &cfg()).unwrap();
        prop_assert!(r.max() <= 1e-8, "{r:?}");
    }

    #[test]
    fn scaling_adds_log_term(d in family_strategy(), o in order_strategy(), a in 0.1f64..10.0) {
        let z = Affine::new(&d, a, 0.0).unwrap();
        let lhs = evaluate(&z, &o, EntropyKind::Gwse, None, Method::Quadrature, &cfg()).unwrap().value;
        let rhs = 2.0 * a.ln() / o.delta() + gwse(&d, &o, &cfg()).unwrap().value;
        prop_assert!((lhs - rhs).abs() <= 1e-8 * rhs.abs().max(1.0));
    }

    #[test]
    fn inequalities_hold(d in family_strategy(), o in order_strategy(), u in 0.05f64..0.95) {
        let t = d.quantile(u).unwrap();
        let r = bound_check(&d, &o, Some(t), &cfg()).unwrap();
        prop_assert!(!r.entries.is_empty());
        for e in &r.entries {
            prop_assert!(e.holds(1e-9), "{e:?}");
        }
    }

    #[test]
    fn empirical_scale_equivariance(
        xs in proptest::collection::vec(0.0f64..50.0, 2..60),
        c in 1e-3f64..1e3,
        o in order_strategy(),
    ) {
        let s = Sample::new(xs).unwrap();
        prop_assume!(s.values()[s.len() - 1] > s.values()[0]);
        for v in [EstimatorVariant::InteriorSum, EstimatorVariant::ExactStep] {
            let base = empirical_gwse(&s, &o, v).unwrap();
            let scaled = empirical_gwse(&s.scaled(c).unwrap(), &o, v).unwrap();
            prop_assert!((scaled - base - 2.0 * c.ln() / o.delta()).abs() <= 1e-12 * base.abs().max(1.0) * 10.0);
        }
        let f = empirical_gwfe(&s, &o, EstimatorVariant::InteriorSum);
        prop_assert!(f.is_ok());
    }

    #[test]
    fn dynamic_survival_at_lower_edge_is_static(d in family_strategy(), o in order_strategy()) {
        let lo = d.support().0;
        let s = evaluate(&d, &o, EntropyKind::Gwse, None, Method::Quadrature, &cfg()).unwrap().value;
        let dy = evaluate(&d, &o, EntropyKind::Gdwse, Some(lo), Method::Quadrature, &cfg()).unwrap().value;
        prop_assert!((s - dy).abs() <= 1e-9 * s.abs().max(1.0));
    }
}

#[test]
fn exponential_gdwse_is_increasing_on_unit_grid() {
    let o = EntropyOrder::new(0.26, 1.25).unwrap();
    let d = PD::exponential(1.0).unwrap();
    let grid: Vec<f64> = (0..=50).map(|i| 0.1 * i as f64).collect();
    assert_eq!(
        classify_gdwse_monotonicity(&d, &o, &grid, &cfg()).unwrap(),
        Monotonicity::Increasing
    );
}

#[test]
fn wmrl_ode_for_gamma() {
    // m*'(t) = λ(t) m*(t) - t
    let d = PD::gamma(2.5).unwrap();
    for t in [0.5, 1.5, 4.0] {
        let h = 1e-4;
        let dm = (wmrl(&d, t + h, &cfg()).unwrap() - wmrl(&d, t - h, &cfg()).unwrap()) / (2.0 * h);
        let rhs = d.hazard(t).unwrap() * wmrl(&d, t, &cfg()).unwrap() - t;
        assert!((dm - rhs).abs() < 1e-6 * rhs.abs().max(1.0), "t={t}: {dm} vs {rhs}");
    }
}

#[test]
fn rayleigh_classified_constant() {
    let o = EntropyOrder::new(0.7, 1.6).unwrap();
    let d = PD::rayleigh(2.0).unwrap();
    let grid = default_grid(&d).unwrap();
    assert_eq!(classify_gdwse_monotonicity(&d, &o, &grid, &cfg()).unwrap(), Monotonicity::Constant);
    let v0 = gdwse(&d, &o, 0.0, &cfg()).unwrap().value;
    let v1 = gdwse(&d, &o, 1.3, &cfg()).unwrap().value;
    assert_eq!(v0, v1);
}
