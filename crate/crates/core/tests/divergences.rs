mod common;

use advdiv::divergences::{
    closed_form, gan_objective, linear_fgan, linear_wgan_gp, mmd, sinkhorn_ot, wasserstein1, Certificate,
};
use advdiv::generators::{catalog, GeneratorKind};
use advdiv::{evaluate, DivergenceSpec, ExtendedReal, FeatureMap, SolverConfig};
use approx::assert_abs_diff_eq;
use common::*;
use proptest::prelude::*;

const LN4: f64 = 2.0 * std::f64::consts::LN_2;

fn engines(space: &std::sync::Arc<advdiv::FiniteMetricSpace>) -> Vec<DivergenceSpec> {
    let solver = SolverConfig::default();
    vec![
        DivergenceSpec::ClosedFormF { generator: catalog(GeneratorKind::Js) },
        DivergenceSpec::GanObjective,
        DivergenceSpec::LinearFGan {
            generator: catalog(GeneratorKind::SqHellinger),
            features: FeatureMap::coordinates(space.clone()).unwrap(),
            solver,
        },
        DivergenceSpec::Mmd { sigma: 0.5 },
        DivergenceSpec::Wasserstein1 { lipschitz: 1.0 },
        DivergenceSpec::SinkhornOt { eps: 0.05, cost: None, solver },
        DivergenceSpec::LinearWganGp { eta: 0.7 },
        DivergenceSpec::Trivial { tol_eq: 1e-12 },
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn gan_is_shifted_jensen_shannon((xs, p, q) in pair(2..12)) {
        let s = line(&xs);
        let (mu, nu) = (measure(&s, &p), measure(&s, &q));
        let gan = gan_objective(&mu, &nu).unwrap().value.to_f64();
        prop_assert!((gan + LN4 - 2.0 * js_standard(mu.weights(), nu.weights())).abs() <= 1e-8);
        let js = closed_form(&catalog(GeneratorKind::Js), &mu, &nu).unwrap().value.to_f64();
        prop_assert!((gan + LN4 - js).abs() <= 1e-8);
    }

    #[test]
    fn self_value_is_the_minimum((xs, p, _q) in pair(2..10)) {
        let s = line(&xs);
        let mu = measure(&s, &p);
        for spec in engines(&s) {
            let r = evaluate(&spec, &mu, &mu).unwrap();
            prop_assert!(r.gap().to_f64().abs() <= 1e-6, "{}: {:?}", spec.label(), r);
        }
    }

    #[test]
    fn value_bounded_below((xs, p, q) in pair(2..10)) {
        let s = line(&xs);
        let (mu, nu) = (measure(&s, &p), measure(&s, &q));
        // Entropic transport is left out: its self-value is not a global minimum.
        for spec in engines(&s).into_iter().filter(|e| !matches!(e, DivergenceSpec::SinkhornOt { .. })) {
            let r = evaluate(&spec, &mu, &nu).unwrap();
            prop_assert!(r.gap().to_f64() >= -1e-8, "{}: {:?}", spec.label(), r);
        }
    }

    #[test]
    fn convex_in_second_argument((xs, p, q1) in pair(2..8), q2 in raw_weights(8), lambda in 0.05..0.95f64) {
        let s = line(&xs);
        let n = xs.len();
        let mu = measure(&s, &p);
        let mut q2 = q2[..n].to_vec();
        if q2.iter().all(|&x| x == 0.0) {
            q2[0] = 1.0;
        }
        let (a, b) = (measure(&s, &q1), measure(&s, &q2));
        let mix = a.mix(&b, lambda).unwrap();
        for spec in engines(&s) {
            let va = evaluate(&spec, &mu, &a).unwrap().value;
            let vb = evaluate(&spec, &mu, &b).unwrap().value;
            let vm = evaluate(&spec, &mu, &mix).unwrap().value;
            if let (ExtendedReal::Finite(x), ExtendedReal::Finite(y)) = (va, vb) {
                prop_assert!(vm.to_f64() <= lambda * x + (1.0 - lambda) * y + 1e-6, "{}", spec.label());
            }
        }
    }

    #[test]
    fn wasserstein_duality((xs, p, q) in pair(2..16)) {
        let s = line(&xs);
        let (mu, nu) = (measure(&s, &p), measure(&s, &q));
        let r = wasserstein1(1.0, &mu, &nu).unwrap();
        prop_assert!((r.value.to_f64() - w1_line(&xs, mu.weights(), nu.weights())).abs() <= 1e-9);
        let Some(Certificate::Witness { values: f }) = r.certificate else { panic!("critic missing") };
        let dual: f64 = (0..xs.len()).map(|i| f[i] * (mu.weights()[i] - nu.weights()[i])).sum();
        prop_assert!((dual - r.value.to_f64()).abs() <= 1e-8);
        for i in 0..xs.len() {
            for j in 0..xs.len() {
                prop_assert!((f[i] - f[j]).abs() <= (xs[i] - xs[j]).abs() + 1e-8);
            }
        }
        let doubled = wasserstein1(2.0, &mu, &nu).unwrap().value.to_f64();
        prop_assert!((doubled - 2.0 * r.value.to_f64()).abs() <= 1e-12);
        let lp = sinkhorn_ot(0.0, None, &mu, &nu, &SolverConfig::default()).unwrap().value.to_f64();
        prop_assert!((lp - r.value.to_f64()).abs() <= 1e-12);
    }

    #[test]
    fn mmd_matches_double_sum((xs, p, q) in pair(2..12), sigma in 0.1..2.0f64) {
        let s = line(&xs);
        let (mu, nu) = (measure(&s, &p), measure(&s, &q));
        let d: Vec<f64> = mu.weights().iter().zip(nu.weights()).map(|(a, b)| a - b).collect();
        let mut quad = 0.0;
        for i in 0..xs.len() {
            for j in 0..xs.len() {
                quad += d[i] * d[j] * (-(xs[i] - xs[j]).powi(2) / (2.0 * sigma * sigma)).exp();
            }
        }
        let v = mmd(sigma, &mu, &nu).unwrap().value.to_f64();
        prop_assert!((v - quad.max(0.0).sqrt()).abs() <= 1e-9);
        prop_assert!((v - mmd(sigma, &nu, &mu).unwrap().value.to_f64()).abs() <= 1e-15);
    }

    #[test]
    fn wgan_gp_increases_with_mean_gap(a in 0.0..3.0f64, b in 0.0..3.0f64, eta in 0.1..5.0f64) {
        prop_assume!(a < b);
        let s = line(&[0.0, 1.0, 3.0]);
        let target = measure(&s, &[1.0, 0.0, 0.0]);
        // Mean gap a (or b) realized by mass moved to the right endpoint.
        let va = linear_wgan_gp(eta, &measure(&s, &[1.0 - a / 3.0, 0.0, a / 3.0]), &target).unwrap().value.to_f64();
        let vb = linear_wgan_gp(eta, &measure(&s, &[1.0 - b / 3.0, 0.0, b / 3.0]), &target).unwrap().value.to_f64();
        prop_assert!(va < vb);
        prop_assert!((va - (a + a * a / (4.0 * eta))).abs() <= 1e-12);
    }

    #[test]
    fn inequality_chains((xs, p, q) in pair(2..16)) {
        let s = line(&xs);
        let (mu, nu) = (measure(&s, &p), measure(&s, &q));
        let get = |k| closed_form(&catalog(k), &mu, &nu).unwrap().value.to_f64();
        let (t, k, h) = (get(GeneratorKind::Tv), get(GeneratorKind::Kl), get(GeneratorKind::SqHellinger));
        prop_assert!(t <= (k / 2.0).sqrt() + 1e-12);
        // The chain holds for the half-normalized squared Hellinger distance.
        prop_assert!(0.5 * h <= t + 1e-12);
        prop_assert!(t <= h.sqrt() + 1e-12);
        prop_assert!((t - tv(mu.weights(), nu.weights())).abs() <= 1e-12);
        prop_assert!((h - sq_hellinger(mu.weights(), nu.weights())).abs() <= 1e-12);
        let kl_ref = kl(mu.weights(), nu.weights());
        prop_assert!(k == kl_ref || (k - kl_ref).abs() <= 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn one_hot_features_recover_the_divergence((xs, p, q) in positive_pair(6)) {
        let s = line(&xs);
        let (mu, nu) = (measure(&s, &p), measure(&s, &q));
        let psi = FeatureMap::one_hot(s.clone()).unwrap();
        let (a, b) = (mu.weights(), nu.weights());
        let oracle = [
            (GeneratorKind::Kl, kl(a, b)),
            (GeneratorKind::Js, 2.0 * js_standard(a, b)),
            (GeneratorKind::SqHellinger, sq_hellinger(a, b)),
            (GeneratorKind::Tv, tv(a, b)),
        ];
        for (kind, expected) in oracle {
            let r = linear_fgan(&catalog(kind), &psi, &mu, &nu, &SolverConfig::default()).unwrap();
            prop_assert!((r.value.to_f64() - expected).abs() <= 1e-4, "{kind:?}: {} vs {expected}", r.value);
        }
    }
}

#[test]
fn unnormalized_hellinger_can_exceed_total_variation() {
    let s = line(&[0.0, 1.0]);
    let (a, b) = (measure(&s, &[1.0, 0.0]), measure(&s, &[0.0, 1.0]));
    let h = closed_form(&catalog(GeneratorKind::SqHellinger), &a, &b).unwrap().value.to_f64();
    let t = closed_form(&catalog(GeneratorKind::Tv), &a, &b).unwrap().value.to_f64();
    assert_abs_diff_eq!(h, 2.0);
    assert_abs_diff_eq!(t, 1.0);
    assert!(h > t);
}

#[test]
fn entropic_self_value_is_not_a_global_minimum() {
    // Large ε rewards spreading the plan; collapsing ν onto the middle point
    // beats ν = μ.
    let s = line(&[-1.0, 0.0, 1.0]);
    let mu = measure(&s, &[1.0, 1.0, 1.0]);
    let nu = measure(&s, &[0.0, 1.0, 0.0]);
    let r = sinkhorn_ot(10.0, None, &mu, &nu, &SolverConfig::default()).unwrap();
    assert!(r.value.to_f64() < r.min_value);
    // At small ε the transport cost dominates again.
    let r = sinkhorn_ot(0.01, None, &mu, &nu, &SolverConfig::default()).unwrap();
    assert!(r.gap().to_f64() > 0.0);
}

#[test]
fn sinkhorn_tracks_exact_transport_at_small_eps() {
    let s = line(&[0.0, 1.0]);
    let (a, b) = (measure(&s, &[1.0, 0.0]), measure(&s, &[0.0, 1.0]));
    let cfg = SolverConfig::default();
    let exact = sinkhorn_ot(0.0, None, &a, &b, &cfg).unwrap().value.to_f64();
    let smooth = sinkhorn_ot(0.005, None, &a, &b, &cfg).unwrap().value.to_f64();
    assert_abs_diff_eq!(smooth, exact, epsilon = 0.02);
}
