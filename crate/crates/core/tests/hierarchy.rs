use advdiv::convergence::{
    classify, default_specs, default_suite, delta_to_one, hierarchy_report, strict_specs, trace,
    weak_convergence_check, weak_convergence_oracle, VerdictKind, TOL_CONV,
};
use advdiv::generators::{catalog, GeneratorKind};
use advdiv::{DivergenceSpec, ExtendedReal};

#[test]
fn reduced_grid_reproduces_the_order() {
    let suite = default_suite(16, 128).unwrap();
    let report = hierarchy_report(&default_specs(0.5), &suite, TOL_CONV).unwrap();
    for (e, row) in report.verdicts.iter().enumerate() {
        let kinds: Vec<_> = row.iter().map(|v| v.kind).collect();
        eprintln!("{:>14} {kinds:?}", report.engines[e]);
    }
    assert!(report.matches_expected, "{:?} {:?}", report.classes, report.hasse);
}

#[test]
fn kl_and_tv_witness_traces() {
    let shift = &default_suite(16, 128).unwrap()[1];
    let kl = trace(&DivergenceSpec::ClosedFormF { generator: catalog(GeneratorKind::Kl) }, shift).unwrap();
    assert!(kl.values.iter().all(|v| *v == ExtendedReal::PosInfinity));
    let tv = trace(&DivergenceSpec::ClosedFormF { generator: catalog(GeneratorKind::Tv) }, shift).unwrap();
    // TV between U(0,1) and U(h, 1+h) is h when h is a whole number of cells.
    for (v, &n) in tv.values.iter().zip(&tv.steps) {
        assert!((v.to_f64() - 1.0 / n as f64).abs() < 1e-12);
    }
    assert_eq!(classify(&tv, TOL_CONV).kind, VerdictKind::Converges);
}

#[test]
fn wasserstein_on_delta_shrink_tracks_snapped_points() {
    let seq = &default_suite(8, 64).unwrap()[0];
    let w = trace(&DivergenceSpec::Wasserstein1 { lipschitz: 1.0 }, seq).unwrap();
    for (k, v) in w.values.iter().enumerate() {
        let snapped = seq.items[k].space().points()[seq.items[k].weights().iter().position(|&x| x == 1.0).unwrap()][0];
        assert!((v.to_f64() - snapped).abs() < 1e-12);
        assert!((snapped - 1.0 / w.steps[k] as f64).abs() <= 0.5 / 63.0 + 1e-12);
    }
}

#[test]
fn weak_convergence_oracle_examples() {
    let suite = default_suite(16, 128).unwrap();
    assert_eq!(weak_convergence_oracle(&suite[0], TOL_CONV).unwrap().kind, VerdictKind::Converges);
    assert_eq!(weak_convergence_oracle(&suite[5], TOL_CONV).unwrap().kind, VerdictKind::Converges);
    assert_eq!(weak_convergence_oracle(&delta_to_one(16, 128).unwrap(), TOL_CONV).unwrap().kind, VerdictKind::Diverges);
}

#[test]
fn no_engine_converges_where_weak_convergence_fails() {
    let mut suite = default_suite(16, 128).unwrap();
    suite.push(delta_to_one(16, 128).unwrap());
    let specs = strict_specs(0.5);
    let traces: Vec<Vec<_>> = specs.iter().map(|s| suite.iter().map(|q| trace(s, q).unwrap()).collect()).collect();
    let rows = weak_convergence_check(&traces, &suite, TOL_CONV).unwrap();
    assert!(rows.iter().any(|r| r.oracle_verdict == VerdictKind::Diverges));
    assert!(rows.iter().all(|r| !r.violation), "{rows:?}");
}
