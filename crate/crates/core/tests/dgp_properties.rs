use fcar::{simulate, DgpFamily, DgpSpec, ExparDecay, FcarError};

#[test]
fn order_four_processes_stay_bounded() {
    for family in [DgpFamily::Sine, DgpFamily::Expar, DgpFamily::Setar] {
        let spec = DgpSpec::<f64>::example(family, 4).unwrap();
        let bounded = (0..100u64)
            .filter(|&seed| simulate(&spec, 500, seed).unwrap().series.values().iter().all(|v| v.abs() < 10.0))
            .count();
        assert!(bounded >= 99, "{family}: {bounded}/100 bounded");
    }
}

#[test]
fn order_ten_processes_do_not_diverge() {
    for family in [DgpFamily::Sine, DgpFamily::Expar, DgpFamily::Setar] {
        let spec = DgpSpec::<f64>::example(family, 10).unwrap();
        for seed in 0..100u64 {
            assert!(simulate(&spec, 510, seed).is_ok(), "{family} seed {seed}");
        }
    }
}

#[test]
fn stored_innovations_reproduce_every_series() {
    for family in [DgpFamily::Sine, DgpFamily::Expar, DgpFamily::Setar] {
        for p in [4, 10] {
            let spec = DgpSpec::<f64>::example(family, p).unwrap();
            for seed in 0..5 {
                let sim = simulate(&spec, 300, seed).unwrap();
                assert_eq!(sim.replay(), sim.series.values());
                assert_eq!(sim.innovations.len(), 300);
                assert_eq!(sim.presample.len(), p.max(spec.d));
            }
        }
    }
}

#[test]
fn expar_true_functions() {
    let spec = DgpSpec::<f64>::example(DgpFamily::Expar, 4).unwrap();
    let m = spec.true_functions();
    assert!((m[0](0.0) - 0.5).abs() < 1e-15);
    for (alpha, a) in [0.3, -0.35, 0.1, -0.2].into_iter().enumerate() {
        assert!((m[alpha](10.0) - a).abs() < 1e-12);
        assert!((m[alpha](-10.0) - a).abs() < 1e-12);
    }
}

#[test]
fn linear_decay_expar_usually_diverges() {
    let spec = DgpSpec::<f64>::example(DgpFamily::Expar, 4).unwrap().with_expar_decay(ExparDecay::Linear);
    let diverged = (0..40u64)
        .filter(|&seed| matches!(simulate(&spec, 500, seed), Err(FcarError::NonFiniteState { .. })))
        .count();
    assert!(diverged > 10, "{diverged}/40 diverged");
}

#[test]
fn f32_simulation() {
    let spec = DgpSpec::<f32>::example(DgpFamily::Setar, 4).unwrap();
    let sim = simulate(&spec, 200, 3).unwrap();
    assert_eq!(sim.series.len(), 200);
    assert!(sim.series.values().iter().all(|v| v.is_finite()));
}
