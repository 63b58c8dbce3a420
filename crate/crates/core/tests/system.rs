use flexplan::synthetic;
use flexplan::system::{
    annualized_cost, crf, shift_bounds, validate_system, LoadShiftPolicy, SystemError, SystemSpec,
};

/// Capital recovery factors evaluated with mpmath at 50 significant digits.
const CRF_ORACLE: [(f64, f64, f64); 5] = [
    (0.09, 10.0, 0.15582008990903380347),
    (0.09, 20.0, 0.10954647500822923954),
    (0.05, 25.0, 0.070952457299229628742),
    (0.12, 15.0, 0.14682423964634631389),
    (1e-6, 10.0, 0.10000055000082499959),
];

fn toy_system() -> SystemSpec {
    let (c, s) = synthetic::toy();
    synthetic::study_of(&c, &s).unwrap().system
}

fn case_system() -> SystemSpec {
    let (c, s) = synthetic::case_study();
    synthetic::study_of(&c, &s).unwrap().system
}

#[test]
fn crf_matches_high_precision_values() {
    for (rate, life, want) in CRF_ORACLE {
        let got = crf(rate, life).unwrap();
        assert!(
            (got - want).abs() <= 1e-14 * want,
            "crf({rate}, {life}) = {got}, want {want}"
        );
    }
    assert!((annualized_cost(1000.0, 0.09, 10.0).unwrap() - 155.82).abs() < 1e-2);
}

#[test]
fn crf_limits() {
    assert!((annualized_cost(100.0, 1e-12, 10.0).unwrap() - 10.0).abs() < 1e-8);
    assert!((annualized_cost(100.0, 0.09, 1.0).unwrap() - 109.0).abs() < 1e-12);
    assert_eq!(crf(0.09, 0.5), Err(SystemError::NonPositiveLifetime(0.5)));
    assert_eq!(crf(0.0, 10.0), Err(SystemError::NonPositiveRate(0.0)));
}

#[test]
fn crf_increases_with_rate_and_decreases_with_lifetime() {
    for li in 1..=40 {
        let life = li as f64;
        let mut prev = 0.0;
        for ri in 1..=30 {
            let c = crf(ri as f64 * 0.01, life).unwrap();
            assert!(c > prev);
            prev = c;
        }
    }
    for ri in 1..=30 {
        let rate = ri as f64 * 0.01;
        let mut prev = f64::INFINITY;
        for li in 1..=40 {
            let c = crf(rate, li as f64).unwrap();
            assert!(c < prev);
            prev = c;
        }
    }
}

#[test]
fn shift_bounds_follow_window_and_fractions() {
    let policy = LoadShiftPolicy {
        up_frac: 0.10,
        down_frac: 0.30,
        window: [8, 17],
        ..toy_system().load_shift
    };
    let (up, down) = shift_bounds(&policy, 100.0, 10);
    assert!((up - 10.0).abs() < 1e-12 && (down - 30.0).abs() < 1e-12);
    assert_eq!(shift_bounds(&policy, 100.0, 3), (0.0, 0.0));
    assert_eq!(shift_bounds(&policy, 0.0, 10), (0.0, 0.0));
    for t in 0..24 {
        let (u, d) = shift_bounds(&policy, 42.0, t);
        assert!(u >= 0.0 && d >= 0.0);
        if !(8..=17).contains(&t) {
            assert_eq!((u, d), (0.0, 0.0));
        }
    }
}

#[test]
fn shipped_systems_are_valid() {
    assert!(validate_system(&toy_system()).is_empty());
    let case = case_system();
    let report = validate_system(&case);
    assert!(report.is_empty(), "{report}");
    assert_eq!(validate_system(&case), report);
}

#[test]
fn heat_demand_without_heat_source_is_reported() {
    let mut sys = toy_system();
    sys.technologies.retain(|t| !t.outputs_carrier("HEAT"));
    sys.storage.retain(|s| s.carrier != "HEAT");
    let report = validate_system(&sys);
    assert!(report.has("system.unreachable_demand"), "{report}");
    assert!(report.to_string().contains("HEAT"));
}

#[test]
fn heat_pump_without_electricity_is_reported() {
    let mut sys = toy_system();
    sys.carriers.retain(|c| !c.electricity);
    let report = validate_system(&sys);
    assert!(report.has("system.heat_pump_input"), "{report}");
    assert!(report.has("system.electricity"));
}

#[test]
fn trading_without_grid_is_reported() {
    let mut sys = toy_system();
    sys.technologies.retain(|t| !t.grid);
    assert!(validate_system(&sys).has("system.grid"));
}
