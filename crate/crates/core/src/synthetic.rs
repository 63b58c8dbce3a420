//! Synthetic studies: a small toy site, a case-study-shaped site with clustered
//! representative days, and randomised desk studies. All data are invented.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::io::{
    assemble, BranchOverlay, ClusterConfig, CostScenario, IoError, LoadOptions, SeriesTable,
    StudyConfig, TreeConfig,
};
use crate::study::{Horizon, Study};
use crate::system::{
    Carrier, DemandSpec, EmissionScope, InvestmentPolicy, LoadShiftPolicy, MarketSettings, Mode,
    Storage, Technology,
};

const T: usize = 24;

fn carrier(name: &str, electricity: bool, heat: bool) -> Carrier {
    Carrier {
        name: name.into(),
        electricity,
        heat,
    }
}

fn mode(name: &str, inputs: &[(&str, f64)], outputs: &[(&str, f64)], emission: f64) -> Mode {
    Mode {
        name: name.into(),
        inputs: inputs.iter().map(|(c, v)| (c.to_string(), *v)).collect(),
        outputs: outputs.iter().map(|(c, v)| (c.to_string(), *v)).collect(),
        emission,
    }
}

fn tech(name: &str, modes: Vec<Mode>, v_init: f64) -> Technology {
    Technology {
        name: name.into(),
        modes,
        v_init,
        capex: 0.0,
        lifetime: 20.0,
        candidate: false,
        max_new: None,
        ramp_beta: 1.0,
        availability: None,
        grid: false,
        heat_pump: false,
        opex_var: 0.0,
    }
}

fn grid(v_init: f64) -> Technology {
    Technology {
        grid: true,
        ..tech(
            "GRID",
            vec![
                mode("import", &[], &[("EL", 1.0)], 0.0),
                mode("export", &[("EL", 1.0)], &[], 0.0),
            ],
            v_init,
        )
    }
}

fn battery() -> Storage {
    Storage {
        name: "BESS".into(),
        carrier: "EL".into(),
        eta_charge: 0.95,
        eta_discharge: 0.95,
        loss_eps: 0.001,
        p_max: 0.0,
        theta: 0.5,
        e_max_init: 0.0,
        capex: 250_000.0,
        lifetime: 15.0,
        candidate: true,
        max_new: Some(10.0),
        soc_init_frac: 0.5,
        degradation_cost: 2.0,
    }
}

fn thermal_store(carrier: &str) -> Storage {
    Storage {
        name: "TES".into(),
        carrier: carrier.into(),
        eta_charge: 0.98,
        eta_discharge: 0.98,
        loss_eps: 0.005,
        p_max: 0.0,
        theta: 0.25,
        e_max_init: 0.0,
        capex: 25_000.0,
        lifetime: 25.0,
        candidate: true,
        max_new: Some(40.0),
        soc_init_frac: 0.5,
        degradation_cost: 0.5,
    }
}

/// Day-shaped profile: base level with morning and evening humps.
fn daily(rng: &mut ChaCha8Rng, base: f64, amp: f64, noise: f64) -> Vec<f64> {
    let phase: f64 = rng.random_range(-1.0..1.0);
    (0..T)
        .map(|t| {
            let h = t as f64 + phase;
            let shape = 0.6 * (-((h - 8.0) / 2.5).powi(2)).exp()
                + (-((h - 18.0) / 3.0).powi(2)).exp()
                - 0.4 * (-((h - 3.0) / 3.0).powi(2)).exp();
            (base + amp * shape + noise * rng.random_range(-1.0..1.0)).max(0.0)
        })
        .collect()
}

fn solar(rng: &mut ChaCha8Rng) -> Vec<f64> {
    let cloud: f64 = rng.random_range(0.4..1.0);
    (0..T)
        .map(|t| {
            let x = (t as f64 - 6.0) / 12.0;
            if (0.0..=1.0).contains(&x) {
                (cloud * (PI * x).sin() * rng.random_range(0.85..1.0)).clamp(0.0, 1.0)
            } else {
                0.0
            }
        })
        .collect()
}

/// Market columns of one node. `activation` marks hours with called reserves.
fn market_columns(
    rng: &mut ChaCha8Rng,
    level: f64,
    activation: bool,
    cols: &mut BTreeMap<String, Vec<f64>>,
) {
    let da = daily(rng, 45.0 * level, 35.0 * level, 4.0);
    let mut put = |k: &str, v: Vec<f64>| {
        cols.insert(k.to_string(), v);
    };
    put("price_id_buy", da.iter().map(|p| p * 1.08 + 1.0).collect());
    put(
        "price_id_sell",
        da.iter().map(|p| (p * 0.92 - 1.0).max(0.0)).collect(),
    );
    put("price_act_up", da.iter().map(|p| p * 1.4 + 5.0).collect());
    put("price_act_dwn", da.iter().map(|p| p * 0.6).collect());
    put(
        "price_cm_up",
        (0..T).map(|_| rng.random_range(4.0..12.0)).collect(),
    );
    put(
        "price_cm_dwn",
        (0..T).map(|_| rng.random_range(2.0..8.0)).collect(),
    );
    put(
        "sigma_id_buy",
        (0..T).map(|_| rng.random_range(0.5..1.0)).collect(),
    );
    put(
        "sigma_id_sell",
        (0..T).map(|_| rng.random_range(0.5..1.0)).collect(),
    );
    let (up, dwn) = activation_pattern(rng, activation);
    put("sigma_up", up);
    put("sigma_dwn", dwn);
    put("price_co2", vec![85.0; T]);
    put("price_da", da);
}

fn activation_pattern(rng: &mut ChaCha8Rng, active: bool) -> (Vec<f64>, Vec<f64>) {
    let mut up = vec![0.0; T];
    let mut dwn = vec![0.0; T];
    if active {
        let s: usize = rng.random_range(16..20);
        for v in &mut up[s..s + 2] {
            *v = 1.0;
        }
        let s: usize = rng.random_range(1..5);
        for v in &mut dwn[s..s + 3] {
            *v = 1.0;
        }
    }
    (up, dwn)
}

fn history(rng: &mut ChaCha8Rng, series: &mut SeriesTable) {
    series.insert("history", "hist_id_volume", daily(rng, 20.0, 10.0, 2.0));
    series.insert("history", "hist_rm_volume", daily(rng, 6.0, 3.0, 0.5));
}

fn toy_system() -> (Vec<Carrier>, Vec<Technology>, Vec<Storage>) {
    let carriers = vec![carrier("EL", true, false), carrier("HEAT", false, true)];
    let technologies = vec![
        grid(15.0),
        Technology {
            ramp_beta: 0.6,
            opex_var: 38.0,
            ..tech("GB", vec![mode("burn", &[], &[("HEAT", 0.92)], 0.22)], 10.0)
        },
        Technology {
            opex_var: 0.5,
            ..tech(
                "EB",
                vec![mode("heat", &[("EL", 1.0)], &[("HEAT", 0.99)], 0.0)],
                4.0,
            )
        },
        Technology {
            heat_pump: true,
            candidate: true,
            capex: 700_000.0,
            lifetime: 20.0,
            max_new: Some(5.0),
            opex_var: 1.0,
            ..tech(
                "HP",
                vec![mode("lift", &[("EL", 1.0)], &[("HEAT", 3.0)], 0.0)],
                0.0,
            )
        },
        Technology {
            availability: Some("pv".into()),
            ..tech("PV", vec![mode("gen", &[], &[("EL", 1.0)], 0.0)], 3.0)
        },
    ];
    (
        carriers,
        technologies,
        vec![battery(), thermal_store("HEAT")],
    )
}

fn toy_node(rng: &mut ChaCha8Rng, level: f64, activation: bool) -> BTreeMap<String, Vec<f64>> {
    let mut cols = BTreeMap::new();
    market_columns(rng, level, activation, &mut cols);
    cols.insert("demand_EL".into(), daily(rng, 4.0, 1.5, 0.3));
    cols.insert("demand_HEAT".into(), daily(rng, 6.0, 2.0, 0.4));
    cols.insert("flex_HEAT".into(), daily(rng, 2.5, 0.5, 0.2));
    cols.insert("avail_pv".into(), solar(rng));
    cols
}

fn scenarios() -> BTreeMap<String, CostScenario> {
    let mut s = BTreeMap::new();
    s.insert("2025".to_string(), CostScenario::default());
    s.insert(
        "2050".to_string(),
        CostScenario {
            capex: [
                ("BESS".to_string(), 110_000.0),
                ("HP".to_string(), 480_000.0),
                ("TES".to_string(), 18_000.0),
            ]
            .into_iter()
            .collect(),
            co2_price_scale: Some(2.5),
        },
    );
    s
}

/// Two operational days after a root that invests and bids for both.
pub fn toy() -> (StudyConfig, SeriesTable) {
    let (carriers, technologies, storage) = toy_system();
    let config = StudyConfig {
        name: "toy".into(),
        series: "toy_series.csv".into(),
        history_key: "history".into(),
        horizon: Horizon {
            steps_per_stage: T,
            bidding_stage: 0,
            initial_output: 0.0,
        },
        tree: TreeConfig {
            conditionals: Some(vec![vec![0.5, 0.5], vec![0.6, 0.4]]),
            ..Default::default()
        },
        carriers,
        technologies,
        storage,
        demand: DemandSpec {
            carriers: vec!["EL".into(), "HEAT".into()],
            flex_carriers: vec!["HEAT".into()],
            mu_surplus: 0.5,
        },
        load_shift: LoadShiftPolicy {
            up_frac: 0.10,
            down_frac: 0.30,
            window: [8, 17],
            carriers: vec!["EL".into()],
            balance_stages: None,
            inconvenience_cost: 4.0,
        },
        market: MarketSettings {
            x_max: 2.0,
            id_liquidity_frac: 0.2,
            rm_volume_frac: 0.5,
            grid_tariff_power: 300.0,
            ..Default::default()
        },
        policy: InvestmentPolicy {
            budget: 3_000_000.0,
            discount_rate: 0.09,
            export_cap: 5.0,
            emission_cap: None,
            emission_scope: EmissionScope::Node,
        },
        scenarios: scenarios(),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(2025);
    let mut series = SeriesTable::default();
    history(&mut rng, &mut series);
    let labels = [
        ("0", 1.0, false),
        ("1", 1.25, false),
        ("0.0", 0.9, false),
        ("0.1", 1.1, true),
        ("1.0", 1.2, false),
        ("1.1", 1.4, true),
    ];
    for (key, level, act) in labels {
        for (c, v) in toy_node(&mut rng, level, act) {
            series.insert(key, &c, v);
        }
    }
    (config, series)
}

/// Investment root, four representative bidding days clustered from thirty
/// candidate days, and a calm and an activated branch below each.
pub fn case_study() -> (StudyConfig, SeriesTable) {
    let carriers = vec![
        carrier("EL", true, false),
        carrier("HEAT-LT", false, true),
        carrier("HEAT-HT", false, true),
        carrier("GAS", false, false),
    ];
    let technologies = vec![
        grid(25.0),
        Technology {
            opex_var: 32.0,
            ..tech(
                "GAS-SUPPLY",
                vec![mode("buy", &[], &[("GAS", 1.0)], 0.0)],
                f64::INFINITY,
            )
        },
        Technology {
            ramp_beta: 0.5,
            opex_var: 2.0,
            ..tech(
                "GB",
                vec![
                    mode("burn", &[("GAS", 1.075)], &[("HEAT-HT", 1.0)], 0.216),
                    mode("burn-lt", &[("GAS", 1.075)], &[("HEAT-LT", 1.0)], 0.216),
                ],
                14.0,
            )
        },
        Technology {
            opex_var: 0.8,
            candidate: true,
            capex: 90_000.0,
            max_new: Some(10.0),
            ..tech(
                "EB",
                vec![
                    mode("heat", &[("EL", 1.01)], &[("HEAT-HT", 1.0)], 0.0),
                    mode("heat-lt", &[("EL", 1.01)], &[("HEAT-LT", 1.0)], 0.0),
                ],
                4.0,
            )
        },
        Technology {
            heat_pump: true,
            candidate: true,
            capex: 750_000.0,
            lifetime: 20.0,
            max_new: Some(6.0),
            opex_var: 1.2,
            ramp_beta: 0.8,
            ..tech(
                "HP",
                vec![
                    mode("lt", &[("EL", 1.0)], &[("HEAT-LT", 3.5)], 0.0),
                    mode(
                        "ht",
                        &[("EL", 1.0)],
                        &[("HEAT-HT", 2.2), ("HEAT-LT", 0.3)],
                        0.0,
                    ),
                ],
                1.0,
            )
        },
        Technology {
            availability: Some("pv".into()),
            candidate: true,
            capex: 600_000.0,
            lifetime: 25.0,
            max_new: Some(5.0),
            ..tech("PV", vec![mode("gen", &[], &[("EL", 1.0)], 0.0)], 2.0)
        },
    ];
    let storage = vec![
        thermal_store("HEAT-HT"),
        battery(),
        Storage {
            name: "FLYWHEEL".into(),
            carrier: "EL".into(),
            eta_charge: 0.97,
            eta_discharge: 0.97,
            loss_eps: 0.03,
            p_max: 0.0,
            theta: 4.0,
            e_max_init: 0.0,
            capex: 400_000.0,
            lifetime: 20.0,
            candidate: true,
            max_new: Some(2.0),
            soc_init_frac: 0.5,
            degradation_cost: 0.5,
        },
    ];
    let days: Vec<String> = (0..30).map(|d| format!("d{d:02}")).collect();
    let config = StudyConfig {
        name: "case".into(),
        series: "case_series.csv".into(),
        history_key: "history".into(),
        horizon: Horizon {
            steps_per_stage: T,
            bidding_stage: 1,
            initial_output: 0.0,
        },
        tree: TreeConfig {
            cluster: Some(ClusterConfig {
                k: 4,
                seed: 11,
                candidates: days.clone(),
                features: vec![
                    "price_da".into(),
                    "demand_EL".into(),
                    "demand_HEAT-HT".into(),
                ],
                op_branches: vec![
                    BranchOverlay {
                        probability: 0.8,
                        overlay: Some("calm".into()),
                    },
                    BranchOverlay {
                        probability: 0.2,
                        overlay: Some("act".into()),
                    },
                ],
            }),
            ..Default::default()
        },
        carriers,
        technologies,
        storage,
        demand: DemandSpec {
            carriers: vec!["EL".into(), "HEAT-LT".into(), "HEAT-HT".into()],
            flex_carriers: vec!["HEAT-LT".into(), "HEAT-HT".into()],
            mu_surplus: 0.4,
        },
        load_shift: LoadShiftPolicy {
            up_frac: 0.10,
            down_frac: 0.30,
            window: [8, 17],
            carriers: vec!["EL".into(), "HEAT-LT".into()],
            balance_stages: None,
            inconvenience_cost: 6.0,
        },
        market: MarketSettings {
            x_max: 3.0,
            id_liquidity_frac: 0.15,
            rm_volume_frac: 0.5,
            grid_tariff_power: 400.0,
            ..Default::default()
        },
        policy: InvestmentPolicy {
            budget: 6_000_000.0,
            discount_rate: 0.09,
            export_cap: 4.0,
            emission_cap: None,
            emission_scope: EmissionScope::Node,
        },
        scenarios: scenarios(),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut series = SeriesTable::default();
    history(&mut rng, &mut series);
    for (d, key) in days.iter().enumerate() {
        let season = 1.0 + 0.35 * (2.0 * PI * d as f64 / 30.0).cos();
        let mut cols = BTreeMap::new();
        market_columns(&mut rng, season, false, &mut cols);
        cols.insert("demand_EL".into(), daily(&mut rng, 6.0, 2.0, 0.4));
        cols.insert(
            "demand_HEAT-LT".into(),
            daily(&mut rng, 3.0 * season, 1.0, 0.3),
        );
        cols.insert(
            "demand_HEAT-HT".into(),
            daily(&mut rng, 7.0 * season, 2.0, 0.5),
        );
        cols.insert("flex_HEAT-LT".into(), daily(&mut rng, 2.0, 0.5, 0.2));
        cols.insert("flex_HEAT-HT".into(), daily(&mut rng, 1.5, 0.5, 0.2));
        cols.insert("avail_pv".into(), solar(&mut rng));
        for (c, v) in cols {
            series.insert(key, &c, v);
        }
    }
    let (up, dwn) = activation_pattern(&mut rng, false);
    series.insert("calm", "sigma_up", up);
    series.insert("calm", "sigma_dwn", dwn);
    let (up, dwn) = activation_pattern(&mut rng, true);
    series.insert("act", "sigma_up", up);
    series.insert("act", "sigma_dwn", dwn);
    (config, series)
}

/// A randomised toy-like study with two or three stages and at most eight leaves.
pub fn desk_study(seed: u64) -> (StudyConfig, SeriesTable) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let (mut config, _) = toy();
    config.name = format!("desk{seed}");
    let stages = if rng.random_bool(0.5) { 1 } else { 2 };
    let mut conditionals = Vec::new();
    let mut leaves = 1;
    for _ in 0..stages {
        let max_b = (8 / leaves).clamp(1, 3);
        let b = rng.random_range(1..=max_b);
        leaves *= b;
        let w: Vec<f64> = (0..b).map(|_| rng.random_range(0.2..1.0)).collect();
        let sum: f64 = w.iter().sum();
        let mut p: Vec<f64> = w.iter().map(|x| x / sum).collect();
        let head: f64 = p[..b - 1].iter().sum();
        p[b - 1] = 1.0 - head;
        conditionals.push(p);
    }
    config.tree = TreeConfig {
        conditionals: Some(conditionals.clone()),
        ..Default::default()
    };
    config.horizon.bidding_stage = if stages == 2 && rng.random_bool(0.5) {
        1
    } else {
        0
    };
    config.market.x_max = rng.random_range(0.5..4.0);
    config.market.grid_tariff_power = rng.random_range(0.0..600.0);
    config.policy.export_cap = rng.random_range(1.0..8.0);
    config.storage[0].capex = rng.random_range(80_000.0..300_000.0);
    config.storage[1].capex = rng.random_range(10_000.0..40_000.0);

    let mut series = SeriesTable::default();
    history(&mut rng, &mut series);
    let mut labels = vec![String::new()];
    for p in &conditionals {
        let mut next = Vec::new();
        for l in &labels {
            for b in 0..p.len() {
                let key = if l.is_empty() {
                    b.to_string()
                } else {
                    format!("{l}.{b}")
                };
                let level = rng.random_range(0.7..1.5);
                let act = rng.random_bool(0.5);
                for (c, v) in toy_node(&mut rng, level, act) {
                    series.insert(&key, &c, v);
                }
                next.push(key);
            }
        }
        labels = next;
    }
    (config, series)
}

/// Assembles a synthetic configuration without run-time adjustments.
pub fn study_of(config: &StudyConfig, series: &SeriesTable) -> Result<Study, IoError> {
    assemble(config, series, &LoadOptions::default())
}
