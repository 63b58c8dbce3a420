//! Hand-sized studies built directly from domain types.

use std::collections::BTreeMap;

use flexplan::formulation::{build_model, Model, VarKey, VarKind};
use flexplan::lp::{solve, Sense, Solution, SolveOptions, Status};
use flexplan::study::{Horizon, MarketHistory, NodeData, Study};
use flexplan::system::{
    Carrier, DemandSpec, EmissionScope, InvestmentPolicy, LoadShiftPolicy, MarketSettings, Mode,
    Storage, SystemSpec, Technology,
};
use flexplan::tree::{build_tree, BranchSpec, NodeId};

pub const INF: f64 = f64::INFINITY;

pub fn mode(name: &str, inputs: &[(&str, f64)], outputs: &[(&str, f64)], emission: f64) -> Mode {
    Mode {
        name: name.into(),
        inputs: inputs.iter().map(|(c, v)| (c.to_string(), *v)).collect(),
        outputs: outputs.iter().map(|(c, v)| (c.to_string(), *v)).collect(),
        emission,
    }
}

pub fn tech(name: &str, modes: Vec<Mode>, v_init: f64) -> Technology {
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

pub fn grid(v_init: f64) -> Technology {
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

pub fn boiler(v_init: f64, eta: f64, opex: f64) -> Technology {
    Technology {
        opex_var: opex,
        ..tech("GB", vec![mode("burn", &[], &[("HEAT", eta)], 0.2)], v_init)
    }
}

pub fn storage(carrier: &str) -> Storage {
    Storage {
        name: "ST".into(),
        carrier: carrier.into(),
        eta_charge: 0.9,
        eta_discharge: 0.9,
        loss_eps: 0.01,
        p_max: 5.0,
        theta: 1.0,
        e_max_init: 20.0,
        capex: 0.0,
        lifetime: 10.0,
        candidate: false,
        max_new: None,
        soc_init_frac: 0.5,
        degradation_cost: 0.0,
    }
}

/// A site with an EL carrier and an idle grid connection; every
/// operational node carries zero data. Markets are all closed.
pub fn micro(steps: usize, conditionals: &[Vec<f64>], bidding_stage: usize) -> Study {
    let tree = build_tree(&BranchSpec::new(conditionals.to_vec()), steps).unwrap();
    let data = tree
        .nodes()
        .iter()
        .map(|n| (n.stage > bidding_stage).then(|| NodeData::zeros(steps)))
        .collect();
    let system = SystemSpec {
        carriers: vec![Carrier {
            name: "EL".into(),
            electricity: true,
            heat: false,
        }],
        technologies: vec![grid(0.0)],
        storage: vec![],
        demand: DemandSpec {
            carriers: vec![],
            flex_carriers: vec![],
            mu_surplus: 0.0,
        },
        load_shift: LoadShiftPolicy {
            up_frac: 0.0,
            down_frac: 0.0,
            window: [0, steps.saturating_sub(1)],
            carriers: vec![],
            balance_stages: None,
            inconvenience_cost: 0.0,
        },
        market: MarketSettings {
            day_ahead: false,
            intraday: false,
            reserve: false,
            ..Default::default()
        },
        policy: InvestmentPolicy {
            budget: INF,
            discount_rate: 0.09,
            export_cap: INF,
            emission_cap: None,
            emission_scope: EmissionScope::Node,
        },
    };
    Study {
        name: "micro".into(),
        scenario: String::new(),
        horizon: Horizon {
            steps_per_stage: steps,
            bidding_stage,
            initial_output: 0.0,
        },
        tree,
        system,
        data,
        history: MarketHistory::unlimited(steps),
    }
}

/// One operational node (id 1) below a bidding root.
pub fn single(steps: usize) -> Study {
    micro(steps, &[vec![1.0]], 0)
}

/// Applies `f` to the data of every operational node.
pub fn each_node(s: &mut Study, mut f: impl FnMut(&mut NodeData)) {
    for d in s.data.iter_mut().flatten() {
        f(d);
    }
}

/// Declares `name` if missing; every carrier other than EL is heat.
pub fn ensure_carrier(s: &mut Study, name: &str) {
    if s.system.carrier(name).is_none() {
        s.system.carriers.push(Carrier {
            name: name.into(),
            electricity: false,
            heat: true,
        });
    }
}

pub fn add_tech(s: &mut Study, t: Technology) {
    for m in &t.modes {
        for c in m.inputs.keys().chain(m.outputs.keys()) {
            ensure_carrier(s, c);
        }
    }
    s.system.technologies.push(t);
}

pub fn add_storage(s: &mut Study, st: Storage) {
    ensure_carrier(s, &st.carrier);
    s.system.storage.push(st);
}

pub fn set_demand(s: &mut Study, carrier: &str, values: &[f64]) {
    ensure_carrier(s, carrier);
    if !s.system.demand.carriers.iter().any(|c| c == carrier) {
        s.system.demand.carriers.push(carrier.into());
    }
    each_node(s, |d| {
        d.demand.insert(carrier.into(), values.to_vec());
    });
}

pub fn set_node_demand(s: &mut Study, node: usize, carrier: &str, values: &[f64]) {
    s.data[node]
        .as_mut()
        .unwrap()
        .demand
        .insert(carrier.into(), values.to_vec());
}

pub fn tech_index(s: &Study, name: &str) -> usize {
    s.system
        .technologies
        .iter()
        .position(|t| t.name == name)
        .unwrap()
}

pub fn carrier_index(s: &Study, name: &str) -> usize {
    s.system
        .carriers
        .iter()
        .position(|c| c.name == name)
        .unwrap()
}

pub fn build(s: &Study) -> Model {
    build_model(s).unwrap()
}

pub fn run(s: &Study) -> (Model, Solution) {
    let m = build(s);
    let sol = solve(&m.problem, &SolveOptions::default()).unwrap();
    (m, sol)
}

pub fn run_optimal(s: &Study) -> (Model, Solution) {
    let (m, sol) = run(s);
    assert_eq!(sol.status, Status::Optimal);
    (m, sol)
}

pub fn value(m: &Model, x: &[f64], key: VarKey) -> f64 {
    x[m.col(&key)
        .unwrap_or_else(|| panic!("no column for {key:?}"))]
}

pub fn out_key(s: &Study, node: usize, t: usize, tech: &str, carrier: &str, mode: usize) -> VarKey {
    VarKey::new(VarKind::Out)
        .node(NodeId(node))
        .step(t)
        .obj(tech_index(s, tech))
        .carrier(carrier_index(s, carrier))
        .mode(mode)
}

pub fn in_key(s: &Study, node: usize, t: usize, tech: &str, carrier: &str, mode: usize) -> VarKey {
    VarKey {
        kind: VarKind::In,
        ..out_key(s, node, t, tech, carrier, mode)
    }
}

pub fn row(m: &Model, name: &str) -> usize {
    m.problem
        .row_names
        .iter()
        .position(|r| r == name)
        .unwrap_or_else(|| panic!("no row {name}"))
}

/// Coefficients of row `r` keyed by column.
pub fn row_terms(m: &Model, r: usize) -> BTreeMap<usize, f64> {
    let mut out = BTreeMap::new();
    for &(i, j, v) in &m.problem.triplets {
        if i == r {
            *out.entry(j).or_insert(0.0) += v;
        }
    }
    out
}

/// Signed violation of row `r` at `x`; zero or negative when satisfied.
pub fn violation(m: &Model, r: usize, x: &[f64]) -> f64 {
    let lhs: f64 = row_terms(m, r).iter().map(|(&j, &v)| v * x[j]).sum();
    let rhs = m.problem.rhs[r];
    match m.problem.row_sense[r] {
        Sense::Le => lhs - rhs,
        Sense::Ge => rhs - lhs,
        Sense::Eq => (lhs - rhs).abs(),
    }
}

/// A zero point with the given columns set.
pub fn point(m: &Model, set: &[(VarKey, f64)]) -> Vec<f64> {
    let mut x = vec![0.0; m.problem.n_cols()];
    for (k, v) in set {
        x[m.col(k).unwrap_or_else(|| panic!("no column for {k:?}"))] = *v;
    }
    x
}
