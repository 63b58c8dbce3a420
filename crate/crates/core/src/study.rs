//! A fully resolved study: tree, site model and per-node data.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::system::{validate_system, SystemSpec};
use crate::tree::{validate_tree, NodeId, ScenarioTree};
use crate::validation::ValidationReport;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Horizon {
    /// Hourly steps per stage.
    pub steps_per_stage: usize,
    /// Stage whose nodes hold the market bids; deeper stages are operational.
    #[serde(default)]
    pub bidding_stage: usize,
    /// Output assumed before the first operational step, used by the ramping rows.
    #[serde(default)]
    pub initial_output: f64,
}

/// Market and demand realisation of one operational node, one entry per step.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct NodeData {
    pub price_da: Vec<f64>,
    pub price_id_buy: Vec<f64>,
    pub price_id_sell: Vec<f64>,
    pub price_cm_up: Vec<f64>,
    pub price_cm_dwn: Vec<f64>,
    pub price_act_up: Vec<f64>,
    pub price_act_dwn: Vec<f64>,
    pub sigma_id_buy: Vec<f64>,
    pub sigma_id_sell: Vec<f64>,
    pub sigma_up: Vec<f64>,
    pub sigma_dwn: Vec<f64>,
    pub price_co2: Vec<f64>,
    pub demand: BTreeMap<String, Vec<f64>>,
    pub flex: BTreeMap<String, Vec<f64>>,
    pub availability: BTreeMap<String, Vec<f64>>,
}

impl NodeData {
    /// A node with `steps` steps, all prices and indicators zero.
    pub fn zeros(steps: usize) -> Self {
        let z = vec![0.0; steps];
        NodeData {
            price_da: z.clone(),
            price_id_buy: z.clone(),
            price_id_sell: z.clone(),
            price_cm_up: z.clone(),
            price_cm_dwn: z.clone(),
            price_act_up: z.clone(),
            price_act_dwn: z.clone(),
            sigma_id_buy: z.clone(),
            sigma_id_sell: z.clone(),
            sigma_up: z.clone(),
            sigma_dwn: z.clone(),
            price_co2: z,
            ..Default::default()
        }
    }

    pub(crate) fn fields(&self) -> [(&'static str, &Vec<f64>); 12] {
        [
            ("price_da", &self.price_da),
            ("price_id_buy", &self.price_id_buy),
            ("price_id_sell", &self.price_id_sell),
            ("price_cm_up", &self.price_cm_up),
            ("price_cm_dwn", &self.price_cm_dwn),
            ("price_act_up", &self.price_act_up),
            ("price_act_dwn", &self.price_act_dwn),
            ("sigma_id_buy", &self.sigma_id_buy),
            ("sigma_id_sell", &self.sigma_id_sell),
            ("sigma_up", &self.sigma_up),
            ("sigma_dwn", &self.sigma_dwn),
            ("price_co2", &self.price_co2),
        ]
    }
}

/// Historical market volumes per step of a stage, MW.
#[derive(Clone, Debug, PartialEq)]
pub struct MarketHistory {
    pub id_volume: Vec<f64>,
    pub rm_volume: Vec<f64>,
}

impl MarketHistory {
    pub fn unlimited(steps: usize) -> Self {
        MarketHistory {
            id_volume: vec![f64::INFINITY; steps],
            rm_volume: vec![f64::INFINITY; steps],
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Study {
    pub name: String,
    /// Cost-scenario label, empty when none was applied.
    pub scenario: String,
    pub horizon: Horizon,
    pub tree: ScenarioTree,
    pub system: SystemSpec,
    /// Indexed by node id; present for operational nodes.
    pub data: Vec<Option<NodeData>>,
    pub history: MarketHistory,
}

impl Study {
    pub fn is_operational(&self, node: NodeId) -> bool {
        self.tree.node(node).stage > self.horizon.bidding_stage
    }

    pub fn operational_stages(&self) -> usize {
        self.tree
            .stage_count()
            .saturating_sub(self.horizon.bidding_stage + 1)
    }

    /// Planning horizon length in days along one root-to-leaf path.
    pub fn horizon_days(&self) -> f64 {
        (self.operational_stages() * self.horizon.steps_per_stage) as f64 / 24.0
    }

    pub fn node_data(&self, node: NodeId) -> Option<&NodeData> {
        self.data.get(node.0).and_then(Option::as_ref)
    }

    /// Scales every CO2 price by `factor`.
    pub fn scale_co2_price(&mut self, factor: f64) {
        for d in self.data.iter_mut().flatten() {
            for p in &mut d.price_co2 {
                *p *= factor;
            }
        }
    }

    /// Tree, system and data checks together.
    pub fn validate(&self) -> ValidationReport {
        let mut r = validate_tree(&self.tree);
        r.extend(validate_system(&self.system));
        r.extend(self.validate_data());
        r
    }

    /// Checks that every operational node carries complete data of the right length.
    pub fn validate_data(&self) -> ValidationReport {
        let mut r = ValidationReport::new();
        let t = self.horizon.steps_per_stage;
        if t == 0 {
            r.push("data.steps", "steps_per_stage must be positive");
        }
        if self.horizon.bidding_stage + 1 >= self.tree.stage_count() {
            r.push(
                "data.bidding_stage",
                format!(
                    "bidding stage {} leaves no operational stage in a {}-stage tree",
                    self.horizon.bidding_stage,
                    self.tree.stage_count()
                ),
            );
        }
        if self.tree.steps_per_stage() != t {
            r.push("data.steps", "tree and horizon disagree on steps per stage");
        }
        if let Some(stages) = &self.system.load_shift.balance_stages {
            let last = self.tree.stage_count().saturating_sub(1);
            if !stages.contains(&last) {
                r.push(
                    "data.shift_scope",
                    format!("load-shift balance stages {stages:?} omit the final stage {last}"),
                );
            }
            for &s in stages {
                if s <= self.horizon.bidding_stage || s > last {
                    r.push(
                        "data.shift_scope",
                        format!("load-shift balance stage {s} is not operational"),
                    );
                }
            }
        }
        if self.system.load_shift.window[1] >= t.max(1) {
            r.push(
                "data.shift_window",
                format!(
                    "load-shift window {:?} exceeds {t} steps",
                    self.system.load_shift.window
                ),
            );
        }
        for (name, v) in [
            ("hist_id_volume", &self.history.id_volume),
            ("hist_rm_volume", &self.history.rm_volume),
        ] {
            if v.len() != t {
                r.push(
                    "data.length",
                    format!("{name} has {} steps, expected {t}", v.len()),
                );
            }
            if v.iter().any(|x| x.is_nan() || *x < 0.0) {
                r.push("data.range", format!("{name} must be nonnegative"));
            }
        }
        for n in self.tree.nodes() {
            if !self.is_operational(n.id) {
                continue;
            }
            let Some(d) = self.node_data(n.id) else {
                r.push(
                    "data.missing_node",
                    format!("node {} ({}) has no data", n.id, n.data_key),
                );
                continue;
            };
            let key = &n.data_key;
            for (name, v) in d.fields() {
                if v.len() != t {
                    r.push(
                        "data.length",
                        format!("{key}: {name} has {} steps, expected {t}", v.len()),
                    );
                }
                if v.iter().any(|x| !x.is_finite()) {
                    r.push(
                        "data.range",
                        format!("{key}: {name} has a non-finite value"),
                    );
                }
            }
            for (name, v) in [
                ("sigma_id_buy", &d.sigma_id_buy),
                ("sigma_id_sell", &d.sigma_id_sell),
            ] {
                if v.iter().any(|x| !(0.0..=1.0).contains(x)) {
                    r.push("data.range", format!("{key}: {name} must lie in [0, 1]"));
                }
            }
            for (name, v) in [("sigma_up", &d.sigma_up), ("sigma_dwn", &d.sigma_dwn)] {
                if v.iter().any(|&x| x != 0.0 && x != 1.0) {
                    r.push("data.range", format!("{key}: {name} must be 0 or 1"));
                }
            }
            for c in &self.system.demand.carriers {
                check_series(&mut r, key, "demand", c, d.demand.get(c), t, false);
            }
            for c in &self.system.demand.flex_carriers {
                check_series(&mut r, key, "flex", c, d.flex.get(c), t, false);
            }
            for tech in &self.system.technologies {
                if let Some(a) = &tech.availability {
                    check_series(
                        &mut r,
                        key,
                        "availability",
                        a,
                        d.availability.get(a),
                        t,
                        true,
                    );
                }
            }
        }
        r
    }
}

fn check_series(
    r: &mut ValidationReport,
    key: &str,
    what: &str,
    name: &str,
    v: Option<&Vec<f64>>,
    t: usize,
    unit: bool,
) {
    match v {
        None => r.push(
            "data.missing_series",
            format!("{key}: no {what} series for {name}"),
        ),
        Some(v) => {
            if v.len() != t {
                r.push(
                    "data.length",
                    format!("{key}: {what} {name} has {} steps, expected {t}", v.len()),
                );
            }
            let hi = if unit { 1.0 } else { f64::INFINITY };
            if v.iter().any(|x| !(*x >= 0.0 && *x <= hi)) {
                r.push(
                    "data.range",
                    format!("{key}: {what} {name} has values outside [0, {hi}]"),
                );
            }
        }
    }
}
