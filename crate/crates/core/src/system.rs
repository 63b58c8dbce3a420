//! Physical and market data model of the industrial site.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::validation::ValidationReport;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum SystemError {
    #[error("lifetime must be at least one year, got {0}")]
    NonPositiveLifetime(f64),
    #[error("discount rate must be positive, got {0}")]
    NonPositiveRate(f64),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Carrier {
    pub name: String,
    #[serde(default)]
    pub electricity: bool,
    #[serde(default)]
    pub heat: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Mode {
    pub name: String,
    /// Output per unit activity, by carrier.
    #[serde(default)]
    pub outputs: BTreeMap<String, f64>,
    /// Input per unit activity, by carrier.
    #[serde(default)]
    pub inputs: BTreeMap<String, f64>,
    /// tCO2 per unit activity.
    #[serde(default)]
    pub emission: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Technology {
    pub name: String,
    pub modes: Vec<Mode>,
    /// Installed output capacity, MW.
    #[serde(default)]
    pub v_init: f64,
    /// Currency per MW.
    #[serde(default)]
    pub capex: f64,
    #[serde(default = "default_lifetime")]
    pub lifetime: f64,
    /// Whether new capacity may be built.
    #[serde(default)]
    pub candidate: bool,
    /// Upper limit on new capacity, MW.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_new: Option<f64>,
    #[serde(default = "one")]
    pub ramp_beta: f64,
    /// Availability column suffix; `None` means always available.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub availability: Option<String>,
    #[serde(default)]
    pub grid: bool,
    #[serde(default)]
    pub heat_pump: bool,
    /// Currency per MWh of activity.
    #[serde(default)]
    pub opex_var: f64,
}

fn default_lifetime() -> f64 {
    20.0
}

impl Technology {
    pub fn outputs_carrier(&self, carrier: &str) -> bool {
        self.modes
            .iter()
            .any(|m| m.outputs.get(carrier).is_some_and(|&v| v > 0.0))
    }

    pub fn consumes_carrier(&self, carrier: &str) -> bool {
        self.modes
            .iter()
            .any(|m| m.inputs.get(carrier).is_some_and(|&v| v > 0.0))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Storage {
    pub name: String,
    pub carrier: String,
    /// Conventional charging efficiency in (0, 1]; the balance uses its inverse.
    #[serde(default = "one")]
    pub eta_charge: f64,
    #[serde(default = "one")]
    pub eta_discharge: f64,
    /// Self-discharge per step.
    #[serde(default)]
    pub loss_eps: f64,
    /// Installed power limit, MW.
    #[serde(default)]
    pub p_max: f64,
    /// MW of power per MWh of new energy capacity.
    pub theta: f64,
    /// Installed energy capacity, MWh.
    #[serde(default)]
    pub e_max_init: f64,
    /// Currency per MWh.
    #[serde(default)]
    pub capex: f64,
    #[serde(default = "default_lifetime")]
    pub lifetime: f64,
    #[serde(default)]
    pub candidate: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_new: Option<f64>,
    #[serde(default)]
    pub soc_init_frac: f64,
    /// Currency per MWh of throughput.
    #[serde(default)]
    pub degradation_cost: f64,
}

impl Storage {
    pub fn loss_factor(&self) -> f64 {
        1.0 / self.eta_charge
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DemandSpec {
    /// Carriers with a reference demand series.
    pub carriers: Vec<String>,
    /// Heat carriers with a flexible-demand (excess heat) series.
    #[serde(default)]
    pub flex_carriers: Vec<String>,
    #[serde(default)]
    pub mu_surplus: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LoadShiftPolicy {
    #[serde(default)]
    pub up_frac: f64,
    #[serde(default)]
    pub down_frac: f64,
    /// First and last step (zero-based, inclusive) in which shifting is allowed.
    pub window: [usize; 2],
    /// Carriers whose demand may be shifted; empty means every demand carrier.
    #[serde(default)]
    pub carriers: Vec<String>,
    /// Stages at whose nodes the accumulated shifts must balance; `None` means
    /// every operational stage.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub balance_stages: Option<Vec<usize>>,
    #[serde(default)]
    pub inconvenience_cost: f64,
}

impl Default for LoadShiftPolicy {
    fn default() -> Self {
        LoadShiftPolicy {
            up_frac: 0.0,
            down_frac: 0.0,
            window: [0, 0],
            carriers: Vec::new(),
            balance_stages: None,
            inconvenience_cost: 0.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MarketSettings {
    #[serde(default = "yes")]
    pub day_ahead: bool,
    #[serde(default = "yes")]
    pub intraday: bool,
    #[serde(default = "yes")]
    pub reserve: bool,
    /// Keep reserve columns (fixed at zero) when reserve participation is off.
    #[serde(default)]
    pub keep_disabled_reserve_columns: bool,
    /// Largest indivisible reserve bid, MW.
    #[serde(default = "default_x_max")]
    pub x_max: f64,
    #[serde(default = "one")]
    pub id_liquidity_frac: f64,
    #[serde(default = "one")]
    pub rm_volume_frac: f64,
    /// Grid tariff power component, currency per MW of expected peak.
    #[serde(default)]
    pub grid_tariff_power: f64,
}

fn yes() -> bool {
    true
}

fn default_x_max() -> f64 {
    10.0
}

impl Default for MarketSettings {
    fn default() -> Self {
        MarketSettings {
            day_ahead: true,
            intraday: true,
            reserve: true,
            keep_disabled_reserve_columns: false,
            x_max: default_x_max(),
            id_liquidity_frac: 1.0,
            rm_volume_frac: 1.0,
            grid_tariff_power: 0.0,
        }
    }
}

impl MarketSettings {
    pub fn trading(&self) -> bool {
        self.day_ahead || self.intraday || self.reserve
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EmissionScope {
    /// Each node's own steps.
    #[default]
    Node,
    /// All operational steps from the root to the node.
    Path,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InvestmentPolicy {
    #[serde(default = "unlimited")]
    pub budget: f64,
    pub discount_rate: f64,
    /// Export limit, MW.
    #[serde(default = "unlimited")]
    pub export_cap: f64,
    /// tCO2 per node (or per path).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub emission_cap: Option<f64>,
    #[serde(default)]
    pub emission_scope: EmissionScope,
}

fn unlimited() -> f64 {
    f64::INFINITY
}

#[derive(Clone, Debug, PartialEq)]
pub struct SystemSpec {
    pub carriers: Vec<Carrier>,
    pub technologies: Vec<Technology>,
    pub storage: Vec<Storage>,
    pub demand: DemandSpec,
    pub load_shift: LoadShiftPolicy,
    pub market: MarketSettings,
    pub policy: InvestmentPolicy,
}

impl SystemSpec {
    pub fn electricity(&self) -> Option<&Carrier> {
        self.carriers.iter().find(|c| c.electricity)
    }

    pub fn grid(&self) -> Option<(usize, &Technology)> {
        self.technologies.iter().enumerate().find(|(_, t)| t.grid)
    }

    pub fn carrier(&self, name: &str) -> Option<&Carrier> {
        self.carriers.iter().find(|c| c.name == name)
    }

    pub fn shift_carriers(&self) -> Vec<&str> {
        if self.load_shift.carriers.is_empty() {
            self.demand.carriers.iter().map(String::as_str).collect()
        } else {
            self.load_shift
                .carriers
                .iter()
                .map(String::as_str)
                .collect()
        }
    }
}

/// Capital recovery factor.
pub fn crf(rate: f64, lifetime: f64) -> Result<f64, SystemError> {
    if !(lifetime >= 1.0) {
        return Err(SystemError::NonPositiveLifetime(lifetime));
    }
    if !(rate > 0.0) {
        return Err(SystemError::NonPositiveRate(rate));
    }
    let growth = lifetime * rate.ln_1p();
    Ok(rate * growth.exp() / growth.exp_m1())
}

/// Equivalent annual cost of `capex`.
pub fn annualized_cost(capex: f64, rate: f64, lifetime: f64) -> Result<f64, SystemError> {
    Ok(capex * crf(rate, lifetime)?)
}

/// Largest upward and downward shift of reference demand `d_ref` at `step`.
pub fn shift_bounds(policy: &LoadShiftPolicy, d_ref: f64, step: usize) -> (f64, f64) {
    let [lo, hi] = policy.window;
    if step < lo || step > hi || d_ref <= 0.0 {
        return (0.0, 0.0);
    }
    (policy.up_frac * d_ref, policy.down_frac * d_ref)
}

fn in_range(
    report: &mut ValidationReport,
    code: &'static str,
    what: &str,
    v: f64,
    lo: f64,
    hi: f64,
) {
    if !(v >= lo && v <= hi) {
        report.push(code, format!("{what} = {v} is outside [{lo}, {hi}]"));
    }
}

/// Checks ranges and connectivity of the site model.
pub fn validate_system(spec: &SystemSpec) -> ValidationReport {
    let mut r = ValidationReport::new();
    let mut names = BTreeSet::new();
    for c in &spec.carriers {
        if !names.insert(c.name.as_str()) {
            r.push(
                "system.duplicate_carrier",
                format!("carrier {} is declared twice", c.name),
            );
        }
    }
    let n_el = spec.carriers.iter().filter(|c| c.electricity).count();
    if n_el != 1 {
        r.push(
            "system.electricity",
            format!("{n_el} carriers are flagged electricity, expected exactly one"),
        );
    }
    let el = spec.electricity().map(|c| c.name.as_str());
    let known = |name: &str| names.contains(name);

    let mut tech_names = BTreeSet::new();
    for t in &spec.technologies {
        if !tech_names.insert(t.name.as_str()) {
            r.push(
                "system.duplicate_asset",
                format!("technology {} is declared twice", t.name),
            );
        }
        if t.modes.is_empty() {
            r.push(
                "system.no_modes",
                format!("technology {} has no operating modes", t.name),
            );
        }
        let mut any_output = false;
        for m in &t.modes {
            for (c, &v) in m.outputs.iter().chain(&m.inputs) {
                if !known(c) {
                    r.push(
                        "system.unknown_carrier",
                        format!(
                            "technology {} mode {} uses unknown carrier {c}",
                            t.name, m.name
                        ),
                    );
                }
                if !(v >= 0.0) || !v.is_finite() {
                    r.push(
                        "system.efficiency",
                        format!(
                            "technology {} mode {} has efficiency {v} for {c}",
                            t.name, m.name
                        ),
                    );
                }
            }
            any_output |= m.outputs.values().any(|&v| v > 0.0);
            if !(m.emission >= 0.0) {
                r.push(
                    "system.emission",
                    format!(
                        "technology {} mode {} has emission factor {}",
                        t.name, m.name, m.emission
                    ),
                );
            }
        }
        if !any_output {
            r.push(
                "system.no_output",
                format!("technology {} has no positive output efficiency", t.name),
            );
        }
        if !(t.ramp_beta > 0.0 && t.ramp_beta <= 1.0) {
            r.push(
                "system.ramp",
                format!(
                    "technology {} has ramp factor {} outside (0, 1]",
                    t.name, t.ramp_beta
                ),
            );
        }
        if !(t.v_init >= 0.0) {
            r.push(
                "system.capacity",
                format!("technology {} has installed capacity {}", t.name, t.v_init),
            );
        }
        if !(t.capex >= 0.0) || t.max_new.is_some_and(|m| !(m >= 0.0)) {
            r.push(
                "system.investment",
                format!("technology {} has negative investment data", t.name),
            );
        }
        if t.candidate && !(t.lifetime >= 1.0) {
            r.push(
                "system.lifetime",
                format!("technology {} has lifetime {}", t.name, t.lifetime),
            );
        }
        if t.heat_pump && (el.is_none() || !el.is_some_and(|e| t.consumes_carrier(e))) {
            r.push(
                "system.heat_pump_input",
                format!("heat pump {} has no electricity input", t.name),
            );
        }
    }
    let grids: Vec<_> = spec.technologies.iter().filter(|t| t.grid).collect();
    if grids.len() > 1 {
        r.push("system.grid", "more than one grid technology".to_string());
    }
    if spec.market.trading() && grids.is_empty() {
        r.push(
            "system.grid",
            "market trading is enabled but no grid technology is declared".to_string(),
        );
    }
    if let (Some(g), Some(e)) = (grids.first(), el) {
        if !g.outputs_carrier(e) {
            r.push(
                "system.grid",
                format!("grid technology {} has no mode importing {e}", g.name),
            );
        }
        for m in &g.modes {
            if m.outputs.keys().chain(m.inputs.keys()).any(|c| c != e) {
                r.push(
                    "system.grid",
                    format!(
                        "grid technology {} mode {} trades a carrier other than {e}",
                        g.name, m.name
                    ),
                );
            }
        }
    }

    for s in &spec.storage {
        if !tech_names.insert(s.name.as_str()) {
            r.push(
                "system.duplicate_asset",
                format!("storage {} clashes with another asset name", s.name),
            );
        }
        if !known(&s.carrier) {
            r.push(
                "system.unknown_carrier",
                format!("storage {} uses unknown carrier {}", s.name, s.carrier),
            );
        }
        let what = |f: &str| format!("storage {} {f}", s.name);
        if !(s.eta_charge > 0.0 && s.eta_charge <= 1.0) {
            r.push(
                "system.range",
                format!(
                    "{} = {} is outside (0, 1]",
                    what("eta_charge"),
                    s.eta_charge
                ),
            );
        }
        if !(s.eta_discharge > 0.0 && s.eta_discharge <= 1.0) {
            r.push(
                "system.range",
                format!(
                    "{} = {} is outside (0, 1]",
                    what("eta_discharge"),
                    s.eta_discharge
                ),
            );
        }
        if !(s.loss_eps >= 0.0 && s.loss_eps < 1.0) {
            r.push(
                "system.range",
                format!("{} = {} is outside [0, 1)", what("loss_eps"), s.loss_eps),
            );
        }
        in_range(
            &mut r,
            "system.range",
            &what("soc_init_frac"),
            s.soc_init_frac,
            0.0,
            1.0,
        );
        if !(s.theta > 0.0) {
            r.push(
                "system.range",
                format!("{} = {} must be positive", what("theta"), s.theta),
            );
        }
        for (f, v) in [
            ("p_max", s.p_max),
            ("e_max_init", s.e_max_init),
            ("capex", s.capex),
            ("degradation_cost", s.degradation_cost),
        ] {
            if !(v >= 0.0) {
                r.push(
                    "system.range",
                    format!("{} = {v} must be nonnegative", what(f)),
                );
            }
        }
        if s.candidate && !(s.lifetime >= 1.0) {
            r.push(
                "system.lifetime",
                format!("storage {} has lifetime {}", s.name, s.lifetime),
            );
        }
    }

    for c in &spec.demand.carriers {
        if !known(c) {
            r.push(
                "system.unknown_carrier",
                format!("demand refers to unknown carrier {c}"),
            );
            continue;
        }
        // Storage only moves energy in time; it cannot be the sole source.
        if !spec.technologies.iter().any(|t| t.outputs_carrier(c)) {
            r.push(
                "system.unreachable_demand",
                format!("no technology produces {c}, so its demand cannot be served"),
            );
        }
    }
    for c in &spec.demand.flex_carriers {
        if !spec.carrier(c).is_some_and(|k| k.heat) {
            r.push(
                "system.flex_carrier",
                format!("flexible demand carrier {c} is not a declared heat carrier"),
            );
        }
    }
    in_range(
        &mut r,
        "system.range",
        "demand.mu_surplus",
        spec.demand.mu_surplus,
        0.0,
        1.0,
    );

    for c in &spec.carriers {
        let used = spec.demand.carriers.contains(&c.name)
            || spec
                .technologies
                .iter()
                .any(|t| t.outputs_carrier(&c.name) || t.consumes_carrier(&c.name))
            || spec.storage.iter().any(|s| s.carrier == c.name);
        if !used {
            r.push(
                "system.dangling_carrier",
                format!("carrier {} is not connected to any demand or asset", c.name),
            );
        }
    }

    let ls = &spec.load_shift;
    in_range(
        &mut r,
        "system.range",
        "load_shift.up_frac",
        ls.up_frac,
        0.0,
        1.0,
    );
    in_range(
        &mut r,
        "system.range",
        "load_shift.down_frac",
        ls.down_frac,
        0.0,
        1.0,
    );
    if ls.window[0] > ls.window[1] {
        r.push(
            "system.range",
            format!("load_shift.window {:?} is reversed", ls.window),
        );
    }
    if !(ls.inconvenience_cost >= 0.0) {
        r.push(
            "system.range",
            format!(
                "load_shift.inconvenience_cost = {} must be nonnegative",
                ls.inconvenience_cost
            ),
        );
    }
    for c in &ls.carriers {
        if !spec.demand.carriers.contains(c) {
            r.push(
                "system.shift_carrier",
                format!("load shifting names {c}, which has no demand"),
            );
        }
    }

    let m = &spec.market;
    if !(m.x_max > 0.0) {
        r.push(
            "system.range",
            format!("market.x_max = {} must be positive", m.x_max),
        );
    }
    in_range(
        &mut r,
        "system.range",
        "market.id_liquidity_frac",
        m.id_liquidity_frac,
        0.0,
        1.0,
    );
    in_range(
        &mut r,
        "system.range",
        "market.rm_volume_frac",
        m.rm_volume_frac,
        0.0,
        1.0,
    );
    if !(m.grid_tariff_power >= 0.0) {
        r.push(
            "system.range",
            format!(
                "market.grid_tariff_power = {} must be nonnegative",
                m.grid_tariff_power
            ),
        );
    }

    let p = &spec.policy;
    if !(p.budget >= 0.0) {
        r.push(
            "system.range",
            format!("policy.budget = {} must be nonnegative", p.budget),
        );
    }
    if !(p.discount_rate > 0.0) {
        r.push(
            "system.range",
            format!(
                "policy.discount_rate = {} must be positive",
                p.discount_rate
            ),
        );
    }
    if !(p.export_cap >= 0.0) {
        r.push(
            "system.range",
            format!("policy.export_cap = {} must be nonnegative", p.export_cap),
        );
    }
    if p.emission_cap.is_some_and(|c| !(c >= 0.0)) {
        r.push(
            "system.range",
            "policy.emission_cap must be nonnegative".to_string(),
        );
    }
    r
}
