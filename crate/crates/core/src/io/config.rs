//! Study configuration file (TOML) and assembly of a [`Study`].

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::series::SeriesTable;
use super::IoError;
use crate::cluster::cluster_representatives;
use crate::study::{Horizon, MarketHistory, NodeData, Study};
use crate::system::{
    Carrier, DemandSpec, InvestmentPolicy, LoadShiftPolicy, MarketSettings, Storage, SystemSpec,
    Technology,
};
use crate::tree::{build_tree, BranchSpec, NodeId, NodeRecord, ScenarioTree};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StudyConfig {
    pub name: String,
    /// Series file, relative to the config file.
    pub series: String,
    /// Data key holding the historical market volumes.
    #[serde(default = "default_history_key")]
    pub history_key: String,
    pub horizon: Horizon,
    pub tree: TreeConfig,
    pub carriers: Vec<Carrier>,
    #[serde(default)]
    pub technologies: Vec<Technology>,
    #[serde(default)]
    pub storage: Vec<Storage>,
    pub demand: DemandSpec,
    #[serde(default)]
    pub load_shift: LoadShiftPolicy,
    #[serde(default)]
    pub market: MarketSettings,
    pub policy: InvestmentPolicy,
    /// Named cost sets selectable at run time.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub scenarios: BTreeMap<String, CostScenario>,
}

fn default_history_key() -> String {
    "history".into()
}

/// Exactly one of the fields must be set.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TreeConfig {
    /// Uniform branch counts per stage.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub branches: Option<Vec<usize>>,
    /// Conditional branch probabilities per stage.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub conditionals: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nodes: Option<Vec<NodeConfig>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cluster: Option<ClusterConfig>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeConfig {
    pub id: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parent: Option<usize>,
    pub probability: f64,
    pub key: String,
}

/// Stage 1 holds `k` representative days chosen among `candidates`; each may
/// branch further into `op_branches`, whose overlay keys are applied on top of
/// the day's series.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClusterConfig {
    pub k: usize,
    #[serde(default)]
    pub seed: u64,
    pub candidates: Vec<String>,
    pub features: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub op_branches: Vec<BranchOverlay>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BranchOverlay {
    pub probability: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub overlay: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CostScenario {
    /// Investment cost per asset name.
    #[serde(default)]
    pub capex: BTreeMap<String, f64>,
    /// Multiplier on every CO2 price.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub co2_price_scale: Option<f64>,
}

/// Run-time adjustments applied while assembling a study.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct LoadOptions {
    pub scenario: Option<String>,
    /// Overrides the clustering seed.
    pub seed: Option<u64>,
    /// Forces reserve participation on or off.
    pub reserve: Option<bool>,
}

impl StudyConfig {
    pub fn parse(text: &str, origin: &str) -> Result<StudyConfig, IoError> {
        toml::from_str(text).map_err(|e| {
            let line = e
                .span()
                .map(|s| text[..s.start.min(text.len())].matches('\n').count() + 1);
            IoError::Schema {
                path: origin.into(),
                line,
                message: e.message().to_string(),
            }
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration serialises")
    }

    /// Applies the cost scenario and flags of `opts`.
    pub fn adjusted(&self, opts: &LoadOptions) -> Result<StudyConfig, IoError> {
        let mut cfg = self.clone();
        if let Some(label) = &opts.scenario {
            let sc = cfg
                .scenarios
                .get(label)
                .cloned()
                .ok_or_else(|| IoError::Range(format!("unknown cost scenario '{label}'")))?;
            for (asset, capex) in &sc.capex {
                if let Some(t) = cfg.technologies.iter_mut().find(|t| &t.name == asset) {
                    t.capex = *capex;
                } else if let Some(s) = cfg.storage.iter_mut().find(|s| &s.name == asset) {
                    s.capex = *capex;
                } else {
                    return Err(IoError::Range(format!(
                        "scenario '{label}' sets capex of unknown asset '{asset}'"
                    )));
                }
            }
        }
        if let (Some(seed), Some(c)) = (opts.seed, cfg.tree.cluster.as_mut()) {
            c.seed = seed;
        }
        if let Some(r) = opts.reserve {
            cfg.market.reserve = r;
        }
        Ok(cfg)
    }
}

/// SHA-256 of the canonical configuration and series content, hex encoded.
pub fn config_hash(config: &StudyConfig, series: &SeriesTable) -> String {
    let mut h = Sha256::new();
    h.update(config.to_toml().as_bytes());
    h.update(b"\0");
    h.update(series.to_csv().as_bytes());
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

fn build_config_tree(cfg: &StudyConfig, series: &SeriesTable) -> Result<ScenarioTree, IoError> {
    let t = cfg.horizon.steps_per_stage;
    let tc = &cfg.tree;
    let set = [
        tc.branches.is_some(),
        tc.conditionals.is_some(),
        tc.nodes.is_some(),
        tc.cluster.is_some(),
    ];
    if set.iter().filter(|&&b| b).count() != 1 {
        return Err(IoError::Schema {
            path: "tree".into(),
            line: None,
            message: "exactly one of branches, conditionals, nodes or cluster must be given".into(),
        });
    }
    if let Some(b) = &tc.branches {
        return Ok(build_tree(&BranchSpec::uniform(b), t)?);
    }
    if let Some(c) = &tc.conditionals {
        return Ok(build_tree(&BranchSpec::new(c.clone()), t)?);
    }
    if let Some(nodes) = &tc.nodes {
        let mut recs: Vec<Option<NodeRecord>> = vec![None; nodes.len()];
        for n in nodes {
            if n.id >= nodes.len() || recs[n.id].is_some() {
                return Err(IoError::Range(format!(
                    "tree.nodes: node ids must be 0..{} without repeats",
                    nodes.len()
                )));
            }
            recs[n.id] = Some(NodeRecord {
                id: NodeId(n.id),
                parent: n.parent.map(NodeId),
                stage: 0,
                probability: n.probability,
                data_key: n.key.clone(),
            });
        }
        let mut recs: Vec<NodeRecord> = recs.into_iter().map(Option::unwrap).collect();
        for i in 0..recs.len() {
            let mut depth = 0;
            let mut cur = recs[i].parent;
            while let Some(p) = cur {
                depth += 1;
                if depth > recs.len() || p.0 >= recs.len() {
                    return Err(IoError::Range(format!(
                        "tree.nodes: node {i} has a cyclic or dangling parent chain"
                    )));
                }
                cur = recs[p.0].parent;
            }
            recs[i].stage = depth;
        }
        return Ok(ScenarioTree::from_nodes(recs, t)?);
    }
    let c = tc.cluster.as_ref().unwrap();
    let mut features = Vec::with_capacity(c.candidates.len());
    for key in &c.candidates {
        let mut f: Vec<f64> = Vec::new();
        for col in &c.features {
            let v = series.column(key, col).ok_or_else(|| {
                IoError::MissingSeries(format!("{key}: column {col} (clustering feature)"))
            })?;
            f.extend(v);
        }
        features.push(f);
    }
    // Each feature column is scaled by its largest magnitude so prices and demands weigh alike.
    let len = features.first().map_or(0, Vec::len);
    let per = if c.features.is_empty() {
        0
    } else {
        len / c.features.len()
    };
    for j in 0..c.features.len() {
        let range = j * per..(j + 1) * per;
        let m = features
            .iter()
            .flat_map(|f| f[range.clone()].iter())
            .fold(0.0f64, |a, x| a.max(x.abs()));
        if m > 0.0 {
            for f in &mut features {
                for x in &mut f[range.clone()] {
                    *x /= m;
                }
            }
        }
    }
    let cl = cluster_representatives(&features, c.k, c.seed)?;
    let mut recs = vec![NodeRecord {
        id: NodeId(0),
        parent: None,
        stage: 0,
        probability: 1.0,
        data_key: "root".into(),
    }];
    let reps: Vec<NodeId> = cl
        .medoids
        .iter()
        .zip(&cl.weights)
        .map(|(&m, &w)| {
            let id = NodeId(recs.len());
            recs.push(NodeRecord {
                id,
                parent: Some(NodeId(0)),
                stage: 1,
                probability: w,
                data_key: c.candidates[m].clone(),
            });
            id
        })
        .collect();
    for r in reps {
        let base = recs[r.0].clone();
        for b in &c.op_branches {
            let id = NodeId(recs.len());
            let key = match &b.overlay {
                Some(o) => format!("{}+{o}", base.data_key),
                None => base.data_key.clone(),
            };
            recs.push(NodeRecord {
                id,
                parent: Some(r),
                stage: 2,
                probability: base.probability * b.probability,
                data_key: key,
            });
        }
    }
    Ok(ScenarioTree::from_nodes(recs, t)?)
}

/// Resolves the configuration and series into a study.
pub fn assemble(
    config: &StudyConfig,
    series: &SeriesTable,
    opts: &LoadOptions,
) -> Result<Study, IoError> {
    let cfg = config.adjusted(opts)?;
    let tree = build_config_tree(&cfg, series)?;
    let system = SystemSpec {
        carriers: cfg.carriers.clone(),
        technologies: cfg.technologies.clone(),
        storage: cfg.storage.clone(),
        demand: cfg.demand.clone(),
        load_shift: cfg.load_shift.clone(),
        market: cfg.market.clone(),
        policy: cfg.policy.clone(),
    };
    let mut data = vec![None; tree.len()];
    for n in tree.nodes() {
        if n.stage <= cfg.horizon.bidding_stage {
            continue;
        }
        let cols = series.resolve(&n.data_key)?;
        let take = |name: &str| -> Result<Vec<f64>, IoError> {
            cols.get(name)
                .cloned()
                .ok_or_else(|| IoError::MissingSeries(format!("{}: column {name}", n.data_key)))
        };
        let mut d = NodeData {
            price_da: take("price_da")?,
            price_id_buy: take("price_id_buy")?,
            price_id_sell: take("price_id_sell")?,
            price_cm_up: take("price_cm_up")?,
            price_cm_dwn: take("price_cm_dwn")?,
            price_act_up: take("price_act_up")?,
            price_act_dwn: take("price_act_dwn")?,
            sigma_id_buy: take("sigma_id_buy")?,
            sigma_id_sell: take("sigma_id_sell")?,
            sigma_up: take("sigma_up")?,
            sigma_dwn: take("sigma_dwn")?,
            price_co2: take("price_co2")?,
            ..Default::default()
        };
        for c in &cfg.demand.carriers {
            d.demand.insert(c.clone(), take(&format!("demand_{c}"))?);
        }
        for c in &cfg.demand.flex_carriers {
            d.flex.insert(c.clone(), take(&format!("flex_{c}"))?);
        }
        for t in &cfg.technologies {
            if let Some(a) = &t.availability {
                d.availability
                    .insert(a.clone(), take(&format!("avail_{a}"))?);
            }
        }
        data[n.id.0] = Some(d);
    }
    let t = cfg.horizon.steps_per_stage;
    let history = match series.keys.get(&cfg.history_key) {
        None => MarketHistory::unlimited(t),
        Some(cols) => {
            let get = |c: &str| {
                cols.get(c).cloned().ok_or_else(|| {
                    IoError::MissingSeries(format!("{}: column {c}", cfg.history_key))
                })
            };
            MarketHistory {
                id_volume: get("hist_id_volume")?,
                rm_volume: get("hist_rm_volume")?,
            }
        }
    };
    let mut study = Study {
        name: cfg.name.clone(),
        scenario: opts.scenario.clone().unwrap_or_default(),
        horizon: cfg.horizon.clone(),
        tree,
        system,
        data,
        history,
    };
    if let Some(label) = &opts.scenario {
        if let Some(f) = cfg.scenarios[label].co2_price_scale {
            study.scale_co2_price(f);
        }
    }
    let ranges: Vec<String> = crate::system::validate_system(&study.system)
        .issues
        .into_iter()
        .filter(|i| i.code == "system.range")
        .map(|i| i.message)
        .collect();
    if !ranges.is_empty() {
        return Err(IoError::Range(ranges.join("; ")));
    }
    Ok(study)
}
