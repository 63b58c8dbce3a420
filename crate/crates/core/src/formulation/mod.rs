//! Deterministic-equivalent linear program of a [`Study`].
//!
//! Column and row names follow `kind[node=..,t=..,obj=..,e=..,o=..]`, listing only
//! the indices that apply. Bid columns live at bidding-stage nodes and are indexed
//! by the step `h` counted over all operational stages below that node; every
//! operational descendant refers to the same bid columns.

mod build;

use std::collections::HashMap;
use std::fmt;

use crate::lp::{LpError, LpProblem, Solution, Status};
use crate::study::Study;
use crate::tree::NodeId;

pub use build::build_model;

#[derive(Debug, thiserror::Error)]
pub enum FormulationError {
    #[error("inconsistent study:\n{0}")]
    InconsistentSpec(String),
    #[error("no market or demand series for node '{0}'")]
    MissingPriceSeries(String),
    #[error("node {0} has no bidding-stage ancestor")]
    MissingAncestor(NodeId),
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error("solution status is {0}, not optimal")]
    NotOptimal(Status),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VarKind {
    VNewTech,
    VNewStorage,
    Activity,
    Out,
    In,
    Charge,
    Discharge,
    Soc,
    DaBuy,
    DaSell,
    IdBuy,
    IdSell,
    Up,
    Dwn,
    LsUp,
    LsDwn,
    LsAggUp,
    LsAggDwn,
    PeakMax,
}

impl VarKind {
    pub const ALL: [VarKind; 19] = [
        VarKind::VNewTech,
        VarKind::VNewStorage,
        VarKind::Activity,
        VarKind::Out,
        VarKind::In,
        VarKind::Charge,
        VarKind::Discharge,
        VarKind::Soc,
        VarKind::DaBuy,
        VarKind::DaSell,
        VarKind::IdBuy,
        VarKind::IdSell,
        VarKind::Up,
        VarKind::Dwn,
        VarKind::LsUp,
        VarKind::LsDwn,
        VarKind::LsAggUp,
        VarKind::LsAggDwn,
        VarKind::PeakMax,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            VarKind::VNewTech => "v_new_tech",
            VarKind::VNewStorage => "v_new_storage",
            VarKind::Activity => "y_activity",
            VarKind::Out => "y_out",
            VarKind::In => "y_in",
            VarKind::Charge => "q_charge",
            VarKind::Discharge => "q_discharge",
            VarKind::Soc => "q_soc",
            VarKind::DaBuy => "x_da_buy",
            VarKind::DaSell => "x_da_sell",
            VarKind::IdBuy => "x_id_buy",
            VarKind::IdSell => "x_id_sell",
            VarKind::Up => "x_up",
            VarKind::Dwn => "x_dwn",
            VarKind::LsUp => "ls_up",
            VarKind::LsDwn => "ls_dwn",
            VarKind::LsAggUp => "ls_agg_up",
            VarKind::LsAggDwn => "ls_agg_dwn",
            VarKind::PeakMax => "y_max_peak",
        }
    }

    /// Whether `obj` indexes storage assets rather than technologies.
    pub fn on_storage(self) -> bool {
        matches!(
            self,
            VarKind::VNewStorage | VarKind::Charge | VarKind::Discharge | VarKind::Soc
        )
    }

    pub fn is_bid(self) -> bool {
        matches!(
            self,
            VarKind::DaBuy
                | VarKind::DaSell
                | VarKind::IdBuy
                | VarKind::IdSell
                | VarKind::Up
                | VarKind::Dwn
        )
    }
}

impl fmt::Display for VarKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Index tuple of one column. `obj` is a technology or storage position, `carrier`
/// a carrier position and `mode` a mode position of the technology.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarKey {
    pub kind: VarKind,
    pub node: Option<NodeId>,
    pub step: Option<usize>,
    pub obj: Option<usize>,
    pub carrier: Option<usize>,
    pub mode: Option<usize>,
}

impl VarKey {
    pub fn new(kind: VarKind) -> Self {
        VarKey {
            kind,
            node: None,
            step: None,
            obj: None,
            carrier: None,
            mode: None,
        }
    }

    pub fn node(mut self, n: NodeId) -> Self {
        self.node = Some(n);
        self
    }

    pub fn step(mut self, t: usize) -> Self {
        self.step = Some(t);
        self
    }

    pub fn obj(mut self, i: usize) -> Self {
        self.obj = Some(i);
        self
    }

    pub fn carrier(mut self, e: usize) -> Self {
        self.carrier = Some(e);
        self
    }

    pub fn mode(mut self, o: usize) -> Self {
        self.mode = Some(o);
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CostTerm {
    Investment,
    GridTariff,
    Capacity,
    Activation,
    DayAhead,
    Intraday,
    Opex,
}

/// Objective split by cost term.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct CostDecomposition {
    pub investment: f64,
    pub grid_tariff: f64,
    /// Capacity-market revenue, entered negatively.
    pub capacity: f64,
    pub activation: f64,
    pub day_ahead: f64,
    pub intraday: f64,
    pub opex: f64,
}

impl CostDecomposition {
    pub fn total(&self) -> f64 {
        self.terms().iter().map(|t| t.1).sum()
    }

    pub fn terms(&self) -> [(&'static str, f64); 7] {
        [
            ("investment", self.investment),
            ("grid_tariff", self.grid_tariff),
            ("capacity_market", self.capacity),
            ("activation", self.activation),
            ("day_ahead", self.day_ahead),
            ("intraday", self.intraday),
            ("opex", self.opex),
        ]
    }

    fn slot(&mut self, term: CostTerm) -> &mut f64 {
        match term {
            CostTerm::Investment => &mut self.investment,
            CostTerm::GridTariff => &mut self.grid_tariff,
            CostTerm::Capacity => &mut self.capacity,
            CostTerm::Activation => &mut self.activation,
            CostTerm::DayAhead => &mut self.day_ahead,
            CostTerm::Intraday => &mut self.intraday,
            CostTerm::Opex => &mut self.opex,
        }
    }
}

/// An assembled LP together with the meaning of its columns.
#[derive(Clone, Debug)]
pub struct Model {
    pub problem: LpProblem,
    /// Key of every column, in column order.
    pub keys: Vec<VarKey>,
    lookup: HashMap<VarKey, usize>,
    cost_terms: Vec<(usize, CostTerm, f64)>,
    /// Expected tCO2 per unit of each emitting column.
    emissions: Vec<(usize, f64)>,
}

impl Model {
    pub fn col(&self, key: &VarKey) -> Option<usize> {
        self.lookup.get(key).copied()
    }

    pub fn cols_of(&self, kind: VarKind) -> impl Iterator<Item = usize> + '_ {
        self.keys
            .iter()
            .enumerate()
            .filter(move |(_, k)| k.kind == kind)
            .map(|(j, _)| j)
    }

    pub fn count(&self, kind: VarKind) -> usize {
        self.cols_of(kind).count()
    }

    /// Probability-weighted emissions of a primal point, tCO2.
    pub fn expected_emissions(&self, x: &[f64]) -> f64 {
        self.emissions.iter().map(|&(j, g)| g * x[j]).sum()
    }

    pub fn decompose_costs(
        &self,
        solution: &Solution,
    ) -> Result<CostDecomposition, FormulationError> {
        if solution.status != Status::Optimal {
            return Err(FormulationError::NotOptimal(solution.status));
        }
        Ok(self.decompose_point(&solution.primal))
    }

    /// Cost split of an arbitrary primal point.
    pub fn decompose_point(&self, x: &[f64]) -> CostDecomposition {
        let mut d = CostDecomposition::default();
        for &(j, term, c) in &self.cost_terms {
            *d.slot(term) += c * x[j];
        }
        d
    }
}

/// Canonical name of a column of `study`.
pub fn column_name(study: &Study, key: &VarKey) -> String {
    let sys = &study.system;
    let obj = key.obj.map(|i| {
        if key.kind.on_storage() {
            sys.storage[i].name.clone()
        } else {
            sys.technologies[i].name.clone()
        }
    });
    let carrier = key.carrier.map(|e| sys.carriers[e].name.clone());
    let mode = match (key.obj, key.mode) {
        (Some(i), Some(o)) => Some(sys.technologies[i].modes[o].name.clone()),
        _ => None,
    };
    index_name(
        key.kind.as_str(),
        key.node,
        key.step,
        obj.as_deref(),
        carrier.as_deref(),
        mode.as_deref(),
    )
}

/// `kind[node=..,t=..,obj=..,e=..,o=..]` with absent indices left out.
pub fn index_name(
    kind: &str,
    node: Option<NodeId>,
    step: Option<usize>,
    obj: Option<&str>,
    carrier: Option<&str>,
    mode: Option<&str>,
) -> String {
    let mut parts = Vec::new();
    if let Some(n) = node {
        parts.push(format!("node={n}"));
    }
    if let Some(t) = step {
        parts.push(format!("t={t}"));
    }
    if let Some(o) = obj {
        parts.push(format!("obj={o}"));
    }
    if let Some(e) = carrier {
        parts.push(format!("e={e}"));
    }
    if let Some(m) = mode {
        parts.push(format!("o={m}"));
    }
    if parts.is_empty() {
        kind.to_string()
    } else {
        format!("{kind}[{}]", parts.join(","))
    }
}
