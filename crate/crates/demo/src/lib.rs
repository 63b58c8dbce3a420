//! Browser front end over the synthetic toy site. The plain functions return
//! serialisable values and are what the tests exercise; the `#[wasm_bindgen]`
//! wrappers hand JSON strings to the page.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use flexplan::formulation::{build_model, VarKind};
use flexplan::lp::{duality_gap, solve, SolveOptions, Status};
use flexplan::synthetic::{study_of, toy};
use flexplan::system::crf;
use flexplan::tree::{build_tree, BranchSpec, NodeRecord};

#[derive(Debug, Serialize)]
pub struct Investment {
    pub asset: String,
    pub unit: &'static str,
    pub value: f64,
}

#[derive(Debug, Serialize)]
pub struct CostTerm {
    pub term: &'static str,
    pub value: f64,
}

#[derive(Debug, Serialize)]
pub struct ToyRun {
    pub objective: f64,
    pub emissions: f64,
    pub duality_gap: f64,
    pub iterations: usize,
    pub rows: usize,
    pub columns: usize,
    pub investments: Vec<Investment>,
    pub costs: Vec<CostTerm>,
}

/// Solves the toy site with CO2 prices and candidate capex scaled.
pub fn run_toy(co2_scale: f64, reserve: bool, capex_scale: f64) -> Result<ToyRun, String> {
    if !(co2_scale >= 0.0 && co2_scale.is_finite()) {
        return Err(format!(
            "CO2 price factor must be a finite non-negative number, got {co2_scale}"
        ));
    }
    if !(capex_scale > 0.0 && capex_scale.is_finite()) {
        return Err(format!("capex factor must be positive, got {capex_scale}"));
    }
    let (mut config, series) = toy();
    config.market.reserve = reserve;
    for t in &mut config.technologies {
        t.capex *= capex_scale;
    }
    for s in &mut config.storage {
        s.capex *= capex_scale;
    }
    let mut study = study_of(&config, &series).map_err(|e| e.to_string())?;
    study.scale_co2_price(co2_scale);
    let model = build_model(&study).map_err(|e| e.to_string())?;
    let sol = solve(&model.problem, &SolveOptions::default()).map_err(|e| e.to_string())?;
    if sol.status != Status::Optimal {
        return Err(format!("solver stopped: {}", sol.status));
    }
    let sys = &study.system;
    let mut investments = Vec::new();
    for j in model
        .cols_of(VarKind::VNewTech)
        .chain(model.cols_of(VarKind::VNewStorage))
    {
        let k = model.keys[j];
        let i = k.obj.unwrap_or_default();
        let (asset, unit) = if k.kind == VarKind::VNewStorage {
            (sys.storage[i].name.clone(), "MWh")
        } else {
            (sys.technologies[i].name.clone(), "MW")
        };
        let v = sol.primal[j];
        investments.push(Investment {
            asset,
            unit,
            value: if v.abs() < 1e-9 { 0.0 } else { v },
        });
    }
    let costs = model.decompose_costs(&sol).map_err(|e| e.to_string())?;
    Ok(ToyRun {
        objective: sol.objective,
        emissions: model.expected_emissions(&sol.primal),
        duality_gap: duality_gap(&model.problem, &sol).map_err(|e| e.to_string())?,
        iterations: sol.iterations,
        rows: model.problem.n_rows(),
        columns: model.problem.n_cols(),
        investments,
        costs: costs
            .terms()
            .iter()
            .map(|&(term, value)| CostTerm { term, value })
            .collect(),
    })
}

#[derive(Debug, Serialize)]
pub struct CrfPoint {
    pub lifetime: u32,
    pub factor: f64,
}

pub fn crf_table(rate: f64, max_lifetime: u32) -> Result<Vec<CrfPoint>, String> {
    if !(1..=100).contains(&max_lifetime) {
        return Err(format!(
            "lifetime range must be 1..=100 years, got {max_lifetime}"
        ));
    }
    (1..=max_lifetime)
        .map(|n| {
            crf(rate, n as f64)
                .map(|factor| CrfPoint {
                    lifetime: n,
                    factor,
                })
                .map_err(|e| e.to_string())
        })
        .collect()
}

/// Parses `"0.5,0.5; 0.6,0.4"` (one stage per `;`) and builds the tree.
pub fn tree_table(spec: &str, steps: usize) -> Result<Vec<NodeRecord>, String> {
    let mut stages = Vec::new();
    for (s, part) in spec
        .split(';')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .enumerate()
    {
        let probs = part
            .split(',')
            .map(|v| {
                v.trim()
                    .parse::<f64>()
                    .map_err(|_| format!("stage {}: '{}' is not a number", s + 1, v.trim()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        stages.push(probs);
    }
    let leaves: usize = stages.iter().map(Vec::len).product();
    if leaves > 512 {
        return Err(format!("{leaves} leaves is more than this page will draw"));
    }
    let tree = build_tree(&BranchSpec::new(stages), steps).map_err(|e| e.to_string())?;
    Ok(tree.nodes().to_vec())
}

fn json<T: Serialize>(r: Result<T, String>) -> Result<String, JsError> {
    let v = r.map_err(|e| JsError::new(&e))?;
    serde_json::to_string(&v).map_err(|e| JsError::new(&e.to_string()))
}

#[wasm_bindgen]
pub fn solve_toy(co2_scale: f64, reserve: bool, capex_scale: f64) -> Result<String, JsError> {
    json(run_toy(co2_scale, reserve, capex_scale))
}

#[wasm_bindgen]
pub fn crf_curve(rate: f64, max_lifetime: u32) -> Result<String, JsError> {
    json(crf_table(rate, max_lifetime))
}

#[wasm_bindgen]
pub fn scenario_tree(spec: &str, steps: usize) -> Result<String, JsError> {
    json(tree_table(spec, steps))
}
