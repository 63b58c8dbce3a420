//! Result tables of a solved study.
//!
//! * `investment.csv`: `asset,kind,new_capacity,unit,capex,annualized_cost,horizon_cost`
//! * `costs.csv`: `term,value`, ending with `total`
//! * `schedules.csv`: `node,data_key,stage,probability,step,variable,object,carrier,mode,value`
//! * `metadata.csv`: `key,value`; only the `timestamp` entry differs between identical runs

use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use super::IoError;
use crate::formulation::{CostDecomposition, Model, VarKind};
use crate::lp::Solution;
use crate::study::Study;
use crate::system::annualized_cost;

pub struct RunRecord<'a> {
    pub study: &'a Study,
    pub model: &'a Model,
    pub solution: &'a Solution,
    pub costs: CostDecomposition,
    pub config_hash: &'a str,
    pub duality_gap: f64,
    pub max_residual: f64,
}

fn num(x: f64) -> String {
    if x == 0.0 {
        "0".into()
    } else {
        format!("{x}")
    }
}

fn write_table(path: &Path, header: &[&str], rows: Vec<Vec<String>>) -> Result<(), IoError> {
    let err = |e: csv::Error| IoError::Io {
        path: path.display().to_string(),
        source: std::io::Error::other(e),
    };
    let mut w = csv::Writer::from_path(path).map_err(err)?;
    w.write_record(header).map_err(err)?;
    for r in rows {
        w.write_record(&r).map_err(err)?;
    }
    w.flush().map_err(|source| IoError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn write_results(run: &RunRecord, out_dir: &Path) -> Result<(), IoError> {
    std::fs::create_dir_all(out_dir).map_err(|source| IoError::Io {
        path: out_dir.display().to_string(),
        source,
    })?;
    let s = run.study;
    let sys = &s.system;
    let x = &run.solution.primal;
    let scale = s.horizon_days() / 365.0;
    let rate = sys.policy.discount_rate;

    let mut inv = Vec::new();
    for j in run
        .model
        .cols_of(VarKind::VNewTech)
        .chain(run.model.cols_of(VarKind::VNewStorage))
    {
        let key = run.model.keys[j];
        let i = key.obj.unwrap();
        let (name, kind, unit, capex, life) = if key.kind.on_storage() {
            let st = &sys.storage[i];
            (&st.name, "storage", "MWh", st.capex, st.lifetime)
        } else {
            let t = &sys.technologies[i];
            (&t.name, "technology", "MW", t.capex, t.lifetime)
        };
        let annual = annualized_cost(capex, rate, life).unwrap_or(f64::NAN) * x[j];
        inv.push(vec![
            name.clone(),
            kind.into(),
            num(x[j]),
            unit.into(),
            num(capex),
            num(annual),
            num(annual * scale),
        ]);
    }
    write_table(
        &out_dir.join("investment.csv"),
        &[
            "asset",
            "kind",
            "new_capacity",
            "unit",
            "capex",
            "annualized_cost",
            "horizon_cost",
        ],
        inv,
    )?;

    let mut costs: Vec<Vec<String>> = run
        .costs
        .terms()
        .iter()
        .map(|(n, v)| vec![n.to_string(), num(*v)])
        .collect();
    costs.push(vec!["total".into(), num(run.costs.total())]);
    write_table(&out_dir.join("costs.csv"), &["term", "value"], costs)?;

    let mut sched = Vec::new();
    for (j, key) in run.model.keys.iter().enumerate() {
        let Some(n) = key.node else { continue };
        let rec = s.tree.node(n);
        let object = key.obj.map(|i| {
            if key.kind.on_storage() {
                sys.storage[i].name.clone()
            } else {
                sys.technologies[i].name.clone()
            }
        });
        let mode = match (key.obj, key.mode) {
            (Some(i), Some(o)) => sys.technologies[i].modes[o].name.clone(),
            _ => String::new(),
        };
        sched.push(vec![
            n.to_string(),
            rec.data_key.clone(),
            rec.stage.to_string(),
            num(rec.probability),
            key.step.map(|t| t.to_string()).unwrap_or_default(),
            key.kind.as_str().into(),
            object.unwrap_or_default(),
            key.carrier
                .map(|e| sys.carriers[e].name.clone())
                .unwrap_or_default(),
            mode,
            num(x[j]),
        ]);
    }
    write_table(
        &out_dir.join("schedules.csv"),
        &[
            "node",
            "data_key",
            "stage",
            "probability",
            "step",
            "variable",
            "object",
            "carrier",
            "mode",
            "value",
        ],
        sched,
    )?;

    let stamp = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let p = &run.model.problem;
    let meta = vec![
        ("study", s.name.clone()),
        ("scenario", s.scenario.clone()),
        ("config_hash", run.config_hash.to_string()),
        ("reserve", sys.market.reserve.to_string()),
        ("status", run.solution.status.to_string()),
        ("objective", num(run.solution.objective)),
        ("expected_emissions", num(run.model.expected_emissions(x))),
        ("iterations", run.solution.iterations.to_string()),
        ("rows", p.n_rows().to_string()),
        ("columns", p.n_cols().to_string()),
        ("nonzeros", p.nnz().to_string()),
        ("duality_gap", format!("{:e}", run.duality_gap)),
        ("max_residual", format!("{:e}", run.max_residual)),
        (
            "alternative_optima",
            run.solution.alternative_optima.to_string(),
        ),
        ("timestamp", stamp.to_string()),
    ];
    write_table(
        &out_dir.join("metadata.csv"),
        &["key", "value"],
        meta.into_iter()
            .map(|(k, v)| vec![k.to_string(), v])
            .collect(),
    )
}
