//! Command-line front end. `main` only forwards to [`run`], which keeps the whole
//! surface testable in-process.
//!
//! Exit codes: 0 success, 2 invalid input, 3 infeasible model, 4 numerical failure.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::formulation::{build_model, CostDecomposition, FormulationError, Model, VarKind};
use crate::io::{load_study, write_results, IoError, LoadOptions, LoadedStudy, RunRecord};
use crate::lp::{
    check_feasibility, duality_gap, solve, write_mps, LpError, Solution, SolveOptions, Status,
};

#[derive(Parser, Debug)]
#[command(
    name = "flexplan",
    version,
    about = "Stochastic investment and multi-market planning for industrial energy flexibility"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Load, validate, formulate, solve and verify a study, then write result tables.
    Solve {
        /// Study configuration (TOML).
        study: PathBuf,
        #[command(flatten)]
        run: RunFlags,
        /// Directory for investment.csv, costs.csv, schedules.csv and metadata.csv.
        #[arg(long, default_value = "results")]
        out: PathBuf,
        /// Largest accepted row residual and relative duality gap.
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
    /// Solve two or more runs and tabulate them against the first.
    ///
    /// A run is `PATH[:no-reserve|:reserve][:scenario=LABEL][:seed=N]`; the
    /// suffixes override the global flags for that run only.
    Compare {
        /// Runs to compare; the first is the baseline.
        #[arg(required = true, num_args = 2..)]
        runs: Vec<String>,
        #[command(flatten)]
        run: RunFlags,
        /// Also write the table to `<dir>/comparison.csv`.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Largest accepted row residual and relative duality gap.
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
    /// Check tree, system and data without solving.
    Validate {
        /// Study configuration (TOML).
        study: PathBuf,
        #[command(flatten)]
        run: RunFlags,
    },
    /// Write the deterministic-equivalent LP in fixed MPS format.
    ExportLp {
        /// Study configuration (TOML).
        study: PathBuf,
        #[command(flatten)]
        run: RunFlags,
        /// Output file; `.mps` is appended when missing. Long names go to `<stem>.names.csv`.
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args, Debug, Clone, Default)]
pub struct RunFlags {
    /// Drop capacity-reserve and activation participation.
    #[arg(long)]
    pub no_reserve: bool,
    /// Cost scenario label from the `[scenarios]` table of the study.
    #[arg(long)]
    pub scenario: Option<String>,
    /// Seed for representative-day clustering.
    #[arg(long)]
    pub seed: Option<u64>,
}

impl RunFlags {
    fn options(&self) -> LoadOptions {
        LoadOptions {
            scenario: self.scenario.clone(),
            seed: self.seed,
            reserve: self.no_reserve.then_some(false),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Invalid(String),
    #[error("model is infeasible; rows without a feasible activity:\n{}", rows.join("\n"))]
    Infeasible { rows: Vec<String> },
    #[error("{0}")]
    Numerical(String),
    #[error("runs differ in shape: {0}")]
    ShapeMismatch(String),
    #[error("{path}: {source}")]
    Write {
        path: String,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Invalid(_) | CliError::ShapeMismatch(_) => 2,
            CliError::Infeasible { .. } => 3,
            CliError::Numerical(_) | CliError::Write { .. } => 4,
        }
    }
}

impl From<IoError> for CliError {
    fn from(e: IoError) -> Self {
        CliError::Invalid(e.to_string())
    }
}

impl From<FormulationError> for CliError {
    fn from(e: FormulationError) -> Self {
        match e {
            FormulationError::Lp(LpError::InfeasibleEmptyRow(row)) => {
                CliError::Infeasible { rows: vec![row] }
            }
            FormulationError::Lp(e) => CliError::Numerical(e.to_string()),
            FormulationError::NotOptimal(s) => {
                CliError::Numerical(format!("solution status is {s}"))
            }
            other => CliError::Invalid(other.to_string()),
        }
    }
}

/// A solved and verified run.
pub struct SolvedRun {
    pub loaded: LoadedStudy,
    pub model: Model,
    pub solution: Solution,
    pub costs: CostDecomposition,
    pub gap: f64,
    pub residual: f64,
}

impl SolvedRun {
    /// `(asset, new capacity)` for every investment candidate, technologies first.
    pub fn investments(&self) -> Vec<(String, f64)> {
        let sys = &self.loaded.study.system;
        let x = &self.solution.primal;
        let mut out = Vec::new();
        for j in self.model.cols_of(VarKind::VNewTech) {
            out.push((
                sys.technologies[self.model.keys[j].obj.unwrap()]
                    .name
                    .clone(),
                tidy(x[j]),
            ));
        }
        for j in self.model.cols_of(VarKind::VNewStorage) {
            out.push((
                sys.storage[self.model.keys[j].obj.unwrap()].name.clone(),
                tidy(x[j]),
            ));
        }
        out
    }

    pub fn storage_total(&self) -> f64 {
        self.model
            .cols_of(VarKind::VNewStorage)
            .map(|j| self.solution.primal[j])
            .sum()
    }
}

fn loaded_and_checked(path: &Path, opts: &LoadOptions) -> Result<LoadedStudy, CliError> {
    let loaded = load_study(path, opts)?;
    let report = loaded.study.validate();
    if !report.is_empty() {
        return Err(CliError::Invalid(format!(
            "{}: validation failed\n{report}",
            path.display()
        )));
    }
    Ok(loaded)
}

/// Loads, validates, formulates, solves and verifies one run.
pub fn solve_study(path: &Path, opts: &LoadOptions, tol: f64) -> Result<SolvedRun, CliError> {
    let loaded = loaded_and_checked(path, opts)?;
    let model = build_model(&loaded.study)?;
    let solution = solve(&model.problem, &SolveOptions::default())
        .map_err(|e| CliError::Numerical(e.to_string()))?;
    match solution.status {
        Status::Optimal => {}
        Status::Infeasible => {
            let rows = solution
                .infeasible_rows
                .iter()
                .map(|&i| model.problem.row_names[i].clone())
                .collect();
            return Err(CliError::Infeasible { rows });
        }
        s => {
            return Err(CliError::Numerical(format!(
                "solver stopped with status {s}"
            )))
        }
    }
    let report = check_feasibility(&model.problem, &solution.primal, tol)
        .map_err(|e| CliError::Numerical(e.to_string()))?;
    let residual = report.max_row_residual.max(report.max_bound_violation);
    if residual > tol {
        return Err(CliError::Numerical(format!(
            "primal residual {residual:e} exceeds {tol:e}"
        )));
    }
    let gap =
        duality_gap(&model.problem, &solution).map_err(|e| CliError::Numerical(e.to_string()))?;
    if gap > tol {
        return Err(CliError::Numerical(format!(
            "duality gap {gap:e} exceeds {tol:e}"
        )));
    }
    let costs = model.decompose_costs(&solution)?;
    Ok(SolvedRun {
        loaded,
        model,
        solution,
        costs,
        gap,
        residual,
    })
}

/// Parses the command line in `args` (program name first) and executes it.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let _ = if code == 0 {
                write!(out, "{e}")
            } else {
                write!(err, "{e}")
            };
            return code;
        }
    };
    match execute(cli.command, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn execute(command: Command, out: &mut dyn Write) -> Result<(), CliError> {
    match command {
        Command::Solve {
            study,
            run,
            out: dir,
            tol,
        } => cmd_solve(&study, &run.options(), &dir, tol, out),
        Command::Compare {
            runs,
            run,
            out: dir,
            tol,
        } => cmd_compare(&runs, &run, dir.as_deref(), tol, out),
        Command::Validate { study, run } => cmd_validate(&study, &run.options(), out),
        Command::ExportLp {
            study,
            run,
            out: file,
        } => cmd_export_lp(&study, &run.options(), &file, out),
    }
}

fn emit(out: &mut dyn Write, text: std::fmt::Arguments) -> Result<(), CliError> {
    out.write_fmt(text).map_err(|source| CliError::Write {
        path: "<stdout>".into(),
        source,
    })
}

fn cmd_solve(
    path: &Path,
    opts: &LoadOptions,
    dir: &Path,
    tol: f64,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let r = solve_study(path, opts, tol)?;
    let record = RunRecord {
        study: &r.loaded.study,
        model: &r.model,
        solution: &r.solution,
        costs: r.costs,
        config_hash: &r.loaded.hash,
        duality_gap: r.gap,
        max_residual: r.residual,
    };
    write_results(&record, dir).map_err(|e| CliError::Write {
        path: dir.display().to_string(),
        source: std::io::Error::other(e),
    })?;
    for (asset, v) in r.investments() {
        emit(out, format_args!("{asset:<16} {v:>14.6}\n"))?;
    }
    let p = &r.model.problem;
    emit(
        out,
        format_args!(
            "status=optimal objective={} gap={:e} residual={:e} iterations={} rows={} columns={} hash={} out={}\n",
            r.solution.objective,
            r.gap,
            r.residual,
            r.solution.iterations,
            p.n_rows(),
            p.n_cols(),
            r.loaded.hash,
            dir.display()
        ),
    )
}

/// One `compare` argument with its resolved options.
#[derive(Clone, Debug, PartialEq)]
pub struct RunSpec {
    pub path: PathBuf,
    pub options: LoadOptions,
}

impl RunSpec {
    pub fn parse(spec: &str, defaults: &RunFlags) -> Result<RunSpec, CliError> {
        let mut parts = spec.split(':');
        let path = PathBuf::from(parts.next().unwrap_or_default());
        let mut options = defaults.options();
        for p in parts {
            match p {
                "no-reserve" => options.reserve = Some(false),
                "reserve" => options.reserve = Some(true),
                _ => match p.split_once('=') {
                    Some(("scenario", v)) => options.scenario = Some(v.to_string()),
                    Some(("seed", v)) => {
                        options.seed = Some(v.parse().map_err(|_| {
                            CliError::Invalid(format!("run '{spec}': bad seed '{v}'"))
                        })?)
                    }
                    _ => {
                        return Err(CliError::Invalid(format!(
                            "run '{spec}': unknown option '{p}'"
                        )))
                    }
                },
            }
        }
        Ok(RunSpec { path, options })
    }

    pub fn label(&self) -> String {
        let mut s = self.path.display().to_string();
        if self.options.reserve == Some(false) {
            s.push_str(":no-reserve");
        }
        if let Some(sc) = &self.options.scenario {
            s.push_str(&format!(":scenario={sc}"));
        }
        s
    }
}

/// `(b - a) / a`; zero when both are zero and undefined otherwise when `a` is zero.
pub fn relative_delta(a: f64, b: f64) -> Option<f64> {
    if a == 0.0 {
        (b == 0.0).then_some(0.0)
    } else {
        Some((b - a) / a)
    }
}

/// Rows `(metric, value per run)` of a comparison.
pub fn comparison_rows(runs: &[SolvedRun]) -> Result<Vec<(String, Vec<f64>)>, CliError> {
    let base: Vec<String> = runs[0].investments().into_iter().map(|(a, _)| a).collect();
    for r in &runs[1..] {
        let names: Vec<String> = r.investments().into_iter().map(|(a, _)| a).collect();
        if names != base {
            return Err(CliError::ShapeMismatch(format!(
                "{} invests in [{}], {} in [{}]",
                runs[0].loaded.path.display(),
                base.join(", "),
                r.loaded.path.display(),
                names.join(", ")
            )));
        }
    }
    let mut rows = vec![
        (
            "objective".to_string(),
            runs.iter().map(|r| r.solution.objective).collect(),
        ),
        (
            "expected_emissions".to_string(),
            runs.iter()
                .map(|r| r.model.expected_emissions(&r.solution.primal))
                .collect(),
        ),
    ];
    for (k, name) in base.iter().enumerate() {
        rows.push((
            format!("new_capacity[{name}]"),
            runs.iter().map(|r| r.investments()[k].1).collect(),
        ));
    }
    rows.push((
        "storage_total".to_string(),
        runs.iter().map(SolvedRun::storage_total).collect(),
    ));
    for (k, (term, _)) in runs[0].costs.terms().iter().enumerate() {
        rows.push((
            format!("cost[{term}]"),
            runs.iter().map(|r| r.costs.terms()[k].1).collect(),
        ));
    }
    Ok(rows)
}

fn fmt_delta(d: Option<f64>) -> String {
    d.map_or("n/a".to_string(), |v| format!("{v:.6}"))
}

fn cmd_compare(
    specs: &[String],
    defaults: &RunFlags,
    dir: Option<&Path>,
    tol: f64,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let specs = specs
        .iter()
        .map(|s| RunSpec::parse(s, defaults))
        .collect::<Result<Vec<_>, _>>()?;
    let results: Vec<Result<SolvedRun, CliError>> = std::thread::scope(|scope| {
        let handles: Vec<_> = specs
            .iter()
            .map(|s| scope.spawn(move || solve_study(&s.path, &s.options, tol)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("solver thread panicked"))
            .collect()
    });
    let runs = results.into_iter().collect::<Result<Vec<_>, _>>()?;
    let rows = comparison_rows(&runs)?;

    for (k, (s, r)) in specs.iter().zip(&runs).enumerate() {
        emit(
            out,
            format_args!("run{k}  hash={}  {}\n", r.loaded.hash, s.label()),
        )?;
    }
    let mut header = format!("{:<28}", "metric");
    for k in 0..runs.len() {
        header.push_str(&format!(" {:>16}", format!("run{k}")));
    }
    for k in 1..runs.len() {
        header.push_str(&format!(" {:>12}", format!("delta{k}")));
    }
    emit(out, format_args!("{header}\n"))?;
    let mut csv_rows = Vec::new();
    for (metric, vals) in &rows {
        let mut line = format!("{metric:<28}");
        let mut rec = vec![metric.clone()];
        for v in vals {
            line.push_str(&format!(" {v:>16.6}"));
            rec.push(format!("{v}"));
        }
        for v in &vals[1..] {
            let d = fmt_delta(relative_delta(vals[0], *v));
            line.push_str(&format!(" {d:>12}"));
            rec.push(d);
        }
        emit(out, format_args!("{line}\n"))?;
        csv_rows.push(rec);
    }
    if let Some(dir) = dir {
        write_comparison(dir, runs.len(), &csv_rows)?;
    }
    let obj = &rows[0].1;
    let sto = rows
        .iter()
        .find(|r| r.0 == "storage_total")
        .map(|r| &r.1)
        .unwrap();
    let last = runs.len() - 1;
    emit(
        out,
        format_args!(
            "runs={} objective_delta={} storage_delta={} hashes={}\n",
            runs.len(),
            fmt_delta(relative_delta(obj[0], obj[last])),
            fmt_delta(relative_delta(sto[0], sto[last])),
            runs.iter()
                .map(|r| r.loaded.hash.as_str())
                .collect::<Vec<_>>()
                .join(",")
        ),
    )
}

fn write_comparison(dir: &Path, n: usize, rows: &[Vec<String>]) -> Result<(), CliError> {
    let path = dir.join("comparison.csv");
    let werr = |source: std::io::Error| CliError::Write {
        path: path.display().to_string(),
        source,
    };
    std::fs::create_dir_all(dir).map_err(werr)?;
    let mut w = csv::Writer::from_path(&path).map_err(|e| werr(std::io::Error::other(e)))?;
    let mut header = vec!["metric".to_string()];
    header.extend((0..n).map(|k| format!("run{k}")));
    header.extend((1..n).map(|k| format!("delta{k}")));
    w.write_record(&header)
        .map_err(|e| werr(std::io::Error::other(e)))?;
    for r in rows {
        w.write_record(r)
            .map_err(|e| werr(std::io::Error::other(e)))?;
    }
    w.flush().map_err(werr)
}

fn cmd_validate(path: &Path, opts: &LoadOptions, out: &mut dyn Write) -> Result<(), CliError> {
    let loaded = loaded_and_checked(path, opts)?;
    let s = &loaded.study;
    emit(
        out,
        format_args!(
            "valid=true nodes={} leaves={} stages={} steps={} hash={}\n",
            s.tree.len(),
            s.tree.leaves().count(),
            s.tree.stage_count(),
            s.horizon.steps_per_stage,
            loaded.hash
        ),
    )
}

fn cmd_export_lp(
    path: &Path,
    opts: &LoadOptions,
    file: &Path,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let loaded = loaded_and_checked(path, opts)?;
    let model = build_model(&loaded.study)?;
    let file = if file.extension().is_some_and(|e| e == "mps") {
        file.to_path_buf()
    } else {
        file.with_extension("mps")
    };
    let mps = write_mps(&model.problem);
    let werr = |p: &Path| {
        let path = p.display().to_string();
        move |source| CliError::Write { path, source }
    };
    if let Some(parent) = file.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(werr(parent))?;
    }
    std::fs::write(&file, &mps.text).map_err(werr(&file))?;
    let names = file.with_extension("names.csv");
    std::fs::write(&names, mps.name_table()).map_err(werr(&names))?;
    let p = &model.problem;
    emit(
        out,
        format_args!(
            "rows={} columns={} nonzeros={} file={} names={}\n",
            p.n_rows(),
            p.n_cols(),
            p.nnz(),
            file.display(),
            names.display()
        ),
    )
}

/// Clears solver noise around zero so that tables do not show `-0.000000`.
fn tidy(v: f64) -> f64 {
    if v.abs() < 1e-12 {
        0.0
    } else {
        v
    }
}
