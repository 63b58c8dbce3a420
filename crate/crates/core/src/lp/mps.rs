//! Fixed-format MPS output and a matching reader.
//!
//! Fixed MPS allows at most 8 characters per name and 12 per number. When any
//! row or column name does not fit (model names such as `q_soc[node=3,t=5,obj=BAT]`
//! never do), all names are replaced by `R0000000`/`C0000000` style identifiers
//! and the mapping is returned alongside the text. Numbers are written with the
//! most precision that fits in the 12-character field.

use std::collections::HashMap;
use std::fmt::Write as _;

use super::problem::{LpProblem, Sense};
use super::LpError;

const OBJ_ROW: &str = "OBJ";

#[derive(Clone, Debug, PartialEq)]
pub struct MpsText {
    pub text: String,
    /// `(short, original)` pairs for rows, present only when names were shortened.
    pub row_names: Vec<(String, String)>,
    pub col_names: Vec<(String, String)>,
}

impl MpsText {
    pub fn shortened(&self) -> bool {
        !self.row_names.is_empty() || !self.col_names.is_empty()
    }

    /// Name mapping as a delimited table: `kind,short,original`.
    pub fn name_table(&self) -> String {
        let mut out = String::from("kind,short,original\n");
        for (s, l) in &self.row_names {
            let _ = writeln!(out, "row,{s},\"{}\"", l.replace('"', "\"\""));
        }
        for (s, l) in &self.col_names {
            let _ = writeln!(out, "col,{s},\"{}\"", l.replace('"', "\"\""));
        }
        out
    }
}

fn fits(name: &str) -> bool {
    !name.is_empty() && name.len() <= 8 && name.is_ascii() && !name.contains(char::is_whitespace)
}

/// Formats `v` in at most 12 characters, keeping the candidate closest to `v`.
pub fn format_number(v: f64) -> String {
    let plain = format!("{v}");
    if plain.len() <= 12 {
        return plain;
    }
    let mut candidates = vec![format!("{v:e}")];
    candidates.extend((0..=11).map(|p| format!("{v:.p$}")));
    candidates.extend((0..=11).map(|p| format!("{v:.p$e}")));
    candidates
        .into_iter()
        .filter(|s| s.len() <= 12)
        .map(|s| {
            let err = s.parse::<f64>().map_or(f64::INFINITY, |b| (b - v).abs());
            (err, s)
        })
        .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.len().cmp(&b.1.len())))
        .map(|(_, s)| s)
        .expect("an f64 always fits in 12 characters in exponent form")
}

fn line(out: &mut String, f1: &str, f2: &str, f3: &str, f4: &str) {
    let mut s = format!(" {f1:<2} {f2:<8}  {f3:<8}  {f4:<12}");
    s.truncate(s.trim_end().len());
    out.push_str(&s);
    out.push('\n');
}

pub fn write_mps(problem: &LpProblem) -> MpsText {
    let shorten = problem
        .row_names
        .iter()
        .chain(&problem.col_names)
        .any(|n| !fits(n))
        || problem.row_names.iter().any(|n| n == OBJ_ROW)
        || !fits(&problem.name);
    let rows: Vec<String> = if shorten {
        (0..problem.n_rows()).map(|i| format!("R{i:07}")).collect()
    } else {
        problem.row_names.clone()
    };
    let cols: Vec<String> = if shorten {
        (0..problem.n_cols()).map(|j| format!("C{j:07}")).collect()
    } else {
        problem.col_names.clone()
    };
    let name = if fits(&problem.name) {
        problem.name.clone()
    } else {
        "MODEL".to_string()
    };

    let mut out = String::new();
    let _ = writeln!(out, "NAME          {name}");
    out.push_str("ROWS\n");
    line(&mut out, "N", OBJ_ROW, "", "");
    for (i, r) in rows.iter().enumerate() {
        let t = match problem.row_sense[i] {
            Sense::Le => "L",
            Sense::Ge => "G",
            Sense::Eq => "E",
        };
        line(&mut out, t, r, "", "");
    }
    out.push_str("COLUMNS\n");
    for (j, entries) in problem.columns().iter().enumerate() {
        let c = problem.objective[j];
        if c != 0.0 || entries.is_empty() {
            line(&mut out, "", &cols[j], OBJ_ROW, &format_number(c));
        }
        for &(i, v) in entries {
            line(&mut out, "", &cols[j], &rows[i], &format_number(v));
        }
    }
    out.push_str("RHS\n");
    for (i, &b) in problem.rhs.iter().enumerate() {
        if b != 0.0 {
            line(&mut out, "", "RHS", &rows[i], &format_number(b));
        }
    }
    out.push_str("BOUNDS\n");
    for j in 0..problem.n_cols() {
        let (l, u) = (problem.col_lower[j], problem.col_upper[j]);
        let c = &cols[j];
        if l == u {
            line(&mut out, "FX", "BND", c, &format_number(l));
            continue;
        }
        match (l.is_finite(), u.is_finite()) {
            (false, false) => line(&mut out, "FR", "BND", c, ""),
            (false, true) => {
                line(&mut out, "MI", "BND", c, "");
                line(&mut out, "UP", "BND", c, &format_number(u));
            }
            (true, up_finite) => {
                if l != 0.0 {
                    line(&mut out, "LO", "BND", c, &format_number(l));
                }
                if up_finite {
                    line(&mut out, "UP", "BND", c, &format_number(u));
                }
            }
        }
    }
    out.push_str("ENDATA\n");

    let (row_names, col_names) = if shorten {
        (
            rows.into_iter()
                .zip(problem.row_names.iter().cloned())
                .collect(),
            cols.into_iter()
                .zip(problem.col_names.iter().cloned())
                .collect(),
        )
    } else {
        (Vec::new(), Vec::new())
    };
    MpsText {
        text: out,
        row_names,
        col_names,
    }
}

#[derive(PartialEq)]
enum Section {
    None,
    Rows,
    Columns,
    Rhs,
    Bounds,
}

fn parse_err(line: usize, msg: impl Into<String>) -> LpError {
    LpError::MpsParse {
        line,
        message: msg.into(),
    }
}

/// Reads MPS text (fields separated by whitespace; names without spaces).
pub fn parse_mps(text: &str) -> Result<LpProblem, LpError> {
    let mut name = String::new();
    let mut section = Section::None;
    let mut obj_row: Option<String> = None;
    let mut row_names = Vec::new();
    let mut row_sense = Vec::new();
    let mut row_idx: HashMap<String, usize> = HashMap::new();
    let mut col_names: Vec<String> = Vec::new();
    let mut col_idx: HashMap<String, usize> = HashMap::new();
    let mut objective = Vec::new();
    let mut triplets = Vec::new();
    let mut rhs = Vec::new();
    let mut lower: Vec<f64> = Vec::new();
    let mut upper: Vec<f64> = Vec::new();
    let mut ended = false;

    let num = |s: &str, ln: usize| {
        s.parse::<f64>()
            .map_err(|_| parse_err(ln, format!("bad number '{s}'")))
    };

    for (k, raw) in text.lines().enumerate() {
        let ln = k + 1;
        if raw.trim().is_empty() || raw.starts_with('*') {
            continue;
        }
        if !raw.starts_with(' ') {
            let mut it = raw.split_whitespace();
            let head = it.next().unwrap_or_default();
            section = match head {
                "NAME" => {
                    name = it.next().unwrap_or_default().to_string();
                    Section::None
                }
                "ROWS" => Section::Rows,
                "COLUMNS" => Section::Columns,
                "RHS" => Section::Rhs,
                "BOUNDS" => Section::Bounds,
                "ENDATA" => {
                    ended = true;
                    break;
                }
                other => return Err(parse_err(ln, format!("unsupported section '{other}'"))),
            };
            continue;
        }
        let f: Vec<&str> = raw.split_whitespace().collect();
        match section {
            Section::Rows => {
                if f.len() != 2 {
                    return Err(parse_err(ln, "expected row type and name"));
                }
                let sense = match f[0] {
                    "N" => {
                        if obj_row.is_none() {
                            obj_row = Some(f[1].to_string());
                        }
                        continue;
                    }
                    "L" => Sense::Le,
                    "G" => Sense::Ge,
                    "E" => Sense::Eq,
                    t => return Err(parse_err(ln, format!("unknown row type '{t}'"))),
                };
                row_idx.insert(f[1].to_string(), row_names.len());
                row_names.push(f[1].to_string());
                row_sense.push(sense);
                rhs.push(0.0);
            }
            Section::Columns => {
                if f.len() != 3 && f.len() != 5 {
                    return Err(parse_err(ln, "expected column, row, value [, row, value]"));
                }
                if f[1] == "'MARKER'" {
                    return Err(parse_err(ln, "integer markers are not supported"));
                }
                let j = *col_idx.entry(f[0].to_string()).or_insert_with(|| {
                    col_names.push(f[0].to_string());
                    objective.push(0.0);
                    lower.push(0.0);
                    upper.push(f64::INFINITY);
                    col_names.len() - 1
                });
                for pair in f[1..].chunks(2) {
                    let v = num(pair[1], ln)?;
                    if Some(pair[0]) == obj_row.as_deref() {
                        objective[j] += v;
                    } else {
                        let i = *row_idx
                            .get(pair[0])
                            .ok_or_else(|| parse_err(ln, format!("unknown row '{}'", pair[0])))?;
                        triplets.push((i, j, v));
                    }
                }
            }
            Section::Rhs => {
                if f.len() != 3 && f.len() != 5 {
                    return Err(parse_err(ln, "expected set, row, value [, row, value]"));
                }
                for pair in f[1..].chunks(2) {
                    let v = num(pair[1], ln)?;
                    if Some(pair[0]) == obj_row.as_deref() {
                        continue;
                    }
                    let i = *row_idx
                        .get(pair[0])
                        .ok_or_else(|| parse_err(ln, format!("unknown row '{}'", pair[0])))?;
                    rhs[i] = v;
                }
            }
            Section::Bounds => {
                if f.len() < 3 {
                    return Err(parse_err(ln, "expected bound type, set, column"));
                }
                let j = *col_idx
                    .get(f[2])
                    .ok_or_else(|| parse_err(ln, format!("unknown column '{}'", f[2])))?;
                let val = || -> Result<f64, LpError> {
                    f.get(3)
                        .ok_or_else(|| parse_err(ln, "missing bound value"))
                        .and_then(|s| num(s, ln))
                };
                match f[0] {
                    "UP" => upper[j] = val()?,
                    "LO" => lower[j] = val()?,
                    "FX" => {
                        let v = val()?;
                        lower[j] = v;
                        upper[j] = v;
                    }
                    "FR" => {
                        lower[j] = f64::NEG_INFINITY;
                        upper[j] = f64::INFINITY;
                    }
                    "MI" => lower[j] = f64::NEG_INFINITY,
                    "PL" => upper[j] = f64::INFINITY,
                    t => return Err(parse_err(ln, format!("unsupported bound type '{t}'"))),
                }
            }
            Section::None => return Err(parse_err(ln, "data line outside of a section")),
        }
    }
    if !ended {
        return Err(parse_err(text.lines().count(), "missing ENDATA"));
    }
    triplets.sort_by_key(|&(r, c, _)| (r, c));
    Ok(LpProblem {
        name,
        col_names,
        col_lower: lower,
        col_upper: upper,
        objective,
        row_names,
        row_sense,
        rhs,
        triplets,
    })
}

/// Restores original names on a problem read back from shortened MPS.
pub fn restore_names(problem: &mut LpProblem, mps: &MpsText) {
    if !mps.shortened() {
        return;
    }
    let rows: HashMap<&str, &str> = mps
        .row_names
        .iter()
        .map(|(s, l)| (s.as_str(), l.as_str()))
        .collect();
    let cols: HashMap<&str, &str> = mps
        .col_names
        .iter()
        .map(|(s, l)| (s.as_str(), l.as_str()))
        .collect();
    for n in &mut problem.row_names {
        if let Some(l) = rows.get(n.as_str()) {
            *n = l.to_string();
        }
    }
    for n in &mut problem.col_names {
        if let Some(l) = cols.get(n.as_str()) {
            *n = l.to_string();
        }
    }
}
