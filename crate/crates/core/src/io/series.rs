//! Time-series table: one row per (data key, step).

use std::collections::BTreeMap;
use std::path::Path;

use super::IoError;

/// Columns of the series table, grouped by data key. A column is present for a
/// key only when every step of that key has a value.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SeriesTable {
    pub keys: BTreeMap<String, BTreeMap<String, Vec<f64>>>,
}

const MARKET_COLUMNS: [&str; 12] = [
    "price_da",
    "price_id_buy",
    "price_id_sell",
    "price_cm_up",
    "price_cm_dwn",
    "price_act_up",
    "price_act_dwn",
    "sigma_id_buy",
    "sigma_id_sell",
    "sigma_up",
    "sigma_dwn",
    "price_co2",
];

const HISTORY_COLUMNS: [&str; 2] = ["hist_id_volume", "hist_rm_volume"];
const PREFIXES: [&str; 3] = ["demand_", "flex_", "avail_"];

fn known_column(name: &str) -> bool {
    MARKET_COLUMNS.contains(&name)
        || HISTORY_COLUMNS.contains(&name)
        || PREFIXES
            .iter()
            .any(|p| name.len() > p.len() && name.starts_with(p))
}

impl SeriesTable {
    pub fn steps(&self, key: &str) -> Option<usize> {
        self.keys
            .get(key)
            .and_then(|cols| cols.values().next())
            .map(Vec::len)
    }

    pub fn column(&self, key: &str, column: &str) -> Option<&Vec<f64>> {
        self.keys.get(key).and_then(|c| c.get(column))
    }

    pub fn insert(&mut self, key: &str, column: &str, values: Vec<f64>) {
        self.keys
            .entry(key.to_string())
            .or_default()
            .insert(column.to_string(), values);
    }

    /// Columns of a composite key `base+overlay+...`; later parts override earlier ones.
    pub fn resolve(&self, key: &str) -> Result<BTreeMap<String, Vec<f64>>, IoError> {
        let mut out = BTreeMap::new();
        for part in key.split('+') {
            let cols = self
                .keys
                .get(part)
                .ok_or_else(|| IoError::MissingSeries(format!("data key '{part}'")))?;
            for (c, v) in cols {
                out.insert(c.clone(), v.clone());
            }
        }
        Ok(out)
    }

    /// Delimited text with a `key,step` prefix and the union of all columns;
    /// cells a key does not define are left empty.
    pub fn to_csv(&self) -> String {
        let mut columns: Vec<&str> = self
            .keys
            .values()
            .flat_map(|c| c.keys().map(String::as_str))
            .collect();
        columns.sort_unstable();
        columns.dedup();
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["key", "step"];
        header.extend(&columns);
        w.write_record(&header).expect("in-memory write");
        for (key, cols) in &self.keys {
            let n = cols.values().map(Vec::len).max().unwrap_or(0);
            for t in 0..n {
                let mut rec = vec![key.clone(), t.to_string()];
                for c in &columns {
                    rec.push(
                        cols.get(*c)
                            .and_then(|v| v.get(t))
                            .map(|x| fmt_value(*x))
                            .unwrap_or_default(),
                    );
                }
                w.write_record(&rec).expect("in-memory write");
            }
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
    }

    pub fn parse(text: &str, origin: &str) -> Result<SeriesTable, IoError> {
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let header = rdr
            .headers()
            .map_err(|e| IoError::Parse {
                path: origin.into(),
                row: 1,
                message: e.to_string(),
            })?
            .clone();
        if header.get(0) != Some("key") || header.get(1) != Some("step") {
            return Err(IoError::Parse {
                path: origin.into(),
                row: 1,
                message: "header must start with key,step".into(),
            });
        }
        let columns: Vec<String> = header.iter().skip(2).map(str::to_string).collect();
        for c in &columns {
            if !known_column(c) {
                return Err(IoError::Parse {
                    path: origin.into(),
                    row: 1,
                    message: format!("unknown column '{c}'"),
                });
            }
        }
        let mut cells: BTreeMap<String, BTreeMap<usize, Vec<Option<f64>>>> = BTreeMap::new();
        for (i, rec) in rdr.records().enumerate() {
            let row = i + 2;
            let perr = |message: String| IoError::Parse {
                path: origin.into(),
                row,
                message,
            };
            let rec = rec.map_err(|e| perr(e.to_string()))?;
            if rec.len() != columns.len() + 2 {
                return Err(perr(format!(
                    "expected {} fields, found {}",
                    columns.len() + 2,
                    rec.len()
                )));
            }
            let key = rec[0].to_string();
            if key.is_empty() || key.contains('+') {
                return Err(perr(format!("invalid data key '{key}'")));
            }
            let step: usize = rec[1]
                .parse()
                .map_err(|_| perr(format!("invalid step '{}'", &rec[1])))?;
            let mut values = Vec::with_capacity(columns.len());
            for (j, c) in columns.iter().enumerate() {
                let s = &rec[j + 2];
                if s.is_empty() {
                    values.push(None);
                    continue;
                }
                let v: f64 = s
                    .parse()
                    .map_err(|_| perr(format!("column {c}: '{s}' is not a number")))?;
                if v.is_nan() {
                    return Err(perr(format!("column {c}: NaN")));
                }
                if (c == "sigma_up" || c == "sigma_dwn") && v != 0.0 && v != 1.0 {
                    return Err(IoError::Range(format!(
                        "{origin}, row {row}: {c} = {v} must be 0 or 1"
                    )));
                }
                if (c == "sigma_id_buy" || c == "sigma_id_sell") && !(0.0..=1.0).contains(&v) {
                    return Err(IoError::Range(format!(
                        "{origin}, row {row}: {c} = {v} must lie in [0, 1]"
                    )));
                }
                values.push(Some(v));
            }
            if cells
                .entry(key.clone())
                .or_default()
                .insert(step, values)
                .is_some()
            {
                return Err(perr(format!("duplicate row for key '{key}' step {step}")));
            }
        }
        let mut table = SeriesTable::default();
        for (key, rows) in cells {
            let n = rows.len();
            for step in 0..n {
                if !rows.contains_key(&step) {
                    return Err(IoError::Gap {
                        path: origin.into(),
                        key,
                        step,
                    });
                }
            }
            let mut cols = BTreeMap::new();
            for (j, c) in columns.iter().enumerate() {
                let vals: Vec<Option<f64>> = rows.values().map(|r| r[j]).collect();
                let filled = vals.iter().filter(|v| v.is_some()).count();
                if filled == n {
                    cols.insert(c.clone(), vals.into_iter().map(Option::unwrap).collect());
                } else if filled > 0 {
                    let step = vals.iter().position(Option::is_none).unwrap();
                    return Err(IoError::Parse {
                        path: origin.into(),
                        row: 0,
                        message: format!("key '{key}' column {c} has no value at step {step}"),
                    });
                }
            }
            table.keys.insert(key, cols);
        }
        Ok(table)
    }
}

/// Shortest text that parses back to the same value.
pub(crate) fn fmt_value(x: f64) -> String {
    if x.is_infinite() {
        if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{x}")
    }
}

pub fn load_series(path: &Path) -> Result<SeriesTable, IoError> {
    let text = std::fs::read_to_string(path).map_err(|source| IoError::Io {
        path: path.display().to_string(),
        source,
    })?;
    SeriesTable::parse(&text, &path.display().to_string())
}
