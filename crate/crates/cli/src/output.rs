use crate::args::Format;
use anyhow::Result;
use nlcone_core::quadrature::IntegralResult;
use serde::Serialize;
use std::io::Write;

/// A computed number with its error estimate; the only way numbers leave
/// the machine formats.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Measured {
    pub value: f64,
    pub error: f64,
}

impl Measured {
    pub fn new(value: f64, error: f64) -> Self {
        Measured { value, error }
    }

    /// A value known exactly (closed form or caller-supplied).
    pub fn exact(value: f64) -> Self {
        Measured { value, error: 0.0 }
    }
}

impl From<IntegralResult> for Measured {
    fn from(r: IntegralResult) -> Self {
        Measured::new(r.value, r.error_estimate)
    }
}

impl std::fmt::Display for Measured {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:.7} ± {:.1e}", self.value, self.error)
    }
}

/// Rows for the CSV format: a header and string cells.
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table {
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }
}

/// Shortest round-tripping form, exponent notation for tiny or huge values.
pub fn num(x: f64) -> String {
    format!("{x:?}")
}

/// Pushes `value, error` cell pairs.
pub fn cells(row: &mut Vec<String>, m: Measured) {
    row.push(num(m.value));
    row.push(num(m.error));
}

pub trait Render: erased::Serialize {
    fn table(&self) -> Table;
    fn human(&self) -> String;
}

// `Render` objects are boxed; route serialization through a JSON value.
mod erased {
    pub trait Serialize {
        fn to_value(&self) -> serde_json::Result<serde_json::Value>;
    }

    impl<T: serde::Serialize> Serialize for T {
        fn to_value(&self) -> serde_json::Result<serde_json::Value> {
            serde_json::to_value(self)
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Defaults {
    pub quad_abs_tol: f64,
    pub quad_rel_tol: f64,
    pub inner_abs_tol: f64,
    pub inner_rel_tol: f64,
    pub alpha_tol: f64,
    pub samples: usize,
    pub seed: u64,
    pub normalization: &'static str,
}

#[derive(Debug, Clone, Serialize)]
pub struct Meta {
    pub version: &'static str,
    pub defaults: Defaults,
    pub timestamp: String,
}

impl Meta {
    pub fn new(defaults: Defaults) -> Self {
        Meta {
            version: env!("CARGO_PKG_VERSION"),
            defaults,
            timestamp: humantime::format_rfc3339_seconds(std::time::SystemTime::now()).to_string(),
        }
    }

    fn header_lines(&self) -> Vec<String> {
        let d = &self.defaults;
        vec![
            format!("# nlcone {} at {}", self.version, self.timestamp),
            format!(
                "# quad_abs_tol={:e} quad_rel_tol={:e} inner_abs_tol={:e} inner_rel_tol={:e} alpha_tol={:e} samples={} seed={} normalization={}",
                d.quad_abs_tol, d.quad_rel_tol, d.inner_abs_tol, d.inner_rel_tol, d.alpha_tol, d.samples, d.seed, d.normalization
            ),
        ]
    }
}

/// The JSON document `{meta, result}`, pretty-printed.
pub fn to_json(meta: &Meta, body: &dyn Render) -> Result<String> {
    let mut doc = serde_json::Map::new();
    doc.insert("meta".into(), serde_json::to_value(meta)?);
    doc.insert("result".into(), body.to_value()?);
    Ok(serde_json::to_string_pretty(&serde_json::Value::Object(doc))? + "\n")
}

pub fn emit(w: &mut dyn Write, format: Format, meta: &Meta, body: &dyn Render) -> Result<()> {
    match format {
        Format::Json => w.write_all(to_json(meta, body)?.as_bytes())?,
        Format::Csv => {
            for line in meta.header_lines() {
                writeln!(w, "{line}")?;
            }
            let table = body.table();
            let mut csv = csv::Writer::from_writer(&mut *w);
            csv.write_record(&table.header)?;
            for row in &table.rows {
                csv.write_record(row)?;
            }
            csv.flush()?;
        }
        Format::Human => {
            for line in meta.header_lines() {
                writeln!(w, "{line}")?;
            }
            w.write_all(body.human().as_bytes())?;
        }
    }
    w.flush()?;
    Ok(())
}
