//! Output documents: CSV with a `# {json}` header line, or a JSON object
//! with `config`, `summary` and `result` members.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use kinetic_limit::{Error, Result};

/// Everything needed to rerun a command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: String,
    pub seed: u64,
    /// Quadrature tolerance override of the two-body solver.
    pub tol: Option<f64>,
    pub params: Value,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Body {
    Csv { columns: Vec<String>, rows: Vec<Vec<String>> },
    Json(Value),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Document {
    pub config: RunConfig,
    pub summary: Value,
    pub body: Body,
    /// The result is usable but a sample budget ran out.
    pub partial: bool,
}

/// Seventeen significant digits, enough to round-trip an `f64`.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

impl Document {
    pub fn extension(&self) -> &'static str {
        match self.body {
            Body::Csv { .. } => "csv",
            Body::Json(_) => "json",
        }
    }

    pub fn render(&self) -> Result<String> {
        let ser = |e: serde_json::Error| Error::Io(e.to_string());
        match &self.body {
            Body::Csv { columns, rows } => {
                let header = serde_json::to_string(&json!({ "config": self.config, "summary": self.summary })).map_err(ser)?;
                let mut out = format!("# {header}\n{}\n", columns.join(","));
                for r in rows {
                    out.push_str(&r.join(","));
                    out.push('\n');
                }
                Ok(out)
            }
            Body::Json(v) => {
                let mut s = serde_json::to_string_pretty(&json!({ "config": self.config, "summary": self.summary, "result": v })).map_err(ser)?;
                s.push('\n');
                Ok(s)
            }
        }
    }
}

/// Reads the embedded config back from a file written by [`Document::render`].
pub fn read_config(text: &str) -> Result<RunConfig> {
    let bad = |e: serde_json::Error| Error::Config(format!("no readable config header: {e}"));
    let doc: Value = match text.strip_prefix("# ") {
        Some(rest) => serde_json::from_str(rest.lines().next().unwrap_or("")).map_err(bad)?,
        None => serde_json::from_str(text).map_err(bad)?,
    };
    serde_json::from_value(doc.get("config").cloned().unwrap_or(Value::Null)).map_err(bad)
}
