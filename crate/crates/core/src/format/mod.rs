//! File formats: models, valuation grids and result documents.

mod model;

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::constraint::json::{from_json, to_json, ConstraintJson};
use crate::constraint::{parse_rat, ConstraintSet, Context, Rat, Valuation, Var};
use crate::error::{Error, Result};
use crate::reach::AnalysisResult;

pub use model::{parse_model, print_model, Model};

pub const RESULT_SCHEMA: &str = "timed-ni/result";
pub const RESULT_VERSION: u32 = 1;

/// Cartesian grid from `p=0:4:1/4,n=2` (`lo:hi:step` or a single value).
pub fn parse_grid(spec: &str) -> Result<Vec<Valuation>> {
    let mut axes: Vec<(String, Vec<Rat>)> = vec![];
    for part in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (name, range) = part
            .split_once('=')
            .ok_or_else(|| Error::usage(format!("grid entry `{part}` is not name=lo:hi:step")))?;
        let bits: Vec<&str> = range.split(':').collect();
        let values = match bits.as_slice() {
            [v] => vec![parse_rat(v)?],
            [lo, hi, step] => {
                let (lo, hi, step) = (parse_rat(lo)?, parse_rat(hi)?, parse_rat(step)?);
                if step <= Rat::from_integer(0.into()) {
                    return Err(Error::usage(format!("grid step of `{name}` must be positive")));
                }
                let mut out = vec![];
                let mut v = lo;
                while v <= hi {
                    out.push(v.clone());
                    v += &step;
                }
                out
            }
            _ => return Err(Error::usage(format!("grid entry `{part}` is not name=lo:hi:step"))),
        };
        axes.push((name.trim().to_string(), values));
    }
    let mut out = vec![Valuation::new()];
    for (name, values) in &axes {
        let mut next = vec![];
        for v in &out {
            for x in values {
                next.push(v.clone().with(name, x.clone())?);
            }
        }
        out = next;
    }
    Ok(out)
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stats {
    pub states_explored: usize,
    pub max_depth_reached: usize,
    pub depth_limited: bool,
    pub timed_out: bool,
}

/// A synthesized constraint, in text and structured form.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalysisDoc {
    pub parameters: Vec<String>,
    pub constraint: String,
    pub constraint_json: ConstraintJson,
    pub complete: bool,
    pub over_approximation: bool,
    pub stats: Stats,
}

impl AnalysisDoc {
    pub fn new(r: &AnalysisResult) -> AnalysisDoc {
        let ctx = r.constraint.context();
        AnalysisDoc {
            parameters: ctx.vars().iter().map(|v| v.name.clone()).collect(),
            constraint: r.constraint.to_string(),
            constraint_json: to_json(&r.constraint),
            complete: r.complete,
            over_approximation: r.over_approximation,
            stats: Stats {
                states_explored: r.states_explored,
                max_depth_reached: r.max_depth_reached,
                depth_limited: r.depth_limited,
                timed_out: r.timed_out,
            },
        }
    }

    /// The constraint over a context of the listed parameters.
    pub fn constraint_set(&self) -> Result<ConstraintSet> {
        let ctx: Arc<Context> =
            Context::new(self.parameters.iter().map(|p| Var::parameter(p.clone())).collect())?;
        from_json(&ctx, &self.constraint_json)
    }
}

/// Everything a CLI invocation reports, as one JSON object.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultDocument {
    pub schema: String,
    pub version: u32,
    pub tool_version: String,
    pub command: Vec<String>,
    pub model_sha256: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub analysis: Option<AnalysisDoc>,
    /// Command-specific payload.
    pub outcome: serde_json::Value,
    /// Seconds since the epoch; `SOURCE_DATE_EPOCH` wins when set.
    pub timestamp: u64,
}

impl ResultDocument {
    pub fn new(command: Vec<String>, model_text: &str) -> ResultDocument {
        ResultDocument {
            schema: RESULT_SCHEMA.into(),
            version: RESULT_VERSION,
            tool_version: env!("CARGO_PKG_VERSION").into(),
            command,
            model_sha256: sha256_hex(model_text.as_bytes()),
            analysis: None,
            outcome: serde_json::Value::Null,
            timestamp: timestamp(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data") + "\n"
    }

    pub fn from_json(text: &str) -> Result<ResultDocument> {
        let doc: ResultDocument = serde_json::from_str(text)?;
        if doc.schema != RESULT_SCHEMA || doc.version != RESULT_VERSION {
            return Err(Error::usage(format!(
                "not a {RESULT_SCHEMA} v{RESULT_VERSION} document"
            )));
        }
        Ok(doc)
    }

    /// The JSON with the timestamp zeroed, for byte comparisons.
    pub fn comparable_json(&self) -> String {
        ResultDocument {
            timestamp: 0,
            ..self.clone()
        }
        .to_json()
    }
}

fn timestamp() -> u64 {
    if let Some(t) = std::env::var("SOURCE_DATE_EPOCH").ok().and_then(|s| s.parse().ok()) {
        return t;
    }
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}
