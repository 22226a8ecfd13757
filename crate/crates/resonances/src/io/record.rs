use serde::{Deserialize, Serialize};

use super::csv::Row;
use crate::spectral::{Bc, Window};
use crate::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecordRow {
    pub mode_index: i64,
    pub bc: Option<Bc>,
    pub re_lambda: f64,
    pub im_lambda: f64,
    pub multiplicity: u32,
    /// None when the residual could not be computed.
    pub residual: Option<f64>,
    pub drift: Option<f64>,
    pub accepted: bool,
}

/// On-disk spectrum with the parameters that produced it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumRecord {
    pub schema_version: u32,
    pub model: String,
    pub params: serde_json::Value,
    /// Trusted region Im λ ≥ −gamma, |λ| ≤ radius; None is unbounded.
    pub trust_gamma: Option<f64>,
    pub trust_radius: Option<f64>,
    pub warnings: Vec<String>,
    pub rows: Vec<RecordRow>,
}

impl SpectrumRecord {
    pub fn new(model: &str, params: serde_json::Value, window: Window, warnings: Vec<String>, rows: &[Row]) -> Self {
        let finite = |v: f64| v.is_finite().then_some(v);
        let rows = rows
            .iter()
            .map(|r| RecordRow {
                mode_index: r.mode_index,
                bc: r.bc,
                re_lambda: r.lambda.re,
                im_lambda: r.lambda.im,
                multiplicity: r.mult,
                residual: finite(r.residual),
                drift: r.drift,
                accepted: r.accepted,
            })
            .collect();
        Self {
            schema_version: SCHEMA_VERSION,
            model: model.into(),
            params,
            trust_gamma: finite(window.gamma),
            trust_radius: finite(window.radius),
            warnings,
            rows,
        }
    }

    pub fn window(&self) -> Window {
        Window {
            radius: self.trust_radius.unwrap_or(f64::INFINITY),
            gamma: self.trust_gamma.unwrap_or(f64::INFINITY),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("record serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let rec: Self = serde_json::from_str(text).map_err(|e| Error::Config(format!("bad spectrum record: {e}")))?;
        if rec.schema_version != SCHEMA_VERSION {
            return Err(Error::Config(format!("unsupported schema version {}", rec.schema_version)));
        }
        Ok(rec)
    }
}
