//! Instance and result documents.
//!
//! Instances are JSON objects `{"n": .., "w1": [[..], ..], "w2": [[..], ..],
//! "tolerances": {..}}` where every row has `n + 1` coordinates. Rows are
//! normalized on load; rows that are not already unit length produce a
//! warning, rows shorter than `1e-6` are rejected.

use serde::{Deserialize, Serialize};
use sphsep::separation::IntersectionCertificate;
use sphsep::{ProofTrace, ToleranceConfig, UnitPoint};

/// Rows whose norm is at most this are rejected rather than normalized.
pub const MIN_ROW_NORM: f64 = 1e-6;

/// Norm deviation from 1 below which a row is taken as already normalized.
const NORMALIZED_SLACK: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub n: usize,
    pub w1: Vec<Vec<f64>>,
    pub w2: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerances: Option<ToleranceConfig>,
}

/// A validated instance with unit generators.
#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    pub n: usize,
    pub w1: Vec<UnitPoint>,
    pub w2: Vec<UnitPoint>,
    pub tolerances: Option<ToleranceConfig>,
    /// One line per row that had to be rescaled.
    pub warnings: Vec<String>,
}

/// Problem with the shape or syntax of an input document.
#[derive(Clone, Debug, PartialEq)]
pub struct Malformed(pub String);

impl std::fmt::Display for Malformed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

pub fn parse_instance(text: &str) -> Result<Instance, Malformed> {
    // serde_json messages end with the offending line and column.
    let file: InstanceFile = serde_json::from_str(text).map_err(|e| Malformed(e.to_string()))?;
    load(file)
}

fn load(file: InstanceFile) -> Result<Instance, Malformed> {
    if file.n == 0 {
        return Err(Malformed("key \"n\": must be at least 1".into()));
    }
    let mut warnings = Vec::new();
    let mut rows = |key: &str, raw: Vec<Vec<f64>>| -> Result<Vec<UnitPoint>, Malformed> {
        if raw.is_empty() {
            return Err(Malformed(format!("key \"{key}\": needs at least one row")));
        }
        raw.into_iter()
            .enumerate()
            .map(|(i, row)| {
                if row.len() != file.n + 1 {
                    return Err(Malformed(format!(
                        "key \"{key}\"[{i}]: expected {} coordinates, found {}",
                        file.n + 1,
                        row.len()
                    )));
                }
                let len = row.iter().map(|x| x * x).sum::<f64>().sqrt();
                if !(len > MIN_ROW_NORM) {
                    return Err(Malformed(format!("key \"{key}\"[{i}]: norm {len:e} is too small to normalize")));
                }
                if (len - 1.0).abs() > NORMALIZED_SLACK {
                    warnings.push(format!("{key}[{i}] normalized (norm was {len})"));
                }
                UnitPoint::normalize(&row, MIN_ROW_NORM).map_err(|e| Malformed(format!("key \"{key}\"[{i}]: {e}")))
            })
            .collect()
    };
    let w1 = rows("w1", file.w1)?;
    let w2 = rows("w2", file.w2)?;
    if let Some(t) = &file.tolerances {
        t.validate().map_err(|e| Malformed(format!("key \"tolerances\": {e}")))?;
    }
    Ok(Instance {
        n: file.n,
        w1,
        w2,
        tolerances: file.tolerances,
        warnings,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Disjoint,
    Intersecting,
    Ambiguous,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceFile {
    pub epsilon0: f64,
    pub offsets: Vec<f64>,
    pub iterations: usize,
}

impl From<&ProofTrace> for TraceFile {
    fn from(t: &ProofTrace) -> Self {
        Self {
            epsilon0: t.epsilon0,
            offsets: t.offsets(),
            iterations: t.iterations,
        }
    }
}

/// Output of `check` and `witness`. Keys appear in declaration order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultFile {
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub margin: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub common_point: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace: Option<TraceFile>,
}

impl ResultFile {
    fn empty(status: Status) -> Self {
        Self {
            status,
            witness: None,
            margin: None,
            common_point: None,
            lambda: None,
            mu: None,
            trace: None,
        }
    }

    pub fn disjoint(witness: &UnitPoint, margin: f64) -> Self {
        Self {
            witness: Some(witness.coords().to_vec()),
            margin: Some(margin),
            ..Self::empty(Status::Disjoint)
        }
    }

    pub fn intersecting(cert: &IntersectionCertificate) -> Self {
        Self {
            common_point: Some(cert.common_point.coords().to_vec()),
            lambda: Some(cert.lambda.clone()),
            mu: Some(cert.mu.clone()),
            ..Self::empty(Status::Intersecting)
        }
    }

    pub fn ambiguous(margin: Option<f64>) -> Self {
        Self {
            margin,
            ..Self::empty(Status::Ambiguous)
        }
    }

    /// Pretty JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("result serializes");
        s.push('\n');
        s
    }
}
