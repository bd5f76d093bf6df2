//! One curve per JSON line:
//! `{"label": str, "m0": int, "adelic_index": int?, "generators": [[[int,int],[int,int]], ...]}`

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grouptab::SubgroupSpec;
use crate::modarith::{Mat2, Modulus, MAX_MODULUS};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SchemaError {
    #[error("malformed record: {0}")]
    Json(String),
    #[error("label must be nonempty")]
    EmptyLabel,
    #[error("m0 = {0} is outside 1..={MAX_MODULUS}")]
    InvalidModulus(i64),
    #[error("adelic_index = {0} is not positive")]
    InvalidIndex(i64),
    #[error("generator {index} has det {det}, not a unit mod {m0}")]
    NonInvertible { index: usize, det: u32, m0: u32 },
    #[error("duplicate label {0:?}")]
    DuplicateLabel(String),
}

/// A validated input record with generators reduced into [0, m0).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurveRecord {
    pub label: String,
    pub m0: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub adelic_index: Option<u64>,
    pub generators: Vec<[[u32; 2]; 2]>,
}

#[derive(Deserialize)]
struct RawRecord {
    label: String,
    m0: i64,
    #[serde(default)]
    adelic_index: Option<i64>,
    generators: Vec<[[i64; 2]; 2]>,
}

impl CurveRecord {
    pub fn modulus(&self) -> Modulus {
        Modulus::new(self.m0).expect("validated at parse time")
    }

    pub fn spec(&self) -> SubgroupSpec {
        let modulus = self.modulus();
        let gens = self
            .generators
            .iter()
            .map(|r| {
                Mat2::new(
                    modulus,
                    [[r[0][0] as i64, r[0][1] as i64], [r[1][0] as i64, r[1][1] as i64]],
                )
            })
            .collect();
        SubgroupSpec::new(modulus, gens).expect("validated at parse time")
    }

    pub fn from_spec(label: impl Into<String>, spec: &SubgroupSpec, adelic_index: Option<u64>) -> Self {
        use crate::grouptab::Generated;
        CurveRecord {
            label: label.into(),
            m0: spec.modulus().n(),
            adelic_index,
            generators: spec.generators().iter().map(|g| g.rows()).collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("record serializes")
    }
}

/// Best-effort label of a line that failed to parse, for error reports.
pub fn label_hint(line: &str) -> Option<String> {
    let value: serde_json::Value = serde_json::from_str(line).ok()?;
    value.get("label")?.as_str().map(str::to_owned)
}

pub fn parse_curve_record(line: &str) -> Result<CurveRecord, SchemaError> {
    let raw: RawRecord =
        serde_json::from_str(line).map_err(|e| SchemaError::Json(e.to_string()))?;
    if raw.label.is_empty() {
        return Err(SchemaError::EmptyLabel);
    }
    if raw.m0 < 1 || raw.m0 > MAX_MODULUS as i64 {
        return Err(SchemaError::InvalidModulus(raw.m0));
    }
    let modulus = Modulus::new(raw.m0 as u32).map_err(|_| SchemaError::InvalidModulus(raw.m0))?;
    let adelic_index = match raw.adelic_index {
        None => None,
        Some(i) if i >= 1 => Some(i as u64),
        Some(i) => return Err(SchemaError::InvalidIndex(i)),
    };
    let mut generators = Vec::with_capacity(raw.generators.len());
    for (index, rows) in raw.generators.iter().enumerate() {
        let g = Mat2::new(modulus, *rows);
        if !g.is_invertible() {
            return Err(SchemaError::NonInvertible {
                index,
                det: g.det(),
                m0: modulus.n(),
            });
        }
        generators.push(g.rows());
    }
    Ok(CurveRecord {
        label: raw.label,
        m0: modulus.n(),
        adelic_index,
        generators,
    })
}
