use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

/// Which way a checked relation points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    /// `lhs ≤ rhs`; margin is `rhs - lhs`.
    AtMost,
    /// `lhs ≥ rhs`; margin is `lhs - rhs`.
    AtLeast,
    /// `lhs = rhs`; margin is `-|lhs - rhs|`.
    Equal,
}

/// Left and right side of a checked inequality or identity.
///
/// `pass ⇔ margin ≥ -(3·stat_error + tolerance)`. `stat_error` is the Monte
/// Carlo standard error (0 on exact paths); `tolerance` absorbs floating
/// point rounding and, for grid-certified coverings, the dilation slack.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub name: String,
    pub relation: Relation,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    #[serde(rename = "stderr")]
    pub stat_error: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub metadata: BTreeMap<String, Value>,
}

/// Relative rounding allowance for exact arithmetic paths.
pub const ROUNDING_TOL: f64 = 1e-9;

impl VerificationReport {
    pub fn new(
        name: impl Into<String>,
        relation: Relation,
        lhs: f64,
        rhs: f64,
        stat_error: f64,
        tolerance: f64,
    ) -> Self {
        let margin = match relation {
            Relation::AtMost => rhs - lhs,
            Relation::AtLeast => lhs - rhs,
            Relation::Equal => -(lhs - rhs).abs(),
        };
        VerificationReport {
            name: name.into(),
            relation,
            lhs,
            rhs,
            margin,
            stat_error,
            tolerance,
            pass: margin >= -(3.0 * stat_error + tolerance),
            metadata: BTreeMap::new(),
        }
    }

    pub fn with(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.metadata.insert(key.to_string(), value.into());
        self
    }

    /// `margin / |rhs|`.
    pub fn relative_margin(&self) -> f64 {
        self.margin / self.rhs.abs().max(f64::MIN_POSITIVE)
    }
}

/// `ROUNDING_TOL · (1 + |a| + |b|)`.
pub fn rounding_tolerance(a: f64, b: f64) -> f64 {
    ROUNDING_TOL * (1.0 + a.abs() + b.abs())
}
