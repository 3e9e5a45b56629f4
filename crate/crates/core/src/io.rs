//! JSON formats for bodies and curves.
//!
//! ```json
//! {"dimension": 2, "kind": "polytope", "vertices": [[0, 0], [1, 0], [0, 1]]}
//! {"dimension": 3, "kind": "ball", "center": [0, 0, 0], "radius": 1}
//! {"dimension": 2, "kind": "reuleaux_polygon", "width": 1, "arcs": 3}
//! {"dimension": 3, "kind": "revolved_reuleaux", "width": 1, "axis": [0, 0, 1]}
//! {"dimension": 2, "points": [[0, 0], [1, 0]]}
//! ```
//!
//! `dimension` is optional in body files; when present it must match.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::bodies::{ConvexBody, OracleShape};
use crate::curves::Polyline;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BodySpec {
    Polytope {
        vertices: Vec<Vec<f64>>,
    },
    Ball {
        center: Vec<f64>,
        radius: f64,
    },
    ReuleauxPolygon {
        width: f64,
        arcs: usize,
        #[serde(default)]
        center: [f64; 2],
        #[serde(default)]
        rotation: f64,
    },
    RevolvedReuleaux {
        width: f64,
        #[serde(default)]
        center: [f64; 3],
        #[serde(default = "default_axis")]
        axis: [f64; 3],
    },
}

fn default_axis() -> [f64; 3] {
    [0.0, 0.0, 1.0]
}

impl BodySpec {
    pub fn build(&self) -> Result<ConvexBody> {
        match self {
            BodySpec::Polytope { vertices } => ConvexBody::polytope(vertices.clone()),
            BodySpec::Ball { center, radius } => ConvexBody::ball(center.clone(), *radius),
            BodySpec::ReuleauxPolygon { width, arcs, center, rotation } => {
                ConvexBody::reuleaux_polygon_at(*arcs, *width, *center, *rotation)
            }
            BodySpec::RevolvedReuleaux { width, center, axis } => {
                ConvexBody::revolved_reuleaux_at(*width, *center, *axis)
            }
        }
    }

    /// The `BodySpec` a body was built from; `None` for derived oracles.
    pub fn of(body: &ConvexBody) -> Option<BodySpec> {
        Some(match body {
            ConvexBody::Polytope(p) => BodySpec::Polytope { vertices: p.vertices().to_vec() },
            ConvexBody::Ball(b) => BodySpec::Ball { center: b.center.clone(), radius: b.radius },
            ConvexBody::Oracle(o) => match o.shape() {
                OracleShape::ReuleauxPolygon(r) => BodySpec::ReuleauxPolygon {
                    width: r.width,
                    arcs: r.arcs,
                    center: r.center,
                    rotation: r.rotation,
                },
                OracleShape::RevolvedReuleaux(r) => BodySpec::RevolvedReuleaux {
                    width: r.width,
                    center: r.center,
                    axis: r.axis,
                },
                _ => return None,
            },
        })
    }
}

/// A body file: a [`BodySpec`] with an optional dimension check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BodyFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dimension: Option<usize>,
    #[serde(flatten)]
    pub spec: BodySpec,
}

impl BodyFile {
    pub fn build(&self) -> Result<ConvexBody> {
        let body = self.spec.build()?;
        match self.dimension {
            Some(n) if n != body.dimension() => Err(Error::DimensionMismatch {
                expected: n,
                found: body.dimension(),
            }),
            _ => Ok(body),
        }
    }
}

impl From<BodySpec> for BodyFile {
    fn from(spec: BodySpec) -> Self {
        let dimension = spec.build().ok().map(|b| b.dimension());
        BodyFile { dimension, spec }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveFile {
    pub dimension: usize,
    pub points: Vec<Vec<f64>>,
}

impl CurveFile {
    pub fn build(&self) -> Result<Polyline> {
        let c = Polyline::new(self.points.clone())?;
        if c.dimension() != self.dimension {
            return Err(Error::DimensionMismatch {
                expected: self.dimension,
                found: c.dimension(),
            });
        }
        Ok(c)
    }
}

impl From<&Polyline> for CurveFile {
    fn from(c: &Polyline) -> Self {
        CurveFile {
            dimension: c.dimension(),
            points: c.points().to_vec(),
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::invalid(format!("cannot read {}: {e}", path.display())))
}

pub fn parse_body(json: &str) -> Result<ConvexBody> {
    serde_json::from_str::<BodyFile>(json)?.build()
}

pub fn parse_curve(json: &str) -> Result<Polyline> {
    serde_json::from_str::<CurveFile>(json)?.build()
}

pub fn read_body(path: impl AsRef<Path>) -> Result<ConvexBody> {
    parse_body(&read(path.as_ref())?)
}

pub fn read_curve(path: impl AsRef<Path>) -> Result<Polyline> {
    parse_curve(&read(path.as_ref())?)
}

pub fn curve_json(c: &Polyline) -> Result<String> {
    Ok(serde_json::to_string_pretty(&CurveFile::from(c))?)
}
