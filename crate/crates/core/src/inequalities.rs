//! Verifiers for the length lower bounds of covering curves, instance
//! campaigns, and strictness probes.
//!
//! All three bounds take a body `K` and a curve `γ` with `K ⊆ conv(γ)`:
//!
//! * plane: `length(γ) ≥ per(K) − diam(K)`;
//! * `R^n`: `N(K) ≤ A(n)·length(γ) + B(n)·diam(K)`;
//! * constant width `Θ`: `length(γ) ≥ C(n)·Θ`.
//!
//! When covering is only grid-certified, the report's tolerance carries the
//! dilation slack: if `h(K,·) ≤ h(conv γ,·) + δ` and `conv γ` contains a
//! ball of radius `ρ` about `x₀`, the curve `x₀ + (1+δ/ρ)(γ − x₀)` covers
//! `K`, so lengths may be off by the factor `1 + δ/ρ`.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bodies::{ConvexBody, SphereQuadrature};
use crate::constants;
use crate::curves::{self, CoverCertificate, CoverReport, Polyline};
use crate::directions::DirectionGrid;
use crate::error::{Error, Result};
use crate::linalg;
use crate::report::{rounding_tolerance, Relation, VerificationReport};
use crate::rng::{self, Domain};

pub use crate::report::VerificationReport as Report;

/// Directions used for the constant-width certificate.
pub const WIDTH_CERTIFICATE_SAMPLES: usize = 10_000;

/// Checks the covering hypothesis and returns its report plus the
/// relative dilation `δ/ρ` needed to make it exact (0 when exact).
fn require_cover(k: &ConvexBody, c: &Polyline, tol: f64) -> Result<(CoverReport, f64)> {
    if !(tol >= 0.0) {
        return Err(Error::invalid("covering tolerance must be >= 0"));
    }
    let rep = curves::cover_report(k, c, tol)?;
    if !rep.covered {
        return Err(Error::NotCovered(format!(
            "gap {:e} > tol {tol:e} at {:?}",
            rep.worst_gap, rep.worst_at
        )));
    }
    let dilation = match rep.certificate {
        CoverCertificate::Exact => 0.0,
        CoverCertificate::Grid { .. } if rep.worst_gap <= 0.0 => 0.0,
        CoverCertificate::Grid { .. } => {
            let rho = inner_radius(c, &DirectionGrid::standard(c.dimension()));
            if rho > 0.0 {
                rep.worst_gap / rho
            } else {
                f64::INFINITY
            }
        }
    };
    Ok((rep, dilation))
}

/// `min_u h(conv γ, u) − <x₀,u>` over `grid`, `x₀` the mean of the points:
/// the radius of a ball about `x₀` inside `conv γ` (up to the grid).
pub fn inner_radius(c: &Polyline, grid: &DirectionGrid) -> f64 {
    let x0 = centroid(c.points());
    grid.iter()
        .map(|u| c.support(u) - linalg::dot(&x0, u))
        .fold(f64::INFINITY, f64::min)
}

pub(crate) fn centroid(points: &[Vec<f64>]) -> Vec<f64> {
    let n = points[0].len();
    let mut x0 = vec![0.0; n];
    for p in points {
        linalg::axpy(&mut x0, 1.0 / points.len() as f64, p);
    }
    x0
}

fn with_cover(r: VerificationReport, rep: &CoverReport, dilation: f64) -> VerificationReport {
    let r = r.with("cover_gap", rep.worst_gap).with("dilation", dilation);
    match rep.certificate {
        CoverCertificate::Exact => r.with("cover", "exact"),
        CoverCertificate::Grid { directions, resolution } => r
            .with("cover", "grid")
            .with("grid_directions", directions)
            .with("grid_resolution", resolution),
    }
}

/// Plane bound `length(γ) ≥ per(K) − diam(K)`.
pub fn verify_theorem1(k: &ConvexBody, c: &Polyline, tol: f64) -> Result<VerificationReport> {
    if k.dimension() != 2 || c.dimension() != 2 {
        return Err(Error::invalid("the planar bound needs a body and curve in R^2"));
    }
    let (rep, dilation) = require_cover(k, c, tol)?;
    let length = c.length();
    let per = k.perimeter()?;
    let diam = k.diameter_estimate();
    let rhs = per - diam.value;
    let tolerance = rounding_tolerance(length, per) + dilation * length;
    let r = VerificationReport::new("theorem1", Relation::AtLeast, length, rhs, 0.0, tolerance)
        .with("dimension", 2)
        .with("perimeter", per)
        .with("diameter", diam.value)
        .with("diameter_exact", diam.exact)
        .with("cover_tol", tol);
    Ok(with_cover(r, &rep, dilation))
}

/// `N(K) ≤ A(n)·length(γ) + B(n)·diam(K)` with `N(K)` from sphere
/// quadrature; `stat_error` is the quadrature standard error.
pub fn verify_theorem2(
    k: &ConvexBody,
    c: &Polyline,
    q: &SphereQuadrature,
    tol: f64,
) -> Result<VerificationReport> {
    let n = k.dimension();
    if n < 2 {
        return Err(Error::invalid("the bound needs n >= 2"));
    }
    if c.dimension() != n {
        return Err(Error::DimensionMismatch { expected: n, found: c.dimension() });
    }
    let (rep, dilation) = require_cover(k, c, tol)?;
    let (a, b) = constants::theorem2_coefficients(n)?;
    let norm = k.norm(q)?;
    let length = c.length();
    let diam = k.diameter_estimate();
    let rhs = a * length + b * diam.value;
    let tolerance = rounding_tolerance(norm.estimate, rhs) + a * dilation * length;
    let r = VerificationReport::new("theorem2", Relation::AtMost, norm.estimate, rhs, norm.std_error, tolerance)
        .with("dimension", n)
        .with("a", a)
        .with("b", b)
        .with("length", length)
        .with("diameter", diam.value)
        .with("diameter_exact", diam.exact)
        .with("samples", q.sample_count)
        .with("seed", q.seed)
        .with("cover_tol", tol);
    Ok(with_cover(r, &rep, dilation))
}

/// `length(γ) ≥ C(n)·Θ` for a body of declared constant width `Θ`.
pub fn verify_theorem3(k: &ConvexBody, c: &Polyline, tol: f64) -> Result<VerificationReport> {
    let n = k.dimension();
    let theta = k
        .declared_width()
        .ok_or_else(|| Error::invalid("body has no declared constant width"))?;
    let deviation = k.constant_width_certificate(WIDTH_CERTIFICATE_SAMPLES, 0)?;
    let (rep, dilation) = require_cover(k, c, tol)?;
    let cn = constants::theorem3_constant(n)?;
    let length = c.length();
    let rhs = cn * theta;
    let tolerance = rounding_tolerance(length, rhs) + dilation * length;
    let r = VerificationReport::new("theorem3", Relation::AtLeast, length, rhs, 0.0, tolerance)
        .with("dimension", n)
        .with("width", theta)
        .with("constant", cn)
        .with("width_deviation", deviation)
        .with("cover_tol", tol);
    Ok(with_cover(r, &rep, dilation))
}

/// `C(n) ≥ 2(π−1)·√((n−1)/(2π))`, evaluated exactly.
pub fn verify_corollary(n: usize) -> Result<VerificationReport> {
    let c = constants::theorem3_constant(n)?;
    let lb = constants::corollary_lower_bound(n)?;
    Ok(VerificationReport::new("corollary", Relation::AtLeast, c, lb, 0.0, rounding_tolerance(c, lb))
        .with("dimension", n))
}

/// `n` points i.i.d. uniform in the unit cube of `R^dim`.
pub fn random_points(dim: usize, count: usize, seed: u64, index: u64) -> Vec<Vec<f64>> {
    let mut r = rng::substream(seed, Domain::Instance, index);
    (0..count)
        .map(|_| (0..dim).map(|_| r.random::<f64>()).collect())
        .collect()
}

/// Settings shared by the randomized campaigns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignConfig {
    pub dimension: usize,
    pub trials: usize,
    pub points: usize,
    pub sphere_samples: usize,
    pub seed: u64,
    pub tol: f64,
}

impl CampaignConfig {
    pub fn new(dimension: usize, trials: usize, seed: u64) -> Self {
        CampaignConfig {
            dimension,
            trials,
            points: 10,
            sphere_samples: 20_000,
            seed,
            tol: 1e-9,
        }
    }
}

/// One campaign row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignRow {
    pub instance_id: usize,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub stat_error: f64,
    pub pass: bool,
}

impl From<(usize, &VerificationReport)> for CampaignRow {
    fn from((i, r): (usize, &VerificationReport)) -> Self {
        CampaignRow {
            instance_id: i,
            lhs: r.lhs,
            rhs: r.rhs,
            margin: r.margin,
            stat_error: r.stat_error,
            pass: r.pass,
        }
    }
}

/// Planar bound over `K = conv(γ)` for random `γ`.
pub fn theorem1_campaign(cfg: &CampaignConfig) -> Result<Vec<VerificationReport>> {
    (0..cfg.trials)
        .into_par_iter()
        .map(|i| {
            let pts = random_points(2, cfg.points, cfg.seed, i as u64);
            let k = ConvexBody::polytope(pts.clone())?;
            let c = Polyline::new(pts)?;
            Ok(verify_theorem1(&k, &c, cfg.tol)?.with("instance", i))
        })
        .collect()
}

/// `R^n` bound over `K = conv(γ)` for random `γ`.
pub fn theorem2_campaign(cfg: &CampaignConfig) -> Result<Vec<VerificationReport>> {
    (0..cfg.trials)
        .into_par_iter()
        .map(|i| {
            let pts = random_points(cfg.dimension, cfg.points, cfg.seed, i as u64);
            let k = ConvexBody::polytope(pts.clone())?;
            let c = Polyline::new(pts)?;
            let q = SphereQuadrature::antithetic(
                cfg.sphere_samples,
                rng::derive_seed(cfg.seed, Domain::Instance, i as u64),
            )?;
            Ok(verify_theorem2(&k, &c, &q, cfg.tol)?.with("instance", i))
        })
        .collect()
}

/// Constant-width bound in the plane over random Reuleaux polygons, each
/// covered by an open path through a circumscribed polygon that skips the
/// polygon's longest edge.
pub fn theorem3_campaign(cfg: &CampaignConfig) -> Result<Vec<VerificationReport>> {
    if cfg.dimension != 2 {
        return Err(Error::invalid("random constant-width instances are planar"));
    }
    (0..cfg.trials)
        .into_par_iter()
        .map(|i| {
            let mut r = rng::substream(cfg.seed, Domain::Instance, i as u64);
            let arcs = [3, 5, 7, 9][r.random_range(0..4)];
            let width = r.random_range(0.5..2.0);
            let center = [r.random_range(-1.0..1.0), r.random_range(-1.0..1.0)];
            let rotation = r.random_range(0.0..std::f64::consts::TAU);
            let k = ConvexBody::reuleaux_polygon_at(arcs, width, center, rotation)?;
            let vertices = r.random_range(8..48);
            let phase = r.random_range(0.0..1.0);
            let cycle = crate::bodies::circumscribed_polygon(&k, vertices, phase);
            let c = Polyline::new(crate::optimizer::open_walk(&cycle))?;
            Ok(verify_theorem3(&k, &c, cfg.tol)?
                .with("instance", i)
                .with("arcs", arcs)
                .with("vertices", vertices))
        })
        .collect()
}

/// Distribution of relative margins over a campaign.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrictnessReport {
    pub name: String,
    pub instances: usize,
    pub min_relative_margin: f64,
    /// Instance attaining the minimum.
    pub argmin: usize,
    /// 0%, 5%, 50%, 95%, 100% quantiles of `margin/|rhs|`.
    pub quantiles: [f64; 5],
    /// Every margin exceeds `3·stat_error + tolerance`.
    pub strictly_positive: bool,
    pub failures: usize,
}

/// Summarizes how close a set of reports comes to equality.
pub fn strictness_probe(name: &str, reports: &[VerificationReport]) -> Result<StrictnessReport> {
    if reports.is_empty() {
        return Err(Error::invalid("strictness probe needs at least one report"));
    }
    let rel: Vec<f64> = reports.iter().map(VerificationReport::relative_margin).collect();
    let (argmin, &min) = rel
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("nonempty");
    let mut sorted = rel.clone();
    sorted.sort_by(f64::total_cmp);
    let q = |p: f64| sorted[((sorted.len() - 1) as f64 * p).round() as usize];
    Ok(StrictnessReport {
        name: name.to_string(),
        instances: reports.len(),
        min_relative_margin: min,
        argmin,
        quantiles: [q(0.0), q(0.05), q(0.5), q(0.95), q(1.0)],
        strictly_positive: reports
            .iter()
            .all(|r| r.margin > 3.0 * r.stat_error + r.tolerance),
        failures: reports.iter().filter(|r| !r.pass).count(),
    })
}

/// Half-disk of radius `radius` as the hull of `points` samples of its arc,
/// and the open arc itself: the equality configuration of the plane bound.
pub fn half_disk_equality(points: usize, radius: f64) -> Result<(ConvexBody, Polyline)> {
    if points < 2 {
        return Err(Error::invalid("need at least 2 arc samples"));
    }
    let arc: Vec<Vec<f64>> = (0..points)
        .map(|i| {
            let t = std::f64::consts::PI * i as f64 / (points - 1) as f64;
            vec![radius * t.cos(), radius * t.sin()]
        })
        .collect();
    Ok((ConvexBody::polytope(arc.clone())?, Polyline::new(arc)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn square_boundary() -> Polyline {
        Polyline::new(vec![
            vec![0.0, 0.0],
            vec![1.0, 0.0],
            vec![1.0, 1.0],
            vec![0.0, 1.0],
            vec![0.0, 0.0],
        ])
        .unwrap()
    }

    #[test]
    fn theorem1_square_boundary() {
        let k = ConvexBody::unit_cube(2).unwrap();
        let r = verify_theorem1(&k, &square_boundary(), 1e-9).unwrap();
        assert!(r.pass);
        assert_eq!(r.stat_error, 0.0);
        assert!((r.margin - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn theorem1_half_disk_is_tight() {
        let (k, c) = half_disk_equality(1000, 1.0).unwrap();
        let r = verify_theorem1(&k, &c, 1e-9).unwrap();
        assert!(r.pass);
        assert!(r.margin.abs() < 1e-9, "{r:?}");
        // and the polygon approaches the true half-disk
        assert!((r.lhs - PI).abs() < 1e-5);
    }

    #[test]
    fn theorem1_rejects_uncovered() {
        let k = ConvexBody::unit_cube(2).unwrap();
        let c = Polyline::new(vec![vec![0.0, 0.0], vec![1.0, 0.0]]).unwrap();
        assert!(matches!(verify_theorem1(&k, &c, 1e-9), Err(Error::NotCovered(_))));
        let k3 = ConvexBody::unit_cube(3).unwrap();
        assert!(verify_theorem1(&k3, &c, 1e-9).is_err());
    }

    #[test]
    fn theorem1_scaling_and_motion() {
        let pts = random_points(2, 10, 3, 0);
        let k = ConvexBody::polytope(pts.clone()).unwrap();
        let c = Polyline::new(pts).unwrap();
        let r = verify_theorem1(&k, &c, 1e-9).unwrap();
        let t = 2.5;
        let v = [0.3, -1.1];
        let rs = verify_theorem1(&k.similar(t, &v).unwrap(), &c.similar(t, &v), 1e-9).unwrap();
        assert!((rs.lhs - t * r.lhs).abs() < 1e-9);
        assert!((rs.rhs - t * r.rhs).abs() < 1e-9);
        assert_eq!(r.pass, rs.pass);
    }

    #[test]
    fn theorem2_unit_ball_with_circumscribed_curve() {
        // three orthogonal circles of radius √(3/2)/cos(π/m) cover B³
        let m = 32;
        let s = 1.5f64.sqrt() / (PI / m as f64).cos();
        let mut pts = Vec::new();
        for plane in 0..3 {
            for j in 0..m {
                let t = 2.0 * PI * j as f64 / m as f64;
                let mut p = vec![0.0; 3];
                p[plane] = s * t.cos();
                p[(plane + 1) % 3] = s * t.sin();
                pts.push(p);
            }
        }
        let c = Polyline::new(pts).unwrap();
        let k = ConvexBody::unit_ball(3).unwrap();
        let q = SphereQuadrature::antithetic(1000, 1).unwrap();
        let r = verify_theorem2(&k, &c, &q, 1e-9).unwrap();
        assert!(r.pass, "{r:?}");
        assert_eq!(r.lhs, 4.0 * PI);
        assert!((r.rhs - (PI / 2.0 * c.length() + 4.0)).abs() < 1e-12);
        assert!(c.length() >= (8.0 * PI - 8.0) / PI);
    }

    #[test]
    fn theorem2_in_plane_matches_theorem1() {
        let pts = random_points(2, 10, 5, 1);
        let k = ConvexBody::polytope(pts.clone()).unwrap();
        let c = Polyline::new(pts).unwrap();
        let q = SphereQuadrature::antithetic(200_000, 2).unwrap();
        let r1 = verify_theorem1(&k, &c, 1e-9).unwrap();
        let r2 = verify_theorem2(&k, &c, &q, 1e-9).unwrap();
        let per = r1.metadata["perimeter"].as_f64().unwrap();
        assert!((r2.lhs - per).abs() <= 3.0 * r2.stat_error);
        assert_eq!(r1.pass, r2.pass);
    }

    #[test]
    fn theorem3_reuleaux_boundary() {
        let k = ConvexBody::reuleaux_polygon(3, 1.0).unwrap();
        let c = crate::optimizer::initial_curve(&k, 64, 0.0).unwrap();
        let r = verify_theorem3(&k, &c, 1e-9).unwrap();
        assert!(r.pass);
        assert_eq!(r.rhs, PI - 1.0);
        assert!(r.lhs < PI, "{r:?}");
    }

    #[test]
    fn theorem3_disk() {
        let k = ConvexBody::ball(vec![0.0, 0.0], 0.5).unwrap();
        let pts = crate::bodies::circumscribed_polygon(&k, 256, 0.0);
        let mut closed = pts.clone();
        closed.push(pts[0].clone());
        let c = Polyline::new(closed).unwrap();
        let r = verify_theorem3(&k, &c, 1e-9).unwrap();
        assert!(r.pass);
        assert!((r.lhs - PI).abs() < 1e-3);
        assert!((r.rhs / 1.0 - (PI - 1.0)).abs() < 1e-15);
    }

    #[test]
    fn theorem3_needs_constant_width() {
        let k = ConvexBody::unit_cube(2).unwrap();
        assert!(verify_theorem3(&k, &square_boundary(), 1e-9).is_err());
    }

    #[test]
    fn corollary_holds_up_to_200() {
        for n in 2..=constants::MAX_DIM {
            assert!(verify_corollary(n).unwrap().pass, "n = {n}");
        }
    }

    #[test]
    fn small_campaigns_pass() {
        let c1 = theorem1_campaign(&CampaignConfig::new(2, 50, 1)).unwrap();
        assert!(c1.iter().all(|r| r.pass));
        let c2 = theorem2_campaign(&CampaignConfig::new(3, 10, 1)).unwrap();
        assert!(c2.iter().all(|r| r.pass));
        let c3 = theorem3_campaign(&CampaignConfig::new(2, 10, 1)).unwrap();
        assert!(c3.iter().all(|r| r.pass));
        let s = strictness_probe("t3", &c3).unwrap();
        assert!(s.strictly_positive);
        assert!(s.min_relative_margin > 0.0);
    }

    #[test]
    fn probe_detects_equality() {
        let (k, c) = half_disk_equality(1000, 1.0).unwrap();
        let r = verify_theorem1(&k, &c, 1e-9).unwrap();
        let s = strictness_probe("half-disk", &[r]).unwrap();
        assert!(!s.strictly_positive);
        assert!(s.min_relative_margin.abs() < 1e-9);
    }
}
