//! Polyline curves, point-to-hull distances, the covering predicate
//! `K ⊆ conv(γ)`, and planar hull utilities.

use serde::{Deserialize, Serialize};

use crate::bodies::{to_planar, ConvexBody};
use crate::directions::DirectionGrid;
use crate::error::{Error, Result};
use crate::grassmann::PlaneFrame;
use crate::linalg::{self, dot};

/// Iteration cap for [`hull_distance`].
pub const HULL_MAX_ITER: usize = 100_000;

/// Barycentric weights at or below this are treated as zero.
const WEIGHT_EPS: f64 = 1e-14;
/// Solver tolerance for distances inside covering tests.
pub const HULL_TOL: f64 = 1e-12;

/// An ordered sequence of points in `R^n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polyline {
    points: Vec<Vec<f64>>,
}

impl Polyline {
    pub fn new(points: Vec<Vec<f64>>) -> Result<Self> {
        let n = points
            .first()
            .map(Vec::len)
            .ok_or_else(|| Error::invalid("polyline needs at least one point"))?;
        if n == 0 {
            return Err(Error::invalid("zero-dimensional points"));
        }
        for p in &points {
            if p.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: p.len(),
                });
            }
            if p.iter().any(|x| !x.is_finite()) {
                return Err(Error::invalid("non-finite curve coordinate"));
            }
        }
        Ok(Polyline { points })
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn into_points(self) -> Vec<Vec<f64>> {
        self.points
    }

    pub fn dimension(&self) -> usize {
        self.points[0].len()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Sum of Euclidean edge lengths.
    pub fn length(&self) -> f64 {
        self.points
            .windows(2)
            .map(|w| linalg::dist(&w[0], &w[1]))
            .sum()
    }

    pub fn bounding_box(&self) -> (Vec<f64>, Vec<f64>) {
        let n = self.dimension();
        let mut lo = vec![f64::INFINITY; n];
        let mut hi = vec![f64::NEG_INFINITY; n];
        for p in &self.points {
            for i in 0..n {
                lo[i] = lo[i].min(p[i]);
                hi[i] = hi[i].max(p[i]);
            }
        }
        (lo, hi)
    }

    /// `h(conv(γ), u)`.
    pub fn support(&self, u: &[f64]) -> f64 {
        self.points
            .iter()
            .map(|p| dot(p, u))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// `t·γ + v`.
    pub fn similar(&self, t: f64, v: &[f64]) -> Polyline {
        Polyline {
            points: self
                .points
                .iter()
                .map(|p| p.iter().zip(v).map(|(a, b)| t * a + b).collect())
                .collect(),
        }
    }

    /// Orthogonal projection onto a 2-plane, in frame coordinates.
    pub fn project(&self, frame: &PlaneFrame) -> Result<Polyline> {
        if frame.ambient_dimension() != self.dimension() {
            return Err(Error::DimensionMismatch {
                expected: self.dimension(),
                found: frame.ambient_dimension(),
            });
        }
        Ok(Polyline {
            points: self.points.iter().map(|p| frame.project(p).to_vec()).collect(),
        })
    }
}

/// Length of a polyline.
pub fn length(c: &Polyline) -> f64 {
    c.length()
}

/// Pointwise projection of `c` onto the plane `frame`.
pub fn project_curve(c: &Polyline, frame: &PlaneFrame) -> Result<Polyline> {
    c.project(frame)
}

/// Outcome of a point-to-hull distance query.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HullMembershipResult {
    pub inside: bool,
    pub distance: f64,
    /// Nearest point of the hull found.
    pub witness: Vec<f64>,
}

/// Distance from `q` to `conv(c)`.
pub fn hull_distance(q: &[f64], c: &Polyline, tol: f64) -> Result<HullMembershipResult> {
    hull_distance_points(q, c.points(), tol)
}

/// Distance from `q` to the convex hull of `points` by Wolfe's minimum-norm
/// point iteration on the translated set `points - q`.
///
/// Each major step adds the point minimizing `<x, p>` to the active set and
/// re-solves the affine minimum-norm problem on it, dropping points whose
/// barycentric weight would turn negative. Stops once the duality gap
/// `|x| - min_p <x,p>/|x|` falls below `tol·(1+|q|)` or `|x| ≤ tol`.
pub fn hull_distance_points(
    q: &[f64],
    points: &[Vec<f64>],
    tol: f64,
) -> Result<HullMembershipResult> {
    if !(tol > 0.0) {
        return Err(Error::invalid("hull tolerance must be positive"));
    }
    let n = q.len();
    if points.is_empty() {
        return Err(Error::invalid("empty point set"));
    }
    if let Some(p) = points.iter().find(|p| p.len() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: p.len(),
        });
    }
    let shifted: Vec<Vec<f64>> = points.iter().map(|p| linalg::sub(p, q)).collect();
    let stop = tol * (1.0 + linalg::norm(q));
    let finish = |x: Vec<f64>| {
        let distance = linalg::norm(&x);
        HullMembershipResult {
            inside: distance <= tol,
            distance,
            witness: linalg::add(&x, q),
        }
    };

    let i0 = (0..shifted.len())
        .min_by(|&a, &b| dot(&shifted[a], &shifted[a]).total_cmp(&dot(&shifted[b], &shifted[b])))
        .unwrap();
    let mut active = vec![i0];
    let mut lambda = vec![1.0];
    let mut x = shifted[i0].clone();

    for _ in 0..HULL_MAX_ITER {
        let xx = dot(&x, &x);
        let xn = xx.sqrt();
        if xn <= tol {
            return Ok(finish(x));
        }
        let (j, v) = shifted
            .iter()
            .enumerate()
            .map(|(i, p)| (i, dot(&x, p)))
            .fold((0, f64::INFINITY), |a, b| if b.1 < a.1 { b } else { a });
        if (xx - v) / xn <= stop || active.contains(&j) {
            return Ok(finish(x));
        }
        active.push(j);
        lambda.push(0.0);

        loop {
            let Some(alpha) = affine_min_norm(&shifted, &active) else {
                // numerically dependent active set: keep the last iterate
                return Ok(finish(x));
            };
            if alpha.iter().all(|&a| a > WEIGHT_EPS) {
                lambda = alpha;
                break;
            }
            let mut theta = f64::INFINITY;
            let mut blocking = 0;
            for (k, (l, a)) in lambda.iter().zip(&alpha).enumerate() {
                if *a <= WEIGHT_EPS && l - a > 0.0 {
                    let t = l / (l - a);
                    if t < theta {
                        theta = t;
                        blocking = k;
                    }
                }
            }
            if !theta.is_finite() {
                theta = 1.0;
                blocking = (0..alpha.len())
                    .min_by(|&a, &b| alpha[a].total_cmp(&alpha[b]))
                    .unwrap();
            }
            if theta == 0.0 && blocking == active.len() - 1 {
                // the entering point cannot take positive weight: stalled
                return Ok(finish(x));
            }
            for (l, a) in lambda.iter_mut().zip(&alpha) {
                *l = (1.0 - theta) * *l + theta * a;
            }
            lambda[blocking] = 0.0;
            let (kept_active, kept_lambda): (Vec<usize>, Vec<f64>) = active
                .iter()
                .zip(&lambda)
                .filter(|(_, &l)| l > WEIGHT_EPS)
                .map(|(&i, &l)| (i, l))
                .unzip();
            let total: f64 = kept_lambda.iter().sum();
            active = kept_active;
            lambda = kept_lambda.into_iter().map(|l| l / total).collect();
        }
        x = vec![0.0; n];
        for (&i, &l) in active.iter().zip(&lambda) {
            linalg::axpy(&mut x, l, &shifted[i]);
        }
    }
    Err(Error::NonConvergence {
        iterations: HULL_MAX_ITER,
        best_bound: linalg::norm(&x),
    })
}

/// Weights `α` (summing to 1) of the minimum-norm point of the affine hull
/// of `pts[active]`. `None` if the active set is numerically dependent.
fn affine_min_norm(pts: &[Vec<f64>], active: &[usize]) -> Option<Vec<f64>> {
    let m = active.len() - 1;
    if m == 0 {
        return Some(vec![1.0]);
    }
    let p0 = &pts[active[0]];
    let d: Vec<Vec<f64>> = active[1..].iter().map(|&i| linalg::sub(&pts[i], p0)).collect();
    let mut gram = vec![0.0; m * m];
    let mut rhs = vec![0.0; m];
    for a in 0..m {
        for b in a..m {
            let g = dot(&d[a], &d[b]);
            gram[a * m + b] = g;
            gram[b * m + a] = g;
        }
        rhs[a] = -dot(&d[a], p0);
    }
    linalg::solve_dense(&mut gram, &mut rhs, m, 1e-13)?;
    let mut alpha = Vec::with_capacity(m + 1);
    alpha.push(1.0 - rhs.iter().sum::<f64>());
    alpha.extend(rhs);
    alpha.iter().all(|a| a.is_finite()).then_some(alpha)
}

/// How a covering answer was certified.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum CoverCertificate {
    /// Every vertex of the polytope was tested against the hull.
    Exact,
    /// Support dominance `h(K,u) ≤ h(conv γ, u) + tol` on a direction grid.
    Grid { directions: usize, resolution: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverReport {
    pub covered: bool,
    /// Largest violation found: a vertex distance to the hull (polytopes)
    /// or a support gap `h(K,u) - h(conv γ,u)` (grid); may be negative.
    pub worst_gap: f64,
    /// The offending vertex or direction.
    pub worst_at: Vec<f64>,
    pub certificate: CoverCertificate,
}

/// Checks `K ⊆ conv(c)` up to `tol`.
pub fn covers(k: &ConvexBody, c: &Polyline, tol: f64) -> Result<bool> {
    Ok(cover_report(k, c, tol)?.covered)
}

pub fn cover_report(k: &ConvexBody, c: &Polyline, tol: f64) -> Result<CoverReport> {
    if k.dimension() != c.dimension() {
        return Err(Error::DimensionMismatch {
            expected: k.dimension(),
            found: c.dimension(),
        });
    }
    match k {
        ConvexBody::Polytope(p) => {
            let mut worst = (f64::NEG_INFINITY, p.vertices()[0].clone());
            for v in p.vertices() {
                let r = hull_distance(v, c, HULL_TOL)?;
                if r.distance > worst.0 {
                    worst = (r.distance, v.clone());
                }
            }
            Ok(CoverReport {
                covered: worst.0 <= tol,
                worst_gap: worst.0,
                worst_at: worst.1,
                certificate: CoverCertificate::Exact,
            })
        }
        _ => {
            let grid = DirectionGrid::standard(k.dimension());
            Ok(grid_cover_report(k, c, tol, &grid))
        }
    }
}

/// Support-dominance covering test on an explicit grid.
pub fn grid_cover_report(k: &ConvexBody, c: &Polyline, tol: f64, grid: &DirectionGrid) -> CoverReport {
    let (gap, at) = grid
        .iter()
        .map(|u| (k.support_unchecked(u) - c.support(u), u))
        .fold((f64::NEG_INFINITY, grid.directions[0].as_slice()), |a, b| {
            if b.0 > a.0 {
                b
            } else {
                a
            }
        });
    CoverReport {
        covered: gap <= tol,
        worst_gap: gap,
        worst_at: at.to_vec(),
        certificate: CoverCertificate::Grid {
            directions: grid.len(),
            resolution: grid.resolution,
        },
    }
}

fn cross(o: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Convex hull by Andrew's monotone chain, counterclockwise, collinear
/// points dropped. Returns one point for a one-point set and the two
/// extremes for a collinear set.
pub fn hull_2d(points: &[[f64; 2]]) -> Vec<[f64; 2]> {
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    pts.dedup();
    if pts.len() <= 2 {
        return pts;
    }
    let mut hull: Vec<[f64; 2]> = Vec::with_capacity(2 * pts.len());
    for &p in pts.iter() {
        while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    let lower_len = hull.len() + 1;
    for &p in pts.iter().rev().skip(1) {
        while hull.len() >= lower_len && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    hull.pop();
    hull
}

/// Perimeter of the convex hull of `points`. A collinear set counts its
/// segment twice; a single point has perimeter 0.
pub fn perimeter_2d(points: &[[f64; 2]]) -> f64 {
    let hull = hull_2d(points);
    if hull.len() < 2 {
        return 0.0;
    }
    (0..hull.len())
        .map(|i| {
            let a = hull[i];
            let b = hull[(i + 1) % hull.len()];
            (a[0] - b[0]).hypot(a[1] - b[1])
        })
        .sum()
}

/// [`perimeter_2d`] for `Vec<f64>` points.
pub fn perimeter_of_points(points: &[Vec<f64>]) -> f64 {
    perimeter_2d(&to_planar(points))
}
