//! Simulated-annealing search for short polylines whose convex hull covers
//! a body.
//!
//! The objective is `length(γ) + λ·deficit(γ)` where `deficit` is the
//! largest support gap `h(K,u) − h(conv γ,u)` on a coarse direction grid and
//! `λ` runs through an increasing penalty schedule. Candidates are repaired
//! to feasibility and re-verified on the full covering test before they can
//! become the incumbent, so a returned curve always covers `K`.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bodies::{circumscribed_polygon, ConvexBody};
use crate::constants;
use crate::curves::{self, CoverCertificate, CoverReport, Polyline};
use crate::directions::DirectionGrid;
use crate::error::{Error, Result};
use crate::inequalities::{centroid, inner_radius};
use crate::linalg::{self, dot};
use crate::rng::{self, Domain};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    pub vertex_count: usize,
    pub restarts: usize,
    pub anneal_steps: usize,
    pub initial_temperature: f64,
    pub cooling_rate: f64,
    pub penalty_weight_schedule: Vec<f64>,
    pub covering_tol: f64,
    pub seed: u64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            vertex_count: 24,
            restarts: 8,
            anneal_steps: 10_000,
            initial_temperature: 0.2,
            cooling_rate: 0.9993,
            penalty_weight_schedule: vec![4.0, 16.0, 64.0, 256.0],
            covering_tol: 1e-9,
            seed: 0,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.vertex_count < 2 {
            return Err(Error::invalid("vertex_count must be >= 2"));
        }
        if self.restarts < 1 {
            return Err(Error::invalid("restarts must be >= 1"));
        }
        if !(self.initial_temperature > 0.0) {
            return Err(Error::invalid("initial_temperature must be positive"));
        }
        if !(self.cooling_rate > 0.0 && self.cooling_rate < 1.0) {
            return Err(Error::invalid("cooling_rate must lie in (0, 1)"));
        }
        let s = &self.penalty_weight_schedule;
        if s.is_empty() || s.iter().any(|w| !(*w > 0.0)) || s.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid("penalty schedule must be positive and strictly increasing"));
        }
        if !(self.covering_tol > 0.0) {
            return Err(Error::invalid("covering_tol must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptResult {
    pub best_curve: Polyline,
    pub best_length: f64,
    pub feasible: bool,
    /// `C(n)·Θ` for bodies of declared constant width.
    pub lower_bound: Option<f64>,
    pub gap: Option<f64>,
    /// Best verified length of each restart, by restart index.
    pub trace: Vec<f64>,
    pub initial_length: f64,
    pub cover: CoverReport,
    pub config: OptimizerConfig,
}

/// `max(0, largest covering violation)`: vertex-to-hull distances for
/// polytopes, support gaps on the standard grid otherwise.
pub fn covering_deficit(k: &ConvexBody, c: &Polyline, _tol: f64) -> Result<f64> {
    if k.dimension() != c.dimension() {
        return Err(Error::DimensionMismatch {
            expected: k.dimension(),
            found: c.dimension(),
        });
    }
    Ok(curves::cover_report(k, c, 0.0)?.worst_gap.max(0.0))
}

fn coarse_grid(n: usize) -> DirectionGrid {
    match n {
        2 => DirectionGrid::with_count(2, 512),
        3 => DirectionGrid::with_count(3, 1024),
        _ => DirectionGrid::with_count(n, 2048),
    }
}

/// Open polyline through the vertices of a polygon, skipping its longest
/// edge. Its hull is the polygon.
pub(crate) fn open_walk(cycle: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let m = cycle.len();
    if m < 3 {
        return cycle.to_vec();
    }
    let longest = (0..m)
        .max_by(|&a, &b| {
            linalg::dist(&cycle[a], &cycle[(a + 1) % m]).total_cmp(&linalg::dist(&cycle[b], &cycle[(b + 1) % m]))
        })
        .unwrap();
    (1..=m).map(|j| cycle[(longest + j) % m].clone()).collect()
}

/// Inserts midpoints into the longest edges until there are `count` points.
fn pad_to(mut pts: Vec<Vec<f64>>, count: usize) -> Vec<Vec<f64>> {
    while pts.len() < count {
        let j = (0..pts.len() - 1)
            .max_by(|&a, &b| linalg::dist(&pts[a], &pts[a + 1]).total_cmp(&linalg::dist(&pts[b], &pts[b + 1])))
            .unwrap();
        let mid = linalg::scale(&linalg::add(&pts[j], &pts[j + 1]), 0.5);
        pts.insert(j + 1, mid);
    }
    pts
}

/// Feasible starting curve with `v` vertices.
///
/// Planar polytopes walk the hull boundary (when it has at most `v`
/// vertices); other planar bodies walk a circumscribed polygon. In higher
/// dimensions, polygons in orthogonal coordinate planes (three in `R^3`,
/// `⌈n/2⌉` otherwise) about the circumscribed ball, enlarged so that the
/// hull contains that ball.
pub fn initial_curve(k: &ConvexBody, v: usize, phase: f64) -> Result<Polyline> {
    let n = k.dimension();
    if n == 2 {
        if let ConvexBody::Polytope(p) = k {
            let hull: Vec<Vec<f64>> = curves::hull_2d(&crate::bodies::to_planar(p.vertices()))
                .into_iter()
                .map(|q| q.to_vec())
                .collect();
            if hull.len() <= v {
                return Polyline::new(pad_to(open_walk(&hull), v.max(hull.len())));
            }
        }
        let m = v.max(3);
        return Polyline::new(open_walk(&circumscribed_polygon(k, m, phase)));
    }
    let (lo, hi) = k.bounding_box();
    let center: Vec<f64> = lo.iter().zip(&hi).map(|(a, b)| 0.5 * (a + b)).collect();
    let radius = k.circumradius() * (1.0 + 1e-6);
    let planes: Vec<(usize, usize)> = if n == 3 {
        vec![(0, 1), (1, 2), (2, 0)]
    } else {
        (0..n.div_ceil(2)).map(|i| (2 * i % n, (2 * i + 1) % n)).collect()
    };
    // max over the planes of |P u| is at least √(2/3) for n = 3 and
    // 1/√⌈n/2⌉ in general
    let lift = if n == 3 { 1.5f64.sqrt() } else { (planes.len() as f64).sqrt() };
    let per_loop = (v / planes.len()).max(3);
    let s = radius * lift / (std::f64::consts::PI / per_loop as f64).cos();
    let mut pts = Vec::with_capacity(per_loop * planes.len());
    for &(a, b) in &planes {
        for j in 0..per_loop {
            let t = phase + std::f64::consts::TAU * j as f64 / per_loop as f64;
            let mut p = center.clone();
            p[a] += s * t.cos();
            p[b] += s * t.sin();
            pts.push(p);
        }
    }
    Polyline::new(pts)
}

/// Open polyline along a tennis-ball seam about the circumscribed ball of
/// a body in `R^3`, scaled so that its hull contains that ball.
pub fn seam_curve(k: &ConvexBody, v: usize, phase: f64) -> Result<Polyline> {
    if k.dimension() != 3 {
        return Err(Error::invalid("seam curves live in R^3"));
    }
    let v = v.max(4);
    let template: Vec<Vec<f64>> = (0..v)
        .map(|j| {
            let t = phase + std::f64::consts::TAU * j as f64 / v as f64;
            vec![
                0.5 * (t.cos() + (3.0 * t).cos()),
                0.5 * (t.sin() - (3.0 * t).sin()),
                (2.0 * t).sin(),
            ]
        })
        .collect();
    let grid = DirectionGrid::standard(3);
    let kappa = grid
        .iter()
        .map(|u| template.iter().map(|p| dot(p, u)).fold(f64::NEG_INFINITY, f64::max))
        .fold(f64::INFINITY, f64::min);
    let (lo, hi) = k.bounding_box();
    let center: Vec<f64> = lo.iter().zip(&hi).map(|(a, b)| 0.5 * (a + b)).collect();
    let s = k.circumradius() * (1.0 + 1e-6) / kappa;
    let closed = template
        .iter()
        .map(|p| linalg::add(&center, &linalg::scale(p, s)))
        .collect::<Vec<_>>();
    Polyline::new(open_walk(&closed))
}

/// Annealing state with cached supports on the coarse grid.
struct State<'a> {
    grid: &'a DirectionGrid,
    hk: &'a [f64],
    pts: Vec<Vec<f64>>,
    /// `dots[g * v + j] = <p_j, u_g>`.
    dots: Vec<f64>,
    hc: Vec<f64>,
    arg: Vec<usize>,
    length: f64,
}

impl<'a> State<'a> {
    fn new(grid: &'a DirectionGrid, hk: &'a [f64], pts: Vec<Vec<f64>>) -> Self {
        let v = pts.len();
        let g = grid.len();
        let mut dots = vec![0.0; g * v];
        let mut hc = vec![f64::NEG_INFINITY; g];
        let mut arg = vec![0; g];
        for (gi, u) in grid.iter().enumerate() {
            for (j, p) in pts.iter().enumerate() {
                let d = dot(p, u);
                dots[gi * v + j] = d;
                if d > hc[gi] {
                    hc[gi] = d;
                    arg[gi] = j;
                }
            }
        }
        let length = Polyline::new(pts.clone()).map(|c| c.length()).unwrap_or(0.0);
        State { grid, hk, pts, dots, hc, arg, length }
    }

    fn deficit(&self) -> f64 {
        self.hk
            .iter()
            .zip(&self.hc)
            .map(|(k, c)| k - c)
            .fold(0.0, f64::max)
    }

    fn edge_len(&self, j: usize, p: &[f64]) -> f64 {
        let mut s = 0.0;
        if j > 0 {
            s += linalg::dist(&self.pts[j - 1], p);
        }
        if j + 1 < self.pts.len() {
            s += linalg::dist(p, &self.pts[j + 1]);
        }
        s
    }

    /// Moves vertex `j` to `p`, returning the previous position.
    fn apply(&mut self, j: usize, p: Vec<f64>) -> Vec<f64> {
        let v = self.pts.len();
        self.length += self.edge_len(j, &p) - self.edge_len(j, &self.pts[j]);
        let old = std::mem::replace(&mut self.pts[j], p);
        for (gi, u) in self.grid.iter().enumerate() {
            let d = dot(&self.pts[j], u);
            let row = &mut self.dots[gi * v..(gi + 1) * v];
            row[j] = d;
            if d >= self.hc[gi] {
                self.hc[gi] = d;
                self.arg[gi] = j;
            } else if self.arg[gi] == j {
                let (a, h) = row
                    .iter()
                    .enumerate()
                    .fold((0, f64::NEG_INFINITY), |acc, (i, &x)| if x > acc.1 { (i, x) } else { acc });
                self.hc[gi] = h;
                self.arg[gi] = a;
            }
        }
        old
    }
}

/// Makes `c` cover `K`: first pushes supporting vertices outward along the
/// worst violation, then falls back to dilating about the centroid.
/// Returns the curve and its covering report, or the last attempt.
fn repair(k: &ConvexBody, c: Polyline, tol: f64) -> Result<(Polyline, CoverReport)> {
    let n = k.dimension();
    let mut pts = c.into_points();
    for _ in 0..32 {
        let curve = Polyline::new(pts.clone())?;
        let rep = curves::cover_report(k, &curve, tol)?;
        if rep.covered {
            return Ok((curve, rep));
        }
        // direction of the violation
        let u = match rep.certificate {
            CoverCertificate::Exact => {
                let w = curves::hull_distance(&rep.worst_at, &curve, curves::HULL_TOL)?.witness;
                linalg::normalized(&linalg::sub(&rep.worst_at, &w))
            }
            CoverCertificate::Grid { .. } => Some(rep.worst_at.clone()),
        };
        let Some(u) = u else { break };
        let j = (0..pts.len())
            .max_by(|&a, &b| dot(&pts[a], &u).total_cmp(&dot(&pts[b], &u)))
            .unwrap();
        linalg::axpy(&mut pts[j], rep.worst_gap + tol, &u);
    }
    let mut curve = Polyline::new(pts)?;
    let fine = DirectionGrid::standard(n);
    for _ in 0..8 {
        let rep = curves::cover_report(k, &curve, tol)?;
        if rep.covered {
            return Ok((curve, rep));
        }
        let rho = inner_radius(&curve, &fine);
        if !(rho > 0.0) {
            return Err(Error::Infeasible {
                deficit: rep.worst_gap,
                length: curve.length(),
                candidate: curve.into_points(),
            });
        }
        let x0 = centroid(curve.points());
        let t = 1.0 + (rep.worst_gap + tol) / rho;
        let shift = linalg::scale(&x0, 1.0 - t);
        curve = curve.similar(t, &shift);
    }
    let rep = curves::cover_report(k, &curve, tol)?;
    if rep.covered {
        Ok((curve, rep))
    } else {
        Err(Error::Infeasible {
            deficit: rep.worst_gap,
            length: curve.length(),
            candidate: curve.into_points(),
        })
    }
}

struct RestartOutcome {
    best: Option<(Polyline, CoverReport)>,
    least_infeasible: (f64, f64, Vec<Vec<f64>>),
}

fn run_restart(
    k: &ConvexBody,
    cfg: &OptimizerConfig,
    grid: &DirectionGrid,
    hk: &[f64],
    index: usize,
) -> Result<RestartOutcome> {
    let mut r: ChaCha8Rng = rng::substream(cfg.seed, Domain::Restart, index as u64);
    let phase = if index == 0 { 0.0 } else { r.random_range(0.0..std::f64::consts::TAU) };
    let init = if k.dimension() == 3 && index % 2 == 1 {
        seam_curve(k, cfg.vertex_count, phase)?
    } else {
        initial_curve(k, cfg.vertex_count, phase)?
    };
    let scale = k.circumradius().max(f64::MIN_POSITIVE);

    let mut best: Option<(Polyline, CoverReport)> = None;
    let mut least_infeasible = (f64::INFINITY, f64::INFINITY, Vec::new());
    let mut consider = |c: Polyline| -> Result<()> {
        match repair(k, c, cfg.covering_tol) {
            Ok((c, rep)) => {
                if best.as_ref().is_none_or(|(b, _)| c.length() < b.length()) {
                    best = Some((c, rep));
                }
            }
            Err(Error::Infeasible { deficit, length, candidate }) => {
                if deficit < least_infeasible.0 {
                    least_infeasible = (deficit, length, candidate);
                }
            }
            Err(e) => return Err(e),
        }
        Ok(())
    };
    consider(init.clone())?;

    let mut state = State::new(grid, hk, init.into_points());
    let v = state.pts.len();
    let stages = cfg.penalty_weight_schedule.len();
    let per_stage = cfg.anneal_steps.div_ceil(stages).max(1);
    let mut temperature = cfg.initial_temperature;
    let mut step = 0;
    for &lambda in &cfg.penalty_weight_schedule {
        let mut objective = state.length + lambda * state.deficit();
        let mut stage_best: Option<(f64, Vec<Vec<f64>>)> = None;
        for _ in 0..per_stage {
            if step >= cfg.anneal_steps {
                break;
            }
            step += 1;
            let j = r.random_range(0..v);
            let sigma = temperature * scale;
            let p: Vec<f64> = state.pts[j]
                .iter()
                .map(|x| {
                    let z: f64 = StandardNormal.sample(&mut r);
                    x + sigma * z
                })
                .collect();
            let old = state.apply(j, p);
            let deficit = state.deficit();
            let candidate = state.length + lambda * deficit;
            let delta = candidate - objective;
            let accept = delta <= 0.0 || r.random::<f64>() < (-delta / (temperature * scale)).exp();
            if accept {
                objective = candidate;
                if deficit <= cfg.covering_tol && stage_best.as_ref().is_none_or(|(l, _)| state.length < *l) {
                    stage_best = Some((state.length, state.pts.clone()));
                }
            } else {
                state.apply(j, old);
            }
            temperature *= cfg.cooling_rate;
        }
        if let Some((_, pts)) = stage_best {
            consider(Polyline::new(pts)?)?;
        }
        consider(Polyline::new(state.pts.clone())?)?;
    }
    Ok(RestartOutcome { best, least_infeasible })
}

/// Searches for a short curve `γ` with `K ⊆ conv(γ)`.
pub fn optimize_covering_curve(k: &ConvexBody, cfg: &OptimizerConfig) -> Result<OptResult> {
    cfg.validate()?;
    if !(k.diameter() > 0.0) {
        return Err(Error::invalid("body must have positive diameter"));
    }
    let n = k.dimension();
    let grid = coarse_grid(n);
    let hk: Vec<f64> = grid.iter().map(|u| k.support_unchecked(u)).collect();
    let initial_length = initial_curve(k, cfg.vertex_count, 0.0)?.length();

    let outcomes: Vec<RestartOutcome> = (0..cfg.restarts)
        .into_par_iter()
        .map(|i| run_restart(k, cfg, &grid, &hk, i))
        .collect::<Result<_>>()?;

    let trace: Vec<f64> = outcomes
        .iter()
        .map(|o| o.best.as_ref().map_or(f64::INFINITY, |(c, _)| c.length()))
        .collect();
    let best = outcomes
        .iter()
        .enumerate()
        .filter_map(|(i, o)| o.best.as_ref().map(|b| (i, b)))
        .min_by(|a, b| a.1 .0.length().total_cmp(&b.1 .0.length()).then(a.0.cmp(&b.0)));
    let Some((_, (curve, cover))) = best else {
        let worst = outcomes
            .into_iter()
            .map(|o| o.least_infeasible)
            .min_by(|a, b| a.0.total_cmp(&b.0))
            .expect("at least one restart");
        return Err(Error::Infeasible {
            deficit: worst.0,
            length: worst.1,
            candidate: worst.2,
        });
    };
    let lower_bound = match k.declared_width() {
        Some(theta) => Some(constants::theorem3_constant(n)? * theta),
        None => None,
    };
    let best_length = curve.length();
    Ok(OptResult {
        best_curve: curve.clone(),
        best_length,
        feasible: cover.covered,
        lower_bound,
        gap: lower_bound.map(|lb| best_length - lb),
        trace,
        initial_length,
        cover: cover.clone(),
        config: cfg.clone(),
    })
}

/// Empirical upper end of the constant-width bracket.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalBound {
    pub dimension: usize,
    /// `min best_length/Θ` over the family.
    pub upper: f64,
    /// `C(n)`.
    pub lower: f64,
    pub per_body: Vec<f64>,
}

/// Minimum over `family` of `best_length/Θ`, next to `C(n)`.
pub fn empirical_c_upper_bound(family: &[ConvexBody], cfg: &OptimizerConfig) -> Result<EmpiricalBound> {
    let first = family.first().ok_or_else(|| Error::invalid("empty body family"))?;
    let n = first.dimension();
    if !(2..=3).contains(&n) {
        return Err(Error::invalid("constant-width families are available for n = 2, 3"));
    }
    let mut per_body = Vec::with_capacity(family.len());
    for k in family {
        if k.dimension() != n {
            return Err(Error::DimensionMismatch { expected: n, found: k.dimension() });
        }
        let theta = k
            .declared_width()
            .ok_or_else(|| Error::invalid("family members need a declared constant width"))?;
        per_body.push(optimize_covering_curve(k, cfg)?.best_length / theta);
    }
    Ok(EmpiricalBound {
        dimension: n,
        upper: per_body.iter().copied().fold(f64::INFINITY, f64::min),
        lower: constants::theorem3_constant(n)?,
        per_body,
    })
}
