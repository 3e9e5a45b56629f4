//! Quermassintegrals from Monte Carlo volumes of outer parallel bodies.
//!
//! `vol(K_ε) = Σ_k C(n,k)·W_k·ε^k` is fitted by weighted least squares to
//! hit-or-miss volume estimates on a grid of ε values.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bodies::ConvexBody;
use crate::constants;
use crate::error::{Error, Result};
use crate::rng::{self, Domain};
use crate::stats::{self, Estimate};

/// Largest accepted condition number of the (column-equilibrated,
/// weighted) design matrix.
pub const MAX_CONDITION: f64 = 1e10;

/// Default volume samples per ε for `n ≤ 3`. Each further dimension needs
/// roughly 4× more for the same relative accuracy of the low coefficients.
pub const DEFAULT_SAMPLES: usize = 2_000_000;

/// Dimensions above this are accepted but slow.
pub const SLOW_DIMENSION: usize = 6;

/// Absolute slack on the hit test, covering solver round-off at `ε = 0`.
const HIT_SLACK: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuermassFit {
    pub dimension: usize,
    /// `W_0, …, W_n`.
    pub coefficients: Vec<f64>,
    /// One standard error per coefficient (0 for a pinned `W_n`).
    pub coefficient_errors: Vec<f64>,
    pub epsilon_grid: Vec<f64>,
    pub volumes: Vec<f64>,
    pub volume_stderr: Vec<f64>,
    /// Max relative deviation of the fitted polynomial from the volumes.
    pub residual: f64,
    pub condition: f64,
    /// Whether `W_n` was fixed to `ω_n` instead of fitted.
    pub pinned: bool,
    pub samples: usize,
    pub seed: u64,
}

/// Hit-or-miss estimate of `vol(K_ε)` over the bounding box of `K`
/// inflated by `ε`.
pub fn parallel_body_volume(k: &ConvexBody, eps: f64, samples: usize, seed: u64) -> Result<Estimate> {
    if !(eps >= 0.0) || !eps.is_finite() {
        return Err(Error::invalid(format!("eps must be finite and >= 0, got {eps}")));
    }
    if samples < 2 {
        return Err(Error::invalid("need at least 2 volume samples"));
    }
    let (lo, hi) = k.bounding_box();
    let lo: Vec<f64> = lo.iter().map(|x| x - eps).collect();
    let hi: Vec<f64> = hi.iter().map(|x| x + eps).collect();
    let box_volume: f64 = lo.iter().zip(&hi).map(|(a, b)| b - a).product();
    if box_volume == 0.0 {
        return Ok(Estimate::exact(0.0));
    }
    let slack = HIT_SLACK * (1.0 + k.circumradius());
    let n = k.dimension();
    let est = stats::mean_of(samples, |i| {
        let mut r = rng::substream(seed, Domain::Volume, i as u64);
        let x: Vec<f64> = (0..n).map(|j| r.random_range(lo[j]..=hi[j])).collect();
        Ok(if k.distance_to(&x)? <= eps + slack { 1.0 } else { 0.0 })
    })?;
    let floor = 1.0 / samples as f64;
    Ok(Estimate {
        estimate: box_volume * est.estimate,
        std_error: box_volume * est.std_error.max(floor),
        samples,
    })
}

/// Geometric grid of `n + 3` values from `0.1·r` to `4·r`, `r` the
/// circumradius of `K`.
pub fn default_grid(k: &ConvexBody) -> Vec<f64> {
    let r = k.circumradius().max(f64::MIN_POSITIVE);
    let m = k.dimension() + 3;
    let ratio = 40f64.powf(1.0 / (m - 1) as f64);
    (0..m).map(|j| 0.1 * r * ratio.powi(j as i32)).collect()
}

fn check_grid(n: usize, grid: &[f64]) -> Result<()> {
    if grid.iter().any(|e| !(*e > 0.0) || !e.is_finite()) {
        return Err(Error::invalid("epsilon grid values must be positive"));
    }
    let mut sorted = grid.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted.dedup();
    if sorted.len() < n + 1 {
        return Err(Error::invalid(format!(
            "epsilon grid needs at least {} distinct values, got {}",
            n + 1,
            sorted.len()
        )));
    }
    if sorted[sorted.len() - 1] < 4.0 * sorted[0] {
        return Err(Error::invalid("epsilon grid must span at least a factor of 4"));
    }
    Ok(())
}

fn measure(k: &ConvexBody, grid: &[f64], samples: usize, seed: u64) -> Result<Vec<Estimate>> {
    grid.iter()
        .enumerate()
        .map(|(j, &eps)| parallel_body_volume(k, eps, samples, rng::derive_seed(seed, Domain::Volume, j as u64)))
        .collect()
}

/// Free fit of all of `W_0, …, W_n`.
pub fn fit_quermass(k: &ConvexBody, grid: &[f64], samples: usize, seed: u64) -> Result<QuermassFit> {
    check_grid(k.dimension(), grid)?;
    let vols = measure(k, grid, samples, seed)?;
    let mut fit = fit_from_volumes(k.dimension(), grid, &vols, false)?;
    fit.samples = samples;
    fit.seed = seed;
    Ok(fit)
}

/// Fit with the leading coefficient fixed to `W_n = ω_n`.
pub fn fit_quermass_pinned(k: &ConvexBody, grid: &[f64], samples: usize, seed: u64) -> Result<QuermassFit> {
    check_grid(k.dimension(), grid)?;
    let vols = measure(k, grid, samples, seed)?;
    let mut fit = fit_from_volumes(k.dimension(), grid, &vols, true)?;
    fit.samples = samples;
    fit.seed = seed;
    Ok(fit)
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Weighted least-squares fit of the Steiner polynomial to given volumes.
pub fn fit_from_volumes(n: usize, grid: &[f64], volumes: &[Estimate], pinned: bool) -> Result<QuermassFit> {
    if grid.len() != volumes.len() {
        return Err(Error::DimensionMismatch {
            expected: grid.len(),
            found: volumes.len(),
        });
    }
    check_grid(n, grid)?;
    let omega = constants::ball_volume(n)?;
    let unknowns = if pinned { n } else { n + 1 };
    let m = grid.len();
    // smallest positive stderr stands in for exact (zero-error) volumes
    let min_se = volumes
        .iter()
        .map(|v| v.std_error)
        .filter(|s| *s > 0.0)
        .fold(f64::INFINITY, f64::min);
    let weight = |v: &Estimate| {
        let se = if v.std_error > 0.0 { v.std_error } else if min_se.is_finite() { min_se } else { 1.0 };
        1.0 / se
    };

    let mut a = DMatrix::<f64>::zeros(m, unknowns);
    let mut b = DVector::<f64>::zeros(m);
    for (j, (&eps, v)) in grid.iter().zip(volumes).enumerate() {
        let w = weight(v);
        for kk in 0..unknowns {
            a[(j, kk)] = w * binomial(n, kk) * eps.powi(kk as i32);
        }
        let target = if pinned { v.estimate - omega * eps.powi(n as i32) } else { v.estimate };
        b[j] = w * target;
    }
    // equilibrate columns so the condition number reflects the grid, not units
    let scales: Vec<f64> = (0..unknowns).map(|c| a.column(c).norm()).collect();
    for (c, s) in scales.iter().enumerate() {
        if *s > 0.0 {
            a.column_mut(c).scale_mut(1.0 / s);
        }
    }
    let svd = a.svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    if !(condition <= MAX_CONDITION) {
        return Err(Error::IllConditioned { condition });
    }
    let y = svd
        .solve(&b, 0.0)
        .map_err(|e| Error::invalid(format!("least squares failed: {e}")))?;
    let v_t = svd.v_t.as_ref().expect("requested V^T");
    let mut coefficients = vec![0.0; n + 1];
    let mut coefficient_errors = vec![0.0; n + 1];
    for c in 0..unknowns {
        coefficients[c] = y[c] / scales[c];
        // Cov(y) = V Σ^{-2} V^T
        let var: f64 = (0..unknowns)
            .map(|i| (v_t[(i, c)] / svd.singular_values[i]).powi(2))
            .sum();
        coefficient_errors[c] = var.sqrt() / scales[c];
    }
    if pinned {
        coefficients[n] = omega;
    }
    let residual = grid
        .iter()
        .zip(volumes)
        .map(|(&eps, v)| {
            let p = steiner_polynomial(n, &coefficients, eps);
            (p - v.estimate).abs() / v.estimate.abs().max(f64::MIN_POSITIVE)
        })
        .fold(0.0, f64::max);
    Ok(QuermassFit {
        dimension: n,
        coefficients,
        coefficient_errors,
        epsilon_grid: grid.to_vec(),
        volumes: volumes.iter().map(|v| v.estimate).collect(),
        volume_stderr: volumes.iter().map(|v| v.std_error).collect(),
        residual,
        condition,
        pinned,
        samples: volumes.first().map_or(0, |v| v.samples),
        seed: 0,
    })
}

/// `Σ_k C(n,k)·W_k·ε^k`.
pub fn steiner_polynomial(n: usize, w: &[f64], eps: f64) -> f64 {
    w.iter()
        .enumerate()
        .map(|(k, wk)| binomial(n, k) * wk * eps.powi(k as i32))
        .sum()
}

/// `N(K) = n·W_{n-1}` with its standard error.
pub fn norm_from_steiner(fit: &QuermassFit) -> Estimate {
    let n = fit.dimension;
    Estimate {
        estimate: n as f64 * fit.coefficients[n - 1],
        std_error: n as f64 * fit.coefficient_errors[n - 1],
        samples: fit.samples,
    }
}
