//! Uniformly distributed 2-planes in `R^n` and Monte Carlo checks of the
//! projection-averaging identities for curve length and perimeter.
//!
//! Planes are drawn by orthonormalizing two isotropic Gaussian vectors, so
//! their distribution is the rotation-invariant probability measure on
//! `G(n,2)`. Only normalized identities are checked, which makes them
//! independent of how the unnormalized invariant measure is scaled.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bodies::{ConvexBody, SphereQuadrature};
use crate::constants;
use crate::curves::{self, Polyline};
use crate::error::{Error, Result};
use crate::linalg::{self, dot};
use crate::report::{rounding_tolerance, Relation, VerificationReport};
use crate::rng::{self, Domain};
use crate::stats;

/// Orthonormality tolerance for frames.
pub const FRAME_TOL: f64 = 1e-12;

/// Gram–Schmidt residuals below this trigger a re-draw.
const REDRAW_THRESHOLD: f64 = 1e-8;
const MAX_REDRAWS: usize = 100;

/// Orthonormal pair `(e, f)` spanning an element of `G(n,2)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlaneFrame {
    e: Vec<f64>,
    f: Vec<f64>,
}

impl PlaneFrame {
    pub fn new(e: Vec<f64>, f: Vec<f64>) -> Result<Self> {
        if e.len() != f.len() {
            return Err(Error::DimensionMismatch {
                expected: e.len(),
                found: f.len(),
            });
        }
        if e.len() < 2 {
            return Err(Error::DegenerateFrame("ambient dimension below 2".into()));
        }
        let (ee, ff, ef) = (dot(&e, &e), dot(&f, &f), dot(&e, &f));
        if (ee.sqrt() - 1.0).abs() > FRAME_TOL
            || (ff.sqrt() - 1.0).abs() > FRAME_TOL
            || ef.abs() > FRAME_TOL
        {
            return Err(Error::DegenerateFrame(format!(
                "|e| = {}, |f| = {}, <e,f> = {ef:e}",
                ee.sqrt(),
                ff.sqrt()
            )));
        }
        Ok(PlaneFrame { e, f })
    }

    pub fn ambient_dimension(&self) -> usize {
        self.e.len()
    }

    pub fn basis(&self) -> (&[f64], &[f64]) {
        (&self.e, &self.f)
    }

    /// Frame coordinates of the orthogonal projection of `x`.
    pub fn project(&self, x: &[f64]) -> [f64; 2] {
        [dot(x, &self.e), dot(x, &self.f)]
    }

    /// `u[0]·e + u[1]·f`.
    pub fn lift(&self, u: &[f64]) -> Vec<f64> {
        self.e
            .iter()
            .zip(&self.f)
            .map(|(a, b)| u[0] * a + u[1] * b)
            .collect()
    }
}

/// Draws a uniformly distributed 2-plane in `R^n`.
pub fn sample_plane<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<PlaneFrame> {
    if n < 2 {
        return Err(Error::invalid("planes need n >= 2"));
    }
    for _ in 0..MAX_REDRAWS {
        let Some(e) = linalg::normalized(&rng::gaussian_vector(rng, n)) else {
            continue;
        };
        let mut f = rng::gaussian_vector(rng, n);
        let fe = dot(&f, &e);
        linalg::axpy(&mut f, -fe, &e);
        let r = linalg::norm(&f);
        if r < REDRAW_THRESHOLD * (1.0 + fe.abs()) {
            continue;
        }
        let mut f = linalg::scale(&f, 1.0 / r);
        // second Gram–Schmidt pass keeps <e,f> at rounding level
        let fe = dot(&f, &e);
        linalg::axpy(&mut f, -fe, &e);
        let f = linalg::normalized(&f).expect("nonzero after reorthogonalization");
        return PlaneFrame::new(e, f);
    }
    Err(Error::NonConvergence {
        iterations: MAX_REDRAWS,
        best_bound: 0.0,
    })
}

/// The plane for sample `index` of the stream `seed`.
pub fn plane_at(n: usize, seed: u64, index: u64) -> Result<PlaneFrame> {
    sample_plane(n, &mut rng::substream(seed, Domain::Plane, index))
}

/// Total mass `C_{n,k} = σ_{n-1}⋯σ_{n-k} / (σ_{k-1}⋯σ_0)` of the invariant
/// measure on `G(n,k)` in the standard normalization.
pub fn grassmann_total_mass(n: usize, k: usize) -> Result<f64> {
    if k < 1 || k + 1 > n {
        return Err(Error::invalid(format!("need 1 <= k <= n-1, got n={n}, k={k}")));
    }
    // σ_j is the sphere in R^{j+1}
    let mut num = 1.0;
    for j in n - k..n {
        num *= constants::sphere_area(j + 1)?;
    }
    let mut den = 1.0;
    for j in 0..k {
        den *= constants::sphere_area(j + 1)?;
    }
    Ok(num / den)
}

/// `E[length(γ')] / length(γ) = σ_n σ_1 / (σ_2 σ_{n-1})` for projections
/// onto uniformly random 2-planes.
pub fn kubota_length_factor(n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::invalid("kubota factor needs n >= 2"));
    }
    if n > constants::MAX_DIM {
        return Err(Error::Range(format!("dimension {n} exceeds cap")));
    }
    let s = |j: usize| constants::sphere_area(j + 1);
    Ok((s(n)? * s(1)?) / (s(2)? * s(n - 1)?))
}

/// Monte Carlo check of `E[length(γ')] = kubota_length_factor(n)·length(γ)`.
pub fn verify_kubota_length(c: &Polyline, samples: usize, seed: u64) -> Result<VerificationReport> {
    let length = c.length();
    if !(length > 0.0) {
        return Err(Error::invalid("curve must have positive length"));
    }
    if samples == 0 {
        return Err(Error::invalid("need at least one plane sample"));
    }
    let n = c.dimension();
    let factor = kubota_length_factor(n)?;
    let rhs = factor * length;
    let est = if n == 2 {
        // G(2,2) is a single point and projection is the identity
        stats::Estimate::exact(length)
    } else {
        stats::mean_of(samples, |i| Ok(c.project(&plane_at(n, seed, i as u64)?)?.length()))?
    };
    Ok(VerificationReport::new(
        "kubota_length",
        Relation::Equal,
        est.estimate,
        rhs,
        est.std_error,
        rounding_tolerance(est.estimate, rhs),
    )
    .with("dimension", n)
    .with("samples", samples)
    .with("seed", seed)
    .with("curve_length", length)
    .with("factor", factor)
    .with("ratio", est.estimate / length))
}

/// Monte Carlo check of the perimeter form of the projection formula for
/// the (n-1)-st quermassintegral:
/// `E[per(K')] = n·(σ_1/σ_{n-1})·W_{n-1}(K)` with `W_{n-1}(K) = N(K)/n`.
/// Both sides are estimated independently; the report passes iff they
/// agree within `3·(stderr_proj + stderr_norm)`.
pub fn verify_projection_norm(
    k: &ConvexBody,
    samples: usize,
    seed: u64,
    q: &SphereQuadrature,
) -> Result<VerificationReport> {
    if !(k.diameter() > 0.0) {
        return Err(Error::invalid("body must have positive diameter"));
    }
    if samples == 0 {
        return Err(Error::invalid("need at least one plane sample"));
    }
    let n = k.dimension();
    let lhs = stats::mean_of(samples, |i| k.project(&plane_at(n, seed, i as u64)?)?.perimeter())?;
    let norm = k.norm(q)?;
    let coeff = n as f64 * constants::sphere_area(2)? / constants::sphere_area(n)?;
    let w = norm.scaled(1.0 / n as f64);
    let rhs = w.scaled(coeff);
    Ok(VerificationReport::new(
        "projection_norm",
        Relation::Equal,
        lhs.estimate,
        rhs.estimate,
        lhs.std_error + rhs.std_error,
        rounding_tolerance(lhs.estimate, rhs.estimate),
    )
    .with("dimension", n)
    .with("samples", samples)
    .with("sphere_samples", q.sample_count)
    .with("seed", seed)
    .with("sphere_seed", q.seed)
    .with("norm", norm.estimate)
    .with("norm_stderr", norm.std_error)
    .with("w_n_minus_1", w.estimate)
    .with("stderr_projection", lhs.std_error)
    .with("stderr_norm_side", rhs.std_error))
}

/// Mean projected length over `samples` planes, exposed for diagnostics.
pub fn mean_projected_length(c: &Polyline, samples: usize, seed: u64) -> Result<stats::Estimate> {
    let n = c.dimension();
    stats::mean_of(samples, |i| curves::project_curve(c, &plane_at(n, seed, i as u64)?).map(|p| p.length()))
}
