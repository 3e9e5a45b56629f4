//! Deterministic parallel Monte Carlo means.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;

/// A sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub estimate: f64,
    pub std_error: f64,
    pub samples: usize,
}

impl Estimate {
    pub fn exact(value: f64) -> Self {
        Estimate {
            estimate: value,
            std_error: 0.0,
            samples: 0,
        }
    }

    pub fn scaled(self, t: f64) -> Self {
        Estimate {
            estimate: self.estimate * t,
            std_error: self.std_error * t.abs(),
            samples: self.samples,
        }
    }
}

const CHUNK: usize = 4096;

/// Mean and standard error of `f(0), …, f(n-1)`.
///
/// Chunks are fixed-size and combined in index order, so the result is
/// bitwise identical for any thread count. Values are accumulated as
/// deviations from `f(0)`, which makes a constant integrand come out exact
/// with zero standard error.
pub fn mean_of<F>(n: usize, f: F) -> Result<Estimate>
where
    F: Fn(usize) -> Result<f64> + Sync,
{
    assert!(n >= 1, "mean_of needs at least one sample");
    let shift = f(0)?;
    let chunks = n.div_ceil(CHUNK);
    let partials: Vec<(f64, f64)> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let lo = c * CHUNK;
            let hi = (lo + CHUNK).min(n);
            let mut s = 0.0;
            let mut s2 = 0.0;
            for i in lo..hi {
                let d = if i == 0 { 0.0 } else { f(i)? - shift };
                s += d;
                s2 += d * d;
            }
            Ok((s, s2))
        })
        .collect::<Result<_>>()?;
    let (s, s2) = partials
        .iter()
        .fold((0.0, 0.0), |acc, p| (acc.0 + p.0, acc.1 + p.1));
    let nf = n as f64;
    let mean_dev = s / nf;
    let std_error = if n > 1 {
        let var = ((s2 - s * mean_dev) / (nf - 1.0)).max(0.0);
        (var / nf).sqrt()
    } else {
        0.0
    };
    Ok(Estimate {
        estimate: shift + mean_dev,
        std_error,
        samples: n,
    })
}
