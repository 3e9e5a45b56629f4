//! Deterministic direction grids on `S^{n-1}`, used wherever a sup over all
//! directions has to be certified from finitely many support evaluations.

use std::f64::consts::PI;

use crate::constants;
use crate::linalg;
use crate::rng::{self, Domain};

#[derive(Debug, Clone)]
pub struct DirectionGrid {
    pub directions: Vec<Vec<f64>>,
    /// Typical angular spacing between neighbouring directions (radians).
    pub resolution: f64,
}

impl DirectionGrid {
    /// The grid used for covering certificates and oracle diameters.
    pub fn standard(n: usize) -> Self {
        match n {
            2 => Self::with_count(2, 4096),
            3 => Self::with_count(3, 8192),
            _ => Self::with_count(n, 16384),
        }
    }

    /// `count` directions: equally spaced angles in 2D, a Fibonacci lattice
    /// in 3D, and a fixed pseudo-random set plus the coordinate axes above.
    pub fn with_count(n: usize, count: usize) -> Self {
        assert!(n >= 2 && count >= 4);
        let directions: Vec<Vec<f64>> = match n {
            2 => (0..count)
                .map(|k| {
                    let t = 2.0 * PI * k as f64 / count as f64;
                    vec![t.cos(), t.sin()]
                })
                .collect(),
            3 => {
                let golden = PI * (3.0 - 5.0_f64.sqrt());
                (0..count)
                    .map(|k| {
                        let z = 1.0 - (2.0 * k as f64 + 1.0) / count as f64;
                        let r = (1.0 - z * z).max(0.0).sqrt();
                        let t = golden * k as f64;
                        vec![r * t.cos(), r * t.sin(), z]
                    })
                    .collect()
            }
            _ => {
                let mut dirs = Vec::with_capacity(count + 2 * n);
                for i in 0..n {
                    dirs.push(linalg::unit(n, i));
                    dirs.push(linalg::neg(&linalg::unit(n, i)));
                }
                let mut r = rng::substream(0x6772_6964, Domain::Grid, n as u64);
                while dirs.len() < count {
                    dirs.push(rng::unit_vector(&mut r, n));
                }
                dirs
            }
        };
        let area = constants::sphere_area(n).unwrap_or(4.0 * PI);
        let resolution = if n == 2 {
            2.0 * PI / count as f64
        } else {
            (area / count as f64).powf(1.0 / (n as f64 - 1.0))
        };
        DirectionGrid {
            directions,
            resolution,
        }
    }

    pub fn len(&self) -> usize {
        self.directions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.directions.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &[f64]> {
        self.directions.iter().map(Vec::as_slice)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids_are_unit_and_sized() {
        for n in 2..6 {
            let g = DirectionGrid::with_count(n, 256);
            assert!(g.len() >= 256);
            for u in g.iter() {
                assert!((linalg::norm(u) - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn planar_grid_contains_diagonals_when_divisible_by_eight() {
        let g = DirectionGrid::with_count(2, 64);
        let d = std::f64::consts::FRAC_1_SQRT_2;
        assert!(g
            .iter()
            .any(|u| (u[0] - d).abs() < 1e-12 && (u[1] - d).abs() < 1e-12));
    }
}
