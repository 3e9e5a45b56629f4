#![allow(dead_code)]

use proptest::prelude::*;

/// Rotation of `R^n` composed of Givens rotations in every coordinate plane.
pub fn rotation(n: usize, angles: &[f64]) -> Vec<Vec<f64>> {
    let mut m: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| (i == j) as u8 as f64).collect()).collect();
    let mut k = 0;
    for i in 0..n {
        for j in i + 1..n {
            let (s, c) = angles[k % angles.len()].sin_cos();
            k += 1;
            for row in m.iter_mut() {
                let (a, b) = (row[i], row[j]);
                row[i] = c * a - s * b;
                row[j] = s * a + c * b;
            }
        }
    }
    m
}

pub fn apply(m: &[Vec<f64>], x: &[f64], shift: &[f64]) -> Vec<f64> {
    m.iter()
        .zip(shift)
        .map(|(row, s)| row.iter().zip(x).map(|(a, b)| a * b).sum::<f64>() + s)
        .collect()
}

pub fn point(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-3.0..3.0f64, n)
}

pub fn cloud(n: usize, lo: usize, hi: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(point(n), lo..hi)
}

pub fn angles() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-std::f64::consts::PI..std::f64::consts::PI, 10)
}
