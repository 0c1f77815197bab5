//! The cosine basis `b(z)` of the even-extended occupancy signal.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{Error, Result};

/// Basis matrix sampled at a fixed list of z locations.
///
/// Row `d` holds `[1/2, cos(pi (z_d + 1) / 2), ..., cos((N - 1) pi (z_d + 1) / 2)]`,
/// so that reconstruction is a plain dot product with the stored coefficient
/// vector `[a_0, a_1, ..., a_{N-1}]`.
#[derive(Debug, Clone, PartialEq)]
pub struct CosineBasis {
    terms: usize,
    z: Vec<f64>,
    matrix: Vec<f64>,
    /// The same matrix stored term-major.
    columns: Vec<f64>,
}

impl CosineBasis {
    pub fn terms(&self) -> usize {
        self.terms
    }

    pub fn z_grid(&self) -> &[f64] {
        &self.z
    }

    pub fn samples(&self) -> usize {
        self.z.len()
    }

    #[inline]
    pub fn row(&self, d: usize) -> &[f64] {
        &self.matrix[d * self.terms..(d + 1) * self.terms]
    }

    pub fn matrix(&self) -> &[f64] {
        &self.matrix
    }

    /// `b_n(z_d)` for every sample `d`.
    #[inline]
    pub fn column(&self, n: usize) -> &[f64] {
        let samples = self.z.len();
        &self.columns[n * samples..(n + 1) * samples]
    }
}

/// Frequency of term `n`: `t_n = n pi / 2`.
#[inline]
pub fn frequency(n: usize) -> f64 {
    n as f64 * PI * 0.5
}

pub fn make_basis(terms: usize, z_grid: &[f64]) -> Result<CosineBasis> {
    if terms == 0 {
        return Err(Error::InvalidParameter("number of terms must be at least 1"));
    }
    if let Some(&value) = z_grid.iter().find(|z| !(-1.0..=1.0).contains(*z)) {
        return Err(Error::Domain { value });
    }
    let mut matrix = Vec::with_capacity(terms * z_grid.len());
    for &z in z_grid {
        matrix.push(0.5);
        matrix.extend((1..terms).map(|n| libm::cos(frequency(n) * (z + 1.0))));
    }
    let samples = z_grid.len();
    let columns = (0..terms * samples)
        .map(|i| matrix[(i % samples) * terms + i / samples])
        .collect();
    Ok(CosineBasis {
        terms,
        z: z_grid.to_vec(),
        matrix,
        columns,
    })
}

/// `samples` cell-centered z locations: `z_d = -1 + (2d + 1) / samples`.
pub fn uniform_z_grid(samples: usize) -> Vec<f64> {
    (0..samples)
        .map(|d| crate::geometry::pixel_center(d as i64, samples))
        .collect()
}
