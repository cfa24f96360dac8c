//! Periodic lattices and their wavenumbers.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAX_DIM: usize = 5;

/// A d-dimensional periodic lattice with N_j points on a box of side L_j.
///
/// Values on the grid are stored row-major, last axis fastest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TorusGrid {
    sizes: Vec<usize>,
    lengths: Vec<f64>,
}

impl TorusGrid {
    pub fn new(sizes: Vec<usize>, lengths: Vec<f64>) -> Result<Self> {
        let d = sizes.len();
        if d == 0 || d > MAX_DIM {
            return Err(Error::InvalidGrid(format!("dimension {d} not in 1..={MAX_DIM}")));
        }
        if lengths.len() != d {
            return Err(Error::InvalidGrid(format!(
                "{} sizes but {} lengths",
                d,
                lengths.len()
            )));
        }
        if let Some(n) = sizes.iter().find(|&&n| n < 8 || n % 2 != 0) {
            return Err(Error::InvalidGrid(format!("axis size {n} must be even and >= 8")));
        }
        if let Some(l) = lengths.iter().find(|&&l| !(l > 0.0 && l.is_finite())) {
            return Err(Error::InvalidGrid(format!("axis length {l} must be positive")));
        }
        Ok(Self { sizes, lengths })
    }

    /// Same size and length on every axis.
    pub fn cubic(d: usize, n: usize, l: f64) -> Result<Self> {
        Self::new(vec![n; d], vec![l; d])
    }

    pub fn dim(&self) -> usize {
        self.sizes.len()
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn lengths(&self) -> &[f64] {
        &self.lengths
    }

    /// Total number of grid points.
    pub fn len(&self) -> usize {
        self.sizes.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        self.lengths[axis] / self.sizes[axis] as f64
    }

    /// Δx = Π L_j / N_j.
    pub fn cell_measure(&self) -> f64 {
        (0..self.dim()).map(|j| self.spacing(j)).product()
    }

    pub fn volume(&self) -> f64 {
        self.lengths.iter().product()
    }

    /// Signed mode index m in {-N/2, .., N/2-1} for storage index `i`.
    pub fn mode_index(&self, axis: usize, i: usize) -> i64 {
        let n = self.sizes[axis];
        if i < n / 2 {
            i as i64
        } else {
            i as i64 - n as i64
        }
    }

    pub fn wavenumber(&self, axis: usize, i: usize) -> f64 {
        2.0 * PI * self.mode_index(axis, i) as f64 / self.lengths[axis]
    }

    pub fn is_nyquist(&self, axis: usize, i: usize) -> bool {
        i == self.sizes[axis] / 2
    }

    /// Row-major strides.
    pub fn strides(&self) -> Vec<usize> {
        let mut s = vec![1; self.dim()];
        for j in (0..self.dim().saturating_sub(1)).rev() {
            s[j] = s[j + 1] * self.sizes[j + 1];
        }
        s
    }

    /// Multi-index of a flat position.
    pub fn unflatten(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.dim()];
        for j in (0..self.dim()).rev() {
            idx[j] = flat % self.sizes[j];
            flat /= self.sizes[j];
        }
        idx
    }

    /// Physical coordinates of a flat position.
    pub fn point(&self, flat: usize) -> Vec<f64> {
        self.unflatten(flat)
            .into_iter()
            .enumerate()
            .map(|(j, i)| i as f64 * self.spacing(j))
            .collect()
    }

    /// |k| at every flat position, in storage order.
    pub fn wavenumber_magnitudes(&self) -> Vec<f64> {
        let per_axis: Vec<Vec<f64>> = (0..self.dim())
            .map(|j| (0..self.sizes[j]).map(|i| self.wavenumber(j, i).powi(2)).collect())
            .collect();
        (0..self.len())
            .map(|flat| {
                self.unflatten(flat)
                    .iter()
                    .enumerate()
                    .map(|(j, &i)| per_axis[j][i])
                    .sum::<f64>()
                    .sqrt()
            })
            .collect()
    }

    /// The same box sampled with `factor` times as many points per axis.
    pub fn refined(&self, factor: usize) -> Result<Self> {
        Self::new(self.sizes.iter().map(|n| n * factor).collect(), self.lengths.clone())
    }
}
