use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform periodic grid on the flat torus `[0, L)^dim`.
///
/// Values are stored row-major: in two dimensions the flat index is
/// `ix * N + iy`, so the `y` axis is contiguous.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub dim: usize,
    #[serde(rename = "N")]
    pub points: usize,
    #[serde(rename = "L")]
    pub length: f64,
}

impl Grid {
    pub fn new(dim: usize, points: usize, length: f64) -> Result<Self> {
        let grid = Self { dim, points, length };
        grid.validate()?;
        Ok(grid)
    }

    /// Unit cell `[0, 1)^dim`.
    pub fn unit(dim: usize, points: usize) -> Result<Self> {
        Self::new(dim, points, 1.0)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dim == 1 || self.dim == 2) {
            return Err(Error::InvalidInput(format!("dim must be 1 or 2, got {}", self.dim)));
        }
        if self.points < 16 || !self.points.is_power_of_two() {
            return Err(Error::InvalidInput(format!(
                "points per axis must be a power of two ≥ 16, got {}",
                self.points
            )));
        }
        if !(self.length.is_finite() && self.length > 0.0) {
            return Err(Error::InvalidInput(format!(
                "cell length must be positive, got {}",
                self.length
            )));
        }
        Ok(())
    }

    pub fn spacing(&self) -> f64 {
        self.length / self.points as f64
    }

    /// Number of grid points, `N^dim`.
    pub fn len(&self) -> usize {
        self.points.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn multi_index(&self, flat: usize) -> [usize; 2] {
        match self.dim {
            1 => [flat, 0],
            _ => [flat / self.points, flat % self.points],
        }
    }

    /// Flat index of a multi-index, wrapping periodically.
    pub fn flat_index(&self, idx: [i64; 2]) -> usize {
        let n = self.points as i64;
        let wrap = |i: i64| i.rem_euclid(n) as usize;
        match self.dim {
            1 => wrap(idx[0]),
            _ => wrap(idx[0]) * self.points + wrap(idx[1]),
        }
    }

    /// Physical coordinates of a flat index (unused axes are zero).
    pub fn coords(&self, flat: usize) -> [f64; 2] {
        let [i, j] = self.multi_index(flat);
        let h = self.spacing();
        [i as f64 * h, if self.dim == 2 { j as f64 * h } else { 0.0 }]
    }

    /// Coordinates truncated to the grid dimension.
    pub fn point(&self, flat: usize) -> Vec<f64> {
        self.coords(flat)[..self.dim].to_vec()
    }
}

/// Samples of a scalar function on a [`Grid`] at time `time`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    pub grid: Grid,
    pub values: Vec<f64>,
    pub time: f64,
}

impl ScalarField {
    pub fn new(grid: Grid, values: Vec<f64>, time: f64) -> Result<Self> {
        grid.validate()?;
        if values.len() != grid.len() {
            return Err(Error::InvalidInput(format!(
                "expected {} values, got {}",
                grid.len(),
                values.len()
            )));
        }
        if !(time.is_finite() && time >= 0.0) {
            return Err(Error::InvalidInput(format!("time must be finite and ≥ 0, got {time}")));
        }
        if let Some(bad) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!("non-finite value at index {bad}")));
        }
        Ok(Self { grid, values, time })
    }

    /// Sample `f(x)` at every grid point; `x` has `grid.dim` entries.
    pub fn from_fn(grid: Grid, time: f64, f: impl Fn(&[f64]) -> f64) -> Result<Self> {
        let values = (0..grid.len()).map(|i| f(&grid.coords(i)[..grid.dim])).collect();
        Self::new(grid, values, time)
    }

    pub fn constant(grid: Grid, value: f64, time: f64) -> Result<Self> {
        Self::new(grid, vec![value; grid.len()], time)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    pub fn is_positive(&self) -> bool {
        self.values.iter().all(|&v| v > 0.0 && v.is_finite())
    }

    pub fn max_abs_diff(&self, other: &ScalarField) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}
