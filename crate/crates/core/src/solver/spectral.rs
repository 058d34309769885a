//! Fourier transforms and differentiation on periodic grids.

use std::f64::consts::PI;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::Grid;

/// Planned forward/inverse FFTs for one grid.
pub struct Spectral {
    grid: Grid,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    wavenumbers: Vec<f64>,
}

impl Spectral {
    pub fn new(grid: &Grid) -> Self {
        let mut planner = FftPlanner::new();
        let n = grid.points;
        let wavenumbers = (0..n)
            .map(|j| {
                let signed = if j <= n / 2 { j as f64 } else { j as f64 - n as f64 };
                2.0 * PI * signed / grid.length
            })
            .collect();
        Self {
            grid: *grid,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
            wavenumbers,
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Angular wavenumber of spectral index `j` along any axis.
    pub fn wavenumber(&self, j: usize) -> f64 {
        self.wavenumbers[j]
    }

    fn is_nyquist(&self, j: usize) -> bool {
        j == self.grid.points / 2
    }

    /// `|ξ|²` at each spectral index, in the storage order of the field.
    pub fn wavenumber_sq(&self) -> Vec<f64> {
        (0..self.grid.len())
            .map(|i| {
                let [jx, jy] = self.grid.multi_index(i);
                let kx = self.wavenumbers[jx];
                let ky = if self.grid.dim == 2 { self.wavenumbers[jy] } else { 0.0 };
                kx * kx + ky * ky
            })
            .collect()
    }

    fn transform(&self, data: &mut [Complex64], fft: &Arc<dyn Fft<f64>>) {
        let n = self.grid.points;
        if self.grid.dim == 1 {
            fft.process(data);
            return;
        }
        for row in data.chunks_exact_mut(n) {
            fft.process(row);
        }
        let mut column = vec![Complex64::default(); n];
        for iy in 0..n {
            for ix in 0..n {
                column[ix] = data[ix * n + iy];
            }
            fft.process(&mut column);
            for ix in 0..n {
                data[ix * n + iy] = column[ix];
            }
        }
    }

    pub fn forward(&self, values: &[f64]) -> Vec<Complex64> {
        let mut data: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.transform(&mut data, &self.forward);
        data
    }

    /// Normalised inverse transform, keeping the real part.
    pub fn inverse(&self, mut spectrum: Vec<Complex64>) -> Vec<f64> {
        self.transform(&mut spectrum, &self.inverse);
        let norm = 1.0 / self.grid.len() as f64;
        spectrum.into_iter().map(|c| c.re * norm).collect()
    }

    /// Partial derivative `∂^orders[0]_x ∂^orders[1]_y` of the field whose
    /// spectrum is given. Odd derivatives zero the Nyquist mode.
    pub fn derivative(&self, spectrum: &[Complex64], orders: [u32; 2]) -> Vec<f64> {
        let out: Vec<Complex64> = spectrum
            .iter()
            .enumerate()
            .map(|(i, &c)| c * self.symbol(i, orders))
            .collect();
        self.inverse(out)
    }

    fn symbol(&self, flat: usize, orders: [u32; 2]) -> Complex64 {
        let idx = self.grid.multi_index(flat);
        let mut symbol = Complex64::new(1.0, 0.0);
        for axis in 0..self.grid.dim {
            let order = orders[axis];
            if order == 0 {
                continue;
            }
            if order % 2 == 1 && self.is_nyquist(idx[axis]) {
                return Complex64::default();
            }
            symbol *= Complex64::new(0.0, self.wavenumbers[idx[axis]]).powu(order);
        }
        symbol
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::ScalarField;

    #[test]
    fn round_trip() {
        let g = Grid::unit(2, 16).unwrap();
        let s = Spectral::new(&g);
        let f = ScalarField::from_fn(g, 0.0, |x| (x[0] * 3.0).sin() + x[1] * x[1]).unwrap();
        let back = s.inverse(s.forward(&f.values));
        for (a, b) in f.values.iter().zip(back) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn pure_modes_differentiate_exactly() {
        let g = Grid::new(2, 32, 2.0).unwrap();
        let s = Spectral::new(&g);
        let w = PI; // 2π / L
        let f = ScalarField::from_fn(g, 0.0, |x| (w * x[0]).sin() * (2.0 * w * x[1]).cos()).unwrap();
        let spec = s.forward(&f.values);
        let fxy = s.derivative(&spec, [1, 1]);
        let fyy = s.derivative(&spec, [0, 2]);
        for i in 0..g.len() {
            let [x, y] = g.coords(i);
            let want_xy = -2.0 * w * w * (w * x).cos() * (2.0 * w * y).sin();
            let want_yy = -4.0 * w * w * (w * x).sin() * (2.0 * w * y).cos();
            assert!((fxy[i] - want_xy).abs() < 1e-11);
            assert!((fyy[i] - want_yy).abs() < 1e-11);
        }
    }
}
