use crate::error::{Error, Result};
use crate::solver::io::{Snapshot, SnapshotHeader};
use crate::solver::Grid;

/// Symmetric 1×1 or 2×2 matrix. For `dim == 1` only `xx` is meaningful.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymMat {
    pub dim: usize,
    pub xx: f64,
    pub xy: f64,
    pub yy: f64,
}

impl SymMat {
    pub fn new(dim: usize, xx: f64, xy: f64, yy: f64) -> Self {
        if dim == 1 {
            Self { dim, xx, xy: 0.0, yy: 0.0 }
        } else {
            Self { dim, xx, xy, yy }
        }
    }

    /// `v · I`.
    pub fn identity(dim: usize, v: f64) -> Self {
        Self::new(dim, v, 0.0, v)
    }

    /// `g gᵀ`.
    pub fn outer(dim: usize, g: [f64; 2]) -> Self {
        Self::new(dim, g[0] * g[0], g[0] * g[1], g[1] * g[1])
    }

    pub fn trace(&self) -> f64 {
        if self.dim == 1 {
            self.xx
        } else {
            self.xx + self.yy
        }
    }

    /// Sum of squared entries, `|A|²`.
    pub fn norm_sq(&self) -> f64 {
        if self.dim == 1 {
            self.xx * self.xx
        } else {
            self.xx * self.xx + 2.0 * self.xy * self.xy + self.yy * self.yy
        }
    }

    /// Eigenvalues `(λ_min, λ_max)` in closed form.
    pub fn eigenvalues(&self) -> (f64, f64) {
        if self.dim == 1 {
            return (self.xx, self.xx);
        }
        let mean = 0.5 * (self.xx + self.yy);
        let radius = (0.5 * (self.xx - self.yy)).hypot(self.xy);
        (mean - radius, mean + radius)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().0
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues().1
    }

    /// Largest absolute eigenvalue.
    pub fn spectral_radius(&self) -> f64 {
        let (lo, hi) = self.eigenvalues();
        lo.abs().max(hi.abs())
    }

    /// `A − (tr A / n) I`.
    pub fn tracefree(&self) -> Self {
        let shift = self.trace() / self.dim as f64;
        Self::new(self.dim, self.xx - shift, self.xy, self.yy - shift)
    }

    /// `A·A`, symmetric for symmetric `A`.
    pub fn square(&self) -> Self {
        Self::new(
            self.dim,
            self.xx * self.xx + self.xy * self.xy,
            self.xy * (self.xx + self.yy),
            self.xy * self.xy + self.yy * self.yy,
        )
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::new(self.dim, s * self.xx, s * self.xy, s * self.yy)
    }

    /// `v · A · v`.
    pub fn quadratic_form(&self, v: [f64; 2]) -> f64 {
        if self.dim == 1 {
            self.xx * v[0] * v[0]
        } else {
            self.xx * v[0] * v[0] + 2.0 * self.xy * v[0] * v[1] + self.yy * v[1] * v[1]
        }
    }
}

impl std::ops::Add for SymMat {
    type Output = SymMat;

    fn add(self, rhs: SymMat) -> SymMat {
        SymMat::new(self.dim, self.xx + rhs.xx, self.xy + rhs.xy, self.yy + rhs.yy)
    }
}

impl std::ops::Sub for SymMat {
    type Output = SymMat;

    fn sub(self, rhs: SymMat) -> SymMat {
        SymMat::new(self.dim, self.xx - rhs.xx, self.xy - rhs.xy, self.yy - rhs.yy)
    }
}

/// Grid samples of a symmetric 2-tensor: one block `T11` in one dimension,
/// three blocks `T11, T12, T22` in two.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorField {
    pub grid: Grid,
    pub time: f64,
    pub components: Vec<Vec<f64>>,
}

impl TensorField {
    pub fn from_fn(grid: Grid, time: f64, f: impl Fn(usize) -> SymMat) -> Self {
        let blocks = if grid.dim == 1 { 1 } else { 3 };
        let mut components = vec![Vec::with_capacity(grid.len()); blocks];
        for i in 0..grid.len() {
            let m = f(i);
            components[0].push(m.xx);
            if blocks == 3 {
                components[1].push(m.xy);
                components[2].push(m.yy);
            }
        }
        Self { grid, time, components }
    }

    pub fn at(&self, i: usize) -> SymMat {
        match self.components.as_slice() {
            [xx] => SymMat::new(1, xx[i], 0.0, 0.0),
            [xx, xy, yy] => SymMat::new(2, xx[i], xy[i], yy[i]),
            _ => unreachable!("tensor fields carry one or three components"),
        }
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn component_names(dim: usize) -> Vec<String> {
        let names: &[&str] = if dim == 1 { &["11"] } else { &["11", "12", "22"] };
        names.iter().map(|s| s.to_string()).collect()
    }

    pub fn to_snapshot(&self, p: f64) -> Snapshot {
        let mut header = SnapshotHeader::new(&self.grid, self.time, p);
        header.components = Some(Self::component_names(self.grid.dim));
        Snapshot { header, blocks: self.components.clone() }
    }

    pub fn from_snapshot(snap: &Snapshot) -> Result<Self> {
        let grid = snap.header.grid()?;
        let expected = Self::component_names(grid.dim);
        if snap.header.components.as_ref() != Some(&expected) {
            return Err(Error::InvalidInput(format!(
                "tensor snapshot needs components {expected:?}, found {:?}",
                snap.header.components
            )));
        }
        Ok(Self { grid, time: snap.header.t, components: snap.blocks.clone() })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::path::Path;

    #[test]
    fn eigen_closed_form() {
        let m = SymMat::new(2, 2.0, 1.0, 2.0);
        assert_eq!(m.eigenvalues(), (1.0, 3.0));
        assert_eq!(m.spectral_radius(), 3.0);
        let t = SymMat::new(2, -4.0, 0.0, 0.0).tracefree();
        assert_eq!(t.eigenvalues(), (-2.0, 2.0));
        assert_eq!(SymMat::new(1, -5.0, 9.0, 9.0).spectral_radius(), 5.0);
    }

    #[test]
    fn tracefree_norm_identity() {
        let m = SymMat::new(2, 1.5, -0.3, 4.0);
        let lhs = m.tracefree().norm_sq();
        let rhs = m.norm_sq() - m.trace() * m.trace() / 2.0;
        assert!((lhs - rhs).abs() < 1e-14);
    }

    #[test]
    fn square_matches_product() {
        let m = SymMat::new(2, 1.0, 2.0, -3.0);
        let sq = m.square();
        assert_eq!((sq.xx, sq.xy, sq.yy), (5.0, -4.0, 13.0));
    }

    #[test]
    fn snapshot_round_trip() {
        let grid = Grid::unit(2, 16).unwrap();
        let field = TensorField::from_fn(grid, 0.25, |i| SymMat::new(2, i as f64, -1.0, 0.5));
        let snap = field.to_snapshot(1.2);
        let text = snap.render().unwrap();
        assert!(text.lines().next().unwrap().ends_with(r#""components":["11","12","22"]}"#));
        assert_eq!(text.lines().count(), 4);
        let back = Snapshot::parse(&text, Path::new("mem")).unwrap();
        assert_eq!(TensorField::from_snapshot(&back).unwrap(), field);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn spectral_radius_bounds_quadratic_form(
                xx in -1e3f64..1e3, xy in -1e3f64..1e3, yy in -1e3f64..1e3, angle in 0f64..6.3
            ) {
                let m = SymMat::new(2, xx, xy, yy);
                let v = [angle.cos(), angle.sin()];
                let scale = 1.0 + m.norm_sq().sqrt();
                let form = m.quadratic_form(v);
                prop_assert!(form.abs() <= m.spectral_radius() + 1e-12 * scale);
                prop_assert!(form >= m.min_eigenvalue() - 1e-12 * scale);
                prop_assert!(form <= m.max_eigenvalue() + 1e-12 * scale);
            }
        }
    }
}
