//! Nodal scalar and vector fields plus the derivative operators acting
//! on them.

use crate::error::{Error, Result};
use crate::grid::Grid;
use std::sync::Arc;

/// Nodal values of a scalar function on a grid.
#[derive(Debug, Clone)]
pub struct ScalarField {
    pub grid: Arc<Grid>,
    pub values: Vec<f64>,
    /// Set for fields vanishing on the two axis-0 boundary planes.
    pub dirichlet: bool,
}

impl ScalarField {
    pub fn zeros(grid: &Arc<Grid>) -> Self {
        ScalarField {
            grid: grid.clone(),
            values: vec![0.0; grid.len()],
            dirichlet: false,
        }
    }

    /// Sample `f(x)` at every node.
    pub fn from_fn(grid: &Arc<Grid>, f: impl Fn([f64; 3]) -> f64) -> Self {
        let values = (0..grid.len()).map(|i| f(grid.coords(i))).collect();
        ScalarField {
            grid: grid.clone(),
            values,
            dirichlet: false,
        }
    }

    /// Sample and pin the axis-0 boundary planes to exactly zero.
    pub fn from_fn_dirichlet(grid: &Arc<Grid>, f: impl Fn([f64; 3]) -> f64) -> Self {
        let mut field = Self::from_fn(grid, f);
        field.enforce_dirichlet();
        field
    }

    /// Zero the boundary planes and set the flag.
    pub fn enforce_dirichlet(&mut self) {
        for i in 0..self.values.len() {
            if self.grid.on_axis0_boundary(i) {
                self.values[i] = 0.0;
            }
        }
        self.dirichlet = true;
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// Full-order partial derivative: Fourier differentiation on periodic
    /// axes, finite differences of the grid's configured order on axis 0
    /// (one-sided stencils of the same order at the boundary).
    pub fn derivative(&self, axis: usize, order: usize) -> Result<ScalarField> {
        self.grid.check_axis(axis)?;
        if order == 0 {
            return Ok(self.clone());
        }
        let mut out = ScalarField::zeros(&self.grid);
        if axis == 0 {
            let op = self.grid.axis0_stencil(order)?;
            self.grid
                .apply_along_axis(&self.values, &mut out.values, 0, &mut |src, dst| {
                    op.apply(src, dst)
                });
        } else {
            let fd = self.grid.fourier(axis);
            self.grid
                .apply_along_axis(&self.values, &mut out.values, axis, &mut |src, dst| {
                    fd.derivative(src, dst, order)
                });
        }
        Ok(out)
    }

    /// First derivative along axis 0 using the SBP operator (the one the
    /// discrete energy functionals differentiate exactly).
    pub fn sbp_derivative_axis0(&self) -> ScalarField {
        let mut out = ScalarField::zeros(&self.grid);
        let op = self.grid.sbp();
        self.grid
            .apply_along_axis(&self.values, &mut out.values, 0, &mut |src, dst| {
                op.apply(src, dst)
            });
        out
    }

    /// First derivative along `axis` with the objective-side operator:
    /// SBP on axis 0, Fourier elsewhere.
    pub fn energy_derivative(&self, axis: usize) -> Result<ScalarField> {
        self.grid.check_axis(axis)?;
        if axis == 0 {
            Ok(self.sbp_derivative_axis0())
        } else {
            self.derivative(axis, 1)
        }
    }

    pub fn gradient(&self) -> Result<VectorField> {
        let comps = (0..self.grid.dim)
            .map(|a| self.derivative(a, 1))
            .collect::<Result<Vec<_>>>()?;
        Ok(VectorField { components: comps })
    }

    pub fn scale(&mut self, s: f64) {
        for v in &mut self.values {
            *v *= s;
        }
    }

    pub fn axpy(&mut self, a: f64, other: &ScalarField) {
        for (v, o) in self.values.iter_mut().zip(&other.values) {
            *v += a * o;
        }
    }
}

/// Components of a vector field; all share one grid.
#[derive(Debug, Clone)]
pub struct VectorField {
    pub components: Vec<ScalarField>,
}

impl VectorField {
    pub fn grid(&self) -> &Arc<Grid> {
        &self.components[0].grid
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn zeros(grid: &Arc<Grid>, dim: usize) -> Self {
        VectorField {
            components: (0..dim).map(|_| ScalarField::zeros(grid)).collect(),
        }
    }

    pub fn divergence(&self) -> Result<ScalarField> {
        let grid = self.grid().clone();
        if self.dim() != grid.dim {
            return Err(Error::DimensionMismatch {
                context: format!(
                    "divergence of a {}-component field on a {}-dimensional grid",
                    self.dim(),
                    grid.dim
                ),
            });
        }
        let mut out = ScalarField::zeros(&grid);
        for (a, comp) in self.components.iter().enumerate() {
            let d = comp.derivative(a, 1)?;
            out.axpy(1.0, &d);
        }
        Ok(out)
    }

    /// Pointwise cross product; both fields must have three components.
    pub fn cross(&self, other: &VectorField) -> Result<VectorField> {
        if self.dim() != 3 || other.dim() != 3 {
            return Err(Error::DimensionMismatch {
                context: "cross product requires 3-component fields".into(),
            });
        }
        let grid = self.grid().clone();
        let mut out = VectorField::zeros(&grid, 3);
        let n = grid.len();
        for i in 0..n {
            let a = [
                self.components[0].values[i],
                self.components[1].values[i],
                self.components[2].values[i],
            ];
            let b = [
                other.components[0].values[i],
                other.components[1].values[i],
                other.components[2].values[i],
            ];
            out.components[0].values[i] = a[1] * b[2] - a[2] * b[1];
            out.components[1].values[i] = a[2] * b[0] - a[0] * b[2];
            out.components[2].values[i] = a[0] * b[1] - a[1] * b[0];
        }
        Ok(out)
    }

    pub fn is_finite(&self) -> bool {
        self.components.iter().all(|c| c.is_finite())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn dirichlet_flag_zeroes_boundary_planes() {
        let g = Grid::new_2d([16, 8], [1.0, 1.0], 4).unwrap();
        let f = ScalarField::from_fn_dirichlet(&g, |x| (PI * x[0]).sin() + 1e-17);
        for i in 0..g.len() {
            if g.on_axis0_boundary(i) {
                assert_eq!(f.values[i], 0.0);
            }
        }
        assert!(f.dirichlet);
    }

    #[test]
    fn spectral_derivative_exact_on_trig() {
        let g = Grid::new_2d([16, 20], [1.0, 1.0], 4).unwrap();
        let f = ScalarField::from_fn(&g, |x| (2.0 * PI * x[1]).sin());
        let d = f.derivative(1, 1).unwrap();
        for i in 0..g.len() {
            let x = g.coords(i);
            assert_relative_eq!(
                d.values[i],
                2.0 * PI * (2.0 * PI * x[1]).cos(),
                epsilon = 1e-11
            );
        }
    }

    #[test]
    fn axis0_derivative_exact_on_quadratic() {
        let g = Grid::new_2d([20, 8], [1.0, 1.0], 4).unwrap();
        let f = ScalarField::from_fn(&g, |x| x[0] * (1.0 - x[0]));
        let d = f.derivative(0, 1).unwrap();
        for i in 0..g.len() {
            let x = g.coords(i);
            assert_relative_eq!(d.values[i], 1.0 - 2.0 * x[0], epsilon = 1e-11);
        }
    }

    #[test]
    fn cross_of_basis_vectors() {
        let g = Grid::new_3d([12, 4, 4], [1.0, 1.0, 1.0], 4).unwrap();
        let mut e1 = VectorField::zeros(&g, 3);
        let mut e2 = VectorField::zeros(&g, 3);
        for i in 0..g.len() {
            e1.components[0].values[i] = 1.0;
            e2.components[1].values[i] = 1.0;
        }
        let c = e1.cross(&e2).unwrap();
        for i in 0..g.len() {
            assert_eq!(c.components[0].values[i], 0.0);
            assert_eq!(c.components[1].values[i], 0.0);
            assert_eq!(c.components[2].values[i], 1.0);
        }
    }

    #[test]
    fn cross_requires_three_components() {
        let g = Grid::new_2d([16, 8], [1.0, 1.0], 4).unwrap();
        let a = VectorField::zeros(&g, 2);
        let b = VectorField::zeros(&g, 2);
        assert!(a.cross(&b).is_err());
    }
}
