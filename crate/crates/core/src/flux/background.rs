//! Affine background pair and the boundary data carried on top of it.

use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::grid::Grid;
use crate::norms;
use serde::Serialize;
use std::sync::Arc;

/// Affine pair (f_bar, g_bar) with constant gradients. The full fields
/// are split as `f = f_bar + periodic part`, so the periodic machinery
/// never differentiates the affine growth directly.
#[derive(Debug, Clone)]
pub struct Background {
    pub grad_f: [f64; 3],
    pub grad_g: [f64; 3],
    pub offset_f: f64,
    pub offset_g: f64,
}

impl Background {
    /// The catalog default: f_bar = y, g_bar = z, whose gradients cross
    /// to (1, 0, 0).
    pub fn shear_yz() -> Self {
        Background {
            grad_f: [0.0, 1.0, 0.0],
            grad_g: [0.0, 0.0, 1.0],
            offset_f: 0.0,
            offset_g: 0.0,
        }
    }

    pub fn new(grad_f: [f64; 3], grad_g: [f64; 3]) -> Result<Self> {
        let bg = Background {
            grad_f,
            grad_g,
            offset_f: 0.0,
            offset_g: 0.0,
        };
        if bg.v_bar()[0].abs() < 1e-14 {
            return Err(Error::DegenerateBackground);
        }
        Ok(bg)
    }

    /// Constant velocity of the background: grad f_bar x grad g_bar.
    pub fn v_bar(&self) -> [f64; 3] {
        let a = self.grad_f;
        let b = self.grad_g;
        [
            a[1] * b[2] - a[2] * b[1],
            a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0],
        ]
    }

    pub fn f_value(&self, x: [f64; 3]) -> f64 {
        self.offset_f + self.grad_f[0] * x[0] + self.grad_f[1] * x[1] + self.grad_f[2] * x[2]
    }

    pub fn g_value(&self, x: [f64; 3]) -> f64 {
        self.offset_g + self.grad_g[0] * x[0] + self.grad_g[1] * x[1] + self.grad_g[2] * x[2]
    }
}

/// Diagnostics attached to sampled boundary data.
#[derive(Debug, Clone, Serialize)]
pub struct BoundaryDiagnostics {
    /// max |pert(y + P) - pert(y)| over wrap sample points, both axes.
    pub periodicity_defect: f64,
    /// Discrete surrogate of the H^6 size of (grad f0 - grad f_bar,
    /// grad g0 - grad g_bar); reported, never asserted.
    pub perturbation_h6_surrogate: f64,
}

/// Smooth boundary data (f0, g0) stored as the periodic parts
/// `f0 - f_bar`, `g0 - g_bar` sampled on the 3D grid.
#[derive(Debug, Clone)]
pub struct BoundaryData {
    pub pert_f: ScalarField,
    pub pert_g: ScalarField,
    pub diagnostics: BoundaryDiagnostics,
}

impl BoundaryData {
    /// Build from closures giving the periodic parts. The closures are
    /// probed across one period to measure the periodicity defect.
    pub fn from_fns(
        grid: &Arc<Grid>,
        pert_f_fn: impl Fn([f64; 3]) -> f64,
        pert_g_fn: impl Fn([f64; 3]) -> f64,
    ) -> Result<Self> {
        let pert_f = ScalarField::from_fn(grid, &pert_f_fn);
        let pert_g = ScalarField::from_fn(grid, &pert_g_fn);

        let mut defect = 0.0_f64;
        let probes = 7;
        for axis in 1..grid.dim {
            let period = grid.extents[axis];
            for i in 0..probes {
                let t = i as f64 / probes as f64;
                let mut x = [0.37 * grid.extents[0], 0.21 * grid.extents[1], 0.0];
                if grid.dim > 2 {
                    x[2] = 0.63 * grid.extents[2];
                }
                x[axis] = t * period;
                let mut xs = x;
                xs[axis] += period;
                defect = defect
                    .max((pert_f_fn(xs) - pert_f_fn(x)).abs())
                    .max((pert_g_fn(xs) - pert_g_fn(x)).abs());
            }
        }

        let mut surrogate_sq = 0.0;
        for pert in [&pert_f, &pert_g] {
            let grad = pert.gradient()?;
            for comp in &grad.components {
                let h6 = norms::hs_norm(comp, 6)?;
                surrogate_sq += h6 * h6;
            }
        }

        Ok(BoundaryData {
            pert_f,
            pert_g,
            diagnostics: BoundaryDiagnostics {
                periodicity_defect: defect,
                perturbation_h6_surrogate: surrogate_sq.sqrt(),
            },
        })
    }

    /// Unperturbed boundary data: f0 = f_bar, g0 = g_bar.
    pub fn unperturbed(grid: &Arc<Grid>) -> Result<Self> {
        Self::from_fns(grid, |_| 0.0, |_| 0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn shear_background_velocity_is_e1() {
        let bg = Background::shear_yz();
        assert_eq!(bg.v_bar(), [1.0, 0.0, 0.0]);
    }

    #[test]
    fn degenerate_background_rejected() {
        // Parallel gradients: v_bar = 0.
        assert!(Background::new([0.0, 1.0, 0.0], [0.0, 2.0, 0.0]).is_err());
    }

    #[test]
    fn periodic_perturbation_has_zero_defect() {
        let g = Grid::new_3d([16, 8, 8], [1.0, 1.0, 1.0], 4).unwrap();
        let bd = BoundaryData::from_fns(
            &g,
            |x| 0.01 * (PI * x[0]).sin() * (2.0 * PI * x[2]).cos(),
            |_| 0.0,
        )
        .unwrap();
        assert!(bd.diagnostics.periodicity_defect < 1e-14);
        assert!(bd.diagnostics.perturbation_h6_surrogate > 0.0);
    }

    #[test]
    fn nonperiodic_perturbation_reported() {
        let g = Grid::new_3d([16, 8, 8], [1.0, 1.0, 1.0], 4).unwrap();
        let bd = BoundaryData::from_fns(&g, |x| 0.01 * (1.7 * PI * x[1]).sin(), |_| 0.0).unwrap();
        assert!(bd.diagnostics.periodicity_defect > 1e-4);
    }
}
