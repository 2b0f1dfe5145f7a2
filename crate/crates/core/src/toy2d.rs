//! The 2D model problem div(a(x, grad u)) = h as a discrete objective.
//!
//! The discrete functional is the quadrature of `potential(x, grad u) +
//! h u` where `grad` uses the SBP derivative on axis 0 and Fourier
//! differentiation on the periodic axis. Because the axis-0 quadrature
//! is the SBP norm, the exact gradient of that sum restricted to
//! interior nodes is
//!     -(D0 a1 + D1 a2) + h,
//! i.e. the forward divergence of the flux with the same operators; no
//! separate adjoint code path is needed, and the discrete
//! Euler-Lagrange system is a consistent collocation of the strong
//! form.

use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::flux::{toy_check_hypotheses, ToyFluxModel, ToyFluxReport};
use crate::grid::Grid;
use crate::norms;
use crate::solver::{minimize, Objective, SolveOptions, SolveReport, State, StateLayout};
use serde::Serialize;
use std::sync::Arc;

pub struct ToyProblem {
    pub grid: Arc<Grid>,
    pub flux: Arc<dyn ToyFluxModel>,
    /// Right-hand side h, periodic in the second coordinate.
    pub rhs: ScalarField,
    pub exact_solution: Option<ScalarField>,
    layout: StateLayout,
}

impl ToyProblem {
    pub fn new(grid: Arc<Grid>, flux: Arc<dyn ToyFluxModel>, rhs: ScalarField) -> Result<Self> {
        if grid.dim != 2 {
            return Err(Error::DimensionMismatch {
                context: "the model problem lives on a 2D grid".into(),
            });
        }
        if !Arc::ptr_eq(&rhs.grid, &grid) {
            return Err(Error::GridMismatch);
        }
        if flux.potential([0.0, 0.0], [0.0, 0.0]).is_none() {
            return Err(Error::MissingPotential {
                name: flux.name().into(),
            });
        }
        let layout = StateLayout::new(&grid, 1);
        Ok(ToyProblem {
            grid,
            flux,
            rhs,
            exact_solution: None,
            layout,
        })
    }

    pub fn with_exact_solution(mut self, u_star: ScalarField) -> Self {
        self.exact_solution = Some(u_star);
        self
    }

    /// Energy-side gradient of a full field: (D0 u, D1 u).
    fn energy_grad(&self, u: &ScalarField) -> (ScalarField, ScalarField) {
        let z0 = u.sbp_derivative_axis0();
        let z1 = u.derivative(1, 1).expect("periodic axis exists");
        (z0, z1)
    }

    /// Flux components evaluated at (x, grad u).
    fn flux_fields(&self, z0: &ScalarField, z1: &ScalarField) -> (ScalarField, ScalarField) {
        let mut a1 = ScalarField::zeros(&self.grid);
        let mut a2 = ScalarField::zeros(&self.grid);
        for i in 0..self.grid.len() {
            let c = self.grid.coords(i);
            let a = self
                .flux
                .a([c[0], c[1]], [z0.values[i], z1.values[i]]);
            a1.values[i] = a[0];
            a2.values[i] = a[1];
        }
        (a1, a2)
    }

    /// Forward divergence with the energy operators.
    fn energy_div(&self, a1: &ScalarField, a2: &ScalarField) -> ScalarField {
        let mut d = a1.sbp_derivative_axis0();
        let d2 = a2.derivative(1, 1).expect("periodic axis exists");
        d.axpy(1.0, &d2);
        d
    }

    pub fn functional(&self, u: &ScalarField) -> f64 {
        let (z0, z1) = self.energy_grad(u);
        let g = &self.grid;
        norms::kahan_sum((0..g.len()).map(|i| {
            let c = g.coords(i);
            let gamma = self
                .flux
                .potential([c[0], c[1]], [z0.values[i], z1.values[i]])
                .expect("checked at construction");
            g.quad_weight(i) * (gamma + self.rhs.values[i] * u.values[i])
        }))
    }

    /// -div(a(x, grad u)) + h on the full grid (interior rows are the
    /// exact derivative of the discrete functional).
    pub fn gradient_field(&self, u: &ScalarField) -> ScalarField {
        let (z0, z1) = self.energy_grad(u);
        let (a1, a2) = self.flux_fields(&z0, &z1);
        let mut out = self.energy_div(&a1, &a2);
        out.scale(-1.0);
        out.axpy(1.0, &self.rhs);
        out
    }

    /// -div(J_a(x, grad u) grad v) on the full grid.
    pub fn hessian_apply_field(&self, u: &ScalarField, v: &ScalarField) -> ScalarField {
        let (z0, z1) = self.energy_grad(u);
        let (dv0, dv1) = self.energy_grad(v);
        let mut b1 = ScalarField::zeros(&self.grid);
        let mut b2 = ScalarField::zeros(&self.grid);
        for i in 0..self.grid.len() {
            let c = self.grid.coords(i);
            let j = self
                .flux
                .jacobian([c[0], c[1]], [z0.values[i], z1.values[i]]);
            b1.values[i] = j[0][0] * dv0.values[i] + j[0][1] * dv1.values[i];
            b2.values[i] = j[1][0] * dv0.values[i] + j[1][1] * dv1.values[i];
        }
        let mut out = self.energy_div(&b1, &b2);
        out.scale(-1.0);
        out
    }

    /// Weighted L2 norm of the interior residual -div a(x, grad u) + h.
    pub fn residual_norm(&self, u: &ScalarField) -> f64 {
        let r = self.gradient_field(u);
        let mut s = self.layout.zero_state();
        self.layout.extract_into(&r, &mut s, 0);
        self.layout.norm(&s)
    }

    pub fn state_to_field(&self, x: &State) -> ScalarField {
        self.layout.embed(x, 0)
    }

    pub fn field_to_state(&self, u: &ScalarField) -> State {
        let mut x = self.layout.zero_state();
        self.layout.extract_into(u, &mut x, 0);
        x
    }
}

impl Objective for ToyProblem {
    fn layout(&self) -> &StateLayout {
        &self.layout
    }

    fn value(&self, x: &State) -> f64 {
        self.functional(&self.layout.embed(x, 0))
    }

    fn gradient(&self, x: &State) -> State {
        let u = self.layout.embed(x, 0);
        let g = self.gradient_field(&u);
        let mut out = self.layout.zero_state();
        self.layout.extract_into(&g, &mut out, 0);
        out
    }

    fn hessian_apply(&self, x: &State, d: &State) -> State {
        let u = self.layout.embed(x, 0);
        let v = self.layout.embed(d, 0);
        let h = self.hessian_apply_field(&u, &v);
        let mut out = self.layout.zero_state();
        self.layout.extract_into(&h, &mut out, 0);
        out
    }

    /// max |grad u| against the flux ball |z| <= rho.
    fn monitored_magnitude(&self, x: &State) -> Option<f64> {
        let u = self.layout.embed(x, 0);
        let (z0, z1) = self.energy_grad(&u);
        let mut m = 0.0_f64;
        for i in 0..self.grid.len() {
            m = m.max(z0.values[i].hypot(z1.values[i]));
        }
        Some(m)
    }
}

/// Manufactured right-hand side: h = div(a(x, grad u_star)) with the
/// same discrete operators the gradient uses, so `u_star` is an exact
/// discrete critical point.
pub fn manufactured_rhs(
    grid: &Arc<Grid>,
    flux: &Arc<dyn ToyFluxModel>,
    u_star: &ScalarField,
) -> Result<ScalarField> {
    let zero_rhs = ScalarField::zeros(grid);
    let pb = ToyProblem::new(grid.clone(), flux.clone(), zero_rhs)?;
    let (z0, z1) = pb.energy_grad(u_star);
    let (a1, a2) = pb.flux_fields(&z0, &z1);
    Ok(pb.energy_div(&a1, &a2))
}

/// Everything a solve run reports beyond the raw minimization history.
#[derive(Debug, Clone, Serialize)]
pub struct ToyArtifacts {
    pub hypotheses: ToyFluxReport,
    pub residual_l2: f64,
    /// max |grad u| across accepted iterates vs the flux ball radius.
    pub max_gradient_magnitude: f64,
    pub rho: f64,
    pub ball_excursion: bool,
    pub error_vs_exact_l2: Option<f64>,
}

pub fn toy_solve(
    pb: &ToyProblem,
    opts: &SolveOptions,
    seed: u64,
) -> Result<(ScalarField, SolveReport, ToyArtifacts)> {
    let hypotheses = toy_check_hypotheses(
        pb.flux.as_ref(),
        [pb.grid.extents[0], pb.grid.extents[1]],
        200,
        seed,
    );
    let x0 = pb.layout.zero_state();
    let (x, report) = minimize(pb, &x0, opts)?;
    let u = pb.state_to_field(&x);
    let residual_l2 = pb.residual_norm(&u);
    let max_grad = report.max_monitored.unwrap_or(0.0);
    let error_vs_exact_l2 = pb.exact_solution.as_ref().map(|star| {
        let mut diff = u.clone();
        diff.axpy(-1.0, star);
        norms::l2_norm(&diff)
    });
    let artifacts = ToyArtifacts {
        hypotheses,
        residual_l2,
        max_gradient_magnitude: max_grad,
        rho: pb.flux.rho(),
        ball_excursion: max_grad > pb.flux.rho(),
        error_vs_exact_l2,
    };
    Ok((u, report, artifacts))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flux::{IdentityFlux, QuarticFlux};
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn grid64() -> Arc<Grid> {
        Grid::new_2d([33, 32], [1.0, 1.0], 4).unwrap()
    }

    #[test]
    fn functional_zero_at_origin_state() {
        let g = grid64();
        let h = ScalarField::from_fn(&g, |x| (2.0 * PI * x[1]).cos());
        let pb = ToyProblem::new(g, Arc::new(QuarticFlux), h).unwrap();
        let u = ScalarField::zeros(&pb.grid);
        assert_eq!(pb.functional(&u), 0.0);
    }

    #[test]
    fn functional_matches_closed_form_for_identity_flux() {
        // J(u) = 0.5 ||grad u||^2 = 5 pi^2 / 8 for sin(pi x0) sin(2 pi x1).
        let g = Grid::new_2d([129, 64], [1.0, 1.0], 4).unwrap();
        let h = ScalarField::zeros(&g);
        let pb = ToyProblem::new(g, Arc::new(IdentityFlux), h).unwrap();
        let u = ScalarField::from_fn_dirichlet(&pb.grid, |x| {
            (PI * x[0]).sin() * (2.0 * PI * x[1]).sin()
        });
        let exact = 5.0 * PI * PI / 8.0;
        assert_relative_eq!(pb.functional(&u), exact, max_relative = 1e-7);
    }

    #[test]
    fn gradient_at_zero_equals_rhs_on_interior() {
        let g = grid64();
        let h = ScalarField::from_fn(&g, |x| (PI * x[0]).sin() + (2.0 * PI * x[1]).cos());
        let pb = ToyProblem::new(g.clone(), Arc::new(QuarticFlux), h.clone()).unwrap();
        let u = ScalarField::zeros(&g);
        let grad = pb.gradient_field(&u);
        for i in 0..g.len() {
            if !g.on_axis0_boundary(i) {
                assert_relative_eq!(grad.values[i], h.values[i], epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn identity_flux_hessian_is_state_independent_laplacian() {
        let g = grid64();
        let h = ScalarField::zeros(&g);
        let pb = ToyProblem::new(g.clone(), Arc::new(IdentityFlux), h).unwrap();
        let u1 = ScalarField::from_fn_dirichlet(&g, |x| (PI * x[0]).sin() * (2.0 * PI * x[1]).cos());
        let u2 = ScalarField::zeros(&g);
        let v = ScalarField::from_fn_dirichlet(&g, |x| {
            (2.0 * PI * x[0]).sin() * (4.0 * PI * x[1]).sin()
        });
        let h1 = pb.hessian_apply_field(&u1, &v);
        let h2 = pb.hessian_apply_field(&u2, &v);
        for i in 0..g.len() {
            assert_relative_eq!(h1.values[i], h2.values[i], epsilon = 1e-11);
        }
    }

    #[test]
    fn manufactured_state_is_exact_critical_point() {
        let g = grid64();
        let flux: Arc<dyn ToyFluxModel> = Arc::new(QuarticFlux);
        let u_star = ScalarField::from_fn_dirichlet(&g, |x| {
            0.05 * (PI * x[0]).sin() * (2.0 * PI * x[1]).sin()
        });
        let h = manufactured_rhs(&g, &flux, &u_star).unwrap();
        let pb = ToyProblem::new(g, flux, h).unwrap();
        let grad = pb.gradient_field(&u_star);
        for (i, v) in grad.values.iter().enumerate() {
            if !pb.grid.on_axis0_boundary(i) {
                assert!(v.abs() < 1e-12, "residual {v} at node {i}");
            }
        }
    }

    #[test]
    fn missing_potential_is_a_configuration_error() {
        struct NoPotential;
        impl ToyFluxModel for NoPotential {
            fn name(&self) -> &'static str {
                "nopot"
            }
            fn a(&self, _x: [f64; 2], z: [f64; 2]) -> [f64; 2] {
                z
            }
            fn jacobian(&self, _x: [f64; 2], _z: [f64; 2]) -> [[f64; 2]; 2] {
                [[1.0, 0.0], [0.0, 1.0]]
            }
            fn potential(&self, _x: [f64; 2], _z: [f64; 2]) -> Option<f64> {
                None
            }
            fn rho(&self) -> f64 {
                1.0
            }
        }
        let g = grid64();
        let h = ScalarField::zeros(&g);
        match ToyProblem::new(g, Arc::new(NoPotential), h) {
            Err(Error::MissingPotential { .. }) => {}
            Err(other) => panic!("unexpected error {other}"),
            Ok(_) => panic!("construction should fail without a potential"),
        }
    }
}
