//! Matrix-free minimization of discrete convex functionals: the state
//! and objective abstractions, Newton-CG, and derivative checks.

pub mod newton;
pub mod pcg;

pub use newton::minimize;

use crate::field::ScalarField;
use crate::grid::Grid;
use crate::norms;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::sync::Arc;

/// Flattened unknowns: one or two Dirichlet scalar fields restricted to
/// interior nodes.
#[derive(Debug, Clone)]
pub struct State(pub Vec<f64>);

impl State {
    pub fn zeros(len: usize) -> Self {
        State(vec![0.0; len])
    }

    pub fn axpy(&mut self, a: f64, other: &State) {
        for (x, y) in self.0.iter_mut().zip(&other.0) {
            *x += a * y;
        }
    }

    pub fn scale(&mut self, s: f64) {
        for x in &mut self.0 {
            *x *= s;
        }
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }
}

/// Shape of a state: grid, number of fields, interior-node bookkeeping
/// and the quadrature-weighted inner product.
#[derive(Debug)]
pub struct StateLayout {
    pub grid: Arc<Grid>,
    pub nfields: usize,
    interior: Vec<usize>,
    weights: Vec<f64>,
}

impl StateLayout {
    pub fn new(grid: &Arc<Grid>, nfields: usize) -> Self {
        let interior: Vec<usize> = (0..grid.len())
            .filter(|&i| !grid.on_axis0_boundary(i))
            .collect();
        let weights = interior.iter().map(|&i| grid.quad_weight(i)).collect();
        StateLayout {
            grid: grid.clone(),
            nfields,
            interior,
            weights,
        }
    }

    pub fn len(&self) -> usize {
        self.nfields * self.interior.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn interior_len(&self) -> usize {
        self.interior.len()
    }

    pub fn interior_nodes(&self) -> &[usize] {
        &self.interior
    }

    pub fn weight(&self, interior_idx: usize) -> f64 {
        self.weights[interior_idx]
    }

    pub fn zero_state(&self) -> State {
        State::zeros(self.len())
    }

    /// Embed field `k` of the state into a full grid field (zeros on the
    /// Dirichlet planes).
    pub fn embed(&self, x: &State, k: usize) -> ScalarField {
        let mut f = ScalarField::zeros(&self.grid);
        let off = k * self.interior.len();
        for (j, &node) in self.interior.iter().enumerate() {
            f.values[node] = x.0[off + j];
        }
        f.dirichlet = true;
        f
    }

    /// Write the interior values of a full field into slot `k`.
    pub fn extract_into(&self, f: &ScalarField, x: &mut State, k: usize) {
        let off = k * self.interior.len();
        for (j, &node) in self.interior.iter().enumerate() {
            x.0[off + j] = f.values[node];
        }
    }

    /// Quadrature-weighted inner product over all fields.
    pub fn inner(&self, a: &State, b: &State) -> f64 {
        let ni = self.interior.len();
        norms::kahan_sum((0..self.len()).map(|i| {
            let w = self.weights[i % ni];
            w * a.0[i] * b.0[i]
        }))
    }

    pub fn norm(&self, a: &State) -> f64 {
        self.inner(a, a).max(0.0).sqrt()
    }

    /// Discrete H^s surrogate over the embedded fields: square root of
    /// the summed squared seminorms of every field.
    pub fn hs_surrogate(&self, x: &State, s: usize) -> crate::Result<f64> {
        let mut total = 0.0;
        for k in 0..self.nfields {
            let f = self.embed(x, k);
            let v = norms::hs_norm(&f, s)?;
            total += v * v;
        }
        Ok(total.sqrt())
    }

    /// Random state with entries uniform in (-1, 1), normalized to unit
    /// weighted norm.
    pub fn random_unit(&self, rng: &mut ChaCha8Rng) -> State {
        let mut s = State(
            (0..self.len())
                .map(|_| rng.gen::<f64>() * 2.0 - 1.0)
                .collect(),
        );
        let n = self.norm(&s);
        if n > 0.0 {
            s.scale(1.0 / n);
        }
        s
    }
}

/// Value / gradient / Hessian-apply of a discrete functional over a
/// state of Dirichlet fields. The gradient must be the exact derivative
/// of `value` (discretize-then-differentiate) represented in the
/// quadrature-weighted L2 product; `hessian_apply` must be symmetric in
/// that product.
pub trait Objective {
    fn layout(&self) -> &StateLayout;
    fn value(&self, x: &State) -> f64;
    fn gradient(&self, x: &State) -> State;
    fn hessian_apply(&self, x: &State, d: &State) -> State;

    /// Optional problem-specific magnitude tracked across accepted
    /// iterates (e.g. max |grad u| against the flux ball).
    fn monitored_magnitude(&self, _x: &State) -> Option<f64> {
        None
    }
}

/// Solver options. All tolerances are strictly positive.
#[derive(Debug, Clone, Serialize)]
pub struct SolveOptions {
    /// Stop when the weighted L2 norm of the gradient drops below this.
    pub gradient_tol: f64,
    pub max_newton_iterations: usize,
    pub max_cg_iterations: usize,
    /// Relative residual reduction requested from CG.
    pub cg_tol: f64,
    /// Armijo slope fraction.
    pub armijo_c1: f64,
    /// Step multiplier per backtrack.
    pub backtrack_factor: f64,
    /// Line-search failure after this many reductions.
    pub max_backtracks: usize,
    /// Radius of the monitored H^s ball.
    pub radius: f64,
    /// Order of the Sobolev surrogate norm reported at the end.
    pub sobolev_order: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            gradient_tol: 1e-10,
            max_newton_iterations: 30,
            max_cg_iterations: 500,
            cg_tol: 1e-10,
            armijo_c1: 1e-4,
            backtrack_factor: 0.5,
            max_backtracks: 40,
            radius: 1.0,
            sobolev_order: 5,
        }
    }
}

/// One accepted Newton iteration.
#[derive(Debug, Clone, Serialize)]
pub struct IterationRecord {
    pub iteration: usize,
    pub value: f64,
    pub gradient_norm: f64,
    pub step_length: f64,
    pub cg_iterations: usize,
    pub curvature_fallback: bool,
}

/// Convergence history and convexity indicators of one solve.
#[derive(Debug, Clone, Serialize)]
pub struct SolveReport {
    pub converged: bool,
    pub iterations: Vec<IterationRecord>,
    pub final_value: f64,
    pub final_gradient_norm: f64,
    /// H^s surrogate norm of the final state.
    pub hs_norm: f64,
    /// Monitored ball radius from the options.
    pub radius: f64,
    pub within_ball: bool,
    /// Smallest Rayleigh quotient of the Hessian seen along CG
    /// directions (positive throughout a strictly convex solve).
    pub min_rayleigh: f64,
    pub line_search_failure: bool,
    /// Largest problem-specific monitored magnitude across iterates.
    pub max_monitored: Option<f64>,
}

/// Compare the analytic directional derivative with central differences
/// over random unit directions; the step is swept over 1e-4, 1e-5, 1e-6
/// and the best (smallest) worst-case relative defect is returned.
pub fn gradient_check(obj: &dyn Objective, x: &State, directions: usize, seed: u64) -> f64 {
    let layout = obj.layout();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = obj.gradient(x);
    let dirs: Vec<State> = (0..directions).map(|_| layout.random_unit(&mut rng)).collect();
    let mut best = f64::INFINITY;
    for eps in [1e-4, 1e-5, 1e-6] {
        let mut worst = 0.0_f64;
        for d in &dirs {
            let analytic = layout.inner(&g, d);
            let mut xp = x.clone();
            xp.axpy(eps, d);
            let mut xm = x.clone();
            xm.axpy(-eps, d);
            let fd = (obj.value(&xp) - obj.value(&xm)) / (2.0 * eps);
            let denom = analytic.abs().max(fd.abs()).max(1e-14);
            worst = worst.max((analytic - fd).abs() / denom);
        }
        best = best.min(worst);
    }
    best
}

/// Relative symmetry defect of the Hessian over random direction pairs.
pub fn hessian_symmetry_check(obj: &dyn Objective, x: &State, pairs: usize, seed: u64) -> f64 {
    let layout = obj.layout();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0_f64;
    for _ in 0..pairs {
        let d1 = layout.random_unit(&mut rng);
        let d2 = layout.random_unit(&mut rng);
        let h1 = obj.hessian_apply(x, &d1);
        let h2 = obj.hessian_apply(x, &d2);
        let a = layout.inner(&h1, &d2);
        let b = layout.inner(&d1, &h2);
        let denom = a.abs().max(b.abs()).max(1e-14);
        worst = worst.max((a - b).abs() / denom);
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn embed_extract_round_trip() {
        let g = Grid::new_2d([16, 8], [1.0, 1.0], 4).unwrap();
        let layout = StateLayout::new(&g, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let x = layout.random_unit(&mut rng);
        let f0 = layout.embed(&x, 0);
        let f1 = layout.embed(&x, 1);
        assert!(f0.dirichlet && f1.dirichlet);
        let mut back = layout.zero_state();
        layout.extract_into(&f0, &mut back, 0);
        layout.extract_into(&f1, &mut back, 1);
        for (a, b) in x.0.iter().zip(&back.0) {
            assert_eq!(a, b);
        }
    }

    #[test]
    fn weighted_inner_matches_field_inner_for_dirichlet_fields() {
        let g = Grid::new_2d([16, 8], [1.0, 1.0], 4).unwrap();
        let layout = StateLayout::new(&g, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let x = layout.random_unit(&mut rng);
        let f = layout.embed(&x, 0);
        let field_inner = norms::inner(&f, &f);
        let state_inner = layout.inner(&x, &x);
        approx::assert_relative_eq!(field_inner, state_inner, epsilon = 1e-14);
    }
}
