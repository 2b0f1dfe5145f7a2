//! Nonlinear flux maps: the two-component model flux a(x, z) with its
//! hypotheses, and the fixed six-component hydrodynamic flux.

pub mod background;
pub mod bernoulli;
pub mod hydro;

pub use background::{Background, BoundaryData};
pub use bernoulli::{bernoulli_check, BernoulliCheck, BernoulliModel};

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// Two-component flux map `a(x, z)` with analytic Jacobian in `z` and an
/// optional scalar potential with `a = grad_z potential`.
///
/// New fluxes are registered at compile time by implementing this trait;
/// there is no runtime expression parsing.
pub trait ToyFluxModel: Send + Sync {
    fn name(&self) -> &'static str;
    fn a(&self, x: [f64; 2], z: [f64; 2]) -> [f64; 2];
    /// Jacobian of `a` with respect to `z` (must be the exact derivative;
    /// the solver consumes it, finite differences only cross-check it).
    fn jacobian(&self, x: [f64; 2], z: [f64; 2]) -> [[f64; 2]; 2];
    /// Scalar potential, normalized so that `potential(x, 0) = 0`.
    fn potential(&self, x: [f64; 2], z: [f64; 2]) -> Option<f64>;
    /// Coercivity constant: `p^T J_a(x,z) p >= rho * p1^2` is claimed for
    /// `|z| <= rho`.
    fn rho(&self) -> f64;
}

/// `a(z) = z`: potential `|z|^2 / 2`.
pub struct IdentityFlux;

impl ToyFluxModel for IdentityFlux {
    fn name(&self) -> &'static str {
        "identity"
    }
    fn a(&self, _x: [f64; 2], z: [f64; 2]) -> [f64; 2] {
        z
    }
    fn jacobian(&self, _x: [f64; 2], _z: [f64; 2]) -> [[f64; 2]; 2] {
        [[1.0, 0.0], [0.0, 1.0]]
    }
    fn potential(&self, _x: [f64; 2], z: [f64; 2]) -> Option<f64> {
        Some(0.5 * (z[0] * z[0] + z[1] * z[1]))
    }
    fn rho(&self) -> f64 {
        1.0
    }
}

/// `a(z) = M z` with a constant symmetric matrix M.
pub struct LinearFlux {
    pub m: [[f64; 2]; 2],
    pub rho: f64,
}

impl LinearFlux {
    pub fn new(m11: f64, m12: f64, m22: f64, rho: f64) -> Self {
        LinearFlux {
            m: [[m11, m12], [m12, m22]],
            rho,
        }
    }
}

impl ToyFluxModel for LinearFlux {
    fn name(&self) -> &'static str {
        "linear"
    }
    fn a(&self, _x: [f64; 2], z: [f64; 2]) -> [f64; 2] {
        [
            self.m[0][0] * z[0] + self.m[0][1] * z[1],
            self.m[1][0] * z[0] + self.m[1][1] * z[1],
        ]
    }
    fn jacobian(&self, _x: [f64; 2], _z: [f64; 2]) -> [[f64; 2]; 2] {
        self.m
    }
    fn potential(&self, _x: [f64; 2], z: [f64; 2]) -> Option<f64> {
        Some(
            0.5 * (self.m[0][0] * z[0] * z[0]
                + 2.0 * self.m[0][1] * z[0] * z[1]
                + self.m[1][1] * z[1] * z[1]),
        )
    }
    fn rho(&self) -> f64 {
        self.rho
    }
}

/// Degenerate quartic flux `a(z) = (z1, z2^3)`: the Jacobian collapses to
/// diag(1, 0) on the ray z2 = 0, so only the first direction is coercive.
pub struct QuarticFlux;

impl ToyFluxModel for QuarticFlux {
    fn name(&self) -> &'static str {
        "quartic"
    }
    fn a(&self, _x: [f64; 2], z: [f64; 2]) -> [f64; 2] {
        [z[0], z[1] * z[1] * z[1]]
    }
    fn jacobian(&self, _x: [f64; 2], z: [f64; 2]) -> [[f64; 2]; 2] {
        [[1.0, 0.0], [0.0, 3.0 * z[1] * z[1]]]
    }
    fn potential(&self, _x: [f64; 2], z: [f64; 2]) -> Option<f64> {
        Some(0.5 * z[0] * z[0] + 0.25 * z[1].powi(4))
    }
    fn rho(&self) -> f64 {
        1.0
    }
}

/// x-dependent variant of the quartic flux,
/// `a(x,z) = (z1 + e s z2^2, 2 e s z1 z2 + z2^3)` with `s = sin(2 pi x2)`.
/// Exercises the x-dependent terms of the theory; for eps != 0 its
/// coercivity margin on the z-ball is genuinely negative along z2 = 0,
/// z1 < 0, which the hypothesis report surfaces.
pub struct XDependentFlux {
    pub eps: f64,
}

impl ToyFluxModel for XDependentFlux {
    fn name(&self) -> &'static str {
        "xdep"
    }
    fn a(&self, x: [f64; 2], z: [f64; 2]) -> [f64; 2] {
        let s = (2.0 * std::f64::consts::PI * x[1]).sin();
        [
            z[0] + self.eps * s * z[1] * z[1],
            2.0 * self.eps * s * z[0] * z[1] + z[1] * z[1] * z[1],
        ]
    }
    fn jacobian(&self, x: [f64; 2], z: [f64; 2]) -> [[f64; 2]; 2] {
        let s = (2.0 * std::f64::consts::PI * x[1]).sin();
        [
            [1.0, 2.0 * self.eps * s * z[1]],
            [2.0 * self.eps * s * z[1], 2.0 * self.eps * s * z[0] + 3.0 * z[1] * z[1]],
        ]
    }
    fn potential(&self, x: [f64; 2], z: [f64; 2]) -> Option<f64> {
        let s = (2.0 * std::f64::consts::PI * x[1]).sin();
        Some(0.5 * z[0] * z[0] + self.eps * s * z[0] * z[1] * z[1] + 0.25 * z[1].powi(4))
    }
    fn rho(&self) -> f64 {
        0.5
    }
}

/// Hypothesis report for a flux model on a sampled (x, z) set.
#[derive(Debug, Clone, Serialize)]
pub struct ToyFluxReport {
    pub samples: usize,
    /// max |J12 - J21| of the analytic Jacobian.
    pub symmetry_defect: f64,
    /// max componentwise |J_analytic - J_fd| (central differences).
    pub jacobian_fd_defect: f64,
    /// min over samples of the smallest eigenvalue of J_a - rho e1 e1^T.
    pub min_coercivity_margin: f64,
    /// max |a(x, 0)|.
    pub origin_defect: f64,
    /// max |a - grad_z potential| by central differences (None without a
    /// potential).
    pub potential_defect: Option<f64>,
}

/// Smallest eigenvalue of a symmetric 2x2 matrix.
fn min_eig_sym2(m: [[f64; 2]; 2]) -> f64 {
    let tr = m[0][0] + m[1][1];
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let disc = (tr * tr - 4.0 * det).max(0.0).sqrt();
    0.5 * (tr - disc)
}

/// Check the structural hypotheses of a flux over `samples` random points
/// (x in the cell, |z| <= rho). Report-only; nothing is enforced.
pub fn toy_check_hypotheses(
    flux: &dyn ToyFluxModel,
    extents: [f64; 2],
    samples: usize,
    seed: u64,
) -> ToyFluxReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rho = flux.rho();
    let mut symmetry_defect = 0.0_f64;
    let mut jacobian_fd_defect = 0.0_f64;
    let mut min_margin = f64::INFINITY;
    let mut origin_defect = 0.0_f64;
    let mut potential_defect: Option<f64> = flux.potential([0.0, 0.0], [0.0, 0.0]).map(|_| 0.0);
    let fd_step = 1e-6;
    for _ in 0..samples {
        let x = [
            rng.gen::<f64>() * extents[0],
            rng.gen::<f64>() * extents[1],
        ];
        // Uniform direction, radius biased towards the shell.
        let theta = rng.gen::<f64>() * std::f64::consts::TAU;
        let r = rho * rng.gen::<f64>().sqrt();
        let z = [r * theta.cos(), r * theta.sin()];

        let j = flux.jacobian(x, z);
        symmetry_defect = symmetry_defect.max((j[0][1] - j[1][0]).abs());

        for p in 0..2 {
            let mut zp = z;
            let mut zm = z;
            zp[p] += fd_step;
            zm[p] -= fd_step;
            let ap = flux.a(x, zp);
            let am = flux.a(x, zm);
            for i in 0..2 {
                let fd = (ap[i] - am[i]) / (2.0 * fd_step);
                jacobian_fd_defect = jacobian_fd_defect.max((fd - j[i][p]).abs());
            }
            if let Some(def) = potential_defect.as_mut() {
                let gp = flux.potential(x, zp).unwrap();
                let gm = flux.potential(x, zm).unwrap();
                let fd = (gp - gm) / (2.0 * fd_step);
                *def = def.max((fd - flux.a(x, z)[p]).abs());
            }
        }

        let shifted = [[j[0][0] - rho, j[0][1]], [j[1][0], j[1][1]]];
        min_margin = min_margin.min(min_eig_sym2(shifted));

        let a0 = flux.a(x, [0.0, 0.0]);
        origin_defect = origin_defect.max(a0[0].abs().max(a0[1].abs()));
    }
    ToyFluxReport {
        samples,
        symmetry_defect,
        jacobian_fd_defect,
        min_coercivity_margin: min_margin,
        origin_defect,
        potential_defect,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_flux_hypotheses_hold() {
        let rep = toy_check_hypotheses(&IdentityFlux, [1.0, 1.0], 200, 7);
        assert!(rep.symmetry_defect < 1e-14);
        assert!(rep.min_coercivity_margin >= -1e-14);
        assert_eq!(rep.origin_defect, 0.0);
        assert!(rep.jacobian_fd_defect < 1e-8);
        assert!(rep.potential_defect.unwrap() < 1e-8);
    }

    #[test]
    fn quartic_flux_margin_nonnegative_with_degenerate_ray() {
        // J_a = diag(1, 3 z2^2): eigenvalues of J - rho e1 e1^T are
        // (1 - rho, 3 z2^2) >= 0 for rho <= 1, hitting 0 on z2 = 0.
        let rep = toy_check_hypotheses(&QuarticFlux, [1.0, 1.0], 500, 11);
        assert!(rep.min_coercivity_margin >= -1e-12);
        assert!(rep.symmetry_defect == 0.0);
    }

    #[test]
    fn linear_flux_margin_sign_matches_psd_criterion() {
        // For M = [[1, .3], [.3, .1]], M - rho e1 e1^T is PSD iff
        // (1 - rho) * 0.1 >= 0.09, i.e. rho <= 0.1.
        let ok = toy_check_hypotheses(&LinearFlux::new(1.0, 0.3, 0.1, 0.1), [1.0, 1.0], 50, 3);
        assert!(ok.min_coercivity_margin >= -1e-12);
        let bad = toy_check_hypotheses(&LinearFlux::new(1.0, 0.3, 0.1, 0.2), [1.0, 1.0], 50, 3);
        assert!(bad.min_coercivity_margin < -1e-3);
    }

    #[test]
    fn xdep_flux_gradient_of_potential_matches() {
        let rep = toy_check_hypotheses(&XDependentFlux { eps: 0.1 }, [1.0, 1.0], 300, 5);
        assert!(rep.potential_defect.unwrap() < 1e-8);
        assert!(rep.jacobian_fd_defect < 1e-7);
        assert!(rep.symmetry_defect < 1e-14);
        // Coercivity genuinely fails on the z-ball for this flux.
        assert!(rep.min_coercivity_margin < 0.0);
    }
}
