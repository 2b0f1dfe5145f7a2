//! The Bernoulli function H(u, v) and its lattice-periodicity check.
//!
//! The gradient of an admissible H must admit the two vectorial periods
//! (P_y d2 f_bar, P_y d2 g_bar) and (P_z d3 f_bar, P_z d3 g_bar); H
//! itself carries no periodicity requirement.

use super::background::Background;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::f64::consts::TAU;

pub trait BernoulliModel: Send + Sync {
    fn name(&self) -> &'static str;
    fn h(&self, u: f64, v: f64) -> f64;
    fn grad(&self, u: f64, v: f64) -> [f64; 2];
    fn hess(&self, u: f64, v: f64) -> [[f64; 2]; 2];
}

/// H = 0; every defect vanishes.
pub struct ZeroBernoulli;

impl BernoulliModel for ZeroBernoulli {
    fn name(&self) -> &'static str {
        "zero"
    }
    fn h(&self, _u: f64, _v: f64) -> f64 {
        0.0
    }
    fn grad(&self, _u: f64, _v: f64) -> [f64; 2] {
        [0.0, 0.0]
    }
    fn hess(&self, _u: f64, _v: f64) -> [[f64; 2]; 2] {
        [[0.0; 2]; 2]
    }
}

/// H = c (u^2 + v^2). Its gradient admits no nonzero period, so the
/// admissibility check reports a nonzero defect on every valid lattice;
/// running with it is an explicit opt-in.
pub struct QuadraticBernoulli {
    pub c: f64,
}

impl BernoulliModel for QuadraticBernoulli {
    fn name(&self) -> &'static str {
        "quadratic"
    }
    fn h(&self, u: f64, v: f64) -> f64 {
        self.c * (u * u + v * v)
    }
    fn grad(&self, u: f64, v: f64) -> [f64; 2] {
        [2.0 * self.c * u, 2.0 * self.c * v]
    }
    fn hess(&self, _u: f64, _v: f64) -> [[f64; 2]; 2] {
        [[2.0 * self.c, 0.0], [0.0, 2.0 * self.c]]
    }
}

/// Trigonometric H built on the dual lattice of the two period vectors,
/// so the periodicity of grad H holds by construction:
///   H(w) = sum_j amp_j (1 - cos(2 pi k_j . w)) / (2 pi)
/// with k_j dual to the periods.
pub struct LatticeTrigBernoulli {
    /// (dual vector, amplitude) per mode.
    pub modes: Vec<([f64; 2], f64)>,
}

impl LatticeTrigBernoulli {
    /// One mode per dual-basis vector, both with amplitude `amp`.
    ///
    /// Fails (returns None) if the period vectors are linearly dependent,
    /// which a valid background never produces.
    pub fn from_background(bg: &Background, periods: [f64; 2], amp: f64) -> Option<Self> {
        let py = [periods[0] * bg.grad_f[1], periods[0] * bg.grad_g[1]];
        let pz = [periods[1] * bg.grad_f[2], periods[1] * bg.grad_g[2]];
        let det = py[0] * pz[1] - py[1] * pz[0];
        if det.abs() < 1e-14 {
            return None;
        }
        // Rows of the inverse of [py; pz]: k1 . py = 1, k1 . pz = 0, etc.
        let k1 = [pz[1] / det, -pz[0] / det];
        let k2 = [-py[1] / det, py[0] / det];
        Some(LatticeTrigBernoulli {
            modes: vec![(k1, amp), (k2, amp)],
        })
    }
}

impl BernoulliModel for LatticeTrigBernoulli {
    fn name(&self) -> &'static str {
        "lattice_trig"
    }
    fn h(&self, u: f64, v: f64) -> f64 {
        self.modes
            .iter()
            .map(|(k, a)| a * (1.0 - (TAU * (k[0] * u + k[1] * v)).cos()) / TAU)
            .sum()
    }
    fn grad(&self, u: f64, v: f64) -> [f64; 2] {
        let mut g = [0.0, 0.0];
        for (k, a) in &self.modes {
            let s = a * (TAU * (k[0] * u + k[1] * v)).sin();
            g[0] += s * k[0];
            g[1] += s * k[1];
        }
        g
    }
    fn hess(&self, u: f64, v: f64) -> [[f64; 2]; 2] {
        let mut hmat = [[0.0; 2]; 2];
        for (k, a) in &self.modes {
            let c = a * TAU * (TAU * (k[0] * u + k[1] * v)).cos();
            hmat[0][0] += c * k[0] * k[0];
            hmat[0][1] += c * k[0] * k[1];
            hmat[1][0] += c * k[1] * k[0];
            hmat[1][1] += c * k[1] * k[1];
        }
        hmat
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BernoulliCheck {
    pub samples: usize,
    /// max over samples and both period vectors of
    /// |grad H(w + period) - grad H(w)|.
    pub periodicity_defect: f64,
    /// sup |grad H| over the sampled box (smallness surrogate).
    pub grad_sup: f64,
    /// max |grad H - fd(H)| (central differences, analytic cross-check).
    pub grad_fd_defect: f64,
}

/// Sample the periodicity of grad H over both lattice periods of the
/// background and report the defects. Report-only.
pub fn bernoulli_check(
    model: &dyn BernoulliModel,
    bg: &Background,
    periods: [f64; 2],
    samples: usize,
    seed: u64,
) -> BernoulliCheck {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let period_vecs = [
        [periods[0] * bg.grad_f[1], periods[0] * bg.grad_g[1]],
        [periods[1] * bg.grad_f[2], periods[1] * bg.grad_g[2]],
    ];
    let box_half = 3.0;
    let mut periodicity_defect = 0.0_f64;
    let mut grad_sup = 0.0_f64;
    let mut grad_fd_defect = 0.0_f64;
    let fd = 1e-6;
    for _ in 0..samples {
        let u = (rng.gen::<f64>() * 2.0 - 1.0) * box_half;
        let v = (rng.gen::<f64>() * 2.0 - 1.0) * box_half;
        let g0 = model.grad(u, v);
        grad_sup = grad_sup.max(g0[0].hypot(g0[1]));
        for p in period_vecs {
            let gp = model.grad(u + p[0], v + p[1]);
            periodicity_defect = periodicity_defect
                .max((gp[0] - g0[0]).abs())
                .max((gp[1] - g0[1]).abs());
        }
        let du = (model.h(u + fd, v) - model.h(u - fd, v)) / (2.0 * fd);
        let dv = (model.h(u, v + fd) - model.h(u, v - fd)) / (2.0 * fd);
        grad_fd_defect = grad_fd_defect
            .max((du - g0[0]).abs())
            .max((dv - g0[1]).abs());
    }
    BernoulliCheck {
        samples,
        periodicity_defect,
        grad_sup,
        grad_fd_defect,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_model_has_no_defects() {
        let bg = Background::shear_yz();
        let rep = bernoulli_check(&ZeroBernoulli, &bg, [1.0, 1.0], 100, 1);
        assert_eq!(rep.periodicity_defect, 0.0);
        assert_eq!(rep.grad_sup, 0.0);
    }

    #[test]
    fn lattice_trig_is_periodic_by_construction() {
        let bg = Background::shear_yz();
        let model = LatticeTrigBernoulli::from_background(&bg, [1.0, 1.0], 0.01).unwrap();
        let rep = bernoulli_check(&model, &bg, [1.0, 1.0], 200, 2);
        assert!(rep.periodicity_defect < 1e-12, "{}", rep.periodicity_defect);
        assert!(rep.grad_fd_defect < 1e-8);
        assert!(rep.grad_sup > 0.0);
    }

    #[test]
    fn lattice_trig_on_skew_background() {
        let bg = Background::new([0.3, 1.0, 0.2], [-0.1, 0.4, 1.0]).unwrap();
        let model = LatticeTrigBernoulli::from_background(&bg, [1.0, 0.5], 0.02).unwrap();
        let rep = bernoulli_check(&model, &bg, [1.0, 0.5], 200, 3);
        assert!(rep.periodicity_defect < 1e-12);
    }

    #[test]
    fn quadratic_model_defect_is_visible() {
        let bg = Background::shear_yz();
        let rep = bernoulli_check(&QuadraticBernoulli { c: 0.001 }, &bg, [1.0, 1.0], 100, 4);
        assert!(rep.periodicity_defect > 1e-4);
    }

    #[test]
    fn constant_gradient_is_periodic_for_any_periods() {
        struct LinearH;
        impl BernoulliModel for LinearH {
            fn name(&self) -> &'static str {
                "linear"
            }
            fn h(&self, u: f64, _v: f64) -> f64 {
                u
            }
            fn grad(&self, _u: f64, _v: f64) -> [f64; 2] {
                [1.0, 0.0]
            }
            fn hess(&self, _u: f64, _v: f64) -> [[f64; 2]; 2] {
                [[0.0; 2]; 2]
            }
        }
        let bg = Background::shear_yz();
        let rep = bernoulli_check(&LinearH, &bg, [1.0, 1.0], 50, 5);
        assert_eq!(rep.periodicity_defect, 0.0);
    }
}
