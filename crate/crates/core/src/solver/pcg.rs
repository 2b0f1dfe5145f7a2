//! Preconditioned conjugate gradients on the Hessian, with an inverse
//! discrete Laplacian as preconditioner.
//!
//! The preconditioner solves K z = W r where K is the stiffness of a
//! constant-coefficient Laplacian: spectral along the periodic axes,
//! second-order tridiagonal along axis 0, symmetrized by the square
//! roots of the axis-0 quadrature weights so that z -> K^{-1} W z is
//! self-adjoint and positive in the weighted inner product CG runs in.
//! The weakly elliptic Hessians are dominated by their axis-0 coercive
//! part, which this operator captures.

use super::{Objective, State, StateLayout};
use crate::grid::Grid;
use num_complex::Complex;
use std::sync::Arc;

pub struct LaplacePreconditioner {
    grid: Arc<Grid>,
    nfields: usize,
    /// Interior node count along axis 0.
    ni: usize,
    /// sqrt of the axis-0 SBP weights at interior nodes.
    sqrt_w: Vec<f64>,
    inv_h2: f64,
    /// Transverse Laplacian symbol per (k1, k2) node, flattened n1*n2.
    lambda: Vec<f64>,
}

impl LaplacePreconditioner {
    pub fn new(layout: &StateLayout) -> Self {
        let grid = layout.grid.clone();
        let n0 = grid.counts[0];
        let ni = n0 - 2;
        let sqrt_w: Vec<f64> = (1..n0 - 1).map(|i| grid.axis0_weight(i).sqrt()).collect();
        let h = grid.spacing(0);
        let (n1, n2) = (grid.counts[1], grid.counts[2]);
        let mut lambda = vec![0.0; n1 * n2];
        for k1 in 0..n1 {
            let w1 = if grid.dim > 1 {
                grid.fourier(1).wavenumbers[k1]
            } else {
                0.0
            };
            for k2 in 0..n2 {
                let w2 = if grid.dim > 2 {
                    grid.fourier(2).wavenumbers[k2]
                } else {
                    0.0
                };
                lambda[k1 * n2 + k2] = w1 * w1 + w2 * w2;
            }
        }
        LaplacePreconditioner {
            grid,
            nfields: layout.nfields,
            ni,
            sqrt_w,
            inv_h2: 1.0 / (h * h),
            lambda,
        }
    }

    /// z = K^{-1} W r, fieldwise.
    pub fn apply(&self, r: &State) -> State {
        let (n1, n2) = (self.grid.counts[1], self.grid.counts[2]);
        let plane = n1 * n2;
        let ni = self.ni;
        let mut out = State::zeros(r.0.len());
        let mut buf: Vec<Complex<f64>> = vec![Complex::new(0.0, 0.0); ni * plane];
        for field in 0..self.nfields {
            let off = field * ni * plane;
            for (b, v) in buf.iter_mut().zip(r.0[off..off + ni * plane].iter()) {
                *b = Complex::new(*v, 0.0);
            }
            // Forward transform along the periodic axes of each interior
            // plane.
            if self.grid.dim > 1 {
                self.fft_axis(&mut buf, 1, true);
            }
            if self.grid.dim > 2 {
                self.fft_axis(&mut buf, 2, true);
            }
            // Per-mode tridiagonal solve along axis 0.
            let mut rhs = vec![Complex::new(0.0, 0.0); ni];
            let mut cp = vec![0.0; ni];
            let mut dp = vec![Complex::new(0.0, 0.0); ni];
            for mode in 0..plane {
                let lam = self.lambda[mode];
                for i in 0..ni {
                    rhs[i] = buf[i * plane + mode] * self.sqrt_w[i];
                }
                self.thomas(lam, &rhs, &mut cp, &mut dp);
                for i in 0..ni {
                    buf[i * plane + mode] = dp[i] / self.sqrt_w[i];
                }
            }
            if self.grid.dim > 2 {
                self.fft_axis(&mut buf, 2, false);
            }
            if self.grid.dim > 1 {
                self.fft_axis(&mut buf, 1, false);
            }
            let norm = 1.0 / plane as f64;
            for (o, b) in out.0[off..off + ni * plane].iter_mut().zip(buf.iter()) {
                *o = b.re * norm;
            }
        }
        out
    }

    /// Solve (T + lam I) x = rhs with T the Dirichlet second-difference
    /// matrix; `cp`/`dp` are scratch, `dp` holds the solution on return.
    fn thomas(&self, lam: f64, rhs: &[Complex<f64>], cp: &mut [f64], dp: &mut [Complex<f64>]) {
        let ni = rhs.len();
        let a = -self.inv_h2;
        let b = 2.0 * self.inv_h2 + lam;
        cp[0] = a / b;
        dp[0] = rhs[0] / b;
        for i in 1..ni {
            let m = b - a * cp[i - 1];
            cp[i] = a / m;
            dp[i] = (rhs[i] - dp[i - 1] * a) / m;
        }
        for i in (0..ni - 1).rev() {
            let next = dp[i + 1];
            dp[i] -= next * cp[i];
        }
    }

    /// In-place FFT along periodic axis `axis` of the interior block.
    fn fft_axis(&self, buf: &mut [Complex<f64>], axis: usize, forward: bool) {
        let (n1, n2) = (self.grid.counts[1], self.grid.counts[2]);
        let plane = n1 * n2;
        let fd = self.grid.fourier(axis);
        let (len, stride, other, ostride) = if axis == 1 {
            (n1, n2, n2, 1)
        } else {
            (n2, 1, n1, n2)
        };
        let mut pencil = vec![Complex::new(0.0, 0.0); len];
        for i0 in 0..self.ni {
            for o in 0..other {
                let base = i0 * plane + o * ostride;
                for j in 0..len {
                    pencil[j] = buf[base + j * stride];
                }
                if forward {
                    fd.process_forward(&mut pencil);
                } else {
                    fd.process_inverse(&mut pencil);
                }
                for j in 0..len {
                    buf[base + j * stride] = pencil[j];
                }
            }
        }
    }
}

/// Outcome of one truncated-CG solve for the Newton direction.
pub struct CgOutcome {
    pub direction: State,
    pub iterations: usize,
    pub curvature_fallback: bool,
    /// Smallest Rayleigh quotient <Hp, p> / <p, p> encountered.
    pub min_rayleigh: f64,
    pub residual_reduction: f64,
}

/// Truncated preconditioned CG on `hessian_apply(x, .) d = rhs`.
///
/// On non-positive curvature (p^T H p <= 1e-14 |p|^2) the current
/// iterate is returned; if that happens on the very first direction the
/// preconditioned steepest-descent direction is used instead.
pub fn newton_direction(
    obj: &dyn Objective,
    x: &State,
    rhs: &State,
    pre: &LaplacePreconditioner,
    max_iter: usize,
    rel_tol: f64,
) -> CgOutcome {
    let layout = obj.layout();
    let mut d = layout.zero_state();
    let mut r = rhs.clone();
    let r0_norm = layout.norm(&r);
    let mut min_rayleigh = f64::INFINITY;
    if r0_norm == 0.0 {
        return CgOutcome {
            direction: d,
            iterations: 0,
            curvature_fallback: false,
            min_rayleigh,
            residual_reduction: 0.0,
        };
    }
    let mut z = pre.apply(&r);
    let mut p = z.clone();
    let mut rz = layout.inner(&r, &z);
    let mut iterations = 0;
    let mut curvature_fallback = false;
    let mut rnorm = r0_norm;
    for it in 0..max_iter {
        let hp = obj.hessian_apply(x, &p);
        let php = layout.inner(&p, &hp);
        let pp = layout.inner(&p, &p);
        if pp > 0.0 {
            min_rayleigh = min_rayleigh.min(php / pp);
        }
        if php <= 1e-14 * pp {
            if it == 0 {
                d = z.clone();
                curvature_fallback = true;
            }
            break;
        }
        let alpha = rz / php;
        d.axpy(alpha, &p);
        r.axpy(-alpha, &hp);
        iterations = it + 1;
        rnorm = layout.norm(&r);
        if rnorm <= rel_tol * r0_norm {
            break;
        }
        z = pre.apply(&r);
        let rz_new = layout.inner(&r, &z);
        let beta = rz_new / rz;
        let mut p_new = z.clone();
        p_new.axpy(beta, &p);
        p = p_new;
        rz = rz_new;
    }
    CgOutcome {
        direction: d,
        iterations,
        curvature_fallback,
        min_rayleigh,
        residual_reduction: rnorm / r0_norm,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn preconditioner_is_self_adjoint_and_positive() {
        let g = Grid::new_2d([14, 8], [1.0, 1.0], 4).unwrap();
        let layout = StateLayout::new(&g, 2);
        let pre = LaplacePreconditioner::new(&layout);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..5 {
            let a = layout.random_unit(&mut rng);
            let b = layout.random_unit(&mut rng);
            let pa = pre.apply(&a);
            let pb = pre.apply(&b);
            let left = layout.inner(&pa, &b);
            let right = layout.inner(&a, &pb);
            assert!(
                (left - right).abs() <= 1e-12 * left.abs().max(right.abs()),
                "{left} vs {right}"
            );
            assert!(layout.inner(&pa, &a) > 0.0);
        }
    }
}
