//! Summation-by-parts first-derivative operators on the bounded axis.
//!
//! A diagonal-norm SBP pair (D, H) satisfies H*D + (H*D)^T = B exactly,
//! with B = diag(-1, 0, ..., 0, 1). Two consequences drive their use in
//! the discrete energy functionals:
//!
//! * the quadrature-weighted adjoint of D is -D plus a pure boundary
//!   term, so the exact gradient of a discretized integral functional is
//!   a consistent collocation of the continuous divergence on interior
//!   nodes;
//! * H is a positive quadrature whose weights sum exactly to the
//!   interval length.
//!
//! Coefficients below are the classical diagonal-norm operators with
//! 2nd- and 4th-order interior stencils (boundary closures of order 1
//! and 2 respectively).

use super::fornberg::StencilOperator;
use crate::error::{Error, Result};

/// First-derivative SBP operator together with its norm (quadrature).
#[derive(Debug, Clone)]
pub struct SbpOperator {
    /// Derivative rows, including the boundary closure.
    pub d: StencilOperator,
    /// Diagonal norm = quadrature weights (already scaled by h).
    pub norm: Vec<f64>,
    /// Interior accuracy order.
    pub order: usize,
}

impl SbpOperator {
    pub fn new(n: usize, h: f64, order: usize) -> Result<Self> {
        match order {
            2 => {
                if n < 5 {
                    return Err(Error::GridTooSmall {
                        axis: 0,
                        needed: 5,
                        have: n,
                    });
                }
                Ok(build(n, h, 2, &[0.5], &[(0, vec![-1.0, 1.0])], &[-0.5, 0.0, 0.5]))
            }
            4 => {
                if n < 12 {
                    return Err(Error::GridTooSmall {
                        axis: 0,
                        needed: 12,
                        have: n,
                    });
                }
                let norm = [17.0 / 48.0, 59.0 / 48.0, 43.0 / 48.0, 49.0 / 48.0];
                let rows: Vec<(usize, Vec<f64>)> = vec![
                    (0, vec![-24.0 / 17.0, 59.0 / 34.0, -4.0 / 17.0, -3.0 / 34.0]),
                    (0, vec![-0.5, 0.0, 0.5]),
                    (0, vec![4.0 / 43.0, -59.0 / 86.0, 0.0, 59.0 / 86.0, -4.0 / 43.0]),
                    (
                        0,
                        vec![3.0 / 98.0, 0.0, -59.0 / 98.0, 0.0, 32.0 / 49.0, -4.0 / 49.0],
                    ),
                ];
                let interior = [1.0 / 12.0, -2.0 / 3.0, 0.0, 2.0 / 3.0, -1.0 / 12.0];
                Ok(build(n, h, 4, &norm, &rows, &interior))
            }
            other => Err(Error::UnsupportedOrder { order: other }),
        }
    }

    /// Apply the derivative to one pencil.
    pub fn apply(&self, src: &[f64], dst: &mut [f64]) {
        self.d.apply(src, dst);
    }
}

fn build(
    n: usize,
    h: f64,
    order: usize,
    boundary_norm: &[f64],
    boundary_rows: &[(usize, Vec<f64>)],
    interior: &[f64],
) -> SbpOperator {
    let nb = boundary_rows.len();
    let half = (interior.len() - 1) / 2;
    let mut starts = vec![0usize; n];
    let mut weights = vec![Vec::new(); n];
    for (i, (s, w)) in boundary_rows.iter().enumerate() {
        starts[i] = *s;
        weights[i] = w.iter().map(|c| c / h).collect();
        // Mirrored row: reversed and negated, anchored at the right end.
        let j = n - 1 - i;
        let width = w.len();
        starts[j] = n - (s + width);
        weights[j] = w.iter().rev().map(|c| -c / h).collect();
    }
    for i in nb..n - nb {
        starts[i] = i - half;
        weights[i] = interior.iter().map(|c| c / h).collect();
    }
    let mut norm = vec![h; n];
    for (i, s) in boundary_norm.iter().enumerate() {
        norm[i] = s * h;
        norm[n - 1 - i] = s * h;
    }
    SbpOperator {
        d: StencilOperator { n, starts, weights },
        norm,
        order,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn dense(op: &SbpOperator) -> Vec<Vec<f64>> {
        let n = op.d.n;
        let mut m = vec![vec![0.0; n]; n];
        for i in 0..n {
            for (j, w) in op.d.weights[i].iter().enumerate() {
                m[i][op.d.starts[i] + j] = *w;
            }
        }
        m
    }

    #[test]
    fn summation_by_parts_identity_exact() {
        for order in [2usize, 4] {
            let n = 17;
            let h = 0.37;
            let op = SbpOperator::new(n, h, order).unwrap();
            let d = dense(&op);
            for i in 0..n {
                for j in 0..n {
                    let q = op.norm[i] * d[i][j] + op.norm[j] * d[j][i];
                    let b = if i == 0 && j == 0 {
                        -1.0
                    } else if i == n - 1 && j == n - 1 {
                        1.0
                    } else {
                        0.0
                    };
                    assert!(
                        (q - b).abs() < 1e-13,
                        "order {order}: Q+Q^T mismatch at ({i},{j}): {q} vs {b}"
                    );
                }
            }
        }
    }

    #[test]
    fn norm_sums_to_interval_length() {
        for order in [2usize, 4] {
            let n = 33;
            let len = 2.5;
            let h = len / (n as f64 - 1.0);
            let op = SbpOperator::new(n, h, order).unwrap();
            let total: f64 = op.norm.iter().sum();
            assert_relative_eq!(total, len, epsilon = 1e-13);
        }
    }

    #[test]
    fn boundary_rows_exact_on_quadratics() {
        let n = 14;
        let h = 1.0 / (n as f64 - 1.0);
        let op = SbpOperator::new(n, h, 4).unwrap();
        let src: Vec<f64> = (0..n)
            .map(|i| {
                let x = i as f64 * h;
                1.5 + 0.3 * x - 2.0 * x * x
            })
            .collect();
        let mut dst = vec![0.0; n];
        op.apply(&src, &mut dst);
        for (i, d) in dst.iter().enumerate() {
            let x = i as f64 * h;
            assert_relative_eq!(*d, 0.3 - 4.0 * x, epsilon = 1e-10);
        }
    }

    #[test]
    fn rejects_too_small_grid() {
        assert!(SbpOperator::new(8, 0.1, 4).is_err());
        assert!(SbpOperator::new(3, 0.1, 2).is_err());
        assert!(SbpOperator::new(16, 0.1, 6).is_err());
    }
}
