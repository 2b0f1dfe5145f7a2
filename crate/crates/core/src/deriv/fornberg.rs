//! Finite-difference weight generation on arbitrary node subsets.
//!
//! Classic recursion by Fornberg (Math. Comp. 51, 1988): given stencil
//! nodes x_0..x_{n-1} and an evaluation point xi, produce the weights of
//! the m-th derivative approximation that is exact for all polynomials of
//! degree <= n-1. On a uniform grid a stencil of `m + p` nodes therefore
//! yields an order-`p` approximation of the m-th derivative, one-sided
//! stencils included.

/// Weights of the `m`-th derivative at `xi` from samples at `nodes`.
///
/// Exact on polynomials of degree `nodes.len() - 1`.
pub fn fd_weights(xi: f64, nodes: &[f64], m: usize) -> Vec<f64> {
    let n = nodes.len();
    assert!(m < n, "need more than {m} nodes for derivative order {m}");
    // delta[k][j] = weight of node j for the k-th derivative, built up
    // incrementally over widening stencils.
    let mut delta = vec![vec![0.0; n]; m + 1];
    delta[0][0] = 1.0;
    let mut c1 = 1.0;
    for i in 1..n {
        let mut c2 = 1.0;
        let mnd = m.min(i);
        for j in 0..i {
            let c3 = nodes[i] - nodes[j];
            c2 *= c3;
            for k in (0..=mnd).rev() {
                let prev = delta[k][j];
                let lower = if k > 0 { delta[k - 1][j] } else { 0.0 };
                delta[k][j] = ((nodes[i] - xi) * prev - k as f64 * lower) / c3;
            }
        }
        for k in (0..=mnd).rev() {
            let prev = if i > 0 { delta[k][i - 1] } else { 0.0 };
            let lower = if k > 0 { delta[k - 1][i - 1] } else { 0.0 };
            delta[k][i] = c1 / c2 * (k as f64 * lower - (nodes[i - 1] - xi) * prev);
        }
        c1 = c2;
    }
    delta[m].clone()
}

/// A banded one-axis differentiation operator on `n` uniformly spaced
/// nodes: row `i` applies `weights[i]` to samples starting at `starts[i]`.
#[derive(Debug, Clone)]
pub struct StencilOperator {
    pub n: usize,
    pub starts: Vec<usize>,
    pub weights: Vec<Vec<f64>>,
}

impl StencilOperator {
    /// Order-`p` approximation of the `m`-th derivative on `n` nodes with
    /// spacing `h`. Interior rows are centered; rows near the ends shift to
    /// one-sided stencils of the same width (same accuracy order).
    pub fn uniform(n: usize, h: f64, m: usize, p: usize) -> Self {
        let mut width = m + p;
        // Centered stencils gain a free order for even m; widen odd-m
        // stencils so the interior row is symmetric.
        if (width - 1) % 2 != 0 && m % 2 == 1 {
            width += 1;
        }
        assert!(width <= n, "stencil width {width} exceeds grid size {n}");
        let half = (width - 1) / 2;
        let mut starts = Vec::with_capacity(n);
        let mut weights = Vec::with_capacity(n);
        for i in 0..n {
            let s = i.saturating_sub(half).min(n - width);
            let nodes: Vec<f64> = (0..width).map(|j| ((s + j) as f64 - i as f64) * h).collect();
            starts.push(s);
            weights.push(fd_weights(0.0, &nodes, m));
        }
        StencilOperator { n, starts, weights }
    }

    /// Apply the operator to one pencil of samples.
    pub fn apply(&self, src: &[f64], dst: &mut [f64]) {
        debug_assert_eq!(src.len(), self.n);
        debug_assert_eq!(dst.len(), self.n);
        for i in 0..self.n {
            let s = self.starts[i];
            let w = &self.weights[i];
            let mut acc = 0.0;
            for (j, wj) in w.iter().enumerate() {
                acc += wj * src[s + j];
            }
            dst[i] = acc;
        }
    }

    /// Apply the transpose: `dst += A^T src`.
    pub fn apply_transpose_add(&self, src: &[f64], dst: &mut [f64]) {
        debug_assert_eq!(src.len(), self.n);
        debug_assert_eq!(dst.len(), self.n);
        for i in 0..self.n {
            let s = self.starts[i];
            let w = &self.weights[i];
            for (j, wj) in w.iter().enumerate() {
                dst[s + j] += wj * src[i];
            }
        }
    }

    /// Stencil width (nodes touched per row).
    pub fn width(&self) -> usize {
        self.weights.first().map_or(0, |w| w.len())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn weights_reproduce_monomial_derivatives() {
        // 5 nodes -> exact on degree <= 4.
        let nodes = [-2.0, -1.0, 0.0, 1.0, 2.0];
        for m in 0..=2 {
            let w = fd_weights(0.5, &nodes, m);
            for deg in 0..=4usize {
                let exact = match m {
                    0 => 0.5f64.powi(deg as i32),
                    1 => deg as f64 * 0.5f64.powi(deg as i32 - 1),
                    2 => {
                        if deg < 2 {
                            0.0
                        } else {
                            (deg * (deg - 1)) as f64 * 0.5f64.powi(deg as i32 - 2)
                        }
                    }
                    _ => unreachable!(),
                };
                let got: f64 = nodes
                    .iter()
                    .zip(&w)
                    .map(|(x, wi)| wi * x.powi(deg as i32))
                    .sum();
                assert_relative_eq!(got, exact, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn centered_order4_first_derivative_matches_classic() {
        let op = StencilOperator::uniform(16, 1.0, 1, 4);
        let mid = &op.weights[8];
        let classic = [1.0 / 12.0, -2.0 / 3.0, 0.0, 2.0 / 3.0, -1.0 / 12.0];
        for (a, b) in mid.iter().zip(classic.iter()) {
            assert_relative_eq!(a, b, epsilon = 1e-14);
        }
    }

    #[test]
    fn polynomial_exactness_including_boundary_rows() {
        // x(1-x) has derivative 1-2x; exact for order >= 2 at every node.
        let n = 12;
        let h = 1.0 / (n as f64 - 1.0);
        let op = StencilOperator::uniform(n, h, 1, 4);
        let src: Vec<f64> = (0..n)
            .map(|i| {
                let x = i as f64 * h;
                x * (1.0 - x)
            })
            .collect();
        let mut dst = vec![0.0; n];
        op.apply(&src, &mut dst);
        for (i, d) in dst.iter().enumerate() {
            let x = i as f64 * h;
            assert_relative_eq!(*d, 1.0 - 2.0 * x, epsilon = 1e-11);
        }
    }
}
