//! Quadrature, inner products and discrete Sobolev seminorms.

use crate::error::Result;
use crate::field::ScalarField;

/// Compensated (Kahan) summation; keeps quadrature errors at a few ulps
/// independent of the node count.
pub fn kahan_sum(terms: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut c = 0.0;
    for t in terms {
        let y = t - c;
        let s = sum + y;
        c = (s - sum) - y;
        sum = s;
    }
    sum
}

/// Quadrature of the field over the cell: trapezoid (exact weights) on
/// periodic axes, the SBP norm along axis 0.
pub fn integrate(f: &ScalarField) -> f64 {
    let g = &f.grid;
    kahan_sum((0..g.len()).map(|i| g.quad_weight(i) * f.values[i]))
}

/// Quadrature-weighted L2 inner product.
pub fn inner(a: &ScalarField, b: &ScalarField) -> f64 {
    let g = &a.grid;
    kahan_sum((0..g.len()).map(|i| g.quad_weight(i) * a.values[i] * b.values[i]))
}

pub fn l2_norm(f: &ScalarField) -> f64 {
    inner(f, f).max(0.0).sqrt()
}

/// All multi-indices with |alpha| <= s in `dim` axes.
pub fn multi_indices(dim: usize, s: usize) -> Vec<[usize; 3]> {
    let mut out = Vec::new();
    for total in 0..=s {
        for a0 in 0..=total {
            if dim == 1 {
                if a0 == total {
                    out.push([a0, 0, 0]);
                }
                continue;
            }
            for a1 in 0..=(total - a0) {
                if dim == 2 {
                    if a0 + a1 == total {
                        out.push([a0, a1, 0]);
                    }
                } else {
                    let a2 = total - a0 - a1;
                    out.push([a0, a1, a2]);
                }
            }
        }
    }
    out
}

/// Apply the mixed derivative of multi-index `alpha` (one pass per axis).
pub fn mixed_derivative(f: &ScalarField, alpha: [usize; 3]) -> Result<ScalarField> {
    let mut cur = f.clone();
    for (axis, &m) in alpha.iter().enumerate().take(f.grid.dim) {
        if m > 0 {
            cur = cur.derivative(axis, m)?;
        }
    }
    Ok(cur)
}

/// `(alpha, ||d^alpha f||_{L2})` for every multi-index with |alpha| <= s.
pub fn sobolev_seminorms(f: &ScalarField, s: usize) -> Result<Vec<([usize; 3], f64)>> {
    multi_indices(f.grid.dim, s)
        .into_iter()
        .map(|a| Ok((a, l2_norm(&mixed_derivative(f, a)?))))
        .collect()
}

/// Discrete H^s norm: square root of the sum of squared seminorms over
/// |alpha| <= s.
pub fn hs_norm(f: &ScalarField, s: usize) -> Result<f64> {
    let semis = sobolev_seminorms(f, s)?;
    Ok(kahan_sum(semis.iter().map(|(_, v)| v * v)).max(0.0).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn constant_integrates_to_cell_volume() {
        let g = Grid::new_2d([33, 16], [1.0, 1.0], 4).unwrap();
        let one = ScalarField::from_fn(&g, |_| 1.0);
        assert_relative_eq!(integrate(&one), 1.0, epsilon = 1e-13);
    }

    #[test]
    fn l2_of_single_mode_is_half() {
        let g = Grid::new_2d([33, 32], [1.0, 1.0], 4).unwrap();
        let f = ScalarField::from_fn(&g, |x| (2.0 * PI * x[1]).sin());
        assert_relative_eq!(inner(&f, &f), 0.5, epsilon = 1e-12);
    }

    #[test]
    fn h1_norm_of_product_mode_matches_closed_form() {
        // For sin(pi x0) sin(2 pi x1) on the unit cell:
        //   ||f||^2 = 1/4, ||d0 f||^2 = pi^2/4, ||d1 f||^2 = pi^2,
        // so ||f||_{H^1} = sqrt(1/4 + 5 pi^2 / 4).
        let g = Grid::new_2d([65, 64], [1.0, 1.0], 4).unwrap();
        let f = ScalarField::from_fn_dirichlet(&g, |x| (PI * x[0]).sin() * (2.0 * PI * x[1]).sin());
        let h1 = {
            let semis = sobolev_seminorms(&f, 1).unwrap();
            kahan_sum(semis.iter().map(|(_, v)| v * v)).sqrt()
        };
        let exact = (0.25 + 5.0 * PI * PI / 4.0).sqrt();
        assert_relative_eq!(h1, exact, epsilon = 1e-6);
    }

    #[test]
    fn multi_index_count_matches_binomial() {
        // #/{|alpha| <= 5, dim 3} = C(8,3) = 56
        assert_eq!(multi_indices(3, 5).len(), 56);
        assert_eq!(multi_indices(2, 5).len(), 21);
    }
}
