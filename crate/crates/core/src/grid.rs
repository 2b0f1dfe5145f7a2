//! Tensor grids on the slab: bounded first axis with both boundary nodes
//! stored (homogeneous Dirichlet data lives there), remaining axes
//! periodic with the endpoint excluded.

use crate::deriv::{FourierDiff, SbpOperator, StencilOperator};
use crate::error::{Error, Result};
use std::sync::Arc;

/// Uniform tensor grid in 2 or 3 dimensions.
///
/// Axis 0 spans `[0, extents[0]]` with `counts[0]` nodes including both
/// ends; each periodic axis `k > 0` stores `counts[k]` nodes covering one
/// period `extents[k]` with the right endpoint excluded.
#[derive(Debug)]
pub struct Grid {
    pub dim: usize,
    pub extents: [f64; 3],
    pub counts: [usize; 3],
    pub derivative_order: usize,
    sbp: SbpOperator,
    fourier: Vec<FourierDiff>,
    /// Axis-0 quadrature weights (SBP norm), length `counts[0]`.
    axis0_weights: Vec<f64>,
    strides: [usize; 3],
}

impl Grid {
    pub fn new_2d(n: [usize; 2], extents: [f64; 2], order: usize) -> Result<Arc<Grid>> {
        Self::build(2, [n[0], n[1], 1], [extents[0], extents[1], 1.0], order)
    }

    pub fn new_3d(n: [usize; 3], extents: [f64; 3], order: usize) -> Result<Arc<Grid>> {
        Self::build(3, n, extents, order)
    }

    fn build(dim: usize, counts: [usize; 3], extents: [f64; 3], order: usize) -> Result<Arc<Grid>> {
        for k in 0..dim {
            if extents[k] <= 0.0 {
                return Err(Error::Invalid {
                    context: format!("axis {k} has non-positive extent {}", extents[k]),
                });
            }
        }
        for k in 1..dim {
            if counts[k] < 4 {
                return Err(Error::GridTooSmall {
                    axis: k,
                    needed: 4,
                    have: counts[k],
                });
            }
        }
        let h0 = extents[0] / (counts[0] as f64 - 1.0);
        let sbp = SbpOperator::new(counts[0], h0, order)?;
        let fourier = (1..dim)
            .map(|k| FourierDiff::new(counts[k], extents[k]))
            .collect();
        let axis0_weights = sbp.norm.clone();
        let strides = [counts[1] * counts[2], counts[2], 1];
        Ok(Arc::new(Grid {
            dim,
            extents,
            counts,
            derivative_order: order,
            sbp,
            fourier,
            axis0_weights,
            strides,
        }))
    }

    pub fn len(&self) -> usize {
        self.counts[0] * self.counts[1] * self.counts[2]
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Grid spacing along `axis`.
    pub fn spacing(&self, axis: usize) -> f64 {
        if axis == 0 {
            self.extents[0] / (self.counts[0] as f64 - 1.0)
        } else {
            self.extents[axis] / self.counts[axis] as f64
        }
    }

    /// Coordinate of node `i` along `axis`.
    pub fn coord(&self, axis: usize, i: usize) -> f64 {
        i as f64 * self.spacing(axis)
    }

    /// Coordinates of the node with linear index `idx`.
    pub fn coords(&self, idx: usize) -> [f64; 3] {
        let m = self.multi_index(idx);
        [
            self.coord(0, m[0]),
            if self.dim > 1 { self.coord(1, m[1]) } else { 0.0 },
            if self.dim > 2 { self.coord(2, m[2]) } else { 0.0 },
        ]
    }

    pub fn linear_index(&self, m: [usize; 3]) -> usize {
        m[0] * self.strides[0] + m[1] * self.strides[1] + m[2] * self.strides[2]
    }

    pub fn multi_index(&self, idx: usize) -> [usize; 3] {
        let i0 = idx / self.strides[0];
        let rem = idx % self.strides[0];
        [i0, rem / self.strides[1], rem % self.strides[1]]
    }

    /// Quadrature weight of the node with linear index `idx`: the SBP
    /// norm weight along axis 0 times the uniform periodic spacings.
    pub fn quad_weight(&self, idx: usize) -> f64 {
        let m = self.multi_index(idx);
        self.axis0_weight(m[0]) * self.transverse_weight()
    }

    pub fn axis0_weight(&self, i0: usize) -> f64 {
        self.axis0_weights[i0]
    }

    /// Product of the periodic spacings (uniform trapezoid weights).
    pub fn transverse_weight(&self) -> f64 {
        (1..self.dim).map(|k| self.spacing(k)).product()
    }

    /// Cell volume |P|.
    pub fn volume(&self) -> f64 {
        (0..self.dim).map(|k| self.extents[k]).product()
    }

    pub fn sbp(&self) -> &SbpOperator {
        &self.sbp
    }

    pub fn fourier(&self, axis: usize) -> &FourierDiff {
        &self.fourier[axis - 1]
    }

    pub fn check_axis(&self, axis: usize) -> Result<()> {
        if axis >= self.dim {
            Err(Error::InvalidAxis {
                axis,
                dim: self.dim,
            })
        } else {
            Ok(())
        }
    }

    /// Full-order one-sided/centered stencil operator for the `m`-th
    /// derivative along axis 0 at the grid's accuracy order.
    pub fn axis0_stencil(&self, m: usize) -> Result<StencilOperator> {
        let mut width = m + self.derivative_order;
        if (width - 1) % 2 != 0 && m % 2 == 1 {
            width += 1;
        }
        if width > self.counts[0] {
            return Err(Error::GridTooSmall {
                axis: 0,
                needed: width,
                have: self.counts[0],
            });
        }
        Ok(StencilOperator::uniform(
            self.counts[0],
            self.spacing(0),
            m,
            self.derivative_order,
        ))
    }

    /// Apply a pencil operation along `axis` to a full data array.
    pub fn apply_along_axis(
        &self,
        src: &[f64],
        dst: &mut [f64],
        axis: usize,
        op: &mut dyn FnMut(&[f64], &mut [f64]),
    ) {
        let n = self.counts[axis];
        let stride = self.strides[axis];
        let (oa, ob) = match axis {
            0 => (1, 2),
            1 => (0, 2),
            _ => (0, 1),
        };
        let (na, nb) = (self.counts[oa], self.counts[ob]);
        let (sa, sb) = (self.strides[oa], self.strides[ob]);
        let mut pin = vec![0.0; n];
        let mut pout = vec![0.0; n];
        for a in 0..na {
            for b in 0..nb {
                let base = a * sa + b * sb;
                for j in 0..n {
                    pin[j] = src[base + j * stride];
                }
                op(&pin, &mut pout);
                for j in 0..n {
                    dst[base + j * stride] = pout[j];
                }
            }
        }
    }

    /// True if the node lies on one of the two axis-0 boundary planes.
    pub fn on_axis0_boundary(&self, idx: usize) -> bool {
        let i0 = idx / self.strides[0];
        i0 == 0 || i0 == self.counts[0] - 1
    }

    /// Number of interior nodes (axis-0 boundary planes excluded).
    pub fn interior_len(&self) -> usize {
        (self.counts[0] - 2) * self.counts[1] * self.counts[2]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn weights_sum_to_cell_volume() {
        let g = Grid::new_3d([17, 12, 8], [2.0, 1.5, 0.75], 4).unwrap();
        let total: f64 = (0..g.len()).map(|i| g.quad_weight(i)).sum();
        assert_relative_eq!(total, g.volume(), epsilon = 1e-12);
    }

    #[test]
    fn spacings_positive_and_consistent() {
        let g = Grid::new_2d([33, 16], [1.0, 1.0], 4).unwrap();
        assert_relative_eq!(g.spacing(0), 1.0 / 32.0);
        assert_relative_eq!(g.spacing(1), 1.0 / 16.0);
        assert_eq!(g.interior_len(), 31 * 16);
    }

    #[test]
    fn small_grid_rejected() {
        assert!(Grid::new_2d([6, 16], [1.0, 1.0], 4).is_err());
        assert!(Grid::new_2d([33, 3], [1.0, 1.0], 4).is_err());
    }
}
