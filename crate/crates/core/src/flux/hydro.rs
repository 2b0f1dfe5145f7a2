//! The fixed six-component hydrodynamic flux.
//!
//! Write w = (u, v) with u, v in R^3. Then
//!   a_{1..3}(w) = v x (u x v) = |v|^2 u - (u.v) v
//!   a_{4..6}(w) = (u x v) x u = |u|^2 v - (u.v) u
//! which is the gradient of `0.5 |u x v|^2` with respect to w. Its 6x6
//! Jacobian is symmetric.

fn cross3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn dot3(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Flux in developed form (first block written out explicitly):
/// a1 = w5^2 w1 + w6^2 w1 - w2 w4 w5 - w3 w4 w6, and cyclic analogues.
pub fn hydro_flux(w: [f64; 6]) -> [f64; 6] {
    let (u, v) = split(w);
    let uv = dot3(u, v);
    let uu = dot3(u, u);
    let vv = dot3(v, v);
    [
        vv * u[0] - uv * v[0],
        vv * u[1] - uv * v[1],
        vv * u[2] - uv * v[2],
        uu * v[0] - uv * u[0],
        uu * v[1] - uv * u[1],
        uu * v[2] - uv * u[2],
    ]
}

/// Same map evaluated through the double cross product; used as the
/// second route when checking the developed formula.
pub fn hydro_flux_cross_form(w: [f64; 6]) -> [f64; 6] {
    let (u, v) = split(w);
    let c = cross3(u, v);
    let first = cross3(v, c);
    let second = cross3(c, u);
    [first[0], first[1], first[2], second[0], second[1], second[2]]
}

/// Scalar potential `0.5 |u x v|^2` with `a = grad_w potential`.
pub fn hydro_potential(w: [f64; 6]) -> f64 {
    let (u, v) = split(w);
    let c = cross3(u, v);
    0.5 * dot3(c, c)
}

/// Analytic 6x6 Jacobian (symmetric). Blocks:
///   d a_{1..3} / du = |v|^2 I - v v^T
///   d a_{1..3} / dv = 2 u v^T - v u^T - (u.v) I
///   d a_{4..6} / du = (d a_{1..3} / dv)^T
///   d a_{4..6} / dv = |u|^2 I - u u^T
pub fn hydro_jacobian(w: [f64; 6]) -> [[f64; 6]; 6] {
    let (u, v) = split(w);
    let uv = dot3(u, v);
    let uu = dot3(u, u);
    let vv = dot3(v, v);
    let mut j = [[0.0; 6]; 6];
    for i in 0..3 {
        for k in 0..3 {
            let delta = if i == k { 1.0 } else { 0.0 };
            j[i][k] = vv * delta - v[i] * v[k];
            j[i][3 + k] = 2.0 * u[i] * v[k] - v[i] * u[k] - uv * delta;
            j[3 + i][k] = 2.0 * v[i] * u[k] - u[i] * v[k] - uv * delta;
            j[3 + i][3 + k] = uu * delta - u[i] * u[k];
        }
    }
    j
}

/// Apply the Jacobian at `w` to a direction in R^6.
pub fn hydro_jacobian_apply(w: [f64; 6], d: [f64; 6]) -> [f64; 6] {
    let j = hydro_jacobian(w);
    let mut out = [0.0; 6];
    for i in 0..6 {
        let mut acc = 0.0;
        for k in 0..6 {
            acc += j[i][k] * d[k];
        }
        out[i] = acc;
    }
    out
}

fn split(w: [f64; 6]) -> ([f64; 3], [f64; 3]) {
    ([w[0], w[1], w[2]], [w[3], w[4], w[5]])
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::Rng;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn developed_formula_first_component() {
        // Hand expansion at a generic point.
        let w = [0.3, -1.2, 0.7, 2.0, 0.5, -0.4];
        let a = hydro_flux(w);
        let a1 = w[4] * w[4] * w[0] + w[5] * w[5] * w[0] - w[1] * w[3] * w[4] - w[2] * w[3] * w[5];
        assert_relative_eq!(a[0], a1, epsilon = 1e-14);
    }

    #[test]
    fn unit_basis_gradients_give_unit_flux() {
        // u = e2, v = e3: a_{1..3} = u, a_{4..6} = v.
        let w = [0.0, 1.0, 0.0, 0.0, 0.0, 1.0];
        let a = hydro_flux(w);
        assert_eq!(a, [0.0, 1.0, 0.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn parallel_gradients_collapse() {
        // u parallel v => u x v = 0 and a(w) . w = 2 |u x v|^2 = 0.
        let w = [1.0, -2.0, 0.5, 3.0, -6.0, 1.5];
        let a = hydro_flux(w);
        let dot: f64 = a.iter().zip(w.iter()).map(|(x, y)| x * y).sum();
        assert!(dot.abs() < 1e-12);
    }

    #[test]
    fn jacobian_symmetric_and_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..50 {
            let mut w = [0.0; 6];
            for wi in &mut w {
                *wi = rng.gen::<f64>() * 2.0 - 1.0;
            }
            let j = hydro_jacobian(w);
            for i in 0..6 {
                for k in 0..6 {
                    assert!((j[i][k] - j[k][i]).abs() < 1e-13);
                }
            }
            let h = 1e-6;
            for k in 0..6 {
                let mut wp = w;
                let mut wm = w;
                wp[k] += h;
                wm[k] -= h;
                let ap = hydro_flux(wp);
                let am = hydro_flux(wm);
                for i in 0..6 {
                    let fd = (ap[i] - am[i]) / (2.0 * h);
                    assert!(
                        (fd - j[i][k]).abs() <= 1e-7 * (1.0 + j[i][k].abs()),
                        "J[{i}][{k}]: fd {fd} vs {}",
                        j[i][k]
                    );
                }
            }
        }
    }

    #[test]
    fn flux_is_gradient_of_potential() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let mut w = [0.0; 6];
            for wi in &mut w {
                *wi = rng.gen::<f64>() * 2.0 - 1.0;
            }
            let a = hydro_flux(w);
            let h = 1e-6;
            for k in 0..6 {
                let mut wp = w;
                let mut wm = w;
                wp[k] += h;
                wm[k] -= h;
                let fd = (hydro_potential(wp) - hydro_potential(wm)) / (2.0 * h);
                assert!((fd - a[k]).abs() < 1e-8);
            }
        }
    }
}
