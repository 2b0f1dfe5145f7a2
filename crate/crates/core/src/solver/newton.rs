//! Newton-CG with Armijo backtracking.

use super::pcg::{newton_direction, LaplacePreconditioner};
use super::{IterationRecord, Objective, SolveOptions, SolveReport, State};
use crate::error::{Error, Result};

/// Minimize the objective from `x0`.
///
/// Accepted steps never increase the functional (Armijo). A non-finite
/// functional or gradient aborts with an error carrying diagnostics;
/// line-search failure and iteration exhaustion return a report with
/// `converged = false`.
pub fn minimize(obj: &dyn Objective, x0: &State, opts: &SolveOptions) -> Result<(State, SolveReport)> {
    let layout = obj.layout();
    let pre = LaplacePreconditioner::new(layout);
    let mut x = x0.clone();
    let mut value = obj.value(&x);
    if !value.is_finite() {
        return Err(nonfinite_abort("initial functional value", &x, layout));
    }
    let mut iterations = Vec::new();
    let mut converged = false;
    let mut line_search_failure = false;
    let mut min_rayleigh = f64::INFINITY;
    let mut max_monitored = obj.monitored_magnitude(&x);
    let mut gradient_norm = f64::NAN;

    for iter in 0..=opts.max_newton_iterations {
        let g = obj.gradient(&x);
        if !g.is_finite() {
            return Err(nonfinite_abort("gradient", &x, layout));
        }
        gradient_norm = layout.norm(&g);
        if gradient_norm <= opts.gradient_tol {
            converged = true;
            break;
        }
        if iter == opts.max_newton_iterations {
            break;
        }

        let mut rhs = g.clone();
        rhs.scale(-1.0);
        let cg = newton_direction(obj, &x, &rhs, &pre, opts.max_cg_iterations, opts.cg_tol);
        min_rayleigh = min_rayleigh.min(cg.min_rayleigh);
        let mut direction = cg.direction;
        let mut slope = layout.inner(&g, &direction);
        if slope >= 0.0 {
            // CG returned a non-descent direction (degenerate Hessian);
            // fall back to the preconditioned gradient.
            direction = pre.apply(&rhs);
            slope = layout.inner(&g, &direction);
            if slope >= 0.0 {
                line_search_failure = true;
                break;
            }
        }

        let mut step = 1.0;
        let mut accepted = false;
        let mut new_value = value;
        for _ in 0..=opts.max_backtracks {
            let mut trial = x.clone();
            trial.axpy(step, &direction);
            let trial_value = obj.value(&trial);
            if trial_value.is_finite()
                && trial_value <= value + opts.armijo_c1 * step * slope
            {
                x = trial;
                new_value = trial_value;
                accepted = true;
                break;
            }
            step *= opts.backtrack_factor;
        }
        if !accepted {
            line_search_failure = true;
            break;
        }
        value = new_value;
        if let Some(m) = obj.monitored_magnitude(&x) {
            max_monitored = Some(max_monitored.map_or(m, |prev: f64| prev.max(m)));
        }
        iterations.push(IterationRecord {
            iteration: iter,
            value,
            gradient_norm,
            step_length: step,
            cg_iterations: cg.iterations,
            curvature_fallback: cg.curvature_fallback,
        });
    }

    let hs_norm = layout.hs_surrogate(&x, opts.sobolev_order)?;
    let report = SolveReport {
        converged,
        iterations,
        final_value: value,
        final_gradient_norm: gradient_norm,
        hs_norm,
        radius: opts.radius,
        within_ball: hs_norm <= opts.radius,
        min_rayleigh,
        line_search_failure,
        max_monitored,
    };
    Ok((x, report))
}

fn nonfinite_abort(what: &str, x: &State, layout: &super::StateLayout) -> Error {
    let bad = x.0.iter().filter(|v| !v.is_finite()).count();
    Error::NonFinite {
        context: format!(
            "{what}; state dump: {} dofs, {} non-finite entries, |x|_W = {:.3e}",
            x.0.len(),
            bad,
            if x.is_finite() { layout.norm(x) } else { f64::NAN }
        ),
    }
}
