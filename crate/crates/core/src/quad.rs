//! Adaptive Simpson quadrature.
//!
//! One routine serves both the ball-volume integrals (tight tolerance) and
//! the Dudley entropy integral (looser tolerance, hard evaluation cap).

/// Integrates `f` over `[a, b]` with adaptive Simpson refinement until the
/// local error estimate falls below `rel_tol` relative to the running whole,
/// or until `max_evals` function evaluations have been spent. When the budget
/// runs out the current refinement is returned rather than aborting: bound
/// evaluation degrades gracefully instead of failing mid-experiment.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rel_tol: f64, max_evals: usize) -> f64 {
    if a == b {
        return 0.0;
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = simpson(a, b, fa, fm, fb);
    // Absolute tolerance anchored on a coarse magnitude estimate; the
    // fallback guards integrals that are themselves ~0.
    let scale = whole.abs().max(1e-300);
    let mut budget = max_evals.saturating_sub(3) as isize;
    recurse(&f, a, b, fa, fm, fb, whole, rel_tol * scale, &mut budget, 50)
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn recurse<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    budget: &mut isize,
    depth: usize,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    *budget -= 2;
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if depth == 0 || *budget <= 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, budget, depth - 1)
        + recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, budget, depth - 1)
}
