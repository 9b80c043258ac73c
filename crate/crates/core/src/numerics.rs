//! Small numerical kernels used across the solver stack: bracketed root
//! finding (bisection with optional Newton polish), sign-change scanning,
//! geometric bracket expansion, and adaptive Simpson quadrature.
//!
//! Everything here is deterministic and allocation-light; the solvers build
//! their guarantees on the unconditional robustness of bisection, with
//! Newton used only as a refinement step inside a verified bracket.

use crate::error::{Error, Result};

/// Default absolute tolerance in the abscissa for root refinement.
pub const ROOT_XTOL: f64 = 1e-12;

/// Maximum Newton iterations when polishing a bisection root.
pub const NEWTON_MAX_ITER: usize = 50;

/// Subdivision cap for adaptive Simpson quadrature (2^18 panels).
pub const SIMPSON_MAX_DEPTH: u32 = 18;

/// Absolute tolerance target for adaptive Simpson quadrature.
pub const SIMPSON_TOL: f64 = 1e-10;

/// Bisection on a bracketing interval `[a, b]` with `f(a)·f(b) ≤ 0`.
///
/// Returns the midpoint of the final bracket, accurate to `xtol` in the
/// abscissa. Fails if the interval does not bracket a sign change.
pub fn bisect<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, xtol: f64) -> Result<f64> {
    let (mut lo, mut hi) = if a <= b { (a, b) } else { (b, a) };
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if !(flo.is_finite() && fhi.is_finite()) {
        return Err(Error::Numerics(format!(
            "bisection endpoints not finite: f({lo}) = {flo}, f({hi}) = {fhi}"
        )));
    }
    if flo.signum() == fhi.signum() {
        return Err(Error::Domain(format!(
            "interval [{lo}, {hi}] does not bracket a sign change (f = {flo}, {fhi})"
        )));
    }
    // 200 halvings are enough to exhaust f64 resolution on any finite interval.
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= xtol || mid == lo || mid == hi {
            return Ok(mid);
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Bisection followed by a bracket-guarded Newton polish.
///
/// `df` is the analytic derivative of `f`. Newton steps that would leave the
/// current bracket fall back to bisection, so convergence is unconditional;
/// the polish typically reaches machine accuracy in a handful of steps.
pub fn bisect_newton<F, D>(mut f: F, mut df: D, a: f64, b: f64, xtol: f64) -> Result<f64>
where
    F: FnMut(f64) -> f64,
    D: FnMut(f64) -> f64,
{
    let (mut lo, mut hi) = if a <= b { (a, b) } else { (b, a) };
    let flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(Error::Domain(format!(
            "interval [{lo}, {hi}] does not bracket a sign change (f = {flo}, {fhi})"
        )));
    }
    let lo_sign = flo.signum();
    let mut x = 0.5 * (lo + hi);
    for _ in 0..NEWTON_MAX_ITER {
        let fx = f(x);
        if fx == 0.0 {
            return Ok(x);
        }
        // Shrink the bracket with the fresh sample.
        if fx.signum() == lo_sign {
            lo = x;
        } else {
            hi = x;
        }
        let d = df(x);
        let newton = x - fx / d;
        let next = if d != 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if (next - x).abs() <= xtol {
            return Ok(next);
        }
        x = next;
    }
    Ok(x)
}

/// Scan `[a, b]` on `n` uniform panels and report every sub-interval on which
/// `f` changes sign. Panels with non-finite samples are skipped.
pub fn sign_changes<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    if n == 0 || !(b > a) {
        return out;
    }
    let h = (b - a) / n as f64;
    let mut x_prev = a;
    let mut f_prev = f(a);
    for i in 1..=n {
        let x = a + h * i as f64;
        let fx = f(x);
        if f_prev == 0.0 {
            // An exact zero at a node counts as a (degenerate) bracket.
            out.push((x_prev, x_prev));
        } else if f_prev.is_finite() && fx.is_finite() && f_prev.signum() != fx.signum() {
            out.push((x_prev, x));
        }
        x_prev = x;
        f_prev = fx;
    }
    out
}

/// Expand a bracket geometrically around `x0` until `f` changes sign.
///
/// Steps grow by `factor` each round, alternating sides, up to `max_steps`
/// expansions and clipped to `limits`. This is the standard preparation step
/// for the intermediate-state bisection in the Riemann solvers.
pub fn expand_bracket<F: FnMut(f64) -> f64>(
    mut f: F,
    x0: f64,
    initial_step: f64,
    factor: f64,
    max_steps: usize,
    limits: (f64, f64),
) -> Result<(f64, f64)> {
    let f0 = f(x0);
    if f0 == 0.0 {
        return Ok((x0, x0));
    }
    let mut step = initial_step.abs().max(f64::MIN_POSITIVE);
    let mut lo = x0;
    let mut hi = x0;
    let mut flo = f0;
    let mut fhi = f0;
    for _ in 0..max_steps {
        let cand_hi = (x0 + step).min(limits.1);
        if cand_hi > hi {
            let fc = f(cand_hi);
            if fc.is_finite() {
                if fc == 0.0 || fc.signum() != fhi.signum() {
                    return Ok((hi, cand_hi));
                }
                hi = cand_hi;
                fhi = fc;
            }
        }
        let cand_lo = (x0 - step).max(limits.0);
        if cand_lo < lo {
            let fc = f(cand_lo);
            if fc.is_finite() {
                if fc == 0.0 || fc.signum() != flo.signum() {
                    return Ok((cand_lo, lo));
                }
                lo = cand_lo;
                flo = fc;
            }
        }
        if hi >= limits.1 && lo <= limits.0 {
            break;
        }
        step *= factor;
    }
    Err(Error::Numerics(format!(
        "bracket expansion around {x0} found no sign change in [{lo}, {hi}]"
    )))
}

/// Adaptive Simpson integration of `f` over `[a, b]` to absolute tolerance
/// `tol`, with recursion capped at [`SIMPSON_MAX_DEPTH`] levels.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    let fa = f(lo);
    let fb = f(hi);
    let m = 0.5 * (lo + hi);
    let fm = f(m);
    if !(fa.is_finite() && fb.is_finite() && fm.is_finite()) {
        return Err(Error::Numerics(format!(
            "non-finite integrand on [{lo}, {hi}]"
        )));
    }
    let whole = (hi - lo) / 6.0 * (fa + 4.0 * fm + fb);
    let v = simpson_rec(f, lo, hi, fa, fm, fb, whole, tol, SIMPSON_MAX_DEPTH)?;
    Ok(sign * v)
}

#[allow(clippy::too_many_arguments)]
fn simpson_rec<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Result<f64> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let err = left + right - whole;
    if err.abs() <= 15.0 * tol || depth == 0 {
        // Standard Richardson correction for composite Simpson.
        return Ok(left + right + err / 15.0);
    }
    let half_tol = 0.5 * tol;
    Ok(simpson_rec(f, a, m, fa, flm, fm, left, half_tol, depth - 1)?
        + simpson_rec(f, m, b, fm, frm, fb, right, half_tol, depth - 1)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn bisect_finds_sqrt2() {
        let r = bisect(|x| x * x - 2.0, 0.0, 2.0, 1e-14).unwrap();
        assert_abs_diff_eq!(r, 2.0_f64.sqrt(), epsilon = 1e-13);
    }

    #[test]
    fn bisect_rejects_bad_bracket() {
        assert!(bisect(|x| x * x + 1.0, -1.0, 1.0, 1e-12).is_err());
    }

    #[test]
    fn newton_polish_reaches_machine_accuracy() {
        let r = bisect_newton(|x| x * x - 2.0, |x| 2.0 * x, 1.0, 2.0, 1e-15).unwrap();
        assert!((r - 2.0_f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn simpson_integrates_exp() {
        let v = adaptive_simpson(&|x: f64| x.exp(), 0.0, 1.0, 1e-12).unwrap();
        assert_abs_diff_eq!(v, 1.0_f64.exp() - 1.0, epsilon = 1e-11);
    }

    #[test]
    fn simpson_handles_reversed_interval() {
        let v = adaptive_simpson(&|x: f64| x, 1.0, 0.0, 1e-12).unwrap();
        assert_abs_diff_eq!(v, -0.5, epsilon = 1e-12);
    }

    #[test]
    fn bracket_expansion_finds_root_region() {
        let (a, b) = expand_bracket(|x| x - 3.0, 0.0, 0.1, 1.6, 60, (-100.0, 100.0)).unwrap();
        assert!(a <= 3.0 && 3.0 <= b);
    }

    #[test]
    fn sign_change_scan_finds_all_roots() {
        let ch = sign_changes(|x: f64| x.sin(), 0.1, 9.0, 500);
        assert_eq!(ch.len(), 2); // π and 2π
    }
}
