//! Energy-conserving shock data
//!
//! A jump (r_L, v_L) → (r_R, v_R) of the p-system conserves energy exactly
//! when the strain pair annihilates the functional
//!
//! ```text
//!     J(r_L, r_R) = ⟦Φ(r)⟧ − ⟦r⟧·⟨Φ′(r)⟩,    ⟦x⟧ = x_L − x_R,  ⟨x⟩ = (x_L+x_R)/2,
//! ```
//!
//! equivalently, when the secant of the flux Φ′ over [r_R, r_L] cuts off
//! equal areas above and below. This module computes J, finds conjugate
//! strains, builds conservative shocks, traces the zero set
//! D = {J = 0} by pseudo-arclength continuation, and analyses its
//! bifurcation structure at turning points of the flux.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics;
use crate::potential::Potential;
use crate::psystem::{
    classify_speed, hugoniot_v, rh_speed, secant_slope, Family, ShockClass, State, Wave,
    WaveKind,
};

/// Relative tolerance on |J| for a pair to count as conservative data.
pub const J_REL_TOL: f64 = 1e-10;

/// One point of the conservative-shock locus with its local wave data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConsShockPoint {
    pub r_l: f64,
    pub r_r: f64,
    /// |c| of the induced shock.
    pub c_rh_abs: f64,
    /// Sound speeds √Φ″ at the end strains (0 outside the convex region).
    pub lambda_l: f64,
    pub lambda_r: f64,
    pub class: ShockClass,
    /// Local slope dr_R/dr_L of the locus; `None` at vertical tangents.
    pub slope: Option<f64>,
}

/// A coordinate extremum along a traced locus component.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Extremum {
    /// Index into the component polyline.
    pub index: usize,
    /// True if the r_L coordinate is extremal here (vertical tangent),
    /// false if r_R is extremal (horizontal tangent).
    pub along_r_l: bool,
}

/// One connected off-diagonal component of D, traced as a polyline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DCurve {
    pub points: Vec<ConsShockPoint>,
    /// Diagonal crossings (r_L = r_R = value); these sit at turning points
    /// of the flux.
    pub crossings: Vec<f64>,
    pub extrema: Vec<Extremum>,
    /// True if the polyline returns to its start.
    pub closed: bool,
    /// True if continuation stopped early after repeated corrector failure.
    pub partial: bool,
}

/// 16-point Gauss–Legendre rule on [−1, 1].
const GL16: [(f64, f64); 16] = [
    (-0.9894009349916499, 0.027152459411754037),
    (-0.9445750230732326, 0.062253523938647706),
    (-0.8656312023878318, 0.09515851168249259),
    (-0.755404408355003, 0.12462897125553403),
    (-0.6178762444026438, 0.14959598881657676),
    (-0.45801677765722737, 0.16915651939500262),
    (-0.2816035507792589, 0.1826034150449236),
    (-0.09501250983763745, 0.18945061045506859),
    (0.09501250983763745, 0.18945061045506859),
    (0.2816035507792589, 0.1826034150449236),
    (0.45801677765722737, 0.16915651939500262),
    (0.6178762444026438, 0.14959598881657676),
    (0.755404408355003, 0.12462897125553403),
    (0.8656312023878318, 0.09515851168249259),
    (0.9445750230732326, 0.062253523938647706),
    (0.9894009349916499, 0.027152459411754037),
];

/// Width below which J is evaluated in integral form. Near the diagonal
/// the closed form subtracts O(|Φ|) quantities to produce an O(Δr³)
/// result and loses most of its significant digits; integrating the flux
/// deviation from the endpoint average instead keeps the cancellation at
/// the O(Φ″·Δr) level. The quadrature is accurate to machine precision on
/// such narrow spans for every catalogued flux.
const J_NARROW_WIDTH: f64 = 1.0;

/// Raw J evaluation without domain checks; shared by [`jfunc`] and the
/// conjugate scan.
fn jfunc_unchecked(p: &Potential, r_l: f64, r_r: f64) -> f64 {
    let avg = 0.5 * (p.eval_unchecked(r_l, 1) + p.eval_unchecked(r_r, 1));
    if (r_l - r_r).abs() <= J_NARROW_WIDTH {
        let m = 0.5 * (r_l + r_r);
        let h = 0.5 * (r_l - r_r);
        let mut acc = 0.0;
        for (x, w) in GL16 {
            acc += w * (p.eval_unchecked(m + h * x, 1) - avg);
        }
        h * acc
    } else {
        p.eval_unchecked(r_l, 0) - p.eval_unchecked(r_r, 0) - (r_l - r_r) * avg
    }
}

/// The energy-jump functional J(r_L, r_R). Zero on the diagonal and at
/// conservative shock data.
pub fn jfunc(p: &Potential, r_l: f64, r_r: f64) -> Result<f64> {
    // Domain-check the endpoints (interior nodes lie between them).
    p.dphi(r_l)?;
    p.dphi(r_r)?;
    Ok(jfunc_unchecked(p, r_l, r_r))
}

/// Gradient (∂J/∂r_L, ∂J/∂r_R). Both components vanish on the diagonal.
pub fn jgrad(p: &Potential, r_l: f64, r_r: f64) -> Result<(f64, f64)> {
    let sec = secant_slope(p, r_l, r_r)?;
    let half_dr = 0.5 * (r_l - r_r);
    Ok((
        half_dr * (sec - p.d2phi(r_l)?),
        half_dr * (sec - p.d2phi(r_r)?),
    ))
}

fn j_tolerance(p: &Potential, r_l: f64, r_r: f64) -> f64 {
    let scale = p.eval_unchecked(r_l, 0).abs() + p.eval_unchecked(r_r, 0).abs();
    J_REL_TOL * scale.max(1.0)
}

/// Find the off-diagonal root of r ↦ J(r_fixed, r) inside `bracket`.
///
/// Errors if the bracket contains no sign change away from the diagonal, or
/// more than one (ambiguous bracket).
pub fn solve_conjugate(p: &Potential, r_fixed: f64, bracket: (f64, f64)) -> Result<f64> {
    let (a, b) = bracket;
    if !(b > a) {
        return Err(Error::Usage(format!("empty bracket ({a}, {b})")));
    }
    let n = 400;
    let band = 2.0 * (b - a) / n as f64;
    let f = |r: f64| jfunc_unchecked(p, r_fixed, r);
    // Domain check once at the ends; the scan itself uses raw evaluation.
    jfunc(p, r_fixed, a)?;
    jfunc(p, r_fixed, b)?;
    let mut spans: Vec<(f64, f64)> = numerics::sign_changes(&f, a, b, n)
        .into_iter()
        .filter(|&(lo, hi)| (0.5 * (lo + hi) - r_fixed).abs() > band)
        .collect();
    match spans.len() {
        0 => Err(Error::Domain(format!(
            "no off-diagonal conjugate of r = {r_fixed} in ({a}, {b})"
        ))),
        1 => {
            let (lo, hi) = spans.pop().unwrap();
            let df = |r: f64| {
                let sec = (p.eval_unchecked(r_fixed, 1) - p.eval_unchecked(r, 1))
                    / (r_fixed - r);
                0.5 * (r_fixed - r) * (sec - p.eval_unchecked(r, 2))
            };
            numerics::bisect_newton(&f, &df, lo, hi, numerics::ROOT_XTOL)
        }
        k => Err(Error::Usage(format!(
            "bracket ({a}, {b}) contains {k} off-diagonal conjugates of r = {r_fixed}"
        ))),
    }
}

/// Build the conservative shock of the given family joining the strain pair
/// (r_L, r_R), anchored at velocity `v_l`. Errors if the pair is not
/// conservative data (J residual too large).
pub fn build_conservative_shock(
    p: &Potential,
    r_l: f64,
    r_r: f64,
    v_l: f64,
    family: Family,
) -> Result<Wave> {
    let j = jfunc(p, r_l, r_r)?;
    if j.abs() > 100.0 * j_tolerance(p, r_l, r_r) {
        return Err(Error::Domain(format!(
            "pair (r_L, r_R) = ({r_l}, {r_r}) is not conservative data: J = {j:e}"
        )));
    }
    let u_l = State::new(r_l, v_l);
    let v_r = hugoniot_v(p, u_l, r_r, family)?;
    let u_r = State::new(r_r, v_r);
    let c = rh_speed(p, r_l, r_r, family)?;
    let lam_l = family.sign() * sound_or_zero(p, r_l);
    let lam_r = family.sign() * sound_or_zero(p, r_r);
    let class = classify_speed(c, lam_l, lam_r);
    Ok(Wave {
        family,
        left: u_l,
        right: u_r,
        kind: WaveKind::Shock(class),
        speed_lo: c,
        speed_hi: c,
        conservative: true,
    })
}

/// Local slope dr_R/dr_L of D from implicit differentiation of J = 0:
/// −(c² − Φ″(r_L)) / (c² − Φ″(r_R)). Returns ±∞ at vertical tangents.
pub fn dset_slope(p: &Potential, r_l: f64, r_r: f64) -> Result<f64> {
    let c2 = secant_slope(p, r_l, r_r)?;
    let num = c2 - p.d2phi(r_l)?;
    let den = c2 - p.d2phi(r_r)?;
    if den.abs() <= 1e-12 * c2.abs().max(1.0) {
        return Ok(f64::INFINITY);
    }
    Ok(-num / den)
}

fn sound_or_zero(p: &Potential, r: f64) -> f64 {
    p.eval_unchecked(r, 2).max(0.0).sqrt()
}

fn cons_point(p: &Potential, r_l: f64, r_r: f64) -> ConsShockPoint {
    let sec = if (r_l - r_r).abs() < 1e-14 {
        p.eval_unchecked(r_l, 2)
    } else {
        (p.eval_unchecked(r_l, 1) - p.eval_unchecked(r_r, 1)) / (r_l - r_r)
    };
    let c = sec.max(0.0).sqrt();
    let lam_l = sound_or_zero(p, r_l);
    let lam_r = sound_or_zero(p, r_r);
    let class = classify_speed(c, lam_l, lam_r);
    let slope = dset_slope(p, r_l, r_r).ok().filter(|s| s.is_finite());
    ConsShockPoint {
        r_l,
        r_r,
        c_rh_abs: c,
        lambda_l: lam_l,
        lambda_r: lam_r,
        class,
        slope,
    }
}

// ---------------------------------------------------------------------------
// locus tracing
// ---------------------------------------------------------------------------

/// Trace all off-diagonal components of D = {J = 0} inside the rectangle
/// `window = (r_L_min, r_L_max, r_R_min, r_R_max)` by pseudo-arclength
/// continuation with arclength step `step`. The diagonal itself is always
/// part of D and is never traced.
pub fn trace_dset(
    p: &Potential,
    window: (f64, f64, f64, f64),
    step: f64,
) -> Result<Vec<DCurve>> {
    let (l0, l1, r0, r1) = window;
    if !(l1 > l0 && r1 > r0) || !(step > 0.0) {
        return Err(Error::Usage(format!("degenerate window {window:?} or step {step}")));
    }
    let dom = p.eval_domain();
    for x in [l0, l1, r0, r1] {
        if x < dom.0 || x > dom.1 {
            return Err(Error::Domain(format!(
                "window {window:?} leaves the evaluation domain [{}, {}]",
                dom.0, dom.1
            )));
        }
    }
    let tracer = Tracer {
        p,
        window,
        h: step,
        j_scale: trace_j_scale(p, window),
    };
    let mut curves: Vec<DCurve> = Vec::new();
    for seed in tracer.seeds() {
        if curves.iter().any(|c| tracer.contains_point(c, seed)) {
            continue;
        }
        let curve = tracer.trace_component(seed);
        if curve.points.len() >= 2 {
            curves.push(curve);
        }
    }
    Ok(curves)
}

fn trace_j_scale(p: &Potential, window: (f64, f64, f64, f64)) -> f64 {
    let mut scale: f64 = 1.0;
    for x in [window.0, window.1, window.2, window.3] {
        scale = scale.max(p.eval_unchecked(x, 0).abs());
    }
    scale
}

struct Tracer<'a> {
    p: &'a Potential,
    window: (f64, f64, f64, f64),
    h: f64,
    j_scale: f64,
}

impl Tracer<'_> {
    fn j(&self, x: (f64, f64)) -> f64 {
        let p = self.p;
        p.eval_unchecked(x.0, 0) - p.eval_unchecked(x.1, 0)
            - (x.0 - x.1) * 0.5 * (p.eval_unchecked(x.0, 1) + p.eval_unchecked(x.1, 1))
    }

    fn grad(&self, x: (f64, f64)) -> (f64, f64) {
        let p = self.p;
        let half_dr = 0.5 * (x.0 - x.1);
        let sec = if (x.0 - x.1).abs() < 1e-14 {
            p.eval_unchecked(x.0, 2)
        } else {
            (p.eval_unchecked(x.0, 1) - p.eval_unchecked(x.1, 1)) / (x.0 - x.1)
        };
        (
            half_dr * (sec - p.eval_unchecked(x.0, 2)),
            half_dr * (sec - p.eval_unchecked(x.1, 2)),
        )
    }

    fn in_window(&self, x: (f64, f64)) -> bool {
        let (l0, l1, r0, r1) = self.window;
        x.0 >= l0 && x.0 <= l1 && x.1 >= r0 && x.1 <= r1
    }

    /// Off-diagonal seed points found by sign changes of J on a coarse grid.
    fn seeds(&self) -> Vec<(f64, f64)> {
        let (l0, l1, r0, r1) = self.window;
        let n = 200;
        let band = 2.0 * ((l1 - l0) + (r1 - r0)) / n as f64;
        let mut out = Vec::new();
        for i in 0..=n {
            let r_l = l0 + (l1 - l0) * i as f64 / n as f64;
            let f = |r: f64| self.j((r_l, r));
            for (lo, hi) in numerics::sign_changes(&f, r0, r1, n) {
                if (0.5 * (lo + hi) - r_l).abs() <= band {
                    continue;
                }
                if let Ok(root) = numerics::bisect(&f, lo, hi, 1e-12) {
                    out.push((r_l, root));
                }
            }
        }
        out
    }

    fn contains_point(&self, curve: &DCurve, x: (f64, f64)) -> bool {
        let tol = 2.0 * self.h;
        curve
            .points
            .iter()
            .any(|q| (q.r_l - x.0).abs().max((q.r_r - x.1).abs()) < tol)
    }

    /// Newton-project a predictor back onto {J = 0} along the gradient.
    fn correct(&self, mut x: (f64, f64)) -> Option<(f64, f64)> {
        for _ in 0..20 {
            let j = self.j(x);
            if j.abs() <= 1e-13 * self.j_scale {
                return Some(x);
            }
            let g = self.grad(x);
            let g2 = g.0 * g.0 + g.1 * g.1;
            if g2 < 1e-300 {
                return None;
            }
            let t = j / g2;
            x = (x.0 - t * g.0, x.1 - t * g.1);
            if !x.0.is_finite() || !x.1.is_finite() {
                return None;
            }
        }
        None
    }

    /// Unit tangent of the locus at x, oriented along `dir`.
    fn tangent(&self, x: (f64, f64), dir: (f64, f64)) -> Option<(f64, f64)> {
        let g = self.grad(x);
        let norm = (g.0 * g.0 + g.1 * g.1).sqrt();
        if norm < 1e-300 {
            return None;
        }
        let mut t = (g.1 / norm, -g.0 / norm);
        if t.0 * dir.0 + t.1 * dir.1 < 0.0 {
            t = (-t.0, -t.1);
        }
        Some(t)
    }

    fn trace_component(&self, seed: (f64, f64)) -> DCurve {
        let fwd = self.trace_direction(seed, (1.0, 0.0));
        let mut pts: Vec<(f64, f64)>;
        let mut crossings = fwd.crossings.clone();
        let closed = fwd.closed;
        let mut partial = fwd.partial;
        if closed {
            pts = fwd.points;
        } else {
            let bwd = self.trace_direction(seed, (-1.0, 0.0));
            partial = partial || bwd.partial;
            for c in bwd.crossings {
                if !crossings.iter().any(|&k| (k - c).abs() < 1e-6) {
                    crossings.push(c);
                }
            }
            pts = bwd.points.into_iter().rev().collect();
            pts.extend(fwd.points.into_iter().skip(1));
        }
        crossings.sort_by(f64::total_cmp);
        crossings.dedup_by(|a, b| (*a - *b).abs() < 1e-6);
        let points: Vec<ConsShockPoint> =
            pts.iter().map(|&(a, b)| cons_point(self.p, a, b)).collect();
        let extrema = find_extrema(&pts);
        DCurve {
            points,
            crossings,
            extrema,
            closed,
            partial,
        }
    }

    fn trace_direction(&self, start: (f64, f64), dir0: (f64, f64)) -> Branch {
        let mut branch = Branch {
            points: vec![start],
            crossings: Vec::new(),
            closed: false,
            partial: false,
        };
        let mut x = start;
        let mut dir = dir0;
        let diag_band = 1.5 * self.h;
        let max_steps = (40.0 * perimeter_bound(self.window) / self.h) as usize + 100;
        for step_idx in 0..max_steps {
            let Some(t) = self.tangent(x, dir) else {
                branch.partial = true;
                break;
            };
            // Passing through the diagonal: the gradient of J degenerates
            // there, so jump across and record the crossing.
            if (x.0 - x.1).abs() < diag_band && (t.0 - t.1).abs() > (t.0 + t.1).abs() {
                let cross = self.polish_crossing(0.5 * (x.0 + x.1));
                if !branch.crossings.iter().any(|&k| (k - cross).abs() < 1e-6) {
                    branch.crossings.push(cross);
                }
                branch.points.push((cross, cross));
                let jumped = (cross + 2.5 * self.h * t.0, cross + 2.5 * self.h * t.1);
                match self.correct(jumped) {
                    Some(nx) if self.in_window(nx) => {
                        dir = t;
                        x = nx;
                        branch.points.push(x);
                        continue;
                    }
                    _ => break,
                }
            }
            // Predictor-corrector step with halving on failure.
            let mut h = self.h;
            let mut accepted = None;
            for _ in 0..=8 {
                let pred = (x.0 + h * t.0, x.1 + h * t.1);
                if let Some(nx) = self.correct(pred) {
                    let d = ((nx.0 - x.0).powi(2) + (nx.1 - x.1).powi(2)).sqrt();
                    if d <= 2.0 * h && d > 1e-14 {
                        accepted = Some(nx);
                        break;
                    }
                }
                h *= 0.5;
            }
            let Some(nx) = accepted else {
                branch.partial = true;
                break;
            };
            if !self.in_window(nx) {
                break;
            }
            dir = (nx.0 - x.0, nx.1 - x.1);
            x = nx;
            branch.points.push(x);
            // Closure test against the branch start.
            let d0 = ((x.0 - start.0).powi(2) + (x.1 - start.1).powi(2)).sqrt();
            if step_idx > 10 && d0 < 1.6 * self.h {
                branch.closed = true;
                branch.points.push(start);
                break;
            }
        }
        branch
    }

    /// Refine a diagonal crossing to the nearby turning point of the flux.
    fn polish_crossing(&self, guess: f64) -> f64 {
        let p = self.p;
        let mut t = guess;
        for _ in 0..30 {
            let f3 = p.eval_unchecked(t, 3);
            let f4 = p.eval_unchecked(t, 4);
            if f4.abs() < 1e-300 {
                break;
            }
            let next = t - f3 / f4;
            if (next - t).abs() < 1e-13 {
                t = next;
                break;
            }
            t = next;
        }
        if (t - guess).abs() < 10.0 * self.h {
            t
        } else {
            guess
        }
    }
}

struct Branch {
    points: Vec<(f64, f64)>,
    crossings: Vec<f64>,
    closed: bool,
    partial: bool,
}

fn perimeter_bound(window: (f64, f64, f64, f64)) -> f64 {
    (window.1 - window.0) + (window.3 - window.2)
}

fn find_extrema(pts: &[(f64, f64)]) -> Vec<Extremum> {
    let mut out = Vec::new();
    for k in 1..pts.len().saturating_sub(1) {
        let dl0 = pts[k].0 - pts[k - 1].0;
        let dl1 = pts[k + 1].0 - pts[k].0;
        if dl0 * dl1 < 0.0 {
            out.push(Extremum {
                index: k,
                along_r_l: true,
            });
        }
        let dr0 = pts[k].1 - pts[k - 1].1;
        let dr1 = pts[k + 1].1 - pts[k].1;
        if dr0 * dr1 < 0.0 {
            out.push(Extremum {
                index: k,
                along_r_l: false,
            });
        }
    }
    out
}

// ---------------------------------------------------------------------------
// bifurcation structure at turning points
// ---------------------------------------------------------------------------

/// Signs of the local branch of D bifurcating from the diagonal at a
/// turning point r* of the flux.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BifurcationCheck {
    /// |R(r*+s) − (r*−s)| / s², the deviation from the tangent (−1, 1).
    pub tangent_residual: f64,
    /// sgn(c² − Φ″) at the end strains: +1 supersonic, −1 subsonic.
    /// Equals −sgn(Φ⁗(r*)) for non-degenerate turning points.
    pub sgn_c_vs_sound: i8,
    /// sgn(Φ″(r_L) − Φ″(r_R)); equals sgn(Φ⁽⁵⁾(r*)).
    pub sgn_cl_vs_cr: i8,
}

/// Locate the D point near (r*+s, r*−s) and report the local sign
/// structure. Errors for degenerate turning points (Φ⁗(r*) = 0) and when
/// no nearby branch exists.
pub fn bifurcation_check(p: &Potential, r_star: f64, s: f64) -> Result<BifurcationCheck> {
    let scale = p.d2phi(r_star)?.abs().max(1.0);
    if p.eval(r_star, 3)?.abs() > 1e-6 * scale {
        return Err(Error::Usage(format!("r = {r_star} is not a turning point of the flux")));
    }
    if p.eval(r_star, 4)?.abs() < 1e-8 * scale {
        return Err(Error::Domain(format!(
            "turning point r = {r_star} is degenerate (Φ⁗ = 0); no local branch formula"
        )));
    }
    if !(s > 0.0) {
        return Err(Error::Usage(format!("offset s = {s} must be positive")));
    }
    let r_l = r_star + s;
    let conj = solve_conjugate(p, r_l, (r_star - 3.0 * s, r_star - 0.05 * s))
        .map_err(|_| Error::Domain(format!(
            "no D branch near (r*+s, r*−s) for r* = {r_star}, s = {s}"
        )))?;
    let c2 = secant_slope(p, r_l, conj)?;
    let dl = c2 - p.d2phi(r_l)?;
    let dr = c2 - p.d2phi(conj)?;
    let sgn_c_vs_sound = if dl > 0.0 && dr > 0.0 {
        1
    } else if dl < 0.0 && dr < 0.0 {
        -1
    } else {
        0
    };
    let diff = p.d2phi(r_l)? - p.d2phi(conj)?;
    Ok(BifurcationCheck {
        tangent_residual: (conj - (r_star - s)).abs() / (s * s),
        sgn_c_vs_sound,
        sgn_cl_vs_cr: if diff > 0.0 { 1 } else if diff < 0.0 { -1 } else { 0 },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::PotentialKind;
    use crate::psystem::energy_production;
    use approx::assert_abs_diff_eq;

    /// Strain conjugate to r_L = 2 for the fast quintic: (22 − √340)/6.
    fn fast_conjugate_of_2() -> f64 {
        (22.0 - 340.0_f64.sqrt()) / 6.0
    }

    fn wide_slow_quintic() -> Potential {
        Potential::with_domain(PotentialKind::QuinticSlow, (-4.0, 8.0)).unwrap()
    }

    #[test]
    fn jfunc_vanishes_on_diagonal_and_is_antisymmetric() {
        let p = Potential::toda();
        for r in [-0.5, 0.0, 1.0, 3.5] {
            assert_abs_diff_eq!(jfunc(&p, r, r).unwrap(), 0.0);
        }
        let j = jfunc(&p, 1.0, 2.5).unwrap();
        assert_abs_diff_eq!(jfunc(&p, 2.5, 1.0).unwrap(), -j, epsilon = 1e-14);
    }

    #[test]
    fn jfunc_zero_at_fast_quintic_conjugate_pair() {
        let p = Potential::quintic_fast();
        // Printed rounding of the conjugate is accurate to ~2e-3 in J.
        assert!(jfunc(&p, 2.0, 0.59).unwrap().abs() < 2e-3);
        // The exact conjugate is a root of J to machine precision.
        assert!(jfunc(&p, 2.0, fast_conjugate_of_2()).unwrap().abs() < 1e-13);
    }

    #[test]
    fn even_quartic_has_antidiagonal_conservative_data() {
        let p = Potential::new(PotentialKind::Polynomial(vec![0.0, 0.0, 1.0, 0.0, 1.0]))
            .unwrap();
        for r in [0.3, 1.0, 2.0, 4.4] {
            assert_abs_diff_eq!(jfunc(&p, r, -r).unwrap(), 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn jfunc_equals_area_between_flux_and_secant() {
        let p = Potential::quintic_slow();
        for (a, b) in [(4.0, 1.0), (3.0, 0.0), (5.0, 2.2)] {
            let sec = |s: f64| {
                p.dphi(b).unwrap() + (p.dphi(a).unwrap() - p.dphi(b).unwrap()) * (s - b) / (a - b)
            };
            let area = numerics::adaptive_simpson(
                &|s: f64| p.eval_unchecked(s, 1) - sec(s),
                b,
                a,
                1e-12,
            )
            .unwrap();
            assert_abs_diff_eq!(jfunc(&p, a, b).unwrap(), area, epsilon = 1e-9);
        }
    }

    #[test]
    fn conjugates_match_the_exact_quadratic_roots() {
        let p = Potential::quintic_fast();
        let r = solve_conjugate(&p, 2.0, (0.0, 1.2)).unwrap();
        assert_abs_diff_eq!(r, fast_conjugate_of_2(), epsilon = 1e-10);
        assert_abs_diff_eq!(r, 0.5934851810, epsilon = 1e-9);

        // Slow quintic: conjugate of 4 is √5 − 1 ≈ 1.236.
        let p = Potential::quintic_slow();
        let r = solve_conjugate(&p, 4.0, (0.5, 2.5)).unwrap();
        assert_abs_diff_eq!(r, 5.0_f64.sqrt() - 1.0, epsilon = 1e-10);
    }

    #[test]
    fn conjugate_error_cases() {
        let p = Potential::toda();
        assert!(matches!(
            solve_conjugate(&p, 1.0, (-2.0, 5.0)),
            Err(Error::Domain(_))
        ));
        // Both roots −1 ± √5 of the slow quintic's r_L = 4 row in one bracket.
        let p = wide_slow_quintic();
        assert!(matches!(
            solve_conjugate(&p, 4.0, (-4.0, 2.0)),
            Err(Error::Usage(_))
        ));
    }

    #[test]
    fn fast_quintic_conservative_shock_is_supersonic() {
        let p = Potential::quintic_fast();
        let w = build_conservative_shock(&p, 2.0, fast_conjugate_of_2(), 0.0, Family::Two)
            .unwrap();
        assert!(w.conservative);
        assert_abs_diff_eq!(w.speed_lo, 1.5025333664, epsilon = 1e-9);
        assert_abs_diff_eq!((w.right.v - w.left.v).abs(), 2.1133346, epsilon = 1e-6);
        assert_eq!(w.kind, WaveKind::Shock(ShockClass::FastUndercompressive));
        assert!(energy_production(&p, w.left, w.right).unwrap().abs() < 1e-10);
    }

    #[test]
    fn slow_quintic_conservative_shock_is_subsonic() {
        let p = Potential::quintic_slow();
        let r_r = 5.0_f64.sqrt() - 1.0;
        let w = build_conservative_shock(&p, 4.0, r_r, 0.0, Family::Two).unwrap();
        assert!((w.speed_lo - 1.46).abs() < 0.01);
        assert!(((w.right.v - w.left.v).abs() - 4.03).abs() < 0.01);
        assert_eq!(w.kind, WaveKind::Shock(ShockClass::SlowUndercompressive));
        assert!(energy_production(&p, w.left, w.right).unwrap().abs() < 1e-10);
    }

    #[test]
    fn harmonic_pairs_are_all_conservative_contacts() {
        let p = Potential::harmonic();
        let w = build_conservative_shock(&p, 1.0, -0.7, 0.0, Family::One).unwrap();
        assert_abs_diff_eq!(w.speed_lo, -1.0, epsilon = 1e-12);
        assert_eq!(w.kind, WaveKind::Shock(ShockClass::Sonic));
    }

    #[test]
    fn rejects_non_conservative_pairs() {
        let p = Potential::quintic_fast();
        assert!(matches!(
            build_conservative_shock(&p, 2.0, 1.5, 0.0, Family::Two),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn toda_window_has_no_off_diagonal_locus() {
        let p = Potential::toda();
        let curves = trace_dset(&p, (-2.0, 6.0, -2.0, 6.0), 0.02).unwrap();
        assert!(curves.is_empty());
    }

    #[test]
    fn slow_quintic_locus_is_a_closed_ellipse() {
        let p = wide_slow_quintic();
        let curves = trace_dset(&p, (-3.3, 5.3, -3.3, 5.3), 0.02).unwrap();
        assert_eq!(curves.len(), 1, "expected one off-diagonal component");
        let c = &curves[0];
        assert!(c.closed, "component should close up");
        assert!(!c.partial);
        // In centred coordinates u = (r_L+r_R)/2 − 1, w = (r_L−r_R)/2 the
        // locus is the exact ellipse u²/3 + w²/15 = 1.
        for q in &c.points {
            let u = 0.5 * (q.r_l + q.r_r) - 1.0;
            let w = 0.5 * (q.r_l - q.r_r);
            // Near the diagonal crossings the gradient of J degenerates and
            // the corrector's geometric accuracy drops accordingly.
            let tol = if (q.r_l - q.r_r).abs() < 0.1 { 1e-3 } else { 1e-6 };
            assert!(
                (u * u / 3.0 + w * w / 15.0 - 1.0).abs() < tol,
                "point ({}, {}) off the ellipse",
                q.r_l,
                q.r_r
            );
        }
        // Diagonal crossings at both turning points 1 ± √3.
        assert_eq!(c.crossings.len(), 2);
        assert_abs_diff_eq!(c.crossings[0], 1.0 - 3.0_f64.sqrt(), epsilon = 1e-8);
        assert_abs_diff_eq!(c.crossings[1], 1.0 + 3.0_f64.sqrt(), epsilon = 1e-8);
        // Two coordinate extrema in each direction.
        let n_l = c.extrema.iter().filter(|e| e.along_r_l).count();
        let n_r = c.extrema.iter().filter(|e| !e.along_r_l).count();
        assert_eq!((n_l, n_r), (2, 2));
    }

    #[test]
    fn compression_type_changes_at_coordinate_extrema() {
        // At an r_L-extremum (vertical tangent) |c| crosses λ(r_R); at an
        // r_R-extremum it crosses λ(r_L).
        let p = wide_slow_quintic();
        let curves = trace_dset(&p, (-3.3, 5.3, -3.3, 5.3), 0.02).unwrap();
        let c = &curves[0];
        for e in &c.extrema {
            let k = e.index;
            let before = &c.points[k - 1];
            let after = &c.points[k + 1];
            let diff = |q: &ConsShockPoint| {
                if e.along_r_l {
                    q.c_rh_abs - q.lambda_r
                } else {
                    q.c_rh_abs - q.lambda_l
                }
            };
            assert!(
                diff(before) * diff(after) <= 0.0,
                "no speed crossing at extremum index {k}"
            );
        }
    }

    #[test]
    fn even_quartic_locus_is_the_antidiagonal() {
        let p = Potential::new(PotentialKind::Polynomial(vec![0.0, 0.0, 1.0, 0.0, 1.0]))
            .unwrap();
        let curves = trace_dset(&p, (-2.0, 2.0, -2.0, 2.0), 0.02).unwrap();
        assert_eq!(curves.len(), 1);
        let c = &curves[0];
        assert!(!c.closed);
        for q in &c.points {
            assert!((q.r_l + q.r_r).abs() < 1e-8, "({}, {}) off the antidiagonal", q.r_l, q.r_r);
        }
        assert_eq!(c.crossings.len(), 1);
        assert_abs_diff_eq!(c.crossings[0], 0.0, epsilon = 1e-8);
    }

    #[test]
    fn analytic_slope_matches_secant_along_locus() {
        let p = wide_slow_quintic();
        let curves = trace_dset(&p, (-3.3, 5.3, -3.3, 5.3), 0.02).unwrap();
        let pts = &curves[0].points;
        let mut checked = 0;
        for k in 1..pts.len() - 1 {
            let dl = pts[k + 1].r_l - pts[k - 1].r_l;
            let dr = pts[k + 1].r_r - pts[k - 1].r_r;
            // Only compare where the curve is far from vertical.
            if dl.abs() < 0.5 * dr.abs() || (pts[k].r_l - pts[k].r_r).abs() < 0.3 {
                continue;
            }
            if let Some(s) = pts[k].slope {
                if s.abs() < 5.0 {
                    assert!(
                        (s - dr / dl).abs() < 1e-2 * (1.0 + s.abs()),
                        "slope mismatch at index {k}: {s} vs {}",
                        dr / dl
                    );
                    checked += 1;
                }
            }
        }
        assert!(checked > 50);
    }

    #[test]
    fn bifurcation_signs_follow_the_fourth_derivative() {
        // Fast quintic at r* = 3 − √3: Φ⁗ < 0, supersonic branch.
        let p = Potential::quintic_fast();
        let b = bifurcation_check(&p, 3.0 - 3.0_f64.sqrt(), 0.05).unwrap();
        assert_eq!(b.sgn_c_vs_sound, 1);
        // Slow quintic at r* = 1 + √3: Φ⁗ > 0, subsonic branch.
        let p = Potential::quintic_slow();
        let b = bifurcation_check(&p, 1.0 + 3.0_f64.sqrt(), 0.05).unwrap();
        assert_eq!(b.sgn_c_vs_sound, -1);
        assert!(b.tangent_residual < 5.0);
    }

    #[test]
    fn bifurcation_check_input_validation() {
        let p = Potential::quintic_fast();
        // Not a turning point.
        assert!(matches!(bifurcation_check(&p, 2.0, 0.05), Err(Error::Usage(_))));
        // No turning point at all: Toda has a convex flux everywhere.
        let p = Potential::toda();
        assert!(bifurcation_check(&p, 1.0, 0.05).is_err());
    }

    #[test]
    fn tangent_factorisation_of_the_bifurcation_polynomial() {
        // 2x⁴ − 3x³ + 3x − 2 = (x − 1)(x + 1)(2x² − 3x + 2); the quadratic
        // has discriminant −7, so the only real tangent directions are ±1.
        let poly = |x: f64| 2.0 * x.powi(4) - 3.0 * x.powi(3) + 3.0 * x - 2.0;
        let factored = |x: f64| (x - 1.0) * (x + 1.0) * (2.0 * x * x - 3.0 * x + 2.0);
        for i in -20..=20 {
            let x = i as f64 * 0.25;
            assert_abs_diff_eq!(poly(x), factored(x), epsilon = 1e-9);
        }
        assert_eq!(9.0 - 4.0 * 2.0 * 2.0, -7.0);
    }
}
