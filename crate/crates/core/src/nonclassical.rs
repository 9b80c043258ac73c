//! Non-classical Riemann solvers for flux with one turning point
//!
//! For a convex Φ whose flux Φ′ has an inflection (turning) point r*, the
//! classical Lax construction loses admissibility or existence across r*.
//! Two modified solvers repair it:
//!
//! - the **conservative** solver inserts energy-conserving shocks (kind N)
//!   nucleated at the anchor strains r₀, r₂ and via the conjugate map r_m;
//! - the **dissipative** (maximum entropy dissipation) solver uses only
//!   Lax shocks and rarefactions, with sonic attachment at the anchor r₀*.
//!
//! Both are built from the same predicate-driven fan constructor so that
//! every flux orientation and both characteristic families run through one
//! audited code path. An additional prediction layer maps p-system
//! structures to the expected atomistic wave trains (Lax shocks appear as
//! dispersive shocks there) and can re-anchor nucleation thresholds with
//! empirically measured front speeds.

use std::cell::Cell;

use serde::{Deserialize, Serialize};

use crate::conservative::build_conservative_shock;
use crate::error::{Error, Result};
use crate::numerics;
use crate::potential::Potential;
use crate::psystem::{
    classical_wave, integral_curve_v, make_wave, rh_speed, wave_set_point, Family,
    RiemannSolution, State, Wave, WaveKind,
};

/// Interval tolerance for segment membership tests.
const SEGMENT_TOL: f64 = 1e-12;

// ---------------------------------------------------------------------------
// measured front-speed tables
// ---------------------------------------------------------------------------

/// Empirical front-speed table: |c_f| of the measured dispersive-shock
/// front as a function of the downstream strain, for one fixed left state
/// and family. Linearly interpolated, never extrapolated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CfTable {
    /// (r, |c_f|) pairs sorted by strain.
    pub points: Vec<(f64, f64)>,
}

impl CfTable {
    pub fn new(mut points: Vec<(f64, f64)>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::Usage("front-speed table needs at least two points".into()));
        }
        points.sort_by(|a, b| a.0.total_cmp(&b.0));
        Ok(CfTable { points })
    }

    /// Interpolated |c_f| at strain `r`, or `None` outside the table range.
    pub fn interp(&self, r: f64) -> Option<f64> {
        let pts = &self.points;
        if r < pts[0].0 || r > pts[pts.len() - 1].0 {
            return None;
        }
        let k = pts.partition_point(|q| q.0 <= r).min(pts.len() - 1).max(1);
        let (a, b) = (pts[k - 1], pts[k]);
        if (b.0 - a.0).abs() < 1e-300 {
            return Some(a.1);
        }
        Some(a.1 + (b.1 - a.1) * (r - a.0) / (b.0 - a.0))
    }
}

/// Squared front speed from the table if covered, otherwise the squared
/// Rankine-Hugoniot speed (proxy; sets the flag).
fn speed2(
    p: &Potential,
    r_l: f64,
    x: f64,
    cf: Option<&CfTable>,
    proxy: &Cell<bool>,
) -> f64 {
    if let Some(table) = cf {
        if let Some(c) = table.interp(x) {
            return c * c;
        }
        proxy.set(true);
    }
    secant2(p, r_l, x)
}

fn secant2(p: &Potential, a: f64, b: f64) -> f64 {
    if (a - b).abs() < 1e-14 * (1.0 + a.abs()) {
        p.eval_unchecked(0.5 * (a + b), 2)
    } else {
        (p.eval_unchecked(a, 1) - p.eval_unchecked(b, 1)) / (a - b)
    }
}

// ---------------------------------------------------------------------------
// geometric helpers
// ---------------------------------------------------------------------------

fn lambda_unchecked(p: &Potential, r: f64, family: Family) -> f64 {
    family.sign() * p.eval_unchecked(r, 2).max(0.0).sqrt()
}

/// Side test: is the target direction from `r_l` the expansion side of the
/// family-`f` wave set (characteristic speed increasing)?
fn is_expansion_side(p: &Potential, r_l: f64, dir: f64, family: Family) -> bool {
    let eps = 1e-7 * (1.0 + r_l.abs());
    let probe = r_l + dir * eps;
    lambda_unchecked(p, probe, family) > lambda_unchecked(p, r_l, family)
}

/// Turning points of the flux strictly between a and b (inside the core).
fn turning_points_between(p: &Potential, a: f64, b: f64) -> Result<Vec<f64>> {
    let (lo, hi) = (a.min(b), a.max(b));
    let core = p.hyperbolic_core();
    let (lo, hi) = (lo.max(core.0), hi.min(core.1));
    if hi <= lo {
        return Ok(Vec::new());
    }
    Ok(p.turning_points((lo, hi))?
        .into_iter()
        .map(|t| t.r_star)
        .filter(|&r| r > lo + 1e-12 && r < hi - 1e-12)
        .collect())
}

/// The turning point nearest to `from` when walking towards `limit`,
/// if any lies strictly between them.
fn nearest_turning_point(p: &Potential, from: f64, limit: f64) -> Option<f64> {
    let tps = turning_points_between(p, from, limit).ok()?;
    tps.into_iter()
        .min_by(|a, b| (a - from).abs().total_cmp(&(b - from).abs()))
}

/// The innermost search limit in direction `dir` from `from` (core edge
/// with a small pad).
fn reach_limit(p: &Potential, dir: f64) -> f64 {
    let core = p.hyperbolic_core();
    let pad = 1e-9 * (core.1 - core.0).max(1.0);
    if dir > 0.0 {
        core.1 - pad
    } else {
        core.0 + pad
    }
}

/// Zero of `f` scanned over (a, b), choosing the root closest to `prefer`.
fn root_near(f: &dyn Fn(f64) -> f64, a: f64, b: f64, prefer: f64) -> Option<f64> {
    let (lo, hi) = (a.min(b), a.max(b));
    if hi <= lo {
        return None;
    }
    let mut best: Option<f64> = None;
    for (l, h) in numerics::sign_changes(f, lo, hi, 400) {
        if let Ok(r) = numerics::bisect(f, l, h, 1e-13) {
            if best.is_none_or(|c| (r - prefer).abs() < (c - prefer).abs()) {
                best = Some(r);
            }
        }
    }
    best
}

/// Off-diagonal conjugate of `r_fixed` (J(r_fixed, ·) = 0) searched in
/// (a, b), nearest to `prefer`.
fn conjugate_near(p: &Potential, r_fixed: f64, a: f64, b: f64, prefer: f64) -> Option<f64> {
    let f = move |r: f64| {
        p.eval_unchecked(r_fixed, 0) - p.eval_unchecked(r, 0)
            - (r_fixed - r) * 0.5 * (p.eval_unchecked(r_fixed, 1) + p.eval_unchecked(r, 1))
    };
    let band = 1e-9 * (1.0 + r_fixed.abs());
    root_near(&f, a, b, prefer).filter(|r| (r - r_fixed).abs() > band)
}

// ---------------------------------------------------------------------------
// anchors
// ---------------------------------------------------------------------------

/// Anchor strains of the conservative solver for a fixed left state and
/// family, relative to the single turning point r* on the compression side.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConservativeAnchors {
    pub r_l: f64,
    pub family: Family,
    /// Turning point of the flux on the compression side of r_L.
    pub r_star: f64,
    /// Conjugate strain of r_L: J(r_L, r0) = 0.
    pub r0: f64,
    /// Nucleation strain: |c_rh(r_L, r2)| = |c_rh(r_L, r0)| with r2 ≠ r0.
    pub r2: f64,
}

/// Compute the conservative-solver anchors r₀ and r₂; the r_R-dependent
/// anchors are exposed as [`ConservativeAnchors::r_m`] and
/// [`ConservativeAnchors::r1`].
pub fn conservative_anchors(
    p: &Potential,
    u_l: State,
    family: Family,
) -> Result<ConservativeAnchors> {
    anchors_with(p, u_l, family, None, &Cell::new(false))
}

fn anchors_with(
    p: &Potential,
    u_l: State,
    family: Family,
    cf: Option<&CfTable>,
    proxy: &Cell<bool>,
) -> Result<ConservativeAnchors> {
    let r_l = u_l.r;
    let shock_dir = shock_direction(p, r_l, family)?;
    // The governing turning point is the nearest one reachable from r_L,
    // preferring the compression side (the printed orientation).
    let (r_star, dir) = [shock_dir, -shock_dir]
        .into_iter()
        .find_map(|d| {
            nearest_turning_point(p, r_l, reach_limit(p, d)).map(|t| (t, d))
        })
        .ok_or_else(|| {
            Error::Domain(format!(
                "no turning point reachable from r_L = {r_l}; anchors undefined"
            ))
        })?;
    let far = reach_limit(p, dir);
    let r0 = conjugate_near(p, r_l, r_star.min(far), r_star.max(far), r_star)
        .ok_or_else(|| {
            Error::Domain(format!("conjugate r0 of r_L = {r_l} not found beyond r* = {r_star}"))
        })?;
    let m0 = speed2(p, r_l, r0, cf, proxy);
    let g = |x: f64| speed2(p, r_l, x, cf, proxy) - m0;
    let pad = 1e-6 * (1.0 + r_l.abs());
    let toward = (r_l - r0).signum();
    let r2 = root_near(&g, r0 + toward * pad, r_l - toward * pad, r0)
        .ok_or_else(|| Error::Domain(format!("nucleation anchor r2 not found for r_L = {r_l}")))?;
    Ok(ConservativeAnchors {
        r_l,
        family,
        r_star,
        r0,
        r2,
    })
}

impl ConservativeAnchors {
    /// Conjugate strain of r_R: J(r_R, r_m) = 0, on the r_L side of r*.
    pub fn r_m(&self, p: &Potential, r_r: f64) -> Result<f64> {
        let dir = (self.r_l - self.r_star).signum();
        let limit = reach_limit(p, dir);
        conjugate_near(p, r_r, self.r_star, limit, self.r_l).ok_or_else(|| {
            Error::Domain(format!("conjugate r_m of r_R = {r_r} not found"))
        })
    }

    /// The deep-segment boundary for r_R: the strain below r0 at which the
    /// secant speed from r_L equals the speed of the leading shock from
    /// r_L to r_m(r_R); past it the composite gives way to a single jump
    /// and the solution amplitude is discontinuous.
    pub fn r1(&self, p: &Potential, r_r: f64) -> Result<f64> {
        let r_m = self.r_m(p, r_r)?;
        let target = secant2(p, self.r_l, r_m);
        let dir = (self.r0 - self.r_l).signum();
        let pad = 1e-9 * (1.0 + self.r0.abs());
        let g = move |x: f64| secant2(p, self.r_l, x) - target;
        root_near(&g, self.r0 + dir * pad, reach_limit(p, dir), self.r0).ok_or_else(|| {
            Error::Domain(format!("deep anchor r1 not found for r_R = {r_r}"))
        })
    }
}

/// Anchor strains of the dissipative solver.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DissipativeAnchors {
    pub r_l: f64,
    pub family: Family,
    pub r_star: f64,
    /// Extremal-velocity strain: c_rh(r_L, r0*)² = Φ″(r0*) (sonic shock).
    pub r0_star: f64,
    /// Expansion-side boundary: c_rh(r_L, r1*)² = Φ″(r_L), when it exists.
    pub r1_star: Option<f64>,
}

/// Compute the dissipative-solver anchors on the compression side of r_L.
pub fn dissipative_anchors(
    p: &Potential,
    u_l: State,
    family: Family,
) -> Result<DissipativeAnchors> {
    dissipative_anchors_with(p, u_l, family, None, &Cell::new(false))
}

fn dissipative_anchors_with(
    p: &Potential,
    u_l: State,
    family: Family,
    cf: Option<&CfTable>,
    proxy: &Cell<bool>,
) -> Result<DissipativeAnchors> {
    let r_l = u_l.r;
    let shock_dir = shock_direction(p, r_l, family)?;
    let limit = reach_limit(p, shock_dir);
    let r_star = nearest_turning_point(p, r_l, limit).ok_or_else(|| {
        Error::Domain(format!(
            "no turning point on the compression side of r_L = {r_l}; anchors undefined"
        ))
    })?;
    let g = |x: f64| speed2(p, r_l, x, cf, proxy) - p.eval_unchecked(x, 2);
    let pad = 1e-6 * (1.0 + r_l.abs());
    let r0_star = root_near(&g, r_l + shock_dir * pad, limit, r_l).ok_or_else(|| {
        Error::Domain(format!("sonic anchor r0* not found for r_L = {r_l}"))
    })?;
    // r1* lives beyond the turning point relative to the expansion-side
    // construction; it may be absent (tangential or unreachable).
    let phi_l = p.eval_unchecked(r_l, 2);
    let h = |x: f64| speed2(p, r_l, x, cf, proxy) - phi_l;
    let r1_star = root_near(&h, r_star, limit, r_star);
    Ok(DissipativeAnchors {
        r_l,
        family,
        r_star,
        r0_star,
        r1_star,
    })
}

/// Direction (±1) of the compression side of the family-`f` wave set at r_l.
fn shock_direction(p: &Potential, r_l: f64, family: Family) -> Result<f64> {
    if !p.in_core(r_l) {
        return Err(Error::Convexity(format!(
            "left strain {r_l} outside the hyperbolic core of '{}'",
            p.name()
        )));
    }
    for dir in [1.0, -1.0] {
        if !is_expansion_side(p, r_l, dir, family) {
            return Ok(dir);
        }
    }
    Err(Error::Domain(format!(
        "degenerate left strain {r_l}: both sides are expansion sides"
    )))
}

// ---------------------------------------------------------------------------
// fan construction
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum SolverKind {
    Conservative,
    Dissipative,
}

/// The conservative-solver wave fan from `u_l` to target strain `r` in the
/// given family (up to three elementary waves; empty for a zero jump).
pub fn conservative_wave_fan(
    p: &Potential,
    u_l: State,
    r: f64,
    family: Family,
) -> Result<Vec<Wave>> {
    build_fan(p, u_l, r, family, SolverKind::Conservative, None, &Cell::new(false))
}

/// The dissipative-solver wave fan from `u_l` to target strain `r`.
pub fn dissipative_wave_fan(
    p: &Potential,
    u_l: State,
    r: f64,
    family: Family,
) -> Result<Vec<Wave>> {
    build_fan(p, u_l, r, family, SolverKind::Dissipative, None, &Cell::new(false))
}

fn build_fan(
    p: &Potential,
    u_l: State,
    r: f64,
    family: Family,
    kind: SolverKind,
    cf: Option<&CfTable>,
    proxy: &Cell<bool>,
) -> Result<Vec<Wave>> {
    if (r - u_l.r).abs() < 1e-12 {
        return Ok(Vec::new());
    }
    for x in [u_l.r, r] {
        if !p.in_core(x) {
            return Err(Error::Convexity(format!(
                "strain {x} outside the hyperbolic core of '{}'",
                p.name()
            )));
        }
    }
    let dir = (r - u_l.r).signum();
    let tps = turning_points_between(p, u_l.r, r)?;
    if tps.len() >= 2 {
        return Err(Error::Domain(format!(
            "{} turning points between r_L = {} and r_R = {r}: unsupported regime",
            tps.len(),
            u_l.r
        )));
    }
    let expansion = is_expansion_side(p, u_l.r, dir, family);
    // On the expansion side the modification only kicks in past the
    // turning point, so a turning-point-free span is purely classical.
    // On the compression side the first segment boundary lies beyond the
    // turning point, so the shock fans must do their own gating; they
    // fall back to the classical wave when no anchors exist.
    let fan = if expansion {
        if tps.is_empty() {
            vec![classical_wave(p, u_l, r, family)?]
        } else {
            match kind {
                SolverKind::Conservative => {
                    expansion_fan_conservative(p, u_l, r, family, cf, proxy)?
                }
                SolverKind::Dissipative => expansion_fan_dissipative(p, u_l, r, family)?,
            }
        }
    } else {
        match kind {
            SolverKind::Conservative => shock_fan_conservative(p, u_l, r, family, cf, proxy)?,
            SolverKind::Dissipative => shock_fan_dissipative(p, u_l, r, family, cf, proxy)?,
        }
    };
    check_span(p, &fan)?;
    Ok(fan)
}

/// Pre-condition audit: no spanned strain interval of the final fan may
/// contain more than one turning point.
fn check_span(p: &Potential, fan: &[Wave]) -> Result<()> {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for w in fan {
        lo = lo.min(w.left.r).min(w.right.r);
        hi = hi.max(w.left.r).max(w.right.r);
    }
    if lo < hi && turning_points_between(p, lo, hi)?.len() >= 2 {
        return Err(Error::Domain(format!(
            "solution spans [{lo}, {hi}] containing multiple turning points: unsupported regime"
        )));
    }
    Ok(())
}

/// Compression-side fan of the conservative solver: {C}, {N, C} or {N, R}
/// segmented by the anchors r₂ and r₀.
fn shock_fan_conservative(
    p: &Potential,
    u_l: State,
    r: f64,
    family: Family,
    cf: Option<&CfTable>,
    proxy: &Cell<bool>,
) -> Result<Vec<Wave>> {
    let a = match anchors_with(p, u_l, family, cf, proxy) {
        Ok(a) => a,
        // No conjugate beyond the turning point: the classical shock stands.
        Err(Error::Domain(_)) => return Ok(vec![classical_wave(p, u_l, r, family)?]),
        Err(e) => return Err(e),
    };
    let dir = (r - u_l.r).signum();
    let prog = |x: f64| dir * (x - u_l.r);
    if prog(r) <= prog(a.r2) + SEGMENT_TOL {
        return Ok(vec![classical_wave(p, u_l, r, family)?]);
    }
    let n = build_conservative_shock(p, u_l.r, a.r0, u_l.v, family)?;
    let u0 = n.right;
    if (r - a.r0).abs() < 1e-12 {
        return Ok(vec![n]);
    }
    let (tail, tail_kind) = wave_set_point(p, u0, r, family)?;
    let w = make_wave(p, u0, tail, tail_kind, family, false)?;
    Ok(vec![n, w])
}

/// Expansion-side fan of the conservative solver: {R}, {R, N}, {C, N} or a
/// single deep shock, segmented by r*, r₀ and the r_R-dependent r₁.
fn expansion_fan_conservative(
    p: &Potential,
    u_l: State,
    r: f64,
    family: Family,
    cf: Option<&CfTable>,
    proxy: &Cell<bool>,
) -> Result<Vec<Wave>> {
    let dir = (r - u_l.r).signum();
    let prog = |x: f64| dir * (x - u_l.r);
    let tps = turning_points_between(p, u_l.r, r)?;
    let r_star = tps[0];
    // Anchors are shared with the compression side of the mirrored family:
    // r0 is the conjugate of r_L across this same turning point.
    let far = reach_limit(p, dir);
    let Some(r0) = conjugate_near(p, u_l.r, r_star, far, r_star) else {
        return Ok(vec![classical_wave(p, u_l, r, family)?]);
    };
    if (r - r0).abs() < 1e-12 {
        return Ok(vec![build_conservative_shock(p, u_l.r, r0, u_l.v, family)?]);
    }
    if prog(r) < prog(r0) {
        // Between r* and r0: rarefaction to the conjugate of r_R, then a
        // conservative shock down to r_R.
        let back_limit = reach_limit(p, -dir);
        let r_m = conjugate_near(p, r, r_star, back_limit, u_l.r).ok_or_else(|| {
            Error::Domain(format!("conjugate r_m of r_R = {r} not found"))
        })?;
        let v_m = integral_curve_v(p, u_l, r_m, family)?;
        let u_m = State::new(r_m, v_m);
        let head = make_wave(p, u_l, u_m, WaveKind::Rarefaction, family, false)?;
        let n = build_conservative_shock(p, r_m, r, v_m, family)?;
        return Ok(vec![head, n]);
    }
    // Past r0: the conjugate of r_R moves beyond r_L; the leading wave is a
    // compressive shock, until the deep boundary r1 where a single shock
    // takes over.
    let back_limit = reach_limit(p, -dir);
    let Some(r_m) = conjugate_near(p, r, r_star, back_limit, u_l.r) else {
        return Ok(vec![classical_wave(p, u_l, r, family)?]);
    };
    let target = speed2(p, u_l.r, r_m, cf, proxy);
    let pad = 1e-9 * (1.0 + r0.abs());
    let g = move |x: f64| secant2(p, u_l.r, x) - target;
    let r1 = root_near(&g, r0 + dir * pad, far, r0);
    let deep = match r1 {
        Some(r1) => prog(r) > prog(r1) + SEGMENT_TOL,
        None => true,
    };
    if deep {
        let (u_r, k) = wave_set_point_forced_shock(p, u_l, r, family)?;
        return Ok(vec![make_wave(p, u_l, u_r, k, family, false)?]);
    }
    let (u_m, k) = wave_set_point_forced_shock(p, u_l, r_m, family)?;
    let head = make_wave(p, u_l, u_m, k, family, false)?;
    let n = build_conservative_shock(p, r_m, r, u_m.v, family)?;
    Ok(vec![head, n])
}

/// Hugoniot point regardless of the rarefaction criterion (used where the
/// segment rules prescribe a shock).
fn wave_set_point_forced_shock(
    p: &Potential,
    u_l: State,
    r: f64,
    family: Family,
) -> Result<(State, WaveKind)> {
    let (u, kind) = wave_set_point(p, u_l, r, family)?;
    if let WaveKind::Shock(_) = kind {
        return Ok((u, kind));
    }
    let v = crate::psystem::hugoniot_v(p, u_l, r, family)?;
    let u_r = State::new(r, v);
    let class = crate::psystem::classify_shock(p, u_l, u_r, family)?;
    Ok((u_r, WaveKind::Shock(class)))
}

/// Compression-side fan of the dissipative solver: a single Lax shock up to
/// the sonic anchor r₀*, beyond which the shock pins at r₀* (speed equal to
/// the characteristic there) with an attached rarefaction.
fn shock_fan_dissipative(
    p: &Potential,
    u_l: State,
    r: f64,
    family: Family,
    cf: Option<&CfTable>,
    proxy: &Cell<bool>,
) -> Result<Vec<Wave>> {
    let a = match dissipative_anchors_with(p, u_l, family, cf, proxy) {
        Ok(a) => a,
        Err(Error::Domain(_)) => return Ok(vec![classical_wave(p, u_l, r, family)?]),
        Err(e) => return Err(e),
    };
    let dir = (r - u_l.r).signum();
    let prog = |x: f64| dir * (x - u_l.r);
    if prog(r) <= prog(a.r0_star) + SEGMENT_TOL {
        return Ok(vec![classical_wave(p, u_l, r, family)?]);
    }
    let (u_s, k) = wave_set_point_forced_shock(p, u_l, a.r0_star, family)?;
    let head = make_wave(p, u_l, u_s, k, family, false)?;
    let v_r = integral_curve_v(p, u_s, r, family)?;
    let tail = make_wave(p, u_s, State::new(r, v_r), WaveKind::Rarefaction, family, false)?;
    Ok(vec![head, tail])
}

/// Expansion-side fan of the dissipative solver: {R} before the turning
/// point; beyond it a rarefaction truncated at the attachment strain x with
/// c_rh(x, r_R)² = Φ″(x), followed by the (left-)sonic Lax shock; a single
/// shock where no attachment exists.
fn expansion_fan_dissipative(
    p: &Potential,
    u_l: State,
    r: f64,
    family: Family,
) -> Result<Vec<Wave>> {
    let dir = (r - u_l.r).signum();
    let tps = turning_points_between(p, u_l.r, r)?;
    let r_star = tps[0];
    let pad = 1e-9 * (1.0 + r_star.abs());
    let h = move |x: f64| secant2(p, x, r) - p.eval_unchecked(x, 2);
    let attach = root_near(&h, u_l.r + dir * pad, r_star, u_l.r)
        .filter(|&x| dir * (x - u_l.r) > 1e-10);
    let Some(x) = attach else {
        let (u_r, k) = wave_set_point_forced_shock(p, u_l, r, family)?;
        return Ok(vec![make_wave(p, u_l, u_r, k, family, false)?]);
    };
    let v_x = integral_curve_v(p, u_l, x, family)?;
    let u_x = State::new(x, v_x);
    let head = make_wave(p, u_l, u_x, WaveKind::Rarefaction, family, false)?;
    let (u_r, k) = wave_set_point_forced_shock(p, u_x, r, family)?;
    let tail = make_wave(p, u_x, u_r, k, family, false)?;
    Ok(vec![head, tail])
}

// ---------------------------------------------------------------------------
// Riemann solvers
// ---------------------------------------------------------------------------

/// Solve the Riemann problem with the conservative (energy-conserving
/// shocks) solver.
pub fn solve_riemann_conservative(
    p: &Potential,
    u_l: State,
    u_r: State,
) -> Result<RiemannSolution> {
    solve_with(p, u_l, u_r, SolverKind::Conservative)
}

/// Solve the Riemann problem with the maximum-entropy-dissipation solver.
/// Never emits conservative shocks.
pub fn solve_riemann_dissipative(
    p: &Potential,
    u_l: State,
    u_r: State,
) -> Result<RiemannSolution> {
    solve_with(p, u_l, u_r, SolverKind::Dissipative)
}

fn solve_with(
    p: &Potential,
    u_l: State,
    u_r: State,
    kind: SolverKind,
) -> Result<RiemannSolution> {
    let fan_end = |fan: &[Wave], fallback: State| {
        fan.last().map(|w| w.right).unwrap_or(fallback)
    };
    let core = p.hyperbolic_core();
    let pad = 1e-9 * (core.1 - core.0);
    let limits = (core.0 + pad, core.1 - pad);
    let mut g = |r_m: f64| -> f64 {
        let res = (|| -> Result<f64> {
            let f1 = build_fan(p, u_l, r_m, Family::One, kind, None, &Cell::new(false))?;
            let u_m = fan_end(&f1, u_l);
            let f2 = build_fan(p, u_m, u_r.r, Family::Two, kind, None, &Cell::new(false))?;
            Ok(fan_end(&f2, u_m).v - u_r.v)
        })();
        res.unwrap_or(f64::NAN)
    };
    let x0 = 0.5 * (u_l.r + u_r.r);
    let step = 0.1 * (1.0 + (u_l.r - u_r.r).abs());
    let (a, b) = numerics::expand_bracket(&mut g, x0, step, 1.6, 60, limits)?;
    let r_m = numerics::bisect(&mut g, a, b, 1e-12)?;
    let mut waves = build_fan(p, u_l, r_m, Family::One, kind, None, &Cell::new(false))?;
    let u_m = fan_end(&waves, u_l);
    waves.extend(build_fan(p, u_m, u_r.r, Family::Two, kind, None, &Cell::new(false))?);
    waves.retain(|w| w.amplitude().max((w.right.v - w.left.v).abs()) > 1e-12);
    Ok(RiemannSolution {
        left: u_l,
        right: u_r,
        waves,
    })
}

// ---------------------------------------------------------------------------
// atomistic prediction layer
// ---------------------------------------------------------------------------

/// Conjecture mode matching the flux orientation at the spanned turning
/// point: supersonic for Φ⁗(r*) < 0 (conservative structure survives),
/// subsonic for Φ⁗(r*) > 0 (dissipative structure with nucleation).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConjectureMode {
    Supersonic,
    Subsonic,
}

/// Predicted atomistic wave kinds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PredictedKind {
    /// Dispersive shock (atomistic realization of a Lax shock).
    DispersiveShock,
    /// Sharp front (atomistic realization of a conservative shock).
    ConservativeShock,
    Rarefaction,
}

/// Predicted wave-train structure of a chain Riemann problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictedStructure {
    pub mode: ConjectureMode,
    /// Kinds parallel to `solution.waves`.
    pub labels: Vec<PredictedKind>,
    pub solution: RiemannSolution,
    /// True when Rankine-Hugoniot speeds stood in for measured front speeds.
    pub proxy: bool,
}

/// Predict the atomistic wave-train structure for Riemann data: the
/// conservative (supersonic mode) or dissipative (subsonic mode) p-system
/// structure with Lax shocks relabeled as dispersive shocks. A measured
/// front-speed table, when supplied and covering, re-anchors the nucleation
/// thresholds; otherwise the RH proxy is used and flagged.
pub fn fpu_predicted_structure(
    p: &Potential,
    u_l: State,
    u_r: State,
    mode: ConjectureMode,
    cf_table: Option<&CfTable>,
) -> Result<PredictedStructure> {
    let kind = match mode {
        ConjectureMode::Supersonic => SolverKind::Conservative,
        ConjectureMode::Subsonic => SolverKind::Dissipative,
    };
    let proxy = Cell::new(cf_table.is_none());
    let fan_end = |fan: &[Wave], fallback: State| {
        fan.last().map(|w| w.right).unwrap_or(fallback)
    };
    let core = p.hyperbolic_core();
    let pad = 1e-9 * (core.1 - core.0);
    let limits = (core.0 + pad, core.1 - pad);
    let mut g = |r_m: f64| -> f64 {
        let res = (|| -> Result<f64> {
            let f1 = build_fan(p, u_l, r_m, Family::One, kind, cf_table, &Cell::new(false))?;
            let u_m = fan_end(&f1, u_l);
            let f2 = build_fan(p, u_m, u_r.r, Family::Two, kind, cf_table, &Cell::new(false))?;
            Ok(fan_end(&f2, u_m).v - u_r.v)
        })();
        res.unwrap_or(f64::NAN)
    };
    let x0 = 0.5 * (u_l.r + u_r.r);
    let step = 0.1 * (1.0 + (u_l.r - u_r.r).abs());
    let (a, b) = numerics::expand_bracket(&mut g, x0, step, 1.6, 60, limits)?;
    let r_m = numerics::bisect(&mut g, a, b, 1e-12)?;
    let mut waves = build_fan(p, u_l, r_m, Family::One, kind, cf_table, &proxy)?;
    let u_m = fan_end(&waves, u_l);
    waves.extend(build_fan(p, u_m, u_r.r, Family::Two, kind, cf_table, &proxy)?);
    waves.retain(|w| w.amplitude().max((w.right.v - w.left.v).abs()) > 1e-12);
    let labels = waves
        .iter()
        .map(|w| match w.kind {
            WaveKind::Rarefaction => PredictedKind::Rarefaction,
            WaveKind::Shock(_) if w.conservative => PredictedKind::ConservativeShock,
            WaveKind::Shock(_) => PredictedKind::DispersiveShock,
        })
        .collect();
    Ok(PredictedStructure {
        mode,
        labels,
        solution: RiemannSolution {
            left: u_l,
            right: u_r,
            waves,
        },
        proxy: proxy.get(),
    })
}

/// Nucleation diagnostic: compare the measured front speed |c_f| with the
/// conservative-shock speed |c_rh(r_L, r0)| over the table range.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NucleationReport {
    /// The conservative-shock speed |c_rh(r_L, r0)| that must be reached.
    pub c_threshold: f64,
    /// Maximum measured |c_f| over the table range.
    pub c_f_max: f64,
    /// Whether the nucleation criterion |c_f| ≥ threshold is ever met.
    pub ever_met: bool,
}

/// Evaluate whether measured front speeds ever reach the nucleation
/// threshold of the conservative solver for the given left state.
pub fn nucleation_report(
    p: &Potential,
    u_l: State,
    family: Family,
    table: &CfTable,
) -> Result<NucleationReport> {
    let anchors = conservative_anchors(p, u_l, family)?;
    let c_threshold = rh_speed(p, anchors.r_l, anchors.r0, family)?.abs();
    let c_f_max = table
        .points
        .iter()
        .map(|&(_, c)| c.abs())
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(NucleationReport {
        c_threshold,
        c_f_max,
        ever_met: c_f_max >= c_threshold,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::psystem::{energy_production, solve_riemann_classical, ShockClass};
    use approx::assert_abs_diff_eq;

    fn fast() -> Potential {
        Potential::quintic_fast()
    }

    fn slow() -> Potential {
        Potential::quintic_slow()
    }

    #[test]
    fn fast_quintic_anchor_values() {
        let p = fast();
        let a = conservative_anchors(&p, State::new(2.0, 0.0), Family::One).unwrap();
        assert_abs_diff_eq!(a.r_star, 3.0 - 3.0_f64.sqrt(), epsilon = 1e-10);
        assert_abs_diff_eq!(a.r0, (22.0 - 340.0_f64.sqrt()) / 6.0, epsilon = 1e-9);
        assert_abs_diff_eq!(a.r2, 1.2822550112, epsilon = 1e-8);
        // Secant colinearity at r2: both chords from r_L and from r0 share
        // the same slope.
        let m1 = (p.dphi(2.0).unwrap() - p.dphi(a.r2).unwrap()) / (2.0 - a.r2);
        let m2 = (p.dphi(a.r0).unwrap() - p.dphi(a.r2).unwrap()) / (a.r0 - a.r2);
        assert_abs_diff_eq!(m1, m2, epsilon = 1e-9);
        // r1 < r0 < r2 < r_L always; the nucleation strain r2 sits slightly
        // above the turning point for this flux.
        let r1 = a.r1(&p, 0.4).unwrap();
        assert!(r1 < a.r0 && a.r0 < a.r2 && a.r2 < 2.0);
        assert!(a.r2 > a.r_star);
    }

    #[test]
    fn anchor_maps_collapse_at_r0() {
        let p = fast();
        let a = conservative_anchors(&p, State::new(2.0, 0.0), Family::One).unwrap();
        let r_m = a.r_m(&p, a.r0).unwrap();
        assert_abs_diff_eq!(r_m, 2.0, epsilon = 1e-7);
        // At r_R = r0 the leading-shock speed target degenerates to the
        // sound speed at r_L, and for this flux the matching strain below
        // r0 is exactly 0 (the chord from r=2 to r=0 has slope 2 = Φ″(2)).
        let r1 = a.r1(&p, a.r0).unwrap();
        assert_abs_diff_eq!(r1, 0.0, epsilon = 1e-7);
        assert!(r1 < a.r0);
    }

    #[test]
    fn shock_side_segments_of_the_conservative_solver() {
        let p = fast();
        let u_l = State::new(2.0, 0.0);
        let a = conservative_anchors(&p, u_l, Family::One).unwrap();

        // Shallow: single compressive Lax shock.
        let fan = conservative_wave_fan(&p, u_l, 1.9, Family::One).unwrap();
        assert_eq!(fan.len(), 1);
        assert_eq!(fan[0].kind, WaveKind::Shock(ShockClass::Compressive));
        assert!(!fan[0].conservative);

        // Between r0 and r2: conservative shock then Lax shock.
        let fan = conservative_wave_fan(&p, u_l, 1.0, Family::One).unwrap();
        assert_eq!(fan.len(), 2);
        assert!(fan[0].conservative);
        assert!(!fan[1].conservative);
        assert!(matches!(fan[1].kind, WaveKind::Shock(_)));
        assert!(fan[0].speed_lo <= fan[1].speed_lo + 1e-9);
        assert!(energy_production(&p, fan[0].left, fan[0].right).unwrap().abs() < 1e-8);

        // Deep: conservative shock with trailing rarefaction.
        let fan = conservative_wave_fan(&p, u_l, 0.3, Family::One).unwrap();
        assert_eq!(fan.len(), 2);
        assert!(fan[0].conservative);
        assert_eq!(fan[1].kind, WaveKind::Rarefaction);
        assert!(fan[0].speed_hi <= fan[1].speed_lo + 1e-9);

        // Amplitude discontinuity at r2: the conservative shock nucleates
        // with full strength, and at nucleation both speeds coincide.
        let eps = 1e-9;
        let below = conservative_wave_fan(&p, u_l, a.r2 - eps, Family::One).unwrap();
        let above = conservative_wave_fan(&p, u_l, a.r2 + eps, Family::One).unwrap();
        assert_eq!(above.len(), 1);
        assert_eq!(below.len(), 2);
        assert!(below[0].amplitude() > 1.0);
        assert_abs_diff_eq!(below[0].speed_lo, below[1].speed_lo, epsilon = 1e-7);
    }

    #[test]
    fn expansion_side_segments_of_the_conservative_solver() {
        let p = fast();
        let u_l = State::new(2.0, 0.0);
        let a = conservative_anchors(&p, u_l, Family::One).unwrap();

        // Family 2 from the same left state expands downward toward r*.
        let fan = conservative_wave_fan(&p, u_l, 1.5, Family::Two).unwrap();
        assert_eq!(fan.len(), 1);
        assert_eq!(fan[0].kind, WaveKind::Rarefaction);

        // Between r0 and r*: rarefaction to the conjugate, then a
        // conservative shock.
        let fan = conservative_wave_fan(&p, u_l, 1.0, Family::Two).unwrap();
        assert_eq!(fan.len(), 2);
        assert_eq!(fan[0].kind, WaveKind::Rarefaction);
        assert!(fan[1].conservative);
        let r_m = fan[0].right.r;
        assert!(a.r_star < r_m && r_m < 2.0);
        assert!(fan[0].speed_hi <= fan[1].speed_lo + 1e-9);

        // Exactly at r0 the structure is a pure conservative shock.
        let fan = conservative_wave_fan(&p, u_l, a.r0, Family::Two).unwrap();
        assert_eq!(fan.len(), 1);
        assert!(fan[0].conservative);
        assert_abs_diff_eq!(fan[0].speed_lo, 1.5025333664, epsilon = 1e-8);

        // Between r1 and r0: leading compressive shock past r_L, then a
        // conservative shock back down.
        let fan = conservative_wave_fan(&p, u_l, 0.4, Family::Two).unwrap();
        assert_eq!(fan.len(), 2);
        assert!(matches!(fan[0].kind, WaveKind::Shock(_)));
        assert!(!fan[0].conservative);
        assert!(fan[0].right.r > 2.0);
        assert!(fan[1].conservative);
        assert!(fan[0].speed_lo <= fan[1].speed_lo + 1e-9);
    }

    #[test]
    fn dissipative_anchors_of_the_slow_quintic_are_exact() {
        let p = slow();
        let a = dissipative_anchors(&p, State::new(4.0, 0.0), Family::Two).unwrap();
        assert_abs_diff_eq!(a.r_star, 1.0 + 3.0_f64.sqrt(), epsilon = 1e-10);
        // c_rh(4, 2)² = Φ″(2) = 2 exactly.
        assert_abs_diff_eq!(a.r0_star, 2.0, epsilon = 1e-7);
        // Extremal-velocity property: the secant speed from r_L is
        // stationary at r0*.
        let h = 1e-5;
        let m = |x: f64| {
            (p.dphi(4.0).unwrap() - p.dphi(x).unwrap()) / (4.0 - x)
        };
        let dm = (m(a.r0_star + h) - m(a.r0_star - h)) / (2.0 * h);
        assert!(dm.abs() < 1e-4, "secant speed not extremal: dm = {dm}");
    }

    #[test]
    fn dissipative_shock_side_attaches_sonically() {
        let p = slow();
        let u_l = State::new(4.0, 0.0);
        // Shallow target: plain Lax shock.
        let fan = dissipative_wave_fan(&p, u_l, 3.0, Family::Two).unwrap();
        assert_eq!(fan.len(), 1);
        assert!(matches!(fan[0].kind, WaveKind::Shock(_)));
        // Deep target: sonic shock at r0* = 2 with an attached rarefaction.
        let fan = dissipative_wave_fan(&p, u_l, 1.0, Family::Two).unwrap();
        assert_eq!(fan.len(), 2);
        assert!(matches!(fan[0].kind, WaveKind::Shock(ShockClass::Sonic)));
        assert_eq!(fan[1].kind, WaveKind::Rarefaction);
        assert_abs_diff_eq!(fan[0].right.r, 2.0, epsilon = 1e-7);
        // Attachment: shock speed equals the characteristic speed at the
        // attachment state and the rarefaction edge.
        let lam = p.sound_speed(fan[0].right.r).unwrap();
        assert_abs_diff_eq!(fan[0].speed_lo, lam, epsilon = 1e-8);
        assert_abs_diff_eq!(fan[0].speed_lo, fan[1].speed_lo, epsilon = 1e-8);
        assert!(fan.iter().all(|w| !w.conservative));
    }

    #[test]
    fn dissipative_expansion_side_truncates_the_rarefaction() {
        let p = slow();
        let u_l = State::new(4.0, 0.0);
        // Family 1 expands downward across the turning point.
        let fan = dissipative_wave_fan(&p, u_l, -0.5, Family::One).unwrap();
        assert_eq!(fan.len(), 2);
        assert_eq!(fan[0].kind, WaveKind::Rarefaction);
        assert!(matches!(fan[1].kind, WaveKind::Shock(_)));
        let x = fan[0].right.r;
        assert!(1.0 + 3.0_f64.sqrt() < x && x < 4.0);
        // Left-sonic attachment: c = λ at the attachment state.
        let lam = Family::One.lambda(&p, x).unwrap();
        assert_abs_diff_eq!(fan[1].speed_lo, lam, epsilon = 1e-8);
        assert_abs_diff_eq!(fan[0].speed_hi, fan[1].speed_lo, epsilon = 1e-8);
    }

    #[test]
    fn solvers_agree_with_classical_away_from_turning_points() {
        let p = Potential::toda();
        let u_l = State::new(1.2, 0.3);
        let u_r = State::new(0.8, -0.2);
        let cl = solve_riemann_classical(&p, u_l, u_r).unwrap();
        let co = solve_riemann_conservative(&p, u_l, u_r).unwrap();
        let di = solve_riemann_dissipative(&p, u_l, u_r).unwrap();
        for other in [&co, &di] {
            assert_eq!(cl.waves.len(), other.waves.len());
            for (a, b) in cl.waves.iter().zip(&other.waves) {
                assert_abs_diff_eq!(a.right.r, b.right.r, epsilon = 1e-9);
                assert_abs_diff_eq!(a.right.v, b.right.v, epsilon = 1e-9);
                assert_abs_diff_eq!(a.speed_lo, b.speed_lo, epsilon = 1e-9);
                assert_eq!(a.kind, b.kind);
            }
        }
    }

    #[test]
    fn conservative_solution_is_weakly_consistent() {
        let p = fast();
        let sol =
            solve_riemann_conservative(&p, State::new(2.0, 0.0), State::new(0.8, -2.5)).unwrap();
        assert!(sol.max_residual(&p).unwrap() < 1e-8);
        // Conservative shocks in the fan conserve energy.
        for w in &sol.waves {
            if w.conservative {
                assert!(energy_production(&p, w.left, w.right).unwrap().abs() < 1e-8);
            }
        }
        assert!(sol.waves.iter().any(|w| w.conservative));
    }

    #[test]
    fn dissipative_solutions_never_contain_conservative_shocks() {
        let p = slow();
        for (rl, vl, rr, vr) in [
            (4.0, 0.0, 1.0, -3.0),
            (4.0, 0.5, 2.5, -1.0),
            (3.0, 0.0, 3.5, 0.4),
        ] {
            let sol =
                solve_riemann_dissipative(&p, State::new(rl, vl), State::new(rr, vr)).unwrap();
            assert!(sol.waves.iter().all(|w| !w.conservative));
            assert!(sol.max_residual(&p).unwrap() < 1e-8);
        }
    }

    #[test]
    fn trivial_riemann_data_gives_empty_fan() {
        let p = slow();
        let u = State::new(4.0, 0.0);
        let sol = solve_riemann_dissipative(&p, u, u).unwrap();
        assert!(sol.waves.is_empty());
    }

    #[test]
    fn predicted_structures_match_the_solver_skeleton() {
        let p = fast();
        let u_l = State::new(2.0, 0.0);
        // Pure supersonic conservative shock datum in family 2.
        let a = conservative_anchors(&p, u_l, Family::One).unwrap();
        let fan = conservative_wave_fan(&p, u_l, a.r0, Family::Two).unwrap();
        let u_r = fan.last().unwrap().right;
        let pred =
            fpu_predicted_structure(&p, u_l, u_r, ConjectureMode::Supersonic, None).unwrap();
        assert_eq!(pred.labels, vec![PredictedKind::ConservativeShock]);
        assert!(pred.proxy);

        // Subsonic data: dispersive shock with attached rarefaction, no N.
        let p = slow();
        let sol =
            solve_riemann_dissipative(&p, State::new(4.0, 0.0), State::new(4.0, -4.0)).unwrap();
        let pred = fpu_predicted_structure(
            &p,
            State::new(4.0, 0.0),
            State::new(4.0, -4.0),
            ConjectureMode::Subsonic,
            None,
        )
        .unwrap();
        assert_eq!(pred.solution.waves.len(), sol.waves.len());
        assert!(!pred.labels.contains(&PredictedKind::ConservativeShock));
        assert!(pred.labels.contains(&PredictedKind::DispersiveShock));
    }

    #[test]
    fn front_speed_table_interpolation_and_nucleation_report() {
        let p = fast();
        let u_l = State::new(2.0, 0.0);
        let a = conservative_anchors(&p, u_l, Family::One).unwrap();
        let c_n = rh_speed(&p, 2.0, a.r0, Family::Two).unwrap();
        // A table that never reaches the conservative-shock speed.
        let table = CfTable::new(vec![(0.3, 1.1), (1.0, 1.2), (1.8, 1.3)]).unwrap();
        assert_abs_diff_eq!(table.interp(0.65).unwrap(), 1.15, epsilon = 1e-12);
        assert!(table.interp(2.5).is_none());
        let rep = nucleation_report(&p, u_l, Family::Two, &table).unwrap();
        assert!(!rep.ever_met);
        assert_abs_diff_eq!(rep.c_threshold, c_n.abs(), epsilon = 1e-9);
        // A table exceeding it meets the criterion.
        let table = CfTable::new(vec![(0.3, 1.6), (1.8, 1.6)]).unwrap();
        assert!(nucleation_report(&p, u_l, Family::Two, &table).unwrap().ever_met);
    }

    #[test]
    fn random_convex_concave_quintics_preserve_anchor_ordering() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let mut checked = 0;
        while checked < 50 {
            // Quintic-like fluxes with one convex-concave turning point,
            // randomized around the reference shape.
            let b: f64 = rng.gen_range(0.7..1.3); // cubic weight
            let c: f64 = rng.gen_range(0.7..1.3); // quartic weight
            let d: f64 = rng.gen_range(0.5..1.5); // quintic weight
            let coeffs = vec![
                0.0,
                0.0,
                1.0,
                -b / 6.0,
                -c / 24.0,
                d / 120.0,
            ];
            let Ok(p) = Potential::with_domain(
                crate::potential::PotentialKind::Polynomial(coeffs),
                (-3.0, 7.0),
            ) else {
                continue;
            };
            // Pick a left state above the first turning point, inside core.
            let core = p.hyperbolic_core();
            let Ok(tps) = p.turning_points(core) else { continue };
            let Some(tp) = tps.iter().find(|t| t.fourth_sign < 0) else {
                continue;
            };
            let r_l = tp.r_star + rng.gen_range(0.3..0.8);
            if r_l >= core.1 - 0.1 {
                continue;
            }
            let Ok(a) = conservative_anchors(&p, State::new(r_l, 0.0), Family::One) else {
                continue;
            };
            let probe = a.r0 + 0.3 * (a.r2 - a.r0);
            let Ok(r1) = a.r1(&p, probe - 0.2 * (a.r0 - core.0)) else {
                continue;
            };
            assert!(
                r1 < a.r0 && a.r0 < a.r2 && a.r2 < r_l,
                "anchor ordering violated: r1={r1}, r0={}, r2={}, rL={r_l}",
                a.r0,
                a.r2
            );
            checked += 1;
        }
    }
}
