//! Exact classical Riemann solver for the p-system
//!
//! ```text
//!     r_t − v_x = 0,       v_t − (Φ′(r))_x = 0
//! ```
//!
//! with strictly convex Φ: wave curves, Rankine-Hugoniot relations, Lax
//! admissibility, a shock taxonomy covering non-classical regimes, the
//! intermediate-state construction, and self-similar sampling.
//!
//! Sign conventions. The characteristic speeds are λ±(r) = ±√(Φ″(r));
//! family 1 is the left-moving λ₋ family (wave speeds c < 0), family 2 the
//! right-moving λ₊ family (c > 0). The right eigenvectors are
//! e∓ = (1, ±√Φ″), so along integral curves
//!
//! ```text
//!     family 1:  v = v_L + ∫_{r_L}^{r} √(Φ″(s)) ds
//!     family 2:  v = v_L − ∫_{r_L}^{r} √(Φ″(s)) ds
//! ```
//!
//! and along Hugoniot curves v = v_L − c·(r − r_L) with
//! c = ∓√((Φ′(r)−Φ′(r_L))/(r−r_L)).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics;
use crate::potential::Potential;

/// Relative tolerance of the sonic band in shock classification.
pub const SONIC_REL_TOL: f64 = 1e-9;

/// Waves with amplitude below this threshold are dropped from fans.
pub const ZERO_WAVE_TOL: f64 = 1e-12;

/// Abscissa tolerance of the intermediate-state bisection.
pub const INTERMEDIATE_XTOL: f64 = 1e-14;

/// A state (r, v) of the p-system: specific strain/distance and velocity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct State {
    pub r: f64,
    pub v: f64,
}

impl State {
    pub fn new(r: f64, v: f64) -> Self {
        State { r, v }
    }
}

/// Characteristic family of a wave.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Family {
    /// λ₋ family, wave speeds c < 0.
    One,
    /// λ₊ family, wave speeds c > 0.
    Two,
}

impl Family {
    /// Sign of the characteristic speed: −1 for family 1, +1 for family 2.
    pub fn sign(self) -> f64 {
        match self {
            Family::One => -1.0,
            Family::Two => 1.0,
        }
    }

    pub fn other(self) -> Family {
        match self {
            Family::One => Family::Two,
            Family::Two => Family::One,
        }
    }

    /// Signed characteristic speed λ_f(r).
    pub fn lambda(self, p: &Potential, r: f64) -> Result<f64> {
        Ok(self.sign() * p.sound_speed(r)?)
    }
}

/// Taxonomy of shock waves by the position of the shock speed relative to
/// the characteristic speeds of its end states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ShockClass {
    /// Lax-admissible: λ(u_L) > c > λ(u_R).
    Compressive,
    /// Reversed inequalities: λ(u_L) < c < λ(u_R).
    RarefactionShock,
    /// Supersonic on both sides: |c| > |λ(u_L)|, |λ(u_R)|.
    FastUndercompressive,
    /// Subsonic on both sides: |c| < |λ(u_L)|, |λ(u_R)|.
    SlowUndercompressive,
    /// c coincides with a characteristic speed within the sonic band.
    Sonic,
}

/// Kind of an elementary wave in a Riemann fan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum WaveKind {
    Shock(ShockClass),
    Rarefaction,
}

/// One elementary wave of a self-similar solution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Wave {
    pub family: Family,
    pub left: State,
    pub right: State,
    pub kind: WaveKind,
    /// Speed range occupied in the (x/t)-fan; both entries coincide for a
    /// shock and span [λ(left), λ(right)] for a rarefaction.
    pub speed_lo: f64,
    pub speed_hi: f64,
    /// True for energy-conserving (zero-dissipation) shocks.
    pub conservative: bool,
}

impl Wave {
    /// Shock speed (or fan midpoint speed for a rarefaction).
    pub fn speed(&self) -> f64 {
        0.5 * (self.speed_lo + self.speed_hi)
    }

    /// Strain amplitude |Δr|.
    pub fn amplitude(&self) -> f64 {
        (self.right.r - self.left.r).abs()
    }
}

/// A self-similar solution of a Riemann problem: left/right data and an
/// ordered fan of elementary waves.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RiemannSolution {
    pub left: State,
    pub right: State,
    pub waves: Vec<Wave>,
}

// ---------------------------------------------------------------------------
// wave-curve primitives
// ---------------------------------------------------------------------------

/// v-coordinate of the integral curve O_f[u_L] at abscissa `r`.
pub fn integral_curve_v(p: &Potential, u_l: State, r: f64, family: Family) -> Result<f64> {
    let integrand = |s: f64| p.eval_unchecked(s, 2).max(0.0).sqrt();
    check_core_interval(p, u_l.r, r)?;
    let integral =
        numerics::adaptive_simpson(&integrand, u_l.r, r, numerics::SIMPSON_TOL)?;
    Ok(u_l.v - family.sign() * integral)
}

/// Signed Rankine-Hugoniot speed of the family-`f` shock joining states with
/// strains `r_l` and `r_r`: c = sign(f)·√((Φ′(r_l)−Φ′(r_r))/(r_l−r_r)).
/// Degenerates to the characteristic speed when `r_l == r_r`.
pub fn rh_speed(p: &Potential, r_l: f64, r_r: f64, family: Family) -> Result<f64> {
    let c2 = secant_slope(p, r_l, r_r)?;
    if c2 < 0.0 {
        return Err(Error::Convexity(format!(
            "negative squared shock speed between r = {r_l} and {r_r} (flux not monotone)"
        )));
    }
    Ok(family.sign() * c2.sqrt())
}

/// Secant slope (Φ′(a) − Φ′(b))/(a − b) of the flux, i.e. c², with the
/// Φ″ limit on the diagonal.
pub fn secant_slope(p: &Potential, a: f64, b: f64) -> Result<f64> {
    if (a - b).abs() < 1e-14 * (1.0 + a.abs()) {
        return p.d2phi(0.5 * (a + b));
    }
    Ok((p.dphi(a)? - p.dphi(b)?) / (a - b))
}

/// v-coordinate of the Hugoniot curve H_f[u_L] at abscissa `r`:
/// v = v_L − c·(r − r_L) with the family-signed RH speed.
pub fn hugoniot_v(p: &Potential, u_l: State, r: f64, family: Family) -> Result<f64> {
    let c = rh_speed(p, u_l.r, r, family)?;
    Ok(u_l.v - c * (r - u_l.r))
}

/// Energy production rate of the jump u_L → u_R moving at the speed induced
/// by the first RH condition: c·⟦½v² + Φ⟧ + ⟦v·Φ′(r)⟧ with ⟦x⟧ = x_L − x_R.
/// Negative for dissipative (Lax) shocks, zero for conservative shocks.
pub fn energy_production(p: &Potential, u_l: State, u_r: State) -> Result<f64> {
    let dr = u_l.r - u_r.r;
    let dv = u_l.v - u_r.v;
    if dr.abs() < 1e-300 {
        return Ok(0.0);
    }
    let c = -dv / dr;
    let energy_jump =
        0.5 * (u_l.v * u_l.v - u_r.v * u_r.v) + p.phi(u_l.r)? - p.phi(u_r.r)?;
    let flux_jump = u_l.v * p.dphi(u_l.r)? - u_r.v * p.dphi(u_r.r)?;
    Ok(c * energy_jump + flux_jump)
}

/// Classify the shock u_L → u_R of the given family.
pub fn classify_shock(
    p: &Potential,
    u_l: State,
    u_r: State,
    family: Family,
) -> Result<ShockClass> {
    let c = rh_speed(p, u_l.r, u_r.r, family)?;
    let lam_l = family.lambda(p, u_l.r)?;
    let lam_r = family.lambda(p, u_r.r)?;
    Ok(classify_speed(c, lam_l, lam_r))
}

/// Classification from the signed speeds alone.
pub fn classify_speed(c: f64, lam_l: f64, lam_r: f64) -> ShockClass {
    let tol = SONIC_REL_TOL * c.abs().max(lam_l.abs()).max(lam_r.abs()).max(1.0);
    if (c - lam_l).abs() <= tol || (c - lam_r).abs() <= tol {
        return ShockClass::Sonic;
    }
    let faster_l = c.abs() > lam_l.abs();
    let faster_r = c.abs() > lam_r.abs();
    match (faster_l, faster_r) {
        (true, true) => ShockClass::FastUndercompressive,
        (false, false) => ShockClass::SlowUndercompressive,
        _ => {
            if lam_l > c && c > lam_r {
                ShockClass::Compressive
            } else {
                ShockClass::RarefactionShock
            }
        }
    }
}

/// The point of the classical wave set W_f[u_L] at abscissa `r`, together
/// with the kind of elementary wave that realises it: a rarefaction where
/// λ_f increases from u_L to the target, the Hugoniot point otherwise.
pub fn wave_set_point(
    p: &Potential,
    u_l: State,
    r: f64,
    family: Family,
) -> Result<(State, WaveKind)> {
    if (r - u_l.r).abs() < ZERO_WAVE_TOL {
        return Ok((State::new(r, u_l.v), WaveKind::Shock(ShockClass::Sonic)));
    }
    let lam_l = family.lambda(p, u_l.r)?;
    let lam_r = family.lambda(p, r)?;
    if lam_r > lam_l {
        let v = integral_curve_v(p, u_l, r, family)?;
        Ok((State::new(r, v), WaveKind::Rarefaction))
    } else {
        let v = hugoniot_v(p, u_l, r, family)?;
        let u_r = State::new(r, v);
        let class = classify_shock(p, u_l, u_r, family)?;
        Ok((u_r, WaveKind::Shock(class)))
    }
}

/// Build the [`Wave`] realising `wave_set_point(p, u_l, r, family)`.
pub fn classical_wave(p: &Potential, u_l: State, r: f64, family: Family) -> Result<Wave> {
    let (u_r, kind) = wave_set_point(p, u_l, r, family)?;
    make_wave(p, u_l, u_r, kind, family, false)
}

/// Assemble a wave with its fan speed range.
pub fn make_wave(
    p: &Potential,
    u_l: State,
    u_r: State,
    kind: WaveKind,
    family: Family,
    conservative: bool,
) -> Result<Wave> {
    let (speed_lo, speed_hi) = match kind {
        WaveKind::Shock(_) => {
            let c = rh_speed(p, u_l.r, u_r.r, family)?;
            (c, c)
        }
        WaveKind::Rarefaction => {
            let a = family.lambda(p, u_l.r)?;
            let b = family.lambda(p, u_r.r)?;
            (a.min(b), a.max(b))
        }
    };
    Ok(Wave {
        family,
        left: u_l,
        right: u_r,
        kind,
        speed_lo,
        speed_hi,
        conservative,
    })
}

// ---------------------------------------------------------------------------
// classical Riemann solver
// ---------------------------------------------------------------------------

/// Solve the classical Riemann problem (u_L, u_R): find the intermediate
/// state u_M with u_M ∈ W₁[u_L] and u_R ∈ W₂[u_M], and return the two-wave
/// fan (zero-strength waves are dropped).
pub fn solve_riemann_classical(
    p: &Potential,
    u_l: State,
    u_r: State,
) -> Result<RiemannSolution> {
    check_core_interval(p, u_l.r, u_r.r)?;
    let r_m = solve_intermediate(p, u_l, u_r)?;
    let (u_m, kind1) = wave_set_point(p, u_l, r_m, Family::One)?;
    let mut waves = Vec::new();
    if wave_strength(u_l, u_m) > ZERO_WAVE_TOL {
        waves.push(make_wave(p, u_l, u_m, kind1, Family::One, false)?);
    }
    let (u_rr, kind2) = wave_set_point(p, u_m, u_r.r, Family::Two)?;
    if wave_strength(u_m, u_rr) > ZERO_WAVE_TOL {
        waves.push(make_wave(p, u_m, State::new(u_r.r, u_rr.v), kind2, Family::Two, false)?);
    }
    Ok(RiemannSolution {
        left: u_l,
        right: u_r,
        waves,
    })
}

/// Strain abscissa r_M of the intermediate state, found by bracketed
/// bisection of g(r_M) = v(W₂[u_M] at r_R) − v_R.
fn solve_intermediate(p: &Potential, u_l: State, u_r: State) -> Result<f64> {
    let core = p.hyperbolic_core();
    let pad = 1e-9 * (core.1 - core.0);
    let limits = (core.0 + pad, core.1 - pad);
    let mut g = |r_m: f64| -> f64 {
        let res = (|| -> Result<f64> {
            let (u_m, _) = wave_set_point(p, u_l, r_m, Family::One)?;
            let (u_rr, _) = wave_set_point(p, u_m, u_r.r, Family::Two)?;
            Ok(u_rr.v - u_r.v)
        })();
        res.unwrap_or(f64::NAN)
    };
    let x0 = 0.5 * (u_l.r + u_r.r);
    let step = 0.1 * (1.0 + (u_l.r - u_r.r).abs());
    let (a, b) = numerics::expand_bracket(&mut g, x0, step, 1.6, 60, limits)?;
    numerics::bisect(&mut g, a, b, INTERMEDIATE_XTOL)
}

fn wave_strength(a: State, b: State) -> f64 {
    (a.r - b.r).abs().max((a.v - b.v).abs())
}

fn check_core_interval(p: &Potential, a: f64, b: f64) -> Result<()> {
    for r in [a, b] {
        if !p.in_core(r) {
            return Err(Error::Convexity(format!(
                "state r = {r} outside the hyperbolic core [{}, {}] of '{}'",
                p.hyperbolic_core().0,
                p.hyperbolic_core().1,
                p.name()
            )));
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// sampling and validation
// ---------------------------------------------------------------------------

impl RiemannSolution {
    /// Evaluate the self-similar solution at speed `c = x/t`.
    pub fn sample(&self, p: &Potential, c: f64) -> Result<State> {
        let mut state = self.left;
        for w in &self.waves {
            if c < w.speed_lo {
                return Ok(state);
            }
            if c <= w.speed_hi {
                match w.kind {
                    WaveKind::Shock(_) => return Ok(w.right),
                    WaveKind::Rarefaction => return rarefaction_point(p, w, c),
                }
            }
            state = w.right;
        }
        Ok(state)
    }

    /// Intermediate states between consecutive waves (including data).
    pub fn states(&self) -> Vec<State> {
        let mut out = vec![self.left];
        for w in &self.waves {
            out.push(w.right);
        }
        out
    }

    /// Largest constraint violation of the fan: RH residuals of shocks,
    /// state chaining, and speed ordering. Used as a solution audit.
    pub fn max_residual(&self, p: &Potential) -> Result<f64> {
        let mut worst: f64 = 0.0;
        let mut prev = self.left;
        let mut prev_speed = f64::NEG_INFINITY;
        for w in &self.waves {
            worst = worst.max((w.left.r - prev.r).abs().max((w.left.v - prev.v).abs()));
            if w.speed_lo < prev_speed - 1e-9 {
                worst = worst.max(prev_speed - w.speed_lo);
            }
            if let WaveKind::Shock(_) = w.kind {
                let c = w.speed_lo;
                let rh1 = c * (w.left.r - w.right.r) + (w.left.v - w.right.v);
                let rh2 = c * (w.left.v - w.right.v)
                    + (p.dphi(w.left.r)? - p.dphi(w.right.r)?);
                worst = worst.max(rh1.abs()).max(rh2.abs());
            }
            prev = w.right;
            prev_speed = w.speed_hi;
        }
        worst = worst.max((prev.r - self.right.r).abs().max((prev.v - self.right.v).abs()));
        Ok(worst)
    }
}

/// State inside a rarefaction fan at speed `c`: solve λ_f(r) = c between the
/// end strains, then take v from the integral curve.
fn rarefaction_point(p: &Potential, w: &Wave, c: f64) -> Result<State> {
    let (lo, hi) = if w.left.r <= w.right.r {
        (w.left.r, w.right.r)
    } else {
        (w.right.r, w.left.r)
    };
    let f = |r: f64| {
        w.family.sign() * p.eval_unchecked(r, 2).max(0.0).sqrt() - c
    };
    let r = numerics::bisect(f, lo, hi, 1e-13)?;
    let v = integral_curve_v(p, w.left, r, w.family)?;
    Ok(State::new(r, v))
}
