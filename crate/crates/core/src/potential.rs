//! Interaction potentials Φ with closed-form derivatives up to fifth order,
//! a catalogue of the built-in potentials used throughout the experiments,
//! and turning-point analysis of the flux Φ′.
//!
//! Derivatives are hand-coded per kind: fourth and fifth derivatives enter
//! sign predicates for the non-classical wave structure, where finite
//! differences would be too noisy. A finite-difference cross-check lives in
//! the tests only.
//!
//! A potential carries two nested intervals:
//!
//! * `eval_domain` — where Φ and its derivatives may be evaluated at all
//!   (flux-level analysis such as the energy functional J works here), and
//! * `hyperbolic_core` — the maximal sub-interval with Φ″ > 0 containing the
//!   potential's reference state. Wave curves, sound speeds and lattice runs
//!   are restricted to the core; leaving it is a convexity error.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics;

/// Number of samples used for convexity scanning at construction.
const CONVEXITY_SAMPLES: usize = 10_000;

/// Number of samples used when scanning for turning points.
const TURNING_SAMPLES: usize = 10_000;

/// The shape of a potential: which closed-form formula backs it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum PotentialKind {
    /// Φ(r) = r²/2.
    Harmonic,
    /// Φ(r) = exp(1−r) − (1−r).
    Toda,
    /// Φ(r) = exp(1−r) − (1−r) + (r−1)⁴/40.
    ModifiedToda,
    /// Flux Φ′(r) = (r + arctan r)/16; Φ is its primitive with Φ(0) = 0.
    ArctanFlux,
    /// Φ(2+s) = s² − s³/6 − s⁴/24 + s⁵/120 (turning point with Φ⁗ < 0).
    QuinticFast,
    /// Φ(2+s) = s² − s³/6 + s⁴/24 + s⁵/120 (turning point with Φ⁗ > 0).
    QuinticSlow,
    /// Φ(1+s) = s + s²/2 + s³/20 − cos(2s)/4 + sin(3s)/10 (several turning points).
    TrigMulti,
    /// Φ(r) = Σ cᵢ rⁱ with the given coefficients (ascending powers).
    Polynomial(Vec<f64>),
    /// Φ(r) = base(r − r0).
    Shifted {
        base: Box<PotentialKind>,
        r0: f64,
    },
    /// Φ(r) = base(−r); used to mirror flux orientations.
    Mirrored(Box<PotentialKind>),
}

impl PotentialKind {
    fn default_name(&self) -> String {
        match self {
            PotentialKind::Harmonic => "harmonic".into(),
            PotentialKind::Toda => "toda".into(),
            PotentialKind::ModifiedToda => "modified_toda".into(),
            PotentialKind::ArctanFlux => "arctan_flux".into(),
            PotentialKind::QuinticFast => "quintic_fast".into(),
            PotentialKind::QuinticSlow => "quintic_slow".into(),
            PotentialKind::TrigMulti => "trig_multi".into(),
            PotentialKind::Polynomial(_) => "polynomial".into(),
            PotentialKind::Shifted { base, .. } => format!("shifted_{}", base.default_name()),
            PotentialKind::Mirrored(base) => format!("mirrored_{}", base.default_name()),
        }
    }

    fn default_domain(&self) -> (f64, f64) {
        match self {
            PotentialKind::Harmonic | PotentialKind::Polynomial(_) => (-10.0, 10.0),
            PotentialKind::Toda | PotentialKind::ModifiedToda => (-5.0, 10.0),
            PotentialKind::ArctanFlux => (-20.0, 20.0),
            PotentialKind::QuinticFast | PotentialKind::QuinticSlow => (-1.0, 7.0),
            PotentialKind::TrigMulti => (-6.0, 10.0),
            PotentialKind::Shifted { base, r0 } => {
                let (a, b) = base.default_domain();
                (a + r0, b + r0)
            }
            PotentialKind::Mirrored(base) => {
                let (a, b) = base.default_domain();
                (-b, -a)
            }
        }
    }

    /// Raw derivative evaluation, no domain checks.
    fn eval(&self, r: f64, order: u32) -> f64 {
        match self {
            PotentialKind::Harmonic => match order {
                0 => 0.5 * r * r,
                1 => r,
                2 => 1.0,
                _ => 0.0,
            },
            PotentialKind::Toda => {
                let e = (1.0 - r).exp();
                match order {
                    0 => e - (1.0 - r),
                    1 => 1.0 - e,
                    2 => e,
                    3 => -e,
                    4 => e,
                    _ => -e,
                }
            }
            PotentialKind::ModifiedToda => {
                let e = (1.0 - r).exp();
                let s = r - 1.0;
                match order {
                    0 => e - (1.0 - r) + s.powi(4) / 40.0,
                    1 => 1.0 - e + s.powi(3) / 10.0,
                    2 => e + 0.3 * s * s,
                    3 => -e + 0.6 * s,
                    4 => e + 0.6,
                    _ => -e,
                }
            }
            PotentialKind::ArctanFlux => {
                let q = 1.0 + r * r;
                match order {
                    0 => (0.5 * r * r + r * r.atan() - 0.5 * q.ln()) / 16.0,
                    1 => (r + r.atan()) / 16.0,
                    2 => (1.0 + 1.0 / q) / 16.0,
                    3 => -2.0 * r / (16.0 * q * q),
                    4 => (6.0 * r * r - 2.0) / (16.0 * q.powi(3)),
                    _ => 24.0 * r * (1.0 - r * r) / (16.0 * q.powi(4)),
                }
            }
            PotentialKind::QuinticFast => quintic(r - 2.0, -1.0, order),
            PotentialKind::QuinticSlow => quintic(r - 2.0, 1.0, order),
            PotentialKind::TrigMulti => {
                let s = r - 1.0;
                let (c2, s2) = ((2.0 * s).cos(), (2.0 * s).sin());
                let (c3, s3) = ((3.0 * s).cos(), (3.0 * s).sin());
                match order {
                    0 => s + 0.5 * s * s + s.powi(3) / 20.0 - 0.25 * c2 + 0.1 * s3,
                    1 => 1.0 + s + 0.15 * s * s + 0.5 * s2 + 0.3 * c3,
                    2 => 1.0 + 0.3 * s + c2 - 0.9 * s3,
                    3 => 0.3 - 2.0 * s2 - 2.7 * c3,
                    4 => -4.0 * c2 + 8.1 * s3,
                    _ => 8.0 * s2 + 24.3 * c3,
                }
            }
            PotentialKind::Polynomial(coeffs) => poly_derivative(coeffs, r, order),
            PotentialKind::Shifted { base, r0 } => base.eval(r - r0, order),
            PotentialKind::Mirrored(base) => {
                let v = base.eval(-r, order);
                if order % 2 == 0 {
                    v
                } else {
                    -v
                }
            }
        }
    }
}

/// Quintic Φ(2+s) = s² − s³/6 + α·s⁴/24 + s⁵/120 with α = ∓1.
fn quintic(s: f64, alpha: f64, order: u32) -> f64 {
    match order {
        0 => s * s - s.powi(3) / 6.0 + alpha * s.powi(4) / 24.0 + s.powi(5) / 120.0,
        1 => 2.0 * s - 0.5 * s * s + alpha * s.powi(3) / 6.0 + s.powi(4) / 24.0,
        2 => 2.0 - s + alpha * 0.5 * s * s + s.powi(3) / 6.0,
        3 => -1.0 + alpha * s + 0.5 * s * s,
        4 => alpha + s,
        _ => 1.0,
    }
}

/// k-th derivative of Σ cᵢ rⁱ (coefficients ascending).
fn poly_derivative(coeffs: &[f64], r: f64, order: u32) -> f64 {
    let k = order as usize;
    // Horner evaluation of the derivative polynomial.
    let mut acc = 0.0;
    for i in (k..coeffs.len()).rev() {
        let mut fac = 1.0;
        for j in 0..k {
            fac *= (i - j) as f64;
        }
        acc = acc * r + coeffs[i] * fac;
    }
    acc
}

/// A root r* of Φ‴ — a state of linear degeneracy of the p-system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TurningPoint {
    /// Location of the root of Φ‴.
    pub r_star: f64,
    /// Sign of Φ⁗(r*): −1 (flux convex→concave), +1 (concave→convex),
    /// 0 for a degenerate turning point.
    pub fourth_sign: i8,
    /// Φ⁽⁵⁾(r*), used by bifurcation sign predicates.
    pub fifth: f64,
}

/// An interaction potential with validated evaluation domain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Potential {
    name: String,
    kind: PotentialKind,
    eval_domain: (f64, f64),
    hyperbolic_core: (f64, f64),
}

impl Potential {
    /// Build a potential on its default evaluation domain.
    pub fn new(kind: PotentialKind) -> Result<Self> {
        let domain = kind.default_domain();
        Self::with_domain(kind, domain)
    }

    /// Build a potential on a custom evaluation domain.
    ///
    /// Construction scans Φ″ on a dense grid, records the widest interval of
    /// strict convexity as the hyperbolic core, and rejects potentials with
    /// no usable convex region.
    pub fn with_domain(kind: PotentialKind, eval_domain: (f64, f64)) -> Result<Self> {
        let (lo, hi) = eval_domain;
        if !(lo.is_finite() && hi.is_finite() && hi > lo) {
            return Err(Error::Config(format!(
                "invalid evaluation domain [{lo}, {hi}]"
            )));
        }
        let core = convex_core(&kind, eval_domain)?;
        Ok(Potential {
            name: kind.default_name(),
            kind,
            eval_domain,
            hyperbolic_core: core,
        })
    }

    /// Override the display name.
    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    // --- catalogue -------------------------------------------------------

    pub fn harmonic() -> Self {
        Self::new(PotentialKind::Harmonic).expect("harmonic potential is convex")
    }

    pub fn toda() -> Self {
        Self::new(PotentialKind::Toda).expect("Toda potential is convex")
    }

    pub fn modified_toda() -> Self {
        Self::new(PotentialKind::ModifiedToda).expect("modified Toda potential is convex")
    }

    pub fn arctan_flux() -> Self {
        Self::new(PotentialKind::ArctanFlux).expect("arctan flux is convex")
    }

    pub fn quintic_fast() -> Self {
        Self::new(PotentialKind::QuinticFast).expect("fast quintic has a convex core")
    }

    pub fn quintic_slow() -> Self {
        Self::new(PotentialKind::QuinticSlow).expect("slow quintic has a convex core")
    }

    pub fn trig_multi() -> Self {
        Self::new(PotentialKind::TrigMulti).expect("trig potential has a convex core")
    }

    /// Look a built-in up by its catalogue name.
    pub fn by_name(name: &str) -> Result<Self> {
        match name {
            "harmonic" => Ok(Self::harmonic()),
            "toda" => Ok(Self::toda()),
            "modified_toda" => Ok(Self::modified_toda()),
            "arctan_flux" => Ok(Self::arctan_flux()),
            "quintic_fast" => Ok(Self::quintic_fast()),
            "quintic_slow" => Ok(Self::quintic_slow()),
            "trig_multi" => Ok(Self::trig_multi()),
            other => Err(Error::Config(format!("unknown potential '{other}'"))),
        }
    }

    /// Names of all built-in potentials.
    pub fn catalogue() -> &'static [&'static str] {
        &[
            "harmonic",
            "toda",
            "modified_toda",
            "arctan_flux",
            "quintic_fast",
            "quintic_slow",
            "trig_multi",
        ]
    }

    /// The mirrored potential Φ̃(r) = Φ(−r), on the reflected domain.
    /// Mirroring swaps convex-concave and concave-convex flux orientations.
    pub fn mirrored(&self) -> Result<Self> {
        let kind = PotentialKind::Mirrored(Box::new(self.kind.clone()));
        let domain = (-self.eval_domain.1, -self.eval_domain.0);
        Ok(Self::with_domain(kind, domain)?.named(format!("mirrored_{}", self.name)))
    }

    // --- accessors -------------------------------------------------------

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> &PotentialKind {
        &self.kind
    }

    /// Interval on which evaluation is trusted.
    pub fn eval_domain(&self) -> (f64, f64) {
        self.eval_domain
    }

    /// Maximal scanned interval with Φ″ > 0 (strict hyperbolicity).
    pub fn hyperbolic_core(&self) -> (f64, f64) {
        self.hyperbolic_core
    }

    // --- evaluation ------------------------------------------------------

    /// d^order Φ / dr^order at `r`, for order 0..=5, via the closed form.
    pub fn eval(&self, r: f64, order: u32) -> Result<f64> {
        if order > 5 {
            return Err(Error::Usage(format!(
                "derivative order {order} not supported (0..=5)"
            )));
        }
        self.check_domain(r)?;
        Ok(self.kind.eval(r, order))
    }

    fn check_domain(&self, r: f64) -> Result<()> {
        if !r.is_finite() || r < self.eval_domain.0 || r > self.eval_domain.1 {
            return Err(Error::Domain(format!(
                "r = {r} outside evaluation domain [{}, {}] of '{}'",
                self.eval_domain.0, self.eval_domain.1, self.name
            )));
        }
        Ok(())
    }

    /// True when `r` lies inside the strict-convexity core.
    pub fn in_core(&self, r: f64) -> bool {
        r >= self.hyperbolic_core.0 && r <= self.hyperbolic_core.1
    }

    /// Unchecked evaluation; hot paths (lattice forces) use this after
    /// validating their data range once.
    #[inline]
    pub fn eval_unchecked(&self, r: f64, order: u32) -> f64 {
        self.kind.eval(r, order)
    }

    /// Φ(r).
    pub fn phi(&self, r: f64) -> Result<f64> {
        self.eval(r, 0)
    }

    /// Φ′(r) — the flux.
    pub fn dphi(&self, r: f64) -> Result<f64> {
        self.eval(r, 1)
    }

    /// Φ″(r).
    pub fn d2phi(&self, r: f64) -> Result<f64> {
        self.eval(r, 2)
    }

    /// Φ‴(r).
    pub fn d3phi(&self, r: f64) -> Result<f64> {
        self.eval(r, 3)
    }

    /// λ₊(r) = √(Φ″(r)); errors when Φ″ ≤ 0.
    pub fn sound_speed(&self, r: f64) -> Result<f64> {
        let c2 = self.eval(r, 2)?;
        if c2 <= 0.0 {
            return Err(Error::Convexity(format!(
                "Φ″({r}) = {c2} ≤ 0 for '{}'; no real sound speed",
                self.name
            )));
        }
        Ok(c2.sqrt())
    }

    /// All roots of Φ‴ in `interval`, refined to ~1e-12 and sorted.
    pub fn turning_points(&self, interval: (f64, f64)) -> Result<Vec<TurningPoint>> {
        let (lo, hi) = interval;
        if lo < self.eval_domain.0 || hi > self.eval_domain.1 || !(hi > lo) {
            return Err(Error::Domain(format!(
                "turning-point interval [{lo}, {hi}] not inside evaluation domain"
            )));
        }
        let mut out = Vec::new();
        let f = |r: f64| self.kind.eval(r, 3);
        let df = |r: f64| self.kind.eval(r, 4);
        for (a, b) in numerics::sign_changes(f, lo, hi, TURNING_SAMPLES) {
            let r_star = if a == b {
                a
            } else {
                numerics::bisect_newton(f, df, a, b, 1e-14)?
            };
            let fourth = self.kind.eval(r_star, 4);
            let scale = fourth.abs().max(1.0);
            if f(r_star).abs() > 1e-10 * scale {
                return Err(Error::Numerics(format!(
                    "turning point refinement stalled near r = {r_star}"
                )));
            }
            let fourth_sign = if fourth > 1e-12 {
                1
            } else if fourth < -1e-12 {
                -1
            } else {
                0
            };
            out.push(TurningPoint {
                r_star,
                fourth_sign,
                fifth: self.kind.eval(r_star, 5),
            });
        }
        out.sort_by(|a, b| a.r_star.total_cmp(&b.r_star));
        out.dedup_by(|a, b| (a.r_star - b.r_star).abs() < 1e-9);
        Ok(out)
    }

    /// The unique turning point inside `interval`; errors when there are
    /// zero or several.
    pub fn single_turning_point(&self, interval: (f64, f64)) -> Result<TurningPoint> {
        let tps = self.turning_points(interval)?;
        match tps.len() {
            1 => Ok(tps[0]),
            n => Err(Error::Domain(format!(
                "expected exactly one turning point in [{}, {}], found {n}",
                interval.0, interval.1
            ))),
        }
    }
}

/// Find the widest strictly-convex sub-interval of `domain`.
fn convex_core(kind: &PotentialKind, domain: (f64, f64)) -> Result<(f64, f64)> {
    let (lo, hi) = domain;
    let h = (hi - lo) / CONVEXITY_SAMPLES as f64;
    let d2 = |r: f64| kind.eval(r, 2);

    // Collect maximal runs of positive samples.
    let mut best: Option<(usize, usize)> = None;
    let mut run_start: Option<usize> = None;
    let mut violations = Vec::new();
    for i in 0..=CONVEXITY_SAMPLES {
        let r = lo + h * i as f64;
        if d2(r) > 0.0 {
            run_start.get_or_insert(i);
        } else {
            if violations.len() < 3 {
                violations.push(r);
            }
            if let Some(s) = run_start.take() {
                if best.map_or(true, |(a, b)| i - 1 - s > b - a) {
                    best = Some((s, i - 1));
                }
            }
        }
    }
    if let Some(s) = run_start {
        if best.map_or(true, |(a, b)| CONVEXITY_SAMPLES - s > b - a) {
            best = Some((s, CONVEXITY_SAMPLES));
        }
    }
    let Some((si, ei)) = best else {
        return Err(Error::Convexity(format!(
            "Φ″ ≤ 0 throughout [{lo}, {hi}] (e.g. at r = {:?})",
            violations
        )));
    };
    if ei - si < 10 {
        return Err(Error::Convexity(format!(
            "no usable convex region in [{lo}, {hi}]; Φ″ ≤ 0 e.g. at r = {:?}",
            violations
        )));
    }

    // Refine the edges of the run by bisection on Φ″.
    let mut a = lo + h * si as f64;
    let mut b = lo + h * ei as f64;
    if si > 0 {
        a = numerics::bisect(d2, lo + h * (si - 1) as f64, a, 1e-12)?;
    }
    if ei < CONVEXITY_SAMPLES {
        b = numerics::bisect(d2, b, lo + h * (ei + 1) as f64, 1e-12)?;
    }
    Ok((a, b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn builtins() -> Vec<Potential> {
        vec![
            Potential::harmonic(),
            Potential::toda(),
            Potential::modified_toda(),
            Potential::arctan_flux(),
            Potential::quintic_fast(),
            Potential::quintic_slow(),
            Potential::trig_multi(),
        ]
    }

    #[test]
    fn toda_values() {
        let p = Potential::toda();
        assert_relative_eq!(p.eval(1.0, 0).unwrap(), 1.0); // exp(0) − 0
        assert_relative_eq!(p.sound_speed(1.0).unwrap(), 1.0);
        assert!(p.turning_points((-4.0, 9.0)).unwrap().is_empty());
    }

    #[test]
    fn quintic_fast_sound_speed() {
        let p = Potential::quintic_fast();
        assert_relative_eq!(p.eval(2.0, 2).unwrap(), 2.0);
        assert_relative_eq!(p.sound_speed(2.0).unwrap(), 2.0_f64.sqrt());
    }

    #[test]
    fn quintic_slow_sound_speeds_match_reported_values() {
        let p = Potential::quintic_slow();
        assert!((p.sound_speed(4.0).unwrap() - 1.83).abs() < 0.01);
        assert!((p.sound_speed(1.24).unwrap() - 1.73).abs() < 0.01);
    }

    #[test]
    fn quintic_turning_points_are_exact_roots() {
        let p = Potential::quintic_fast();
        let tps = p.turning_points((0.0, 6.0)).unwrap();
        assert_eq!(tps.len(), 2);
        assert_relative_eq!(tps[0].r_star, 3.0 - 3.0_f64.sqrt(), epsilon = 1e-10);
        assert_relative_eq!(tps[1].r_star, 3.0 + 3.0_f64.sqrt(), epsilon = 1e-10);
        assert_eq!(tps[0].fourth_sign, -1);
        assert_eq!(tps[1].fourth_sign, 1);

        let p = Potential::quintic_slow();
        let tps = p.turning_points((0.0, 6.0)).unwrap();
        assert_eq!(tps.len(), 1);
        assert_relative_eq!(tps[0].r_star, 1.0 + 3.0_f64.sqrt(), epsilon = 1e-10);
        assert_eq!(tps[0].fourth_sign, 1);
    }

    #[test]
    fn arctan_flux_turning_point_at_origin() {
        let p = Potential::arctan_flux();
        let tps = p.turning_points((-19.0, 19.0)).unwrap();
        assert_eq!(tps.len(), 1);
        assert!(tps[0].r_star.abs() < 1e-10);
        assert_eq!(tps[0].fourth_sign, -1);
    }

    #[test]
    fn harmonic_third_derivative_vanishes() {
        let p = Potential::harmonic();
        assert_eq!(p.eval(0.7, 3).unwrap(), 0.0);
    }

    #[test]
    fn derivative_orders_consistent_with_finite_differences() {
        // Order-k closed form vs centered differences of the order-(k−1)
        // evaluator on 100 interior points of the hyperbolic core.
        for p in builtins() {
            let (lo, hi) = p.hyperbolic_core();
            let pad = 0.05 * (hi - lo);
            let (lo, hi) = (lo + pad, hi - pad);
            for k in 1..=5u32 {
                for i in 0..100 {
                    let r = lo + (hi - lo) * (i as f64 + 0.5) / 100.0;
                    let h = 1e-5 * (1.0 + r.abs());
                    let fd = (p.eval_unchecked(r + h, k - 1) - p.eval_unchecked(r - h, k - 1))
                        / (2.0 * h);
                    let an = p.eval_unchecked(r, k);
                    let scale = an.abs().max(1e-3);
                    assert!(
                        (fd - an).abs() / scale < 1e-4,
                        "{} order {k} at r={r}: analytic {an} vs FD {fd}",
                        p.name()
                    );
                }
            }
        }
    }

    #[test]
    fn convex_core_of_fast_quintic_is_proper_subinterval() {
        let p = Potential::quintic_fast();
        let (a, b) = p.hyperbolic_core();
        // Φ″ vanishes near r ≈ −0.203 and r ≈ 3.456.
        assert!((a - (-0.2032)).abs() < 1e-2, "core left edge {a}");
        assert!((b - 3.4561).abs() < 1e-2, "core right edge {b}");
        assert!(p.sound_speed(-0.5).is_err());
        assert!(p.sound_speed(2.0).is_ok());
    }

    #[test]
    fn fully_convex_builtins_have_core_equal_to_domain() {
        for p in [Potential::toda(), Potential::modified_toda(), Potential::arctan_flux()] {
            assert_eq!(p.hyperbolic_core(), p.eval_domain());
        }
    }

    #[test]
    fn mirrored_potential_flips_orientation() {
        let p = Potential::quintic_slow();
        let m = p.mirrored().unwrap();
        // Values match under reflection.
        assert_relative_eq!(m.eval(-3.0, 0).unwrap(), p.eval(3.0, 0).unwrap());
        assert_relative_eq!(m.eval(-3.0, 1).unwrap(), -p.eval(3.0, 1).unwrap());
        assert_relative_eq!(m.eval(-3.0, 2).unwrap(), p.eval(3.0, 2).unwrap());
        // Reflection preserves even-order derivatives, so the kind of the
        // Φ″ extremum is unchanged, while the fifth derivative flips sign.
        let tp = m.turning_points((-5.0, 0.0)).unwrap();
        let tb = p.turning_points((0.0, 5.0)).unwrap();
        assert_eq!(tp.len(), 1);
        assert_eq!(tb.len(), 1);
        assert_relative_eq!(tp[0].r_star, -tb[0].r_star, epsilon = 1e-9);
        assert_eq!(tp[0].fourth_sign, tb[0].fourth_sign);
        assert_relative_eq!(tp[0].fifth, -tb[0].fifth, epsilon = 1e-7);
    }

    #[test]
    fn rejects_fully_concave_potential() {
        let res = Potential::new(PotentialKind::Polynomial(vec![0.0, 0.0, -1.0]));
        assert!(matches!(res, Err(Error::Convexity(_))));
    }

    #[test]
    fn shifted_potential_translates() {
        let kind = PotentialKind::Shifted {
            base: Box::new(PotentialKind::Toda),
            r0: 2.0,
        };
        let p = Potential::new(kind).unwrap();
        let t = Potential::toda();
        assert_relative_eq!(p.eval(3.0, 1).unwrap(), t.eval(1.0, 1).unwrap());
    }

    #[test]
    fn unsupported_order_is_usage_error() {
        let p = Potential::toda();
        assert!(matches!(p.eval(1.0, 6), Err(Error::Usage(_))));
    }

    #[test]
    fn out_of_domain_is_domain_error() {
        let p = Potential::quintic_fast();
        assert!(matches!(p.eval(100.0, 0), Err(Error::Domain(_))));
    }
}
