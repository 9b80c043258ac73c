//! `consdata`: analysis of the zero-dissipation shock locus
//! D = {J(r_L, r_R) = 0} and the shocks it generates.

use std::path::Path;

use fpulab_core::conservative::{
    bifurcation_check, build_conservative_shock, jfunc, trace_dset, BifurcationCheck,
    DCurve,
};
use fpulab_core::nonclassical::{conservative_anchors, ConservativeAnchors};
use fpulab_core::psystem::energy_production;
use fpulab_core::{Error, Family, Potential, Result, ShockClass, State, Wave, WaveKind};
use serde::Serialize;

use crate::output::{csv_writer, ensure_dir, write_json, write_record};

pub fn parse_family(f: u8) -> Result<Family> {
    match f {
        1 => Ok(Family::One),
        2 => Ok(Family::Two),
        other => Err(Error::Usage(format!("family must be 1 or 2, got {other}"))),
    }
}

// ---------------------------------------------------------------------------
// trace
// ---------------------------------------------------------------------------

/// Summary of one traced locus component.
#[derive(Debug, Serialize)]
pub struct CurveSummary {
    pub points: usize,
    pub closed: bool,
    pub partial: bool,
    pub crossings: Vec<f64>,
    pub extrema: Vec<fpulab_core::conservative::Extremum>,
}

#[derive(Debug, Serialize)]
pub struct TraceSummary {
    pub potential: String,
    pub window: (f64, f64, f64, f64),
    pub step: f64,
    pub curves: Vec<CurveSummary>,
}

/// Write all components as one CSV (`curve,index,r_l,r_r`) plus a JSON
/// summary with crossings and extrema.
pub fn write_trace(
    dir: &Path,
    p: &Potential,
    window: (f64, f64, f64, f64),
    step: f64,
    curves: &[DCurve],
) -> Result<()> {
    ensure_dir(dir)?;
    let path = dir.join("dcurves.csv");
    let mut w = csv_writer(&path)?;
    write_record(&mut w, &path, &["curve", "index", "r_l", "r_r"])?;
    for (ci, curve) in curves.iter().enumerate() {
        for (i, pt) in curve.points.iter().enumerate() {
            write_record(
                &mut w,
                &path,
                &[
                    ci.to_string().as_str(),
                    i.to_string().as_str(),
                    format!("{:.12}", pt.r_l).as_str(),
                    format!("{:.12}", pt.r_r).as_str(),
                ],
            )?;
        }
    }
    w.flush()
        .map_err(|e| Error::Config(format!("cannot flush {}: {e}", path.display())))?;
    let summary = TraceSummary {
        potential: p.name().to_string(),
        window,
        step,
        curves: curves
            .iter()
            .map(|c| CurveSummary {
                points: c.points.len(),
                closed: c.closed,
                partial: c.partial,
                crossings: c.crossings.clone(),
                extrema: c.extrema.clone(),
            })
            .collect(),
    };
    write_json(&dir.join("summary.json"), &summary)
}

pub fn run_trace(
    potential: &str,
    window: (f64, f64, f64, f64),
    step: f64,
    out: &Path,
) -> Result<()> {
    let p = Potential::by_name(potential)?;
    let curves = trace_dset(&p, window, step)?;
    write_trace(out, &p, window, step, &curves)?;
    println!(
        "{} component(s) -> {}",
        curves.len(),
        out.join("dcurves.csv").display()
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// shock
// ---------------------------------------------------------------------------

/// Full description of the zero-dissipation shock conjugate to a given
/// left strain.
#[derive(Debug, Serialize)]
pub struct ConsShockReport {
    pub potential: String,
    pub family: u8,
    pub anchors: ConservativeAnchors,
    pub wave: Wave,
    /// |v_R − v_L|.
    pub velocity_jump: f64,
    /// Sound speeds at the end states.
    pub lambda_l: f64,
    pub lambda_r: f64,
    pub shock_class: ShockClass,
    /// Residual of the energy-conservation condition J = 0.
    pub j_residual: f64,
    /// Energy production rate of the jump (should vanish).
    pub energy_production: f64,
}

pub fn shock_report(
    p: &Potential,
    r_l: f64,
    v_l: f64,
    family: Family,
) -> Result<ConsShockReport> {
    let anchors = conservative_anchors(p, State::new(r_l, v_l), family)?;
    let wave = build_conservative_shock(p, r_l, anchors.r0, v_l, family)?;
    let class = match wave.kind {
        WaveKind::Shock(c) => c,
        WaveKind::Rarefaction => unreachable!("conservative builder emits shocks"),
    };
    Ok(ConsShockReport {
        potential: p.name().to_string(),
        family: match family {
            Family::One => 1,
            Family::Two => 2,
        },
        anchors,
        velocity_jump: (wave.right.v - wave.left.v).abs(),
        lambda_l: p.sound_speed(r_l)?,
        lambda_r: p.sound_speed(anchors.r0)?,
        shock_class: class,
        j_residual: jfunc(p, r_l, anchors.r0)?,
        energy_production: energy_production(p, wave.left, wave.right)?,
        wave,
    })
}

pub fn run_shock(potential: &str, r_l: f64, v_l: f64, family: u8) -> Result<()> {
    let p = Potential::by_name(potential)?;
    let report = shock_report(&p, r_l, v_l, parse_family(family)?)?;
    println!("{}", serde_json::to_string_pretty(&report).expect("serializes"));
    Ok(())
}

// ---------------------------------------------------------------------------
// bifurcation
// ---------------------------------------------------------------------------

#[derive(Debug, Serialize)]
pub struct BifurcationReport {
    pub potential: String,
    pub r_star: f64,
    pub s: f64,
    #[serde(flatten)]
    pub check: BifurcationCheck,
}

pub fn run_bifurcation(potential: &str, r_star: f64, s: f64) -> Result<()> {
    let p = Potential::by_name(potential)?;
    let check = bifurcation_check(&p, r_star, s)?;
    let report = BifurcationReport {
        potential: p.name().to_string(),
        r_star,
        s,
        check,
    };
    println!("{}", serde_json::to_string_pretty(&report).expect("serializes"));
    Ok(())
}
