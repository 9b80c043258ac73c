//! `psolve`: solve a single macroscopic Riemann problem and write the wave
//! fan as JSON, optionally with a sampled self-similar profile as CSV.

use std::path::Path;

use clap::ValueEnum;
use fpulab_core::nonclassical::{
    fpu_predicted_structure, solve_riemann_conservative, solve_riemann_dissipative,
    CfTable, ConjectureMode, PredictedKind,
};
use fpulab_core::psystem::{energy_production, solve_riemann_classical};
use fpulab_core::{Error, Potential, Result, RiemannSolution, State};
use serde::Serialize;

use crate::output::{csv_writer, write_json, write_record};

/// Which closure solves the Riemann problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SolverChoice {
    /// Lax shocks and rarefactions only.
    Classical,
    /// Energy-conserving shocks across turning points.
    Conservative,
    /// Maximum entropy dissipation; never emits conserving shocks.
    Dissipative,
    /// Chain-structure prediction (conservative or dissipative per mode,
    /// shocks relabeled by their atomistic appearance).
    FpuPredict,
}

/// Flux orientation mode for `fpu-predict`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeChoice {
    Supersonic,
    Subsonic,
}

impl From<ModeChoice> for ConjectureMode {
    fn from(m: ModeChoice) -> Self {
        match m {
            ModeChoice::Supersonic => ConjectureMode::Supersonic,
            ModeChoice::Subsonic => ConjectureMode::Subsonic,
        }
    }
}

/// Load a measured front-speed table from CSV columns `r_r,c_f`
/// (a header row is skipped if present).
pub fn load_cf_table(path: &Path) -> Result<CfTable> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_path(path)
        .map_err(|e| Error::Config(format!("cannot open {}: {e}", path.display())))?;
    let mut points = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| {
            Error::Config(format!("bad record in {}: {e}", path.display()))
        })?;
        let a = rec.get(0).map(str::trim).unwrap_or("");
        let b = rec.get(1).map(str::trim).unwrap_or("");
        match (a.parse::<f64>(), b.parse::<f64>()) {
            (Ok(x), Ok(y)) => points.push((x, y)),
            // Tolerate one header row; anything else unparsable is an error.
            _ if points.is_empty() => continue,
            _ => {
                return Err(Error::Config(format!(
                    "non-numeric row in {}: {a:?},{b:?}",
                    path.display()
                )))
            }
        }
    }
    CfTable::new(points)
}

/// JSON report for one solved Riemann problem.
#[derive(Debug, Serialize)]
pub struct SolveReport {
    pub potential: String,
    pub solver: String,
    pub solution: RiemannSolution,
    /// Chain-side labels parallel to the waves (fpu-predict only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<PredictedKind>>,
    /// True when nucleation thresholds used the Rankine-Hugoniot proxy
    /// instead of a measured front-speed table (fpu-predict only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub proxy: Option<bool>,
    /// Energy production rate of each shock (zero entries for rarefactions).
    pub energy_production: Vec<f64>,
    /// Worst jump-condition residual over the fan.
    pub max_residual: f64,
}

pub fn solve(
    p: &Potential,
    u_l: State,
    u_r: State,
    solver: SolverChoice,
    mode: ModeChoice,
    cf_table: Option<&CfTable>,
) -> Result<SolveReport> {
    let (solution, labels, proxy) = match solver {
        SolverChoice::Classical => (solve_riemann_classical(p, u_l, u_r)?, None, None),
        SolverChoice::Conservative => (solve_riemann_conservative(p, u_l, u_r)?, None, None),
        SolverChoice::Dissipative => (solve_riemann_dissipative(p, u_l, u_r)?, None, None),
        SolverChoice::FpuPredict => {
            let pred = fpu_predicted_structure(p, u_l, u_r, mode.into(), cf_table)?;
            (pred.solution, Some(pred.labels), Some(pred.proxy))
        }
    };
    let energy: Vec<f64> = solution
        .waves
        .iter()
        .map(|w| match w.kind {
            fpulab_core::WaveKind::Rarefaction => Ok(0.0),
            fpulab_core::WaveKind::Shock(_) => energy_production(p, w.left, w.right),
        })
        .collect::<Result<_>>()?;
    let max_residual = solution.max_residual(p)?;
    Ok(SolveReport {
        potential: p.name().to_string(),
        solver: format!("{solver:?}").to_lowercase(),
        solution,
        labels,
        proxy,
        energy_production: energy,
        max_residual,
    })
}

/// Sample the self-similar profile on a uniform c-grid spanning the fan
/// with 20% margin and write it as CSV `c,r,v`.
pub fn write_samples(
    path: &Path,
    p: &Potential,
    solution: &RiemannSolution,
    count: usize,
) -> Result<()> {
    if count < 2 {
        return Err(Error::Usage(format!("need at least 2 samples, got {count}")));
    }
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for w in &solution.waves {
        lo = lo.min(w.speed_lo);
        hi = hi.max(w.speed_hi);
    }
    if !lo.is_finite() {
        // Constant data: sample around zero.
        lo = -1.0;
        hi = 1.0;
    }
    let margin = 0.2 * (hi - lo).max(1e-3);
    let (lo, hi) = (lo - margin, hi + margin);
    let mut w = csv_writer(path)?;
    write_record(&mut w, path, &["c", "r", "v"])?;
    for k in 0..count {
        let c = lo + (hi - lo) * k as f64 / (count - 1) as f64;
        let s = solution.sample(p, c)?;
        write_record(
            &mut w,
            path,
            &[
                format!("{c:.12}").as_str(),
                format!("{:.17e}", s.r).as_str(),
                format!("{:.17e}", s.v).as_str(),
            ],
        )?;
    }
    w.flush()
        .map_err(|e| Error::Config(format!("cannot flush {}: {e}", path.display())))
}

#[allow(clippy::too_many_arguments)]
pub fn run(
    potential: &str,
    u_l: [f64; 2],
    u_r: [f64; 2],
    solver: SolverChoice,
    mode: ModeChoice,
    cf_table: Option<&Path>,
    samples: Option<usize>,
    out: Option<&Path>,
) -> Result<()> {
    let p = Potential::by_name(potential)?;
    let table = cf_table.map(load_cf_table).transpose()?;
    let report = solve(
        &p,
        State::new(u_l[0], u_l[1]),
        State::new(u_r[0], u_r[1]),
        solver,
        mode,
        table.as_ref(),
    )?;
    match out {
        Some(dir) => {
            crate::output::ensure_dir(dir)?;
            write_json(&dir.join("waves.json"), &report)?;
            if let Some(count) = samples {
                write_samples(&dir.join("samples.csv"), &p, &report.solution, count)?;
            }
            println!("{}", dir.join("waves.json").display());
        }
        None => {
            if samples.is_some() {
                return Err(Error::Usage(
                    "--samples requires an output directory (--out)".into(),
                ));
            }
            println!("{}", serde_json::to_string_pretty(&report).expect("serializes"));
        }
    }
    Ok(())
}
