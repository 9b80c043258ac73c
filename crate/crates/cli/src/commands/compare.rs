//! `compare`: measured chain profile versus a continuum Riemann solution.

use std::path::Path;

use fpulab_core::mesoscope::{self, default_threshold, ComparisonReport};
use fpulab_core::{Result, State};
use serde::Serialize;

use crate::commands::measure::{profiles_of_run, MeasureOpts};
use crate::commands::psolve::{self, ModeChoice, SolverChoice};
use crate::output::{write_json, Manifest};

#[derive(Debug, Serialize)]
pub struct CompareSummary {
    pub potential: String,
    pub solver: String,
    pub t_macro: f64,
    #[serde(flatten)]
    pub report: ComparisonReport,
    /// True when nucleation thresholds used the RH proxy (fpu-predict).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub proxy: Option<bool>,
}

pub fn compare_run(
    manifest: &Manifest,
    dir: &Path,
    solver: SolverChoice,
    mode: ModeChoice,
    cf_table: Option<&Path>,
    opts: &MeasureOpts,
) -> Result<CompareSummary> {
    let p = manifest.config.potential.build()?;
    let profiles = profiles_of_run(manifest, dir, &p, opts)?;
    let last = profiles.last().expect("non-empty");
    let threshold = opts.threshold.unwrap_or_else(|| default_threshold(last));
    let u_l = State::new(manifest.config.u_l[0], manifest.config.u_l[1]);
    let u_r = State::new(manifest.config.u_r[0], manifest.config.u_r[1]);
    let table = cf_table.map(psolve::load_cf_table).transpose()?;
    let solved = psolve::solve(&p, u_l, u_r, solver, mode, table.as_ref())?;
    let report = mesoscope::compare(last, &solved.solution, &p, threshold);
    Ok(CompareSummary {
        potential: p.name().to_string(),
        solver: solved.solver,
        t_macro: last.t_macro,
        report,
        proxy: solved.proxy,
    })
}

#[allow(clippy::too_many_arguments)]
pub fn run(
    manifest_path: &Path,
    solver: SolverChoice,
    mode: ModeChoice,
    cf_table: Option<&Path>,
    out: Option<&Path>,
    opts: &MeasureOpts,
) -> Result<()> {
    let manifest = Manifest::load(manifest_path)?;
    let dir = manifest_path
        .parent()
        .ok_or_else(|| fpulab_core::Error::Usage("manifest path has no parent".into()))?;
    let summary = compare_run(&manifest, dir, solver, mode, cf_table, opts)?;
    match out {
        Some(path) => {
            write_json(path, &summary)?;
            println!("{}", path.display());
        }
        None => println!(
            "{}",
            serde_json::to_string_pretty(&summary).expect("serializes")
        ),
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::commands::simulate::simulate_to_dir;
    use crate::config::{PotentialSpec, RunConfigFile};

    #[test]
    fn rarefaction_run_matches_classical_structure() {
        // Pure family-2 rarefaction: u_R on the integral curve with
        // λ₂(r_R) > λ₂(r_L), i.e. smaller r for this potential.
        let cfg = RunConfigFile {
            label: None,
            potential: PotentialSpec::Name("toda".into()),
            n: 2000,
            u_l: [1.0, 0.0],
            u_r: [0.4, 0.6997176152],
            alpha_star: 0.25,
            t_end: 0.25,
            dt: None,
            snapshots: vec![0.25],
        };
        let dir = tempfile::tempdir().unwrap();
        let manifest = simulate_to_dir(&cfg, dir.path()).unwrap();
        let summary = compare_run(
            &manifest,
            dir.path(),
            SolverChoice::Classical,
            ModeChoice::Supersonic,
            None,
            &MeasureOpts::default(),
        )
        .unwrap();
        assert!(summary.report.l1_distance.is_finite());
        assert!(
            summary
                .report
                .measured_kinds
                .iter()
                .any(|k| *k == mesoscope::SegmentKind::Rarefaction),
            "kinds: {:?}",
            summary.report.measured_kinds
        );
    }
}
