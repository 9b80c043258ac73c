//! `measure`: window-averaged profiles, wave segmentation, and tracked
//! edge velocities for a completed simulation run.

use std::path::Path;

use fpulab_core::mesoscope::{
    self, conservation_check, default_stride, default_threshold, default_window,
    front_back_velocities, local_means, rescale_to_c, segment_waves,
    ConservationResiduals, FrontBack, ProfileInC, WaveSegmentation,
};
use fpulab_core::{Error, Potential, Result};
use serde::Serialize;

use crate::output::{csv_writer, ensure_dir, write_json, write_record, Manifest};

/// Tunable measurement parameters; `None` means the N-derived default.
#[derive(Debug, Clone, Copy, Default)]
pub struct MeasureOpts {
    pub window: Option<usize>,
    pub stride: Option<usize>,
    pub threshold: Option<f64>,
}

/// Top-level JSON written by `measure`.
#[derive(Debug, Serialize)]
pub struct MeasureSummary {
    pub potential: String,
    pub window: usize,
    pub stride: usize,
    pub osc_threshold: f64,
    /// Segmentation of each snapshot, in manifest order.
    pub segmentations: Vec<WaveSegmentation>,
    /// Edge velocities of dispersive shocks, tracked across the first and
    /// last snapshot when two or more exist.
    pub fronts: Vec<FrontBack>,
    /// Weak-form conservation residuals between first and last snapshot.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub conservation: Option<ConservationResiduals>,
}

/// Compute all window profiles of a run (one per snapshot, skipping t̄ = 0
/// which has no self-similar coordinate).
pub fn profiles_of_run(
    manifest: &Manifest,
    dir: &Path,
    p: &Potential,
    opts: &MeasureOpts,
) -> Result<Vec<ProfileInC>> {
    let mut out = Vec::new();
    for (i, entry) in manifest.snapshots.iter().enumerate() {
        if !(entry.t_macro > 0.0) {
            continue;
        }
        let state = manifest.read_snapshot(dir, i)?;
        let w = opts.window.unwrap_or_else(|| default_window(state.n()));
        let s = opts.stride.unwrap_or_else(|| default_stride(w));
        let measures = local_means(&state, p, w, s)?;
        out.push(rescale_to_c(
            measures,
            manifest.config.alpha_star,
            entry.t_macro,
        )?);
    }
    if out.is_empty() {
        return Err(Error::Usage(
            "run has no snapshot at positive macroscopic time".into(),
        ));
    }
    Ok(out)
}

/// Measure a run end to end: profiles, segmentation, fronts, conservation.
pub fn measure_run(
    manifest: &Manifest,
    dir: &Path,
    opts: &MeasureOpts,
) -> Result<(Vec<ProfileInC>, MeasureSummary)> {
    let p = manifest.config.potential.build()?;
    let profiles = profiles_of_run(manifest, dir, &p, opts)?;
    let last = profiles.last().expect("non-empty");
    let threshold = opts.threshold.unwrap_or_else(|| default_threshold(last));
    let segmentations: Vec<WaveSegmentation> = profiles
        .iter()
        .map(|prof| segment_waves(prof, threshold))
        .collect();
    let fronts = front_back_velocities(&profiles, threshold).unwrap_or_default();
    let conservation = if profiles.len() >= 2 {
        conservation_check(&profiles[0], last).ok()
    } else {
        None
    };
    let n = manifest.config.n;
    let w = opts.window.unwrap_or_else(|| default_window(n));
    let summary = MeasureSummary {
        potential: p.name().to_string(),
        window: w,
        stride: opts.stride.unwrap_or_else(|| default_stride(w)),
        osc_threshold: threshold,
        segmentations,
        fronts,
        conservation,
    };
    Ok((profiles, summary))
}

/// Write one profile as CSV
/// (`c,alpha_bar,mean_r,mean_v,mean_energy,amp_r,amp_v,osc_r`).
pub fn write_profile_csv(path: &Path, profile: &ProfileInC) -> Result<()> {
    let mut w = csv_writer(path)?;
    write_record(
        &mut w,
        path,
        &[
            "c",
            "alpha_bar",
            "mean_r",
            "mean_v",
            "mean_energy",
            "amp_r",
            "amp_v",
            "osc_r",
        ],
    )?;
    for (c, m) in &profile.records {
        write_record(
            &mut w,
            path,
            &[
                format!("{c:.12}").as_str(),
                format!("{:.12}", m.center_alpha_bar).as_str(),
                format!("{:.12e}", m.mean_r).as_str(),
                format!("{:.12e}", m.mean_v).as_str(),
                format!("{:.12e}", m.mean_energy).as_str(),
                format!("{:.12e}", m.amp_r).as_str(),
                format!("{:.12e}", m.amp_v).as_str(),
                format!("{:.12e}", m.osc_r).as_str(),
            ],
        )?;
    }
    w.flush()
        .map_err(|e| Error::Config(format!("cannot flush {}: {e}", path.display())))
}

pub fn run(manifest_path: &Path, out: Option<&Path>, opts: &MeasureOpts) -> Result<()> {
    let manifest = Manifest::load(manifest_path)?;
    let dir = manifest_path
        .parent()
        .ok_or_else(|| Error::Usage("manifest path has no parent directory".into()))?;
    let out_dir = out.map(Path::to_path_buf).unwrap_or_else(|| dir.to_path_buf());
    ensure_dir(&out_dir)?;
    let (profiles, summary) = measure_run(&manifest, dir, opts)?;
    for (i, prof) in profiles.iter().enumerate() {
        write_profile_csv(&out_dir.join(format!("profile_{i:03}.csv")), prof)?;
    }
    write_json(&out_dir.join("measure.json"), &summary)?;
    println!("{}", out_dir.join("measure.json").display());
    Ok(())
}

/// Support-sample CSV for one window (`r,v` pairs of raw particles),
/// exposed for plotting the oscillation content of a region.
#[allow(dead_code)]
pub fn support_samples(profile: &ProfileInC, c: f64) -> Option<&Vec<(f64, f64)>> {
    profile
        .records
        .iter()
        .min_by(|a, b| (a.0 - c).abs().total_cmp(&(b.0 - c).abs()))
        .map(|(_, m)| &m.support_samples)
}

pub use mesoscope::SegmentKind;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::commands::simulate::simulate_to_dir;
    use crate::config::{PotentialSpec, RunConfigFile};

    fn shock_cfg() -> RunConfigFile {
        RunConfigFile {
            label: None,
            potential: PotentialSpec::Name("toda".into()),
            n: 600,
            u_l: [1.0, 0.0],
            u_r: [0.6, -0.4435439365],
            alpha_star: 0.5,
            t_end: 0.08,
            dt: None,
            snapshots: vec![0.04, 0.08],
        }
    }

    #[test]
    fn measure_finds_dispersive_shock() {
        let dir = tempfile::tempdir().unwrap();
        let manifest = simulate_to_dir(&shock_cfg(), dir.path()).unwrap();
        let (profiles, summary) =
            measure_run(&manifest, dir.path(), &MeasureOpts::default()).unwrap();
        assert_eq!(profiles.len(), 2);
        let kinds = summary.segmentations.last().unwrap().wave_kinds();
        assert!(
            kinds.contains(&SegmentKind::DispersiveShock),
            "kinds: {kinds:?}"
        );
        assert!(!summary.fronts.is_empty());
        assert!(summary.fronts[0].tracked);
        let cons = summary.conservation.unwrap();
        assert!(cons.mass < 0.05, "mass residual {}", cons.mass);
    }

    #[test]
    fn profile_csv_written() {
        let dir = tempfile::tempdir().unwrap();
        let manifest = simulate_to_dir(&shock_cfg(), dir.path()).unwrap();
        let (profiles, _) =
            measure_run(&manifest, dir.path(), &MeasureOpts::default()).unwrap();
        let path = dir.path().join("p.csv");
        write_profile_csv(&path, &profiles[0]).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("c,alpha_bar,mean_r"));
        assert_eq!(text.lines().count(), profiles[0].records.len() + 1);
    }
}
