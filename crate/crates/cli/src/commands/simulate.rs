//! `simulate`: run one chain Riemann problem from a TOML config and write
//! snapshot CSVs plus a JSON manifest.

use std::path::{Path, PathBuf};
use std::time::Instant;

use fpulab_core::lattice;
use fpulab_core::Result;

use crate::config::RunConfigFile;
use crate::output::{
    ensure_dir, sha256_file, write_snapshot_csv, Manifest, SnapshotEntry,
};

/// Run the configured simulation into `dir`; returns the saved manifest.
pub fn simulate_to_dir(cfg: &RunConfigFile, dir: &Path) -> Result<Manifest> {
    let sim = cfg.to_sim_config()?;
    ensure_dir(dir)?;
    let started = Instant::now();
    let out = lattice::run(&sim)?;
    let elapsed = started.elapsed().as_secs_f64();

    let mut snapshots = Vec::with_capacity(out.snapshots.len());
    for (i, snap) in out.snapshots.iter().enumerate() {
        let file = format!("snapshot_{i:03}.csv");
        let path = dir.join(&file);
        write_snapshot_csv(&path, &snap.state)?;
        snapshots.push(SnapshotEntry {
            t_macro: snap.t_macro,
            t_micro: snap.state.t_micro,
            sha256: sha256_file(&path)?,
            file,
        });
    }

    let manifest = Manifest {
        tool: "fpulab".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        config: cfg.clone(),
        dt: sim.dt,
        snapshots,
        energy_defect_rel: out.energy_defect_rel,
        momentum_defect: out.momentum_defect,
        warnings: out.boundary_warning.into_iter().collect(),
        elapsed_seconds: elapsed,
    };
    manifest.save(&dir.join("manifest.json"))?;
    Ok(manifest)
}

/// CLI entry point: load the config, run, print the manifest path.
pub fn run(config: &Path, out: Option<&Path>) -> Result<PathBuf> {
    let cfg = RunConfigFile::load(config)?;
    let label = cfg
        .label
        .clone()
        .or_else(|| {
            config
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
        })
        .unwrap_or_else(|| "run".into());
    let dir = crate::output::resolve_out_dir(out, &label);
    let manifest = simulate_to_dir(&cfg, &dir)?;
    for w in &manifest.warnings {
        eprintln!("warning: {w}");
    }
    let path = dir.join("manifest.json");
    println!("{}", path.display());
    Ok(path)
}
