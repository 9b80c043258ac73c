//! `sweep`: run a batch of configs in parallel, one output directory per
//! run, with a JSON index of outcomes.

use std::path::{Path, PathBuf};

use fpulab_core::{Error, Result};
use rayon::prelude::*;
use serde::Serialize;

use crate::commands::simulate::simulate_to_dir;
use crate::config::RunConfigFile;
use crate::output::{ensure_dir, write_json};

#[derive(Debug, Serialize)]
pub struct SweepEntry {
    pub config: String,
    pub dir: String,
    pub ok: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub energy_defect_rel: Option<f64>,
}

#[derive(Debug, Serialize)]
pub struct SweepIndex {
    pub runs: Vec<SweepEntry>,
}

fn run_one(config_path: &Path, root: &Path) -> (SweepEntry, bool) {
    let outcome = (|| -> Result<(String, f64)> {
        let cfg = RunConfigFile::load(config_path)?;
        let label = cfg
            .label
            .clone()
            .or_else(|| {
                config_path
                    .file_stem()
                    .map(|s| s.to_string_lossy().into_owned())
            })
            .unwrap_or_else(|| "run".into());
        let dir = root.join(&label);
        let manifest = simulate_to_dir(&cfg, &dir)?;
        Ok((label, manifest.energy_defect_rel))
    })();
    match outcome {
        Ok((label, defect)) => (
            SweepEntry {
                config: config_path.display().to_string(),
                dir: label,
                ok: true,
                error: None,
                energy_defect_rel: Some(defect),
            },
            true,
        ),
        Err(e) => (
            SweepEntry {
                config: config_path.display().to_string(),
                dir: String::new(),
                ok: false,
                error: Some(e.to_string()),
                energy_defect_rel: None,
            },
            false,
        ),
    }
}

/// Run every config under `root`, `threads` wide (0 = rayon default).
pub fn sweep(configs: &[PathBuf], root: &Path, threads: usize) -> Result<SweepIndex> {
    if configs.is_empty() {
        return Err(Error::Usage("no configs given".into()));
    }
    ensure_dir(root)?;
    let body = || -> Vec<(SweepEntry, bool)> {
        configs.par_iter().map(|c| run_one(c, root)).collect()
    };
    let results = if threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| Error::Usage(format!("cannot build thread pool: {e}")))?
            .install(body)
    } else {
        body()
    };
    let all_ok = results.iter().all(|(_, ok)| *ok);
    let index = SweepIndex {
        runs: results.into_iter().map(|(e, _)| e).collect(),
    };
    write_json(&root.join("sweep.json"), &index)?;
    if !all_ok {
        let failed: Vec<&str> = index
            .runs
            .iter()
            .filter(|r| !r.ok)
            .map(|r| r.config.as_str())
            .collect();
        return Err(Error::Numerics(format!(
            "{} of {} runs failed: {}",
            failed.len(),
            index.runs.len(),
            failed.join(", ")
        )));
    }
    Ok(index)
}

pub fn run(configs: &[PathBuf], out: &Path, threads: usize) -> Result<()> {
    let index = sweep(configs, out, threads)?;
    for entry in &index.runs {
        println!("{} -> {}", entry.config, out.join(&entry.dir).display());
    }
    Ok(())
}
