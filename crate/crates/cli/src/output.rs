//! On-disk layout of a simulation run: snapshot CSV files plus a JSON
//! manifest with checksums, balance defects, and timing.

use std::io::Read;
use std::path::{Path, PathBuf};

use fpulab_core::lattice::ChainState;
use fpulab_core::{Error, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::RunConfigFile;

/// One snapshot file recorded in a manifest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnapshotEntry {
    pub t_macro: f64,
    pub t_micro: f64,
    /// File name relative to the manifest's directory.
    pub file: String,
    pub sha256: String,
}

/// Machine-readable record of one completed run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub config: RunConfigFile,
    /// Time step actually used.
    pub dt: f64,
    pub snapshots: Vec<SnapshotEntry>,
    /// Relative defect of the semi-discrete energy balance.
    pub energy_defect_rel: f64,
    /// Absolute defect of the semi-discrete momentum balance.
    pub momentum_defect: f64,
    pub warnings: Vec<String>,
    pub elapsed_seconds: f64,
}

impl Manifest {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            Error::Config(format!("cannot read manifest {}: {e}", path.display()))
        })?;
        serde_json::from_str(&text)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self).expect("manifest serializes");
        std::fs::write(path, text).map_err(|e| {
            Error::Config(format!("cannot write manifest {}: {e}", path.display()))
        })
    }

    /// Load one snapshot's chain state, verifying its checksum.
    pub fn read_snapshot(&self, manifest_dir: &Path, index: usize) -> Result<ChainState> {
        let entry = self.snapshots.get(index).ok_or_else(|| {
            Error::Usage(format!(
                "snapshot index {index} out of range (run has {})",
                self.snapshots.len()
            ))
        })?;
        let path = manifest_dir.join(&entry.file);
        let digest = sha256_file(&path)?;
        if digest != entry.sha256 {
            return Err(Error::Config(format!(
                "checksum mismatch for {}: manifest {} vs file {}",
                path.display(),
                entry.sha256,
                digest
            )));
        }
        let mut state = read_snapshot_csv(&path)?;
        state.t_micro = entry.t_micro;
        Ok(state)
    }
}

/// SHA-256 of a file's bytes, hex-encoded.
pub fn sha256_file(path: &Path) -> Result<String> {
    let mut file = std::fs::File::open(path).map_err(|e| {
        Error::Config(format!("cannot open {}: {e}", path.display()))
    })?;
    let mut hasher = Sha256::new();
    let mut buf = [0u8; 64 * 1024];
    loop {
        let k = file.read(&mut buf).map_err(|e| {
            Error::Config(format!("cannot read {}: {e}", path.display()))
        })?;
        if k == 0 {
            break;
        }
        hasher.update(&buf[..k]);
    }
    Ok(hex::encode(hasher.finalize()))
}

/// Write one chain snapshot as CSV with columns `alpha_bar,r,v`
/// (ᾱ = particle index / N).
pub fn write_snapshot_csv(path: &Path, state: &ChainState) -> Result<()> {
    let n = state.n() as f64;
    let mut w = csv_writer(path)?;
    write_record(&mut w, path, &["alpha_bar", "r", "v"])?;
    for (i, (&r, &v)) in state.r.iter().zip(&state.v).enumerate() {
        let alpha = (i + 1) as f64 / n;
        write_record(
            &mut w,
            path,
            &[
                format!("{alpha:.10}").as_str(),
                format!("{r:.17e}").as_str(),
                format!("{v:.17e}").as_str(),
            ],
        )?;
    }
    w.flush()
        .map_err(|e| Error::Config(format!("cannot flush {}: {e}", path.display())))
}

/// Read a snapshot CSV back into a chain state (t_micro is left at zero;
/// the manifest carries the true value).
pub fn read_snapshot_csv(path: &Path) -> Result<ChainState> {
    let mut rdr = csv::Reader::from_path(path).map_err(|e| {
        Error::Config(format!("cannot open {}: {e}", path.display()))
    })?;
    let mut r = Vec::new();
    let mut v = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| {
            Error::Config(format!("bad record in {}: {e}", path.display()))
        })?;
        let parse = |i: usize| -> Result<f64> {
            rec.get(i)
                .ok_or_else(|| Error::Config(format!("short record in {}", path.display())))?
                .trim()
                .parse::<f64>()
                .map_err(|e| Error::Config(format!("bad number in {}: {e}", path.display())))
        };
        r.push(parse(1)?);
        v.push(parse(2)?);
    }
    if r.is_empty() {
        return Err(Error::Config(format!("{} has no data rows", path.display())));
    }
    Ok(ChainState { t_micro: 0.0, r, v })
}

pub fn csv_writer(path: &Path) -> Result<csv::Writer<std::fs::File>> {
    csv::Writer::from_path(path)
        .map_err(|e| Error::Config(format!("cannot create {}: {e}", path.display())))
}

pub fn write_record<W: std::io::Write>(
    w: &mut csv::Writer<W>,
    path: &Path,
    fields: &[&str],
) -> Result<()> {
    w.write_record(fields)
        .map_err(|e| Error::Config(format!("cannot write {}: {e}", path.display())))
}

/// Write any serializable value as pretty JSON.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| Error::Usage(format!("cannot serialize: {e}")))?;
    std::fs::write(path, text)
        .map_err(|e| Error::Config(format!("cannot write {}: {e}", path.display())))
}

/// Create a directory (and parents) for run outputs.
pub fn ensure_dir(path: &Path) -> Result<()> {
    std::fs::create_dir_all(path)
        .map_err(|e| Error::Config(format!("cannot create {}: {e}", path.display())))
}

/// Resolve an output directory: an explicit `--out`, else
/// `$FPULAB_OUT/<label>`, else `./<label>`.
pub fn resolve_out_dir(out: Option<&Path>, label: &str) -> PathBuf {
    match out {
        Some(p) => p.to_path_buf(),
        None => match std::env::var_os("FPULAB_OUT") {
            Some(root) => PathBuf::from(root).join(label),
            None => PathBuf::from(label),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn snapshot_csv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("snap.csv");
        let state = ChainState {
            t_micro: 1.25,
            r: vec![1.0, -0.5, 3.25e-7],
            v: vec![0.0, 2.0, -1.0],
        };
        write_snapshot_csv(&path, &state).unwrap();
        let back = read_snapshot_csv(&path).unwrap();
        assert_eq!(back.r, state.r);
        assert_eq!(back.v, state.v);
    }

    #[test]
    fn checksum_detects_tampering() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("snap.csv");
        std::fs::write(&path, "alpha_bar,r,v\n0.5,1.0,0.0\n").unwrap();
        let good = sha256_file(&path).unwrap();
        std::fs::write(&path, "alpha_bar,r,v\n0.5,1.0,0.1\n").unwrap();
        assert_ne!(good, sha256_file(&path).unwrap());
    }

    #[test]
    fn out_dir_resolution() {
        let explicit = resolve_out_dir(Some(Path::new("/tmp/x")), "lbl");
        assert_eq!(explicit, PathBuf::from("/tmp/x"));
    }
}
