//! TOML run configurations for chain simulations.
//!
//! A config file fully describes one lattice run: the potential, the chain
//! size, the Riemann data, the interface position, and the snapshot
//! schedule. Unknown keys are rejected so that typos fail loudly.

use std::path::Path;

use fpulab_core::lattice::SimConfig;
use fpulab_core::{Error, Potential, Result, State};
use serde::{Deserialize, Serialize};

/// How the potential is specified in a config file: by catalogue name or
/// as an explicit polynomial (coefficients in ascending powers).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PotentialSpec {
    Name(String),
    Polynomial {
        polynomial: Vec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        domain: Option<[f64; 2]>,
    },
}

impl PotentialSpec {
    pub fn build(&self) -> Result<Potential> {
        match self {
            PotentialSpec::Name(name) => Potential::by_name(name),
            PotentialSpec::Polynomial { polynomial, domain } => {
                let kind = fpulab_core::PotentialKind::Polynomial(polynomial.clone());
                match domain {
                    Some([a, b]) => Potential::with_domain(kind, (*a, *b)),
                    None => Potential::new(kind),
                }
            }
        }
    }
}

/// One lattice run, as stored on disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfigFile {
    /// Optional short name; used as the default output directory name.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub potential: PotentialSpec,
    /// Number of particles.
    pub n: usize,
    /// Left Riemann state (r, v).
    pub u_l: [f64; 2],
    /// Right Riemann state (r, v).
    pub u_r: [f64; 2],
    /// Interface position in rescaled particle index, in (0, 1).
    pub alpha_star: f64,
    /// Final macroscopic time.
    pub t_end: f64,
    /// Time step override; stability-based default when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    /// Macroscopic snapshot times; defaults to `[t_end]`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub snapshots: Vec<f64>,
}

impl RunConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            Error::Config(format!("cannot read config {}: {e}", path.display()))
        })?;
        Self::parse(&text)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("run config serializes")
    }

    /// Default directory name for this run's outputs.
    pub fn default_label(&self) -> String {
        self.label.clone().unwrap_or_else(|| "run".into())
    }

    /// Validate and convert into a core simulation config.
    pub fn to_sim_config(&self) -> Result<SimConfig> {
        let potential = self.potential.build()?;
        let mut cfg = SimConfig::new(
            self.n,
            potential,
            State::new(self.u_l[0], self.u_l[1]),
            State::new(self.u_r[0], self.u_r[1]),
            self.alpha_star,
            self.t_end,
        )?;
        if let Some(dt) = self.dt {
            if !(dt > 0.0) {
                return Err(Error::Config(format!("dt = {dt} must be positive")));
            }
            cfg.dt = dt;
        }
        if !self.snapshots.is_empty() {
            cfg.snapshot_times = self.snapshots.clone();
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const EXAMPLE: &str = r#"
label = "piston"
potential = "modified_toda"
n = 400
u_l = [0.0, 0.0]
u_r = [0.0, 1.0]
alpha_star = 0.6
t_end = 0.05
snapshots = [0.025, 0.05]
"#;

    #[test]
    fn parse_and_convert() {
        let cfg = RunConfigFile::parse(EXAMPLE).unwrap();
        assert_eq!(cfg.n, 400);
        let sim = cfg.to_sim_config().unwrap();
        assert_eq!(sim.potential.name(), "modified_toda");
        assert_eq!(sim.snapshot_times, vec![0.025, 0.05]);
        assert!(sim.dt > 0.0);
    }

    #[test]
    fn toml_round_trip() {
        let cfg = RunConfigFile::parse(EXAMPLE).unwrap();
        let again = RunConfigFile::parse(&cfg.to_toml()).unwrap();
        assert_eq!(cfg, again);
    }

    #[test]
    fn unknown_key_rejected() {
        let bad = format!("{EXAMPLE}\nnn = 3\n");
        assert!(RunConfigFile::parse(&bad).is_err());
    }

    #[test]
    fn polynomial_potential() {
        let text = r#"
n = 100
u_l = [0.0, 0.0]
u_r = [0.1, 0.0]
alpha_star = 0.5
t_end = 0.01

[potential]
polynomial = [0.0, 0.0, 0.5]
domain = [-4.0, 4.0]
"#;
        let cfg = RunConfigFile::parse(text).unwrap();
        let p = cfg.potential.build().unwrap();
        assert!((p.d2phi(0.3).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bad_dt_rejected() {
        let mut cfg = RunConfigFile::parse(EXAMPLE).unwrap();
        cfg.dt = Some(-1.0);
        assert!(cfg.to_sim_config().is_err());
    }
}
