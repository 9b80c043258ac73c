//! `recipe`: ready-made run configurations for the laboratory's standard
//! experiments. Each recipe is pure data — a set of TOML configs that
//! `simulate` (or `sweep`) can run unchanged.

use std::path::{Path, PathBuf};

use clap::ValueEnum;
use fpulab_core::Result;

use crate::config::{PotentialSpec, RunConfigFile};
use crate::output::ensure_dir;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RecipeName {
    /// Generic three-wave datum for the arctan flux: rarefaction,
    /// dispersive shock, and a supersonic conserving front.
    ThreeWaveArctan,
    /// Velocity jump for the modified Toda chain: the reference
    /// self-similarity and refinement experiment.
    TodaPiston,
    /// Conserving-front datum of the convex-to-concave quintic: the exact
    /// supersonic jump plus its expansion partner.
    FastSharpFront,
    /// Supersonic single-jump datum of the convex-to-concave quintic,
    /// interface placed near the right edge.
    FastSupersonicShock,
    /// Conserving-front datum of the concave-to-convex quintic: subsonic
    /// jump where no sharp front is expected to nucleate.
    SlowSubsonicFront,
    /// Family-1 Lax shock data of increasing strength for the modified
    /// Toda chain (three runs).
    TodaShockScan,
}

fn cfg(
    label: &str,
    potential: &str,
    n: usize,
    u_l: [f64; 2],
    u_r: [f64; 2],
    alpha_star: f64,
    t_end: f64,
    snapshots: Vec<f64>,
) -> RunConfigFile {
    RunConfigFile {
        label: Some(label.into()),
        potential: PotentialSpec::Name(potential.into()),
        n,
        u_l,
        u_r,
        alpha_star,
        t_end,
        dt: None,
        snapshots,
    }
}

/// The configs of one recipe, each with the file name it should be saved
/// under.
pub fn recipe_configs(name: RecipeName) -> Vec<(String, RunConfigFile)> {
    match name {
        RecipeName::ThreeWaveArctan => vec![(
            "three_wave_arctan.toml".into(),
            cfg(
                "three_wave_arctan",
                "arctan_flux",
                8000,
                [2.0, 0.0],
                [-3.5, -1.118948793],
                0.5,
                0.4,
                vec![0.2, 0.4],
            ),
        )],
        RecipeName::TodaPiston => vec![(
            "toda_piston.toml".into(),
            cfg(
                "toda_piston",
                "modified_toda",
                4000,
                [0.0, 0.0],
                [0.0, 1.0],
                0.6,
                0.3,
                vec![0.15, 0.3],
            ),
        )],
        RecipeName::FastSharpFront => vec![(
            "fast_sharp_front.toml".into(),
            cfg(
                "fast_sharp_front",
                "quintic_fast",
                8000,
                [2.0, 0.0],
                [0.593485180902, -2.1133354460],
                0.8,
                0.5,
                vec![0.25, 0.5],
            ),
        )],
        RecipeName::FastSupersonicShock => vec![(
            "fast_supersonic_shock.toml".into(),
            cfg(
                "fast_supersonic_shock",
                "quintic_fast",
                2000,
                [2.0, 0.0],
                [0.4, -2.3746213733],
                0.9,
                0.5,
                vec![0.25, 0.5],
            ),
        )],
        RecipeName::SlowSubsonicFront => vec![(
            "slow_subsonic_front.toml".into(),
            cfg(
                "slow_subsonic_front",
                "quintic_slow",
                3000,
                [4.0, 0.0],
                [1.2360679775, 4.0312893729],
                0.1,
                0.4,
                vec![0.2, 0.4],
            ),
        )],
        RecipeName::TodaShockScan => {
            let data: [(f64, f64); 3] = [
                (-0.4, -0.7775135081),
                (-0.6, -1.2355607462),
                (-0.8, -1.7468979675),
            ];
            data.iter()
                .enumerate()
                .map(|(i, &(r_r, v_r))| {
                    let label = format!("toda_shock_scan_{i}");
                    (
                        format!("{label}.toml"),
                        cfg(
                            &label,
                            "modified_toda",
                            4000,
                            [0.0, 0.0],
                            [r_r, v_r],
                            0.5,
                            0.1,
                            vec![0.05, 0.1],
                        ),
                    )
                })
                .collect()
        }
    }
}

pub fn run(name: RecipeName, out: &Path) -> Result<Vec<PathBuf>> {
    ensure_dir(out)?;
    let mut written = Vec::new();
    for (file, cfg) in recipe_configs(name) {
        let path = out.join(file);
        std::fs::write(&path, cfg.to_toml()).map_err(|e| {
            fpulab_core::Error::Config(format!("cannot write {}: {e}", path.display()))
        })?;
        println!("{}", path.display());
        written.push(path);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use fpulab_core::psystem::{hugoniot_v, rh_speed};
    use fpulab_core::{Family, Potential, State};

    #[test]
    fn all_recipes_valid() {
        for name in [
            RecipeName::ThreeWaveArctan,
            RecipeName::TodaPiston,
            RecipeName::FastSharpFront,
            RecipeName::FastSupersonicShock,
            RecipeName::SlowSubsonicFront,
            RecipeName::TodaShockScan,
        ] {
            for (file, cfg) in recipe_configs(name) {
                let sim = cfg
                    .to_sim_config()
                    .unwrap_or_else(|e| panic!("{file}: {e}"));
                assert!(sim.n >= 2000, "{file}");
                // Round-trips through TOML unchanged.
                let again = RunConfigFile::parse(&cfg.to_toml()).unwrap();
                assert_eq!(cfg, again, "{file}");
            }
        }
    }

    #[test]
    fn shock_scan_data_sit_on_the_hugoniot_curve() {
        let p = Potential::modified_toda();
        let u_l = State::new(0.0, 0.0);
        for (_, cfg) in recipe_configs(RecipeName::TodaShockScan) {
            let [r_r, v_r] = cfg.u_r;
            let v_exact = hugoniot_v(&p, u_l, r_r, Family::One).unwrap();
            assert!((v_r - v_exact).abs() < 1e-9, "r_r = {r_r}");
        }
    }

    #[test]
    fn sharp_front_recipe_is_conserving_data() {
        let p = Potential::quintic_fast();
        let (_, cfg) = &recipe_configs(RecipeName::FastSharpFront)[0];
        let [r_r, v_r] = cfg.u_r;
        let j = fpulab_core::conservative::jfunc(&p, 2.0, r_r).unwrap();
        assert!(j.abs() < 1e-8, "J = {j:e}");
        let c = rh_speed(&p, 2.0, r_r, Family::One).unwrap();
        assert!((c.abs() - 1.5025333664).abs() < 1e-6);
        let v_exact = hugoniot_v(&p, State::new(2.0, 0.0), r_r, Family::One).unwrap();
        assert!((v_r - v_exact).abs() < 1e-6);
    }

    #[test]
    fn subsonic_front_recipe_is_conserving_data() {
        let p = Potential::quintic_slow();
        let (_, cfg) = &recipe_configs(RecipeName::SlowSubsonicFront)[0];
        let [r_r, v_r] = cfg.u_r;
        assert!(fpulab_core::conservative::jfunc(&p, 4.0, r_r).unwrap().abs() < 1e-8);
        let v_exact = hugoniot_v(&p, State::new(4.0, 0.0), r_r, Family::Two).unwrap();
        assert!((v_r - v_exact).abs() < 1e-6);
        // Subsonic: |c| below both end sound speeds.
        let c = rh_speed(&p, 4.0, r_r, Family::Two).unwrap().abs();
        assert!(c < p.sound_speed(4.0).unwrap());
        assert!(c < p.sound_speed(r_r).unwrap());
    }
}
