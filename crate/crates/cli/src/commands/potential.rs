//! `potential`: inspect the built-in potential catalogue.

use fpulab_core::potential::TurningPoint;
use fpulab_core::{Potential, Result};
use serde::Serialize;

/// Machine-readable description of one potential.
#[derive(Debug, Serialize)]
pub struct PotentialInfo {
    pub name: String,
    pub eval_domain: (f64, f64),
    pub hyperbolic_core: (f64, f64),
    pub turning_points: Vec<TurningPoint>,
}

pub fn info(name: &str) -> Result<PotentialInfo> {
    let p = Potential::by_name(name)?;
    let core = p.hyperbolic_core();
    Ok(PotentialInfo {
        name: p.name().to_string(),
        eval_domain: p.eval_domain(),
        hyperbolic_core: core,
        turning_points: p.turning_points(core)?,
    })
}

pub fn run_list() -> Result<()> {
    for name in Potential::catalogue() {
        println!("{name}");
    }
    Ok(())
}

pub fn run_info(name: &str) -> Result<()> {
    let info = info(name)?;
    println!("{}", serde_json::to_string_pretty(&info).expect("serializes"));
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn info_reports_turning_points() {
        let fast = info("quintic_fast").unwrap();
        assert_eq!(fast.turning_points.len(), 1);
        assert!((fast.turning_points[0].r_star - (3.0 - 3.0_f64.sqrt())).abs() < 1e-8);
        assert_eq!(fast.turning_points[0].fourth_sign, -1);

        let toda = info("toda").unwrap();
        assert!(toda.turning_points.is_empty());
    }

    #[test]
    fn unknown_name_errors() {
        assert!(info("no_such_potential").is_err());
    }
}
