//! Numerical laboratory for Riemann problems in convex Fermi-Pasta-Ulam
//! chains and their macroscopic p-system limit.
//!
//! The crate provides:
//!
//! - a catalogue of interaction potentials with closed-form derivatives
//!   ([`potential`]),
//! - exact wave-curve machinery and a classical Riemann solver for the
//!   p-system ([`psystem`]),
//! - analysis of the energy-conserving shock locus ([`conservative`]),
//! - non-classical Riemann solvers with conservative or maximally
//!   dissipative shocks ([`nonclassical`]),
//! - a symplectic integrator for finite particle chains ([`lattice`]),
//! - mesoscopic diagnostics comparing chain simulations against
//!   continuum predictions ([`mesoscope`]).

pub mod conservative;
pub mod error;
pub mod lattice;
pub mod mesoscope;
pub mod nonclassical;
pub mod numerics;
pub mod potential;
pub mod psystem;

pub use error::{Error, Result};
pub use potential::{Potential, PotentialKind};
pub use psystem::{Family, RiemannSolution, ShockClass, State, Wave, WaveKind};
