//! Dephasing of a Josephson charge qubit through conditional squeezing of a
//! coupled LC oscillator. Fock-space propagation, Bogoliubov closed forms,
//! Gaussian and full-model oracles, probe currents, and a reproducible runner.
//!
//! Frequencies are angular; dimensionless runs measure them in units of the
//! oscillator frequency and times in units of its inverse.

// NaN inputs must fail validation, hence `!(x <= limit)` comparisons.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod decoherence;
pub mod error;
pub mod exec;
pub mod fock;
pub mod hamiltonians;
pub mod observables;
pub mod output;
pub mod params;
pub mod runner;

pub use config::{parse_config, RunConfig};
pub use decoherence::{
    decoherence_approx, decoherence_exact, decoherence_fock_oracle, decoherence_gaussian_oracle, full_model_coherence,
    jump_metrics, DecoherenceCurve, Method, TimeGrid,
};
pub use error::{Error, Result};
pub use exec::Execution;
pub use fock::{JointState, OscState, OscillatorSpace};
pub use hamiltonians::{schrieffer_wolff_check, squeeze_coefficients, Branch};
pub use params::{derive_params, params_from_dimensionless, CapacitanceConvention, CircuitParams, ModelParams};
pub use runner::{run_scenario, RunManifest, RunOptions};
