//! Schmidt-number evaluation for two-photon states from parametric
//! down-conversion (PDC).
//!
//! The Schmidt number K of a biphoton amplitude psi(w1, w2), with
//! w = (q_x, q_y, Omega) a transverse-wavevector/frequency point, equals
//! N^2/B where N is the squared norm of psi and B the squared norm of the
//! single-photon reduced kernel. This crate evaluates K three ways:
//!
//! * `schmidt::schmidt_mc` - importance-sampled Monte Carlo of the exact
//!   6-D (N) and 12-D (B) integrals, in 1D/2D/3D models;
//! * `schmidt::schmidt_npwpa_integral` - the factorized formula valid for
//!   a nearly plane-wave pump (deterministic quadrature);
//! * `schmidt::schmidt_analytic` - closed-form box-function branches.
//!
//! Dispersion comes from empirical Sellmeier sets for beta barium borate
//! (`dispersion`), the pump is Gaussian (`pump`), and an independent
//! grid-SVD oracle (`oracle`) validates the Monte Carlo path on small
//! instances. The `pdc-schmidt` binary drives parameter sweeps and writes
//! CSV; see the repository README.

pub mod config;
pub mod dispersion;
pub mod mc;
pub mod oracle;
pub mod phasematch;
pub mod pump;
pub mod quad;
pub mod run;
pub mod schmidt;
pub mod sellmeier;

pub use dispersion::{CrystalConfig, DispersionScales, Tuning};
pub use mc::{McEstimate, McParams, Proposal, SamplerSpec};
pub use phasematch::{BandwidthLimits, Dimension, PhaseMatchModel, SpectralPoint};
pub use pump::PumpConfig;
pub use schmidt::{Method, MismatchForm, ModelSpec, SchmidtResult};
