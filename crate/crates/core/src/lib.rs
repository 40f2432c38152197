//! Multi-output Gaussian-process kernels defined through their spectral
//! densities.
//!
//! The central object is the Minecraft kernel: a spectral mixture whose
//! components are disjoint axis-aligned blocks in frequency space, each
//! carrying a positive semi-definite amplitude matrix across outputs. Unlike
//! multi-output Gaussian spectral mixtures it can express any coherence
//! between channels. The crate also ships the Gaussian baseline, Matérn and
//! LMC targets, a change-point composition, exact GP inference, spectral
//! projection and marginal-likelihood fitting.

pub mod cli;
pub mod config;
pub mod data;
pub mod error;
pub mod fit;
pub mod gp;
pub mod kernels;
pub mod numerics;
pub mod spectral;

pub use error::{Error, Result};

/// Library version as recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
