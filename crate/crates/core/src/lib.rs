//! Bernstein Linear Unit (BerLU) and Bernstein-polynomial smoothing of
//! piecewise-linear activations.
//!
//! The crate is `no_std` (it needs `alloc`) and deterministic: all transcendental
//! functions go through [`libm`] and all randomness through seeded ChaCha
//! streams, so results are reproducible bit for bit across platforms.
//!
//! - [`activations`]: closed-form forward and gradient evaluation for BerLU and
//!   the baseline activations.
//! - [`bernstein`]: control-point solve and De Casteljau evaluation for
//!   mollifying arbitrary piecewise-linear functions.
//! - [`analysis`]: Lipschitz estimation, gradient checking, critical
//!   initialization and the depth-correlation probe.
//! - [`trainer`]: dense networks with learnable slopes, AdamW, warmup + cosine
//!   schedule and gradient clipping.
//! - [`data`]: synthetic datasets and IDX decoding.
//!
//! ```
//! use berlu_core::{ActivationSpec, BerLUParams};
//!
//! let p = BerLUParams::new(0.01, 0.01).unwrap();
//! assert_eq!(p.value(1.0), 1.0);
//! assert!((p.value(0.0) - 0.002475).abs() < 1e-15);
//! assert_eq!(ActivationSpec::BerLU(p).dx(-1.0), 0.01);
//! ```

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod activations;
pub mod analysis;
pub mod bernstein;
pub mod data;
mod error;
pub mod matrix;
pub mod trainer;

pub use activations::{ActivationSpec, BerLUParams, NumericBuffer};
pub use bernstein::{BernsteinTransition, PiecewiseLinear, SmoothedActivation};
pub use data::Dataset;
pub use error::{Error, Result};
pub use matrix::Matrix;
pub use trainer::{DenseNet, RunReport, TrainConfig};
