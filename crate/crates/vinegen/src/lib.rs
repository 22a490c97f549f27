//! Nonparametric vine copula estimation and sampling for tabular data, plus
//! a small dense autoencoder and the composed generative pipeline: train an
//! autoencoder, fit kernel marginals and a vine copula on the latent codes,
//! then sample the vine and decode.
//!
//! The pieces are usable on their own:
//!
//! - [`marginals`]: univariate kernel densities with CDF/quantile tables and
//!   the probability integral transform.
//! - [`bicop`]: bivariate copulas (independence, Gaussian, transformation
//!   kernel estimator) with h-functions and conditional inversion.
//! - [`vine`]: R-vine structure selection, truncated sequential fitting,
//!   joint log-density, and inverse-Rosenblatt sampling.
//! - [`autoencoder`]: dense autoencoder trained with Adam on binary
//!   cross-entropy, with an analytic-vs-numeric gradient checker.
//! - [`pipeline`]: the composed generative model, conditional per-class
//!   variants, and latent interpolation.
//! - [`metrics`]: MMD, coverage, mean log-likelihood, and a nearest-neighbor
//!   classifier two-sample test.
//! - [`datasets`]: seeded toy-data generators, IDX image loading, CSV I/O.
//! - [`bundle`]: versioned JSON persistence for every model kind.

pub mod autoencoder;
pub mod bicop;
pub mod bundle;
pub mod datasets;
pub mod error;
pub mod marginals;
pub mod metrics;
pub mod pipeline;
pub mod stats;
pub mod vine;

pub use error::{Error, Result};
