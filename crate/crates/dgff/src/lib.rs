//! Discrete Gaussian free field (DGFF) on finite subregions of Z² with
//! Dirichlet boundary conditions.
//!
//! The field on a region is the mean-zero Gaussian process whose covariance
//! is the Green function of simple random walk killed on the region boundary.
//! This crate provides:
//!
//! - [`lattice`]: boxes, discrete balls, annuli, boundary/interior indexing.
//! - [`walk`]: random-walk potential theory — the potential kernel, harmonic
//!   measure, exact hitting probabilities, Monte Carlo hitting estimators.
//! - [`green`]: exact (dense) and spectral (sine-basis) Green operators and
//!   the Green/potential-kernel identity.
//! - [`sampler`]: spectral and Cholesky field samplers, harmonic extension,
//!   and conditional (Markov-decomposition) sampling.
//! - [`maxima`]: Monte Carlo experiments on the field maximum — moments,
//!   empirical tails, decay-rate fits, variance flatness.
//! - [`compare`]: Gaussian comparison checks — Slepian corollary bound,
//!   nested-domain correlation domination, variance ratios, the monotone
//!   domain bound, FKG positive association.
//!
//! All Monte Carlo drivers draw per-replicate RNG streams keyed by
//! `(seed, replicate)`, so results are bitwise independent of thread count.
//! The `parallel` feature (default) runs replicates on rayon; disabling it
//! yields a sequential build with identical output.

pub mod compare;
pub mod error;
pub mod fst;
pub mod green;
pub mod lattice;
pub mod maxima;
pub mod rng;
pub mod sampler;
pub mod solve;
pub mod stats;
pub mod walk;

pub mod par;

pub use error::{Error, Result};
pub use lattice::{build_ball, build_box, neighbors, DiscreteBall, Region, Vertex};
