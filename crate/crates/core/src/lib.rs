//! Fréchet means on the circle and the torus, finite sample smeariness
//! (FSS), and quantile / bootstrap tests for intrinsic means.
//!
//! The crate is organised bottom-up:
//!
//! * [`geometry`]: angles, arc-length and product distances, signed charts.
//! * [`mean`]: exact sample Fréchet means and empirical Fréchet moments.
//! * [`distributions`]: the circular families used throughout the
//!   simulations (von Mises mixtures with a mirrored cut, power and
//!   logarithmically smeary laws, atom-at-zero constructions).
//! * [`fss`]: bootstrap scale of FSS and the test for its presence.
//! * [`inference`]: chi-square and bootstrap one-/two-sample mean tests,
//!   Benjamini–Hochberg adjustment.
//! * [`simlab`]: seeded Monte Carlo experiments.
//! * [`windpipe`]: wind-direction CSV ingestion and the yearly analysis.

pub mod distributions;
pub mod error;
pub mod fss;
pub mod geometry;
pub mod inference;
pub mod mean;
pub mod quad;
mod resample;
pub mod rng;
pub mod simlab;
pub mod special;
pub mod windpipe;

pub use error::{Error, Result};
pub use geometry::{Angle, TorusPoint};
pub use mean::{CircleSample, TorusSample};
