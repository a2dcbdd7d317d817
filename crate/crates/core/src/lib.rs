//! Secrecy outage analysis for a RIS-aided wiretap channel in which both the
//! legitimate receiver and the eavesdropper select the best port of a planar
//! fluid antenna.
//!
//! The analytic pipeline runs bottom-up:
//! [`numerics`] → [`geometry`] (port grid and sinc correlation) →
//! [`channel`] (CLT surrogates for the per-port gains) → [`copula`]
//! (Gaussian copula on the diagonal) → [`secrecy`] (SNR distributions and
//! the outage probability). [`mc`] is an independent Monte Carlo simulator
//! used as the oracle, and [`cli`] drives parameter sweeps.

pub mod channel;
pub mod cli;
pub mod copula;
pub mod error;
pub mod geometry;
pub mod mc;
pub mod numerics;
pub mod secrecy;

pub use error::{Error, Result};
