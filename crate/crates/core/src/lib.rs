//! Link-level Monte Carlo simulator for the WiMAX physical layer.
//!
//! Three transmit/receive chains are provided and compared on a BER-vs-Eb/N0
//! sweep:
//!
//! * `baseline` — adaptive-modulation OFDM over AWGN or flat Rayleigh fading,
//! * `stbc` — the same OFDM chain with 2x2 Alamouti transmit diversity,
//! * `turbo` — the same OFDM chain with a rate-1/3 parallel-concatenated
//!   turbo code and iterative Log-MAP decoding.
//!
//! All signal-processing math is generic over the scalar type through the
//! [`Scalar`] trait (`f32` or `f64`); the simulation harness and CLI use
//! `f64` via the [`Real`] / [`Cplx`] aliases.

pub mod amc;
pub mod channel;
mod error;
pub mod math;
pub mod modem;
pub mod ofdm;
mod scalar;
pub mod sim;
pub mod stbc;
pub mod turbo;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// Default concrete scalar used by the harness and CLI.
pub type Real = f64;
/// Single-precision scalar, for callers trading accuracy for speed.
pub type Real32 = f32;
/// Complex sample in the default precision.
pub type Cplx = num_complex::Complex<Real>;
