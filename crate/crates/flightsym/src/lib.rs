//! Flight-time distributions, mean arrival times and survival probabilities
//! for pairs of non-interacting identical particles.
//!
//! All public quantities are in reduced units: X = sqrt(gamma) x,
//! K = p / (hbar sqrt(gamma)), tau = hbar gamma t / M.

pub mod analysis;
pub mod barrier;
pub mod error;
pub mod flighttime;
pub mod pairstats;
pub mod relkin;
pub mod specfun;
pub mod wavepacket;

pub use error::{Error, Result};
pub use num_complex::Complex64;
