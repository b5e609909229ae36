//! Reduced units, Gaussian coherent states and their free evolution.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// pi^(-1/4)
pub const PI_QUARTER_INV: f64 = 0.751_125_544_464_942_5;

/// Conversion between laboratory and reduced coordinates for a packet of
/// initial width 1/sqrt(gamma_width).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReducedUnits {
    pub gamma_width: f64,
    pub mass: f64,
    pub hbar: f64,
}

impl ReducedUnits {
    pub fn new(gamma_width: f64, mass: f64, hbar: f64) -> Result<Self> {
        for (name, v) in [("gamma_width", gamma_width), ("mass", mass), ("hbar", hbar)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidArgument(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        Ok(Self {
            gamma_width,
            mass,
            hbar,
        })
    }

    pub fn position_to_reduced(&self, x: f64) -> f64 {
        self.gamma_width.sqrt() * x
    }

    pub fn position_from_reduced(&self, x: f64) -> f64 {
        x / self.gamma_width.sqrt()
    }

    pub fn momentum_to_reduced(&self, p: f64) -> f64 {
        p / (self.hbar * self.gamma_width.sqrt())
    }

    pub fn momentum_from_reduced(&self, k: f64) -> f64 {
        k * self.hbar * self.gamma_width.sqrt()
    }

    pub fn time_to_reduced(&self, t: f64) -> f64 {
        self.hbar * self.gamma_width * t / self.mass
    }

    pub fn time_from_reduced(&self, tau: f64) -> f64 {
        tau * self.mass / (self.hbar * self.gamma_width)
    }
}

/// Minimum-uncertainty Gaussian centred at `center_x` with mean momentum `center_k`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoherentState {
    pub center_x: f64,
    pub center_k: f64,
}

impl CoherentState {
    pub const fn new(center_x: f64, center_k: f64) -> Self {
        Self { center_x, center_k }
    }

    /// Centre of the freely evolving density.
    pub fn center_at(&self, tau: f64) -> f64 {
        self.center_x + self.center_k * tau
    }
}

pub(crate) fn check_tau(tau: f64) -> Result<()> {
    if tau.is_finite() && tau >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "tau must be finite and non-negative, got {tau}"
        )))
    }
}

/// Prefactor (1+i tau)^(-1/2) pi^(-1/4) and exponent of the free packet, kept
/// apart so callers can merge further exponentials before calling exp.
pub(crate) fn free_psi_parts(s: &CoherentState, x: f64, tau: f64) -> (Complex64, Complex64) {
    let a = Complex64::new(1.0, tau);
    let sa = a.sqrt();
    debug_assert!(sa.re > 0.0);
    let d = Complex64::new(x - s.center_x, -s.center_k);
    let expo = -0.5 * d * d / a - 0.5 * s.center_k * s.center_k;
    (PI_QUARTER_INV / sa, expo)
}

pub(crate) fn free_psi_raw(s: &CoherentState, x: f64, tau: f64) -> Complex64 {
    let (pref, expo) = free_psi_parts(s, x, tau);
    pref * expo.exp()
}

pub(crate) fn free_density_raw(s: &CoherentState, x: f64, tau: f64) -> f64 {
    let q = 1.0 + tau * tau;
    let y = x - s.center_at(tau);
    (-y * y / q).exp() / (PI * q).sqrt()
}

/// Freely evolved wavefunction in reduced units.
pub fn free_psi(s: &CoherentState, x: f64, tau: f64) -> Result<Complex64> {
    check_tau(tau)?;
    Ok(free_psi_raw(s, x, tau))
}

/// |free_psi|^2 from its closed form.
pub fn free_density(s: &CoherentState, x: f64, tau: f64) -> Result<f64> {
    check_tau(tau)?;
    Ok(free_density_raw(s, x, tau))
}

/// Overlap of the evolved state with the initial one.
pub fn survival_single(s: &CoherentState, tau: f64) -> Result<Complex64> {
    check_tau(tau)?;
    let b = Complex64::new(2.0, tau);
    let k2 = s.center_k * s.center_k;
    Ok((2.0 / b).sqrt() * (Complex64::new(0.0, -tau * k2) / b).exp())
}
