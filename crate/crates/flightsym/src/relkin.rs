//! Free relativistic packets: dispersion-free photons and steepest-descent
//! spin-up electrons.
//!
//! The electron packet is centred at X_i + beta kappa tau (group velocity) and
//! spreads with the factor (1 + i tau / gamma^2). Position-independent phases
//! are dropped; they cancel in every one-particle density.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::pairstats::{ExchangeStatistics, ParticlePair};
use crate::wavepacket::{check_tau, CoherentState, PI_QUARTER_INV};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RelativisticState {
    pub center_x: f64,
    pub speed_beta: f64,
    pub lorentz_gamma: f64,
    /// mc / (hbar sqrt(gamma_width)): the reduced speed of light.
    pub compton_ratio: f64,
    pub wavenumber_k: f64,
    pub spinor: [Complex64; 2],
}

impl RelativisticState {
    pub fn new(center_x: f64, speed_beta: f64, compton_ratio: f64) -> Result<Self> {
        if !(speed_beta > 0.0 && speed_beta < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "beta must lie in (0, 1), got {speed_beta}"
            )));
        }
        if !(compton_ratio.is_finite() && compton_ratio > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "kappa must be positive, got {compton_ratio}"
            )));
        }
        if !center_x.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "non-finite centre {center_x}"
            )));
        }
        let gamma = 1.0 / ((1.0 - speed_beta) * (1.0 + speed_beta)).sqrt();
        let lower = gamma * speed_beta / (1.0 + gamma);
        let n = (1.0 + lower * lower).sqrt();
        Ok(Self {
            center_x,
            speed_beta,
            lorentz_gamma: gamma,
            compton_ratio,
            wavenumber_k: gamma * speed_beta * compton_ratio,
            spinor: [Complex64::new(1.0 / n, 0.0), Complex64::new(lower / n, 0.0)],
        })
    }

    /// Lower spinor component relative to the upper one, before normalization.
    pub fn spinor_ratio(&self) -> f64 {
        self.lorentz_gamma * self.speed_beta / (1.0 + self.lorentz_gamma)
    }

    pub fn group_velocity(&self) -> f64 {
        self.speed_beta * self.compton_ratio
    }

    pub fn initial_state(&self) -> CoherentState {
        CoherentState::new(self.center_x, self.wavenumber_k)
    }

    fn dispersion_time(&self, tau: f64) -> f64 {
        tau / (self.lorentz_gamma * self.lorentz_gamma)
    }

    /// Scalar envelope multiplying the spinor.
    fn electron_scalar(&self, x: f64, tau: f64) -> Complex64 {
        let a = Complex64::new(1.0, self.dispersion_time(tau));
        let y = x - self.center_x - self.group_velocity() * tau;
        let expo = -0.5 * y * y / a + Complex64::new(0.0, self.wavenumber_k * (x - self.center_x));
        PI_QUARTER_INV / a.sqrt() * expo.exp()
    }

    fn photon_scalar(&self, x: f64, tau: f64) -> Complex64 {
        let y = x - self.center_x - self.compton_ratio * tau;
        PI_QUARTER_INV * Complex64::new(-0.5 * y * y, self.wavenumber_k * y).exp()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Species {
    Photon,
    Electron,
}

impl Species {
    pub fn tag(self) -> &'static str {
        match self {
            Self::Photon => "photon",
            Self::Electron => "electron",
        }
    }
}

pub fn electron_psi(s: &RelativisticState, x: f64, tau: f64) -> Result<[Complex64; 2]> {
    check_tau(tau)?;
    let f = s.electron_scalar(x, tau);
    Ok([s.spinor[0] * f, s.spinor[1] * f])
}

pub fn electron_density(s: &RelativisticState, x: f64, tau: f64) -> Result<f64> {
    let [a, b] = electron_psi(s, x, tau)?;
    Ok(a.norm_sqr() + b.norm_sqr())
}

pub fn photon_density(s: &RelativisticState, x: f64, tau: f64) -> Result<f64> {
    check_tau(tau)?;
    let y = x - s.center_x - s.compton_ratio * tau;
    Ok((-y * y).exp() / PI.sqrt())
}

/// u1^dagger u2
pub fn spinor_overlap(a: &RelativisticState, b: &RelativisticState) -> Complex64 {
    a.spinor[0].conj() * b.spinor[0] + a.spinor[1].conj() * b.spinor[1]
}

/// Gaussian envelope centre, complex width parameter and wavenumber of a packet at tau.
fn envelope(s: &RelativisticState, species: Species, tau: f64) -> (f64, Complex64, f64) {
    match species {
        Species::Electron => (
            s.center_x + s.group_velocity() * tau,
            Complex64::new(1.0, s.dispersion_time(tau)),
            s.wavenumber_k,
        ),
        Species::Photon => (
            s.center_x + s.compton_ratio * tau,
            Complex64::new(1.0, 0.0),
            s.wavenumber_k,
        ),
    }
}

/// int conj(phi_b) phi_a dx for the scalar envelopes, in closed form.
fn scalar_overlap(
    a: &RelativisticState,
    b: &RelativisticState,
    species: Species,
    tau: f64,
) -> Complex64 {
    let (ma, wa, ka) = envelope(a, species, tau);
    let (mb, wb, kb) = envelope(b, species, tau);
    let (ra, rb) = match species {
        // photon phase is measured from the moving centre
        Species::Photon => (ma, mb),
        Species::Electron => (a.center_x, b.center_x),
    };
    let wbc = wb.conj();
    let alpha = 0.5 / wa + 0.5 / wbc;
    let beta = ma / wa + mb / wbc + Complex64::new(0.0, ka - kb);
    let gamma =
        -ma * ma / (2.0 * wa) - mb * mb / (2.0 * wbc) + Complex64::new(0.0, -ka * ra + kb * rb);
    let pref = PI_QUARTER_INV * PI_QUARTER_INV / (wa.sqrt() * wbc.sqrt());
    pref * (PI / alpha).sqrt() * (beta * beta / (4.0 * alpha) + gamma).exp()
}

fn scalar(s: &RelativisticState, species: Species, x: f64, tau: f64) -> Complex64 {
    match species {
        Species::Electron => s.electron_scalar(x, tau),
        Species::Photon => s.photon_scalar(x, tau),
    }
}

/// Symmetrized one-particle density of a free relativistic pair at `x`.
///
/// Fermion and boson cross terms carry |u1^dagger u2|^2 for electrons. The
/// steepest-descent envelopes of packets with different gamma are not
/// mutually unitary, so the density is normalized with the instantaneous
/// pair norm.
pub fn rel_pair_screen_density(
    pair: (&RelativisticState, &RelativisticState),
    species: Species,
    stats: ExchangeStatistics,
    x: f64,
    tau: f64,
) -> Result<f64> {
    check_tau(tau)?;
    let (s1, s2) = pair;
    if s1.compton_ratio != s2.compton_ratio {
        return Err(Error::InvalidArgument(format!(
            "mismatched kappa: {} vs {}",
            s1.compton_ratio, s2.compton_ratio
        )));
    }
    let f1 = scalar(s1, species, x, tau);
    let f2 = scalar(s2, species, x, tau);
    let direct = f1.norm_sqr() + f2.norm_sqr();
    let h = stats.h();
    if h == 0.0 {
        return Ok(0.5 * direct);
    }
    let spin = match species {
        Species::Electron => spinor_overlap(s1, s2).norm_sqr(),
        Species::Photon => 1.0,
    };
    let o21 = scalar_overlap(s1, s2, species, tau);
    let cross = 2.0 * h * spin * (f1.conj() * f2 * o21).re;
    let norm = 2.0 * (1.0 + h * spin * o21.norm_sqr());
    if norm < 1e-300 {
        return Err(Error::DegeneratePair(norm));
    }
    Ok(((direct + cross) / norm).max(0.0))
}

/// Electron pair density that would be seen if its initial profile travelled
/// rigidly at the speed of light.
pub fn rigid_reference_density(
    pair: (&RelativisticState, &RelativisticState),
    stats: ExchangeStatistics,
    x: f64,
    tau: f64,
) -> Result<f64> {
    check_tau(tau)?;
    rel_pair_screen_density(
        pair,
        Species::Electron,
        stats,
        x - pair.0.compton_ratio * tau,
        0.0,
    )
}

/// Non-relativistic pair with the same initial centres and wavenumbers.
pub fn initial_pair(
    pair: (&RelativisticState, &RelativisticState),
    stats: ExchangeStatistics,
) -> ParticlePair {
    ParticlePair::new(pair.0.initial_state(), pair.1.initial_state(), stats)
}
