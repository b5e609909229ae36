//! Scattering of coherent states on a point barrier at the origin.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::pairstats::ParticlePair;
use crate::specfun::faddeeva_w;
use crate::wavepacket::{check_tau, CoherentState, PI_QUARTER_INV};

/// How the dimensionless strength entering the closed-form delays is formed
/// from the reduced coupling.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum EpsilonConvention {
    /// eps_i = coupling / K
    #[default]
    AlphaOfK,
    /// eps_i = coupling
    ReducedCoupling,
}

impl EpsilonConvention {
    pub fn tag(self) -> &'static str {
        match self {
            Self::AlphaOfK => "alpha_of_k",
            Self::ReducedCoupling => "reduced_coupling",
        }
    }

    pub fn from_tag(s: &str) -> Option<Self> {
        match s.trim() {
            "alpha_of_k" => Some(Self::AlphaOfK),
            "reduced_coupling" => Some(Self::ReducedCoupling),
            _ => None,
        }
    }
}

/// Evaluation route for the single-particle scattered packets.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum Propagator {
    #[default]
    Asymptotic,
    Exact,
}

impl Propagator {
    pub fn tag(self) -> &'static str {
        match self {
            Self::Asymptotic => "asymptotic",
            Self::Exact => "exact",
        }
    }

    pub fn from_tag(s: &str) -> Option<Self> {
        match s.trim() {
            "asymptotic" => Some(Self::Asymptotic),
            "exact" => Some(Self::Exact),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Channel {
    Free,
    Transmitted,
    Reflected,
}

impl Channel {
    pub fn tag(self) -> &'static str {
        match self {
            Self::Free => "free",
            Self::Transmitted => "T",
            Self::Reflected => "R",
        }
    }

    pub fn from_tag(s: &str) -> Option<Self> {
        match s.trim() {
            "free" => Some(Self::Free),
            "T" | "t" | "transmitted" => Some(Self::Transmitted),
            "R" | "r" | "reflected" => Some(Self::Reflected),
            _ => None,
        }
    }
}

/// Point barrier with reduced coupling c; the momentum-dependent strength is alpha = c/K.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DeltaBarrier {
    pub coupling: f64,
}

impl DeltaBarrier {
    pub const fn new(coupling: f64) -> Self {
        Self { coupling }
    }

    pub fn alpha(&self, k: f64) -> f64 {
        self.coupling / k
    }

    pub fn epsilon_i(&self, k: f64, conv: EpsilonConvention) -> f64 {
        match conv {
            EpsilonConvention::AlphaOfK => self.alpha(k),
            EpsilonConvention::ReducedCoupling => self.coupling,
        }
    }
}

fn check_k(k: f64) -> Result<()> {
    if k.is_finite() && k > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "reduced momentum must be positive, got {k}"
        )))
    }
}

pub fn reflection_amp(k: f64, barrier: &DeltaBarrier) -> Result<Complex64> {
    check_k(k)?;
    let a = barrier.alpha(k);
    Ok(Complex64::new(0.0, -a) / Complex64::new(1.0, a))
}

pub fn transmission_amp(k: f64, barrier: &DeltaBarrier) -> Result<Complex64> {
    check_k(k)?;
    Ok(1.0 / Complex64::new(1.0, barrier.alpha(k)))
}

/// Barrier-induced shift of the stationary-phase arrival time.
pub fn phase_delay(k: f64, barrier: &DeltaBarrier, conv: EpsilonConvention) -> Result<f64> {
    check_k(k)?;
    let e = barrier.epsilon_i(k, conv);
    Ok(e / (k * k * (1.0 + e * e)))
}

pub fn imag_time_t(k: f64, barrier: &DeltaBarrier, conv: EpsilonConvention) -> Result<f64> {
    check_k(k)?;
    let e = barrier.epsilon_i(k, conv);
    Ok(e * e / (k * k * (1.0 + e * e)))
}

pub fn imag_time_r(k: f64, barrier: &DeltaBarrier, conv: EpsilonConvention) -> Result<f64> {
    check_k(k)?;
    let e = barrier.epsilon_i(k, conv);
    Ok(-1.0 / (k * k * (1.0 + e * e)))
}

/// Exponent G(tau) whose minimum locates the transmitted peak at the screen
/// reached freely at `tau_fp`.
pub fn filter_exponent(k: f64, eps_i: f64, tau_fp: f64, tau: f64) -> f64 {
    k * k * (tau_fp - tau).powi(2) / (1.0 + tau * tau)
        + ((eps_i * tau - 1.0).powi(2) + (tau_fp + eps_i).powi(2)).ln()
}

pub fn filter_exponent_derivative(k: f64, eps_i: f64, tau_fp: f64, tau: f64) -> f64 {
    let q = 1.0 + tau * tau;
    let d = tau_fp - tau;
    -2.0 * k * k * d / q - 2.0 * tau * k * k * d * d / (q * q)
        + 2.0 * eps_i * (eps_i * tau - 1.0)
            / ((eps_i * tau - 1.0).powi(2) + (tau_fp + eps_i).powi(2))
}

/// Advance of the transmitted peak caused by momentum filtering.
pub fn filter_shift(
    k: f64,
    barrier: &DeltaBarrier,
    tau_fp: f64,
    conv: EpsilonConvention,
) -> Result<f64> {
    if !(tau_fp.is_finite() && tau_fp > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "tau_fp must be positive, got {tau_fp}"
        )));
    }
    imag_time_t(k, barrier, conv)
}

/// One coherent state scattered on the barrier, frozen at a given tau so that
/// repeated evaluation over positions reuses the tau-dependent factors.
#[derive(Clone, Copy, Debug)]
pub(crate) struct ScatteredPacket {
    xi: f64,
    k: f64,
    c: f64,
    a: Complex64,
    inv_a: Complex64,
    sqrt_a: Complex64,
    pref: Complex64,
    exact: bool,
}

impl ScatteredPacket {
    pub(crate) fn new(
        s: &CoherentState,
        barrier: &DeltaBarrier,
        prop: Propagator,
        tau: f64,
    ) -> Self {
        let a = Complex64::new(1.0, tau);
        let sqrt_a = a.sqrt();
        Self {
            xi: s.center_x,
            k: s.center_k,
            c: barrier.coupling,
            a,
            inv_a: 1.0 / a,
            sqrt_a,
            pref: PI_QUARTER_INV / sqrt_a,
            exact: prop == Propagator::Exact,
        }
    }

    fn free_exponent(&self, x: f64) -> Complex64 {
        let d = Complex64::new(x - self.xi, -self.k);
        -0.5 * d * d * self.inv_a - 0.5 * self.k * self.k
    }

    pub(crate) fn free(&self, x: f64) -> Complex64 {
        self.pref * self.free_exponent(x).exp()
    }

    /// exp(expo) w(zeta) without forming exp(-zeta^2) on its own.
    fn exp_times_w(&self, expo: Complex64, zeta: Complex64) -> Complex64 {
        if zeta.im >= 0.0 {
            let w = faddeeva_w(zeta).unwrap_or_default();
            expo.exp() * w
        } else {
            let w = faddeeva_w(-zeta).unwrap_or_default();
            2.0 * (expo - zeta * zeta).exp() - expo.exp() * w
        }
    }

    fn erfc_weight(&self) -> Complex64 {
        self.c * (PI / 2.0).sqrt() * self.sqrt_a
    }

    pub(crate) fn transmitted(&self, x: f64) -> Complex64 {
        let e = self.free_exponent(x);
        if self.c == 0.0 {
            return self.pref * e.exp();
        }
        let z = Complex64::new(self.k, x - self.xi) * self.inv_a;
        if self.exact {
            let zeta = (self.a / 2.0).sqrt() * (z + Complex64::new(0.0, self.c));
            self.pref * (e.exp() - self.erfc_weight() * self.exp_times_w(e, zeta))
        } else {
            self.pref * e.exp() * z / (z + Complex64::new(0.0, self.c))
        }
    }

    pub(crate) fn reflected(&self, x: f64) -> Complex64 {
        let e = self.free_exponent(x);
        if self.c == 0.0 {
            return self.pref * e.exp();
        }
        let em = self.free_exponent(-x);
        let z = Complex64::new(self.k, -(x + self.xi)) * self.inv_a;
        let mirror = if self.exact {
            let zeta = (self.a / 2.0).sqrt() * (z + Complex64::new(0.0, self.c));
            self.erfc_weight() * self.exp_times_w(em, zeta)
        } else {
            em.exp() * self.c / (self.c - Complex64::new(0.0, 1.0) * z)
        };
        self.pref * (e.exp() - mirror)
    }

    /// Transmitted branch on x >= 0, reflected branch on x < 0.
    pub(crate) fn piecewise(&self, x: f64) -> Complex64 {
        if x >= 0.0 {
            self.transmitted(x)
        } else {
            self.reflected(x)
        }
    }
}

fn check_side(x: f64, transmitted: bool) -> Result<()> {
    let ok = if transmitted { x >= 0.0 } else { x <= 0.0 };
    if ok && x.is_finite() {
        Ok(())
    } else {
        let side = if transmitted { "X >= 0" } else { "X <= 0" };
        Err(Error::InvalidArgument(format!(
            "position {x} outside the {side} half-line"
        )))
    }
}

pub fn psi_t_exact(
    s: &CoherentState,
    barrier: &DeltaBarrier,
    x: f64,
    tau: f64,
) -> Result<Complex64> {
    check_tau(tau)?;
    check_side(x, true)?;
    Ok(ScatteredPacket::new(s, barrier, Propagator::Exact, tau).transmitted(x))
}

pub fn psi_r_exact(
    s: &CoherentState,
    barrier: &DeltaBarrier,
    x: f64,
    tau: f64,
) -> Result<Complex64> {
    check_tau(tau)?;
    check_side(x, false)?;
    Ok(ScatteredPacket::new(s, barrier, Propagator::Exact, tau).reflected(x))
}

pub fn psi_t_asym(
    s: &CoherentState,
    barrier: &DeltaBarrier,
    x: f64,
    tau: f64,
) -> Result<Complex64> {
    check_tau(tau)?;
    check_side(x, true)?;
    Ok(ScatteredPacket::new(s, barrier, Propagator::Asymptotic, tau).transmitted(x))
}

pub fn psi_r_asym(
    s: &CoherentState,
    barrier: &DeltaBarrier,
    x: f64,
    tau: f64,
) -> Result<Complex64> {
    check_tau(tau)?;
    check_side(x, false)?;
    Ok(ScatteredPacket::new(s, barrier, Propagator::Asymptotic, tau).reflected(x))
}

/// Long-time transmission factor |Z_T/(Z_T + i c)|^2 in closed form.
pub fn transmission_factor_sq(s: &CoherentState, barrier: &DeltaBarrier, x: f64, tau: f64) -> f64 {
    let k = s.center_k;
    let d = x - s.center_x;
    let c = barrier.coupling;
    (k * k + d * d) / ((k - c * tau).powi(2) + (d + c).powi(2))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScatteredPair {
    pub pair: ParticlePair,
    pub barrier: DeltaBarrier,
    pub channel: Channel,
    pub propagator: Propagator,
}

impl ScatteredPair {
    pub fn new(pair: ParticlePair, barrier: DeltaBarrier, channel: Channel) -> Self {
        Self {
            pair,
            barrier,
            channel,
            propagator: Propagator::Asymptotic,
        }
    }

    pub fn with_propagator(self, propagator: Propagator) -> Self {
        Self { propagator, ..self }
    }

    pub(crate) fn check_screen_side(&self, x: f64) -> Result<()> {
        match self.channel {
            Channel::Transmitted => check_side(x, true),
            Channel::Reflected => check_side(x, false),
            Channel::Free => Err(Error::InvalidArgument(
                "scattered pair needs a T or R channel".into(),
            )),
        }
    }
}

/// Unnormalized symmetrized amplitude with the detected particle at `x` and
/// its companion at `z`.
pub fn pair_scattered_psi(sp: &ScatteredPair, x: f64, z: f64, tau: f64) -> Result<Complex64> {
    check_tau(tau)?;
    sp.check_screen_side(x)?;
    let p1 = ScatteredPacket::new(&sp.pair.state1, &sp.barrier, sp.propagator, tau);
    let p2 = ScatteredPacket::new(&sp.pair.state2, &sp.barrier, sp.propagator, tau);
    let (a, b) = match sp.channel {
        Channel::Transmitted => (p1.transmitted(x), p2.transmitted(x)),
        _ => (p1.reflected(x), p2.reflected(x)),
    };
    Ok(a * p2.piecewise(z) + sp.pair.stats.h() * b * p1.piecewise(z))
}
