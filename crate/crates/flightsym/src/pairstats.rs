//! Exchange-symmetrized pairs of coherent states under free evolution.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::wavepacket::{
    check_tau, free_density_raw, free_psi_raw, survival_single, CoherentState,
};

/// Below this value of delta_x^2 + delta_k^2 a fermion pair is treated as coincident.
pub const DEGENERACY_THRESHOLD: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ExchangeStatistics {
    Distinguishable,
    Boson,
    Fermion,
}

impl ExchangeStatistics {
    pub const ALL: [ExchangeStatistics; 3] = [Self::Distinguishable, Self::Boson, Self::Fermion];

    pub fn exchange_factor(self) -> i32 {
        match self {
            Self::Distinguishable => 0,
            Self::Boson => 1,
            Self::Fermion => -1,
        }
    }

    pub fn h(self) -> f64 {
        self.exchange_factor() as f64
    }

    pub fn tag(self) -> &'static str {
        match self {
            Self::Distinguishable => "D",
            Self::Boson => "B",
            Self::Fermion => "F",
        }
    }

    pub fn from_tag(s: &str) -> Option<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "D" | "DISTINGUISHABLE" => Some(Self::Distinguishable),
            "B" | "BOSON" | "BOSONS" => Some(Self::Boson),
            "F" | "FERMION" | "FERMIONS" => Some(Self::Fermion),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ParticlePair {
    pub state1: CoherentState,
    pub state2: CoherentState,
    pub stats: ExchangeStatistics,
}

impl ParticlePair {
    pub fn new(state1: CoherentState, state2: CoherentState, stats: ExchangeStatistics) -> Self {
        Self {
            state1,
            state2,
            stats,
        }
    }

    pub fn with_stats(&self, stats: ExchangeStatistics) -> Self {
        Self { stats, ..*self }
    }

    pub fn swapped(&self) -> Self {
        Self {
            state1: self.state2,
            state2: self.state1,
            stats: self.stats,
        }
    }

    pub fn delta_x(&self) -> f64 {
        self.state2.center_x - self.state1.center_x
    }

    pub fn delta_k(&self) -> f64 {
        self.state2.center_k - self.state1.center_k
    }

    pub fn mean_x(&self) -> f64 {
        0.5 * (self.state1.center_x + self.state2.center_x)
    }

    pub fn mean_k(&self) -> f64 {
        0.5 * (self.state1.center_k + self.state2.center_k)
    }

    /// delta_x^2 + delta_k^2
    pub fn separation_sq(&self) -> f64 {
        self.delta_x().powi(2) + self.delta_k().powi(2)
    }

    pub fn is_degenerate(&self) -> bool {
        self.stats == ExchangeStatistics::Fermion && self.separation_sq() < DEGENERACY_THRESHOLD
    }

    fn check_nondegenerate(&self) -> Result<()> {
        if self.is_degenerate() {
            Err(Error::DegeneratePair(self.separation_sq()))
        } else {
            Ok(())
        }
    }

    /// Coherent-state overlap <1|2> at equal times.
    pub fn overlap(&self) -> Complex64 {
        let dx = self.delta_x();
        let phase = -(self.state1.center_k + self.state2.center_k) * dx / 2.0;
        (-self.separation_sq() / 4.0).exp() * Complex64::from_polar(1.0, phase)
    }
}

/// Squared norm of the symmetrized pair wavefunction; unity for distinguishable particles.
pub fn normalization_sq(pair: &ParticlePair) -> Result<f64> {
    pair.check_nondegenerate()?;
    let half = -pair.separation_sq() / 2.0;
    Ok(match pair.stats {
        ExchangeStatistics::Distinguishable => 1.0,
        ExchangeStatistics::Boson => 2.0 * (1.0 + half.exp()),
        ExchangeStatistics::Fermion => -2.0 * half.exp_m1(),
    })
}

/// Weight 1/N^2 multiplying the one-particle density. Distinguishable pairs use
/// 1/2 so the density is the average over which particle is detected.
pub(crate) fn density_weight(pair: &ParticlePair) -> Result<f64> {
    Ok(match pair.stats {
        ExchangeStatistics::Distinguishable => 0.5,
        _ => 1.0 / normalization_sq(pair)?,
    })
}

/// Symmetrized two-particle amplitude Psi_k(X1, X2; tau).
pub fn pair_psi_free(pair: &ParticlePair, x1: f64, x2: f64, tau: f64) -> Result<Complex64> {
    check_tau(tau)?;
    let n = normalization_sq(pair)?.sqrt();
    let a = free_psi_raw(&pair.state1, x1, tau) * free_psi_raw(&pair.state2, x2, tau);
    let b = free_psi_raw(&pair.state2, x1, tau) * free_psi_raw(&pair.state1, x2, tau);
    Ok((a + pair.stats.h() * b) / n)
}

/// Coincident fermion amplitude at tau = 0 for two packets sharing `s`.
pub fn fermion_coincident_psi(s: &CoherentState, x1: f64, x2: f64) -> Complex64 {
    let u = x1 - s.center_x;
    let v = x2 - s.center_x;
    let expo = Complex64::new(-0.5 * (u * u + v * v), s.center_k * (u + v));
    -(x2 - x1) / PI.sqrt() * expo.exp()
}

/// One-particle density of a freely evolving pair.
pub fn pair_density_free(pair: &ParticlePair, x: f64, tau: f64) -> Result<f64> {
    check_tau(tau)?;
    let w = density_weight(pair)?;
    let s1 = &pair.state1;
    let s2 = &pair.state2;
    let d1 = free_density_raw(s1, x, tau);
    let d2 = free_density_raw(s2, x, tau);
    let h = pair.stats.h();
    if h == 0.0 {
        return Ok(w * (d1 + d2));
    }
    let q = 1.0 + tau * tau;
    let (x1, k1) = (s1.center_x, s1.center_k);
    let (x2, k2) = (s2.center_x, s2.center_k);
    let phi = tau * ((x - x1).powi(2) - k1 * k1) / (2.0 * q)
        - tau * ((x - x2).powi(2) - k2 * k2) / (2.0 * q)
        - k2 * (x - x2) / q
        + (x - x1) * k1 / q;
    let dx = x2 - x1;
    let cross = 2.0
        * (d1 * d2).sqrt()
        * (-pair.separation_sq() / 4.0).exp()
        * (phi - dx * (k1 + k2) / 2.0).cos();
    Ok(w * (d1 + d2 + h * cross))
}

fn require(cond: bool, msg: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InvalidArgument(msg.to_string()))
    }
}

/// Closed form for bosons with equal momenta.
pub fn boson_density_dx(pair: &ParticlePair, x: f64, tau: f64) -> Result<f64> {
    check_tau(tau)?;
    require(
        pair.stats == ExchangeStatistics::Boson,
        "boson_density_dx needs a boson pair",
    )?;
    require(pair.delta_k() == 0.0, "boson_density_dx needs delta_k = 0")?;
    let (xi, ki, d) = (pair.mean_x(), pair.mean_k(), pair.delta_x());
    let q = 1.0 + tau * tau;
    let psi0 = free_density_raw(&CoherentState::new(xi, ki), x, tau);
    let y = x - xi - ki * tau;
    let bracket =
        (d * y / q).cosh() + (-d * d / 4.0).exp() * (tau * d * ((x - xi) - tau * ki) / q).cos();
    Ok(psi0 / (1.0 + (-d * d / 2.0).exp()) * (-d * d / (4.0 * q)).exp() * bracket)
}

/// Closed form for bosons launched from the same point.
pub fn boson_density_dk(pair: &ParticlePair, x: f64, tau: f64) -> Result<f64> {
    check_tau(tau)?;
    require(
        pair.stats == ExchangeStatistics::Boson,
        "boson_density_dk needs a boson pair",
    )?;
    require(pair.delta_x() == 0.0, "boson_density_dk needs delta_x = 0")?;
    let n2 = normalization_sq(pair)?;
    let (xi, ki, d) = (pair.mean_x(), pair.mean_k(), pair.delta_k());
    let q = 1.0 + tau * tau;
    let y = x - xi - ki * tau;
    let env = (-y * y / q - d * d * tau * tau / (4.0 * q)).exp();
    let bracket =
        (d * tau * y / q).cosh() + (-d * d / 4.0).exp() * (d * (tau * ki - (x - xi)) / q).cos();
    Ok(2.0 / (n2 * (PI * q).sqrt()) * env * bracket)
}

/// Closed form for fermions with equal momenta.
pub fn fermion_density_dx(pair: &ParticlePair, x: f64, tau: f64) -> Result<f64> {
    check_tau(tau)?;
    require(
        pair.stats == ExchangeStatistics::Fermion,
        "fermion_density_dx needs a fermion pair",
    )?;
    require(
        pair.delta_k() == 0.0,
        "fermion_density_dx needs delta_k = 0",
    )?;
    let d = pair.delta_x();
    if d == 0.0 {
        return Err(Error::DegeneratePair(0.0));
    }
    let (xi, ki) = (pair.mean_x(), pair.mean_k());
    let q = 1.0 + tau * tau;
    let psi0 = free_density_raw(&CoherentState::new(xi, ki), x, tau);
    let y = x - xi - ki * tau;
    let pre = psi0 / (2.0 * (d * d / 4.0).sinh()) * (tau * tau * d * d / (4.0 * q)).exp();
    // cosh - e^{-d^2/4} cos, arranged to survive small d
    let a = d * y / q;
    let b = tau * d * ((x - xi) - tau * ki) / q;
    let e = -d * d / 4.0;
    let bracket = (a.cosh() - 1.0) + 2.0 * (b / 2.0).sin().powi(2) - e.exp_m1() * b.cos();
    Ok(pre * bracket)
}

/// Fermion density in the limit of coincident packets.
pub fn fermion_coincident_density(s: &CoherentState, x: f64, tau: f64) -> Result<f64> {
    check_tau(tau)?;
    let q = 1.0 + tau * tau;
    let y = x - s.center_at(tau);
    Ok(free_density_raw(s, x, tau) * (y * y / q + 0.5))
}

/// Exchange factor O_k(tau) of the two-particle survival probability.
pub fn overlap_o(pair: &ParticlePair, tau: f64) -> Result<f64> {
    check_tau(tau)?;
    pair.check_nondegenerate()?;
    let d = pair.separation_sq();
    let w = Complex64::new(d, 0.0) / Complex64::new(2.0, tau);
    Ok(match pair.stats {
        ExchangeStatistics::Distinguishable => 1.0,
        ExchangeStatistics::Boson => {
            (1.0 + (-w).exp()).norm_sqr() / (1.0 + (-d / 2.0).exp()).powi(2)
        }
        ExchangeStatistics::Fermion => expm1_complex(-w).norm_sqr() / (-d / 2.0).exp_m1().powi(2),
    })
}

fn expm1_complex(z: Complex64) -> Complex64 {
    let s = (z.im / 2.0).sin();
    Complex64::new(
        z.re.exp_m1() * z.im.cos() - 2.0 * s * s,
        z.re.exp() * z.im.sin(),
    )
}

/// Two-particle survival amplitude.
pub fn survival_pair(pair: &ParticlePair, tau: f64) -> Result<Complex64> {
    let n2 = normalization_sq(pair)?;
    let s = survival_single(&pair.state1, tau)? * survival_single(&pair.state2, tau)?;
    let cross = (Complex64::new(-pair.separation_sq(), 0.0) / Complex64::new(2.0, tau)).exp();
    Ok(match pair.stats {
        ExchangeStatistics::Distinguishable => s,
        _ => 2.0 / n2 * s * (1.0 + pair.stats.h() * cross),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OverlapLimit {
    /// Leading order in the phase-space separation, any tau.
    SmallSeparation,
    /// Leading order in both the separation and tau.
    ShortTime,
}

/// Limit forms of O_k(tau) at small phase-space separation.
pub fn overlap_limits(
    stats: ExchangeStatistics,
    delta_x: f64,
    delta_k: f64,
    tau: f64,
    form: OverlapLimit,
) -> f64 {
    let d = delta_x * delta_x + delta_k * delta_k;
    let t2 = tau * tau;
    match (stats, form) {
        (ExchangeStatistics::Distinguishable, _) => 1.0,
        (ExchangeStatistics::Boson, OverlapLimit::SmallSeparation) => {
            1.0 + d * t2 / (2.0 * (4.0 + t2))
        }
        (ExchangeStatistics::Boson, OverlapLimit::ShortTime) => 1.0 + d * t2 / 8.0,
        (ExchangeStatistics::Fermion, OverlapLimit::SmallSeparation) => 4.0 / (4.0 + t2),
        (ExchangeStatistics::Fermion, OverlapLimit::ShortTime) => 1.0 - t2 / 4.0,
    }
}
