//! Scenario batteries: the two benchmark pairs, mean-time tables, the
//! width scan with its linear extrapolation, and power-law tail fits.

use crate::barrier::{phase_delay, Channel, DeltaBarrier, EpsilonConvention, Propagator};
use crate::error::{Error, Result};
use crate::flighttime::{
    arrival_distributions, FlightTimeDistribution, QuadratureSpec, ScreenRequest,
};
use crate::pairstats::ExchangeStatistics;
use crate::wavepacket::CoherentState;

/// Baseline width of the benchmark runs.
pub const GAMMA_0: f64 = 0.01;

/// The widths of the scan, largest first.
pub const SCAN_GAMMAS: [f64; 8] = [1e-2, 0.25e-2, 9e-4, 4e-4, 1e-4, 0.25e-4, 9e-6, 4e-6];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Case {
    /// Different positions, equal momenta.
    I,
    /// Equal positions, different momenta.
    II,
    Custom,
}

impl Case {
    pub fn tag(self) -> &'static str {
        match self {
            Self::I => "I",
            Self::II => "II",
            Self::Custom => "custom",
        }
    }

    pub fn from_tag(s: &str) -> Option<Self> {
        match s.trim() {
            "I" | "1" => Some(Self::I),
            "II" | "2" => Some(Self::II),
            "custom" => Some(Self::Custom),
            _ => None,
        }
    }

    pub fn states(self) -> Option<(CoherentState, CoherentState)> {
        match self {
            Self::I => Some((
                CoherentState::new(-301.0, 10.0),
                CoherentState::new(-299.0, 10.0),
            )),
            Self::II => Some((
                CoherentState::new(-300.0, 10.1),
                CoherentState::new(-300.0, 9.9),
            )),
            Self::Custom => None,
        }
    }
}

/// A scattered pair together with its barrier and screens, at width `gamma_width`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BarrierScenario {
    pub case: Case,
    pub state1: CoherentState,
    pub state2: CoherentState,
    /// Barrier strength c/K at the pair's mean momentum.
    pub epsilon: f64,
    /// Reduced coupling; overrides `epsilon` when present.
    pub coupling: Option<f64>,
    /// Transmitted screen; the reflected screen sits at its mirror image.
    pub screen_x: f64,
    pub gamma_width: f64,
    pub propagator: Propagator,
}

impl BarrierScenario {
    pub fn case(case: Case) -> Result<Self> {
        let (state1, state2) = case
            .states()
            .ok_or_else(|| Error::InvalidArgument("a custom case needs explicit states".into()))?;
        Ok(Self::custom(case, state1, state2))
    }

    pub fn custom(case: Case, state1: CoherentState, state2: CoherentState) -> Self {
        Self {
            case,
            state1,
            state2,
            epsilon: 1.0,
            coupling: None,
            screen_x: 450.0,
            gamma_width: GAMMA_0,
            propagator: Propagator::Asymptotic,
        }
    }

    pub fn mean_k(&self) -> f64 {
        0.5 * (self.state1.center_k + self.state2.center_k)
    }

    pub fn mean_x(&self) -> f64 {
        0.5 * (self.state1.center_x + self.state2.center_x)
    }

    pub fn barrier(&self) -> DeltaBarrier {
        DeltaBarrier::new(self.coupling.unwrap_or(self.epsilon * self.mean_k()))
    }

    pub fn screen(&self, channel: Channel) -> f64 {
        match channel {
            Channel::Reflected => -self.screen_x,
            _ => self.screen_x,
        }
    }

    /// Free flight time of the mean packet to the transmitted screen.
    pub fn free_time(&self) -> f64 {
        (self.screen_x - self.mean_x()) / self.mean_k()
    }

    /// Same physical configuration seen at another packet width: lengths
    /// scale with sqrt(gamma/gamma_width), momenta and coupling inversely.
    pub fn rescaled(&self, gamma: f64) -> Result<Self> {
        if !(gamma.is_finite() && gamma > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "gamma must be positive, got {gamma}"
            )));
        }
        let s = (gamma / self.gamma_width).sqrt();
        let scale = |c: CoherentState| CoherentState::new(c.center_x * s, c.center_k / s);
        Ok(Self {
            state1: scale(self.state1),
            state2: scale(self.state2),
            coupling: self.coupling.map(|c| c / s),
            screen_x: self.screen_x * s,
            gamma_width: gamma,
            ..*self
        })
    }

    /// Factor converting this scenario's reduced times to the time unit of width `gamma_ref`.
    pub fn time_scale_to(&self, gamma_ref: f64) -> f64 {
        gamma_ref / self.gamma_width
    }

    /// Phase time of the mean packet: free time plus the barrier delay.
    pub fn phase_time(&self, conv: EpsilonConvention) -> Result<f64> {
        Ok(self.free_time() + phase_delay(self.mean_k(), &self.barrier(), conv)?)
    }
}

/// Arrival distributions for every requested statistics in both channels.
pub fn scenario_distributions(
    sc: &BarrierScenario,
    stats: &[ExchangeStatistics],
    channels: &[Channel],
    q: &QuadratureSpec,
    conv: EpsilonConvention,
) -> Result<Vec<FlightTimeDistribution>> {
    let mut requests = Vec::new();
    for &channel in channels {
        for &s in stats {
            requests.push(ScreenRequest {
                stats: s,
                channel,
                screen_x: sc.screen(channel),
            });
        }
    }
    arrival_distributions(
        sc.state1,
        sc.state2,
        &sc.barrier(),
        sc.propagator,
        &requests,
        q,
        conv,
    )
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeanTimeEntry {
    pub case: Case,
    pub stats: ExchangeStatistics,
    pub channel: Channel,
    pub mean_tau: f64,
    pub variance: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MeanTimeTable {
    pub entries: Vec<MeanTimeEntry>,
    pub convention: EpsilonConvention,
    pub fingerprint: String,
}

impl MeanTimeTable {
    pub fn get(&self, case: Case, stats: ExchangeStatistics, channel: Channel) -> Option<f64> {
        self.entries
            .iter()
            .find(|e| e.case == case && e.stats == stats && e.channel == channel)
            .map(|e| e.mean_tau)
    }
}

/// Transmitted and reflected mean flight times for each scenario and all three statistics.
pub fn table1_runner(
    scenarios: &[BarrierScenario],
    q: &QuadratureSpec,
    conv: EpsilonConvention,
) -> Result<MeanTimeTable> {
    let channels = [Channel::Transmitted, Channel::Reflected];
    let mut entries = Vec::new();
    for sc in scenarios {
        for d in scenario_distributions(sc, &ExchangeStatistics::ALL, &channels, q, conv)? {
            entries.push(MeanTimeEntry {
                case: sc.case,
                stats: d.stats,
                channel: d.channel,
                mean_tau: crate::flighttime::mean_flight_time(&d)?,
                variance: d.window_variance(),
            });
        }
    }
    Ok(MeanTimeTable {
        entries,
        convention: conv,
        fingerprint: q.fingerprint(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GammaScanPoint {
    pub gamma_width: f64,
    /// Mean times in the time unit of the reference width.
    pub mean_tau_t: f64,
    pub mean_tau_r: f64,
    pub stats: ExchangeStatistics,
    pub convention: EpsilonConvention,
    /// Initial density at the reflected screen when it exceeds the support threshold.
    pub reflected_screen_support: Option<f64>,
}

/// Mean flight times over a list of widths for a fixed physical configuration.
/// `base` fixes that configuration at its own width, which is also the reported time unit.
pub fn gamma_scan(
    gammas: &[f64],
    base: &BarrierScenario,
    stats: &[ExchangeStatistics],
    q: &QuadratureSpec,
    conv: EpsilonConvention,
) -> Result<Vec<GammaScanPoint>> {
    let falling = gammas.windows(2).all(|w| w[0] > w[1]);
    let rising = gammas.windows(2).all(|w| w[0] < w[1]);
    if !(falling || rising) {
        return Err(Error::InvalidArgument(
            "scan widths must be strictly ordered".into(),
        ));
    }
    let channels = [Channel::Transmitted, Channel::Reflected];
    let mut out = Vec::new();
    for &g in gammas {
        let sc = base.rescaled(g)?;
        let conv_t = sc.time_scale_to(base.gamma_width);
        let dists = scenario_distributions(&sc, stats, &channels, q, conv)?;
        for &s in stats {
            let find = |c: Channel| {
                dists
                    .iter()
                    .find(|d| d.stats == s && d.channel == c)
                    .expect("requested")
            };
            let t = find(Channel::Transmitted);
            let r = find(Channel::Reflected);
            out.push(GammaScanPoint {
                gamma_width: g,
                mean_tau_t: crate::flighttime::mean_flight_time(t)? * conv_t,
                mean_tau_r: crate::flighttime::mean_flight_time(r)? * conv_t,
                stats: s,
                convention: conv,
                reflected_screen_support: r.diagnostics.screen_support,
            });
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct LinearFit {
    pub slope_b: f64,
    pub intercept_c: f64,
    pub r_squared: f64,
    pub residuals: Vec<f64>,
    pub slope_stderr: f64,
    pub intercept_stderr: f64,
}

/// Unweighted least squares y = b x + c.
pub fn linear_fit(x: &[f64], y: &[f64]) -> Result<LinearFit> {
    let n = x.len();
    if n != y.len() {
        return Err(Error::InvalidArgument(format!(
            "length mismatch {n} vs {}",
            y.len()
        )));
    }
    if n < 3 {
        return Err(Error::DegenerateFit);
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|v| (v - my).powi(2)).sum();
    if !sxx.is_finite() || sxx <= 0.0 {
        return Err(Error::DegenerateFit);
    }
    let b = sxy / sxx;
    let c = my - b * mx;
    let residuals: Vec<f64> = x.iter().zip(y).map(|(a, v)| v - (b * a + c)).collect();
    let sse: f64 = residuals.iter().map(|r| r * r).sum();
    let r_squared = if syy > 0.0 {
        (1.0 - sse / syy).clamp(0.0, 1.0)
    } else {
        1.0
    };
    let s2 = sse / (nf - 2.0);
    let sumx2: f64 = x.iter().map(|v| v * v).sum();
    Ok(LinearFit {
        slope_b: b,
        intercept_c: c,
        r_squared,
        residuals,
        slope_stderr: (s2 / sxx).sqrt(),
        intercept_stderr: (s2 * sumx2 / (nf * sxx)).sqrt(),
    })
}

/// Least-squares slope of log(rho) against log(tau).
pub fn tail_exponent(tau: &[f64], rho: &[f64]) -> Result<f64> {
    if tau.len() != rho.len() {
        return Err(Error::InvalidArgument("length mismatch".into()));
    }
    if let Some(bad) = tau.iter().chain(rho).find(|v| v.is_nan() || **v <= 0.0) {
        return Err(Error::InvalidArgument(format!("non-positive sample {bad}")));
    }
    let lx: Vec<f64> = tau.iter().map(|t| t.ln()).collect();
    let ly: Vec<f64> = rho.iter().map(|r| r.ln()).collect();
    Ok(linear_fit(&lx, &ly)?.slope_b)
}

/// Logarithmically spaced points on [a, b].
pub fn log_grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    let (la, lb) = (a.ln(), b.ln());
    (0..n)
        .map(|i| (la + (lb - la) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

/// Number of strict local maxima whose value exceeds `rel_threshold` times the global maximum.
pub fn count_local_maxima(values: &[f64], rel_threshold: f64) -> usize {
    let peak = values.iter().cloned().fold(f64::MIN, f64::max);
    let floor = rel_threshold * peak;
    let mut count = 0;
    let mut i = 1;
    while i + 1 < values.len() {
        if values[i] > values[i - 1] && values[i] > floor {
            // walk across a flat top before deciding
            let mut j = i;
            while j + 1 < values.len() && values[j + 1] == values[i] {
                j += 1;
            }
            if j + 1 < values.len() && values[j + 1] < values[i] {
                count += 1;
            }
            i = j + 1;
        } else {
            i += 1;
        }
    }
    count
}
