//! Screen densities, arrival-time distributions and mean flight times.
//!
//! For a scattered pair the one-particle density at the screen is
//!   w [ |A|^2 G22 + |B|^2 G11 + 2h Re(conj(A) B G21) ]
//! where A, B are the two packets at the screen and Gij = int conj(Ci) Cj dz are
//! overlaps of the companion packets (transmitted branch on z >= 0, reflected
//! branch on z < 0). The Gij depend on tau only, so one z-quadrature per tau
//! serves every statistics and channel.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::barrier::{
    Channel, DeltaBarrier, EpsilonConvention, Propagator, ScatteredPacket, ScatteredPair,
};
use crate::error::{Error, Result};
use crate::pairstats::{density_weight, pair_density_free, ExchangeStatistics, ParticlePair};
use crate::wavepacket::{check_tau, free_density_raw, CoherentState};

/// Initial density below which a screen counts as outside the initial support.
pub const SUPPORT_THRESHOLD: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum Scheme {
    #[default]
    Trapezoid,
    AdaptivePanel,
}

impl Scheme {
    pub fn tag(self) -> &'static str {
        match self {
            Self::Trapezoid => "trapezoid",
            Self::AdaptivePanel => "adaptive",
        }
    }

    pub fn from_tag(s: &str) -> Option<Self> {
        match s.trim() {
            "trapezoid" => Some(Self::Trapezoid),
            "adaptive" => Some(Self::AdaptivePanel),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureSpec {
    /// Half-width of each companion window in units of sqrt(1 + tau^2).
    pub z_window_halfwidth: f64,
    /// Trapezoid points per companion window.
    pub z_points: usize,
    /// Explicit time cutoff; when absent the cutoff is `tau_max_factor` times the free flight time.
    pub tau_max: Option<f64>,
    pub tau_max_factor: f64,
    pub tau_points: usize,
    pub tail_tolerance: f64,
    pub scheme: Scheme,
    /// Relative tolerance of the adaptive panels.
    pub adaptive_tolerance: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            z_window_halfwidth: 12.0,
            z_points: 4096,
            tau_max: None,
            tau_max_factor: 8.0,
            tau_points: 4801,
            tail_tolerance: 1e-6,
            scheme: Scheme::Trapezoid,
            adaptive_tolerance: 1e-10,
        }
    }
}

impl QuadratureSpec {
    pub fn fingerprint(&self) -> String {
        let tau_max = match self.tau_max {
            Some(t) => format!("{t}"),
            None => format!("{}*tau_fp", self.tau_max_factor),
        };
        format!(
            "scheme={} z_halfwidth={} z_points={} tau_max={} tau_points={} tail_tol={:e} adaptive_tol={:e}",
            self.scheme.tag(),
            self.z_window_halfwidth,
            self.z_points,
            tau_max,
            self.tau_points,
            self.tail_tolerance,
            self.adaptive_tolerance
        )
    }

    pub fn refined(&self) -> Self {
        Self {
            z_points: 2 * self.z_points,
            tau_points: 2 * self.tau_points - 1,
            adaptive_tolerance: self.adaptive_tolerance / 16.0,
            ..*self
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = self.z_window_halfwidth > 0.0
            && self.z_points >= 16
            && self.tau_points >= 16
            && self.tau_max_factor > 1.0
            && self.tail_tolerance > 0.0
            && self.adaptive_tolerance > 0.0
            && self.tau_max.is_none_or(|t| t > 0.0);
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!(
                "bad quadrature spec: {}",
                self.fingerprint()
            )))
        }
    }

    fn cutoff(&self, tau_fp: f64) -> f64 {
        self.tau_max.unwrap_or(self.tau_max_factor * tau_fp)
    }
}

/// Free flight time of the pair's mean packet to a screen, via the origin for reflection.
pub fn free_flight_time(pair: &ParticlePair, channel: Channel, x_screen: f64) -> Result<f64> {
    let k = pair.mean_k();
    if k <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "mean momentum must be positive, got {k}"
        )));
    }
    let path = match channel {
        Channel::Reflected => -x_screen - pair.mean_x(),
        _ => x_screen - pair.mean_x(),
    };
    if path <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "screen at {x_screen} is behind the pair"
        )));
    }
    Ok(path / k)
}

/// Initial one-particle density at the screen, if it exceeds the support threshold.
pub fn initial_support_at(pair: &ParticlePair, x: f64) -> Option<f64> {
    let d = free_density_raw(&pair.state1, x, 0.0).max(free_density_raw(&pair.state2, x, 0.0));
    (d >= SUPPORT_THRESHOLD).then_some(d)
}

pub fn screen_density_free(pair: &ParticlePair, x_screen: f64, tau: f64) -> Result<f64> {
    if let Some(density) = initial_support_at(pair, x_screen) {
        return Err(Error::ScreenInsideSupport {
            x: x_screen,
            density,
        });
    }
    pair_density_free(pair, x_screen, tau)
}

/// Overlaps of the two companion packets at one tau.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct CompanionGram {
    pub g11: f64,
    pub g22: f64,
    /// int conj(C2) C1 dz
    pub g21: Complex64,
}

impl CompanionGram {
    fn add_scaled(&mut self, wt: f64, c1: Complex64, c2: Complex64) {
        self.g11 += wt * c1.norm_sqr();
        self.g22 += wt * c2.norm_sqr();
        self.g21 += wt * c2.conj() * c1;
    }

    fn plus(self, o: Self) -> Self {
        Self {
            g11: self.g11 + o.g11,
            g22: self.g22 + o.g22,
            g21: self.g21 + o.g21,
        }
    }

    fn scaled(self, s: f64) -> Self {
        Self {
            g11: s * self.g11,
            g22: s * self.g22,
            g21: s * self.g21,
        }
    }

    fn max_abs_diff(&self, o: &Self) -> f64 {
        (self.g11 - o.g11)
            .abs()
            .max((self.g22 - o.g22).abs())
            .max((self.g21 - o.g21).norm())
    }

    fn scale(&self) -> f64 {
        self.g11.abs().max(self.g22.abs()).max(self.g21.norm())
    }
}

/// Companion-coordinate intervals at `tau`, split at the origin.
fn z_pieces(pair: &ParticlePair, tau: f64, q: &QuadratureSpec) -> Vec<(f64, f64, usize)> {
    let w = q.z_window_halfwidth * (1.0 + tau * tau).sqrt();
    let c1 = pair.state1.center_at(tau);
    let c2 = pair.state2.center_at(tau);
    let lo = c1.min(c2) - w;
    let hi = c1.max(c2) + w;
    let density = q.z_points as f64 / (hi - lo);
    let mut windows = vec![(lo, hi), (-hi, -lo)];
    windows.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut merged: Vec<(f64, f64)> = Vec::new();
    for (a, b) in windows {
        match merged.last_mut() {
            Some(last) if a <= last.1 => last.1 = last.1.max(b),
            _ => merged.push((a, b)),
        }
    }
    let mut pieces = Vec::new();
    for (a, b) in merged {
        let cuts: Vec<(f64, f64)> = if a < 0.0 && b > 0.0 {
            vec![(a, 0.0), (0.0, b)]
        } else {
            vec![(a, b)]
        };
        for (u, v) in cuts {
            let n = ((v - u) * density).ceil() as usize + 1;
            pieces.push((u, v, n.max(9)));
        }
    }
    pieces
}

const GREGORY_END: [f64; 6] = [
    19087.0 / 60480.0,
    84199.0 / 60480.0,
    18869.0 / 30240.0,
    37621.0 / 30240.0,
    55031.0 / 60480.0,
    61343.0 / 60480.0,
];

fn gregory_weight(i: usize, n: usize) -> f64 {
    if n < 2 * GREGORY_END.len() {
        return if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
    }
    let from_end = i.min(n - 1 - i);
    GREGORY_END.get(from_end).copied().unwrap_or(1.0)
}

struct GramIntegrand {
    p1: ScatteredPacket,
    p2: ScatteredPacket,
}

impl GramIntegrand {
    fn at(&self, z: f64) -> (Complex64, Complex64) {
        (self.p1.piecewise(z), self.p2.piecewise(z))
    }

    fn point(&self, z: f64) -> CompanionGram {
        let (c1, c2) = self.at(z);
        let mut g = CompanionGram::default();
        g.add_scaled(1.0, c1, c2);
        g
    }

    /// Trapezoid with Gregory end corrections, so pieces cut at the barrier keep high order.
    fn trapezoid(&self, a: f64, b: f64, n: usize) -> CompanionGram {
        let h = (b - a) / (n - 1) as f64;
        let mut g = CompanionGram::default();
        for i in 0..n {
            let z = a + h * i as f64;
            let wt = h * gregory_weight(i, n);
            let (c1, c2) = self.at(z);
            g.add_scaled(wt, c1, c2);
        }
        g
    }

    fn simpson(
        &self,
        a: f64,
        b: f64,
        fa: CompanionGram,
        fm: CompanionGram,
        fb: CompanionGram,
    ) -> CompanionGram {
        fa.plus(fm.scaled(4.0)).plus(fb).scaled((b - a) / 6.0)
    }

    #[allow(clippy::too_many_arguments)]
    fn adaptive(
        &self,
        a: f64,
        b: f64,
        fa: CompanionGram,
        fm: CompanionGram,
        fb: CompanionGram,
        whole: CompanionGram,
        tol: f64,
        depth: u32,
        budget: &mut usize,
    ) -> Result<CompanionGram> {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = self.point(lm);
        let frm = self.point(rm);
        *budget = budget.saturating_sub(2);
        let left = self.simpson(a, m, fa, flm, fm);
        let right = self.simpson(m, b, fm, frm, fb);
        let both = left.plus(right);
        let err = both.max_abs_diff(&whole);
        if err <= 15.0 * tol {
            return Ok(both.plus(both.plus(whole.scaled(-1.0)).scaled(1.0 / 15.0)));
        }
        if depth == 0 || *budget == 0 {
            return Err(Error::Quadrature { residual: err });
        }
        let l = self.adaptive(a, m, fa, flm, fm, left, tol / 2.0, depth - 1, budget)?;
        let r = self.adaptive(m, b, fm, frm, fb, right, tol / 2.0, depth - 1, budget)?;
        Ok(l.plus(r))
    }

    fn adaptive_piece(&self, a: f64, b: f64, panels: usize, rel_tol: f64) -> Result<CompanionGram> {
        // coarse trapezoid sets the absolute scale for the tolerance
        let scale = self.trapezoid(a, b, panels + 1).scale().max(1e-300);
        let h = (b - a) / panels as f64;
        let mut total = CompanionGram::default();
        let mut budget = 2_000_000usize;
        for i in 0..panels {
            let u = a + h * i as f64;
            let v = u + h;
            let fa = self.point(u);
            let fm = self.point(0.5 * (u + v));
            let fb = self.point(v);
            let whole = self.simpson(u, v, fa, fm, fb);
            let tol = rel_tol * scale / panels as f64;
            total = total.plus(self.adaptive(u, v, fa, fm, fb, whole, tol, 40, &mut budget)?);
        }
        Ok(total)
    }
}

fn companion_gram(
    pair: &ParticlePair,
    barrier: &DeltaBarrier,
    prop: Propagator,
    tau: f64,
    q: &QuadratureSpec,
) -> Result<CompanionGram> {
    let f = GramIntegrand {
        p1: ScatteredPacket::new(&pair.state1, barrier, prop, tau),
        p2: ScatteredPacket::new(&pair.state2, barrier, prop, tau),
    };
    let mut g = CompanionGram::default();
    for (a, b, n) in z_pieces(pair, tau, q) {
        let piece = match q.scheme {
            Scheme::Trapezoid => f.trapezoid(a, b, n),
            Scheme::AdaptivePanel => f.adaptive_piece(a, b, 64, q.adaptive_tolerance)?,
        };
        g = g.plus(piece);
    }
    Ok(g)
}

/// Companion overlaps for a scattered pair at one tau.
pub fn companion_overlaps(
    sp: &ScatteredPair,
    tau: f64,
    q: &QuadratureSpec,
) -> Result<CompanionGram> {
    check_tau(tau)?;
    q.validate()?;
    companion_gram(&sp.pair, &sp.barrier, sp.propagator, tau, q)
}

struct ScreenAmplitudes {
    a: Complex64,
    b: Complex64,
}

fn screen_amplitudes(
    pair: &ParticlePair,
    barrier: &DeltaBarrier,
    prop: Propagator,
    channel: Channel,
    x: f64,
    tau: f64,
) -> ScreenAmplitudes {
    let p1 = ScatteredPacket::new(&pair.state1, barrier, prop, tau);
    let p2 = ScatteredPacket::new(&pair.state2, barrier, prop, tau);
    match channel {
        Channel::Transmitted => ScreenAmplitudes {
            a: p1.transmitted(x),
            b: p2.transmitted(x),
        },
        Channel::Reflected => ScreenAmplitudes {
            a: p1.reflected(x),
            b: p2.reflected(x),
        },
        Channel::Free => ScreenAmplitudes {
            a: p1.free(x),
            b: p2.free(x),
        },
    }
}

fn combine(
    stats: ExchangeStatistics,
    weight: f64,
    amp: &ScreenAmplitudes,
    g: &CompanionGram,
) -> f64 {
    let h = stats.h();
    let direct = amp.a.norm_sqr() * g.g22 + amp.b.norm_sqr() * g.g11;
    let cross = 2.0 * h * (amp.a.conj() * amp.b * g.g21).re;
    (weight * (direct + cross)).max(0.0)
}

/// One-particle density at the screen for a scattered pair, integrating the companion numerically.
pub fn screen_density_scattered(
    sp: &ScatteredPair,
    x_screen: f64,
    tau: f64,
    q: &QuadratureSpec,
) -> Result<f64> {
    check_tau(tau)?;
    sp.check_screen_side(x_screen)?;
    let g = companion_overlaps(sp, tau, q)?;
    let amp = screen_amplitudes(
        &sp.pair,
        &sp.barrier,
        sp.propagator,
        sp.channel,
        x_screen,
        tau,
    );
    Ok(combine(sp.pair.stats, density_weight(&sp.pair)?, &amp, &g))
}

#[derive(Clone, Debug, PartialEq)]
pub struct Diagnostics {
    /// Share of the norm carried by the analytic tail beyond tau_max.
    pub tail_mass_fraction: f64,
    /// Local log-log slope of the density just before tau_max.
    pub tail_slope: Option<f64>,
    /// Initial density at the screen when it exceeds the support threshold.
    pub screen_support: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FlightTimeDistribution {
    pub stats: ExchangeStatistics,
    pub channel: Channel,
    pub screen_x: f64,
    pub tau_grid: Vec<f64>,
    /// Unnormalized screen density rho(tau).
    pub density: Vec<f64>,
    /// int rho dtau, including the analytic tail for scattered channels.
    pub norm_constant: f64,
    pub mean_tau: Option<f64>,
    pub convention: EpsilonConvention,
    pub fingerprint: String,
    pub diagnostics: Diagnostics,
}

impl FlightTimeDistribution {
    /// P(tau) = rho(tau) / norm_constant.
    pub fn normalized(&self) -> Vec<f64> {
        self.density
            .iter()
            .map(|r| r / self.norm_constant)
            .collect()
    }

    pub fn peak_normalized(&self) -> Vec<f64> {
        let peak = self.density.iter().cloned().fold(0.0, f64::max);
        self.density
            .iter()
            .map(|r| if peak > 0.0 { r / peak } else { 0.0 })
            .collect()
    }

    /// Grid argmax of the density.
    pub fn peak_tau(&self) -> f64 {
        let (i, _) = self
            .density
            .iter()
            .enumerate()
            .fold(
                (0, f64::MIN),
                |best, (i, &v)| if v > best.1 { (i, v) } else { best },
            );
        self.tau_grid[i]
    }

    /// Variance over the sampled window, with the density renormalized on that window.
    pub fn window_variance(&self) -> f64 {
        let m0 = trapezoid(&self.tau_grid, &self.density);
        let t1: Vec<f64> = self
            .tau_grid
            .iter()
            .zip(&self.density)
            .map(|(t, r)| t * r)
            .collect();
        let m1 = trapezoid(&self.tau_grid, &t1) / m0;
        let t2: Vec<f64> = self
            .tau_grid
            .iter()
            .zip(&self.density)
            .map(|(t, r)| (t - m1).powi(2) * r)
            .collect();
        trapezoid(&self.tau_grid, &t2) / m0
    }
}

/// Composite trapezoid, summed left to right.
pub fn trapezoid(x: &[f64], y: &[f64]) -> f64 {
    let mut s = 0.0;
    for i in 1..x.len() {
        s += 0.5 * (x[i] - x[i - 1]) * (y[i] + y[i - 1]);
    }
    s
}

fn uniform_grid(tau_max: f64, n: usize) -> Vec<f64> {
    let h = tau_max / (n - 1) as f64;
    (0..n)
        .map(|i| if i == n - 1 { tau_max } else { h * i as f64 })
        .collect()
}

struct TailEstimate {
    norm: f64,
    first_moment: f64,
    slope: Option<f64>,
}

/// tau^-3 continuation matched to the last sample.
fn tail_estimate(tau: &[f64], rho: &[f64]) -> TailEstimate {
    let n = tau.len();
    let t_max = tau[n - 1];
    let amp = rho[n - 1] * t_max.powi(3);
    let j = tau
        .iter()
        .position(|&t| t >= 0.9 * t_max)
        .unwrap_or(n - 2)
        .min(n - 2);
    let slope = (rho[j] > 0.0 && rho[n - 1] > 0.0)
        .then(|| (rho[n - 1] / rho[j]).ln() / (t_max / tau[j]).ln());
    TailEstimate {
        norm: amp / (2.0 * t_max * t_max),
        first_moment: amp / t_max,
        slope,
    }
}

#[allow(clippy::too_many_arguments)]
fn finish_scattered(
    stats: ExchangeStatistics,
    channel: Channel,
    screen_x: f64,
    tau: Vec<f64>,
    rho: Vec<f64>,
    support: Option<f64>,
    conv: EpsilonConvention,
    q: &QuadratureSpec,
) -> Result<FlightTimeDistribution> {
    let body = trapezoid(&tau, &rho);
    let t1: Vec<f64> = tau.iter().zip(&rho).map(|(t, r)| t * r).collect();
    let body1 = trapezoid(&tau, &t1);
    let tail = tail_estimate(&tau, &rho);
    let norm = body + tail.norm;
    if norm.is_nan() || norm <= 0.0 {
        return Err(Error::Quadrature { residual: norm });
    }
    let fraction = tail.norm / norm;
    if fraction > q.tail_tolerance && tail.slope.is_none_or(|s| (s + 3.0).abs() > 0.5) {
        return Err(Error::TailFit {
            fraction,
            slope: tail.slope.unwrap_or(f64::NAN),
        });
    }
    Ok(FlightTimeDistribution {
        stats,
        channel,
        screen_x,
        tau_grid: tau,
        density: rho,
        norm_constant: norm,
        mean_tau: Some((body1 + tail.first_moment) / norm),
        convention: conv,
        fingerprint: q.fingerprint(),
        diagnostics: Diagnostics {
            tail_mass_fraction: fraction,
            tail_slope: tail.slope,
            screen_support: support,
        },
    })
}

/// A requested (statistics, channel, screen) combination.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScreenRequest {
    pub stats: ExchangeStatistics,
    pub channel: Channel,
    pub screen_x: f64,
}

/// Arrival-time distributions for several statistics and channels of one
/// scattered pair, sharing a single tau grid and companion quadrature.
pub fn arrival_distributions(
    state1: CoherentState,
    state2: CoherentState,
    barrier: &DeltaBarrier,
    prop: Propagator,
    requests: &[ScreenRequest],
    q: &QuadratureSpec,
    conv: EpsilonConvention,
) -> Result<Vec<FlightTimeDistribution>> {
    q.validate()?;
    let base = ParticlePair::new(state1, state2, ExchangeStatistics::Distinguishable);
    let mut tau_fp: f64 = 0.0;
    for r in requests {
        let sp = ScatteredPair::new(base, *barrier, r.channel);
        sp.check_screen_side(r.screen_x)?;
        tau_fp = tau_fp.max(free_flight_time(&base, r.channel, r.screen_x)?);
    }
    let tau = uniform_grid(q.cutoff(tau_fp), q.tau_points);
    let weights: Vec<f64> = requests
        .iter()
        .map(|r| density_weight(&base.with_stats(r.stats)))
        .collect::<Result<_>>()?;

    let rows: Vec<Vec<f64>> = tau
        .par_iter()
        .map(|&t| -> Result<Vec<f64>> {
            let g = companion_gram(&base, barrier, prop, t, q)?;
            Ok(requests
                .iter()
                .zip(&weights)
                .map(|(r, &w)| {
                    let amp = screen_amplitudes(&base, barrier, prop, r.channel, r.screen_x, t);
                    combine(r.stats, w, &amp, &g)
                })
                .collect())
        })
        .collect::<Result<_>>()?;

    requests
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let rho: Vec<f64> = rows.iter().map(|row| row[i]).collect();
            let support = initial_support_at(&base, r.screen_x);
            finish_scattered(
                r.stats,
                r.channel,
                r.screen_x,
                tau.clone(),
                rho,
                support,
                conv,
                q,
            )
        })
        .collect()
}

/// Normalized arrival-time distribution of one scattered pair.
pub fn arrival_distribution(
    sp: &ScatteredPair,
    x_screen: f64,
    q: &QuadratureSpec,
    conv: EpsilonConvention,
) -> Result<FlightTimeDistribution> {
    let req = ScreenRequest {
        stats: sp.pair.stats,
        channel: sp.channel,
        screen_x: x_screen,
    };
    let mut v = arrival_distributions(
        sp.pair.state1,
        sp.pair.state2,
        &sp.barrier,
        sp.propagator,
        &[req],
        q,
        conv,
    )?;
    Ok(v.remove(0))
}

/// Unnormalizable free-evolution screen density sampled on [0, tau_max].
pub fn free_distribution(
    pair: &ParticlePair,
    x_screen: f64,
    q: &QuadratureSpec,
) -> Result<FlightTimeDistribution> {
    q.validate()?;
    let tau_fp = free_flight_time(pair, Channel::Free, x_screen)?;
    let tau = uniform_grid(q.cutoff(tau_fp), q.tau_points);
    let rho: Vec<f64> = tau
        .par_iter()
        .map(|&t| pair_density_free(pair, x_screen, t))
        .collect::<Result<_>>()?;
    let norm = trapezoid(&tau, &rho);
    Ok(FlightTimeDistribution {
        stats: pair.stats,
        channel: Channel::Free,
        screen_x: x_screen,
        tau_grid: tau,
        density: rho,
        norm_constant: norm,
        mean_tau: None,
        convention: EpsilonConvention::default(),
        fingerprint: q.fingerprint(),
        diagnostics: Diagnostics {
            tail_mass_fraction: f64::NAN,
            tail_slope: None,
            screen_support: initial_support_at(pair, x_screen),
        },
    })
}

pub fn mean_flight_time(dist: &FlightTimeDistribution) -> Result<f64> {
    match (dist.channel, dist.mean_tau) {
        (Channel::Free, _) | (_, None) => Err(Error::FreeChannelMean),
        (_, Some(m)) => Ok(m),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn trapezoid_on_line_is_exact() {
        let x = [0.0, 0.5, 2.0, 3.0];
        let y: Vec<f64> = x.iter().map(|v| 3.0 * v + 1.0).collect();
        assert_relative_eq!(trapezoid(&x, &y), 16.5, max_relative = 1e-15);
    }

    #[test]
    fn pieces_split_at_origin() {
        let p = ParticlePair::new(
            CoherentState::new(-2.0, 1.0),
            CoherentState::new(-1.0, 1.0),
            ExchangeStatistics::Boson,
        );
        let q = QuadratureSpec::default();
        let pieces = z_pieces(&p, 0.5, &q);
        assert!(pieces.iter().all(|&(a, b, _)| !(a < 0.0 && b > 0.0)));
        let total: f64 = pieces.iter().map(|&(a, b, _)| b - a).sum();
        assert!(total > 0.0);
    }

    #[test]
    fn tail_of_pure_power_law() {
        let tau: Vec<f64> = (1..=1000).map(|i| i as f64).collect();
        let rho: Vec<f64> = tau.iter().map(|t| 5.0 / t.powi(3)).collect();
        let t = tail_estimate(&tau, &rho);
        assert_relative_eq!(t.norm, 5.0 / (2.0 * 1e6), max_relative = 1e-12);
        assert_relative_eq!(t.slope.unwrap(), -3.0, max_relative = 1e-12);
    }

    #[test]
    fn free_channel_has_no_mean() {
        let p = ParticlePair::new(
            CoherentState::new(-30.0, 10.0),
            CoherentState::new(-29.0, 10.0),
            ExchangeStatistics::Fermion,
        );
        let q = QuadratureSpec {
            tau_points: 200,
            ..Default::default()
        };
        let d = free_distribution(&p, 20.0, &q).unwrap();
        assert_eq!(mean_flight_time(&d), Err(Error::FreeChannelMean));
    }

    #[test]
    fn screen_inside_support_is_reported() {
        let p = ParticlePair::new(
            CoherentState::new(-3.0, 1.0),
            CoherentState::new(-2.0, 1.0),
            ExchangeStatistics::Boson,
        );
        assert!(matches!(
            screen_density_free(&p, -1.0, 1.0),
            Err(Error::ScreenInsideSupport { .. })
        ));
        assert!(screen_density_free(&p, 20.0, 1.0).is_ok());
    }

    #[test]
    fn refined_spec_doubles_resolution() {
        let q = QuadratureSpec::default();
        let r = q.refined();
        assert_eq!(r.z_points, 2 * q.z_points);
        assert_eq!(r.tau_points - 1, 2 * (q.tau_points - 1));
    }
}
