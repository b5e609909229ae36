//! Fast invariant checks on fixed inputs, independent of the run config.

use anyhow::Result;
use flightsym::analysis::{BarrierScenario, Case};
use flightsym::barrier::{
    reflection_amp, transmission_amp, Channel, DeltaBarrier, EpsilonConvention, Propagator,
    ScatteredPair,
};
use flightsym::flighttime::{companion_overlaps, mean_flight_time, trapezoid, QuadratureSpec};
use flightsym::pairstats::{overlap_o, pair_density_free, ExchangeStatistics, ParticlePair};
use flightsym::relkin::{rel_pair_screen_density, RelativisticState, Species};
use flightsym::specfun::{erfc_complex, faddeeva_w};
use flightsym::wavepacket::{survival_single, CoherentState};
use flightsym::Complex64;

use ExchangeStatistics::{Boson, Distinguishable, Fermion};

pub struct Check {
    pub name: &'static str,
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
}

fn within(name: &'static str, value: f64, tolerance: f64) -> Check {
    Check {
        name,
        value,
        tolerance,
        pass: value <= tolerance,
    }
}

fn max_of(it: impl Iterator<Item = f64>) -> f64 {
    it.fold(0.0, f64::max)
}

fn grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
        .collect()
}

fn special_functions() -> Result<Vec<Check>> {
    // erfcx(1) and erfc(1), 50-digit references rounded to double
    let erfcx_one = 0.427_583_576_155_807_f64;
    let erfc_one = 0.157_299_207_050_285_13_f64;
    Ok(vec![
        within(
            "faddeeva_origin",
            (faddeeva_w(Complex64::new(0.0, 0.0))? - 1.0).norm(),
            1e-15,
        ),
        within(
            "faddeeva_imaginary_axis",
            (faddeeva_w(Complex64::new(0.0, 1.0))?.re / erfcx_one - 1.0).abs(),
            1e-14,
        ),
        within(
            "erfc_real_axis",
            (erfc_complex(Complex64::new(1.0, 0.0))?.re / erfc_one - 1.0).abs(),
            1e-14,
        ),
    ])
}

fn free_motion() -> Result<Vec<Check>> {
    let mut worst: f64 = 0.0;
    for case in [Case::I, Case::II] {
        let (a, b) = case.states().expect("benchmark case");
        for s in ExchangeStatistics::ALL {
            let pair = ParticlePair::new(a, b, s);
            for tau in [0.0, 10.0] {
                let c = 0.5 * (a.center_at(tau) + b.center_at(tau));
                let w = 12.0 * (1.0 + tau * tau).sqrt() + 2.0;
                let x = grid(c - w, c + w, 4001);
                let rho: Vec<f64> = x
                    .iter()
                    .map(|&v| pair_density_free(&pair, v, tau))
                    .collect::<Result<_, _>>()?;
                worst = worst.max((trapezoid(&x, &rho) - 1.0).abs());
            }
        }
    }
    let still = CoherentState::new(0.0, 0.0);
    let survival = [0.5, 3.0, 10.0]
        .iter()
        .map(|&t| Ok((survival_single(&still, t)?.norm_sqr() - 2.0 / (4.0 + t * t).sqrt()).abs()))
        .collect::<Result<Vec<f64>>>()?;
    let near = ParticlePair::new(
        CoherentState::new(0.0, 1.0),
        CoherentState::new(1e-4, 1.0),
        Fermion,
    );
    Ok(vec![
        within("pair_density_norm", worst, 1e-8),
        within("survival_at_rest", max_of(survival.into_iter()), 1e-14),
        within(
            "fermion_overlap_limit",
            (overlap_o(&near, 2.0)? - 0.5).abs(),
            1e-6,
        ),
    ])
}

fn barrier() -> Result<Vec<Check>> {
    let b = DeltaBarrier::new(10.0);
    let flux = [0.5, 2.0, 10.0, 40.0]
        .iter()
        .map(|&k| {
            Ok(
                (reflection_amp(k, &b)?.norm_sqr() + transmission_amp(k, &b)?.norm_sqr() - 1.0)
                    .abs(),
            )
        })
        .collect::<Result<Vec<f64>>>()?;
    let phase = BarrierScenario::case(Case::I)?.phase_time(EpsilonConvention::AlphaOfK)?;

    let (a, s) = Case::I.states().expect("benchmark case");
    let mut gram: f64 = 0.0;
    for stats in [Boson, Fermion] {
        let sp = ScatteredPair::new(ParticlePair::new(a, s, stats), b, Channel::Transmitted)
            .with_propagator(Propagator::Exact);
        let o = sp.pair.overlap().conj();
        for tau in [0.0, 300.0] {
            let g = companion_overlaps(&sp, tau, &QuadratureSpec::default())?;
            gram = gram
                .max((g.g11 - 1.0).abs())
                .max((g.g22 - 1.0).abs())
                .max((g.g21 - o).norm());
        }
    }
    Ok(vec![
        within("barrier_flux", max_of(flux.into_iter()), 1e-14),
        within("phase_time_case_I", (phase - 75.005).abs(), 1e-9),
        within("companion_gram_unitary", gram, 1e-12),
    ])
}

/// Fermions arrive later than distinguishable particles, which arrive later than bosons.
fn ordering() -> Result<Check> {
    let mut sc = BarrierScenario::custom(
        Case::Custom,
        CoherentState::new(-20.0, 5.0),
        CoherentState::new(-19.0, 4.6),
    );
    sc.screen_x = 30.0;
    let q = QuadratureSpec {
        z_points: 1024,
        tau_points: 1201,
        ..Default::default()
    };
    let channels = [Channel::Transmitted, Channel::Reflected];
    let d = flightsym::analysis::scenario_distributions(
        &sc,
        &ExchangeStatistics::ALL,
        &channels,
        &q,
        EpsilonConvention::AlphaOfK,
    )?;
    let mut gap = f64::INFINITY;
    for c in channels {
        let m = |s| -> Result<f64> {
            let x = d
                .iter()
                .find(|x| x.stats == s && x.channel == c)
                .expect("requested");
            Ok(mean_flight_time(x)?)
        };
        gap = gap
            .min(m(Fermion)? - m(Distinguishable)?)
            .min(m(Distinguishable)? - m(Boson)?);
    }
    Ok(Check {
        name: "mean_time_ordering",
        value: gap,
        tolerance: 0.0,
        pass: gap > 0.0,
    })
}

fn relativistic() -> Result<Check> {
    let a = RelativisticState::new(-3.0, 0.984, 1.0)?;
    let b = RelativisticState::new(-3.0, 0.996, 1.0)?;
    let tau = 3.0;
    let c = -3.0 + a.group_velocity() * tau;
    let x = grid(c - 16.0, c + 16.0, 4001);
    let mut worst: f64 = 0.0;
    for s in ExchangeStatistics::ALL {
        let rho: Vec<f64> = x
            .iter()
            .map(|&v| rel_pair_screen_density((&a, &b), Species::Electron, s, v, tau))
            .collect::<Result<_, _>>()?;
        worst = worst.max((trapezoid(&x, &rho) - 1.0).abs());
    }
    Ok(within("relativistic_pair_norm", worst, 1e-8))
}

pub fn run() -> Result<Vec<Check>> {
    let mut checks = special_functions()?;
    checks.extend(free_motion()?);
    checks.extend(barrier()?);
    checks.push(ordering()?);
    checks.push(relativistic()?);
    Ok(checks)
}
