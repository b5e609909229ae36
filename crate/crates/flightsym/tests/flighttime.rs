mod common;

use common::simpson_weights;
use flightsym::analysis::count_local_maxima;
use flightsym::barrier::{Channel, DeltaBarrier, EpsilonConvention, Propagator, ScatteredPair};
use flightsym::flighttime::*;
use flightsym::pairstats::{pair_density_free, ExchangeStatistics, ParticlePair};
use flightsym::wavepacket::CoherentState;
use flightsym::Error;

use ExchangeStatistics::{Boson, Distinguishable, Fermion};

fn case_one(stats: ExchangeStatistics) -> ParticlePair {
    ParticlePair::new(
        CoherentState::new(-301.0, 10.0),
        CoherentState::new(-299.0, 10.0),
        stats,
    )
}

fn case_two(stats: ExchangeStatistics) -> ParticlePair {
    ParticlePair::new(
        CoherentState::new(-300.0, 10.1),
        CoherentState::new(-300.0, 9.9),
        stats,
    )
}

fn small_pair(stats: ExchangeStatistics) -> ParticlePair {
    ParticlePair::new(
        CoherentState::new(-20.0, 5.0),
        CoherentState::new(-19.0, 4.6),
        stats,
    )
}

fn quick() -> QuadratureSpec {
    QuadratureSpec {
        z_points: 1024,
        tau_points: 1201,
        ..Default::default()
    }
}

/// Simpson integral of P over the grid plus the recorded tail share.
fn total_probability(d: &FlightTimeDistribution) -> f64 {
    let p = d.normalized();
    let n = p.len() - (1 - p.len() % 2);
    let w = simpson_weights(n, d.tau_grid[1] - d.tau_grid[0]);
    let mut s: f64 = p.iter().zip(&w).map(|(a, b)| a * b).sum();
    if n < p.len() {
        s += 0.5 * (d.tau_grid[n] - d.tau_grid[n - 1]) * (p[n] + p[n - 1]);
    }
    s + d.diagnostics.tail_mass_fraction
}

#[test]
fn free_screen_density_is_pair_density() {
    for stats in ExchangeStatistics::ALL {
        let p = case_one(stats);
        for tau in [60.0, 75.0, 90.0] {
            assert_eq!(
                screen_density_free(&p, 450.0, tau).unwrap(),
                pair_density_free(&p, 450.0, tau).unwrap()
            );
        }
    }
    assert!(matches!(
        screen_density_free(&case_one(Boson), -300.5, 1.0),
        Err(Error::ScreenInsideSupport { .. })
    ));
}

#[test]
fn free_fermion_arrives_early_and_broad() {
    // Equal momenta: the antisymmetric momentum profile has only a sub-percent dip at K,
    // which the 1/tau factor of the screen density removes, leaving one early peak.
    let q = QuadratureSpec::default();
    let f = free_distribution(&case_one(Fermion), 450.0, &q).unwrap();
    let b = free_distribution(&case_one(Boson), 450.0, &q).unwrap();
    let d = free_distribution(&case_one(Distinguishable), 450.0, &q).unwrap();
    assert!(f.peak_tau() < 74.0);
    assert!(f.window_variance() > d.window_variance() && d.window_variance() > b.window_variance());
    assert_eq!(mean_flight_time(&f), Err(Error::FreeChannelMean));
    assert!(f.diagnostics.screen_support.is_none());
}

#[test]
fn companion_gram_is_unitary() {
    let b = DeltaBarrier::new(50.0);
    for stats in [Boson, Fermion] {
        let sp = ScatteredPair::new(case_one(stats), b, Channel::Transmitted)
            .with_propagator(Propagator::Exact);
        for tau in [0.0, 75.0, 300.0] {
            let g = companion_overlaps(&sp, tau, &QuadratureSpec::default()).unwrap();
            let o = sp.pair.overlap().conj();
            assert!(
                (g.g11 - 1.0).abs() < 1e-12 && (g.g22 - 1.0).abs() < 1e-12,
                "tau={tau} {g:?}"
            );
            assert!((g.g21 - o).norm() < 1e-12, "tau={tau}");
        }
    }
    // mid-collision the incident and reflected waves interfere, so it takes a finer grid
    let sp = ScatteredPair::new(case_one(Boson), b, Channel::Transmitted)
        .with_propagator(Propagator::Exact);
    let fine = QuadratureSpec {
        z_points: 32768,
        ..Default::default()
    };
    let g = companion_overlaps(&sp, 30.0, &fine).unwrap();
    assert!(
        (g.g11 - 1.0).abs() < 1e-7 && (g.g22 - 1.0).abs() < 1e-7,
        "{g:?}"
    );
}

#[test]
fn adaptive_panels_agree_with_trapezoid() {
    let sp = ScatteredPair::new(
        small_pair(Boson),
        DeltaBarrier::new(4.8),
        Channel::Transmitted,
    );
    let fixed = QuadratureSpec {
        z_points: 16384,
        ..Default::default()
    };
    let adaptive = QuadratureSpec {
        scheme: Scheme::AdaptivePanel,
        ..Default::default()
    };
    for tau in [2.0, 5.0] {
        let a = companion_overlaps(&sp, tau, &fixed).unwrap();
        let b = companion_overlaps(&sp, tau, &adaptive).unwrap();
        assert!(
            (a.g11 - b.g11).abs() < 1e-9 && (a.g21 - b.g21).norm() < 1e-9,
            "tau={tau}"
        );
    }
    let starved = QuadratureSpec {
        adaptive_tolerance: 1e-300,
        ..adaptive
    };
    assert!(matches!(
        companion_overlaps(&sp, 5.0, &starved),
        Err(Error::Quadrature { .. })
    ));
}

#[test]
fn scattered_density_without_barrier_is_free() {
    let b = DeltaBarrier::new(0.0);
    for stats in ExchangeStatistics::ALL {
        let p = small_pair(stats);
        let sp = ScatteredPair::new(p, b, Channel::Transmitted);
        for tau in [6.0, 8.0, 10.0] {
            let a = screen_density_scattered(&sp, 20.0, tau, &QuadratureSpec::default()).unwrap();
            let f = pair_density_free(&p, 20.0, tau).unwrap();
            assert!(
                (a - f).abs() < 1e-8 * f.max(1e-3),
                "{stats:?} tau={tau}: {a} vs {f}"
            );
        }
    }
}

#[test]
fn scattered_distributions_are_normalized() {
    let b = DeltaBarrier::new(4.8);
    for stats in ExchangeStatistics::ALL {
        for (channel, x) in [(Channel::Transmitted, 30.0), (Channel::Reflected, -30.0)] {
            let sp = ScatteredPair::new(small_pair(stats), b, channel);
            let d = arrival_distribution(
                &sp,
                x,
                &QuadratureSpec::default(),
                EpsilonConvention::AlphaOfK,
            )
            .unwrap();
            let total = total_probability(&d);
            assert!((total - 1.0).abs() < 1e-6, "{stats:?} {channel:?}: {total}");
            assert!(d.density.iter().all(|&r| r >= 0.0));
        }
    }
}

#[test]
fn table_one_shapes() {
    let b = DeltaBarrier::new(10.0);
    let q = QuadratureSpec::default();
    let conv = EpsilonConvention::AlphaOfK;
    let d = arrival_distribution(
        &ScatteredPair::new(case_one(Distinguishable), b, Channel::Transmitted),
        450.0,
        &q,
        conv,
    )
    .unwrap();
    assert_eq!(count_local_maxima(&d.density, 0.01), 1);
    assert!((74.0..=76.0).contains(&d.peak_tau()));
    let f = arrival_distribution(
        &ScatteredPair::new(case_two(Fermion), b, Channel::Transmitted),
        450.0,
        &q,
        conv,
    )
    .unwrap();
    assert_eq!(count_local_maxima(&f.density, 0.01), 2);
    let bo = arrival_distribution(
        &ScatteredPair::new(case_two(Boson), b, Channel::Transmitted),
        450.0,
        &q,
        conv,
    )
    .unwrap();
    assert!(f.window_variance() > bo.window_variance());
}

#[test]
fn means_converge_under_refinement() {
    let b = DeltaBarrier::new(10.0);
    let q = QuadratureSpec::default();
    let reqs: Vec<ScreenRequest> = ExchangeStatistics::ALL
        .iter()
        .flat_map(|&stats| {
            [
                ScreenRequest {
                    stats,
                    channel: Channel::Transmitted,
                    screen_x: 450.0,
                },
                ScreenRequest {
                    stats,
                    channel: Channel::Reflected,
                    screen_x: -450.0,
                },
            ]
        })
        .collect();
    let p = case_one(Boson);
    let conv = EpsilonConvention::AlphaOfK;
    let a = arrival_distributions(
        p.state1,
        p.state2,
        &b,
        Propagator::Asymptotic,
        &reqs,
        &q,
        conv,
    )
    .unwrap();
    let r = arrival_distributions(
        p.state1,
        p.state2,
        &b,
        Propagator::Asymptotic,
        &reqs,
        &q.refined(),
        conv,
    )
    .unwrap();
    for (x, y) in a.iter().zip(&r) {
        let (mx, my) = (mean_flight_time(x).unwrap(), mean_flight_time(y).unwrap());
        assert!(
            (mx - my).abs() < 1e-4,
            "{:?} {:?}: {mx} vs {my}",
            x.stats,
            x.channel
        );
        assert!((mx - my).abs() < q.tail_tolerance.max(1e-6));
    }
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let sp = ScatteredPair::new(
        small_pair(Fermion),
        DeltaBarrier::new(4.8),
        Channel::Reflected,
    );
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| {
                arrival_distribution(&sp, -30.0, &quick(), EpsilonConvention::AlphaOfK).unwrap()
            })
    };
    let one = run(1);
    let many = run(4);
    assert_eq!(one.density, many.density);
    assert_eq!(one.mean_tau, many.mean_tau);
}

#[test]
fn truncated_window_reports_tail_failure() {
    let sp = ScatteredPair::new(
        small_pair(Boson),
        DeltaBarrier::new(4.8),
        Channel::Transmitted,
    );
    let q = QuadratureSpec {
        tau_max: Some(10.5),
        ..quick()
    };
    assert!(matches!(
        arrival_distribution(&sp, 30.0, &q, EpsilonConvention::AlphaOfK),
        Err(Error::TailFit { .. })
    ));
    let bad = QuadratureSpec {
        z_points: 2,
        ..quick()
    };
    assert!(matches!(
        arrival_distribution(&sp, 30.0, &bad, EpsilonConvention::AlphaOfK),
        Err(Error::InvalidArgument(_))
    ));
    assert!(arrival_distribution(&sp, -30.0, &quick(), EpsilonConvention::AlphaOfK).is_err());
}

#[test]
fn records_provenance() {
    let sp = ScatteredPair::new(
        small_pair(Boson),
        DeltaBarrier::new(4.8),
        Channel::Transmitted,
    );
    let q = quick();
    let d = arrival_distribution(&sp, 30.0, &q, EpsilonConvention::ReducedCoupling).unwrap();
    assert_eq!(d.convention, EpsilonConvention::ReducedCoupling);
    assert_eq!(d.fingerprint, q.fingerprint());
    assert_eq!(d.tau_grid.len(), q.tau_points);
    assert_eq!(
        free_flight_time(&sp.pair, Channel::Reflected, -30.0).unwrap(),
        (30.0 + 19.5) / 4.8
    );
}
