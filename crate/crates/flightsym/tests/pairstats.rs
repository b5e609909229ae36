mod common;

use common::{linspace, simpson, simpson_weights};
use flightsym::pairstats::*;
use flightsym::wavepacket::{free_density, free_psi, survival_single, CoherentState};
use flightsym::{Complex64, Error};
use proptest::prelude::*;
use std::f64::consts::PI;

use ExchangeStatistics::{Boson, Distinguishable, Fermion};

fn pair(x1: f64, k1: f64, x2: f64, k2: f64, stats: ExchangeStatistics) -> ParticlePair {
    ParticlePair::new(
        CoherentState::new(x1, k1),
        CoherentState::new(x2, k2),
        stats,
    )
}

fn one_particle_norm(p: &ParticlePair, tau: f64) -> f64 {
    let lo = p.state1.center_at(tau).min(p.state2.center_at(tau));
    let hi = p.state1.center_at(tau).max(p.state2.center_at(tau));
    let w = 14.0 * (1.0 + tau * tau).sqrt();
    simpson(
        |x| pair_density_free(p, x, tau).unwrap(),
        lo - w,
        hi + w,
        40_000,
    )
}

/// Closed form and general density agree to `tol` relative to the peak on an (X, tau) grid.
fn assert_forms_agree(
    p: &ParticlePair,
    f: impl Fn(&ParticlePair, f64, f64) -> flightsym::Result<f64>,
    tol: f64,
) {
    for tau in [0.0, 0.5, 3.0, 20.0] {
        let c = 0.5 * (p.state1.center_at(tau) + p.state2.center_at(tau));
        let w = 5.0 * (1.0 + tau * tau).sqrt();
        let peak = 1.0 / (PI * (1.0 + tau * tau)).sqrt();
        for x in linspace(c - w, c + w, 201) {
            let a = f(p, x, tau).unwrap();
            let b = pair_density_free(p, x, tau).unwrap();
            assert!((a - b).abs() <= tol * peak, "x={x} tau={tau}: {a} vs {b}");
        }
    }
}

#[test]
fn normalization_constants() {
    assert_eq!(
        normalization_sq(&pair(0.0, 1.0, 5.0, 2.0, Distinguishable)).unwrap(),
        1.0
    );
    assert_eq!(
        normalization_sq(&pair(0.0, 1.0, 0.0, 1.0, Boson)).unwrap(),
        4.0
    );
    assert!(
        (normalization_sq(&pair(0.0, 3.0, 2.0, 3.0, Fermion)).unwrap() - 1.729_329_4).abs() < 1e-7
    );
    assert!(matches!(
        normalization_sq(&pair(1.0, 1.0, 1.0, 1.0, Fermion)),
        Err(Error::DegeneratePair(_))
    ));
}

#[test]
fn distinguishable_density_is_average() {
    let p = pair(-301.0, 10.0, -299.0, 10.0, Distinguishable);
    let a = free_density(&p.state1, 450.0, 75.0).unwrap();
    let b = free_density(&p.state2, 450.0, 75.0).unwrap();
    assert_eq!(pair_density_free(&p, 450.0, 75.0).unwrap(), 0.5 * (a + b));
}

#[test]
fn closed_forms_match_general_density() {
    assert_forms_agree(&pair(-1.0, 2.0, 1.0, 2.0, Boson), boson_density_dx, 1e-10);
    assert_forms_agree(&pair(-3.0, 0.7, 0.5, 0.7, Boson), boson_density_dx, 1e-10);
    assert_forms_agree(&pair(0.0, 1.5, 0.0, 3.0, Boson), boson_density_dk, 1e-10);
    assert_forms_agree(&pair(2.0, -1.0, 2.0, 0.4, Boson), boson_density_dk, 1e-10);
    assert_forms_agree(
        &pair(-1.0, 2.0, 1.0, 2.0, Fermion),
        fermion_density_dx,
        1e-10,
    );
    assert_forms_agree(
        &pair(-0.2, 4.0, 0.3, 4.0, Fermion),
        fermion_density_dx,
        1e-10,
    );
}

#[test]
fn closed_forms_check_preconditions() {
    assert!(boson_density_dx(&pair(0.0, 1.0, 1.0, 2.0, Boson), 0.0, 1.0).is_err());
    assert!(boson_density_dx(&pair(0.0, 1.0, 1.0, 1.0, Fermion), 0.0, 1.0).is_err());
    assert!(boson_density_dk(&pair(0.0, 1.0, 1.0, 2.0, Boson), 0.0, 1.0).is_err());
    assert!(fermion_density_dx(&pair(0.0, 1.0, 1.0, 2.0, Fermion), 0.0, 1.0).is_err());
    assert!(fermion_density_dx(&pair(0.0, 1.0, 0.0, 1.0, Fermion), 0.0, 1.0).is_err());
}

#[test]
fn one_particle_density_is_normalized() {
    let pairs = [
        pair(-301.0, 10.0, -299.0, 10.0, Boson),
        pair(-300.0, 10.1, -300.0, 9.9, Boson),
        pair(-1.0, 0.3, 0.5, -0.4, Boson),
    ];
    for base in pairs {
        for stats in ExchangeStatistics::ALL {
            let p = base.with_stats(stats);
            for tau in [0.0, 20.0, 75.0] {
                let n = one_particle_norm(&p, tau);
                assert!((n - 1.0).abs() < 1e-8, "{stats:?} tau={tau} norm={n}");
            }
        }
    }
}

#[test]
fn two_particle_wavefunction_is_normalized() {
    let n = 601;
    for (p, tau) in [
        (pair(-1.0, 0.5, 0.8, -0.3, Boson), 0.0),
        (pair(-1.0, 0.5, 0.8, -0.3, Fermion), 1.0),
        (pair(0.0, 1.0, 0.3, 1.0, Fermion), 0.0),
    ] {
        let c = 0.5 * (p.state1.center_at(tau) + p.state2.center_at(tau));
        let w = 10.0 * (1.0 + tau * tau).sqrt();
        let xs = linspace(c - w, c + w, n);
        let wt = simpson_weights(n, xs[1] - xs[0]);
        let mut total = 0.0;
        for (a, wa) in xs.iter().zip(&wt) {
            for (b, wb) in xs.iter().zip(&wt) {
                total += wa * wb * pair_psi_free(&p, *a, *b, tau).unwrap().norm_sqr();
            }
        }
        assert!(
            (total - 1.0).abs() < 1e-8,
            "{:?} tau={tau}: {total}",
            p.stats
        );
    }
    // coincident limit
    let s = CoherentState::new(0.5, 1.0);
    let xs = linspace(-10.0, 11.0, n);
    let wt = simpson_weights(n, xs[1] - xs[0]);
    let mut total = 0.0;
    for (a, wa) in xs.iter().zip(&wt) {
        for (b, wb) in xs.iter().zip(&wt) {
            total += wa * wb * fermion_coincident_psi(&s, *a, *b).norm_sqr();
        }
    }
    assert!((total - 1.0).abs() < 1e-8, "coincident: {total}");
}

#[test]
fn long_time_ratios() {
    let tau = 1e4;
    let (d, k) = (1.3, 2.0);
    let mean = CoherentState::new(0.0, k);
    let b = pair(-d / 2.0, k, d / 2.0, k, Boson);
    let f = b.with_stats(Fermion);
    let wb = (1.0 + (-d * d / 4.0).exp() * (d * k).cos()) / (1.0 + (-d * d / 2.0).exp());
    let wf = (1.0 - (-d * d / 4.0).exp() * (d * k).cos()) / (1.0 - (-d * d / 2.0).exp());
    // corrections are O(delta_x * X / tau), so stay near the origin
    for x in [0.0, 0.5, -0.5] {
        let psi0 = free_density(&mean, x, tau).unwrap();
        assert!((pair_density_free(&b, x, tau).unwrap() / psi0 - wb).abs() < 1e-4);
        let rf = pair_density_free(&f, x, tau).unwrap() / psi0;
        assert!((rf - wf).abs() < 1e-4, "x={x} {rf} vs {wf}");
    }
}

#[test]
fn coincident_limits() {
    let s = CoherentState::new(0.7, 1.4);
    assert!((fermion_coincident_density(&s, 0.7, 0.0).unwrap() - 0.282_094_8).abs() < 1e-7);
    for tau in [0.0, 10.0] {
        let c = s.center_at(tau);
        let w = 14.0 * (1.0 + tau * tau).sqrt();
        let n = simpson(
            |x| fermion_coincident_density(&s, x, tau).unwrap(),
            c - w,
            c + w,
            40_000,
        );
        assert!((n - 1.0).abs() < 1e-8, "tau={tau}: {n}");
    }
    let near = pair(0.7 - 5e-4, 1.4, 0.7 + 5e-4, 1.4, Fermion);
    for tau in [0.0, 1.0, 4.0] {
        for x in linspace(s.center_at(tau) - 4.0, s.center_at(tau) + 4.0, 41) {
            let a = fermion_density_dx(&near, x, tau).unwrap();
            let b = fermion_coincident_density(&s, x, tau).unwrap();
            assert!((a - b).abs() < 1e-5, "x={x} tau={tau}");
        }
    }
    for x in [-1.0, 0.7, 2.0] {
        assert!(fermion_coincident_psi(&s, x, x).norm_sqr() < 1e-20);
    }
}

#[test]
fn equal_packets_reduce_to_single_density() {
    let p = pair(1.0, 2.0, 1.0, 2.0, Boson);
    for (x, tau) in [(0.0, 0.0), (3.0, 1.0), (25.0, 12.0)] {
        let a = boson_density_dx(&p, x, tau).unwrap();
        let b = free_density(&p.state1, x, tau).unwrap();
        assert!((a - b).abs() <= 1e-13 * b.max(1e-300));
        let c = boson_density_dk(&p, x, tau).unwrap();
        assert!((c - b).abs() <= 1e-13 * b.max(1e-300));
    }
}

#[test]
fn overlap_special_values() {
    for tau in [0.0, 1.0, 7.5] {
        assert_eq!(
            overlap_o(&pair(0.0, 1.0, 0.3, 1.2, Distinguishable), tau).unwrap(),
            1.0
        );
        assert!((overlap_o(&pair(0.0, 1.0, 0.0, 1.0, Boson), tau).unwrap() - 1.0).abs() < 1e-15);
    }
    let f = pair(0.0, 1.0, 1e-4, 1.0, Fermion);
    assert!((overlap_o(&f, 2.0).unwrap() - 0.5).abs() < 1e-6);
    for tau in [0.0, 0.5, 3.0, 30.0] {
        assert!((overlap_o(&f, tau).unwrap() - 4.0 / (4.0 + tau * tau)).abs() < 1e-6);
    }
    assert!(overlap_o(&pair(0.0, 1.0, 0.0, 1.0, Fermion), 1.0).is_err());
    assert!(
        (overlap_limits(Fermion, 0.0, 0.0, 0.1, OverlapLimit::ShortTime) - 0.9975).abs() < 1e-15
    );
}

#[test]
fn limit_forms_track_full_overlap() {
    let d = 1e-2;
    for stats in [Boson, Fermion] {
        let p = pair(0.0, 1.0, d, 1.0, stats);
        for tau in linspace(0.0, 10.0, 101) {
            let full = overlap_o(&p, tau).unwrap();
            let lim = overlap_limits(stats, d, 0.0, tau, OverlapLimit::SmallSeparation);
            assert!(
                (full - lim).abs() <= 10.0 * d * d * full,
                "{stats:?} tau={tau}"
            );
        }
    }
}

#[test]
fn short_time_residuals_are_quartic() {
    let (dx, dk) = (1e-3, 1e-3);
    let sep = dx * dx + dk * dk;
    let b = pair(0.0, 1.0, dx, 1.0 + dk, Boson);
    let f = b.with_stats(Fermion);
    for tau in [0.05, 0.1, 0.2] {
        let t4 = tau * tau * tau * tau;
        let rb = (overlap_o(&b, tau).unwrap()
            - overlap_limits(Boson, dx, dk, tau, OverlapLimit::ShortTime))
        .abs();
        let rf = (overlap_o(&f, tau).unwrap()
            - overlap_limits(Fermion, dx, dk, tau, OverlapLimit::ShortTime))
        .abs();
        assert!(
            (rb / (sep * t4) * 32.0 - 1.0).abs() < 0.05,
            "boson tau={tau}"
        );
        assert!((rf / t4 * 16.0 - 1.0).abs() < 0.05, "fermion tau={tau}");
    }
}

#[test]
fn survival_matches_two_particle_overlap() {
    let n = 401;
    for stats in ExchangeStatistics::ALL {
        let p = pair(-0.6, 0.4, 0.5, -0.2, stats);
        let tau = 0.8;
        let xs = linspace(-10.0, 10.0, n);
        let wt = simpson_weights(n, xs[1] - xs[0]);
        let mut s = Complex64::new(0.0, 0.0);
        for (a, wa) in xs.iter().zip(&wt) {
            for (b, wb) in xs.iter().zip(&wt) {
                s += wa
                    * wb
                    * pair_psi_free(&p, *a, *b, 0.0).unwrap().conj()
                    * pair_psi_free(&p, *a, *b, tau).unwrap();
            }
        }
        let got = survival_pair(&p, tau).unwrap();
        assert!((got - s).norm() < 1e-9, "{stats:?}: {got} vs {s}");
        let single =
            survival_single(&p.state1, tau).unwrap() * survival_single(&p.state2, tau).unwrap();
        let rebuilt = single.norm_sqr() * overlap_o(&p, tau).unwrap();
        assert!((got.norm_sqr() - rebuilt).abs() < 1e-13);
    }
    let _ = free_psi;
}

proptest! {
    #[test]
    fn exchange_symmetry(x1 in -5.0f64..5.0, x2 in -5.0f64..5.0, k1 in -3.0f64..3.0, k2 in -3.0f64..3.0,
                         x in -20.0f64..20.0, tau in 0.0f64..10.0, si in 0usize..3) {
        let p = pair(x1, k1, x2, k2, ExchangeStatistics::ALL[si]);
        prop_assume!(p.separation_sq() > 1e-6);
        let a = pair_density_free(&p, x, tau).unwrap();
        let b = pair_density_free(&p.swapped(), x, tau).unwrap();
        prop_assert!((a - b).abs() <= 1e-13 * a.abs().max(1e-300));
        prop_assert!(a >= -1e-12);
    }

    #[test]
    fn overlap_ordering_at_small_separation(tau in 0.0f64..50.0, angle in 0.0f64..std::f64::consts::TAU) {
        let (dx, dk) = (1e-2 * angle.cos(), 1e-2 * angle.sin());
        let b = overlap_o(&pair(0.0, 1.0, dx, 1.0 + dk, Boson), tau).unwrap();
        let f = overlap_o(&pair(0.0, 1.0, dx, 1.0 + dk, Fermion), tau).unwrap();
        prop_assert!(f <= 1.0 + 1e-15 && 1.0 <= b + 1e-15);
        prop_assert!(overlap_limits(Boson, dx, dk, tau, OverlapLimit::SmallSeparation) >= 1.0);
    }

    #[test]
    fn long_time_inverse_tau(si in 0usize..3, d in 0.3f64..2.0, k in 0.1f64..0.6) {
        let p = pair(-d / 2.0, k, d / 2.0, k, ExchangeStatistics::ALL[si]);
        let taus: Vec<f64> = (0..=20).map(|i| 1e3 * 100f64.powf(i as f64 / 20.0)).collect();
        let rho: Vec<f64> = taus.iter().map(|&t| pair_density_free(&p, 1.0, t).unwrap()).collect();
        let slope = flightsym::analysis::tail_exponent(&taus, &rho).unwrap();
        prop_assert!((slope + 1.0).abs() < 0.02, "slope {}", slope);
    }
}
