use anyhow::{bail, Result};
use flightsym::analysis::{gamma_scan, linear_fit, scenario_distributions, Case};
use flightsym::barrier::Channel;
use flightsym::flighttime::{free_distribution, mean_flight_time, FlightTimeDistribution};
use flightsym::pairstats::{
    fermion_coincident_density, overlap_o, pair_density_free, survival_pair, ExchangeStatistics,
    ParticlePair,
};
use flightsym::relkin::{rel_pair_screen_density, rigid_reference_density, Species};

use crate::config::ScenarioConfig;
use crate::output::{num, Columns, Provenance, RunOutput};

fn linspace(a: f64, b: f64, n: usize) -> Result<Vec<f64>> {
    if n < 2 {
        bail!("a grid needs at least 2 points, got {n}");
    }
    Ok((0..n)
        .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
        .collect())
}

fn series(stats: ExchangeStatistics, channel: Channel) -> String {
    format!("{}_{}", stats.tag(), channel.tag())
}

fn provenance<'a>(
    cfg: &'a ScenarioConfig,
    command: &'a str,
    case: Case,
    fingerprint: String,
) -> Provenance<'a> {
    Provenance {
        command,
        case: case.tag(),
        convention: cfg.convention.tag(),
        fingerprint,
    }
}

fn note_support(out: &mut RunOutput, case: Case, d: &FlightTimeDistribution) {
    if let Some(rho) = d.diagnostics.screen_support {
        out.note(format!(
            "case {} {}: screen X = {} inside initial support (density {rho:e})",
            case.tag(),
            series(d.stats, d.channel),
            d.screen_x
        ));
    }
}

/// One-particle density at `x`, taking the coincident limit for a degenerate fermion pair.
fn one_particle_density(pair: &ParticlePair, x: f64, tau: f64) -> Result<f64> {
    if pair.stats == ExchangeStatistics::Fermion && pair.is_degenerate() {
        Ok(fermion_coincident_density(&pair.state1, x, tau)?)
    } else {
        Ok(pair_density_free(pair, x, tau)?)
    }
}

/// Initial densities and free screen-arrival densities.
pub fn free_dist(cfg: &ScenarioConfig, out: &mut RunOutput) -> Result<()> {
    for &case in &cfg.cases {
        let sc = cfg.scenario(case)?;
        let c = sc.mean_x();
        let x = linspace(
            c - cfg.initial_halfwidth,
            c + cfg.initial_halfwidth,
            cfg.initial_points,
        )?;
        let mut init = Columns::new("x", x.clone());
        let mut dist: Option<Columns> = None;
        for &s in &cfg.statistics {
            let pair = ParticlePair::new(sc.state1, sc.state2, s);
            init.push(
                format!("{}_initial", s.tag()),
                x.iter()
                    .map(|&v| one_particle_density(&pair, v, 0.0))
                    .collect::<Result<_>>()?,
            );
            let d = free_distribution(&pair, sc.screen_x, &cfg.quadrature)?;
            note_support(out, case, &d);
            let cols = dist.get_or_insert_with(|| Columns::new("tau", d.tau_grid.clone()));
            cols.push(series(s, Channel::Free), d.density.clone());
            cols.push(
                format!("{}_rel", series(s, Channel::Free)),
                d.peak_normalized(),
            );
        }
        let fp = cfg.quadrature.fingerprint();
        out.write_columns(
            &format!("initial_density_{}.csv", case.tag()),
            &provenance(
                cfg,
                "free-dist",
                case,
                format!(
                    "x_halfwidth={} x_points={}",
                    cfg.initial_halfwidth, cfg.initial_points
                ),
            ),
            &init,
        )?;
        out.write_columns(
            &format!("free_dist_{}.csv", case.tag()),
            &provenance(cfg, "free-dist", case, fp),
            &dist.expect("statistics list is never empty"),
        )?;
    }
    Ok(())
}

/// Exchange overlap factor and two-particle survival probability.
pub fn survival(cfg: &ScenarioConfig, out: &mut RunOutput) -> Result<()> {
    let tau = linspace(0.0, cfg.survival_tau_max, cfg.survival_points)?;
    for &case in &cfg.cases {
        let sc = cfg.scenario(case)?;
        let mut cols = Columns::new("tau", tau.clone());
        for &s in &cfg.statistics {
            let pair = ParticlePair::new(sc.state1, sc.state2, s);
            let o: Vec<f64> = tau
                .iter()
                .map(|&t| overlap_o(&pair, t))
                .collect::<Result<_, _>>()?;
            let p: Vec<f64> = tau
                .iter()
                .map(|&t| survival_pair(&pair, t).map(|a| a.norm_sqr()))
                .collect::<Result<_, _>>()?;
            cols.push(format!("{}_O", s.tag()), o);
            cols.push(format!("{}_survival", s.tag()), p);
        }
        let fp = format!(
            "tau_max={} tau_points={}",
            cfg.survival_tau_max, cfg.survival_points
        );
        out.write_columns(
            &format!("survival_{}.csv", case.tag()),
            &provenance(cfg, "survival", case, fp),
            &cols,
        )?;
    }
    Ok(())
}

/// Photon, electron and rigidly translated electron densities at the relativistic screen.
pub fn rel_dist(cfg: &ScenarioConfig, out: &mut RunOutput) -> Result<()> {
    let r = &cfg.rel;
    let tau = linspace(0.0, r.tau_max, r.tau_points)?;
    for &case in &cfg.cases {
        let (s1, s2) = cfg.rel_pair(case)?;
        let pair = (&s1, &s2);
        let mut cols = Columns::new("tau", tau.clone());
        for &s in &cfg.statistics {
            let at = |f: &dyn Fn(f64) -> flightsym::Result<f64>| {
                tau.iter().map(|&t| f(t)).collect::<Result<Vec<f64>, _>>()
            };
            cols.push(
                format!("{}_photon", s.tag()),
                at(&|t| rel_pair_screen_density(pair, Species::Photon, s, r.screen_x, t))?,
            );
            cols.push(
                format!("{}_electron", s.tag()),
                at(&|t| rel_pair_screen_density(pair, Species::Electron, s, r.screen_x, t))?,
            );
            cols.push(
                format!("{}_rigid", s.tag()),
                at(&|t| rigid_reference_density(pair, s, r.screen_x, t))?,
            );
        }
        out.note(format!(
            "case {} relativistic pair: X = ({}, {}), beta = ({}, {}), K = ({}, {})",
            case.tag(),
            s1.center_x,
            s2.center_x,
            s1.speed_beta,
            s2.speed_beta,
            s1.wavenumber_k,
            s2.wavenumber_k
        ));
        let fp = format!(
            "kappa={} gamma_width={} screen_x={} tau_max={} tau_points={}",
            r.kappa, r.gamma_width, r.screen_x, r.tau_max, r.tau_points
        );
        out.write_columns(
            &format!("rel_dist_{}.csv", case.tag()),
            &provenance(cfg, "rel-dist", case, fp),
            &cols,
        )?;
    }
    Ok(())
}

fn barrier_runs(cfg: &ScenarioConfig, case: Case) -> Result<Vec<FlightTimeDistribution>> {
    let sc = cfg.scenario(case)?;
    Ok(scenario_distributions(
        &sc,
        &cfg.statistics,
        &cfg.channels,
        &cfg.quadrature,
        cfg.convention,
    )?)
}

/// Normalized transmitted and reflected arrival-time distributions.
pub fn barrier_dist(cfg: &ScenarioConfig, out: &mut RunOutput) -> Result<()> {
    for &case in &cfg.cases {
        let dists = barrier_runs(cfg, case)?;
        let mut cols = Columns::new("tau", dists[0].tau_grid.clone());
        for d in &dists {
            debug_assert_eq!(d.tau_grid, dists[0].tau_grid);
            note_support(out, case, d);
            out.note(format!(
                "case {} {}: mean {} tail mass {:e}",
                case.tag(),
                series(d.stats, d.channel),
                num(mean_flight_time(d)?),
                d.diagnostics.tail_mass_fraction
            ));
            cols.push(series(d.stats, d.channel), d.normalized());
        }
        let prov = provenance(cfg, "barrier-dist", case, cfg.quadrature.fingerprint());
        out.write_columns(&format!("barrier_dist_{}.csv", case.tag()), &prov, &cols)?;
    }
    Ok(())
}

/// Mean flight times, one row per case.
pub fn mean_times(cfg: &ScenarioConfig, out: &mut RunOutput) -> Result<()> {
    let mut header = vec!["case".to_string()];
    for &s in &cfg.statistics {
        for &c in &cfg.channels {
            header.push(series(s, c));
        }
    }
    let mut rows = Vec::new();
    for &case in &cfg.cases {
        let dists = barrier_runs(cfg, case)?;
        let mut row = vec![case.tag().to_string()];
        for &s in &cfg.statistics {
            for &c in &cfg.channels {
                let d = dists
                    .iter()
                    .find(|d| d.stats == s && d.channel == c)
                    .expect("requested");
                note_support(out, case, d);
                row.push(num(mean_flight_time(d)?));
            }
        }
        println!("{}", row.join("  "));
        rows.push(row);
    }
    let tags: Vec<&str> = cfg.cases.iter().map(|c| c.tag()).collect();
    let prov = Provenance {
        command: "mean-times",
        case: &tags.join("+"),
        convention: cfg.convention.tag(),
        fingerprint: cfg.quadrature.fingerprint(),
    };
    out.write_csv("mean_times.csv", &prov, &header, &rows)
}

/// Mean times over the configured widths plus their linear fits in the width.
pub fn gamma_scan_cmd(cfg: &ScenarioConfig, out: &mut RunOutput) -> Result<()> {
    let g = &cfg.scan_gammas;
    for &case in &cfg.cases {
        let base = cfg.scenario(case)?;
        let pts = gamma_scan(g, &base, &cfg.statistics, &cfg.quadrature, cfg.convention)?;
        let phase = base.phase_time(cfg.convention)?;
        let mut cols = Columns::new("gamma", g.clone());
        let mut fits = Vec::new();
        for &s in &cfg.statistics {
            let mine: Vec<_> = pts.iter().filter(|p| p.stats == s).collect();
            for (c, y) in [
                (
                    Channel::Transmitted,
                    mine.iter().map(|p| p.mean_tau_t).collect::<Vec<_>>(),
                ),
                (
                    Channel::Reflected,
                    mine.iter().map(|p| p.mean_tau_r).collect(),
                ),
            ] {
                let f = linear_fit(g, &y)?;
                fits.push(vec![
                    series(s, c),
                    num(f.slope_b),
                    num(f.intercept_c),
                    num(f.r_squared),
                    num(f.slope_stderr),
                    num(f.intercept_stderr),
                    num(phase),
                ]);
                println!(
                    "case {} {}: intercept {:.6} R^2 {:.6}",
                    case.tag(),
                    series(s, c),
                    f.intercept_c,
                    f.r_squared
                );
                cols.push(series(s, c), y);
            }
            for p in mine {
                if let Some(rho) = p.reflected_screen_support {
                    out.note(format!(
                        "case {} {} gamma {:e}: reflected screen inside initial support (density {rho:e})",
                        case.tag(),
                        s.tag(),
                        p.gamma_width
                    ));
                }
            }
        }
        let header: Vec<String> = [
            "series",
            "slope",
            "intercept",
            "r_squared",
            "slope_stderr",
            "intercept_stderr",
            "phase_time",
        ]
        .iter()
        .map(|s| s.to_string())
        .collect();
        let fp = cfg.quadrature.fingerprint();
        out.write_columns(
            &format!("gamma_scan_{}.csv", case.tag()),
            &provenance(cfg, "gamma-scan", case, fp.clone()),
            &cols,
        )?;
        out.write_csv(
            &format!("gamma_scan_fit_{}.csv", case.tag()),
            &provenance(cfg, "gamma-scan", case, fp),
            &header,
            &fits,
        )?;
    }
    Ok(())
}
