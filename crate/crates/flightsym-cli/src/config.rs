//! Plain-text run configuration: one `key = value` per line, `#` starts a comment.
//!
//! Every key has a default. Unknown or repeated keys are errors, so a typo
//! never silently falls back to a default.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use flightsym::analysis::{BarrierScenario, Case, GAMMA_0, SCAN_GAMMAS};
use flightsym::barrier::{Channel, EpsilonConvention, Propagator};
use flightsym::flighttime::{QuadratureSpec, Scheme};
use flightsym::pairstats::ExchangeStatistics;
use flightsym::relkin::RelativisticState;
use flightsym::wavepacket::CoherentState;

/// Relativistic pair settings. Centres and speeds left unset take the
/// defaults of the non-relativistic case they run under.
#[derive(Clone, Debug, PartialEq)]
pub struct RelConfig {
    pub x1: Option<f64>,
    pub x2: Option<f64>,
    pub beta1: Option<f64>,
    pub beta2: Option<f64>,
    pub kappa: f64,
    /// Only recorded; the reduced quantities above already fix the run.
    pub gamma_width: f64,
    pub screen_x: f64,
    pub tau_max: f64,
    pub tau_points: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioConfig {
    pub cases: Vec<Case>,
    /// Explicit states, only for the custom case.
    pub x1: Option<f64>,
    pub k1: Option<f64>,
    pub x2: Option<f64>,
    pub k2: Option<f64>,
    pub statistics: Vec<ExchangeStatistics>,
    pub channels: Vec<Channel>,
    pub gamma_width: f64,
    pub epsilon: f64,
    pub coupling: Option<f64>,
    pub convention: EpsilonConvention,
    pub propagator: Propagator,
    pub screen_x: f64,
    pub quadrature: QuadratureSpec,
    pub initial_halfwidth: f64,
    pub initial_points: usize,
    pub survival_tau_max: f64,
    pub survival_points: usize,
    pub rel: RelConfig,
    pub scan_gammas: Vec<f64>,
    pub output_dir: PathBuf,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            cases: vec![Case::I, Case::II],
            x1: None,
            k1: None,
            x2: None,
            k2: None,
            statistics: ExchangeStatistics::ALL.to_vec(),
            channels: vec![Channel::Transmitted, Channel::Reflected],
            gamma_width: GAMMA_0,
            epsilon: 1.0,
            coupling: None,
            convention: EpsilonConvention::AlphaOfK,
            propagator: Propagator::Asymptotic,
            screen_x: 450.0,
            quadrature: QuadratureSpec::default(),
            initial_halfwidth: 6.0,
            initial_points: 1201,
            survival_tau_max: 10.0,
            survival_points: 1001,
            rel: RelConfig {
                x1: None,
                x2: None,
                beta1: None,
                beta2: None,
                kappa: 1.0,
                gamma_width: 0.0025,
                screen_x: 0.0,
                tau_max: 8.0,
                tau_points: 1601,
            },
            scan_gammas: SCAN_GAMMAS.to_vec(),
            output_dir: PathBuf::from("results"),
        }
    }
}

fn parse_f64(key: &str, v: &str) -> Result<f64> {
    let x: f64 = v
        .parse()
        .map_err(|_| anyhow!("key '{key}': expected a number, got '{v}'"))?;
    if !x.is_finite() {
        bail!("key '{key}': value must be finite, got '{v}'");
    }
    Ok(x)
}

fn parse_positive(key: &str, v: &str) -> Result<f64> {
    let x = parse_f64(key, v)?;
    if x <= 0.0 {
        bail!("key '{key}': value must be positive, got '{v}'");
    }
    Ok(x)
}

fn parse_usize(key: &str, v: &str) -> Result<usize> {
    v.parse()
        .map_err(|_| anyhow!("key '{key}': expected a non-negative integer, got '{v}'"))
}

fn parse_list<T>(key: &str, v: &str, item: impl Fn(&str) -> Option<T>) -> Result<Vec<T>> {
    let out: Vec<T> = v
        .split(',')
        .map(|s| {
            item(s.trim()).ok_or_else(|| anyhow!("key '{key}': unrecognized entry '{}'", s.trim()))
        })
        .collect::<Result<_>>()?;
    if out.is_empty() {
        bail!("key '{key}': empty list");
    }
    Ok(out)
}

fn join<T>(items: &[T], f: impl Fn(&T) -> String) -> String {
    items.iter().map(f).collect::<Vec<_>>().join(",")
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "none".to_string(), |x| format!("{x}"))
}

fn parse_opt(key: &str, v: &str) -> Result<Option<f64>> {
    if v == "none" {
        Ok(None)
    } else {
        parse_f64(key, v).map(Some)
    }
}

impl ScenarioConfig {
    pub const KEYS: [&'static str; 36] = [
        "case",
        "x1",
        "k1",
        "x2",
        "k2",
        "statistics",
        "channels",
        "gamma_width",
        "epsilon",
        "coupling",
        "epsilon_convention",
        "propagator",
        "screen_x",
        "z_window_halfwidth",
        "z_points",
        "tau_max",
        "tau_max_factor",
        "tau_points",
        "tail_tolerance",
        "scheme",
        "adaptive_tolerance",
        "initial_halfwidth",
        "initial_points",
        "survival_tau_max",
        "survival_points",
        "rel_x1",
        "rel_x2",
        "rel_beta1",
        "rel_beta2",
        "kappa",
        "rel_gamma_width",
        "rel_screen_x",
        "rel_tau_max",
        "rel_tau_points",
        "scan_gammas",
        "output_dir",
    ];

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let v = value.trim();
        let q = &mut self.quadrature;
        match key {
            "case" => self.cases = parse_list(key, v, Case::from_tag)?,
            "x1" => self.x1 = parse_opt(key, v)?,
            "k1" => self.k1 = parse_opt(key, v)?,
            "x2" => self.x2 = parse_opt(key, v)?,
            "k2" => self.k2 = parse_opt(key, v)?,
            "statistics" => self.statistics = parse_list(key, v, ExchangeStatistics::from_tag)?,
            "channels" => {
                self.channels = parse_list(key, v, |s| {
                    Channel::from_tag(s).filter(|c| *c != Channel::Free)
                })?
            }
            "gamma_width" => self.gamma_width = parse_positive(key, v)?,
            "epsilon" => self.epsilon = parse_f64(key, v)?,
            "coupling" => self.coupling = parse_opt(key, v)?,
            "epsilon_convention" => {
                self.convention = EpsilonConvention::from_tag(v)
                    .ok_or_else(|| anyhow!("key '{key}': unrecognized convention '{v}'"))?
            }
            "propagator" => {
                self.propagator = Propagator::from_tag(v)
                    .ok_or_else(|| anyhow!("key '{key}': unrecognized propagator '{v}'"))?
            }
            "screen_x" => self.screen_x = parse_f64(key, v)?,
            "z_window_halfwidth" => q.z_window_halfwidth = parse_positive(key, v)?,
            "z_points" => q.z_points = parse_usize(key, v)?,
            "tau_max" => q.tau_max = parse_opt(key, v)?,
            "tau_max_factor" => q.tau_max_factor = parse_positive(key, v)?,
            "tau_points" => q.tau_points = parse_usize(key, v)?,
            "tail_tolerance" => q.tail_tolerance = parse_positive(key, v)?,
            "scheme" => {
                q.scheme = Scheme::from_tag(v)
                    .ok_or_else(|| anyhow!("key '{key}': unrecognized scheme '{v}'"))?
            }
            "adaptive_tolerance" => q.adaptive_tolerance = parse_positive(key, v)?,
            "initial_halfwidth" => self.initial_halfwidth = parse_positive(key, v)?,
            "initial_points" => self.initial_points = parse_usize(key, v)?,
            "survival_tau_max" => self.survival_tau_max = parse_positive(key, v)?,
            "survival_points" => self.survival_points = parse_usize(key, v)?,
            "rel_x1" => self.rel.x1 = parse_opt(key, v)?,
            "rel_x2" => self.rel.x2 = parse_opt(key, v)?,
            "rel_beta1" => self.rel.beta1 = parse_opt(key, v)?,
            "rel_beta2" => self.rel.beta2 = parse_opt(key, v)?,
            "kappa" => self.rel.kappa = parse_positive(key, v)?,
            "rel_gamma_width" => self.rel.gamma_width = parse_positive(key, v)?,
            "rel_screen_x" => self.rel.screen_x = parse_f64(key, v)?,
            "rel_tau_max" => self.rel.tau_max = parse_positive(key, v)?,
            "rel_tau_points" => self.rel.tau_points = parse_usize(key, v)?,
            "scan_gammas" => {
                self.scan_gammas =
                    parse_list(key, v, |s| s.parse().ok().filter(|g: &f64| *g > 0.0))?
            }
            "output_dir" => {
                if v.is_empty() {
                    bail!("key '{key}': empty path");
                }
                self.output_dir = PathBuf::from(v)
            }
            _ => bail!("unknown configuration key '{key}'"),
        }
        Ok(())
    }

    /// Applies a config file on top of the current values.
    pub fn apply_str(&mut self, text: &str) -> Result<()> {
        let mut seen = std::collections::HashSet::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| anyhow!("line {}: expected 'key = value', got '{line}'", i + 1))?;
            let key = key.trim();
            if !seen.insert(key.to_string()) {
                bail!("line {}: key '{key}' given twice", i + 1);
            }
            self.set(key, value)
                .with_context(|| format!("line {}", i + 1))?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text =
            std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        self.apply_str(&text)
            .with_context(|| format!("in {}", path.display()))
    }

    /// `KEY=VALUE` override from the command line.
    pub fn apply_assignment(&mut self, s: &str) -> Result<()> {
        let (k, v) = s
            .split_once('=')
            .ok_or_else(|| anyhow!("expected KEY=VALUE, got '{s}'"))?;
        self.set(k.trim(), v)
    }

    /// Resolved settings in config-file syntax; parsing the result reproduces `self`.
    pub fn to_config_text(&self) -> String {
        let q = &self.quadrature;
        let r = &self.rel;
        let values: [String; 36] = [
            join(&self.cases, |c| c.tag().to_string()),
            opt(self.x1),
            opt(self.k1),
            opt(self.x2),
            opt(self.k2),
            join(&self.statistics, |s| s.tag().to_string()),
            join(&self.channels, |c| c.tag().to_string()),
            format!("{}", self.gamma_width),
            format!("{}", self.epsilon),
            opt(self.coupling),
            self.convention.tag().to_string(),
            self.propagator.tag().to_string(),
            format!("{}", self.screen_x),
            format!("{}", q.z_window_halfwidth),
            format!("{}", q.z_points),
            opt(q.tau_max),
            format!("{}", q.tau_max_factor),
            format!("{}", q.tau_points),
            format!("{:e}", q.tail_tolerance),
            q.scheme.tag().to_string(),
            format!("{:e}", q.adaptive_tolerance),
            format!("{}", self.initial_halfwidth),
            format!("{}", self.initial_points),
            format!("{}", self.survival_tau_max),
            format!("{}", self.survival_points),
            opt(r.x1),
            opt(r.x2),
            opt(r.beta1),
            opt(r.beta2),
            format!("{}", r.kappa),
            format!("{}", r.gamma_width),
            format!("{}", r.screen_x),
            format!("{}", r.tau_max),
            format!("{}", r.tau_points),
            join(&self.scan_gammas, |g| format!("{g:e}")),
            self.output_dir.display().to_string(),
        ];
        let mut out = String::new();
        for (k, v) in Self::KEYS.iter().zip(&values) {
            let _ = writeln!(out, "{k} = {v}");
        }
        out
    }

    /// Barrier scenario for one case, with this run's barrier and screen settings.
    pub fn scenario(&self, case: Case) -> Result<BarrierScenario> {
        let explicit = [self.x1, self.k1, self.x2, self.k2];
        let mut sc = match case {
            Case::Custom => match explicit {
                [Some(x1), Some(k1), Some(x2), Some(k2)] => BarrierScenario::custom(
                    case,
                    CoherentState::new(x1, k1),
                    CoherentState::new(x2, k2),
                ),
                _ => bail!("case 'custom' needs x1, k1, x2 and k2"),
            },
            _ => {
                if explicit.iter().any(Option::is_some) {
                    bail!("x1, k1, x2, k2 only apply to case 'custom'");
                }
                BarrierScenario::case(case)?
            }
        };
        sc.epsilon = self.epsilon;
        sc.coupling = self.coupling;
        sc.screen_x = self.screen_x;
        sc.gamma_width = self.gamma_width;
        sc.propagator = self.propagator;
        Ok(sc)
    }

    /// Relativistic pair for one case: case I defaults to two packets at
    /// the same speed, case II to two speeds at the same place.
    pub fn rel_pair(&self, case: Case) -> Result<(RelativisticState, RelativisticState)> {
        let r = &self.rel;
        let defaults = match case {
            Case::I => Some((-3.5, -3.0, 0.99, 0.99)),
            Case::II => Some((-3.0, -3.0, 0.984, 0.996)),
            Case::Custom => None,
        };
        let pick = |v: Option<f64>, d: Option<f64>, name: &str| {
            v.or(d)
                .ok_or_else(|| anyhow!("case 'custom' needs {name} for relativistic runs"))
        };
        let x1 = pick(r.x1, defaults.map(|d| d.0), "rel_x1")?;
        let x2 = pick(r.x2, defaults.map(|d| d.1), "rel_x2")?;
        let b1 = pick(r.beta1, defaults.map(|d| d.2), "rel_beta1")?;
        let b2 = pick(r.beta2, defaults.map(|d| d.3), "rel_beta2")?;
        Ok((
            RelativisticState::new(x1, b1, r.kappa)?,
            RelativisticState::new(x2, b2, r.kappa)?,
        ))
    }
}
