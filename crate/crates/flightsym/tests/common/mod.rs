#![allow(dead_code)]

use flightsym::wavepacket::{free_psi, CoherentState};
use flightsym::Complex64;
use std::f64::consts::PI;

/// Composite Simpson rule with `n` (rounded up to even) panels.
pub fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    let n = n + n % 2;
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + h * i as f64);
    }
    s * h / 3.0
}

/// Simpson weights on a uniform grid of odd length.
pub fn simpson_weights(n: usize, h: f64) -> Vec<f64> {
    assert!(n % 2 == 1 && n >= 3);
    (0..n)
        .map(|i| {
            let w = if i == 0 || i == n - 1 {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            w * h / 3.0
        })
        .collect()
}

pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
        .collect()
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

/// Stationary scattering states summed over momentum with the packet's own
/// momentum amplitude, which is itself obtained by quadrature.
pub struct MomentumOracle {
    ks: Vec<f64>,
    wk: Vec<f64>,
    phi: Vec<Complex64>,
    c: f64,
}

impl MomentumOracle {
    pub fn new(s: &CoherentState, c: f64) -> Self {
        let n = 1601;
        let xs = linspace(s.center_x - 12.0, s.center_x + 12.0, n);
        let wx = simpson_weights(n, xs[1] - xs[0]);
        let ks = linspace(s.center_k - 9.0, s.center_k + 9.0, n);
        let wk = simpson_weights(n, ks[1] - ks[0]);
        let psi0: Vec<Complex64> = xs.iter().map(|&y| free_psi(s, y, 0.0).unwrap()).collect();
        let phi = ks
            .iter()
            .map(|k| {
                xs.iter()
                    .zip(&wx)
                    .zip(&psi0)
                    .map(|((y, w), p)| w * p * Complex64::new(0.0, -k * y).exp())
                    .sum()
            })
            .collect();
        Self { ks, wk, phi, c }
    }

    pub fn eval(&self, x: f64, tau: f64) -> Complex64 {
        let mut out = Complex64::new(0.0, 0.0);
        for ((k, w), p) in self.ks.iter().zip(&self.wk).zip(&self.phi) {
            let alpha = self.c / k;
            let t = 1.0 / Complex64::new(1.0, alpha);
            let r = Complex64::new(0.0, -alpha) * t;
            let evo = Complex64::new(0.0, -0.5 * k * k * tau).exp();
            let u = if x >= 0.0 {
                t * Complex64::new(0.0, k * x).exp()
            } else {
                Complex64::new(0.0, k * x).exp() + r * Complex64::new(0.0, -k * x).exp()
            };
            out += w * p * u * evo;
        }
        out / (2.0 * PI)
    }
}
