//! Complex error functions.
//!
//! The Faddeeva function w(z) = exp(-z^2) erfc(-iz) is evaluated in the upper
//! half plane by a region-switched scheme (Poppe & Wijers): a power series near
//! the origin, a Laplace continued fraction far away and a Taylor expansion with
//! continued-fraction derivatives in between. The lower half plane follows from
//! w(z) = 2 exp(-z^2) - w(-z).

use num_complex::Complex64;

use crate::error::{Error, Result};

const TWO_OVER_SQRT_PI: f64 = std::f64::consts::FRAC_2_SQRT_PI;
const MAX_EXP: f64 = 708.503_061_461_606;
const MAX_TRIG: f64 = 3.537_118_876_014_22e15;

fn check_finite(z: Complex64) -> Result<()> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("non-finite argument {z}")))
    }
}

/// w(z) for the closed upper half plane, returned together with the
/// series-branch factor exp(-z^2) so the reflection can reuse it.
fn w_first_quadrant(x: f64, y: f64) -> (Complex64, Option<Complex64>) {
    let qx = x / 6.3;
    let qy = y / 4.4;
    let qrho = qx * qx + qy * qy;
    let xquad = x * x - y * y;
    let yquad = 2.0 * x * y;

    if qrho < 0.085264 {
        let rho = (1.0 - 0.85 * qy) * qrho.sqrt();
        let n = (6.0 + 72.0 * rho).round() as i32;
        let mut j = 2 * n + 1;
        let mut xsum = 1.0 / j as f64;
        let mut ysum = 0.0;
        for i in (1..=n).rev() {
            j -= 2;
            let fi = i as f64;
            let xaux = (xsum * xquad - ysum * yquad) / fi;
            ysum = (xsum * yquad + ysum * xquad) / fi;
            xsum = xaux + 1.0 / j as f64;
        }
        let u1 = 1.0 - TWO_OVER_SQRT_PI * (xsum * y + ysum * x);
        let v1 = TWO_OVER_SQRT_PI * (xsum * x - ysum * y);
        let e = (-xquad).exp();
        let g = Complex64::new(e * yquad.cos(), -e * yquad.sin());
        return (Complex64::new(u1, v1) * g, Some(g));
    }

    let (h, kapn, nu) = if qrho > 1.0 {
        let rho = qrho.sqrt();
        (0.0, 0, (3.0 + 1442.0 / (26.0 * rho + 77.0)) as i32)
    } else {
        let rho = (1.0 - qy) * (1.0 - qrho).sqrt();
        (
            1.88 * rho,
            (7.0 + 34.0 * rho).round() as i32,
            (16.0 + 26.0 * rho).round() as i32,
        )
    };
    let h2 = 2.0 * h;
    let mut lambda = if h > 0.0 { h2.powi(kapn) } else { 0.0 };
    let (mut rx, mut ry, mut sx, mut sy) = (0.0, 0.0, 0.0, 0.0);
    for n in (0..=nu).rev() {
        let np1 = (n + 1) as f64;
        let tx = y + h + np1 * rx;
        let ty = x - np1 * ry;
        let c = 0.5 / (tx * tx + ty * ty);
        rx = c * tx;
        ry = c * ty;
        if h > 0.0 && n <= kapn {
            let t = lambda + sx;
            sx = rx * t - ry * sy;
            sy = ry * t + rx * sy;
            lambda /= h2;
        }
    }
    let mut w = if h == 0.0 {
        Complex64::new(TWO_OVER_SQRT_PI * rx, TWO_OVER_SQRT_PI * ry)
    } else {
        Complex64::new(TWO_OVER_SQRT_PI * sx, TWO_OVER_SQRT_PI * sy)
    };
    if y == 0.0 {
        w.re = (-x * x).exp();
    }
    (w, None)
}

/// Faddeeva function w(z) = exp(-z^2) erfc(-iz).
pub fn faddeeva_w(z: Complex64) -> Result<Complex64> {
    check_finite(z)?;
    let x = z.re.abs();
    let y = z.im.abs();
    let (w, series_factor) = w_first_quadrant(x, y);
    if z.im < 0.0 {
        let g2 = match series_factor {
            Some(g) => 2.0 * g,
            None => {
                let xquad = y * y - x * x;
                let yquad = 2.0 * x * y;
                if xquad > MAX_EXP || yquad > MAX_TRIG {
                    return Err(Error::Overflow(format!("w({z})")));
                }
                let e = 2.0 * xquad.exp();
                Complex64::new(e * yquad.cos(), -e * yquad.sin())
            }
        };
        let mut r = g2 - w;
        if z.re > 0.0 {
            r.im = -r.im;
        }
        Ok(r)
    } else {
        Ok(if z.re < 0.0 { w.conj() } else { w })
    }
}

/// Scaled complementary error function exp(z^2) erfc(z) = w(iz).
pub fn erfcx_complex(z: Complex64) -> Result<Complex64> {
    check_finite(z)?;
    faddeeva_w(Complex64::new(-z.im, z.re))
}

/// Complementary error function of complex argument.
pub fn erfc_complex(z: Complex64) -> Result<Complex64> {
    check_finite(z)?;
    if z.re < 0.0 {
        return Ok(2.0 - erfc_complex(-z)?);
    }
    let z2 = z * z;
    if -z2.re < -745.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    if -z2.re > MAX_EXP {
        return Err(Error::Overflow(format!("erfc({z})")));
    }
    Ok((-z2).exp() * erfcx_complex(z)?)
}
