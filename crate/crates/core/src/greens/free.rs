//! Free outgoing Green function of Δ + κ² with the normalization
//! (Δ + κ²) G⁺ = δ.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geom::{self, Vec2};
use crate::special::{bessel_j0, bessel_j1, bessel_y0, bessel_y1};

/// G⁺ in d dimensions at separation x and wavenumber κ > 0 (κ = 0 allowed
/// for d = 3, the Coulomb kernel).
pub fn free_green_plus(x: &[f64], kappa: f64) -> Result<Complex64> {
    let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if r == 0.0 {
        return Err(Error::SingularPoint("free Green function at x = 0".into()));
    }
    match x.len() {
        2 => {
            if kappa <= 0.0 {
                return Err(Error::Config("d = 2 free Green function needs κ > 0".into()));
            }
            Ok(free_green_plus_2d(r, kappa))
        }
        3 => {
            if kappa < 0.0 {
                return Err(Error::Config("κ must be nonnegative".into()));
            }
            let phase = Complex64::from_polar(1.0, kappa * r);
            Ok(-phase / (4.0 * PI * r))
        }
        d => Err(Error::Config(format!("unsupported dimension {d}"))),
    }
}

/// d = 2 kernel: -(i/4) H₀⁽¹⁾(κ r) = Y₀(κr)/4 - i J₀(κr)/4.
#[inline]
pub fn free_green_plus_2d(r: f64, kappa: f64) -> Complex64 {
    let z = kappa * r;
    Complex64::new(0.25 * bessel_y0(z), -0.25 * bessel_j0(z))
}

/// Gradient of the d = 2 kernel with respect to x (at separation x).
pub fn free_green_plus_gradient_2d(x: Vec2, kappa: f64) -> [Complex64; 2] {
    let r = geom::norm(x);
    let z = kappa * r;
    // d/dr [-(i/4) H0(kr)] = (i/4) k H1(kr) = -k/4 Y1 + i k/4 J1
    let dr = Complex64::new(-0.25 * kappa * bessel_y1(z), 0.25 * kappa * bessel_j1(z));
    [dr * (x[0] / r), dr * (x[1] / r)]
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn coulomb_kernel() {
        let g = free_green_plus(&[1.0, 0.0, 0.0], 0.0).unwrap();
        assert_abs_diff_eq!(g.re, -1.0 / (4.0 * PI), epsilon = 1e-15);
        assert_abs_diff_eq!(g.im, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn hankel_kernel_reference() {
        let g = free_green_plus(&[1.0, 0.0], 1.0).unwrap();
        assert_abs_diff_eq!(g.re, 0.022_064_2, epsilon = 1e-7);
        assert_abs_diff_eq!(g.im, -0.191_299_4, epsilon = 1e-7);
    }

    #[test]
    fn singular_origin() {
        assert!(free_green_plus(&[0.0, 0.0], 1.0).is_err());
    }

    #[test]
    fn helmholtz_residual_stencil() {
        // (Δ + κ²) G⁺ = 0 away from the source
        let kappa = 2.0;
        let h = 1e-3;
        let g = |x: f64, y: f64| free_green_plus_2d((x * x + y * y).sqrt(), kappa);
        let (x0, y0) = (0.7, 0.4);
        let lap = (g(x0 + h, y0) + g(x0 - h, y0) + g(x0, y0 + h) + g(x0, y0 - h)
            - 4.0 * g(x0, y0))
            / (h * h);
        let res = lap + g(x0, y0) * kappa * kappa;
        assert!(res.norm() < 1e-4, "residual {}", res.norm());
    }

    #[test]
    fn gradient_consistency() {
        let kappa = 1.5;
        let x = [0.6, -0.3];
        let h = 1e-5;
        let gp = free_green_plus_gradient_2d(x, kappa);
        for d in 0..2 {
            let mut xp = x;
            let mut xm = x;
            xp[d] += h;
            xm[d] -= h;
            let fd = (free_green_plus_2d(geom::norm(xp), kappa)
                - free_green_plus_2d(geom::norm(xm), kappa))
                / (2.0 * h);
            assert!((fd - gp[d]).norm() < 1e-8);
        }
    }
}
