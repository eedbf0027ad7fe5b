//! Adaptive Dormand–Prince (RK45) integrator for small real systems,
//! used by the radial ODE oracles.

/// Integrate y' = f(t, y) from t0 to t1 with adaptive step control.
/// Returns y(t1).
pub fn rk45<F, const N: usize>(
    f: F,
    t0: f64,
    t1: f64,
    y0: [f64; N],
    rtol: f64,
    atol: f64,
) -> [f64; N]
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    // Dormand-Prince coefficients
    const A21: f64 = 1.0 / 5.0;
    const A31: f64 = 3.0 / 40.0;
    const A32: f64 = 9.0 / 40.0;
    const A41: f64 = 44.0 / 45.0;
    const A42: f64 = -56.0 / 15.0;
    const A43: f64 = 32.0 / 9.0;
    const A51: f64 = 19372.0 / 6561.0;
    const A52: f64 = -25360.0 / 2187.0;
    const A53: f64 = 64448.0 / 6561.0;
    const A54: f64 = -212.0 / 729.0;
    const A61: f64 = 9017.0 / 3168.0;
    const A62: f64 = -355.0 / 33.0;
    const A63: f64 = 46732.0 / 5247.0;
    const A64: f64 = 49.0 / 176.0;
    const A65: f64 = -5103.0 / 18656.0;
    const B1: f64 = 35.0 / 384.0;
    const B3: f64 = 500.0 / 1113.0;
    const B4: f64 = 125.0 / 192.0;
    const B5: f64 = -2187.0 / 6784.0;
    const B6: f64 = 11.0 / 84.0;
    const E1: f64 = 71.0 / 57600.0;
    const E3: f64 = -71.0 / 16695.0;
    const E4: f64 = 71.0 / 1920.0;
    const E5: f64 = -17253.0 / 339200.0;
    const E6: f64 = 22.0 / 525.0;
    const E7: f64 = -1.0 / 40.0;

    let dir = (t1 - t0).signum();
    let mut t = t0;
    let mut y = y0;
    let mut h = (t1 - t0).abs().min(1e-2).max(1e-12) * dir;
    let mut k1 = f(t, &y);
    let mut steps = 0usize;
    while (t1 - t) * dir > 0.0 && steps < 2_000_000 {
        steps += 1;
        if ((t + h) - t1) * dir > 0.0 {
            h = t1 - t;
        }
        let add = |y: &[f64; N], cs: &[(f64, &[f64; N])]| {
            let mut out = *y;
            for (c, k) in cs {
                for i in 0..N {
                    out[i] += h * c * k[i];
                }
            }
            out
        };
        let y2 = add(&y, &[(A21, &k1)]);
        let k2 = f(t + 0.2 * h, &y2);
        let y3 = add(&y, &[(A31, &k1), (A32, &k2)]);
        let k3 = f(t + 0.3 * h, &y3);
        let y4 = add(&y, &[(A41, &k1), (A42, &k2), (A43, &k3)]);
        let k4 = f(t + 0.8 * h, &y4);
        let y5 = add(&y, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]);
        let k5 = f(t + 8.0 / 9.0 * h, &y5);
        let y6 = add(
            &y,
            &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
        );
        let k6 = f(t + h, &y6);
        let ynew = add(&y, &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)]);
        let k7 = f(t + h, &ynew);
        // error estimate
        let mut err: f64 = 0.0;
        for i in 0..N {
            let e = h
                * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let sc = atol + rtol * y[i].abs().max(ynew[i].abs());
            err = err.max((e / sc).abs());
        }
        if err <= 1.0 {
            t += h;
            y = ynew;
            k1 = k7;
        }
        let fac = (0.9 * err.powf(-0.2)).clamp(0.2, 5.0);
        h *= fac;
        if h.abs() < 1e-15 {
            h = 1e-15 * dir;
        }
    }
    y
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator() {
        // y'' = -y from [0, pi/2]: y(0)=0, y'(0)=1 -> y=sin
        let y = rk45(
            |_t, y: &[f64; 2]| [y[1], -y[0]],
            0.0,
            std::f64::consts::FRAC_PI_2,
            [0.0, 1.0],
            1e-12,
            1e-14,
        );
        assert!((y[0] - 1.0).abs() < 1e-10);
        assert!(y[1].abs() < 1e-10);
    }

    #[test]
    fn bessel_equation() {
        // u'' + u'/r + (1 - 9/r^2) u = 0 -> J_3(r); start from series values at r=0.1
        let r0 = 0.1;
        let u0 = crate::special::bessel_jn(3, r0);
        let up0 = crate::special::bessel_jn_prime(3, r0);
        let y = rk45(
            |r, y: &[f64; 2]| [y[1], -y[1] / r - (1.0 - 9.0 / (r * r)) * y[0]],
            r0,
            2.5,
            [u0, up0],
            1e-12,
            1e-16,
        );
        assert!((y[0] - crate::special::bessel_jn(3, 2.5)).abs() < 1e-11);
    }
}
