//! Real-argument Bessel functions, Gauss–Legendre rules, Bessel zeros and the
//! complex exponential integral.
//!
//! `J0/J1/Y0/Y1` use power series for small arguments and the CF1 + CF2 +
//! Wronskian scheme for x >= 2, which keeps full double precision across the
//! mid-range where plain series or truncated asymptotics lose digits.
//! Order sequences come from the usual stable recurrences (downward Miller
//! for J and I, upward for Y and K).

use num_complex::Complex64;
use std::f64::consts::PI;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

// ---------------------------------------------------------------------------
// J0/J1/Y0/Y1
// ---------------------------------------------------------------------------

fn j0_series(x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..40 {
        term *= -q / ((k * k) as f64);
        sum += term;
        if term.abs() < 1e-18 * sum.abs().max(1.0) {
            break;
        }
    }
    sum
}

fn j1_series(x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = 0.5 * x;
    let mut sum = term;
    for k in 1..40 {
        term *= -q / ((k * (k + 1)) as f64);
        sum += term;
        if term.abs() < 1e-18 * sum.abs().max(1e-300) {
            break;
        }
    }
    sum
}

fn y0_series(x: f64) -> f64 {
    // Y0 = (2/pi)[(ln(x/2)+gamma) J0 + sum_{k>=1} (-1)^{k+1} H_k q^k/(k!)^2]
    let q = 0.25 * x * x;
    let mut term = 1.0;
    let mut hk = 0.0;
    let mut sum = 0.0;
    for k in 1..40 {
        term *= -q / ((k * k) as f64);
        hk += 1.0 / k as f64;
        sum -= term * hk;
        if term.abs() < 1e-18 {
            break;
        }
    }
    (2.0 / PI) * (((0.5 * x).ln() + EULER_GAMMA) * j0_series(x) + sum)
}

fn y1_series(x: f64) -> f64 {
    // Y1 = (2/pi)[(ln(x/2)+gamma) J1 - 1/x - (x/4) sum_k (-1)^k (H_k + H_{k+1}) q^k/(k!(k+1)!)]
    let q = 0.25 * x * x;
    let mut term = 1.0; // q^k / (k! (k+1)!) with k=0 -> 1/1
    let mut hk = 0.0;
    let mut hk1 = 1.0;
    let mut sum = term * (hk + hk1);
    for k in 1..40 {
        term *= -q / ((k * (k + 1)) as f64);
        hk += 1.0 / k as f64;
        hk1 += 1.0 / (k + 1) as f64;
        sum += term * (hk + hk1);
        if term.abs() < 1e-18 {
            break;
        }
    }
    (2.0 / PI) * (((0.5 * x).ln() + EULER_GAMMA) * j1_series(x) - 1.0 / x - 0.25 * x * sum)
}

/// J0 and J1 simultaneously by downward Miller recurrence with the
/// normalization J0 + 2 J2 + 2 J4 + ... = 1.  Unambiguous in sign.
fn miller_j01(x: f64) -> (f64, f64) {
    let m = (x.ceil() as usize + 80) & !1usize; // even start order
    let mut jp1 = 0.0_f64; // J_{n+1}
    let mut j = 1e-300_f64; // J_n, seeded arbitrarily small at n = m
    let mut sum = 0.0;
    let mut j1 = 0.0;
    for n in (1..=m).rev() {
        let jm1 = 2.0 * n as f64 / x * j - jp1;
        jp1 = j;
        j = jm1; // now holds J_{n-1}
        if n - 1 == 1 {
            j1 = j;
        }
        if (n - 1) % 2 == 0 && n - 1 >= 2 {
            sum += 2.0 * j;
        }
        if j.abs() > 1e250 {
            let s = 1e-250;
            j *= s;
            jp1 *= s;
            sum *= s;
            j1 *= s;
        }
    }
    sum += j; // J_0 term
    (j / sum, j1 / sum)
}

/// CF2: p + i q = (J' + i Y')/(J + i Y) evaluated at order nu, x >= 2.
/// Steed's algorithm in real arithmetic.
fn cf2(nu: f64, x: f64) -> Complex64 {
    let mut aa = 0.25 - nu * nu;
    let mut p = -0.5 / x;
    let mut q = 1.0;
    let mut br = 2.0 * x;
    let mut bi = 2.0;
    let mut fact = aa / (x * (p * p + q * q));
    let mut cr = br + q * fact;
    let mut ci = bi + p * fact;
    let mut den2 = br * br + bi * bi;
    let mut dr = br / den2;
    let mut di = -bi / den2;
    let mut dlr = cr * dr - ci * di;
    let mut dli = cr * di + ci * dr;
    let mut temp = p * dlr - q * dli;
    q = p * dli + q * dlr;
    p = temp;
    for k in 2..20000 {
        aa += 2.0 * (k as f64 - 1.0);
        bi += 2.0;
        dr = aa * dr + br;
        di = aa * di + bi;
        if dr.abs() + di.abs() < 1e-300 {
            dr = 1e-300;
        }
        fact = aa / (cr * cr + ci * ci);
        cr = br + cr * fact;
        ci = bi - ci * fact;
        if cr.abs() + ci.abs() < 1e-300 {
            cr = 1e-300;
        }
        den2 = dr * dr + di * di;
        dr /= den2;
        di = -di / den2;
        dlr = cr * dr - ci * di;
        dli = cr * di + ci * dr;
        temp = p * dlr - q * dli;
        q = p * dli + q * dlr;
        p = temp;
        if (dlr - 1.0).abs() + dli.abs() < 1e-16 {
            break;
        }
    }
    Complex64::new(p, q)
}

/// J0, Y0 and their derivatives for any x > 0.
fn bessj0y0(x: f64) -> (f64, f64, f64, f64) {
    // returns (J0, Y0, J0', Y0')
    if x < 2.0 {
        let j0 = j0_series(x);
        let y0 = y0_series(x);
        let j1 = j1_series(x);
        let y1 = y1_series(x);
        return (j0, y0, -j1, -y1);
    }
    let (j0, j1) = miller_j01(x);
    let pq = cf2(0.0, x);
    let (p, q) = (pq.re, pq.im);
    // from J0' + i Y0' = (p + iq)(J0 + i Y0) and J0' = -J1:
    let y0 = (p * j0 + j1) / q;
    let y0p = q * j0 + p * y0;
    (j0, y0, -j1, y0p)
}

/// J0(x) for x >= 0.
pub fn bessel_j0(x: f64) -> f64 {
    let x = x.abs();
    if x == 0.0 {
        return 1.0;
    }
    if x < 2.0 {
        j0_series(x)
    } else {
        bessj0y0(x).0
    }
}

/// J1(x); odd in x.
pub fn bessel_j1(x: f64) -> f64 {
    let ax = x.abs();
    let v = if ax == 0.0 {
        0.0
    } else if ax < 2.0 {
        j1_series(ax)
    } else {
        -bessj0y0(ax).2
    };
    if x < 0.0 {
        -v
    } else {
        v
    }
}

/// Y0(x), x > 0.
pub fn bessel_y0(x: f64) -> f64 {
    assert!(x > 0.0, "Y0 needs x > 0");
    if x < 2.0 {
        y0_series(x)
    } else {
        bessj0y0(x).1
    }
}

/// Y1(x), x > 0.
pub fn bessel_y1(x: f64) -> f64 {
    assert!(x > 0.0, "Y1 needs x > 0");
    if x < 2.0 {
        y1_series(x)
    } else {
        -bessj0y0(x).3
    }
}

/// J_0..J_nmax at x (x >= 0) by downward Miller recurrence anchored on J0/J1.
pub fn bessel_j_seq(nmax: usize, x: f64) -> Vec<f64> {
    let mut out = vec![0.0; nmax + 1];
    if x == 0.0 {
        out[0] = 1.0;
        return out;
    }
    let j0 = bessel_j0(x);
    let j1 = bessel_j1(x);
    out[0] = j0;
    if nmax >= 1 {
        out[1] = j1;
    }
    if nmax < 2 {
        return out;
    }
    if (nmax as f64) < x {
        // upward recurrence is stable while n < x
        for n in 1..nmax {
            out[n + 1] = 2.0 * n as f64 / x * out[n] - out[n - 1];
        }
        return out;
    }
    // downward from a padded start order
    let start = nmax + 16 + (x as usize) + ((40 * nmax) as f64).sqrt() as usize;
    let mut jp1 = 0.0f64;
    let mut j = 1e-300;
    let mut tmp = vec![0.0; nmax + 1];
    for n in (1..=start).rev() {
        let jm1 = 2.0 * n as f64 / x * j - jp1;
        jp1 = j;
        j = jm1;
        if n - 1 <= nmax {
            tmp[n - 1] = j;
        }
        if j.abs() > 1e250 {
            // rescale to avoid overflow
            let s = 1e-250;
            j *= s;
            jp1 *= s;
            for t in tmp.iter_mut() {
                *t *= s;
            }
        }
    }
    // normalize against the anchor with the larger magnitude
    let scale = if j0.abs() >= j1.abs() {
        j0 / tmp[0]
    } else {
        j1 / tmp[1]
    };
    for n in 0..=nmax {
        out[n] = tmp[n] * scale;
    }
    out[0] = j0;
    if nmax >= 1 {
        out[1] = j1;
    }
    out
}

/// Y_0..Y_nmax at x > 0 by upward recurrence.  Entries that would overflow
/// are saturated to +-INFINITY; callers truncate their mode sums first.
pub fn bessel_y_seq(nmax: usize, x: f64) -> Vec<f64> {
    assert!(x > 0.0);
    let mut out = vec![0.0; nmax + 1];
    out[0] = bessel_y0(x);
    if nmax >= 1 {
        out[1] = bessel_y1(x);
    }
    for n in 1..nmax {
        let next = 2.0 * n as f64 / x * out[n] - out[n - 1];
        out[n + 1] = if next.is_finite() { next } else { f64::NEG_INFINITY };
    }
    out
}

/// J_n(x) for a single integer order n >= 0.
pub fn bessel_jn(n: usize, x: f64) -> f64 {
    bessel_j_seq(n, x)[n]
}

/// Y_n(x) for a single integer order n >= 0, x > 0.
pub fn bessel_yn(n: usize, x: f64) -> f64 {
    bessel_y_seq(n, x)[n]
}

/// Derivative J_n'(x) from the recurrence J_n' = J_{n-1} - (n/x) J_n.
pub fn bessel_jn_prime(n: usize, x: f64) -> f64 {
    if n == 0 {
        return -bessel_j1(x);
    }
    let seq = bessel_j_seq(n, x);
    seq[n - 1] - n as f64 / x * seq[n]
}

/// Derivative Y_n'(x).
pub fn bessel_yn_prime(n: usize, x: f64) -> f64 {
    if n == 0 {
        return -bessel_y1(x);
    }
    let seq = bessel_y_seq(n, x);
    seq[n - 1] - n as f64 / x * seq[n]
}

/// H^(1)_n(x) = J_n + i Y_n.
pub fn hankel1(n: usize, x: f64) -> Complex64 {
    Complex64::new(bessel_jn(n, x), bessel_yn(n, x))
}

// ---------------------------------------------------------------------------
// Modified Bessel functions
// ---------------------------------------------------------------------------

fn i0_series(x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..200 {
        term *= q / ((k * k) as f64);
        sum += term;
        if term < 1e-17 * sum {
            break;
        }
    }
    sum
}

fn i1_series(x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = 0.5 * x;
    let mut sum = term;
    for k in 1..200 {
        term *= q / ((k * (k + 1)) as f64);
        sum += term;
        if term < 1e-17 * sum.abs().max(1e-300) {
            break;
        }
    }
    sum
}

/// K0 via series (x<1) or the cosh-integral with trapezoid (x>=1).
pub fn bessel_k0(x: f64) -> f64 {
    assert!(x > 0.0);
    if x < 1.0 {
        let q = 0.25 * x * x;
        let mut term = 1.0;
        let mut hk = 0.0;
        let mut sum = 0.0;
        for k in 1..60 {
            term *= q / ((k * k) as f64);
            hk += 1.0 / k as f64;
            sum += term * hk;
            if term < 1e-18 {
                break;
            }
        }
        -((0.5 * x).ln() + EULER_GAMMA) * i0_series(x) + sum
    } else {
        // K0(x) = int_0^inf exp(-x cosh t) dt
        cosh_integral(x, 0)
    }
}

/// K1 via series (x<1) or the cosh-integral (x>=1).
pub fn bessel_k1(x: f64) -> f64 {
    assert!(x > 0.0);
    if x < 1.0 {
        let q = 0.25 * x * x;
        // K1 = ln(x/2) I1 + 1/x - (x/4) sum_k (H_k + H_{k+1}) q^k/(k!(k+1)!) ... with gamma
        let mut term = 1.0;
        let mut hk = 0.0;
        let mut hk1 = 1.0;
        let mut sum = term * (hk + hk1);
        for k in 1..60 {
            term *= q / ((k * (k + 1)) as f64);
            hk += 1.0 / k as f64;
            hk1 += 1.0 / (k + 1) as f64;
            sum += term * (hk + hk1);
            if term < 1e-18 {
                break;
            }
        }
        ((0.5 * x).ln() + EULER_GAMMA) * i1_series(x) + 1.0 / x - 0.25 * x * sum
    } else {
        // K1(x) = int_0^inf exp(-x cosh t) cosh t dt
        cosh_integral(x, 1)
    }
}

fn cosh_integral(x: f64, order: usize) -> f64 {
    // trapezoid on t in [0, T]; integrand analytic and decays doubly fast
    let t_max = ((745.0 / x).max(2.0)).ln().max(2.0) + 2.0;
    let n = 240usize;
    let h = t_max / n as f64;
    let mut sum = 0.5 * (-x).exp() * if order == 1 { 1.0 } else { 1.0 };
    for i in 1..=n {
        let t = h * i as f64;
        let c = t.cosh();
        let e = (-x * c).exp();
        sum += if order == 1 { e * c } else { e };
    }
    sum * h
}

/// I_0..I_nmax by downward Miller anchored on I0.
pub fn bessel_i_seq(nmax: usize, x: f64) -> Vec<f64> {
    let mut out = vec![0.0; nmax + 1];
    if x == 0.0 {
        out[0] = 1.0;
        return out;
    }
    let i0 = if x < 30.0 {
        i0_series(x)
    } else {
        // large-x asymptotic; adequate for the ranges used here
        let mut s = 1.0;
        let mut term = 1.0;
        for k in 1..20 {
            let kf = k as f64;
            term *= (2.0 * kf - 1.0).powi(2) / (8.0 * x * kf);
            s += term;
        }
        x.exp() / (2.0 * PI * x).sqrt() * s
    };
    out[0] = i0;
    if nmax == 0 {
        return out;
    }
    let start = nmax + 16 + (x as usize) + ((40 * nmax) as f64).sqrt() as usize;
    let mut ip1 = 0.0f64;
    let mut iv = 1e-300;
    let mut tmp = vec![0.0; nmax + 1];
    for n in (1..=start).rev() {
        let im1 = 2.0 * n as f64 / x * iv + ip1;
        ip1 = iv;
        iv = im1;
        if n - 1 <= nmax {
            tmp[n - 1] = iv;
        }
        if iv.abs() > 1e250 {
            let s = 1e-250;
            iv *= s;
            ip1 *= s;
            for t in tmp.iter_mut() {
                *t *= s;
            }
        }
    }
    let scale = i0 / tmp[0];
    for n in 0..=nmax {
        out[n] = tmp[n] * scale;
    }
    out[0] = i0;
    out
}

/// K_0..K_nmax by upward recurrence.
pub fn bessel_k_seq(nmax: usize, x: f64) -> Vec<f64> {
    let mut out = vec![0.0; nmax + 1];
    out[0] = bessel_k0(x);
    if nmax >= 1 {
        out[1] = bessel_k1(x);
    }
    for n in 1..nmax {
        let next = 2.0 * n as f64 / x * out[n] + out[n - 1];
        out[n + 1] = if next.is_finite() { next } else { f64::INFINITY };
    }
    out
}

// ---------------------------------------------------------------------------
// Bessel zeros
// ---------------------------------------------------------------------------

/// s-th positive zero of J_n (s >= 1), by McMahon start + Newton.
pub fn bessel_j_zero(n: usize, s: usize) -> f64 {
    let nu = n as f64;
    let b = (s as f64 + 0.5 * nu - 0.25) * PI;
    let mu = 4.0 * nu * nu;
    let mut x = b - (mu - 1.0) / (8.0 * b);
    if n >= 1 && s == 1 {
        // McMahon is poor for the first zero of higher orders
        x = nu + 1.855_757 * nu.powf(1.0 / 3.0) + 1.033_150 * nu.powf(-1.0 / 3.0);
        if n == 1 {
            x = 3.831_705_970_207_512;
        }
    }
    for _ in 0..60 {
        let f = bessel_jn(n, x);
        let fp = bessel_jn_prime(n, x);
        let dx = f / fp;
        x -= dx;
        if dx.abs() < 1e-14 * x {
            break;
        }
    }
    x
}

// ---------------------------------------------------------------------------
// Gauss-Legendre
// ---------------------------------------------------------------------------

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi-style initial guess
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut pp = 0.0;
        for _ in 0..100 {
            // Legendre P_n(x) and derivative by recurrence
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            pp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / pp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * pp * pp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

/// Gauss-Legendre rule mapped onto [a, b].
pub fn gauss_legendre_on(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(n);
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    (
        x.iter().map(|&t| mid + half * t).collect(),
        w.iter().map(|&ww| ww * half).collect(),
    )
}

// ---------------------------------------------------------------------------
// Exponential integral E1(z)
// ---------------------------------------------------------------------------

/// E1(z) for complex z with Re z >= 0, z != 0 (principal branch).
pub fn e1_complex(z: Complex64) -> Complex64 {
    let r = z.norm();
    assert!(r > 0.0, "E1 is singular at 0");
    if r <= 12.0 {
        // E1(z) = -gamma - ln z + sum_{k>=1} (-1)^{k+1} z^k/(k k!)
        let mut sum = Complex64::new(0.0, 0.0);
        let mut term = Complex64::new(1.0, 0.0);
        for k in 1..200 {
            term *= -z / (k as f64);
            let add = -term / (k as f64);
            sum += add;
            if add.norm() < 1e-18 * sum.norm().max(1.0) {
                break;
            }
        }
        -Complex64::new(EULER_GAMMA, 0.0) - z.ln() + sum
    } else {
        // continued fraction e^{-z} / (z + 1/(1 + 1/(z + 2/(1 + ...))))
        let tiny = Complex64::new(1e-300, 0.0);
        let mut f = z + 1.0;
        if f.norm() < 1e-290 {
            f = tiny;
        }
        let mut c = f;
        let mut d = Complex64::new(0.0, 0.0);
        for k in 1..100000 {
            let a = Complex64::new(-((k * k) as f64), 0.0);
            let b = z + (2 * k + 1) as f64;
            d = b + a * d;
            if d.norm() < 1e-290 {
                d = tiny;
            }
            c = b + a / c;
            if c.norm() < 1e-290 {
                c = tiny;
            }
            d = d.inv();
            let delta = c * d;
            f *= delta;
            if (delta - 1.0).norm() < 1e-16 {
                break;
            }
        }
        (-z).exp() / f
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    // Reference values from standard tables (15 significant digits).
    #[test]
    fn j0_reference() {
        assert_abs_diff_eq!(bessel_j0(1.0), 0.765_197_686_557_967, epsilon = 1e-14);
        assert_abs_diff_eq!(bessel_j0(5.0), -0.177_596_771_314_338, epsilon = 1e-13);
        assert_abs_diff_eq!(bessel_j0(12.0), 0.047_689_310_796_833_5, epsilon = 1e-13);
        assert_abs_diff_eq!(bessel_j0(25.0), 0.096_266_783_275_958_1, epsilon = 1e-12);
    }

    #[test]
    fn j1_reference() {
        assert_abs_diff_eq!(bessel_j1(1.0), 0.440_050_585_744_933, epsilon = 1e-14);
        assert_abs_diff_eq!(bessel_j1(5.0), -0.327_579_137_591_465, epsilon = 1e-13);
        assert_abs_diff_eq!(bessel_j1(12.0), -0.223_447_104_490_628, epsilon = 1e-13);
    }

    #[test]
    fn y0_y1_reference() {
        assert_abs_diff_eq!(bessel_y0(1.0), 0.088_256_964_215_677, epsilon = 1e-13);
        assert_abs_diff_eq!(bessel_y0(5.0), -0.308_517_625_249_034, epsilon = 1e-13);
        assert_abs_diff_eq!(bessel_y0(12.0), -0.225_237_312_634_361, epsilon = 1e-12);
        assert_abs_diff_eq!(bessel_y1(1.0), -0.781_212_821_300_289, epsilon = 1e-13);
        assert_abs_diff_eq!(bessel_y1(5.0), 0.147_863_143_391_227, epsilon = 1e-13);
    }

    #[test]
    fn jn_sequence_and_wronskian() {
        // J_n Y_n' - J_n' Y_n = 2/(pi x) for every n and x
        for &x in &[0.7, 2.5, 5.0, 13.0] {
            for n in [0usize, 1, 3, 8, 20] {
                if n as f64 > 2.0 * x + 20.0 {
                    continue;
                }
                let j = bessel_jn(n, x);
                let jp = bessel_jn_prime(n, x);
                let y = bessel_yn(n, x);
                let yp = bessel_yn_prime(n, x);
                let w = j * yp - jp * y;
                assert_abs_diff_eq!(w, 2.0 / (PI * x), epsilon = 1e-11 * (1.0 + y.abs()));
            }
        }
    }

    #[test]
    fn jn_high_order() {
        // J_20(5) from tables
        assert_abs_diff_eq!(bessel_jn(20, 5.0), 2.770_330_052_128_94e-11, epsilon = 1e-23);
        // J_10(10)
        assert_abs_diff_eq!(bessel_jn(10, 10.0), 0.207_486_106_633_358, epsilon = 1e-12);
    }

    #[test]
    fn modified_bessel_reference() {
        assert_abs_diff_eq!(bessel_k0(1.0), 0.421_024_438_240_708, epsilon = 1e-13);
        assert_abs_diff_eq!(bessel_k0(3.0), 0.034_739_504_386_279_2, epsilon = 1e-13);
        assert_abs_diff_eq!(bessel_k1(1.0), 0.601_907_230_197_235, epsilon = 1e-13);
        let iseq = bessel_i_seq(3, 2.0);
        assert_abs_diff_eq!(iseq[0], 2.279_585_302_336_067, epsilon = 1e-12);
        assert_abs_diff_eq!(iseq[1], 1.590_636_854_637_329, epsilon = 1e-12);
        assert_abs_diff_eq!(iseq[3], 0.212_739_959_239_853, epsilon = 1e-12);
        // Wronskian I_n(x) K_n'(x) - I_n'(x) K_n(x) = -1/x
        let k = bessel_k_seq(3, 2.0);
        let ipr = 0.5 * (iseq[0] + iseq[2]);
        let kpr = -0.5 * (k[0] + k[2]);
        assert_abs_diff_eq!(iseq[1] * kpr - ipr * k[1], -0.5, epsilon = 1e-12);
    }

    #[test]
    fn first_bessel_zeros() {
        assert_abs_diff_eq!(bessel_j_zero(0, 1), 2.404_825_557_695_773, epsilon = 1e-12);
        assert_abs_diff_eq!(bessel_j_zero(0, 2), 5.520_078_110_286_311, epsilon = 1e-12);
        assert_abs_diff_eq!(bessel_j_zero(1, 1), 3.831_705_970_207_512, epsilon = 1e-12);
        assert_abs_diff_eq!(bessel_j_zero(2, 1), 5.135_622_301_840_683, epsilon = 1e-12);
    }

    #[test]
    fn gauss_legendre_exactness() {
        let (x, w) = gauss_legendre_on(12, 0.0, 1.0);
        // integrates x^k exactly for k <= 23
        for k in 0..=23 {
            let q: f64 = x.iter().zip(&w).map(|(&xi, &wi)| wi * xi.powi(k)).sum();
            assert_abs_diff_eq!(q, 1.0 / (k as f64 + 1.0), epsilon = 1e-14);
        }
    }

    #[test]
    fn e1_reference() {
        // E1(1) = 0.219383934395520
        let v = e1_complex(Complex64::new(1.0, 0.0));
        assert_abs_diff_eq!(v.re, 0.219_383_934_395_520_3, epsilon = 1e-14);
        assert_abs_diff_eq!(v.im, 0.0, epsilon = 1e-15);
        // E1(20) = 9.83525270447e-11 (leading digits)
        let v = e1_complex(Complex64::new(20.0, 0.0));
        assert_abs_diff_eq!(v.re, 9.835_525_290_649_88e-11, epsilon = 1e-21);
        // E1(i) = -0.337403922900968 - 0.624713256427713 i  (Ci/Si combination)
        let v = e1_complex(Complex64::new(0.0, 1.0));
        assert_abs_diff_eq!(v.re, -0.337_403_922_900_968, epsilon = 1e-12);
        assert_abs_diff_eq!(v.im, -0.624_713_256_427_713, epsilon = 1e-12);
    }
}
