//! Faddeev Green function G(x,k) of Δ + 2ik·∇ shifted back to e^{ikx} form:
//!
//!   G(x,k) = -(1/2π)² e^{ikx} ∫ e^{iξx} / (ξ² + 2kξ) dξ ,   k ∈ ℂ², Im k ≠ 0.
//!
//! Writing k = a + ib and substituting ξ = η - a turns the integral into
//!
//!   G(x,k) = -(1/2π)² e^{-b·x} J,   J = ∫ e^{iη·x'} / (η² + 2iβη₂ + c) dη,
//!
//! in a frame rotated so b = β e₂ (β = |b| > 0), with c = -|a|² - 2i a·b.
//! The η₂ integral is done by residues, leaving a 1-D integral over η₁ whose
//! integrand is even, piecewise smooth, and exponentially (or 1/η, handled by
//! an exponential-integral tail) decaying.  This keeps every evaluation at a
//! few hundred integrand samples instead of a 2-D singular quadrature.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::diag::{extrapolate_schedule, ConvergenceRecord};
use crate::error::{Error, Result};
use crate::fftutil;
use crate::geom::{self, Vec2};
use crate::special::{e1_complex, gauss_legendre};

use super::free::free_green_plus_2d;
use super::{ComplexMomentum, Direction};

const C_I: Complex64 = Complex64::new(0.0, 1.0);

fn expm1_complex(z: Complex64) -> Complex64 {
    if z.norm() > 0.5 {
        return z.exp() - 1.0;
    }
    let mut term = z;
    let mut sum = z;
    for k in 2..30 {
        term *= z / (k as f64);
        sum += term;
        if term.norm() < 1e-18 * sum.norm().max(1e-30) {
            break;
        }
    }
    sum
}

/// e^z E1(z), stable for large |z| with Re z >= 0.
fn e1_scaled(z: Complex64) -> Complex64 {
    if z.norm() <= 12.0 {
        z.exp() * e1_complex(z)
    } else {
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
        f.inv()
    }
}

/// Reduced integrand state for one evaluation.
struct Reduced {
    beta: f64,
    c: Complex64,
    x1: f64,
    x2: f64,
}

impl Reduced {
    #[inline]
    fn s(&self, eta: f64) -> Complex64 {
        (Complex64::new(eta * eta + self.beta * self.beta, 0.0) + self.c).sqrt()
    }

    /// Value of j(η₁) e^{...} folded with the even symmetry: the caller
    /// integrates 2 cos(η₁ x₁) j(η₁) over η₁ >= 0.
    fn integrand(&self, eta: f64) -> Complex64 {
        let s = self.s(eta);
        let sigma = s.re;
        let x2 = self.x2;
        if x2 > 0.0 {
            if sigma > self.beta {
                let p_plus = C_I * (s - self.beta);
                (PI / s) * (C_I * p_plus * x2).exp() * (2.0 * (eta * self.x1).cos())
            } else {
                Complex64::new(0.0, 0.0)
            }
        } else {
            let p_minus = -C_I * (s + self.beta);
            let base = (C_I * p_minus * x2).exp();
            let val = if sigma < self.beta {
                // (π/s)(e^{ip₋x₂} - e^{ip₊x₂}) without cancellation at s -> 0
                -(PI / s) * base * expm1_complex(Complex64::new(-2.0 * x2, 0.0) * s)
            } else {
                (PI / s) * base
            };
            val * (2.0 * (eta * self.x1).cos())
        }
    }

    /// d/dx2 of the reduced integrand (before the cos factor convention,
    /// applied consistently with `integrand`).
    fn integrand_dx2(&self, eta: f64) -> Complex64 {
        let s = self.s(eta);
        let sigma = s.re;
        let x2 = self.x2;
        let cosf = 2.0 * (eta * self.x1).cos();
        if x2 > 0.0 {
            if sigma > self.beta {
                let p_plus = C_I * (s - self.beta);
                let ip = C_I * p_plus;
                (PI / s) * ip * (ip * x2).exp() * cosf
            } else {
                Complex64::new(0.0, 0.0)
            }
        } else {
            let p_minus = -C_I * (s + self.beta);
            let ipm = C_I * p_minus;
            if sigma < self.beta {
                let j_val = -(PI / s)
                    * (ipm * x2).exp()
                    * expm1_complex(Complex64::new(-2.0 * x2, 0.0) * s);
                let p_plus = C_I * (s - self.beta);
                let ipp = C_I * p_plus;
                (ipm * j_val + 2.0 * PI * (ipp * x2).exp()) * cosf
            } else {
                (PI / s) * ipm * (ipm * x2).exp() * cosf
            }
        }
    }

    /// d/dx1: the cos factor differentiates to -2 η sin(η x₁).
    fn integrand_dx1(&self, eta: f64) -> Complex64 {
        let s = self.s(eta);
        let sigma = s.re;
        let x2 = self.x2;
        let dcos = -2.0 * eta * (eta * self.x1).sin();
        if x2 > 0.0 {
            if sigma > self.beta {
                let p_plus = C_I * (s - self.beta);
                (PI / s) * (C_I * p_plus * x2).exp() * dcos
            } else {
                Complex64::new(0.0, 0.0)
            }
        } else {
            let p_minus = -C_I * (s + self.beta);
            let base = (C_I * p_minus * x2).exp();
            let val = if sigma < self.beta {
                -(PI / s) * base * expm1_complex(Complex64::new(-2.0 * x2, 0.0) * s)
            } else {
                (PI / s) * base
            };
            val * dcos
        }
    }
}

/// Adaptive composite Gauss-Legendre on [a0, b0].
fn adaptive_gl<F: Fn(f64) -> Complex64>(f: &F, a0: f64, b0: f64, tol: f64) -> Complex64 {
    thread_local! {
        static GL16: (Vec<f64>, Vec<f64>) = gauss_legendre(16);
    }
    fn panel<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64, x: &[f64], w: &[f64]) -> Complex64 {
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        let mut s = Complex64::new(0.0, 0.0);
        for (&xi, &wi) in x.iter().zip(w.iter()) {
            s += f(mid + half * xi) * wi;
        }
        s * half
    }
    fn recurse<F: Fn(f64) -> Complex64>(
        f: &F,
        a: f64,
        b: f64,
        whole: Complex64,
        tol: f64,
        depth: usize,
        x: &[f64],
        w: &[f64],
    ) -> Complex64 {
        let m = 0.5 * (a + b);
        let left = panel(f, a, m, x, w);
        let right = panel(f, m, b, x, w);
        let err = (left + right - whole).norm();
        if err < tol || depth >= 26 {
            return left + right;
        }
        recurse(f, a, m, left, 0.5 * tol, depth + 1, x, w)
            + recurse(f, m, b, right, 0.5 * tol, depth + 1, x, w)
    }
    GL16.with(|(x, w)| {
        // seed with enough panels to resolve the oscillation
        let n0 = 1 + ((b0 - a0).abs() / 4.0).ceil() as usize;
        let mut total = Complex64::new(0.0, 0.0);
        let h = (b0 - a0) / n0 as f64;
        for i in 0..n0 {
            let a = a0 + h * i as f64;
            let b = a + h;
            let whole = panel(f, a, b, x, w);
            total += recurse(f, a, b, whole, tol / n0 as f64, 0, x, w);
        }
        total
    })
}

/// Evaluate the reduced 1-D integral J for given rotated coordinates.
fn reduced_j(red: &Reduced, which: Deriv, tol: f64) -> Result<Complex64> {
    let a_norm = (red.c + Complex64::new(2.0 * 0.0, 0.0)).norm().sqrt(); // |a|-ish scale
    let scale = red.beta + a_norm + 1.0;
    // breakpoints: σ = β transitions and the real root of η² + β² + Re c
    let mut brk = vec![0.0f64];
    let disc = -(red.c.re) - red.beta * red.beta; // |a|² + 2(a·b)i real part... = |a|² - β²... see below
    // σ = β happens at η² = |a|² - (a·b/β)²; both derive from c:
    // c = -|a|² - 2i(a·b) so |a|² = -Re c, a·b = -Im c / 2.
    let a2 = -red.c.re;
    let adotb = -red.c.im / 2.0;
    if a2 > 0.0 {
        let jump2 = a2 - (adotb / red.beta).powi(2);
        if jump2 > 0.0 {
            brk.push(jump2.sqrt());
        }
        let root2 = a2 - red.beta * red.beta;
        if root2 > 0.0 {
            brk.push(root2.sqrt());
        }
    }
    let _ = disc;
    let mut lambda = (6.0 * scale).max(30.0);
    brk.sort_by(|p, q| p.partial_cmp(q).unwrap());
    brk.dedup_by(|p, q| (*p - *q).abs() < 1e-12 * scale);

    let f = |eta: f64| match which {
        Deriv::None => red.integrand(eta),
        Deriv::X1 => red.integrand_dx1(eta),
        Deriv::X2 => red.integrand_dx2(eta),
    };

    let quad_tol = tol / 20.0;
    let body = |a: f64, b: f64| -> Complex64 {
        let mut pts: Vec<f64> = brk
            .iter()
            .copied()
            .filter(|&t| t > a && t < b)
            .collect();
        pts.push(b);
        let mut total = Complex64::new(0.0, 0.0);
        let mut lo = a;
        for &hi in &pts {
            if hi > lo {
                total += adaptive_gl(&f, lo, hi, quad_tol);
            }
            lo = hi;
        }
        total
    };

    let tail = |lam: f64| -> Complex64 {
        // For η beyond every breakpoint, j = π e^{βx₂} e^{-s(η)u}/s(η) with
        // u = |x₂| and s = sqrt(η² + q), q = β² + c.  Expanding e^{-su}/s in
        // 1/η gives (e^{-ηu}/η) Σ c_k η^{-k}; each term pairs with
        // 2cos(ηx₁) into generalized exponential integrals:
        //     Tail = π e^{βx₂} Σ_k c_k Λ^{-k} [E_{k+1}(Λz₁) + E_{k+1}(Λz₂)],
        // z₁ = u - i x₁, z₂ = u + i x₁.
        let u = red.x2.abs();
        let sg = if red.x2 >= 0.0 { 1.0 } else { -1.0 };
        let q = Complex64::new(red.beta * red.beta, 0.0) + red.c;
        let c0 = Complex64::new(1.0, 0.0);
        let c1 = -q * (0.5 * u);
        let c2 = q * q * (u * u / 8.0) - q * 0.5;
        let c3 = q * q * (3.0 * u / 8.0) - q * q * q * (u * u * u / 48.0);
        // u-derivatives of the coefficients (for the x₂ tail)
        let d0 = Complex64::new(0.0, 0.0);
        let d1 = -q * 0.5;
        let d2 = q * q * (u / 4.0);
        let d3 = q * q * (3.0 / 8.0) - q * q * q * (u * u / 16.0);
        let coeffs = [c0, c1, c2, c3];
        let dcoeffs = [d0, d1, d2, d3];

        // scaled E_n: h_n = e^z E_n(z); h_0 = 1/z, h_{n+1} = (1 - z h_n)/n
        let hs = |z: Complex64| -> [Complex64; 6] {
            let mut h = [Complex64::new(0.0, 0.0); 6];
            h[0] = z.inv();
            h[1] = e1_scaled(z);
            for n in 1..5 {
                h[n + 1] = (Complex64::new(1.0, 0.0) - z * h[n]) / (n as f64);
            }
            h
        };
        let z1 = Complex64::new(lam * u, -lam * red.x1);
        let z2 = Complex64::new(lam * u, lam * red.x1);
        let h1 = hs(z1);
        let h2 = hs(z2);
        let pre1 = (Complex64::new(red.beta * red.x2, 0.0) - z1).exp();
        let pre2 = (Complex64::new(red.beta * red.x2, 0.0) - z2).exp();
        let mut total = Complex64::new(0.0, 0.0);
        let mut lk = 1.0;
        for k in 0..4 {
            match which {
                Deriv::None => {
                    total += coeffs[k] / lk * (pre1 * h1[k + 1] + pre2 * h2[k + 1]);
                }
                Deriv::X1 => {
                    // d/dx1 E_{k+1}(Λ z₁) = +iΛ E_k(Λz₁); for z₂ the sign flips
                    total += coeffs[k] / lk
                        * lam
                        * (C_I * pre1 * h1[k] - C_I * pre2 * h2[k]);
                }
                Deriv::X2 => {
                    let beta_term = Complex64::new(red.beta, 0.0)
                        * coeffs[k]
                        * (pre1 * h1[k + 1] + pre2 * h2[k + 1]);
                    let coeff_term = Complex64::new(sg, 0.0)
                        * dcoeffs[k]
                        * (pre1 * h1[k + 1] + pre2 * h2[k + 1]);
                    let e_term = Complex64::new(sg * lam, 0.0)
                        * coeffs[k]
                        * (pre1 * h1[k] + pre2 * h2[k]);
                    total += (beta_term + coeff_term - e_term) / lk;
                }
            }
            lk *= lam;
        }
        PI * total
    };

    let mut body_acc = body(0.0, lambda);
    let mut value = body_acc + tail(lambda);
    let mut best_diff = f64::INFINITY;
    for _ in 0..6 {
        let lam2 = lambda * 1.7;
        body_acc += body(lambda, lam2);
        let v2 = body_acc + tail(lam2);
        let diff = (v2 - value).norm();
        value = v2;
        lambda = lam2;
        best_diff = best_diff.min(diff);
        if diff <= (2.0 * tol).max(1e-13 * value.norm()) {
            return Ok(value);
        }
    }
    if best_diff <= 100.0 * tol {
        return Ok(value);
    }
    Err(Error::accuracy(
        "Faddeev reduced integral: tail did not settle",
        best_diff,
        tol,
    ))
}

#[derive(Clone, Copy, PartialEq)]
enum Deriv {
    None,
    X1,
    X2,
}

/// General evaluator: G at separation x for k = a + i b, b != 0.  No
/// perpendicularity is assumed (the directional limit path needs a·b != 0).
pub fn faddeev_green_raw(x: Vec2, a: Vec2, b: Vec2, tol: f64) -> Result<Complex64> {
    let beta = geom::norm(b);
    if beta == 0.0 {
        return Err(Error::DomainError(
            "Faddeev Green function needs Im k != 0".into(),
        ));
    }
    let r = geom::norm(x);
    if r == 0.0 {
        return Err(Error::SingularPoint("Faddeev Green function at x = 0".into()));
    }
    let bhat = geom::scale(b, 1.0 / beta);
    let xr = geom::rotate_to_y(bhat, x);
    let mut x2 = xr[1];
    if x2.abs() < 1e-12 * r {
        x2 = 1e-12 * r; // nudge off the representation seam
    }
    let red = Reduced {
        beta,
        c: Complex64::new(-geom::dot(a, a), -2.0 * geom::dot(a, b)),
        x1: xr[0],
        x2,
    };
    let j = reduced_j(&red, Deriv::None, tol)?;
    let growth = (-geom::dot(b, x)).exp();
    Ok(-j * growth / (4.0 * PI * PI))
}

/// Gradient of `faddeev_green_raw` with respect to x.
pub fn faddeev_green_gradient_raw(
    x: Vec2,
    a: Vec2,
    b: Vec2,
    tol: f64,
) -> Result<[Complex64; 2]> {
    let beta = geom::norm(b);
    let r = geom::norm(x);
    if beta == 0.0 || r == 0.0 {
        return Err(Error::DomainError("gradient needs Im k != 0 and x != 0".into()));
    }
    let bhat = geom::scale(b, 1.0 / beta);
    let xr = geom::rotate_to_y(bhat, x);
    let mut x2 = xr[1];
    if x2.abs() < 1e-9 * r {
        x2 = 1e-9 * r;
    }
    let red = Reduced {
        beta,
        c: Complex64::new(-geom::dot(a, a), -2.0 * geom::dot(a, b)),
        x1: xr[0],
        x2,
    };
    let j = reduced_j(&red, Deriv::None, tol)?;
    let j1 = reduced_j(&red, Deriv::X1, tol)?;
    let j2 = reduced_j(&red, Deriv::X2, tol)?;
    let growth = (-geom::dot(b, x)).exp();
    let pre = -growth / (4.0 * PI * PI);
    // ∇(e^{-b·x} J) = e^{-b·x}(∇'J rotated back - b J)
    let grad_rot = [j1, j2];
    // rotate back: x' = O x with O = [[b_y, -b_x],[b_x, b_y]]; ∇_x = O^T ∇_{x'}
    let gx = Complex64::new(bhat[1], 0.0) * grad_rot[0] + Complex64::new(bhat[0], 0.0) * grad_rot[1];
    let gy = Complex64::new(-bhat[0], 0.0) * grad_rot[0] + Complex64::new(bhat[1], 0.0) * grad_rot[1];
    Ok([
        pre * (gx - Complex64::new(b[0], 0.0) * j),
        pre * (gy - Complex64::new(b[1], 0.0) * j),
    ])
}

/// G(x, k) for a validated complex momentum (Im k != 0, x != 0).
pub fn faddeev_green(x: Vec2, k: &ComplexMomentum) -> Result<Complex64> {
    if k.im_norm() == 0.0 {
        return Err(Error::DomainError(
            "faddeev_green needs Im k != 0; use faddeev_green_directional for limits".into(),
        ));
    }
    faddeev_green_raw(x, k.re, k.im, 1e-11)
}

/// Gradient of G with respect to x.
pub fn faddeev_green_gradient(x: Vec2, k: &ComplexMomentum) -> Result<[Complex64; 2]> {
    faddeev_green_gradient_raw(x, k.re, k.im, 1e-10)
}

/// Directional limit G_gamma(x,k) = lim_{eps->0+} G(x, k + i eps gamma) by
/// Richardson extrapolation over the schedule.
pub fn faddeev_green_directional(
    x: Vec2,
    k: Vec2,
    gamma: Direction,
    eps_schedule: &[f64],
) -> Result<ConvergenceRecord> {
    if geom::norm(k) == 0.0 {
        return Err(Error::Config("directional limit needs k != 0".into()));
    }
    extrapolate_schedule(eps_schedule, |eps| {
        faddeev_green_raw(x, k, geom::scale(gamma.gamma, eps), 1e-11)
    })
}

/// The reduced kernel g(x,k) = e^{-i k x} G(x,k); depends on k only through
/// (|Re k|, Im k).
pub fn faddeev_reduced(x: Vec2, k: &ComplexMomentum) -> Result<Complex64> {
    let g = faddeev_green(x, k)?;
    Ok(g / k.plane_wave(x))
}

// ---------------------------------------------------------------------------
// Interpolation table for the analytic correction G - G⁺
// ---------------------------------------------------------------------------

/// Polar Fourier × Chebyshev interpolant of the entire function
/// H(x) = G(x,k) - G⁺(x, sqrt(E)) (E > 0; the matching decaying kernel is
/// used for E <= 0).  Both are fundamental solutions of Δ + E, so H solves
/// the homogeneous Helmholtz equation globally and is real-analytic, which
/// makes the tensor interpolant spectrally accurate.
pub struct FaddeevTable {
    pub k: ComplexMomentum,
    pub radius: f64,
    n_theta: usize,
    n_cheb: usize,
    /// coeffs[m][j]: Chebyshev coefficient j of angular mode m (FFT order).
    coeffs: Vec<Vec<Complex64>>,
    pub achieved_tol: f64,
}

fn singular_matching(d: f64, energy: f64) -> Complex64 {
    if energy > 0.0 {
        free_green_plus_2d(d, energy.sqrt())
    } else if energy == 0.0 {
        Complex64::new(d.ln() / (2.0 * PI), 0.0)
    } else {
        Complex64::new(
            -crate::special::bessel_k0((-energy).sqrt() * d) / (2.0 * PI),
            0.0,
        )
    }
}

impl FaddeevTable {
    /// Build the interpolant on the disk |x| <= radius.
    pub fn build(k: &ComplexMomentum, radius: f64) -> Result<FaddeevTable> {
        let scale = k.re_norm() + k.im_norm();
        let n_theta = ((3.0 * scale * radius) as usize + 48).next_power_of_two().min(256);
        let n_cheb = ((1.6 * scale * radius) as usize + 40).min(120);
        let tol = 1e-11;

        // Chebyshev points of the second kind on [0, radius]
        let radii: Vec<f64> = (0..n_cheb)
            .map(|j| {
                let t = (PI * j as f64 / (n_cheb - 1) as f64).cos();
                0.5 * radius * (1.0 + t)
            })
            .collect();

        // sample H on the tensor grid
        let samples: Vec<Vec<Complex64>> = crate::threads::par_map(n_cheb, |jr| {
            let r = radii[jr].max(1e-8 * radius);
            (0..n_theta)
                .map(|jt| {
                    let th = 2.0 * PI * jt as f64 / n_theta as f64;
                    let x = [r * th.cos(), r * th.sin()];
                    let g = faddeev_green_raw(x, k.re, k.im, tol).expect("faddeev eval");
                    g - singular_matching(geom::norm(x), k.energy)
                })
                .collect()
        });

        // angular FFT per radius, then Chebyshev transform per mode
        let mut modal: Vec<Vec<Complex64>> = vec![vec![Complex64::new(0.0, 0.0); n_cheb]; n_theta];
        for (jr, row) in samples.iter().enumerate() {
            let mut buf = row.clone();
            fftutil::fft_slice(&mut buf);
            for (m, v) in buf.iter().enumerate() {
                modal[m][jr] = *v / n_theta as f64;
            }
        }
        let mut coeffs = Vec::with_capacity(n_theta);
        for m in 0..n_theta {
            coeffs.push(chebyshev_coeffs(&modal[m]));
        }

        let mut table = FaddeevTable {
            k: *k,
            radius,
            n_theta,
            n_cheb,
            coeffs,
            achieved_tol: 0.0,
        };
        // probe accuracy at a few generic points
        let mut worst = 0.0f64;
        for (i, &rfrac) in [0.17f64, 0.52, 0.83].iter().enumerate() {
            let th = 0.37 + 1.91 * i as f64;
            let x = [
                rfrac * radius * th.cos(),
                rfrac * radius * th.sin(),
            ];
            let direct = faddeev_green_raw(x, k.re, k.im, tol)?
                - singular_matching(geom::norm(x), k.energy);
            let interp = table.correction(x);
            worst = worst.max((direct - interp).norm() / direct.norm().max(1.0));
        }
        table.achieved_tol = worst;
        if worst > 1e-6 {
            return Err(Error::accuracy(
                "Faddeev interpolation table failed its accuracy probe",
                worst,
                1e-6,
            ));
        }
        Ok(table)
    }

    /// The analytic correction H(x) = G(x,k) - matching singular kernel.
    pub fn correction(&self, x: Vec2) -> Complex64 {
        let r = geom::norm(x);
        let th = geom::angle(x);
        let t = (2.0 * r / self.radius - 1.0).clamp(-1.0, 1.0);
        let half = self.n_theta / 2;
        let mut sum = clenshaw(&self.coeffs[0], t);
        for m in 1..half {
            let a = clenshaw(&self.coeffs[m], t);
            let b = clenshaw(&self.coeffs[self.n_theta - m], t);
            let e = Complex64::from_polar(1.0, m as f64 * th);
            sum += a * e + b * e.conj();
            if a.norm() + b.norm() < 1e-16 * sum.norm().max(1e-280) && m > 12 {
                break;
            }
        }
        sum += clenshaw(&self.coeffs[half], t) * Complex64::from_polar(1.0, half as f64 * th);
        sum
    }

    /// Full Green function through the table.
    pub fn green(&self, x: Vec2) -> Complex64 {
        singular_matching(geom::norm(x), self.k.energy) + self.correction(x)
    }

    pub fn size(&self) -> (usize, usize) {
        (self.n_theta, self.n_cheb)
    }
}

/// Chebyshev coefficients from samples at the second-kind points (DCT-I).
fn chebyshev_coeffs(values: &[Complex64]) -> Vec<Complex64> {
    let n = values.len();
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    for (k, o) in out.iter_mut().enumerate() {
        let mut s = Complex64::new(0.0, 0.0);
        for (j, v) in values.iter().enumerate() {
            let w = if j == 0 || j == n - 1 { 0.5 } else { 1.0 };
            s += v * w * ((PI * (j * k) as f64 / (n - 1) as f64).cos());
        }
        let norm = if k == 0 || k == n - 1 { 1.0 } else { 2.0 };
        *o = s * norm / (n - 1) as f64;
    }
    out
}

fn clenshaw(coeffs: &[Complex64], t: f64) -> Complex64 {
    let mut b1 = Complex64::new(0.0, 0.0);
    let mut b2 = Complex64::new(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        let b0 = c + 2.0 * t * b1 - b2;
        b2 = b1;
        b1 = b0;
    }
    b1 - t * b2
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn momentum(s: f64, e: f64) -> ComplexMomentum {
        // k_R along e1 with |k_R|² = e + s², k_I = s e2
        let kr = (e + s * s).sqrt();
        ComplexMomentum::new([kr, 0.0], [0.0, s]).unwrap()
    }

    #[test]
    fn substitution_symmetry() {
        // G(-x, k) = G(x, -k)
        let k = momentum(1.0, 1.0);
        for x in [[0.7, 0.3], [0.2, -0.5], [-0.4, 0.45]] {
            let g1 = faddeev_green([-x[0], -x[1]], &k).unwrap();
            let g2 = faddeev_green(x, &k.neg()).unwrap();
            assert!((g1 - g2).norm() < 1e-10, "{g1} vs {g2}");
        }
    }

    #[test]
    fn defining_pde_stencil() {
        // (Δ + E) G = 0 away from the source
        let e = 1.0;
        let k = momentum(0.8, e);
        let h = 1e-3;
        let g = |x: Vec2| faddeev_green(x, &k).unwrap();
        let x0 = [1.0, 0.0];
        let lap = (g([x0[0] + h, x0[1]])
            + g([x0[0] - h, x0[1]])
            + g([x0[0], x0[1] + h])
            + g([x0[0], x0[1] - h])
            - 4.0 * g(x0))
            / (h * h);
        let res = lap + g(x0) * e;
        assert!(res.norm() < 1e-4, "pde residual {}", res.norm());
    }

    #[test]
    fn rejects_real_momentum_and_origin() {
        let k = momentum(1.0, 1.0);
        assert!(faddeev_green([0.0, 0.0], &k).is_err());
        assert!(ComplexMomentum::new([1.0, 0.0], [0.5, 0.1]).is_err());
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let k = momentum(0.9, 1.0);
        let x = [0.55, -0.35];
        let g = faddeev_green_gradient(x, &k).unwrap();
        let h = 1e-5;
        for d in 0..2 {
            let mut xp = x;
            let mut xm = x;
            xp[d] += h;
            xm[d] -= h;
            let fd =
                (faddeev_green(xp, &k).unwrap() - faddeev_green(xm, &k).unwrap()) / (2.0 * h);
            assert!(
                (fd - g[d]).norm() < 1e-6 * (1.0 + fd.norm()),
                "component {d}: {fd} vs {}",
                g[d]
            );
        }
    }

    #[test]
    fn directional_splice_toward_classical() {
        // gamma = k/|k|: the limit reproduces the outgoing free kernel
        let e = 1.0f64;
        let kvec = [e.sqrt(), 0.0];
        let gamma = Direction::of(kvec).unwrap();
        let x = [0.7, 0.3];
        let sched = [0.02, 0.01, 0.005, 0.0025];
        let rec = faddeev_green_directional(x, kvec, gamma, &sched).unwrap();
        let gfree = free_green_plus_2d(geom::norm(x), e.sqrt());
        assert!(
            (rec.estimate() - gfree).norm() < 1e-4,
            "directional {} vs free {}",
            rec.estimate(),
            gfree
        );
        assert!(rec.monotone);
        // schedule validation
        assert!(faddeev_green_directional(x, kvec, gamma, &[0.1, 0.2]).is_err());
    }

    #[test]
    fn interpolation_table_accuracy() {
        let k = momentum(1.0, 1.0);
        let table = FaddeevTable::build(&k, 2.1).unwrap();
        for x in [[0.33, 0.21], [-0.6, 0.8], [1.2, -0.7]] {
            let direct = faddeev_green(x, &k).unwrap();
            let via = table.green(x);
            assert!(
                (direct - via).norm() < 1e-7 * direct.norm().max(1.0),
                "table mismatch at {x:?}: {direct} vs {via}"
            );
        }
    }

    #[test]
    fn reduced_kernel_translation_invariance() {
        // g = e^{-ikx} G depends on k through (|Re k|, Im k); rotating Re k
        // within the plane orthogonal to Im k is a reflection in 2-D, so
        // check instead that g is unchanged when Re k flips sign with x1.
        let k = momentum(1.3, 1.0);
        let kneg = ComplexMomentum::new([-k.re[0], 0.0], k.im).unwrap();
        let x = [0.4, 0.6];
        let xm = [-0.4, 0.6];
        let g1 = faddeev_reduced(x, &k).unwrap();
        let g2 = faddeev_reduced(xm, &kneg).unwrap();
        assert_abs_diff_eq!(g1.re, g2.re, epsilon = 1e-9);
        assert_abs_diff_eq!(g1.im, g2.im, epsilon = 1e-9);
    }
}
