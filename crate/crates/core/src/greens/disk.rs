//! Robin Green function of Δ + E on the disk for zero potential, built by
//! angular Fourier separation.  The log singularity is split off through the
//! matching free-space kernel so that pointwise evaluation is the direct
//! singular kernel plus a geometrically convergent image series.
//!
//! The image series is stored in normalized form,
//!   image = (1/2π) Σ_m c_m û_m(r) û_m(ρ) e^{imΔθ},   û_m(r) = u_m(r)/u_m(R),
//! with c_m = O(1/m); this keeps every stored quantity representable for
//! arbitrary mode counts (raw Bessel ratios overflow long before the series
//! terms become negligible).

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geom::{self, Vec2};
use crate::special::{
    bessel_i_seq, bessel_j_seq, bessel_k0, bessel_k_seq, bessel_y0, bessel_y_seq,
};

/// Regular radial basis used at a given energy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RadialBasis {
    /// E > 0: J_m(kappa r)
    Oscillatory { kappa: f64 },
    /// E = 0: (r/R)^m
    Harmonic,
    /// E < 0: I_m(mu r)
    Modified { mu: f64 },
}

/// Precomputed modal data of G_{alpha,0} on a disk of radius R at energy E.
#[derive(Debug, Clone)]
pub struct DiskGreenTable {
    pub radius: f64,
    pub energy: f64,
    pub alpha: f64,
    pub basis: RadialBasis,
    pub m_max: usize,
    /// Normalized image coefficients c_m.
    image_coeff: Vec<f64>,
    /// g_m(R, R): boundary kernel mode values.
    boundary_mode: Vec<f64>,
    /// DtN eigenvalues at this energy (None at a Dirichlet eigenvalue).
    dtn: Vec<Option<f64>>,
    /// Regular basis at the rim (for building normalized ratios).
    rim: Vec<f64>,
}

/// Normalized regular basis values û_m(r) for m = 0..=m_max.
#[derive(Debug, Clone)]
pub struct RadialTable {
    pub r: f64,
    pub values: Vec<f64>,
}

impl DiskGreenTable {
    /// Build the modal table.  Fails with a well-posedness error when E is an
    /// alpha-impedance eigenvalue of the free disk (within mode `m_max`).
    pub fn new(radius: f64, energy: f64, alpha: f64, m_max: usize) -> Result<DiskGreenTable> {
        let (ca, sa) = (alpha.cos(), alpha.sin());
        let basis = if energy > 0.0 {
            RadialBasis::Oscillatory {
                kappa: energy.sqrt(),
            }
        } else if energy == 0.0 {
            RadialBasis::Harmonic
        } else {
            RadialBasis::Modified {
                mu: (-energy).sqrt(),
            }
        };

        let mut image_coeff = Vec::with_capacity(m_max + 1);
        let mut boundary_mode = Vec::with_capacity(m_max + 1);
        let mut dtn = Vec::with_capacity(m_max + 1);
        let mut rim = Vec::with_capacity(m_max + 1);

        match basis {
            RadialBasis::Oscillatory { kappa } => {
                let z = kappa * radius;
                let j = bessel_j_seq(m_max + 1, z);
                let y = bessel_y_seq(m_max + 1, z);
                for m in 0..=m_max {
                    let jm = j[m];
                    let ym = y[m];
                    if jm.abs() < 1e-250 || !ym.is_finite() {
                        break;
                    }
                    let jp = if m == 0 {
                        -j[1]
                    } else {
                        j[m - 1] - m as f64 / z * jm
                    };
                    let yp = if m == 0 {
                        -y[1]
                    } else {
                        y[m - 1] - m as f64 / z * ym
                    };
                    let a = ca * jm - sa * kappa * jp;
                    let b = ca * ym - sa * kappa * yp;
                    let scale = (ca * jm).abs() + (sa * kappa * jp).abs();
                    if a.abs() < 1e-12 * scale.max(f64::MIN_POSITIVE) {
                        return Err(Error::well_posedness(
                            format!(
                                "E = {energy} is an impedance eigenvalue of the free disk \
                                 at alpha = {alpha} (mode {m})"
                            ),
                            Some(if a == 0.0 {
                                f64::INFINITY
                            } else {
                                scale / a.abs()
                            }),
                        ));
                    }
                    // c_m = -(π/2) b jm² / a, evaluated ratio-first
                    let c = -0.5 * PI * (jm / a) * jm * b;
                    let gm = 0.5 * PI * jm * ym + c;
                    if !c.is_finite() || !gm.is_finite() {
                        break;
                    }
                    image_coeff.push(c);
                    boundary_mode.push(gm);
                    dtn.push(if jm.abs() > 0.0 {
                        let v = kappa * jp / jm;
                        v.is_finite().then_some(v)
                    } else {
                        None
                    });
                    rim.push(jm);
                }
            }
            RadialBasis::Harmonic => {
                if ca.abs() < 1e-12 {
                    return Err(Error::well_posedness(
                        format!(
                            "E = 0 with alpha = {alpha}: constants satisfy the boundary \
                             condition, the impedance problem is ill-posed at mode 0"
                        ),
                        Some(f64::INFINITY),
                    ));
                }
                let c1 = sa / (radius * ca) - radius.ln();
                image_coeff.push(c1);
                boundary_mode.push(radius.ln() + c1);
                dtn.push(Some(0.0));
                rim.push(1.0);
                for m in 1..=m_max {
                    let mf = m as f64;
                    let a = ca - sa * mf / radius;
                    let b = ca + sa * mf / radius;
                    if a.abs() < 1e-12 * (ca.abs() + (sa * mf / radius).abs()) {
                        return Err(Error::well_posedness(
                            format!("E = 0 impedance eigenvalue at alpha = {alpha}, mode {m}"),
                            Some(f64::INFINITY),
                        ));
                    }
                    let coeff = b / (2.0 * mf * a);
                    image_coeff.push(coeff);
                    boundary_mode.push(coeff - 0.5 / mf);
                    dtn.push(Some(mf / radius));
                    rim.push(1.0);
                }
            }
            RadialBasis::Modified { mu } => {
                let z = mu * radius;
                let iv = bessel_i_seq(m_max + 1, z);
                let kv = bessel_k_seq(m_max + 1, z);
                for m in 0..=m_max {
                    let im = iv[m];
                    let km = kv[m];
                    if im < 1e-250 || !km.is_finite() {
                        break;
                    }
                    let ip = if m == 0 {
                        iv[1]
                    } else {
                        iv[m - 1] - m as f64 / z * im
                    };
                    let kp = if m == 0 {
                        -kv[1]
                    } else {
                        -(kv[m - 1] + m as f64 / z * km)
                    };
                    let a = ca * im - sa * mu * ip;
                    let b = ca * km - sa * mu * kp;
                    let scale = (ca * im).abs() + (sa * mu * ip).abs();
                    if a.abs() < 1e-12 * scale.max(f64::MIN_POSITIVE) {
                        return Err(Error::well_posedness(
                            format!(
                                "E = {energy} impedance eigenvalue at alpha = {alpha}, mode {m}"
                            ),
                            Some(scale / a.abs().max(f64::MIN_POSITIVE)),
                        ));
                    }
                    let c = (im / a) * im * b;
                    let gm = -im * km + c;
                    if !c.is_finite() || !gm.is_finite() {
                        break;
                    }
                    image_coeff.push(c);
                    boundary_mode.push(gm);
                    dtn.push({
                        let v = mu * ip / im;
                        v.is_finite().then_some(v)
                    });
                    rim.push(im);
                }
            }
        }

        if image_coeff.is_empty() {
            return Err(Error::DomainError(
                "disk Green table has no representable modes".into(),
            ));
        }
        let m_eff = image_coeff.len() - 1;
        Ok(DiskGreenTable {
            radius,
            energy,
            alpha,
            basis,
            m_max: m_eff,
            image_coeff,
            boundary_mode,
            dtn,
            rim,
        })
    }

    /// Normalized regular basis values û_m(r) at radius r.
    pub fn radial_table(&self, r: f64) -> RadialTable {
        let values = match self.basis {
            RadialBasis::Oscillatory { kappa } => {
                let seq = bessel_j_seq(self.m_max, kappa * r);
                seq.iter()
                    .zip(self.rim.iter())
                    .map(|(&num, &den)| {
                        let v = num / den;
                        if v.is_finite() {
                            v
                        } else {
                            0.0
                        }
                    })
                    .collect()
            }
            RadialBasis::Harmonic => {
                let q = r / self.radius;
                let mut acc = 1.0;
                let mut v = Vec::with_capacity(self.m_max + 1);
                for _ in 0..=self.m_max {
                    v.push(acc);
                    acc *= q;
                }
                v
            }
            RadialBasis::Modified { mu } => {
                let seq = bessel_i_seq(self.m_max, mu * r);
                seq.iter()
                    .zip(self.rim.iter())
                    .map(|(&num, &den)| {
                        let v = num / den;
                        if v.is_finite() {
                            v
                        } else {
                            0.0
                        }
                    })
                    .collect()
            }
        };
        RadialTable { r, values }
    }

    /// Free-space singular kernel matching this energy ((Δ+E) S = δ).
    pub fn singular_part(&self, d: f64) -> f64 {
        match self.basis {
            RadialBasis::Oscillatory { kappa } => 0.25 * bessel_y0(kappa * d),
            RadialBasis::Harmonic => d.ln() / (2.0 * PI),
            RadialBasis::Modified { mu } => -bessel_k0(mu * d) / (2.0 * PI),
        }
    }

    /// Image (regular) part of the Green function.
    pub fn image_part_with(&self, tr: &RadialTable, trho: &RadialTable, dtheta: f64) -> f64 {
        let mut sum = self.image_coeff[0] * tr.values[0] * trho.values[0];
        let mut running = sum.abs();
        for m in 1..=self.m_max {
            let base = self.image_coeff[m] * tr.values[m] * trho.values[m];
            sum += 2.0 * base * (m as f64 * dtheta).cos();
            running = running.max(sum.abs());
            if base.abs() < 1e-17 * running.max(1e-300) && m > 8 {
                break;
            }
        }
        sum / (2.0 * PI)
    }

    /// Full Green function value at interior points x != y.
    pub fn eval(&self, x: Vec2, y: Vec2) -> f64 {
        let tr = self.radial_table(geom::norm(x));
        let trho = self.radial_table(geom::norm(y));
        self.eval_with(
            &tr,
            &trho,
            geom::angle(x) - geom::angle(y),
            geom::norm(geom::sub(x, y)),
        )
    }

    /// Full Green function from precomputed radial tables; `d` = |x - y|.
    pub fn eval_with(&self, tr: &RadialTable, trho: &RadialTable, dtheta: f64, d: f64) -> f64 {
        self.singular_part(d) + self.image_part_with(tr, trho, dtheta)
    }

    /// g_m(R, R): boundary kernel mode.
    pub fn boundary_mode(&self, m: usize) -> f64 {
        if m > self.m_max {
            // asymptotic continuation: the kernel modes behave like the free
            // singular modes, -1/(2m) · (1 + O(1/m))
            return -0.5 / m as f64;
        }
        self.boundary_mode[m]
    }

    /// Eigenvalue of the boundary operator u ↦ ∮ G(x,y) u(y) ds_y on e^{imθ}.
    pub fn operator_eigen(&self, m: usize) -> f64 {
        self.radius * self.boundary_mode(m)
    }

    /// Eigenvalue of the impedance map at this (alpha, E); sin(alpha) != 0.
    pub fn impedance_eigen(&self, m: usize) -> Result<f64> {
        let sa = self.alpha.sin();
        if sa.abs() < 1e-14 {
            return Err(Error::Unsupported(
                "impedance map from the Green kernel needs sin(alpha) != 0".into(),
            ));
        }
        Ok(self.operator_eigen(m) / (sa * sa) - self.alpha.cos() / sa)
    }

    /// g_m(r, R) = g_m(R,R) û_m(r): the regular factorization at the rim.
    pub fn interior_boundary_mode(&self, m: usize, tr: &RadialTable) -> f64 {
        if m > self.m_max {
            return 0.0;
        }
        self.boundary_mode[m] * tr.values[m]
    }

    /// Free-disk DtN eigenvalue at this energy.
    pub fn dtn_eigen(&self, m: usize) -> Result<f64> {
        self.dtn
            .get(m)
            .copied()
            .flatten()
            .ok_or_else(|| Error::DomainError(format!("DtN eigenvalue unavailable at mode {m}")))
    }

    /// û_m(r) = u_m(r)/u_m(R): the Dirichlet extension factor of the mode.
    pub fn regular_ratio(&self, m: usize, tr: &RadialTable) -> f64 {
        if m > self.m_max {
            return 0.0;
        }
        tr.values[m]
    }

    pub fn effective_modes(&self) -> usize {
        self.m_max
    }
}

/// Trace factor u_m(r)/u_m(R) of the Dirichlet Helmholtz extension at
/// energy `lambda` on a disk of radius R.  Errors at Dirichlet eigenvalues.
pub fn dirichlet_mode_trace(lambda: f64, radius: f64, m: usize, r: f64) -> Result<f64> {
    if lambda > 0.0 {
        let kappa = lambda.sqrt();
        let num = crate::special::bessel_jn(m, kappa * r);
        let den = crate::special::bessel_jn(m, kappa * radius);
        if den.abs() < 1e-13 {
            return Err(Error::DomainError(format!(
                "lambda = {lambda} is numerically a Dirichlet eigenvalue (mode {m})"
            )));
        }
        Ok(num / den)
    } else if lambda == 0.0 {
        Ok((r / radius).powi(m as i32))
    } else {
        let mu = (-lambda).sqrt();
        let den = bessel_i_seq(m, mu * radius);
        let num = bessel_i_seq(m, mu * r);
        Ok(num[m] / den[m])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::{bessel_j0, bessel_j1};
    use approx::assert_abs_diff_eq;

    #[test]
    fn dirichlet_zero_energy_matches_image_formula() {
        let t = DiskGreenTable::new(1.0, 0.0, 0.0, 80).unwrap();
        let cases = [
            ([0.3, 0.1], [0.5, -0.4]),
            ([0.8, 0.0], [0.0, 0.55]),
            ([0.2, 0.2], [0.25, 0.2]),
        ];
        for (x, y) in cases {
            let d = geom::norm(geom::sub(x, y));
            let rx = geom::norm(x);
            let xstar = geom::scale(x, 1.0 / (rx * rx));
            let image = (d.ln() - (rx * geom::norm(geom::sub(xstar, y))).ln()) / (2.0 * PI);
            assert_abs_diff_eq!(t.eval(x, y), image, epsilon = 1e-10);
        }
    }

    #[test]
    fn symmetry_and_impedance_eigenvalue() {
        let t = DiskGreenTable::new(1.0, 1.0, PI / 2.0, 160).unwrap();
        let x = [0.6, 0.2];
        let y = [-0.3, 0.5];
        assert_abs_diff_eq!(t.eval(x, y), t.eval(y, x), epsilon = 1e-12);
        let want = bessel_j0(1.0) / bessel_j1(1.0);
        assert_abs_diff_eq!(t.impedance_eigen(0).unwrap(), want, epsilon = 1e-12);
    }

    #[test]
    fn table_truncates_gracefully_at_high_modes() {
        // requesting many modes should truncate, not overflow
        let t = DiskGreenTable::new(1.0, 1.0, PI / 2.0, 4000).unwrap();
        assert!(t.effective_modes() < 400);
        assert!(t.image_coeff.iter().all(|c| c.is_finite()));
        // evaluation near the rim still converges
        let v = t.eval([0.93, 0.0], [0.0, 0.91]);
        assert!(v.is_finite());
    }

    #[test]
    fn neumann_zero_energy_rejected() {
        let err = DiskGreenTable::new(1.0, 0.0, PI / 2.0, 16);
        assert!(matches!(err, Err(Error::WellPosedness { .. })));
    }

    #[test]
    fn helmholtz_residual_and_boundary_condition() {
        let t = DiskGreenTable::new(1.0, 1.0, PI / 4.0, 160).unwrap();
        let y = [0.15, -0.3];
        let h = 1e-3;
        let g = |x: Vec2| t.eval(x, y);
        let x0 = [0.5, 0.35];
        let lap = (g([x0[0] + h, x0[1]])
            + g([x0[0] - h, x0[1]])
            + g([x0[0], x0[1] + h])
            + g([x0[0], x0[1] - h])
            - 4.0 * g(x0))
            / (h * h);
        let res = lap + t.energy * g(x0);
        assert!(res.abs() < 1e-4, "helmholtz residual {res}");
        let th = 0.77f64;
        let nu = [th.cos(), th.sin()];
        let eps = 1e-4;
        let f = |s: f64| g(geom::scale(nu, 1.0 - s));
        let dnu = (1.5 * f(0.0) - 2.0 * f(eps) + 0.5 * f(2.0 * eps)) / eps;
        let bc = (PI / 4.0).cos() * f(0.0) - (PI / 4.0).sin() * dnu;
        assert!(bc.abs() < 2e-6, "impedance condition residual {bc}");
    }

    #[test]
    fn negative_energy_symmetry() {
        let t = DiskGreenTable::new(1.0, -1.0, 0.9, 120).unwrap();
        let x = [0.55, 0.1];
        let y = [-0.2, 0.35];
        assert_abs_diff_eq!(t.eval(x, y), t.eval(y, x), epsilon = 1e-12);
        let h = 1e-3;
        let g = |p: Vec2| t.eval(p, y);
        let lap = (g([x[0] + h, x[1]]) + g([x[0] - h, x[1]]) + g([x[0], x[1] + h])
            + g([x[0], x[1] - h])
            - 4.0 * g(x))
            / (h * h);
        assert!((lap - g(x)).abs() < 1e-4);
    }

    #[test]
    fn dtn_eigenvalues() {
        let t = DiskGreenTable::new(1.0, 0.0, 0.0, 8).unwrap();
        assert_abs_diff_eq!(t.dtn_eigen(3).unwrap(), 3.0, epsilon = 1e-14);
        let t = DiskGreenTable::new(1.0, 1.0, 0.0, 8).unwrap();
        let want = -bessel_j1(1.0) / bessel_j0(1.0);
        assert_abs_diff_eq!(t.dtn_eigen(0).unwrap(), want, epsilon = 1e-13);
    }
}
