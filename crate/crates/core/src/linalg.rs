//! Dense complex linear algebra: LU with partial pivoting, restarted GMRES
//! and deterministic condition-number estimates.  Sizes in this crate stay
//! in the low thousands, so straightforward loops are adequate.

use ndarray::{Array1, Array2};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMat = Array2<Complex64>;
pub type CVec = Array1<Complex64>;

pub const C_ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const C_ONE: Complex64 = Complex64::new(1.0, 0.0);

/// LU factorization with partial pivoting (PA = LU).
pub struct Lu {
    lu: CMat,
    piv: Vec<usize>,
    n: usize,
}

impl Lu {
    pub fn factor(a: &CMat) -> Result<Lu> {
        let n = a.nrows();
        if a.ncols() != n {
            return Err(Error::Config("LU needs a square matrix".into()));
        }
        let mut lu = a.clone();
        let mut piv: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let mut p = k;
            let mut best = lu[[k, k]].norm_sqr();
            for i in (k + 1)..n {
                let v = lu[[i, k]].norm_sqr();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best == 0.0 {
                return Err(Error::Config(format!(
                    "singular matrix in LU at column {k}"
                )));
            }
            if p != k {
                piv.swap(k, p);
                for j in 0..n {
                    let t = lu[[k, j]];
                    lu[[k, j]] = lu[[p, j]];
                    lu[[p, j]] = t;
                }
            }
            let inv = lu[[k, k]].inv();
            for i in (k + 1)..n {
                let m = lu[[i, k]] * inv;
                lu[[i, k]] = m;
                if m != C_ZERO {
                    for j in (k + 1)..n {
                        let upd = lu[[k, j]] * m;
                        lu[[i, j]] -= upd;
                    }
                }
            }
        }
        Ok(Lu { lu, piv, n })
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn solve_vec(&self, b: &CVec) -> CVec {
        let n = self.n;
        let mut x = Array1::from_elem(n, C_ZERO);
        for i in 0..n {
            x[i] = b[self.piv[i]];
        }
        for i in 0..n {
            let mut s = x[i];
            for j in 0..i {
                s -= self.lu[[i, j]] * x[j];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in (i + 1)..n {
                s -= self.lu[[i, j]] * x[j];
            }
            x[i] = s / self.lu[[i, i]];
        }
        x
    }

    /// Solve A^H z = y using the factors of A (A = P^T L U).
    pub fn solve_conj_transpose(&self, y: &CVec) -> CVec {
        let n = self.n;
        let mut w = y.clone();
        // U^H w' = y  (U^H is lower triangular)
        for i in 0..n {
            let mut s = w[i];
            for j in 0..i {
                s -= self.lu[[j, i]].conj() * w[j];
            }
            w[i] = s / self.lu[[i, i]].conj();
        }
        // L^H v = w'  (L^H is unit upper triangular)
        for i in (0..n).rev() {
            let mut s = w[i];
            for j in (i + 1)..n {
                s -= self.lu[[j, i]].conj() * w[j];
            }
            w[i] = s;
        }
        let mut z = Array1::from_elem(n, C_ZERO);
        for i in 0..n {
            z[self.piv[i]] = w[i];
        }
        z
    }

    pub fn solve_mat(&self, b: &CMat) -> CMat {
        let mut out = Array2::from_elem((self.n, b.ncols()), C_ZERO);
        for j in 0..b.ncols() {
            let col = b.column(j).to_owned();
            let x = self.solve_vec(&col);
            out.column_mut(j).assign(&x);
        }
        out
    }

    pub fn inverse(&self) -> CMat {
        self.solve_mat(&identity(self.n))
    }
}

pub fn solve(a: &CMat, b: &CVec) -> Result<CVec> {
    Ok(Lu::factor(a)?.solve_vec(b))
}

pub fn inverse(a: &CMat) -> Result<CMat> {
    Ok(Lu::factor(a)?.inverse())
}

pub fn identity(n: usize) -> CMat {
    let mut eye = Array2::from_elem((n, n), C_ZERO);
    for i in 0..n {
        eye[[i, i]] = C_ONE;
    }
    eye
}

pub fn norm2(v: &CVec) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Deterministic start vector for the power iterations.
fn seed_vec(n: usize) -> CVec {
    Array1::from_iter((0..n).map(|i| {
        let t = (i as f64 + 1.0) * 0.754_877_666_246_692_9;
        Complex64::new((2.0 * t).cos(), (3.0 * t + 0.3).sin())
    }))
}

/// Largest singular value estimate by power iteration on A^H A.
pub fn op_norm2_est(a: &CMat, iters: usize) -> f64 {
    let n = a.ncols();
    if n == 0 {
        return 0.0;
    }
    let mut v = seed_vec(n);
    let s0 = norm2(&v);
    v.mapv_inplace(|z| z / s0);
    let mut sigma = 0.0;
    for _ in 0..iters {
        let w = a.dot(&v);
        // u = A^H w
        let mut u = Array1::from_elem(n, C_ZERO);
        for j in 0..n {
            let mut s = C_ZERO;
            for i in 0..a.nrows() {
                s += a[[i, j]].conj() * w[i];
            }
            u[j] = s;
        }
        let s = norm2(&u);
        if s == 0.0 {
            return 0.0;
        }
        sigma = s.sqrt();
        v = u.mapv(|z| z / s);
    }
    sigma
}

/// Smallest singular value estimate by power iteration on (A^H A)^{-1}.
pub fn smallest_sv_est(lu: &Lu, iters: usize) -> f64 {
    let n = lu.size();
    let mut v = seed_vec(n);
    let s0 = norm2(&v);
    v.mapv_inplace(|z| z / s0);
    let mut mu = 0.0;
    for _ in 0..iters {
        let w = lu.solve_vec(&v);
        let u = lu.solve_conj_transpose(&w);
        let s = norm2(&u);
        if !s.is_finite() || s == 0.0 {
            return 0.0;
        }
        mu = s.sqrt();
        v = u.mapv(|z| z / s);
    }
    if mu == 0.0 {
        0.0
    } else {
        1.0 / mu
    }
}

/// Two-norm condition estimate of a square matrix.
pub fn condition_est(a: &CMat) -> f64 {
    let n = a.nrows();
    if n == 0 {
        return 1.0;
    }
    let smax = op_norm2_est(a, 30);
    match Lu::factor(a) {
        Ok(lu) => {
            let smin = smallest_sv_est(&lu, 30);
            if smin == 0.0 {
                f64::INFINITY
            } else {
                smax / smin
            }
        }
        Err(_) => f64::INFINITY,
    }
}

pub fn frobenius(a: &CMat) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn max_abs(a: &CMat) -> f64 {
    a.iter().fold(0.0f64, |m, z| m.max(z.norm()))
}

/// Restarted GMRES for A x = b with A given as a matvec closure.
/// Returns (x, relative residual, total inner iterations).
pub fn gmres<F>(
    apply: F,
    b: &CVec,
    tol: f64,
    max_outer: usize,
    restart: usize,
) -> Result<(CVec, f64, usize)>
where
    F: Fn(&CVec) -> CVec,
{
    let n = b.len();
    let bnorm = norm2(b);
    if bnorm == 0.0 {
        return Ok((Array1::from_elem(n, C_ZERO), 0.0, 0));
    }
    let mut x = Array1::from_elem(n, C_ZERO);
    let mut total_iters = 0usize;
    let mut rel = 1.0;
    for _ in 0..max_outer {
        let r = b - &apply(&x);
        let rnorm = norm2(&r);
        rel = rnorm / bnorm;
        if rel <= tol {
            return Ok((x, rel, total_iters));
        }
        let m = restart.min(n);
        let mut v: Vec<CVec> = Vec::with_capacity(m + 1);
        v.push(r.mapv(|z| z / Complex64::new(rnorm, 0.0)));
        let mut h = vec![vec![C_ZERO; m]; m + 1];
        let mut cs = vec![C_ZERO; m];
        let mut sn = vec![C_ZERO; m];
        let mut g = vec![C_ZERO; m + 1];
        g[0] = Complex64::new(rnorm, 0.0);
        let mut k_used = 0;
        for k in 0..m {
            total_iters += 1;
            let mut w = apply(&v[k]);
            for (i, vi) in v.iter().enumerate() {
                let hik = vi
                    .iter()
                    .zip(w.iter())
                    .map(|(a, b)| a.conj() * b)
                    .sum::<Complex64>();
                h[i][k] = hik;
                w = &w - &vi.mapv(|z| z * hik);
            }
            let hnext = norm2(&w);
            h[k + 1][k] = Complex64::new(hnext, 0.0);
            for i in 0..k {
                let t = cs[i].conj() * h[i][k] + sn[i].conj() * h[i + 1][k];
                h[i + 1][k] = -sn[i] * h[i][k] + cs[i] * h[i + 1][k];
                h[i][k] = t;
            }
            let (c, s) = givens(h[k][k], h[k + 1][k]);
            cs[k] = c;
            sn[k] = s;
            h[k][k] = c.conj() * h[k][k] + s.conj() * h[k + 1][k];
            h[k + 1][k] = C_ZERO;
            let gt = c.conj() * g[k];
            g[k + 1] = -s * g[k];
            g[k] = gt;
            k_used = k + 1;
            rel = g[k + 1].norm() / bnorm;
            if hnext < 1e-14 * bnorm || rel <= tol {
                break;
            }
            v.push(w.mapv(|z| z / Complex64::new(hnext, 0.0)));
        }
        let mut y = vec![C_ZERO; k_used];
        for i in (0..k_used).rev() {
            let mut s = g[i];
            for j in (i + 1)..k_used {
                s -= h[i][j] * y[j];
            }
            y[i] = s / h[i][i];
        }
        for (i, yi) in y.iter().enumerate().take(k_used) {
            x = &x + &v[i].mapv(|z| z * *yi);
        }
        let r = b - &apply(&x);
        rel = norm2(&r) / bnorm;
        if rel <= tol {
            return Ok((x, rel, total_iters));
        }
    }
    Err(Error::accuracy("GMRES did not converge", rel, tol))
}

fn givens(a: Complex64, b: Complex64) -> (Complex64, Complex64) {
    let an = a.norm();
    let bn = b.norm();
    if bn == 0.0 {
        return (C_ONE, C_ZERO);
    }
    if an == 0.0 {
        return (C_ZERO, C_ONE);
    }
    let r = (an * an + bn * bn).sqrt();
    let c = Complex64::new(an / r, 0.0);
    let s = (a / an) * b.conj() / Complex64::new(r, 0.0);
    (c, s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn test_matrix(n: usize) -> CMat {
        let mut a = Array2::from_elem((n, n), C_ZERO);
        for i in 0..n {
            for j in 0..n {
                let t = (i * n + j) as f64;
                a[[i, j]] = Complex64::new((0.3 * t).sin(), (0.17 * t + 0.4).cos()) * 0.3;
            }
            a[[i, i]] += Complex64::new(3.0, 0.5);
        }
        a
    }

    #[test]
    fn lu_solves() {
        let a = test_matrix(24);
        let b = seed_vec(24);
        let lu = Lu::factor(&a).unwrap();
        let x = lu.solve_vec(&b);
        let r = &a.dot(&x) - &b;
        assert!(norm2(&r) < 1e-12 * norm2(&b));
        let z = lu.solve_conj_transpose(&b);
        let ah = a.mapv(|v| v.conj()).reversed_axes().to_owned();
        let r2 = &ah.dot(&z) - &b;
        assert!(norm2(&r2) < 1e-12 * norm2(&b));
    }

    #[test]
    fn inverse_roundtrip() {
        let a = test_matrix(13);
        let inv = inverse(&a).unwrap();
        let prod = a.dot(&inv);
        let mut err = 0.0f64;
        for i in 0..13 {
            for j in 0..13 {
                let want = if i == j { C_ONE } else { C_ZERO };
                err = err.max((prod[[i, j]] - want).norm());
            }
        }
        assert!(err < 1e-12);
    }

    #[test]
    fn condition_of_diagonal() {
        let n = 16;
        let mut a = Array2::from_elem((n, n), C_ZERO);
        for i in 0..n {
            a[[i, i]] = Complex64::new(1.0 + i as f64, 0.0);
        }
        let c = condition_est(&a);
        assert!((c - n as f64).abs() < 1e-3 * n as f64, "cond = {c}");
    }

    #[test]
    fn gmres_matches_lu() {
        let a = test_matrix(40);
        let b = seed_vec(40);
        let lu = Lu::factor(&a).unwrap();
        let x_ref = lu.solve_vec(&b);
        let (x, rel, _) = gmres(|v| a.dot(v), &b, 1e-12, 20, 30).unwrap();
        assert!(rel < 1e-12);
        let d = &x - &x_ref;
        assert!(norm2(&d) < 1e-9 * norm2(&x_ref));
    }
}
