//! Domain Green functions of Δ + E - v on the disk with the impedance
//! boundary condition, built constructively: the analytic free-disk kernel
//! is transported in the potential (volume Fredholm solve of the second
//! kind) and in alpha (boundary Fredholm solve).  Singular integrals go
//! through the modal product rule of [`crate::quadrature`]; boundary
//! kernels are an exact modal part plus sampled corrections, so the log
//! singularity never meets a plain quadrature.
//!
//! Operator matrices act on nodal values and include quadrature weights.

use ndarray::Array2;
use num_complex::Complex64;
use std::f64::consts::PI;
use std::sync::Arc;

use crate::domain::{BoundaryGrid, PotentialField, VolumeGrid};
use crate::error::{Error, Result};
use crate::fftutil;
use crate::geom::{self, Vec2};
use crate::linalg::{self, CMat, CVec, Lu, C_ZERO};
use crate::quadrature::{singular_matrix, singular_rows, SingularKernel};

use super::disk::DiskGreenTable;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GreenKind {
    FreePlus,
    Faddeev,
    RobinDomain,
    DirichletDomain,
}

/// Sampled kernel values together with the pair geometry.
pub struct GreenKernelMatrix {
    pub kind: GreenKind,
    pub alpha: f64,
    pub energy: f64,
    pub potential_id: Option<String>,
    pub diagonal_treatment: String,
    pub targets: Vec<Vec2>,
    pub sources: Vec<Vec2>,
    pub values: CMat,
}

/// Record of a transport solve (one lemma-chain step).
pub struct GreenCorrection {
    /// Boundary restriction of the computed correction W = G2 - G1.
    pub w: CMat,
    /// Right-hand side W0 of the alpha-transport equation, when applicable.
    pub w0: Option<CMat>,
    /// The Fredholm operator matrix (weights included).
    pub k_matrix: CMat,
    /// Index n with ||K||^n at roundoff (Neumann tail length), 0 when the
    /// series does not contract.
    pub neumann_tail: usize,
    pub residual: f64,
    pub condition: f64,
}

enum ChainKind {
    Potential { vdiff: Vec<f64>, lu: Lu },
    Alpha { factor: f64, c0: f64, lu: Lu, m1: CMat },
}

struct ChainData {
    base: Arc<DomainGreen>,
    kind: ChainKind,
}

/// Constructively transported Green function G_{alpha,v}.
pub struct DomainGreen {
    pub alpha: f64,
    pub energy: f64,
    pub grid: Arc<VolumeGrid>,
    pub boundary: Arc<BoundaryGrid>,
    pub potential: PotentialField,
    pub free: Arc<DiskGreenTable>,
    /// Radial rings of the volume-operator block (panel aligned).
    pub rings: usize,
    /// supp -> supp effective operator: nodal f ↦ nodal ∫ G f.
    pub vol_op: CMat,
    /// Kernel values G(x_i, y_b), x_i in the support rings, y_b on ∂D.
    pub vb: CMat,
    /// Sampled boundary correction: G - G_{alpha,0} on ∂D×∂D (band-limited
    /// content from alpha transports plus smooth potential corrections).
    pub bb_smooth: CMat,
    chain: Option<ChainData>,
}

/// Panel-aligned ring count covering `radius`.
pub fn aligned_rings(grid: &VolumeGrid, radius: f64) -> usize {
    let mut lo = 0usize;
    for &b in &grid.breaks {
        let hi = lo + grid.radii[lo..].iter().take_while(|&&r| r < b).count();
        if b + 1e-12 >= radius {
            return hi;
        }
        lo = hi;
    }
    grid.n_r
}

/// Materialize a boundary modal operator (eigenvalue per angular order |m|)
/// into the matrix acting on nodal values.
pub fn modal_boundary_matrix(grid: &BoundaryGrid, eigen: &dyn Fn(usize) -> f64) -> CMat {
    let n = grid.n;
    let mut seq = vec![C_ZERO; n];
    for (bin, s) in seq.iter_mut().enumerate() {
        let m = fftutil::mode_of_bin(bin, n).unsigned_abs() as usize;
        *s = Complex64::new(eigen(m), 0.0);
    }
    let mut vals = seq.clone();
    fftutil::ifft_slice(&mut vals);
    let mut out = Array2::from_elem((n, n), C_ZERO);
    for i in 0..n {
        for j in 0..n {
            out[[i, j]] = vals[(i + n - j) % n];
        }
    }
    out
}

/// Per-bin eigenvalues (diagonal of F A F^{-1}) plus the largest
/// off-diagonal magnitude, for operators expected to be angularly diagonal.
pub fn boundary_matrix_modes(a: &CMat) -> (Vec<Complex64>, f64) {
    let n = a.nrows();
    let mut diag = vec![C_ZERO; n];
    let mut offmax = 0.0f64;
    for bout in 0..n {
        let f: CVec = (0..n)
            .map(|j| Complex64::from_polar(1.0, 2.0 * PI * (bout * j) as f64 / n as f64))
            .collect::<Vec<_>>()
            .into();
        let g = a.dot(&f);
        let ghat = fftutil::fft(&g);
        for bin in 0..n {
            let v = ghat[bin] / n as f64;
            if bin == bout {
                diag[bout] = v;
            } else {
                offmax = offmax.max(v.norm());
            }
        }
    }
    (diag, offmax)
}

fn zero_potential(grid: &Arc<VolumeGrid>) -> PotentialField {
    PotentialField {
        grid: grid.clone(),
        values: vec![0.0; grid.len()],
        support_radius: 0.0,
        spec: crate::domain::PotentialSpec::Zero,
    }
}

impl DomainGreen {
    /// Free-disk Green function (v = 0) with volume operators covering
    /// `support_radius` (rounded out to a panel boundary).
    pub fn free(
        grid: &Arc<VolumeGrid>,
        boundary: &Arc<BoundaryGrid>,
        energy: f64,
        alpha: f64,
        support_radius: f64,
    ) -> Result<DomainGreen> {
        let table = Arc::new(DiskGreenTable::new(
            grid.radius,
            energy,
            alpha,
            (boundary.n / 2).max(160),
        )?);
        let rings = aligned_rings(grid, support_radius);
        let n_s = rings * grid.n_theta;
        let nth = grid.n_theta;
        let kernel = SingularKernel::of_energy(energy);

        // volume operator on the support block: singular product part plus
        // the smooth image part
        let mut vol_op = singular_matrix(grid, &kernel, rings, rings)?;
        let tables: Vec<_> = (0..rings)
            .map(|ir| table.radial_table(grid.radii[ir]))
            .collect();
        let img_rows = crate::threads::par_map(n_s, |i| {
            let (ir, it) = (i / nth, i % nth);
            let mut row = vec![0.0f64; n_s];
            for (j, r) in row.iter_mut().enumerate() {
                let (jr, jt) = (j / nth, j % nth);
                *r = table.image_part_with(
                    &tables[ir],
                    &tables[jr],
                    grid.thetas[it] - grid.thetas[jt],
                );
            }
            row
        });
        for (i, row) in img_rows.into_iter().enumerate() {
            for (j, v) in row.into_iter().enumerate() {
                vol_op[[i, j]] += Complex64::new(v * grid.weights[j], 0.0);
            }
        }

        // interior-boundary kernel values: singular part direct, image part
        // through the interior-boundary modes minus the singular modes
        let mut vb = Array2::from_elem((n_s, boundary.n), C_ZERO);
        let m_max = table.effective_modes();
        for ir in 0..rings {
            let r = grid.radii[ir];
            let smodes = kernel.mode_products(m_max, r.max(1e-300), boundary.radius);
            let mut diff = vec![0.0f64; m_max + 1];
            for m in 0..=m_max {
                diff[m] = table.interior_boundary_mode(m, &tables[ir]) / (2.0 * PI) - smodes[m];
            }
            for it in 0..nth {
                let i = ir * nth + it;
                for (b, &pb) in boundary.points.iter().enumerate() {
                    let d = geom::norm(geom::sub(grid.nodes[i], pb));
                    let dtheta = grid.thetas[it] - boundary.angles[b];
                    let mut img = diff[0];
                    for (m, &dm) in diff.iter().enumerate().skip(1) {
                        if dm == 0.0 {
                            continue;
                        }
                        img += 2.0 * dm * (m as f64 * dtheta).cos();
                    }
                    vb[[i, b]] = Complex64::new(kernel.point(d) + img, 0.0);
                }
            }
        }

        Ok(DomainGreen {
            alpha,
            energy,
            grid: grid.clone(),
            boundary: boundary.clone(),
            potential: zero_potential(grid),
            free: table,
            rings,
            vol_op,
            vb,
            bb_smooth: Array2::from_elem((boundary.n, boundary.n), C_ZERO),
            chain: None,
        })
    }

    pub fn is_free(&self) -> bool {
        self.chain.is_none()
    }

    pub fn support_nodes(&self) -> usize {
        self.rings * self.grid.n_theta
    }

    /// Boundary operator matrix of u ↦ ∮ G(x,y) u(y) ds_y on nodal values.
    pub fn boundary_op_matrix(&self) -> CMat {
        let n = self.boundary.n;
        let w = self.boundary.weight();
        let mut m = modal_boundary_matrix(&self.boundary, &|mm| self.free.operator_eigen(mm));
        for i in 0..n {
            for j in 0..n {
                m[[i, j]] += self.bb_smooth[[i, j]] * w;
            }
        }
        m
    }

    /// Effective boundary kernel samples K (action u ↦ K diag(w) u).
    pub fn boundary_effective_kernel(&self) -> CMat {
        let w = self.boundary.weight();
        self.boundary_op_matrix().mapv(|z| z / w)
    }

    /// Boundary densities to supp-node values: u ↦ ∮ G(x_i, ξ) u(ξ) ds_ξ.
    pub fn boundary_to_volume_matrix(&self) -> CMat {
        self.vb.mapv(|z| z * self.boundary.weight())
    }

    /// Supp densities to boundary values: f ↦ ∫ G(x_b, ξ) f(ξ) dξ
    /// (kernel values by symmetry are vb transposed).
    pub fn volume_to_boundary_matrix(&self) -> CMat {
        let n_s = self.support_nodes();
        let mut out = Array2::from_elem((self.boundary.n, n_s), C_ZERO);
        for b in 0..self.boundary.n {
            for j in 0..n_s {
                out[[b, j]] = self.vb[[j, b]] * self.grid.weights[j];
            }
        }
        out
    }

    pub fn apply_volume(&self, f: &CVec) -> CVec {
        self.vol_op.dot(f)
    }

    /// Smooth remainder G(x, ξ) - S_E(|x-ξ|) at a generic pair.
    fn smooth_part(&self, x: Vec2, xi: Vec2) -> Result<Complex64> {
        match &self.chain {
            None => {
                let tx = self.free.radial_table(geom::norm(x));
                let txi = self.free.radial_table(geom::norm(xi));
                Ok(Complex64::new(
                    self.free
                        .image_part_with(&tx, &txi, geom::angle(x) - geom::angle(xi)),
                    0.0,
                ))
            }
            Some(_) => {
                let kernel = SingularKernel::of_energy(self.energy);
                let d = geom::norm(geom::sub(x, xi));
                Ok(self.eval(x, xi)? - Complex64::new(kernel.point(d), 0.0))
            }
        }
    }

    /// ∫ G(x, ξ) dens(ξ) dξ over the supp block for arbitrary x, with the
    /// singular part product-integrated.
    pub fn apply_volume_at(&self, x: Vec2, dens: &CVec) -> Result<Complex64> {
        let kernel = SingularKernel::of_energy(self.energy);
        let r = geom::norm(x);
        let th = geom::angle(x);
        let rows = singular_rows(&self.grid, &kernel, &[(r, th)], self.rings)?;
        let mut acc = C_ZERO;
        for j in 0..dens.len() {
            acc += rows[[0, j]] * dens[j];
        }
        for j in 0..dens.len() {
            acc += self.smooth_part(x, self.grid.nodes[j])? * dens[j] * self.grid.weights[j];
        }
        Ok(acc)
    }

    /// Kernel values G(ξ_b, x) over the boundary nodes, x interior.
    pub fn boundary_row(&self, x: Vec2) -> Result<CVec> {
        let n = self.boundary.n;
        match &self.chain {
            None => {
                let mut row = vec![C_ZERO; n];
                for (b, &p) in self.boundary.points.iter().enumerate() {
                    row[b] = Complex64::new(self.free.eval(p, x), 0.0);
                }
                Ok(row.into())
            }
            Some(chain) => match &chain.kind {
                ChainKind::Potential { vdiff, lu } => {
                    let base = &chain.base;
                    let n_s = self.support_nodes();
                    let mut rhs = vec![C_ZERO; n_s];
                    for (i, r) in rhs.iter_mut().enumerate() {
                        *r = base.eval(self.grid.nodes[i], x)?;
                    }
                    let col = lu.solve_vec(&rhs.into());
                    let dens: CVec = (0..n_s)
                        .map(|j| col[j] * vdiff[j])
                        .collect::<Vec<_>>()
                        .into();
                    let mut row = vec![C_ZERO; n];
                    for (b, &p) in self.boundary.points.iter().enumerate() {
                        row[b] = base.boundary_row_entry(p, x)?
                            + base.apply_volume_at(p, &dens)?;
                    }
                    Ok(row.into())
                }
                ChainKind::Alpha { c0, lu, m1, .. } => {
                    let base = &chain.base;
                    let g1row = base.boundary_row(x)?;
                    let w0col = m1.dot(&g1row).mapv(|z| z * *c0);
                    let wcol = lu.solve_vec(&w0col);
                    Ok(&g1row + &wcol)
                }
            },
        }
    }

    fn boundary_row_entry(&self, p: Vec2, x: Vec2) -> Result<Complex64> {
        self.eval(p, x)
    }

    /// Pointwise evaluation at generic points (for potential-transported
    /// kernels keep y away from the support nodes).
    pub fn eval(&self, x: Vec2, y: Vec2) -> Result<Complex64> {
        match &self.chain {
            None => Ok(Complex64::new(self.free.eval(x, y), 0.0)),
            Some(chain) => match &chain.kind {
                ChainKind::Potential { vdiff, lu } => {
                    let base = &chain.base;
                    let n_s = self.support_nodes();
                    let mut rhs = vec![C_ZERO; n_s];
                    for (i, r) in rhs.iter_mut().enumerate() {
                        *r = base.eval(self.grid.nodes[i], y)?;
                    }
                    let col = lu.solve_vec(&rhs.into());
                    let dens: CVec = (0..n_s)
                        .map(|j| col[j] * vdiff[j])
                        .collect::<Vec<_>>()
                        .into();
                    Ok(base.eval(x, y)? + base.apply_volume_at(x, &dens)?)
                }
                ChainKind::Alpha { factor, .. } => {
                    let base = &chain.base;
                    let g1row = base.boundary_row(x)?;
                    let g2row = self.boundary_row(y)?;
                    let w = self.boundary.weight();
                    let mut pair = C_ZERO;
                    for b in 0..self.boundary.n {
                        pair += g1row[b] * g2row[b] * w;
                    }
                    Ok(base.eval(x, y)? + pair * *factor)
                }
            },
        }
    }

    /// Sampled kernel matrix between the supp nodes and the boundary.
    pub fn sample_vb(&self) -> GreenKernelMatrix {
        GreenKernelMatrix {
            kind: if self.alpha == 0.0 {
                GreenKind::DirichletDomain
            } else {
                GreenKind::RobinDomain
            },
            alpha: self.alpha,
            energy: self.energy,
            potential_id: None,
            diagonal_treatment: "modal product rule (panel Gauss-Legendre, graded)".into(),
            targets: self.grid.nodes[..self.support_nodes()].to_vec(),
            sources: self.boundary.points.clone(),
            values: self.vb.clone(),
        }
    }
}

/// Potential transport G_{alpha,v1} -> G_{alpha,v2} through the volume
/// Fredholm equation (I - K) G2 = G1 with K f = ∫ (v2-v1) G1(·,ξ) f(ξ) dξ.
pub fn green_change_potential(
    base: &Arc<DomainGreen>,
    v2: &PotentialField,
) -> Result<(DomainGreen, GreenCorrection)> {
    let grid = base.grid.clone();
    if !Arc::ptr_eq(&v2.grid, &grid) {
        return Err(Error::GridMismatch(
            "potential transport needs the potential sampled on the host grid".into(),
        ));
    }
    if aligned_rings(&grid, v2.support_radius) > base.rings {
        return Err(Error::Config(
            "target potential support exceeds the prepared volume block".into(),
        ));
    }
    let n_s = base.support_nodes();
    let n_b = base.boundary.n;
    let vdiff: Vec<f64> = (0..n_s)
        .map(|j| v2.values[j] - base.potential.values[j])
        .collect();

    let mut k = base.vol_op.clone();
    for i in 0..n_s {
        for j in 0..n_s {
            k[[i, j]] *= vdiff[j];
        }
    }
    let mut system = linalg::identity(n_s);
    for i in 0..n_s {
        for j in 0..n_s {
            system[[i, j]] -= k[[i, j]];
        }
    }
    let condition = linalg::condition_est(&system);
    if condition > 1e12 {
        return Err(Error::well_posedness(
            format!(
                "E = {} is numerically an impedance eigenvalue for the target potential \
                 (Fredholm condition {:.3e})",
                base.energy, condition
            ),
            Some(condition),
        ));
    }
    let lu = Lu::factor(&system)?;

    // boundary columns of G2 on the supp block (smooth right-hand sides)
    let g2_vb = lu.solve_mat(&base.vb);
    // volume operator transport: G2-op = (I - K)^{-1} G1-op
    let vol_op2 = lu.solve_mat(&base.vol_op);

    // density vdiff · G2 columns
    let mut dens = g2_vb.clone();
    for i in 0..n_s {
        for b in 0..n_b {
            dens[[i, b]] *= vdiff[i];
        }
    }
    // ΔW on ∂D×∂D and on supp×∂D
    let dw_bb = base.volume_to_boundary_matrix().dot(&dens);
    let dw_vb = base.vol_op.dot(&dens);

    let mut bb_smooth = base.bb_smooth.clone();
    let mut vb = base.vb.clone();
    for i in 0..n_b {
        for j in 0..n_b {
            bb_smooth[[i, j]] += dw_bb[[i, j]];
        }
    }
    for i in 0..n_s {
        for b in 0..n_b {
            vb[[i, b]] += dw_vb[[i, b]];
        }
    }

    // collocation residual of the solve
    let recon = &g2_vb - &k.dot(&g2_vb);
    let scale = linalg::max_abs(&base.vb).max(1e-300);
    let mut resid = 0.0f64;
    for i in 0..n_s {
        for b in 0..n_b {
            resid = resid.max((recon[[i, b]] - base.vb[[i, b]]).norm());
        }
    }
    resid /= scale;

    let knorm = linalg::op_norm2_est(&k, 20);
    let neumann_tail = if knorm < 1.0 && knorm > 0.0 {
        ((-36.0) / knorm.ln()).ceil() as usize
    } else {
        0
    };

    let corr = GreenCorrection {
        w: dw_bb,
        w0: None,
        k_matrix: k,
        neumann_tail,
        residual: resid,
        condition,
    };
    let out = DomainGreen {
        alpha: base.alpha,
        energy: base.energy,
        grid,
        boundary: base.boundary.clone(),
        potential: v2.clone(),
        free: base.free.clone(),
        rings: base.rings,
        vol_op: vol_op2,
        vb,
        bb_smooth,
        chain: Some(ChainData {
            base: base.clone(),
            kind: ChainKind::Potential { vdiff, lu },
        }),
    };
    Ok((out, corr))
}

/// Alpha transport G_{alpha1,v} -> G_{alpha2,v} through the boundary
/// Fredholm equation W = W0 + K1 W; sin(alpha1) != 0 and sin(alpha2) != 0.
pub fn green_change_alpha(
    base: &Arc<DomainGreen>,
    alpha2: f64,
) -> Result<(DomainGreen, GreenCorrection)> {
    let a1 = base.alpha;
    if a1.sin().abs() < 1e-12 || alpha2.sin().abs() < 1e-12 {
        return Err(Error::Unsupported(
            "alpha transport requires sin(alpha) != 0 on both ends; use the DtN \
             Möbius route instead"
                .into(),
        ));
    }
    let n = base.boundary.n;
    let w = base.boundary.weight();
    let free2 = Arc::new(DiskGreenTable::new(
        base.grid.radius,
        base.energy,
        alpha2,
        base.free.effective_modes(),
    )?);
    let c0 = (alpha2 - a1).sin() / alpha2.sin();
    let c1 = (alpha2 - a1).sin() / (alpha2.sin() * a1.sin());
    let factor = c0 / a1.sin();

    let m1 = base.boundary_op_matrix();

    // W0(x,y) = c0 ∮ G1(ξ,x) G1(ξ,y) ds_ξ as kernel values:
    // modal² exactly, modal∘smooth through the operator matrix, smooth²
    // by the trapezoid rule.
    let w0 = {
        let modal2 = modal_boundary_matrix(&base.boundary, &|m| {
            let lam = base.free.operator_eigen(m);
            lam * lam
        })
        .mapv(|z| z / w);
        let modal_op = modal_boundary_matrix(&base.boundary, &|m| base.free.operator_eigen(m));
        let cross = modal_op.dot(&base.bb_smooth); // (G1⁰ ∘ W1)(x_i, y_j) values
        let smooth2 = base.bb_smooth.t().dot(&base.bb_smooth).mapv(|z| z * w);
        let mut vals = modal2;
        for i in 0..n {
            for j in 0..n {
                vals[[i, j]] += cross[[i, j]] + cross[[j, i]] + smooth2[[i, j]];
            }
        }
        vals.mapv(|z| z * c0)
    };

    let k1 = m1.mapv(|z| z * c1);
    let mut system = linalg::identity(n);
    for i in 0..n {
        for j in 0..n {
            system[[i, j]] -= k1[[i, j]];
        }
    }
    let condition = linalg::condition_est(&system);
    if condition > 1e12 {
        return Err(Error::well_posedness(
            format!("alpha transport to {alpha2}: Fredholm condition {condition:.3e}"),
            Some(condition),
        ));
    }
    let lu = Lu::factor(&system)?;
    let w_bb = lu.solve_mat(&w0);

    let recon = &w_bb - &k1.dot(&w_bb);
    let scale = linalg::max_abs(&w0).max(1e-300);
    let mut resid = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            resid = resid.max((recon[[i, j]] - w0[[i, j]]).norm());
        }
    }
    resid /= scale;

    // boundary correction relative to the alpha2 free kernel:
    // G2 - G2⁰ = (G1⁰ - G2⁰) + (G1 - G1⁰) + W
    let delta_free = modal_boundary_matrix(&base.boundary, &|m| {
        base.free.operator_eigen(m) - free2.operator_eigen(m)
    })
    .mapv(|z| z / w);
    let mut bb_smooth = base.bb_smooth.clone();
    for i in 0..n {
        for j in 0..n {
            bb_smooth[[i, j]] += delta_free[[i, j]] + w_bb[[i, j]];
        }
    }

    // G2 boundary operator matrix (for interior transport)
    let mut m2 = modal_boundary_matrix(&base.boundary, &|mm| free2.operator_eigen(mm));
    for i in 0..n {
        for j in 0..n {
            m2[[i, j]] += bb_smooth[[i, j]] * w;
        }
    }

    // interior data: W(x_i, y_b) = factor ∮ G1(x_i,ξ) G2(ξ,y_b) ds_ξ
    //   = factor (vb1 row i as density) applied through the G2 operator.
    let w_vb = base.vb.dot(&m2).mapv(|z| z * factor);
    let mut vb = base.vb.clone();
    for i in 0..base.support_nodes() {
        for b in 0..n {
            vb[[i, b]] += w_vb[[i, b]];
        }
    }

    // volume operator transport:
    // W-op = factor · (G1 bdry→supp) ∘ (G2 supp→bdry)
    let n_s = base.support_nodes();
    let g1_b2v = base.boundary_to_volume_matrix();
    let g2_v2b = {
        let mut out = Array2::from_elem((n, n_s), C_ZERO);
        for b in 0..n {
            for j in 0..n_s {
                out[[b, j]] = vb[[j, b]] * base.grid.weights[j];
            }
        }
        out
    };
    let w_op = g1_b2v.dot(&g2_v2b).mapv(|z| z * factor);
    let mut vol_op = base.vol_op.clone();
    for i in 0..n_s {
        for j in 0..n_s {
            vol_op[[i, j]] += w_op[[i, j]];
        }
    }

    let knorm = linalg::op_norm2_est(&k1, 20);
    let neumann_tail = if knorm < 1.0 && knorm > 0.0 {
        ((-36.0) / knorm.ln()).ceil() as usize
    } else {
        0
    };
    let corr = GreenCorrection {
        w: w_bb,
        w0: Some(w0),
        k_matrix: k1,
        neumann_tail,
        residual: resid,
        condition,
    };
    let out = DomainGreen {
        alpha: alpha2,
        energy: base.energy,
        grid: base.grid.clone(),
        boundary: base.boundary.clone(),
        potential: base.potential.clone(),
        free: free2,
        rings: base.rings,
        vol_op,
        vb,
        bb_smooth,
        chain: Some(ChainData {
            base: base.clone(),
            kind: ChainKind::Alpha {
                factor,
                c0,
                lu,
                m1,
            },
        }),
    };
    Ok((out, corr))
}

/// Fit of sup |G| / max(1, |ln d|) over off-diagonal samples, with a
/// coarse-subsample stability comparison.
pub struct BoundCheckReport {
    pub fitted_constant: f64,
    pub max_ratio: f64,
    pub coarse_constant: f64,
    pub pass: bool,
}

pub fn green_bound_check(m: &GreenKernelMatrix) -> BoundCheckReport {
    let fit = |stride: usize| -> f64 {
        let mut best = 0.0f64;
        for (i, &x) in m.targets.iter().enumerate().step_by(stride) {
            for (j, &y) in m.sources.iter().enumerate().step_by(stride) {
                let d = geom::norm(geom::sub(x, y));
                if d < 1e-9 {
                    continue;
                }
                let ratio = m.values[[i, j]].norm() / d.ln().abs().max(1.0);
                best = best.max(ratio);
            }
        }
        best
    };
    let coarse = fit(2);
    let full = fit(1);
    let pass = full.is_finite() && full <= coarse * 1.25 + 1e-12;
    BoundCheckReport {
        fitted_constant: full,
        max_ratio: full,
        coarse_constant: coarse,
        pass,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{
        build_boundary_grid, build_volume_grid_split, sample_potential, Domain, PotentialField,
        PotentialSpec,
    };
    use approx::assert_abs_diff_eq;

    fn setup(
        energy: f64,
        alpha: f64,
        spec: &PotentialSpec,
        n_b: usize,
        n_r: usize,
        n_t: usize,
    ) -> (Arc<DomainGreen>, PotentialField) {
        let d = Domain::disk(1.0).unwrap();
        let breaks = spec.radial_breaks(d);
        let grid = build_volume_grid_split(d, n_r, n_t, &breaks).unwrap();
        let boundary = build_boundary_grid(d, n_b).unwrap();
        let v = sample_potential(spec, &grid).unwrap();
        let g0 = Arc::new(
            DomainGreen::free(&grid, &boundary, energy, alpha, v.support_radius.max(0.3))
                .unwrap(),
        );
        (g0, v)
    }

    #[test]
    fn potential_transport_identity_when_equal() {
        let spec = PotentialSpec::gaussian(1.0, 0.2);
        let (g0, v) = setup(1.0, std::f64::consts::FRAC_PI_2, &spec, 32, 16, 24);
        let (g1, _) = green_change_potential(&g0, &v).unwrap();
        let g1 = Arc::new(g1);
        let (g2, corr) = green_change_potential(&g1, &v).unwrap();
        assert!(linalg::max_abs(&corr.w) < 1e-13);
        let dvb = (&g2.vb - &g1.vb).to_owned();
        assert!(linalg::max_abs(&dvb) < 1e-13);
    }

    #[test]
    fn alpha_transport_identity_when_equal() {
        let spec = PotentialSpec::Zero;
        let (g0, _) = setup(1.0, std::f64::consts::FRAC_PI_2, &spec, 32, 12, 24);
        let (g2, corr) = green_change_alpha(&g0, std::f64::consts::FRAC_PI_2).unwrap();
        assert!(linalg::max_abs(&corr.w) < 1e-13);
        assert!(linalg::max_abs(&g2.bb_smooth) < 1e-12);
    }

    #[test]
    fn alpha_transport_matches_analytic_free_disk() {
        let spec = PotentialSpec::Zero;
        let (g0, _) = setup(1.0, std::f64::consts::FRAC_PI_2, &spec, 64, 12, 24);
        let (g2, corr) = green_change_alpha(&g0, std::f64::consts::FRAC_PI_4).unwrap();
        assert!(corr.residual < 1e-10, "residual {}", corr.residual);
        let direct = DiskGreenTable::new(1.0, 1.0, std::f64::consts::FRAC_PI_4, 160).unwrap();
        let m = g2.boundary_op_matrix();
        let (modes, offmax) = boundary_matrix_modes(&m);
        assert!(offmax < 1e-9, "off-diagonal leak {offmax}");
        for mm in 0..16usize {
            let want = direct.operator_eigen(mm);
            assert_abs_diff_eq!(modes[mm].re, want, epsilon = 1e-8 * want.abs().max(1.0));
        }
        let x = [0.25, 0.1];
        let y = [0.5, -0.3];
        let got = g2.eval(x, y).unwrap();
        assert_abs_diff_eq!(got.re, direct.eval(x, y), epsilon = 1e-8);
    }

    #[test]
    fn potential_transport_symmetry_and_pde() {
        // support held at 0.55 so that there are generic points outside it;
        // point evaluation with the source inside the support sees the
        // near-singular-density floor of the product rule (documented), so
        // the tight checks use exterior sources.
        let spec = PotentialSpec::GaussianMixture {
            terms: vec![crate::domain::GaussianTerm {
                amplitude: 1.0,
                sigma: 0.18,
                center: [0.0, 0.0],
            }],
            support_radius: Some(0.55),
        };
        let (g0, v) = setup(1.0, std::f64::consts::FRAC_PI_2, &spec, 48, 20, 32);
        let (g2, corr) = green_change_potential(&g0, &v).unwrap();
        assert!(corr.residual < 1e-9, "residual {}", corr.residual);
        let mut asym = 0.0f64;
        for i in 0..g2.boundary.n {
            for j in 0..g2.boundary.n {
                asym = asym.max((g2.bb_smooth[[i, j]] - g2.bb_smooth[[j, i]]).norm());
            }
        }
        let scale = linalg::max_abs(&g2.bb_smooth).max(1e-300);
        assert!(asym / scale < 1e-8, "asymmetry {}", asym / scale);
        // symmetry at generic pairs outside the support
        let x = [0.71, 0.12];
        let y = [-0.27, 0.64];
        let gxy = g2.eval(x, y).unwrap();
        let gyx = g2.eval(y, x).unwrap();
        assert!(
            (gxy - gyx).norm() < 1e-9 * gxy.norm().max(1.0),
            "asym {}",
            (gxy - gyx).norm()
        );
        // mixed pair (source inside the support): quadrature-tolerance level
        let xin = [0.2, 0.1];
        let gxy = g2.eval(x, xin).unwrap();
        let gyx = g2.eval(xin, x).unwrap();
        assert!((gxy - gyx).norm() < 5e-4 * gxy.norm().max(1.0));
        // PDE residual with the evaluation point away from the support
        let h = 1e-3;
        let y0 = [-0.27, 0.64];
        let gval = |p: Vec2| g2.eval(p, y0).unwrap();
        let x0 = [0.62, 0.40];
        let vx = v.spec.eval(x0, Domain::disk(1.0).unwrap());
        let lap = (gval([x0[0] + h, x0[1]])
            + gval([x0[0] - h, x0[1]])
            + gval([x0[0], x0[1] + h])
            + gval([x0[0], x0[1] - h])
            - 4.0 * gval(x0))
            / (h * h);
        let res = lap + gval(x0) * (g2.energy - vx);
        assert!(res.norm() < 2e-4, "pde residual {}", res.norm());
    }

    #[test]
    fn neumann_series_consistency_for_small_perturbations() {
        // G2 - Σ_{j<=3}(K)^{j-1}G1 = O(||vdiff||³) in the boundary data
        let d = Domain::disk(1.0).unwrap();
        let grid = build_volume_grid_split(d, 16, 24, &[0.5]).unwrap();
        let boundary = build_boundary_grid(d, 32).unwrap();
        let mut errs = Vec::new();
        for &amp in &[0.2f64, 0.1] {
            let spec = PotentialSpec::GaussianMixture {
                terms: vec![crate::domain::GaussianTerm {
                    amplitude: amp,
                    sigma: 0.15,
                    center: [0.0, 0.0],
                }],
                support_radius: Some(0.5),
            };
            let v = sample_potential(&spec, &grid).unwrap();
            let g0 = Arc::new(
                DomainGreen::free(&grid, &boundary, 1.0, std::f64::consts::FRAC_PI_2, 0.5)
                    .unwrap(),
            );
            let (g2, corr) = green_change_potential(&g0, &v).unwrap();
            // two-term Neumann tail: W ≈ K G1 + K² G1 restricted to ∂D
            let kg1 = corr.k_matrix.dot(&g0.vb);
            let kkg1 = corr.k_matrix.dot(&kg1);
            let v2b = g0.volume_to_boundary_matrix();
            let dens1 = {
                let mut m = g0.vb.clone();
                for i in 0..m.nrows() {
                    for j in 0..m.ncols() {
                        m[[i, j]] = (g0.vb[[i, j]] + kg1[[i, j]] + kkg1[[i, j]])
                            * (v.values[i] - 0.0);
                    }
                }
                m
            };
            let w3 = v2b.dot(&dens1);
            let diff = (&g2.bb_smooth - &w3).to_owned();
            errs.push(linalg::max_abs(&diff));
        }
        // halving the amplitude should shrink the error by about 2^4 = 16
        // (the truncated tail is O(a^4) in this construction)
        let ratio = errs[0] / errs[1];
        assert!(
            ratio > 8.0,
            "Neumann truncation should scale at least like a³: {errs:?}"
        );
    }

    #[test]
    fn planted_spike_fails_bound_check() {
        let targets: Vec<Vec2> = (0..12).map(|i| [0.05 * i as f64, 0.0]).collect();
        let sources: Vec<Vec2> = (0..12).map(|i| [0.0, 0.05 * i as f64]).collect();
        let mut values = Array2::from_elem((12, 12), C_ZERO);
        for i in 0..12 {
            for j in 0..12 {
                let dd = geom::norm(geom::sub(targets[i], sources[j]));
                values[[i, j]] = Complex64::new(if dd > 0.0 { 1.0 / dd } else { 0.0 }, 0.0);
            }
        }
        let m = GreenKernelMatrix {
            kind: GreenKind::RobinDomain,
            alpha: 0.5,
            energy: 1.0,
            potential_id: None,
            diagonal_treatment: "test".into(),
            targets,
            sources,
            values,
        };
        assert!(!green_bound_check(&m).pass);
    }

    #[test]
    fn domain_green_bound_check_passes() {
        let spec = PotentialSpec::gaussian(1.0, 0.25);
        let (g0, v) = setup(1.0, std::f64::consts::FRAC_PI_2, &spec, 32, 16, 24);
        let (g2, _) = green_change_potential(&g0, &v).unwrap();
        let sample = g2.sample_vb();
        let rep = green_bound_check(&sample);
        assert!(rep.pass, "bound check failed: constant {}", rep.fitted_constant);
        assert!(rep.fitted_constant.is_finite());
    }
}
