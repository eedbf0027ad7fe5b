//! Domains, Nyström discretizations, potentials and run configuration shared
//! by every other module.  The domain is a disk centered at the origin; the
//! boundary grid is equispaced in angle (spectral trapezoid rule) and the
//! volume grid is a polar tensor product of panel-wise Gauss–Legendre in
//! radius with the trapezoid rule in angle.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geom::{self, Vec2};
use crate::special::gauss_legendre_on;

/// Disk domain, center fixed at the origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Domain {
    pub radius: f64,
}

impl Domain {
    pub fn disk(radius: f64) -> Result<Domain> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::Config("domain radius must be positive".into()));
        }
        Ok(Domain { radius })
    }

    pub fn area(&self) -> f64 {
        PI * self.radius * self.radius
    }

    pub fn perimeter(&self) -> f64 {
        2.0 * PI * self.radius
    }
}

/// Equispaced-in-angle Nyström grid on the circle.
#[derive(Debug, Clone)]
pub struct BoundaryGrid {
    pub n: usize,
    pub radius: f64,
    pub angles: Vec<f64>,
    pub points: Vec<Vec2>,
    pub normals: Vec<Vec2>,
    pub weights: Vec<f64>,
}

impl BoundaryGrid {
    pub fn weight(&self) -> f64 {
        2.0 * PI * self.radius / self.n as f64
    }

    /// Quadrature of a sampled function over the boundary.
    pub fn integrate(&self, values: &[Complex64]) -> Complex64 {
        let w = self.weight();
        values.iter().sum::<Complex64>() * w
    }

    pub fn same_grid(&self, other: &BoundaryGrid) -> bool {
        self.n == other.n && (self.radius - other.radius).abs() < 1e-14 * self.radius
    }
}

pub fn build_boundary_grid(domain: Domain, n: usize) -> Result<Arc<BoundaryGrid>> {
    if n < 8 {
        return Err(Error::Config(format!("boundary grid needs n >= 8, got {n}")));
    }
    if n % 2 != 0 {
        return Err(Error::Config(format!("boundary grid needs even n, got {n}")));
    }
    let r = domain.radius;
    let mut angles = Vec::with_capacity(n);
    let mut points = Vec::with_capacity(n);
    let mut normals = Vec::with_capacity(n);
    for j in 0..n {
        let th = 2.0 * PI * j as f64 / n as f64;
        angles.push(th);
        normals.push([th.cos(), th.sin()]);
        points.push([r * th.cos(), r * th.sin()]);
    }
    let weights = vec![2.0 * PI * r / n as f64; n];
    Ok(Arc::new(BoundaryGrid {
        n,
        radius: r,
        angles,
        points,
        normals,
        weights,
    }))
}

/// Polar tensor-product volume grid.  Radial nodes may be split into panels
/// at given break radii so that integrands with kinks or jumps on circles
/// (potential supports, radial steps) are integrated panel-wise.
#[derive(Debug, Clone)]
pub struct VolumeGrid {
    pub radius: f64,
    pub n_r: usize,
    pub n_theta: usize,
    /// All radial nodes, ascending across panels.
    pub radii: Vec<f64>,
    /// Gauss-Legendre weights for the radial nodes (without the r jacobian).
    pub radial_weights: Vec<f64>,
    /// Panel break radii, ascending, ending at `radius`.
    pub breaks: Vec<f64>,
    pub thetas: Vec<f64>,
    /// Flattened nodes, index = ir * n_theta + it.
    pub nodes: Vec<Vec2>,
    /// Quadrature weights including the polar jacobian.
    pub weights: Vec<f64>,
}

impl VolumeGrid {
    #[inline]
    pub fn index(&self, ir: usize, it: usize) -> usize {
        ir * self.n_theta + it
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Number of radial rings with radius <= r (plus a tolerance).
    pub fn rings_within(&self, r: f64) -> usize {
        self.radii.iter().take_while(|&&x| x <= r + 1e-12).count()
    }

    pub fn integrate(&self, values: &[Complex64]) -> Complex64 {
        values
            .iter()
            .zip(self.weights.iter())
            .map(|(v, &w)| v * w)
            .sum()
    }

    pub fn integrate_real(&self, values: &[f64]) -> f64 {
        values
            .iter()
            .zip(self.weights.iter())
            .map(|(v, &w)| v * w)
            .sum()
    }
}

pub fn build_volume_grid(domain: Domain, n_r: usize, n_theta: usize) -> Result<Arc<VolumeGrid>> {
    build_volume_grid_split(domain, n_r, n_theta, &[])
}

/// Volume grid with radial panels split at the given interior radii.
pub fn build_volume_grid_split(
    domain: Domain,
    n_r: usize,
    n_theta: usize,
    interior_breaks: &[f64],
) -> Result<Arc<VolumeGrid>> {
    if n_r < 4 {
        return Err(Error::Config(format!("volume grid needs n_r >= 4, got {n_r}")));
    }
    if n_theta < 8 {
        return Err(Error::Config(format!(
            "volume grid needs n_theta >= 8, got {n_theta}"
        )));
    }
    let r_max = domain.radius;
    let mut breaks: Vec<f64> = interior_breaks
        .iter()
        .copied()
        .filter(|&b| b > 1e-12 && b < r_max * (1.0 - 1e-12))
        .collect();
    breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
    breaks.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    breaks.push(r_max);

    // distribute n_r over panels proportionally to length, at least 4 each
    let n_panels = breaks.len();
    let mut counts = vec![4usize; n_panels];
    let total_min = 4 * n_panels;
    if n_r < total_min {
        return Err(Error::Config(format!(
            "volume grid needs n_r >= {total_min} for {n_panels} radial panels"
        )));
    }
    let mut lengths = Vec::with_capacity(n_panels);
    let mut prev = 0.0;
    for &b in &breaks {
        lengths.push(b - prev);
        prev = b;
    }
    let mut extra = n_r - total_min;
    while extra > 0 {
        // hand the next node to the panel with the largest length per node
        let (idx, _) = lengths
            .iter()
            .enumerate()
            .map(|(i, &l)| (i, l / (counts[i] as f64 + 1.0)))
            .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
            .unwrap();
        counts[idx] += 1;
        extra -= 1;
    }

    let mut radii = Vec::with_capacity(n_r);
    let mut radial_weights = Vec::with_capacity(n_r);
    let mut a = 0.0;
    for (p, &b) in breaks.iter().enumerate() {
        let (x, w) = gauss_legendre_on(counts[p], a, b);
        radii.extend(x);
        radial_weights.extend(w);
        a = b;
    }

    let thetas: Vec<f64> = (0..n_theta)
        .map(|j| 2.0 * PI * j as f64 / n_theta as f64)
        .collect();
    let ang_w = 2.0 * PI / n_theta as f64;
    let mut nodes = Vec::with_capacity(n_r * n_theta);
    let mut weights = Vec::with_capacity(n_r * n_theta);
    for ir in 0..radii.len() {
        for it in 0..n_theta {
            nodes.push(geom::from_polar(radii[ir], thetas[it]));
            weights.push(radial_weights[ir] * radii[ir] * ang_w);
        }
    }
    Ok(Arc::new(VolumeGrid {
        radius: r_max,
        n_r: radii.len(),
        n_theta,
        radii,
        radial_weights,
        breaks,
        thetas,
        nodes,
        weights,
    }))
}

/// A single term of a Gaussian mixture.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct GaussianTerm {
    pub amplitude: f64,
    pub sigma: f64,
    pub center: [f64; 2],
}

/// Deterministic, serializable potential description.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PotentialSpec {
    Zero,
    /// Piecewise-constant radial profile: `heights[i]` on
    /// [knots[i-1], knots[i]), zero beyond the last knot.
    RadialProfile { knots: Vec<f64>, heights: Vec<f64> },
    GaussianMixture {
        terms: Vec<GaussianTerm>,
        #[serde(default)]
        support_radius: Option<f64>,
    },
    /// Raw samples bound to a particular volume grid layout.
    GridSamples {
        values: Vec<f64>,
        support_radius: f64,
    },
}

impl PotentialSpec {
    pub fn gaussian(amplitude: f64, sigma: f64) -> PotentialSpec {
        PotentialSpec::GaussianMixture {
            terms: vec![GaussianTerm {
                amplitude,
                sigma,
                center: [0.0, 0.0],
            }],
            support_radius: None,
        }
    }

    pub fn radial_step(height: f64, radius: f64) -> PotentialSpec {
        PotentialSpec::RadialProfile {
            knots: vec![radius],
            heights: vec![height],
        }
    }

    /// Support radius implied by the spec, given the enclosing domain.
    pub fn support_radius(&self, domain: Domain) -> f64 {
        let cap = 0.9 * domain.radius;
        match self {
            PotentialSpec::Zero => 0.0,
            PotentialSpec::RadialProfile { knots, .. } => {
                knots.last().copied().unwrap_or(0.0)
            }
            PotentialSpec::GaussianMixture {
                terms,
                support_radius,
            } => support_radius.unwrap_or_else(|| {
                let reach = terms
                    .iter()
                    .map(|t| geom::norm(t.center) + 7.5 * t.sigma)
                    .fold(0.0f64, f64::max);
                reach.min(cap)
            }),
            PotentialSpec::GridSamples { support_radius, .. } => *support_radius,
        }
    }

    /// True when the potential is rotation invariant.
    pub fn is_radial(&self) -> bool {
        match self {
            PotentialSpec::Zero => true,
            PotentialSpec::RadialProfile { .. } => true,
            PotentialSpec::GaussianMixture { terms, .. } => {
                terms.iter().all(|t| geom::norm(t.center) == 0.0)
            }
            PotentialSpec::GridSamples { .. } => false,
        }
    }

    /// Radii where the profile has kinks or jumps (for panel splitting).
    pub fn radial_breaks(&self, domain: Domain) -> Vec<f64> {
        let mut br = match self {
            PotentialSpec::RadialProfile { knots, .. } => knots.clone(),
            _ => vec![],
        };
        let s = self.support_radius(domain);
        if s > 0.0 {
            br.push(s);
        }
        br
    }

    /// Pointwise evaluation with hard truncation at the support radius.
    pub fn eval(&self, x: Vec2, domain: Domain) -> f64 {
        let r = geom::norm(x);
        if r > self.support_radius(domain) {
            return 0.0;
        }
        match self {
            PotentialSpec::Zero => 0.0,
            PotentialSpec::RadialProfile { knots, heights } => {
                for (k, &knot) in knots.iter().enumerate() {
                    if r < knot {
                        return heights[k];
                    }
                }
                0.0
            }
            PotentialSpec::GaussianMixture { terms, .. } => terms
                .iter()
                .map(|t| {
                    let d = geom::sub(x, t.center);
                    let q = geom::dot(d, d) / (2.0 * t.sigma * t.sigma);
                    t.amplitude * (-q).exp()
                })
                .sum(),
            PotentialSpec::GridSamples { .. } => {
                panic!("grid_samples potentials have no off-grid evaluation")
            }
        }
    }

    /// Radial evaluation for radial specs.
    pub fn eval_radial(&self, r: f64, domain: Domain) -> f64 {
        self.eval([r, 0.0], domain)
    }
}

/// Potential sampled on a volume grid.
#[derive(Debug, Clone)]
pub struct PotentialField {
    pub grid: Arc<VolumeGrid>,
    pub values: Vec<f64>,
    pub support_radius: f64,
    pub spec: PotentialSpec,
}

impl PotentialField {
    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }
}

pub fn sample_potential(spec: &PotentialSpec, grid: &Arc<VolumeGrid>) -> Result<PotentialField> {
    let domain = Domain {
        radius: grid.radius,
    };
    let support_radius = spec.support_radius(domain);
    if support_radius > 0.95 * grid.radius {
        return Err(Error::Validation(format!(
            "potential support radius {support_radius} touches the boundary margin \
             (needs <= {})",
            0.95 * grid.radius
        )));
    }
    let values = match spec {
        PotentialSpec::GridSamples { values, .. } => {
            if values.len() != grid.len() {
                return Err(Error::Validation(format!(
                    "grid_samples length {} does not match grid size {}",
                    values.len(),
                    grid.len()
                )));
            }
            values.clone()
        }
        _ => grid
            .nodes
            .iter()
            .map(|&x| spec.eval(x, domain))
            .collect(),
    };
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Validation("potential has non-finite values".into()));
    }
    Ok(PotentialField {
        grid: grid.clone(),
        values,
        support_radius,
        spec: spec.clone(),
    })
}

/// Fourier transform v_hat(p) = int e^{-i p.x} v(x) dx by grid quadrature.
pub fn fourier_transform_potential(v: &PotentialField, p: Vec2) -> Complex64 {
    let mut sum = Complex64::new(0.0, 0.0);
    for (j, &x) in v.grid.nodes.iter().enumerate() {
        if v.values[j] == 0.0 {
            continue;
        }
        let phase = -(p[0] * x[0] + p[1] * x[1]);
        sum += Complex64::from_polar(1.0, phase) * v.values[j] * v.grid.weights[j];
    }
    sum
}

/// Run-level physical configuration.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ScatteringConfig {
    pub energy: f64,
    pub alpha: f64,
    #[serde(default = "default_dim")]
    pub dimension: usize,
}

fn default_dim() -> usize {
    2
}

impl ScatteringConfig {
    pub fn new(energy: f64, alpha: f64) -> Result<ScatteringConfig> {
        if !energy.is_finite() {
            return Err(Error::Config("energy must be finite".into()));
        }
        if !(alpha > -PI && alpha <= PI) {
            return Err(Error::Config("alpha must lie in (-pi, pi]".into()));
        }
        Ok(ScatteringConfig {
            energy,
            alpha,
            dimension: 2,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn boundary_grid_invariants() {
        assert!(build_boundary_grid(Domain::disk(1.0).unwrap(), 4).is_err());
        assert!(build_boundary_grid(Domain::disk(1.0).unwrap(), 9).is_err());
        let g = build_boundary_grid(Domain::disk(1.0).unwrap(), 8).unwrap();
        let total: f64 = g.weights.iter().sum();
        assert_abs_diff_eq!(total, 2.0 * PI, epsilon = 1e-12);
        let g = build_boundary_grid(Domain::disk(2.0).unwrap(), 64).unwrap();
        assert_abs_diff_eq!(g.points[0][0], 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(g.points[0][1], 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(g.normals[0][0], 1.0, epsilon = 1e-14);
        for j in 0..g.n {
            assert_abs_diff_eq!(geom::norm(g.normals[j]), 1.0, epsilon = 1e-14);
            assert_abs_diff_eq!(geom::norm(g.points[j]), 2.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn volume_grid_quadrature() {
        let d = Domain::disk(1.0).unwrap();
        assert!(build_volume_grid(d, 2, 8).is_err());
        let g = build_volume_grid(d, 16, 32).unwrap();
        let total: f64 = g.weights.iter().sum();
        assert_abs_diff_eq!(total, PI, epsilon = 1e-10);
        // r^2 integrates to pi/2
        let vals: Vec<f64> = g.nodes.iter().map(|x| geom::dot(*x, *x)).collect();
        assert_abs_diff_eq!(g.integrate_real(&vals), PI / 2.0, epsilon = 1e-10);
        assert!(g.nodes.iter().all(|x| geom::norm(*x) < 1.0));
        // split grid keeps exactness
        let g = build_volume_grid_split(d, 24, 32, &[0.5, 0.9]).unwrap();
        let total: f64 = g.weights.iter().sum();
        assert_abs_diff_eq!(total, PI, epsilon = 1e-10);
    }

    #[test]
    fn potential_sampling() {
        let d = Domain::disk(1.0).unwrap();
        let g = build_volume_grid_split(d, 24, 32, &[0.5]).unwrap();
        let zero = sample_potential(&PotentialSpec::Zero, &g).unwrap();
        assert!(zero.is_zero());
        let gauss = sample_potential(&PotentialSpec::gaussian(1.0, 0.2), &g).unwrap();
        assert_abs_diff_eq!(
            gauss.spec.eval([0.0, 0.0], d),
            1.0,
            epsilon = 1e-15
        );
        let step = sample_potential(&PotentialSpec::radial_step(2.0, 0.5), &g).unwrap();
        assert_abs_diff_eq!(step.spec.eval([0.3, 0.0], d), 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(step.spec.eval([0.7, 0.0], d), 0.0, epsilon = 1e-15);
        // support touching the boundary is rejected
        let bad = PotentialSpec::radial_step(1.0, 0.99);
        assert!(sample_potential(&bad, &g).is_err());
    }

    #[test]
    fn fourier_transform_gaussian() {
        let d = Domain::disk(1.0).unwrap();
        let spec = PotentialSpec::gaussian(0.1, 0.2);
        let s = spec.support_radius(d);
        let g = build_volume_grid_split(d, 48, 64, &[s]).unwrap();
        let v = sample_potential(&spec, &g).unwrap();
        // analytic transform of the untruncated gaussian: a 2 pi sigma^2 e^{-sigma^2 p^2/2}
        let analytic = |p: f64| 0.1 * 2.0 * PI * 0.04 * (-0.04 * p * p / 2.0).exp();
        let got = fourier_transform_potential(&v, [1.0, 0.0]);
        assert_abs_diff_eq!(got.re, analytic(1.0), epsilon = 3e-6);
        assert_abs_diff_eq!(got.re, 0.024_64, epsilon = 1e-5);
        assert_abs_diff_eq!(got.im, 0.0, epsilon = 1e-12);
        // against a high-resolution 1-D radial oracle of the truncated field
        let oracle = |p: f64| {
            let (x, w) = gauss_legendre_on(400, 0.0, s);
            let mut sum = 0.0;
            for (&r, &wr) in x.iter().zip(w.iter()) {
                sum += wr * r * spec.eval_radial(r, d) * crate::special::bessel_j0(p * r);
            }
            2.0 * PI * sum
        };
        let p = 3.0;
        let got = fourier_transform_potential(&v, [0.0, p]);
        assert_abs_diff_eq!(got.re, oracle(p), epsilon = 1e-8);
        // conjugate symmetry for real fields
        let a = fourier_transform_potential(&v, [1.3, -0.4]);
        let b = fourier_transform_potential(&v, [-1.3, 0.4]);
        assert!((a - b.conj()).norm() < 1e-14);
    }
}
