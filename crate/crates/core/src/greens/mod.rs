//! Green function evaluators: the free outgoing kernel, Faddeev kernels at
//! complex momentum, directional limits, and disk Robin Green functions
//! together with the transport lemmas that move them in alpha and in the
//! potential.

mod disk;
mod faddeev;
mod free;
mod kernel;

pub use disk::{dirichlet_mode_trace, DiskGreenTable, RadialBasis};
pub use faddeev::{
    faddeev_green, faddeev_green_directional, faddeev_green_gradient, faddeev_green_raw,
    faddeev_reduced, FaddeevTable,
};
pub use free::{free_green_plus, free_green_plus_2d, free_green_plus_gradient_2d};
pub use kernel::{
    green_bound_check, green_change_alpha, green_change_potential, BoundCheckReport, DomainGreen,
    GreenCorrection, GreenKernelMatrix, GreenKind,
};

use crate::error::{Error, Result};
use crate::geom::{self, Vec2};

/// Complex momentum k = re + i im with k.k equal to a real energy, which
/// forces re ⟂ im and |re|^2 - |im|^2 = E.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexMomentum {
    pub re: Vec2,
    pub im: Vec2,
    pub energy: f64,
}

impl ComplexMomentum {
    pub fn new(re: Vec2, im: Vec2) -> Result<ComplexMomentum> {
        let cross = geom::dot(re, im);
        let scale = geom::dot(re, re) + geom::dot(im, im);
        if cross.abs() > 1e-12 * scale.max(1.0) {
            return Err(Error::Config(format!(
                "complex momentum needs Re k ⟂ Im k for real energy (dot = {cross:.3e})"
            )));
        }
        Ok(ComplexMomentum {
            re,
            im,
            energy: geom::dot(re, re) - geom::dot(im, im),
        })
    }

    pub fn im_norm(&self) -> f64 {
        geom::norm(self.im)
    }

    pub fn re_norm(&self) -> f64 {
        geom::norm(self.re)
    }

    /// e^{i k · x} with complex k.
    pub fn plane_wave(&self, x: Vec2) -> num_complex::Complex64 {
        let phase = geom::dot(self.re, x);
        let growth = -geom::dot(self.im, x);
        num_complex::Complex64::from_polar(growth.exp(), phase)
    }

    pub fn neg(&self) -> ComplexMomentum {
        ComplexMomentum {
            re: geom::scale(self.re, -1.0),
            im: geom::scale(self.im, -1.0),
            energy: self.energy,
        }
    }
}

/// Unit direction on the circle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Direction {
    pub gamma: Vec2,
}

impl Direction {
    pub fn new(gamma: Vec2) -> Result<Direction> {
        let n = geom::norm(gamma);
        if (n - 1.0).abs() > 1e-14 {
            return Err(Error::Config(format!(
                "direction must be a unit vector (|gamma| = {n})"
            )));
        }
        Ok(Direction { gamma })
    }

    pub fn of(v: Vec2) -> Result<Direction> {
        let n = geom::norm(v);
        if n == 0.0 {
            return Err(Error::Config("cannot normalize the zero vector".into()));
        }
        Ok(Direction {
            gamma: geom::scale(v, 1.0 / n),
        })
    }
}
