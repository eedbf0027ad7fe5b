//! Numerical machinery for inverse boundary value problems of the fixed-energy
//! Schrödinger equation on 2-D disk domains.
//!
//! The crate turns impedance (Robin-to-Robin) boundary measurements into
//! generalized scattering data and a band-limited reconstruction of the
//! potential.  The main pieces are
//!
//! * [`domain`] — disks, Nyström grids, potentials and run configuration,
//! * [`greens`] — free, Faddeev and disk Robin Green functions,
//! * [`boundary_ops`] — the boundary operator algebra (impedance maps, DtN,
//!   well-posedness probes),
//! * [`volume_oracle`] — volume-integral forward solvers used as ground truth,
//! * [`scattering`] — boundary kernels, trace equations and scattering data,
//! * [`inversion`] — Born inversion and error metrics,
//! * [`container`], [`config`], [`report`], [`validate`] — on-disk formats and
//!   validation suites backing the CLI.

pub mod boundary_ops;
pub mod config;
pub mod container;
pub mod diag;
pub mod domain;
pub mod error;
pub mod fftutil;
pub mod geom;
pub mod greens;
pub mod inversion;
pub mod linalg;
pub mod ode;
pub mod quadrature;
pub mod report;
pub mod scattering;
pub mod special;
pub mod threads;
pub mod validate;
pub mod volume_oracle;

pub use error::{Error, Result};
