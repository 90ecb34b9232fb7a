//! Spectral laboratory for the dimensionally reduced Seiberg–Witten equations
//! with a Higgs field on a flat torus.
//!
//! The crate is organised bottom-up:
//!
//! - [`surface`]: the periodic grid, Fourier-multiplier Dolbeault calculus,
//!   Hodge star, quadrature and the Green operator of the Laplacian.
//! - [`fields`]: connections, spinors, Higgs fields, gauge transformations and
//!   the explicit torus solution family.
//! - [`equations`]: residuals of the curvature, Higgs and Dirac equations,
//!   the least-squares energy and the Green-operator Higgs construction.
//! - [`lift4d`]: the four-dimensional equations evaluated on
//!   `x₃, x₄`-independent data and the 4D↔2D correspondence check.
//! - [`linear`]: the deformation complex, its assembled real-linear matrix and
//!   SVD-based kernel / cokernel counts.
//! - [`hk`]: metric, symplectic forms, almost complex structures and moment
//!   map identities on the tangent space.
//! - [`solver`]: Gauss–Newton and gradient flow on the energy, Coulomb gauge.
//! - [`io`] and [`cli`]: CSV field dumps, configuration containers, JSON
//!   reports and the command-line entry points.

pub mod cli;
pub mod equations;
pub mod error;
pub mod fields;
pub mod hk;
pub mod io;
pub mod lift4d;
pub mod linear;
pub mod solver;
pub mod surface;

pub use error::{Result, SwError};
pub use fields::{Configuration, GaugeElement, TangentVector};
pub use surface::{OneFormField, ScalarField, TorusGrid, TwoFormField, C64};

/// Version string embedded in every report.
pub const VERSION: &str = concat!("swred ", env!("CARGO_PKG_VERSION"));
