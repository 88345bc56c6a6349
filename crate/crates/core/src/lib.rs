//! Shape optimization of wave-breaking obstacles in coastal domains.
//!
//! The library solves the 2D viscous shallow-water equations on unstructured
//! triangular meshes with a nodal discontinuous-Galerkin method, solves the
//! continuous adjoint system backward in time, assembles the volume form of
//! the shape derivative together with geometric penalty derivatives, and
//! deforms an interior obstacle boundary by elasticity-smoothed gradient
//! steps so that wave height and velocities along a protected shore approach
//! prescribed targets.
//!
//! Module map:
//! - [`mesh`]: triangulation, boundary tagging, geometry caches, deformation
//! - [`dg`]: reference-element basis, quadrature, fields, mass operators
//! - [`swe`]: forward shallow-water solver (fluxes, SIPG viscosity, sources)
//! - [`adjoint`]: backward-in-time continuous adjoint solver
//! - [`geometry`]: signed distances, penalty functionals and their derivatives
//! - [`gradient`]: objective, volume-form shape derivative, elasticity smoothing
//! - [`optimizer`]: outer descent loop with shape-valid line search
//! - [`scenario`]: configuration, bathymetry ingestion, run drivers
//! - [`io`]: Gmsh MSH 2.2 and legacy VTK file formats, CSV reports

pub mod adjoint;
pub mod dg;
pub mod geometry;
pub mod gradient;
pub mod io;
pub mod mesh;
pub mod optimizer;
pub mod scenario;
pub mod swe;

mod sparse;
mod vec2;

pub use sparse::{CsrMatrix, SparseBuilder};
pub use vec2::Vec2;

use thiserror::Error;

/// Unified error type for mesh, solver, and configuration failures.
#[derive(Debug, Error)]
pub enum Error {
    #[error("mesh error: {0}")]
    Mesh(String),
    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error in {path}:{line}: {msg}")]
    Parse {
        path: String,
        line: usize,
        msg: String,
    },
    #[error("config error at {key}: {msg}")]
    Config { key: String, msg: String },
    #[error("solver failure: {0}")]
    Solver(String),
    #[error("water height dropped below {h_min:.3e} in cell {cell} at t = {t:.6}")]
    DryState { cell: usize, t: f64, h_min: f64 },
    #[error("NaN detected in {context} at t = {t:.6}")]
    NotFinite { context: String, t: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
