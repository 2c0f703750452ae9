//! Dirac operator on a pinching hyperbolic neck, reduced mode by mode to
//! one-dimensional Schrödinger operators and solved by finite differences.

mod analysis;
mod eigen;
mod geometry;
mod operator;
mod spectrum;

use thiserror::Error;

pub use analysis::{
    convergence_order, observed_order, relative_resolvent_trace, susy_pairing, trace_from_table,
    SusyReport, TraceValue,
};
pub use eigen::{eigen_lowest, eigen_pairs, eigen_vectors};
pub use geometry::{
    circle_spectrum, indicial_min, indicial_scan, indicial_value, neck_halfwidth, phi, potential,
    Chirality, CuspSide, FlatCylinder, IndicialScan, ModeSpec, NeckGeometry, Spin, Warp,
};
pub use operator::{
    assemble_hamiltonian, assemble_with, EndCondition, Grid, GridKind, GridSpec, SymTridiagonal,
};
pub use spectrum::{
    cusp_depth_for, dirac_spectrum, mode_spectrum, neck_mass, solve_cusp, spectral_sweep, LabParams,
    ModeSolution, ModeVector, SpectrumRow, SpectrumTable, TableEntry, DEFAULT_MARGIN, DEFAULT_TOL,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LabError {
    #[error("rho = {rho} lies outside [{lo}, {hi}]")]
    OutOfDomain { rho: f64, lo: f64, hi: f64 },
    #[error("pinching parameter must be positive here, got {0}")]
    NonPositiveT(f64),
    #[error("{0}")]
    InvalidParams(String),
    #[error("bisection for eigenvalue {index} did not converge")]
    NonConvergence { index: usize },
    #[error("mode k = {k} at t = {t}: {source}")]
    Mode {
        t: f64,
        k: i64,
        #[source]
        source: Box<LabError>,
    },
    #[error("spectral collision: mu = {mu} is within tolerance of lambda = {lambda}")]
    SpectralCollision { mu: f64, lambda: f64 },
    #[error("mass window must have positive width, got {0}")]
    EmptyWindow(f64),
}
