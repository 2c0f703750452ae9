use std::cmp::Ordering;
use std::sync::Arc;

use rayon::prelude::*;

use super::eigen::{eigen_lowest, eigen_vectors};
use super::geometry::{CuspSide, ModeSpec, NeckGeometry};
use super::operator::{assemble_hamiltonian, Grid, GridSpec};
use super::LabError;

pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_MARGIN: f64 = 50.0;
const TRUNCATION_ROUNDS: usize = 32;

/// Numerical settings shared by every spectral computation.
#[derive(Debug, Clone, PartialEq)]
pub struct LabParams {
    /// Modes `k = 0..=k_max` (each standing for the pair `k, -k-1`).
    pub k_max: u32,
    /// Eigenvalues kept per mode.
    pub levels: usize,
    pub grid: GridSpec,
    /// Cusp truncation: `V(rho_min) >= margin · √μ_max`.
    pub margin: f64,
    pub tol: f64,
    /// Keep eigenvectors for the lowest this many levels of every mode.
    pub vector_levels: usize,
}

impl Default for LabParams {
    fn default() -> Self {
        LabParams {
            k_max: 10,
            levels: 40,
            grid: GridSpec::default(),
            margin: DEFAULT_MARGIN,
            tol: DEFAULT_TOL,
            vector_levels: 0,
        }
    }
}

impl LabParams {
    pub fn validate(&self) -> Result<(), LabError> {
        if self.levels == 0 {
            return Err(LabError::InvalidParams("levels must be at least 1".into()));
        }
        if !(self.margin > 0.0) {
            return Err(LabError::InvalidParams(format!("margin must be positive, got {}", self.margin)));
        }
        if !(self.tol > 0.0) {
            return Err(LabError::InvalidParams(format!("tolerance must be positive, got {}", self.tol)));
        }
        if let GridSpec::Spacing(h) = self.grid {
            if !(h > 0.0) {
                return Err(LabError::InvalidParams(format!("spacing must be positive, got {h}")));
            }
        }
        Ok(())
    }
}

/// Eigenvector of one mode problem on its grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeVector {
    pub geometry: NeckGeometry,
    pub rho: Vec<f64>,
    pub h: f64,
    pub values: Vec<f64>,
}

/// Fraction of the discrete L² mass of `v` inside `|x| <= w`.
pub fn neck_mass(v: &ModeVector, w: f64) -> Result<f64, LabError> {
    if !(w > 0.0) {
        return Err(LabError::EmptyWindow(w));
    }
    let total: f64 = v.values.iter().map(|x| x * x).sum();
    let inside: f64 = v
        .rho
        .iter()
        .zip(&v.values)
        .filter(|(&rho, _)| v.geometry.x_of(rho).abs() <= w)
        .map(|(_, x)| x * x)
        .sum();
    Ok(inside / total)
}

/// Solution of a single mode problem.
#[derive(Debug, Clone)]
pub struct ModeSolution {
    pub geometry: NeckGeometry,
    pub mu: Vec<f64>,
    pub vectors: Vec<ModeVector>,
}

fn solve_on(
    geom: &NeckGeometry,
    mode: &ModeSpec,
    params: &LabParams,
    keep: usize,
) -> Result<ModeSolution, LabError> {
    let grid = Grid::for_warp(geom, params.grid)?;
    let t = assemble_hamiltonian(geom, mode, &grid)?;
    let mu = eigen_lowest(&t, params.levels, params.tol)?;
    let vectors = eigen_vectors(&t, &mu[..keep.min(mu.len())], grid.h)?
        .into_iter()
        .map(|values| ModeVector { geometry: *geom, rho: grid.rho_values.clone(), h: grid.h, values })
        .collect();
    Ok(ModeSolution { geometry: *geom, mu, vectors })
}

/// Depth at which `V = (k + 1/2) e^{-depth}` reaches `margin · √μ_max`.
pub fn cusp_depth_for(frequency: f64, mu_max: f64, margin: f64) -> f64 {
    (frequency.abs() / (margin * mu_max.max(1e-300).sqrt())).ln()
}

/// Solve on one cusp, deepening the truncation until it satisfies the margin
/// for the eigenvalues it produces.
pub fn solve_cusp(
    side: CuspSide,
    mode: &ModeSpec,
    params: &LabParams,
    keep: usize,
) -> Result<ModeSolution, LabError> {
    let wall = 2f64.ln();
    let mut depth = cusp_depth_for(mode.frequency(), 1.0, params.margin).min(wall - 1.0);
    for _ in 0..TRUNCATION_ROUNDS {
        let geom = NeckGeometry::cusp(side, depth)?;
        let sol = solve_on(&geom, mode, params, keep)?;
        let mu_max = *sol.mu.last().expect("levels >= 1");
        let needed = cusp_depth_for(mode.frequency(), mu_max, params.margin);
        if needed >= depth - 1e-12 {
            return Ok(sol);
        }
        depth = needed;
    }
    Err(LabError::InvalidParams(format!(
        "cusp truncation for k = {} did not settle",
        mode.k
    )))
}

/// One row of a spectrum table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumRow {
    pub t: f64,
    pub k: i64,
    /// Level within mode `k`, counted from 1.
    pub j: usize,
    pub mu: f64,
    pub lambda: f64,
}

/// A row with its eigenvector, when kept.
pub type TableEntry = (SpectrumRow, Option<Arc<ModeVector>>);

/// Eigenvalues of the squared Dirac operator, sorted by `(t, λ)`.
#[derive(Debug, Clone, Default)]
pub struct SpectrumTable {
    pub rows: Vec<SpectrumRow>,
    /// Eigenvector for a row, when kept; parallel to `rows`.
    pub vectors: Vec<Option<Arc<ModeVector>>>,
}

fn row_order(a: &SpectrumRow, b: &SpectrumRow) -> Ordering {
    a.t.total_cmp(&b.t)
        .then(a.lambda.total_cmp(&b.lambda))
        .then(a.k.cmp(&b.k))
        .then(a.j.cmp(&b.j))
}

impl SpectrumTable {
    fn from_parts(mut parts: Vec<TableEntry>) -> Self {
        parts.sort_by(|a, b| row_order(&a.0, &b.0));
        let (rows, vectors) = parts.into_iter().unzip();
        SpectrumTable { rows, vectors }
    }

    pub fn ts(&self) -> Vec<f64> {
        let mut ts: Vec<f64> = self.rows.iter().map(|r| r.t).collect();
        ts.dedup();
        ts
    }

    pub fn at(&self, t: f64) -> impl Iterator<Item = (usize, &SpectrumRow)> {
        self.rows.iter().enumerate().filter(move |(_, r)| r.t == t)
    }

    /// Number of rows at `t` with `a < λ < b`.
    pub fn eigen_count(&self, a: f64, b: f64, t: f64) -> usize {
        self.at(t).filter(|(_, r)| r.lambda > a && r.lambda < b).count()
    }

    /// Smallest `λ` at `t`.
    pub fn lambda_min(&self, t: f64) -> Option<f64> {
        self.at(t).map(|(_, r)| r.lambda).next()
    }

    /// The `rank`-th lowest row at `t` (from 1) together with its eigenvector.
    pub fn ranked(&self, t: f64, rank: usize) -> Option<(&SpectrumRow, Option<&ModeVector>)> {
        self.at(t)
            .nth(rank.checked_sub(1)?)
            .map(|(i, r)| (r, self.vectors[i].as_deref()))
    }
}

fn mode_rows(t: f64, k: i64, sol_mu: &[f64], vectors: Vec<ModeVector>) -> Vec<TableEntry> {
    let mut vectors = vectors.into_iter().map(Arc::new);
    sol_mu
        .iter()
        .enumerate()
        .map(|(i, &mu)| {
            let row = SpectrumRow { t, k, j: i + 1, mu, lambda: mu.max(0.0).sqrt() };
            (row, vectors.next())
        })
        .collect()
}

/// Spectrum of a single mode `k` at `t`. At `t = 0` the two cusp branches
/// are merged and the lowest `levels` kept.
pub fn mode_spectrum(
    t: f64,
    k: i64,
    params: &LabParams,
) -> Result<Vec<TableEntry>, LabError> {
    let mode = ModeSpec::plus(k);
    let keep = params.vector_levels.min(params.levels);
    let wrap = |e: LabError| LabError::Mode { t, k, source: Box::new(e) };
    if t > 0.0 {
        let geom = NeckGeometry::neck(t).map_err(wrap)?;
        let sol = solve_on(&geom, &mode, params, keep).map_err(wrap)?;
        return Ok(mode_rows(t, k, &sol.mu, sol.vectors));
    }
    if t != 0.0 {
        return Err(LabError::NonPositiveT(t));
    }
    let right = solve_cusp(CuspSide::RightCusp, &mode, params, keep).map_err(wrap)?;
    let left = solve_cusp(CuspSide::LeftCusp, &mode, params, keep).map_err(wrap)?;
    let mut merged: Vec<(f64, Option<ModeVector>)> = Vec::with_capacity(2 * params.levels);
    for sol in [right, left] {
        let mut vecs = sol.vectors.into_iter();
        merged.extend(sol.mu.iter().map(|&mu| (mu, vecs.next())));
    }
    merged.sort_by(|a, b| a.0.total_cmp(&b.0));
    merged.truncate(params.levels);
    let mu: Vec<f64> = merged.iter().map(|(m, _)| *m).collect();
    let mut rows = mode_rows(t, k, &mu, Vec::new());
    for ((_, slot), (_, v)) in rows.iter_mut().zip(merged) {
        *slot = v.map(Arc::new);
    }
    Ok(rows)
}

/// Spectrum at one `t` over the modes `0..=k_max`.
pub fn dirac_spectrum(t: f64, params: &LabParams) -> Result<SpectrumTable, LabError> {
    spectral_sweep(&[t], params)
}

/// Spectra over a grid of pinching parameters; tasks `(t, k)` run in
/// parallel and are merged by sorting.
pub fn spectral_sweep(t_grid: &[f64], params: &LabParams) -> Result<SpectrumTable, LabError> {
    params.validate()?;
    for (i, &t) in t_grid.iter().enumerate() {
        if !(t >= 0.0) || !t.is_finite() {
            return Err(LabError::NonPositiveT(t));
        }
        if t_grid[..i].contains(&t) {
            return Err(LabError::InvalidParams(format!("t = {t} appears twice in the grid")));
        }
    }
    let tasks: Vec<(f64, i64)> = t_grid
        .iter()
        .flat_map(|&t| (0..=i64::from(params.k_max)).map(move |k| (t, k)))
        .collect();
    let solved: Vec<_> = tasks
        .par_iter()
        .map(|&(t, k)| mode_spectrum(t, k, params))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(SpectrumTable::from_parts(solved.into_iter().flatten().collect()))
}
