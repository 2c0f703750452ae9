use num_traits::Zero;

use super::LabError;
use crate::Rational;

/// Which piece of the neck a geometry describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CuspSide {
    /// The whole neck, `t > 0`.
    Full,
    /// `t = 0`, cusp opening to the left: `φ = e^{-ρ}` on `[-log 2, -rho_min]`.
    LeftCusp,
    /// `t = 0`, cusp opening to the right: `φ = e^{ρ}` on `[rho_min, log 2]`.
    RightCusp,
}

/// Half-width `t / sinh(t/2)` of the collar in the `x` coordinate.
pub fn neck_halfwidth(t: f64) -> Result<f64, LabError> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(LabError::NonPositiveT(t));
    }
    Ok(t / (t / 2.0).sinh())
}

/// Warping function `φ` of a metric `dρ² + φ(ρ)² dy²` on an interval.
pub trait Warp: Sync {
    fn domain(&self) -> (f64, f64);
    fn phi_at(&self, rho: f64) -> f64;
    fn phi_prime_at(&self, rho: f64) -> f64;
}

/// The hyperbolic collar in arclength gauge, or one of its two cusp limits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NeckGeometry {
    pub t: f64,
    pub rho_min: f64,
    pub rho_max: f64,
    pub cusp_side: CuspSide,
}

impl NeckGeometry {
    /// The full neck at `t > 0`, with walls where `φ = √(a² + t²)`.
    pub fn neck(t: f64) -> Result<Self, LabError> {
        neck_halfwidth(t)?;
        let r = (1.0 / (t / 2.0).sinh()).asinh();
        Ok(NeckGeometry { t, rho_min: -r, rho_max: r, cusp_side: CuspSide::Full })
    }

    /// One cusp at `t = 0`, truncated at depth `depth` (`φ = e^{depth}` there).
    pub fn cusp(side: CuspSide, depth: f64) -> Result<Self, LabError> {
        let wall = 2f64.ln();
        if !(depth < wall) {
            return Err(LabError::InvalidParams(format!(
                "cusp truncation {depth} must lie below log 2"
            )));
        }
        let (rho_min, rho_max) = match side {
            CuspSide::RightCusp => (depth, wall),
            CuspSide::LeftCusp => (-wall, -depth),
            CuspSide::Full => {
                return Err(LabError::InvalidParams("a cusp needs a side".into()));
            }
        };
        Ok(NeckGeometry { t: 0.0, rho_min, rho_max, cusp_side: side })
    }

    pub fn length(&self) -> f64 {
        self.rho_max - self.rho_min
    }

    /// Depth `log φ` of the truncated end of a cusp.
    pub fn cusp_depth(&self) -> f64 {
        match self.cusp_side {
            CuspSide::LeftCusp => -self.rho_max,
            _ => self.rho_min,
        }
    }

    /// The collar coordinate `x`, with `φ = √(x² + t²)`.
    pub fn x_of(&self, rho: f64) -> f64 {
        match self.cusp_side {
            CuspSide::Full => self.t * rho.sinh(),
            CuspSide::RightCusp => rho.exp(),
            CuspSide::LeftCusp => -(-rho).exp(),
        }
    }

    fn check(&self, rho: f64) -> Result<(), LabError> {
        if rho >= self.rho_min && rho <= self.rho_max {
            Ok(())
        } else {
            Err(LabError::OutOfDomain { rho, lo: self.rho_min, hi: self.rho_max })
        }
    }
}

impl Warp for NeckGeometry {
    fn domain(&self) -> (f64, f64) {
        (self.rho_min, self.rho_max)
    }

    fn phi_at(&self, rho: f64) -> f64 {
        match self.cusp_side {
            CuspSide::Full => self.t * rho.cosh(),
            CuspSide::RightCusp => rho.exp(),
            CuspSide::LeftCusp => (-rho).exp(),
        }
    }

    fn phi_prime_at(&self, rho: f64) -> f64 {
        match self.cusp_side {
            CuspSide::Full => self.t * rho.sinh(),
            CuspSide::RightCusp => rho.exp(),
            CuspSide::LeftCusp => -(-rho).exp(),
        }
    }
}

/// Flat cylinder `[0, length] × S¹` with constant `φ = radius`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlatCylinder {
    pub length: f64,
    pub radius: f64,
}

impl Warp for FlatCylinder {
    fn domain(&self) -> (f64, f64) {
        (0.0, self.length)
    }

    fn phi_at(&self, _rho: f64) -> f64 {
        self.radius
    }

    fn phi_prime_at(&self, _rho: f64) -> f64 {
        0.0
    }
}

pub fn phi(geom: &NeckGeometry, rho: f64) -> Result<f64, LabError> {
    geom.check(rho)?;
    Ok(geom.phi_at(rho))
}

/// Chirality of the squared mode operator `-∂² + V² ± V'`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Chirality {
    Plus,
    Minus,
}

/// Fourier mode `k` on the circle; with the antiperiodic spin structure its
/// frequency is `k + 1/2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ModeSpec {
    pub k: i64,
    pub chirality: Chirality,
}

impl ModeSpec {
    pub fn plus(k: i64) -> Self {
        ModeSpec { k, chirality: Chirality::Plus }
    }

    pub fn minus(k: i64) -> Self {
        ModeSpec { k, chirality: Chirality::Minus }
    }

    pub fn frequency(&self) -> f64 {
        self.k as f64 + 0.5
    }
}

pub(crate) fn potential_at(warp: &impl Warp, mode: &ModeSpec, rho: f64) -> f64 {
    mode.frequency() / warp.phi_at(rho)
}

pub(crate) fn potential_prime_at(warp: &impl Warp, mode: &ModeSpec, rho: f64) -> f64 {
    let p = warp.phi_at(rho);
    -mode.frequency() * warp.phi_prime_at(rho) / (p * p)
}

/// `V_k = (k + 1/2)/φ`.
pub fn potential(geom: &NeckGeometry, mode: &ModeSpec, rho: f64) -> Result<f64, LabError> {
    geom.check(rho)?;
    Ok(potential_at(geom, mode, rho))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spin {
    Trivial,
    NonTrivial,
}

/// Spectrum of the circle Dirac operator on Fourier modes `|k| <= cutoff`.
pub fn circle_spectrum(spin: Spin, cutoff: u32) -> Vec<Rational> {
    let c = i64::from(cutoff);
    let shift = match spin {
        Spin::Trivial => Rational::zero(),
        Spin::NonTrivial => Rational::new(1, 2),
    };
    let mut values: Vec<Rational> = (-c..=c).map(|k| shift - Rational::from_integer(k)).collect();
    values.sort();
    values
}

/// Values `1/4 + ξ²(1 + sin²θ)²/8` of the squared indicial family on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct IndicialScan {
    pub xi_grid: Vec<f64>,
    pub theta_grid: Vec<f64>,
    /// `values[i][j]` at `(xi_grid[i], theta_grid[j])`.
    pub values: Vec<Vec<f64>>,
}

pub fn indicial_value(xi: f64, theta: f64) -> f64 {
    let s = theta.sin();
    let w = 1.0 + s * s;
    0.25 + xi * xi * w * w / 8.0
}

pub fn indicial_scan(xi_grid: &[f64], theta_grid: &[f64]) -> IndicialScan {
    let values = xi_grid
        .iter()
        .map(|&xi| theta_grid.iter().map(|&th| indicial_value(xi, th)).collect())
        .collect();
    IndicialScan { xi_grid: xi_grid.to_vec(), theta_grid: theta_grid.to_vec(), values }
}

/// Minimum of the scan and the `(ξ, θ)` where it is first attained.
pub fn indicial_min(xi_grid: &[f64], theta_grid: &[f64]) -> Result<(f64, (f64, f64)), LabError> {
    if xi_grid.is_empty() || theta_grid.is_empty() {
        return Err(LabError::InvalidParams("indicial grids must be nonempty".into()));
    }
    let scan = indicial_scan(xi_grid, theta_grid);
    let mut best = (f64::INFINITY, (0.0, 0.0));
    for (i, row) in scan.values.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            if v < best.0 {
                best = (v, (xi_grid[i], theta_grid[j]));
            }
        }
    }
    Ok(best)
}
