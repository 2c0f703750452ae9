use super::geometry::{potential_at, potential_prime_at, Chirality, ModeSpec, Warp};
use super::LabError;

pub const MIN_POINTS: usize = 16;

/// Where the unknowns sit relative to the interval ends.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridKind {
    /// Interior nodes; the ends are nodes carrying the boundary values.
    Nodes,
    /// Cell centres; the ends are cell faces.
    Cells,
}

/// Uniform grid on `[a, b]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub n: usize,
    pub h: f64,
    pub rho_values: Vec<f64>,
    pub kind: GridKind,
    ends: (f64, f64),
}

impl Grid {
    /// `n` interior nodes, spacing `(b - a)/(n + 1)`.
    pub fn nodes(a: f64, b: f64, n: usize) -> Result<Self, LabError> {
        check_interval(a, b, n)?;
        let h = (b - a) / (n + 1) as f64;
        let rho_values = (1..=n).map(|i| a + i as f64 * h).collect();
        Ok(Grid { n, h, rho_values, kind: GridKind::Nodes, ends: (a, b) })
    }

    /// `n` cells of width `(b - a)/n`, unknowns at the centres.
    pub fn cells(a: f64, b: f64, n: usize) -> Result<Self, LabError> {
        check_interval(a, b, n)?;
        let h = (b - a) / n as f64;
        let rho_values = (0..n).map(|i| a + (i as f64 + 0.5) * h).collect();
        Ok(Grid { n, h, rho_values, kind: GridKind::Cells, ends: (a, b) })
    }

    /// Node grid covering a warp's domain.
    pub fn for_warp(warp: &impl Warp, spec: GridSpec) -> Result<Self, LabError> {
        let (a, b) = warp.domain();
        Grid::nodes(a, b, spec.interior_points(b - a)?)
    }

    /// Interval ends `(a, b)` the grid was built on.
    pub fn ends(&self) -> (f64, f64) {
        self.ends
    }
}

fn check_interval(a: f64, b: f64, n: usize) -> Result<(), LabError> {
    if !(b > a) || !a.is_finite() || !b.is_finite() {
        return Err(LabError::InvalidParams(format!("empty interval [{a}, {b}]")));
    }
    if n < MIN_POINTS {
        return Err(LabError::InvalidParams(format!("grid needs at least {MIN_POINTS} points, got {n}")));
    }
    Ok(())
}

/// How to resolve a domain of a given length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GridSpec {
    /// Target spacing; the point count is rounded so the spacing divides the length.
    Spacing(f64),
    /// Fixed number of interior points.
    Points(usize),
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec::Points(3999)
    }
}

impl GridSpec {
    pub fn interior_points(&self, length: f64) -> Result<usize, LabError> {
        match *self {
            GridSpec::Points(n) => Ok(n),
            GridSpec::Spacing(h) if h > 0.0 && h.is_finite() => {
                let intervals = (length / h).round().max(1.0) as usize;
                Ok(intervals.saturating_sub(1))
            }
            GridSpec::Spacing(h) => Err(LabError::InvalidParams(format!("spacing must be positive, got {h}"))),
        }
    }

    /// The same resolution with every spacing divided by `factor`.
    pub fn refined(&self, length: f64, factor: usize) -> Result<GridSpec, LabError> {
        let n = self.interior_points(length)?;
        Ok(GridSpec::Points((n + 1) * factor - 1))
    }
}

/// Real symmetric tridiagonal matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiagonal {
    pub diag: Vec<f64>,
    /// `off[i]` couples rows `i` and `i + 1`.
    pub off: Vec<f64>,
}

impl SymTridiagonal {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Result<Self, LabError> {
        if diag.is_empty() || off.len() + 1 != diag.len() {
            return Err(LabError::InvalidParams(format!(
                "tridiagonal shape mismatch: {} diagonal, {} off-diagonal",
                diag.len(),
                off.len()
            )));
        }
        Ok(SymTridiagonal { diag, off })
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        match i.abs_diff(j) {
            0 => self.diag[i],
            1 => self.off[i.min(j)],
            _ => 0.0,
        }
    }

    pub fn matvec(&self, v: &[f64]) -> Vec<f64> {
        let n = self.dim();
        (0..n)
            .map(|i| {
                let mut s = self.diag[i] * v[i];
                if i > 0 {
                    s += self.off[i - 1] * v[i - 1];
                }
                if i + 1 < n {
                    s += self.off[i] * v[i + 1];
                }
                s
            })
            .collect()
    }
}

/// Boundary condition at one end of the interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EndCondition {
    Dirichlet,
    /// `g' + V g = 0`, induced on the partner component by `f = 0`.
    Partner,
}

fn squared_diagonal(warp: &impl Warp, mode: &ModeSpec, rho: f64) -> f64 {
    let v = potential_at(warp, mode, rho);
    let dv = potential_prime_at(warp, mode, rho);
    match mode.chirality {
        Chirality::Plus => v * v + dv,
        Chirality::Minus => v * v - dv,
    }
}

/// Second-order finite differences for `-∂² + V² ± V'` with the given end
/// conditions.
pub fn assemble_with(
    warp: &impl Warp,
    mode: &ModeSpec,
    grid: &Grid,
    left: EndCondition,
    right: EndCondition,
) -> Result<SymTridiagonal, LabError> {
    let h2 = grid.h * grid.h;
    let mut diag: Vec<f64> = grid
        .rho_values
        .iter()
        .map(|&rho| 2.0 / h2 + squared_diagonal(warp, mode, rho))
        .collect();
    let off = vec![-1.0 / h2; grid.n - 1];
    let (a, b) = grid.ends();
    let n = grid.n;
    match grid.kind {
        GridKind::Nodes => {
            if left != EndCondition::Dirichlet || right != EndCondition::Dirichlet {
                return Err(LabError::InvalidParams(
                    "partner ends need a cell-centred grid".into(),
                ));
            }
        }
        GridKind::Cells => {
            // ghost value g_ghost = r · g_adjacent
            let ratio = |cond: EndCondition, at: f64, outward: f64| match cond {
                EndCondition::Dirichlet => -1.0,
                EndCondition::Partner => {
                    let hv = 0.5 * grid.h * potential_at(warp, mode, at) * outward;
                    (1.0 - hv) / (1.0 + hv)
                }
            };
            diag[0] -= ratio(left, a, -1.0) / h2;
            diag[n - 1] -= ratio(right, b, 1.0) / h2;
        }
    }
    SymTridiagonal::new(diag, off)
}

/// Dirichlet at both ends.
pub fn assemble_hamiltonian(warp: &impl Warp, mode: &ModeSpec, grid: &Grid) -> Result<SymTridiagonal, LabError> {
    assemble_with(warp, mode, grid, EndCondition::Dirichlet, EndCondition::Dirichlet)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dirac::geometry::{FlatCylinder, NeckGeometry};

    #[test]
    fn grids() {
        let g = Grid::nodes(0.0, 1.0, 99).unwrap();
        assert_eq!(g.h, 0.01);
        assert!((g.rho_values[98] - 0.99).abs() < 1e-14);
        let (a, b) = g.ends();
        assert!(a.abs() < 1e-14 && (b - 1.0).abs() < 1e-14);
        let c = Grid::cells(-1.0, 1.0, 20).unwrap();
        assert_eq!(c.rho_values[0], -0.95);
        let (a, b) = c.ends();
        assert!((a + 1.0).abs() < 1e-14 && (b - 1.0).abs() < 1e-14);
        assert!(Grid::nodes(0.0, 1.0, 15).is_err());
        assert!(Grid::nodes(1.0, 1.0, 20).is_err());
    }

    #[test]
    fn spacing_spec() {
        assert_eq!(GridSpec::Spacing(0.25).interior_points(10.0).unwrap(), 39);
        assert_eq!(GridSpec::default().interior_points(3.0).unwrap(), 3999);
        assert_eq!(GridSpec::Points(99).refined(1.0, 2).unwrap(), GridSpec::Points(199));
        assert!(GridSpec::Spacing(0.0).interior_points(1.0).is_err());
    }

    #[test]
    fn symmetric_and_chirality_difference() {
        let geom = NeckGeometry::neck(0.3).unwrap();
        let grid = Grid::for_warp(&geom, GridSpec::Points(200)).unwrap();
        let p = assemble_hamiltonian(&geom, &ModeSpec::plus(1), &grid).unwrap();
        let m = assemble_hamiltonian(&geom, &ModeSpec::minus(1), &grid).unwrap();
        for i in 0..p.dim() {
            for j in 0..p.dim() {
                assert_eq!(p.get(i, j), p.get(j, i));
            }
        }
        assert_eq!(p.off, m.off);
        let mode = ModeSpec::plus(1);
        for (i, &rho) in grid.rho_values.iter().enumerate() {
            let dv = potential_prime_at(&geom, &mode, rho);
            assert!((p.diag[i] - m.diag[i] - 2.0 * dv).abs() <= 1e-9 * p.diag[i].abs());
        }
    }

    #[test]
    fn flat_diagonal() {
        let flat = FlatCylinder { length: 1.0, radius: 0.5 };
        let grid = Grid::for_warp(&flat, GridSpec::Points(31)).unwrap();
        let t = assemble_hamiltonian(&flat, &ModeSpec::plus(0), &grid).unwrap();
        assert!(t.diag.iter().all(|&d| (d - (2.0 / (grid.h * grid.h) + 1.0)).abs() < 1e-9));
        let cells = Grid::cells(0.0, 1.0, 32).unwrap();
        assert!(assemble_with(&flat, &ModeSpec::minus(0), &grid, EndCondition::Partner, EndCondition::Dirichlet).is_err());
        let c = assemble_with(&flat, &ModeSpec::minus(0), &cells, EndCondition::Dirichlet, EndCondition::Partner).unwrap();
        assert!(c.diag[0] > c.diag[1]);
    }
}
