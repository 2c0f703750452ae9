use super::eigen::eigen_lowest;
use super::geometry::{CuspSide, ModeSpec, Warp};
use super::operator::{assemble_hamiltonian, assemble_with, EndCondition, Grid};
use super::spectrum::{dirac_spectrum, solve_cusp, LabParams, SpectrumTable};
use super::LabError;

/// Relative resolvent trace at one `t`, with the estimated contribution of
/// the levels beyond those computed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceValue {
    pub t: f64,
    pub g: f64,
    pub tail: f64,
}

/// `Σ 2·[1/(μ - λ) - 1/(μ - λ₀)]` over the rows of `table` at `t`; the factor
/// 2 counts the pair `k, -k-1`.
pub fn trace_from_table(
    table: &SpectrumTable,
    t: f64,
    lambda: f64,
    lambda0: f64,
    tol: f64,
) -> Result<TraceValue, LabError> {
    let mut g = 0.0;
    let mut top: std::collections::BTreeMap<i64, (usize, f64)> = Default::default();
    for (_, row) in table.at(t) {
        for shift in [lambda, lambda0] {
            if (row.mu - shift).abs() < tol {
                return Err(LabError::SpectralCollision { mu: row.mu, lambda: shift });
            }
        }
        g += 2.0 * (1.0 / (row.mu - lambda) - 1.0 / (row.mu - lambda0));
        let entry = top.entry(row.k).or_insert((0, row.mu));
        if row.j >= entry.0 {
            *entry = (row.j, row.mu);
        }
    }
    // eigenvalues grow like j², so the remainder past level L is about
    // (λ - λ₀) L / (3 μ_L²) per mode
    let tail = top
        .values()
        .map(|&(levels, mu)| 2.0 * (lambda - lambda0) * levels as f64 / (3.0 * mu * mu))
        .sum();
    Ok(TraceValue { t, g, tail })
}

pub fn relative_resolvent_trace(
    t: f64,
    lambda: f64,
    lambda0: f64,
    params: &LabParams,
) -> Result<TraceValue, LabError> {
    let table = dirac_spectrum(t, params)?;
    trace_from_table(&table, t, lambda, lambda0, params.tol)
}

/// `log(|e_coarse| / |e_fine|) / log(h_coarse / h_fine)`.
pub fn observed_order(err_coarse: f64, err_fine: f64, h_coarse: f64, h_fine: f64) -> f64 {
    (err_coarse.abs() / err_fine.abs()).ln() / (h_coarse / h_fine).ln()
}

fn level_on(warp: &impl Warp, mode: &ModeSpec, level: usize, intervals: usize, tol: f64) -> Result<(f64, f64), LabError> {
    let (a, b) = warp.domain();
    let grid = Grid::nodes(a, b, intervals - 1)?;
    let t = assemble_hamiltonian(warp, mode, &grid)?;
    let mu = eigen_lowest(&t, level, tol)?;
    Ok((mu[level - 1], grid.h))
}

/// Observed convergence order of eigenvalue number `level` (from 1) between
/// spacings `h` and `h_fine`, measured against a grid eight times finer still.
pub fn convergence_order(
    warp: &impl Warp,
    mode: &ModeSpec,
    level: usize,
    h: f64,
    h_fine: f64,
    tol: f64,
) -> Result<f64, LabError> {
    if !(h_fine > 0.0) || !(h_fine < h) {
        return Err(LabError::InvalidParams(format!(
            "need 0 < h_fine < h, got h = {h}, h_fine = {h_fine}"
        )));
    }
    if level == 0 {
        return Err(LabError::InvalidParams("levels are counted from 1".into()));
    }
    let (a, b) = warp.domain();
    let n_coarse = ((b - a) / h).round() as usize;
    let n_fine = ((b - a) / h_fine).round() as usize;
    if n_fine <= n_coarse {
        return Err(LabError::InvalidParams("grids coincide after rounding".into()));
    }
    let (mu_c, hc) = level_on(warp, mode, level, n_coarse, tol)?;
    let (mu_f, hf) = level_on(warp, mode, level, n_fine, tol)?;
    let (mu_ref, _) = level_on(warp, mode, level, 8 * n_fine, tol)?;
    Ok(observed_order(mu_c - mu_ref, mu_f - mu_ref, hc, hf))
}

/// Spectra of the two squared chiralities on a cusp, each extrapolated from
/// spacings `h` and `h/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct SusyReport {
    pub k: i64,
    pub depth: f64,
    pub plus: Vec<f64>,
    pub minus: Vec<f64>,
    pub max_relative: f64,
}

fn richardson(coarse: &[f64], fine: &[f64]) -> Vec<f64> {
    coarse.iter().zip(fine).map(|(c, f)| (4.0 * f - c) / 3.0).collect()
}

/// Compare `H₊` (Dirichlet) with its partner `H₋` on the right cusp at
/// `t = 0`; the partner carries `g' + V g = 0` at the wall.
pub fn susy_pairing(k: i64, levels: usize, params: &LabParams) -> Result<SusyReport, LabError> {
    let params = LabParams { levels, ..params.clone() };
    params.validate()?;
    let plus_mode = ModeSpec::plus(k);
    let minus_mode = ModeSpec::minus(k);
    let sol = solve_cusp(CuspSide::RightCusp, &plus_mode, &params, 0)?;
    let geom = sol.geometry;
    let (a, b) = geom.domain();
    let intervals = params.grid.interior_points(b - a)? + 1;

    let mut plus = Vec::with_capacity(2);
    let mut minus = Vec::with_capacity(2);
    for n in [intervals, 2 * intervals] {
        let nodes = Grid::nodes(a, b, n - 1)?;
        plus.push(eigen_lowest(&assemble_hamiltonian(&geom, &plus_mode, &nodes)?, levels, params.tol)?);
        let cells = Grid::cells(a, b, n)?;
        let partner = assemble_with(&geom, &minus_mode, &cells, EndCondition::Dirichlet, EndCondition::Partner)?;
        minus.push(eigen_lowest(&partner, levels, params.tol)?);
    }
    let plus = richardson(&plus[0], &plus[1]);
    let minus = richardson(&minus[0], &minus[1]);
    let max_relative = plus
        .iter()
        .zip(&minus)
        .map(|(p, m)| (p - m).abs() / p.abs())
        .fold(0.0, f64::max);
    Ok(SusyReport { k, depth: geom.rho_min, plus, minus, max_relative })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dirac::geometry::{FlatCylinder, NeckGeometry};
    use crate::dirac::operator::GridSpec;
    use crate::dirac::spectrum::{SpectrumRow, SpectrumTable};

    fn table(mus: &[f64]) -> SpectrumTable {
        SpectrumTable {
            rows: mus
                .iter()
                .enumerate()
                .map(|(i, &mu)| SpectrumRow { t: 0.5, k: 0, j: i + 1, mu, lambda: mu.sqrt() })
                .collect(),
            vectors: vec![None; mus.len()],
        }
    }

    #[test]
    fn trace_identities() {
        let tb = table(&[1.5, 4.0, 9.0]);
        assert_eq!(trace_from_table(&tb, 0.5, -1.0, -1.0, 1e-10).unwrap().g, 0.0);
        let a = trace_from_table(&tb, 0.5, -1.0, -2.0, 1e-10).unwrap();
        let b = trace_from_table(&tb, 0.5, -2.0, -1.0, 1e-10).unwrap();
        assert_eq!(a.g, -b.g);
        assert_eq!(a.tail, -b.tail);
        assert!(a.g > 0.0);
        assert!(matches!(
            trace_from_table(&tb, 0.5, 4.0, -1.0, 1e-10),
            Err(LabError::SpectralCollision { .. })
        ));
    }

    #[test]
    fn flat_order_is_two() {
        let flat = FlatCylinder { length: std::f64::consts::PI, radius: 0.5 };
        let p = convergence_order(&flat, &ModeSpec::plus(0), 2, 0.05, 0.025, 1e-12).unwrap();
        assert!((p - 2.0).abs() < 0.1, "order {p}");
        assert!(convergence_order(&flat, &ModeSpec::plus(0), 1, 0.05, 0.05, 1e-12).is_err());
    }

    #[test]
    fn neck_order_is_two() {
        let geom = NeckGeometry::neck(0.3).unwrap();
        let p = convergence_order(&geom, &ModeSpec::plus(0), 1, 0.02, 0.01, 1e-12).unwrap();
        assert!((1.7..=2.3).contains(&p), "order {p}");
    }

    #[test]
    fn partner_spectra_pair_up() {
        let params = LabParams { grid: GridSpec::Points(1999), ..LabParams::default() };
        let r = susy_pairing(0, 4, &params).unwrap();
        assert!(r.max_relative < 1e-5, "{r:?}");
    }
}
