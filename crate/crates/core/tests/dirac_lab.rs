use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use cusp_surgery::dirac::{
    assemble_hamiltonian, eigen_lowest, spectral_sweep, trace_from_table, CuspSide, GridSpec, Grid,
    LabError, LabParams, ModeSpec, NeckGeometry, Warp,
};

fn small() -> LabParams {
    LabParams { k_max: 1, levels: 5, grid: GridSpec::Spacing(0.005), ..LabParams::default() }
}

#[test]
fn warps_have_curvature_minus_one() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let d = 1e-4;
    for _ in 0..100 {
        let t = rng.gen_range(0.01..1.0);
        let neck = NeckGeometry::neck(t).unwrap();
        let right = NeckGeometry::cusp(CuspSide::RightCusp, -6.0).unwrap();
        let left = NeckGeometry::cusp(CuspSide::LeftCusp, -6.0).unwrap();
        for g in [neck, right, left] {
            let (a, b) = g.domain();
            let rho = rng.gen_range(a + 2.0 * d..b - 2.0 * d);
            let phi = g.phi_at(rho);
            let dphi = (g.phi_at(rho + d) - g.phi_at(rho - d)) / (2.0 * d);
            let ddphi = (g.phi_prime_at(rho + d) - g.phi_prime_at(rho - d)) / (2.0 * d);
            assert!((dphi - g.phi_prime_at(rho)).abs() <= 1e-7 * phi.abs().max(1.0));
            assert!((-ddphi / phi + 1.0).abs() < 1e-7, "t = {t}, rho = {rho}");
        }
    }
}

#[test]
fn dirichlet_levels_drop_as_the_cusp_deepens() {
    // nested grids with a common spacing: the shallow matrix is a principal
    // block of the deeper one, so levels interlace downwards
    let wall = 2f64.ln();
    let h = 0.004;
    let mode = ModeSpec::plus(0);
    let mut previous: Option<Vec<f64>> = None;
    for steps in [1000usize, 1300, 1600] {
        let depth = wall - steps as f64 * h;
        let geom = NeckGeometry::cusp(CuspSide::RightCusp, depth).unwrap();
        let grid = Grid::nodes(depth, wall, steps - 1).unwrap();
        assert!((grid.h - h).abs() < 1e-12);
        let mu = eigen_lowest(&assemble_hamiltonian(&geom, &mode, &grid).unwrap(), 6, 1e-12).unwrap();
        if let Some(prev) = &previous {
            for (deep, shallow) in mu.iter().zip(prev) {
                assert!(deep <= &(shallow + 1e-10), "{mu:?} vs {prev:?}");
            }
        }
        previous = Some(mu);
    }
}

#[test]
fn sweep_is_independent_of_thread_count() {
    let ts = [0.4, 0.1, 0.0];
    let p = LabParams { vector_levels: 1, ..small() };
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| spectral_sweep(&ts, &p).unwrap())
    };
    let (one, many) = (run(1), run(4));
    assert_eq!(one.rows.len(), many.rows.len());
    for (a, b) in one.rows.iter().zip(&many.rows) {
        assert_eq!(a.mu.to_bits(), b.mu.to_bits());
        assert_eq!((a.t.to_bits(), a.k, a.j), (b.t.to_bits(), b.k, b.j));
    }
    for (a, b) in one.vectors.iter().zip(&many.vectors) {
        assert_eq!(a.as_ref().map(|v| &v.values), b.as_ref().map(|v| &v.values));
    }
}

#[test]
fn table_shape_and_positivity() {
    let p = small();
    let table = spectral_sweep(&[0.3, 0.0], &p).unwrap();
    assert_eq!(table.rows.len(), 2 * 2 * 5);
    assert_eq!(table.ts(), vec![0.0, 0.3]);
    assert!(table.rows.iter().all(|r| r.mu > 0.0 && (r.lambda * r.lambda - r.mu).abs() < 1e-12 * r.mu));
    for t in [0.0, 0.3] {
        let lambdas: Vec<f64> = table.at(t).map(|(_, r)| r.lambda).collect();
        assert!(lambdas.windows(2).all(|w| w[0] <= w[1]));
    }
}

#[test]
fn resolvent_trace_signs_and_collisions() {
    let p = small();
    let table = spectral_sweep(&[0.2], &p).unwrap();
    let same = trace_from_table(&table, 0.2, -1.0, -1.0, p.tol).unwrap();
    assert_eq!(same.g, 0.0);
    let up = trace_from_table(&table, 0.2, -1.0, -2.0, p.tol).unwrap();
    assert!(up.g > 0.0 && up.tail > 0.0);
    let down = trace_from_table(&table, 0.2, -2.0, -1.0, p.tol).unwrap();
    assert!((up.g + down.g).abs() < 1e-12 * up.g);
    let mu = table.rows[0].mu;
    assert!(matches!(
        trace_from_table(&table, 0.2, mu, -1.0, p.tol),
        Err(LabError::SpectralCollision { .. })
    ));
}

#[test]
fn bad_parameters_are_rejected() {
    assert!(matches!(spectral_sweep(&[-0.1], &small()), Err(LabError::NonPositiveT(_))));
    assert!(spectral_sweep(&[0.1, 0.1], &small()).is_err());
    assert!(spectral_sweep(&[0.1], &LabParams { levels: 0, ..small() }).is_err());
    assert!(NeckGeometry::neck(0.0).is_err());
    assert!(NeckGeometry::cusp(CuspSide::RightCusp, 1.0).is_err());
}
