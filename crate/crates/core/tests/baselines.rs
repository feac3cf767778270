mod common;

use common::{cd_family, diag_matrix, norm, random_block, random_sparse, sine, true_residual};
use sbkrylov::{
    arnoldi_extend, c64, fom_restarted, gmres_restarted, sfom_simoncini, sgmres_frommer, ArnoldiState, BaseShift,
    DenseBlock, ShiftedFamily, SolverConfig, SparseMatrix, C64,
};

fn zeros(n: usize) -> Vec<C64> {
    vec![C64::default(); n]
}

fn collinear_family(a: std::sync::Arc<SparseMatrix>, shifts: &[f64], seed: u64) -> ShiftedFamily {
    let n = a.n_rows();
    let b = random_block(n, 1, seed);
    let rhs = DenseBlock::from_columns(n, &vec![b.col(0).to_vec(); shifts.len()]).unwrap();
    ShiftedFamily::new(a, shifts.iter().map(|&s| c64(s)).collect(), rhs).unwrap()
}

#[test]
fn identity_converges_in_one_iteration() {
    let b = random_block(5, 1, 1);
    let cfg = SolverConfig::new(5, 1e-10, 3);
    for (x, rep) in [
        gmres_restarted(&SparseMatrix::identity(5), b.col(0), &zeros(5), &cfg).unwrap(),
        fom_restarted(&SparseMatrix::identity(5), b.col(0), &zeros(5), &cfg).unwrap(),
    ] {
        assert_eq!(rep.iterations, 1);
        assert!(norm(&common::sub(&x, b.col(0))) < 1e-14);
    }
}

#[test]
fn grade_five_gives_exact_convergence_at_step_five() {
    let a = diag_matrix(&[1.0, 2.0, 3.0, 4.0, 5.0]);
    let b = vec![c64(1.0); 5];
    let cfg = SolverConfig::new(5, 1e-12, 2);
    let exact = common::dense_solve(&a, c64(0.0), &b);
    for (x, rep) in [
        gmres_restarted(&a, &b, &zeros(5), &cfg).unwrap(),
        fom_restarted(&a, &b, &zeros(5), &cfg).unwrap(),
    ] {
        assert!(rep.all_converged());
        assert_eq!(rep.iterations, 5, "{}", rep.method);
        assert!(norm(&common::sub(&x, &exact)) < 1e-12);
    }
}

#[test]
fn gmres_estimate_matches_true_residual() {
    let fam = cd_family(10, 10.0, &[0.0], 2);
    let cfg = SolverConfig::new(20, 1e-8, 100);
    let b = fam.rhs().col(0);
    let (x, rep) = gmres_restarted(fam.matrix(), b, &zeros(fam.n()), &cfg).unwrap();
    assert!(rep.all_converged());
    let t = true_residual(fam.matrix(), c64(0.0), b, &x);
    assert!(t <= 1e-8 * norm(b));
    let est = *rep.residual_history(0).last().unwrap();
    assert!((t - est).abs() <= 1e-6 * t, "{t} vs {est}");
    // minimum residual: non-increasing within each cycle
    let hist = &rep.history;
    for w in hist.windows(2) {
        if w[0].cycle == w[1].cycle {
            assert!(w[1].resid_norm <= w[0].resid_norm * (1.0 + 1e-12));
        }
    }
}

#[test]
fn fom_cycle_residual_is_parallel_to_next_basis_vector() {
    let a = random_sparse(20, 4, 6.0, true, 3);
    let b = random_block(20, 1, 4);
    let cfg = SolverConfig::new(6, 1e-14, 1);
    let (x, _) = fom_restarted(&a, b.col(0), &zeros(20), &cfg).unwrap();
    let r: Vec<C64> = {
        let ax = a.matvec(&x).unwrap();
        b.col(0).iter().zip(&ax).map(|(p, q)| p - q).collect()
    };
    let (st, _) = ArnoldiState::new(b.col(0)).unwrap();
    let st = arnoldi_extend(&a, st, 6).unwrap();
    let v7 = st.basis().col(6);
    assert!(sine(&r, v7) <= 1e-8, "{}", sine(&r, v7));
}

#[test]
fn single_shift_baselines_match_single_solvers() {
    let fam = cd_family(8, 5.0, &[0.7], 5);
    let cfg = SolverConfig::new(10, 1e-9, 50);
    let a = fam.matrix().shifted(c64(0.7)).unwrap();
    let b = fam.rhs().col(0);
    let (xs, rs) = sgmres_frommer(&fam, &cfg, BaseShift::SmallestModulus).unwrap();
    let (xg, rg) = gmres_restarted(&a, b, &zeros(fam.n()), &cfg).unwrap();
    assert!(norm(&common::sub(xs.col(0), &xg)) <= 1e-10 * norm(&xg));
    assert_eq!(rs.matvec_count, rg.matvec_count);
    let (xs, rs) = sfom_simoncini(&fam, &cfg).unwrap();
    let (xf, rf) = fom_restarted(&a, b, &zeros(fam.n()), &cfg).unwrap();
    assert!(norm(&common::sub(xs.col(0), &xf)) <= 1e-10 * norm(&xf));
    assert_eq!(rs.matvec_count, rf.matvec_count);
}

/// Residuals after each restart, from runs truncated at that cycle.
fn residuals_after(fam: &ShiftedFamily, cycles: usize, m: usize, fom: bool) -> DenseBlock {
    let cfg = SolverConfig::new(m, 1e-14, cycles);
    let (x, _) = if fom {
        sfom_simoncini(fam, &cfg).unwrap()
    } else {
        sgmres_frommer(fam, &cfg, BaseShift::SmallestModulus).unwrap()
    };
    fam.residuals(&x)
}

#[test]
fn sgmres_keeps_residuals_collinear_at_restarts() {
    let fam = collinear_family(diag_matrix(&[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]), &[0.0, 1.0], 6);
    for cycles in 1..=2 {
        let r = residuals_after(&fam, cycles, 2, false);
        if norm(r.col(0)) > 1e-13 && norm(r.col(1)) > 1e-13 {
            assert!(sine(r.col(0), r.col(1)) <= 1e-8, "cycle {cycles}");
        }
    }
    let (x, rep) = sgmres_frommer(&fam, &SolverConfig::new(6, 1e-10, 10), BaseShift::SmallestModulus).unwrap();
    assert!(rep.all_converged());
    for i in 0..2 {
        let r = true_residual(fam.matrix(), fam.shifts()[i], fam.rhs().col(i), x.col(i));
        assert!(r <= 1e-10 * norm(fam.rhs().col(i)) * 1.01);
    }

    let fam = cd_family(12, 10.0, &[0.0], 7);
    let fam = collinear_family(fam.matrix_arc().clone(), &[1e-4, 1e-2, 0.5], 7);
    let cfg = SolverConfig::new(20, 1e-8, 200);
    let mut checked = 0;
    for (m, cycles) in [(20, 1), (20, 2), (5, 1), (5, 3), (5, 5), (5, 7)] {
        let r = residuals_after(&fam, cycles, m, false);
        for i in 1..3 {
            // the true residual carries an absolute rounding floor near 1e-15
            if norm(r.col(0)) > 1e-6 && norm(r.col(i)) > 1e-6 {
                assert!(sine(r.col(0), r.col(i)) <= 1e-8, "m {m} cycle {cycles} shift {i}");
                checked += 1;
            }
        }
    }
    assert!(checked >= 8);
    let (_, rep) = sgmres_frommer(&fam, &cfg, BaseShift::SmallestModulus).unwrap();
    assert!(rep.all_converged());
}

#[test]
fn sfom_residuals_are_parallel_to_the_next_basis_vector() {
    let a = diag_matrix(&[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
    let fam = collinear_family(a.clone(), &[0.0, 1.0], 8);
    let m = 3;
    let r = residuals_after(&fam, 1, m, true);
    let (st, _) = ArnoldiState::new(fam.rhs().col(0)).unwrap();
    let st = arnoldi_extend(&a, st, m).unwrap();
    let v = st.basis().col(m);
    for i in 0..2 {
        assert!(sine(r.col(i), v) <= 1e-8, "shift {i}");
    }
    // later cycle ends: still parallel to each other
    let r = residuals_after(&fam, 2, m, true);
    assert!(sine(r.col(0), r.col(1)) <= 1e-8);
}

#[test]
fn sfom_converges_with_one_shared_basis() {
    let fam = cd_family(12, 0.0, &[0.0], 9);
    let fam = collinear_family(fam.matrix_arc().clone(), &[1e-4, 1e-2, 1.0, 10.0], 9);
    let (x, rep) = sfom_simoncini(&fam, &SolverConfig::new(20, 1e-8, 200)).unwrap();
    assert!(rep.all_converged());
    assert_eq!(rep.block_matvec_count, 0);
    // one product per iteration serves every shift
    assert_eq!(rep.matvec_count, rep.iterations);
    for i in 0..4 {
        let r = true_residual(fam.matrix(), fam.shifts()[i], fam.rhs().col(i), x.col(i));
        assert!(r <= 1e-8 * norm(fam.rhs().col(i)) * 1.01, "shift {i}: {r}");
    }
}

#[test]
fn collinear_baselines_reject_unrelated_residuals() {
    let fam = cd_family(6, 0.0, &[0.0, 1.0], 10);
    let cfg = SolverConfig::new(5, 1e-8, 10);
    assert!(matches!(
        sgmres_frommer(&fam, &cfg, BaseShift::SmallestModulus),
        Err(sbkrylov::Error::NotCollinear { .. })
    ));
    assert!(matches!(sfom_simoncini(&fam, &cfg), Err(sbkrylov::Error::NotCollinear { .. })));
}
