//! Acceptance suite: one PASS/FAIL line per criterion, each checked at its
//! stated tolerance and time limit. Runs as a plain binary so the lines are
//! always printed.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::panic::{self, AssertUnwindSafe};
use std::path::Path;
use std::sync::Arc;
use std::time::{Duration, Instant};

use common::{
    cd_family, col_na, max_angle, norm, random_block, random_sparse, sine, sub, sylvester_krylov, to_na, NaMat,
};
use sbkrylov::random::{normal_block, rng};
use sbkrylov::shifted::{sbfom_coefficients, sbgmres_coefficients};
use sbkrylov::{
    arnoldi_extend, block_arnoldi, c64, fom_restarted, gmres_restarted, oblique_project_shift,
    orthogonal_residual_projection, rsbgmres, rsbgmres_cycle, sbfom, sbgmres, sfom_simoncini, sgmres_frommer,
    ArnoldiState, BaseShift, DecollinearizeStrategy, DenseBlock, Provenance, RecycleConfig, RecycleSpace,
    RecycleUpdate, ShiftedFamily, SolverConfig, SparseMatrix, C64,
};
use sbkrylov_harness::{run_experiment, run_smooth, run_variability, ExperimentConfig};

type Outcome = Result<String, String>;

fn check(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn zeros(n: usize) -> Vec<C64> {
    vec![C64::default(); n]
}

fn space_for(a: &SparseMatrix, k: usize, seed: u64) -> RecycleSpace {
    RecycleSpace::new(a, &normal_block(&mut rng(seed), a.n_rows(), k), Provenance::Initial).unwrap()
}

fn arnoldi_relations() -> Outcome {
    let mut worst_rel = 0.0f64;
    let mut worst_orth = 0.0f64;
    for t in 0..6u64 {
        let n = 60 + 28 * t as usize;
        let a = random_sparse(n, 5, 2.0, t % 2 == 0, 1000 + t);
        let scale = a.frobenius_norm();
        // single-vector Arnoldi
        let v = random_block(n, 1, 1100 + t);
        let (st, _) = ArnoldiState::new(v.col(0)).unwrap();
        let st = arnoldi_extend(&a, st, 10).unwrap();
        let j = st.steps();
        let rel = a
            .block_matvec(&st.basis().col_range(0..j))
            .unwrap()
            .sub(&st.basis().matmul(&st.hess()))
            .frobenius_norm();
        worst_rel = worst_rel.max(rel / scale);
        worst_orth = worst_orth.max(st.basis().orthonormality_error());
        // block Arnoldi, unprojected and projected
        for (l, m) in [(2usize, 10usize), (4, 8), (3, 5)] {
            let r0 = random_block(n, l, 1200 + t);
            let space = space_for(&a, 4, 1300 + t);
            for projector in [None, Some(&space)] {
                let start = match projector {
                    Some(s) => orthogonal_residual_projection(s, &r0).unwrap(),
                    None => r0.clone(),
                };
                let st = block_arnoldi(&a, &start, m, projector).unwrap();
                let cols = st.steps() * l;
                let mut aw = a.block_matvec(&st.basis().col_range(0..cols)).unwrap();
                if let Some(s) = projector {
                    aw = aw.sub(&s.c().matmul(&s.c().adjoint_mul(&aw)));
                }
                let rel = aw.sub(&st.basis().matmul(&st.hess())).frobenius_norm();
                worst_rel = worst_rel.max(rel / scale);
                worst_orth = worst_orth.max(st.basis().orthonormality_error());
            }
        }
    }
    check(worst_rel <= 1e-9, format!("relation residual {worst_rel:.2e} > 1e-9·‖A‖_F"))?;
    check(worst_orth <= 1e-10, format!("orthonormality {worst_orth:.2e} > 1e-10"))?;
    Ok(format!("relation {worst_rel:.1e}·‖A‖_F, orthonormality {worst_orth:.1e}"))
}

fn shift_invariance() -> Outcome {
    let mut worst = 0.0f64;
    for t in 0..5u64 {
        let n = 40 + 10 * t as usize;
        let a = random_sparse(n, 4, 2.0, t % 2 == 0, 100 + t);
        let l = 1 + t as usize % 3;
        let r0 = random_block(n, l, 200 + t);
        let sigma = C64::new(0.3 + t as f64, 0.2 * t as f64);
        let j = 3;
        let w = block_arnoldi(&a, &r0, j - 1, None).unwrap();
        let ws = block_arnoldi(&a.shifted(sigma).unwrap(), &r0, j - 1, None).unwrap();
        let x = to_na(&w.basis().col_range(0..j * l));
        let y = to_na(&ws.basis().col_range(0..j * l));
        let dense = to_na(&a.to_dense());
        let oracle = sylvester_krylov(&dense, &NaMat::from_diagonal_element(l, l, sigma), &to_na(&r0), None, j);
        worst = worst.max(max_angle(&x, &y)).max(max_angle(&x, &oracle));
    }
    let mut worst_proj = 0.0f64;
    for t in 0..3u64 {
        let n = 50;
        let l = 2 + t as usize % 2;
        let a = random_sparse(n, 4, 2.0, true, 300 + t);
        let space = space_for(&a, 4, 400 + t);
        let c = to_na(space.c());
        let r = to_na(&random_block(n, l, 500 + t));
        let f = &r - &c * (c.adjoint() * &r);
        let j = 3;
        let st = block_arnoldi(&a, &common::from_na(&f), j - 1, Some(&space)).unwrap();
        let w = to_na(&st.basis().col_range(0..j * l));
        let d_general = to_na(&random_block(l, l, 600 + t));
        let oracle = sylvester_krylov(&to_na(&a.to_dense()), &d_general, &f, Some(&c), j);
        worst_proj = worst_proj.max(max_angle(&w, &oracle));
    }
    check(worst <= 1e-8, format!("shift-invariance angle {worst:.2e}"))?;
    check(worst_proj <= 1e-8, format!("projected Sylvester angle {worst_proj:.2e}"))?;
    Ok(format!("max angle {worst:.1e}, projected {worst_proj:.1e}"))
}

fn kronecker_system(hbar: &DenseBlock, shifts: &[C64], rhs: &DenseBlock, square: bool) -> (NaMat, NaMat) {
    let l = shifts.len();
    let cols = hbar.n_cols();
    let rows = if square { cols } else { hbar.n_rows() };
    let h = to_na(&hbar.sub_block(0..rows, 0..cols));
    let mut big = NaMat::zeros(rows * l, cols * l);
    let mut g = NaMat::zeros(rows * l, 1);
    for i in 0..l {
        let mut hi = h.clone();
        for d in 0..cols {
            hi[(d, d)] += shifts[i];
        }
        big.view_mut((i * rows, i * cols), (rows, cols)).copy_from(&hi);
        for r in 0..rows {
            g[(i * rows + r, 0)] = rhs[(r, i)];
        }
    }
    (big, g)
}

fn kronecker_oracle() -> Outcome {
    let mut worst = 0.0f64;
    for (m, l) in [(3usize, 2usize), (4, 3)] {
        let a = random_sparse(40, 4, 2.0, true, (m * 10 + l) as u64);
        let r0 = random_block(40, l, 77 + m as u64);
        let shifts: Vec<C64> = (0..l).map(|i| C64::new(0.5 * i as f64, 0.1 * i as f64)).collect();
        let arn = block_arnoldi(&a, &r0, m, None).unwrap();
        let hbar = arn.hess();
        let mut e1s0 = DenseBlock::zeros(hbar.n_rows(), l);
        e1s0.set_block(0, 0, arn.s0());
        let (big, g) = kronecker_system(&hbar, &shifts, &e1s0, false);
        let want = big.svd(true, true).solve(&g, 1e-14).unwrap();
        let got = sbgmres_coefficients(&arn, &shifts).unwrap().concat();
        worst = worst.max((col_na(&got) - &want).norm() / want.norm());
        let (big, g) = kronecker_system(&hbar, &shifts, &e1s0, true);
        let want = big.lu().solve(&g).unwrap();
        let got = sbfom_coefficients(&arn, &shifts).unwrap().concat();
        worst = worst.max((col_na(&got) - &want).norm() / want.norm());
    }
    check(worst <= 1e-10, format!("relative error {worst:.2e}"))?;
    Ok(format!("max relative error {worst:.1e}"))
}

fn dominance() -> Outcome {
    let mut compared = 0;
    for (grid, conv, seed) in [(10, 0.0, 1u64), (12, 20.0, 2), (14, 5.0, 3)] {
        let shifts = [0.0, 0.5, 3.0];
        let fam = cd_family(grid, conv, &shifts, seed);
        let cfg = SolverConfig::new(grid * grid, 1e-10, 1);
        let (_, rep) = sbgmres(&fam, &cfg, &DecollinearizeStrategy::default()).unwrap();
        for (i, &s) in shifts.iter().enumerate() {
            let a = fam.matrix().shifted(c64(s)).unwrap();
            let (_, g) = gmres_restarted(&a, fam.rhs().col(i), &zeros(fam.n()), &cfg).unwrap();
            let block = rep.residual_history(i);
            let single = g.residual_history(0);
            let until = rep.iterations_to_converge(i).unwrap_or(block.len()).min(single.len());
            for j in 0..until {
                check(
                    block[j] <= single[j] * (1.0 + 1e-8) + 1e-14,
                    format!("grid {grid} σ={s} iteration {}: {:.3e} > {:.3e}", j + 1, block[j], single[j]),
                )?;
                compared += 1;
            }
        }
    }
    Ok(format!("{compared} iteration pairs on 3 families"))
}

fn rsbgmres_optimality() -> Outcome {
    let mut worst = 0.0f64;
    for (k, seed) in [(4usize, 20u64), (8, 21)] {
        let fam = cd_family(8, 5.0, &[0.0, 0.5, 2.0], seed);
        let a = fam.matrix();
        let space = space_for(a, k, seed + 100);
        let cyc = rsbgmres_cycle(&fam, &SolverConfig::new(6, 1e-14, 1), &space).unwrap();
        let z = DenseBlock::hstack(&[space.u(), &cyc.krylov_basis]).unwrap();
        for (i, &sigma) in fam.shifts().iter().enumerate() {
            let az = to_na(&a.shifted(sigma).unwrap().block_matvec(&z).unwrap());
            let r_hat = col_na(cyc.r_hat.col(i));
            let c = az.clone().svd(true, true).solve(&r_hat, 1e-13).unwrap();
            let best = (&r_hat - &az * &c).norm();
            let got = norm(&fam.residual(i, cyc.x.col(i)));
            worst = worst.max((got - best).abs() / norm(fam.rhs().col(i)));
        }
    }
    check(worst <= 1e-8, format!("relative gap {worst:.2e}"))?;
    Ok(format!("max relative gap to dense least squares {worst:.1e}"))
}

fn oblique_projector() -> Outcome {
    let mut worst_idem = 0.0f64;
    let mut worst_range = 0.0f64;
    let mut worst_zero = 0.0f64;
    let mut worst_cons = 0.0f64;
    for t in 0..4u64 {
        let a = random_sparse(40, 4, 3.0, true, 700 + t);
        let space = space_for(&a, 2 + t as usize, 710 + t);
        let r = random_block(40, 1, 720 + t);
        let x = random_block(40, 1, 730 + t);
        let sigma = C64::new(0.5 * t as f64, -0.3);
        let (r1, x1) = oblique_project_shift(&space, sigma, r.col(0), x.col(0)).unwrap();
        let (r2, _) = oblique_project_shift(&space, sigma, &r1, &x1).unwrap();
        worst_idem = worst_idem.max(norm(&sub(&r2, &r1)));
        worst_range = worst_range.max(norm(&space.c().adjoint_mul_vec(&r1)));
        // the removed part lies in span(C + σU)
        let w = to_na(&space.c().add(&space.u().scaled(sigma)));
        let removed = col_na(&sub(r.col(0), &r1));
        let coef = w.clone().svd(true, true).solve(&removed, 1e-14).unwrap();
        worst_range = worst_range.max((&removed - &w * coef).norm());
        let (r0, _) = oblique_project_shift(&space, c64(0.0), r.col(0), x.col(0)).unwrap();
        let orth = orthogonal_residual_projection(&space, &r).unwrap();
        worst_zero = worst_zero.max(norm(&sub(&r0, orth.col(0))));
        let b = random_block(40, 1, 740 + t);
        let op = a.shifted(sigma).unwrap();
        let res = sub(b.col(0), &op.matvec(x.col(0)).unwrap());
        let (r_hat, x_hat) = oblique_project_shift(&space, sigma, &res, x.col(0)).unwrap();
        let direct = sub(b.col(0), &op.matvec(&x_hat).unwrap());
        worst_cons = worst_cons.max(norm(&sub(&direct, &r_hat)) / norm(b.col(0)));
    }
    check(worst_idem <= 1e-12, format!("idempotence {worst_idem:.2e}"))?;
    check(worst_range <= 1e-12, format!("range/kernel {worst_range:.2e}"))?;
    check(worst_zero <= 1e-12, format!("σ=0 degeneration {worst_zero:.2e}"))?;
    check(worst_cons <= 1e-8, format!("x̂/r̂ consistency {worst_cons:.2e}"))?;
    Ok(format!(
        "idempotence {worst_idem:.1e}, range {worst_range:.1e}, σ=0 {worst_zero:.1e}, consistency {worst_cons:.1e}"
    ))
}

fn degenerate_equivalence() -> Outcome {
    let fam = cd_family(10, 8.0, &[0.0, 0.1, 1.0], 30);
    let cfg = SolverConfig::new(15, 1e-8, 100).with_seed(3);
    let (xs, rs) = sbgmres(&fam, &cfg, &DecollinearizeStrategy::default()).unwrap();
    let rcfg = RecycleConfig::new(0, RecycleUpdate::RitzLargest);
    let (xr, rr, _) = rsbgmres(&fam, &cfg, &RecycleSpace::empty(fam.n()), &rcfg).unwrap();
    check(xs == xr, "k=0 rsbgmres solution differs from sbgmres")?;
    check(
        rs.history == rr.history
            && rs.matvec_count == rr.matvec_count
            && rs.block_matvec_count == rr.block_matvec_count
            && rs.replacements == rr.replacements,
        "k=0 rsbgmres report differs from sbgmres",
    )?;

    // L = 1 at σ = 0: identical reports; σ ≠ 0: same iterates to rounding
    let mut worst = 0.0f64;
    for (sigma, seed) in [(0.0, 31u64), (0.7, 32)] {
        let fam = cd_family(10, 5.0, &[sigma], seed);
        let a = fam.matrix().shifted(c64(sigma)).unwrap();
        let b = fam.rhs().col(0);
        let (xb, rb) = sbgmres(&fam, &cfg, &DecollinearizeStrategy::default()).unwrap();
        let (xg, rg) = gmres_restarted(&a, b, &zeros(fam.n()), &cfg).unwrap();
        let (xf, rf_) = sbfom(&fam, &cfg, &DecollinearizeStrategy::default()).unwrap();
        let (xo, ro) = fom_restarted(&a, b, &zeros(fam.n()), &cfg).unwrap();
        if sigma == 0.0 {
            check(xb.col(0) == &xg[..], "L=1 sbgmres solution differs from gmres")?;
            check(rb.residual_history(0) == rg.residual_history(0), "L=1 sbgmres history differs")?;
            check(rb.matvec_count == rg.matvec_count, "L=1 sbgmres matvec count differs")?;
        }
        check(rb.iterations == rg.iterations, format!("σ={sigma}: sbgmres/gmres iterations differ"))?;
        check(rf_.iterations == ro.iterations, format!("σ={sigma}: sbfom/fom iterations differ"))?;
        worst = worst.max(norm(&sub(xb.col(0), &xg)) / norm(&xg));
        worst = worst.max(norm(&sub(xf.col(0), &xo)) / norm(&xo));
    }
    check(worst <= 1e-10, format!("L=1 solution gap {worst:.2e}"))?;
    Ok(format!("k=0 reports identical; L=1 gap {worst:.1e}"))
}

fn collinear_family(a: Arc<SparseMatrix>, shifts: &[f64], seed: u64) -> ShiftedFamily {
    let n = a.n_rows();
    let b = random_block(n, 1, seed);
    let rhs = DenseBlock::from_columns(n, &vec![b.col(0).to_vec(); shifts.len()]).unwrap();
    ShiftedFamily::new(a, shifts.iter().map(|&s| c64(s)).collect(), rhs).unwrap()
}

fn baseline_collinearity() -> Outcome {
    let a = Arc::new(sbkrylov::generate_convection_diffusion(12, 10.0).unwrap());
    let fam = collinear_family(a.clone(), &[1e-4, 1e-2, 0.5, 2.0], 7);
    let m = 5;
    let mut worst_fom = 0.0f64;
    let mut worst_gmres = 0.0f64;
    for cycles in 1..=6 {
        let cfg = SolverConfig::new(m, 1e-14, cycles);
        // sFOM: every shifted residual is parallel to the base residual, which
        // after the first cycle is parallel to v_{m+1}
        let (x, _) = sfom_simoncini(&fam, &cfg).unwrap();
        let r = fam.residuals(&x);
        if cycles == 1 {
            let (st, _) = ArnoldiState::new(fam.rhs().col(0)).unwrap();
            let st = arnoldi_extend(&a, st, m).unwrap();
            for i in 0..fam.len() {
                worst_fom = worst_fom.max(sine(r.col(i), st.basis().col(m)));
            }
        }
        for i in 1..fam.len() {
            if norm(r.col(0)) > 1e-6 && norm(r.col(i)) > 1e-6 {
                worst_fom = worst_fom.max(sine(r.col(0), r.col(i)));
            }
        }
        let (x, _) = sgmres_frommer(&fam, &cfg, BaseShift::SmallestModulus).unwrap();
        let r = fam.residuals(&x);
        for i in 1..fam.len() {
            // the true residual carries an absolute rounding floor near 1e-15
            if norm(r.col(0)) > 1e-6 && norm(r.col(i)) > 1e-6 {
                worst_gmres = worst_gmres.max(sine(r.col(0), r.col(i)));
            }
        }
    }
    check(worst_fom <= 1e-8, format!("sFOM sine {worst_fom:.2e}"))?;
    check(worst_gmres <= 1e-8, format!("sGMRES sine {worst_gmres:.2e}"))?;
    let cfg = SolverConfig::new(20, 1e-8, 500);
    let (_, rf) = sfom_simoncini(&fam, &cfg).unwrap();
    let (_, rg) = sgmres_frommer(&fam, &cfg, BaseShift::SmallestModulus).unwrap();
    check(rf.all_converged() && rg.all_converged(), "a baseline did not converge")?;
    Ok(format!(
        "sFOM sine {worst_fom:.1e}, sGMRES sine {worst_gmres:.1e}; converged in {} / {} matvecs",
        rf.matvec_count, rg.matvec_count
    ))
}

fn table_ordering(dir: &Path) -> Outcome {
    let mut recycled_wins = 0;
    let mut lines = Vec::new();
    for (f, conv) in [0.0, 10.0, 20.0].into_iter().enumerate() {
        let out = dir.join(format!("family{f}"));
        let text = format!(
            r#"
seed = {seed}
output_dir = "{out}"

[problem]
kind = "convection-diffusion"
grid = 32
convection = {conv:.1}

[shifts]
values = [1e-4, 2e-4, 1e-2, 2e-2]
scale_to_spectrum = true

[rhs]
mode = "unrelated-random"

[recycle]
k = 10

[[methods]]
name = "sbgmres"
cycle_length = 20

[[methods]]
name = "gmres"
cycle_length = 20

[[methods]]
name = "rsbgmres"
label = "rsbgmres-ritz"
cycle_length = 20
recycle_mode = "ritz-largest"

[[methods]]
name = "rsbgmres"
label = "rsbgmres-harmonic"
cycle_length = 20
recycle_mode = "harmonic-ritz-smallest"

[[methods]]
name = "rsbgmres"
label = "rsbgmres-ritz-smallest"
cycle_length = 20
recycle_mode = "ritz-smallest"

[[methods]]
name = "rsbgmres"
label = "rsbgmres-half-m"
cycle_length = 10
recycle_k = 10
recycle_mode = "ritz-largest"
"#,
            seed = 5 + f,
            out = out.display(),
        );
        let cfg = ExperimentConfig::from_toml(&text).map_err(|e| e.to_string())?;
        let res = run_experiment(&cfg).map_err(|e| e.to_string())?;
        check(res.success(), format!("family {f}: a method did not converge"))?;
        let apps = |label: &str| res.summary_for(label).map(|s| s.applications).unwrap_or(usize::MAX);
        let (sb, gm, ritz) = (apps("sbgmres"), apps("gmres"), apps("rsbgmres-ritz"));
        check(sb < gm, format!("family {f}: sbgmres {sb} !< gmres {gm}"))?;
        if ritz <= sb {
            recycled_wins += 1;
        }
        lines.push(format!(
            "c={conv}: sb {sb}, gmres {gm}, ritz {ritz}, harmonic {}, ritz-smallest {}, half-m {}",
            apps("rsbgmres-harmonic"),
            apps("rsbgmres-ritz-smallest"),
            apps("rsbgmres-half-m")
        ));
    }
    check(recycled_wins >= 2, format!("rsbgmres(ritz) ≤ sbgmres on only {recycled_wins}/3: {}", lines.join("; ")))?;
    Ok(format!("ritz ≤ sb on {recycled_wins}/3; {}", lines.join("; ")))
}

fn smooth_protocol(dir: &Path) -> Outcome {
    let text = format!(
        r#"
seed = 3
output_dir = "{}"

[problem]
kind = "convection-diffusion"
grid = 20

[shifts]
interval = [1.0, 2.0]
count = 100

[rhs]
mode = "smooth-parameter"

[smooth]
n_seed = 10
rank_threshold = 1e-10

[[methods]]
name = "sbgmres"
cycle_length = 30
"#,
        dir.join("smooth").display()
    );
    let cfg = ExperimentConfig::from_toml(&text).map_err(|e| e.to_string())?;
    let res = run_smooth(&cfg).map_err(|e| e.to_string())?;
    let recycled = res.systems.iter().filter(|s| s.role == "recycled").count();
    check(recycled == 90, format!("{recycled} recycled systems, expected 90"))?;
    check(res.systems.iter().all(|s| s.converged), "a recycled system did not converge")?;
    let ratio = res.mean_recycled / res.mean_baseline;
    check(ratio < 0.25, format!("mean iterations ratio {ratio:.3} ≥ 0.25"))?;
    let sv = to_na(&res.reference_solutions).singular_values();
    let top = sv.iter().copied().fold(0.0, f64::max);
    let oracle = sv.iter().filter(|&&s| s > res.rank_threshold * top).count();
    check(oracle == res.dimension, format!("dimension {} vs oracle {oracle}", res.dimension))?;
    Ok(format!(
        "mean iterations {:.2} vs {:.2} (ratio {ratio:.3}); dimension {} (oracle {oracle})",
        res.mean_recycled, res.mean_baseline, res.dimension
    ))
}

fn csv_files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in std::fs::read_dir(&d).unwrap() {
            let p = entry.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else if p.extension().is_some_and(|e| e == "csv") {
                let rel = p.strip_prefix(dir).unwrap().display().to_string();
                out.push((rel, std::fs::read(&p).unwrap()));
            }
        }
    }
    out.sort();
    out
}

fn determinism(dir: &Path) -> Outcome {
    let run_once = |out: &Path| -> Result<(), String> {
        let text = format!(
            r#"
seed = 21
output_dir = "{}"

[problem]
kind = "convection-diffusion"
grid = 14
convection = 8.0

[shifts]
values = [0.0, 0.5, 2.0]

[rhs]
mode = "shared-random"

[[methods]]
name = "sbgmres"
cycle_length = 15
strategy = "random-x0"

[[methods]]
name = "sbfom"
cycle_length = 15
strategy = "fom-random-block"

[[methods]]
name = "rsbgmres"
cycle_length = 15

[[methods]]
name = "gmres"
cycle_length = 15

[[methods]]
name = "rgmres"
cycle_length = 15

[[methods]]
name = "sgmres"
cycle_length = 15

[[methods]]
name = "sfom"
cycle_length = 15
"#,
            out.display()
        );
        let mut cfg = ExperimentConfig::from_toml(&text).map_err(|e| e.to_string())?;
        run_experiment(&cfg).map_err(|e| e.to_string())?;
        cfg.methods.retain(|m| m.label() == "sbfom");
        cfg.output_dir = out.join("variability");
        run_variability(&cfg, 5).map_err(|e| e.to_string())?;
        Ok(())
    };
    let (a, b) = (dir.join("first"), dir.join("second"));
    run_once(&a)?;
    run_once(&b)?;
    let (fa, fb) = (csv_files(&a), csv_files(&b));
    check(!fa.is_empty(), "no CSV artifacts written")?;
    check(
        fa.iter().map(|f| &f.0).eq(fb.iter().map(|f| &f.0)),
        "the two runs wrote different file sets",
    )?;
    for ((name, x), (_, y)) in fa.iter().zip(&fb) {
        check(x == y, format!("{name} differs between runs"))?;
    }
    Ok(format!("{} CSV files byte-identical", fa.len()))
}

fn main() {
    let tmp = tempfile::tempdir().expect("temporary directory");
    let dir = tmp.path();
    let criteria: Vec<(&str, u64, Box<dyn Fn() -> Outcome + '_>)> = vec![
        ("Arnoldi relations", 5, Box::new(arnoldi_relations)),
        ("shift invariance", 5, Box::new(shift_invariance)),
        ("Kronecker decoupling oracle", 1, Box::new(kronecker_oracle)),
        ("dominance over GMRES", 30, Box::new(dominance)),
        ("rsbGMRES optimality", 30, Box::new(rsbgmres_optimality)),
        ("oblique projector", 5, Box::new(oblique_projector)),
        ("degenerate equivalence", 10, Box::new(degenerate_equivalence)),
        ("baseline collinearity", 30, Box::new(baseline_collinearity)),
        ("matvec ordering, unrelated RHS", 120, Box::new(|| table_ordering(dir))),
        ("smooth-parameter recycling", 120, Box::new(|| smooth_protocol(dir))),
        ("determinism", 60, Box::new(|| determinism(dir))),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, limit, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(_) if elapsed > Duration::from_secs(*limit) => Err(format!("took {elapsed:.1?}, limit {limit} s")),
            other => other,
        };
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail} [{elapsed:.2?}]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {detail} [{elapsed:.2?}]", i + 1);
            }
        }
    }
    let _ = panic::take_hook();
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
