use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use sbkrylov::random::{rng, unit_columns};
use sbkrylov::{
    block_arnoldi, gmres_restarted, rsbgmres, sbgmres, DecollinearizeStrategy, RecycleConfig, RecycleSpace,
    RecycleUpdate, SolverConfig, C64,
};
use sbkrylov_bench::{family, SHIFTS};

/// One block product against `L` single products: the ratio behind the
/// block cost multiplier.
fn products(c: &mut Criterion) {
    let fam = family(64, 10.0, &SHIFTS, 1);
    let a = fam.matrix();
    let mut group = c.benchmark_group("products");
    for l in [1usize, 2, 4, 8] {
        let x = unit_columns(&mut rng(2), a.n_rows(), l);
        group.bench_with_input(BenchmarkId::new("block", l), &x, |b, x| b.iter(|| a.block_matvec(x).unwrap()));
        group.bench_with_input(BenchmarkId::new("single", l), &x, |b, x| {
            b.iter(|| {
                for j in 0..l {
                    a.matvec(x.col(j)).unwrap();
                }
            })
        });
    }
    group.finish();
}

fn arnoldi(c: &mut Criterion) {
    let fam = family(32, 10.0, &SHIFTS, 3);
    c.bench_function("block_arnoldi L=4 m=20", |b| {
        b.iter(|| block_arnoldi(fam.matrix(), fam.rhs(), 20, None).unwrap())
    });
}

fn solvers(c: &mut Criterion) {
    let fam = family(24, 10.0, &SHIFTS, 4);
    let cfg = SolverConfig::new(20, 1e-8, 200);
    let mut group = c.benchmark_group("solve");
    group.sample_size(10);
    group.bench_function("sbgmres", |b| {
        b.iter(|| sbgmres(&fam, &cfg, &DecollinearizeStrategy::default()).unwrap())
    });
    group.bench_function("gmres sequential", |b| {
        let x0 = vec![C64::default(); fam.n()];
        b.iter(|| {
            for (i, &s) in fam.shifts().iter().enumerate() {
                let a = fam.matrix().shifted(s).unwrap();
                gmres_restarted(&a, fam.rhs().col(i), &x0, &cfg).unwrap();
            }
        })
    });
    group.bench_function("rsbgmres k=10", |b| {
        let rcfg = RecycleConfig::new(10, RecycleUpdate::RitzLargest);
        b.iter(|| rsbgmres(&fam, &cfg, &RecycleSpace::empty(fam.n()), &rcfg).unwrap())
    });
    group.finish();
}

criterion_group!(benches, products, arnoldi, solvers);
criterion_main!(benches);
