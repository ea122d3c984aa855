use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use dirac_split::lattice::{pi_squared, ComplexField, Coupling, Grid};
use dirac_split::linalg::banded::BandLdl;
use dirac_split::parallel::{map_range, Exec};
use dirac_split::potential::PotentialSpec;
use num_complex::Complex64 as C64;

const POLICIES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn landau_block(n: usize) -> (Grid, dirac_split::lattice::DiffOp) {
    let g = Grid::transverse(-12.0, 12.0, n).unwrap();
    let p = PotentialSpec::builtin("uniform_H_symmetric", &[1.0, 1.0]).unwrap();
    let op = pi_squared(1, &p, &g, Coupling::Peierls)
        .unwrap()
        .plus(&pi_squared(2, &p, &g, Coupling::Peierls).unwrap())
        .unwrap();
    (g, op)
}

fn gaussian(g: &Grid) -> ComplexField {
    ComplexField::sample(g, |x| C64::from_polar((-(x[1] * x[1] + x[2] * x[2]) / 4.0).exp(), 0.3 * x[1]))
}

fn stencil(c: &mut Criterion) {
    let (g, op) = landau_block(128);
    let f = gaussian(&g);
    let mut group = c.benchmark_group("stencil_apply_128");
    for (name, exec) in POLICIES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| b.iter(|| op.apply_with(exec, black_box(&f)).unwrap()));
    }
    group.finish();
}

fn matvec(c: &mut Criterion) {
    let (g, op) = landau_block(256);
    let m = op.matrix();
    let f = gaussian(&g);
    let mut group = c.benchmark_group("csr_matvec_256");
    for (name, exec) in POLICIES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| b.iter(|| m.matvec_with(exec, black_box(&f.values))));
    }
    group.finish();
}

fn block_solve(c: &mut Criterion) {
    let (g, op) = landau_block(96);
    let fact = BandLdl::factor(&op.matrix(), -0.5).unwrap();
    let rhs: Vec<Vec<C64>> = (0..16)
        .map(|k| gaussian(&g).values.iter().map(|v| v * C64::from_polar(1.0, k as f64)).collect())
        .collect();
    let mut group = c.benchmark_group("ldl_block_solve_96x16");
    group.sample_size(20);
    for (name, exec) in POLICIES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| map_range(exec, rhs.len(), |j| fact.solve(black_box(&rhs[j]))))
        });
    }
    group.finish();
}

criterion_group!(benches, stencil, matvec, block_solve);
criterion_main!(benches);
