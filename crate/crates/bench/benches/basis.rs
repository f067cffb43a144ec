use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use finitary::equivalence::{test_equivalence, EquivalenceOptions};
use finitary::repr::compile_hmm;
use finitary::{compute_basis, sample, Tolerance};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn float_basis(c: &mut Criterion) {
    let mut group = c.benchmark_group("basis/float");
    for n in [10, 20, 40] {
        let mut rng = ChaCha8Rng::seed_from_u64(n as u64);
        let lr = compile_hmm(&sample::random_float_hmm(&mut rng, n, 3));
        let tol = Tolerance::default();
        group.bench_with_input(BenchmarkId::from_parameter(n), &lr, |b, lr| {
            b.iter(|| compute_basis(black_box(lr), &tol))
        });
    }
    group.finish();
}

fn exact_basis(c: &mut Criterion) {
    let mut group = c.benchmark_group("basis/exact");
    for n in [2, 4, 6] {
        let mut rng = ChaCha8Rng::seed_from_u64(n as u64);
        let lr = compile_hmm(&sample::random_hmm(&mut rng, n, 2));
        let tol = Tolerance::default();
        group.bench_with_input(BenchmarkId::from_parameter(n), &lr, |b, lr| {
            b.iter(|| compute_basis(black_box(lr), &tol))
        });
    }
    group.finish();
}

fn equivalence(c: &mut Criterion) {
    let mut group = c.benchmark_group("equiv");
    for n in [4, 8] {
        let mut rng = ChaCha8Rng::seed_from_u64(100 + n as u64);
        let x = sample::random_hmm(&mut rng, n, 2);
        let perm = sample::random_permutation(&mut rng, n);
        let y = sample::permute_hmm(&x, &perm);
        let (lx, ly) = (compile_hmm(&x), compile_hmm(&y));
        let opts = EquivalenceOptions::default();
        group.bench_function(BenchmarkId::new("exact-permuted", n), |b| {
            b.iter(|| test_equivalence(black_box(&lx), black_box(&ly), &opts).unwrap())
        });
    }
    for n in [10, 20] {
        let mut rng = ChaCha8Rng::seed_from_u64(200 + n as u64);
        let lx = compile_hmm(&sample::random_float_hmm(&mut rng, n, 3));
        let ly = compile_hmm(&sample::random_float_hmm(&mut rng, n, 3));
        let opts = EquivalenceOptions::default();
        group.bench_function(BenchmarkId::new("float-independent", n), |b| {
            b.iter(|| test_equivalence(black_box(&lx), black_box(&ly), &opts).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, float_basis, exact_basis, equivalence);
criterion_main!(benches);
