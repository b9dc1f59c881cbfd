use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use qgacs_core::info::{deficiency, default_test_family, mutual_information, product_test_family};
use qgacs_core::mat::{hermitian_eigen, m_reduce};
use qgacs_core::qops::{random_density, random_psd, HaarSampler};
use qgacs_core::universal::{enumerate_states, mu_cached, UniversalMatrix};

fn bench_enumeration(c: &mut Criterion) {
    c.bench_function("enumerate_states n=2 B=24", |b| {
        b.iter(|| enumerate_states(2, 24).unwrap().len())
    });
    c.bench_function("build_mu n=2 B=24", |b| {
        b.iter(|| UniversalMatrix::build(2, 24).unwrap().trace())
    });
}

fn bench_m_reduce(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let a = random_psd(16, &mut rng);
    let b_small = random_psd(4, &mut rng);
    c.bench_function("m_reduce 16x16 -> 4x4", |bench| {
        bench.iter(|| m_reduce(&a, &b_small, 4).unwrap())
    });
}

fn bench_eigen(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let h = random_psd(16, &mut rng);
    c.bench_function("jacobi eigen 16x16", |bench| {
        bench.iter(|| hermitian_eigen(&h).unwrap().eigenvalues[0])
    });
}

fn bench_scoring(c: &mut Criterion) {
    let mu = mu_cached(2, 24).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let rho = random_density(4, &mut rng);
    let family = default_test_family(&rho, None, &mu).unwrap();
    let product = product_test_family(&mu).unwrap();
    c.bench_function("deficiency score n=2 B=24", |bench| {
        bench.iter_batched(
            || random_density(4, &mut rng),
            |sigma| deficiency(&sigma, &family).unwrap().aggregate,
            BatchSize::SmallInput,
        )
    });
    let mut rng2 = ChaCha8Rng::seed_from_u64(4);
    c.bench_function("mutual information n=2 B=24", |bench| {
        bench.iter_batched(
            || {
                (
                    random_density(4, &mut rng2),
                    random_density(4, &mut rng2),
                )
            },
            |(sigma, rho)| mutual_information(&sigma, &rho, &product).unwrap().aggregate,
            BatchSize::SmallInput,
        )
    });
}

fn bench_haar(c: &mut Criterion) {
    c.bench_function("haar sample n=3", |bench| {
        let mut k = 0u64;
        bench.iter(|| {
            k += 1;
            HaarSampler::sample_at(3, 7, k).amplitudes()[0]
        })
    });
}

criterion_group!(
    benches,
    bench_enumeration,
    bench_m_reduce,
    bench_eigen,
    bench_scoring,
    bench_haar
);
criterion_main!(benches);
