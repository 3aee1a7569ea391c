use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use fevt::extremes::BaseDistribution;
use fevt::matrixlab::{hermitian_spectrum, sample_free_family, EnsembleConfig};
use fevt::measures::poisson::free_poisson;
use fevt::measures::Cdf;
use fevt::{
    cumulants_to_moments, free_binomial_cdf, free_convolve_with_grid, levy_distance,
    moments_to_cumulants, FreeCumulantSeq,
};

fn bench_levy(c: &mut Criterion) {
    let a = Cdf::from_measure(free_poisson(0.9).unwrap());
    let b = Cdf::from_measure(free_poisson(1.1).unwrap());
    c.bench_function("levy_distance/free_poisson_pair", |bench| {
        bench.iter(|| levy_distance(black_box(&a), black_box(&b)))
    });
}

fn bench_convolution(c: &mut Criterion) {
    let a = free_poisson(0.5).unwrap();
    let b = free_poisson(0.7).unwrap();
    let mut group = c.benchmark_group("free_convolve");
    group.sample_size(10);
    for grid in [256usize, 1024] {
        group.bench_with_input(BenchmarkId::from_parameter(grid), &grid, |bench, &grid| {
            bench.iter(|| free_convolve_with_grid(black_box(&a), black_box(&b), grid).unwrap())
        });
    }
    group.finish();
}

fn bench_binomial_cdf(c: &mut Criterion) {
    c.bench_function("free_binomial_cdf/n256", |bench| {
        bench.iter(|| free_binomial_cdf(black_box(256), black_box(0.01), black_box(1.3)).unwrap())
    });
}

fn bench_cumulants(c: &mut Criterion) {
    let kappa = FreeCumulantSeq::new(vec![1.0; 24]).unwrap();
    c.bench_function("cumulant_roundtrip/order24", |bench| {
        bench.iter(|| {
            let m = cumulants_to_moments(black_box(&kappa));
            moments_to_cumulants(&m)
        })
    });
}

fn bench_matrix_sampling(c: &mut Criterion) {
    let cfg = EnsembleConfig::new(64, 4, BaseDistribution::uniform01(), 7).unwrap();
    let mut group = c.benchmark_group("matrixlab");
    group.sample_size(10);
    group.bench_function("sample_family/d64_n4", |bench| {
        bench.iter(|| sample_free_family(black_box(&cfg)).unwrap())
    });
    let fam = sample_free_family(&cfg).unwrap();
    group.bench_function("hermitian_spectrum/d64", |bench| {
        bench.iter(|| hermitian_spectrum(black_box(&fam[0])).unwrap())
    });
    group.finish();
}

criterion_group!(
    benches,
    bench_levy,
    bench_convolution,
    bench_binomial_cdf,
    bench_cumulants,
    bench_matrix_sampling
);
criterion_main!(benches);
