use criterion::{criterion_group, criterion_main};

criterion_group!(benches, brownian_diameter_bench::benchmarks);
criterion_main!(benches);
