//! Shared fixtures for the solver benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use polyspline::spline1d::KnotSet;
use polyspline::transfinite::{analyze, FourierData, HyperplaneData, PolyConfig, Provenance};

pub fn bench_knots() -> KnotSet {
    KnotSet::new(vec![0.0, 0.7, 1.5, 2.1, 3.0, 3.8, 5.0]).unwrap()
}

pub fn bench_values(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

/// A fit-sized problem: p = 2, n = 1, K = 8, 4 hyperplanes.
pub fn bench_surface() -> (PolyConfig, FourierData) {
    let knots = KnotSet::new(vec![0.0, 1.0, 2.0, 3.0]).unwrap();
    let config = PolyConfig::new(2, knots, 1, 8, 18).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let slices: Vec<Vec<f64>> = (0..config.knots.len())
        .map(|_| {
            (0..config.grid_size())
                .map(|_| rng.gen_range(-1.0..1.0))
                .collect()
        })
        .collect();
    let data = HyperplaneData::new(slices, &config, Provenance::Sampled).unwrap();
    let fdata = analyze(&config, &data).unwrap();
    (config, fdata)
}
