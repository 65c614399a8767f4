//! Benchmark protocols: ensembles of instances, penalty tuning, noise sweeps
//! and energy-fluctuation studies.

mod fluctuation;
mod noise;
mod suite;

pub use fluctuation::{fluctuation_study, FluctuationConfig, FluctuationRow};
pub use noise::{noise_sweep, NoiseConfig, NoiseRow};
pub use suite::{
    build_instances, prepare_method, run_suite, InstanceRow, Method, MethodSummary, Prepared, Problem, SuiteConfig,
    SuiteReport, Variant,
};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Purpose tags for derived random streams.
#[derive(Clone, Copy, Debug)]
pub(crate) enum Stream {
    Training = 2,
    Starts = 3,
    Trajectories = 4,
    Sampling = 5,
}

/// Independent generator for `(purpose, a, b)` under a base seed.
pub(crate) fn stream_rng(seed: u64, purpose: Stream, a: usize, b: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((purpose as u64) << 56) | ((a as u64) << 24) | b as u64);
    rng
}

pub(crate) fn mean(v: &[f64]) -> f64 {
    if v.is_empty() {
        return f64::NAN;
    }
    v.iter().sum::<f64>() / v.len() as f64
}

/// Sample standard deviation; 0 for fewer than two values.
pub(crate) fn sample_std(v: &[f64]) -> f64 {
    if v.len() < 2 {
        return 0.0;
    }
    let m = mean(v);
    (v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (v.len() - 1) as f64).sqrt()
}

pub(crate) fn median(v: &[f64]) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len();
    if n == 0 {
        f64::NAN
    } else if n % 2 == 1 {
        s[n / 2]
    } else {
        0.5 * (s[n / 2 - 1] + s[n / 2])
    }
}

#[cfg(test)]
mod tests;
