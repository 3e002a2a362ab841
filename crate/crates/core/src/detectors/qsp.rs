use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::neighbors::euclidean;
use crate::data::{EncodedMatrix, ScoreVector};
use crate::error::{Error, Result};

/// Draws `sample_size` distinct case indices uniformly, deterministically
/// from `seed`. The result is sorted.
pub fn draw_sample(n: usize, sample_size: usize, seed: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut s = rand::seq::index::sample(&mut rng, n, sample_size).into_vec();
    s.sort_unstable();
    s
}

/// Raw QSP scores against a fixed sample: distance from each case to its
/// nearest sampled case other than itself.
///
/// When the sample is the case itself and nothing else, the case falls back
/// to its distance to the nearest other case.
pub fn qsp_raw_with_sample(m: &EncodedMatrix, sample: &[usize]) -> Result<Vec<f64>> {
    let n = m.n_rows();
    if n < 2 {
        return Err(Error::InvalidParameter("QSP needs at least 2 cases".into()));
    }
    if sample.is_empty() || sample.iter().any(|&s| s >= n) {
        return Err(Error::InvalidParameter(
            "QSP sample must be non-empty and index existing cases".into(),
        ));
    }
    Ok((0..n)
        .into_par_iter()
        .map(|g| {
            let row = m.row(g);
            let nearest = sample
                .iter()
                .filter(|&&s| s != g)
                .map(|&s| euclidean(row, m.row(s)))
                .fold(f64::INFINITY, f64::min);
            if nearest.is_finite() {
                nearest
            } else {
                (0..n)
                    .filter(|&h| h != g)
                    .map(|h| euclidean(row, m.row(h)))
                    .fold(f64::INFINITY, f64::min)
            }
        })
        .collect())
}

pub fn qsp_with_sample(m: &EncodedMatrix, sample: &[usize]) -> Result<ScoreVector> {
    ScoreVector::from_raw_descending(qsp_raw_with_sample(m, sample)?)
}

/// Sampling-based nearest-neighbor distance detector, canonical orientation.
pub fn qsp(m: &EncodedMatrix, sample_size: usize, seed: u64) -> Result<ScoreVector> {
    let n = m.n_rows();
    if sample_size == 0 || sample_size > n {
        return Err(Error::InvalidParameter(format!(
            "QSP sample size must be in 1..={n}, got {sample_size}"
        )));
    }
    qsp_with_sample(m, &draw_sample(n, sample_size, seed))
}
