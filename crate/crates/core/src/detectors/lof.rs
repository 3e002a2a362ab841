//! Local Outlier Factor (Breunig et al.), with k-distance neighborhoods that
//! include ties.

use rayon::prelude::*;

use super::neighbors::k_neighborhoods;
use crate::data::{EncodedMatrix, ScoreVector};
use crate::error::{Error, Result};

/// Raw LOF values; about 1 inside homogeneous regions, larger for outliers.
///
/// A case whose neighbors all coincide with it has zero mean reachability
/// distance; that mean is replaced by the smallest positive reachability
/// distance in the dataset (or 1 when none exists).
pub fn lof_raw(m: &EncodedMatrix, min_pts: usize) -> Result<Vec<f64>> {
    let n = m.n_rows();
    if n < 2 {
        return Err(Error::InvalidParameter("LOF needs at least 2 cases".into()));
    }
    if min_pts == 0 || min_pts >= n {
        return Err(Error::InvalidParameter(format!(
            "LOF requires 1 <= minPts < n (got {min_pts}, n = {n})"
        )));
    }
    let hoods = k_neighborhoods(m, min_pts);
    let reach_sums: Vec<f64> = hoods
        .iter()
        .map(|h| {
            h.members
                .iter()
                .map(|&(d, o)| d.max(hoods[o].k_distance))
                .sum()
        })
        .collect();
    let epsilon = hoods
        .iter()
        .flat_map(|h| h.members.iter().map(|&(d, o)| d.max(hoods[o].k_distance)))
        .filter(|&r| r > 0.0)
        .fold(f64::INFINITY, f64::min);
    let epsilon = if epsilon.is_finite() { epsilon } else { 1.0 };
    let lrd: Vec<f64> = hoods
        .iter()
        .zip(&reach_sums)
        .map(|(h, &s)| {
            let mean = s / h.members.len() as f64;
            if mean > 0.0 {
                1.0 / mean
            } else {
                1.0 / epsilon
            }
        })
        .collect();
    Ok(hoods
        .par_iter()
        .enumerate()
        .map(|(g, h)| {
            let sum: f64 = h.members.iter().map(|&(_, o)| lrd[o]).sum();
            sum / (h.members.len() as f64 * lrd[g])
        })
        .collect())
}

/// LOF in canonical orientation (negated LOF).
pub fn lof(m: &EncodedMatrix, min_pts: usize) -> Result<ScoreVector> {
    ScoreVector::from_raw_descending(lof_raw(m, min_pts)?)
}
