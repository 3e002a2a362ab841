//! Exact brute-force neighbor search over an [`EncodedMatrix`].

use rayon::prelude::*;

use crate::data::EncodedMatrix;

pub(crate) fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Distances from case `g` to every other case, as (distance, index) pairs.
fn distances_from(m: &EncodedMatrix, g: usize, buf: &mut Vec<(f64, usize)>) {
    buf.clear();
    let row = m.row(g);
    buf.extend(
        (0..m.n_rows())
            .filter(|&h| h != g)
            .map(|h| (euclidean(row, m.row(h)), h)),
    );
}

fn by_distance(a: &(f64, usize), b: &(f64, usize)) -> std::cmp::Ordering {
    a.0.total_cmp(&b.0).then(a.1.cmp(&b.1))
}

/// Sorted distances to the `k` nearest neighbors of each case, self excluded.
pub(crate) fn knn_distances(m: &EncodedMatrix, k: usize) -> Vec<Vec<f64>> {
    (0..m.n_rows())
        .into_par_iter()
        .map_init(Vec::new, |buf, g| {
            distances_from(m, g, buf);
            if k < buf.len() {
                buf.select_nth_unstable_by(k - 1, by_distance);
                buf.truncate(k);
            }
            buf.sort_unstable_by(by_distance);
            buf.iter().map(|&(d, _)| d).collect()
        })
        .collect()
}

/// k-distance neighborhood of one case: every other case within its k-th
/// nearest-neighbor distance (ties included).
#[derive(Debug, Clone)]
pub(crate) struct Neighborhood {
    pub k_distance: f64,
    pub members: Vec<(f64, usize)>,
}

pub(crate) fn k_neighborhoods(m: &EncodedMatrix, k: usize) -> Vec<Neighborhood> {
    (0..m.n_rows())
        .into_par_iter()
        .map_init(Vec::new, |buf, g| {
            distances_from(m, g, buf);
            let (_, kth, _) = buf.select_nth_unstable_by(k - 1, by_distance);
            let k_distance = kth.0;
            let mut members: Vec<(f64, usize)> =
                buf.iter().copied().filter(|&(d, _)| d <= k_distance).collect();
            members.sort_unstable_by(by_distance);
            Neighborhood {
                k_distance,
                members,
            }
        })
        .collect()
}
