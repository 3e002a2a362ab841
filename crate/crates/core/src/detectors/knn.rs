use super::neighbors::knn_distances;
use crate::data::{EncodedMatrix, ScoreVector};
use crate::error::{Error, Result};

/// Raw KNN-AGG scores: sum of the distances to the k_min-th through k_max-th
/// nearest neighbors. Larger means more anomalous.
pub fn knn_agg_raw(m: &EncodedMatrix, k_min: usize, k_max: usize) -> Result<Vec<f64>> {
    let n = m.n_rows();
    if n < 2 {
        return Err(Error::InvalidParameter(
            "KNN-AGG needs at least 2 cases".into(),
        ));
    }
    if k_min == 0 || k_min > k_max || k_max >= n {
        return Err(Error::InvalidParameter(format!(
            "KNN-AGG requires 1 <= k_min <= k_max < n (got {k_min}..{k_max}, n = {n})"
        )));
    }
    Ok(knn_distances(m, k_max)
        .into_iter()
        .map(|d| d[k_min - 1..k_max].iter().sum())
        .collect())
}

/// KNN-AGG in canonical orientation (negated aggregate distance).
pub fn knn_agg(m: &EncodedMatrix, k_min: usize, k_max: usize) -> Result<ScoreVector> {
    ScoreVector::from_raw_descending(knn_agg_raw(m, k_min, k_max)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(xs: &[f64]) -> EncodedMatrix {
        EncodedMatrix::from_rows(&xs.iter().map(|&x| vec![x]).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn one_dimensional_sums() {
        // neighbors of 0: 1,2 -> 3; of 1: 1,1 -> 2; of 2: 1,2 -> 3; of 10: 8,9 -> 17
        let m = line(&[0.0, 1.0, 2.0, 10.0]);
        assert_eq!(knn_agg_raw(&m, 1, 2).unwrap(), vec![3.0, 2.0, 3.0, 17.0]);
        let s = knn_agg(&m, 1, 2).unwrap();
        assert_eq!(s.rank_of(4).unwrap(), 1);
    }

    #[test]
    fn identical_points_tie() {
        let m = line(&[4.0, 4.0]);
        assert_eq!(knn_agg_raw(&m, 1, 1).unwrap(), vec![0.0, 0.0]);
    }

    #[test]
    fn equilateral_triangle_three_way_tie() {
        let h = 3f64.sqrt() / 2.0;
        let m = EncodedMatrix::from_rows(&[vec![0.0, 0.0], vec![1.0, 0.0], vec![0.5, h]]).unwrap();
        let raw = knn_agg_raw(&m, 1, 1).unwrap();
        for r in &raw {
            assert!((r - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_bad_ranges() {
        let m = line(&[0.0, 1.0, 2.0]);
        assert!(knn_agg(&m, 1, 3).is_err());
        assert!(knn_agg(&m, 0, 1).is_err());
        assert!(knn_agg(&m, 2, 1).is_err());
        assert!(knn_agg(&line(&[1.0]), 1, 1).is_err());
    }
}
