//! Detector outputs against straight-line reimplementations on small random
//! instances.

mod common;

use common::*;
use hda_core::detectors::{knn_agg, knn_agg_raw, lof, lof_raw, qsp_raw_with_sample};
use hda_core::secoda::secoda;
use hda_core::{Discretization, EncodedMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn assert_close(got: &[f64], want: &[f64], what: &str) {
    assert_eq!(got.len(), want.len(), "{what}: length");
    for (g, (a, b)) in got.iter().zip(want).enumerate() {
        assert!((a - b).abs() <= TOL, "{what}: case {g}: {a} vs {b}");
    }
}

#[test]
fn knn_agg_matches_pairwise_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for case in 0..25 {
        let pts = random_points(&mut rng, case);
        let n = pts.len();
        let k_max = rng.random_range(1..n.min(11));
        let k_min = rng.random_range(1..=k_max);
        let m = EncodedMatrix::from_rows(&pts).unwrap();
        let got = knn_agg_raw(&m, k_min, k_max).unwrap();
        let want = oracle_knn_agg(&pts, k_min, k_max);
        assert_close(&got, &want, &format!("knn_agg instance {case}"));
        let canon = knn_agg(&m, k_min, k_max).unwrap();
        for (c, r) in canon.as_slice().iter().zip(&want) {
            assert!((c + r).abs() <= TOL);
        }
    }
}

#[test]
fn lof_matches_formula_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for case in 0..25 {
        let pts = random_points(&mut rng, case);
        let n = pts.len();
        let k = rng.random_range(1..n.min(11));
        let m = EncodedMatrix::from_rows(&pts).unwrap();
        let got = lof_raw(&m, k).unwrap();
        let want = oracle_lof(&pts, k);
        assert_close(&got, &want, &format!("lof instance {case}"));
        let canon = lof(&m, k).unwrap();
        for (c, r) in canon.as_slice().iter().zip(&want) {
            assert!((c + r).abs() <= TOL);
        }
    }
}

#[test]
fn lof_five_point_configuration() {
    let pts = vec![
        vec![0.0, 0.0],
        vec![0.1, 0.0],
        vec![0.0, 0.1],
        vec![0.1, 0.1],
        vec![1.0, 1.0],
    ];
    let m = EncodedMatrix::from_rows(&pts).unwrap();
    let got = lof_raw(&m, 2).unwrap();
    assert_close(&got, &oracle_lof(&pts, 2), "five points");
    let max = got.iter().copied().fold(f64::MIN, f64::max);
    assert_eq!(got[4], max);
}

#[test]
fn qsp_matches_nearest_sample_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for case in 0..25 {
        let pts = random_points(&mut rng, case);
        let n = pts.len();
        let size = rng.random_range(1..=n);
        let mut ids: Vec<usize> = (0..n).collect();
        rand::seq::SliceRandom::shuffle(&mut ids[..], &mut rng);
        let sample = &ids[..size];
        let m = EncodedMatrix::from_rows(&pts).unwrap();
        let got = qsp_raw_with_sample(&m, sample).unwrap();
        for g in 0..n {
            let want = sample
                .iter()
                .filter(|&&s| s != g)
                .map(|&s| dist(&pts[g], &pts[s]))
                .fold(f64::INFINITY, f64::min);
            if want.is_finite() {
                assert!((got[g] - want).abs() <= TOL, "qsp instance {case} case {g}");
            }
        }
    }
}

#[test]
fn secoda_matches_loop_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for case in 0..25 {
        let rows = random_mixed(&mut rng, case);
        let ds = to_dataset(&rows);
        for mode in [Discretization::EquiWidth, Discretization::EquiDepth] {
            let got = secoda(&ds, mode, None).unwrap();
            let (want, arity) = oracle_secoda(&rows, mode);
            assert_eq!(got.ultimate_arity, arity, "instance {case} {mode:?}");
            assert_close(got.scores.as_slice(), &want, &format!("secoda {case} {mode:?}"));
        }
    }
}

#[test]
fn secoda_twelve_case_instance() {
    let rows = MixedRows {
        numeric: vec![
            vec![0.0, 0.5, 1.0, 1.2, 1.4, 5.0, 5.1, 5.3, 9.0, 9.5, 9.9, 3.0],
            vec![1.0, 1.1, 0.9, 1.0, 1.2, 4.0, 4.2, 4.1, 8.0, 8.3, 8.1, 6.0],
        ],
        classes: vec![],
    };
    let ds = to_dataset(&rows);
    let got = secoda(&ds, Discretization::EquiWidth, None).unwrap();
    let (want, arity) = oracle_secoda(&rows, Discretization::EquiWidth);
    assert_eq!(got.ultimate_arity, arity);
    assert_close(got.scores.as_slice(), &want, "twelve cases");
}
