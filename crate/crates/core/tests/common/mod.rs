//! Brute-force reimplementations shared by the oracle and acceptance tests.
#![allow(dead_code)]

use hda_core::{Column, Dataset, Discretization};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub const TOL: f64 = 1e-9;

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

/// Points in [0,1]^dim; every other instance snaps to a coarse grid so that
/// duplicates and distance ties show up.
pub fn random_points(rng: &mut ChaCha8Rng, case: usize) -> Vec<Vec<f64>> {
    let n = rng.random_range(5..=50);
    let dim = rng.random_range(1..=4);
    let coarse = case % 2 == 1;
    (0..n)
        .map(|_| {
            (0..dim)
                .map(|_| {
                    let v: f64 = rng.random();
                    if coarse {
                        (v * 4.0).round() / 4.0
                    } else {
                        v
                    }
                })
                .collect()
        })
        .collect()
}

pub fn sorted_neighbor_distances(pts: &[Vec<f64>], g: usize) -> Vec<f64> {
    let mut d: Vec<f64> = (0..pts.len())
        .filter(|&o| o != g)
        .map(|o| dist(&pts[g], &pts[o]))
        .collect();
    d.sort_by(f64::total_cmp);
    d
}

pub fn oracle_knn_agg(pts: &[Vec<f64>], k_min: usize, k_max: usize) -> Vec<f64> {
    (0..pts.len())
        .map(|g| sorted_neighbor_distances(pts, g)[k_min - 1..k_max].iter().sum())
        .collect()
}

pub fn oracle_lof(pts: &[Vec<f64>], k: usize) -> Vec<f64> {
    let n = pts.len();
    let kdist: Vec<f64> = (0..n)
        .map(|g| sorted_neighbor_distances(pts, g)[k - 1])
        .collect();
    let hood = |g: usize| -> Vec<usize> {
        (0..n)
            .filter(|&o| o != g && dist(&pts[g], &pts[o]) <= kdist[g])
            .collect()
    };
    let reach = |g: usize, o: usize| dist(&pts[g], &pts[o]).max(kdist[o]);
    let mut eps = f64::INFINITY;
    for g in 0..n {
        for o in hood(g) {
            let r = reach(g, o);
            if r > 0.0 && r < eps {
                eps = r;
            }
        }
    }
    if !eps.is_finite() {
        eps = 1.0;
    }
    let lrd: Vec<f64> = (0..n)
        .map(|g| {
            let h = hood(g);
            let mean = h.iter().map(|&o| reach(g, o)).sum::<f64>() / h.len() as f64;
            if mean > 0.0 {
                1.0 / mean
            } else {
                1.0 / eps
            }
        })
        .collect();
    (0..n)
        .map(|g| {
            let h = hood(g);
            h.iter().map(|&o| lrd[o] / lrd[g]).sum::<f64>() / h.len() as f64
        })
        .collect()
}

pub struct MixedRows {
    pub numeric: Vec<Vec<f64>>,
    pub classes: Vec<Vec<String>>,
}

pub fn random_mixed(rng: &mut ChaCha8Rng, case: usize) -> MixedRows {
    let n = rng.random_range(5..=50);
    let p = rng.random_range(1..=3);
    let q = rng.random_range(0..=2);
    let levels = if case % 2 == 0 { 1000.0 } else { 6.0 };
    let numeric = (0..p)
        .map(|_| {
            (0..n)
                .map(|_| (rng.random::<f64>() * levels).round() / levels * 10.0)
                .collect()
        })
        .collect();
    let classes = (0..q)
        .map(|_| {
            (0..n)
                .map(|_| ["a", "b", "c"][rng.random_range(0..3)].to_string())
                .collect()
        })
        .collect();
    MixedRows { numeric, classes }
}

pub fn to_dataset(rows: &MixedRows) -> Dataset {
    let mut cols = Vec::new();
    for (j, v) in rows.numeric.iter().enumerate() {
        cols.push(Column::numeric(format!("x{j}"), v.clone()).unwrap());
    }
    for (j, v) in rows.classes.iter().enumerate() {
        cols.push(Column::categorical(format!("c{j}"), v));
    }
    Dataset::new(cols, None).unwrap()
}

pub fn oracle_equiwidth(v: &[f64], b: usize) -> Vec<usize> {
    let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    v.iter()
        .map(|&x| {
            if hi == lo {
                return 1;
            }
            1 + (1..b)
                .filter(|&j| x >= lo + (hi - lo) * j as f64 / b as f64)
                .count()
        })
        .collect()
}

pub fn oracle_equidepth(v: &[f64], b: usize) -> Vec<usize> {
    let n = v.len();
    v.iter()
        .enumerate()
        .map(|(g, &x)| {
            // 1-based rank by value, then case id
            let rank = 1 + v
                .iter()
                .enumerate()
                .filter(|&(o, &y)| y < x || (y == x && o < g))
                .count();
            (1..=b)
                .find(|&j| rank * b <= j * n && rank * b > (j - 1) * n)
                .unwrap()
        })
        .collect()
}

pub fn oracle_secoda(rows: &MixedRows, mode: Discretization) -> (Vec<f64>, usize) {
    let n = rows.numeric[0].len();
    let p = rows.numeric.len() as f64;
    let mut root = (n as f64).powf(1.0 / p).ceil() as usize;
    while root > 1 && (root - 1).pow(rows.numeric.len() as u32) >= n {
        root -= 1;
    }
    while root.pow(rows.numeric.len() as u32) < n {
        root += 1;
    }
    let b_max = 4 * root;
    let mut totals = vec![0.0; n];
    let mut b = 0;
    loop {
        b += 1;
        let bins: Vec<Vec<usize>> = rows
            .numeric
            .iter()
            .map(|v| match mode {
                Discretization::EquiWidth => oracle_equiwidth(v, b),
                Discretization::EquiDepth => oracle_equidepth(v, b),
            })
            .collect();
        let key = |g: usize| -> (Vec<usize>, Vec<&str>) {
            (
                bins.iter().map(|c| c[g]).collect(),
                rows.classes.iter().map(|c| c[g].as_str()).collect(),
            )
        };
        let mut unique = true;
        for (g, t) in totals.iter_mut().enumerate() {
            let f = (0..n).filter(|&o| key(o) == key(g)).count();
            unique &= f == 1;
            *t += f as f64;
        }
        if unique || b == b_max {
            break;
        }
    }
    (totals.iter().map(|t| t / b as f64).collect(), b)
}

