//! Discretization-based density detector for mixed data.
//!
//! Each iteration discretizes every numeric column into `b` bins
//! (b = 1, 2, 3, ...) and counts how often each case's constellation of bin
//! ids and class values occurs. A case's score is the arithmetic mean of its
//! constellation frequencies over all iterations, so rare constellations get
//! low scores. No pruning: every case is scored in every iteration.
//!
//! The loop ends once every constellation is unique or `b` reaches the
//! maximum arity; the final `b` is the ultimate arity.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::data::{ColumnValues, Dataset, ScoreVector};
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Discretization {
    /// Bins of equal value interval.
    #[default]
    EquiWidth,
    /// Bins holding equal numbers of cases.
    EquiDepth,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SecodaResult {
    pub scores: ScoreVector,
    pub ultimate_arity: usize,
}

/// Smallest r with r^p >= n.
pub fn integer_root_ceil(n: usize, p: usize) -> usize {
    let mut r = 1usize;
    while r.checked_pow(p as u32).is_some_and(|v| v < n) {
        r += 1;
    }
    r
}

/// Default arity cap: 4 * ceil(n^(1/p_c)); 1 when there are no numeric
/// columns.
pub fn default_max_arity(n: usize, p_c: usize) -> usize {
    if p_c == 0 {
        1
    } else {
        4 * integer_root_ceil(n, p_c)
    }
}

fn equiwidth_bin(v: f64, lo: f64, span: f64, b: usize) -> u32 {
    if b == 1 || span <= 0.0 {
        return 1;
    }
    let edge = |j: usize| lo + span * j as f64 / b as f64;
    let mut j = (((v - lo) / span) * b as f64).floor().clamp(0.0, (b - 1) as f64) as usize;
    while j > 0 && v < edge(j) {
        j -= 1;
    }
    while j + 1 < b && v >= edge(j + 1) {
        j += 1;
    }
    j as u32 + 1
}

/// 1-based ranks by value, ties broken by position.
fn ranks(values: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
    let mut r = vec![0; values.len()];
    for (pos, g) in idx.into_iter().enumerate() {
        r[g] = pos + 1;
    }
    r
}

fn equidepth_bin(rank: usize, n: usize, b: usize) -> u32 {
    // bin j holds ranks in ((j-1)n/b, jn/b]
    rank.saturating_mul(b).div_ceil(n) as u32
}

/// Assigns each value a 1-based bin id in `1..=b`.
///
/// Equiwidth edges sit at `min + j * (max - min) / b`; a value on an edge goes
/// to the higher bin. Equidepth bin j holds the cases ranked in
/// `((j-1) * n / b, j * n / b]`, ranking by value then position.
pub fn discretize(values: &[f64], b: usize, mode: Discretization) -> Vec<u32> {
    let b = b.max(1);
    match mode {
        Discretization::EquiWidth => {
            let (lo, hi) = bounds(values);
            values
                .iter()
                .map(|&v| equiwidth_bin(v, lo, hi - lo, b))
                .collect()
        }
        Discretization::EquiDepth => {
            let n = values.len();
            ranks(values)
                .into_iter()
                .map(|r| equidepth_bin(r, n, b))
                .collect()
        }
    }
}

fn bounds(values: &[f64]) -> (f64, f64) {
    values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        })
}

enum Binner<'a> {
    Width { values: &'a [f64], lo: f64, span: f64 },
    Depth { ranks: Vec<usize> },
}

impl Binner<'_> {
    fn bin(&self, g: usize, b: usize, n: usize) -> u32 {
        match self {
            Binner::Width { values, lo, span } => equiwidth_bin(values[g], *lo, *span, b),
            Binner::Depth { ranks } => equidepth_bin(ranks[g], n, b),
        }
    }
}

/// Runs the iterative discretization loop over all columns of `ds`.
///
/// `max_arity` defaults to [`default_max_arity`].
pub fn secoda(
    ds: &Dataset,
    mode: Discretization,
    max_arity: Option<usize>,
) -> Result<SecodaResult> {
    let n = ds.n_cases();
    let mut binners = Vec::new();
    let mut class_codes: Vec<&[u32]> = Vec::new();
    for c in ds.columns() {
        match c.values() {
            ColumnValues::Numeric(v) => binners.push(match mode {
                Discretization::EquiWidth => {
                    let (lo, hi) = bounds(v);
                    Binner::Width {
                        values: v,
                        lo,
                        span: hi - lo,
                    }
                }
                Discretization::EquiDepth => Binner::Depth { ranks: ranks(v) },
            }),
            ColumnValues::Categorical { codes, .. } => class_codes.push(codes),
        }
    }
    let max_arity = max_arity
        .unwrap_or_else(|| default_max_arity(n, binners.len()))
        .max(1);

    let width = binners.len() + class_codes.len();
    if width == 0 {
        // every case shares the empty constellation
        return Ok(SecodaResult {
            scores: ScoreVector::new(vec![n as f64; n])?,
            ultimate_arity: 1,
        });
    }
    let mut keys = vec![0u32; n * width];
    for (g, key) in keys.chunks_mut(width).enumerate() {
        for (j, codes) in class_codes.iter().enumerate() {
            key[binners.len() + j] = codes[g];
        }
    }

    let mut totals = vec![0.0f64; n];
    let mut b = 0;
    loop {
        b += 1;
        for (g, key) in keys.chunks_mut(width).enumerate() {
            for (j, binner) in binners.iter().enumerate() {
                key[j] = binner.bin(g, b, n);
            }
        }
        let mut counts: HashMap<&[u32], u32> = HashMap::with_capacity(n);
        for key in keys.chunks(width) {
            *counts.entry(key).or_default() += 1;
        }
        let mut all_unique = true;
        for (g, key) in keys.chunks(width).enumerate() {
            let f = counts[key];
            all_unique &= f == 1;
            totals[g] += f as f64;
        }
        if all_unique || b >= max_arity {
            break;
        }
    }
    let scores = totals.into_iter().map(|t| t / b as f64).collect();
    Ok(SecodaResult {
        scores: ScoreVector::new(scores)?,
        ultimate_arity: b,
    })
}

/// Mean number of cases per occupied cell when every numeric column is cut
/// into `b` bins (categorical columns also split cells).
pub fn mean_cell_occupancy(ds: &Dataset, b: usize, mode: Discretization) -> f64 {
    let n = ds.n_cases();
    let cols: Vec<Vec<u32>> = ds
        .columns()
        .iter()
        .map(|c| match c.values() {
            ColumnValues::Numeric(v) => discretize(v, b, mode),
            ColumnValues::Categorical { codes, .. } => codes.clone(),
        })
        .collect();
    let keys: Vec<Vec<u32>> = (0..n).map(|g| cols.iter().map(|c| c[g]).collect()).collect();
    let mut cells: HashMap<&[u32], ()> = HashMap::with_capacity(n);
    for k in &keys {
        cells.insert(k.as_slice(), ());
    }
    n as f64 / cells.len().max(1) as f64
}
