//! General-purpose anomaly detectors, adapted to the canonical
//! "lowest = most anomalous" orientation.
//!
//! Distance-based detectors (KNN-AGG, QSP, LOF) run on the dummy-encoded,
//! min-max normalized matrix and negate their raw scores. SECODA runs on the
//! raw dataset and is already frequency-oriented.

mod knn;
mod lof;
pub(crate) mod neighbors;
mod qsp;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use knn::{knn_agg, knn_agg_raw};
pub use lof::{lof, lof_raw};
pub use qsp::{draw_sample, qsp, qsp_raw_with_sample, qsp_with_sample};

use crate::data::{Dataset, ScoreVector};
use crate::error::{Error, Result};
use crate::secoda::{self, Discretization};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Algorithm {
    KnnAgg,
    Qsp,
    Lof,
    Secoda,
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algorithm::KnnAgg => "knn-agg",
            Algorithm::Qsp => "qsp",
            Algorithm::Lof => "lof",
            Algorithm::Secoda => "secoda",
        })
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "knn-agg" | "knnagg" => Ok(Algorithm::KnnAgg),
            "qsp" => Ok(Algorithm::Qsp),
            "lof" => Ok(Algorithm::Lof),
            "secoda" => Ok(Algorithm::Secoda),
            other => Err(Error::InvalidParameter(format!("unknown detector `{other}`"))),
        }
    }
}

/// Which attributes a detector run sees.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scope {
    /// All attributes; yields the general anomaly score (aas).
    Full,
    /// Numeric attributes only; yields the density score (ads).
    Continuous,
}

/// Underlying detector and its parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectorSpec {
    pub algorithm: Algorithm,
    pub k_min: usize,
    pub k_max: usize,
    pub min_pts: usize,
    /// `None` means `min(3000, n)`.
    pub sample_size: Option<usize>,
    pub seed: u64,
    pub discretization: Discretization,
    /// SECODA arity cap; `None` uses the default.
    pub max_arity: Option<usize>,
}

pub const DEFAULT_QSP_SAMPLES: usize = 3000;

impl DetectorSpec {
    pub fn new(algorithm: Algorithm) -> Self {
        DetectorSpec {
            algorithm,
            k_min: 1,
            k_max: 10,
            min_pts: 10,
            sample_size: None,
            seed: 0,
            discretization: Discretization::EquiWidth,
            max_arity: None,
        }
    }

    pub fn knn_agg(k_min: usize, k_max: usize) -> Self {
        DetectorSpec {
            k_min,
            k_max,
            ..Self::new(Algorithm::KnnAgg)
        }
    }

    pub fn qsp(sample_size: usize, seed: u64) -> Self {
        DetectorSpec {
            sample_size: Some(sample_size),
            seed,
            ..Self::new(Algorithm::Qsp)
        }
    }

    pub fn lof(min_pts: usize) -> Self {
        DetectorSpec {
            min_pts,
            ..Self::new(Algorithm::Lof)
        }
    }

    pub fn secoda(discretization: Discretization) -> Self {
        DetectorSpec {
            discretization,
            ..Self::new(Algorithm::Secoda)
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    fn effective_sample_size(&self, n: usize) -> usize {
        self.sample_size.unwrap_or(DEFAULT_QSP_SAMPLES.min(n))
    }

    /// Checks the parameters against a dataset of `n` cases.
    pub fn validate(&self, n: usize) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        match self.algorithm {
            Algorithm::KnnAgg => {
                if self.k_min == 0 || self.k_min > self.k_max || self.k_max >= n {
                    return bad(format!(
                        "KNN-AGG requires 1 <= k_min <= k_max < n (got {}..{}, n = {n})",
                        self.k_min, self.k_max
                    ));
                }
            }
            Algorithm::Lof => {
                if self.min_pts == 0 || self.min_pts >= n {
                    return bad(format!(
                        "LOF requires 1 <= minPts < n (got {}, n = {n})",
                        self.min_pts
                    ));
                }
            }
            Algorithm::Qsp => {
                let s = self.effective_sample_size(n);
                if n < 2 || s == 0 || s > n {
                    return bad(format!("QSP requires 1 <= sample size <= n (got {s}, n = {n})"));
                }
            }
            Algorithm::Secoda => {}
        }
        Ok(())
    }
}

/// Scores plus SECODA's ultimate arity when SECODA produced them.
#[derive(Debug, Clone, PartialEq)]
pub struct Detection {
    pub scores: ScoreVector,
    pub ultimate_arity: Option<usize>,
}

/// Single entry point used by both frameworks: `Scope::Full` yields aas and
/// `Scope::Continuous` yields ads.
pub fn run_detector(spec: &DetectorSpec, ds: &Dataset, scope: Scope) -> Result<Detection> {
    spec.validate(ds.n_cases())?;
    let continuous;
    let data = match scope {
        Scope::Full => ds,
        Scope::Continuous => {
            continuous = ds.continuous_view()?.to_dataset();
            &continuous
        }
    };
    if spec.algorithm == Algorithm::Secoda {
        let r = secoda::secoda(data, spec.discretization, spec.max_arity)?;
        return Ok(Detection {
            scores: r.scores,
            ultimate_arity: Some(r.ultimate_arity),
        });
    }
    let m = data.encode(true);
    let scores = match spec.algorithm {
        Algorithm::KnnAgg => knn_agg(&m, spec.k_min, spec.k_max)?,
        Algorithm::Qsp => qsp(&m, spec.effective_sample_size(ds.n_cases()), spec.seed)?,
        Algorithm::Lof => lof(&m, spec.min_pts)?,
        Algorithm::Secoda => unreachable!(),
    };
    Ok(Detection {
        scores,
        ultimate_arity: None,
    })
}
