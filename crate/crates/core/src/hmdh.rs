//! Harmonic Mean Detection of HDAs.
//!
//! Anomalousness (aas) and neighborhood density (ads) are mapped to [0, 1]
//! so that extreme HDAs score high on both, fused per case with a weighted
//! harmonic mean (aas weight 1, ads weight `w`), and reversed back to the
//! canonical orientation.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::data::{Dataset, ScoreVector};
use crate::detectors::{run_detector, DetectorSpec, Scope};
use crate::error::{Error, Result};
use crate::secoda::Discretization;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum WeightCorrection {
    /// Unweighted harmonic mean (w = 1).
    #[default]
    None,
    /// Relative Shannon entropy of the class combinations.
    Sse,
    /// Density ratio between the densest class combination and the others.
    Sden,
}

impl fmt::Display for WeightCorrection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WeightCorrection::None => "none",
            WeightCorrection::Sse => "sse",
            WeightCorrection::Sden => "sden",
        })
    }
}

impl FromStr for WeightCorrection {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "none" => Ok(WeightCorrection::None),
            "sse" => Ok(WeightCorrection::Sse),
            "sden" => Ok(WeightCorrection::Sden),
            other => Err(Error::InvalidParameter(format!(
                "unknown weight correction `{other}`"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HmdhConfig {
    pub weight_mode: WeightCorrection,
    pub underlying: DetectorSpec,
}

impl HmdhConfig {
    /// SECODA (equiwidth) is the default underlying detector.
    pub fn new(weight_mode: WeightCorrection) -> Self {
        HmdhConfig {
            weight_mode,
            underlying: DetectorSpec::secoda(Discretization::EquiWidth),
        }
    }
}

/// aas and ads mapped to [0, 1]; high means anomalous and dense respectively.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitScores {
    pub aas_u: Vec<f64>,
    pub ads_u: Vec<f64>,
}

fn rescale(v: &[f64], reverse: bool) -> Vec<f64> {
    let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = hi - lo;
    if !(span > 0.0) {
        return vec![0.5; v.len()];
    }
    v.iter()
        .map(|&x| {
            let u = if reverse { (hi - x) / span } else { (x - lo) / span };
            u.clamp(0.0, 1.0)
        })
        .collect()
}

/// Reverses aas (canonical lowest becomes 1) and rescales ads (already
/// density-oriented). Constant vectors map to 0.5.
pub fn to_unit(aas: &ScoreVector, ads: &ScoreVector) -> Result<UnitScores> {
    if aas.len() != ads.len() {
        return Err(Error::LengthMismatch {
            left: aas.len(),
            right: ads.len(),
        });
    }
    Ok(UnitScores {
        aas_u: rescale(aas.as_slice(), true),
        ads_u: rescale(ads.as_slice(), false),
    })
}

/// Relative Shannon entropy of the class-combination distribution, in
/// [0, 1]; 0 for a single combination.
pub fn weight_sse(ds: &Dataset) -> Result<f64> {
    if ds.n_categorical() == 0 {
        return Err(Error::NoCategoricalColumns);
    }
    let (combos, ids) = ds.class_combinations();
    let k = combos.len();
    if k <= 1 {
        return Ok(0.0);
    }
    let mut counts = vec![0usize; k];
    for id in ids {
        counts[id] += 1;
    }
    let n = ds.n_cases() as f64;
    let h: f64 = counts
        .iter()
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.ln()
        })
        .sum();
    Ok((h / (k as f64).ln()).clamp(0.0, 1.0))
}

/// Harmonic mean of the non-maximal mean densities divided by the maximal
/// one, clamped to [0, 1]. The first maximum in `means` order is excluded.
pub fn sden_ratio(means: &[f64]) -> f64 {
    if means.len() < 2 {
        return 1.0;
    }
    let argmax = means
        .iter()
        .enumerate()
        .fold(0, |best, (i, &m)| if m > means[best] { i } else { best });
    let max = means[argmax];
    if !(max > 0.0) {
        return 1.0;
    }
    let rest: Vec<f64> = means
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != argmax)
        .map(|(_, &m)| m)
        .collect();
    let hm = if rest.iter().any(|&m| m <= 0.0) {
        0.0
    } else {
        rest.len() as f64 / rest.iter().map(|m| 1.0 / m).sum::<f64>()
    };
    (hm / max).clamp(0.0, 1.0)
}

/// Density-ratio weight from the per-combination mean of `ads`.
///
/// Mean densities must be positive to form a ratio. Frequency-type density
/// scores are used as-is; scores with non-positive values (negated distances)
/// are first rescaled to [0, 1].
pub fn weight_sden(ads: &ScoreVector, ds: &Dataset) -> Result<f64> {
    if ds.n_categorical() == 0 {
        return Err(Error::NoCategoricalColumns);
    }
    if ads.len() != ds.n_cases() {
        return Err(Error::LengthMismatch {
            left: ds.n_cases(),
            right: ads.len(),
        });
    }
    let (combos, ids) = ds.class_combinations();
    if combos.len() < 2 {
        return Ok(1.0);
    }
    let raw = ads.as_slice();
    let density: Vec<f64> = if raw.iter().all(|&v| v > 0.0) {
        raw.to_vec()
    } else {
        rescale(raw, false)
    };
    let mut sums = vec![0.0; combos.len()];
    let mut counts = vec![0usize; combos.len()];
    for (g, &id) in ids.iter().enumerate() {
        sums[id] += density[g];
        counts[id] += 1;
    }
    let means: Vec<f64> = sums
        .iter()
        .zip(&counts)
        .map(|(s, &c)| s / c as f64)
        .collect();
    Ok(sden_ratio(&means))
}

/// Weighted harmonic mean with aas weight 1 and ads weight `w`; zero when a
/// positively weighted component is zero.
pub fn fuse(aas_u: f64, ads_u: f64, w: f64) -> f64 {
    if aas_u <= 0.0 || (w > 0.0 && ads_u <= 0.0) {
        return 0.0;
    }
    let ads_term = if w > 0.0 { w / ads_u } else { 0.0 };
    (1.0 + w) / (1.0 / aas_u + ads_term)
}

#[derive(Debug, Clone, PartialEq)]
pub struct HmdhResult {
    pub scores: ScoreVector,
    /// Fused per-case values in [0, 1]; high is most HDA-like.
    pub fused: Vec<f64>,
    pub weight: f64,
    pub aas: ScoreVector,
    pub ads: ScoreVector,
}

/// Fuses precomputed aas/ads with weight `w`; output is `max(h) - h`.
pub fn hmdh_scores(aas: &ScoreVector, ads: &ScoreVector, w: f64) -> Result<(ScoreVector, Vec<f64>)> {
    let unit = to_unit(aas, ads)?;
    let fused: Vec<f64> = unit
        .aas_u
        .iter()
        .zip(&unit.ads_u)
        .map(|(&a, &d)| fuse(a, d, w))
        .collect();
    let max = fused.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let scores = ScoreVector::new(fused.iter().map(|h| max - h).collect())?;
    Ok((scores, fused))
}

pub fn hmdh(ds: &Dataset, cfg: &HmdhConfig) -> Result<HmdhResult> {
    ds.continuous_view()?;
    if cfg.weight_mode != WeightCorrection::None && ds.n_categorical() == 0 {
        return Err(Error::NoCategoricalColumns);
    }
    let aas = run_detector(&cfg.underlying, ds, Scope::Full)?.scores;
    let ads = run_detector(&cfg.underlying, ds, Scope::Continuous)?.scores;
    let weight = match cfg.weight_mode {
        WeightCorrection::None => 1.0,
        WeightCorrection::Sse => weight_sse(ds)?,
        WeightCorrection::Sden => weight_sden(&ads, ds)?,
    };
    let (scores, fused) = hmdh_scores(&aas, &ads, weight)?;
    Ok(HmdhResult {
        scores,
        fused,
        weight,
        aas,
        ads,
    })
}
