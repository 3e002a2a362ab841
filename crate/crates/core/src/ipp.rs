//! Iterative Partial Push.
//!
//! Iteration `i` (of QD) takes the cases below the `i/QD` quantile of the
//! general anomaly scores (aas), drops the ones that also fall below a
//! slightly wider quantile of the density scores (ads), and scores the
//! not-yet-scored survivors `i.rank`. Cases never selected are isolated and
//! get `1 + max(ads) - ads_g + QD`, above every iteration score.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{Dataset, ScoreVector};
use crate::detectors::{run_detector, DetectorSpec, Scope};
use crate::error::{Error, Result};
use crate::secoda::{integer_root_ceil, mean_cell_occupancy, Discretization};

/// QuantileFilterBoost setting.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Qfb {
    /// Derived from expected versus observed density.
    Auto,
    Fixed(f64),
}

impl Qfb {
    /// Sentinel used by the original parameterization for "auto".
    pub const AUTO_SENTINEL: f64 = -9999.0;

    pub fn from_value(v: f64) -> Self {
        if v == Self::AUTO_SENTINEL {
            Qfb::Auto
        } else {
            Qfb::Fixed(v)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IppConfig {
    /// QuantileDenominator: number of iterations and quantile granularity.
    pub qd: usize,
    pub qfb: Qfb,
    pub underlying: DetectorSpec,
}

impl IppConfig {
    pub fn new(underlying: DetectorSpec) -> Self {
        IppConfig {
            qd: 100,
            qfb: Qfb::Auto,
            underlying,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.qd < 2 {
            return Err(Error::InvalidParameter(format!(
                "QD must be at least 2, got {}",
                self.qd
            )));
        }
        if let Qfb::Fixed(v) = self.qfb {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "QFB must be a finite value >= 0, got {v}"
                )));
            }
        }
        Ok(())
    }
}

/// How a case obtained its HDA score.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    /// Selected in `iteration` as the `rank`-th most extreme of `subset_size`.
    Iteration {
        iteration: usize,
        rank: usize,
        subset_size: usize,
    },
    /// Never selected; scored from its isolation.
    IsolatedFallback,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IppResult {
    pub scores: ScoreVector,
    pub provenance: Vec<Provenance>,
    /// QFB actually used (resolved when configured as auto).
    pub qfb: f64,
    pub aas: ScoreVector,
    pub ads: ScoreVector,
}

fn decimal_digits(mut v: usize) -> u32 {
    let mut d = 1;
    while v >= 10 {
        v /= 10;
        d += 1;
    }
    d
}

/// Encodes the `rank`-th case of an iteration subset of `subset_size` cases
/// as `iteration.rank`, zero-padding the rank to the digit count of the
/// subset size (iteration 3, rank 2 of 19 gives 3.02).
pub fn encode_iteration_score(iteration: usize, rank: usize, subset_size: usize) -> f64 {
    let scale = 10f64.powi(decimal_digits(subset_size) as i32);
    (iteration as f64 * scale + rank as f64) / scale
}

/// QFB = 2 * (expected random density / mean(ads)) * 100, with the expected
/// random density n / arity^p_c.
pub fn calculate_qfb(ads: &ScoreVector, n: usize, p_c: usize, ultimate_arity: usize) -> Result<f64> {
    let mean = ads.as_slice().iter().sum::<f64>() / ads.len() as f64;
    qfb_from_density(mean, n, p_c, ultimate_arity)
}

/// The QFB formula with the observed mean density given directly.
pub fn qfb_from_density(mean: f64, n: usize, p_c: usize, ultimate_arity: usize) -> Result<f64> {
    if mean == 0.0 {
        return Err(Error::InvalidParameter(
            "mean density is zero; QFB is undefined".into(),
        ));
    }
    if ultimate_arity == 0 {
        return Err(Error::InvalidParameter("ultimate arity must be positive".into()));
    }
    let expected = n as f64 / (ultimate_arity as f64).powi(p_c as i32);
    Ok(2.0 * (expected / mean) * 100.0)
}

/// Empirical inverted-CDF quantile of sorted values: the smallest value whose
/// cumulative fraction reaches `p`.
pub fn inverted_cdf_quantile(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    let x = p * n as f64;
    // absorb rounding in p * n so that e.g. 3/100 * 100 lands on 3
    let k = (x - 1e-9 * x.abs().max(1.0)).ceil();
    let k = (k as isize).clamp(1, n as isize) as usize;
    sorted[k - 1]
}

fn sorted(v: &[f64]) -> Vec<f64> {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    s
}

/// Per-iteration (aas, ads) quantile thresholds for iterations 1..=qd.
fn thresholds(aas: &[f64], ads: &[f64], qd: usize, qfb: f64) -> Vec<(f64, f64)> {
    let sa = sorted(aas);
    let sd = sorted(ads);
    let qd_f = qd as f64;
    (1..=qd)
        .map(|i| {
            let qp_aas = i as f64 / qd_f;
            let qp_ads = ((qd_f - 1.0) / qd_f).min((i as f64 + qd_f / 100.0 * qfb) / qd_f);
            (
                inverted_cdf_quantile(&sa, qp_aas),
                inverted_cdf_quantile(&sd, qp_ads),
            )
        })
        .collect()
}

/// Orders an iteration subset: ascending aas, descending ads, then id.
fn sort_subset(subset: &mut [usize], aas: &[f64], ads: &[f64]) {
    subset.sort_by(|&a, &b| {
        aas[a]
            .total_cmp(&aas[b])
            .then(ads[b].total_cmp(&ads[a]))
            .then(a.cmp(&b))
    });
}

fn assign(
    iteration: usize,
    subset: &mut [usize],
    aas: &[f64],
    ads: &[f64],
    scores: &mut [Option<(f64, Provenance)>],
) {
    sort_subset(subset, aas, ads);
    let size = subset.len();
    for (r, &g) in subset.iter().enumerate() {
        scores[g] = Some((
            encode_iteration_score(iteration, r + 1, size),
            Provenance::Iteration {
                iteration,
                rank: r + 1,
                subset_size: size,
            },
        ));
    }
}

fn finish(
    scored: Vec<Option<(f64, Provenance)>>,
    ads: &[f64],
    qd: usize,
) -> Result<(ScoreVector, Vec<Provenance>)> {
    let max_ads = ads.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let (values, provenance): (Vec<f64>, Vec<Provenance>) = scored
        .into_iter()
        .enumerate()
        .map(|(g, s)| {
            s.unwrap_or((
                1.0 + max_ads - ads[g] + qd as f64,
                Provenance::IsolatedFallback,
            ))
        })
        .unzip();
    Ok((ScoreVector::new(values)?, provenance))
}

/// The sequential iteration loop over precomputed aas/ads vectors.
pub fn ipp_scores(
    aas: &ScoreVector,
    ads: &ScoreVector,
    qd: usize,
    qfb: f64,
) -> Result<(ScoreVector, Vec<Provenance>)> {
    check_lengths(aas, ads)?;
    let (aas, ads) = (aas.as_slice(), ads.as_slice());
    let mut scored: Vec<Option<(f64, Provenance)>> = vec![None; aas.len()];
    for (i, &(qa, qs)) in thresholds(aas, ads, qd, qfb).iter().enumerate() {
        let mut subset: Vec<usize> = (0..aas.len())
            .filter(|&g| scored[g].is_none() && aas[g] < qa && !(ads[g] < qs))
            .collect();
        if !subset.is_empty() {
            assign(i + 1, &mut subset, aas, ads, &mut scored);
        }
    }
    finish(scored, ads, qd)
}

/// Same output as [`ipp_scores`], computed by finding each case's first
/// qualifying iteration independently and then ranking within iterations.
pub fn ipp_scores_parallel(
    aas: &ScoreVector,
    ads: &ScoreVector,
    qd: usize,
    qfb: f64,
) -> Result<(ScoreVector, Vec<Provenance>)> {
    check_lengths(aas, ads)?;
    let (aas, ads) = (aas.as_slice(), ads.as_slice());
    let th = thresholds(aas, ads, qd, qfb);
    let first: Vec<Option<usize>> = (0..aas.len())
        .into_par_iter()
        .map(|g| {
            th.iter()
                .position(|&(qa, qs)| aas[g] < qa && !(ads[g] < qs))
                .map(|i| i + 1)
        })
        .collect();
    let mut buckets: Vec<Vec<usize>> = vec![Vec::new(); qd + 1];
    for (g, it) in first.iter().enumerate() {
        if let Some(i) = it {
            buckets[*i].push(g);
        }
    }
    let mut scored: Vec<Option<(f64, Provenance)>> = vec![None; aas.len()];
    for (i, subset) in buckets.iter_mut().enumerate().skip(1) {
        if !subset.is_empty() {
            assign(i, subset, aas, ads, &mut scored);
        }
    }
    finish(scored, ads, qd)
}

fn check_lengths(aas: &ScoreVector, ads: &ScoreVector) -> Result<()> {
    if aas.len() != ads.len() {
        return Err(Error::LengthMismatch {
            left: aas.len(),
            right: ads.len(),
        });
    }
    Ok(())
}

/// Resolves an automatic QFB on a fixed grid over the numeric columns with
/// `ceil(n^(1/p_c))` equiwidth bins each, the arity at which uniformly
/// scattered data would average one case per cell. The observed density is
/// the mean occupancy of non-empty cells, so the density ratio is the
/// fraction of cells in use.
pub fn auto_qfb(ds: &Dataset) -> Result<f64> {
    let view = ds.continuous_view()?.to_dataset();
    let p_c = view.n_numeric();
    let arity = integer_root_ceil(view.n_cases(), p_c);
    let density = mean_cell_occupancy(&view, arity, Discretization::EquiWidth);
    qfb_from_density(density, view.n_cases(), p_c, arity)
}

/// Runs the full framework: both detector passes, QFB resolution and the
/// iteration loop.
pub fn ipp(ds: &Dataset, cfg: &IppConfig) -> Result<IppResult> {
    cfg.validate()?;
    ds.continuous_view()?;
    let aas = run_detector(&cfg.underlying, ds, Scope::Full)?;
    let ads = run_detector(&cfg.underlying, ds, Scope::Continuous)?;
    let qfb = match cfg.qfb {
        Qfb::Fixed(v) => v,
        Qfb::Auto => auto_qfb(ds)?,
    };
    let (scores, provenance) = ipp_scores(&aas.scores, &ads.scores, cfg.qd, qfb)?;
    Ok(IppResult {
        scores,
        provenance,
        qfb,
        aas: aas.scores,
        ads: ads.scores,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn score_encoding_anchor() {
        assert_eq!(encode_iteration_score(3, 2, 19), 3.02);
        assert_eq!(encode_iteration_score(1, 5, 9), 1.5);
        assert_eq!(encode_iteration_score(7, 10, 100), 7.01);
        assert!(encode_iteration_score(100, 999, 999) < 101.0);
    }

    #[test]
    fn qfb_formula() {
        let ads = ScoreVector::new(vec![20.0; 4]).unwrap();
        assert!((calculate_qfb(&ads, 1000, 2, 10).unwrap() - 100.0).abs() < 1e-12);
        // mean equal to the expected density
        let ads = ScoreVector::new(vec![10.0; 4]).unwrap();
        assert!((calculate_qfb(&ads, 1000, 2, 10).unwrap() - 200.0).abs() < 1e-12);
        let ads = ScoreVector::new(vec![500.0; 4]).unwrap();
        assert!((calculate_qfb(&ads, 1000, 2, 10).unwrap() - 4.0).abs() < 1e-12);
        let zero = ScoreVector::new(vec![0.0; 4]).unwrap();
        assert!(calculate_qfb(&zero, 1000, 2, 10).is_err());
    }

    #[test]
    fn quantile_inverted_cdf() {
        let v: Vec<f64> = (1..=10).map(f64::from).collect();
        assert_eq!(inverted_cdf_quantile(&v, 0.1), 1.0);
        assert_eq!(inverted_cdf_quantile(&v, 0.15), 2.0);
        assert_eq!(inverted_cdf_quantile(&v, 0.3), 3.0);
        assert_eq!(inverted_cdf_quantile(&v, 1.0), 10.0);
        assert_eq!(inverted_cdf_quantile(&v, 0.0), 1.0);
        let w: Vec<f64> = (1..=100).map(f64::from).collect();
        for i in 1..=100 {
            assert_eq!(inverted_cdf_quantile(&w, i as f64 / 100.0), i as f64);
        }
    }

    #[test]
    fn isolated_cases_fall_back_above_iteration_scores() {
        // aas: case 0 most anomalous; ads: case 0 densest, case 3 isolated
        let aas = ScoreVector::new(vec![-10.0, -1.0, -2.0, -9.0, -0.5]).unwrap();
        let ads = ScoreVector::new(vec![5.0, 4.0, 3.0, -20.0, 4.5]).unwrap();
        let (s, prov) = ipp_scores(&aas, &ads, 5, 0.0).unwrap();
        assert_eq!(prov[3], Provenance::IsolatedFallback);
        assert_eq!(s.as_slice()[3], 1.0 + 5.0 + 20.0 + 5.0);
        assert_eq!(s.rank_of(1).unwrap(), 1);
        for (g, p) in prov.iter().enumerate() {
            match p {
                Provenance::Iteration { .. } => assert!(s.as_slice()[g] < 6.0),
                Provenance::IsolatedFallback => assert!(s.as_slice()[g] >= 6.0),
            }
        }
    }

    #[test]
    fn hand_run_uniform_sample() {
        // Ten cases with aas == ads (a pure density detector), QD = 10,
        // QFB = 0. For i < 10 both quantiles are the i-th smallest value, so
        // "aas below it" and "ads not below it" never hold together. At
        // i = 10 the aas cut is the maximum (-0.1) and the ads cut is capped
        // at the 9/10 quantile (-0.2): only the case with score -0.2 passes.
        let v = vec![-0.9, -0.2, -0.5, -0.1, -0.7, -0.3, -0.8, -0.4, -0.6, -0.25];
        let s = ScoreVector::new(v).unwrap();
        let (out, prov) = ipp_scores(&s, &s, 10, 0.0).unwrap();
        for (g, p) in prov.iter().enumerate() {
            if g == 1 {
                assert_eq!(
                    *p,
                    Provenance::Iteration {
                        iteration: 10,
                        rank: 1,
                        subset_size: 1
                    }
                );
                assert_eq!(out.as_slice()[g], 10.1);
            } else {
                assert_eq!(*p, Provenance::IsolatedFallback);
            }
        }
        // fallback: 1 + max(ads) - ads_g + QD; the most isolated case is last
        assert_eq!(out.order().last().copied(), Some(0));
        assert!((out.as_slice()[0] - (1.0 - 0.1 + 0.9 + 10.0)).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_config() {
        let mut cfg = IppConfig::new(DetectorSpec::knn_agg(1, 2));
        cfg.qd = 1;
        assert!(cfg.validate().is_err());
        cfg.qd = 100;
        cfg.qfb = Qfb::Fixed(-1.0);
        assert!(cfg.validate().is_err());
        assert_eq!(Qfb::from_value(-9999.0), Qfb::Auto);
    }
}
