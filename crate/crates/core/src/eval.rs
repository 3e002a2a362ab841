//! ROC/PRC areas, thresholds and confusion-matrix metrics for canonical
//! scores (lowest = most anomalous; a case is predicted positive when its
//! score is strictly below the threshold).

use serde::Serialize;
use serde_json::{Map, Value};

use crate::data::ScoreVector;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledScores {
    scores: ScoreVector,
    labels: Vec<bool>,
}

impl LabeledScores {
    pub fn new(scores: ScoreVector, labels: Vec<bool>) -> Result<Self> {
        if scores.len() != labels.len() {
            return Err(Error::LengthMismatch {
                left: scores.len(),
                right: labels.len(),
            });
        }
        Ok(LabeledScores { scores, labels })
    }

    pub fn scores(&self) -> &ScoreVector {
        &self.scores
    }

    pub fn labels(&self) -> &[bool] {
        &self.labels
    }

    pub fn positives(&self) -> usize {
        self.labels.iter().filter(|&&l| l).count()
    }

    pub fn negatives(&self) -> usize {
        self.labels.len() - self.positives()
    }

    fn require_both_classes(&self) -> Result<()> {
        if self.positives() == 0 || self.negatives() == 0 {
            return Err(Error::SingleClass);
        }
        Ok(())
    }

    /// (positives, negatives) per group of tied scores, most anomalous first.
    fn tie_groups(&self) -> Vec<(usize, usize)> {
        let s = self.scores.as_slice();
        let order = self.scores.order();
        let mut groups: Vec<(usize, usize)> = Vec::new();
        let mut prev: Option<f64> = None;
        for g in order {
            if prev != Some(s[g]) {
                groups.push((0, 0));
                prev = Some(s[g]);
            }
            let last = groups.last_mut().expect("group pushed above");
            if self.labels[g] {
                last.0 += 1;
            } else {
                last.1 += 1;
            }
        }
        groups
    }

    /// Empirical ROC points (FPR, TPR), one per distinct score, from (0, 0).
    pub fn roc_points(&self) -> Result<Vec<(f64, f64)>> {
        self.require_both_classes()?;
        let (p, n) = (self.positives() as f64, self.negatives() as f64);
        let mut pts = vec![(0.0, 0.0)];
        let (mut tp, mut fp) = (0usize, 0usize);
        for (gp, gn) in self.tie_groups() {
            tp += gp;
            fp += gn;
            pts.push((fp as f64 / n, tp as f64 / p));
        }
        Ok(pts)
    }
}

/// Mann-Whitney AUC: fraction of (positive, negative) pairs in which the
/// positive has the lower score, ties counting one half.
pub fn roc_auc(ls: &LabeledScores) -> Result<f64> {
    ls.require_both_classes()?;
    let mut negatives_after = ls.negatives();
    let mut wins = 0.0;
    for (gp, gn) in ls.tie_groups() {
        negatives_after -= gn;
        wins += gp as f64 * negatives_after as f64 + 0.5 * gp as f64 * gn as f64;
    }
    Ok(wins / (ls.positives() as f64 * ls.negatives() as f64))
}

/// Area under the ROC curve for specificity in `[spec_lo, spec_hi]`
/// (FPR in `[1 - spec_hi, 1 - spec_lo]`), by trapezoids with linear
/// interpolation at the band edges, divided by the band width.
pub fn partial_roc_auc(ls: &LabeledScores, spec_lo: f64, spec_hi: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&spec_lo) || !(0.0..=1.0).contains(&spec_hi) || spec_lo >= spec_hi {
        return Err(Error::InvalidParameter(format!(
            "specificity band [{spec_lo}, {spec_hi}] is not a proper sub-interval of [0, 1]"
        )));
    }
    let (a, b) = (1.0 - spec_hi, 1.0 - spec_lo);
    let pts = ls.roc_points()?;
    let mut area = 0.0;
    for w in pts.windows(2) {
        let ((x0, y0), (x1, y1)) = (w[0], w[1]);
        if x1 <= x0 {
            continue;
        }
        let lo = x0.max(a);
        let hi = x1.min(b);
        if hi <= lo {
            continue;
        }
        let at = |x: f64| y0 + (y1 - y0) * (x - x0) / (x1 - x0);
        area += (hi - lo) * (at(lo) + at(hi)) / 2.0;
    }
    Ok(area / (b - a))
}

/// Average precision: sum over distinct thresholds of (R_i - R_{i-1}) * P_i.
pub fn prc_auc(ls: &LabeledScores) -> Result<f64> {
    ls.require_both_classes()?;
    let p = ls.positives() as f64;
    let (mut tp, mut predicted) = (0usize, 0usize);
    let mut prev_recall = 0.0;
    let mut ap = 0.0;
    for (gp, gn) in ls.tie_groups() {
        tp += gp;
        predicted += gp + gn;
        let recall = tp as f64 / p;
        let precision = tp as f64 / predicted as f64;
        ap += (recall - prev_recall) * precision;
        prev_recall = recall;
    }
    Ok(ap)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConfusionMetrics {
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub tn: usize,
    pub sensitivity: f64,
    pub specificity: f64,
    pub precision: f64,
    pub accuracy: f64,
    pub f1: f64,
    pub mcc: f64,
    pub kappa: f64,
    pub gmrp: f64,
    pub hmf: f64,
}

fn ratio(num: f64, den: f64) -> f64 {
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}

impl ConfusionMetrics {
    /// All nine metrics from the four counts; any 0/0 is 0.
    pub fn from_counts(tp: usize, fp: usize, fn_: usize, tn: usize) -> Self {
        let (tpf, fpf, fnf, tnf) = (tp as f64, fp as f64, fn_ as f64, tn as f64);
        let n = tpf + fpf + fnf + tnf;
        let sensitivity = ratio(tpf, tpf + fnf);
        let specificity = ratio(tnf, tnf + fpf);
        let precision = ratio(tpf, tpf + fpf);
        let accuracy = ratio(tpf + tnf, n);
        let f1 = ratio(2.0 * precision * sensitivity, precision + sensitivity);
        let mcc = ratio(
            tpf * tnf - fpf * fnf,
            ((tpf + fpf) * (tpf + fnf) * (tnf + fpf) * (tnf + fnf)).sqrt(),
        );
        let p_e = ratio(
            (tpf + fpf) * (tpf + fnf) + (fnf + tnf) * (fpf + tnf),
            n * n,
        );
        let kappa = ratio(accuracy - p_e, 1.0 - p_e);
        let gmrp = (precision * sensitivity).sqrt();
        let four = [sensitivity, specificity, precision, accuracy];
        let hmf = if four.iter().any(|&v| v <= 0.0) {
            0.0
        } else {
            4.0 / four.iter().map(|v| 1.0 / v).sum::<f64>()
        };
        ConfusionMetrics {
            tp,
            fp,
            fn_,
            tn,
            sensitivity,
            specificity,
            precision,
            accuracy,
            f1,
            mcc,
            kappa,
            gmrp,
            hmf,
        }
    }

    pub fn from_predictions(predicted: &[bool], labels: &[bool]) -> Result<Self> {
        if predicted.len() != labels.len() {
            return Err(Error::LengthMismatch {
                left: predicted.len(),
                right: labels.len(),
            });
        }
        let (mut tp, mut fp, mut fn_, mut tn) = (0, 0, 0, 0);
        for (&p, &l) in predicted.iter().zip(labels) {
            match (p, l) {
                (true, true) => tp += 1,
                (true, false) => fp += 1,
                (false, true) => fn_ += 1,
                (false, false) => tn += 1,
            }
        }
        Ok(Self::from_counts(tp, fp, fn_, tn))
    }
}

/// Metrics with cases predicted positive iff `score < threshold`.
pub fn confusion_metrics(ls: &LabeledScores, threshold: f64) -> ConfusionMetrics {
    let predicted: Vec<bool> = ls.scores.as_slice().iter().map(|&s| s < threshold).collect();
    ConfusionMetrics::from_predictions(&predicted, &ls.labels).expect("lengths checked at construction")
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Youden {
    pub threshold: f64,
    /// J = sensitivity + specificity - 1.
    pub j: f64,
}

/// Threshold maximizing Youden's J. Candidates are the minimum score
/// (nothing predicted), midpoints between consecutive distinct scores, and
/// the maximum plus one (everything predicted). Ties go to the smaller
/// threshold.
pub fn youden_threshold(ls: &LabeledScores) -> Result<Youden> {
    ls.require_both_classes()?;
    let s = ls.scores.as_slice();
    let order = ls.scores.order();
    let (p, n) = (ls.positives() as f64, ls.negatives() as f64);
    let groups = ls.tie_groups();
    let mut distinct: Vec<f64> = Vec::with_capacity(groups.len());
    for &g in &order {
        if distinct.last() != Some(&s[g]) {
            distinct.push(s[g]);
        }
    }
    let mut best = Youden {
        threshold: distinct[0],
        j: 0.0,
    };
    let (mut tp, mut fp) = (0usize, 0usize);
    for (idx, &(gp, gn)) in groups.iter().enumerate() {
        tp += gp;
        fp += gn;
        let threshold = match distinct.get(idx + 1) {
            Some(next) => distinct[idx] + (next - distinct[idx]) / 2.0,
            None => distinct[idx] + 1.0,
        };
        let j = tp as f64 / p + (n - fp as f64) / n - 1.0;
        if j > best.j + 1e-12 {
            best = Youden { threshold, j };
        }
    }
    Ok(best)
}

/// Marks exactly the `k` lowest-scored cases (ties by ascending id).
pub fn predict_topk(scores: &ScoreVector, k: usize) -> Vec<bool> {
    let mut predicted = vec![false; scores.len()];
    for g in scores.order().into_iter().take(k) {
        predicted[g] = true;
    }
    predicted
}

/// Threshold admitting the `k` lowest-scored cases under the strict `<`
/// rule: the midpoint to the next distinct score (the maximum plus one when
/// `k = n`). When the k-th and (k+1)-th scores tie no threshold can separate
/// them; the tied value is returned, admitting fewer than `k`, and
/// [`predict_topk`] gives the exact id-tie-broken cut.
pub fn topk_threshold(scores: &ScoreVector, k: usize) -> Result<f64> {
    let n = scores.len();
    if k == 0 || k > n {
        return Err(Error::InvalidParameter(format!("k must be in 1..={n}, got {k}")));
    }
    let s = scores.as_slice();
    let order = scores.order();
    let kth = s[order[k - 1]];
    if k == n {
        return Ok(kth + 1.0);
    }
    let next = s[order[k]];
    Ok(if next > kth { kth + (next - kth) / 2.0 } else { kth })
}

/// Metrics at a named threshold.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdReport {
    pub threshold: Option<f64>,
    pub metrics: ConfusionMetrics,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub n: usize,
    pub positives: usize,
    pub roc_auc: Option<f64>,
    pub partial_roc_auc: Option<f64>,
    pub prc_auc: Option<f64>,
    /// k equals the number of true positives.
    pub topk: ThresholdReport,
    pub youden: Option<(Youden, ConfusionMetrics)>,
}

/// Full report: AUC family (null for single-class labels), top-k metrics
/// with k = #positives, and metrics at the Youden threshold.
pub fn evaluate(ls: &LabeledScores) -> EvalReport {
    let both = ls.positives() > 0 && ls.negatives() > 0;
    let k = ls.positives();
    let topk = ThresholdReport {
        threshold: topk_threshold(&ls.scores, k).ok(),
        metrics: ConfusionMetrics::from_predictions(&predict_topk(&ls.scores, k), &ls.labels)
            .expect("lengths checked at construction"),
    };
    let youden = if both {
        youden_threshold(ls)
            .ok()
            .map(|y| (y, confusion_metrics(ls, y.threshold)))
    } else {
        None
    };
    EvalReport {
        n: ls.labels.len(),
        positives: k,
        roc_auc: both.then(|| roc_auc(ls).ok()).flatten(),
        partial_roc_auc: both.then(|| partial_roc_auc(ls, 0.9, 1.0).ok()).flatten(),
        prc_auc: both.then(|| prc_auc(ls).ok()).flatten(),
        topk,
        youden,
    }
}

fn insert_metrics(map: &mut Map<String, Value>, prefix: &str, m: Option<&ConfusionMetrics>) {
    let fields: [(&str, Option<Value>); 13] = [
        ("tp", m.map(|m| m.tp.into())),
        ("fp", m.map(|m| m.fp.into())),
        ("fn", m.map(|m| m.fn_.into())),
        ("tn", m.map(|m| m.tn.into())),
        ("sensitivity", m.map(|m| m.sensitivity.into())),
        ("specificity", m.map(|m| m.specificity.into())),
        ("precision", m.map(|m| m.precision.into())),
        ("accuracy", m.map(|m| m.accuracy.into())),
        ("f1", m.map(|m| m.f1.into())),
        ("mcc", m.map(|m| m.mcc.into())),
        ("kappa", m.map(|m| m.kappa.into())),
        ("gmrp", m.map(|m| m.gmrp.into())),
        ("hmf", m.map(|m| m.hmf.into())),
    ];
    for (name, v) in fields {
        map.insert(format!("{prefix}_{name}"), v.unwrap_or(Value::Null));
    }
}

fn opt(v: Option<f64>) -> Value {
    v.map(Value::from).unwrap_or(Value::Null)
}

impl EvalReport {
    /// Flat JSON object: AUCs, then `topk_*` and `youden_*` metric fields.
    pub fn to_json(&self) -> Value {
        let mut map = Map::new();
        map.insert("n".into(), self.n.into());
        map.insert("positives".into(), self.positives.into());
        map.insert("roc_auc".into(), opt(self.roc_auc));
        map.insert("partial_roc_auc".into(), opt(self.partial_roc_auc));
        map.insert("prc_auc".into(), opt(self.prc_auc));
        map.insert("topk_k".into(), self.positives.into());
        map.insert("topk_threshold".into(), opt(self.topk.threshold));
        insert_metrics(&mut map, "topk", Some(&self.topk.metrics));
        map.insert(
            "youden_threshold".into(),
            opt(self.youden.as_ref().map(|(y, _)| y.threshold)),
        );
        map.insert("youden_j".into(), opt(self.youden.as_ref().map(|(y, _)| y.j)));
        insert_metrics(&mut map, "youden", self.youden.as_ref().map(|(_, m)| m));
        Value::Object(map)
    }
}
