//! Score files, label sources and dataset loading for the subcommands.

use std::path::Path;

use anyhow::{bail, Context};
use hda_core::datagen::Manifest;
use hda_core::{load_dataset, Dataset, Schema, ScoreVector};

use crate::Failure;

fn header_of(path: &Path) -> anyhow::Result<Vec<String>> {
    let mut r = csv::Reader::from_path(path)
        .with_context(|| format!("cannot read {}", path.display()))?;
    Ok(r.headers()?.iter().map(str::to_string).collect())
}

/// Loads a dataset, holding `label_column` out of the features when the file
/// has it.
pub fn load_features(path: &Path, label_column: &str) -> Result<Dataset, Failure> {
    let header = header_of(path)?;
    let label = header.iter().any(|h| h == label_column).then_some(label_column);
    load_dataset(path, &Schema::infer(), label)
        .with_context(|| format!("loading {}", path.display()))
        .map_err(Failure::Runtime)
}

pub fn labels_from_data(path: &Path, label_column: &str) -> Result<Vec<bool>, Failure> {
    let header = header_of(path)?;
    if !header.iter().any(|h| h == label_column) {
        return Err(Failure::Usage(format!(
            "{} has no label column `{label_column}`",
            path.display()
        )));
    }
    let ds = load_features(path, label_column)?;
    Ok(ds.labels().map(<[bool]>::to_vec).unwrap_or_default())
}

pub fn labels_from_manifest(path: &Path) -> Result<Vec<bool>, Failure> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read {}", path.display()))?;
    let m: Manifest = serde_json::from_str(&text)
        .with_context(|| format!("{} is not a planting manifest", path.display()))?;
    let mut labels = vec![false; m.n_cases];
    for p in &m.plantings {
        match labels.get_mut(p.id.wrapping_sub(1)) {
            Some(l) => *l = true,
            None => {
                return Err(Failure::Runtime(anyhow::anyhow!(
                    "manifest planting id {} outside 1..={}",
                    p.id,
                    m.n_cases
                )))
            }
        }
    }
    Ok(labels)
}

pub fn write_scores(path: &Path, scores: &ScoreVector, provenance: &[String]) -> Result<(), Failure> {
    let write = || -> anyhow::Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["id", "score", "provenance"])?;
        for (g, (s, p)) in scores.as_slice().iter().zip(provenance).enumerate() {
            w.write_record([(g + 1).to_string(), s.to_string(), p.clone()])?;
        }
        w.flush()?;
        Ok(())
    };
    write()
        .with_context(|| format!("cannot write {}", path.display()))
        .map_err(Failure::Runtime)
}

/// Reads `id,score[,...]` rows; ids must be exactly 1..=n in some order.
pub fn read_scores(path: &Path) -> Result<ScoreVector, Failure> {
    let read = || -> anyhow::Result<ScoreVector> {
        let mut r = csv::Reader::from_path(path)?;
        let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
        let col = |name: &str| header.iter().position(|h| h == name);
        let (Some(id_col), Some(score_col)) = (col("id"), col("score")) else {
            bail!("expected `id` and `score` columns");
        };
        let mut rows: Vec<(usize, f64)> = Vec::new();
        for (i, rec) in r.records().enumerate() {
            let rec = rec?;
            let line = i + 2;
            let id: usize = rec
                .get(id_col)
                .and_then(|v| v.trim().parse().ok())
                .with_context(|| format!("line {line}: bad id"))?;
            let score: f64 = rec
                .get(score_col)
                .and_then(|v| v.trim().parse().ok())
                .filter(|v: &f64| v.is_finite())
                .with_context(|| format!("line {line}: bad score"))?;
            rows.push((id, score));
        }
        let n = rows.len();
        let mut values = vec![f64::NAN; n];
        for (id, s) in rows {
            if id == 0 || id > n || !values[id - 1].is_nan() {
                bail!("ids must be a permutation of 1..={n} (saw {id})");
            }
            values[id - 1] = s;
        }
        Ok(ScoreVector::new(values)?)
    };
    read()
        .with_context(|| format!("reading scores from {}", path.display()))
        .map_err(Failure::Runtime)
}
