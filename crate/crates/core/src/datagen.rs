//! Seeded generators for labeled benchmark sets with planted high-density
//! anomalies (HDAs) hidden in dense clusters amid uniform background noise.
//!
//! Four set shapes are available: two opposite-class elongated clusters
//! (`gleuf`), a class-segmented helix (`noisyhelix`), several single-class
//! clusters (`multiset4d`) and a grid of tight clusters with two categorical
//! attributes (`multiset5d`). Case counts scale proportionally with
//! [`GenSpec::scale`]; output is a deterministic function of the spec.

use std::fmt;
use std::str::FromStr;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::data::{Column, Dataset};
use crate::detectors::neighbors::euclidean;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SetName {
    Gleuf,
    NoisyHelix,
    Multiset4d,
    Multiset5d,
}

impl SetName {
    pub const ALL: [SetName; 4] = [
        SetName::Gleuf,
        SetName::NoisyHelix,
        SetName::Multiset4d,
        SetName::Multiset5d,
    ];

    /// Case count at scale 1.
    pub fn full_size(self) -> usize {
        match self {
            SetName::Gleuf => 25853,
            SetName::NoisyHelix => 9665,
            SetName::Multiset4d => 7853,
            SetName::Multiset5d => 70767,
        }
    }

    /// Planted HDA counts at scale 1, per anomaly type.
    fn hda_mix(self) -> &'static [(AnomalyType, usize)] {
        match self {
            SetName::Gleuf => &[(AnomalyType::VI, 6)],
            SetName::NoisyHelix => &[(AnomalyType::VI, 15)],
            SetName::Multiset4d => &[(AnomalyType::VI, 22)],
            SetName::Multiset5d => &[
                (AnomalyType::II, 10),
                (AnomalyType::V, 10),
                (AnomalyType::VI, 20),
            ],
        }
    }

    /// Fraction of uniform background noise.
    pub fn noise_fraction(self) -> f64 {
        match self {
            SetName::Gleuf | SetName::NoisyHelix => 0.10,
            SetName::Multiset4d => 0.05,
            SetName::Multiset5d => 0.005,
        }
    }
}

impl fmt::Display for SetName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SetName::Gleuf => "gleuf",
            SetName::NoisyHelix => "noisyhelix",
            SetName::Multiset4d => "multiset4d",
            SetName::Multiset5d => "multiset5d",
        })
    }
}

impl FromStr for SetName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gleuf" => Ok(SetName::Gleuf),
            "noisyhelix" => Ok(SetName::NoisyHelix),
            "multiset4d" => Ok(SetName::Multiset4d),
            "multiset5d" => Ok(SetName::Multiset5d),
            other => Err(Error::InvalidParameter(format!("unknown set `{other}`"))),
        }
    }
}

/// Anomaly types that can be planted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AnomalyType {
    /// Uncommon class value.
    II,
    /// Uncommon combination of class values.
    V,
    /// Common class that is rare in its numeric neighborhood.
    VI,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenSpec {
    pub set_name: SetName,
    pub seed: u64,
    /// In (0, 1]; shrinks all case counts proportionally.
    pub scale: f64,
}

impl GenSpec {
    pub fn new(set_name: SetName, seed: u64, scale: f64) -> Self {
        GenSpec {
            set_name,
            seed,
            scale,
        }
    }
}

/// One planted HDA.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Planting {
    /// 1-based case id.
    pub id: usize,
    pub anomaly_type: AnomalyType,
    /// Numeric coordinates of the planted case.
    pub location: Vec<f64>,
    /// Cluster whose core hosts the case.
    pub host_cluster: usize,
    /// Class values assigned to the case.
    pub classes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub set_name: SetName,
    pub seed: u64,
    pub scale: f64,
    pub n_cases: usize,
    pub label_column: String,
    pub plantings: Vec<Planting>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratedSet {
    pub dataset: Dataset,
    pub manifest: Manifest,
}

pub const LABEL_COLUMN: &str = "hda";
const NUMERIC_NAMES: [&str; 3] = ["x1", "x2", "x3"];

/// Gaussian cluster with axis-aligned spread and a fixed class tuple.
#[derive(Debug, Clone)]
struct Cluster {
    center: [f64; 3],
    sigma: [f64; 3],
    classes: Vec<&'static str>,
    weight: f64,
}

impl Cluster {
    fn mahalanobis(&self, p: &[f64; 3]) -> f64 {
        (0..3)
            .map(|d| ((p[d] - self.center[d]) / self.sigma[d]).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    fn sample(&self, rng: &mut ChaCha8Rng, spread: f64) -> [f64; 3] {
        let z = Normal::new(0.0, 1.0).expect("unit normal");
        let mut p = [0.0; 3];
        for d in 0..3 {
            p[d] = self.center[d] + spread * self.sigma[d] * z.sample(rng);
        }
        p
    }
}

/// A helix tube split into class segments of one full turn each.
#[derive(Debug, Clone)]
struct Helix {
    radius: f64,
    pitch: f64,
    tube: f64,
    turns: usize,
    classes: Vec<&'static str>,
}

impl Helix {
    fn point(&self, t: f64) -> [f64; 3] {
        let a = t * std::f64::consts::TAU;
        [
            50.0 + self.radius * a.cos(),
            50.0 + self.radius * a.sin(),
            50.0 + self.pitch * (t - self.turns as f64 / 2.0),
        ]
    }

    /// Curve parameter in [0, turns) and the class of that segment.
    fn segment_class(&self, t: f64) -> &'static str {
        let s = (t.floor() as usize).min(self.turns - 1);
        self.classes[s]
    }

    fn distance_to_curve(&self, p: &[f64; 3]) -> f64 {
        // dense scan over the curve parameter
        let steps = self.turns * 400;
        let mut best = (f64::INFINITY, 0.0);
        for i in 0..=steps {
            let t = self.turns as f64 * i as f64 / steps as f64;
            let d = euclidean(p, &self.point(t));
            if d < best.0 {
                best = (d, t);
            }
        }
        best.0
    }

    fn sample(&self, rng: &mut ChaCha8Rng, spread: f64) -> ([f64; 3], f64) {
        let t = rng.random_range(0.0..self.turns as f64);
        let z = Normal::new(0.0, spread * self.tube).expect("finite spread");
        let c = self.point(t);
        ([c[0] + z.sample(rng), c[1] + z.sample(rng), c[2] + z.sample(rng)], t)
    }
}

enum Shape {
    Clusters(Vec<Cluster>),
    Helix(Helix),
}

struct Layout {
    shape: Shape,
    /// Names of the categorical attributes.
    cat_names: Vec<&'static str>,
    /// Noise box per numeric axis.
    bounds: [(f64, f64); 3],
    /// Mahalanobis radius (or tube multiples) kept free of noise.
    core: f64,
    /// Spread of planted HDAs relative to the cluster sigma.
    hda_spread: f64,
}

fn layout(set: SetName) -> Layout {
    let cube = [(0.0, 100.0); 3];
    match set {
        SetName::Gleuf => Layout {
            shape: Shape::Clusters(vec![
                Cluster {
                    center: [30.0, 50.0, 50.0],
                    sigma: [4.0, 12.0, 4.0],
                    classes: vec!["red"],
                    weight: 1.0,
                },
                Cluster {
                    center: [70.0, 50.0, 50.0],
                    sigma: [4.0, 12.0, 4.0],
                    classes: vec!["blue"],
                    weight: 1.0,
                },
            ]),
            cat_names: vec!["color"],
            bounds: cube,
            core: 4.0,
            hda_spread: 0.3,
        },
        SetName::NoisyHelix => Layout {
            shape: Shape::Helix(Helix {
                radius: 15.0,
                pitch: 20.0,
                tube: 2.0,
                turns: 4,
                classes: vec!["a", "b", "c", "d"],
            }),
            cat_names: vec!["segment"],
            bounds: cube,
            core: 4.0,
            hda_spread: 0.1,
        },
        SetName::Multiset4d => Layout {
            // weights track the sigma product so all cores are about equally dense
            shape: Shape::Clusters(
                [
                    ([20.0, 20.0, 30.0], [4.0, 4.0, 4.0], "c1", 1.0),
                    ([75.0, 25.0, 70.0], [5.0, 3.0, 4.0], "c2", 0.95),
                    ([30.0, 75.0, 75.0], [3.0, 5.0, 3.0], "c3", 0.7),
                    ([70.0, 70.0, 25.0], [4.0, 4.0, 6.0], "c4", 1.5),
                    ([50.0, 50.0, 50.0], [3.0, 3.0, 3.0], "c5", 0.45),
                ]
                .into_iter()
                .map(|(center, sigma, class, weight)| Cluster {
                    center,
                    sigma,
                    classes: vec![class],
                    weight,
                })
                .collect(),
            ),
            cat_names: vec!["class"],
            bounds: cube,
            core: 4.0,
            hda_spread: 0.2,
        },
        SetName::Multiset5d => {
            // 2 x 2 x 2 grid of clusters; six (color, shape) combinations are
            // used, leaving (red, triangle), (green, square) and (blue, circle)
            // unused for combination anomalies. Three clusters are very tight;
            // the HDAs live in the five moderately dense ones.
            let combos = [
                ("red", "circle"),
                ("red", "square"),
                ("green", "circle"),
                ("green", "triangle"),
                ("blue", "square"),
                ("blue", "triangle"),
                ("red", "circle"),
                ("green", "triangle"),
            ];
            let mut clusters = Vec::new();
            for (i, (color, shape)) in combos.into_iter().enumerate() {
                let center = [
                    25.0 + 50.0 * (i & 1) as f64,
                    25.0 + 50.0 * ((i >> 1) & 1) as f64,
                    25.0 + 50.0 * ((i >> 2) & 1) as f64,
                ];
                let (sd, weight) = if MULTISET5D_TIGHT.contains(&i) {
                    (1.0, 0.6)
                } else {
                    (2.5, 1.4)
                };
                clusters.push(Cluster {
                    center,
                    sigma: [sd; 3],
                    classes: vec![color, shape],
                    weight,
                });
            }
            // a central mosaic of tight single-combination patches, 3 units
            // apart, that only separate at fine bin widths
            let offsets = [
                [3.0, 0.0, 0.0],
                [-3.0, 0.0, 0.0],
                [0.0, 3.0, 0.0],
                [0.0, -3.0, 0.0],
                [0.0, 0.0, 3.0],
                [0.0, 0.0, -3.0],
            ];
            let mut used: Vec<(&str, &str)> = combos.to_vec();
            used.sort();
            used.dedup();
            for (off, (color, shape)) in offsets.iter().zip(used) {
                clusters.push(Cluster {
                    center: [50.0 + off[0], 50.0 + off[1], 50.0 + off[2]],
                    sigma: [0.6; 3],
                    classes: vec![color, shape],
                    weight: 0.7,
                });
            }
            Layout {
                shape: Shape::Clusters(clusters),
                cat_names: vec!["color", "shape"],
                bounds: cube,
                core: 4.0,
                hda_spread: 0.15,
            }
        }
    }
}

/// About a third of the normal cases form a tight core, the rest a wider
/// halo, so a core sits well above the median density.
fn normal_spread(rng: &mut ChaCha8Rng) -> f64 {
    if rng.random_bool(0.35) {
        0.35
    } else {
        1.2
    }
}

/// Distributes `total` over `weights` by largest remainder.
fn apportion(total: usize, weights: &[f64]) -> Vec<usize> {
    let sum: f64 = weights.iter().sum();
    let exact: Vec<f64> = weights.iter().map(|w| total as f64 * w / sum).collect();
    let mut counts: Vec<usize> = exact.iter().map(|e| e.floor() as usize).collect();
    let mut rest = total - counts.iter().sum::<usize>();
    let mut order: Vec<usize> = (0..weights.len()).collect();
    order.sort_by(|&a, &b| {
        let ra = exact[a] - exact[a].floor();
        let rb = exact[b] - exact[b].floor();
        rb.total_cmp(&ra).then(a.cmp(&b))
    });
    for i in order {
        if rest == 0 {
            break;
        }
        counts[i] += 1;
        rest -= 1;
    }
    counts
}

/// Planted HDA counts per type after scaling, preserving the type mix.
pub fn scaled_hda_mix(set: SetName, scale: f64) -> Vec<(AnomalyType, usize)> {
    let mix = set.hda_mix();
    let full: usize = mix.iter().map(|(_, c)| c).sum();
    let total = ((full as f64 * scale).round() as usize).max(1);
    let weights: Vec<f64> = mix.iter().map(|(_, c)| *c as f64).collect();
    mix.iter()
        .map(|(t, _)| *t)
        .zip(apportion(total, &weights))
        .collect()
}

struct Case {
    point: [f64; 3],
    classes: Vec<String>,
    hda: bool,
}

fn in_core(layout: &Layout, p: &[f64; 3]) -> bool {
    match &layout.shape {
        Shape::Clusters(cs) => cs.iter().any(|c| c.mahalanobis(p) < layout.core),
        Shape::Helix(h) => h.distance_to_curve(p) < layout.core * h.tube,
    }
}

/// Picks a class tuple different from `own` among the normal tuples.
fn other_tuple(rng: &mut ChaCha8Rng, tuples: &[Vec<&'static str>], own: &[&str]) -> Vec<String> {
    let candidates: Vec<&Vec<&'static str>> =
        tuples.iter().filter(|t| t.as_slice() != own).collect();
    candidates
        .choose(rng)
        .expect("at least two distinct class tuples")
        .iter()
        .map(|s| s.to_string())
        .collect()
}

const MAX_PLANTING_ATTEMPTS: usize = 200;
const GUARD_NEIGHBORS: usize = 10;
const GUARD_SAMPLE: usize = 400;
/// Accepted spots have a mean neighbor distance below this share of the
/// median case's.
const GUARD_MARGIN: f64 = 0.8;

/// Local density test for planting spots, in the same range-normalized
/// space the planting check uses.
struct DensityGuard<'a> {
    cases: &'a [Case],
    lo: [f64; 3],
    span: [f64; 3],
    median: f64,
}

impl<'a> DensityGuard<'a> {
    fn new(cases: &'a [Case]) -> Self {
        let mut lo = [f64::INFINITY; 3];
        let mut hi = [f64::NEG_INFINITY; 3];
        for c in cases {
            for d in 0..3 {
                lo[d] = lo[d].min(c.point[d]);
                hi[d] = hi[d].max(c.point[d]);
            }
        }
        let span = std::array::from_fn(|d| if hi[d] > lo[d] { hi[d] - lo[d] } else { 1.0 });
        let mut guard = DensityGuard {
            cases,
            lo,
            span,
            median: f64::INFINITY,
        };
        if cases.len() > GUARD_NEIGHBORS {
            let step = cases.len().div_ceil(GUARD_SAMPLE);
            let mut sample: Vec<f64> = (0..cases.len())
                .step_by(step)
                .map(|g| guard.mean_knn(&cases[g].point, Some(g)))
                .collect();
            sample.sort_by(f64::total_cmp);
            guard.median = sample[sample.len() / 2];
        }
        guard
    }

    fn mean_knn(&self, p: &[f64; 3], skip: Option<usize>) -> f64 {
        let u: [f64; 3] = std::array::from_fn(|d| (p[d] - self.lo[d]) / self.span[d]);
        let mut best = [f64::INFINITY; GUARD_NEIGHBORS];
        for (h, c) in self.cases.iter().enumerate() {
            if Some(h) == skip {
                continue;
            }
            let d2: f64 = (0..3)
                .map(|d| ((c.point[d] - self.lo[d]) / self.span[d] - u[d]).powi(2))
                .sum();
            if d2 < best[GUARD_NEIGHBORS - 1] {
                let mut k = GUARD_NEIGHBORS - 1;
                while k > 0 && best[k - 1] > d2 {
                    best[k] = best[k - 1];
                    k -= 1;
                }
                best[k] = d2;
            }
        }
        best.iter().map(|d| d.sqrt()).sum::<f64>() / GUARD_NEIGHBORS as f64
    }

    fn is_dense(&self, p: &[f64; 3]) -> bool {
        self.mean_knn(p, None) < GUARD_MARGIN * self.median
    }
}

/// Generates a labeled set and its planting manifest.
pub fn generate(spec: &GenSpec) -> Result<GeneratedSet> {
    if !(spec.scale > 0.0 && spec.scale <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "scale must be in (0, 1], got {}",
            spec.scale
        )));
    }
    let set = spec.set_name;
    let n = ((set.full_size() as f64 * spec.scale).round() as usize).max(1);
    let mix = scaled_hda_mix(set, spec.scale);
    let n_hda: usize = mix.iter().map(|(_, c)| c).sum();
    if n_hda * 100 > n {
        return Err(Error::InvalidParameter(format!(
            "scale {} leaves {n} cases, too few to host {n_hda} HDAs at <= 1%",
            spec.scale
        )));
    }
    let lay = layout(set);
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let n_noise = (n as f64 * set.noise_fraction()).round() as usize;
    let n_normal = n - n_noise - n_hda;

    let tuples: Vec<Vec<&'static str>> = match &lay.shape {
        Shape::Clusters(cs) => {
            let mut t: Vec<Vec<&'static str>> = cs.iter().map(|c| c.classes.clone()).collect();
            t.sort();
            t.dedup();
            t
        }
        Shape::Helix(h) => h.classes.iter().map(|c| vec![*c]).collect(),
    };

    let mut cases: Vec<Case> = Vec::with_capacity(n);
    let mut plantings = Vec::new();

    // normal structure
    match &lay.shape {
        Shape::Clusters(cs) => {
            let weights: Vec<f64> = cs.iter().map(|c| c.weight).collect();
            for (c, count) in cs.iter().zip(apportion(n_normal, &weights)) {
                for _ in 0..count {
                    let spread = normal_spread(&mut rng);
                    cases.push(Case {
                        point: c.sample(&mut rng, spread),
                        classes: c.classes.iter().map(|s| s.to_string()).collect(),
                        hda: false,
                    });
                }
            }
        }
        Shape::Helix(h) => {
            for _ in 0..n_normal {
                let spread = normal_spread(&mut rng);
                let (p, t) = h.sample(&mut rng, spread);
                cases.push(Case {
                    point: p,
                    classes: vec![h.segment_class(t).to_string()],
                    hda: false,
                });
            }
        }
    }

    // background noise, kept out of the dense cores
    let mut placed = 0;
    while placed < n_noise {
        let p = [
            rng.random_range(lay.bounds[0].0..lay.bounds[0].1),
            rng.random_range(lay.bounds[1].0..lay.bounds[1].1),
            rng.random_range(lay.bounds[2].0..lay.bounds[2].1),
        ];
        if in_core(&lay, &p) {
            continue;
        }
        let classes = tuples
            .choose(&mut rng)
            .expect("non-empty class list")
            .iter()
            .map(|s| s.to_string())
            .collect();
        cases.push(Case {
            point: p,
            classes,
            hda: false,
        });
        placed += 1;
    }

    // planted HDAs: each type's HDAs share a few host cores; a spot sparser
    // than the typical case is redrawn
    let density = DensityGuard::new(&cases);
    let mut hda_cases: Vec<(Case, AnomalyType, usize)> = Vec::new();
    for &(kind, count) in &mix {
        for j in 0..count {
            let mut attempt = 0;
            let (point, host, own): ([f64; 3], usize, Vec<&'static str>) = loop {
                let drawn = match &lay.shape {
                    Shape::Clusters(cs) => {
                        let host = pick_host(set, kind, j, cs.len());
                        (
                            cs[host].sample(&mut rng, lay.hda_spread),
                            host,
                            cs[host].classes.clone(),
                        )
                    }
                    Shape::Helix(h) => {
                        let seg = j % h.turns;
                        let t = if attempt == 0 {
                            seg as f64 + 0.2 + 0.2 * (j / h.turns) as f64
                        } else {
                            seg as f64 + rng.random_range(0.1..0.9)
                        };
                        let c = h.point(t);
                        let z = Normal::new(0.0, lay.hda_spread * h.tube).expect("finite spread");
                        (
                            [c[0] + z.sample(&mut rng), c[1] + z.sample(&mut rng), c[2] + z.sample(&mut rng)],
                            seg,
                            vec![h.classes[seg]],
                        )
                    }
                };
                attempt += 1;
                if density.is_dense(&drawn.0) || attempt >= MAX_PLANTING_ATTEMPTS {
                    break drawn;
                }
            };
            let classes = match kind {
                // helix HDAs take the class of the segment two turns away
                AnomalyType::VI if set == SetName::NoisyHelix => {
                    let seg = tuples.iter().position(|t| t.as_slice() == own.as_slice()).unwrap_or(0);
                    tuples[(seg + 2) % tuples.len()].iter().map(|s| s.to_string()).collect()
                }
                AnomalyType::VI => other_tuple(&mut rng, &tuples, &own),
                AnomalyType::II => {
                    let mut c: Vec<String> = own.iter().map(|s| s.to_string()).collect();
                    c[0] = "purple".to_string();
                    c
                }
                AnomalyType::V => unused_combination(&tuples, &own),
            };
            hda_cases.push((
                Case {
                    point,
                    classes,
                    hda: true,
                },
                kind,
                host,
            ));
        }
    }

    // shuffle normal and noise cases, then insert HDAs at random positions
    cases.shuffle(&mut rng);
    for (case, kind, host) in hda_cases {
        let pos = rng.random_range(0..=cases.len());
        cases.insert(pos, case);
        plantings.push((pos, kind, host));
        // later insertions shift earlier positions
        let last = plantings.len() - 1;
        for p in plantings.iter_mut().take(last) {
            if p.0 >= pos {
                p.0 += 1;
            }
        }
    }

    let manifest_plantings: Vec<Planting> = plantings
        .into_iter()
        .map(|(pos, anomaly_type, host_cluster)| Planting {
            id: pos + 1,
            anomaly_type,
            location: cases[pos].point.iter().map(|v| round6(*v)).collect(),
            host_cluster,
            classes: cases[pos].classes.clone(),
        })
        .collect();

    let mut columns = Vec::new();
    for (d, name) in NUMERIC_NAMES.iter().enumerate() {
        columns.push(Column::numeric(
            *name,
            cases.iter().map(|c| round6(c.point[d])).collect(),
        )?);
    }
    for (k, name) in lay.cat_names.iter().enumerate() {
        let values: Vec<&str> = cases.iter().map(|c| c.classes[k].as_str()).collect();
        columns.push(Column::categorical(*name, &values));
    }
    let labels: Vec<bool> = cases.iter().map(|c| c.hda).collect();
    let dataset = Dataset::new(columns, Some(labels))?;
    let mut plantings = manifest_plantings;
    plantings.sort_by_key(|p| p.id);
    Ok(GeneratedSet {
        manifest: Manifest {
            set_name: set,
            seed: spec.seed,
            scale: spec.scale,
            n_cases: dataset.n_cases(),
            label_column: LABEL_COLUMN.to_string(),
            plantings,
        },
        dataset,
    })
}

fn round6(v: f64) -> f64 {
    (v * 1e6).round() / 1e6
}

const MULTISET5D_TIGHT: [usize; 3] = [0, 3, 5];
const MULTISET5D_HOSTS: [usize; 5] = [1, 2, 4, 6, 7];

/// Host cluster for the j-th HDA of a type. Gleuf puts the first third in
/// the red cluster and the rest in the blue one; multiset5d uses only its
/// moderately dense grid clusters.
fn pick_host(set: SetName, kind: AnomalyType, j: usize, n_clusters: usize) -> usize {
    match set {
        SetName::Gleuf => usize::from(j % 3 != 0),
        SetName::Multiset5d => {
            let hosts = MULTISET5D_HOSTS;
            let offset = match kind {
                AnomalyType::II => 0,
                AnomalyType::V => 1,
                AnomalyType::VI => 2,
            };
            hosts[(j + offset) % hosts.len()]
        }
        _ => j % n_clusters,
    }
}

/// A class tuple not used by any cluster whose every value is common.
fn unused_combination(tuples: &[Vec<&'static str>], own: &[&str]) -> Vec<String> {
    let firsts: Vec<&str> = {
        let mut v: Vec<&str> = tuples.iter().map(|t| t[0]).collect();
        v.sort();
        v.dedup();
        v
    };
    let seconds: Vec<&str> = {
        let mut v: Vec<&str> = tuples.iter().map(|t| t[1]).collect();
        v.sort();
        v.dedup();
        v
    };
    // keep the host's first value when possible so only the pairing is odd
    let mut candidates: Vec<(&str, &str)> = Vec::new();
    for &a in &firsts {
        for &b in &seconds {
            if !tuples.iter().any(|t| t[0] == a && t[1] == b) {
                candidates.push((a, b));
            }
        }
    }
    let pick = candidates
        .iter()
        .find(|(a, _)| *a == own[0])
        .or(candidates.first())
        .expect("layout leaves unused combinations");
    vec![pick.0.to_string(), pick.1.to_string()]
}

/// One failed planting check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub id: usize,
    pub kind: ViolationKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    /// Mean distance to the 10 nearest numeric neighbors is not below the
    /// dataset median.
    NotHighDensity,
    /// The HDA's class equals the majority class of its 10 nearest numeric
    /// neighbors.
    NotWrongCluster,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlantingReport {
    pub checked: usize,
    pub violations: Vec<Violation>,
}

impl PlantingReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

const CHECK_NEIGHBORS: usize = 10;

/// Checks that planted Type V/VI HDAs sit in dense regions and that Type VI
/// HDAs carry a class other than their neighborhood's majority.
pub fn verify_hda_plantings(gs: &GeneratedSet) -> Result<PlantingReport> {
    let ds = &gs.dataset;
    let m = ds.continuous_view()?.encode();
    let n = ds.n_cases();
    if n <= CHECK_NEIGHBORS {
        return Err(Error::InvalidParameter(format!(
            "need more than {CHECK_NEIGHBORS} cases to verify plantings"
        )));
    }
    let mean_knn: Vec<f64> = crate::detectors::neighbors::knn_distances(&m, CHECK_NEIGHBORS)
        .into_iter()
        .map(|d| d.iter().sum::<f64>() / d.len() as f64)
        .collect();
    let mut sorted = mean_knn.clone();
    sorted.sort_by(f64::total_cmp);
    let median = if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
    };
    let (_, combo_ids) = ds.class_combinations();

    let mut violations = Vec::new();
    let mut checked = 0;
    for p in &gs.manifest.plantings {
        if p.anomaly_type == AnomalyType::II {
            continue;
        }
        checked += 1;
        let g = p.id - 1;
        if mean_knn[g] >= median {
            violations.push(Violation {
                id: p.id,
                kind: ViolationKind::NotHighDensity,
            });
        }
        if p.anomaly_type == AnomalyType::VI {
            let row = m.row(g);
            let mut d: Vec<(f64, usize)> = (0..n)
                .filter(|&h| h != g)
                .map(|h| (euclidean(row, m.row(h)), h))
                .collect();
            d.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            let mut votes: std::collections::BTreeMap<usize, usize> = Default::default();
            for &(_, h) in d.iter().take(CHECK_NEIGHBORS) {
                *votes.entry(combo_ids[h]).or_default() += 1;
            }
            let majority = votes
                .iter()
                .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(a.0)))
                .map(|(c, _)| *c);
            if majority == Some(combo_ids[g]) {
                violations.push(Violation {
                    id: p.id,
                    kind: ViolationKind::NotWrongCluster,
                });
            }
        }
    }
    Ok(PlantingReport {
        checked,
        violations,
    })
}
