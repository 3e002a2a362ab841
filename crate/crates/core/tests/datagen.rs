use hda_core::datagen::{
    generate, verify_hda_plantings, AnomalyType, GenSpec, GeneratedSet, SetName, ViolationKind,
    LABEL_COLUMN,
};
use hda_core::{write_dataset, Column, ColumnKind, Dataset};

fn csv_bytes(gs: &GeneratedSet) -> Vec<u8> {
    let mut out = Vec::new();
    write_dataset(&gs.dataset, LABEL_COLUMN, &mut out).unwrap();
    out
}

/// Copy of the dataset with case `g` changed by `edit(numeric, classes)`.
fn with_case_edited(
    ds: &Dataset,
    g: usize,
    edit: impl Fn(&mut Vec<f64>, &mut Vec<String>),
) -> Dataset {
    let mut nums: Vec<f64> = ds.numeric_columns().map(|c| c.as_numeric().unwrap()[g]).collect();
    let mut classes: Vec<String> = ds
        .categorical_columns()
        .map(|c| c.class_at(g).unwrap().to_string())
        .collect();
    edit(&mut nums, &mut classes);
    let (mut ni, mut ci) = (0, 0);
    let cols = ds
        .columns()
        .iter()
        .map(|c| match c.kind() {
            ColumnKind::Numeric => {
                let mut v = c.as_numeric().unwrap().to_vec();
                v[g] = nums[ni];
                ni += 1;
                Column::numeric(c.name(), v).unwrap()
            }
            ColumnKind::Categorical => {
                let mut v: Vec<String> = (0..ds.n_cases())
                    .map(|h| c.class_at(h).unwrap().to_string())
                    .collect();
                v[g] = classes[ci].clone();
                ci += 1;
                Column::categorical(c.name(), &v)
            }
        })
        .collect();
    Dataset::new(cols, ds.labels().map(<[bool]>::to_vec)).unwrap()
}

#[test]
fn full_scale_gleuf_matches_table_counts() {
    let gs = generate(&GenSpec::new(SetName::Gleuf, 7, 1.0)).unwrap();
    assert_eq!(gs.dataset.n_cases(), 25853);
    let labels = gs.dataset.labels().unwrap();
    assert_eq!(labels.iter().filter(|&&l| l).count(), 6);
    assert_eq!(gs.manifest.plantings.len(), 6);
    assert!(gs
        .manifest
        .plantings
        .iter()
        .all(|p| p.anomaly_type == AnomalyType::VI));
    assert_eq!(gs.dataset.n_numeric(), 3);
    assert_eq!(gs.dataset.n_categorical(), 1);
}

#[test]
fn full_scale_hda_counts() {
    for (set, want) in [
        (SetName::NoisyHelix, 15),
        (SetName::Multiset4d, 22),
        (SetName::Multiset5d, 40),
    ] {
        let gs = generate(&GenSpec::new(set, 3, 1.0)).unwrap();
        assert_eq!(gs.dataset.n_cases(), set.full_size(), "{set}");
        let labels = gs.dataset.labels().unwrap();
        assert_eq!(labels.iter().filter(|&&l| l).count(), want, "{set}");
    }
}

#[test]
fn scaled_multiset5d_keeps_the_type_mix() {
    let gs = generate(&GenSpec::new(SetName::Multiset5d, 1, 0.1)).unwrap();
    let p = &gs.manifest.plantings;
    assert_eq!(p.len(), 4);
    for t in [AnomalyType::II, AnomalyType::V, AnomalyType::VI] {
        assert!(p.iter().any(|x| x.anomaly_type == t), "{t:?} missing");
    }
    assert_eq!(gs.dataset.n_categorical(), 2);
}

#[test]
fn labels_agree_with_manifest() {
    for set in SetName::ALL {
        let gs = generate(&GenSpec::new(set, 5, 0.1)).unwrap();
        let labels = gs.dataset.labels().unwrap();
        let mut ids: Vec<usize> = gs.manifest.plantings.iter().map(|p| p.id).collect();
        ids.sort();
        let flagged: Vec<usize> = (1..=labels.len()).filter(|&id| labels[id - 1]).collect();
        assert_eq!(ids, flagged, "{set}");
        assert_eq!(gs.manifest.n_cases, gs.dataset.n_cases());
        for p in &gs.manifest.plantings {
            let g = p.id - 1;
            let loc: Vec<f64> = gs
                .dataset
                .numeric_columns()
                .map(|c| c.as_numeric().unwrap()[g])
                .collect();
            assert_eq!(loc, p.location);
        }
    }
}

#[test]
fn same_spec_gives_identical_csv() {
    for set in SetName::ALL {
        let spec = GenSpec::new(set, 99, 0.05);
        let a = generate(&spec).unwrap();
        let b = generate(&spec).unwrap();
        assert_eq!(csv_bytes(&a), csv_bytes(&b), "{set}");
        assert_eq!(
            serde_json::to_string(&a.manifest).unwrap(),
            serde_json::to_string(&b.manifest).unwrap()
        );
    }
    let a = generate(&GenSpec::new(SetName::Gleuf, 1, 0.05)).unwrap();
    let b = generate(&GenSpec::new(SetName::Gleuf, 2, 0.05)).unwrap();
    assert_ne!(csv_bytes(&a), csv_bytes(&b));
}

#[test]
fn rejects_scales_that_cannot_host_the_mix() {
    assert!(generate(&GenSpec::new(SetName::Gleuf, 0, 0.0)).is_err());
    assert!(generate(&GenSpec::new(SetName::Gleuf, 0, 1.5)).is_err());
    assert!(generate(&GenSpec::new(SetName::Multiset5d, 0, 0.001)).is_err());
}

#[test]
fn fresh_sets_verify_clean_over_twenty_seeds() {
    for set in SetName::ALL {
        for seed in 0..20 {
            let gs = generate(&GenSpec::new(set, 1000 + seed, 0.1)).unwrap();
            let r = verify_hda_plantings(&gs).unwrap();
            assert!(r.is_clean(), "{set} seed {seed}: {:?}", r.violations);
            assert!(r.checked > 0);
        }
    }
}

#[test]
fn hda_moved_into_empty_space_fails_density() {
    let mut gs = generate(&GenSpec::new(SetName::Gleuf, 4, 0.1)).unwrap();
    let id = gs.manifest.plantings[0].id;
    gs.dataset = with_case_edited(&gs.dataset, id - 1, |x, _| {
        for v in x.iter_mut() {
            *v = 400.0;
        }
    });
    let r = verify_hda_plantings(&gs).unwrap();
    assert!(r
        .violations
        .iter()
        .any(|v| v.id == id && v.kind == ViolationKind::NotHighDensity));
}

#[test]
fn hda_relabeled_to_local_majority_fails_wrong_cluster() {
    let mut gs = generate(&GenSpec::new(SetName::Gleuf, 4, 0.1)).unwrap();
    let ds = &gs.dataset;
    let id = gs.manifest.plantings[0].id;
    let g = id - 1;
    // majority class among the 10 nearest cases in normalized numeric space
    let m = ds.continuous_view().unwrap().encode();
    let mut near: Vec<(f64, usize)> = (0..ds.n_cases())
        .filter(|&h| h != g)
        .map(|h| {
            let d: f64 = m.row(g).iter().zip(m.row(h)).map(|(a, b)| (a - b).powi(2)).sum();
            (d, h)
        })
        .collect();
    near.sort_by(|a, b| a.0.total_cmp(&b.0));
    let class = ds.categorical_columns().next().unwrap();
    let mut votes = std::collections::BTreeMap::<&str, usize>::new();
    for &(_, h) in &near[..10] {
        *votes.entry(class.class_at(h).unwrap()).or_default() += 1;
    }
    let majority = votes.iter().max_by_key(|(_, c)| **c).unwrap().0.to_string();
    assert_ne!(class.class_at(g).unwrap(), majority);

    gs.dataset = with_case_edited(ds, g, |_, c| c[0] = majority.clone());
    let r = verify_hda_plantings(&gs).unwrap();
    assert!(r
        .violations
        .iter()
        .any(|v| v.id == id && v.kind == ViolationKind::NotWrongCluster));
}
