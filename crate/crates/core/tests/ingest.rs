use std::io::Write;
use std::path::Path;

use hda_core::{load_dataset, write_dataset, ColumnKind, Error, Schema};
use tempfile::NamedTempFile;

fn csv_file(body: &str) -> NamedTempFile {
    let mut f = NamedTempFile::new().unwrap();
    f.write_all(body.as_bytes()).unwrap();
    f
}

#[test]
fn declared_schema_keeps_header_order() {
    let f = csv_file("x1,x2,color\n1,2,red\n3,4.5,blue\n5,6,red\n7,8e-1,green\n");
    let schema = Schema::infer().numeric("x1").numeric("x2").categorical("color");
    let ds = load_dataset(f.path(), &schema, None).unwrap();
    assert_eq!(ds.n_cases(), 4);
    assert_eq!(ds.columns().len(), 3);
    assert_eq!((ds.n_numeric(), ds.n_categorical()), (2, 1));
    let names: Vec<&str> = ds.columns().iter().map(|c| c.name()).collect();
    assert_eq!(names, ["x1", "x2", "color"]);
    assert_eq!(ds.column("x2").unwrap().as_numeric().unwrap()[3], 0.8);
    assert!(ds.labels().is_none());
}

#[test]
fn label_column_becomes_ground_truth() {
    let f = csv_file("x1,x2,color,hda\n1,2,a,0\n3,4,b,1\n5,6,a,false\n7,8,b,true\n");
    let ds = load_dataset(f.path(), &Schema::infer(), Some("hda")).unwrap();
    assert_eq!(ds.columns().len(), 3);
    assert!(ds.column("hda").is_none());
    assert_eq!(ds.labels().unwrap(), [false, true, false, true]);
    assert_eq!(ds.column("color").unwrap().kind(), ColumnKind::Categorical);
}

#[test]
fn non_numeric_token_names_row_and_column() {
    let f = csv_file("x1,x2\nabc,1\n2,3\n");
    let schema = Schema::infer().numeric("x1");
    match load_dataset(f.path(), &schema, None) {
        Err(Error::NotNumeric { row, column, value }) => {
            assert_eq!((row, column.as_str(), value.as_str()), (2, "x1", "abc"));
        }
        other => panic!("expected a numeric parse error, got {other:?}"),
    }
}

#[test]
fn ingestion_errors() {
    let missing = load_dataset(Path::new("/nonexistent/data.csv"), &Schema::infer(), None);
    assert!(matches!(missing, Err(Error::Io { .. })));

    let dup = csv_file("x,x\n1,2\n");
    assert!(matches!(
        load_dataset(dup.path(), &Schema::infer(), None),
        Err(Error::DuplicateColumn(_))
    ));

    let empty = csv_file("");
    assert!(matches!(
        load_dataset(empty.path(), &Schema::infer(), None),
        Err(Error::EmptyFile(_))
    ));

    let header_only = csv_file("x1,x2\n");
    assert!(matches!(
        load_dataset(header_only.path(), &Schema::infer(), None),
        Err(Error::EmptyFile(_))
    ));

    let gap = csv_file("x1,x2\n1,\n");
    assert!(matches!(
        load_dataset(gap.path(), &Schema::infer(), None),
        Err(Error::MissingValue { .. })
    ));

    let bad_label = csv_file("x1,hda\n1,2\n");
    assert!(matches!(
        load_dataset(bad_label.path(), &Schema::infer(), Some("hda")),
        Err(Error::BadLabel { row: 2, .. })
    ));

    let inf = csv_file("x1\ninf\n");
    assert!(load_dataset(inf.path(), &Schema::infer().numeric("x1"), None).is_err());
}

#[test]
fn write_then_load_round_trips() {
    let f = csv_file("x1,c,hda\n0.25,a,1\n-3,b,0\n10,a,0\n");
    let ds = load_dataset(f.path(), &Schema::infer(), Some("hda")).unwrap();
    let mut out = Vec::new();
    write_dataset(&ds, "hda", &mut out).unwrap();
    let g = csv_file(std::str::from_utf8(&out).unwrap());
    let back = load_dataset(g.path(), &Schema::infer(), Some("hda")).unwrap();
    assert_eq!(ds, back);
}
