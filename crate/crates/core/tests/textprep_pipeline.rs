use std::fs;
use std::path::Path;

use ssnmf::textprep::{load_corpus, prepare, PrepConfig, SplitRatios, VocabConfig};

const DOCS: &[(&str, &str, &str)] = &[
    (
        "comp",
        "graphics",
        "render the polygon mesh with shaders and polygon buffers",
    ),
    (
        "comp",
        "graphics",
        "shaders compile the mesh render pipeline",
    ),
    ("comp", "hardware", "the disk controller and the memory bus"),
    ("comp", "hardware", "memory timing on the controller board"),
    ("rec", "hockey", "the goalie stopped the puck in overtime"),
    ("rec", "hockey", "puck drop and goalie save in the playoffs"),
    (
        "rec",
        "baseball",
        "pitcher threw a curve and the batter swung",
    ),
    (
        "rec",
        "baseball",
        "batter hit the pitcher fastball to center",
    ),
];

fn write_tree(root: &Path) {
    for (i, (class, sub, text)) in DOCS.iter().enumerate() {
        let dir = root.join(class).join(sub);
        fs::create_dir_all(&dir).unwrap();
        fs::write(dir.join(format!("{i}.txt")), text).unwrap();
    }
}

fn write_jsonl(path: &Path) {
    let lines: Vec<String> = DOCS
        .iter()
        .map(|(c, s, t)| serde_json::json!({"text": t, "group": c, "subgroup": s}).to_string())
        .collect();
    fs::write(path, lines.join("\n")).unwrap();
}

fn config() -> PrepConfig {
    PrepConfig {
        vocab: VocabConfig {
            min_df: 1,
            max_df_ratio: 1.0,
            max_size: Some(50),
        },
        ratios: SplitRatios {
            train: 0.5,
            val: 0.0,
            test: 0.5,
        },
        ..Default::default()
    }
}

#[test]
fn directory_and_jsonl_inputs_agree() {
    let tmp = tempfile::tempdir().unwrap();
    write_tree(&tmp.path().join("tree"));
    write_jsonl(&tmp.path().join("docs.jsonl"));
    let a = load_corpus(&tmp.path().join("tree")).unwrap();
    let b = load_corpus(&tmp.path().join("docs.jsonl")).unwrap();
    assert_eq!(a.class_names, vec!["comp", "rec"]);
    assert_eq!(
        a.subgroup_names,
        vec!["baseball", "graphics", "hardware", "hockey"]
    );
    let mut da: Vec<_> = a
        .documents
        .iter()
        .map(|d| (d.text.clone(), d.class_id, d.subgroup_id))
        .collect();
    let mut db: Vec<_> = b
        .documents
        .iter()
        .map(|d| (d.text.clone(), d.class_id, d.subgroup_id))
        .collect();
    da.sort();
    db.sort();
    assert_eq!(da, db);
}

#[test]
fn prepared_matrices_are_deterministic_and_normalized() {
    let tmp = tempfile::tempdir().unwrap();
    write_jsonl(&tmp.path().join("docs.jsonl"));
    let corpus = load_corpus(&tmp.path().join("docs.jsonl")).unwrap();
    let p1 = prepare(&corpus, &config()).unwrap();
    let p2 = prepare(&corpus, &config()).unwrap();
    assert_eq!(p1, p2);
    assert_eq!(p1.train.labels.len(), 4);
    assert_eq!(p1.train.labels.iter().filter(|&&c| c == 0).count(), 2);
    assert!(p1.val.is_none());
    let test = p1.test.as_ref().unwrap();
    assert_eq!(test.tfidf.matrix.rows(), p1.vocab.len());
    assert!(p1.vocab.index("the").is_none(), "stopwords are removed");
    let terms = p1.vocab.terms();
    assert!(terms.windows(2).all(|w| w[0] < w[1]));
    let m = &p1.train.tfidf.matrix;
    for j in 0..m.cols() {
        let norm: f64 = m.column(j).iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!((norm - 1.0).abs() < 1e-12);
    }
}

#[test]
fn malformed_inputs_are_ingest_or_parse_errors() {
    let tmp = tempfile::tempdir().unwrap();
    let bad = tmp.path().join("bad.jsonl");
    fs::write(&bad, "{\"text\": \"x\"}\n").unwrap();
    assert!(load_corpus(&bad).unwrap_err().is_usage());
    let empty = tmp.path().join("empty");
    fs::create_dir_all(&empty).unwrap();
    assert!(load_corpus(&empty).unwrap_err().is_usage());
    assert!(load_corpus(&tmp.path().join("missing.jsonl"))
        .unwrap_err()
        .is_usage());
}
