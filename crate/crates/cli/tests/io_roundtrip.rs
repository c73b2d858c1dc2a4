mod common;

use frfx::error::IoError;
use frfx::export;
use frfx::model_io::{self, from_json, load_model, save_model};
use frfx::pipeline::{self, RunConfig};
use frfx::ucr::{load_ucr, load_ucr_with, write_ucr};
use frfx_core::explain::{ImportanceTable, PdpCurve};
use frfx_core::rng;
use rand::Rng;

fn small_config(dir: &std::path::Path) -> RunConfig {
    let (train, test) = common::write_pair(dir, 21);
    let mut config = RunConfig::new(train, dir.join("out"));
    config.test = Some(test);
    config.forest.n_trees = 60;
    config.forest.seed = 5;
    config
}

#[test]
fn loader_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let (train, _) = common::write_pair(dir.path(), 2);
    let a = load_ucr(&train).unwrap();
    assert_eq!(a.dataset.len(), 100);
    assert_eq!(a.dataset.grid().len(), 96);
    let copy = dir.path().join("copy");
    write_ucr(&copy, &a.dataset, &a.labels).unwrap();
    let b = load_ucr(&copy).unwrap();
    assert_eq!(a.dataset.values(), b.dataset.values());
    assert_eq!(a.dataset.labels(), b.dataset.labels());
    assert_eq!(a.labels, b.labels);
}

#[test]
fn loader_reports_ragged_rows() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad");
    std::fs::write(&path, "1,1,2,3,4,5\n-1,1,2,3,4,5\n1,1,2,3,4\n").unwrap();
    let err = load_ucr(&path).unwrap_err();
    assert!(matches!(err, IoError::RaggedRows { row: 3, expected: 5, found: 4 }), "{err}");
    assert!(err.to_string().contains("row 3"));
}

#[test]
fn test_file_uses_training_labels() {
    let dir = tempfile::tempdir().unwrap();
    let (train, _) = common::write_pair(dir.path(), 2);
    let map = load_ucr(&train).unwrap().labels;
    let one_class = dir.path().join("one");
    std::fs::write(&one_class, "1,0,1,2,3\n1,3,2,1,0\n").unwrap();
    let d = load_ucr_with(&one_class, Some(&map), None).unwrap();
    assert_eq!(d.dataset.labels().unwrap(), &[1, 1]);
    let stranger = dir.path().join("stranger");
    std::fs::write(&stranger, "7,0,1,2,3\n").unwrap();
    assert!(matches!(
        load_ucr_with(&stranger, Some(&map), None),
        Err(IoError::UnknownLabel { row: 1, .. })
    ));
}

#[test]
fn model_round_trip_predicts_identically() {
    let dir = tempfile::tempdir().unwrap();
    let config = small_config(dir.path());
    let fitted = pipeline::fit(&config).unwrap();
    let model = fitted.model_file(config.smoothing);
    let path = dir.path().join("model.json");
    save_model(&model, &path).unwrap();
    let loaded = load_model(&path).unwrap();
    assert_eq!(loaded, model);

    let k = model.fpca.n_components();
    let mut r = rng::stream(1, 2, 3);
    for _ in 0..50 {
        let row: Vec<f64> = (0..k).map(|_| (r.random::<f64>() - 0.5) * 10.0).collect();
        assert_eq!(loaded.forest.predict_label(&row), model.forest.predict_label(&row));
        assert_eq!(
            loaded.forest.predict_proba(&row).to_bits(),
            model.forest.predict_proba(&row).to_bits()
        );
    }
    // raw curves go through the stored smoothing and projection
    let test = load_ucr_with(config.test.as_ref().unwrap(), Some(&loaded.labels), None).unwrap();
    let a = loaded.scores_for(&test.dataset).unwrap();
    assert_eq!(&a, fitted.test_scores.as_ref().unwrap());
}

#[test]
fn model_version_and_corruption() {
    let dir = tempfile::tempdir().unwrap();
    let config = small_config(dir.path());
    let fitted = pipeline::fit(&config).unwrap();
    let text = model_io::to_json(&fitted.model_file(config.smoothing)).unwrap();

    let bumped = text.replacen("\"version\":1", "\"version\":2", 1);
    assert_ne!(bumped, text);
    assert!(matches!(
        from_json(&bumped),
        Err(IoError::SchemaVersionMismatch { found: 2, expected: 1 })
    ));
    let truncated = &text[..text.len() / 2];
    assert!(matches!(from_json(truncated), Err(IoError::CorruptModel(_))));
    // valid JSON with a damaged body
    let damaged = text.replacen("\"eigenvalues\"", "\"eigenvalue_list\"", 1);
    assert!(matches!(from_json(&damaged), Err(IoError::CorruptModel(_))));
}

#[test]
fn exports_parse_back_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let config = small_config(dir.path());
    let fitted = pipeline::fit(&config).unwrap();
    let art = fitted.inputs().all(&config.explain).unwrap();

    let curves: Vec<PdpCurve> = serde_json::from_str(&export::json(&art.fpdp).unwrap()).unwrap();
    assert_eq!(curves, art.fpdp);
    let table: ImportanceTable = serde_json::from_str(&export::json(&art.importance).unwrap()).unwrap();
    assert_eq!(table, art.importance);
    let violin: frfx_core::explain::ClassConditionalScores =
        serde_json::from_str(&export::json(&art.violin).unwrap()).unwrap();
    assert_eq!(violin, art.violin);
    let bubble: frfx_core::explain::BubblePlotData =
        serde_json::from_str(&export::json(&art.bubble).unwrap()).unwrap();
    assert_eq!(bubble, art.bubble);
    let heatmap: frfx_core::explain::HeatmapGrid =
        serde_json::from_str(&export::json(&art.heatmap).unwrap()).unwrap();
    assert_eq!(heatmap, art.heatmap);
    let tree: frfx_core::TreeNode = serde_json::from_str(&export::json(&art.tree).unwrap()).unwrap();
    assert_eq!(tree, art.tree);

    // importance: 15 rows of fpc + 6 metrics
    let csv_text = export::importance_csv(&art.importance).unwrap();
    let mut reader = csv::Reader::from_reader(csv_text.as_bytes());
    assert_eq!(reader.headers().unwrap().len(), 7);
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 15);
    for (rec, row) in rows.iter().zip(&art.importance.rows) {
        assert_eq!(rec[0].parse::<usize>().unwrap(), row.fpc + 1);
        let got: Vec<f64> = (1..7).map(|i| rec[i].parse().unwrap()).collect();
        let want = [
            row.mdg,
            row.permutation_importance,
            row.f_statistic,
            row.p_value,
            row.eta_squared,
            row.explained_variance_fraction,
        ];
        for (g, w) in got.iter().zip(want) {
            assert_eq!(g.to_bits(), w.to_bits());
        }
    }

    // one FPDP curve: G = 50 rows plus header
    let one = export::pdp_csv(&art.fpdp[0]).unwrap();
    assert_eq!(one.lines().count(), 51);
    let mut reader = csv::Reader::from_reader(one.as_bytes());
    for (rec, (&s, &v)) in reader
        .records()
        .map(Result::unwrap)
        .zip(art.fpdp[0].score_grid.iter().zip(&art.fpdp[0].values))
    {
        assert_eq!(rec[0].parse::<f64>().unwrap(), s);
        assert_eq!(rec[1].parse::<f64>().unwrap(), v);
    }

    // heatmap long form
    let hm = export::heatmap_csv(&art.heatmap).unwrap();
    let mut reader = csv::Reader::from_reader(hm.as_bytes());
    let recs: Vec<_> = reader.records().map(Result::unwrap).collect();
    assert_eq!(recs.len(), 15 * 50);
    for rec in &recs {
        let c: usize = rec[0].parse::<usize>().unwrap() - 1;
        let m: usize = rec[1].parse().unwrap();
        assert_eq!(rec[3].parse::<f64>().unwrap(), art.heatmap.probabilities[c][m]);
    }
}
