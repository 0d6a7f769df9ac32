use ssnmf::classify::{accuracy, label, predict, train, transform, ClassifierModel, LabelMatrix};
use ssnmf::matrix::matmul;
use ssnmf::synth::separable_classes;
use ssnmf::{DenseMatrix, ModelVariant, SsnmfConfig};

struct Data {
    x_train: DenseMatrix,
    x_test: DenseMatrix,
    y_train: LabelMatrix,
    y_test: LabelMatrix,
}

fn separable(k: usize, seed: u64) -> Data {
    let per_class = 40;
    let (x, labels) = separable_classes(8, per_class, k, 0.01, seed).unwrap();
    let n = x.cols();
    let train_idx: Vec<usize> = (0..n / 2).collect();
    let test_idx: Vec<usize> = (n / 2..n).collect();
    let pick = |idx: &[usize]| idx.iter().map(|&j| labels[j]).collect::<Vec<_>>();
    Data {
        x_train: x.select_columns(&train_idx),
        x_test: x.select_columns(&test_idx),
        y_train: LabelMatrix::from_labels(&pick(&train_idx), k).unwrap(),
        y_test: LabelMatrix::from_labels(&pick(&test_idx), k).unwrap(),
    }
}

fn config(rank: usize) -> SsnmfConfig {
    SsnmfConfig {
        rank,
        lambda: 1.0,
        max_iters: 300,
        seed: 17,
        ..Default::default()
    }
}

#[test]
fn separable_classes_are_recovered_by_every_variant() {
    let d = separable(4, 3);
    let ones = |m: &DenseMatrix| DenseMatrix::ones(m.rows(), m.cols());
    for v in ModelVariant::ALL {
        let (model, fit) = train(
            &d.x_train,
            &ones(&d.x_train),
            d.y_train.as_matrix(),
            v,
            &config(4),
        )
        .unwrap();
        let train_pred = predict(&model, &fit.state.s).unwrap();
        assert!(
            accuracy(&d.y_train, &train_pred).unwrap() >= 0.95,
            "{v} train"
        );
        let proj = transform(&model, &d.x_test, &ones(&d.x_test), 300).unwrap();
        let test_pred = predict(&model, &proj.s).unwrap();
        let acc = accuracy(&d.y_test, &test_pred).unwrap();
        assert!(acc >= 0.95, "{v} test accuracy {acc}");
    }
}

#[test]
fn single_class_always_predicts_it() {
    let d = separable(1, 5);
    let w = DenseMatrix::ones(d.x_train.rows(), d.x_train.cols());
    let (model, _) = train(
        &d.x_train,
        &w,
        d.y_train.as_matrix(),
        ModelVariant::DD,
        &config(2),
    )
    .unwrap();
    let wt = DenseMatrix::ones(d.x_test.rows(), d.x_test.cols());
    let s = transform(&model, &d.x_test, &wt, 20).unwrap().s;
    let pred = predict(&model, &s).unwrap();
    assert!(pred.labels().iter().all(|&c| c == 0));
    assert_eq!(accuracy(&d.y_test, &pred).unwrap(), 1.0);
}

#[test]
fn training_is_deterministic() {
    let d = separable(3, 8);
    let w = DenseMatrix::ones(d.x_train.rows(), d.x_train.cols());
    let a = train(
        &d.x_train,
        &w,
        d.y_train.as_matrix(),
        ModelVariant::FD,
        &config(3),
    )
    .unwrap();
    let b = train(
        &d.x_train,
        &w,
        d.y_train.as_matrix(),
        ModelVariant::FD,
        &config(3),
    )
    .unwrap();
    assert_eq!(a.0, b.0);
    assert_eq!(a.1, b.1);
}

fn fixed_model(a: DenseMatrix, k: usize, variant: ModelVariant) -> ClassifierModel {
    let r = a.cols();
    ClassifierModel {
        a_train: a,
        b_train: DenseMatrix::ones(k, r),
        variant,
        config: SsnmfConfig {
            rank: r,
            eps: 1e-14,
            ..Default::default()
        },
    }
}

#[test]
fn transform_recovers_rank_one_codes() {
    let a = DenseMatrix::from_rows(&[vec![0.5], vec![1.0], vec![2.0]]).unwrap();
    let s_true = DenseMatrix::from_rows(&[vec![0.3, 1.7, 4.0]]).unwrap();
    let x = matmul(&a, &s_true).unwrap();
    let w = DenseMatrix::ones(3, 3);
    for variant in [ModelVariant::FF, ModelVariant::DD] {
        let s = transform(&fixed_model(a.clone(), 1, variant), &x, &w, 500)
            .unwrap()
            .s;
        for j in 0..3 {
            let rel = (s.get(0, j) - s_true.get(0, j)).abs() / s_true.get(0, j);
            assert!(rel < 1e-4, "{variant} column {j}: {rel}");
        }
    }
}

#[test]
fn transform_error_is_monotone_and_nonnegative() {
    let d = separable(3, 11);
    for variant in ModelVariant::ALL {
        let w = DenseMatrix::ones(d.x_train.rows(), d.x_train.cols());
        let (model, _) = train(&d.x_train, &w, d.y_train.as_matrix(), variant, &config(3)).unwrap();
        let mut wt = DenseMatrix::ones(d.x_test.rows(), d.x_test.cols());
        wt.set(0, 0, 0.0);
        wt.set(3, 5, 0.0);
        let proj = transform(&model, &d.x_test, &wt, 100).unwrap();
        assert!(proj.s.as_slice().iter().all(|&v| v >= 0.0));
        for pair in proj.trace.windows(2) {
            assert!(
                pair[1] <= pair[0] + 1e-9 * pair[0].abs(),
                "{variant}: {pair:?}"
            );
        }
    }
}

#[test]
fn transform_leaves_unobserved_columns_alone() {
    let d = separable(2, 2);
    let w = DenseMatrix::ones(d.x_train.rows(), d.x_train.cols());
    let (model, _) = train(
        &d.x_train,
        &w,
        d.y_train.as_matrix(),
        ModelVariant::FF,
        &config(2),
    )
    .unwrap();
    let zero = DenseMatrix::zeros(d.x_test.rows(), d.x_test.cols());
    let once = transform(&model, &d.x_test, &zero, 1).unwrap().s;
    let many = transform(&model, &d.x_test, &zero, 50).unwrap().s;
    assert!(once.max_abs_diff(&many) < 1e-12);
    assert!(once.as_slice().iter().all(|&v| (0.01..1.01).contains(&v)));
}

#[test]
fn transform_rejects_wrong_feature_count() {
    let model = fixed_model(DenseMatrix::ones(3, 1), 1, ModelVariant::FF);
    let x = DenseMatrix::ones(4, 2);
    assert!(transform(&model, &x, &x, 5).is_err());
}

#[test]
fn predictions_ignore_positive_column_scaling() {
    let model = fixed_model(DenseMatrix::ones(2, 3), 3, ModelVariant::FF);
    let model = ClassifierModel {
        b_train: DenseMatrix::identity(3),
        ..model
    };
    let s = DenseMatrix::from_rows(&[
        vec![0.1, 0.0, 2.0, 0.3],
        vec![0.9, 0.2, 1.0, 0.3],
        vec![0.0, 0.1, 0.5, 0.2],
    ])
    .unwrap();
    let base = predict(&model, &s).unwrap();
    assert_eq!(base, label(&s));
    let mut scaled = s.clone();
    for (j, c) in [3.0, 0.01, 7.5, 100.0].iter().enumerate() {
        for i in 0..3 {
            scaled.set(i, j, s.get(i, j) * c);
        }
    }
    assert_eq!(predict(&model, &scaled).unwrap(), base);
}

#[test]
fn model_round_trips_through_a_directory() {
    let d = separable(2, 4);
    let w = DenseMatrix::ones(d.x_train.rows(), d.x_train.cols());
    let (model, _) = train(
        &d.x_train,
        &w,
        d.y_train.as_matrix(),
        ModelVariant::DF,
        &config(2),
    )
    .unwrap();
    let dir = tempfile::tempdir().unwrap();
    model.save(dir.path(), Some("vocab.txt".into())).unwrap();
    let (back, manifest) = ClassifierModel::load(dir.path()).unwrap();
    assert_eq!(back, model);
    assert_eq!(
        manifest.vocabulary.as_deref(),
        Some(std::path::Path::new("vocab.txt"))
    );
}
