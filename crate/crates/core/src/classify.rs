//! Classification on top of a trained joint factorization.
//!
//! Training fits the model on labeled data. A new sample is projected onto
//! the learned dictionary by minimizing the reconstruction error over its
//! code alone, and the class is read off the supervision factor applied to
//! that code.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Result, SsnmfError};
use crate::io;
use crate::matrix::{hadamard, matmul, matmul_into, matmul_tn_into, DenseMatrix};
use crate::rng::{self, streams};
use crate::solver::{
    fit, term, uniform_positive, ErrorFunction, FitResult, ModelVariant, SsnmfConfig,
};

/// Class indicator matrix, one one-hot column per sample.
#[derive(Debug, Clone, PartialEq)]
pub struct LabelMatrix {
    matrix: DenseMatrix,
}

impl LabelMatrix {
    /// Column `j` is the basis vector for class `labels[j]`.
    pub fn from_labels(labels: &[usize], k: usize) -> Result<Self> {
        if k == 0 || labels.is_empty() {
            return Err(SsnmfError::Config(
                "label matrix needs k >= 1 and at least one sample".into(),
            ));
        }
        let mut m = DenseMatrix::zeros(k, labels.len());
        for (j, &c) in labels.iter().enumerate() {
            if c >= k {
                return Err(SsnmfError::Config(format!(
                    "class index {c} of sample {j} is out of range for k={k}"
                )));
            }
            m.set(c, j, 1.0);
        }
        Ok(LabelMatrix { matrix: m })
    }

    /// Wraps a matrix after checking that every column is one-hot.
    pub fn from_matrix(matrix: DenseMatrix) -> Result<Self> {
        for j in 0..matrix.cols() {
            let col = matrix.column(j);
            let ones = col.iter().filter(|&&v| v == 1.0).count();
            let zeros = col.iter().filter(|&&v| v == 0.0).count();
            if ones != 1 || ones + zeros != col.len() {
                return Err(SsnmfError::Config(format!("column {j} is not one-hot")));
            }
        }
        Ok(LabelMatrix { matrix })
    }

    pub fn as_matrix(&self) -> &DenseMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> DenseMatrix {
        self.matrix
    }

    pub fn k(&self) -> usize {
        self.matrix.rows()
    }

    pub fn len(&self) -> usize {
        self.matrix.cols()
    }

    pub fn is_empty(&self) -> bool {
        self.matrix.cols() == 0
    }

    /// Class index of every column.
    pub fn labels(&self) -> Vec<usize> {
        (0..self.len())
            .map(|j| {
                (0..self.k())
                    .find(|&i| self.matrix.get(i, j) == 1.0)
                    .unwrap_or(0)
            })
            .collect()
    }
}

/// The learned dictionaries, frozen after training.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassifierModel {
    pub a_train: DenseMatrix,
    pub b_train: DenseMatrix,
    pub variant: ModelVariant,
    pub config: SsnmfConfig,
}

/// JSON manifest stored next to the factor CSVs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelManifest {
    pub variant: ModelVariant,
    pub rank: usize,
    pub lambda: f64,
    pub eps: f64,
    pub seed: u64,
    pub max_iters: usize,
    pub tol: f64,
    /// Vocabulary file the feature rows refer to, if any.
    #[serde(default)]
    pub vocabulary: Option<PathBuf>,
}

impl ClassifierModel {
    pub fn rank(&self) -> usize {
        self.a_train.cols()
    }

    pub fn manifest(&self, vocabulary: Option<PathBuf>) -> ModelManifest {
        ModelManifest {
            variant: self.variant,
            rank: self.rank(),
            lambda: self.config.lambda,
            eps: self.config.eps,
            seed: self.config.seed,
            max_iters: self.config.max_iters,
            tol: self.config.tol,
            vocabulary,
        }
    }

    /// Writes `A.csv`, `B.csv` and `model.json` into `dir`, creating it.
    pub fn save(&self, dir: &Path, vocabulary: Option<PathBuf>) -> Result<()> {
        std::fs::create_dir_all(dir).map_err(|e| SsnmfError::io(dir, e))?;
        io::write_matrix(&dir.join("A.csv"), &self.a_train)?;
        io::write_matrix(&dir.join("B.csv"), &self.b_train)?;
        io::write_json(&dir.join("model.json"), &self.manifest(vocabulary))
    }

    pub fn load(dir: &Path) -> Result<(Self, ModelManifest)> {
        let manifest: ModelManifest =
            serde_json::from_str(&io::read_text(&dir.join("model.json"))?)?;
        let a_train = io::read_matrix(&dir.join("A.csv"))?;
        let b_train = io::read_matrix(&dir.join("B.csv"))?;
        a_train.check_nonnegative()?;
        b_train.check_nonnegative()?;
        if a_train.cols() != manifest.rank || b_train.cols() != manifest.rank {
            return Err(SsnmfError::Config(format!(
                "model in {} has factors of rank {} and {}, manifest says {}",
                dir.display(),
                a_train.cols(),
                b_train.cols(),
                manifest.rank
            )));
        }
        let config = SsnmfConfig {
            rank: manifest.rank,
            lambda: manifest.lambda,
            max_iters: manifest.max_iters,
            tol: manifest.tol,
            eps: manifest.eps,
            seed: manifest.seed,
        };
        let model = ClassifierModel {
            a_train,
            b_train,
            variant: manifest.variant,
            config,
        };
        Ok((model, manifest))
    }
}

/// Label mask for a possibly partially labeled `y`: a column is supervised
/// when it has any nonzero entry.
pub fn label_mask(y: &DenseMatrix) -> DenseMatrix {
    let sums = y.column_sums();
    let mut l = DenseMatrix::zeros(y.rows(), y.cols());
    for i in 0..y.rows() {
        for (v, &s) in l.row_mut(i).iter_mut().zip(&sums) {
            *v = if s > 0.0 { 1.0 } else { 0.0 };
        }
    }
    l
}

/// Fits the variant to training data. Columns of `y_train` are one-hot for
/// labeled samples and zero for unlabeled ones.
pub fn train(
    x_train: &DenseMatrix,
    w_train: &DenseMatrix,
    y_train: &DenseMatrix,
    variant: ModelVariant,
    config: &SsnmfConfig,
) -> Result<(ClassifierModel, FitResult)> {
    for j in 0..y_train.cols() {
        let col = y_train.column(j);
        let ones = col.iter().filter(|&&v| v == 1.0).count();
        let zeros = col.iter().filter(|&&v| v == 0.0).count();
        if zeros != col.len() && (ones != 1 || ones + zeros != col.len()) {
            return Err(SsnmfError::Config(format!(
                "training label column {j} is neither one-hot nor empty"
            )));
        }
    }
    let l = label_mask(y_train);
    let result = fit(variant, x_train, y_train, w_train, &l, config, None)?;
    let model = ClassifierModel {
        a_train: result.state.a.clone(),
        b_train: result.state.b.clone(),
        variant,
        config: *config,
    };
    Ok((model, result))
}

/// Code for new data under a fixed dictionary, with the trace of the
/// reconstruction error before and after every update.
#[derive(Debug, Clone, PartialEq)]
pub struct Projection {
    pub s: DenseMatrix,
    pub trace: Vec<f64>,
}

/// Projects `x_test` onto the model's dictionary with `iters` one-sided
/// multiplicative updates of the code, using the model's reconstruction
/// error. Columns whose mask is entirely zero carry no information and keep
/// their initial values.
pub fn transform(
    model: &ClassifierModel,
    x_test: &DenseMatrix,
    w_test: &DenseMatrix,
    iters: usize,
) -> Result<Projection> {
    let a = &model.a_train;
    if x_test.rows() != a.rows() {
        return Err(SsnmfError::Dimension {
            op: "transform",
            left: a.shape(),
            right: x_test.shape(),
        });
    }
    if w_test.shape() != x_test.shape() {
        return Err(SsnmfError::Dimension {
            op: "transform mask",
            left: x_test.shape(),
            right: w_test.shape(),
        });
    }
    if iters == 0 {
        return Err(SsnmfError::Config(
            "transform needs at least one iteration".into(),
        ));
    }
    x_test.check_nonnegative()?;
    w_test.check_nonnegative()?;

    let (r, n) = (a.cols(), x_test.cols());
    let eps = model.config.eps;
    let kind = model.variant.reconstruction;
    let mut rng = rng::stream(model.config.seed, streams::TRANSFORM, 0);
    let mut s = uniform_positive(r, n, &mut rng);

    let mask = (!w_test.all_equal(1.0)).then_some(w_test);
    let wx = match mask {
        Some(w) => hadamard(x_test, w)?,
        None => x_test.clone(),
    };
    let frozen: Vec<bool> = w_test.column_sums().iter().map(|&c| c == 0.0).collect();

    // Denominator of the divergence update does not depend on S.
    let mut div_den = DenseMatrix::zeros(r, n);
    if kind == ErrorFunction::Div {
        match mask {
            Some(w) => matmul_tn_into(a, w, &mut div_den),
            None => {
                let sums = a.column_sums();
                for (l, &v) in sums.iter().enumerate() {
                    div_den.row_mut(l).fill(v);
                }
            }
        }
    }

    let mut as_ = DenseMatrix::zeros(x_test.rows(), n);
    let mut scratch = DenseMatrix::zeros(x_test.rows(), n);
    let mut num = DenseMatrix::zeros(r, n);
    let mut den = DenseMatrix::zeros(r, n);
    let mut trace = Vec::with_capacity(iters + 1);
    matmul_into(a, &s, &mut as_);
    trace.push(term(kind, x_test, &as_, mask));

    for _ in 0..iters {
        match kind {
            ErrorFunction::Fro => {
                matmul_tn_into(a, &wx, &mut num);
                let model_side = match mask {
                    Some(w) => {
                        for ((o, &z), &m) in scratch
                            .as_mut_slice()
                            .iter_mut()
                            .zip(as_.as_slice())
                            .zip(w.as_slice())
                        {
                            *o = m * z;
                        }
                        &scratch
                    }
                    None => &as_,
                };
                matmul_tn_into(a, model_side, &mut den);
            }
            ErrorFunction::Div => {
                let o = scratch.as_mut_slice();
                match mask {
                    Some(w) => {
                        for (((o, &d), &z), &m) in o
                            .iter_mut()
                            .zip(wx.as_slice())
                            .zip(as_.as_slice())
                            .zip(w.as_slice())
                        {
                            *o = d / (m * z + eps) * m;
                        }
                    }
                    None => {
                        for ((o, &d), &z) in o.iter_mut().zip(wx.as_slice()).zip(as_.as_slice()) {
                            *o = d / (z + eps);
                        }
                    }
                }
                matmul_tn_into(a, &scratch, &mut num);
                den.as_mut_slice().copy_from_slice(div_den.as_slice());
            }
        }
        for l in 0..r {
            let (srow, nrow, drow) = (s.row_mut(l), num.row(l), den.row(l));
            for j in 0..n {
                if !frozen[j] {
                    srow[j] *= nrow[j] / (drow[j] + eps);
                }
            }
        }
        matmul_into(a, &s, &mut as_);
        trace.push(term(kind, x_test, &as_, mask));
    }
    Ok(Projection { s, trace })
}

/// Per column, 1 at the largest entry and 0 elsewhere; ties go to the lowest
/// row index.
pub fn label(z: &DenseMatrix) -> LabelMatrix {
    let mut out = DenseMatrix::zeros(z.rows(), z.cols());
    for j in 0..z.cols() {
        let mut best = 0;
        for i in 1..z.rows() {
            if z.get(i, j) > z.get(best, j) {
                best = i;
            }
        }
        out.set(best, j, 1.0);
    }
    LabelMatrix { matrix: out }
}

/// Class predictions `label(B S)` for codes `s_test`.
pub fn predict(model: &ClassifierModel, s_test: &DenseMatrix) -> Result<LabelMatrix> {
    Ok(label(&matmul(&model.b_train, s_test)?))
}

/// Fraction of columns whose one-hot vectors agree.
pub fn accuracy(y_true: &LabelMatrix, y_pred: &LabelMatrix) -> Result<f64> {
    let (t, p) = (y_true.as_matrix(), y_pred.as_matrix());
    if t.shape() != p.shape() {
        return Err(SsnmfError::Dimension {
            op: "accuracy",
            left: t.shape(),
            right: p.shape(),
        });
    }
    let hits = y_true
        .labels()
        .iter()
        .zip(y_pred.labels())
        .filter(|(a, b)| **a == *b)
        .count();
    Ok(hits as f64 / y_true.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[Vec<f64>]) -> DenseMatrix {
        DenseMatrix::from_rows(rows).unwrap()
    }

    #[test]
    fn label_examples() {
        let z = m(&[vec![0.2, 0.5], vec![0.7, 0.5], vec![0.1, 0.0]]);
        let y = label(&z);
        assert_eq!(y.labels(), vec![1, 0]);
        assert_eq!(label(y.as_matrix()), y);
    }

    #[test]
    fn one_hot_examples() {
        let y = LabelMatrix::from_labels(&[0, 2], 3).unwrap();
        assert_eq!(
            y.as_matrix(),
            &m(&[vec![1.0, 0.0], vec![0.0, 0.0], vec![0.0, 1.0]])
        );
        assert!(LabelMatrix::from_labels(&[3], 3).is_err());
        let single = LabelMatrix::from_labels(&[0, 0, 0], 1).unwrap();
        assert!(single.as_matrix().all_equal(1.0));
        assert!(LabelMatrix::from_matrix(m(&[vec![0.5], vec![0.5]])).is_err());
    }

    #[test]
    fn accuracy_counts_matching_columns() {
        let t = LabelMatrix::from_labels(&[0, 1, 1, 0], 2).unwrap();
        let p = LabelMatrix::from_labels(&[0, 1, 0, 0], 2).unwrap();
        assert_eq!(accuracy(&t, &p).unwrap(), 0.75);
        assert_eq!(accuracy(&t, &t).unwrap(), 1.0);
        let q = LabelMatrix::from_labels(&[1, 0, 0, 1], 2).unwrap();
        assert_eq!(accuracy(&t, &q).unwrap(), 0.0);
        let short = LabelMatrix::from_labels(&[0], 2).unwrap();
        assert!(accuracy(&t, &short).is_err());
    }

    #[test]
    fn label_mask_marks_labeled_columns() {
        let y = m(&[vec![1.0, 0.0, 0.0], vec![0.0, 0.0, 1.0]]);
        let l = label_mask(&y);
        assert_eq!(l, m(&[vec![1.0, 0.0, 1.0], vec![1.0, 0.0, 1.0]]));
    }
}
