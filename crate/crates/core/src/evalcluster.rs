//! Scoring learned topics against known document subgroups.
//!
//! A representation `S` (topics × documents) is turned into a hard
//! assignment (each document to its strongest topic) or a soft one (each
//! document's column normalized to a distribution). For every topic the
//! score `P` is the largest fraction of a single subgroup's documents that
//! the topic captures.

use serde::{Deserialize, Serialize};

use crate::classify::label;
use crate::error::{Result, SsnmfError};
use crate::matrix::DenseMatrix;
use crate::textprep::Vocabulary;

/// Subgroup indicator matrix (subgroups × documents), one-hot columns.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruth {
    m: DenseMatrix,
}

impl GroundTruth {
    pub fn from_labels(subgroups: &[usize], count: usize) -> Result<Self> {
        let m = crate::classify::LabelMatrix::from_labels(subgroups, count)?.into_matrix();
        Ok(GroundTruth { m })
    }

    /// Wraps a matrix after checking that it is binary with one-hot columns.
    pub fn from_matrix(m: DenseMatrix) -> Result<Self> {
        let m = crate::classify::LabelMatrix::from_matrix(m)
            .map_err(|_| SsnmfError::Eval("ground truth columns must be one-hot".into()))?
            .into_matrix();
        Ok(GroundTruth { m })
    }

    pub fn matrix(&self) -> &DenseMatrix {
        &self.m
    }

    pub fn num_subgroups(&self) -> usize {
        self.m.rows()
    }

    pub fn num_documents(&self) -> usize {
        self.m.cols()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AssignMode {
    Hard,
    Soft,
}

/// Each column's largest entry set to 1, the rest to 0 (ties to the lowest
/// row).
pub fn hard_assign(s: &DenseMatrix) -> DenseMatrix {
    label(s).into_matrix()
}

/// Column-normalized assignment plus the indices of all-zero columns,
/// which are left as zeros.
#[derive(Debug, Clone, PartialEq)]
pub struct SoftAssignment {
    pub matrix: DenseMatrix,
    pub zero_columns: Vec<usize>,
}

/// Each nonzero column divided by its entry sum.
pub fn soft_assign(s: &DenseMatrix) -> SoftAssignment {
    let sums = s.column_sums();
    let mut m = s.clone();
    for i in 0..m.rows() {
        for (v, &c) in m.row_mut(i).iter_mut().zip(&sums) {
            if c != 0.0 {
                *v /= c;
            }
        }
    }
    let zero_columns = sums
        .iter()
        .enumerate()
        .filter(|(_, &c)| c == 0.0)
        .map(|(j, _)| j)
        .collect();
    SoftAssignment {
        matrix: m,
        zero_columns,
    }
}

/// Best-matching subgroup `I` for one topic's assignment row and the
/// captured fraction `‖row ⊙ M_I‖₁ / ‖M_I‖₁`. Ties go to the lowest
/// subgroup index.
pub fn topic_score(s_hat_row: &[f64], truth: &GroundTruth) -> Result<(usize, f64)> {
    let m = &truth.m;
    if s_hat_row.len() != m.cols() {
        return Err(SsnmfError::Dimension {
            op: "topic score",
            left: (1, s_hat_row.len()),
            right: m.shape(),
        });
    }
    let mut best = (0, f64::NEG_INFINITY);
    for i in 0..m.rows() {
        let row = m.row(i);
        let size: f64 = row.iter().map(|v| v.abs()).sum();
        if size == 0.0 {
            return Err(SsnmfError::Eval(format!("subgroup {i} has no documents")));
        }
        let captured: f64 = row.iter().zip(s_hat_row).map(|(a, b)| (a * b).abs()).sum();
        let p = captured / size;
        if p > best.1 {
            best = (i, p);
        }
    }
    Ok(best)
}

/// Scores of every topic under the chosen assignment.
pub fn topic_scores(
    s: &DenseMatrix,
    truth: &GroundTruth,
    mode: AssignMode,
) -> Result<Vec<(usize, f64)>> {
    if s.cols() != truth.num_documents() {
        return Err(SsnmfError::Dimension {
            op: "topic scores",
            left: s.shape(),
            right: truth.m.shape(),
        });
    }
    let assigned = match mode {
        AssignMode::Hard => hard_assign(s),
        AssignMode::Soft => soft_assign(s).matrix,
    };
    (0..assigned.rows())
        .map(|l| topic_score(assigned.row(l), truth))
        .collect()
}

/// Average of `P` over all topics.
pub fn mean_score(s: &DenseMatrix, truth: &GroundTruth, mode: AssignMode) -> Result<f64> {
    let scores = topic_scores(s, truth, mode)?;
    Ok(scores.iter().map(|(_, p)| p).sum::<f64>() / scores.len() as f64)
}

/// The `count` heaviest terms of each dictionary column, heaviest first;
/// equal weights are ordered by term.
pub fn top_keywords(a: &DenseMatrix, vocab: &Vocabulary, count: usize) -> Result<Vec<Vec<String>>> {
    if a.rows() != vocab.len() {
        return Err(SsnmfError::Dimension {
            op: "top keywords",
            left: a.shape(),
            right: (vocab.len(), 1),
        });
    }
    let terms = vocab.terms();
    let mut order: Vec<usize> = (0..a.rows()).collect();
    Ok((0..a.cols())
        .map(|l| {
            order.sort_by(|&i, &j| {
                a.get(j, l)
                    .total_cmp(&a.get(i, l))
                    .then_with(|| terms[i].cmp(&terms[j]))
            });
            order
                .iter()
                .take(count)
                .map(|&i| terms[i].clone())
                .collect()
        })
        .collect())
}

/// Per-topic keywords and scores.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopicEntry {
    pub topic: usize,
    pub keywords: Vec<String>,
    pub hard: Option<TopicMatch>,
    pub soft: Option<TopicMatch>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopicMatch {
    pub subgroup: usize,
    pub subgroup_name: Option<String>,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopicReport {
    pub topics: Vec<TopicEntry>,
    pub hard_mean: Option<f64>,
    pub soft_mean: Option<f64>,
}

impl TopicReport {
    /// Keywords from `a`, and, when a representation and ground truth are
    /// given, hard and soft scores per topic.
    pub fn build(
        a: &DenseMatrix,
        vocab: &Vocabulary,
        count: usize,
        scoring: Option<(&DenseMatrix, &GroundTruth, Option<&[String]>)>,
    ) -> Result<Self> {
        let keywords = top_keywords(a, vocab, count)?;
        let (mut hard, mut soft) = (None, None);
        if let Some((s, truth, _)) = scoring {
            if s.rows() != a.cols() {
                return Err(SsnmfError::Dimension {
                    op: "topic report",
                    left: a.shape(),
                    right: s.shape(),
                });
            }
            hard = Some(topic_scores(s, truth, AssignMode::Hard)?);
            soft = Some(topic_scores(s, truth, AssignMode::Soft)?);
        }
        let names = scoring.and_then(|(_, _, n)| n);
        let to_match = |(subgroup, score): (usize, f64)| TopicMatch {
            subgroup,
            subgroup_name: names.and_then(|n| n.get(subgroup).cloned()),
            score,
        };
        let mean = |v: &Option<Vec<(usize, f64)>>| {
            v.as_ref()
                .map(|v| v.iter().map(|(_, p)| p).sum::<f64>() / v.len() as f64)
        };
        let topics = keywords
            .into_iter()
            .enumerate()
            .map(|(l, kw)| TopicEntry {
                topic: l,
                keywords: kw,
                hard: hard.as_ref().map(|h| to_match(h[l])),
                soft: soft.as_ref().map(|s| to_match(s[l])),
            })
            .collect();
        Ok(TopicReport {
            hard_mean: mean(&hard),
            soft_mean: mean(&soft),
            topics,
        })
    }

    /// Topics as rows, keywords as columns, with scores appended when known.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        for t in &self.topics {
            out.push_str(&format!(
                "topic {:>2}: {}",
                t.topic + 1,
                t.keywords.join(", ")
            ));
            if let (Some(h), Some(s)) = (&t.hard, &t.soft) {
                out.push_str(&format!("  [hard P={:.4}, soft P={:.4}", h.score, s.score));
                if let Some(name) = &h.subgroup_name {
                    out.push_str(&format!(", best subgroup {name}"));
                }
                out.push(']');
            }
            out.push('\n');
        }
        if let (Some(h), Some(s)) = (self.hard_mean, self.soft_mean) {
            out.push_str(&format!("mean P: hard {h:.4}, soft {s:.4}\n"));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[Vec<f64>]) -> DenseMatrix {
        DenseMatrix::from_rows(rows).unwrap()
    }

    #[test]
    fn hard_assign_examples() {
        let i3 = DenseMatrix::identity(3);
        assert_eq!(hard_assign(&i3), i3);
        let tied = m(&[vec![0.3], vec![0.3]]);
        assert_eq!(hard_assign(&tied), m(&[vec![1.0], vec![0.0]]));
    }

    #[test]
    fn soft_assign_examples() {
        let s = soft_assign(&m(&[vec![1.0, 0.0, 1.0], vec![3.0, 0.0, 0.0]]));
        assert_eq!(s.matrix, m(&[vec![0.25, 0.0, 1.0], vec![0.75, 0.0, 0.0]]));
        assert_eq!(s.zero_columns, vec![1]);
    }

    #[test]
    fn topic_score_examples() {
        let truth = GroundTruth::from_labels(&[0, 0, 1, 1], 2).unwrap();
        assert_eq!(
            topic_score(&[1.0, 0.0, 1.0, 0.0], &truth).unwrap(),
            (0, 0.5)
        );
        assert_eq!(
            topic_score(&[0.0, 0.0, 1.0, 1.0], &truth).unwrap(),
            (1, 1.0)
        );
        assert_eq!(topic_score(&[0.0; 4], &truth).unwrap(), (0, 0.0));
        let empty_row = GroundTruth {
            m: m(&[vec![1.0, 1.0], vec![0.0, 0.0]]),
        };
        assert!(matches!(
            topic_score(&[1.0, 0.0], &empty_row),
            Err(SsnmfError::Eval(_))
        ));
    }

    #[test]
    fn mean_score_of_truth_is_one() {
        let truth = GroundTruth::from_labels(&[0, 1, 2, 1, 0], 3).unwrap();
        let s = truth.matrix().clone();
        assert_eq!(mean_score(&s, &truth, AssignMode::Hard).unwrap(), 1.0);
        assert_eq!(mean_score(&s, &truth, AssignMode::Soft).unwrap(), 1.0);
    }

    #[test]
    fn top_keywords_orders_by_weight_then_term() {
        let vocab = Vocabulary::from_terms(
            ["apple", "god", "key", "zeta"]
                .iter()
                .map(|s| s.to_string())
                .collect(),
        )
        .unwrap();
        let a = m(&[
            vec![0.0, 0.5],
            vec![2.0, 0.5],
            vec![0.0, 0.1],
            vec![0.0, 0.9],
        ]);
        let kw = top_keywords(&a, &vocab, 4).unwrap();
        assert_eq!(kw[0][0], "god");
        assert_eq!(kw[0][1..], ["apple", "key", "zeta"]);
        assert_eq!(kw[1], ["zeta", "apple", "god", "key"]);
        assert_eq!(top_keywords(&a, &vocab, 9).unwrap()[0].len(), 4);
    }
}
