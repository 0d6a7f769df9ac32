//! Corpus ingestion: boilerplate stripping, tokenization, vocabulary
//! selection, TF-IDF matrices, one-hot labels and balanced splits.
//!
//! Matrices follow the factorization convention of one column per document
//! and one row per vocabulary term.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::path::{Path, PathBuf};
use std::sync::LazyLock;

use rand::seq::SliceRandom;
use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::classify::LabelMatrix;
use crate::error::{Result, SsnmfError};
use crate::io;
use crate::matrix::DenseMatrix;
use crate::rng::{self, streams};

const ENGLISH_STOPWORDS: &str = include_str!("../data/stopwords_en.txt");

static TOKEN: LazyLock<Regex> = LazyLock::new(|| Regex::new("[a-zA-Z]+").unwrap());
static HEADER_FIELD: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"^[A-Za-z][A-Za-z0-9-]*:").unwrap());
static QUOTE_LINE: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"(?i)(writes in|writes:|wrote:|says:|said:|^in article|^quoted from|^\s*\||^\s*>)")
        .unwrap()
});

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub text: String,
    pub class_id: usize,
    pub subgroup_id: usize,
}

/// Documents with class and subgroup ids; the names are sorted so ids are
/// stable across runs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Corpus {
    pub documents: Vec<Document>,
    pub class_names: Vec<String>,
    pub subgroup_names: Vec<String>,
}

impl Corpus {
    /// Builds a corpus from `(text, class, subgroup)` triples.
    pub fn from_named(docs: Vec<(String, String, String)>) -> Result<Self> {
        if docs.is_empty() {
            return Err(SsnmfError::Ingest("corpus has no documents".into()));
        }
        let classes: BTreeSet<&str> = docs.iter().map(|d| d.1.as_str()).collect();
        let subgroups: BTreeSet<&str> = docs.iter().map(|d| d.2.as_str()).collect();
        let class_names: Vec<String> = classes.into_iter().map(String::from).collect();
        let subgroup_names: Vec<String> = subgroups.into_iter().map(String::from).collect();
        let class_id: HashMap<&str, usize> = class_names
            .iter()
            .enumerate()
            .map(|(i, n)| (n.as_str(), i))
            .collect();
        let subgroup_id: HashMap<&str, usize> = subgroup_names
            .iter()
            .enumerate()
            .map(|(i, n)| (n.as_str(), i))
            .collect();
        let documents = docs
            .iter()
            .map(|(text, c, s)| Document {
                text: text.clone(),
                class_id: class_id[c.as_str()],
                subgroup_id: subgroup_id[s.as_str()],
            })
            .collect();
        Ok(Corpus {
            documents,
            class_names,
            subgroup_names,
        })
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    pub fn num_classes(&self) -> usize {
        self.class_names.len()
    }

    pub fn num_subgroups(&self) -> usize {
        self.subgroup_names.len()
    }
}

#[derive(Deserialize)]
struct JsonDoc {
    text: String,
    group: serde_json::Value,
    subgroup: serde_json::Value,
}

fn name_of(v: &serde_json::Value) -> Option<String> {
    match v {
        serde_json::Value::String(s) => Some(s.clone()),
        serde_json::Value::Number(n) => Some(n.to_string()),
        _ => None,
    }
}

/// One JSON object per line with `text`, `group` and `subgroup` fields.
pub fn load_jsonl(path: &Path) -> Result<Corpus> {
    let text = io::read_text(path)?;
    let mut docs = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let parse_err = |message: String| SsnmfError::Parse {
            source_name: path.display().to_string(),
            line: i + 1,
            message,
        };
        let doc: JsonDoc = serde_json::from_str(line).map_err(|e| parse_err(e.to_string()))?;
        let group =
            name_of(&doc.group).ok_or_else(|| parse_err("group must be a string".into()))?;
        let subgroup =
            name_of(&doc.subgroup).ok_or_else(|| parse_err("subgroup must be a string".into()))?;
        docs.push((doc.text, group, subgroup));
    }
    Corpus::from_named(docs)
}

fn sorted_entries(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for entry in std::fs::read_dir(dir).map_err(|e| SsnmfError::io(dir, e))? {
        out.push(entry.map_err(|e| SsnmfError::io(dir, e))?.path());
    }
    out.sort();
    Ok(out)
}

fn file_name(p: &Path) -> String {
    p.file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default()
}

/// A tree `root/class/subgroup/document`. Files are read as UTF-8 with
/// invalid bytes replaced.
pub fn load_dir(root: &Path) -> Result<Corpus> {
    let mut docs = Vec::new();
    for class_dir in sorted_entries(root)?.into_iter().filter(|p| p.is_dir()) {
        for sub_dir in sorted_entries(&class_dir)?
            .into_iter()
            .filter(|p| p.is_dir())
        {
            for file in sorted_entries(&sub_dir)?
                .into_iter()
                .filter(|p| p.is_file())
            {
                let bytes = std::fs::read(&file).map_err(|e| SsnmfError::io(&file, e))?;
                docs.push((
                    String::from_utf8_lossy(&bytes).into_owned(),
                    file_name(&class_dir),
                    file_name(&sub_dir),
                ));
            }
        }
    }
    if docs.is_empty() {
        return Err(SsnmfError::Ingest(format!(
            "no documents under {} (expected class/subgroup/file layout)",
            root.display()
        )));
    }
    Corpus::from_named(docs)
}

/// Directory tree or JSON-lines file, chosen by what `path` is.
pub fn load_corpus(path: &Path) -> Result<Corpus> {
    if path.is_dir() {
        load_dir(path)
    } else {
        load_jsonl(path)
    }
}

/// Removes message headers, signature blocks and quoted replies.
///
/// Headers are the leading `Field: value` lines up to the first blank line.
/// The signature is everything after the last line made only of dashes.
/// Quoted lines start with `>` or `|`, and attribution lines such as
/// "... writes:" are dropped too. These are heuristics.
pub fn strip_boilerplate(text: &str) -> String {
    let mut lines: Vec<&str> = text.lines().collect();
    if lines.first().is_some_and(|l| HEADER_FIELD.is_match(l)) {
        let body = lines
            .iter()
            .position(|l| l.trim().is_empty())
            .map_or(lines.len(), |p| p + 1);
        lines.drain(..body);
    }
    if let Some(sig) = lines.iter().rposition(|l| {
        let t = l.trim();
        t.len() >= 2 && t.chars().all(|c| c == '-')
    }) {
        lines.truncate(sig);
    }
    lines.retain(|l| !QUOTE_LINE.is_match(l));
    lines.join("\n")
}

/// Lowercased maximal runs of ASCII letters.
pub fn tokenize(text: &str) -> Vec<String> {
    TOKEN
        .find_iter(text)
        .map(|m| m.as_str().to_ascii_lowercase())
        .collect()
}

/// The bundled English stopword list.
pub fn english_stopwords() -> HashSet<String> {
    parse_stopwords(ENGLISH_STOPWORDS)
}

/// One word per line; blank lines and `#` comments are ignored.
pub fn parse_stopwords(text: &str) -> HashSet<String> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_lowercase)
        .collect()
}

/// Terms in lexicographic order with their document frequencies in the
/// corpus the vocabulary was built from.
#[derive(Debug, Clone, PartialEq)]
pub struct Vocabulary {
    terms: Vec<String>,
    term_index: HashMap<String, usize>,
    doc_freq: Vec<usize>,
    n_docs: usize,
}

impl Vocabulary {
    fn new(entries: Vec<(String, usize)>, n_docs: usize) -> Self {
        let term_index = entries
            .iter()
            .enumerate()
            .map(|(i, (t, _))| (t.clone(), i))
            .collect();
        let (terms, doc_freq) = entries.into_iter().unzip();
        Vocabulary {
            terms,
            term_index,
            doc_freq,
            n_docs,
        }
    }

    /// A vocabulary read back from its term list, without frequencies.
    pub fn from_terms(terms: Vec<String>) -> Result<Self> {
        if terms.is_empty() {
            return Err(SsnmfError::Ingest("vocabulary is empty".into()));
        }
        let n = terms.len();
        let v = Vocabulary::new(terms.into_iter().map(|t| (t, 0)).collect(), 0);
        if v.term_index.len() != n {
            return Err(SsnmfError::Ingest("vocabulary has duplicate terms".into()));
        }
        Ok(v)
    }

    pub fn parse(text: &str) -> Result<Self> {
        Self::from_terms(
            text.lines()
                .map(str::trim)
                .filter(|l| !l.is_empty())
                .map(String::from)
                .collect(),
        )
    }

    /// One term per line, in row order.
    pub fn to_text(&self) -> String {
        let mut out = self.terms.join("\n");
        out.push('\n');
        out
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    pub fn index(&self, term: &str) -> Option<usize> {
        self.term_index.get(term).copied()
    }

    pub fn doc_freq(&self) -> &[usize] {
        &self.doc_freq
    }

    pub fn n_docs(&self) -> usize {
        self.n_docs
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VocabConfig {
    pub min_df: usize,
    pub max_df_ratio: f64,
    /// `None` keeps every term that passes the frequency filters.
    pub max_size: Option<usize>,
}

impl Default for VocabConfig {
    fn default() -> Self {
        VocabConfig {
            min_df: 5,
            max_df_ratio: 0.7,
            max_size: Some(5000),
        }
    }
}

/// Selects terms from tokenized documents: drops stopwords and terms in
/// fewer than `min_df` or more than `max_df_ratio·n` documents, then keeps
/// the `max_size` most frequent overall (ties lexicographic).
pub fn build_vocabulary(
    docs: &[Vec<String>],
    stopwords: &HashSet<String>,
    config: &VocabConfig,
) -> Result<Vocabulary> {
    if config.min_df == 0 {
        return Err(SsnmfError::Config("min_df must be >= 1".into()));
    }
    if !(config.max_df_ratio > 0.0 && config.max_df_ratio <= 1.0) {
        return Err(SsnmfError::Config(format!(
            "max_df_ratio must be in (0, 1], got {}",
            config.max_df_ratio
        )));
    }
    let mut df: HashMap<&str, usize> = HashMap::new();
    let mut total: HashMap<&str, usize> = HashMap::new();
    for doc in docs {
        let mut seen = HashSet::new();
        for t in doc {
            if stopwords.contains(t) {
                continue;
            }
            *total.entry(t.as_str()).or_default() += 1;
            if seen.insert(t.as_str()) {
                *df.entry(t.as_str()).or_default() += 1;
            }
        }
    }
    let max_df = config.max_df_ratio * docs.len() as f64;
    let mut kept: Vec<(&str, usize)> = df
        .into_iter()
        .filter(|&(_, d)| d >= config.min_df && d as f64 <= max_df)
        .collect();
    if let Some(max) = config.max_size {
        if kept.len() > max {
            kept.sort_by(|a, b| total[b.0].cmp(&total[a.0]).then(a.0.cmp(b.0)));
            kept.truncate(max);
        }
    }
    if kept.is_empty() {
        return Err(SsnmfError::Ingest(
            "no terms survive the vocabulary filters".into(),
        ));
    }
    kept.sort_by(|a, b| a.0.cmp(b.0));
    Ok(Vocabulary::new(
        kept.into_iter().map(|(t, d)| (t.to_string(), d)).collect(),
        docs.len(),
    ))
}

/// TF-IDF matrix plus the documents left without any vocabulary term.
#[derive(Debug, Clone, PartialEq)]
pub struct Tfidf {
    pub matrix: DenseMatrix,
    pub empty_documents: Vec<usize>,
}

/// `count(t, d) · (ln((1 + n)/(1 + df(t))) + 1)` with `n` and `df` taken
/// from the vocabulary, each column scaled to unit Euclidean norm. Columns
/// of documents with no vocabulary terms stay zero.
pub fn tfidf(docs: &[Vec<String>], vocab: &Vocabulary) -> Result<Tfidf> {
    if vocab.is_empty() || docs.is_empty() {
        return Err(SsnmfError::Ingest(
            "TF-IDF needs a vocabulary and at least one document".into(),
        ));
    }
    let n = vocab.n_docs as f64;
    let idf: Vec<f64> = vocab
        .doc_freq
        .iter()
        .map(|&d| ((1.0 + n) / (1.0 + d as f64)).ln() + 1.0)
        .collect();
    let mut m = DenseMatrix::zeros(vocab.len(), docs.len());
    let mut empty = Vec::new();
    let mut counts: Vec<(usize, f64)> = Vec::new();
    for (j, doc) in docs.iter().enumerate() {
        let mut tf: HashMap<usize, f64> = HashMap::new();
        for t in doc {
            if let Some(i) = vocab.index(t) {
                *tf.entry(i).or_default() += 1.0;
            }
        }
        counts.clear();
        counts.extend(tf.into_iter().map(|(i, c)| (i, c * idf[i])));
        counts.sort_by_key(|&(i, _)| i);
        let norm = counts.iter().map(|(_, v)| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            empty.push(j);
            continue;
        }
        for &(i, v) in &counts {
            m.set(i, j, v / norm);
        }
    }
    Ok(Tfidf {
        matrix: m,
        empty_documents: empty,
    })
}

pub fn one_hot(labels: &[usize], k: usize) -> Result<LabelMatrix> {
    LabelMatrix::from_labels(labels, k)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SplitRatios {
    pub train: f64,
    pub val: f64,
    pub test: f64,
}

impl Default for SplitRatios {
    fn default() -> Self {
        SplitRatios {
            train: 0.6,
            val: 0.2,
            test: 0.2,
        }
    }
}

/// Document indices of each part, ascending.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Split {
    pub train: Vec<usize>,
    pub val: Vec<usize>,
    pub test: Vec<usize>,
}

/// Balanced split. Each class is shuffled with its own seeded stream, cut
/// to `per_class_cap` documents (or to the smallest class size when no cap
/// is given), and partitioned with floors for train and validation and the
/// remainder for test.
pub fn split(
    corpus: &Corpus,
    ratios: SplitRatios,
    per_class_cap: Option<usize>,
    seed: u64,
) -> Result<Split> {
    let parts = [ratios.train, ratios.val, ratios.test];
    if parts.iter().any(|&r| !(0.0..=1.0).contains(&r))
        || (parts.iter().sum::<f64>() - 1.0).abs() > 1e-9
    {
        return Err(SsnmfError::Config(format!(
            "split ratios must be in [0, 1] and sum to 1, got {parts:?}"
        )));
    }
    let mut by_class: Vec<Vec<usize>> = vec![Vec::new(); corpus.num_classes()];
    for (i, d) in corpus.documents.iter().enumerate() {
        by_class[d.class_id].push(i);
    }
    let smallest = by_class.iter().map(Vec::len).min().unwrap_or(0);
    let cap = per_class_cap.unwrap_or(smallest);
    let short: Vec<String> = by_class
        .iter()
        .enumerate()
        .filter(|(_, docs)| docs.len() < cap)
        .map(|(c, docs)| format!("{} ({} docs)", corpus.class_names[c], docs.len()))
        .collect();
    if !short.is_empty() {
        return Err(SsnmfError::Ingest(format!(
            "classes with fewer than {cap} documents: {}",
            short.join(", ")
        )));
    }
    let n_train = (ratios.train * cap as f64).floor() as usize;
    let n_val = ((ratios.val * cap as f64).floor() as usize).min(cap - n_train);
    let mut out = Split {
        train: Vec::new(),
        val: Vec::new(),
        test: Vec::new(),
    };
    for (c, mut docs) in by_class.into_iter().enumerate() {
        docs.shuffle(&mut rng::stream(seed, streams::SPLIT, c as u64));
        docs.truncate(cap);
        out.train.extend_from_slice(&docs[..n_train]);
        out.val.extend_from_slice(&docs[n_train..n_train + n_val]);
        out.test.extend_from_slice(&docs[n_train + n_val..]);
    }
    out.train.sort_unstable();
    out.val.sort_unstable();
    out.test.sort_unstable();
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PrepConfig {
    pub vocab: VocabConfig,
    pub ratios: SplitRatios,
    pub per_class_cap: Option<usize>,
    pub seed: u64,
    pub strip_boilerplate: bool,
    /// Stopword file replacing the bundled English list.
    pub stopwords: Option<PathBuf>,
}

impl Default for PrepConfig {
    fn default() -> Self {
        PrepConfig {
            vocab: VocabConfig::default(),
            ratios: SplitRatios::default(),
            per_class_cap: None,
            seed: 0,
            strip_boilerplate: true,
            stopwords: None,
        }
    }
}

/// One part of a prepared split.
#[derive(Debug, Clone, PartialEq)]
pub struct PreparedPart {
    pub doc_indices: Vec<usize>,
    pub tfidf: Tfidf,
    pub labels: Vec<usize>,
    pub subgroups: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Prepared {
    pub vocab: Vocabulary,
    pub train: PreparedPart,
    pub val: Option<PreparedPart>,
    pub test: Option<PreparedPart>,
}

/// Splits the corpus, builds the vocabulary and IDF weights on the training
/// part, and vectorizes every part with them.
pub fn prepare(corpus: &Corpus, config: &PrepConfig) -> Result<Prepared> {
    let stopwords = match &config.stopwords {
        Some(p) => parse_stopwords(&io::read_text(p)?),
        None => english_stopwords(),
    };
    let parts = split(corpus, config.ratios, config.per_class_cap, config.seed)?;
    if parts.train.is_empty() {
        return Err(SsnmfError::Ingest("training split is empty".into()));
    }
    let tokens: Vec<Vec<String>> = corpus
        .documents
        .iter()
        .map(|d| {
            if config.strip_boilerplate {
                tokenize(&strip_boilerplate(&d.text))
            } else {
                tokenize(&d.text)
            }
        })
        .collect();
    let pick =
        |idx: &[usize]| -> Vec<Vec<String>> { idx.iter().map(|&i| tokens[i].clone()).collect() };
    let vocab = build_vocabulary(&pick(&parts.train), &stopwords, &config.vocab)?;
    let part = |idx: Vec<usize>| -> Result<Option<PreparedPart>> {
        if idx.is_empty() {
            return Ok(None);
        }
        let tfidf = tfidf(&pick(&idx), &vocab)?;
        Ok(Some(PreparedPart {
            labels: idx.iter().map(|&i| corpus.documents[i].class_id).collect(),
            subgroups: idx
                .iter()
                .map(|&i| corpus.documents[i].subgroup_id)
                .collect(),
            doc_indices: idx,
            tfidf,
        }))
    };
    let train = part(parts.train)?.expect("checked non-empty");
    let val = part(parts.val)?;
    let test = part(parts.test)?;
    Ok(Prepared {
        vocab,
        train,
        val,
        test,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(docs: &[&str]) -> Vec<Vec<String>> {
        docs.iter().map(|d| tokenize(d)).collect()
    }

    #[test]
    fn tokenize_examples() {
        assert_eq!(tokenize("Mac's X11!"), vec!["mac", "s", "x"]);
        assert!(tokenize("").is_empty());
        assert_eq!(tokenize("don't stop"), vec!["don", "t", "stop"]);
        let once = tokenize("Héllo wörld 42 ok");
        assert_eq!(tokenize(&once.join(" ")), once);
    }

    #[test]
    fn vocabulary_filters() {
        let docs = toks(&["the cat", "the dog", "the cat sat"]);
        let none = HashSet::new();
        let all = VocabConfig {
            min_df: 1,
            max_df_ratio: 1.0,
            max_size: None,
        };
        let v = build_vocabulary(&docs, &none, &all).unwrap();
        assert_eq!(v.terms(), &["cat", "dog", "sat", "the"]);
        let capped = VocabConfig {
            max_df_ratio: 0.7,
            ..all
        };
        let v = build_vocabulary(&docs, &none, &capped).unwrap();
        assert!(v.index("the").is_none());
        let sw = english_stopwords();
        assert!(sw.contains("the") && sw.contains("wouldn"));
        let v = build_vocabulary(&docs, &sw, &all).unwrap();
        assert!(v.index("the").is_none());
        let top = VocabConfig {
            max_size: Some(2),
            ..all
        };
        // "the" (3) and "cat" (2) are the most frequent
        let v = build_vocabulary(&docs, &none, &top).unwrap();
        assert_eq!(v.terms(), &["cat", "the"]);
        let strict = VocabConfig { min_df: 9, ..all };
        assert!(build_vocabulary(&docs, &none, &strict).is_err());
    }

    #[test]
    fn tfidf_examples() {
        let docs = toks(&["a a b"]);
        let v = build_vocabulary(
            &docs,
            &HashSet::new(),
            &VocabConfig {
                min_df: 1,
                max_df_ratio: 1.0,
                max_size: None,
            },
        )
        .unwrap();
        let t = tfidf(&docs, &v).unwrap();
        let r5 = 5f64.sqrt();
        assert!((t.matrix.get(0, 0) - 2.0 / r5).abs() < 1e-15);
        assert!((t.matrix.get(1, 0) - 1.0 / r5).abs() < 1e-15);
        let other = tfidf(&toks(&["b", "zzz"]), &v).unwrap();
        assert_eq!(other.matrix.get(0, 0), 0.0);
        assert_eq!(other.empty_documents, vec![1]);
    }

    #[test]
    fn tfidf_columns_have_unit_norm() {
        let docs = toks(&["alpha beta beta", "beta gamma", "gamma gamma alpha delta"]);
        let cfg = VocabConfig {
            min_df: 1,
            max_df_ratio: 1.0,
            max_size: None,
        };
        let v = build_vocabulary(&docs, &HashSet::new(), &cfg).unwrap();
        let t = tfidf(&docs, &v).unwrap();
        for j in 0..3 {
            let n: f64 = t.matrix.column(j).iter().map(|x| x * x).sum::<f64>().sqrt();
            assert!((n - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn one_hot_examples() {
        let y = one_hot(&[0, 2], 3).unwrap();
        assert_eq!(y.labels(), vec![0, 2]);
        assert!(one_hot(&[0, 1], 1).is_err());
    }

    fn synthetic_corpus(per_class: usize, classes: usize) -> Corpus {
        let mut docs = Vec::new();
        for c in 0..classes {
            for i in 0..per_class {
                docs.push((format!("doc {i}"), format!("class{c}"), format!("sub{c}")));
            }
        }
        Corpus::from_named(docs).unwrap()
    }

    #[test]
    fn split_sizes_and_determinism() {
        let corpus = synthetic_corpus(1796, 5);
        let s = split(&corpus, SplitRatios::default(), Some(1796), 4).unwrap();
        assert_eq!(
            (s.train.len(), s.val.len(), s.test.len()),
            (5 * 1077, 5 * 359, 5 * 360)
        );
        assert_eq!(
            s,
            split(&corpus, SplitRatios::default(), Some(1796), 4).unwrap()
        );
        assert_ne!(
            s,
            split(&corpus, SplitRatios::default(), Some(1796), 5).unwrap()
        );
        let all = SplitRatios {
            train: 1.0,
            val: 0.0,
            test: 0.0,
        };
        let s = split(&corpus, all, None, 0).unwrap();
        assert_eq!(s.train.len(), corpus.len());
        let err = split(&corpus, SplitRatios::default(), Some(2000), 0).unwrap_err();
        assert!(err.to_string().contains("class0"));
    }

    #[test]
    fn boilerplate_is_stripped() {
        let msg = "From: someone@example.com\nSubject: hello\n\nIn article <1@x>, bob writes:\n> quoted text\nreal body line\n--\nBob, signature";
        let out = strip_boilerplate(msg);
        assert_eq!(out, "real body line");
        assert_eq!(
            strip_boilerplate("no header here\nbody"),
            "no header here\nbody"
        );
    }
}
