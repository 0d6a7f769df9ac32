#![allow(dead_code)]

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use ssnmf::io::{write_labels, write_matrix};
use ssnmf::DenseMatrix;

pub fn ssnmf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ssnmf"))
        .args(args)
        .output()
        .expect("binary runs")
}

pub fn code(out: &Output) -> i32 {
    out.status.code().unwrap_or(-1)
}

pub fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

pub fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

pub fn path_str(p: &Path) -> &str {
    p.to_str().expect("utf-8 temp path")
}

pub fn put_matrix(dir: &Path, name: &str, m: &DenseMatrix) -> PathBuf {
    let p = dir.join(name);
    write_matrix(&p, m).unwrap();
    p
}

pub fn put_labels(dir: &Path, name: &str, labels: &[usize]) -> PathBuf {
    let p = dir.join(name);
    write_labels(&p, labels).unwrap();
    p
}

pub fn put_text(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

pub fn read(p: &Path) -> Vec<u8> {
    fs::read(p).unwrap_or_else(|e| panic!("{}: {e}", p.display()))
}

/// Deterministic positive matrix with a low-rank structure plus a ripple.
pub fn smooth_matrix(rows: usize, cols: usize, rank: usize) -> DenseMatrix {
    let mut m = DenseMatrix::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            let mut v = 0.0;
            for q in 0..rank {
                v +=
                    (1.0 + ((i * (q + 2) + q) % 5) as f64) * (1.0 + ((j * (q + 3) + 1) % 4) as f64);
            }
            m.set(i, j, v + 0.1 * ((i + 2 * j) % 3) as f64);
        }
    }
    m
}

/// Three-class corpus as JSON lines: each class has its own word pool.
pub fn tiny_corpus(per_class: usize) -> String {
    let pools = [
        ["orbit", "launch", "rocket", "moon", "nasa"],
        ["engine", "wheel", "brake", "dealer", "sedan"],
        ["pitcher", "inning", "umpire", "homer", "glove"],
    ];
    let mut out = String::new();
    for (c, pool) in pools.iter().enumerate() {
        for d in 0..per_class {
            let words: Vec<&str> = (0..6)
                .map(|t| pool[(d + t * (c + 2)) % pool.len()])
                .collect();
            out.push_str(&format!(
                "{{\"text\": \"{}\", \"group\": \"g{c}\", \"subgroup\": \"s{c}{}\"}}\n",
                words.join(" "),
                d % 2
            ));
        }
    }
    out
}
