#![allow(dead_code)]

use std::path::PathBuf;

use qknot::{Laurent, Mosaic, PlanarDiagram};
use serde_json::Value;

pub fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

/// Corpus diagram names, sorted.
pub fn pd_names() -> Vec<String> {
    let mut names: Vec<String> = std::fs::read_dir(corpus_dir().join("pd"))
        .expect("corpus/pd exists")
        .filter_map(|e| {
            let name = e.ok()?.file_name().into_string().ok()?;
            name.strip_suffix(".pd.json").map(str::to_string)
        })
        .collect();
    names.sort();
    names
}

pub fn pd(name: &str) -> PlanarDiagram {
    let text = std::fs::read_to_string(corpus_dir().join("pd").join(format!("{name}.pd.json")))
        .unwrap_or_else(|e| panic!("{name}: {e}"));
    PlanarDiagram::from_json(&text).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn corpus() -> Vec<(String, PlanarDiagram)> {
    pd_names().into_iter().map(|n| {
        let d = pd(&n);
        (n, d)
    }).collect()
}

pub fn golden(name: &str) -> Value {
    let text = std::fs::read_to_string(corpus_dir().join("golden").join(format!("{name}.json")))
        .unwrap_or_else(|e| panic!("{name}: {e}"));
    serde_json::from_str(&text).unwrap()
}

pub fn golden_poly(name: &str, key: &str) -> Laurent {
    Laurent::from_json(&golden(name)[key].to_string()).unwrap()
}

pub fn mosaic(name: &str) -> Mosaic {
    let text = std::fs::read_to_string(corpus_dir().join("mosaic").join(format!("{name}.mosaic"))).unwrap();
    Mosaic::parse(&text).unwrap()
}

pub fn moves_file() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/default.moves.json")
}

/// Copy `m` into a blank `n x n` grid at `offset`.
pub fn embed(m: &Mosaic, n: usize, offset: (usize, usize)) -> Mosaic {
    let mut out = Mosaic::blank(n);
    for r in 0..m.size() {
        for c in 0..m.size() {
            out.set(r + offset.0, c + offset.1, m.get(r, c));
        }
    }
    out
}
