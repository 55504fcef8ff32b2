//! Replays the checked-in fuzz corpora through the same properties the
//! fuzz targets assert.

use std::fs;
use std::path::PathBuf;

use focklab::symbol::{parse_affine, parse_complex, parse_radii, parse_symbol, UNIT_TOL};

fn corpus(target: &str) -> Vec<(String, String)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fuzz/corpus")
        .join(target);
    let mut out: Vec<(String, String)> = fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|entry| {
            let path = entry.unwrap().path();
            let bytes = fs::read(&path).unwrap();
            (path.display().to_string(), String::from_utf8_lossy(&bytes).into_owned())
        })
        .collect();
    out.sort();
    assert!(!out.is_empty(), "empty corpus for {target}");
    out
}

#[test]
fn symbol_corpus_round_trips() {
    let mut parsed = 0;
    for (name, text) in corpus("parse_symbol") {
        if let Ok(f) = parse_symbol(&text) {
            parsed += 1;
            let g = parse_symbol(&f.render()).unwrap_or_else(|e| panic!("{name}: {e}"));
            assert!(f.approx_eq(&g, 0.0), "{name}: {}", f.render());
        }
    }
    assert!(parsed > 10);
}

#[test]
fn complex_corpus() {
    for (_, text) in corpus("parse_complex") {
        if let Ok(c) = parse_complex(&text) {
            assert!(c.re.is_finite() && c.im.is_finite());
        }
    }
}

#[test]
fn affine_corpus() {
    let mut accepted = 0;
    for (_, text) in corpus("parse_affine") {
        if let Ok(phi) = parse_affine(&text) {
            accepted += 1;
            assert!(phi.a().norm() <= 1.0 + UNIT_TOL);
        }
    }
    assert!(accepted >= 5);
}

#[test]
fn radii_corpus() {
    for (_, text) in corpus("parse_radii") {
        if let Ok(radii) = parse_radii(&text) {
            assert!(!radii.is_empty() && radii.iter().all(|r| r.is_finite() && *r > 0.0));
        }
    }
}
