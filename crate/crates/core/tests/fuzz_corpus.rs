//! Replays the checked-in fuzz corpus through the same checks as the fuzz
//! targets, so regressions surface on stable toolchains.

use std::fs;
use std::path::PathBuf;

use arbor::isometry::IsometryJson;
use arbor::schema::{parse_certificate, parse_input, parse_json};
use arbor::{Isometry, Rational};

fn seeds(target: &str) -> Vec<(String, String)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut out: Vec<_> = fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| {
            let path = e.unwrap().path();
            let text = String::from_utf8_lossy(&fs::read(&path).unwrap()).into_owned();
            (path.file_name().unwrap().to_string_lossy().into_owned(), text)
        })
        .collect();
    out.sort();
    assert!(!out.is_empty(), "no seeds for {target}");
    out
}

#[test]
fn rational_seeds() {
    let mut accepted = 0;
    for (_, s) in seeds("parse_rational") {
        if let Ok(q) = s.parse::<Rational>() {
            accepted += 1;
            let printed = q.to_string();
            assert_eq!(printed.parse::<Rational>().unwrap(), q);
        }
    }
    assert!(accepted > 0);
}

#[test]
fn input_seeds() {
    let mut accepted = 0;
    for (name, s) in seeds("parse_input") {
        match parse_input(&s) {
            Ok(input) => {
                accepted += 1;
                assert_eq!(parse_input(&serde_json::to_string(&input).unwrap()).unwrap(), input, "{name}");
            }
            Err(e) => assert!(e.to_string().contains("invalid input"), "{name}: {e}"),
        }
    }
    assert!(accepted >= 4);
}

#[test]
fn certificate_seeds() {
    for (name, s) in seeds("parse_certificate") {
        let cert = parse_certificate(&s).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_eq!(parse_certificate(&serde_json::to_string(&cert).unwrap()).unwrap(), cert);
    }
}

#[test]
fn isometry_seeds() {
    let mut valid = 0;
    for (_, s) in seeds("parse_isometry") {
        let Ok(json) = parse_json::<IsometryJson>(&s) else { continue };
        if let Ok(g) = Isometry::try_from(json) {
            valid += 1;
            assert_eq!(g.translation_length(), g.inverse().translation_length());
        }
    }
    assert_eq!(valid, 2);
}
