//! Independent verification of certificates.
//!
//! Geometry (ellipticity, hyperbolicity, ping-pong) is judged by the tree in
//! [`crate::tree`] alone. Minimality is re-checked by brute force: every move
//! is applied explicitly and `L` recomputed from scratch, without the
//! descent's cached tables.

use serde::{Deserialize, Serialize};

use crate::exact::Mat2;
use crate::isometry::length_from_trace;
use crate::schema::{CertificateJson, ResultKind, SCHEMA};
use crate::tree::{PingPongConfig, PingPongReport, Tree, Verdict};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub schema: String,
    pub ok: bool,
    pub result: ResultKind,
    pub conditional: bool,
    pub checks: Vec<Check>,
    pub pingpong: Option<PingPongReport>,
}

impl VerificationReport {
    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

struct Checks(Vec<Check>);

impl Checks {
    fn record(&mut self, name: &str, pass: bool, detail: impl Into<String>) -> bool {
        self.0.push(Check {
            name: name.to_string(),
            pass,
            detail: detail.into(),
        });
        pass
    }
}

fn length(m: &Mat2, p: crate::exact::Prime) -> u64 {
    length_from_trace(&m.trace(), p)
}

/// `L` of a tuple of determinant-1 matrices, straight from the definition.
pub fn objective(tuple: &[Mat2], p: crate::exact::Prime) -> u64 {
    let mut total: u64 = tuple.iter().map(|m| length(m, p)).sum();
    for i in 0..tuple.len() {
        for k in i + 1..tuple.len() {
            total += length(&tuple[i].mul(&tuple[k]), p);
            total += length(&tuple[i].mul(&tuple[k].adjugate()), p);
        }
    }
    total
}

/// Enumerates every move and returns the first one that lowers `L`, as
/// `(pivot, S₁ mask, S₂ mask, new L)`, 0-based.
pub fn brute_force_improvement(tuple: &[Mat2], p: crate::exact::Prime) -> Option<(usize, u32, u32, u64)> {
    let n = tuple.len();
    let current = objective(tuple, p);
    for j in 0..n {
        let gj = &tuple[j];
        let gj_inv = gj.adjugate();
        for s1 in 0u32..1 << n {
            for s2 in 0u32..1 << n {
                if (s1 | s2) >> j & 1 == 1 {
                    continue;
                }
                let moved: Vec<Mat2> = (0..n)
                    .map(|i| {
                        let mut g = tuple[i].clone();
                        if s1 >> i & 1 == 1 {
                            g = gj.mul(&g);
                        }
                        if s2 >> i & 1 == 1 {
                            g = g.mul(&gj_inv);
                        }
                        g
                    })
                    .collect();
                let l = objective(&moved, p);
                if l < current {
                    return Some((j, s1, s2, l));
                }
            }
        }
    }
    None
}

pub fn verify_certificate(cert: &CertificateJson, config: &PingPongConfig) -> VerificationReport {
    let mut checks = Checks(Vec::new());
    let p = cert.p;
    let tree = Tree::new(p);
    let gens = &cert.generators;
    let n = gens.len();
    let mut pingpong = None;

    checks.record("schema", cert.schema == SCHEMA, cert.schema.clone());
    let dets_ok = !gens.is_empty() && gens.iter().all(|g| g.det().is_one());
    checks.record("generator-determinants", dets_ok, format!("{n} generators"));
    if !dets_ok {
        return finish(cert, checks, false, None);
    }
    let initial = objective(gens, p);
    checks.record(
        "initial-objective",
        initial == cert.initial_l,
        format!("recomputed {initial}, certificate says {}", cert.initial_l),
    );
    let mut last = cert.initial_l;
    let mut decreasing = true;
    for step in &cert.trace {
        decreasing &= step.l < last && step.spec.validate(n).is_ok();
        last = step.l;
    }
    checks.record("trace-decreasing", decreasing, format!("{} steps", cert.trace.len()));

    let mut conditional = false;
    match cert.result {
        ResultKind::NotFreeDiscrete => {
            let (Some(word), Some(matrix)) = (&cert.witness_word, &cert.witness_matrix) else {
                checks.record("witness-present", false, "witness word or matrix missing");
                return finish(cert, checks, false, None);
            };
            match word.evaluate(gens) {
                Ok(m) => checks.record(
                    "witness-word-evaluation",
                    &m == matrix,
                    format!("word of length {} evaluates to {m}", word.len()),
                ),
                Err(e) => checks.record("witness-word-evaluation", false, e.to_string()),
            };
            if checks.record("witness-determinant", matrix.det().is_one(), matrix.to_string()) {
                let l = tree.oracle_translation_length(matrix);
                let fixed = tree.fixed_vertex(matrix).is_ok();
                checks.record(
                    "witness-length",
                    l == 0 && fixed,
                    format!("tree translation length {l}"),
                );
            }
        }
        ResultKind::FreeDiscrete => {
            let Some(entries) = &cert.final_tuple else {
                checks.record("final-tuple-present", false, "final tuple missing");
                return finish(cert, checks, false, None);
            };
            if !checks.record(
                "final-tuple-size",
                entries.len() == n,
                format!("{} elements for {n} generators", entries.len()),
            ) {
                return finish(cert, checks, false, None);
            }
            let mut words_ok = true;
            let mut detail = String::from("all words evaluate to their matrices");
            for (i, e) in entries.iter().enumerate() {
                if !e.word.evaluate(gens).is_ok_and(|m| m == e.matrix) {
                    words_ok = false;
                    detail = format!("word of element {} does not evaluate to its matrix", i + 1);
                    break;
                }
            }
            checks.record("final-word-evaluation", words_ok, detail);
            let tuple: Vec<Mat2> = entries.iter().map(|e| e.matrix.clone()).collect();
            if !checks.record(
                "final-determinants",
                tuple.iter().all(|m| m.det().is_one()),
                "",
            ) {
                return finish(cert, checks, false, None);
            }
            let lengths: Vec<u64> = tuple.iter().map(|m| tree.oracle_translation_length(m)).collect();
            let hyperbolic = lengths.iter().all(|&l| l > 0);
            checks.record("final-hyperbolic", hyperbolic, format!("tree lengths {lengths:?}"));
            let final_l = objective(&tuple, p);
            let claimed = cert.trace.last().map_or(cert.initial_l, |s| s.l);
            checks.record(
                "final-objective",
                claimed == final_l,
                format!("recomputed {final_l}, certificate ends at {claimed}"),
            );
            match brute_force_improvement(&tuple, p) {
                None => checks.record("minimality", true, format!("no move lowers L = {final_l}")),
                Some((j, s1, s2, l)) => checks.record(
                    "minimality",
                    false,
                    format!("pivot {} with masks {s1:#b}/{s2:#b} lowers L to {l}", j + 1),
                ),
            };
            if hyperbolic {
                match tree.check_pingpong(&tuple, config) {
                    Ok(report) => {
                        let pass = report.verdict == Verdict::Pass;
                        let detail = match report.verdict {
                            Verdict::Pass if n > 3 => {
                                conditional = true;
                                "axes satisfy ping-pong; freeness for n > 3 assumes minimal tuples play ping-pong".to_string()
                            }
                            Verdict::Pass => "axes satisfy ping-pong".to_string(),
                            Verdict::Fail => "AXES FAIL PING-PONG ON A MINIMAL HYPERBOLIC TUPLE".to_string(),
                            Verdict::Indeterminate => format!(
                                "axis overlap not resolved within cutoff {}",
                                report.cutoff
                            ),
                        };
                        checks.record("pingpong", pass, detail);
                        pingpong = Some(report);
                    }
                    Err(e) => {
                        checks.record("pingpong", false, e.to_string());
                    }
                }
            }
        }
    }
    let ok = checks.0.iter().all(|c| c.pass);
    finish(cert, checks, conditional && ok, pingpong)
}

fn finish(
    cert: &CertificateJson,
    checks: Checks,
    conditional: bool,
    pingpong: Option<PingPongReport>,
) -> VerificationReport {
    VerificationReport {
        schema: SCHEMA.to_string(),
        ok: checks.0.iter().all(|c| c.pass),
        result: cert.result,
        conditional,
        checks: checks.0,
        pingpong,
    }
}
