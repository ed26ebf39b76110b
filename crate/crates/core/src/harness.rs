//! Random instances, runtime benchmarks and the minimal-tuple scanner.
//!
//! Every trial draws from its own ChaCha stream: the key is derived from the
//! configuration and seed, the stream number is the trial index. Trials can
//! therefore run in any order on any number of threads and still produce the
//! same instances.

use std::fmt::Write as _;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::descent::{decide, descend_to_minimal, is_minimal, TrackedTuple};
use crate::error::{ArborError, Result};
use crate::exact::{Mat2, Prime, Rational};
use crate::isometry::{length_from_trace, Isometry};
use crate::schema::{CertificateJson, ResultKind};
use crate::tree::{PingPongConfig, PingPongReport, Tree, Verdict};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenConfig {
    pub p: Prime,
    /// Entries and exponents are drawn from `[-bound, bound]`.
    #[serde(rename = "N")]
    pub bound: i64,
    pub n: usize,
    pub seed: u64,
}

impl GenConfig {
    pub fn new(p: Prime, bound: i64, n: usize, seed: u64) -> Result<Self> {
        if bound < 1 {
            return Err(ArborError::Input {
                path: "N".into(),
                message: format!("bound must be at least 1, got {bound}"),
            });
        }
        if !(1..=crate::descent::MAX_TUPLE).contains(&n) {
            return Err(ArborError::TupleTooLarge(n));
        }
        Ok(GenConfig { p, bound, n, seed })
    }

    /// Generator for trial number `trial`.
    pub fn rng(&self, trial: u64) -> ChaCha8Rng {
        let mut h = Sha256::new();
        h.update(b"arbor-trial");
        h.update(self.seed.to_le_bytes());
        h.update(self.p.get().to_le_bytes());
        h.update((self.n as u64).to_le_bytes());
        h.update(self.bound.to_le_bytes());
        let mut rng = ChaCha8Rng::from_seed(h.finalize().into());
        rng.set_stream(trial);
        rng
    }

    /// Upper bound on the translation length of a generated element.
    pub fn length_bound(&self) -> u64 {
        let mut log = 0u64;
        let mut power = self.p.get() as i64;
        while power <= self.bound {
            log += 1;
            power *= self.p.get() as i64;
        }
        2 * (3 * self.bound as u64 + log)
    }
}

/// A hyperbolic element `[[a pᵉ, b pᶠ], [c pᵍ, d]]` with determinant 1,
/// together with the number of rejected draws before it.
pub fn random_hyperbolic<R: Rng>(cfg: &GenConfig, rng: &mut R) -> (Isometry, u64) {
    let n = cfg.bound;
    let mut rejections = 0;
    loop {
        let [a, b, c, e, f, g] = [(); 6].map(|_| rng.gen_range(-n..=n));
        if a == 0 {
            rejections += 1;
            continue;
        }
        let p = cfg.p;
        let top_left = Rational::from_integer(a) * p.power(e);
        let top_right = Rational::from_integer(b) * p.power(f);
        let bottom_left = Rational::from_integer(c) * p.power(g);
        let d = &(Rational::one() + &top_right * &bottom_left) / &top_left;
        let m = Mat2::new(top_left, top_right, bottom_left, d);
        if length_from_trace(&m.trace(), p) == 0 {
            rejections += 1;
            continue;
        }
        let iso = Isometry::new(m, p).expect("determinant one by construction");
        return (iso, rejections);
    }
}

/// The `n` generators of trial `trial`, and the total rejection count.
pub fn random_tuple(cfg: &GenConfig, trial: u64) -> (Vec<Mat2>, u64) {
    let mut rng = cfg.rng(trial);
    let mut rejections = 0;
    let gens = (0..cfg.n)
        .map(|_| {
            let (g, r) = random_hyperbolic(cfg, &mut rng);
            rejections += r;
            g.into_matrix()
        })
        .collect();
    (gens, rejections)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub p: Prime,
    pub n: usize,
    #[serde(rename = "N")]
    pub bound: i64,
    pub seed: u64,
    pub trial: u64,
    #[serde(rename = "initial_L")]
    pub initial_l: u64,
    pub iterations: usize,
    pub result: ResultKind,
    pub wall_s: f64,
    /// SHA-256 of the certificate JSON, covering the trace and any witness.
    pub digest: String,
    pub rejections: u64,
}

pub fn run_trial(cfg: &GenConfig, trial: u64) -> Result<TrialRecord> {
    let (gens, rejections) = random_tuple(cfg, trial);
    let start = Instant::now();
    let cert = decide(&gens, cfg.p)?;
    let wall_s = start.elapsed().as_secs_f64();
    let json = CertificateJson::from(&cert);
    let bytes = serde_json::to_vec(&json).expect("certificate serializes");
    Ok(TrialRecord {
        p: cfg.p,
        n: cfg.n,
        bound: cfg.bound,
        seed: cfg.seed,
        trial,
        initial_l: cert.initial_l,
        iterations: cert.iterations(),
        result: json.result,
        wall_s,
        digest: hex::encode(Sha256::digest(&bytes)),
        rejections,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellSummary {
    pub p: Prime,
    pub n: usize,
    pub trials: usize,
    pub mean_s: f64,
    pub p50_s: f64,
    pub max_s: f64,
    pub free_count: usize,
    pub elliptic_count: usize,
}

impl CellSummary {
    fn from_records(p: Prime, n: usize, records: &[TrialRecord]) -> Self {
        let mut times: Vec<f64> = records.iter().map(|r| r.wall_s).collect();
        times.sort_by(f64::total_cmp);
        let trials = records.len();
        let mean_s = if trials == 0 { 0.0 } else { times.iter().sum::<f64>() / trials as f64 };
        let free_count = records
            .iter()
            .filter(|r| r.result == ResultKind::FreeDiscrete)
            .count();
        CellSummary {
            p,
            n,
            trials,
            mean_s,
            p50_s: times.get(trials / 2).copied().unwrap_or(0.0),
            max_s: times.last().copied().unwrap_or(0.0),
            free_count,
            elliptic_count: trials - free_count,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub bound: i64,
    pub seed: u64,
    pub records: Vec<TrialRecord>,
    pub cells: Vec<CellSummary>,
}

/// Runs `trials` decisions for each `(p, n)` cell of the grid.
pub fn run_bench(grid: &[(Prime, usize)], bound: i64, trials: u64, seed: u64) -> Result<BenchReport> {
    let mut records = Vec::new();
    let mut cells = Vec::new();
    for &(p, n) in grid {
        let cfg = GenConfig::new(p, bound, n, seed)?;
        let cell: Vec<TrialRecord> = (0..trials)
            .into_par_iter()
            .map(|t| run_trial(&cfg, t))
            .collect::<Result<_>>()?;
        cells.push(CellSummary::from_records(p, n, &cell));
        records.extend(cell);
    }
    Ok(BenchReport {
        bound,
        seed,
        records,
        cells,
    })
}

impl BenchReport {
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            out.push_str(&serde_json::to_string(r).expect("record serializes"));
            out.push('\n');
        }
        out
    }

    /// One row per cell.
    pub fn summary_csv(&self) -> String {
        let mut out = String::from("p,n,mean_s,p50_s,free_count,elliptic_count,trials,max_s\n");
        for c in &self.cells {
            let _ = writeln!(
                out,
                "{},{},{:.6},{:.6},{},{},{},{:.6}",
                c.p, c.n, c.mean_s, c.p50_s, c.free_count, c.elliptic_count, c.trials, c.max_s
            );
        }
        out
    }

    /// Mean seconds with primes as rows and tuple sizes as columns, followed
    /// by the free and elliptic counts in the same arrangement.
    pub fn table_csv(&self) -> String {
        let mut primes: Vec<Prime> = self.cells.iter().map(|c| c.p).collect();
        let mut sizes: Vec<usize> = self.cells.iter().map(|c| c.n).collect();
        primes.sort();
        primes.dedup();
        sizes.sort();
        sizes.dedup();
        let cell = |p: Prime, n: usize| self.cells.iter().find(|c| c.p == p && c.n == n);

        let mut out = String::from("p");
        for prefix in ["", "free_", "elliptic_"] {
            for n in &sizes {
                let _ = write!(out, ",{prefix}{n}");
            }
        }
        out.push('\n');
        for &p in &primes {
            let _ = write!(out, "{p}");
            for &n in &sizes {
                match cell(p, n) {
                    Some(c) => write!(out, ",{:.6}", c.mean_s),
                    None => write!(out, ","),
                }
                .expect("string write");
            }
            for &n in &sizes {
                let _ = write!(out, ",{}", cell(p, n).map_or(String::new(), |c| c.free_count.to_string()));
            }
            for &n in &sizes {
                let _ = write!(out, ",{}", cell(p, n).map_or(String::new(), |c| c.elliptic_count.to_string()));
            }
            out.push('\n');
        }
        out
    }
}

/// A minimal all-hyperbolic tuple whose axes fail ping-pong.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub config: GenConfig,
    pub trial: u64,
    pub generators: Vec<Mat2>,
    pub minimal_tuple: Vec<Mat2>,
    pub report: PingPongReport,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    pub config: GenConfig,
    pub trials: u64,
    /// Trials whose final tuple passed an independent minimality check.
    pub minimal_count: u64,
    /// Minimal tuples containing an elliptic element.
    pub elliptic_count: u64,
    pub pingpong_count: u64,
    pub indeterminate_count: u64,
    pub violations: Vec<Violation>,
    /// Trials whose tracked words no longer evaluate to their elements.
    pub word_mismatches: u64,
    pub rejections: u64,
    /// Rejected draws per accepted element.
    pub rejection_rate: f64,
}

enum ScanOutcome {
    Elliptic,
    PingPong,
    Indeterminate,
    Violation(Box<Violation>),
}

struct ScanTrial {
    outcome: ScanOutcome,
    minimal: bool,
    words_ok: bool,
    rejections: u64,
}

fn scan_trial(cfg: &GenConfig, trial: u64, pingpong: &PingPongConfig) -> Result<ScanTrial> {
    let (gens, rejections) = random_tuple(cfg, trial);
    let tuple = TrackedTuple::from_generators(gens.clone(), cfg.p)?;
    let descent = descend_to_minimal(tuple)?;
    let x = descent.tuple;
    let minimal = is_minimal(&x);
    let words_ok = x.words_consistent();
    let matrices: Vec<Mat2> = x.isometries().map(|g| g.matrix().clone()).collect();

    let outcome = if x.first_elliptic().is_some() {
        ScanOutcome::Elliptic
    } else {
        match Tree::new(cfg.p).check_pingpong(&matrices, pingpong) {
            Ok(r) if r.verdict == Verdict::Pass => ScanOutcome::PingPong,
            Ok(r) if r.verdict == Verdict::Indeterminate => ScanOutcome::Indeterminate,
            Ok(report) => ScanOutcome::Violation(Box::new(Violation {
                config: *cfg,
                trial,
                generators: gens,
                minimal_tuple: matrices,
                report,
            })),
            Err(ArborError::OverlapBeyondCutoff(_)) => ScanOutcome::Indeterminate,
            Err(e) => return Err(e),
        }
    };
    Ok(ScanTrial {
        outcome,
        minimal,
        words_ok,
        rejections,
    })
}

/// Descends random tuples to minimality and checks that each minimal tuple
/// either contains an elliptic element or plays ping-pong.
pub fn conjecture_scan(cfg: &GenConfig, trials: u64, pingpong: &PingPongConfig) -> Result<ScanReport> {
    if cfg.n < 2 {
        return Err(ArborError::Input {
            path: "n".into(),
            message: "scans need at least two generators".into(),
        });
    }
    let results: Vec<ScanTrial> = (0..trials)
        .into_par_iter()
        .map(|t| scan_trial(cfg, t, pingpong))
        .collect::<Result<_>>()?;
    let mut report = ScanReport {
        config: *cfg,
        trials,
        minimal_count: 0,
        elliptic_count: 0,
        pingpong_count: 0,
        indeterminate_count: 0,
        violations: Vec::new(),
        word_mismatches: 0,
        rejections: 0,
        rejection_rate: 0.0,
    };
    for r in results {
        report.minimal_count += r.minimal as u64;
        report.word_mismatches += !r.words_ok as u64;
        report.rejections += r.rejections;
        match r.outcome {
            ScanOutcome::Elliptic => report.elliptic_count += 1,
            ScanOutcome::PingPong => report.pingpong_count += 1,
            ScanOutcome::Indeterminate => report.indeterminate_count += 1,
            ScanOutcome::Violation(v) => report.violations.push(*v),
        }
    }
    let drawn = trials * cfg.n as u64;
    if drawn > 0 {
        report.rejection_rate = report.rejections as f64 / drawn as f64;
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(p: u64, n: usize) -> GenConfig {
        GenConfig::new(Prime::new(p).unwrap(), 10, n, 42).unwrap()
    }

    #[test]
    fn generated_elements_are_hyperbolic_and_bounded() {
        for p in [2, 3, 5, 13] {
            let c = cfg(p, 1);
            let bound = c.length_bound();
            let mut rng = c.rng(0);
            for _ in 0..200 {
                let (g, _) = random_hyperbolic(&c, &mut rng);
                assert!(g.matrix().det().is_one());
                let l = g.translation_length();
                assert!(l > 0 && l <= bound, "p = {p}: {l} > {bound}");
            }
        }
    }

    #[test]
    fn length_bound_uses_floor_log() {
        assert_eq!(cfg(2, 1).length_bound(), 2 * (30 + 3));
        assert_eq!(cfg(3, 1).length_bound(), 2 * (30 + 2));
        assert_eq!(cfg(11, 1).length_bound(), 2 * 30);
    }

    #[test]
    fn streams_are_reproducible_and_independent() {
        let c = cfg(5, 3);
        assert_eq!(random_tuple(&c, 7), random_tuple(&c, 7));
        assert_ne!(random_tuple(&c, 7).0, random_tuple(&c, 8).0);
        let other = GenConfig { seed: 43, ..c };
        assert_ne!(random_tuple(&c, 7).0, random_tuple(&other, 7).0);
    }

    #[test]
    fn bench_records_terminate_within_bound() {
        let p = Prime::new(2).unwrap();
        let report = run_bench(&[(p, 2)], 10, 10, 1).unwrap();
        assert_eq!(report.records.len(), 10);
        assert!(report.records.iter().all(|r| r.iterations as u64 <= r.initial_l));
        assert_eq!(report.to_jsonl().lines().count(), 10);
        assert_eq!(report.summary_csv().lines().count(), 2);
        let table = report.table_csv();
        assert_eq!(table.lines().next().unwrap(), "p,2,free_2,elliptic_2");
    }

    #[test]
    fn small_scan_is_clean_and_reproducible() {
        let c = cfg(3, 2);
        let a = conjecture_scan(&c, 50, &PingPongConfig::default()).unwrap();
        let b = conjecture_scan(&c, 50, &PingPongConfig::default()).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        assert!(a.violations.is_empty());
        assert_eq!(a.minimal_count, 50);
        assert_eq!(a.word_mismatches, 0);
        assert_eq!(a.elliptic_count + a.pingpong_count + a.indeterminate_count, 50);
    }
}
