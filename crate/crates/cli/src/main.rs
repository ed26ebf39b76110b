use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use arbor::descent::decide;
use arbor::harness::{conjecture_scan, random_tuple, run_bench, GenConfig};
use arbor::schema::{parse_certificate, parse_input, CertificateJson, DecideInput, ResultKind};
use arbor::tree::PingPongConfig;
use arbor::verify::verify_certificate;
use arbor::{ArborError, Prime};
use clap::{Args, Parser, Subcommand};

const EXIT_FAILURE: u8 = 1;
const EXIT_INVALID: u8 = 2;
const EXIT_NOT_FREE: u8 = 3;

#[derive(Parser)]
#[command(name = "arbor", version, about = "Decide whether subgroups of SL2(Q) act discretely and freely on the Bruhat-Tits tree of Q_p")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Comma-separated primes for bench, scan and random.
    #[arg(long, global = true, env = "ARBOR_P", value_delimiter = ',')]
    p: Vec<u64>,
    #[arg(long, global = true, env = "ARBOR_SEED", default_value_t = 0)]
    seed: u64,
    /// Output file for decide, certify, scan and random; output directory for bench.
    #[arg(long, global = true, env = "ARBOR_OUT")]
    out: Option<PathBuf>,
    /// Largest sampling radius used when measuring axis overlaps.
    #[arg(long, global = true, env = "ARBOR_CUTOFF")]
    cutoff: Option<i64>,
    /// Require projection unions of diameter at most l - 2 instead of l - 1.
    #[arg(long, global = true, env = "ARBOR_OPEN_SEGMENT_STRICT")]
    open_segment_strict: bool,
}

impl Global {
    fn pingpong(&self) -> PingPongConfig {
        PingPongConfig {
            cutoff: self.cutoff,
            strict: self.open_segment_strict,
        }
    }

    fn primes(&self, default: &[u64]) -> anyhow::Result<Vec<Prime>> {
        let list = if self.p.is_empty() { default } else { &self.p };
        list.iter().map(|&p| Ok(Prime::new(p)?)).collect()
    }

    fn emit(&self, text: &str) -> anyhow::Result<()> {
        match &self.out {
            Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
            None => {
                io::stdout().write_all(text.as_bytes())?;
                Ok(())
            }
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run the descent on a JSON input and print a certificate.
    Decide {
        /// Input file, or `-` for stdin.
        file: PathBuf,
    },
    /// Re-check a certificate using tree geometry only.
    Certify { file: PathBuf },
    /// Time decisions on random tuples over a grid of primes and sizes.
    Bench {
        #[arg(long, env = "ARBOR_N", value_delimiter = ',', default_value = "2,3,4,5,6")]
        n: Vec<usize>,
        #[arg(long = "N", env = "ARBOR_BOUND", default_value_t = 10)]
        bound: i64,
        #[arg(long, env = "ARBOR_TRIALS", default_value_t = 50)]
        trials: u64,
    },
    /// Check that random minimal tuples contain an elliptic element or play ping-pong.
    Scan {
        #[arg(long, env = "ARBOR_N", default_value_t = 4)]
        n: usize,
        #[arg(long = "N", env = "ARBOR_BOUND", default_value_t = 10)]
        bound: i64,
        #[arg(long, env = "ARBOR_TRIALS", default_value_t = 1000)]
        trials: u64,
    },
    /// Print random decide inputs, one JSON document per line.
    Random {
        #[arg(long, env = "ARBOR_N", default_value_t = 2)]
        n: usize,
        #[arg(long = "N", env = "ARBOR_BOUND", default_value_t = 10)]
        bound: i64,
        #[arg(long, env = "ARBOR_COUNT", default_value_t = 1)]
        count: u64,
    },
}

fn read_source(path: &Path) -> anyhow::Result<String> {
    if path == Path::new("-") {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s)?;
        Ok(s)
    } else {
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
    }
}

fn json_line<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

fn cmd_decide(g: &Global, file: &Path) -> anyhow::Result<u8> {
    let input = parse_input(&read_source(file)?)?;
    let cert = decide(&input.generators, input.p)?;
    let json = CertificateJson::from(&cert);
    g.emit(&json_line(&json))?;
    Ok(match json.result {
        ResultKind::FreeDiscrete => 0,
        ResultKind::NotFreeDiscrete => EXIT_NOT_FREE,
    })
}

fn cmd_certify(g: &Global, file: &Path) -> anyhow::Result<u8> {
    let cert = parse_certificate(&read_source(file)?)?;
    let report = verify_certificate(&cert, &g.pingpong());
    g.emit(&json_line(&report))?;
    for c in report.failures() {
        eprintln!("arbor: check {} failed: {}", c.name, c.detail);
    }
    Ok(if report.ok { 0 } else { EXIT_FAILURE })
}

fn cmd_bench(g: &Global, sizes: &[usize], bound: i64, trials: u64) -> anyhow::Result<u8> {
    let primes = g.primes(&[2, 3, 5, 7, 11, 13])?;
    let grid: Vec<(Prime, usize)> = primes
        .iter()
        .flat_map(|&p| sizes.iter().map(move |&n| (p, n)))
        .collect();
    let report = run_bench(&grid, bound, trials, g.seed)?;
    let dir = g.out.clone().unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    fs::write(dir.join("trials.jsonl"), report.to_jsonl())?;
    fs::write(dir.join("summary.csv"), report.summary_csv())?;
    let table = report.table_csv();
    fs::write(dir.join("table.csv"), &table)?;
    print!("{table}");
    Ok(0)
}

fn cmd_scan(g: &Global, n: usize, bound: i64, trials: u64) -> anyhow::Result<u8> {
    let mut out = String::new();
    let mut violations = 0;
    for p in g.primes(&[5])? {
        let cfg = GenConfig::new(p, bound, n, g.seed)?;
        let report = conjecture_scan(&cfg, trials, &g.pingpong())?;
        violations += report.violations.len();
        out.push_str(&serde_json::to_string(&report)?);
        out.push('\n');
    }
    g.emit(&out)?;
    if violations > 0 {
        eprintln!("arbor: {violations} minimal tuples fail ping-pong without an elliptic element");
        return Ok(EXIT_FAILURE);
    }
    Ok(0)
}

fn cmd_random(g: &Global, n: usize, bound: i64, count: u64) -> anyhow::Result<u8> {
    let primes = g.primes(&[5])?;
    let [p] = primes[..] else {
        bail!(ArborError::Input {
            path: "--p".into(),
            message: "random takes a single prime".into(),
        });
    };
    let cfg = GenConfig::new(p, bound, n, g.seed)?;
    let mut out = String::new();
    for trial in 0..count {
        let (gens, _) = random_tuple(&cfg, trial);
        out.push_str(&serde_json::to_string(&DecideInput::new(p, gens))?);
        out.push('\n');
    }
    g.emit(&out)?;
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let g = &cli.global;
    let result = match &cli.command {
        Command::Decide { file } => cmd_decide(g, file),
        Command::Certify { file } => cmd_certify(g, file),
        Command::Bench { n, bound, trials } => cmd_bench(g, n, *bound, *trials),
        Command::Scan { n, bound, trials } => cmd_scan(g, *n, *bound, *trials),
        Command::Random { n, bound, count } => cmd_random(g, *n, *bound, *count),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            match e.downcast_ref::<ArborError>() {
                Some(ArborError::Input { path, message }) => eprintln!("arbor: invalid input at {path}: {message}"),
                _ => eprintln!("arbor: {e:#}"),
            }
            ExitCode::from(EXIT_INVALID)
        }
    }
}
