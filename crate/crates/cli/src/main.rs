use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use pit_core::algebra::{set_global_prime, Fp};
use pit_core::formula::corpus::{corpus_instance, Family};
use pit_core::formula::{json, to_hadamard_product, Circuit};
use pit_core::hadamard::{is_l_concentrated, HadamardPoly, Partition, Weighting};
use pit_core::hitgen::{self, HittingSet, Verdict};
use pit_core::oracle::{self, ProbeShape};
use pit_core::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const DEFAULT_SEED: u64 = 0x5eed;

#[derive(Parser)]
#[command(
    name = "pit",
    version,
    about = "Blackbox identity testing for set-depth formulas"
)]
struct Cli {
    /// Field characteristic (default 2^61 - 1).
    #[arg(long, global = true)]
    prime: Option<u64>,
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Worker threads for point evaluation.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether a circuit is identically zero using only its class
    /// parameters and evaluations.
    Check { circuit: PathBuf },
    /// Emit the hitting set of a class as JSON lines.
    HittingSet {
        #[arg(long)]
        class: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Rank-concentration test of a circuit's coefficients.
    Concentrate(ConcentrateArgs),
    /// Write random circuits, including zero ones, as JSON files.
    GenCorpus {
        #[arg(long, value_enum)]
        family: FamilyArg,
        #[arg(long, default_value_t = 20)]
        count: usize,
        #[arg(long, default_value = "corpus")]
        out: PathBuf,
    },
    /// Timing and size table for a generated corpus, as CSV.
    Bench {
        #[arg(long, value_enum)]
        family: FamilyArg,
        #[arg(long, default_value_t = 20)]
        count: usize,
    },
    /// Experimental: concentration of shifted products at ℓ = ⌊log₂ κ⌋ + 1.
    Probe {
        #[arg(long, value_enum, default_value = "setml3")]
        shape: ShapeArg,
        #[arg(long, default_value_t = 4)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[arg(long, default_value_t = 2)]
        lambda: usize,
        #[arg(long)]
        ell: Option<usize>,
        #[arg(long, default_value_t = 10)]
        trials: usize,
        #[arg(long)]
        unshifted: bool,
    },
}

#[derive(Args)]
struct ConcentrateArgs {
    #[arg(long)]
    circuit: PathBuf,
    #[arg(long)]
    ell: usize,
    /// Blocks of 1-based variables, e.g. "1,2/3,4". Switches to block support.
    #[arg(long)]
    block_partition: Option<String>,
    /// Use the top-level Hadamard product D instead of the circuit itself.
    #[arg(long)]
    product: bool,
    /// Translate by a random point (from --seed) first.
    #[arg(long)]
    shift: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Setml3,
    Setdepth4,
    Diagonal,
}

impl FamilyArg {
    fn family(self) -> Family {
        match self {
            FamilyArg::Setml3 => Family::Setml3,
            FamilyArg::Setdepth4 => Family::Setdepth4,
            FamilyArg::Diagonal => Family::Diagonal,
        }
    }

    fn name(self) -> &'static str {
        match self {
            FamilyArg::Setml3 => "setml3",
            FamilyArg::Setdepth4 => "setdepth4",
            FamilyArg::Diagonal => "diagonal",
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ShapeArg {
    Monomial,
    Setml3,
    Setdepth4,
}

/// Failures with their exit codes.
enum Fail {
    Input(String),
    FieldTooSmall(String),
    Other(String),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        match e {
            Error::FieldTooSmall { .. } => Fail::FieldTooSmall(e.to_string()),
            Error::SchemaError { .. }
            | Error::PartitionViolation { .. }
            | Error::InvalidPrime(_)
            | Error::NotADualForm(_)
            | Error::IndexOutsidePartition { .. }
            | Error::PreconditionViolated(_) => Fail::Input(e.to_string()),
            _ => Fail::Other(e.to_string()),
        }
    }
}

fn io_fail(path: &Path, e: std::io::Error) -> Fail {
    Fail::Input(format!("{}: {e}", path.display()))
}

fn read_json(path: &Path) -> Result<serde_json::Value, Fail> {
    let text = fs::read_to_string(path).map_err(|e| io_fail(path, e))?;
    serde_json::from_str(&text).map_err(|e| Fail::Input(format!("{}: {e}", path.display())))
}

fn read_circuit(path: &Path) -> Result<Circuit, Fail> {
    Ok(json::parse(&read_json(path)?)?)
}

/// Hitting set for the class a circuit belongs to. Only shape parameters
/// are read; the test itself is evaluation only.
fn class_hitting_set(c: &Circuit) -> Result<HittingSet, Fail> {
    Ok(match c {
        Circuit::SetDepth(f) => hitgen::hitting_set(&f.params())?,
        Circuit::Diagonal(d) => hitgen::hitting_set_diagonal(d.k(), d.n, d.power)?,
        Circuit::Dual(d) => hitgen::hitting_set_for_dual(d)?,
    })
}

fn verdict_json(v: &Verdict) -> String {
    serde_json::to_string(v).expect("verdict serializes")
}

fn check(path: &Path) -> Result<ExitCode, Fail> {
    let c = read_circuit(path)?;
    let hs = class_hitting_set(&c)?;
    let v = hitgen::test_blackbox(&c, &hs);
    if let Verdict::Nonzero { witness } = &v {
        if c.evaluate(witness).is_zero() {
            return Err(Fail::Other("witness re-evaluated to zero".into()));
        }
    }
    println!("{}", verdict_json(&v));
    Ok(if v.is_zero() {
        ExitCode::from(10)
    } else {
        ExitCode::SUCCESS
    })
}

fn hitting_set_cmd(class: &Path, out: &Path) -> Result<ExitCode, Fail> {
    let params = json::parse_params(&read_json(class)?)?;
    let hs = hitgen::hitting_set(&params)?;
    let file = fs::File::create(out).map_err(|e| io_fail(out, e))?;
    let mut w = BufWriter::new(file);
    hitgen::write_jsonl(&hs, &mut w)?;
    w.flush().map_err(|e| io_fail(out, e))?;
    eprintln!("{} points, bound {}", hs.points.len(), hs.bound);
    Ok(ExitCode::SUCCESS)
}

fn parse_partition(s: &str) -> Result<Partition, Fail> {
    let blocks = s
        .split('/')
        .map(|b| {
            b.split(',')
                .map(|v| match v.trim().parse::<usize>() {
                    Ok(i) if i >= 1 => Ok(i - 1),
                    _ => Err(Fail::Input(format!("bad variable {v:?} in partition"))),
                })
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Partition::new(blocks)?)
}

fn concentrate(a: &ConcentrateArgs, seed: u64) -> Result<ExitCode, Fail> {
    let c = read_circuit(&a.circuit)?;
    let n = c.n();
    let mut f = if a.product {
        let Circuit::SetDepth(sd) = &c else {
            return Err(Fail::Input("--product needs a set-depth circuit".into()));
        };
        let k = sd.params().k;
        to_hadamard_product(&sd.normalize_fanin(k)?)?.expand_product(n, oracle::DEFAULT_LIMIT)?
    } else {
        HadamardPoly::from_coordinates(n, &[oracle::expand(&c, oracle::DEFAULT_LIMIT)?])
    };
    if a.shift {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = pit_core::algebra::prime();
        let pt: Vec<Fp> = (0..n).map(|_| Fp::new(rng.gen_range(1..p))).collect();
        f = f.shift(&pt);
    }
    let partition = a
        .block_partition
        .as_deref()
        .map(parse_partition)
        .transpose()?;
    let mode = match &partition {
        Some(p) => Weighting::Block(p),
        None => Weighting::Support,
    };
    let r = is_l_concentrated(&f, a.ell, mode)?;
    println!(
        "{}",
        serde_json::json!({"concentrated": r.concentrated, "rank_low": r.rank_low, "rank_full": r.rank_full})
    );
    Ok(ExitCode::SUCCESS)
}

fn gen_corpus(family: FamilyArg, count: usize, out: &Path, seed: u64) -> Result<ExitCode, Fail> {
    fs::create_dir_all(out).map_err(|e| io_fail(out, e))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..count {
        let (c, zero) = corpus_instance(&mut rng, family.family(), i);
        let tag = if zero { "zero" } else { "nonzero" };
        let path = out.join(format!("{}_{i:04}_{tag}.json", family.name()));
        fs::write(&path, json::to_string(&c) + "\n").map_err(|e| io_fail(&path, e))?;
    }
    eprintln!("wrote {count} circuits to {}", out.display());
    Ok(ExitCode::SUCCESS)
}

fn bench(family: FamilyArg, count: usize, seed: u64) -> Result<ExitCode, Fail> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    println!("index,n,expected,points,bound,verdict,agree,millis");
    for i in 0..count {
        let (c, zero) = corpus_instance(&mut rng, family.family(), i);
        let start = Instant::now();
        let hs = class_hitting_set(&c)?;
        let v = hitgen::test_blackbox(&c, &hs);
        let ms = start.elapsed().as_millis();
        println!(
            "{i},{},{},{},{},{},{},{ms}",
            c.n(),
            if zero { "zero" } else { "nonzero" },
            hs.points.len(),
            hs.bound,
            if v.is_zero() { "zero" } else { "nonzero" },
            v.is_zero() == oracle::is_zero_bruteforce(&c)?,
        );
    }
    Ok(ExitCode::SUCCESS)
}

fn run(cli: Cli) -> Result<ExitCode, Fail> {
    if let Some(p) = cli.prime {
        set_global_prime(p)?;
    }
    if let Some(t) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| Fail::Other(e.to_string()))?;
    }
    match &cli.cmd {
        Command::Check { circuit } => check(circuit),
        Command::HittingSet { class, out } => hitting_set_cmd(class, out),
        Command::Concentrate(a) => concentrate(a, cli.seed),
        Command::GenCorpus { family, count, out } => gen_corpus(*family, *count, out, cli.seed),
        Command::Bench { family, count } => bench(*family, *count, cli.seed),
        Command::Probe {
            shape,
            n,
            k,
            d,
            lambda,
            ell,
            trials,
            unshifted,
        } => {
            let shape = match shape {
                ShapeArg::Monomial => ProbeShape::Monomial { n: *n },
                ShapeArg::Setml3 => ProbeShape::SetMl3 {
                    n: *n,
                    k: *k,
                    d: *d,
                },
                ShapeArg::Setdepth4 => ProbeShape::SetDepth4 {
                    n: *n,
                    k: *k,
                    d: *d,
                    lambda: *lambda,
                },
            };
            let rows = oracle::conjecture_probe(shape, *ell, !unshifted, *trials, cli.seed)?;
            print!("{}", oracle::probe_csv(&rows));
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(Fail::Input(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Fail::FieldTooSmall(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(3)
        }
        Err(Fail::Other(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
    }
}
