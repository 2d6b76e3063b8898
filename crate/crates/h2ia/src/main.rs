//! Command-line surface over the verification harness.

use clap::{Parser, Subcommand};
use h2ia::alphabet::{AutWord, IAWord};
use h2ia::certs;
use h2ia::harness::{RunOptions, SuiteId};
use h2ia::homlin;
use h2ia::johnson;
use h2ia::rewrite::Certificate;
use h2ia::theta::ThetaTable;
use serde::Serialize;
use std::error::Error;
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "h2ia",
    version,
    about = "Verification engine for a finite presentation of the Torelli subgroup of Aut(F_n)"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run verification suites; exit 0 only if every case passes.
    Verify {
        /// relators | theta | hrel | tau | kernel | stability |
        /// coinvariants | certs | all
        #[arg(long, default_value = "all")]
        suite: String,
        /// Pool size / rank override; each suite has its own default.
        #[arg(long)]
        rank: Option<u32>,
        /// Seed for randomized cases.
        #[arg(long)]
        seed: Option<u64>,
        /// Write the full JSON-lines report here.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Directory of additional certificates for the certs suite.
        #[arg(long)]
        certs_dir: Option<PathBuf>,
    },
    /// Print the basis images of a word given as a JSON letters file.
    Eval {
        #[arg(long)]
        word: PathBuf,
        /// Interpret the file as an ambient automorphism word.
        #[arg(long)]
        aut: bool,
    },
    /// Replay a reduction certificate and report the verdict.
    Reduce {
        #[arg(long)]
        cert: PathBuf,
        /// Write the intermediate words as JSON lines.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Johnson image of a word, as sparse wedge coordinates.
    Tau {
        #[arg(long)]
        word: PathBuf,
    },
    /// Kernel lattice of the labeled relation matrix.
    Kernel {
        /// Also print the matrix rows.
        #[arg(long)]
        print_matrix: bool,
    },
    /// Substitution rule table.
    Theta {
        /// Dump the rules as JSON.
        #[arg(long)]
        dump: bool,
    },
}

/// Writes one line to stdout; a closed pipe ends the process quietly.
fn emit(args: fmt::Arguments) {
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    if writeln!(lock, "{}", args).is_err() {
        std::process::exit(0);
    }
}

macro_rules! say {
    ($($arg:tt)*) => { emit(format_args!($($arg)*)) };
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {}", e);
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<bool, Box<dyn Error>> {
    match cli.cmd {
        Cmd::Verify {
            suite,
            rank,
            seed,
            report,
            certs_dir,
        } => verify(&suite, rank, seed, report, certs_dir),
        Cmd::Eval { word, aut } => eval_word(&word, aut),
        Cmd::Reduce { cert, trace } => reduce(&cert, trace),
        Cmd::Tau { word } => tau_word(&word),
        Cmd::Kernel { print_matrix } => kernel(print_matrix),
        Cmd::Theta { dump } => theta(dump),
    }
}

fn verify(
    suite: &str,
    rank: Option<u32>,
    seed: Option<u64>,
    report: Option<PathBuf>,
    certs_dir: Option<PathBuf>,
) -> Result<bool, Box<dyn Error>> {
    let ids: Vec<SuiteId> = if suite == "all" {
        SuiteId::ALL.to_vec()
    } else {
        vec![SuiteId::from_name(suite)
            .ok_or_else(|| format!("unknown suite '{}'; see --help for the list", suite))?]
    };
    let opts = RunOptions {
        rank,
        seed,
        cert_dir: certs_dir,
    };
    let mut all_reports = Vec::new();
    let mut failures = 0usize;
    for id in ids {
        for rep in h2ia::harness::run_suite(id, &opts) {
            say!("{}", rep.summary_line());
            failures += rep.failures();
            all_reports.push(rep);
        }
    }
    if let Some(path) = report {
        let mut file = fs::File::create(&path)?;
        for rep in &all_reports {
            rep.write_jsonl(&mut file)?;
        }
        file.flush()?;
        say!("report written to {}", path.display());
    }
    if failures > 0 {
        say!("{} case(s) failed", failures);
    }
    Ok(failures == 0)
}

#[derive(Serialize)]
struct EvalOutput {
    rank: usize,
    ia: bool,
    images: Vec<h2ia::words::FreeWord>,
}

fn eval_word(path: &PathBuf, aut: bool) -> Result<bool, Box<dyn Error>> {
    let text = fs::read_to_string(path)?;
    let f = if aut {
        let w: AutWord = serde_json::from_str(&text)?;
        let n = w.max_index().max(2) as usize;
        w.eval(n)
    } else {
        let w: IAWord = serde_json::from_str(&text)?;
        let n = w.max_index().max(2) as usize;
        w.eval(n)
    };
    let n = f.rank();
    let out = EvalOutput {
        rank: n,
        ia: f.is_ia(),
        images: (1..=n).map(|i| f.image(i).clone()).collect(),
    };
    say!("{}", serde_json::to_string_pretty(&out)?);
    Ok(true)
}

#[derive(Serialize)]
struct ReduceOutput {
    steps: usize,
    final_length: usize,
    final_word: IAWord,
    reduces_to_identity: bool,
    invariant_ok: bool,
}

fn reduce(path: &PathBuf, trace: Option<PathBuf>) -> Result<bool, Box<dyn Error>> {
    let text = fs::read_to_string(path)?;
    let cert = Certificate::from_json(&text)?;
    let registry = certs::standard_registry();
    let replay = match cert.replay(&registry) {
        Ok(r) => r,
        Err(e) => {
            say!("replay failed: {}", e);
            return Ok(false);
        }
    };
    if let Some(tpath) = trace {
        let mut file = fs::File::create(&tpath)?;
        for word in &replay.trace {
            writeln!(file, "{}", serde_json::to_string(word)?)?;
        }
    }
    let verdict = replay.reduces_to_identity && replay.invariant_ok;
    let out = ReduceOutput {
        steps: replay.trace.len(),
        final_length: replay.final_word.len(),
        final_word: replay.final_word,
        reduces_to_identity: replay.reduces_to_identity,
        invariant_ok: replay.invariant_ok,
    };
    say!("{}", serde_json::to_string_pretty(&out)?);
    Ok(verdict)
}

#[derive(Serialize)]
struct TauOutput {
    rank: usize,
    entries: Vec<(usize, usize, usize, i64)>,
}

fn tau_word(path: &PathBuf) -> Result<bool, Box<dyn Error>> {
    let text = fs::read_to_string(path)?;
    let w: IAWord = serde_json::from_str(&text)?;
    let n = w.max_index().max(2) as usize;
    let table = johnson::tau(&w.eval(n))?;
    let out = TauOutput {
        rank: n,
        entries: table.sparse_entries(),
    };
    say!("{}", serde_json::to_string_pretty(&out)?);
    Ok(true)
}

fn kernel(print_matrix: bool) -> Result<bool, Box<dyn Error>> {
    let m = homlin::build_labeled_matrix()?;
    if print_matrix {
        say!("matrix {}x{}:", m.rows(), m.cols());
        for r in 0..m.rows() {
            let row: Vec<String> = m.row(r).iter().map(|x| x.to_string()).collect();
            say!("{}", row.join(" "));
        }
    }
    let (computed, published) = homlin::kernel_comparison()?;
    say!("kernel rank {}:", computed.rows());
    for r in 0..computed.rows() {
        let row: Vec<String> = computed.row(r).iter().map(|x| x.to_string()).collect();
        say!("{}", row.join(" "));
    }
    let matches = computed == published;
    say!(
        "published lattice match: {}",
        if matches { "yes" } else { "no" }
    );
    Ok(matches)
}

fn theta(dump: bool) -> Result<bool, Box<dyn Error>> {
    let table = ThetaTable::standard();
    if dump {
        say!("{}", table.dump_json());
    } else {
        say!(
            "{} substitution rules; pass --dump for the full JSON table",
            table.rules().len()
        );
    }
    Ok(true)
}
