//! `destackify`: command-line front end for chart analysis, divisorialification,
//! root stacks, coarse-space checks and the modular Tor computations.
//!
//! Exit codes: 0 success, 2 input error, 3 resource cap, 4 invariant violation.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use destackify_core::chart::OrbitType;
use destackify_core::divisorialify::{
    abelianization_report, coarse_smoothness, divisorialification, divisoriality_certificate, functoriality_check,
    verify_certificate, Twist,
};
use destackify_core::io;
use destackify_core::ktheory::{cotangent_class_trivial, same_cyclic_modular_rep, tor_pair};
use destackify_core::transforms::rigidify;
use destackify_core::{Atlas, Caps, Error, FinAbGroup, Result, StackyBlowUpStep};
use num_bigint::BigInt;

/// Largest dimension for which `analyze` prints every orbit type.
const TABLE_MAX_DIM: usize = 6;

#[derive(Debug, Parser)]
#[command(name = "destackify", version, about = "Divisorialification of orbifold charts with diagonalizable stabilizers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print codimension of stackiness and divisorial index per orbit type.
    Analyze { file: PathBuf },
    /// Run divisorialification on a chart or atlas.
    Run {
        file: PathBuf,
        /// Rigidify the final charts and certify trivial stabilizers off the divisor.
        #[arg(long)]
        rigidify: bool,
        /// Print the step trace as JSON.
        #[arg(long)]
        trace: bool,
        /// Write trace, final atlas and certificate to this path.
        #[arg(long)]
        emit: Option<PathBuf>,
        /// Maximum number of rounds (defaults to the dimension).
        #[arg(long)]
        max_steps: Option<usize>,
    },
    /// Rigidify a divisorial chart or atlas.
    Rigidify { file: PathBuf },
    /// Take the root stack of order `order` along a divisor.
    Root {
        file: PathBuf,
        #[arg(long)]
        divisor: String,
        #[arg(long)]
        order: u64,
    },
    /// Hilbert basis of the invariant monoid and coarse smoothness per chart.
    Coarse { file: PathBuf },
    /// Tor_0 and Tor_1 of an H-module and their similarity verdict.
    Tor {
        file: PathBuf,
        /// Also print the filtration certificate for the cotangent class.
        #[arg(long)]
        certify: bool,
    },
    /// Compare the run on an atlas with the run on a smooth twist of it.
    CheckFunctorial {
        file: PathBuf,
        /// `trivial:<k>` or `gerbe:<d1,d2,...>`.
        #[arg(long)]
        twist: String,
    },
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Input(_) | Error::Precondition(_) | Error::Unsupported(_) => 2,
        Error::Resource(_) => 3,
        Error::Invariant(_) => 4,
    }
}

fn caps_from_env() -> Result<Caps> {
    match std::env::var("DESTACKIFY_CAPS") {
        Ok(spec) => Caps::default().with_overrides(&spec),
        Err(_) => Ok(Caps::default()),
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Input(format!("cannot read {}: {e}", path.display())))
}

fn load_atlas(path: &Path, caps: &Caps) -> Result<Atlas> {
    let atlas = io::parse_atlas(&read(path)?)?;
    atlas.check_caps(caps)?;
    Ok(atlas)
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn orbit_name(t: &OrbitType) -> String {
    let inner: Vec<String> = t.nonzero.iter().map(usize::to_string).collect();
    format!("{{{}}}", inner.join(","))
}

fn analyze(path: &Path, caps: &Caps) -> Result<String> {
    let atlas = load_atlas(path, caps)?;
    let mut out = String::new();
    for (id, chart) in atlas.charts() {
        let chars: Vec<String> = chart.characters().iter().map(ToString::to_string).collect();
        writeln!(out, "chart {id}: group {}, characters [{}]", chart.group(), chars.join(", ")).unwrap();
        let divisors: Vec<String> = chart.divisors().iter().map(|(l, c)| format!("{}@{c}", l.name)).collect();
        writeln!(out, "  divisors: [{}]", divisors.join(", ")).unwrap();
        writeln!(out, "  divisorial: {}", yes_no(chart.is_divisorial()?)).unwrap();
        let orbits: Vec<OrbitType> = if chart.dim() <= TABLE_MAX_DIM {
            OrbitType::all(chart.dim()).collect()
        } else {
            vec![OrbitType::origin()]
        };
        writeln!(out, "  {:<20} {:>5} {:>9}", "orbit", "codim", "div-index").unwrap();
        for t in &orbits {
            writeln!(
                out,
                "  {:<20} {:>5} {:>9}",
                orbit_name(t),
                chart.codim_of_stackiness(t)?,
                chart.divisorial_index(t)?
            )
            .unwrap();
        }
    }
    Ok(out)
}

fn run(path: &Path, rigid: bool, trace: bool, emit: Option<&Path>, max_steps: Option<usize>, caps: &Caps) -> Result<String> {
    let atlas = load_atlas(path, caps)?;
    let run = divisorialification(&atlas)?;
    let rounds = run.rounds();
    if rounds > atlas.dim() {
        return Err(Error::Invariant(format!("{rounds} rounds exceed the dimension {}", atlas.dim())));
    }
    let limit = max_steps.unwrap_or(atlas.dim());
    if rounds > limit {
        return Err(Error::Resource(format!("{rounds} rounds needed, --max-steps is {limit}")));
    }
    let (final_atlas, certificate) = if rigid {
        let cert = abelianization_report(&run.atlas)?;
        (run.atlas.map_charts(rigidify)?, cert)
    } else {
        (run.atlas.clone(), divisoriality_certificate(&run.atlas)?)
    };
    if !certificate.holds || !verify_certificate(&certificate) {
        return Err(Error::Invariant("the final certificate does not verify".into()));
    }

    let mut out = String::new();
    writeln!(out, "rounds: {rounds} (dimension {})", atlas.dim()).unwrap();
    let maxima: Vec<String> = run.round_maxima.iter().map(usize::to_string).collect();
    writeln!(out, "round maxima: [{}]", maxima.join(", ")).unwrap();
    writeln!(out, "final charts: {}", final_atlas.charts().len()).unwrap();
    for (id, chart) in final_atlas.charts() {
        writeln!(out, "  {id}: group {}", chart.group()).unwrap();
    }
    writeln!(out, "certificate: {:?} holds, verified", certificate.kind).unwrap();
    if trace {
        out.push_str(&io::render(&io::trace_json(&run.sequence)));
    }
    if let Some(dest) = emit {
        let doc = serde_json::json!({
            "trace": io::trace_json(&run.sequence),
            "atlas": io::atlas_json(&final_atlas),
            "certificate": io::certificate_json(&certificate),
        });
        std::fs::write(dest, io::render(&doc))
            .map_err(|e| Error::Input(format!("cannot write {}: {e}", dest.display())))?;
    }
    Ok(out)
}

fn rigidify_cmd(path: &Path, caps: &Caps) -> Result<String> {
    let atlas = load_atlas(path, caps)?;
    Ok(io::render(&io::atlas_json(&atlas.map_charts(rigidify)?)))
}

fn root(path: &Path, divisor: &str, order: u64, caps: &Caps) -> Result<String> {
    let mut atlas = load_atlas(path, caps)?;
    atlas.apply(StackyBlowUpStep::Root { label: divisor.to_string(), order })?;
    Ok(io::render(&io::atlas_json(&atlas)))
}

fn coarse(path: &Path, caps: &Caps) -> Result<String> {
    let atlas = load_atlas(path, caps)?;
    let mut out = String::new();
    for (id, chart) in atlas.charts() {
        let report = coarse_smoothness(chart, caps)?;
        let basis = serde_json::to_string(&report.hilbert_basis).expect("plain integers");
        let verdict = if report.smooth { "smooth" } else { "singular" };
        writeln!(out, "{id}: {verdict}, hilbert basis {basis}").unwrap();
    }
    Ok(out)
}

fn tor(path: &Path, certify: bool, caps: &Caps) -> Result<String> {
    let module = io::parse_tor(&read(path)?)?;
    if module.group().order() > &BigInt::from(caps.max_group_order) {
        return Err(Error::Resource(format!(
            "group order {} exceeds the cap {}",
            module.group().order(),
            caps.max_group_order
        )));
    }
    let pair = tor_pair(&module)?;
    let verdict = if pair.coordinates.is_empty() {
        "isomorphic (vacuous)"
    } else if same_cyclic_modular_rep(&pair.t0, &pair.t1, module.h())? {
        "isomorphic"
    } else {
        "not isomorphic"
    };
    let mut out = String::new();
    writeln!(out, "t0 = {}", io::fp_matrix_json(&pair.t0)).unwrap();
    writeln!(out, "t1 = {}", io::fp_matrix_json(&pair.t1)).unwrap();
    writeln!(out, "verdict: {verdict}").unwrap();
    if certify {
        let cert = cotangent_class_trivial(&module)?;
        out.push_str(&io::render(&io::k0_certificate_json(&cert)));
    }
    Ok(out)
}

fn parse_twist(spec: &str) -> Result<Twist> {
    let bad = || Error::Input(format!("twist must be trivial:<k> or gerbe:<d1,d2,...>, got `{spec}`"));
    let (kind, arg) = spec.split_once(':').ok_or_else(bad)?;
    match kind {
        "trivial" => {
            let k: usize = arg.trim().parse().map_err(|_| bad())?;
            Ok(Twist::AddTrivialCoordinate(k))
        }
        "gerbe" => {
            let orders = arg
                .split(',')
                .map(|s| s.trim().parse::<i64>().map(BigInt::from).map_err(|_| bad()))
                .collect::<Result<Vec<_>>>()?;
            Ok(Twist::AddGerbeFactor(FinAbGroup::from_cyclic_orders(&orders)?.group))
        }
        _ => Err(bad()),
    }
}

fn check_functorial(path: &Path, twist: &str, caps: &Caps) -> Result<String> {
    let atlas = load_atlas(path, caps)?;
    let twist = parse_twist(twist)?;
    twist.apply(&atlas)?.check_caps(caps)?;
    if functoriality_check(&atlas, &twist)? {
        Ok("functorial: yes\n".into())
    } else {
        Err(Error::Invariant("the twisted run blows up different centers".into()))
    }
}

fn dispatch(cli: Cli) -> Result<String> {
    let caps = caps_from_env()?;
    match cli.command {
        Command::Analyze { file } => analyze(&file, &caps),
        Command::Run { file, rigidify, trace, emit, max_steps } => {
            run(&file, rigidify, trace, emit.as_deref(), max_steps, &caps)
        }
        Command::Rigidify { file } => rigidify_cmd(&file, &caps),
        Command::Root { file, divisor, order } => root(&file, &divisor, order, &caps),
        Command::Coarse { file } => coarse(&file, &caps),
        Command::Tor { file, certify } => tor(&file, certify, &caps),
        Command::CheckFunctorial { file, twist } => check_functorial(&file, &twist, &caps),
    }
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}
