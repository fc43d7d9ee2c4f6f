//! Command-line surface over the sum-shuffle order library.
//!
//! Exit codes: `0` success, `1` negative result (unequal, invalid, no
//! embedding, arrow fails), `2` usage or malformed input, `3` resource
//! cap reached or search inconclusive. All output is deterministic:
//! identical invocations produce byte-identical bytes.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use sumshuffle::coordmodel::{CoordModel, CoordPoint};
use sumshuffle::files::{StructureFile, UltraFile};
use sumshuffle::finstruct::{
    amalgamate, enumerate_embeddings, enumerate_structures, Embedding, FinStructure,
};
use sumshuffle::presentation::TreePresentation;
use sumshuffle::ramsey::{
    check_arrow, search_witness, ArrowInstance, ArrowOutcome, RamseyError, SearchOutcome,
    DEFAULT_COPY_CAP,
};
use sumshuffle::rationals::Rat;
use sumshuffle::ultra::to_ultrametric;
use sumshuffle::{canonicalize, same_order_type};

#[derive(Parser)]
#[command(name = "sumshuffle", version, about = "Sum-shuffle linear order toolkit")]
struct Cli {
    /// Emit machine-readable JSON instead of plain text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the canonical form of a tree expression.
    Canon { expr: String },
    /// Decide whether two tree expressions denote the same order type.
    Eq { left: String, right: String },
    /// Check a structure file against the axioms.
    Validate { file: PathBuf },
    /// List the embeddings of the first structure into the second.
    Embed { small: PathBuf, big: PathBuf },
    /// Assign model coordinates to a structure's points.
    Coordinatize { file: PathBuf },
    /// Amalgamate two structures over a shared substructure.
    Amalgamate {
        /// The shared base structure A.
        base: PathBuf,
        /// The left structure B.
        left: PathBuf,
        /// The right structure C.
        right: PathBuf,
        /// Embedding of A into B, as comma-separated point indices.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = false)]
        f: Vec<usize>,
        /// Embedding of A into C, as comma-separated point indices.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = false)]
        g: Vec<usize>,
    },
    /// Enumerate every structure of a given size over a tree.
    Gen {
        expr: String,
        n: usize,
        /// Budget on generated candidates before giving up.
        #[arg(long, default_value_t = 1_000_000)]
        cap: usize,
    },
    /// Draw a seeded random substructure of the model, with coordinates.
    Sample {
        expr: String,
        n: usize,
        #[arg(long)]
        seed: u64,
    },
    /// Partition arrow checking and witness search.
    #[command(subcommand)]
    Ramsey(RamseyCommand),
    /// Conversions between structures and ultrametric spaces.
    #[command(subcommand)]
    Um(UmCommand),
}

#[derive(Subcommand)]
enum RamseyCommand {
    /// Decide whether every coloring of the A-copies in C leaves a
    /// monochromatic B-copy.
    Check {
        #[arg(long = "C")]
        c: PathBuf,
        #[arg(long = "B")]
        b: PathBuf,
        #[arg(long = "A")]
        a: PathBuf,
        /// Number of colors.
        #[arg(short = 'k')]
        colors: u32,
        /// Cap on the number of A-copies examined.
        #[arg(long, default_value_t = DEFAULT_COPY_CAP)]
        cap: usize,
    },
    /// Search for the smallest structure over a tree satisfying the
    /// arrow, up to a size cap.
    Search {
        /// Tree expression to search over.
        #[arg(long)]
        tree: String,
        #[arg(long = "B")]
        b: PathBuf,
        #[arg(long = "A")]
        a: PathBuf,
        /// Number of colors.
        #[arg(short = 'k')]
        colors: u32,
        /// Largest candidate size to try.
        #[arg(long = "size-cap")]
        size_cap: usize,
        /// Cap on the number of A-copies examined per candidate.
        #[arg(long, default_value_t = DEFAULT_COPY_CAP)]
        cap: usize,
        /// Budget on generated candidates per size.
        #[arg(long = "enum-cap", default_value_t = 1_000_000)]
        enum_cap: usize,
    },
}

#[derive(Subcommand)]
enum UmCommand {
    /// Convert an ultrametric space file to a structure file.
    ToStruct { file: PathBuf },
    /// Read a structure file as an ultrametric space over the given
    /// distance set.
    ToUm {
        file: PathBuf,
        /// Distance set, as comma-separated rationals in increasing order.
        #[arg(long, value_delimiter = ',')]
        distances: Vec<String>,
    },
}

/// A run that ended without a printable result, tagged by exit code.
enum Failure {
    /// Malformed input or arguments (exit 2).
    Input(String),
    /// Structurally invalid content (exit 1).
    Invalid(String),
    /// A resource cap was reached or the search was inconclusive
    /// (exit 3).
    Capped(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Input(_) => 2,
            Failure::Invalid(_) => 1,
            Failure::Capped(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Input(m) | Failure::Invalid(m) | Failure::Capped(m) => m,
        }
    }
}


/// Writes one line to stdout, exiting quietly if the consumer has
/// closed the pipe.
fn emit(line: std::fmt::Arguments<'_>) {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    if writeln!(out, "{line}").is_err() {
        std::process::exit(0);
    }
}

macro_rules! outln {
    ($($arg:tt)*) => { emit(format_args!($($arg)*)) };
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(failure) => {
            eprintln!("error: {}", failure.message());
            ExitCode::from(failure.code())
        }
    }
}

fn run(cli: &Cli) -> Result<ExitCode, Failure> {
    match &cli.command {
        Command::Canon { expr } => cmd_canon(expr, cli.json),
        Command::Eq { left, right } => cmd_eq(left, right, cli.json),
        Command::Validate { file } => cmd_validate(file, cli.json),
        Command::Embed { small, big } => cmd_embed(small, big, cli.json),
        Command::Coordinatize { file } => cmd_coordinatize(file),
        Command::Amalgamate {
            base,
            left,
            right,
            f,
            g,
        } => cmd_amalgamate(base, left, right, f, g),
        Command::Gen { expr, n, cap } => cmd_gen(expr, *n, *cap),
        Command::Sample { expr, n, seed } => cmd_sample(expr, *n, *seed),
        Command::Ramsey(RamseyCommand::Check { c, b, a, colors, cap }) => {
            cmd_ramsey_check(c, b, a, *colors, *cap, cli.json)
        }
        Command::Ramsey(RamseyCommand::Search {
            tree,
            b,
            a,
            colors,
            size_cap,
            cap,
            enum_cap,
        }) => cmd_ramsey_search(tree, b, a, *colors, *size_cap, *cap, *enum_cap),
        Command::Um(UmCommand::ToStruct { file }) => cmd_um_to_struct(file),
        Command::Um(UmCommand::ToUm { file, distances }) => cmd_um_to_um(file, distances),
    }
}

fn parse_tree(expr: &str) -> Result<TreePresentation, Failure> {
    expr.parse()
        .map_err(|e| Failure::Input(format!("cannot parse expression {expr:?}: {e}")))
}

fn read_document(path: &Path) -> Result<StructureFile, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Input(format!("cannot read {}: {e}", path.display())))?;
    StructureFile::from_json(&text)
        .map_err(|e| Failure::Input(format!("cannot parse {}: {e}", path.display())))
}

/// Reads a structure file and constructs it, mapping construction
/// failure to malformed input.
fn read_structure(path: &Path) -> Result<FinStructure, Failure> {
    read_document(path)?
        .to_structure()
        .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn cmd_canon(expr: &str, json: bool) -> Result<ExitCode, Failure> {
    let tree = parse_tree(expr)?;
    let canonical = canonicalize(&tree)
        .map_err(|e| Failure::Invalid(format!("canonicalization failed: {e}")))?;
    if json {
        outln!("{}", json!({ "canonical": canonical.to_string() }));
    } else {
        outln!("{canonical}");
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_eq(left: &str, right: &str, json: bool) -> Result<ExitCode, Failure> {
    let lt = parse_tree(left)?;
    let rt = parse_tree(right)?;
    let equal = same_order_type(&lt, &rt)
        .map_err(|e| Failure::Invalid(format!("canonicalization failed: {e}")))?;
    if json {
        outln!("{}", json!({ "equal": equal }));
    } else {
        outln!("{equal}");
    }
    Ok(exit_for(equal))
}

fn cmd_validate(file: &Path, json: bool) -> Result<ExitCode, Failure> {
    let document = read_document(file)?;
    // For this command, failing construction IS the negative answer,
    // reported like any axiom violation rather than as bad input.
    let structure = match document.to_structure() {
        Ok(s) => s,
        Err(e) => {
            if json {
                outln!("{}", json!({ "valid": false, "violations": [e.to_string()] }));
            } else {
                outln!("{e}");
            }
            return Ok(exit_for(false));
        }
    };
    let violations = structure.validate();
    if json {
        let rows: Vec<_> = violations
            .iter()
            .map(|v| {
                json!({
                    "axiom": v.axiom.to_string(),
                    "path": v.path.to_string(),
                    "points": v.points,
                    "detail": v.detail,
                })
            })
            .collect();
        outln!("{}", json!({ "valid": violations.is_empty(), "violations": rows }));
    } else if violations.is_empty() {
        outln!("OK");
    } else {
        for v in &violations {
            outln!("{v}");
        }
    }
    Ok(exit_for(violations.is_empty()))
}

fn cmd_embed(small: &Path, big: &Path, json: bool) -> Result<ExitCode, Failure> {
    let a = read_structure(small)?;
    let b = read_structure(big)?;
    let embeddings = enumerate_embeddings(&a, &b)
        .map_err(|e| Failure::Input(format!("cannot enumerate embeddings: {e}")))?;
    if json {
        outln!("{}", json!({ "embeddings": embeddings }));
    } else {
        for map in &embeddings {
            outln!("{}", join_indices(map));
        }
    }
    Ok(exit_for(!embeddings.is_empty()))
}

fn cmd_coordinatize(file: &Path) -> Result<ExitCode, Failure> {
    let structure = read_structure(file)?;
    let model = CoordModel::new(structure.tree().clone());
    let coords = model
        .coordinatize(&structure)
        .map_err(|e| Failure::Invalid(e.to_string()))?;
    print_structure(&structure, Some(&coords));
    Ok(ExitCode::SUCCESS)
}

fn cmd_amalgamate(
    base: &Path,
    left: &Path,
    right: &Path,
    f: &Embedding,
    g: &Embedding,
) -> Result<ExitCode, Failure> {
    let a = read_structure(base)?;
    let b = read_structure(left)?;
    let c = read_structure(right)?;
    let amalgam =
        amalgamate(&a, &b, &c, f, g).map_err(|e| Failure::Invalid(e.to_string()))?;
    print_structure(&amalgam.d, Some(&amalgam.coords));
    Ok(ExitCode::SUCCESS)
}

fn cmd_gen(expr: &str, n: usize, cap: usize) -> Result<ExitCode, Failure> {
    let tree = parse_tree(expr)?;
    let structures = enumerate_structures(&tree, n, cap)
        .map_err(|e| Failure::Capped(e.to_string()))?;
    let documents: Vec<StructureFile> = structures
        .iter()
        .map(|s| StructureFile::from_structure(s, None))
        .collect();
    outln!(
        "{}",
        serde_json::to_string_pretty(&documents).expect("documents serialize")
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_sample(expr: &str, n: usize, seed: u64) -> Result<ExitCode, Failure> {
    let tree = parse_tree(expr)?;
    let model = CoordModel::new(tree);
    let (structure, coords) = model
        .sample_substructure(n, seed)
        .map_err(|e| Failure::Input(e.to_string()))?;
    print_structure(&structure, Some(&coords));
    Ok(ExitCode::SUCCESS)
}

fn cmd_ramsey_check(
    c: &Path,
    b: &Path,
    a: &Path,
    colors: u32,
    cap: usize,
    json: bool,
) -> Result<ExitCode, Failure> {
    let instance = ArrowInstance {
        c: read_structure(c)?,
        b: read_structure(b)?,
        a: read_structure(a)?,
        colors,
    };
    let outcome = check_arrow(&instance, cap).map_err(ramsey_failure)?;
    match outcome {
        ArrowOutcome::Holds => {
            if json {
                outln!("{}", json!({ "holds": true }));
            } else {
                outln!("true");
            }
            Ok(ExitCode::SUCCESS)
        }
        ArrowOutcome::Fails { coloring } => {
            if json {
                outln!("{}", json!({ "holds": false, "coloring": coloring }));
            } else {
                outln!("false");
                outln!("{}", join_u32(&coloring));
            }
            Ok(exit_for(false))
        }
    }
}

fn cmd_ramsey_search(
    tree: &str,
    b: &Path,
    a: &Path,
    colors: u32,
    size_cap: usize,
    cap: usize,
    enum_cap: usize,
) -> Result<ExitCode, Failure> {
    let tree = parse_tree(tree)?;
    let b = read_structure(b)?;
    let a = read_structure(a)?;
    let outcome = search_witness(&tree, &b, &a, colors, size_cap, cap, enum_cap)
        .map_err(ramsey_failure)?;
    match outcome {
        SearchOutcome::Witness { structure, .. } => {
            print_structure(&structure, None);
            Ok(ExitCode::SUCCESS)
        }
        SearchOutcome::Unknown { reason } => Err(Failure::Capped(reason)),
    }
}

fn cmd_um_to_struct(file: &Path) -> Result<ExitCode, Failure> {
    let text = fs::read_to_string(file)
        .map_err(|e| Failure::Input(format!("cannot read {}: {e}", file.display())))?;
    let document = UltraFile::from_json(&text)
        .map_err(|e| Failure::Input(format!("cannot parse {}: {e}", file.display())))?;
    let space = document
        .to_space()
        .map_err(|e| Failure::Invalid(e.to_string()))?;
    print_structure(&space.to_structure(), None);
    Ok(ExitCode::SUCCESS)
}

fn cmd_um_to_um(file: &Path, distances: &[String]) -> Result<ExitCode, Failure> {
    let structure = read_structure(file)?;
    let distances: Vec<Rat> = distances
        .iter()
        .map(|s| {
            s.parse()
                .map_err(|e| Failure::Input(format!("bad distance: {e}")))
        })
        .collect::<Result<_, _>>()?;
    let space =
        to_ultrametric(&structure, &distances).map_err(|e| Failure::Invalid(e.to_string()))?;
    outln!("{}", UltraFile::from_space(&space).to_json());
    Ok(ExitCode::SUCCESS)
}

/// Exit 0 for a positive answer, 1 for a negative one.
fn exit_for(positive: bool) -> ExitCode {
    if positive {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn ramsey_failure(e: RamseyError) -> Failure {
    match e {
        RamseyError::CapExceeded { .. } => Failure::Capped(e.to_string()),
        _ => Failure::Input(e.to_string()),
    }
}

fn print_structure(structure: &FinStructure, coords: Option<&[CoordPoint]>) {
    outln!("{}", StructureFile::from_structure(structure, coords).to_json());
}

fn join_indices(indices: &[usize]) -> String {
    indices
        .iter()
        .map(usize::to_string)
        .collect::<Vec<_>>()
        .join(",")
}

fn join_u32(values: &[u32]) -> String {
    values
        .iter()
        .map(u32::to_string)
        .collect::<Vec<_>>()
        .join(",")
}
