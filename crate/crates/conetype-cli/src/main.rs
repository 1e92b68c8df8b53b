//! `conetype`: cone types of surface groups from the command line.
//!
//! Exit codes: 0 success, 1 usage, 2 parse/data, 3 resource cap,
//! 4 verification failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use conetype::matrix::{
    diff_against_fixture, geodesic_word_counts, growth_counts, perron, primitivity_certificate,
    REFERENCE_BLOCKS,
};
use conetype::mult::{Evaluator, MatrixSystem, MultFunc, Scalar};
use conetype::selfcheck::Acceptance;
use conetype::{
    Ball, BallConfig, ConeMatrix, ConeTypeTable, Error, Genus, GroupElement, RelatorTable,
};

#[derive(Parser)]
#[command(name = "conetype", version, about = "Cone types of surface groups: enumeration, the successor matrix, growth, and multiplicative functions")]
struct Cli {
    /// Surface genus.
    #[arg(long, global = true, default_value_t = 2)]
    genus: u32,
    /// Ball radius for the `ball` command.
    #[arg(long, global = true)]
    radius: Option<usize>,
    /// Power-iteration tolerance.
    #[arg(long, global = true, default_value_t = 1e-12)]
    tol: f64,
    /// Seed for reproducible randomness.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Exact rational arithmetic for `mu` (default: floats).
    #[arg(long, global = true)]
    exact: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
    Csv,
    Dot,
    PaperBlocks,
}

#[derive(Subcommand)]
enum Cmd {
    /// Canonical (shortlex-least geodesic) form of a word.
    Normalize { word: String },
    /// Word-metric length of the element of a word.
    Distance { word: String },
    /// All geodesic words representing the element of a word.
    Geodesics { word: String },
    /// Cone type of the element of a word.
    Conetype { word: String },
    /// The cone-type table: representatives and successor rows.
    Table,
    /// The 48x48 cone-type successor matrix.
    Matrix,
    /// Diff the computed matrix against the reference block tables.
    Verify {
        /// Fixture file in the block layout (default: bundled tables).
        #[arg(long)]
        fixture: Option<PathBuf>,
    },
    /// Staged primitivity certificate and Perron eigendata.
    Perron,
    /// Sphere sizes up to N driven by the successor matrix.
    Growth {
        n: usize,
        /// Also list geodesic-word counts (plain matrix powers).
        #[arg(long)]
        words: bool,
    },
    /// BFS ball of the Cayley graph (DOT or JSON summary).
    Ball,
    /// Generate a reproducible random matrix system as JSON.
    System {
        /// "scalar" or four comma-separated dimensions for
        /// singles,doubles,triples,quadruples.
        #[arg(long, default_value = "scalar")]
        profile: String,
    },
    /// Evaluate a multiplicative function from a system file at a point.
    Mu {
        /// Matrix-system JSON file.
        #[arg(long)]
        system: PathBuf,
        /// Base vertex x of the cone C(x, y).
        #[arg(long, default_value = "")]
        base_x: String,
        /// Base anchor y of the cone C(x, y).
        #[arg(long)]
        base_y: String,
        /// Comma-separated vector at the anchor type (default: all ones).
        #[arg(long)]
        vector: Option<String>,
        /// Evaluation point.
        z: String,
    },
    /// Run the full acceptance suite; nonzero exit on any failure.
    Selfcheck,
}

const EXIT_USAGE: u8 = 1;
const EXIT_PARSE: u8 = 2;
const EXIT_RESOURCE: u8 = 3;
const EXIT_VERIFY: u8 = 4;

fn exit_for(err: &Error) -> u8 {
    match err {
        Error::ResourceCap { .. } | Error::OutsideBall { .. } => EXIT_RESOURCE,
        Error::InvalidGenus(_) | Error::UnsupportedGenus(_) | Error::MatrixGenus(_) => EXIT_USAGE,
        _ => EXIT_PARSE,
    }
}

fn ball_config() -> BallConfig {
    let mut cfg = BallConfig::default();
    if let Some(cap) = std::env::var("CONETYPE_MAX_BALL").ok().and_then(|v| v.parse().ok()) {
        cfg.max_elements = cap;
    }
    cfg
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests are not usage errors.
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_for(&e))
        }
    }
}

fn run(cli: Cli) -> Result<u8, Error> {
    let Cli { genus, radius, tol, seed, format, exact, cmd } = cli;
    let genus = Genus::new(genus)?;
    let rt = RelatorTable::new(genus);
    match cmd {
        Cmd::Normalize { word } => {
            let x = rt.element_of(&word)?;
            let nf = rt.alphabet().format_word(x.word());
            emit(
                format,
                serde_json::json!({ "input": word, "normal_form": nf, "length": x.len() }),
                nf,
            );
        }
        Cmd::Distance { word } => {
            let x = rt.element_of(&word)?;
            emit(
                format,
                serde_json::json!({ "input": word, "distance": x.len() }),
                x.len().to_string(),
            );
        }
        Cmd::Geodesics { word } => {
            let x = rt.element_of(&word)?;
            let class = rt.geodesic_class(x.word())?;
            let words: Vec<String> = class.iter().map(|w| rt.alphabet().format_word(w)).collect();
            emit(
                format,
                serde_json::json!({ "input": word, "count": words.len(), "geodesics": words }),
                words.join("\n"),
            );
        }
        Cmd::Conetype { word } => {
            let table = ConeTypeTable::build(&rt);
            let x = rt.element_of(&word)?;
            let id = table.classify(&x)?;
            let rep = table.representative(id).map(|w| rt.alphabet().format_word(w));
            emit(
                format,
                serde_json::json!({
                    "input": word,
                    "normal_form": rt.alphabet().format_word(x.word()),
                    "id": id.get(),
                    "representative": rep,
                    "length_class": table.length_class(id),
                }),
                format!("{} {}", id.get(), rep.unwrap_or_else(|| "e".into())),
            );
        }
        Cmd::Table => {
            let table = ConeTypeTable::build(&rt);
            if !table.has_cascade() {
                return Err(Error::UnsupportedGenus(genus.get()));
            }
            println!("{}", serde_json::to_string_pretty(&table.to_json(&rt))?);
        }
        Cmd::Matrix => {
            let m = genus2_matrix(&rt)?;
            match format {
                Format::Csv => print!("{}", m.to_csv()),
                Format::PaperBlocks | Format::Text => print!("{}", m.to_block_text()),
                _ => println!("{}", serde_json::to_string(&m.to_json())?),
            }
        }
        Cmd::Verify { fixture } => {
            let m = genus2_matrix(&rt)?;
            let text = match fixture {
                Some(path) => std::fs::read_to_string(&path)
                    .map_err(|e| Error::Fixture(format!("{}: {e}", path.display())))?,
                None => REFERENCE_BLOCKS.to_string(),
            };
            let fixture = ConeMatrix::parse_block_text(&text)?;
            let diff = diff_against_fixture(&m, &fixture);
            if format == Format::Json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&serde_json::json!({
                        "agrees": diff.is_empty(),
                        "diff": diff,
                    }))?
                );
            } else if diff.is_empty() {
                println!("computed matrix agrees with the fixture");
            } else {
                println!("{} entries differ:", diff.len());
                for d in &diff {
                    println!(
                        "  row {:>2} col {:>2}: computed {} fixture {}",
                        d.row, d.col, d.computed, d.fixture
                    );
                }
            }
            if !diff.is_empty() {
                return Ok(EXIT_VERIFY);
            }
        }
        Cmd::Perron => {
            let m = genus2_matrix(&rt)?;
            let cert = primitivity_certificate(&m);
            let s = perron(&m, tol, conetype::matrix::PERRON_MAX_ITER, seed)?;
            let summary = serde_json::json!({
                "primitivity": cert,
                "eigenvalue": s.eigenvalue,
                "residual": s.residual,
                "iterations": s.iterations,
                "restart_deviation": s.restart_deviation,
                "left_right_gap": s.left_right_gap,
                "right": s.right,
                "left": s.left,
            });
            emit(
                format,
                summary,
                format!(
                    "eigenvalue {:.12} (residual {:.3e}, {} iterations, least positive power {:?})",
                    s.eigenvalue, s.residual, s.iterations, cert.k
                ),
            );
        }
        Cmd::Growth { n, words } => {
            let m = genus2_matrix(&rt)?;
            let rows = growth_counts(&m, n);
            let word_counts =
                if words { Some(geodesic_word_counts(&m, n)) } else { None };
            match format {
                Format::Csv => {
                    for row in &rows {
                        println!("{},{}", row.n, row.sphere_size);
                    }
                }
                Format::Text => {
                    for row in &rows {
                        match &word_counts {
                            Some(wc) => {
                                println!("s({}) = {} ({} geodesic words)", row.n, row.sphere_size, wc[row.n])
                            }
                            None => println!("s({}) = {}", row.n, row.sphere_size),
                        }
                    }
                }
                _ => {
                    let json_rows: Vec<serde_json::Value> = rows
                        .iter()
                        .map(|r| {
                            let mut o = serde_json::json!({
                                "n": r.n,
                                "sphere_size": r.sphere_size.to_string(),
                                "by_type": r.by_type.iter().map(|b| b.to_string()).collect::<Vec<_>>(),
                            });
                            if let Some(wc) = &word_counts {
                                o["geodesic_words"] = serde_json::json!(wc[r.n].to_string());
                            }
                            o
                        })
                        .collect();
                    println!("{}", serde_json::to_string(&json_rows)?);
                }
            }
        }
        Cmd::Ball => {
            let radius = radius.unwrap_or(3);
            let ball = Ball::build(&rt, radius, &ball_config())?;
            match format {
                Format::Dot => print!("{}", ball.to_dot(&rt)),
                Format::Text => println!("sphere sizes: {:?}", ball.sphere_sizes()),
                _ => println!(
                    "{}",
                    serde_json::to_string(&serde_json::json!({
                        "radius": radius,
                        "sphere_sizes": ball.sphere_sizes(),
                        "elements": ball.len(),
                    }))?
                ),
            }
        }
        Cmd::System { profile } => {
            let table = ConeTypeTable::build(&rt);
            if !table.has_cascade() {
                return Err(Error::UnsupportedGenus(genus.get()));
            }
            let profile = parse_profile(&profile)?;
            type Rat = conetype::mult::BigRational;
            let sys = MatrixSystem::<Rat>::random(&rt, &table, &profile, seed)?;
            println!("{}", serde_json::to_string_pretty(&sys.to_json())?);
        }
        Cmd::Mu { system, base_x, base_y, vector, z } => {
            let table = ConeTypeTable::build(&rt);
            if !table.has_cascade() {
                return Err(Error::UnsupportedGenus(genus.get()));
            }
            let text = std::fs::read_to_string(&system)
                .map_err(|e| Error::InvalidSystem(format!("{}: {e}", system.display())))?;
            let json: serde_json::Value = serde_json::from_str(&text)
                .map_err(|e| Error::InvalidSystem(format!("bad JSON: {e}")))?;
            let x = rt.element_of(&base_x)?;
            let y = rt.element_of(&base_y)?;
            let z = rt.element_of(&z)?;
            if exact {
                type Rat = conetype::mult::BigRational;
                let sys: MatrixSystem<Rat> = MatrixSystem::from_json(&json, &rt, &table)?;
                let v = parse_vector::<Rat>(&vector, anchor_dim(&rt, &table, &sys, &x, &y)?)?;
                let f = MultFunc::new(&rt, &table, &sys, x, y, v)?;
                let out = Evaluator::new(&rt, &table, &sys).geodesic_sum(&f, &z)?;
                let rendered: Vec<serde_json::Value> = out.iter().map(Scalar::to_json).collect();
                emit(format, serde_json::json!({ "value": rendered }), format!("{rendered:?}"));
            } else {
                let sys: MatrixSystem<f64> = MatrixSystem::from_json(&json, &rt, &table)?;
                let v = parse_vector::<f64>(&vector, anchor_dim(&rt, &table, &sys, &x, &y)?)?;
                let f = MultFunc::new(&rt, &table, &sys, x, y, v)?;
                let out = Evaluator::new(&rt, &table, &sys).geodesic_sum(&f, &z)?;
                emit(format, serde_json::json!({ "value": out }), format!("{out:?}"));
            }
        }
        Cmd::Selfcheck => {
            let suite = Acceptance::new(ball_config())?;
            let mut failed = 0;
            for outcome in suite.run_all() {
                println!("{}", outcome.line());
                if !outcome.details.is_empty() {
                    println!("  {}", outcome.details);
                }
                if !outcome.passed {
                    failed += 1;
                }
            }
            if failed > 0 {
                eprintln!("{failed} criterion(s) failed");
                return Ok(EXIT_VERIFY);
            }
        }
    }
    Ok(0)
}

fn genus2_matrix(rt: &RelatorTable) -> Result<ConeMatrix, Error> {
    let table = ConeTypeTable::build(rt);
    ConeMatrix::build(&table)
}

fn anchor_dim<S: Scalar>(
    rt: &RelatorTable,
    table: &ConeTypeTable,
    sys: &MatrixSystem<S>,
    x: &GroupElement,
    y: &GroupElement,
) -> Result<usize, Error> {
    let anchor = rt.multiply(&rt.invert(x), y);
    let c = table.classify(&anchor)?;
    if c.get() == 0 {
        return Err(Error::InvalidSystem("cone base needs d(x, y) >= 1".into()));
    }
    Ok(sys.dim_of(c))
}

fn parse_profile(spec: &str) -> Result<conetype::mult::DimsProfile, Error> {
    if spec == "scalar" {
        return Ok(conetype::mult::DimsProfile::scalar());
    }
    let dims: Vec<usize> = spec
        .split(',')
        .map(|t| t.trim().parse::<usize>())
        .collect::<Result<_, _>>()
        .map_err(|_| Error::InvalidSystem(format!("bad profile '{spec}'")))?;
    match dims.as_slice() {
        [s, d, t, q] => Ok(conetype::mult::DimsProfile {
            singles: *s,
            doubles: *d,
            triples: *t,
            quadruples: *q,
        }),
        _ => Err(Error::InvalidSystem(format!("bad profile '{spec}'"))),
    }
}

fn parse_vector<S: Scalar>(spec: &Option<String>, dim: usize) -> Result<Vec<S>, Error> {
    match spec {
        None => Ok(vec![S::one(); dim]),
        Some(s) => s
            .split(',')
            .map(|t| S::from_json(&serde_json::Value::String(t.trim().to_string())))
            .collect(),
    }
}

fn emit(format: Format, json: serde_json::Value, text: String) {
    match format {
        Format::Text => println!("{text}"),
        _ => println!("{json}"),
    }
}
