//! Command-line front end: load games or markets from JSON, run the
//! analyses, and emit machine-readable reports.
//!
//! Exit codes: 0 on success, 2 on domain errors (empty core, not a
//! preimputation), 1 on I/O or parse errors. All reals are printed with 12
//! significant digits; JSON maps list players in input order and coalitions
//! in ascending bitmask order.

use clap::{Args, Parser, Subcommand, ValueEnum};
use coreproj::game::game_from_json;
use coreproj::market::{market_failure, market_from_json};
use coreproj::solutions::{
    chebyshev_core, failure, least_core, optimal_reallocation, FailureReport, ReallocationItem,
};
use coreproj::solver::{exact_coalitions, is_balanced_game, project_onto_core};
use coreproj::{Coalition, Game, Market, Preimputation, Tolerances};
use serde_json::{json, Map, Value};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "coreproj", version, about = "Core projections and failure measures for cooperative games")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Report balancedness, the maximal balanced-collection worth, and the
    /// exact coalitions
    Check(GameArgs),
    /// Project a preimputation onto the core
    Project(GameXArgs),
    /// Signed distance from a preimputation to the core boundary
    Failure(GameOrMarketXArgs),
    /// Optimal reallocation carrying a preimputation into the core
    Reallocate(GameOrMarketXArgs),
    /// Least-core level and an optimizer
    #[command(name = "least-core")]
    LeastCore(GameArgs),
    /// Chebyshev-core level and an optimizer
    Chebyshev(GameArgs),
    /// Generate the game of a linear-utility market
    #[command(name = "market-game")]
    MarketGame(MarketArgs),
}

#[derive(Args)]
struct OutputArgs {
    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Json)]
    output: Format,
    /// Override the equality and face tolerances jointly
    #[arg(long, value_name = "TOL")]
    tol: Option<f64>,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Args)]
struct GameArgs {
    /// Game description file (JSON)
    #[arg(long, value_name = "FILE")]
    game: PathBuf,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct GameXArgs {
    /// Game description file (JSON)
    #[arg(long, value_name = "FILE")]
    game: PathBuf,
    /// Preimputation as comma-separated reals, one per player
    #[arg(long, value_name = "LIST", allow_hyphen_values = true)]
    x: String,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct GameOrMarket {
    /// Game description file (JSON)
    #[arg(long, value_name = "FILE")]
    game: Option<PathBuf>,
    /// Market description file (JSON); the generated market game is analyzed
    #[arg(long, value_name = "FILE")]
    market: Option<PathBuf>,
}

#[derive(Args)]
struct GameOrMarketXArgs {
    #[command(flatten)]
    input: GameOrMarket,
    /// Preimputation as comma-separated reals, one per player
    #[arg(long, value_name = "LIST", allow_hyphen_values = true)]
    x: String,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct MarketArgs {
    /// Market description file (JSON)
    #[arg(long, value_name = "FILE")]
    market: PathBuf,
    #[command(flatten)]
    out: OutputArgs,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}

enum CliError {
    Io(String, std::io::Error),
    Domain(coreproj::Error),
    BadNumber(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Io(path, e) => write!(f, "{path}: {e}"),
            CliError::Domain(e) => write!(f, "{e}"),
            CliError::BadNumber(s) => write!(f, "cannot parse {s:?} as a real number"),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Io(..) | CliError::BadNumber(_) => 1,
            CliError::Domain(e) => match e {
                coreproj::Error::Parse(_)
                | coreproj::Error::TooManyPlayers(..)
                | coreproj::Error::MaskOutOfRange { .. } => 1,
                _ => 2,
            },
        }
    }
}

impl From<coreproj::Error> for CliError {
    fn from(e: coreproj::Error) -> Self {
        CliError::Domain(e)
    }
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Check(args) => {
            let tol = tolerances(&args.out);
            let game = load_game(&args.game)?;
            check(&game, tol, args.out.output)
        }
        Command::Project(args) => {
            let tol = tolerances(&args.out);
            let game = load_game(&args.game)?;
            let x = parse_preimputation(&game, &args.x, tol)?;
            project(&game, &x, tol, args.out.output)
        }
        Command::Failure(args) => {
            let tol = tolerances(&args.out);
            let report = match (&args.input.game, &args.input.market) {
                (Some(path), None) => {
                    let game = load_game(path)?;
                    let x = parse_preimputation(&game, &args.x, tol)?;
                    let report = failure(&game, &x, tol)?;
                    (game, report)
                }
                (None, Some(path)) => {
                    let market = load_market(path)?;
                    let pay = parse_reals(&args.x)?;
                    let report = market_failure(&market, &pay, tol)?;
                    (market.market_game(), report)
                }
                _ => unreachable!("clap enforces exactly one input"),
            };
            print_failure(&report.0, &report.1, args.out.output);
            Ok(())
        }
        Command::Reallocate(args) => {
            let tol = tolerances(&args.out);
            let game = match (&args.input.game, &args.input.market) {
                (Some(path), None) => load_game(path)?,
                (None, Some(path)) => load_market(path)?.market_game(),
                _ => unreachable!("clap enforces exactly one input"),
            };
            let x = parse_preimputation(&game, &args.x, tol)?;
            reallocate(&game, &x, tol, args.out.output)
        }
        Command::LeastCore(args) => {
            let game = load_game(&args.game)?;
            let report = least_core(&game)?;
            emit(
                args.out.output,
                json_report(&[
                    ("epsilon0", num(report.epsilon0)),
                    ("optimizer", reals(report.optimizer.coords())),
                    ("tight", names(&game, report.tight.iter().copied())),
                ]),
            );
            Ok(())
        }
        Command::Chebyshev(args) => {
            let game = load_game(&args.game)?;
            let report = chebyshev_core(&game)?;
            emit(
                args.out.output,
                json_report(&[
                    ("value", num(report.value)),
                    ("optimizer", reals(report.optimizer.coords())),
                    ("tight", names(&game, report.tight.iter().copied())),
                ]),
            );
            Ok(())
        }
        Command::MarketGame(args) => {
            let market = load_market(&args.market)?;
            let game = market.market_game();
            let mut worth = Map::new();
            for s in game.coalitions() {
                worth.insert(game.label(s), num(game.worth(s)));
            }
            emit(
                args.out.output,
                json_report(&[
                    ("players", json!(game.players())),
                    ("worth", Value::Object(worth)),
                ]),
            );
            Ok(())
        }
    }
}

fn tolerances(out: &OutputArgs) -> Tolerances {
    out.tol.map(Tolerances::uniform).unwrap_or_default()
}

fn load_game(path: &Path) -> Result<Game, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(path.display().to_string(), e))?;
    let load = game_from_json(&text)?;
    for warning in &load.warnings {
        eprintln!("warning: {warning}");
    }
    Ok(load.game)
}

fn load_market(path: &Path) -> Result<Market, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(path.display().to_string(), e))?;
    Ok(market_from_json(&text)?)
}

fn parse_reals(list: &str) -> Result<Vec<f64>, CliError> {
    list.split(',')
        .map(|part| {
            let part = part.trim();
            part.parse::<f64>().map_err(|_| CliError::BadNumber(part.to_string()))
        })
        .collect()
}

fn parse_preimputation(
    game: &Game,
    list: &str,
    tol: Tolerances,
) -> Result<Preimputation, CliError> {
    let pay = parse_reals(list)?;
    game.preimputation_with_tol(pay, tol.eq)
        .map_err(|e| CliError::Domain(coreproj::Error::NotPreimputation(e.to_string())))
}

fn check(game: &Game, tol: Tolerances, format: Format) -> Result<(), CliError> {
    let report = is_balanced_game(game, tol);
    let mut witness = Map::new();
    for (s, w) in &report.witness {
        witness.insert(game.label(*s), num(*w));
    }
    let exact = if report.balanced {
        names(game, exact_coalitions(game, tol)?.iter().copied())
    } else {
        Value::Null
    };
    emit(
        format,
        json_report(&[
            ("balanced", json!(report.balanced)),
            ("max_balanced_worth", num(report.max_balanced_worth)),
            ("witness", Value::Object(witness)),
            ("exact_coalitions", exact),
        ]),
    );
    Ok(())
}

fn project(game: &Game, x: &Preimputation, tol: Tolerances, format: Format) -> Result<(), CliError> {
    let r = project_onto_core(game, x, tol)?;
    let mut gamma = Map::new();
    for (s, g) in &r.gamma {
        gamma.insert(game.label(*s), num(*g));
    }
    emit(
        format,
        json_report(&[
            ("point", reals(r.point.coords())),
            ("gamma", Value::Object(gamma)),
            ("side_payment", reals(r.side_payment.coords())),
            ("distance", num(r.distance)),
            ("collection", names(game, r.collection.iter().copied())),
        ]),
    );
    Ok(())
}

fn print_failure(game: &Game, report: &FailureReport, format: Format) {
    emit(
        format,
        json_report(&[
            ("value", num(report.value)),
            ("nearest_point", reals(report.nearest_point.coords())),
            ("reallocation", reals(report.reallocation.coords())),
            ("items", items_json(game, &report.items)),
        ]),
    );
}

fn reallocate(game: &Game, x: &Preimputation, tol: Tolerances, format: Format) -> Result<(), CliError> {
    let report = failure(game, x, tol)?;
    // The transfer that repairs the allocation: zero when x is already a
    // core element, the core-projection side payment otherwise.
    let realloc = optimal_reallocation(game, x, tol)?;
    let landed = x.translate(&realloc.side_payment);
    emit(
        format,
        json_report(&[
            ("value", num(report.value)),
            ("nearest_point", reals(landed.coords())),
            ("reallocation", reals(realloc.side_payment.coords())),
            ("items", items_json(game, &realloc.items)),
        ]),
    );
    Ok(())
}

fn items_json(game: &Game, items: &[ReallocationItem]) -> Value {
    Value::Array(
        items
            .iter()
            .map(|item| {
                json_object(&[
                    ("coalition", json!(game.label(item.coalition))),
                    ("gamma", num(item.gamma)),
                    ("collect_per_player", num(item.collect_per_player)),
                    ("give_per_member", num(item.give_per_member)),
                ])
            })
            .collect(),
    )
}

/// Round to 12 significant digits so reports are stable across runs and
/// platforms.
fn round_sig(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { 0.0 } else { x };
    }
    let magnitude = x.abs().log10().floor() as i32;
    let factor = 10f64.powi(11 - magnitude);
    (x * factor).round() / factor
}

fn num(x: f64) -> Value {
    json!(round_sig(x))
}

fn reals(values: &[f64]) -> Value {
    Value::Array(values.iter().map(|&v| num(v)).collect())
}

fn names(game: &Game, coalitions: impl Iterator<Item = Coalition>) -> Value {
    Value::Array(coalitions.map(|s| json!(game.label(s))).collect())
}

fn json_object(fields: &[(&str, Value)]) -> Value {
    let mut map = Map::new();
    for (key, value) in fields {
        map.insert((*key).to_string(), value.clone());
    }
    Value::Object(map)
}

fn json_report(fields: &[(&str, Value)]) -> Value {
    let mut map = Map::new();
    map.insert("schema".to_string(), json!(1));
    for (key, value) in fields {
        map.insert((*key).to_string(), value.clone());
    }
    Value::Object(map)
}

fn emit(format: Format, value: Value) {
    match format {
        Format::Json => println!("{}", serde_json::to_string(&value).expect("valid JSON")),
        Format::Text => {
            let Value::Object(map) = &value else { unreachable!("reports are objects") };
            for (key, val) in map {
                if key == "schema" {
                    continue;
                }
                println!("{key}: {}", text_value(val));
            }
        }
    }
}

fn text_value(value: &Value) -> String {
    match value {
        Value::Array(items) => {
            let parts: Vec<String> = items.iter().map(text_value).collect();
            format!("[{}]", parts.join(", "))
        }
        Value::Object(map) => {
            let parts: Vec<String> =
                map.iter().map(|(k, v)| format!("{k}={}", text_value(v))).collect();
            format!("{{{}}}", parts.join(", "))
        }
        Value::Null => "none".to_string(),
        other => other.to_string(),
    }
}
