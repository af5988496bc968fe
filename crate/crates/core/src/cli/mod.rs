//! Command-line front end. Every subcommand maps its outcome to an exit code.

mod check;
mod explore;
mod sample;

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::distributions::UnivariateFamily;
use crate::error::Error;
use crate::io::{read_batch_csv, sidecar_path, Sidecar};
use crate::oracle::{brute_force_min_spread, discretize, ra_minimize_restarts, verify_constant_sum, verify_transformed_sum, OracleReport, RaOptions};

pub use check::CheckArgs;
pub use explore::{parse_grid, ExploreArgs, ExploreMode};
pub use sample::{Coupling, SampleArgs};

pub const EXIT_MALFORMED: i32 = 64;
pub const EXIT_IO: i32 = 66;

#[derive(Parser, Debug)]
#[command(name = "jointmix", version, about = "Joint mixability verdicts, constant-sum couplings and rearrangement evidence")]
pub struct Cli {
    #[command(flatten)]
    pub globals: Globals,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
pub struct Globals {
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,
    /// Write the primary output here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// JSON object whose keys override command-line flags.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Mixability verdict with certificate; exit 0 JM, 1 NotJM, 2 Unknown.
    Check(CheckArgs),
    /// Joint draws from a constant-sum coupling.
    Sample(SampleArgs),
    /// Check that every row of a CSV sums to the joint center.
    Verify(VerifyArgs),
    /// Grids of certificate outcomes and rearrangement evidence as CSV.
    Explore(ExploreArgs),
    /// Rearrangement (and optionally exhaustive) minimum row-sum spread.
    Oracle(OracleArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Transform {
    Square,
    Exp,
    Abs,
}

impl Transform {
    fn apply(self, x: f64) -> f64 {
        match self {
            Transform::Square => x * x,
            Transform::Exp => x.exp(),
            Transform::Abs => x.abs(),
        }
    }
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
pub struct VerifyArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Claimed joint center; read from the input's sidecar when omitted.
    #[arg(long, allow_hyphen_values = true)]
    pub center: Option<f64>,
    #[arg(long, default_value_t = 1e-8)]
    pub rel_tol: f64,
    /// Also check that `f(row sum)` is constant at `f(C)`.
    #[arg(long, value_enum)]
    pub transform: Option<Transform>,
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
pub struct OracleArgs {
    /// Marginal law, repeatable: shorthand such as `uniform:0:1` or a JSON object.
    #[arg(long = "marginal", required = true)]
    pub marginals: Vec<String>,
    /// Repeat the marginal list this many times.
    #[arg(long, default_value_t = 1)]
    pub copies: usize,
    #[arg(long, default_value_t = 64)]
    pub m: usize,
    #[arg(long, default_value_t = 10)]
    pub restarts: usize,
    #[arg(long, default_value_t = 500)]
    pub max_sweeps: usize,
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    #[arg(long)]
    pub brute_force: bool,
}

/// A failed command: exit code and message for stderr.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    pub fn malformed(message: impl Into<String>) -> Self {
        Self { code: EXIT_MALFORMED, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Io(_) | Error::Csv(_) => EXIT_IO,
            _ => EXIT_MALFORMED,
        };
        Self { code, message: e.to_string() }
    }
}

type Outcome = std::result::Result<i32, Failure>;

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_MALFORMED } else { 0 };
            let _ = write!(err, "{}", e.render());
            return code;
        }
    };
    match dispatch(cli, out, err) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn dispatch(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    let Cli { mut globals, command } = cli;
    match command {
        Command::Check(mut a) => {
            apply_config(&mut globals, &mut a)?;
            check::run(&globals, &a, out)
        }
        Command::Sample(mut a) => {
            let echo = apply_config(&mut globals, &mut a)?;
            sample::run(&globals, &a, echo, out, err)
        }
        Command::Verify(mut a) => {
            apply_config(&mut globals, &mut a)?;
            verify(&globals, &a, out)
        }
        Command::Explore(mut a) => {
            apply_config(&mut globals, &mut a)?;
            explore::run(&globals, &a, out)
        }
        Command::Oracle(mut a) => {
            apply_config(&mut globals, &mut a)?;
            oracle(&globals, &a, out)
        }
    }
}

/// Overrides flags with the keys of the `--config` object and returns the merged
/// configuration, which is echoed into output sidecars.
fn apply_config<A: Serialize + DeserializeOwned>(globals: &mut Globals, args: &mut A) -> std::result::Result<Value, Failure> {
    let to_map = |v: Value| match v {
        Value::Object(m) => m,
        _ => unreachable!("argument structs serialize to objects"),
    };
    let mut g = to_map(serde_json::to_value(&*globals).map_err(Error::from)?);
    let mut c = to_map(serde_json::to_value(&*args).map_err(Error::from)?);
    if let Some(path) = &globals.config {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::malformed(format!("cannot read config {}: {e}", path.display())))?;
        let overrides: Value =
            serde_json::from_str(&text).map_err(|e| Failure::malformed(format!("config {}: {e}", path.display())))?;
        let Value::Object(overrides) = overrides else {
            return Err(Failure::malformed("config must be a JSON object"));
        };
        for (k, v) in overrides {
            if c.contains_key(&k) {
                c.insert(k, v);
            } else if g.contains_key(&k) && k != "config" {
                g.insert(k, v);
            } else {
                return Err(Failure::malformed(format!("unknown config key '{k}'")));
            }
        }
        *globals = serde_json::from_value(Value::Object(g.clone())).map_err(|e| Failure::malformed(format!("config: {e}")))?;
        *args = serde_json::from_value(Value::Object(c.clone())).map_err(|e| Failure::malformed(format!("config: {e}")))?;
    }
    g.remove("output");
    g.remove("config");
    g.extend(c);
    Ok(Value::Object(g))
}

/// Writes `bytes` to `--output` or to `out`.
fn emit(globals: &Globals, out: &mut dyn Write, bytes: &[u8]) -> std::result::Result<(), Failure> {
    match &globals.output {
        Some(path) => write_file(path, bytes),
        None => out.write_all(bytes).map_err(|e| Failure::from(Error::from(e))),
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> std::result::Result<(), Failure> {
    std::fs::write(path, bytes).map_err(|e| Failure { code: EXIT_IO, message: format!("cannot write {}: {e}", path.display()) })
}

fn json_bytes<T: Serialize>(value: &T) -> std::result::Result<Vec<u8>, Failure> {
    let mut bytes = serde_json::to_vec_pretty(value).map_err(Error::from)?;
    bytes.push(b'\n');
    Ok(bytes)
}

fn parse_families(specs: &[String], copies: usize) -> std::result::Result<Vec<UnivariateFamily>, Failure> {
    let one: Vec<UnivariateFamily> = specs.iter().map(|s| s.parse()).collect::<Result<_, Error>>()?;
    Ok((0..copies).flat_map(|_| one.iter().cloned()).collect())
}

#[derive(Serialize)]
struct VerifyOutput {
    #[serde(flatten)]
    report: crate::oracle::VerificationReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    transform: Option<crate::oracle::TransformReport>,
}

fn verify(globals: &Globals, args: &VerifyArgs, out: &mut dyn Write) -> Outcome {
    let io_fail = |e: String| Failure { code: EXIT_IO, message: e };
    let file = std::fs::File::open(&args.input).map_err(|e| io_fail(format!("cannot open {}: {e}", args.input.display())))?;
    let mut batch = read_batch_csv(std::io::BufReader::new(file)).map_err(|e| io_fail(format!("{}: {e}", args.input.display())))?;
    let side_path = sidecar_path(&args.input);
    let sidecar: Option<Sidecar> = if side_path.exists() {
        let text = std::fs::read_to_string(&side_path).map_err(|e| io_fail(format!("{}: {e}", side_path.display())))?;
        Some(serde_json::from_str(&text).map_err(|e| io_fail(format!("{}: {e}", side_path.display())))?)
    } else {
        None
    };
    if let Some(s) = &sidecar {
        batch.kind = s.kind;
        batch.seed = s.seed;
    }
    let center = args
        .center
        .or_else(|| sidecar.as_ref().and_then(|s| s.joint_center))
        .ok_or_else(|| Failure::malformed("no --center given and no sidecar with a joint center"))?;
    if batch.is_empty() {
        return Err(io_fail(format!("{} has no rows", args.input.display())));
    }
    let report = verify_constant_sum(&batch, center, args.rel_tol)?;
    let transform = match args.transform {
        Some(t) => Some(verify_transformed_sum(&batch, center, |x| t.apply(x), args.rel_tol)?),
        None => None,
    };
    let passed = report.passed && transform.as_ref().is_none_or(|t| t.passed);
    emit(globals, out, &json_bytes(&VerifyOutput { report, transform })?)?;
    Ok(if passed { 0 } else { 1 })
}

#[derive(Serialize)]
struct OracleOutput {
    #[serde(flatten)]
    report: OracleReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    brute_force_spread: Option<f64>,
}

fn oracle(globals: &Globals, args: &OracleArgs, out: &mut dyn Write) -> Outcome {
    let families = parse_families(&args.marginals, args.copies)?;
    let grid = discretize(&families, args.m)?;
    let opts = RaOptions { max_sweeps: args.max_sweeps, tol: args.tol, restarts: args.restarts, seed: globals.seed };
    let best = ra_minimize_restarts(&grid, &opts)?;
    let brute_force_spread = if args.brute_force { Some(brute_force_min_spread(&grid)?.spread) } else { None };
    let report = OracleReport::new(&grid, &best, args.restarts);
    emit(globals, out, &json_bytes(&OracleOutput { report, brute_force_spread })?)?;
    Ok(0)
}

