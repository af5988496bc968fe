use std::io::Write;

use clap::{Args, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use super::{emit, json_bytes, Failure, Format, Globals, Outcome};
use crate::distributions::UnivariateFamily;
use crate::error::{Error, Result};
use crate::io::format_value;
use crate::mixability::{not_jm_bounded_symmetric, skewnormal_terms, Certificate};
use crate::oracle::{discretize, ra_minimize_restarts, RaOptions};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExploreMode {
    /// Skew-normal certificate over `(n, λ)`.
    Skew,
    /// Bounded symmetric bound for the moment family over `(m, n)`, with `2n+1` copies.
    Moment,
    /// Rearrangement spread over grid size `m` and number of copies `n`.
    Ra,
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
pub struct ExploreArgs {
    #[arg(long, value_enum, default_value_t = ExploreMode::Skew)]
    pub mode: ExploreMode,
    #[arg(long)]
    pub n_grid: Option<String>,
    #[arg(long)]
    pub lambda_grid: Option<String>,
    #[arg(long)]
    pub m_grid: Option<String>,
    /// Marginal law for `--mode ra`.
    #[arg(long, default_value = "uniform:0:1")]
    pub family: String,
    #[arg(long, default_value_t = 10)]
    pub restarts: usize,
    #[arg(long, default_value_t = 500)]
    pub max_sweeps: usize,
}

/// Grid syntax: `a..b` (unit steps, inclusive), `a:b:step` (inclusive), or a comma list.
/// An empty string or a reversed range gives an empty grid.
pub fn parse_grid(s: &str) -> Result<Vec<f64>> {
    let s = s.trim();
    let num = |t: &str| t.trim().parse::<f64>().map_err(|e| Error::Parse(format!("grid '{s}': '{t}': {e}")));
    if s.is_empty() {
        return Ok(Vec::new());
    }
    let (lo, hi, step) = if let Some((a, b)) = s.split_once("..") {
        (num(a)?, num(b)?, 1.0)
    } else if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(Error::Parse(format!("grid '{s}' must be a:b:step")));
        }
        (num(parts[0])?, num(parts[1])?, num(parts[2])?)
    } else {
        return s.split(',').map(num).collect();
    };
    if !(lo.is_finite() && hi.is_finite() && step > 0.0 && step.is_finite()) {
        return Err(Error::Parse(format!("grid '{s}' needs finite bounds and a positive step")));
    }
    if hi < lo {
        return Ok(Vec::new());
    }
    let count = ((hi - lo) / step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|k| lo + k as f64 * step).collect())
}

fn parse_counts(s: &str) -> Result<Vec<usize>> {
    parse_grid(s)?
        .into_iter()
        .map(|x| {
            if x >= 0.0 && x.fract() == 0.0 {
                Ok(x as usize)
            } else {
                Err(Error::Parse(format!("grid '{s}' must hold nonnegative integers, found {x}")))
            }
        })
        .collect()
}

enum Cell {
    Int(usize),
    Real(f64),
    Flag(bool),
}

impl Cell {
    fn text(&self) -> String {
        match self {
            Cell::Int(k) => k.to_string(),
            Cell::Real(x) => format_value(*x),
            Cell::Flag(b) => b.to_string(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(k) => Value::from(*k),
            Cell::Real(x) => serde_json::Number::from_f64(*x).map_or(Value::Null, Value::Number),
            Cell::Flag(b) => Value::Bool(*b),
        }
    }
}

struct Table {
    header: &'static [&'static str],
    rows: Vec<Vec<Cell>>,
}

impl Table {
    fn bytes(&self, format: Format) -> std::result::Result<Vec<u8>, Failure> {
        match format {
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(self.header).map_err(Error::from)?;
                for row in &self.rows {
                    w.write_record(row.iter().map(Cell::text)).map_err(Error::from)?;
                }
                w.into_inner().map_err(|e| Failure::from(Error::from(e.into_error())))
            }
            Format::Json => {
                let rows: Vec<Value> = self
                    .rows
                    .iter()
                    .map(|row| Value::Object(self.header.iter().map(|h| h.to_string()).zip(row.iter().map(Cell::json)).collect::<Map<_, _>>()))
                    .collect();
                json_bytes(&rows)
            }
        }
    }
}

pub(super) fn run(globals: &Globals, args: &ExploreArgs, out: &mut dyn Write) -> Outcome {
    let table = match args.mode {
        ExploreMode::Skew => skew(args)?,
        ExploreMode::Moment => moment(args)?,
        ExploreMode::Ra => ra(args, globals.seed)?,
    };
    emit(globals, out, &table.bytes(globals.format)?)?;
    Ok(0)
}

fn skew(args: &ExploreArgs) -> Result<Table> {
    let ns = parse_counts(args.n_grid.as_deref().unwrap_or("2..6"))?;
    let lambdas = parse_grid(args.lambda_grid.as_deref().unwrap_or("0:100:1"))?;
    let pairs: Vec<(usize, f64)> = ns.iter().flat_map(|&n| lambdas.iter().map(move |&l| (n, l))).collect();
    let rows = pairs
        .par_iter()
        .map(|&(n, l)| {
            let t = skewnormal_terms(n, l)?;
            Ok(vec![Cell::Int(n), Cell::Real(l), Cell::Real(t.upper_tail), Cell::Real(t.negative_mass), Cell::Real(t.bound), Cell::Flag(t.fires)])
        })
        .collect::<Result<_>>()?;
    Ok(Table { header: &["n", "lambda", "upper_tail", "negative_mass", "bound", "fires"], rows })
}

fn moment(args: &ExploreArgs) -> Result<Table> {
    let ms = parse_counts(args.m_grid.as_deref().unwrap_or("0..5"))?;
    let ns = parse_counts(args.n_grid.as_deref().unwrap_or("1..4"))?;
    let pairs: Vec<(usize, usize)> = ms.iter().flat_map(|&m| ns.iter().map(move |&n| (m, n))).collect();
    let rows = pairs
        .par_iter()
        .map(|&(m, n)| {
            let f = UnivariateFamily::BimodalMoment { m: m as u32 };
            let v = not_jm_bounded_symmetric(&vec![f; 2 * n + 1], 1.0)?;
            let Certificate::BoundedSymmetricBound { point, cdf_values, threshold, necessary_condition_met, fires, .. } = v.certificate
            else {
                unreachable!("bounded checker returns its own certificate")
            };
            Ok(vec![
                Cell::Int(m),
                Cell::Int(n),
                Cell::Int(2 * n + 1),
                Cell::Real(point),
                Cell::Real(cdf_values[0]),
                Cell::Real(threshold),
                Cell::Flag(fires),
                Cell::Flag(necessary_condition_met),
            ])
        })
        .collect::<Result<_>>()?;
    Ok(Table { header: &["m", "n", "copies", "point", "cdf_value", "threshold", "fires", "necessary_condition_met"], rows })
}

fn ra(args: &ExploreArgs, seed: u64) -> Result<Table> {
    let family: UnivariateFamily = args.family.parse()?;
    let ms = parse_counts(args.m_grid.as_deref().unwrap_or("32,64,128,256"))?;
    let ns = parse_counts(args.n_grid.as_deref().unwrap_or("3"))?;
    let opts = RaOptions { max_sweeps: args.max_sweeps, restarts: args.restarts, seed, ..RaOptions::default() };
    let mut rows = Vec::new();
    for &m in &ms {
        for &n in &ns {
            let grid = discretize(&vec![family.clone(); n], m)?;
            let best = ra_minimize_restarts(&grid, &opts)?;
            rows.push(vec![
                Cell::Int(m),
                Cell::Int(n),
                Cell::Real(best.row_sum_spread),
                Cell::Real(best.row_sum_stddev),
                Cell::Int(best.iterations),
                Cell::Flag(best.converged),
            ]);
        }
    }
    Ok(Table { header: &["m", "n", "spread", "stddev", "iterations", "converged"], rows })
}
