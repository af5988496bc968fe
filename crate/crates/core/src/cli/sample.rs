use std::io::Write;

use clap::{Args, ValueEnum};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{emit, json_bytes, write_file, Failure, Format, Globals, Outcome};
use crate::couplings::{sample_cm_scale_mixture, sample_jm_elliptical, sample_jm_slash, sample_matrix_variate_cm, MatrixBatch, SampleBatch};
use crate::error::Error;
use crate::generators::CharacteristicGenerator;
use crate::io::{sidecar_path, write_batch_csv, write_matrix_csv, Sidecar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Coupling {
    Elliptical,
    Slash,
    ScaleMixture,
    Matrix,
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
pub struct SampleArgs {
    #[arg(long, value_enum, default_value_t = Coupling::Elliptical)]
    pub coupling: Coupling,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub mus: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    pub sigmas: Option<Vec<f64>>,
    #[arg(long, default_value = "normal")]
    pub generator: String,
    /// Slash tail exponent.
    #[arg(long)]
    pub q: Option<f64>,
    #[arg(short = 'N', long = "count", default_value_t = 1000)]
    pub count: usize,
    /// Vector dimension for the matrix coupling.
    #[arg(long, default_value_t = 2)]
    pub p: usize,
    /// Number of variables for the matrix and scale-mixture couplings.
    #[arg(long, default_value_t = 3)]
    pub n: usize,
    /// Row scatter for the matrix coupling, rows separated by `;`; identity when omitted.
    #[arg(long, allow_hyphen_values = true)]
    pub sigma_p: Option<String>,
    /// Base law of the scale-mixture coupling.
    #[arg(long)]
    pub base: Option<String>,
    /// Discrete scale law `v@p,...` of the scale-mixture coupling.
    #[arg(long)]
    pub h: Option<String>,
    /// Grid size of the rearrangement table used for non-elliptical bases.
    #[arg(long, default_value_t = 256)]
    pub grid_m: usize,
    /// Append the row sum as column `S`.
    #[arg(long)]
    pub with_sum: bool,
}

fn parse_matrix(s: &str, p: usize) -> Result<DMatrix<f64>, Failure> {
    let rows: Vec<Vec<f64>> = s
        .split(';')
        .map(|r| r.split(',').map(|x| x.trim().parse::<f64>()).collect::<Result<Vec<_>, _>>())
        .collect::<Result<_, _>>()
        .map_err(|e| Failure::malformed(format!("--sigma-p '{s}': {e}")))?;
    if rows.len() != p || rows.iter().any(|r| r.len() != p) {
        return Err(Failure::malformed(format!("--sigma-p must be {p}x{p}")));
    }
    Ok(DMatrix::from_fn(p, p, |i, j| rows[i][j]))
}

fn location_scale(args: &SampleArgs) -> Result<(Vec<f64>, Vec<f64>), Failure> {
    let sigmas = args.sigmas.clone().ok_or_else(|| Failure::malformed("--sigmas is required for this coupling"))?;
    let mus = args.mus.clone().unwrap_or_else(|| vec![0.0; sigmas.len()]);
    Ok((mus, sigmas))
}

/// Polygon failures are a property of the inputs, not a malformed request.
fn polygon(e: Error) -> Failure {
    match e {
        Error::PolygonInequality { .. } => Failure { code: 1, message: e.to_string() },
        other => other.into(),
    }
}

enum Draws {
    Rows(SampleBatch<f64>),
    Matrix(MatrixBatch<f64>),
}

#[derive(Serialize)]
struct JsonRows<'a, T> {
    sidecar: &'a Sidecar,
    draws: Vec<T>,
}

pub(super) fn run(globals: &Globals, args: &SampleArgs, echo: Value, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    let g: CharacteristicGenerator = args.generator.parse()?;
    let (count, seed) = (args.count, globals.seed);
    let draws = match args.coupling {
        Coupling::Elliptical => {
            let (mus, sigmas) = location_scale(args)?;
            Draws::Rows(sample_jm_elliptical(&mus, &sigmas, &g, count, seed).map_err(polygon)?)
        }
        Coupling::Slash => {
            let (mus, sigmas) = location_scale(args)?;
            let q = args.q.ok_or_else(|| Failure::malformed("--q is required for the slash coupling"))?;
            Draws::Rows(sample_jm_slash(&mus, &sigmas, &g, q, count, seed).map_err(polygon)?)
        }
        Coupling::ScaleMixture => {
            let base = args.base.as_deref().ok_or_else(|| Failure::malformed("--base is required for the scale-mixture coupling"))?;
            let h = args.h.as_deref().ok_or_else(|| Failure::malformed("--h is required for the scale-mixture coupling"))?;
            Draws::Rows(sample_cm_scale_mixture(&base.parse()?, &h.parse()?, args.n, count, seed, args.grid_m)?)
        }
        Coupling::Matrix => {
            let sigma_p = match &args.sigma_p {
                Some(s) => parse_matrix(s, args.p)?,
                None => DMatrix::identity(args.p, args.p),
            };
            Draws::Matrix(sample_matrix_variate_cm(args.p, &sigma_p, &g, args.n, count, seed)?)
        }
    };
    let sidecar = match &draws {
        Draws::Rows(b) => Sidecar::for_batch(b, echo),
        Draws::Matrix(b) => Sidecar::for_matrix(b, echo),
    };
    let bytes = match (globals.format, &draws) {
        (Format::Csv, Draws::Rows(b)) => {
            let mut buf = Vec::new();
            write_batch_csv(b, &mut buf, args.with_sum)?;
            buf
        }
        (Format::Csv, Draws::Matrix(b)) => {
            let mut buf = Vec::new();
            write_matrix_csv(b, &mut buf)?;
            buf
        }
        (Format::Json, Draws::Rows(b)) => json_bytes(&JsonRows { sidecar: &sidecar, draws: b.rows().collect() })?,
        (Format::Json, Draws::Matrix(b)) => {
            let draws: Vec<Vec<&[f64]>> = (0..b.len()).map(|d| (0..b.n).map(|j| b.vector(d, j)).collect()).collect();
            json_bytes(&JsonRows { sidecar: &sidecar, draws })?
        }
    };
    emit(globals, out, &bytes)?;
    if globals.format == Format::Csv {
        let side = json_bytes(&sidecar)?;
        match &globals.output {
            Some(path) => write_file(&sidecar_path(path), &side)?,
            None => err.write_all(&side).map_err(|e| Failure::from(Error::from(e)))?,
        }
    }
    Ok(0)
}
