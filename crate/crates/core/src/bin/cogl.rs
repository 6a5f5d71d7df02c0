//! `cogl`: sample, combine, project and diagnose Gaussian latents.
//!
//! Exit codes: 0 success, 1 usage error, 2 data or format error,
//! 3 verification failure.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use cog_latent::diagnostics::{
    check_cog_distribution, check_uncorrected_distribution, estimate_slerp_beta_ci, fmt_f64,
    sample_latents, typicality_report,
};
use cog_latent::io::{read_basis, read_latents, read_spec, write_basis, write_latents, Dtype};
use cog_latent::{
    build_basis, centroid, interpolate, CentroidMethod, Error, GaussianSpec, InterpolationMethod,
    Latent, SubspaceCoords,
};

#[derive(Parser)]
#[command(
    name = "cogl",
    version,
    about = "Distribution-preserving combinations of Gaussian latents"
)]
struct Cli {
    /// Worker threads for Monte Carlo work (results do not depend on it).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw i.i.d. latents from a spec.
    Sample {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = DtypeArg::F64)]
        dtype: DtypeArg,
    },
    /// Interpolate from each latent of --a to the matching latent of --b.
    Interpolate {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long)]
        steps: usize,
        #[arg(long)]
        method: InterpolationMethod,
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Centroid of all latents in a file.
    Centroid {
        #[arg(long)]
        inputs: PathBuf,
        #[arg(long)]
        method: CentroidMethod,
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Only allow the std-euclidean and mode-norm baselines for N(0, I) specs.
        #[arg(long)]
        strict_baselines: bool,
    },
    /// Subspaces spanned by a group of latents.
    #[command(subcommand)]
    Subspace(SubspaceCommand),
    /// Typicality report for every latent in a file.
    Diagnose {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Statistical verification runs.
    #[command(subcommand)]
    Verify(VerifyCommand),
}

#[derive(Subcommand)]
enum SubspaceCommand {
    /// Validate the latents as a full-rank basis and store it.
    Build {
        #[arg(long)]
        inputs: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print subspace coordinates of each latent in a file, one line each.
    Coords {
        #[arg(long)]
        basis: PathBuf,
        #[arg(long)]
        input: PathBuf,
    },
    /// Corrected latent at the given coordinates.
    At {
        #[arg(long)]
        basis: PathBuf,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        coords: Vec<f64>,
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Corrected latents on a 2-D grid of coordinates around a center latent, row-major.
    Grid {
        #[arg(long)]
        basis: PathBuf,
        #[arg(long)]
        center: PathBuf,
        #[arg(long, value_delimiter = ',', num_args = 1)]
        dims: Vec<usize>,
        #[arg(long)]
        half_extent: f64,
        #[arg(long)]
        rows: usize,
        #[arg(long)]
        cols: usize,
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Subcommand)]
enum VerifyCommand {
    /// Empirical central interval of the SLERP beta for random N(0, I) endpoints.
    SlerpBeta {
        #[arg(long)]
        dim: usize,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 0.5)]
        v: f64,
        #[arg(long, default_value_t = 0.99)]
        confidence: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Monte Carlo check that corrected combinations follow the spec.
    CogDist {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        weights: Vec<f64>,
        #[arg(long, default_value_t = 20_000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Check the raw combination instead (negative control).
        #[arg(long)]
        uncorrected: bool,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum DtypeArg {
    F64,
    F32,
}

impl From<DtypeArg> for Dtype {
    fn from(d: DtypeArg) -> Self {
        match d {
            DtypeArg::F64 => Dtype::F64,
            DtypeArg::F32 => Dtype::F32,
        }
    }
}

enum Failure {
    Usage(String),
    Data(Error),
    Verification,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter { .. } | Error::IndexOutOfRange { .. } => {
                Failure::Usage(format!("{}: {e}", e.name()))
            }
            other => Failure::Data(other),
        }
    }
}

type CmdResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(1);
        }
        // Only fails if a global pool already exists, which cannot happen here.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Data(e)) => {
            eprintln!("error: {}: {e}", e.name());
            ExitCode::from(2)
        }
        Err(Failure::Verification) => ExitCode::from(3),
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn load_spec_for(spec: &Path, dim: usize) -> Result<GaussianSpec, Failure> {
    let spec = read_spec(spec)?;
    if spec.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: spec.dim(),
            found: dim,
        }
        .into());
    }
    Ok(spec)
}

fn read_group(path: &Path) -> Result<Vec<Latent>, Failure> {
    let xs = read_latents(path)?;
    if xs.is_empty() {
        return Err(Failure::Data(Error::invalid(
            "input",
            format!("{} holds no latents", path.display()),
        )));
    }
    Ok(xs)
}

fn single_latent(path: &Path) -> Result<Latent, Failure> {
    let mut xs = read_latents(path)?;
    if xs.len() != 1 {
        return Err(Failure::Data(Error::invalid(
            "input",
            format!(
                "{} must hold exactly one latent, found {}",
                path.display(),
                xs.len()
            ),
        )));
    }
    Ok(xs.remove(0))
}

/// `steps` values of v from 1 down to 0 inclusive; a single step is v = 0.5.
fn interpolation_params(steps: usize) -> Vec<f64> {
    if steps == 1 {
        return vec![0.5];
    }
    let span = (steps - 1) as f64;
    (0..steps).map(|i| (steps - 1 - i) as f64 / span).collect()
}

fn run(command: Command) -> CmdResult {
    match command {
        Command::Sample {
            spec,
            count,
            seed,
            out,
            dtype,
        } => {
            if count == 0 {
                return Err(usage("--count must be at least 1"));
            }
            let spec = read_spec(spec)?;
            write_latents(out, &sample_latents(&spec, count, seed), dtype.into())?;
        }
        Command::Interpolate {
            a,
            b,
            steps,
            method,
            spec,
            out,
        } => {
            if steps == 0 {
                return Err(usage("--steps must be at least 1"));
            }
            let xa = read_group(&a)?;
            let xb = read_group(&b)?;
            if xa.len() != xb.len() {
                return Err(Failure::Data(Error::CountMismatch {
                    expected: xa.len(),
                    found: xb.len(),
                }));
            }
            let spec = load_spec_for(&spec, xa[0].dim())?;
            let vs = interpolation_params(steps);
            let mut outs = Vec::with_capacity(xa.len() * steps);
            for (x1, x2) in xa.iter().zip(&xb) {
                for &v in &vs {
                    outs.push(interpolate(x1, x2, v, method, &spec)?);
                }
            }
            write_latents(out, &outs, Dtype::F64)?;
        }
        Command::Centroid {
            inputs,
            method,
            spec,
            out,
            strict_baselines,
        } => {
            let xs = read_group(&inputs)?;
            let spec = load_spec_for(&spec, xs[0].dim())?;
            if strict_baselines && method.is_transformed_baseline() && !spec.is_standard() {
                return Err(Failure::Data(Error::invalid(
                    "spec",
                    format!("--strict-baselines: `{method}` requires a N(0, I) spec"),
                )));
            }
            write_latents(out, &[centroid(&xs, method, &spec)?], Dtype::F64)?;
        }
        Command::Subspace(cmd) => run_subspace(cmd)?,
        Command::Diagnose { input, spec, json } => {
            let xs = read_group(&input)?;
            let spec = load_spec_for(&spec, xs[0].dim())?;
            let reports = xs
                .iter()
                .map(|x| typicality_report(x, &spec))
                .collect::<Result<Vec<_>, _>>()?;
            if json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&reports).expect("serializable")
                );
            } else {
                for (i, r) in reports.iter().enumerate() {
                    println!("index={i} {}", r.to_kv_line());
                }
            }
        }
        Command::Verify(VerifyCommand::SlerpBeta {
            dim,
            samples,
            v,
            confidence,
            seed,
        }) => {
            let ci = estimate_slerp_beta_ci(dim, samples, v, confidence, seed)?;
            println!("{} {}", fmt_f64(ci.lo), fmt_f64(ci.hi));
        }
        Command::Verify(VerifyCommand::CogDist {
            spec,
            weights,
            trials,
            seed,
            uncorrected,
            json,
        }) => {
            let spec = read_spec(spec)?;
            let report = if uncorrected {
                check_uncorrected_distribution(&spec, &weights, trials, seed)?
            } else {
                check_cog_distribution(&spec, &weights, trials, seed)?
            };
            if json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&report).expect("serializable")
                );
            } else {
                print!("{}", report.to_kv());
            }
            if !report.passed {
                return Err(Failure::Verification);
            }
        }
    }
    Ok(())
}

fn run_subspace(cmd: SubspaceCommand) -> CmdResult {
    match cmd {
        SubspaceCommand::Build { inputs, out } => {
            let basis = build_basis(&read_group(&inputs)?)?;
            write_basis(out, &basis)?;
            println!("dim={}", basis.dim());
            println!("rank={}", basis.rank());
            println!(
                "sigma_min_lower_bound={}",
                fmt_f64(basis.sigma_min_lower_bound())
            );
        }
        SubspaceCommand::Coords { basis, input } => {
            let basis = read_basis(basis)?;
            for x in read_group(&input)? {
                let h = basis.coords(&x)?;
                let line: Vec<String> = h.as_slice().iter().map(|v| fmt_f64(*v)).collect();
                println!("{}", line.join(","));
            }
        }
        SubspaceCommand::At {
            basis,
            coords,
            spec,
            out,
        } => {
            let basis = read_basis(basis)?;
            let spec = load_spec_for(&spec, basis.dim())?;
            let h = SubspaceCoords::new(coords)?;
            if h.len() != basis.rank() {
                return Err(usage(format!(
                    "--coords needs {} values, got {}",
                    basis.rank(),
                    h.len()
                )));
            }
            write_latents(out, &[basis.latent_at(&h, &spec)?], Dtype::F64)?;
        }
        SubspaceCommand::Grid {
            basis,
            center,
            dims,
            half_extent,
            rows,
            cols,
            spec,
            out,
        } => {
            let [dim_i, dim_j] = dims[..] else {
                return Err(usage("--dims takes exactly two indices, e.g. --dims 0,1"));
            };
            let basis = read_basis(basis)?;
            let spec = load_spec_for(&spec, basis.dim())?;
            let center = single_latent(&center)?;
            let grid = basis.grid_coords(&center, dim_i, dim_j, half_extent, rows, cols)?;
            let latents = grid
                .iter()
                .map(|h| basis.latent_at(h, &spec))
                .collect::<Result<Vec<_>, _>>()?;
            write_latents(out, &latents, Dtype::F64)?;
        }
    }
    Ok(())
}
