//! Command-line front end: dataset generation, vine fitting and sampling,
//! autoencoder training, the composed pipeline, evaluation metrics, and SVG
//! previews.
//!
//! Every subcommand is batch-style and reproducible: identical flags and
//! seeds produce identical output bytes. Errors go to stderr as a single
//! JSON line `{"code": c, "message": ...}` with exit code 1 for usage
//! errors, 2 for data/format errors, and 3 for numeric failures.

mod plot;

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use vinegen::autoencoder::{self, Architecture, TrainConfig};
use vinegen::bicop::CopulaFamily;
use vinegen::bundle::{BundlePayload, Metadata, ModelBundle};
use vinegen::datasets::{self, Dataset};
use vinegen::error::Error;
use vinegen::metrics;
use vinegen::pipeline::{self, VcaeConfig};
use vinegen::vine::JointModel;

#[derive(Parser)]
#[command(name = "vinegen", version, about = "Vine copula estimation, sampling, and the autoencoder pipeline")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum DatasetKind {
    Ring8,
    Grid25,
    Swissroll,
    Cone3d,
    Digits8,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Indep,
    Gaussian,
    Tll,
}

impl From<FamilyArg> for CopulaFamily {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::Indep => CopulaFamily::Independence,
            FamilyArg::Gaussian => CopulaFamily::Gaussian,
            FamilyArg::Tll => CopulaFamily::TransformationKernel,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum MetricArg {
    Mmd,
    Coverage,
    Nll,
    C2st,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a toy dataset as CSV.
    Gen {
        dataset: DatasetKind,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        /// Override the generator's scale (swissroll scale, ring8 radius,
        /// grid25 spacing).
        #[arg(long)]
        scale: Option<f64>,
        /// Override the generator's noise standard deviation.
        #[arg(long)]
        noise_sd: Option<f64>,
    },
    /// Fit kernel marginals plus a vine copula to a CSV table.
    FitVine {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value = "tll")]
        family: FamilyArg,
        /// Truncation level; defaults to min(5, d-1).
        #[arg(long)]
        trunc: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Sample a fitted vine bundle on the natural scale.
    Sample {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Evaluate the log density of a fitted vine bundle on a CSV table.
    Logdensity {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Train a dense autoencoder on a CSV table.
    AeTrain {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        latent: usize,
        #[arg(long, default_value_t = 200)]
        epochs: usize,
        #[arg(long, default_value_t = 0.001)]
        lr: f64,
        #[arg(long, default_value_t = 0.001)]
        wd: f64,
        #[arg(long, default_value_t = 128)]
        batch: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Hidden layer widths between input and bottleneck.
        #[arg(long, value_delimiter = ',', default_value = "32")]
        hidden: Vec<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// The composed pipeline: autoencoder + latent vine.
    Vcae {
        #[command(subcommand)]
        sub: VcaeCmd,
    },
    /// Two-sample and density metrics between CSV tables.
    Eval {
        #[arg(long, value_enum)]
        metric: MetricArg,
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: Option<PathBuf>,
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long, default_value_t = 0.95)]
        alpha: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Render a scatter plot or an image grid as SVG.
    Plot {
        #[arg(long)]
        input: PathBuf,
        /// Two zero-based column indices for the scatter mode.
        #[arg(long, value_delimiter = ',', default_value = "0,1")]
        cols: Vec<usize>,
        /// Treat rows as flattened side x side grayscale images.
        #[arg(long)]
        image_side: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Subcommand)]
enum VcaeCmd {
    /// Train the autoencoder and fit latent vines (per class when the CSV
    /// has a label column).
    Fit {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        latent: usize,
        #[arg(long, default_value_t = 200)]
        epochs: usize,
        #[arg(long, default_value_t = 0.001)]
        lr: f64,
        #[arg(long, default_value_t = 0.001)]
        wd: f64,
        #[arg(long, default_value_t = 128)]
        batch: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_delimiter = ',', default_value = "32")]
        hidden: Vec<usize>,
        #[arg(long, value_enum, default_value = "tll")]
        family: FamilyArg,
        #[arg(long)]
        trunc: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Decode samples from the latent vine.
    Sample {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        seed: u64,
        /// Class label for conditional sampling.
        #[arg(long)]
        label: Option<u32>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Decode a latent-space line between two data rows.
    Interpolate {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        a: usize,
        #[arg(long)]
        b: usize,
        #[arg(long, default_value_t = 8)]
        steps: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() {
    std::process::exit(real_main());
}

fn real_main() -> i32 {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    if let Ok(threads) = std::env::var("VINEGEN_THREADS") {
        if let Ok(n) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }

    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return 0;
            }
            emit_error(1, &e.to_string());
            return 1;
        }
    };

    match run(cli.cmd) {
        Ok(()) => 0,
        Err(e) => {
            emit_error(e.code, &e.message);
            e.code
        }
    }
}

fn emit_error(code: i32, message: &str) {
    let line = serde_json::json!({ "code": code, "message": message });
    eprintln!("{line}");
}

// Library errors mapped onto the exit-code contract; explicit usage errors
// carry code 1.
struct CliError {
    code: i32,
    message: String,
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError {
            code: 2,
            message: format!("i/o error: {e}"),
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError {
            code: 2,
            message: format!("json error: {e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::UnknownLabel { .. } => 1,
            Error::Format(_) | Error::Io(_) | Error::Json(_) | Error::DimensionMismatch(_) => 2,
            Error::Domain(_) | Error::Numeric(_) | Error::DegenerateInput(_) => 3,
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> CliError {
    CliError {
        code: 1,
        message: message.into(),
    }
}

fn load_table(path: &PathBuf) -> Result<Dataset, Error> {
    datasets::read_csv(path)
}

fn load_vine_bundle(path: &PathBuf) -> Result<JointModel, Error> {
    let bundle = ModelBundle::load(path)?;
    match bundle.payload {
        BundlePayload::Vine(jm) => Ok(jm),
        other => Err(Error::Format(format!(
            "expected a vine bundle, found kind '{}'",
            other.kind_name()
        ))),
    }
}

// CSV with an `x0..x{d-1}` header even when there are no rows.
fn write_matrix_csv(path: &PathBuf, data: &[Vec<f64>], dim: usize) -> Result<(), Error> {
    if data.is_empty() {
        let header: Vec<String> = (0..dim).map(|j| format!("x{j}")).collect();
        std::fs::write(path, format!("{}\n", header.join(",")))?;
        return Ok(());
    }
    datasets::write_csv(path, data, None)
}

fn run(cmd: Cmd) -> Result<(), CliError> {
    match cmd {
        Cmd::Gen { dataset, n, seed, out, scale, noise_sd } => {
            let ds = match dataset {
                DatasetKind::Ring8 => {
                    datasets::gen_ring8_with(n, seed, scale.unwrap_or(2.0), noise_sd.unwrap_or(0.02))
                }
                DatasetKind::Grid25 => {
                    datasets::gen_grid25_with(n, seed, scale.unwrap_or(1.0), noise_sd.unwrap_or(0.05))
                }
                DatasetKind::Swissroll => datasets::gen_swiss_roll_with(
                    n,
                    seed,
                    scale.unwrap_or(0.1),
                    noise_sd.unwrap_or(0.01),
                ),
                DatasetKind::Cone3d => datasets::gen_cone3d(n, seed),
                DatasetKind::Digits8 => datasets::gen_digits8(n, seed),
            };
            datasets::write_csv(&out, &ds.x, ds.labels.as_deref())?;
            println!("wrote {} rows to {}", ds.x.len(), out.display());
            Ok(())
        }

        Cmd::FitVine { input, family, trunc, out } => {
            let ds = load_table(&input)?;
            let d = ds.x.first().map(|r| r.len()).unwrap_or(0);
            let trunc = trunc.unwrap_or_else(|| vinegen::vine::default_trunc_level(d));
            let jm = JointModel::fit(&ds.x, family.into(), trunc)?;
            let bytes = std::fs::read(&input)?;
            let bundle = ModelBundle::new(
                BundlePayload::Vine(jm),
                Metadata::new(None, Some(&bytes)),
            );
            bundle.save(&out)?;
            println!("fitted {}-dim vine (trunc {}) to {}", d, trunc, out.display());
            Ok(())
        }

        Cmd::Sample { model, n, seed, out } => {
            let jm = load_vine_bundle(&model)?;
            let rows = jm.sample(n, seed)?;
            write_matrix_csv(&out, &rows, jm.marginals.len())?;
            println!("wrote {} samples to {}", rows.len(), out.display());
            Ok(())
        }

        Cmd::Logdensity { model, input, out } => {
            let jm = load_vine_bundle(&model)?;
            let ds = load_table(&input)?;
            let ld = jm.log_density_batch(&ds.x)?;
            let mut text = String::from("logdensity\n");
            for v in &ld {
                text.push_str(&format!("{v}\n"));
            }
            std::fs::write(&out, text)?;
            println!("wrote {} log densities to {}", ld.len(), out.display());
            Ok(())
        }

        Cmd::AeTrain { data, latent, epochs, lr, wd, batch, seed, hidden, out } => {
            let ds = load_table(&data)?;
            let p = ds.x.first().map(|r| r.len()).unwrap_or(0);
            let arch = Architecture::dense(p, &hidden, latent);
            let cfg = TrainConfig {
                learning_rate: lr,
                weight_decay: wd,
                epochs,
                batch_size: batch,
                seed,
                ..TrainConfig::default()
            };
            let (ae, history) = autoencoder::train(&ds.x, &arch, &cfg)?;
            let bytes = std::fs::read(&data)?;
            let bundle = ModelBundle::new(
                BundlePayload::Ae(ae),
                Metadata::new(Some(seed), Some(&bytes)),
            );
            bundle.save(&out)?;
            println!(
                "trained autoencoder ({} epochs, final loss {}) to {}",
                epochs,
                history.last().unwrap(),
                out.display()
            );
            Ok(())
        }

        Cmd::Vcae { sub } => run_vcae(sub),

        Cmd::Eval { metric, a, b, model, alpha, seed, out } => {
            let da = load_table(&a)?;
            let report = match metric {
                MetricArg::Mmd => {
                    let db = load_table(b.as_ref().ok_or_else(|| usage("this metric needs --b"))?)?;
                    metrics::EvalReport {
                        mmd: Some(metrics::mmd(&da.x, &db.x, None)?),
                        n_a: da.x.len(),
                        n_b: db.x.len(),
                        ..Default::default()
                    }
                }
                MetricArg::C2st => {
                    let db = load_table(b.as_ref().ok_or_else(|| usage("this metric needs --b"))?)?;
                    metrics::EvalReport {
                        c2st_accuracy: Some(metrics::c2st(&da.x, &db.x, seed)?),
                        n_a: da.x.len(),
                        n_b: db.x.len(),
                        seed: Some(seed),
                        ..Default::default()
                    }
                }
                MetricArg::Nll => {
                    let jm = load_vine_bundle(model.as_ref().ok_or_else(|| usage("this metric needs --model"))?)?;
                    let ld = jm.log_density_batch(&da.x)?;
                    metrics::EvalReport {
                        mean_loglik: Some(ld.iter().sum::<f64>() / ld.len().max(1) as f64),
                        n_a: da.x.len(),
                        n_b: 0,
                        ..Default::default()
                    }
                }
                MetricArg::Coverage => {
                    let db = load_table(b.as_ref().ok_or_else(|| usage("this metric needs --b"))?)?;
                    let jm = load_vine_bundle(model.as_ref().ok_or_else(|| usage("this metric needs --model"))?)?;
                    let cov = metrics::coverage(
                        |row| jm.log_density(row).unwrap_or(f64::NEG_INFINITY),
                        &da.x,
                        &db.x,
                        alpha,
                    )?;
                    metrics::EvalReport {
                        coverage: Some(cov),
                        n_a: da.x.len(),
                        n_b: db.x.len(),
                        ..Default::default()
                    }
                }
            };
            std::fs::write(&out, serde_json::to_string_pretty(&report)?)?;
            println!("wrote report to {}", out.display());
            Ok(())
        }

        Cmd::Plot { input, cols, image_side, out } => {
            let ds = load_table(&input)?;
            let svg = match image_side {
                Some(side) => plot::image_grid_svg(&ds.x, side)?,
                None => {
                    if cols.len() != 2 {
                        return Err(usage("--cols needs exactly two comma-separated indices"));
                    }
                    plot::scatter_svg(&ds.x, cols[0], cols[1])?
                }
            };
            std::fs::write(&out, svg)?;
            println!("wrote {}", out.display());
            Ok(())
        }
    }
}



fn run_vcae(sub: VcaeCmd) -> Result<(), CliError> {
    match sub {
        VcaeCmd::Fit {
            data, latent, epochs, lr, wd, batch, seed, hidden, family, trunc, out,
        } => {
            let ds = load_table(&data)?;
            let p = ds.x.first().map(|r| r.len()).unwrap_or(0);
            let mut cfg = VcaeConfig::new(
                Architecture::dense(p, &hidden, latent),
                TrainConfig {
                    learning_rate: lr,
                    weight_decay: wd,
                    epochs,
                    batch_size: batch,
                    seed,
                    ..TrainConfig::default()
                },
                family.into(),
            );
            cfg.trunc_level = trunc;
            let model = pipeline::vcae_fit(&ds.x, ds.labels.as_deref(), &cfg)?;
            let bytes = std::fs::read(&data)?;
            let bundle = ModelBundle::new(
                BundlePayload::Vcae(model),
                Metadata::new(Some(seed), Some(&bytes)),
            );
            bundle.save(&out)?;
            println!("fitted vcae model to {}", out.display());
            Ok(())
        }

        VcaeCmd::Sample { model, n, seed, label, out } => {
            let bundle = ModelBundle::load(&model)?;
            let BundlePayload::Vcae(m) = &bundle.payload else {
                return Err(Error::Format(format!(
                    "expected a vcae bundle, found kind '{}'",
                    bundle.payload.kind_name()
                ))
                .into());
            };
            let rows = m.sample(n, seed, label)?;
            write_matrix_csv(&out, &rows, m.ae.input_dim())?;
            println!("wrote {} samples to {}", rows.len(), out.display());
            Ok(())
        }

        VcaeCmd::Interpolate { model, data, a, b, steps, out } => {
            let bundle = ModelBundle::load(&model)?;
            let BundlePayload::Vcae(m) = &bundle.payload else {
                return Err(Error::Format(format!(
                    "expected a vcae bundle, found kind '{}'",
                    bundle.payload.kind_name()
                ))
                .into());
            };
            let ds = load_table(&data)?;
            let get = |idx: usize| -> Result<&Vec<f64>, CliError> {
                ds.x.get(idx).ok_or_else(|| {
                    usage(format!("row {idx} out of range (file has {})", ds.x.len()))
                })
            };
            let frames = m.latent_interpolate(get(a)?, get(b)?, steps)?;
            write_matrix_csv(&out, &frames, m.ae.input_dim())?;
            println!("wrote {} frames to {}", frames.len(), out.display());
            Ok(())
        }
    }
}
