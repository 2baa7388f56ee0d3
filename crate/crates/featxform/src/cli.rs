//! Command-line surface. Every subcommand reports results on stdout as
//! `key=value` lines and writes artifacts to the paths it is given.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use featxform_core::analysis::{
    alignment_matrix, empirical_cdf, histogram, interval_width_report, shannon_entropy, shared_range,
    symbol_histogram, DEFAULT_KL_EPSILON,
};
use featxform_core::codec::{bpfp, decode, encode};
use featxform_core::harness::{
    fit_codebook, run_cross_matrix, run_sweep, Dataset, FitOptions, RDPoint, SweepSpec, DEFAULT_TRUNCATE_PCT,
};
use featxform_core::synth::{generate, sample_fit_set, SourceKind, SyntheticSourceSpec, DEFAULT_FIT_SET_SIZE};
use featxform_core::transform::{forward_transform, inverse_transform, mse, transform_distortion, DEFAULT_LEVELS};
use featxform_core::{FeatureTensor, FitMode};

use crate::config::{SweepConfig, DEFAULT_SWEEP_LEVELS};
use crate::error::{Error, Result};
use crate::files::{load_codebook, load_stream, save_codebook, save_stream, write_bytes};
use crate::npy::{load_npy, save_npy};
use crate::report;

#[derive(Debug, Parser)]
#[command(name = "featxform", version, about = "Peaky-to-balanced feature transform and coding toolkit")]
pub struct Cli {
    /// Seed for every randomised step
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Extra diagnostics on stderr
    #[arg(long, short, global = true)]
    pub verbose: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit a codebook and write it as a DTCB file
    Fit(FitArgs),
    /// Transform and entropy-code a tensor into a DTFC stream
    Encode(EncodeArgs),
    /// Decode a DTFC stream back to an NPY tensor
    Decode(DecodeArgs),
    /// Histograms, CDFs, entropies, KL matrix and interval widths
    Analyze(AnalyzeArgs),
    /// Rate-distortion sweep over level counts
    Sweep(SweepArgs),
    /// Cross-distribution matrix: every source's codebook on every source
    Cross(CrossArgs),
    /// Write a synthetic source as NPY
    Gen(GenArgs),
}

#[derive(Debug, Clone, Args)]
pub struct FitFlags {
    #[arg(long, default_value_t = FitOptions::default().restarts)]
    pub restarts: u32,
    #[arg(long, default_value_t = FitOptions::default().tol)]
    pub tol: f64,
    #[arg(long, default_value_t = FitOptions::default().max_iters)]
    pub max_iters: u32,
    /// Tail fraction clipped by the uniform fit
    #[arg(long, default_value_t = DEFAULT_TRUNCATE_PCT)]
    pub truncate_pct: f64,
}

impl FitFlags {
    fn options(&self) -> FitOptions {
        FitOptions {
            restarts: self.restarts,
            tol: self.tol,
            max_iters: self.max_iters,
            truncate_pct: self.truncate_pct,
        }
    }
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[arg(long, required = true, num_args = 1..)]
    pub input: Vec<PathBuf>,
    #[arg(long, default_value = "lloyd-max")]
    pub mode: String,
    #[arg(long, default_value_t = DEFAULT_LEVELS)]
    pub levels: u32,
    #[command(flatten)]
    pub fit: FitFlags,
    /// Number of input files drawn for fitting [default: min(10, inputs)]
    #[arg(long)]
    pub k_fit: Option<usize>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct EncodeArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub codebook: PathBuf,
    /// Expected level count; fails when the codebook disagrees
    #[arg(long)]
    pub levels: Option<u32>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct DecodeArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Original tensor, to report mse of the reconstruction
    #[arg(long)]
    pub reference: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[arg(long, required = true, num_args = 1..)]
    pub input: Vec<PathBuf>,
    #[arg(long, default_value_t = 256)]
    pub bins: usize,
    /// Codebook for symbol histograms and interval widths
    #[arg(long)]
    pub codebook: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_KL_EPSILON)]
    pub epsilon: f64,
    /// Prepended to every output file name
    #[arg(long)]
    pub out_prefix: PathBuf,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// TOML sweep description; replaces the data and level flags
    #[arg(long, conflicts_with_all = ["fit_input", "eval_input", "modes", "levels"])]
    pub spec: Option<PathBuf>,
    #[arg(long = "fit-input", num_args = 1.., required_unless_present = "spec")]
    pub fit_input: Vec<PathBuf>,
    /// Evaluation tensors [default: the fit tensors]
    #[arg(long = "eval-input", num_args = 1..)]
    pub eval_input: Vec<PathBuf>,
    #[arg(long, value_delimiter = ',', default_value = "lloyd-max")]
    pub modes: Vec<String>,
    #[arg(long, value_delimiter = ',')]
    pub levels: Vec<u32>,
    #[command(flatten)]
    pub fit: FitFlags,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CrossArgs {
    #[arg(long, required = true, num_args = 2..)]
    pub inputs: Vec<PathBuf>,
    #[arg(long, default_value = "lloyd-max")]
    pub mode: String,
    #[arg(long, default_value_t = DEFAULT_LEVELS)]
    pub levels: u32,
    #[command(flatten)]
    pub fit: FitFlags,
    /// Rows of axis 0 drawn for fitting; the rest is held out. Inputs with
    /// no more rows than this are fit and evaluated on themselves.
    #[arg(long, default_value_t = DEFAULT_FIT_SET_SIZE)]
    pub k_fit: usize,
    /// Excess-mse matrix
    #[arg(long)]
    pub out: PathBuf,
    /// Every matrix entry as an RD row
    #[arg(long)]
    pub points: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long)]
    pub kind: String,
    #[arg(long)]
    pub count: usize,
    /// Split the values into this many rows of equal length
    #[arg(long)]
    pub rows: Option<usize>,
    #[arg(long)]
    pub out: PathBuf,
}

pub fn run(cli: &Cli, out: &mut dyn Write, diag: &mut dyn Write) -> Result<()> {
    let mut ctx = Ctx { seed: cli.seed, verbose: cli.verbose, out, diag };
    match &cli.command {
        Command::Fit(a) => ctx.fit(a),
        Command::Encode(a) => ctx.encode(a),
        Command::Decode(a) => ctx.decode(a),
        Command::Analyze(a) => ctx.analyze(a),
        Command::Sweep(a) => ctx.sweep(a),
        Command::Cross(a) => ctx.cross(a),
        Command::Gen(a) => ctx.gen(a),
    }
}

struct Ctx<'a> {
    seed: u64,
    verbose: bool,
    out: &'a mut dyn Write,
    diag: &'a mut dyn Write,
}

fn real(x: f64) -> String {
    format!("{x:.16e}")
}

fn load_all(paths: &[PathBuf]) -> Result<Vec<FeatureTensor>> {
    paths.iter().map(load_npy).collect()
}

fn pool(tensors: &[FeatureTensor]) -> Result<FeatureTensor> {
    let tag = tensors.iter().map(|t| t.source_tag()).collect::<Vec<_>>().join("+");
    Ok(FeatureTensor::pool(tensors, tag)?)
}

fn with_prefix(prefix: &Path, name: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(name);
    PathBuf::from(s)
}

fn unique_tags(tensors: &[FeatureTensor]) -> Result<Vec<String>> {
    let tags: Vec<String> = tensors.iter().map(|t| t.source_tag().to_string()).collect();
    for (i, t) in tags.iter().enumerate() {
        if tags[..i].contains(t) {
            return Err(Error::Param(format!("two inputs share the name '{t}'")));
        }
    }
    Ok(tags)
}

impl Ctx<'_> {
    fn kv(&mut self, key: &str, value: impl std::fmt::Display) -> Result<()> {
        writeln!(self.out, "{key}={value}").map_err(|e| Error::io("<stdout>", e))
    }

    fn note(&mut self, msg: impl std::fmt::Display) {
        if self.verbose {
            let _ = writeln!(self.diag, "{msg}");
        }
    }

    fn fit(&mut self, a: &FitArgs) -> Result<()> {
        let mode = FitMode::from_name(&a.mode)?;
        let tensors = load_all(&a.input)?;
        let k = a.k_fit.unwrap_or(DEFAULT_FIT_SET_SIZE.min(tensors.len()));
        if k == 0 {
            return Err(Error::Param("--k-fit must be >= 1".into()));
        }
        let chosen = if k == tensors.len() { tensors } else { sample_fit_set(&tensors, k, self.seed)? };
        let data = pool(&chosen)?;
        self.note(format_args!("fitting {} on {} values from {} file(s)", mode, data.len(), chosen.len()));
        let (cb, report) = fit_codebook(&data, mode, a.levels, self.seed, &a.fit.options())?;
        save_codebook(&cb, &a.out)?;
        self.kv("mode", mode)?;
        self.kv("levels", cb.levels())?;
        self.kv("fit_elements", data.len())?;
        match report {
            Some(r) => {
                for (i, t) in r.restart_traces.iter().enumerate() {
                    self.note(format_args!("restart {i}: {} iterations, final {:e}", t.len(), t[t.len() - 1]));
                }
                self.kv("final_distortion", real(r.final_distortion))?;
                self.kv("iterations", r.iterations)?;
                self.kv("reseed_events", r.reseed_events)?;
                self.kv("best_restart", r.best_restart)
            }
            None => {
                self.kv("final_distortion", real(transform_distortion(&data, &cb)))?;
                self.kv("iterations", 0)
            }
        }
    }

    fn encode(&mut self, a: &EncodeArgs) -> Result<()> {
        let data = load_npy(&a.input)?;
        let cb = load_codebook(&a.codebook)?;
        if let Some(levels) = a.levels {
            if levels != cb.levels() {
                return Err(featxform_core::Error::LevelMismatch { expected: levels, found: cb.levels() }.into());
            }
        }
        let plane = forward_transform(&data, &cb);
        let stream = encode(&plane, &cb)?;
        save_stream(&stream, &a.out)?;
        self.kv("elements", data.len())?;
        self.kv("levels", cb.levels())?;
        self.kv("bytes", stream.as_bytes().len())?;
        self.kv("payload_bits", stream.payload_bits()?)?;
        self.kv("header_bits", stream.header_bits()?)?;
        self.kv("bpfp", real(bpfp(&stream, data.len())?))?;
        self.kv("mse", real(transform_distortion(&data, &cb)))
    }

    fn decode(&mut self, a: &DecodeArgs) -> Result<()> {
        let stream = load_stream(&a.input)?;
        let (plane, cb) = decode(&stream)?;
        let recon = inverse_transform(&plane, &cb)?;
        save_npy(&recon, &a.out)?;
        self.kv("elements", plane.len())?;
        self.kv("levels", cb.levels())?;
        self.kv("bpfp", real(bpfp(&stream, plane.len())?))?;
        if let Some(r) = &a.reference {
            let original = load_npy(r)?;
            self.kv("mse", real(mse(&original, &recon)?))?;
        }
        Ok(())
    }

    fn analyze(&mut self, a: &AnalyzeArgs) -> Result<()> {
        let tensors = load_all(&a.input)?;
        let tags = unique_tags(&tensors)?;
        let range = if tensors.len() > 1 {
            Some(shared_range(&tensors.iter().collect::<Vec<_>>())?)
        } else {
            None
        };
        let cb = a.codebook.as_ref().map(load_codebook).transpose()?;
        if let Some(dir) = with_prefix(&a.out_prefix, "x").parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        }
        let mut raw = Vec::new();
        let mut symbols = Vec::new();
        for (t, tag) in tensors.iter().zip(&tags) {
            let h = histogram(t, a.bins, range)?;
            let cdf = empirical_cdf(&h)?;
            write_bytes(with_prefix(&a.out_prefix, &format!("{tag}.hist.csv")), report::histogram_csv(&h, &cdf).as_bytes())?;
            let svg = report::histogram_svg(&h, &cdf, tag);
            write_bytes(with_prefix(&a.out_prefix, &format!("{tag}.hist.svg")), svg.as_bytes())?;
            self.kv(&format!("{tag}.elements"), t.len())?;
            self.kv(&format!("{tag}.entropy_bits"), real(shannon_entropy(&h)?))?;
            if let Some(cb) = &cb {
                let sh = symbol_histogram(&forward_transform(t, cb));
                let scdf = empirical_cdf(&sh)?;
                let path = with_prefix(&a.out_prefix, &format!("{tag}.symbols.csv"));
                write_bytes(path, report::histogram_csv(&sh, &scdf).as_bytes())?;
                self.kv(&format!("{tag}.symbol_entropy_bits"), real(shannon_entropy(&sh)?))?;
                symbols.push((tag.clone(), sh));
            }
            raw.push((tag.clone(), h));
        }
        if raw.len() > 1 {
            let m = alignment_matrix(&raw, a.epsilon)?;
            write_bytes(with_prefix(&a.out_prefix, "kl.csv"), report::kl_csv(&m).as_bytes())?;
            if !symbols.is_empty() {
                let m = alignment_matrix(&symbols, a.epsilon)?;
                write_bytes(with_prefix(&a.out_prefix, "kl_symbols.csv"), report::kl_csv(&m).as_bytes())?;
            }
        }
        if let Some(cb) = &cb {
            let widths = interval_width_report(cb)?;
            write_bytes(with_prefix(&a.out_prefix, "widths.csv"), report::widths_csv(&widths).as_bytes())?;
            self.kv("mean_width", real(widths.mean_width))?;
        }
        Ok(())
    }

    fn sweep(&mut self, a: &SweepArgs) -> Result<()> {
        let cfg = match &a.spec {
            Some(path) => SweepConfig::load(path)?,
            None => SweepConfig {
                fit: a.fit_input.clone(),
                eval: if a.eval_input.is_empty() { a.fit_input.clone() } else { a.eval_input.clone() },
                modes: a.modes.iter().map(|m| FitMode::from_name(m)).collect::<featxform_core::Result<_>>()?,
                levels: if a.levels.is_empty() { DEFAULT_SWEEP_LEVELS.to_vec() } else { a.levels.clone() },
                seed: None,
                options: a.fit.options(),
            },
        };
        let fit = pool(&load_all(&cfg.fit)?)?;
        let eval = pool(&load_all(&cfg.eval)?)?;
        let seed = cfg.seed.unwrap_or(self.seed);
        let mut points: Vec<RDPoint> = Vec::new();
        for &mode in &cfg.modes {
            let spec = SweepSpec {
                levels_list: cfg.levels.clone(),
                fit_mode: mode,
                fit_source: fit.clone(),
                eval_source: eval.clone(),
                seed,
                options: cfg.options,
            };
            let pts = run_sweep(&spec)?;
            for p in &pts {
                self.note(format_args!("{} L={} bpfp={:.4} mse={:e}", p.mode, p.levels, p.bpfp, p.mse));
            }
            points.extend(pts);
        }
        write_bytes(&a.out, report::rd_csv(&points)?.as_bytes())?;
        if let Some(svg) = &a.svg {
            write_bytes(svg, report::rd_svg(&points)?.as_bytes())?;
        }
        self.kv("points", points.len())
    }

    fn cross(&mut self, a: &CrossArgs) -> Result<()> {
        let mode = FitMode::from_name(&a.mode)?;
        let tensors = load_all(&a.inputs)?;
        let tags = unique_tags(&tensors)?;
        let sources: Vec<Dataset> = tensors
            .into_iter()
            .zip(tags)
            .map(|(t, tag)| {
                if t.shape()[0] > a.k_fit {
                    self.note(format_args!("{tag}: fit on {} of {} rows", a.k_fit, t.shape()[0]));
                    Dataset::split(tag, &t.split_outer(), a.k_fit, self.seed)
                } else {
                    self.note(format_args!("{tag}: self-fit"));
                    Ok(Dataset::self_fit(t.with_tag(tag)))
                }
            })
            .collect::<featxform_core::Result<_>>()?;
        let matrix = run_cross_matrix(&sources, mode, a.levels, self.seed, &a.fit.options())?;
        write_bytes(&a.out, report::cross_excess_csv(&matrix).as_bytes())?;
        if let Some(p) = &a.points {
            let flat: Vec<RDPoint> = matrix.iter().flatten().cloned().collect();
            write_bytes(p, report::rd_csv(&flat)?.as_bytes())?;
        }
        let diagonal_wins = (0..matrix.len()).all(|j| matrix.iter().all(|row| row[j].mse >= matrix[j][j].mse - 1e-9));
        self.kv("sources", matrix.len())?;
        self.kv("diagonal_is_column_min", diagonal_wins)
    }

    fn gen(&mut self, a: &GenArgs) -> Result<()> {
        let spec = SyntheticSourceSpec::new(SourceKind::from_name(&a.kind)?, self.seed);
        let flat = generate(&spec, a.count)?;
        let tensor = match a.rows {
            None => flat,
            Some(r) if r > 0 && a.count % r == 0 => {
                let tag = flat.source_tag().to_string();
                FeatureTensor::new(vec![r, a.count / r], flat.into_values(), tag)?
            }
            Some(r) => return Err(Error::Param(format!("--rows {r} does not divide --count {}", a.count))),
        };
        save_npy(&tensor, &a.out)?;
        self.kv("kind", spec.kind.name())?;
        self.kv("elements", tensor.len())?;
        self.kv("shape", tensor.shape().iter().map(|d| d.to_string()).collect::<Vec<_>>().join("x"))
    }
}
