//! The `survx` command line: degrade, train, upscale, score, evaluate,
//! benchmark and serve the MOS rating API.

pub mod commands;
mod error;
pub mod serve;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use survx_core::eval::DEFAULT_ALPHA;
use survx_core::models::InputMode;

pub use error::CliError;

#[derive(Debug, Parser)]
#[command(name = "survx", version, about = "Super-resolution pipeline and perceptual evaluation")]
#[command(arg_required_else_help = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Shrink an image by the upscale factor (antialiased bicubic).
    Degrade(DegradeArgs),
    /// Train an ESPCN bundle on high-resolution images.
    TrainEspcn(TrainArgs),
    /// Upscale a low-resolution image.
    Upscale(UpscaleArgs),
    /// Score candidate images against references listed in a manifest.
    Score(ScoreArgs),
    /// Fréchet distance between the feature populations of two directories.
    Fid(FidArgs),
    /// Build the MOS comparison report from ratings and metric scores.
    Evaluate(EvaluateArgs),
    /// Time upscalers on a seeded input.
    Bench(BenchArgs),
    /// Serve the MOS rating API.
    ServeMos(ServeArgs),
    /// Write the seeded random feature extractor as a model bundle.
    InitExtractor(InitExtractorArgs),
}

#[derive(Debug, Args)]
pub struct DegradeArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long = "out")]
    pub output: PathBuf,
    #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u32).range(1..))]
    pub factor: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OptimizerArg {
    Sgd,
    Adam,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// High-resolution images, or directories of them.
    #[arg(long = "hr", required = true, num_args = 1..)]
    pub hr: Vec<PathBuf>,
    /// Output bundle stem; writes `<stem>.json` and `<stem>.nnwb`.
    #[arg(long = "out")]
    pub output: PathBuf,
    #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u32).range(1..))]
    pub factor: u32,
    #[arg(long, default_value = "luma", value_parser = parse_mode)]
    pub mode: InputMode,
    #[arg(long, default_value_t = 500)]
    pub epochs: usize,
    #[arg(long, default_value_t = 4)]
    pub batch: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = OptimizerArg::Sgd)]
    pub optimizer: OptimizerArg,
    /// Keep low-resolution patches in full precision instead of rounding
    /// them to 8 bits as a file round trip would.
    #[arg(long)]
    pub no_quantize: bool,
    /// Per-epoch loss log (CSV).
    #[arg(long)]
    pub log: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum UpscaleMethod {
    Bicubic,
    Espcn,
    Bundle,
}

#[derive(Debug, Args)]
pub struct UpscaleArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long = "out")]
    pub output: PathBuf,
    #[arg(long, value_enum)]
    pub method: UpscaleMethod,
    /// Bundle stem, required for `espcn` and `bundle`.
    #[arg(long)]
    pub model: Option<PathBuf>,
    #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u32).range(1..))]
    pub factor: u32,
    /// Channel handling for network methods; inferred from the bundle when
    /// omitted.
    #[arg(long, value_parser = parse_mode)]
    pub mode: Option<InputMode>,
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    /// CSV with columns reference_path, candidate_path, method_id.
    #[arg(long)]
    pub manifest: PathBuf,
    /// Comma-separated subset of mse,psnr,ssim,lpips,dists.
    #[arg(long, default_value = "mse,psnr,ssim,lpips,dists")]
    pub metrics: String,
    /// Output CSV; standard output when omitted.
    #[arg(long = "out")]
    pub output: Option<PathBuf>,
    /// Feature extractor bundle stem; the seeded random extractor otherwise.
    #[arg(long)]
    pub extractor: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FidArgs {
    #[arg(long)]
    pub a: PathBuf,
    #[arg(long)]
    pub b: PathBuf,
    #[arg(long)]
    pub extractor: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub mos: PathBuf,
    /// Score table written by `score`.
    #[arg(long)]
    pub scores: PathBuf,
    /// Latency table written by `bench`.
    #[arg(long)]
    pub latency: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_ALPHA)]
    pub alpha: f64,
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, default_value_t = 20)]
    pub reps: usize,
    /// Side of the square low-resolution input.
    #[arg(long, default_value_t = 64)]
    pub size: usize,
    #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u32).range(1..))]
    pub factor: u32,
    /// Trained ESPCN bundle; a seeded untrained one otherwise.
    #[arg(long)]
    pub espcn: Option<PathBuf>,
    #[arg(long, default_value_t = 16)]
    pub srgan_blocks: usize,
    /// Extra `name=stem` bundles to time (RGB mode).
    #[arg(long = "bundle")]
    pub bundles: Vec<String>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long = "out")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long, default_value_t = 8080)]
    pub port: u16,
    /// Directory holding manifest.csv, the images and ratings.jsonl.
    #[arg(long, env = "SURVX_DATA_DIR", default_value = "mos-data")]
    pub data_dir: PathBuf,
    /// Static rating UI to serve at `/`.
    #[arg(long)]
    pub ui_dir: Option<PathBuf>,
    /// Seed of the per-rater image order.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct InitExtractorArgs {
    #[arg(long = "out")]
    pub output: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 3)]
    pub channels: usize,
}

fn parse_mode(s: &str) -> Result<InputMode, String> {
    s.parse()
}

/// Parses `argv` and runs the selected subcommand. Help and version requests
/// come back as `Ok` after printing.
pub fn run<I, T>(argv: I) -> Result<(), CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    print!("{e}");
                    Ok(())
                }
                _ => Err(CliError::Usage(e.render().to_string())),
            };
        }
    };
    dispatch(cli.command)
}

pub fn dispatch(command: Command) -> Result<(), CliError> {
    match command {
        Command::Degrade(a) => commands::degrade(&a),
        Command::TrainEspcn(a) => commands::train(&a),
        Command::Upscale(a) => commands::upscale(&a),
        Command::Score(a) => commands::score(&a),
        Command::Fid(a) => commands::fid(&a),
        Command::Evaluate(a) => commands::evaluate(&a),
        Command::Bench(a) => commands::bench(&a),
        Command::ServeMos(a) => serve::serve_blocking(&a),
        Command::InitExtractor(a) => commands::init_extractor(&a),
    }
}
