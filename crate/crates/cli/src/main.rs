//! `dse` command-line tool: scene simulation, pseudo-label generation,
//! evaluation and loss reporting.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use dse_core::dse::{
    DEFAULT_DIAGONAL_LOADING, DEFAULT_DISTANCE_M, DEFAULT_EPSILON, DEFAULT_SPEED_OF_SOUND,
};
use dse_core::losses::DEFAULT_ALPHA;
use dse_core::pipeline::{
    evaluate_manifest, evaluate_waves, format_table, loss_between_waves, mask_by_timestamps,
    read_scene_spec, read_wav, run_dse_batch, write_scene, write_wav_f32, BatchOptions, EvalRow,
    Manifest, SegmentList,
};
use dse_core::spectral::{
    DEFAULT_COMPRESSION, DEFAULT_HOP_MS, DEFAULT_SAMPLE_RATE, DEFAULT_WINDOW_MS,
};
use dse_core::{DseConfig, LossConfig, SceneSpec, StftConfig};

const EXIT_USAGE: u8 = 1;
const EXIT_PARTIAL: u8 = 2;

#[derive(Parser, Debug)]
#[command(
    name = "dse",
    version,
    about = "Direct sound estimation from close-talk references"
)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    #[arg(long, global = true, default_value_t = DEFAULT_WINDOW_MS)]
    stft_window_ms: f64,
    #[arg(long, global = true, default_value_t = DEFAULT_HOP_MS)]
    stft_hop_ms: f64,
    #[arg(long, global = true, default_value_t = DEFAULT_SAMPLE_RATE)]
    sample_rate: u32,
    /// Largest talker-to-microphone distance in metres.
    #[arg(long, global = true, default_value_t = DEFAULT_DISTANCE_M)]
    distance_m: f64,
    #[arg(long, global = true, default_value_t = DEFAULT_SPEED_OF_SOUND)]
    speed_of_sound: f64,
    #[arg(long, global = true, default_value_t = DEFAULT_EPSILON)]
    epsilon: f64,
    #[arg(long, global = true, default_value_t = DEFAULT_ALPHA)]
    alpha: f64,
    #[arg(long, global = true, default_value_t = DEFAULT_COMPRESSION)]
    compress_c: f64,
    /// Filter order override; derived from the geometry when absent.
    #[arg(long, global = true)]
    order: Option<usize>,
    #[arg(long, global = true, default_value_t = DEFAULT_DIAGONAL_LOADING)]
    diag_loading: f64,
    /// Worker threads, 0 for one per core.
    #[arg(long, global = true, default_value_t = 0)]
    workers: usize,
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Synthesise a scene and write its WAV set, ground truth and manifest.
    Simulate {
        /// Scene document (TOML). Without it a single-speaker scene is built
        /// from --distance-m and --seed.
        #[arg(long)]
        scene: Option<PathBuf>,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Generate pseudo-labels for every record of a manifest.
    Dse {
        #[arg(long)]
        manifest: PathBuf,
        /// Write the JSON report here instead of stdout.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Record per-utterance wall-clock time in the report.
        #[arg(long)]
        timings: bool,
    },
    /// Score estimates against references.
    Eval {
        #[arg(long, conflicts_with_all = ["estimate", "reference"])]
        manifest: Option<PathBuf>,
        #[arg(long, requires = "reference")]
        estimate: Option<PathBuf>,
        #[arg(long, requires = "estimate")]
        reference: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// MSE, cosine and combined losses between two WAVs.
    Loss { a: PathBuf, b: PathBuf },
    /// Zero a waveform outside one speaker's segments.
    Mask {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        segments: PathBuf,
        #[arg(long)]
        speaker: String,
        #[arg(long)]
        output: PathBuf,
    },
}

impl Common {
    fn stft(&self) -> StftConfig {
        StftConfig {
            sample_rate: self.sample_rate,
            window_ms: self.stft_window_ms,
            hop_ms: self.stft_hop_ms,
            ..StftConfig::default()
        }
    }

    fn dse(&self, stft: &StftConfig) -> DseConfig {
        DseConfig {
            speed_of_sound: self.speed_of_sound,
            epsilon: self.epsilon,
            diagonal_loading: self.diag_loading,
            order_override: self.order,
            ..DseConfig::for_stft(self.distance_m, stft)
        }
    }
}

fn run(cli: Cli) -> Result<u8, Box<dyn std::error::Error>> {
    let common = &cli.common;
    let stft = common.stft();
    stft.validate()?;
    match cli.command {
        Command::Simulate { scene, out_dir } => {
            let mut spec = match scene {
                Some(path) => read_scene_spec(&path)?,
                None => {
                    let mut s =
                        SceneSpec::single_speaker(common.seed.unwrap_or(0), common.distance_m, 0.5);
                    s.speed_of_sound_mps = common.speed_of_sound;
                    s.stft = stft.clone();
                    s
                }
            };
            if let Some(seed) = common.seed {
                spec.seed = seed;
            }
            let (_, truth) = write_scene(&spec, &out_dir)?;
            println!("{}", serde_json::to_string_pretty(&truth)?);
        }
        Command::Dse {
            manifest,
            report,
            timings,
        } => {
            let manifest = Manifest::read(&manifest)?;
            let opts = BatchOptions {
                dse: common.dse(&stft),
                stft,
                workers: common.workers,
                record_timings: timings,
            };
            let out = run_dse_batch(&manifest, &opts)?;
            let text = out.to_json();
            match report {
                Some(path) => write_text(&path, &text)?,
                None => print!("{text}"),
            }
            eprintln!(
                "filter order {}: {} succeeded, {} failed",
                out.filter_order, out.succeeded, out.failed
            );
            if out.failed > 0 {
                return Ok(EXIT_PARTIAL);
            }
        }
        Command::Eval {
            manifest,
            estimate,
            reference,
            json,
        } => {
            let rows = match (manifest, estimate, reference) {
                (Some(m), _, _) => {
                    evaluate_manifest(&Manifest::read(&m)?, &stft, common.compress_c)
                }
                (None, Some(e), Some(r)) => {
                    let report =
                        evaluate_waves(&read_wav(&e)?, &read_wav(&r)?, &stft, common.compress_c)?;
                    vec![EvalRow {
                        utterance_id: e.display().to_string(),
                        metrics: Some(report),
                        error: None,
                    }]
                }
                _ => return Err("eval needs --manifest or both --estimate and --reference".into()),
            };
            if json {
                println!("{}", serde_json::to_string_pretty(&rows)?);
            } else {
                print!("{}", format_table(&rows));
            }
            if rows.iter().any(|r| r.error.is_some()) {
                return Ok(EXIT_PARTIAL);
            }
        }
        Command::Loss { a, b } => {
            let cfg = LossConfig {
                alpha: common.alpha,
            };
            let report = loss_between_waves(
                &read_wav(&a)?,
                &read_wav(&b)?,
                &stft,
                common.compress_c,
                &cfg,
            )?;
            println!("{}", serde_json::to_string_pretty(&report)?);
        }
        Command::Mask {
            input,
            segments,
            speaker,
            output,
        } => {
            let w = read_wav(&input)?;
            let segs = SegmentList::read(&segments)?;
            write_wav_f32(&output, &mask_by_timestamps(&w, &segs, &speaker)?)?;
        }
    }
    Ok(0)
}

fn write_text(path: &Path, text: &str) -> std::io::Result<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    std::fs::write(path, text)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            log::error!("{e}");
            eprintln!("error: {e}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}
