//! `basmajian`: verify the non-Archimedean Basmajian identity for a
//! representation described by a plain-text config, plus length,
//! classification, and gap diagnostics.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use basmajian_core::berkovich::geometric_verify;
use basmajian_core::error::{Error, Result};
use basmajian_core::identity::{verify, IdentityReport, Status};
use basmajian_core::linalg::{anosov_gap_report, classify_pgl2, translation_length, Pgl2Class};
use basmajian_core::presets;
use basmajian_core::words::Word;

use basmajian_cli::config::ConfigFile;

#[derive(Parser)]
#[command(name = "basmajian", version, about = "Exact verification of the non-Archimedean Basmajian identity")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Run the identity verification on a config file
    Verify {
        config: PathBuf,
        /// Use the Berkovich-tree pipeline (d = 2 only)
        #[arg(long)]
        geometric: bool,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        /// Override the config's enumeration cutoff
        #[arg(long)]
        cutoff: Option<usize>,
        /// Override the config's stabilization window
        #[arg(long)]
        window: Option<usize>,
    },
    /// Print the translation length of a word's image
    Length { config: PathBuf, word: String },
    /// Classify a word's image in PGL(2, k)
    Classify { config: PathBuf, word: String },
    /// Print the per-length singular-value gap table
    Gap {
        config: PathBuf,
        #[arg(long, default_value_t = 4)]
        max_len: usize,
    },
    /// Write a built-in example config (ex51, ex52, veronese3)
    Preset {
        name: String,
        /// Output path (default: <name>.cfg)
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

fn load(path: &PathBuf) -> Result<ConfigFile> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    ConfigFile::parse(&text)
}

fn run_verify(
    path: &PathBuf,
    geometric: bool,
    format: Format,
    cutoff: Option<usize>,
    window: Option<usize>,
) -> Result<IdentityReport> {
    let cfg = load(path)?;
    let mut rep = cfg.to_representation()?;
    if let Some(c) = cutoff {
        rep = rep.with_cutoff(c);
    }
    if let Some(w) = window {
        rep = rep.with_window(w);
    }
    rep.validate()?;
    let report = if geometric {
        geometric_verify(&rep)?
    } else {
        verify(&rep)?
    };
    match format {
        Format::Text => print!("{}", report.to_text()),
        Format::Json => println!("{}", report.to_json()),
    }
    Ok(report)
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Verify {
            config,
            geometric,
            format,
            cutoff,
            window,
        } => {
            let report = run_verify(&config, geometric, format, cutoff, window)?;
            Ok(match report.status {
                Status::Verified => ExitCode::SUCCESS,
                Status::Partial | Status::Mismatch => ExitCode::from(2),
            })
        }
        Command::Length { config, word } => {
            let rep = load(&config)?.to_representation()?;
            let w = Word::parse(&word, rep.surface.rank())?;
            let len = translation_length(&rep.word_image(&w)?)?;
            println!("LENGTH {len}");
            Ok(ExitCode::SUCCESS)
        }
        Command::Classify { config, word } => {
            let rep = load(&config)?.to_representation()?;
            if rep.d != 2 {
                return Err(Error::Dimension("classify needs d = 2".into()));
            }
            let w = Word::parse(&word, rep.surface.rank())?;
            let class = match classify_pgl2(&rep.word_image(&w)?)? {
                Pgl2Class::Hyperbolic => "HYPERBOLIC",
                Pgl2Class::Parabolic => "PARABOLIC",
                Pgl2Class::StrictlyElliptic => "STRICTLY_ELLIPTIC",
                Pgl2Class::Identity => "IDENTITY",
            };
            println!("CLASS {class}");
            Ok(ExitCode::SUCCESS)
        }
        Command::Gap { config, max_len } => {
            let rep = load(&config)?.to_representation()?;
            for (len, gap) in anosov_gap_report(&rep.images, max_len)? {
                println!("LEN {len} GAP {gap}");
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Preset { name, output } => {
            let rep = presets::by_name(&name)
                .ok_or_else(|| Error::Invalid(format!("unknown preset `{name}`")))??;
            let cfg = ConfigFile::from_representation(&rep);
            let path = output.unwrap_or_else(|| PathBuf::from(format!("{name}.cfg")));
            fs::write(&path, cfg.print())
                .map_err(|e| Error::Invalid(format!("{}: {e}", path.display())))?;
            println!("WROTE {}", path.display());
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
