use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use renormlab::config::{self, RunConfig};
use renormlab::pipeline::{self, Command};
use renormlab::report::Report;
use renormlab::Error;

#[derive(Parser)]
#[command(name = "renormlab", version, about = "Discriminant towers of renormalizable group actions")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Per-level table, verdict and the configured probes.
    Analyze(Opts),
    /// Per-level table only.
    Tower(Opts),
    /// Search for a word fixing a basepoint cylinder and moving some point.
    QaScan(Opts),
    /// Coset tree as Graphviz DOT.
    TreeExport(Opts),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum Chain {
    Renormalization,
    VertexStabilizer,
}

#[derive(Args)]
struct Opts {
    /// JSON run configuration.
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// One of heisenberg, lattice, affine-unit, odometer, grigorchuk.
    #[arg(long)]
    preset: Option<String>,
    /// Backend parameter override, `key=value` (repeatable).
    #[arg(long = "param", value_name = "KEY=VALUE")]
    params: Vec<String>,
    #[arg(long, value_enum)]
    chain: Option<Chain>,
    #[arg(long)]
    depth: Option<usize>,
    #[arg(long)]
    window: Option<usize>,
    /// Word length bound for the search probes.
    #[arg(long)]
    word_bound: Option<usize>,
    #[arg(long)]
    cache_dir: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::ConfigInvalid(_) | Error::UnsupportedForChainKind(_) | Error::UnsupportedBackend(_) => 2,
        Error::IndexBudgetExceeded { .. } | Error::LevelBudgetExceeded { .. } | Error::TooLarge { .. } => 3,
        Error::CacheVersionMismatch(_) | Error::CacheCorrupt(_) => 4,
        _ => 1,
    }
}

fn load_config(command: Command, opts: &Opts) -> renormlab::Result<RunConfig> {
    let mut v = match (&opts.config, &opts.preset) {
        (Some(path), _) => RunConfig::from_path(path)?,
        (None, Some(name)) => config::preset(name)?,
        (None, None) => return Err(Error::ConfigInvalid("one of --config or --preset is required".into())),
    };
    for p in &opts.params {
        config::apply_param(&mut v, p)?;
    }
    let obj = v
        .as_object_mut()
        .ok_or_else(|| Error::ConfigInvalid("configuration must be a JSON object".into()))?;
    if let Some(c) = opts.chain {
        let name = match c {
            Chain::Renormalization => "renormalization",
            Chain::VertexStabilizer => "vertex_stabilizer",
        };
        obj.insert("chain".into(), json!(name));
    }
    if let Some(w) = opts.window {
        obj.insert("window".into(), json!(w));
    }
    if let Some(dir) = &opts.cache_dir {
        obj.insert("cache_dir".into(), json!(dir));
    }
    match command {
        Command::TreeExport => {
            if let Some(d) = opts.depth {
                obj.insert("tree_depth".into(), json!(d));
                obj.entry("depth").or_insert(json!(d));
            }
        }
        Command::QaScan => {
            let depth = opts.depth.or_else(|| obj.get("depth").and_then(Value::as_u64).map(|d| d as usize));
            let probes = obj.entry("probes").or_insert(json!({}));
            let qa = probes
                .as_object_mut()
                .ok_or_else(|| Error::ConfigInvalid("probes must be an object".into()))?
                .entry("qa")
                .or_insert(json!({"level": depth, "cylinder_depth": 1, "word_bound": 8}));
            if let Some(d) = opts.depth {
                qa["level"] = json!(d);
                obj.insert("depth".into(), json!(d));
            }
        }
        _ => {
            if let Some(d) = opts.depth {
                obj.insert("depth".into(), json!(d));
            }
        }
    }
    if let Some(b) = opts.word_bound {
        if let Some(probes) = v.get_mut("probes").and_then(Value::as_object_mut) {
            for name in ["qa", "kernel", "self_replicating"] {
                if let Some(p) = probes.get_mut(name).and_then(Value::as_object_mut) {
                    p.insert("word_bound".into(), json!(b));
                }
            }
        }
    }
    RunConfig::from_value(v)
}

fn render(report: &Report, format: Format) -> String {
    match format {
        Format::Json => report.to_json(),
        Format::Csv => report.to_csv(),
        Format::Text => match &report.tree {
            Some(t) => t.dot.clone(),
            None => report.to_text(),
        },
    }
}

fn execute(command: Command, opts: &Opts) -> renormlab::Result<()> {
    let cfg = load_config(command, opts)?;
    let report = pipeline::run(command, &cfg)?;
    let text = render(&report, opts.format);
    match &opts.out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, opts) = match &cli.command {
        Sub::Analyze(o) => (Command::Analyze, o),
        Sub::Tower(o) => (Command::Tower, o),
        Sub::QaScan(o) => (Command::QaScan, o),
        Sub::TreeExport(o) => (Command::TreeExport, o),
    };
    match execute(command, opts) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("renormlab: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
