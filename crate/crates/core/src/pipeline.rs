//! Runs a configuration end to end: tower (cached when asked), tables,
//! verdict and probes.

use std::time::{Instant, SystemTime, UNIX_EPOCH};

use num_bigint::BigInt;

use crate::analyzer::{
    classify_discriminant, contracting_probe, kernel_probe, qa_witness_search, self_replicating_probe,
};
use crate::backend::{AffineUnitGroup, Backend, HeisenbergGroup, LatticeGroup, WreathAutomaton, Word};
use crate::chain::{cache, ChainSpec, DiscriminantTower, Tower};
use crate::config::{BackendConfig, Coordinates, QaProbeConfig, RunConfig};
use crate::error::{Error, Result};
use crate::report::{
    ContractingReport, KernelReport, LevelRow, ProbeResults, Report, Runtime, TreeSummary, REPORT_FORMAT,
    REPORT_VERSION,
};
use crate::tree::{export_dot, CosetTree, DotOptions};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Analyze,
    Tower,
    QaScan,
    TreeExport,
}

impl Command {
    pub fn as_str(self) -> &'static str {
        match self {
            Command::Analyze => "analyze",
            Command::Tower => "tower",
            Command::QaScan => "qa-scan",
            Command::TreeExport => "tree-export",
        }
    }
}

pub fn run_analyze(config: &RunConfig) -> Result<Report> {
    run(Command::Analyze, config)
}

pub fn run_tower(config: &RunConfig) -> Result<Report> {
    run(Command::Tower, config)
}

/// Uses `probes.qa`, or level `depth`, cylinder depth 1 and words up to
/// length 8 when it is absent.
pub fn run_qa_scan(config: &RunConfig) -> Result<Report> {
    run(Command::QaScan, config)
}

pub fn run_tree_export(config: &RunConfig) -> Result<Report> {
    run(Command::TreeExport, config)
}

pub fn run(command: Command, config: &RunConfig) -> Result<Report> {
    config.validate()?;
    match &config.backend {
        BackendConfig::Heisenberg { p, q, coordinates } => match coordinates {
            Coordinates::I64 => execute(command, config, HeisenbergGroup::<i64>::new(*p, *q)?, None),
            Coordinates::I128 => execute(command, config, HeisenbergGroup::<i128>::new(*p, *q)?, None),
            Coordinates::Bigint => execute(command, config, HeisenbergGroup::<BigInt>::new(*p, *q)?, None),
        },
        BackendConfig::Lattice { k, m, h, coordinates } => match coordinates {
            Coordinates::I64 => execute(command, config, LatticeGroup::<i64>::new(*k, *m, h.clone())?, None),
            Coordinates::I128 => execute(command, config, LatticeGroup::<i128>::new(*k, *m, h.clone())?, None),
            Coordinates::Bigint => execute(command, config, LatticeGroup::<BigInt>::new(*k, *m, h.clone())?, None),
        },
        BackendConfig::AffineUnit { coordinates } => match coordinates {
            Coordinates::I64 => execute(command, config, AffineUnitGroup::<i64>::new(), None),
            Coordinates::I128 => execute(command, config, AffineUnitGroup::<i128>::new(), None),
            Coordinates::Bigint => execute(command, config, AffineUnitGroup::<BigInt>::new(), None),
        },
        other => {
            let automaton = other.automaton()?.expect("automaton backend");
            execute(command, config, automaton.clone(), Some(&automaton))
        }
    }
}

fn qa_settings(config: &RunConfig) -> QaProbeConfig {
    config.probes.qa.clone().unwrap_or(QaProbeConfig {
        level: config.depth,
        cylinder_depth: 1,
        word_bound: 8,
    })
}

fn execute<B: Backend + Clone>(
    command: Command,
    config: &RunConfig,
    backend: B,
    automaton: Option<&WreathAutomaton>,
) -> Result<Report> {
    let started = Instant::now();
    let kind = config.chain_kind()?;
    let depth = match command {
        Command::Analyze => config.required_depth(),
        Command::Tower => config.depth,
        Command::QaScan => {
            let qa = qa_settings(config);
            if qa.cylinder_depth >= qa.level {
                return Err(Error::ConfigInvalid(format!(
                    "qa scan: cylinder depth {} must be below level {}",
                    qa.cylinder_depth, qa.level
                )));
            }
            qa.level
        }
        Command::TreeExport => config.tree_depth.unwrap_or(config.depth),
    };
    // Fails early when the level is beyond the backend's arithmetic.
    backend.coset_id(&backend.identity(), depth)?;
    let spec = ChainSpec { kind, max_level: depth, max_index: config.max_index };
    let (tower, cache_hit) = cache::load_or_build(backend, &spec, config.cache_dir.as_deref())?;

    let mut levels = Vec::new();
    let mut verdict = None;
    let mut probes = ProbeResults::default();
    let mut tree = None;
    match command {
        Command::Analyze | Command::Tower => {
            let disc = DiscriminantTower::compute_to(&tower, config.depth)?;
            levels = LevelRow::table(&disc);
            if command == Command::Analyze {
                if config.depth >= 2 {
                    let window = config.window.min(config.depth - 1);
                    verdict = Some(classify_discriminant(&tower, &disc, window)?);
                }
                probes = run_probes(config, &tower, automaton)?;
            }
        }
        Command::QaScan => {
            let qa = qa_settings(config);
            probes.qa = Some(qa_witness_search(&tower, qa.level, qa.cylinder_depth, qa.word_bound)?);
        }
        Command::TreeExport => {
            let t = CosetTree::from_tower(&tower, depth)?;
            tree = Some(TreeSummary {
                depth,
                vertex_count: t.vertex_count(),
                edge_count: t.edge_count(),
                spherically_homogeneous: t.is_spherically_homogeneous(),
                generators_preserve_edges: t.generators_preserve_edges(&tower)?,
                dot: export_dot(&t, &DotOptions::default()),
            });
        }
    }

    let timestamp_unix = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    Ok(Report {
        format: REPORT_FORMAT.into(),
        version: REPORT_VERSION,
        command: command.as_str().into(),
        config: config.clone(),
        backend: tower.backend().describe(),
        chain: kind,
        levels,
        verdict,
        probes,
        tree,
        runtime: Runtime {
            timestamp_unix,
            elapsed_ms: started.elapsed().as_millis() as u64,
            cache_hit,
        },
    })
}

fn run_probes<B: Backend>(
    config: &RunConfig,
    tower: &Tower<B>,
    automaton: Option<&WreathAutomaton>,
) -> Result<ProbeResults> {
    let p = &config.probes;
    let mut out = ProbeResults::default();
    if let Some(qa) = &p.qa {
        out.qa = Some(qa_witness_search(tower, qa.level, qa.cylinder_depth, qa.word_bound)?);
    }
    if let Some(k) = &p.kernel {
        out.kernel = Some(KernelReport {
            level: k.level,
            word_bound: k.word_bound,
            words: kernel_probe(tower, k.level, k.word_bound)?,
        });
    }
    if let Some(c) = &p.contracting {
        let backend = tower.backend();
        let g = Word::parse(&c.element, &backend.generator_names())?.evaluate(backend);
        out.contracting = Some(ContractingReport {
            element: c.element.clone(),
            levels: contracting_probe(tower, &g, c.max_level, c.max_iterate)?,
        });
    }
    if let Some(s) = &p.self_replicating {
        let a = automaton.ok_or_else(|| {
            Error::UnsupportedBackend(format!("{}: self-replication needs an automaton", tower.backend().name()))
        })?;
        out.self_replicating = Some(self_replicating_probe(a, s.word_bound, s.depth)?);
    }
    Ok(out)
}
