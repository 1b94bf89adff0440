//! Reports: the per-level table, the verdict and probe results, rendered as
//! JSON, CSV or plain text.

use std::fmt::Write;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::analyzer::{ContractingLevel, KernelWord, QaOutcome, SelfReplication, Verdict};
use crate::chain::{ChainKind, DiscriminantTower};
use crate::config::RunConfig;
use crate::perm::AbelianShape;

pub const REPORT_FORMAT: &str = "renormlab-report";
pub const REPORT_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelRow {
    pub level: usize,
    pub size: usize,
    pub quotient_order: String,
    pub discriminant_order: String,
    /// Abelian invariants label, `"non-abelian"`, or `"unknown"` when too
    /// large to enumerate.
    pub discriminant_shape: String,
    pub discriminant_cyclic: Option<bool>,
    /// For the map `D_ℓ → D_{ℓ−1}`; absent at level 0.
    pub bonding_surjective: Option<bool>,
    pub bonding_bijective: Option<bool>,
}

impl LevelRow {
    pub fn table(disc: &DiscriminantTower) -> Vec<LevelRow> {
        disc.levels
            .iter()
            .map(|l| {
                let bonding = l.level.checked_sub(1).map(|b| &disc.bondings[b]);
                LevelRow {
                    level: l.level,
                    size: l.size,
                    quotient_order: l.quotient.order().to_string(),
                    discriminant_order: l.discriminant.order().to_string(),
                    discriminant_shape: l.shape.as_ref().map_or_else(|| "unknown".into(), AbelianShape::label),
                    discriminant_cyclic: l.shape.as_ref().map(|s| s.is_cyclic()),
                    bonding_surjective: bonding.map(|b| b.surjective),
                    bonding_bijective: bonding.map(|b| b.bijective),
                }
            })
            .collect()
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct KernelReport {
    pub level: usize,
    pub word_bound: usize,
    pub words: Vec<KernelWord>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ContractingReport {
    pub element: String,
    pub levels: Vec<ContractingLevel>,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct ProbeResults {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub qa: Option<QaOutcome>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kernel: Option<KernelReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub contracting: Option<ContractingReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub self_replicating: Option<SelfReplication>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TreeSummary {
    pub depth: usize,
    pub vertex_count: usize,
    pub edge_count: usize,
    pub spherically_homogeneous: bool,
    pub generators_preserve_edges: bool,
    pub dot: String,
}

/// The only fields that differ between two runs of one configuration.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Runtime {
    pub timestamp_unix: u64,
    pub elapsed_ms: u64,
    pub cache_hit: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Report {
    pub format: String,
    pub version: u32,
    pub command: String,
    pub config: RunConfig,
    pub backend: Value,
    pub chain: ChainKind,
    pub levels: Vec<LevelRow>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verdict: Option<Verdict>,
    pub probes: ProbeResults,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tree: Option<TreeSummary>,
    pub runtime: Runtime,
}

pub const CSV_HEADER: &str =
    "level,size,quotient_order,discriminant_order,discriminant_shape,bonding_surjective,bonding_bijective";

fn opt_bool(b: Option<bool>) -> &'static str {
    match b {
        Some(true) => "true",
        Some(false) => "false",
        None => "",
    }
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    /// The growth table.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for r in &self.levels {
            writeln!(
                out,
                "{},{},{},{},{},{},{}",
                r.level,
                r.size,
                r.quotient_order,
                r.discriminant_order,
                r.discriminant_shape,
                opt_bool(r.bonding_surjective),
                opt_bool(r.bonding_bijective)
            )
            .unwrap();
        }
        out
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(
            out,
            "{} {}: {} ({} chain)",
            self.format,
            self.command,
            self.backend,
            self.chain.as_str()
        )
        .unwrap();
        if !self.levels.is_empty() {
            let mut rows = vec![["level", "n", "|Q|", "|D|", "D", "bonding"].map(String::from)];
            for r in &self.levels {
                let bonding = match (r.bonding_surjective, r.bonding_bijective) {
                    (Some(_), Some(true)) => "bijective",
                    (Some(true), _) => "surjective",
                    (Some(false), _) => "not surjective",
                    _ => "-",
                };
                rows.push([
                    r.level.to_string(),
                    r.size.to_string(),
                    r.quotient_order.clone(),
                    r.discriminant_order.clone(),
                    r.discriminant_shape.clone(),
                    bonding.to_string(),
                ]);
            }
            let width = |i: usize| rows.iter().map(|r| r[i].chars().count()).max().unwrap_or(0);
            let widths: Vec<usize> = (0..6).map(width).collect();
            for r in &rows {
                writeln!(
                    out,
                    "{:>w0$} {:>w1$} {:>w2$} {:>w3$}  {:<w4$}  {}",
                    r[0],
                    r[1],
                    r[2],
                    r[3],
                    r[4],
                    r[5],
                    w0 = widths[0],
                    w1 = widths[1],
                    w2 = widths[2],
                    w3 = widths[3],
                    w4 = widths[4]
                )
                .unwrap();
            }
        }
        if let Some(v) = &self.verdict {
            writeln!(out, "verdict: {} (depth {}, window {})", v.kind.label(), v.evidence_depth, v.window).unwrap();
        }
        if let Some(qa) = &self.probes.qa {
            match qa {
                QaOutcome::Witness(w) => writeln!(
                    out,
                    "qa: witness \"{}\" at level {} fixes U_{} ({} points) and moves {} to {}",
                    w.word_text, w.level, w.cylinder_depth, w.cylinder_size, w.moved_point, w.moved_to
                ),
                QaOutcome::NoneFound { level, cylinder_depth, word_bound } => writeln!(
                    out,
                    "qa: no witness at level {level}, cylinder depth {cylinder_depth}, words up to length {word_bound}"
                ),
            }
            .unwrap();
        }
        if let Some(k) = &self.probes.kernel {
            let words: Vec<String> = k
                .words
                .iter()
                .map(|w| if w.acts_trivially { format!("{} (trivial on X)", w.word_text) } else { w.word_text.clone() })
                .collect();
            writeln!(out, "kernel (level {}, length <= {}): [{}]", k.level, k.word_bound, words.join(", ")).unwrap();
        }
        if let Some(c) = &self.probes.contracting {
            let cells: Vec<String> = c
                .levels
                .iter()
                .map(|l| match l.trivial_at {
                    Some(n) => format!("{}:{n}", l.level),
                    None => format!("{}:>{}", l.level, l.max_iterate),
                })
                .collect();
            writeln!(out, "contracting {}: {}", c.element, cells.join(" ")).unwrap();
        }
        if let Some(s) = &self.probes.self_replicating {
            writeln!(out, "self-replicating: {}", if s.passed { "pass" } else { "fail" }).unwrap();
            for r in &s.results {
                match (&r.word, &r.section) {
                    (Some(w), Some(sec)) => writeln!(out, "  {}: {} has section {}", r.generator, w, sec),
                    _ => writeln!(out, "  {}: not found", r.generator),
                }
                .unwrap();
            }
        }
        if let Some(t) = &self.tree {
            writeln!(out, "tree: depth {}, {} vertices, {} edges", t.depth, t.vertex_count, t.edge_count).unwrap();
        }
        out
    }

    /// The report without its runtime block, for comparing runs.
    pub fn deterministic_json(&self) -> Value {
        let mut v = serde_json::to_value(self).expect("report serializes");
        v.as_object_mut().expect("object").remove("runtime");
        v
    }
}
