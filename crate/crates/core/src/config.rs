//! Run configuration: backend selection, chain kind, depths and probes.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::analyzer::DEFAULT_WINDOW;
use crate::backend::{AutomatonState, WreathAutomaton, DEFAULT_COMPARISON_DEPTH};
use crate::chain::{ChainKind, DEFAULT_MAX_INDEX};
use crate::error::{Error, Result};

pub const PRESETS: [&str; 5] = ["heisenberg", "lattice", "affine-unit", "odometer", "grigorchuk"];

/// Coordinate type for the integer backends.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Coordinates {
    #[default]
    I64,
    I128,
    Bigint,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateConfig {
    pub name: String,
    pub perm: Vec<u32>,
    /// State names, `"e"` for the identity.
    pub sections: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case", deny_unknown_fields)]
pub enum BackendConfig {
    Heisenberg {
        p: u64,
        q: u64,
        #[serde(default)]
        coordinates: Coordinates,
    },
    Lattice {
        k: usize,
        m: u64,
        /// Generators of `H` as image arrays on `0..k`.
        h: Vec<Vec<u32>>,
        #[serde(default)]
        coordinates: Coordinates,
    },
    AffineUnit {
        #[serde(default = "bigint")]
        coordinates: Coordinates,
    },
    Odometer {
        #[serde(default)]
        basepoint: Vec<u32>,
        #[serde(default = "default_comparison_depth")]
        comparison_depth: usize,
    },
    Grigorchuk {
        #[serde(default)]
        basepoint: Vec<u32>,
        #[serde(default = "default_comparison_depth")]
        comparison_depth: usize,
    },
    Automaton {
        alphabet: usize,
        states: Vec<StateConfig>,
        /// Image word of each state, e.g. `{"a": "a a"}`.
        #[serde(default)]
        phi: Option<std::collections::BTreeMap<String, String>>,
        #[serde(default)]
        basepoint: Vec<u32>,
        #[serde(default = "default_comparison_depth")]
        comparison_depth: usize,
    },
}

fn bigint() -> Coordinates {
    Coordinates::Bigint
}

fn default_comparison_depth() -> usize {
    DEFAULT_COMPARISON_DEPTH
}

impl BackendConfig {
    pub fn name(&self) -> &'static str {
        match self {
            BackendConfig::Heisenberg { .. } => "heisenberg",
            BackendConfig::Lattice { .. } => "lattice",
            BackendConfig::AffineUnit { .. } => "affine-unit",
            BackendConfig::Odometer { .. } => "odometer",
            BackendConfig::Grigorchuk { .. } => "grigorchuk",
            BackendConfig::Automaton { .. } => "automaton",
        }
    }

    pub fn is_automaton(&self) -> bool {
        matches!(
            self,
            BackendConfig::Odometer { .. } | BackendConfig::Grigorchuk { .. } | BackendConfig::Automaton { .. }
        )
    }

    /// Builds the automaton for the wreath backends.
    pub fn automaton(&self) -> Result<Option<WreathAutomaton>> {
        let (base, basepoint, depth) = match self {
            BackendConfig::Odometer { basepoint, comparison_depth } => {
                (WreathAutomaton::odometer(), basepoint, *comparison_depth)
            }
            BackendConfig::Grigorchuk { basepoint, comparison_depth } => {
                (WreathAutomaton::grigorchuk(), basepoint, *comparison_depth)
            }
            BackendConfig::Automaton { alphabet, states, phi, basepoint, comparison_depth } => {
                (custom_automaton(*alphabet, states, phi.as_ref())?, basepoint, *comparison_depth)
            }
            _ => return Ok(None),
        };
        if depth == 0 {
            return Err(Error::ConfigInvalid("comparison_depth must be positive".into()));
        }
        Ok(Some(base.with_basepoint(basepoint.clone())?.with_comparison_depth(depth)))
    }
}

fn custom_automaton(
    alphabet: usize,
    states: &[StateConfig],
    phi: Option<&std::collections::BTreeMap<String, String>>,
) -> Result<WreathAutomaton> {
    let lookup = |name: &str| {
        states
            .iter()
            .position(|s| s.name == name)
            .ok_or_else(|| Error::ConfigInvalid(format!("unknown automaton state {name:?}")))
    };
    let mut built = Vec::with_capacity(states.len());
    for s in states {
        if s.name == "e" || s.name.contains(char::is_whitespace) || s.name.contains('^') {
            return Err(Error::ConfigInvalid(format!("invalid state name {:?}", s.name)));
        }
        let sections = s
            .sections
            .iter()
            .map(|t| if t == "e" { Ok(None) } else { lookup(t).map(Some) })
            .collect::<Result<Vec<_>>>()?;
        built.push(AutomatonState { name: s.name.clone(), perm: s.perm.clone(), sections });
    }
    let phi = match phi {
        None => None,
        Some(map) => {
            let names: Vec<String> = states.iter().map(|s| s.name.clone()).collect();
            let mut images = Vec::with_capacity(states.len());
            for s in states {
                let text = map
                    .get(&s.name)
                    .ok_or_else(|| Error::ConfigInvalid(format!("phi has no image for state {:?}", s.name)))?;
                let word = crate::backend::Word::parse(text, &names)?;
                images.push(word.0.iter().map(|l| (l.generator as usize, l.inverse)).collect());
            }
            if let Some(extra) = map.keys().find(|k| lookup(k).is_err()) {
                return Err(Error::ConfigInvalid(format!("phi mentions unknown state {extra:?}")));
            }
            Some(images)
        }
    };
    WreathAutomaton::new(alphabet, built, phi)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QaProbeConfig {
    pub level: usize,
    pub cylinder_depth: usize,
    pub word_bound: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelProbeConfig {
    pub level: usize,
    pub word_bound: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContractingProbeConfig {
    /// A word in the generator names, e.g. `"c"` or `"a b a^-1"`.
    pub element: String,
    pub max_level: usize,
    pub max_iterate: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SelfReplicatingProbeConfig {
    pub word_bound: usize,
    pub depth: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub qa: Option<QaProbeConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kernel: Option<KernelProbeConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub contracting: Option<ContractingProbeConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub self_replicating: Option<SelfReplicatingProbeConfig>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub backend: BackendConfig,
    /// Defaults to `renormalization` when the backend has φ.
    #[serde(default)]
    pub chain: Option<ChainKind>,
    pub depth: usize,
    #[serde(default = "default_window")]
    pub window: usize,
    #[serde(default = "default_max_index")]
    pub max_index: usize,
    #[serde(default)]
    pub probes: ProbeConfig,
    /// Depth of the exported coset tree; defaults to `depth`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tree_depth: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cache_dir: Option<PathBuf>,
}

fn default_window() -> usize {
    DEFAULT_WINDOW
}

fn default_max_index() -> usize {
    DEFAULT_MAX_INDEX
}

impl RunConfig {
    pub fn from_value(v: Value) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_value(v).map_err(|e| Error::ConfigInvalid(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &std::path::Path) -> Result<Value> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::ConfigInvalid(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| Error::ConfigInvalid(format!("{}: {e}", path.display())))
    }

    /// Parameter checks that do not need any computation.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::ConfigInvalid(m));
        match &self.backend {
            BackendConfig::Heisenberg { p, q, .. } if *p < 2 || *q < 2 => {
                return bad(format!("heisenberg needs p, q >= 2 (got p={p}, q={q})"))
            }
            BackendConfig::Lattice { k, m, .. } if *k == 0 || *k > 64 || *m < 2 => {
                return bad(format!("lattice needs 1 <= k <= 64 and m >= 2 (got k={k}, m={m})"))
            }
            _ => {}
        }
        if self.window == 0 {
            return bad("window must be at least 1".into());
        }
        if self.max_index == 0 {
            return bad("max_index must be positive".into());
        }
        if let Some(qa) = &self.probes.qa {
            if qa.cylinder_depth >= qa.level {
                return bad(format!(
                    "qa probe: cylinder depth {} must be below level {}",
                    qa.cylinder_depth, qa.level
                ));
            }
        }
        if self.probes.self_replicating.is_some() && !self.backend.is_automaton() {
            return Err(Error::UnsupportedBackend(format!(
                "{}: the self-replication probe needs an automaton backend",
                self.backend.name()
            )));
        }
        if self.probes.contracting.is_some() && self.chain_kind()? != ChainKind::Renormalization {
            return Err(Error::UnsupportedForChainKind("the contracting probe needs a renormalization chain".into()));
        }
        self.backend.automaton()?;
        self.chain_kind()?;
        Ok(())
    }

    pub fn chain_kind(&self) -> Result<ChainKind> {
        let has_phi = match &self.backend {
            BackendConfig::Grigorchuk { .. } => false,
            BackendConfig::Automaton { phi, .. } => phi.is_some(),
            _ => true,
        };
        let kind = self.chain.unwrap_or(if has_phi {
            ChainKind::Renormalization
        } else {
            ChainKind::VertexStabilizer
        });
        match kind {
            ChainKind::Renormalization if !has_phi => Err(Error::UnsupportedForChainKind(format!(
                "{} has no renormalization map",
                self.backend.name()
            ))),
            ChainKind::VertexStabilizer if !self.backend.is_automaton() => Err(Error::UnsupportedForChainKind(
                format!("{} does not act on a rooted tree", self.backend.name()),
            )),
            k => Ok(k),
        }
    }

    /// Deepest level any requested output needs.
    pub fn required_depth(&self) -> usize {
        let p = &self.probes;
        [
            Some(self.depth),
            p.qa.as_ref().map(|q| q.level),
            p.kernel.as_ref().map(|k| k.level),
            p.contracting.as_ref().map(|c| c.max_level),
        ]
        .into_iter()
        .flatten()
        .max()
        .unwrap_or(0)
    }
}

/// The configuration behind a preset name, as JSON so that it can be
/// adjusted before parsing.
pub fn preset(name: &str) -> Result<Value> {
    let v = match name {
        "heisenberg" => json!({
            "backend": {"name": "heisenberg", "p": 2, "q": 3},
            "depth": 3,
            "probes": {
                "qa": {"level": 3, "cylinder_depth": 1, "word_bound": 8},
                "contracting": {"element": "c", "max_level": 3, "max_iterate": 6}
            }
        }),
        "lattice" => json!({
            "backend": {"name": "lattice", "k": 3, "m": 2, "h": [[1, 2, 0]]},
            "depth": 4,
            "probes": {
                "kernel": {"level": 3, "word_bound": 2},
                "contracting": {"element": "h1", "max_level": 4, "max_iterate": 6}
            }
        }),
        "affine-unit" => json!({
            "backend": {"name": "affine-unit"},
            "depth": 8
        }),
        "odometer" => json!({
            "backend": {"name": "odometer"},
            "depth": 8,
            "probes": {
                "qa": {"level": 6, "cylinder_depth": 1, "word_bound": 12},
                "self_replicating": {"word_bound": 4, "depth": 8}
            }
        }),
        "grigorchuk" => json!({
            "backend": {"name": "grigorchuk"},
            "depth": 8,
            "probes": {
                "qa": {"level": 6, "cylinder_depth": 1, "word_bound": 12},
                "self_replicating": {"word_bound": 10, "depth": 8}
            }
        }),
        other => {
            return Err(Error::ConfigInvalid(format!(
                "unknown preset {other:?} (known: {})",
                PRESETS.join(", ")
            )))
        }
    };
    Ok(v)
}

/// Sets `backend.<key>` from a `key=value` pair; the value is read as JSON
/// and falls back to a plain string.
pub fn apply_param(config: &mut Value, assignment: &str) -> Result<()> {
    let (key, raw) = assignment
        .split_once('=')
        .ok_or_else(|| Error::ConfigInvalid(format!("parameter {assignment:?} is not key=value")))?;
    if key.is_empty() || key == "name" {
        return Err(Error::ConfigInvalid(format!("cannot set backend parameter {key:?}")));
    }
    let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    let backend = config
        .get_mut("backend")
        .and_then(Value::as_object_mut)
        .ok_or_else(|| Error::ConfigInvalid("config has no backend object".into()))?;
    backend.insert(key.to_string(), value);
    Ok(())
}
