//! The coset tree: vertices at depth `ℓ` are the points of `X_ℓ`, and each
//! vertex hangs below its projection.

use std::collections::HashSet;
use std::fmt::Write;

use serde::Serialize;

use crate::backend::Backend;
use crate::chain::Tower;
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct CosetTree {
    sizes: Vec<usize>,
    /// `parents[ℓ]` maps depth-`ℓ` vertices to depth-`(ℓ−1)` vertices; empty at 0.
    parents: Vec<Vec<u32>>,
}

impl CosetTree {
    pub fn from_tower<B: Backend>(tower: &Tower<B>, depth: usize) -> Result<Self> {
        let mut sizes = Vec::with_capacity(depth + 1);
        let mut parents = Vec::with_capacity(depth + 1);
        for l in 0..=depth {
            let action = tower.level(l)?;
            sizes.push(action.size());
            parents.push(action.projection().map(<[u32]>::to_vec).unwrap_or_default());
        }
        Ok(CosetTree { sizes, parents })
    }

    pub fn depth(&self) -> usize {
        self.sizes.len() - 1
    }

    pub fn level_size(&self, level: usize) -> usize {
        self.sizes[level]
    }

    pub fn vertex_count(&self) -> usize {
        self.sizes.iter().sum()
    }

    pub fn edge_count(&self) -> usize {
        self.parents.iter().map(Vec::len).sum()
    }

    pub fn parent(&self, level: usize, vertex: u32) -> Option<u32> {
        self.parents.get(level).and_then(|p| p.get(vertex as usize)).copied()
    }

    /// Number of children of each depth-`level` vertex.
    pub fn child_counts(&self, level: usize) -> Vec<usize> {
        let mut counts = vec![0; self.sizes[level]];
        if let Some(p) = self.parents.get(level + 1) {
            for &v in p {
                counts[v as usize] += 1;
            }
        }
        counts
    }

    /// Every vertex above the leaves has the same number of children as the
    /// other vertices at its depth.
    pub fn is_spherically_homogeneous(&self) -> bool {
        (0..self.depth()).all(|l| {
            let c = self.child_counts(l);
            c.iter().all(|&k| k == c[0] && k > 0)
        })
    }

    /// Every generator maps edges to edges.
    pub fn generators_preserve_edges<B: Backend>(&self, tower: &Tower<B>) -> Result<bool> {
        for l in 1..=self.depth() {
            let upper = tower.level(l)?.generator_perms();
            let lower = tower.level(l - 1)?.generator_perms();
            for (p, q) in upper.iter().zip(lower) {
                for (v, &parent) in self.parents[l].iter().enumerate() {
                    if self.parents[l][p.apply(v as u32) as usize] != q.apply(parent) {
                        return Ok(false);
                    }
                }
            }
        }
        Ok(true)
    }
}

/// A finite union of cylinders, given by the depth-`k` vertices it contains.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct ClopenSet {
    pub depth: usize,
    pub vertices: Vec<u32>,
}

impl ClopenSet {
    pub fn new(depth: usize, mut vertices: Vec<u32>) -> Self {
        vertices.sort_unstable();
        vertices.dedup();
        ClopenSet { depth, vertices }
    }

    pub fn whole(tree: &CosetTree, depth: usize) -> Self {
        ClopenSet { depth, vertices: (0..tree.level_size(depth) as u32).collect() }
    }

    /// The cylinder below `vertex` at depth `vertex_depth`, written at depth `depth`.
    pub fn cylinder(tree: &CosetTree, vertex_depth: usize, vertex: u32, depth: usize) -> Self {
        ClopenSet::new(vertex_depth, vec![vertex]).refine(tree, depth)
    }

    /// The same set written at a greater depth.
    pub fn refine(&self, tree: &CosetTree, depth: usize) -> Self {
        assert!(depth >= self.depth, "refinement only goes deeper");
        let mut members: HashSet<u32> = self.vertices.iter().copied().collect();
        for l in self.depth + 1..=depth {
            members = (0..tree.level_size(l) as u32)
                .filter(|&v| members.contains(&tree.parents[l][v as usize]))
                .collect();
        }
        ClopenSet::new(depth, members.into_iter().collect())
    }

    pub fn contains(&self, vertex: u32) -> bool {
        self.vertices.binary_search(&vertex).is_ok()
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct AdaptedReport {
    /// Every translate equals the set or is disjoint from it.
    pub adapted: bool,
    /// Number of distinct translates found.
    pub orbit_size: usize,
    /// `false` when a word bound cut the orbit enumeration short.
    pub complete: bool,
}

/// Enumerates the orbit of `set` under `Q_k` (words of length at most
/// `word_bound` when given).
pub fn adapted_check<B: Backend>(tower: &Tower<B>, set: &ClopenSet, word_bound: Option<usize>) -> Result<AdaptedReport> {
    let perms = tower.level(set.depth)?.generator_perms();
    let mut seen: HashSet<Vec<u32>> = HashSet::new();
    seen.insert(set.vertices.clone());
    let mut frontier = vec![set.vertices.clone()];
    let mut adapted = true;
    let mut layers = 0;
    while !frontier.is_empty() && word_bound.is_none_or(|b| layers < b) {
        let mut next = Vec::new();
        for s in &frontier {
            for p in perms {
                let mut image: Vec<u32> = s.iter().map(|&v| p.apply(v)).collect();
                image.sort_unstable();
                if seen.insert(image.clone()) {
                    if image.iter().any(|v| set.contains(*v)) {
                        adapted = false;
                    }
                    next.push(image);
                }
            }
        }
        frontier = next;
        layers += 1;
    }
    Ok(AdaptedReport { adapted, orbit_size: seen.len(), complete: frontier.is_empty() })
}

#[derive(Clone, Debug, Serialize)]
pub struct LambdaStep {
    pub step: usize,
    /// `λ^step(U_start)` at depth `resolution + step`.
    pub set: ClopenSet,
    /// It is the basepoint cylinder of this depth.
    pub cylinder_depth: usize,
}

/// Iterates the shift `λ` on `U_start`, written at depth `resolution`.
/// Each image is checked to be the next basepoint cylinder.
pub fn lambda_orbit<B: Backend>(
    tower: &Tower<B>,
    start: usize,
    steps: usize,
    resolution: usize,
) -> Result<Vec<LambdaStep>> {
    if resolution < start {
        return Err(Error::ConfigInvalid(format!(
            "resolution {resolution} must be at least the start level {start}"
        )));
    }
    tower.level(resolution + steps)?;
    let mut current = tower.basepoint_cylinder(start, resolution)?;
    let mut out = Vec::with_capacity(steps + 1);
    for step in 0..=steps {
        let depth = resolution + step;
        let expected = tower.basepoint_cylinder(start + step, depth)?;
        let set = ClopenSet::new(depth, current.clone());
        if set.vertices != expected {
            return Err(Error::ChainInconsistent(format!(
                "λ^{step}(U_{start}) is not the basepoint cylinder of depth {}",
                start + step
            )));
        }
        out.push(LambdaStep { step, set, cylinder_depth: start + step });
        if step < steps {
            let s = tower.shift_map(depth)?;
            current = current.iter().map(|&v| s[v as usize]).collect();
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, Default)]
pub struct DotOptions {
    pub graph_name: Option<String>,
    /// Export only down to this depth.
    pub max_depth: Option<usize>,
}

/// DOT digraph with vertices `"ℓ:index"` and edges parent → child.
pub fn export_dot(tree: &CosetTree, options: &DotOptions) -> String {
    let depth = options.max_depth.unwrap_or(tree.depth()).min(tree.depth());
    let name = options.graph_name.as_deref().unwrap_or("coset_tree");
    let mut out = String::new();
    writeln!(out, "digraph \"{name}\" {{").unwrap();
    for l in 0..=depth {
        for v in 0..tree.level_size(l) {
            writeln!(out, "  \"{l}:{v}\";").unwrap();
        }
    }
    for l in 1..=depth {
        for (v, p) in tree.parents[l].iter().enumerate() {
            writeln!(out, "  \"{}:{p}\" -> \"{l}:{v}\";", l - 1).unwrap();
        }
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::backend::{HeisenbergGroup, WreathAutomaton};
    use crate::chain::{ChainKind, ChainSpec};

    fn odometer(depth: usize) -> Tower<WreathAutomaton> {
        Tower::build(WreathAutomaton::odometer(), ChainSpec::new(ChainKind::Renormalization, depth)).unwrap()
    }

    #[test]
    fn binary_tree() {
        let t = odometer(3);
        let tree = CosetTree::from_tower(&t, 3).unwrap();
        assert_eq!(tree.vertex_count(), 15);
        assert!(tree.is_spherically_homogeneous());
        assert!(tree.generators_preserve_edges(&t).unwrap());
    }

    #[test]
    fn cylinders_and_whole_space_are_adapted() {
        let t = odometer(3);
        let tree = CosetTree::from_tower(&t, 3).unwrap();
        let u = ClopenSet::new(3, t.basepoint_cylinder(1, 3).unwrap());
        let r = adapted_check(&t, &u, None).unwrap();
        assert!(r.adapted && r.complete);
        assert_eq!(r.orbit_size, 2);
        let r = adapted_check(&t, &ClopenSet::whole(&tree, 2), None).unwrap();
        assert!(r.adapted);
        assert_eq!(r.orbit_size, 1);
    }

    #[test]
    fn dot_export() {
        let t = odometer(1);
        let tree = CosetTree::from_tower(&t, 1).unwrap();
        let dot = export_dot(&tree, &DotOptions::default());
        assert_eq!(dot.matches(';').count(), 5);
        assert!(dot.contains("\"0:0\" -> \"1:1\""));
    }

    #[test]
    fn lambda_squared_is_a_point() {
        let t = Tower::build(HeisenbergGroup::<i64>::new(2, 3).unwrap(), ChainSpec::new(ChainKind::Renormalization, 2))
            .unwrap();
        let orbit = lambda_orbit(&t, 0, 2, 0).unwrap();
        assert_eq!(orbit[1].set.len(), 1);
        assert_eq!(orbit[2].set, ClopenSet::new(2, vec![0]));
    }
}
