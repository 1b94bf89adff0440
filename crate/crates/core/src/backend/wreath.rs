use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::{decode_error, Backend};
use crate::error::{Error, Result};
use crate::perm::Permutation;

pub const DEFAULT_COMPARISON_DEPTH: usize = 12;

/// A state `s = (s_0, …, s_{d−1})σ` of a finite automaton over a
/// `d`-letter alphabet. `None` as a section is the identity.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AutomatonState {
    pub name: String,
    pub perm: Vec<u32>,
    pub sections: Vec<Option<usize>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct StateLetter {
    pub state: u16,
    pub inverse: bool,
}

impl StateLetter {
    fn inverted(self) -> Self {
        StateLetter { state: self.state, inverse: !self.inverse }
    }
}

/// Freely reduced word in the states; `w_1 ⋯ w_n` acts as `w_1 ∘ ⋯ ∘ w_n`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct StateWord(pub Vec<StateLetter>);

impl StateWord {
    fn push(&mut self, l: StateLetter) {
        if self.0.last() == Some(&l.inverted()) {
            self.0.pop();
        } else {
            self.0.push(l);
        }
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Group generated by the states of a finite automaton, acting on the
/// `d`-ary rooted tree by `s(xw) = σ(x) s_x(w)`.
///
/// Elements are words in the states up to free cancellation; equality is
/// equality of the action on level `comparison_depth`. Coset tokens are the
/// image of the basepoint prefix of length `ℓ`, i.e. the chain is the
/// vertex-stabilizer chain of the basepoint path.
#[derive(Clone, Debug)]
pub struct WreathAutomaton {
    kind: &'static str,
    arity: usize,
    states: Vec<AutomatonState>,
    inverse_perms: Vec<Vec<u32>>,
    phi: Option<Vec<Vec<(usize, bool)>>>,
    basepoint: Vec<u32>,
    comparison_depth: usize,
}

impl WreathAutomaton {
    /// `phi`, when given, maps the state `i` to a word (state index, inverse).
    pub fn new(
        arity: usize,
        states: Vec<AutomatonState>,
        phi: Option<Vec<Vec<(usize, bool)>>>,
    ) -> Result<Self> {
        Self::build("automaton", arity, states, phi)
    }

    fn build(
        kind: &'static str,
        arity: usize,
        states: Vec<AutomatonState>,
        phi: Option<Vec<Vec<(usize, bool)>>>,
    ) -> Result<Self> {
        let bad = |m: String| Err(Error::ConfigInvalid(m));
        if arity < 2 {
            return bad(format!("automaton alphabet must have at least 2 letters (got {arity})"));
        }
        if states.is_empty() || states.len() > u16::MAX as usize {
            return bad("automaton needs at least one state".into());
        }
        let mut inverse_perms = Vec::with_capacity(states.len());
        for s in &states {
            if s.perm.len() != arity || s.sections.len() != arity {
                return bad(format!("state {:?} must have {arity} images and {arity} sections", s.name));
            }
            let p = Permutation::from_images(s.perm.clone())
                .map_err(|e| Error::ConfigInvalid(format!("state {:?}: {e}", s.name)))?;
            if s.sections.iter().flatten().any(|&t| t >= states.len()) {
                return bad(format!("state {:?} has a section outside the automaton", s.name));
            }
            inverse_perms.push(p.inverse().into_images());
        }
        if let Some(images) = &phi {
            if images.len() != states.len() || images.iter().flatten().any(|&(s, _)| s >= states.len()) {
                return bad("phi must give one word in the states per state".into());
            }
        }
        Ok(WreathAutomaton {
            kind,
            arity,
            states,
            inverse_perms,
            phi,
            basepoint: Vec::new(),
            comparison_depth: DEFAULT_COMPARISON_DEPTH,
        })
    }

    /// Binary odometer `a = (1, a)σ` with `φ(a) = a²`.
    pub fn odometer() -> Self {
        let a = AutomatonState { name: "a".into(), perm: vec![1, 0], sections: vec![None, Some(0)] };
        Self::build("odometer", 2, vec![a], Some(vec![vec![(0, false), (0, false)]])).expect("preset")
    }

    /// `a = σ`, `b = (a, c)`, `c = (a, d)`, `d = (1, b)`.
    pub fn grigorchuk() -> Self {
        let st = |name: &str, perm: [u32; 2], sections: [Option<usize>; 2]| AutomatonState {
            name: name.into(),
            perm: perm.to_vec(),
            sections: sections.to_vec(),
        };
        let states = vec![
            st("a", [1, 0], [None, None]),
            st("b", [0, 1], [Some(0), Some(2)]),
            st("c", [0, 1], [Some(0), Some(3)]),
            st("d", [0, 1], [None, Some(1)]),
        ];
        Self::build("grigorchuk", 2, states, None).expect("preset")
    }

    /// `t = (1, 1)σ`: every section is trivial, so no vertex stabilizer
    /// element has `t` as a section.
    pub fn rigid_toy() -> Self {
        let t = AutomatonState { name: "t".into(), perm: vec![1, 0], sections: vec![None, None] };
        Self::build("rigid-toy", 2, vec![t], None).expect("preset")
    }

    /// Basepoint path; letters beyond the given prefix are 0.
    pub fn with_basepoint(mut self, basepoint: Vec<u32>) -> Result<Self> {
        if basepoint.iter().any(|&x| x as usize >= self.arity) {
            return Err(Error::ConfigInvalid(format!(
                "basepoint {basepoint:?} uses letters outside the {}-letter alphabet",
                self.arity
            )));
        }
        self.basepoint = basepoint;
        Ok(self)
    }

    pub fn with_comparison_depth(mut self, depth: usize) -> Self {
        self.comparison_depth = depth;
        self
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn comparison_depth(&self) -> usize {
        self.comparison_depth
    }

    pub fn states(&self) -> &[AutomatonState] {
        &self.states
    }

    pub fn basepoint_prefix(&self, len: usize) -> Vec<u32> {
        (0..len).map(|i| self.basepoint.get(i).copied().unwrap_or(0)).collect()
    }

    pub fn letter(&self, state: usize, inverse: bool) -> StateWord {
        StateWord(vec![StateLetter { state: state as u16, inverse }])
    }

    /// Output letter and section of `l` at the input letter `x`.
    fn step(&self, l: StateLetter, x: u32) -> (u32, Option<StateLetter>) {
        let s = &self.states[l.state as usize];
        if l.inverse {
            let y = self.inverse_perms[l.state as usize][x as usize];
            let sec = s.sections[y as usize].map(|t| StateLetter { state: t as u16, inverse: true });
            (y, sec)
        } else {
            let sec = s.sections[x as usize].map(|t| StateLetter { state: t as u16, inverse: false });
            (s.perm[x as usize], sec)
        }
    }

    fn apply_letter(&self, l: StateLetter, string: &mut [u32]) {
        let mut cur = Some(l);
        for x in string.iter_mut() {
            match cur {
                None => return,
                Some(c) => {
                    let (y, next) = self.step(c, *x);
                    *x = y;
                    cur = next;
                }
            }
        }
    }

    /// Image of a finite string under `g`.
    pub fn apply(&self, g: &StateWord, string: &[u32]) -> Vec<u32> {
        let mut out = string.to_vec();
        for &l in g.0.iter().rev() {
            self.apply_letter(l, &mut out);
        }
        out
    }

    fn encode_string(&self, s: &[u32]) -> usize {
        s.iter().fold(0, |acc, &x| acc * self.arity + x as usize)
    }

    fn decode_string(&self, mut index: usize, len: usize) -> Vec<u32> {
        let mut s = vec![0u32; len];
        for slot in s.iter_mut().rev() {
            *slot = (index % self.arity) as u32;
            index /= self.arity;
        }
        s
    }

    /// Action on the `d^depth` vertices of level `depth`, vertices numbered
    /// by reading strings as base-`d` numerals (first letter most significant).
    pub fn level_permutation(&self, g: &StateWord, depth: usize) -> Permutation {
        let n = self.arity.pow(depth as u32);
        let images = (0..n)
            .map(|i| self.encode_string(&self.apply(g, &self.decode_string(i, depth))) as u32)
            .collect();
        Permutation::from_images(images).expect("automaton acts by permutations")
    }

    /// Section `g|_v`, defined when `g` fixes `v`: `g(vw) = v·g|_v(w)`.
    pub fn section_at(&self, g: &StateWord, vertex: &[u32]) -> Result<StateWord> {
        if self.apply(g, vertex) != vertex {
            return Err(Error::VertexNotFixed(vertex.to_vec()));
        }
        Ok(self.section_unchecked(g, vertex))
    }

    fn section_unchecked(&self, g: &StateWord, vertex: &[u32]) -> StateWord {
        let mut parts: Vec<Option<StateLetter>> = Vec::with_capacity(g.len());
        let mut u = vertex.to_vec();
        for &l in g.0.iter().rev() {
            let mut cur = Some(l);
            for x in u.iter_mut() {
                match cur {
                    None => break,
                    Some(c) => {
                        let (y, next) = self.step(c, *x);
                        *x = y;
                        cur = next;
                    }
                }
            }
            parts.push(cur);
        }
        let mut out = StateWord::default();
        for l in parts.into_iter().rev().flatten() {
            out.push(l);
        }
        out
    }

    fn letter_name(&self, l: StateLetter) -> String {
        let n = &self.states[l.state as usize].name;
        if l.inverse {
            format!("{n}^-1")
        } else {
            n.clone()
        }
    }

    pub fn display(&self, g: &StateWord) -> String {
        if g.is_empty() {
            return "e".into();
        }
        g.0.iter().map(|&l| self.letter_name(l)).collect::<Vec<_>>().join(" ")
    }

    fn section_name(&self, s: Option<usize>) -> String {
        s.map_or_else(|| "e".into(), |t| self.states[t].name.clone())
    }
}

impl Backend for WreathAutomaton {
    type Element = StateWord;
    type Token = Vec<u32>;
    type Key = Vec<u32>;

    fn name(&self) -> &'static str {
        self.kind
    }

    fn identity(&self) -> StateWord {
        StateWord::default()
    }

    fn multiply(&self, g: &StateWord, h: &StateWord) -> StateWord {
        let mut out = g.clone();
        for &l in &h.0 {
            out.push(l);
        }
        out
    }

    fn invert(&self, g: &StateWord) -> StateWord {
        StateWord(g.0.iter().rev().map(|l| l.inverted()).collect())
    }

    fn generators(&self) -> Vec<StateWord> {
        (0..self.states.len()).map(|i| self.letter(i, false)).collect()
    }

    fn generator_names(&self) -> Vec<String> {
        self.states.iter().map(|s| s.name.clone()).collect()
    }

    fn supports_phi(&self) -> bool {
        self.phi.is_some()
    }

    fn apply_phi(&self, g: &StateWord) -> Result<StateWord> {
        let images = self.phi.as_ref().ok_or_else(|| {
            Error::UnsupportedForChainKind(format!("{} carries no renormalization map", self.kind))
        })?;
        let mut out = StateWord::default();
        for &l in &g.0 {
            let image = &images[l.state as usize];
            if l.inverse {
                for &(s, inv) in image.iter().rev() {
                    out.push(StateLetter { state: s as u16, inverse: !inv });
                }
            } else {
                for &(s, inv) in image {
                    out.push(StateLetter { state: s as u16, inverse: inv });
                }
            }
        }
        Ok(out)
    }

    fn is_tree_action(&self) -> bool {
        true
    }

    fn coset_id(&self, g: &StateWord, level: usize) -> Result<Vec<u32>> {
        Ok(self.apply(g, &self.basepoint_prefix(level)))
    }

    fn key(&self, g: &StateWord) -> Vec<u32> {
        self.level_permutation(g, self.comparison_depth).into_images()
    }

    fn encode(&self, g: &StateWord) -> Value {
        json!(g.0.iter().map(|&l| self.letter_name(l)).collect::<Vec<_>>())
    }

    fn decode(&self, v: &Value) -> Result<StateWord> {
        let err = || decode_error(self.kind, v);
        let mut out = StateWord::default();
        for item in v.as_array().ok_or_else(err)? {
            let text = item.as_str().ok_or_else(err)?;
            let (name, inverse) = match text.strip_suffix("^-1") {
                Some(n) => (n, true),
                None => (text, false),
            };
            let state = self.states.iter().position(|s| s.name == name).ok_or_else(err)?;
            out.push(StateLetter { state: state as u16, inverse });
        }
        Ok(out)
    }

    fn describe(&self) -> Value {
        let states: Vec<Value> = self
            .states
            .iter()
            .map(|s| {
                json!({
                    "name": s.name,
                    "perm": s.perm,
                    "sections": s.sections.iter().map(|&t| self.section_name(t)).collect::<Vec<_>>(),
                })
            })
            .collect();
        let phi = self.phi.as_ref().map(|images| {
            images
                .iter()
                .map(|w| {
                    let word = StateWord(
                        w.iter().map(|&(s, inverse)| StateLetter { state: s as u16, inverse }).collect(),
                    );
                    self.display(&word)
                })
                .collect::<Vec<_>>()
        });
        json!({
            "name": self.kind,
            "alphabet": self.arity,
            "states": states,
            "phi": phi,
            "basepoint": self.basepoint,
            "comparison_depth": self.comparison_depth,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn odometer_adds_one() {
        let o = WreathAutomaton::odometer();
        let a = o.letter(0, false);
        // Strings are little-endian binary numerals.
        assert_eq!(o.apply(&a, &[1, 1, 0]), vec![0, 0, 1]);
        assert_eq!(o.apply(&a, &[1, 1, 1]), vec![0, 0, 0]);
        let a_inv = o.invert(&a);
        assert_eq!(o.apply(&a_inv, &[0, 0, 1]), vec![1, 1, 0]);
        assert_eq!(o.level_permutation(&a, 3).order(), 8);
    }

    #[test]
    fn odometer_square_has_section_a() {
        let o = WreathAutomaton::odometer();
        let a = o.letter(0, false);
        let a2 = o.multiply(&a, &a);
        assert_eq!(o.section_at(&a2, &[0]).unwrap(), a);
        assert_eq!(o.section_at(&a2, &[1]).unwrap(), a);
        assert!(matches!(o.section_at(&a, &[0]), Err(Error::VertexNotFixed(_))));
        assert_eq!(o.apply_phi(&a).unwrap(), a2);
    }

    #[test]
    fn grigorchuk_generators_are_involutions() {
        let g = WreathAutomaton::grigorchuk();
        assert_eq!(g.generator_names(), vec!["a", "b", "c", "d"]);
        for s in g.generators() {
            let sq = g.multiply(&s, &s);
            assert!(!sq.is_empty());
            assert!(g.level_permutation(&sq, 10).is_identity());
            assert!(!g.level_permutation(&s, 10).is_identity());
        }
        assert!(!g.supports_phi());
        assert!(g.apply_phi(&g.letter(0, false)).is_err());
    }

    #[test]
    fn grigorchuk_sections() {
        let g = WreathAutomaton::grigorchuk();
        let [a, b, c, d] = <[_; 4]>::try_from(g.generators()).unwrap();
        assert_eq!(g.section_at(&b, &[0]).unwrap(), a);
        assert_eq!(g.section_at(&b, &[1]).unwrap(), c);
        assert_eq!(g.section_at(&d, &[0]).unwrap(), g.identity());
        assert_eq!(g.section_at(&g.identity(), &[1, 0, 1]).unwrap(), g.identity());
        // a d a = (b, 1)
        let ada = g.multiply(&g.multiply(&a, &d), &a);
        assert_eq!(g.section_at(&ada, &[0]).unwrap().0, vec![StateLetter { state: 1, inverse: false }]);
        // b c d = 1 in the group, though not as a reduced word.
        let bcd = g.multiply(&g.multiply(&b, &c), &d);
        assert!(g.is_identity(&bcd));
        assert!(!bcd.is_empty());
        let _ = c;
    }

    #[test]
    fn sections_describe_the_subtree_action() {
        let g = WreathAutomaton::grigorchuk();
        let [a, b, c, d] = <[_; 4]>::try_from(g.generators()).unwrap();
        let w = g.multiply(&g.multiply(&g.multiply(&a, &b), &g.multiply(&a, &c)), &g.multiply(&d, &b));
        let w = g.multiply(&w, &g.invert(&g.multiply(&a, &c)));
        for v in [vec![0u32], vec![1], vec![0, 1], vec![1, 1, 0]] {
            let Ok(s) = g.section_at(&w, &v) else { continue };
            for tail in 0..(1usize << 6) {
                let t = g.decode_string(tail, 6);
                let mut full = v.clone();
                full.extend(&t);
                let image = g.apply(&w, &full);
                assert_eq!(&image[..v.len()], &v[..]);
                assert_eq!(image[v.len()..].to_vec(), g.apply(&s, &t));
            }
        }
    }

    #[test]
    fn free_cancellation_only() {
        let g = WreathAutomaton::grigorchuk();
        let a = g.letter(0, false);
        let a_inv = g.letter(0, true);
        assert!(g.multiply(&a, &a_inv).is_empty());
        assert_eq!(g.multiply(&a, &a).len(), 2);
        assert_eq!(g.multiply(&g.multiply(&a, &a), &g.multiply(&a_inv, &a_inv)), g.identity());
    }

    #[test]
    fn token_is_the_basepoint_image() {
        let g = WreathAutomaton::grigorchuk().with_basepoint(vec![1, 1]).unwrap();
        let a = g.letter(0, false);
        assert_eq!(g.coset_id(&a, 3).unwrap(), vec![0, 1, 0]);
        assert!(WreathAutomaton::grigorchuk().with_basepoint(vec![2]).is_err());
    }

    #[test]
    fn encode_round_trip() {
        let g = WreathAutomaton::grigorchuk();
        let w = StateWord(vec![
            StateLetter { state: 2, inverse: true },
            StateLetter { state: 0, inverse: false },
        ]);
        assert_eq!(g.encode(&w), json!(["c^-1", "a"]));
        assert_eq!(g.decode(&g.encode(&w)).unwrap(), w);
        assert!(g.decode(&json!(["z"])).is_err());
    }

    #[test]
    fn rejects_malformed_automata() {
        let s = AutomatonState { name: "s".into(), perm: vec![0, 0], sections: vec![None, None] };
        assert!(WreathAutomaton::new(2, vec![s], None).is_err());
        let s = AutomatonState { name: "s".into(), perm: vec![1, 0], sections: vec![None, Some(3)] };
        assert!(WreathAutomaton::new(2, vec![s], None).is_err());
    }
}
