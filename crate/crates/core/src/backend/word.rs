use std::fmt;

use serde::{Deserialize, Serialize};

use super::Backend;
use crate::error::{Error, Result};

/// A generator or its inverse, by index into [`Backend::generators`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Letter {
    pub generator: u16,
    pub inverse: bool,
}

impl Letter {
    pub fn new(generator: usize, inverse: bool) -> Self {
        Letter {
            generator: generator as u16,
            inverse,
        }
    }

    pub fn inverse(self) -> Self {
        Letter {
            generator: self.generator,
            inverse: !self.inverse,
        }
    }

    /// All letters: generators first, then their inverses.
    pub fn alphabet(generator_count: usize) -> Vec<Letter> {
        (0..generator_count)
            .map(|g| Letter::new(g, false))
            .chain((0..generator_count).map(|g| Letter::new(g, true)))
            .collect()
    }
}

/// A word over the generators; the group element is the left-to-right product.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Word(pub Vec<Letter>);

impl Word {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn evaluate<B: Backend + ?Sized>(&self, backend: &B) -> B::Element {
        let gens = backend.generators();
        let inv: Vec<B::Element> = gens.iter().map(|g| backend.invert(g)).collect();
        self.0.iter().fold(backend.identity(), |acc, l| {
            let g = if l.inverse { &inv[l.generator as usize] } else { &gens[l.generator as usize] };
            backend.multiply(&acc, g)
        })
    }

    /// Parses whitespace-separated generator names with optional `^-1`
    /// (or `^n` for any nonzero integer n), e.g. `"a b^-1 c^2"`. The empty
    /// string and `"e"` denote the identity.
    pub fn parse(text: &str, names: &[String]) -> Result<Word> {
        let mut out = Vec::new();
        for token in text.split_whitespace() {
            if token == "e" && !names.iter().any(|n| n == "e") {
                continue;
            }
            let (name, exp) = match token.split_once('^') {
                Some((n, e)) => {
                    let e: i64 = e
                        .parse()
                        .map_err(|_| Error::ConfigInvalid(format!("bad exponent in {token:?}")))?;
                    (n, e)
                }
                None => (token, 1),
            };
            let g = names
                .iter()
                .position(|n| n == name)
                .ok_or_else(|| Error::ConfigInvalid(format!("unknown generator {name:?}")))?;
            for _ in 0..exp.unsigned_abs() {
                out.push(Letter::new(g, exp < 0));
            }
        }
        Ok(Word(out))
    }

    pub fn display(&self, names: &[String]) -> String {
        if self.0.is_empty() {
            return "e".into();
        }
        self.0
            .iter()
            .map(|l| {
                let n = &names[l.generator as usize];
                if l.inverse {
                    format!("{n}^-1")
                } else {
                    n.clone()
                }
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "g{}{}", l.generator, if l.inverse { "^-1" } else { "" })?;
        }
        Ok(())
    }
}
