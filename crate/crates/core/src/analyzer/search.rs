use std::collections::HashSet;
use std::hash::Hash;

use crate::backend::{Backend, Letter, Word};
use crate::error::Result;

/// Breadth-first search over freely reduced words of length `1..=bound`,
/// letters ordered generators first, then inverses. Words reaching an
/// element already seen (as judged by `key`) are pruned, so each element is
/// visited once, through its first word in shortlex order.
///
/// `visit` returns `true` to stop the search.
pub(crate) fn search_words<B, K, FK, FV>(backend: &B, bound: usize, key: FK, mut visit: FV) -> Result<()>
where
    B: Backend + ?Sized,
    K: Eq + Hash,
    FK: Fn(&B::Element) -> K,
    FV: FnMut(&Word, &B::Element) -> Result<bool>,
{
    let gens = backend.generators();
    let alphabet = Letter::alphabet(gens.len());
    let letters: Vec<B::Element> = alphabet
        .iter()
        .map(|l| {
            let g = &gens[l.generator as usize];
            if l.inverse {
                backend.invert(g)
            } else {
                g.clone()
            }
        })
        .collect();
    let id = backend.identity();
    let mut seen = HashSet::new();
    seen.insert(key(&id));
    let mut frontier = vec![(Word::default(), id)];
    for _ in 0..bound {
        let mut next = Vec::new();
        for (w, g) in &frontier {
            for (l, x) in alphabet.iter().zip(&letters) {
                if w.0.last() == Some(&l.inverse()) {
                    continue;
                }
                let h = backend.multiply(g, x);
                if !seen.insert(key(&h)) {
                    continue;
                }
                let mut word = w.clone();
                word.0.push(*l);
                if visit(&word, &h)? {
                    return Ok(());
                }
                next.push((word, h));
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    Ok(())
}
