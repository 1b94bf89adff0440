//! One line per acceptance criterion; exits nonzero when any fails.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use renormlab::analyzer::{
    classify_discriminant, composed_image, kernel_probe, qa_witness_search, self_replicating_probe,
    validate_witness, VerdictKind,
};
use renormlab::backend::{Backend, WreathAutomaton};
use renormlab::chain::{DiscriminantTower, Tower};
use renormlab::perm::AbelianShape;
use renormlab::{AffineUnit, Heisenberg};

use common::*;

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn big(n: u64) -> BigUint {
    BigUint::from(n)
}

fn criterion_1() -> Check {
    let start = Instant::now();
    let t = heisenberg_23(3);
    let d = DiscriminantTower::compute(&t).map_err(|e| e.to_string())?;
    let expected = [(36, 216u64, 6u64), (1296, 46656, 36), (46656, 10077696, 216)];
    for (i, &(n, q, dd)) in expected.iter().enumerate() {
        let l = &d.levels[i + 1];
        ensure(l.size == n, || format!("n_{} = {}", i + 1, l.size))?;
        ensure(*l.quotient.order() == big(q), || format!("|Q_{}| = {}", i + 1, l.quotient.order()))?;
        ensure(*l.discriminant.order() == big(dd), || format!("|D_{}| = {}", i + 1, l.discriminant.order()))?;
        ensure(l.shape == Some(AbelianShape::Abelian(vec![dd])), || {
            format!("D_{} has shape {:?}", i + 1, l.shape)
        })?;
    }
    let elapsed = start.elapsed();
    ensure(elapsed <= Duration::from_secs(60), || format!("took {elapsed:?}"))?;
    Ok(format!("n = 36, 1296, 46656; |Q| = 216, 46656, 10077696; D cyclic of order 6, 36, 216 in {elapsed:.2?}"))
}

fn criterion_2() -> Check {
    let t = heisenberg_22(4);
    let d = DiscriminantTower::compute(&t).map_err(|e| e.to_string())?;
    for l in 1..=2 {
        let image = composed_image(&t, &d, 2 * l, l).map_err(|e| e.to_string())?;
        ensure(image.is_trivial(), || format!("image of D_{} in D_{l} has order {}", 2 * l, image.order()))?;
    }
    let v = classify_discriminant(&t, &d, 2).map_err(|e| e.to_string())?;
    ensure(v.kind == VerdictKind::TrivialInLimit, || format!("verdict {}", v.kind.label()))?;
    Ok("D_2 -> D_1 and D_4 -> D_2 trivial; verdict TrivialInLimit".into())
}

fn criterion_3() -> Check {
    let t = lattice_tower(4);
    let d = DiscriminantTower::compute(&t).map_err(|e| e.to_string())?;
    for l in 1..=4 {
        ensure(*d.levels[l].discriminant.order() == big(3), || {
            format!("|D_{l}| = {}", d.levels[l].discriminant.order())
        })?;
    }
    for b in &d.bondings[1..] {
        ensure(b.bijective, || format!("bonding D_{} -> D_{} not bijective", b.level + 1, b.level))?;
    }
    let v = classify_discriminant(&t, &d, 3).map_err(|e| e.to_string())?;
    ensure(v.kind == VerdictKind::FiniteStable { order: 3 }, || format!("verdict {}", v.kind.label()))?;
    let b = t.backend();
    let h = &b.generators()[3];
    let powers = [h.clone(), b.multiply(h, h)];
    let words = kernel_probe(&t, 3, 2).map_err(|e| e.to_string())?;
    let found: Vec<_> = words.iter().map(|w| w.word.evaluate(b)).collect();
    ensure(found.len() == 2 && powers.iter().all(|p| found.iter().any(|f| b.equal(f, p))), || {
        format!("kernel words {:?}", words.iter().map(|w| w.word_text.clone()).collect::<Vec<_>>())
    })?;
    Ok("|D_l| = 3 for l = 1..4, bijective bondings, FiniteStable(3), kernel {h1, h1^-1}".into())
}

fn criterion_4() -> Check {
    let start = Instant::now();
    let t = affine_tower(8);
    let d = DiscriminantTower::compute(&t).map_err(|e| e.to_string())?;
    for l in 1..=8 {
        ensure(*d.levels[l].discriminant.order() == big(1 << (l - 1)), || {
            format!("|D_{l}| = {}", d.levels[l].discriminant.order())
        })?;
    }
    ensure(d.bondings.iter().all(|b| b.surjective), || "a bonding is not surjective".into())?;
    let v = classify_discriminant(&t, &d, 3).map_err(|e| e.to_string())?;
    ensure(v.kind == VerdictKind::Growing, || format!("verdict {}", v.kind.label()))?;
    let elapsed = start.elapsed();
    ensure(elapsed <= Duration::from_secs(10), || format!("took {elapsed:?}"))?;
    Ok(format!("|D_l| = 2^(l-1) for l = 1..8, surjective bondings, Growing in {elapsed:.2?}"))
}

fn criterion_5() -> Check {
    let t = heisenberg_23(3);
    let out = qa_witness_search(&t, 3, 1, 8).map_err(|e| e.to_string())?;
    ensure(out.witness().is_none(), || "Heisenberg(2,3) has a witness".into())?;
    let t = grigorchuk_tower(6);
    let out = qa_witness_search(&t, 6, 1, 12).map_err(|e| e.to_string())?;
    let w = out.witness().ok_or("no Grigorchuk witness")?;
    ensure(validate_witness(&t, w).map_err(|e| e.to_string())?, || "certificate does not replay".into())?;
    Ok(format!("Heisenberg(2,3) none found; Grigorchuk witness \"{}\" moves {} to {}", w.word_text, w.moved_point, w.moved_to))
}

fn phi_pairs<B: Backend>(b: &B, rng: &mut ChaCha8Rng, pairs: usize) -> Result<(), String> {
    let n = b.generators().len();
    let word = |rng: &mut ChaCha8Rng| -> Vec<(usize, bool)> {
        (0..rng.gen_range(0..=10)).map(|_| (rng.gen_range(0..n), rng.gen())).collect()
    };
    for _ in 0..pairs {
        let g = element(b, &word(rng));
        let h = element(b, &word(rng));
        let lhs = b.apply_phi(&b.multiply(&g, &h)).map_err(|e| e.to_string())?;
        let rhs = b.multiply(&b.apply_phi(&g).map_err(|e| e.to_string())?, &b.apply_phi(&h).map_err(|e| e.to_string())?);
        ensure(b.equal(&lhs, &rhs), || format!("{}: φ not multiplicative on {g:?}, {h:?}", b.name()))?;
        let level = rng.gen_range(0..=3);
        let gamma = b.phi_power(&h, level).map_err(|e| e.to_string())?;
        let moved = b.coset_id(&b.multiply(&g, &gamma), level).map_err(|e| e.to_string())?;
        ensure(moved == b.coset_id(&g, level).map_err(|e| e.to_string())?, || {
            format!("{}: coset id not right-invariant at level {level}", b.name())
        })?;
    }
    Ok(())
}

fn tower_properties<B: Backend>(t: &Tower<B>, counts: &mut [usize; 4]) -> Result<(), String> {
    let name = t.backend().name();
    let d = DiscriminantTower::compute(t).map_err(|e| e.to_string())?;
    for l in &d.levels {
        ensure(l.discriminant.order() * big(l.size as u64) == *l.quotient.order(), || {
            format!("{name}: orbit-stabilizer fails at level {}", l.level)
        })?;
        counts[0] += 1;
        let groups = [
            (t.level(l.level).unwrap().generator_perms().to_vec(), l.quotient.order()),
            (l.discriminant.strong_generators().to_vec(), l.discriminant.order()),
        ];
        for (gens, order) in groups {
            if *order <= big(5040) {
                let elements = closure(&gens, l.size, 5040).ok_or("closure overflow")?;
                ensure(*order == big(elements.len() as u64), || {
                    format!("{name}: BSGS order {order} vs closure {} at level {}", elements.len(), l.level)
                })?;
                counts[1] += 1;
            }
        }
    }
    for level in 1..=t.depth() {
        let upper = t.level(level).unwrap();
        let lower = t.level(level - 1).unwrap();
        let proj = upper.projection().unwrap();
        for (g, h) in upper.generator_perms().iter().zip(lower.generator_perms()) {
            for x in 0..upper.size() as u32 {
                ensure(proj[g.apply(x) as usize] == h.apply(proj[x as usize]), || {
                    format!("{name}: projection not equivariant at level {level}")
                })?;
            }
        }
        counts[2] += 1;
        if let Ok(mut image) = t.shift_map(level - 1) {
            image.sort_unstable();
            image.dedup();
            ensure(image == t.basepoint_cylinder(1, level).unwrap(), || {
                format!("{name}: shift image at level {} is not U_1", level - 1)
            })?;
            counts[3] += 1;
        }
    }
    Ok(())
}

fn criterion_6() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let pairs = 10_000;
    phi_pairs(&Heisenberg::new(2, 3).unwrap(), &mut rng, pairs)?;
    phi_pairs(&lattice(), &mut rng, pairs)?;
    phi_pairs(&AffineUnit::new(), &mut rng, pairs)?;
    phi_pairs(&WreathAutomaton::odometer(), &mut rng, pairs)?;
    let mut counts = [0; 4];
    tower_properties(&heisenberg_23(3), &mut counts)?;
    tower_properties(&heisenberg_22(4), &mut counts)?;
    tower_properties(&lattice_tower(4), &mut counts)?;
    tower_properties(&affine_tower(8), &mut counts)?;
    tower_properties(&odometer_tower(8), &mut counts)?;
    tower_properties(&grigorchuk_tower(6), &mut counts)?;
    tower_properties(&toy_tower(4), &mut counts)?;
    Ok(format!(
        "{pairs} pairs per backend; orbit-stabilizer on {} levels, {} BSGS closures, \
         equivariance on {} levels, shift image on {} levels",
        counts[0], counts[1], counts[2], counts[3]
    ))
}

fn criterion_7() -> Check {
    let odometer = self_replicating_probe(&WreathAutomaton::odometer(), 4, 8).map_err(|e| e.to_string())?;
    let grigorchuk = self_replicating_probe(&WreathAutomaton::grigorchuk(), 10, 8).map_err(|e| e.to_string())?;
    let toy = self_replicating_probe(&WreathAutomaton::rigid_toy(), 10, 8).map_err(|e| e.to_string())?;
    ensure(odometer.passed, || "odometer fails".into())?;
    ensure(grigorchuk.passed, || "grigorchuk fails".into())?;
    ensure(!toy.passed, || "toy automaton passes".into())?;
    let certs: Vec<String> = grigorchuk
        .results
        .iter()
        .map(|r| format!("{}|_v = {}", r.word.as_deref().unwrap_or("?"), r.generator))
        .collect();
    Ok(format!("odometer and Grigorchuk pass ({}), toy fails", certs.join(", ")))
}

fn main() -> ExitCode {
    let criteria: [(usize, fn() -> Check); 7] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
    ];
    let mut failed = 0;
    for (n, check) in criteria {
        match check() {
            Ok(detail) => println!("criterion {n}: PASS: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("criterion {n}: FAIL: {detail}");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
