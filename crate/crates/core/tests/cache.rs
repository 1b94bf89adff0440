mod common;

use renormlab::chain::cache::{self, cache_path, load, load_or_build, save, to_json};
use renormlab::chain::{ChainKind, ChainSpec, Tower};
use renormlab::{Error, Heisenberg};

fn spec(depth: usize) -> ChainSpec {
    ChainSpec::new(ChainKind::Renormalization, depth)
}

#[test]
fn file_round_trip_is_bit_exact() {
    let dir = tempfile::tempdir().unwrap();
    let t = common::heisenberg_23(2);
    let path = cache_path(dir.path(), t.backend(), t.spec());
    save(&t, &path).unwrap();
    let back = load(Heisenberg::new(2, 3).unwrap(), &spec(2), &path).unwrap().unwrap();
    assert_eq!(to_json(&back), to_json(&t));
    let bytes = std::fs::read(&path).unwrap();
    save(&back, &path).unwrap();
    assert_eq!(std::fs::read(&path).unwrap(), bytes);
}

#[test]
fn every_single_byte_corruption_is_detected() {
    let dir = tempfile::tempdir().unwrap();
    let t = common::lattice_tower(2);
    let path = dir.path().join("tower.json");
    save(&t, &path).unwrap();
    let clean = std::fs::read(&path).unwrap();
    let mut checked = 0;
    for i in (0..clean.len()).step_by(7) {
        let mut bytes = clean.clone();
        bytes[i] = match bytes[i] {
            b'9' => b'8',
            d @ b'0'..=b'8' => d + 1,
            b => b ^ 0x01,
        };
        std::fs::write(&path, &bytes).unwrap();
        match load(common::lattice(), t.spec(), &path) {
            Err(Error::CacheCorrupt(_)) | Err(Error::CacheVersionMismatch(_)) => checked += 1,
            Err(e) => panic!("byte {i}: unexpected error {e}"),
            Ok(_) => panic!("byte {i}: corruption went unnoticed"),
        }
    }
    assert!(checked > 100);
}

#[test]
fn wrong_backend_parameters_are_rejected() {
    let doc = to_json(&common::heisenberg_23(1));
    let other = Heisenberg::new(3, 2).unwrap();
    assert!(matches!(cache::from_json(other, &spec(1), &doc), Err(Error::CacheCorrupt(_))));
}

#[test]
fn cache_hit_and_extension() {
    let dir = tempfile::tempdir().unwrap();
    let b = Heisenberg::new(2, 3).unwrap();
    let (t1, hit) = load_or_build(b.clone(), &spec(1), Some(dir.path())).unwrap();
    assert!(!hit);
    let (t2, hit) = load_or_build(b.clone(), &spec(1), Some(dir.path())).unwrap();
    assert!(hit);
    assert_eq!(to_json(&t1), to_json(&t2));
    // A deeper request extends the cached tower and rewrites the file.
    let (t3, hit) = load_or_build(b.clone(), &spec(2), Some(dir.path())).unwrap();
    assert!(!hit);
    assert_eq!(t3.depth(), 2);
    let (t4, hit) = load_or_build(b.clone(), &spec(1), Some(dir.path())).unwrap();
    assert!(hit);
    assert_eq!(to_json(&t4), to_json(&t1));
    let fresh = Tower::build(b, spec(2)).unwrap();
    assert_eq!(to_json(&t3), to_json(&fresh));
}

#[test]
fn missing_file_is_not_an_error() {
    let dir = tempfile::tempdir().unwrap();
    assert!(load(Heisenberg::new(2, 3).unwrap(), &spec(1), &dir.path().join("none.json")).unwrap().is_none());
}
