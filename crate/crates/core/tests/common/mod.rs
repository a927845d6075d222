#![allow(dead_code)]

use std::path::PathBuf;

use pdakit::format::parse_pda;
use pdakit::pda::{random_pda, RandomPdaShape};
use pdakit::Pda;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

pub fn fixture(name: &str) -> String {
    std::fs::read_to_string(fixture_path(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn fixture_pda(name: &str) -> Pda {
    parse_pda(&fixture(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

/// Empty-stack fixtures with an enumeration bound at which the oracle
/// finishes.
pub const EMPTY_STACK_FIXTURES: &[(&str, usize)] = &[
    ("p21.pda", 110),
    ("example1.pda", 10),
    ("udpda_b3.pda", 10),
    ("udpda_doubling.pda", 10),
    ("udpda_stuck.pda", 10),
];

pub const UNARY_DETERMINISTIC_EMPTY: &[&str] =
    &["udpda_b3.pda", "udpda_doubling.pda", "udpda_stuck.pda"];

pub const UNARY_DETERMINISTIC_FINAL: &[&str] = &["udpda_b2_final.pda", "udpda_even_final.pda"];

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Small random PDAs, one per seed in `seeds`.
pub fn small_pdas(seeds: std::ops::Range<u64>, shape: RandomPdaShape) -> Vec<Pda> {
    seeds.map(|s| random_pda(&mut rng(s), shape)).collect()
}

/// Random unary deterministic PDA: keeps at most one action per head and
/// drops b-actions on heads that already have an ε-action.
pub fn random_udpda(seed: u64, shape: RandomPdaShape) -> Pda {
    let mut p = random_pda(&mut rng(seed), RandomPdaShape { terminals: 1, ..shape });
    let mut kept: Vec<pdakit::Action> = Vec::new();
    for a in p.actions.drain(..) {
        if !kept.iter().any(|b| b.source == a.source && b.pop == a.pop) {
            kept.push(a);
        }
    }
    p.actions = kept;
    assert!(p.is_deterministic());
    p
}
