#![allow(dead_code)]

use std::path::PathBuf;

use rand::seq::IndexedRandom;
use rand::Rng;
use streamprod::enumerate::ground_terms;
use streamprod::io::parse_spec;
use streamprod::terms::{Position, Sort, Term};
use streamprod::trs::Trs;
use streamprod::StreamSpec;

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
}

pub fn fixture_text(name: &str) -> String {
    std::fs::read_to_string(fixture_path(name)).expect("fixture exists")
}

/// The fixture as written.
pub fn raw(name: &str) -> StreamSpec {
    parse_spec(&fixture_text(name)).expect("fixture parses")
}

/// The fixture in the basic format.
pub fn basic(name: &str) -> StreamSpec {
    raw(name).unfold().expect("fixture unfolds")
}

/// Fixtures whose rules form an orthogonal system after unfolding.
pub const ORTHOGONAL: [&str; 5] = [
    "morse.spec",
    "alt_morse.spec",
    "fc.spec",
    "tailc.spec",
    "nonfriendly.spec",
];

pub const ALL: [&str; 7] = [
    "morse.spec",
    "alt_morse.spec",
    "fc.spec",
    "tailc.spec",
    "nonfriendly.spec",
    "topterm.spec",
    "loop.spec",
];

pub fn pos(s: &str) -> Position {
    s.parse().expect("position")
}

pub fn small_stream_terms(spec: &StreamSpec, max_size: usize) -> Vec<Term> {
    ground_terms(spec.signature().iter(), Sort::Stream, max_size)
}

/// A uniformly chosen stream term of size at most 7, followed by up to
/// `warmup` random rewrite steps so that nested redexes show up.
pub fn random_term(rng: &mut impl Rng, trs: &Trs, pool: &[Term], warmup: usize) -> Term {
    let mut t = pool.choose(rng).expect("non-empty pool").clone();
    for _ in 0..rng.random_range(0..=warmup) {
        let redexes = trs.redex_positions(&t);
        let Some(p) = redexes.choose(rng) else { break };
        let next = trs.rewrite_at(&t, p).expect("redex").0;
        if next.size() > 60 {
            break;
        }
        t = next;
    }
    t
}

/// Picks a random subset of pairwise parallel positions from `candidates`.
pub fn random_parallel_subset(rng: &mut impl Rng, candidates: &[Position]) -> Vec<Position> {
    let mut chosen: Vec<Position> = Vec::new();
    let mut order: Vec<&Position> = candidates.iter().collect();
    for i in (1..order.len()).rev() {
        let j = rng.random_range(0..=i);
        order.swap(i, j);
    }
    for p in order {
        if rng.random_bool(0.6) && chosen.iter().all(|q| q.is_parallel(p)) {
            chosen.push(p.clone());
        }
    }
    chosen
}
