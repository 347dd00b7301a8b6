mod common;

use common::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use streamprod::strategy::oracle::oracle_prefix;
use streamprod::strategy::scheduler::{scheduler_step, SchedulerState, SchedulerStep};
use streamprod::strategy::{eval_prefix, Budgets};

/// The queue is updated locally after each step; it must always equal the
/// maximal redex positions computed from scratch.
#[test]
fn queue_stays_the_set_of_maximal_redexes() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for name in ALL {
        let spec = basic(name);
        let trs = spec.extend_with_overflow().unwrap();
        let pool = small_stream_terms(&spec, 6);
        for _ in 0..100 {
            let t = random_term(&mut rng, spec.as_trs(), &pool, 4);
            let mut state = SchedulerState::new(&trs, t);
            for _ in 0..40 {
                state
                    .check_invariant(&trs)
                    .unwrap_or_else(|e| panic!("{name}: {e}"));
                match scheduler_step(&trs, &state).unwrap() {
                    SchedulerStep::Advanced { step, next } => {
                        assert!(step.is_outermost(), "{name}: {step}");
                        state = next;
                    }
                    SchedulerStep::Halted => break,
                }
            }
        }
    }
}

/// Unfolding preserves the stream denoted by every small term.
#[test]
fn unfolding_preserves_prefixes() {
    let budgets = Budgets::default();
    let limits = budgets.oracle_limits();
    for name in ["fc.spec", "alt_morse.spec", "nonfriendly.spec"] {
        let (nested, flat) = (raw(name), basic(name));
        for t in small_stream_terms(&nested, 4) {
            let expected = oracle_prefix(nested.as_trs(), nested.data_trs(), &t, 4, &limits, 1000);
            let Some(expected) = expected else { continue };
            let got = eval_prefix(&flat, &t, 4, &budgets)
                .unwrap_or_else(|(_, f)| panic!("{name}: {t}: {f}"));
            assert_eq!(got.values, expected, "{name}: {t}");
        }
    }
}

#[test]
fn morse_prefix_matches_thue_morse() {
    let spec = basic("morse.spec");
    let t = spec.term("morse").unwrap();
    let prefix = eval_prefix(&spec, &t, 16, &Budgets::default()).unwrap();
    let bits: String = prefix.values.iter().map(|v| v.to_string()).collect();
    // t(n) is the parity of the binary digit sum of n
    let expected: String = (0u32..16)
        .map(|n| if n.count_ones() % 2 == 0 { '0' } else { '1' })
        .collect();
    assert_eq!(bits, expected);
}

#[test]
fn growing_terms_hit_the_size_budget() {
    let spec = basic("topterm.spec");
    let t = spec.term("c").unwrap();
    let budgets = Budgets {
        max_term_size: 300,
        ..Budgets::default()
    };
    let (prefix, failure) = eval_prefix(&spec, &t, 1, &budgets).unwrap_err();
    assert!(prefix.values.is_empty());
    assert!(failure.to_string().contains("size"), "{failure}");
}
