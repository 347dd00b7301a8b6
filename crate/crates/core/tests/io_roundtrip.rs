mod common;

use common::*;
use proptest::prelude::*;
use streamprod::io::{export_tpdb, parse_spec, print_spec};

#[test]
fn fixtures_survive_print_and_parse() {
    for name in ALL {
        for spec in [raw(name), basic(name)] {
            let printed = print_spec(&spec);
            let again = parse_spec(&printed).unwrap_or_else(|e| panic!("{name}: {e}\n{printed}"));
            assert_eq!(again.rules(), spec.rules(), "{name}");
            assert_eq!(print_spec(&again), printed, "{name}");
        }
    }
}

#[test]
fn exports_match_golden_files() {
    for (name, golden) in [
        (
            "alt_morse.spec",
            include_str!("golden/alt_morse_overflow.trs"),
        ),
        ("fc.spec", include_str!("golden/fc_overflow.trs")),
    ] {
        let extended = basic(name).extend_with_overflow().unwrap();
        assert_eq!(export_tpdb(&extended).unwrap(), golden, "{name}");
    }
}

#[test]
fn export_is_deterministic() {
    for name in ORTHOGONAL {
        let first = export_tpdb(&basic(name).extend_with_overflow().unwrap()).unwrap();
        let second = export_tpdb(&basic(name).extend_with_overflow().unwrap()).unwrap();
        assert_eq!(first, second, "{name}");
        let rules = &first[first.find("(RULES").unwrap()..];
        assert!(rules.contains("cons(x, sigma) -> overflow"), "{name}");
        assert!(!rules.contains(':'), "{name}: `:` leaked into the rules");
    }
}

#[test]
fn parse_errors_carry_locations() {
    let err = parse_spec("c : s\nc -> 1:").unwrap_err().to_string();
    assert!(err.starts_with("2:8:"), "{err}");
}

const HEADER: &str = "c : s\nf : s -> s\ng : d s -> s\nnot : d -> d\n0 : d\n1 : d\n";

fn data_term() -> impl Strategy<Value = String> {
    let leaf = prop_oneof![
        Just("0".to_string()),
        Just("1".to_string()),
        Just("x".to_string())
    ];
    leaf.prop_recursive(3, 8, 1, |inner| inner.prop_map(|t| format!("not({t})")))
}

fn stream_term() -> impl Strategy<Value = String> {
    let leaf = prop_oneof![Just("c".to_string()), Just("σ".to_string())];
    leaf.prop_recursive(4, 16, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|t| format!("f({t})")),
            (data_term(), inner.clone()).prop_map(|(d, t)| format!("g({d}, {t})")),
            (data_term(), inner).prop_map(|(d, t)| format!("{d}:{t}")),
        ]
    })
}

proptest! {
    // right-hand sides over the variables of f(x:σ)
    #[test]
    fn random_specs_round_trip(rhs in prop::collection::vec(stream_term(), 1..4)) {
        let mut text = HEADER.to_string();
        text.push_str("c -> 0:c\n");
        for (i, r) in rhs.iter().enumerate() {
            let lhs = if i == 0 { "f(x:σ)".to_string() } else { format!("g({}, x:σ)", i % 2) };
            text.push_str(&format!("{lhs} -> {r}\n"));
        }
        let spec = parse_spec(&text).unwrap();
        let printed = print_spec(&spec);
        let again = parse_spec(&printed).unwrap();
        prop_assert_eq!(again.rules(), spec.rules());
        prop_assert_eq!(print_spec(&again), printed);
    }
}
