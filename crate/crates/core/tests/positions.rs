use proptest::prelude::*;
use streamprod::terms::Position;

fn position() -> impl Strategy<Value = Position> {
    prop::collection::vec(1usize..4, 0..5).prop_map(|p| Position::new(p).unwrap())
}

proptest! {
    #[test]
    fn exactly_one_relation_holds(p in position(), q in position()) {
        let relations = [p == q, p.is_above(&q), q.is_above(&p), p.is_parallel(&q)];
        prop_assert_eq!(relations.iter().filter(|&&r| r).count(), 1);
    }

    #[test]
    fn prefix_order_is_transitive(p in position(), q in position(), r in position()) {
        if p.is_prefix_of(&q) && q.is_prefix_of(&r) {
            prop_assert!(p.is_prefix_of(&r));
        }
    }

    #[test]
    fn parallel_is_inherited_downwards(p in position(), q in position(), r in position()) {
        if p.is_parallel(&q) {
            prop_assert!(p.concat(&r).is_parallel(&q));
        }
    }

    #[test]
    fn strip_prefix_inverts_concat(p in position(), r in position()) {
        prop_assert_eq!(p.concat(&r).strip_prefix(&p), Some(r));
    }

    #[test]
    fn display_round_trips(p in position()) {
        prop_assert_eq!(p.to_string().parse::<Position>().unwrap(), p);
    }

    #[test]
    fn ancestors_are_the_proper_prefixes(p in position()) {
        let ancestors: Vec<Position> = p.ancestors().collect();
        prop_assert_eq!(ancestors.len(), p.depth());
        prop_assert!(ancestors.iter().all(|a| a.is_above(&p)));
    }
}

#[test]
fn root_is_written_epsilon() {
    assert_eq!(Position::root().to_string(), "ε");
    assert_eq!(
        "2.1".parse::<Position>().unwrap(),
        Position::new(vec![2, 1]).unwrap()
    );
    assert!("0.1".parse::<Position>().is_err());
}
