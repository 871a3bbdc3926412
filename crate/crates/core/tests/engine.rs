use num_bigint::BigInt;
use thinlab_core::group::GroupDescriptor;
use thinlab_core::symbolic::SymbolicSet;
use thinlab_core::tau::{
    Budget, Engine, FiniteGroupUniverse, IntegerUniverse, LevelVerdict, TreeRank,
};

fn int(v: i64) -> BigInt {
    BigInt::from(v)
}

fn engine() -> Engine<IntegerUniverse> {
    Engine::new(IntegerUniverse, Budget::default())
}

fn geo(b: i64, c: i64, d: i64) -> SymbolicSet {
    SymbolicSet::geo(2, b, c, d, 0).unwrap()
}

fn ap(c: i64, d: i64) -> SymbolicSet {
    SymbolicSet::ap(2, c, d).unwrap()
}

fn escalate(a: &SymbolicSet) -> SymbolicSet {
    let h = a.scale(&int(3)).unwrap();
    h.union(&h.translate(&int(1))).unwrap()
}

#[test]
fn derived_sets() {
    let e = engine();
    let a = geo(2, 1, 0);
    assert_eq!(e.derived_set(&a, &[]).unwrap(), a);
    assert_eq!(
        e.derived_set(&a, &[int(1)]).unwrap(),
        SymbolicSet::finite(2, [2]).unwrap()
    );
    assert!(e.derived_set(&a, &[int(1), int(0)]).is_err());
    let x = int(-17);
    let moved = e
        .derived_set(&a.translate(&x), &[int(3)])
        .unwrap()
        .translate(&-&x);
    assert_eq!(moved, e.derived_set(&a, &[int(3)]).unwrap());
}

#[test]
fn thinness() {
    let e = engine();
    assert!(e.is_thin(&geo(2, 1, 0)).unwrap());
    assert!(!e.is_thin(&ap(2, 0)).unwrap());
    assert!(e
        .is_thin(&SymbolicSet::finite(2, [1, 2, 3]).unwrap())
        .unwrap());
}

#[test]
fn bounded_levels() {
    let e = engine();
    assert!(e
        .level_at_most(&SymbolicSet::finite(2, [4, 9]).unwrap(), 0)
        .unwrap());
    assert!(e.level_at_most(&geo(2, 1, 0), 1).unwrap());
    assert!(!e.level_at_most(&geo(2, 1, 0), 0).unwrap());
    for n in 0..6 {
        assert!(!e.level_at_most(&ap(2, 0), n).unwrap());
    }
}

#[test]
fn exact_levels() {
    let e = engine();
    assert_eq!(
        e.exact_level(&geo(2, 1, 0)).unwrap(),
        LevelVerdict::ExactLevel(1)
    );
    let two = geo(2, 3, 0).union(&geo(2, 3, 1)).unwrap();
    assert_eq!(e.exact_level(&two).unwrap(), LevelVerdict::ExactLevel(2));
    assert_eq!(
        e.exact_level(&SymbolicSet::finite(2, [1, 2, 3]).unwrap())
            .unwrap(),
        LevelVerdict::ExactLevel(0)
    );
}

#[test]
fn even_numbers_cycle_immediately() {
    let e = engine();
    let a = ap(2, 0);
    match e.exact_level(&a).unwrap() {
        LevelVerdict::NotInTauStar(w) => {
            assert!(w.path.is_empty());
            assert_eq!(w.ancestor_index, 0);
            assert_eq!(w.repeat_shift, int(2));
            assert_eq!(w.translation, int(0));
            assert!(e.replay(&a, &w).unwrap());
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn mixed_sets_with_progressions_are_certified() {
    let e = engine();
    let a = geo(2, 1, 0)
        .union(&ap(6, 1))
        .unwrap()
        .union(&geo(2, 5, 3))
        .unwrap();
    let LevelVerdict::NotInTauStar(w) = e.exact_level(&a).unwrap() else {
        panic!("expected a cycle")
    };
    assert!(e.replay(&a, &w).unwrap());
}

#[test]
fn escalation_chain_levels() {
    let e = engine();
    let mut a = geo(2, 1, 0);
    for level in 1..=4 {
        assert_eq!(e.exact_level(&a).unwrap(), LevelVerdict::ExactLevel(level));
        assert_eq!(e.tree_rank(&a).unwrap(), TreeRank::Rank(level));
        a = escalate(&a);
    }
}

#[test]
fn tree_ranks() {
    let e = engine();
    assert_eq!(
        e.tree_rank(&SymbolicSet::finite(2, [7]).unwrap()).unwrap(),
        TreeRank::Rank(0)
    );
    assert_eq!(e.tree_rank(&geo(2, 1, 0)).unwrap(), TreeRank::Rank(1));
    assert_eq!(e.tree_rank(&ap(2, 0)).unwrap(), TreeRank::NotWellFounded);
}

#[test]
fn tree_dumps() {
    let e = engine();
    let fin = e
        .tree_dump(&SymbolicSet::finite(2, [1, 5]).unwrap(), 5)
        .unwrap();
    assert_eq!(fin.nodes.len(), 1);
    assert!(fin.nodes[0].in_f);
    assert_eq!(fin.tree_nodes().count(), 0);

    let g = e.tree_dump(&geo(2, 1, 0), 2).unwrap();
    assert_eq!(g.nodes.len(), 1);
    assert_eq!(g.nodes[0].rank, Some(1));

    let even = e.tree_dump(&ap(2, 0), 3).unwrap();
    let labels: Vec<String> = even.nodes.iter().map(|n| n.path_labels.join(",")).collect();
    assert_eq!(labels, vec!["", "2", "2,2", "2,2,2"]);
    assert!(even.nodes.iter().all(|n| n.set == "ap(2,0)"));

    let two = geo(2, 3, 0).union(&geo(2, 3, 1)).unwrap();
    let d = e.tree_dump(&two, 2).unwrap();
    assert_eq!(d.nodes.len(), 3);
    assert_eq!(d.nodes[0].rank, Some(2));
    assert!(d.to_dot().starts_with("digraph"));
}

#[test]
fn unknown_on_tiny_budget() {
    let e = Engine::new(
        IntegerUniverse,
        Budget {
            max_depth: 32,
            max_nodes: 1,
        },
    );
    let mut a = geo(2, 1, 0);
    for _ in 0..3 {
        a = escalate(&a);
    }
    assert!(e.exact_level(&a).unwrap().is_unknown());
}

#[test]
fn finite_group_examples() {
    let u = FiniteGroupUniverse::new(GroupDescriptor::CyclicMod(5), 0).unwrap();
    let e = Engine::new(u, Budget::default());
    assert_eq!(
        e.exact_level(&0b00011).unwrap(),
        LevelVerdict::ExactLevel(2)
    );
    assert_eq!(e.tree_rank(&0b00011).unwrap(), TreeRank::Rank(2));
    let u = FiniteGroupUniverse::new(GroupDescriptor::CyclicMod(5), 1).unwrap();
    let e = Engine::new(u, Budget::default());
    let LevelVerdict::NotInTauStar(w) = e.exact_level(&0b11111).unwrap() else {
        panic!()
    };
    assert!(e.replay(&0b11111, &w).unwrap());
    assert_eq!(
        e.exact_level(&0b00001).unwrap(),
        LevelVerdict::ExactLevel(0)
    );
}
