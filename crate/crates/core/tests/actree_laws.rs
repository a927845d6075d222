mod common;

use std::collections::{BTreeSet, HashMap};

use pdakit::actree::*;
use pdakit::oracle::{enumerate_actrees, enumerate_quasi_runs};
use pdakit::pda::{is_quasi_run, RandomPdaShape};
use pdakit::{ActTree, ActionId, Id, Pda};
use proptest::prelude::*;
use rand::Rng;

use common::*;

fn a(i: u32) -> ActionId {
    ActionId(i - 1)
}

fn example_tree() -> ActTree {
    let sub = || {
        ActTree::node(
            a(2),
            vec![ActTree::node(a(3), vec![ActTree::leaf(a(4)), ActTree::leaf(a(4))]), ActTree::leaf(a(5))],
        )
    };
    ActTree::node(a(1), vec![sub(), sub()])
}

/// The twelve IDs of the quasi-run worked out for the five-action PDA.
fn example_run_ids(p: &Pda) -> Vec<Id> {
    let id = |q: &str, stack: &[&str]| {
        Id::new(
            p.state_id(q).unwrap(),
            stack.iter().map(|s| p.symbol_id(s).unwrap()).collect(),
        )
    };
    vec![
        id("q0", &["X1"]),
        id("q0", &["X0", "X0"]),
        id("q1", &["X1", "star", "X0"]),
        id("q1", &["X0", "X0", "star", "X0"]),
        id("q1", &["X0", "star", "X0"]),
        id("q1", &["star", "X0"]),
        id("q0", &["X0"]),
        id("q1", &["X1", "star"]),
        id("q1", &["X0", "X0", "star"]),
        id("q1", &["X0", "star"]),
        id("q1", &["star"]),
        id("q0", &[]),
    ]
}

#[test]
fn disassembly_of_the_worked_quasi_run() {
    let p = fixture_pda("example1.pda");
    let run = is_quasi_run(&example_run_ids(&p), &p).expect("a quasi-run");
    assert_eq!(run.moves(), 11);
    let t = tree_from_quasirun(&run, &p).unwrap();
    assert_eq!(t, example_tree());
    assert_eq!(t.size(), 11);
    assert_eq!(t.consumed(&p).len(), 4);
    assert_eq!(t.dimension(), 2);
}

#[test]
fn assembly_of_the_example_tree() {
    let p = fixture_pda("example1.pda");
    let run = quasirun_from_tree(&example_tree(), &p.initial_id(), &p).unwrap();
    assert_eq!(run.ids, example_run_ids(&p));
}

#[test]
fn swapping_children_breaks_validity() {
    let p = fixture_pda("example1.pda");
    let mut t = example_tree();
    t.children[0].children.swap(0, 1);
    assert!(!validate_actree(&t, &p));
}

#[test]
fn wrong_arity_is_rejected() {
    let p = fixture_pda("example1.pda");
    let mut t = example_tree();
    t.children[0].children.pop();
    assert!(!validate_actree(&t, &p));
}

#[test]
fn example_tree_is_the_only_accepting_one_up_to_size_11() {
    let p = fixture_pda("example1.pda");
    let trees: Vec<_> = enumerate_actrees(&p, 11).into_iter().filter(|t| t.accepting).collect();
    assert_eq!(trees.len(), 1);
    assert_eq!(trees[0].tree, example_tree());
}

#[test]
fn pda_without_actions_has_no_actrees() {
    let mut p = fixture_pda("example1.pda");
    p.actions.clear();
    assert!(enumerate_actrees(&p, 10).is_empty());
}

#[test]
fn text_form_round_trips() {
    let p = fixture_pda("example1.pda");
    let text = emit_actree(&example_tree(), &p);
    assert_eq!(parse_actree(&text, &p).unwrap(), example_tree());
    let names: HashMap<ActionId, String> = (1..=5).map(|i| (a(i), format!("a{i}"))).collect();
    assert_eq!(
        example_tree().to_parenthesized(&names),
        "a1(a2(a3(a4,a4),a5),a2(a3(a4,a4),a5))"
    );
}

/// Every quasi-run of at most `max_moves` moves from every one-symbol ID
/// maps to an actree and back, and distinct runs give distinct trees.
pub fn check_bijection(p: &Pda, max_moves: usize) -> usize {
    let mut count = 0;
    for q in 0..p.num_states() as u32 {
        for x in 0..p.num_stack_symbols() as u32 {
            let start = Id::new(pdakit::StateId(q), vec![pdakit::SymbolId(x)]);
            let runs = enumerate_quasi_runs(p, &start, max_moves);
            let mut trees = BTreeSet::new();
            for r in &runs {
                let t = tree_from_quasirun(r, p).unwrap();
                assert!(validate_actree(&t, p));
                assert_eq!(t.size(), r.moves());
                assert_eq!(t.consumed(p), r.consumed(p));
                let back = quasirun_from_tree(&t, &start, p).unwrap();
                assert_eq!(&back, r);
                assert!(trees.insert(format!("{t:?}")), "two runs share a tree");
            }
            count += runs.len();
        }
    }
    count
}

#[test]
fn bijection_on_random_pdas() {
    let shape = RandomPdaShape { states: 2, stack_symbols: 3, terminals: 2, actions: 7, max_push: 2, epsilon_rate: 0.3 };
    let total: usize = small_pdas(0..40, shape).iter().map(|p| check_bijection(p, 8)).sum();
    assert!(total > 0);
}

#[test]
fn trees_enumerated_by_size_are_exactly_the_runs() {
    let shape = RandomPdaShape { states: 2, stack_symbols: 2, terminals: 1, actions: 6, max_push: 2, epsilon_rate: 0.4 };
    for p in small_pdas(100..130, shape) {
        let from_trees: BTreeSet<Vec<ActionId>> = enumerate_actrees(&p, 7)
            .into_iter()
            .filter(|t| t.accepting)
            .map(|t| quasirun_from_tree(&t.tree, &p.initial_id(), &p).unwrap().actions)
            .collect();
        let from_runs: BTreeSet<Vec<ActionId>> = enumerate_quasi_runs(&p, &p.initial_id(), 7)
            .into_iter()
            .map(|r| r.actions)
            .collect();
        assert_eq!(from_trees, from_runs);
    }
}

/// Random tree shape with at most `budget` nodes.
fn random_tree<R: Rng>(rng: &mut R, budget: &mut usize, depth: usize) -> ActTree {
    *budget = budget.saturating_sub(1);
    let arity = if depth > 12 || *budget == 0 { 0 } else { rng.gen_range(0..=3usize.min(*budget)) };
    let children = (0..arity).map(|_| random_tree(rng, budget, depth + 1)).collect();
    ActTree::node(ActionId(rng.gen_range(0..4)), children)
}

#[test]
fn size_is_at_least_two_to_the_dimension_on_random_trees() {
    let mut r = rng(7);
    for _ in 0..10_000 {
        let mut budget = r.gen_range(1..200);
        let t = random_tree(&mut r, &mut budget, 0);
        assert!(t.size() as u128 >= 1u128 << t.dimension());
    }
}

fn arb_tree() -> impl Strategy<Value = ActTree> {
    let leaf = (0u32..3).prop_map(|l| ActTree::leaf(ActionId(l)));
    leaf.prop_recursive(6, 120, 4, |inner| {
        ((0u32..3), prop::collection::vec(inner, 0..4))
            .prop_map(|(l, cs)| ActTree::node(ActionId(l), cs))
    })
}

proptest! {
    #[test]
    fn dimension_lower_bounds_size(t in arb_tree()) {
        prop_assert!(t.size() as u128 >= 1u128 << t.dimension());
    }

    #[test]
    fn dimension_follows_the_children(t in arb_tree()) {
        let ds: Vec<u32> = t.children.iter().map(ActTree::dimension).collect();
        let expected = match ds.iter().max() {
            None => 0,
            Some(&m) if ds.iter().filter(|&&d| d == m).count() >= 2 => m + 1,
            Some(&m) => m,
        };
        prop_assert_eq!(t.dimension(), expected);
    }

    #[test]
    fn bijection_holds_for_any_seed(seed in 1000u64..100_000) {
        let shape = RandomPdaShape { states: 2, stack_symbols: 2, terminals: 1, actions: 5, max_push: 2, epsilon_rate: 0.3 };
        let p = pdakit::pda::random_pda(&mut rng(seed), shape);
        check_bijection(&p, 7);
    }
}
