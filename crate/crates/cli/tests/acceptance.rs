//! Acceptance suite: one PASS/FAIL line per criterion, then a single
//! assertion that all of them passed.
//!
//! Run with `cargo test -p pdakit-cli --test acceptance -- --nocapture` to
//! see the report.

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use pdakit::actree::{quasirun_from_tree, tree_from_quasirun, validate_actree};
use pdakit::cfg::{Cfg, GSym, Rule, VarId};
use pdakit::convert::*;
use pdakit::family::*;
use pdakit::format::parse_pda;
use pdakit::oracle::*;
use pdakit::pda::{random_pda, RandomPdaShape};
use pdakit::{ActTree, ActionId, Id, Pda, StateId, SymbolId, TerminalId};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

// Runtime budgets per criterion.
const BUDGET_FAMILY_COUNTS: Duration = Duration::from_secs(1);
const BUDGET_SINGLE_WORD: Duration = Duration::from_secs(30);
const BUDGET_UNIQUENESS: Duration = Duration::from_secs(60);
const BUDGET_DIMENSION: Duration = Duration::from_secs(1);
const BUDGET_BIJECTION: Duration = Duration::from_secs(60);
const BUDGET_LEMMA1: Duration = Duration::from_secs(10);

// Sizes pinned by the criteria.
const BIJECTION_PDAS: u64 = 100;
const BIJECTION_MAX_MOVES: usize = 10;
const LEMMA1_RANDOM_TREES: usize = 10_000;
const UDPDA_FINAL_BOUND: usize = 8;
const PIPELINE_BOUND: usize = 12;
const EXPECTED_N21: u32 = 106;

fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn fixture_pda(name: &str) -> Pda {
    parse_pda(&std::fs::read_to_string(fixtures().join(name)).unwrap()).unwrap()
}

fn params(n: u32, k: u32) -> FamilyParams {
    FamilyParams::new(n, k).unwrap()
}

fn b_word(n: usize) -> Vec<String> {
    vec!["b".to_string(); n]
}

fn within(start: Instant, budget: Duration) -> Result<String, String> {
    let t = start.elapsed();
    if t <= budget {
        Ok(format!("{} ms", t.as_millis()))
    } else {
        Err(format!("took {} ms, budget {} ms", t.as_millis(), budget.as_millis()))
    }
}

fn check(cond: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what())
    }
}

fn family_fidelity() -> Result<String, String> {
    let start = Instant::now();
    for n in 1..=4u32 {
        for k in 1..=4u32 {
            let p = build_family_pda(params(n, k)).map_err(|e| e.to_string())?;
            let actions = (n * n * k + n * n + 4 * n + 1) as usize;
            check(
                p.num_states() == n as usize
                    && p.num_stack_symbols() == (k + 2 * n + 4) as usize
                    && p.actions.len() == actions,
                || format!("P({n},{k}) has the wrong shape"),
            )?;
        }
    }
    within(start, BUDGET_FAMILY_COUNTS).map(|t| format!("16 members, {t}"))
}

fn single_word_law() -> Result<String, String> {
    let start = Instant::now();
    let p11 = build_family_pda(params(1, 1)).unwrap();
    let r = enumerate_pda_language(&p11, 12, PdaLimits::default());
    check(r.complete && r.words == BTreeSet::from([b_word(8)]), || "P(1,1) language differs from {b^8}".into())?;

    let tree = build_unique_actree(params(2, 1)).unwrap();
    let n: usize = tree.word_length().try_into().unwrap();
    let golden = std::fs::read_to_string(fixtures().join("p21.actree")).unwrap();
    let golden = pdakit::actree::parse_actree(&golden, &tree.family.pda).map_err(|e| e.to_string())?;
    check(golden.size() == n && n == EXPECTED_N21 as usize, || {
        format!("memo gives N = {n}, golden tree has {} nodes", golden.size())
    })?;
    let r = enumerate_pda_language(&tree.family.pda, n + 2, PdaLimits::default());
    check(r.complete && r.words == BTreeSet::from([b_word(n)]), || "P(2,1) language differs from {b^N}".into())?;
    within(start, BUDGET_SINGLE_WORD).map(|t| format!("N(1,1) = 8, N(2,1) = {n}, {t}"))
}

fn uniqueness() -> Result<String, String> {
    let start = Instant::now();
    for (n, k, bound) in [(1, 1, 20), (2, 1, 120)] {
        let tree = build_unique_actree(params(n, k)).unwrap();
        let accepting: Vec<ActTree> = enumerate_actrees(&tree.family.pda, bound)
            .into_iter()
            .filter(|t| t.accepting)
            .map(|t| t.tree)
            .collect();
        let memo = tree.materialize(DEFAULT_NODE_BUDGET).unwrap();
        check(accepting.len() == 1 && accepting[0] == memo, || {
            format!("P({n},{k}): {} accepting actrees up to size {bound}", accepting.len())
        })?;
    }
    within(start, BUDGET_UNIQUENESS)
}

fn dimension_law() -> Result<String, String> {
    let start = Instant::now();
    for n in 1..=5u32 {
        for k in 1..=5u32 {
            let tree = build_unique_actree(params(n, k)).unwrap();
            if n <= 3 && k <= 3 {
                check(tree.dimension() == n * n * k, || format!("P({n},{k}) has dimension {}", tree.dimension()))?;
            }
            check(*tree.word_length() >= BigUint::from(1u32) << (n * n * k), || format!("P({n},{k}): N < 2^(n²k)"))?;
        }
    }
    within(start, BUDGET_DIMENSION)
}

fn bijection() -> Result<String, String> {
    let start = Instant::now();
    let shape = RandomPdaShape { states: 2, stack_symbols: 3, terminals: 2, actions: 7, max_push: 2, epsilon_rate: 0.3 };
    let mut runs_seen = 0usize;
    for seed in 0..BIJECTION_PDAS {
        let p = random_pda(&mut ChaCha8Rng::seed_from_u64(seed), shape);
        for q in 0..p.num_states() as u32 {
            for x in 0..p.num_stack_symbols() as u32 {
                let start_id = Id::new(StateId(q), vec![SymbolId(x)]);
                let mut trees = BTreeSet::new();
                for r in enumerate_quasi_runs(&p, &start_id, BIJECTION_MAX_MOVES) {
                    let t = tree_from_quasirun(&r, &p).map_err(|e| e.to_string())?;
                    let back = quasirun_from_tree(&t, &start_id, &p).map_err(|e| e.to_string())?;
                    check(back == r && validate_actree(&t, &p), || format!("seed {seed}: round trip failed"))?;
                    check(trees.insert(format!("{t:?}")), || format!("seed {seed}: two runs share an actree"))?;
                    runs_seen += 1;
                }
            }
        }
    }
    within(start, BUDGET_BIJECTION).map(|t| format!("{BIJECTION_PDAS} PDAs, {runs_seen} quasi-runs, {t}"))
}

fn triple_construction() -> Result<String, String> {
    for n in 1..=3u32 {
        for k in 1..=3u32 {
            let p = build_family_pda(params(n, k)).unwrap();
            let g = pda_to_cfg_triples(&p, TripleOptions::default()).map_err(|e| e.to_string())?;
            let pp = (k + 2 * n + 4) as usize;
            let nn = n as usize;
            let expected = if n > 1 { nn * nn * pp + 1 } else { pp };
            check(g.num_variables() == expected, || format!("P({n},{k}): {} variables", g.num_variables()))?;
        }
    }
    let ex = pda_to_cfg_triples(&fixture_pda("example1.pda"), TripleOptions::default()).unwrap();
    check(ex.num_variables() == 13, || format!("example PDA: {} variables", ex.num_variables()))?;
    let fixtures = [
        ("p21.pda", 110),
        ("example1.pda", 10),
        ("udpda_b3.pda", 10),
        ("udpda_doubling.pda", 10),
        ("udpda_stuck.pda", 10),
    ];
    for (name, bound) in fixtures {
        let p = fixture_pda(name);
        let a = enumerate_pda_language(&p, bound, PdaLimits::default());
        let g = pda_to_cfg_triples(&p, TripleOptions::default()).unwrap();
        let b = enumerate_cfg_language(&g, bound);
        check(a.complete && a.words == b.words, || format!("{name}: languages differ at bound {bound}"))?;
    }
    Ok(format!("{} fixtures", fixtures.len()))
}

fn udpda_algorithms() -> Result<String, String> {
    for name in ["udpda_b3.pda", "udpda_doubling.pda", "udpda_stuck.pda"] {
        let p = fixture_pda(name);
        let d = udpda_to_cfg_detailed(&p).map_err(|e| e.to_string())?;
        let np = p.num_states() * p.num_stack_symbols();
        check(d.cfg.num_variables() <= np, || format!("{name}: {} variables > np = {np}", d.cfg.num_variables()))?;
        check(d.fan_out.iter().all(|f| f.rules <= 1), || format!("{name}: an action emits two rules"))?;
        check(d.pop.max_targets() <= 1, || format!("{name}: a head pops to two states"))?;
        let a = enumerate_pda_language(&p, 12, PdaLimits::default());
        check(a.complete && a.words == enumerate_cfg_language(&d.cfg, 12).words, || format!("{name}: language differs"))?;
    }
    for name in ["udpda_b2_final.pda", "udpda_even_final.pda"] {
        let p = fixture_pda(name);
        let sc = udpda_final_to_empty_detailed(&p).map_err(|e| e.to_string())?;
        let pop = pop_relation(&sc.pda);
        check(pop.max_targets() <= 2, || format!("{name}: more than two pop targets after the sink construction"))?;
        let d = udpda_final_to_cfg_detailed(&p).map_err(|e| e.to_string())?;
        check(d.fan_out.iter().all(|f| f.rules <= f.push_len + 1), || format!("{name}: fan-out above d+1"))?;
        let a = enumerate_pda_language(&p, UDPDA_FINAL_BOUND, PdaLimits::default());
        let b = enumerate_cfg_language(&d.cfg, UDPDA_FINAL_BOUND);
        check(a.complete && a.words == b.words, || format!("{name}: language differs at bound {UDPDA_FINAL_BOUND}"))?;
    }
    Ok("5 fixtures".into())
}

fn random_21nf(seed: u64, nv: usize) -> Cfg {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    let mut rules = BTreeSet::new();
    for _ in 0..r.gen_range(nv..=3 * nv) {
        let head = VarId(r.gen_range(0..nv) as u32);
        let mut body = Vec::new();
        if r.gen_bool(0.6) {
            body.push(GSym::Term(TerminalId(r.gen_range(0..2))));
        }
        for _ in 0..r.gen_range(0..=2) {
            body.push(GSym::Var(VarId(r.gen_range(0..nv) as u32)));
        }
        rules.insert(Rule { head, body });
    }
    Cfg {
        variables: (0..nv).map(|i| format!("V{i}")).collect(),
        terminals: vec!["a".into(), "b".into()],
        start: VarId(0),
        rules: rules.into_iter().collect(),
    }
}

fn parikh_pipeline() -> Result<String, String> {
    let p = build_family_pda(params(1, 1)).unwrap();
    let fsa = pda_to_parikh_fsa(&p, DEFAULT_RULE_BUDGET).map_err(|e| e.to_string())?;
    let chain = minimal_unary_fsa(8, "b");
    let cmp = parikh_equiv_upto(&enumerate_fsa_language(&fsa, PIPELINE_BOUND), &enumerate_fsa_language(&chain, PIPELINE_BOUND))
        .map_err(|e| e.to_string())?;
    check(cmp.equal, || "pipeline automaton of P(1,1) is not Parikh-equivalent to {b^8}".into())?;
    let mut grammars = 0;
    for nv in 1..=5usize {
        for seed in 0..40u64 {
            let g = random_21nf(seed * 7 + nv as u64, nv);
            let n = nv as u64;
            let tight = cfg_to_parikh_fsa(&g, Some(nv)).unwrap().num_states() as u128;
            let default = cfg_to_parikh_fsa(&g, None).unwrap().num_states() as u128;
            check(tight <= binomial(2 * n, n) && binomial(2 * n, n) <= 4u128.pow(nv as u32), || {
                format!("{nv} variables: {tight} states with cap n")
            })?;
            check(default <= binomial(2 * n + 1, n) && default <= 4u128.pow(nv as u32), || {
                format!("{nv} variables: {default} states with the default cap")
            })?;
            grammars += 1;
        }
    }
    let n11: u64 = family_word_length(params(1, 1)).unwrap().try_into().unwrap();
    check(minimal_unary_fsa(n11, "b").num_states() == 9, || "chain automaton for N(1,1) is not 9 states".into())?;
    Ok(format!("pipeline {} states, {grammars} grammars", fsa.num_states()))
}

fn lemma1_suite() -> Result<String, String> {
    let start = Instant::now();
    fn random_tree(r: &mut ChaCha8Rng, budget: &mut usize, depth: usize) -> ActTree {
        *budget = budget.saturating_sub(1);
        let arity = if depth > 12 || *budget == 0 { 0 } else { r.gen_range(0..=3usize.min(*budget)) };
        let children = (0..arity).map(|_| random_tree(r, budget, depth + 1)).collect();
        ActTree::node(ActionId(r.gen_range(0..4)), children)
    }
    let mut r = ChaCha8Rng::seed_from_u64(1);
    for i in 0..LEMMA1_RANDOM_TREES {
        let mut budget = r.gen_range(1..300);
        let t = random_tree(&mut r, &mut budget, 0);
        check(t.size() as u128 >= 1u128 << t.dimension(), || format!("random tree {i} violates the bound"))?;
    }
    let mut subtrees = 0;
    for n in 1..=5u32 {
        for k in 1..=5u32 {
            let tree = build_unique_actree(params(n, k)).unwrap();
            for e in tree.memo.values() {
                check(e.size >= BigUint::from(1u32) << e.dimension, || format!("P({n},{k}) subtree violates the bound"))?;
                subtrees += 1;
            }
        }
    }
    within(start, BUDGET_LEMMA1).map(|t| format!("{LEMMA1_RANDOM_TREES} random trees, {subtrees} family subtrees, {t}"))
}

fn run_cli(args: &[&str], out: &std::path::Path) -> Vec<u8> {
    let mut full: Vec<&str> = args.to_vec();
    let out_str = out.to_str().unwrap();
    full.extend(["-o", out_str]);
    let status = Command::new(env!("CARGO_BIN_EXE_pdakit")).args(&full).status().unwrap();
    assert!(status.success(), "pdakit {args:?} failed");
    std::fs::read(out).unwrap()
}

fn artifact_determinism() -> Result<String, String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let fx = |n: &str| fixtures().join(n).to_str().unwrap().to_string();
    let (p21, ex, b3, even) = (fx("p21.pda"), fx("example1.pda"), fx("udpda_b3.pda"), fx("udpda_even_final.pda"));
    let g = dir.path().join("p11.cfg");
    let p11 = dir.path().join("p11.pda");
    run_cli(&["gen-family", "--n", "1", "--k", "1"], &p11);
    let p11 = p11.to_str().unwrap().to_string();
    let reduced = dir.path().join("p11r.pda");
    run_cli(&["convert", "reduce", &p11], &reduced);
    run_cli(&["convert", "pda-to-cfg", reduced.to_str().unwrap(), "--trim"], &g);
    let g = g.to_str().unwrap().to_string();
    let commands: Vec<Vec<&str>> = vec![
        vec!["gen-family", "--n", "3", "--k", "2"],
        vec!["gen-family", "--random", "--seed", "5"],
        vec!["family-word", "--n", "3", "--k", "3"],
        vec!["convert", "pda-to-cfg", &p21],
        vec!["convert", "pda-to-cfg", &p21, "--trim"],
        vec!["convert", "udpda-to-cfg", &b3],
        vec!["convert", "udpda-final-to-cfg", &even],
        vec!["convert", "cfg-to-parikh-nfa", &g],
        vec!["convert", "pda-to-parikh-nfa", &ex],
        vec!["convert", "reduce", &p21],
        vec!["actree", "--n", "2", "--k", "1"],
        vec!["report", "bounds", "--n", "2", "--k", "1"],
        vec!["report", "bounds", "--grid", "3", "3", "--format", "json"],
    ];
    for args in &commands {
        let a = run_cli(args, &dir.path().join("a"));
        let b = run_cli(args, &dir.path().join("b"));
        check(a == b && !a.is_empty(), || format!("pdakit {} is not reproducible", args.join(" ")))?;
    }
    Ok(format!("{} commands", commands.len()))
}

type Check = fn() -> Result<String, String>;

#[test]
fn acceptance_criteria() {
    let criteria: [(&str, Check); 10] = [
        ("family fidelity", family_fidelity),
        ("single-word law", single_word_law),
        ("uniqueness", uniqueness),
        ("dimension law", dimension_law),
        ("bijection", bijection),
        ("triple construction", triple_construction),
        ("UDPDA algorithms", udpda_algorithms),
        ("Parikh pipeline", parikh_pipeline),
        ("size vs dimension", lemma1_suite),
        ("artifact determinism", artifact_determinism),
    ];
    let mut failed = Vec::new();
    for (i, (name, f)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            Err(e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        match outcome {
            Ok(detail) => println!("criterion {:>2} {name}: PASS ({detail})", i + 1),
            Err(why) => {
                println!("criterion {:>2} {name}: FAIL ({why})", i + 1);
                failed.push(i + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
