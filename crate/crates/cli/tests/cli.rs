use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
        .to_str()
        .unwrap()
        .to_string()
}

fn pdakit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pdakit")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn gen_family_then_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("p21.pda");
    let o = pdakit(&["gen-family", "--n", "2", "--k", "1", "-o", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let written = std::fs::read_to_string(&out).unwrap();
    let p = pdakit::format::parse_pda(&written).unwrap();
    assert_eq!(p.actions.len(), 17);

    let o = pdakit(&["report", "bounds", "--n", "2", "--k", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("p = 9\n"));
    assert!(text.contains("cfg_textbook_vars = 37\n"));
    assert!(text.contains("word_length = 106\n"));
}

#[test]
fn json_and_text_reports_agree() {
    let text = stdout(&pdakit(&["report", "bounds", "--n", "3", "--k", "2"]));
    let json: serde_json::Value =
        serde_json::from_str(&stdout(&pdakit(&["report", "bounds", "--n", "3", "--k", "2", "--format", "json"]))).unwrap();
    for line in text.lines().skip(1) {
        let (key, value) = line.split_once(" = ").unwrap();
        let j = &json[key];
        let j = j.as_str().map(str::to_string).unwrap_or_else(|| j.to_string());
        assert_eq!(j, value, "{key}");
    }
}

#[test]
fn grid_lists_members_in_order() {
    let json: serde_json::Value =
        serde_json::from_str(&stdout(&pdakit(&["report", "bounds", "--grid", "2", "3", "--format", "json"]))).unwrap();
    let members: Vec<(u64, u64)> = json
        .as_array()
        .unwrap()
        .iter()
        .map(|r| (r["n"].as_u64().unwrap(), r["k"].as_u64().unwrap()))
        .collect();
    assert_eq!(members, vec![(1, 1), (1, 2), (1, 3), (2, 1), (2, 2), (2, 3)]);
}

#[test]
fn family_word_prints_decimal_and_log() {
    let text = stdout(&pdakit(&["family-word", "--n", "1", "--k", "1"]));
    assert!(text.contains("word_length = 8\n"));
    assert!(text.contains("word_length_log2 = 3\n"));
}

#[test]
fn parikh_equiv_exit_codes() {
    let o = pdakit(&["check", "parikh-equiv", &fixture("anbn.cfg"), &fixture("abstar.fsa"), "--max-len", "12"]);
    assert_eq!(o.status.code(), Some(0));
    let o = pdakit(&["check", "parikh-equiv", &fixture("anbn.cfg"), &fixture("astar.fsa"), "--max-len", "12"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("(a:1)"));
}

#[test]
fn lang_equiv_of_pda_and_its_grammar() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("p21.cfg");
    let o = pdakit(&["convert", "pda-to-cfg", &fixture("p21.pda"), "-o", g.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let o = pdakit(&["check", "lang-equiv", &fixture("p21.pda"), g.to_str().unwrap(), "--max-len", "110"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let o = pdakit(&["check", "lang-equiv", &fixture("p21.pda"), &fixture("udpda_b3.pda"), "--max-len", "110"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn nondeterministic_input_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out.cfg");
    let o = pdakit(&["convert", "udpda-to-cfg", &fixture("nondet.pda"), "-o", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("not deterministic"));
    assert!(!out.exists());
}

#[test]
fn structural_checks() {
    assert_eq!(pdakit(&["check", "deterministic", &fixture("udpda_even_final.pda")]).status.code(), Some(0));
    assert_eq!(pdakit(&["check", "deterministic", &fixture("nondet.pda")]).status.code(), Some(1));
    assert_eq!(pdakit(&["check", "reduced", &fixture("example1.pda")]).status.code(), Some(0));
    assert_eq!(pdakit(&["check", "reduced", &fixture("p21.pda")]).status.code(), Some(1));
    assert_eq!(pdakit(&["check", "21nf", &fixture("anbn.cfg")]).status.code(), Some(1));
}

#[test]
fn usage_errors() {
    assert_eq!(pdakit(&["report", "bounds", "--n", "0"]).status.code(), Some(2));
    let o = pdakit(&["gen-family", "--frobnicate"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("--frobnicate"));
    assert_eq!(pdakit(&["simulate", "/nonexistent.pda"]).status.code(), Some(2));
    assert_eq!(pdakit(&["actree", "--n", "2"]).status.code(), Some(2));
}

#[test]
fn simulate_lists_sorted_words() {
    let text = stdout(&pdakit(&["simulate", &fixture("udpda_even_final.pda"), "--max-len", "4"]));
    assert_eq!(text, "eps\nb b\nb b b b\n# 3 words up to length 4, complete = true\n");
}

#[test]
fn actree_of_p21_matches_golden_file() {
    let text = stdout(&pdakit(&["actree", "--n", "2", "--k", "1"]));
    assert_eq!(text, std::fs::read_to_string(fixture("p21.actree")).unwrap());
    let listed = stdout(&pdakit(&["actree", &fixture("p21.pda"), "--max-size", "120"]));
    assert_eq!(listed, text);
}

#[test]
fn pipeline_automaton_matches_chain() {
    let dir = tempfile::tempdir().unwrap();
    let p11 = dir.path().join("p11.pda");
    let fsa = dir.path().join("p11.fsa");
    pdakit(&["gen-family", "-o", p11.to_str().unwrap()]);
    let o = pdakit(&["convert", "pda-to-parikh-nfa", p11.to_str().unwrap(), "-o", fsa.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let o = pdakit(&["check", "parikh-equiv", p11.to_str().unwrap(), fsa.to_str().unwrap(), "--max-len", "12"]);
    assert_eq!(o.status.code(), Some(0));
}
