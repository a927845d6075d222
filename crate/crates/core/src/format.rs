//! Line-based text format for PDAs, grammars and finite automata.
//!
//! ```text
//! [pda]
//! states = q0 q1
//! input = b
//! stack = S X
//! initial = q0 S
//! accept = empty-stack            # or: final-states q1
//! act q0 S : b -> q0 X            # `eps` for no input, nothing after target for no push
//! ```
//!
//! Emission is normalized: names are sorted, actions/rules/transitions are
//! sorted and deduplicated, so equal objects print identically.

use std::collections::{BTreeMap, BTreeSet};

use crate::cfg::{Cfg, GSym, Rule, VarId};
use crate::error::ParseError;
use crate::fsa::{Fsa, FsaState, Transition};
use crate::is_token;
use crate::pda::{Acceptance, Action, Pda, StateId, SymbolId, TerminalId};

pub const EPS: &str = "eps";

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Automaton {
    Pda(Pda),
    Cfg(Cfg),
    Fsa(Fsa),
}

impl Automaton {
    pub fn kind(&self) -> &'static str {
        match self {
            Automaton::Pda(_) => "pda",
            Automaton::Cfg(_) => "cfg",
            Automaton::Fsa(_) => "fsa",
        }
    }
}

struct Line<'a> {
    number: usize,
    tokens: Vec<&'a str>,
}

fn lex(text: &str) -> Vec<Line<'_>> {
    text.lines()
        .enumerate()
        .filter_map(|(i, raw)| {
            let body = raw.split('#').next().unwrap_or("");
            let tokens: Vec<&str> = body.split_whitespace().collect();
            (!tokens.is_empty()).then_some(Line { number: i + 1, tokens })
        })
        .collect()
}

fn check_names(line: usize, names: &[&str]) -> Result<(), ParseError> {
    for n in names {
        if !is_token(n) || *n == EPS {
            return Err(ParseError::syntax(line, format!("invalid symbol name `{n}`")));
        }
    }
    Ok(())
}

/// Collects `key = values` declarations and the remaining statement lines.
struct Section<'a> {
    header_line: usize,
    last_line: usize,
    keys: BTreeMap<&'a str, (usize, Vec<&'a str>)>,
    statements: Vec<Line<'a>>,
}

impl<'a> Section<'a> {
    fn split(lines: Vec<Line<'a>>, header_line: usize, statement_kw: &str) -> Result<Self, ParseError> {
        let last_line = lines.last().map_or(header_line, |l| l.number);
        let mut keys = BTreeMap::new();
        let mut statements = Vec::new();
        for line in lines {
            if line.tokens[0] == statement_kw {
                statements.push(line);
            } else if line.tokens.get(1) == Some(&"=") {
                let key = line.tokens[0];
                let values = line.tokens[2..].to_vec();
                if keys.insert(key, (line.number, values)).is_some() {
                    return Err(ParseError::syntax(line.number, format!("duplicate `{key}`")));
                }
            } else {
                return Err(ParseError::syntax(
                    line.number,
                    format!("unexpected `{}`", line.tokens.join(" ")),
                ));
            }
        }
        Ok(Section { header_line, last_line, keys, statements })
    }

    fn take(&mut self, key: &str, required: bool) -> Result<Option<(usize, Vec<&'a str>)>, ParseError> {
        match self.keys.remove(key) {
            Some(v) => Ok(Some(v)),
            None if required => Err(ParseError::syntax(
                self.last_line.max(self.header_line),
                format!("missing `{key} = ...`"),
            )),
            None => Ok(None),
        }
    }

    fn finish(self) -> Result<(), ParseError> {
        if let Some((key, (line, _))) = self.keys.into_iter().next() {
            return Err(ParseError::syntax(line, format!("unknown key `{key}`")));
        }
        Ok(())
    }
}

fn declare(line: usize, names: &[&str]) -> Result<Vec<String>, ParseError> {
    let mut seen = BTreeSet::new();
    for n in names {
        if !seen.insert(*n) {
            return Err(ParseError::syntax(line, format!("`{n}` declared twice")));
        }
    }
    Ok(names.iter().map(|s| s.to_string()).collect())
}

fn lookup(table: &[String], line: usize, token: &str) -> Result<u32, ParseError> {
    table
        .iter()
        .position(|s| s == token)
        .map(|i| i as u32)
        .ok_or_else(|| ParseError::UndeclaredSymbol { line, token: token.to_string() })
}

pub fn parse_automaton(text: &str) -> Result<Automaton, ParseError> {
    let mut lines = lex(text);
    if lines.is_empty() {
        return Err(ParseError::syntax(1, "empty input"));
    }
    let header = lines.remove(0);
    if header.tokens.len() != 1 {
        return Err(ParseError::syntax(header.number, "expected a section header"));
    }
    for line in &lines {
        for t in &line.tokens {
            if !matches!(*t, "=" | ":" | "->") && !is_token(t) {
                return Err(ParseError::syntax(line.number, format!("bad token `{t}`")));
            }
        }
    }
    match header.tokens[0] {
        "[pda]" => parse_pda_body(lines, header.number).map(Automaton::Pda),
        "[cfg]" => parse_cfg_body(lines, header.number).map(Automaton::Cfg),
        "[fsa]" => parse_fsa_body(lines, header.number).map(Automaton::Fsa),
        other => Err(ParseError::syntax(header.number, format!("unknown section `{other}`"))),
    }
}

fn parse_pda_body(lines: Vec<Line<'_>>, header: usize) -> Result<Pda, ParseError> {
    let mut sec = Section::split(lines, header, "act")?;
    let (l, states) = sec.take("states", true)?.unwrap();
    if states.is_empty() {
        return Err(ParseError::syntax(l, "`states` must be nonempty"));
    }
    check_names(l, &states)?;
    let states = declare(l, &states)?;
    let (l, input) = sec.take("input", false)?.unwrap_or((header, vec![]));
    check_names(l, &input)?;
    let input_alphabet = declare(l, &input)?;
    let (l, stack) = sec.take("stack", true)?.unwrap();
    if stack.is_empty() {
        return Err(ParseError::syntax(l, "`stack` must be nonempty"));
    }
    check_names(l, &stack)?;
    let stack_alphabet = declare(l, &stack)?;
    let (l, init) = sec.take("initial", true)?.unwrap();
    if init.len() != 2 {
        return Err(ParseError::syntax(l, "`initial` takes a state and a stack symbol"));
    }
    let initial_state = StateId(lookup(&states, l, init[0])?);
    let initial_stack_symbol = SymbolId(lookup(&stack_alphabet, l, init[1])?);
    let acceptance = match sec.take("accept", false)? {
        None => Acceptance::EmptyStack,
        Some((l, v)) => match v.split_first() {
            Some((&"empty-stack", [])) => Acceptance::EmptyStack,
            Some((&"final-states", rest)) => Acceptance::FinalStates(
                rest.iter()
                    .map(|s| lookup(&states, l, s).map(StateId))
                    .collect::<Result<_, _>>()?,
            ),
            _ => {
                return Err(ParseError::syntax(
                    l,
                    "`accept` is `empty-stack` or `final-states <states>`",
                ))
            }
        },
    };
    let statements = std::mem::take(&mut sec.statements);
    sec.finish()?;

    let mut actions = Vec::new();
    for line in &statements {
        // act q X : b -> q' Y*
        let t = &line.tokens;
        if t.len() < 7 || t[3] != ":" || t[5] != "->" {
            return Err(ParseError::syntax(line.number, "expected `act q X : b -> q' Y...`"));
        }
        let n = line.number;
        let a = Action {
            source: StateId(lookup(&states, n, t[1])?),
            pop: SymbolId(lookup(&stack_alphabet, n, t[2])?),
            input: if t[4] == EPS {
                None
            } else {
                Some(TerminalId(lookup(&input_alphabet, n, t[4])?))
            },
            target: StateId(lookup(&states, n, t[6])?),
            push: t[7..]
                .iter()
                .map(|x| lookup(&stack_alphabet, n, x).map(SymbolId))
                .collect::<Result<_, _>>()?,
        };
        if !actions.contains(&a) {
            actions.push(a);
        }
    }
    Ok(Pda {
        states,
        input_alphabet,
        stack_alphabet,
        initial_state,
        initial_stack_symbol,
        actions,
        acceptance,
    })
}

fn parse_cfg_body(lines: Vec<Line<'_>>, header: usize) -> Result<Cfg, ParseError> {
    let mut sec = Section::split(lines, header, "rule")?;
    let (l, vars) = sec.take("variables", true)?.unwrap();
    if vars.is_empty() {
        return Err(ParseError::syntax(l, "`variables` must be nonempty"));
    }
    check_names(l, &vars)?;
    let variables = declare(l, &vars)?;
    let (l, terms) = sec.take("terminals", false)?.unwrap_or((header, vec![]));
    check_names(l, &terms)?;
    let terminals = declare(l, &terms)?;
    if let Some(t) = terminals.iter().find(|t| variables.contains(t)) {
        return Err(ParseError::syntax(l, format!("`{t}` is both a variable and a terminal")));
    }
    let (l, start) = sec.take("start", true)?.unwrap();
    if start.len() != 1 {
        return Err(ParseError::syntax(l, "`start` takes one variable"));
    }
    let start = VarId(lookup(&variables, l, start[0])?);
    let statements = std::mem::take(&mut sec.statements);
    sec.finish()?;

    let mut rules = Vec::new();
    for line in &statements {
        let t = &line.tokens;
        if t.len() < 3 || t[2] != "->" {
            return Err(ParseError::syntax(line.number, "expected `rule A -> body`"));
        }
        let n = line.number;
        let head = VarId(lookup(&variables, n, t[1])?);
        let body_tokens: &[&str] = if t.len() == 4 && t[3] == EPS { &[] } else { &t[3..] };
        let mut body = Vec::new();
        for tok in body_tokens {
            if let Some(i) = variables.iter().position(|v| v == tok) {
                body.push(GSym::Var(VarId(i as u32)));
            } else if let Some(i) = terminals.iter().position(|v| v == tok) {
                body.push(GSym::Term(TerminalId(i as u32)));
            } else {
                return Err(ParseError::UndeclaredSymbol { line: n, token: tok.to_string() });
            }
        }
        let r = Rule { head, body };
        if !rules.contains(&r) {
            rules.push(r);
        }
    }
    Ok(Cfg { variables, terminals, start, rules })
}

fn parse_fsa_body(lines: Vec<Line<'_>>, header: usize) -> Result<Fsa, ParseError> {
    let mut sec = Section::split(lines, header, "trans")?;
    let (l, st) = sec.take("states", true)?.unwrap();
    if st.is_empty() {
        return Err(ParseError::syntax(l, "`states` must be nonempty"));
    }
    check_names(l, &st)?;
    let states = declare(l, &st)?;
    let (l, al) = sec.take("alphabet", false)?.unwrap_or((header, vec![]));
    check_names(l, &al)?;
    let alphabet = declare(l, &al)?;
    let (l, init) = sec.take("initial", true)?.unwrap();
    if init.len() != 1 {
        return Err(ParseError::syntax(l, "`initial` takes one state"));
    }
    let initial = FsaState(lookup(&states, l, init[0])?);
    let finals = match sec.take("final", false)? {
        None => BTreeSet::new(),
        Some((l, f)) => f
            .iter()
            .map(|s| lookup(&states, l, s).map(FsaState))
            .collect::<Result<_, _>>()?,
    };
    let statements = std::mem::take(&mut sec.statements);
    sec.finish()?;
    let mut transitions = Vec::new();
    for line in &statements {
        let t = &line.tokens;
        if t.len() != 4 {
            return Err(ParseError::syntax(line.number, "expected `trans s label t`"));
        }
        let n = line.number;
        let tr = Transition {
            source: FsaState(lookup(&states, n, t[1])?),
            label: if t[2] == EPS { None } else { Some(TerminalId(lookup(&alphabet, n, t[2])?)) },
            target: FsaState(lookup(&states, n, t[3])?),
        };
        if !transitions.contains(&tr) {
            transitions.push(tr);
        }
    }
    Ok(Fsa { states, alphabet, transitions, initial, finals })
}

pub fn parse_pda(text: &str) -> Result<Pda, ParseError> {
    match parse_automaton(text)? {
        Automaton::Pda(p) => Ok(p),
        other => Err(ParseError::syntax(1, format!("expected [pda], found [{}]", other.kind()))),
    }
}

pub fn parse_cfg(text: &str) -> Result<Cfg, ParseError> {
    match parse_automaton(text)? {
        Automaton::Cfg(g) => Ok(g),
        other => Err(ParseError::syntax(1, format!("expected [cfg], found [{}]", other.kind()))),
    }
}

pub fn parse_fsa(text: &str) -> Result<Fsa, ParseError> {
    match parse_automaton(text)? {
        Automaton::Fsa(a) => Ok(a),
        other => Err(ParseError::syntax(1, format!("expected [fsa], found [{}]", other.kind()))),
    }
}

/// Sorted copy of `names` and the old-index → new-index map.
fn sort_table(names: &[String]) -> (Vec<String>, Vec<u32>) {
    let mut order: Vec<usize> = (0..names.len()).collect();
    order.sort_by(|&a, &b| names[a].cmp(&names[b]));
    let mut remap = vec![0u32; names.len()];
    for (new, &old) in order.iter().enumerate() {
        remap[old] = new as u32;
    }
    (order.iter().map(|&i| names[i].clone()).collect(), remap)
}

pub fn normalize_pda(p: &Pda) -> Pda {
    let (states, sm) = sort_table(&p.states);
    let (input_alphabet, tm) = sort_table(&p.input_alphabet);
    let (stack_alphabet, xm) = sort_table(&p.stack_alphabet);
    let s = |q: StateId| StateId(sm[q.index()]);
    let x = |y: SymbolId| SymbolId(xm[y.index()]);
    let actions: BTreeSet<Action> = p
        .actions
        .iter()
        .map(|a| Action {
            source: s(a.source),
            pop: x(a.pop),
            input: a.input.map(|b| TerminalId(tm[b.index()])),
            target: s(a.target),
            push: a.push.iter().map(|&y| x(y)).collect(),
        })
        .collect();
    Pda {
        states,
        input_alphabet,
        stack_alphabet,
        initial_state: s(p.initial_state),
        initial_stack_symbol: x(p.initial_stack_symbol),
        actions: actions.into_iter().collect(),
        acceptance: match &p.acceptance {
            Acceptance::EmptyStack => Acceptance::EmptyStack,
            Acceptance::FinalStates(f) => Acceptance::FinalStates(f.iter().map(|&q| s(q)).collect()),
        },
    }
}

pub fn normalize_cfg(g: &Cfg) -> Cfg {
    let (variables, vm) = sort_table(&g.variables);
    let (terminals, tm) = sort_table(&g.terminals);
    let v = |x: VarId| VarId(vm[x.index()]);
    let rules: BTreeSet<Rule> = g
        .rules
        .iter()
        .map(|r| Rule {
            head: v(r.head),
            body: r
                .body
                .iter()
                .map(|s| match *s {
                    GSym::Var(x) => GSym::Var(v(x)),
                    GSym::Term(t) => GSym::Term(TerminalId(tm[t.index()])),
                })
                .collect(),
        })
        .collect();
    Cfg { variables, terminals, start: v(g.start), rules: rules.into_iter().collect() }
}

pub fn normalize_fsa(a: &Fsa) -> Fsa {
    let (states, sm) = sort_table(&a.states);
    let (alphabet, tm) = sort_table(&a.alphabet);
    let s = |q: FsaState| FsaState(sm[q.index()]);
    let transitions: BTreeSet<Transition> = a
        .transitions
        .iter()
        .map(|t| Transition {
            source: s(t.source),
            label: t.label.map(|b| TerminalId(tm[b.index()])),
            target: s(t.target),
        })
        .collect();
    Fsa {
        states,
        alphabet,
        transitions: transitions.into_iter().collect(),
        initial: s(a.initial),
        finals: a.finals.iter().map(|&q| s(q)).collect(),
    }
}

pub fn normalize(a: &Automaton) -> Automaton {
    match a {
        Automaton::Pda(p) => Automaton::Pda(normalize_pda(p)),
        Automaton::Cfg(g) => Automaton::Cfg(normalize_cfg(g)),
        Automaton::Fsa(f) => Automaton::Fsa(normalize_fsa(f)),
    }
}

fn decl(out: &mut String, key: &str, names: &[String]) {
    out.push_str(key);
    out.push_str(" =");
    for n in names {
        out.push(' ');
        out.push_str(n);
    }
    out.push('\n');
}

pub fn emit_pda(p: &Pda) -> String {
    let p = normalize_pda(p);
    let mut out = String::from("[pda]\n");
    decl(&mut out, "states", &p.states);
    decl(&mut out, "input", &p.input_alphabet);
    decl(&mut out, "stack", &p.stack_alphabet);
    out.push_str(&format!(
        "initial = {} {}\n",
        p.state_name(p.initial_state),
        p.symbol_name(p.initial_stack_symbol)
    ));
    match &p.acceptance {
        Acceptance::EmptyStack => out.push_str("accept = empty-stack\n"),
        Acceptance::FinalStates(f) => {
            out.push_str("accept = final-states");
            for &q in f {
                out.push(' ');
                out.push_str(p.state_name(q));
            }
            out.push('\n');
        }
    }
    for a in &p.actions {
        out.push_str(&format!(
            "act {} {} : {} -> {}",
            p.state_name(a.source),
            p.symbol_name(a.pop),
            a.input.map_or(EPS, |b| p.terminal_name(b)),
            p.state_name(a.target)
        ));
        for &x in &a.push {
            out.push(' ');
            out.push_str(p.symbol_name(x));
        }
        out.push('\n');
    }
    out
}

pub fn emit_cfg(g: &Cfg) -> String {
    let g = normalize_cfg(g);
    let mut out = String::from("[cfg]\n");
    decl(&mut out, "variables", &g.variables);
    decl(&mut out, "terminals", &g.terminals);
    out.push_str(&format!("start = {}\n", g.var_name(g.start)));
    for r in &g.rules {
        out.push_str("rule ");
        out.push_str(&g.describe_rule(r));
        out.push('\n');
    }
    out
}

pub fn emit_fsa(a: &Fsa) -> String {
    let a = normalize_fsa(a);
    let mut out = String::from("[fsa]\n");
    decl(&mut out, "states", &a.states);
    decl(&mut out, "alphabet", &a.alphabet);
    out.push_str(&format!("initial = {}\n", a.state_name(a.initial)));
    let finals: Vec<String> = a.finals.iter().map(|&q| a.state_name(q).to_string()).collect();
    decl(&mut out, "final", &finals);
    for t in &a.transitions {
        out.push_str(&format!(
            "trans {} {} {}\n",
            a.state_name(t.source),
            t.label.map_or(EPS, |b| a.terminal_name(b)),
            a.state_name(t.target)
        ));
    }
    out
}

pub fn emit_automaton(a: &Automaton) -> String {
    match a {
        Automaton::Pda(p) => emit_pda(p),
        Automaton::Cfg(g) => emit_cfg(g),
        Automaton::Fsa(f) => emit_fsa(f),
    }
}
