//! PDA → CFG conversions and the CFG → Parikh-equivalent FSA step.
//!
//! * [`pda_to_cfg_triples`]: the textbook triple construction, one variable
//!   `[q,X,q']` per state/symbol/state and one rule per action and choice of
//!   intermediate states.
//! * [`pop_relation`]: the set of `(q,X,q')` such that `(q,[X])` can reach
//!   `(q',[])`, computed as a least fixpoint.
//! * [`udpda_to_cfg`] / [`udpda_final_to_cfg`]: for unary deterministic PDAs
//!   the pop relation forces the intermediate states, which removes the
//!   exponential blowup of the triple construction.
//! * [`cfg_to_parikh_fsa`]: automaton over bounded multisets of variables.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use crate::cfg::{Cfg, GSym, Rule, VarId};
use crate::error::ConvertError;
use crate::fsa::{Fsa, FsaState, Transition};
use crate::pda::{Acceptance, Action, ActionId, Pda, StateId, SymbolId, TerminalId};

/// Default cap on `Σ_actions |Q|^(push length)` for the triple construction.
pub const DEFAULT_RULE_BUDGET: u128 = 10_000_000;

/// Triples `(q, X, q')` such that some quasi-run goes from `(q,[X])` to
/// `(q',[])`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PopRelation {
    targets: BTreeMap<(StateId, SymbolId), BTreeSet<StateId>>,
}

impl PopRelation {
    pub fn contains(&self, q: StateId, x: SymbolId, q2: StateId) -> bool {
        self.targets.get(&(q, x)).is_some_and(|s| s.contains(&q2))
    }

    pub fn targets(&self, q: StateId, x: SymbolId) -> impl Iterator<Item = StateId> + '_ {
        self.targets.get(&(q, x)).into_iter().flatten().copied()
    }

    pub fn target_count(&self, q: StateId, x: SymbolId) -> usize {
        self.targets.get(&(q, x)).map_or(0, BTreeSet::len)
    }

    /// Largest number of targets over all `(q, X)`.
    pub fn max_targets(&self) -> usize {
        self.targets.values().map(BTreeSet::len).max().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.targets.values().map(BTreeSet::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = (StateId, SymbolId, StateId)> + '_ {
        self.targets
            .iter()
            .flat_map(|(&(q, x), s)| s.iter().map(move |&q2| (q, x, q2)))
    }

    fn insert(&mut self, q: StateId, x: SymbolId, q2: StateId) -> bool {
        self.targets.entry((q, x)).or_default().insert(q2)
    }
}

/// Least fixpoint: `(q,X,q')` holds if an action `(q,X) ↪ (q_1, Y_1…Y_d)`
/// has states `q_1 … q_{d+1} = q'` with `(q_i, Y_i, q_{i+1})` holding for
/// every `i`. Each round walks every action's push left to right, keeping the
/// set of states reachable after popping each prefix.
pub fn pop_relation(p: &Pda) -> PopRelation {
    let mut rel = PopRelation::default();
    loop {
        let mut changed = false;
        for a in &p.actions {
            let mut current: BTreeSet<StateId> = BTreeSet::from([a.target]);
            for &y in &a.push {
                current = current.iter().flat_map(|&r| rel.targets(r, y)).collect();
                if current.is_empty() {
                    break;
                }
            }
            for r in current {
                changed |= rel.insert(a.source, a.pop, r);
            }
        }
        if !changed {
            return rel;
        }
    }
}

pub fn triple_name(p: &Pda, q: StateId, x: SymbolId, q2: StateId) -> String {
    format!("[{},{},{}]", p.state_name(q), p.symbol_name(x), p.state_name(q2))
}

fn fresh_name(base: &str, taken: impl Fn(&str) -> bool) -> String {
    let mut name = base.to_string();
    while taken(&name) {
        name.push('_');
    }
    name
}

#[derive(Clone, Copy, Debug)]
pub struct TripleOptions {
    /// Remove non-generating and unreachable variables afterwards.
    pub trim: bool,
    pub budget: u128,
}

impl Default for TripleOptions {
    fn default() -> Self {
        TripleOptions { trim: false, budget: DEFAULT_RULE_BUDGET }
    }
}

fn require_empty_stack(p: &Pda) -> Result<(), ConvertError> {
    match p.acceptance {
        Acceptance::EmptyStack => Ok(()),
        Acceptance::FinalStates(_) => Err(ConvertError::WrongAcceptance { expected: "empty-stack" }),
    }
}

/// Rule instances the triple construction would create, checked against
/// `budget` action by action.
pub fn triple_rule_cost(p: &Pda, budget: u128) -> Result<u128, ConvertError> {
    let n = p.num_states() as u128;
    let mut total: u128 = 0;
    for a in &p.actions {
        let cost = n.checked_pow(a.push.len() as u32).unwrap_or(u128::MAX);
        total = total.saturating_add(cost);
        if total > budget {
            return Err(ConvertError::BudgetExceeded {
                action: p.describe_action(a),
                cost: total,
                budget,
            });
        }
    }
    Ok(total)
}

/// Builds grammars whose variables are triples of a fixed PDA.
struct TripleGrammar<'a> {
    p: &'a Pda,
    variables: Vec<String>,
    index: HashMap<(StateId, SymbolId, StateId), VarId>,
    rules: Vec<Rule>,
}

impl<'a> TripleGrammar<'a> {
    fn new(p: &'a Pda) -> Self {
        TripleGrammar { p, variables: Vec::new(), index: HashMap::new(), rules: Vec::new() }
    }

    fn var(&mut self, q: StateId, x: SymbolId, q2: StateId) -> VarId {
        if let Some(&v) = self.index.get(&(q, x, q2)) {
            return v;
        }
        let v = VarId(self.variables.len() as u32);
        self.variables.push(triple_name(self.p, q, x, q2));
        self.index.insert((q, x, q2), v);
        v
    }

    fn fresh_var(&mut self, base: &str) -> VarId {
        let name = fresh_name(base, |s| {
            self.variables.iter().any(|v| v == s) || self.p.input_alphabet.iter().any(|t| t == s)
        });
        self.variables.push(name);
        VarId(self.variables.len() as u32 - 1)
    }

    /// `[q X r_d] → b [q' β_1 r_1] … [r_{d-1} β_d r_d]`.
    fn action_rule(&mut self, a: &Action, states: &[StateId]) -> Rule {
        let head_exit = states.last().copied().unwrap_or(a.target);
        let head = self.var(a.source, a.pop, head_exit);
        let mut body = Vec::with_capacity(a.push.len() + 1);
        if let Some(b) = a.input {
            body.push(GSym::Term(b));
        }
        let mut from = a.target;
        for (&y, &r) in a.push.iter().zip(states) {
            body.push(GSym::Var(self.var(from, y, r)));
            from = r;
        }
        Rule { head, body }
    }

    fn finish(self, start: VarId) -> Cfg {
        Cfg {
            variables: self.variables,
            terminals: self.p.input_alphabet.clone(),
            start,
            rules: self.rules,
        }
    }
}

/// The triple construction. Variables are every `[q,X,q']` plus a start
/// variable `S` with rules `S → [q_0 Z_0 q]`; with a single state, `S` is
/// merged into `[q_0 Z_0 q_0]`.
pub fn pda_to_cfg_triples(p: &Pda, opts: TripleOptions) -> Result<Cfg, ConvertError> {
    require_empty_stack(p)?;
    triple_rule_cost(p, opts.budget)?;
    let n = p.num_states();
    let states: Vec<StateId> = (0..n as u32).map(StateId).collect();
    let mut g = TripleGrammar::new(p);
    let start = if n == 1 { None } else { Some(g.fresh_var("S")) };
    for &q in &states {
        for x in (0..p.num_stack_symbols() as u32).map(SymbolId) {
            for &q2 in &states {
                g.var(q, x, q2);
            }
        }
    }
    let start = match start {
        None => g.var(p.initial_state, p.initial_stack_symbol, p.initial_state),
        Some(s) => {
            for &q in &states {
                let body = vec![GSym::Var(g.var(p.initial_state, p.initial_stack_symbol, q))];
                g.rules.push(Rule { head: s, body });
            }
            s
        }
    };
    for a in &p.actions {
        let d = a.push.len();
        let mut tuple = vec![0usize; d];
        loop {
            let chosen: Vec<StateId> = tuple.iter().map(|&i| states[i]).collect();
            let rule = g.action_rule(a, &chosen);
            g.rules.push(rule);
            // next tuple in lexicographic order
            let mut pos = d;
            loop {
                if pos == 0 {
                    break;
                }
                pos -= 1;
                tuple[pos] += 1;
                if tuple[pos] < n {
                    break;
                }
                tuple[pos] = 0;
                if pos == 0 {
                    pos = usize::MAX;
                    break;
                }
            }
            if d == 0 || pos == usize::MAX {
                break;
            }
        }
    }
    let cfg = g.finish(start);
    Ok(if opts.trim { cfg.trim() } else { cfg })
}

fn require_udpda(p: &Pda) -> Result<(), ConvertError> {
    if p.input_alphabet.len() > 1 {
        return Err(ConvertError::NotUnary(p.input_alphabet.len()));
    }
    p.check_deterministic().map_err(|c| {
        ConvertError::NotDeterministic(format!(
            "{} and {}",
            p.describe_action(p.action(c.first)),
            p.describe_action(p.action(c.second))
        ))
    })
}

/// Rules emitted for one action of the converted PDA.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ActionFanOut {
    pub action: ActionId,
    pub push_len: usize,
    pub rules: usize,
}

#[derive(Clone, Debug)]
pub struct UdpdaGrammar {
    pub cfg: Cfg,
    pub pop: PopRelation,
    pub fan_out: Vec<ActionFanOut>,
}

/// Triple grammar restricted to the pop relation of `p`. Each action's
/// intermediate states are chosen by walking the pop relation along its push;
/// chains that break are dropped.
fn pop_restricted_grammar(p: &Pda) -> UdpdaGrammar {
    let pop = pop_relation(p);
    let mut g = TripleGrammar::new(p);
    for (q, x, q2) in pop.iter() {
        g.var(q, x, q2);
    }
    let mut fan_out = Vec::with_capacity(p.actions.len());
    for id in p.action_ids() {
        let a = p.action(id);
        let mut chains: Vec<Vec<StateId>> = vec![vec![]];
        for &y in &a.push {
            chains = chains
                .into_iter()
                .flat_map(|chain| {
                    let from = chain.last().copied().unwrap_or(a.target);
                    pop.targets(from, y).map(move |r| {
                        let mut c = chain.clone();
                        c.push(r);
                        c
                    }).collect::<Vec<_>>()
                })
                .collect();
        }
        for chain in &chains {
            let rule = g.action_rule(a, chain);
            g.rules.push(rule);
        }
        fan_out.push(ActionFanOut { action: id, push_len: a.push.len(), rules: chains.len() });
    }
    let starts: Vec<StateId> = pop.targets(p.initial_state, p.initial_stack_symbol).collect();
    let cfg = match starts.as_slice() {
        [] => Cfg {
            variables: vec!["S".to_string()],
            terminals: p.input_alphabet.clone(),
            start: VarId(0),
            rules: vec![],
        },
        [only] => {
            let s = g.var(p.initial_state, p.initial_stack_symbol, *only);
            g.finish(s)
        }
        many => {
            let s = g.fresh_var("S");
            for &q in many {
                let body = vec![GSym::Var(g.var(p.initial_state, p.initial_stack_symbol, q))];
                g.rules.push(Rule { head: s, body });
            }
            g.finish(s)
        }
    };
    UdpdaGrammar { cfg, pop, fan_out }
}

/// Grammar with at most `n·p` variables for a unary deterministic PDA
/// accepting by empty stack; at most one rule per action.
pub fn udpda_to_cfg(p: &Pda) -> Result<Cfg, ConvertError> {
    udpda_to_cfg_detailed(p).map(|g| g.cfg)
}

pub fn udpda_to_cfg_detailed(p: &Pda) -> Result<UdpdaGrammar, ConvertError> {
    require_empty_stack(p)?;
    require_udpda(p)?;
    Ok(pop_restricted_grammar(p))
}

/// Result of [`udpda_final_to_empty`] with the names of the added parts.
#[derive(Clone, Debug)]
pub struct SinkConstruction {
    pub pda: Pda,
    pub sink: StateId,
    pub new_initial: StateId,
    pub bottom: SymbolId,
}

/// Final-state acceptance → empty-stack acceptance: a fresh bottom marker
/// under the initial symbol, and from every final state an ε-move into a sink
/// state that drains the stack.
pub fn udpda_final_to_empty(p: &Pda) -> Result<Pda, ConvertError> {
    udpda_final_to_empty_detailed(p).map(|s| s.pda)
}

pub fn udpda_final_to_empty_detailed(p: &Pda) -> Result<SinkConstruction, ConvertError> {
    let finals = match &p.acceptance {
        Acceptance::FinalStates(f) => f.clone(),
        Acceptance::EmptyStack => {
            return Err(ConvertError::WrongAcceptance { expected: "final-states" })
        }
    };
    require_udpda(p)?;
    let mut out = p.clone();
    let init_name = fresh_name("init", |s| out.states.iter().any(|x| x == s));
    out.states.push(init_name);
    let new_initial = StateId(out.states.len() as u32 - 1);
    let sink_name = fresh_name("sink", |s| out.states.iter().any(|x| x == s));
    out.states.push(sink_name);
    let sink = StateId(out.states.len() as u32 - 1);
    let bottom_name = fresh_name("bottom", |s| out.stack_alphabet.iter().any(|x| x == s));
    out.stack_alphabet.push(bottom_name);
    let bottom = SymbolId(out.stack_alphabet.len() as u32 - 1);

    out.actions.push(Action {
        source: new_initial,
        pop: bottom,
        input: None,
        target: p.initial_state,
        push: vec![p.initial_stack_symbol, bottom],
    });
    let symbols: Vec<SymbolId> = (0..out.stack_alphabet.len() as u32).map(SymbolId).collect();
    for &q in &finals {
        for &x in &symbols {
            out.actions.push(Action { source: q, pop: x, input: None, target: sink, push: vec![x] });
        }
    }
    for &x in &symbols {
        out.actions.push(Action { source: sink, pop: x, input: None, target: sink, push: vec![] });
    }
    out.initial_state = new_initial;
    out.initial_stack_symbol = bottom;
    out.acceptance = Acceptance::EmptyStack;
    Ok(SinkConstruction { pda: out, sink, new_initial, bottom })
}

/// Grammar with `O(n·p)` variables for a unary deterministic PDA accepting
/// by final states. Each `(q,X)` pops to at most one ordinary state and
/// possibly the sink, and the sink is absorbing, so an action pushing `d`
/// symbols yields at most `d + 1` rules.
pub fn udpda_final_to_cfg(p: &Pda) -> Result<Cfg, ConvertError> {
    udpda_final_to_cfg_detailed(p).map(|g| g.cfg)
}

pub fn udpda_final_to_cfg_detailed(p: &Pda) -> Result<UdpdaGrammar, ConvertError> {
    let sc = udpda_final_to_empty_detailed(p)?;
    Ok(pop_restricted_grammar(&sc.pda))
}

/// At most one terminal and two variables per rule.
pub fn check_21nf(g: &Cfg) -> bool {
    g.is_21nf()
}

/// Name of a multiset state: `m` followed by `_<var index>x<count>` parts.
fn multiset_name(m: &[u32]) -> String {
    let mut s = String::from("m");
    for (i, &c) in m.iter().enumerate() {
        if c > 0 {
            s.push_str(&format!("_{i}x{c}"));
        }
    }
    s
}

/// Default multiset cap: one more than the number of variables.
pub fn default_cap(g: &Cfg) -> usize {
    g.num_variables() + 1
}

/// Parikh-equivalent FSA of a 2-1-NF grammar. States are multisets of
/// variables of total size at most `cap` (reachable ones only); the initial
/// state is `{start}`, the final state is the empty multiset; a transition
/// replaces one occurrence of `X` by the variables of a rule `X → α`, reading
/// α's terminal.
pub fn cfg_to_parikh_fsa(g: &Cfg, cap: Option<usize>) -> Result<Fsa, ConvertError> {
    if let Some(r) = g.rules.iter().find(|r| r.terminals().count() > 1 || r.variables().count() > 2) {
        return Err(ConvertError::Not21Nf(g.describe_rule(r)));
    }
    let cap = cap.unwrap_or_else(|| default_cap(g));
    let nv = g.num_variables();
    let mut rules_by_head: Vec<Vec<(Option<TerminalId>, Vec<VarId>)>> = vec![Vec::new(); nv];
    for r in &g.rules {
        rules_by_head[r.head.index()].push((r.terminals().next(), r.variables().collect()));
    }

    let mut start = vec![0u32; nv];
    start[g.start.index()] = 1;
    let mut index: BTreeMap<Vec<u32>, FsaState> = BTreeMap::new();
    let mut order: Vec<Vec<u32>> = Vec::new();
    let mut queue = VecDeque::new();
    let mut transitions = BTreeSet::new();
    if cap >= 1 {
        index.insert(start.clone(), FsaState(0));
        order.push(start.clone());
        queue.push_back(start);
    }
    while let Some(m) = queue.pop_front() {
        let from = index[&m];
        let size: usize = m.iter().map(|&c| c as usize).sum();
        for (x, &count) in m.iter().enumerate() {
            if count == 0 {
                continue;
            }
            for (label, vars) in &rules_by_head[x] {
                if size - 1 + vars.len() > cap {
                    continue;
                }
                let mut next = m.clone();
                next[x] -= 1;
                for v in vars {
                    next[v.index()] += 1;
                }
                let to = match index.get(&next) {
                    Some(&s) => s,
                    None => {
                        let s = FsaState(order.len() as u32);
                        index.insert(next.clone(), s);
                        order.push(next.clone());
                        queue.push_back(next);
                        s
                    }
                };
                transitions.insert(Transition { source: from, label: *label, target: to });
            }
        }
    }
    let empty = vec![0u32; nv];
    let mut finals = BTreeSet::new();
    if let Some(&f) = index.get(&empty) {
        finals.insert(f);
    }
    if order.is_empty() {
        // cap 0: a lone non-accepting state
        order.push(vec![0u32; nv]);
    }
    Ok(Fsa {
        states: order.iter().map(|m| multiset_name(m)).collect(),
        alphabet: g.terminals.clone(),
        transitions: transitions.into_iter().collect(),
        initial: FsaState(0),
        finals,
    })
}

/// Reduced form, trimmed triple grammar, multiset automaton.
pub fn pda_to_parikh_fsa(p: &Pda, budget: u128) -> Result<Fsa, ConvertError> {
    require_empty_stack(p)?;
    let reduced = p.to_reduced_form();
    let g = pda_to_cfg_triples(&reduced, TripleOptions { trim: true, budget })?;
    cfg_to_parikh_fsa(&g, None)
}

/// Number of multisets of total size at most `cap` over `n` kinds:
/// `C(n + cap, n)`.
pub fn multiset_count(n: u64, cap: u64) -> u128 {
    binomial(n + cap, n)
}

pub fn binomial(n: u64, k: u64) -> u128 {
    let k = k.min(n - k.min(n));
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}
