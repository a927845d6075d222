//! Pushdown automata: actions, instantaneous descriptions, moves and
//! the structural checks (validation, determinism, reduced form).

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use rand::Rng;
use serde::Serialize;

use crate::error::MoveError;
use crate::is_token;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct StateId(pub u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct SymbolId(pub u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct TerminalId(pub u32);

/// Index of an action inside [`Pda::actions`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ActionId(pub u32);

impl StateId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl SymbolId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl TerminalId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl ActionId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// `(source, pop) ↪_input (target, push)`. `input == None` is an ε-action.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Action {
    pub source: StateId,
    pub pop: SymbolId,
    pub input: Option<TerminalId>,
    pub target: StateId,
    pub push: Vec<SymbolId>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Acceptance {
    EmptyStack,
    FinalStates(BTreeSet<StateId>),
}

/// Instantaneous description. `stack[0]` is the top of the stack.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Id {
    pub state: StateId,
    pub stack: Vec<SymbolId>,
}

impl Id {
    pub fn new(state: StateId, stack: Vec<SymbolId>) -> Self {
        Id { state, stack }
    }

    pub fn top(&self) -> Option<SymbolId> {
        self.stack.first().copied()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pda {
    pub states: Vec<String>,
    pub input_alphabet: Vec<String>,
    pub stack_alphabet: Vec<String>,
    pub initial_state: StateId,
    pub initial_stack_symbol: SymbolId,
    pub actions: Vec<Action>,
    pub acceptance: Acceptance,
}

/// Where a validation problem was found.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Location {
    Field(&'static str),
    Action(ActionId),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub location: Location,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.location {
            Location::Field(name) => write!(f, "field `{name}`: {}", self.message),
            Location::Action(id) => write!(f, "action #{}: {}", id.0, self.message),
        }
    }
}

/// Two actions that break determinism.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DeterminismConflict {
    pub first: ActionId,
    pub second: ActionId,
    /// True when the conflict is an ε-action next to an input-consuming one.
    pub epsilon_clash: bool,
}

impl Pda {
    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn num_stack_symbols(&self) -> usize {
        self.stack_alphabet.len()
    }

    pub fn initial_id(&self) -> Id {
        Id::new(self.initial_state, vec![self.initial_stack_symbol])
    }

    pub fn action(&self, id: ActionId) -> &Action {
        &self.actions[id.index()]
    }

    pub fn action_ids(&self) -> impl Iterator<Item = ActionId> + '_ {
        (0..self.actions.len() as u32).map(ActionId)
    }

    pub fn state_name(&self, s: StateId) -> &str {
        &self.states[s.index()]
    }

    pub fn symbol_name(&self, x: SymbolId) -> &str {
        &self.stack_alphabet[x.index()]
    }

    pub fn terminal_name(&self, b: TerminalId) -> &str {
        &self.input_alphabet[b.index()]
    }

    pub fn state_id(&self, name: &str) -> Option<StateId> {
        self.states.iter().position(|s| s == name).map(|i| StateId(i as u32))
    }

    pub fn symbol_id(&self, name: &str) -> Option<SymbolId> {
        self.stack_alphabet
            .iter()
            .position(|s| s == name)
            .map(|i| SymbolId(i as u32))
    }

    pub fn terminal_id(&self, name: &str) -> Option<TerminalId> {
        self.input_alphabet
            .iter()
            .position(|s| s == name)
            .map(|i| TerminalId(i as u32))
    }

    /// Finds the action with exactly these components.
    pub fn find_action(&self, action: &Action) -> Option<ActionId> {
        self.actions
            .iter()
            .position(|a| a == action)
            .map(|i| ActionId(i as u32))
    }

    pub fn is_final(&self, s: StateId) -> bool {
        match &self.acceptance {
            Acceptance::EmptyStack => false,
            Acceptance::FinalStates(f) => f.contains(&s),
        }
    }

    /// Human readable action, e.g. `(q0,S) -b-> (q0,X1 r0)`.
    pub fn describe_action(&self, a: &Action) -> String {
        let input = a.input.map(|b| self.terminal_name(b)).unwrap_or("eps");
        let push: Vec<&str> = a.push.iter().map(|&x| self.symbol_name(x)).collect();
        format!(
            "({},{}) -{}-> ({},{})",
            self.state_name(a.source),
            self.symbol_name(a.pop),
            input,
            self.state_name(a.target),
            if push.is_empty() { "eps".to_string() } else { push.join(" ") }
        )
    }

    pub fn describe_id(&self, id: &Id) -> String {
        let stack: Vec<&str> = id.stack.iter().map(|&x| self.symbol_name(x)).collect();
        format!("({},[{}])", self.state_name(id.state), stack.join(" "))
    }

    pub fn validate(&self) -> Vec<Violation> {
        validate_pda(self)
    }

    /// Actions enabled at `id`, in action order.
    pub fn enabled_actions<'a>(&'a self, id: &'a Id) -> impl Iterator<Item = ActionId> + 'a {
        self.action_ids().filter(move |&a| enabled(self.action(a), id))
    }

    /// For each `(state, top)` pair, the actions popping it.
    pub fn actions_by_head(&self) -> HashMap<(StateId, SymbolId), Vec<ActionId>> {
        let mut map: HashMap<(StateId, SymbolId), Vec<ActionId>> = HashMap::new();
        for id in self.action_ids() {
            let a = self.action(id);
            map.entry((a.source, a.pop)).or_default().push(id);
        }
        map
    }

    pub fn max_push_len(&self) -> usize {
        self.actions.iter().map(|a| a.push.len()).max().unwrap_or(0)
    }

    /// Checks (i) at most one action per `(q, X, b)` and (ii) no ε-action on a
    /// `(q, X)` that also has an input-consuming action.
    pub fn check_deterministic(&self) -> Result<(), DeterminismConflict> {
        let mut by_key: BTreeMap<(StateId, SymbolId, Option<TerminalId>), ActionId> =
            BTreeMap::new();
        for id in self.action_ids() {
            let a = self.action(id);
            if let Some(&prev) = by_key.get(&(a.source, a.pop, a.input)) {
                return Err(DeterminismConflict { first: prev, second: id, epsilon_clash: false });
            }
            by_key.insert((a.source, a.pop, a.input), id);
        }
        for (&(q, x, input), &id) in &by_key {
            if input.is_none() {
                if let Some((_, &other)) = by_key
                    .range((q, x, Some(TerminalId(0)))..)
                    .take_while(|((q2, x2, _), _)| *q2 == q && *x2 == x)
                    .next()
                {
                    let (first, second) = if id < other { (id, other) } else { (other, id) };
                    return Err(DeterminismConflict { first, second, epsilon_clash: true });
                }
            }
        }
        Ok(())
    }

    pub fn is_deterministic(&self) -> bool {
        self.check_deterministic().is_ok()
    }

    /// Every action pushes at most two symbols.
    pub fn is_reduced_form(&self) -> bool {
        self.actions.iter().all(|a| a.push.len() <= 2)
    }

    /// Splits every push longer than two symbols into a chain of actions
    /// through fresh stack symbols. The original input label is consumed by
    /// the first action of the chain, the rest are ε-actions. The chain
    /// writes the pushed word right to left, so a fresh symbol is only ever
    /// on top of the stack and only popped by the next link of its own chain.
    pub fn to_reduced_form(&self) -> Pda {
        if self.is_reduced_form() {
            return self.clone();
        }
        let mut out = self.clone();
        out.actions.clear();
        let mut taken: BTreeSet<String> = self.stack_alphabet.iter().cloned().collect();
        let mut fresh = |out: &mut Pda, hint: String| -> SymbolId {
            let mut name = hint;
            while taken.contains(&name) {
                name.push('_');
            }
            taken.insert(name.clone());
            out.stack_alphabet.push(name);
            SymbolId(out.stack_alphabet.len() as u32 - 1)
        };
        for (idx, a) in self.actions.iter().enumerate() {
            let d = a.push.len();
            if d <= 2 {
                out.actions.push(a.clone());
                continue;
            }
            // Fresh symbols F_1..F_{d-2}; F_i stands for push[0..d-i].
            let chain: Vec<SymbolId> = (1..=d - 2)
                .map(|i| fresh(&mut out, format!("{}.r{}.{}", self.symbol_name(a.pop), idx, i)))
                .collect();
            out.actions.push(Action {
                source: a.source,
                pop: a.pop,
                input: a.input,
                target: a.target,
                push: vec![chain[0], a.push[d - 1]],
            });
            for i in 1..=d - 2 {
                let rest = if i == d - 2 {
                    vec![a.push[0], a.push[1]]
                } else {
                    vec![chain[i], a.push[d - 1 - i]]
                };
                out.actions.push(Action {
                    source: a.target,
                    pop: chain[i - 1],
                    input: None,
                    target: a.target,
                    push: rest,
                });
            }
        }
        out
    }

    /// Bijective renaming of states, stack symbols and terminals.
    pub fn renamed(
        &self,
        state: impl Fn(&str) -> String,
        symbol: impl Fn(&str) -> String,
        terminal: impl Fn(&str) -> String,
    ) -> Pda {
        Pda {
            states: self.states.iter().map(|s| state(s)).collect(),
            input_alphabet: self.input_alphabet.iter().map(|s| terminal(s)).collect(),
            stack_alphabet: self.stack_alphabet.iter().map(|s| symbol(s)).collect(),
            ..self.clone()
        }
    }
}

pub fn validate_pda(p: &Pda) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut field = |name: &'static str, message: String| {
        out.push(Violation { location: Location::Field(name), message })
    };
    if p.states.is_empty() {
        field("states", "at least one state is required".into());
    }
    if p.stack_alphabet.is_empty() {
        field("stack", "at least one stack symbol is required".into());
    }
    for (name, table) in [
        ("states", &p.states),
        ("input", &p.input_alphabet),
        ("stack", &p.stack_alphabet),
    ] {
        let mut seen = BTreeSet::new();
        for s in table.iter() {
            if !seen.insert(s) {
                field(name, format!("duplicate name `{s}`"));
            }
            if !is_token(s) || s == "eps" {
                field(name, format!("`{s}` is not a valid symbol name"));
            }
        }
    }
    if p.initial_state.index() >= p.states.len() {
        field("initial_state", format!("state #{} is not declared", p.initial_state.0));
    }
    if p.initial_stack_symbol.index() >= p.stack_alphabet.len() {
        field(
            "initial_stack_symbol",
            format!("stack symbol #{} is not declared", p.initial_stack_symbol.0),
        );
    }
    if let Acceptance::FinalStates(f) = &p.acceptance {
        for s in f {
            if s.index() >= p.states.len() {
                field("acceptance", format!("final state #{} is not declared", s.0));
            }
        }
    }
    let n = p.states.len();
    let g = p.stack_alphabet.len();
    let t = p.input_alphabet.len();
    for (i, a) in p.actions.iter().enumerate() {
        let mut bad = Vec::new();
        if a.source.index() >= n {
            bad.push(format!("source state #{} is not declared", a.source.0));
        }
        if a.target.index() >= n {
            bad.push(format!("target state #{} is not declared", a.target.0));
        }
        if a.pop.index() >= g {
            bad.push(format!("popped symbol #{} is not declared", a.pop.0));
        }
        if let Some(b) = a.input {
            if b.index() >= t {
                bad.push(format!("input terminal #{} is not declared", b.0));
            }
        }
        for x in &a.push {
            if x.index() >= g {
                bad.push(format!("pushed symbol #{} is not declared", x.0));
            }
        }
        if !bad.is_empty() {
            out.push(Violation {
                location: Location::Action(ActionId(i as u32)),
                message: bad.join("; "),
            });
        }
    }
    out
}

/// `a` is enabled at `i` when the states agree and `a` pops the top of `i`.
pub fn enabled(a: &Action, i: &Id) -> bool {
    i.state == a.source && i.top() == Some(a.pop)
}

/// Successor ID: `(q, Xγ) ⊢ (q', βγ)`.
pub fn apply_move(a: &Action, i: &Id) -> Result<Id, MoveError> {
    if !enabled(a, i) {
        return Err(MoveError::NotEnabled);
    }
    let mut stack = Vec::with_capacity(a.push.len() + i.stack.len() - 1);
    stack.extend_from_slice(&a.push);
    stack.extend_from_slice(&i.stack[1..]);
    Ok(Id::new(a.target, stack))
}

/// A move sequence from a one-symbol stack to the empty stack, together
/// with the action taken at each move.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuasiRun {
    pub ids: Vec<Id>,
    pub actions: Vec<ActionId>,
}

impl QuasiRun {
    pub fn first(&self) -> &Id {
        &self.ids[0]
    }

    pub fn last(&self) -> &Id {
        self.ids.last().expect("quasi-run is nonempty")
    }

    pub fn moves(&self) -> usize {
        self.actions.len()
    }

    /// The input word consumed along the run.
    pub fn consumed(&self, p: &Pda) -> Vec<TerminalId> {
        self.actions.iter().filter_map(|&a| p.action(a).input).collect()
    }

    /// Replays `actions` from `start`; `None` if some action is not enabled
    /// or the result is not a quasi-run.
    pub fn replay(p: &Pda, start: Id, actions: &[ActionId]) -> Option<QuasiRun> {
        let mut ids = vec![start];
        for &a in actions {
            let next = apply_move(p.action(a), ids.last().unwrap()).ok()?;
            ids.push(next);
        }
        let run = QuasiRun { ids, actions: actions.to_vec() };
        run.is_well_formed(p).then_some(run)
    }

    /// Stack shapes and action/ID agreement.
    pub fn is_well_formed(&self, p: &Pda) -> bool {
        if self.ids.len() != self.actions.len() + 1 {
            return false;
        }
        if self.first().stack.len() != 1 || !self.last().stack.is_empty() {
            return false;
        }
        self.actions.iter().enumerate().all(|(k, &a)| {
            a.index() < p.actions.len()
                && apply_move(p.action(a), &self.ids[k]).as_ref() == Ok(&self.ids[k + 1])
        })
    }
}

/// Returns the quasi-run witnessed by `ids` (first matching action at each
/// step), or `None` when `ids` is not a quasi-run of `p`.
pub fn is_quasi_run(ids: &[Id], p: &Pda) -> Option<QuasiRun> {
    let first = ids.first()?;
    let last = ids.last()?;
    if first.stack.len() != 1 || !last.stack.is_empty() {
        return None;
    }
    let mut actions = Vec::with_capacity(ids.len().saturating_sub(1));
    for pair in ids.windows(2) {
        let a = p
            .action_ids()
            .find(|&a| apply_move(p.action(a), &pair[0]).as_ref() == Ok(&pair[1]))?;
        actions.push(a);
    }
    Some(QuasiRun { ids: ids.to_vec(), actions })
}

/// Incremental construction of a [`Pda`] from names. Names are declared on
/// first use, in order of appearance.
#[derive(Clone, Debug, Default)]
pub struct PdaBuilder {
    states: Vec<String>,
    input: Vec<String>,
    stack: Vec<String>,
    actions: Vec<Action>,
    initial: Option<(StateId, SymbolId)>,
    finals: Option<BTreeSet<StateId>>,
}

impl PdaBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    fn intern(table: &mut Vec<String>, name: &str) -> u32 {
        match table.iter().position(|s| s == name) {
            Some(i) => i as u32,
            None => {
                table.push(name.to_string());
                table.len() as u32 - 1
            }
        }
    }

    pub fn state(&mut self, name: &str) -> StateId {
        StateId(Self::intern(&mut self.states, name))
    }

    pub fn symbol(&mut self, name: &str) -> SymbolId {
        SymbolId(Self::intern(&mut self.stack, name))
    }

    pub fn terminal(&mut self, name: &str) -> TerminalId {
        TerminalId(Self::intern(&mut self.input, name))
    }

    pub fn initial(&mut self, state: &str, symbol: &str) -> &mut Self {
        let q = self.state(state);
        let x = self.symbol(symbol);
        self.initial = Some((q, x));
        self
    }

    pub fn final_state(&mut self, state: &str) -> &mut Self {
        let q = self.state(state);
        self.finals.get_or_insert_with(BTreeSet::new).insert(q);
        self
    }

    /// Switches to final-state acceptance even when no final state is added.
    pub fn accept_by_final_states(&mut self) -> &mut Self {
        self.finals.get_or_insert_with(BTreeSet::new);
        self
    }

    /// Adds `(source, pop) ↪_input (target, push)`; duplicates are ignored.
    pub fn action(
        &mut self,
        source: &str,
        pop: &str,
        input: Option<&str>,
        target: &str,
        push: &[&str],
    ) -> &mut Self {
        let a = Action {
            source: self.state(source),
            pop: self.symbol(pop),
            input: input.map(|b| self.terminal(b)),
            target: self.state(target),
            push: push.iter().map(|x| self.symbol(x)).collect(),
        };
        if !self.actions.contains(&a) {
            self.actions.push(a);
        }
        self
    }

    /// Builds the automaton. Without an explicit initial ID the first
    /// declared state and stack symbol are used.
    pub fn build(&self) -> Pda {
        let (initial_state, initial_stack_symbol) =
            self.initial.unwrap_or((StateId(0), SymbolId(0)));
        Pda {
            states: self.states.clone(),
            input_alphabet: self.input.clone(),
            stack_alphabet: self.stack.clone(),
            initial_state,
            initial_stack_symbol,
            actions: self.actions.clone(),
            acceptance: match &self.finals {
                None => Acceptance::EmptyStack,
                Some(f) => Acceptance::FinalStates(f.clone()),
            },
        }
    }
}

/// Shape of a randomly generated PDA.
#[derive(Clone, Copy, Debug)]
pub struct RandomPdaShape {
    pub states: usize,
    pub stack_symbols: usize,
    pub terminals: usize,
    pub actions: usize,
    pub max_push: usize,
    /// Probability that an action is an ε-action.
    pub epsilon_rate: f64,
}

impl Default for RandomPdaShape {
    fn default() -> Self {
        RandomPdaShape {
            states: 2,
            stack_symbols: 3,
            terminals: 1,
            actions: 6,
            max_push: 2,
            epsilon_rate: 0.3,
        }
    }
}

/// Random empty-stack PDA with states `q0..`, symbols `Z0..`, terminals
/// `a0..`. Duplicate actions are dropped, so the action count may be
/// smaller than requested.
pub fn random_pda<R: Rng + ?Sized>(rng: &mut R, shape: RandomPdaShape) -> Pda {
    let mut b = PdaBuilder::new();
    for i in 0..shape.states.max(1) {
        b.state(&format!("q{i}"));
    }
    for i in 0..shape.stack_symbols.max(1) {
        b.symbol(&format!("Z{i}"));
    }
    for i in 0..shape.terminals {
        b.terminal(&format!("a{i}"));
    }
    b.initial("q0", "Z0");
    let mut pda = b.build();
    for _ in 0..shape.actions {
        let input = if shape.terminals == 0 || rng.gen_bool(shape.epsilon_rate) {
            None
        } else {
            Some(TerminalId(rng.gen_range(0..shape.terminals) as u32))
        };
        let push_len = rng.gen_range(0..=shape.max_push);
        let a = Action {
            source: StateId(rng.gen_range(0..pda.states.len()) as u32),
            pop: SymbolId(rng.gen_range(0..pda.stack_alphabet.len()) as u32),
            input,
            target: StateId(rng.gen_range(0..pda.states.len()) as u32),
            push: (0..push_len)
                .map(|_| SymbolId(rng.gen_range(0..pda.stack_alphabet.len()) as u32))
                .collect(),
        };
        if !pda.actions.contains(&a) {
            pda.actions.push(a);
        }
    }
    pda
}
