//! Finite state automata with ε-transitions.

use std::collections::BTreeSet;

use crate::pda::TerminalId;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FsaState(pub u32);

impl FsaState {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Transition {
    pub source: FsaState,
    pub label: Option<TerminalId>,
    pub target: FsaState,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fsa {
    pub states: Vec<String>,
    pub alphabet: Vec<String>,
    pub transitions: Vec<Transition>,
    pub initial: FsaState,
    pub finals: BTreeSet<FsaState>,
}

impl Fsa {
    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn state_name(&self, s: FsaState) -> &str {
        &self.states[s.index()]
    }

    pub fn terminal_name(&self, t: TerminalId) -> &str {
        &self.alphabet[t.index()]
    }

    /// States reachable from the initial state.
    pub fn reachable_states(&self) -> BTreeSet<FsaState> {
        let mut seen = BTreeSet::from([self.initial]);
        let mut todo = vec![self.initial];
        while let Some(s) = todo.pop() {
            for t in self.transitions.iter().filter(|t| t.source == s) {
                if seen.insert(t.target) {
                    todo.push(t.target);
                }
            }
        }
        seen
    }

    pub fn validate(&self) -> Vec<String> {
        let n = self.states.len();
        let mut out = Vec::new();
        if self.initial.index() >= n {
            out.push("initial state is not declared".to_string());
        }
        if self.finals.iter().any(|f| f.index() >= n) {
            out.push("a final state is not declared".to_string());
        }
        for (i, t) in self.transitions.iter().enumerate() {
            if t.source.index() >= n
                || t.target.index() >= n
                || t.label.is_some_and(|b| b.index() >= self.alphabet.len())
            {
                out.push(format!("transition #{i} references an undeclared symbol"));
            }
        }
        out
    }
}
