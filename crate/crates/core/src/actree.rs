//! Action trees: the tree view of PDA quasi-runs.
//!
//! A node labeled by an action pushing `d` symbols has exactly `d` children,
//! the `i`-th child pops the `i`-th pushed symbol, and in preorder the target
//! state of every action is the source state of the next one. Quasi-runs and
//! actrees are in bijection: [`tree_from_quasirun`] disassembles a run at the
//! points where the stack first drops below each pushed level, and
//! [`quasirun_from_tree`] splices the children's runs back together under the
//! still-pending part of the push.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::error::ActreeError;
use crate::pda::{apply_move, enabled, ActionId, Id, Pda, QuasiRun, TerminalId};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ActTree {
    pub label: ActionId,
    pub children: Vec<ActTree>,
}

impl ActTree {
    pub fn leaf(label: ActionId) -> Self {
        ActTree { label, children: Vec::new() }
    }

    pub fn node(label: ActionId, children: Vec<ActTree>) -> Self {
        ActTree { label, children }
    }

    /// Preorder label sequence.
    pub fn seq(&self) -> Vec<ActionId> {
        let mut out = Vec::new();
        let mut todo = vec![self];
        while let Some(t) = todo.pop() {
            out.push(t.label);
            todo.extend(t.children.iter().rev());
        }
        out
    }

    /// Node count.
    pub fn size(&self) -> usize {
        1 + self.children.iter().map(ActTree::size).sum::<usize>()
    }

    /// Input consumed along `seq`, ε-actions dropped.
    pub fn consumed(&self, p: &Pda) -> Vec<TerminalId> {
        self.seq().into_iter().filter_map(|a| p.action(a).input).collect()
    }

    /// 0 for a leaf; otherwise the maximum child dimension, plus one when
    /// that maximum is attained by at least two children.
    pub fn dimension(&self) -> u32 {
        combine_dimensions(self.children.iter().map(ActTree::dimension))
    }

    pub fn height(&self) -> usize {
        self.children.iter().map(|c| 1 + c.height()).max().unwrap_or(0)
    }

    /// Checks arity, popped symbols and preorder state chaining.
    pub fn check(&self, p: &Pda) -> Result<(), ActreeError> {
        self.check_shape(p)?;
        let seq = self.seq();
        for w in seq.windows(2) {
            let (a, b) = (p.action(w[0]), p.action(w[1]));
            if a.target != b.source {
                return Err(ActreeError::InvalidTree(format!(
                    "chaining broken between {} and {}",
                    p.describe_action(a),
                    p.describe_action(b)
                )));
            }
        }
        Ok(())
    }

    fn check_shape(&self, p: &Pda) -> Result<(), ActreeError> {
        if self.label.index() >= p.actions.len() {
            return Err(ActreeError::InvalidTree(format!("unknown action #{}", self.label.0)));
        }
        let a = p.action(self.label);
        if a.push.len() != self.children.len() {
            return Err(ActreeError::InvalidTree(format!(
                "{} pushes {} symbols but has {} children",
                p.describe_action(a),
                a.push.len(),
                self.children.len()
            )));
        }
        for (x, child) in a.push.iter().zip(&self.children) {
            child.check_shape(p)?;
            if p.action(child.label).pop != *x {
                return Err(ActreeError::InvalidTree(format!(
                    "child {} of {} does not pop {}",
                    p.describe_action(p.action(child.label)),
                    p.describe_action(a),
                    p.symbol_name(*x)
                )));
            }
        }
        Ok(())
    }

    /// Renders `a1(a2(a3,a3),a4)` using `names` for labels.
    pub fn to_parenthesized(&self, names: &HashMap<ActionId, String>) -> String {
        let mut out = String::new();
        self.write_parenthesized(names, &mut out);
        out
    }

    fn write_parenthesized(&self, names: &HashMap<ActionId, String>, out: &mut String) {
        out.push_str(&names[&self.label]);
        if !self.children.is_empty() {
            out.push('(');
            for (i, c) in self.children.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                c.write_parenthesized(names, out);
            }
            out.push(')');
        }
    }
}

/// Dimension of a node from its children's dimensions.
pub fn combine_dimensions(children: impl IntoIterator<Item = u32>) -> u32 {
    let mut best: Option<u32> = None;
    let mut ties = 0;
    for d in children {
        match best {
            Some(b) if d < b => {}
            Some(b) if d == b => ties += 1,
            _ => {
                best = Some(d);
                ties = 1;
            }
        }
    }
    match best {
        None => 0,
        Some(b) if ties >= 2 => b + 1,
        Some(b) => b,
    }
}

pub fn validate_actree(t: &ActTree, p: &Pda) -> bool {
    t.check(p).is_ok()
}

/// Valid and the root is enabled at the initial ID.
pub fn is_accepting(t: &ActTree, p: &Pda) -> bool {
    validate_actree(t, p) && enabled(p.action(t.label), &p.initial_id())
}

/// Disassembles a quasi-run into its actree. The root is the first action;
/// child `i` is the sub-run between the first positions where the stack
/// depth drops to `d - i + 1` and `d - i` pushed symbols, with the pending
/// bottom symbols removed.
pub fn tree_from_quasirun(r: &QuasiRun, p: &Pda) -> Result<ActTree, ActreeError> {
    if !r.is_well_formed(p) {
        return Err(ActreeError::MalformedRun(
            "not a quasi-run of this PDA".to_string(),
        ));
    }
    let depths: Vec<usize> = r.ids.iter().map(|i| i.stack.len()).collect();
    Ok(disassemble(&r.actions, &depths, 0, r.actions.len(), 0))
}

/// Segment of moves `start..end` whose first ID has depth `base + 1` and
/// whose last has depth `base`.
fn disassemble(
    actions: &[ActionId],
    depths: &[usize],
    start: usize,
    end: usize,
    base: usize,
) -> ActTree {
    let d = depths[start + 1] - base;
    let mut children = Vec::with_capacity(d);
    let mut from = start + 1;
    let mut pos = start + 1;
    for i in 1..=d {
        let level = base + d - i;
        while depths[pos] != level {
            pos += 1;
        }
        children.push(disassemble(actions, depths, from, pos, level));
        from = pos;
    }
    debug_assert_eq!(from, end);
    ActTree::node(actions[start], children)
}

/// Assembles the quasi-run of `t` starting at `start`.
pub fn quasirun_from_tree(t: &ActTree, start: &Id, p: &Pda) -> Result<QuasiRun, ActreeError> {
    t.check(p)?;
    if start.stack.len() != 1 {
        return Err(ActreeError::MalformedRun(
            "start ID must have exactly one stack symbol".to_string(),
        ));
    }
    if !enabled(p.action(t.label), start) {
        return Err(ActreeError::NotEnabled);
    }
    let mut ids = vec![start.clone()];
    let mut actions = Vec::new();
    assemble(t, start, p, &mut ids, &mut actions)?;
    Ok(QuasiRun { ids, actions })
}

/// Appends the moves of `t` from `start` (whose stack is `[X]`) to `ids`,
/// which already ends with `start`.
fn assemble(
    t: &ActTree,
    start: &Id,
    p: &Pda,
    ids: &mut Vec<Id>,
    actions: &mut Vec<ActionId>,
) -> Result<(), ActreeError> {
    let a = p.action(t.label);
    let first = apply_move(a, start).map_err(|_| ActreeError::NotEnabled)?;
    ids.push(first.clone());
    actions.push(t.label);
    let mut state = first.state;
    for (i, child) in t.children.iter().enumerate() {
        let suffix = &a.push[i + 1..];
        let child_start = Id::new(state, vec![a.push[i]]);
        if !enabled(p.action(child.label), &child_start) {
            return Err(ActreeError::InvalidTree(format!(
                "child {} is not enabled at {}",
                i + 1,
                p.describe_id(&child_start)
            )));
        }
        let mut sub_ids = vec![child_start.clone()];
        let mut sub_actions = Vec::new();
        assemble(child, &child_start, p, &mut sub_ids, &mut sub_actions)?;
        state = sub_ids.last().unwrap().state;
        // I • w: the pending pushed symbols sit below every ID of the child run.
        for id in sub_ids.into_iter().skip(1) {
            let mut stack = id.stack;
            stack.extend_from_slice(suffix);
            ids.push(Id::new(id.state, stack));
        }
        actions.extend(sub_actions);
    }
    Ok(())
}

/// Actree names `a1, a2, …` assigned in order of first appearance in preorder.
pub fn action_index(t: &ActTree) -> Vec<ActionId> {
    let mut order = Vec::new();
    for a in t.seq() {
        if !order.contains(&a) {
            order.push(a);
        }
    }
    order
}

/// Text form: an action index followed by the parenthesized tree.
///
/// ```text
/// [actree]
/// action a1 = q0 X1 : eps -> q0 X0 X0
/// tree = a1(a2,a2)
/// ```
pub fn emit_actree(t: &ActTree, p: &Pda) -> String {
    let index = action_index(t);
    let mut names = HashMap::new();
    let mut out = String::from("[actree]\n");
    for (i, &a) in index.iter().enumerate() {
        let name = format!("a{}", i + 1);
        let act = p.action(a);
        let _ = write!(
            out,
            "action {name} = {} {} : {} -> {}",
            p.state_name(act.source),
            p.symbol_name(act.pop),
            act.input.map_or("eps", |b| p.terminal_name(b)),
            p.state_name(act.target)
        );
        for &x in &act.push {
            out.push(' ');
            out.push_str(p.symbol_name(x));
        }
        out.push('\n');
        names.insert(a, name);
    }
    out.push_str("tree = ");
    out.push_str(&t.to_parenthesized(&names));
    out.push('\n');
    out
}

/// Parses the output of [`emit_actree`], resolving actions against `p`.
pub fn parse_actree(text: &str, p: &Pda) -> Result<ActTree, ActreeError> {
    let bad = |m: String| ActreeError::InvalidTree(m);
    let mut names: HashMap<String, ActionId> = HashMap::new();
    let mut tree_text = None;
    let mut saw_header = false;
    for (no, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if !saw_header {
            if line != "[actree]" {
                return Err(bad(format!("line {}: expected [actree]", no + 1)));
            }
            saw_header = true;
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        match tokens.as_slice() {
            ["action", name, "=", q, x, ":", b, "->", q2, push @ ..] => {
                let lookup_state =
                    |s: &str| p.state_id(s).ok_or_else(|| bad(format!("unknown state `{s}`")));
                let lookup_sym =
                    |s: &str| p.symbol_id(s).ok_or_else(|| bad(format!("unknown symbol `{s}`")));
                let action = crate::pda::Action {
                    source: lookup_state(q)?,
                    pop: lookup_sym(x)?,
                    input: if *b == "eps" {
                        None
                    } else {
                        Some(p.terminal_id(b).ok_or_else(|| bad(format!("unknown terminal `{b}`")))?)
                    },
                    target: lookup_state(q2)?,
                    push: push.iter().map(|s| lookup_sym(s)).collect::<Result<_, _>>()?,
                };
                let id = p
                    .find_action(&action)
                    .ok_or_else(|| bad(format!("line {}: action not in the PDA", no + 1)))?;
                names.insert(name.to_string(), id);
            }
            ["tree", "=", rest @ ..] => tree_text = Some(rest.concat()),
            _ => return Err(bad(format!("line {}: unexpected `{line}`", no + 1))),
        }
    }
    let tree_text = tree_text.ok_or_else(|| bad("missing `tree = ...`".to_string()))?;
    let mut parser = TreeParser { s: tree_text.as_bytes(), pos: 0, names: &names };
    let t = parser.tree()?;
    if parser.pos != parser.s.len() {
        return Err(bad(format!("trailing input at offset {}", parser.pos)));
    }
    Ok(t)
}

struct TreeParser<'a> {
    s: &'a [u8],
    pos: usize,
    names: &'a HashMap<String, ActionId>,
}

impl TreeParser<'_> {
    fn tree(&mut self) -> Result<ActTree, ActreeError> {
        let start = self.pos;
        while self.pos < self.s.len() && !matches!(self.s[self.pos], b'(' | b')' | b',') {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.s[start..self.pos]).unwrap_or("");
        let label = *self
            .names
            .get(name)
            .ok_or_else(|| ActreeError::InvalidTree(format!("unknown action name `{name}`")))?;
        let mut children = Vec::new();
        if self.s.get(self.pos) == Some(&b'(') {
            self.pos += 1;
            loop {
                children.push(self.tree()?);
                match self.s.get(self.pos) {
                    Some(b',') => self.pos += 1,
                    Some(b')') => {
                        self.pos += 1;
                        break;
                    }
                    _ => {
                        return Err(ActreeError::InvalidTree(format!(
                            "expected `,` or `)` at offset {}",
                            self.pos
                        )))
                    }
                }
            }
        }
        Ok(ActTree::node(label, children))
    }
}
