//! Brute-force reference computations used to check the constructions:
//! bounded language enumeration for PDAs, grammars and automata, Parikh
//! comparison, exhaustive actree and quasi-run enumeration.
//!
//! Nothing here calls into the conversion code.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};

use crate::actree::ActTree;
use crate::cfg::{Cfg, GSym};
use crate::error::OracleError;
use crate::format::Automaton;
use crate::fsa::{Fsa, FsaState, Transition};
use crate::parikh::ParikhVector;
use crate::pda::{apply_move, Acceptance, ActionId, Id, Pda, QuasiRun, StateId, SymbolId};
use crate::Word;

/// Words of length at most some bound. `complete` is false when a search
/// limit was hit, in which case `words` may be missing members.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnumerationResult {
    pub words: BTreeSet<Word>,
    pub complete: bool,
}

impl EnumerationResult {
    pub fn parikh_image(&self) -> BTreeSet<ParikhVector> {
        self.words.iter().map(|w| ParikhVector::of_word(w)).collect()
    }
}

/// Search limits for PDA enumeration.
#[derive(Clone, Copy, Debug)]
pub struct PdaLimits {
    /// Configurations expanded before giving up.
    pub max_steps: usize,
    pub max_stack: usize,
}

impl Default for PdaLimits {
    fn default() -> Self {
        PdaLimits { max_steps: 2_000_000, max_stack: 64 }
    }
}

/// `cost[q][X][q']`: least input consumed by a quasi-run from `(q,[X])` to
/// `(q',[])`, or `None` if there is none. Computed by relaxing every action
/// until nothing improves. Used only to cut hopeless branches of the search.
struct PopCost {
    n: usize,
    p: usize,
    cost: Vec<Option<usize>>,
}

impl PopCost {
    fn new(pda: &Pda) -> Self {
        let (n, p) = (pda.num_states(), pda.num_stack_symbols());
        let mut pc = PopCost { n, p, cost: vec![None; n * p * n] };
        loop {
            let mut changed = false;
            for a in &pda.actions {
                let mut dist: Vec<Option<usize>> = vec![None; n];
                dist[a.target.index()] = Some(usize::from(a.input.is_some()));
                for &y in &a.push {
                    dist = pc.relax(&dist, y);
                }
                for (r, d) in dist.iter().enumerate() {
                    if let Some(d) = *d {
                        let slot = &mut pc.cost[(a.source.index() * p + a.pop.index()) * n + r];
                        if slot.is_none_or(|old| d < old) {
                            *slot = Some(d);
                            changed = true;
                        }
                    }
                }
            }
            if !changed {
                return pc;
            }
        }
    }

    /// Least cost per state after additionally popping `y`.
    fn relax(&self, dist: &[Option<usize>], y: SymbolId) -> Vec<Option<usize>> {
        let mut out = vec![None; self.n];
        for (r, d) in dist.iter().enumerate() {
            let Some(d) = *d else { continue };
            let base = (r * self.p + y.index()) * self.n;
            for (r2, c) in self.cost[base..base + self.n].iter().enumerate() {
                if let Some(c) = *c {
                    let v = d + c;
                    if out[r2].is_none_or(|old: usize| v < old) {
                        out[r2] = Some(v);
                    }
                }
            }
        }
        out
    }

    /// Least input needed to empty `stack` (top last) starting in `q`.
    fn to_empty(&self, q: StateId, stack: &[SymbolId]) -> Option<usize> {
        let mut dist = vec![None; self.n];
        dist[q.index()] = Some(0);
        for &y in stack.iter().rev() {
            dist = self.relax(&dist, y);
        }
        dist.into_iter().flatten().min()
    }
}

/// `L(P) ∩ Σ^{≤max_len}` by breadth-first search over (state, stack, prefix).
/// Under empty-stack acceptance, configurations whose stack cannot be
/// emptied within the remaining length are dropped (this does not affect
/// completeness). Hitting `max_stack` or `max_steps` clears `complete`.
pub fn enumerate_pda_language(p: &Pda, max_len: usize, limits: PdaLimits) -> EnumerationResult {
    let empty_stack = matches!(p.acceptance, Acceptance::EmptyStack);
    let cost = empty_stack.then(|| PopCost::new(p));
    let mut heads: HashMap<(StateId, SymbolId), Vec<usize>> = HashMap::new();
    for (i, a) in p.actions.iter().enumerate() {
        heads.entry((a.source, a.pop)).or_default().push(i);
    }

    // stack stored bottom-first so the top is the last element
    type Config = (StateId, Vec<SymbolId>, Vec<u32>);
    let start: Config = (p.initial_state, vec![p.initial_stack_symbol], vec![]);
    let mut seen: HashSet<Config> = HashSet::new();
    let mut queue: VecDeque<Config> = VecDeque::new();
    let mut words: BTreeSet<Vec<u32>> = BTreeSet::new();
    let mut complete = true;
    let mut steps = 0usize;

    let viable = |c: &Config| -> bool {
        cost.as_ref()
            .is_none_or(|pc| pc.to_empty(c.0, &c.1).is_some_and(|need| c.2.len() + need <= max_len))
    };
    if viable(&start) {
        seen.insert(start.clone());
        queue.push_back(start);
    }
    while let Some((q, stack, prefix)) = queue.pop_front() {
        let accepted = if empty_stack { stack.is_empty() } else { p.is_final(q) };
        if accepted {
            words.insert(prefix.clone());
        }
        let Some(&top) = stack.last() else { continue };
        steps += 1;
        if steps > limits.max_steps {
            complete = false;
            break;
        }
        for &i in heads.get(&(q, top)).into_iter().flatten() {
            let a = &p.actions[i];
            let mut next_prefix = prefix.clone();
            if let Some(b) = a.input {
                if prefix.len() == max_len {
                    continue;
                }
                next_prefix.push(b.0);
            }
            let mut next_stack = stack[..stack.len() - 1].to_vec();
            next_stack.extend(a.push.iter().rev());
            let next = (a.target, next_stack, next_prefix);
            if !viable(&next) {
                continue;
            }
            if next.1.len() > limits.max_stack {
                complete = false;
                continue;
            }
            if seen.insert(next.clone()) {
                queue.push_back(next);
            }
        }
    }
    EnumerationResult {
        words: words.into_iter().map(|w| name_word(&p.input_alphabet, &w)).collect(),
        complete,
    }
}

fn name_word(alphabet: &[String], w: &[u32]) -> Word {
    w.iter().map(|&t| alphabet[t as usize].clone()).collect()
}

/// `L(G) ∩ Σ^{≤max_len}` by a bounded fixpoint: each variable's set of
/// derivable words of length at most `max_len`, grown until stable.
/// Always complete.
pub fn enumerate_cfg_language(g: &Cfg, max_len: usize) -> EnumerationResult {
    let nv = g.num_variables();
    // shortest yield per variable
    let mut shortest: Vec<Option<usize>> = vec![None; nv];
    loop {
        let mut changed = false;
        for r in &g.rules {
            let mut len = 0usize;
            let mut ok = true;
            for s in &r.body {
                match s {
                    GSym::Term(_) => len += 1,
                    GSym::Var(v) => match shortest[v.index()] {
                        Some(l) => len += l,
                        None => {
                            ok = false;
                            break;
                        }
                    },
                }
            }
            if ok && shortest[r.head.index()].is_none_or(|old| len < old) {
                shortest[r.head.index()] = Some(len);
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let min_len = |s: &GSym| match s {
        GSym::Term(_) => Some(1),
        GSym::Var(v) => shortest[v.index()],
    };
    let rules: Vec<_> = g
        .rules
        .iter()
        .filter(|r| {
            r.body.iter().try_fold(0usize, |acc, s| min_len(s).map(|l| acc + l))
                .is_some_and(|l| l <= max_len)
        })
        .collect();

    // lang[v][len] = words of exactly that length
    let mut lang: Vec<Vec<BTreeSet<Vec<u32>>>> = vec![vec![BTreeSet::new(); max_len + 1]; nv];
    loop {
        let mut changed = false;
        for r in &rules {
            // remaining minimum length after each body position
            let mut tail_min = vec![0usize; r.body.len() + 1];
            for i in (0..r.body.len()).rev() {
                tail_min[i] = tail_min[i + 1] + min_len(&r.body[i]).unwrap_or(0);
            }
            let mut partial: Vec<Vec<u32>> = vec![vec![]];
            for (i, s) in r.body.iter().enumerate() {
                let room = max_len - tail_min[i + 1];
                let mut next = Vec::new();
                for w in &partial {
                    match *s {
                        GSym::Term(t) => {
                            if w.len() < room {
                                let mut w2 = w.clone();
                                w2.push(t.0);
                                next.push(w2);
                            }
                        }
                        GSym::Var(v) => {
                            for bucket in lang[v.index()].iter().take(room.saturating_sub(w.len()) + 1) {
                                for u in bucket {
                                    let mut w2 = w.clone();
                                    w2.extend_from_slice(u);
                                    next.push(w2);
                                }
                            }
                        }
                    }
                }
                next.sort();
                next.dedup();
                partial = next;
                if partial.is_empty() {
                    break;
                }
            }
            for w in partial {
                let len = w.len();
                changed |= lang[r.head.index()][len].insert(w);
            }
        }
        if !changed {
            break;
        }
    }
    let words = lang[g.start.index()]
        .iter()
        .flatten()
        .map(|w| name_word(&g.terminals, w))
        .collect();
    EnumerationResult { words, complete: true }
}

/// `L(A) ∩ Σ^{≤max_len}` by search over (state, prefix). Always complete.
pub fn enumerate_fsa_language(a: &Fsa, max_len: usize) -> EnumerationResult {
    let mut out: BTreeMap<FsaState, Vec<&Transition>> = BTreeMap::new();
    for t in &a.transitions {
        out.entry(t.source).or_default().push(t);
    }
    let mut seen: HashSet<(FsaState, Vec<u32>)> = HashSet::new();
    let mut queue = VecDeque::new();
    let start = (a.initial, Vec::new());
    seen.insert(start.clone());
    queue.push_back(start);
    let mut words = BTreeSet::new();
    while let Some((s, w)) = queue.pop_front() {
        if a.finals.contains(&s) {
            words.insert(name_word(&a.alphabet, &w));
        }
        for t in out.get(&s).into_iter().flatten() {
            let mut w2 = w.clone();
            if let Some(b) = t.label {
                if w.len() == max_len {
                    continue;
                }
                w2.push(b.0);
            }
            let next = (t.target, w2);
            if seen.insert(next.clone()) {
                queue.push_back(next);
            }
        }
    }
    EnumerationResult { words, complete: true }
}

/// Dispatches on the automaton kind.
pub fn enumerate_language(a: &Automaton, max_len: usize, limits: PdaLimits) -> EnumerationResult {
    match a {
        Automaton::Pda(p) => enumerate_pda_language(p, max_len, limits),
        Automaton::Cfg(g) => enumerate_cfg_language(g, max_len),
        Automaton::Fsa(f) => enumerate_fsa_language(f, max_len),
    }
}

/// Outcome of comparing two bounded Parikh images.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParikhComparison {
    pub equal: bool,
    /// Vectors in the left image only.
    pub only_left: BTreeSet<ParikhVector>,
    /// Vectors in the right image only.
    pub only_right: BTreeSet<ParikhVector>,
}

/// Compares the Parikh images of two bounded enumerations. Refuses to give
/// an answer when either side is incomplete.
pub fn parikh_equiv_upto(
    left: &EnumerationResult,
    right: &EnumerationResult,
) -> Result<ParikhComparison, OracleError> {
    if !left.complete {
        return Err(OracleError::IncompleteEnumeration("left language"));
    }
    if !right.complete {
        return Err(OracleError::IncompleteEnumeration("right language"));
    }
    let l = left.parikh_image();
    let r = right.parikh_image();
    let only_left: BTreeSet<_> = l.difference(&r).cloned().collect();
    let only_right: BTreeSet<_> = r.difference(&l).cloned().collect();
    Ok(ParikhComparison { equal: only_left.is_empty() && only_right.is_empty(), only_left, only_right })
}

/// A valid actree together with whether its root is enabled at the initial
/// ID.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlaggedTree {
    pub tree: ActTree,
    pub accepting: bool,
}

/// Every valid actree with at most `max_size` nodes, found by dynamic
/// programming over size: `table[(q, X)][s]` lists the trees of size `s`
/// for a quasi-run from `(q,[X])`, with the state they end in.
pub fn enumerate_actrees(p: &Pda, max_size: usize) -> Vec<FlaggedTree> {
    type Table = HashMap<(StateId, SymbolId), Vec<Vec<(ActTree, StateId)>>>;
    let mut table: Table = HashMap::new();
    let mut by_head: BTreeMap<(StateId, SymbolId), Vec<ActionId>> = BTreeMap::new();
    for id in p.action_ids() {
        let a = p.action(id);
        by_head.entry((a.source, a.pop)).or_default().push(id);
    }
    for key in by_head.keys() {
        table.insert(*key, vec![Vec::new(); max_size + 1]);
    }

    fn fill(
        table: &Table,
        push: &[SymbolId],
        state: StateId,
        remaining: usize,
        acc: &mut Vec<ActTree>,
        out: &mut Vec<(Vec<ActTree>, StateId)>,
    ) {
        let Some((&y, rest)) = push.split_first() else {
            if remaining == 0 {
                out.push((acc.clone(), state));
            }
            return;
        };
        let Some(sizes) = table.get(&(state, y)) else { return };
        if remaining < push.len() {
            return;
        }
        let max_child = remaining - rest.len();
        for (s, trees) in sizes.iter().enumerate().take(max_child + 1).skip(1) {
            for (t, exit) in trees {
                acc.push(t.clone());
                fill(table, rest, *exit, remaining - s, acc, out);
                acc.pop();
            }
        }
    }

    for size in 1..=max_size {
        for (&head, ids) in &by_head {
            let mut found = Vec::new();
            for &id in ids {
                let a = p.action(id);
                let mut combos = Vec::new();
                fill(&table, &a.push, a.target, size - 1, &mut Vec::new(), &mut combos);
                for (children, exit) in combos {
                    found.push((ActTree::node(id, children), exit));
                }
            }
            table.get_mut(&head).unwrap()[size] = found;
        }
    }

    let initial = (p.initial_state, p.initial_stack_symbol);
    let mut out = Vec::new();
    for (&head, sizes) in &by_head.keys().map(|k| (*k, &table[k])).collect::<BTreeMap<_, _>>() {
        for trees in sizes.iter() {
            for (t, _) in trees {
                out.push(FlaggedTree { tree: t.clone(), accepting: head == initial });
            }
        }
    }
    out
}

/// Every quasi-run from `start` (a one-symbol stack) with at most
/// `max_moves` moves, by depth-first search over move sequences.
pub fn enumerate_quasi_runs(p: &Pda, start: &Id, max_moves: usize) -> Vec<QuasiRun> {
    fn go(p: &Pda, ids: &mut Vec<Id>, actions: &mut Vec<ActionId>, max: usize, out: &mut Vec<QuasiRun>) {
        let cur = ids.last().unwrap().clone();
        if cur.stack.is_empty() {
            out.push(QuasiRun { ids: ids.clone(), actions: actions.clone() });
            return;
        }
        // each stack symbol needs at least one more move to disappear
        if actions.len() + cur.stack.len() > max {
            return;
        }
        for id in p.action_ids() {
            if let Ok(next) = apply_move(p.action(id), &cur) {
                ids.push(next);
                actions.push(id);
                go(p, ids, actions, max, out);
                ids.pop();
                actions.pop();
            }
        }
    }
    let mut out = Vec::new();
    if start.stack.len() == 1 {
        go(p, &mut vec![start.clone()], &mut Vec::new(), max_moves, &mut out);
    }
    out
}

/// States `q'` reachable as `(q,[X]) ⊢* (q',[])` within `max_moves` moves.
/// The flag is true when no search path was cut by the bound, so the set is
/// exact.
pub fn brute_force_pop_targets(
    p: &Pda,
    q: StateId,
    x: SymbolId,
    max_moves: usize,
) -> (BTreeSet<StateId>, bool) {
    let mut seen: HashSet<Id> = HashSet::new();
    let mut frontier = vec![Id::new(q, vec![x])];
    seen.insert(frontier[0].clone());
    let mut targets = BTreeSet::new();
    for _ in 0..max_moves {
        let mut next = Vec::new();
        for id in &frontier {
            for a in p.action_ids() {
                if let Ok(n) = apply_move(p.action(a), id) {
                    if n.stack.is_empty() {
                        targets.insert(n.state);
                    } else if seen.insert(n.clone()) {
                        next.push(n);
                    }
                }
            }
        }
        frontier = next;
        if frontier.is_empty() {
            return (targets, true);
        }
    }
    (targets, frontier.is_empty())
}

/// The smallest automaton for `{b^n}`: a chain of `n + 1` states.
pub fn minimal_unary_fsa(n: u64, terminal: &str) -> Fsa {
    let states: Vec<String> = (0..=n).map(|i| format!("c{i}")).collect();
    let transitions = (0..n)
        .map(|i| Transition {
            source: FsaState(i as u32),
            label: Some(crate::pda::TerminalId(0)),
            target: FsaState(i as u32 + 1),
        })
        .collect();
    Fsa {
        states,
        alphabet: vec![terminal.to_string()],
        transitions,
        initial: FsaState(0),
        finals: BTreeSet::from([FsaState(n as u32)]),
    }
}
