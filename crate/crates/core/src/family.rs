//! The lower-bound family `P(n,k)`: unary PDAs with `n` states and
//! `k + 2n + 4` stack symbols accepting a single word `b^N` with
//! `N >= 2^(n²k)`.
//!
//! The unique accepting actree is exponentially large, so it is represented
//! by a memo of distinct subtrees. A subtree is identified by its root action
//! together with the state it exits in: the ⋆-pushing action
//! `(q_i,X_0) ↪ (q_i, X_k ⋆)` roots different subtrees depending on which
//! `r_m` its parent is waiting for, so the action alone is not enough.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::actree::{combine_dimensions, ActTree};
use crate::error::FamilyError;
use crate::pda::{Action, ActionId, Pda, PdaBuilder, StateId, SymbolId};

/// Default node budget for [`FamilyTree::materialize`].
pub const DEFAULT_NODE_BUDGET: u64 = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct FamilyParams {
    pub n: u32,
    pub k: u32,
}

impl FamilyParams {
    pub fn new(n: u32, k: u32) -> Result<Self, FamilyError> {
        if n == 0 || k == 0 {
            return Err(FamilyError::InvalidParams { n, k });
        }
        Ok(FamilyParams { n, k })
    }

    /// Stack alphabet size `k + 2n + 4`.
    pub fn p(&self) -> u32 {
        self.k + 2 * self.n + 4
    }

    /// `n²k + n² + 4n + 1`.
    pub fn expected_action_count(&self) -> u64 {
        let (n, k) = (self.n as u64, self.k as u64);
        n * n * k + n * n + 4 * n + 1
    }

    fn check(&self) -> Result<(), FamilyError> {
        Self::new(self.n, self.k).map(|_| ())
    }
}

impl fmt::Display for FamilyParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "P({},{})", self.n, self.k)
    }
}

/// `P(n,k)` together with the ids of every schema instance.
#[derive(Clone, Debug)]
pub struct Family {
    pub params: FamilyParams,
    pub pda: Pda,
    ids: HashMap<Schema, ActionId>,
    x_level: HashMap<SymbolId, u32>,
}

/// One instance of the nine action schemas.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Schema {
    /// `(q0,S) ↪ (q0, X_k r_0)`
    Start,
    /// `(q_i,X_j) ↪ (q_i, X_{j-1} r_m s_i X_{j-1} r_m)`
    Push { i: u32, j: u32, m: u32 },
    /// `(q_j,s_i) ↪ (q_i, ε)`
    PopS { from: u32, i: u32 },
    /// `(q_i,r_i) ↪ (q_i, ε)`
    PopR { i: u32 },
    /// `(q_i,X_0) ↪ (q_i, X_k ⋆)`
    StarPush { i: u32 },
    /// `(q_i,X_0) ↪ (q_{i+1}, X_k $)`
    DollarPush { i: u32 },
    /// `(q_i,⋆) ↪ (q_{i-1}, ε)`
    StarPop { i: u32 },
    /// `(q_0,$) ↪ (q_{n-1}, ε)`
    DollarPop,
    /// `(q_{n-1},X_0) ↪ (q_{n-1}, ε)`
    X0Pop,
}

pub fn state_name(i: u32) -> String {
    format!("q{i}")
}

impl Family {
    pub fn action(&self, s: Schema) -> ActionId {
        self.ids[&s]
    }

    pub fn schema_of(&self, a: ActionId) -> Schema {
        *self.ids.iter().find(|(_, &id)| id == a).expect("action of the family").0
    }

    /// `j` for `X_j`, `None` for the other stack symbols.
    pub fn x_level(&self, x: SymbolId) -> Option<u32> {
        self.x_level.get(&x).copied()
    }

    pub fn schema_instances(&self) -> impl Iterator<Item = (Schema, ActionId)> + '_ {
        let mut v: Vec<_> = self.ids.iter().map(|(&s, &a)| (s, a)).collect();
        v.sort();
        v.into_iter()
    }
}

/// Generates `P(n,k)`.
pub fn build_family(params: FamilyParams) -> Result<Family, FamilyError> {
    params.check()?;
    let FamilyParams { n, k } = params;
    let q = state_name;
    let x = |j: u32| format!("X{j}");
    let s = |i: u32| format!("s{i}");
    let r = |i: u32| format!("r{i}");

    let mut b = PdaBuilder::new();
    for i in 0..n {
        b.state(&q(i));
    }
    b.terminal("b");
    b.symbol("S");
    for j in 0..=k {
        b.symbol(&x(j));
    }
    for i in 0..n {
        b.symbol(&s(i));
    }
    for i in 0..n {
        b.symbol(&r(i));
    }
    b.symbol("star");
    b.symbol("dollar");
    b.initial("q0", "S");

    let mut schemas = Vec::new();
    let mut add = |b: &mut PdaBuilder, schema: Schema, src: String, pop: String, tgt: String, push: Vec<String>| {
        let push: Vec<&str> = push.iter().map(String::as_str).collect();
        b.action(&src, &pop, Some("b"), &tgt, &push);
        schemas.push(schema);
    };
    add(&mut b, Schema::Start, q(0), "S".into(), q(0), vec![x(k), r(0)]);
    for i in 0..n {
        for m in 0..n {
            for j in 1..=k {
                add(
                    &mut b,
                    Schema::Push { i, j, m },
                    q(i),
                    x(j),
                    q(i),
                    vec![x(j - 1), r(m), s(i), x(j - 1), r(m)],
                );
            }
        }
    }
    for i in 0..n {
        for from in 0..n {
            add(&mut b, Schema::PopS { from, i }, q(from), s(i), q(i), vec![]);
        }
    }
    for i in 0..n {
        add(&mut b, Schema::PopR { i }, q(i), r(i), q(i), vec![]);
    }
    for i in 0..n {
        add(&mut b, Schema::StarPush { i }, q(i), x(0), q(i), vec![x(k), "star".into()]);
    }
    for i in 0..n.saturating_sub(1) {
        add(&mut b, Schema::DollarPush { i }, q(i), x(0), q(i + 1), vec![x(k), "dollar".into()]);
    }
    for i in 1..n {
        add(&mut b, Schema::StarPop { i }, q(i), "star".into(), q(i - 1), vec![]);
    }
    add(&mut b, Schema::DollarPop, q(0), "dollar".into(), q(n - 1), vec![]);
    add(&mut b, Schema::X0Pop, q(n - 1), x(0), q(n - 1), vec![]);

    let pda = b.build();
    if pda.actions.len() != schemas.len() {
        return Err(FamilyError::Inconsistent("two schema instances coincide".into()));
    }
    let ids = schemas
        .into_iter()
        .enumerate()
        .map(|(i, s)| (s, ActionId(i as u32)))
        .collect();
    let x_level = (0..=k).map(|j| (pda.symbol_id(&x(j)).unwrap(), j)).collect();
    Ok(Family { params, pda, ids, x_level })
}

/// Generates the PDA `P(n,k)`.
pub fn build_family_pda(params: FamilyParams) -> Result<Pda, FamilyError> {
    build_family(params).map(|f| f.pda)
}

/// A distinct subtree of the unique accepting actree: its root action and the
/// state reached after its last action.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeKey {
    pub action: ActionId,
    pub exit: StateId,
}

/// Which case of the construction produced a node.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum NodeCase {
    /// Root, popping `S`.
    Root,
    /// `X_j` push with `j >= 2`.
    HighPush,
    /// `X_0` pop pushing `X_k $`.
    DollarPush,
    /// `X_1` push with `m <= n-2`.
    LowPush,
    /// `X_1` push with `m = n-1`.
    LastPush,
    /// `X_0` pop pushing `X_k ⋆`, first child of a `LowPush` node.
    StarPush,
    Leaf,
}

impl NodeCase {
    /// Cases whose dimension exceeds that of their children by one.
    pub fn grows_dimension(self) -> bool {
        matches!(self, NodeCase::HighPush | NodeCase::LowPush | NodeCase::LastPush)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MemoEntry {
    pub case: NodeCase,
    pub children: Vec<NodeKey>,
    pub size: BigUint,
    pub dimension: u32,
}

/// The unique accepting actree of `P(n,k)` as a memo of distinct subtrees.
#[derive(Clone, Debug)]
pub struct FamilyTree {
    pub family: Family,
    pub memo: BTreeMap<NodeKey, MemoEntry>,
    pub root: NodeKey,
}

impl FamilyTree {
    pub fn root_entry(&self) -> &MemoEntry {
        &self.memo[&self.root]
    }

    /// `N`: every action consumes one `b`, so the word length is the size.
    pub fn word_length(&self) -> &BigUint {
        &self.root_entry().size
    }

    pub fn dimension(&self) -> u32 {
        self.root_entry().dimension
    }

    /// Expands the memo into a concrete tree when it has at most `budget`
    /// nodes.
    pub fn materialize(&self, budget: u64) -> Result<ActTree, FamilyError> {
        let size = self.word_length();
        if *size > BigUint::from(budget) {
            return Err(FamilyError::BudgetExceeded { size: size.to_string(), budget });
        }
        Ok(self.expand(self.root))
    }

    fn expand(&self, key: NodeKey) -> ActTree {
        let e = &self.memo[&key];
        ActTree::node(key.action, e.children.iter().map(|&c| self.expand(c)).collect())
    }

    /// `(source index, exit index, X-level)` used by the termination order.
    pub fn order_key(&self, key: NodeKey) -> (u32, u32, Option<u32>) {
        let a = self.family.pda.action(key.action);
        (a.source.0, key.exit.0, self.family.x_level(a.pop))
    }

    /// `parent ≺ child`: larger source, or same source and larger exit, or
    /// both equal and a lower `X` level.
    pub fn precedes(&self, parent: NodeKey, child: NodeKey) -> bool {
        let (i1, f1, j1) = self.order_key(parent);
        let (i2, f2, j2) = self.order_key(child);
        i1 < i2 || (i1 == i2 && (f1 < f2 || (f1 == f2 && matches!((j1, j2), (Some(a), Some(b)) if a > b))))
    }
}

/// Builds the memoized unique accepting actree by the five-case analysis.
/// Fails with `CycleDetected` if a subtree would (transitively) contain
/// itself, and with `Inconsistent` if a forced child does not fit.
pub fn build_unique_actree(params: FamilyParams) -> Result<FamilyTree, FamilyError> {
    let family = build_family(params)?;
    let root = NodeKey { action: family.action(Schema::Start), exit: StateId(0) };
    let mut builder = MemoBuilder {
        family: &family,
        memo: BTreeMap::new(),
        in_progress: BTreeSet::new(),
    };
    builder.visit(root, NodeCase::Root)?;
    let memo = builder.memo;
    let tree = FamilyTree { family, memo, root };
    for (&key, e) in &tree.memo {
        if key == root || e.case == NodeCase::Leaf {
            continue;
        }
        for &c in &e.children {
            if tree.memo[&c].case != NodeCase::Leaf && !tree.precedes(key, c) {
                return Err(FamilyError::Inconsistent(format!(
                    "order violated between {} and {}",
                    describe_key(&tree.family.pda, key),
                    describe_key(&tree.family.pda, c)
                )));
            }
        }
    }
    Ok(tree)
}

/// Length `N` of the single word accepted by `P(n,k)`.
pub fn family_word_length(params: FamilyParams) -> Result<BigUint, FamilyError> {
    Ok(build_unique_actree(params)?.word_length().clone())
}

pub fn describe_key(p: &Pda, key: NodeKey) -> String {
    format!("{} exiting {}", p.describe_action(p.action(key.action)), p.state_name(key.exit))
}

struct MemoBuilder<'a> {
    family: &'a Family,
    memo: BTreeMap<NodeKey, MemoEntry>,
    in_progress: BTreeSet<NodeKey>,
}

impl MemoBuilder<'_> {
    fn key(&self, s: Schema, exit: u32) -> NodeKey {
        NodeKey { action: self.family.action(s), exit: StateId(exit) }
    }

    fn leaf(&self, s: Schema) -> (NodeKey, NodeCase) {
        let action = self.family.action(s);
        let exit = self.family.pda.action(action).target;
        (NodeKey { action, exit }, NodeCase::Leaf)
    }

    /// The forced children of `key`, by case.
    fn children(&self, key: NodeKey, case: NodeCase) -> Result<Vec<(NodeKey, NodeCase)>, FamilyError> {
        let FamilyParams { n, k } = self.family.params;
        let schema = self.family.schema_of(key.action);
        let five = |first: (NodeKey, NodeCase), i: u32, m: u32| {
            vec![
                first,
                self.leaf(Schema::PopR { i: m }),
                self.leaf(Schema::PopS { from: m, i }),
                first,
                self.leaf(Schema::PopR { i: m }),
            ]
        };
        let push_case = |j: u32, m: u32| {
            if j >= 2 {
                NodeCase::HighPush
            } else if m + 1 < n {
                NodeCase::LowPush
            } else {
                NodeCase::LastPush
            }
        };
        Ok(match (case, schema) {
            (NodeCase::Leaf, _) => vec![],
            (NodeCase::Root, Schema::Start) => vec![
                (self.key(Schema::Push { i: 0, j: k, m: 0 }, 0), push_case(k, 0)),
                self.leaf(Schema::PopR { i: 0 }),
            ],
            (NodeCase::HighPush, Schema::Push { i, j, m }) => {
                let first = (self.key(Schema::Push { i, j: j - 1, m }, m), push_case(j - 1, m));
                five(first, i, m)
            }
            (NodeCase::DollarPush, Schema::DollarPush { i }) => vec![
                (self.key(Schema::Push { i: i + 1, j: k, m: 0 }, 0), push_case(k, 0)),
                self.leaf(Schema::DollarPop),
            ],
            (NodeCase::LowPush, Schema::Push { i, j: 1, m }) => {
                five((self.key(Schema::StarPush { i }, m), NodeCase::StarPush), i, m)
            }
            (NodeCase::StarPush, Schema::StarPush { i }) => {
                let m = key.exit.0;
                vec![
                    (self.key(Schema::Push { i, j: k, m: m + 1 }, m + 1), push_case(k, m + 1)),
                    self.leaf(Schema::StarPop { i: m + 1 }),
                ]
            }
            (NodeCase::LastPush, Schema::Push { i, j: 1, m }) => {
                let first = if i + 1 < n {
                    (self.key(Schema::DollarPush { i }, n - 1), NodeCase::DollarPush)
                } else {
                    self.leaf(Schema::X0Pop)
                };
                five(first, i, m)
            }
            _ => {
                return Err(FamilyError::Inconsistent(format!(
                    "no case applies to {}",
                    describe_key(&self.family.pda, key)
                )))
            }
        })
    }

    fn visit(&mut self, key: NodeKey, case: NodeCase) -> Result<(), FamilyError> {
        if self.memo.contains_key(&key) {
            return Ok(());
        }
        if !self.in_progress.insert(key) {
            return Err(FamilyError::CycleDetected(describe_key(&self.family.pda, key)));
        }
        let children = self.children(key, case)?;
        self.check_fit(key, &children)?;
        for &(c, c_case) in &children {
            self.visit(c, c_case)?;
        }
        let size = children
            .iter()
            .fold(BigUint::one(), |acc, (c, _)| acc + &self.memo[c].size);
        let dimension = combine_dimensions(children.iter().map(|(c, _)| self.memo[c].dimension));
        self.in_progress.remove(&key);
        self.memo.insert(
            key,
            MemoEntry { case, children: children.into_iter().map(|(c, _)| c).collect(), size, dimension },
        );
        Ok(())
    }

    /// Arity, popped symbols and state chaining of the children, and the
    /// declared exit state.
    fn check_fit(&self, key: NodeKey, children: &[(NodeKey, NodeCase)]) -> Result<(), FamilyError> {
        let p = &self.family.pda;
        let a: &Action = p.action(key.action);
        let fail = || FamilyError::Inconsistent(format!("children of {} do not fit", describe_key(p, key)));
        if a.push.len() != children.len() {
            return Err(fail());
        }
        let mut state = a.target;
        for (x, (c, _)) in a.push.iter().zip(children) {
            let ca = p.action(c.action);
            if ca.pop != *x || ca.source != state {
                return Err(fail());
            }
            state = c.exit;
        }
        if state != key.exit {
            return Err(fail());
        }
        Ok(())
    }
}

/// Numbers reported for one member of the family.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundsReport {
    pub n: u32,
    pub k: u32,
    /// Stack symbols, `k + 2n + 4`.
    pub p: u32,
    /// Length of the single accepted word.
    #[serde(serialize_with = "ser_big")]
    pub word_length: BigUint,
    pub word_length_log2: f64,
    pub dimension: u32,
    /// `2^(n²k)`.
    #[serde(serialize_with = "ser_big")]
    pub lower_2pow: BigUint,
    /// Variables used by the textbook triple construction: `n²p + 1`, or `p` when `n = 1`.
    pub cfg_textbook_vars: u64,
    /// `floor(log2 N)`: the logarithmic smallest-grammar bound with constant 1.
    /// An asymptotic indicator, not an exact bound.
    pub cfg_var_lower: u64,
    /// `N + 1`: states of the smallest Parikh-equivalent FSA.
    #[serde(serialize_with = "ser_big")]
    pub fsa_lower_states: BigUint,
    /// `log2` of the `4^(n²p)` upper bound, i.e. `2n²p`.
    pub fsa_upper_states_log2: u64,
    /// Longest push of the family (relevant when the PDA is not in reduced form).
    pub max_push_len: usize,
}

fn ser_big<S: serde::Serializer>(v: &BigUint, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

/// `log2` of a big integer, good to double precision.
pub fn log2_big(v: &BigUint) -> f64 {
    if v.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = v.bits();
    if bits <= 60 {
        return (u64::try_from(v).unwrap() as f64).log2();
    }
    let shift = bits - 60;
    let top: BigUint = v >> shift;
    (u64::try_from(&top).unwrap() as f64).log2() + shift as f64
}

pub fn bounds_report(params: FamilyParams) -> Result<BoundsReport, FamilyError> {
    let tree = build_unique_actree(params)?;
    Ok(bounds_from_tree(&tree))
}

pub fn bounds_from_tree(tree: &FamilyTree) -> BoundsReport {
    let FamilyParams { n, k } = tree.family.params;
    let p = tree.family.params.p();
    let (n64, k64, p64) = (n as u64, k as u64, p as u64);
    let word_length = tree.word_length().clone();
    BoundsReport {
        n,
        k,
        p,
        word_length_log2: log2_big(&word_length),
        dimension: tree.dimension(),
        lower_2pow: BigUint::one() << (n64 * n64 * k64),
        cfg_textbook_vars: if n > 1 { n64 * n64 * p64 + 1 } else { p64 },
        cfg_var_lower: word_length.bits().saturating_sub(1),
        fsa_lower_states: &word_length + 1u32,
        fsa_upper_states_log2: 2 * n64 * n64 * p64,
        max_push_len: tree.family.pda.max_push_len(),
        word_length,
    }
}
