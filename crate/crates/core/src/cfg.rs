//! Context-free grammars.

use std::collections::BTreeSet;

use crate::pda::TerminalId;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarId(pub u32);

impl VarId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GSym {
    Var(VarId),
    Term(TerminalId),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Rule {
    pub head: VarId,
    pub body: Vec<GSym>,
}

impl Rule {
    pub fn variables(&self) -> impl Iterator<Item = VarId> + '_ {
        self.body.iter().filter_map(|s| match s {
            GSym::Var(v) => Some(*v),
            GSym::Term(_) => None,
        })
    }

    pub fn terminals(&self) -> impl Iterator<Item = TerminalId> + '_ {
        self.body.iter().filter_map(|s| match s {
            GSym::Term(t) => Some(*t),
            GSym::Var(_) => None,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cfg {
    pub variables: Vec<String>,
    pub terminals: Vec<String>,
    pub start: VarId,
    pub rules: Vec<Rule>,
}

impl Cfg {
    pub fn var_name(&self, v: VarId) -> &str {
        &self.variables[v.index()]
    }

    pub fn terminal_name(&self, t: TerminalId) -> &str {
        &self.terminals[t.index()]
    }

    pub fn var_id(&self, name: &str) -> Option<VarId> {
        self.variables.iter().position(|s| s == name).map(|i| VarId(i as u32))
    }

    pub fn num_variables(&self) -> usize {
        self.variables.len()
    }

    pub fn rules_of(&self, v: VarId) -> impl Iterator<Item = &Rule> + '_ {
        self.rules.iter().filter(move |r| r.head == v)
    }

    pub fn describe_rule(&self, r: &Rule) -> String {
        let body: Vec<&str> = r
            .body
            .iter()
            .map(|s| match *s {
                GSym::Var(v) => self.var_name(v),
                GSym::Term(t) => self.terminal_name(t),
            })
            .collect();
        format!(
            "{} -> {}",
            self.var_name(r.head),
            if body.is_empty() { "eps".to_string() } else { body.join(" ") }
        )
    }

    /// Every rule body has at most one terminal and at most two variables.
    pub fn is_21nf(&self) -> bool {
        self.rules
            .iter()
            .all(|r| r.terminals().count() <= 1 && r.variables().count() <= 2)
    }

    /// Variables deriving some terminal word (least fixpoint).
    pub fn generating(&self) -> Vec<bool> {
        let mut gen = vec![false; self.variables.len()];
        let mut changed = true;
        while changed {
            changed = false;
            for r in &self.rules {
                if !gen[r.head.index()] && r.variables().all(|v| gen[v.index()]) {
                    gen[r.head.index()] = true;
                    changed = true;
                }
            }
        }
        gen
    }

    /// Variables reachable from the start variable.
    pub fn reachable(&self) -> Vec<bool> {
        let mut seen = vec![false; self.variables.len()];
        let mut todo = vec![self.start];
        seen[self.start.index()] = true;
        while let Some(v) = todo.pop() {
            for r in self.rules_of(v) {
                for w in r.variables() {
                    if !seen[w.index()] {
                        seen[w.index()] = true;
                        todo.push(w);
                    }
                }
            }
        }
        seen
    }

    /// Removes non-generating variables (and every rule mentioning one), then
    /// unreachable variables. The start variable is always kept. Variable
    /// order is preserved.
    pub fn trim(&self) -> Cfg {
        let gen = self.generating();
        let useful: Vec<bool> = self
            .rules
            .iter()
            .map(|r| gen[r.head.index()] && r.variables().all(|v| gen[v.index()]))
            .collect();
        let stage = Cfg {
            rules: self
                .rules
                .iter()
                .zip(&useful)
                .filter(|(_, &u)| u)
                .map(|(r, _)| r.clone())
                .collect(),
            ..self.clone()
        };
        let reach = stage.reachable();
        let keep: Vec<bool> = (0..self.variables.len())
            .map(|i| i == self.start.index() || (gen[i] && reach[i]))
            .collect();
        stage.restrict(&keep, |r| reach[r.head.index()])
    }

    /// Keeps only the variables flagged in `keep` and the rules accepted by
    /// `rule_ok`, renumbering variables densely.
    fn restrict(&self, keep: &[bool], rule_ok: impl Fn(&Rule) -> bool) -> Cfg {
        let mut remap = vec![None; self.variables.len()];
        let mut variables = Vec::new();
        for (i, name) in self.variables.iter().enumerate() {
            if keep[i] {
                remap[i] = Some(VarId(variables.len() as u32));
                variables.push(name.clone());
            }
        }
        let rules = self
            .rules
            .iter()
            .filter(|r| rule_ok(r))
            .map(|r| Rule {
                head: remap[r.head.index()].unwrap(),
                body: r
                    .body
                    .iter()
                    .map(|s| match *s {
                        GSym::Var(v) => GSym::Var(remap[v.index()].unwrap()),
                        t => t,
                    })
                    .collect(),
            })
            .collect();
        Cfg {
            variables,
            terminals: self.terminals.clone(),
            start: remap[self.start.index()].unwrap(),
            rules,
        }
    }

    /// Structural problems: undeclared ids, name clashes between variables
    /// and terminals.
    pub fn validate(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.start.index() >= self.variables.len() {
            out.push(format!("start variable #{} is not declared", self.start.0));
        }
        let vars: BTreeSet<&String> = self.variables.iter().collect();
        for t in &self.terminals {
            if vars.contains(t) {
                out.push(format!("`{t}` is both a variable and a terminal"));
            }
        }
        for (i, r) in self.rules.iter().enumerate() {
            let bad_var = |v: VarId| v.index() >= self.variables.len();
            if bad_var(r.head)
                || r.variables().any(bad_var)
                || r.terminals().any(|t| t.index() >= self.terminals.len())
            {
                out.push(format!("rule #{i} references an undeclared symbol"));
            }
        }
        out
    }
}

pub fn check_21nf(g: &Cfg) -> bool {
    g.is_21nf()
}

pub fn trim_cfg(g: &Cfg) -> Cfg {
    g.trim()
}
