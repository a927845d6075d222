//! Pushdown automata, their tree semantics (actrees), the P(n,k) lower-bound
//! family, PDA → CFG conversions, and Parikh-equivalent finite automata,
//! with brute-force oracles to cross-check every construction.

pub mod actree;
pub mod cfg;
pub mod convert;
pub mod error;
pub mod family;
pub mod format;
pub mod fsa;
pub mod oracle;
pub mod parikh;
pub mod pda;

pub use actree::ActTree;
pub use cfg::{Cfg, GSym, Rule, VarId};
pub use error::{ActreeError, ConvertError, FamilyError, MoveError, OracleError, ParseError};
pub use family::FamilyParams;
pub use format::Automaton;
pub use fsa::{Fsa, FsaState, Transition};
pub use parikh::ParikhVector;
pub use pda::{
    Acceptance, Action, ActionId, Id, Pda, PdaBuilder, QuasiRun, StateId, SymbolId, TerminalId,
};

/// A word as a sequence of terminal names.
pub type Word = Vec<String>;

/// Symbol names in the text formats: `[A-Za-z0-9_.$*\[\],|-]+`.
pub fn is_token(s: &str) -> bool {
    !s.is_empty()
        && s.chars().all(|c| {
            c.is_ascii_alphanumeric() || matches!(c, '_' | '.' | '$' | '*' | '[' | ']' | ',' | '|' | '-')
        })
}
