//! Parikh vectors: symbol counts of a word.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

/// Terminal name → number of occurrences. Zero counts are never stored, so
/// two vectors are equal iff they agree on every symbol.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ParikhVector {
    counts: BTreeMap<String, u64>,
}

impl ParikhVector {
    pub fn of_word<S: AsRef<str>>(word: &[S]) -> Self {
        let mut counts = BTreeMap::new();
        for b in word {
            *counts.entry(b.as_ref().to_string()).or_insert(0) += 1;
        }
        ParikhVector { counts }
    }

    pub fn count(&self, symbol: &str) -> u64 {
        self.counts.get(symbol).copied().unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    /// Counts in the order of `alphabet`.
    pub fn as_tuple<S: AsRef<str>>(&self, alphabet: &[S]) -> Vec<u64> {
        alphabet.iter().map(|b| self.count(b.as_ref())).collect()
    }

    pub fn symbols(&self) -> impl Iterator<Item = &str> {
        self.counts.keys().map(String::as_str)
    }
}

impl fmt::Display for ParikhVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.counts.iter().map(|(k, v)| format!("{k}:{v}")).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Parikh image of a finite set of words.
pub fn parikh_image<'a, I, S>(words: I) -> BTreeSet<ParikhVector>
where
    I: IntoIterator<Item = &'a Vec<S>>,
    S: AsRef<str> + 'a,
{
    words.into_iter().map(|w| ParikhVector::of_word(w)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ab_and_ba_agree() {
        let ab = ParikhVector::of_word(&["a", "b"]);
        let ba = ParikhVector::of_word(&["b", "a"]);
        assert_eq!(ab, ba);
        assert_eq!(ab.as_tuple(&["a", "b"]), vec![1, 1]);
    }

    #[test]
    fn empty_word_is_zero_vector() {
        let e = ParikhVector::of_word::<&str>(&[]);
        assert_eq!(e.as_tuple(&["a", "b"]), vec![0, 0]);
        assert_eq!(e.total(), 0);
    }
}
