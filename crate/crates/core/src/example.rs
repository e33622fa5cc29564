//! Input/term/output triples and per-term summary tables. A summary is a
//! finite input-to-output table standing in for a child term whose own
//! semantics has not been learned yet; entries only ever come from
//! interpreter runs, so the tables are functional by construction.

use crate::term::Term;
use crate::value::Value;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Example {
    pub input: Value,
    pub term: Term,
    pub output: Value,
}

impl Example {
    pub fn new(input: Value, term: Term, output: Value) -> Example {
        Example { input, term, output }
    }
}

impl fmt::Display for Example {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}, {}, {}>", self.input, self.term, self.output)
    }
}

/// Ordered set of examples. Insertion order does not matter downstream;
/// iteration is always in the derived triple order, which keeps every
/// consumer deterministic.
pub type ExampleSet = BTreeSet<Example>;

/// Summary tables for all terms seen so far, plus the inputs known to make
/// a given term fault or diverge (poisoned inputs). A candidate whose flows
/// route a poisoned input into a child cannot be the semantics, because
/// examples are only ever built from terminating runs.
#[derive(Debug, Clone, Default)]
pub struct Summaries {
    tables: BTreeMap<Term, BTreeMap<Value, Value>>,
    poisoned: BTreeMap<Term, BTreeSet<Value>>,
}

impl Summaries {
    pub fn new() -> Summaries {
        Summaries::default()
    }

    pub fn lookup(&self, term: &Term, input: &Value) -> Option<&Value> {
        self.tables.get(term).and_then(|t| t.get(input))
    }

    pub fn entries(&self, term: &Term) -> impl Iterator<Item = (&Value, &Value)> {
        self.tables.get(term).into_iter().flat_map(|t| t.iter())
    }

    pub fn entry_count(&self, term: &Term) -> usize {
        self.tables.get(term).map_or(0, BTreeMap::len)
    }

    /// Records an interpreter-observed pair. Rejects a second, different
    /// output for the same input: that would mean the interpreter is not
    /// deterministic and every consistency argument collapses.
    pub fn insert(&mut self, term: &Term, input: Value, output: Value) -> Result<(), String> {
        let table = self.tables.entry(term.clone()).or_default();
        match table.get(&input) {
            Some(prev) if *prev != output => Err(format!(
                "summary for {term} maps {input} to both {prev} and {output}"
            )),
            Some(_) => Ok(()),
            None => {
                table.insert(input, output);
                Ok(())
            }
        }
    }

    pub fn mark_poisoned(&mut self, term: &Term, input: Value) {
        self.poisoned.entry(term.clone()).or_default().insert(input);
    }

    pub fn is_poisoned(&self, term: &Term, input: &Value) -> bool {
        self.poisoned.get(term).is_some_and(|s| s.contains(input))
    }

    /// Seeds tables from example triples (each triple is itself a summary
    /// entry for its own term).
    pub fn absorb_examples<'a>(
        &mut self,
        examples: impl IntoIterator<Item = &'a Example>,
    ) -> Result<(), String> {
        for ex in examples {
            self.insert(&ex.term, ex.input.clone(), ex.output.clone())?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(op: &str) -> Term {
        Term::leaf(op)
    }

    #[test]
    fn lookup_is_stable() {
        let mut s = Summaries::new();
        s.insert(&t("a"), Value::int(1), Value::int(2)).unwrap();
        assert_eq!(s.lookup(&t("a"), &Value::int(1)), Some(&Value::int(2)));
        assert_eq!(s.lookup(&t("a"), &Value::int(1)), Some(&Value::int(2)));
        assert_eq!(s.lookup(&t("a"), &Value::int(9)), None);
        assert_eq!(s.lookup(&t("b"), &Value::int(1)), None);
    }

    #[test]
    fn conflicting_output_rejected() {
        let mut s = Summaries::new();
        s.insert(&t("a"), Value::int(1), Value::int(2)).unwrap();
        assert!(s.insert(&t("a"), Value::int(1), Value::int(2)).is_ok());
        assert!(s.insert(&t("a"), Value::int(1), Value::int(3)).is_err());
    }

    #[test]
    fn poisoned_inputs_tracked_per_term() {
        let mut s = Summaries::new();
        s.mark_poisoned(&t("a"), Value::int(5));
        assert!(s.is_poisoned(&t("a"), &Value::int(5)));
        assert!(!s.is_poisoned(&t("a"), &Value::int(4)));
        assert!(!s.is_poisoned(&t("b"), &Value::int(5)));
    }

    #[test]
    fn absorb_seeds_own_term_entries() {
        let mut s = Summaries::new();
        let exs = ExampleSet::from([
            Example::new(Value::int(0), t("a"), Value::int(1)),
            Example::new(Value::int(2), t("a"), Value::int(3)),
        ]);
        s.absorb_examples(&exs).unwrap();
        assert_eq!(s.entry_count(&t("a")), 2);
    }
}
