//! Terms over a grammar's ranked alphabet, written `(op child*)` with
//! nullary operators still parenthesized: `(plus (var_x) (lit1))`.
//! Printing and parsing are exact inverses on the byte level.

use crate::grammar::{Grammar, Nonterminal};
use crate::sexp::Sexp;
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Term {
    pub op: String,
    pub children: Vec<Term>,
}

impl Term {
    pub fn new(op: impl Into<String>, children: Vec<Term>) -> Term {
        Term { op: op.into(), children }
    }

    pub fn leaf(op: impl Into<String>) -> Term {
        Term { op: op.into(), children: Vec::new() }
    }

    pub fn depth(&self) -> usize {
        1 + self.children.iter().map(Term::depth).max().unwrap_or(0)
    }

    pub fn size(&self) -> usize {
        1 + self.children.iter().map(Term::size).sum::<usize>()
    }

    /// Pre-order traversal including the term itself.
    pub fn subterms(&self) -> Vec<&Term> {
        let mut out = vec![self];
        let mut i = 0;
        while i < out.len() {
            let t: &Term = out[i];
            out.extend(t.children.iter());
            i += 1;
        }
        out
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}", self.op)?;
        for c in &self.children {
            write!(f, " {c}")?;
        }
        write!(f, ")")
    }
}

pub fn print_term(t: &Term) -> String {
    t.to_string()
}

fn from_sexp(s: &Sexp) -> Result<Term, String> {
    let items = s.as_list().ok_or_else(|| format!("term must be a list, got {s}"))?;
    let op = items
        .first()
        .and_then(Sexp::as_atom)
        .ok_or_else(|| format!("term must start with an operator atom: {s}"))?;
    let children = items[1..].iter().map(from_sexp).collect::<Result<Vec<_>, _>>()?;
    Ok(Term::new(op, children))
}

/// Checks `t` against nonterminal `nt`, verifying operator membership and
/// arity all the way down.
fn check_against(t: &Term, nt: &str, g: &Grammar) -> Result<(), String> {
    let p = g
        .production(nt, &t.op)
        .ok_or_else(|| format!("operator {} does not belong to nonterminal {nt}", t.op))?;
    if p.arity() != t.children.len() {
        return Err(format!(
            "operator {} takes {} children, got {}",
            t.op,
            p.arity(),
            t.children.len()
        ));
    }
    for (c, child_nt) in t.children.iter().zip(&p.rhs) {
        check_against(c, child_nt, g)?;
    }
    Ok(())
}

/// Resolves the unique nonterminal deriving `t`'s root. Fails when the root
/// operator is unknown, typing fails below it, or more than one nonterminal
/// admits the whole term.
pub fn term_nonterminal<'g>(t: &Term, g: &'g Grammar) -> Result<&'g Nonterminal, String> {
    let mut matches = Vec::new();
    for nt in g.nonterminals.keys() {
        if check_against(t, nt, g).is_ok() {
            matches.push(nt.as_str());
        }
    }
    match matches.as_slice() {
        [only] => Ok(&g.nonterminals[*only]),
        [] => {
            // Re-run against the best candidate so the error says what is
            // actually wrong instead of just "untypeable".
            for nt in g.nonterminals.keys() {
                if g.production(nt, &t.op).is_some() {
                    check_against(t, nt, g)?;
                }
            }
            Err(format!("operator {} does not occur in the grammar", t.op))
        }
        many => Err(format!("term {t} is derivable from several nonterminals: {}", many.join(", "))),
    }
}

/// Parses a term and type-checks it against the grammar.
pub fn parse_term(text: &str, g: &Grammar) -> Result<Term, String> {
    let t = from_sexp(&crate::sexp::parse_one(text)?)?;
    term_nonterminal(&t, g)?;
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::load_grammar;

    fn arith() -> Grammar {
        load_grammar(
            "(grammar
               (nt E :in int :out int)
               (nt B :in int :out int)
               (prod E lit0 ())
               (prod E lit1 ())
               (prod E var_x ())
               (prod E plus (E E))
               (prod B lt (E E))
               (start E))",
        )
        .unwrap()
    }

    #[test]
    fn parse_print_round_trip() {
        let g = arith();
        let text = "(plus (var_x) (plus (lit0) (lit1)))";
        let t = parse_term(text, &g).unwrap();
        assert_eq!(print_term(&t), text);
    }

    #[test]
    fn arity_mismatch_rejected() {
        let g = arith();
        let err = parse_term("(plus (lit0))", &g).unwrap_err();
        assert!(err.contains("takes 2 children"), "{err}");
    }

    #[test]
    fn unknown_operator_rejected() {
        let g = arith();
        let err = parse_term("(times (lit0) (lit1))", &g).unwrap_err();
        assert!(err.contains("does not occur"), "{err}");
    }

    #[test]
    fn root_nonterminal_resolved() {
        let g = arith();
        let t = parse_term("(lt (lit0) (var_x))", &g).unwrap();
        assert_eq!(term_nonterminal(&t, &g).unwrap().name, "B");
        let t = parse_term("(lit0)", &g).unwrap();
        assert_eq!(term_nonterminal(&t, &g).unwrap().name, "E");
    }

    #[test]
    fn subterm_walk_is_preorder() {
        let g = arith();
        let t = parse_term("(plus (lit0) (lit1))", &g).unwrap();
        let ops: Vec<&str> = t.subterms().iter().map(|s| s.op.as_str()).collect();
        assert_eq!(ops, ["plus", "lit0", "lit1"]);
    }
}
