//! Typed regular tree grammars. Each nonterminal carries an input type and
//! an output type; each production names an operator, the nonterminals of
//! its children in order, and whether the operator may re-enter its own
//! evaluation (loops and other self-referential control).
//!
//! Grammar files are s-expressions:
//!
//! ```text
//! (grammar
//!   (nt E :in int :out int)
//!   (prod E plus (E E))
//!   (prod E lit0 ())
//!   (start E))
//! ```
//!
//! Loading validates the whole grammar up front: every referenced
//! nonterminal must be declared, operator names must be unique per
//! nonterminal, and every nonterminal must be productive (able to derive at
//! least one finite term).

use crate::sexp::Sexp;
use crate::value::{ScalarType, ValueType};
use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Nonterminal {
    pub name: String,
    pub input_type: ValueType,
    pub output_type: ValueType,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Production {
    pub lhs: String,
    pub op: String,
    pub rhs: Vec<String>,
    pub recursive: bool,
}

impl Production {
    pub fn arity(&self) -> usize {
        self.rhs.len()
    }
}

#[derive(Debug, Clone)]
pub struct Grammar {
    pub nonterminals: BTreeMap<String, Nonterminal>,
    /// In file order; the per-production index is stable across runs.
    pub productions: Vec<Production>,
    pub start: String,
    /// Smallest derivable term depth per nonterminal, used to steer random
    /// generation away from dead ends near the depth bound.
    min_depth: BTreeMap<String, usize>,
}

impl Grammar {
    pub fn nonterminal(&self, name: &str) -> Option<&Nonterminal> {
        self.nonterminals.get(name)
    }

    pub fn productions_of(&self, nt: &str) -> Vec<&Production> {
        self.productions.iter().filter(|p| p.lhs == nt).collect()
    }

    pub fn production(&self, nt: &str, op: &str) -> Option<&Production> {
        self.productions.iter().find(|p| p.lhs == nt && p.op == op)
    }

    /// Depth of the shallowest term derivable from `nt`. A leaf production
    /// gives depth 1.
    pub fn min_depth(&self, nt: &str) -> usize {
        self.min_depth[nt]
    }
}

fn parse_type(s: &Sexp) -> Result<ValueType, String> {
    match s {
        Sexp::Atom(a) if a == "int" => Ok(ValueType::IntT),
        Sexp::Atom(a) if a == "bool" => Ok(ValueType::BoolT),
        Sexp::List(items) => {
            let mut it = items.iter();
            match it.next() {
                Some(Sexp::Atom(head)) if head == "tuple" => {}
                _ => return Err(format!("unknown type {s}")),
            }
            let mut elems = Vec::new();
            for e in it {
                match e {
                    Sexp::Atom(a) if a == "int" => elems.push(ScalarType::Int),
                    Sexp::Atom(a) if a == "bool" => elems.push(ScalarType::Bool),
                    other => return Err(format!("tuple element must be a scalar type, got {other}")),
                }
            }
            let ty = ValueType::TupleT(elems);
            ty.check()?;
            Ok(ty)
        }
        other => Err(format!("unknown type {other}")),
    }
}

fn parse_nt(items: &[Sexp]) -> Result<Nonterminal, String> {
    // (nt <name> :in <type> :out <type>)
    if items.len() != 6 {
        return Err(format!("nt form needs a name, :in type, and :out type, got {} items", items.len()));
    }
    let name = items[1].as_atom().ok_or("nt name must be an atom")?.to_string();
    let mut input_type = None;
    let mut output_type = None;
    let mut i = 2;
    while i + 1 < items.len() {
        match items[i].as_atom() {
            Some(":in") => input_type = Some(parse_type(&items[i + 1])?),
            Some(":out") => output_type = Some(parse_type(&items[i + 1])?),
            _ => return Err(format!("expected :in or :out in nt {name}")),
        }
        i += 2;
    }
    Ok(Nonterminal {
        name,
        input_type: input_type.ok_or("nt is missing :in")?,
        output_type: output_type.ok_or("nt is missing :out")?,
    })
}

fn parse_prod(items: &[Sexp]) -> Result<Production, String> {
    // (prod <lhs> <op> (<rhs>*) :recursive?)
    if items.len() != 4 && items.len() != 5 {
        return Err("prod form needs a lhs, an op, and a child list".to_string());
    }
    let lhs = items[1].as_atom().ok_or("prod lhs must be an atom")?.to_string();
    let op = items[2].as_atom().ok_or("prod op must be an atom")?.to_string();
    let rhs = items[3]
        .as_list()
        .ok_or("prod children must be a list")?
        .iter()
        .map(|s| s.as_atom().map(str::to_string).ok_or_else(|| "prod child must be an atom".to_string()))
        .collect::<Result<Vec<_>, _>>()?;
    let recursive = match items.get(4) {
        None => false,
        Some(Sexp::Atom(a)) if a == ":recursive" => true,
        Some(other) => return Err(format!("unexpected prod attribute {other}")),
    };
    Ok(Production { lhs, op, rhs, recursive })
}

/// Parses and validates a grammar from its textual form.
pub fn load_grammar(text: &str) -> Result<Grammar, String> {
    let top = crate::sexp::parse_one(text)?;
    let items = top.as_list().ok_or("grammar file must be a single list")?;
    match items.first().and_then(Sexp::as_atom) {
        Some("grammar") => {}
        _ => return Err("grammar file must start with (grammar ...)".to_string()),
    }

    let mut nonterminals = BTreeMap::new();
    let mut productions: Vec<Production> = Vec::new();
    let mut start = None;

    for form in &items[1..] {
        let parts = form.as_list().ok_or_else(|| format!("unexpected atom {form} in grammar"))?;
        match parts.first().and_then(Sexp::as_atom) {
            Some("nt") => {
                let nt = parse_nt(parts)?;
                if nonterminals.insert(nt.name.clone(), nt.clone()).is_some() {
                    return Err(format!("nonterminal {} declared twice", nt.name));
                }
            }
            Some("prod") => productions.push(parse_prod(parts)?),
            Some("start") => {
                if parts.len() != 2 {
                    return Err("start form needs exactly one nonterminal".to_string());
                }
                let name = parts[1].as_atom().ok_or("start nonterminal must be an atom")?;
                if start.replace(name.to_string()).is_some() {
                    return Err("start declared twice".to_string());
                }
            }
            _ => return Err(format!("unknown grammar form {form}")),
        }
    }

    let start = start.ok_or("grammar is missing (start ...)")?;
    if !nonterminals.contains_key(&start) {
        return Err(format!("start nonterminal {start} is not declared"));
    }

    let mut seen_ops: BTreeMap<(&str, &str), ()> = BTreeMap::new();
    for p in &productions {
        if !nonterminals.contains_key(&p.lhs) {
            return Err(format!("production {} uses undeclared nonterminal {}", p.op, p.lhs));
        }
        for child in &p.rhs {
            if !nonterminals.contains_key(child) {
                return Err(format!("production {} uses undeclared child nonterminal {child}", p.op));
            }
        }
        if seen_ops.insert((p.lhs.as_str(), p.op.as_str()), ()).is_some() {
            return Err(format!("operator {} declared twice under {}", p.op, p.lhs));
        }
        if p.recursive && p.rhs.is_empty() {
            return Err(format!("recursive production {} must have children", p.op));
        }
    }

    // Productivity doubles as min-depth computation: iterate to a fix point
    // where depth(nt) = 1 + min over productions of max child depth.
    let mut min_depth: BTreeMap<String, usize> = BTreeMap::new();
    loop {
        let mut changed = false;
        for p in &productions {
            let child_depth = p
                .rhs
                .iter()
                .map(|c| min_depth.get(c).copied())
                .collect::<Option<Vec<_>>>()
                .map(|ds| ds.into_iter().max().unwrap_or(0));
            if let Some(d) = child_depth {
                let cand = d + 1;
                let cur = min_depth.get(&p.lhs).copied();
                if cur.is_none() || cand < cur.unwrap() {
                    min_depth.insert(p.lhs.clone(), cand);
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    for name in nonterminals.keys() {
        if !min_depth.contains_key(name) {
            return Err(format!("nonterminal {name} cannot derive any finite term"));
        }
    }

    Ok(Grammar { nonterminals, productions, start, min_depth })
}
