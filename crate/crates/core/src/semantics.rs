//! Semantic rules and their evaluation.
//!
//! A rule for a production `A0 -> op(A1..An)` names, per child, a flow
//! function computing that child's input from the production input and
//! earlier children's outputs, plus an output function and an optional
//! guard. Recursive rules (loops) come as a pair sharing a prefix of the
//! children: the non-recursive rule fires when the branch predicate is
//! false and may only mention the shared prefix, the recursive rule fires
//! when it is true and additionally feeds a self-call.
//!
//! Consistency of a candidate rule with an example is decided by forward
//! evaluation: flows are deterministic and summaries are functional, so
//! there is exactly one way to satisfy the rule body on a given input, and
//! walking it forward either produces the expected output or a concrete
//! witness against the candidate.

use crate::example::{Example, Summaries};
use crate::grammar::{Grammar, Production};
use crate::interp::{interpret, Budget, Fault, InterpreterResult, LanguageBundle};
use crate::term::{term_nonterminal, Term};
use crate::value::{Scalar, Value, ValueType};
use std::collections::BTreeSet;
use std::fmt;

/// Cap on summary-completion rounds per example, and on the length of a
/// recursive rule's self-call chain while checking consistency. A candidate
/// that keeps generating fresh child inputs past this bound is chasing a
/// diverging data flow and gets rejected.
pub const CHASE_CAP: usize = 64;

/// Scalar expressions over the production input `x0` and child outputs
/// `y1..yn` (slot `n+1` is the recursive self-call's output). Tuple-typed
/// variables are accessed one component at a time.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Expr {
    ConstInt(i64),
    ConstBool(bool),
    VarIn0,
    VarIn0Comp(usize),
    VarOut(usize),
    VarOutComp(usize, usize),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Ite(Box<Expr>, Box<Expr>, Box<Expr>),
    Lt(Box<Expr>, Box<Expr>),
    Le(Box<Expr>, Box<Expr>),
    EqE(Box<Expr>, Box<Expr>),
    Not(Box<Expr>),
    And(Box<Expr>, Box<Expr>),
    Or(Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn size(&self) -> usize {
        match self {
            Expr::ConstInt(_)
            | Expr::ConstBool(_)
            | Expr::VarIn0
            | Expr::VarIn0Comp(_)
            | Expr::VarOut(_)
            | Expr::VarOutComp(_, _) => 1,
            Expr::Not(a) => 1 + a.size(),
            Expr::Add(a, b)
            | Expr::Sub(a, b)
            | Expr::Mul(a, b)
            | Expr::Div(a, b)
            | Expr::Lt(a, b)
            | Expr::Le(a, b)
            | Expr::EqE(a, b)
            | Expr::And(a, b)
            | Expr::Or(a, b) => 1 + a.size() + b.size(),
            Expr::Ite(c, a, b) => 1 + c.size() + a.size() + b.size(),
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::ConstInt(n) => write!(f, "{n}"),
            Expr::ConstBool(b) => write!(f, "{b}"),
            Expr::VarIn0 => write!(f, "x0"),
            Expr::VarIn0Comp(i) => write!(f, "(comp x0 {i})"),
            Expr::VarOut(j) => write!(f, "y{j}"),
            Expr::VarOutComp(j, i) => write!(f, "(comp y{j} {i})"),
            Expr::Add(a, b) => write!(f, "(+ {a} {b})"),
            Expr::Sub(a, b) => write!(f, "(- {a} {b})"),
            Expr::Mul(a, b) => write!(f, "(* {a} {b})"),
            Expr::Div(a, b) => write!(f, "(div {a} {b})"),
            Expr::Ite(c, a, b) => write!(f, "(ite {c} {a} {b})"),
            Expr::Lt(a, b) => write!(f, "(< {a} {b})"),
            Expr::Le(a, b) => write!(f, "(<= {a} {b})"),
            Expr::EqE(a, b) => write!(f, "(= {a} {b})"),
            Expr::Not(a) => write!(f, "(not {a})"),
            Expr::And(a, b) => write!(f, "(and {a} {b})"),
            Expr::Or(a, b) => write!(f, "(or {a} {b})"),
        }
    }
}

/// Checked 64-bit arithmetic shared by rule evaluation and the bundled
/// interpreters, so both sides fault identically on overflow and
/// division by zero.
pub fn int_add(a: i64, b: i64) -> Result<i64, Fault> {
    a.checked_add(b).ok_or(Fault::Stuck)
}
pub fn int_sub(a: i64, b: i64) -> Result<i64, Fault> {
    a.checked_sub(b).ok_or(Fault::Stuck)
}
pub fn int_mul(a: i64, b: i64) -> Result<i64, Fault> {
    a.checked_mul(b).ok_or(Fault::Stuck)
}
pub fn int_div(a: i64, b: i64) -> Result<i64, Fault> {
    a.checked_div(b).ok_or(Fault::Stuck)
}

/// Variable assignment for one rule application: the production input plus
/// the child outputs bound so far (`outs[j-1]` holds `yj`; a recursive
/// rule's self-call output sits at slot `n+1`).
#[derive(Debug, Clone)]
pub struct Valuation {
    pub input: Value,
    pub outs: Vec<Option<Value>>,
}

impl Valuation {
    pub fn new(input: Value, slots: usize) -> Valuation {
        Valuation { input, outs: vec![None; slots] }
    }

    pub fn bind(&mut self, slot: usize, v: Value) {
        self.outs[slot - 1] = Some(v);
    }

    fn out(&self, slot: usize) -> &Value {
        self.outs
            .get(slot - 1)
            .and_then(Option::as_ref)
            .unwrap_or_else(|| panic!("expression references unbound child output y{slot}"))
    }
}

fn scalar_of(v: &Value, what: &str) -> Scalar {
    match v {
        Value::IntV(n) => Scalar::Int(*n),
        Value::BoolV(b) => Scalar::Bool(*b),
        Value::TupleV(_) => panic!("{what} is tuple-typed and must be accessed by component"),
    }
}

/// Evaluates a scalar expression. The condition of `ite` is evaluated
/// first and only the taken branch is touched, so a division in the dead
/// branch cannot fault. The only fault source is integer arithmetic.
pub fn eval_expr(e: &Expr, val: &Valuation) -> Result<Scalar, Fault> {
    fn int(e: &Expr, val: &Valuation) -> Result<i64, Fault> {
        match eval_expr(e, val)? {
            Scalar::Int(n) => Ok(n),
            Scalar::Bool(_) => panic!("boolean expression in integer position: {e}"),
        }
    }
    fn boolean(e: &Expr, val: &Valuation) -> Result<bool, Fault> {
        match eval_expr(e, val)? {
            Scalar::Bool(b) => Ok(b),
            Scalar::Int(_) => panic!("integer expression in boolean position: {e}"),
        }
    }
    match e {
        Expr::ConstInt(n) => Ok(Scalar::Int(*n)),
        Expr::ConstBool(b) => Ok(Scalar::Bool(*b)),
        Expr::VarIn0 => Ok(scalar_of(&val.input, "x0")),
        Expr::VarIn0Comp(i) => Ok(val
            .input
            .component(*i)
            .unwrap_or_else(|| panic!("x0 has no component {i}"))),
        Expr::VarOut(j) => Ok(scalar_of(val.out(*j), "y")),
        Expr::VarOutComp(j, i) => Ok(val
            .out(*j)
            .component(*i)
            .unwrap_or_else(|| panic!("y{j} has no component {i}"))),
        Expr::Add(a, b) => Ok(Scalar::Int(int_add(int(a, val)?, int(b, val)?)?)),
        Expr::Sub(a, b) => Ok(Scalar::Int(int_sub(int(a, val)?, int(b, val)?)?)),
        Expr::Mul(a, b) => Ok(Scalar::Int(int_mul(int(a, val)?, int(b, val)?)?)),
        Expr::Div(a, b) => Ok(Scalar::Int(int_div(int(a, val)?, int(b, val)?)?)),
        Expr::Ite(c, a, b) => {
            if boolean(c, val)? {
                eval_expr(a, val)
            } else {
                eval_expr(b, val)
            }
        }
        Expr::Lt(a, b) => Ok(Scalar::Bool(int(a, val)? < int(b, val)?)),
        Expr::Le(a, b) => Ok(Scalar::Bool(int(a, val)? <= int(b, val)?)),
        Expr::EqE(a, b) => Ok(Scalar::Bool(int(a, val)? == int(b, val)?)),
        Expr::Not(a) => Ok(Scalar::Bool(!boolean(a, val)?)),
        Expr::And(a, b) => Ok(Scalar::Bool(boolean(a, val)? && boolean(b, val)?)),
        Expr::Or(a, b) => Ok(Scalar::Bool(boolean(a, val)? || boolean(b, val)?)),
    }
}

pub(crate) fn eval_bool(e: &Expr, val: &Valuation) -> Result<bool, Fault> {
    match eval_expr(e, val)? {
        Scalar::Bool(b) => Ok(b),
        Scalar::Int(_) => panic!("guard expression is not boolean: {e}"),
    }
}

/// One scalar expression per component of the target value's type.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Flow {
    pub exprs: Vec<Expr>,
}

impl Flow {
    pub fn new(exprs: Vec<Expr>) -> Flow {
        Flow { exprs }
    }

    pub fn size(&self) -> usize {
        self.exprs.iter().map(Expr::size).sum()
    }

    pub fn eval(&self, ty: &ValueType, val: &Valuation) -> Result<Value, Fault> {
        let comps = self
            .exprs
            .iter()
            .map(|e| eval_expr(e, val))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Value::from_components(ty, &comps).expect("flow arity fixed at construction"))
    }
}

pub(crate) fn eval_output(exprs: &[Expr], ty: &ValueType, val: &Valuation) -> Result<Value, Fault> {
    let comps = exprs
        .iter()
        .map(|e| eval_expr(e, val))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Value::from_components(ty, &comps).expect("output arity fixed at construction"))
}

/// Single-rule form: every child is evaluated, in `perm` order, and one
/// output function produces the result. `guard` defaults to true.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SemanticConstraint {
    /// Evaluation order over child slots 1..n (a permutation).
    pub perm: Vec<usize>,
    /// Indexed by child slot - 1 (grammar order, not evaluation order).
    pub flows: Vec<Flow>,
    pub output: Vec<Expr>,
    pub guard: Expr,
}

/// Two-rule branching form: all children evaluated, then `guard` picks
/// which output applies. Emitted as a rule pair guarded by P and (not P).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GuardedConstraint {
    pub perm: Vec<usize>,
    pub flows: Vec<Flow>,
    pub guard: Expr,
    pub out_then: Vec<Expr>,
    pub out_else: Vec<Expr>,
}

/// Two-rule recursive form. The first `shared_len` children (in `perm`
/// order) belong to both rules; the branch predicate and the base output
/// may only mention those. When the predicate holds, the remaining
/// children are evaluated, the self-call input is computed by `self_flow`,
/// and `rec_out` may additionally use the self-call's output (slot n+1).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RecursiveConstraint {
    pub perm: Vec<usize>,
    pub shared_len: usize,
    pub flows: Vec<Flow>,
    pub guard_rec: Expr,
    pub nonrec_out: Vec<Expr>,
    pub self_flow: Flow,
    pub rec_out: Vec<Expr>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Constraint {
    Plain(SemanticConstraint),
    Guarded(GuardedConstraint),
    Recursive(RecursiveConstraint),
}

impl Constraint {
    /// Total node count over every expression in the constraint; the
    /// synthesizer minimizes this and reports it.
    pub fn size(&self) -> usize {
        fn flows(fs: &[Flow]) -> usize {
            fs.iter().map(Flow::size).sum()
        }
        fn outs(es: &[Expr]) -> usize {
            es.iter().map(Expr::size).sum()
        }
        match self {
            Constraint::Plain(c) => flows(&c.flows) + outs(&c.output) + c.guard.size(),
            Constraint::Guarded(c) => {
                flows(&c.flows) + c.guard.size() + outs(&c.out_then) + outs(&c.out_else)
            }
            Constraint::Recursive(c) => {
                flows(&c.flows)
                    + c.guard_rec.size()
                    + outs(&c.nonrec_out)
                    + c.self_flow.size()
                    + outs(&c.rec_out)
            }
        }
    }

    pub fn perm(&self) -> &[usize] {
        match self {
            Constraint::Plain(c) => &c.perm,
            Constraint::Guarded(c) => &c.perm,
            Constraint::Recursive(c) => &c.perm,
        }
    }
}

/// Learned rules for every production, keyed by (nonterminal, operator).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Semantics {
    pub rules: std::collections::BTreeMap<(String, String), Constraint>,
}

impl Semantics {
    pub fn new() -> Semantics {
        Semantics::default()
    }

    pub fn insert(&mut self, p: &Production, c: Constraint) {
        self.rules.insert((p.lhs.clone(), p.op.clone()), c);
    }

    pub fn get(&self, p: &Production) -> Option<&Constraint> {
        self.rules.get(&(p.lhs.clone(), p.op.clone()))
    }

    pub fn is_total(&self, g: &Grammar) -> bool {
        g.productions.iter().all(|p| self.get(p).is_some())
    }
}

/// Input and output types of a production and its children, precomputed so
/// evaluation code does not keep hitting the grammar maps.
#[derive(Debug, Clone)]
pub struct ProductionTypes {
    pub input: ValueType,
    pub output: ValueType,
    pub child_inputs: Vec<ValueType>,
    pub child_outputs: Vec<ValueType>,
}

impl ProductionTypes {
    pub fn of(g: &Grammar, p: &Production) -> ProductionTypes {
        let lhs = &g.nonterminals[&p.lhs];
        ProductionTypes {
            input: lhs.input_type.clone(),
            output: lhs.output_type.clone(),
            child_inputs: p.rhs.iter().map(|c| g.nonterminals[c].input_type.clone()).collect(),
            child_outputs: p.rhs.iter().map(|c| g.nonterminals[c].output_type.clone()).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub input: Value,
    pub child_outputs: Vec<Option<Value>>,
    pub expected: Value,
    /// None when evaluation faulted instead of producing a wrong value.
    pub produced: Option<Value>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConsistencyVerdict {
    Consistent,
    Inconsistent(Witness),
    /// A flow routed `input` into child `slot`, and that child's summary
    /// has no entry for it yet.
    SummaryMiss { slot: usize, input: Value },
    /// The candidate cannot be the semantics: it routes a known-good
    /// example into a poisoned input, a cyclic self-call chain, or an
    /// unbounded data-flow chase.
    CandidateRejected(String),
}

/// Looks up a child output, distinguishing a plain miss from a poisoned
/// input that dooms the candidate outright.
fn child_output(
    summaries: &Summaries,
    term: &Term,
    slot: usize,
    input: &Value,
) -> Result<Value, ConsistencyVerdict> {
    if summaries.is_poisoned(term, input) {
        return Err(ConsistencyVerdict::CandidateRejected(format!(
            "flow routes child {slot} to input {input}, on which the child faults or diverges"
        )));
    }
    match summaries.lookup(term, input) {
        Some(out) => Ok(out.clone()),
        None => Err(ConsistencyVerdict::SummaryMiss { slot, input: input.clone() }),
    }
}

/// Evaluates the flows for the permuted child slots `perm[from..to]`,
/// binding outputs into `val` as it goes.
fn eval_child_range(
    perm: &[usize],
    from: usize,
    to: usize,
    flows: &[Flow],
    types: &ProductionTypes,
    term: &Term,
    summaries: &Summaries,
    val: &mut Valuation,
    witness: &dyn Fn(&Valuation) -> Witness,
) -> Result<(), ConsistencyVerdict> {
    for &slot in &perm[from..to] {
        let x = match flows[slot - 1].eval(&types.child_inputs[slot - 1], val) {
            Ok(x) => x,
            Err(_) => return Err(ConsistencyVerdict::Inconsistent(witness(val))),
        };
        let child = &term.children[slot - 1];
        let y = child_output(summaries, child, slot, &x)?;
        val.bind(slot, y);
    }
    Ok(())
}

/// Decides whether a candidate rule is consistent with one example, given
/// summary tables for the child terms. Recursive rules are checked by
/// unrolling the self-call chain (child outputs still come from
/// summaries); a chain that revisits an input or outruns [`CHASE_CAP`]
/// rejects the candidate, since a terminating example cannot need one.
pub fn check_consistent(
    c: &Constraint,
    ex: &Example,
    summaries: &Summaries,
    g: &Grammar,
    p: &Production,
) -> ConsistencyVerdict {
    let types = ProductionTypes::of(g, p);
    let n = p.arity();
    match c {
        Constraint::Plain(sc) => {
            let mut val = Valuation::new(ex.input.clone(), n);
            let expected = ex.output.clone();
            let wit = |val: &Valuation| Witness {
                input: val.input.clone(),
                child_outputs: val.outs.clone(),
                expected: expected.clone(),
                produced: None,
            };
            if let Err(v) =
                eval_child_range(&sc.perm, 0, n, &sc.flows, &types, &ex.term, summaries, &mut val, &wit)
            {
                return v;
            }
            match eval_bool(&sc.guard, &val) {
                Ok(true) => {}
                // A rule whose guard fails on a known-good example leaves
                // that example underivable.
                Ok(false) | Err(_) => return ConsistencyVerdict::Inconsistent(wit(&val)),
            }
            match eval_output(&sc.output, &types.output, &val) {
                Ok(out) if out == ex.output => ConsistencyVerdict::Consistent,
                Ok(out) => ConsistencyVerdict::Inconsistent(Witness { produced: Some(out), ..wit(&val) }),
                Err(_) => ConsistencyVerdict::Inconsistent(wit(&val)),
            }
        }
        Constraint::Guarded(gc) => {
            let mut val = Valuation::new(ex.input.clone(), n);
            let expected = ex.output.clone();
            let wit = |val: &Valuation| Witness {
                input: val.input.clone(),
                child_outputs: val.outs.clone(),
                expected: expected.clone(),
                produced: None,
            };
            if let Err(v) =
                eval_child_range(&gc.perm, 0, n, &gc.flows, &types, &ex.term, summaries, &mut val, &wit)
            {
                return v;
            }
            let branch = match eval_bool(&gc.guard, &val) {
                Ok(b) => b,
                Err(_) => return ConsistencyVerdict::Inconsistent(wit(&val)),
            };
            let out_exprs = if branch { &gc.out_then } else { &gc.out_else };
            match eval_output(out_exprs, &types.output, &val) {
                Ok(out) if out == ex.output => ConsistencyVerdict::Consistent,
                Ok(out) => ConsistencyVerdict::Inconsistent(Witness { produced: Some(out), ..wit(&val) }),
                Err(_) => ConsistencyVerdict::Inconsistent(wit(&val)),
            }
        }
        Constraint::Recursive(rc) => check_recursive(rc, ex, summaries, g, p, &types, n),
    }
}

/// One unrolled level of a recursive rule: the valuation after evaluating
/// the applicable children, and what the branch decided.
enum Level {
    Base { val: Valuation },
    Rec { val: Valuation, next_input: Value },
}

fn eval_level(
    rc: &RecursiveConstraint,
    input: &Value,
    term: &Term,
    summaries: &Summaries,
    types: &ProductionTypes,
    n: usize,
    expected: &Value,
) -> Result<Level, ConsistencyVerdict> {
    let mut val = Valuation::new(input.clone(), n + 1);
    let expected = expected.clone();
    let wit = move |val: &Valuation| Witness {
        input: val.input.clone(),
        child_outputs: val.outs.clone(),
        expected: expected.clone(),
        produced: None,
    };
    eval_child_range(&rc.perm, 0, rc.shared_len, &rc.flows, types, term, summaries, &mut val, &wit)?;
    let recurse = match eval_bool(&rc.guard_rec, &val) {
        Ok(b) => b,
        Err(_) => return Err(ConsistencyVerdict::Inconsistent(wit(&val))),
    };
    if !recurse {
        return Ok(Level::Base { val });
    }
    eval_child_range(&rc.perm, rc.shared_len, n, &rc.flows, types, term, summaries, &mut val, &wit)?;
    let next_input = match rc.self_flow.eval(&types.input, &val) {
        Ok(x) => x,
        Err(_) => return Err(ConsistencyVerdict::Inconsistent(wit(&val))),
    };
    Ok(Level::Rec { val, next_input })
}

fn check_recursive(
    rc: &RecursiveConstraint,
    ex: &Example,
    summaries: &Summaries,
    _g: &Grammar,
    _p: &Production,
    types: &ProductionTypes,
    n: usize,
) -> ConsistencyVerdict {
    let mut visited: BTreeSet<Value> = BTreeSet::new();
    let mut stack: Vec<Valuation> = Vec::new();
    let mut input = ex.input.clone();
    let base_val = loop {
        if !visited.insert(input.clone()) {
            return ConsistencyVerdict::CandidateRejected(format!(
                "self-call chain revisits input {input}"
            ));
        }
        if visited.len() > CHASE_CAP {
            return ConsistencyVerdict::CandidateRejected(format!(
                "self-call chain exceeds {CHASE_CAP} levels"
            ));
        }
        match eval_level(rc, &input, &ex.term, summaries, types, n, &ex.output) {
            Ok(Level::Base { val }) => break val,
            Ok(Level::Rec { val, next_input }) => {
                stack.push(val);
                input = next_input;
            }
            Err(v) => return v,
        }
    };
    let wit = |val: &Valuation, produced: Option<Value>| Witness {
        input: val.input.clone(),
        child_outputs: val.outs.clone(),
        expected: ex.output.clone(),
        produced,
    };
    let mut y = match eval_output(&rc.nonrec_out, &types.output, &base_val) {
        Ok(v) => v,
        Err(_) => return ConsistencyVerdict::Inconsistent(wit(&base_val, None)),
    };
    while let Some(mut val) = stack.pop() {
        val.bind(n + 1, y);
        y = match eval_output(&rc.rec_out, &types.output, &val) {
            Ok(v) => v,
            Err(_) => return ConsistencyVerdict::Inconsistent(wit(&val, None)),
        };
    }
    if y == ex.output {
        ConsistencyVerdict::Consistent
    } else {
        let top = Valuation::new(ex.input.clone(), n + 1);
        ConsistencyVerdict::Inconsistent(wit(&top, Some(y)))
    }
}

/// Resolves summary misses by asking the interpreter, until the candidate's
/// verdict on every example settles to Consistent or Inconsistent.
///
/// Each filled entry is a fresh interpreter-consistent fact; inputs the
/// interpreter cannot finish are marked poisoned, which rejects any
/// candidate that routes an example into them. A candidate needing more
/// than [`CHASE_CAP`] fills on one example is chasing a diverging flow and
/// is rejected. Returns the verdicts in example order.
pub fn complete_summaries(
    c: &Constraint,
    examples: &[&Example],
    summaries: &mut Summaries,
    b: &LanguageBundle,
    limit: u64,
    g: &Grammar,
    p: &Production,
) -> Result<Vec<ConsistencyVerdict>, String> {
    let mut verdicts = Vec::with_capacity(examples.len());
    for ex in examples {
        let mut fills = 0usize;
        let verdict = loop {
            match check_consistent(c, ex, summaries, g, p) {
                ConsistencyVerdict::SummaryMiss { slot, input } => {
                    if fills >= CHASE_CAP {
                        return Err(format!(
                            "data-flow chase on {ex} exceeded {CHASE_CAP} summary fills"
                        ));
                    }
                    fills += 1;
                    let child = &ex.term.children[slot - 1];
                    match interpret(b, child, &input, limit) {
                        InterpreterResult::Ok(out) => {
                            summaries.insert(child, input, out).map_err(|e| e.to_string())?;
                        }
                        _ => {
                            summaries.mark_poisoned(child, input.clone());
                            return Err(format!(
                                "candidate routes child {slot} of {} to input on which it faults",
                                ex.term
                            ));
                        }
                    }
                }
                ConsistencyVerdict::CandidateRejected(why) => return Err(why),
                settled => break settled,
            }
        };
        verdicts.push(verdict);
    }
    Ok(verdicts)
}

/// Evaluates learned rules top-down, recursing into children along the
/// flows; the budget meters recursive self-calls exactly like the bundled
/// interpreters meter loop iterations.
pub fn eval_semantics(sem: &Semantics, t: &Term, input: &Value, limit: u64, g: &Grammar) -> InterpreterResult {
    let nt = match term_nonterminal(t, g) {
        Ok(nt) => nt.name.clone(),
        Err(_) => return InterpreterResult::Stuck,
    };
    let mut budget = Budget::new(limit);
    match eval_node(sem, t, &nt, input, g, &mut budget) {
        Ok(v) => InterpreterResult::Ok(v),
        Err(Fault::Nontermination) => InterpreterResult::Nontermination,
        Err(Fault::Stuck) => InterpreterResult::Stuck,
    }
}

fn eval_node(
    sem: &Semantics,
    t: &Term,
    nt: &str,
    input: &Value,
    g: &Grammar,
    budget: &mut Budget,
) -> Result<Value, Fault> {
    let p = g
        .production(nt, &t.op)
        .unwrap_or_else(|| panic!("no production for {} under {nt}", t.op));
    let c = sem
        .rules
        .get(&(p.lhs.clone(), p.op.clone()))
        .unwrap_or_else(|| panic!("semantics has no rule for {}::{}", p.lhs, p.op));
    let types = ProductionTypes::of(g, p);
    let n = p.arity();

    let eval_children = |perm: &[usize],
                         from: usize,
                         to: usize,
                         flows: &[Flow],
                         val: &mut Valuation,
                         budget: &mut Budget|
     -> Result<(), Fault> {
        for &slot in &perm[from..to] {
            let x = flows[slot - 1].eval(&types.child_inputs[slot - 1], val)?;
            let y = eval_node(sem, &t.children[slot - 1], &p.rhs[slot - 1], &x, g, budget)?;
            val.bind(slot, y);
        }
        Ok(())
    };

    match c {
        Constraint::Plain(sc) => {
            let mut val = Valuation::new(input.clone(), n);
            eval_children(&sc.perm, 0, n, &sc.flows, &mut val, budget)?;
            if !eval_bool(&sc.guard, &val)? {
                return Err(Fault::Stuck);
            }
            eval_output(&sc.output, &types.output, &val)
        }
        Constraint::Guarded(gc) => {
            let mut val = Valuation::new(input.clone(), n);
            eval_children(&gc.perm, 0, n, &gc.flows, &mut val, budget)?;
            let outs = if eval_bool(&gc.guard, &val)? { &gc.out_then } else { &gc.out_else };
            eval_output(outs, &types.output, &val)
        }
        Constraint::Recursive(rc) => {
            let mut input = input.clone();
            let mut stack: Vec<Valuation> = Vec::new();
            let base = loop {
                let mut val = Valuation::new(input.clone(), n + 1);
                eval_children(&rc.perm, 0, rc.shared_len, &rc.flows, &mut val, budget)?;
                if !eval_bool(&rc.guard_rec, &val)? {
                    break eval_output(&rc.nonrec_out, &types.output, &val)?;
                }
                eval_children(&rc.perm, rc.shared_len, n, &rc.flows, &mut val, budget)?;
                let next = rc.self_flow.eval(&types.input, &val)?;
                budget.consume()?;
                stack.push(val);
                input = next;
            };
            let mut y = base;
            while let Some(mut val) = stack.pop() {
                val.bind(n + 1, y);
                y = eval_output(&rc.rec_out, &types.output, &val)?;
            }
            Ok(y)
        }
    }
}

pub fn identity_perm(n: usize) -> Vec<usize> {
    (1..=n).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::load_grammar;
    use crate::value::Value;

    fn v(n: i64) -> Value {
        Value::int(n)
    }

    #[test]
    fn output_sum_of_children() {
        let val = Valuation { input: v(0), outs: vec![Some(v(1)), Some(v(1))] };
        let e = Expr::Add(Box::new(Expr::VarOut(1)), Box::new(Expr::VarOut(2)));
        assert_eq!(eval_expr(&e, &val).unwrap(), Scalar::Int(2));
    }

    #[test]
    fn ite_picks_taken_branch() {
        let val = Valuation::new(v(5), 0);
        let e = Expr::Ite(
            Box::new(Expr::ConstBool(true)),
            Box::new(Expr::VarIn0),
            Box::new(Expr::ConstInt(0)),
        );
        assert_eq!(eval_expr(&e, &val).unwrap(), Scalar::Int(5));
    }

    #[test]
    fn division_by_zero_faults() {
        let val = Valuation::new(v(3), 0);
        let e = Expr::Div(
            Box::new(Expr::ConstInt(1)),
            Box::new(Expr::Sub(Box::new(Expr::VarIn0), Box::new(Expr::VarIn0))),
        );
        assert_eq!(eval_expr(&e, &val), Err(Fault::Stuck));
    }

    #[test]
    fn dead_branch_division_ignored() {
        let val = Valuation::new(v(3), 0);
        let e = Expr::Ite(
            Box::new(Expr::ConstBool(true)),
            Box::new(Expr::VarIn0),
            Box::new(Expr::Div(Box::new(Expr::ConstInt(1)), Box::new(Expr::ConstInt(0)))),
        );
        assert_eq!(eval_expr(&e, &val).unwrap(), Scalar::Int(3));
    }

    fn mini_arith() -> Grammar {
        load_grammar(
            "(grammar
               (nt E :in int :out int)
               (prod E var ())
               (prod E lit1 ())
               (prod E plus (E E))
               (start E))",
        )
        .unwrap()
    }

    fn plain(perm: Vec<usize>, flows: Vec<Flow>, output: Vec<Expr>) -> Constraint {
        Constraint::Plain(SemanticConstraint { perm, flows, output, guard: Expr::ConstBool(true) })
    }

    #[test]
    fn forward_evaluation_accepts_matching_rule() {
        let g = mini_arith();
        let p = g.production("E", "plus").unwrap();
        let c = plain(
            identity_perm(2),
            vec![Flow::new(vec![Expr::VarIn0]), Flow::new(vec![Expr::VarIn0])],
            vec![Expr::Add(Box::new(Expr::VarOut(1)), Box::new(Expr::VarOut(2)))],
        );
        let term = Term::new("plus", vec![Term::leaf("var"), Term::leaf("lit1")]);
        let ex = Example::new(v(0), term.clone(), v(1));
        let mut s = Summaries::new();
        s.insert(&Term::leaf("var"), v(0), v(0)).unwrap();
        s.insert(&Term::leaf("lit1"), v(0), v(1)).unwrap();
        assert_eq!(check_consistent(&c, &ex, &s, &g, p), ConsistencyVerdict::Consistent);
    }

    #[test]
    fn constant_output_rejected_with_witness() {
        let g = load_grammar(
            "(grammar (nt E :in int :out int) (prod E lit0 ()) (start E))",
        )
        .unwrap();
        let p = g.production("E", "lit0").unwrap();
        let c = plain(vec![], vec![], vec![Expr::ConstInt(1)]);
        let ex = Example::new(v(0), Term::leaf("lit0"), v(0));
        match check_consistent(&c, &ex, &Summaries::new(), &g, p) {
            ConsistencyVerdict::Inconsistent(w) => {
                assert_eq!(w.expected, v(0));
                assert_eq!(w.produced, Some(v(1)));
            }
            other => panic!("expected a witness, got {other:?}"),
        }
    }

    #[test]
    fn missing_summary_entry_reported_with_slot_and_input() {
        // Statement mini-language: set1 writes 1, set0 writes 0; sequencing
        // threads the state left to right.
        let g = load_grammar(
            "(grammar
               (nt S :in int :out int)
               (prod S set0 ())
               (prod S set1 ())
               (prod S seq (S S))
               (start S))",
        )
        .unwrap();
        let p = g.production("S", "seq").unwrap();
        let c = plain(
            identity_perm(2),
            vec![Flow::new(vec![Expr::VarIn0]), Flow::new(vec![Expr::VarOut(1)])],
            vec![Expr::VarOut(2)],
        );
        let term = Term::new("seq", vec![Term::leaf("set1"), Term::leaf("set0")]);
        let ex = Example::new(v(0), term, v(0));
        let mut s = Summaries::new();
        s.insert(&Term::leaf("set1"), v(0), v(1)).unwrap();
        s.insert(&Term::leaf("set0"), v(0), v(0)).unwrap();
        assert_eq!(
            check_consistent(&c, &ex, &s, &g, p),
            ConsistencyVerdict::SummaryMiss { slot: 2, input: v(1) }
        );
    }

    // Loop mini-language over an integer counter: (loop) recurses while the
    // counter is positive, decrementing it.
    fn loop_grammar() -> Grammar {
        load_grammar(
            "(grammar
               (nt L :in int :out int)
               (nt G :in int :out bool)
               (prod G pos ())
               (prod L spin (G) :recursive)
               (start L))",
        )
        .unwrap()
    }

    fn loop_eval(t: &Term, input: &Value, budget: &mut Budget) -> Result<Value, Fault> {
        match t.op.as_str() {
            "pos" => Ok(Value::bool(input.as_int() > 0)),
            "spin" => {
                let mut n = input.as_int();
                while n > 0 {
                    budget.consume()?;
                    n -= 1;
                }
                Ok(Value::int(n))
            }
            other => panic!("unknown op {other}"),
        }
    }

    trait IntOf {
        fn as_int(&self) -> i64;
    }
    impl IntOf for Value {
        fn as_int(&self) -> i64 {
            match self {
                Value::IntV(n) => *n,
                other => panic!("expected int, got {other}"),
            }
        }
    }

    fn countdown_rule() -> Constraint {
        Constraint::Recursive(RecursiveConstraint {
            perm: identity_perm(1),
            shared_len: 1,
            flows: vec![Flow::new(vec![Expr::VarIn0])],
            guard_rec: Expr::VarOut(1),
            nonrec_out: vec![Expr::VarIn0],
            self_flow: Flow::new(vec![Expr::Sub(Box::new(Expr::VarIn0), Box::new(Expr::ConstInt(1)))]),
            rec_out: vec![Expr::VarOut(2)],
        })
    }

    #[test]
    fn recursive_rule_checks_by_unrolling() {
        let g = loop_grammar();
        let p = g.production("L", "spin").unwrap();
        let term = Term::new("spin", vec![Term::leaf("pos")]);
        let ex = Example::new(v(2), term.clone(), v(0));
        let mut s = Summaries::new();
        for n in [0, 1, 2] {
            s.insert(&Term::leaf("pos"), v(n), Value::bool(n > 0)).unwrap();
        }
        assert_eq!(check_consistent(&countdown_rule(), &ex, &s, &g, p), ConsistencyVerdict::Consistent);
    }

    #[test]
    fn identity_self_flow_is_rejected_not_consistent() {
        let g = loop_grammar();
        let p = g.production("L", "spin").unwrap();
        let term = Term::new("spin", vec![Term::leaf("pos")]);
        let ex = Example::new(v(2), term, v(0));
        let mut s = Summaries::new();
        s.insert(&Term::leaf("pos"), v(2), Value::bool(true)).unwrap();
        let degenerate = Constraint::Recursive(RecursiveConstraint {
            perm: identity_perm(1),
            shared_len: 1,
            flows: vec![Flow::new(vec![Expr::VarIn0])],
            guard_rec: Expr::ConstBool(true),
            nonrec_out: vec![Expr::VarIn0],
            self_flow: Flow::new(vec![Expr::VarIn0]),
            rec_out: vec![Expr::VarOut(2)],
        });
        match check_consistent(&degenerate, &ex, &s, &g, p) {
            ConsistencyVerdict::CandidateRejected(why) => assert!(why.contains("revisits"), "{why}"),
            other => panic!("expected rejection, got {other:?}"),
        }
    }

    #[test]
    fn summary_fills_come_from_the_interpreter() {
        let g = loop_grammar();
        let p = g.production("L", "spin").unwrap();
        let b = LanguageBundle::new("loop", loop_grammar(), loop_eval, None);
        let term = Term::new("spin", vec![Term::leaf("pos")]);
        let ex = Example::new(v(3), term, v(0));
        let mut s = Summaries::new();
        let verdicts =
            complete_summaries(&countdown_rule(), &[&ex], &mut s, &b, 100, &g, p).unwrap();
        assert_eq!(verdicts, vec![ConsistencyVerdict::Consistent]);
        // The chase should have filled the guard's summary for 3,2,1,0.
        assert_eq!(s.entry_count(&Term::leaf("pos")), 4);
    }

    #[test]
    fn diverging_flow_chase_is_rejected() {
        let g = loop_grammar();
        let p = g.production("L", "spin").unwrap();
        let b = LanguageBundle::new("loop", loop_grammar(), loop_eval, None);
        let term = Term::new("spin", vec![Term::leaf("pos")]);
        let ex = Example::new(v(3), term, v(0));
        let runaway = Constraint::Recursive(RecursiveConstraint {
            perm: identity_perm(1),
            shared_len: 1,
            flows: vec![Flow::new(vec![Expr::VarIn0])],
            guard_rec: Expr::ConstBool(true),
            nonrec_out: vec![Expr::VarIn0],
            self_flow: Flow::new(vec![Expr::Add(Box::new(Expr::VarIn0), Box::new(Expr::ConstInt(1)))]),
            rec_out: vec![Expr::VarOut(2)],
        });
        let mut s = Summaries::new();
        let err = complete_summaries(&runaway, &[&ex], &mut s, &b, 100, &g, p).unwrap_err();
        assert!(err.contains("exceeded") || err.contains("exceeds"), "{err}");
    }

    #[test]
    fn nullary_completion_touches_nothing() {
        let g = load_grammar("(grammar (nt E :in int :out int) (prod E k ()) (start E))").unwrap();
        let p = g.production("E", "k").unwrap();
        fn konst(_: &Term, _: &Value, _: &mut Budget) -> Result<Value, Fault> {
            Ok(Value::int(7))
        }
        let b = LanguageBundle::new("k", g.clone(), konst, None);
        let c = plain(vec![], vec![], vec![Expr::ConstInt(7)]);
        let ex = Example::new(v(0), Term::leaf("k"), v(7));
        let mut s = Summaries::new();
        let verdicts = complete_summaries(&c, &[&ex], &mut s, &b, 10, &g, p).unwrap();
        assert_eq!(verdicts, vec![ConsistencyVerdict::Consistent]);
        assert_eq!(s.entry_count(&Term::leaf("k")), 0);
    }

    #[test]
    fn learned_rules_execute_top_down() {
        let g = loop_grammar();
        let mut sem = Semantics::new();
        sem.insert(
            g.production("G", "pos").unwrap(),
            plain(vec![], vec![], vec![Expr::Lt(Box::new(Expr::ConstInt(0)), Box::new(Expr::VarIn0))]),
        );
        sem.insert(g.production("L", "spin").unwrap(), countdown_rule());
        let term = Term::new("spin", vec![Term::leaf("pos")]);
        assert_eq!(eval_semantics(&sem, &term, &v(5), 100, &g), InterpreterResult::Ok(v(0)));
        assert_eq!(eval_semantics(&sem, &term, &v(-2), 100, &g), InterpreterResult::Ok(v(-2)));
    }

    #[test]
    fn zero_budget_recursion_reports_nontermination() {
        let g = loop_grammar();
        let mut sem = Semantics::new();
        sem.insert(
            g.production("G", "pos").unwrap(),
            plain(vec![], vec![], vec![Expr::Lt(Box::new(Expr::ConstInt(0)), Box::new(Expr::VarIn0))]),
        );
        sem.insert(g.production("L", "spin").unwrap(), countdown_rule());
        let term = Term::new("spin", vec![Term::leaf("pos")]);
        assert_eq!(eval_semantics(&sem, &term, &v(5), 0, &g), InterpreterResult::Nontermination);
        // The base case spends no budget.
        assert_eq!(eval_semantics(&sem, &term, &v(0), 0, &g), InterpreterResult::Ok(v(0)));
    }

    #[test]
    fn constraint_size_counts_every_expression() {
        let c = countdown_rule();
        // flows: 1, guard: 1, nonrec_out: 1, self_flow: 3, rec_out: 1.
        assert_eq!(c.size(), 7);
    }
}
