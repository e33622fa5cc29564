//! Fuzzing-based approximate equivalence check for candidate rules.
//!
//! A candidate that survives synthesis explains every example seen so far,
//! which says nothing about inputs it has never met. `verify` samples fresh
//! (term, input) pairs rooted at the candidate's production, evaluates the
//! rule forward (children answered by the interpreter, self-calls by the
//! rule itself), and compares against the interpreter. The first
//! disagreement comes back as a [`CexBundle`]: the failing root example
//! plus every child summary gathered while evaluating it, so the caller
//! can enlarge its example set and reject the same candidate next round.
//!
//! Sampled pairs the interpreter cannot finish are discarded, as are pairs
//! where the rule routes a child to an input the interpreter cannot finish:
//! on those the reference behavior is unknown, so they prove nothing either
//! way. A fault inside the rule itself (expression fault, non-boolean
//! guard, self-call chain that never bottoms out) is a refutation, since
//! the interpreter did finish on the root.

use std::collections::BTreeSet;

use rand_chacha::ChaCha12Rng;

use crate::example::{Example, Summaries};
use crate::grammar::Production;
use crate::interp::{
    gen_input, gen_term, interpret, FuzzConfig, InterpreterResult, LanguageBundle, LearnedSet,
};
use crate::semantics::{
    check_consistent, eval_expr, ConsistencyVerdict, Constraint, GuardedConstraint,
    ProductionTypes, RecursiveConstraint, SemanticConstraint, Valuation,
};
use crate::term::Term;
use crate::value::{Scalar, Value};

/// A failing sample and the facts needed to refute the candidate on it.
///
/// `root` is interpreter-consistent; each child summary was produced by the
/// interpreter on an input the candidate's own flows chose. Re-checking the
/// candidate against exactly these facts cannot come out Consistent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CexBundle {
    pub root: Example,
    pub child_summaries: Vec<Example>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyReport {
    pub cex: Option<CexBundle>,
    /// Samples on which the interpreter finished, i.e. the pairs that
    /// actually tested the candidate. Zero means the run proved nothing.
    pub covered: usize,
    /// Samples drawn before stopping.
    pub sampled: usize,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.cex.is_none()
    }
}

/// Outcome of evaluating the candidate on one sampled pair.
enum Step {
    /// The rule produced a value.
    Got(Value),
    /// The rule faulted (bad flow, guard, output, or a bottomless
    /// self-call chain) even though the interpreter finished.
    CandidateFault,
    /// The rule routed a child to an input the interpreter cannot finish;
    /// the sample is uninformative and gets discarded.
    ChildGap,
}

/// Forward evaluation of one candidate on one term, children answered by
/// the interpreter. Every child answer is recorded so a refutation can
/// ship with its supporting facts.
struct Forward<'a> {
    b: &'a LanguageBundle,
    types: &'a ProductionTypes,
    limit: u64,
    support: Vec<Example>,
    seen: BTreeSet<(Term, Value)>,
}

impl<'a> Forward<'a> {
    fn new(b: &'a LanguageBundle, types: &'a ProductionTypes, limit: u64) -> Forward<'a> {
        Forward { b, types, limit, support: Vec::new(), seen: BTreeSet::new() }
    }

    /// Interpreter answer for one child, recorded into the support set.
    /// None means the interpreter could not finish there.
    fn child(&mut self, child: &Term, x: Value) -> Option<Value> {
        let y = match interpret(self.b, child, &x, self.limit) {
            InterpreterResult::Ok(y) => y,
            _ => return None,
        };
        if self.seen.insert((child.clone(), x.clone())) {
            self.support.push(Example::new(x, child.clone(), y.clone()));
        }
        Some(y)
    }

    /// Binds the outputs of `perm[from..to]` into `val`, returning early
    /// on a flow fault (candidate's problem) or interpreter gap.
    fn bind_range(
        &mut self,
        t: &Term,
        perm: &[usize],
        from: usize,
        to: usize,
        flows: &[crate::semantics::Flow],
        val: &mut Valuation,
    ) -> Result<(), Step> {
        for &slot in &perm[from..to] {
            let x = flows[slot - 1]
                .eval(&self.types.child_inputs[slot - 1], val)
                .map_err(|_| Step::CandidateFault)?;
            let y = self.child(&t.children[slot - 1], x).ok_or(Step::ChildGap)?;
            val.bind(slot, y);
        }
        Ok(())
    }

    fn outputs(&self, exprs: &[crate::semantics::Expr], val: &Valuation) -> Result<Value, Step> {
        let comps: Result<Vec<Scalar>, _> = exprs.iter().map(|e| eval_expr(e, val)).collect();
        comps
            .ok()
            .and_then(|cs| Value::from_components(&self.types.output, &cs).ok())
            .ok_or(Step::CandidateFault)
    }

    fn guard(&self, e: &crate::semantics::Expr, val: &Valuation) -> Result<bool, Step> {
        match eval_expr(e, val) {
            Ok(Scalar::Bool(b)) => Ok(b),
            _ => Err(Step::CandidateFault),
        }
    }

    fn plain(&mut self, sc: &SemanticConstraint, t: &Term, input: &Value) -> Step {
        let n = t.children.len();
        let mut val = Valuation::new(input.clone(), n);
        if let Err(s) = self.bind_range(t, &sc.perm, 0, n, &sc.flows, &mut val) {
            return s;
        }
        match self.guard(&sc.guard, &val) {
            Ok(true) => {}
            Ok(false) => return Step::CandidateFault,
            Err(s) => return s,
        }
        match self.outputs(&sc.output, &val) {
            Ok(y) => Step::Got(y),
            Err(s) => s,
        }
    }

    fn guarded(&mut self, gc: &GuardedConstraint, t: &Term, input: &Value) -> Step {
        let n = t.children.len();
        let mut val = Valuation::new(input.clone(), n);
        if let Err(s) = self.bind_range(t, &gc.perm, 0, n, &gc.flows, &mut val) {
            return s;
        }
        let outs = match self.guard(&gc.guard, &val) {
            Ok(true) => &gc.out_then,
            Ok(false) => &gc.out_else,
            Err(s) => return s,
        };
        match self.outputs(outs, &val) {
            Ok(y) => Step::Got(y),
            Err(s) => s,
        }
    }

    fn recursive(&mut self, rc: &RecursiveConstraint, t: &Term, input: &Value) -> Step {
        let n = t.children.len();
        let mut x = input.clone();
        let mut stack: Vec<Valuation> = Vec::new();
        let base = loop {
            if stack.len() as u64 >= self.limit {
                return Step::CandidateFault;
            }
            let mut val = Valuation::new(x.clone(), n + 1);
            if let Err(s) = self.bind_range(t, &rc.perm, 0, rc.shared_len, &rc.flows, &mut val) {
                return s;
            }
            match self.guard(&rc.guard_rec, &val) {
                Ok(false) => match self.outputs(&rc.nonrec_out, &val) {
                    Ok(y) => break y,
                    Err(s) => return s,
                },
                Ok(true) => {
                    if let Err(s) =
                        self.bind_range(t, &rc.perm, rc.shared_len, n, &rc.flows, &mut val)
                    {
                        return s;
                    }
                    match rc.self_flow.eval(&self.types.input, &val) {
                        Ok(next) => {
                            stack.push(val);
                            x = next;
                        }
                        Err(_) => return Step::CandidateFault,
                    }
                }
                Err(s) => return s,
            }
        };
        let mut y = base;
        while let Some(mut val) = stack.pop() {
            val.bind(n + 1, y);
            match self.outputs(&rc.rec_out, &val) {
                Ok(next) => y = next,
                Err(s) => return s,
            }
        }
        Step::Got(y)
    }

    fn run(&mut self, c: &Constraint, t: &Term, input: &Value) -> Step {
        match c {
            Constraint::Plain(sc) => self.plain(sc, t, input),
            Constraint::Guarded(gc) => self.guarded(gc, t, input),
            Constraint::Recursive(rc) => self.recursive(rc, t, input),
        }
    }
}

/// Samples `cfg.samples_per_check` random pairs rooted at `p` and returns
/// the first refutation, or a passing report. Deterministic in the rng
/// state: the same seed replays the same sample sequence and therefore the
/// same first counterexample.
pub fn verify(
    c: &Constraint,
    p: &Production,
    b: &LanguageBundle,
    cfg: &FuzzConfig,
    learned: &LearnedSet,
    rng: &mut ChaCha12Rng,
) -> VerifyReport {
    let types = ProductionTypes::of(&b.grammar, p);
    let mut covered = 0usize;
    for sampled in 1..=cfg.samples_per_check {
        let t = gen_term(&b.grammar, p, cfg, learned, rng);
        let input = gen_input(&types.input, cfg, rng);
        let truth = match interpret(b, &t, &input, cfg.recursion_limit) {
            InterpreterResult::Ok(v) => v,
            _ => continue,
        };
        covered += 1;
        let mut fwd = Forward::new(b, &types, cfg.recursion_limit);
        match fwd.run(c, &t, &input) {
            Step::Got(y) if y == truth => continue,
            Step::ChildGap => continue,
            Step::Got(_) | Step::CandidateFault => {
                let bundle = CexBundle {
                    root: Example::new(input, t, truth),
                    child_summaries: fwd.support,
                };
                debug_check_bundle(&bundle, c, p, b, cfg);
                return VerifyReport { cex: Some(bundle), covered, sampled };
            }
        }
    }
    VerifyReport { cex: None, covered, sampled: cfg.samples_per_check }
}

/// Every returned bundle must refute the candidate on its own: the triples
/// are interpreter facts, re-checking the candidate against exactly them
/// cannot come out Consistent, and the root is the bundle's only entry for
/// the production under test.
fn debug_check_bundle(
    bundle: &CexBundle,
    c: &Constraint,
    p: &Production,
    b: &LanguageBundle,
    cfg: &FuzzConfig,
) {
    if !cfg!(debug_assertions) {
        return;
    }
    for ex in std::iter::once(&bundle.root).chain(bundle.child_summaries.iter()) {
        let got = interpret(b, &ex.term, &ex.input, cfg.recursion_limit);
        assert_eq!(
            got.ok(),
            Some(&ex.output),
            "bundle triple is not an interpreter fact: {ex}"
        );
    }
    assert_eq!(bundle.root.term.op, p.op, "bundle root is not rooted at the production");
    assert!(
        bundle
            .child_summaries
            .iter()
            .all(|e| e.term != bundle.root.term || e.input != bundle.root.input),
        "bundle repeats its root among the child summaries"
    );
    let mut s = Summaries::new();
    for e in &bundle.child_summaries {
        s.insert(&e.term, e.input.clone(), e.output.clone())
            .expect("bundle contains conflicting summaries");
    }
    let verdict = check_consistent(c, &bundle.root, &s, &b.grammar, p);
    assert_ne!(
        verdict,
        ConsistencyVerdict::Consistent,
        "counterexample bundle fails to refute the candidate"
    );
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::langs::bundle;
    use crate::semantics::{Expr, Flow};
    use rand::SeedableRng;

    fn prod<'g>(g: &'g crate::grammar::Grammar, op: &str) -> &'g Production {
        g.productions.iter().find(|p| p.op == op).unwrap()
    }

    fn rng(seed: u64) -> ChaCha12Rng {
        ChaCha12Rng::seed_from_u64(seed)
    }

    #[test]
    fn wrong_constant_rule_is_refuted_at_the_leaf() {
        let b = bundle("int_arith").unwrap();
        let p = prod(&b.grammar, "lit0");
        let c = Constraint::Plain(SemanticConstraint {
            perm: vec![],
            flows: vec![],
            output: vec![Expr::ConstInt(1)],
            guard: Expr::ConstBool(true),
        });
        let cfg = FuzzConfig::default();
        let report = verify(&c, p, &b, &cfg, &LearnedSet::new(), &mut rng(1));
        let bundle = report.cex.expect("constant 1 cannot pass for the zero literal");
        assert_eq!(bundle.root.term.op, "lit0");
        assert_eq!(bundle.root.output, Value::int(0));
        assert!(bundle.child_summaries.is_empty());
        // Same seed, same first counterexample.
        let again = verify(&c, p, &b, &cfg, &LearnedSet::new(), &mut rng(1));
        assert_eq!(again.cex, Some(bundle));
    }

    #[test]
    fn faithful_rule_passes_heavy_fuzzing() {
        let b = bundle("int_arith").unwrap();
        let p = prod(&b.grammar, "plus");
        let golden = b.golden.as_ref().unwrap().get(p).unwrap().clone();
        let cfg = FuzzConfig::default();
        let report = verify(&golden, p, &b, &cfg, &LearnedSet::new(), &mut rng(7));
        assert!(report.passed(), "reference rule was refuted: {:?}", report.cex);
        assert!(report.covered > 0);
        assert_eq!(report.sampled, cfg.samples_per_check);
    }

    #[test]
    fn wrong_flow_is_exposed_by_child_summaries() {
        // Route the second child to the raw input instead of the first
        // child's output: y2 then computes x-1 where the truth is x-2.
        let b = bundle("imp1").unwrap();
        let p = prod(&b.grammar, "seq");
        let c = Constraint::Plain(SemanticConstraint {
            perm: vec![1, 2],
            flows: vec![Flow::new(vec![Expr::VarIn0]), Flow::new(vec![Expr::VarIn0])],
            output: vec![Expr::VarOut(2)],
            guard: Expr::ConstBool(true),
        });
        let cfg = FuzzConfig::default();
        let report = verify(&c, p, &b, &cfg, &LearnedSet::new(), &mut rng(1));
        let bundle = report.cex.expect("the wrong flow must be refuted");
        assert_eq!(bundle.root.term.op, "seq");
        // Both children were summarized on the root input before the
        // mismatch surfaced.
        assert!(bundle.child_summaries.iter().all(|e| e.input == bundle.root.input));
        let mut s = Summaries::new();
        for e in &bundle.child_summaries {
            s.insert(&e.term, e.input.clone(), e.output.clone()).unwrap();
        }
        match check_consistent(&c, &bundle.root, &s, &b.grammar, p) {
            ConsistencyVerdict::Inconsistent(_) => {}
            v => panic!("expected an inconsistency witness, got {v:?}"),
        }
    }

    #[test]
    fn identity_loop_rule_is_caught_on_a_looping_sample() {
        // "The loop never runs" is consistent with many samples but not
        // with all of them; fuzzing must find a term whose loop actually
        // rewrites the state.
        let b = bundle("imp1").unwrap();
        let p = prod(&b.grammar, "while");
        let c = Constraint::Recursive(RecursiveConstraint {
            perm: vec![1, 2],
            shared_len: 0,
            flows: vec![Flow::new(vec![Expr::ConstInt(0)]), Flow::new(vec![Expr::ConstInt(0)])],
            guard_rec: Expr::ConstBool(false),
            nonrec_out: vec![Expr::VarIn0],
            self_flow: Flow::new(vec![Expr::ConstInt(0)]),
            rec_out: vec![Expr::ConstInt(0)],
        });
        let cfg = FuzzConfig::default();
        let report = verify(&c, p, &b, &cfg, &LearnedSet::new(), &mut rng(3));
        assert!(report.covered > 0);
        let bundle = report.cex.expect("an identity rule cannot model every loop");
        assert_eq!(bundle.root.term.op, "while");
        assert_ne!(bundle.root.output, bundle.root.input);
    }

    #[test]
    fn uncovered_runs_are_reported() {
        // With a recursion budget of one step, a sampled loop that needs
        // even a single iteration is discarded; find a seed whose only
        // sample is such a loop and check the report says nothing was
        // tested.
        let b = bundle("imp1").unwrap();
        let p = prod(&b.grammar, "while");
        let golden = b.golden.as_ref().unwrap().get(p).unwrap().clone();
        let cfg = FuzzConfig { samples_per_check: 1, recursion_limit: 1, ..FuzzConfig::default() };
        let zero = (1..200).find_map(|seed| {
            let report = verify(&golden, p, &b, &cfg, &LearnedSet::new(), &mut rng(seed));
            (report.covered == 0).then_some(report)
        });
        let report = zero.expect("some seed samples a loop needing more than one step");
        assert!(report.passed());
        assert_eq!(report.sampled, 1);
    }
}
