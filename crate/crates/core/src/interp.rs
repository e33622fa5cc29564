//! Closed-box interpreter contract plus random term and input generation.
//!
//! An interpreter is used strictly as an input-to-output map: the engine
//! never inspects how a bundle computes, only what it returns. Runs are
//! metered by a budget of recursive rule applications (loop iterations);
//! exhausting it reports nontermination rather than hanging the engine.

use crate::example::Example;
use crate::grammar::{Grammar, Production};
use crate::semantics::Semantics;
use crate::term::Term;
use crate::value::{ScalarType, Value, ValueType};
use rand::Rng;
use rand_chacha::ChaCha12Rng;
use std::collections::BTreeSet;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InterpreterResult {
    Ok(Value),
    Nontermination,
    Stuck,
}

impl InterpreterResult {
    pub fn ok(&self) -> Option<&Value> {
        match self {
            InterpreterResult::Ok(v) => Some(v),
            _ => None,
        }
    }
}

/// Faults carried through evaluation. `Nontermination` means the iteration
/// budget ran out; `Stuck` is a runtime fault such as division by zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fault {
    Nontermination,
    Stuck,
}

/// Countdown of recursive rule applications shared across one whole
/// evaluation, including nested loops.
#[derive(Debug)]
pub struct Budget {
    remaining: u64,
}

impl Budget {
    pub fn new(limit: u64) -> Budget {
        Budget { remaining: limit }
    }

    /// Spends one recursive application; fails once the budget is gone.
    pub fn consume(&mut self) -> Result<(), Fault> {
        if self.remaining == 0 {
            return Err(Fault::Nontermination);
        }
        self.remaining -= 1;
        Ok(())
    }
}

pub type EvalFn = fn(&Term, &Value, &mut Budget) -> Result<Value, Fault>;

pub struct LanguageBundle {
    pub id: &'static str,
    pub grammar: Grammar,
    eval: EvalFn,
    /// Hand-written reference rules used by differential tests; synthesis
    /// itself never reads them.
    pub golden: Option<Semantics>,
}

impl LanguageBundle {
    pub fn new(id: &'static str, grammar: Grammar, eval: EvalFn, golden: Option<Semantics>) -> LanguageBundle {
        LanguageBundle { id, grammar, eval, golden }
    }

    pub fn run(&self, t: &Term, input: &Value, budget: &mut Budget) -> Result<Value, Fault> {
        (self.eval)(t, input, budget)
    }
}

#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
#[serde(default)]
pub struct FuzzConfig {
    pub seed: u64,
    /// Integer inputs are drawn uniformly from [-input_bound, input_bound].
    pub input_bound: i64,
    pub max_term_depth: usize,
    pub samples_per_check: usize,
    pub recursion_limit: u64,
}

impl Default for FuzzConfig {
    fn default() -> FuzzConfig {
        FuzzConfig {
            seed: 1,
            input_bound: 8,
            max_term_depth: 5,
            samples_per_check: 2_000,
            recursion_limit: 1_000,
        }
    }
}

impl FuzzConfig {
    pub fn check(&self) -> Result<(), String> {
        if self.recursion_limit < 1 {
            return Err("recursion_limit must be at least 1".to_string());
        }
        if self.samples_per_check < 1 {
            return Err("samples_per_check must be at least 1".to_string());
        }
        if self.max_term_depth < 1 {
            return Err("max_term_depth must be at least 1".to_string());
        }
        if self.input_bound < 0 {
            return Err("input_bound must be nonnegative".to_string());
        }
        Ok(())
    }
}

/// Runs the bundled interpreter on a well-typed (term, input) pair.
pub fn interpret(b: &LanguageBundle, t: &Term, input: &Value, limit: u64) -> InterpreterResult {
    let mut budget = Budget::new(limit);
    match b.run(t, input, &mut budget) {
        Ok(v) => InterpreterResult::Ok(v),
        Err(Fault::Nontermination) => InterpreterResult::Nontermination,
        Err(Fault::Stuck) => InterpreterResult::Stuck,
    }
}

/// Productions whose semantics the driver has already learned, keyed by
/// (nonterminal, operator). Random terms lean toward these so that fresh
/// examples exercise children the engine can already explain.
pub type LearnedSet = BTreeSet<(String, String)>;

fn viable<'g>(g: &'g Grammar, nt: &str, depth_budget: usize) -> Vec<&'g Production> {
    g.productions_of(nt)
        .into_iter()
        .filter(|p| p.rhs.iter().all(|c| g.min_depth(c) < depth_budget) || p.rhs.is_empty())
        .collect()
}

fn gen_sub(g: &Grammar, nt: &str, depth_budget: usize, learned: &LearnedSet, rng: &mut ChaCha12Rng) -> Term {
    // The productivity check guarantees min_depth exists; if the budget is
    // below it, generation must overshoot the cap rather than fail.
    let budget = depth_budget.max(g.min_depth(nt));
    let candidates = viable(g, nt, budget);
    let known: Vec<&&Production> = candidates
        .iter()
        .filter(|p| learned.contains(&(p.lhs.clone(), p.op.clone())))
        .collect();
    let pick: &Production = if !known.is_empty() && rng.gen_bool(0.7) {
        known[rng.gen_range(0..known.len())]
    } else {
        candidates[rng.gen_range(0..candidates.len())]
    };
    let children = pick
        .rhs
        .iter()
        .map(|c| gen_sub(g, c, budget - 1, learned, rng))
        .collect();
    Term::new(pick.op.clone(), children)
}

/// Generates a random term whose root production is `p`, children capped at
/// `cfg.max_term_depth`.
pub fn gen_term(g: &Grammar, p: &Production, cfg: &FuzzConfig, learned: &LearnedSet, rng: &mut ChaCha12Rng) -> Term {
    let children = p
        .rhs
        .iter()
        .map(|c| gen_sub(g, c, cfg.max_term_depth, learned, rng))
        .collect();
    Term::new(p.op.clone(), children)
}

/// Uniform random value of the given type within the fuzz bounds.
pub fn gen_input(ty: &ValueType, cfg: &FuzzConfig, rng: &mut ChaCha12Rng) -> Value {
    fn scalar(s: ScalarType, bound: i64, rng: &mut ChaCha12Rng) -> crate::value::Scalar {
        match s {
            ScalarType::Int => crate::value::Scalar::Int(rng.gen_range(-bound..=bound)),
            ScalarType::Bool => crate::value::Scalar::Bool(rng.gen_bool(0.5)),
        }
    }
    match ty {
        ValueType::IntT => Value::IntV(scalar(ScalarType::Int, cfg.input_bound, rng).as_int().unwrap()),
        ValueType::BoolT => Value::BoolV(scalar(ScalarType::Bool, cfg.input_bound, rng).as_bool().unwrap()),
        ValueType::TupleT(elems) => {
            Value::TupleV(elems.iter().map(|e| scalar(*e, cfg.input_bound, rng)).collect())
        }
    }
}

/// Runs the interpreter and keeps the triple only when it terminates
/// cleanly; faulting and diverging pairs are discarded.
pub fn make_example(b: &LanguageBundle, t: &Term, input: &Value, cfg: &FuzzConfig) -> Option<Example> {
    match interpret(b, t, input, cfg.recursion_limit) {
        InterpreterResult::Ok(out) => Some(Example::new(input.clone(), t.clone(), out)),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::load_grammar;
    use rand::SeedableRng;

    fn tiny() -> Grammar {
        load_grammar(
            "(grammar
               (nt E :in int :out int)
               (prod E lit0 ())
               (prod E wrap (E))
               (start E))",
        )
        .unwrap()
    }

    #[test]
    fn budget_exhaustion_reports_nontermination() {
        let mut b = Budget::new(2);
        assert!(b.consume().is_ok());
        assert!(b.consume().is_ok());
        assert_eq!(b.consume(), Err(Fault::Nontermination));
    }

    #[test]
    fn depth_cap_respected() {
        let g = tiny();
        let cfg = FuzzConfig { max_term_depth: 3, ..FuzzConfig::default() };
        let p = g.production("E", "wrap").unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(11);
        for _ in 0..200 {
            let t = gen_term(&g, p, &cfg, &LearnedSet::new(), &mut rng);
            assert_eq!(t.op, "wrap");
            assert!(t.depth() <= 1 + cfg.max_term_depth, "too deep: {t}");
        }
    }

    #[test]
    fn depth_one_forces_leaf_children() {
        let g = tiny();
        let cfg = FuzzConfig { max_term_depth: 1, ..FuzzConfig::default() };
        let p = g.production("E", "wrap").unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        for _ in 0..50 {
            let t = gen_term(&g, p, &cfg, &LearnedSet::new(), &mut rng);
            assert_eq!(t.to_string(), "(wrap (lit0))");
        }
    }

    #[test]
    fn input_bound_respected() {
        let cfg = FuzzConfig { input_bound: 8, ..FuzzConfig::default() };
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        for _ in 0..500 {
            match gen_input(&ValueType::IntT, &cfg, &mut rng) {
                Value::IntV(n) => assert!((-8..=8).contains(&n)),
                other => panic!("expected int, got {other}"),
            }
        }
    }

    #[test]
    fn generation_is_deterministic_per_seed() {
        let g = tiny();
        let cfg = FuzzConfig::default();
        let p = g.production("E", "wrap").unwrap();
        let mut a = ChaCha12Rng::seed_from_u64(42);
        let mut b = ChaCha12Rng::seed_from_u64(42);
        for _ in 0..100 {
            let ta = gen_term(&g, p, &cfg, &LearnedSet::new(), &mut a);
            let tb = gen_term(&g, p, &cfg, &LearnedSet::new(), &mut b);
            assert_eq!(ta, tb);
        }
    }

    #[test]
    fn learned_bias_prefers_known_productions() {
        let g = load_grammar(
            "(grammar
               (nt E :in int :out int)
               (prod E a ())
               (prod E b ())
               (prod E wrap (E))
               (start E))",
        )
        .unwrap();
        let cfg = FuzzConfig { max_term_depth: 1, ..FuzzConfig::default() };
        let p = g.production("E", "wrap").unwrap();
        let learned = LearnedSet::from([("E".to_string(), "a".to_string())]);
        let mut rng = ChaCha12Rng::seed_from_u64(9);
        let hits = (0..2_000)
            .filter(|_| gen_term(&g, p, &cfg, &learned, &mut rng).children[0].op == "a")
            .count();
        // 0.7 direct mass plus roughly a third of the uniform remainder.
        assert!(hits > 1_500, "bias too weak: {hits}/2000");
    }
}
