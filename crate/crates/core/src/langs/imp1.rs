//! Imperative language over one integer variable.
//!
//! Statements map a value of `x` to a new value of `x`. Conditionals are
//! eager: both branches run (from the same entry state) and the guard picks
//! which result survives. Loops are the only source of nontermination; each
//! completed iteration charges the interpreter budget once.

use super::{add, and, cb, insert_pass, insert_rule, int, ite, lt, not, or, pass_flows, sub, x0, y};
use crate::grammar::{load_grammar, Grammar};
use crate::interp::{Budget, LanguageBundle};
use crate::semantics::{
    int_add, int_sub, Constraint, Flow, GuardedConstraint, RecursiveConstraint,
    SemanticConstraint, Semantics,
};
use crate::term::Term;
use crate::value::Value;

pub fn bundle() -> LanguageBundle {
    let g = grammar();
    let golden = golden(&g);
    LanguageBundle::new("imp1", g, eval, Some(golden))
}

fn grammar() -> Grammar {
    load_grammar(include_str!("../../grammars/imp1.sexp")).expect("bundled grammar parses")
}

fn eval(t: &Term, input: &Value, bu: &mut Budget) -> Result<Value, crate::interp::Fault> {
    use crate::interp::Fault;
    let x = match input {
        Value::IntV(n) => *n,
        _ => return Err(Fault::Stuck),
    };
    let int_of = |v: Value| -> Result<i64, Fault> {
        match v {
            Value::IntV(n) => Ok(n),
            _ => Err(Fault::Stuck),
        }
    };
    let bool_of = |v: Value| -> Result<bool, Fault> {
        match v {
            Value::BoolV(b) => Ok(b),
            _ => Err(Fault::Stuck),
        }
    };
    match t.op.as_str() {
        "lit0" => Ok(Value::int(0)),
        "lit1" => Ok(Value::int(1)),
        "var_x" => Ok(Value::int(x)),
        "plus" => {
            let a = int_of(eval(&t.children[0], input, bu)?)?;
            let b = int_of(eval(&t.children[1], input, bu)?)?;
            Ok(Value::int(int_add(a, b)?))
        }
        "minus" => {
            let a = int_of(eval(&t.children[0], input, bu)?)?;
            let b = int_of(eval(&t.children[1], input, bu)?)?;
            Ok(Value::int(int_sub(a, b)?))
        }
        "btrue" => Ok(Value::bool(true)),
        "bfalse" => Ok(Value::bool(false)),
        "not" => Ok(Value::bool(!bool_of(eval(&t.children[0], input, bu)?)?)),
        "and" => {
            let a = bool_of(eval(&t.children[0], input, bu)?)?;
            let b = bool_of(eval(&t.children[1], input, bu)?)?;
            Ok(Value::bool(a && b))
        }
        "or" => {
            let a = bool_of(eval(&t.children[0], input, bu)?)?;
            let b = bool_of(eval(&t.children[1], input, bu)?)?;
            Ok(Value::bool(a || b))
        }
        "lt" => {
            let a = int_of(eval(&t.children[0], input, bu)?)?;
            let b = int_of(eval(&t.children[1], input, bu)?)?;
            Ok(Value::bool(a < b))
        }
        "assign_x" => eval(&t.children[0], input, bu),
        "dec_x" => Ok(Value::int(int_sub(x, 1)?)),
        "seq" => {
            let mid = eval(&t.children[0], input, bu)?;
            eval(&t.children[1], &mid, bu)
        }
        "ite" => {
            let g = bool_of(eval(&t.children[0], input, bu)?)?;
            let then_v = eval(&t.children[1], input, bu)?;
            let else_v = eval(&t.children[2], input, bu)?;
            Ok(if g { then_v } else { else_v })
        }
        "while" => {
            let mut state = Value::int(x);
            loop {
                if !bool_of(eval(&t.children[0], &state, bu)?)? {
                    break;
                }
                state = eval(&t.children[1], &state, bu)?;
                bu.consume()?;
            }
            Ok(state)
        }
        "do_while" => {
            let mut state = Value::int(x);
            loop {
                state = eval(&t.children[0], &state, bu)?;
                if !bool_of(eval(&t.children[1], &state, bu)?)? {
                    break;
                }
                bu.consume()?;
            }
            Ok(state)
        }
        _ => Err(Fault::Stuck),
    }
}

fn golden(g: &Grammar) -> Semantics {
    let mut s = Semantics::new();

    insert_pass(&mut s, g, "E", "lit0", vec![int(0)]);
    insert_pass(&mut s, g, "E", "lit1", vec![int(1)]);
    insert_pass(&mut s, g, "E", "var_x", vec![x0()]);
    insert_pass(&mut s, g, "E", "plus", vec![add(y(1), y(2))]);
    insert_pass(&mut s, g, "E", "minus", vec![sub(y(1), y(2))]);

    insert_pass(&mut s, g, "B", "btrue", vec![cb(true)]);
    insert_pass(&mut s, g, "B", "bfalse", vec![cb(false)]);
    insert_pass(&mut s, g, "B", "not", vec![not(y(1))]);
    insert_pass(&mut s, g, "B", "and", vec![and(y(1), y(2))]);
    insert_pass(&mut s, g, "B", "or", vec![or(y(1), y(2))]);
    // Comparison as a rule pair: one rule concludes true when y1 < y2, the
    // other concludes false otherwise.
    let p_lt = g.production("B", "lt").unwrap();
    insert_rule(
        &mut s,
        g,
        "B",
        "lt",
        Constraint::Guarded(GuardedConstraint {
            perm: vec![1, 2],
            flows: pass_flows(g, p_lt),
            guard: lt(y(1), y(2)),
            out_then: vec![cb(true)],
            out_else: vec![cb(false)],
        }),
    );

    insert_pass(&mut s, g, "S", "assign_x", vec![y(1)]);
    insert_pass(&mut s, g, "S", "dec_x", vec![sub(x0(), int(1))]);
    insert_rule(
        &mut s,
        g,
        "S",
        "seq",
        Constraint::Plain(SemanticConstraint {
            perm: vec![1, 2],
            flows: vec![Flow::new(vec![x0()]), Flow::new(vec![y(1)])],
            output: vec![y(2)],
            guard: cb(true),
        }),
    );
    insert_pass(&mut s, g, "S", "ite", vec![ite(y(1), y(2), y(3))]);
    let p_while = g.production("S", "while").unwrap();
    insert_rule(
        &mut s,
        g,
        "S",
        "while",
        Constraint::Recursive(RecursiveConstraint {
            perm: vec![1, 2],
            shared_len: 1,
            flows: pass_flows(g, p_while),
            guard_rec: y(1),
            nonrec_out: vec![x0()],
            self_flow: Flow::new(vec![y(2)]),
            rec_out: vec![y(3)],
        }),
    );
    insert_rule(
        &mut s,
        g,
        "S",
        "do_while",
        Constraint::Recursive(RecursiveConstraint {
            perm: vec![1, 2],
            shared_len: 2,
            flows: vec![Flow::new(vec![x0()]), Flow::new(vec![y(1)])],
            guard_rec: y(2),
            nonrec_out: vec![y(1)],
            self_flow: Flow::new(vec![y(1)]),
            rec_out: vec![y(3)],
        }),
    );
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interp::{interpret, InterpreterResult};
    use crate::term::parse_term;

    fn run(src: &str, x: i64) -> InterpreterResult {
        let b = bundle();
        let t = parse_term(src, &b.grammar).unwrap();
        interpret(&b, &t, &Value::int(x), 1000)
    }

    #[test]
    fn sequencing_threads_state() {
        assert_eq!(
            run("(seq (assign_x (lit1)) (assign_x (lit0)))", 5),
            InterpreterResult::Ok(Value::int(0))
        );
        assert_eq!(
            run("(seq (dec_x) (dec_x))", 5),
            InterpreterResult::Ok(Value::int(3))
        );
    }

    #[test]
    fn conditional_is_eager_but_selects_by_guard() {
        // Both branches run from the entry state; the guard picks one.
        assert_eq!(
            run("(ite (lt (var_x) (lit0)) (assign_x (lit0)) (dec_x))", -4),
            InterpreterResult::Ok(Value::int(0))
        );
        assert_eq!(
            run("(ite (lt (var_x) (lit0)) (assign_x (lit0)) (dec_x))", 4),
            InterpreterResult::Ok(Value::int(3))
        );
        // A diverging untaken branch still diverges: evaluation is eager.
        assert_eq!(
            run("(ite (btrue) (dec_x) (while (btrue) (dec_x)))", 1),
            InterpreterResult::Nontermination
        );
    }

    #[test]
    fn do_while_runs_body_at_least_once() {
        assert_eq!(
            run("(do_while (dec_x) (lt (lit0) (var_x)))", 3),
            InterpreterResult::Ok(Value::int(0))
        );
        assert_eq!(
            run("(do_while (dec_x) (lt (lit0) (var_x)))", -5),
            InterpreterResult::Ok(Value::int(-6))
        );
    }

    #[test]
    fn golden_rules_cover_every_production() {
        let b = bundle();
        assert!(b.golden.as_ref().unwrap().is_total(&b.grammar));
    }
}
