//! Two-variable variant of the imperative language: the state is the pair
//! (x, y) and statements map states to states. Same evaluation conventions
//! as the one-variable version (eager conditionals, budget charged per
//! completed loop iteration).

use super::{
    add, and, cb, insert_pass, insert_rule, int, ite, lt, not, or, pass_flows, sub, xc, y, yc,
};
use crate::grammar::{load_grammar, Grammar};
use crate::interp::{Budget, Fault, LanguageBundle};
use crate::semantics::{
    int_add, int_sub, Constraint, Flow, GuardedConstraint, RecursiveConstraint,
    SemanticConstraint, Semantics,
};
use crate::term::Term;
use crate::value::{Scalar, Value};

pub fn bundle() -> LanguageBundle {
    let g = grammar();
    let golden = golden(&g);
    LanguageBundle::new("imp2", g, eval, Some(golden))
}

fn grammar() -> Grammar {
    load_grammar(include_str!("../../grammars/imp2.sexp")).expect("bundled grammar parses")
}

fn state(x: i64, yv: i64) -> Value {
    Value::tuple(vec![Scalar::Int(x), Scalar::Int(yv)])
}

fn comps(v: &Value) -> Result<(i64, i64), Fault> {
    match v {
        Value::TupleV(items) if items.len() == 2 => {
            match (items[0].as_int(), items[1].as_int()) {
                (Some(a), Some(b)) => Ok((a, b)),
                _ => Err(Fault::Stuck),
            }
        }
        _ => Err(Fault::Stuck),
    }
}

fn eval(t: &Term, input: &Value, bu: &mut Budget) -> Result<Value, Fault> {
    let (x, yv) = comps(input)?;
    let int_of = |v: Value| match v {
        Value::IntV(n) => Ok(n),
        _ => Err(Fault::Stuck),
    };
    let bool_of = |v: Value| match v {
        Value::BoolV(b) => Ok(b),
        _ => Err(Fault::Stuck),
    };
    match t.op.as_str() {
        "lit0" => Ok(Value::int(0)),
        "lit1" => Ok(Value::int(1)),
        "var_x" => Ok(Value::int(x)),
        "var_y" => Ok(Value::int(yv)),
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
        "assign_x" => {
            let v = int_of(eval(&t.children[0], input, bu)?)?;
            Ok(state(v, yv))
        }
        "assign_y" => {
            let v = int_of(eval(&t.children[0], input, bu)?)?;
            Ok(state(x, v))
        }
        "inc_x" => Ok(state(int_add(x, 1)?, yv)),
        "inc_y" => Ok(state(x, int_add(yv, 1)?)),
        "dec_x" => Ok(state(int_sub(x, 1)?, yv)),
        "dec_y" => Ok(state(x, int_sub(yv, 1)?)),
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
            let mut st = input.clone();
            loop {
                if !bool_of(eval(&t.children[0], &st, bu)?)? {
                    break;
                }
                st = eval(&t.children[1], &st, bu)?;
                bu.consume()?;
            }
            Ok(st)
        }
        "do_while" => {
            let mut st = input.clone();
            loop {
                st = eval(&t.children[0], &st, bu)?;
                if !bool_of(eval(&t.children[1], &st, bu)?)? {
                    break;
                }
                bu.consume()?;
            }
            Ok(st)
        }
        _ => Err(Fault::Stuck),
    }
}

fn golden(g: &Grammar) -> Semantics {
    let mut s = Semantics::new();

    insert_pass(&mut s, g, "E", "lit0", vec![int(0)]);
    insert_pass(&mut s, g, "E", "lit1", vec![int(1)]);
    insert_pass(&mut s, g, "E", "var_x", vec![xc(0)]);
    insert_pass(&mut s, g, "E", "var_y", vec![xc(1)]);
    insert_pass(&mut s, g, "E", "plus", vec![add(y(1), y(2))]);
    insert_pass(&mut s, g, "E", "minus", vec![sub(y(1), y(2))]);

    insert_pass(&mut s, g, "B", "btrue", vec![cb(true)]);
    insert_pass(&mut s, g, "B", "bfalse", vec![cb(false)]);
    insert_pass(&mut s, g, "B", "not", vec![not(y(1))]);
    insert_pass(&mut s, g, "B", "and", vec![and(y(1), y(2))]);
    insert_pass(&mut s, g, "B", "or", vec![or(y(1), y(2))]);
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

    insert_pass(&mut s, g, "S", "assign_x", vec![y(1), xc(1)]);
    insert_pass(&mut s, g, "S", "assign_y", vec![xc(0), y(1)]);
    insert_pass(&mut s, g, "S", "inc_x", vec![add(xc(0), int(1)), xc(1)]);
    insert_pass(&mut s, g, "S", "inc_y", vec![xc(0), add(xc(1), int(1))]);
    insert_pass(&mut s, g, "S", "dec_x", vec![sub(xc(0), int(1)), xc(1)]);
    insert_pass(&mut s, g, "S", "dec_y", vec![xc(0), sub(xc(1), int(1))]);
    insert_rule(
        &mut s,
        g,
        "S",
        "seq",
        Constraint::Plain(SemanticConstraint {
            perm: vec![1, 2],
            flows: vec![
                Flow::new(vec![xc(0), xc(1)]),
                Flow::new(vec![yc(1, 0), yc(1, 1)]),
            ],
            output: vec![yc(2, 0), yc(2, 1)],
            guard: cb(true),
        }),
    );
    insert_pass(
        &mut s,
        g,
        "S",
        "ite",
        vec![
            ite(y(1), yc(2, 0), yc(3, 0)),
            ite(y(1), yc(2, 1), yc(3, 1)),
        ],
    );
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
            nonrec_out: vec![xc(0), xc(1)],
            self_flow: Flow::new(vec![yc(2, 0), yc(2, 1)]),
            rec_out: vec![yc(3, 0), yc(3, 1)],
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
            flows: vec![
                Flow::new(vec![xc(0), xc(1)]),
                Flow::new(vec![yc(1, 0), yc(1, 1)]),
            ],
            guard_rec: y(2),
            nonrec_out: vec![yc(1, 0), yc(1, 1)],
            self_flow: Flow::new(vec![yc(1, 0), yc(1, 1)]),
            rec_out: vec![yc(3, 0), yc(3, 1)],
        }),
    );
    s
}
