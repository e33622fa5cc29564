//! Arithmetic expression language with precedence tiers (additive,
//! multiplicative, atomic), truncating integer division that gets stuck on a
//! zero divisor, six comparison operators, and an eager conditional.

use super::{add, div, eq, insert_pass, insert_rule, int, le, lt, mul, not, pass_flows, sub, x0, y};
use crate::grammar::{load_grammar, Grammar};
use crate::interp::{Budget, Fault, LanguageBundle};
use crate::semantics::{int_add, int_div, int_mul, int_sub, Constraint, GuardedConstraint, Semantics};
use crate::term::Term;
use crate::value::Value;

pub fn bundle() -> LanguageBundle {
    let g = grammar();
    let golden = golden(&g);
    LanguageBundle::new("ite_expr", g, eval, Some(golden))
}

fn grammar() -> Grammar {
    load_grammar(include_str!("../../grammars/ite_expr.sexp")).expect("bundled grammar parses")
}

fn eval(t: &Term, input: &Value, bu: &mut Budget) -> Result<Value, Fault> {
    let x = match input {
        Value::IntV(n) => *n,
        _ => return Err(Fault::Stuck),
    };
    fn int_of(v: Value) -> Result<i64, Fault> {
        match v {
            Value::IntV(n) => Ok(n),
            _ => Err(Fault::Stuck),
        }
    }
    fn int2(t: &Term, input: &Value, bu: &mut Budget) -> Result<(i64, i64), Fault> {
        let a = int_of(eval(&t.children[0], input, bu)?)?;
        let b = int_of(eval(&t.children[1], input, bu)?)?;
        Ok((a, b))
    }
    match t.op.as_str() {
        "lit0" => Ok(Value::int(0)),
        "lit1" => Ok(Value::int(1)),
        "lit2" => Ok(Value::int(2)),
        "lit3" => Ok(Value::int(3)),
        "lit4" => Ok(Value::int(4)),
        "lit5" => Ok(Value::int(5)),
        "lit6" => Ok(Value::int(6)),
        "lit7" => Ok(Value::int(7)),
        "lit8" => Ok(Value::int(8)),
        "var_x" => Ok(Value::int(x)),
        "expr" | "atom" | "num" => eval(&t.children[0], input, bu),
        "ite" => {
            let c = match eval(&t.children[0], input, bu)? {
                Value::BoolV(b) => b,
                _ => return Err(Fault::Stuck),
            };
            let a = int_of(eval(&t.children[1], input, bu)?)?;
            let b = int_of(eval(&t.children[2], input, bu)?)?;
            Ok(Value::int(if c { a } else { b }))
        }
        "plus" => int2(t, input, bu).and_then(|(a, b)| Ok(Value::int(int_add(a, b)?))),
        "minus" => int2(t, input, bu).and_then(|(a, b)| Ok(Value::int(int_sub(a, b)?))),
        "times" => int2(t, input, bu).and_then(|(a, b)| Ok(Value::int(int_mul(a, b)?))),
        "div" => int2(t, input, bu).and_then(|(a, b)| Ok(Value::int(int_div(a, b)?))),
        "lt" => int2(t, input, bu).map(|(a, b)| Value::bool(a < b)),
        "le" => int2(t, input, bu).map(|(a, b)| Value::bool(a <= b)),
        "gt" => int2(t, input, bu).map(|(a, b)| Value::bool(a > b)),
        "ge" => int2(t, input, bu).map(|(a, b)| Value::bool(a >= b)),
        "eq" => int2(t, input, bu).map(|(a, b)| Value::bool(a == b)),
        "ne" => int2(t, input, bu).map(|(a, b)| Value::bool(a != b)),
        _ => Err(Fault::Stuck),
    }
}

fn golden(g: &Grammar) -> Semantics {
    let mut s = Semantics::new();
    let p_ite = g.production("E", "ite").unwrap();
    insert_rule(
        &mut s,
        g,
        "E",
        "ite",
        Constraint::Guarded(GuardedConstraint {
            perm: vec![1, 2, 3],
            flows: pass_flows(g, p_ite),
            guard: y(1),
            out_then: vec![y(2)],
            out_else: vec![y(3)],
        }),
    );
    insert_pass(&mut s, g, "E", "plus", vec![add(y(1), y(2))]);
    insert_pass(&mut s, g, "E", "minus", vec![sub(y(1), y(2))]);
    insert_pass(&mut s, g, "E", "atom", vec![y(1)]);
    insert_pass(&mut s, g, "F", "times", vec![mul(y(1), y(2))]);
    insert_pass(&mut s, g, "F", "div", vec![div(y(1), y(2))]);
    insert_pass(&mut s, g, "F", "num", vec![y(1)]);
    for n in 0..=8 {
        insert_pass(&mut s, g, "G", &format!("lit{n}"), vec![int(n)]);
    }
    insert_pass(&mut s, g, "G", "var_x", vec![x0()]);
    insert_pass(&mut s, g, "G", "expr", vec![y(1)]);
    insert_pass(&mut s, g, "B", "lt", vec![lt(y(1), y(2))]);
    insert_pass(&mut s, g, "B", "le", vec![le(y(1), y(2))]);
    insert_pass(&mut s, g, "B", "gt", vec![lt(y(2), y(1))]);
    insert_pass(&mut s, g, "B", "ge", vec![le(y(2), y(1))]);
    insert_pass(&mut s, g, "B", "eq", vec![eq(y(1), y(2))]);
    insert_pass(&mut s, g, "B", "ne", vec![not(eq(y(1), y(2)))]);
    s
}
