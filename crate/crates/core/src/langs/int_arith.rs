//! Integer arithmetic with comparisons and an eager conditional. The three
//! variables x, y, z all read the single integer input.

use super::{add, and, cb, insert_pass, insert_rule, int, lt, mul, not, or, pass_flows, x0, y};
use crate::grammar::{load_grammar, Grammar};
use crate::interp::{Budget, Fault, LanguageBundle};
use crate::semantics::{int_add, int_mul, Constraint, GuardedConstraint, Semantics};
use crate::term::Term;
use crate::value::Value;

pub fn bundle() -> LanguageBundle {
    let g = grammar();
    let golden = golden(&g);
    LanguageBundle::new("int_arith", g, eval, Some(golden))
}

fn grammar() -> Grammar {
    load_grammar(include_str!("../../grammars/int_arith.sexp")).expect("bundled grammar parses")
}

fn eval(t: &Term, input: &Value, bu: &mut Budget) -> Result<Value, Fault> {
    let x = match input {
        Value::IntV(n) => *n,
        _ => return Err(Fault::Stuck),
    };
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
        "lit2" => Ok(Value::int(2)),
        "lit3" => Ok(Value::int(3)),
        "var_x" | "var_y" | "var_z" => Ok(Value::int(x)),
        "ite" => {
            // Eager: both arms are evaluated, the condition picks one.
            let c = bool_of(eval(&t.children[0], input, bu)?)?;
            let a = int_of(eval(&t.children[1], input, bu)?)?;
            let b = int_of(eval(&t.children[2], input, bu)?)?;
            Ok(Value::int(if c { a } else { b }))
        }
        "plus" => {
            let a = int_of(eval(&t.children[0], input, bu)?)?;
            let b = int_of(eval(&t.children[1], input, bu)?)?;
            Ok(Value::int(int_add(a, b)?))
        }
        "times" => {
            let a = int_of(eval(&t.children[0], input, bu)?)?;
            let b = int_of(eval(&t.children[1], input, bu)?)?;
            Ok(Value::int(int_mul(a, b)?))
        }
        "btrue" => Ok(Value::bool(true)),
        "bfalse" => Ok(Value::bool(false)),
        "lt" => {
            let a = int_of(eval(&t.children[0], input, bu)?)?;
            let b = int_of(eval(&t.children[1], input, bu)?)?;
            Ok(Value::bool(a < b))
        }
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
        "not" => Ok(Value::bool(!bool_of(eval(&t.children[0], input, bu)?)?)),
        _ => Err(Fault::Stuck),
    }
}

fn golden(g: &Grammar) -> Semantics {
    let mut s = Semantics::new();
    insert_pass(&mut s, g, "E", "lit0", vec![int(0)]);
    insert_pass(&mut s, g, "E", "lit1", vec![int(1)]);
    insert_pass(&mut s, g, "E", "lit2", vec![int(2)]);
    insert_pass(&mut s, g, "E", "lit3", vec![int(3)]);
    insert_pass(&mut s, g, "E", "var_x", vec![x0()]);
    insert_pass(&mut s, g, "E", "var_y", vec![x0()]);
    insert_pass(&mut s, g, "E", "var_z", vec![x0()]);
    // The conditional is the branching rule pair.
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
    insert_pass(&mut s, g, "E", "times", vec![mul(y(1), y(2))]);
    insert_pass(&mut s, g, "B", "btrue", vec![cb(true)]);
    insert_pass(&mut s, g, "B", "bfalse", vec![cb(false)]);
    insert_pass(&mut s, g, "B", "lt", vec![lt(y(1), y(2))]);
    insert_pass(&mut s, g, "B", "and", vec![and(y(1), y(2))]);
    insert_pass(&mut s, g, "B", "or", vec![or(y(1), y(2))]);
    insert_pass(&mut s, g, "B", "not", vec![not(y(1))]);
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interp::{interpret, InterpreterResult};
    use crate::term::parse_term;

    #[test]
    fn conditional_selects_by_comparison() {
        let b = bundle();
        let t = parse_term("(ite (lt (var_x) (lit2)) (lit0) (times (var_x) (var_x)))", &b.grammar)
            .unwrap();
        assert_eq!(interpret(&b, &t, &Value::int(1), 10), InterpreterResult::Ok(Value::int(0)));
        assert_eq!(interpret(&b, &t, &Value::int(5), 10), InterpreterResult::Ok(Value::int(25)));
    }

    #[test]
    fn all_three_variables_alias_the_input() {
        let b = bundle();
        let t = parse_term("(plus (var_y) (var_z))", &b.grammar).unwrap();
        assert_eq!(interpret(&b, &t, &Value::int(4), 10), InterpreterResult::Ok(Value::int(8)));
    }
}
