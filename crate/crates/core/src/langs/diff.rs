//! Finite differences. Every term denotes a triple: the expression's value
//! at the input, its value at the input plus one, and a product-rule
//! accumulator that is only nonzero under multiplication.

use super::{add, insert_pass, int, mul, x0, yc};
use crate::grammar::{load_grammar, Grammar};
use crate::interp::{Budget, Fault, LanguageBundle};
use crate::semantics::{int_add, int_mul, Semantics};
use crate::term::Term;
use crate::value::{Scalar, Value};

pub fn bundle() -> LanguageBundle {
    let g = grammar();
    let golden = golden(&g);
    LanguageBundle::new("diff", g, eval, Some(golden))
}

fn grammar() -> Grammar {
    load_grammar(include_str!("../../grammars/diff.sexp")).expect("bundled grammar parses")
}

fn triple(r: i64, s: i64, t: i64) -> Value {
    Value::tuple(vec![Scalar::Int(r), Scalar::Int(s), Scalar::Int(t)])
}

fn parts(v: &Value) -> Result<(i64, i64, i64), Fault> {
    match v {
        Value::TupleV(items) if items.len() == 3 => {
            match (items[0].as_int(), items[1].as_int(), items[2].as_int()) {
                (Some(r), Some(s), Some(t)) => Ok((r, s, t)),
                _ => Err(Fault::Stuck),
            }
        }
        _ => Err(Fault::Stuck),
    }
}

fn eval(t: &Term, input: &Value, bu: &mut Budget) -> Result<Value, Fault> {
    let x = match input {
        Value::IntV(n) => *n,
        _ => return Err(Fault::Stuck),
    };
    match t.op.as_str() {
        "zero" => Ok(triple(0, 0, 0)),
        "one" => Ok(triple(1, 1, 0)),
        "two" => Ok(triple(2, 2, 0)),
        "var_x" => Ok(triple(x, int_add(x, 1)?, 0)),
        "plus" => {
            let (r1, s1, t1) = parts(&eval(&t.children[0], input, bu)?)?;
            let (r2, s2, t2) = parts(&eval(&t.children[1], input, bu)?)?;
            Ok(triple(int_add(r1, r2)?, int_add(s1, s2)?, int_add(t1, t2)?))
        }
        "times" => {
            // The left accumulator does not appear in the product rule.
            let (r1, s1, _) = parts(&eval(&t.children[0], input, bu)?)?;
            let (r2, s2, t2) = parts(&eval(&t.children[1], input, bu)?)?;
            Ok(triple(
                int_mul(r1, r2)?,
                int_mul(s1, s2)?,
                int_add(int_mul(r1, t2)?, int_mul(r2, s1)?)?,
            ))
        }
        _ => Err(Fault::Stuck),
    }
}

fn golden(g: &Grammar) -> Semantics {
    let mut s = Semantics::new();
    insert_pass(&mut s, g, "E", "zero", vec![int(0), int(0), int(0)]);
    insert_pass(&mut s, g, "E", "one", vec![int(1), int(1), int(0)]);
    insert_pass(&mut s, g, "E", "two", vec![int(2), int(2), int(0)]);
    insert_pass(&mut s, g, "E", "var_x", vec![x0(), add(x0(), int(1)), int(0)]);
    insert_pass(
        &mut s,
        g,
        "E",
        "plus",
        vec![
            add(yc(1, 0), yc(2, 0)),
            add(yc(1, 1), yc(2, 1)),
            add(yc(1, 2), yc(2, 2)),
        ],
    );
    insert_pass(
        &mut s,
        g,
        "E",
        "times",
        vec![
            mul(yc(1, 0), yc(2, 0)),
            mul(yc(1, 1), yc(2, 1)),
            add(mul(yc(1, 0), yc(2, 2)), mul(yc(2, 0), yc(1, 1))),
        ],
    );
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interp::{interpret, InterpreterResult};
    use crate::term::parse_term;

    #[test]
    fn leaves_carry_shifted_values() {
        let b = bundle();
        let t = parse_term("(var_x)", &b.grammar).unwrap();
        assert_eq!(
            interpret(&b, &t, &Value::int(4), 10),
            InterpreterResult::Ok(triple(4, 5, 0))
        );
    }

    #[test]
    fn product_rule_accumulates() {
        let b = bundle();
        // x * x at 3: values 9 and 16, accumulator 3*0 + 3*4 = 12.
        let t = parse_term("(times (var_x) (var_x))", &b.grammar).unwrap();
        assert_eq!(
            interpret(&b, &t, &Value::int(3), 10),
            InterpreterResult::Ok(triple(9, 16, 12))
        );
    }
}
