//! Currency arithmetic. Scalar quantities are built from small constants,
//! the input, and addition; amounts convert to the base unit on entry (jpy
//! is 1, cny 21, usd 152) and then combine linearly.

use super::{add, insert_pass, int, mul, sub, x0, y};
use crate::grammar::{load_grammar, Grammar};
use crate::interp::{Budget, Fault, LanguageBundle};
use crate::semantics::{int_add, int_mul, int_sub, Semantics};
use crate::term::Term;
use crate::value::Value;

pub fn bundle() -> LanguageBundle {
    let g = grammar();
    let golden = golden(&g);
    LanguageBundle::new("currency", g, eval, Some(golden))
}

fn grammar() -> Grammar {
    load_grammar(include_str!("../../grammars/currency.sexp")).expect("bundled grammar parses")
}

fn eval(t: &Term, input: &Value, bu: &mut Budget) -> Result<Value, Fault> {
    let int_of = |v: Value| match v {
        Value::IntV(n) => Ok(n),
        _ => Err(Fault::Stuck),
    };
    let bin = |t: &Term, bu: &mut Budget| -> Result<(i64, i64), Fault> {
        let a = int_of(eval(&t.children[0], input, bu)?)?;
        let b = int_of(eval(&t.children[1], input, bu)?)?;
        Ok((a, b))
    };
    match t.op.as_str() {
        "zero" => Ok(Value::int(0)),
        "one" => Ok(Value::int(1)),
        "two" => Ok(Value::int(2)),
        "four" => Ok(Value::int(4)),
        "eight" => Ok(Value::int(8)),
        "x" => match input {
            Value::IntV(n) => Ok(Value::int(*n)),
            _ => Err(Fault::Stuck),
        },
        "splus" | "cplus" => bin(t, bu).and_then(|(a, b)| Ok(Value::int(int_add(a, b)?))),
        "cminus" => bin(t, bu).and_then(|(a, b)| Ok(Value::int(int_sub(a, b)?))),
        "ctimes" => bin(t, bu).and_then(|(a, b)| Ok(Value::int(int_mul(a, b)?))),
        "jpy" => eval(&t.children[0], input, bu),
        "cny" => {
            let r = int_of(eval(&t.children[0], input, bu)?)?;
            Ok(Value::int(int_mul(21, r)?))
        }
        "usd" => {
            let r = int_of(eval(&t.children[0], input, bu)?)?;
            Ok(Value::int(int_mul(152, r)?))
        }
        _ => Err(Fault::Stuck),
    }
}

fn golden(g: &Grammar) -> Semantics {
    let mut s = Semantics::new();
    insert_pass(&mut s, g, "K", "zero", vec![int(0)]);
    insert_pass(&mut s, g, "K", "one", vec![int(1)]);
    insert_pass(&mut s, g, "K", "two", vec![int(2)]);
    insert_pass(&mut s, g, "K", "four", vec![int(4)]);
    insert_pass(&mut s, g, "K", "eight", vec![int(8)]);
    insert_pass(&mut s, g, "K", "x", vec![x0()]);
    insert_pass(&mut s, g, "K", "splus", vec![add(y(1), y(2))]);
    insert_pass(&mut s, g, "S", "cplus", vec![add(y(1), y(2))]);
    insert_pass(&mut s, g, "S", "cminus", vec![sub(y(1), y(2))]);
    insert_pass(&mut s, g, "S", "ctimes", vec![mul(y(1), y(2))]);
    insert_pass(&mut s, g, "S", "jpy", vec![y(1)]);
    insert_pass(&mut s, g, "S", "cny", vec![mul(int(21), y(1))]);
    insert_pass(&mut s, g, "S", "usd", vec![mul(int(152), y(1))]);
    s
}
