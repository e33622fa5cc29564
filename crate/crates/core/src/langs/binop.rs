//! Bit strings with two readings: `count` sums the set bits, `bin2dec`
//! reads the string as a binary numeral (most significant bit first). The
//! single Boolean input is the value every `x` leaf reads.

use super::{add, cb, insert_pass, int, ite, mul, x0, y};
use crate::grammar::{load_grammar, Grammar};
use crate::interp::{Budget, Fault, LanguageBundle};
use crate::semantics::{int_add, int_mul, Semantics};
use crate::term::Term;
use crate::value::Value;

pub fn bundle() -> LanguageBundle {
    let g = grammar();
    let golden = golden(&g);
    LanguageBundle::new("binop", g, eval, Some(golden))
}

fn grammar() -> Grammar {
    load_grammar(include_str!("../../grammars/binop.sexp")).expect("bundled grammar parses")
}

fn eval(t: &Term, input: &Value, bu: &mut Budget) -> Result<Value, Fault> {
    let int_of = |v: Value| match v {
        Value::IntV(n) => Ok(n),
        _ => Err(Fault::Stuck),
    };
    let bit_of = |v: Value| -> Result<i64, Fault> {
        match v {
            Value::BoolV(b) => Ok(i64::from(b)),
            _ => Err(Fault::Stuck),
        }
    };
    match t.op.as_str() {
        "one" => Ok(Value::bool(true)),
        "zero" => Ok(Value::bool(false)),
        "x" => match input {
            Value::BoolV(b) => Ok(Value::bool(*b)),
            _ => Err(Fault::Stuck),
        },
        "count" | "bin2dec" => eval(&t.children[0], input, bu),
        "atom" | "atom2" => Ok(Value::int(bit_of(eval(&t.children[0], input, bu)?)?)),
        "concat" => {
            let n = int_of(eval(&t.children[0], input, bu)?)?;
            let b = bit_of(eval(&t.children[1], input, bu)?)?;
            Ok(Value::int(int_add(n, b)?))
        }
        "concat2" => {
            let m = int_of(eval(&t.children[0], input, bu)?)?;
            let b = bit_of(eval(&t.children[1], input, bu)?)?;
            Ok(Value::int(int_add(int_mul(2, m)?, b)?))
        }
        _ => Err(Fault::Stuck),
    }
}

fn golden(g: &Grammar) -> Semantics {
    let mut s = Semantics::new();
    insert_pass(&mut s, g, "T", "count", vec![y(1)]);
    insert_pass(&mut s, g, "T", "bin2dec", vec![y(1)]);
    insert_pass(&mut s, g, "N", "concat", vec![add(y(1), ite(y(2), int(1), int(0)))]);
    insert_pass(&mut s, g, "N", "atom", vec![ite(y(1), int(1), int(0))]);
    insert_pass(
        &mut s,
        g,
        "M",
        "concat2",
        vec![add(mul(int(2), y(1)), ite(y(2), int(1), int(0)))],
    );
    insert_pass(&mut s, g, "M", "atom2", vec![ite(y(1), int(1), int(0))]);
    insert_pass(&mut s, g, "B", "one", vec![cb(true)]);
    insert_pass(&mut s, g, "B", "zero", vec![cb(false)]);
    insert_pass(&mut s, g, "B", "x", vec![x0()]);
    s
}
