//! Boolean normal-form languages: CNF and DNF over two variables, and cubes
//! (pure conjunctions) over three. All three share one interpreter since an
//! operator means the same thing wherever it occurs; they differ only in
//! which shapes their grammars admit.

use super::{and, not, or, pass_rule, xc, y};
use crate::grammar::{load_grammar, Grammar};
use crate::interp::{Budget, Fault, LanguageBundle};
use crate::semantics::Semantics;
use crate::term::Term;
use crate::value::Value;

pub fn cnf2() -> LanguageBundle {
    let g = load_grammar(include_str!("../../grammars/cnf2.sexp")).expect("bundled grammar parses");
    let golden = golden(&g);
    LanguageBundle::new("cnf2", g, eval, Some(golden))
}

pub fn dnf2() -> LanguageBundle {
    let g = load_grammar(include_str!("../../grammars/dnf2.sexp")).expect("bundled grammar parses");
    let golden = golden(&g);
    LanguageBundle::new("dnf2", g, eval, Some(golden))
}

pub fn cube3() -> LanguageBundle {
    let g =
        load_grammar(include_str!("../../grammars/cube3.sexp")).expect("bundled grammar parses");
    let golden = golden(&g);
    LanguageBundle::new("cube3", g, eval, Some(golden))
}

fn eval(t: &Term, input: &Value, bu: &mut Budget) -> Result<Value, Fault> {
    let bit = |i: usize| -> Result<bool, Fault> {
        input.component(i).and_then(|s| s.as_bool()).ok_or(Fault::Stuck)
    };
    let bool_of = |v: Value| match v {
        Value::BoolV(b) => Ok(b),
        _ => Err(Fault::Stuck),
    };
    match t.op.as_str() {
        "v0" => Ok(Value::bool(bit(0)?)),
        "v1" => Ok(Value::bool(bit(1)?)),
        "v2" => Ok(Value::bool(bit(2)?)),
        "var" | "clause" | "conj" => eval(&t.children[0], input, bu),
        "nvar" => Ok(Value::bool(!bool_of(eval(&t.children[0], input, bu)?)?)),
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
        _ => Err(Fault::Stuck),
    }
}

fn golden(g: &Grammar) -> Semantics {
    let mut s = Semantics::new();
    for p in &g.productions {
        let out = match p.op.as_str() {
            "v0" => vec![xc(0)],
            "v1" => vec![xc(1)],
            "v2" => vec![xc(2)],
            "var" | "clause" | "conj" => vec![y(1)],
            "nvar" => vec![not(y(1))],
            "and" => vec![and(y(1), y(2))],
            "or" => vec![or(y(1), y(2))],
            other => panic!("unexpected normal-form operator {other}"),
        };
        s.insert(p, pass_rule(g, p, out));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interp::{interpret, InterpreterResult};
    use crate::term::parse_term;
    use crate::value::Scalar;

    fn bools(bits: &[bool]) -> Value {
        Value::tuple(bits.iter().map(|b| Scalar::Bool(*b)).collect())
    }

    #[test]
    fn cnf_evaluates_clause_conjunctions() {
        let b = cnf2();
        // (v0 or not v1) and (v1)
        let t = parse_term(
            "(and (or (var (v0)) (nvar (v1))) (clause (var (v1))))",
            &b.grammar,
        )
        .unwrap();
        for (v0, v1, want) in [
            (false, false, false),
            (true, false, false),
            (false, true, false),
            (true, true, true),
        ] {
            assert_eq!(
                interpret(&b, &t, &bools(&[v0, v1]), 10),
                InterpreterResult::Ok(Value::bool(want))
            );
        }
    }

    #[test]
    fn dnf_evaluates_conjunct_disjunctions() {
        let b = dnf2();
        // (v0 and not v1) or (v1)
        let t = parse_term(
            "(or (and (var (v0)) (nvar (v1))) (conj (var (v1))))",
            &b.grammar,
        )
        .unwrap();
        for (v0, v1, want) in [
            (false, false, false),
            (true, false, true),
            (false, true, true),
            (true, true, true),
        ] {
            assert_eq!(
                interpret(&b, &t, &bools(&[v0, v1]), 10),
                InterpreterResult::Ok(Value::bool(want))
            );
        }
    }

    #[test]
    fn cube_is_a_pure_conjunction() {
        let b = cube3();
        let t = parse_term("(and (var (v0)) (and (var (v1)) (var (v2))))", &b.grammar).unwrap();
        assert_eq!(
            interpret(&b, &t, &bools(&[true, true, true]), 10),
            InterpreterResult::Ok(Value::bool(true))
        );
        assert_eq!(
            interpret(&b, &t, &bools(&[true, false, true]), 10),
            InterpreterResult::Ok(Value::bool(false))
        );
    }
}
