//! The bundled benchmark languages.
//!
//! Each submodule packages one language: a grammar loaded from a fixture
//! file under `grammars/`, a reference interpreter, and hand-written
//! reference rules used by the differential tests. The interpreters are
//! closed boxes to the learner, which only reaches them through
//! [`crate::interp::interpret`]; nothing in the synthesis pipeline inspects
//! their code.

use crate::grammar::{Grammar, Production};
use crate::interp::LanguageBundle;
use crate::semantics::{identity_perm, Constraint, Expr, Flow, ProductionTypes, SemanticConstraint};
use crate::value::ValueType;

pub mod binop;
pub mod currency;
pub mod diff;
pub mod imp1;
pub mod imp2;
pub mod int_arith;
pub mod ite_expr;
pub mod normal_forms;

/// Every bundled language, in listing order.
pub fn bundles() -> Vec<LanguageBundle> {
    vec![
        imp1::bundle(),
        imp2::bundle(),
        normal_forms::cnf2(),
        normal_forms::dnf2(),
        normal_forms::cube3(),
        int_arith::bundle(),
        ite_expr::bundle(),
        binop::bundle(),
        currency::bundle(),
        diff::bundle(),
    ]
}

/// Look up a bundled language by id.
pub fn bundle(id: &str) -> Option<LanguageBundle> {
    bundles().into_iter().find(|b| b.id == id)
}

// Shorthand constructors for the reference rules. Boxing every operand by
// hand makes the rule tables unreadable; these keep them close to the
// on-paper notation.

pub fn x0() -> Expr {
    Expr::VarIn0
}
pub fn xc(i: usize) -> Expr {
    Expr::VarIn0Comp(i)
}
pub fn y(j: usize) -> Expr {
    Expr::VarOut(j)
}
pub fn yc(j: usize, i: usize) -> Expr {
    Expr::VarOutComp(j, i)
}
pub fn int(n: i64) -> Expr {
    Expr::ConstInt(n)
}
pub fn cb(b: bool) -> Expr {
    Expr::ConstBool(b)
}
pub fn add(a: Expr, b: Expr) -> Expr {
    Expr::Add(Box::new(a), Box::new(b))
}
pub fn sub(a: Expr, b: Expr) -> Expr {
    Expr::Sub(Box::new(a), Box::new(b))
}
pub fn mul(a: Expr, b: Expr) -> Expr {
    Expr::Mul(Box::new(a), Box::new(b))
}
pub fn div(a: Expr, b: Expr) -> Expr {
    Expr::Div(Box::new(a), Box::new(b))
}
pub fn ite(c: Expr, a: Expr, b: Expr) -> Expr {
    Expr::Ite(Box::new(c), Box::new(a), Box::new(b))
}
pub fn lt(a: Expr, b: Expr) -> Expr {
    Expr::Lt(Box::new(a), Box::new(b))
}
pub fn le(a: Expr, b: Expr) -> Expr {
    Expr::Le(Box::new(a), Box::new(b))
}
pub fn eq(a: Expr, b: Expr) -> Expr {
    Expr::EqE(Box::new(a), Box::new(b))
}
pub fn not(a: Expr) -> Expr {
    Expr::Not(Box::new(a))
}
pub fn and(a: Expr, b: Expr) -> Expr {
    Expr::And(Box::new(a), Box::new(b))
}
pub fn or(a: Expr, b: Expr) -> Expr {
    Expr::Or(Box::new(a), Box::new(b))
}

/// A flow that hands the production input to a child unchanged.
pub fn pass_flow(ty: &ValueType) -> Flow {
    match ty {
        ValueType::TupleT(comps) => Flow::new((0..comps.len()).map(Expr::VarIn0Comp).collect()),
        _ => Flow::new(vec![Expr::VarIn0]),
    }
}

/// Pass-through flows for every child of `p`.
pub fn pass_flows(g: &Grammar, p: &Production) -> Vec<Flow> {
    ProductionTypes::of(g, p).child_inputs.iter().map(pass_flow).collect()
}

/// The common rule shape: children read the input unchanged, the guard is
/// true, and `output` computes the result from `x0` and `y1..yn`.
pub fn pass_rule(g: &Grammar, p: &Production, output: Vec<Expr>) -> Constraint {
    Constraint::Plain(SemanticConstraint {
        perm: identity_perm(p.arity()),
        flows: pass_flows(g, p),
        output,
        guard: Expr::ConstBool(true),
    })
}

use crate::semantics::Semantics;

pub(crate) fn insert_rule(s: &mut Semantics, g: &Grammar, nt: &str, op: &str, c: Constraint) {
    s.insert(g.production(nt, op).expect("bundled production"), c);
}

pub(crate) fn insert_pass(s: &mut Semantics, g: &Grammar, nt: &str, op: &str, output: Vec<Expr>) {
    let p = g.production(nt, op).expect("bundled production");
    s.insert(p, pass_rule(g, p, output));
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interp::{interpret, InterpreterResult};
    use crate::term::parse_term;
    use crate::value::Value;

    #[test]
    fn registry_lists_all_ten() {
        let ids: Vec<&str> = bundles().iter().map(|b| b.id).collect();
        assert_eq!(
            ids,
            vec![
                "imp1", "imp2", "cnf2", "dnf2", "cube3", "int_arith", "ite_expr", "binop",
                "currency", "diff"
            ]
        );
        assert!(bundle("imp1").is_some());
        assert!(bundle("imp3").is_none());
    }

    #[test]
    fn every_grammar_loads_and_has_golden_rules() {
        for b in bundles() {
            let golden = b.golden.as_ref().expect("bundled golden rules");
            assert!(golden.is_total(&b.grammar), "{} golden incomplete", b.id);
        }
    }

    #[test]
    fn loop_counts_down_to_zero() {
        let b = bundle("imp1").unwrap();
        let t = parse_term("(while (lt (lit0) (var_x)) (dec_x))", &b.grammar).unwrap();
        assert_eq!(
            interpret(&b, &t, &Value::int(7), 1000),
            InterpreterResult::Ok(Value::int(0))
        );
        // Negative start: the guard fails immediately.
        assert_eq!(
            interpret(&b, &t, &Value::int(-3), 1000),
            InterpreterResult::Ok(Value::int(-3))
        );
    }

    #[test]
    fn infinite_loop_reports_nontermination() {
        let b = bundle("imp1").unwrap();
        let t = parse_term("(while (btrue) (dec_x))", &b.grammar).unwrap();
        assert_eq!(
            interpret(&b, &t, &Value::int(0), 50),
            InterpreterResult::Nontermination
        );
    }
}
