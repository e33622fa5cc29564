//! Horn-clause text format for learned semantics.
//!
//! One rule block per production, two for branching or recursive
//! productions. The head names the production pattern with child
//! metavariables `t1..tn`; the body lists one `child` premise per evaluated
//! child (in evaluation order, the recursive self-premise last, with term
//! `self` and slot `n+1`), a `flow` form per premise giving its input, an
//! `out` form, and a `guard` form. Tuple-typed positions wrap their
//! component expressions in `(tuple ...)`. Example:
//!
//! ```text
//! (semantics
//!   (rule :nonrec (head Sem_S (while t1 t2) x0 y0)
//!     (body (child Sem_B t1 x1 y1) (flow 1 x0) (out x0) (guard (not y1))))
//!   (rule :rec (head Sem_S (while t1 t2) x0 y0)
//!     (body (child Sem_B t1 x1 y1) (child Sem_S t2 x2 y2) (child Sem_S self x3 y3)
//!       (flow 1 x0) (flow 2 x0) (flow 3 y2) (out y3) (guard y1))))
//! ```
//!
//! Emission is deterministic (productions in grammar order, expressions
//! printed canonically), and parsing is its exact inverse.

use crate::grammar::{Grammar, Production};
use crate::semantics::{
    Constraint, Expr, Flow, GuardedConstraint, RecursiveConstraint, SemanticConstraint, Semantics,
};
use crate::sexp::Sexp;
use crate::value::ValueType;
use std::fmt::Write as _;

fn exprs_text(exprs: &[Expr], ty: &ValueType) -> String {
    if ty.is_tuple() {
        let inner: Vec<String> = exprs.iter().map(Expr::to_string).collect();
        format!("(tuple {})", inner.join(" "))
    } else {
        exprs[0].to_string()
    }
}

fn head_text(p: &Production) -> String {
    let mut pattern = format!("({}", p.op);
    for i in 1..=p.arity() {
        let _ = write!(pattern, " t{i}");
    }
    pattern.push(')');
    format!("(head Sem_{} {} x0 y0)", p.lhs, pattern)
}

fn child_text(p: &Production, slot: usize) -> String {
    format!("(child Sem_{} t{slot} x{slot} y{slot})", p.rhs[slot - 1])
}

fn self_text(p: &Production) -> String {
    let slot = p.arity() + 1;
    format!("(child Sem_{} self x{slot} y{slot})", p.lhs)
}

fn flow_text(g: &Grammar, p: &Production, slot: usize, flow: &Flow) -> String {
    let ty = &g.nonterminals[&p.rhs[slot - 1]].input_type;
    format!("(flow {slot} {})", exprs_text(&flow.exprs, ty))
}

fn rule_text(
    p: &Production,
    tag: Option<&str>,
    premises: &[String],
    flows: &[String],
    out: &str,
    guard: &Expr,
) -> String {
    let tag = tag.map(|t| format!("{t} ")).unwrap_or_default();
    let mut s = format!("  (rule {tag}{}\n    (body", head_text(p));
    for prem in premises {
        let _ = write!(s, " {prem}");
    }
    s.push_str("\n     ");
    for f in flows {
        let _ = write!(s, " {f}");
    }
    let _ = write!(s, " (out {out}) (guard {guard})))");
    s
}

/// Renders learned rules as Horn-clause text, productions in grammar
/// order; the output is byte-stable for structurally equal semantics.
pub fn emit_chc(sem: &Semantics, g: &Grammar) -> String {
    let mut blocks = Vec::new();
    for p in &g.productions {
        let Some(c) = sem.get(p) else { continue };
        let out_ty = &g.nonterminals[&p.lhs].output_type;
        let in_ty = &g.nonterminals[&p.lhs].input_type;
        match c {
            Constraint::Plain(sc) => {
                let premises: Vec<String> = sc.perm.iter().map(|&s| child_text(p, s)).collect();
                let flows: Vec<String> =
                    sc.perm.iter().map(|&s| flow_text(g, p, s, &sc.flows[s - 1])).collect();
                blocks.push(rule_text(
                    p,
                    None,
                    &premises,
                    &flows,
                    &exprs_text(&sc.output, out_ty),
                    &sc.guard,
                ));
            }
            Constraint::Guarded(gc) => {
                let premises: Vec<String> = gc.perm.iter().map(|&s| child_text(p, s)).collect();
                let flows: Vec<String> =
                    gc.perm.iter().map(|&s| flow_text(g, p, s, &gc.flows[s - 1])).collect();
                blocks.push(rule_text(
                    p,
                    None,
                    &premises,
                    &flows,
                    &exprs_text(&gc.out_then, out_ty),
                    &gc.guard,
                ));
                blocks.push(rule_text(
                    p,
                    None,
                    &premises,
                    &flows,
                    &exprs_text(&gc.out_else, out_ty),
                    &Expr::Not(Box::new(gc.guard.clone())),
                ));
            }
            Constraint::Recursive(rc) => {
                let shared = &rc.perm[..rc.shared_len];
                let premises: Vec<String> = shared.iter().map(|&s| child_text(p, s)).collect();
                let flows: Vec<String> =
                    shared.iter().map(|&s| flow_text(g, p, s, &rc.flows[s - 1])).collect();
                blocks.push(rule_text(
                    p,
                    Some(":nonrec"),
                    &premises,
                    &flows,
                    &exprs_text(&rc.nonrec_out, out_ty),
                    &Expr::Not(Box::new(rc.guard_rec.clone())),
                ));
                let mut premises: Vec<String> =
                    rc.perm.iter().map(|&s| child_text(p, s)).collect();
                premises.push(self_text(p));
                let mut flows: Vec<String> =
                    rc.perm.iter().map(|&s| flow_text(g, p, s, &rc.flows[s - 1])).collect();
                let self_slot = p.arity() + 1;
                flows.push(format!("(flow {self_slot} {})", exprs_text(&rc.self_flow.exprs, in_ty)));
                blocks.push(rule_text(
                    p,
                    Some(":rec"),
                    &premises,
                    &flows,
                    &exprs_text(&rc.rec_out, out_ty),
                    &rc.guard_rec,
                ));
            }
        }
    }
    if blocks.is_empty() {
        "(semantics)\n".to_string()
    } else {
        format!("(semantics\n{})\n", blocks.join("\n"))
    }
}

fn parse_expr(s: &Sexp) -> Result<Expr, String> {
    fn bin(items: &[Sexp], f: fn(Box<Expr>, Box<Expr>) -> Expr) -> Result<Expr, String> {
        if items.len() != 3 {
            return Err(format!("operator {} takes two operands", items[0]));
        }
        Ok(f(Box::new(parse_expr(&items[1])?), Box::new(parse_expr(&items[2])?)))
    }
    match s {
        Sexp::Atom(a) => {
            if a == "true" {
                Ok(Expr::ConstBool(true))
            } else if a == "false" {
                Ok(Expr::ConstBool(false))
            } else if a == "x0" {
                Ok(Expr::VarIn0)
            } else if let Some(rest) = a.strip_prefix('y') {
                rest.parse::<usize>()
                    .map(Expr::VarOut)
                    .map_err(|_| format!("bad output variable {a}"))
            } else {
                a.parse::<i64>().map(Expr::ConstInt).map_err(|_| format!("bad atom {a}"))
            }
        }
        Sexp::List(items) => {
            let head = items
                .first()
                .and_then(Sexp::as_atom)
                .ok_or_else(|| format!("bad expression {s}"))?;
            match head {
                "comp" => {
                    if items.len() != 3 {
                        return Err("comp takes a variable and an index".to_string());
                    }
                    let idx: usize = items[2]
                        .as_atom()
                        .and_then(|a| a.parse().ok())
                        .ok_or("bad component index")?;
                    match parse_expr(&items[1])? {
                        Expr::VarIn0 => Ok(Expr::VarIn0Comp(idx)),
                        Expr::VarOut(j) => Ok(Expr::VarOutComp(j, idx)),
                        other => Err(format!("comp applies to variables, got {other}")),
                    }
                }
                "+" => bin(items, Expr::Add),
                "-" => bin(items, Expr::Sub),
                "*" => bin(items, Expr::Mul),
                "div" => bin(items, Expr::Div),
                "<" => bin(items, Expr::Lt),
                "<=" => bin(items, Expr::Le),
                "=" => bin(items, Expr::EqE),
                "and" => bin(items, Expr::And),
                "or" => bin(items, Expr::Or),
                "not" => {
                    if items.len() != 2 {
                        return Err("not takes one operand".to_string());
                    }
                    Ok(Expr::Not(Box::new(parse_expr(&items[1])?)))
                }
                "ite" => {
                    if items.len() != 4 {
                        return Err("ite takes three operands".to_string());
                    }
                    Ok(Expr::Ite(
                        Box::new(parse_expr(&items[1])?),
                        Box::new(parse_expr(&items[2])?),
                        Box::new(parse_expr(&items[3])?),
                    ))
                }
                other => Err(format!("unknown operator {other}")),
            }
        }
    }
}

fn parse_exprs(s: &Sexp, ty: &ValueType) -> Result<Vec<Expr>, String> {
    if !ty.is_tuple() {
        return Ok(vec![parse_expr(s)?]);
    }
    let items = s.as_list().ok_or_else(|| format!("expected (tuple ...), got {s}"))?;
    match items.first().and_then(Sexp::as_atom) {
        Some("tuple") => {}
        _ => return Err(format!("expected (tuple ...), got {s}")),
    }
    if items.len() - 1 != ty.arity() {
        return Err(format!("expected {} components, got {}", ty.arity(), items.len() - 1));
    }
    items[1..].iter().map(parse_expr).collect()
}

/// One parsed rule block, prior to pairing guarded/recursive twins.
struct RawRule {
    lhs: String,
    op: String,
    tag: Option<String>,
    /// Child slots in premise order; `arity + 1` marks the self premise.
    premise_slots: Vec<usize>,
    flows: Vec<(usize, Vec<Expr>)>,
    out: Vec<Expr>,
    guard: Expr,
}

fn parse_rule(form: &Sexp, g: &Grammar) -> Result<RawRule, String> {
    let items = form.as_list().ok_or("rule must be a list")?;
    match items.first().and_then(Sexp::as_atom) {
        Some("rule") => {}
        _ => return Err(format!("expected (rule ...), got {form}")),
    }
    let mut idx = 1;
    let tag = match items.get(idx).and_then(Sexp::as_atom) {
        Some(t @ (":nonrec" | ":rec")) => {
            idx += 1;
            Some(t.to_string())
        }
        _ => None,
    };

    let head = items.get(idx).and_then(Sexp::as_list).ok_or("rule is missing its head")?;
    idx += 1;
    if head.first().and_then(Sexp::as_atom) != Some("head") || head.len() != 5 {
        return Err("head must be (head Sem_A (op t1..) x0 y0)".to_string());
    }
    let lhs = head[1]
        .as_atom()
        .and_then(|a| a.strip_prefix("Sem_"))
        .ok_or("head predicate must be Sem_<nonterminal>")?
        .to_string();
    let pattern = head[2].as_list().ok_or("head pattern must be a list")?;
    let op = pattern
        .first()
        .and_then(Sexp::as_atom)
        .ok_or("head pattern must start with the operator")?
        .to_string();
    let p = g
        .production(&lhs, &op)
        .ok_or_else(|| format!("no production {op} under {lhs}"))?;
    if pattern.len() - 1 != p.arity() {
        return Err(format!("pattern arity mismatch for {op}"));
    }

    let body = items.get(idx).and_then(Sexp::as_list).ok_or("rule is missing its body")?;
    if items.len() != idx + 1 {
        return Err("rule has trailing forms".to_string());
    }
    if body.first().and_then(Sexp::as_atom) != Some("body") {
        return Err("body must be (body ...)".to_string());
    }

    let self_slot = p.arity() + 1;
    let mut premise_slots = Vec::new();
    let mut flows = Vec::new();
    let mut out = None;
    let mut guard = None;
    for part in &body[1..] {
        let sub = part.as_list().ok_or_else(|| format!("bad body form {part}"))?;
        match sub.first().and_then(Sexp::as_atom) {
            Some("child") => {
                if sub.len() != 5 {
                    return Err("child premise takes predicate, term, input, output".to_string());
                }
                let term = sub[2].as_atom().ok_or("child term must be t<i> or self")?;
                let slot = if term == "self" {
                    self_slot
                } else {
                    term.strip_prefix('t')
                        .and_then(|r| r.parse::<usize>().ok())
                        .filter(|s| (1..=p.arity()).contains(s))
                        .ok_or_else(|| format!("bad child term {term}"))?
                };
                premise_slots.push(slot);
            }
            Some("flow") => {
                if sub.len() != 3 {
                    return Err("flow takes a slot and an expression".to_string());
                }
                let slot: usize = sub[1]
                    .as_atom()
                    .and_then(|a| a.parse().ok())
                    .ok_or("bad flow slot")?;
                let ty = if slot == self_slot {
                    &g.nonterminals[&p.lhs].input_type
                } else if (1..=p.arity()).contains(&slot) {
                    &g.nonterminals[&p.rhs[slot - 1]].input_type
                } else {
                    return Err(format!("flow slot {slot} out of range for {op}"));
                };
                flows.push((slot, parse_exprs(&sub[2], ty)?));
            }
            Some("out") => {
                if sub.len() != 2 {
                    return Err("out takes one expression".to_string());
                }
                out = Some(parse_exprs(&sub[1], &g.nonterminals[&p.lhs].output_type)?);
            }
            Some("guard") => {
                if sub.len() != 2 {
                    return Err("guard takes one expression".to_string());
                }
                guard = Some(parse_expr(&sub[1])?);
            }
            _ => return Err(format!("unknown body form {part}")),
        }
    }
    Ok(RawRule {
        lhs,
        op,
        tag,
        premise_slots,
        flows,
        out: out.ok_or("rule is missing (out ...)")?,
        guard: guard.ok_or("rule is missing (guard ...)")?,
    })
}

fn flows_by_slot(raw: &RawRule, slots: &[usize], what: &str) -> Result<Vec<Flow>, String> {
    let mut out = vec![None; slots.len()];
    for (slot, exprs) in &raw.flows {
        if let Some(pos) = slots.iter().position(|s| s == slot) {
            out[pos] = Some(Flow::new(exprs.clone()));
        } else {
            return Err(format!("{what}: flow {slot} has no matching premise"));
        }
    }
    out.into_iter()
        .enumerate()
        .map(|(i, f)| f.ok_or_else(|| format!("{what}: premise {} has no flow", slots[i])))
        .collect()
}

fn assemble(p: &Production, rules: Vec<RawRule>) -> Result<Constraint, String> {
    let n = p.arity();
    let what = format!("{}::{}", p.lhs, p.op);
    let tagged = rules.iter().any(|r| r.tag.is_some());
    if tagged {
        if rules.len() != 2 || rules.iter().filter(|r| r.tag.as_deref() == Some(":rec")).count() != 1
        {
            return Err(format!("{what}: recursive production needs one :nonrec and one :rec rule"));
        }
        let mut nonrec = None;
        let mut rec = None;
        for r in rules {
            match r.tag.as_deref() {
                Some(":rec") => rec = Some(r),
                _ => nonrec = Some(r),
            }
        }
        let (nonrec, rec) = (nonrec.unwrap(), rec.unwrap());
        let self_slot = n + 1;
        if rec.premise_slots.last() != Some(&self_slot) {
            return Err(format!("{what}: the :rec rule must end with the self premise"));
        }
        let perm: Vec<usize> = rec.premise_slots[..n].to_vec();
        {
            let mut sorted = perm.clone();
            sorted.sort_unstable();
            if sorted != (1..=n).collect::<Vec<_>>() {
                return Err(format!("{what}: :rec premises must cover every child"));
            }
        }
        let shared_len = nonrec.premise_slots.len();
        if nonrec.premise_slots != perm[..shared_len] {
            return Err(format!("{what}: :nonrec premises must be a prefix of the :rec order"));
        }
        if nonrec.guard != Expr::Not(Box::new(rec.guard.clone())) {
            return Err(format!("{what}: :nonrec guard must negate the :rec guard"));
        }
        let mut all_slots = perm.clone();
        all_slots.push(self_slot);
        let rec_flows = flows_by_slot(&rec, &all_slots, &what)?;
        let nonrec_flows = flows_by_slot(&nonrec, &nonrec.premise_slots, &what)?;
        for (i, &slot) in nonrec.premise_slots.iter().enumerate() {
            let pos = perm.iter().position(|s| *s == slot).unwrap();
            if nonrec_flows[i] != rec_flows[pos] {
                return Err(format!("{what}: shared flows differ between the two rules"));
            }
        }
        let mut flows = vec![None; n];
        for (pos, &slot) in perm.iter().enumerate() {
            flows[slot - 1] = Some(rec_flows[pos].clone());
        }
        Ok(Constraint::Recursive(RecursiveConstraint {
            perm,
            shared_len,
            flows: flows.into_iter().map(Option::unwrap).collect(),
            guard_rec: rec.guard,
            nonrec_out: nonrec.out,
            self_flow: rec_flows[n].clone(),
            rec_out: rec.out,
        }))
    } else if rules.len() == 1 {
        let raw = rules.into_iter().next().unwrap();
        let perm = raw.premise_slots.clone();
        {
            let mut sorted = perm.clone();
            sorted.sort_unstable();
            if sorted != (1..=n).collect::<Vec<_>>() {
                return Err(format!("{what}: premises must cover every child exactly once"));
            }
        }
        let by_perm = flows_by_slot(&raw, &perm, &what)?;
        let mut flows = vec![None; n];
        for (pos, &slot) in perm.iter().enumerate() {
            flows[slot - 1] = Some(by_perm[pos].clone());
        }
        Ok(Constraint::Plain(SemanticConstraint {
            perm,
            flows: flows.into_iter().map(Option::unwrap).collect(),
            output: raw.out,
            guard: raw.guard,
        }))
    } else if rules.len() == 2 {
        let mut it = rules.into_iter();
        let (first, second) = (it.next().unwrap(), it.next().unwrap());
        if first.premise_slots != second.premise_slots || first.flows != second.flows {
            return Err(format!("{what}: branch rules must share premises and flows"));
        }
        if second.guard != Expr::Not(Box::new(first.guard.clone())) {
            return Err(format!("{what}: second branch guard must negate the first"));
        }
        let perm = first.premise_slots.clone();
        {
            let mut sorted = perm.clone();
            sorted.sort_unstable();
            if sorted != (1..=n).collect::<Vec<_>>() {
                return Err(format!("{what}: premises must cover every child exactly once"));
            }
        }
        let by_perm = flows_by_slot(&first, &perm, &what)?;
        let mut flows = vec![None; n];
        for (pos, &slot) in perm.iter().enumerate() {
            flows[slot - 1] = Some(by_perm[pos].clone());
        }
        Ok(Constraint::Guarded(GuardedConstraint {
            perm,
            flows: flows.into_iter().map(Option::unwrap).collect(),
            guard: first.guard,
            out_then: first.out,
            out_else: second.out,
        }))
    } else {
        Err(format!("{what}: expected one or two rules, got {}", rules.len()))
    }
}

/// Parses Horn-clause text back into semantics; inverse of [`emit_chc`].
pub fn parse_chc(text: &str, g: &Grammar) -> Result<Semantics, String> {
    let top = crate::sexp::parse_one(text)?;
    let items = top.as_list().ok_or("semantics file must be a single list")?;
    match items.first().and_then(Sexp::as_atom) {
        Some("semantics") => {}
        _ => return Err("semantics file must start with (semantics ...)".to_string()),
    }
    let mut grouped: Vec<((String, String), Vec<RawRule>)> = Vec::new();
    for form in &items[1..] {
        let raw = parse_rule(form, g)?;
        let key = (raw.lhs.clone(), raw.op.clone());
        match grouped.iter_mut().find(|(k, _)| *k == key) {
            Some((_, v)) => v.push(raw),
            None => grouped.push((key, vec![raw])),
        }
    }
    let mut sem = Semantics::new();
    for ((lhs, op), rules) in grouped {
        let p = g.production(&lhs, &op).expect("validated during rule parse");
        sem.insert(p, assemble(p, rules)?);
    }
    Ok(sem)
}
