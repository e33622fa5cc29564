//! Bottom-up expression enumeration with observational-equivalence pruning.
//!
//! Candidate expressions are generated in nondecreasing size. Within a size
//! the constructor order is fixed (variables, constants, not, add, sub, mul,
//! div, lt, le, =, and, or, ite) and operand tuples are ordered by comparing
//! the rightmost operand first. Variables precede constants at size one
//! because identity-shaped data flows dominate real rules; putting them
//! first keeps the flow search from wading through every constant probe on
//! its way to the routing that actually generalizes. Every generated
//! expression is evaluated on the provided valuation rows; an expression
//! whose result vector duplicates an earlier one is dropped, so the
//! surviving stream contains exactly one (the earliest) representative per
//! observable behavior. With no rows the pruning is vacuous and the stream
//! is the raw size-ordered enumeration.
//!
//! Result vectors record faults: an expression that gets stuck on a row
//! (overflow, division by zero) is distinguishable from one that does not.
//!
//! Storage is bounded: integer expressions are kept up to size five and
//! Boolean expressions up to size seven, because the count of distinct
//! integer behaviors explodes with scope width while Boolean behaviors
//! collapse under pruning. Callers needing a larger expression with a known
//! target behavior complete it top-down instead (see the synthesizer); the
//! bank only ever materializes the small building blocks.

use std::collections::BTreeMap;

use crate::semantics::{int_add, int_div, int_mul, int_sub, Expr};
use crate::value::{Scalar, ScalarType};

/// Operators the enumerator may use. `Ite` counts as an integer operator
/// when selecting integers and as a Boolean operator when selecting
/// Booleans.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
pub enum OpKind {
    Add,
    Sub,
    Mul,
    Div,
    Lt,
    Le,
    EqE,
    Not,
    And,
    Or,
    Ite,
}

/// The search space for one synthesis problem: which operators and extra
/// constants candidate expressions may use, whether a child may read an
/// earlier sibling's output, and how large one expression may grow.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(default)]
pub struct ComponentGrammar {
    pub int_ops: Vec<OpKind>,
    pub bool_ops: Vec<OpKind>,
    pub allow_sibling_flow: bool,
    pub extra_consts: Vec<i64>,
    pub max_expr_size: usize,
}

impl Default for ComponentGrammar {
    fn default() -> ComponentGrammar {
        ComponentGrammar {
            int_ops: vec![OpKind::Add, OpKind::Sub, OpKind::Mul, OpKind::Div, OpKind::Ite],
            bool_ops: vec![
                OpKind::Lt,
                OpKind::Le,
                OpKind::EqE,
                OpKind::Not,
                OpKind::And,
                OpKind::Or,
                OpKind::Ite,
            ],
            allow_sibling_flow: true,
            extra_consts: Vec::new(),
            max_expr_size: 9,
        }
    }
}

impl ComponentGrammar {
    pub fn check(&self) -> Result<(), String> {
        if self.max_expr_size == 0 {
            return Err("max_expr_size must be at least 1".to_string());
        }
        Ok(())
    }

    pub(crate) fn int_has(&self, op: OpKind) -> bool {
        self.int_ops.contains(&op)
    }

    pub(crate) fn bool_has(&self, op: OpKind) -> bool {
        self.bool_ops.contains(&op)
    }
}

/// An expression's observed results, one slot per valuation row; `None`
/// records a fault on that row.
pub type Behavior = Vec<Option<Scalar>>;

/// Largest stored integer expression. Beyond this the bank would hold one
/// entry per distinct behavior, which over a handful of integer variables
/// is essentially every expression.
pub const STORED_INT_CAP: usize = 5;

/// Largest stored Boolean expression. Boolean behaviors collapse hard
/// under pruning, so the ceiling can sit higher; predicates up to
/// comparisons of stored integer operands remain reachable.
pub const STORED_BOOL_CAP: usize = 7;

#[derive(Debug, Clone)]
pub struct BankEntry {
    pub expr: Expr,
    pub ty: ScalarType,
    pub size: usize,
    pub behavior: Behavior,
}

/// Size-indexed store of enumerated expressions over a fixed variable scope
/// and fixed valuation rows. Grows on demand; lookups by behavior return the
/// earliest representative.
pub struct ExprBank {
    vars: Vec<(Expr, ScalarType)>,
    rows: Vec<Vec<Scalar>>,
    consts: Vec<i64>,
    cg: ComponentGrammar,
    entries: Vec<BankEntry>,
    by_size: Vec<Vec<usize>>,
    seen: BTreeMap<Behavior, usize>,
    built: usize,
    prune: bool,
    unbounded: bool,
}

/// Deterministic constant pool: the base constants, then configured extras,
/// then scalars harvested from the problem's examples, first occurrence
/// wins.
pub fn const_pool(extra: &[i64], harvested: &[i64]) -> Vec<i64> {
    let mut pool = vec![0, 1, 2, -1];
    for &c in extra.iter().chain(harvested) {
        if !pool.contains(&c) {
            pool.push(c);
        }
    }
    pool
}

impl ExprBank {
    /// `vars` lists the in-scope variables with their types; `rows` holds
    /// one value per variable per valuation row. With empty `rows` the bank
    /// keeps every expression (nothing is observably equal to anything).
    pub fn new(
        cg: &ComponentGrammar,
        vars: Vec<(Expr, ScalarType)>,
        rows: Vec<Vec<Scalar>>,
        consts: Vec<i64>,
    ) -> ExprBank {
        for r in &rows {
            assert_eq!(r.len(), vars.len(), "valuation row arity mismatch");
        }
        let prune = !rows.is_empty();
        ExprBank {
            vars,
            rows,
            consts,
            cg: cg.clone(),
            entries: Vec::new(),
            by_size: vec![Vec::new()],
            seen: BTreeMap::new(),
            built: 0,
            prune,
            unbounded: false,
        }
    }

    pub fn entries(&self) -> &[BankEntry] {
        &self.entries
    }

    pub fn rows(&self) -> usize {
        self.rows.len()
    }

    /// Highest size fully built so far.
    pub fn built(&self) -> usize {
        self.built
    }

    /// Evaluates an arbitrary expression over this bank's rows. Leaves that
    /// are not constants must be variables of the bank's scope. Used to
    /// check expressions assembled outside the bank itself.
    pub fn eval_on_rows(&self, expr: &Expr) -> Behavior {
        match expr {
            Expr::ConstInt(n) => vec![Some(Scalar::Int(*n)); self.rows.len()],
            Expr::ConstBool(b) => vec![Some(Scalar::Bool(*b)); self.rows.len()],
            Expr::Not(a) => map_unary(&self.eval_on_rows(a), |x| match x {
                Scalar::Bool(b) => Some(Scalar::Bool(!b)),
                Scalar::Int(_) => unreachable!("negation of an integer"),
            }),
            Expr::Add(l, r) => self.eval_binary(OpKind::Add, l, r),
            Expr::Sub(l, r) => self.eval_binary(OpKind::Sub, l, r),
            Expr::Mul(l, r) => self.eval_binary(OpKind::Mul, l, r),
            Expr::Div(l, r) => self.eval_binary(OpKind::Div, l, r),
            Expr::Lt(l, r) => self.eval_binary(OpKind::Lt, l, r),
            Expr::Le(l, r) => self.eval_binary(OpKind::Le, l, r),
            Expr::EqE(l, r) => self.eval_binary(OpKind::EqE, l, r),
            Expr::And(l, r) => self.eval_binary(OpKind::And, l, r),
            Expr::Or(l, r) => self.eval_binary(OpKind::Or, l, r),
            Expr::Ite(c, a, b) => ite_behavior(
                &self.eval_on_rows(c),
                &self.eval_on_rows(a),
                &self.eval_on_rows(b),
            ),
            leaf => {
                let col = self
                    .vars
                    .iter()
                    .position(|(v, _)| v == leaf)
                    .unwrap_or_else(|| panic!("expression leaf {leaf} is not in scope"));
                self.rows.iter().map(|r| Some(r[col].clone())).collect()
            }
        }
    }

    fn eval_binary(&self, op: OpKind, l: &Expr, r: &Expr) -> Behavior {
        combine_binary(op, &self.eval_on_rows(l), &self.eval_on_rows(r))
    }

    /// Indices of entries with this exact size, in enumeration order.
    pub fn of_size(&self, size: usize) -> &[usize] {
        self.by_size.get(size).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Earliest entry of the given type whose behavior equals `target`.
    /// The bank must already be grown to the size you are willing to pay.
    pub fn find(&self, ty: &ScalarType, target: &Behavior) -> Option<usize> {
        if self.prune {
            self.seen.get(target).copied().filter(|&i| self.entries[i].ty == *ty)
        } else {
            self.entries.iter().position(|e| e.ty == *ty && e.behavior == *target)
        }
    }

    /// Largest size at which expressions of this type are stored.
    pub fn stored_cap(&self, ty: &ScalarType) -> usize {
        if self.unbounded {
            return self.cg.max_expr_size;
        }
        let ceiling = match ty {
            ScalarType::Int => STORED_INT_CAP,
            ScalarType::Bool => STORED_BOOL_CAP,
        };
        ceiling.min(self.cg.max_expr_size)
    }

    pub fn grow_to(&mut self, size: usize) {
        let mut unlimited = u64::MAX;
        self.grow_to_fueled(size, &mut unlimited);
    }

    /// Grows one complete size at a time, charging the construction work
    /// against `fuel` and stopping before any size it can no longer afford.
    /// Finished sizes stay valid, so a later call with fresh fuel resumes
    /// exactly where this one stopped.
    pub fn grow_to_fueled(&mut self, size: usize, fuel: &mut u64) {
        let limit =
            self.stored_cap(&ScalarType::Int).max(self.stored_cap(&ScalarType::Bool));
        let size = size.min(limit);
        while self.built < size {
            if *fuel == 0 {
                return;
            }
            let s = self.built + 1;
            let work = self.build_size(s);
            *fuel = fuel.saturating_sub(work);
            self.built = s;
        }
    }

    fn push(&mut self, expr: Expr, ty: ScalarType, size: usize, behavior: Behavior) {
        if self.prune && self.seen.contains_key(&behavior) {
            return;
        }
        let idx = self.entries.len();
        if self.prune {
            self.seen.insert(behavior.clone(), idx);
        }
        while self.by_size.len() <= size {
            self.by_size.push(Vec::new());
        }
        self.by_size[size].push(idx);
        self.entries.push(BankEntry { expr, ty, size, behavior });
    }

    fn build_size(&mut self, s: usize) -> u64 {
        let mut work: u64 = 0;
        if s == 1 {
            for vi in 0..self.vars.len() {
                let (expr, ty) = self.vars[vi].clone();
                let b = self.rows.iter().map(|r| Some(r[vi].clone())).collect();
                self.push(expr, ty, 1, b);
            }
            for i in 0..self.consts.len() {
                let c = self.consts[i];
                let b = vec![Some(Scalar::Int(c)); self.rows.len()];
                self.push(Expr::ConstInt(c), ScalarType::Int, 1, b);
            }
            for v in [false, true] {
                let b = vec![Some(Scalar::Bool(v)); self.rows.len()];
                self.push(Expr::ConstBool(v), ScalarType::Bool, 1, b);
            }
            return (self.vars.len() + self.consts.len() + 2) as u64;
        }
        let keep_int = s <= self.stored_cap(&ScalarType::Int);
        let keep_bool = s <= self.stored_cap(&ScalarType::Bool);
        if keep_bool && self.cg.bool_has(OpKind::Not) {
            for &a in self.of_size(s - 1).to_vec().iter() {
                if self.entries[a].ty != ScalarType::Bool {
                    continue;
                }
                work += 1;
                let b = map_unary(&self.entries[a].behavior, |x| match x {
                    Scalar::Bool(v) => Some(Scalar::Bool(!v)),
                    Scalar::Int(_) => unreachable!("not over integer operand"),
                });
                self.push(Expr::Not(Box::new(self.entries[a].expr.clone())), ScalarType::Bool, s, b);
            }
        }
        for op in [OpKind::Add, OpKind::Sub, OpKind::Mul, OpKind::Div, OpKind::Lt, OpKind::Le, OpKind::EqE, OpKind::And, OpKind::Or] {
            let (operand_ty, result_ty) = match op {
                OpKind::Add | OpKind::Sub | OpKind::Mul | OpKind::Div => (ScalarType::Int, ScalarType::Int),
                OpKind::Lt | OpKind::Le | OpKind::EqE => (ScalarType::Int, ScalarType::Bool),
                _ => (ScalarType::Bool, ScalarType::Bool),
            };
            let available = match result_ty {
                ScalarType::Int => keep_int && self.cg.int_has(op),
                ScalarType::Bool => keep_bool && self.cg.bool_has(op),
            };
            if !available {
                continue;
            }
            // Rightmost operand is the most significant tie-breaker.
            for r in 0..self.entries.len() {
                if self.entries[r].ty != operand_ty || self.entries[r].size + 2 > s {
                    continue;
                }
                let left_size = s - 1 - self.entries[r].size;
                for &l in self.of_size(left_size).to_vec().iter() {
                    if self.entries[l].ty != operand_ty {
                        continue;
                    }
                    work += 1;
                    let behavior = combine_binary(op, &self.entries[l].behavior, &self.entries[r].behavior);
                    let e = make_binary(op, self.entries[l].expr.clone(), self.entries[r].expr.clone());
                    self.push(e, result_ty.clone(), s, behavior);
                }
            }
        }
        for branch_ty in [ScalarType::Int, ScalarType::Bool] {
            let available = match branch_ty {
                ScalarType::Int => keep_int && self.cg.int_has(OpKind::Ite),
                ScalarType::Bool => keep_bool && self.cg.bool_has(OpKind::Ite),
            };
            if !available || s < 4 {
                continue;
            }
            for b_idx in 0..self.entries.len() {
                if self.entries[b_idx].ty != branch_ty || self.entries[b_idx].size + 3 > s {
                    continue;
                }
                for a_idx in 0..self.entries.len() {
                    if self.entries[a_idx].ty != branch_ty {
                        continue;
                    }
                    let used = self.entries[a_idx].size + self.entries[b_idx].size;
                    if used + 2 > s {
                        continue;
                    }
                    let cond_size = s - 1 - used;
                    for &c_idx in self.of_size(cond_size).to_vec().iter() {
                        if self.entries[c_idx].ty != ScalarType::Bool {
                            continue;
                        }
                        work += 1;
                        let behavior = ite_behavior(
                            &self.entries[c_idx].behavior,
                            &self.entries[a_idx].behavior,
                            &self.entries[b_idx].behavior,
                        );
                        let e = Expr::Ite(
                            Box::new(self.entries[c_idx].expr.clone()),
                            Box::new(self.entries[a_idx].expr.clone()),
                            Box::new(self.entries[b_idx].expr.clone()),
                        );
                        self.push(e, branch_ty.clone(), s, behavior);
                    }
                }
            }
        }
        work
    }
}

fn map_unary(a: &Behavior, f: impl Fn(&Scalar) -> Option<Scalar>) -> Behavior {
    a.iter().map(|x| x.as_ref().and_then(&f)).collect()
}

pub(crate) fn make_binary(op: OpKind, l: Expr, r: Expr) -> Expr {
    let (l, r) = (Box::new(l), Box::new(r));
    match op {
        OpKind::Add => Expr::Add(l, r),
        OpKind::Sub => Expr::Sub(l, r),
        OpKind::Mul => Expr::Mul(l, r),
        OpKind::Div => Expr::Div(l, r),
        OpKind::Lt => Expr::Lt(l, r),
        OpKind::Le => Expr::Le(l, r),
        OpKind::EqE => Expr::EqE(l, r),
        OpKind::And => Expr::And(l, r),
        OpKind::Or => Expr::Or(l, r),
        OpKind::Not | OpKind::Ite => unreachable!("not a binary operator"),
    }
}

/// Row-wise result of a binary operator, mirroring expression evaluation
/// exactly: `and`/`or` short-circuit, everything else is strict, integer
/// arithmetic faults propagate as `None`.
pub(crate) fn combine_binary(op: OpKind, l: &Behavior, r: &Behavior) -> Behavior {
    l.iter()
        .zip(r)
        .map(|(a, b)| match op {
            OpKind::And => match a {
                None => None,
                Some(Scalar::Bool(false)) => Some(Scalar::Bool(false)),
                Some(Scalar::Bool(true)) => b.clone(),
                Some(Scalar::Int(_)) => unreachable!("and over integer operand"),
            },
            OpKind::Or => match a {
                None => None,
                Some(Scalar::Bool(true)) => Some(Scalar::Bool(true)),
                Some(Scalar::Bool(false)) => b.clone(),
                Some(Scalar::Int(_)) => unreachable!("or over integer operand"),
            },
            _ => {
                let (x, y) = match (a, b) {
                    (Some(Scalar::Int(x)), Some(Scalar::Int(y))) => (*x, *y),
                    (None, _) | (_, None) => return None,
                    _ => unreachable!("integer operator over boolean operand"),
                };
                match op {
                    OpKind::Add => int_add(x, y).ok().map(Scalar::Int),
                    OpKind::Sub => int_sub(x, y).ok().map(Scalar::Int),
                    OpKind::Mul => int_mul(x, y).ok().map(Scalar::Int),
                    OpKind::Div => int_div(x, y).ok().map(Scalar::Int),
                    OpKind::Lt => Some(Scalar::Bool(x < y)),
                    OpKind::Le => Some(Scalar::Bool(x <= y)),
                    OpKind::EqE => Some(Scalar::Bool(x == y)),
                    _ => unreachable!(),
                }
            }
        })
        .collect()
}

/// The condition is evaluated first and only the taken branch is observed.
fn ite_behavior(c: &Behavior, a: &Behavior, b: &Behavior) -> Behavior {
    c.iter()
        .enumerate()
        .map(|(i, cond)| match cond {
            None => None,
            Some(Scalar::Bool(true)) => a[i].clone(),
            Some(Scalar::Bool(false)) => b[i].clone(),
            Some(Scalar::Int(_)) => unreachable!("integer condition"),
        })
        .collect()
}

/// The pruned stream as a plain list: all surviving expressions of the
/// requested type up to `max_size`, in enumeration order.
pub fn enumerate_exprs(
    cg: &ComponentGrammar,
    vars: Vec<(Expr, ScalarType)>,
    rows: Vec<Vec<Scalar>>,
    consts: Vec<i64>,
    ty: &ScalarType,
    max_size: usize,
) -> Vec<Expr> {
    let mut bank = ExprBank::new(cg, vars, rows, consts);
    bank.grow_to(max_size);
    bank.entries()
        .iter()
        .filter(|e| e.ty == *ty)
        .map(|e| e.expr.clone())
        .collect()
}

/// Reference enumerator without pruning or storage ceilings, used to
/// validate that pruning never loses a behavior and as a ground-truth
/// oracle in tests. Exponential; keep the bounds small.
pub fn enumerate_unpruned(
    cg: &ComponentGrammar,
    vars: Vec<(Expr, ScalarType)>,
    rows: Vec<Vec<Scalar>>,
    consts: Vec<i64>,
    max_size: usize,
) -> Vec<BankEntry> {
    let mut bank = ExprBank::new(cg, vars, rows, consts);
    bank.prune = false;
    bank.unbounded = true;
    bank.grow_to(max_size);
    bank.entries.clone()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x0_rows() -> (Vec<(Expr, ScalarType)>, Vec<Vec<Scalar>>) {
        (
            vec![(Expr::VarIn0, ScalarType::Int)],
            vec![vec![Scalar::Int(0)], vec![Scalar::Int(1)]],
        )
    }

    fn beh(vals: &[i64]) -> Behavior {
        vals.iter().map(|&v| Some(Scalar::Int(v))).collect()
    }

    #[test]
    fn constant_behavior_is_found_at_size_one() {
        let (vars, rows) = x0_rows();
        let mut bank = ExprBank::new(&ComponentGrammar::default(), vars, rows, const_pool(&[], &[]));
        bank.grow_to(1);
        let idx = bank.find(&ScalarType::Int, &beh(&[0, 0])).unwrap();
        assert_eq!(bank.entries()[idx].expr, Expr::ConstInt(0));
    }

    #[test]
    fn identity_behavior_is_the_variable() {
        let (vars, rows) = x0_rows();
        let mut bank = ExprBank::new(&ComponentGrammar::default(), vars, rows, const_pool(&[], &[]));
        bank.grow_to(1);
        let idx = bank.find(&ScalarType::Int, &beh(&[0, 1])).unwrap();
        assert_eq!(bank.entries()[idx].expr, Expr::VarIn0);
    }

    #[test]
    fn successor_behavior_matches_the_reference_enumeration() {
        // Rows x0 in {0, 1}; the behavior [1, 2] requires size 3. The
        // pruned bank must return exactly the expression the unpruned
        // reference stream yields first: with the variable enumerated
        // before the constants and the rightmost operand leading, that is
        // 1 + x0, not x0 + 1.
        let (vars, rows) = x0_rows();
        let cg = ComponentGrammar::default();
        let pool = const_pool(&[], &[]);
        let all = enumerate_unpruned(&cg, vars.clone(), rows.clone(), pool.clone(), 3);
        let reference = all
            .iter()
            .find(|e| e.ty == ScalarType::Int && e.behavior == beh(&[1, 2]))
            .expect("reference stream realizes [1,2]");
        assert_eq!(
            reference.expr,
            Expr::Add(Box::new(Expr::ConstInt(1)), Box::new(Expr::VarIn0))
        );
        let mut bank = ExprBank::new(&cg, vars, rows, pool);
        bank.grow_to(3);
        let idx = bank.find(&ScalarType::Int, &beh(&[1, 2])).unwrap();
        assert_eq!(bank.entries()[idx].expr, reference.expr);
    }

    #[test]
    fn pruning_loses_no_behavior_and_keeps_first_representatives() {
        let (vars, rows) = x0_rows();
        let cg = ComponentGrammar::default();
        let pool = const_pool(&[], &[]);
        let all = enumerate_unpruned(&cg, vars.clone(), rows.clone(), pool.clone(), 4);
        let mut bank = ExprBank::new(&cg, vars, rows, pool);
        bank.grow_to(4);
        let mut first_seen: BTreeMap<Behavior, &Expr> = BTreeMap::new();
        for e in &all {
            first_seen.entry(e.behavior.clone()).or_insert(&e.expr);
        }
        for (behavior, expr) in &first_seen {
            let ty = if matches!(
                behavior.iter().flatten().next(),
                Some(Scalar::Bool(_))
            ) {
                ScalarType::Bool
            } else {
                ScalarType::Int
            };
            let idx = bank
                .find(&ty, behavior)
                .unwrap_or_else(|| panic!("behavior lost by pruning: {behavior:?}"));
            assert_eq!(&bank.entries()[idx].expr, *expr);
        }
    }

    #[test]
    fn faults_are_part_of_behavior() {
        // x0 in {0, 2}: dividing by x0 faults on the first row only, and
        // x0 / x0 is the first enumerated expression with that shape.
        let vars = vec![(Expr::VarIn0, ScalarType::Int)];
        let rows = vec![vec![Scalar::Int(0)], vec![Scalar::Int(2)]];
        let mut bank =
            ExprBank::new(&ComponentGrammar::default(), vars, rows, const_pool(&[], &[]));
        bank.grow_to(3);
        let target: Behavior = vec![None, Some(Scalar::Int(1))];
        let idx = bank.find(&ScalarType::Int, &target).expect("div by x0 enumerated");
        assert_eq!(
            bank.entries()[idx].expr,
            Expr::Div(Box::new(Expr::VarIn0), Box::new(Expr::VarIn0))
        );
    }

    #[test]
    fn empty_rows_disable_pruning() {
        let vars = vec![(Expr::VarIn0, ScalarType::Int)];
        let bank_exprs = enumerate_exprs(
            &ComponentGrammar::default(),
            vars,
            Vec::new(),
            const_pool(&[], &[]),
            &ScalarType::Int,
            1,
        );
        // Everything survives: the variable first, then four constants.
        assert_eq!(bank_exprs.len(), 5);
        assert_eq!(bank_exprs[0], Expr::VarIn0);
        assert_eq!(bank_exprs[1], Expr::ConstInt(0));
        assert_eq!(bank_exprs[4], Expr::ConstInt(-1));
    }

    #[test]
    fn harvested_constants_join_the_pool_once() {
        let pool = const_pool(&[21], &[152, 21, 0]);
        assert_eq!(pool, vec![0, 1, 2, -1, 21, 152]);
    }

    #[test]
    fn storage_ceilings_bound_what_the_bank_keeps() {
        // Two integer variables, distinct rows: integer behaviors do not
        // collapse, so only the ceilings keep growth bounded. Integers
        // stop at size five, Booleans at seven, nothing beyond.
        let vars = vec![
            (Expr::VarIn0Comp(0), ScalarType::Int),
            (Expr::VarIn0Comp(1), ScalarType::Int),
        ];
        let rows = vec![
            vec![Scalar::Int(3), Scalar::Int(10)],
            vec![Scalar::Int(-7), Scalar::Int(4)],
            vec![Scalar::Int(0), Scalar::Int(1)],
        ];
        let mut bank =
            ExprBank::new(&ComponentGrammar::default(), vars, rows, const_pool(&[], &[]));
        bank.grow_to(9);
        assert!(!bank.of_size(5).is_empty());
        for size in 6..=7 {
            assert!(bank
                .of_size(size)
                .iter()
                .all(|&i| bank.entries()[i].ty == ScalarType::Bool));
        }
        for size in 8..=9 {
            assert!(bank.of_size(size).is_empty());
        }
    }

    #[test]
    fn sibling_free_grammar_still_enumerates() {
        let cg = ComponentGrammar { allow_sibling_flow: false, ..Default::default() };
        cg.check().unwrap();
        let exprs = enumerate_exprs(
            &cg,
            vec![(Expr::VarIn0, ScalarType::Int)],
            vec![vec![Scalar::Int(3)]],
            const_pool(&[], &[]),
            &ScalarType::Int,
            2,
        );
        assert!(exprs.contains(&Expr::VarIn0));
    }
}
