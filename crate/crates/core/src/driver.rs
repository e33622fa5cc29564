//! Whole-language synthesis runs.
//!
//! [`sem_synth`] walks a grammar production by production and runs one
//! counterexample-guided loop per production: propose the smallest rule
//! consistent with the examples collected so far, fuzz it against the
//! interpreter, and on disagreement absorb the failing sample and retry.
//! Productions are ordered so that leaves come first and recursive rules
//! last, which lets the fuzzer bias its random subterms toward productions
//! whose rules are already trusted.
//!
//! When the search space at the default expression size is exhausted the
//! loop escalates: a larger size bound, then a guarded (two-branch) rule,
//! then the next child evaluation order, and for productions with several
//! output components the componentwise path is tried before the joint one.
//! If every shape is exhausted the loop draws a batch of fresh random
//! examples and retries, since a richer example set both unlocks constants
//! harvested from observed values and separates expressions that happened
//! to collide on the old rows. Runs are cut off per production and
//! globally; a timed-out production is skipped and later productions are
//! still attempted.

use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

use crate::enumerate::ComponentGrammar;
use crate::example::{Example, Summaries};
use crate::grammar::{Grammar, Production};
use crate::interp::{gen_input, gen_term, make_example, FuzzConfig, LanguageBundle, LearnedSet};
use crate::semantics::{Constraint, Semantics};
use crate::synth::{
    permute_schedule, synth_constraint, synth_guarded, synth_multi_output, synth_recursive,
    SynthesisProblem,
};
use crate::verify::verify;

/// Everything a run needs besides the language bundle itself.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    /// Language id, informational only; the bundle passed to [`sem_synth`]
    /// decides what actually runs.
    pub lang: String,
    pub fuzz: FuzzConfig,
    /// Search space for candidate expressions at the first ladder rung.
    pub components: ComponentGrammar,
    /// Synthesize multi-component outputs one component at a time.
    pub multi_output: bool,
    pub per_production_timeout_ms: u64,
    pub global_timeout_ms: u64,
}

impl Default for RunConfig {
    fn default() -> RunConfig {
        RunConfig {
            lang: String::new(),
            fuzz: FuzzConfig::default(),
            components: ComponentGrammar::default(),
            multi_output: true,
            per_production_timeout_ms: 600_000,
            global_timeout_ms: 900_000,
        }
    }
}

impl RunConfig {
    pub fn check(&self) -> Result<(), String> {
        self.fuzz.check()?;
        self.components.check()?;
        if self.per_production_timeout_ms == 0 {
            return Err("per-production timeout must be positive".to_string());
        }
        if self.global_timeout_ms == 0 {
            return Err("global timeout must be positive".to_string());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Solved,
    Timeout,
    NoSolution,
}

/// One production's share of a run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProductionReport {
    pub nonterminal: String,
    pub op: String,
    pub status: Status,
    /// Propose-and-check rounds, counting rounds spent drawing extra
    /// examples after an exhausted search.
    pub iterations: usize,
    /// Root examples accumulated by the end of the run.
    pub examples: usize,
    pub synth_ms: u64,
    pub check_ms: u64,
    pub total_ms: u64,
    /// Node count of the learned rule, 0 if none was found.
    pub constraint_size: usize,
}

pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub lang: String,
    pub seed: u64,
    pub solved: usize,
    pub productions: Vec<ProductionReport>,
}

impl RunReport {
    pub fn all_solved(&self) -> bool {
        self.productions.iter().all(|p| p.status == Status::Solved)
    }

    /// Copy with every duration field zeroed, for comparing two runs that
    /// should agree on everything but timing.
    pub fn normalized(&self) -> RunReport {
        let mut r = self.clone();
        for p in &mut r.productions {
            p.synth_ms = 0;
            p.check_ms = 0;
            p.total_ms = 0;
        }
        r
    }
}

/// Serialize a report as pretty JSON with a trailing newline. Field order
/// is fixed by the struct definitions, so equal reports yield equal bytes.
pub fn write_report(report: &RunReport) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serializes");
    s.push('\n');
    s
}

/// The order productions are attempted in: leaves first, then increasing
/// arity, recursive productions last. Ties keep grammar order. Solving
/// cheap rules first pays off because the fuzzer prefers building random
/// subterms out of already-solved productions.
pub fn production_schedule(g: &Grammar) -> Vec<&Production> {
    let mut idx: Vec<usize> = (0..g.productions.len()).collect();
    idx.sort_by_key(|&i| {
        let p = &g.productions[i];
        (p.recursive, p.arity(), i)
    });
    idx.into_iter().map(|i| &g.productions[i]).collect()
}

/// Second rung of the size ladder. Rules for the bundled languages all fit
/// well under the default bound, so this only matters for grammars brought
/// in from outside.
const ESCALATED_EXPR_SIZE: usize = 13;

/// Example-drawing rounds allowed after the full ladder comes up empty.
const MAX_REFILL_ROUNDS: usize = 4;
const REFILL_BATCH: usize = 8;

enum Attempt {
    Found(Constraint),
    Exhausted,
    OutOfTime,
}

struct ProdRun<'a> {
    b: &'a LanguageBundle,
    p: &'a Production,
    cfg: &'a RunConfig,
    deadline: Instant,
    examples: Vec<Example>,
}

impl<'a> ProdRun<'a> {
    fn out_of_time(&self) -> bool {
        Instant::now() >= self.deadline
    }

    fn problem<'s>(&'s self, cg: &'s ComponentGrammar, perm: &[usize]) -> SynthesisProblem<'s> {
        SynthesisProblem::new(self.b, self.p, &self.examples, cg, self.cfg.fuzz.recursion_limit)
            .with_perm(perm.to_vec())
    }

    /// One pass over the whole escalation ladder with the current examples.
    ///
    /// Per evaluation order: the componentwise path when the output has
    /// several components and the option is on, then single-output search
    /// at each size, then guarded search at each size. Deadline checks sit
    /// between searches; a single search is not interruptible, so a rung
    /// can overshoot the deadline before the run notices.
    fn attempt(&self, summaries: &mut Summaries) -> Attempt {
        let base = &self.cfg.components;
        let mut sizes = vec![base.max_expr_size];
        if ESCALATED_EXPR_SIZE > base.max_expr_size {
            sizes.push(ESCALATED_EXPR_SIZE);
        }
        let out_arity = {
            let nt = self.b.grammar.nonterminal(&self.p.lhs).expect("known nonterminal");
            nt.output_type.arity()
        };
        for perm in permute_schedule(self.p.arity()) {
            if self.out_of_time() {
                return Attempt::OutOfTime;
            }
            if !self.p.recursive && self.cfg.multi_output && out_arity >= 2 {
                let prob = self.problem(base, &perm);
                if let Ok(c) = synth_multi_output(&prob, summaries) {
                    return Attempt::Found(Constraint::Plain(c));
                }
                if self.out_of_time() {
                    return Attempt::OutOfTime;
                }
            }
            for &size in &sizes {
                let cg = ComponentGrammar { max_expr_size: size, ..base.clone() };
                let prob = self.problem(&cg, &perm);
                let found = if self.p.recursive {
                    synth_recursive(&prob, summaries).map(Constraint::Recursive)
                } else {
                    synth_constraint(&prob, summaries).map(Constraint::Plain)
                };
                if let Ok(c) = found {
                    return Attempt::Found(c);
                }
                if self.out_of_time() {
                    return Attempt::OutOfTime;
                }
            }
            if !self.p.recursive {
                for &size in &sizes {
                    let cg = ComponentGrammar { max_expr_size: size, ..base.clone() };
                    let prob = self.problem(&cg, &perm);
                    if let Ok(c) = synth_guarded(&prob, summaries) {
                        return Attempt::Found(Constraint::Guarded(c));
                    }
                    if self.out_of_time() {
                        return Attempt::OutOfTime;
                    }
                }
            }
        }
        Attempt::Exhausted
    }

    /// Draw fresh random examples for this production. Returns how many
    /// new rows were added; duplicates and samples the interpreter cannot
    /// finish are dropped.
    fn refill(&mut self, learned: &LearnedSet, rng: &mut ChaCha12Rng) -> usize {
        let g = &self.b.grammar;
        let in_ty =
            g.nonterminal(&self.p.lhs).expect("known nonterminal").input_type.clone();
        let mut added = 0;
        for _ in 0..REFILL_BATCH * 4 {
            if added >= REFILL_BATCH {
                break;
            }
            let t = gen_term(g, self.p, &self.cfg.fuzz, learned, rng);
            let x = gen_input(&in_ty, &self.cfg.fuzz, rng);
            if let Some(ex) = make_example(self.b, &t, &x, &self.cfg.fuzz) {
                let dup = self.examples.iter().any(|e| e.term == ex.term && e.input == ex.input);
                if !dup {
                    self.examples.push(ex);
                    added += 1;
                }
            }
        }
        added
    }
}

fn run_production(
    b: &LanguageBundle,
    p: &Production,
    cfg: &RunConfig,
    summaries: &mut Summaries,
    learned: &LearnedSet,
    rng: &mut ChaCha12Rng,
    global_deadline: Instant,
) -> (Option<Constraint>, ProductionReport) {
    let start = Instant::now();
    let deadline = global_deadline.min(start + Duration::from_millis(cfg.per_production_timeout_ms));
    let mut run = ProdRun { b, p, cfg, deadline, examples: Vec::new() };

    let mut seen: Vec<Constraint> = Vec::new();
    let mut iterations = 0usize;
    let mut refills = 0usize;
    let mut synth_time = Duration::ZERO;
    let mut check_time = Duration::ZERO;
    let mut solution = None;

    let status = loop {
        if run.out_of_time() {
            break Status::Timeout;
        }
        iterations += 1;
        let t0 = Instant::now();
        let got = run.attempt(summaries);
        synth_time += t0.elapsed();
        let candidate = match got {
            Attempt::Found(c) => c,
            Attempt::OutOfTime => break Status::Timeout,
            Attempt::Exhausted => {
                if refills >= MAX_REFILL_ROUNDS {
                    break Status::NoSolution;
                }
                refills += 1;
                if run.refill(learned, rng) == 0 {
                    break Status::NoSolution;
                }
                summaries
                    .absorb_examples(run.examples.iter())
                    .expect("interpreter facts never conflict");
                continue;
            }
        };
        // A repeat means the new examples did not rule the candidate out,
        // so the loop would spin forever. This is a bug, not an input
        // problem, hence the hard stop.
        assert!(
            !seen.contains(&candidate),
            "synthesis repeated a candidate for {}::{} on iteration {}: {:?}",
            p.lhs,
            p.op,
            iterations,
            candidate
        );
        seen.push(candidate.clone());

        let t1 = Instant::now();
        let report = verify(&candidate, p, b, &cfg.fuzz, learned, rng);
        check_time += t1.elapsed();
        match report.cex {
            None => {
                solution = Some(candidate);
                break Status::Solved;
            }
            Some(bundle) => {
                debug_assert!(
                    !run.examples.contains(&bundle.root),
                    "counterexample repeats a known example"
                );
                run.examples.push(bundle.root);
                summaries
                    .absorb_examples(bundle.child_summaries.iter())
                    .expect("interpreter facts never conflict");
            }
        }
    };

    let constraint_size = solution.as_ref().map(Constraint::size).unwrap_or(0);
    let report = ProductionReport {
        nonterminal: p.lhs.clone(),
        op: p.op.clone(),
        status,
        iterations,
        examples: run.examples.len(),
        synth_ms: synth_time.as_millis() as u64,
        check_ms: check_time.as_millis() as u64,
        total_ms: start.elapsed().as_millis() as u64,
        constraint_size,
    };
    (solution, report)
}

/// Learn a rule for every production of `b`'s grammar.
///
/// The returned semantics holds one rule per solved production; the report
/// has one record per production in schedule order. With the same bundle
/// and config the learned rules and the report are identical across runs
/// except for the duration fields.
pub fn sem_synth(b: &LanguageBundle, cfg: &RunConfig) -> (Semantics, RunReport) {
    cfg.check().expect("valid run config");
    let global_deadline =
        Instant::now() + Duration::from_millis(cfg.global_timeout_ms);
    let mut rng = ChaCha12Rng::seed_from_u64(cfg.fuzz.seed);
    let mut summaries = Summaries::new();
    let mut learned = LearnedSet::new();
    let mut sem = Semantics::new();
    let mut reports = Vec::new();

    for p in production_schedule(&b.grammar) {
        let (solution, rep) =
            run_production(b, p, cfg, &mut summaries, &learned, &mut rng, global_deadline);
        if let Some(c) = solution {
            sem.insert(p, c);
            learned.insert((p.lhs.clone(), p.op.clone()));
        }
        reports.push(rep);
    }

    let solved = reports.iter().filter(|r| r.status == Status::Solved).count();
    let report = RunReport {
        schema_version: REPORT_SCHEMA_VERSION,
        lang: b.id.to_string(),
        seed: cfg.fuzz.seed,
        solved,
        productions: reports,
    };
    (sem, report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::load_grammar;
    use crate::interp::{interpret, Budget, Fault};
    use crate::semantics::eval_semantics;
    use crate::term::Term;
    use crate::value::Value;

    #[test]
    fn schedule_puts_leaves_first_and_recursive_rules_last() {
        let b = crate::langs::bundle("imp1").unwrap();
        let order = production_schedule(&b.grammar);
        let arity_of = |i: usize| order[i].arity();
        let first_nonleaf = (0..order.len()).find(|&i| arity_of(i) > 0).unwrap();
        assert!((0..first_nonleaf).all(|i| arity_of(i) == 0));
        assert!((first_nonleaf..order.len()).all(|i| arity_of(i) > 0));
        let first_rec = (0..order.len()).find(|&i| order[i].recursive).unwrap();
        assert!((first_rec..order.len()).all(|i| order[i].recursive));
        // Ties keep grammar order: lit0 is declared before lit1.
        let pos = |op: &str| order.iter().position(|p| p.op == op).unwrap();
        assert!(pos("lit0") < pos("lit1"));
        assert!(pos("while") > pos("seq"));
    }

    fn always_seven(_t: &Term, _x: &Value, _budget: &mut Budget) -> Result<Value, Fault> {
        Ok(Value::int(7))
    }

    fn seven_bundle() -> LanguageBundle {
        let g = load_grammar("(grammar (start N) (nt N :in int :out int) (prod N seven ()))")
            .unwrap();
        LanguageBundle::new("seven", g, always_seven, None)
    }

    #[test]
    fn constant_leaf_interpreter_is_learned_from_one_counterexample() {
        let b = seven_bundle();
        let cfg = RunConfig::default();
        let (sem, report) = sem_synth(&b, &cfg);

        assert_eq!(report.productions.len(), 1);
        let pr = &report.productions[0];
        assert_eq!(pr.status, Status::Solved);
        // Round one proposes the default constant and gets refuted; round
        // two reads 7 off the counterexample.
        assert_eq!(pr.iterations, 2);
        assert_eq!(pr.examples, 1);
        assert!(report.all_solved());

        let t = Term::leaf("seven");
        let got = eval_semantics(&sem, &t, &Value::int(0), 100, &b.grammar);
        assert_eq!(got.ok(), interpret(&b, &t, &Value::int(0), 100).ok());
    }

    #[test]
    fn same_seed_gives_the_same_report_modulo_durations() {
        let b = seven_bundle();
        let cfg = RunConfig::default();
        let (sem1, rep1) = sem_synth(&b, &cfg);
        let (sem2, rep2) = sem_synth(&b, &cfg);
        assert_eq!(sem1, sem2);
        assert_eq!(rep1.normalized(), rep2.normalized());
        assert_eq!(
            write_report(&rep1.normalized()),
            write_report(&rep2.normalized())
        );
    }

    #[test]
    fn report_roundtrips_through_json() {
        let b = seven_bundle();
        let (_, report) = sem_synth(&b, &RunConfig::default());
        let text = write_report(&report);
        let back: RunReport = serde_json::from_str(&text).unwrap();
        assert_eq!(back, report);
        assert_eq!(back.schema_version, REPORT_SCHEMA_VERSION);
    }

    #[test]
    fn exhausted_global_budget_marks_later_productions_timed_out() {
        let b = crate::langs::bundle("imp1").unwrap();
        let cfg = RunConfig { global_timeout_ms: 1, ..RunConfig::default() };
        let (sem, report) = sem_synth(&b, &cfg);
        assert_eq!(report.productions.len(), b.grammar.productions.len());
        assert!(report.productions.iter().any(|p| p.status == Status::Timeout));
        for pr in &report.productions {
            let p = b.grammar.production(&pr.nonterminal, &pr.op).unwrap();
            assert_eq!(sem.get(p).is_some(), pr.status == Status::Solved);
        }
        assert_eq!(report.solved, sem.rules.len());
    }

    #[test]
    fn rejected_configs_are_refused() {
        let bad = RunConfig { per_production_timeout_ms: 0, ..RunConfig::default() };
        assert!(bad.check().is_err());
        let bad = RunConfig { global_timeout_ms: 0, ..RunConfig::default() };
        assert!(bad.check().is_err());
    }
}
