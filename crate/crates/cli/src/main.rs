//! Command line front end for the semantics learner.
//!
//! `synthesize` runs the full loop on a bundled language and can dump the
//! learned rules (Horn-clause text) and a JSON run report. `fuzz`, `eval`
//! and `verify` poke at interpreters and rule files directly; `list-langs`
//! shows what is bundled.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use semlearn::chc;
use semlearn::driver::{sem_synth, write_report, RunConfig, Status};
use semlearn::interp::{
    gen_input, gen_term, interpret, FuzzConfig, InterpreterResult, LanguageBundle, LearnedSet,
};
use semlearn::langs;
use semlearn::semantics::eval_semantics;
use semlearn::term::parse_term;
use semlearn::value::Value;

#[derive(Parser)]
#[command(
    name = "semlearn",
    version,
    about = "Learn big-step semantics for small languages from their interpreters"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Learn rules for every production of a bundled language.
    ///
    /// Exits 0 when every production is solved, 2 on a partial result.
    Synthesize {
        /// Bundled language id (see list-langs).
        #[arg(long)]
        lang: Option<String>,
        /// Seed for example generation and checking.
        #[arg(long)]
        seed: Option<u64>,
        /// Synthesize multi-component outputs jointly instead of one
        /// component at a time.
        #[arg(long)]
        no_multi_output: bool,
        /// Per-production time limit in seconds.
        #[arg(long, value_name = "SECS")]
        timeout_per_prod: Option<u64>,
        /// Whole-run time limit in seconds.
        #[arg(long, value_name = "SECS")]
        timeout: Option<u64>,
        /// Run configuration as JSON; explicit flags override its fields.
        #[arg(long, value_name = "FILE")]
        config: Option<PathBuf>,
        /// Write the learned rules as Horn-clause text.
        #[arg(long, value_name = "FILE")]
        emit_chc: Option<PathBuf>,
        /// Write the run report as JSON.
        #[arg(long, value_name = "FILE")]
        report: Option<PathBuf>,
    },
    /// List bundled language ids.
    ListLangs,
    /// Print random interpreter examples as JSON lines.
    Fuzz {
        #[arg(long)]
        lang: String,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Number of examples to print.
        #[arg(long, default_value_t = 20)]
        samples: usize,
    },
    /// Evaluate a term under rules from a file.
    Eval {
        /// Horn-clause rules produced by synthesize --emit-chc.
        #[arg(long, value_name = "FILE")]
        sem: PathBuf,
        /// Language whose grammar the rules refer to.
        #[arg(long)]
        lang: String,
        /// Term to evaluate, in s-expression form.
        #[arg(long, value_name = "SEXP")]
        term: String,
        /// Input value as JSON (an integer, boolean, or array).
        #[arg(long = "in", value_name = "JSON")]
        input: String,
        /// Recursion budget.
        #[arg(long, default_value_t = 1000)]
        limit: u64,
    },
    /// Fuzz rules from a file against the language's interpreter.
    ///
    /// Exits 0 when all samples agree, 2 on the first disagreement.
    Verify {
        #[arg(long, value_name = "FILE")]
        sem: PathBuf,
        #[arg(long)]
        lang: String,
        #[arg(long, default_value_t = 2000)]
        samples: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse().cmd) {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn load_bundle(id: &str) -> Result<LanguageBundle, String> {
    langs::bundle(id).ok_or_else(|| {
        let known: Vec<&str> = langs::bundles().iter().map(|b| b.id).collect();
        format!("unknown language {id}; bundled: {}", known.join(", "))
    })
}

fn result_json(r: &InterpreterResult) -> serde_json::Value {
    match r {
        InterpreterResult::Ok(v) => v.to_json(),
        InterpreterResult::Nontermination => serde_json::Value::from("nontermination"),
        InterpreterResult::Stuck => serde_json::Value::from("stuck"),
    }
}

fn run(cmd: Cmd) -> Result<u8, String> {
    match cmd {
        Cmd::Synthesize {
            lang,
            seed,
            no_multi_output,
            timeout_per_prod,
            timeout,
            config,
            emit_chc,
            report,
        } => {
            let mut cfg: RunConfig = match &config {
                Some(path) => {
                    let text = fs::read_to_string(path)
                        .map_err(|e| format!("reading {}: {e}", path.display()))?;
                    serde_json::from_str(&text)
                        .map_err(|e| format!("parsing {}: {e}", path.display()))?
                }
                None => RunConfig::default(),
            };
            if let Some(l) = lang {
                cfg.lang = l;
            }
            if let Some(s) = seed {
                cfg.fuzz.seed = s;
            }
            if no_multi_output {
                cfg.multi_output = false;
            }
            if let Some(t) = timeout_per_prod {
                cfg.per_production_timeout_ms = t.saturating_mul(1000);
            }
            if let Some(t) = timeout {
                cfg.global_timeout_ms = t.saturating_mul(1000);
            }
            if cfg.lang.is_empty() {
                return Err("no language: pass --lang or set \"lang\" in the config".to_string());
            }
            cfg.check()?;

            let b = load_bundle(&cfg.lang)?;
            let (sem, run_report) = sem_synth(&b, &cfg);
            for pr in &run_report.productions {
                let status = match pr.status {
                    Status::Solved => "solved",
                    Status::Timeout => "timeout",
                    Status::NoSolution => "no-solution",
                };
                println!(
                    "{status:12} {}::{} iterations={} examples={} size={}",
                    pr.nonterminal, pr.op, pr.iterations, pr.examples, pr.constraint_size
                );
            }
            println!("solved {}/{}", run_report.solved, run_report.productions.len());

            if let Some(path) = emit_chc {
                fs::write(&path, chc::emit_chc(&sem, &b.grammar))
                    .map_err(|e| format!("writing {}: {e}", path.display()))?;
            }
            if let Some(path) = report {
                fs::write(&path, write_report(&run_report))
                    .map_err(|e| format!("writing {}: {e}", path.display()))?;
            }
            Ok(if run_report.all_solved() { 0 } else { 2 })
        }

        Cmd::ListLangs => {
            for b in langs::bundles() {
                println!("{}", b.id);
            }
            Ok(0)
        }

        Cmd::Fuzz { lang, seed, samples } => {
            let b = load_bundle(&lang)?;
            let cfg = FuzzConfig { seed, ..FuzzConfig::default() };
            let learned = LearnedSet::new();
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            let prods = &b.grammar.productions;
            let mut printed = 0;
            for _ in 0..samples.saturating_mul(100) {
                if printed == samples {
                    break;
                }
                let p = &prods[rng.gen_range(0..prods.len())];
                let t = gen_term(&b.grammar, p, &cfg, &learned, &mut rng);
                let in_ty = &b.grammar.nonterminals[&p.lhs].input_type;
                let x = gen_input(in_ty, &cfg, &mut rng);
                if let InterpreterResult::Ok(y) = interpret(&b, &t, &x, cfg.recursion_limit) {
                    let line = serde_json::json!({
                        "in": x.to_json(),
                        "term": t.to_string(),
                        "out": y.to_json(),
                    });
                    println!("{line}");
                    printed += 1;
                }
            }
            Ok(0)
        }

        Cmd::Eval { sem, lang, term, input, limit } => {
            let b = load_bundle(&lang)?;
            let text = fs::read_to_string(&sem)
                .map_err(|e| format!("reading {}: {e}", sem.display()))?;
            let rules = chc::parse_chc(&text, &b.grammar)?;
            let t = parse_term(&term, &b.grammar)?;
            let json: serde_json::Value =
                serde_json::from_str(&input).map_err(|e| format!("parsing input: {e}"))?;
            let x = Value::from_json(&json)?;
            match eval_semantics(&rules, &t, &x, limit, &b.grammar) {
                InterpreterResult::Ok(y) => {
                    println!("{}", y.to_json());
                    Ok(0)
                }
                other => Err(format!("evaluation failed: {}", result_json(&other))),
            }
        }

        Cmd::Verify { sem, lang, samples, seed } => {
            let b = load_bundle(&lang)?;
            let text = fs::read_to_string(&sem)
                .map_err(|e| format!("reading {}: {e}", sem.display()))?;
            let rules = chc::parse_chc(&text, &b.grammar)?;
            let cfg = FuzzConfig { seed, ..FuzzConfig::default() };
            let learned = LearnedSet::new();
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            let prods = &b.grammar.productions;
            for _ in 0..samples {
                let p = &prods[rng.gen_range(0..prods.len())];
                let t = gen_term(&b.grammar, p, &cfg, &learned, &mut rng);
                let in_ty = &b.grammar.nonterminals[&p.lhs].input_type;
                let x = gen_input(in_ty, &cfg, &mut rng);
                let want = interpret(&b, &t, &x, cfg.recursion_limit);
                let got = eval_semantics(&rules, &t, &x, cfg.recursion_limit, &b.grammar);
                if want.ok() != got.ok() {
                    println!("fail");
                    let cex = serde_json::json!({
                        "term": t.to_string(),
                        "in": x.to_json(),
                        "interpreter": result_json(&want),
                        "rules": result_json(&got),
                    });
                    println!("{cex}");
                    return Ok(2);
                }
            }
            println!("pass");
            Ok(0)
        }
    }
}
