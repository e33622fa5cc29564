//! Differential testing of the bundled languages: the hand-written rule
//! sets must agree with their interpreters on randomly sampled (term,
//! input) pairs. Terminating runs must produce equal values; faulting or
//! diverging runs must fault or diverge on both sides.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use semlearn::interp::{gen_input, gen_term, interpret, FuzzConfig, InterpreterResult, LearnedSet};
use semlearn::langs::bundles;
use semlearn::semantics::eval_semantics;

const PAIRS_PER_LANGUAGE: usize = 10_000;

#[test]
fn golden_rules_match_interpreters_on_ten_thousand_pairs_each() {
    let cfg = FuzzConfig::default();
    for b in bundles() {
        let golden = b.golden.clone().expect("bundled golden rules");
        let mut rng = ChaCha12Rng::seed_from_u64(0xC0FFEE ^ b.id.len() as u64);
        let learned = LearnedSet::new();
        let mut sampled = 0;
        let mut ok_pairs = 0;
        'outer: loop {
            for p in &b.grammar.productions {
                if sampled == PAIRS_PER_LANGUAGE {
                    break 'outer;
                }
                let t = gen_term(&b.grammar, p, &cfg, &learned, &mut rng);
                let in_ty = &b.grammar.nonterminals[&p.lhs].input_type;
                let input = gen_input(in_ty, &cfg, &mut rng);
                let want = interpret(&b, &t, &input, cfg.recursion_limit);
                let got = eval_semantics(&golden, &t, &input, cfg.recursion_limit, &b.grammar);
                match (&want, &got) {
                    (InterpreterResult::Ok(a), InterpreterResult::Ok(c)) => {
                        assert_eq!(
                            a, c,
                            "{}: disagreement on {} with input {}",
                            b.id, t, input
                        );
                        ok_pairs += 1;
                    }
                    (InterpreterResult::Ok(_), other) => {
                        panic!("{}: rules gave {:?} on {} input {}", b.id, other, t, input)
                    }
                    (other, InterpreterResult::Ok(_)) => {
                        panic!(
                            "{}: interpreter gave {:?} but rules succeeded on {} input {}",
                            b.id, other, t, input
                        )
                    }
                    // Both non-Ok: agreement, the flavor may differ.
                    _ => {}
                }
                sampled += 1;
            }
        }
        // The sample stream must not be degenerate.
        assert!(
            ok_pairs > PAIRS_PER_LANGUAGE / 4,
            "{}: only {ok_pairs} terminating pairs out of {PAIRS_PER_LANGUAGE}",
            b.id
        );
    }
}
