//! Learns executable big-step semantics for tree-grammar languages by
//! querying a closed-box interpreter.
//!
//! Given a typed regular tree grammar and an interpreter for it, the engine
//! synthesizes one semantic rule per production: data-flow functions
//! feeding each child, an output function, and guard/recursion structure
//! where the production needs it. Candidate rules are proposed from
//! examples by an enumerative synthesizer and checked against the
//! interpreter by fuzzing; disagreements become new examples until the
//! fuzzer can no longer tell the rule and the interpreter apart. The
//! result is emitted as Horn-clause text that re-parses into the same
//! rules.

pub mod chc;
pub mod driver;
pub mod enumerate;
pub mod example;
pub mod grammar;
pub mod interp;
pub mod langs;
pub mod semantics;
pub mod sexp;
pub mod synth;
pub mod term;
pub mod value;
pub mod verify;
