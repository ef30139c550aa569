//! Compiler for partition-based two-level grammars.
//!
//! A grammar of context-restriction (`=>`) and surface-coercion (`<=`)
//! rules over N lexical and M surface tapes is compiled into one
//! finite-state machine relating lexical tuples to surface strings:
//!
//! 1. [`grammar`] parses and validates the rule file.
//! 2. [`preprocess`] pads rule centres into same-length tuple strings and
//!    builds the tuple alphabet.
//! 3. [`compiler`] runs the subtractive construction over the regular
//!    calculus in [`calculus`] and [`automaton`].
//! 4. [`relation`] holds the result, with markers and padding erased, and
//!    [`lookup`] applies it for analysis and generation.
//!
//! [`oracle`] interprets the acceptance definition directly by brute force
//! and [`check`] compares it against a compiled relation.

pub mod automaton;
pub mod calculus;
pub mod check;
pub mod compiler;
pub mod grammar;
pub mod lookup;
pub mod oracle;
pub mod preprocess;
pub mod relation;
pub mod symbol;

pub use automaton::{Automaton, AutomatonError, Edge, StateId};
pub use calculus::{from_regex, intro, sub, tuple_product, CalculusError, Regex, TupleAlphabet};
pub use check::{check_equivalence, CheckReport, Counterexample};
pub use compiler::{compile_grammar, Compilation, CompileError, Compiler, MarkedLanguage, Phase, Variant};
pub use grammar::{parse_grammar, Diagnostic, Grammar, ParseError, Severity, StringTuple};
pub use lookup::{analyze, generate, lookup, Direction, LookupError, LookupResult};
pub use oracle::{oracle_accepts, PartitionedAnalysis};
pub use relation::CompiledRelation;
pub use symbol::{SymbolId, SymbolTable};
