//! Subtractive compilation.
//!
//! Starting from every sequence of licensable partitions, `ω(Dω)*`, the
//! compiler removes the strings that some CR rule forbids and then the
//! strings that violate some SC rule. The survivor `S₀` has its markers
//! erased to give the compiled relation.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::automaton::Automaton;
use crate::calculus::{intro, sub};
use crate::grammar::{Diagnostic, Grammar, ScRule};
use crate::preprocess::{CentreClass, PreprocessError, Preprocessed};
use crate::relation::{label_name, CompiledRelation, Label};
use crate::symbol::SymbolTable;

/// Which spans of partitions an SC rule is checked against.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Variant {
    /// `2`: every span of consecutive partitions, including the empty span.
    #[default]
    Spans,
    /// `2i`: exactly one partition.
    SinglePartition,
    /// `2ii`: one partition or the empty span between two partitions.
    SinglePartitionOrEmpty,
}

impl Variant {
    pub const ALL: [Variant; 3] = [
        Variant::Spans,
        Variant::SinglePartition,
        Variant::SinglePartitionOrEmpty,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Variant::Spans => "2",
            Variant::SinglePartition => "2i",
            Variant::SinglePartitionOrEmpty => "2ii",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Variant {
    type Err = CompileError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "2" => Ok(Variant::Spans),
            "2i" => Ok(Variant::SinglePartition),
            "2ii" => Ok(Variant::SinglePartitionOrEmpty),
            other => Err(CompileError::UnknownVariant(other.to_owned())),
        }
    }
}

#[derive(Debug, Error)]
pub enum CompileError {
    #[error("unknown variant `{0}` (expected 2, 2i or 2ii)")]
    UnknownVariant(String),
    #[error("grammar is invalid: {}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Diagnostic>),
    #[error(transparent)]
    Preprocess(#[from] PreprocessError),
}

impl From<crate::calculus::CalculusError> for CompileError {
    fn from(e: crate::calculus::CalculusError) -> Self {
        CompileError::Preprocess(e.into())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Phase {
    Initial,
    AfterRestriction,
    AfterCoercion,
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Phase::Initial => "initial",
            Phase::AfterRestriction => "after-cr",
            Phase::AfterCoercion => "after-sc",
        })
    }
}

/// A language over `π ∪ {ω}` tagged with the phase that produced it.
#[derive(Clone, Debug)]
pub struct MarkedLanguage {
    pub automaton: Automaton,
    pub phase: Phase,
}

/// Holds the preprocessed grammar and builds each phase on demand.
#[derive(Clone, Debug)]
pub struct Compiler {
    grammar: Grammar,
    pre: Preprocessed,
}

impl Compiler {
    /// Fails on grammars with error diagnostics.
    pub fn new(grammar: &Grammar) -> Result<Self, CompileError> {
        let errors: Vec<Diagnostic> = grammar.validate().into_iter().filter(Diagnostic::is_error).collect();
        if !errors.is_empty() {
            return Err(CompileError::Invalid(errors));
        }
        Ok(Self {
            grammar: grammar.clone(),
            pre: Preprocessed::new(grammar)?,
        })
    }

    pub fn grammar(&self) -> &Grammar {
        &self.grammar
    }

    pub fn preprocessed(&self) -> &Preprocessed {
        &self.pre
    }

    fn omega(&self) -> Automaton {
        Automaton::symbol(self.pre.omega)
    }

    fn intro_omega(&self, a: &Automaton) -> Automaton {
        intro(&BTreeSet::from([self.pre.omega]), a)
    }

    /// `ω(Dω)*`.
    pub fn initial_approximation(&self) -> MarkedLanguage {
        let w = self.omega();
        let automaton = w.concat(&self.pre.d_language().concat(&w).star()).minimize();
        MarkedLanguage {
            automaton,
            phase: Phase::Initial,
        }
    }

    /// Strings in which a centre of `class` occurs as a partition without
    /// the contexts of any rule in the class.
    pub fn cr_disallowed_set(&self, class: &CentreClass) -> Result<Automaton, CompileError> {
        let pi = self.pre.pi_symbols();
        let tau = Automaton::symbol(self.pre.tau);
        let pi_star = Automaton::universal(&pi);
        let any_tau = pi_star.concat(&tau).concat(&pi_star);
        let mut allowed = Automaton::empty(pi.clone());
        for &r in &class.rules {
            let rule = &self.grammar.cr_rules[r];
            let l = self.pre.left_izeros(&rule.left)?;
            let rr = self.pre.right_izeros(&rule.right)?;
            allowed = allowed.union(&l.concat(&tau).concat(&rr));
        }
        let bad_contexts = any_tau.difference(&allowed).minimize();
        let w = self.omega();
        let centre = w.concat(&self.pre.class_language(class)).concat(&w);
        let substituted = sub(&centre, &[self.pre.tau], &self.intro_omega(&bad_contexts))?;
        Ok(substituted
            .intersect(&Automaton::universal(&self.pre.marked_alphabet()))
            .minimize())
    }

    pub fn apply_cr(&self, initial: &MarkedLanguage) -> Result<MarkedLanguage, CompileError> {
        let mut automaton = initial.automaton.clone();
        for class in &self.pre.d {
            automaton = automaton.difference(&self.cr_disallowed_set(class)?).minimize();
        }
        Ok(MarkedLanguage {
            automaton,
            phase: Phase::AfterRestriction,
        })
    }

    /// Strings in which the contexts of `rule` surround a span whose
    /// lexical side matches but whose surface side does not.
    pub fn sc_violation_set(&self, rule: &ScRule, variant: Variant) -> Result<Automaton, CompileError> {
        let l = self.pre.left_izeros(&rule.left)?;
        let r = self.pre.right_izeros(&rule.right)?;
        let centre = self.pre.sc_centre_language(rule)?;
        let w = self.omega();
        let collapse = |a: &Automaton| sub(&w, &[self.pre.omega, self.pre.omega], a);
        let violation = match variant {
            Variant::Spans => {
                let body = l.concat(&w).concat(&centre).concat(&w).concat(&r);
                collapse(&self.intro_omega(&body))?
            }
            Variant::SinglePartition | Variant::SinglePartitionOrEmpty => {
                let body = self
                    .intro_omega(&l)
                    .concat(&w)
                    .concat(&centre)
                    .concat(&w)
                    .concat(&self.intro_omega(&r));
                if variant == Variant::SinglePartition {
                    body
                } else {
                    collapse(&body)?
                }
            }
        };
        Ok(violation.minimize())
    }

    pub fn apply_sc(&self, after_cr: &MarkedLanguage, variant: Variant) -> Result<MarkedLanguage, CompileError> {
        let mut automaton = after_cr.automaton.clone();
        for rule in &self.grammar.sc_rules {
            automaton = automaton.difference(&self.sc_violation_set(rule, variant)?).minimize();
        }
        Ok(MarkedLanguage {
            automaton,
            phase: Phase::AfterCoercion,
        })
    }

    /// Erases `ω` and the space symbol, yielding a relation over labels.
    /// Any phase can be stripped; the after-SC phase gives the grammar's
    /// relation.
    pub fn strip_markers(&self, language: &MarkedLanguage) -> CompiledRelation {
        let s = &language.automaton;
        let mut table = SymbolTable::new();
        let mut labels: BTreeMap<_, Label> = BTreeMap::new();
        let mut relabel = BTreeMap::new();
        for (sym, components) in self.pre.pi.iter() {
            let label: Label = components
                .iter()
                .map(|&c| {
                    if c == self.pre.zero {
                        None
                    } else {
                        self.pre.table.name(c).chars().next()
                    }
                })
                .collect();
            let id = table.intern(&label_name(&label));
            labels.insert(id, label);
            relabel.insert(sym, id);
        }
        let transitions: Vec<_> = s
            .transitions()
            .map(|(p, l, q)| (p, l.and_then(|l| relabel.get(&l).copied()), q))
            .collect();
        let alphabet: BTreeSet<_> = labels.keys().copied().collect();
        let automaton = Automaton::from_parts(s.num_states(), s.initial(), s.finals(), transitions, alphabet)
            .expect("relabelling preserves structure")
            .minimize();
        CompiledRelation::new(self.grammar.tapes.clone(), table, labels, automaton)
            .expect("labels come from π, which has no all-0 column")
    }

    pub fn compile(&self, variant: Variant) -> Result<Compilation, CompileError> {
        let initial = self.initial_approximation();
        let after_restriction = self.apply_cr(&initial)?;
        let after_coercion = self.apply_sc(&after_restriction, variant)?;
        let relation = self.strip_markers(&after_coercion);
        Ok(Compilation {
            variant,
            initial,
            after_restriction,
            after_coercion,
            relation,
        })
    }
}

/// All phases of one compilation.
#[derive(Clone, Debug)]
pub struct Compilation {
    pub variant: Variant,
    pub initial: MarkedLanguage,
    pub after_restriction: MarkedLanguage,
    pub after_coercion: MarkedLanguage,
    pub relation: CompiledRelation,
}

/// Validates, preprocesses and compiles `grammar`.
pub fn compile_grammar(grammar: &Grammar, variant: Variant) -> Result<(Compiler, Compilation), CompileError> {
    let compiler = Compiler::new(grammar)?;
    let compilation = compiler.compile(variant)?;
    Ok((compiler, compilation))
}
