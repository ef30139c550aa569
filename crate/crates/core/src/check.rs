//! Exhaustive comparison of a compiled relation against the oracle.

use std::fmt;

use rayon::prelude::*;

use crate::compiler::Variant;
use crate::grammar::{Grammar, StringTuple, TapeConfig};
use crate::oracle::oracle_accepts;
use crate::relation::CompiledRelation;

/// Strings over `alphabet` up to `bound` symbols, shortest first.
pub fn strings_up_to(alphabet: &[char], bound: usize) -> Vec<String> {
    let mut out = vec![String::new()];
    let mut layer = vec![String::new()];
    for _ in 0..bound {
        layer = layer
            .iter()
            .flat_map(|s| alphabet.iter().map(move |&c| format!("{s}{c}")))
            .collect();
        out.extend(layer.iter().cloned());
    }
    out
}

/// Every tuple whose components have at most `bound` symbols.
pub fn all_tuples(tapes: &TapeConfig, bound: usize) -> Vec<StringTuple> {
    let per_tape: Vec<Vec<String>> = tapes
        .alphabets()
        .iter()
        .map(|a| strings_up_to(&a.iter().copied().collect::<Vec<_>>(), bound))
        .collect();
    per_tape
        .iter()
        .fold(vec![Vec::new()], |acc, strings| {
            acc.iter()
                .flat_map(|prefix: &Vec<String>| {
                    strings.iter().map(move |s| {
                        let mut t = prefix.clone();
                        t.push(s.clone());
                        t
                    })
                })
                .collect()
        })
        .into_iter()
        .map(StringTuple)
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Counterexample {
    pub tuple: StringTuple,
    pub compiled: bool,
    pub oracle: bool,
}

impl fmt::Display for Counterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = |b: bool| if b { "accepts" } else { "rejects" };
        write!(
            f,
            "{}: compiled relation {}, oracle {}",
            self.tuple,
            verdict(self.compiled),
            verdict(self.oracle)
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckReport {
    pub bound: usize,
    pub checked: usize,
    /// The first disagreement in enumeration order.
    pub counterexample: Option<Counterexample>,
}

impl CheckReport {
    pub fn is_equivalent(&self) -> bool {
        self.counterexample.is_none()
    }
}

/// Compares `rel` with the oracle for `g` on every tuple up to `bound`.
pub fn check_equivalence(g: &Grammar, rel: &CompiledRelation, variant: Variant, bound: usize) -> CheckReport {
    let tuples = all_tuples(&g.tapes, bound);
    let counterexample = tuples.par_iter().find_map_first(|t| {
        let compiled = rel.accepts_tuple(t);
        let oracle = oracle_accepts(g, t, variant);
        (compiled != oracle).then(|| Counterexample {
            tuple: t.clone(),
            compiled,
            oracle,
        })
    });
    CheckReport {
        bound,
        checked: tuples.len(),
        counterexample,
    }
}
