//! Analysis and generation with a compiled relation.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::grammar::StringTuple;
use crate::relation::CompiledRelation;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    /// Surface tapes in, lexical tapes out.
    Analyze,
    /// Lexical tapes in, surface tapes out.
    Generate,
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Analyze => "analyze",
            Direction::Generate => "generate",
        })
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LookupError {
    #[error("expected {expected} input tape(s), found {found}")]
    Arity { expected: usize, found: usize },
    #[error("symbol `{symbol}` is not in the alphabet of tape {tape}")]
    UnknownSymbol { tape: usize, symbol: char },
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LookupResult {
    /// Distinct, shortest first, then lexicographic.
    pub outputs: Vec<StringTuple>,
    /// Set when some path was cut by the insertion bound.
    pub truncated: bool,
}

/// Insertions allowed for an input of `len` symbols when no bound is given.
pub fn default_insertion_bound(len: usize) -> usize {
    2 * len + 4
}

/// All lexical tuples related to `surface`.
pub fn analyze(rel: &CompiledRelation, surface: &StringTuple) -> Result<LookupResult, LookupError> {
    lookup(rel, Direction::Analyze, surface, None)
}

/// All surface tuples related to `lexical`.
pub fn generate(rel: &CompiledRelation, lexical: &StringTuple) -> Result<LookupResult, LookupError> {
    lookup(rel, Direction::Generate, lexical, None)
}

/// Membership of a full tuple.
pub fn accepts_tuple(rel: &CompiledRelation, p: &StringTuple) -> bool {
    rel.accepts_tuple(p)
}

struct Search<'a> {
    rel: &'a CompiledRelation,
    inputs: Vec<usize>,
    outputs: Vec<usize>,
    input: Vec<Vec<char>>,
    bound: usize,
    found: BTreeSet<Vec<String>>,
    truncated: bool,
}

impl Search<'_> {
    fn run(&mut self, q: usize, pos: &mut Vec<usize>, out: &mut Vec<String>, inserted: usize) {
        let automaton = self.rel.automaton();
        if automaton.is_final(q) && pos.iter().zip(&self.input).all(|(&i, t)| i == t.len()) {
            self.found.insert(out.clone());
        }
        for e in automaton.edges(q) {
            let label = self.rel.label(e.label.expect("ε-free"));
            let fits = self
                .inputs
                .iter()
                .enumerate()
                .all(|(k, &tape)| label[tape].is_none_or(|c| self.input[k].get(pos[k]) == Some(&c)));
            if !fits {
                continue;
            }
            let consumes = self.inputs.iter().any(|&tape| label[tape].is_some());
            if !consumes && inserted >= self.bound {
                self.truncated = true;
                continue;
            }
            let saved_pos = pos.clone();
            let saved_out: Vec<usize> = out.iter().map(String::len).collect();
            for (k, &tape) in self.inputs.iter().enumerate() {
                if label[tape].is_some() {
                    pos[k] += 1;
                }
            }
            for (k, &tape) in self.outputs.iter().enumerate() {
                if let Some(c) = label[tape] {
                    out[k].push(c);
                }
            }
            self.run(e.target, pos, out, inserted + usize::from(!consumes));
            *pos = saved_pos;
            for (s, len) in out.iter_mut().zip(saved_out) {
                s.truncate(len);
            }
        }
    }
}

/// Runs the relation in `direction`. `bound` caps transitions that read
/// nothing from the input; it defaults to [`default_insertion_bound`] of
/// the total input length.
pub fn lookup(
    rel: &CompiledRelation,
    direction: Direction,
    input: &StringTuple,
    bound: Option<usize>,
) -> Result<LookupResult, LookupError> {
    let tapes = rel.tapes();
    let (inputs, outputs): (Vec<usize>, Vec<usize>) = match direction {
        Direction::Analyze => (
            (tapes.lexical()..tapes.tapes()).collect(),
            (0..tapes.lexical()).collect(),
        ),
        Direction::Generate => (
            (0..tapes.lexical()).collect(),
            (tapes.lexical()..tapes.tapes()).collect(),
        ),
    };
    if input.arity() != inputs.len() {
        return Err(LookupError::Arity {
            expected: inputs.len(),
            found: input.arity(),
        });
    }
    let chars: Vec<Vec<char>> = input.0.iter().map(|s| s.chars().collect()).collect();
    for (k, &tape) in inputs.iter().enumerate() {
        if let Some(&symbol) = chars[k].iter().find(|c| !tapes.alphabet(tape).contains(c)) {
            return Err(LookupError::UnknownSymbol { tape: tape + 1, symbol });
        }
    }
    let len = chars.iter().map(Vec::len).sum();
    let mut search = Search {
        rel,
        outputs: outputs.clone(),
        inputs: inputs.clone(),
        input: chars,
        bound: bound.unwrap_or_else(|| default_insertion_bound(len)),
        found: BTreeSet::new(),
        truncated: false,
    };
    let start = rel.automaton().initial();
    search.run(
        start,
        &mut vec![0; inputs.len()],
        &mut vec![String::new(); outputs.len()],
        0,
    );
    let mut outputs: Vec<StringTuple> = search.found.into_iter().map(StringTuple).collect();
    outputs.sort_by(|a, b| {
        let len = |t: &StringTuple| t.0.iter().map(|s| s.chars().count()).sum::<usize>();
        len(a).cmp(&len(b)).then_with(|| a.cmp(b))
    });
    Ok(LookupResult {
        outputs,
        truncated: search.truncated,
    })
}
