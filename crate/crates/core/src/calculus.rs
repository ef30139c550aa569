//! Regular-language calculus: insertion (`intro`), optional substitution
//! (`sub`), and the per-tape product that turns an orthogonal n-tape
//! relation into a language over tuple symbols.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use thiserror::Error;

use crate::automaton::{Automaton, AutomatonError, Builder, StateId};
use crate::symbol::{SymbolId, SymbolTable};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CalculusError {
    #[error("atom {0} is not in the declared alphabet")]
    UnknownAtom(SymbolId),
    #[error("substitution target must be a non-empty word")]
    EmptySubTarget,
    #[error("tuple product arity mismatch: expected {expected} tapes, found {found}")]
    ArityMismatch { expected: usize, found: usize },
    #[error("tuple product used without a tuple alphabet")]
    MissingTupleAlphabet,
    #[error(transparent)]
    Automaton(#[from] AutomatonError),
}

impl CalculusError {
    /// Like `Display`, but with symbol names resolved through `table`.
    pub fn render(&self, table: &SymbolTable) -> String {
        match self {
            CalculusError::UnknownAtom(s) => {
                format!("atom `{}` is not in the declared alphabet", table.name(*s))
            }
            other => other.to_string(),
        }
    }
}

/// Tuple symbols and their per-tape components.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TupleAlphabet {
    tapes: Vec<BTreeSet<SymbolId>>,
    tuples: BTreeMap<SymbolId, Vec<SymbolId>>,
}

impl TupleAlphabet {
    /// `tapes[i]` is the component alphabet of tape `i`.
    pub fn new(tapes: Vec<BTreeSet<SymbolId>>) -> Self {
        Self {
            tapes,
            tuples: BTreeMap::new(),
        }
    }

    pub fn insert(&mut self, tuple: SymbolId, components: Vec<SymbolId>) -> Result<(), CalculusError> {
        if components.len() != self.arity() {
            return Err(CalculusError::ArityMismatch {
                expected: self.arity(),
                found: components.len(),
            });
        }
        for (tape, c) in components.iter().enumerate() {
            if !self.tapes[tape].contains(c) {
                return Err(CalculusError::UnknownAtom(*c));
            }
        }
        self.tuples.insert(tuple, components);
        Ok(())
    }

    pub fn arity(&self) -> usize {
        self.tapes.len()
    }

    pub fn tape_alphabet(&self, tape: usize) -> &BTreeSet<SymbolId> {
        &self.tapes[tape]
    }

    pub fn components(&self, tuple: SymbolId) -> Option<&[SymbolId]> {
        self.tuples.get(&tuple).map(Vec::as_slice)
    }

    pub fn symbols(&self) -> BTreeSet<SymbolId> {
        self.tuples.keys().copied().collect()
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (SymbolId, &[SymbolId])> {
        self.tuples.iter().map(|(&t, c)| (t, c.as_slice()))
    }
}

/// Regular expression over interned symbols.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Regex {
    Empty,
    Epsilon,
    Atom(SymbolId),
    Concat(Vec<Regex>),
    Union(Vec<Regex>),
    Star(Box<Regex>),
    Intersect(Box<Regex>, Box<Regex>),
    Difference(Box<Regex>, Box<Regex>),
    Complement(Box<Regex>),
    Intro(BTreeSet<SymbolId>, Box<Regex>),
    Sub {
        replacement: Box<Regex>,
        target: Vec<SymbolId>,
        body: Box<Regex>,
    },
    /// One expression per tape, over the tape's component alphabet.
    TupleProduct(Vec<Regex>),
}

impl Regex {
    pub fn atom(s: SymbolId) -> Self {
        Regex::Atom(s)
    }

    pub fn word(word: &[SymbolId]) -> Self {
        Regex::Concat(word.iter().map(|&s| Regex::Atom(s)).collect())
    }

    pub fn star(self) -> Self {
        Regex::Star(Box::new(self))
    }

    pub fn complement(self) -> Self {
        Regex::Complement(Box::new(self))
    }

    pub fn intersect(self, other: Regex) -> Self {
        Regex::Intersect(Box::new(self), Box::new(other))
    }

    pub fn minus(self, other: Regex) -> Self {
        Regex::Difference(Box::new(self), Box::new(other))
    }
}

/// Compiles `expr`; complement and atoms are checked against `alphabet`.
pub fn from_regex(expr: &Regex, alphabet: &BTreeSet<SymbolId>) -> Result<Automaton, CalculusError> {
    compile(expr, alphabet, None)
}

/// As [`from_regex`], with `pi` available for [`Regex::TupleProduct`] nodes.
pub fn from_regex_with_tuples(
    expr: &Regex,
    alphabet: &BTreeSet<SymbolId>,
    pi: &TupleAlphabet,
) -> Result<Automaton, CalculusError> {
    compile(expr, alphabet, Some(pi))
}

fn compile(
    expr: &Regex,
    alphabet: &BTreeSet<SymbolId>,
    pi: Option<&TupleAlphabet>,
) -> Result<Automaton, CalculusError> {
    let check = |s: &SymbolId| {
        if alphabet.contains(s) {
            Ok(())
        } else {
            Err(CalculusError::UnknownAtom(*s))
        }
    };
    let go = |e: &Regex| compile(e, alphabet, pi);
    let a = match expr {
        Regex::Empty => Automaton::empty(BTreeSet::new()),
        Regex::Epsilon => Automaton::epsilon(),
        Regex::Atom(s) => {
            check(s)?;
            Automaton::symbol(*s)
        }
        Regex::Concat(parts) => parts.iter().try_fold(Automaton::epsilon(), |acc, p| {
            Ok::<_, CalculusError>(acc.concat(&go(p)?))
        })?,
        Regex::Union(parts) => parts.iter().try_fold(Automaton::empty(BTreeSet::new()), |acc, p| {
            Ok::<_, CalculusError>(acc.union(&go(p)?))
        })?,
        Regex::Star(inner) => go(inner)?.star(),
        Regex::Intersect(x, y) => go(x)?.intersect(&go(y)?),
        Regex::Difference(x, y) => go(x)?.difference(&go(y)?),
        Regex::Complement(inner) => go(inner)?.complement(alphabet)?,
        Regex::Intro(set, inner) => {
            set.iter().try_for_each(check)?;
            intro(set, &go(inner)?)
        }
        Regex::Sub {
            replacement,
            target,
            body,
        } => {
            target.iter().try_for_each(check)?;
            sub(&go(replacement)?, target, &go(body)?)?
        }
        Regex::TupleProduct(tapes) => {
            let pi = pi.ok_or(CalculusError::MissingTupleAlphabet)?;
            if tapes.len() != pi.arity() {
                return Err(CalculusError::ArityMismatch {
                    expected: pi.arity(),
                    found: tapes.len(),
                });
            }
            pi.symbols().iter().try_for_each(check)?;
            let per_tape = tapes
                .iter()
                .enumerate()
                .map(|(i, e)| compile(e, pi.tape_alphabet(i), None))
                .collect::<Result<Vec<_>, _>>()?;
            tuple_product(&per_tape, pi)?
        }
    };
    Ok(a.with_alphabet(alphabet.iter().copied()))
}

/// Image of `L(a)` under `(Id ∪ ({ε} × S))*`: symbols of `set` may be
/// inserted anywhere, any number of times.
pub fn intro(set: &BTreeSet<SymbolId>, a: &Automaton) -> Automaton {
    let mut b = Builder::new();
    let offset = b.embed(a);
    for q in 0..a.num_states() {
        for &s in set {
            b.add_edge(q + offset, Some(s), q + offset);
        }
    }
    b.extend_alphabet(set.iter().copied());
    b.build(a.initial() + offset).trim()
}

/// Image of `L(a)` under `(Id ∪ (target × L(replacement)))*`: each factor
/// equal to `target` may be replaced by a word of `replacement`, and is
/// otherwise kept.
pub fn sub(replacement: &Automaton, target: &[SymbolId], a: &Automaton) -> Result<Automaton, CalculusError> {
    if target.is_empty() {
        return Err(CalculusError::EmptySubTarget);
    }
    let a = a.remove_epsilons();
    let mut b = Builder::new();
    let offset = b.embed(&a);
    // reach[p] = states reached from p by reading `target`.
    let mut copies: BTreeMap<StateId, Vec<StateId>> = BTreeMap::new();
    for p in 0..a.num_states() {
        let mut current: BTreeSet<StateId> = BTreeSet::from([p]);
        for &sym in target {
            current = current
                .iter()
                .flat_map(|&q| a.edges(q).iter())
                .filter(|e| e.label == Some(sym))
                .map(|e| e.target)
                .collect();
        }
        for q in current {
            copies.entry(q).or_default().push(p);
        }
    }
    // One replacement copy per return state; its entry is shared by every
    // source state with a target-path into that return state.
    for (ret, sources) in copies {
        let c = b.embed(replacement);
        for q in replacement.finals() {
            b.set_final(q + c, false);
            b.add_edge(q + c, None, ret + offset);
        }
        for p in sources {
            b.add_edge(p + offset, None, replacement.initial() + c);
        }
    }
    Ok(b.build(a.initial() + offset).trim())
}

/// Tuple-symbol strings over `pi` whose every tape projection is accepted
/// by the corresponding automaton.
pub fn tuple_product(per_tape: &[Automaton], pi: &TupleAlphabet) -> Result<Automaton, CalculusError> {
    if per_tape.len() != pi.arity() {
        return Err(CalculusError::ArityMismatch {
            expected: pi.arity(),
            found: per_tape.len(),
        });
    }
    let tapes: Vec<Automaton> = per_tape.iter().map(Automaton::determinize).collect();
    let step =
        |a: &Automaton, q: StateId, s: SymbolId| a.edges(q).iter().find(|e| e.label == Some(s)).map(|e| e.target);
    let is_final = |states: &[StateId]| states.iter().zip(&tapes).all(|(&q, a)| a.is_final(q));
    let mut b = Builder::new();
    let mut index: HashMap<Vec<StateId>, StateId> = HashMap::new();
    let mut queue = VecDeque::new();
    let start: Vec<StateId> = tapes.iter().map(Automaton::initial).collect();
    let s = b.add_state(is_final(&start));
    index.insert(start.clone(), s);
    queue.push_back(start);
    while let Some(states) = queue.pop_front() {
        let from = index[&states];
        'tuple: for (tuple, components) in pi.iter() {
            let mut next = Vec::with_capacity(states.len());
            for ((a, &q), &c) in tapes.iter().zip(&states).zip(components) {
                match step(a, q, c) {
                    Some(t) => next.push(t),
                    None => continue 'tuple,
                }
            }
            let to = match index.get(&next) {
                Some(&to) => to,
                None => {
                    let to = b.add_state(is_final(&next));
                    index.insert(next.clone(), to);
                    queue.push_back(next);
                    to
                }
            };
            b.add_edge(from, Some(tuple), to);
        }
    }
    b.extend_alphabet(pi.symbols());
    Ok(b.build(s).trim())
}
