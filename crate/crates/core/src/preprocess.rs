//! Same-length preprocessing.
//!
//! Rule centres are right-padded with the space symbol `0` into tuple
//! strings (one tuple symbol per column). The set of padded centres is `D`,
//! and the columns occurring in `D` form the tuple alphabet `π`. Contexts
//! and coercion centres are not padded; instead `0` is inserted at every
//! position on every tape independently and the result is restricted to `π*`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::automaton::Automaton;
use crate::calculus::{from_regex, intro, tuple_product, CalculusError, Regex, TupleAlphabet};
use crate::grammar::{Grammar, Pattern, ScRule, StringTuple};
use crate::symbol::{SymbolId, SymbolTable};

/// Name of the padding symbol.
pub const ZERO: &str = "0";
/// Name of the partition boundary marker ω.
pub const OMEGA: &str = "w";
/// Name of the centre placeholder τ.
pub const TAU: &str = "t";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PreprocessError {
    #[error("grammar has no context-restriction rules, so no partition is licensable")]
    NoRestrictionRules,
    #[error("centres of rules {first} and {second} overlap without being equal")]
    OverlappingCentres { first: String, second: String },
    #[error(transparent)]
    Calculus(#[from] CalculusError),
}

/// One column of a padded tuple string; `None` is the space symbol `0`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Column(pub Vec<Option<char>>);

impl Column {
    /// Symbol name: components joined by `:`, with `0` for padding.
    pub fn name(&self) -> String {
        self.0
            .iter()
            .map(|c| c.map_or_else(|| ZERO.to_owned(), |c| c.to_string()))
            .collect::<Vec<_>>()
            .join(":")
    }

    pub fn is_all_zero(&self) -> bool {
        self.0.iter().all(Option::is_none)
    }
}

impl fmt::Display for Column {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|c| c.map_or_else(|| ZERO.to_owned(), |c| c.to_string()))
            .collect();
        write!(f, "⟨{}⟩", parts.join(","))
    }
}

/// A centre tuple converted to a same-length tuple string.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PaddedCentre {
    pub columns: Vec<Column>,
}

impl PaddedCentre {
    /// Deletes the padding on every tape.
    pub fn unpad(&self, tapes: usize) -> StringTuple {
        StringTuple(
            (0..tapes)
                .map(|i| self.columns.iter().filter_map(|c| c.0[i]).collect())
                .collect(),
        )
    }
}

impl fmt::Display for PaddedCentre {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.columns.is_empty() {
            return f.write_str("ε");
        }
        self.columns.iter().try_for_each(|c| write!(f, "{c}"))
    }
}

/// Right-pads every component with `0` to the longest component's length.
pub fn pad_centre(centre: &StringTuple) -> PaddedCentre {
    let tapes: Vec<Vec<char>> = centre.0.iter().map(|s| s.chars().collect()).collect();
    let width = tapes.iter().map(Vec::len).max().unwrap_or(0);
    let columns = (0..width)
        .map(|k| Column(tapes.iter().map(|t| t.get(k).copied()).collect()))
        .collect();
    PaddedCentre { columns }
}

/// An element of `D`: a padded CR centre and the rules that share it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CentreClass {
    pub members: BTreeSet<PaddedCentre>,
    /// Indices into the grammar's CR rule list.
    pub rules: Vec<usize>,
}

/// Groups CR rules by centre. Equal centres share a class; distinct centres
/// must be disjoint.
pub fn build_d(g: &Grammar) -> Result<Vec<CentreClass>, PreprocessError> {
    if g.cr_rules.is_empty() {
        return Err(PreprocessError::NoRestrictionRules);
    }
    let mut classes: Vec<(BTreeSet<StringTuple>, CentreClass)> = Vec::new();
    for (i, rule) in g.cr_rules.iter().enumerate() {
        match classes.iter_mut().find(|(c, _)| *c == rule.centre) {
            Some((_, class)) => class.rules.push(i),
            None => {
                if let Some((_, other)) = classes.iter().find(|(c, _)| !c.is_disjoint(&rule.centre)) {
                    return Err(PreprocessError::OverlappingCentres {
                        first: g.cr_rules[other.rules[0]].name.clone(),
                        second: rule.name.clone(),
                    });
                }
                let members = rule.centre.iter().map(pad_centre).collect();
                classes.push((
                    rule.centre.clone(),
                    CentreClass {
                        members,
                        rules: vec![i],
                    },
                ));
            }
        }
    }
    Ok(classes.into_iter().map(|(_, c)| c).collect())
}

/// Interned symbols, `π`, and `D` for one grammar.
#[derive(Clone, Debug)]
pub struct Preprocessed {
    pub table: SymbolTable,
    pub zero: SymbolId,
    pub omega: SymbolId,
    pub tau: SymbolId,
    /// Σᵢ as interned atoms, without `0`.
    pub tape_alphabets: Vec<BTreeSet<SymbolId>>,
    pub pi: TupleAlphabet,
    pub d: Vec<CentreClass>,
    atoms: BTreeMap<char, SymbolId>,
    columns: BTreeMap<Column, SymbolId>,
}

impl Preprocessed {
    pub fn new(g: &Grammar) -> Result<Self, PreprocessError> {
        let d = build_d(g)?;
        let mut table = SymbolTable::new();
        let zero = table.intern(ZERO);
        let omega = table.intern(OMEGA);
        let tau = table.intern(TAU);
        let mut atoms = BTreeMap::new();
        let tape_alphabets: Vec<BTreeSet<SymbolId>> = g
            .tapes
            .alphabets()
            .iter()
            .map(|alpha| {
                alpha
                    .iter()
                    .map(|&c| *atoms.entry(c).or_insert_with(|| table.intern(&c.to_string())))
                    .collect()
            })
            .collect();
        let component_alphabets = tape_alphabets
            .iter()
            .map(|a| {
                let mut a = a.clone();
                a.insert(zero);
                a
            })
            .collect();
        let mut pi = TupleAlphabet::new(component_alphabets);
        let mut columns = BTreeMap::new();
        for class in &d {
            for member in &class.members {
                for col in &member.columns {
                    if columns.contains_key(col) {
                        continue;
                    }
                    let id = table.intern(&col.name());
                    let comps = col.0.iter().map(|c| c.map_or(zero, |c| atoms[&c])).collect();
                    pi.insert(id, comps)?;
                    columns.insert(col.clone(), id);
                }
            }
        }
        Ok(Self {
            table,
            zero,
            omega,
            tau,
            tape_alphabets,
            pi,
            d,
            atoms,
            columns,
        })
    }

    pub fn tapes(&self) -> usize {
        self.tape_alphabets.len()
    }

    pub fn atom(&self, c: char) -> Option<SymbolId> {
        self.atoms.get(&c).copied()
    }

    pub fn column_symbol(&self, col: &Column) -> Option<SymbolId> {
        self.columns.get(col).copied()
    }

    /// The column a tuple symbol of `π` stands for.
    pub fn column_of(&self, sym: SymbolId) -> Option<&Column> {
        self.columns.iter().find(|(_, &s)| s == sym).map(|(c, _)| c)
    }

    pub fn pi_symbols(&self) -> BTreeSet<SymbolId> {
        self.pi.symbols()
    }

    /// `π ∪ {ω}`.
    pub fn marked_alphabet(&self) -> BTreeSet<SymbolId> {
        let mut a = self.pi.symbols();
        a.insert(self.omega);
        a
    }

    pub fn padded_word(&self, p: &PaddedCentre) -> Vec<SymbolId> {
        p.columns.iter().map(|c| self.columns[c]).collect()
    }

    /// Padded centres of one class, as a language over `π`.
    pub fn class_language(&self, class: &CentreClass) -> Automaton {
        class
            .members
            .iter()
            .fold(Automaton::empty(self.pi_symbols()), |acc, m| {
                acc.union(&Automaton::word(&self.padded_word(m)))
            })
    }

    /// The union of all padded centres, `D` as a language.
    pub fn d_language(&self) -> Automaton {
        self.d.iter().fold(Automaton::empty(self.pi_symbols()), |acc, c| {
            acc.union(&self.class_language(c))
        })
    }

    /// Padded tuple string of a marked word, e.g. `"w B:b w"` → ids.
    pub fn word(&self, text: &str) -> Option<Vec<SymbolId>> {
        text.split_whitespace().map(|s| self.table.get(s)).collect()
    }

    pub fn render(&self, word: &[SymbolId]) -> String {
        self.table.render(word)
    }

    fn pattern_regex(&self, tape: usize, p: &Pattern) -> Regex {
        let go = |q: &Pattern| self.pattern_regex(tape, q);
        match p {
            Pattern::Epsilon => Regex::Epsilon,
            Pattern::Symbol(c) => Regex::Atom(self.atoms[c]),
            Pattern::Any => Regex::Union(self.tape_alphabets[tape].iter().map(|&s| Regex::Atom(s)).collect()),
            Pattern::Concat(ps) => Regex::Concat(ps.iter().map(go).collect()),
            Pattern::Union(ps) => Regex::Union(ps.iter().map(go).collect()),
            Pattern::Star(q) => go(q).star(),
            Pattern::Plus(q) => Regex::Concat(vec![go(q), go(q).star()]),
            Pattern::Optional(q) => Regex::Union(vec![go(q), Regex::Epsilon]),
        }
    }

    /// `L(p)` over Σ of `tape`.
    pub fn tape_language(&self, tape: usize, p: &Pattern) -> Result<Automaton, PreprocessError> {
        Ok(from_regex(&self.pattern_regex(tape, p), &self.tape_alphabets[tape])?)
    }

    fn sigma_star(&self, tape: usize) -> Automaton {
        Automaton::universal(&self.tape_alphabets[tape])
    }

    /// `Σᵢ* p` on each tape.
    pub fn left_context(&self, patterns: &[Pattern]) -> Result<Vec<Automaton>, PreprocessError> {
        patterns
            .iter()
            .enumerate()
            .map(|(i, p)| Ok(self.sigma_star(i).concat(&self.tape_language(i, p)?)))
            .collect()
    }

    /// `p Σᵢ*` on each tape.
    pub fn right_context(&self, patterns: &[Pattern]) -> Result<Vec<Automaton>, PreprocessError> {
        patterns
            .iter()
            .enumerate()
            .map(|(i, p)| Ok(self.tape_language(i, p)?.concat(&self.sigma_star(i))))
            .collect()
    }

    /// `(Intro₀ x₁ × … × Intro₀ xₙ) ∩ π*` for per-tape languages over Σᵢ.
    pub fn izeros(&self, per_tape: &[Automaton]) -> Result<Automaton, PreprocessError> {
        let zero = BTreeSet::from([self.zero]);
        let with_zeros: Vec<Automaton> = per_tape.iter().map(|a| intro(&zero, a)).collect();
        Ok(tuple_product(&with_zeros, &self.pi)?)
    }

    pub fn left_izeros(&self, patterns: &[Pattern]) -> Result<Automaton, PreprocessError> {
        self.izeros(&self.left_context(patterns)?)
    }

    pub fn right_izeros(&self, patterns: &[Pattern]) -> Result<Automaton, PreprocessError> {
        self.izeros(&self.right_context(patterns)?)
    }

    /// Tuple strings over `π` matching the lexical centre but not the
    /// surface centre. Both centres get 0-insertion, never canonical
    /// padding, so an empty lexical centre still matches ε.
    pub fn sc_centre_language(&self, rule: &ScRule) -> Result<Automaton, PreprocessError> {
        let n = self.tapes();
        let lexical = rule.lexical_centre.len();
        let mut lex_tapes = Vec::with_capacity(n);
        let mut surf_tapes = Vec::with_capacity(n);
        for tape in 0..n {
            if tape < lexical {
                lex_tapes.push(self.tape_language(tape, &rule.lexical_centre[tape])?);
                surf_tapes.push(self.sigma_star(tape));
            } else {
                lex_tapes.push(self.sigma_star(tape));
                surf_tapes.push(self.tape_language(tape, &rule.surface_centre[tape - lexical])?);
            }
        }
        Ok(self.izeros(&lex_tapes)?.difference(&self.izeros(&surf_tapes)?))
    }
}
