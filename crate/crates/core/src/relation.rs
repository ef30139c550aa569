//! The compiled n-tape relation.
//!
//! Transitions carry labels such as `B:b` or `-:b`: one component per tape,
//! `-` meaning the tape does not advance.

use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};

use crate::automaton::{Automaton, AutomatonError};
use crate::grammar::{StringTuple, TapeConfig};
use crate::symbol::{SymbolId, SymbolTable};

/// Rendering of an empty label component.
pub const EMPTY: char = '-';

/// One label component per tape; `None` reads nothing on that tape.
pub type Label = Vec<Option<char>>;

pub fn label_name(label: &[Option<char>]) -> String {
    label
        .iter()
        .map(|c| c.unwrap_or(EMPTY).to_string())
        .collect::<Vec<_>>()
        .join(":")
}

fn parse_label(name: &str, tapes: usize) -> Result<Label, String> {
    let parts: Vec<&str> = name.split(':').collect();
    if parts.len() != tapes {
        return Err(format!(
            "label {name:?} has {} components, expected {tapes}",
            parts.len()
        ));
    }
    parts
        .into_iter()
        .map(|p| {
            let mut chars = p.chars();
            match (chars.next(), chars.next()) {
                (Some(EMPTY), None) => Ok(None),
                (Some(c), None) => Ok(Some(c)),
                _ => Err(format!("bad label component {p:?} in {name:?}")),
            }
        })
        .collect()
}

/// A deterministic, minimal automaton over tuple labels.
#[derive(Clone, Debug)]
pub struct CompiledRelation {
    tapes: TapeConfig,
    table: SymbolTable,
    labels: BTreeMap<SymbolId, Label>,
    automaton: Automaton,
}

impl CompiledRelation {
    /// `automaton` must only use symbols registered in `labels`.
    pub fn new(
        tapes: TapeConfig,
        table: SymbolTable,
        labels: BTreeMap<SymbolId, Label>,
        automaton: Automaton,
    ) -> Result<Self, AutomatonError> {
        for (_, label, _) in automaton.transitions() {
            match label {
                None => return Err(AutomatonError::Invalid("relation has an ε transition".into())),
                Some(s) => {
                    let l = labels.get(&s).ok_or(AutomatonError::UnknownSymbol(s))?;
                    if l.len() != tapes.tapes() {
                        return Err(AutomatonError::Invalid(format!(
                            "label {} has arity {}",
                            label_name(l),
                            l.len()
                        )));
                    }
                    if l.iter().all(Option::is_none) {
                        return Err(AutomatonError::Invalid("relation has an all-empty label".into()));
                    }
                }
            }
        }
        Ok(Self {
            tapes,
            table,
            labels,
            automaton,
        })
    }

    pub fn tapes(&self) -> &TapeConfig {
        &self.tapes
    }

    pub fn automaton(&self) -> &Automaton {
        &self.automaton
    }

    pub fn table(&self) -> &SymbolTable {
        &self.table
    }

    pub fn label(&self, sym: SymbolId) -> &Label {
        &self.labels[&sym]
    }

    pub fn labels(&self) -> impl Iterator<Item = (SymbolId, &Label)> {
        self.labels.iter().map(|(&s, l)| (s, l))
    }

    pub fn num_states(&self) -> usize {
        self.automaton.num_states()
    }

    pub fn num_transitions(&self) -> usize {
        self.automaton.num_transitions()
    }

    /// Whether some path spells exactly `p` on every tape.
    ///
    /// Returns false when the arity of `p` differs from the relation's.
    pub fn accepts_tuple(&self, p: &StringTuple) -> bool {
        if p.arity() != self.tapes.tapes() {
            return false;
        }
        let input: Vec<Vec<char>> = p.0.iter().map(|s| s.chars().collect()).collect();
        let start = (self.automaton.initial(), vec![0usize; input.len()]);
        let mut seen = HashSet::from([start.clone()]);
        let mut queue = VecDeque::from([start]);
        while let Some((q, pos)) = queue.pop_front() {
            if self.automaton.is_final(q) && pos.iter().zip(&input).all(|(&i, t)| i == t.len()) {
                return true;
            }
            for e in self.automaton.edges(q) {
                let label = &self.labels[&e.label.expect("ε-free")];
                let mut next = pos.clone();
                let fits = label.iter().enumerate().all(|(i, c)| match c {
                    None => true,
                    Some(c) => {
                        let ok = input[i].get(pos[i]) == Some(c);
                        next[i] += 1;
                        ok
                    }
                });
                if fits {
                    let state = (e.target, next);
                    if seen.insert(state.clone()) {
                        queue.push_back(state);
                    }
                }
            }
        }
        false
    }

    /// Text dump: a `relation` header, one `tape` line per alphabet, then
    /// the automaton.
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "relation lexical {} surface {}\n",
            self.tapes.lexical(),
            self.tapes.surface()
        );
        for (i, alpha) in self.tapes.alphabets().iter().enumerate() {
            let syms: Vec<String> = alpha.iter().map(char::to_string).collect();
            out.push_str(&format!("tape {} : {}\n", i + 1, syms.join(" ")));
        }
        out.push_str(&self.automaton.to_text(&self.table));
        out
    }

    pub fn from_text(text: &str) -> Result<Self, AutomatonError> {
        let parse_err = |line: usize, message: String| AutomatonError::Parse { line, message };
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (hline, header) = lines.next().ok_or_else(|| parse_err(1, "empty relation file".into()))?;
        let h: Vec<&str> = header.split_whitespace().collect();
        let (lexical, surface) = match h.as_slice() {
            ["relation", "lexical", n, "surface", m] => (
                n.parse::<usize>().map_err(|e| parse_err(hline + 1, e.to_string()))?,
                m.parse::<usize>().map_err(|e| parse_err(hline + 1, e.to_string()))?,
            ),
            _ => return Err(parse_err(hline + 1, "expected `relation lexical N surface M`".into())),
        };
        let mut alphabets = Vec::new();
        let mut body_start = None;
        for (i, line) in lines {
            let words: Vec<&str> = line.split_whitespace().collect();
            if words.first() != Some(&"tape") {
                body_start = Some(i);
                break;
            }
            if words.get(1) != Some(&(alphabets.len() + 1).to_string().as_str()) || words.get(2) != Some(&":") {
                return Err(parse_err(i + 1, format!("expected `tape {} : …`", alphabets.len() + 1)));
            }
            let mut set = BTreeSet::new();
            for w in &words[3..] {
                let mut cs = w.chars();
                match (cs.next(), cs.next()) {
                    (Some(c), None) => set.insert(c),
                    _ => return Err(parse_err(i + 1, format!("bad symbol {w:?}"))),
                };
            }
            alphabets.push(set);
        }
        let tapes = TapeConfig::new(lexical, surface, alphabets).map_err(|m| parse_err(hline + 1, m))?;
        let body_start = body_start.ok_or_else(|| parse_err(hline + 1, "missing automaton".into()))?;
        let body: String = text.lines().skip(body_start).collect::<Vec<_>>().join("\n");
        let mut table = SymbolTable::new();
        let automaton = Automaton::from_text(&body, &mut table).map_err(|e| match e {
            AutomatonError::Parse { line, message } => parse_err(line + body_start, message),
            other => other,
        })?;
        let mut labels = BTreeMap::new();
        for &s in automaton.alphabet() {
            let label = parse_label(table.name(s), tapes.tapes()).map_err(|m| parse_err(0, m))?;
            labels.insert(s, label);
        }
        Self::new(tapes, table, labels, automaton)
    }

    /// Graphviz rendering with `B:b` style edge labels.
    pub fn to_dot(&self, name: &str) -> String {
        self.automaton.to_dot(&self.table, name)
    }
}
