//! Finite-state acceptors over interned symbols.
//!
//! An [`Automaton`] is immutable once built. Every operation returns a new
//! automaton; binary operations prune unreachable and dead states before
//! returning. Complement is always taken relative to an explicitly supplied
//! alphabet, never an implicit universe.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt::Write as _;

use thiserror::Error;

use crate::symbol::{SymbolId, SymbolTable};

pub type StateId = usize;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AutomatonError {
    #[error("symbol {0} is not in the automaton's alphabet")]
    UnknownSymbol(SymbolId),
    #[error("alphabet mismatch: operand uses {} symbol(s) outside the declared universe", missing.len())]
    AlphabetMismatch { missing: Vec<SymbolId> },
    #[error("invalid automaton: {0}")]
    Invalid(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// A transition; `label == None` is an ε-move.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    pub label: Option<SymbolId>,
    pub target: StateId,
}

#[derive(Clone, Debug)]
pub struct Automaton {
    initial: StateId,
    finals: Vec<bool>,
    edges: Vec<Vec<Edge>>,
    alphabet: BTreeSet<SymbolId>,
    deterministic: bool,
}

/// Mutable scratch space used by the constructions in this crate.
#[derive(Debug, Default)]
pub(crate) struct Builder {
    finals: Vec<bool>,
    edges: Vec<Vec<Edge>>,
    alphabet: BTreeSet<SymbolId>,
}

impl Builder {
    pub(crate) fn new() -> Self {
        Self::default()
    }

    pub(crate) fn add_state(&mut self, is_final: bool) -> StateId {
        self.finals.push(is_final);
        self.edges.push(Vec::new());
        self.finals.len() - 1
    }

    pub(crate) fn set_final(&mut self, state: StateId, is_final: bool) {
        self.finals[state] = is_final;
    }

    pub(crate) fn add_edge(&mut self, from: StateId, label: Option<SymbolId>, to: StateId) {
        if let Some(sym) = label {
            self.alphabet.insert(sym);
        }
        self.edges[from].push(Edge { label, target: to });
    }

    pub(crate) fn extend_alphabet(&mut self, symbols: impl IntoIterator<Item = SymbolId>) {
        self.alphabet.extend(symbols);
    }

    /// Copies `a` in; returns the offset of its states. Final flags are kept.
    pub(crate) fn embed(&mut self, a: &Automaton) -> StateId {
        let offset = self.finals.len();
        self.finals.extend(a.finals.iter().copied());
        for edges in &a.edges {
            self.edges.push(
                edges
                    .iter()
                    .map(|e| Edge {
                        label: e.label,
                        target: e.target + offset,
                    })
                    .collect(),
            );
        }
        self.alphabet.extend(a.alphabet.iter().copied());
        offset
    }

    pub(crate) fn build(mut self, initial: StateId) -> Automaton {
        for edges in &mut self.edges {
            edges.sort_unstable();
            edges.dedup();
        }
        let deterministic = is_deterministic(&self.edges);
        Automaton {
            initial,
            finals: self.finals,
            edges: self.edges,
            alphabet: self.alphabet,
            deterministic,
        }
    }
}

fn is_deterministic(edges: &[Vec<Edge>]) -> bool {
    edges
        .iter()
        .all(|out| out.iter().all(|e| e.label.is_some()) && out.windows(2).all(|w| w[0].label != w[1].label))
}

impl Automaton {
    /// Assembles an automaton from raw parts, checking the structural invariants.
    pub fn from_parts(
        num_states: usize,
        initial: StateId,
        finals: impl IntoIterator<Item = StateId>,
        transitions: impl IntoIterator<Item = (StateId, Option<SymbolId>, StateId)>,
        alphabet: BTreeSet<SymbolId>,
    ) -> Result<Self, AutomatonError> {
        if initial >= num_states {
            return Err(AutomatonError::Invalid(format!(
                "initial state {initial} out of range (0..{num_states})"
            )));
        }
        let mut b = Builder::new();
        for _ in 0..num_states {
            b.add_state(false);
        }
        for q in finals {
            if q >= num_states {
                return Err(AutomatonError::Invalid(format!("final state {q} out of range")));
            }
            b.set_final(q, true);
        }
        for (src, label, dst) in transitions {
            if src >= num_states || dst >= num_states {
                return Err(AutomatonError::Invalid(format!(
                    "transition {src} -> {dst} out of range"
                )));
            }
            if let Some(sym) = label {
                if !alphabet.contains(&sym) {
                    return Err(AutomatonError::UnknownSymbol(sym));
                }
            }
            b.add_edge(src, label, dst);
        }
        b.alphabet = alphabet;
        Ok(b.build(initial))
    }

    /// The empty language over `alphabet`.
    pub fn empty(alphabet: BTreeSet<SymbolId>) -> Self {
        let mut b = Builder::new();
        let q = b.add_state(false);
        b.extend_alphabet(alphabet);
        b.build(q)
    }

    /// The language `{ε}`.
    pub fn epsilon() -> Self {
        let mut b = Builder::new();
        let q = b.add_state(true);
        b.build(q)
    }

    pub fn symbol(sym: SymbolId) -> Self {
        Self::word(&[sym])
    }

    pub fn word(word: &[SymbolId]) -> Self {
        let mut b = Builder::new();
        let mut q = b.add_state(word.is_empty());
        let start = q;
        for (i, &sym) in word.iter().enumerate() {
            let next = b.add_state(i + 1 == word.len());
            b.add_edge(q, Some(sym), next);
            q = next;
        }
        b.build(start)
    }

    /// Words of length one over `alphabet`.
    pub fn any_symbol(alphabet: &BTreeSet<SymbolId>) -> Self {
        let mut b = Builder::new();
        let start = b.add_state(false);
        let end = b.add_state(true);
        for &sym in alphabet {
            b.add_edge(start, Some(sym), end);
        }
        b.extend_alphabet(alphabet.iter().copied());
        b.build(start)
    }

    /// `alphabet*`.
    pub fn universal(alphabet: &BTreeSet<SymbolId>) -> Self {
        let mut b = Builder::new();
        let q = b.add_state(true);
        for &sym in alphabet {
            b.add_edge(q, Some(sym), q);
        }
        b.extend_alphabet(alphabet.iter().copied());
        b.build(q)
    }

    /// Same language, alphabet widened by `extra`.
    pub fn with_alphabet(&self, extra: impl IntoIterator<Item = SymbolId>) -> Self {
        let mut a = self.clone();
        a.alphabet.extend(extra);
        a
    }

    pub fn num_states(&self) -> usize {
        self.finals.len()
    }

    pub fn initial(&self) -> StateId {
        self.initial
    }

    pub fn is_final(&self, q: StateId) -> bool {
        self.finals[q]
    }

    pub fn finals(&self) -> impl Iterator<Item = StateId> + '_ {
        self.finals.iter().enumerate().filter(|(_, &f)| f).map(|(q, _)| q)
    }

    pub fn edges(&self, q: StateId) -> &[Edge] {
        &self.edges[q]
    }

    pub fn num_transitions(&self) -> usize {
        self.edges.iter().map(Vec::len).sum()
    }

    /// All transitions as `(source, label, target)` triples in state order.
    pub fn transitions(&self) -> impl Iterator<Item = (StateId, Option<SymbolId>, StateId)> + '_ {
        self.edges
            .iter()
            .enumerate()
            .flat_map(|(q, out)| out.iter().map(move |e| (q, e.label, e.target)))
    }

    pub fn alphabet(&self) -> &BTreeSet<SymbolId> {
        &self.alphabet
    }

    pub fn is_deterministic(&self) -> bool {
        self.deterministic
    }

    /// Deterministic successor; only meaningful on deterministic automata.
    fn step(&self, q: StateId, sym: SymbolId) -> Option<StateId> {
        let out = &self.edges[q];
        out.binary_search_by(|e| e.label.cmp(&Some(sym)))
            .ok()
            .map(|i| out[i].target)
    }

    fn epsilon_closure(&self, seeds: impl IntoIterator<Item = StateId>) -> BTreeSet<StateId> {
        let mut closure: BTreeSet<StateId> = BTreeSet::new();
        let mut stack: Vec<StateId> = Vec::new();
        for q in seeds {
            if closure.insert(q) {
                stack.push(q);
            }
        }
        while let Some(q) = stack.pop() {
            for e in &self.edges[q] {
                if e.label.is_none() && closure.insert(e.target) {
                    stack.push(e.target);
                }
            }
        }
        closure
    }

    /// Drops states that are unreachable or cannot reach a final state.
    pub fn trim(&self) -> Self {
        let n = self.num_states();
        let mut forward = vec![false; n];
        let mut queue = VecDeque::from([self.initial]);
        forward[self.initial] = true;
        while let Some(q) = queue.pop_front() {
            for e in &self.edges[q] {
                if !forward[e.target] {
                    forward[e.target] = true;
                    queue.push_back(e.target);
                }
            }
        }
        let mut preds: Vec<Vec<StateId>> = vec![Vec::new(); n];
        for (q, out) in self.edges.iter().enumerate() {
            for e in out {
                preds[e.target].push(q);
            }
        }
        let mut backward = vec![false; n];
        let mut stack: Vec<StateId> = self.finals().collect();
        for &q in &stack {
            backward[q] = true;
        }
        while let Some(q) = stack.pop() {
            for &p in &preds[q] {
                if !backward[p] {
                    backward[p] = true;
                    stack.push(p);
                }
            }
        }
        if !backward[self.initial] {
            return Self::empty(self.alphabet.clone());
        }
        let useful = |q: StateId| forward[q] && backward[q];
        // BFS numbering keeps the output stable for identical inputs.
        let mut renumber: Vec<Option<StateId>> = vec![None; n];
        let mut order = Vec::new();
        renumber[self.initial] = Some(0);
        order.push(self.initial);
        let mut i = 0;
        while i < order.len() {
            let q = order[i];
            i += 1;
            for e in &self.edges[q] {
                if useful(e.target) && renumber[e.target].is_none() {
                    renumber[e.target] = Some(order.len());
                    order.push(e.target);
                }
            }
        }
        let mut b = Builder::new();
        for &q in &order {
            b.add_state(self.finals[q]);
        }
        for (new, &q) in order.iter().enumerate() {
            for e in &self.edges[q] {
                if let Some(t) = renumber[e.target] {
                    b.add_edge(new, e.label, t);
                }
            }
        }
        b.extend_alphabet(self.alphabet.iter().copied());
        b.build(0)
    }

    pub fn concat(&self, other: &Self) -> Self {
        let mut b = Builder::new();
        let a0 = b.embed(self);
        let b0 = b.embed(other);
        for q in self.finals() {
            b.set_final(q + a0, false);
            b.add_edge(q + a0, None, other.initial + b0);
        }
        b.build(self.initial + a0).trim()
    }

    pub fn union(&self, other: &Self) -> Self {
        let mut b = Builder::new();
        let start = b.add_state(false);
        let a0 = b.embed(self);
        let b0 = b.embed(other);
        b.add_edge(start, None, self.initial + a0);
        b.add_edge(start, None, other.initial + b0);
        b.build(start).trim()
    }

    pub fn star(&self) -> Self {
        let mut b = Builder::new();
        let hub = b.add_state(true);
        let a0 = b.embed(self);
        b.add_edge(hub, None, self.initial + a0);
        for q in self.finals() {
            b.add_edge(q + a0, None, hub);
        }
        b.build(hub).trim()
    }

    /// Equivalent automaton without ε-moves.
    pub fn remove_epsilons(&self) -> Self {
        if self.edges.iter().flatten().all(|e| e.label.is_some()) {
            return self.clone();
        }
        let mut b = Builder::new();
        let closures: Vec<BTreeSet<StateId>> = (0..self.num_states()).map(|q| self.epsilon_closure([q])).collect();
        for c in &closures {
            b.add_state(c.iter().any(|&q| self.finals[q]));
        }
        for (p, c) in closures.iter().enumerate() {
            for &q in c {
                for e in &self.edges[q] {
                    if e.label.is_some() {
                        b.add_edge(p, e.label, e.target);
                    }
                }
            }
        }
        b.extend_alphabet(self.alphabet.iter().copied());
        b.build(self.initial).trim()
    }

    pub fn intersect(&self, other: &Self) -> Self {
        let a = self.remove_epsilons();
        let c = other.remove_epsilons();
        let mut b = Builder::new();
        let mut index: HashMap<(StateId, StateId), StateId> = HashMap::new();
        let mut queue = VecDeque::new();
        let start = b.add_state(a.finals[a.initial] && c.finals[c.initial]);
        index.insert((a.initial, c.initial), start);
        queue.push_back((a.initial, c.initial));
        while let Some((p, q)) = queue.pop_front() {
            let from = index[&(p, q)];
            for ea in &a.edges[p] {
                for ec in &c.edges[q] {
                    if ea.label != ec.label {
                        continue;
                    }
                    let key = (ea.target, ec.target);
                    let to = *index.entry(key).or_insert_with(|| {
                        queue.push_back(key);
                        b.add_state(a.finals[key.0] && c.finals[key.1])
                    });
                    b.add_edge(from, ea.label, to);
                }
            }
        }
        b.extend_alphabet(a.alphabet.iter().copied());
        b.extend_alphabet(c.alphabet.iter().copied());
        b.build(start).trim()
    }

    /// `L(self) − L(other)`.
    pub fn difference(&self, other: &Self) -> Self {
        let a = self.remove_epsilons();
        let c = other.determinize();
        let mut b = Builder::new();
        let mut index: HashMap<(StateId, Option<StateId>), StateId> = HashMap::new();
        let mut queue = VecDeque::new();
        let accept = |p: StateId, q: Option<StateId>| a.finals[p] && !q.is_some_and(|q| c.finals[q]);
        let start_key = (a.initial, Some(c.initial));
        let start = b.add_state(accept(start_key.0, start_key.1));
        index.insert(start_key, start);
        queue.push_back(start_key);
        while let Some((p, q)) = queue.pop_front() {
            let from = index[&(p, q)];
            for ea in &a.edges[p] {
                let sym = ea.label.expect("ε-free");
                let key = (ea.target, q.and_then(|q| c.step(q, sym)));
                let to = *index.entry(key).or_insert_with(|| {
                    queue.push_back(key);
                    b.add_state(accept(key.0, key.1))
                });
                b.add_edge(from, Some(sym), to);
            }
        }
        b.extend_alphabet(a.alphabet.iter().copied());
        b.extend_alphabet(c.alphabet.iter().copied());
        b.build(start).trim()
    }

    /// `alphabet* − L(self)`. Fails if `self` uses symbols outside `alphabet`.
    pub fn complement(&self, alphabet: &BTreeSet<SymbolId>) -> Result<Self, AutomatonError> {
        let missing: Vec<SymbolId> = self.alphabet.difference(alphabet).copied().collect();
        if !missing.is_empty() {
            return Err(AutomatonError::AlphabetMismatch { missing });
        }
        let d = self.determinize();
        let mut b = Builder::new();
        for q in 0..d.num_states() {
            b.add_state(!d.finals[q]);
        }
        let sink = b.add_state(true);
        for q in 0..d.num_states() {
            for &sym in alphabet {
                let to = d.step(q, sym).unwrap_or(sink);
                b.add_edge(q, Some(sym), to);
            }
        }
        for &sym in alphabet {
            b.add_edge(sink, Some(sym), sink);
        }
        b.extend_alphabet(alphabet.iter().copied());
        Ok(b.build(d.initial).trim())
    }

    /// Subset construction; the result is trimmed and has no ε-moves.
    pub fn determinize(&self) -> Self {
        if self.deterministic {
            return self.trim();
        }
        let mut b = Builder::new();
        let mut index: HashMap<Vec<StateId>, StateId> = HashMap::new();
        let mut queue: VecDeque<Vec<StateId>> = VecDeque::new();
        let start: Vec<StateId> = self.epsilon_closure([self.initial]).into_iter().collect();
        let s = b.add_state(start.iter().any(|&q| self.finals[q]));
        index.insert(start.clone(), s);
        queue.push_back(start);
        while let Some(set) = queue.pop_front() {
            let from = index[&set];
            let mut moves: BTreeMap<SymbolId, BTreeSet<StateId>> = BTreeMap::new();
            for &q in &set {
                for e in &self.edges[q] {
                    if let Some(sym) = e.label {
                        moves.entry(sym).or_default().insert(e.target);
                    }
                }
            }
            for (sym, targets) in moves {
                let next: Vec<StateId> = self.epsilon_closure(targets).into_iter().collect();
                let to = match index.get(&next) {
                    Some(&to) => to,
                    None => {
                        let to = b.add_state(next.iter().any(|&q| self.finals[q]));
                        index.insert(next.clone(), to);
                        queue.push_back(next);
                        to
                    }
                };
                b.add_edge(from, Some(sym), to);
            }
        }
        b.extend_alphabet(self.alphabet.iter().copied());
        b.build(s).trim()
    }

    /// Minimal partial DFA (no dead states), numbered in BFS order over
    /// symbol order, so equal languages over equal alphabets yield identical
    /// automata.
    pub fn minimize(&self) -> Self {
        let d = self.determinize();
        let n = d.num_states();
        let symbols: Vec<SymbolId> = d.alphabet.iter().copied().collect();
        let sink = n;
        let succ = |q: StateId, sym: SymbolId| -> StateId {
            if q == sink {
                sink
            } else {
                d.step(q, sym).unwrap_or(sink)
            }
        };
        let mut class: Vec<usize> = (0..=n).map(|q| usize::from(q < n && d.finals[q])).collect();
        let mut count = class.iter().collect::<BTreeSet<_>>().len();
        loop {
            let mut ids: HashMap<Vec<usize>, usize> = HashMap::new();
            let mut next = vec![0; n + 1];
            for q in 0..=n {
                let mut signature = Vec::with_capacity(symbols.len() + 1);
                signature.push(class[q]);
                signature.extend(symbols.iter().map(|&s| class[succ(q, s)]));
                let fresh = ids.len();
                next[q] = *ids.entry(signature).or_insert(fresh);
            }
            let new_count = ids.len();
            class = next;
            if new_count == count {
                break;
            }
            count = new_count;
        }
        let dead = class[sink];
        let mut b = Builder::new();
        let mut rep: HashMap<usize, StateId> = HashMap::new();
        let mut order: Vec<StateId> = Vec::new();
        rep.insert(class[d.initial], 0);
        order.push(d.initial);
        let mut i = 0;
        while i < order.len() {
            let q = order[i];
            i += 1;
            for e in &d.edges[q] {
                let c = class[e.target];
                if c != dead && !rep.contains_key(&c) {
                    rep.insert(c, order.len());
                    order.push(e.target);
                }
            }
        }
        for &q in &order {
            b.add_state(d.finals[q]);
        }
        for (new, &q) in order.iter().enumerate() {
            for e in &d.edges[q] {
                if let Some(&to) = rep.get(&class[e.target]) {
                    b.add_edge(new, e.label, to);
                }
            }
        }
        b.extend_alphabet(d.alphabet.iter().copied());
        b.build(0)
    }

    /// Automaton for the reversed language.
    pub fn reverse(&self) -> Self {
        let mut b = Builder::new();
        for _ in 0..self.num_states() {
            b.add_state(false);
        }
        b.set_final(self.initial, true);
        let start = b.add_state(false);
        for (q, label, t) in self.transitions() {
            b.add_edge(t, label, q);
        }
        for q in self.finals() {
            b.add_edge(start, None, q);
        }
        b.extend_alphabet(self.alphabet.iter().copied());
        b.build(start)
    }

    pub fn accepts(&self, word: &[SymbolId]) -> Result<bool, AutomatonError> {
        if let Some(&bad) = word.iter().find(|s| !self.alphabet.contains(s)) {
            return Err(AutomatonError::UnknownSymbol(bad));
        }
        let mut current = self.epsilon_closure([self.initial]);
        for &sym in word {
            let targets: Vec<StateId> = current
                .iter()
                .flat_map(|&q| self.edges[q].iter())
                .filter(|e| e.label == Some(sym))
                .map(|e| e.target)
                .collect();
            if targets.is_empty() {
                return Ok(false);
            }
            current = self.epsilon_closure(targets);
        }
        Ok(current.iter().any(|&q| self.finals[q]))
    }

    pub fn is_empty(&self) -> bool {
        self.trim().finals().next().is_none()
    }

    pub fn equivalent(&self, other: &Self) -> bool {
        self.difference(other).is_empty() && other.difference(self).is_empty()
    }

    /// `L(self) ⊆ L(other)`.
    pub fn is_subset_of(&self, other: &Self) -> bool {
        self.difference(other).is_empty()
    }

    /// Accepted words of length `<= max_len`, shortest first and
    /// lexicographic (by symbol id) within a length.
    pub fn enumerate(&self, max_len: usize) -> Vec<Vec<SymbolId>> {
        let d = self.determinize();
        let mut out = Vec::new();
        let mut frontier: Vec<(Vec<SymbolId>, StateId)> = vec![(Vec::new(), d.initial)];
        for len in 0..=max_len {
            out.extend(frontier.iter().filter(|(_, q)| d.finals[*q]).map(|(w, _)| w.clone()));
            if len == max_len {
                break;
            }
            let mut next = Vec::new();
            for (w, q) in &frontier {
                for e in &d.edges[*q] {
                    let mut w2 = w.clone();
                    w2.push(e.label.expect("deterministic"));
                    next.push((w2, e.target));
                }
            }
            frontier = next;
        }
        out
    }

    /// Text dump: header, symbol lines, transition lines, final lines.
    /// Symbols are renumbered densely in the order of their ids; ε-moves are
    /// written with `-` in place of the symbol index.
    pub fn to_text(&self, table: &SymbolTable) -> String {
        let local: HashMap<SymbolId, usize> = self.alphabet.iter().enumerate().map(|(i, &s)| (s, i)).collect();
        let mut out = String::new();
        let _ = writeln!(
            out,
            "states {} initial {} alphabet {}",
            self.num_states(),
            self.initial,
            self.alphabet.len()
        );
        for (i, &s) in self.alphabet.iter().enumerate() {
            let _ = writeln!(out, "sym {i} {}", table.name(s));
        }
        for (q, label, t) in self.transitions() {
            match label {
                Some(s) => {
                    let _ = writeln!(out, "{q} {} {t}", local[&s]);
                }
                None => {
                    let _ = writeln!(out, "{q} - {t}");
                }
            }
        }
        for q in self.finals() {
            let _ = writeln!(out, "final {q}");
        }
        out
    }

    /// Parses [`Automaton::to_text`] output, interning names into `table`.
    pub fn from_text(text: &str, table: &mut SymbolTable) -> Result<Self, AutomatonError> {
        let err = |line: usize, message: String| AutomatonError::Parse { line, message };
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (hline, header) = lines.next().ok_or_else(|| err(1, "empty automaton dump".into()))?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        let (num_states, initial, k) = match fields.as_slice() {
            ["states", n, "initial", q, "alphabet", k] => {
                let parse = |s: &str| {
                    s.parse::<usize>()
                        .map_err(|_| err(hline, format!("expected a number, found `{s}`")))
                };
                (parse(n)?, parse(q)?, parse(k)?)
            }
            _ => return Err(err(hline, "expected `states <n> initial <q0> alphabet <k>`".into())),
        };
        let mut symbols: Vec<Option<SymbolId>> = vec![None; k];
        let mut finals = Vec::new();
        let mut transitions = Vec::new();
        for (line, content) in lines {
            let fields: Vec<&str> = content.split_whitespace().collect();
            let num = |s: &str| {
                s.parse::<usize>()
                    .map_err(|_| err(line, format!("expected a number, found `{s}`")))
            };
            match fields.as_slice() {
                ["sym", i, name] => {
                    let i = num(i)?;
                    if i >= k {
                        return Err(err(line, format!("symbol index {i} out of range")));
                    }
                    symbols[i] = Some(table.intern(name));
                }
                ["final", q] => finals.push(num(q)?),
                [src, sym, dst] => {
                    let label = if *sym == "-" {
                        None
                    } else {
                        let i = num(sym)?;
                        let id = symbols
                            .get(i)
                            .copied()
                            .flatten()
                            .ok_or_else(|| err(line, format!("undeclared symbol index {i}")))?;
                        Some(id)
                    };
                    transitions.push((num(src)?, label, num(dst)?));
                }
                _ => return Err(err(line, format!("unrecognised line `{content}`"))),
            }
        }
        let alphabet: BTreeSet<SymbolId> = symbols
            .iter()
            .enumerate()
            .map(|(i, s)| s.ok_or_else(|| err(hline, format!("symbol index {i} never declared"))))
            .collect::<Result<_, _>>()?;
        Self::from_parts(num_states, initial, finals, transitions, alphabet)
    }

    /// Graphviz rendering for inspection.
    pub fn to_dot(&self, table: &SymbolTable, name: &str) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "digraph \"{}\" {{", name.replace('"', "\\\""));
        let _ = writeln!(out, "  rankdir=LR;");
        let _ = writeln!(out, "  start [shape=point];");
        for q in 0..self.num_states() {
            let shape = if self.finals[q] { "doublecircle" } else { "circle" };
            let _ = writeln!(out, "  q{q} [shape={shape}, label=\"q{q}\"];");
        }
        let _ = writeln!(out, "  start -> q{};", self.initial);
        // Parallel edges are merged into one comma-separated label.
        let mut merged: BTreeMap<(StateId, StateId), Vec<String>> = BTreeMap::new();
        for (q, label, t) in self.transitions() {
            let text = match label {
                Some(s) => table.name(s).replace('"', "\\\""),
                None => "ε".to_owned(),
            };
            merged.entry((q, t)).or_default().push(text);
        }
        for ((q, t), labels) in merged {
            let _ = writeln!(out, "  q{q} -> q{t} [label=\"{}\"];", labels.join(", "));
        }
        out.push_str("}\n");
        out
    }
}
