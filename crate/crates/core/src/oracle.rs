//! Brute-force interpreter of grammar acceptance.
//!
//! A tuple is accepted when some partition of it into CR centres has every
//! piece licensed in its context and no span of pieces coercively
//! disallowed by an SC rule. Nothing here touches automata; patterns are
//! matched directly on characters.

use std::collections::BTreeSet;

use crate::compiler::Variant;
use crate::grammar::{CrRule, Grammar, Pattern, ScRule, StringTuple, TapeConfig};

/// Position sets are bitmasks, so inputs are capped well above desk scale.
pub const MAX_TAPE_LEN: usize = 63;

type Positions = u64;

fn advance(p: &Pattern, s: &[char], alphabet: &BTreeSet<char>, from: Positions) -> Positions {
    let shift = |pred: &dyn Fn(char) -> bool| {
        let mut out = 0;
        for (i, &c) in s.iter().enumerate() {
            if from & (1 << i) != 0 && pred(c) {
                out |= 1 << (i + 1);
            }
        }
        out
    };
    match p {
        Pattern::Epsilon => from,
        Pattern::Symbol(c) => shift(&|x| x == *c),
        Pattern::Any => shift(&|x| alphabet.contains(&x)),
        Pattern::Concat(ps) => ps.iter().fold(from, |acc, q| advance(q, s, alphabet, acc)),
        Pattern::Union(ps) => ps.iter().fold(0, |acc, q| acc | advance(q, s, alphabet, from)),
        Pattern::Star(q) => closure(q, s, alphabet, from),
        Pattern::Plus(q) => closure(q, s, alphabet, advance(q, s, alphabet, from)),
        Pattern::Optional(q) => from | advance(q, s, alphabet, from),
    }
}

fn closure(q: &Pattern, s: &[char], alphabet: &BTreeSet<char>, from: Positions) -> Positions {
    let mut reached = from;
    let mut frontier = from;
    while frontier != 0 {
        let next = advance(q, s, alphabet, frontier) & !reached;
        reached |= next;
        frontier = next;
    }
    reached
}

/// Whether `p` matches all of `s`.
pub fn full_match(p: &Pattern, s: &[char], alphabet: &BTreeSet<char>) -> bool {
    assert!(s.len() <= MAX_TAPE_LEN, "oracle input too long");
    advance(p, s, alphabet, 1) & (1 << s.len()) != 0
}

/// Whether some suffix of `s` matches `p` (left contexts are `Σ* p`).
pub fn suffix_match(p: &Pattern, s: &[char], alphabet: &BTreeSet<char>) -> bool {
    (0..=s.len()).any(|k| full_match(p, &s[k..], alphabet))
}

/// Whether some prefix of `s` matches `p` (right contexts are `p Σ*`).
pub fn prefix_match(p: &Pattern, s: &[char], alphabet: &BTreeSet<char>) -> bool {
    assert!(s.len() <= MAX_TAPE_LEN, "oracle input too long");
    advance(p, s, alphabet, 1) != 0
}

fn chars(t: &StringTuple) -> Vec<Vec<char>> {
    t.0.iter().map(|s| s.chars().collect()).collect()
}

fn contexts_hold(tapes: &TapeConfig, left: &[Pattern], right: &[Pattern], pl: &[Vec<char>], pr: &[Vec<char>]) -> bool {
    (0..tapes.tapes()).all(|i| {
        suffix_match(&left[i], &pl[i], tapes.alphabet(i)) && prefix_match(&right[i], &pr[i], tapes.alphabet(i))
    })
}

/// `Pl ∈ l`, `Pc ∈ c` and `Pr ∈ r`.
pub fn contextually_allows(
    tapes: &TapeConfig,
    rule: &CrRule,
    pl: &StringTuple,
    pc: &StringTuple,
    pr: &StringTuple,
) -> bool {
    rule.centre.contains(pc) && contexts_hold(tapes, &rule.left, &rule.right, &chars(pl), &chars(pr))
}

fn disallows(tapes: &TapeConfig, rule: &ScRule, pl: &[Vec<char>], pc: &[Vec<char>], pr: &[Vec<char>]) -> bool {
    let n = tapes.lexical();
    let lexical_matches = rule
        .lexical_centre
        .iter()
        .enumerate()
        .all(|(i, p)| full_match(p, &pc[i], tapes.alphabet(i)));
    if !lexical_matches {
        return false;
    }
    let surface_matches = rule
        .surface_centre
        .iter()
        .enumerate()
        .all(|(j, p)| full_match(p, &pc[n + j], tapes.alphabet(n + j)));
    !surface_matches && contexts_hold(tapes, &rule.left, &rule.right, pl, pr)
}

/// `Pl ∈ l`, `Pr ∈ r`, `Pc ∈ c_l` and `Pc ∉ c_s`.
pub fn coercively_disallows(
    tapes: &TapeConfig,
    rule: &ScRule,
    pl: &StringTuple,
    pc: &StringTuple,
    pr: &StringTuple,
) -> bool {
    disallows(tapes, rule, &chars(pl), &chars(pc), &chars(pr))
}

/// A tuple split tape-wise into consecutive pieces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartitionedAnalysis {
    pub tuple: StringTuple,
    pub pieces: Vec<StringTuple>,
}

impl PartitionedAnalysis {
    /// The tuple is the tape-wise concatenation of `pieces`.
    pub fn from_pieces(arity: usize, pieces: Vec<StringTuple>) -> Self {
        let tuple = pieces
            .iter()
            .fold(StringTuple(vec![String::new(); arity]), |acc, p| acc.concat(p));
        Self { tuple, pieces }
    }
}

/// All partitions of `p` whose pieces are non-empty members of `centres`.
///
/// The empty centre is never used as a piece: removing empty pieces from an
/// accepted partition leaves an accepted partition, so they never change
/// the verdict, and allowing them would make the list infinite.
pub fn enumerate_partitions(p: &StringTuple, centres: &BTreeSet<StringTuple>) -> Vec<PartitionedAnalysis> {
    let input = chars(p);
    let pieces: Vec<(StringTuple, Vec<Vec<char>>)> = centres
        .iter()
        .filter(|c| !c.is_all_empty() && c.arity() == p.arity())
        .map(|c| (c.clone(), chars(c)))
        .collect();
    let mut out = Vec::new();
    let mut stack = Vec::new();
    let start = vec![0; input.len()];
    walk(&input, &pieces, &start, &mut stack, &mut |parts: &[usize]| {
        out.push(PartitionedAnalysis {
            tuple: p.clone(),
            pieces: parts.iter().map(|&i| pieces[i].0.clone()).collect(),
        });
        false
    });
    out
}

/// Depth-first search over piece sequences; `visit` returns true to stop.
fn walk(
    input: &[Vec<char>],
    pieces: &[(StringTuple, Vec<Vec<char>>)],
    pos: &[usize],
    stack: &mut Vec<usize>,
    visit: &mut dyn FnMut(&[usize]) -> bool,
) -> bool {
    if pos.iter().zip(input).all(|(&i, t)| i == t.len()) {
        return visit(stack);
    }
    for (k, (_, piece)) in pieces.iter().enumerate() {
        let fits = piece
            .iter()
            .zip(input)
            .zip(pos)
            .all(|((c, t), &i)| t.len() - i >= c.len() && t[i..i + c.len()] == c[..]);
        if !fits {
            continue;
        }
        let next: Vec<usize> = pos.iter().zip(piece).map(|(&i, c)| i + c.len()).collect();
        stack.push(k);
        let stop = walk(input, pieces, &next, stack, visit);
        stack.pop();
        if stop {
            return true;
        }
    }
    false
}

/// Tape-wise boundaries: `bounds[i][t]` is where piece `i` starts on tape `t`.
fn boundaries(pieces: &[Vec<Vec<char>>], arity: usize) -> Vec<Vec<usize>> {
    let mut bounds = vec![vec![0; arity]];
    for p in pieces {
        let last = bounds.last().unwrap();
        let next = last.iter().zip(p).map(|(&b, c)| b + c.len()).collect();
        bounds.push(next);
    }
    bounds
}

fn slice(input: &[Vec<char>], from: &[usize], to: &[usize]) -> Vec<Vec<char>> {
    input
        .iter()
        .zip(from.iter().zip(to))
        .map(|(t, (&a, &b))| t[a..b].to_vec())
        .collect()
}

/// Spans `[i, j)` of piece indices that the coercion check inspects under `variant`.
fn spans(k: usize, variant: Variant) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for i in 0..=k {
        match variant {
            Variant::Spans => out.extend((i..=k).map(|j| (i, j))),
            Variant::SinglePartition => {
                if i < k {
                    out.push((i, i + 1));
                }
            }
            Variant::SinglePartitionOrEmpty => {
                out.push((i, i));
                if i < k {
                    out.push((i, i + 1));
                }
            }
        }
    }
    out
}

fn partition_ok(g: &Grammar, input: &[Vec<char>], pieces: &[Vec<Vec<char>>], variant: Variant) -> bool {
    let tapes = &g.tapes;
    let n = tapes.tapes();
    let bounds = boundaries(pieces, n);
    let k = pieces.len();
    let end = &bounds[k];
    let start = &bounds[0];
    let licensed = (0..k).all(|i| {
        let centre = StringTuple(pieces[i].iter().map(|c| c.iter().collect()).collect());
        let pl = slice(input, start, &bounds[i]);
        let pr = slice(input, &bounds[i + 1], end);
        g.cr_rules
            .iter()
            .any(|r| r.centre.contains(&centre) && contexts_hold(tapes, &r.left, &r.right, &pl, &pr))
    });
    if !licensed {
        return false;
    }
    spans(k, variant).into_iter().all(|(i, j)| {
        let pl = slice(input, start, &bounds[i]);
        let pc = slice(input, &bounds[i], &bounds[j]);
        let pr = slice(input, &bounds[j], end);
        !g.sc_rules.iter().any(|r| disallows(tapes, r, &pl, &pc, &pr))
    })
}

/// Conditions (1) and (2) for one explicit partition. Pieces may be empty.
pub fn accepts_partition(g: &Grammar, analysis: &PartitionedAnalysis, variant: Variant) -> bool {
    let pieces: Vec<Vec<Vec<char>>> = analysis.pieces.iter().map(chars).collect();
    let concat = PartitionedAnalysis::from_pieces(g.tapes.tapes(), analysis.pieces.clone()).tuple;
    concat == analysis.tuple && partition_ok(g, &chars(&analysis.tuple), &pieces, variant)
}

/// Whether some partition of `p` satisfies both conditions.
pub fn oracle_accepts(g: &Grammar, p: &StringTuple, variant: Variant) -> bool {
    if p.arity() != g.tapes.tapes() {
        return false;
    }
    let input = chars(p);
    let pieces: Vec<(StringTuple, Vec<Vec<char>>)> = g
        .centre_tuples()
        .into_iter()
        .filter(|c| !c.is_all_empty())
        .map(|c| {
            let cs = chars(&c);
            (c, cs)
        })
        .collect();
    let start = vec![0; input.len()];
    walk(&input, &pieces, &start, &mut Vec::new(), &mut |parts: &[usize]| {
        let chosen: Vec<Vec<Vec<char>>> = parts.iter().map(|&i| pieces[i].1.clone()).collect();
        partition_ok(g, &input, &chosen, variant)
    })
}
