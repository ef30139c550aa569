//! Helpers shared by the integration and acceptance tests.

#![allow(dead_code)]

use std::collections::BTreeSet;

use ptlc_core::grammar::{parse_grammar, CrRule, Grammar, Pattern, ScRule, StringTuple, TapeConfig};
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::Rng;

pub const SAMPLE: &str = include_str!("../../../../grammars/sample.tlc");
pub const K_INSERTION: &str = include_str!("../../../../grammars/k_insertion.tlc");
pub const CHANGE_U: &str = include_str!("../../../../grammars/change_u.tlc");
pub const THREE_TAPE: &str = include_str!("../../../../grammars/three_tape.tlc");

pub fn grammar(text: &str) -> Grammar {
    parse_grammar(text).expect("bundled grammar parses")
}

pub fn pair(lexical: &str, surface: &str) -> StringTuple {
    StringTuple::new([lexical, surface])
}

fn random_alphabet(rng: &mut StdRng, pool: &[char]) -> BTreeSet<char> {
    let k = rng.gen_range(2..=3);
    pool.choose_multiple(rng, k).copied().collect()
}

fn pick(rng: &mut StdRng, alphabet: &BTreeSet<char>) -> char {
    **alphabet.iter().collect::<Vec<_>>().choose(rng).unwrap()
}

/// A short context pattern; omitted about half the time.
fn random_context(rng: &mut StdRng, alphabet: &BTreeSet<char>) -> Pattern {
    match rng.gen_range(0..10) {
        0..=4 => Pattern::Epsilon,
        5..=7 => Pattern::Symbol(pick(rng, alphabet)),
        8 => Pattern::Union(vec![
            Pattern::Symbol(pick(rng, alphabet)),
            Pattern::Symbol(pick(rng, alphabet)),
        ]),
        _ => Pattern::Concat(vec![Pattern::Symbol(pick(rng, alphabet)), Pattern::Any]),
    }
}

fn random_centre_pattern(rng: &mut StdRng, alphabet: &BTreeSet<char>) -> Pattern {
    match rng.gen_range(0..8) {
        0 => Pattern::Epsilon,
        1..=4 => Pattern::Symbol(pick(rng, alphabet)),
        5 => Pattern::Any,
        6 => Pattern::Optional(Box::new(Pattern::Symbol(pick(rng, alphabet)))),
        _ => Pattern::Star(Box::new(Pattern::Any)),
    }
}

fn random_component(rng: &mut StdRng, alphabet: &BTreeSet<char>) -> String {
    match rng.gen_range(0..10) {
        0 | 1 => String::new(),
        2 => (0..2).map(|_| pick(rng, alphabet)).collect(),
        _ => pick(rng, alphabet).to_string(),
    }
}

fn random_centre(
    rng: &mut StdRng,
    alphabets: &[BTreeSet<char>],
    used: &mut BTreeSet<StringTuple>,
    size: usize,
) -> BTreeSet<StringTuple> {
    let mut centre = BTreeSet::new();
    for _ in 0..size {
        let t = StringTuple(alphabets.iter().map(|a| random_component(rng, a)).collect());
        if !used.contains(&t) && (!t.is_all_empty() || rng.gen_bool(0.2)) {
            used.insert(t.clone());
            centre.insert(t);
        }
    }
    centre
}

/// One lexical and one surface tape, 2–3 symbols each, 1–3 CR rules with
/// pairwise disjoint centres and at most one SC rule. The first CR rule has
/// no contexts so that most grammars accept more than the empty tuple.
pub fn random_grammar(rng: &mut StdRng) -> Grammar {
    let alphabets = vec![
        random_alphabet(rng, &['a', 'b', 'c']),
        random_alphabet(rng, &['a', 'b', 'x']),
    ];
    let tapes = TapeConfig::new(1, 1, alphabets.clone()).unwrap();
    let mut used: BTreeSet<StringTuple> = BTreeSet::new();
    let mut cr_rules = Vec::new();
    let base = loop {
        let c = random_centre(rng, &alphabets, &mut used, 3);
        if !c.is_empty() {
            break c;
        }
    };
    cr_rules.push(CrRule {
        name: "C0".into(),
        left: vec![Pattern::Epsilon; 2],
        centre: base,
        right: vec![Pattern::Epsilon; 2],
        line: None,
    });
    for i in 1..rng.gen_range(1..=3) {
        let size = rng.gen_range(1..=2);
        let centre = random_centre(rng, &alphabets, &mut used, size);
        if centre.is_empty() {
            continue;
        }
        cr_rules.push(CrRule {
            name: format!("C{i}"),
            left: alphabets.iter().map(|a| random_context(rng, a)).collect(),
            centre,
            right: alphabets.iter().map(|a| random_context(rng, a)).collect(),
            line: None,
        });
    }
    let mut sc_rules = Vec::new();
    if rng.gen_bool(0.75) {
        sc_rules.push(ScRule {
            name: "S".into(),
            left: alphabets.iter().map(|a| random_context(rng, a)).collect(),
            lexical_centre: vec![random_centre_pattern(rng, &alphabets[0])],
            surface_centre: vec![random_centre_pattern(rng, &alphabets[1])],
            right: alphabets.iter().map(|a| random_context(rng, a)).collect(),
            line: None,
        });
    }
    Grammar::new(tapes, cr_rules, sc_rules).unwrap()
}
