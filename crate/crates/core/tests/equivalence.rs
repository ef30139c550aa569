mod common;

use common::*;
use ptlc_core::check::check_equivalence;
use ptlc_core::compiler::{compile_grammar, Variant};
use ptlc_core::grammar::Grammar;
use rand::rngs::StdRng;
use rand::SeedableRng;

fn assert_equivalent(name: &str, g: &Grammar, variant: Variant, bound: usize) {
    let rel = compile_grammar(g, variant).unwrap().1.relation;
    let report = check_equivalence(g, &rel, variant, bound);
    if let Some(cx) = report.counterexample {
        panic!("{name}, variant {variant}: {cx}\n{g}");
    }
}

#[test]
fn bundled_grammars_match_oracle_in_every_variant() {
    let cases = [
        ("sample", SAMPLE, 4),
        ("k_insertion", K_INSERTION, 4),
        ("change_u", CHANGE_U, 4),
        ("three_tape", THREE_TAPE, 2),
    ];
    for (name, text, bound) in cases {
        let g = grammar(text);
        for v in Variant::ALL {
            assert_equivalent(name, &g, v, bound);
        }
    }
}

#[test]
fn random_grammars_match_oracle_in_every_variant() {
    let mut rng = StdRng::seed_from_u64(2024);
    for i in 0..20 {
        let g = random_grammar(&mut rng);
        for v in Variant::ALL {
            assert_equivalent(&format!("random #{i}"), &g, v, 3);
        }
    }
}

#[test]
fn random_grammars_are_not_trivial() {
    let mut rng = StdRng::seed_from_u64(0x5eed);
    let mut coercions_bite = 0;
    for _ in 0..25 {
        let g = random_grammar(&mut rng);
        if g.sc_rules.is_empty() {
            continue;
        }
        let full = compile_grammar(&g, Variant::Spans).unwrap().1.relation;
        let loose = compile_grammar(&g.without_coercions(), Variant::Spans)
            .unwrap()
            .1
            .relation;
        if !full.automaton().equivalent(loose.automaton()) {
            coercions_bite += 1;
        }
    }
    assert!(
        coercions_bite >= 5,
        "only {coercions_bite} grammars where SC rules matter"
    );
}

#[test]
fn dropping_coercions_is_detected() {
    // The same check the CLI's mutation flag relies on.
    let g = grammar(SAMPLE);
    let rel = compile_grammar(&g.without_coercions(), Variant::Spans)
        .unwrap()
        .1
        .relation;
    assert!(!check_equivalence(&g, &rel, Variant::Spans, 2).is_equivalent());
}

#[test]
fn variants_differ_where_expected() {
    let k = grammar(K_INSERTION);
    let spans = compile_grammar(&k, Variant::Spans).unwrap().1.relation;
    let single = compile_grammar(&k, Variant::SinglePartition).unwrap().1.relation;
    assert!(!spans.accepts_tuple(&pair("kk", "kk")));
    assert!(spans.accepts_tuple(&pair("kk", "kak")));
    assert!(single.accepts_tuple(&pair("kk", "kk")));

    let u = grammar(CHANGE_U);
    let either = compile_grammar(&u, Variant::SinglePartitionOrEmpty).unwrap().1.relation;
    let spans = compile_grammar(&u, Variant::Spans).unwrap().1.relation;
    assert!(either.accepts_tuple(&pair("gu", "geu")));
    assert!(!spans.accepts_tuple(&pair("gu", "geu")));
    assert!(!either.accepts_tuple(&pair("gu", "gu")));
    assert!(either.accepts_tuple(&pair("gu", "gv")));
}
