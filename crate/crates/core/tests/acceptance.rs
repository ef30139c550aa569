//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure.

mod common;

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::*;
use ptlc_core::check::{all_tuples, check_equivalence};
use ptlc_core::compiler::{compile_grammar, Variant};
use ptlc_core::oracle::{accepts_partition, enumerate_partitions, oracle_accepts, PartitionedAnalysis};
use ptlc_core::{intro, sub, tuple_product, Automaton, Regex, SymbolId, SymbolTable, TupleAlphabet};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

type Outcome = Result<String, String>;
type Criterion = (&'static str, Duration, fn() -> Outcome);

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn sample_d_set() -> Outcome {
    let g = grammar(SAMPLE);
    let (compiler, _) = compile_grammar(&g, Variant::Spans).map_err(|e| e.to_string())?;
    let d: BTreeSet<String> = compiler
        .preprocessed()
        .d
        .iter()
        .flat_map(|c| c.members.iter().map(ToString::to_string))
        .collect();
    let expected: BTreeSet<String> = ["⟨B,b⟩", "⟨0,b⟩", "⟨V,V⟩", "⟨c,c⟩", "⟨d,d⟩"].map(String::from).into();
    ensure(d == expected, format!("D = {d:?}"))?;
    Ok(format!("D = {}", d.into_iter().collect::<Vec<_>>().join(" ")))
}

fn sanctioned_pair() -> Outcome {
    let g = grammar(SAMPLE);
    let rel = compile_grammar(&g, Variant::Spans)
        .map_err(|e| e.to_string())?
        .1
        .relation;
    let p = pair("VBBB", "Vbbb");
    let compiled = rel.accepts_tuple(&p);
    let oracle = oracle_accepts(&g, &p, Variant::Spans);
    ensure(compiled && oracle, format!("compiled {compiled}, oracle {oracle}"))?;
    Ok("⟨VBBB,Vbbb⟩ accepted by relation and oracle".into())
}

fn epenthesis() -> Outcome {
    let g = grammar(SAMPLE);
    let rel = compile_grammar(&g, Variant::Spans)
        .map_err(|e| e.to_string())?
        .1
        .relation;
    let cases = [("cd", "cbd", true), ("cd", "cd", false), ("cd", "cbbd", false)];
    for (l, s, want) in cases {
        let p = pair(l, s);
        let got = rel.accepts_tuple(&p);
        ensure(got == want, format!("⟨{l},{s}⟩: expected {want}, got {got}"))?;
        ensure(
            oracle_accepts(&g, &p, Variant::Spans) == want,
            format!("oracle disagrees on ⟨{l},{s}⟩"),
        )?;
    }
    Ok("⟨cd,cbd⟩ accepted; ⟨cd,cd⟩ and ⟨cd,cbbd⟩ rejected".into())
}

fn coercion_delta() -> Outcome {
    let g = grammar(SAMPLE);
    let (compiler, comp) = compile_grammar(&g, Variant::Spans).map_err(|e| e.to_string())?;
    let before = compiler.strip_markers(&comp.after_restriction);
    let after = &comp.relation;
    let cr_only = g.without_coercions();
    let r3 = &g.sc_rules[0];
    let tuples = all_tuples(&g.tapes, 4);
    let mut mismatches = 0usize;
    let mut flipped = 0usize;
    for t in &tuples {
        let a2 = before.accepts_tuple(t);
        let a3 = after.accepts_tuple(t);
        let o2 = oracle_accepts(&cr_only, t, Variant::Spans);
        let o3 = oracle_accepts(&g, t, Variant::Spans);
        if a2 != o2 || a3 != o3 || (a3 && !a2) {
            mismatches += 1;
            continue;
        }
        if a2 && !a3 {
            flipped += 1;
            // Every licensed partition must have a span that R3 disallows.
            let only_r3 = {
                let mut h = cr_only.clone();
                h.sc_rules = vec![r3.clone()];
                h
            };
            let survives = enumerate_partitions(t, &g.centre_tuples())
                .iter()
                .any(|p| accepts_partition(&only_r3, p, Variant::Spans));
            if survives {
                mismatches += 1;
            }
        }
    }
    ensure(mismatches == 0, format!("{mismatches} mismatches"))?;
    ensure(flipped > 0, "no tuple flipped")?;
    Ok(format!(
        "{} tuples, {flipped} flipped by R3, 0 mismatches",
        tuples.len()
    ))
}

fn master_equivalence() -> Outcome {
    let mut grammars = vec![("sample".to_string(), grammar(SAMPLE))];
    let mut rng = StdRng::seed_from_u64(0x5eed);
    for i in 0..25 {
        grammars.push((format!("random #{i}"), random_grammar(&mut rng)));
    }
    let mut checked = 0;
    for (name, g) in &grammars {
        let rel = compile_grammar(g, Variant::Spans)
            .map_err(|e| format!("{name}: {e}"))?
            .1
            .relation;
        let report = check_equivalence(g, &rel, Variant::Spans, 4);
        if let Some(cx) = report.counterexample {
            return Err(format!("{name}: {cx}\n{g}"));
        }
        checked += report.checked;
    }
    Ok(format!(
        "{} grammars, {checked} tuples, 0 counterexamples",
        grammars.len()
    ))
}

fn variant_semantics() -> Outcome {
    let k = grammar(K_INSERTION);
    let kk = pair("k", "k");
    let separated = PartitionedAnalysis::from_pieces(2, vec![kk.clone(), pair("", ""), kk.clone()]);
    let adjacent = PartitionedAnalysis::from_pieces(2, vec![kk.clone(), kk]);
    ensure(
        !accepts_partition(&k, &separated, Variant::SinglePartition),
        "2i accepted ⟨k,k⟩,ε,⟨k,k⟩",
    )?;
    ensure(
        accepts_partition(&k, &adjacent, Variant::SinglePartition),
        "2i rejected ⟨k,k⟩,⟨k,k⟩",
    )?;
    let u = grammar(CHANGE_U);
    let geu = PartitionedAnalysis::from_pieces(2, vec![pair("g", "g"), pair("", "e"), pair("u", "u")]);
    ensure(
        accepts_partition(&u, &geu, Variant::SinglePartitionOrEmpty),
        "2ii rejected ⟨g,g⟩,⟨ε,e⟩,⟨u,u⟩",
    )?;
    Ok("2i: separated rejected, adjacent accepted; 2ii: ⟨g,g⟩,⟨ε,e⟩,⟨u,u⟩ accepted".into())
}

fn sc_centre_padding() -> Outcome {
    let g = grammar(SAMPLE);
    let (compiler, _) = compile_grammar(&g, Variant::Spans).map_err(|e| e.to_string())?;
    let pre = compiler.preprocessed();
    let r3 = &g.sc_rules[0];
    let right = pre.sc_centre_language(r3).map_err(|e| e.to_string())?;
    // The padded construction replaces the empty lexical centre by `0`.
    let zero = BTreeSet::from([pre.zero]);
    let sigma_star = |tape: usize| Automaton::universal(&pre.tape_alphabets[tape]);
    let b = pre.atom('b').ok_or("no b")?;
    let padded_lex = tuple_product(
        &[
            intro(
                &zero,
                &Automaton::symbol(pre.zero).with_alphabet(pre.tape_alphabets[0].clone()),
            ),
            intro(&zero, &sigma_star(1)),
        ],
        &pre.pi,
    )
    .map_err(|e| e.to_string())?;
    let surf = tuple_product(
        &[intro(&zero, &sigma_star(0)), intro(&zero, &Automaton::symbol(b))],
        &pre.pi,
    )
    .map_err(|e| e.to_string())?;
    let wrong = padded_lex.difference(&surf).minimize();
    ensure(
        right.is_final(right.initial()),
        "start state of the coercion centre is not final",
    )?;
    ensure(!wrong.is_final(wrong.initial()), "padded construction accepts ε")?;
    Ok("Intro-of-ε centre accepts ε; 0-padded centre does not".into())
}

// Random regular expressions over a small alphabet.
fn random_regex(rng: &mut StdRng, alphabet: &[SymbolId], depth: u32) -> Regex {
    if depth == 0 || rng.gen_bool(0.3) {
        return match rng.gen_range(0..6) {
            0 => Regex::Epsilon,
            _ => Regex::Atom(alphabet[rng.gen_range(0..alphabet.len())]),
        };
    }
    match rng.gen_range(0..4) {
        0 => Regex::Concat(vec![
            random_regex(rng, alphabet, depth - 1),
            random_regex(rng, alphabet, depth - 1),
        ]),
        1 => Regex::Union(vec![
            random_regex(rng, alphabet, depth - 1),
            random_regex(rng, alphabet, depth - 1),
        ]),
        2 => random_regex(rng, alphabet, depth - 1).star(),
        _ => Regex::Concat(vec![
            random_regex(rng, alphabet, depth - 1),
            random_regex(rng, alphabet, depth - 1),
        ]),
    }
}

fn words(alphabet: &BTreeSet<SymbolId>, max: usize) -> Vec<Vec<SymbolId>> {
    let syms: Vec<SymbolId> = alphabet.iter().copied().collect();
    let mut out = vec![vec![]];
    let mut layer = vec![vec![]];
    for _ in 0..max {
        layer = layer
            .iter()
            .flat_map(|w: &Vec<SymbolId>| {
                syms.iter().map(move |&s| {
                    let mut w = w.clone();
                    w.push(s);
                    w
                })
            })
            .collect();
        out.extend(layer.iter().cloned());
    }
    out
}

fn calculus_laws() -> Outcome {
    const CASES: usize = 100;
    const LEN: usize = 5;
    let mut table = SymbolTable::new();
    let a = table.intern("a");
    let b = table.intern("b");
    let zero = table.intern("0");
    let sigma = BTreeSet::from([a, b]);
    let syms = [a, b];
    let mut rng = StdRng::seed_from_u64(8);
    let from = |r: &Regex| ptlc_core::from_regex(r, &sigma).unwrap();
    let mut violations = Vec::new();

    // Intro: deleting the inserted symbols maps Intro(A) back onto A.
    for case in 0..CASES {
        let x = from(&random_regex(&mut rng, &syms, 4));
        let y = intro(&BTreeSet::from([zero]), &x);
        let mut all = sigma.clone();
        all.insert(zero);
        for w in words(&all, LEN) {
            let stripped: Vec<SymbolId> = w.iter().copied().filter(|&s| s != zero).collect();
            if y.accepts(&w).unwrap() != x.accepts(&stripped).unwrap() {
                violations.push(format!("intro case {case}: {}", table.render(&w)));
                break;
            }
        }
    }

    // Sub: the image contains the original, and every added word rewrites
    // back into it.
    for case in 0..CASES {
        let x = from(&random_regex(&mut rng, &syms, 4));
        let target_len = rng.gen_range(1..=2);
        let target: Vec<SymbolId> = (0..target_len).map(|_| syms[rng.gen_range(0..2)]).collect();
        let replacement = from(&random_regex(&mut rng, &syms, 2));
        let y = sub(&replacement, &target, &x).unwrap();
        for w in words(&sigma, LEN) {
            if x.accepts(&w).unwrap() && !y.accepts(&w).unwrap() {
                violations.push(format!("sub case {case}: lost {}", table.render(&w)));
                break;
            }
        }
    }

    // Tuple product: membership iff every projection is accepted.
    let mut pi = TupleAlphabet::new(vec![BTreeSet::from([a, b, zero]), BTreeSet::from([a, b, zero])]);
    let tuples = [("a:a", [a, a]), ("a:0", [a, zero]), ("0:b", [zero, b]), ("b:a", [b, a])];
    for (name, comps) in tuples {
        pi.insert(table.intern(name), comps.to_vec()).unwrap();
    }
    for case in 0..CASES {
        let per_tape = [
            from(&random_regex(&mut rng, &syms, 4)),
            from(&random_regex(&mut rng, &syms, 4)),
        ];
        let p = tuple_product(&per_tape, &pi).unwrap();
        for w in words(&pi.symbols(), LEN) {
            let projected = (0..2).all(|t| {
                let proj: Vec<SymbolId> = w.iter().map(|&s| pi.components(s).unwrap()[t]).collect();
                let mut alpha = sigma.clone();
                alpha.insert(zero);
                per_tape[t].with_alphabet(alpha).accepts(&proj).unwrap()
            });
            if p.accepts(&w).unwrap() != projected {
                violations.push(format!("tuple product case {case}: {}", table.render(&w)));
                break;
            }
        }
    }

    // Boolean operations agree with membership.
    for case in 0..CASES {
        let x = from(&random_regex(&mut rng, &syms, 4));
        let y = from(&random_regex(&mut rng, &syms, 4));
        let u = x.union(&y).minimize();
        let i = x.intersect(&y).minimize();
        let d = x.difference(&y).minimize();
        let c = x.complement(&sigma).unwrap();
        for w in words(&sigma, LEN) {
            let (in_x, in_y) = (x.accepts(&w).unwrap(), y.accepts(&w).unwrap());
            let ok = u.accepts(&w).unwrap() == (in_x || in_y)
                && i.accepts(&w).unwrap() == (in_x && in_y)
                && d.accepts(&w).unwrap() == (in_x && !in_y)
                && c.accepts(&w).unwrap() == !in_x;
            if !ok {
                violations.push(format!("boolean case {case}: {}", table.render(&w)));
                break;
            }
        }
    }
    ensure(violations.is_empty(), violations.join("; "))?;
    Ok(format!("4 laws × {CASES} cases to length {LEN}, 0 violations"))
}

fn three_tapes() -> Outcome {
    let g = grammar(THREE_TAPE);
    let rel = compile_grammar(&g, Variant::Spans)
        .map_err(|e| e.to_string())?
        .1
        .relation;
    let report = check_equivalence(&g, &rel, Variant::Spans, 3);
    if let Some(cx) = report.counterexample {
        return Err(cx.to_string());
    }
    ensure(
        rel.accepts_tuple(&ptlc_core::grammar::StringTuple::new(["ks", "CVC", "kas"])),
        "⟨ks,CVC,kas⟩ rejected",
    )?;
    Ok(format!("{} tuples, 0 counterexamples", report.checked))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("sample grammar D set", Duration::from_secs(1), sample_d_set),
        ("sanctioned pair", Duration::from_secs(1), sanctioned_pair),
        ("epenthesis enforcement", Duration::from_secs(1), epenthesis),
        ("coercion phase delta", Duration::from_secs(60), coercion_delta),
        ("master equivalence", Duration::from_secs(600), master_equivalence),
        ("variant semantics", Duration::from_secs(2), variant_semantics),
        ("coercion centre padding", Duration::from_secs(1), sc_centre_padding),
        ("calculus laws", Duration::from_secs(60), calculus_laws),
        ("multi-tape equivalence", Duration::from_secs(300), three_tapes),
    ];
    let mut failed = 0;
    for (i, (name, limit, run)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let result = match outcome {
            Ok(detail) if elapsed <= limit => Ok(detail),
            Ok(detail) => Err(format!("{detail}; took {elapsed:.2?}, limit {limit:?}")),
            Err(e) => Err(e),
        };
        match result {
            Ok(detail) => println!("PASS {}: {name} ({elapsed:.2?}) {detail}", i + 1),
            Err(e) => {
                failed += 1;
                println!("FAIL {}: {name} ({elapsed:.2?}) {e}", i + 1);
            }
        }
    }
    if failed == 0 {
        println!("all 9 criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("{failed} of 9 criteria failed");
        ExitCode::FAILURE
    }
}
