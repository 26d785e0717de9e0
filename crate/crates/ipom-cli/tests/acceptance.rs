//! Acceptance suite: every release-gating check in one target, one test —
//! and one pass/fail line — per criterion.
//!
//! The criteria pin down exact outputs for the worked examples bundled in
//! `testdata/`, round-trip and transposition laws on random structures,
//! oracle agreement for interval recognition and subsumption, and the
//! language theorems connecting the two automaton models.

use std::collections::{BTreeMap, BTreeSet};
use std::process::Command;
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use ipom::gen::{random_hda, random_interval_ipomset, random_sta, random_word};
use ipom::hda::Hda;
use ipom::loset::parse_word;
use ipom::pomset::Ipomset;
use ipom::steps::{canonical_key, densify, equivalent, normalize, phi, psi, word_key};
use ipom::subsume::{
    elementary_extensions, is_subsumption, subsumption_chain, transpose, validate_chain,
    TransCase,
};
use ipom::sta::{hd_of_sta, st_of_hda, Sta};
use ipom::{EventId, Label};

const FOUR_EVENT_SPARSE: &str = "[a.|.c.][.a.|.c][.a.|a.][.a|.a.][b.|.a.][.b|.a]";
const KEY_BC: &str = "[b.][.b][c.][.c]";

fn run(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_ipom"))
        .args(args)
        .output()
        .expect("binary runs");
    (
        out.status.code().expect("binary exits normally"),
        String::from_utf8(out.stdout).expect("stdout is UTF-8"),
    )
}

fn data(name: &str) -> String {
    format!("{}/testdata/{}", env!("CARGO_MANIFEST_DIR"), name)
}

fn load_four_event() -> Ipomset {
    ipom::files::ipomset_from_json(&std::fs::read_to_string(data("four_event.ipomset.json")).unwrap())
        .unwrap()
}

fn load_grid() -> Hda {
    ipom::files::hda_from_json(&std::fs::read_to_string(data("grid.hda.json")).unwrap()).unwrap()
}

fn load_chain() -> Sta {
    ipom::files::sta_from_json(&std::fs::read_to_string(data("chain.sta.json")).unwrap()).unwrap()
}

/// All ipomsets subsuming into `q` — refinements by added precedence —
/// keyed canonically, found by closing under elementary extensions.
fn refinement_closure(q: &Ipomset) -> BTreeMap<String, Ipomset> {
    let mut seen = BTreeMap::new();
    seen.insert(canonical_key(q).unwrap(), q.clone());
    let mut work = vec![q.clone()];
    while let Some(p) = work.pop() {
        for r in elementary_extensions(&p).unwrap() {
            let key = canonical_key(&r).unwrap();
            if !seen.contains_key(&key) {
                seen.insert(key, r.clone());
                work.push(r);
            }
        }
    }
    seen
}

#[test]
fn a01_decomposition_pipeline_on_the_bundled_example() {
    let start = Instant::now();
    let (code, stdout) = run(&["decompose", &data("four_event.ipomset.json")]);
    assert_eq!(code, 0);
    assert_eq!(stdout.trim_end(), FOUR_EVENT_SPARSE, "sparse decomposition must match exactly");

    let composed = psi(&parse_word(FOUR_EVENT_SPARSE).unwrap());
    assert!(
        composed.isomorphic(&load_four_event()).is_some(),
        "composing the sparse word must restore the input"
    );
    assert!(start.elapsed() < Duration::from_secs(1));
    println!("PASS 01 — four-event example decomposes to the expected six-letter word and composes back");
}

#[test]
fn a02_both_dense_forms_normalize_to_the_sparse_word() {
    for dense in [
        "[a.|.c.][.a.|.c][.a.|a.][.a|.a.][b.|.a.][.b|.a.][.a]",
        "[a.|.c.][.a.|.c][.a.|a.][.a|.a.][b.|.a.][.b.|.a][.b]",
    ] {
        let w = parse_word(dense).unwrap();
        assert!(w.is_dense());
        assert_eq!(normalize(&w).to_string(), FOUR_EVENT_SPARSE, "normalizing {dense}");
    }
    println!("PASS 02 — both dense single-event decompositions normalize to the sparse word");
}

#[test]
fn a03_round_trip_laws_on_random_structures() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x0301);
    for _ in 0..1000 {
        let p = random_interval_ipomset(&mut rng, 8);
        let w = phi(&p).expect("generated ipomsets are interval orders");
        assert!(
            psi(&w).isomorphic(&p).is_some(),
            "gluing the decomposition must restore the ipomset"
        );
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x0302);
    for _ in 0..1000 {
        let w = random_word(&mut rng, 10, 4, 8);
        assert_eq!(
            phi(&psi(&w)).unwrap(),
            normalize(&w),
            "decomposing the gluing must normalize the word"
        );
    }
    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(60), "round trips took {elapsed:?}");
    println!("PASS 03 — 1000 ipomset and 1000 word round trips hold in {elapsed:?}");
}

#[test]
fn a04_transpositions_of_the_worked_word() {
    let w = parse_word("[b.][a.|.b.|c.][.a.|.b|.c.][.a.|.c][.a]").unwrap();

    let (t3, case) = transpose(&w, 3).unwrap();
    assert_eq!(case, TransCase::TT);
    assert_eq!(t3.to_string(), "[b.][a.|.b.|c.][.a.|.b.|.c][.a.|.b][.a]");
    assert!(equivalent(&w, &t3), "same-kind transpositions preserve the class");

    let (t2, case) = transpose(&w, 2).unwrap();
    assert_eq!(case, TransCase::ST);
    assert_eq!(t2.to_string(), "[b.][.b][a.|c.][.a.|.c][.a]");
    assert!(
        is_subsumption(&psi(&t2), &psi(&w)).is_some(),
        "the starter/terminator swap refines the ipomset"
    );
    assert!(
        is_subsumption(&psi(&w), &psi(&t2)).is_none(),
        "the refinement is strict"
    );
    println!("PASS 04 — transpositions reproduce the worked words and move in the refinement direction");
}

#[test]
fn a05_witness_chain_between_series_and_parallel() {
    // The worked chain: serial ab, step by step to the parallel pair with b
    // started first.
    let w0 = parse_word("[a.][.a][b.][.b]").unwrap();
    let expected = [
        (2, TransCase::TS, "[a.][.a.|b.][.a|.b.][.b]"),
        (3, TransCase::TT, "[a.][.a.|b.][.a.|.b][.a]"),
        (1, TransCase::SS, "[b.][a.|.b.][.a.|.b][.a]"),
    ];
    let mut word = w0.clone();
    for (index, case, text) in expected {
        let (next, got) = transpose(&word, index).unwrap();
        assert_eq!(got, case, "case at index {index}");
        assert_eq!(next.to_string(), text, "word after index {index}");
        word = next;
    }

    let series = psi(&w0);
    let parallel = psi(&word);
    let chain = subsumption_chain(&series, &parallel)
        .expect("search stays within bounds")
        .expect("series refines the parallel pair");
    validate_chain(&chain).unwrap();
    assert_eq!(chain.words[0], densify(&phi(&series).unwrap()));
    assert!(psi(chain.words.last().unwrap()).isomorphic(&parallel).is_some());
    println!("PASS 05 — the three-step chain replays exactly and the searched chain validates");
}

#[test]
fn a06_subsumption_agrees_with_extension_reachability() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x06);
    let mut corpus: BTreeMap<String, Ipomset> = BTreeMap::new();
    corpus.insert(canonical_key(&load_four_event()).unwrap(), load_four_event());
    // Seed with everything below the two- and three-event parallel
    // ipomsets so plenty of pairs are genuinely related.
    for parallel in ["[a.|b.][.a|.b]", "[a.|b.|c.][.a|.b|.c]"] {
        corpus.append(&mut refinement_closure(&psi(&parse_word(parallel).unwrap())));
    }
    let mut attempts = 0;
    while corpus.len() < 60 && attempts < 1000 {
        attempts += 1;
        let p = random_interval_ipomset(&mut rng, 5);
        corpus.entry(canonical_key(&p).unwrap()).or_insert(p);
    }
    assert!(corpus.len() >= 50, "corpus stays diverse");

    let mut closures: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    for (key, q) in &corpus {
        closures.insert(key.clone(), refinement_closure(q).into_keys().collect());
    }
    let mut checked = 0;
    let mut positive = 0;
    for (pk, p) in &corpus {
        for (qk, q) in &corpus {
            let direct = is_subsumption(p, q).is_some();
            let reachable = closures[qk].contains(pk);
            assert_eq!(
                direct, reachable,
                "disagreement for {pk} against {qk}: witness {direct}, reachable {reachable}"
            );
            checked += 1;
            positive += direct as usize;
        }
    }
    assert!(positive > 50, "only {positive} related pairs — corpus too sparse");
    println!("PASS 06 — subsumption matches extension reachability on {checked} pairs ({positive} related)");
}

/// Brute-force oracle: search directly for an interval assignment, giving
/// each event endpoints `b ≤ e` below `n` such that precedence holds
/// exactly when one interval ends before the other begins.
fn oracle_interval(n: usize, rows: &[u64]) -> bool {
    fn assign(k: usize, n: usize, rows: &[u64], acc: &mut Vec<(u32, u32)>) -> bool {
        if k == n {
            return true;
        }
        let top = n.max(1) as u32;
        for b in 0..top {
            'next: for e in b..top {
                for (j, &(bj, ej)) in acc.iter().enumerate() {
                    let j_first = rows[j] & (1 << k) != 0;
                    let k_first = rows[k] & (1 << j) != 0;
                    let sequential_jk = ej < b;
                    let sequential_kj = e < bj;
                    if j_first != sequential_jk || k_first != sequential_kj {
                        continue 'next;
                    }
                }
                acc.push((b, e));
                if assign(k + 1, n, rows, acc) {
                    return true;
                }
                acc.pop();
            }
        }
        false
    }
    assign(0, n, rows, &mut Vec::with_capacity(n))
}

/// All strict partial orders on `n` labelled points, as successor masks.
fn strict_orders(n: usize) -> Vec<Vec<u64>> {
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
        .collect();
    let mut out = Vec::new();
    'candidates: for mask in 0u32..(1u32 << pairs.len()) {
        let mut rows = vec![0u64; n];
        for (bit, &(i, j)) in pairs.iter().enumerate() {
            if mask & (1 << bit) != 0 {
                rows[i] |= 1 << j;
            }
        }
        for i in 0..n {
            let mut succ = rows[i];
            while succ != 0 {
                let j = succ.trailing_zeros() as usize;
                succ &= succ - 1;
                // No two-cycles, and successors of successors stay inside.
                if rows[j] & (1 << i) != 0 || rows[j] & !rows[i] != 0 {
                    continue 'candidates;
                }
            }
        }
        out.push(rows);
    }
    out
}

#[test]
fn a07_interval_recognition_matches_the_assignment_oracle() {
    let expected_counts = [1usize, 1, 3, 19, 219, 4231];
    let label = Label::new("a").unwrap();
    let mut checked = 0;
    for n in 0..=5 {
        let orders = strict_orders(n);
        assert_eq!(
            orders.len(),
            expected_counts[n],
            "partial-order count on {n} points — enumeration self-check"
        );
        for rows in orders {
            let events: Vec<(EventId, Label)> = (0..n)
                .map(|i| (EventId::new(format!("e{i}")).unwrap(), label.clone()))
                .collect();
            let mut prec = Vec::new();
            let mut order = Vec::new();
            for i in 0..n {
                for j in 0..n {
                    if rows[i] & (1 << j) != 0 {
                        prec.push((events[i].0.clone(), events[j].0.clone()));
                    } else if i < j && rows[j] & (1 << i) == 0 {
                        order.push((events[i].0.clone(), events[j].0.clone()));
                    }
                }
            }
            let p = Ipomset::new(events, &prec, &order, &[], &[]).unwrap();
            assert_eq!(
                p.is_interval(),
                oracle_interval(n, &rows),
                "disagreement on poset {rows:?}"
            );
            checked += 1;
        }
    }
    println!("PASS 07 — interval recognition agrees with the assignment oracle on all {checked} posets");
}

#[test]
fn a08_automata_worked_examples() {
    let x = load_grid();
    let expected: BTreeSet<String> = std::iter::once(KEY_BC.to_string()).collect();
    assert_eq!(x.language_bounded(6), expected, "grid language");

    let st = st_of_hda(&x);
    assert_eq!(st.language_bounded(6), expected, "translated grid language");

    let a = load_chain();
    assert!(a.language_bounded(10).is_empty(), "the chain automaton accepts nothing");
    assert!(
        hd_of_sta(&a).unwrap().language_bounded(6).contains(KEY_BC),
        "unfolding the chain automaton recovers the grid language"
    );

    let back = hd_of_sta(&st).unwrap();
    assert!(back.isomorphic(&x), "unfolding inverts the translation");
    println!("PASS 08 — grid and chain automata reproduce their languages and the unfolding inverts the translation");
}

fn assert_translation_language_equal(x: &Hda, bound: usize) {
    let direct = x.language_bounded(bound);
    let translated = st_of_hda(x).language_bounded(bound);
    assert_eq!(
        direct, translated,
        "translated automaton must have the same bounded language"
    );
}

#[test]
fn a09_translation_theorems_on_random_automata() {
    let start = Instant::now();

    // Literal corpus: at most 6 cells.  Every two-dimensional complex needs
    // at least 9 cells, so a second corpus without the cell cap keeps
    // squares covered.
    let mut rng = ChaCha8Rng::seed_from_u64(0x0901);
    let mut small = 0;
    while small < 100 {
        let x = random_hda(&mut rng);
        if x.cell_count() > 6 {
            continue;
        }
        assert_translation_language_equal(&x, 8);
        small += 1;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x0902);
    let mut squares = 0;
    while squares < 100 {
        let x = random_hda(&mut rng);
        if (0..x.cell_count()).all(|i| x.dimension(i) < 2) {
            continue;
        }
        assert_translation_language_equal(&x, 8);
        squares += 1;
    }

    let mut rng = ChaCha8Rng::seed_from_u64(0x0903);
    let mut stas = 0;
    while stas < 100 {
        let a = random_sta(&mut rng);
        if a.state_count() > 5 {
            continue;
        }
        let direct = a.language_bounded(8);
        let unfolded = hd_of_sta(&a).unwrap().language_bounded(8);
        assert!(
            direct.is_subset(&unfolded),
            "unfolding may only grow the language: {direct:?} vs {unfolded:?}"
        );
        stas += 1;
    }

    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(300), "translations took {elapsed:?}");
    println!("PASS 09 — language equality on 200 random grids and inclusion on 100 random automata in {elapsed:?}");
}

/// A single full square crossed corner to corner: the smallest automaton
/// whose language holds a genuinely concurrent word together with both of
/// its serializations.
const FULL_SQUARE: &str = r#"{
    "cells": [
        {"id": "v00", "events": []},
        {"id": "v10", "events": []},
        {"id": "v01", "events": []},
        {"id": "v11", "events": []},
        {"id": "ea_bot", "events": ["a"], "d0": {"0": "v00"}, "d1": {"0": "v10"}},
        {"id": "ea_top", "events": ["a"], "d0": {"0": "v01"}, "d1": {"0": "v11"}},
        {"id": "eb_left", "events": ["b"], "d0": {"0": "v00"}, "d1": {"0": "v01"}},
        {"id": "eb_right", "events": ["b"], "d0": {"0": "v10"}, "d1": {"0": "v11"}},
        {"id": "sq", "events": ["a", "b"],
         "d0": {"0": "eb_left", "1": "ea_bot"},
         "d1": {"0": "eb_right", "1": "ea_top"}}
    ],
    "start": ["v00"],
    "accept": ["v11"]
}"#;

fn closure_check(lang: &BTreeSet<String>, bound: usize) -> usize {
    let mut checked_members = 0;
    for key in lang {
        let q = psi(&parse_word(key).unwrap());
        let steps = 2 * q.n() - q.source_events().len() - q.target_events().len();
        if steps > bound {
            continue;
        }
        for refined_key in refinement_closure(&q).keys() {
            assert!(
                lang.contains(refined_key),
                "language misses refinement {refined_key} of {key}"
            );
            checked_members += 1;
        }
    }
    checked_members
}

#[test]
fn a10_bounded_languages_are_subsumption_closed() {
    let bound = 8usize;
    let mut checked_languages = 0;
    let mut checked_members = 0;

    // A pinned case first, so the check provably bites: the square's
    // language is the concurrent word plus exactly its two serializations.
    let square = ipom::files::hda_from_json(FULL_SQUARE).unwrap();
    let lang = square.language_bounded(bound);
    let expected: BTreeSet<String> = ["[a.|b.][.a|.b]", "[a.][.a][b.][.b]", "[b.][.b][a.][.a]"]
        .into_iter()
        .map(String::from)
        .collect();
    assert_eq!(lang, expected, "square language");
    checked_members += closure_check(&lang, bound);
    checked_languages += 1;

    // The same two corpora as the translation test: the capped one and the
    // one guaranteed to contain squares.
    let corpora: [(u64, fn(&Hda) -> bool); 2] = [
        (0x0901, |x| x.cell_count() <= 6),
        (0x0902, |x| (0..x.cell_count()).any(|i| x.dimension(i) == 2)),
    ];
    for (seed, keep) in corpora {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut sampled = 0;
        while sampled < 100 {
            let x = random_hda(&mut rng);
            if !keep(&x) {
                continue;
            }
            sampled += 1;
            checked_members += closure_check(&x.language_bounded(bound), bound);
            checked_languages += 1;
        }
    }
    println!(
        "PASS 10 — {checked_languages} bounded languages closed under all {checked_members} refinements within the step bound"
    );
}

#[test]
fn acceptance_keys_are_canonical() {
    // The keys the language sets carry are exactly sparse loset strings;
    // guard the convention the suite depends on.
    let w = parse_word(KEY_BC).unwrap();
    assert_eq!(word_key(&w), KEY_BC);
    assert_eq!(canonical_key(&psi(&w)).unwrap(), KEY_BC);
}
