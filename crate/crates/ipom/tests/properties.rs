//! Randomized properties of the word/ipomset correspondence, gluing,
//! subsumption, and transpositions.  Each case draws a seed and builds the
//! structures with the crate's seeded generators, so failures reproduce.

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use ipom::gen::{random_interval_ipomset, random_word};
use ipom::pomset::Ipomset;
use ipom::steps::{
    canonical_key, densify, equivalent, fuse, normalize, phi, psi, word_key, Kind, Word,
};
use ipom::subsume::{
    elementary_extensions, is_subsumption, leq_words, subsumption_chain, transpose,
    validate_chain, TransCase,
};

fn word_from_seed(seed: u64) -> Word {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_word(&mut rng, 8, 3, 6)
}

fn ipomset_from_seed(seed: u64) -> Ipomset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_interval_ipomset(&mut rng, 6)
}

/// A word for a possibly-empty slice of another word's letters.
fn segment(word: &Word, from: usize, to: usize) -> Word {
    if from == to {
        let carrier = if from == 0 {
            word.source()
        } else {
            word.letters()[from - 1].target()
        };
        Word::identity(carrier)
    } else {
        Word::new(word.letters()[from..to].to_vec()).expect("segments of coherent words cohere")
    }
}

proptest! {
    #[test]
    fn decomposition_then_gluing_restores_the_ipomset(seed: u64) {
        let p = ipomset_from_seed(seed);
        let w = phi(&p).expect("generated ipomsets are interval orders");
        prop_assert!(w.is_sparse());
        prop_assert!(psi(&w).isomorphic(&p).is_some());
    }

    #[test]
    fn gluing_then_decomposition_normalizes_the_word(seed: u64) {
        let w = word_from_seed(seed);
        let again = phi(&psi(&w)).expect("gluings of words are interval orders");
        prop_assert_eq!(again, normalize(&w));
    }

    #[test]
    fn gluing_is_associative(seed: u64, cut1: usize, cut2: usize) {
        let w = word_from_seed(seed);
        let (i, j) = (cut1 % (w.len() + 1), cut2 % (w.len() + 1));
        let (i, j) = (i.min(j), i.max(j));
        let (p1, p2, p3) = (
            psi(&segment(&w, 0, i)),
            psi(&segment(&w, i, j)),
            psi(&segment(&w, j, w.len())),
        );
        let left = p1.glue(&p2).unwrap().glue(&p3).unwrap();
        let right = p1.glue(&p2.glue(&p3).unwrap()).unwrap();
        prop_assert!(left.isomorphic(&right).is_some());
        prop_assert!(left.isomorphic(&psi(&w)).is_some());
    }

    #[test]
    fn fusing_letters_matches_gluing_their_ipomsets(seed: u64) {
        let w = word_from_seed(seed);
        for pair in w.letters().windows(2) {
            let same_kind = [Kind::Starter, Kind::Terminator]
                .into_iter()
                .any(|k| pair[0].has_kind(k) && pair[1].has_kind(k));
            if !same_kind {
                continue;
            }
            let fused = fuse(&pair[0], &pair[1]).expect("adjacent same-kind letters fuse");
            let glued = pair[0].to_ipomset("l").glue(&pair[1].to_ipomset("r")).unwrap();
            prop_assert!(fused.to_ipomset("f").isomorphic(&glued).is_some());
        }
    }

    #[test]
    fn keys_identify_isomorphism_classes(seed1: u64, seed2: u64) {
        let p = ipomset_from_seed(seed1);
        let q = ipomset_from_seed(seed2);
        let same_key = canonical_key(&p).unwrap() == canonical_key(&q).unwrap();
        prop_assert_eq!(same_key, p.isomorphic(&q).is_some());
    }

    #[test]
    fn densification_preserves_the_class(seed: u64) {
        let w = word_from_seed(seed);
        let dense = densify(&w);
        prop_assert!(dense.is_dense());
        prop_assert_eq!(word_key(&dense), word_key(&w));
        prop_assert!(equivalent(&dense, &w));
    }

    #[test]
    fn transpositions_move_in_the_lemma_direction(seed: u64) {
        let w = densify(&word_from_seed(seed));
        for i in 1..w.len() {
            let Ok((v, case)) = transpose(&w, i) else { continue };
            match case {
                TransCase::SS | TransCase::TT => {
                    prop_assert!(equivalent(&w, &v));
                    // Same-kind swaps are involutions.
                    let (back, _) = transpose(&v, i).unwrap();
                    prop_assert_eq!(back, w.clone());
                }
                TransCase::ST => prop_assert!(leq_words(&v, &w)),
                TransCase::TS => prop_assert!(leq_words(&w, &v)),
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn extension_chains_realize_subsumption(seed: u64, picks: [u8; 2]) {
        let coarse = ipomset_from_seed(seed);
        // Refine by a couple of elementary extension steps.
        let mut fine = coarse.clone();
        for pick in picks {
            let next = elementary_extensions(&fine).unwrap();
            if next.is_empty() {
                break;
            }
            fine = next[pick as usize % next.len()].clone();
        }
        prop_assert!(is_subsumption(&fine, &coarse).is_some());
        let chain = subsumption_chain(&fine, &coarse)
            .expect("bounded search succeeds on small inputs")
            .expect("a refinement is reachable by transpositions");
        validate_chain(&chain).unwrap();
        prop_assert_eq!(&chain.words[0], &densify(&phi(&fine).unwrap()));
        prop_assert!(psi(chain.words.last().unwrap()).isomorphic(&coarse).is_some());
    }
}
