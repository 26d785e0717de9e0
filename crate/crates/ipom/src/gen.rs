//! Seeded random generators for words, ipomsets, and both kinds of
//! automata.
//!
//! Every generator takes the RNG by reference, so callers control seeding
//! and reproducibility.  The outputs are always valid: words grow letter by
//! letter against the running target conclist, higher-dimensional automata
//! are face-closed subcomplexes of grids (which satisfy the precubical
//! identities by construction), and ST-automaton edges are only drawn
//! between states whose conclists actually support a letter.

use std::collections::BTreeSet;

use rand::Rng;

use crate::event::{Conclist, Label};
use crate::hda::{Hda, RawCell};
use crate::pomset::Ipomset;
use crate::sta::Sta;
use crate::steps::{psi, StepLetter, Word};

/// Labels the generators draw from.
pub const ALPHABET: [&str; 3] = ["a", "b", "c"];

fn random_label<R: Rng>(rng: &mut R) -> Label {
    Label::new(ALPHABET[rng.random_range(0..ALPHABET.len())]).unwrap()
}

/// A conclist of up to `max_len` random labels.
pub fn random_conclist<R: Rng>(rng: &mut R, max_len: usize) -> Conclist {
    let len = rng.random_range(0..=max_len);
    (0..len).map(|_| random_label(rng)).collect()
}

/// A coherent word of at most `max_letters` letters, running at most
/// `max_width` events at once and touching at most `max_events` events in
/// total.  Identities are thrown in occasionally so that normalization has
/// something to do.
pub fn random_word<R: Rng>(
    rng: &mut R,
    max_letters: usize,
    max_width: usize,
    max_events: usize,
) -> Word {
    let mut current = random_conclist(rng, max_width.min(max_events).min(2));
    let mut budget = max_events.saturating_sub(current.len());
    let mut letters = Vec::new();
    for _ in 0..max_letters {
        let can_start = budget > 0 && current.len() < max_width;
        let can_end = current.len() > 0;
        let letter = if rng.random_bool(0.1) {
            StepLetter::identity(current.clone())
        } else if can_start && (!can_end || rng.random_bool(0.5)) {
            let room = (max_width - current.len()).min(budget);
            let fresh = rng.random_range(1..=room);
            let mut labels: Vec<(Label, bool)> =
                current.labels().iter().map(|l| (l.clone(), false)).collect();
            for _ in 0..fresh {
                let pos = rng.random_range(0..=labels.len());
                labels.insert(pos, (random_label(rng), true));
            }
            let marked = labels
                .iter()
                .enumerate()
                .filter(|(_, (_, new))| *new)
                .fold(0u64, |m, (i, _)| m | (1 << i));
            let carrier: Conclist = labels.into_iter().map(|(l, _)| l).collect();
            budget -= fresh;
            StepLetter::starter(carrier, marked).unwrap()
        } else if can_end {
            let full = (1u64 << current.len()) - 1;
            let marked = rng.random_range(1..=full);
            StepLetter::terminator(current.clone(), marked).unwrap()
        } else {
            break;
        };
        current = letter.target();
        letters.push(letter);
    }
    if letters.is_empty() {
        Word::identity(current)
    } else {
        Word::new(letters).expect("grown letters cohere")
    }
}

/// A random interval ipomset with at most `max_events` events: the gluing
/// of a random word.
pub fn random_interval_ipomset<R: Rng>(rng: &mut R, max_events: usize) -> Ipomset {
    let word = random_word(rng, 2 * max_events, max_events.min(4), max_events);
    psi(&word)
}

/// One coordinate of a grid cell: sitting at a vertex or spanning a
/// segment of the axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum AxisPos {
    Vertex(usize),
    Segment(usize),
}

/// A random higher-dimensional automaton: a face-closed random subcomplex
/// of a small grid (one event label per axis), with a random start vertex
/// and a random accept vertex.
pub fn random_hda<R: Rng>(rng: &mut R) -> Hda {
    let axes = rng.random_range(1..=2);
    let lens: Vec<usize> = (0..axes).map(|_| rng.random_range(1..=2)).collect();
    let axis_labels: Vec<Label> = (0..axes).map(|_| random_label(rng)).collect();

    // All grid cells, as one axis position per axis.
    let mut grid: Vec<Vec<AxisPos>> = vec![Vec::new()];
    for len in &lens {
        let mut next = Vec::new();
        for cell in &grid {
            for v in 0..=*len {
                let mut c = cell.clone();
                c.push(AxisPos::Vertex(v));
                next.push(c);
            }
            for s in 0..*len {
                let mut c = cell.clone();
                c.push(AxisPos::Segment(s));
                next.push(c);
            }
        }
        grid = next;
    }

    // Keep a random subset and close it under faces.
    let mut kept: BTreeSet<Vec<AxisPos>> = grid
        .iter()
        .filter(|_| rng.random_bool(0.6))
        .cloned()
        .collect();
    if kept.is_empty() {
        kept.insert(vec![AxisPos::Vertex(0); axes]);
    }
    let mut work: Vec<Vec<AxisPos>> = kept.iter().cloned().collect();
    while let Some(cell) = work.pop() {
        for (axis, pos) in cell.iter().enumerate() {
            if let AxisPos::Segment(s) = pos {
                for v in [*s, *s + 1] {
                    let mut face = cell.clone();
                    face[axis] = AxisPos::Vertex(v);
                    if kept.insert(face.clone()) {
                        work.push(face);
                    }
                }
            }
        }
    }

    let name = |cell: &[AxisPos]| -> String {
        let mut id = String::from("g");
        for pos in cell {
            match pos {
                AxisPos::Vertex(v) => id.push_str(&format!("_v{v}")),
                AxisPos::Segment(s) => id.push_str(&format!("_s{s}")),
            }
        }
        id
    };
    let raw: Vec<RawCell> = kept
        .iter()
        .map(|cell| {
            let events: Conclist = cell
                .iter()
                .enumerate()
                .filter_map(|(axis, pos)| match pos {
                    AxisPos::Segment(_) => Some(axis_labels[axis].clone()),
                    AxisPos::Vertex(_) => None,
                })
                .collect();
            let faces = |vertex_pick: usize| -> Vec<String> {
                cell.iter()
                    .enumerate()
                    .filter_map(|(axis, pos)| match pos {
                        AxisPos::Segment(s) => {
                            let mut face = cell.clone();
                            face[axis] = AxisPos::Vertex(s + vertex_pick);
                            Some(name(&face))
                        }
                        AxisPos::Vertex(_) => None,
                    })
                    .collect()
            };
            RawCell { id: name(cell), events, d0: faces(0), d1: faces(1) }
        })
        .collect();

    let vertices: Vec<String> = kept
        .iter()
        .filter(|c| c.iter().all(|p| matches!(p, AxisPos::Vertex(_))))
        .map(|c| name(c))
        .collect();
    let pick = |rng: &mut R| vertices[rng.random_range(0..vertices.len())].clone();
    let start = vec![pick(rng)];
    let accept = vec![pick(rng)];
    Hda::new(raw, start, accept).expect("face-closed grid subcomplexes are valid")
}

/// A random ST-automaton: a handful of states with small conclists, edges
/// drawn only where some letter fits, and random initial and final states.
pub fn random_sta<R: Rng>(rng: &mut R) -> Sta {
    let n = rng.random_range(1..=6);
    let states: Vec<(String, Conclist)> = (0..n)
        .map(|i| (format!("q{i}"), random_conclist(rng, 2)))
        .collect();

    let mut edges = Vec::new();
    for _ in 0..rng.random_range(0..=3 * n) {
        let p = rng.random_range(0..n);
        let q = rng.random_range(0..n);
        let (lp, lq) = (&states[p].1, &states[q].1);
        let mut candidates: BTreeSet<StepLetter> = BTreeSet::new();
        let full_q = (1u64 << lq.len()) - 1;
        for mask in 0..=full_q {
            if lq.is_without(mask, lp) {
                candidates.insert(StepLetter::starter(lq.clone(), mask).unwrap());
            }
        }
        let full_p = (1u64 << lp.len()) - 1;
        for mask in 0..=full_p {
            if lp.is_without(mask, lq) {
                candidates.insert(StepLetter::terminator(lp.clone(), mask).unwrap());
            }
        }
        if candidates.is_empty() {
            continue;
        }
        let choice = rng.random_range(0..candidates.len());
        let letter = candidates.into_iter().nth(choice).unwrap();
        edges.push((states[p].0.clone(), letter, states[q].0.clone()));
    }

    let subset = |rng: &mut R| -> Vec<String> {
        let mut picked: Vec<String> = states
            .iter()
            .filter(|_| rng.random_bool(0.4))
            .map(|(id, _)| id.clone())
            .collect();
        if picked.is_empty() {
            picked.push(states[rng.random_range(0..n)].0.clone());
        }
        picked
    };
    let initial = subset(rng);
    let finals = subset(rng);
    Sta::new(states, edges, initial, finals).expect("drawn edges fit their states")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generated_structures_are_valid_and_reproducible() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let w = random_word(&mut rng, 8, 3, 6);
            assert!(psi(&w).is_interval());
            let p = random_interval_ipomset(&mut rng, 6);
            assert!(p.is_interval());
            let x = random_hda(&mut rng);
            assert!(x.cell_count() >= 1);
            let a = random_sta(&mut rng);
            assert!(a.state_count() >= 1);
        }
        let mut r1 = ChaCha8Rng::seed_from_u64(11);
        let mut r2 = ChaCha8Rng::seed_from_u64(11);
        assert_eq!(random_sta(&mut r1), random_sta(&mut r2));
    }

    #[test]
    fn generated_words_touch_interfaces() {
        // Over a few draws we should see words with non-trivial source and
        // target interfaces, so the round-trip tests exercise them.
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut saw_source = false;
        let mut saw_target = false;
        for _ in 0..100 {
            let w = random_word(&mut rng, 6, 3, 6);
            saw_source |= w.source().len() > 0;
            saw_target |= w.target().len() > 0;
        }
        assert!(saw_source && saw_target);
    }
}
