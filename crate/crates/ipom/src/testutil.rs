//! Shared helpers for the unit tests.

use crate::event::{Conclist, EventId, Label};
use crate::hda::{Hda, RawCell};
use crate::pomset::Ipomset;
use crate::sta::Sta;

/// The running four-event example: strands a<b and c<a with c in the source
/// interface.
pub(crate) fn four_event() -> Ipomset {
    ip(
        &[("x1", "a"), ("x2", "b"), ("x3", "c"), ("x4", "a")],
        &[("x1", "x2"), ("x3", "x2"), ("x3", "x4")],
        &[("x1", "x3"), ("x1", "x4"), ("x2", "x4")],
        &["x3"],
        &[],
    )
}

/// Builds an ipomset from string data, panicking on invalid input.
pub(crate) fn ip(
    events: &[(&str, &str)],
    prec: &[(&str, &str)],
    order: &[(&str, &str)],
    sources: &[&str],
    targets: &[&str],
) -> Ipomset {
    let to_pairs = |pairs: &[(&str, &str)]| -> Vec<(EventId, EventId)> {
        pairs
            .iter()
            .map(|(a, b)| (EventId::new(*a).unwrap(), EventId::new(*b).unwrap()))
            .collect()
    };
    Ipomset::new(
        events
            .iter()
            .map(|(id, l)| (EventId::new(*id).unwrap(), Label::new(*l).unwrap()))
            .collect(),
        &to_pairs(prec),
        &to_pairs(order),
        &sources
            .iter()
            .map(|s| EventId::new(*s).unwrap())
            .collect::<Vec<_>>(),
        &targets
            .iter()
            .map(|s| EventId::new(*s).unwrap())
            .collect::<Vec<_>>(),
    )
    .unwrap_or_else(|report| panic!("invalid test ipomset: {report}"))
}

/// A two-square grid: `b` then `c` along the bottom, an `a` running in
/// parallel on the vertical axis, squares filling in `b`-with-`a` and
/// `c`-with-`a`.  Start bottom-left, accept bottom-right, so accepting runs
/// must finish `b` and `c` without ever starting `a`.
pub(crate) fn two_square_grid() -> Hda {
    build_grid("")
}

/// The same automaton with every cell renamed, for isomorphism tests.
pub(crate) fn two_square_grid_renamed() -> Hda {
    build_grid("n_")
}

fn build_grid(prefix: &str) -> Hda {
    let labels = |s: &[&str]| -> Conclist { s.iter().map(|l| Label::new(*l).unwrap()).collect() };
    let p = |id: &str| format!("{prefix}{id}");
    let vertex = |id: &str| RawCell {
        id: p(id),
        events: Conclist::empty(),
        d0: vec![],
        d1: vec![],
    };
    let edge = |id: &str, l: &str, from: &str, to: &str| RawCell {
        id: p(id),
        events: labels(&[l]),
        d0: vec![p(from)],
        d1: vec![p(to)],
    };
    let square = |id: &str, ls: [&str; 2], faces: [&str; 4]| RawCell {
        id: p(id),
        events: labels(&ls),
        d0: vec![p(faces[0]), p(faces[1])],
        d1: vec![p(faces[2]), p(faces[3])],
    };
    let cells = vec![
        vertex("v00"),
        vertex("v10"),
        vertex("v20"),
        vertex("v01"),
        vertex("v11"),
        vertex("v21"),
        edge("e_b", "b", "v00", "v10"),
        edge("e_c", "c", "v10", "v20"),
        edge("f_b", "b", "v01", "v11"),
        edge("f_c", "c", "v11", "v21"),
        edge("g_a", "a", "v00", "v01"),
        edge("h_a", "a", "v10", "v11"),
        edge("k_a", "a", "v20", "v21"),
        // Position 0 carries the horizontal event, position 1 the vertical
        // `a`: the lower face at 0 is the edge where the horizontal event
        // has not started (the left vertical), at 1 the bottom horizontal.
        square("sq_ba", ["b", "a"], ["g_a", "e_b", "h_a", "f_b"]),
        square("sq_ca", ["c", "a"], ["h_a", "e_c", "k_a", "f_c"]),
    ];
    Hda::new(cells, vec![p("v00")], vec![p("v20")])
        .unwrap_or_else(|report| panic!("invalid test automaton: {report}"))
}

/// A six-state ST-automaton tracing one diagonal of the two-square grid.
/// It accepts nothing — the final state has only an outgoing edge — yet its
/// unfolding reproduces the full grid.
pub(crate) fn chain_sta() -> Sta {
    let labels = |s: &[&str]| -> Conclist { s.iter().map(|l| Label::new(*l).unwrap()).collect() };
    let states = vec![
        ("x".to_string(), labels(&[])),
        ("y".to_string(), labels(&["b", "a"])),
        ("z".to_string(), labels(&["a"])),
        ("t".to_string(), labels(&["c", "a"])),
        ("u".to_string(), labels(&["a"])),
        ("v".to_string(), labels(&[])),
    ];
    let edge = |from: &str, letter: &str, to: &str| {
        (
            from.to_string(),
            crate::loset::parse_letter(letter).unwrap(),
            to.to_string(),
        )
    };
    let edges = vec![
        edge("x", "[b.|a.]", "y"),
        edge("y", "[.b|.a.]", "z"),
        edge("z", "[c.|.a.]", "t"),
        edge("t", "[.c|.a.]", "u"),
        edge("v", "[a.]", "u"),
    ];
    Sta::new(states, edges, vec!["x".to_string()], vec!["v".to_string()])
        .unwrap_or_else(|report| panic!("invalid test automaton: {report}"))
}
