//! ST-automata: finite automata whose states carry conclists and whose
//! edges carry starters and terminators.
//!
//! An edge `(p, L, q)` must have the source of `L` equal to the conclist of
//! `p` and the target equal to that of `q`; paths therefore read as coherent
//! words, and the language of the automaton collects the words of accepting
//! paths ([`Sta::language_bounded`]).
//!
//! Two translations connect these automata with higher-dimensional ones:
//!
//! * [`st_of_hda`] keeps the cells as states and adds one starter edge from
//!   each lower face up into its cell and one terminator edge from each cell
//!   down onto its upper face, for every subset of running events — including
//!   the empty subset, which contributes an identity self-loop per state.
//! * [`hd_of_sta`] goes back: it builds free cells `(q, B, C)` that remember
//!   which events of `q` are not yet started (`B`) or already terminated
//!   (`C`), reads every edge as a gluing instruction between free cells, and
//!   quotients by the congruence that makes the face relations functional
//!   and the face maps commute.
//!
//! [`check_hda_image`] tests the three closure properties that characterise
//! automata arising from the first translation: all interface edges present,
//! same-kind compositions fused, composite letters split through
//! intermediate states.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

use crate::event::Conclist;
use crate::hda::{Hda, RawCell};
use crate::steps::{fuse, word_key, Kind, StepLetter, Word};
use crate::subsume::{remap_mask, unremap_mask};

/// A violated ST-automaton axiom, found while validating raw data.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StaViolation {
    #[error("duplicate state id {0}")]
    DuplicateState(String),
    #[error("unknown state id {0}")]
    UnknownState(String),
    #[error("edge {from} -[{letter}]-> {to}: the {side} state carries {state_events}, the letter needs {letter_events}")]
    LabelMismatch {
        from: String,
        letter: String,
        to: String,
        side: &'static str,
        state_events: Conclist,
        letter_events: Conclist,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct StaReport {
    pub violations: Vec<StaViolation>,
}

impl fmt::Display for StaReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Errors from operations on a valid ST-automaton.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StaError {
    #[error("the automaton unfolds to {cells} raw cells, more than the supported {cap}")]
    SizeLimitExceeded { cells: usize, cap: usize },
}

/// Cap on the number of free cells [`hd_of_sta`] is willing to unfold.
pub const HD_CELL_CAP: usize = 20_000;

/// An ST-automaton over validated states and edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sta {
    ids: Vec<String>,
    events: Vec<Conclist>,
    edges: BTreeSet<(usize, StepLetter, usize)>,
    initial: BTreeSet<usize>,
    finals: BTreeSet<usize>,
}

impl Sta {
    /// Validates raw states and edges; edge letters must read the source
    /// state's conclist and write the target state's.
    pub fn new(
        states: Vec<(String, Conclist)>,
        edges: Vec<(String, StepLetter, String)>,
        initial: Vec<String>,
        finals: Vec<String>,
    ) -> Result<Sta, StaReport> {
        let mut violations = Vec::new();
        let mut index: HashMap<String, usize> = HashMap::new();
        let mut ids = Vec::with_capacity(states.len());
        let mut events = Vec::with_capacity(states.len());
        for (i, (id, ev)) in states.into_iter().enumerate() {
            if index.insert(id.clone(), i).is_some() {
                violations.push(StaViolation::DuplicateState(id.clone()));
            }
            ids.push(id);
            events.push(ev);
        }
        if !violations.is_empty() {
            return Err(StaReport { violations });
        }

        let mut edge_set = BTreeSet::new();
        for (from, letter, to) in edges {
            let (Some(&f), Some(&t)) = (index.get(&from), index.get(&to)) else {
                for id in [&from, &to] {
                    if !index.contains_key(id) {
                        violations.push(StaViolation::UnknownState(id.clone()));
                    }
                }
                continue;
            };
            for (side, state, needs) in
                [("source", f, letter.source()), ("target", t, letter.target())]
            {
                if events[state] != needs {
                    violations.push(StaViolation::LabelMismatch {
                        from: from.clone(),
                        letter: letter.to_string(),
                        to: to.clone(),
                        side,
                        state_events: events[state].clone(),
                        letter_events: needs,
                    });
                }
            }
            edge_set.insert((f, letter, t));
        }
        let mut resolve = |names: Vec<String>| -> BTreeSet<usize> {
            names
                .into_iter()
                .filter_map(|id| match index.get(&id) {
                    Some(&i) => Some(i),
                    None => {
                        violations.push(StaViolation::UnknownState(id));
                        None
                    }
                })
                .collect()
        };
        let initial = resolve(initial);
        let finals = resolve(finals);
        if !violations.is_empty() {
            return Err(StaReport { violations });
        }
        Ok(Sta { ids, events, edges: edge_set, initial, finals })
    }

    pub fn state_count(&self) -> usize {
        self.ids.len()
    }

    pub fn state_id(&self, i: usize) -> &str {
        &self.ids[i]
    }

    pub fn state_index(&self, id: &str) -> Option<usize> {
        self.ids.iter().position(|s| s == id)
    }

    pub fn state_events(&self, i: usize) -> &Conclist {
        &self.events[i]
    }

    pub fn edges(&self) -> impl Iterator<Item = &(usize, StepLetter, usize)> {
        self.edges.iter()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn initial_states(&self) -> impl Iterator<Item = usize> + '_ {
        self.initial.iter().copied()
    }

    pub fn final_states(&self) -> impl Iterator<Item = usize> + '_ {
        self.finals.iter().copied()
    }

    /// Canonical keys of the words of accepting paths with at most
    /// `max_steps` edges, sorted.  The trivial path at a state that is both
    /// initial and final reads as the identity on its conclist.
    pub fn language_bounded(&self, max_steps: usize) -> BTreeSet<String> {
        let mut by_source: Vec<Vec<(StepLetter, usize)>> = vec![Vec::new(); self.ids.len()];
        for (f, l, t) in &self.edges {
            by_source[*f].push((l.clone(), *t));
        }
        let mut keys = BTreeSet::new();
        for &start in &self.initial {
            let mut letters = Vec::new();
            self.collect_paths(&by_source, start, start, max_steps, &mut letters, &mut keys);
        }
        keys
    }

    fn collect_paths(
        &self,
        by_source: &[Vec<(StepLetter, usize)>],
        start: usize,
        current: usize,
        budget: usize,
        letters: &mut Vec<StepLetter>,
        keys: &mut BTreeSet<String>,
    ) {
        if self.finals.contains(&current) {
            let word = if letters.is_empty() {
                Word::identity(self.events[start].clone())
            } else {
                Word::new(letters.clone()).expect("validated edges compose coherently")
            };
            keys.insert(word_key(&word));
        }
        if budget == 0 {
            return;
        }
        for (letter, to) in &by_source[current] {
            letters.push(letter.clone());
            self.collect_paths(by_source, start, *to, budget - 1, letters, keys);
            letters.pop();
        }
    }

    /// GraphViz rendering: states as nodes (initial bold, final doubled),
    /// edges labelled with their letters.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph sta {\n");
        for (i, id) in self.ids.iter().enumerate() {
            let mut attrs = format!("label=\"{}:{}\"", id, self.events[i]);
            if self.initial.contains(&i) {
                attrs.push_str(" penwidth=2 color=green");
            }
            if self.finals.contains(&i) {
                attrs.push_str(" peripheries=2");
            }
            out.push_str(&format!("  \"{id}\" [{attrs}];\n"));
        }
        for (f, l, t) in &self.edges {
            out.push_str(&format!(
                "  \"{}\" -> \"{}\" [label=\"{}\"];\n",
                self.ids[*f], self.ids[*t], l
            ));
        }
        out.push_str("}\n");
        out
    }
}

/// The ST-automaton of a higher-dimensional automaton: cells become states;
/// every subset of a cell's events (including the empty one) contributes a
/// starter edge from the corresponding lower face up into the cell and a
/// terminator edge from the cell down onto the upper face.
pub fn st_of_hda(x: &Hda) -> Sta {
    let states: Vec<(String, Conclist)> = (0..x.cell_count())
        .map(|i| (x.cell_id(i).to_string(), x.events(i).clone()))
        .collect();
    let mut edges = Vec::new();
    for q in 0..x.cell_count() {
        let dim = x.events(q).len();
        let full: u64 = if dim == 0 { 0 } else { (1 << dim) - 1 };
        for mask in 0..=full {
            let up = StepLetter::starter(x.events(q).clone(), mask).unwrap();
            edges.push((
                x.cell_id(x.face(q, 0, mask)).to_string(),
                up,
                x.cell_id(q).to_string(),
            ));
            let down = StepLetter::terminator(x.events(q).clone(), mask).unwrap();
            edges.push((
                x.cell_id(q).to_string(),
                down,
                x.cell_id(x.face(q, 1, mask)).to_string(),
            ));
        }
    }
    let initial = x.start_cells().map(|i| x.cell_id(i).to_string()).collect();
    let finals = x.accept_cells().map(|i| x.cell_id(i).to_string()).collect();
    Sta::new(states, edges, initial, finals).expect("translated automata are valid")
}

/// One free cell of the unfolding: state `q` with the `unstarted` positions
/// of its conclist pushed below the lower faces and the `ended` positions
/// above the upper ones.  Its own events are the remaining positions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct FreeCell {
    state: usize,
    unstarted: u64,
    ended: u64,
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> UnionFind {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, mut i: usize) -> usize {
        while self.parent[i] != i {
            self.parent[i] = self.parent[self.parent[i]];
            i = self.parent[i];
        }
        i
    }

    /// Unions towards the smaller index, keeping representatives stable.
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi] = lo;
        true
    }
}

/// The higher-dimensional automaton of an ST-automaton.
///
/// Unfolds every state `q` into free cells `(q, B, C)` over disjoint
/// position sets `B` (not yet started) and `C` (already ended) of its
/// conclist.  The face relation in a direction `A` of the cell's own events
/// has a formal target — move `A` into `B` or `C` — plus one copied target
/// per matching edge: a starter edge `(r, L, q)` with marks `A` makes
/// `(r, B', C')` a lower face, a terminator edge `(q, L, r)` an upper one,
/// with positions re-indexed into `r`'s conclist.  The returned automaton is
/// the quotient by the congruence closing these relations under
/// functionality and the precubical identities; start and accept cells are
/// the classes of `(q, ∅, ∅)` for initial and final states.
pub fn hd_of_sta(a: &Sta) -> Result<Hda, StaError> {
    let mut total: usize = 0;
    for i in 0..a.state_count() {
        total = total.saturating_add(3usize.pow(a.state_events(i).len() as u32));
        if total > HD_CELL_CAP {
            return Err(StaError::SizeLimitExceeded { cells: total, cap: HD_CELL_CAP });
        }
    }

    // Enumerate the free cells.
    let mut cells: Vec<FreeCell> = Vec::with_capacity(total);
    let mut index: HashMap<FreeCell, usize> = HashMap::with_capacity(total);
    for state in 0..a.state_count() {
        let dim = a.state_events(state).len();
        let full: u64 = if dim == 0 { 0 } else { (1 << dim) - 1 };
        for unstarted in 0..=full {
            let mut rest = full & !unstarted;
            loop {
                let cell = FreeCell { state, unstarted, ended: rest };
                index.insert(cell, cells.len());
                cells.push(cell);
                if rest == 0 {
                    break;
                }
                rest = (rest - 1) & full & !unstarted;
            }
        }
    }

    // Group the edges by endpoint and marks for fast face lookups.
    let mut starters_into: HashMap<(usize, u64), Vec<usize>> = HashMap::new();
    let mut terminators_from: HashMap<(usize, u64), Vec<usize>> = HashMap::new();
    for (f, l, t) in a.edges() {
        if l.has_kind(Kind::Starter) {
            starters_into.entry((*t, l.marked_mask())).or_default().push(*f);
        }
        if l.has_kind(Kind::Terminator) {
            terminators_from.entry((*f, l.marked_mask())).or_default().push(*t);
        }
    }

    // All targets of the face relation of `cell` in direction `moved`
    // (positions of the state's conclist, disjoint from `unstarted | ended`).
    let face_targets = |cell: FreeCell, dir: usize, moved: u64| -> Vec<usize> {
        let mut out = Vec::new();
        let formal = if dir == 0 {
            FreeCell { unstarted: cell.unstarted | moved, ..cell }
        } else {
            FreeCell { ended: cell.ended | moved, ..cell }
        };
        out.push(index[&formal]);
        let copied = if dir == 0 {
            starters_into.get(&(cell.state, moved))
        } else {
            terminators_from.get(&(cell.state, moved))
        };
        for &other in copied.into_iter().flatten() {
            let re = FreeCell {
                state: other,
                unstarted: remap_mask(cell.unstarted, moved),
                ended: remap_mask(cell.ended, moved),
            };
            out.push(index[&re]);
        }
        out
    };

    // Close the quotient under functionality (all targets of one face
    // relation coincide) and the precubical identities (faces at distinct
    // positions commute).
    let mut uf = UnionFind::new(cells.len());
    loop {
        let mut changed = false;
        let mut classes: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for i in 0..cells.len() {
            classes.entry(uf.find(i)).or_default().push(i);
        }
        for members in classes.values() {
            let lead = cells[members[0]];
            let own_dim = a.state_events(lead.state).len()
                - (lead.unstarted | lead.ended).count_ones() as usize;
            let full: u64 = if own_dim == 0 { 0 } else { (1 << own_dim) - 1 };
            for dir in 0..2 {
                for moved in 0..=full {
                    let mut root = usize::MAX;
                    for &m in members {
                        let cell = cells[m];
                        let dim = a.state_events(cell.state).len();
                        let local = unremap_mask(moved, cell.unstarted | cell.ended, dim);
                        for t in face_targets(cell, dir, local) {
                            if root == usize::MAX {
                                root = uf.find(t);
                            } else {
                                changed |= uf.union(root, t);
                                root = uf.find(root);
                            }
                        }
                    }
                }
            }
            // Precubical identities on singleton pairs: removing position j
            // then i equals removing i then j-1 (indices shift down).
            for j in 1..own_dim {
                for i in 0..j {
                    for (nu, mu) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
                        let cell = lead;
                        let dim = a.state_events(cell.state).len();
                        let li = unremap_mask(1 << i, cell.unstarted | cell.ended, dim);
                        let lj = unremap_mask(1 << j, cell.unstarted | cell.ended, dim);
                        let via_j = {
                            let mid = cells[face_targets(cell, mu, lj)[0]];
                            let mid_dim = a.state_events(mid.state).len();
                            let inner = unremap_mask(
                                remap_mask(1 << i, 1 << j),
                                mid.unstarted | mid.ended,
                                mid_dim,
                            );
                            face_targets(mid, nu, inner)[0]
                        };
                        let via_i = {
                            let mid = cells[face_targets(cell, nu, li)[0]];
                            let mid_dim = a.state_events(mid.state).len();
                            let inner = unremap_mask(
                                remap_mask(1 << j, 1 << i),
                                mid.unstarted | mid.ended,
                                mid_dim,
                            );
                            face_targets(mid, mu, inner)[0]
                        };
                        changed |= uf.union(via_j, via_i);
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }

    // Build the quotient.
    let mut classes: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..cells.len() {
        classes.entry(uf.find(i)).or_default().push(i);
    }
    let class_name: HashMap<usize, String> = classes
        .keys()
        .enumerate()
        .map(|(n, &root)| (root, format!("c{n}")))
        .collect();
    let own_events = |cell: FreeCell| -> Conclist {
        a.state_events(cell.state).without(cell.unstarted | cell.ended)
    };
    let mut raw = Vec::with_capacity(classes.len());
    for (&root, members) in &classes {
        let lead = cells[members[0]];
        let events = own_events(lead);
        for &m in members {
            assert_eq!(own_events(cells[m]), events, "merged cells must agree on events");
        }
        let dim = events.len();
        let mut d0 = Vec::with_capacity(dim);
        let mut d1 = Vec::with_capacity(dim);
        for pos in 0..dim {
            let state_dim = a.state_events(lead.state).len();
            let local = unremap_mask(1 << pos, lead.unstarted | lead.ended, state_dim);
            for (dir, out) in [(0, &mut d0), (1, &mut d1)] {
                let target = uf.find(face_targets(lead, dir, local)[0]);
                out.push(class_name[&target].clone());
            }
        }
        raw.push(RawCell { id: class_name[&root].clone(), events, d0, d1 });
    }
    let mut base = |state: usize| -> String {
        let root = uf.find(index[&FreeCell { state, unstarted: 0, ended: 0 }]);
        class_name[&root].clone()
    };
    let start = a.initial_states().map(&mut base).collect();
    let accept = a.final_states().map(&mut base).collect();
    Ok(Hda::new(raw, start, accept)
        .unwrap_or_else(|report| panic!("quotient must be a valid automaton: {report}")))
}

/// Outcome of [`check_hda_image`]: the witnesses of each failed closure
/// property, empty when the automaton looks like the translation of a
/// higher-dimensional one.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ImageReport {
    /// States missing an incoming starter or outgoing terminator edge for
    /// some subset of their events.
    pub missing_interface_edges: Vec<String>,
    /// Composable same-kind edge pairs whose fused letter has no edge.
    pub missing_fusions: Vec<String>,
    /// Edges with several marks that cannot be split through an
    /// intermediate state.
    pub missing_splits: Vec<String>,
}

impl ImageReport {
    pub fn is_ok(&self) -> bool {
        self.missing_interface_edges.is_empty()
            && self.missing_fusions.is_empty()
            && self.missing_splits.is_empty()
    }
}

impl fmt::Display for ImageReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_ok() {
            return write!(f, "all closure properties hold");
        }
        let mut first = true;
        for (title, items) in [
            ("missing interface edge", &self.missing_interface_edges),
            ("missing fusion", &self.missing_fusions),
            ("missing split", &self.missing_splits),
        ] {
            for item in items {
                if !first {
                    writeln!(f)?;
                }
                first = false;
                write!(f, "{title}: {item}")?;
            }
        }
        Ok(())
    }
}

/// Checks the three properties every translation of a higher-dimensional
/// automaton satisfies: (1) each state has, for every subset of its events,
/// an incoming starter and an outgoing terminator edge marking exactly that
/// subset; (2) fusing two composable same-kind edges yields a letter that is
/// again an edge; (3) every edge marking several events splits, for each
/// proper subset, through an intermediate state.
pub fn check_hda_image(a: &Sta) -> ImageReport {
    let mut report = ImageReport::default();
    let edges: Vec<&(usize, StepLetter, usize)> = a.edges().collect();
    let has_edge = |f: usize, l: &StepLetter, t: usize| {
        edges.iter().any(|(ef, el, et)| *ef == f && el == l && *et == t)
    };

    for q in 0..a.state_count() {
        let u = a.state_events(q);
        let full: u64 = if u.len() == 0 { 0 } else { (1 << u.len()) - 1 };
        for mask in 0..=full {
            let up = StepLetter::starter(u.clone(), mask).unwrap();
            if !edges.iter().any(|(_, l, t)| *t == q && *l == up) {
                report
                    .missing_interface_edges
                    .push(format!("state {} has no incoming {}", a.state_id(q), up));
            }
            let down = StepLetter::terminator(u.clone(), mask).unwrap();
            if !edges.iter().any(|(f, l, _)| *f == q && *l == down) {
                report
                    .missing_interface_edges
                    .push(format!("state {} has no outgoing {}", a.state_id(q), down));
            }
        }
    }

    for (p, l1, q) in &edges {
        for (q2, l2, r) in &edges {
            if q2 != q {
                continue;
            }
            for kind in [Kind::Starter, Kind::Terminator] {
                if !(l1.has_kind(kind) && l2.has_kind(kind)) {
                    continue;
                }
                let fused = fuse(l1, l2).expect("validated edges compose");
                if !has_edge(*p, &fused, *r) {
                    report.missing_fusions.push(format!(
                        "{} -[{}]-> {} -[{}]-> {} has no fused edge {} -[{}]-> {}",
                        a.state_id(*p),
                        l1,
                        a.state_id(*q),
                        l2,
                        a.state_id(*r),
                        a.state_id(*p),
                        fused,
                        a.state_id(*r),
                    ));
                }
                break;
            }
        }
    }

    for (p, l, r) in &edges {
        let marked = l.marked_mask();
        if marked.count_ones() < 2 {
            continue;
        }
        // Proper non-empty submasks of the marks.
        let mut sub = (marked - 1) & marked;
        while sub != 0 {
            let rest = marked & !sub;
            let (first, second) = if l.kind() == Kind::Starter {
                (
                    StepLetter::starter(l.carrier().without(sub), remap_mask(rest, sub)).unwrap(),
                    StepLetter::starter(l.carrier().clone(), sub).unwrap(),
                )
            } else {
                (
                    StepLetter::terminator(l.carrier().clone(), sub).unwrap(),
                    StepLetter::terminator(l.carrier().without(sub), remap_mask(rest, sub))
                        .unwrap(),
                )
            };
            let found = (0..a.state_count())
                .any(|m| has_edge(*p, &first, m) && has_edge(m, &second, *r));
            if !found {
                report.missing_splits.push(format!(
                    "{} -[{}]-> {} does not split as [{}][{}]",
                    a.state_id(*p),
                    l,
                    a.state_id(*r),
                    first,
                    second,
                ));
            }
            sub = (sub - 1) & marked;
        }
    }

    report
}
