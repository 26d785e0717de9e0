//! Higher-dimensional automata: precubical sets with start and accept
//! cells.
//!
//! A cell of dimension `n` models `n` events running concurrently; its
//! conclist lists their labels in event order.  Every cell carries, for each
//! position, a lower face (`d0`, the cell in which that event has not yet
//! started) and an upper face (`d1`, the event has terminated), subject to
//! the precubical identities: faces at distinct positions commute once the
//! later index is shifted down.
//!
//! A path moves from a lower face up into a bigger cell (starting the added
//! events) or down to an upper face (terminating some events).  Reading the
//! moves as starters and terminators yields a coherent word
//! ([`Hda::ev_path`]); the language of the automaton collects the words of
//! accepting paths, here bounded by path length ([`Hda::language_bounded`]).

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

use crate::event::Conclist;
use crate::steps::{word_key, StepLetter, Word};

/// A violated precubical-set axiom, found while validating raw cell data.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HdaViolation {
    #[error("duplicate cell id {0}")]
    DuplicateCell(String),
    #[error("unknown cell id {0}")]
    UnknownCell(String),
    #[error("cell {cell} needs one {kind} face per event, got {got}")]
    FaceArity {
        cell: String,
        kind: &'static str,
        got: usize,
    },
    #[error("cell {cell}: {kind} face at position {position} should carry conclist {expected}, but {face} carries {actual}")]
    FaceConclistMismatch {
        cell: String,
        kind: &'static str,
        position: usize,
        face: String,
        expected: Conclist,
        actual: Conclist,
    },
    #[error("cell {cell}: faces at positions {i} and {j} do not commute")]
    PrecubicalViolation { cell: String, i: usize, j: usize },
    #[error("cells of dimension > {max} are not supported (cell {cell})")]
    DimensionTooLarge { cell: String, max: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct HdaReport {
    pub violations: Vec<HdaViolation>,
}

impl fmt::Display for HdaReport {
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

/// Errors from path operations on a valid HDA.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HdaError {
    #[error("unknown cell id {0}")]
    UnknownCell(String),
    #[error("invalid path at move {at}: {reason}")]
    InvalidPath { at: usize, reason: String },
}

/// Cells may run at most this many events at once.
pub const MAX_DIMENSION: usize = 16;

/// Raw cell data for [`Hda::new`]: faces are cell ids, one per position.
#[derive(Debug, Clone)]
pub struct RawCell {
    pub id: String,
    pub events: Conclist,
    pub d0: Vec<String>,
    pub d1: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Cell {
    id: String,
    events: Conclist,
    d0: Vec<usize>,
    d1: Vec<usize>,
}

/// A higher-dimensional automaton over validated cells.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hda {
    cells: Vec<Cell>,
    start: BTreeSet<usize>,
    accept: BTreeSet<usize>,
}

impl Hda {
    /// Validates raw cells: face arities, face conclists (drop the position,
    /// keep the rest), the precubical identities, and the start/accept
    /// references.
    pub fn new(
        raw: Vec<RawCell>,
        start: Vec<String>,
        accept: Vec<String>,
    ) -> Result<Hda, HdaReport> {
        let mut violations = Vec::new();
        let mut index: HashMap<String, usize> = HashMap::new();
        for (i, cell) in raw.iter().enumerate() {
            if index.insert(cell.id.clone(), i).is_some() {
                violations.push(HdaViolation::DuplicateCell(cell.id.clone()));
            }
            if cell.events.len() > MAX_DIMENSION {
                violations.push(HdaViolation::DimensionTooLarge {
                    cell: cell.id.clone(),
                    max: MAX_DIMENSION,
                });
            }
        }
        if !violations.is_empty() {
            return Err(HdaReport { violations });
        }

        let mut cells = Vec::with_capacity(raw.len());
        for cell in &raw {
            let dim = cell.events.len();
            for (kind, faces) in [("lower", &cell.d0), ("upper", &cell.d1)] {
                if faces.len() != dim {
                    violations.push(HdaViolation::FaceArity {
                        cell: cell.id.clone(),
                        kind,
                        got: faces.len(),
                    });
                }
            }
            let resolve = |ids: &[String], violations: &mut Vec<HdaViolation>| -> Vec<usize> {
                ids.iter()
                    .map(|id| match index.get(id) {
                        Some(&i) => i,
                        None => {
                            violations.push(HdaViolation::UnknownCell(id.clone()));
                            usize::MAX
                        }
                    })
                    .collect()
            };
            let d0 = resolve(&cell.d0, &mut violations);
            let d1 = resolve(&cell.d1, &mut violations);
            cells.push(Cell {
                id: cell.id.clone(),
                events: cell.events.clone(),
                d0,
                d1,
            });
        }
        if !violations.is_empty() {
            return Err(HdaReport { violations });
        }

        for cell in &cells {
            let dim = cell.events.len();
            for pos in 0..dim {
                for (kind, faces) in [("lower", &cell.d0), ("upper", &cell.d1)] {
                    let face = &cells[faces[pos]];
                    let expected = cell.events.without(1 << pos);
                    if face.events != expected {
                        violations.push(HdaViolation::FaceConclistMismatch {
                            cell: cell.id.clone(),
                            kind,
                            position: pos,
                            face: face.id.clone(),
                            expected,
                            actual: face.events.clone(),
                        });
                    }
                }
            }
        }
        if !violations.is_empty() {
            return Err(HdaReport { violations });
        }

        // Precubical identities: for i < j and any two directions,
        // d_i(d_j(q)) = d_{j-1}(d_i(q)).
        for (qi, cell) in cells.iter().enumerate() {
            let dim = cell.events.len();
            for j in 1..dim {
                for i in 0..j {
                    for (nu, mu) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
                        let pick = |c: &Cell, dir: usize, pos: usize| -> usize {
                            if dir == 0 {
                                c.d0[pos]
                            } else {
                                c.d1[pos]
                            }
                        };
                        let via_j = pick(&cells[pick(cell, mu, j)], nu, i);
                        let via_i = pick(&cells[pick(cell, nu, i)], mu, j - 1);
                        if via_j != via_i {
                            violations.push(HdaViolation::PrecubicalViolation {
                                cell: cells[qi].id.clone(),
                                i,
                                j,
                            });
                        }
                    }
                }
            }
        }

        let resolve_set = |ids: &[String], violations: &mut Vec<HdaViolation>| -> BTreeSet<usize> {
            ids.iter()
                .filter_map(|id| match index.get(id) {
                    Some(&i) => Some(i),
                    None => {
                        violations.push(HdaViolation::UnknownCell(id.clone()));
                        None
                    }
                })
                .collect()
        };
        let start = resolve_set(&start, &mut violations);
        let accept = resolve_set(&accept, &mut violations);
        if !violations.is_empty() {
            return Err(HdaReport { violations });
        }
        Ok(Hda { cells, start, accept })
    }

    pub fn cell_count(&self) -> usize {
        self.cells.len()
    }

    pub fn cell_id(&self, i: usize) -> &str {
        &self.cells[i].id
    }

    pub fn cell_index(&self, id: &str) -> Option<usize> {
        self.cells.iter().position(|c| c.id == id)
    }

    /// The conclist of events running in cell `i`.
    pub fn events(&self, i: usize) -> &Conclist {
        &self.cells[i].events
    }

    pub fn dimension(&self, i: usize) -> usize {
        self.cells[i].events.len()
    }

    pub fn start_cells(&self) -> impl Iterator<Item = usize> + '_ {
        self.start.iter().copied()
    }

    pub fn accept_cells(&self) -> impl Iterator<Item = usize> + '_ {
        self.accept.iter().copied()
    }

    /// The face of cell `i` obtained by removing all positions of `mask`
    /// (`dir` 0 = lower, 1 = upper), composing singleton faces from the
    /// highest position down so that lower positions keep their meaning.
    pub fn face(&self, i: usize, dir: usize, mask: u64) -> usize {
        let mut current = i;
        for pos in (0..self.cells[i].events.len()).rev() {
            if mask & (1 << pos) != 0 {
                let cell = &self.cells[current];
                current = if dir == 0 { cell.d0[pos] } else { cell.d1[pos] };
            }
        }
        current
    }

    pub fn lower_face(&self, i: usize, pos: usize) -> usize {
        self.cells[i].d0[pos]
    }

    pub fn upper_face(&self, i: usize, pos: usize) -> usize {
        self.cells[i].d1[pos]
    }

    /// All upsteps leaving `cell`: pairs `(bigger, starts)` with
    /// `face(bigger, 0, starts) == cell` and `starts` non-empty.
    pub fn upsteps_from(&self, cell: usize) -> Vec<(usize, u64)> {
        let mut out = Vec::new();
        for (q, c) in self.cells.iter().enumerate() {
            let dim = c.events.len();
            if dim == 0 {
                continue;
            }
            let full: u64 = (1 << dim) - 1;
            for mask in 1..=full {
                if self.face(q, 0, mask) == cell {
                    out.push((q, mask));
                }
            }
        }
        out
    }

    /// All downsteps leaving `cell`: pairs `(ends, smaller)` with `ends`
    /// non-empty.
    pub fn downsteps_from(&self, cell: usize) -> Vec<(u64, usize)> {
        let dim = self.cells[cell].events.len();
        if dim == 0 {
            return Vec::new();
        }
        let full: u64 = (1 << dim) - 1;
        (1..=full)
            .map(|mask| (mask, self.face(cell, 1, mask)))
            .collect()
    }

    /// Checks that a path's moves are actual up- and downsteps.
    pub fn validate_path(&self, path: &HdaPath) -> Result<(), HdaError> {
        if path.start >= self.cells.len() {
            return Err(HdaError::UnknownCell(format!("#{}", path.start)));
        }
        let mut current = path.start;
        for (k, mv) in path.moves.iter().enumerate() {
            let bad = |reason: String| HdaError::InvalidPath { at: k, reason };
            match *mv {
                PathMove::Up { to, starts } => {
                    if to >= self.cells.len() {
                        return Err(bad("unknown target cell".into()));
                    }
                    if starts == 0 {
                        return Err(bad("upstep must start at least one event".into()));
                    }
                    if self.face(to, 0, starts) != current {
                        return Err(bad(format!(
                            "cell {} is not the lower face of {} at the started positions",
                            self.cells[current].id, self.cells[to].id
                        )));
                    }
                    current = to;
                }
                PathMove::Down { to, ends } => {
                    if ends == 0 {
                        return Err(bad("downstep must terminate at least one event".into()));
                    }
                    if self.face(current, 1, ends) != to {
                        return Err(bad(format!(
                            "cell {} is not the upper face of {} at the ended positions",
                            self.cells[to].id, self.cells[current].id
                        )));
                    }
                    current = to;
                }
            }
        }
        Ok(())
    }

    /// Reads a path as a coherent word: upsteps become starters on the
    /// bigger cell's conclist, downsteps terminators; the empty path is the
    /// identity word of its cell.
    pub fn ev_path(&self, path: &HdaPath) -> Result<Word, HdaError> {
        self.validate_path(path)?;
        let mut current = path.start;
        let mut letters = Vec::with_capacity(path.moves.len());
        for mv in &path.moves {
            match *mv {
                PathMove::Up { to, starts } => {
                    letters
                        .push(StepLetter::starter(self.cells[to].events.clone(), starts).unwrap());
                    current = to;
                }
                PathMove::Down { to, ends } => {
                    letters.push(
                        StepLetter::terminator(self.cells[current].events.clone(), ends).unwrap(),
                    );
                    current = to;
                }
            }
        }
        if letters.is_empty() {
            return Ok(Word::identity(self.cells[path.start].events.clone()));
        }
        Ok(Word::new(letters).expect("paths read as coherent words"))
    }

    /// Canonical keys of the words of accepting paths with at most
    /// `max_steps` moves, sorted.
    pub fn language_bounded(&self, max_steps: usize) -> BTreeSet<String> {
        let mut keys = BTreeSet::new();
        for start in &self.start {
            let mut letters: Vec<StepLetter> = Vec::new();
            self.collect_paths(*start, *start, max_steps, &mut letters, &mut keys);
        }
        keys
    }

    fn collect_paths(
        &self,
        start: usize,
        current: usize,
        budget: usize,
        letters: &mut Vec<StepLetter>,
        keys: &mut BTreeSet<String>,
    ) {
        if self.accept.contains(&current) {
            let word = if letters.is_empty() {
                Word::identity(self.cells[start].events.clone())
            } else {
                Word::new(letters.clone()).expect("paths read as coherent words")
            };
            keys.insert(word_key(&word));
        }
        if budget == 0 {
            return;
        }
        for (to, starts) in self.upsteps_from(current) {
            letters.push(StepLetter::starter(self.cells[to].events.clone(), starts).unwrap());
            self.collect_paths(start, to, budget - 1, letters, keys);
            letters.pop();
        }
        for (ends, to) in self.downsteps_from(current) {
            letters
                .push(StepLetter::terminator(self.cells[current].events.clone(), ends).unwrap());
            self.collect_paths(start, to, budget - 1, letters, keys);
            letters.pop();
        }
    }

    /// Precubical-set isomorphism respecting start and accept cells.
    pub fn isomorphic(&self, other: &Hda) -> bool {
        if self.cells.len() != other.cells.len()
            || self.start.len() != other.start.len()
            || self.accept.len() != other.accept.len()
        {
            return false;
        }
        let n = self.cells.len();
        let mut image = vec![usize::MAX; n];
        let mut used = vec![false; n];
        self.extend_hda_iso(other, 0, &mut image, &mut used)
    }

    fn extend_hda_iso(
        &self,
        other: &Hda,
        i: usize,
        image: &mut [usize],
        used: &mut [bool],
    ) -> bool {
        let n = self.cells.len();
        if i == n {
            return true;
        }
        'candidates: for u in 0..n {
            if used[u]
                || self.cells[i].events != other.cells[u].events
                || self.start.contains(&i) != other.start.contains(&u)
                || self.accept.contains(&i) != other.accept.contains(&u)
            {
                continue;
            }
            // Face maps must commute with the assignment so far, in both
            // directions.
            for pos in 0..self.cells[i].events.len() {
                for (mine, theirs) in [
                    (self.cells[i].d0[pos], other.cells[u].d0[pos]),
                    (self.cells[i].d1[pos], other.cells[u].d1[pos]),
                ] {
                    if image[mine] != usize::MAX && image[mine] != theirs {
                        continue 'candidates;
                    }
                }
            }
            for j in 0..i {
                for pos in 0..self.cells[j].events.len() {
                    if self.cells[j].d0[pos] == i && other.cells[image[j]].d0[pos] != u {
                        continue 'candidates;
                    }
                    if self.cells[j].d1[pos] == i && other.cells[image[j]].d1[pos] != u {
                        continue 'candidates;
                    }
                }
            }
            image[i] = u;
            used[u] = true;
            if self.extend_hda_iso(other, i + 1, image, used) {
                return true;
            }
            image[i] = usize::MAX;
            used[u] = false;
        }
        false
    }

    /// GraphViz rendering of the 1-skeleton: vertices as nodes, edges as
    /// labelled arrows from lower to upper face, squares and higher cells as
    /// dashed boxes linked to their boundary edges.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph hda {\n");
        for (i, cell) in self.cells.iter().enumerate() {
            match cell.events.len() {
                0 => {
                    let mut attrs = String::from("shape=circle");
                    if self.start.contains(&i) {
                        attrs.push_str(" penwidth=2 color=green");
                    }
                    if self.accept.contains(&i) {
                        attrs.push_str(" peripheries=2");
                    }
                    out.push_str(&format!("  \"{}\" [{attrs}];\n", cell.id));
                }
                1 => {
                    out.push_str(&format!(
                        "  \"{}\" -> \"{}\" [label=\"{} ({})\"];\n",
                        self.cells[cell.d0[0]].id,
                        self.cells[cell.d1[0]].id,
                        cell.events.label(0),
                        cell.id
                    ));
                }
                _ => {
                    out.push_str(&format!(
                        "  \"{}\" [shape=box style=dashed label=\"{}:{}\"];\n",
                        cell.id, cell.id, cell.events
                    ));
                    for pos in 0..cell.events.len() {
                        for face in [cell.d0[pos], cell.d1[pos]] {
                            out.push_str(&format!(
                                "  \"{}\" -> \"{}\" [style=dotted arrowhead=none];\n",
                                cell.id, self.cells[face].id
                            ));
                        }
                    }
                }
            }
        }
        out.push_str("}\n");
        out
    }
}

/// A path: a start cell and a sequence of up/down moves.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HdaPath {
    pub start: usize,
    pub moves: Vec<PathMove>,
}

/// One move of a path; masks index positions of the bigger cell's conclist.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathMove {
    /// Into `to`, starting the events at the `starts` positions of `to`.
    Up { to: usize, starts: u64 },
    /// Out of the current cell, terminating its `ends` positions.
    Down { to: usize, ends: u64 },
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::event::Label;
    use crate::testutil::two_square_grid;

    fn labels(s: &[&str]) -> Conclist {
        s.iter().map(|l| Label::new(*l).unwrap()).collect()
    }

    #[test]
    fn validates_the_two_square_example() {
        let x = two_square_grid();
        assert_eq!(x.cell_count(), 15);
        let sq = x.cell_index("sq_ba").unwrap();
        assert_eq!(x.events(sq).to_string(), "(b a)");
        // Corner composition: removing both events at the lower side lands
        // in the bottom-left vertex.
        assert_eq!(x.cell_id(x.face(sq, 0, 0b11)), "v00");
        assert_eq!(x.cell_id(x.face(sq, 1, 0b11)), "v11");
    }

    #[test]
    fn rejects_broken_squares() {
        // A square whose right edge has the wrong label.
        let v = |id: &str| RawCell {
            id: id.into(),
            events: Conclist::empty(),
            d0: vec![],
            d1: vec![],
        };
        let e = |id: &str, l: &str, from: &str, to: &str| RawCell {
            id: id.into(),
            events: labels(&[l]),
            d0: vec![from.into()],
            d1: vec![to.into()],
        };
        let cells = vec![
            v("p"),
            v("q"),
            v("r"),
            v("s"),
            e("bottom", "a", "p", "q"),
            e("top", "a", "r", "s"),
            e("left", "b", "p", "r"),
            e("right", "b", "q", "s"),
            RawCell {
                id: "sq".into(),
                events: labels(&["a", "b"]),
                // d0[0] should be the edge where a has not started (left,
                // labelled b): point it at the wrong edge instead.
                d0: vec!["bottom".into(), "bottom".into()],
                d1: vec!["right".into(), "top".into()],
            },
        ];
        let err = Hda::new(cells, vec!["p".into()], vec!["s".into()]).unwrap_err();
        assert!(err
            .violations
            .iter()
            .any(|v| matches!(v, HdaViolation::FaceConclistMismatch { .. })));
    }

    #[test]
    fn paths_read_as_words() {
        let x = two_square_grid();
        let id = |s: &str| x.cell_index(s).unwrap();
        let path = HdaPath {
            start: id("v00"),
            moves: vec![
                PathMove::Up { to: id("e_b"), starts: 1 },
                PathMove::Down { to: id("v10"), ends: 1 },
                PathMove::Up { to: id("e_c"), starts: 1 },
                PathMove::Down { to: id("v20"), ends: 1 },
            ],
        };
        let word = x.ev_path(&path).unwrap();
        assert_eq!(word.to_string(), "[b.][.b][c.][.c]");

        // Through the square, starting b and a together.
        let path = HdaPath {
            start: id("v00"),
            moves: vec![
                PathMove::Up { to: id("sq_ba"), starts: 0b11 },
                PathMove::Down { to: id("v11"), ends: 0b11 },
            ],
        };
        let word = x.ev_path(&path).unwrap();
        assert_eq!(word.to_string(), "[b.|a.][.b|.a]");

        // The empty path is an identity.
        let trivial = HdaPath { start: id("v00"), moves: vec![] };
        assert_eq!(x.ev_path(&trivial).unwrap().to_string(), "[]");

        // A wrong face reference is rejected.
        let bad = HdaPath {
            start: id("v10"),
            moves: vec![PathMove::Up { to: id("sq_ca"), starts: 0b10 }],
        };
        assert!(matches!(
            x.ev_path(&bad),
            Err(HdaError::InvalidPath { at: 0, .. })
        ));
    }

    #[test]
    fn language_of_the_two_square_example() {
        let x = two_square_grid();
        let lang = x.language_bounded(8);
        let expected: BTreeSet<String> =
            std::iter::once("[b.][.b][c.][.c]".to_string()).collect();
        assert_eq!(lang, expected);
        // Nothing shorter reaches acceptance.
        assert!(x.language_bounded(3).is_empty());
    }

    #[test]
    fn isomorphism_of_renamed_copies() {
        let x = two_square_grid();
        assert!(x.isomorphic(&x));
        let y = crate::testutil::two_square_grid_renamed();
        assert!(x.isomorphic(&y));
    }
}
