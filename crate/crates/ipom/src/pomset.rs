//! Core ipomsets: validation, classification, interval recognition, gluing,
//! and isomorphism.
//!
//! An [`Ipomset`] owns its events (id + label), the precedence order `<`,
//! the event order `⇢`, and the source and target interfaces.  Both
//! relations are kept transitively closed; the constructor closes whatever
//! it is given and reports every violated axiom instead of stopping at the
//! first.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::event::{Conclist, EventId, Label};
use crate::rel::{Rel, MAX_EVENTS};

/// Which relation a violation talks about.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RelName {
    Precedence,
    EventOrder,
}

impl fmt::Display for RelName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RelName::Precedence => f.write_str("precedence"),
            RelName::EventOrder => f.write_str("event order"),
        }
    }
}

/// A single violated axiom, found while validating raw ipomset data.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Violation {
    #[error("too many events: {0} (at most {MAX_EVENTS})")]
    TooManyEvents(usize),
    #[error("duplicate event id {0}")]
    DuplicateEvent(EventId),
    #[error("unknown event id {0}")]
    UnknownEvent(EventId),
    #[error("{relation} relation is not a partial order: cycle {}", display_cycle(.cycle))]
    NotAPartialOrder { relation: RelName, cycle: Vec<EventId> },
    #[error("events {left} and {right} are related neither by precedence nor by event order")]
    NotTotal { left: EventId, right: EventId },
    #[error("interface violation at {event}: {reason}")]
    InterfaceViolation { event: EventId, reason: String },
}

fn display_cycle(cycle: &[EventId]) -> String {
    cycle
        .iter()
        .map(EventId::as_str)
        .collect::<Vec<_>>()
        .join(" < ")
}

/// Everything that went wrong during validation.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl fmt::Display for ValidationReport {
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

/// Errors from ipomset operations on already-valid data.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoreError {
    #[error("precedence is not an interval order")]
    NotInterval,
    #[error("gluing interface mismatch: expected {expected}, found {actual}")]
    InterfaceMismatch { expected: Conclist, actual: Conclist },
}

/// An interval pomset with interfaces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ipomset {
    ids: Vec<EventId>,
    labels: Vec<Label>,
    /// Strict precedence order, transitively closed.
    prec: Rel,
    /// Strict event order, transitively closed.  May relate comparable
    /// events too; only its restriction to concurrent pairs is essential.
    order: Rel,
    sources: u64,
    targets: u64,
}

impl Ipomset {
    /// Validates raw data and builds an ipomset.
    ///
    /// The relations may be given without their transitive closures; they
    /// are closed here.  On failure the report lists every violated axiom.
    pub fn new(
        events: Vec<(EventId, Label)>,
        precedence: &[(EventId, EventId)],
        event_order: &[(EventId, EventId)],
        sources: &[EventId],
        targets: &[EventId],
    ) -> Result<Ipomset, ValidationReport> {
        let mut violations = Vec::new();
        if events.len() > MAX_EVENTS {
            return Err(ValidationReport {
                violations: vec![Violation::TooManyEvents(events.len())],
            });
        }
        let n = events.len();
        let mut index = HashMap::new();
        let (ids, labels): (Vec<_>, Vec<_>) = events.into_iter().unzip();
        for (i, id) in ids.iter().enumerate() {
            if index.insert(id.clone(), i).is_some() {
                violations.push(Violation::DuplicateEvent(id.clone()));
            }
        }
        if !violations.is_empty() {
            return Err(ValidationReport { violations });
        }

        let resolve = |id: &EventId, violations: &mut Vec<Violation>| -> Option<usize> {
            match index.get(id) {
                Some(&i) => Some(i),
                None => {
                    violations.push(Violation::UnknownEvent(id.clone()));
                    None
                }
            }
        };

        let mut prec = Rel::new(n);
        for (a, b) in precedence {
            let (Some(i), Some(j)) = (
                resolve(a, &mut violations),
                resolve(b, &mut violations),
            ) else {
                continue;
            };
            prec.add(i, j);
        }
        let mut order = Rel::new(n);
        for (a, b) in event_order {
            let (Some(i), Some(j)) = (
                resolve(a, &mut violations),
                resolve(b, &mut violations),
            ) else {
                continue;
            };
            order.add(i, j);
        }
        let mut src_mask = 0u64;
        for s in sources {
            if let Some(i) = resolve(s, &mut violations) {
                src_mask |= 1 << i;
            }
        }
        let mut tgt_mask = 0u64;
        for t in targets {
            if let Some(i) = resolve(t, &mut violations) {
                tgt_mask |= 1 << i;
            }
        }
        if !violations.is_empty() {
            return Err(ValidationReport { violations });
        }

        prec.close_transitively();
        order.close_transitively();
        for (rel, name) in [(&prec, RelName::Precedence), (&order, RelName::EventOrder)] {
            if !rel.is_irreflexive() {
                let cycle = rel
                    .witness_cycle()
                    .unwrap_or_default()
                    .into_iter()
                    .map(|i| ids[i].clone())
                    .collect();
                violations.push(Violation::NotAPartialOrder { relation: name, cycle });
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                let related = prec.has(i, j)
                    || prec.has(j, i)
                    || order.has(i, j)
                    || order.has(j, i);
                if !related {
                    violations.push(Violation::NotTotal {
                        left: ids[i].clone(),
                        right: ids[j].clone(),
                    });
                }
            }
        }
        for i in 0..n {
            if src_mask & (1 << i) != 0 && prec.column(i) != 0 {
                violations.push(Violation::InterfaceViolation {
                    event: ids[i].clone(),
                    reason: "source event has a precedence predecessor".into(),
                });
            }
            if tgt_mask & (1 << i) != 0 && prec.row(i) != 0 {
                violations.push(Violation::InterfaceViolation {
                    event: ids[i].clone(),
                    reason: "target event has a precedence successor".into(),
                });
            }
        }
        if !violations.is_empty() {
            return Err(ValidationReport { violations });
        }
        Ok(Ipomset {
            ids,
            labels,
            prec,
            order,
            sources: src_mask,
            targets: tgt_mask,
        })
    }

    /// The empty ipomset.
    pub fn empty() -> Ipomset {
        Ipomset {
            ids: Vec::new(),
            labels: Vec::new(),
            prec: Rel::new(0),
            order: Rel::new(0),
            sources: 0,
            targets: 0,
        }
    }

    /// Internal constructor for data that is valid by construction
    /// (gluings, letter images).  Validity is asserted.
    pub(crate) fn from_closed_parts(
        ids: Vec<EventId>,
        labels: Vec<Label>,
        prec: Rel,
        order: Rel,
        sources: u64,
        targets: u64,
    ) -> Ipomset {
        let p = Ipomset { ids, labels, prec, order, sources, targets };
        p.assert_valid();
        p
    }

    fn assert_valid(&self) {
        let n = self.n();
        assert!(self.prec.is_irreflexive(), "precedence must be irreflexive");
        assert!(self.order.is_irreflexive(), "event order must be irreflexive");
        for i in 0..n {
            for j in 0..n {
                if self.prec.has(i, j) {
                    for k in 0..n {
                        if self.prec.has(j, k) {
                            assert!(self.prec.has(i, k), "precedence must be transitive");
                        }
                    }
                }
                if i != j {
                    assert!(
                        self.prec.has(i, j)
                            || self.prec.has(j, i)
                            || self.order.has(i, j)
                            || self.order.has(j, i),
                        "precedence and event order must relate all pairs"
                    );
                }
            }
            if self.sources & (1 << i) != 0 {
                assert_eq!(self.prec.column(i), 0, "sources must be minimal");
            }
            if self.targets & (1 << i) != 0 {
                assert_eq!(self.prec.row(i), 0, "targets must be maximal");
            }
        }
    }

    pub fn n(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn id(&self, i: usize) -> &EventId {
        &self.ids[i]
    }

    pub fn label(&self, i: usize) -> &Label {
        &self.labels[i]
    }

    pub fn ids(&self) -> &[EventId] {
        &self.ids
    }

    pub fn index_of(&self, id: &EventId) -> Option<usize> {
        self.ids.iter().position(|x| x == id)
    }

    /// Is `i < j` in the precedence order?
    pub fn precedes(&self, i: usize, j: usize) -> bool {
        self.prec.has(i, j)
    }

    /// Is `i ⇢ j` in the (stored) event order?
    pub fn event_order(&self, i: usize, j: usize) -> bool {
        self.order.has(i, j)
    }

    /// Are `i` and `j` concurrent (distinct and precedence-incomparable)?
    pub fn concurrent(&self, i: usize, j: usize) -> bool {
        i != j && !self.prec.has(i, j) && !self.prec.has(j, i)
    }

    pub fn sources_mask(&self) -> u64 {
        self.sources
    }

    pub fn targets_mask(&self) -> u64 {
        self.targets
    }

    pub(crate) fn prec_rel(&self) -> &Rel {
        &self.prec
    }

    pub(crate) fn order_rel(&self) -> &Rel {
        &self.order
    }

    /// All precedence pairs `(i, j)` with `i < j`, lexicographically.
    pub fn precedence_pairs(&self) -> Vec<(usize, usize)> {
        self.prec.pairs()
    }

    /// All event-order pairs `(i, j)` with `i` before `j`, lexicographically.
    pub fn event_order_pairs(&self) -> Vec<(usize, usize)> {
        self.order.pairs()
    }

    /// The events of `mask`, sorted by event order.  The mask must be an
    /// antichain, so the event order is total on it.
    pub(crate) fn order_sorted(&self, mask: u64) -> Vec<usize> {
        self.order.sort_total(mask)
    }

    /// A copy with the precedence pair `i < j` added and closed; the caller
    /// guarantees `j` is no source and `i` no target.
    pub(crate) fn with_precedence_added(&self, i: usize, j: usize) -> Ipomset {
        let mut prec = self.prec.clone();
        prec.add(i, j);
        prec.close_transitively();
        Ipomset::from_closed_parts(
            self.ids.clone(),
            self.labels.clone(),
            prec,
            self.order.clone(),
            self.sources,
            self.targets,
        )
    }

    /// Source events, in event order.
    pub fn source_events(&self) -> Vec<usize> {
        self.order_sorted(self.sources)
    }

    /// Target events, in event order.
    pub fn target_events(&self) -> Vec<usize> {
        self.order_sorted(self.targets)
    }

    fn conclist_of(&self, events: &[usize]) -> Conclist {
        events.iter().map(|&i| self.labels[i].clone()).collect()
    }

    /// The source interface as a conclist.
    pub fn source_interface(&self) -> Conclist {
        self.conclist_of(&self.source_events())
    }

    /// The target interface as a conclist.
    pub fn target_interface(&self) -> Conclist {
        self.conclist_of(&self.target_events())
    }

    /// Which of the special classes this ipomset belongs to.
    pub fn classify(&self) -> Classification {
        let full: u64 = if self.n() == 64 { !0 } else { (1 << self.n()) - 1 };
        let discrete = self.prec.count() == 0;
        Classification {
            discrete,
            pomset: self.sources == 0 && self.targets == 0,
            conclist: discrete && self.sources == 0 && self.targets == 0,
            starter: discrete && self.targets == full,
            terminator: discrete && self.sources == full,
            identity: discrete && self.sources == full && self.targets == full,
        }
    }

    /// The distinct predecessor sets, sorted by inclusion, if they form a
    /// chain — the defining property of interval orders.
    fn predecessor_chain(&self) -> Option<Vec<u64>> {
        let mut sets: Vec<u64> = (0..self.n()).map(|i| self.prec.column(i)).collect();
        sets.sort_by_key(|s| s.count_ones());
        sets.dedup();
        for w in sets.windows(2) {
            // Proper inclusion requires both a popcount increase and the
            // subset relation itself.
            if w[0].count_ones() == w[1].count_ones() || w[0] & !w[1] != 0 {
                return None;
            }
        }
        Some(sets)
    }

    /// Does the precedence order have an interval representation?
    pub fn is_interval(&self) -> bool {
        self.predecessor_chain().is_some()
    }

    /// Computes begin/end ranks for all events.
    ///
    /// Predecessor sets of an interval order form a chain under inclusion,
    /// and so do successor sets under reverse inclusion; both chains have the
    /// same length (the magnitude).  `begin` ranks predecessor sets along
    /// the first chain, `end` ranks successor sets along the second, and
    /// `i < j` holds if and only if `end(i) < begin(j)`.
    pub fn interval_representation(&self) -> Result<IntervalRep, CoreError> {
        let pred_chain = self.predecessor_chain().ok_or(CoreError::NotInterval)?;
        let mut succ_sets: Vec<u64> = (0..self.n()).map(|i| self.prec.row(i)).collect();
        succ_sets.sort_by_key(|s| std::cmp::Reverse(s.count_ones()));
        succ_sets.dedup();
        assert_eq!(
            pred_chain.len(),
            succ_sets.len(),
            "an interval order has as many predecessor sets as successor sets"
        );
        let begin: Vec<u32> = (0..self.n())
            .map(|i| {
                let d = self.prec.column(i);
                pred_chain.iter().position(|&s| s == d).unwrap() as u32
            })
            .collect();
        let end: Vec<u32> = (0..self.n())
            .map(|i| {
                let u = self.prec.row(i);
                succ_sets.iter().position(|&s| s == u).unwrap() as u32
            })
            .collect();
        let rep = IntervalRep {
            begin,
            end,
            magnitude: pred_chain.len() as u32,
        };
        for i in 0..self.n() {
            assert!(rep.begin[i] <= rep.end[i], "events must span an interval");
            for j in 0..self.n() {
                if i != j {
                    assert_eq!(
                        self.prec.has(i, j),
                        rep.end[i] < rep.begin[j],
                        "ranks must realize the precedence order"
                    );
                }
            }
        }
        Ok(rep)
    }

    /// Glues `self` before `q`: the target interface of `self` is matched
    /// with the source interface of `q` (same labels in the same event
    /// order), interface events are identified, and every non-interface
    /// event of `self` precedes every non-interface event of `q`.
    pub fn glue(&self, q: &Ipomset) -> Result<Ipomset, CoreError> {
        let tp = self.target_events();
        let sq = q.source_events();
        let expected = self.conclist_of(&tp);
        let actual = q.conclist_of(&sq);
        if expected != actual {
            return Err(CoreError::InterfaceMismatch { expected, actual });
        }

        let np = self.n();
        // Map q's events into the glued index space: interface events land
        // on self's target events, the rest are appended.
        let mut q_map = vec![usize::MAX; q.n()];
        for (k, &j) in sq.iter().enumerate() {
            q_map[j] = tp[k];
        }
        let mut ids = self.ids.clone();
        let mut labels = self.labels.clone();
        for j in 0..q.n() {
            if q_map[j] != usize::MAX {
                continue;
            }
            q_map[j] = ids.len();
            let mut id = q.ids[j].clone();
            while ids.contains(&id) {
                id = EventId::new(format!("{}'", id.as_str())).unwrap();
            }
            ids.push(id);
            labels.push(q.labels[j].clone());
        }

        let n = ids.len();
        assert!(n <= MAX_EVENTS, "glued ipomset exceeds {MAX_EVENTS} events");
        let mut prec = Rel::new(n);
        let mut order = Rel::new(n);
        for (i, j) in self.prec.pairs() {
            prec.add(i, j);
        }
        for (i, j) in q.prec.pairs() {
            prec.add(q_map[i], q_map[j]);
        }
        // Every finished event of self precedes every fresh event of q.
        for i in 0..np {
            if self.targets & (1 << i) != 0 {
                continue;
            }
            for (j, &jm) in q_map.iter().enumerate() {
                if q.sources & (1 << j) == 0 {
                    prec.add(i, jm);
                }
            }
        }
        for (i, j) in self.order.pairs() {
            order.add(i, j);
        }
        for (i, j) in q.order.pairs() {
            order.add(q_map[i], q_map[j]);
        }
        prec.close_transitively();
        order.close_transitively();

        let mut targets = 0u64;
        for j in 0..q.n() {
            if q.targets & (1 << j) != 0 {
                targets |= 1 << q_map[j];
            }
        }
        let glued =
            Ipomset::from_closed_parts(ids, labels, prec, order, self.sources, targets);
        if self.is_interval() && q.is_interval() {
            assert!(glued.is_interval(), "gluing must preserve interval orders");
        }
        Ok(glued)
    }

    /// Finds the (unique, if any) isomorphism onto `other`: a bijection that
    /// preserves labels, interfaces, precedence in both directions, and the
    /// event order on concurrent pairs.
    pub fn isomorphic(&self, other: &Ipomset) -> Option<EventBijection> {
        if self.n() != other.n()
            || self.sources.count_ones() != other.sources.count_ones()
            || self.targets.count_ones() != other.targets.count_ones()
            || self.prec.count() != other.prec.count()
        {
            return None;
        }
        let n = self.n();
        let mut image = vec![usize::MAX; n];
        let mut used = vec![false; n];
        if !self.extend_iso(other, 0, &mut image, &mut used) {
            return None;
        }
        Some(EventBijection::from_indices(self, other, &image))
    }

    fn extend_iso(
        &self,
        other: &Ipomset,
        i: usize,
        image: &mut [usize],
        used: &mut [bool],
    ) -> bool {
        let n = self.n();
        if i == n {
            return true;
        }
        'candidates: for u in 0..n {
            if used[u]
                || self.labels[i] != other.labels[u]
                || (self.sources >> i) & 1 != (other.sources >> u) & 1
                || (self.targets >> i) & 1 != (other.targets >> u) & 1
            {
                continue;
            }
            for j in 0..i {
                let v = image[j];
                if self.prec.has(i, j) != other.prec.has(u, v)
                    || self.prec.has(j, i) != other.prec.has(v, u)
                {
                    continue 'candidates;
                }
                if self.concurrent(i, j)
                    && (self.order.has(i, j) != other.order.has(u, v)
                        || self.order.has(j, i) != other.order.has(v, u))
                {
                    continue 'candidates;
                }
            }
            image[i] = u;
            used[u] = true;
            if self.extend_iso(other, i + 1, image, used) {
                return true;
            }
            image[i] = usize::MAX;
            used[u] = false;
        }
        false
    }

    /// GraphViz rendering: solid arrows for the precedence Hasse diagram,
    /// dashed arrows for the event order on concurrent pairs.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph ipomset {\n  rankdir=LR;\n");
        for i in 0..self.n() {
            let mut marks = String::new();
            if self.sources & (1 << i) != 0 {
                marks.push_str(" src");
            }
            if self.targets & (1 << i) != 0 {
                marks.push_str(" tgt");
            }
            out.push_str(&format!(
                "  \"{}\" [label=\"{}:{}{}\"];\n",
                self.ids[i], self.ids[i], self.labels[i], marks
            ));
        }
        for (i, j) in self.prec.pairs() {
            // Hasse reduction: skip pairs with an intermediate event.
            let covered =
                (0..self.n()).any(|k| self.prec.has(i, k) && self.prec.has(k, j));
            if !covered {
                out.push_str(&format!("  \"{}\" -> \"{}\";\n", self.ids[i], self.ids[j]));
            }
        }
        for (i, j) in self.order.pairs() {
            if self.concurrent(i, j) {
                out.push_str(&format!(
                    "  \"{}\" -> \"{}\" [style=dashed];\n",
                    self.ids[i], self.ids[j]
                ));
            }
        }
        out.push_str("}\n");
        out
    }
}

impl fmt::Display for Ipomset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "events:")?;
        for i in 0..self.n() {
            write!(f, " {}:{}", self.ids[i], self.labels[i])?;
        }
        write!(f, "; precedence:")?;
        for (i, j) in self.prec.pairs() {
            write!(f, " {}<{}", self.ids[i], self.ids[j])?;
        }
        write!(f, "; order:")?;
        for (i, j) in self.order.pairs() {
            if self.concurrent(i, j) {
                write!(f, " {}->{}", self.ids[i], self.ids[j])?;
            }
        }
        let names = |mask: u64| -> String {
            (0..self.n())
                .filter(|i| mask & (1 << i) != 0)
                .map(|i| self.ids[i].to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        write!(
            f,
            "; sources: {{{}}}; targets: {{{}}}",
            names(self.sources),
            names(self.targets)
        )
    }
}

/// Membership of an ipomset in the special subclasses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Classification {
    /// No two events are precedence-comparable.
    pub discrete: bool,
    /// Both interfaces are empty.
    pub pomset: bool,
    /// Discrete with empty interfaces.
    pub conclist: bool,
    /// Discrete and every event is a target: starts the non-source events.
    pub starter: bool,
    /// Discrete and every event is a source: terminates the non-targets.
    pub terminator: bool,
    /// Starter and terminator at once: changes nothing.
    pub identity: bool,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut kinds = Vec::new();
        for (flag, name) in [
            (self.discrete, "discrete"),
            (self.pomset, "pomset"),
            (self.conclist, "conclist"),
            (self.starter, "starter"),
            (self.terminator, "terminator"),
            (self.identity, "identity"),
        ] {
            if flag {
                kinds.push(name);
            }
        }
        if kinds.is_empty() {
            f.write_str("general")
        } else {
            f.write_str(&kinds.join(" "))
        }
    }
}

/// Interval ranks for an interval ipomset; see
/// [`Ipomset::interval_representation`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntervalRep {
    begin: Vec<u32>,
    end: Vec<u32>,
    magnitude: u32,
}

impl IntervalRep {
    pub fn begin(&self, i: usize) -> u32 {
        self.begin[i]
    }

    pub fn end(&self, i: usize) -> u32 {
        self.end[i]
    }

    /// The number of distinct predecessor (equally, successor) sets.
    pub fn magnitude(&self) -> u32 {
        self.magnitude
    }

    /// The `rank`-th maximal antichain: all events whose interval covers
    /// `rank`.
    pub fn antichain_mask(&self, rank: u32) -> u64 {
        let mut mask = 0u64;
        for i in 0..self.begin.len() {
            if self.begin[i] <= rank && rank <= self.end[i] {
                mask |= 1 << i;
            }
        }
        mask
    }
}

/// A label- and structure-preserving bijection between the events of two
/// ipomsets, listed in the event index order of the first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventBijection {
    pairs: Vec<(EventId, EventId)>,
}

impl EventBijection {
    pub(crate) fn from_indices(p: &Ipomset, q: &Ipomset, image: &[usize]) -> EventBijection {
        EventBijection {
            pairs: image
                .iter()
                .enumerate()
                .map(|(i, &u)| (p.id(i).clone(), q.id(u).clone()))
                .collect(),
        }
    }

    pub fn pairs(&self) -> &[(EventId, EventId)] {
        &self.pairs
    }

    pub fn image_of(&self, id: &EventId) -> Option<&EventId> {
        self.pairs.iter().find(|(a, _)| a == id).map(|(_, b)| b)
    }
}

impl fmt::Display for EventBijection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (a, b)) in self.pairs.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{a}->{b}")?;
        }
        Ok(())
    }
}
