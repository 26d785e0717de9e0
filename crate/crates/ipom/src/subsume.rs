//! Subsumption: when one ipomset refines another by having more order.
//!
//! `P ⊑ Q` holds when a bijection from `P` to `Q` preserves labels,
//! interfaces, and the essential event order, and *reflects* precedence:
//! whatever is ordered in `Q` was already ordered in `P`.  On step words the
//! same relation is generated by *transpositions* of adjacent letters
//! ([`transpose`]): swapping two starters or two terminators stays in the
//! same equivalence class, swapping a starter past a terminator adds order,
//! and the converse swap removes it.  [`subsumption_chain`] makes the
//! relation effective: it connects the dense decompositions of two
//! comparable ipomsets by a sequence of such transpositions, removing one
//! precedence pair at a time, and [`elementary_extensions`] lists the
//! one-pair refinements of an ipomset.

use std::collections::{HashMap, VecDeque};

use thiserror::Error;

use crate::event::Conclist;
use crate::pomset::{CoreError, EventBijection, Ipomset};
use crate::rel::Rel;
use crate::steps::{self, psi, Kind, StepLetter, Word};

/// Inputs to the search routines may have at most this many events.
pub const MAX_SEARCH_EVENTS: usize = 8;

/// Node budget for the breadth-first searches over dense words.
const SEARCH_NODE_CAP: usize = 500_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SubsumeError {
    #[error("transposition does not apply at position {index}: {reason}")]
    NotApplicable { index: usize, reason: String },
    #[error("input too large for the search: {detail}")]
    SizeLimitExceeded { detail: String },
    #[error("invalid chain at step {step}: {reason}")]
    InvalidChain { step: usize, reason: String },
    #[error(transparent)]
    Core(#[from] CoreError),
}

/// Finds the subsumption witness `P ⊑ Q`, if any: a bijection preserving
/// labels, interfaces and the event order on `P`-concurrent pairs, such
/// that any two events ordered in `Q` are ordered the same way in `P`.
pub fn is_subsumption(p: &Ipomset, q: &Ipomset) -> Option<EventBijection> {
    let image = subsumption_indices(p, q)?;
    Some(EventBijection::from_indices(p, q, &image))
}

/// Index-level subsumption witness; `result[i]` is the `q`-index of `p`'s
/// event `i`.
pub(crate) fn subsumption_indices(p: &Ipomset, q: &Ipomset) -> Option<Vec<usize>> {
    if p.n() != q.n()
        || p.sources_mask().count_ones() != q.sources_mask().count_ones()
        || p.targets_mask().count_ones() != q.targets_mask().count_ones()
        || p.prec_rel().count() < q.prec_rel().count()
    {
        return None;
    }
    let n = p.n();
    let mut image = vec![usize::MAX; n];
    let mut used = vec![false; n];
    if extend_subsumption(p, q, 0, &mut image, &mut used) {
        Some(image)
    } else {
        None
    }
}

fn extend_subsumption(
    p: &Ipomset,
    q: &Ipomset,
    i: usize,
    image: &mut [usize],
    used: &mut [bool],
) -> bool {
    let n = p.n();
    if i == n {
        return true;
    }
    'candidates: for u in 0..n {
        if used[u]
            || p.label(i) != q.label(u)
            || (p.sources_mask() >> i) & 1 != (q.sources_mask() >> u) & 1
            || (p.targets_mask() >> i) & 1 != (q.targets_mask() >> u) & 1
        {
            continue;
        }
        for j in 0..i {
            let v = image[j];
            // Order in q must come from order in p, in the same direction.
            if (q.precedes(u, v) && !p.precedes(i, j))
                || (q.precedes(v, u) && !p.precedes(j, i))
            {
                continue 'candidates;
            }
            // Concurrent pairs of p keep their essential event order.
            if p.concurrent(i, j)
                && (p.event_order(i, j) != q.event_order(u, v)
                    || p.event_order(j, i) != q.event_order(v, u))
            {
                continue 'candidates;
            }
        }
        image[i] = u;
        used[u] = true;
        if extend_subsumption(p, q, i + 1, image, used) {
            return true;
        }
        image[i] = usize::MAX;
        used[u] = false;
    }
    false
}

/// Decides `Ψ(v) ⊑ Ψ(w)` for two words.
pub fn leq_words(v: &Word, w: &Word) -> bool {
    is_subsumption(&psi(v), &psi(w)).is_some()
}

/// The four shapes an adjacent transposition can take.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransCase {
    /// Two starters: reorders starts, same ipomset.
    SS,
    /// Two terminators: reorders ends, same ipomset.
    TT,
    /// Starter before terminator becomes terminator before starter: the
    /// terminated events now precede the started ones (adds order).
    ST,
    /// Terminator before starter becomes starter before terminator: the
    /// events overlap afterwards (removes order).
    TS,
}

impl std::fmt::Display for TransCase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            TransCase::SS => "SS",
            TransCase::TT => "TT",
            TransCase::ST => "ST",
            TransCase::TS => "TS",
        };
        f.write_str(s)
    }
}

/// Positions of `mask` after deleting the positions of `removed`.
pub(crate) fn remap_mask(mask: u64, removed: u64) -> u64 {
    debug_assert_eq!(mask & removed, 0);
    let mut out = 0u64;
    let mut m = mask;
    while m != 0 {
        let p = m.trailing_zeros() as u64;
        m &= m - 1;
        let below = (removed & ((1u64 << p) - 1)).count_ones() as u64;
        out |= 1 << (p - below);
    }
    out
}

/// Positions of `mask` (over the carrier-without-`removed`) pushed back into
/// the full carrier.
pub(crate) fn unremap_mask(mask: u64, removed: u64, carrier_len: usize) -> u64 {
    let kept: Vec<u64> = (0..carrier_len as u64)
        .filter(|p| removed & (1 << p) == 0)
        .collect();
    let mut out = 0u64;
    let mut m = mask;
    while m != 0 {
        let p = m.trailing_zeros() as usize;
        m &= m - 1;
        out |= 1 << kept[p];
    }
    out
}

/// Reads a letter's kind, letting identities assume whatever their
/// neighbour needs.
fn effective_kinds(a: &StepLetter, b: &StepLetter) -> (Kind, Kind) {
    match (a.is_identity(), b.is_identity()) {
        (true, true) => (Kind::Starter, Kind::Starter),
        (true, false) => (b.kind(), b.kind()),
        (false, true) => (a.kind(), a.kind()),
        (false, false) => (a.kind(), b.kind()),
    }
}

/// Transposes the letters at positions `i` and `i+1` (1-based `i`).
///
/// * two starters `↑_A(U∖B) ↑_B U` become `↑_B(U∖A) ↑_A U`;
/// * two terminators `↓_A U ↓_B(U∖A)` become `↓_B U ↓_A(U∖B)`;
/// * starter then terminator `↑_A U ↓_B U` (with `A`, `B` disjoint) becomes
///   `↓_B(U∖A) ↑_A(U∖B)` — the `B`-events now precede the `A`-events;
/// * terminator then starter `↓_A(U∖B) ↑_B(U∖A)` becomes `↑_B U ↓_A U`,
///   merging the carriers with the terminated `A`-events placed before the
///   started `B`-events between common anchors.
pub fn transpose(word: &Word, i: usize) -> Result<(Word, TransCase), SubsumeError> {
    if i == 0 || i >= word.len() {
        return Err(SubsumeError::NotApplicable {
            index: i,
            reason: format!("word has {} letters", word.len()),
        });
    }
    let a = &word.letters()[i - 1];
    let b = &word.letters()[i];
    let (ka, kb) = effective_kinds(a, b);
    let (first, second, case) = match (ka, kb) {
        (Kind::Starter, Kind::Starter) => {
            // a = ↑_A(U∖B), b = ↑_B U.
            let u = b.carrier();
            let a_in_u = unremap_mask(a.marked_mask(), b.marked_mask(), u.len());
            let first = StepLetter::starter(
                u.without(a_in_u),
                remap_mask(b.marked_mask(), a_in_u),
            )
            .unwrap();
            let second = StepLetter::starter(u.clone(), a_in_u).unwrap();
            (first, second, TransCase::SS)
        }
        (Kind::Terminator, Kind::Terminator) => {
            // a = ↓_A U, b = ↓_B(U∖A).
            let u = a.carrier();
            let b_in_u = unremap_mask(b.marked_mask(), a.marked_mask(), u.len());
            let first = StepLetter::terminator(u.clone(), b_in_u).unwrap();
            let second = StepLetter::terminator(
                u.without(b_in_u),
                remap_mask(a.marked_mask(), b_in_u),
            )
            .unwrap();
            (first, second, TransCase::TT)
        }
        (Kind::Starter, Kind::Terminator) => {
            // a = ↑_A U, b = ↓_B U on the same carrier.
            if a.marked_mask() & b.marked_mask() != 0 {
                return Err(SubsumeError::NotApplicable {
                    index: i,
                    reason: "started and terminated events overlap".into(),
                });
            }
            let u = a.carrier();
            let first = StepLetter::terminator(
                u.without(a.marked_mask()),
                remap_mask(b.marked_mask(), a.marked_mask()),
            )
            .unwrap();
            let second = StepLetter::starter(
                u.without(b.marked_mask()),
                remap_mask(a.marked_mask(), b.marked_mask()),
            )
            .unwrap();
            (first, second, TransCase::ST)
        }
        (Kind::Terminator, Kind::Starter) => {
            // a = ↓_A(U∖B), b = ↑_B(U∖A): merge the carriers on their
            // common events, terminated events first in between.
            let v1 = a.carrier();
            let v2 = b.carrier();
            let anchors1: Vec<usize> = (0..v1.len())
                .filter(|p| a.marked_mask() & (1 << p) == 0)
                .collect();
            let anchors2: Vec<usize> = (0..v2.len())
                .filter(|p| b.marked_mask() & (1 << p) == 0)
                .collect();
            debug_assert_eq!(anchors1.len(), anchors2.len());
            let mut labels = Vec::new();
            let mut a_in_u = 0u64;
            let mut b_in_u = 0u64;
            let (mut i1, mut i2) = (0, 0);
            for k in 0..=anchors1.len() {
                let stop1 = anchors1.get(k).copied().unwrap_or(v1.len());
                let stop2 = anchors2.get(k).copied().unwrap_or(v2.len());
                while i1 < stop1 {
                    a_in_u |= 1 << labels.len();
                    labels.push(v1.label(i1).clone());
                    i1 += 1;
                }
                while i2 < stop2 {
                    b_in_u |= 1 << labels.len();
                    labels.push(v2.label(i2).clone());
                    i2 += 1;
                }
                if k < anchors1.len() {
                    labels.push(v1.label(i1).clone());
                    i1 += 1;
                    i2 += 1;
                }
            }
            let u = Conclist::new(labels);
            let first = StepLetter::starter(u.clone(), b_in_u).unwrap();
            let second = StepLetter::terminator(u, a_in_u).unwrap();
            (first, second, TransCase::TS)
        }
    };
    let mut letters = word.letters().to_vec();
    letters[i - 1] = first;
    letters[i] = second;
    let word = Word::new(letters).map_err(|e| SubsumeError::NotApplicable {
        index: i,
        reason: e.to_string(),
    })?;
    Ok((word, case))
}

/// One transposition in a chain: the 1-based letter position and the case.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TranspositionStep {
    pub index: usize,
    pub case: TransCase,
}

/// A witnessing path of transpositions: `words[k+1]` arises from `words[k]`
/// by the transposition `steps[k]`.  The first word is the dense
/// decomposition of the finer ipomset, the last a dense word of the coarser
/// one; SS/TT steps stay in the same class and every TS step removes
/// exactly one precedence pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsumptionChain {
    pub words: Vec<Word>,
    pub steps: Vec<TranspositionStep>,
}

/// Checks that a chain is literally a sequence of valid transpositions.
///
/// SS, TT and ST steps must match [`transpose`] exactly; TS steps may use
/// any interleaving of the merged carrier, so they are checked structurally
/// (kinds, carriers, interfaces, marked labels) and semantically (the step
/// coarsens the denoted ipomset).
pub fn validate_chain(chain: &SubsumptionChain) -> Result<(), SubsumeError> {
    if chain.words.len() != chain.steps.len() + 1 {
        return Err(SubsumeError::InvalidChain {
            step: 0,
            reason: "a chain needs one more word than steps".into(),
        });
    }
    for (k, step) in chain.steps.iter().enumerate() {
        let before = &chain.words[k];
        let after = &chain.words[k + 1];
        let err = |reason: &str| SubsumeError::InvalidChain {
            step: k,
            reason: reason.to_string(),
        };
        if before.len() != after.len() {
            return Err(err("transpositions preserve the number of letters"));
        }
        let i = step.index;
        if i == 0 || i >= before.len() {
            return Err(err("step index out of range"));
        }
        for pos in 0..before.len() {
            if pos != i - 1 && pos != i && before.letters()[pos] != after.letters()[pos] {
                return Err(err("letters away from the step position changed"));
            }
        }
        match step.case {
            TransCase::SS | TransCase::TT | TransCase::ST => {
                let (expected, case) = transpose(before, i)?;
                if case != step.case {
                    return Err(err("recorded case does not match the letters"));
                }
                if expected != *after {
                    return Err(err("result does not match the transposition"));
                }
            }
            TransCase::TS => {
                let a = &before.letters()[i - 1];
                let b = &before.letters()[i];
                let a2 = &after.letters()[i - 1];
                let b2 = &after.letters()[i];
                let (ka, kb) = effective_kinds(a, b);
                if (ka, kb) != (Kind::Terminator, Kind::Starter) {
                    return Err(err("TS step must act on terminator then starter"));
                }
                if !a2.has_kind(Kind::Starter)
                    || !b2.has_kind(Kind::Terminator)
                    || a2.carrier() != b2.carrier()
                {
                    return Err(err("TS step must produce starter then terminator on one carrier"));
                }
                if a2.source() != a.source() || b2.target() != b.target() {
                    return Err(err("TS step must preserve the outer interfaces"));
                }
                let marked_labels = |l: &StepLetter| -> Vec<String> {
                    l.marked_positions()
                        .into_iter()
                        .map(|p| l.carrier().label(p).to_string())
                        .collect()
                };
                if marked_labels(a2) != marked_labels(b) || marked_labels(b2) != marked_labels(a) {
                    return Err(err("TS step must start and terminate the same events"));
                }
                let old = psi(&Word::new(vec![a.clone(), b.clone()]).map_err(|_| err("incoherent"))?);
                let new = psi(&Word::new(vec![a2.clone(), b2.clone()]).map_err(|_| err("incoherent"))?);
                if is_subsumption(&old, &new).is_none() {
                    return Err(err("TS step must remove order"));
                }
            }
        }
    }
    Ok(())
}

/// Dense words as sequences of event starts and ends, in the index space of
/// a fixed ipomset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Act {
    Start(u8),
    End(u8),
}

impl Act {
    fn kind(self) -> Kind {
        match self {
            Act::Start(_) => Kind::Starter,
            Act::End(_) => Kind::Terminator,
        }
    }
}

/// Enabledness data for the action system of an ipomset: an event may start
/// once its predecessors have ended, and may end once all events concurrent
/// with it have started.
struct ActSystem {
    n: usize,
    sources: u64,
    targets: u64,
    preds: Vec<u64>,
    conc: Vec<u64>,
}

impl ActSystem {
    fn of(p: &Ipomset) -> ActSystem {
        let n = p.n();
        let preds: Vec<u64> = (0..n).map(|i| p.prec_rel().column(i)).collect();
        let conc: Vec<u64> = (0..n)
            .map(|i| {
                let mut mask = 0u64;
                for j in 0..n {
                    if p.concurrent(i, j) {
                        mask |= 1 << j;
                    }
                }
                mask
            })
            .collect();
        ActSystem {
            n,
            sources: p.sources_mask(),
            targets: p.targets_mask(),
            preds,
            conc,
        }
    }

    fn full(&self) -> u64 {
        if self.n == 64 {
            !0
        } else {
            (1u64 << self.n) - 1
        }
    }

    fn can_start(&self, started: u64, ended: u64, y: usize) -> bool {
        started & (1 << y) == 0 && self.preds[y] & !ended == 0
    }

    fn can_end(&self, started: u64, ended: u64, x: usize) -> bool {
        started & (1 << x) != 0
            && ended & (1 << x) == 0
            && self.targets & (1 << x) == 0
            && self.conc[x] & !started == 0
    }
}

/// Builds the word of an action sequence, sorting carriers by `order`.
fn word_from_acts(p: &Ipomset, order: &Rel, sources: u64, acts: &[Act]) -> Word {
    if acts.is_empty() {
        let events = order.sort_total(sources);
        let carrier: Conclist = events.iter().map(|&e| p.label(e).clone()).collect();
        return Word::identity(carrier);
    }
    let mut active = sources;
    let mut letters = Vec::with_capacity(acts.len());
    for &act in acts {
        let (kind, event) = match act {
            Act::Start(e) => {
                active |= 1 << e;
                (Kind::Starter, e as usize)
            }
            Act::End(e) => (Kind::Terminator, e as usize),
        };
        letters.push(steps::letter_by_rel(p, order, kind, active, 1 << event));
        if let Act::End(e) = act {
            active &= !(1 << e);
        }
    }
    Word::new(letters).expect("valid action sequences yield coherent words")
}

/// The canonical dense action sequence of `p`: its sparse steps split one
/// event at a time in carrier order.
fn dense_acts(p: &Ipomset) -> Result<Vec<Act>, CoreError> {
    let mut acts = Vec::new();
    for (kind, _, marked) in steps::sparse_steps_indexed(p)? {
        for e in p.order_sorted(marked) {
            acts.push(match kind {
                Kind::Starter => Act::Start(e as u8),
                Kind::Terminator => Act::End(e as u8),
            });
        }
    }
    Ok(acts)
}

fn guard_size(p: &Ipomset, what: &str) -> Result<(), SubsumeError> {
    if p.n() > MAX_SEARCH_EVENTS {
        return Err(SubsumeError::SizeLimitExceeded {
            detail: format!(
                "{what} handles at most {MAX_SEARCH_EVENTS} events, got {}",
                p.n()
            ),
        });
    }
    Ok(())
}

/// All one-pair refinements of `p`: the ipomsets reachable by a single
/// order-adding (ST) transposition from some dense word of `p`.
///
/// A pair `x ∥ y` can be ordered `x < y` exactly when some valid dense word
/// of `p` starts `y` immediately after ending `x`; rather than enumerating
/// words, this walks the reachable (started, ended) states of the action
/// system forwards and backwards and tests the adjacency locally.  Results
/// are sorted and deduplicated by canonical key.
pub fn elementary_extensions(p: &Ipomset) -> Result<Vec<Ipomset>, SubsumeError> {
    guard_size(p, "elementary_extensions")?;
    if !p.is_interval() {
        return Err(SubsumeError::Core(CoreError::NotInterval));
    }
    let sys = ActSystem::of(p);
    let full = sys.full();
    let final_state = (full, full & !sys.targets);

    // Forward reachability from (sources, ∅).
    let mut reachable = std::collections::HashSet::new();
    let mut queue = VecDeque::new();
    reachable.insert((sys.sources, 0u64));
    queue.push_back((sys.sources, 0u64));
    while let Some((st, en)) = queue.pop_front() {
        for e in 0..sys.n {
            let mut nexts = Vec::new();
            if sys.can_start(st, en, e) {
                nexts.push((st | (1 << e), en));
            }
            if sys.can_end(st, en, e) {
                nexts.push((st, en | (1 << e)));
            }
            for next in nexts {
                if reachable.insert(next) {
                    queue.push_back(next);
                }
            }
        }
    }

    // Backward reachability from the final state: undoing a start or an end
    // must leave it enabled and not break an overlap already committed.
    let mut coreachable = std::collections::HashSet::new();
    let mut queue = VecDeque::new();
    coreachable.insert(final_state);
    queue.push_back(final_state);
    while let Some((st, en)) = queue.pop_front() {
        for e in 0..sys.n {
            let bit = 1u64 << e;
            if st & bit != 0
                && sys.sources & bit == 0
                && en & bit == 0
                && sys.preds[e] & !en == 0
                && sys.conc[e] & en == 0
            {
                let prev = (st & !bit, en);
                if coreachable.insert(prev) {
                    queue.push_back(prev);
                }
            }
            if en & bit != 0 && sys.can_end(st, en & !bit, e) {
                let prev = (st, en & !bit);
                if coreachable.insert(prev) {
                    queue.push_back(prev);
                }
            }
        }
    }

    // An adjacency ↑{y} ↓{x} is realizable iff some reachable state enables
    // the start, then the end, and the result can still complete.
    let mut results: Vec<(String, Ipomset)> = Vec::new();
    for &(st, en) in &reachable {
        for y in 0..sys.n {
            if !sys.can_start(st, en, y) {
                continue;
            }
            let st2 = st | (1 << y);
            for x in 0..sys.n {
                if x == y || !sys.can_end(st2, en, x) {
                    continue;
                }
                if !coreachable.contains(&(st2, en | (1 << x))) {
                    continue;
                }
                debug_assert!(p.concurrent(x, y));
                let r = p.with_precedence_added(x, y);
                debug_assert!(r.is_interval());
                let key = steps::canonical_key(&r).expect("extensions stay interval");
                if !results.iter().any(|(k, _)| *k == key) {
                    results.push((key, r));
                }
            }
        }
    }
    results.sort_by(|(k1, _), (k2, _)| k1.cmp(k2));
    Ok(results.into_iter().map(|(_, r)| r).collect())
}

/// Connects the dense decomposition of `p` to a dense word of `q` by
/// transpositions, provided `p ⊑ q`; returns `None` when no witness exists.
///
/// While some precedence pair of `p` is missing in `q`, a removable such
/// pair (one whose end and start no other act is forced between) is
/// dropped: SS/TT swaps rearrange the current dense word until the pair's
/// end and start are adjacent, then one TS step makes them overlap.
/// Removing a removable pair leaves the witness intact, so a removable
/// missing pair keeps existing until none are missing.
pub fn subsumption_chain(
    p: &Ipomset,
    q: &Ipomset,
) -> Result<Option<SubsumptionChain>, SubsumeError> {
    guard_size(p, "subsumption_chain")?;
    let Some(f) = subsumption_indices(p, q) else {
        return Ok(None);
    };
    // Pull q's relations back along the witness so everything lives in p's
    // index space.
    let n = p.n();
    let mut prec_q = Rel::new(n);
    let mut order_q = Rel::new(n);
    for i in 0..n {
        for j in 0..n {
            if i != j {
                if q.precedes(f[i], f[j]) {
                    prec_q.add(i, j);
                }
                if q.event_order(f[i], f[j]) {
                    order_q.add(i, j);
                }
            }
        }
    }

    let mut remaining = p.prec_rel().clone();
    let mut acts = dense_acts(p)?;
    let mut words = vec![word_from_acts(p, &order_q, p.sources_mask(), &acts)];
    let mut steps_taken = Vec::new();
    let (sources, targets) = (p.sources_mask(), p.targets_mask());

    loop {
        let missing: Vec<(usize, usize)> = remaining
            .pairs()
            .into_iter()
            .filter(|&(i, j)| !prec_q.has(i, j))
            .collect();
        if missing.is_empty() {
            break;
        }
        // Any removable missing pair will do: the intermediate ipomset
        // still refines q, so by induction a removable pair exists as long
        // as any pair is missing — greedy removal cannot dead-end.
        let &(x, y) = missing
            .iter()
            .find(|&&(x, y)| pair_removable(&remaining, sources, targets, n, x, y))
            .expect("a strict refinement always has a removable extra pair");

        // Rearrange by same-kind swaps until End(x) Start(y) are adjacent.
        let swaps = find_adjacency_swaps(&acts, x, y)?;
        for pos in swaps {
            let case = match acts[pos].kind() {
                Kind::Starter => TransCase::SS,
                Kind::Terminator => TransCase::TT,
            };
            acts.swap(pos, pos + 1);
            words.push(word_from_acts(p, &order_q, p.sources_mask(), &acts));
            steps_taken.push(TranspositionStep { index: pos + 1, case });
        }
        let j = (0..acts.len() - 1)
            .find(|&j| acts[j] == Act::End(x as u8) && acts[j + 1] == Act::Start(y as u8))
            .expect("swap search ends with the pair adjacent");
        acts.swap(j, j + 1);
        remaining.remove(x, y);
        words.push(word_from_acts(p, &order_q, p.sources_mask(), &acts));
        steps_taken.push(TranspositionStep {
            index: j + 1,
            case: TransCase::TS,
        });
    }

    let chain = SubsumptionChain {
        words,
        steps: steps_taken,
    };
    debug_assert!(validate_chain(&chain).is_ok());
    Ok(Some(chain))
}

/// Whether the precedence pair `(x, y)` can be dropped by one TS
/// transposition of some dense word of the ipomset whose precedence is
/// `prec`: true exactly when no act is forced strictly between `End(x)`
/// and `Start(y)`.
///
/// Dense words are the linear extensions of the order on acts generated by
/// `Start(e) < End(e)`, `End(i) < Start(j)` for `i < j`, and
/// `Start(i) < End(j)` whenever `j` does not precede `i` (their intervals
/// overlap).  `End(x)` and `Start(y)` are adjacent in some extension
/// exactly when nothing lies strictly between them.  Sources have no start
/// act and targets no end act.
fn pair_removable(prec: &Rel, sources: u64, targets: u64, n: usize, x: usize, y: usize) -> bool {
    let start = |e: usize| 2 * e;
    let end = |e: usize| 2 * e + 1;
    let exists = |a: usize| {
        let e = a / 2;
        if a % 2 == 0 {
            sources & (1 << e) == 0
        } else {
            targets & (1 << e) == 0
        }
    };
    let m = 2 * n;
    let mut before = vec![false; m * m];
    let mut relate = |a: usize, b: usize| {
        if exists(a) && exists(b) {
            before[a * m + b] = true;
        }
    };
    for e in 0..n {
        relate(start(e), end(e));
    }
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            if prec.has(i, j) {
                relate(end(i), start(j));
            }
            if !prec.has(j, i) {
                relate(start(i), end(j));
            }
        }
    }
    for k in 0..m {
        for a in 0..m {
            if before[a * m + k] {
                for b in 0..m {
                    if before[k * m + b] {
                        before[a * m + b] = true;
                    }
                }
            }
        }
    }
    (0..m).all(|c| !(before[end(x) * m + c] && before[c * m + start(y)]))
}

/// Breadth-first search over same-kind adjacent swaps for a sequence in
/// which `End(x)` immediately precedes `Start(y)`; returns the swap
/// positions to apply in order.
fn find_adjacency_swaps(acts: &[Act], x: usize, y: usize) -> Result<Vec<usize>, SubsumeError> {
    let goal = |acts: &[Act]| {
        (0..acts.len().saturating_sub(1))
            .any(|j| acts[j] == Act::End(x as u8) && acts[j + 1] == Act::Start(y as u8))
    };
    if goal(acts) {
        return Ok(Vec::new());
    }
    let start = acts.to_vec();
    let mut parents: HashMap<Vec<Act>, (Vec<Act>, usize)> = HashMap::new();
    let mut queue = VecDeque::new();
    queue.push_back(start.clone());
    while let Some(current) = queue.pop_front() {
        for pos in 0..current.len() - 1 {
            if current[pos].kind() != current[pos + 1].kind() {
                continue;
            }
            let mut next = current.clone();
            next.swap(pos, pos + 1);
            if next == start || parents.contains_key(&next) {
                continue;
            }
            parents.insert(next.clone(), (current.clone(), pos));
            if goal(&next) {
                let mut path = Vec::new();
                let mut cur = next;
                while cur != start {
                    let (prev, p) = parents.remove(&cur).unwrap();
                    path.push(p);
                    cur = prev;
                }
                path.reverse();
                return Ok(path);
            }
            if parents.len() > SEARCH_NODE_CAP {
                return Err(SubsumeError::SizeLimitExceeded {
                    detail: format!("swap search exceeded {SEARCH_NODE_CAP} states"),
                });
            }
            queue.push_back(next);
        }
    }
    // Start/end acts of distinct events are always comparable in the act
    // order, so same-kind adjacent swaps connect all dense words of an
    // ipomset; a removable pair's adjacency is therefore reachable.
    unreachable!("same-kind swaps reach every dense word of the ipomset")
}
