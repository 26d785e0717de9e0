//! Starters, terminators, and coherent words of them.
//!
//! A step letter is a discrete ipomset over a carrier conclist `U`: a
//! *starter* `↑_A U` begins the events at the marked positions `A` (its
//! source is `U` minus `A`, its target all of `U`), a *terminator* `↓_B U`
//! ends the marked events (source all of `U`, target `U` minus `B`).  A
//! letter with no marked positions is an *identity* and counts as both
//! kinds.
//!
//! A [`Word`] is a non-empty sequence of letters in which each letter's
//! target equals the next letter's source.  Words denote ipomsets via
//! [`psi`] (gluing left to right); conversely [`phi`] decomposes an interval
//! ipomset into its unique *sparse* word (kinds alternate, no identities).
//! [`normalize`] computes that sparse representative for any word, and
//! [`densify`] the fully split *dense* one (every letter marks exactly one
//! event).

use thiserror::Error;

use crate::event::{Conclist, EventId, Label};
use crate::pomset::{CoreError, Ipomset};
use crate::rel::Rel;

/// Whether a letter starts or terminates its marked events.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Kind {
    Starter,
    Terminator,
}

impl Kind {
    pub fn opposite(self) -> Kind {
        match self {
            Kind::Starter => Kind::Terminator,
            Kind::Terminator => Kind::Starter,
        }
    }
}

/// Errors in letter and word construction.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StepsError {
    #[error("a word must contain at least one letter")]
    EmptyWord,
    #[error("letters {position} and {next} do not cohere: target {left} vs source {right}",
            next = position + 1)]
    NotCoherent {
        position: usize,
        left: Conclist,
        right: Conclist,
    },
    #[error("cannot fuse a starter with a terminator")]
    KindMismatch,
    #[error("marked positions must lie inside the carrier")]
    NotASubset,
}

/// A starter or terminator over a carrier conclist, with the acted-on
/// positions marked.  Identities (no marks) are canonicalized to
/// [`Kind::Starter`] so that structural equality coincides with equality of
/// the discrete ipomsets the letters denote.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StepLetter {
    kind: Kind,
    carrier: Conclist,
    marked: u64,
}

impl StepLetter {
    fn new(kind: Kind, carrier: Conclist, marked: u64) -> Result<StepLetter, StepsError> {
        let in_range = if carrier.len() == 64 {
            !0
        } else {
            (1u64 << carrier.len()) - 1
        };
        if marked & !in_range != 0 {
            return Err(StepsError::NotASubset);
        }
        let kind = if marked == 0 { Kind::Starter } else { kind };
        Ok(StepLetter { kind, carrier, marked })
    }

    /// `↑_A U`: starts the events at the marked positions of `U`.
    pub fn starter(carrier: Conclist, marked: u64) -> Result<StepLetter, StepsError> {
        StepLetter::new(Kind::Starter, carrier, marked)
    }

    /// `↓_B U`: terminates the events at the marked positions of `U`.
    pub fn terminator(carrier: Conclist, marked: u64) -> Result<StepLetter, StepsError> {
        StepLetter::new(Kind::Terminator, carrier, marked)
    }

    /// `id_U`: carries every event of `U` through unchanged.
    pub fn identity(carrier: Conclist) -> StepLetter {
        StepLetter {
            kind: Kind::Starter,
            carrier,
            marked: 0,
        }
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn carrier(&self) -> &Conclist {
        &self.carrier
    }

    pub fn marked_mask(&self) -> u64 {
        self.marked
    }

    pub fn marked_positions(&self) -> Vec<usize> {
        (0..self.carrier.len()).filter(|i| self.marked & (1 << i) != 0).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.marked == 0
    }

    /// Does the letter start or terminate exactly one event?
    pub fn is_elementary(&self) -> bool {
        self.marked.count_ones() == 1
    }

    /// Can this letter be read with the given kind?  Identities can be read
    /// as either.
    pub fn has_kind(&self, kind: Kind) -> bool {
        self.is_identity() || self.kind == kind
    }

    /// The conclist of events running before the letter.
    pub fn source(&self) -> Conclist {
        match self.kind {
            Kind::Starter => self.carrier.without(self.marked),
            Kind::Terminator => self.carrier.clone(),
        }
    }

    /// The conclist of events running after the letter.
    pub fn target(&self) -> Conclist {
        match self.kind {
            Kind::Starter => self.carrier.clone(),
            Kind::Terminator => self.carrier.without(self.marked),
        }
    }

    /// The discrete ipomset this letter denotes, with synthesized event ids
    /// `{prefix}0`, `{prefix}1`, ...
    pub fn to_ipomset(&self, prefix: &str) -> Ipomset {
        let n = self.carrier.len();
        let ids: Vec<EventId> = (0..n)
            .map(|i| EventId::new(format!("{prefix}{i}")).unwrap())
            .collect();
        let labels: Vec<Label> = self.carrier.labels().to_vec();
        let mut order = Rel::new(n);
        for i in 0..n {
            for j in i + 1..n {
                order.add(i, j);
            }
        }
        let full: u64 = if n == 64 { !0 } else { (1u64 << n) - 1 };
        let (sources, targets) = match self.kind {
            Kind::Starter => (full & !self.marked, full),
            Kind::Terminator => (full, full & !self.marked),
        };
        Ipomset::from_closed_parts(ids, labels, Rel::new(n), order, sources, targets)
    }
}

/// A coherent word: non-empty, with each target matching the next source.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Word {
    letters: Vec<StepLetter>,
}

impl Word {
    pub fn new(letters: Vec<StepLetter>) -> Result<Word, StepsError> {
        if letters.is_empty() {
            return Err(StepsError::EmptyWord);
        }
        for (i, pair) in letters.windows(2).enumerate() {
            let left = pair[0].target();
            let right = pair[1].source();
            if left != right {
                return Err(StepsError::NotCoherent {
                    position: i,
                    left,
                    right,
                });
            }
        }
        Ok(Word { letters })
    }

    /// The one-letter identity word on `carrier`.
    pub fn identity(carrier: Conclist) -> Word {
        Word {
            letters: vec![StepLetter::identity(carrier)],
        }
    }

    pub fn letters(&self) -> &[StepLetter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        false // a word has at least one letter
    }

    pub fn source(&self) -> Conclist {
        self.letters[0].source()
    }

    pub fn target(&self) -> Conclist {
        self.letters[self.letters.len() - 1].target()
    }

    /// All letters mark exactly one event.
    pub fn is_dense(&self) -> bool {
        self.letters.iter().all(StepLetter::is_elementary)
            || (self.letters.len() == 1 && self.letters[0].is_identity())
    }

    /// Kinds alternate and no letter is an identity (a lone identity letter
    /// is sparse by convention).
    pub fn is_sparse(&self) -> bool {
        if self.letters.len() == 1 && self.letters[0].is_identity() {
            return true;
        }
        if self.letters.iter().any(StepLetter::is_identity) {
            return false;
        }
        self.letters
            .windows(2)
            .all(|w| w[0].kind() != w[1].kind())
    }
}

/// Fuses two coherent letters of the same kind into one; identities fuse
/// with anything coherent.
pub fn fuse(a: &StepLetter, b: &StepLetter) -> Result<StepLetter, StepsError> {
    let left = a.target();
    let right = b.source();
    if left != right {
        return Err(StepsError::NotCoherent {
            position: 0,
            left,
            right,
        });
    }
    if a.is_identity() {
        return Ok(b.clone());
    }
    if b.is_identity() {
        return Ok(a.clone());
    }
    if a.kind() != b.kind() {
        return Err(StepsError::KindMismatch);
    }
    match a.kind() {
        Kind::Starter => {
            // a = ↑_A (U∖B), b = ↑_B U: the composite starts A ∪ B on U.
            let mut marked = b.marked;
            let unmarked: Vec<usize> = (0..b.carrier.len())
                .filter(|i| b.marked & (1 << i) == 0)
                .collect();
            for (pos_in_a, pos_in_b) in unmarked.into_iter().enumerate() {
                if a.marked & (1 << pos_in_a) != 0 {
                    marked |= 1 << pos_in_b;
                }
            }
            StepLetter::starter(b.carrier.clone(), marked)
        }
        Kind::Terminator => {
            // a = ↓_A U, b = ↓_B (U∖A): the composite terminates A ∪ B on U.
            let mut marked = a.marked;
            let unmarked: Vec<usize> = (0..a.carrier.len())
                .filter(|i| a.marked & (1 << i) == 0)
                .collect();
            for (pos_in_b, pos_in_a) in unmarked.into_iter().enumerate() {
                if b.marked & (1 << pos_in_b) != 0 {
                    marked |= 1 << pos_in_a;
                }
            }
            StepLetter::terminator(a.carrier.clone(), marked)
        }
    }
}

/// Glues the letters of a word left to right into an ipomset.
///
/// The result is always an interval ipomset; event ids are synthesized.
pub fn psi(word: &Word) -> Ipomset {
    let mut acc = word.letters[0].to_ipomset("w0e");
    for (k, letter) in word.letters.iter().enumerate().skip(1) {
        let next = letter.to_ipomset(&format!("w{k}e"));
        acc = acc
            .glue(&next)
            .expect("coherent words glue along matching interfaces");
    }
    assert!(acc.is_interval(), "words denote interval ipomsets");
    acc
}

/// The sparse steps of `p` in event-mask form: kind, carrier mask, marked
/// mask, all in `p`'s event index space.  Empty for identities.
pub(crate) fn sparse_steps_indexed(p: &Ipomset) -> Result<Vec<(Kind, u64, u64)>, CoreError> {
    let rep = p.interval_representation()?;
    let m = rep.magnitude();
    let mut steps = Vec::new();
    if m == 0 {
        return Ok(steps);
    }
    let first = rep.antichain_mask(0);
    let start_marks = first & !p.sources_mask();
    if start_marks != 0 {
        steps.push((Kind::Starter, first, start_marks));
    }
    for i in 0..m - 1 {
        let here = rep.antichain_mask(i);
        let next = rep.antichain_mask(i + 1);
        let ending = here & !next;
        let starting = next & !here;
        debug_assert!(ending != 0 && starting != 0, "antichains differ along the chain");
        steps.push((Kind::Terminator, here, ending));
        steps.push((Kind::Starter, next, starting));
    }
    let last = rep.antichain_mask(m - 1);
    let end_marks = last & !p.targets_mask();
    if end_marks != 0 {
        steps.push((Kind::Terminator, last, end_marks));
    }
    Ok(steps)
}

/// Builds the letter acting on the events of `carrier_mask` (sorted by the
/// given order, typically the ipomset's own event order) that marks the
/// events of `marked_mask`.
pub(crate) fn letter_by_rel(
    p: &Ipomset,
    order: &Rel,
    kind: Kind,
    carrier_mask: u64,
    marked_mask: u64,
) -> StepLetter {
    let events = order.sort_total(carrier_mask);
    let carrier: Conclist = events.iter().map(|&e| p.label(e).clone()).collect();
    let mut marked = 0u64;
    for (pos, &e) in events.iter().enumerate() {
        if marked_mask & (1 << e) != 0 {
            marked |= 1 << pos;
        }
    }
    match kind {
        Kind::Starter => StepLetter::starter(carrier, marked),
        Kind::Terminator => StepLetter::terminator(carrier, marked),
    }
    .expect("marks come from the carrier")
}

/// Decomposes an interval ipomset into its sparse word.
///
/// Walks the chain of maximal antichains of the interval representation,
/// terminating what the next antichain drops and starting what it adds; the
/// first starter and last terminator are omitted when the interfaces make
/// them empty.  Identities decompose into their one-letter identity word.
pub fn phi(p: &Ipomset) -> Result<Word, CoreError> {
    let steps = sparse_steps_indexed(p)?;
    if steps.is_empty() {
        let full: u64 = match p.n() {
            0 => 0,
            64 => !0,
            n => (1u64 << n) - 1,
        };
        let carrier: Conclist = if p.n() == 0 {
            Conclist::empty()
        } else {
            p.order_sorted(full)
                .iter()
                .map(|&e| p.label(e).clone())
                .collect()
        };
        return Ok(Word::identity(carrier));
    }
    let letters: Vec<StepLetter> = steps
        .into_iter()
        .map(|(kind, carrier, marked)| letter_by_rel(p, p.order_rel(), kind, carrier, marked))
        .collect();
    let word = Word::new(letters).expect("adjacent antichains cohere");
    debug_assert!(word.is_sparse());
    Ok(word)
}

/// The sparse representative of a word's equivalence class: drops
/// identities and fuses adjacent letters of equal kind until stable.
pub fn normalize(word: &Word) -> Word {
    let mut letters = word.letters.clone();
    loop {
        let mut changed = false;
        if letters.len() > 1 {
            let before = letters.len();
            let mut kept: Vec<StepLetter> =
                letters.iter().filter(|l| !l.is_identity()).cloned().collect();
            if kept.is_empty() {
                kept.push(letters[0].clone());
            }
            letters = kept;
            changed |= letters.len() != before;
        }
        let mut fused = Vec::with_capacity(letters.len());
        for letter in letters.drain(..) {
            match fused.last() {
                Some(prev) if !letter.is_identity() && !(prev as &StepLetter).is_identity() => {
                    if let Ok(joint) = fuse(fused.last().unwrap(), &letter) {
                        *fused.last_mut().unwrap() = joint;
                        changed = true;
                    } else {
                        fused.push(letter);
                    }
                }
                _ => fused.push(letter),
            }
        }
        letters = fused;
        if !changed {
            let word = Word { letters };
            debug_assert!(word.is_sparse());
            return word;
        }
    }
}

/// The dense representative: splits every letter into elementary ones, one
/// marked event at a time in carrier order, and drops identities.  A word
/// denoting an identity densifies to its one-letter identity form.
pub fn densify(word: &Word) -> Word {
    let mut letters = Vec::new();
    for letter in &word.letters {
        if letter.is_identity() {
            continue;
        }
        let marks = letter.marked_positions();
        match letter.kind() {
            Kind::Starter => {
                // Start marks one at a time: the j-th letter still lacks the
                // later marks, so its carrier omits them.
                for (j, &mark) in marks.iter().enumerate() {
                    let later: u64 = marks[j + 1..].iter().map(|&m| 1u64 << m).sum();
                    let carrier = letter.carrier.without(later);
                    // Positions before `mark` are unaffected by removing
                    // later positions.
                    letters.push(StepLetter::starter(carrier, 1 << mark).unwrap());
                }
            }
            Kind::Terminator => {
                // Terminate marks one at a time: the j-th letter has already
                // lost the earlier marks.
                for (j, &mark) in marks.iter().enumerate() {
                    let earlier: u64 = marks[..j].iter().map(|&m| 1u64 << m).sum();
                    let carrier = letter.carrier.without(earlier);
                    letters.push(StepLetter::terminator(carrier, 1u64 << (mark - j)).unwrap());
                }
            }
        }
    }
    if letters.is_empty() {
        return Word::identity(word.source());
    }
    let word = Word::new(letters).expect("splitting preserves coherence");
    debug_assert!(word.is_dense());
    word
}

/// Do two words denote the same ipomset, i.e. have the same sparse form?
pub fn equivalent(a: &Word, b: &Word) -> bool {
    normalize(a) == normalize(b)
}

/// The canonical key of a word's equivalence class: the loset notation of
/// its sparse form.
pub fn word_key(word: &Word) -> String {
    normalize(word).to_string()
}

/// The canonical key of an interval ipomset: the loset notation of its
/// sparse decomposition.  Isomorphic ipomsets get equal keys and
/// non-isomorphic ones different keys.
pub fn canonical_key(p: &Ipomset) -> Result<String, CoreError> {
    Ok(phi(p)?.to_string())
}
