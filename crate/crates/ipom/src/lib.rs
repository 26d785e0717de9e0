//! Interval pomsets with interfaces and their step sequences.
//!
//! An *ipomset* is a finite set of labelled events carrying two relations —
//! a precedence order `<` and an event order `⇢` that together relate every
//! pair of distinct events — plus two interfaces: *source* events that are
//! already running when the pomset starts, and *target* events still running
//! when it ends.  Ipomsets whose precedence order is an interval order are
//! exactly the ones that can be scheduled on a line, and they admit a
//! canonical decomposition into discrete *steps*:
//!
//! * a **starter** `↑_A U` begins the events `A` inside the concurrency list
//!   (conclist) `U`;
//! * a **terminator** `↓_B U` ends the events `B` inside `U`.
//!
//! The two directions of that correspondence are [`steps::phi`] (decompose an
//! ipomset into its unique sparse step word) and [`steps::psi`] (glue a step
//! word back into an ipomset); they are mutually inverse up to isomorphism.
//!
//! On top of the step algebra the crate provides:
//!
//! * [`subsume`] — subsumption witnesses (`P ⊑ Q` when `P` is more ordered
//!   than `Q`), adjacent-step transpositions, and step-by-step subsumption
//!   chains between words;
//! * [`hda`] — higher-dimensional automata (precubical sets with start and
//!   accept cells), their paths, and bounded language enumeration;
//! * [`sta`] — ST-automata whose edges are labelled by starters and
//!   terminators, translations in both directions between them and HDAs, and
//!   a checker for the image of the HDA→ST translation;
//! * [`loset`] — the ASCII notation for step words, e.g.
//!   `[a.|.c.][.a.|.c]`, used by the CLI and as the canonical serialization;
//! * [`files`] — JSON readers and writers for ipomsets, HDAs and ST-automata;
//! * [`gen`] — seeded random generators for words, ipomsets, HDAs and
//!   ST-automata, used by the test suites.

pub mod event;
pub mod files;
pub mod gen;
pub mod hda;
pub mod loset;
pub mod pomset;
mod rel;
pub mod sta;
pub mod steps;
pub mod subsume;
#[cfg(test)]
pub(crate) mod testutil;

pub use event::{Conclist, EventId, Label};
pub use pomset::{EventBijection, IntervalRep, Ipomset};
pub use steps::{Kind, StepLetter, Word};
