//! JSON formats for ipomsets, higher-dimensional automata, and
//! ST-automata, plus shape-based detection for mixed-input commands.
//!
//! An ipomset document lists events with labels, the two relations as id
//! pairs, and the interfaces:
//!
//! ```json
//! { "events": [{"id": "x1", "label": "a"}],
//!   "precedence": [], "eventOrder": [], "sources": [], "targets": [] }
//! ```
//!
//! An HDA document lists cells with their running events and one lower
//! (`d0`) and upper (`d1`) face per position, keyed by position:
//!
//! ```json
//! { "cells": [{"id": "e", "events": ["a"],
//!              "d0": {"0": "p"}, "d1": {"0": "q"}}, ...],
//!   "start": ["p"], "accept": ["q"] }
//! ```
//!
//! An ST-automaton document lists states with conclists and edges carrying
//! letters in loset notation:
//!
//! ```json
//! { "states": [{"id": "x", "events": []}, {"id": "y", "events": ["a"]}],
//!   "edges": [{"from": "x", "letter": "[a.]", "to": "y"}],
//!   "initial": ["x"], "final": ["y"] }
//! ```

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::event::{Conclist, EventId, Label};
use crate::hda::{Hda, HdaReport, RawCell};
use crate::loset::{parse_letter, LosetError};
use crate::pomset::{Ipomset, ValidationReport};
use crate::sta::{Sta, StaReport};

/// Anything that can go wrong turning a document into a validated value.
#[derive(Debug, Error)]
pub enum FileError {
    #[error("cannot parse JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Shape(String),
    #[error("{0}")]
    Loset(#[from] LosetError),
    #[error("{0}")]
    Ipomset(#[from] ValidationReport),
    #[error("{0}")]
    Hda(#[from] HdaReport),
    #[error("{0}")]
    Sta(#[from] StaReport),
}

#[derive(Debug, Serialize, Deserialize)]
struct EventDoc {
    id: EventId,
    label: Label,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct IpomsetDoc {
    events: Vec<EventDoc>,
    #[serde(default)]
    precedence: Vec<(EventId, EventId)>,
    #[serde(default, rename = "eventOrder")]
    event_order: Vec<(EventId, EventId)>,
    #[serde(default)]
    sources: Vec<EventId>,
    #[serde(default)]
    targets: Vec<EventId>,
}

#[derive(Debug, Serialize, Deserialize)]
struct CellDoc {
    id: String,
    #[serde(default)]
    events: Vec<Label>,
    #[serde(default)]
    d0: BTreeMap<String, String>,
    #[serde(default)]
    d1: BTreeMap<String, String>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct HdaDoc {
    cells: Vec<CellDoc>,
    #[serde(default)]
    start: Vec<String>,
    #[serde(default)]
    accept: Vec<String>,
}

#[derive(Debug, Serialize, Deserialize)]
struct StateDoc {
    id: String,
    #[serde(default)]
    events: Vec<Label>,
}

#[derive(Debug, Serialize, Deserialize)]
struct EdgeDoc {
    from: String,
    letter: String,
    to: String,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StaDoc {
    states: Vec<StateDoc>,
    #[serde(default)]
    edges: Vec<EdgeDoc>,
    #[serde(default)]
    initial: Vec<String>,
    #[serde(default, rename = "final")]
    finals: Vec<String>,
}

pub fn ipomset_from_json(input: &str) -> Result<Ipomset, FileError> {
    let doc: IpomsetDoc = serde_json::from_str(input)?;
    let events = doc.events.into_iter().map(|e| (e.id, e.label)).collect();
    Ok(Ipomset::new(
        events,
        &doc.precedence,
        &doc.event_order,
        &doc.sources,
        &doc.targets,
    )?)
}

pub fn ipomset_to_json(p: &Ipomset) -> String {
    let pair = |(i, j): (usize, usize)| (p.id(i).clone(), p.id(j).clone());
    let doc = IpomsetDoc {
        events: (0..p.n())
            .map(|i| EventDoc { id: p.id(i).clone(), label: p.label(i).clone() })
            .collect(),
        precedence: p.precedence_pairs().into_iter().map(pair).collect(),
        event_order: p.event_order_pairs().into_iter().map(pair).collect(),
        sources: p.source_events().into_iter().map(|i| p.id(i).clone()).collect(),
        targets: p.target_events().into_iter().map(|i| p.id(i).clone()).collect(),
    };
    serde_json::to_string_pretty(&doc).expect("documents serialize")
}

/// Reads a face map keyed by decimal positions into a dense vector.
fn faces_from_map(
    cell: &str,
    kind: &str,
    dim: usize,
    map: &BTreeMap<String, String>,
) -> Result<Vec<String>, FileError> {
    let mut out = vec![None; dim];
    for (key, target) in map {
        let pos: usize = key.parse().map_err(|_| {
            FileError::Shape(format!("cell {cell}: {kind} position {key:?} is not a number"))
        })?;
        if pos >= dim {
            return Err(FileError::Shape(format!(
                "cell {cell}: {kind} position {pos} exceeds the {dim} events"
            )));
        }
        out[pos] = Some(target.clone());
    }
    out.into_iter()
        .enumerate()
        .map(|(pos, t)| {
            t.ok_or_else(|| {
                FileError::Shape(format!("cell {cell}: missing {kind} face at position {pos}"))
            })
        })
        .collect()
}

pub fn hda_from_json(input: &str) -> Result<Hda, FileError> {
    let doc: HdaDoc = serde_json::from_str(input)?;
    let mut cells = Vec::with_capacity(doc.cells.len());
    for c in &doc.cells {
        let dim = c.events.len();
        cells.push(RawCell {
            id: c.id.clone(),
            events: Conclist::new(c.events.clone()),
            d0: faces_from_map(&c.id, "d0", dim, &c.d0)?,
            d1: faces_from_map(&c.id, "d1", dim, &c.d1)?,
        });
    }
    Ok(Hda::new(cells, doc.start, doc.accept)?)
}

pub fn hda_to_json(x: &Hda) -> String {
    let doc = HdaDoc {
        cells: (0..x.cell_count())
            .map(|i| {
                let dim = x.dimension(i);
                let faces = |pick: &dyn Fn(usize) -> usize| {
                    (0..dim)
                        .map(|pos| (pos.to_string(), x.cell_id(pick(pos)).to_string()))
                        .collect()
                };
                CellDoc {
                    id: x.cell_id(i).to_string(),
                    events: x.events(i).labels().to_vec(),
                    d0: faces(&|pos| x.lower_face(i, pos)),
                    d1: faces(&|pos| x.upper_face(i, pos)),
                }
            })
            .collect(),
        start: x.start_cells().map(|i| x.cell_id(i).to_string()).collect(),
        accept: x.accept_cells().map(|i| x.cell_id(i).to_string()).collect(),
    };
    serde_json::to_string_pretty(&doc).expect("documents serialize")
}

pub fn sta_from_json(input: &str) -> Result<Sta, FileError> {
    let doc: StaDoc = serde_json::from_str(input)?;
    let states = doc
        .states
        .into_iter()
        .map(|s| (s.id, Conclist::new(s.events)))
        .collect();
    let edges = doc
        .edges
        .into_iter()
        .map(|e| Ok((e.from, parse_letter(&e.letter)?, e.to)))
        .collect::<Result<Vec<_>, FileError>>()?;
    Ok(Sta::new(states, edges, doc.initial, doc.finals)?)
}

pub fn sta_to_json(a: &Sta) -> String {
    let doc = StaDoc {
        states: (0..a.state_count())
            .map(|i| StateDoc {
                id: a.state_id(i).to_string(),
                events: a.state_events(i).labels().to_vec(),
            })
            .collect(),
        edges: a
            .edges()
            .map(|(f, l, t)| EdgeDoc {
                from: a.state_id(*f).to_string(),
                letter: l.to_string(),
                to: a.state_id(*t).to_string(),
            })
            .collect(),
        initial: a.initial_states().map(|i| a.state_id(i).to_string()).collect(),
        finals: a.final_states().map(|i| a.state_id(i).to_string()).collect(),
    };
    serde_json::to_string_pretty(&doc).expect("documents serialize")
}

/// A document of any of the three kinds.
#[derive(Debug, Clone)]
pub enum Document {
    Ipomset(Ipomset),
    Hda(Hda),
    Sta(Sta),
}

/// Detects the document kind by its top-level keys: `cells` means an HDA,
/// `states` an ST-automaton, `events` an ipomset.
pub fn document_from_json(input: &str) -> Result<Document, FileError> {
    let value: serde_json::Value = serde_json::from_str(input)?;
    let Some(object) = value.as_object() else {
        return Err(FileError::Shape("expected a top-level JSON object".into()));
    };
    if object.contains_key("cells") {
        Ok(Document::Hda(hda_from_json(input)?))
    } else if object.contains_key("states") {
        Ok(Document::Sta(sta_from_json(input)?))
    } else if object.contains_key("events") {
        Ok(Document::Ipomset(ipomset_from_json(input)?))
    } else {
        Err(FileError::Shape(
            "cannot tell the document kind: expected a top-level \"events\", \"cells\", or \"states\" key".into(),
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::steps::canonical_key;
    use crate::testutil::{four_event, two_square_grid, chain_sta};

    #[test]
    fn ipomsets_round_trip() {
        let p = four_event();
        let back = ipomset_from_json(&ipomset_to_json(&p)).unwrap();
        assert!(p.isomorphic(&back).is_some());
        assert_eq!(canonical_key(&p).unwrap(), canonical_key(&back).unwrap());
    }

    #[test]
    fn parses_a_handwritten_ipomset() {
        let text = r#"{
            "events": [
                {"id": "e1", "label": "a"},
                {"id": "e2", "label": "b"}
            ],
            "precedence": [["e1", "e2"]]
        }"#;
        let p = ipomset_from_json(text).unwrap();
        assert_eq!(p.n(), 2);
        assert!(p.precedes(0, 1));
    }

    #[test]
    fn automata_round_trip() {
        let x = two_square_grid();
        let back = hda_from_json(&hda_to_json(&x)).unwrap();
        assert!(x.isomorphic(&back));

        let a = chain_sta();
        let back = sta_from_json(&sta_to_json(&a)).unwrap();
        assert_eq!(a, back);
    }

    #[test]
    fn detects_document_kinds() {
        assert!(matches!(
            document_from_json(&ipomset_to_json(&four_event())),
            Ok(Document::Ipomset(_))
        ));
        assert!(matches!(
            document_from_json(&hda_to_json(&two_square_grid())),
            Ok(Document::Hda(_))
        ));
        assert!(matches!(
            document_from_json(&sta_to_json(&chain_sta())),
            Ok(Document::Sta(_))
        ));
        assert!(matches!(
            document_from_json("{\"things\": []}"),
            Err(FileError::Shape(_))
        ));
    }

    #[test]
    fn reports_face_map_gaps() {
        let text = r#"{
            "cells": [
                {"id": "p", "events": []},
                {"id": "q", "events": []},
                {"id": "e", "events": ["a"], "d0": {"0": "p"}, "d1": {}}
            ],
            "start": [], "accept": []
        }"#;
        let err = hda_from_json(text).unwrap_err();
        assert!(err.to_string().contains("missing d1 face at position 0"));
    }
}
