//! Command-line front end: validation, decomposition, composition,
//! isomorphism and subsumption queries, bounded automaton languages, the
//! translations between the two automaton models, and DOT export.
//!
//! Exit codes: 0 on success, 1 when a query answers "no" (not isomorphic,
//! not subsumed, closure properties violated), 2 on invalid input or any
//! other error.  Errors go to stderr as a one-line JSON object.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use ipom::files::{
    document_from_json, hda_from_json, hda_to_json, ipomset_from_json, ipomset_to_json,
    sta_from_json, sta_to_json, Document,
};
use ipom::loset::parse_word;
use ipom::pomset::Ipomset;
use ipom::steps::{canonical_key, densify, normalize, phi, psi};
use ipom::subsume::{elementary_extensions, is_subsumption};
use ipom::sta::{check_hda_image, hd_of_sta, st_of_hda};

#[derive(Parser)]
#[command(
    name = "ipom",
    version,
    about = "Interval pomsets with interfaces: step decompositions, subsumption, and automata"
)]
struct Cli {
    /// Emit machine-readable JSON instead of plain text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a document (ipomset, HDA, or ST-automaton) and describe it.
    Check { file: PathBuf },
    /// Decompose an ipomset into its sparse step word.
    Decompose {
        file: PathBuf,
        /// Emit the dense word (one event started or ended per letter).
        #[arg(long)]
        dense: bool,
    },
    /// Glue a step word into an ipomset, printed as JSON.
    Compose { word: String },
    /// Rewrite a step word to its unique sparse form.
    Normalize { word: String },
    /// Test two ipomsets for isomorphism (exit 1 when they differ).
    Iso { left: PathBuf, right: PathBuf },
    /// Test whether the first ipomset subsumes into the second, i.e. the
    /// first carries at least the second's precedence (exit 1 when not).
    Subsume {
        left: PathBuf,
        right: PathBuf,
        /// Print the witnessing event bijection.
        #[arg(long)]
        witness: bool,
    },
    /// List the elementary refinements of an ipomset (one added precedence
    /// pair each), as canonical keys.
    Extensions { file: PathBuf },
    /// Bounded language of a higher-dimensional automaton.
    HdaLang {
        file: PathBuf,
        /// Maximum number of path moves.
        #[arg(long)]
        max_steps: usize,
    },
    /// Bounded language of an ST-automaton.
    StaLang {
        file: PathBuf,
        /// Maximum number of path edges.
        #[arg(long)]
        max_steps: usize,
    },
    /// Translate a higher-dimensional automaton to an ST-automaton.
    Hda2sta { file: PathBuf },
    /// Unfold an ST-automaton into a higher-dimensional automaton.
    Sta2hda { file: PathBuf },
    /// Check the closure properties that hold for every translated
    /// automaton (exit 1 when violated).
    StaCheck { file: PathBuf },
    /// Render any document as GraphViz DOT.
    Dot { file: PathBuf },
}

/// A hard failure: exit 2 with a machine-readable error object.
struct Failure(String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Failure {
        Failure(e.to_string())
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path)
        .map_err(|e| Failure(format!("cannot read {}: {e}", path.display())))
}

fn load_ipomset(path: &Path) -> Result<Ipomset, Failure> {
    Ok(ipomset_from_json(&read(path)?)?)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((code, output)) => {
            if !output.is_empty() {
                // A closed pipe (e.g. piping into `head`) is not an error.
                use std::io::Write;
                let _ = writeln!(std::io::stdout(), "{output}");
            }
            ExitCode::from(code)
        }
        Err(Failure(message)) => {
            eprintln!("{}", json!({ "error": message }));
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> Result<(u8, String), Failure> {
    match &cli.command {
        Command::Check { file } => check(cli, file),
        Command::Decompose { file, dense } => {
            let p = load_ipomset(file)?;
            let mut word = phi(&p)?;
            if *dense {
                word = densify(&word);
            }
            let text = word.to_string();
            Ok((0, output(cli, json!({ "word": text }), text)))
        }
        Command::Compose { word } => {
            let w = parse_word(word)?;
            Ok((0, ipomset_to_json(&psi(&w))))
        }
        Command::Normalize { word } => {
            let w = normalize(&parse_word(word)?);
            let text = w.to_string();
            Ok((0, output(cli, json!({ "word": text }), text)))
        }
        Command::Iso { left, right } => {
            let (p, q) = (load_ipomset(left)?, load_ipomset(right)?);
            match p.isomorphic(&q) {
                Some(bij) => Ok((
                    0,
                    output(
                        cli,
                        json!({ "isomorphic": true, "witness": witness_map(&bij) }),
                        format!("isomorphic\n{bij}"),
                    ),
                )),
                None => Ok((
                    1,
                    output(cli, json!({ "isomorphic": false }), "not isomorphic".into()),
                )),
            }
        }
        Command::Subsume { left, right, witness } => {
            let (p, q) = (load_ipomset(left)?, load_ipomset(right)?);
            match is_subsumption(&p, &q) {
                Some(bij) => {
                    let human = if *witness {
                        format!("subsumed\n{bij}")
                    } else {
                        "subsumed".into()
                    };
                    Ok((
                        0,
                        output(
                            cli,
                            json!({ "subsumed": true, "witness": witness_map(&bij) }),
                            human,
                        ),
                    ))
                }
                None => Ok((
                    1,
                    output(cli, json!({ "subsumed": false }), "not subsumed".into()),
                )),
            }
        }
        Command::Extensions { file } => {
            let p = load_ipomset(file)?;
            let mut refined: Vec<(String, Ipomset)> = elementary_extensions(&p)?
                .into_iter()
                .map(|r| (canonical_key(&r).expect("refinements stay interval"), r))
                .collect();
            refined.sort_by(|a, b| a.0.cmp(&b.0));
            let keys: Vec<&str> = refined.iter().map(|(k, _)| k.as_str()).collect();
            let human = keys.join("\n");
            let machine = json!({
                "extensions": refined
                    .iter()
                    .map(|(k, r)| {
                        json!({
                            "key": k,
                            "ipomset": serde_json::from_str::<serde_json::Value>(
                                &ipomset_to_json(r),
                            )
                            .unwrap(),
                        })
                    })
                    .collect::<Vec<_>>(),
            });
            Ok((0, output(cli, machine, human)))
        }
        Command::HdaLang { file, max_steps } => {
            let x = hda_from_json(&read(file)?)?;
            Ok(language_output(cli, x.language_bounded(*max_steps)))
        }
        Command::StaLang { file, max_steps } => {
            let a = sta_from_json(&read(file)?)?;
            Ok(language_output(cli, a.language_bounded(*max_steps)))
        }
        Command::Hda2sta { file } => {
            let x = hda_from_json(&read(file)?)?;
            Ok((0, sta_to_json(&st_of_hda(&x))))
        }
        Command::Sta2hda { file } => {
            let a = sta_from_json(&read(file)?)?;
            Ok((0, hda_to_json(&hd_of_sta(&a)?)))
        }
        Command::StaCheck { file } => {
            let a = sta_from_json(&read(file)?)?;
            let report = check_hda_image(&a);
            let machine = json!({
                "ok": report.is_ok(),
                "missingInterfaceEdges": report.missing_interface_edges,
                "missingFusions": report.missing_fusions,
                "missingSplits": report.missing_splits,
            });
            let code = if report.is_ok() { 0 } else { 1 };
            Ok((code, output(cli, machine, report.to_string())))
        }
        Command::Dot { file } => {
            let text = match document_from_json(&read(file)?)? {
                Document::Ipomset(p) => p.to_dot(),
                Document::Hda(x) => x.to_dot(),
                Document::Sta(a) => a.to_dot(),
            };
            Ok((0, text.trim_end().to_string()))
        }
    }
}

fn check(cli: &Cli, file: &Path) -> Result<(u8, String), Failure> {
    match document_from_json(&read(file)?)? {
        Document::Ipomset(p) => {
            let c = p.classify();
            let mut classes = Vec::new();
            for (name, holds) in [
                ("discrete", c.discrete),
                ("pomset", c.pomset),
                ("conclist", c.conclist),
                ("starter", c.starter),
                ("terminator", c.terminator),
                ("identity", c.identity),
            ] {
                if holds {
                    classes.push(name);
                }
            }
            let machine = json!({
                "kind": "ipomset",
                "events": p.n(),
                "interval": p.is_interval(),
                "sources": p.source_events().len(),
                "targets": p.target_events().len(),
                "classes": classes,
            });
            let human = format!(
                "valid ipomset: {} events ({} source, {} target), interval: {}{}",
                p.n(),
                p.source_events().len(),
                p.target_events().len(),
                if p.is_interval() { "yes" } else { "no" },
                if classes.is_empty() {
                    String::new()
                } else {
                    format!(", classes: {}", classes.join(" "))
                },
            );
            Ok((0, output(cli, machine, human)))
        }
        Document::Hda(x) => {
            let mut by_dim: BTreeMap<usize, usize> = BTreeMap::new();
            for i in 0..x.cell_count() {
                *by_dim.entry(x.dimension(i)).or_default() += 1;
            }
            let machine = json!({
                "kind": "hda",
                "cells": x.cell_count(),
                "byDimension": by_dim
                    .iter()
                    .map(|(d, n)| (d.to_string(), *n))
                    .collect::<BTreeMap<String, usize>>(),
                "start": x.start_cells().count(),
                "accept": x.accept_cells().count(),
            });
            let dims: Vec<String> = by_dim
                .iter()
                .map(|(d, n)| format!("{n} of dimension {d}"))
                .collect();
            let human = format!(
                "valid higher-dimensional automaton: {} cells ({}), {} start, {} accept",
                x.cell_count(),
                dims.join(", "),
                x.start_cells().count(),
                x.accept_cells().count(),
            );
            Ok((0, output(cli, machine, human)))
        }
        Document::Sta(a) => {
            let machine = json!({
                "kind": "sta",
                "states": a.state_count(),
                "edges": a.edge_count(),
                "initial": a.initial_states().count(),
                "final": a.final_states().count(),
            });
            let human = format!(
                "valid ST-automaton: {} states, {} edges, {} initial, {} final",
                a.state_count(),
                a.edge_count(),
                a.initial_states().count(),
                a.final_states().count(),
            );
            Ok((0, output(cli, machine, human)))
        }
    }
}

fn language_output(cli: &Cli, keys: std::collections::BTreeSet<String>) -> (u8, String) {
    let human = keys.iter().cloned().collect::<Vec<_>>().join("\n");
    let machine = json!({ "language": keys });
    (0, output(cli, machine, human))
}

fn witness_map(bij: &ipom::EventBijection) -> BTreeMap<String, String> {
    bij.pairs()
        .iter()
        .map(|(a, b)| (a.to_string(), b.to_string()))
        .collect()
}

fn output(cli: &Cli, machine: serde_json::Value, human: String) -> String {
    if cli.json {
        machine.to_string()
    } else {
        human
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn word_keys_are_losets() {
        // The CLI prints language members as canonical keys; those are
        // exactly the sparse loset strings the parser accepts back.
        let w = parse_word("[a.][.a]").unwrap();
        assert_eq!(ipom::steps::word_key(&w), "[a.][.a]");
    }
}
