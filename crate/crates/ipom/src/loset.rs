//! ASCII notation for step letters and words.
//!
//! A letter is written `[row|row|...]` with the rows in event order; each
//! row is one event of the carrier:
//!
//! * `x.`  — the event is started here (absent from the source, present in
//!   the target);
//! * `.x`  — the event is terminated here;
//! * `.x.` — the event is carried through unchanged.
//!
//! All rows of a letter must agree: a letter that starts one event and
//! terminates another is not a starter, terminator, or identity and is
//! rejected.  A letter whose rows are all carried is an identity; the empty
//! identity (no running events) is written `[]`.  A word is one or more
//! letters in sequence, e.g. `[a.|.c.][.a.|.c]`.  Whitespace is allowed
//! between letters and around rows.

use std::fmt;

use thiserror::Error;

use crate::event::{Conclist, Label};
use crate::steps::{Kind, StepLetter, StepsError, Word};

/// Parse errors carry the byte offset of the problem in the input.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LosetError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("letter at byte {offset} mixes started and terminated events")]
    MixedKindLetter { offset: usize },
    #[error(transparent)]
    Word(#[from] StepsError),
}

struct Parser<'a> {
    input: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(input: &'a str) -> Self {
        Parser {
            input: input.as_bytes(),
            pos: 0,
        }
    }

    fn error(&self, message: impl Into<String>) -> LosetError {
        LosetError::Syntax {
            offset: self.pos,
            message: message.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.input.len() && self.input[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.input.get(self.pos).copied()
    }

    fn expect(&mut self, c: u8) -> Result<(), LosetError> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(format!("expected '{}'", c as char)))
        }
    }

    fn ident(&mut self) -> Result<Label, LosetError> {
        let start = self.pos;
        match self.peek() {
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => self.pos += 1,
            _ => return Err(self.error("expected a label")),
        }
        while let Some(c) = self.peek() {
            if c.is_ascii_alphanumeric() || c == b'_' {
                self.pos += 1;
            } else {
                break;
            }
        }
        let text = std::str::from_utf8(&self.input[start..self.pos]).unwrap();
        Ok(Label::new(text).expect("scanned identifiers are valid labels"))
    }

    /// One row: leading dot (in source), label, trailing dot (in target).
    fn row(&mut self) -> Result<(bool, Label, bool), LosetError> {
        let pre = if self.peek() == Some(b'.') {
            self.pos += 1;
            true
        } else {
            false
        };
        let label = self.ident()?;
        let post = if self.peek() == Some(b'.') {
            self.pos += 1;
            true
        } else {
            false
        };
        Ok((pre, label, post))
    }

    fn letter(&mut self) -> Result<StepLetter, LosetError> {
        let letter_start = self.pos;
        self.expect(b'[')?;
        self.skip_ws();
        let mut rows = Vec::new();
        if self.peek() != Some(b']') {
            loop {
                rows.push(self.row()?);
                self.skip_ws();
                if self.peek() == Some(b'|') {
                    self.pos += 1;
                    self.skip_ws();
                } else {
                    break;
                }
            }
        }
        self.expect(b']')?;

        let mut started = 0u64;
        let mut terminated = 0u64;
        let mut labels = Vec::with_capacity(rows.len());
        for (i, (pre, label, post)) in rows.into_iter().enumerate() {
            match (pre, post) {
                (true, true) => {}
                (false, true) => started |= 1 << i,
                (true, false) => terminated |= 1 << i,
                // A bare row would start and terminate its event in a single
                // discrete step.
                (false, false) => {
                    return Err(LosetError::MixedKindLetter { offset: letter_start })
                }
            }
            labels.push(label);
        }
        if started != 0 && terminated != 0 {
            return Err(LosetError::MixedKindLetter { offset: letter_start });
        }
        let carrier = Conclist::new(labels);
        let letter = if terminated != 0 {
            StepLetter::terminator(carrier, terminated)
        } else {
            StepLetter::starter(carrier, started)
        };
        Ok(letter.expect("marks index the parsed rows"))
    }
}

/// Parses a single letter, rejecting trailing input.
pub fn parse_letter(input: &str) -> Result<StepLetter, LosetError> {
    let mut p = Parser::new(input);
    p.skip_ws();
    let letter = p.letter()?;
    p.skip_ws();
    if p.pos != p.input.len() {
        return Err(p.error("unexpected input after letter"));
    }
    Ok(letter)
}

/// Parses a word: one or more letters, coherence checked.
pub fn parse_word(input: &str) -> Result<Word, LosetError> {
    let mut p = Parser::new(input);
    let mut letters = Vec::new();
    p.skip_ws();
    loop {
        letters.push(p.letter()?);
        p.skip_ws();
        match p.peek() {
            None => break,
            Some(b'[') => continue,
            Some(_) => return Err(p.error("expected '[' or end of input")),
        }
    }
    Ok(Word::new(letters)?)
}

impl fmt::Display for StepLetter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, label) in self.carrier().labels().iter().enumerate() {
            if i > 0 {
                write!(f, "|")?;
            }
            let marked = self.marked_mask() & (1 << i) != 0;
            let (pre, post) = match (self.kind(), marked) {
                (_, false) => (true, true),
                (Kind::Starter, true) => (false, true),
                (Kind::Terminator, true) => (true, false),
            };
            if pre {
                write!(f, ".")?;
            }
            write!(f, "{label}")?;
            if post {
                write!(f, ".")?;
            }
        }
        write!(f, "]")
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for letter in self.letters() {
            write!(f, "{letter}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips() {
        for text in [
            "[a.|.c.][.a.|.c][.a.|a.][.a|.a.][b.|.a.][.b|.a]",
            "[a.][.a][b.][.b]",
            "[.a.|.b.]",
            "[]",
            "[x_1.|.y2.]",
        ] {
            let word = parse_word(text).unwrap();
            assert_eq!(word.to_string(), text);
        }
    }

    #[test]
    fn whitespace_is_allowed_between_letters() {
        let word = parse_word("  [a.]  [ .a. | b. ]\n[.a|.b.]\t[.b]").unwrap();
        assert_eq!(word.to_string(), "[a.][.a.|b.][.a|.b.][.b]");
    }

    #[test]
    fn classifies_letters() {
        assert_eq!(parse_letter("[a.|.b.]").unwrap().kind(), Kind::Starter);
        assert_eq!(parse_letter("[.a|.b.]").unwrap().kind(), Kind::Terminator);
        assert!(parse_letter("[.a.|.b.]").unwrap().is_identity());
        assert!(parse_letter("[]").unwrap().is_identity());
        assert_eq!(parse_letter("[]").unwrap().carrier().len(), 0);
    }

    #[test]
    fn rejects_mixed_and_bare_rows() {
        assert!(matches!(
            parse_letter("[a.|.b]"),
            Err(LosetError::MixedKindLetter { offset: 0 })
        ));
        assert!(matches!(
            parse_letter("[a]"),
            Err(LosetError::MixedKindLetter { .. })
        ));
    }

    #[test]
    fn reports_syntax_errors_with_offsets() {
        assert!(matches!(
            parse_word(""),
            Err(LosetError::Syntax { offset: 0, .. })
        ));
        assert!(matches!(
            parse_word("[a."),
            Err(LosetError::Syntax { offset: 3, .. })
        ));
        assert!(matches!(
            parse_word("[a.] junk"),
            Err(LosetError::Syntax { offset: 5, .. })
        ));
        assert!(matches!(
            parse_letter("[1a.]"),
            Err(LosetError::Syntax { offset: 1, .. })
        ));
    }

    #[test]
    fn rejects_incoherent_words() {
        assert!(matches!(
            parse_word("[a.][b.]"),
            Err(LosetError::Word(StepsError::NotCoherent { .. }))
        ));
    }
}
