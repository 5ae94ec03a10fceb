//! Comment extraction from Python source.
//!
//! Two kinds of units are produced: `#` line comments (merged into blocks by
//! [`merge_line_blocks`]) and docstrings. A docstring is any expression
//! statement made only of string literals, wherever it appears, optionally
//! wrapped in parentheses and possibly implicitly concatenated.

mod lexer;

use serde::{Deserialize, Serialize};

use crate::ingest::SourceFile;
use lexer::{Tok, Token};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CommentKind {
    #[serde(rename = "line")]
    LineBlock,
    #[serde(rename = "docstring")]
    Docstring,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommentUnit {
    pub id: u64,
    pub file: String,
    pub start_line: usize,
    pub end_line: usize,
    /// Character column of the `#` or of the first string token.
    pub column: usize,
    pub kind: CommentKind,
    pub raw_text: String,
}

#[derive(Debug, Clone, Default)]
pub struct Extraction {
    pub units: Vec<CommentUnit>,
    pub warnings: Vec<String>,
}

const COMPOUND_KEYWORDS: &[&str] = &[
    "if", "elif", "else", "for", "while", "try", "except", "finally", "with", "def", "class",
    "async", "match", "case",
];

/// Returns every comment in `source` in source order, without merging.
///
/// Ids are zero; numbering happens once results for a whole corpus are in order.
pub fn extract_comments(source: &SourceFile) -> Extraction {
    let file = source.path.to_string_lossy().into_owned();
    extract_from_text(&file, &source.text)
}

pub fn extract_from_text(file: &str, text: &str) -> Extraction {
    let lexed = lexer::tokenize(text);
    let mut out = Extraction::default();
    StatementScanner::new(file, &mut out.units).run(&lexed.tokens);
    if let Some(err) = lexed.error {
        out.warnings.push(format!(
            "{file}:{}: {}; comments after this point were not extracted",
            err.line, err.message
        ));
    }
    out.units
        .sort_by_key(|u| (u.start_line, u.column, u.kind == CommentKind::Docstring));
    out
}

/// Extraction followed by line-block merging.
pub fn extract_units(source: &SourceFile) -> Extraction {
    let mut ex = extract_comments(source);
    ex.units = merge_line_blocks(ex.units);
    ex
}

/// Merges `#` comments on consecutive lines that start at the same column.
pub fn merge_line_blocks(units: Vec<CommentUnit>) -> Vec<CommentUnit> {
    let mut merged: Vec<CommentUnit> = Vec::with_capacity(units.len());
    for unit in units {
        if let Some(prev) = merged.last_mut() {
            if prev.kind == CommentKind::LineBlock
                && unit.kind == CommentKind::LineBlock
                && prev.file == unit.file
                && prev.column == unit.column
                && unit.start_line == prev.end_line + 1
            {
                prev.raw_text.push('\n');
                prev.raw_text.push_str(&unit.raw_text);
                prev.end_line = unit.end_line;
                continue;
            }
        }
        merged.push(unit);
    }
    merged
}

/// Assigns consecutive ids starting at `next`; returns the following id.
pub fn number_units(units: &mut [CommentUnit], mut next: u64) -> u64 {
    for unit in units {
        unit.id = next;
        next += 1;
    }
    next
}

/// Drops the `#` marker and a single following space.
fn line_comment_text(text: &str) -> &str {
    text.strip_prefix(' ').unwrap_or(text)
}

struct Part<'a> {
    body: &'a str,
    start_line: usize,
    end_line: usize,
    column: usize,
}

#[derive(Default)]
struct Candidate<'a> {
    opens: usize,
    closes: usize,
    parts: Vec<Part<'a>>,
}

impl Candidate<'_> {
    fn complete(&self) -> bool {
        !self.parts.is_empty() && self.opens == self.closes
    }
}

struct StatementScanner<'a, 'u> {
    file: &'a str,
    units: &'u mut Vec<CommentUnit>,
    at_stmt_start: bool,
    first_in_line: bool,
    in_header: bool,
    lambdas: usize,
    candidate: Option<Candidate<'a>>,
}

impl<'a, 'u> StatementScanner<'a, 'u> {
    fn new(file: &'a str, units: &'u mut Vec<CommentUnit>) -> Self {
        StatementScanner {
            file,
            units,
            at_stmt_start: true,
            first_in_line: true,
            in_header: false,
            lambdas: 0,
            candidate: None,
        }
    }

    fn run(mut self, tokens: &[Token<'a>]) {
        for token in tokens {
            self.step(token);
        }
        self.flush();
    }

    fn flush(&mut self) {
        if let Some(c) = self.candidate.take() {
            if c.complete() {
                self.emit_docstring(c);
            }
        }
    }

    fn emit_docstring(&mut self, c: Candidate<'a>) {
        let first = &c.parts[0];
        let last = &c.parts[c.parts.len() - 1];
        self.units.push(CommentUnit {
            id: 0,
            file: self.file.to_owned(),
            start_line: first.start_line,
            end_line: last.end_line,
            column: first.column,
            kind: CommentKind::Docstring,
            raw_text: c.parts.iter().map(|p| p.body).collect(),
        });
    }

    /// Feeds a token to the pending docstring candidate. Returns true if consumed.
    fn feed_candidate(&mut self, tok: &Tok<'a>) -> bool {
        let Some(c) = self.candidate.as_mut() else {
            return false;
        };
        match tok {
            Tok::Open if c.parts.is_empty() => {
                c.opens += 1;
                true
            }
            Tok::Str {
                body,
                start_line,
                end_line,
                column,
            } if c.closes == 0 => {
                c.parts.push(Part {
                    body,
                    start_line: *start_line,
                    end_line: *end_line,
                    column: *column,
                });
                true
            }
            Tok::Close if !c.parts.is_empty() && c.closes < c.opens => {
                c.closes += 1;
                true
            }
            Tok::Newline | Tok::Semi => {
                let c = self.candidate.take().unwrap();
                if c.complete() {
                    self.emit_docstring(c);
                }
                false
            }
            _ => {
                self.candidate = None;
                false
            }
        }
    }

    fn step(&mut self, token: &Token<'a>) {
        if let Tok::Comment { text, line, column } = token.tok {
            self.units.push(CommentUnit {
                id: 0,
                file: self.file.to_owned(),
                start_line: line,
                end_line: line,
                column,
                kind: CommentKind::LineBlock,
                raw_text: line_comment_text(text).to_owned(),
            });
            return;
        }
        if self.feed_candidate(&token.tok) {
            return;
        }
        match token.tok {
            Tok::Newline | Tok::Semi => {
                self.at_stmt_start = true;
                self.first_in_line = true;
                self.in_header = false;
                self.lambdas = 0;
                return;
            }
            Tok::Colon if token.depth == 0 => {
                if self.lambdas > 0 {
                    self.lambdas -= 1;
                } else if self.in_header {
                    self.in_header = false;
                    self.at_stmt_start = true;
                    self.first_in_line = false;
                    return;
                }
            }
            Tok::Name(name) => {
                if self.first_in_line && COMPOUND_KEYWORDS.contains(&name) {
                    self.in_header = true;
                }
                if name == "lambda" && token.depth == 0 {
                    self.lambdas += 1;
                }
            }
            Tok::Str { .. } | Tok::Open if self.at_stmt_start => {
                self.candidate = Some(Candidate::default());
                self.feed_candidate(&token.tok);
            }
            _ => {}
        }
        self.at_stmt_start = false;
        self.first_in_line = false;
    }
}
