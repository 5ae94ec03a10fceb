//! A minimal Python tokenizer: enough structure to find comments, string
//! literals, bracket depth and statement boundaries. No AST is built.

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Tok<'a> {
    Name(&'a str),
    Str {
        body: &'a str,
        start_line: usize,
        end_line: usize,
        column: usize,
    },
    Comment {
        text: &'a str,
        line: usize,
        column: usize,
    },
    Open,
    Close,
    /// A `:` that is not part of `:=`.
    Colon,
    Semi,
    /// End of a logical line.
    Newline,
    Other,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Token<'a> {
    pub tok: Tok<'a>,
    /// Bracket depth before this token.
    pub depth: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct LexError {
    pub line: usize,
    pub message: String,
}

pub(crate) struct Lexed<'a> {
    pub tokens: Vec<Token<'a>>,
    pub error: Option<LexError>,
}

struct Lexer<'a> {
    src: &'a str,
    b: &'a [u8],
    pos: usize,
    line: usize,
    line_start: usize,
    depth: usize,
    tokens: Vec<Token<'a>>,
}

pub(crate) fn tokenize(src: &str) -> Lexed<'_> {
    let mut lx = Lexer {
        src,
        b: src.as_bytes(),
        pos: 0,
        line: 1,
        line_start: 0,
        depth: 0,
        tokens: Vec::new(),
    };
    let error = lx.run().err();
    Lexed {
        tokens: lx.tokens,
        error,
    }
}

fn is_ident_start(c: u8) -> bool {
    c.is_ascii_alphabetic() || c == b'_' || c >= 0x80
}

fn is_ident_continue(c: u8) -> bool {
    c.is_ascii_alphanumeric() || c == b'_' || c >= 0x80
}

fn is_string_prefix(ident: &str) -> bool {
    if ident.len() > 2 {
        return false;
    }
    let lower = ident.to_ascii_lowercase();
    matches!(
        lower.as_str(),
        "r" | "u" | "b" | "f" | "t" | "br" | "rb" | "fr" | "rf" | "tr" | "rt"
    )
}

const BOM: &str = "\u{feff}";

impl<'a> Lexer<'a> {
    fn peek(&self, off: usize) -> Option<u8> {
        self.b.get(self.pos + off).copied()
    }

    fn push(&mut self, tok: Tok<'a>) {
        self.tokens.push(Token {
            tok,
            depth: self.depth,
        });
    }

    fn column_of(&self, pos: usize) -> usize {
        self.src[self.line_start..pos].chars().count()
    }

    fn newline_at(&mut self, pos: usize) {
        self.line += 1;
        self.line_start = pos + 1;
    }

    fn err(&self, message: impl Into<String>) -> LexError {
        LexError {
            line: self.line,
            message: message.into(),
        }
    }

    fn run(&mut self) -> Result<(), LexError> {
        while let Some(c) = self.peek(0) {
            match c {
                b'\n' => {
                    if self.depth == 0 {
                        self.push(Tok::Newline);
                    }
                    self.newline_at(self.pos);
                    self.pos += 1;
                }
                b' ' | b'\t' | b'\r' | 0x0c => self.pos += 1,
                b'\\' => {
                    // explicit line joining
                    match (self.peek(1), self.peek(2)) {
                        (Some(b'\n'), _) => {
                            self.newline_at(self.pos + 1);
                            self.pos += 2;
                        }
                        (Some(b'\r'), Some(b'\n')) => {
                            self.newline_at(self.pos + 2);
                            self.pos += 3;
                        }
                        _ => {
                            self.push(Tok::Other);
                            self.pos += 1;
                        }
                    }
                }
                b'#' => {
                    let start = self.pos;
                    let end = self.src[start..]
                        .find('\n')
                        .map_or(self.src.len(), |i| start + i);
                    let text = self.src[start + 1..end].trim_end_matches('\r');
                    let column = self.column_of(start);
                    self.push(Tok::Comment {
                        text,
                        line: self.line,
                        column,
                    });
                    self.pos = end;
                }
                b'\'' | b'"' => {
                    let tok = self.lex_string(self.pos, self.pos)?;
                    self.push(tok);
                }
                b'(' | b'[' | b'{' => {
                    self.push(Tok::Open);
                    self.depth += 1;
                    self.pos += 1;
                }
                b')' | b']' | b'}' => {
                    self.depth = self.depth.saturating_sub(1);
                    self.push(Tok::Close);
                    self.pos += 1;
                }
                b':' => {
                    if self.peek(1) == Some(b'=') {
                        self.push(Tok::Other);
                        self.pos += 2;
                    } else {
                        self.push(Tok::Colon);
                        self.pos += 1;
                    }
                }
                b';' => {
                    self.push(Tok::Semi);
                    self.pos += 1;
                }
                b'0'..=b'9' => self.skip_number(),
                b'.' if self.peek(1).is_some_and(|d| d.is_ascii_digit()) => self.skip_number(),
                c if is_ident_start(c) => {
                    if self.src[self.pos..].starts_with(BOM) {
                        self.pos += BOM.len();
                        continue;
                    }
                    let start = self.pos;
                    while self.peek(0).is_some_and(is_ident_continue) {
                        self.pos += 1;
                    }
                    let ident = &self.src[start..self.pos];
                    if matches!(self.peek(0), Some(b'\'' | b'"')) && is_string_prefix(ident) {
                        let tok = self.lex_string(start, self.pos)?;
                        self.push(tok);
                    } else {
                        self.push(Tok::Name(ident));
                    }
                }
                _ => {
                    self.push(Tok::Other);
                    self.pos += 1;
                }
            }
        }
        Ok(())
    }

    fn skip_number(&mut self) {
        while let Some(c) = self.peek(0) {
            let exponent_sign =
                matches!(c, b'+' | b'-') && matches!(self.b[self.pos - 1], b'e' | b'E');
            if c.is_ascii_alphanumeric() || c == b'_' || c == b'.' || exponent_sign {
                self.pos += 1;
            } else {
                break;
            }
        }
        self.push(Tok::Other);
    }

    /// Lexes a string literal whose prefix starts at `start` and whose opening
    /// quote is at `quote_pos`. Leaves `pos` after the closing quote.
    fn lex_string(&mut self, start: usize, quote_pos: usize) -> Result<Tok<'a>, LexError> {
        let prefix = &self.src[start..quote_pos];
        let formatted = prefix.bytes().any(|c| matches!(c, b'f' | b'F' | b't' | b'T'));
        let start_line = self.line;
        let column = self.column_of(start);
        self.pos = quote_pos;
        let (body_start, body_end) = self.scan_string_body(formatted)?;
        Ok(Tok::Str {
            body: &self.src[body_start..body_end],
            start_line,
            end_line: self.line,
            column,
        })
    }

    /// `pos` is at the opening quote. Returns the body span.
    fn scan_string_body(&mut self, formatted: bool) -> Result<(usize, usize), LexError> {
        let quote = self.b[self.pos];
        let triple = self.peek(1) == Some(quote) && self.peek(2) == Some(quote);
        let open_len = if triple { 3 } else { 1 };
        self.pos += open_len;
        let body_start = self.pos;
        loop {
            let Some(c) = self.peek(0) else {
                return Err(self.err("unterminated string literal at end of file"));
            };
            match c {
                b'\\' => match (self.peek(1), self.peek(2)) {
                    (Some(b'\n'), _) => {
                        self.newline_at(self.pos + 1);
                        self.pos += 2;
                    }
                    (Some(b'\r'), Some(b'\n')) => {
                        self.newline_at(self.pos + 2);
                        self.pos += 3;
                    }
                    _ => self.pos += 2,
                },
                b'\n' => {
                    if !triple {
                        return Err(self.err("unterminated single-quoted string literal"));
                    }
                    self.newline_at(self.pos);
                    self.pos += 1;
                }
                b'{' if formatted => {
                    if self.peek(1) == Some(b'{') {
                        self.pos += 2;
                    } else {
                        self.pos += 1;
                        self.skip_replacement_field()?;
                    }
                }
                c if c == quote => {
                    if !triple {
                        let end = self.pos;
                        self.pos += 1;
                        return Ok((body_start, end));
                    }
                    if self.peek(1) == Some(quote) && self.peek(2) == Some(quote) {
                        let end = self.pos;
                        self.pos += 3;
                        return Ok((body_start, end));
                    }
                    self.pos += 1;
                }
                _ => self.pos += 1,
            }
        }
    }

    /// Skips an f-string replacement field; `pos` is just past its `{`.
    fn skip_replacement_field(&mut self) -> Result<(), LexError> {
        let mut depth = 0usize;
        loop {
            let Some(c) = self.peek(0) else {
                return Err(self.err("unterminated f-string replacement field"));
            };
            match c {
                b'\n' => {
                    self.newline_at(self.pos);
                    self.pos += 1;
                }
                b'(' | b'[' | b'{' => {
                    depth += 1;
                    self.pos += 1;
                }
                b')' | b']' => {
                    depth = depth.saturating_sub(1);
                    self.pos += 1;
                }
                b'}' => {
                    self.pos += 1;
                    if depth == 0 {
                        return Ok(());
                    }
                    depth -= 1;
                }
                b':' if depth == 0 && self.peek(1) != Some(b'=') => {
                    self.pos += 1;
                    return self.skip_format_spec();
                }
                b'\'' | b'"' => {
                    self.scan_string_body(false)?;
                }
                c if is_ident_start(c) => {
                    let start = self.pos;
                    while self.peek(0).is_some_and(is_ident_continue) {
                        self.pos += 1;
                    }
                    let ident = &self.src[start..self.pos];
                    if matches!(self.peek(0), Some(b'\'' | b'"')) && is_string_prefix(ident) {
                        let nested_f = ident.bytes().any(|c| matches!(c, b'f' | b'F' | b't' | b'T'));
                        self.scan_string_body(nested_f)?;
                    }
                }
                _ => self.pos += 1,
            }
        }
    }

    /// Format spec after `:` inside a replacement field; quotes are literal here.
    fn skip_format_spec(&mut self) -> Result<(), LexError> {
        loop {
            let Some(c) = self.peek(0) else {
                return Err(self.err("unterminated f-string format spec"));
            };
            match c {
                b'\n' => {
                    self.newline_at(self.pos);
                    self.pos += 1;
                }
                b'{' => {
                    self.pos += 1;
                    self.skip_replacement_field()?;
                }
                b'}' => {
                    self.pos += 1;
                    return Ok(());
                }
                _ => self.pos += 1,
            }
        }
    }
}
