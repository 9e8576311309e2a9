//! Tokenizer shared by the SPARQL subset parser and the Turtle/N-Triples readers.
//!
//! The lexer is pull-based so that the SPARQL parser can switch to raw
//! character scanning for `FILTER` spans without re-tokenizing.

use std::fmt;

/// A byte offset into the source plus its 1-based line and column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Position {
    pub offset: usize,
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}", self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Tok {
    IriRef(String),
    PName {
        prefix: String,
        local: String,
    },
    Var(String),
    Str(String),
    Integer(String),
    Decimal(String),
    Double(String),
    /// `@word`: a language tag after a literal, or a Turtle directive.
    At(String),
    DoubleCaret,
    /// A bare name without a colon: keywords, `a`, `true`, function names.
    Word(String),
    BlankNode(String),
    Punct(char),
    Comment {
        text: String,
        own_line: bool,
    },
    Eof,
}

impl Tok {
    pub(crate) fn describe(&self) -> String {
        match self {
            Tok::IriRef(iri) => format!("<{iri}>"),
            Tok::PName { prefix, local } => format!("{prefix}:{local}"),
            Tok::Var(v) => format!("?{v}"),
            Tok::Str(_) => "string literal".to_string(),
            Tok::Integer(s) | Tok::Decimal(s) | Tok::Double(s) => s.clone(),
            Tok::At(s) => format!("@{s}"),
            Tok::DoubleCaret => "^^".to_string(),
            Tok::Word(w) => w.clone(),
            Tok::BlankNode(b) => format!("_:{b}"),
            Tok::Punct(c) => c.to_string(),
            Tok::Comment { .. } => "comment".to_string(),
            Tok::Eof => "end of input".to_string(),
        }
    }

    pub(crate) fn is_word(&self, keyword: &str) -> bool {
        matches!(self, Tok::Word(w) if w.eq_ignore_ascii_case(keyword))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Spanned {
    pub tok: Tok,
    pub start: usize,
    pub end: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct LexError {
    pub offset: usize,
    pub message: String,
}

pub(crate) struct Lexer<'a> {
    src: &'a str,
    pos: usize,
    line_starts: Vec<usize>,
}

pub(crate) fn is_name_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

pub(crate) fn is_name_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

fn is_prefix_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '-'
}

fn is_local_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | ':' | '%')
}

fn is_iri_char(c: char) -> bool {
    !(c.is_whitespace() || matches!(c, '<' | '>' | '"' | '{' | '}' | '|' | '^' | '`' | '\\'))
}

impl<'a> Lexer<'a> {
    pub(crate) fn new(src: &'a str) -> Self {
        let mut line_starts = vec![0];
        line_starts.extend(src.match_indices('\n').map(|(i, _)| i + 1));
        Lexer {
            src,
            pos: 0,
            line_starts,
        }
    }

    pub(crate) fn src(&self) -> &'a str {
        self.src
    }

    pub(crate) fn offset(&self) -> usize {
        self.pos
    }

    pub(crate) fn set_offset(&mut self, offset: usize) {
        self.pos = offset;
    }

    pub(crate) fn position(&self, offset: usize) -> Position {
        let line_idx = match self.line_starts.binary_search(&offset) {
            Ok(i) => i,
            Err(i) => i - 1,
        };
        let line_start = self.line_starts[line_idx];
        let column = self.src[line_start..offset.min(self.src.len())].chars().count() + 1;
        Position {
            offset,
            line: line_idx + 1,
            column,
        }
    }

    pub(crate) fn line_of(&self, offset: usize) -> usize {
        self.position(offset).line
    }

    fn peek_char(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn char_at(&self, offset: usize) -> Option<char> {
        self.src.get(offset..).and_then(|s| s.chars().next())
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek_char()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    pub(crate) fn skip_whitespace(&mut self) {
        while let Some(c) = self.peek_char() {
            if c.is_whitespace() {
                self.bump();
            } else {
                break;
            }
        }
    }

    fn err<T>(&self, offset: usize, message: impl Into<String>) -> Result<T, LexError> {
        Err(LexError {
            offset,
            message: message.into(),
        })
    }

    /// Returns the next token, including comments.
    pub(crate) fn next_token(&mut self) -> Result<Spanned, LexError> {
        self.skip_whitespace();
        let start = self.pos;
        let Some(c) = self.peek_char() else {
            return Ok(Spanned {
                tok: Tok::Eof,
                start,
                end: start,
            });
        };
        let tok = match c {
            '#' => self.lex_comment(start),
            '<' => self.lex_iri_or_punct(),
            '?' | '$' => self.lex_var_or_punct(),
            '"' | '\'' => self.lex_string(start)?,
            '@' => {
                self.bump();
                let word_start = self.pos;
                while let Some(c) = self.peek_char() {
                    if c.is_ascii_alphanumeric() || c == '-' {
                        self.bump();
                    } else {
                        break;
                    }
                }
                if self.pos == word_start {
                    return self.err(start, "expected a language tag or directive after '@'");
                }
                Tok::At(self.src[word_start..self.pos].to_string())
            }
            '^' if self.char_at(self.pos + 1) == Some('^') => {
                self.pos += 2;
                Tok::DoubleCaret
            }
            '0'..='9' => self.lex_number(start),
            '+' | '-' | '.'
                if self.char_at(self.pos + 1).is_some_and(|d| d.is_ascii_digit())
                    && (c != '.' || !self.previous_is_name_end(start)) =>
            {
                self.lex_number(start)
            }
            '_' if self.char_at(self.pos + 1) == Some(':') => {
                self.pos += 2;
                let label_start = self.pos;
                self.take_local();
                Tok::BlankNode(self.src[label_start..self.pos].to_string())
            }
            ':' => {
                self.bump();
                let local = self.take_local();
                Tok::PName {
                    prefix: String::new(),
                    local,
                }
            }
            c if c.is_ascii_alphabetic() || c == '_' => self.lex_word_or_pname(),
            _ => {
                self.bump();
                Tok::Punct(c)
            }
        };
        Ok(Spanned {
            tok,
            start,
            end: self.pos,
        })
    }

    fn previous_is_name_end(&self, offset: usize) -> bool {
        self.src[..offset]
            .chars()
            .next_back()
            .is_some_and(|c| c.is_ascii_alphanumeric())
    }

    fn lex_comment(&mut self, start: usize) -> Tok {
        let line_start = self.line_starts[self.line_of(start) - 1];
        let own_line = self.src[line_start..start].chars().all(char::is_whitespace);
        let end = self.src[start..]
            .find('\n')
            .map(|i| start + i)
            .unwrap_or(self.src.len());
        self.pos = end;
        let text = self.src[start..end].trim_start_matches('#').trim().to_string();
        Tok::Comment { text, own_line }
    }

    fn lex_iri_or_punct(&mut self) -> Tok {
        let start = self.pos;
        self.bump();
        let body_start = self.pos;
        while let Some(c) = self.peek_char() {
            if c == '>' {
                let iri = self.src[body_start..self.pos].to_string();
                self.bump();
                return Tok::IriRef(iri);
            }
            if !is_iri_char(c) {
                break;
            }
            self.bump();
        }
        self.pos = start + 1;
        Tok::Punct('<')
    }

    fn lex_var_or_punct(&mut self) -> Tok {
        let sigil = self.bump().unwrap_or('?');
        match self.peek_char() {
            Some(c) if is_name_start(c) => {
                let name_start = self.pos;
                while self.peek_char().is_some_and(is_name_char) {
                    self.bump();
                }
                Tok::Var(self.src[name_start..self.pos].to_string())
            }
            _ => Tok::Punct(sigil),
        }
    }

    fn lex_string(&mut self, start: usize) -> Result<Tok, LexError> {
        let quote = self.bump().unwrap_or('"');
        let triple = self.char_at(self.pos) == Some(quote) && self.char_at(self.pos + 1) == Some(quote);
        if triple {
            self.pos += 2;
        } else if self.char_at(self.pos) == Some(quote) {
            self.bump();
            return Ok(Tok::Str(String::new()));
        }
        let mut value = String::new();
        loop {
            let Some(c) = self.bump() else {
                return self.err(start, "unterminated string literal");
            };
            match c {
                '\\' => value.push(self.lex_escape(start)?),
                c if c == quote => {
                    if !triple {
                        return Ok(Tok::Str(value));
                    }
                    if self.char_at(self.pos) == Some(quote) && self.char_at(self.pos + 1) == Some(quote) {
                        self.pos += 2;
                        return Ok(Tok::Str(value));
                    }
                    value.push(c);
                }
                '\n' | '\r' if !triple => {
                    return self.err(start, "line break inside a short string literal");
                }
                c => value.push(c),
            }
        }
    }

    fn lex_escape(&mut self, literal_start: usize) -> Result<char, LexError> {
        let at = self.pos;
        let c = match self.bump() {
            Some('t') => '\t',
            Some('b') => '\u{8}',
            Some('n') => '\n',
            Some('r') => '\r',
            Some('f') => '\u{c}',
            Some('"') => '"',
            Some('\'') => '\'',
            Some('\\') => '\\',
            Some(u @ ('u' | 'U')) => {
                let width = if u == 'u' { 4 } else { 8 };
                let hex = self.src.get(self.pos..self.pos + width).unwrap_or("");
                let code = u32::from_str_radix(hex, 16).ok().and_then(char::from_u32);
                match code {
                    Some(ch) if hex.len() == width => {
                        self.pos += width;
                        ch
                    }
                    _ => return self.err(at, "invalid unicode escape"),
                }
            }
            Some(_) => return self.err(at, "invalid escape sequence"),
            None => return self.err(literal_start, "unterminated string literal"),
        };
        Ok(c)
    }

    fn lex_number(&mut self, start: usize) -> Tok {
        if matches!(self.peek_char(), Some('+' | '-')) {
            self.bump();
        }
        let digits = |lx: &mut Self| {
            let s = lx.pos;
            while lx.peek_char().is_some_and(|c| c.is_ascii_digit()) {
                lx.bump();
            }
            lx.pos > s
        };
        digits(self);
        let mut kind = 0; // 0 integer, 1 decimal, 2 double
        if self.peek_char() == Some('.') && self.char_at(self.pos + 1).is_some_and(|c| c.is_ascii_digit()) {
            self.bump();
            digits(self);
            kind = 1;
        }
        if matches!(self.peek_char(), Some('e' | 'E')) {
            let save = self.pos;
            self.bump();
            if matches!(self.peek_char(), Some('+' | '-')) {
                self.bump();
            }
            if digits(self) {
                kind = 2;
            } else {
                self.pos = save;
            }
        }
        let text = self.src[start..self.pos].to_string();
        match kind {
            0 => Tok::Integer(text),
            1 => Tok::Decimal(text),
            _ => Tok::Double(text),
        }
    }

    fn lex_word_or_pname(&mut self) -> Tok {
        let start = self.pos;
        while let Some(c) = self.peek_char() {
            if is_prefix_char(c) {
                self.bump();
            } else if c == '.' && self.char_at(self.pos + 1).is_some_and(is_prefix_char) {
                // interior dots are legal in prefix names, but not in bare words
                let mut probe = self.pos + 1;
                while self.char_at(probe).is_some_and(|c| is_prefix_char(c) || c == '.') {
                    probe += 1;
                }
                if self.char_at(probe) == Some(':') {
                    self.pos = probe;
                } else {
                    break;
                }
            } else {
                break;
            }
        }
        let name = self.src[start..self.pos].to_string();
        if self.peek_char() == Some(':') {
            self.bump();
            let local = self.take_local();
            Tok::PName { prefix: name, local }
        } else {
            Tok::Word(name)
        }
    }

    fn take_local(&mut self) -> String {
        let mut local = String::new();
        while let Some(c) = self.peek_char() {
            if is_local_char(c) || (c == '.' && self.char_at(self.pos + 1).is_some_and(is_local_char)) {
                local.push(c);
                self.bump();
            } else if c == '\\'
                && self
                    .char_at(self.pos + 1)
                    .is_some_and(|e| "_~.-!$&'()*+,;=/?#@%".contains(e))
            {
                self.bump();
                if let Some(e) = self.bump() {
                    local.push(e);
                }
            } else {
                break;
            }
        }
        local
    }

    /// Scans a balanced parenthesised span starting at the current position
    /// (after whitespace). Returns the byte range of the span, inclusive of
    /// the optional function name and the closing parenthesis.
    pub(crate) fn scan_balanced(&mut self) -> Result<(usize, usize), LexError> {
        self.skip_whitespace();
        let start = self.pos;
        // optional call name, e.g. `regex(` or `xsd:integer(`
        while let Some(c) = self.peek_char() {
            if c.is_ascii_alphanumeric() || matches!(c, '_' | ':' | '-' | '.') {
                self.bump();
            } else {
                break;
            }
        }
        self.skip_whitespace();
        if self.peek_char() != Some('(') {
            return self.err(self.pos, "expected '('");
        }
        let mut depth = 0usize;
        loop {
            let at = self.pos;
            let Some(c) = self.peek_char() else {
                return self.err(at, "unbalanced parentheses");
            };
            match c {
                '(' => {
                    depth += 1;
                    self.bump();
                }
                ')' => {
                    self.bump();
                    depth -= 1;
                    if depth == 0 {
                        return Ok((start, self.pos));
                    }
                }
                '"' | '\'' => {
                    self.lex_string(at)?;
                }
                '<' => {
                    self.lex_iri_or_punct();
                }
                '#' => return self.err(at, "comment inside FILTER"),
                _ => {
                    self.bump();
                }
            }
        }
    }
}

/// A variable occurrence inside a raw expression span.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct RawVar {
    /// Byte range of the name, excluding the `?`/`$` sigil.
    pub start: usize,
    pub end: usize,
}

/// Finds variable tokens in a raw expression, skipping string literals and IRIs.
pub(crate) fn raw_variables(raw: &str) -> Vec<RawVar> {
    let mut out = Vec::new();
    let bytes = raw.as_bytes();
    let mut lexer = Lexer::new(raw);
    while lexer.pos < raw.len() {
        let at = lexer.pos;
        let c = lexer.peek_char().unwrap_or(' ');
        match c {
            '"' | '\'' => {
                if lexer.lex_string(at).is_err() {
                    break;
                }
            }
            '<' => {
                lexer.lex_iri_or_punct();
            }
            '?' | '$' => {
                let prev_is_name = at > 0 && (bytes[at - 1] as char).is_ascii_alphanumeric();
                lexer.bump();
                let name_start = lexer.pos;
                if !prev_is_name && lexer.peek_char().is_some_and(is_name_start) {
                    while lexer.peek_char().is_some_and(is_name_char) {
                        lexer.bump();
                    }
                    out.push(RawVar {
                        start: name_start,
                        end: lexer.pos,
                    });
                }
            }
            _ => {
                lexer.bump();
            }
        }
    }
    out
}

/// Returns true when `raw` contains `word` as a standalone keyword outside
/// strings and IRIs (case-insensitive).
pub(crate) fn raw_contains_keyword(raw: &str, word: &str) -> bool {
    let mut lexer = Lexer::new(raw);
    loop {
        let at = lexer.pos;
        let Some(c) = lexer.peek_char() else {
            return false;
        };
        match c {
            '"' | '\'' => {
                if lexer.lex_string(at).is_err() {
                    return false;
                }
            }
            '<' => {
                lexer.lex_iri_or_punct();
            }
            c if c.is_ascii_alphabetic() => {
                while lexer.peek_char().is_some_and(|c| c.is_ascii_alphanumeric() || c == '_') {
                    lexer.bump();
                }
                let prev = raw[..at].chars().next_back();
                let standalone = !prev.is_some_and(|p| p == '?' || p == '$' || p == ':' || is_name_char(p))
                    && lexer.peek_char() != Some(':');
                if standalone && raw[at..lexer.pos].eq_ignore_ascii_case(word) {
                    return true;
                }
            }
            _ => {
                lexer.bump();
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(src: &str) -> Vec<Tok> {
        let mut lx = Lexer::new(src);
        let mut out = Vec::new();
        loop {
            let t = lx.next_token().unwrap().tok;
            if t == Tok::Eof {
                return out;
            }
            out.push(t);
        }
    }

    #[test]
    fn lexes_triple_with_trailing_comment() {
        let t = toks("?gene obo:RO_0002162 ?taxon . # in taxon");
        assert_eq!(
            t,
            vec![
                Tok::Var("gene".into()),
                Tok::PName {
                    prefix: "obo".into(),
                    local: "RO_0002162".into()
                },
                Tok::Var("taxon".into()),
                Tok::Punct('.'),
                Tok::Comment {
                    text: "in taxon".into(),
                    own_line: false
                },
            ]
        );
    }

    #[test]
    fn prefixed_name_does_not_swallow_terminator() {
        let t = toks(":a :b :c.");
        assert_eq!(t.last(), Some(&Tok::Punct('.')));
        assert_eq!(
            t[2],
            Tok::PName {
                prefix: String::new(),
                local: "c".into()
            }
        );
    }

    #[test]
    fn numbers_and_literals() {
        assert_eq!(
            toks("5 1.5 2e3 \"a\\\"b\"@en 'x'^^xsd:string"),
            vec![
                Tok::Integer("5".into()),
                Tok::Decimal("1.5".into()),
                Tok::Double("2e3".into()),
                Tok::Str("a\"b".into()),
                Tok::At("en".into()),
                Tok::Str("x".into()),
                Tok::DoubleCaret,
                Tok::PName {
                    prefix: "xsd".into(),
                    local: "string".into()
                },
            ]
        );
    }

    #[test]
    fn integer_then_terminator() {
        assert_eq!(toks("5 ."), vec![Tok::Integer("5".into()), Tok::Punct('.')]);
        assert_eq!(toks("5."), vec![Tok::Integer("5".into()), Tok::Punct('.')]);
    }

    #[test]
    fn own_line_comment_flag() {
        let t = toks("{\n  # lead\n  ?a ?b ?c }");
        assert!(matches!(&t[1], Tok::Comment { own_line: true, text } if text == "lead"));
    }

    #[test]
    fn balanced_span_skips_strings() {
        let src = r#" regex(?l, "a)b") }"#;
        let mut lx = Lexer::new(src);
        let (s, e) = lx.scan_balanced().unwrap();
        assert_eq!(&src[s..e], r#"regex(?l, "a)b")"#);
    }

    #[test]
    fn raw_variable_scan() {
        let raw = r#"(?gene != ?taxon && str(?x) = "?notavar")"#;
        let names: Vec<&str> = raw_variables(raw).iter().map(|v| &raw[v.start..v.end]).collect();
        assert_eq!(names, vec!["gene", "taxon", "x"]);
    }

    #[test]
    fn keyword_detection() {
        assert!(raw_contains_keyword("NOT EXISTS { ?a ?b ?c }", "exists"));
        assert!(!raw_contains_keyword("(?exists = \"EXISTS\")", "exists"));
    }
}
