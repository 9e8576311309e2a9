use std::ops::Deref;

use super::MetricError;

/// A non-empty list of whitespace-free tokens.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TokenSequence(Vec<String>);

impl TokenSequence {
    pub fn new(tokens: Vec<String>) -> Result<Self, MetricError> {
        if tokens.is_empty() {
            return Err(MetricError::EmptyInput);
        }
        if tokens
            .iter()
            .any(|t| t.is_empty() || t.chars().any(char::is_whitespace))
        {
            return Err(MetricError::InvalidToken);
        }
        Ok(TokenSequence(tokens))
    }

    pub fn from_whitespace(text: &str) -> Result<Self, MetricError> {
        Self::new(text.split_whitespace().map(str::to_string).collect())
    }

    pub fn into_inner(self) -> Vec<String> {
        self.0
    }
}

impl Deref for TokenSequence {
    type Target = [String];

    fn deref(&self) -> &[String] {
        &self.0
    }
}

fn is_name_char(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '_' | '-' | ':')
}

/// Splits query text into tokens. Punctuation `{ } ( ) ; , #` always
/// stands alone. A `.` stands alone unless it sits between name characters,
/// as in `1.5`. A `?` directly followed by a name character starts a
/// variable token. IRIs in angle brackets are kept whole.
pub fn tokenize_query(text: &str) -> Result<TokenSequence, MetricError> {
    let mut tokens = Vec::new();
    for chunk in text.split_whitespace() {
        split_chunk(chunk, &mut tokens);
    }
    TokenSequence::new(tokens)
}

fn split_chunk(chunk: &str, out: &mut Vec<String>) {
    let chars: Vec<char> = chunk.chars().collect();
    let mut current = String::new();
    let mut i = 0;
    let flush = |current: &mut String, out: &mut Vec<String>| {
        if !current.is_empty() {
            out.push(std::mem::take(current));
        }
    };
    while i < chars.len() {
        let c = chars[i];
        let next = chars.get(i + 1).copied();
        match c {
            '<' if current.is_empty() && chars[i + 1..].contains(&'>') => {
                let close = i + 1 + chars[i + 1..].iter().position(|&d| d == '>').expect("contains '>'");
                out.push(chars[i..=close].iter().collect());
                i = close + 1;
                continue;
            }
            '{' | '}' | '(' | ')' | ';' | ',' | '#' => {
                flush(&mut current, out);
                out.push(c.to_string());
            }
            '.' if !current.is_empty() && next.is_some_and(is_name_char) => current.push(c),
            '.' => {
                flush(&mut current, out);
                out.push(".".to_string());
            }
            '?' if next.is_some_and(is_name_char) => {
                flush(&mut current, out);
                current.push('?');
            }
            '?' => {
                flush(&mut current, out);
                out.push("?".to_string());
            }
            c => current.push(c),
        }
        i += 1;
    }
    flush(&mut current, out);
}
