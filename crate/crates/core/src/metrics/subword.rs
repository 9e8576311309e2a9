use std::collections::{BTreeSet, HashSet};

use super::MetricError;

pub const WORD_BOUNDARY: char = '\u{2581}';

/// Subword pieces for greedy longest-match segmentation. Every character
/// of every piece is itself a piece.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubwordVocabulary {
    pieces: HashSet<String>,
    max_len: usize,
}

impl SubwordVocabulary {
    /// Builds a vocabulary, failing if a character of some piece is not a
    /// piece on its own.
    pub fn new<I, S>(pieces: I) -> Result<Self, MetricError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let pieces: HashSet<String> = pieces.into_iter().map(Into::into).filter(|p| !p.is_empty()).collect();
        let mut missing = BTreeSet::new();
        for piece in &pieces {
            for c in piece.chars() {
                if !pieces.contains(c.encode_utf8(&mut [0; 4]) as &str) {
                    missing.insert(c);
                }
            }
        }
        if !missing.is_empty() {
            return Err(MetricError::VocabularyClosure(missing.into_iter().collect()));
        }
        let max_len = pieces.iter().map(|p| p.chars().count()).max().unwrap_or(0);
        Ok(SubwordVocabulary { pieces, max_len })
    }

    /// Adds the characters of every piece before building.
    pub fn closed<I, S>(pieces: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut all: HashSet<String> = pieces.into_iter().map(Into::into).collect();
        let chars: Vec<String> = all.iter().flat_map(|p| p.chars()).map(String::from).collect();
        all.extend(chars);
        Self::new(all).expect("closed by construction")
    }

    /// Pieces equal to the whitespace tokens of `texts`.
    pub fn identity<'a>(texts: impl IntoIterator<Item = &'a str>) -> Self {
        Self::closed(texts.into_iter().flat_map(str::split_whitespace))
    }

    /// One piece per line; blank lines are ignored.
    pub fn parse(text: &str) -> Result<Self, MetricError> {
        Self::new(text.lines().map(|l| l.trim_end_matches('\r')).filter(|l| !l.is_empty()))
    }

    pub fn len(&self) -> usize {
        self.pieces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty()
    }

    /// Pieces sorted by length descending, then lexicographically.
    pub fn entries(&self) -> Vec<&str> {
        let mut v: Vec<&str> = self.pieces.iter().map(String::as_str).collect();
        v.sort_by(|a, b| b.chars().count().cmp(&a.chars().count()).then(a.cmp(b)));
        v
    }

    fn longest_match(&self, chars: &[char]) -> Option<usize> {
        (1..=self.max_len.min(chars.len()))
            .rev()
            .find(|&n| self.pieces.contains(&chars[..n].iter().collect::<String>()))
    }

    /// Segments each whitespace-separated word greedily. The word is first
    /// matched with a leading boundary marker; if no marked piece fits,
    /// the marker is dropped. Characters outside the vocabulary become
    /// single-character pieces.
    pub fn segment(&self, text: &str) -> Vec<String> {
        let mut out = Vec::new();
        for word in text.split_whitespace() {
            let mut chars: Vec<char> = std::iter::once(WORD_BOUNDARY).chain(word.chars()).collect();
            let mut i = match self.longest_match(&chars) {
                Some(n) => {
                    out.push(chars[..n].iter().collect());
                    n
                }
                None => {
                    chars.remove(0);
                    0
                }
            };
            while i < chars.len() {
                let n = self.longest_match(&chars[i..]).unwrap_or(1);
                out.push(chars[i..i + n].iter().collect());
                i += n;
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn greedy_longest_match() {
        let v = SubwordVocabulary::new(["ab", "a", "b"]).unwrap();
        assert_eq!(v.segment("abab"), ["ab", "ab"]);
        assert_eq!(v.segment("aba c"), ["ab", "a", "c"]);
    }

    #[test]
    fn boundary_marker_used_when_available() {
        let v = SubwordVocabulary::closed(["\u{2581}ab", "b"]);
        assert_eq!(v.segment("abb ba"), ["\u{2581}ab", "b", "\u{2581}", "b", "a"]);
    }

    #[test]
    fn closure_enforced() {
        assert_eq!(
            SubwordVocabulary::new(["ab", "a"]),
            Err(MetricError::VocabularyClosure(vec!['b']))
        );
        assert!(SubwordVocabulary::parse("ab\na\nb\n").is_ok());
    }

    #[test]
    fn entry_order() {
        let v = SubwordVocabulary::new(["b", "ab", "a"]).unwrap();
        assert_eq!(v.entries(), ["ab", "a", "b"]);
    }

    #[test]
    fn identity_segments_whole_words() {
        let v = SubwordVocabulary::identity(["SELECT ?x WHERE", "?xy ?x"]);
        assert_eq!(v.segment("?xy SELECT ?x"), ["?xy", "SELECT", "?x"]);
    }
}
