//! Readers for the Turtle subset used by schema files and for line-based
//! N-Triples instance samples.

use std::collections::BTreeMap;

use crate::sparql::lexer::{Lexer, Spanned, Tok};
use crate::sparql::{resolve_relative, XSD};

use super::SchemaError;

pub const RDF: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
pub const RDFS: &str = "http://www.w3.org/2000/01/rdf-schema#";
pub const OWL: &str = "http://www.w3.org/2002/07/owl#";

/// An RDF term with all prefixes expanded.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Node {
    Iri(String),
    Blank(String),
    Literal {
        value: String,
        datatype: Option<String>,
        language: Option<String>,
    },
}

impl Node {
    pub fn iri(&self) -> Option<&str> {
        match self {
            Node::Iri(iri) => Some(iri),
            _ => None,
        }
    }

    pub fn is_literal(&self) -> bool {
        matches!(self, Node::Literal { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ResolvedTriple {
    pub subject: Node,
    pub predicate: String,
    pub object: Node,
}

impl ResolvedTriple {
    pub fn new(subject: Node, predicate: impl Into<String>, object: Node) -> Self {
        ResolvedTriple {
            subject,
            predicate: predicate.into(),
            object,
        }
    }
}

struct TurtleReader<'a> {
    lexer: Lexer<'a>,
    lookahead: Option<Spanned>,
    prefixes: BTreeMap<String, String>,
    base: Option<String>,
}

/// Parses the Turtle subset: prefix/base directives (both `@prefix` and
/// SPARQL-style), IRIs, prefixed names, plain/typed/language literals,
/// numbers, booleans, `a`, and the `;`/`,` abbreviations. Blank nodes and
/// collections are rejected.
pub fn parse_turtle(text: &str) -> Result<Vec<ResolvedTriple>, SchemaError> {
    let mut r = TurtleReader {
        lexer: Lexer::new(text),
        lookahead: None,
        prefixes: BTreeMap::new(),
        base: None,
    };
    let mut out = Vec::new();
    loop {
        let t = r.peek()?.clone();
        match &t.tok {
            Tok::Eof => return Ok(out),
            Tok::At(d) if d == "prefix" => {
                r.next()?;
                r.prefix_decl()?;
                r.expect_dot()?;
            }
            Tok::At(d) if d == "base" => {
                r.next()?;
                r.base_decl()?;
                r.expect_dot()?;
            }
            Tok::Word(w) if w.eq_ignore_ascii_case("PREFIX") => {
                r.next()?;
                r.prefix_decl()?;
            }
            Tok::Word(w) if w.eq_ignore_ascii_case("BASE") => {
                r.next()?;
                r.base_decl()?;
            }
            _ => {
                r.triples(&mut out)?;
                r.expect_dot()?;
            }
        }
    }
}

impl TurtleReader<'_> {
    fn error(&self, offset: usize, message: impl Into<String>) -> SchemaError {
        SchemaError::Syntax {
            position: self.lexer.position(offset),
            message: message.into(),
        }
    }

    fn peek(&mut self) -> Result<&Spanned, SchemaError> {
        while self.lookahead.is_none() {
            let t = self.lexer.next_token().map_err(|e| self.error(e.offset, e.message))?;
            if !matches!(t.tok, Tok::Comment { .. }) {
                self.lookahead = Some(t);
            }
        }
        Ok(self.lookahead.as_ref().expect("lookahead filled"))
    }

    fn next(&mut self) -> Result<Spanned, SchemaError> {
        self.peek()?;
        Ok(self.lookahead.take().expect("lookahead filled"))
    }

    fn expect_dot(&mut self) -> Result<(), SchemaError> {
        let t = self.next()?;
        if t.tok == Tok::Punct('.') {
            Ok(())
        } else {
            Err(self.error(t.start, format!("expected '.', found {}", t.tok.describe())))
        }
    }

    fn prefix_decl(&mut self) -> Result<(), SchemaError> {
        let name = self.next()?;
        let Tok::PName { prefix, local } = &name.tok else {
            return Err(self.error(name.start, "expected a prefix name ending in ':'"));
        };
        if !local.is_empty() {
            return Err(self.error(name.start, "expected a prefix name ending in ':'"));
        }
        let iri = self.next()?;
        let Tok::IriRef(ns) = &iri.tok else {
            return Err(self.error(iri.start, "expected an IRI"));
        };
        let ns = resolve_relative(self.base.as_deref(), ns);
        self.prefixes.insert(prefix.clone(), ns);
        Ok(())
    }

    fn base_decl(&mut self) -> Result<(), SchemaError> {
        let iri = self.next()?;
        let Tok::IriRef(base) = &iri.tok else {
            return Err(self.error(iri.start, "expected an IRI"));
        };
        self.base = Some(resolve_relative(self.base.as_deref(), base));
        Ok(())
    }

    fn named(&self, t: &Spanned) -> Result<Option<String>, SchemaError> {
        Ok(match &t.tok {
            Tok::IriRef(iri) => Some(resolve_relative(self.base.as_deref(), iri)),
            Tok::PName { prefix, local } => {
                let ns = self
                    .prefixes
                    .get(prefix)
                    .ok_or_else(|| SchemaError::UnresolvablePrefix(prefix.clone()))?;
                Some(format!("{ns}{local}"))
            }
            _ => None,
        })
    }

    fn reject_bnode(&self, t: &Spanned) -> SchemaError {
        match t.tok {
            Tok::Punct('(') => self.error(t.start, "RDF collections are not supported"),
            _ => self.error(t.start, "blank nodes are not supported"),
        }
    }

    fn triples(&mut self, out: &mut Vec<ResolvedTriple>) -> Result<(), SchemaError> {
        let st = self.next()?;
        let subject = match self.named(&st)? {
            Some(iri) => Node::Iri(iri),
            None if matches!(st.tok, Tok::BlankNode(_) | Tok::Punct('[' | '(')) => return Err(self.reject_bnode(&st)),
            None => return Err(self.error(st.start, format!("expected a subject, found {}", st.tok.describe()))),
        };
        loop {
            let pt = self.next()?;
            let predicate = if pt.tok.is_word("a") {
                format!("{RDF}type")
            } else {
                match self.named(&pt)? {
                    Some(iri) => iri,
                    None => {
                        return Err(self.error(pt.start, format!("expected a predicate, found {}", pt.tok.describe())))
                    }
                }
            };
            loop {
                let object = self.object()?;
                out.push(ResolvedTriple::new(subject.clone(), predicate.clone(), object));
                if self.peek()?.tok == Tok::Punct(',') {
                    self.next()?;
                } else {
                    break;
                }
            }
            if self.peek()?.tok != Tok::Punct(';') {
                return Ok(());
            }
            while self.peek()?.tok == Tok::Punct(';') {
                self.next()?;
            }
            if self.peek()?.tok == Tok::Punct('.') {
                return Ok(());
            }
        }
    }

    fn object(&mut self) -> Result<Node, SchemaError> {
        let t = self.next()?;
        if let Some(iri) = self.named(&t)? {
            return Ok(Node::Iri(iri));
        }
        let typed = |value: &str, local: &str| Node::Literal {
            value: value.to_string(),
            datatype: Some(format!("{XSD}{local}")),
            language: None,
        };
        Ok(match &t.tok {
            Tok::Str(value) => {
                let mut datatype = None;
                let mut language = None;
                match self.peek()?.tok.clone() {
                    Tok::At(lang) => {
                        self.next()?;
                        language = Some(lang);
                    }
                    Tok::DoubleCaret => {
                        self.next()?;
                        let dt = self.next()?;
                        datatype = Some(
                            self.named(&dt)?
                                .ok_or_else(|| self.error(dt.start, "expected a datatype IRI"))?,
                        );
                    }
                    _ => {}
                }
                Node::Literal {
                    value: value.clone(),
                    datatype,
                    language,
                }
            }
            Tok::Integer(s) => typed(s, "integer"),
            Tok::Decimal(s) => typed(s, "decimal"),
            Tok::Double(s) => typed(s, "double"),
            Tok::Word(w) if w == "true" || w == "false" => typed(w, "boolean"),
            Tok::BlankNode(_) | Tok::Punct('[' | '(') => return Err(self.reject_bnode(&t)),
            other => return Err(self.error(t.start, format!("expected an object, found {}", other.describe()))),
        })
    }
}

/// Result of reading an N-Triples sample: well-formed triples plus the
/// 1-based line numbers of skipped malformed lines.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct NTriples {
    pub triples: Vec<ResolvedTriple>,
    pub malformed_lines: Vec<usize>,
}

/// Reads one triple per line: `<s> <p> <o> .` with absolute IRIs, blank
/// node labels or quoted literals. Malformed lines are skipped and counted.
pub fn parse_ntriples(text: &str) -> NTriples {
    let mut out = NTriples::default();
    for (idx, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        match parse_ntriples_line(trimmed) {
            Some(t) => out.triples.push(t),
            None => out.malformed_lines.push(idx + 1),
        }
    }
    out
}

fn parse_ntriples_line(line: &str) -> Option<ResolvedTriple> {
    let mut lx = Lexer::new(line);
    let mut next = || lx.next_token().ok().map(|s| s.tok);
    let subject = match next()? {
        Tok::IriRef(iri) if is_absolute(&iri) => Node::Iri(iri),
        Tok::BlankNode(b) => Node::Blank(b),
        _ => return None,
    };
    let predicate = match next()? {
        Tok::IriRef(iri) if is_absolute(&iri) => iri,
        _ => return None,
    };
    let mut after_object = None;
    let object = match next()? {
        Tok::IriRef(iri) if is_absolute(&iri) => Node::Iri(iri),
        Tok::BlankNode(b) => Node::Blank(b),
        Tok::Str(value) => {
            let mut datatype = None;
            let mut language = None;
            match next()? {
                Tok::At(lang) => language = Some(lang),
                Tok::DoubleCaret => match next()? {
                    Tok::IriRef(iri) => datatype = Some(iri),
                    _ => return None,
                },
                other => after_object = Some(other),
            }
            Node::Literal {
                value,
                datatype,
                language,
            }
        }
        _ => return None,
    };
    let dot = match after_object {
        Some(t) => t,
        None => next()?,
    };
    if dot != Tok::Punct('.') {
        return None;
    }
    match next()? {
        Tok::Eof | Tok::Comment { .. } => Some(ResolvedTriple::new(subject, predicate, object)),
        _ => None,
    }
}

fn is_absolute(iri: &str) -> bool {
    url::Url::parse(iri).is_ok()
}
