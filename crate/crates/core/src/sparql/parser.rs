use super::ast::*;
use super::lexer::{raw_contains_keyword, LexError, Lexer, Spanned, Tok};
use super::SparqlError;

const UNSUPPORTED_FORMS: &[&str] = &["CONSTRUCT", "ASK", "DESCRIBE", "INSERT", "DELETE", "LOAD", "CLEAR"];
const UNSUPPORTED_PATTERNS: &[&str] = &["GRAPH", "MINUS", "BIND", "VALUES", "SERVICE"];

struct CommentTok {
    offset: usize,
    own_line: bool,
    text: String,
}

struct Parser<'a> {
    lexer: Lexer<'a>,
    lookahead: Option<Spanned>,
    comments: Vec<CommentTok>,
    /// (start, end) byte offsets of every triple, in creation order.
    triple_spans: Vec<(usize, usize)>,
    prologue: Prologue,
}

/// Parses a SELECT query in the supported subset.
///
/// Full-line comments attach to the next triple pattern; end-of-line
/// comments attach to the last triple completed on that line. When a
/// triple collects several comments they are joined with `"; "`.
pub fn parse_query(text: &str) -> Result<SelectQuery, SparqlError> {
    let mut p = Parser {
        lexer: Lexer::new(text),
        lookahead: None,
        comments: Vec::new(),
        triple_spans: Vec::new(),
        prologue: Prologue::default(),
    };
    p.parse_prologue()?;
    let (distinct, projection) = p.parse_select_clause()?;
    if p.peek()?.tok.is_word("FROM") {
        return Err(p.unsupported("FROM clause"));
    }
    if p.peek()?.tok.is_word("WHERE") {
        p.next()?;
    }
    p.expect_punct('{')?;
    let mut where_clause = p.parse_group_body()?;
    let modifiers = p.parse_modifiers()?;
    let t = p.peek()?.clone();
    match &t.tok {
        Tok::Eof => {}
        Tok::Word(w) if ["GROUP", "HAVING", "VALUES"].iter().any(|k| w.eq_ignore_ascii_case(k)) => {
            return Err(p.unsupported(&w.to_ascii_uppercase()))
        }
        _ => return Err(p.syntax(&t, &["ORDER BY", "LIMIT", "OFFSET", "end of input"])),
    }
    p.attach_comments(&mut where_clause);
    let query = SelectQuery {
        prologue: p.prologue,
        distinct,
        projection,
        where_clause,
        modifiers,
    };
    query.check_invariants()?;
    Ok(query)
}

impl<'a> Parser<'a> {
    fn lex_error(&self, e: LexError) -> SparqlError {
        SparqlError::Syntax {
            position: self.lexer.position(e.offset),
            expected: vec!["a valid token".to_string()],
            found: e.message,
        }
    }

    fn peek(&mut self) -> Result<&Spanned, SparqlError> {
        if self.lookahead.is_none() {
            loop {
                let t = self.lexer.next_token().map_err(|e| self.lex_error(e))?;
                if let Tok::Comment { text, own_line } = t.tok {
                    if !text.is_empty() {
                        self.comments.push(CommentTok {
                            offset: t.start,
                            own_line,
                            text,
                        });
                    }
                    continue;
                }
                self.lookahead = Some(t);
                break;
            }
        }
        Ok(self.lookahead.as_ref().expect("lookahead filled"))
    }

    fn next(&mut self) -> Result<Spanned, SparqlError> {
        self.peek()?;
        Ok(self.lookahead.take().expect("lookahead filled"))
    }

    fn syntax(&self, at: &Spanned, expected: &[&str]) -> SparqlError {
        SparqlError::Syntax {
            position: self.lexer.position(at.start),
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: at.tok.describe(),
        }
    }

    fn unsupported(&self, name: &str) -> SparqlError {
        let offset = self
            .lookahead
            .as_ref()
            .map(|t| t.start)
            .unwrap_or_else(|| self.lexer.offset());
        self.unsupported_at(name, offset)
    }

    fn unsupported_at(&self, name: &str, offset: usize) -> SparqlError {
        SparqlError::UnsupportedConstruct {
            name: name.to_string(),
            position: self.lexer.position(offset),
        }
    }

    fn expect_punct(&mut self, c: char) -> Result<Spanned, SparqlError> {
        let t = self.next()?;
        if t.tok == Tok::Punct(c) {
            Ok(t)
        } else {
            Err(self.syntax(&t, &[&c.to_string()]))
        }
    }

    fn expect_word(&mut self, keyword: &str) -> Result<Spanned, SparqlError> {
        let t = self.next()?;
        if t.tok.is_word(keyword) {
            Ok(t)
        } else {
            Err(self.syntax(&t, &[keyword]))
        }
    }

    fn parse_prologue(&mut self) -> Result<(), SparqlError> {
        loop {
            let t = self.peek()?.clone();
            if t.tok.is_word("PREFIX") {
                self.next()?;
                let name = self.next()?;
                let Tok::PName { prefix, local } = &name.tok else {
                    return Err(self.syntax(&name, &["prefix name ending in ':'"]));
                };
                if !local.is_empty() {
                    return Err(self.syntax(&name, &["prefix name ending in ':'"]));
                }
                let iri = self.next()?;
                let Tok::IriRef(ns) = iri.tok else {
                    return Err(self.syntax(&iri, &["IRI"]));
                };
                if self.prologue.prefixes.insert(prefix.clone(), ns).is_some() {
                    return Err(SparqlError::Semantic(format!("prefix '{prefix}:' declared twice")));
                }
            } else if t.tok.is_word("BASE") {
                self.next()?;
                let iri = self.next()?;
                let Tok::IriRef(base) = iri.tok else {
                    return Err(self.syntax(&iri, &["IRI"]));
                };
                if self.prologue.base.replace(base).is_some() {
                    return Err(SparqlError::Semantic("BASE declared twice".into()));
                }
            } else {
                return Ok(());
            }
        }
    }

    fn parse_select_clause(&mut self) -> Result<(bool, Projection), SparqlError> {
        let t = self.peek()?.clone();
        if let Tok::Word(w) = &t.tok {
            if let Some(form) = UNSUPPORTED_FORMS.iter().find(|f| w.eq_ignore_ascii_case(f)) {
                return Err(self.unsupported(form));
            }
        }
        self.expect_word("SELECT")?;
        let mut distinct = false;
        let t = self.peek()?.clone();
        if t.tok.is_word("DISTINCT") {
            self.next()?;
            distinct = true;
        } else if t.tok.is_word("REDUCED") {
            return Err(self.unsupported("REDUCED"));
        }
        if self.peek()?.tok == Tok::Punct('*') {
            self.next()?;
            return Ok((distinct, Projection::Star));
        }
        let mut vars = Vec::new();
        loop {
            let t = self.peek()?.clone();
            match &t.tok {
                Tok::Var(name) => {
                    self.next()?;
                    vars.push(Variable::new(name.clone())?);
                }
                Tok::Punct('(') => return Err(self.unsupported("projection expression")),
                _ if vars.is_empty() => {
                    let expected: &[&str] = if distinct {
                        &["variable", "*"]
                    } else {
                        &["DISTINCT", "variable", "*"]
                    };
                    return Err(self.syntax(&t, expected));
                }
                _ => return Ok((distinct, Projection::Variables(vars))),
            }
        }
    }

    /// Parses group elements up to and including the closing brace.
    fn parse_group_body(&mut self) -> Result<GraphPattern, SparqlError> {
        let mut elements = Vec::new();
        loop {
            let t = self.peek()?.clone();
            match &t.tok {
                Tok::Punct('}') => {
                    self.next()?;
                    return Ok(GraphPattern::new(elements));
                }
                Tok::Punct('.') if !elements.is_empty() => {
                    self.next()?;
                }
                Tok::Word(w) if w.eq_ignore_ascii_case("OPTIONAL") => {
                    self.next()?;
                    self.expect_punct('{')?;
                    elements.push(PatternElement::Optional(self.parse_group_body()?));
                }
                Tok::Word(w) if w.eq_ignore_ascii_case("FILTER") => {
                    self.next()?;
                    elements.push(PatternElement::Filter(self.parse_filter_span()?));
                }
                Tok::Punct('{') => {
                    self.next()?;
                    elements.push(self.parse_union(t.start)?);
                }
                Tok::Word(w) if w.eq_ignore_ascii_case("SELECT") => return Err(self.unsupported("subquery")),
                Tok::Word(w) if UNSUPPORTED_PATTERNS.iter().any(|k| w.eq_ignore_ascii_case(k)) => {
                    return Err(self.unsupported(&w.to_ascii_uppercase()))
                }
                Tok::Eof => return Err(self.syntax(&t, &["}"])),
                _ => {
                    self.parse_triples(&mut elements)?;
                    let t = self.peek()?.clone();
                    match &t.tok {
                        Tok::Punct('.') => {
                            self.next()?;
                        }
                        Tok::Punct('}') | Tok::Punct('{') => {}
                        Tok::Word(w)
                            if ["OPTIONAL", "FILTER", "SELECT"]
                                .iter()
                                .chain(UNSUPPORTED_PATTERNS)
                                .any(|k| w.eq_ignore_ascii_case(k)) => {}
                        _ => return Err(self.syntax(&t, &[".", "}"])),
                    }
                }
            }
        }
    }

    fn parse_union(&mut self, open_offset: usize) -> Result<PatternElement, SparqlError> {
        let left = self.parse_group_body()?;
        if !self.peek()?.tok.is_word("UNION") {
            return Err(self.unsupported_at("nested group without UNION", open_offset));
        }
        let mut acc: Option<PatternElement> = None;
        let mut left = Some(left);
        while self.peek()?.tok.is_word("UNION") {
            self.next()?;
            self.expect_punct('{')?;
            let right = self.parse_group_body()?;
            let lhs = match acc.take() {
                None => left.take().expect("left operand"),
                Some(prev) => GraphPattern::new(vec![prev]),
            };
            acc = Some(PatternElement::Union(lhs, right));
        }
        Ok(acc.expect("at least one UNION"))
    }

    fn parse_filter_span(&mut self) -> Result<String, SparqlError> {
        debug_assert!(self.lookahead.is_none());
        let resume = self.lexer.offset();
        let first = self.lexer.next_token().map_err(|e| self.lex_error(e))?;
        if first.tok.is_word("NOT") || first.tok.is_word("EXISTS") {
            return Err(self.unsupported_at("EXISTS filter", first.start));
        }
        self.lexer.set_offset(resume);
        let (start, end) = self.lexer.scan_balanced().map_err(|e| {
            if e.message.contains("comment") {
                self.unsupported_at("comment inside FILTER", e.offset)
            } else {
                SparqlError::Syntax {
                    position: self.lexer.position(e.offset),
                    expected: vec!["(".into(), ")".into()],
                    found: e.message,
                }
            }
        })?;
        let raw = self.lexer.src()[start..end].to_string();
        if raw_contains_keyword(&raw, "EXISTS") {
            return Err(self.unsupported_at("EXISTS filter", start));
        }
        Ok(raw)
    }

    fn parse_triples(&mut self, out: &mut Vec<PatternElement>) -> Result<(), SparqlError> {
        let subject_tok = self.next()?;
        let subject_start = subject_tok.start;
        let subject = self.subject_term(&subject_tok)?;
        loop {
            let pred_tok = self.next()?;
            let predicate = self.predicate_term(&pred_tok)?;
            if let Tok::Punct(c @ ('/' | '|' | '*' | '+' | '?')) = self.peek()?.tok {
                let _ = c;
                return Err(self.unsupported("property path"));
            }
            loop {
                let obj_tok = self.next()?;
                let (object, end) = self.object_term(&obj_tok)?;
                self.triple_spans.push((subject_start, end));
                out.push(PatternElement::Triple(TriplePattern::new(
                    subject.clone(),
                    predicate.clone(),
                    object,
                )));
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
            let starts_predicate = matches!(
                &self.peek()?.tok,
                Tok::Var(_) | Tok::IriRef(_) | Tok::PName { .. } | Tok::Punct('^' | '!' | '(')
            ) || self.peek()?.tok.is_word("a");
            if !starts_predicate {
                return Ok(());
            }
        }
    }

    fn named(&self, t: &Spanned) -> Result<Option<Term>, SparqlError> {
        Ok(match &t.tok {
            Tok::IriRef(iri) => Some(Term::Iri(iri.clone())),
            Tok::PName { prefix, local } => {
                if !self.prologue.prefixes.contains_key(prefix) {
                    return Err(SparqlError::UnresolvablePrefix(prefix.clone()));
                }
                Some(Term::PrefixedName(PrefixedName {
                    prefix: prefix.clone(),
                    local: local.clone(),
                }))
            }
            Tok::Var(name) => Some(Term::Variable(Variable::new(name.clone())?)),
            _ => None,
        })
    }

    fn subject_term(&self, t: &Spanned) -> Result<Term, SparqlError> {
        if let Some(term) = self.named(t)? {
            return Ok(term);
        }
        match t.tok {
            Tok::BlankNode(_) | Tok::Punct('[') => Err(self.unsupported_at("blank node", t.start)),
            Tok::Punct('(') => Err(self.unsupported_at("RDF collection", t.start)),
            _ => Err(self.syntax(t, &["variable", "IRI"])),
        }
    }

    fn predicate_term(&self, t: &Spanned) -> Result<Term, SparqlError> {
        if t.tok.is_word("a") {
            return Ok(Term::A);
        }
        if let Some(term) = self.named(t)? {
            return Ok(term);
        }
        match t.tok {
            Tok::Punct('^' | '!' | '(') => Err(self.unsupported_at("property path", t.start)),
            _ => Err(self.syntax(t, &["variable", "IRI", "a"])),
        }
    }

    fn object_term(&mut self, t: &Spanned) -> Result<(Term, usize), SparqlError> {
        if let Some(term) = self.named(t)? {
            return Ok((term, t.end));
        }
        let literal = match &t.tok {
            Tok::Str(s) => {
                let mut literal = Literal::plain(s.clone());
                let mut end = t.end;
                match self.peek()?.tok.clone() {
                    Tok::At(lang) => {
                        end = self.next()?.end;
                        literal.language = Some(lang);
                    }
                    Tok::DoubleCaret => {
                        self.next()?;
                        let dt = self.next()?;
                        end = dt.end;
                        literal.datatype = Some(match self.named(&dt)? {
                            Some(Term::Iri(iri)) => Datatype::Iri(iri),
                            Some(Term::PrefixedName(p)) => Datatype::Prefixed(p),
                            _ => return Err(self.syntax(&dt, &["datatype IRI"])),
                        });
                    }
                    _ => {}
                }
                return Ok((Term::Literal(literal), end));
            }
            Tok::Integer(s) => Literal::typed_xsd(s.clone(), "integer"),
            Tok::Decimal(s) => Literal::typed_xsd(s.clone(), "decimal"),
            Tok::Double(s) => Literal::typed_xsd(s.clone(), "double"),
            Tok::Word(w) if w == "true" || w == "false" => Literal::typed_xsd(w.clone(), "boolean"),
            Tok::BlankNode(_) | Tok::Punct('[') => return Err(self.unsupported_at("blank node", t.start)),
            Tok::Punct('(') => return Err(self.unsupported_at("RDF collection", t.start)),
            _ => return Err(self.syntax(t, &["variable", "IRI", "literal"])),
        };
        Ok((Term::Literal(literal), t.end))
    }

    fn parse_modifiers(&mut self) -> Result<Modifiers, SparqlError> {
        let mut m = Modifiers::default();
        let mut seen_order = false;
        loop {
            let t = self.peek()?.clone();
            if t.tok.is_word("ORDER") && !seen_order {
                self.next()?;
                self.expect_word("BY")?;
                seen_order = true;
                loop {
                    let t = self.peek()?.clone();
                    match &t.tok {
                        Tok::Var(name) => {
                            self.next()?;
                            m.order_by.push((Variable::new(name.clone())?, OrderDirection::Asc));
                        }
                        Tok::Word(w) if w.eq_ignore_ascii_case("ASC") || w.eq_ignore_ascii_case("DESC") => {
                            self.next()?;
                            let dir = if w.eq_ignore_ascii_case("ASC") {
                                OrderDirection::Asc
                            } else {
                                OrderDirection::Desc
                            };
                            self.expect_punct('(')?;
                            let v = self.next()?;
                            let Tok::Var(name) = &v.tok else {
                                return Err(self.unsupported_at("ORDER BY expression", v.start));
                            };
                            m.order_by.push((Variable::new(name.clone())?, dir));
                            self.expect_punct(')')?;
                        }
                        Tok::Punct('(') => return Err(self.unsupported("ORDER BY expression")),
                        _ if m.order_by.is_empty() => return Err(self.syntax(&t, &["variable", "ASC", "DESC"])),
                        _ => break,
                    }
                }
            } else if t.tok.is_word("LIMIT") && m.limit.is_none() {
                self.next()?;
                m.limit = Some(self.non_negative()?);
            } else if t.tok.is_word("OFFSET") && m.offset.is_none() {
                self.next()?;
                m.offset = Some(self.non_negative()?);
            } else {
                return Ok(m);
            }
        }
    }

    fn non_negative(&mut self) -> Result<u64, SparqlError> {
        let t = self.next()?;
        match &t.tok {
            Tok::Integer(s) if !s.starts_with(['+', '-']) => {
                s.parse().map_err(|_| self.syntax(&t, &["non-negative integer"]))
            }
            _ => Err(self.syntax(&t, &["non-negative integer"])),
        }
    }

    fn attach_comments(&self, where_clause: &mut GraphPattern) {
        let n = self.triple_spans.len();
        let mut leading: Vec<Vec<&str>> = vec![Vec::new(); n];
        let mut trailing: Vec<Vec<&str>> = vec![Vec::new(); n];
        for c in &self.comments {
            let line = self.lexer.line_of(c.offset);
            if !c.own_line {
                let host = self
                    .triple_spans
                    .iter()
                    .rposition(|&(_, end)| end <= c.offset)
                    .filter(|&i| self.lexer.line_of(self.triple_spans[i].1) == line);
                if let Some(i) = host {
                    trailing[i].push(&c.text);
                    continue;
                }
            }
            if let Some(i) = self.triple_spans.iter().position(|&(start, _)| start > c.offset) {
                leading[i].push(&c.text);
            }
        }
        let mut idx = 0;
        where_clause.for_each_triple_mut(&mut |t| {
            let parts: Vec<&str> = leading[idx].iter().chain(trailing[idx].iter()).copied().collect();
            if !parts.is_empty() {
                t.trailing_comment = Some(parts.join("; "));
            }
            idx += 1;
        });
    }
}
