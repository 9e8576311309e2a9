//! Canonical text layout: one prologue declaration per line, one triple per
//! line terminated by ` .`, two spaces of indentation per nesting level.

use std::fmt::Write;

use super::ast::*;
use super::SparqlError;

const INDENT: &str = "  ";

/// Serializes a query in the canonical layout. Trailing comments are
/// rendered as ` # text` when `emit_comments` is set.
pub fn serialize(query: &SelectQuery, emit_comments: bool) -> Result<String, SparqlError> {
    let w = Writer {
        prologue: &query.prologue,
        emit_comments,
    };
    let mut out = String::new();
    if let Some(base) = &query.prologue.base {
        writeln!(out, "BASE <{base}>").unwrap();
    }
    for (prefix, iri) in &query.prologue.prefixes {
        writeln!(out, "PREFIX {prefix}: <{iri}>").unwrap();
    }
    out.push_str("SELECT ");
    if query.distinct {
        out.push_str("DISTINCT ");
    }
    match &query.projection {
        Projection::Star => out.push('*'),
        Projection::Variables(vars) => {
            let names: Vec<String> = vars.iter().map(Variable::to_string).collect();
            out.push_str(&names.join(" "));
        }
    }
    out.push_str("\nWHERE {\n");
    w.group(&mut out, &query.where_clause, 1)?;
    out.push_str("}\n");
    let m = &query.modifiers;
    if !m.order_by.is_empty() {
        let keys: Vec<String> = m
            .order_by
            .iter()
            .map(|(v, dir)| match dir {
                OrderDirection::Asc => v.to_string(),
                OrderDirection::Desc => format!("DESC({v})"),
            })
            .collect();
        writeln!(out, "ORDER BY {}", keys.join(" ")).unwrap();
    }
    if let Some(limit) = m.limit {
        writeln!(out, "LIMIT {limit}").unwrap();
    }
    if let Some(offset) = m.offset {
        writeln!(out, "OFFSET {offset}").unwrap();
    }
    Ok(out)
}

struct Writer<'a> {
    prologue: &'a Prologue,
    emit_comments: bool,
}

impl Writer<'_> {
    fn group(&self, out: &mut String, g: &GraphPattern, depth: usize) -> Result<(), SparqlError> {
        for element in &g.elements {
            self.element(out, element, depth)?;
        }
        Ok(())
    }

    fn element(&self, out: &mut String, element: &PatternElement, depth: usize) -> Result<(), SparqlError> {
        let pad = INDENT.repeat(depth);
        match element {
            PatternElement::Triple(t) => {
                write!(
                    out,
                    "{pad}{} {} {} .",
                    self.term(&t.subject)?,
                    self.term(&t.predicate)?,
                    self.term(&t.object)?
                )
                .unwrap();
                if let (true, Some(c)) = (self.emit_comments, &t.trailing_comment) {
                    write!(out, " # {c}").unwrap();
                }
                out.push('\n');
            }
            PatternElement::Optional(g) => {
                writeln!(out, "{pad}OPTIONAL {{").unwrap();
                self.group(out, g, depth + 1)?;
                writeln!(out, "{pad}}}").unwrap();
            }
            PatternElement::Filter(raw) => {
                let sep = if raw.starts_with('(') { "" } else { " " };
                writeln!(out, "{pad}FILTER{sep}{raw}").unwrap();
            }
            PatternElement::Union(..) => {
                let mut branches = Vec::new();
                flatten_union(element, &mut branches);
                for (i, branch) in branches.iter().enumerate() {
                    if i > 0 {
                        writeln!(out, "{pad}UNION").unwrap();
                    }
                    writeln!(out, "{pad}{{").unwrap();
                    self.group(out, branch, depth + 1)?;
                    writeln!(out, "{pad}}}").unwrap();
                }
            }
        }
        Ok(())
    }

    fn term(&self, term: &Term) -> Result<String, SparqlError> {
        Ok(match term {
            Term::Iri(iri) => format!("<{iri}>"),
            Term::PrefixedName(p) => self.prefixed(p)?,
            Term::Variable(v) => v.to_string(),
            Term::A => "a".to_string(),
            Term::Literal(l) => self.literal(l)?,
        })
    }

    fn prefixed(&self, p: &PrefixedName) -> Result<String, SparqlError> {
        if !self.prologue.prefixes.contains_key(&p.prefix) {
            return Err(SparqlError::UnresolvablePrefix(p.prefix.clone()));
        }
        Ok(format!("{}:{}", p.prefix, escape_local(&p.local)))
    }

    fn literal(&self, l: &Literal) -> Result<String, SparqlError> {
        if let (Some(Datatype::Iri(dt)), None) = (&l.datatype, &l.language) {
            if let Some(local) = dt.strip_prefix(XSD) {
                if is_bare_numeric(local, &l.lexical) {
                    return Ok(l.lexical.clone());
                }
            }
        }
        let mut s = format!("\"{}\"", escape_string(&l.lexical));
        if let Some(lang) = &l.language {
            write!(s, "@{lang}").unwrap();
        } else if let Some(dt) = &l.datatype {
            match dt {
                Datatype::Iri(iri) => write!(s, "^^<{iri}>").unwrap(),
                Datatype::Prefixed(p) => write!(s, "^^{}", self.prefixed(p)?).unwrap(),
            }
        }
        Ok(s)
    }
}

/// A left-nested union chain `Union(Union(a, b), c)` becomes `[a, b, c]`.
fn flatten_union<'a>(element: &'a PatternElement, out: &mut Vec<&'a GraphPattern>) {
    if let PatternElement::Union(left, right) = element {
        match left.elements.as_slice() {
            [nested @ PatternElement::Union(..)] => flatten_union(nested, out),
            _ => out.push(left),
        }
        out.push(right);
    }
}

fn is_bare_numeric(xsd_local: &str, lexical: &str) -> bool {
    let unsigned = lexical.strip_prefix(['+', '-']).unwrap_or(lexical);
    let all_digits = |s: &str| !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit());
    match xsd_local {
        "integer" => all_digits(unsigned),
        "decimal" => unsigned
            .split_once('.')
            .is_some_and(|(int, frac)| (int.is_empty() || all_digits(int)) && all_digits(frac)),
        "double" => {
            let Some((mantissa, exp)) = unsigned.split_once(['e', 'E']) else {
                return false;
            };
            let exp = exp.strip_prefix(['+', '-']).unwrap_or(exp);
            let mantissa_ok = match mantissa.split_once('.') {
                Some((int, frac)) => {
                    (all_digits(int) && (frac.is_empty() || all_digits(frac))) || (int.is_empty() && all_digits(frac))
                }
                None => all_digits(mantissa),
            };
            mantissa_ok && all_digits(exp)
        }
        "boolean" => lexical == "true" || lexical == "false",
        _ => false,
    }
}

fn escape_string(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c => out.push(c),
        }
    }
    out
}

fn escape_local(local: &str) -> String {
    let mut out = String::with_capacity(local.len());
    let n = local.chars().count();
    for (i, c) in local.chars().enumerate() {
        let plain = c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | ':' | '%') || (c == '.' && i + 1 < n);
        if !plain {
            out.push('\\');
        }
        out.push(c);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::super::parse_query;
    use super::*;

    const TAXON_QUERY: &str = "PREFIX obo: <http://purl.obolibrary.org/obo/> SELECT ?gene WHERE { ?gene obo:RO_0002162 ?taxon . # in taxon\n}";

    #[test]
    fn canonical_layout_with_comments() {
        let q = parse_query(TAXON_QUERY).unwrap();
        assert_eq!(
            serialize(&q, true).unwrap(),
            "PREFIX obo: <http://purl.obolibrary.org/obo/>\nSELECT ?gene\nWHERE {\n  ?gene obo:RO_0002162 ?taxon . # in taxon\n}\n"
        );
    }

    #[test]
    fn comments_suppressed() {
        let q = parse_query(TAXON_QUERY).unwrap();
        let text = serialize(&q, false).unwrap();
        assert!(text.contains("  ?gene obo:RO_0002162 ?taxon .\n"));
        assert!(!text.contains('#'));
    }

    #[test]
    fn unresolvable_prefix_on_serialize() {
        let mut q = parse_query(TAXON_QUERY).unwrap();
        q.prologue.prefixes.clear();
        assert_eq!(
            serialize(&q, false).unwrap_err(),
            SparqlError::UnresolvablePrefix("obo".into())
        );
    }

    #[test]
    fn numeric_literals_stay_bare() {
        let q = parse_query("SELECT * WHERE { ?s ?p 42 . ?s ?q -1.5 . ?s ?r 1e3 . ?s ?t false }").unwrap();
        let text = serialize(&q, false).unwrap();
        for bare in [" 42 .", " -1.5 .", " 1e3 .", " false ."] {
            assert!(text.contains(bare), "{bare} missing in {text}");
        }
    }

    #[test]
    fn union_chain_is_flat() {
        let q = parse_query("SELECT * WHERE { { ?a ?b 1 } UNION { ?a ?b 2 } UNION { ?a ?b 3 } }").unwrap();
        let text = serialize(&q, false).unwrap();
        assert_eq!(text.matches("UNION").count(), 2);
        assert_eq!(parse_query(&text).unwrap(), q);
    }

    #[test]
    fn string_escapes_round_trip() {
        let q = parse_query("SELECT * WHERE { ?s ?p \"line\\nbreak \\\"q\\\" \\\\\" }").unwrap();
        let text = serialize(&q, true).unwrap();
        assert_eq!(parse_query(&text).unwrap(), q);
    }
}
