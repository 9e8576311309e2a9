//! Minimal `{name}` placeholder substitution shared by the question and
//! prompt templates. `{{` and `}}` produce literal braces.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TemplateError {
    #[error("unknown placeholder {{{0}}}")]
    UnknownPlaceholder(String),
    #[error("unbalanced brace at byte {0}")]
    UnbalancedBrace(usize),
}

pub fn render(template: &str, values: &[(&str, &str)]) -> Result<String, TemplateError> {
    let mut out = String::with_capacity(template.len());
    let mut rest = template.char_indices().peekable();
    while let Some((i, c)) = rest.next() {
        match c {
            '{' if rest.peek().map(|&(_, n)| n) == Some('{') => {
                rest.next();
                out.push('{');
            }
            '}' if rest.peek().map(|&(_, n)| n) == Some('}') => {
                rest.next();
                out.push('}');
            }
            '{' => {
                let close = template[i + 1..].find('}').ok_or(TemplateError::UnbalancedBrace(i))?;
                let name = &template[i + 1..i + 1 + close];
                let value = values
                    .iter()
                    .find(|(k, _)| *k == name)
                    .map(|(_, v)| *v)
                    .ok_or_else(|| TemplateError::UnknownPlaceholder(name.to_string()))?;
                out.push_str(value);
                while rest.peek().is_some_and(|&(j, _)| j <= i + 1 + close) {
                    rest.next();
                }
            }
            '}' => return Err(TemplateError::UnbalancedBrace(i)),
            c => out.push(c),
        }
    }
    Ok(out)
}
