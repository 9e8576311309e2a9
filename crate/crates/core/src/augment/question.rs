use std::collections::BTreeMap;

use crate::template::render;

use super::AugmentError;

pub const DEFAULT_TEMPLATE: &str = "default";

/// Named question templates with one active entry. Placeholders:
/// `{question}`, `{class}` and `{property}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuestionTemplateSet {
    templates: BTreeMap<String, String>,
    active: String,
}

impl Default for QuestionTemplateSet {
    fn default() -> Self {
        let templates = BTreeMap::from([
            (
                DEFAULT_TEMPLATE.to_string(),
                "{question} Also show the {property} of the {class}.".to_string(),
            ),
            (
                "with-class".to_string(),
                "{question} For each {class}, also return its {property}.".to_string(),
            ),
        ]);
        QuestionTemplateSet {
            templates,
            active: DEFAULT_TEMPLATE.to_string(),
        }
    }
}

impl QuestionTemplateSet {
    pub fn register(&mut self, id: &str, template: &str) {
        self.templates.insert(id.to_string(), template.to_string());
    }

    pub fn select(mut self, id: &str) -> Result<Self, AugmentError> {
        if !self.templates.contains_key(id) {
            return Err(AugmentError::UnknownTemplateId(id.to_string()));
        }
        self.active = id.to_string();
        Ok(self)
    }

    pub fn active(&self) -> &str {
        &self.active
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.templates.keys().map(String::as_str)
    }

    pub fn render(&self, seed_question: &str, class_label: &str, property_label: &str) -> Result<String, AugmentError> {
        self.render_with(&self.active, seed_question, class_label, property_label)
    }

    pub fn render_with(
        &self,
        template_id: &str,
        seed_question: &str,
        class_label: &str,
        property_label: &str,
    ) -> Result<String, AugmentError> {
        let template = self
            .templates
            .get(template_id)
            .ok_or_else(|| AugmentError::UnknownTemplateId(template_id.to_string()))?;
        for label in [class_label, property_label] {
            if label.trim().is_empty() {
                return Err(AugmentError::InvalidLabel(label.to_string()));
            }
        }
        let question = normalize_question(seed_question);
        Ok(render(
            template,
            &[
                ("question", &question),
                ("class", class_label),
                ("property", property_label),
            ],
        )?)
    }
}

/// Instantiates one of the built-in templates.
pub fn question_for_property(
    seed_question: &str,
    class_label: &str,
    property_label: &str,
    template_id: &str,
) -> Result<String, AugmentError> {
    QuestionTemplateSet::default().render_with(template_id, seed_question, class_label, property_label)
}

/// Collapses trailing punctuation into one `?` (if any was a question
/// mark) or `.`.
pub fn normalize_question(question: &str) -> String {
    let trimmed = question.trim_end();
    let stem = trimmed.trim_end_matches(['?', '.', '!', ';', ',', ':']);
    let terminal = if trimmed[stem.len()..].contains('?') { '?' } else { '.' };
    format!("{}{terminal}", stem.trim_end())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_template() {
        let q = question_for_property(
            "Which genes are expressed in brain?",
            "gene",
            "identifier",
            DEFAULT_TEMPLATE,
        )
        .unwrap();
        assert_eq!(
            q,
            "Which genes are expressed in brain? Also show the identifier of the gene."
        );
    }

    #[test]
    fn punctuation_normalized() {
        assert_eq!(normalize_question("List genes"), "List genes.");
        assert_eq!(normalize_question("List genes!!"), "List genes.");
        assert_eq!(normalize_question("What is it?!. "), "What is it?");
    }

    #[test]
    fn invalid_label_and_unknown_id() {
        assert_eq!(
            question_for_property("Q?", "gene", "", DEFAULT_TEMPLATE),
            Err(AugmentError::InvalidLabel(String::new()))
        );
        assert_eq!(
            question_for_property("Q?", "gene", "label", "nope"),
            Err(AugmentError::UnknownTemplateId("nope".into()))
        );
    }

    #[test]
    fn template_without_placeholders() {
        let mut set = QuestionTemplateSet::default();
        set.register("fixed", "Show everything.");
        let set = set.select("fixed").unwrap();
        assert_eq!(set.render("Q?", "gene", "label").unwrap(), "Show everything.");
    }
}
