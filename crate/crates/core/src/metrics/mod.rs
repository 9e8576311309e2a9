//! Text-similarity metrics for comparing generated queries with references:
//! BLEU, subword BLEU, exact-match METEOR, ROUGE-L and token F1.

mod bleu;
mod meteor;
mod overlap;
mod subword;
mod tokenize;

use serde::Serialize;
use thiserror::Error;

pub use bleu::{bleu, bleu_detailed, BleuScore};
pub use meteor::{meteor, meteor_with, MeteorParams};
pub use overlap::{lcs_len, rouge_l, rouge_l_beta, token_f1};
pub use subword::{SubwordVocabulary, WORD_BOUNDARY};
pub use tokenize::{tokenize_query, TokenSequence};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MetricError {
    #[error("empty input")]
    EmptyInput,
    #[error("token is empty or contains whitespace")]
    InvalidToken,
    #[error("empty corpus")]
    EmptyCorpus,
    #[error("pair {index}: {source}")]
    Pair { index: usize, source: Box<MetricError> },
    #[error("vocabulary is not closed under single characters; missing {0:?}")]
    VocabularyClosure(Vec<char>),
}

fn check<S>(candidate: &[S], reference: &[S]) -> Result<(), MetricError> {
    if candidate.is_empty() || reference.is_empty() {
        Err(MetricError::EmptyInput)
    } else {
        Ok(())
    }
}

/// Subword BLEU: BLEU over the greedy segmentation of both raw texts.
pub fn sp_bleu(candidate: &str, reference: &str, vocab: &SubwordVocabulary) -> Result<f64, MetricError> {
    bleu(&vocab.segment(candidate), &vocab.segment(reference))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MetricReport {
    pub bleu: f64,
    pub sp_bleu: Option<f64>,
    pub meteor: f64,
    pub rouge_l: f64,
    pub f1: f64,
    pub pairs: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct EvalOptions {
    /// Lowercase both texts before scoring.
    pub lowercase: bool,
}

/// Scores one pair of query texts.
pub fn evaluate_pair(
    candidate: &str,
    reference: &str,
    vocab: Option<&SubwordVocabulary>,
    options: EvalOptions,
) -> Result<MetricReport, MetricError> {
    let (candidate, reference) = if options.lowercase {
        (candidate.to_lowercase(), reference.to_lowercase())
    } else {
        (candidate.to_string(), reference.to_string())
    };
    let c = tokenize_query(&candidate)?;
    let r = tokenize_query(&reference)?;
    Ok(MetricReport {
        bleu: bleu(&c, &r)?,
        sp_bleu: vocab.map(|v| sp_bleu(&candidate, &reference, v)).transpose()?,
        meteor: meteor(&c, &r)?,
        rouge_l: rouge_l(&c, &r)?,
        f1: token_f1(&c, &r)?,
        pairs: 1,
    })
}

/// Macro average of per-pair scores, summed in input order.
pub fn evaluate_corpus<C: AsRef<str>, R: AsRef<str>>(
    pairs: &[(C, R)],
    vocab: Option<&SubwordVocabulary>,
    options: EvalOptions,
) -> Result<MetricReport, MetricError> {
    if pairs.is_empty() {
        return Err(MetricError::EmptyCorpus);
    }
    let mut sum = MetricReport {
        bleu: 0.0,
        sp_bleu: vocab.map(|_| 0.0),
        meteor: 0.0,
        rouge_l: 0.0,
        f1: 0.0,
        pairs: pairs.len(),
    };
    for (index, (c, r)) in pairs.iter().enumerate() {
        let s = evaluate_pair(c.as_ref(), r.as_ref(), vocab, options).map_err(|e| MetricError::Pair {
            index,
            source: Box::new(e),
        })?;
        sum.bleu += s.bleu;
        sum.sp_bleu = sum.sp_bleu.zip(s.sp_bleu).map(|(a, b)| a + b);
        sum.meteor += s.meteor;
        sum.rouge_l += s.rouge_l;
        sum.f1 += s.f1;
    }
    let n = pairs.len() as f64;
    Ok(MetricReport {
        bleu: sum.bleu / n,
        sp_bleu: sum.sp_bleu.map(|s| s / n),
        meteor: sum.meteor / n,
        rouge_l: sum.rouge_l / n,
        f1: sum.f1 / n,
        pairs: pairs.len(),
    })
}
