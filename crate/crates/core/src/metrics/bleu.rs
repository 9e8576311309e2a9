use std::collections::HashMap;

use super::{check, MetricError};

#[derive(Debug, Clone, PartialEq)]
pub struct BleuScore {
    pub score: f64,
    /// Clipped precision per order, after flooring. Orders for which the
    /// candidate has no n-grams are absent.
    pub precisions: Vec<f64>,
    pub brevity_penalty: f64,
    /// Number of orders whose zero precision was floored.
    pub floored: usize,
}

fn ngram_counts<S: AsRef<str>>(tokens: &[S], n: usize) -> HashMap<Vec<&str>, usize> {
    let mut counts = HashMap::new();
    for window in tokens.windows(n) {
        let key: Vec<&str> = window.iter().map(AsRef::as_ref).collect();
        *counts.entry(key).or_insert(0) += 1;
    }
    counts
}

/// Sentence BLEU with uniform weights over the orders the candidate can
/// realise. A zero precision is floored at `1 / (2 * candidate n-grams)`.
pub fn bleu_detailed<S: AsRef<str>>(candidate: &[S], reference: &[S], max_n: usize) -> Result<BleuScore, MetricError> {
    check(candidate, reference)?;
    let mut precisions = Vec::new();
    let mut floored = 0;
    for n in 1..=max_n.max(1) {
        let cand = ngram_counts(candidate, n);
        let total: usize = cand.values().sum();
        if total == 0 {
            break;
        }
        let refs = ngram_counts(reference, n);
        let matched: usize = cand
            .iter()
            .map(|(g, &c)| c.min(refs.get(g).copied().unwrap_or(0)))
            .sum();
        let p = if matched == 0 {
            floored += 1;
            1.0 / (2.0 * total as f64)
        } else {
            matched as f64 / total as f64
        };
        precisions.push(p);
    }
    let log_mean = precisions.iter().map(|p| p.ln()).sum::<f64>() / precisions.len() as f64;
    let (c, r) = (candidate.len() as f64, reference.len() as f64);
    let brevity_penalty = if c >= r { 1.0 } else { (1.0 - r / c).exp() };
    Ok(BleuScore {
        score: brevity_penalty * log_mean.exp(),
        precisions,
        brevity_penalty,
        floored,
    })
}

pub fn bleu<S: AsRef<str>>(candidate: &[S], reference: &[S]) -> Result<f64, MetricError> {
    Ok(bleu_detailed(candidate, reference, 4)?.score)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical() {
        let t = ["a", "b", "c", "d", "e"];
        assert_eq!(bleu(&t, &t).unwrap(), 1.0);
    }

    #[test]
    fn brevity_only() {
        let s = bleu_detailed(&["a", "b", "c", "d"], &["a", "b", "c", "d", "e"], 4).unwrap();
        assert_eq!(s.precisions, vec![1.0; 4]);
        assert!((s.score - (-0.25f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn disjoint_floors_every_order() {
        let s = bleu_detailed(&["a", "b", "c", "d"], &["w", "x", "y", "z"], 4).unwrap();
        assert_eq!(s.floored, 4);
        let floor = (1.0f64 / 8.0 * 1.0 / 6.0 * 1.0 / 4.0 * 1.0 / 2.0).powf(0.25);
        assert!((s.score - floor).abs() < 1e-12);
    }

    #[test]
    fn short_candidate_uses_available_orders() {
        let s = bleu_detailed(&["a", "b"], &["a", "b"], 4).unwrap();
        assert_eq!(s.precisions.len(), 2);
        assert_eq!(s.score, 1.0);
    }

    #[test]
    fn empty_rejected() {
        let empty: [&str; 0] = [];
        assert_eq!(bleu(&empty, &["a"]), Err(MetricError::EmptyInput));
    }
}
