use std::collections::HashMap;

use super::{check, MetricError};

pub fn lcs_len<S: AsRef<str>>(a: &[S], b: &[S]) -> usize {
    let mut row = vec![0usize; b.len() + 1];
    for x in a {
        let mut diag = 0;
        for (j, y) in b.iter().enumerate() {
            let up = row[j + 1];
            row[j + 1] = if x.as_ref() == y.as_ref() {
                diag + 1
            } else {
                up.max(row[j])
            };
            diag = up;
        }
    }
    row[b.len()]
}

fn f_beta(overlap: usize, cand: usize, refr: usize, beta: f64) -> f64 {
    if overlap == 0 {
        return 0.0;
    }
    let p = overlap as f64 / cand as f64;
    let r = overlap as f64 / refr as f64;
    let b2 = beta * beta;
    (1.0 + b2) * p * r / (r + b2 * p)
}

/// ROUGE-L as the balanced F-measure of LCS precision and recall.
pub fn rouge_l<S: AsRef<str>>(candidate: &[S], reference: &[S]) -> Result<f64, MetricError> {
    rouge_l_beta(candidate, reference, 1.0)
}

/// ROUGE-L with recall weighted `beta` times as much as precision.
pub fn rouge_l_beta<S: AsRef<str>>(candidate: &[S], reference: &[S], beta: f64) -> Result<f64, MetricError> {
    check(candidate, reference)?;
    Ok(f_beta(
        lcs_len(candidate, reference),
        candidate.len(),
        reference.len(),
        beta,
    ))
}

/// F1 over the multiset intersection of tokens.
pub fn token_f1<S: AsRef<str>>(candidate: &[S], reference: &[S]) -> Result<f64, MetricError> {
    check(candidate, reference)?;
    let mut counts: HashMap<&str, usize> = HashMap::new();
    for t in reference {
        *counts.entry(t.as_ref()).or_insert(0) += 1;
    }
    let mut overlap = 0;
    for t in candidate {
        if let Some(c) = counts.get_mut(t.as_ref()).filter(|c| **c > 0) {
            *c -= 1;
            overlap += 1;
        }
    }
    Ok(f_beta(overlap, candidate.len(), reference.len(), 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rouge_examples() {
        assert_eq!(rouge_l(&["a", "b", "c", "d"], &["a", "c", "b", "d"]).unwrap(), 0.75);
        assert_eq!(rouge_l(&["a", "b"], &["a", "b"]).unwrap(), 1.0);
        assert_eq!(rouge_l(&["a"], &["b"]).unwrap(), 0.0);
    }

    #[test]
    fn recall_weighted_rouge() {
        let got = rouge_l_beta(&["a", "b"], &["a", "b", "c", "d"], 2.0).unwrap();
        let (p, r) = (1.0, 0.5);
        assert!((got - 5.0 * p * r / (r + 4.0 * p)).abs() < 1e-12);
    }

    #[test]
    fn f1_examples() {
        assert_eq!(token_f1(&["a", "b"], &["b", "c"]).unwrap(), 0.5);
        assert_eq!(token_f1(&["a", "a"], &["a", "b"]).unwrap(), 0.5);
        assert_eq!(token_f1(&["x"], &["y"]).unwrap(), 0.0);
    }
}
