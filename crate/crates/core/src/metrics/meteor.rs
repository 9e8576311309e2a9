use super::{check, MetricError};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeteorParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl Default for MeteorParams {
    fn default() -> Self {
        MeteorParams {
            alpha: 0.9,
            beta: 3.0,
            gamma: 0.5,
        }
    }
}

/// Exact-match METEOR. Each candidate token, left to right, is aligned to
/// the leftmost unused equal reference token.
pub fn meteor_with<S: AsRef<str>>(candidate: &[S], reference: &[S], params: MeteorParams) -> Result<f64, MetricError> {
    check(candidate, reference)?;
    let mut used = vec![false; reference.len()];
    let mut alignment = Vec::new();
    for (i, c) in candidate.iter().enumerate() {
        if let Some(j) = (0..reference.len()).find(|&j| !used[j] && reference[j].as_ref() == c.as_ref()) {
            used[j] = true;
            alignment.push((i, j));
        }
    }
    let m = alignment.len();
    if m == 0 {
        return Ok(0.0);
    }
    let chunks = 1 + alignment
        .windows(2)
        .filter(|w| !(w[1].0 == w[0].0 + 1 && w[1].1 == w[0].1 + 1))
        .count();
    let p = m as f64 / candidate.len() as f64;
    let r = m as f64 / reference.len() as f64;
    let fmean = p * r / (params.alpha * p + (1.0 - params.alpha) * r);
    let penalty = params.gamma * (chunks as f64 / m as f64).powf(params.beta);
    Ok(fmean * (1.0 - penalty))
}

pub fn meteor<S: AsRef<str>>(candidate: &[S], reference: &[S]) -> Result<f64, MetricError> {
    meteor_with(candidate, reference, MeteorParams::default())
}
