use std::collections::HashMap;

use super::{DatasetError, DatasetRecord};

/// SplitMix64 (Steele, Lea and Flood 2014).
#[derive(Debug, Clone)]
pub struct SplitMix64(u64);

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64(seed)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
}

/// Fisher-Yates from the last index down, with `j = next % (i + 1)`.
pub fn shuffle<T>(items: &mut [T], seed: u64) {
    let mut rng = SplitMix64::new(seed);
    for i in (1..items.len()).rev() {
        let j = (rng.next_u64() % (i as u64 + 1)) as usize;
        items.swap(i, j);
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SplitSpec {
    fractions: Vec<f64>,
    pub seed: u64,
}

impl SplitSpec {
    pub fn new(fractions: Vec<f64>, seed: u64) -> Result<Self, DatasetError> {
        if fractions.is_empty() {
            return Err(DatasetError::InvalidSplitSpec("no fractions given".into()));
        }
        if let Some(f) = fractions.iter().find(|f| !(**f > 0.0 && **f <= 1.0)) {
            return Err(DatasetError::InvalidSplitSpec(format!(
                "fraction {f} is outside (0, 1]"
            )));
        }
        if fractions.windows(2).any(|w| w[1] <= w[0]) {
            return Err(DatasetError::InvalidSplitSpec(
                "fractions must be strictly increasing".into(),
            ));
        }
        Ok(SplitSpec { fractions, seed })
    }

    pub fn fractions(&self) -> &[f64] {
        &self.fractions
    }
}

/// Number of records in a partition: `ceil(f * n)`, at least one. The small
/// tolerance absorbs binary rounding, so `0.35 * 100` yields 35.
pub fn partition_size(fraction: f64, n: usize) -> usize {
    ((fraction * n as f64 - 1e-9).ceil() as usize).clamp(1, n)
}

/// Nested prefixes of one seeded shuffle.
pub fn split_nested<T: Clone>(records: &[T], spec: &SplitSpec) -> Result<Vec<Vec<T>>, DatasetError> {
    if records.is_empty() {
        return Err(DatasetError::EmptyDataset);
    }
    let mut shuffled = records.to_vec();
    shuffle(&mut shuffled, spec.seed);
    Ok(spec
        .fractions
        .iter()
        .map(|&f| shuffled[..partition_size(f, records.len())].to_vec())
        .collect())
}

/// Splits whole seed groups: the test side receives `ceil(f * groups)`
/// shuffled groups, kept between one and all but one.
pub fn train_test_split(
    records: &[DatasetRecord],
    test_fraction: f64,
    seed: u64,
) -> Result<(Vec<DatasetRecord>, Vec<DatasetRecord>), DatasetError> {
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(DatasetError::InvalidSplitSpec(format!(
            "test fraction {test_fraction} is outside (0, 1)"
        )));
    }
    if records.is_empty() {
        return Err(DatasetError::EmptyDataset);
    }
    let mut order: Vec<&str> = Vec::new();
    let mut groups: HashMap<&str, Vec<&DatasetRecord>> = HashMap::new();
    for r in records {
        groups
            .entry(&r.seed_id)
            .or_insert_with(|| {
                order.push(&r.seed_id);
                Vec::new()
            })
            .push(r);
    }
    if order.len() < 2 {
        return Err(DatasetError::UnsatisfiableStratification(format!(
            "all {} records share seed {}",
            records.len(),
            order[0]
        )));
    }
    shuffle(&mut order, seed);
    let n_test = partition_size(test_fraction, order.len()).min(order.len() - 1);
    let collect = |ids: &[&str]| -> Vec<DatasetRecord> {
        ids.iter()
            .flat_map(|id| groups[id].iter().map(|r| (*r).clone()))
            .collect()
    };
    Ok((collect(&order[n_test..]), collect(&order[..n_test])))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rewrite::Strategy;

    #[test]
    fn splitmix_reference_values() {
        let mut rng = SplitMix64::new(1234567);
        let got: Vec<u64> = (0..3).map(|_| rng.next_u64()).collect();
        assert_eq!(got, [6457827717110365317, 3203168211198807973, 9817491932198370423]);
    }

    #[test]
    fn nested_quarters() {
        let records: Vec<u32> = (0..100).collect();
        let spec = SplitSpec::new(vec![0.25, 0.5, 0.75, 1.0], 7).unwrap();
        let parts = split_nested(&records, &spec).unwrap();
        let sizes: Vec<_> = parts.iter().map(Vec::len).collect();
        assert_eq!(sizes, [25, 50, 75, 100]);
        for w in parts.windows(2) {
            assert_eq!(w[0][..], w[1][..w[0].len()]);
        }
        let mut all = parts[3].clone();
        all.sort();
        assert_eq!(all, records);
    }

    #[test]
    fn seed_determinism() {
        let records: Vec<u32> = (0..50).collect();
        let a = split_nested(&records, &SplitSpec::new(vec![1.0], 1).unwrap()).unwrap();
        let b = split_nested(&records, &SplitSpec::new(vec![1.0], 1).unwrap()).unwrap();
        let c = split_nested(&records, &SplitSpec::new(vec![1.0], 2).unwrap()).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_eq!(a[0].len(), c[0].len());
    }

    #[test]
    fn spec_validation() {
        assert!(SplitSpec::new(vec![0.5, 0.5], 0).is_err());
        assert!(SplitSpec::new(vec![0.0], 0).is_err());
        assert!(SplitSpec::new(vec![1.5], 0).is_err());
        assert!(SplitSpec::new(vec![], 0).is_err());
        let empty: [u8; 0] = [];
        assert!(matches!(
            split_nested(&empty, &SplitSpec::new(vec![1.0], 0).unwrap()),
            Err(DatasetError::EmptyDataset)
        ));
    }

    #[test]
    fn partition_sizes() {
        assert_eq!(partition_size(0.35, 100), 35);
        assert_eq!(partition_size(0.01, 10), 1);
        assert_eq!(partition_size(1.0, 7), 7);
    }

    fn grouped(groups: usize, per: usize) -> Vec<DatasetRecord> {
        (0..groups * per)
            .map(|i| DatasetRecord {
                id: format!("r{i}"),
                question: "q".into(),
                query: "SELECT * WHERE { ?s ?p ?o }".into(),
                strategy: Strategy::Original,
                seed_id: format!("s{}", i / per),
                added_property: None,
            })
            .collect()
    }

    #[test]
    fn stratified_split() {
        let records = grouped(10, 3);
        let (train, test) = train_test_split(&records, 0.2, 5).unwrap();
        assert_eq!((train.len(), test.len()), (24, 6));
        let test_seeds: std::collections::HashSet<_> = test.iter().map(|r| &r.seed_id).collect();
        assert_eq!(test_seeds.len(), 2);
        assert!(train.iter().all(|r| !test_seeds.contains(&r.seed_id)));
        assert_eq!(train_test_split(&records, 0.2, 5).unwrap(), (train, test));
    }

    #[test]
    fn single_group_unsatisfiable() {
        assert!(matches!(
            train_test_split(&grouped(1, 4), 0.2, 0),
            Err(DatasetError::UnsatisfiableStratification(_))
        ));
    }
}
