//! Adjusted Rand index between two hard partitions.

use std::collections::HashMap;

use crate::error::{Result, SkewError};

fn comb2(k: u64) -> f64 {
    (k * k.saturating_sub(1)) as f64 / 2.0
}

/// True when the two labelings induce the same partition, i.e. the labels
/// are related by a bijection.
fn same_partition(a: &[usize], b: &[usize]) -> bool {
    let mut fwd: HashMap<usize, usize> = HashMap::new();
    let mut bwd: HashMap<usize, usize> = HashMap::new();
    for (&x, &y) in a.iter().zip(b) {
        if *fwd.entry(x).or_insert(y) != y || *bwd.entry(y).or_insert(x) != x {
            return false;
        }
    }
    true
}

/// Hubert-Arabie adjusted Rand index. Symmetric, 1 for identical partitions,
/// expectation 0 under independent random labelings; when the correction
/// denominator vanishes (for instance both partitions are a single cluster)
/// the value is defined as 1 for identical partitions and 0 otherwise.
pub fn ari(a: &[usize], b: &[usize]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(SkewError::LengthMismatch(a.len(), b.len()));
    }
    let n = a.len() as u64;
    if n < 2 {
        return Err(SkewError::InvalidParameter(
            "adjusted Rand index needs at least two observations".into(),
        ));
    }
    let mut cells: HashMap<(usize, usize), u64> = HashMap::new();
    let mut rows: HashMap<usize, u64> = HashMap::new();
    let mut cols: HashMap<usize, u64> = HashMap::new();
    for (&x, &y) in a.iter().zip(b) {
        *cells.entry((x, y)).or_insert(0) += 1;
        *rows.entry(x).or_insert(0) += 1;
        *cols.entry(y).or_insert(0) += 1;
    }
    let sum_cells: f64 = cells.values().map(|&k| comb2(k)).sum();
    let sum_rows: f64 = rows.values().map(|&k| comb2(k)).sum();
    let sum_cols: f64 = cols.values().map(|&k| comb2(k)).sum();
    let total = comb2(n);
    let expected = sum_rows * sum_cols / total;
    let max_index = 0.5 * (sum_rows + sum_cols);
    let denom = max_index - expected;
    if denom.abs() < 1e-12 {
        return Ok(if same_partition(a, b) { 1.0 } else { 0.0 });
    }
    Ok((sum_cells - expected) / denom)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::seq::SliceRandom;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;

    #[test]
    fn identical_partitions_score_one() {
        let a = vec![0, 0, 1, 1, 2, 2];
        assert_eq!(ari(&a, &a).unwrap(), 1.0);
        // Relabeled copy still identical as a partition.
        let b = vec![5, 5, 9, 9, 7, 7];
        assert_eq!(ari(&a, &b).unwrap(), 1.0);
    }

    #[test]
    fn hand_computed_contingency_value() {
        // Contingency 2/0/1/2 gives (2 - 1.6)/(4 - 1.6) = 1/6.
        let a = vec![1, 1, 2, 2, 2];
        let b = vec![1, 1, 1, 2, 2];
        let got = ari(&a, &b).unwrap();
        assert!((got - 1.0 / 6.0).abs() < 1e-15, "{got}");
    }

    #[test]
    fn single_cluster_against_balanced_is_zero() {
        let a = vec![0; 6];
        let b = vec![0, 1, 0, 1, 0, 1];
        assert_eq!(ari(&a, &b).unwrap(), 0.0);
        // Both single-cluster: degenerate denominator, identical partition.
        assert_eq!(ari(&a, &a).unwrap(), 1.0);
        // All singletons on both sides: also degenerate, also identical.
        let c: Vec<usize> = (0..6).collect();
        let d: Vec<usize> = (10..16).collect();
        assert_eq!(ari(&c, &d).unwrap(), 1.0);
    }

    #[test]
    fn symmetric_and_relabel_invariant() {
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        for _ in 0..50 {
            let n = 40;
            let a: Vec<usize> = (0..n).map(|_| rng.random_range(0..4)).collect();
            let b: Vec<usize> = (0..n).map(|_| rng.random_range(0..3)).collect();
            let ab = ari(&a, &b).unwrap();
            let ba = ari(&b, &a).unwrap();
            assert!((ab - ba).abs() < 1e-15);
            let mut map: Vec<usize> = (0..4).collect();
            map.shuffle(&mut rng);
            let a2: Vec<usize> = a.iter().map(|&x| map[x] + 17).collect();
            assert!((ari(&a2, &b).unwrap() - ab).abs() < 1e-15);
        }
    }

    #[test]
    fn random_labelings_center_near_zero() {
        let mut rng = ChaCha12Rng::seed_from_u64(4);
        let m = 400;
        let mut acc = 0.0;
        for _ in 0..m {
            let a: Vec<usize> = (0..60).map(|_| rng.random_range(0..2)).collect();
            let b: Vec<usize> = (0..60).map(|_| rng.random_range(0..2)).collect();
            acc += ari(&a, &b).unwrap();
        }
        assert!((acc / m as f64).abs() < 0.02, "{}", acc / m as f64);
    }

    #[test]
    fn validates_input_lengths() {
        assert!(matches!(
            ari(&[0, 1], &[0, 1, 2]),
            Err(SkewError::LengthMismatch(2, 3))
        ));
        assert!(ari(&[0], &[0]).is_err());
    }
}
