//! Independent reference solver and instance generator.
//!
//! The oracle computes minimum tree sizes by dynamic programming over
//! example subsets: a subset needs zero cuts when pure, otherwise one plus
//! the best split over all cuts with both sides nonempty. It shares no
//! code path with the witness-tree search, so the two can check each
//! other. Guarded to small instances; it exists for verification, not
//! performance.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::dataset::{ClassLabel, DataSet};
use crate::dataset::dedupe_conflicts;
use crate::value::Value;

pub const MAX_EXAMPLES: usize = 16;
pub const MAX_CUTS: usize = 24;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("oracle guard: {n} examples exceed the limit of {MAX_EXAMPLES}")]
    TooManyExamples { n: usize },
    #[error("oracle guard: {cuts} cuts exceed the limit of {MAX_CUTS}")]
    TooManyCuts { cuts: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundedOutcome {
    MinSize(usize),
    ExceedsBudget,
}

/// Exact minimum number of inner vertices of any perfect tree.
pub fn min_size_exact<V: Value>(ds: &DataSet<V>) -> Result<usize, OracleError> {
    let n = ds.n();
    if n > MAX_EXAMPLES {
        return Err(OracleError::TooManyExamples { n });
    }
    if ds.cut_count() > MAX_CUTS {
        return Err(OracleError::TooManyCuts { cuts: ds.cut_count() });
    }

    let mut cut_masks: Vec<u64> = ds
        .cuts()
        .map(|cut| {
            let mut bits = 0u64;
            for e in ds.left_mask(cut).ones() {
                bits |= 1 << e;
            }
            bits
        })
        .collect();
    cut_masks.sort_unstable();
    cut_masks.dedup();

    let mut red = 0u64;
    for e in ds.red_set().ones() {
        red |= 1 << e;
    }

    let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let mut memo: HashMap<u64, usize> = HashMap::new();
    Ok(min_size_rec(full, red, &cut_masks, &mut memo))
}

fn min_size_rec(subset: u64, red: u64, cuts: &[u64], memo: &mut HashMap<u64, usize>) -> usize {
    let inter = subset & red;
    if inter == 0 || inter == subset {
        return 0;
    }
    if let Some(&v) = memo.get(&subset) {
        return v;
    }
    let mut best = usize::MAX;
    for &mask in cuts {
        let left = subset & mask;
        let right = subset & !mask;
        if left == 0 || right == 0 {
            continue;
        }
        let candidate = 1 + min_size_rec(left, red, cuts, memo);
        if candidate < best {
            let candidate = candidate + min_size_rec(right, red, cuts, memo);
            if candidate < best {
                best = candidate;
            }
        }
    }
    debug_assert!(best < usize::MAX, "impure subset with no separating cut");
    memo.insert(subset, best);
    best
}

/// Minimum size as long as it does not exceed `s_max`.
pub fn brute_force_min_size<V: Value>(
    ds: &DataSet<V>,
    s_max: usize,
) -> Result<BoundedOutcome, OracleError> {
    let min = min_size_exact(ds)?;
    Ok(if min <= s_max { BoundedOutcome::MinSize(min) } else { BoundedOutcome::ExceedsBudget })
}

#[derive(Clone, Copy, Debug)]
pub struct InstanceParams {
    pub n: usize,
    pub d: usize,
    /// Coordinates are drawn uniformly from `0..max_value`.
    pub max_value: usize,
    /// Probability that an example is labeled red.
    pub red_fraction: f64,
}

/// Deterministic random instance: conflicting duplicates are resolved and
/// redrawn instances guarantee both classes are present. The example count
/// can drop below `params.n` when duplicates conflict.
pub fn random_instance<V: Value>(seed: u64, params: &InstanceParams) -> DataSet<V> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let mut rows = Vec::with_capacity(params.n);
        for _ in 0..params.n {
            let coords: Vec<V> = (0..params.d)
                .map(|_| V::from_count(rng.random_range(0..params.max_value.max(1))))
                .collect();
            let label = if rng.random_bool(params.red_fraction) {
                ClassLabel::Red
            } else {
                ClassLabel::Blue
            };
            rows.push((coords, label));
        }
        let rows = dedupe_conflicts(rows);
        let reds = rows.iter().filter(|(_, l)| *l == ClassLabel::Red).count();
        if reds == 0 || reds == rows.len() {
            continue;
        }
        return DataSet::new(rows).expect("deduplicated rows form a valid data set");
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::ClassLabel::{Blue, Red};

    fn fig_dataset() -> DataSet<f64> {
        DataSet::new(vec![
            (vec![0.0, 3.0], Blue),
            (vec![1.0, 2.0], Red),
            (vec![2.0, 2.0], Blue),
            (vec![2.0, 1.0], Red),
            (vec![2.0, 0.0], Blue),
        ])
        .unwrap()
    }

    #[test]
    fn fig_instance_needs_four_cuts() {
        // Leaves of an axis-parallel tree are boxes. Every two of the blue
        // examples a, c, e span a box containing a red example, so the
        // blues need three leaves; b and d cannot share one either (c sits
        // between them). Five leaves means at least four cuts, and a
        // four-cut perfect tree exists.
        assert_eq!(min_size_exact(&fig_dataset()).unwrap(), 4);
        assert_eq!(
            brute_force_min_size(&fig_dataset(), 3).unwrap(),
            BoundedOutcome::ExceedsBudget
        );
        assert_eq!(
            brute_force_min_size(&fig_dataset(), 4).unwrap(),
            BoundedOutcome::MinSize(4)
        );
    }

    #[test]
    fn trivial_instances() {
        let single_class =
            DataSet::new(vec![(vec![0.0], Red), (vec![1.0], Red)]).unwrap();
        assert_eq!(min_size_exact(&single_class).unwrap(), 0);

        let pair = DataSet::new(vec![(vec![0.0], Red), (vec![1.0], Blue)]).unwrap();
        assert_eq!(min_size_exact(&pair).unwrap(), 1);
    }

    #[test]
    fn guards_refuse_large_instances() {
        let params = InstanceParams { n: 17, d: 2, max_value: 30, red_fraction: 0.5 };
        let ds: DataSet<f64> = random_instance(3, &params);
        if ds.n() > MAX_EXAMPLES {
            assert!(matches!(
                min_size_exact(&ds),
                Err(OracleError::TooManyExamples { .. })
            ));
        }

        let wide = InstanceParams { n: 14, d: 8, max_value: 8, red_fraction: 0.5 };
        let ds: DataSet<f64> = random_instance(4, &wide);
        assert!(matches!(min_size_exact(&ds), Err(OracleError::TooManyCuts { .. })));
    }

    #[test]
    fn random_instance_is_deterministic() {
        let params = InstanceParams { n: 10, d: 3, max_value: 3, red_fraction: 0.5 };
        let a: DataSet<f64> = random_instance(42, &params);
        let b: DataSet<f64> = random_instance(42, &params);
        assert_eq!(a.rows(), b.rows());
        let reds = a.red_set().count_ones(..);
        assert!(reds > 0 && reds < a.n());
    }

    #[test]
    fn two_example_instance_is_separable() {
        let params = InstanceParams { n: 2, d: 1, max_value: 2, red_fraction: 0.5 };
        let ds: DataSet<f64> = random_instance(0, &params);
        assert!(ds.n() <= 2);
        assert!(min_size_exact(&ds).unwrap() <= 1);
    }

    #[test]
    fn adding_a_dimension_never_worsens_the_optimum() {
        for seed in 0..25u64 {
            let params = InstanceParams { n: 9, d: 2, max_value: 3, red_fraction: 0.5 };
            let base: DataSet<f64> = random_instance(seed, &params);
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xabcdef);
            let rows: Vec<(Vec<f64>, ClassLabel)> = base
                .rows()
                .into_iter()
                .map(|(mut coords, label)| {
                    coords.push(rng.random_range(0..3) as f64);
                    (coords, label)
                })
                .collect();
            let Ok(extended) = DataSet::new(dedupe_conflicts(rows)) else {
                continue;
            };
            if extended.n() != base.n() || extended.cut_count() > MAX_CUTS {
                continue;
            }
            let with = min_size_exact(&extended).unwrap();
            let without = min_size_exact(&base).unwrap();
            assert!(
                with <= without,
                "extra cuts worsened optimum on seed {seed}: {with} > {without}"
            );
        }
    }
}
