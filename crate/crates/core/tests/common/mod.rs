#![allow(dead_code)]

use msdt_core::dataset::{ClassLabel, DataSet};
use msdt_core::oracle::{self, InstanceParams};

pub const A: usize = 0;
pub const B: usize = 1;
pub const C: usize = 2;
pub const D: usize = 3;
pub const E: usize = 4;

/// Five examples in two dimensions; the instance behind the worked
/// lower-bound computations.
pub fn fig_dataset() -> DataSet<f64> {
    DataSet::new(vec![
        (vec![0.0, 3.0], ClassLabel::Blue), // a
        (vec![1.0, 2.0], ClassLabel::Red),  // b
        (vec![2.0, 2.0], ClassLabel::Blue), // c
        (vec![2.0, 1.0], ClassLabel::Red),  // d
        (vec![2.0, 0.0], ClassLabel::Blue), // e
    ])
    .unwrap()
}

/// Four examples in three dimensions; the instance behind the worked
/// reduction-rule examples.
pub fn reduction_table() -> DataSet<f64> {
    DataSet::new(vec![
        (vec![0.0, 1.0, 0.0], ClassLabel::Red),  // a
        (vec![1.0, 0.0, 0.0], ClassLabel::Red),  // b
        (vec![2.0, 2.0, 2.0], ClassLabel::Blue), // c
        (vec![3.0, 2.0, 1.0], ClassLabel::Red),  // d
    ])
    .unwrap()
}

/// One instance of the seeded acceptance suite. Parameters cycle within
/// the oracle guards: n <= 14, d <= 4, values <= 4.
pub fn suite_instance(seed: u64) -> DataSet<f64> {
    let params = InstanceParams {
        n: 8 + (seed % 7) as usize,
        d: 2 + (seed % 3) as usize,
        max_value: 2 + ((seed / 3) % 3) as usize,
        red_fraction: [0.3, 0.5, 0.7][((seed / 7) % 3) as usize],
    };
    oracle::random_instance(seed, &params)
}

pub fn suite(count: u64) -> Vec<DataSet<f64>> {
    (0..count).map(suite_instance).collect()
}
