//! Correctness-preserving data reduction.
//!
//! Five rules shrink an instance without changing the minimum size of a
//! perfect tree: duplicate examples and constant dimensions are dropped,
//! cuts that induce the same left side as another cut are removed, cuts
//! whose left (or right) side is single-class together with a later cut
//! are removed, and pairs of dimensions admitting a common non-decreasing
//! example ordering are merged into one.
//!
//! Removing a cut never leaves a hole: the rule rewrites the coordinate
//! values of the examples adjacent to the dropped threshold so that every
//! surviving cut keeps its left side and downstream code sees an ordinary
//! data set.

use crate::dataset::{ClassLabel, DataSet};
use crate::value::{cmp_values, Value};

/// Mutable row-level view used while rules are applied; a [`DataSet`] is
/// rebuilt once the rules have run.
struct State<V> {
    rows: Vec<Vec<V>>,
    labels: Vec<ClassLabel>,
    names: Vec<String>,
}

impl<V: Value> State<V> {
    fn from_dataset(ds: &DataSet<V>) -> Self {
        let mut rows = Vec::with_capacity(ds.n());
        let mut labels = Vec::with_capacity(ds.n());
        for (coords, label) in ds.rows() {
            rows.push(coords);
            labels.push(label);
        }
        State { rows, labels, names: ds.dim_names().to_vec() }
    }

    fn into_dataset(self) -> DataSet<V> {
        let rows = self.rows.into_iter().zip(self.labels).collect();
        DataSet::with_names(rows, self.names).expect("reduction preserves validity")
    }

    fn num_dims(&self) -> usize {
        self.names.len()
    }

    fn distinct(&self, dim: usize) -> Vec<V> {
        let mut vals: Vec<V> = self.rows.iter().map(|r| r[dim]).collect();
        vals.sort_by(cmp_values);
        vals.dedup_by(|a, b| a == b);
        vals
    }

    /// Example index sets on the left of each threshold of `dim`.
    fn left_sets(&self, dim: usize) -> Vec<Vec<usize>> {
        let distinct = self.distinct(dim);
        let cuts = distinct.len().saturating_sub(1);
        let mut sets = vec![Vec::new(); cuts];
        for (e, row) in self.rows.iter().enumerate() {
            let pos = distinct
                .binary_search_by(|probe| cmp_values(probe, &row[dim]))
                .expect("row value among distincts");
            for set in sets.iter_mut().skip(pos) {
                set.push(e);
            }
        }
        sets
    }

    /// Removes threshold `k` of `dim` by collapsing the value just above it
    /// onto the threshold value. Left sides of all other cuts are unchanged.
    fn remove_threshold(&mut self, dim: usize, k: usize) {
        let distinct = self.distinct(dim);
        let low = distinct[k];
        let high = distinct[k + 1];
        for row in &mut self.rows {
            if row[dim] == high {
                row[dim] = low;
            }
        }
    }

    fn is_pure(&self, set: &[usize]) -> bool {
        set.windows(2).all(|w| self.labels[w[0]] == self.labels[w[1]])
    }
}

/// Drops coordinate-identical examples, keeping the lowest-id member of
/// each duplicate group.
pub fn remove_duplicate_examples<V: Value>(ds: &DataSet<V>) -> DataSet<V> {
    let mut state = State::from_dataset(ds);
    rule_duplicates(&mut state);
    state.into_dataset()
}

/// Drops every dimension in which all examples share one value.
pub fn remove_constant_dimensions<V: Value>(ds: &DataSet<V>) -> DataSet<V> {
    let mut state = State::from_dataset(ds);
    rule_constant_dims(&mut state);
    state.into_dataset()
}

/// Removes cuts whose left side equals the left side of another cut,
/// exhaustively; the earlier cut of the first such pair (in dimension,
/// threshold order) is rewritten away each round.
pub fn remove_equivalent_cuts<V: Value>(ds: &DataSet<V>) -> DataSet<V> {
    let mut state = State::from_dataset(ds);
    rule_equivalent_cuts(&mut state);
    state.into_dataset()
}

/// For cut pairs of one dimension where both left sides (or both right
/// sides) are single-class, removes the dominated cut, exhaustively.
pub fn dimension_reduction<V: Value>(ds: &DataSet<V>) -> DataSet<V> {
    let mut state = State::from_dataset(ds);
    rule_dimension_reduction(&mut state);
    state.into_dataset()
}

/// Merges dimension pairs that admit a common example ordering in which
/// neither dimension's values decrease, exhaustively.
pub fn merge_dimensions<V: Value>(ds: &DataSet<V>) -> DataSet<V> {
    let mut state = State::from_dataset(ds);
    rule_merge_dimensions(&mut state);
    state.into_dataset()
}

/// Runs all rules: dimension reduction, then equivalent cuts, then
/// dimension merge, then duplicate-example and constant-dimension removal,
/// each exhaustively, and repeats the whole pipeline until nothing
/// changes. The outer loop makes the result a fixpoint: a merge can expose
/// new dimension reductions, so a single pass is not always idempotent.
pub fn reduce_all<V: Value>(ds: &DataSet<V>) -> DataSet<V> {
    let mut state = State::from_dataset(ds);
    loop {
        let mut changed = false;
        changed |= rule_dimension_reduction(&mut state);
        changed |= rule_equivalent_cuts(&mut state);
        changed |= rule_merge_dimensions(&mut state);
        changed |= rule_duplicates(&mut state);
        changed |= rule_constant_dims(&mut state);
        if !changed {
            break;
        }
    }
    state.into_dataset()
}

fn rule_duplicates<V: Value>(state: &mut State<V>) -> bool {
    let n = state.rows.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        let ord = state.rows[a]
            .iter()
            .zip(&state.rows[b])
            .map(|(x, y)| cmp_values(x, y))
            .find(|o| !o.is_eq())
            .unwrap_or(std::cmp::Ordering::Equal);
        ord.then(a.cmp(&b))
    });
    let mut keep = vec![true; n];
    for w in order.windows(2) {
        if state.rows[w[0]] == state.rows[w[1]] {
            keep[w[0].max(w[1])] = false;
        }
    }
    if keep.iter().all(|&k| k) {
        return false;
    }
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for i in 0..n {
        if keep[i] {
            rows.push(std::mem::take(&mut state.rows[i]));
            labels.push(state.labels[i]);
        }
    }
    state.rows = rows;
    state.labels = labels;
    true
}

fn rule_constant_dims<V: Value>(state: &mut State<V>) -> bool {
    let constant: Vec<usize> = (0..state.num_dims())
        .filter(|&dim| state.distinct(dim).len() <= 1)
        .collect();
    if constant.is_empty() {
        return false;
    }
    for &dim in constant.iter().rev() {
        for row in &mut state.rows {
            row.remove(dim);
        }
        state.names.remove(dim);
    }
    true
}

fn rule_equivalent_cuts<V: Value>(state: &mut State<V>) -> bool {
    let mut changed = false;
    'outer: loop {
        let per_dim: Vec<Vec<Vec<usize>>> =
            (0..state.num_dims()).map(|dim| state.left_sets(dim)).collect();
        let mut flat: Vec<(usize, usize, &Vec<usize>)> = Vec::new();
        for (dim, sets) in per_dim.iter().enumerate() {
            for (k, set) in sets.iter().enumerate() {
                flat.push((dim, k, set));
            }
        }
        for i in 0..flat.len() {
            for entry in flat.iter().skip(i + 1) {
                if flat[i].2 == entry.2 {
                    state.remove_threshold(flat[i].0, flat[i].1);
                    changed = true;
                    continue 'outer;
                }
            }
        }
        return changed;
    }
}

fn rule_dimension_reduction<V: Value>(state: &mut State<V>) -> bool {
    let mut changed = false;
    for dim in 0..state.num_dims() {
        loop {
            let sets = state.left_sets(dim);
            let cuts = sets.len();
            if cuts < 2 {
                break;
            }
            let n = state.rows.len();
            let left_pure: Vec<bool> = sets.iter().map(|s| state.is_pure(s)).collect();
            let right_pure: Vec<bool> = sets
                .iter()
                .map(|s| {
                    let mut inside = vec![false; n];
                    for &e in s {
                        inside[e] = true;
                    }
                    let right: Vec<usize> = (0..n).filter(|&e| !inside[e]).collect();
                    state.is_pure(&right)
                })
                .collect();
            let max_left_pure = (0..cuts).rev().find(|&k| left_pure[k]);
            let min_right_pure = (0..cuts).find(|&k| right_pure[k]);
            let mut removable = vec![false; cuts];
            if let Some(kl) = max_left_pure {
                for r in removable.iter_mut().take(kl) {
                    *r = true;
                }
            }
            if let Some(kr) = min_right_pure {
                for r in removable.iter_mut().skip(kr + 1) {
                    *r = true;
                }
            }
            if !removable.iter().any(|&r| r) {
                break;
            }
            for k in (0..cuts).rev() {
                if removable[k] {
                    state.remove_threshold(dim, k);
                }
            }
            changed = true;
        }
    }
    changed
}

fn rule_merge_dimensions<V: Value>(state: &mut State<V>) -> bool {
    let mut changed = false;
    'outer: loop {
        let d = state.num_dims();
        for i in 0..d {
            for j in i + 1..d {
                if let Some(merged) = try_merge(state, i, j) {
                    let name = format!("{}+{}", state.names[i], state.names[j]);
                    // Drop j first so i's index stays valid.
                    for row in &mut state.rows {
                        row.remove(j);
                        row.remove(i);
                    }
                    state.names.remove(j);
                    state.names.remove(i);
                    for (row, value) in state.rows.iter_mut().zip(&merged) {
                        row.push(*value);
                    }
                    state.names.push(name);
                    changed = true;
                    continue 'outer;
                }
            }
        }
        return changed;
    }
}

/// Values of the merged dimension if `i` and `j` admit a common ordering
/// with non-decreasing values in both. Walking that ordering, the merged
/// value starts at 0 and is bumped whenever either original value rises.
fn try_merge<V: Value>(state: &State<V>, i: usize, j: usize) -> Option<Vec<V>> {
    let n = state.rows.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        cmp_values(&state.rows[a][i], &state.rows[b][i])
            .then(cmp_values(&state.rows[a][j], &state.rows[b][j]))
            .then(a.cmp(&b))
    });
    for w in order.windows(2) {
        if cmp_values(&state.rows[w[0]][j], &state.rows[w[1]][j]).is_gt() {
            return None;
        }
    }
    let mut merged = vec![V::from_count(0); n];
    let mut counter = 0usize;
    for w in order.windows(2) {
        let (prev, next) = (w[0], w[1]);
        if state.rows[prev][i] != state.rows[next][i] || state.rows[prev][j] != state.rows[next][j]
        {
            counter += 1;
        }
        merged[next] = V::from_count(counter);
    }
    Some(merged)
}
