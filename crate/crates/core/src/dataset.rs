//! Data set representation and preprocessing.
//!
//! A [`DataSet`] stores the training examples together with everything the
//! solver derives from them once: the minimal per-dimension threshold
//! lists, the rank of every coordinate among the distinct values of its
//! dimension, and one bitmask per cut holding the examples on its left
//! side. Example ids are dense `0..n` so that all example subsets can be
//! bitsets.

use std::collections::HashMap;
use std::fmt;
use std::io;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::value::{cmp_values, Value};
use crate::ExampleSet;

/// Binary class symbol. The preprocessing maps the largest raw class to
/// `Red` and everything else to `Blue`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClassLabel {
    Red,
    Blue,
}

impl ClassLabel {
    pub fn opposite(self) -> Self {
        match self {
            ClassLabel::Red => ClassLabel::Blue,
            ClassLabel::Blue => ClassLabel::Red,
        }
    }
}

impl fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClassLabel::Red => write!(f, "red"),
            ClassLabel::Blue => write!(f, "blue"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Example<V> {
    pub id: usize,
    pub coords: Vec<V>,
    pub label: ClassLabel,
}

/// An axis-parallel test "dimension `dim` value <= threshold". The
/// threshold is identified by its index in the dimension's sorted
/// threshold list; the actual value is [`DataSet::cut_value`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Cut {
    pub dim: usize,
    pub index: usize,
}

/// Instance parameters: `n` examples, `d` dimensions, `cuts` total
/// thresholds, `delta` the maximum number of dimensions in which two
/// opposite-class examples differ, and `domain` the largest number of
/// distinct values in any dimension.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct InstanceStats {
    pub n: usize,
    pub d: usize,
    pub cuts: usize,
    pub delta: usize,
    pub domain: usize,
}

#[derive(Debug, Error)]
pub enum DataError {
    #[error("data set is empty")]
    Empty,
    #[error("row {line} has {got} fields, expected {expected}")]
    RowWidth { line: u64, expected: usize, got: usize },
    #[error("fewer than 2 distinct class values in the input")]
    SingleClass,
    #[error("examples {a} and {b} share all coordinates but differ in label")]
    ConflictingDuplicates { a: usize, b: usize },
    #[error("rows have inconsistent widths")]
    RaggedRows,
    #[error("class column {0:?} not found")]
    ClassColumn(String),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("io: {0}")]
    Io(#[from] io::Error),
}

/// How to locate the class column in a delimited file.
#[derive(Clone, Debug, Default)]
pub enum ClassColumn {
    /// A column named `class` or `target` (case-insensitive), else the last.
    #[default]
    Auto,
    Named(String),
    Index(usize),
}

#[derive(Clone, Debug)]
pub struct ParseOptions {
    pub delimiter: u8,
    pub class_column: ClassColumn,
}

impl Default for ParseOptions {
    fn default() -> Self {
        ParseOptions { delimiter: b',', class_column: ClassColumn::Auto }
    }
}

#[derive(Clone, Debug)]
pub struct DataSet<V = f64> {
    examples: Vec<Example<V>>,
    dim_names: Vec<String>,
    /// Sorted minimal threshold list per dimension; the canonical threshold
    /// between two adjacent distinct values is the lower value.
    thresholds: Vec<Vec<V>>,
    /// `positions[dim][e]` ranks `e`'s coordinate among the distinct values
    /// of `dim`; example `e` is on the left of cut `k` iff `positions <= k`.
    positions: Vec<Vec<usize>>,
    /// `left_masks[dim][k]`: all examples on the left side of cut `(dim, k)`.
    left_masks: Vec<Vec<ExampleSet>>,
    red: ExampleSet,
    stats: InstanceStats,
}

impl<V: Value> DataSet<V> {
    /// Builds a data set from labeled coordinate rows. Ids are assigned in
    /// row order. Fails on conflicting duplicates, empty input or ragged
    /// rows; use [`dedupe_conflicts`] first for raw data.
    pub fn new(rows: Vec<(Vec<V>, ClassLabel)>) -> Result<Self, DataError> {
        let d = rows.first().map(|(c, _)| c.len()).unwrap_or(0);
        let names = (0..d).map(|i| format!("d{i}")).collect();
        Self::with_names(rows, names)
    }

    pub fn with_names(
        rows: Vec<(Vec<V>, ClassLabel)>,
        dim_names: Vec<String>,
    ) -> Result<Self, DataError> {
        if rows.is_empty() {
            return Err(DataError::Empty);
        }
        let d = dim_names.len();
        if rows.iter().any(|(c, _)| c.len() != d) {
            return Err(DataError::RaggedRows);
        }
        if let Some((a, b)) = find_conflict(&rows) {
            return Err(DataError::ConflictingDuplicates { a, b });
        }

        let n = rows.len();
        let examples: Vec<Example<V>> = rows
            .into_iter()
            .enumerate()
            .map(|(id, (coords, label))| Example { id, coords, label })
            .collect();

        let mut thresholds = Vec::with_capacity(d);
        let mut positions = Vec::with_capacity(d);
        let mut left_masks = Vec::with_capacity(d);
        for dim in 0..d {
            let values: Vec<V> = examples.iter().map(|e| e.coords[dim]).collect();
            let distinct = sorted_distinct(&values);
            let thr = compute_thresholds(&values);
            debug_assert_eq!(thr.len(), distinct.len().saturating_sub(1));

            let pos: Vec<usize> = values
                .iter()
                .map(|v| {
                    distinct
                        .binary_search_by(|probe| cmp_values(probe, v))
                        .expect("value occurs among distinct values")
                })
                .collect();

            let mut masks: Vec<ExampleSet> = vec![FixedBitSet::with_capacity(n); thr.len()];
            for (e, &p) in pos.iter().enumerate() {
                for mask in masks.iter_mut().skip(p) {
                    mask.insert(e);
                }
            }
            thresholds.push(thr);
            positions.push(pos);
            left_masks.push(masks);
        }

        let mut red = FixedBitSet::with_capacity(n);
        for e in &examples {
            if e.label == ClassLabel::Red {
                red.insert(e.id);
            }
        }

        let cuts = thresholds.iter().map(Vec::len).sum();
        let domain = thresholds.iter().map(|t| t.len() + 1).max().unwrap_or(0);
        let delta = max_opposite_diff(&examples, &positions);
        let stats = InstanceStats { n, d, cuts, delta, domain };

        Ok(DataSet { examples, dim_names, thresholds, positions, left_masks, red, stats })
    }

    pub fn n(&self) -> usize {
        self.examples.len()
    }

    pub fn num_dims(&self) -> usize {
        self.dim_names.len()
    }

    pub fn stats(&self) -> InstanceStats {
        self.stats
    }

    pub fn examples(&self) -> &[Example<V>] {
        &self.examples
    }

    pub fn label(&self, e: usize) -> ClassLabel {
        self.examples[e].label
    }

    pub fn value(&self, e: usize, dim: usize) -> V {
        self.examples[e].coords[dim]
    }

    pub fn dim_names(&self) -> &[String] {
        &self.dim_names
    }

    /// Examples of one class as a bitset.
    pub fn class_set(&self, label: ClassLabel) -> ExampleSet {
        match label {
            ClassLabel::Red => self.red.clone(),
            ClassLabel::Blue => {
                let mut b = self.red.clone();
                b.toggle_range(..);
                b
            }
        }
    }

    pub fn red_set(&self) -> &ExampleSet {
        &self.red
    }

    pub fn thresholds(&self, dim: usize) -> &[V] {
        &self.thresholds[dim]
    }

    pub fn num_thresholds(&self, dim: usize) -> usize {
        self.thresholds[dim].len()
    }

    /// Number of distinct values in a dimension.
    pub fn distinct_count(&self, dim: usize) -> usize {
        self.thresholds[dim].len() + 1
    }

    pub fn cut_count(&self) -> usize {
        self.stats.cuts
    }

    pub fn cuts(&self) -> impl Iterator<Item = Cut> + '_ {
        (0..self.num_dims()).flat_map(move |dim| {
            (0..self.num_thresholds(dim)).map(move |index| Cut { dim, index })
        })
    }

    pub fn cut_value(&self, cut: Cut) -> V {
        self.thresholds[cut.dim][cut.index]
    }

    /// Rank of `e`'s coordinate among the distinct values of `dim`;
    /// `e` lies on the left side of cut `(dim, k)` iff `position <= k`.
    pub fn position(&self, dim: usize, e: usize) -> usize {
        self.positions[dim][e]
    }

    pub fn left_mask(&self, cut: Cut) -> &ExampleSet {
        &self.left_masks[cut.dim][cut.index]
    }

    pub fn on_left(&self, e: usize, cut: Cut) -> bool {
        self.positions[cut.dim][e] <= cut.index
    }

    /// Number of cuts separating the pair, i.e. thresholds strictly
    /// between their coordinates summed over all dimensions.
    pub fn separating_cut_count(&self, e1: usize, e2: usize) -> usize {
        (0..self.num_dims())
            .map(|dim| {
                let a = self.positions[dim][e1];
                let b = self.positions[dim][e2];
                a.abs_diff(b)
            })
            .sum()
    }

    /// Labeled coordinate rows in id order, e.g. to feed a reduction rule.
    pub fn rows(&self) -> Vec<(Vec<V>, ClassLabel)> {
        self.examples.iter().map(|e| (e.coords.clone(), e.label)).collect()
    }

    /// Sub-instance over `subset`, with thresholds recomputed from the
    /// surviving values. Returns the new data set together with the old
    /// ids in ascending order (new id = index into that list).
    pub fn restrict_to(&self, subset: &ExampleSet) -> (DataSet<V>, Vec<usize>) {
        let ids: Vec<usize> = subset.ones().collect();
        let rows = ids
            .iter()
            .map(|&e| (self.examples[e].coords.clone(), self.examples[e].label))
            .collect();
        let ds = DataSet::with_names(rows, self.dim_names.clone())
            .expect("subset of a valid data set is valid");
        (ds, ids)
    }

    /// Writes the data set back out as a delimited table with a trailing
    /// `class` column.
    pub fn write_csv<W: io::Write>(&self, out: W, delimiter: u8) -> Result<(), DataError> {
        let mut w = csv::WriterBuilder::new().delimiter(delimiter).from_writer(out);
        let mut header: Vec<String> = self.dim_names.clone();
        header.push("class".to_string());
        w.write_record(&header)?;
        for e in &self.examples {
            let mut rec: Vec<String> = e.coords.iter().map(|v| v.to_string()).collect();
            rec.push(e.label.to_string());
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Splits `subset` by a cut: left takes the examples with value <= threshold.
pub fn cut_sides<V: Value>(
    ds: &DataSet<V>,
    subset: &ExampleSet,
    cut: Cut,
) -> (ExampleSet, ExampleSet) {
    let mut left = subset.clone();
    left.intersect_with(ds.left_mask(cut));
    let mut right = subset.clone();
    right.difference_with(&left);
    (left, right)
}

/// Minimal threshold list: one threshold between each pair of adjacent
/// distinct values, canonically the lower value.
pub fn compute_thresholds<V: Value>(values: &[V]) -> Vec<V> {
    let mut distinct = sorted_distinct(values);
    distinct.pop();
    distinct
}

fn sorted_distinct<V: Value>(values: &[V]) -> Vec<V> {
    let mut sorted: Vec<V> = values.to_vec();
    sorted.sort_by(cmp_values);
    sorted.dedup_by(|a, b| a == b);
    sorted
}

/// Maps raw class strings to binary labels: every example of the most
/// frequent raw class becomes red, everything else blue. Frequency ties
/// go to the lexicographically smaller raw class.
pub fn relabel_largest_class(raw: &[String]) -> Vec<ClassLabel> {
    let mut counts: HashMap<&str, usize> = HashMap::new();
    for label in raw {
        *counts.entry(label.as_str()).or_default() += 1;
    }
    let mut best: Option<(&str, usize)> = None;
    for (&label, &count) in &counts {
        let better = match best {
            None => true,
            Some((bl, bc)) => count > bc || (count == bc && label < bl),
        };
        if better {
            best = Some((label, count));
        }
    }
    let red = best.map(|(l, _)| l).unwrap_or_default();
    raw.iter()
        .map(|l| if l == red { ClassLabel::Red } else { ClassLabel::Blue })
        .collect()
}

/// Removes conflicting duplicates: within each group of rows that share
/// all coordinates but not all labels, only the first row in input order
/// survives. Coordinate groups with a uniform label are left alone.
pub fn dedupe_conflicts<V: Value>(
    rows: Vec<(Vec<V>, ClassLabel)>,
) -> Vec<(Vec<V>, ClassLabel)> {
    let mut order: Vec<usize> = (0..rows.len()).collect();
    order.sort_by(|&a, &b| {
        cmp_coords(&rows[a].0, &rows[b].0).then(a.cmp(&b))
    });

    let mut drop = vec![false; rows.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && cmp_coords(&rows[order[start]].0, &rows[order[end]].0).is_eq() {
            end += 1;
        }
        let group = &order[start..end];
        let mixed = group.iter().any(|&i| rows[i].1 != rows[group[0]].1);
        if mixed {
            let survivor = *group.iter().min().unwrap();
            for &i in group {
                drop[i] = i != survivor;
            }
        }
        start = end;
    }
    rows.into_iter()
        .enumerate()
        .filter_map(|(i, row)| (!drop[i]).then_some(row))
        .collect()
}

fn cmp_coords<V: Value>(a: &[V], b: &[V]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        let ord = cmp_values(x, y);
        if !ord.is_eq() {
            return ord;
        }
    }
    std::cmp::Ordering::Equal
}

fn find_conflict<V: Value>(rows: &[(Vec<V>, ClassLabel)]) -> Option<(usize, usize)> {
    let mut order: Vec<usize> = (0..rows.len()).collect();
    order.sort_by(|&a, &b| cmp_coords(&rows[a].0, &rows[b].0).then(a.cmp(&b)));
    for w in order.windows(2) {
        if cmp_coords(&rows[w[0]].0, &rows[w[1]].0).is_eq() && rows[w[0]].1 != rows[w[1]].1 {
            return Some((w[0], w[1]));
        }
    }
    None
}

fn max_opposite_diff<V: Value>(examples: &[Example<V>], positions: &[Vec<usize>]) -> usize {
    let mut delta = 0;
    for (i, a) in examples.iter().enumerate() {
        for b in examples.iter().skip(i + 1) {
            if a.label == b.label {
                continue;
            }
            let diff = positions
                .iter()
                .filter(|pos| pos[a.id] != pos[b.id])
                .count();
            delta = delta.max(diff);
        }
    }
    delta
}

/// Replaces each categorical column (one with any non-numeric cell) by one
/// 0/1 indicator column per distinct category value; numeric columns are
/// passed through parsed. Returns the new column names and row-major data.
pub fn binarize_categoricals<V: Value>(
    headers: &[String],
    rows: &[Vec<String>],
) -> (Vec<String>, Vec<Vec<V>>) {
    let mut names = Vec::new();
    let mut columns: Vec<Vec<V>> = Vec::new();

    for (j, name) in headers.iter().enumerate() {
        let cells: Vec<&str> = rows.iter().map(|r| r[j].as_str()).collect();
        let parsed: Option<Vec<V>> = cells.iter().map(|c| V::from_decimal(c)).collect();
        match parsed {
            Some(col) => {
                names.push(name.clone());
                columns.push(col);
            }
            None => {
                let mut categories: Vec<&str> = cells.clone();
                categories.sort_unstable();
                categories.dedup();
                for cat in categories {
                    names.push(format!("{name}={cat}"));
                    columns.push(
                        cells
                            .iter()
                            .map(|&c| {
                                if c == cat {
                                    V::from_count(1)
                                } else {
                                    V::from_count(0)
                                }
                            })
                            .collect(),
                    );
                }
            }
        }
    }

    let data = (0..rows.len())
        .map(|i| columns.iter().map(|col| col[i]).collect())
        .collect();
    (names, data)
}

/// How the raw class values map onto the binary labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabelMapping {
    /// The most frequent raw class, colored red.
    pub red: String,
    /// Every other raw class, colored blue.
    pub blue: Vec<String>,
}

/// Parses a delimited table with a header row into a preprocessed data
/// set: categorical columns are one-hot expanded, the largest raw class
/// becomes red, and conflicting duplicates are resolved.
pub fn parse_csv<V: Value, R: io::Read>(
    input: R,
    options: &ParseOptions,
) -> Result<DataSet<V>, DataError> {
    parse_csv_labeled(input, options).map(|(ds, _)| ds)
}

/// Like [`parse_csv`], also reporting which raw class became red.
pub fn parse_csv_labeled<V: Value, R: io::Read>(
    input: R,
    options: &ParseOptions,
) -> Result<(DataSet<V>, LabelMapping), DataError> {
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(options.delimiter)
        .flexible(true)
        .from_reader(input);

    let headers: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    let width = headers.len();

    let class_idx = match &options.class_column {
        ClassColumn::Index(i) => {
            if *i >= width {
                return Err(DataError::ClassColumn(i.to_string()));
            }
            *i
        }
        ClassColumn::Named(name) => headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| DataError::ClassColumn(name.clone()))?,
        ClassColumn::Auto => headers
            .iter()
            .position(|h| {
                let h = h.to_ascii_lowercase();
                h == "class" || h == "target"
            })
            .unwrap_or(width - 1),
    };

    let mut raw_labels = Vec::new();
    let mut raw_rows: Vec<Vec<String>> = Vec::new();
    for record in reader.records() {
        let record = record?;
        if record.len() != width {
            let line = record.position().map(|p| p.line()).unwrap_or(0);
            return Err(DataError::RowWidth { line, expected: width, got: record.len() });
        }
        let mut row = Vec::with_capacity(width - 1);
        for (j, cell) in record.iter().enumerate() {
            if j == class_idx {
                raw_labels.push(cell.to_string());
            } else {
                row.push(cell.to_string());
            }
        }
        raw_rows.push(row);
    }
    if raw_rows.is_empty() {
        return Err(DataError::Empty);
    }

    let mut distinct_classes = raw_labels.clone();
    distinct_classes.sort_unstable();
    distinct_classes.dedup();
    if distinct_classes.len() < 2 {
        return Err(DataError::SingleClass);
    }

    let feature_headers: Vec<String> = headers
        .iter()
        .enumerate()
        .filter_map(|(j, h)| (j != class_idx).then(|| h.clone()))
        .collect();
    let (names, data) = binarize_categoricals::<V>(&feature_headers, &raw_rows);
    let labels = relabel_largest_class(&raw_labels);
    let red = raw_labels
        .iter()
        .zip(&labels)
        .find(|(_, l)| **l == ClassLabel::Red)
        .map(|(raw, _)| raw.clone())
        .unwrap_or_default();
    let blue = {
        let mut rest: Vec<String> =
            distinct_classes.into_iter().filter(|c| *c != red).collect();
        rest.sort_unstable();
        rest
    };

    let rows: Vec<(Vec<V>, ClassLabel)> = data.into_iter().zip(labels).collect();
    let rows = dedupe_conflicts(rows);
    let ds = DataSet::with_names(rows, names)?;
    Ok((ds, LabelMapping { red, blue }))
}
