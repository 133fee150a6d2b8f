//! Branch and bound over witness trees.
//!
//! `solve_bsdt` answers the bounded-size question: is there a perfect tree
//! with at most `budget` cuts. It recursively picks a dirty example,
//! iterates its admissible refinements in search order, and prunes with
//! subset constraints, the improvement lower bound, and the set-trie cache
//! of subset lower bounds. `solve_msdt` drives it to the minimum size with
//! one of three budget strategies, sharing the cache across calls.

use std::collections::HashMap;
use std::str::FromStr;
use std::time::{Duration, Instant};

use fixedbitset::FixedBitSet;
use serde::Serialize;

use crate::bounds;
use crate::constraints::{self, ConstraintKind};
use crate::dataset::{cut_sides, ClassLabel, Cut, DataSet};
use crate::reduce;
use crate::settrie::SetTrie;
use crate::tree::{PlainCut, PlainTree};
use crate::value::Value;
use crate::witness::WitnessTree;
use crate::ExampleSet;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    /// Raise the budget from the pair lower bound until a tree appears.
    Ascending,
    /// Lower the budget from the greedy upper bound until none exists.
    Descending,
    /// Binary search between the two.
    Binary,
}

impl FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "ascending" => Ok(Strategy::Ascending),
            "descending" => Ok(Strategy::Descending),
            "binary" => Ok(Strategy::Binary),
            other => Err(format!("unknown strategy {other:?}")),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SearchConfig {
    pub reduce: bool,
    pub imp_lb: bool,
    pub pair_lb: bool,
    pub threshold_constraints: bool,
    pub dirty_constraints: bool,
    pub cache: bool,
    pub dirty_priority: bool,
    pub strategy: Strategy,
    pub time_limit: Option<Duration>,
    pub max_size: Option<usize>,
    pub cache_vertex_cap: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            reduce: true,
            imp_lb: true,
            pair_lb: true,
            threshold_constraints: true,
            dirty_constraints: true,
            cache: true,
            dirty_priority: true,
            strategy: Strategy::Ascending,
            time_limit: None,
            max_size: None,
            cache_vertex_cap: 1 << 22,
        }
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct SearchStats {
    pub nodes: u64,
    pub bsdt_calls: u64,
    pub nested_runs: u64,
    pub bound_prunes: u64,
    pub constraint_prunes: u64,
    pub cache_prunes: u64,
    pub cache_inserts: u64,
    pub cache_vertices: usize,
    pub elapsed_ms: u128,
}

impl SearchStats {
    fn absorb(&mut self, other: &SearchStats) {
        self.nodes += other.nodes;
        self.bound_prunes += other.bound_prunes;
        self.constraint_prunes += other.constraint_prunes;
        self.cache_prunes += other.cache_prunes;
        self.cache_inserts += other.cache_inserts;
    }
}

/// State shared across the bounded-size calls of one solve session.
pub struct SolveContext {
    pub config: SearchConfig,
    pub trie: SetTrie,
    pub stats: SearchStats,
    pub deadline: Option<Instant>,
    /// Leaf sets already known solvable within some size, so repeated
    /// cache-population probes skip the nested run.
    solvable: HashMap<ExampleSet, usize>,
}

impl SolveContext {
    pub fn new(config: SearchConfig) -> Self {
        let trie = SetTrie::with_vertex_cap(config.cache_vertex_cap);
        SolveContext { config, trie, stats: SearchStats::default(), deadline: None, solvable: HashMap::new() }
    }
}

#[derive(Debug)]
pub enum BsdtOutcome<V> {
    Perfect(PlainTree<V>),
    Infeasible,
    Timeout,
}

enum Flow<V> {
    Found(PlainTree<V>),
    Exhausted,
    Timeout,
}

/// Over all opposite-class pairs, the pair separated by the fewest cuts;
/// the lower-id member is the initial witness, the other the first
/// guaranteed-dirty example. `None` on single-class data.
pub fn initial_witness<V: Value>(ds: &DataSet<V>) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize, usize)> = None;
    for i in 0..ds.n() {
        for j in i + 1..ds.n() {
            if ds.label(i) == ds.label(j) {
                continue;
            }
            let c = ds.separating_cut_count(i, j);
            if best.map_or(true, |(bc, _, _)| c < bc) {
                best = Some((c, i, j));
            }
        }
    }
    best.map(|(_, i, j)| (i, j))
}

/// CART-style greedy perfect tree: at every node the cut minimizing the
/// size-weighted Gini impurity of its two sides, ties to the first cut in
/// (dimension, threshold) order. Its size is the initial upper bound.
pub fn greedy_upper_bound<V: Value>(ds: &DataSet<V>) -> PlainTree<V> {
    let mut all = FixedBitSet::with_capacity(ds.n());
    all.insert_range(..);
    grow_greedy(ds, &all)
}

fn grow_greedy<V: Value>(ds: &DataSet<V>, subset: &ExampleSet) -> PlainTree<V> {
    let total = subset.count_ones(..);
    let mut sub_red = subset.clone();
    sub_red.intersect_with(ds.red_set());
    let reds = sub_red.count_ones(..);
    if reds == total {
        return PlainTree::leaf(ClassLabel::Red);
    }
    if reds == 0 {
        return PlainTree::leaf(ClassLabel::Blue);
    }

    let mut best: Option<(f64, Cut)> = None;
    for cut in ds.cuts() {
        let mask = ds.left_mask(cut);
        let left_count = subset.intersection_count(mask);
        let right_count = total - left_count;
        if left_count == 0 || right_count == 0 {
            continue;
        }
        let left_red = sub_red.intersection_count(mask);
        let right_red = reds - left_red;
        let score = left_count as f64 * gini(left_red, left_count)
            + right_count as f64 * gini(right_red, right_count);
        if best.map_or(true, |(bs, _)| score < bs) {
            best = Some((score, cut));
        }
    }
    let (_, cut) = best.expect("impure subsets always admit a separating cut");
    let (left, right) = cut_sides(ds, subset, cut);
    PlainTree::Inner {
        cut: PlainCut { dim: cut.dim, thr: ds.cut_value(cut) },
        left: Box::new(grow_greedy(ds, &left)),
        right: Box::new(grow_greedy(ds, &right)),
    }
}

fn gini(red: usize, total: usize) -> f64 {
    let p = red as f64 / total as f64;
    1.0 - p * p - (1.0 - p) * (1.0 - p)
}

/// Finds a perfect tree of size at most `budget`, or proves none exists.
pub fn solve_bsdt<V: Value>(
    ds: &DataSet<V>,
    budget: usize,
    ctx: &mut SolveContext,
) -> BsdtOutcome<V> {
    ctx.stats.bsdt_calls += 1;
    let reds = ds.red_set().count_ones(..);
    if reds == 0 || reds == ds.n() {
        return BsdtOutcome::Perfect(PlainTree::leaf(ds.label(0)));
    }
    let witness = if ctx.config.dirty_priority {
        initial_witness(ds).expect("both classes present").0
    } else {
        0
    };
    let tree = WitnessTree::new_initial(ds, witness, ctx.config.dirty_priority);
    let SolveContext { config, trie, stats, deadline, solvable } = ctx;
    let mut searcher = Searcher {
        ds,
        tree,
        budget,
        config,
        trie,
        stats,
        solvable,
        deadline: *deadline,
    };
    match searcher.refine() {
        Flow::Found(tree) => BsdtOutcome::Perfect(tree),
        Flow::Exhausted => BsdtOutcome::Infeasible,
        Flow::Timeout => BsdtOutcome::Timeout,
    }
}

struct Searcher<'a, 'c, V: Value> {
    ds: &'a DataSet<V>,
    tree: WitnessTree<'a, V>,
    budget: usize,
    config: &'c SearchConfig,
    trie: &'c mut SetTrie,
    stats: &'c mut SearchStats,
    solvable: &'c mut HashMap<ExampleSet, usize>,
    deadline: Option<Instant>,
}

impl<V: Value> Searcher<'_, '_, V> {
    fn refine(&mut self) -> Flow<V> {
        self.stats.nodes += 1;
        if let Some(deadline) = self.deadline {
            if Instant::now() >= deadline {
                return Flow::Timeout;
            }
        }
        if self.tree.is_perfect() {
            return Flow::Found(self.tree.snapshot());
        }
        debug_assert!(self.tree.size() <= self.budget);
        if self.tree.size() == self.budget {
            return Flow::Exhausted;
        }

        let e = self.pick_dirty();
        let candidates = self.tree.enumerate_refinements(e);
        let mut tried: Vec<usize> = Vec::new();
        let mut group: Option<(usize, usize)> = None;
        for r in candidates {
            let key = (r.vertex, r.cut.dim);
            if group != Some(key) {
                group = Some(key);
                tried.clear();
            }

            let dirty_members = if self.config.dirty_constraints {
                constraints::dirty_constraint_members(&self.tree, r)
            } else {
                None
            };

            let mut violated = self.tree.apply_refinement(r);
            let cmark = self.tree.constraints.mark();
            let new_inner = self.tree.num_vertices() - 2;
            if self.config.threshold_constraints {
                for &earlier in &tried {
                    let members = constraints::threshold_constraint_members(&self.tree, r, earlier);
                    violated |= self.tree.constraints.push(
                        new_inner,
                        members,
                        ConstraintKind::Threshold { constraint_threshold: earlier },
                    );
                }
            }
            if let Some(members) = dirty_members {
                violated |= self.tree.constraints.push(new_inner, members, ConstraintKind::Dirty);
            }

            let flow = if violated {
                self.stats.constraint_prunes += 1;
                None
            } else if self.config.imp_lb
                && bounds::imp_lower_bound(&self.tree) > self.budget - self.tree.size()
            {
                self.stats.bound_prunes += 1;
                None
            } else if self.config.cache && self.cache_prunes() {
                self.stats.cache_prunes += 1;
                None
            } else {
                Some(self.refine())
            };

            self.tree.constraints.truncate(cmark);
            self.tree.undo();
            match flow {
                Some(Flow::Found(t)) => return Flow::Found(t),
                Some(Flow::Timeout) => return Flow::Timeout,
                _ => {}
            }
            tried.push(r.cut.index);
        }
        Flow::Exhausted
    }

    fn pick_dirty(&self) -> usize {
        if !self.config.dirty_priority {
            return self.tree.dirty_set().ones().next().expect("tree is not perfect");
        }
        let mut best: Option<(u64, usize)> = None;
        for e in self.tree.dirty_set().ones() {
            let count = self.tree.cached_refinement_count(e);
            if best.map_or(true, |(bc, _)| count < bc) {
                best = Some((count, e));
            }
        }
        best.expect("tree is not perfect").1
    }

    /// Cache probe, then cache population: any leaf whose example set has
    /// a stored (or freshly computed) lower bound above the remaining
    /// budget kills the branch.
    fn cache_prunes(&mut self) -> bool {
        let remaining = self.budget - self.tree.size();
        let leaves = self.tree.leaves();
        for &leaf in &leaves {
            if let Some(z) = self.trie.max_subset_bound(self.tree.examples_at(leaf), remaining) {
                if z > remaining {
                    return true;
                }
            }
        }

        let cap = (self.ds.n() / 4).min(30);
        for &leaf in &leaves {
            let members = self.tree.examples_at(leaf);
            let count = members.count_ones(..);
            if count < 2 || count > cap {
                continue;
            }
            let reds = members.intersection_count(self.ds.red_set());
            if reds == 0 || reds == count {
                continue;
            }
            if self.solvable.get(members).is_some_and(|&k| k <= remaining) {
                continue;
            }
            let (sub, _ids) = self.ds.restrict_to(members);
            let mut nested_config = self.config.clone();
            nested_config.cache = false;
            let mut nested = SolveContext::new(nested_config);
            nested.deadline = self.deadline;
            let outcome = solve_bsdt(&sub, remaining, &mut nested);
            self.stats.absorb(&nested.stats);
            self.stats.nested_runs += 1;
            match outcome {
                BsdtOutcome::Perfect(t) => {
                    let entry = self.solvable.entry(members.clone()).or_insert(usize::MAX);
                    *entry = (*entry).min(t.size());
                }
                BsdtOutcome::Infeasible => {
                    self.trie.insert(members, remaining + 1);
                    self.stats.cache_inserts += 1;
                    return true;
                }
                BsdtOutcome::Timeout => {} // keep going; the node entry check will fire
            }
        }
        false
    }
}

/// Smallest number of refinements turning the current tree into a perfect
/// one, found by the plain unpruned recursion with rising budgets. The
/// tree is restored before returning; used to audit lower bounds.
pub fn min_completion<V: Value>(tree: &mut WitnessTree<'_, V>) -> usize {
    let base = tree.size();
    let limit = tree.dataset().n();
    for extra in 0..=limit {
        if plain_search(tree, base + extra) {
            return extra;
        }
    }
    unreachable!("a perfect completion always exists within n leaves");
}

fn plain_search<V: Value>(tree: &mut WitnessTree<'_, V>, budget: usize) -> bool {
    if tree.is_perfect() {
        return true;
    }
    if tree.size() == budget {
        return false;
    }
    let e = tree.dirty_set().ones().next().unwrap();
    for r in tree.enumerate_refinements(e) {
        tree.apply_refinement(r);
        let found = plain_search(tree, budget);
        tree.undo();
        if found {
            return true;
        }
    }
    false
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    /// A provably minimum-size perfect tree was found.
    Optimal,
    /// The minimum exceeds the configured size cap.
    ExceedsMaxSize,
    Timeout,
}

#[derive(Debug)]
pub struct SolveResult<V> {
    pub status: SolveStatus,
    pub tree: Option<PlainTree<V>>,
    pub size: Option<usize>,
    /// Best proven lower bound on the minimum size.
    pub lower_bound: usize,
    pub pair_lb: usize,
    pub greedy_ub: Option<usize>,
    /// The instance the search actually ran on (reduced when enabled);
    /// the returned tree classifies this data set.
    pub dataset: DataSet<V>,
    pub stats: SearchStats,
}

/// Finds a minimum-size perfect tree for the data set.
pub fn solve_msdt<V: Value>(ds: &DataSet<V>, config: &SearchConfig) -> SolveResult<V> {
    let started = Instant::now();
    let solved = if config.reduce { reduce::reduce_all(ds) } else { ds.clone() };
    let mut ctx = SolveContext::new(config.clone());
    ctx.deadline = config.time_limit.map(|limit| started + limit);

    let finish = |status, tree: Option<PlainTree<V>>, lower_bound, pair_lb, greedy_ub, mut ctx: SolveContext, solved| {
        let mut stats = std::mem::take(&mut ctx.stats);
        stats.elapsed_ms = started.elapsed().as_millis();
        stats.cache_vertices = ctx.trie.vertex_count();
        SolveResult {
            status,
            size: tree.as_ref().map(PlainTree::size),
            tree,
            lower_bound,
            pair_lb,
            greedy_ub,
            dataset: solved,
            stats,
        }
    };

    let reds = solved.red_set().count_ones(..);
    if reds == 0 || reds == solved.n() {
        let tree = PlainTree::leaf(solved.label(0));
        return finish(SolveStatus::Optimal, Some(tree), 0, 0, None, ctx, solved);
    }

    let pair_lb = if config.pair_lb { bounds::pair_lower_bound(&solved).bound } else { 0 };
    let lo = pair_lb.max(1);

    match config.strategy {
        Strategy::Ascending => {
            let mut s = lo;
            loop {
                if let Some(cap) = config.max_size {
                    if s > cap {
                        return finish(SolveStatus::ExceedsMaxSize, None, s, pair_lb, None, ctx, solved);
                    }
                }
                match solve_bsdt(&solved, s, &mut ctx) {
                    BsdtOutcome::Perfect(t) => {
                        return finish(SolveStatus::Optimal, Some(t), s, pair_lb, None, ctx, solved);
                    }
                    BsdtOutcome::Infeasible => s += 1,
                    BsdtOutcome::Timeout => {
                        return finish(SolveStatus::Timeout, None, s, pair_lb, None, ctx, solved);
                    }
                }
            }
        }
        Strategy::Descending => {
            let greedy = greedy_upper_bound(&solved);
            let ub = greedy.size();
            let mut best = greedy;
            if let Some(cap) = config.max_size {
                if best.size() > cap {
                    match solve_bsdt(&solved, cap, &mut ctx) {
                        BsdtOutcome::Perfect(t) => best = t,
                        BsdtOutcome::Infeasible => {
                            return finish(
                                SolveStatus::ExceedsMaxSize, None, cap + 1, pair_lb, Some(ub), ctx, solved,
                            );
                        }
                        BsdtOutcome::Timeout => {
                            return finish(SolveStatus::Timeout, None, lo, pair_lb, Some(ub), ctx, solved);
                        }
                    }
                }
            }
            while best.size() > lo {
                let s = best.size() - 1;
                match solve_bsdt(&solved, s, &mut ctx) {
                    BsdtOutcome::Perfect(t) => best = t,
                    BsdtOutcome::Infeasible => break,
                    BsdtOutcome::Timeout => {
                        return finish(
                            SolveStatus::Timeout, Some(best), lo, pair_lb, Some(ub), ctx, solved,
                        );
                    }
                }
            }
            let size = best.size();
            finish(SolveStatus::Optimal, Some(best), size, pair_lb, Some(ub), ctx, solved)
        }
        Strategy::Binary => {
            let greedy = greedy_upper_bound(&solved);
            let ub = greedy.size();
            let mut best = greedy;
            let mut lower = lo;
            if let Some(cap) = config.max_size {
                if best.size() > cap {
                    match solve_bsdt(&solved, cap, &mut ctx) {
                        BsdtOutcome::Perfect(t) => best = t,
                        BsdtOutcome::Infeasible => {
                            return finish(
                                SolveStatus::ExceedsMaxSize, None, cap + 1, pair_lb, Some(ub), ctx, solved,
                            );
                        }
                        BsdtOutcome::Timeout => {
                            return finish(SolveStatus::Timeout, None, lower, pair_lb, Some(ub), ctx, solved);
                        }
                    }
                }
            }
            while lower < best.size() {
                let mid = (lower + best.size()) / 2;
                match solve_bsdt(&solved, mid, &mut ctx) {
                    BsdtOutcome::Perfect(t) => best = t,
                    BsdtOutcome::Infeasible => lower = mid + 1,
                    BsdtOutcome::Timeout => {
                        return finish(
                            SolveStatus::Timeout, Some(best), lower, pair_lb, Some(ub), ctx, solved,
                        );
                    }
                }
            }
            let size = best.size();
            finish(SolveStatus::Optimal, Some(best), size, pair_lb, Some(ub), ctx, solved)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::ClassLabel::{Blue, Red};
    use crate::oracle;
    use crate::witness::Refinement;

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
    fn bsdt_fig_budget_four_succeeds_three_fails() {
        let ds = fig_dataset();
        let mut ctx = SolveContext::new(SearchConfig::default());
        match solve_bsdt(&ds, 4, &mut ctx) {
            BsdtOutcome::Perfect(t) => {
                assert!(t.size() <= 4);
                assert!(t.is_perfect_on(&ds));
            }
            other => panic!("expected tree, got {other:?}"),
        }
        let mut ctx = SolveContext::new(SearchConfig::default());
        assert!(matches!(solve_bsdt(&ds, 3, &mut ctx), BsdtOutcome::Infeasible));
    }

    #[test]
    fn bsdt_single_class_zero_budget() {
        let ds = DataSet::new(vec![(vec![0.0], Red), (vec![1.0], Red)]).unwrap();
        let mut ctx = SolveContext::new(SearchConfig::default());
        match solve_bsdt(&ds, 0, &mut ctx) {
            BsdtOutcome::Perfect(t) => assert_eq!(t.size(), 0),
            other => panic!("expected bare leaf, got {other:?}"),
        }
    }

    #[test]
    fn msdt_fig_minimum_four_under_all_strategies() {
        let ds = fig_dataset();
        for strategy in [Strategy::Ascending, Strategy::Descending, Strategy::Binary] {
            let config = SearchConfig { strategy, ..Default::default() };
            let result = solve_msdt(&ds, &config);
            assert_eq!(result.status, SolveStatus::Optimal);
            assert_eq!(result.size, Some(4), "strategy {strategy:?}");
            let tree = result.tree.unwrap();
            assert!(tree.is_perfect_on(&result.dataset));
        }
    }

    #[test]
    fn msdt_single_pair() {
        let ds = DataSet::new(vec![(vec![0.0], Red), (vec![1.0], Blue)]).unwrap();
        let result = solve_msdt(&ds, &SearchConfig::default());
        assert_eq!(result.size, Some(1));
    }

    #[test]
    fn msdt_random_instance_matches_oracle() {
        let params = oracle::InstanceParams { n: 12, d: 3, max_value: 3, red_fraction: 0.5 };
        for seed in 0..10u64 {
            let ds: DataSet<f64> = oracle::random_instance(seed, &params);
            let expected = oracle::min_size_exact(&ds).unwrap();
            let result = solve_msdt(&ds, &SearchConfig::default());
            assert_eq!(result.size, Some(expected), "seed {seed}");
        }
    }

    #[test]
    fn max_size_cap_reports_exceeded() {
        let ds = fig_dataset();
        let config = SearchConfig { max_size: Some(2), ..Default::default() };
        let result = solve_msdt(&ds, &config);
        assert_eq!(result.status, SolveStatus::ExceedsMaxSize);
        // The pair bound alone already proves four cuts are needed.
        assert_eq!(result.lower_bound, 4);
        assert!(result.tree.is_none());
    }

    #[test]
    fn initial_witness_prefers_fewest_separating_cuts() {
        let ds = fig_dataset();
        // Pairs separated by a single cut: (b,c), (c,d), (d,e); the
        // first in id order is (b,c), so b is the witness.
        assert_eq!(initial_witness(&ds), Some((1, 2)));

        let two = DataSet::new(vec![
            (vec![0.0, 0.0, 0.0, 0.0, 0.0], Red),
            (vec![0.0, 0.0, 1.0, 0.0, 0.0], Blue),
        ])
        .unwrap();
        assert_eq!(initial_witness(&two), Some((0, 1)));
    }

    #[test]
    fn initial_witness_achieves_pair_minimum() {
        let params = oracle::InstanceParams { n: 10, d: 3, max_value: 4, red_fraction: 0.4 };
        for seed in 0..20u64 {
            let ds: DataSet<f64> = oracle::random_instance(seed, &params);
            let (w, partner) = initial_witness(&ds).unwrap();
            let got = ds.separating_cut_count(w, partner);
            let mut best = usize::MAX;
            for i in 0..ds.n() {
                for j in i + 1..ds.n() {
                    if ds.label(i) != ds.label(j) {
                        best = best.min(ds.separating_cut_count(i, j));
                    }
                }
            }
            assert_eq!(got, best);
        }
    }

    #[test]
    fn greedy_tree_is_perfect_and_upper_bounds() {
        let separable = DataSet::new(vec![(vec![0.0], Red), (vec![1.0], Blue)]).unwrap();
        assert_eq!(greedy_upper_bound(&separable).size(), 1);

        let ds = fig_dataset();
        let tree = greedy_upper_bound(&ds);
        assert!(tree.is_perfect_on(&ds));
        assert!(tree.size() >= 3);

        let params = oracle::InstanceParams { n: 12, d: 3, max_value: 3, red_fraction: 0.5 };
        for seed in 0..15u64 {
            let ds: DataSet<f64> = oracle::random_instance(seed, &params);
            let greedy = greedy_upper_bound(&ds);
            assert!(greedy.is_perfect_on(&ds));
            assert!(greedy.size() >= oracle::min_size_exact(&ds).unwrap());
        }
    }

    #[test]
    fn dirty_priority_picks_cheapest_and_keeps_stale_counts() {
        let ds = fig_dataset();
        let mut tree = WitnessTree::new_initial(&ds, 2, true);
        // d has one separating cut from witness c, a has three.
        assert_eq!(tree.cached_refinement_count(3), 1);
        tree.apply_refinement(Refinement { vertex: 0, cut: Cut { dim: 0, index: 1 }, example: 1 });
        // a moved to the new leaf: its count was refreshed to 4. d stayed
        // in its leaf: the cache still says 1 although the true count is 2.
        assert_eq!(tree.cached_refinement_count(0), 4);
        assert_eq!(tree.cached_refinement_count(3), 1);
        assert_eq!(tree.refinement_count(3), 2);
    }

    #[test]
    fn min_completion_on_fig_tree() {
        let ds = fig_dataset();
        let mut tree = WitnessTree::new_initial(&ds, 2, false);
        tree.apply_refinement(Refinement { vertex: 0, cut: Cut { dim: 0, index: 1 }, example: 1 });
        let size_before = tree.size();
        // One more cut separates a from b on the left of the root; two
        // more separate d from c and e on the right.
        assert_eq!(min_completion(&mut tree), 3);
        assert_eq!(tree.size(), size_before);
    }

    #[test]
    fn cache_populate_inserts_bounds() {
        // Nested infeasibility: an impure leaf with zero remaining budget
        // yields a stored bound of 1. Build a scenario by probing the
        // private path through a public solve with the cache enabled.
        let params = oracle::InstanceParams { n: 12, d: 3, max_value: 3, red_fraction: 0.5 };
        let mut found_insert = false;
        for seed in 0..20u64 {
            let ds: DataSet<f64> = oracle::random_instance(seed, &params);
            let config = SearchConfig { reduce: false, ..Default::default() };
            let result = solve_msdt(&ds, &config);
            assert_eq!(result.status, SolveStatus::Optimal);
            if result.stats.cache_inserts > 0 {
                found_insert = true;
            }
        }
        assert!(found_insert, "no instance exercised cache population");
    }
}
