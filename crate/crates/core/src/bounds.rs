//! Lower bounds that prune the search.
//!
//! Both bounds build a set-cover instance whose optimum bounds the number
//! of refinements a witness tree still needs. The improvement bound covers
//! the dirty examples with per-refinement improvement sets and is cheap
//! enough to run at every search node; the pair bound covers the
//! co-located opposite-class pairs with per-cut split sets and is solved
//! once per instance through the LP relaxation.

use std::collections::hash_map::Entry;
use std::collections::{BinaryHeap, HashMap};
use std::cmp::Reverse;

use crate::dataset::{ClassLabel, Cut, DataSet};
use crate::lp::{self, LpOutcome};
use crate::value::Value;
use crate::witness::{Refinement, WitnessTree};
use crate::ExampleSet;

/// Smallest number of the largest `sizes` whose sum reaches `universe`.
/// This is the sorted-sizes relaxation of set cover: any cover with `k`
/// sets has total size at least `universe`, so no cover can use fewer.
pub fn size_cover_count(sizes: &[usize], universe: usize) -> usize {
    let mut sorted = sizes.to_vec();
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    let mut sum = 0;
    for (i, &s) in sorted.iter().enumerate() {
        sum += s;
        if sum >= universe {
            return i + 1;
        }
    }
    sorted.len()
}

/// Dirty members of `dirty_subset` that the refinement would classify
/// correctly: the ones routed to the new leaf whose label matches.
pub fn imp_set_of<V: Value>(
    tree: &WitnessTree<'_, V>,
    r: Refinement,
    dirty_subset: &ExampleSet,
) -> ExampleSet {
    let ds = tree.dataset();
    let mut set = tree.examples_at(r.vertex).clone();
    if ds.on_left(r.example, r.cut) {
        set.intersect_with(ds.left_mask(r.cut));
    } else {
        set.difference_with(ds.left_mask(r.cut));
    }
    set.intersect_with(dirty_subset);
    set.intersect_with(&ds.class_set(ds.label(r.example)));
    set
}

#[derive(Default)]
struct SizeQueue {
    heap: BinaryHeap<Reverse<usize>>,
    sum: usize,
}

impl SizeQueue {
    fn push(&mut self, size: usize) {
        self.heap.push(Reverse(size));
        self.sum += size;
    }

    fn absorb(&mut self, other: SizeQueue) {
        self.sum += other.sum;
        self.heap.extend(other.heap);
    }

    /// Keeps only the largest sizes still summing to at least `limit`.
    fn cap(&mut self, limit: usize) {
        while let Some(&Reverse(min)) = self.heap.peek() {
            if self.sum - min >= limit {
                self.heap.pop();
                self.sum -= min;
            } else {
                break;
            }
        }
    }

    fn len(&self) -> usize {
        self.heap.len()
    }
}

/// Per-node improvement lower bound: the minimum number of refinements
/// still needed to clean every dirty example, computed bottom-up with two
/// reductions. A refinement applicable at the parent with the same cut is
/// skipped (its improvement set dominates the child's), and each vertex
/// keeps only the largest set sizes that sum to its subtree's dirty count.
pub fn imp_lower_bound<V: Value>(tree: &WitnessTree<'_, V>) -> usize {
    imp_lower_bound_impl(tree, true, true)
}

/// Variant with the two reductions toggleable, used to check that the
/// size cap never changes the bound and the parent filter only drops
/// dominated sets.
pub fn imp_lower_bound_with<V: Value>(
    tree: &WitnessTree<'_, V>,
    parent_filter: bool,
    size_cap: bool,
) -> usize {
    imp_lower_bound_impl(tree, parent_filter, size_cap)
}

fn imp_lower_bound_impl<V: Value>(
    tree: &WitnessTree<'_, V>,
    parent_filter: bool,
    size_cap: bool,
) -> usize {
    let ds = tree.dataset();
    let dirty = tree.dirty_set();
    let mut dirty_red = dirty.clone();
    dirty_red.intersect_with(ds.red_set());
    let mut dirty_blue = dirty.clone();
    dirty_blue.difference_with(ds.red_set());

    // Witness lists per vertex, for admissibility checks here and at the
    // parent (improvement 1).
    let mut wits: HashMap<usize, Vec<usize>> = HashMap::new();
    for v in tree.subtree(tree.root()) {
        wits.insert(v, tree.subtree_witnesses(v));
    }

    let queue = imp_recurse(
        tree,
        tree.root(),
        &wits,
        &dirty_red,
        &dirty_blue,
        parent_filter,
        size_cap,
    );
    queue.len()
}

fn imp_recurse<V: Value>(
    tree: &WitnessTree<'_, V>,
    v: usize,
    wits: &HashMap<usize, Vec<usize>>,
    dirty_red: &ExampleSet,
    dirty_blue: &ExampleSet,
    parent_filter: bool,
    size_cap: bool,
) -> SizeQueue {
    let ds = tree.dataset();
    let mut queue = SizeQueue::default();
    if let Some((l, r)) = tree.children(v) {
        queue.absorb(imp_recurse(tree, l, wits, dirty_red, dirty_blue, parent_filter, size_cap));
        queue.absorb(imp_recurse(tree, r, wits, dirty_red, dirty_blue, parent_filter, size_cap));
    }

    let parent = tree.parent(v);
    let here = tree.examples_at(v);
    let mut dirty_red_here = dirty_red.clone();
    dirty_red_here.intersect_with(here);
    let mut dirty_blue_here = dirty_blue.clone();
    dirty_blue_here.intersect_with(here);
    let dirty_count = dirty_red_here.count_ones(..) + dirty_blue_here.count_ones(..);

    let safe = |list: &[usize], cut: Cut, e_left: bool| {
        list.iter().all(|&w| ds.on_left(w, cut) != e_left)
    };

    for e in dirty_red_here.ones().chain(dirty_blue_here.ones()) {
        let wit = tree.witness(tree.leaf_of(e));
        let class = ds.label(e);
        let same_class_dirty = if class == ClassLabel::Red { &dirty_red_here } else { &dirty_blue_here };
        for dim in 0..ds.num_dims() {
            let pe = ds.position(dim, e);
            let pw = ds.position(dim, wit);
            if pe == pw {
                continue;
            }
            let (lo, hi, e_left) = if pe < pw { (pe, pw, true) } else { (pw, pe, false) };
            for index in lo..hi {
                let cut = Cut { dim, index };
                if !safe(&wits[&v], cut, e_left) {
                    continue;
                }
                if parent_filter {
                    if let Some(p) = parent {
                        if safe(&wits[&p], cut, e_left) {
                            continue; // dominated by the same refinement at the parent
                        }
                    }
                }
                let mask = ds.left_mask(cut);
                let size = if e_left {
                    same_class_dirty.intersection_count(mask)
                } else {
                    same_class_dirty.count_ones(..) - same_class_dirty.intersection_count(mask)
                };
                queue.push(size);
            }
        }
    }

    if size_cap {
        queue.cap(dirty_count);
    } else if tree.parent(v).is_none() {
        // The root cap is what turns the multiset into the bound.
        queue.cap(dirty_count);
    }
    queue
}

/// Deduplicated set-cover instance over the co-located opposite-class
/// pairs: rows are distinct pair classes (pairs covered by exactly the
/// same cuts collapse), sets are the distinct per-cut split families.
#[derive(Clone, Debug)]
pub struct PairCoverInstance {
    /// Representative `(red, blue)` example ids per pair class.
    pub pairs: Vec<(usize, usize)>,
    /// Collapsed pair multiplicity per class.
    pub weights: Vec<usize>,
    /// Distinct nonempty split sets as sorted pair-class index lists.
    pub sets: Vec<Vec<usize>>,
}

impl PairCoverInstance {
    pub fn total_pairs(&self) -> usize {
        self.weights.iter().sum()
    }

    /// Split sets expanded back to example-id pairs, for inspection.
    pub fn family_as_pairs(&self) -> Vec<Vec<(usize, usize)>> {
        self.sets
            .iter()
            .map(|s| s.iter().map(|&i| self.pairs[i]).collect())
            .collect()
    }
}

/// Builds the pair set-cover instance for the current tree. Every possible
/// refinement is dominated by one applied at the root with the same cut,
/// so there is exactly one candidate set per cut: the pairs it separates.
/// Returns `None` when the pair count is too large to enumerate.
pub fn pair_cover_instance<V: Value>(tree: &WitnessTree<'_, V>) -> Option<PairCoverInstance> {
    let ds = tree.dataset();
    let leaves = tree.leaves();

    let mut total: usize = 0;
    for &leaf in &leaves {
        let members = tree.examples_at(leaf);
        let reds = members.intersection_count(ds.red_set());
        let blues = members.count_ones(..) - reds;
        total += reds * blues;
    }
    if total > 2_000_000 {
        return None;
    }

    let mut classes: HashMap<Vec<(usize, usize)>, usize> = HashMap::new();
    let mut pairs = Vec::new();
    let mut weights = Vec::new();
    for &leaf in &leaves {
        let members = tree.examples_at(leaf);
        let mut reds = members.clone();
        reds.intersect_with(ds.red_set());
        let mut blues = members.clone();
        blues.difference_with(ds.red_set());
        for red in reds.ones() {
            for blue in blues.ones() {
                let signature: Vec<(usize, usize)> = (0..ds.num_dims())
                    .map(|dim| {
                        let a = ds.position(dim, red);
                        let b = ds.position(dim, blue);
                        (a.min(b), a.max(b))
                    })
                    .collect();
                match classes.entry(signature) {
                    Entry::Occupied(slot) => weights[*slot.get()] += 1,
                    Entry::Vacant(slot) => {
                        slot.insert(pairs.len());
                        pairs.push((red, blue));
                        weights.push(1);
                    }
                }
            }
        }
    }

    let mut signatures: Vec<(Vec<(usize, usize)>, usize)> =
        classes.into_iter().map(|(sig, idx)| (sig, idx)).collect();
    signatures.sort_by_key(|&(_, idx)| idx);

    let mut seen: HashMap<Vec<usize>, ()> = HashMap::new();
    let mut sets = Vec::new();
    for cut in ds.cuts() {
        let covered: Vec<usize> = signatures
            .iter()
            .filter_map(|(sig, idx)| {
                let (lo, hi) = sig[cut.dim];
                (lo <= cut.index && cut.index < hi).then_some(*idx)
            })
            .collect();
        if covered.is_empty() {
            continue;
        }
        if let Entry::Vacant(slot) = seen.entry(covered.clone()) {
            slot.insert(());
            sets.push(covered);
        }
    }

    Some(PairCoverInstance { pairs, weights, sets })
}

#[derive(Clone, Copy, Debug)]
pub struct PairBound {
    pub bound: usize,
    /// LP relaxation value when the LP route ran.
    pub lp_value: Option<f64>,
    /// Number of distinct split sets in the cover instance.
    pub family_size: usize,
    /// True when the LP was unavailable and the counting bound was used.
    pub used_fallback: bool,
}

/// Pluggable lower bound for the pair cover instance.
pub trait CoverLowerBound {
    /// Returns a valid lower bound value and whether it is the exact LP
    /// relaxation optimum.
    fn bound(&self, inst: &PairCoverInstance) -> (f64, bool);
}

/// LP relaxation via the packing dual.
pub struct SimplexCoverBound;

impl CoverLowerBound for SimplexCoverBound {
    fn bound(&self, inst: &PairCoverInstance) -> (f64, bool) {
        // Rows and columns swap roles: the dual has one constraint per set.
        match lp::solve_packing_lp(&inst.sets, inst.pairs.len()) {
            Some(LpOutcome { value, optimal }) => (value, optimal),
            None => (GreedyCoverBound.bound(inst).0, false),
        }
    }
}

/// Counting bound `|pairs| / max set size`; weaker than the LP but free.
pub struct GreedyCoverBound;

impl CoverLowerBound for GreedyCoverBound {
    fn bound(&self, inst: &PairCoverInstance) -> (f64, bool) {
        let total = inst.total_pairs();
        let max_size = inst
            .sets
            .iter()
            .map(|s| s.iter().map(|&i| inst.weights[i]).sum::<usize>())
            .max()
            .unwrap_or(0);
        if max_size == 0 {
            return (0.0, false);
        }
        (total as f64 / max_size as f64, false)
    }
}

/// Pair lower bound for a whole data set: built on the single-leaf tree,
/// where every opposite-class pair shares the root leaf. This is the
/// initial lower bound on the minimum tree size.
pub fn pair_lower_bound<V: Value>(ds: &DataSet<V>) -> PairBound {
    let reds = ds.red_set().count_ones(..);
    if reds == 0 || reds == ds.n() {
        return PairBound { bound: 0, lp_value: None, family_size: 0, used_fallback: false };
    }
    let tree = WitnessTree::new_initial(ds, 0, false);
    pair_lower_bound_for_tree(&tree)
}

/// Pair lower bound for an arbitrary witness tree state.
pub fn pair_lower_bound_for_tree<V: Value>(tree: &WitnessTree<'_, V>) -> PairBound {
    match pair_cover_instance(tree) {
        Some(inst) => {
            if inst.pairs.is_empty() {
                return PairBound {
                    bound: 0,
                    lp_value: None,
                    family_size: 0,
                    used_fallback: false,
                };
            }
            let (value, _optimal) = SimplexCoverBound.bound(&inst);
            let bound = ceil_guarded(value).max(1);
            PairBound {
                bound,
                lp_value: Some(value),
                family_size: inst.sets.len(),
                used_fallback: false,
            }
        }
        None => PairBound {
            bound: counting_pair_bound(tree),
            lp_value: None,
            family_size: 0,
            used_fallback: true,
        },
    }
}

/// `ceil` with a small absolute guard against floating-point LP noise.
fn ceil_guarded(value: f64) -> usize {
    (value - 1e-6).ceil().max(0.0) as usize
}

/// Enumeration-free fallback: total pairs over the best single cut's
/// split count, computed from per-leaf class/side popcounts.
fn counting_pair_bound<V: Value>(tree: &WitnessTree<'_, V>) -> usize {
    let ds = tree.dataset();
    let leaves = tree.leaves();
    let mut total: usize = 0;
    let mut per_leaf = Vec::new();
    for &leaf in &leaves {
        let members = tree.examples_at(leaf);
        let mut reds = members.clone();
        reds.intersect_with(ds.red_set());
        let mut blues = members.clone();
        blues.difference_with(ds.red_set());
        total += reds.count_ones(..) * blues.count_ones(..);
        per_leaf.push((reds, blues));
    }
    if total == 0 {
        return 0;
    }
    let mut best_split = 0usize;
    for cut in ds.cuts() {
        let mask = ds.left_mask(cut);
        let mut split = 0usize;
        for (reds, blues) in &per_leaf {
            let rl = reds.intersection_count(mask);
            let rr = reds.count_ones(..) - rl;
            let bl = blues.intersection_count(mask);
            let br = blues.count_ones(..) - bl;
            split += rl * br + bl * rr;
        }
        best_split = best_split.max(split);
    }
    if best_split == 0 {
        return 1;
    }
    total.div_ceil(best_split)
}
