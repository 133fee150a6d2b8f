//! Symmetry-breaking subset constraints.
//!
//! A constraint attaches an example set `C` to a tree vertex `v` and is
//! violated once no member of `C` remains assigned to `v`'s subtree. The
//! search prunes a branch the moment any constraint is violated: a perfect
//! completion would then be reachable through an earlier-ordered branch of
//! the same size, so nothing optimal is lost.
//!
//! The store is a stack so that constraint lifetimes follow the search's
//! apply/undo discipline. Live membership counts are adjusted from the
//! per-vertex example deltas the witness tree produces anyway.

use crate::dataset::Cut;
use crate::value::Value;
use crate::witness::{Refinement, WitnessTree};
use crate::ExampleSet;

/// Threshold constraint members for a just-applied refinement `r`, given
/// an `earlier` threshold index that was tried before `r.cut.index` for
/// the same vertex and dimension: the examples of the new inner vertex's
/// region lying strictly between the two thresholds on the new leaf's
/// side. If they all leave that subtree later, the earlier threshold
/// would have produced the same partition, and that branch was already
/// searched.
pub fn threshold_constraint_members<V: Value>(
    tree: &WitnessTree<'_, V>,
    r: Refinement,
    earlier: usize,
) -> ExampleSet {
    let ds = tree.dataset();
    let new_inner = tree
        .parent(tree.leaf_of(r.example))
        .expect("refinement was applied, new leaf has a parent");
    let region = tree.examples_at(new_inner);
    let e_left = ds.on_left(r.example, r.cut);
    let (inner_k, outer_k) = if e_left { (earlier, r.cut.index) } else { (r.cut.index, earlier) };
    let mut members = region.clone();
    members.intersect_with(ds.left_mask(Cut { dim: r.cut.dim, index: outer_k }));
    members.difference_with(ds.left_mask(Cut { dim: r.cut.dim, index: inner_k }));
    members
}

/// Dirty constraint members for a refinement `r` about to be applied at an
/// inner vertex: when the same refinement is admissible at the child on
/// the dirty example's path, returns the dirty examples of the other
/// child's subtree. Applying at `r.vertex` is only useful while one of
/// them stays under the new inner vertex; otherwise the lower placement,
/// searched earlier, reaches an equally small tree. Returns `None` when
/// the rule does not apply (leaf vertex, or the lower refinement is
/// inadmissible).
pub fn dirty_constraint_members<V: Value>(
    tree: &WitnessTree<'_, V>,
    r: Refinement,
) -> Option<ExampleSet> {
    let (left, right) = tree.children(r.vertex)?;
    let (v1, v2) = if tree.examples_at(left).contains(r.example) {
        (left, right)
    } else {
        (right, left)
    };
    let down = Refinement { vertex: v1, ..r };
    if !tree.is_admissible(down) {
        return None;
    }
    let mut members = tree.examples_at(v2).clone();
    members.intersect_with(tree.dirty_set());
    Some(members)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConstraintKind {
    /// Replacing the owner's threshold by the recorded earlier-tried
    /// threshold index would move no example once violated.
    Threshold { constraint_threshold: usize },
    /// The refinement could have been applied one vertex lower; the
    /// members are the dirty examples of the sibling subtree.
    Dirty,
}

#[derive(Clone, Debug)]
pub struct SubsetConstraint {
    pub owner: usize,
    pub members: ExampleSet,
    pub live: usize,
    pub kind: ConstraintKind,
}

#[derive(Clone, Debug, Default)]
pub struct ConstraintStore {
    all: Vec<SubsetConstraint>,
    by_vertex: Vec<Vec<usize>>,
    violated: usize,
}

impl ConstraintStore {
    pub fn new() -> Self {
        Self::default()
    }

    /// Must cover every vertex id the tree may hand to the update hooks.
    pub fn ensure_vertices(&mut self, count: usize) {
        if self.by_vertex.len() < count {
            self.by_vertex.resize_with(count, Vec::new);
        }
    }

    pub fn len(&self) -> usize {
        self.all.len()
    }

    pub fn is_empty(&self) -> bool {
        self.all.is_empty()
    }

    pub fn mark(&self) -> usize {
        self.all.len()
    }

    pub fn get(&self, idx: usize) -> &SubsetConstraint {
        &self.all[idx]
    }

    pub fn iter(&self) -> impl Iterator<Item = &SubsetConstraint> {
        self.all.iter()
    }

    /// Pushes a constraint whose members are all currently assigned to the
    /// owner's subtree. Returns true when it is violated from birth.
    pub fn push(&mut self, owner: usize, members: ExampleSet, kind: ConstraintKind) -> bool {
        self.ensure_vertices(owner + 1);
        let live = members.count_ones(..);
        let born_violated = live == 0;
        if born_violated {
            self.violated += 1;
        }
        let idx = self.all.len();
        self.all.push(SubsetConstraint { owner, members, live, kind });
        self.by_vertex[owner].push(idx);
        born_violated
    }

    /// Drops every constraint pushed after `mark`.
    pub fn truncate(&mut self, mark: usize) {
        while self.all.len() > mark {
            let c = self.all.pop().unwrap();
            if c.live == 0 {
                self.violated -= 1;
            }
            let slot = &mut self.by_vertex[c.owner];
            debug_assert_eq!(slot.last().copied(), Some(self.all.len()));
            slot.pop();
        }
    }

    pub fn any_violated(&self) -> bool {
        self.violated > 0
    }

    /// Called when `removed` examples leave the subtree of `vertex`.
    /// Returns true if any constraint on that vertex just became violated.
    pub fn on_examples_removed(&mut self, vertex: usize, removed: &ExampleSet) -> bool {
        if vertex >= self.by_vertex.len() {
            return false;
        }
        let mut hit = false;
        for &idx in &self.by_vertex[vertex] {
            let c = &mut self.all[idx];
            let delta = c.members.intersection_count(removed);
            if delta == 0 {
                continue;
            }
            debug_assert!(c.live >= delta);
            c.live -= delta;
            if c.live == 0 {
                self.violated += 1;
                hit = true;
            }
        }
        hit
    }

    /// Reverse of [`Self::on_examples_removed`], used while backtracking.
    pub fn on_examples_restored(&mut self, vertex: usize, restored: &ExampleSet) {
        if vertex >= self.by_vertex.len() {
            return;
        }
        for &idx in &self.by_vertex[vertex] {
            let c = &mut self.all[idx];
            let delta = c.members.intersection_count(restored);
            if delta == 0 {
                continue;
            }
            if c.live == 0 {
                self.violated -= 1;
            }
            c.live += delta;
        }
    }

    /// Current live counters, mostly for tests that recount from scratch.
    pub fn live_counts(&self) -> Vec<usize> {
        self.all.iter().map(|c| c.live).collect()
    }
}
