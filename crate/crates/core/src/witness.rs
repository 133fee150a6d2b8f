//! Witness trees: the mutable search state.
//!
//! A witness tree is a decision tree in which every leaf is anchored by a
//! correctly classified example, its witness. The search grows the tree by
//! one-step refinements: subdivide the edge above a vertex `v` with a new
//! inner vertex carrying a cut, and hang a new leaf for a currently dirty
//! example off the side of the cut that example falls on. Refinements that
//! would move any existing witness to a different leaf are inadmissible,
//! which is what shrinks the search space.
//!
//! Refinements are applied as undoable mutations; the trail records, per
//! affected vertex, exactly the example bits that left its subtree, so
//! backtracking restores assignments, dirty flags and constraint counters
//! without recomputation.

use fixedbitset::FixedBitSet;

use crate::constraints::ConstraintStore;
use crate::dataset::{ClassLabel, Cut, DataSet};
use crate::tree::{PlainCut, PlainTree};
use crate::value::Value;
use crate::ExampleSet;

/// One-step refinement: insert cut `cut` above `vertex` and a new leaf
/// witnessed by the dirty example `example`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Refinement {
    pub vertex: usize,
    pub cut: Cut,
    pub example: usize,
}

#[derive(Clone, Debug)]
enum Node {
    Inner { cut: Cut, left: usize, right: usize },
    Leaf { class: ClassLabel, witness: usize },
}

#[derive(Clone, Debug)]
struct Vertex {
    parent: Option<usize>,
    examples: ExampleSet,
    node: Node,
}

#[derive(Debug)]
struct Frame {
    refinement: Refinement,
    old_root: usize,
    new_inner: usize,
    /// Example bits that left each old vertex of the refined subtree.
    removed: Vec<(usize, ExampleSet)>,
    old_ref_counts: Vec<(usize, u64)>,
}

pub struct WitnessTree<'a, V = f64> {
    ds: &'a DataSet<V>,
    vertices: Vec<Vertex>,
    root: usize,
    leaf_of: Vec<usize>,
    dirty: ExampleSet,
    dirty_count: usize,
    size: usize,
    trail: Vec<Frame>,
    /// Cached number of admissible refinements per example, refreshed only
    /// when the example is assigned to a new leaf. Deliberately stale in
    /// between: recomputing on every tree change costs more than it saves.
    ref_counts: Vec<u64>,
    track_ref_counts: bool,
    pub constraints: ConstraintStore,
}

impl<'a, V: Value> WitnessTree<'a, V> {
    /// Single-leaf tree classified by `witness`'s label; every example is
    /// assigned to that leaf.
    pub fn new_initial(ds: &'a DataSet<V>, witness: usize, track_ref_counts: bool) -> Self {
        let n = ds.n();
        let mut all = FixedBitSet::with_capacity(n);
        all.insert_range(..);
        let class = ds.label(witness);
        let root_vertex = Vertex {
            parent: None,
            examples: all,
            node: Node::Leaf { class, witness },
        };
        let mut dirty = ds.class_set(class.opposite());
        dirty.grow(n);
        let dirty_count = dirty.count_ones(..);
        let mut tree = WitnessTree {
            ds,
            vertices: vec![root_vertex],
            root: 0,
            leaf_of: vec![0; n],
            dirty,
            dirty_count,
            size: 0,
            trail: Vec::new(),
            ref_counts: vec![0; n],
            track_ref_counts,
            constraints: ConstraintStore::new(),
        };
        tree.constraints.ensure_vertices(1);
        if track_ref_counts {
            let dirty_ids: Vec<usize> = tree.dirty.ones().collect();
            for e in dirty_ids {
                tree.ref_counts[e] = tree.refinement_count(e);
            }
        }
        tree
    }

    pub fn dataset(&self) -> &'a DataSet<V> {
        self.ds
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        self.vertices[v].parent
    }

    pub fn is_leaf(&self, v: usize) -> bool {
        matches!(self.vertices[v].node, Node::Leaf { .. })
    }

    /// `(left, right)` children of an inner vertex.
    pub fn children(&self, v: usize) -> Option<(usize, usize)> {
        match self.vertices[v].node {
            Node::Inner { left, right, .. } => Some((left, right)),
            Node::Leaf { .. } => None,
        }
    }

    pub fn cut_at(&self, v: usize) -> Option<Cut> {
        match self.vertices[v].node {
            Node::Inner { cut, .. } => Some(cut),
            Node::Leaf { .. } => None,
        }
    }

    pub fn leaf_class(&self, v: usize) -> ClassLabel {
        match self.vertices[v].node {
            Node::Leaf { class, .. } => class,
            Node::Inner { .. } => panic!("leaf_class on inner vertex"),
        }
    }

    pub fn witness(&self, v: usize) -> usize {
        match self.vertices[v].node {
            Node::Leaf { witness, .. } => witness,
            Node::Inner { .. } => panic!("witness on inner vertex"),
        }
    }

    /// Examples assigned to the subtree of `v`.
    pub fn examples_at(&self, v: usize) -> &ExampleSet {
        &self.vertices[v].examples
    }

    pub fn leaf_of(&self, e: usize) -> usize {
        self.leaf_of[e]
    }

    pub fn dirty_set(&self) -> &ExampleSet {
        &self.dirty
    }

    pub fn dirty_count(&self) -> usize {
        self.dirty_count
    }

    pub fn is_perfect(&self) -> bool {
        self.dirty_count == 0
    }

    pub fn is_dirty(&self, e: usize) -> bool {
        self.dirty.contains(e)
    }

    pub fn cached_refinement_count(&self, e: usize) -> u64 {
        self.ref_counts[e]
    }

    pub fn leaves(&self) -> Vec<usize> {
        self.subtree(self.root)
            .into_iter()
            .filter(|&v| self.is_leaf(v))
            .collect()
    }

    /// Vertices of the subtree rooted at `v`, preorder.
    pub fn subtree(&self, v: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack = vec![v];
        while let Some(w) = stack.pop() {
            out.push(w);
            if let Node::Inner { left, right, .. } = self.vertices[w].node {
                stack.push(right);
                stack.push(left);
            }
        }
        out
    }

    /// Witness examples of the leaves in the subtree of `v`.
    pub fn subtree_witnesses(&self, v: usize) -> Vec<usize> {
        self.subtree(v)
            .into_iter()
            .filter_map(|w| match self.vertices[w].node {
                Node::Leaf { witness, .. } => Some(witness),
                Node::Inner { .. } => None,
            })
            .collect()
    }

    /// Path from `leaf_of(e)` up to the root.
    pub fn path_to_root(&self, e: usize) -> Vec<usize> {
        let mut path = vec![self.leaf_of[e]];
        while let Some(p) = self.vertices[*path.last().unwrap()].parent {
            path.push(p);
        }
        path
    }

    fn witnesses_safe(&self, wits: &[usize], cut: Cut, e_left: bool) -> bool {
        wits.iter().all(|&w| self.ds.on_left(w, cut) != e_left)
    }

    /// True iff `r` is an admissible one-step refinement of the current
    /// tree: its example is dirty and assigned under `r.vertex`, the cut
    /// separates it from its leaf's witness, and no witness in the subtree
    /// of `r.vertex` would change leaves.
    pub fn is_admissible(&self, r: Refinement) -> bool {
        if !self.dirty.contains(r.example)
            || !self.vertices[r.vertex].examples.contains(r.example)
        {
            return false;
        }
        let wit = self.witness(self.leaf_of[r.example]);
        let pe = self.ds.position(r.cut.dim, r.example);
        let pw = self.ds.position(r.cut.dim, wit);
        let between = if pe < pw {
            pe <= r.cut.index && r.cut.index < pw
        } else {
            pw <= r.cut.index && r.cut.index < pe
        };
        if !between {
            return false;
        }
        let e_left = pe <= r.cut.index;
        self.witnesses_safe(&self.subtree_witnesses(r.vertex), r.cut, e_left)
    }

    /// Drives `f` over the admissible refinements of dirty example `e` in
    /// search order: vertices from `leaf(e)` to the root, then dimensions
    /// in which `e` and its leaf's witness differ in ascending index, then
    /// thresholds between the two, closest to `e` first.
    fn for_each_refinement<F: FnMut(Refinement)>(&self, e: usize, mut f: F) {
        debug_assert!(self.dirty.contains(e), "example {e} is not dirty");
        let wit = self.witness(self.leaf_of[e]);
        for v in self.path_to_root(e) {
            let wits = self.subtree_witnesses(v);
            for dim in 0..self.ds.num_dims() {
                let pe = self.ds.position(dim, e);
                let pw = self.ds.position(dim, wit);
                if pe == pw {
                    continue;
                }
                let mut emit = |index: usize, e_left: bool| {
                    let cut = Cut { dim, index };
                    if self.witnesses_safe(&wits, cut, e_left) {
                        f(Refinement { vertex: v, cut, example: e });
                    }
                };
                if pe < pw {
                    for index in pe..pw {
                        emit(index, true);
                    }
                } else {
                    for index in (pw..pe).rev() {
                        emit(index, false);
                    }
                }
            }
        }
    }

    pub fn enumerate_refinements(&self, e: usize) -> Vec<Refinement> {
        let mut out = Vec::new();
        self.for_each_refinement(e, |r| out.push(r));
        out
    }

    pub fn refinement_count(&self, e: usize) -> u64 {
        let mut count = 0;
        self.for_each_refinement(e, |_| count += 1);
        count
    }

    /// Applies `r`, extending the tree by one inner vertex and one leaf.
    /// Returns true if the reassignment violated any stored subset
    /// constraint. Undo with [`Self::undo`].
    pub fn apply_refinement(&mut self, r: Refinement) -> bool {
        debug_assert!(self.is_admissible(r), "refinement {r:?} not admissible");
        let v = r.vertex;
        let e_left = self.ds.on_left(r.example, r.cut);
        let leaf_class = self.ds.label(r.example);

        let mut moved = self.vertices[v].examples.clone();
        if e_left {
            moved.intersect_with(self.ds.left_mask(r.cut));
        } else {
            moved.difference_with(self.ds.left_mask(r.cut));
        }

        let new_inner = self.vertices.len();
        let new_leaf = new_inner + 1;
        let old_parent = self.vertices[v].parent;
        let (left, right) = if e_left { (new_leaf, v) } else { (v, new_leaf) };
        self.vertices.push(Vertex {
            parent: old_parent,
            examples: self.vertices[v].examples.clone(),
            node: Node::Inner { cut: r.cut, left, right },
        });
        self.vertices.push(Vertex {
            parent: Some(new_inner),
            examples: moved.clone(),
            node: Node::Leaf { class: leaf_class, witness: r.example },
        });
        self.vertices[v].parent = Some(new_inner);
        let old_root = self.root;
        match old_parent {
            None => self.root = new_inner,
            Some(p) => self.replace_child(p, v, new_inner),
        }
        self.constraints.ensure_vertices(self.vertices.len());

        // Pull the moved examples out of the old subtree of v.
        let mut removed = Vec::new();
        let mut violated = false;
        for w in self.subtree(v) {
            let mut rem = self.vertices[w].examples.clone();
            rem.intersect_with(&moved);
            if rem.is_clear() {
                continue;
            }
            self.vertices[w].examples.difference_with(&moved);
            violated |= self.constraints.on_examples_removed(w, &rem);
            removed.push((w, rem));
        }

        let moved_ids: Vec<usize> = moved.ones().collect();
        for &x in &moved_ids {
            self.leaf_of[x] = new_leaf;
            let now_dirty = self.ds.label(x) != leaf_class;
            if now_dirty != self.dirty.contains(x) {
                if now_dirty {
                    self.dirty.insert(x);
                    self.dirty_count += 1;
                } else {
                    self.dirty.remove(x);
                    self.dirty_count -= 1;
                }
            }
        }

        self.size += 1;

        let mut old_ref_counts = Vec::new();
        if self.track_ref_counts {
            for &x in &moved_ids {
                old_ref_counts.push((x, self.ref_counts[x]));
            }
            for &x in &moved_ids {
                if self.dirty.contains(x) {
                    self.ref_counts[x] = self.refinement_count(x);
                }
            }
        }

        self.trail.push(Frame { refinement: r, old_root, new_inner, removed, old_ref_counts });
        violated
    }

    fn replace_child(&mut self, parent: usize, old: usize, new: usize) {
        if let Node::Inner { left, right, .. } = &mut self.vertices[parent].node {
            if *left == old {
                *left = new;
            } else {
                debug_assert_eq!(*right, old);
                *right = new;
            }
        }
    }

    /// Reverts the most recent refinement. Constraints added after the
    /// apply must already have been dropped by the caller.
    pub fn undo(&mut self) {
        let frame = self.trail.pop().expect("undo without applied refinement");
        let v = frame.refinement.vertex;
        let new_inner = frame.new_inner;

        for (w, rem) in &frame.removed {
            self.constraints.on_examples_restored(*w, rem);
            self.vertices[*w].examples.union_with(rem);
            if let Node::Leaf { class, .. } = self.vertices[*w].node {
                for x in rem.ones() {
                    self.leaf_of[x] = *w;
                    let now_dirty = self.ds.label(x) != class;
                    if now_dirty != self.dirty.contains(x) {
                        if now_dirty {
                            self.dirty.insert(x);
                            self.dirty_count += 1;
                        } else {
                            self.dirty.remove(x);
                            self.dirty_count -= 1;
                        }
                    }
                }
            }
        }

        let up = self.vertices[new_inner].parent;
        self.vertices[v].parent = up;
        match up {
            None => self.root = frame.old_root,
            Some(p) => self.replace_child(p, new_inner, v),
        }
        self.vertices.truncate(new_inner);
        self.size -= 1;

        for (x, c) in frame.old_ref_counts {
            self.ref_counts[x] = c;
        }
    }

    pub fn depth_of_trail(&self) -> usize {
        self.trail.len()
    }

    /// Detached copy of the current decision tree.
    pub fn snapshot(&self) -> PlainTree<V> {
        self.snapshot_from(self.root)
    }

    fn snapshot_from(&self, v: usize) -> PlainTree<V> {
        match self.vertices[v].node {
            Node::Leaf { class, .. } => PlainTree::Leaf { class },
            Node::Inner { cut, left, right } => PlainTree::Inner {
                cut: PlainCut { dim: cut.dim, thr: self.ds.cut_value(cut) },
                left: Box::new(self.snapshot_from(left)),
                right: Box::new(self.snapshot_from(right)),
            },
        }
    }

    /// Recomputes `leaf(e)` by evaluating cuts from the root; used by tests
    /// to validate the incremental assignment.
    pub fn assignment_from_scratch(&self, e: usize) -> usize {
        let mut v = self.root;
        while let Node::Inner { cut, left, right } = self.vertices[v].node {
            v = if self.ds.on_left(e, cut) { left } else { right };
        }
        v
    }
}
