//! Set-trie index of lower bounds for example subsets.
//!
//! Sets are stored as strictly ascending id paths from the root; an end
//! marker on the last vertex carries the lower bound. The query walks only
//! children whose id occurs in the query set, so it visits exactly the
//! stored subsets of the query and can stop early once a bound exceeds
//! the caller's budget.

use crate::ExampleSet;

#[derive(Clone, Debug)]
struct TrieNode {
    element: usize,
    /// Child node indices, ordered by ascending element.
    children: Vec<usize>,
    bound: Option<usize>,
}

#[derive(Clone, Debug)]
pub struct SetTrie {
    /// `nodes[0]` is a synthetic root and not counted.
    nodes: Vec<TrieNode>,
    /// Inserts that would push the vertex count past the cap are dropped;
    /// the cache is an optimization, losing entries is always safe.
    max_vertices: usize,
}

impl Default for SetTrie {
    fn default() -> Self {
        Self::new()
    }
}

impl SetTrie {
    pub fn new() -> Self {
        Self::with_vertex_cap(usize::MAX)
    }

    pub fn with_vertex_cap(max_vertices: usize) -> Self {
        SetTrie {
            nodes: vec![TrieNode { element: usize::MAX, children: Vec::new(), bound: None }],
            max_vertices,
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.len() == 1
    }

    /// Stores `bound` for the example set; an existing entry keeps the
    /// maximum of the two bounds.
    pub fn insert(&mut self, set: &ExampleSet, bound: usize) {
        debug_assert!(bound >= 1, "stored bounds are at least 1");
        let ids: Vec<usize> = set.ones().collect();
        if ids.is_empty() {
            return;
        }
        if self.vertex_count() + ids.len() > self.max_vertices {
            return;
        }
        let mut node = 0usize;
        for &id in &ids {
            node = match self.find_child(node, id) {
                Ok(child) => child,
                Err(slot) => {
                    let new = self.nodes.len();
                    self.nodes.push(TrieNode { element: id, children: Vec::new(), bound: None });
                    self.nodes[node].children.insert(slot, new);
                    new
                }
            };
        }
        let entry = &mut self.nodes[node].bound;
        *entry = Some(entry.map_or(bound, |old| old.max(bound)));
    }

    fn find_child(&self, node: usize, element: usize) -> Result<usize, usize> {
        self.nodes[node]
            .children
            .binary_search_by_key(&element, |&c| self.nodes[c].element)
            .map(|slot| self.nodes[node].children[slot])
    }

    /// Largest bound stored for any subset of `query`, except that the
    /// walk returns immediately with the first bound exceeding `budget`.
    pub fn max_subset_bound(&self, query: &ExampleSet, budget: usize) -> Option<usize> {
        let max_id = query.ones().last()?;
        let mut best: Option<usize> = None;
        self.walk(0, query, max_id, budget, &mut best);
        best
    }

    fn walk(
        &self,
        node: usize,
        query: &ExampleSet,
        max_id: usize,
        budget: usize,
        best: &mut Option<usize>,
    ) -> bool {
        if let Some(bound) = self.nodes[node].bound {
            if best.map_or(true, |b| bound > b) {
                *best = Some(bound);
            }
            if bound > budget {
                return true;
            }
        }
        for &child in &self.nodes[node].children {
            let element = self.nodes[child].element;
            if element > max_id {
                break;
            }
            if query.contains(element) && self.walk(child, query, max_id, budget, best) {
                return true;
            }
        }
        false
    }

    /// One line per stored set: `id,id,...:bound`, sorted by path.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        let mut path = Vec::new();
        self.dump_from(0, &mut path, &mut out);
        out
    }

    fn dump_from(&self, node: usize, path: &mut Vec<usize>, out: &mut String) {
        if let Some(bound) = self.nodes[node].bound {
            let ids: Vec<String> = path.iter().map(usize::to_string).collect();
            out.push_str(&ids.join(","));
            out.push(':');
            out.push_str(&bound.to_string());
            out.push('\n');
        }
        for &child in &self.nodes[node].children {
            path.push(self.nodes[child].element);
            self.dump_from(child, path, out);
            path.pop();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use fixedbitset::FixedBitSet;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn set(n: usize, ids: &[usize]) -> FixedBitSet {
        let mut s = FixedBitSet::with_capacity(n);
        for &i in ids {
            s.insert(i);
        }
        s
    }

    #[test]
    fn insert_sorts_and_finds_exact_set() {
        let mut trie = SetTrie::new();
        trie.insert(&set(8, &[3, 1, 2]), 4);
        assert_eq!(trie.vertex_count(), 3);
        assert_eq!(trie.dump(), "1,2,3:4\n");
        assert_eq!(trie.max_subset_bound(&set(8, &[1, 2, 3]), 0), Some(4));
    }

    #[test]
    fn insert_keeps_maximum_bound() {
        let mut trie = SetTrie::new();
        trie.insert(&set(8, &[1, 2]), 4);
        trie.insert(&set(8, &[1, 2]), 2);
        assert_eq!(trie.max_subset_bound(&set(8, &[1, 2]), 0), Some(4));
        trie.insert(&set(8, &[1, 2]), 7);
        assert_eq!(trie.max_subset_bound(&set(8, &[1, 2]), 0), Some(7));
        assert_eq!(trie.vertex_count(), 2);
    }

    #[test]
    fn subset_query_examples() {
        let mut trie = SetTrie::new();
        trie.insert(&set(8, &[1, 2]), 4);
        // {1,2} is a subset of {1,2,3} and its bound beats the budget.
        assert_eq!(trie.max_subset_bound(&set(8, &[1, 2, 3]), 3), Some(4));

        let mut trie = SetTrie::new();
        trie.insert(&set(8, &[1, 4]), 4);
        assert_eq!(trie.max_subset_bound(&set(8, &[1, 2, 3]), 3), None);
    }

    #[test]
    fn empty_trie_and_counts() {
        let trie = SetTrie::new();
        assert_eq!(trie.vertex_count(), 0);
        assert_eq!(trie.max_subset_bound(&set(4, &[0, 1]), 0), None);

        let mut trie = SetTrie::new();
        trie.insert(&set(16, &[2, 5, 9, 11]), 1);
        assert_eq!(trie.vertex_count(), 4);
    }

    #[test]
    fn shared_prefixes_save_vertices() {
        let mut trie = SetTrie::new();
        trie.insert(&set(8, &[0, 1, 2]), 1);
        trie.insert(&set(8, &[0, 1, 3]), 2);
        trie.insert(&set(8, &[0, 1]), 3);
        assert_eq!(trie.vertex_count(), 4); // 0 -> 1 -> {2, 3}
        assert!(trie.vertex_count() < 3 + 3 + 2);
    }

    #[test]
    fn vertex_cap_drops_inserts() {
        let mut trie = SetTrie::with_vertex_cap(3);
        trie.insert(&set(8, &[0, 1, 2]), 5);
        assert_eq!(trie.vertex_count(), 3);
        trie.insert(&set(8, &[4, 5]), 9);
        assert_eq!(trie.vertex_count(), 3);
        assert_eq!(trie.max_subset_bound(&set(8, &[4, 5]), 0), None);
    }

    /// Naive reference: scan all stored sets, keep subsets of the query.
    struct Naive {
        sets: Vec<(Vec<usize>, usize)>,
    }

    impl Naive {
        fn insert(&mut self, ids: &[usize], bound: usize) {
            let mut sorted = ids.to_vec();
            sorted.sort_unstable();
            for (s, b) in &mut self.sets {
                if *s == sorted {
                    *b = (*b).max(bound);
                    return;
                }
            }
            self.sets.push((sorted, bound));
        }

        fn max_subset_bound(&self, query: &FixedBitSet) -> Option<usize> {
            self.sets
                .iter()
                .filter(|(s, _)| s.iter().all(|&i| query.contains(i)))
                .map(|&(_, b)| b)
                .max()
        }
    }

    #[test]
    fn fuzz_against_naive_scan() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let universe = 24;
        let mut trie = SetTrie::new();
        let mut naive = Naive { sets: Vec::new() };
        for _ in 0..500 {
            let len = rng.random_range(1..6);
            let ids: Vec<usize> = (0..len).map(|_| rng.random_range(0..universe)).collect();
            let bound = rng.random_range(1..10);
            trie.insert(&set(universe, &ids), bound);
            naive.insert(&ids, bound);
        }
        for _ in 0..500 {
            let len = rng.random_range(1..10);
            let ids: Vec<usize> = (0..len).map(|_| rng.random_range(0..universe)).collect();
            let q = set(universe, &ids);
            let budget = rng.random_range(0..12);
            let expected = naive.max_subset_bound(&q);
            let got = trie.max_subset_bound(&q, budget);
            match (expected, got) {
                (None, None) => {}
                (Some(exp), Some(got)) => {
                    if got > budget {
                        // Early exit: any stored subset bound above the
                        // budget is a correct answer.
                        assert!(exp >= got && got > budget);
                    } else {
                        assert_eq!(exp, got);
                    }
                }
                (exp, got) => panic!("mismatch: naive {exp:?} vs trie {got:?}"),
            }
        }
    }
}
