//! Acceptance suite: one test per criterion, each printing a pass line.
//!
//! The random suite stays within the reference solver's guards
//! (n <= 14, d <= 4, <= 4 distinct values per dimension) so every solver
//! answer can be checked exactly.

mod common;

use std::time::{Duration, Instant};

use fixedbitset::FixedBitSet;
use msdt_core::bounds;
use msdt_core::dataset::{Cut, DataSet};
use msdt_core::oracle;
use msdt_core::reduce;
use msdt_core::search::{self, solve_msdt, SearchConfig, SolveStatus, Strategy};
use msdt_core::settrie::SetTrie;
use msdt_core::tree::PlainTree;
use msdt_core::witness::{Refinement, WitnessTree};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{fig_dataset, reduction_table, suite, A, B, C, D, E};

fn full_config() -> SearchConfig {
    SearchConfig::default()
}

#[test]
fn criterion_1_oracle_equivalence_on_200_instances() {
    let started = Instant::now();
    let instances = suite(200);
    for (seed, ds) in instances.iter().enumerate() {
        let expected = oracle::min_size_exact(ds).expect("instance within oracle guards");
        let result = solve_msdt(ds, &full_config());
        assert_eq!(result.status, SolveStatus::Optimal, "seed {seed}");
        assert_eq!(result.size, Some(expected), "seed {seed}");
    }
    let elapsed = started.elapsed();
    assert!(elapsed < Duration::from_secs(300), "suite took {elapsed:?}");
    println!("[PASS] criterion 1: solver equals oracle on 200 instances ({elapsed:?})");
}

#[test]
fn criterion_2_ablation_exactness_64_toggle_combinations() {
    let started = Instant::now();
    let instances = suite(50);
    for (seed, ds) in instances.iter().enumerate() {
        let expected = oracle::min_size_exact(ds).expect("within guards");
        for bits in 0u32..64 {
            let config = SearchConfig {
                imp_lb: bits & 1 != 0,
                pair_lb: bits & 2 != 0,
                threshold_constraints: bits & 4 != 0,
                dirty_constraints: bits & 8 != 0,
                cache: bits & 16 != 0,
                reduce: bits & 32 != 0,
                ..Default::default()
            };
            let result = solve_msdt(ds, &config);
            assert_eq!(result.status, SolveStatus::Optimal, "seed {seed} combo {bits:06b}");
            assert_eq!(result.size, Some(expected), "seed {seed} combo {bits:06b}");
        }
    }
    let elapsed = started.elapsed();
    assert!(elapsed < Duration::from_secs(900), "ablation took {elapsed:?}");
    println!("[PASS] criterion 2: 64 toggle combinations agree on 50 instances ({elapsed:?})");
}

#[test]
fn criterion_3_strategy_agreement() {
    let started = Instant::now();
    let instances = suite(200);
    for (seed, ds) in instances.iter().enumerate() {
        let mut sizes = Vec::new();
        for strategy in [Strategy::Ascending, Strategy::Descending, Strategy::Binary] {
            let config = SearchConfig { strategy, ..Default::default() };
            let result = solve_msdt(ds, &config);
            assert_eq!(result.status, SolveStatus::Optimal, "seed {seed} {strategy:?}");
            sizes.push(result.size.unwrap());
        }
        assert!(sizes.windows(2).all(|w| w[0] == w[1]), "seed {seed}: {sizes:?}");
    }
    let elapsed = started.elapsed();
    println!("[PASS] criterion 3: ascending/descending/binary agree on 200 instances ({elapsed:?})");
}

#[test]
fn criterion_4a_worked_bound_computations() {
    let ds = fig_dataset();
    let mut tree = WitnessTree::new_initial(&ds, C, false);
    tree.apply_refinement(Refinement { vertex: 0, cut: Cut { dim: 0, index: 1 }, example: B });

    // Improvement sets: {a} four times, {d} twice.
    let dirty = tree.dirty_set().clone();
    let mut imp_sets = Vec::new();
    for e in [A, D] {
        for r in tree.enumerate_refinements(e) {
            imp_sets.push(bounds::imp_set_of(&tree, r, &dirty).ones().collect::<Vec<_>>());
        }
    }
    assert_eq!(imp_sets.iter().filter(|s| **s == vec![A]).count(), 4);
    assert_eq!(imp_sets.iter().filter(|s| **s == vec![D]).count(), 2);
    assert_eq!(imp_sets.len(), 6);

    assert_eq!(bounds::imp_lower_bound(&tree), 2);

    let inst = bounds::pair_cover_instance(&tree).unwrap();
    let mut family = inst.family_as_pairs();
    for f in &mut family {
        for pair in f.iter_mut() {
            *pair = (pair.0.min(pair.1), pair.0.max(pair.1));
        }
        f.sort_unstable();
    }
    family.sort();
    assert_eq!(family, vec![vec![(A, B)], vec![(C, D)], vec![(D, E)]]);
    let pair = bounds::pair_lower_bound_for_tree(&tree);
    assert_eq!(pair.bound, 3);
    assert!(!pair.used_fallback);

    println!("[PASS] criterion 4a: imp sets {{a}}x4 {{d}}x2, ImpLB = 2, PairLB = 3");
}

#[test]
fn criterion_4b_worked_reduction_examples() {
    let table = reduction_table();

    // Equivalent cuts: (d1,1) goes by rewriting b and c to 1 in d1.
    let eq = reduce::remove_equivalent_cuts(&table);
    assert_eq!(eq.value(1, 0), 1.0);
    assert_eq!(eq.value(2, 0), 1.0);
    let mut left_sides: Vec<Vec<usize>> =
        eq.cuts().map(|c| eq.left_mask(c).ones().collect()).collect();
    let total = left_sides.len();
    left_sides.dedup();
    assert_eq!(left_sides.len(), total, "left sides pairwise distinct");

    // Dimension merge: d2 and d3 fuse with values b:0, a:1, d:2, c:3.
    let merged = reduce::merge_dimensions(&table);
    assert_eq!(merged.num_dims(), 2);
    let values: Vec<f64> = (0..4).map(|e| merged.value(e, 1)).collect();
    assert_eq!(values, vec![1.0, 0.0, 3.0, 2.0]); // a, b, c, d

    println!("[PASS] criterion 4b: equivalent-cuts rewrite and dimension merge match");
}

#[test]
fn criterion_4c_size_sorted_cover_count() {
    assert_eq!(bounds::size_cover_count(&[2, 2, 1], 4), 2);
    println!("[PASS] criterion 4c: sizes [2,2,1] over universe 4 need 2 sets");
}

#[test]
fn criterion_5_imp_lower_bound_soundness_on_sampled_nodes() {
    let started = Instant::now();
    let mut samples = 0usize;
    let mut violations = 0usize;
    'outer: for ds in suite(200) {
        let budget = oracle::min_size_exact(&ds).expect("within guards");
        let Some((witness, _)) = search::initial_witness(&ds) else { continue };
        let mut tree = WitnessTree::new_initial(&ds, witness, false);
        let mut per_instance = 0usize;
        let mut stack_done = false;
        sample_nodes(
            &mut tree,
            budget,
            &mut per_instance,
            &mut samples,
            &mut violations,
            &mut stack_done,
        );
        if samples >= 2000 {
            break 'outer;
        }
    }
    assert!(samples >= 2000, "only {samples} nodes sampled");
    assert_eq!(violations, 0, "{violations} of {samples} nodes violated the bound");
    let elapsed = started.elapsed();
    println!("[PASS] criterion 5: ImpLB sound on {samples} sampled search nodes ({elapsed:?})");
}

fn sample_nodes(
    tree: &mut WitnessTree<'_, f64>,
    budget: usize,
    per_instance: &mut usize,
    samples: &mut usize,
    violations: &mut usize,
    done: &mut bool,
) {
    if *done || *per_instance >= 15 || *samples >= 2000 {
        *done = true;
        return;
    }
    if tree.is_perfect() || tree.size() == budget {
        return;
    }
    let bound = bounds::imp_lower_bound(tree);
    let truth = search::min_completion(tree);
    *per_instance += 1;
    *samples += 1;
    if bound > truth {
        eprintln!("violation: bound {bound} > truth {truth}");
        *violations += 1;
    }
    let e = tree.dirty_set().ones().next().unwrap();
    for r in tree.enumerate_refinements(e) {
        tree.apply_refinement(r);
        sample_nodes(tree, budget, per_instance, samples, violations, done);
        tree.undo();
        if *done {
            return;
        }
    }
}

#[test]
fn criterion_6_pruning_directionality() {
    let started = Instant::now();
    let instances = suite(60);

    let nodes_with = |config: &SearchConfig, ds: &DataSet<f64>| -> f64 {
        let result = solve_msdt(ds, config);
        assert_eq!(result.status, SolveStatus::Optimal);
        result.stats.nodes as f64
    };
    let mean_ratio = |base: &SearchConfig, better: &SearchConfig| -> f64 {
        let mut total = 0.0;
        for ds in &instances {
            total += nodes_with(base, ds) / nodes_with(better, ds);
        }
        total / instances.len() as f64
    };

    let off = SearchConfig {
        reduce: false,
        imp_lb: false,
        pair_lb: false,
        threshold_constraints: false,
        dirty_constraints: false,
        cache: false,
        dirty_priority: false,
        ..Default::default()
    };

    // Dirty-example priority vs. picking the first dirty example.
    let priority = SearchConfig { dirty_priority: true, ..off.clone() };
    let priority_gain = mean_ratio(&off, &priority);
    assert!(priority_gain >= 2.0, "dirty priority gain {priority_gain:.2} < 2.0");

    // Improvement lower bound on top of priority + reduction + pair bound.
    let base = SearchConfig { dirty_priority: true, reduce: true, pair_lb: true, ..off.clone() };
    let with_implb = SearchConfig { imp_lb: true, ..base.clone() };
    let implb_gain = mean_ratio(&base, &with_implb);
    assert!(implb_gain >= 2.0, "ImpLB gain {implb_gain:.2} < 2.0");

    // Both subset constraint families on top of the bounds.
    let with_constraints = SearchConfig {
        threshold_constraints: true,
        dirty_constraints: true,
        ..with_implb.clone()
    };
    let constraint_gain = mean_ratio(&with_implb, &with_constraints);
    assert!(constraint_gain >= 1.5, "subset constraint gain {constraint_gain:.2} < 1.5");

    let elapsed = started.elapsed();
    assert!(elapsed < Duration::from_secs(1200), "directionality took {elapsed:?}");
    println!(
        "[PASS] criterion 6: mean node reductions: dirty priority {priority_gain:.1}x, \
         ImpLB {implb_gain:.1}x, subset constraints {constraint_gain:.1}x ({elapsed:?})"
    );
}

#[test]
fn criterion_7_set_trie_fuzz_against_naive_scan() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x7e57);
    let universe = 40;
    let mut trie = SetTrie::new();
    let mut stored: Vec<(Vec<usize>, usize)> = Vec::new();
    let mut checked = 0usize;

    for _ in 0..10_000 {
        if rng.random_bool(0.5) {
            let len = rng.random_range(1..8);
            let mut ids: Vec<usize> =
                (0..len).map(|_| rng.random_range(0..universe)).collect();
            ids.sort_unstable();
            ids.dedup();
            let bound = rng.random_range(1..12);
            let mut set = FixedBitSet::with_capacity(universe);
            for &i in &ids {
                set.insert(i);
            }
            trie.insert(&set, bound);
            match stored.iter_mut().find(|(s, _)| *s == ids) {
                Some((_, b)) => *b = (*b).max(bound),
                None => stored.push((ids, bound)),
            }
        } else {
            let len = rng.random_range(1..12);
            let mut query = FixedBitSet::with_capacity(universe);
            for _ in 0..len {
                query.insert(rng.random_range(0..universe));
            }
            let budget = rng.random_range(0..14);
            let naive = stored
                .iter()
                .filter(|(s, _)| s.iter().all(|&i| query.contains(i)))
                .map(|&(_, b)| b)
                .max();
            let got = trie.max_subset_bound(&query, budget);
            match (naive, got) {
                (None, None) => {}
                (Some(exp), Some(got)) if got > budget => assert!(exp >= got),
                (Some(exp), Some(got)) => assert_eq!(exp, got),
                (exp, got) => panic!("naive {exp:?} vs trie {got:?}"),
            }
            checked += 1;
        }
    }
    assert!(checked > 4000);
    println!("[PASS] criterion 7: set-trie matches naive subset scan over 10000 operations");
}

#[test]
fn criterion_8_reduction_preserves_optimum() {
    let started = Instant::now();
    for (seed, ds) in suite(200).iter().enumerate() {
        let reduced = reduce::reduce_all(ds);
        assert!(reduced.n() <= ds.n(), "seed {seed}");
        assert!(reduced.num_dims() <= ds.num_dims(), "seed {seed}");
        assert!(reduced.cut_count() <= ds.cut_count(), "seed {seed}");
        let before = oracle::min_size_exact(ds).expect("within guards");
        let after = oracle::min_size_exact(&reduced).expect("reduced instance is smaller");
        assert_eq!(before, after, "seed {seed}");
    }
    let elapsed = started.elapsed();
    println!("[PASS] criterion 8: reduction preserves the optimum on 200 instances ({elapsed:?})");
}

#[test]
fn criterion_9_returned_trees_classify_perfectly_after_round_trip() {
    let started = Instant::now();
    for (seed, ds) in suite(200).iter().enumerate() {
        let result = solve_msdt(ds, &full_config());
        let tree = result.tree.expect("optimal tree");
        let reloaded = PlainTree::<f64>::from_json(&tree.to_json()).expect("round trip");
        assert_eq!(reloaded.size(), result.size.unwrap(), "seed {seed}");
        assert!(
            reloaded.is_perfect_on(&result.dataset),
            "seed {seed}: reloaded tree misclassifies"
        );
        assert_eq!(reloaded.accuracy_on(&result.dataset), 1.0, "seed {seed}");
    }
    let elapsed = started.elapsed();
    println!("[PASS] criterion 9: every returned tree classifies 100% after JSON round trip ({elapsed:?})");
}
