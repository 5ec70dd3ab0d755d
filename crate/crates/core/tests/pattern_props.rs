use std::collections::BTreeSet;

use bimod_core::pattern::{
    compose_patterns, decompose_rectangles, has_three_of_four, is_tro_closed, three_of_four_violation, tro_closure,
    PatternError, PatternSet,
};
use proptest::prelude::*;

fn pattern_strategy(max_rows: usize, max_cols: usize, density: f64) -> impl Strategy<Value = PatternSet> {
    (1..=max_rows, 1..=max_cols).prop_flat_map(move |(m, n)| {
        proptest::collection::vec(proptest::bool::weighted(density), m * n).prop_map(move |bits| {
            let cells = bits.iter().enumerate().filter(|(_, &b)| b).map(|(k, _)| (k / n, k % n));
            PatternSet::from_cells(m, n, cells).unwrap()
        })
    })
}

fn naive_three_of_four(e: &PatternSet) -> bool {
    for i1 in 0..e.rows() {
        for i2 in i1 + 1..e.rows() {
            for j1 in 0..e.cols() {
                for j2 in j1 + 1..e.cols() {
                    let count = [(i1, j1), (i1, j2), (i2, j1), (i2, j2)]
                        .iter()
                        .filter(|&&(i, j)| e.contains(i, j))
                        .count();
                    if count == 3 {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// Connected components of the bipartite row/column graph, as cell sets.
fn union_find_components(e: &PatternSet) -> BTreeSet<BTreeSet<(usize, usize)>> {
    let (m, n) = (e.rows(), e.cols());
    let mut parent: Vec<usize> = (0..m + n).collect();
    fn find(parent: &mut [usize], x: usize) -> usize {
        let mut root = x;
        while parent[root] != root {
            root = parent[root];
        }
        parent[x] = root;
        root
    }
    for (i, j) in e.cells() {
        let (a, b) = (find(&mut parent, i), find(&mut parent, m + j));
        parent[a] = b;
    }
    let mut groups: std::collections::BTreeMap<usize, BTreeSet<(usize, usize)>> = Default::default();
    for (i, j) in e.cells() {
        let root = find(&mut parent, i);
        groups.entry(root).or_default().insert((i, j));
    }
    groups.into_values().collect()
}

/// Applies `(i,j), (k,j), (k,n) => (i,n)` until nothing changes.
fn naive_closure(e: &PatternSet) -> PatternSet {
    let mut cells: BTreeSet<(usize, usize)> = e.cells().collect();
    loop {
        let mut added = Vec::new();
        for &(i, j) in &cells {
            for &(k, j2) in &cells {
                if j2 != j {
                    continue;
                }
                for &(k2, n) in &cells {
                    if k2 == k && !cells.contains(&(i, n)) {
                        added.push((i, n));
                    }
                }
            }
        }
        if added.is_empty() {
            return PatternSet::from_cells(e.rows(), e.cols(), cells).unwrap();
        }
        cells.extend(added);
    }
}

#[test]
fn exhaustive_equivalence_up_to_4x4() {
    for m in 1..=4 {
        for n in 1..=4 {
            for bits in 0..1u64 << (m * n) {
                let e = PatternSet::from_bits(m, n, bits).unwrap();
                let fast = has_three_of_four(&e);
                assert_eq!(fast, naive_three_of_four(&e), "{e:?}");
                assert_eq!(fast, is_tro_closed(&e), "{e:?}");
                assert_eq!(fast, decompose_rectangles(&e).is_ok(), "{e:?}");
            }
        }
    }
}

#[test]
fn exhaustive_closure_matches_naive_up_to_3x3() {
    for m in 1..=3 {
        for n in 1..=3 {
            for bits in 0..1u64 << (m * n) {
                let e = PatternSet::from_bits(m, n, bits).unwrap();
                assert_eq!(tro_closure(&e), naive_closure(&e));
            }
        }
    }
}

#[test]
fn witness_names_a_three_cell_subgrid() {
    let e = PatternSet::from_cells(3, 3, [(0, 0), (0, 1), (1, 1), (2, 2)]).unwrap();
    let q = three_of_four_violation(&e).unwrap();
    assert!(q.i1 < q.i2 && q.j1 < q.j2);
    let count = [(q.i1, q.j1), (q.i1, q.j2), (q.i2, q.j1), (q.i2, q.j2)]
        .iter()
        .filter(|&&(i, j)| e.contains(i, j))
        .count();
    assert_eq!(count, 3);
    assert!(matches!(decompose_rectangles(&e), Err(PatternError::NotThreeOfFour(w)) if w == q));
}

#[test]
fn block_diagonal_example() {
    // Two rectangles {0,2}x{1,3} and {1}x{0}.
    let e = PatternSet::from_cells(3, 4, [(0, 1), (0, 3), (2, 1), (2, 3), (1, 0)]).unwrap();
    let p = decompose_rectangles(&e).unwrap();
    assert_eq!(p.blocks.len(), 2);
    assert_eq!(p.blocks[0].rows, vec![0, 2]);
    assert_eq!(p.blocks[0].cols, vec![1, 3]);
    assert_eq!(p.blocks[1].rows, vec![1]);
    assert_eq!(p.blocks[1].cols, vec![0]);
}

proptest! {
    #[test]
    fn fast_check_matches_brute_force(e in pattern_strategy(10, 10, 0.15)) {
        prop_assert_eq!(has_three_of_four(&e), naive_three_of_four(&e));
    }

    #[test]
    fn decomposition_round_trips_and_partitions(e in pattern_strategy(12, 12, 0.1)) {
        let closed = tro_closure(&e);
        let p = decompose_rectangles(&closed).unwrap();
        prop_assert_eq!(&p.reassemble().unwrap(), &closed);
        let mut seen_rows = BTreeSet::new();
        let mut seen_cols = BTreeSet::new();
        for b in &p.blocks {
            prop_assert!(!b.rows.is_empty() && !b.cols.is_empty());
            for &i in &b.rows {
                prop_assert!(seen_rows.insert(i));
            }
            for &j in &b.cols {
                prop_assert!(seen_cols.insert(j));
            }
        }
        let blocks: BTreeSet<BTreeSet<(usize, usize)>> = p
            .blocks
            .iter()
            .map(|b| b.rows.iter().flat_map(|&i| b.cols.iter().map(move |&j| (i, j))).collect())
            .collect();
        prop_assert_eq!(blocks, union_find_components(&closed));
    }

    #[test]
    fn closure_is_extensive_idempotent_and_monotone(
        e in pattern_strategy(9, 9, 0.12),
        extra in proptest::collection::vec((0usize..9, 0usize..9), 0..6),
    ) {
        let c = tro_closure(&e);
        prop_assert!(e.is_subset(&c));
        prop_assert_eq!(&tro_closure(&c), &c);
        prop_assert!(has_three_of_four(&c));
        let mut bigger = e.clone();
        for (i, j) in extra {
            if i < e.rows() && j < e.cols() {
                bigger.insert(i, j).unwrap();
            }
        }
        prop_assert!(c.is_subset(&tro_closure(&bigger)));
    }

    #[test]
    fn closure_commutes_with_transpose(e in pattern_strategy(8, 8, 0.15)) {
        prop_assert_eq!(tro_closure(&e.transpose()), tro_closure(&e).transpose());
    }

    #[test]
    fn three_of_four_patterns_are_fixed_by_f_ft_f(e in pattern_strategy(8, 8, 0.2)) {
        let fff = compose_patterns(&compose_patterns(&e, &e.transpose()).unwrap(), &e).unwrap();
        prop_assert!(e.is_subset(&fff));
        prop_assert_eq!(has_three_of_four(&e), fff == e);
    }

    #[test]
    fn bits_round_trip(m in 1usize..=8, n in 1usize..=8, raw in any::<u64>()) {
        let mask = if m * n == 64 { u64::MAX } else { (1u64 << (m * n)) - 1 };
        let e = PatternSet::from_bits(m, n, raw & mask).unwrap();
        prop_assert_eq!(e.to_bits(), Some(raw & mask));
        prop_assert_eq!(e.len(), (raw & mask).count_ones() as usize);
    }
}
