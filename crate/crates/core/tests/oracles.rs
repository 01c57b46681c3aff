//! Library results checked against brute-force oracles, plus frozen counts
//! those oracles produced.

mod common;

use std::collections::{BTreeMap, HashSet};

use common::*;
use mq_core::*;

// Frozen from the oracles below.
const ORDER2_COUNT: usize = 2;
const ORDER3_BINARY_COUNT: usize = 12;
const ORDER3_TERNARY_COUNT: usize = 24;
const ORDER4_BINARY_COUNT: usize = 576;
const ORDER4_Z4_ISOTOPES: usize = 432;
const ORDER4_V4_ISOTOPES: usize = 144;

fn table_set(k: usize, n: usize) -> HashSet<Vec<u32>> {
    enumerate_all(k, n).unwrap().map(|q| q.table().to_vec()).collect()
}

#[test]
fn small_orders_are_exactly_the_isotopes_of_cyclic_groups() {
    for k in 2..=5 {
        let class = isotopy_class(&cyclic_iterated(2, k));
        assert_eq!(class.len(), ORDER2_COUNT);
        assert_eq!(table_set(k, 2), class);
    }
    let class = isotopy_class(&cyclic_iterated(3, 2));
    assert_eq!(class.len(), ORDER3_BINARY_COUNT);
    assert_eq!(table_set(2, 3), class);
    let class = isotopy_class(&cyclic_iterated(3, 3));
    assert_eq!(class.len(), ORDER3_TERNARY_COUNT);
    assert_eq!(table_set(3, 3), class);
}

#[test]
fn order4_squares_split_between_two_groups() {
    let z4 = cyclic_square(4);
    let v4 = xor_square();
    let (mut nz, mut nv, mut total) = (0, 0, 0);
    for q in enumerate_all(2, 4).unwrap() {
        total += 1;
        let (a, b) = (binary_isotopic(&q, &z4), binary_isotopic(&q, &v4));
        assert!(a != b, "each square is isotopic to exactly one group");
        nz += a as usize;
        nv += b as usize;
    }
    assert_eq!((total, nz, nv), (ORDER4_BINARY_COUNT, ORDER4_Z4_ISOTOPES, ORDER4_V4_ISOTOPES));
}

#[test]
fn solve_inverts_evaluate() {
    for (k, n) in [(2, 2), (2, 3), (3, 2), (3, 3)] {
        for q in enumerate_all(k, n).unwrap() {
            for x in tuples(k, n) {
                let target = q.evaluate(&x).unwrap();
                for pos in 1..=k {
                    let known: Vec<usize> =
                        x.iter().enumerate().filter(|&(i, _)| i + 1 != pos).map(|(_, &v)| v).collect();
                    assert_eq!(q.solve(pos, &known, target).unwrap(), x[pos - 1]);
                }
            }
        }
    }
}

#[test]
fn twisted_ternary_against_pair_search() {
    let q = twisted_composition(&GroupTable::cyclic(4), &GroupTable::klein(), &Permutation::identity(4), 1).unwrap();
    assert_eq!(q, twisted_by_hand());
    let oracle: Vec<(usize, usize)> = chord_segments(3).into_iter().filter(|&(i, j)| pair_search(&q, i, j)).collect();
    assert_eq!(oracle, vec![(0, 2)]);
    assert_eq!(factorization_graph(&q).chords(), oracle);
    assert!(reducible_at(&q, Segment::new(1, 3, 3).unwrap()).unwrap().is_none());
}

#[test]
fn twisted_residuals_are_klein_isotopes() {
    let q = twisted_by_hand();
    for a in 0..4 {
        let r = q.residual(&BTreeMap::from([(1, a)])).unwrap();
        assert!(binary_isotopic(&r, &xor_square()));
        assert_eq!(extract_group(&r).unwrap().name, Some("V4"));
    }
}

#[test]
fn parastrophe_rotates_chords() {
    let q = twisted_by_hand();
    for p in [Parastrophe::forward(2), Parastrophe::forward(1), Parastrophe::backward(0), Parastrophe::backward(3)] {
        let r = q.circular_parastrophe(p);
        let oracle: HashSet<(usize, usize)> =
            chord_segments(3).into_iter().filter(|&(i, j)| pair_search(&r, i, j)).collect();
        // Chord {v'_a, v'_b} of the parastrophe sits at {v_map(a), v_map(b)}.
        let mapped: HashSet<(usize, usize)> = oracle
            .iter()
            .map(|&(a, b)| {
                let (x, y) = (p.node_map(a, 3), p.node_map(b, 3));
                (x.min(y), x.max(y))
            })
            .collect();
        assert_eq!(mapped, HashSet::from([(0, 2)]), "{p:?}");
    }
}

#[test]
fn isotopy_keeps_the_factorization_graph() {
    let q = iterated_group(&GroupTable::cyclic(4), 3).unwrap();
    for seed in 0..5 {
        let r = q.apply_isotopy(&random_isotopy(4, 3, seed)).unwrap();
        let oracle: Vec<(usize, usize)> =
            chord_segments(3).into_iter().filter(|&(i, j)| pair_search(&r, i, j)).collect();
        assert_eq!(oracle, vec![(0, 2), (1, 3)]);
        assert_eq!(factorization_graph(&r), factorization_graph(&q));
    }
}

#[test]
fn nongroup_square_is_not_associative() {
    let q = nongroup5();
    assert!(!check_ij_associative(&q, &q, &q, &q, 1, 2).unwrap());
    assert!(!check_multary_group(&q));
    assert!(!binary_isotopic(&q, &cyclic_square(5)));
    assert!(quadrangle_criterion(&q).unwrap().is_some());
}

#[test]
fn z6_and_s3_are_not_isomorphic() {
    let (z6, s3) = (GroupTable::cyclic(6), GroupTable::dihedral(3));
    let brute = Permutation::all(6)
        .into_iter()
        .any(|p| (0..6).all(|a| (0..6).all(|b| p.apply(z6.mul(a, b)) == s3.mul(p.apply(a), p.apply(b)))));
    assert!(!brute);
    assert_eq!(group_isomorphic(&z6, &s3).unwrap(), None);
}

#[test]
fn pseudoisomorphisms_of_z4_are_the_affine_maps() {
    let z4 = GroupTable::cyclic(4);
    let affine: HashSet<Vec<usize>> =
        [1, 3].iter().flat_map(|&a| (0..4).map(move |c| (0..4).map(|x| (a * x + c) % 4).collect())).collect();
    let found: HashSet<Vec<usize>> = Permutation::all(4)
        .into_iter()
        .filter(|b| is_pseudoisomorphism(b, &z4, &z4).unwrap())
        .map(|b| b.images().to_vec())
        .collect();
    assert_eq!(found, affine);
}

#[test]
fn scrambled_z6_extracts_z6() {
    let q = iterated_group(&GroupTable::cyclic(6), 3).unwrap().apply_isotopy(&random_isotopy(6, 3, 2024)).unwrap();
    let w = extract_group(&q).unwrap();
    let z6 = GroupTable::cyclic(6);
    let g = &w.group;
    let brute = Permutation::all(6)
        .into_iter()
        .any(|p| (0..6).all(|a| (0..6).all(|b| p.apply(g.mul(a, b)) == z6.mul(p.apply(a), p.apply(b)))));
    assert!(brute);
    assert_eq!(w.name, Some("Z6"));
    assert_eq!(w.realize().unwrap(), q);
}

#[test]
fn residual_ternary_locates_the_twist() {
    let q = compose(&twisted_by_hand(), &cyclic_square(4), 3).unwrap();
    let fix = failing_residual_ternary(&q).unwrap().unwrap();
    let r = q.residual(&fix).unwrap();
    // A ternary quasigroup is a group isotope iff both segments factor.
    assert!(!(pair_search(&r, 0, 2) && pair_search(&r, 1, 3)));
}

#[test]
fn design_of_iterated_z3_counts_blocks() {
    let d = to_design(&cyclic_iterated(3, 3));
    assert_eq!((d.class_count(), d.blocks().len()), (4, 27));
    // Every transversal triple lies in exactly one block.
    for classes in [[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]] {
        for vals in tuples(3, 3) {
            let pts: Vec<usize> = classes.iter().zip(&vals).map(|(c, v)| c * 3 + v).collect();
            let hits = d.blocks().iter().filter(|b| pts.iter().all(|p| b.contains(p))).count();
            assert_eq!(hits, 1);
        }
    }
    assert!(verify_design(&d, 3, 1).unwrap().valid);
}
