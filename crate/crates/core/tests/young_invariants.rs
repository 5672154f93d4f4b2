use sunchain_core::fock::binomial;
use sunchain_core::young::{enumerate_diagrams, ground_diagram};
use sunchain_core::{Dominance, YoungDiagram};
use sunchain_oracles::{count_ssyt, dominates_by_moves, partitions};

fn diagrams_upto(boxes: usize, rows: usize) -> Vec<Vec<YoungDiagram>> {
    (1..=boxes).map(|m| enumerate_diagrams(m, rows)).collect()
}

#[test]
fn enumeration_matches_partition_oracle() {
    for m in 1..=10 {
        for n in 1..=5 {
            let mut ours: Vec<Vec<usize>> =
                enumerate_diagrams(m, n).iter().map(|d| d.rows().to_vec()).collect();
            let mut theirs = partitions(m, n);
            ours.sort();
            theirs.sort();
            assert_eq!(ours, theirs, "M={m} N={n}");
        }
    }
}

#[test]
fn dominance_is_a_partial_order_matching_box_moves() {
    for level in diagrams_upto(8, 4) {
        for a in &level {
            assert_eq!(a.dominance(a), Dominance::Equal);
            for b in &level {
                let d = a.dominance(b);
                let flipped = match d {
                    Dominance::Above => Dominance::Below,
                    Dominance::Below => Dominance::Above,
                    other => other,
                };
                assert_eq!(b.dominance(a), flipped, "{a} vs {b}");
                if a != b {
                    assert_ne!(d, Dominance::Equal);
                }
                let by_moves = dominates_by_moves(a.rows(), b.rows());
                assert_eq!(by_moves, matches!(d, Dominance::Above | Dominance::Equal), "{a} vs {b}");
                for c in &level {
                    if d == Dominance::Above && b.dominance(c) == Dominance::Above {
                        assert_eq!(a.dominance(c), Dominance::Above, "{a} > {b} > {c}");
                    }
                }
            }
        }
    }
}

#[test]
fn ground_diagram_is_dominated_by_all_others() {
    for m in 1..=8 {
        for n in 1..=4 {
            let g = ground_diagram(m, n).unwrap();
            for d in enumerate_diagrams(m, n) {
                if d != g {
                    assert_eq!(d.dominance(&g), Dominance::Above, "{d} vs ground {g}");
                }
            }
        }
    }
}

#[test]
fn conjugation_inverts_dominance() {
    for level in diagrams_upto(8, 8) {
        for a in &level {
            assert_eq!(&a.conjugate().conjugate(), a);
            for b in &level {
                let want = match a.dominance(b) {
                    Dominance::Above => Dominance::Below,
                    Dominance::Below => Dominance::Above,
                    other => other,
                };
                assert_eq!(a.conjugate().dominance(&b.conjugate()), want, "{a} vs {b}");
            }
        }
    }
}

#[test]
fn dimension_equals_tableau_count() {
    for n in 1..=4 {
        for level in diagrams_upto(8, n) {
            for d in level {
                assert_eq!(d.irrep_dimension(n).unwrap(), count_ssyt(d.rows(), n), "{d} N={n}");
            }
        }
    }
}

#[test]
fn single_columns_are_antisymmetric_powers() {
    for n in 1..=6 {
        for k in 1..=n {
            let column = YoungDiagram::new(vec![1; k]).unwrap();
            assert_eq!(column.irrep_dimension(n).unwrap(), binomial(n as u64, k as u64));
        }
    }
}

#[test]
fn anchor_chain_and_incomparable_pair() {
    let chain: Vec<YoungDiagram> = ["4", "3,1", "2,2", "2,1,1", "1,1,1,1"]
        .iter()
        .map(|s| s.parse().unwrap())
        .collect();
    for w in chain.windows(2) {
        assert_eq!(w[0].dominance(&w[1]), Dominance::Above);
    }
    let a: YoungDiagram = "4,1,1".parse().unwrap();
    let b: YoungDiagram = "3,3".parse().unwrap();
    assert_eq!(a.dominance(&b), Dominance::Incomparable);
}
