use std::collections::BTreeSet;

use num_rational::BigRational;
use num_traits::One;
use stretch_idla::analysis::{enumerate_monotone_trees, shell_identity_check, shell_sum, Dyadic, MonotoneTree};
use stretch_idla::{Dir, Edge, Vertex};

/// Every edge a tree of at most `k` edges at the origin could use.
fn candidate_edges(k: i64) -> Vec<Edge> {
    let mut out = Vec::new();
    for y in 0..k {
        for x in (-y..=y).step_by(2) {
            for d in Dir::BOTH {
                out.push(Vertex { x, y }.edge(d));
            }
        }
    }
    out
}

fn subsets_forming_trees(k: usize) -> BTreeSet<BTreeSet<Edge>> {
    let edges = candidate_edges(k as i64);
    let mut found = BTreeSet::new();
    let mut chosen = Vec::new();
    fn rec(
        edges: &[Edge],
        start: usize,
        k: usize,
        chosen: &mut Vec<Edge>,
        found: &mut BTreeSet<BTreeSet<Edge>>,
    ) {
        if let Ok(t) = MonotoneTree::from_edges(Vertex::ORIGIN, chosen.iter().copied()) {
            found.insert(t.edges().clone());
        }
        if chosen.len() == k {
            return;
        }
        for i in start..edges.len() {
            chosen.push(edges[i]);
            rec(edges, i + 1, k, chosen, found);
            chosen.pop();
        }
    }
    rec(&edges, 0, k, &mut chosen, &mut found);
    found
}

#[test]
fn enumeration_matches_subset_oracle() {
    for k in 0..=5 {
        let listed: Vec<BTreeSet<Edge>> = enumerate_monotone_trees(k).unwrap().map(|t| t.edges().clone()).collect();
        let unique: BTreeSet<_> = listed.iter().cloned().collect();
        assert_eq!(unique.len(), listed.len(), "duplicates at k={k}");
        assert_eq!(unique, subsets_forming_trees(k), "k={k}");
    }
}

#[test]
fn reference_counts() {
    let counts: Vec<usize> = (0..=3).map(|k| enumerate_monotone_trees(k).unwrap().count()).collect();
    assert_eq!(&counts[..3], &[1, 3, 8]);
    assert!(counts[3] > counts[2]);
}

/// Shells of a tree from the shells of its two child subtrees: a missing
/// root edge is a level-1 shell edge, a present one contributes its subtree
/// one level deeper.
#[test]
fn shell_recursion_through_child_subtrees() {
    for tree in enumerate_monotone_trees(7).unwrap() {
        let profile = tree.shell_profile();
        let mut expect = vec![0u64; profile.max_level() as usize + 2];
        for d in Dir::BOTH {
            match tree.child_subtree(d) {
                None => expect[1] += 1,
                Some(sub) => {
                    let sp = sub.shell_profile();
                    for i in 1..=sp.max_level() {
                        expect[i as usize + 1] += sp.get(i);
                    }
                }
            }
        }
        for (i, &c) in expect.iter().enumerate().skip(1) {
            assert_eq!(profile.get(i as u32), c, "level {i}");
        }
    }
}

#[test]
fn exact_routes_agree() {
    for tree in enumerate_monotone_trees(6).unwrap() {
        assert!(shell_identity_check(&tree));
        let p = tree.shell_profile();
        assert_eq!(shell_sum::<BigRational>(&p), BigRational::one());
        assert_eq!(shell_sum::<Dyadic>(&p), Dyadic::one());
        assert_eq!(shell_sum::<f64>(&p), 1.0);
    }
}

#[test]
fn deep_path_is_exact_in_dyadics() {
    let edges = (0..80).map(|i| Vertex { x: i, y: i }.edge(Dir::Right));
    let tree = MonotoneTree::from_edges(Vertex::ORIGIN, edges).unwrap();
    assert!(shell_identity_check(&tree));
    assert_eq!(tree.shell_profile().get(81), 2);
}
