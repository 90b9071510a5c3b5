use std::collections::BTreeMap;

use hurwitz_core::char_p_diff::{dlog, DiffForm, FqElt, GaloisField, Point, RatFunc};
use hurwitz_core::document::{parse_tree, TreeDocument};
use hurwitz_core::hurwitz_tree::{HurwitzTree, TreeBuilder};
use hurwitz_core::realizability::{
    is_adapted, is_maximal_adapted, is_point_of, min_maximal_partition, search_point, Partition, PointShape,
    ResidueVector,
};
use proptest::prelude::*;

const PRIMES: [u32; 3] = [2, 3, 5];

/// Nonzero residues summing to zero: `len - 1` free entries, the last one fixes the sum.
fn residue_vector(p: u32, max_len: usize) -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(1..p as i64, 1..max_len).prop_filter_map("last entry would vanish", move |mut v| {
        let s: i64 = v.iter().sum();
        let last = (-s).rem_euclid(p as i64);
        (last != 0).then(|| {
            v.push(last);
            v
        })
    })
}

fn any_residue_vector(max_len: usize) -> impl Strategy<Value = (u32, Vec<i64>)> {
    prop::sample::select(PRIMES.to_vec()).prop_flat_map(move |p| residue_vector(p, max_len).prop_map(move |v| (p, v)))
}

/// `r -> s` with `m+1` leaves at `s`; valid when `m` is prime to `p` and the residues sum to 0.
fn star(p: u32, m: i64, hs: &[u32]) -> HurwitzTree {
    TreeBuilder::new(p, m, 0, "r").edge("r", "s", 1, m, 0).leaves("s", hs).build().unwrap()
}

fn star_strategy() -> impl Strategy<Value = HurwitzTree> {
    any_residue_vector(9)
        .prop_filter("conductor prime to p", |(p, v)| v.len() >= 3 && (v.len() as i64 - 1) % *p as i64 != 0)
        .prop_map(|(p, v)| {
            let hs: Vec<u32> = v.iter().map(|&h| h as u32).collect();
            star(p, v.len() as i64 - 1, &hs)
        })
}

fn fixtures() -> Vec<HurwitzTree> {
    let text = std::fs::read_to_string(format!("{}/../../fixtures/p5_conductor32.tree", env!("CARGO_MANIFEST_DIR"))).unwrap();
    let t3 = TreeBuilder::new(3, 2, 0, "r1")
        .edge("r1", "s", 1, 1, 0)
        .edge("s", "r2", 1, -1, 0)
        .edge("s", "t", 1, 1, 0)
        .leaves("t", &[1, 2])
        .build()
        .unwrap();
    vec![parse_tree(&text).unwrap(), t3]
}

/// Sum of `m·ε` along the path, by walking parents.
fn path_sum(t: &HurwitzTree, s: &str) -> i128 {
    let mut total = 0;
    let mut cur = s.to_string();
    while let Some(e) = t.incoming(&cur).unwrap() {
        total += e.m as i128 * e.eps as i128;
        cur = e.from.clone();
    }
    total
}

#[test]
fn differente_telescopes_on_fixtures() {
    for t in fixtures() {
        for s in t.vertices() {
            assert_eq!(t.differente(s).unwrap(), t.d0() as i128 + (t.p() as i128 - 1) * path_sum(&t, s));
        }
        for e in t.edges() {
            let jump = t.differente(&e.to).unwrap() - t.differente(&e.from).unwrap();
            assert_eq!(jump, (t.p() as i128 - 1) * e.m as i128 * e.eps as i128);
        }
    }
}

#[test]
fn subtrees_of_valid_trees_are_valid() {
    for t in fixtures() {
        assert!(t.validate().is_valid());
        for e in t.edges() {
            let sub = t.subtree(&e.id).unwrap();
            assert!(sub.validate().is_valid(), "subtree at {}: {:?}", e.id, sub.validate());
            assert_eq!(sub.d0() as i128, t.differente(&e.from).unwrap());
            for v in sub.vertices() {
                assert_eq!(sub.differente(v).unwrap(), t.differente(v).unwrap());
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn random_chains_telescope(p in prop::sample::select(PRIMES.to_vec()), steps in prop::collection::vec((0i64..5, -4i64..5), 1..8)) {
        // Structure only: the law holds whether or not the axioms do.
        let mut b = TreeBuilder::new(p, 50, 0, "v0");
        for (i, (eps, m)) in steps.iter().enumerate() {
            b = b.edge(&format!("v{i}"), &format!("v{}", i + 1), *eps, *m, 0);
        }
        let t = b.build().unwrap();
        for s in t.vertices() {
            prop_assert_eq!(t.differente(s).unwrap(), (p as i128 - 1) * path_sum(&t, s));
        }
    }

    #[test]
    fn star_subtrees_are_valid(t in star_strategy()) {
        prop_assert!(t.validate().is_valid(), "{:?}", t.validate());
        for e in t.edges() {
            prop_assert!(t.subtree(&e.id).unwrap().validate().is_valid());
        }
    }

    #[test]
    fn equivalence_survives_relabeling(t in star_strategy(), salt in 0u32..1000, seed in any::<u64>()) {
        let relabeled = t.relabeled(|v| format!("{v}#{salt}"), |e| format!("edge{salt}:{e}"));
        prop_assert!(t.is_equivalent(&relabeled));
        prop_assert_eq!(t.canonical_form(), relabeled.canonical_form());
        // Sibling order in the file does not matter either.
        let mut doc = TreeDocument::from_tree(&t);
        let n = doc.edges.len();
        for i in (1..n).rev() {
            doc.edges.swap(i, (seed as usize).wrapping_mul(i + 7) % (i + 1));
        }
        let shuffled = doc.to_tree().unwrap();
        prop_assert!(t.is_equivalent(&shuffled));
    }

    #[test]
    fn changing_a_thickness_breaks_equivalence(t in star_strategy()) {
        let mut doc = TreeDocument::from_tree(&t);
        doc.edges.iter_mut().find(|e| e.from == "r").unwrap().eps += 1;
        prop_assert!(!t.is_equivalent(&doc.to_tree().unwrap()));
    }

    #[test]
    fn residue_theorem(p in prop::sample::select(PRIMES.to_vec()), roots in prop::collection::btree_map(0u32..25, -4i64..5, 1..6), c in 1u32..4) {
        let k = GaloisField::new(p, 2).unwrap();
        let mut u = RatFunc::constant(FqElt(c % k.size()).max(k.one()));
        for (&a, &e) in &roots {
            if e != 0 {
                u = u.mul(&k, &RatFunc::linear_power(&k, FqElt(a % k.size()), e));
            }
        }
        prop_assume!(!u.is_zero());
        for w in [dlog(&k, &u).unwrap(), DiffForm { f: u.clone() }] {
            let total = k.elements().map(Point::Finite).chain([Point::Infinity])
                .fold(k.zero(), |acc, pt| k.add(acc, w.residue(&k, pt)));
            prop_assert_eq!(total, k.zero());
        }
        // f dt with f split has a divisor of degree -2.
        let d = DiffForm { f: u }.divisor(&k).unwrap();
        prop_assert_eq!(d.degree(), -2);
    }

    #[test]
    fn found_points_are_points((p, e) in any_residue_vector(7)) {
        let rv = ResidueVector::new(p, &e).unwrap();
        let out = search_point(&rv, PointShape::Disk, 2, 200_000);
        if let Some(pt) = out.point {
            let k = GaloisField::new(p, pt.n).unwrap();
            prop_assert!(is_point_of(&k, &rv, PointShape::Disk, &pt.coords));
            // Power sums recomputed by hand.
            for nu in (1..e.len() as i64 - 1).filter(|v| v % p as i64 != 0) {
                let s = pt.coords.iter().zip(&e).fold(k.zero(), |acc, (&t, &w)| k.add(acc, k.mul(k.from_int(w), k.pow(t, nu).unwrap())));
                prop_assert_eq!(s, k.zero());
            }
        }
    }

    #[test]
    fn annulus_points_are_points((p, e) in any_residue_vector(6), split in 1usize..5) {
        let len = e.len() as i64;
        prop_assume!((split as i64) < len);
        let shape = PointShape::Annulus { m1: split as i64, m2: len - split as i64 };
        let rv = ResidueVector::new(p, &e).unwrap();
        if let Some(pt) = search_point(&rv, shape, 2, 200_000).point {
            let k = GaloisField::new(p, pt.n).unwrap();
            prop_assert!(pt.coords.iter().all(|c| c.0 != 0));
            prop_assert!(is_point_of(&k, &rv, shape, &pt.coords));
        }
    }

    /// Coincidences of a point of `X_e` with at most `m` distinct coordinates form an adapted partition.
    #[test]
    fn coincidence_partition_is_adapted((p, e) in any_residue_vector(7), picks in prop::collection::vec(0u32..9, 7)) {
        let k = GaloisField::new(p, 2).unwrap();
        let coords: Vec<FqElt> = e.iter().enumerate().map(|(i, _)| FqElt(picks[i] % k.size())).collect();
        let m = e.len() - 1;
        let exps: Vec<i64> = (1..m as i64).filter(|v| v % p as i64 != 0).collect();
        let on_variety = exps.iter().all(|&nu| {
            coords.iter().zip(&e).fold(k.zero(), |acc, (&t, &w)| k.add(acc, k.mul(k.from_int(w), k.pow(t, nu).unwrap()))) == k.zero()
        });
        let mut classes: BTreeMap<FqElt, Vec<usize>> = BTreeMap::new();
        for (i, c) in coords.iter().enumerate() {
            classes.entry(*c).or_default().push(i);
        }
        prop_assume!(on_variety && classes.len() <= m);
        let part = Partition::new(classes.into_values().collect());
        prop_assert!(is_adapted(&part, &ResidueVector::new(p, &e).unwrap()).unwrap());
    }

    #[test]
    fn maximality_matches_refinement_oracle((p, e) in any_residue_vector(9)) {
        let rv = ResidueVector::new(p, &e).unwrap();
        let all = set_partitions(e.len());
        let adapted: Vec<&Vec<Vec<usize>>> = all.iter().filter(|b| is_adapted(&Partition::new((*b).clone()), &rv).unwrap()).collect();
        let mut fewest = usize::MAX;
        for b in &adapted {
            let finer = adapted.iter().any(|f| refines(f, b));
            prop_assert_eq!(is_maximal_adapted(&Partition::new((*b).clone()), &rv).unwrap(), !finer);
            if !finer {
                fewest = fewest.min(b.len());
            }
        }
        let best = min_maximal_partition(&rv, 40).unwrap();
        prop_assert!(is_maximal_adapted(&best, &rv).unwrap());
        prop_assert_eq!(best.len(), fewest);
    }
}

fn set_partitions(n: usize) -> Vec<Vec<Vec<usize>>> {
    fn rec(i: usize, n: usize, cur: &mut Vec<Vec<usize>>, out: &mut Vec<Vec<Vec<usize>>>) {
        if i == n {
            out.push(cur.clone());
            return;
        }
        for b in 0..cur.len() {
            cur[b].push(i);
            rec(i + 1, n, cur, out);
            cur[b].pop();
        }
        cur.push(vec![i]);
        rec(i + 1, n, cur, out);
        cur.pop();
    }
    let mut out = Vec::new();
    rec(0, n, &mut Vec::new(), &mut out);
    out
}

fn refines(fine: &[Vec<usize>], coarse: &[Vec<usize>]) -> bool {
    fine.len() > coarse.len() && fine.iter().all(|f| coarse.iter().any(|c| f.iter().all(|i| c.contains(i))))
}
