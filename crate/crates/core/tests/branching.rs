mod common;

use std::collections::BTreeMap;

use horoprod_core::branching::{
    branching_measure, check_conformal, estimate_l, invariance_samples, invariance_test,
    sample_augmented, sample_boundary_ray, sample_generation_sizes, sample_gw, BranchingError,
    DoublyRootedTree, OffspringLaw,
};
use horoprod_core::rng::replica_rng;
use horoprod_core::stats::chi_square_homogeneity;
use horoprod_core::{NodeIx, RootedTree, VertexId};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use common::*;

fn p13() -> OffspringLaw {
    OffspringLaw::new([(1, 0.5), (3, 0.5)]).unwrap()
}

fn ratio(num: u64, m: u64, n: u32) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(m).pow(n))
}

#[test]
fn first_generation_mean() {
    let law = p13();
    let n = 100_000u64;
    let xs: Vec<f64> = (0..n)
        .map(|s| sample_gw(&law, 1, s).unwrap().sphere_size(1).unwrap() as f64)
        .collect();
    let est = horoprod_core::stats::mean_and_se(&xs);
    assert!((est.mean - 2.0).abs() < 3.0 * est.std_err, "{est:?}");
}

#[test]
fn augmented_root_degree_law() {
    let law = p13();
    let n = 20_000u64;
    let counts = tally((0..n).map(|s| {
        let t = sample_augmented(&law, 0, s).unwrap();
        t.degree(t.root())
    }));
    assert_eq!(counts.keys().copied().collect::<Vec<_>>(), vec![2, 4]);
    let se = (0.25f64 / n as f64).sqrt();
    assert!((counts[&2] as f64 / n as f64 - 0.5).abs() < 4.0 * se);
}

#[test]
fn seeded_samples_are_identical() {
    let law = p13();
    let a = sample_gw(&law, 8, 77).unwrap();
    let b = sample_gw(&law, 8, 77).unwrap();
    assert_eq!(a.offspring_sequence(), b.offspring_sequence());
    assert_ne!(
        a.offspring_sequence(),
        sample_gw(&law, 8, 78).unwrap().offspring_sequence()
    );
}

#[test]
fn deterministic_laws_have_unit_martingale() {
    let two = OffspringLaw::deterministic(2).unwrap();
    let one = OffspringLaw::deterministic(1).unwrap();
    for n in 0..8 {
        let t = sample_gw(&two, 8, 0).unwrap();
        assert_eq!(estimate_l(&t, &two, n).unwrap().exact(), ratio(1, 1, 0));
        let p = sample_gw(&one, 8, 0).unwrap();
        assert_eq!(estimate_l(&p, &one, n).unwrap().value(), 1.0);
    }
}

#[test]
fn shadow_masses_are_exact_and_additive() {
    let two = OffspringLaw::deterministic(2).unwrap();
    let t = sample_gw(&two, 6, 0).unwrap();
    for d in 0..=4u32 {
        let apex = VertexId::new(vec![2; d as usize]);
        assert_eq!(
            branching_measure(&t, &two, &apex, 6).unwrap().exact(),
            ratio(1, 2, d)
        );
    }

    let law = p13();
    for seed in 0..10 {
        let t = sample_gw(&law, 6, seed).unwrap();
        for x in 0..t.len() as u32 {
            let x = NodeIx(x);
            if t.depth(x) >= 6 {
                continue;
            }
            let whole = branching_measure(&t, &law, &t.address(x), 6)
                .unwrap()
                .exact();
            let parts = t
                .children(x)
                .iter()
                .map(|&c| {
                    branching_measure(&t, &law, &t.address(NodeIx(c)), 6)
                        .unwrap()
                        .exact()
                })
                .fold(BigRational::zero(), |a, b| a + b);
            assert_eq!(whole, parts);
        }
    }
}

#[test]
fn true_leaf_has_no_mass() {
    // root with a leaf child and a long branch
    let t = RootedTree::build(vec![2, 0, 1, 1, 1], 3).unwrap();
    let law = p13();
    let leaf = VertexId::new(vec![1]);
    assert_eq!(branching_measure(&t, &law, &leaf, 3).unwrap().count, 0);
}

#[test]
fn conformal_example_on_full_binary_tree() {
    let two = OffspringLaw::deterministic(2).unwrap();
    let t = sample_gw(&two, 5, 0).unwrap();
    let r = check_conformal(
        &t,
        &two,
        &VertexId::new(vec![1]),
        &VertexId::new(vec![1, 2]),
        4,
    )
    .unwrap();
    assert!(r.exact);
    assert_eq!(r.lhs, "1/2");
    assert_eq!(r.rhs, "1/2");
    assert_eq!(r.busemann, -1);
}

#[test]
fn conformal_matches_enumeration_oracle() {
    let law = OffspringLaw::new([(1, 0.5), (2, 0.25), (4, 0.25)]).unwrap();
    let m = 2u64;
    let mut checked = 0;
    for seed in 0..200u64 {
        let t = sample_gw(&law, 6, seed).unwrap();
        let kids = t.children(t.root()).to_vec();
        let y = NodeIx(kids[seed as usize % kids.len()]);
        let below: Vec<NodeIx> = (y.0 + 1..t.subtree_end(y).0).map(NodeIx).collect();
        if below.is_empty() {
            continue;
        }
        let apex = below[(seed as usize * 7) % below.len()];
        let n = 6;
        let r = check_conformal(&t, &law, &t.address(y), &t.address(apex), n).unwrap();
        let (ya, aa) = (t.address(y), t.address(apex));
        let in_shadow: Vec<VertexId> = (0..t.len() as u32)
            .map(|v| t.address(NodeIx(v)))
            .filter(|v| aa.is_prefix_of(v))
            .collect();
        let around_y = in_shadow
            .iter()
            .filter(|v| address_distance(v, &ya) == n - 1)
            .count() as u64;
        let around_o = in_shadow.iter().filter(|v| v.depth() == n as usize).count() as u64;
        let lhs = ratio(around_y, m, n - 1);
        let rhs = ratio(around_o, m, n) * BigRational::from_integer(BigInt::from(m));
        assert_eq!(r.lhs, lhs.to_string());
        assert_eq!(r.rhs, rhs.to_string());
        assert!(r.exact);
        checked += 1;
    }
    assert!(checked > 150);
}

#[test]
fn conformal_rejects_off_path_y() {
    let two = OffspringLaw::deterministic(2).unwrap();
    let t = sample_gw(&two, 4, 0).unwrap();
    let err = check_conformal(
        &t,
        &two,
        &VertexId::new(vec![2]),
        &VertexId::new(vec![1, 1]),
        3,
    )
    .unwrap_err();
    assert!(matches!(err, BranchingError::PreconditionViolated(_)));
}

#[test]
fn boundary_ray_is_uniform_on_full_binary_tree() {
    let two = OffspringLaw::deterministic(2).unwrap();
    let t = sample_gw(&two, 3, 0).unwrap();
    let n = 100_000u64;
    let observed: BTreeMap<Vec<u32>, f64> = tally((0..n).map(|s| {
        sample_boundary_ray(t.clone(), &two, 3, s)
            .unwrap()
            .pointed
            .spine()
            .to_vec()
    }))
    .into_iter()
    .map(|(k, c)| (k, c as f64))
    .collect();
    assert_eq!(observed.len(), 8);
    let expected: BTreeMap<Vec<u32>, f64> = observed
        .keys()
        .map(|k| (k.clone(), n as f64 / 8.0))
        .collect();
    let chi = chi_square_homogeneity(&observed, &expected);
    assert!(chi.p_value > 0.001, "{chi:?}");
}

#[test]
fn boundary_ray_follows_shadow_masses() {
    let law = p13();
    let t = sample_gw(&law, 6, 4).unwrap();
    let kids = t.children(t.root()).to_vec();
    assert!(kids.len() == 3, "seed chosen for a branching root");
    let weights: Vec<f64> = kids
        .iter()
        .map(|&c| t.shadow_sphere_count_ix(NodeIx(c), 6).unwrap() as f64)
        .collect();
    let total: f64 = weights.iter().sum();
    let n = 30_000u64;
    let first = tally((0..n).map(|s| {
        sample_boundary_ray(t.clone(), &law, 6, s)
            .unwrap()
            .pointed
            .spine()[0]
    }));
    for (i, w) in weights.iter().enumerate() {
        let p = w / total;
        let got = *first.get(&(i as u32 + 1)).unwrap_or(&0) as f64 / n as f64;
        assert!(
            (got - p).abs() < 4.0 * (p * (1.0 - p) / n as f64).sqrt() + 1e-12,
            "child {i}: {got} vs {p}"
        );
    }
}

#[test]
fn path_tree_has_the_unique_ray() {
    let one = OffspringLaw::deterministic(1).unwrap();
    let t = sample_gw(&one, 5, 0).unwrap();
    assert_eq!(
        sample_boundary_ray(t, &one, 5, 1).unwrap().pointed.spine(),
        &[1; 5]
    );
}

#[test]
fn extinct_tree_is_a_dead_end() {
    let t = RootedTree::build(vec![1, 0], 2).unwrap();
    let err = sample_boundary_ray(t, &p13(), 2, 0).unwrap_err();
    assert_eq!(err, BranchingError::DeadEnd { depth: 0 });
}

#[test]
fn martingale_regression_slope_is_the_mean() {
    let law = p13();
    let n = 20_000u64;
    let pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let s = sample_generation_sizes(&law, 5, &mut replica_rng(3, i), false);
            (s[4] as f64, s[5] as f64)
        })
        .collect();
    let mx = pairs.iter().map(|p| p.0).sum::<f64>() / n as f64;
    let my = pairs.iter().map(|p| p.1).sum::<f64>() / n as f64;
    let sxx: f64 = pairs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pairs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let resid: f64 = pairs
        .iter()
        .map(|p| (p.1 - my - slope * (p.0 - mx)).powi(2))
        .sum();
    let se = (resid / (n as f64 - 2.0) / sxx).sqrt();
    assert!((slope - 2.0).abs() < 3.0 * se, "slope {slope} ± {se}");
}

#[test]
fn invariance_is_trivial_for_deterministic_law() {
    let two = OffspringLaw::deterministic(2).unwrap();
    let rep = invariance_test(&two, 2, 200, 0).unwrap();
    assert_eq!(rep.augmented_vs_joined.total_variation, 0.0);
    assert_eq!(rep.joined_vs_swapped.total_variation, 0.0);
}

/// Reference code for a radius-1 doubly rooted ball with `a` and `b` further
/// neighbors at the two roots.
fn pair_code(a: u32, b: u32) -> Vec<u8> {
    let mut p = vec![a];
    p.extend(std::iter::repeat_n(0, a as usize));
    let mut s = vec![b];
    s.extend(std::iter::repeat_n(0, b as usize));
    let p = RootedTree::build(p, 2).unwrap();
    let s = RootedTree::build(s, 1).unwrap();
    DoublyRootedTree::join(&p, &s)
        .unwrap()
        .ball_code(1)
        .unwrap()
}

#[test]
fn radius_one_cells_follow_the_product_law() {
    let law = p13();
    let n = 40_000usize;
    let samples = invariance_samples(&law, 1, n, 9).unwrap();
    for a in [1u32, 3] {
        for b in [1u32, 3] {
            let p = law.prob(a) * law.prob(b);
            let tol = 4.0 * (p * (1.0 - p) / n as f64).sqrt();
            let code = pair_code(a, b);
            for (name, dist) in [
                ("augmented", &samples.augmented),
                ("joined", &samples.joined),
            ] {
                let got = dist.get(&code).copied().unwrap_or(0.0) / n as f64;
                assert!((got - p).abs() < tol, "{name} ({a},{b}): {got} vs {p}");
            }
        }
    }
    assert_eq!(samples.joined.len(), 4);
}

#[test]
fn swap_symmetry_shrinks_with_samples() {
    let law = p13();
    let small = invariance_test(&law, 1, 2_000, 1)
        .unwrap()
        .joined_vs_swapped
        .total_variation;
    let large = invariance_test(&law, 1, 50_000, 1)
        .unwrap()
        .joined_vs_swapped
        .total_variation;
    assert!(large < 0.02);
    assert!(large < small + 0.01);
}
