use coarsekit::cover::{
    coarseness_profile, finite_family_diagnostics, global_multiplicity, lebesgue_number, lebesgue_within,
    local_lebesgue, max_multiplicity, mesh, to_shrinking,
};
use coarsekit::dimension::asdim::{asdim_at_scale, asdim_zero_witness};
use coarsekit::dimension::higher::{higher_lebesgue_exact, Bound};
use coarsekit::maps::{distance_transfers, lebesgue_transfer_bounds, zero_dim_retraction, PointMap};
use coarsekit::pou::{canonical_pou, l1_label_bound_violations};
use coarsekit::refine::{inward_shrink, ostrand_split, squared_annuli};
use coarsekit::{FiniteMetricSpace, IndexedFamily, Subset};
use proptest::prelude::*;

/// Shortest-path metric of a random connected graph with integer weights.
fn arb_space(max: usize) -> impl Strategy<Value = FiniteMetricSpace> {
    (2..=max).prop_flat_map(|n| {
        let tree = proptest::collection::vec((any::<prop::sample::Index>(), 1u32..=4), n - 1);
        let extra = proptest::collection::vec((0..n, 0..n, 1u32..=6), 0..n);
        (Just(n), tree, extra).prop_map(|(n, tree, extra)| {
            let mut edges: Vec<(usize, usize, f64)> =
                tree.into_iter().enumerate().map(|(i, (parent, w))| (i + 1, parent.index(i + 1), w as f64)).collect();
            edges.extend(extra.into_iter().filter(|(a, b, _)| a != b).map(|(a, b, w)| (a, b, w as f64)));
            FiniteMetricSpace::from_graph(n, &edges, 0).unwrap()
        })
    })
}

fn arb_family(n: usize, labels: usize) -> impl Strategy<Value = IndexedFamily> {
    proptest::collection::vec(proptest::collection::vec(any::<bool>(), n), 1..=labels).prop_map(move |rows| {
        IndexedFamily::new(
            n,
            rows.into_iter().enumerate().map(|(i, r)| (format!("U{i}"), Subset::from_predicate(n, |x| r[x]))).collect(),
        )
        .unwrap()
    })
}

fn space_and_family(max: usize, labels: usize) -> impl Strategy<Value = (FiniteMetricSpace, IndexedFamily)> {
    arb_space(max).prop_flat_map(move |x| {
        let n = x.len();
        (Just(x), arb_family(n, labels))
    })
}

fn space_and_subsets(max: usize) -> impl Strategy<Value = (FiniteMetricSpace, Subset, Subset)> {
    arb_space(max).prop_flat_map(|x| {
        let n = x.len();
        let sub = proptest::collection::vec(any::<bool>(), n).prop_map(move |b| Subset::from_predicate(n, |i| b[i]));
        (Just(x), sub.clone(), sub)
    })
}

/// Naive `Lⁿ`: every assignment of a nonempty label set `T(a)` to each point of
/// `A`, members `V_s = {a : s ∈ T(a)}`, multiplicity at most `n+1`.
fn naive_higher(x: &FiniteMetricSpace, u: &IndexedFamily, a: &Subset, n: usize) -> f64 {
    let pts = a.to_vec();
    let options: Vec<Vec<u32>> = pts
        .iter()
        .map(|&p| {
            let avail: Vec<usize> = u.containing(p);
            (1u32..(1 << avail.len()))
                .filter(|m| m.count_ones() as usize <= n + 1)
                .map(|m| {
                    avail.iter().enumerate().filter(|(b, _)| m >> b & 1 == 1).fold(0u32, |acc, (_, &s)| acc | 1 << s)
                })
                .collect()
        })
        .collect();
    if options.iter().any(Vec::is_empty) {
        return 0.0;
    }
    let mut best = 0.0f64;
    let mut idx = vec![0usize; pts.len()];
    loop {
        let sets: Vec<(String, Subset)> = (0..u.len())
            .map(|s| {
                let members = pts.iter().zip(&idx).enumerate().filter(|(k, (_, &i))| options[*k][i] >> s & 1 == 1);
                (u.label(s).to_string(), Subset::from_indices(x.len(), members.map(|(_, (&p, _))| p)).unwrap())
            })
            .collect();
        let v = IndexedFamily::new(x.len(), sets).unwrap();
        best = best.max(lebesgue_within(x, &v, a));
        let mut k = 0;
        loop {
            if k == idx.len() {
                return best;
            }
            idx[k] += 1;
            if idx[k] < options[k].len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn balls_grow_with_radius((x, a, _) in space_and_subsets(12), m1 in -6.0f64..6.0, dm in 0.0f64..6.0) {
        prop_assert!(x.ball(&a, m1).is_subset(&x.ball(&a, m1 + dm)));
    }

    #[test]
    fn erode_then_dilate((x, a, _) in space_and_subsets(16), m in 0.1f64..6.0) {
        prop_assert!(x.ball(&x.ball(&a, -m), m).is_subset(&a));
    }

    #[test]
    fn components_merge(x in arb_space(12), m in 0.5f64..5.0, dm in 0.0f64..3.0) {
        let fine = x.m_scale_components(&x.all(), m);
        let coarse = x.m_scale_components(&x.all(), m + dm);
        for c in &fine {
            prop_assert!(coarse.iter().any(|d| c.is_subset(d)));
        }
    }

    #[test]
    fn hausdorff_is_max_of_radii((x, a, b) in space_and_subsets(12)) {
        let (_, h) = x.set_distances(&a, &b);
        prop_assert_eq!(h, x.relation_radius(&a, &b).max(x.relation_radius(&b, &a)));
        let both_zero = x.relation_radius(&a, &b) == 0.0 && x.relation_radius(&b, &a) == 0.0;
        prop_assert_eq!(both_zero, a == b || (a.is_empty() && b.is_empty()));
    }

    #[test]
    fn local_lebesgue_is_lipschitz((x, u) in space_and_family(12, 4)) {
        let l = local_lebesgue(&x, &u);
        for i in 0..x.len() {
            for j in 0..x.len() {
                if l[i].is_finite() && l[j].is_finite() {
                    prop_assert!((l[i] - l[j]).abs() <= x.d(i, j));
                }
            }
        }
    }

    #[test]
    fn sum_distance_sandwich((x, u) in space_and_family(12, 4)) {
        prop_assert!(finite_family_diagnostics(&x, &u).sandwich_violations.is_empty());
    }

    #[test]
    fn coarseness_profile_nondecreasing((x, u) in space_and_family(12, 4)) {
        prop_assert!(coarseness_profile(&x, &u).is_nondecreasing());
    }

    #[test]
    fn shrinking_keeps_multiplicity((x, u) in space_and_family(10, 3), v_rows in proptest::collection::vec(proptest::collection::vec(any::<bool>(), 10), 1..4)) {
        let n = x.len();
        // V: random subsets of members of U so that V refines U
        let v = IndexedFamily::new(n, v_rows.iter().enumerate().map(|(i, r)| {
            let host = u.set(i % u.len());
            (format!("V{i}"), Subset::from_predicate(n, |p| r[p] && host.contains(p)))
        }).collect()).unwrap();
        let w = to_shrinking(&u, &v).unwrap();
        for s in 0..u.len() {
            prop_assert!(w.set(s).is_subset(u.set(s)));
        }
        prop_assert!(max_multiplicity(&w) <= max_multiplicity(&v));
    }

    #[test]
    fn ostrand_pointwise_bound((x, u) in space_and_family(12, 4)) {
        let split = ostrand_split(&x, &u);
        let before = local_lebesgue(&x, &u);
        let after = local_lebesgue(&x, &split.combined);
        let k = 2.0 * max_multiplicity(&u).max(1) as f64;
        for p in 0..x.len() {
            prop_assert!(after[p] >= before[p] / k, "x={p}: {} < {}/{k}", after[p], before[p]);
        }
        for fam in &split.families {
            for i in 0..fam.len() {
                for j in i + 1..fam.len() {
                    prop_assert!(fam.set(i).is_disjoint(fam.set(j)));
                }
            }
        }
    }

    #[test]
    fn annuli_multiplicity_two(x in arb_space(14)) {
        let (fam, cert) = squared_annuli(&x);
        prop_assert!(max_multiplicity(&fam) <= 2);
        prop_assert!(cert.verified());
    }

    #[test]
    fn ostrand_scale_equivariant((x, u) in space_and_family(10, 3), lambda in 1u32..5) {
        let lambda = lambda as f64;
        let a = ostrand_split(&x, &u);
        let b = ostrand_split(&x.scaled(lambda), &u);
        prop_assert_eq!(a.combined.labels(), b.combined.labels());
        prop_assert_eq!(a.combined.sets(), b.combined.sets());
        let la = lebesgue_number(&x, &u, &x.all());
        let lb = lebesgue_number(&x.scaled(lambda), &u, &x.all());
        prop_assert_eq!(la * lambda, lb);
    }

    #[test]
    fn inward_shrinks_inside((x, u) in space_and_family(10, 3)) {
        if u.is_cover() && u.sets().iter().all(|s| !s.is_empty()) {
            let (v, cert) = inward_shrink(&x, &u).unwrap();
            for s in 0..u.len() {
                prop_assert!(v.set(s).is_subset(u.set(s)));
            }
            prop_assert!(cert.verified());
        }
    }

    #[test]
    fn canonical_pou_properties((x, u) in space_and_family(10, 3), lambda in 1u32..4, m in 0.5f64..4.0) {
        let Ok(c) = canonical_pou(&x, &u) else {
            prop_assert!(local_lebesgue(&x, &u).iter().all(|&l| l == 0.0));
            return Ok(());
        };
        for p in c.pou.domain.iter() {
            prop_assert!((c.pou.sum_at(p) - 1.0).abs() <= 1e-9);
        }
        let scaled = canonical_pou(&x.scaled(lambda as f64), &u).unwrap();
        for (r1, r2) in c.pou.weights.iter().zip(&scaled.pou.weights) {
            for (w1, w2) in r1.iter().zip(r2) {
                prop_assert!((w1 - w2).abs() <= 1e-12);
            }
        }
        prop_assert!(l1_label_bound_violations(&x, &c.pou, m).is_empty());
    }

    #[test]
    fn higher_lebesgue_matches_naive((x, u) in space_and_family(8, 3), n in 0usize..3) {
        let a = x.all();
        let exact = higher_lebesgue_exact(&x, &u, &a, n, 16).unwrap();
        prop_assert_eq!(exact.value, naive_higher(&x, &u, &a, n));
        if let Some(w) = &exact.witness {
            prop_assert!(global_multiplicity(w, &a) <= n + 1 || exact.value.is_infinite());
        }
    }

    #[test]
    fn higher_lebesgue_monotone((x, u) in space_and_family(10, 4)) {
        let a = x.all();
        let full = lebesgue_within(&x, &u, &a);
        let mut prev = 0.0;
        for n in 0..4 {
            let v = higher_lebesgue_exact(&x, &u, &a, n, 16).unwrap().value;
            prop_assert!(v >= prev && v <= full);
            if n + 1 >= max_multiplicity(&u) {
                prop_assert_eq!(v, full);
            }
            prev = v;
        }
    }

    #[test]
    fn higher_lebesgue_grows_with_members((x, u) in space_and_family(10, 3), extra in proptest::collection::vec(any::<bool>(), 10), n in 0usize..3) {
        let bigger = u.map_sets(|s| s.union(&Subset::from_predicate(x.len(), |p| extra[p] && s.contains(p) || extra[p] && p % 2 == 0)));
        let a = x.all();
        let small = higher_lebesgue_exact(&x, &u, &a, n, 16).unwrap().value;
        let large = higher_lebesgue_exact(&x, &bigger, &a, n, 16).unwrap().value;
        prop_assert!(large >= small);
    }

    #[test]
    fn asdim_covers_reverify(x in arb_space(10), m in 1.0f64..4.0, n in 0usize..3, mesh_bound in 2.0f64..20.0) {
        let r = asdim_at_scale(&x, m, n, mesh_bound, 10);
        if let Some(c) = &r.cover {
            prop_assert!(max_multiplicity(&c.family) <= n + 1);
            prop_assert!(lebesgue_number(&x, &c.family, &x.all()) >= m);
            prop_assert!(mesh(&x, &c.family) <= mesh_bound);
        } else {
            prop_assert_eq!(r.bound, Bound::Exact);
        }
    }

    #[test]
    fn zero_witness_matches_components(x in arb_space(12), m in 0.5f64..5.0) {
        if let Some(w) = asdim_zero_witness(&x, m) {
            for row in &w.rows {
                let tail = x.outside_ball(row.r);
                let widest = x.m_scale_components(&tail, m).iter().map(|c| x.diameter(c)).fold(0.0, f64::max);
                prop_assert_eq!(row.max_diameter, widest);
            }
        }
    }

    #[test]
    fn transfers_and_composition(x in arb_space(8), y in arb_space(8), z in arb_space(8), f_raw in proptest::collection::vec(any::<prop::sample::Index>(), 8), g_raw in proptest::collection::vec(any::<prop::sample::Index>(), 8)) {
        let f = PointMap::from_fn(x.clone(), y.clone(), |p| f_raw[p].index(y.len())).unwrap();
        let g = PointMap::from_fn(y.clone(), z.clone(), |p| g_raw[p].index(z.len())).unwrap();
        let (fwd, rev) = distance_transfers(&f);
        prop_assert!(fwd.is_nondecreasing() && rev.is_nondecreasing());
        let gf = f.then(&g).unwrap();
        for e in &fwd.entries {
            prop_assert!(gf.forward_transfer(e.t) <= g.forward_transfer(f.forward_transfer(e.t)));
        }
        let b = lebesgue_transfer_bounds(&f, None).unwrap();
        for (lo, up) in b.lower.entries.iter().zip(&b.upper.entries) {
            prop_assert!(lo.v <= up.v);
        }
    }

    #[test]
    fn close_maps_share_eroded_preimages(x in arb_space(8), y in arb_space(8), f_raw in proptest::collection::vec(any::<prop::sample::Index>(), 8), g_raw in proptest::collection::vec(any::<prop::sample::Index>(), 8), rows in proptest::collection::vec(proptest::collection::vec(any::<bool>(), 8), 1..4)) {
        let f = PointMap::from_fn(x.clone(), y.clone(), |p| f_raw[p].index(y.len())).unwrap();
        let g = PointMap::from_fn(x.clone(), y.clone(), |p| g_raw[p].index(y.len())).unwrap();
        let m = f.distance_to(&g).unwrap();
        for r in &rows {
            let u = Subset::from_predicate(y.len(), |p| r[p]);
            let lhs = f.preimage(&y.ball(&u, -m));
            prop_assert!(lhs.is_subset(&f.preimage(&u).intersection(&g.preimage(&u))));
        }
    }

    #[test]
    fn retraction_properties(exps in proptest::collection::btree_set(0u32..14, 3..9), keep in proptest::collection::vec(any::<bool>(), 14)) {
        let pts: Vec<f64> = exps.iter().map(|&e| 2f64.powi(e as i32)).collect();
        let x = FiniteMetricSpace::from_points(pts.iter().map(|&p| vec![p]).collect(), 2.0, 0).unwrap();
        let mut a = Subset::from_predicate(x.len(), |i| keep[i]);
        a.insert(x.len() - 1);
        let scales: Vec<f64> = (0..8).map(|k| 4f64.powi(k + 1)).collect();
        let r = zero_dim_retraction(&x, &a, &scales).unwrap();
        for p in 0..x.len() {
            prop_assert!(a.contains(r.table[p]));
            prop_assert_eq!(r.table[r.table[p]], r.table[p]);
        }
        for p in a.iter() {
            prop_assert_eq!(r.table[p], p);
        }
    }
}
