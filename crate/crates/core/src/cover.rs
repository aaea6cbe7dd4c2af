//! Lebesgue numbers, multiplicity and coarseness profiles of labeled families.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::family::IndexedFamily;
use crate::metric::FiniteMetricSpace;
use crate::profile::{ProfileEntry, ScaleProfile, Tail};
use crate::subset::Subset;

/// `f_s(x) = dist(x, X∖U_s)` for every label (rows) and point (columns).
pub fn complement_distances(space: &FiniteMetricSpace, fam: &IndexedFamily) -> Vec<Vec<f64>> {
    fam.sets().iter().map(|s| space.complement_distances(s)).collect()
}

/// `L_𝒰(x) = max_s dist(x, X∖U_s)`; `+∞` where some member is all of X,
/// `0` for the empty family.
pub fn local_lebesgue(space: &FiniteMetricSpace, fam: &IndexedFamily) -> Vec<f64> {
    let f = complement_distances(space, fam);
    (0..space.len()).map(|x| f.iter().map(|row| row[x]).fold(0.0, f64::max)).collect()
}

/// Local Lebesgue numbers of `{U_s ∩ A}` computed in `A` as a metric
/// subspace; entries outside `A` are `0`.
pub fn local_lebesgue_within(space: &FiniteMetricSpace, fam: &IndexedFamily, a: &Subset) -> Vec<f64> {
    let mut out = vec![0.0; space.len()];
    for s in fam.sets() {
        let rest = a.difference(s);
        for x in a.iter().filter(|&x| s.contains(x)) {
            out[x] = f64::max(out[x], space.dist_to_set(x, &rest));
        }
    }
    out
}

/// `L(𝒰|_A, A)` in the subspace `A`; `+∞` for empty `A`.
pub fn lebesgue_within(space: &FiniteMetricSpace, fam: &IndexedFamily, a: &Subset) -> f64 {
    min_over(&local_lebesgue_within(space, fam, a), a)
}

/// `L(𝒰, A) = min_{x∈A} L_𝒰(x)`, `+∞` for empty `A`.
pub fn lebesgue_number(space: &FiniteMetricSpace, fam: &IndexedFamily, a: &Subset) -> f64 {
    min_over(&local_lebesgue(space, fam), a)
}

pub fn min_over(values: &[f64], a: &Subset) -> f64 {
    a.iter().map(|x| values[x]).fold(f64::INFINITY, f64::min)
}

/// `m_𝒰(x) = #{s : x ∈ U_s}`.
pub fn multiplicity(fam: &IndexedFamily) -> Vec<usize> {
    let mut m = vec![0; fam.universe()];
    for s in fam.sets() {
        for x in s.iter() {
            m[x] += 1;
        }
    }
    m
}

/// `max_{x∈A} m_𝒰(x)`, `0` for empty `A`.
pub fn global_multiplicity(fam: &IndexedFamily, a: &Subset) -> usize {
    let m = multiplicity(fam);
    a.iter().map(|x| m[x]).max().unwrap_or(0)
}

pub fn max_multiplicity(fam: &IndexedFamily) -> usize {
    multiplicity(fam).into_iter().max().unwrap_or(0)
}

/// Largest member diameter (`0` for the empty family).
pub fn mesh(space: &FiniteMetricSpace, fam: &IndexedFamily) -> f64 {
    fam.sets().iter().map(|s| space.diameter(s)).fold(0.0, f64::max)
}

/// `t ↦ L(𝒰, X∖B(x₀,t))` over the basepoint-distance grid; nondecreasing.
pub fn coarseness_profile(space: &FiniteMetricSpace, fam: &IndexedFamily) -> ScaleProfile {
    ScaleProfile::over_tails(space, &local_lebesgue(space, fam), Tail::Min)
}

/// Profile `r ↦ dist(A∖B(x₀,r), B∖B(x₀,r))` over the basepoint grid.
pub fn asymptotic_pair_profile(space: &FiniteMetricSpace, a: &Subset, b: &Subset) -> ScaleProfile {
    let grid = space.radius_grid();
    let slot = |x: usize| grid.binary_search_by(|g| g.total_cmp(&space.depth(x))).expect("depth is a grid value");
    // best[k]: smallest distance among pairs whose shallower point sits at grid[k]
    let mut best = vec![f64::INFINITY; grid.len()];
    for x in a.iter() {
        let sx = slot(x);
        for y in b.iter() {
            let k = sx.min(slot(y));
            let d = space.d(x, y);
            if d < best[k] {
                best[k] = d;
            }
        }
    }
    let mut acc = f64::INFINITY;
    let mut entries: Vec<ProfileEntry> = grid
        .iter()
        .zip(&best)
        .rev()
        .map(|(&t, &b)| {
            acc = acc.min(b);
            ProfileEntry { t, v: acc }
        })
        .collect();
    entries.reverse();
    ScaleProfile { entries }
}

#[derive(Clone, Debug, Serialize)]
pub struct PairProfile {
    pub first: String,
    pub second: String,
    pub profile: ScaleProfile,
}

#[derive(Clone, Debug, Serialize)]
pub struct FiniteFamilyDiagnostics {
    /// `d_𝒰(x) = Σ_s dist(x, X∖U_s)`.
    #[serde(with = "crate::ext::reals")]
    pub sum_distance: Vec<f64>,
    /// `t ↦ min d_𝒰` outside `B(x₀,t)`.
    pub sum_profile: ScaleProfile,
    /// For each label pair, the distance between the two complements, both
    /// truncated by the same radius.
    pub pair_profiles: Vec<PairProfile>,
    /// Points where `L_𝒰(x) ≤ d_𝒰(x) ≤ m·L_𝒰(x)` fails (`m` = number of labels).
    pub sandwich_violations: Vec<usize>,
}

pub fn finite_family_diagnostics(space: &FiniteMetricSpace, fam: &IndexedFamily) -> FiniteFamilyDiagnostics {
    let f = complement_distances(space, fam);
    let sum: Vec<f64> = (0..space.len()).map(|x| f.iter().map(|r| r[x]).sum()).collect();
    let local = local_lebesgue(space, fam);
    let m = fam.len() as f64;
    let sandwich_violations = (0..space.len()).filter(|&x| !(local[x] <= sum[x] && sum[x] <= m * local[x])).collect();
    let complements: Vec<Subset> = fam.sets().iter().map(Subset::complement).collect();
    let mut pair_profiles = Vec::new();
    for i in 0..fam.len() {
        for j in (i + 1)..fam.len() {
            pair_profiles.push(PairProfile {
                first: fam.label(i).to_string(),
                second: fam.label(j).to_string(),
                profile: asymptotic_pair_profile(space, &complements[i], &complements[j]),
            });
        }
    }
    FiniteFamilyDiagnostics {
        sum_profile: ScaleProfile::over_tails(space, &sum, Tail::Min),
        sum_distance: sum,
        pair_profiles,
        sandwich_violations,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SeparatorReport {
    pub disjoint: bool,
    pub separator_is_complement: bool,
    /// Coarseness profile of `{X∖A, W_A}`.
    pub profile_a: ScaleProfile,
    /// Coarseness profile of `{X∖B, W_B}`.
    pub profile_b: ScaleProfile,
    pub profile_a_nondecreasing: bool,
    pub profile_b_nondecreasing: bool,
}

/// Checks the shape of an asymptotic separator `C` between `A` and `B`.
/// The two profiles are reported; growth is for the caller to judge.
pub fn separator_check(
    space: &FiniteMetricSpace,
    a: &Subset,
    b: &Subset,
    c: &Subset,
    w_a: &Subset,
    w_b: &Subset,
) -> SeparatorReport {
    let n = space.len();
    let fam_a = IndexedFamily::new(n, vec![("X-A".into(), a.complement()), ("W_A".into(), w_a.clone())])
        .expect("two distinct labels");
    let fam_b = IndexedFamily::new(n, vec![("X-B".into(), b.complement()), ("W_B".into(), w_b.clone())])
        .expect("two distinct labels");
    let profile_a = coarseness_profile(space, &fam_a);
    let profile_b = coarseness_profile(space, &fam_b);
    SeparatorReport {
        disjoint: w_a.is_disjoint(w_b),
        separator_is_complement: *c == w_a.union(w_b).complement(),
        profile_a_nondecreasing: profile_a.is_nondecreasing(),
        profile_b_nondecreasing: profile_b.is_nondecreasing(),
        profile_a,
        profile_b,
    }
}

/// For each `V_t`, the first `U` label (in label order) containing it.
pub fn first_containers(u: &IndexedFamily, v: &IndexedFamily) -> Result<Vec<usize>> {
    v.iter()
        .map(|(label, vt)| {
            u.sets().iter().position(|us| vt.is_subset(us)).ok_or_else(|| Error::NotARefinement(label.to_string()))
        })
        .collect()
}

/// Converts a refinement `V` of `U` into a shrinking indexed by `U`'s labels:
/// `V'_s = ∪{V_t : φ(t) = s}` with `φ(t)` the first label containing `V_t`.
pub fn to_shrinking(u: &IndexedFamily, v: &IndexedFamily) -> Result<IndexedFamily> {
    let phi = first_containers(u, v)?;
    let mut sets = vec![Subset::empty(u.universe()); u.len()];
    for (t, &s) in phi.iter().enumerate() {
        sets[s].union_with(v.set(t));
    }
    IndexedFamily::new(u.universe(), u.labels().iter().cloned().zip(sets).collect())
}

/// Checks `V_s ⊆ U_s` label by label (same label order).
pub fn is_shrinking_of(v: &IndexedFamily, u: &IndexedFamily) -> bool {
    v.labels() == u.labels() && v.sets().iter().zip(u.sets()).all(|(a, b)| a.is_subset(b))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(n: usize) -> FiniteMetricSpace {
        FiniteMetricSpace::from_fn_unchecked(n, 0, |i, j| (i as f64 - j as f64).abs())
    }

    fn ab() -> IndexedFamily {
        IndexedFamily::from_lists(10, [("A", (0..6).collect::<Vec<_>>()), ("B", (3..10).collect())]).unwrap()
    }

    #[test]
    fn line10_lebesgue_and_multiplicity() {
        let x = line(10);
        let l = local_lebesgue(&x, &ab());
        assert_eq!(l[0], 6.0);
        assert_eq!(l[4], 2.0);
        assert_eq!(lebesgue_number(&x, &ab(), &x.all()), 2.0);
        assert_eq!(lebesgue_number(&x, &ab(), &x.none()), f64::INFINITY);
        let m = multiplicity(&ab());
        assert_eq!((m[4], m[0]), (2, 1));
        assert_eq!(max_multiplicity(&ab()), 2);
    }

    #[test]
    fn whole_space_member_gives_infinity() {
        let x = line(4);
        let f = IndexedFamily::from_lists(4, [("X", 0..4)]).unwrap();
        assert!(local_lebesgue(&x, &f).iter().all(|v| v.is_infinite()));
        assert!(coarseness_profile(&x, &f).entries.iter().all(|e| e.v.is_infinite()));
    }

    #[test]
    fn line10_profile_at_five() {
        let x = line(10);
        let p = coarseness_profile(&x, &ab());
        assert_eq!(p.len(), 10);
        assert_eq!(p.value_at(5.0), Some(3.0));
        assert!(p.is_nondecreasing());
    }

    #[test]
    fn diagnostics_line10() {
        let x = line(10);
        let d = finite_family_diagnostics(&x, &ab());
        assert_eq!(d.sum_distance[4], 4.0);
        assert!(d.sandwich_violations.is_empty());
        assert_eq!(d.pair_profiles.len(), 1);
    }

    #[test]
    fn parallel_rays() {
        let mut coords: Vec<Vec<f64>> = (0..10).map(|k| vec![k as f64, 0.0]).collect();
        coords.extend((0..10).map(|k| vec![k as f64, 3.0]));
        let x = FiniteMetricSpace::from_points(coords, 2.0, 0).unwrap();
        let a = x.subset(0..10).unwrap();
        let b = x.subset(10..20).unwrap();
        let p = asymptotic_pair_profile(&x, &a, &b);
        assert!(p.entries.iter().filter(|e| e.t <= 9.0).all(|e| e.v == 3.0));
        let same = asymptotic_pair_profile(&x, &a, &a);
        assert!(same.entries.iter().filter(|e| e.t <= 9.0).all(|e| e.v == 0.0));
    }

    #[test]
    fn shrinking_by_first_container() {
        let v = IndexedFamily::from_lists(10, [("p", vec![0, 1]), ("q", vec![4, 5]), ("r", vec![8, 9])]).unwrap();
        let s = to_shrinking(&ab(), &v).unwrap();
        assert_eq!(s.get("A").unwrap().to_vec(), vec![0, 1, 4, 5]);
        assert_eq!(s.get("B").unwrap().to_vec(), vec![8, 9]);
        assert_eq!(to_shrinking(&ab(), &ab()).unwrap(), ab());
        let bad = IndexedFamily::from_lists(10, [("bad", vec![2, 7])]).unwrap();
        assert_eq!(to_shrinking(&ab(), &bad).unwrap_err(), Error::NotARefinement("bad".into()));
    }
}
