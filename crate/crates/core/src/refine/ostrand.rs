//! Splitting a cover of multiplicity `n+1` into `n+1` disjoint subfamilies.
//!
//! With `f_s(x) = dist(x, X∖U_s)`, the piece indexed by a label set `T` is
//! `W_T = {x : min_{t∈T} f_t(x) > max_{s∉T} f_s(x)}` (max over nothing is 0).
//! At a point, `x ∈ W_T` exactly when `T` is the set of the `k` largest
//! values and the `k`-th value strictly exceeds the `(k+1)`-th, so every
//! covered point lies in at least one piece: the last strict drop to zero.
//!
//! Lebesgue bound. Fix `x`, let `L = L_𝒰(x)` and `ρ = L/(2n+2)`. Among the
//! sorted values `f_(1) = L ≥ … ≥ f_(n+1) ≥ f_(n+2) = 0` some consecutive gap
//! is at least `L/(n+1) = 2ρ`. If the gap sits after position `k`, the top-`k`
//! set `T` satisfies `min_T f − max_{∉T} f ≥ 2ρ` at `x`. Each `f_s` is
//! 1-Lipschitz, so for `d(x,y) < ρ` the difference stays `> 0` and `y ∈ W_T`.
//! Hence `B(x, ρ) ⊆ W_T` and `L_𝒱(x) ≥ ρ`.

use std::collections::BTreeSet;

use crate::cover::{complement_distances, local_lebesgue, max_multiplicity};
use crate::family::IndexedFamily;
use crate::metric::FiniteMetricSpace;
use crate::subset::Subset;

use super::certificate::{GuaranteeKind, RefinementCertificate};

#[derive(Clone, Debug)]
pub struct OstrandSplit {
    /// `families[i]` holds the pieces `W_T` with `|T| = i + 1`.
    pub families: Vec<IndexedFamily>,
    /// All pieces as one family.
    pub combined: IndexedFamily,
    /// Points lying in no piece (exactly the points no member covers).
    pub orphans: Vec<usize>,
    pub certificate: RefinementCertificate,
}

pub fn label_set_name(fam: &IndexedFamily, t: &[usize]) -> String {
    let names: Vec<&str> = t.iter().map(|&i| fam.label(i)).collect();
    format!("{{{}}}", names.join(","))
}

/// Label sets `T` (sorted label indices) with `x ∈ W_T`, given the values
/// `f_s(x)`.
pub fn pieces_at(values: &[f64]) -> Vec<Vec<usize>> {
    let mut order: Vec<usize> = (0..values.len()).filter(|&s| values[s] > 0.0).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    let mut out = Vec::new();
    for k in 1..=order.len() {
        let next = if k < order.len() { values[order[k]] } else { 0.0 };
        if values[order[k - 1]] > next {
            let mut t = order[..k].to_vec();
            t.sort_unstable();
            out.push(t);
        }
    }
    out
}

pub fn ostrand_split(space: &FiniteMetricSpace, u: &IndexedFamily) -> OstrandSplit {
    let n_pts = space.len();
    let f = complement_distances(space, u);
    let mult = max_multiplicity(u).max(1);

    let mut pieces: std::collections::BTreeMap<(usize, Vec<usize>), Subset> = Default::default();
    let mut orphans = Vec::new();
    for x in 0..n_pts {
        let values: Vec<f64> = f.iter().map(|row| row[x]).collect();
        let here = pieces_at(&values);
        if here.is_empty() {
            orphans.push(x);
        }
        for t in here {
            pieces.entry((t.len(), t)).or_insert_with(|| Subset::empty(n_pts)).insert(x);
        }
    }

    let mut families: Vec<IndexedFamily> = (0..mult).map(|_| IndexedFamily::empty(n_pts)).collect();
    let mut combined = IndexedFamily::empty(n_pts);
    for ((size, t), w) in &pieces {
        let name = label_set_name(u, t);
        families[size - 1].push(name.clone(), w.clone()).expect("label sets are distinct");
        combined.push(name, w.clone()).expect("label sets are distinct");
    }

    let mut cert = RefinementCertificate::new(GuaranteeKind::OstrandBound, u.fingerprint(), combined.fingerprint());
    let before = local_lebesgue(space, u);
    let after = local_lebesgue(space, &combined);
    let factor = 2.0 * mult as f64;
    let mut worst: Option<(usize, f64)> = None;
    for x in 0..n_pts {
        let slack = after[x] - before[x] / factor;
        if worst.is_none_or(|(_, s)| slack < s) {
            worst = Some((x, slack));
        }
    }
    if let Some((x, _)) = worst {
        cert.check_le(format!("L_U(x)/{factor} <= L_V(x) at every point"), before[x] / factor, after[x], Some(x));
    }
    for (i, fam) in families.iter().enumerate() {
        let bad = first_overlap(fam);
        cert.check(format!("pieces with |T| = {} are pairwise disjoint", i + 1), bad.is_none(), bad);
    }
    let mut refines = true;
    for ((_, t), w) in &pieces {
        refines &= t.iter().all(|&s| w.is_subset(u.set(s)));
    }
    cert.check("W_T is contained in U_t for every t in T", refines, None);
    let covered = u.union();
    cert.check("pieces cover every covered point", covered.is_subset(&combined.union()), None);
    let sizes: Vec<usize> = families.iter().map(IndexedFamily::len).collect();
    cert.note(format!("nonempty pieces per size: {sizes:?}; empty W_T are not listed"));
    if !orphans.is_empty() {
        cert.note(format!("points outside every member stay uncovered: {orphans:?}"));
    }
    OstrandSplit { families, combined, orphans, certificate: cert }
}

fn first_overlap(fam: &IndexedFamily) -> Option<usize> {
    let mut seen = Subset::empty(fam.universe());
    for s in fam.sets() {
        if let Some(x) = s.intersection(&seen).first() {
            return Some(x);
        }
        seen.union_with(s);
    }
    None
}

/// All label sets realized by some piece, for callers that want the index sets.
pub fn realized_label_sets(space: &FiniteMetricSpace, u: &IndexedFamily) -> BTreeSet<Vec<usize>> {
    let f = complement_distances(space, u);
    (0..space.len()).flat_map(|x| pieces_at(&f.iter().map(|r| r[x]).collect::<Vec<_>>())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(n: usize) -> FiniteMetricSpace {
        FiniteMetricSpace::from_fn_unchecked(n, 0, |i, j| (i as f64 - j as f64).abs())
    }

    #[test]
    fn line10_pieces() {
        let x = line(10);
        let u = IndexedFamily::from_lists(10, [("A", (0..6).collect::<Vec<_>>()), ("B", (3..10).collect())]).unwrap();
        let split = ostrand_split(&x, &u);
        assert_eq!(split.families.len(), 2);
        assert_eq!(split.combined.get("{A}").unwrap().to_vec(), vec![0, 1, 2, 3]);
        assert_eq!(split.combined.get("{B}").unwrap().to_vec(), vec![5, 6, 7, 8, 9]);
        assert_eq!(split.combined.get("{A,B}").unwrap().to_vec(), vec![3, 4, 5]);
        assert_eq!(split.families[1].len(), 1);
        assert!(x.point_ball(4, 0.5).is_subset(split.combined.get("{A,B}").unwrap()));
        assert!(split.certificate.verified());
        assert!(split.orphans.is_empty());
    }

    #[test]
    fn whole_space_cover() {
        let x = line(5);
        let u = IndexedFamily::from_lists(5, [("X", 0..5)]).unwrap();
        let split = ostrand_split(&x, &u);
        assert!(split.combined.get("{X}").unwrap().is_full());
        assert!(split.certificate.verified());
    }

    #[test]
    fn ties_are_not_orphaned() {
        assert_eq!(pieces_at(&[2.0, 2.0]), vec![vec![0, 1]]);
        assert_eq!(pieces_at(&[3.0, 1.0, 1.0]), vec![vec![0], vec![0, 1, 2]]);
        assert!(pieces_at(&[0.0, 0.0]).is_empty());
    }
}
