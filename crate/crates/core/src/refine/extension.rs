//! Extending a family on a subset to the whole space, and merging two
//! families living on pieces of a union.

use crate::cover::{lebesgue_number, max_multiplicity};
use crate::error::{Error, Result};
use crate::family::IndexedFamily;
use crate::metric::FiniteMetricSpace;
use crate::subset::Subset;

use super::certificate::{GuaranteeKind, RefinementCertificate};

/// `e(V_s) = {x : dist(x, V_s) < r_s and dist(x, V_s) < dist(x, A∖V_s)}`
/// (`r_s = ∞` when no radii are given). If `x ∈ e(V_s)` then every nearest
/// point of `A` to `x` lies in `V_s`, so labels meeting at `x` meet in `A`.
pub fn subset_cover_extension(
    space: &FiniteMetricSpace,
    a: &Subset,
    v: &IndexedFamily,
    radii: Option<&[f64]>,
) -> Result<(IndexedFamily, RefinementCertificate)> {
    if let Some((label, _)) = v.iter().find(|(_, s)| !s.is_subset(a)) {
        return Err(Error::InvalidFamily(format!("member `{label}` is not contained in A")));
    }
    if let Some(r) = radii {
        if r.len() != v.len() {
            return Err(Error::Parameter(format!("{} radii for {} labels", r.len(), v.len())));
        }
    }
    let n = space.len();
    let sets: Vec<Subset> = v
        .sets()
        .iter()
        .enumerate()
        .map(|(i, vs)| {
            let r = radii.map_or(f64::INFINITY, |r| r[i]);
            let rest = a.difference(vs);
            Subset::from_predicate(n, |x| {
                let d = space.dist_to_set(x, vs);
                d < r && d < space.dist_to_set(x, &rest)
            })
        })
        .collect();
    let out = IndexedFamily::new(n, v.labels().iter().cloned().zip(sets).collect())?;

    let mut cert = RefinementCertificate::new(GuaranteeKind::Extension, v.fingerprint(), out.fingerprint());
    let mut nerve_ok = true;
    let mut witness = None;
    for x in 0..n {
        let here = out.containing(x);
        if here.is_empty() {
            continue;
        }
        let mut meet = a.clone();
        for &s in &here {
            meet = meet.intersection(v.set(s));
        }
        if meet.is_empty() {
            nerve_ok = false;
            witness = Some(x);
        }
    }
    cert.check("labels meeting in e(V) meet in V", nerve_ok, witness);
    cert.check_le(
        "multiplicity of e(V) <= multiplicity of V",
        max_multiplicity(&out) as f64,
        max_multiplicity(v) as f64,
        None,
    );
    let kept = out.sets().iter().zip(v.sets()).filter(|(e, vs)| vs.is_subset(e)).count();
    cert.measure_le("members with V_s inside e(V_s)", v.len() as f64, kept as f64, None);
    Ok((out, cert))
}

/// `{B(U, M) : U ∈ 𝒰_A ⊔ 𝒰_B}` with labels prefixed `A:` and `B:`.
/// When the two families cover `A` and `B`, every point of `X = A ∪ B` sits in
/// some `U` and `B(x, M) ⊆ B(U, M)`, so the Lebesgue number is at least `M`.
pub fn union_merge(
    space: &FiniteMetricSpace,
    a: &Subset,
    u_a: &IndexedFamily,
    b: &Subset,
    u_b: &IndexedFamily,
    m: f64,
) -> Result<(IndexedFamily, RefinementCertificate)> {
    if !(m >= 0.0) {
        return Err(Error::Parameter(format!("M = {m} must be nonnegative")));
    }
    if let Some(x) = a.union(b).complement().first() {
        return Err(Error::Coverage(format!("point {x} lies in neither A nor B")));
    }
    for (name, set, fam) in [("A", a, u_a), ("B", b, u_b)] {
        if let Some((label, _)) = fam.iter().find(|(_, s)| !s.is_subset(set)) {
            return Err(Error::InvalidFamily(format!("member `{label}` is not contained in {name}")));
        }
    }
    let mut out = IndexedFamily::empty(space.len());
    for (prefix, fam) in [("A", u_a), ("B", u_b)] {
        for (label, set) in fam.iter() {
            out.push(format!("{prefix}:{label}"), space.ball(set, m))?;
        }
    }
    let mut cert = RefinementCertificate::new(GuaranteeKind::Merge, u_a.fingerprint(), out.fingerprint());
    cert.note(format!("second input family {}", u_b.fingerprint()));
    cert.measure_le(
        "multiplicity <= m(U_A) + m(U_B)",
        max_multiplicity(&out) as f64,
        (max_multiplicity(u_a) + max_multiplicity(u_b)) as f64,
        None,
    );
    let both_cover = u_a.covers(a) && u_b.covers(b);
    let lebesgue = lebesgue_number(space, &out, &space.all());
    if both_cover {
        cert.check_le("L(V, X) >= M", m, lebesgue, None);
    } else {
        cert.measure_le("L(V, X) >= M (inputs do not cover A and B)", m, lebesgue, None);
    }
    Ok((out, cert))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(n: usize) -> FiniteMetricSpace {
        FiniteMetricSpace::from_fn_unchecked(n, 0, |i, j| (i as f64 - j as f64).abs())
    }

    #[test]
    fn evens_extension() {
        let x = line(10);
        let a = x.subset([0, 2, 4, 6, 8]).unwrap();
        let v = IndexedFamily::from_lists(10, [("V1", vec![0, 2, 4]), ("V2", vec![6, 8])]).unwrap();
        let (e, cert) = subset_cover_extension(&x, &a, &v, None).unwrap();
        assert_eq!(e.set(0).to_vec(), vec![0, 1, 2, 3, 4]);
        assert_eq!(e.set(1).to_vec(), vec![6, 7, 8, 9]);
        assert!(cert.verified());
        assert_eq!(max_multiplicity(&e), 1);
    }

    #[test]
    fn merge_evens_odds() {
        let x = line(10);
        let a = x.subset([0, 2, 4, 6, 8]).unwrap();
        let b = x.subset([1, 3, 5, 7, 9]).unwrap();
        let ua = IndexedFamily::from_lists(10, [("p", vec![0, 2, 4]), ("q", vec![6, 8])]).unwrap();
        let ub = IndexedFamily::from_lists(10, [("p", vec![1, 3, 5]), ("q", vec![7, 9])]).unwrap();
        let (v, cert) = union_merge(&x, &a, &ua, &b, &ub, 1.0).unwrap();
        assert!(v.is_cover());
        assert!(cert.verified());
        assert!(lebesgue_number(&x, &v, &x.all()) >= 1.0);
        let (same, _) = union_merge(&x, &a, &ua, &b, &ub, 0.0).unwrap();
        assert_eq!(same.set(0), ua.set(0));
        assert!(matches!(union_merge(&x, &a, &ua, &a, &ua, 1.0), Err(Error::Coverage(_))));
    }
}
