//! Shrinkings that keep the index set: the paracompactness-style shrink and
//! the inward shrink `U ↦ B(U, −f(U))`.

use serde::Serialize;

use crate::cover::local_lebesgue;
use crate::error::{Error, Result};
use crate::family::IndexedFamily;
use crate::metric::FiniteMetricSpace;
use crate::profile::{tail_radius, ScaleProfile};
use crate::subset::Subset;

use super::certificate::{GuaranteeKind, RefinementCertificate};

#[derive(Clone, Debug, Serialize)]
pub struct ParacompactShrink {
    pub family: IndexedFamily,
    /// `f(x) = min(d(x₀,x)/2, L_𝒰(x)/2)`.
    #[serde(with = "crate::ext::reals")]
    pub radius: Vec<f64>,
    /// Label index chosen for each point; `None` for points outside every member.
    pub assignment: Vec<Option<usize>>,
    /// `M ↦` radius of the smallest basepoint ball outside which
    /// `B(x,M) ∩ V_s ≠ ∅ ⇒ B(x,M) ⊆ U_s` holds for all `s`.
    pub a_m: ScaleProfile,
    pub certificate: RefinementCertificate,
}

/// Powers of two from 1 up to the diameter.
pub fn default_probe_grid(space: &FiniteMetricSpace) -> Vec<f64> {
    let diam = space.diam().max(1.0);
    let mut out = vec![];
    let mut m = 1.0;
    while m <= diam {
        out.push(m);
        m *= 2.0;
    }
    out
}

/// `f(x) = min(d(x₀,x), L_𝒰(x))/2`, `s(x)` the first label with
/// `B(x, f(x)) ⊆ U_s` (radius 0 meaning `{x}`), `V_s = ∪{B(x, f(x)/2) : s(x) = s}`.
///
/// The certificate also checks a pointwise form of the ball property: `f` is
/// ½-Lipschitz, so if `y ∈ B(x,M) ∩ B(z, f(z)/2)` and `11M ≤ 2f(x)` then
/// `f(z) ≥ 4M` and `B(x,M) ⊆ B(z, f(z)) ⊆ U_{s(z)}`.
pub fn paracompact_shrink(
    space: &FiniteMetricSpace,
    u: &IndexedFamily,
    probes: Option<&[f64]>,
) -> Result<ParacompactShrink> {
    let n = space.len();
    let local = local_lebesgue(space, u);
    let radius: Vec<f64> = (0..n).map(|x| (space.depth(x) / 2.0).min(local[x] / 2.0)).collect();
    let mut sets = vec![Subset::empty(n); u.len()];
    let mut assignment = vec![None; n];
    for x in 0..n {
        let ball = space.point_ball(x, radius[x]);
        if let Some(s) = u.sets().iter().position(|us| ball.is_subset(us)) {
            assignment[x] = Some(s);
            sets[s].union_with(&space.point_ball(x, radius[x] / 2.0));
        }
    }
    let family = IndexedFamily::new(n, u.labels().iter().cloned().zip(sets).collect())?;

    let grid: Vec<f64> = match probes {
        Some(p) => p.to_vec(),
        None => default_probe_grid(space),
    };
    if grid.iter().any(|&m| !(m > 0.0)) || grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Parameter("probe scales must be positive and increasing".into()));
    }
    let mut rows = Vec::new();
    let mut lemma_ok = true;
    let mut lemma_witness = None;
    for &m in &grid {
        let ok: Vec<bool> = (0..n)
            .map(|x| {
                let ball = space.point_ball(x, m);
                family.sets().iter().zip(u.sets()).all(|(v, us)| !ball.intersects(v) || ball.is_subset(us))
            })
            .collect();
        for x in 0..n {
            if 11.0 * m <= 2.0 * radius[x] && !ok[x] {
                lemma_ok = false;
                lemma_witness = Some(x);
            }
        }
        rows.push((m, tail_radius(space, |x| ok[x])));
    }
    let a_m = ScaleProfile::new(rows)?;

    let mut cert = RefinementCertificate::new(GuaranteeKind::Paracompact, u.fingerprint(), family.fingerprint());
    let shrinks = family.sets().iter().zip(u.sets()).all(|(v, us)| v.is_subset(us));
    cert.check("V_s is contained in U_s", shrinks, None);
    let missed = u.union().difference(&family.union()).first();
    cert.check("V covers the points U covers", missed.is_none(), missed);
    cert.check("11M <= 2f(x) implies the ball property at x", lemma_ok, lemma_witness);
    cert.profiles.push(("A_M".into(), a_m.clone()));
    Ok(ParacompactShrink { family, radius, assignment, a_m, certificate: cert })
}

/// `f(U_s) = inf_{x∈U_s} L_𝒰(x)/4` and output members `B(U_s, −f(U_s))`;
/// members equal to X are returned unchanged.
pub fn inward_shrink(space: &FiniteMetricSpace, u: &IndexedFamily) -> Result<(IndexedFamily, RefinementCertificate)> {
    if let Some(label) = u.iter().find(|(_, s)| s.is_empty()).map(|(l, _)| l) {
        return Err(Error::InvalidFamily(format!("member `{label}` is empty")));
    }
    if let Some(x) = u.union().complement().first() {
        return Err(Error::Coverage(format!("point {x} lies in no member")));
    }
    let n = space.len();
    let local = local_lebesgue(space, u);
    let depth: Vec<f64> =
        u.sets().iter().map(|s| s.iter().map(|x| local[x] / 4.0).fold(f64::INFINITY, f64::min)).collect();
    let mut zero = Vec::new();
    let sets: Vec<Subset> = u
        .sets()
        .iter()
        .zip(&depth)
        .enumerate()
        .map(|(i, (s, &f))| {
            if f == 0.0 {
                zero.push(u.label(i).to_string());
            }
            if s.is_full() {
                s.clone()
            } else {
                space.ball(s, -f)
            }
        })
        .collect();
    let family = IndexedFamily::new(n, u.labels().iter().cloned().zip(sets).collect())?;

    let mut cert = RefinementCertificate::new(GuaranteeKind::Inward, u.fingerprint(), family.fingerprint());
    let mut contained = true;
    let mut witness = None;
    for (x, &l) in local.iter().enumerate() {
        let big = space.point_ball(x, l / 2.0);
        let s = u.sets().iter().position(|us| big.is_subset(us));
        let ok = s.is_some_and(|s| space.point_ball(x, l / 4.0).is_subset(family.set(s)));
        if !ok {
            contained = false;
            witness = Some(x);
        }
    }
    cert.check("B(x, L(x)/4) lies in the shrunk member of its first L/2-container", contained, witness);
    cert.check("output is a shrinking", family.sets().iter().zip(u.sets()).all(|(v, us)| v.is_subset(us)), None);
    cert.check("output covers X", family.is_cover(), family.union().complement().first());
    if !zero.is_empty() {
        cert.note(format!("labels with f = 0 are returned unshrunk: {}", zero.join(", ")));
    }
    Ok((family, cert))
}
