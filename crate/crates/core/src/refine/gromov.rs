//! Turning a cover with a large Lebesgue number into `n+1` families, each
//! `N`-disjoint, whose union still has Lebesgue number `M`.

use crate::cover::{lebesgue_number, max_multiplicity};
use crate::error::{Error, Result};
use crate::family::IndexedFamily;
use crate::metric::FiniteMetricSpace;

use super::certificate::{GuaranteeKind, RefinementCertificate};
use super::ostrand::ostrand_split;

#[derive(Clone, Debug)]
pub struct Disjointified {
    pub families: Vec<IndexedFamily>,
    pub combined: IndexedFamily,
    pub certificate: RefinementCertificate,
}

/// Runs the Ostrand split and erodes every piece by `N`. Requires
/// `L(𝒰, X) ≥ 2(n+1)(M+N)` with `n+1` the multiplicity of `𝒰`.
///
/// A point `x` has `L_𝒱(x) ≥ M+N` after the split, so some piece `W` has
/// `dist(x, X∖W) ≥ M+N` and `B(x, M) ⊆ B(W, −N)`. Two eroded pieces of the
/// same size come from disjoint `W`s, so their points are more than `N` apart.
pub fn gromov_disjointify(space: &FiniteMetricSpace, u: &IndexedFamily, m: f64, n: f64) -> Result<Disjointified> {
    if !(m > 0.0) || !(n >= 0.0) {
        return Err(Error::Parameter(format!("need M > 0 and N >= 0, got M = {m}, N = {n}")));
    }
    let mult = max_multiplicity(u).max(1) as f64;
    let lebesgue = lebesgue_number(space, u, &space.all());
    let need = 2.0 * mult * (m + n);
    if lebesgue < need {
        return Err(Error::Precondition(format!(
            "Lebesgue number L(U,X) = {lebesgue} < 2(n+1)(M+N) = 2*{mult}*{} = {need}",
            m + n
        )));
    }
    let split = ostrand_split(space, u);
    let families: Vec<IndexedFamily> = split.families.iter().map(|f| f.map_sets(|w| space.ball(w, -n))).collect();
    let mut combined = IndexedFamily::empty(space.len());
    for f in &families {
        for (label, set) in f.iter() {
            combined.push(label, set.clone())?;
        }
    }

    let mut cert = RefinementCertificate::new(GuaranteeKind::Gromov, u.fingerprint(), combined.fingerprint());
    for (i, fam) in families.iter().enumerate() {
        let mut closest = f64::INFINITY;
        let mut witness = None;
        for a in 0..fam.len() {
            for b in (a + 1)..fam.len() {
                let d = space.set_distance(fam.set(a), fam.set(b));
                if d < closest {
                    closest = d;
                    witness = fam.set(a).first();
                }
            }
        }
        cert.check_le(format!("family {} is N-disjoint", i + 1), n, closest, witness);
    }
    let after = lebesgue_number(space, &combined, &space.all());
    cert.check_le("L(union, X) >= M", m, after, None);
    let uncovered = combined.union().complement();
    cert.note(match uncovered.first() {
        None => "the union covers X".to_string(),
        Some(_) => format!("the union leaves {} points uncovered", uncovered.len()),
    });
    Ok(Disjointified { families, combined, certificate: cert })
}
