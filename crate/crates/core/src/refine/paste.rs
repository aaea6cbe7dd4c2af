//! Pasting a sequence of covers at growing scales along annuli around the
//! basepoint into one shrinking of a given family.
//!
//! Inputs are covers `V¹ … V^K` and scales `M₀ < M₁ < … < M_K`. Annulus
//! `A_k = {M_k ≤ d(x₀,x) < M_{k+1}}` for `k < K` and `A_K = {d ≥ M_K}`. On
//! `A_k` the pieces come from `V^{k−1}` (from `V¹` on `A₁`): a member of
//! `V^{k−1}` meeting `A_k` has diameter `< M_{k−1}` and so sits in a ball
//! `B(x, M_{k−1})` with `d(x₀,x) ≥ M_k`, which lies in some `U_s`.
//!
//! Chains follow `t ↦ j(t)`, the first member of the next cover containing
//! `V_t` (it exists: `L(V^{k+1}) ≥ M_k` exceeds the diameter of `V_t`). The
//! label `α(t)` is the first `U` label containing the latest chain element
//! that fits in some member of `U`. Since the chain elements are nested, the
//! piece `V_t ∩ A_k` lies in `U_{α(t)}`.

use crate::cover::{lebesgue_number, max_multiplicity, mesh};
use crate::error::{Error, Result};
use crate::family::IndexedFamily;
use crate::metric::FiniteMetricSpace;
use crate::subset::Subset;

use super::certificate::{GuaranteeKind, RefinementCertificate};

#[derive(Clone, Debug)]
pub struct Pasted {
    pub family: IndexedFamily,
    /// `alpha[k][t]`: label index assigned to member `t` of `V^{k+1}`.
    pub alpha: Vec<Vec<Option<usize>>>,
    pub certificate: RefinementCertificate,
}

fn precondition(clause: char, detail: String) -> Error {
    Error::Precondition(format!("clause ({clause}) fails: {detail}"))
}

pub fn annulus_paste(
    space: &FiniteMetricSpace,
    u: &IndexedFamily,
    covers: &[IndexedFamily],
    scales: &[f64],
) -> Result<Pasted> {
    let k_max = covers.len();
    if k_max == 0 {
        return Err(Error::Parameter("at least one cover is required".into()));
    }
    if scales.len() != k_max + 1 {
        return Err(Error::Parameter(format!(
            "{} covers need {} scales M_0..M_K, got {}",
            k_max,
            k_max + 1,
            scales.len()
        )));
    }
    let n = space.len();
    for k in 1..=k_max {
        let v = &covers[k - 1];
        let l = lebesgue_number(space, v, &space.all());
        if l < scales[k - 1] {
            return Err(precondition('a', format!("L(V^{k}, X) = {l} < M_{} = {}", k - 1, scales[k - 1])));
        }
        let mesh_k = mesh(space, v);
        if mesh_k >= scales[k] {
            return Err(precondition('b', format!("mesh(V^{k}) = {mesh_k} >= M_{k} = {}", scales[k])));
        }
        for x in 0..n {
            if space.depth(x) >= scales[k] {
                let ball = space.point_ball(x, scales[k - 1]);
                if !u.sets().iter().any(|us| ball.is_subset(us)) {
                    return Err(precondition(
                        'c',
                        format!("at k = {k}, B({x}, M_{} = {}) lies in no member of U", k - 1, scales[k - 1]),
                    ));
                }
            }
        }
    }
    for k in 0..k_max {
        if scales[k + 1] <= 2.0 * scales[k] {
            return Err(precondition('d', format!("M_{} = {} <= 2 M_{k} = {}", k + 1, scales[k + 1], 2.0 * scales[k])));
        }
    }

    // chain maps j_k : V^k -> V^{k+1}, stored 0-based
    let mut next: Vec<Vec<usize>> = Vec::new();
    for k in 0..k_max.saturating_sub(1) {
        let here = &covers[k];
        let there = &covers[k + 1];
        let mut map = Vec::with_capacity(here.len());
        for (label, set) in here.iter() {
            let j = there.sets().iter().position(|w| set.is_subset(w)).ok_or_else(|| {
                Error::Certificate(format!("member `{label}` of V^{} has no container in V^{}", k + 1, k + 2))
            })?;
            map.push(j);
        }
        next.push(map);
    }
    let container = |set: &Subset| u.sets().iter().position(|us| set.is_subset(us));
    let alpha: Vec<Vec<Option<usize>>> = (0..k_max)
        .map(|k| {
            (0..covers[k].len())
                .map(|t| {
                    let mut best = container(covers[k].set(t));
                    let (mut level, mut idx) = (k, t);
                    while level + 1 < k_max {
                        idx = next[level][idx];
                        level += 1;
                        if let Some(s) = container(covers[level].set(idx)) {
                            best = Some(s);
                        }
                    }
                    best
                })
                .collect()
        })
        .collect();

    let annulus = |k: usize| -> Subset {
        Subset::from_predicate(n, |x| {
            let d = space.depth(x);
            d >= scales[k] && (k == k_max || d < scales[k + 1])
        })
    };
    let mut sets = vec![Subset::empty(n); u.len()];
    for k in 1..=k_max {
        let source = k.saturating_sub(1).max(1) - 1;
        let ring = annulus(k);
        for (t, vt) in covers[source].sets().iter().enumerate() {
            if let Some(s) = alpha[source][t] {
                sets[s].union_with(&vt.intersection(&ring));
            }
        }
    }
    let family = IndexedFamily::new(n, u.labels().iter().cloned().zip(sets).collect())?;

    let mut cert = RefinementCertificate::new(GuaranteeKind::Paste, u.fingerprint(), family.fingerprint());
    let max_v = covers.iter().map(max_multiplicity).max().unwrap_or(0);
    cert.check_le("m(W) <= max_k m(V^k)", max_multiplicity(&family) as f64, max_v as f64, None);
    cert.check("W_s is contained in U_s", family.sets().iter().zip(u.sets()).all(|(w, us)| w.is_subset(us)), None);
    let mut ball_ok = true;
    let mut witness = None;
    let mut checked = 0usize;
    for k in 4..=k_max {
        for x in annulus(k).iter() {
            checked += 1;
            let ball = space.point_ball(x, scales[k - 3]);
            if !family.sets().iter().any(|w| ball.is_subset(w)) {
                ball_ok = false;
                witness = Some(x);
            }
        }
    }
    cert.check("B(x, M_{k-3}) lies in some W_s for x in A_k, k >= 4", ball_ok, witness);
    let outer = Subset::from_predicate(n, |x| space.depth(x) >= scales[1]);
    let missed = outer.difference(&family.union());
    cert.note(format!(
        "{checked} points checked for the ball property; {} points with d >= M_1 left uncovered",
        missed.len()
    ));
    Ok(Pasted { family, alpha, certificate: cert })
}
