//! Retraction of a space onto a subset through scale components.
//!
//! At stage `n` the `M_n`-scale components of `X` play the role of an
//! `M_n`-disjoint uniformly bounded cover. Every not-yet-captured point of a
//! component `U` meeting `A` is sent to `x_U`, the point of `U ∩ A` farthest
//! from the basepoint (lowest index on ties); points of `A` stay fixed.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::metric::FiniteMetricSpace;
use crate::refine::{GuaranteeKind, RefinementCertificate};
use crate::subset::Subset;

#[derive(Clone, Debug, Serialize)]
pub struct Retraction {
    pub table: Vec<usize>,
    /// Stage (1-based scale index) at which each point was captured; `0` on `A`.
    pub stage: Vec<usize>,
    /// Largest component diameter per scale.
    pub diameters: Vec<f64>,
    pub certificate: RefinementCertificate,
}

fn farthest_in(space: &FiniteMetricSpace, set: &Subset) -> Option<usize> {
    let mut best: Option<usize> = None;
    for x in set.iter() {
        if best.is_none_or(|b| space.depth(x) > space.depth(b)) {
            best = Some(x);
        }
    }
    best
}

pub fn zero_dim_retraction(space: &FiniteMetricSpace, a: &Subset, scales: &[f64]) -> Result<Retraction> {
    if a.is_empty() {
        return Err(Error::Parameter("the target subset is empty".into()));
    }
    if scales.is_empty() || scales.windows(2).any(|w| w[0] >= w[1]) || scales[0] <= 0.0 {
        return Err(Error::Parameter("scales must be positive and strictly increasing".into()));
    }
    let n = space.len();
    let mut table: Vec<Option<usize>> = (0..n).map(|x| a.contains(x).then_some(x)).collect();
    let mut stage = vec![0; n];
    let mut diameters = Vec::with_capacity(scales.len());
    for (k, &m) in scales.iter().enumerate() {
        let comps = space.m_scale_components(&space.all(), m);
        diameters.push(comps.iter().map(|c| space.diameter(c)).fold(0.0, f64::max));
        for c in comps {
            let Some(target) = farthest_in(space, &c.intersection(a)) else { continue };
            for x in c.iter() {
                if table[x].is_none() {
                    table[x] = Some(target);
                    stage[x] = k + 1;
                }
            }
        }
    }
    if let Some(x) = table.iter().position(Option::is_none) {
        return Err(Error::Uncaptured(x));
    }
    let table: Vec<usize> = table.into_iter().map(|t| t.expect("all captured")).collect();

    let mut output = crate::family::IndexedFamily::empty(n);
    output.push("image", Subset::from_indices(n, table.iter().copied()).expect("in range"))?;
    let mut cert = RefinementCertificate::new(GuaranteeKind::Retraction, space.fingerprint(), output.fingerprint());
    let moved = a.iter().find(|&x| table[x] != x);
    cert.check("r restricted to A is the identity", moved.is_none(), moved);
    let outside = (0..n).find(|&x| !a.contains(table[x]));
    cert.check("image lies in A", outside.is_none(), outside);
    let not_idem = (0..n).find(|&x| table[table[x]] != table[x]);
    cert.check("r o r = r", not_idem.is_none(), not_idem);
    for k in 0..scales.len().saturating_sub(2) {
        let (m, bound) = (scales[k], scales[k + 2]);
        let mut worst = 0.0f64;
        let mut witness = None;
        for x in 0..n {
            for y in x + 1..n {
                if space.d(x, y) < m {
                    let d = space.d(table[x], table[y]);
                    if d > worst {
                        worst = d;
                        witness = Some(x);
                    }
                }
            }
        }
        let name = format!("d(x,y) < M_{} implies d(r(x),r(y)) <= M_{}", k + 1, k + 3);
        // both images lie in the M_k-component of x and y, or coincide
        if diameters[k] <= bound {
            cert.check_le(name, worst, bound, witness);
        } else {
            cert.measure_le(name, worst, bound, witness);
        }
    }
    for (k, d) in diameters.iter().enumerate() {
        if let Some(next) = scales.get(k + 1) {
            cert.measure_le(format!("component diameter at M_{} < M_{}", k + 1, k + 2), *d, *next, None);
        }
    }
    Ok(Retraction { table, stage, diameters, certificate: cert })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn powers_of_three(k: u32) -> FiniteMetricSpace {
        FiniteMetricSpace::from_fn_unchecked(k as usize, 0, |i, j| (3f64.powi(i as i32) - 3f64.powi(j as i32)).abs())
    }

    #[test]
    fn five_powers() {
        let x = powers_of_three(5);
        let a = x.subset([0, 2, 4]).unwrap();
        let r = zero_dim_retraction(&x, &a, &[4.0, 20.0, 100.0]).unwrap();
        // 3 joins 1 at scale 4; 27 joins {1,3,9} at scale 20 (d(9,27) = 18)
        assert_eq!(r.table, vec![0, 0, 2, 2, 4]);
        assert_eq!(r.stage, vec![0, 1, 0, 2, 0]);
        assert!(r.certificate.checks.iter().filter(|c| c.guaranteed).all(|c| c.holds));
    }

    #[test]
    fn identity_on_full_subset() {
        let x = powers_of_three(6);
        let r = zero_dim_retraction(&x, &x.all(), &[1.0]).unwrap();
        assert_eq!(r.table, (0..6).collect::<Vec<_>>());
    }

    #[test]
    fn uncaptured_point() {
        let x = powers_of_three(5);
        let a = x.subset([0]).unwrap();
        assert_eq!(zero_dim_retraction(&x, &a, &[4.0]).unwrap_err(), Error::Uncaptured(2));
    }
}
