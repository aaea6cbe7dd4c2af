//! Starred-cube covers of ℝⁿ (n ≤ 3).
//!
//! Subdivide the unit-cube lattice barycentrically. Its vertices are the
//! points of `(½ℤ)ⁿ`; for a vertex `v` let `I` be its integer coordinates and
//! `H` its half-integer ones. The open star of `v` is
//! `{p : max_{i∈I} |p_i − v_i| + max_{i∈H} |p_i − v_i| < ½}` (max over nothing
//! is 0). The gauge on the left is Lipschitz with constant `c = √2` when both
//! `I` and `H` are nonempty and `c = 1` otherwise, and the distance from `p` to
//! the complement of the star is `(½ − gauge)/c`. A point lies in at most
//! `n + 1` stars, and the cover is invariant under reflection in integer
//! hyperplanes. Scaling by `M / k_n`, with `k_n` a lower bound for its
//! Lebesgue number, gives a cover of Lebesgue number at least `M`.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::family::IndexedFamily;
use crate::subset::Subset;

/// Lebesgue number of the unit star cover of ℝ (exact).
pub const STAR_LEBESGUE_1: f64 = 0.25;
/// Certified lower bound for ℝ². The infimum is `(2 − √2)/4 ≈ 0.1464466`;
/// [`star_lebesgue_lower_bound`]`(2, 2000)` certifies `0.14627`.
pub const STAR_LEBESGUE_2: f64 = 0.146;
/// Certified lower bound for ℝ³. A grid search puts the infimum near
/// `0.1060660`; [`star_lebesgue_lower_bound`]`(3, 100)` certifies `0.1017`.
pub const STAR_LEBESGUE_3: f64 = 0.1;

pub fn star_lebesgue_constant(n: usize) -> Result<f64> {
    match n {
        1 => Ok(STAR_LEBESGUE_1),
        2 => Ok(STAR_LEBESGUE_2),
        3 => Ok(STAR_LEBESGUE_3),
        _ => Err(Error::Parameter(format!("star covers are available for n = 1, 2, 3, not {n}"))),
    }
}

/// `dist(p, ℝⁿ ∖ star(v))` for the doubled vertex `v2 = 2v`; `0` outside the star.
pub fn star_depth(p: &[f64], v2: &[i64]) -> f64 {
    let (mut gi, mut gh) = (None::<f64>, None::<f64>);
    for (q, &w) in p.iter().zip(v2) {
        let dev = (q - w as f64 / 2.0).abs();
        let slot = if w.rem_euclid(2) == 0 { &mut gi } else { &mut gh };
        *slot = Some(slot.map_or(dev, |g| g.max(dev)));
    }
    let gauge = gi.unwrap_or(0.0) + gh.unwrap_or(0.0);
    let c = if gi.is_some() && gh.is_some() { std::f64::consts::SQRT_2 } else { 1.0 };
    ((0.5 - gauge) / c).max(0.0)
}

/// Doubled vertices whose open star contains `p`.
pub fn stars_containing(p: &[f64]) -> Vec<Vec<i64>> {
    let choices: Vec<Vec<i64>> = p
        .iter()
        .map(|q| {
            let lo = (2.0 * q).floor() as i64;
            let hi = (2.0 * q).ceil() as i64;
            if lo == hi {
                vec![lo]
            } else {
                vec![lo, hi]
            }
        })
        .collect();
    let mut out = vec![vec![]];
    for c in &choices {
        out = out
            .into_iter()
            .flat_map(|prefix: Vec<i64>| {
                c.iter().map(move |&w| {
                    let mut v = prefix.clone();
                    v.push(w);
                    v
                })
            })
            .collect();
    }
    out.retain(|v| star_depth(p, v) > 0.0);
    out
}

/// Lebesgue number of the unit star cover at `p`.
pub fn star_local_lebesgue(p: &[f64]) -> f64 {
    stars_containing(p).iter().map(|v| star_depth(p, v)).fold(0.0, f64::max)
}

/// Grid minimum of the local Lebesgue number over the fundamental domain
/// `[0, ½]ⁿ` minus the Lipschitz slack `h√n/2` (`h = 1/(2·steps)`), a
/// certified lower bound for the Lebesgue number of the unit star cover.
pub fn star_lebesgue_lower_bound(n: usize, steps: usize) -> f64 {
    let h = 0.5 / steps as f64;
    let mut idx = vec![0usize; n];
    let mut best = f64::INFINITY;
    loop {
        let p: Vec<f64> = idx.iter().map(|&i| i as f64 * h).collect();
        best = best.min(star_local_lebesgue(&p));
        let mut k = 0;
        loop {
            if k == n {
                return best - h * (n as f64).sqrt() / 2.0;
            }
            idx[k] += 1;
            if idx[k] <= steps {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

fn vertex_label(v2: &[i64]) -> String {
    let parts: Vec<String> = v2.iter().map(i64::to_string).collect();
    format!("v[{}]", parts.join(","))
}

/// Star cover of the sample `coords ⊂ ℝⁿ` scaled so that its Lebesgue number
/// in ℝⁿ is at least `m`. Labels `v[a,b,…]` name the doubled vertex in unit
/// coordinates; members are sorted by vertex.
pub fn star_cover(coords: &[Vec<f64>], m: f64) -> Result<IndexedFamily> {
    let n = coords.first().map_or(0, Vec::len);
    let k = star_lebesgue_constant(n)?;
    if !(m > 0.0) {
        return Err(Error::Parameter(format!("M = {m} must be positive")));
    }
    let scale = m / k;
    let mut members: BTreeMap<Vec<i64>, Subset> = BTreeMap::new();
    for (x, c) in coords.iter().enumerate() {
        let p: Vec<f64> = c.iter().map(|q| q / scale).collect();
        for v in stars_containing(&p) {
            members.entry(v).or_insert_with(|| Subset::empty(coords.len())).insert(x);
        }
    }
    IndexedFamily::new(coords.len(), members.into_iter().map(|(v, s)| (vertex_label(&v), s)).collect())
}
