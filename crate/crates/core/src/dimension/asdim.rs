//! Dimension at a fixed scale: covers of mesh at most `D`, multiplicity at
//! most `n+1` and Lebesgue number at least `M`, and the function `d(M)`.
//!
//! If `𝒱` is such a cover, choose for each `x` a member containing `B(x,M)`;
//! the classes `C_s` of this choice partition `X` and `{B(C_s, M)}` is again
//! such a cover. So the exhaustive search runs over partitions of `X`, with
//! members `B(C, M)` and pruning on diameter and pointwise multiplicity, both
//! of which only grow as classes grow.

use serde::Serialize;

use crate::cover::{lebesgue_number, max_multiplicity, mesh};
use crate::error::Result;
use crate::family::IndexedFamily;
use crate::metric::FiniteMetricSpace;
use crate::subset::Subset;

use super::higher::{Bound, DEFAULT_EXACT_LIMIT};
use super::star::star_cover;

const SEARCH_BUDGET: u64 = 2_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    /// `M`-scale components (multiplicity one).
    Components,
    /// Exhaustive search over partitions.
    Exhaustive,
    /// Starred-cube cover restricted to an embedded sample.
    Star,
    /// Enlarged components of basepoint annuli (multiplicity two).
    Rings,
    /// Balls around a greedy net.
    NetBalls,
}

#[derive(Clone, Debug, Serialize)]
pub struct ScaleCover {
    pub family: IndexedFamily,
    pub strategy: Strategy,
    pub multiplicity: usize,
    #[serde(with = "crate::ext::real")]
    pub lebesgue: f64,
    pub mesh: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct AsdimAtScale {
    #[serde(with = "crate::ext::real")]
    pub m: f64,
    pub n: usize,
    pub mesh_bound: f64,
    /// `None` is NOT-FOUND; `bound` says whether that verdict is exhaustive.
    pub cover: Option<ScaleCover>,
    pub bound: Bound,
    pub nodes: u64,
}

/// Re-verifies a candidate against all three requirements.
pub fn verify_scale_cover(
    space: &FiniteMetricSpace,
    family: IndexedFamily,
    strategy: Strategy,
    m: f64,
    n: usize,
    mesh_bound: f64,
) -> Option<ScaleCover> {
    let multiplicity = max_multiplicity(&family);
    let lebesgue = lebesgue_number(space, &family, &space.all());
    let diam = mesh(space, &family);
    (multiplicity <= n + 1 && lebesgue >= m && diam <= mesh_bound).then_some(ScaleCover {
        family,
        strategy,
        multiplicity,
        lebesgue,
        mesh: diam,
    })
}

fn enlarged_family(space: &FiniteMetricSpace, prefix: &str, classes: &[Subset], m: f64) -> IndexedFamily {
    let members = classes.iter().enumerate().map(|(i, c)| (format!("{prefix}{i}"), space.ball(c, m))).collect();
    IndexedFamily::new(space.len(), members).expect("balls live in the space")
}

fn components_cover(space: &FiniteMetricSpace, m: f64) -> IndexedFamily {
    let comps = space.m_scale_components(&space.all(), m);
    let members = comps.into_iter().enumerate().map(|(i, c)| (format!("C{i}"), c)).collect();
    IndexedFamily::new(space.len(), members).expect("components live in the space")
}

fn rings_cover(space: &FiniteMetricSpace, m: f64, width: f64) -> IndexedFamily {
    let mut classes = Vec::new();
    let top = space.eccentricity(space.basepoint());
    let mut k = 0.0;
    while k * width <= top {
        let ring = Subset::from_predicate(space.len(), |x| {
            let d = space.depth(x);
            d >= k * width && d < (k + 1.0) * width
        });
        classes.extend(space.m_scale_components(&ring, 2.0 * m));
        k += 1.0;
    }
    enlarged_family(space, "R", &classes, m)
}

fn net_balls_cover(space: &FiniteMetricSpace, m: f64, mesh_bound: f64) -> Option<IndexedFamily> {
    let radius = mesh_bound / 2.0;
    let spacing = radius - m;
    if !(spacing > 0.0) {
        return None;
    }
    let mut centers: Vec<usize> = Vec::new();
    for x in 0..space.len() {
        if centers.iter().all(|&c| space.d(c, x) >= spacing) {
            centers.push(x);
        }
    }
    let members = centers.iter().enumerate().map(|(i, &c)| (format!("N{i}"), space.point_ball(c, radius))).collect();
    Some(IndexedFamily::new(space.len(), members).expect("balls live in the space"))
}

struct PartitionSearch<'a> {
    space: &'a FiniteMetricSpace,
    cap: usize,
    mesh_bound: f64,
    balls: Vec<Subset>,
    classes: Vec<Vec<usize>>,
    enlarged: Vec<Subset>,
    counts: Vec<usize>,
    nodes: u64,
}

impl PartitionSearch<'_> {
    /// `None` when the budget ran out.
    fn run(&mut self, x: usize) -> Option<bool> {
        self.nodes += 1;
        if self.nodes > SEARCH_BUDGET {
            return None;
        }
        if x == self.space.len() {
            return Some(true);
        }
        for c in 0..=self.classes.len() {
            let opening = c == self.classes.len();
            let old = if opening { self.space.none() } else { self.enlarged[c].clone() };
            let new = old.union(&self.balls[x]);
            let added = new.difference(&old);
            if added.iter().any(|p| self.counts[p] + 1 > self.cap) || self.space.diameter(&new) > self.mesh_bound {
                continue;
            }
            for p in added.iter() {
                self.counts[p] += 1;
            }
            if opening {
                self.classes.push(vec![x]);
                self.enlarged.push(new);
            } else {
                self.classes[c].push(x);
                self.enlarged[c] = new;
            }
            match self.run(x + 1) {
                Some(true) => return Some(true),
                None => return None,
                Some(false) => {}
            }
            for p in added.iter() {
                self.counts[p] -= 1;
            }
            if opening {
                self.classes.pop();
                self.enlarged.pop();
            } else {
                self.classes[c].pop();
                self.enlarged[c] = old;
            }
        }
        Some(false)
    }
}

/// Searches for a cover with mesh `≤ mesh_bound`, multiplicity `≤ n+1` and
/// Lebesgue number `≥ m`. Components settle `n = 0` exactly; otherwise the
/// constructive strategies run first and the exhaustive search is used for
/// `|X| ≤ limit`. Every returned cover has been re-verified.
pub fn asdim_at_scale(space: &FiniteMetricSpace, m: f64, n: usize, mesh_bound: f64, limit: usize) -> AsdimAtScale {
    let mut out = AsdimAtScale { m, n, mesh_bound, cover: None, bound: Bound::Exact, nodes: 0 };
    // every admissible cover holds each B(x, m) inside one member
    if (0..space.len()).any(|x| space.diameter(&space.point_ball(x, m)) > mesh_bound) {
        return out;
    }
    if let Some(c) = verify_scale_cover(space, components_cover(space, m), Strategy::Components, m, n, mesh_bound) {
        out.cover = Some(c);
        return out;
    }
    if n == 0 {
        // the components are the finest multiplicity-one cover with L >= m
        return out;
    }
    let mut candidates: Vec<(IndexedFamily, Strategy)> = Vec::new();
    if let Some(e) = space.embedding() {
        if e.p == 2.0 && (1..=3).contains(&e.dim()) && n >= e.dim() {
            if let Ok(f) = star_cover(&e.coords, m) {
                candidates.push((f, Strategy::Star));
            }
        }
    }
    let mut width = mesh_bound - 2.0 * m;
    while width >= 2.0 * m && width > 0.0 {
        candidates.push((rings_cover(space, m, width), Strategy::Rings));
        width /= 2.0;
    }
    if let Some(f) = net_balls_cover(space, m, mesh_bound) {
        candidates.push((f, Strategy::NetBalls));
    }
    for (family, strategy) in candidates {
        if let Some(c) = verify_scale_cover(space, family, strategy, m, n, mesh_bound) {
            out.cover = Some(c);
            return out;
        }
    }
    if space.len() > limit {
        out.bound = Bound::Heuristic;
        return out;
    }
    let mut search = PartitionSearch {
        space,
        cap: n + 1,
        mesh_bound,
        balls: (0..space.len()).map(|x| space.point_ball(x, m)).collect(),
        classes: Vec::new(),
        enlarged: Vec::new(),
        counts: vec![0; space.len()],
        nodes: 0,
    };
    let result = search.run(0);
    out.nodes = search.nodes;
    match result {
        Some(true) => {
            let classes: Vec<Subset> = search
                .classes
                .iter()
                .map(|c| Subset::from_indices(space.len(), c.iter().copied()).expect("indices in range"))
                .collect();
            let family = enlarged_family(space, "P", &classes, m);
            out.cover = verify_scale_cover(space, family, Strategy::Exhaustive, m, n, mesh_bound);
            if out.cover.is_none() {
                out.bound = Bound::Heuristic;
            }
        }
        Some(false) => {}
        None => out.bound = Bound::Heuristic,
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct DOfM {
    #[serde(with = "crate::ext::real")]
    pub m: f64,
    pub mesh_bound: f64,
    /// Least `n` for which a cover was found.
    pub d: Option<usize>,
    /// Every `n` below this value is excluded by exhaustive search.
    pub excluded_below: usize,
    /// `exact` when `d` equals `excluded_below`.
    pub bound: Bound,
    pub cover: Option<ScaleCover>,
}

/// `d(M)`: the least `n` with a cover found by [`asdim_at_scale`].
pub fn d_of_m(space: &FiniteMetricSpace, m: f64, mesh_bound: f64, limit: usize) -> DOfM {
    let mut excluded_below = 0;
    let mut exact_so_far = true;
    for n in 0..space.len().max(1) {
        let r = asdim_at_scale(space, m, n, mesh_bound, limit);
        if let Some(cover) = r.cover {
            let bound = if exact_so_far { Bound::Exact } else { Bound::Heuristic };
            return DOfM { m, mesh_bound, d: Some(n), excluded_below, bound, cover: Some(cover) };
        }
        if r.bound == Bound::Exact && exact_so_far {
            excluded_below = n + 1;
        } else {
            exact_so_far = false;
        }
    }
    let bound = if exact_so_far { Bound::Exact } else { Bound::Heuristic };
    DOfM { m, mesh_bound, d: None, excluded_below, bound, cover: None }
}

#[derive(Clone, Debug, Serialize)]
pub struct DimensionRow {
    #[serde(with = "crate::ext::real")]
    pub m: f64,
    pub mesh_bound: f64,
    pub d: Option<usize>,
    pub multiplicity: Option<usize>,
    /// `d(M)/M`, the slow-growth ratio.
    pub ratio: Option<f64>,
    pub excluded_below: usize,
    pub bound: Bound,
    pub strategy: Option<Strategy>,
    pub cover: Option<IndexedFamily>,
}

#[derive(Clone, Debug, Serialize)]
pub struct DimensionReport {
    pub space_id: String,
    pub rows: Vec<DimensionRow>,
}

/// `d(M)` over a grid of scales with `mesh_bound = factor · M`.
pub fn dimension_report(space: &FiniteMetricSpace, scales: &[f64], factor: f64, limit: usize) -> DimensionReport {
    let rows = scales
        .iter()
        .map(|&m| {
            let r = d_of_m(space, m, factor * m, limit);
            DimensionRow {
                m,
                mesh_bound: factor * m,
                d: r.d,
                multiplicity: r.cover.as_ref().map(|c| c.multiplicity),
                ratio: r.d.map(|d| d as f64 / m),
                excluded_below: r.excluded_below,
                bound: r.bound,
                strategy: r.cover.as_ref().map(|c| c.strategy),
                cover: r.cover.map(|c| c.family),
            }
        })
        .collect();
    DimensionReport { space_id: space.fingerprint(), rows }
}

/// Convenience wrapper with the default exact-search limit.
pub fn asdim_at_scale_default(space: &FiniteMetricSpace, m: f64, n: usize, mesh_bound: f64) -> AsdimAtScale {
    asdim_at_scale(space, m, n, mesh_bound, DEFAULT_EXACT_LIMIT)
}

#[derive(Clone, Debug, Serialize)]
pub struct ZeroRow {
    pub r: f64,
    pub components: usize,
    pub max_diameter: f64,
    /// Endpoints of a diameter of the widest component, with an `M`-chain.
    pub pair: Option<(usize, usize)>,
    pub chain: Option<Vec<usize>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ZeroWitness {
    #[serde(with = "crate::ext::real")]
    pub m: f64,
    pub rows: Vec<ZeroRow>,
}

impl ZeroWitness {
    /// `r ↦` widest `M`-component of `X ∖ B(x₀, r)`.
    pub fn diameter_profile(&self) -> Result<crate::ScaleProfile> {
        crate::ScaleProfile::new(self.rows.iter().map(|r| (r.r, r.max_diameter)).collect())
    }
}

/// `M`-scale components of `X ∖ B(x₀, r)` for each `r` in the basepoint
/// grid. `None` when no component is wider than the smallest positive
/// distance of the space (nothing to witness).
pub fn asdim_zero_witness(space: &FiniteMetricSpace, m: f64) -> Option<ZeroWitness> {
    let floor = space.min_positive_distance()?;
    let mut rows = Vec::new();
    for r in space.radius_grid() {
        let tail = space.outside_ball(r);
        let comps = space.m_scale_components(&tail, m);
        let mut widest: Option<(f64, usize, usize)> = None;
        for c in &comps {
            let pts = c.to_vec();
            for (k, &x) in pts.iter().enumerate() {
                for &y in &pts[k..] {
                    let d = space.d(x, y);
                    if widest.is_none_or(|(w, _, _)| d > w) {
                        widest = Some((d, x, y));
                    }
                }
            }
        }
        let (max_diameter, x, y) = widest.unwrap_or((0.0, 0, 0));
        let (pair, chain) =
            if max_diameter > 0.0 { (Some((x, y)), space.m_chain(&tail, m, x, y)) } else { (None, None) };
        rows.push(ZeroRow { r, components: comps.len(), max_diameter, pair, chain });
    }
    rows.iter().any(|r| r.max_diameter > floor).then_some(ZeroWitness { m, rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(n: usize) -> FiniteMetricSpace {
        FiniteMetricSpace::from_fn_unchecked(n, 0, |i, j| (i as f64 - j as f64).abs())
    }

    #[test]
    fn line100_dimension_one() {
        let x = line(100);
        let r = asdim_at_scale_default(&x, 5.0, 1, 40.0);
        let c = r.cover.expect("cover");
        assert!(c.multiplicity <= 2 && c.lebesgue >= 5.0 && c.mesh <= 40.0);
        let d = d_of_m(&x, 5.0, 40.0, DEFAULT_EXACT_LIMIT);
        assert_eq!((d.d, d.bound), (Some(1), Bound::Exact));
    }

    #[test]
    fn line10_not_found_exact() {
        let x = line(10);
        let r = asdim_at_scale_default(&x, 2.0, 0, 5.0);
        assert!(r.cover.is_none());
        assert_eq!(r.bound, Bound::Exact);
        let r1 = asdim_at_scale_default(&x, 2.0, 1, 5.0);
        assert!(r1.cover.is_some());
    }

    #[test]
    fn exhaustive_finds_what_constructions_miss() {
        // a 4-cycle of side 1: balls of radius 1.5 have diameter 2
        let x = FiniteMetricSpace::from_matrix(
            vec![
                vec![0.0, 1.0, 2.0, 1.0],
                vec![1.0, 0.0, 1.0, 2.0],
                vec![2.0, 1.0, 0.0, 1.0],
                vec![1.0, 2.0, 1.0, 0.0],
            ],
            0,
        )
        .unwrap();
        let r = asdim_at_scale_default(&x, 1.5, 1, 2.0);
        assert!(r.cover.is_some());
        let r = asdim_at_scale_default(&x, 1.5, 0, 1.0);
        assert!(r.cover.is_none() && r.bound == Bound::Exact);
    }

    #[test]
    fn zero_witness_line() {
        let x = line(100);
        let w = asdim_zero_witness(&x, 2.0).unwrap();
        for row in &w.rows {
            assert_eq!(row.max_diameter, 99.0 - row.r);
        }
        assert_eq!(w.rows[10].pair, Some((10, 99)));
        assert_eq!(w.rows[10].chain.as_ref().unwrap().len(), 90);
    }

    #[test]
    fn zero_witness_geometric() {
        let x = FiniteMetricSpace::from_fn_unchecked(10, 0, |i, j| (2f64.powi(i as i32) - 2f64.powi(j as i32)).abs());
        let w = asdim_zero_witness(&x, 3.0).unwrap();
        for row in w.rows.iter().filter(|r| r.r >= 4.0) {
            assert_eq!(row.max_diameter, 0.0);
        }
        assert_eq!(w.rows[0].max_diameter, 3.0);
    }
}
