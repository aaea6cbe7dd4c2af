//! Finite metric spaces and the set-level distance machinery built on them.
//!
//! Distances are `f64`; `f64::INFINITY` stands for +∞ and follows the
//! convention `dist(x, ∅) = +∞`. Balls are open. `ball(A, 0)` is `A` itself,
//! which in particular makes the radius-0 ball around a point that point.

use petgraph::unionfind::UnionFind;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::subset::Subset;

/// Where a space's distances come from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum MetricSpec {
    /// Row-major distance matrix.
    Matrix { rows: Vec<Vec<f64>> },
    /// Points of ℝ^d with the p-norm distance.
    Euclidean {
        coords: Vec<Vec<f64>>,
        #[serde(default = "default_p")]
        p: f64,
    },
    /// Weighted undirected edge list `[u, v, w]`; geodesic distance.
    Graph { edges: Vec<(usize, usize, f64)> },
}

fn default_p() -> f64 {
    2.0
}

/// The space JSON document.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpaceSpec {
    pub points: usize,
    pub metric: MetricSpec,
    #[serde(default)]
    pub basepoint: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Embedding {
    pub coords: Vec<Vec<f64>>,
    pub p: f64,
}

impl Embedding {
    pub fn dim(&self) -> usize {
        self.coords.first().map_or(0, Vec::len)
    }
}

/// A validated finite metric space with a basepoint.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteMetricSpace {
    n: usize,
    dist: Vec<f64>,
    basepoint: usize,
    embedding: Option<Embedding>,
}

pub fn build_space(spec: &SpaceSpec) -> Result<FiniteMetricSpace> {
    let space = match &spec.metric {
        MetricSpec::Matrix { rows } => FiniteMetricSpace::from_matrix(rows.clone(), spec.basepoint)?,
        MetricSpec::Euclidean { coords, p } => FiniteMetricSpace::from_points(coords.clone(), *p, spec.basepoint)?,
        MetricSpec::Graph { edges } => FiniteMetricSpace::from_graph(spec.points, edges, spec.basepoint)?,
    };
    if space.len() != spec.points {
        return Err(Error::InvalidSpace(format!(
            "declared {} points but metric describes {}",
            spec.points,
            space.len()
        )));
    }
    Ok(space)
}

fn p_distance(a: &[f64], b: &[f64], p: f64) -> f64 {
    if p.is_infinite() {
        a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
    } else if p == 1.0 {
        a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
    } else if p == 2.0 {
        a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
    } else {
        a.iter().zip(b).map(|(x, y)| (x - y).abs().powf(p)).sum::<f64>().powf(1.0 / p)
    }
}

impl FiniteMetricSpace {
    /// Validates symmetry, zero diagonal, nonnegativity and the triangle
    /// inequality (exact comparisons).
    pub fn from_matrix(rows: Vec<Vec<f64>>, basepoint: usize) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::InvalidSpace("empty space".into()));
        }
        let mut dist = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidSpace(format!("row {i} has {} entries, expected {n}", row.len())));
            }
            dist.extend_from_slice(row);
        }
        for i in 0..n {
            if dist[i * n + i] != 0.0 {
                return Err(Error::InvalidSpace(format!("d({i},{i}) = {} is not zero", dist[i * n + i])));
            }
            for j in 0..n {
                let v = dist[i * n + j];
                if !(v >= 0.0) || v.is_infinite() {
                    return Err(Error::InvalidSpace(format!("d({i},{j}) = {v} is not a finite nonnegative real")));
                }
                if v != dist[j * n + i] {
                    return Err(Error::Asymmetric { i, j, dij: v, dji: dist[j * n + i] });
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                let dij = dist[i * n + j];
                for k in 0..n {
                    let sum = dij + dist[j * n + k];
                    let dik = dist[i * n + k];
                    if dik > sum {
                        return Err(Error::TriangleViolation { i, j, k, dik, sum });
                    }
                }
            }
        }
        Self::checked_basepoint(n, basepoint)?;
        Ok(FiniteMetricSpace { n, dist, basepoint, embedding: None })
    }

    /// Points of ℝ^d under the p-norm (p ≥ 1, `f64::INFINITY` allowed).
    pub fn from_points(coords: Vec<Vec<f64>>, p: f64, basepoint: usize) -> Result<Self> {
        let n = coords.len();
        if n == 0 {
            return Err(Error::InvalidSpace("empty space".into()));
        }
        if !(p >= 1.0) {
            return Err(Error::InvalidSpace(format!("p = {p} is not a norm exponent")));
        }
        let d = coords[0].len();
        if let Some(i) = coords.iter().position(|c| c.len() != d || c.iter().any(|x| !x.is_finite())) {
            return Err(Error::InvalidSpace(format!("coordinate row {i} is malformed")));
        }
        Self::checked_basepoint(n, basepoint)?;
        let mut dist = vec![0.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let v = p_distance(&coords[i], &coords[j], p);
                dist[i * n + j] = v;
                dist[j * n + i] = v;
            }
        }
        Ok(FiniteMetricSpace { n, dist, basepoint, embedding: Some(Embedding { coords, p }) })
    }

    /// Geodesic metric of a connected graph with positive edge weights.
    pub fn from_graph(n: usize, edges: &[(usize, usize, f64)], basepoint: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidSpace("empty space".into()));
        }
        let mut dist = vec![f64::INFINITY; n * n];
        for i in 0..n {
            dist[i * n + i] = 0.0;
        }
        for &(u, v, w) in edges {
            if u >= n || v >= n {
                return Err(Error::InvalidSpace(format!("edge ({u},{v}) out of range")));
            }
            if !(w > 0.0) || w.is_infinite() {
                return Err(Error::InvalidSpace(format!("edge ({u},{v}) has non-positive weight {w}")));
            }
            if u != v && w < dist[u * n + v] {
                dist[u * n + v] = w;
                dist[v * n + u] = w;
            }
        }
        for k in 0..n {
            for i in 0..n {
                let dik = dist[i * n + k];
                if dik.is_infinite() {
                    continue;
                }
                for j in 0..n {
                    let via = dik + dist[k * n + j];
                    if via < dist[i * n + j] {
                        dist[i * n + j] = via;
                    }
                }
            }
        }
        if let Some(j) = (0..n).find(|&j| dist[j].is_infinite()) {
            return Err(Error::Disconnected(j));
        }
        Self::checked_basepoint(n, basepoint)?;
        Ok(FiniteMetricSpace { n, dist, basepoint, embedding: None })
    }

    /// Builds a space from a distance function without validating the metric
    /// axioms; the caller guarantees them (generators use this for metrics
    /// that are metrics by construction).
    pub fn from_fn_unchecked(n: usize, basepoint: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut dist = vec![0.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let v = f(i, j);
                dist[i * n + j] = v;
                dist[j * n + i] = v;
            }
        }
        assert!(basepoint < n.max(1));
        FiniteMetricSpace { n, dist, basepoint, embedding: None }
    }

    fn checked_basepoint(n: usize, basepoint: usize) -> Result<()> {
        if basepoint >= n {
            return Err(Error::InvalidSpace(format!("basepoint {basepoint} out of range for {n} points")));
        }
        Ok(())
    }

    pub fn to_spec(&self) -> SpaceSpec {
        let metric = match &self.embedding {
            Some(e) => MetricSpec::Euclidean { coords: e.coords.clone(), p: e.p },
            None => MetricSpec::Matrix {
                rows: (0..self.n).map(|i| self.dist[i * self.n..(i + 1) * self.n].to_vec()).collect(),
            },
        };
        SpaceSpec { points: self.n, metric, basepoint: self.basepoint }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn d(&self, i: usize, j: usize) -> f64 {
        self.dist[i * self.n + j]
    }

    pub fn basepoint(&self) -> usize {
        self.basepoint
    }

    pub fn with_basepoint(mut self, basepoint: usize) -> Result<Self> {
        Self::checked_basepoint(self.n, basepoint)?;
        self.basepoint = basepoint;
        Ok(self)
    }

    pub fn embedding(&self) -> Option<&Embedding> {
        self.embedding.as_ref()
    }

    pub fn all(&self) -> Subset {
        Subset::full(self.n)
    }

    pub fn none(&self) -> Subset {
        Subset::empty(self.n)
    }

    /// Subset from indices, validated against this space.
    pub fn subset<I: IntoIterator<Item = usize>>(&self, indices: I) -> Result<Subset> {
        Subset::from_indices(self.n, indices)
            .ok_or_else(|| Error::InvalidFamily(format!("index out of range for {} points", self.n)))
    }

    /// Same points with every distance multiplied by `lambda > 0`.
    pub fn scaled(&self, lambda: f64) -> Self {
        assert!(lambda > 0.0);
        FiniteMetricSpace {
            n: self.n,
            dist: self.dist.iter().map(|d| d * lambda).collect(),
            basepoint: self.basepoint,
            embedding: self.embedding.as_ref().map(|e| Embedding {
                coords: e.coords.iter().map(|c| c.iter().map(|x| x * lambda).collect()).collect(),
                p: e.p,
            }),
        }
    }

    /// Metric subspace on `members` (in increasing index order) together with
    /// the map from new to old indices. The basepoint moves to the member
    /// closest to the old basepoint.
    pub fn subspace(&self, members: &Subset) -> (FiniteMetricSpace, Vec<usize>) {
        let idx = members.to_vec();
        let m = idx.len();
        let mut dist = vec![0.0; m * m];
        for (a, &i) in idx.iter().enumerate() {
            for (b, &j) in idx.iter().enumerate() {
                dist[a * m + b] = self.d(i, j);
            }
        }
        let basepoint = (0..m)
            .min_by(|&a, &b| self.d(idx[a], self.basepoint).total_cmp(&self.d(idx[b], self.basepoint)))
            .unwrap_or(0);
        let embedding = self
            .embedding
            .as_ref()
            .map(|e| Embedding { coords: idx.iter().map(|&i| e.coords[i].clone()).collect(), p: e.p });
        (FiniteMetricSpace { n: m, dist, basepoint, embedding }, idx)
    }

    /// `dist(x, A)`; `+∞` for empty `A`.
    pub fn dist_to_set(&self, x: usize, a: &Subset) -> f64 {
        let row = &self.dist[x * self.n..(x + 1) * self.n];
        a.iter().map(|j| row[j]).fold(f64::INFINITY, f64::min)
    }

    /// `dist(x, X∖A)`; `+∞` when `A = X`.
    pub fn dist_to_complement(&self, x: usize, a: &Subset) -> f64 {
        let row = &self.dist[x * self.n..(x + 1) * self.n];
        (0..self.n).filter(|&j| !a.contains(j)).map(|j| row[j]).fold(f64::INFINITY, f64::min)
    }

    /// `dist(x, X∖A)` for every point at once.
    pub fn complement_distances(&self, a: &Subset) -> Vec<f64> {
        let outside: Vec<usize> = (0..self.n).filter(|&j| !a.contains(j)).collect();
        (0..self.n)
            .map(|x| {
                let row = &self.dist[x * self.n..(x + 1) * self.n];
                outside.iter().map(|&j| row[j]).fold(f64::INFINITY, f64::min)
            })
            .collect()
    }

    /// The signed ball `B(A, m)`.
    pub fn ball(&self, a: &Subset, m: f64) -> Subset {
        if m > 0.0 {
            if a.is_empty() {
                return self.none();
            }
            Subset::from_predicate(self.n, |x| self.dist_to_set(x, a) < m)
        } else if m < 0.0 {
            if a.is_full() {
                return self.all();
            }
            let r = -m;
            Subset::from_predicate(self.n, |x| self.dist_to_complement(x, a) > r)
        } else {
            a.clone()
        }
    }

    /// `B(x, r)`; for `r = 0` this is `{x}`.
    pub fn point_ball(&self, x: usize, r: f64) -> Subset {
        if r == 0.0 {
            return Subset::singleton(self.n, x);
        }
        Subset::from_predicate(self.n, |y| self.d(x, y) < r)
    }

    /// `(dist(A,B), hausdorff(A,B))`.
    ///
    /// `dist` is `+∞` if either set is empty. The Hausdorff distance is the
    /// larger of the two relation radii, so it is `+∞` when exactly one set is
    /// empty and `0` for two empty sets.
    pub fn set_distances(&self, a: &Subset, b: &Subset) -> (f64, f64) {
        let dist = a.iter().map(|x| self.dist_to_set(x, b)).fold(f64::INFINITY, f64::min);
        let haus = self.relation_radius(a, b).max(self.relation_radius(b, a));
        (dist, haus)
    }

    /// Infimum `R` with `A ⊆ B(B, R)`: `sup_{a∈A} dist(a, B)`, `0` for empty `A`.
    pub fn relation_radius(&self, a: &Subset, b: &Subset) -> f64 {
        a.iter().map(|x| self.dist_to_set(x, b)).fold(0.0, f64::max)
    }

    pub fn set_distance(&self, a: &Subset, b: &Subset) -> f64 {
        a.iter().map(|x| self.dist_to_set(x, b)).fold(f64::INFINITY, f64::min)
    }

    /// Diameter of a subset; `0` for sets with fewer than two points.
    pub fn diameter(&self, a: &Subset) -> f64 {
        let pts = a.to_vec();
        let mut best = 0.0f64;
        for (k, &i) in pts.iter().enumerate() {
            for &j in &pts[k + 1..] {
                best = best.max(self.d(i, j));
            }
        }
        best
    }

    /// Short content fingerprint (distances and basepoint) used as a space id.
    pub fn fingerprint(&self) -> String {
        let mut h = Sha256::new();
        h.update((self.n as u64).to_le_bytes());
        h.update((self.basepoint as u64).to_le_bytes());
        for d in &self.dist {
            h.update(d.to_bits().to_le_bytes());
        }
        hex::encode(&h.finalize()[..8])
    }

    pub fn diam(&self) -> f64 {
        self.dist.iter().copied().fold(0.0, f64::max)
    }

    pub fn eccentricity(&self, x: usize) -> f64 {
        (0..self.n).map(|y| self.d(x, y)).fold(0.0, f64::max)
    }

    pub fn min_positive_distance(&self) -> Option<f64> {
        self.dist.iter().copied().filter(|&d| d > 0.0).min_by(f64::total_cmp)
    }

    /// Sorted distinct values of `d(x₀, x)`; always starts with 0.
    pub fn radius_grid(&self) -> Vec<f64> {
        let mut v: Vec<f64> = (0..self.n).map(|x| self.d(self.basepoint, x)).collect();
        v.sort_by(f64::total_cmp);
        v.dedup();
        v
    }

    /// Sorted distinct pairwise distances inside `a` (including 0 when `a` is nonempty).
    pub fn distance_values(&self, a: &Subset) -> Vec<f64> {
        let pts = a.to_vec();
        let mut v = Vec::with_capacity(pts.len() * pts.len() / 2 + 1);
        for (k, &i) in pts.iter().enumerate() {
            for &j in &pts[k..] {
                v.push(self.d(i, j));
            }
        }
        v.sort_by(f64::total_cmp);
        v.dedup();
        v
    }

    /// `X ∖ B(x₀, t)` with the open ball, i.e. `{x : d(x₀,x) ≥ t}`.
    pub fn outside_ball(&self, t: f64) -> Subset {
        Subset::from_predicate(self.n, |x| self.d(self.basepoint, x) >= t)
    }

    pub fn depth(&self, x: usize) -> f64 {
        self.d(self.basepoint, x)
    }

    /// Classes of the transitive closure of `d(x,y) < m` inside `A`,
    /// ordered by smallest member.
    pub fn m_scale_components(&self, a: &Subset, m: f64) -> Vec<Subset> {
        let pts = a.to_vec();
        let mut uf = UnionFind::<usize>::new(pts.len());
        for (k, &i) in pts.iter().enumerate() {
            for (l, &j) in pts.iter().enumerate().skip(k + 1) {
                if self.d(i, j) < m {
                    uf.union(k, l);
                }
            }
        }
        let mut by_root: Vec<Option<usize>> = vec![None; pts.len()];
        let mut comps: Vec<Subset> = Vec::new();
        for (k, &i) in pts.iter().enumerate() {
            let root = uf.find(k);
            let slot = match by_root[root] {
                Some(c) => c,
                None => {
                    comps.push(self.none());
                    by_root[root] = Some(comps.len() - 1);
                    comps.len() - 1
                }
            };
            comps[slot].insert(i);
        }
        comps
    }

    /// Shortest chain (fewest steps, each `< m`) from `x` to `y` inside `A`.
    pub fn m_chain(&self, a: &Subset, m: f64, x: usize, y: usize) -> Option<Vec<usize>> {
        if !a.contains(x) || !a.contains(y) {
            return None;
        }
        let mut prev = vec![usize::MAX; self.n];
        let mut queue = std::collections::VecDeque::new();
        prev[x] = x;
        queue.push_back(x);
        while let Some(u) = queue.pop_front() {
            if u == y {
                break;
            }
            for v in a.iter() {
                if prev[v] == usize::MAX && self.d(u, v) < m {
                    prev[v] = u;
                    queue.push_back(v);
                }
            }
        }
        if prev[y] == usize::MAX {
            return None;
        }
        let mut path = vec![y];
        let mut cur = y;
        while cur != x {
            cur = prev[cur];
            path.push(cur);
        }
        path.reverse();
        Some(path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(n: usize) -> FiniteMetricSpace {
        FiniteMetricSpace::from_fn_unchecked(n, 0, |i, j| (i as f64 - j as f64).abs())
    }

    #[test]
    fn smallest_matrix() {
        let x = FiniteMetricSpace::from_matrix(vec![vec![0.0, 1.0], vec![1.0, 0.0]], 0).unwrap();
        assert_eq!(x.len(), 2);
        assert_eq!(x.d(0, 1), 1.0);
    }

    #[test]
    fn path_graph_geodesic() {
        let x = FiniteMetricSpace::from_graph(3, &[(0, 1, 1.0), (1, 2, 1.0)], 0).unwrap();
        assert_eq!(x.d(0, 2), 2.0);
    }

    #[test]
    fn triangle_violation_names_triple() {
        let rows = vec![vec![0.0, 1.0, 5.0], vec![1.0, 0.0, 1.0], vec![5.0, 1.0, 0.0]];
        match FiniteMetricSpace::from_matrix(rows, 0) {
            Err(Error::TriangleViolation { i, j, k, .. }) => assert_eq!((i, j, k), (0, 1, 2)),
            other => panic!("expected triangle violation, got {other:?}"),
        }
    }

    #[test]
    fn asymmetric_and_disconnected() {
        let rows = vec![vec![0.0, 1.0], vec![2.0, 0.0]];
        assert!(matches!(FiniteMetricSpace::from_matrix(rows, 0), Err(Error::Asymmetric { .. })));
        assert_eq!(FiniteMetricSpace::from_graph(3, &[(0, 1, 1.0)], 0).unwrap_err(), Error::Disconnected(2));
    }

    #[test]
    fn signed_balls_on_line10() {
        let x = line(10);
        let a = x.subset([0]).unwrap();
        assert_eq!(x.ball(&a, 2.5).to_vec(), vec![0, 1, 2]);
        let a = x.subset(0..=5).unwrap();
        assert_eq!(x.ball(&a, -2.0).to_vec(), vec![0, 1, 2, 3]);
        assert_eq!(x.ball(&a, 0.0), a);
        assert!(x.ball(&x.none(), 3.0).is_empty());
        assert!(x.ball(&x.all(), -100.0).is_full());
    }

    #[test]
    fn set_distances_line10() {
        let x = line(10);
        let a = x.subset([0, 1]).unwrap();
        let b = x.subset([1, 2]).unwrap();
        assert_eq!(x.set_distances(&a, &b), (0.0, 1.0));
        assert_eq!(x.set_distances(&a, &a), (0.0, 0.0));
        let z = x.subset([0]).unwrap();
        assert_eq!(x.set_distances(&z, &x.none()), (f64::INFINITY, f64::INFINITY));
    }

    #[test]
    fn m_scale_components_strictness() {
        let x = line(10);
        assert_eq!(x.m_scale_components(&x.all(), 1.0).len(), 10);
        assert_eq!(x.m_scale_components(&x.all(), 1.5).len(), 1);
        let pts: Vec<f64> = (0..10).map(|i| 2f64.powi(i)).collect();
        let geo = FiniteMetricSpace::from_fn_unchecked(10, 0, |i, j| (pts[i] - pts[j]).abs());
        let comps = geo.m_scale_components(&geo.all(), 3.0);
        assert_eq!(comps[0].to_vec(), vec![0, 1, 2]);
        assert_eq!(comps.len(), 8);
        assert!(comps[1..].iter().all(|c| c.len() == 1));
    }

    #[test]
    fn relation_radius_cases() {
        let x = line(10);
        let a = x.subset([2, 3]).unwrap();
        let b = x.subset(0..5).unwrap();
        assert_eq!(x.relation_radius(&a, &b), 0.0);
        assert_eq!(x.relation_radius(&x.subset([9]).unwrap(), &x.subset([0]).unwrap()), 9.0);
        assert_eq!(x.relation_radius(&a, &x.none()), f64::INFINITY);
    }

    #[test]
    fn chain_between_points() {
        let x = line(6);
        let chain = x.m_chain(&x.all(), 1.5, 0, 5).unwrap();
        assert_eq!(chain, vec![0, 1, 2, 3, 4, 5]);
        assert!(x.m_chain(&x.all(), 1.0, 0, 5).is_none());
    }

    #[test]
    fn json_space_spec() {
        let spec: SpaceSpec = serde_json::from_str(
            r#"{"points": 3, "metric": {"type": "graph", "edges": [[0,1,1.0],[1,2,2.0]]}, "basepoint": 1}"#,
        )
        .unwrap();
        let x = build_space(&spec).unwrap();
        assert_eq!(x.d(0, 2), 3.0);
        assert_eq!(x.basepoint(), 1);
        let e: SpaceSpec =
            serde_json::from_str(r#"{"points": 2, "metric": {"type": "euclidean", "coords": [[0,0],[3,4]]}}"#).unwrap();
        assert_eq!(build_space(&e).unwrap().d(0, 1), 5.0);
    }
}
