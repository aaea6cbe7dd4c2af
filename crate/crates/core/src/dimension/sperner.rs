//! Sperner lower bounds for the corner-star cover of a subdivided triangle.
//!
//! Let `U_i` be the vertices off the boundary arc opposite corner `i`. Given
//! a shrinking `𝒱` of `𝒰` covering the vertices, label each vertex `v` by a
//! member attaining `L_𝒱(v)`. A vertex on the arc opposite corner `i` is not
//! in `V_i`, so its label is not `i`: the labeling is a Sperner labeling and
//! some triangle carries all three labels. If `L(𝒱) > mesh`, the ball of
//! radius `L(𝒱)` around any corner of that triangle holds the whole
//! triangle, so each of its vertices lies in all three members. Hence every
//! shrinking of multiplicity at most two has Lebesgue number at most the mesh.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::cover::{local_lebesgue, max_multiplicity};
use crate::error::{Error, Result};
use crate::family::IndexedFamily;
use crate::metric::FiniteMetricSpace;
use crate::subset::Subset;

use super::higher::{higher_lebesgue_exact, HigherLebesgue};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Triangulation {
    pub points: Vec<[f64; 2]>,
    pub triangles: Vec<[usize; 3]>,
    pub corners: [usize; 3],
}

fn subdivision_error(msg: String) -> Error {
    Error::NotASubdivision(msg)
}

fn edge(a: usize, b: usize) -> (usize, usize) {
    (a.min(b), a.max(b))
}

impl Triangulation {
    /// Equilateral unit triangle cut into `k²` triangles.
    pub fn equilateral(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::Parameter("subdivision order must be positive".into()));
        }
        let h = 3f64.sqrt() / 2.0;
        let mut index = BTreeMap::new();
        let mut points = Vec::new();
        for j in 0..=k {
            for i in 0..=k - j {
                index.insert((i, j), points.len());
                points.push([(i as f64 + j as f64 / 2.0) / k as f64, j as f64 * h / k as f64]);
            }
        }
        let mut triangles = Vec::new();
        for j in 0..k {
            for i in 0..k - j {
                triangles.push([index[&(i, j)], index[&(i + 1, j)], index[&(i, j + 1)]]);
                if i + j + 2 <= k {
                    triangles.push([index[&(i + 1, j)], index[&(i + 1, j + 1)], index[&(i, j + 1)]]);
                }
            }
        }
        let corners = [index[&(0, 0)], index[&(k, 0)], index[&(0, k)]];
        Ok(Triangulation { points, triangles, corners })
    }

    /// The square `[0,k]²` on the integer grid, each unit square cut along
    /// its rising diagonal, with corners `(0,0)`, `(k,0)`, `(k,k)`.
    pub fn square_grid(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::Parameter("grid size must be positive".into()));
        }
        let id = |i: usize, j: usize| j * (k + 1) + i;
        let points = (0..=k).flat_map(|j| (0..=k).map(move |i| [i as f64, j as f64])).collect();
        let mut triangles = Vec::new();
        for j in 0..k {
            for i in 0..k {
                triangles.push([id(i, j), id(i + 1, j), id(i + 1, j + 1)]);
                triangles.push([id(i, j), id(i + 1, j + 1), id(i, j + 1)]);
            }
        }
        Ok(Triangulation { points, triangles, corners: [id(0, 0), id(k, 0), id(k, k)] })
    }

    pub fn space(&self) -> Result<FiniteMetricSpace> {
        FiniteMetricSpace::from_points(self.points.iter().map(|p| p.to_vec()).collect(), 2.0, self.corners[0])
    }

    /// Longest edge.
    pub fn mesh(&self) -> f64 {
        let d = |a: usize, b: usize| {
            let (p, q) = (self.points[a], self.points[b]);
            ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)).sqrt()
        };
        self.triangles.iter().flat_map(|t| [d(t[0], t[1]), d(t[1], t[2]), d(t[0], t[2])]).fold(0.0, f64::max)
    }

    /// Checks that the triangles form a triangulated disk whose boundary
    /// cycle passes through the three corners, and returns for each corner
    /// the boundary arc opposite it (endpoints included).
    pub fn validate(&self) -> Result<[Subset; 3]> {
        let n = self.points.len();
        let mut edges: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        let mut used = vec![false; n];
        for (t, tri) in self.triangles.iter().enumerate() {
            if tri.iter().any(|&v| v >= n) {
                return Err(subdivision_error(format!("triangle {t} names a missing vertex")));
            }
            let [a, b, c] = tri.map(|v| self.points[v]);
            let area = (b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]);
            if area.abs() < 1e-12 {
                return Err(subdivision_error(format!("triangle {t} is degenerate")));
            }
            for (u, v) in [(tri[0], tri[1]), (tri[1], tri[2]), (tri[0], tri[2])] {
                *edges.entry(edge(u, v)).or_default() += 1;
            }
            for &v in tri {
                used[v] = true;
            }
        }
        if let Some(v) = used.iter().position(|u| !u) {
            return Err(subdivision_error(format!("vertex {v} belongs to no triangle")));
        }
        if let Some((e, _)) = edges.iter().find(|(_, &c)| c > 2) {
            return Err(subdivision_error(format!("edge {e:?} lies in more than two triangles")));
        }
        let euler = n as i64 - edges.len() as i64 + self.triangles.len() as i64;
        if euler != 1 {
            return Err(subdivision_error(format!("Euler characteristic {euler}, expected 1")));
        }
        let mut next: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (&(u, v), _) in edges.iter().filter(|(_, &c)| c == 1) {
            next.entry(u).or_default().push(v);
            next.entry(v).or_default().push(u);
        }
        if next.values().any(|nb| nb.len() != 2) {
            return Err(subdivision_error("boundary is not a simple cycle".into()));
        }
        let distinct: BTreeSet<usize> = self.corners.iter().copied().collect();
        if distinct.len() != 3 || self.corners.iter().any(|c| !next.contains_key(c)) {
            return Err(subdivision_error("corners must be three distinct boundary vertices".into()));
        }
        // walk the cycle from corner 0
        let mut cycle = vec![self.corners[0]];
        let mut prev = self.corners[0];
        let mut cur = next[&prev][0];
        while cur != self.corners[0] {
            cycle.push(cur);
            let nb = &next[&cur];
            let step = if nb[0] == prev { nb[1] } else { nb[0] };
            prev = cur;
            cur = step;
        }
        if cycle.len() != next.len() {
            return Err(subdivision_error("boundary has more than one component".into()));
        }
        let pos = |c: usize| cycle.iter().position(|&v| v == c).expect("corner on cycle");
        let arc = |from: usize, to: usize| {
            let (i, j) = (pos(from), pos(to));
            let len = cycle.len();
            let (mut k, mut set) = (i, Subset::empty(n));
            loop {
                set.insert(cycle[k]);
                if k == j {
                    break;
                }
                k = (k + 1) % len;
            }
            set
        };
        let [c0, c1, c2] = self.corners;
        // the arc from c1 to c2 avoiding c0, and so on
        let forward = pos(c1) < pos(c2);
        let arcs =
            if forward { [arc(c1, c2), arc(c2, c0), arc(c0, c1)] } else { [arc(c2, c1), arc(c0, c2), arc(c1, c0)] };
        Ok(arcs)
    }

    /// `U_i` = vertices off the arc opposite corner `i`, labeled `0`, `1`, `2`.
    pub fn corner_stars(&self) -> Result<IndexedFamily> {
        let arcs = self.validate()?;
        let n = self.points.len();
        IndexedFamily::new(n, (0..3).map(|i| (i.to_string(), arcs[i].complement())).collect())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SpernerWitness {
    /// Label per vertex: first member attaining `L_𝒱(v)`.
    pub labeling: Vec<usize>,
    pub fully_labeled: Vec<[usize; 3]>,
    #[serde(with = "crate::ext::real")]
    pub lebesgue: f64,
    /// A vertex lying in all three members, present whenever `lebesgue > mesh`.
    pub triple_point: Option<usize>,
}

/// Runs the Sperner argument on a three-member shrinking `v` of the corner
/// stars covering every vertex.
pub fn sperner_witness(tri: &Triangulation, space: &FiniteMetricSpace, v: &IndexedFamily) -> Result<SpernerWitness> {
    let stars = tri.corner_stars()?;
    if v.len() != 3 || v.sets().iter().zip(stars.sets()).any(|(a, b)| !a.is_subset(b)) {
        return Err(Error::NotARefinement("expected a three-member shrinking of the corner stars".into()));
    }
    if !v.is_cover() {
        return Err(Error::Coverage("the shrinking must cover every vertex".into()));
    }
    let complements: Vec<Vec<f64>> = v.sets().iter().map(|s| space.complement_distances(s)).collect();
    let local = local_lebesgue(space, v);
    let labeling: Vec<usize> =
        (0..space.len()).map(|x| (0..3).find(|&s| complements[s][x] == local[x]).expect("max is attained")).collect();
    let fully_labeled: Vec<[usize; 3]> = tri
        .triangles
        .iter()
        .filter(|t| {
            let labels: BTreeSet<usize> = t.iter().map(|&x| labeling[x]).collect();
            labels.len() == 3
        })
        .copied()
        .collect();
    if fully_labeled.len().is_multiple_of(2) {
        return Err(Error::Certificate(format!(
            "{} fully labeled triangles; a Sperner labeling has an odd number",
            fully_labeled.len()
        )));
    }
    let lebesgue = local.iter().copied().fold(f64::INFINITY, f64::min);
    let triple_point = fully_labeled.iter().flatten().copied().find(|&x| v.containing(x).len() == 3);
    if lebesgue > tri.mesh() && triple_point.is_none() {
        return Err(Error::Certificate("L exceeds the mesh but no vertex lies in all three members".into()));
    }
    Ok(SpernerWitness { labeling, fully_labeled, lebesgue, triple_point })
}

#[derive(Clone, Debug, Serialize)]
pub struct SpernerCertificate {
    pub vertices: usize,
    pub triangles: usize,
    pub mesh: f64,
    /// Exact `L¹` of the corner stars.
    pub l1: HigherLebesgue,
    pub holds: bool,
    /// The argument run on the corner stars themselves (multiplicity three).
    pub witness: SpernerWitness,
}

/// `L¹(𝒰, X) ≤ mesh` for the corner stars, by exhaustive search, together
/// with a Sperner witness for the stars themselves.
pub fn sperner_bound(tri: &Triangulation, limit: usize) -> Result<SpernerCertificate> {
    let stars = tri.corner_stars()?;
    let space = tri.space()?;
    let mesh = tri.mesh();
    let l1 = higher_lebesgue_exact(&space, &stars, &space.all(), 1, limit)?;
    if let Some(w) = &l1.witness {
        if max_multiplicity(w) > 2 {
            return Err(Error::Certificate("search witness exceeds multiplicity two".into()));
        }
    }
    let witness = sperner_witness(tri, &space, &stars)?;
    let holds = l1.value <= mesh;
    Ok(SpernerCertificate { vertices: space.len(), triangles: tri.triangles.len(), mesh, l1, holds, witness })
}
