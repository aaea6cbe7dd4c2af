//! Maps between finite metric spaces: distance transfers, Lebesgue-number
//! transfer bounds, closeness and domination, retractions onto subsets and
//! obstructions to extension.

pub mod noext;
pub mod retraction;

use serde::{Deserialize, Serialize};

use crate::cover::lebesgue_number;
use crate::error::{Error, Result};
use crate::family::IndexedFamily;
use crate::metric::{build_space, FiniteMetricSpace, SpaceSpec};
use crate::profile::{ScaleProfile, Tail};
use crate::subset::Subset;

pub use noext::{no_extension_certificate, ChainData, NoExtension};
pub use retraction::{zero_dim_retraction, Retraction};

/// A total map given by its table of target indices.
#[derive(Clone, Debug)]
pub struct PointMap {
    source: FiniteMetricSpace,
    target: FiniteMetricSpace,
    table: Vec<usize>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MapSpec {
    pub source: SpaceSpec,
    pub target: SpaceSpec,
    pub table: Vec<usize>,
}

impl PointMap {
    pub fn new(source: FiniteMetricSpace, target: FiniteMetricSpace, table: Vec<usize>) -> Result<Self> {
        if table.len() != source.len() {
            return Err(Error::Parameter(format!(
                "map table has {} entries for {} source points",
                table.len(),
                source.len()
            )));
        }
        if let Some((x, &y)) = table.iter().enumerate().find(|(_, &y)| y >= target.len()) {
            return Err(Error::Parameter(format!("f({x}) = {y} is outside the {}-point target", target.len())));
        }
        Ok(PointMap { source, target, table })
    }

    pub fn from_fn(source: FiniteMetricSpace, target: FiniteMetricSpace, f: impl Fn(usize) -> usize) -> Result<Self> {
        let table = (0..source.len()).map(f).collect();
        Self::new(source, target, table)
    }

    pub fn from_spec(spec: &MapSpec) -> Result<Self> {
        Self::new(build_space(&spec.source)?, build_space(&spec.target)?, spec.table.clone())
    }

    pub fn to_spec(&self) -> MapSpec {
        MapSpec { source: self.source.to_spec(), target: self.target.to_spec(), table: self.table.clone() }
    }

    pub fn source(&self) -> &FiniteMetricSpace {
        &self.source
    }

    pub fn target(&self) -> &FiniteMetricSpace {
        &self.target
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }

    pub fn apply(&self, x: usize) -> usize {
        self.table[x]
    }

    /// `d_Y(f(x), f(y))`.
    pub fn image_distance(&self, x: usize, y: usize) -> f64 {
        self.target.d(self.table[x], self.table[y])
    }

    pub fn image(&self) -> Subset {
        Subset::from_indices(self.target.len(), self.table.iter().copied()).expect("table is in range")
    }

    pub fn preimage(&self, b: &Subset) -> Subset {
        Subset::from_predicate(self.source.len(), |x| b.contains(self.table[x]))
    }

    pub fn preimage_family(&self, fam: &IndexedFamily) -> IndexedFamily {
        IndexedFamily::new(self.source.len(), fam.iter().map(|(l, s)| (l.to_string(), self.preimage(s))).collect())
            .expect("preimages live in the source")
    }

    /// `g ∘ f`; the target of `f` must be the source of `g`.
    pub fn then(&self, g: &PointMap) -> Result<PointMap> {
        if self.target.fingerprint() != g.source.fingerprint() {
            return Err(Error::Parameter("maps are not composable".into()));
        }
        PointMap::from_fn(self.source.clone(), g.target.clone(), |x| g.table[self.table[x]])
    }

    /// `d_f(t) = max{d_Y(f(x),f(y)) : d_X(x,y) ≤ t}`.
    pub fn forward_transfer(&self, t: f64) -> f64 {
        let n = self.source.len();
        let mut best = 0.0;
        for x in 0..n {
            for y in x + 1..n {
                if self.source.d(x, y) <= t {
                    best = f64::max(best, self.image_distance(x, y));
                }
            }
        }
        best
    }

    /// `d^f(t) = max{d_X(x,y) : d_Y(f(x),f(y)) ≤ t}`.
    pub fn reverse_transfer(&self, t: f64) -> f64 {
        let n = self.source.len();
        let mut best = 0.0;
        for x in 0..n {
            for y in x + 1..n {
                if self.image_distance(x, y) <= t {
                    best = f64::max(best, self.source.d(x, y));
                }
            }
        }
        best
    }

    /// `max_x d_Y(f(x), g(x))`.
    pub fn distance_to(&self, g: &PointMap) -> Result<f64> {
        self.same_signature(g)?;
        Ok((0..self.source.len()).map(|x| self.target.d(self.table[x], g.table[x])).fold(0.0, f64::max))
    }

    fn same_signature(&self, g: &PointMap) -> Result<()> {
        if self.source.fingerprint() != g.source.fingerprint() || self.target.fingerprint() != g.target.fingerprint() {
            return Err(Error::Parameter("maps have different source or target".into()));
        }
        Ok(())
    }
}

impl Serialize for PointMap {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_spec().serialize(s)
    }
}

/// Profile of `t ↦ agg{value(x,y) : key(x,y) ≤ t}` over the sorted distinct
/// `grid`, computed by a sweep over pairs sorted by key.
fn sweep(
    n: usize,
    grid: &[f64],
    key: impl Fn(usize, usize) -> f64,
    value: impl Fn(usize, usize) -> f64,
) -> ScaleProfile {
    let mut pairs: Vec<(f64, f64)> = Vec::with_capacity(n * n / 2);
    for x in 0..n {
        for y in x + 1..n {
            pairs.push((key(x, y), value(x, y)));
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let (mut k, mut acc) = (0, 0.0);
    let entries = grid
        .iter()
        .map(|&t| {
            while k < pairs.len() && pairs[k].0 <= t {
                acc = f64::max(acc, pairs[k].1);
                k += 1;
            }
            (t, acc)
        })
        .collect();
    ScaleProfile::new(entries).expect("grid is increasing")
}

/// `d_f` over the distinct source distances and `d^f` over the distinct
/// target distances.
pub fn distance_transfers(f: &PointMap) -> (ScaleProfile, ScaleProfile) {
    let n = f.source.len();
    let forward =
        sweep(n, &f.source.distance_values(&f.source.all()), |x, y| f.source.d(x, y), |x, y| f.image_distance(x, y));
    let reverse =
        sweep(n, &f.target.distance_values(&f.target.all()), |x, y| f.image_distance(x, y), |x, y| f.source.d(x, y));
    (forward, reverse)
}

#[derive(Clone, Debug, Serialize)]
pub struct TransferBounds {
    /// `N ↦ sup{M : d_X(x,y) < M ⇒ d_Y(f(x),f(y)) < N}`.
    pub lower: ScaleProfile,
    /// `N ↦ L(f⁻¹{B(z,N)}_{z∈Y}, X)`.
    pub upper: ScaleProfile,
}

/// Two bounds on the Lebesgue-number transfer `L^f(N)`, the infimum of
/// `L(f⁻¹𝒰, X)` over families `𝒰` of `Y` with `L(𝒰, Y) ≥ N`. The lower one
/// holds for every such family; the upper one is the value on ball covers.
/// The default grid is the positive target distances.
pub fn lebesgue_transfer_bounds(f: &PointMap, grid: Option<&[f64]>) -> Result<TransferBounds> {
    let default_grid: Vec<f64>;
    let grid = match grid {
        Some(g) => g,
        None => {
            default_grid = f.target.distance_values(&f.target.all()).into_iter().filter(|&d| d > 0.0).collect();
            &default_grid
        }
    };
    let n = f.source.len();
    let mut lower = Vec::with_capacity(grid.len());
    let mut upper = Vec::with_capacity(grid.len());
    for &big_n in grid {
        let mut delta = f64::INFINITY;
        for x in 0..n {
            for y in x..n {
                if f.image_distance(x, y) >= big_n {
                    delta = delta.min(f.source.d(x, y));
                }
            }
        }
        lower.push((big_n, delta));
        let balls = IndexedFamily::new(
            f.target.len(),
            (0..f.target.len()).map(|z| (format!("B{z}"), f.target.point_ball(z, big_n))).collect(),
        )?;
        upper.push((big_n, lebesgue_number(&f.source, &f.preimage_family(&balls), &f.source.all())));
    }
    Ok(TransferBounds { lower: ScaleProfile::new(lower)?, upper: ScaleProfile::new(upper)? })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
}

impl LinearFit {
    pub fn at(&self, t: f64) -> f64 {
        self.slope * t + self.intercept
    }
}

/// Linear upper envelope `t ↦ m·t + b` of a nondecreasing profile on
/// `t ≥ 0`: the smallest admissible intercept (the value at `t = 0`, or `0`
/// when the grid starts later), then the smallest slope for that intercept.
pub fn linear_envelope(p: &ScaleProfile) -> LinearFit {
    let intercept = match p.entries.first() {
        Some(e) if e.t == 0.0 => e.v,
        _ => 0.0,
    };
    let slope = p.entries.iter().filter(|e| e.t > 0.0).map(|e| (e.v - intercept) / e.t).fold(0.0, f64::max);
    LinearFit { slope, intercept }
}

#[derive(Clone, Debug, Serialize)]
pub struct MapClassification {
    /// `d_f` at the source distances.
    pub coarse: ScaleProfile,
    pub fit: LinearFit,
    /// `r ↦ min{d_Y(f(x), y₀) : d_X(x₀,x) ≥ r}`.
    pub coarsely_proper: ScaleProfile,
    /// `r ↦ max{d_Y(f(x), f(a)) : d_X(x,a) < M, d_X(x₀,a) ≥ r}`.
    pub slowly_oscillating: ScaleProfile,
    pub oscillation_radius: f64,
}

pub fn classify_map(f: &PointMap, oscillation_radius: f64) -> MapClassification {
    let (coarse, _) = distance_transfers(f);
    let fit = linear_envelope(&coarse);
    let y0 = f.target.basepoint();
    let to_base: Vec<f64> = (0..f.source.len()).map(|x| f.target.d(f.table[x], y0)).collect();
    let coarsely_proper = ScaleProfile::over_tails(&f.source, &to_base, Tail::Min);
    let osc: Vec<f64> = (0..f.source.len())
        .map(|a| f.source.point_ball(a, oscillation_radius).iter().map(|x| f.image_distance(x, a)).fold(0.0, f64::max))
        .collect();
    let slowly_oscillating = ScaleProfile::over_tails(&f.source, &osc, Tail::Max);
    MapClassification { coarse, fit, coarsely_proper, slowly_oscillating, oscillation_radius }
}

#[derive(Clone, Debug, Serialize)]
pub struct Closeness {
    pub distance: f64,
    /// `relation_radius(Γ(f), Γ(g))` in `X × Y` with `d_X + d_Y`.
    pub graph_radius_fg: f64,
    pub graph_radius_gf: f64,
}

fn graph_radius(f: &PointMap, g: &PointMap) -> f64 {
    let n = f.source.len();
    (0..n)
        .map(|x| (0..n).map(|y| f.source.d(x, y) + f.target.d(f.table[x], g.table[y])).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max)
}

pub fn map_closeness(f: &PointMap, g: &PointMap) -> Result<Closeness> {
    let distance = f.distance_to(g)?;
    Ok(Closeness { distance, graph_radius_fg: graph_radius(f, g), graph_radius_gf: graph_radius(g, f) })
}

#[derive(Clone, Debug, Serialize)]
pub struct Domination {
    /// `max_x d_X(g(f(x)), x)`.
    pub dist_gf_id: f64,
    /// `max_{y∈f(X)} d_Y(f(g(y)), y)`.
    pub dist_fg_id_on_image: f64,
    /// `max_{y∈Y} d_Y(f(g(y)), y)`.
    pub dist_fg_id: f64,
    pub f_coarsely_proper: ScaleProfile,
    /// Coarse properness of `g` on `f(X)`, over the basepoint grid of `Y`.
    pub g_coarsely_proper_on_image: ScaleProfile,
    pub surjective: bool,
    /// `max_t d^f(t)`; finite on a finite space, reported for surjective `f`.
    pub reverse_transfer_max: Option<f64>,
    /// `d_Y(f(g(f(x))), f(x)) ≤ d_f(dist(g∘f, id))` at every `x`.
    pub inequality_holds: bool,
    pub inequality_witness: Option<usize>,
}

pub fn domination_check(f: &PointMap, g: &PointMap) -> Result<Domination> {
    if f.target.fingerprint() != g.source.fingerprint() || g.target.fingerprint() != f.source.fingerprint() {
        return Err(Error::Parameter("expected f: X -> Y and g: Y -> X".into()));
    }
    let x_len = f.source.len();
    let y_len = f.target.len();
    let dist_gf_id = (0..x_len).map(|x| f.source.d(g.apply(f.apply(x)), x)).fold(0.0, f64::max);
    let image = f.image();
    let fg = |y: usize| f.target.d(f.apply(g.apply(y)), y);
    let dist_fg_id_on_image = image.iter().map(fg).fold(0.0, f64::max);
    let dist_fg_id = (0..y_len).map(fg).fold(0.0, f64::max);
    let y0 = f.target.basepoint();
    let x0 = f.source.basepoint();
    let f_vals: Vec<f64> = (0..x_len).map(|x| f.target.d(f.apply(x), y0)).collect();
    let g_vals: Vec<f64> = (0..y_len).map(|y| f.source.d(g.apply(y), x0)).collect();
    let surjective = image.is_full();
    let budget = f.forward_transfer(dist_gf_id);
    let witness = (0..x_len).find(|&x| f.target.d(f.apply(g.apply(f.apply(x))), f.apply(x)) > budget);
    Ok(Domination {
        dist_gf_id,
        dist_fg_id_on_image,
        dist_fg_id,
        f_coarsely_proper: ScaleProfile::over_tails(&f.source, &f_vals, Tail::Min),
        g_coarsely_proper_on_image: ScaleProfile::over_tails_of(&f.target, &g_vals, Tail::Min, |y| image.contains(y)),
        surjective,
        reverse_transfer_max: surjective.then(|| f.reverse_transfer(f64::INFINITY)),
        inequality_holds: witness.is_none(),
        inequality_witness: witness,
    })
}
