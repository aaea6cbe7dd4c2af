//! Reference spaces, covers and partitions of unity.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cover::{lebesgue_number, max_multiplicity};
use crate::dimension::rn::cube_family_cover;
use crate::dimension::sperner::Triangulation;
use crate::dimension::star::star_cover;
use crate::error::{Error, Result};
use crate::family::IndexedFamily;
use crate::maps::ChainData;
use crate::metric::FiniteMetricSpace;
use crate::pou::PartitionOfUnity;
use crate::subset::Subset;

fn one() -> f64 {
    1.0
}

fn two() -> f64 {
    2.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum GeneratorSpec {
    /// Integers `0..n` on the real line.
    Line { n: usize },
    /// Integer grid `width × height` scaled by `spacing`.
    Grid {
        width: usize,
        height: usize,
        #[serde(default = "one")]
        spacing: f64,
    },
    /// `base^i` for `i < count` on the real line.
    Geometric {
        #[serde(default = "two")]
        base: f64,
        count: usize,
    },
    /// A basepoint and clouds `C_1 … C_levels`, with the partition of unity
    /// spreading `C_n` evenly over its other points.
    Cloud { levels: u32 },
    /// Pairs joined by chains of `2i` steps of length `m/2`, with endpoint
    /// values `i` and `i + 2i²`.
    Chain { count: usize, m: f64 },
    /// Disjoint enlarged cubes `Iⁿ_k` and their family.
    CubeFamily { n: usize, ks: Vec<usize> },
    /// Starred-cube cover of an integer box sample of ℝⁿ with Lebesgue number at least `m`.
    RnStarCover { n: usize, m: f64, side: usize },
    /// Equilateral triangle cut into `k²` triangles, with the corner stars.
    SimplexSubdivision { k: usize },
    /// Integers `0..n` with intervals `[js, js + 2s)`, `s = 2·4^{level−1}`.
    IntervalCover { n: usize, level: u32 },
    /// Distinct random points of an integer box with a random cover by
    /// `labels` members.
    Random { points: usize, dim: usize, side: usize, labels: usize },
}

#[derive(Clone, Debug, Serialize)]
pub struct Generated {
    #[serde(skip)]
    pub space: FiniteMetricSpace,
    #[serde(rename = "space")]
    pub space_spec: crate::metric::SpaceSpec,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub family: Option<IndexedFamily>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pou: Option<PartitionOfUnity>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chains: Option<ChainData>,
    /// Endpoint values `(f(x_i), f(y_i))` of the chains.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<(f64, f64)>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub triangulation: Option<Triangulation>,
}

impl Generated {
    fn space(space: FiniteMetricSpace) -> Self {
        Generated {
            space_spec: space.to_spec(),
            space,
            family: None,
            pou: None,
            chains: None,
            values: None,
            triangulation: None,
        }
    }

    fn with_family(mut self, family: IndexedFamily) -> Self {
        self.family = Some(family);
        self
    }
}

fn param(msg: String) -> Error {
    Error::Parameter(msg)
}

fn line_points(n: usize) -> Result<FiniteMetricSpace> {
    FiniteMetricSpace::from_points((0..n).map(|i| vec![i as f64]).collect(), 2.0, 0)
}

/// Intervals `[js, js + 2s)` cut to `0..n`.
pub fn interval_cover(n: usize, level: u32) -> Result<IndexedFamily> {
    if level == 0 {
        return Err(param("interval level must be at least 1".into()));
    }
    let s = 2 * 4usize.pow(level - 1);
    let mut members = Vec::new();
    let mut j = 0;
    while j * s < n {
        members.push((format!("k{level}j{j}"), (j * s..(j * s + 2 * s).min(n)).collect::<Vec<_>>()));
        j += 1;
    }
    IndexedFamily::from_lists(n, members)
}

fn cloud(levels: u32) -> Result<Generated> {
    if !(1..=12).contains(&levels) {
        return Err(param(format!("cloud levels must lie in 1..=12, got {levels}")));
    }
    // location and cloud of every point; the basepoint is cloud 0
    let mut where_: Vec<(f64, u32)> = vec![(0.0, 0)];
    let mut labels = vec!["o".to_string()];
    for n in 1..=levels {
        for j in 0..=(1usize << n) {
            where_.push((2f64.powi(n as i32), n));
            labels.push(format!("c{n}.{j}"));
        }
    }
    let size = where_.len();
    let rows: Vec<Vec<f64>> = (0..size)
        .map(|i| {
            (0..size)
                .map(|j| {
                    let ((li, ci), (lj, cj)) = (where_[i], where_[j]);
                    if i == j {
                        0.0
                    } else if ci == cj {
                        1.0
                    } else {
                        (li - lj).abs()
                    }
                })
                .collect()
        })
        .collect();
    let space = FiniteMetricSpace::from_matrix(rows, 0)?;
    let weights: Vec<Vec<f64>> = (0..size)
        .map(|s| {
            let cs = where_[s].1;
            (0..size)
                .map(|x| match (cs, where_[x].1) {
                    (0, 0) => 1.0,
                    (a, b) if a == b && a > 0 && s != x => 2f64.powi(-(a as i32)),
                    _ => 0.0,
                })
                .collect()
        })
        .collect();
    let pou = PartitionOfUnity::new(labels, weights, space.all())?;
    let mut g = Generated::space(space);
    g.pou = Some(pou);
    Ok(g)
}

fn chain(count: usize, m: f64) -> Result<Generated> {
    if count == 0 || !(m > 0.0) {
        return Err(param("chain needs count >= 1 and m > 0".into()));
    }
    let step = m / 2.0;
    let mut coords = Vec::new();
    let mut chains = Vec::new();
    let mut values = Vec::new();
    let mut row = 0.0;
    for i in 1..=count {
        let len = 2 * i;
        let start = coords.len();
        for s in 0..=len {
            coords.push(vec![s as f64 * step, row]);
        }
        chains.push((start..coords.len()).collect());
        values.push((i as f64, (i + i * len) as f64));
        // rows far enough apart that no chain shortcut exists
        row += (len as f64 + 2.0) * step + m;
    }
    let space = FiniteMetricSpace::from_points(coords, 2.0, 0)?;
    let mut g = Generated::space(space);
    g.chains = Some(ChainData { chains });
    g.values = Some(values);
    Ok(g)
}

fn rn_star(n: usize, m: f64, side: usize) -> Result<Generated> {
    if !(1..=3).contains(&n) || side == 0 {
        return Err(param(format!("rn-star-cover needs n in 1..=3 and a positive side, got n = {n}")));
    }
    let mut coords: Vec<Vec<f64>> = vec![Vec::new()];
    for _ in 0..n {
        coords = coords
            .into_iter()
            .flat_map(|c| {
                (0..side).map(move |v| {
                    let mut c = c.clone();
                    c.push(v as f64);
                    c
                })
            })
            .collect();
    }
    // last axis varies fastest; reverse so the first axis does
    for c in &mut coords {
        c.reverse();
    }
    let family = star_cover(&coords, m)?;
    let space = FiniteMetricSpace::from_points(coords, 2.0, 0)?;
    let mult = max_multiplicity(&family);
    let l = lebesgue_number(&space, &family, &space.all());
    if mult > n + 1 || l < m {
        return Err(Error::Certificate(format!(
            "star cover has multiplicity {mult} and Lebesgue number {l}; expected <= {} and >= {m}",
            n + 1
        )));
    }
    Ok(Generated::space(space).with_family(family))
}

fn random(points: usize, dim: usize, side: usize, labels: usize, seed: u64) -> Result<Generated> {
    let cells = side.checked_pow(dim as u32).ok_or_else(|| param("box too large".into()))?;
    if points == 0 || dim == 0 || labels == 0 || points > cells {
        return Err(param(format!("cannot place {points} distinct points in a {side}^{dim} box")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picks = sample(&mut rng, cells, points).into_vec();
    picks.sort_unstable();
    let coords: Vec<Vec<f64>> = picks
        .iter()
        .map(|&c| {
            let mut rest = c;
            (0..dim)
                .map(|_| {
                    let v = rest % side;
                    rest /= side;
                    v as f64
                })
                .collect()
        })
        .collect();
    let space = FiniteMetricSpace::from_points(coords, 2.0, 0)?;
    let mut sets = vec![Subset::empty(points); labels];
    for x in 0..points {
        let mut placed = false;
        for set in &mut sets {
            if rng.random_bool(0.5) {
                set.insert(x);
                placed = true;
            }
        }
        if !placed {
            sets[rng.random_range(0..labels)].insert(x);
        }
    }
    let family = IndexedFamily::new(points, sets.into_iter().enumerate().map(|(i, s)| (format!("U{i}"), s)).collect())?;
    Ok(Generated::space(space).with_family(family))
}

/// Builds the requested object; `seed` only affects randomized kinds.
pub fn generate(spec: &GeneratorSpec, seed: u64) -> Result<Generated> {
    match *spec {
        GeneratorSpec::Line { n } => {
            if n == 0 {
                return Err(param("line needs at least one point".into()));
            }
            Ok(Generated::space(line_points(n)?))
        }
        GeneratorSpec::Grid { width, height, spacing } => {
            if width == 0 || height == 0 || !(spacing > 0.0) {
                return Err(param("grid needs positive width, height and spacing".into()));
            }
            let coords = (0..height)
                .flat_map(|y| (0..width).map(move |x| vec![x as f64 * spacing, y as f64 * spacing]))
                .collect();
            Ok(Generated::space(FiniteMetricSpace::from_points(coords, 2.0, 0)?))
        }
        GeneratorSpec::Geometric { base, count } => {
            if count == 0 || !(base > 1.0) {
                return Err(param("geometric needs count >= 1 and base > 1".into()));
            }
            let coords = (0..count).map(|i| vec![base.powi(i as i32)]).collect();
            Ok(Generated::space(FiniteMetricSpace::from_points(coords, 2.0, 0)?))
        }
        GeneratorSpec::Cloud { levels } => cloud(levels),
        GeneratorSpec::Chain { count, m } => chain(count, m),
        GeneratorSpec::CubeFamily { n, ref ks } => {
            let (space, family, _) = cube_family_cover(n, ks)?;
            Ok(Generated::space(space).with_family(family))
        }
        GeneratorSpec::RnStarCover { n, m, side } => rn_star(n, m, side),
        GeneratorSpec::SimplexSubdivision { k } => {
            let tri = Triangulation::equilateral(k)?;
            let family = tri.corner_stars()?;
            let mut g = Generated::space(tri.space()?).with_family(family);
            g.triangulation = Some(tri);
            Ok(g)
        }
        GeneratorSpec::IntervalCover { n, level } => {
            if n == 0 {
                return Err(param("interval-cover needs at least one point".into()));
            }
            Ok(Generated::space(line_points(n)?).with_family(interval_cover(n, level)?))
        }
        GeneratorSpec::Random { points, dim, side, labels } => random(points, dim, side, labels, seed),
    }
}
