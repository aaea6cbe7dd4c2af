//! Disjoint unions of enlarged cubes `Iⁿ_k` (n = 1, 2) carrying families
//! whose Lebesgue number grows with `k` while `Lⁿ⁻¹` stays at the mesh.

use serde::Serialize;

use crate::cover::{coarseness_profile, lebesgue_within};
use crate::error::{Error, Result};
use crate::family::IndexedFamily;
use crate::metric::FiniteMetricSpace;
use crate::profile::ScaleProfile;
use crate::subset::Subset;

use super::higher::{higher_lebesgue_exact, Bound};
use super::sperner::{sperner_bound, Triangulation};

#[derive(Clone, Debug, Serialize)]
pub struct PieceReport {
    pub k: usize,
    pub points: usize,
    /// Longest edge of the piece's grid.
    pub mesh: f64,
    /// `Lⁿ⁻¹(𝒱, piece)`.
    #[serde(with = "crate::ext::real")]
    pub lower: f64,
    pub bound: Bound,
    /// `L(𝒱, piece)` in the piece.
    #[serde(with = "crate::ext::real")]
    pub lebesgue: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct CubeFamily {
    pub n: usize,
    #[serde(skip)]
    pub space: FiniteMetricSpace,
    pub family: IndexedFamily,
    pub pieces: Vec<PieceReport>,
    pub coarseness: ScaleProfile,
}

/// Point coordinates and, per piece, `k` with the indices of its points.
pub type Pieces = (Vec<Vec<f64>>, Vec<(usize, Vec<usize>)>);

/// Pieces `Iⁿ_k` (integer samples of `[0,k]ⁿ`) for each `k`, laid along the
/// first axis with a gap of at least `k` between consecutive pieces.
pub fn cube_pieces(n: usize, ks: &[usize]) -> Result<Pieces> {
    if !(1..=2).contains(&n) {
        return Err(Error::Parameter(format!("cube families are available for n = 1, 2, not {n}")));
    }
    if ks.is_empty() || ks.contains(&0) {
        return Err(Error::Parameter("k values must be positive".into()));
    }
    let mut coords = Vec::new();
    let mut pieces = Vec::new();
    let mut offset = 0.0;
    let mut prev = 0;
    for (i, &k) in ks.iter().enumerate() {
        if i > 0 {
            offset += prev.max(k) as f64;
        }
        let start = coords.len();
        match n {
            1 => coords.extend((0..=k).map(|x| vec![offset + x as f64])),
            _ => coords.extend((0..=k).flat_map(|y| (0..=k).map(move |x| vec![offset + x as f64, y as f64]))),
        }
        pieces.push((k, (start..coords.len()).collect()));
        offset += k as f64;
        prev = k;
    }
    Ok((coords, pieces))
}

/// Local members of piece `k`, indexed within the piece.
fn piece_cover(n: usize, k: usize) -> Result<Vec<(String, Vec<usize>)>> {
    Ok(match n {
        1 => vec![
            ("left".into(), (0..=k).filter(|&i| 4 * i <= 3 * k).collect()),
            ("right".into(), (0..=k).filter(|&i| 4 * i >= k).collect()),
        ],
        _ => {
            let stars = Triangulation::square_grid(k)?.corner_stars()?;
            stars.iter().map(|(l, s)| (l.to_string(), s.to_vec())).collect()
        }
    })
}

pub type CubeCover = (FiniteMetricSpace, IndexedFamily, Vec<(usize, Subset)>);

/// The space `⊔ Iⁿ_k`, the family `𝒱` (labels `k{k}:{label}`) and the pieces.
pub fn cube_family_cover(n: usize, ks: &[usize]) -> Result<CubeCover> {
    let (coords, pieces) = cube_pieces(n, ks)?;
    let total = coords.len();
    let space = FiniteMetricSpace::from_points(coords, 2.0, 0)?;
    let mut family = IndexedFamily::empty(total);
    let mut out = Vec::with_capacity(pieces.len());
    for (k, idx) in pieces {
        for (label, local) in piece_cover(n, k)? {
            let set = Subset::from_indices(total, local.iter().map(|&i| idx[i])).expect("indices in range");
            family.push(format!("k{k}:{label}"), set)?;
        }
        out.push((k, Subset::from_indices(total, idx).expect("indices in range")));
    }
    Ok((space, family, out))
}

pub fn rn_lower_bound_family(n: usize, ks: &[usize], limit: usize) -> Result<CubeFamily> {
    let (space, family, pieces) = cube_family_cover(n, ks)?;
    let mut reports = Vec::new();
    for (k, piece) in &pieces {
        let lebesgue = lebesgue_within(&space, &family, piece);
        let (lower, bound, mesh) = if n == 1 {
            let h = higher_lebesgue_exact(&space, &family, piece, 0, limit)?;
            (h.value, h.bound, 1.0)
        } else {
            let tri = Triangulation::square_grid(*k)?;
            let cert = sperner_bound(&tri, limit)?;
            (cert.l1.value, cert.l1.bound, cert.mesh)
        };
        reports.push(PieceReport { k: *k, points: piece.len(), mesh, lower, bound, lebesgue, holds: lower <= mesh });
    }
    let coarseness = coarseness_profile(&space, &family);
    Ok(CubeFamily { n, space, family, pieces: reports, coarseness })
}
