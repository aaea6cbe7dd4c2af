//! Annulus constructions around the basepoint.

use crate::cover::{coarseness_profile, max_multiplicity, mesh};
use crate::error::{Error, Result};
use crate::family::IndexedFamily;
use crate::metric::FiniteMetricSpace;
use crate::subset::Subset;

use super::certificate::{GuaranteeKind, RefinementCertificate};

/// `V_n = {x : (n−1)² ≤ d(x₀,x) < (n+1)²}` for `n = 1 ..= ⌈√diam⌉ + 1`,
/// labels `V1, V2, …` (empty annuli are kept).
pub fn squared_annuli(space: &FiniteMetricSpace) -> (IndexedFamily, RefinementCertificate) {
    let top = space.diam().sqrt().ceil() as usize + 1;
    let mut fam = IndexedFamily::empty(space.len());
    for n in 1..=top {
        let lo = ((n - 1) * (n - 1)) as f64;
        let hi = ((n + 1) * (n + 1)) as f64;
        let set = Subset::from_predicate(space.len(), |x| lo <= space.depth(x) && space.depth(x) < hi);
        fam.push(format!("V{n}"), set).expect("distinct labels");
    }
    let mut cert = RefinementCertificate::new(GuaranteeKind::AnnulusMult2, String::from("-"), fam.fingerprint());
    cert.check_le("multiplicity", max_multiplicity(&fam) as f64, 2.0, None);
    cert.check("covers X", fam.is_cover(), None);
    cert.profiles.push(("coarseness".into(), coarseness_profile(space, &fam)));
    (fam, cert)
}

/// `V_{s,m} = {x ∈ U_s : 2^m < d(x₀,x) ≤ 2^{m+2}}` for every `m ≥ 0` with
/// `2^m` below the largest basepoint distance; labels `s#m`. With `residual`
/// the pieces `U_s ∩ {d ≤ 1}` are added under labels `s#res`.
pub fn bounded_annulus_refine(
    space: &FiniteMetricSpace,
    u: &IndexedFamily,
    residual: bool,
) -> Result<(IndexedFamily, RefinementCertificate)> {
    let ecc = space.eccentricity(space.basepoint());
    let mut levels = 0usize;
    while 2f64.powi(levels as i32) < ecc {
        levels += 1;
    }
    let mut fam = IndexedFamily::empty(space.len());
    let mut diam_ok = true;
    let mut diam_witness = None;
    for (label, us) in u.iter() {
        for m in 0..levels {
            let lo = 2f64.powi(m as i32);
            let hi = 2f64.powi(m as i32 + 2);
            let set =
                Subset::from_predicate(space.len(), |x| us.contains(x) && lo < space.depth(x) && space.depth(x) <= hi);
            if space.diameter(&set) > 2.0 * hi {
                diam_ok = false;
                diam_witness = set.first();
            }
            fam.push(format!("{label}#{m}"), set)
                .map_err(|_| Error::InvalidFamily(format!("label collision at `{label}#{m}`")))?;
        }
        if residual {
            let set = Subset::from_predicate(space.len(), |x| us.contains(x) && space.depth(x) <= 1.0);
            fam.push(format!("{label}#res"), set)
                .map_err(|_| Error::InvalidFamily(format!("label collision at `{label}#res`")))?;
        }
    }
    let mut cert = RefinementCertificate::new(GuaranteeKind::BoundedRefine, u.fingerprint(), fam.fingerprint());
    cert.check_le("multiplicity <= 2 m(U)", max_multiplicity(&fam) as f64, 2.0 * max_multiplicity(u) as f64, None);
    cert.check("piece (s,m) has diameter <= 2^(m+3)", diam_ok, diam_witness);
    let mut refines = true;
    for (label, set) in fam.iter() {
        let base = &label[..label.rfind('#').expect("generated label")];
        refines &= set.is_subset(u.get(base).expect("generated from u"));
    }
    cert.check("V_(s,m) is contained in U_s", refines, None);
    let target = if residual {
        u.union()
    } else {
        u.union().intersection(&Subset::from_predicate(space.len(), |x| space.depth(x) > 1.0))
    };
    let missed = target.difference(&fam.union()).first();
    cert.check(
        if residual { "covers the points U covers" } else { "covers the points U covers with d > 1" },
        missed.is_none(),
        missed,
    );
    cert.note(format!("mesh {}", mesh(space, &fam)));
    Ok((fam, cert))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(n: usize) -> FiniteMetricSpace {
        FiniteMetricSpace::from_fn_unchecked(n, 0, |i, j| (i as f64 - j as f64).abs())
    }

    #[test]
    fn line10_squared_annuli() {
        let x = line(10);
        let (v, cert) = squared_annuli(&x);
        let got: Vec<Vec<usize>> = v.sets().iter().map(Subset::to_vec).collect();
        assert_eq!(got, vec![vec![0, 1, 2, 3], (1..9).collect(), (4..10).collect(), vec![9]]);
        assert!(cert.verified());
        let single = FiniteMetricSpace::from_matrix(vec![vec![0.0]], 0).unwrap();
        let (v, _) = squared_annuli(&single);
        assert_eq!(v.len(), 1);
        assert_eq!(v.set(0).to_vec(), vec![0]);
    }

    #[test]
    fn line10_bounded_pieces() {
        let x = line(10);
        let u = IndexedFamily::from_lists(10, [("A", (0..6).collect::<Vec<_>>()), ("B", (3..10).collect())]).unwrap();
        let (v, cert) = bounded_annulus_refine(&x, &u, true).unwrap();
        assert_eq!(v.get("A#0").unwrap().to_vec(), vec![2, 3, 4]);
        assert_eq!(v.get("A#1").unwrap().to_vec(), vec![3, 4, 5]);
        assert_eq!(v.get("B#2").unwrap().to_vec(), vec![5, 6, 7, 8, 9]);
        assert_eq!(v.get("A#res").unwrap().to_vec(), vec![0, 1]);
        assert!(cert.verified());
    }
}
