//! Partitions of unity, the canonical one of a cover, and oscillation.
//!
//! Oscillation at `a` is taken over the open ball `B(a, M)` intersected with
//! the domain of the partition; for a partition it is the ℓ¹ distance between
//! weight vectors.

use serde::{Deserialize, Serialize};

use crate::cover::{coarseness_profile, complement_distances, local_lebesgue, max_multiplicity};
use crate::error::{Error, Result};
use crate::family::IndexedFamily;
use crate::metric::FiniteMetricSpace;
use crate::profile::{tail_radius, ScaleProfile, Tail};
use crate::subset::Subset;

pub const SUM_TOLERANCE: f64 = 1e-9;

/// Nonnegative weights `φ_s(x)` summing to 1 on `domain`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartitionOfUnity {
    pub labels: Vec<String>,
    /// `weights[s][x]`, one row per label.
    pub weights: Vec<Vec<f64>>,
    pub domain: Subset,
}

impl PartitionOfUnity {
    pub fn new(labels: Vec<String>, weights: Vec<Vec<f64>>, domain: Subset) -> Result<Self> {
        let p = PartitionOfUnity { labels, weights, domain };
        p.validate(p.domain.universe())?;
        Ok(p)
    }

    /// Checks shapes, nonnegativity and the sum on the domain against a
    /// space of `n` points.
    pub fn validate(&self, n: usize) -> Result<()> {
        if self.labels.len() != self.weights.len() {
            return Err(Error::Parse(format!("{} labels but {} weight rows", self.labels.len(), self.weights.len())));
        }
        if let Some((s, _)) = self.weights.iter().enumerate().find(|(_, r)| r.len() != n) {
            return Err(Error::Parse(format!("weight row `{}` does not have {n} entries", self.labels[s])));
        }
        for (s, row) in self.weights.iter().enumerate() {
            if let Some(x) = row.iter().position(|w| !(*w >= 0.0) || w.is_infinite()) {
                return Err(Error::Parse(format!(
                    "weight of `{}` at point {x} is not a nonnegative real",
                    self.labels[s]
                )));
            }
        }
        if self.domain.iter().any(|x| x >= n) {
            return Err(Error::Parse("domain index out of range".into()));
        }
        for x in self.domain.iter() {
            let sum = self.sum_at(x);
            if (sum - 1.0).abs() > SUM_TOLERANCE {
                return Err(Error::Parse(format!("weights at point {x} sum to {sum}")));
            }
        }
        Ok(())
    }

    /// Re-homes the domain after deserialization and validates against `space`.
    pub fn attach(mut self, space: &FiniteMetricSpace) -> Result<Self> {
        self.domain =
            self.domain.rehome(space.len()).ok_or_else(|| Error::Parse("domain index out of range".into()))?;
        self.validate(space.len())?;
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn weight(&self, s: usize, x: usize) -> f64 {
        self.weights[s][x]
    }

    pub fn sum_at(&self, x: usize) -> f64 {
        self.weights.iter().map(|r| r[x]).sum()
    }

    /// `sup(φ)(x) = max_s φ_s(x)`.
    pub fn sup_at(&self, x: usize) -> f64 {
        self.weights.iter().map(|r| r[x]).fold(0.0, f64::max)
    }

    pub fn l1(&self, x: usize, y: usize) -> f64 {
        self.weights.iter().map(|r| (r[x] - r[y]).abs()).sum()
    }

    /// Carrier family `{φ_s > 0}`.
    pub fn carrier_family(&self) -> IndexedFamily {
        let n = self.domain.universe();
        IndexedFamily::new(
            n,
            self.labels
                .iter()
                .zip(&self.weights)
                .map(|(l, r)| (l.clone(), Subset::from_predicate(n, |x| r[x] > 0.0)))
                .collect(),
        )
        .expect("labels of a validated partition are unique")
    }

    /// `X_T = {x ∈ domain : φ_s(x) = 0 for s ∉ T}` and its boundary
    /// `∂X_T = {x ∈ X_T : φ_s(x) = 0 for some s ∈ T}`.
    pub fn nerve_cell(&self, t: &[usize]) -> NerveCell {
        let n = self.domain.universe();
        let outside: Vec<usize> = (0..self.len()).filter(|s| !t.contains(s)).collect();
        let x_t = Subset::from_predicate(n, |x| {
            self.domain.contains(x) && outside.iter().all(|&s| self.weights[s][x] == 0.0)
        });
        let boundary = Subset::from_predicate(n, |x| x_t.contains(x) && t.iter().any(|&s| self.weights[s][x] == 0.0));
        NerveCell { labels: t.iter().map(|&s| self.labels[s].clone()).collect(), x_t, boundary }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NerveCell {
    pub labels: Vec<String>,
    pub x_t: Subset,
    pub boundary: Subset,
}

#[derive(Clone, Debug, Serialize)]
pub struct CanonicalPou {
    pub pou: PartitionOfUnity,
    /// Points with `f = Σ_s dist(x, X∖U_s) = 0`, left out of the domain.
    pub excluded: Vec<usize>,
}

/// `φ_s = f_s / Σ_t f_t` with `f_s(x) = dist(x, X∖U_s)`. Where some `f_s`
/// is infinite (a member equal to X) the weight is spread evenly over the
/// labels with infinite `f_s`.
pub fn canonical_pou(space: &FiniteMetricSpace, u: &IndexedFamily) -> Result<CanonicalPou> {
    let n = space.len();
    let f = complement_distances(space, u);
    let mut weights = vec![vec![0.0; n]; u.len()];
    let mut domain = Subset::empty(n);
    let mut excluded = Vec::new();
    for x in 0..n {
        let infinite: Vec<usize> = (0..u.len()).filter(|&s| f[s][x].is_infinite()).collect();
        if !infinite.is_empty() {
            let w = 1.0 / infinite.len() as f64;
            for s in infinite {
                weights[s][x] = w;
            }
            domain.insert(x);
            continue;
        }
        let total: f64 = f.iter().map(|r| r[x]).sum();
        if total > 0.0 {
            for s in 0..u.len() {
                weights[s][x] = f[s][x] / total;
            }
            domain.insert(x);
        } else {
            excluded.push(x);
        }
    }
    if domain.is_empty() {
        return Err(Error::Precondition(
            "the local Lebesgue number vanishes everywhere, so the canonical partition has empty domain".into(),
        ));
    }
    Ok(CanonicalPou { pou: PartitionOfUnity { labels: u.labels().to_vec(), weights, domain }, excluded })
}

#[derive(Clone, Debug, Serialize)]
pub struct OscillationReport {
    /// `Osc(g, M)(a)`; `0` at points outside the domain.
    #[serde(with = "crate::ext::reals")]
    pub per_point: Vec<f64>,
    /// `t ↦ max Osc` over domain points outside `B(x₀, t)`.
    pub profile: ScaleProfile,
}

/// `Osc(a) = max_{x ∈ B(a,M) ∩ D} dist(a, x)` for a caller-supplied
/// dissimilarity between values.
pub fn oscillation_by(
    space: &FiniteMetricSpace,
    domain: &Subset,
    m: f64,
    gap: impl Fn(usize, usize) -> f64,
) -> OscillationReport {
    let n = space.len();
    let per_point: Vec<f64> = (0..n)
        .map(|a| {
            if !domain.contains(a) {
                return 0.0;
            }
            domain.iter().filter(|&x| space.d(a, x) < m).map(|x| gap(a, x)).fold(0.0, f64::max)
        })
        .collect();
    let profile = ScaleProfile::over_tails_of(space, &per_point, Tail::Max, |x| domain.contains(x));
    OscillationReport { per_point, profile }
}

/// Oscillation of a real function on `domain`.
pub fn oscillation(space: &FiniteMetricSpace, g: &[f64], domain: &Subset, m: f64) -> OscillationReport {
    oscillation_by(space, domain, m, |a, x| (g[x] - g[a]).abs())
}

/// ℓ¹ oscillation of a partition of unity.
pub fn pou_oscillation(space: &FiniteMetricSpace, pou: &PartitionOfUnity, m: f64) -> OscillationReport {
    oscillation_by(space, &pou.domain, m, |a, x| pou.l1(a, x))
}

/// `Osc(φ_s, M)` for every label.
pub fn label_oscillations(space: &FiniteMetricSpace, pou: &PartitionOfUnity, m: f64) -> Vec<Vec<f64>> {
    pou.weights.iter().map(|row| oscillation(space, row, &pou.domain, m).per_point).collect()
}

/// Smallest basepoint radius beyond which `Osc(φ_s, M)(x) < ε` for all
/// labels and all domain points; `+∞` if a failing point sits at maximal depth.
pub fn equi_oscillation_radius(space: &FiniteMetricSpace, pou: &PartitionOfUnity, m: f64, eps: f64) -> f64 {
    let osc = label_oscillations(space, pou, m);
    tail_radius(space, |x| !pou.domain.contains(x) || osc.iter().all(|row| row[x] < eps))
}

/// Points where ℓ¹ oscillation exceeds `2m · max_s Osc(φ_s)`, `m` the
/// multiplicity of the carriers. Always empty.
pub fn l1_label_bound_violations(space: &FiniteMetricSpace, pou: &PartitionOfUnity, m: f64) -> Vec<usize> {
    let mult = max_multiplicity(&pou.carrier_family()) as f64;
    let l1 = pou_oscillation(space, pou, m).per_point;
    let per = label_oscillations(space, pou, m);
    (0..space.len())
        .filter(|&x| pou.domain.contains(x))
        .filter(|&x| l1[x] > 2.0 * mult * per.iter().map(|r| r[x]).fold(0.0, f64::max))
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct LebesgueBoundReport {
    /// `(point, label)` pairs with `Osc(φ_s, M)(a) ≥ sup(φ)(a)/2`.
    pub violations: Vec<(usize, String)>,
    pub hypothesis_holds: bool,
    /// `L(Carr φ, domain)` computed in the domain as a metric subspace.
    #[serde(with = "crate::ext::real")]
    pub carrier_lebesgue: f64,
    /// `Some(L ≥ M)` when the hypothesis holds, `None` otherwise.
    pub conclusion_holds: Option<bool>,
}

/// If `Osc(φ_s, M)(a) < sup(φ)(a)/2` at every domain point and label, then
/// the label attaining `sup(φ)(a)` stays positive on `B(a, M)`, so
/// `L(Carr φ, domain) ≥ M`. The conclusion is recomputed, not assumed.
pub fn pou_lebesgue_bound(space: &FiniteMetricSpace, pou: &PartitionOfUnity, m: f64) -> LebesgueBoundReport {
    let osc = label_oscillations(space, pou, m);
    let mut violations = Vec::new();
    for a in pou.domain.iter() {
        let half = pou.sup_at(a) / 2.0;
        for (s, row) in osc.iter().enumerate() {
            if !(row[a] < half) {
                violations.push((a, pou.labels[s].clone()));
            }
        }
    }
    let (sub, map) = space.subspace(&pou.domain);
    let carriers = pou.carrier_family().pull_to_subspace(&map);
    let carrier_lebesgue = local_lebesgue(&sub, &carriers).into_iter().fold(f64::INFINITY, f64::min);
    let hypothesis_holds = violations.is_empty();
    LebesgueBoundReport {
        conclusion_holds: hypothesis_holds.then_some(carrier_lebesgue >= m),
        violations,
        hypothesis_holds,
        carrier_lebesgue,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FractionProbe {
    #[serde(with = "crate::ext::real")]
    pub eps: f64,
    #[serde(with = "crate::ext::real")]
    pub n: f64,
    /// Domain points with `Osc(f) < ε`, `Osc(g) < ε` and `f + g ≥ N`.
    pub hypothesis_points: usize,
    /// Basepoint radius beyond which every domain point satisfies the hypothesis.
    #[serde(with = "crate::ext::real")]
    pub tail_radius: f64,
    /// Hypothesis points with `Osc(h) ≥ 3ε/N`.
    pub violations: Vec<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct FractionReport {
    /// `h = f/(f+g)`; `0` outside the domain.
    #[serde(with = "crate::ext::reals")]
    pub h: Vec<f64>,
    /// Points with `f + g = 0`.
    pub excluded: Vec<usize>,
    pub osc_h: OscillationReport,
    pub probes: Vec<FractionProbe>,
}

/// `h = f/(f+g)` with the bound `Osc(h,M)(a) < 3ε/N` wherever
/// `Osc(f,M)(a) < ε`, `Osc(g,M)(a) < ε` and `f(a)+g(a) ≥ N`.
///
/// With `F = f+g`, `δ_f = f(x)−f(a)`, `δ_F = F(x)−F(a)`:
/// `h(x)−h(a) = (δ_f F(x) − f(x) δ_F) / (F(x) F(a))`, and
/// `|δ_f F(x) − f(x) δ_F| < ε F(x) + 2ε f(x) ≤ 3ε F(x)`.
pub fn fraction_pou(
    space: &FiniteMetricSpace,
    f: &[f64],
    g: &[f64],
    m: f64,
    probes: &[(f64, f64)],
) -> Result<FractionReport> {
    let n = space.len();
    if f.len() != n || g.len() != n {
        return Err(Error::Parameter("function tables must have one value per point".into()));
    }
    if f.iter().chain(g).any(|v| !(*v >= 0.0) || v.is_infinite()) {
        return Err(Error::Parameter("f and g must be finite and nonnegative".into()));
    }
    let total: Vec<f64> = (0..n).map(|x| f[x] + g[x]).collect();
    let domain = Subset::from_predicate(n, |x| total[x] > 0.0);
    let excluded = domain.complement().to_vec();
    let h: Vec<f64> = (0..n).map(|x| if total[x] > 0.0 { f[x] / total[x] } else { 0.0 }).collect();
    let osc_f = oscillation(space, f, &domain, m).per_point;
    let osc_g = oscillation(space, g, &domain, m).per_point;
    let osc_h = oscillation(space, &h, &domain, m);
    let probes = probes
        .iter()
        .map(|&(eps, big_n)| {
            let holds = |a: usize| domain.contains(a) && osc_f[a] < eps && osc_g[a] < eps && total[a] >= big_n;
            let hypothesis_points = (0..n).filter(|&a| holds(a)).count();
            let violations = (0..n).filter(|&a| holds(a) && !(osc_h.per_point[a] < 3.0 * eps / big_n)).collect();
            FractionProbe {
                eps,
                n: big_n,
                hypothesis_points,
                tail_radius: tail_radius(space, |a| !domain.contains(a) || holds(a)),
                violations,
            }
        })
        .collect();
    Ok(FractionReport { h, excluded, osc_h, probes })
}

#[derive(Clone, Debug, Serialize)]
pub struct CarrierReport {
    pub family: IndexedFamily,
    pub profile: ScaleProfile,
    pub multiplicity: usize,
}

pub fn carriers(space: &FiniteMetricSpace, pou: &PartitionOfUnity) -> CarrierReport {
    let family = pou.carrier_family();
    CarrierReport { profile: coarseness_profile(space, &family), multiplicity: max_multiplicity(&family), family }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(n: usize) -> FiniteMetricSpace {
        FiniteMetricSpace::from_fn_unchecked(n, 0, |i, j| (i as f64 - j as f64).abs())
    }

    fn ab() -> IndexedFamily {
        IndexedFamily::from_lists(10, [("A", (0..6).collect::<Vec<_>>()), ("B", (3..10).collect())]).unwrap()
    }

    #[test]
    fn canonical_line10() {
        let x = line(10);
        let c = canonical_pou(&x, &ab()).unwrap();
        assert_eq!(c.pou.weight(0, 4), 0.5);
        assert_eq!(c.pou.weight(0, 0), 1.0);
        assert_eq!(c.pou.weight(1, 9), 1.0);
        assert!(c.excluded.is_empty());
        let cell = c.pou.nerve_cell(&[0, 1]);
        assert!(cell.x_t.is_full());
        assert_eq!(cell.boundary.to_vec(), vec![0, 1, 2, 6, 7, 8, 9]);
        assert_eq!(carriers(&x, &c.pou).family.set(0).to_vec(), (0..6).collect::<Vec<_>>());
    }

    #[test]
    fn empty_domain_is_an_error() {
        let x = line(3);
        let f = IndexedFamily::from_lists(3, [("A", vec![0])]).unwrap();
        let zero = IndexedFamily::from_lists(3, [("E", Vec::<usize>::new())]).unwrap();
        assert!(canonical_pou(&x, &f).is_ok());
        assert!(matches!(canonical_pou(&x, &zero), Err(Error::Precondition(_))));
    }

    #[test]
    fn oscillation_of_identity() {
        let x = line(10);
        let g: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let r = oscillation(&x, &g, &x.all(), 2.0);
        assert_eq!(r.per_point[5], 1.0);
        let c = oscillation(&x, &[3.0; 10], &x.all(), 2.0);
        assert!(c.per_point.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn fraction_on_long_line() {
        let x = line(401);
        let f: Vec<f64> = (0..401).map(|i| i as f64).collect();
        let g: Vec<f64> = f.iter().map(|v| 400.0 - v).collect();
        let r = fraction_pou(&x, &f, &g, 2.0, &[(2.0, 400.0)]).unwrap();
        let max = r.osc_h.per_point.iter().copied().fold(0.0, f64::max);
        assert!((max - 1.0 / 400.0).abs() < 1e-15);
        assert!(max < 0.015);
        assert_eq!(r.probes[0].hypothesis_points, 401);
        assert!(r.probes[0].violations.is_empty());
        let same = fraction_pou(&x, &f, &f, 2.0, &[]).unwrap();
        assert!(same.h[1..].iter().all(|&v| v == 0.5));
    }

    #[test]
    fn json_shape() {
        let x = line(2);
        let u = IndexedFamily::from_lists(2, [("A", vec![0]), ("B", vec![1])]).unwrap();
        let c = canonical_pou(&x, &u).unwrap();
        let s = serde_json::to_string(&c.pou).unwrap();
        assert_eq!(s, r#"{"labels":["A","B"],"weights":[[1.0,0.0],[0.0,1.0]],"domain":[0,1]}"#);
        let back: PartitionOfUnity = serde_json::from_str(&s).unwrap();
        assert_eq!(back.attach(&x).unwrap(), c.pou);
    }
}
