//! Higher Lebesgue numbers `Lⁿ(𝒰, A)`: the best Lebesgue number, measured in
//! the subspace `A`, of a shrinking of `𝒰|_A` with multiplicity at most `n+1`.
//!
//! Every refinement converts to a shrinking without raising multiplicity, so
//! shrinkings suffice. For a threshold `t`, `Lⁿ ≥ t` holds iff each `a ∈ A`
//! can pick a label `j(a)` with `B_A(a,t) ⊆ U_{j(a)}` such that every `b`
//! sees at most `n+1` distinct labels among `{j(a) : d(a,b) < t}`; the
//! shrinking is then `V_s = ∪{B_A(a,t) : j(a) = s}`. Feasibility is monotone
//! in `t` and the answer is a distance realized in `A` (or `+∞`), so a binary
//! search over those distances with a backtracking feasibility test is exact.

use serde::Serialize;

use crate::cover::{global_multiplicity, lebesgue_within};
use crate::error::{Error, Result};
use crate::family::IndexedFamily;
use crate::metric::FiniteMetricSpace;
use crate::subset::Subset;

pub const DEFAULT_EXACT_LIMIT: usize = 16;
const NODE_BUDGET: u64 = 50_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Bound {
    /// Established by exhaustive search.
    Exact,
    /// A value attained by a constructed object; a lower bound for maxima.
    Heuristic,
}

#[derive(Clone, Debug, Serialize)]
pub struct HigherLebesgue {
    #[serde(with = "crate::ext::real")]
    pub value: f64,
    pub bound: Bound,
    /// A shrinking of `𝒰|_A` attaining `value`, when `A` is covered.
    pub witness: Option<IndexedFamily>,
    /// Search nodes visited across all feasibility tests.
    pub nodes: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Exact { limit: usize },
    Heuristic,
}

struct Problem {
    m: usize,
    n_max: usize,
    /// `ball[a]`: local indices `b` with `d(a,b) < t`.
    ball: Vec<Vec<usize>>,
    dom: Vec<u64>,
}

struct Search<'a> {
    p: &'a Problem,
    assign: Vec<Option<usize>>,
    counts: Vec<Vec<u32>>,
    used: Vec<u64>,
    distinct: Vec<usize>,
    nodes: u64,
    budget: u64,
    greedy: bool,
}

impl Search<'_> {
    fn current_domain(&self, a: usize) -> u64 {
        let mut d = self.p.dom[a];
        for &b in &self.p.ball[a] {
            if self.distinct[b] >= self.p.n_max {
                d &= self.used[b];
            }
        }
        d
    }

    fn place(&mut self, a: usize, s: usize) {
        self.assign[a] = Some(s);
        for &b in &self.p.ball[a] {
            self.counts[b][s] += 1;
            if self.counts[b][s] == 1 {
                self.used[b] |= 1 << s;
                self.distinct[b] += 1;
            }
        }
    }

    fn unplace(&mut self, a: usize, s: usize) {
        self.assign[a] = None;
        for &b in &self.p.ball[a] {
            self.counts[b][s] -= 1;
            if self.counts[b][s] == 0 {
                self.used[b] &= !(1 << s);
                self.distinct[b] -= 1;
            }
        }
    }

    /// `Ok(true)` when a full assignment was found.
    fn run(&mut self) -> Result<bool> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(Error::SizeLimit { size: self.p.m, limit: self.p.m - 1 });
        }
        let mut pick = None;
        let mut pick_dom = 0u64;
        for a in 0..self.p.m {
            if self.assign[a].is_some() {
                continue;
            }
            let d = self.current_domain(a);
            if d == 0 {
                return Ok(false);
            }
            if pick.is_none() || d.count_ones() < pick_dom.count_ones() {
                pick = Some(a);
                pick_dom = d;
            }
        }
        let Some(a) = pick else { return Ok(true) };
        let mut d = pick_dom;
        while d != 0 {
            let s = d.trailing_zeros() as usize;
            d &= d - 1;
            self.place(a, s);
            if self.p.ball[a].iter().all(|&b| self.distinct[b] <= self.p.n_max) && self.run()? {
                return Ok(true);
            }
            self.unplace(a, s);
            if self.greedy {
                return Ok(false);
            }
        }
        Ok(false)
    }
}

/// Outcome of one feasibility test: the label chosen per point of `A`.
fn feasible(
    space: &FiniteMetricSpace,
    u: &IndexedFamily,
    pts: &[usize],
    n: usize,
    t: f64,
    greedy: bool,
    nodes: &mut u64,
) -> Result<Option<Vec<usize>>> {
    let m = pts.len();
    let ball: Vec<Vec<usize>> = (0..m).map(|a| (0..m).filter(|&b| space.d(pts[a], pts[b]) < t).collect()).collect();
    let dom: Vec<u64> = (0..m)
        .map(|a| {
            let mut mask = 0u64;
            for (s, us) in u.sets().iter().enumerate() {
                if ball[a].iter().all(|&b| us.contains(pts[b])) {
                    mask |= 1 << s;
                }
            }
            mask
        })
        .collect();
    if dom.contains(&0) {
        return Ok(None);
    }
    let p = Problem { m, n_max: n + 1, ball, dom };
    let mut search = Search {
        p: &p,
        assign: vec![None; m],
        counts: vec![vec![0; u.len()]; m],
        used: vec![0; m],
        distinct: vec![0; m],
        nodes: 0,
        budget: NODE_BUDGET.saturating_sub(*nodes),
        greedy,
    };
    let found = search.run();
    *nodes += search.nodes;
    match found? {
        true => Ok(Some(search.assign.into_iter().map(|s| s.expect("complete")).collect())),
        false => Ok(None),
    }
}

/// Largest `t` such that every `t`-scale component of `A` lies in one member.
fn zero_dim_feasible(space: &FiniteMetricSpace, u: &IndexedFamily, a: &Subset, t: f64) -> Option<Vec<(usize, Subset)>> {
    space
        .m_scale_components(a, t)
        .into_iter()
        .map(|c| u.sets().iter().position(|us| c.is_subset(us)).map(|s| (s, c)))
        .collect()
}

/// `Lⁿ(𝒰, A)`. Exact mode refuses `|A|` above the limit (except for `n = 0`,
/// which reduces to scale components); heuristic mode replaces backtracking
/// by a greedy assignment and reports the value it attains.
pub fn higher_lebesgue(
    space: &FiniteMetricSpace,
    u: &IndexedFamily,
    a: &Subset,
    n: usize,
    mode: Mode,
) -> Result<HigherLebesgue> {
    if u.len() > 64 {
        return Err(Error::Parameter(format!("at most 64 labels are supported, got {}", u.len())));
    }
    let pts = a.to_vec();
    let bound = match mode {
        Mode::Exact { .. } => Bound::Exact,
        Mode::Heuristic => Bound::Heuristic,
    };
    if let Some(s) = u.sets().iter().position(|us| a.is_subset(us)) {
        let mut witness = IndexedFamily::empty(space.len());
        for (i, label) in u.labels().iter().enumerate() {
            let set = if i == s { a.clone() } else { Subset::empty(space.len()) };
            witness.push(label.clone(), set)?;
        }
        return Ok(HigherLebesgue { value: f64::INFINITY, bound: Bound::Exact, witness: Some(witness), nodes: 0 });
    }
    if !u.covers(a) {
        return Ok(HigherLebesgue { value: 0.0, bound: Bound::Exact, witness: None, nodes: 0 });
    }
    if let Mode::Exact { limit } = mode {
        if n > 0 && pts.len() > limit {
            return Err(Error::SizeLimit { size: pts.len(), limit });
        }
    }
    let mut candidates = space.distance_values(a);
    candidates.retain(|&d| d > 0.0);

    let mut nodes = 0u64;
    let mut best: Option<(f64, Vec<(usize, Subset)>)> = None;
    let (mut lo, mut hi) = (0usize, candidates.len());
    // invariant: candidates[..lo] feasible, candidates[hi..] infeasible
    while lo < hi {
        let mid = (lo + hi) / 2;
        let t = candidates[mid];
        let pieces = if n == 0 {
            zero_dim_feasible(space, u, a, t)
        } else {
            feasible(space, u, &pts, n, t, bound == Bound::Heuristic, &mut nodes)?
                .map(|j| pts.iter().zip(&j).map(|(&x, &s)| (s, space.point_ball(x, t).intersection(a))).collect())
        };
        match pieces {
            Some(p) => {
                best = Some((t, p));
                lo = mid + 1;
            }
            None => hi = mid,
        }
    }
    let Some((value, pieces)) = best else {
        return Err(Error::Certificate("covered subset with no feasible positive threshold".into()));
    };
    let mut sets = vec![Subset::empty(space.len()); u.len()];
    for (s, piece) in pieces {
        sets[s].union_with(&piece);
    }
    let witness = IndexedFamily::new(space.len(), u.labels().iter().cloned().zip(sets).collect())?;
    let achieved = lebesgue_within(space, &witness, a);
    if achieved < value || global_multiplicity(&witness, a) > n + 1 {
        return Err(Error::Certificate(format!(
            "witness shrinking attains {achieved} with multiplicity {}, expected >= {value} and <= {}",
            global_multiplicity(&witness, a),
            n + 1
        )));
    }
    let bound = if n == 0 { Bound::Exact } else { bound };
    Ok(HigherLebesgue { value, bound, witness: Some(witness), nodes })
}

/// Exact `Lⁿ(𝒰, A)` with the given size limit.
pub fn higher_lebesgue_exact(
    space: &FiniteMetricSpace,
    u: &IndexedFamily,
    a: &Subset,
    n: usize,
    limit: usize,
) -> Result<HigherLebesgue> {
    higher_lebesgue(space, u, a, n, Mode::Exact { limit })
}
