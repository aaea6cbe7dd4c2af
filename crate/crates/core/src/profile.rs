//! Scale profiles: finite tables `t ↦ v` standing in for asymptotic
//! statements of the form "… as x → ∞". Values may be `+∞`.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::FiniteMetricSpace;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfileEntry {
    #[serde(with = "crate::ext::real")]
    pub t: f64,
    #[serde(with = "crate::ext::real")]
    pub v: f64,
}

/// Table of `(t, v)` with strictly increasing `t`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ScaleProfile {
    pub entries: Vec<ProfileEntry>,
}

/// How values outside a ball are aggregated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Tail {
    Min,
    Max,
}

impl ScaleProfile {
    pub fn new(entries: Vec<(f64, f64)>) -> Result<Self> {
        if entries.windows(2).any(|w| !(w[0].0 < w[1].0)) {
            return Err(Error::Parse("profile thresholds must be strictly increasing".into()));
        }
        Ok(ScaleProfile { entries: entries.into_iter().map(|(t, v)| ProfileEntry { t, v }).collect() })
    }

    /// For every radius `t` in the basepoint-distance grid, aggregate
    /// `values` over `X ∖ B(x₀, t) = {x : d(x₀,x) ≥ t}`.
    pub fn over_tails(space: &FiniteMetricSpace, values: &[f64], agg: Tail) -> Self {
        Self::over_tails_of(space, values, agg, |_| true)
    }

    /// As [`ScaleProfile::over_tails`], restricted to points passing `keep`.
    /// Tails with no kept point get `+∞` for `Min` and `0` for `Max`.
    pub fn over_tails_of(space: &FiniteMetricSpace, values: &[f64], agg: Tail, keep: impl Fn(usize) -> bool) -> Self {
        let mut order: Vec<usize> = (0..space.len()).collect();
        order.sort_by(|&a, &b| space.depth(b).total_cmp(&space.depth(a)));
        let mut acc = match agg {
            Tail::Min => f64::INFINITY,
            Tail::Max => 0.0,
        };
        let mut entries = Vec::new();
        let mut k = 0;
        while k < order.len() {
            let t = space.depth(order[k]);
            while k < order.len() && space.depth(order[k]) == t {
                let x = order[k];
                if keep(x) {
                    acc = match agg {
                        Tail::Min => acc.min(values[x]),
                        Tail::Max => acc.max(values[x]),
                    };
                }
                k += 1;
            }
            entries.push(ProfileEntry { t, v: acc });
        }
        entries.reverse();
        ScaleProfile { entries }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Value at the largest threshold `≤ t`, if any.
    pub fn value_at(&self, t: f64) -> Option<f64> {
        self.entries.iter().take_while(|e| e.t <= t).last().map(|e| e.v)
    }

    pub fn is_nondecreasing(&self) -> bool {
        self.entries.windows(2).all(|w| w[0].v <= w[1].v)
    }

    pub fn is_nonincreasing(&self) -> bool {
        self.entries.windows(2).all(|w| w[0].v >= w[1].v)
    }

    /// `t,value` CSV with LF endings; `inf` for infinities; floats in
    /// shortest round-trip form.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,value\n");
        for e in &self.entries {
            let _ = writeln!(out, "{},{}", fmt_real(e.t), fmt_real(e.v));
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        match lines.next() {
            Some("t,value") => {}
            other => return Err(Error::Parse(format!("expected header `t,value`, got {other:?}"))),
        }
        let mut entries = Vec::new();
        for (n, line) in lines.enumerate() {
            if line.is_empty() {
                continue;
            }
            let (t, v) =
                line.split_once(',').ok_or_else(|| Error::Parse(format!("line {}: expected two cells", n + 2)))?;
            entries.push((parse_real(t)?, parse_real(v)?));
        }
        Self::new(entries)
    }

    /// A single polyline chart. Infinite values are clipped to the largest
    /// finite value and marked with a ring.
    pub fn to_svg(&self, title: &str) -> String {
        const W: f64 = 640.0;
        const H: f64 = 400.0;
        const PAD: f64 = 50.0;
        let finite = |x: f64| x.is_finite();
        let ts: Vec<f64> = self.entries.iter().map(|e| e.t).filter(|&t| finite(t)).collect();
        let vs: Vec<f64> = self.entries.iter().map(|e| e.v).filter(|&v| finite(v)).collect();
        let (t0, t1) = bounds(&ts);
        let (v0, v1) = bounds(&vs);
        let sx = |t: f64| PAD + (t - t0) / (t1 - t0) * (W - 2.0 * PAD);
        let sy = |v: f64| H - PAD - (v - v0) / (v1 - v0) * (H - 2.0 * PAD);

        let mut out = String::new();
        let _ =
            writeln!(out, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#);
        let _ = writeln!(out, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
        let _ = writeln!(
            out,
            r#"<text x="{}" y="24" font-family="sans-serif" font-size="14" text-anchor="middle">{}</text>"#,
            W / 2.0,
            escape(title)
        );
        let _ =
            writeln!(out, r#"<line x1="{PAD}" y1="{y}" x2="{x}" y2="{y}" stroke="black"/>"#, y = H - PAD, x = W - PAD);
        let _ = writeln!(out, r#"<line x1="{PAD}" y1="{PAD}" x2="{PAD}" y2="{}" stroke="black"/>"#, H - PAD);
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" font-family="sans-serif" font-size="12" text-anchor="middle">t</text>"#,
            W / 2.0,
            H - 12.0
        );
        let _ = writeln!(
            out,
            r#"<text x="14" y="{}" font-family="sans-serif" font-size="12" transform="rotate(-90 14 {})" text-anchor="middle">value</text>"#,
            H / 2.0,
            H / 2.0
        );
        for (x, y, label) in [(PAD, H - PAD + 16.0, fmt_real(t0)), (W - PAD, H - PAD + 16.0, fmt_real(t1))] {
            let _ = writeln!(
                out,
                r#"<text x="{x}" y="{y}" font-family="sans-serif" font-size="10" text-anchor="middle">{label}</text>"#
            );
        }
        for (y, label) in [(H - PAD, fmt_real(v0)), (PAD, fmt_real(v1))] {
            let _ = writeln!(
                out,
                r#"<text x="{}" y="{y}" font-family="sans-serif" font-size="10" text-anchor="end">{label}</text>"#,
                PAD - 4.0
            );
        }
        let pts: Vec<(f64, f64, bool)> = self
            .entries
            .iter()
            .filter(|e| e.t.is_finite())
            .map(|e| (sx(e.t), sy(if e.v.is_finite() { e.v } else { v1 }), !e.v.is_finite()))
            .collect();
        if !pts.is_empty() {
            let path: Vec<String> = pts.iter().map(|(x, y, _)| format!("{x:.3},{y:.3}")).collect();
            let _ = writeln!(
                out,
                r#"<polyline fill="none" stroke="steelblue" stroke-width="2" points="{}"/>"#,
                path.join(" ")
            );
        }
        for (x, y, clipped) in pts {
            if clipped {
                let _ = writeln!(out, r#"<circle cx="{x:.3}" cy="{y:.3}" r="4" fill="none" stroke="crimson"/>"#);
            }
        }
        out.push_str("</svg>\n");
        out
    }
}

fn bounds(xs: &[f64]) -> (f64, f64) {
    let lo = xs.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !lo.is_finite() {
        (0.0, 1.0)
    } else if hi > lo {
        (lo, hi)
    } else {
        (lo, lo + 1.0)
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

pub fn fmt_real(x: f64) -> String {
    if x == f64::INFINITY {
        "inf".into()
    } else if x == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{x}")
    }
}

pub fn parse_real(s: &str) -> Result<f64> {
    let s = s.trim();
    s.parse::<f64>().ok().filter(|x| !x.is_nan()).ok_or_else(|| Error::Parse(format!("`{s}` is not a number")))
}

/// Smallest radius `t` of the basepoint grid such that every point with
/// `d(x₀,x) ≥ t` satisfies `ok`. `0` when all points do, `+∞` when a point
/// at maximal depth fails.
pub fn tail_radius(space: &FiniteMetricSpace, ok: impl Fn(usize) -> bool) -> f64 {
    let worst = (0..space.len()).filter(|&x| !ok(x)).map(|x| space.depth(x)).fold(f64::NEG_INFINITY, f64::max);
    if worst == f64::NEG_INFINITY {
        return 0.0;
    }
    space.radius_grid().into_iter().find(|&t| t > worst).unwrap_or(f64::INFINITY)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(n: usize) -> FiniteMetricSpace {
        FiniteMetricSpace::from_fn_unchecked(n, 0, |i, j| (i as f64 - j as f64).abs())
    }

    #[test]
    fn csv_round_trip_with_infinity() {
        let p = ScaleProfile::new(vec![(0.0, 0.5), (1.0 / 3.0, f64::INFINITY)]).unwrap();
        let csv = p.to_csv();
        assert_eq!(csv, "t,value\n0,0.5\n0.3333333333333333,inf\n");
        assert_eq!(ScaleProfile::from_csv(&csv).unwrap(), p);
        assert_eq!(ScaleProfile::default().to_csv(), "t,value\n");
    }

    #[test]
    fn tails_min_and_max() {
        let x = line(5);
        let v = [4.0, 3.0, 5.0, 1.0, 2.0];
        let min = ScaleProfile::over_tails(&x, &v, Tail::Min);
        let got: Vec<f64> = min.entries.iter().map(|e| e.v).collect();
        assert_eq!(got, vec![1.0, 1.0, 1.0, 1.0, 2.0]);
        let max = ScaleProfile::over_tails(&x, &v, Tail::Max);
        let got: Vec<f64> = max.entries.iter().map(|e| e.v).collect();
        assert_eq!(got, vec![5.0, 5.0, 5.0, 2.0, 2.0]);
    }

    #[test]
    fn tail_radius_edges() {
        let x = line(5);
        assert_eq!(tail_radius(&x, |_| true), 0.0);
        assert_eq!(tail_radius(&x, |p| p != 2), 3.0);
        assert_eq!(tail_radius(&x, |p| p != 4), f64::INFINITY);
    }

    #[test]
    fn svg_is_deterministic() {
        let p = ScaleProfile::new(vec![(0.0, 1.0), (2.0, f64::INFINITY)]).unwrap();
        let a = p.to_svg("demo");
        assert_eq!(a, p.to_svg("demo"));
        assert!(a.contains("<circle"));
    }
}
