//! Obstructions to extending a partial real-valued function with bounded
//! oscillation along `M`-chains.
//!
//! If `g` extends `f` and moves by at most `K` across any step shorter than
//! `M`, then `|f(x_i) − f(y_i)| ≤ L_i·K` for every pair joined by an
//! `M`-chain of `L_i` steps. One pair breaking this rules out every such `g`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::FiniteMetricSpace;

/// Chains `x_i = c_0, c_1, …, c_{L_i} = y_i` through the space.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainData {
    pub chains: Vec<Vec<usize>>,
}

impl ChainData {
    pub fn endpoints(&self, i: usize) -> Option<(usize, usize)> {
        let c = self.chains.get(i)?;
        Some((*c.first()?, *c.last()?))
    }

    pub fn steps(&self, i: usize) -> usize {
        self.chains[i].len().saturating_sub(1)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum NoExtension {
    /// Pair `index` (0-based) has `gap > steps · K`.
    Certified { index: usize, steps: usize, gap: f64, budget: f64 },
    /// Every pair satisfies `gap ≤ steps · K`.
    Refuted,
}

/// `f` gives the values at the chain endpoints as `(f(x_i), f(y_i))`.
pub fn no_extension_certificate(
    space: &FiniteMetricSpace,
    chains: &ChainData,
    values: &[(f64, f64)],
    m: f64,
    k: f64,
) -> Result<NoExtension> {
    if values.len() != chains.chains.len() {
        return Err(Error::Parameter(format!("{} value pairs for {} chains", values.len(), chains.chains.len())));
    }
    if !(k >= 0.0) {
        return Err(Error::Parameter(format!("K = {k} must be nonnegative")));
    }
    for (i, c) in chains.chains.iter().enumerate() {
        if c.is_empty() || c.iter().any(|&p| p >= space.len()) {
            return Err(Error::Parameter(format!("chain {i} is empty or leaves the space")));
        }
        for (s, w) in c.windows(2).enumerate() {
            let length = space.d(w[0], w[1]);
            if length >= m {
                return Err(Error::ChainStep { chain: i, step: s, length, scale: m });
            }
        }
    }
    for (i, &(fx, fy)) in values.iter().enumerate() {
        let steps = chains.steps(i);
        let gap = (fx - fy).abs();
        let budget = steps as f64 * k;
        if gap > budget {
            return Ok(NoExtension::Certified { index: i, steps, gap, budget });
        }
    }
    Ok(NoExtension::Refuted)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Chain `i` (1-based) has `2i` unit steps; chains sit on parallel lines.
    fn ladder(count: usize) -> (FiniteMetricSpace, ChainData) {
        let mut coords = Vec::new();
        let mut chains = Vec::new();
        for i in 1..=count {
            let start = coords.len();
            for s in 0..=2 * i {
                coords.push(vec![s as f64, 100.0 * i as f64]);
            }
            chains.push((start..coords.len()).collect());
        }
        (FiniteMetricSpace::from_points(coords, 2.0, 0).unwrap(), ChainData { chains })
    }

    #[test]
    fn certified_at_five() {
        let (x, c) = ladder(10);
        let values: Vec<(f64, f64)> = (1..=10).map(|i| (i as f64, (i + i * 2 * i) as f64)).collect();
        let r = no_extension_certificate(&x, &c, &values, 2.0, 4.0).unwrap();
        assert_eq!(r, NoExtension::Certified { index: 4, steps: 10, gap: 50.0, budget: 40.0 });
        assert_eq!(no_extension_certificate(&x, &c, &values, 2.0, 11.0).unwrap(), NoExtension::Refuted);
        let flat = vec![(1.0, 1.0); 10];
        assert_eq!(no_extension_certificate(&x, &c, &flat, 2.0, 0.0).unwrap(), NoExtension::Refuted);
        assert!(matches!(
            no_extension_certificate(&x, &c, &values, 1.0, 4.0),
            Err(Error::ChainStep { chain: 0, step: 0, .. })
        ));
    }
}
