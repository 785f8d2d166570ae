//! The chain distance on a covering and the neighbor-hop function.
//!
//! A chain of length `m` from `x` to `y` is a sequence `Q_1, …, Q_m` with
//! `x ∈ Q_1`, `y ∈ Q_m` and consecutive sets overlapping. Its shortest length
//! is found by breadth-first search in the nerve, started from every set that
//! contains `x`.

use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{AlphaModulation, Covering, CoveringFamily, EdgeMode};
use crate::coarse::fit_with_additive_cap;
use crate::error::{Error, Result};
use crate::geometry::IntersectionBudget;

impl Covering {
    fn check_in_window(&self, x: &[f64]) -> Result<()> {
        crate::error::check_dim(self.dim(), x.len())?;
        if !self.truncation().window.contains(x) {
            return Err(Error::Usage(format!("point {x:?} lies outside the truncation window")));
        }
        Ok(())
    }

    /// Hop counts from the index set `sources` (distance 0) to every index.
    pub fn hop_levels(&self, sources: &[usize], mode: EdgeMode) -> Vec<Option<u32>> {
        let mut level = vec![None; self.len()];
        let mut queue = VecDeque::new();
        for &s in sources {
            if level[s].is_none() {
                level[s] = Some(0);
                queue.push_back(s);
            }
        }
        while let Some(i) = queue.pop_front() {
            let next = level[i].unwrap() + 1;
            for j in self.nerve().adjacency(mode, i) {
                if level[j].is_none() {
                    level[j] = Some(next);
                    queue.push_back(j);
                }
            }
        }
        level
    }

    /// Length of the shortest chain from `x` to `y`; `None` when no chain
    /// exists inside the truncation (a larger truncation might connect them).
    pub fn chain_distance(&self, x: &[f64], y: &[f64]) -> Result<Option<u32>> {
        self.chain_distance_with(x, y, EdgeMode::Certain)
    }

    /// `(lower, upper)` bounds on the chain distance: the lower bound treats
    /// undecided pairs as overlapping, the upper bound does not.
    pub fn chain_distance_bounds(&self, x: &[f64], y: &[f64]) -> Result<(Option<u32>, Option<u32>)> {
        Ok((self.chain_distance_with(x, y, EdgeMode::Possible)?, self.chain_distance_with(x, y, EdgeMode::Certain)?))
    }

    fn chain_distance_with(&self, x: &[f64], y: &[f64], mode: EdgeMode) -> Result<Option<u32>> {
        self.check_in_window(x)?;
        self.check_in_window(y)?;
        if x == y {
            return Ok(Some(0));
        }
        let sx = self.sets_containing(x)?;
        let sy = self.sets_containing(y)?;
        let levels = self.hop_levels(&sx, mode);
        Ok(chain_length(&levels, &sy))
    }

    /// Chain distances from `x` to each of `targets`, with one search.
    pub fn chain_distances_from(&self, x: &[f64], targets: &[Vec<f64>]) -> Result<Vec<Option<u32>>> {
        self.check_in_window(x)?;
        let levels = self.hop_levels(&self.sets_containing(x)?, EdgeMode::Certain);
        targets
            .iter()
            .map(|y| {
                self.check_in_window(y)?;
                if y.as_slice() == x {
                    return Ok(Some(0));
                }
                Ok(chain_length(&levels, &self.sets_containing(y)?))
            })
            .collect()
    }

    /// `inf { n ≥ 1 : x, y ∈ Q_i^{n*} for some i }`, where `Q_i^{n*}` is the
    /// union of the sets within `n` nerve steps of `i`. It is not a metric.
    pub fn neighbor_hop_function(&self, x: &[f64], y: &[f64]) -> Result<Option<u32>> {
        self.check_in_window(x)?;
        self.check_in_window(y)?;
        if x == y {
            return Ok(Some(0));
        }
        let dx = self.hop_levels(&self.sets_containing(x)?, EdgeMode::Certain);
        let dy = self.hop_levels(&self.sets_containing(y)?, EdgeMode::Certain);
        Ok(dx
            .iter()
            .zip(&dy)
            .filter_map(|(a, b)| Some((*a)?.max((*b)?)))
            .min()
            .map(|n| n.max(1)))
    }
}

fn chain_length(levels: &[Option<u32>], targets: &[usize]) -> Option<u32> {
    targets.iter().filter_map(|&j| levels[j]).min().map(|h| h + 1)
}

/// `1 + | |t|^{1−α} − sign(st) |s|^{1−α} |`, the closed-form comparison
/// quantity for the α-modulation chain metric.
pub fn closed_form_alpha_metric(alpha: f64, s: f64, t: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&alpha) {
        return Err(Error::Domain(format!("alpha must lie in [0, 1), got {alpha}")));
    }
    if alpha > 0.0 && (s == 0.0 || t == 0.0) {
        return Err(Error::Domain("s and t must be nonzero when alpha > 0".into()));
    }
    let e = 1.0 - alpha;
    let sign = if s == 0.0 || t == 0.0 { 0.0 } else { s.signum() * t.signum() };
    Ok(1.0 + (t.abs().powf(e) - sign * s.abs().powf(e)).abs())
}

/// Outcome of comparing the α-modulation chain metric with
/// [`closed_form_alpha_metric`] on sampled pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlphaLawFit {
    pub alpha: f64,
    pub radius: f64,
    pub sets: usize,
    pub pairs: usize,
    pub additive_cap: f64,
    /// `chain/L − C ≤ closed ≤ L·chain + C` on every sampled pair.
    pub l: f64,
    pub c: f64,
}

/// Samples `pairs` point pairs uniformly in `[-R, R] \ {0}` and fits the
/// two-sided distortion between the chain distance and the closed form.
pub fn alpha_metric_law(
    covering: &AlphaModulation,
    radius: f64,
    pairs: usize,
    additive_cap: f64,
    seed: u64,
    budget: &IntersectionBudget,
) -> Result<AlphaLawFit> {
    let cov = covering.truncate(radius, budget)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut samples = Vec::with_capacity(pairs);
    while samples.len() < pairs {
        let (s, t): (f64, f64) = (rng.gen_range(-radius..radius), rng.gen_range(-radius..radius));
        if s == 0.0 || t == 0.0 {
            continue;
        }
        let d = cov
            .chain_distance(&[s], &[t])?
            .ok_or_else(|| Error::Construction(format!("no chain joins {s} and {t} inside the truncation")))?;
        samples.push((f64::from(d), closed_form_alpha_metric(covering.alpha, s, t)?));
    }
    let (l, c) = fit_with_additive_cap(&samples, additive_cap);
    Ok(AlphaLawFit { alpha: covering.alpha, radius, sets: cov.len(), pairs, additive_cap, l, c })
}

#[cfg(test)]
mod tests {
    use super::super::tests::six_intervals;
    use super::*;

    #[test]
    fn counterexample_values() {
        let c = six_intervals();
        let (x, y, z) = ([1.0], [4.75], [9.25]);
        assert_eq!(c.chain_distance(&x, &y).unwrap(), Some(3));
        assert_eq!(c.chain_distance(&y, &z).unwrap(), Some(3));
        assert_eq!(c.chain_distance(&x, &z).unwrap(), Some(6));
        assert_eq!(c.neighbor_hop_function(&x, &y).unwrap(), Some(1));
        assert_eq!(c.neighbor_hop_function(&y, &z).unwrap(), Some(1));
        assert_eq!(c.neighbor_hop_function(&x, &z).unwrap(), Some(3));
        assert_eq!(c.chain_distance(&x, &x).unwrap(), Some(0));
        assert!(c.chain_distance(&x, &[12.0]).is_err());
    }

    #[test]
    fn common_set_means_distance_one() {
        let c = six_intervals();
        assert_eq!(c.chain_distance(&[0.5], &[1.9]).unwrap(), Some(1));
        assert_eq!(c.chain_distance_bounds(&[0.5], &[1.9]).unwrap(), (Some(1), Some(1)));
    }

    #[test]
    fn batched_distances_match() {
        let c = six_intervals();
        let ys = vec![vec![4.75], vec![9.25], vec![1.0]];
        assert_eq!(c.chain_distances_from(&[1.0], &ys).unwrap(), vec![Some(3), Some(6), Some(0)]);
    }

    #[test]
    fn alpha_law_is_tight_for_uniform_balls() {
        let fit = alpha_metric_law(&AlphaModulation::new(0.0).unwrap(), 200.0, 300, 4.0, 1, &IntersectionBudget::default()).unwrap();
        assert_eq!(fit.l, 1.0);
        assert!(fit.c <= 2.0, "{fit:?}");
    }

    #[test]
    fn closed_form() {
        assert_eq!(closed_form_alpha_metric(0.5, 7.0, 7.0).unwrap(), 1.0);
        assert_eq!(closed_form_alpha_metric(0.0, 1.0, 9.0).unwrap(), 9.0);
        assert_eq!(closed_form_alpha_metric(0.5, 1.0, 100.0).unwrap(), 10.0);
        assert_eq!(closed_form_alpha_metric(0.5, -1.0, 4.0).unwrap(), 4.0);
        assert!(closed_form_alpha_metric(0.5, 0.0, 4.0).is_err());
        assert!(closed_form_alpha_metric(1.0, 1.0, 4.0).is_err());
    }
}
