//! Weights on covering index sets and their moderateness.

use serde::{Deserialize, Serialize};

use super::{check_radii, Covering, CoveringFamily};
use crate::error::{Error, Result};
use crate::geometry::IntersectionBudget;

/// Positive weights `u_i`, one per set of a covering.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightFamily {
    pub values: Vec<f64>,
    /// Set for intrinsic weights `|Q_i|^α`.
    pub exponent: Option<f64>,
}

impl WeightFamily {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(v) = values.iter().find(|v| !(**v > 0.0 && v.is_finite())) {
            return Err(Error::Domain(format!("weights must be positive and finite, got {v}")));
        }
        Ok(Self { values, exponent: None })
    }

    /// The intrinsic weight `u_i = |Q_i|^α`.
    pub fn intrinsic(c: &Covering, alpha: f64) -> Result<Self> {
        let values = c.sets().iter().map(|s| s.volume().powf(alpha)).collect();
        Ok(Self { exponent: Some(alpha), ..Self::new(values)? })
    }

    /// Weights given by a function of each set's center.
    pub fn from_centers(c: &Covering, f: impl Fn(&[f64]) -> f64) -> Result<Self> {
        Self::new(c.sets().iter().map(|s| f(&s.center())).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Moderateness {
    /// `max u_i / u_j` over certain nerve edges (1 without edges).
    pub worst_ratio: f64,
    pub worst_edge: Option<(usize, usize)>,
}

impl Covering {
    /// Worst weight ratio across intersecting sets of this truncation.
    pub fn moderateness(&self, w: &WeightFamily) -> Result<Moderateness> {
        if w.values.len() != self.len() {
            return Err(Error::Usage(format!("{} weights for {} sets", w.values.len(), self.len())));
        }
        let mut worst = Moderateness { worst_ratio: 1.0, worst_edge: None };
        for (i, j) in self.nerve().edges() {
            let (a, b) = (w.values[i], w.values[j]);
            let (ratio, edge) = if a >= b { (a / b, (i, j)) } else { (b / a, (j, i)) };
            if ratio > worst.worst_ratio {
                worst = Moderateness { worst_ratio: ratio, worst_edge: Some(edge) };
            }
        }
        Ok(worst)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeratenessTrend {
    pub radii: Vec<f64>,
    pub worst_ratios: Vec<f64>,
    /// The worst ratio stays within `growth_threshold` of its first value.
    pub moderate: bool,
}

/// Worst edge ratio of `weights` on truncations of `family` at each radius.
pub fn moderateness_trend(
    family: &dyn CoveringFamily,
    radii: &[f64],
    weights: impl Fn(&Covering) -> Result<WeightFamily>,
    growth_threshold: f64,
    budget: &IntersectionBudget,
) -> Result<ModeratenessTrend> {
    check_radii(radii)?;
    let worst_ratios = radii
        .iter()
        .map(|&r| {
            let c = family.truncate(r, budget)?;
            Ok(c.moderateness(&weights(&c)?)?.worst_ratio)
        })
        .collect::<Result<Vec<_>>>()?;
    let lo = worst_ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = worst_ratios.iter().copied().fold(0.0, f64::max);
    Ok(ModeratenessTrend { radii: radii.to_vec(), moderate: hi.is_finite() && hi < growth_threshold * lo, worst_ratios })
}

#[cfg(test)]
mod tests {
    use super::super::tests::six_intervals;
    use super::super::{Domain, DyadicCovering};
    use super::*;

    #[test]
    fn constant_weight_ratio_one() {
        let c = six_intervals();
        let w = WeightFamily::intrinsic(&c, 0.0).unwrap();
        assert!(w.values.iter().all(|&v| v == 1.0));
        assert_eq!(c.moderateness(&w).unwrap().worst_ratio, 1.0);
    }

    #[test]
    fn dyadic_weights() {
        let dy = DyadicCovering::new(Domain::Positive);
        let budget = IntersectionBudget::default();
        let c = dy.truncate(1024.0, &budget).unwrap();
        let w = WeightFamily::intrinsic(&c, 1.0).unwrap();
        for (s, u) in c.sets().iter().zip(&w.values) {
            // the set 2^k (1/2, 3/2) has length 2^k and center 2^k
            assert_eq!(*u, s.center()[0]);
        }
        assert_eq!(c.moderateness(&w).unwrap().worst_ratio, 2.0);

        let squares = |c: &Covering| WeightFamily::from_centers(c, |x| 2f64.powf(x[0].log2().powi(2)));
        let trend = moderateness_trend(&dy, &[16.0, 256.0, 4096.0], squares, 2.0, &budget).unwrap();
        assert!(!trend.moderate);
        assert!(trend.worst_ratios.windows(2).all(|w| w[0] < w[1]));
        let intrinsic = |c: &Covering| WeightFamily::intrinsic(c, 1.0);
        assert!(moderateness_trend(&dy, &[16.0, 256.0, 4096.0], intrinsic, 2.0, &budget).unwrap().moderate);
    }

    #[test]
    fn rejects_bad_weights() {
        assert!(WeightFamily::new(vec![1.0, 0.0]).is_err());
        assert!(six_intervals().moderateness(&WeightFamily::new(vec![1.0]).unwrap()).is_err());
    }
}
