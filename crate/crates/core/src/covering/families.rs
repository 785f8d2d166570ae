//! Covering families that can be truncated to any radius.

use serde::{Deserialize, Serialize};

use super::{Covering, Truncation};
use crate::error::{Error, Result};
use crate::geometry::{BaseSet, BoundingBox, CoveringSet, IntersectionBudget};
use crate::linalg::Matrix;

/// An infinite indexed covering, materialized one truncation at a time.
pub trait CoveringFamily: Send + Sync {
    fn label(&self) -> String;
    fn dim(&self) -> usize;
    /// The sets meeting the frequency window of radius `radius`.
    fn truncate(&self, radius: f64, budget: &IntersectionBudget) -> Result<Covering>;
}

/// The part of the line a one-dimensional family covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Domain {
    /// All of `R^d`; window `[-R, R]^d`.
    #[default]
    Line,
    /// `(0, ∞)`; window `[1/R, R]`.
    Positive,
    /// `R \ {0}`; window `[-R, R]`, sets of size below `1/R` dropped.
    Punctured,
}

impl Domain {
    fn window(self, radius: f64, dim: usize) -> BoundingBox {
        match self {
            Self::Positive => BoundingBox { lo: vec![1.0 / radius], hi: vec![radius] },
            Self::Line | Self::Punctured => BoundingBox { lo: vec![-radius; dim], hi: vec![radius; dim] },
        }
    }
}

fn check_radius(radius: f64) -> Result<()> {
    if radius > 0.0 && radius.is_finite() {
        Ok(())
    } else {
        Err(Error::Usage(format!("truncation radius must be positive, got {radius}")))
    }
}

fn interval(center: f64, half: f64) -> Result<CoveringSet> {
    CoveringSet::affine(Matrix::identity(1), vec![0.0], BaseSet::axis_box(vec![center], vec![half])?)
}

/// Cubes of side `2 step` centered on the lattice `step · Z^d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UniformCovering {
    pub dim: usize,
    pub step: f64,
    #[serde(default)]
    pub domain: Domain,
}

impl UniformCovering {
    pub fn new(dim: usize, step: f64, domain: Domain) -> Result<Self> {
        if dim == 0 || !(step > 0.0 && step.is_finite()) {
            return Err(Error::Construction("uniform covering needs dim >= 1 and a positive step".into()));
        }
        if domain != Domain::Line && dim != 1 {
            return Err(Error::Construction("half-line domains are one-dimensional".into()));
        }
        if domain == Domain::Punctured {
            return Err(Error::Construction("the uniform covering does not cover a punctured line".into()));
        }
        Ok(Self { dim, step, domain })
    }
}

impl CoveringFamily for UniformCovering {
    fn label(&self) -> String {
        format!("uniform(step={})", self.step)
    }

    fn dim(&self) -> usize {
        self.dim
    }

    fn truncate(&self, radius: f64, budget: &IntersectionBudget) -> Result<Covering> {
        check_radius(radius)?;
        let window = self.domain.window(radius, self.dim);
        let h = self.step;
        // k h - h < hi and k h + h > lo
        let k_lo = ((window.lo[0] / h) - 1.0).floor() as i64 + 1;
        let k_hi = ((window.hi[0] / h) + 1.0).ceil() as i64 - 1;
        let k_lo = if self.domain == Domain::Positive { k_lo.max(1) } else { k_lo };
        let ks: Vec<i64> = (k_lo..=k_hi).collect();
        let count = (ks.len() as u128).pow(self.dim as u32);
        if count > 5_000_000 {
            return Err(Error::Usage(format!("truncation would hold {count} sets")));
        }
        let mut sets = Vec::with_capacity(count as usize);
        let mut idx = vec![0usize; self.dim];
        'outer: loop {
            let center: Vec<f64> = idx.iter().map(|&i| ks[i] as f64 * h).collect();
            let base = BaseSet::axis_box(center, vec![h; self.dim])?;
            sets.push(CoveringSet::affine(Matrix::identity(self.dim), vec![0.0; self.dim], base)?);
            for slot in idx.iter_mut() {
                *slot += 1;
                if *slot < ks.len() {
                    continue 'outer;
                }
                *slot = 0;
            }
            break;
        }
        Covering::new(self.label(), sets, Truncation { radius, window }, budget)
    }
}

/// Dyadic bands `Q_k = 2^k (1/2, 3/2)`; only neighboring bands overlap.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DyadicCovering {
    pub domain: Domain,
}

impl DyadicCovering {
    pub fn new(domain: Domain) -> Self {
        Self { domain }
    }

    /// Center and half-width of `Q_k`.
    pub fn band(k: i32) -> (f64, f64) {
        let c = 2f64.powi(k);
        (c, 0.5 * c)
    }
}

impl CoveringFamily for DyadicCovering {
    fn label(&self) -> String {
        "dyadic".into()
    }

    fn dim(&self) -> usize {
        1
    }

    fn truncate(&self, radius: f64, budget: &IntersectionBudget) -> Result<Covering> {
        check_radius(radius)?;
        if self.domain == Domain::Line {
            return Err(Error::Construction("dyadic bands cannot cover the origin".into()));
        }
        let window = self.domain.window(radius, 1);
        let floor = 1.0 / radius;
        let mut sets = Vec::new();
        let signs: &[f64] = if self.domain == Domain::Punctured { &[-1.0, 1.0] } else { &[1.0] };
        for &sign in signs {
            for k in -1100..1100 {
                let (c, h) = Self::band(k);
                if c - h < radius && c + h > floor {
                    sets.push(interval(sign * c, h)?);
                }
            }
        }
        Covering::new(self.label(), sets, Truncation { radius, window }, budget)
    }
}

/// The α-modulation covering `P_k = B(k|k|^β, r|k|^β)` of the line,
/// `β = α / (1 − α)`; `k = 0` is kept only for `α = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlphaModulation {
    pub alpha: f64,
    pub r: f64,
}

impl AlphaModulation {
    /// Uses the default radius factor `r = 1 + β`.
    pub fn new(alpha: f64) -> Result<Self> {
        Self::check_alpha(alpha)?;
        Self::with_radius(alpha, 1.0 + alpha / (1.0 - alpha))
    }

    pub fn with_radius(alpha: f64, r: f64) -> Result<Self> {
        Self::check_alpha(alpha)?;
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::Construction(format!("radius factor must be positive, got {r}")));
        }
        Ok(Self { alpha, r })
    }

    fn check_alpha(alpha: f64) -> Result<()> {
        if (0.0..1.0).contains(&alpha) {
            Ok(())
        } else {
            Err(Error::Construction(format!("alpha must lie in [0, 1), got {alpha}")))
        }
    }

    pub fn beta(&self) -> f64 {
        self.alpha / (1.0 - self.alpha)
    }

    /// Center and radius of `P_k`.
    pub fn ball(&self, k: i64) -> (f64, f64) {
        let m = (k.unsigned_abs() as f64).powf(self.beta());
        (k as f64 * m, self.r * m)
    }
}

impl CoveringFamily for AlphaModulation {
    fn label(&self) -> String {
        format!("alpha_modulation(alpha={}, r={})", self.alpha, self.r)
    }

    fn dim(&self) -> usize {
        1
    }

    fn truncate(&self, radius: f64, budget: &IntersectionBudget) -> Result<Covering> {
        check_radius(radius)?;
        let window = Domain::Line.window(radius, 1);
        let mut balls = Vec::new();
        if self.alpha == 0.0 {
            balls.push(self.ball(0));
        }
        // c_k - ρ_k = k^β (k - r) is increasing once k exceeds r
        let mut k: i64 = 1;
        loop {
            let (c, rho) = self.ball(k);
            if c - rho >= radius && k as f64 > self.r {
                break;
            }
            if c - rho < radius {
                balls.push((c, rho));
                balls.push((-c, rho));
            }
            k += 1;
        }
        balls.sort_by(|a, b| a.0.total_cmp(&b.0));
        if let Some(x) = first_uncovered(&balls, radius) {
            return Err(Error::Construction(format!(
                "alpha-modulation balls with r = {} leave {x} uncovered",
                self.r
            )));
        }
        let sets = balls.into_iter().map(|(c, rho)| interval(c, rho)).collect::<Result<Vec<_>>>()?;
        Covering::new(self.label(), sets, Truncation { radius, window }, budget)
    }
}

/// First point of `[-radius, radius]` outside every open interval `c ± ρ`.
fn first_uncovered(balls: &[(f64, f64)], radius: f64) -> Option<f64> {
    let mut ends: Vec<(f64, f64)> = balls.iter().map(|&(c, rho)| (c - rho, c + rho)).collect();
    ends.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut reach = -radius;
    let mut best = f64::NEG_INFINITY;
    let mut i = 0;
    loop {
        while i < ends.len() && ends[i].0 < reach {
            best = best.max(ends[i].1);
            i += 1;
        }
        if best <= reach {
            return Some(reach);
        }
        if best > radius {
            return None;
        }
        reach = best;
    }
}

/// A fixed finite list of sets; truncation keeps those meeting `[-R, R]^d`.
#[derive(Debug, Clone)]
pub struct ExplicitCovering {
    pub label: String,
    pub sets: Vec<CoveringSet>,
}

impl CoveringFamily for ExplicitCovering {
    fn label(&self) -> String {
        self.label.clone()
    }

    fn dim(&self) -> usize {
        self.sets.first().map_or(1, CoveringSet::dim)
    }

    fn truncate(&self, radius: f64, budget: &IntersectionBudget) -> Result<Covering> {
        check_radius(radius)?;
        let d = self.dim();
        let cube = Domain::Line.window(radius, d);
        let kept: Vec<CoveringSet> =
            self.sets.iter().filter(|s| s.bounding_box().overlaps_open(&cube)).cloned().collect();
        let mut window = BoundingBox { lo: vec![f64::INFINITY; d], hi: vec![f64::NEG_INFINITY; d] };
        for s in &kept {
            let bb = s.bounding_box();
            for i in 0..d {
                window.lo[i] = window.lo[i].min(bb.lo[i]).max(-radius);
                window.hi[i] = window.hi[i].max(bb.hi[i]).min(radius);
            }
        }
        Covering::new(self.label.clone(), kept, Truncation { radius, window }, budget)
    }
}
