//! Covering sets in frequency space.
//!
//! A [`CoveringSet`] is an open set given either as an affine image `T Q + b`
//! of a base set `Q`, or as a pullback `g^{-T} Q` of a base set by a matrix `g`
//! (`x` is in the set iff `g^T x ∈ Q`). Both are affine images of boxes or
//! balls, so membership is exact up to floating point, volumes are closed form,
//! and pairwise intersection is decided by [`intersects`].

use std::ops::Deref;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::linalg::Matrix;
use crate::scalar::{Scalar, Q};

/// A point of `R^d` with finite coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrequencyPoint(Vec<f64>);

impl FrequencyPoint {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::Usage("frequency point needs at least one coordinate".into()));
        }
        if let Some(x) = coords.iter().find(|x| !x.is_finite()) {
            return Err(Error::Domain(format!("non-finite coordinate {x}")));
        }
        Ok(Self(coords))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for FrequencyPoint {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl From<f64> for FrequencyPoint {
    fn from(x: f64) -> Self {
        Self(vec![x])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BaseSet {
    /// Open box `center ± half_widths`.
    AxisBox { center: Vec<f64>, half_widths: Vec<f64> },
    /// Open Euclidean ball.
    EuclideanBall { center: Vec<f64>, radius: f64 },
}

impl BaseSet {
    pub fn axis_box(center: Vec<f64>, half_widths: Vec<f64>) -> Result<Self> {
        check_dim(center.len(), half_widths.len())?;
        if half_widths.iter().any(|h| !(*h > 0.0 && h.is_finite())) {
            return Err(Error::Construction("box half-widths must be positive".into()));
        }
        Ok(Self::AxisBox { center, half_widths })
    }

    /// The open box with corners `lo` and `hi`.
    pub fn from_bounds(lo: &[f64], hi: &[f64]) -> Result<Self> {
        check_dim(lo.len(), hi.len())?;
        let center = lo.iter().zip(hi).map(|(a, b)| 0.5 * (a + b)).collect();
        let half = lo.iter().zip(hi).map(|(a, b)| 0.5 * (b - a)).collect();
        Self::axis_box(center, half)
    }

    pub fn ball(center: Vec<f64>, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::Construction("ball radius must be positive".into()));
        }
        Ok(Self::EuclideanBall { center, radius })
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::AxisBox { center, .. } | Self::EuclideanBall { center, .. } => center.len(),
        }
    }

    pub fn center(&self) -> &[f64] {
        match self {
            Self::AxisBox { center, .. } | Self::EuclideanBall { center, .. } => center,
        }
    }

    pub fn contains(&self, u: &[f64]) -> bool {
        match self {
            Self::AxisBox { center, half_widths } => center
                .iter()
                .zip(half_widths)
                .zip(u)
                .all(|((c, h), x)| (x - c).abs() < *h),
            Self::EuclideanBall { center, radius } => {
                center.iter().zip(u).map(|(c, x)| (x - c) * (x - c)).sum::<f64>() < radius * radius
            }
        }
    }

    pub fn volume(&self) -> f64 {
        match self {
            Self::AxisBox { half_widths, .. } => half_widths.iter().map(|h| 2.0 * h).product(),
            Self::EuclideanBall { radius, .. } => unit_ball_volume(self.dim()) * radius.powi(self.dim() as i32),
        }
    }

    /// Exact volume of a box whose half-widths are exactly representable.
    pub fn volume_exact(&self) -> Option<Q> {
        match self {
            Self::AxisBox { half_widths, .. } => half_widths
                .iter()
                .map(|h| Q::from_float(2.0 * h))
                .try_fold(<Q as Scalar>::one(), |acc, v| v.map(|v| acc * v)),
            Self::EuclideanBall { .. } => None,
        }
    }

    fn half_extent(&self) -> Vec<f64> {
        match self {
            Self::AxisBox { half_widths, .. } => half_widths.clone(),
            Self::EuclideanBall { center, radius } => vec![*radius; center.len()],
        }
    }

    /// Whether the closed box `mid ± half` misses this (open) set.
    fn misses_box(&self, mid: &[f64], half: &[f64]) -> bool {
        match self {
            Self::AxisBox { center, half_widths } => center
                .iter()
                .zip(half_widths)
                .zip(mid.iter().zip(half))
                .any(|((c, h), (m, e))| (m - c).abs() >= h + e),
            Self::EuclideanBall { center, radius } => {
                let d2: f64 = center
                    .iter()
                    .zip(mid.iter().zip(half))
                    .map(|(c, (m, e))| {
                        let g = ((m - c).abs() - e).max(0.0);
                        g * g
                    })
                    .sum();
                d2 >= radius * radius
            }
        }
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        match self {
            Self::AxisBox { center, half_widths } => center
                .iter()
                .zip(half_widths)
                .map(|(c, h)| c + h * rng.gen_range(-1.0..1.0))
                .collect(),
            Self::EuclideanBall { center, radius } => loop {
                let u: Vec<f64> = center.iter().map(|_| rng.gen_range(-1.0..1.0)).collect();
                if u.iter().map(|x| x * x).sum::<f64>() < 1.0 {
                    break center.iter().zip(u).map(|(c, x)| c + radius * x).collect();
                }
            },
        }
    }
}

fn unit_ball_volume(d: usize) -> f64 {
    match d {
        0 => 1.0,
        1 => 2.0,
        _ => 2.0 * std::f64::consts::PI / d as f64 * unit_ball_volume(d - 2),
    }
}

/// How a covering set was specified.
#[derive(Debug, Clone, PartialEq)]
pub enum SetRep {
    AffineImage { t: Matrix<f64>, b: Vec<f64>, base: BaseSet },
    Pullback { g: Matrix<f64>, base: BaseSet },
}

/// Axis-aligned closed box `[lo, hi]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundingBox {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl BoundingBox {
    pub fn overlaps_open(&self, other: &Self) -> bool {
        self.lo.iter().zip(&self.hi).zip(other.lo.iter().zip(&other.hi)).all(|((a0, a1), (b0, b1))| a0.max(*b0) < a1.min(*b1))
    }

    pub fn intersection(&self, other: &Self) -> Self {
        Self {
            lo: self.lo.iter().zip(&other.lo).map(|(a, b)| a.max(*b)).collect(),
            hi: self.hi.iter().zip(&other.hi).map(|(a, b)| a.min(*b)).collect(),
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.lo.iter().zip(&self.hi).zip(x).all(|((l, h), v)| l <= v && v <= h)
    }

    fn mid_half(&self) -> (Vec<f64>, Vec<f64>) {
        let mid = self.lo.iter().zip(&self.hi).map(|(l, h)| 0.5 * (l + h)).collect();
        let half = self.lo.iter().zip(&self.hi).map(|(l, h)| 0.5 * (h - l)).collect();
        (mid, half)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoveringSet {
    rep: SetRep,
    /// `x = forward u + offset` maps base coordinates to frequency coordinates.
    forward: Matrix<f64>,
    inverse: Matrix<f64>,
    offset: Vec<f64>,
    bbox: BoundingBox,
    /// `|det T|` when the map was supplied exactly.
    exact_det: Option<Q>,
    /// The set is exactly an axis-aligned box (diagonal map of a box).
    axis_aligned: bool,
}

impl CoveringSet {
    pub fn affine(t: Matrix<f64>, b: Vec<f64>, base: BaseSet) -> Result<Self> {
        check_dim(base.dim(), t.rows())?;
        check_dim(base.dim(), b.len())?;
        let inverse = t.inverse().map_err(|_| Error::Construction("affine map is singular".into()))?;
        let rep = SetRep::AffineImage { t: t.clone(), b: b.clone(), base };
        Ok(Self::assemble(rep, t, inverse, b, None))
    }

    /// Affine image with exact rational data; volumes are then exact.
    pub fn affine_exact(t: &Matrix<Q>, b: &[Q], base: BaseSet) -> Result<Self> {
        let det = t.determinant();
        if Scalar::is_zero(&det) {
            return Err(Error::Construction("affine map is singular".into()));
        }
        let mut s = Self::affine(t.to_f64(), b.iter().map(Scalar::to_f64).collect(), base)?;
        s.exact_det = Some(Scalar::abs(&det));
        Ok(s)
    }

    /// The set `g^{-T} Q`: `x` belongs to it iff `g^T x ∈ Q`.
    pub fn pullback(g: Matrix<f64>, base: BaseSet) -> Result<Self> {
        check_dim(base.dim(), g.rows())?;
        let inverse = g.transpose();
        let forward = inverse.inverse().map_err(|_| Error::Construction("pullback matrix is singular".into()))?;
        let offset = vec![0.0; base.dim()];
        let rep = SetRep::Pullback { g, base };
        Ok(Self::assemble(rep, forward, inverse, offset, None))
    }

    pub fn pullback_exact(g: &Matrix<Q>, base: BaseSet) -> Result<Self> {
        let det = g.determinant();
        if Scalar::is_zero(&det) {
            return Err(Error::Construction("pullback matrix is singular".into()));
        }
        let mut s = Self::pullback(g.to_f64(), base)?;
        s.exact_det = Some(<Q as Scalar>::one() / Scalar::abs(&det));
        Ok(s)
    }

    fn assemble(rep: SetRep, forward: Matrix<f64>, inverse: Matrix<f64>, offset: Vec<f64>, exact_det: Option<Q>) -> Self {
        let base = match &rep {
            SetRep::AffineImage { base, .. } | SetRep::Pullback { base, .. } => base,
        };
        let d = base.dim();
        let diagonal = (0..d).all(|i| (0..d).all(|j| i == j || forward[(i, j)] == 0.0));
        let axis_aligned = diagonal && matches!(base, BaseSet::AxisBox { .. });
        let c = forward.mul_vec(base.center());
        let he = base.half_extent();
        let mut lo = Vec::with_capacity(d);
        let mut hi = Vec::with_capacity(d);
        for i in 0..d {
            let center = c[i] + offset[i];
            let spread: f64 = (0..d).map(|j| forward[(i, j)].abs() * he[j]).sum();
            if axis_aligned {
                lo.push(center - spread);
                hi.push(center + spread);
            } else {
                let slack = 1e-12 * (center.abs() + spread);
                lo.push(center - spread - slack);
                hi.push(center + spread + slack);
            }
        }
        Self { rep, forward, inverse, offset, bbox: BoundingBox { lo, hi }, exact_det, axis_aligned }
    }

    pub fn rep(&self) -> &SetRep {
        &self.rep
    }

    pub fn base(&self) -> &BaseSet {
        match &self.rep {
            SetRep::AffineImage { base, .. } | SetRep::Pullback { base, .. } => base,
        }
    }

    pub fn dim(&self) -> usize {
        self.offset.len()
    }

    pub fn bounding_box(&self) -> &BoundingBox {
        &self.bbox
    }

    /// Image of the base set's center.
    pub fn center(&self) -> Vec<f64> {
        self.to_ambient(self.base().center())
    }

    fn to_ambient(&self, u: &[f64]) -> Vec<f64> {
        self.forward.mul_vec(u).into_iter().zip(&self.offset).map(|(x, b)| x + b).collect()
    }

    fn to_base(&self, x: &[f64]) -> Vec<f64> {
        match &self.rep {
            SetRep::Pullback { g, .. } => {
                // g^T x, evaluated directly from g
                let d = x.len();
                (0..d).map(|j| (0..d).map(|i| g[(i, j)] * x[i]).sum()).collect()
            }
            SetRep::AffineImage { .. } => {
                let shifted: Vec<f64> = x.iter().zip(&self.offset).map(|(a, b)| a - b).collect();
                self.inverse.mul_vec(&shifted)
            }
        }
    }

    pub fn contains(&self, x: &[f64]) -> Result<bool> {
        check_dim(self.dim(), x.len())?;
        if !self.bbox.contains(x) {
            return Ok(false);
        }
        Ok(self.base().contains(&self.to_base(x)))
    }

    pub fn volume(&self) -> f64 {
        let det = match &self.exact_det {
            Some(d) => d.to_f64(),
            None => self.forward.determinant().abs(),
        };
        det * self.base().volume()
    }

    /// Exact volume when both the map and the base box are exact.
    pub fn volume_exact(&self) -> Option<Q> {
        Some(self.exact_det.clone()? * self.base().volume_exact()?)
    }

    /// Conservative test: the closed box `mid ± half` certainly misses the set.
    fn misses_box(&self, mid: &[f64], half: &[f64]) -> bool {
        let d = self.dim();
        let shifted: Vec<f64> = mid.iter().zip(&self.offset).map(|(a, b)| a - b).collect();
        let c = self.inverse.mul_vec(&shifted);
        let h: Vec<f64> = (0..d)
            .map(|i| {
                let spread: f64 = (0..d).map(|j| self.inverse[(i, j)].abs() * half[j]).sum();
                spread + 1e-12 * (c[i].abs() + spread + 1.0)
            })
            .collect();
        self.base().misses_box(&c, &h)
    }

    pub fn sample_point(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        let u = self.base().sample(rng);
        self.to_ambient(&u)
    }
}

/// Outcome of the intersection oracle.
#[derive(Debug, Clone, PartialEq)]
pub enum Intersection {
    /// The sets meet; the witness lies in both.
    Yes(Vec<f64>),
    /// Certified disjoint.
    No,
    /// Neither a witness nor a separation was found within the budget.
    Indeterminate,
}

impl Intersection {
    pub fn is_yes(&self) -> bool {
        matches!(self, Self::Yes(_))
    }

    pub fn same_outcome(&self, other: &Self) -> bool {
        std::mem::discriminant(self) == std::mem::discriminant(other)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntersectionBudget {
    /// Maximum bisection depth of the subdivision search.
    pub depth: u32,
    /// Random witness candidates tried before subdividing.
    pub mc_samples: usize,
    pub seed: u64,
}

impl Default for IntersectionBudget {
    fn default() -> Self {
        Self { depth: 12, mc_samples: 4096, seed: 0x5eed }
    }
}

/// Decides whether two open covering sets meet.
///
/// The search runs entirely in the overlap of the two bounding boxes, so the
/// outcome does not depend on argument order.
pub fn intersects(a: &CoveringSet, b: &CoveringSet, budget: &IntersectionBudget) -> Result<Intersection> {
    check_dim(a.dim(), b.dim())?;
    if !a.bbox.overlaps_open(&b.bbox) {
        return Ok(Intersection::No);
    }
    if a.axis_aligned && b.axis_aligned {
        // both sets equal their (open) bounding boxes
        let common = a.bbox.intersection(&b.bbox);
        let (mid, _) = common.mid_half();
        return Ok(Intersection::Yes(mid));
    }
    let both = |x: &[f64]| a.contains(x).unwrap_or(false) && b.contains(x).unwrap_or(false);
    let common = a.bbox.intersection(&b.bbox);
    let (mid, half) = common.mid_half();

    let mut candidates = vec![mid.clone()];
    let (ca, cb) = (a.center(), b.center());
    if ca <= cb {
        candidates.extend([ca, cb]);
    } else {
        candidates.extend([cb, ca]);
    }
    if let Some(w) = candidates.into_iter().find(|x| both(x)) {
        return Ok(Intersection::Yes(w));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(budget.seed);
    for _ in 0..budget.mc_samples {
        let x: Vec<f64> = mid.iter().zip(&half).map(|(m, h)| m + h * rng.gen_range(-1.0..1.0)).collect();
        if both(&x) {
            return Ok(Intersection::Yes(x));
        }
    }

    // depth-first subdivision of the common bounding box
    let mut stack = vec![(mid, half, 0u32)];
    let mut unresolved = false;
    while let Some((m, h, depth)) = stack.pop() {
        if a.misses_box(&m, &h) || b.misses_box(&m, &h) {
            continue;
        }
        if both(&m) {
            return Ok(Intersection::Yes(m));
        }
        if depth >= budget.depth {
            unresolved = true;
            continue;
        }
        let axis = (0..h.len()).max_by(|&i, &j| h[i].total_cmp(&h[j])).unwrap();
        for sign in [1.0, -1.0] {
            let mut m2 = m.clone();
            let mut h2 = h.clone();
            h2[axis] *= 0.5;
            m2[axis] += sign * h2[axis];
            stack.push((m2, h2, depth + 1));
        }
    }
    Ok(if unresolved { Intersection::Indeterminate } else { Intersection::No })
}
