//! Metric lattices with word metrics, and the coverings they induce on the
//! dual orbit.
//!
//! Lattice points are `d(scale^k) · s(σ m)` for `|k| ≤ K` and `m ∈ [−M, M]^{d−1}`.
//! Two points are adjacent when `x^{-1} y` lies in the symmetric window
//! `W = B ∪ B^{-1}`, where `B` is the coordinate box `a ∈ [1/b, b]`,
//! `|t_j| ≤ ρ`. Word distances are breadth-first-search distances in that graph.

use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{Group, GroupElement, ShearletGroupSpec};
use crate::coarse::SampledMetricSpace;
use crate::covering::{Covering, CoveringFamily, Truncation};
use crate::error::{Error, Result};
use crate::geometry::{BaseSet, BoundingBox, CoveringSet, IntersectionBudget};
use crate::scalar::{qi, Scalar, Q};

#[derive(Debug, Clone, PartialEq)]
pub struct LatticeParams<S> {
    /// Multiplicative scale step `a_0 > 1` (`δ = ln a_0`).
    pub scale: S,
    pub shear_step: S,
    /// `K`: scale indices `−K..=K`.
    pub scale_steps: i64,
    /// `M`: shear indices `−M..=M` in every coordinate.
    pub shear_steps: i64,
    /// Also include the `ε = −1` component.
    pub both_signs: bool,
}

impl LatticeParams<f64> {
    /// Float lattice with `δ = ln scale`.
    pub fn from_log(delta: f64, shear_step: f64, scale_steps: i64, shear_steps: i64) -> Self {
        Self { scale: delta.exp(), shear_step, scale_steps, shear_steps, both_signs: false }
    }
}

impl LatticeParams<Q> {
    /// Exact lattice with scale step `2^L`, `L` the common denominator of
    /// `λ`, so that every `a^{λ_j}` on the lattice stays rational.
    pub fn exact(spec: &ShearletGroupSpec, scale_steps: i64, shear_steps: i64) -> Self {
        let l = crate::scalar::common_denominator(spec.lambda());
        let l: u32 = num::ToPrimitive::to_u32(&l).unwrap_or(1);
        Self { scale: num::pow::pow(qi(2), l as usize), shear_step: qi(1), scale_steps, shear_steps, both_signs: false }
    }
}

/// The box `B`: scale in `[1/b, b]`, shears bounded by `ρ`.
#[derive(Debug, Clone, PartialEq)]
pub struct WordBox<S> {
    pub scale_bound: S,
    pub shear_bound: S,
}

impl<S: Scalar> WordBox<S> {
    /// `b = a_0`, `ρ = σ a_0`: adjacent scale levels are connected.
    pub fn default_for(p: &LatticeParams<S>) -> Self {
        Self { scale_bound: p.scale.clone(), shear_bound: p.shear_step.clone() * p.scale.clone() }
    }

    /// Closed-box membership; float coordinates get a relative slack of
    /// `1e-9` so that lattice steps lying exactly on the boundary count.
    fn in_box(&self, g: &GroupElement<S>) -> bool {
        if g.eps != 1 {
            return false;
        }
        if S::is_exact() {
            return g.a <= self.scale_bound
                && S::one() / g.a.clone() <= self.scale_bound
                && g.t.iter().all(|t| t.abs() <= self.shear_bound);
        }
        let (b, rho) = (self.scale_bound.to_f64() * (1.0 + 1e-9), self.shear_bound.to_f64() * (1.0 + 1e-9));
        let a = g.a.to_f64();
        a <= b && 1.0 / a <= b && g.t.iter().all(|t| t.to_f64().abs() <= rho)
    }
}

#[derive(Clone)]
pub struct WordMetricLattice<S> {
    group: Group<S>,
    params: LatticeParams<S>,
    window: WordBox<S>,
    points: Vec<GroupElement<S>>,
    inverses: Vec<GroupElement<S>>,
    keys: Vec<(i8, i64, Vec<i64>)>,
    adjacency: Vec<Vec<usize>>,
    /// Row-major BFS distances, `u32::MAX` for different components.
    dist: Vec<u32>,
}

impl<S: Scalar> std::fmt::Debug for WordMetricLattice<S> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("WordMetricLattice")
            .field("group", &self.group)
            .field("params", &self.params)
            .field("points", &self.points.len())
            .finish_non_exhaustive()
    }
}

fn shear_indices(n: usize, m: i64) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|prefix| (-m..=m).map(move |v| {
                let mut p = prefix.clone();
                p.push(v);
                p
            }))
            .collect();
    }
    out
}

impl<S: Scalar> WordMetricLattice<S> {
    pub fn build(spec: &ShearletGroupSpec, params: LatticeParams<S>, window: WordBox<S>) -> Result<Self> {
        if !(params.scale > S::one()) || !(params.shear_step > S::zero()) {
            return Err(Error::Construction("lattice needs scale step > 1 and shear step > 0".into()));
        }
        if params.scale_steps < 0 || params.shear_steps < 0 {
            return Err(Error::Construction("lattice truncation must be nonnegative".into()));
        }
        if !(window.scale_bound >= S::one()) || !(window.shear_bound > S::zero()) {
            return Err(Error::Construction("word window must contain a neighborhood of the identity".into()));
        }
        let group = spec.group::<S>();
        let n = spec.dim() - 1;
        let count = (2 * params.scale_steps + 1) as u128 * (2 * params.shear_steps + 1).pow(n as u32) as u128;
        if count > 200_000 {
            return Err(Error::Usage(format!("lattice would hold {count} points")));
        }
        let signs: &[i8] = if params.both_signs && spec.sign_component() { &[1, -1] } else { &[1] };
        let shears = shear_indices(n, params.shear_steps);
        let mut points = Vec::new();
        let mut keys = Vec::new();
        for &eps in signs {
            for k in -params.scale_steps..=params.scale_steps {
                let a = int_pow(&params.scale, k);
                for m in &shears {
                    let t = m.iter().map(|&v| params.shear_step.clone() * S::from_i64(v)).collect();
                    points.push(group.element(eps, a.clone(), t)?);
                    keys.push((eps, k, m.clone()));
                }
            }
        }
        let inverses: Vec<GroupElement<S>> = points.iter().map(|p| group.invert(p)).collect::<Result<_>>()?;
        // scale index reach of the window
        let mut reach = 0i64;
        while int_pow(&params.scale, reach + 1) <= window.scale_bound {
            reach += 1;
        }
        // a^{1−λ} for a = a_0^e, |e| ≤ 2K, indexed by e + 2K
        let big = 2 * params.scale_steps;
        let factors: Vec<Vec<S>> =
            (-big..=big).map(|e| group.conj_factors(&int_pow(&params.scale, e))).collect::<Result<_>>()?;
        let factor = |e: i64| &factors[(e + big) as usize];
        let adjacency: Vec<Vec<usize>> = (0..points.len())
            .into_par_iter()
            .map(|i| {
                let mut out = Vec::new();
                for j in 0..points.len() {
                    let dk = keys[j].1 - keys[i].1;
                    if i == j || keys[i].0 != keys[j].0 || dk.abs() > reach {
                        continue;
                    }
                    let step = group.multiply_with_factors(&inverses[i], &points[j], factor(keys[j].1));
                    if window.in_box(&step) || window.in_box(&group.invert_with_factors(&step, factor(-dk))) {
                        out.push(j);
                    }
                }
                out
            })
            .collect();
        let npts = points.len();
        let rows: Vec<Vec<u32>> = (0..npts).into_par_iter().map(|i| bfs(&adjacency, i)).collect();
        let dist = rows.into_iter().flatten().collect();
        let lattice = Self { group, params, window, points, inverses, keys, adjacency, dist };
        lattice.validate()?;
        Ok(lattice)
    }

    /// Checks separation on all pairs of one scale level and density on
    /// seeded samples `x · u` with `x` an interior lattice point.
    fn validate(&self) -> Result<()> {
        let p = &self.params;
        // V: a^2 strictly below a_0 either way, shears strictly below σ/2
        let half = p.shear_step.clone() / S::from_i64(2);
        let factors: Vec<Vec<S>> = (-p.scale_steps..=p.scale_steps)
            .map(|k| self.group.conj_factors(&int_pow(&p.scale, k)))
            .collect::<Result<_>>()?;
        for i in 0..self.points.len() {
            let xi = &self.inverses[i];
            for &j in &self.adjacency[i] {
                let f = &factors[(self.keys[j].1 + p.scale_steps) as usize];
                let g = self.group.multiply_with_factors(xi, &self.points[j], f);
                let small = g.a.clone() * g.a.clone() < p.scale
                    && p.scale.clone() * g.a.clone() * g.a.clone() > S::one()
                    && g.t.iter().all(|t| t.abs() < half);
                if small {
                    return Err(Error::Construction(format!("lattice points {i} and {j} are not separated")));
                }
            }
        }
        for (i, key) in self.keys.iter().enumerate() {
            let root = self.keys.iter().position(|k| k.0 == key.0).unwrap_or(0);
            if self.distance(root, i).is_none() {
                return Err(Error::Construction(format!(
                    "lattice graph is disconnected: point {i} (k = {}, m = {:?}) is unreachable within its component",
                    key.1, key.2
                )));
            }
        }
        let interior: Vec<usize> = (0..self.points.len())
            .filter(|&i| {
                let (_, k, m) = &self.keys[i];
                k.abs() < p.scale_steps && m.iter().all(|v| v.abs() < p.shear_steps)
            })
            .collect();
        if interior.is_empty() {
            return Ok(());
        }
        let mut rng = ChaCha8Rng::seed_from_u64(0xd15c);
        let mut samples = Vec::with_capacity(64);
        for _ in 0..64 {
            let x = &self.points[interior[rng.gen_range(0..interior.len())]];
            // u = d(c) s(v) with c between 1 and a_0, v within one shear step
            // exact groups need c^λ rational, so only the cell corners are used
            let c = if S::is_exact() {
                if rng.gen_bool(0.5) { p.scale.clone() } else { S::one() }
            } else {
                let frac = S::from_i64(rng.gen_range(0..=8)) / S::from_i64(8);
                S::one() + (p.scale.clone() - S::one()) * frac
            };
            let v = (0..x.t.len())
                .map(|_| p.shear_step.clone() * S::from_i64(rng.gen_range(-8..=8)) / S::from_i64(8))
                .collect();
            samples.push(self.group.multiply(x, &self.group.element(1, c, v)?)?);
        }
        let found: Vec<Option<usize>> = samples.par_iter().map(|h| self.nearest(h)).collect::<Result<_>>()?;
        let uncovered: Vec<String> =
            samples.iter().zip(&found).filter(|(_, f)| f.is_none()).map(|(h, _)| format!("{:?}", h.t)).collect();
        if !uncovered.is_empty() {
            return Err(Error::Construction(format!(
                "lattice is not dense for the word window; uncovered samples with shears {}",
                uncovered.join(", ")
            )));
        }
        Ok(())
    }

    /// A lattice point `x` with `x^{-1} h ∈ W`, if any.
    pub fn nearest(&self, h: &GroupElement<S>) -> Result<Option<usize>> {
        let b = &self.window.scale_bound;
        for (i, x) in self.points.iter().enumerate() {
            // the scale of x^{-1} h is h.a / x.a
            if x.eps != h.eps || h.a.clone() > x.a.clone() * b.clone() * b.clone() || x.a.clone() > h.a.clone() * b.clone() * b.clone() {
                continue;
            }
            let step = self.group.multiply(&self.inverses[i], h)?;
            if self.window.in_box(&step) || self.window.in_box(&self.group.invert(&step)?) {
                return Ok(Some(i));
            }
        }
        Ok(None)
    }

    pub fn group(&self) -> &Group<S> {
        &self.group
    }

    pub fn params(&self) -> &LatticeParams<S> {
        &self.params
    }

    pub fn window(&self) -> &WordBox<S> {
        &self.window
    }

    pub fn points(&self) -> &[GroupElement<S>] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// `(ε, k, m)` of point `i`.
    pub fn key(&self, i: usize) -> (i8, i64, &[i64]) {
        let (e, k, m) = &self.keys[i];
        (*e, *k, m)
    }

    pub fn index_of(&self, eps: i8, k: i64, m: &[i64]) -> Option<usize> {
        self.keys.iter().position(|(e, kk, mm)| *e == eps && *kk == k && mm.as_slice() == m)
    }

    pub fn adjacent(&self, i: usize, j: usize) -> bool {
        self.adjacency[i].binary_search(&j).is_ok()
    }

    /// Word distance on the truncated lattice; `None` across components.
    pub fn distance(&self, i: usize, j: usize) -> Option<u32> {
        let d = self.dist[i * self.points.len() + j];
        (d != u32::MAX).then_some(d)
    }

    pub fn to_metric_space(&self, radius: f64) -> Result<SampledMetricSpace> {
        let n = self.points.len();
        SampledMetricSpace::from_fn(radius, n, |i, j| self.distance(i, j).map_or(f64::INFINITY, f64::from))
    }
}

fn int_pow<S: Scalar>(a: &S, k: i64) -> S {
    let mut out = S::one();
    for _ in 0..k.unsigned_abs() {
        out = out * a.clone();
    }
    if k < 0 {
        S::one() / out
    } else {
        out
    }
}

fn bfs(adj: &[Vec<usize>], s: usize) -> Vec<u32> {
    let mut d = vec![u32::MAX; adj.len()];
    d[s] = 0;
    let mut queue = VecDeque::from([s]);
    while let Some(i) = queue.pop_front() {
        for &j in &adj[i] {
            if d[j] == u32::MAX {
                d[j] = d[i] + 1;
                queue.push_back(j);
            }
        }
    }
    d
}

/// Default base set around `ξ_0 = e_1`: `x_1 ∈ (a_0^{-0.6}, a_0^{0.6})`,
/// `|x_j| < 0.75 σ a_0^{0.6}`. The orbit image of the cell
/// `{d(c) s(v) : c ∈ [a_0^{-1/2}, a_0^{1/2}], |v_j| ≤ σ c^{1−λ_j}/2}` lies inside.
pub fn default_base_box(dim: usize, scale: f64, shear_step: f64) -> Result<BaseSet> {
    let lo1 = scale.powf(-0.6);
    let hi1 = scale.powf(0.6);
    let mut lo = vec![lo1];
    let mut hi = vec![hi1];
    for _ in 1..dim {
        lo.push(-0.75 * shear_step * hi1);
        hi.push(0.75 * shear_step * hi1);
    }
    BaseSet::from_bounds(&lo, &hi)
}

/// The covering `(h_i^{-T} Q)_i` of the dual orbit induced by the lattice.
/// `Q` must contain `ξ_0`; every set then contains the orbit point of its
/// lattice element.
pub fn induced_covering<S: Scalar>(
    lattice: &WordMetricLattice<S>,
    base: BaseSet,
    radius: f64,
    budget: &IntersectionBudget,
) -> Result<Covering> {
    let d = lattice.group().dim();
    let mut xi0 = vec![0.0; d];
    xi0[0] = 1.0;
    if base.dim() != d || !base.contains(&xi0) {
        return Err(Error::Construction("base set must contain xi_0 = e_1".into()));
    }
    let sets = lattice
        .points()
        .iter()
        .map(|h| {
            let m = lattice.group().to_matrix(h)?;
            if S::is_exact() {
                let exact = m.map(|v| crate::scalar::f64_to_q(v.to_f64()).unwrap_or_else(|_| qi(0)));
                // exact determinant when the matrix is exactly representable
                if exact.to_f64() == m.to_f64() {
                    return CoveringSet::pullback_exact(&exact, base.clone());
                }
            }
            CoveringSet::pullback(m.to_f64(), base.clone())
        })
        .collect::<Result<Vec<_>>>()?;
    let mut window = BoundingBox { lo: vec![f64::INFINITY; d], hi: vec![f64::NEG_INFINITY; d] };
    for s in &sets {
        let bb = s.bounding_box();
        for i in 0..d {
            window.lo[i] = window.lo[i].min(bb.lo[i]);
            window.hi[i] = window.hi[i].max(bb.hi[i]);
        }
    }
    let cov = Covering::new(format!("induced({})", lattice.len()), sets, Truncation { radius, window }, budget)?;
    check_coverage(lattice, &cov)?;
    Ok(cov)
}

/// Seeded check that orbit points `p(x u)`, `x` interior and `u` within one
/// lattice cell, are covered.
fn check_coverage<S: Scalar>(lattice: &WordMetricLattice<S>, cov: &Covering) -> Result<()> {
    let p = lattice.params();
    // right-multiplying by d(c) stretches shear j by c^{1−λ_j}; keep samples
    // whose image stays inside the truncated shear range
    let stretch: Vec<f64> = lattice
        .group()
        .lambda()
        .iter()
        .map(|l| p.scale.to_f64().powf((1.0 - l.to_f64()).max(0.0)))
        .collect();
    let interior: Vec<usize> = (0..lattice.len())
        .filter(|&i| {
            let (_, k, m) = lattice.key(i);
            k.abs() < p.scale_steps
                && m.iter().zip(&stretch).all(|(v, s)| v.abs() as f64 * s + 2.0 <= p.shear_steps as f64)
        })
        .collect();
    if interior.is_empty() {
        return Ok(());
    }
    let g = lattice.group();
    let mut rng = ChaCha8Rng::seed_from_u64(0xc0fe);
    let mut uncovered = Vec::new();
    for _ in 0..64 {
        let x = &lattice.points()[interior[rng.gen_range(0..interior.len())]];
        let c = if S::is_exact() {
            if rng.gen_bool(0.5) { p.scale.clone() } else { S::one() }
        } else {
            S::one() + (p.scale.clone() - S::one()) * S::from_i64(rng.gen_range(0..=8)) / S::from_i64(8)
        };
        let v = (0..x.t.len()).map(|_| p.shear_step.clone() * S::from_i64(rng.gen_range(-8..=8)) / S::from_i64(8)).collect();
        let pt: Vec<f64> = g.orbit_map(&g.multiply(x, &g.element(1, c, v)?)?)?.iter().map(Scalar::to_f64).collect();
        if cov.sets_containing(&pt)?.is_empty() {
            uncovered.push(format!("{pt:?}"));
        }
    }
    if uncovered.is_empty() {
        Ok(())
    } else {
        Err(Error::Construction(format!("induced sets miss orbit points {}", uncovered.join(", "))))
    }
}

/// Induced coverings of one group, truncated by `|r| ≤ R`, `|t_j| ≤ R`
/// in lattice coordinates.
#[derive(Debug, Clone)]
pub struct InducedCoveringFamily {
    pub spec: ShearletGroupSpec,
    /// `δ = ln a_0`.
    pub delta: f64,
    pub shear_step: f64,
    pub base: Option<BaseSet>,
}

impl InducedCoveringFamily {
    pub fn lattice(&self, radius: f64) -> Result<WordMetricLattice<f64>> {
        let k = (radius / self.delta).floor() as i64;
        let m = (radius / self.shear_step).floor() as i64;
        let params = LatticeParams::from_log(self.delta, self.shear_step, k, m);
        let window = WordBox::default_for(&params);
        WordMetricLattice::build(&self.spec, params, window)
    }

    pub fn base_set(&self) -> Result<BaseSet> {
        match &self.base {
            Some(b) => Ok(b.clone()),
            None => default_base_box(self.spec.dim(), self.delta.exp(), self.shear_step),
        }
    }
}

impl CoveringFamily for InducedCoveringFamily {
    fn label(&self) -> String {
        format!("induced({}, delta={}, shear_step={})", self.spec.label(), self.delta, self.shear_step)
    }

    fn dim(&self) -> usize {
        self.spec.dim()
    }

    fn truncate(&self, radius: f64, budget: &IntersectionBudget) -> Result<Covering> {
        let lattice = self.lattice(radius)?;
        induced_covering(&lattice, self.base_set()?, radius, budget)
    }
}

/// Probes the orbit map `h_i ↦ p(h_i)` from the word metric of each
/// truncated lattice to the chain metric of the covering it induces.
pub fn orbit_map_probe(
    family: &InducedCoveringFamily,
    radii: &[f64],
    budget: &IntersectionBudget,
    opts: &crate::coarse::ProbeOptions,
) -> Result<crate::coarse::QIReport> {
    let mut spaces = Vec::new();
    for &r in radii {
        let lattice = family.lattice(r)?;
        let cov = induced_covering(&lattice, family.base_set()?, r, budget)?;
        let pts: Vec<Vec<f64>> = lattice.points().iter().map(|h| lattice.group().orbit_map(h)).collect::<Result<_>>()?;
        let x = lattice.to_metric_space(r)?;
        let y = SampledMetricSpace::from_covering(&cov, &pts)?;
        spaces.push((r, x, y, (0..pts.len()).collect::<Vec<_>>()));
    }
    let levels: Vec<crate::coarse::ProbeLevel> = spaces
        .iter()
        .map(|(r, x, y, map)| crate::coarse::ProbeLevel { radius: *r, x, y, map, extra_pairs: &[] })
        .collect();
    crate::coarse::qi_probe(&levels, opts)
}
