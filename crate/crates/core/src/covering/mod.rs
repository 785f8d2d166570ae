//! Finite truncations of coverings and their neighbor combinatorics.
//!
//! A [`Covering`] holds the sets of an indexed covering family that meet a
//! frequency window, together with its nerve: an edge `{i, j}` whenever the
//! intersection oracle found a common point. Pairs the oracle could not decide
//! are kept separately; quantities that grow with more edges are reported as a
//! certain lower value (undecided pairs dropped) and an upper value (undecided
//! pairs counted).

mod chain;
mod families;
mod weights;

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::geometry::{intersects, BoundingBox, CoveringSet, Intersection, IntersectionBudget};

pub use chain::{alpha_metric_law, closed_form_alpha_metric, AlphaLawFit};
pub use families::{
    AlphaModulation, CoveringFamily, Domain, DyadicCovering, ExplicitCovering, UniformCovering,
};
pub use weights::{moderateness_trend, Moderateness, ModeratenessTrend, WeightFamily};

/// Which nerve edges a query may use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EdgeMode {
    /// Only pairs with a witness point.
    #[default]
    Certain,
    /// Certain pairs plus the undecided ones.
    Possible,
}

/// The frequency window a covering was truncated to.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Truncation {
    pub radius: f64,
    pub window: BoundingBox,
}

#[derive(Debug, Clone, Default)]
pub struct Nerve {
    certain: Vec<Vec<usize>>,
    undecided: Vec<Vec<usize>>,
}

impl Nerve {
    fn adjacency(&self, mode: EdgeMode, i: usize) -> impl Iterator<Item = usize> + '_ {
        let extra: &[usize] = match mode {
            EdgeMode::Certain => &[],
            EdgeMode::Possible => &self.undecided[i],
        };
        self.certain[i].iter().chain(extra).copied()
    }

    /// Certain edges `(i, j)` with `i < j`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        pairs_of(&self.certain)
    }

    /// Pairs left undecided by the intersection oracle.
    pub fn undecided_pairs(&self) -> Vec<(usize, usize)> {
        pairs_of(&self.undecided)
    }

    pub fn degree(&self, i: usize) -> usize {
        self.certain[i].len()
    }
}

fn pairs_of(adj: &[Vec<usize>]) -> Vec<(usize, usize)> {
    adj.iter()
        .enumerate()
        .flat_map(|(i, js)| js.iter().filter(move |&&j| j > i).map(move |&j| (i, j)))
        .collect()
}

/// A count that may be uncertain because of undecided intersections.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bounded {
    /// Counting certain intersections only.
    pub lower: usize,
    /// Counting undecided pairs as intersecting.
    pub upper: usize,
}

impl Bounded {
    pub fn is_exact(&self) -> bool {
        self.lower == self.upper
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubordinationCounts {
    /// Per index `i` of the first covering: number of sets of the second
    /// covering meeting `Q_i`.
    pub counts: Vec<Bounded>,
    pub max: Bounded,
    /// Index attaining `max.lower`.
    pub argmax: Option<usize>,
    pub undecided_pairs: usize,
}

/// Sorted sweep index over the first bounding-box axis.
#[derive(Debug, Clone)]
struct SweepIndex {
    order: Vec<usize>,
    lo: Vec<f64>,
    /// Largest extent along axis 0.
    max_len: f64,
}

impl SweepIndex {
    fn new(sets: &[CoveringSet]) -> Self {
        let mut order: Vec<usize> = (0..sets.len()).collect();
        let lo0 = |i: usize| sets[i].bounding_box().lo[0];
        order.sort_by(|&a, &b| lo0(a).total_cmp(&lo0(b)).then(a.cmp(&b)));
        let lo = order.iter().map(|&i| lo0(i)).collect();
        let max_len = sets
            .iter()
            .map(|s| s.bounding_box().hi[0] - s.bounding_box().lo[0])
            .fold(0.0, f64::max);
        Self { order, lo, max_len }
    }

    /// Indices whose first-axis extent may meet `[lo, hi]`.
    fn candidates(&self, lo: f64, hi: f64) -> impl Iterator<Item = usize> + '_ {
        let start = self.lo.partition_point(|&v| v < lo - self.max_len);
        let end = self.lo.partition_point(|&v| v <= hi);
        self.order[start..end].iter().copied()
    }
}

/// Candidate pairs `(i, j)` whose bounding boxes overlap, sorted.
fn candidate_pairs(a: &[CoveringSet], b: &[CoveringSet], index_b: &SweepIndex, upper_only: bool) -> Vec<(usize, usize)> {
    let mut pairs: Vec<(usize, usize)> = a
        .par_iter()
        .enumerate()
        .flat_map_iter(|(i, s)| {
            let bb = s.bounding_box();
            index_b
                .candidates(bb.lo[0], bb.hi[0])
                .filter(move |&j| (!upper_only || j > i) && bb.overlaps_open(b[j].bounding_box()))
                .map(move |j| (i, j))
                .collect::<Vec<_>>()
        })
        .collect();
    pairs.sort_unstable();
    pairs
}

fn decide(
    pairs: &[(usize, usize)],
    a: &[CoveringSet],
    b: &[CoveringSet],
    budget: &IntersectionBudget,
) -> Result<Vec<Intersection>> {
    pairs.par_iter().map(|&(i, j)| intersects(&a[i], &b[j], budget)).collect()
}

#[derive(Debug, Clone)]
pub struct Covering {
    label: String,
    sets: Vec<CoveringSet>,
    truncation: Truncation,
    nerve: Nerve,
    index: SweepIndex,
}

impl Covering {
    /// Builds the nerve of `sets`; every set must meet the window.
    pub fn new(label: impl Into<String>, sets: Vec<CoveringSet>, truncation: Truncation, budget: &IntersectionBudget) -> Result<Self> {
        let label = label.into();
        let Some(first) = sets.first() else {
            return Err(Error::Construction(format!("covering {label:?} has no sets in the window")));
        };
        let d = first.dim();
        check_dim(d, truncation.window.lo.len())?;
        for (i, s) in sets.iter().enumerate() {
            check_dim(d, s.dim())?;
            let bb = s.bounding_box();
            let meets = bb.lo.iter().zip(&bb.hi).zip(truncation.window.lo.iter().zip(&truncation.window.hi))
                .all(|((a0, a1), (w0, w1))| a0.max(*w0) <= a1.min(*w1));
            if !meets {
                return Err(Error::Construction(format!("set {i} of {label:?} misses the window")));
            }
        }
        let index = SweepIndex::new(&sets);
        let pairs = candidate_pairs(&sets, &sets, &index, true);
        let outcomes = decide(&pairs, &sets, &sets, budget)?;
        let n = sets.len();
        let mut nerve = Nerve { certain: vec![Vec::new(); n], undecided: vec![Vec::new(); n] };
        for (&(i, j), o) in pairs.iter().zip(&outcomes) {
            let adj = match o {
                Intersection::Yes(_) => &mut nerve.certain,
                Intersection::Indeterminate => &mut nerve.undecided,
                Intersection::No => continue,
            };
            adj[i].push(j);
            adj[j].push(i);
        }
        for v in nerve.certain.iter_mut().chain(nerve.undecided.iter_mut()) {
            v.sort_unstable();
        }
        Ok(Self { label, sets, truncation, nerve, index })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn sets(&self) -> &[CoveringSet] {
        &self.sets
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.sets[0].dim()
    }

    pub fn truncation(&self) -> &Truncation {
        &self.truncation
    }

    pub fn nerve(&self) -> &Nerve {
        &self.nerve
    }

    /// Nerve as CSV with header `i,j`; undecided pairs are marked in a third column.
    pub fn nerve_csv(&self) -> String {
        let mut out = String::from("i,j,status\n");
        let mut rows: Vec<(usize, usize, &str)> = self.nerve.edges().into_iter().map(|(i, j)| (i, j, "yes")).collect();
        rows.extend(self.nerve.undecided_pairs().into_iter().map(|(i, j)| (i, j, "indeterminate")));
        rows.sort();
        for (i, j, s) in rows {
            out.push_str(&format!("{i},{j},{s}\n"));
        }
        out
    }

    fn check_index(&self, i: usize) -> Result<()> {
        if i < self.sets.len() {
            Ok(())
        } else {
            Err(Error::Usage(format!("index {i} out of range for covering of {} sets", self.sets.len())))
        }
    }

    /// `J^{n*}`: indices reachable from `J` in at most `n` nerve steps.
    pub fn neighbors(&self, j: &BTreeSet<usize>, n: usize) -> Result<BTreeSet<usize>> {
        self.neighbors_with(j, n, EdgeMode::Certain)
    }

    pub fn neighbors_with(&self, j: &BTreeSet<usize>, n: usize, mode: EdgeMode) -> Result<BTreeSet<usize>> {
        for &i in j {
            self.check_index(i)?;
        }
        let mut reached = j.clone();
        let mut frontier: Vec<usize> = j.iter().copied().collect();
        for _ in 0..n {
            let mut next = Vec::new();
            for &i in &frontier {
                for k in self.nerve.adjacency(mode, i) {
                    if reached.insert(k) {
                        next.push(k);
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            frontier = next;
        }
        Ok(reached)
    }

    /// `sup_i #{j : Q_i ∩ Q_j ≠ ∅}` on the truncation, `i` included.
    pub fn admissibility_constant(&self) -> Bounded {
        let lower = (0..self.len()).map(|i| 1 + self.nerve.certain[i].len()).max().unwrap_or(0);
        let upper = (0..self.len())
            .map(|i| 1 + self.nerve.certain[i].len() + self.nerve.undecided[i].len())
            .max()
            .unwrap_or(0);
        Bounded { lower, upper }
    }

    /// For each `Q_i`, the number of sets of `other` that meet it.
    pub fn subordination_count(&self, other: &Covering, budget: &IntersectionBudget) -> Result<SubordinationCounts> {
        check_dim(self.dim(), other.dim())?;
        let pairs = candidate_pairs(&self.sets, &other.sets, &other.index, false);
        let outcomes = decide(&pairs, &self.sets, &other.sets, budget)?;
        let mut counts = vec![Bounded { lower: 0, upper: 0 }; self.len()];
        let mut undecided_pairs = 0;
        for (&(i, _), o) in pairs.iter().zip(&outcomes) {
            match o {
                Intersection::Yes(_) => {
                    counts[i].lower += 1;
                    counts[i].upper += 1;
                }
                Intersection::Indeterminate => {
                    counts[i].upper += 1;
                    undecided_pairs += 1;
                }
                Intersection::No => {}
            }
        }
        let argmax = (0..counts.len()).max_by_key(|&i| (counts[i].lower, std::cmp::Reverse(i)));
        let max = Bounded {
            lower: counts.iter().map(|c| c.lower).max().unwrap_or(0),
            upper: counts.iter().map(|c| c.upper).max().unwrap_or(0),
        };
        Ok(SubordinationCounts { counts, max, argmax, undecided_pairs })
    }

    /// Indices of all sets containing `x`.
    pub fn sets_containing(&self, x: &[f64]) -> Result<Vec<usize>> {
        check_dim(self.dim(), x.len())?;
        let mut found: Vec<usize> = self
            .index
            .candidates(x[0], x[0])
            .filter(|&i| self.sets[i].contains(x).unwrap_or(false))
            .collect();
        found.sort_unstable();
        Ok(found)
    }
}

/// Outcome of the weak-equivalence test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING-KEBAB-CASE")]
pub enum WeakEquivalence {
    EquivalentEvidence,
    NotEquivalent,
    Indeterminate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadiusCounts {
    pub radius: f64,
    pub sets_q: usize,
    pub sets_p: usize,
    /// `N(Q, P)`: max number of `P`-sets meeting one `Q`-set.
    pub q_in_p: Bounded,
    /// `N(P, Q)`.
    pub p_in_q: Bounded,
    pub argmax_q: Option<usize>,
    pub argmax_p: Option<usize>,
}

/// One entry of the witness sequence: the set with the largest count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthWitness {
    pub radius: f64,
    pub index: usize,
    pub center: Vec<f64>,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeakEquivalenceReport {
    pub result: WeakEquivalence,
    /// `"q->p"` or `"p->q"` when a direction diverges.
    pub direction: Option<String>,
    pub growth_threshold: f64,
    pub per_radius: Vec<RadiusCounts>,
    pub witness: Vec<GrowthWitness>,
    pub note: String,
}

/// Compares the subordination counts of two covering families across radii.
///
/// A direction is declared divergent when its certain maximum count is
/// non-decreasing over at least three radii and grows by `growth_threshold`
/// overall; both directions count as stable when the upper counts vary by
/// less than that factor.
pub fn weak_equivalence_verdict(
    q: &dyn CoveringFamily,
    p: &dyn CoveringFamily,
    radii: &[f64],
    growth_threshold: f64,
    budget: &IntersectionBudget,
) -> Result<WeakEquivalenceReport> {
    check_radii(radii)?;
    check_dim(q.dim(), p.dim())?;
    let mut per_radius = Vec::with_capacity(radii.len());
    let mut coverings = Vec::with_capacity(radii.len());
    for &r in radii {
        let cq = q.truncate(r, budget)?;
        let cp = p.truncate(r, budget)?;
        let a = cq.subordination_count(&cp, budget)?;
        let b = cp.subordination_count(&cq, budget)?;
        per_radius.push(RadiusCounts {
            radius: r,
            sets_q: cq.len(),
            sets_p: cp.len(),
            q_in_p: a.max,
            p_in_q: b.max,
            argmax_q: a.argmax,
            argmax_p: b.argmax,
        });
        coverings.push((cq, cp));
    }

    let grows = |sel: fn(&RadiusCounts) -> usize| {
        let v: Vec<usize> = per_radius.iter().map(sel).collect();
        let monotone = v.windows(2).all(|w| w[0] <= w[1]);
        let first = v[0].max(1) as f64;
        monotone && v[v.len() - 1] as f64 >= growth_threshold * first
    };
    let stable = |sel: fn(&RadiusCounts) -> usize| {
        let v: Vec<usize> = per_radius.iter().map(sel).collect();
        let lo = *v.iter().min().unwrap() as f64;
        let hi = *v.iter().max().unwrap() as f64;
        lo > 0.0 && hi < growth_threshold * lo
    };
    let qp_grows = grows(|c| c.q_in_p.lower);
    let pq_grows = grows(|c| c.p_in_q.lower);
    let enough = radii.len() >= 3;

    let witness_for = |from_q: bool| -> Vec<GrowthWitness> {
        per_radius
            .iter()
            .zip(&coverings)
            .filter_map(|(c, (cq, cp))| {
                let (cov, idx, count) = if from_q { (cq, c.argmax_q, c.q_in_p.lower) } else { (cp, c.argmax_p, c.p_in_q.lower) };
                idx.map(|i| GrowthWitness { radius: c.radius, index: i, center: cov.sets()[i].center(), count })
            })
            .collect()
    };

    let (result, direction, witness, note) = if enough && (qp_grows || pq_grows) {
        let from_q = qp_grows;
        let dir = if from_q { "q->p" } else { "p->q" };
        (
            WeakEquivalence::NotEquivalent,
            Some(dir.to_string()),
            witness_for(from_q),
            format!("subordination count {dir} grows monotonically by a factor >= {growth_threshold} over {} radii", radii.len()),
        )
    } else if stable(|c| c.q_in_p.upper) && stable(|c| c.p_in_q.upper) {
        (
            WeakEquivalence::EquivalentEvidence,
            None,
            Vec::new(),
            "counts are stable on every truncation; this is evidence, not a proof".to_string(),
        )
    } else {
        let why = if qp_grows || pq_grows {
            "counts grow but fewer than three radii were given"
        } else {
            "counts neither stable nor monotonically divergent"
        };
        (WeakEquivalence::Indeterminate, None, Vec::new(), why.to_string())
    };
    Ok(WeakEquivalenceReport { result, direction, growth_threshold, per_radius, witness, note })
}

pub(crate) fn check_radii(radii: &[f64]) -> Result<()> {
    if radii.len() < 2 {
        return Err(Error::Usage("at least two truncation radii are required".into()));
    }
    if radii.iter().any(|r| !(*r > 0.0 && r.is_finite())) {
        return Err(Error::Usage("radii must be positive and finite".into()));
    }
    if radii.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Usage("radii must be strictly increasing".into()));
    }
    Ok(())
}
