//! Sampled metric spaces and an empirical quasi-isometry prober.
//!
//! A quasi-isometry is an asymptotic notion, so the prober works across a
//! list of truncation levels. It can *certify* a rejection — a family of
//! sample pairs whose source distance stays bounded while the image distance
//! keeps growing — but acceptance is only ever evidence.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::covering::Covering;
use crate::error::{Error, Result};

/// Finitely many points (handled by index) with a symmetric distance table.
/// Distances may be infinite between different components.
#[derive(Debug, Clone)]
pub struct SampledMetricSpace {
    radius: f64,
    n: usize,
    table: Vec<f64>,
}

impl SampledMetricSpace {
    /// Builds the table from one row per point, computed in parallel.
    pub fn from_rows(radius: f64, n: usize, row: impl Fn(usize) -> Result<Vec<f64>> + Sync) -> Result<Self> {
        let rows: Vec<Vec<f64>> = (0..n).into_par_iter().map(&row).collect::<Result<_>>()?;
        let mut table = Vec::with_capacity(n * n);
        for r in rows {
            if r.len() != n {
                return Err(Error::DimensionMismatch { expected: n, got: r.len() });
            }
            table.extend(r);
        }
        let space = Self { radius, n, table };
        space.check_basic()?;
        Ok(space)
    }

    pub fn from_fn(radius: f64, n: usize, d: impl Fn(usize, usize) -> f64 + Sync) -> Result<Self> {
        Self::from_rows(radius, n, |i| Ok((0..n).map(|j| d(i, j)).collect()))
    }

    /// Chain distances of a covering between the given points.
    pub fn from_covering(cov: &Covering, points: &[Vec<f64>]) -> Result<Self> {
        let r = cov.truncation().radius;
        Self::from_rows(r, points.len(), |i| {
            Ok(cov
                .chain_distances_from(&points[i], points)?
                .into_iter()
                .map(|d| d.map_or(f64::INFINITY, f64::from))
                .collect())
        })
    }

    fn check_basic(&self) -> Result<()> {
        for i in 0..self.n {
            if self.distance(i, i) != 0.0 {
                return Err(Error::Domain(format!("d(x, x) != 0 at sample {i}")));
            }
            for j in 0..i {
                let (a, b) = (self.distance(i, j), self.distance(j, i));
                if a != b || a < 0.0 || a.is_nan() {
                    return Err(Error::Domain(format!("distance not symmetric/nonnegative at ({i}, {j})")));
                }
            }
        }
        Ok(())
    }

    /// Spot-checks the triangle inequality on `triples` seeded random triples.
    pub fn check_triangle(&self, triples: usize, seed: u64) -> Result<()> {
        if self.n == 0 {
            return Ok(());
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..triples {
            let (a, b, c) = (rng.gen_range(0..self.n), rng.gen_range(0..self.n), rng.gen_range(0..self.n));
            if self.distance(a, c) > self.distance(a, b) + self.distance(b, c) + 1e-9 {
                return Err(Error::Domain(format!("triangle inequality fails on ({a}, {b}, {c})")));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        self.table[i * self.n + j]
    }

    /// Component label of each point (finite distance = same component).
    pub fn components(&self) -> Vec<usize> {
        let mut label = vec![usize::MAX; self.n];
        let mut next = 0;
        for i in 0..self.n {
            if label[i] == usize::MAX {
                for j in i..self.n {
                    if label[j] == usize::MAX && self.distance(i, j).is_finite() {
                        label[j] = next;
                    }
                }
                next += 1;
            }
        }
        label
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING-KEBAB-CASE")]
pub enum QIVerdict {
    EmbeddingEvidence,
    Reject,
    Indeterminate,
}

/// Thresholds of the prober; they are engineering choices and are echoed in
/// every report.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbeOptions {
    /// Uniformly sampled pairs per level (at least 1000).
    pub pair_budget: usize,
    pub seed: u64,
    /// Growth factor that certifies divergence, and the stability band of
    /// the fitted constants.
    pub growth_threshold: f64,
    /// All pairs at source distance at most this are probed, and it bounds
    /// the source distances of rejection witnesses.
    pub near_range: f64,
}

impl Default for ProbeOptions {
    fn default() -> Self {
        Self { pair_budget: 20_000, seed: 0x5eed, growth_threshold: 2.0, near_range: 3.0 }
    }
}

/// One truncation level: `map[i]` is the index in `y` of the image of sample `i` of `x`.
#[derive(Debug, Clone, Copy)]
pub struct ProbeLevel<'a> {
    pub radius: f64,
    pub x: &'a SampledMetricSpace,
    pub y: &'a SampledMetricSpace,
    pub map: &'a [usize],
    /// Pairs always probed, e.g. a known witness family.
    pub extra_pairs: &'a [(usize, usize)],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeBin {
    /// Source distance, rounded to the nearest integer.
    pub source: u64,
    pub pairs: usize,
    pub image_min: f64,
    pub image_max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessPair {
    pub radius: f64,
    pub x: usize,
    pub x_prime: usize,
    pub source_distance: f64,
    pub image_distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelReport {
    pub radius: f64,
    pub points: usize,
    pub pairs: usize,
    pub envelope: Vec<EnvelopeBin>,
    pub l: f64,
    pub c: f64,
    /// `max_y min_x d_Y(y, f(x))` over the sample of `Y`.
    pub gap_k: f64,
    /// Largest image distance among pairs with source distance `<= near_range`.
    pub near_upper: Option<WitnessPair>,
    /// Largest source distance among pairs with image distance `<= near_range`.
    pub near_lower: Option<WitnessPair>,
    /// A pair finite in one space and infinite in the other.
    pub component_mismatch: Option<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QIReport {
    pub verdict: QIVerdict,
    pub reason: String,
    /// Constants fitted on the largest level.
    pub l: f64,
    pub c: f64,
    pub k: f64,
    pub levels: Vec<LevelReport>,
    pub witness: Vec<WitnessPair>,
    pub options: ProbeOptions,
    pub note: String,
}

impl QIReport {
    /// CSV rows `radius,d_source,d_image_min,d_image_max,pairs`.
    pub fn envelope_csv(&self) -> String {
        let mut out = String::from("radius,d_source,d_image_min,d_image_max,pairs\n");
        for lv in &self.levels {
            for b in &lv.envelope {
                out.push_str(&format!("{},{},{},{},{}\n", lv.radius, b.source, b.image_min, b.image_max, b.pairs));
            }
        }
        out
    }
}

const NOTE: &str = "REJECT is backed by finite witnesses of unbounded distortion; EMBEDDING-EVIDENCE only reports stable constants on the sampled truncations and is not a proof";

/// Fits `(L, C)` with `d/L - C <= d' <= L d + C` on an envelope.
///
/// `L` is the largest upper slope `max d'/d`, or the largest inverse lower
/// slope `d / min d'` over the upper half of the observed source range,
/// whichever is bigger (and at least 1); `C` is then the smallest offset that
/// makes every bin satisfy both bounds.
pub fn fit_distortion(envelope: &[EnvelopeBin]) -> (f64, f64) {
    let top = envelope.iter().map(|b| b.source).max().unwrap_or(0);
    let mut l: f64 = 1.0;
    for b in envelope.iter().filter(|b| b.source > 0) {
        let s = b.source as f64;
        l = l.max(b.image_max / s);
        if 2 * b.source >= top {
            l = l.max(if b.image_min > 0.0 { s / b.image_min } else { f64::INFINITY });
        }
    }
    let c = envelope
        .iter()
        .map(|b| {
            let s = b.source as f64;
            (s / l - b.image_min).max(b.image_max - l * s).max(0.0)
        })
        .fold(0.0, f64::max);
    (l, c)
}

/// Smallest `L ≥ 1` with `d/L − cap ≤ d′ ≤ L d + cap` on every pair `(d, d′)`,
/// followed by the smallest `C ≤ cap` that works for that `L`.
///
/// Fixing the additive allowance first keeps `L` from being driven by the
/// few pairs at tiny distances, which makes the fit comparable across radii.
pub fn fit_with_additive_cap(pairs: &[(f64, f64)], cap: f64) -> (f64, f64) {
    let l = pairs
        .iter()
        .filter(|p| p.0 > 0.0)
        .map(|&(d, e)| ((e - cap) / d).max(d / (e + cap)))
        .fold(1.0, f64::max);
    let c = pairs.iter().map(|&(d, e)| (e - l * d).max(d / l - e)).fold(0.0, f64::max);
    (l, c)
}

/// Envelope of a list of `(source, image)` distance pairs in unit bins.
pub fn envelope_of(pairs: impl IntoIterator<Item = (f64, f64)>) -> Vec<EnvelopeBin> {
    let mut bins: std::collections::BTreeMap<u64, EnvelopeBin> = Default::default();
    for (s, t) in pairs {
        let key = s.round() as u64;
        let e = bins.entry(key).or_insert(EnvelopeBin { source: key, pairs: 0, image_min: f64::INFINITY, image_max: 0.0 });
        e.pairs += 1;
        e.image_min = e.image_min.min(t);
        e.image_max = e.image_max.max(t);
    }
    bins.into_values().collect()
}

fn sample_pairs(level: &ProbeLevel, opts: &ProbeOptions) -> Vec<(usize, usize)> {
    let n = level.x.len();
    let total = n * n.saturating_sub(1) / 2;
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    if total <= opts.pair_budget {
        for i in 0..n {
            pairs.extend((i + 1..n).map(|j| (i, j)));
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ level.radius.to_bits());
        for _ in 0..opts.pair_budget {
            let i = rng.gen_range(0..n);
            let j = rng.gen_range(0..n - 1);
            let j = if j >= i { j + 1 } else { j };
            pairs.push((i.min(j), i.max(j)));
        }
        for i in 0..n {
            pairs.extend((i + 1..n).filter(|&j| level.x.distance(i, j) <= opts.near_range).map(|j| (i, j)));
        }
    }
    pairs.extend(level.extra_pairs.iter().map(|&(i, j)| (i.min(j), i.max(j))).filter(|(i, j)| i != j));
    pairs.sort_unstable();
    pairs.dedup();
    pairs
}

fn probe_level(level: &ProbeLevel, opts: &ProbeOptions) -> Result<LevelReport> {
    let n = level.x.len();
    if level.map.len() != n {
        return Err(Error::Usage(format!("map covers {} of {n} sample points", level.map.len())));
    }
    if let Some(&bad) = level.map.iter().find(|&&j| j >= level.y.len()) {
        return Err(Error::Usage(format!("map sends a point to missing target {bad}")));
    }
    let pairs = sample_pairs(level, opts);
    let mut measured = Vec::with_capacity(pairs.len());
    let mut mismatch = None;
    let mut near_upper: Option<WitnessPair> = None;
    let mut near_lower: Option<WitnessPair> = None;
    for &(i, j) in &pairs {
        let s = level.x.distance(i, j);
        let t = level.y.distance(level.map[i], level.map[j]);
        match (s.is_finite(), t.is_finite()) {
            (true, true) => {}
            (false, false) => continue,
            _ => {
                mismatch.get_or_insert((i, j));
                continue;
            }
        }
        measured.push((s, t));
        let w = WitnessPair { radius: level.radius, x: i, x_prime: j, source_distance: s, image_distance: t };
        if s <= opts.near_range && near_upper.as_ref().map_or(true, |b| t > b.image_distance) {
            near_upper = Some(w.clone());
        }
        if t <= opts.near_range && near_lower.as_ref().map_or(true, |b| s > b.source_distance) {
            near_lower = Some(w);
        }
    }
    let envelope = envelope_of(measured.iter().copied());
    let (l, c) = fit_distortion(&envelope);
    let gap_k = (0..level.y.len())
        .into_par_iter()
        .map(|y| level.map.iter().map(|&fx| level.y.distance(y, fx)).fold(f64::INFINITY, f64::min))
        .reduce(|| 0.0, f64::max);
    Ok(LevelReport {
        radius: level.radius,
        points: n,
        pairs: measured.len(),
        envelope,
        l,
        c,
        gap_k,
        near_upper,
        near_lower,
        component_mismatch: mismatch,
    })
}

/// `true` when `v` is non-decreasing and its last entry is at least
/// `factor` times its first.
fn diverges(v: &[f64], factor: f64) -> bool {
    v.len() >= 3 && v.windows(2).all(|w| w[0] <= w[1]) && v[v.len() - 1] >= factor * v[0].max(1.0)
}

fn within_band(v: &[f64], factor: f64) -> bool {
    let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = v.iter().copied().fold(0.0, f64::max);
    hi.is_finite() && hi + 1.0 < factor * (lo + 1.0)
}

/// Probes whether the sample maps of `levels` look like one quasi-isometric
/// embedding, across increasing truncation radii.
pub fn qi_probe(levels: &[ProbeLevel], opts: &ProbeOptions) -> Result<QIReport> {
    if levels.is_empty() {
        return Err(Error::Usage("qi_probe needs at least one level".into()));
    }
    if opts.pair_budget < 1000 {
        return Err(Error::Usage(format!("pair budget {} is below 1000", opts.pair_budget)));
    }
    if levels.windows(2).any(|w| w[0].radius >= w[1].radius) {
        return Err(Error::Usage("levels must have strictly increasing radii".into()));
    }
    let reports = levels.iter().map(|lv| probe_level(lv, opts)).collect::<Result<Vec<_>>>()?;
    let last = reports.last().unwrap();
    let (l, c) = (last.l, last.c);
    let k = reports.iter().map(|r| r.gap_k).fold(0.0, f64::max);
    let mk = |verdict, reason: String, witness| QIReport {
        verdict,
        reason,
        l,
        c,
        k,
        levels: reports.clone(),
        witness,
        options: *opts,
        note: NOTE.to_string(),
    };

    if let Some((r, (i, j))) = reports.iter().find_map(|r| r.component_mismatch.map(|p| (r.radius, p))) {
        return Ok(mk(
            QIVerdict::Reject,
            format!("component mismatch at radius {r}: pair ({i}, {j}) is connected in exactly one of the spaces"),
            Vec::new(),
        ));
    }
    let uppers: Option<Vec<WitnessPair>> = reports.iter().map(|r| r.near_upper.clone()).collect();
    if let Some(w) = uppers {
        if diverges(&w.iter().map(|p| p.image_distance).collect::<Vec<_>>(), opts.growth_threshold) {
            return Ok(mk(
                QIVerdict::Reject,
                format!(
                    "upper envelope diverges: pairs at source distance <= {} have image distances growing by >= {}x",
                    opts.near_range, opts.growth_threshold
                ),
                w,
            ));
        }
    }
    let lowers: Option<Vec<WitnessPair>> = reports.iter().map(|r| r.near_lower.clone()).collect();
    if let Some(w) = lowers {
        if diverges(&w.iter().map(|p| p.source_distance).collect::<Vec<_>>(), opts.growth_threshold) {
            return Ok(mk(
                QIVerdict::Reject,
                format!(
                    "lower envelope diverges: pairs at image distance <= {} have source distances growing by >= {}x",
                    opts.near_range, opts.growth_threshold
                ),
                w,
            ));
        }
    }

    let ls: Vec<f64> = reports.iter().map(|r| r.l).collect();
    let cs: Vec<f64> = reports.iter().map(|r| r.c).collect();
    let ks: Vec<f64> = reports.iter().map(|r| r.gap_k).collect();
    let g = opts.growth_threshold;
    if within_band(&ls, g) && within_band(&cs, g) && within_band(&ks, g) {
        Ok(mk(
            QIVerdict::EmbeddingEvidence,
            format!("L, C and K stay within a factor {g} across {} level(s)", reports.len()),
            Vec::new(),
        ))
    } else {
        Ok(mk(QIVerdict::Indeterminate, "fitted constants drift but no certified divergence".into(), Vec::new()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClosenessReport {
    /// `(radius, sup_x d_Y(f(x), g(x)))`.
    pub per_radius: Vec<(f64, f64)>,
    pub close: bool,
}

/// Whether two sample maps into `Y` stay within bounded distance.
///
/// Each level is `(Y, f, g)`; the maps are close when the sup distance stays
/// within `growth_threshold` (additively regularized by one) across levels.
pub fn closeness(levels: &[(&SampledMetricSpace, &[usize], &[usize])], growth_threshold: f64) -> Result<ClosenessReport> {
    let mut per_radius = Vec::with_capacity(levels.len());
    for (y, f, g) in levels {
        if f.len() != g.len() {
            return Err(Error::Usage("maps are defined on samples of different sizes".into()));
        }
        let m = f.iter().zip(g.iter()).map(|(&a, &b)| y.distance(a, b)).fold(0.0, f64::max);
        per_radius.push((y.radius(), m));
    }
    let values: Vec<f64> = per_radius.iter().map(|p| p.1).collect();
    Ok(ClosenessReport { close: within_band(&values, growth_threshold), per_radius })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING-KEBAB-CASE")]
pub enum GeodesicVerdict {
    Geodesic,
    NotGeodesic,
    Indeterminate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeodesicReport {
    pub verdict: GeodesicVerdict,
    /// Fitted `n <= a d + b` with `b = 0` and `a = max n / d`.
    pub a: f64,
    pub b: f64,
    pub pairs_checked: usize,
    pub chain_failures: usize,
}

/// Greedy `c`-step chains between sampled pairs: from the current point,
/// move to a sample point within distance `c` that is closest to the target.
pub fn large_scale_geodesic_check(x: &SampledMetricSpace, c: f64, pairs: usize, seed: u64) -> Result<GeodesicReport> {
    if !(c > 0.0) {
        return Err(Error::Usage(format!("step size must be positive, got {c}")));
    }
    let n = x.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let chosen: Vec<(usize, usize)> = if n < 2 {
        Vec::new()
    } else {
        (0..pairs).map(|_| (rng.gen_range(0..n), rng.gen_range(0..n))).filter(|(i, j)| i != j).collect()
    };
    let lengths: Vec<Option<(f64, usize)>> = chosen
        .par_iter()
        .filter(|&&(i, j)| x.distance(i, j).is_finite())
        .map(|&(i, j)| {
            let mut cur = i;
            let mut steps = 0;
            while cur != j {
                let next = (0..n)
                    .filter(|&z| x.distance(cur, z) <= c)
                    .min_by(|&a, &b| x.distance(a, j).total_cmp(&x.distance(b, j)).then(a.cmp(&b)))?;
                if x.distance(next, j) >= x.distance(cur, j) {
                    return None;
                }
                cur = next;
                steps += 1;
            }
            Some((x.distance(i, j), steps))
        })
        .collect();
    let failures = lengths.iter().filter(|l| l.is_none()).count();
    let a = lengths.iter().flatten().map(|&(d, s)| s as f64 / d).fold(0.0, f64::max);
    let verdict = if failures > 0 || lengths.is_empty() {
        GeodesicVerdict::Indeterminate
    } else {
        GeodesicVerdict::Geodesic
    };
    Ok(GeodesicReport { verdict, a, b: 0.0, pairs_checked: lengths.len(), chain_failures: failures })
}

/// Sample points for comparing two truncations: centers of the sets of
/// both coverings that are covered by both, thinned to at most `max_points`
/// by a seeded draw.
pub fn shared_sample_points(a: &Covering, b: &Covering, max_points: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
    let mut pts: Vec<Vec<f64>> = a.sets().iter().chain(b.sets()).map(|s| s.center()).collect();
    pts.sort_by(|x, y| x.iter().zip(y).map(|(p, q)| p.total_cmp(q)).find(|o| o.is_ne()).unwrap_or(std::cmp::Ordering::Equal));
    pts.dedup();
    let keep: Vec<bool> = pts
        .par_iter()
        .map(|x| Ok(!a.sets_containing(x)?.is_empty() && !b.sets_containing(x)?.is_empty()))
        .collect::<Result<_>>()?;
    let mut pts: Vec<Vec<f64>> = pts.into_iter().zip(keep).filter_map(|(x, k)| k.then_some(x)).collect();
    if pts.len() > max_points {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut idx = rand::seq::index::sample(&mut rng, pts.len(), max_points).into_vec();
        idx.sort_unstable();
        pts = idx.into_iter().map(|i| pts[i].clone()).collect();
    }
    Ok(pts)
}

/// Probes the identity map between the chain metrics of two covering
/// families of the same set, one level per radius.
pub fn identity_probe(
    a: &dyn crate::covering::CoveringFamily,
    b: &dyn crate::covering::CoveringFamily,
    radii: &[f64],
    max_points: usize,
    budget: &crate::geometry::IntersectionBudget,
    opts: &ProbeOptions,
) -> Result<QIReport> {
    let mut spaces = Vec::new();
    for &r in radii {
        let (ca, cb) = (a.truncate(r, budget)?, b.truncate(r, budget)?);
        let pts = shared_sample_points(&ca, &cb, max_points, opts.seed)?;
        let x = SampledMetricSpace::from_covering(&ca, &pts)?;
        let y = SampledMetricSpace::from_covering(&cb, &pts)?;
        spaces.push((r, x, y, (0..pts.len()).collect::<Vec<_>>()));
    }
    let levels: Vec<ProbeLevel> =
        spaces.iter().map(|(r, x, y, map)| ProbeLevel { radius: *r, x, y, map, extra_pairs: &[] }).collect();
    qi_probe(&levels, opts)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(radius: f64, n: usize, scale: f64) -> SampledMetricSpace {
        SampledMetricSpace::from_fn(radius, n, |i, j| ((i as f64 - j as f64) * scale).abs().ceil()).unwrap()
    }

    #[test]
    fn identity_is_an_isometry() {
        let xs: Vec<SampledMetricSpace> = [50, 100, 200].iter().map(|&n| line(n as f64, n, 1.0)).collect();
        let maps: Vec<Vec<usize>> = xs.iter().map(|x| (0..x.len()).collect()).collect();
        let levels: Vec<ProbeLevel> = xs
            .iter()
            .zip(&maps)
            .map(|(x, m)| ProbeLevel { radius: x.radius(), x, y: x, map: m, extra_pairs: &[] })
            .collect();
        let r = qi_probe(&levels, &ProbeOptions::default()).unwrap();
        assert_eq!(r.verdict, QIVerdict::EmbeddingEvidence);
        assert_eq!((r.l, r.c, r.k), (1.0, 0.0, 0.0));
    }

    #[test]
    fn bounded_pairs_with_growing_images_reject() {
        // y-distance of neighbors grows with the level
        let mut spaces = Vec::new();
        for (i, n) in [40usize, 80, 160].into_iter().enumerate() {
            let x = line(n as f64, n, 1.0);
            let stretch = 2f64.powi(i as i32 + 1);
            let y = SampledMetricSpace::from_fn(n as f64, n, |a, b| {
                let (a, b) = (a as f64, b as f64);
                let warp = |t: f64| if t >= 30.0 { t * stretch } else { t };
                (warp(a) - warp(b)).abs()
            })
            .unwrap();
            spaces.push((x, y, (0..n).collect::<Vec<_>>()));
        }
        let levels: Vec<ProbeLevel> = spaces
            .iter()
            .map(|(x, y, m)| ProbeLevel { radius: x.radius(), x, y, map: m, extra_pairs: &[] })
            .collect();
        let r = qi_probe(&levels, &ProbeOptions::default()).unwrap();
        assert_eq!(r.verdict, QIVerdict::Reject, "{}", r.reason);
        assert_eq!(r.witness.len(), 3);
        assert!(r.witness.iter().all(|w| w.source_distance <= 3.0));
    }

    #[test]
    fn fit_on_scaled_line() {
        let env = envelope_of((1..20).map(|d| (d as f64, (d as f64 / 2.0).ceil())));
        let (l, c) = fit_distortion(&env);
        assert_eq!(l, 2.0);
        assert!(c <= 1.0);
    }

    #[test]
    fn closeness_examples() {
        let spaces: Vec<SampledMetricSpace> = [20usize, 40, 80].iter().map(|&n| line(n as f64, 2 * n + 2, 1.0)).collect();
        let id: Vec<Vec<usize>> = [20usize, 40, 80].iter().map(|&n| (0..=n).collect()).collect();
        let shift: Vec<Vec<usize>> = [20usize, 40, 80].iter().map(|&n| (1..=n + 1).collect()).collect();
        let double: Vec<Vec<usize>> = [20usize, 40, 80].iter().map(|&n| (0..=n).map(|i| 2 * i).collect()).collect();
        fn lv<'a>(
            spaces: &'a [SampledMetricSpace],
            id: &'a [Vec<usize>],
            g: &'a [Vec<usize>],
        ) -> Vec<(&'a SampledMetricSpace, &'a [usize], &'a [usize])> {
            spaces.iter().zip(id).zip(g).map(|((y, f), g)| (y, f.as_slice(), g.as_slice())).collect()
        }
        let same = closeness(&lv(&spaces, &id, &id), 2.0).unwrap();
        assert!(same.close && same.per_radius.iter().all(|p| p.1 == 0.0));
        let s = closeness(&lv(&spaces, &id, &shift), 2.0).unwrap();
        assert!(s.close && s.per_radius.iter().all(|p| p.1 == 1.0));
        assert!(!closeness(&lv(&spaces, &id, &double), 2.0).unwrap().close);
    }

    #[test]
    fn components_and_geodesics() {
        let two = SampledMetricSpace::from_fn(1.0, 6, |i, j| {
            if (i < 3) == (j < 3) {
                (i as f64 - j as f64).abs()
            } else {
                f64::INFINITY
            }
        })
        .unwrap();
        assert_eq!(two.components(), vec![0, 0, 0, 1, 1, 1]);
        let g = large_scale_geodesic_check(&two, 1.0, 50, 3).unwrap();
        assert_eq!(g.verdict, GeodesicVerdict::Geodesic);
        assert_eq!(g.a, 1.0);
        assert!(SampledMetricSpace::from_fn(1.0, 2, |i, j| if i == j { 0.0 } else { (i + 1) as f64 }).is_err());
    }
}
