//! The transfer map between two shearlet groups and the witness sequence
//! that separates groups with different diagonal exponents.
//!
//! For `λ_i ≠ λ′_i` put `h = h(a_0, e_i)` and `h_n = h^{±n}`. Consecutive
//! elements differ by `h`, so their word distance is at most one, while the
//! increments `φ(h_n)^{-1} φ(h_{n+1})` in the second group grow like
//! `a_0^{n |λ_i − λ′_i|}`. Everything is computed exactly with
//! `a_0 = 2^L`, `L` the common denominator of both exponent vectors.

use serde::{Deserialize, Serialize};

use crate::coarse::{qi_probe, ProbeLevel, ProbeOptions, QIReport, SampledMetricSpace};
use crate::error::{Error, Result};
use crate::scalar::{format_q, qi, Scalar, Q};
use crate::shearlet::{Group, GroupElement, ShearletGroupSpec};

/// `φ = (p_b)^{-1} ∘ p_a` in coordinates.
#[derive(Debug, Clone)]
pub struct TransferMap<S> {
    from: Group<S>,
    to: Group<S>,
}

impl<S: Scalar> TransferMap<S> {
    pub fn new(a: &ShearletGroupSpec, b: &ShearletGroupSpec) -> Result<Self> {
        if a.dim() != b.dim() {
            return Err(Error::DimensionMismatch { expected: a.dim(), got: b.dim() });
        }
        Ok(Self { from: a.group(), to: b.group() })
    }

    pub fn apply(&self, g: &GroupElement<S>) -> Result<GroupElement<S>> {
        self.to.orbit_map_inverse(&self.from.orbit_map(g)?)
    }

    pub fn source(&self) -> &Group<S> {
        &self.from
    }

    pub fn target(&self) -> &Group<S> {
        &self.to
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessRow {
    pub n: usize,
    /// `log10` of the largest shear coordinate of the image increment.
    pub increment_log10: f64,
    /// Certified lower bound on the word length of the image increment.
    pub image_word_lower: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct NonequivalenceWitness {
    /// 1-based coordinate `i` with `λ_i ≠ λ′_i`.
    pub coordinate: usize,
    /// The sequence lives in the second group (taken when `λ_i = 1`).
    pub swapped: bool,
    /// `+1` for `h^n`, `−1` for `h^{-n}`.
    pub direction: i8,
    pub generator_scale: String,
    /// `ln M`, with `M` bounding `‖w‖_∞` on the word window of the target.
    pub log_norm_bound: f64,
    pub rows: Vec<WitnessRow>,
    #[serde(skip)]
    pub source: Vec<GroupElement<Q>>,
    #[serde(skip)]
    pub images: Vec<GroupElement<Q>>,
    #[serde(skip)]
    target: Option<Group<Q>>,
}

fn inf_norm(g: &Group<Q>, h: &GroupElement<Q>) -> Result<f64> {
    let m = g.to_matrix(h)?;
    Ok((0..m.rows()).map(|i| m.row(i).iter().map(|v| v.to_f64().abs()).sum::<f64>()).fold(0.0, f64::max))
}

impl NonequivalenceWitness {
    /// Certified lower bound on the word length of `g`:
    /// `‖w_1⋯w_k‖ ≤ M^k` for letters of the window, applied to `g` and `g⁻¹`.
    pub fn word_lower_bound(&self, g: &GroupElement<Q>) -> Result<f64> {
        let target = self.target.as_ref().ok_or_else(|| Error::Usage("witness has no target group".into()))?;
        let up = inf_norm(target, g)?.ln().max(inf_norm(target, &target.invert(g)?)?.ln());
        Ok((up / self.log_norm_bound).max(0.0))
    }

    /// Source distances `|m − n|` (upper bounds: consecutive points differ
    /// by one letter) against certified image lower bounds, at the given caps.
    pub fn probe(&self, caps: &[usize], opts: &ProbeOptions) -> Result<QIReport> {
        let target = self.target.as_ref().ok_or_else(|| Error::Usage("witness has no target group".into()))?;
        let top = *caps.iter().max().ok_or_else(|| Error::Usage("no caps given".into()))?;
        if top >= self.images.len() {
            return Err(Error::Usage(format!("cap {top} exceeds the witness length {}", self.images.len() - 1)));
        }
        let inverses: Vec<GroupElement<Q>> = self.images.iter().map(|g| target.invert(g)).collect::<Result<_>>()?;
        let m = top + 1;
        let mut dy = vec![0.0; m * m];
        for i in 0..m {
            for j in i + 1..m {
                let v = self.word_lower_bound(&target.multiply(&inverses[i], &self.images[j])?)?;
                dy[i * m + j] = v;
                dy[j * m + i] = v;
            }
        }
        let spaces = caps
            .iter()
            .map(|&cap| {
                let k = cap + 1;
                let x = SampledMetricSpace::from_fn(cap as f64, k, |i, j| (i as f64 - j as f64).abs())?;
                let y = SampledMetricSpace::from_fn(cap as f64, k, |i, j| dy[i * m + j])?;
                Ok((x, y, (0..k).collect::<Vec<_>>()))
            })
            .collect::<Result<Vec<_>>>()?;
        let levels: Vec<ProbeLevel> = spaces
            .iter()
            .zip(caps)
            .map(|((x, y, map), &cap)| ProbeLevel { radius: cap as f64, x, y, map, extra_pairs: &[] })
            .collect();
        qi_probe(&levels, opts)
    }
}

/// Bound on `‖w‖_∞` for `w` or `w⁻¹` in the box `a ∈ [1/b, b]`, `|t_j| ≤ ρ`.
fn window_norm_bound(spec: &ShearletGroupSpec, b: f64, rho: f64) -> f64 {
    let big_lambda = spec.lambda().iter().map(|l| l.to_f64().abs()).fold(1.0, f64::max);
    let tau: f64 = rho * spec.basis().iter().map(|x| {
        (0..x.rows()).map(|i| x.row(i).iter().map(|v| v.to_f64().abs()).sum::<f64>()).fold(0.0, f64::max)
    }).sum::<f64>();
    let neumann: f64 = (0..spec.dim()).map(|k| tau.powi(k as i32)).sum();
    b.powf(big_lambda) * neumann
}

/// The witness sequence `h_0, …, h_cap` for coordinate `coordinate`
/// (1-based, `2..=d`), or the first coordinate where the exponents differ.
pub fn nonequivalence_witness(
    a: &ShearletGroupSpec,
    b: &ShearletGroupSpec,
    coordinate: Option<usize>,
    cap: usize,
) -> Result<NonequivalenceWitness> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), got: b.dim() });
    }
    let idx = match coordinate {
        Some(c) if (2..=a.dim()).contains(&c) => c - 2,
        Some(c) => return Err(Error::Usage(format!("coordinate {c} is outside 2..={}", a.dim()))),
        None => (0..a.dim() - 1)
            .find(|&i| a.lambda()[i] != b.lambda()[i])
            .ok_or_else(|| Error::Usage("equal diagonal exponents admit no witness".into()))?,
    };
    if a.lambda()[idx] == b.lambda()[idx] {
        return Err(Error::Usage(format!("lambda_{} agrees in both groups", idx + 2)));
    }
    if cap == 0 || cap > 60 {
        return Err(Error::Usage(format!("witness cap must be in 1..=60, got {cap}")));
    }
    // with λ_i = 1 the leading increment cancels; run the sequence in the other group
    let swapped = a.lambda()[idx] == qi(1);
    let (src, dst) = if swapped { (b, a) } else { (a, b) };
    let direction: i8 = if src.lambda()[idx] > dst.lambda()[idx] { 1 } else { -1 };
    let l = crate::scalar::common_denominator(src.lambda().iter().chain(dst.lambda()));
    let a0 = num::pow::pow(qi(2), num::ToPrimitive::to_usize(&l).unwrap_or(1));
    let phi = TransferMap::<Q>::new(src, dst)?;
    let (g, target) = (phi.source().clone(), phi.target().clone());
    let mut t = vec![qi(0); src.dim() - 1];
    t[idx] = qi(1);
    let mut h = g.element(1, a0.clone(), t)?;
    if direction < 0 {
        h = g.invert(&h)?;
    }
    let mut source = vec![g.identity()];
    for _ in 0..cap {
        let next = g.multiply(source.last().unwrap(), &h)?;
        source.push(next);
    }
    let images: Vec<GroupElement<Q>> = source.iter().map(|x| phi.apply(x)).collect::<Result<_>>()?;
    let log_norm_bound = window_norm_bound(dst, a0.to_f64(), 1.0).ln();
    let mut w = NonequivalenceWitness {
        coordinate: idx + 2,
        swapped,
        direction,
        generator_scale: format_q(&a0),
        log_norm_bound,
        rows: Vec::new(),
        source,
        images,
        target: Some(target.clone()),
    };
    for n in 0..cap {
        let inc = target.multiply(&target.invert(&w.images[n])?, &w.images[n + 1])?;
        let big = inc.t.iter().map(|v| v.to_f64().abs()).fold(0.0, f64::max);
        w.rows.push(WitnessRow { n, increment_log10: big.log10(), image_word_lower: w.word_lower_bound(&inc)? });
    }
    Ok(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::q;

    #[test]
    fn transfer_identity_for_equal_lambda() {
        let s = ShearletGroupSpec::toeplitz(3, q(1, 2)).unwrap();
        let phi = TransferMap::<Q>::new(&s, &s).unwrap();
        let g = phi.source().element(-1, qi(16), vec![qi(3), q(-1, 2)]).unwrap();
        assert_eq!(phi.apply(&g).unwrap(), g);
    }

    #[test]
    fn transfer_rescales_shears() {
        let a = ShearletGroupSpec::standard(vec![q(1, 2)]).unwrap();
        let b = ShearletGroupSpec::standard(vec![qi(1)]).unwrap();
        let phi = TransferMap::<f64>::new(&a, &b).unwrap();
        let r = 1.3f64;
        let g = phi.source().element(1, r.exp(), vec![2.0]).unwrap();
        let out = phi.apply(&g).unwrap();
        assert!((out.a - r.exp()).abs() < 1e-12);
        assert!((out.t[0] - (-r / 2.0).exp() * 2.0).abs() < 1e-12);
        let pa = phi.source().orbit_map(&g).unwrap();
        let pb = phi.target().orbit_map(&out).unwrap();
        assert!(pa.iter().zip(&pb).all(|(x, y)| (x - y).abs() < 1e-12));
    }

    #[test]
    fn increments_follow_the_closed_form() {
        // λ = 1/2 > λ' = 1/4: forward direction, no swap
        let a = ShearletGroupSpec::standard(vec![q(1, 2)]).unwrap();
        let b = ShearletGroupSpec::standard(vec![q(1, 4)]).unwrap();
        let w = nonequivalence_witness(&a, &b, None, 20).unwrap();
        assert_eq!((w.direction, w.swapped), (1, false));
        let a0: f64 = 16.0;
        let (l, lp) = (0.5f64, 0.25f64);
        for row in &w.rows {
            let n = row.n as f64;
            let closed = a0.powf(n * (l - lp)) * (a0.powf(1.0 - lp) - a0.powf(l - lp)) / (a0.powf(1.0 - l) - 1.0);
            assert!((row.increment_log10 - closed.abs().log10()).abs() < 1e-9, "{row:?}");
        }
    }

    #[test]
    fn refuses_equal_lambda() {
        let s = ShearletGroupSpec::standard(vec![q(1, 2)]).unwrap();
        assert!(matches!(nonequivalence_witness(&s, &s, None, 10), Err(Error::Usage(_))));
    }
}
