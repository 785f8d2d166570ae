//! Isomorphism invariants of the shearing algebra `𝔰`.
//!
//! All computations are exact, in the coordinates of the canonical basis.

use serde::{Deserialize, Serialize};

use crate::linalg::{orthogonal_complement, rank, row_basis};
use crate::scalar::{format_q, qi, Q};
use crate::shearlet::ShearletGroupSpec;

/// Rank and sign pattern of the quadratic map `X ↦ X²` from `𝔰/𝔰²` to the
/// line `𝔰²/𝔰³`; the sign of the target is arbitrary, so `positive ≥ negative`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadraticSignature {
    pub rank: usize,
    pub positive: usize,
    pub negative: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgebraInvariants {
    pub dim: usize,
    /// `dim 𝔰^k` for `k = 1, 2, …`, ending with the first zero.
    pub power_dims: Vec<usize>,
    pub annihilator_dim: usize,
    /// Least `k` with `𝔰^k = 0`.
    pub nilpotency_index: usize,
    /// Present when `dim 𝔰² − dim 𝔰³ = 1`.
    pub quadratic: Option<QuadraticSignature>,
}

/// `dim(V_w ∩ 𝔰^k)` for the weight space `V_w = span{X_j : λ_j = w}`.
/// These are invariant under isomorphisms that preserve the `ad Y`
/// eigenspaces, which is what a commuting conjugator induces.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightDims {
    pub weight: String,
    pub dims: Vec<usize>,
}

/// `u · v` in canonical coordinates.
pub(crate) fn product(spec: &ShearletGroupSpec, u: &[Q], v: &[Q]) -> Vec<Q> {
    let c = spec.structure();
    let n = u.len();
    let mut out = vec![qi(0); n];
    for i in 0..n {
        if u[i] == qi(0) {
            continue;
        }
        for j in 0..n {
            if v[j] == qi(0) {
                continue;
            }
            for (k, o) in out.iter_mut().enumerate() {
                if c[i][j][k] != qi(0) {
                    *o += &u[i] * &v[j] * &c[i][j][k];
                }
            }
        }
    }
    out
}

fn unit(n: usize, i: usize) -> Vec<Q> {
    let mut v = vec![qi(0); n];
    v[i] = qi(1);
    v
}

/// Bases of `𝔰^1, 𝔰^2, …` up to and including the first zero power.
pub(crate) fn powers(spec: &ShearletGroupSpec) -> Vec<Vec<Vec<Q>>> {
    let n = spec.dim() - 1;
    let mut out = vec![(0..n).map(|i| unit(n, i)).collect::<Vec<_>>()];
    while !out.last().unwrap().is_empty() {
        let prev = out.last().unwrap();
        let prods: Vec<Vec<Q>> = (0..n).flat_map(|i| prev.iter().map(move |v| (i, v))).map(|(i, v)| product(spec, &unit(n, i), v)).collect();
        out.push(row_basis(&prods, n));
    }
    out
}

pub fn algebra_invariants(spec: &ShearletGroupSpec) -> AlgebraInvariants {
    let n = spec.dim() - 1;
    let pw = powers(spec);
    let power_dims: Vec<usize> = pw.iter().map(Vec::len).collect();
    // annihilator: v with v X_i = 0 for all i; one equation per (i, k)
    let c = spec.structure();
    let eqs: Vec<Vec<Q>> = (0..n).flat_map(|i| (0..n).map(move |k| (0..n).map(|j| c[j][i][k].clone()).collect())).collect();
    let annihilator_dim = n - rank(&eqs, n);
    let quadratic = if pw.len() > 2 && pw[1].len() == pw.get(2).map_or(0, Vec::len) + 1 {
        quadratic_signature(spec, &pw[1], &pw[2])
    } else {
        None
    };
    AlgebraInvariants { dim: n, nilpotency_index: power_dims.len(), power_dims, annihilator_dim, quadratic }
}

fn quadratic_signature(spec: &ShearletGroupSpec, s2: &[Vec<Q>], s3: &[Vec<Q>]) -> Option<QuadraticSignature> {
    let n = spec.dim() - 1;
    let complement = orthogonal_complement(s2, n);
    let dot = |a: &[Q], b: &[Q]| a.iter().zip(b).fold(qi(0), |acc, (x, y)| acc + x * y);
    // a functional vanishing on 𝔰³ but not on 𝔰²
    let f = orthogonal_complement(s3, n).into_iter().find(|f| s2.iter().any(|v| dot(f, v) != qi(0)))?;
    let m = complement.len();
    let mut b: Vec<Vec<Q>> = (0..m).map(|i| (0..m).map(|j| dot(&f, &product(spec, &complement[i], &complement[j]))).collect()).collect();
    let (pos, neg) = congruence_signs(&mut b);
    Some(QuadraticSignature { rank: pos + neg, positive: pos.max(neg), negative: pos.min(neg) })
}

/// Numbers of positive and negative pivots of a symmetric rational matrix
/// under exact congruence diagonalization.
fn congruence_signs(b: &mut [Vec<Q>]) -> (usize, usize) {
    let m = b.len();
    let (mut pos, mut neg) = (0, 0);
    for k in 0..m {
        let pivot = (k..m).find(|&i| b[i][i] != qi(0));
        match pivot {
            Some(p) => {
                b.swap(k, p);
                for row in b.iter_mut() {
                    row.swap(k, p);
                }
            }
            None => {
                // all remaining diagonal entries vanish; add row/column j to k
                let Some((i, j)) = (k..m).flat_map(|i| (i + 1..m).map(move |j| (i, j))).find(|&(i, j)| b[i][j] != qi(0)) else {
                    break;
                };
                if i != k {
                    b.swap(k, i);
                    for row in b.iter_mut() {
                        row.swap(k, i);
                    }
                }
                let j = if j == k { i } else { j };
                for c in 0..m {
                    let v = b[j][c].clone();
                    b[k][c] += v;
                }
                for r in 0..m {
                    let v = b[r][j].clone();
                    b[r][k] += v;
                }
            }
        }
        let d = b[k][k].clone();
        if d > qi(0) {
            pos += 1;
        } else {
            neg += 1;
        }
        for i in k + 1..m {
            let f = &b[i][k] / &d;
            if f == qi(0) {
                continue;
            }
            for c in k..m {
                let v = &f * &b[k][c];
                b[i][c] -= v;
            }
            for r in k..m {
                let v = &f * &b[r][k];
                b[r][i] -= v;
            }
        }
    }
    (pos, neg)
}

pub fn graded_invariants(spec: &ShearletGroupSpec) -> Vec<WeightDims> {
    let n = spec.dim() - 1;
    let pw = powers(spec);
    let mut weights: Vec<Q> = spec.lambda().to_vec();
    weights.sort();
    weights.dedup();
    weights
        .into_iter()
        .map(|w| {
            let vw: Vec<Vec<Q>> = (0..n).filter(|&j| spec.lambda()[j] == w).map(|j| unit(n, j)).collect();
            let dims = pw
                .iter()
                .map(|p| {
                    let sum: Vec<Vec<Q>> = vw.iter().chain(p).cloned().collect();
                    vw.len() + p.len() - rank(&sum, n)
                })
                .collect();
            WeightDims { weight: format_q(&w), dims }
        })
        .collect()
}
