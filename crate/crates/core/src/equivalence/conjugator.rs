//! Conjugators between shearing subgroups.
//!
//! An algebra isomorphism `α: 𝔰 → 𝔰′`, `α(X_i) = Σ_k A_{ki} X′_k`, is searched
//! for by seeded Levenberg–Marquardt runs on the structure equations
//! `α(X_i X_j) = α(X_i) α(X_j)`. A converged run is snapped entry by entry to
//! nearby small-denominator rationals, re-solving after each snap, and the
//! resulting `C = diag(1, Aᵀ)` is accepted only after exact verification of
//! `C⁻¹ X_i C ∈ 𝔰′`. Negative answers come only from invariant mismatches.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::invariants::{algebra_invariants, graded_invariants, AlgebraInvariants};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::{q_to_f64, qi, rational_pow, Q};
use crate::shearlet::ShearletGroupSpec;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchBudget {
    pub seeds: usize,
    pub seed: u64,
    /// Residual below which a floating-point run counts as a candidate.
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for SearchBudget {
    fn default() -> Self {
        Self { seeds: 200, seed: 0x5eed, tolerance: 1e-10, max_iterations: 200 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ConjugatorOutcome {
    /// A verified conjugator and the seed that produced it (`None` for
    /// the identity or a supplied candidate).
    Found { c: Matrix<Q>, seed: Option<u64> },
    /// Certified: the invariant tables differ, so no isomorphism exists.
    NotFound { a: Box<AlgebraInvariants>, b: Box<AlgebraInvariants> },
    Indeterminate { seeds_tried: usize },
}

/// Exact check that `C⁻¹ (I + X) C ∈ S′` for every canonical `X` of `a`;
/// equal dimensions then give `C⁻¹ S C = S′`.
pub fn verify_conjugator(c: &Matrix<Q>, a: &ShearletGroupSpec, b: &ShearletGroupSpec) -> Result<bool> {
    let d = a.dim();
    if b.dim() != d || c.rows() != d || c.cols() != d {
        return Ok(false);
    }
    let Ok(ci) = c.inverse() else { return Ok(false) };
    for x in a.basis() {
        let y = ci.mul(x).mul(c);
        let combo = (0..d - 1).fold(Matrix::zeros(d, d), |acc, k| acc.add(&b.basis()[k].scale(&y[(0, k + 1)])));
        if combo != y {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommutingReport {
    /// `[Y, C⁻¹X_jC] = C⁻¹[Y, X_j]C` for every canonical `X_j`.
    pub infinitesimal: bool,
    /// `d⁻¹C⁻¹sCd = C⁻¹d⁻¹sdC` on all sampled `(s, d)`.
    pub finite: bool,
    pub finite_samples: usize,
}

impl CommutingReport {
    pub fn passed(&self) -> bool {
        self.infinitesimal && self.finite
    }
}

/// Whether conjugation by `C` commutes with the common scaling subgroup.
/// Requires `λ = λ′`; otherwise nothing commutes and both checks fail.
pub fn commuting_check(c: &Matrix<Q>, a: &ShearletGroupSpec, b: &ShearletGroupSpec, seed: u64) -> Result<CommutingReport> {
    if a.lambda() != b.lambda() || !verify_conjugator(c, a, b)? {
        return Ok(CommutingReport { infinitesimal: false, finite: false, finite_samples: 0 });
    }
    let ci = c.inverse()?;
    let y = a.y_matrix();
    let infinitesimal = a.basis().iter().all(|x| y.commutator(&ci.mul(x).mul(c)) == ci.mul(&y.commutator(x)).mul(c));
    // d = exp(rY) with e^r = 2^L keeps every entry rational
    let l = crate::scalar::common_denominator(a.lambda());
    let base = num::pow::pow(qi(2), num::ToPrimitive::to_usize(&l).unwrap_or(1));
    let mut diag = vec![base.clone()];
    for lam in a.lambda() {
        diag.push(rational_pow(&base, lam).ok_or_else(|| Error::Inexact("scaling entry is irrational".into()))?);
    }
    let dm = Matrix::diagonal(&diag);
    let ds = [dm.clone(), dm.inverse()?];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut finite = true;
    let mut samples = 0;
    for _ in 0..8 {
        let t: Vec<Q> = (0..a.dim() - 1).map(|_| qi(rng.gen_range(-3..=3))).collect();
        let s = a.group::<Q>().shear_matrix(&t);
        for d in &ds {
            let di = d.inverse()?;
            let lhs = di.mul(&ci).mul(&s).mul(c).mul(d);
            let rhs = ci.mul(&di).mul(&s).mul(d).mul(c);
            samples += 1;
            if lhs != rhs {
                finite = false;
            }
        }
    }
    Ok(CommutingReport { infinitesimal, finite, finite_samples: samples })
}

/// `diag(1, Aᵀ)` for the coefficient matrix `A` of `α`.
fn conjugator_from(a: &[Vec<Q>]) -> Matrix<Q> {
    let n = a.len();
    let mut c = Matrix::identity(n + 1);
    for k in 0..n {
        for i in 0..n {
            c[(i + 1, k + 1)] = a[k][i].clone();
        }
    }
    c
}

struct System {
    n: usize,
    c: Vec<Vec<Vec<f64>>>,
    cp: Vec<Vec<Vec<f64>>>,
}

impl System {
    fn new(a: &ShearletGroupSpec, b: &ShearletGroupSpec) -> Self {
        let conv = |s: &ShearletGroupSpec| -> Vec<Vec<Vec<f64>>> {
            s.structure().iter().map(|r| r.iter().map(|v| v.iter().map(q_to_f64).collect()).collect()).collect()
        };
        Self { n: a.dim() - 1, c: conv(a), cp: conv(b) }
    }

    /// Residuals and Jacobian in the variables `x[k * n + i] = A_{ki}`.
    fn eval(&self, x: &[f64]) -> (Vec<f64>, Vec<Vec<f64>>) {
        let n = self.n;
        let av = |k: usize, i: usize| x[k * n + i];
        let mut r = Vec::new();
        let mut jac = Vec::new();
        for i in 0..n {
            for j in i..n {
                for m in 0..n {
                    let mut val = 0.0;
                    let mut row = vec![0.0; n * n];
                    for k in 0..n {
                        val += self.c[i][j][k] * av(m, k);
                        row[m * n + k] += self.c[i][j][k];
                    }
                    for p in 0..n {
                        for qq in 0..n {
                            let cc = self.cp[p][qq][m];
                            if cc == 0.0 {
                                continue;
                            }
                            val -= av(p, i) * av(qq, j) * cc;
                            row[p * n + i] -= av(qq, j) * cc;
                            row[qq * n + j] -= av(p, i) * cc;
                        }
                    }
                    r.push(val);
                    jac.push(row);
                }
            }
        }
        (r, jac)
    }

    fn norm(&self, x: &[f64]) -> f64 {
        self.eval(x).0.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Levenberg–Marquardt on the free variables; returns the final residual norm.
    fn solve(&self, x: &mut [f64], free: &[bool], max_iter: usize, tol: f64) -> f64 {
        let idx: Vec<usize> = (0..x.len()).filter(|&i| free[i]).collect();
        let mut mu = 1e-3;
        let mut res = self.norm(x);
        for _ in 0..max_iter {
            if res < tol || idx.is_empty() {
                break;
            }
            let (r, jac) = self.eval(x);
            let m = idx.len();
            let mut jtj = Matrix::<f64>::zeros(m, m);
            let mut jtr = vec![0.0; m];
            for (row, rv) in jac.iter().zip(&r) {
                for (a, &ia) in idx.iter().enumerate() {
                    if row[ia] == 0.0 {
                        continue;
                    }
                    jtr[a] += row[ia] * rv;
                    for (b, &ib) in idx.iter().enumerate() {
                        jtj[(a, b)] += row[ia] * row[ib];
                    }
                }
            }
            let mut improved = false;
            for _ in 0..12 {
                let mut sys = jtj.clone();
                for a in 0..m {
                    sys[(a, a)] += mu * (1.0 + jtj[(a, a)]);
                }
                let Ok(inv) = sys.inverse() else {
                    mu *= 10.0;
                    continue;
                };
                let step = inv.mul_vec(&jtr);
                let trial: Vec<f64> = {
                    let mut t = x.to_vec();
                    for (a, &ia) in idx.iter().enumerate() {
                        t[ia] -= step[a];
                    }
                    t
                };
                let tr = self.norm(&trial);
                if tr < res {
                    x.copy_from_slice(&trial);
                    res = tr;
                    mu = (mu / 3.0).max(1e-12);
                    improved = true;
                    break;
                }
                mu *= 10.0;
            }
            if !improved {
                break;
            }
        }
        res
    }
}

/// Best small-denominator rational near `v`: `(error, numerator, denominator)`.
fn snap(v: f64) -> (f64, i64, i64) {
    (1..=12)
        .map(|d| {
            let n = (v * d as f64).round();
            ((v - n / d as f64).abs(), n as i64, d)
        })
        .fold((f64::INFINITY, 0, 1), |best, c| if c.0 < best.0 - 1e-12 { c } else { best })
}

fn det_f64(x: &[f64], n: usize) -> f64 {
    Matrix::from_rows((0..n).map(|k| x[k * n..(k + 1) * n].to_vec()).collect()).determinant()
}

/// One seeded run: LM from a random start, then snapping to rationals.
fn run_seed(sys: &System, fixed_zero: &[bool], seed: u64, budget: &SearchBudget) -> Option<Vec<Vec<Q>>> {
    let n = sys.n;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x: Vec<f64> = (0..n * n).map(|i| if fixed_zero[i] { 0.0 } else { rng.gen_range(-2.0..2.0) }).collect();
    let mut free: Vec<bool> = fixed_zero.iter().map(|z| !z).collect();
    if sys.solve(&mut x, &free, budget.max_iterations, budget.tolerance) >= budget.tolerance || det_f64(&x, n).abs() < 1e-6 {
        return None;
    }
    let mut exact: Vec<Option<Q>> = fixed_zero.iter().map(|&z| z.then(|| qi(0))).collect();
    let mut blocked = vec![false; n * n];
    loop {
        let pick = (0..n * n).filter(|&i| free[i] && !blocked[i]).min_by(|&a, &b| snap(x[a]).0.total_cmp(&snap(x[b]).0));
        let Some(i) = pick else { break };
        let (_, num, den) = snap(x[i]);
        let saved = x.clone();
        x[i] = num as f64 / den as f64;
        free[i] = false;
        let res = sys.solve(&mut x, &free, budget.max_iterations, budget.tolerance);
        if res < budget.tolerance && det_f64(&x, n).abs() > 1e-6 {
            exact[i] = Some(Q::new(num.into(), den.into()));
        } else {
            x = saved;
            free[i] = true;
            blocked[i] = true;
        }
    }
    let flat: Option<Vec<Q>> = exact.into_iter().collect();
    let flat = flat?;
    Some((0..n).map(|k| flat[k * n..(k + 1) * n].to_vec()).collect())
}

/// Searches for `C` with `C⁻¹ S_a C = S_b`. With `graded`, `α` is restricted
/// to preserve the `λ`-weight spaces, as commuting conjugators must.
pub fn find_conjugator(
    a: &ShearletGroupSpec,
    b: &ShearletGroupSpec,
    candidates: &[Matrix<Q>],
    graded: bool,
    budget: &SearchBudget,
) -> Result<ConjugatorOutcome> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), got: b.dim() });
    }
    let (ia, ib) = (algebra_invariants(a), algebra_invariants(b));
    if ia != ib {
        return Ok(ConjugatorOutcome::NotFound { a: Box::new(ia), b: Box::new(ib) });
    }
    if graded && a.lambda() == b.lambda() && graded_invariants(a) != graded_invariants(b) {
        return Ok(ConjugatorOutcome::NotFound { a: Box::new(ia), b: Box::new(ib) });
    }
    let d = a.dim();
    let accept = |c: &Matrix<Q>| -> Result<bool> {
        Ok(verify_conjugator(c, a, b)? && (!graded || commuting_check(c, a, b, budget.seed)?.passed()))
    };
    let identity = Matrix::identity(d);
    for c in std::iter::once(&identity).chain(candidates) {
        if accept(c)? {
            return Ok(ConjugatorOutcome::Found { c: c.clone(), seed: None });
        }
    }
    let n = d - 1;
    let sys = System::new(a, b);
    let fixed_zero: Vec<bool> = (0..n * n).map(|x| graded && a.lambda()[x / n] != a.lambda()[x % n]).collect();
    // seeds in parallel, in chunks so that the first success in seed order wins
    let seeds: Vec<u64> = (0..budget.seeds as u64).map(|s| budget.seed.wrapping_add(s)).collect();
    for chunk in seeds.chunks(16) {
        let found: Vec<Option<(u64, Matrix<Q>)>> = chunk
            .par_iter()
            .map(|&s| {
                let m = run_seed(&sys, &fixed_zero, s, budget)?;
                let c = conjugator_from(&m);
                accept(&c).ok()?.then_some((s, c))
            })
            .collect();
        if let Some((s, c)) = found.into_iter().flatten().next() {
            return Ok(ConjugatorOutcome::Found { c, seed: Some(s) });
        }
    }
    Ok(ConjugatorOutcome::Indeterminate { seeds_tried: budget.seeds })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::q;

    fn six_three() -> (ShearletGroupSpec, ShearletGroupSpec, Matrix<Q>) {
        let s1 = ShearletGroupSpec::toeplitz(4, qi(0)).unwrap();
        let mut c = Matrix::identity(4);
        c[(1, 2)] = qi(1);
        let s2 = s1.conjugate(&c, "s2").unwrap();
        (s1, s2, c)
    }

    #[test]
    fn identity_for_equal_specs() {
        let s = ShearletGroupSpec::toeplitz(4, q(1, 3)).unwrap();
        let out = find_conjugator(&s, &s, &[], false, &SearchBudget::default()).unwrap();
        assert_eq!(out, ConjugatorOutcome::Found { c: Matrix::identity(4), seed: None });
    }

    #[test]
    fn displayed_conjugator_verifies() {
        let (s1, s2, c) = six_three();
        assert!(verify_conjugator(&c, &s1, &s2).unwrap());
        assert!(!verify_conjugator(&Matrix::identity(4), &s1, &s2).unwrap());
        assert!(commuting_check(&c, &s1, &s2, 1).unwrap().passed());
    }

    #[test]
    fn search_recovers_a_conjugator() {
        let (s1, s2, _) = six_three();
        match find_conjugator(&s1, &s2, &[], true, &SearchBudget::default()).unwrap() {
            ConjugatorOutcome::Found { c, seed } => {
                assert!(seed.is_some());
                assert!(verify_conjugator(&c, &s1, &s2).unwrap());
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn invariant_mismatch_is_certified() {
        let s = ShearletGroupSpec::standard(vec![qi(1); 3]).unwrap();
        let t = ShearletGroupSpec::toeplitz(4, qi(0)).unwrap();
        assert!(matches!(find_conjugator(&s, &t, &[], false, &SearchBudget::default()).unwrap(), ConjugatorOutcome::NotFound { .. }));
    }

    #[test]
    fn weight_mixing_conjugator_does_not_commute() {
        let s = ShearletGroupSpec::standard(vec![q(1, 2), q(1, 3)]).unwrap();
        // swaps e_2 and e_3, so C⁻¹ X_2 C = X_3
        let mut c = Matrix::zeros(3, 3);
        c[(0, 0)] = qi(1);
        c[(1, 2)] = qi(1);
        c[(2, 1)] = qi(1);
        assert!(verify_conjugator(&c, &s, &s).unwrap());
        assert_eq!(c.inverse().unwrap().mul(&s.basis()[0]).mul(&c), s.basis()[1]);
        let rep = commuting_check(&c, &s, &s, 3).unwrap();
        assert!(!rep.infinitesimal && !rep.finite);
        assert!(commuting_check(&Matrix::identity(3), &s, &s, 3).unwrap().passed());
    }

    #[test]
    fn snapping_prefers_small_denominators() {
        assert_eq!(snap(0.5 + 1e-13), (snap(0.5 + 1e-13).0, 1, 2));
        assert_eq!(snap(-2.0).1, -2);
    }
}
