//! Group elements in coordinates `(ε, a, t)`, `a = e^r`, and their matrices.
//!
//! `h(ε, a, t) = ε · diag(a^{-1}, a^{-λ_2}, …) · (I + Σ t_j X_j)^{-1}`. With
//! `s(t) = (I + T)^{-1}` and `d(a) = exp(−rY)`, compatibility gives
//! `d(a)^{-1} s(t) d(a) = s(a^{1−λ} t)`, so
//! `h_1 h_2 = ε_1ε_2 · d(a_1a_2) · s(t_2 + u + t_2·u)` with `u = a_2^{1−λ} t_1`.

use crate::error::{check_dim, Error, Result};
use crate::linalg::Matrix;
use crate::scalar::{Scalar, Q};

use super::ShearletGroupSpec;

#[derive(Debug, Clone, PartialEq)]
pub struct GroupElement<S> {
    pub eps: i8,
    /// Scale `a = e^r > 0`.
    pub a: S,
    pub t: Vec<S>,
}

impl GroupElement<f64> {
    /// Log-scale `r = ln a`.
    pub fn r(&self) -> f64 {
        self.a.ln()
    }
}

/// A shearlet group realized over a scalar field.
#[derive(Clone)]
pub struct Group<S> {
    d: usize,
    lambda: Vec<Q>,
    /// Nonzero structure constants `(i, j, k, c_ij^k)`.
    products: Vec<(usize, usize, usize, S)>,
    basis: Vec<Matrix<S>>,
    sign_component: bool,
}

impl<S> std::fmt::Debug for Group<S> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Group").field("d", &self.d).field("lambda", &self.lambda).finish_non_exhaustive()
    }
}

impl<S: Scalar> Group<S> {
    pub(super) fn new(spec: &ShearletGroupSpec) -> Self {
        let n = spec.dim() - 1;
        let mut products = Vec::new();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let c = &spec.structure()[i][j][k];
                    if !Scalar::is_zero(c) {
                        products.push((i, j, k, S::from_q(c)));
                    }
                }
            }
        }
        Self {
            d: spec.dim(),
            lambda: spec.lambda().to_vec(),
            products,
            basis: spec.basis().iter().map(|m| m.map(S::from_q)).collect(),
            sign_component: spec.sign_component(),
        }
    }

    pub fn lambda(&self) -> &[Q] {
        &self.lambda
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn identity(&self) -> GroupElement<S> {
        GroupElement { eps: 1, a: S::one(), t: vec![S::zero(); self.d - 1] }
    }

    /// Validated element `h(ε, a, t)`.
    pub fn element(&self, eps: i8, a: S, t: Vec<S>) -> Result<GroupElement<S>> {
        check_dim(self.d - 1, t.len())?;
        if eps != 1 && eps != -1 {
            return Err(Error::Usage(format!("sign must be +1 or -1, got {eps}")));
        }
        if eps == -1 && !self.sign_component {
            return Err(Error::Usage("this group has no negative component".into()));
        }
        if !(a > S::zero()) {
            return Err(Error::Domain(format!("scale must be positive, got {a:?}")));
        }
        Ok(GroupElement { eps, a, t })
    }

    /// `a^{λ_j}` for `j = 2..d`.
    fn scale_powers(&self, a: &S) -> Result<Vec<S>> {
        self.lambda.iter().map(|l| a.powq(l)).collect()
    }

    /// `a^{1 − λ_j}`.
    pub(crate) fn conj_factors(&self, a: &S) -> Result<Vec<S>> {
        Ok(self.scale_powers(a)?.into_iter().map(|p| a.clone() / p).collect())
    }

    /// Coordinates of the product in the algebra `𝔰`.
    pub fn algebra_mul(&self, u: &[S], v: &[S]) -> Vec<S> {
        let mut out = vec![S::zero(); self.d - 1];
        for (i, j, k, c) in &self.products {
            if !u[*i].is_zero() && !v[*j].is_zero() {
                out[*k] = out[*k].clone() + c.clone() * u[*i].clone() * v[*j].clone();
            }
        }
        out
    }

    /// `t'` with `(I + T)^{-1} = I + T'`, by the finite Neumann series.
    pub fn unipotent_inverse(&self, t: &[S]) -> Vec<S> {
        let neg: Vec<S> = t.iter().map(|x| -x.clone()).collect();
        let mut power = neg.clone();
        let mut sum = neg.clone();
        for _ in 2..self.d {
            power = self.algebra_mul(&power, &neg);
            if power.iter().all(Scalar::is_zero) {
                break;
            }
            sum = sum.iter().zip(&power).map(|(a, b)| a.clone() + b.clone()).collect();
        }
        sum
    }

    pub fn multiply(&self, g: &GroupElement<S>, h: &GroupElement<S>) -> Result<GroupElement<S>> {
        check_dim(self.d - 1, g.t.len())?;
        check_dim(self.d - 1, h.t.len())?;
        Ok(self.multiply_with_factors(g, h, &self.conj_factors(&h.a)?))
    }

    /// [`Self::multiply`] with `h.a^{1−λ_j}` supplied by the caller, which
    /// avoids exact root extraction in hot loops.
    pub(crate) fn multiply_with_factors(&self, g: &GroupElement<S>, h: &GroupElement<S>, f: &[S]) -> GroupElement<S> {
        let u: Vec<S> = g.t.iter().zip(f).map(|(t, f)| t.clone() * f.clone()).collect();
        let prod = self.algebra_mul(&h.t, &u);
        let t = h.t.iter().zip(&u).zip(&prod).map(|((a, b), c)| a.clone() + b.clone() + c.clone()).collect();
        GroupElement { eps: g.eps * h.eps, a: g.a.clone() * h.a.clone(), t }
    }

    pub fn invert(&self, g: &GroupElement<S>) -> Result<GroupElement<S>> {
        Ok(self.invert_with_factors(g, &self.conj_factors(&(S::one() / g.a.clone()))?))
    }

    /// [`Self::invert`] with `(1/g.a)^{1−λ_j}` supplied by the caller.
    pub(crate) fn invert_with_factors(&self, g: &GroupElement<S>, f: &[S]) -> GroupElement<S> {
        let tp = self.unipotent_inverse(&g.t);
        let t = tp.into_iter().zip(f).map(|(t, f)| t * f.clone()).collect();
        GroupElement { eps: g.eps, a: S::one() / g.a.clone(), t }
    }

    /// `g^n` by repeated squaring (negative `n` inverts first).
    pub fn pow(&self, g: &GroupElement<S>, n: i64) -> Result<GroupElement<S>> {
        let mut base = if n < 0 { self.invert(g)? } else { g.clone() };
        let mut e = n.unsigned_abs();
        let mut acc = self.identity();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.multiply(&acc, &base)?;
            }
            base = self.multiply(&base, &base)?;
            e >>= 1;
        }
        Ok(acc)
    }

    /// The matrix `I + Σ t_j X_j`.
    pub fn shear_matrix(&self, t: &[S]) -> Matrix<S> {
        t.iter().zip(&self.basis).fold(Matrix::identity(self.d), |m, (c, x)| m.add(&x.scale(c)))
    }

    pub fn to_matrix(&self, g: &GroupElement<S>) -> Result<Matrix<S>> {
        let pows = self.scale_powers(&g.a)?;
        let sign = S::from_i64(g.eps as i64);
        let mut diag = vec![sign.clone() / g.a.clone()];
        diag.extend(pows.into_iter().map(|p| sign.clone() / p));
        Ok(Matrix::diagonal(&diag).mul(&self.shear_matrix(&self.unipotent_inverse(&g.t))))
    }

    /// Recovers coordinates from the first row and checks the whole matrix.
    pub fn from_matrix(&self, m: &Matrix<S>) -> Result<GroupElement<S>> {
        check_dim(self.d, m.rows())?;
        check_dim(self.d, m.cols())?;
        let m11 = m[(0, 0)].clone();
        if m11.is_zero() {
            return Err(Error::NotInGroup { reason: "(1,1) entry vanishes".into(), residual: f64::INFINITY });
        }
        let eps = m11.signum_i8();
        if eps == -1 && !self.sign_component {
            return Err(Error::NotInGroup { reason: "negative component not in this group".into(), residual: 1.0 });
        }
        let a = S::one() / m11.abs();
        // first row of s(t) = I + T' is ε a · row_1(m)
        let scale = S::from_i64(eps as i64) * a.clone();
        let tp: Vec<S> = m.row(0)[1..].iter().map(|x| x.clone() * scale.clone()).collect();
        let g = GroupElement { eps, a, t: self.unipotent_inverse(&tp) };
        let rebuilt = self.to_matrix(&g)?;
        let residual = rebuilt.sub(m).max_abs();
        let tol = if S::is_exact() { 0.0 } else { 1e-9 * (1.0 + m.max_abs()) };
        if residual > tol {
            return Err(Error::NotInGroup { reason: "matrix differs from the element with the same first row".into(), residual });
        }
        Ok(g)
    }

    /// `p(h) = h^{-T} ξ_0 = ε (a, a^{λ_2} t_2, …, a^{λ_d} t_d)`.
    pub fn orbit_map(&self, g: &GroupElement<S>) -> Result<Vec<S>> {
        let sign = S::from_i64(g.eps as i64);
        let pows = self.scale_powers(&g.a)?;
        let mut x = vec![sign.clone() * g.a.clone()];
        x.extend(pows.into_iter().zip(&g.t).map(|(p, t)| sign.clone() * p * t.clone()));
        Ok(x)
    }

    /// Inverse of [`Self::orbit_map`] on `R^* × R^{d−1}`, with `ε = sign(x_1)`.
    pub fn orbit_map_inverse(&self, x: &[S]) -> Result<GroupElement<S>> {
        check_dim(self.d, x.len())?;
        if x[0].is_zero() {
            return Err(Error::OutsideOrbit("x_1 = 0 lies outside R^* x R^(d-1)".into()));
        }
        let eps = x[0].signum_i8();
        if eps == -1 && !self.sign_component {
            return Err(Error::OutsideOrbit("x_1 < 0 but the group has no negative component".into()));
        }
        let a = x[0].abs();
        let sign = S::from_i64(eps as i64);
        let pows = self.scale_powers(&a)?;
        let t = x[1..].iter().zip(pows).map(|(xi, p)| sign.clone() * xi.clone() / p).collect();
        Ok(GroupElement { eps, a, t })
    }

    /// `|det h| = a^{-(1 + Σ λ_j)}`.
    pub fn abs_det(&self, g: &GroupElement<S>) -> Result<S> {
        let pows = self.scale_powers(&g.a)?;
        Ok(pows.into_iter().fold(S::one() / g.a.clone(), |acc, p| acc / p))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{q, qi};

    fn standard_2d() -> ShearletGroupSpec {
        ShearletGroupSpec::standard(vec![q(1, 2)]).unwrap()
    }

    #[test]
    fn diagonal_one_parameter_subgroup() {
        let g = standard_2d().group::<Q>();
        let x = g.element(1, qi(4), vec![qi(0)]).unwrap();
        let y = g.element(1, q(9, 4), vec![qi(0)]).unwrap();
        assert_eq!(g.multiply(&x, &y).unwrap(), g.element(1, qi(9), vec![qi(0)]).unwrap());
    }

    #[test]
    fn shear_inverse_by_neumann_series() {
        let g = standard_2d().group::<Q>();
        let s = g.element(1, qi(1), vec![qi(5)]).unwrap();
        assert_eq!(g.invert(&s).unwrap().t, vec![qi(-5)]);
        let toe = ShearletGroupSpec::toeplitz(4, q(1, 3)).unwrap().group::<Q>();
        let t = vec![qi(2), qi(-1), q(1, 2)];
        let inv = toe.unipotent_inverse(&t);
        assert_eq!(toe.shear_matrix(&t).mul(&toe.shear_matrix(&inv)), Matrix::identity(4));
    }

    #[test]
    fn matrices_are_homomorphic() {
        let toe = ShearletGroupSpec::toeplitz(4, q(1, 4)).unwrap().group::<Q>();
        let a = toe.element(-1, qi(16), vec![qi(1), q(-2, 3), qi(3)]).unwrap();
        let b = toe.element(1, q(1, 81), vec![q(1, 2), qi(5), qi(-1)]).unwrap();
        let ab = toe.multiply(&a, &b).unwrap();
        assert_eq!(toe.to_matrix(&ab).unwrap(), toe.to_matrix(&a).unwrap().mul(&toe.to_matrix(&b).unwrap()));
        assert_eq!(toe.from_matrix(&toe.to_matrix(&ab).unwrap()).unwrap(), ab);
        let ai = toe.invert(&a).unwrap();
        assert_eq!(toe.multiply(&a, &ai).unwrap(), toe.identity());
    }

    #[test]
    fn non_members_are_refused() {
        let g = standard_2d().group::<Q>();
        let m = Matrix::from_rows(vec![vec![qi(1), qi(0)], vec![qi(1), qi(1)]]);
        assert!(matches!(g.from_matrix(&m), Err(Error::NotInGroup { .. })));
    }

    #[test]
    fn orbit_map_examples() {
        let g = standard_2d().group::<Q>();
        assert_eq!(g.orbit_map(&g.identity()).unwrap(), vec![qi(1), qi(0)]);
        let h = g.element(1, qi(4), vec![qi(3)]).unwrap();
        assert_eq!(g.orbit_map(&h).unwrap(), vec![qi(4), qi(6)]);
        assert_eq!(g.orbit_map_inverse(&[qi(4), qi(6)]).unwrap(), h);
        assert!(matches!(g.orbit_map_inverse(&[qi(0), qi(1)]), Err(Error::OutsideOrbit(_))));
        let neg = g.orbit_map_inverse(&[qi(-4), qi(6)]).unwrap();
        assert_eq!(g.orbit_map(&neg).unwrap(), vec![qi(-4), qi(6)]);
        // irrational scale powers are reported, not rounded
        assert!(matches!(g.orbit_map_inverse(&[qi(2), qi(1)]), Err(Error::Inexact(_))));
    }

    #[test]
    fn float_squares_follow_the_closed_form() {
        let g = standard_2d().group::<f64>();
        let h = g.element(1, 1f64.exp(), vec![1.0]).unwrap();
        let h2 = g.pow(&h, 2).unwrap();
        let lam: f64 = 0.5;
        let expected = ((2.0 * (1.0 - lam)).exp() - 1.0) / ((1.0 - lam).exp() - 1.0);
        assert!((h2.r() - 2.0).abs() < 1e-12);
        assert!((h2.t[0] - expected).abs() < 1e-12);
        let m = g.to_matrix(&h).unwrap();
        assert!((g.to_matrix(&h2).unwrap().sub(&m.mul(&m))).max_abs() < 1e-12);
    }

    #[test]
    fn pullback_membership_example() {
        use crate::geometry::{BaseSet, CoveringSet};
        let g = standard_2d().group::<f64>();
        let h = g.element(1, 2.0, vec![0.0]).unwrap();
        let q = BaseSet::axis_box(vec![1.0, 0.0], vec![0.25, 0.25]).unwrap();
        let set = CoveringSet::pullback(g.to_matrix(&h).unwrap(), q).unwrap();
        assert!(set.contains(&[2.0, 0.0]).unwrap());
    }
}
