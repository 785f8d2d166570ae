//! Generalized shearlet dilation groups.
//!
//! A group is `H = {±exp(−rY)(I + Σ t_j X_j)^{-1}}` with
//! `Y = diag(1, λ_2, …, λ_d)` and `X_2, …, X_d` the canonical basis of a
//! commutative nilpotent matrix algebra `𝔰` (the first row of `X_j` is `e_j`).
//! The spec stores `λ`, the structure constants `X_iX_j = Σ_k c_ij^k X_k` and
//! the basis matrices, all as exact rationals.

mod element;
mod lattice;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{solve_in_span, Matrix};
use crate::scalar::{format_q, qi, Scalar, Q};

pub use element::{Group, GroupElement};
pub use lattice::{default_base_box, induced_covering, orbit_map_probe, InducedCoveringFamily, LatticeParams, WordBox, WordMetricLattice};

/// How a spec was constructed; informational only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpecKind {
    Standard,
    Toeplitz { delta: String },
    D4Family { alpha: i8 },
    Custom,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShearletGroupSpec {
    label: String,
    kind: SpecKind,
    d: usize,
    lambda: Vec<Q>,
    /// `structure[i][j][k]`, indices relative to `X_2`.
    structure: Vec<Vec<Vec<Q>>>,
    basis: Vec<Matrix<Q>>,
    sign_component: bool,
}

fn zero_structure(n: usize) -> Vec<Vec<Vec<Q>>> {
    vec![vec![vec![<Q as Scalar>::zero(); n]; n]; n]
}

impl ShearletGroupSpec {
    /// Standard shearlet group: shears in the first row only, `X_iX_j = 0`.
    pub fn standard(lambda: Vec<Q>) -> Result<Self> {
        let d = lambda.len() + 1;
        if d < 2 {
            return Err(Error::Construction("shearlet groups need d >= 2".into()));
        }
        let basis = (1..d).map(|j| Matrix::unit(d, 0, j)).collect();
        Self::from_basis("standard", SpecKind::Standard, lambda, basis, true)
    }

    /// Toeplitz shearlet group with `λ_j = 1 − (j−1)δ` and `X_{k+1} = N^k`
    /// for the unit superdiagonal `N`.
    pub fn toeplitz(d: usize, delta: Q) -> Result<Self> {
        if d < 2 {
            return Err(Error::Construction("shearlet groups need d >= 2".into()));
        }
        let lambda = (1..d).map(|k| qi(1) - qi(k as i64) * delta.clone()).collect();
        let n: Matrix<Q> = (0..d - 1).fold(Matrix::zeros(d, d), |m, i| m.add(&Matrix::unit(d, i, i + 1)));
        let mut basis = vec![n.clone()];
        for _ in 2..d {
            let next = basis.last().unwrap().mul(&n);
            basis.push(next);
        }
        Self::from_basis("toeplitz", SpecKind::Toeplitz { delta: format_q(&delta) }, lambda, basis, true)
    }

    /// The four-dimensional family `X_2 = E_12 + E_24`, `X_3 = E_13 + α E_34`,
    /// `X_4 = E_14`, for `α ∈ {−1, 0, 1}`.
    pub fn d4_family(alpha: i8, lambda: Vec<Q>) -> Result<Self> {
        if !(-1..=1).contains(&alpha) {
            return Err(Error::Construction(format!("alpha must be -1, 0 or 1, got {alpha}")));
        }
        if lambda.len() != 3 {
            return Err(Error::DimensionMismatch { expected: 3, got: lambda.len() });
        }
        let e = |i, j| Matrix::<Q>::unit(4, i, j);
        let basis = vec![e(0, 1).add(&e(1, 3)), e(0, 2).add(&e(2, 3).scale(&qi(alpha as i64))), e(0, 3)];
        Self::from_basis(&format!("d4_family(alpha={alpha})"), SpecKind::D4Family { alpha }, lambda, basis, true)
    }

    /// Builds the canonical basis from structure constants, as the transposed
    /// regular representation on `span{I} ⊕ 𝔰`: `(X_i)_{1,i} = 1`,
    /// `(X_i)_{j,k} = c_ij^k`.
    pub fn from_structure(label: &str, lambda: Vec<Q>, structure: Vec<Vec<Vec<Q>>>, sign_component: bool) -> Result<Self> {
        let n = lambda.len();
        let d = n + 1;
        if d < 2 {
            return Err(Error::Construction("shearlet groups need d >= 2".into()));
        }
        if structure.len() != n || structure.iter().any(|r| r.len() != n || r.iter().any(|c| c.len() != n)) {
            return Err(Error::Construction(format!("structure constants must be a {n}x{n}x{n} array")));
        }
        let basis = (0..n)
            .map(|i| {
                let mut m = Matrix::zeros(d, d);
                m[(0, i + 1)] = qi(1);
                for j in 0..n {
                    for k in 0..n {
                        m[(j + 1, k + 1)] = structure[i][j][k].clone();
                    }
                }
                m
            })
            .collect();
        let mut spec = Self::from_basis(label, SpecKind::Custom, lambda, basis, sign_component)?;
        if spec.structure != structure {
            return Err(Error::Construction("structure constants do not define an associative algebra".into()));
        }
        spec.kind = SpecKind::Custom;
        Ok(spec)
    }

    /// Accepts any basis of `𝔰` whose first rows span `{0} × R^{d−1}`; it is
    /// rewritten in canonical form and all invariants are checked.
    pub fn from_basis(label: &str, kind: SpecKind, lambda: Vec<Q>, basis: Vec<Matrix<Q>>, sign_component: bool) -> Result<Self> {
        let n = lambda.len();
        let d = n + 1;
        if basis.len() != n {
            return Err(Error::Construction(format!("expected {n} basis matrices, got {}", basis.len())));
        }
        if basis.iter().any(|m| m.rows() != d || m.cols() != d) {
            return Err(Error::Construction(format!("basis matrices must be {d}x{d}")));
        }
        // V[j] = first row of basis[j], restricted to coordinates 2..d
        let v = Matrix::from_rows(
            basis
                .iter()
                .map(|m| {
                    if !Scalar::is_zero(&m[(0, 0)]) {
                        return Err(Error::Construction("basis matrix has a nonzero (1,1) entry".into()));
                    }
                    Ok(m.row(0)[1..].to_vec())
                })
                .collect::<Result<_>>()?,
        );
        let w = v.inverse().map_err(|_| Error::Construction("first rows of the basis are linearly dependent".into()))?;
        let canonical: Vec<Matrix<Q>> = (0..n)
            .map(|k| (0..n).fold(Matrix::zeros(d, d), |acc, j| acc.add(&basis[j].scale(&w[(k, j)]))))
            .collect();
        let flat: Vec<Vec<Q>> = canonical.iter().map(flatten).collect();
        let mut structure = zero_structure(n);
        for i in 0..n {
            for j in 0..n {
                let prod = canonical[i].mul(&canonical[j]);
                let coeffs = solve_in_span(&flat, &flatten(&prod)).ok_or_else(|| {
                    Error::Construction(format!("span of the basis is not closed under products (X_{} X_{})", i + 2, j + 2))
                })?;
                structure[i][j] = coeffs;
            }
        }
        let spec = Self { label: label.to_string(), kind, d, lambda, structure, basis: canonical, sign_component };
        spec.validate()?;
        Ok(spec)
    }

    /// `C^{-1} S C`, with the same `λ`.
    pub fn conjugate(&self, c: &Matrix<Q>, label: &str) -> Result<Self> {
        let ci = c.inverse().map_err(|_| Error::Construction("conjugator is singular".into()))?;
        let basis = self.basis.iter().map(|x| ci.mul(x).mul(c)).collect();
        Self::from_basis(label, SpecKind::Custom, self.lambda.clone(), basis, self.sign_component)
    }

    /// Checks the canonical-basis, commutativity, graded-nilpotency and
    /// compatibility invariants.
    pub fn validate(&self) -> Result<()> {
        let (d, n) = (self.d, self.d - 1);
        let y = self.y_matrix();
        for (j, x) in self.basis.iter().enumerate() {
            let first = x.row(0);
            if (0..d).any(|k| first[k] != if k == j + 1 { qi(1) } else { qi(0) }) {
                return Err(Error::Construction(format!("X_{} is not canonical: first row {:?}", j + 2, first)));
            }
            let expected = x.scale(&(qi(1) - self.lambda[j].clone()));
            if y.commutator(x) != expected {
                return Err(Error::Construction(format!(
                    "lambda is not compatible: [Y, X_{0}] != (1 - lambda_{0}) X_{0}",
                    j + 2
                )));
            }
        }
        for i in 0..n {
            for j in 0..n {
                if self.structure[i][j] != self.structure[j][i] {
                    return Err(Error::Construction(format!("algebra is not commutative at (X_{}, X_{})", i + 2, j + 2)));
                }
                // filtration: X_i X_j lies in span{X_k : k > max(i, j)}
                for k in 0..n {
                    if k <= i.max(j) && !Scalar::is_zero(&self.structure[i][j][k]) {
                        return Err(Error::Construction(format!(
                            "graded nilpotency fails: X_{} X_{} has an X_{} component",
                            i + 2,
                            j + 2,
                            k + 2
                        )));
                    }
                }
                let prod = self.basis[i].mul(&self.basis[j]);
                let combo = (0..n).fold(Matrix::zeros(d, d), |acc, k| acc.add(&self.basis[k].scale(&self.structure[i][j][k])));
                if prod != combo {
                    return Err(Error::Construction(format!("structure constants do not match X_{} X_{}", i + 2, j + 2)));
                }
            }
        }
        Ok(())
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn kind(&self) -> &SpecKind {
        &self.kind
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    /// `(λ_2, …, λ_d)`.
    pub fn lambda(&self) -> &[Q] {
        &self.lambda
    }

    pub fn structure(&self) -> &[Vec<Vec<Q>>] {
        &self.structure
    }

    pub fn basis(&self) -> &[Matrix<Q>] {
        &self.basis
    }

    pub fn sign_component(&self) -> bool {
        self.sign_component
    }

    /// `Y = diag(1, λ_2, …, λ_d)`.
    pub fn y_matrix(&self) -> Matrix<Q> {
        let mut diag = vec![qi(1)];
        diag.extend(self.lambda.iter().cloned());
        Matrix::diagonal(&diag)
    }

    /// The same group restricted to the identity component `D S`.
    pub fn without_sign_component(mut self) -> Self {
        self.sign_component = false;
        self
    }

    pub fn with_label(mut self, label: &str) -> Self {
        self.label = label.to_string();
        self
    }

    /// Realizes the group over the scalar field `S`.
    pub fn group<S: Scalar>(&self) -> Group<S> {
        Group::new(self)
    }
}

fn flatten(m: &Matrix<Q>) -> Vec<Q> {
    m.to_rows().into_iter().flatten().collect()
}
