//! Deciding coorbit equivalence of shearlet dilation groups.
//!
//! Two shearlet groups `H = D S ∪ −D S` and `H′` are coorbit equivalent iff
//! their scaling subgroups agree and some `C` conjugates `S` onto `S′` while
//! commuting with the scaling action. The pipeline checks, in order: dual
//! orbits, diagonal exponents (a mismatch comes with a witness sequence),
//! algebra invariants, and a conjugator search with exact verification.

mod conjugator;
mod invariants;
mod witness;

use serde::{Deserialize, Serialize};

use crate::coarse::ProbeOptions;
use crate::error::Result;
use crate::linalg::Matrix;
use crate::scalar::{format_q, qi, Q};
use crate::shearlet::ShearletGroupSpec;

pub use conjugator::{commuting_check, find_conjugator, verify_conjugator, CommutingReport, ConjugatorOutcome, SearchBudget};
pub use invariants::{algebra_invariants, graded_invariants, AlgebraInvariants, QuadraticSignature, WeightDims};
pub use witness::{nonequivalence_witness, NonequivalenceWitness, TransferMap, WitnessRow};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OrbitKind {
    /// `ℝ^d \ {0}`.
    PuncturedSpace,
    /// `ℝ^* × ℝ^{d−1}`.
    Product,
    /// `(ℝ^*)^d`.
    OrthantUnion,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitDescriptor {
    pub kind: OrbitKind,
    pub dim: usize,
}

/// Every shearlet group has the dual orbit `ℝ^* × ℝ^{d−1}`.
pub fn dual_orbit(spec: &ShearletGroupSpec) -> OrbitDescriptor {
    OrbitDescriptor { kind: OrbitKind::Product, dim: spec.dim() }
}

pub fn orbits_equal(a: &OrbitDescriptor, b: &OrbitDescriptor) -> bool {
    a == b
}

/// The two-dimensional dilation groups with an open dual orbit.
#[derive(Debug, Clone)]
pub enum Builtin2d {
    /// Invertible diagonal matrices.
    Diagonal,
    /// Positive multiples of rotations.
    Similitude,
    Shearlet(ShearletGroupSpec),
}

impl Builtin2d {
    pub fn orbit(&self) -> OrbitDescriptor {
        match self {
            Self::Diagonal => OrbitDescriptor { kind: OrbitKind::OrthantUnion, dim: 2 },
            Self::Similitude => OrbitDescriptor { kind: OrbitKind::PuncturedSpace, dim: 2 },
            Self::Shearlet(s) => dual_orbit(s),
        }
    }

    pub fn label(&self) -> String {
        match self {
            Self::Diagonal => "diagonal".into(),
            Self::Similitude => "similitude".into(),
            Self::Shearlet(s) => s.label().to_string(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING-KEBAB-CASE")]
pub enum Equivalence {
    Equivalent,
    NotEquivalent,
    Indeterminate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReasonCode {
    OrbitMismatch,
    DiagonalMismatch,
    AlgebraInvariantMismatch,
    ConjugatorFound,
    CommutingCheckFailed,
    SearchExhausted,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagonalMismatch {
    pub coordinate: usize,
    pub lambda_a: Vec<String>,
    pub lambda_b: Vec<String>,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Evidence {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub orbits: Option<[OrbitDescriptor; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diagonal: Option<DiagonalMismatch>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<NonequivalenceWitness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub invariants: Option<[AlgebraInvariants; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub graded_invariants: Option<[Vec<WeightDims>; 2]>,
    /// Exact rational entries as `"p/q"` strings.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub conjugator: Option<Vec<Vec<String>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub commuting: Option<CommutingReport>,
    /// Whether `φ(s_1 s_2) = φ(s_1) φ(s_2)` held on sampled shears.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub transfer_homomorphism: Option<bool>,
    #[serde(skip)]
    pub conjugator_matrix: Option<Matrix<Q>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct EquivalenceVerdict {
    pub result: Equivalence,
    pub reason: ReasonCode,
    pub groups: [String; 2],
    pub evidence: Evidence,
    pub search: SearchBudget,
    pub seeds_used: usize,
}

#[derive(Debug, Clone, Default)]
pub struct EquivalenceOptions {
    pub budget: SearchBudget,
    /// Always verified before any search.
    pub candidates: Vec<Matrix<Q>>,
    /// Length of the witness sequence on a diagonal mismatch (`≤ 60`).
    pub witness_cap: Option<usize>,
}

pub fn matrix_strings(m: &Matrix<Q>) -> Vec<Vec<String>> {
    m.to_rows().iter().map(|r| r.iter().map(format_q).collect()).collect()
}

fn lambda_strings(s: &ShearletGroupSpec) -> Vec<String> {
    s.lambda().iter().map(format_q).collect()
}

/// Samples `φ(s_1 s_2) = φ(s_1) φ(s_2)` on integer shears.
pub fn transfer_is_homomorphic(a: &ShearletGroupSpec, b: &ShearletGroupSpec) -> Result<bool> {
    let phi = TransferMap::<Q>::new(a, b)?;
    let (g, h) = (phi.source(), phi.target());
    let n = a.dim() - 1;
    for s in 0..16i64 {
        let t1: Vec<Q> = (0..n).map(|j| qi((s * 7 + j as i64 * 3) % 5 - 2)).collect();
        let t2: Vec<Q> = (0..n).map(|j| qi((s * 5 + j as i64 * 2) % 7 - 3)).collect();
        let (x, y) = (g.element(1, qi(1), t1)?, g.element(1, qi(1), t2)?);
        if phi.apply(&g.multiply(&x, &y)?)? != h.multiply(&phi.apply(&x)?, &phi.apply(&y)?)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The full decision pipeline.
pub fn coorbit_equivalent(a: &ShearletGroupSpec, b: &ShearletGroupSpec, opts: &EquivalenceOptions) -> Result<EquivalenceVerdict> {
    let mut ev = Evidence::default();
    let verdict = |result, reason, evidence, seeds_used| EquivalenceVerdict {
        result,
        reason,
        groups: [a.label().to_string(), b.label().to_string()],
        evidence,
        search: opts.budget.clone(),
        seeds_used,
    };
    let (oa, ob) = (dual_orbit(a), dual_orbit(b));
    if !orbits_equal(&oa, &ob) {
        ev.orbits = Some([oa, ob]);
        return Ok(verdict(Equivalence::NotEquivalent, ReasonCode::OrbitMismatch, ev, 0));
    }
    if let Some(i) = (0..a.dim() - 1).find(|&i| a.lambda()[i] != b.lambda()[i]) {
        ev.diagonal = Some(DiagonalMismatch { coordinate: i + 2, lambda_a: lambda_strings(a), lambda_b: lambda_strings(b) });
        ev.witness = Some(nonequivalence_witness(a, b, Some(i + 2), opts.witness_cap.unwrap_or(30))?);
        return Ok(verdict(Equivalence::NotEquivalent, ReasonCode::DiagonalMismatch, ev, 0));
    }
    let (ia, ib) = (algebra_invariants(a), algebra_invariants(b));
    let (ga, gb) = (graded_invariants(a), graded_invariants(b));
    if ia != ib || ga != gb {
        ev.invariants = Some([ia, ib]);
        ev.graded_invariants = Some([ga, gb]);
        return Ok(verdict(Equivalence::NotEquivalent, ReasonCode::AlgebraInvariantMismatch, ev, 0));
    }
    // search both directions, so the verdict does not depend on argument order
    let mut seeds_used = 0;
    let mut found = None;
    match find_conjugator(a, b, &opts.candidates, true, &opts.budget)? {
        ConjugatorOutcome::Found { c, seed } => {
            seeds_used += seed.map_or(0, |s| s.wrapping_sub(opts.budget.seed) as usize + 1);
            found = Some(c);
        }
        ConjugatorOutcome::Indeterminate { seeds_tried } => seeds_used += seeds_tried,
        ConjugatorOutcome::NotFound { .. } => {}
    }
    if found.is_none() {
        let inverses: Vec<Matrix<Q>> = opts.candidates.iter().filter_map(|c| c.inverse().ok()).collect();
        match find_conjugator(b, a, &inverses, true, &opts.budget)? {
            ConjugatorOutcome::Found { c, seed } => {
                seeds_used += seed.map_or(0, |s| s.wrapping_sub(opts.budget.seed) as usize + 1);
                found = Some(c.inverse()?);
            }
            ConjugatorOutcome::Indeterminate { seeds_tried } => seeds_used += seeds_tried,
            ConjugatorOutcome::NotFound { .. } => {}
        }
    }
    let Some(c) = found else {
        // an ungraded conjugator may still exist; report which check failed
        let reason = match find_conjugator(a, b, &opts.candidates, false, &opts.budget)? {
            ConjugatorOutcome::Found { c, .. } => {
                ev.commuting = Some(commuting_check(&c, a, b, opts.budget.seed)?);
                ev.conjugator = Some(matrix_strings(&c));
                ev.conjugator_matrix = Some(c);
                ReasonCode::CommutingCheckFailed
            }
            _ => ReasonCode::SearchExhausted,
        };
        return Ok(verdict(Equivalence::Indeterminate, reason, ev, seeds_used));
    };
    let commuting = commuting_check(&c, a, b, opts.budget.seed)?;
    debug_assert!(commuting.passed());
    ev.commuting = Some(commuting);
    ev.conjugator = Some(matrix_strings(&c));
    ev.conjugator_matrix = Some(c);
    ev.transfer_homomorphism = Some(transfer_is_homomorphic(a, b)?);
    Ok(verdict(Equivalence::Equivalent, ReasonCode::ConjugatorFound, ev, seeds_used))
}

/// Conjugator for `A ≅ C` from `A ≅ B` and `B ≅ C`.
pub fn compose_conjugators(ab: &Matrix<Q>, bc: &Matrix<Q>) -> Matrix<Q> {
    ab.mul(bc)
}

/// Orbit comparison for the built-in planar groups; two shearlet groups go
/// through [`coorbit_equivalent`].
pub fn general_group_orbit_gate(a: &Builtin2d, b: &Builtin2d, opts: &EquivalenceOptions) -> Result<EquivalenceVerdict> {
    if let (Builtin2d::Shearlet(x), Builtin2d::Shearlet(y)) = (a, b) {
        return coorbit_equivalent(x, y, opts);
    }
    let (oa, ob) = (a.orbit(), b.orbit());
    let mut evidence = Evidence { orbits: Some([oa, ob]), ..Evidence::default() };
    let (result, reason) = if orbits_equal(&oa, &ob) {
        // the same non-shearlet group on both sides
        evidence.conjugator = Some(matrix_strings(&Matrix::identity(2)));
        evidence.conjugator_matrix = Some(Matrix::identity(2));
        (Equivalence::Equivalent, ReasonCode::ConjugatorFound)
    } else {
        (Equivalence::NotEquivalent, ReasonCode::OrbitMismatch)
    };
    Ok(EquivalenceVerdict { result, reason, groups: [a.label(), b.label()], evidence, search: opts.budget.clone(), seeds_used: 0 })
}

/// Runs the witness through the prober at caps 15, 30 and 60 (or the given caps).
pub fn witness_probe(w: &NonequivalenceWitness, caps: &[usize], opts: &ProbeOptions) -> Result<crate::coarse::QIReport> {
    w.probe(caps, opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coarse::QIVerdict;
    use crate::scalar::q;

    fn six_three() -> (ShearletGroupSpec, ShearletGroupSpec) {
        let s1 = ShearletGroupSpec::toeplitz(4, qi(0)).unwrap();
        let mut c = Matrix::identity(4);
        c[(1, 2)] = qi(1);
        let s2 = s1.conjugate(&c, "s2").unwrap();
        (s1, s2)
    }

    #[test]
    fn shearlet_pairs_of_different_c() {
        let a = ShearletGroupSpec::standard(vec![q(1, 2)]).unwrap();
        let b = ShearletGroupSpec::standard(vec![q(1, 3)]).unwrap();
        let v = coorbit_equivalent(&a, &b, &EquivalenceOptions::default()).unwrap();
        assert_eq!((v.result, v.reason), (Equivalence::NotEquivalent, ReasonCode::DiagonalMismatch));
        assert_eq!(v.evidence.diagonal.as_ref().unwrap().coordinate, 2);
        let same = coorbit_equivalent(&a, &a, &EquivalenceOptions::default()).unwrap();
        assert_eq!(same.result, Equivalence::Equivalent);
        assert_eq!(same.evidence.conjugator_matrix, Some(Matrix::identity(2)));
    }

    #[test]
    fn standard_vs_toeplitz_is_not_shortcut_by_isomorphism() {
        for d in [3, 4] {
            let s = ShearletGroupSpec::standard(vec![qi(1); d - 1]).unwrap();
            let t = ShearletGroupSpec::toeplitz(d, qi(0)).unwrap();
            for (x, y) in [(&s, &t), (&t, &s)] {
                let v = coorbit_equivalent(x, y, &EquivalenceOptions::default()).unwrap();
                assert_eq!((v.result, v.reason), (Equivalence::NotEquivalent, ReasonCode::AlgebraInvariantMismatch));
            }
        }
    }

    #[test]
    fn displayed_pair_is_equivalent_both_ways() {
        let (s1, s2) = six_three();
        for (x, y) in [(&s1, &s2), (&s2, &s1)] {
            let v = coorbit_equivalent(x, y, &EquivalenceOptions::default()).unwrap();
            assert_eq!(v.result, Equivalence::Equivalent, "{v:?}");
            let c = v.evidence.conjugator_matrix.unwrap();
            assert!(verify_conjugator(&c, x, y).unwrap());
            assert!(commuting_check(&c, x, y, 9).unwrap().passed());
        }
    }

    #[test]
    fn conjugators_compose() {
        let (s1, s2) = six_three();
        let mut c = Matrix::identity(4);
        c[(1, 3)] = q(1, 2);
        let s3 = s2.conjugate(&c, "s3").unwrap();
        let opts = EquivalenceOptions::default();
        let ab = coorbit_equivalent(&s1, &s2, &opts).unwrap().evidence.conjugator_matrix.unwrap();
        let bc = coorbit_equivalent(&s2, &s3, &opts).unwrap().evidence.conjugator_matrix.unwrap();
        assert!(verify_conjugator(&compose_conjugators(&ab, &bc), &s1, &s3).unwrap());
        assert_eq!(coorbit_equivalent(&s1, &s3, &opts).unwrap().result, Equivalence::Equivalent);
    }

    #[test]
    fn builtin_orbit_gate() {
        let opts = EquivalenceOptions::default();
        let sc = Builtin2d::Shearlet(ShearletGroupSpec::standard(vec![q(1, 2)]).unwrap());
        let gate = |a: &Builtin2d, b: &Builtin2d| general_group_orbit_gate(a, b, &opts).unwrap();
        let v = gate(&Builtin2d::Diagonal, &Builtin2d::Similitude);
        assert_eq!((v.result, v.reason), (Equivalence::NotEquivalent, ReasonCode::OrbitMismatch));
        assert_eq!(gate(&Builtin2d::Similitude, &sc).result, Equivalence::NotEquivalent);
        assert_eq!(gate(&sc, &sc).result, Equivalence::Equivalent);
        assert!(!orbits_equal(&Builtin2d::Diagonal.orbit(), &Builtin2d::Similitude.orbit()));
    }

    #[test]
    fn witness_is_rejected_by_the_prober() {
        let a = ShearletGroupSpec::standard(vec![q(1, 2)]).unwrap();
        let b = ShearletGroupSpec::standard(vec![qi(1)]).unwrap();
        let w = nonequivalence_witness(&a, &b, None, 60).unwrap();
        assert_eq!((w.swapped, w.direction), (false, -1));
        assert!(w.rows.windows(2).all(|r| r[1].increment_log10 > r[0].increment_log10));
        assert!(w.rows.last().unwrap().increment_log10 > 6.0);
        let rep = witness_probe(&w, &[15, 30, 60], &ProbeOptions::default()).unwrap();
        assert_eq!(rep.verdict, QIVerdict::Reject, "{}", rep.reason);
    }
}
