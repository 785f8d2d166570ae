//! JSON spec files for groups and coverings.
//!
//! Rationals are written as `"p/q"` strings; plain JSON numbers are read
//! exactly as their decimal text. Malformed files are reported with the
//! origin and the offending field (serde supplies line and column).

use serde::de::{self, Deserializer};
use serde::{Deserialize, Serialize, Serializer};

use crate::covering::{AlphaModulation, CoveringFamily, Domain, DyadicCovering, ExplicitCovering, UniformCovering};
use crate::error::{Error, Result};
use crate::geometry::{BaseSet, CoveringSet};
use crate::linalg::Matrix;
use crate::scalar::{format_q, parse_q, Scalar, Q};
use crate::shearlet::{InducedCoveringFamily, ShearletGroupSpec, SpecKind};

/// An exact rational read from `"p/q"`, an integer, or a decimal.
#[derive(Debug, Clone, PartialEq)]
pub struct Rational(pub Q);

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_q(&self.0))
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let text = match serde_json::Value::deserialize(d)? {
            serde_json::Value::String(s) => s,
            serde_json::Value::Number(n) => n.to_string(),
            other => return Err(de::Error::custom(format!("expected a rational, got {other}"))),
        };
        parse_q(&text).map(Rational).map_err(de::Error::custom)
    }
}

fn rationals(v: &[Rational]) -> Vec<Q> {
    v.iter().map(|r| r.0.clone()).collect()
}

fn to_rationals(v: &[Q]) -> Vec<Rational> {
    v.iter().cloned().map(Rational).collect()
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GroupKind {
    Standard,
    Toeplitz,
    D4Family,
    Custom,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub d: usize,
    pub kind: GroupKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<Vec<Rational>>,
    /// Toeplitz only; `λ_k = 1 − (k−1)δ`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<Rational>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<i8>,
    /// `structure_constants[i][j][k] = c_ij^k`, indices relative to `X_2`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub structure_constants: Option<Vec<Vec<Vec<Rational>>>>,
    /// Custom only: any basis of `𝔰` as `d × d` matrices.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis: Option<Vec<Vec<Vec<Rational>>>>,
    #[serde(default = "yes")]
    pub sign_component: bool,
}

fn field(name: &str, msg: impl std::fmt::Display) -> Error {
    Error::Parse(format!("field `{name}`: {msg}"))
}

impl GroupFile {
    fn lambda(&self, n: usize) -> Result<Vec<Q>> {
        let l = self.lambda.as_ref().ok_or_else(|| field("lambda", "missing"))?;
        if l.len() != n {
            return Err(field("lambda", format!("expected {n} entries (lambda_2..lambda_d), got {}", l.len())));
        }
        Ok(rationals(l))
    }

    pub fn to_spec(&self) -> Result<ShearletGroupSpec> {
        if self.d < 2 {
            return Err(field("d", format!("must be at least 2, got {}", self.d)));
        }
        let n = self.d - 1;
        let spec = match self.kind {
            GroupKind::Standard => ShearletGroupSpec::standard(self.lambda(n)?)?,
            GroupKind::Toeplitz => {
                let delta = match (&self.delta, &self.lambda) {
                    (Some(d), _) => d.0.clone(),
                    (None, Some(l)) if !l.is_empty() => <Q as Scalar>::one() - l[0].0.clone(),
                    _ => return Err(field("delta", "toeplitz groups need delta or lambda")),
                };
                let spec = ShearletGroupSpec::toeplitz(self.d, delta)?;
                if self.lambda.is_some() && self.lambda(n)? != spec.lambda() {
                    return Err(field("lambda", "not of the form 1 - k delta"));
                }
                spec
            }
            GroupKind::D4Family => {
                if self.d != 4 {
                    return Err(field("d", "d4_family requires d = 4"));
                }
                let alpha = self.alpha.ok_or_else(|| field("alpha", "missing"))?;
                ShearletGroupSpec::d4_family(alpha, self.lambda(n)?)?
            }
            GroupKind::Custom => {
                let lambda = self.lambda(n)?;
                match (&self.structure_constants, &self.basis) {
                    (Some(c), _) => {
                        let c = c.iter().map(|r| r.iter().map(|v| rationals(v)).collect()).collect();
                        ShearletGroupSpec::from_structure("custom", lambda, c, self.sign_component)?
                    }
                    (None, Some(b)) => {
                        let basis = b
                            .iter()
                            .map(|m| Matrix::from_rows(m.iter().map(|r| rationals(r)).collect()))
                            .collect();
                        ShearletGroupSpec::from_basis("custom", SpecKind::Custom, lambda, basis, self.sign_component)?
                    }
                    (None, None) => return Err(field("structure_constants", "custom groups need structure_constants or basis")),
                }
            }
        };
        if self.kind != GroupKind::Custom {
            if let Some(c) = &self.structure_constants {
                let c: Vec<Vec<Vec<Q>>> = c.iter().map(|r| r.iter().map(|v| rationals(v)).collect()).collect();
                if c != spec.structure() {
                    return Err(field("structure_constants", "do not match the named kind"));
                }
            }
        }
        let label = self.label.clone().unwrap_or_else(|| spec.label().to_string());
        let mut spec = spec.with_label(&label);
        if !self.sign_component {
            spec = spec.without_sign_component();
        }
        Ok(spec)
    }

    pub fn from_spec(spec: &ShearletGroupSpec) -> Self {
        let (kind, delta, alpha) = match spec.kind() {
            SpecKind::Standard => (GroupKind::Standard, None, None),
            SpecKind::Toeplitz { delta } => (GroupKind::Toeplitz, parse_q(delta).ok().map(Rational), None),
            SpecKind::D4Family { alpha } => (GroupKind::D4Family, None, Some(*alpha)),
            SpecKind::Custom => (GroupKind::Custom, None, None),
        };
        Self {
            label: Some(spec.label().to_string()),
            d: spec.dim(),
            kind,
            lambda: Some(to_rationals(spec.lambda())),
            delta,
            alpha,
            structure_constants: Some(spec.structure().iter().map(|r| r.iter().map(|v| to_rationals(v)).collect()).collect()),
            basis: None,
            sign_component: spec.sign_component(),
        }
    }
}

pub fn parse_group(text: &str, origin: &str) -> Result<ShearletGroupSpec> {
    let file: GroupFile = serde_json::from_str(text).map_err(|e| Error::Parse(format!("{origin}: {e}")))?;
    file.to_spec().map_err(|e| Error::Parse(format!("{origin}: {e}")))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoveringKind {
    Uniform,
    Dyadic,
    AlphaModulation,
    Explicit,
    Induced,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindowSpec {
    pub radius: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoveringFile {
    pub label: String,
    pub dimension: usize,
    pub kind: CoveringKind,
    #[serde(default)]
    pub parameters: serde_json::Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<WindowSpec>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct UniformParams {
    step: f64,
    #[serde(default)]
    domain: Domain,
}

fn positive() -> Domain {
    Domain::Positive
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DyadicParams {
    #[serde(default = "positive")]
    domain: Domain,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct AlphaParams {
    alpha: Rational,
    #[serde(default)]
    r: Option<f64>,
}

#[derive(Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case", deny_unknown_fields)]
enum BaseSpec {
    Box { lo: Vec<f64>, hi: Vec<f64> },
    Ball { center: Vec<f64>, radius: f64 },
}

impl BaseSpec {
    fn build(&self) -> Result<BaseSet> {
        match self {
            Self::Box { lo, hi } => BaseSet::from_bounds(lo, hi),
            Self::Ball { center, radius } => BaseSet::ball(center.clone(), *radius),
        }
    }
}

#[derive(Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case", deny_unknown_fields)]
enum SetSpec {
    Box { lo: Vec<f64>, hi: Vec<f64> },
    Ball { center: Vec<f64>, radius: f64 },
    /// `T Q + b`.
    Affine { matrix: Vec<Vec<Rational>>, offset: Vec<Rational>, base: BaseSpec },
    /// `g^{-T} Q`.
    Pullback { matrix: Vec<Vec<Rational>>, base: BaseSpec },
}

fn exact_matrix(rows: &[Vec<Rational>]) -> Matrix<Q> {
    Matrix::from_rows(rows.iter().map(|r| rationals(r)).collect())
}

impl SetSpec {
    fn build(&self) -> Result<CoveringSet> {
        match self {
            Self::Box { lo, hi } => {
                let base = BaseSet::from_bounds(lo, hi)?;
                CoveringSet::affine(Matrix::identity(lo.len()), vec![0.0; lo.len()], base)
            }
            Self::Ball { center, radius } => {
                CoveringSet::affine(Matrix::identity(center.len()), vec![0.0; center.len()], BaseSet::ball(center.clone(), *radius)?)
            }
            Self::Affine { matrix, offset, base } => CoveringSet::affine_exact(&exact_matrix(matrix), &rationals(offset), base.build()?),
            Self::Pullback { matrix, base } => CoveringSet::pullback_exact(&exact_matrix(matrix), base.build()?),
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ExplicitParams {
    sets: Vec<SetSpec>,
}

fn one() -> f64 {
    1.0
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct InducedParams {
    group: GroupFile,
    #[serde(default = "one")]
    delta: f64,
    #[serde(default = "one")]
    shear_step: f64,
    #[serde(default)]
    base: Option<BaseSpec>,
}

fn params<T: for<'de> Deserialize<'de>>(v: &serde_json::Value) -> Result<T> {
    let v = if v.is_null() { serde_json::json!({}) } else { v.clone() };
    serde_json::from_value(v).map_err(|e| field("parameters", e))
}

impl CoveringFile {
    pub fn family(&self) -> Result<Box<dyn CoveringFamily>> {
        let fam: Box<dyn CoveringFamily> = match self.kind {
            CoveringKind::Uniform => {
                let p: UniformParams = params(&self.parameters)?;
                Box::new(UniformCovering::new(self.dimension, p.step, p.domain)?)
            }
            CoveringKind::Dyadic => {
                let p: DyadicParams = params(&self.parameters)?;
                Box::new(DyadicCovering::new(p.domain))
            }
            CoveringKind::AlphaModulation => {
                let p: AlphaParams = params(&self.parameters)?;
                let alpha = p.alpha.0.to_f64();
                Box::new(match p.r {
                    Some(r) => AlphaModulation::with_radius(alpha, r)?,
                    None => AlphaModulation::new(alpha)?,
                })
            }
            CoveringKind::Explicit => {
                let p: ExplicitParams = params(&self.parameters)?;
                let sets = p.sets.iter().map(SetSpec::build).collect::<Result<Vec<_>>>()?;
                if let Some(bad) = sets.iter().position(|s| s.dim() != self.dimension) {
                    return Err(field("parameters.sets", format!("set {bad} has the wrong dimension")));
                }
                Box::new(ExplicitCovering { label: self.label.clone(), sets })
            }
            CoveringKind::Induced => {
                let p: InducedParams = params(&self.parameters)?;
                let spec = p.group.to_spec()?;
                let base = p.base.as_ref().map(BaseSpec::build).transpose()?;
                Box::new(InducedCoveringFamily { spec, delta: p.delta, shear_step: p.shear_step, base })
            }
        };
        if fam.dim() != self.dimension {
            return Err(field("dimension", format!("{} does not match the {:?} covering of dimension {}", self.dimension, self.kind, fam.dim())));
        }
        Ok(fam)
    }
}

pub fn parse_covering(text: &str, origin: &str) -> Result<CoveringFile> {
    let file: CoveringFile = serde_json::from_str(text).map_err(|e| Error::Parse(format!("{origin}: {e}")))?;
    file.family().map_err(|e| Error::Parse(format!("{origin}: {e}")))?;
    Ok(file)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::IntersectionBudget;
    use crate::scalar::{q, qi};

    #[test]
    fn group_round_trip() {
        for spec in [
            ShearletGroupSpec::standard(vec![q(1, 2), q(1, 3)]).unwrap(),
            ShearletGroupSpec::toeplitz(4, q(1, 4)).unwrap(),
            ShearletGroupSpec::d4_family(-1, vec![q(3, 4), q(3, 4), q(1, 2)]).unwrap(),
        ] {
            let text = serde_json::to_string_pretty(&GroupFile::from_spec(&spec)).unwrap();
            assert!(text.contains("\"1/"), "{text}");
            assert_eq!(parse_group(&text, "mem").unwrap(), spec);
        }
    }

    #[test]
    fn numbers_and_strings_both_parse() {
        let spec = parse_group(r#"{"d": 2, "kind": "standard", "lambda": [0.5]}"#, "a").unwrap();
        assert_eq!(spec.lambda(), &[q(1, 2)]);
        let t = parse_group(r#"{"d": 4, "kind": "toeplitz", "delta": "0"}"#, "b").unwrap();
        assert_eq!(t.lambda(), &[qi(1), qi(1), qi(1)]);
    }

    #[test]
    fn diagnostics_name_the_field() {
        let e = parse_group(r#"{"d": 3, "kind": "standard", "lambda": ["1/2"]}"#, "g.json").unwrap_err();
        assert!(e.to_string().contains("lambda") && e.to_string().contains("g.json"), "{e}");
        let e = parse_group("{\"d\": 3,\n \"kind\": \"wrong\"}", "h.json").unwrap_err();
        assert!(e.to_string().contains("line 2"), "{e}");
        let e = parse_group(r#"{"d": 2, "kind": "standard", "lambda": ["1/0"]}"#, "z").unwrap_err();
        assert!(e.to_string().contains("rational"), "{e}");
    }

    #[test]
    fn covering_files_build_families() {
        let text = r#"{"label": "dy", "dimension": 1, "kind": "dyadic", "parameters": {}, "window": {"radius": 64}}"#;
        let f = parse_covering(text, "c").unwrap();
        let cov = f.family().unwrap().truncate(64.0, &IntersectionBudget::default()).unwrap();
        assert!(cov.len() > 10);
        let ex = r#"{"label": "two", "dimension": 1, "kind": "explicit",
            "parameters": {"sets": [{"shape": "box", "lo": [0], "hi": [2]},
                                    {"shape": "affine", "matrix": [["2"]], "offset": ["1"], "base": {"shape": "box", "lo": [0], "hi": [1]}}]}}"#;
        let cov = parse_covering(ex, "e").unwrap().family().unwrap().truncate(10.0, &IntersectionBudget::default()).unwrap();
        assert_eq!(cov.len(), 2);
        let bad = r#"{"label": "u", "dimension": 1, "kind": "uniform", "parameters": {"stp": 1}}"#;
        assert!(parse_covering(bad, "u").unwrap_err().to_string().contains("parameters"));
    }
}
