//! Spec files through the equivalence pipeline.

use coorbit::equivalence::{coorbit_equivalent, Equivalence, EquivalenceOptions, ReasonCode};
use coorbit::files::{parse_group, GroupFile};
use coorbit::linalg::Matrix;
use coorbit::scalar::{q, qi};
use coorbit::shearlet::ShearletGroupSpec;

fn round_trip(spec: &ShearletGroupSpec) -> ShearletGroupSpec {
    let text = serde_json::to_string(&GroupFile::from_spec(spec)).unwrap();
    parse_group(&text, "mem").unwrap()
}

fn check(a: &ShearletGroupSpec, b: &ShearletGroupSpec) -> (Equivalence, ReasonCode) {
    let v = coorbit_equivalent(a, b, &EquivalenceOptions::default()).unwrap();
    (v.result, v.reason)
}

#[test]
fn files_preserve_the_verdict() {
    let corpus = [
        ShearletGroupSpec::standard(vec![q(1, 2), q(1, 2)]).unwrap(),
        ShearletGroupSpec::toeplitz(3, q(1, 2)).unwrap(),
        ShearletGroupSpec::standard(vec![q(1, 2), qi(0)]).unwrap(),
    ];
    for a in &corpus {
        for b in &corpus {
            assert_eq!(check(a, b), check(&round_trip(a), &round_trip(b)), "{} vs {}", a.label(), b.label());
        }
    }
}

#[test]
fn every_group_is_equivalent_to_itself() {
    for spec in [
        ShearletGroupSpec::standard(vec![q(1, 3)]).unwrap(),
        ShearletGroupSpec::toeplitz(4, q(1, 3)).unwrap(),
        ShearletGroupSpec::d4_family(-1, vec![q(3, 4), q(3, 4), q(1, 2)]).unwrap(),
    ] {
        assert_eq!(check(&spec, &spec).0, Equivalence::Equivalent, "{}", spec.label());
    }
}

#[test]
fn verdicts_are_symmetric() {
    let s1 = ShearletGroupSpec::toeplitz(4, qi(0)).unwrap();
    let mut c = Matrix::identity(4);
    c[(1, 2)] = qi(1);
    let s2 = s1.conjugate(&c, "s2").unwrap();
    let st = ShearletGroupSpec::standard(vec![qi(1), qi(1), qi(1)]).unwrap();
    for (a, b) in [(&s1, &s2), (&s1, &st), (&s2, &st)] {
        assert_eq!(check(a, b), check(b, a));
    }
    assert_eq!(check(&s1, &st), (Equivalence::NotEquivalent, ReasonCode::AlgebraInvariantMismatch));
}
