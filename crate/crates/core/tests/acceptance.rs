//! End-to-end acceptance checks. Each criterion prints one `PASS`/`FAIL`
//! line with its measured values and wall time; the process exits non-zero
//! if any criterion fails or overruns its time limit.

use std::collections::VecDeque;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use coorbit::coarse::{identity_probe, ProbeOptions, QIVerdict};
use coorbit::covering::{
    alpha_metric_law, weak_equivalence_verdict, AlphaModulation, Covering, Domain, DyadicCovering, Truncation,
    UniformCovering, WeakEquivalence,
};
use coorbit::equivalence::{
    algebra_invariants, coorbit_equivalent, commuting_check, find_conjugator, nonequivalence_witness, verify_conjugator,
    witness_probe, ConjugatorOutcome, Equivalence, EquivalenceOptions, ReasonCode, SearchBudget,
};
use coorbit::geometry::{BaseSet, BoundingBox, CoveringSet, IntersectionBudget};
use coorbit::linalg::Matrix;
use coorbit::scalar::{q, qi, Q};
use coorbit::shearlet::{
    orbit_map_probe, GroupElement, InducedCoveringFamily, LatticeParams, ShearletGroupSpec, WordBox, WordMetricLattice,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn err<E: std::fmt::Debug>(e: E) -> String {
    format!("{e:?}")
}

// ---------------------------------------------------------------------------
// 1. triangle-inequality counterexample

const INTERVALS: [(f64, f64); 6] = [(0.0, 2.0), (1.5, 3.5), (3.0, 5.0), (4.5, 6.5), (6.0, 8.0), (7.5, 9.5)];

/// Shortest chain by BFS over the raw interval list, independent of the library.
fn oracle_chain(x: f64, y: f64) -> Option<u32> {
    if x == y {
        return Some(0);
    }
    let hops = oracle_hops(x);
    INTERVALS.iter().enumerate().filter(|(_, s)| s.0 < y && y < s.1).filter_map(|(j, _)| hops[j]).min().map(|h| h + 1)
}

/// Hop counts in the overlap graph from the intervals containing `x`.
fn oracle_hops(x: f64) -> Vec<Option<u32>> {
    let n = INTERVALS.len();
    let mut dist = vec![None; n];
    let mut queue = VecDeque::new();
    for (i, s) in INTERVALS.iter().enumerate() {
        if s.0 < x && x < s.1 {
            dist[i] = Some(0);
            queue.push_back(i);
        }
    }
    while let Some(i) = queue.pop_front() {
        for j in 0..n {
            let overlap = INTERVALS[i].0.max(INTERVALS[j].0) < INTERVALS[i].1.min(INTERVALS[j].1);
            if overlap && dist[j].is_none() {
                dist[j] = Some(dist[i].unwrap() + 1);
                queue.push_back(j);
            }
        }
    }
    dist
}

/// `min_i max(hops(i, x), hops(i, y))`: both points lie in `Q_i^{n*}`.
fn oracle_hop_function(x: f64, y: f64) -> Option<u32> {
    let (hx, hy) = (oracle_hops(x), oracle_hops(y));
    hx.iter().zip(&hy).filter_map(|(a, b)| Some((*a)?.max((*b)?))).min()
}

fn criterion_counterexample() -> Outcome {
    let sets = INTERVALS
        .iter()
        .map(|&(lo, hi)| CoveringSet::affine(Matrix::identity(1), vec![0.0], BaseSet::from_bounds(&[lo], &[hi])?))
        .collect::<coorbit::Result<Vec<_>>>()
        .map_err(err)?;
    let window = BoundingBox { lo: vec![0.0], hi: vec![9.5] };
    let cov = Covering::new("six", sets, Truncation { radius: 9.5, window }, &IntersectionBudget::default()).map_err(err)?;
    let (x, y, z) = (1.0, 4.75, 9.25);
    let pairs = [(x, y), (y, z), (x, z)];
    let mut hop = Vec::new();
    let mut chain = Vec::new();
    for (a, b) in pairs {
        hop.push(cov.neighbor_hop_function(&[a], &[b]).map_err(err)?);
        chain.push(cov.chain_distance(&[a], &[b]).map_err(err)?);
    }
    ensure(hop == vec![Some(1), Some(1), Some(3)], format!("hop function {hop:?}, expected (1, 1, 3)"))?;
    let oracle_hop: Vec<_> = pairs.iter().map(|&(a, b)| oracle_hop_function(a, b)).collect();
    ensure(hop == oracle_hop, format!("hop function {hop:?} vs oracle {oracle_hop:?}"))?;
    let oracle: Vec<_> = pairs.iter().map(|&(a, b)| oracle_chain(a, b)).collect();
    ensure(chain == oracle, format!("chain distances {chain:?} vs oracle {oracle:?}"))?;
    let h = |v: Option<u32>| v.unwrap();
    ensure(h(hop[2]) > h(hop[0]) + h(hop[1]), "hop function satisfies the triangle inequality here")?;
    Ok(format!("hop (x,y),(y,z),(x,z) = {hop:?}; chain = {chain:?} (oracle {oracle:?})"))
}

// ---------------------------------------------------------------------------
// 2. α-modulation metric law

fn criterion_alpha_law() -> Outcome {
    let budget = IntersectionBudget::default();
    let mut lines = Vec::new();
    for alpha in [0.0, 0.5, 2.0 / 3.0] {
        let cov = AlphaModulation::new(alpha).map_err(err)?;
        let fits = [1e2, 1e3, 1e4]
            .iter()
            .map(|&r| alpha_metric_law(&cov, r, 600, 4.0, 0x5eed, &budget))
            .collect::<coorbit::Result<Vec<_>>>()
            .map_err(err)?;
        for f in &fits {
            ensure(f.pairs >= 500, "fewer than 500 pairs")?;
            ensure(f.l <= 8.0 && f.c <= 4.0, format!("alpha {alpha}: R = {} gives L = {}, C = {}", f.radius, f.l, f.c))?;
        }
        let spread = |v: Vec<f64>| {
            let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = v.iter().copied().fold(0.0, f64::max);
            if hi == 0.0 { 1.0 } else { hi / lo }
        };
        let sl = spread(fits.iter().map(|f| f.l).collect());
        let sc = spread(fits.iter().map(|f| f.c).collect());
        ensure(sl <= 1.5 && sc <= 1.5, format!("alpha {alpha}: constants drift by {sl:.3} (L) and {sc:.3} (C)"))?;
        lines.push(format!(
            "alpha={:.3}: L={} C={}",
            alpha,
            fits.iter().map(|f| format!("{:.2}", f.l)).collect::<Vec<_>>().join("/"),
            fits.iter().map(|f| format!("{:.2}", f.c)).collect::<Vec<_>>().join("/"),
        ));
    }
    Ok(lines.join("; "))
}

// ---------------------------------------------------------------------------
// 3. weak equivalence vs chain-metric quasi-isometry

fn induced_pair(spec: &ShearletGroupSpec) -> (InducedCoveringFamily, InducedCoveringFamily) {
    let a = InducedCoveringFamily { spec: spec.clone(), delta: 1.0, shear_step: 1.0, base: None };
    let b = InducedCoveringFamily { spec: spec.clone(), delta: 0.75, shear_step: 0.6, base: None };
    (a, b)
}

fn criterion_weak_vs_metric() -> Outcome {
    let budget = IntersectionBudget::default();
    let opts = ProbeOptions::default();
    let dyadic = DyadicCovering::new(Domain::Positive);
    let uniform = UniformCovering::new(1, 1.0, Domain::Positive).map_err(err)?;
    let radii = [64.0, 256.0, 1024.0];
    let weak = weak_equivalence_verdict(&dyadic, &uniform, &radii, 2.0, &budget).map_err(err)?;
    ensure(weak.result == WeakEquivalence::NotEquivalent, format!("dyadic/uniform weak verdict {:?}", weak.result))?;
    let probe = identity_probe(&dyadic, &uniform, &radii, 1000, &budget, &opts).map_err(err)?;
    ensure(probe.verdict == QIVerdict::Reject, format!("dyadic/uniform probe {:?}: {}", probe.verdict, probe.reason))?;

    let spec = ShearletGroupSpec::standard(vec![q(1, 2)]).map_err(err)?;
    let (a, b) = induced_pair(&spec);
    let radii = [3.0, 6.0, 9.0];
    let weak_ind = weak_equivalence_verdict(&a, &b, &radii, 2.0, &budget).map_err(err)?;
    ensure(weak_ind.result == WeakEquivalence::EquivalentEvidence, format!("induced weak verdict {:?}", weak_ind.result))?;
    let probe_ind = identity_probe(&a, &b, &radii, 600, &budget, &opts).map_err(err)?;
    ensure(
        probe_ind.verdict == QIVerdict::EmbeddingEvidence,
        format!("induced probe {:?}: {}", probe_ind.verdict, probe_ind.reason),
    )?;
    Ok(format!(
        "dyadic/uniform: {:?} + {:?} ({}); induced: {:?} + {:?} (L={}, C={})",
        weak.result, probe.verdict, probe.reason, weak_ind.result, probe_ind.verdict, probe_ind.l, probe_ind.c
    ))
}

// ---------------------------------------------------------------------------
// 4. orbit map from the word metric to the induced chain metric

fn relative_variation(v: &[f64]) -> f64 {
    let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = v.iter().copied().fold(0.0, f64::max);
    if hi == 0.0 {
        0.0
    } else {
        (hi - lo) / hi
    }
}

fn criterion_orbit_map() -> Outcome {
    let spec = ShearletGroupSpec::standard(vec![q(1, 2)]).map_err(err)?;
    let (family, _) = induced_pair(&spec);
    let rep = orbit_map_probe(&family, &[3.0, 6.0, 12.0], &IntersectionBudget::default(), &ProbeOptions::default())
        .map_err(err)?;
    ensure(rep.verdict == QIVerdict::EmbeddingEvidence, format!("{:?}: {}", rep.verdict, rep.reason))?;
    ensure(rep.levels.len() == 3, "expected three levels")?;
    let l: Vec<f64> = rep.levels.iter().map(|x| x.l).collect();
    let c: Vec<f64> = rep.levels.iter().map(|x| x.c).collect();
    let k: Vec<f64> = rep.levels.iter().map(|x| x.gap_k).collect();
    for (name, v) in [("L", &l), ("C", &c), ("K", &k)] {
        ensure(relative_variation(v) < 0.5, format!("{name} varies too much: {v:?}"))?;
    }
    Ok(format!("EMBEDDING-EVIDENCE, L={l:?} C={c:?} K={k:?}"))
}

// ---------------------------------------------------------------------------
// 5. equivalence corpus

fn displayed_pair() -> coorbit::Result<(ShearletGroupSpec, ShearletGroupSpec)> {
    let s1 = ShearletGroupSpec::toeplitz(4, qi(0))?;
    let mut c = Matrix::identity(4);
    c[(1, 2)] = qi(1);
    let s2 = s1.conjugate(&c, "s2")?;
    Ok((s1, s2))
}

fn criterion_corpus() -> Outcome {
    let opts = EquivalenceOptions::default();
    let cs = [q(1, 2), q(1, 3), q(2, 3), qi(1), q(1, 4)];
    let mut checked = 0;
    for (i, c) in cs.iter().enumerate() {
        for c2 in &cs[i + 1..] {
            let a = ShearletGroupSpec::standard(vec![c.clone()]).map_err(err)?;
            let b = ShearletGroupSpec::standard(vec![c2.clone()]).map_err(err)?;
            let v = coorbit_equivalent(&a, &b, &opts).map_err(err)?;
            ensure(
                (v.result, v.reason) == (Equivalence::NotEquivalent, ReasonCode::DiagonalMismatch),
                format!("S_{c} vs S_{c2}: {:?} {:?}", v.result, v.reason),
            )?;
            checked += 1;
        }
    }
    for d in [3usize, 4] {
        for delta in [qi(0), q(1, 4)] {
            // the standard group with the Toeplitz exponents 1 − jδ
            let t = ShearletGroupSpec::toeplitz(d, delta).map_err(err)?;
            let s = ShearletGroupSpec::standard(t.lambda().to_vec()).map_err(err)?;
            let (is, it) = (algebra_invariants(&s), algebra_invariants(&t));
            ensure(is.power_dims[1] == 0 && it.power_dims[1] > 0, "dim of the square of the algebra does not separate")?;
            for (x, y) in [(&s, &t), (&t, &s)] {
                let v = coorbit_equivalent(x, y, &opts).map_err(err)?;
                ensure(
                    (v.result, v.reason) == (Equivalence::NotEquivalent, ReasonCode::AlgebraInvariantMismatch),
                    format!("standard vs Toeplitz d={d}: {:?} {:?}", v.result, v.reason),
                )?;
                checked += 1;
            }
        }
    }
    let (s1, s2) = displayed_pair().map_err(err)?;
    let mut shown = String::new();
    for (x, y) in [(&s1, &s2), (&s2, &s1)] {
        let v = coorbit_equivalent(x, y, &opts).map_err(err)?;
        ensure(v.result == Equivalence::Equivalent, format!("conjugate pair: {:?} {:?}", v.result, v.reason))?;
        let c = v.evidence.conjugator_matrix.clone().ok_or("no conjugator in evidence")?;
        ensure(verify_conjugator(&c, x, y).map_err(err)?, "returned C fails C^-1 S1 C = S2")?;
        ensure(commuting_check(&c, x, y, 1).map_err(err)?.passed(), "returned C fails the commuting identity")?;
        if shown.is_empty() {
            shown = format!("{:?}", v.evidence.conjugator.unwrap_or_default());
        }
        checked += 1;
    }
    Ok(format!("{checked} verdicts as expected; C = {shown}"))
}

// ---------------------------------------------------------------------------
// 6. four-dimensional family separation

fn criterion_d4() -> Outcome {
    let lam = vec![q(3, 4), q(3, 4), q(1, 2)];
    let fam = |alpha: i8| ShearletGroupSpec::d4_family(alpha, lam.clone()).map_err(err);
    let (m, z, p) = (fam(-1)?, fam(0)?, fam(1)?);
    let (im, iz, ip) = (algebra_invariants(&m), algebra_invariants(&z), algebra_invariants(&p));
    ensure(iz != im && iz != ip, "invariants do not separate alpha = 0")?;
    ensure(im.quadratic != ip.quadratic, "signature does not separate alpha = 1 from alpha = -1")?;
    let budget = SearchBudget::default();
    for (x, y) in [(&z, &p), (&p, &z)] {
        let out = find_conjugator(x, y, &[], false, &budget).map_err(err)?;
        ensure(matches!(out, ConjugatorOutcome::NotFound { .. }), format!("search between alpha 0 and 1: {out:?}"))?;
    }
    Ok(format!(
        "signatures -1: {:?}, 0: {:?}, 1: {:?}; search NOT-FOUND both ways",
        im.quadratic.map(|s| (s.rank, s.positive, s.negative)),
        iz.quadratic.map(|s| (s.rank, s.positive, s.negative)),
        ip.quadratic.map(|s| (s.rank, s.positive, s.negative)),
    ))
}

// ---------------------------------------------------------------------------
// 7. witness sequence

fn criterion_witness() -> Outcome {
    let a = ShearletGroupSpec::standard(vec![q(1, 2)]).map_err(err)?;
    let b = ShearletGroupSpec::standard(vec![qi(1)]).map_err(err)?;
    let w = nonequivalence_witness(&a, &b, None, 60).map_err(err)?;
    ensure(w.rows.len() == 60, "witness shorter than 60")?;
    ensure(
        w.rows.windows(2).all(|r| r[1].increment_log10 > r[0].increment_log10),
        "image increments are not strictly increasing",
    )?;
    let last = w.rows.last().unwrap();
    ensure(last.increment_log10 > 6.0 && last.image_word_lower > 10.0, format!("increments stay small: {last:?}"))?;
    let rep = witness_probe(&w, &[15, 30, 60], &ProbeOptions::default()).map_err(err)?;
    ensure(rep.verdict == QIVerdict::Reject, format!("{:?}: {}", rep.verdict, rep.reason))?;
    Ok(format!(
        "increment at n=59: 10^{:.1}, word length >= {:.1}; probe REJECT ({})",
        last.increment_log10, last.image_word_lower, rep.reason
    ))
}

// ---------------------------------------------------------------------------
// 8. exactness suite

fn corpus() -> coorbit::Result<Vec<ShearletGroupSpec>> {
    let mut out = Vec::new();
    for lam in [q(1, 2), q(1, 3), q(2, 3), qi(1), q(-1, 2)] {
        out.push(ShearletGroupSpec::standard(vec![lam])?);
    }
    for d in 3..=6 {
        out.push(ShearletGroupSpec::standard((0..d - 1).map(|j| q(1, j as i64 + 2)).collect())?);
        for delta in [qi(0), q(1, 4), q(1, 3)] {
            out.push(ShearletGroupSpec::toeplitz(d, delta)?);
        }
    }
    for alpha in [-1, 0, 1] {
        out.push(ShearletGroupSpec::d4_family(alpha, vec![q(3, 4), q(3, 4), q(1, 2)])?);
    }
    out.push(ShearletGroupSpec::d4_family(0, vec![q(3, 4), q(2, 3), q(1, 2)])?);
    out.push(displayed_pair()?.1);
    Ok(out)
}

fn random_element(spec: &ShearletGroupSpec, rng: &mut ChaCha8Rng) -> GroupElement<Q> {
    let g = spec.group::<Q>();
    let l = coorbit::scalar::common_denominator(spec.lambda());
    let l = num::ToPrimitive::to_i64(&l).unwrap();
    let k: i64 = rng.gen_range(-2..=2);
    let p = num::pow::pow(qi(2), (l * k.abs()) as usize);
    let a = if k >= 0 { p } else { qi(1) / p };
    let eps = if spec.sign_component() && rng.gen_bool(0.5) { -1 } else { 1 };
    let t = (1..spec.dim()).map(|_| q(rng.gen_range(-6..=6), rng.gen_range(1..=4))).collect();
    g.element(eps, a, t).unwrap()
}

fn exactness_for(spec: &ShearletGroupSpec, rng: &mut ChaCha8Rng) -> Result<usize, String> {
    let g = spec.group::<Q>();
    let d = spec.dim();
    let tag = spec.label().to_string();
    let mut checks = 0;
    spec.validate().map_err(|e| format!("{tag}: {e}"))?;
    checks += 1;
    for (j, x) in spec.basis().iter().enumerate() {
        let mut e1 = vec![qi(0); d];
        e1[0] = qi(1);
        let col = x.transpose().mul_vec(&e1);
        ensure((0..d).all(|k| col[k] == if k == j + 1 { qi(1) } else { qi(0) }), format!("{tag}: X_{}^T e_1", j + 2))?;
        checks += 1;
    }
    for _ in 0..6 {
        let (x, y, z) = (random_element(spec, rng), random_element(spec, rng), random_element(spec, rng));
        let m = |a: &GroupElement<Q>, b: &GroupElement<Q>| -> GroupElement<Q> { g.multiply(a, b).unwrap() };
        ensure(m(&m(&x, &y), &z) == m(&x, &m(&y, &z)), format!("{tag}: associativity"))?;
        ensure(m(&x, &g.identity()) == x && m(&g.identity(), &x) == x, format!("{tag}: identity"))?;
        let xi = g.invert(&x).map_err(err)?;
        ensure(m(&x, &xi) == g.identity() && m(&xi, &x) == g.identity(), format!("{tag}: inverse"))?;
        let (mx, my) = (g.to_matrix(&x).map_err(err)?, g.to_matrix(&y).map_err(err)?);
        ensure(g.to_matrix(&m(&x, &y)).map_err(err)? == mx.mul(&my), format!("{tag}: matrix homomorphism"))?;
        ensure(g.from_matrix(&mx).map_err(err)? == x, format!("{tag}: matrix round trip"))?;
        let p = g.orbit_map(&x).map_err(err)?;
        ensure(g.orbit_map_inverse(&p).map_err(err)? == x, format!("{tag}: orbit round trip"))?;
        let h = g.to_matrix(&g.orbit_map_inverse(&p).map_err(err)?).map_err(err)?;
        let mut e1 = vec![qi(0); d];
        e1[0] = qi(1);
        ensure(h.inverse().map_err(err)?.transpose().mul_vec(&e1) == p, format!("{tag}: orbit map is h^-T e_1"))?;
        let det = g.abs_det(&x).map_err(err)?;
        let md = mx.determinant();
        ensure(det == if md < qi(0) { -md } else { md }, format!("{tag}: |det h| identity"))?;
        let half = vec![0.25; d];
        let mut center = vec![0.0; d];
        center[0] = 1.0;
        let base = BaseSet::axis_box(center, half).map_err(err)?;
        let vol_q = base.volume_exact().ok_or("base volume is not exact")?;
        let set = CoveringSet::pullback_exact(&mx, base).map_err(err)?;
        ensure(set.volume_exact() == Some(vol_q / det.clone()), format!("{tag}: pullback volume"))?;
        // left invariance of the increment x⁻¹y
        let inc = m(&g.invert(&y).map_err(err)?, &z);
        let shifted = m(&g.invert(&m(&x, &y)).map_err(err)?, &m(&x, &z));
        ensure(inc == shifted, format!("{tag}: left invariance of increments"))?;
        checks += 11;
    }
    // word-metric adjacency on the exact lattice commutes with a scale shift
    let (k, m) = if d <= 3 { (2, 2) } else { (1, 1) };
    let params = LatticeParams::exact(spec, k, m);
    let window = WordBox::default_for(&params);
    let lat = WordMetricLattice::build(spec, params, window).map_err(|e| format!("{tag}: lattice {e}"))?;
    let lg = lat.group();
    let shift = lg.element(1, lat.params().scale.clone(), vec![qi(0); d - 1]).map_err(err)?;
    for i in 0..lat.len() {
        let (_, ki, mi) = lat.key(i);
        let Some(si) = lat.index_of(1, ki + 1, mi) else { continue };
        ensure(lg.multiply(&shift, &lat.points()[i]).map_err(err)? == lat.points()[si], format!("{tag}: lattice shift"))?;
        for j in 0..lat.len() {
            let (_, kj, mj) = lat.key(j);
            let Some(sj) = lat.index_of(1, kj + 1, mj) else { continue };
            ensure(lat.adjacent(i, j) == lat.adjacent(si, sj), format!("{tag}: word-metric left invariance"))?;
            checks += 1;
        }
    }
    Ok(checks)
}

fn criterion_exactness() -> Outcome {
    let specs = corpus().map_err(err)?;
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut total = 0;
    for s in &specs {
        total += exactness_for(s, &mut rng)?;
    }
    Ok(format!("{} groups (d <= 6), {total} exact identities, zero residual", specs.len()))
}

// ---------------------------------------------------------------------------

fn main() -> ExitCode {
    let criteria: [(&str, Option<Duration>, fn() -> Outcome); 8] = [
        ("1 hop function vs chain distance", Some(Duration::from_secs(1)), criterion_counterexample),
        ("2 alpha-modulation metric law", Some(Duration::from_secs(60)), criterion_alpha_law),
        ("3 weak equivalence vs chain-metric probe", Some(Duration::from_secs(120)), criterion_weak_vs_metric),
        ("4 orbit map quasi-isometry evidence", Some(Duration::from_secs(120)), criterion_orbit_map),
        ("5 equivalence corpus", Some(Duration::from_secs(10)), criterion_corpus),
        ("6 four-dimensional family separation", Some(Duration::from_secs(10)), criterion_d4),
        ("7 witness pipeline", Some(Duration::from_secs(60)), criterion_witness),
        ("8 exactness suite", None, criterion_exactness),
    ];
    let mut failed = 0;
    for (name, limit, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let took = start.elapsed();
        let overran = limit.is_some_and(|l| took > l);
        let limit_text = limit.map_or(String::new(), |l| format!(" / limit {}s", l.as_secs()));
        match outcome {
            Ok(detail) if !overran => println!("PASS [{name}] ({:.2}s{limit_text}) {detail}", took.as_secs_f64()),
            Ok(detail) => {
                failed += 1;
                println!("FAIL [{name}] ({:.2}s{limit_text}) over time limit; {detail}", took.as_secs_f64());
            }
            Err(why) => {
                failed += 1;
                println!("FAIL [{name}] ({:.2}s{limit_text}) {why}", took.as_secs_f64());
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criterion(s) failed");
        ExitCode::FAILURE
    }
}
