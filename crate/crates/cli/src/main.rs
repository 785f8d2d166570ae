//! `coorbit`: configuration ingestion, pipeline orchestration and reports.

mod args;
mod report;

use std::path::Path;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use coorbit::coarse::{identity_probe, ProbeOptions, QIReport, QIVerdict};
use coorbit::covering::{alpha_metric_law, weak_equivalence_verdict, AlphaModulation, Bounded, CoveringFamily, WeakEquivalence};
use coorbit::equivalence::{
    algebra_invariants, coorbit_equivalent, dual_orbit, graded_invariants, matrix_strings, nonequivalence_witness,
    witness_probe, Equivalence, EquivalenceOptions, SearchBudget,
};
use coorbit::files::{parse_covering, parse_group, CoveringFile, CoveringKind, GroupFile, Rational};
use coorbit::geometry::IntersectionBudget;
use coorbit::linalg::Matrix;
use coorbit::scalar::{format_q, parse_q, Scalar, Q};
use coorbit::shearlet::{orbit_map_probe, InducedCoveringFamily, LatticeParams, ShearletGroupSpec, WordBox, WordMetricLattice};

use args::{Arithmetic, Cli, Command, CoveringCmd, EquivalenceCmd, Global, GroupCmd, GroupMake, ProbeCmd, WitnessArgs};
use report::{Budgets, Output, RunConfig};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("invalid input: {0}")]
    Data(String),
    #[error("i/o: {0}")]
    Io(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            Self::Usage(_) => 64,
            Self::Data(_) => 65,
            Self::Io(_) => 74,
        }
    }
}

impl From<coorbit::Error> for CliError {
    fn from(e: coorbit::Error) -> Self {
        match e {
            coorbit::Error::Io(_) => Self::Io(e.to_string()),
            coorbit::Error::Usage(_) => Self::Usage(e.to_string()),
            _ => Self::Data(e.to_string()),
        }
    }
}

type Run = Result<u8, CliError>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => {
                    ExitCode::SUCCESS
                }
                _ => ExitCode::from(64),
            };
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("coorbit: {e}");
            ExitCode::from(e.code())
        }
    }
}

fn run(cli: Cli) -> Run {
    if let Some(n) = cli.global.threads {
        if n == 0 {
            return Err(CliError::Usage("--threads must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(format!("cannot configure threads: {e}")))?;
    }
    if let Some(r) = &cli.global.radii {
        check_radii(r)?;
    }
    let ctx = Context { global: &cli.global, output: Output { out: cli.global.out.clone() } };
    match &cli.command {
        Command::Covering(c) => covering(&ctx, c),
        Command::Group(g) => group(&ctx, g),
        Command::Equivalence(EquivalenceCmd::Check { a, b, candidates, witness_cap }) => {
            equivalence(&ctx, a, b, candidates, *witness_cap)
        }
        Command::QiProbe(p) => probe(&ctx, p),
        Command::Witness(w) => witness(&ctx, w),
    }
}

fn check_radii(r: &[f64]) -> Result<(), CliError> {
    if r.is_empty() || r.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
        return Err(CliError::Usage(format!("--radii must be positive and finite, got {r:?}")));
    }
    if r.windows(2).any(|w| w[1] <= w[0]) {
        return Err(CliError::Usage(format!("--radii must be strictly increasing, got {r:?}")));
    }
    Ok(())
}

struct Context<'a> {
    global: &'a Global,
    output: Output,
}

impl Context<'_> {
    fn config(&self, command: &str, inputs: &[&Path], radii: &[f64]) -> RunConfig {
        let g = self.global;
        RunConfig {
            command: command.to_string(),
            inputs: inputs.iter().map(|p| p.display().to_string()).collect(),
            radii: radii.to_vec(),
            seed: g.seed,
            budgets: Budgets { intersection_depth: g.budget_depth, pairs: g.budget_pairs, search_seeds: g.budget_seeds },
            arithmetic: g.arithmetic(),
        }
    }

    fn radii_or(&self, default: &[f64]) -> Vec<f64> {
        self.global.radii.clone().unwrap_or_else(|| default.to_vec())
    }

    fn intersection_budget(&self) -> IntersectionBudget {
        IntersectionBudget { depth: self.global.budget_depth, seed: self.global.seed, ..IntersectionBudget::default() }
    }

    fn probe_options(&self) -> ProbeOptions {
        ProbeOptions { pair_budget: self.global.budget_pairs, seed: self.global.seed, ..ProbeOptions::default() }
    }

    fn search_budget(&self) -> SearchBudget {
        SearchBudget { seeds: self.global.budget_seeds, seed: self.global.seed, ..SearchBudget::default() }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn load_group(path: &Path) -> Result<ShearletGroupSpec, CliError> {
    Ok(parse_group(&read(path)?, &path.display().to_string())?)
}

fn load_covering(path: &Path) -> Result<(CoveringFile, Box<dyn CoveringFamily>), CliError> {
    let file = parse_covering(&read(path)?, &path.display().to_string())?;
    let family = file.family()?;
    Ok((file, family))
}

/// Default radii: the file's window, else a kind-dependent ladder (induced
/// coverings grow like `R^d` in lattice points).
fn default_radii(file: &CoveringFile) -> Vec<f64> {
    match (file.window, file.kind) {
        (Some(w), _) => vec![w.radius],
        (None, CoveringKind::Induced) => vec![3.0, 6.0, 9.0],
        (None, _) => vec![64.0, 256.0, 1024.0],
    }
}

fn parse_matrix(text: &str) -> Result<Matrix<Q>, CliError> {
    let rows = text
        .split(';')
        .map(|r| r.split(',').map(|v| parse_q(v.trim())).collect::<coorbit::Result<Vec<_>>>())
        .collect::<coorbit::Result<Vec<_>>>()
        .map_err(|e| CliError::Usage(format!("matrix `{text}`: {e}")))?;
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(CliError::Usage(format!("matrix `{text}` is not square")));
    }
    Ok(Matrix::from_rows(rows))
}

fn parse_rationals(values: &[String]) -> Result<Vec<Q>, CliError> {
    values.iter().map(|v| parse_q(v.trim()).map_err(|e| CliError::Usage(format!("`{v}`: {e}")))).collect()
}

fn bounded(b: &Bounded) -> String {
    format!("{},{}", b.lower, b.upper)
}

// ---------------------------------------------------------------------------
// covering

#[derive(Serialize)]
struct TruncationRow {
    radius: f64,
    sets: usize,
    admissibility: Bounded,
    undecided_pairs: usize,
}

#[derive(Serialize)]
struct CoveringMakeResult {
    label: String,
    family: String,
    truncations: Vec<TruncationRow>,
}

#[derive(Serialize)]
struct DistanceRow {
    i: usize,
    j: usize,
    chain_lower: Option<u32>,
    chain_upper: Option<u32>,
    hop: Option<u32>,
}

#[derive(Serialize)]
struct CoveringMetricResult {
    label: String,
    radius: f64,
    sets: usize,
    points: Vec<Vec<f64>>,
    distances: Vec<DistanceRow>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    alpha_law: Vec<coorbit::covering::AlphaLawFit>,
}

fn covering(ctx: &Context, cmd: &CoveringCmd) -> Run {
    let budget = ctx.intersection_budget();
    match cmd {
        CoveringCmd::Make { file } => {
            let (spec, fam) = load_covering(file)?;
            let radii = ctx.radii_or(&default_radii(&spec));
            let mut rows = Vec::new();
            let mut nerve = String::new();
            for &r in &radii {
                let cov = fam.truncate(r, &budget)?;
                rows.push(TruncationRow {
                    radius: r,
                    sets: cov.len(),
                    admissibility: cov.admissibility_constant(),
                    undecided_pairs: cov.nerve().undecided_pairs().len(),
                });
                nerve = cov.nerve_csv();
            }
            let mut table = String::from("radius,sets,admissibility_lower,admissibility_upper,undecided_pairs\n");
            for r in &rows {
                table.push_str(&format!("{},{},{},{}\n", r.radius, r.sets, bounded(&r.admissibility), r.undecided_pairs));
            }
            let last = rows.last().expect("radii are non-empty");
            let summary = format!("{}: {} sets, admissibility {} at R = {}", spec.label, last.sets, bounded(&last.admissibility), last.radius);
            let result = CoveringMakeResult { label: spec.label.clone(), family: fam.label(), truncations: rows };
            ctx.output.emit(&ctx.config("covering make", &[file], &radii), &result, &[("truncations", table), ("nerve", nerve)], &summary)?;
            Ok(0)
        }
        CoveringCmd::Compare { a, b, growth } => {
            let (sa, fa) = load_covering(a)?;
            let (_, fb) = load_covering(b)?;
            let radii = ctx.radii_or(&default_radii(&sa));
            let rep = weak_equivalence_verdict(fa.as_ref(), fb.as_ref(), &radii, *growth, &budget)?;
            let mut table = String::from("radius,sets_q,sets_p,n_q_in_p_lower,n_q_in_p_upper,n_p_in_q_lower,n_p_in_q_upper\n");
            for r in &rep.per_radius {
                table.push_str(&format!("{},{},{},{},{}\n", r.radius, r.sets_q, r.sets_p, bounded(&r.q_in_p), bounded(&r.p_in_q)));
            }
            let code = match rep.result {
                WeakEquivalence::EquivalentEvidence => 0,
                WeakEquivalence::NotEquivalent => 1,
                WeakEquivalence::Indeterminate => 2,
            };
            let summary = format!("{}", serde_json::to_value(rep.result).unwrap_or_default().as_str().unwrap_or_default());
            ctx.output.emit(&ctx.config("covering compare", &[a, b], &radii), &rep, &[("counts", table)], &summary)?;
            Ok(code)
        }
        CoveringCmd::Metric { file, points, pairs, additive_cap } => {
            let (spec, fam) = load_covering(file)?;
            let radii = ctx.radii_or(&default_radii(&spec));
            let radius = *radii.last().expect("radii are non-empty");
            let cov = fam.truncate(radius, &budget)?;
            let pts: Vec<Vec<f64>> = if points.is_empty() {
                // random pairs of set centers inside the window
                let mut rng = ChaCha8Rng::seed_from_u64(ctx.global.seed);
                let centers: Vec<Vec<f64>> =
                    cov.sets().iter().map(|s| s.center()).filter(|c| cov.truncation().window.contains(c)).collect();
                if centers.is_empty() {
                    return Err(CliError::Data("no set center lies inside the window".into()));
                }
                (0..2 * pairs).map(|_| centers[rng.gen_range(0..centers.len())].clone()).collect()
            } else {
                points
                    .iter()
                    .map(|p| {
                        p.split(',')
                            .map(|v| v.trim().parse::<f64>().map_err(|e| CliError::Usage(format!("point `{p}`: {e}"))))
                            .collect()
                    })
                    .collect::<Result<_, _>>()?
            };
            let index_pairs: Vec<(usize, usize)> = if points.is_empty() {
                (0..*pairs).map(|k| (2 * k, 2 * k + 1)).collect()
            } else {
                (0..pts.len()).flat_map(|i| (i + 1..pts.len()).map(move |j| (i, j))).collect()
            };
            let mut distances = Vec::new();
            let mut table = String::from("i,j,chain_lower,chain_upper,hop\n");
            let opt = |v: Option<u32>| v.map_or("inf".to_string(), |x| x.to_string());
            for (i, j) in index_pairs {
                let (lo, hi) = cov.chain_distance_bounds(&pts[i], &pts[j])?;
                let hop = cov.neighbor_hop_function(&pts[i], &pts[j])?;
                table.push_str(&format!("{i},{j},{},{},{}\n", opt(lo), opt(hi), opt(hop)));
                distances.push(DistanceRow { i, j, chain_lower: lo, chain_upper: hi, hop });
            }
            let mut tables = vec![("distances", table)];
            let mut alpha_law = Vec::new();
            if spec.kind == CoveringKind::AlphaModulation && points.is_empty() {
                let alpha = serde_json::from_value::<AlphaParamsView>(spec.parameters.clone())
                    .map_err(|e| CliError::Data(format!("parameters: {e}")))?;
                let a = alpha.alpha.0.to_f64();
                let model = match alpha.r {
                    Some(r) => AlphaModulation::with_radius(a, r)?,
                    None => AlphaModulation::new(a)?,
                };
                let mut law = String::from("radius,sets,pairs,l,c\n");
                for &r in &radii {
                    let fit = alpha_metric_law(&model, r, *pairs, *additive_cap, ctx.global.seed, &budget)?;
                    law.push_str(&format!("{},{},{},{},{}\n", fit.radius, fit.sets, fit.pairs, fit.l, fit.c));
                    alpha_law.push(fit);
                }
                tables.push(("alpha_law", law));
            }
            let summary = format!("{} chain distances at R = {radius}", distances.len());
            let result = CoveringMetricResult { label: spec.label.clone(), radius, sets: cov.len(), points: pts, distances, alpha_law };
            ctx.output.emit(&ctx.config("covering metric", &[file], &radii), &result, &tables, &summary)?;
            Ok(0)
        }
    }
}

#[derive(serde::Deserialize)]
struct AlphaParamsView {
    alpha: Rational,
    #[serde(default)]
    r: Option<f64>,
}

// ---------------------------------------------------------------------------
// group

#[derive(Serialize)]
struct LatticeSummary {
    arithmetic: Arithmetic,
    scale_step: String,
    scale_steps: i64,
    shear_steps: i64,
    points: usize,
    identity_degree: usize,
    diameter: Option<u32>,
}

#[derive(Serialize)]
struct GroupInfo {
    spec: GroupFile,
    dual_orbit: coorbit::equivalence::OrbitDescriptor,
    invariants: coorbit::equivalence::AlgebraInvariants,
    graded_invariants: Vec<coorbit::equivalence::WeightDims>,
    lattice: LatticeSummary,
}

fn lattice_summary<S: Scalar>(lat: &WordMetricLattice<S>, arithmetic: Arithmetic, scale_step: String) -> Result<LatticeSummary, CliError> {
    let n = lat.len();
    let origin = lat.index_of(1, 0, &vec![0; lat.group().dim() - 1]).ok_or_else(|| CliError::Data("lattice has no identity".into()))?;
    let identity_degree = (0..n).filter(|&j| lat.adjacent(origin, j)).count();
    let mut diameter = Some(0);
    for i in 0..n {
        for j in 0..n {
            diameter = match (diameter, lat.distance(i, j)) {
                (Some(d), Some(x)) => Some(d.max(x)),
                _ => None,
            };
        }
    }
    let p = lat.params();
    Ok(LatticeSummary { arithmetic, scale_step, scale_steps: p.scale_steps, shear_steps: p.shear_steps, points: n, identity_degree, diameter })
}

fn group(ctx: &Context, cmd: &GroupCmd) -> Run {
    match cmd {
        GroupCmd::Make(make) => {
            let spec = match make {
                GroupMake::Standard { lambda } => ShearletGroupSpec::standard(parse_rationals(lambda)?)?,
                GroupMake::Toeplitz { d, delta } => {
                    ShearletGroupSpec::toeplitz(*d, parse_q(delta).map_err(|e| CliError::Usage(e.to_string()))?)?
                }
                GroupMake::D4 { alpha, lambda } => ShearletGroupSpec::d4_family(*alpha, parse_rationals(lambda)?)?,
                GroupMake::Conjugate { file, by, label } => {
                    let base = load_group(file)?;
                    let name = label.clone().unwrap_or_else(|| format!("{}^C", base.label()));
                    base.conjugate(&parse_matrix(by)?, &name)?
                }
            };
            ctx.output.emit_file(&GroupFile::from_spec(&spec))?;
            Ok(0)
        }
        GroupCmd::Info { file, lattice } => {
            let spec = load_group(file)?;
            let (k, m) = (lattice[0], lattice[1]);
            let arithmetic = ctx.global.arithmetic();
            let summary = match arithmetic {
                Arithmetic::ExactPreferred => {
                    let params = LatticeParams::exact(&spec, k, m);
                    let step = format_q(&params.scale);
                    let window = WordBox::default_for(&params);
                    lattice_summary(&WordMetricLattice::build(&spec, params, window)?, arithmetic, step)?
                }
                Arithmetic::Float => {
                    let params = LatticeParams::from_log(1.0, 1.0, k, m);
                    let step = format!("{}", params.scale);
                    let window = WordBox::default_for(&params);
                    lattice_summary(&WordMetricLattice::build(&spec, params, window)?, arithmetic, step)?
                }
            };
            let info = GroupInfo {
                spec: GroupFile::from_spec(&spec),
                dual_orbit: dual_orbit(&spec),
                invariants: algebra_invariants(&spec),
                graded_invariants: graded_invariants(&spec),
                lattice: summary,
            };
            let line = format!("{}: d = {}, powers {:?}", spec.label(), spec.dim(), info.invariants.power_dims);
            ctx.output.emit(&ctx.config("group info", &[file], &[]), &info, &[], &line)?;
            Ok(0)
        }
    }
}

// ---------------------------------------------------------------------------
// equivalence

fn equivalence(ctx: &Context, a: &Path, b: &Path, candidates: &[String], witness_cap: usize) -> Run {
    let (sa, sb) = (load_group(a)?, load_group(b)?);
    if witness_cap == 0 || witness_cap > 60 {
        return Err(CliError::Usage(format!("--witness-cap must be in 1..=60, got {witness_cap}")));
    }
    let opts = EquivalenceOptions {
        budget: ctx.search_budget(),
        candidates: candidates.iter().map(|c| parse_matrix(c)).collect::<Result<_, _>>()?,
        witness_cap: Some(witness_cap),
    };
    let v = coorbit_equivalent(&sa, &sb, &opts)?;
    let mut tables = Vec::new();
    if let Some(c) = &v.evidence.conjugator {
        let mut t = String::from("row,col,value\n");
        for (i, row) in c.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                t.push_str(&format!("{},{},{x}\n", i + 1, j + 1));
            }
        }
        tables.push(("conjugator", t));
    }
    if let Some(w) = &v.evidence.witness {
        tables.push(("witness", witness_csv(w)));
    }
    let code = match v.result {
        Equivalence::Equivalent => 0,
        Equivalence::NotEquivalent => 1,
        Equivalence::Indeterminate => 2,
    };
    let text = |x: serde_json::Value| x.as_str().unwrap_or_default().to_string();
    let mut summary = format!(
        "{} ({})",
        text(serde_json::to_value(v.result).unwrap_or_default()),
        text(serde_json::to_value(v.reason).unwrap_or_default())
    );
    if let Some(c) = &v.evidence.conjugator_matrix {
        summary.push_str(&format!(" C = {:?}", matrix_strings(c)));
    }
    ctx.output.emit(&ctx.config("equivalence check", &[a, b], &[]), &v, &tables, &summary)?;
    Ok(code)
}

fn witness_csv(w: &coorbit::equivalence::NonequivalenceWitness) -> String {
    let mut t = String::from("n,increment_log10,image_word_lower\n");
    for r in &w.rows {
        t.push_str(&format!("{},{},{}\n", r.n, r.increment_log10, r.image_word_lower));
    }
    t
}

// ---------------------------------------------------------------------------
// probes

fn probe_code(r: &QIReport) -> u8 {
    match r.verdict {
        QIVerdict::EmbeddingEvidence => 0,
        QIVerdict::Reject => 1,
        QIVerdict::Indeterminate => 2,
    }
}

fn probe_summary(r: &QIReport) -> String {
    let v = serde_json::to_value(r.verdict).unwrap_or_default();
    format!("{}: {} (L = {}, C = {}, K = {})", v.as_str().unwrap_or_default(), r.reason, r.l, r.c, r.k)
}

fn probe(ctx: &Context, cmd: &ProbeCmd) -> Run {
    let budget = ctx.intersection_budget();
    let opts = ctx.probe_options();
    let (rep, config) = match cmd {
        ProbeCmd::Orbit { group, delta, shear_step } => {
            let spec = load_group(group)?;
            let radii = ctx.radii_or(&[3.0, 6.0, 12.0]);
            let family = InducedCoveringFamily { spec, delta: *delta, shear_step: *shear_step, base: None };
            (orbit_map_probe(&family, &radii, &budget, &opts)?, ctx.config("qi-probe orbit", &[group], &radii))
        }
        ProbeCmd::Identity { a, b, max_points } => {
            let (sa, fa) = load_covering(a)?;
            let (_, fb) = load_covering(b)?;
            let radii = ctx.radii_or(&default_radii(&sa));
            let rep = identity_probe(fa.as_ref(), fb.as_ref(), &radii, *max_points, &budget, &opts)?;
            (rep, ctx.config("qi-probe identity", &[a, b], &radii))
        }
    };
    ctx.output.emit(&config, &rep, &[("envelope", rep.envelope_csv())], &probe_summary(&rep))?;
    Ok(probe_code(&rep))
}

#[derive(Serialize)]
struct WitnessResult {
    witness: coorbit::equivalence::NonequivalenceWitness,
    probe: QIReport,
}

fn witness(ctx: &Context, w: &WitnessArgs) -> Run {
    let (sa, sb) = (load_group(&w.a)?, load_group(&w.b)?);
    let cap = *w.caps.iter().max().ok_or_else(|| CliError::Usage("--caps is empty".into()))?;
    if w.caps.windows(2).any(|c| c[1] <= c[0]) {
        return Err(CliError::Usage(format!("--caps must be strictly increasing, got {:?}", w.caps)));
    }
    let seq = nonequivalence_witness(&sa, &sb, w.coordinate, cap)?;
    let rep = witness_probe(&seq, &w.caps, &ctx.probe_options())?;
    let radii: Vec<f64> = w.caps.iter().map(|&c| c as f64).collect();
    let tables = [("witness", witness_csv(&seq)), ("envelope", rep.envelope_csv())];
    let summary = probe_summary(&rep);
    let code = probe_code(&rep);
    let inputs: [&Path; 2] = [&w.a, &w.b];
    ctx.output.emit(&ctx.config("witness", &inputs, &radii), &WitnessResult { witness: seq, probe: rep }, &tables, &summary)?;
    Ok(code)
}

