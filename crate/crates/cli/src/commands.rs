//! Subcommand bodies. Each returns its output text; writing is done by the caller.

use std::path::PathBuf;

use anyhow::{anyhow, bail, ensure, Context, Result};
use serde::Serialize;

use injnorm::bounds::{
    asymptotic_bound, bound, comparison_bounds, optimal_k, AsymptoticQuery, BoundQuery, ComparisonParams,
    DeterministicVariant, EntryLaw, Regime, COMPARISON_ROWS,
};
use injnorm::ensembles::{sample_model, DistKind, EntryDistribution, ModelFamily, ModelSpec, SeedSpec};
use injnorm::montecarlo::{
    estimate_tensor, expectation_sweep, sweep_realization, verify_deterministic_bound, Normalize, VerificationReport,
    VerifyOptions,
};
use injnorm::optimize::{multi_restart, EstimateResult, EstimatorConfig, Method};
use injnorm::tensor::{outer_product, DenseTensor, FactorTuple, Field};

use crate::args::*;
use crate::svg::{line_plot, Series};
use crate::table::{Cell, Table};

/// Output of one subcommand.
#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub text: String,
    pub svg: Option<String>,
    /// Process exit code; nonzero only for failed verifications.
    pub code: i32,
    /// Side files (tensor dumps, traces) to write with the main output.
    pub files: Vec<(PathBuf, String)>,
}

impl Output {
    fn table(t: &Table, json: bool) -> Self {
        Self { text: if json { t.to_json() } else { t.to_csv() }, svg: None, code: 0, files: Vec::new() }
    }
}

/// Expands `--dims` flags into shapes.
pub fn parse_shapes(dims: &[String], p: Option<usize>) -> Result<Vec<Vec<usize>>> {
    ensure!(!dims.is_empty(), "--dims is required");
    let parse = |s: &str| -> Result<Vec<usize>> {
        s.split(',')
            .map(|v| {
                let n: usize = v.trim().parse().with_context(|| format!("bad dimension {v:?}"))?;
                ensure!(n >= 1, "dimensions must be positive");
                Ok(n)
            })
            .collect()
    };
    match p {
        Some(0) => bail!("--p must be at least 1"),
        Some(p) => {
            let mut out = Vec::new();
            for s in dims {
                out.extend(parse(s)?.into_iter().map(|d| vec![d; p]));
            }
            Ok(out)
        }
        None => dims.iter().map(|s| parse(s)).collect(),
    }
}

/// Parses `a:b` into an inclusive range.
pub fn parse_range(s: &str) -> Result<Vec<usize>> {
    let (a, b) = s.split_once(':').ok_or_else(|| anyhow!("expected a range a:b, got {s:?}"))?;
    let (a, b): (usize, usize) = (a.trim().parse()?, b.trim().parse()?);
    ensure!(a <= b, "empty range {s:?}");
    Ok((a..=b).collect())
}

pub fn shape_label(dims: &[usize]) -> String {
    dims.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("x")
}

fn model_field(model: ModelName) -> Field {
    match model {
        ModelName::AReal => Field::Real,
        _ => Field::Complex,
    }
}

fn dist_kind(dist: DistName, field: Field) -> Result<DistKind> {
    let kind = match dist {
        DistName::Gaussian => DistKind::gaussian(field),
        DistName::Rademacher => DistKind::Rademacher,
        DistName::Uniform => DistKind::UniformSym,
        DistName::Steinhaus => DistKind::Steinhaus,
    };
    ensure!(kind.field() == field, "distribution {} does not match the {} field", kind.name(), field.name());
    Ok(kind)
}

pub fn build_spec(model: ModelName, dims: &[usize], rank: usize, dist: DistName) -> Result<ModelSpec> {
    let field = model_field(model);
    let kind = dist_kind(dist, field)?;
    let cubic = |name: &str| -> Result<(usize, usize)> {
        ensure!(dims.iter().all(|&d| d == dims[0]), "model {name} needs a cubic shape, got {}", shape_label(dims));
        Ok((dims[0], dims.len()))
    };
    let spec = match model {
        ModelName::AReal | ModelName::AComplex => ModelSpec::a(field, dims, kind),
        ModelName::S => {
            let (d, p) = cubic("s")?;
            ModelSpec::s(d, p, kind)
        }
        ModelName::STilde => {
            let (d, p) = cubic("s-tilde")?;
            ModelSpec::s_tilde(d, p, kind)
        }
        ModelName::BoundedRank => {
            let (d, p) = cubic("bounded-rank")?;
            ModelSpec::b(d, p, rank, kind)
        }
    };
    spec.validate()?;
    Ok(spec)
}

fn specs(m: &ModelArgs) -> Result<Vec<ModelSpec>> {
    parse_shapes(&m.dims, m.p)?.iter().map(|dims| build_spec(m.model, dims, m.rank, m.dist)).collect()
}

pub fn cmd_bound(a: &BoundArgs) -> Result<Output> {
    let mut t = Table::new(["model", "dims", "k", "log_value", "value", "evaluations"]);
    for spec in specs(&a.model)? {
        let query = match a.k {
            Some(k) => BoundQuery::with_k(spec.clone(), k),
            None => BoundQuery::optimize(spec.clone()),
        };
        let r = bound(&query)?;
        for msg in &r.diagnostics {
            eprintln!("warning: {msg}");
        }
        t.push(vec![
            a.model.model.label().into(),
            shape_label(&spec.dims).into(),
            r.k_used.map_or(Cell::Empty, Cell::Int),
            r.log_value.into(),
            r.value.into(),
            r.evaluations.into(),
        ]);
    }
    Ok(Output::table(&t, a.output.json))
}

fn family(model: ModelName) -> ModelFamily {
    match model {
        ModelName::AReal | ModelName::AComplex => ModelFamily::A,
        ModelName::S => ModelFamily::S,
        ModelName::STilde => ModelFamily::STilde,
        ModelName::BoundedRank => ModelFamily::B,
    }
}

/// Leading-order growth of the limit in `p`.
fn normalizer(model: ModelName, p: usize) -> Option<f64> {
    let p = p as f64;
    match family(model) {
        ModelFamily::A => Some((p * p.ln()).sqrt()),
        ModelFamily::S | ModelFamily::STilde => Some(p.ln().sqrt()),
        ModelFamily::B => None,
    }
}

pub fn cmd_asymptotic(a: &AsymptoticArgs) -> Result<Output> {
    let ps: Vec<usize> = match &a.p_range {
        Some(r) => parse_range(r)?,
        None => a.p.clone(),
    };
    let fam = family(a.model);
    let ps: Vec<Option<usize>> = match (ps.is_empty(), fam) {
        (true, ModelFamily::B) => vec![None],
        (true, _) => bail!("--p or --p-range is required for model {}", a.model.label()),
        (false, _) => ps.into_iter().map(Some).collect(),
    };
    if a.eta.is_some() {
        ensure!(fam == ModelFamily::A, "--eta applies to family A only");
        ensure!(ps.len() == 1, "--eta needs a single order");
    }
    let mut header = vec!["model", "p", "eta", "alpha", "log_value", "value"];
    if a.normalizers {
        header.extend(["normalizer", "ratio"]);
    }
    let mut t = Table::new(header);
    for p in ps {
        let q = AsymptoticQuery { family: fam, field: model_field(a.model), p: p.unwrap_or(0), eta: a.eta.clone() };
        let r = asymptotic_bound(&q)?;
        let eta = a
            .eta
            .as_ref()
            .map_or(String::new(), |e| e.iter().map(|x| crate::table::fmt_g(*x)).collect::<Vec<_>>().join(";"));
        let mut row = vec![
            a.model.label().into(),
            p.map_or(Cell::Empty, Cell::from),
            eta.into(),
            r.alpha.into(),
            r.log_value.into(),
            r.value.into(),
        ];
        if a.normalizers {
            let n = p.and_then(|p| normalizer(a.model, p));
            row.push(n.into());
            row.push(n.map(|n| r.value / n).into());
        }
        t.push(row);
    }
    Ok(Output::table(&t, a.output.json))
}

fn normalize(n: NormalizeName) -> Normalize {
    match n {
        NormalizeName::None => Normalize::None,
        NormalizeName::Hs => Normalize::Hs,
    }
}

/// `sqrt(E‖T‖_F^2)` for unit-variance entry laws, where it is known in closed form.
fn expected_hs(spec: &ModelSpec) -> Option<f64> {
    let n: f64 = spec.dims.iter().map(|&d| d as f64).product();
    let s2 = spec.dist.scale * spec.dist.scale;
    match spec.family {
        ModelFamily::A => Some((n.powf(1.0 - 1.0 / spec.order() as f64) * s2).sqrt()),
        ModelFamily::B => Some((spec.rank as f64 * s2).sqrt()),
        ModelFamily::S | ModelFamily::STilde => None,
    }
}

/// Optimal-k bound on the expected norm, rescaled for normalized samples.
fn bound_column(spec: &ModelSpec, norm: NormalizeName) -> Result<Option<f64>> {
    let b = optimal_k(&BoundQuery::optimize(spec.clone()))?.value;
    Ok(match norm {
        NormalizeName::None => Some(b),
        NormalizeName::Hs => expected_hs(spec).map(|h| b / h),
    })
}

fn estimator(method: MethodName, seed: u64, restarts: usize, max_iters: Option<usize>) -> EstimatorConfig {
    let m = match method {
        MethodName::Als => Method::Als,
        MethodName::Pga => Method::Pga,
    };
    let mut cfg = EstimatorConfig::for_method(m, SeedSpec::new(seed)).with_restarts(restarts);
    if let Some(n) = max_iters {
        cfg.max_iters = n;
    }
    cfg
}

fn push_traces(t: &mut Table, dims: &[usize], realization: usize, est: &EstimateResult) {
    for (restart, trace) in est.traces.iter().enumerate() {
        for (it, &f) in trace.iter().enumerate() {
            t.push(vec![shape_label(dims).into(), realization.into(), restart.into(), it.into(), f.into()]);
        }
    }
}

pub fn cmd_estimate(a: &EstimateArgs) -> Result<Output> {
    let mut header = vec!["model", "dims", "method", "realizations", "restarts", "mean", "stderr", "std", "dispersion"];
    if a.with_bound {
        header.push("bound");
    }
    let mut t = Table::new(header);
    let mut traces = Table::new(["dims", "realization", "restart", "iteration", "objective"]);
    let mut files = Vec::new();
    let mut cfg = estimator(a.method, a.seed, a.restarts, a.max_iters);
    cfg.validate()?;
    let norm = normalize(a.normalize);

    if let Some(path) = &a.load {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let tensor = DenseTensor::from_text(&text).with_context(|| format!("parsing {}", path.display()))?;
        let dims = tensor.shape().to_vec();
        cfg.record_trace = a.traces.is_some();
        let est = estimate_tensor(tensor, &cfg, norm)?;
        push_traces(&mut traces, &dims, 0, &est);
        t.push(vec![
            "loaded".into(),
            shape_label(&dims).into(),
            cfg.method.name().into(),
            1usize.into(),
            a.restarts.into(),
            est.value.into(),
            0.0.into(),
            0.0.into(),
            est.dispersion().into(),
        ]);
    } else {
        for (i, spec) in specs(&a.model)?.iter().enumerate() {
            let seed = SeedSpec::new(a.seed).derive(i as u64);
            let s = expectation_sweep(spec, &cfg, a.realizations, seed, norm)?;
            let mut row = vec![
                a.model.model.label().into(),
                shape_label(&spec.dims).into(),
                cfg.method.name().into(),
                a.realizations.into(),
                a.restarts.into(),
                s.mean.into(),
                s.stderr.into(),
                s.std.into(),
                s.mean_dispersion.into(),
            ];
            if a.with_bound {
                row.push(bound_column(spec, a.normalize)?.into());
            }
            t.push(row);
            if a.dump.is_none() && a.traces.is_none() {
                continue;
            }
            // Re-run each realization serially to collect the side outputs.
            for r in 0..a.realizations {
                let (tensor, est_seed) = sweep_realization(spec, seed, r as u64, norm)?;
                if let Some(dir) = &a.dump {
                    files.push((dir.join(format!("{}-r{r}.tensor", shape_label(&spec.dims))), tensor.to_text()));
                }
                if a.traces.is_some() {
                    let est =
                        multi_restart(&tensor, &EstimatorConfig { seed: est_seed, record_trace: true, ..cfg.clone() })?;
                    push_traces(&mut traces, &spec.dims, r, &est);
                }
            }
        }
    }
    if let Some(path) = &a.traces {
        files.push((path.clone(), traces.to_csv()));
    }
    Ok(Output { files, ..Output::table(&t, a.output.json) })
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyInstance {
    pub index: usize,
    pub model: String,
    pub dims: Vec<usize>,
    pub k: u64,
    pub report: VerificationReport,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifySummary {
    pub all_pass: bool,
    pub passed: usize,
    pub total: usize,
    pub samples: usize,
    pub slack_sigmas: f64,
    pub corrupt_prefactor: bool,
    pub instances: Vec<VerifyInstance>,
}

struct Instance {
    model: &'static str,
    tensor: DenseTensor,
    k: u64,
    variant: DeterministicVariant,
}

fn variant_of(model: ModelName, alt: bool) -> DeterministicVariant {
    match model {
        ModelName::AReal => DeterministicVariant::RealAsym,
        ModelName::AComplex | ModelName::BoundedRank => DeterministicVariant::ComplexAsym,
        ModelName::S | ModelName::STilde if alt => DeterministicVariant::ComplexAsym,
        ModelName::S | ModelName::STilde => DeterministicVariant::ComplexSym,
    }
}

/// Mixed families, `2 <= d <= 4`, `1 <= p <= 3`, `1 <= k <= 4`.
fn default_grid(a: &VerifyArgs) -> Result<Vec<Instance>> {
    use rand::Rng;
    const FAMILIES: [ModelName; 4] = [ModelName::AReal, ModelName::AComplex, ModelName::S, ModelName::STilde];
    let root = SeedSpec::new(a.seed);
    (0..a.instances)
        .map(|i| {
            let mut rng = root.derive(0).derive(i as u64).rng();
            let model = FAMILIES[i % 4];
            let p = rng.random_range(1..=3usize);
            let dims: Vec<usize> = match model {
                ModelName::AReal | ModelName::AComplex => (0..p).map(|_| rng.random_range(2..=4)).collect(),
                _ => vec![rng.random_range(2..=4); p],
            };
            let k = a.k.unwrap_or_else(|| rng.random_range(1..=4));
            let spec = build_spec(model, &dims, 1, DistName::Gaussian)?;
            let tensor = sample_model(&spec, root.derive(1).derive(i as u64))?;
            Ok(Instance { model: model.label(), tensor, k, variant: variant_of(model, (i / 4) % 2 == 1) })
        })
        .collect()
}

fn custom_grid(a: &VerifyArgs) -> Result<Vec<Instance>> {
    let model = a.model.unwrap_or(ModelName::AReal);
    let ks: Vec<u64> = a.k.map_or((1..=4).collect(), |k| vec![k]);
    let root = SeedSpec::new(a.seed);
    let mut out = Vec::new();
    for dims in parse_shapes(&a.dims, a.p)? {
        let spec = build_spec(model, &dims, 1, DistName::Gaussian)?;
        for &k in &ks {
            let tensor = sample_model(&spec, root.derive(1).derive(out.len() as u64))?;
            out.push(Instance { model: model.label(), tensor, k, variant: variant_of(model, false) });
        }
    }
    Ok(out)
}

/// Rank-one Gaussian matrix; the moment inequality is an equality for it.
fn negative_control(seed: SeedSpec) -> Result<Instance> {
    let mut rng = seed.rng();
    let g = EntryDistribution::unit(DistKind::GaussianReal);
    let factors = (0..2).map(|_| (0..3).map(|_| g.sample(&mut rng)).collect()).collect();
    let x = FactorTuple::new(Field::Real, factors);
    Ok(Instance {
        model: "rank-one-control",
        tensor: outer_product(&x)?,
        k: 3,
        variant: DeterministicVariant::RealAsym,
    })
}

pub fn cmd_verify(a: &VerifyArgs) -> Result<Output> {
    ensure!(a.slack >= 0.0, "--slack must be nonnegative");
    let mut grid = if a.dims.is_empty() {
        ensure!(a.model.is_none() && a.p.is_none(), "--model and --p need --dims");
        default_grid(a)?
    } else {
        custom_grid(a)?
    };
    if a.corrupt_prefactor {
        grid.push(negative_control(SeedSpec::new(a.seed).derive(2))?);
    }
    let root = SeedSpec::new(a.seed).derive(3);
    let mut instances = Vec::with_capacity(grid.len());
    for (i, inst) in grid.into_iter().enumerate() {
        let opts =
            VerifyOptions { variant: inst.variant, restarts: a.restarts, corrupt_prefactor: a.corrupt_prefactor };
        let report =
            verify_deterministic_bound(&inst.tensor, inst.k, a.samples, a.slack, root.derive(i as u64), &opts)?;
        instances.push(VerifyInstance {
            index: i,
            model: inst.model.into(),
            dims: inst.tensor.shape().to_vec(),
            k: inst.k,
            report,
        });
    }
    let passed = instances.iter().filter(|i| i.report.pass).count();
    let summary = VerifySummary {
        all_pass: passed == instances.len(),
        passed,
        total: instances.len(),
        samples: a.samples,
        slack_sigmas: a.slack,
        corrupt_prefactor: a.corrupt_prefactor,
        instances,
    };
    let mut text = serde_json::to_string_pretty(&summary)?;
    text.push('\n');
    Ok(Output { text, svg: None, code: if summary.all_pass { 0 } else { 1 }, files: Vec::new() })
}

pub fn parse_regime(s: &str) -> Result<Regime> {
    if s == "dinf" {
        return Ok(Regime::DInfinity);
    }
    let d = s
        .strip_prefix("d=")
        .and_then(|d| d.parse::<usize>().ok())
        .filter(|&d| d >= 1)
        .ok_or_else(|| anyhow!("--regime must be dinf or d=N, got {s:?}"))?;
    Ok(Regime::Finite(d))
}

pub fn cmd_compare(a: &CompareArgs) -> Result<Output> {
    let regime = parse_regime(&a.regime)?;
    let ps = parse_range(&a.p_range)?;
    let law = match a.dist {
        LawName::Gaussian => EntryLaw::Gaussian,
        LawName::Rigid => EntryLaw::Rigid,
    };
    let params = ComparisonParams { epsilon: a.epsilon, boedihardjo_c: a.c };
    let columns = ps.iter().map(|&p| comparison_bounds(regime, law, p, params)).collect::<Result<Vec<_>, _>>()?;
    let mut header = vec!["bound".to_string()];
    header.extend(ps.iter().map(|p| format!("p={p}")));
    header.push("note".into());
    let mut t = Table::new(header);
    for (row, name) in COMPARISON_ROWS.iter().enumerate() {
        let mut cells = vec![Cell::from(*name)];
        cells.extend(columns.iter().map(|col| col[row].result.as_ref().map_or(Cell::Dash, |r| Cell::Num(r.value))));
        cells.push(Cell::from(columns.first().map_or("", |col| col[row].note)));
        t.push(cells);
    }
    Ok(Output::table(&t, a.output.json))
}

/// Realization and restart counts for a figure.
fn figure_counts(a: &FigureArgs) -> (usize, usize) {
    let (full_real, full_rest) = match a.name {
        FigureName::Steinhaus => (64, 35),
        FigureName::BoundedRankSmall | FigureName::BoundedRankR25 => (40, 35),
    };
    let (r, s) = if a.full { (full_real, full_rest) } else { (16, 5) };
    (a.realizations.unwrap_or(r), a.restarts.unwrap_or(s))
}

pub fn cmd_figure(a: &FigureArgs) -> Result<Output> {
    ensure!(a.p >= 2, "--p must be at least 2");
    let default_grid: &[usize] = match a.name {
        FigureName::Steinhaus => &[2, 4, 8, 16, 24, 32],
        _ => &[4, 8, 16, 32, 64],
    };
    let grid = a.dims.clone().unwrap_or_else(|| default_grid.to_vec());
    ensure!(!grid.is_empty() && grid.iter().all(|&d| d >= 1), "--dims must list positive sides");
    let (realizations, restarts) = figure_counts(a);
    if a.full {
        eprintln!(
            "warning: reference-scale run ({realizations} realizations, {restarts} restarts); this can take hours"
        );
    }
    let norm = normalize(a.normalize);
    let root = SeedSpec::new(a.seed);
    let spec_for = |d: usize| -> Result<ModelSpec> {
        match a.name {
            FigureName::Steinhaus => {
                ensure!(a.dist.is_none(), "the steinhaus figure fixes its distribution");
                build_spec(ModelName::AComplex, &vec![d; a.p], 1, DistName::Steinhaus)
            }
            FigureName::BoundedRankSmall => {
                build_spec(ModelName::BoundedRank, &vec![d; a.p], 3, a.dist.unwrap_or(DistName::Gaussian))
            }
            FigureName::BoundedRankR25 => {
                build_spec(ModelName::BoundedRank, &vec![d; a.p], 25, a.dist.unwrap_or(DistName::Gaussian))
            }
        }
    };
    let xs: Vec<f64> = grid.iter().map(|&d| d as f64).collect();
    let (t, series, title) = match a.name {
        FigureName::Steinhaus | FigureName::BoundedRankSmall => {
            let small = a.name == FigureName::BoundedRankSmall;
            let mut header = vec!["d", "mean", "stderr", "bound"];
            if small {
                header.push("limit");
            }
            let mut t = Table::new(header);
            let cfg = estimator(MethodName::Pga, a.seed, restarts, a.max_iters);
            let (mut means, mut errs, mut bounds, mut limits) = (vec![], vec![], vec![], vec![]);
            for &d in &grid {
                let spec = spec_for(d)?;
                let s = expectation_sweep(&spec, &cfg, realizations, root.derive(d as u64), norm)?;
                let b = bound_column(&spec, a.normalize)?;
                let mut row = vec![Cell::from(d), s.mean.into(), s.stderr.into(), b.into()];
                means.push(s.mean);
                errs.push(s.stderr);
                bounds.push(b.unwrap_or(f64::NAN));
                if small {
                    let one = asymptotic_bound(&AsymptoticQuery {
                        family: ModelFamily::B,
                        field: Field::Complex,
                        p: a.p,
                        eta: None,
                    })?
                    .value;
                    let limit = match a.normalize {
                        NormalizeName::None => Some(one),
                        NormalizeName::Hs => expected_hs(&spec).map(|h| one / h),
                    };
                    limits.push(limit.unwrap_or(f64::NAN));
                    row.push(limit.into());
                }
                t.push(row);
            }
            let mut series = vec![
                Series { label: "numerics".into(), xs: xs.clone(), ys: means, err: Some(errs), dashed: false },
                Series { label: "finite bound".into(), xs: xs.clone(), ys: bounds, err: None, dashed: true },
            ];
            if small {
                series.push(Series { label: "limit".into(), xs: xs.clone(), ys: limits, err: None, dashed: false });
            }
            let title = if small { "Bounded rank R = 3" } else { "Steinhaus entries" };
            (t, series, title)
        }
        FigureName::BoundedRankR25 => {
            let mut t = Table::new(["d", "als_mean", "als_std", "pga_mean", "pga_std"]);
            let (mut als, mut pga) = ((vec![], vec![]), (vec![], vec![]));
            for &d in &grid {
                let spec = spec_for(d)?;
                let seed = root.derive(d as u64);
                let sa = expectation_sweep(
                    &spec,
                    &estimator(MethodName::Als, a.seed, restarts, a.max_iters),
                    realizations,
                    seed,
                    norm,
                )?;
                let sp = expectation_sweep(
                    &spec,
                    &estimator(MethodName::Pga, a.seed, restarts, a.max_iters),
                    realizations,
                    seed,
                    norm,
                )?;
                t.push(vec![Cell::from(d), sa.mean.into(), sa.std.into(), sp.mean.into(), sp.std.into()]);
                als.0.push(sa.mean);
                als.1.push(sa.std);
                pga.0.push(sp.mean);
                pga.1.push(sp.std);
            }
            let series = vec![
                Series { label: "ALS".into(), xs: xs.clone(), ys: als.0, err: Some(als.1), dashed: false },
                Series { label: "gradient ascent".into(), xs: xs.clone(), ys: pga.0, err: Some(pga.1), dashed: false },
            ];
            (t, series, "Bounded rank R = 25")
        }
    };
    let mut out = Output::table(&t, a.output.json);
    if a.svg.is_some() {
        out.svg = Some(line_plot(title, "d", "injective norm", &series));
    }
    Ok(out)
}
