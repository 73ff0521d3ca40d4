//! Lower-bound estimators for the injective norm.
//!
//! Every estimate is the exact overlap of the returned unit factors, so it
//! is a certified lower bound on the injective norm.

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::ensembles::{uniform_factors_with, uniform_sphere_with, DistKind, EntryDistribution, SeedSpec};
use crate::error::{Error, Result};
use crate::tensor::{
    frobenius_norm, is_symmetric, norm2, partial_contraction, rank_one_overlap, DenseTensor, FactorTuple,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Alternating maximization over one factor at a time.
    Als,
    /// Noisy projected gradient ascent on the product of spheres.
    Pga,
    /// Power iteration on a single vector, for symmetric tensors.
    SymmetricPower,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Als => "als",
            Method::Pga => "pga",
            Method::SymmetricPower => "symmetric",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimatorConfig {
    pub method: Method,
    /// Sweeps (ALS) or iterations (PGA, symmetric power).
    pub max_iters: usize,
    pub rel_tol: f64,
    pub restarts: usize,
    /// PGA step length; the gradient is rescaled to unit norm first.
    pub step_size: f64,
    pub noise_initial: f64,
    pub noise_decay: f64,
    pub seed: SeedSpec,
    /// Keep the objective after every update.
    pub record_trace: bool,
}

impl EstimatorConfig {
    pub fn als(seed: SeedSpec) -> Self {
        Self {
            method: Method::Als,
            max_iters: 500,
            rel_tol: 1e-10,
            restarts: 1,
            step_size: 0.1,
            noise_initial: 0.05,
            noise_decay: 0.97,
            seed,
            record_trace: false,
        }
    }

    pub fn pga(seed: SeedSpec) -> Self {
        Self { method: Method::Pga, max_iters: 2000, ..Self::als(seed) }
    }

    pub fn symmetric(seed: SeedSpec) -> Self {
        Self { method: Method::SymmetricPower, max_iters: 2000, ..Self::als(seed) }
    }

    pub fn for_method(method: Method, seed: SeedSpec) -> Self {
        match method {
            Method::Als => Self::als(seed),
            Method::Pga => Self::pga(seed),
            Method::SymmetricPower => Self::symmetric(seed),
        }
    }

    pub fn with_restarts(mut self, restarts: usize) -> Self {
        self.restarts = restarts;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Domain(m.to_string()));
        if self.max_iters == 0 {
            return bad("max_iters must be at least 1");
        }
        if !(self.rel_tol > 0.0) {
            return bad("rel_tol must be positive");
        }
        if self.restarts == 0 {
            return bad("restarts must be at least 1");
        }
        if self.method == Method::Pga {
            if !(self.step_size > 0.0) || !(self.noise_initial >= 0.0) {
                return bad("step_size must be positive and noise_initial nonnegative");
            }
            if !(self.noise_decay > 0.0 && self.noise_decay < 1.0) {
                return bad("noise_decay must lie in (0, 1)");
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimateResult {
    pub value: f64,
    #[serde(skip)]
    pub factors: FactorTuple,
    pub iterations_used: usize,
    pub converged: bool,
    pub restart_values: Vec<f64>,
    /// Objective traces, one per restart, when requested.
    pub traces: Vec<Vec<f64>>,
}

impl EstimateResult {
    /// `max - min` over restarts.
    pub fn dispersion(&self) -> f64 {
        let max = self.restart_values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let min = self.restart_values.iter().cloned().fold(f64::INFINITY, f64::min);
        max - min
    }
}

struct Run {
    value: f64,
    factors: FactorTuple,
    iterations: usize,
    converged: bool,
    trace: Vec<f64>,
}

fn normalized(v: &[Complex64]) -> Option<Vec<Complex64>> {
    let n = norm2(v);
    (n > 0.0 && n.is_finite()).then(|| v.iter().map(|z| z / n).collect())
}

fn finish(t: &DenseTensor, factors: FactorTuple, iterations: usize, converged: bool, trace: Vec<f64>) -> Result<Run> {
    let value = rank_one_overlap(t, &factors)?.norm();
    Ok(Run { value, factors, iterations, converged, trace })
}

fn als_run<R: Rng>(t: &DenseTensor, mut x: FactorTuple, cfg: &EstimatorConfig, rng: &mut R) -> Result<Run> {
    let mut trace = Vec::new();
    if frobenius_norm(t) == 0.0 {
        return finish(t, x, 0, true, trace);
    }
    let mut f = rank_one_overlap(t, &x)?.norm();
    if cfg.record_trace {
        trace.push(f);
    }
    let (mut iterations, mut converged) = (0, false);
    for sweep in 1..=cfg.max_iters {
        let start = f;
        for slot in 0..t.order() {
            let w = partial_contraction(t, &x, slot)?;
            match normalized(&w) {
                Some(u) => {
                    // Best unit vector for this slot: conj(w)/|w|, objective |w|.
                    f = norm2(&w);
                    x.factors[slot] = u.into_iter().map(|z| z.conj()).collect();
                }
                None => {
                    x.factors[slot] = uniform_sphere_with(rng, t.shape()[slot], t.field());
                    f = rank_one_overlap(t, &x)?.norm();
                }
            }
            if cfg.record_trace {
                trace.push(f);
            }
        }
        iterations = sweep;
        if f - start <= cfg.rel_tol * f {
            converged = true;
            break;
        }
    }
    finish(t, x, iterations, converged, trace)
}

fn pga_run<R: Rng>(t: &DenseTensor, mut x: FactorTuple, cfg: &EstimatorConfig, rng: &mut R) -> Result<Run> {
    let mut trace = Vec::new();
    if frobenius_norm(t) == 0.0 {
        return finish(t, x, 0, true, trace);
    }
    let noise = EntryDistribution::unit(DistKind::gaussian(t.field()));
    let mut f = rank_one_overlap(t, &x)?.norm();
    let mut best = (f, x.clone());
    if cfg.record_trace {
        trace.push(f);
    }
    let (mut iterations, mut converged) = (0, false);
    let mut sigma = cfg.noise_initial;
    for it in 1..=cfg.max_iters {
        let start = f;
        for slot in 0..t.order() {
            let w = partial_contraction(t, &x, slot)?;
            let s: Complex64 = w.iter().zip(&x.factors[slot]).map(|(a, b)| a * b).sum();
            let phase = if s.norm() > 0.0 { s / s.norm() } else { Complex64::new(1.0, 0.0) };
            let scale = cfg.step_size / s.norm().max(norm2(&w)).max(f64::MIN_POSITIVE);
            let moved: Vec<Complex64> = x.factors[slot]
                .iter()
                .zip(&w)
                .map(|(xi, wi)| xi + wi.conj() * phase * scale + noise.sample(rng) * sigma)
                .collect();
            x.factors[slot] = match normalized(&moved) {
                Some(u) => u,
                None => uniform_sphere_with(rng, t.shape()[slot], t.field()),
            };
        }
        f = rank_one_overlap(t, &x)?.norm();
        if f > best.0 {
            best = (f, x.clone());
        }
        if cfg.record_trace {
            trace.push(f);
        }
        iterations = it;
        if sigma <= cfg.rel_tol.sqrt() && (f - start).abs() <= cfg.rel_tol * f {
            converged = true;
            break;
        }
        sigma *= cfg.noise_decay;
    }
    finish(t, best.1, iterations, converged, trace)
}

fn symmetric_run<R: Rng>(b: &DenseTensor, x0: Vec<Complex64>, cfg: &EstimatorConfig, rng: &mut R) -> Result<Run> {
    let (p, d, field) = (b.order(), b.shape()[0], b.field());
    let mut x = x0;
    let mut trace = Vec::new();
    if frobenius_norm(b) == 0.0 {
        return finish(b, FactorTuple::replicated(field, &x, p), 0, true, trace);
    }
    let objective = |x: &[Complex64]| rank_one_overlap(b, &FactorTuple::replicated(field, x, p)).map(|z| z.norm());
    let mut f = objective(&x)?;
    let mut best = (f, x.clone());
    if cfg.record_trace {
        trace.push(f);
    }
    let (mut iterations, mut converged) = (0, false);
    for it in 1..=cfg.max_iters {
        let w = partial_contraction(b, &FactorTuple::replicated(field, &x, p), 0)?;
        let next: Vec<Complex64> = match normalized(&w) {
            Some(u) => u.into_iter().map(|z| z.conj()).collect(),
            None => uniform_sphere_with(rng, d, field),
        };
        // Successive iterates agree up to a phase once the direction has settled.
        let overlap = next.iter().zip(&x).map(|(a, b)| a.conj() * b).sum::<Complex64>().norm();
        x = next;
        f = objective(&x)?;
        if f > best.0 {
            best = (f, x.clone());
        }
        if cfg.record_trace {
            trace.push(f);
        }
        iterations = it;
        if 1.0 - overlap <= cfg.rel_tol {
            converged = true;
            break;
        }
    }
    finish(b, FactorTuple::replicated(field, &best.1, p), iterations, converged, trace)
}

fn single_run(t: &DenseTensor, cfg: &EstimatorConfig, restart: u64) -> Result<Run> {
    let mut rng = cfg.seed.derive(restart).rng();
    match cfg.method {
        Method::Als => {
            let x = uniform_factors_with(&mut rng, t.field(), t.shape());
            als_run(t, x, cfg, &mut rng)
        }
        Method::Pga => {
            let x = uniform_factors_with(&mut rng, t.field(), t.shape());
            pga_run(t, x, cfg, &mut rng)
        }
        Method::SymmetricPower => {
            let x = uniform_sphere_with(&mut rng, t.shape()[0], t.field());
            symmetric_run(t, x, cfg, &mut rng)
        }
    }
}

fn check_input(t: &DenseTensor, cfg: &EstimatorConfig) -> Result<()> {
    cfg.validate()?;
    if cfg.method == Method::SymmetricPower && !is_symmetric(t, 1e-9)? {
        return Err(Error::Domain("symmetric estimation needs a symmetric tensor".into()));
    }
    Ok(())
}

fn collect(runs: Vec<Run>) -> EstimateResult {
    let mut best = 0;
    for (i, r) in runs.iter().enumerate() {
        if r.value > runs[best].value {
            best = i;
        }
    }
    let restart_values = runs.iter().map(|r| r.value).collect();
    let traces = runs.iter().map(|r| r.trace.clone()).filter(|t| !t.is_empty()).collect();
    let b = &runs[best];
    EstimateResult {
        value: b.value,
        factors: b.factors.clone(),
        iterations_used: b.iterations,
        converged: b.converged,
        restart_values,
        traces,
    }
}

fn single(t: &DenseTensor, cfg: &EstimatorConfig, method: Method) -> Result<EstimateResult> {
    let cfg = EstimatorConfig { method, ..cfg.clone() };
    check_input(t, &cfg)?;
    Ok(collect(vec![single_run(t, &cfg, 0)?]))
}

/// One alternating-maximization run from a random start.
pub fn als_estimate(t: &DenseTensor, cfg: &EstimatorConfig) -> Result<EstimateResult> {
    single(t, cfg, Method::Als)
}

/// One noisy projected gradient ascent run from a random start.
pub fn pga_estimate(t: &DenseTensor, cfg: &EstimatorConfig) -> Result<EstimateResult> {
    single(t, cfg, Method::Pga)
}

/// One symmetric power-iteration run from a random start.
pub fn symmetric_estimate(b: &DenseTensor, cfg: &EstimatorConfig) -> Result<EstimateResult> {
    single(b, cfg, Method::SymmetricPower)
}

/// Best of `cfg.restarts` independent runs. Restart `r` draws from
/// `cfg.seed.derive(r)`, so results do not depend on scheduling.
pub fn multi_restart(t: &DenseTensor, cfg: &EstimatorConfig) -> Result<EstimateResult> {
    check_input(t, cfg)?;
    let runs = (0..cfg.restarts as u64).into_par_iter().map(|r| single_run(t, cfg, r)).collect::<Result<Vec<_>>>()?;
    Ok(collect(runs))
}

/// Top singular value of an order-2 tensor.
///
/// The Gram matrix is squared repeatedly (with rescaling) until it is
/// numerically rank one on its top eigenspace; a column of the result is
/// then polished by a few power steps and the Rayleigh quotient returned.
pub fn matrix_oracle(t: &DenseTensor) -> Result<f64> {
    if t.order() != 2 {
        return Err(Error::Domain(format!("matrix oracle needs p = 2, got {}", t.order())));
    }
    let (m, n) = (t.shape()[0], t.shape()[1]);
    let a = t.data();
    if frobenius_norm(t) == 0.0 {
        return Ok(0.0);
    }
    // G = A^H A, n x n.
    let mut g = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        for j in 0..n {
            g[i * n + j] = (0..m).map(|r| a[r * n + i].conj() * a[r * n + j]).sum();
        }
    }
    let gram = g.clone();
    let matmul = |x: &[Complex64], y: &[Complex64]| {
        let mut out = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for k in 0..n {
                let xik = x[i * n + k];
                for j in 0..n {
                    out[i * n + j] += xik * y[k * n + j];
                }
            }
        }
        out
    };
    for _ in 0..60 {
        g = matmul(&g, &g);
        let s = norm2(&g);
        g.iter_mut().for_each(|z| *z /= s);
    }
    let col = (0..n)
        .map(|j| (0..n).map(|i| g[i * n + j]).collect::<Vec<_>>())
        .max_by(|u, v| norm2(u).total_cmp(&norm2(v)))
        .expect("n >= 1");
    let apply =
        |v: &[Complex64]| -> Vec<Complex64> { (0..n).map(|i| (0..n).map(|j| gram[i * n + j] * v[j]).sum()).collect() };
    let mut v = normalized(&col).ok_or_else(|| Error::Domain("degenerate Gram matrix".into()))?;
    for _ in 0..20 {
        let gv = apply(&v);
        match normalized(&gv) {
            Some(u) => v = u,
            None => break,
        }
    }
    let rayleigh = crate::tensor::inner(&v, &apply(&v)).re;
    Ok(rayleigh.max(0.0).sqrt())
}
