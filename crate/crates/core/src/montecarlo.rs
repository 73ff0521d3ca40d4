//! Monte Carlo moments over uniform product vectors, empirical checks of the
//! deterministic moment inequalities, and realization sweeps.
//!
//! Samples are split into fixed-size batches with their own streams and
//! combined by a fixed pairwise tree, so results do not depend on the
//! number of worker threads.

use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::{prefactor_log, DeterministicVariant};
use crate::ensembles::{sample_model, uniform_factors_with, uniform_sphere_with, ModelSpec, SeedSpec};
use crate::error::{Error, Result};
use crate::optimize::{multi_restart, EstimateResult, EstimatorConfig};
use crate::tensor::{frobenius_norm, is_symmetric, rank_one_overlap, DenseTensor, FactorTuple, Field};

const BATCH: usize = 4096;

/// Largest moment order accepted in verification mode.
pub const MAX_VERIFY_K: u64 = 16;

/// Pairwise (cascade) summation.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 16 {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// Count, mean and sum of squared deviations of a sample.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Moments {
    n: f64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn of(xs: &[f64]) -> Self {
        let n = xs.len() as f64;
        let mean = pairwise_sum(xs) / n;
        let dev: Vec<f64> = xs.iter().map(|x| (x - mean) * (x - mean)).collect();
        Self { n, mean, m2: pairwise_sum(&dev) }
    }

    fn merge(a: Self, b: Self) -> Self {
        let n = a.n + b.n;
        let delta = b.mean - a.mean;
        Self { n, mean: a.mean + delta * b.n / n, m2: a.m2 + b.m2 + delta * delta * a.n * b.n / n }
    }

    fn tree(parts: &[Self]) -> Self {
        match parts.len() {
            1 => parts[0],
            n => Self::merge(Self::tree(&parts[..n / 2]), Self::tree(&parts[n / 2..])),
        }
    }

    fn stderr(&self) -> f64 {
        if self.n < 2.0 {
            return 0.0;
        }
        (self.m2 / (self.n - 1.0) / self.n).sqrt()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentEstimate {
    pub k: u64,
    pub samples: usize,
    pub mean: f64,
    pub stderr: f64,
    pub seed: SeedSpec,
}

/// Mean and standard error of `|<T, u_1 ⊗ ... ⊗ u_p>|^{2k}` over independent
/// uniform unit vectors of the tensor's field. With `symmetric`, one vector
/// is drawn and used in every slot.
pub fn moment_estimate(
    t: &DenseTensor,
    k: u64,
    n_samples: usize,
    seed: SeedSpec,
    symmetric: bool,
) -> Result<MomentEstimate> {
    if n_samples < 2 || k == 0 {
        return Err(Error::Domain(format!("need n >= 2 and k >= 1, got n={n_samples}, k={k}")));
    }
    if symmetric && !t.is_cubic() {
        return Err(Error::Shape("symmetric moments need a cubic tensor".into()));
    }
    let k_i32 = i32::try_from(k).map_err(|_| Error::Domain(format!("k = {k} too large")))?;
    let n_batches = n_samples.div_ceil(BATCH);
    let parts = (0..n_batches)
        .into_par_iter()
        .map(|b| {
            let len = BATCH.min(n_samples - b * BATCH);
            let mut rng = seed.derive(b as u64).rng();
            let mut vals = Vec::with_capacity(len);
            for _ in 0..len {
                let x = if symmetric {
                    let u = uniform_sphere_with(&mut rng, t.shape()[0], t.field());
                    FactorTuple::replicated(t.field(), &u, t.order())
                } else {
                    uniform_factors_with(&mut rng, t.field(), t.shape())
                };
                vals.push(rank_one_overlap(t, &x)?.norm_sqr().powi(k_i32));
            }
            Ok(Moments::of(&vals))
        })
        .collect::<Result<Vec<_>>>()?;
    let m = Moments::tree(&parts);
    Ok(MomentEstimate { k, samples: n_samples, mean: m.mean, stderr: m.stderr(), seed })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyOptions {
    pub variant: DeterministicVariant,
    /// Restarts for the lower-bound estimate.
    pub restarts: usize,
    /// Halve the prefactor; a negative control that should fail.
    pub corrupt_prefactor: bool,
}

impl VerifyOptions {
    /// Asymmetric variant matching the tensor's field.
    pub fn for_tensor(t: &DenseTensor) -> Self {
        let variant = match t.field() {
            Field::Real => DeterministicVariant::RealAsym,
            Field::Complex => DeterministicVariant::ComplexAsym,
        };
        Self { variant, restarts: 10, corrupt_prefactor: false }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    /// `2k ln(estimate)`.
    pub lhs_log: f64,
    /// `prefactor_log + ln(mean + slack * stderr)`.
    pub rhs_log: f64,
    pub slack_sigmas: f64,
    pub pass: bool,
    pub k: u64,
    pub estimate: f64,
    pub prefactor_log: f64,
    pub variant: DeterministicVariant,
    pub moment: MomentEstimate,
    /// `(prefactor * mean - estimate^{2k}) / (prefactor * stderr)`.
    pub gap_sigmas: f64,
}

impl VerificationReport {
    /// Re-derives the pass flag from the stored fields.
    pub fn recomputed_pass(&self) -> bool {
        let rhs = self.prefactor_log + (self.moment.mean + self.slack_sigmas * self.moment.stderr).ln();
        self.lhs_log <= rhs
    }
}

/// Checks `estimate^{2k} <= prefactor * (mean + slack * stderr)` where the
/// estimate is a multi-restart lower bound on the injective norm.
pub fn verify_deterministic_bound(
    t: &DenseTensor,
    k: u64,
    n_samples: usize,
    slack_sigmas: f64,
    seed: SeedSpec,
    opts: &VerifyOptions,
) -> Result<VerificationReport> {
    if k == 0 || k > MAX_VERIFY_K {
        return Err(Error::Domain(format!("verification needs 1 <= k <= {MAX_VERIFY_K}, got {k}")));
    }
    let symmetric = opts.variant == DeterministicVariant::ComplexSym;
    match (opts.variant, t.field()) {
        (DeterministicVariant::RealAsym, Field::Real) => {}
        (DeterministicVariant::ComplexAsym | DeterministicVariant::ComplexSym, Field::Complex) => {}
        (v, f) => return Err(Error::Shape(format!("variant {v:?} does not apply to a {} tensor", f.name()))),
    }
    if symmetric && !is_symmetric(t, 1e-9)? {
        return Err(Error::Domain("the symmetric variant needs a symmetric tensor".into()));
    }
    let moment = moment_estimate(t, k, n_samples, seed.derive(0), symmetric)?;
    let cfg = EstimatorConfig::als(seed.derive(1)).with_restarts(opts.restarts);
    let estimate = multi_restart(t, &cfg)?.value;
    let mut pre = prefactor_log(opts.variant, t.shape(), k)?;
    if opts.corrupt_prefactor {
        pre -= std::f64::consts::LN_2;
    }
    let lhs_log = 2.0 * k as f64 * estimate.ln();
    let rhs_log = pre + (moment.mean + slack_sigmas * moment.stderr).ln();
    let scale = pre.exp();
    let gap_sigmas = if moment.stderr > 0.0 {
        (scale * moment.mean - estimate.powi(2 * k as i32)) / (scale * moment.stderr)
    } else {
        0.0
    };
    Ok(VerificationReport {
        lhs_log,
        rhs_log,
        slack_sigmas,
        pass: lhs_log <= rhs_log,
        k,
        estimate,
        prefactor_log: pre,
        variant: opts.variant,
        moment,
        gap_sigmas,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalize {
    None,
    /// Divide each sample by its Frobenius norm.
    Hs,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSummary {
    pub realizations: usize,
    pub mean: f64,
    pub stderr: f64,
    /// Sample standard deviation of the per-realization estimates.
    pub std: f64,
    /// Mean over realizations of the restart spread (max - min).
    pub mean_dispersion: f64,
    pub values: Vec<f64>,
}

fn normalized(t: DenseTensor, normalize: Normalize) -> DenseTensor {
    let n = frobenius_norm(&t);
    if normalize == Normalize::Hs && n > 0.0 {
        t.scaled(1.0 / n)
    } else {
        t
    }
}

/// Tensor and estimator seed for realization `r` of `expectation_sweep`.
pub fn sweep_realization(
    spec: &ModelSpec,
    seed: SeedSpec,
    r: u64,
    normalize: Normalize,
) -> Result<(DenseTensor, SeedSpec)> {
    let t = sample_model(spec, seed.derive(2 * r))?;
    Ok((normalized(t, normalize), seed.derive(2 * r + 1)))
}

/// Multi-restart estimate of one fixed tensor, optionally normalized first.
pub fn estimate_tensor(t: DenseTensor, cfg: &EstimatorConfig, normalize: Normalize) -> Result<EstimateResult> {
    multi_restart(&normalized(t, normalize), cfg)
}

/// Averages multi-restart estimates over fresh samples. Realization `r`
/// samples from `seed.derive(2r)` and estimates with `seed.derive(2r + 1)`.
pub fn expectation_sweep(
    spec: &ModelSpec,
    cfg: &EstimatorConfig,
    realizations: usize,
    seed: SeedSpec,
    normalize: Normalize,
) -> Result<SweepSummary> {
    if realizations == 0 {
        return Err(Error::Domain("realizations must be at least 1".into()));
    }
    spec.validate()?;
    let runs = (0..realizations as u64)
        .into_par_iter()
        .map(|r| {
            let (t, est_seed) = sweep_realization(spec, seed, r, normalize)?;
            let est = multi_restart(&t, &EstimatorConfig { seed: est_seed, ..cfg.clone() })?;
            Ok((est.value, est.dispersion()))
        })
        .collect::<Result<Vec<_>>>()?;
    let values: Vec<f64> = runs.iter().map(|r| r.0).collect();
    let disp: Vec<f64> = runs.iter().map(|r| r.1).collect();
    let m = Moments::of(&values);
    let std = if realizations > 1 { (m.m2 / (m.n - 1.0)).sqrt() } else { 0.0 };
    Ok(SweepSummary {
        realizations,
        mean: m.mean,
        stderr: m.stderr(),
        std,
        mean_dispersion: pairwise_sum(&disp) / realizations as f64,
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::{optimal_k, BoundQuery};
    use crate::ensembles::{sample_model_a, sample_model_b, DistKind};
    use crate::tensor::symmetrize;

    #[test]
    fn vector_second_moment() {
        let t = DenseTensor::from_real(&[5], &[0.6, 0.0, 0.8, 0.0, 0.0]).unwrap();
        let m = moment_estimate(&t, 1, 100_000, SeedSpec::new(1), false).unwrap();
        assert!((m.mean - 0.2).abs() <= 3.0 * m.stderr, "{m:?}");
    }

    #[test]
    fn vector_bound_is_an_equality() {
        let spec = ModelSpec::a_gaussian(Field::Complex, &[4]);
        let t = sample_model_a(&spec, SeedSpec::new(2)).unwrap();
        let norm = frobenius_norm(&t);
        for k in 1..=4u64 {
            let m = moment_estimate(&t, k, 100_000, SeedSpec::new(3).derive(k), false).unwrap();
            let pre = prefactor_log(DeterministicVariant::ComplexAsym, &[4], k).unwrap().exp();
            let target = norm.powi(2 * k as i32);
            assert!((pre * m.mean - target).abs() <= 3.0 * pre * m.stderr, "k={k}");
        }
    }

    #[test]
    fn zero_tensor_moments() {
        let t = DenseTensor::zeros(Field::Complex, &[2, 3]).unwrap();
        let m = moment_estimate(&t, 2, 1000, SeedSpec::new(4), false).unwrap();
        assert_eq!((m.mean, m.stderr), (0.0, 0.0));
    }

    #[test]
    fn moments_are_reproducible() {
        let spec = ModelSpec::a_gaussian(Field::Real, &[3, 3]);
        let t = sample_model_a(&spec, SeedSpec::new(5)).unwrap();
        let a = moment_estimate(&t, 2, 10_000, SeedSpec::new(6), false).unwrap();
        let b = moment_estimate(&t, 2, 10_000, SeedSpec::new(6), false).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn symmetric_moments_match_replicated_moments() {
        let spec = ModelSpec::a_gaussian(Field::Complex, &[2, 2, 2]);
        for i in 0..3 {
            let t = sample_model_a(&spec, SeedSpec::new(10 + i)).unwrap();
            let b = symmetrize(&t).unwrap();
            let on_b = moment_estimate(&b, 2, 100_000, SeedSpec::new(20 + i), true).unwrap();
            let on_t = moment_estimate(&t, 2, 100_000, SeedSpec::new(30 + i), true).unwrap();
            let tol = 4.0 * (on_b.stderr.powi(2) + on_t.stderr.powi(2)).sqrt();
            assert!((on_b.mean - on_t.mean).abs() <= tol);
        }
    }

    #[test]
    fn verification_passes_and_negative_control_fails() {
        let spec = ModelSpec::a_gaussian(Field::Real, &[3, 4]);
        let t = sample_model_a(&spec, SeedSpec::new(40)).unwrap();
        let opts = VerifyOptions::for_tensor(&t);
        let r = verify_deterministic_bound(&t, 2, 50_000, 6.0, SeedSpec::new(41), &opts).unwrap();
        assert!(r.pass && r.recomputed_pass() == r.pass);

        // A rank-one tensor makes the inequality an equality.
        let mut rng = SeedSpec::new(42).rng();
        let x = uniform_factors_with(&mut rng, Field::Real, &[3, 3]);
        let r1 = crate::tensor::outer_product(&x).unwrap();
        let bad = VerifyOptions { corrupt_prefactor: true, ..VerifyOptions::for_tensor(&r1) };
        let r = verify_deterministic_bound(&r1, 3, 200_000, 6.0, SeedSpec::new(43), &bad).unwrap();
        assert!(!r.pass && r.recomputed_pass() == r.pass);
    }

    #[test]
    fn verification_input_checks() {
        let t = DenseTensor::zeros(Field::Real, &[2, 2]).unwrap();
        let opts = VerifyOptions::for_tensor(&t);
        assert!(verify_deterministic_bound(&t, 17, 100, 6.0, SeedSpec::new(0), &opts).is_err());
        let sym = VerifyOptions { variant: DeterministicVariant::ComplexSym, ..opts.clone() };
        assert!(verify_deterministic_bound(&t, 1, 100, 6.0, SeedSpec::new(0), &sym).is_err());
    }

    #[test]
    fn sweep_with_one_realization_is_one_run() {
        let spec = ModelSpec::a_gaussian(Field::Complex, &[3, 3, 3]);
        let cfg = EstimatorConfig::als(SeedSpec::new(0)).with_restarts(3);
        let seed = SeedSpec::new(50);
        let s = expectation_sweep(&spec, &cfg, 1, seed, Normalize::None).unwrap();
        let t = sample_model(&spec, seed.derive(0)).unwrap();
        let direct = multi_restart(&t, &EstimatorConfig { seed: seed.derive(1), ..cfg }).unwrap();
        assert_eq!(s.mean, direct.value);
        assert_eq!(s.stderr, 0.0);
    }

    #[test]
    fn rank_one_sweep_matches_factor_norms() {
        let (d, p) = (4, 3);
        let spec = ModelSpec::b(d, p, 1, DistKind::GaussianComplex);
        let cfg = EstimatorConfig::als(SeedSpec::new(0)).with_restarts(2);
        let s = expectation_sweep(&spec, &cfg, 400, SeedSpec::new(60), Normalize::None).unwrap();
        let norms: Vec<f64> = (0..20_000)
            .map(|i| sample_model_b(&spec, SeedSpec::new(61).derive(i)).unwrap().terms[0].norm_product())
            .collect();
        let direct = Moments::of(&norms);
        let tol = 3.0 * (s.stderr.powi(2) + direct.stderr().powi(2)).sqrt();
        assert!((s.mean - direct.mean).abs() <= tol, "{} vs {}", s.mean, direct.mean);
    }

    #[test]
    fn sweep_stays_below_finite_bound() {
        let spec = ModelSpec::b(8, 3, 3, DistKind::GaussianComplex);
        let cfg = EstimatorConfig::als(SeedSpec::new(0)).with_restarts(5);
        let s = expectation_sweep(&spec, &cfg, 20, SeedSpec::new(70), Normalize::None).unwrap();
        let b = optimal_k(&BoundQuery::optimize(spec)).unwrap();
        assert!(s.mean <= b.value + 3.0 * s.stderr);
    }

    #[test]
    fn pairwise_tree_is_exact_on_integers() {
        let xs: Vec<f64> = (1..=10_000).map(|i| i as f64).collect();
        assert_eq!(pairwise_sum(&xs), 50_005_000.0);
        let parts: Vec<Moments> = xs.chunks(37).map(Moments::of).collect();
        let m = Moments::tree(&parts);
        assert!((m.mean - 5000.5).abs() < 1e-9);
    }
}
