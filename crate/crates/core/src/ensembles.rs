//! Seeded samplers for entry distributions, the random tensor models and
//! uniform sphere vectors.
//!
//! Streams come from ChaCha8 keyed by the master seed with the stream id as
//! the ChaCha stream selector, so draws are a pure function of
//! `(master_seed, stream_id, draw counter)`.

use std::f64::consts::{PI, SQRT_2};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tensor::{
    for_each_sorted_index, norm2, orbit_offsets, outer_product, symmetrize, DenseTensor, FactorTuple, Field,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistKind {
    GaussianReal,
    GaussianComplex,
    Rademacher,
    /// Uniform on `[-√3, √3]`.
    UniformSym,
    /// Uniform on the unit circle.
    Steinhaus,
}

impl DistKind {
    pub fn field(self) -> Field {
        match self {
            DistKind::GaussianReal | DistKind::Rademacher | DistKind::UniformSym => Field::Real,
            DistKind::GaussianComplex | DistKind::Steinhaus => Field::Complex,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            DistKind::GaussianReal => "gaussian_real",
            DistKind::GaussianComplex => "gaussian_complex",
            DistKind::Rademacher => "rademacher",
            DistKind::UniformSym => "uniform_sym",
            DistKind::Steinhaus => "steinhaus",
        }
    }

    /// Gaussian kind matching a field.
    pub fn gaussian(field: Field) -> Self {
        match field {
            Field::Real => DistKind::GaussianReal,
            Field::Complex => DistKind::GaussianComplex,
        }
    }
}

/// Entry law; `scale` is the standard deviation of `|entry|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntryDistribution {
    pub kind: DistKind,
    pub scale: f64,
}

impl EntryDistribution {
    pub fn unit(kind: DistKind) -> Self {
        Self { kind, scale: 1.0 }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Complex64 {
        unit_draw(self.kind, rng) * self.scale
    }
}

fn unit_draw<R: Rng + ?Sized>(kind: DistKind, rng: &mut R) -> Complex64 {
    match kind {
        DistKind::GaussianReal => Complex64::new(rng.sample(StandardNormal), 0.0),
        DistKind::GaussianComplex => {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex64::new(re / SQRT_2, im / SQRT_2)
        }
        DistKind::Rademacher => Complex64::new(if rng.random::<bool>() { 1.0 } else { -1.0 }, 0.0),
        DistKind::UniformSym => {
            let r3 = 3f64.sqrt();
            Complex64::new(rng.random_range(-r3..r3), 0.0)
        }
        DistKind::Steinhaus => Complex64::from_polar(1.0, rng.random_range(0.0..2.0 * PI)),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ModelFamily {
    /// Independent entries, any shape.
    A,
    /// Independent up to symmetry.
    S,
    /// Symmetrized independent tensor.
    STilde,
    /// Sum of `R` random rank-one terms.
    B,
}

impl ModelFamily {
    pub fn name(self) -> &'static str {
        match self {
            ModelFamily::A => "A",
            ModelFamily::S => "S",
            ModelFamily::STilde => "S_tilde",
            ModelFamily::B => "B",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub family: ModelFamily,
    pub field: Field,
    pub dims: Vec<usize>,
    /// Number of rank-one terms; only used by family B.
    pub rank: usize,
    pub dist: EntryDistribution,
}

impl ModelSpec {
    pub fn a(field: Field, dims: &[usize], kind: DistKind) -> Self {
        Self { family: ModelFamily::A, field, dims: dims.to_vec(), rank: 1, dist: EntryDistribution::unit(kind) }
    }

    pub fn a_gaussian(field: Field, dims: &[usize]) -> Self {
        Self::a(field, dims, DistKind::gaussian(field))
    }

    pub fn s(d: usize, p: usize, kind: DistKind) -> Self {
        Self {
            family: ModelFamily::S,
            field: Field::Complex,
            dims: vec![d; p],
            rank: 1,
            dist: EntryDistribution::unit(kind),
        }
    }

    pub fn s_tilde(d: usize, p: usize, kind: DistKind) -> Self {
        Self { family: ModelFamily::STilde, ..Self::s(d, p, kind) }
    }

    pub fn b(d: usize, p: usize, rank: usize, kind: DistKind) -> Self {
        Self { family: ModelFamily::B, rank, ..Self::s(d, p, kind) }
    }

    pub fn order(&self) -> usize {
        self.dims.len()
    }

    pub fn is_cubic(&self) -> bool {
        self.dims.windows(2).all(|w| w[0] == w[1])
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidSpec(msg));
        if self.dims.is_empty() || self.dims.contains(&0) {
            return bad(format!("dims must be a nonempty list of positive integers, got {:?}", self.dims));
        }
        if !(self.dist.scale > 0.0) || !self.dist.scale.is_finite() {
            return bad(format!("distribution scale must be positive, got {}", self.dist.scale));
        }
        if self.dist.kind.field() != self.field {
            return bad(format!(
                "distribution {} does not match the {} field",
                self.dist.kind.name(),
                self.field.name()
            ));
        }
        match self.family {
            ModelFamily::A => {}
            ModelFamily::S | ModelFamily::STilde | ModelFamily::B => {
                if self.field != Field::Complex || !self.is_cubic() {
                    return bad(format!("family {} needs complex cubic dims", self.family.name()));
                }
                if self.family == ModelFamily::B && self.rank == 0 {
                    return bad("family B needs rank R >= 1".into());
                }
            }
        }
        Ok(())
    }
}

/// Identifies one reproducible random stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SeedSpec {
    pub master_seed: u64,
    pub stream_id: u64,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl SeedSpec {
    pub fn new(master_seed: u64) -> Self {
        Self { master_seed, stream_id: 0 }
    }

    /// Child stream for sub-task `tag` (realization, restart, batch, ...).
    pub fn derive(&self, tag: u64) -> Self {
        Self {
            master_seed: self.master_seed,
            stream_id: splitmix64(self.stream_id ^ splitmix64(tag.wrapping_add(0x5851_F42D_4C95_7F2D))),
        }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream(self.stream_id);
        rng
    }
}

fn check_family(spec: &ModelSpec, family: ModelFamily) -> Result<()> {
    spec.validate()?;
    if spec.family != family {
        return Err(Error::InvalidSpec(format!(
            "expected a family {} spec, got {}",
            family.name(),
            spec.family.name()
        )));
    }
    Ok(())
}

/// I.i.d. entries with variance `1/(d_1...d_p)^{1/p}`.
pub fn sample_model_a(spec: &ModelSpec, seed: SeedSpec) -> Result<DenseTensor> {
    check_family(spec, ModelFamily::A)?;
    let p = spec.order() as f64;
    let log_n: f64 = spec.dims.iter().map(|&d| (d as f64).ln()).sum();
    let sd = (-log_n / (2.0 * p)).exp() * spec.dist.scale;
    let mut rng = seed.rng();
    let n = crate::tensor::checked_len(&spec.dims)?;
    let data = (0..n).map(|_| unit_draw(spec.dist.kind, &mut rng) * sd).collect();
    DenseTensor::from_data(spec.field, &spec.dims, data)
}

/// One draw per sorted multi-index, written to its whole orbit with the
/// stabilizer weight `sqrt(m_1!...m_k!/p!)`.
pub fn sample_model_s(spec: &ModelSpec, seed: SeedSpec) -> Result<DenseTensor> {
    check_family(spec, ModelFamily::S)?;
    let (d, p) = (spec.dims[0], spec.order());
    let sd = spec.dist.scale / (d as f64).sqrt();
    let mut rng = seed.rng();
    let mut t = DenseTensor::zeros(Field::Complex, &spec.dims)?;
    let strides = t.strides().to_vec();
    let mut data = vec![Complex64::new(0.0, 0.0); t.len()];
    let mut offsets = Vec::new();
    for_each_sorted_index(d, p, |sorted| {
        let gamma = unit_draw(spec.dist.kind, &mut rng) * sd;
        orbit_offsets(sorted, &strides, &mut offsets);
        // The orbit size is p!/(m_1!...m_k!).
        let weight = (1.0 / offsets.len() as f64).sqrt();
        for &o in &offsets {
            data[o] = gamma * weight;
        }
    });
    t = DenseTensor::from_data(Field::Complex, &spec.dims, data)?;
    Ok(t)
}

/// Symmetrization of a family A sample with the same dims and law.
pub fn sample_model_s_tilde(spec: &ModelSpec, seed: SeedSpec) -> Result<DenseTensor> {
    check_family(spec, ModelFamily::STilde)?;
    let companion = ModelSpec { family: ModelFamily::A, ..spec.clone() };
    symmetrize(&sample_model_a(&companion, seed)?)
}

/// A family B tensor together with its rank-one factors.
#[derive(Debug, Clone)]
pub struct BoundedRankSample {
    pub tensor: DenseTensor,
    pub terms: Vec<FactorTuple>,
}

pub fn sample_model_b(spec: &ModelSpec, seed: SeedSpec) -> Result<BoundedRankSample> {
    check_family(spec, ModelFamily::B)?;
    let (d, p) = (spec.dims[0], spec.order());
    let sd = spec.dist.scale / (d as f64).sqrt();
    let mut rng = seed.rng();
    let mut terms = Vec::with_capacity(spec.rank);
    let mut tensor = DenseTensor::zeros(Field::Complex, &spec.dims)?;
    for _ in 0..spec.rank {
        let factors: Vec<Vec<Complex64>> =
            (0..p).map(|_| (0..d).map(|_| unit_draw(spec.dist.kind, &mut rng) * sd).collect()).collect();
        let term = FactorTuple::new(Field::Complex, factors);
        tensor = tensor.add(&outer_product(&term)?)?;
        terms.push(term);
    }
    Ok(BoundedRankSample { tensor, terms })
}

/// Dispatch on the family; family B factors are dropped.
pub fn sample_model(spec: &ModelSpec, seed: SeedSpec) -> Result<DenseTensor> {
    match spec.family {
        ModelFamily::A => sample_model_a(spec, seed),
        ModelFamily::S => sample_model_s(spec, seed),
        ModelFamily::STilde => sample_model_s_tilde(spec, seed),
        ModelFamily::B => Ok(sample_model_b(spec, seed)?.tensor),
    }
}

/// Uniform unit vector drawn from an existing stream.
pub fn uniform_sphere_with<R: Rng + ?Sized>(rng: &mut R, d: usize, field: Field) -> Vec<Complex64> {
    let kind = DistKind::gaussian(field);
    loop {
        let v: Vec<Complex64> = (0..d).map(|_| unit_draw(kind, rng)).collect();
        let n = norm2(&v);
        if n > 0.0 {
            return v.into_iter().map(|z| z / n).collect();
        }
    }
}

pub fn sample_uniform_sphere(d: usize, field: Field, seed: SeedSpec) -> Result<Vec<Complex64>> {
    if d == 0 {
        return Err(Error::Domain("sphere dimension must be positive".into()));
    }
    Ok(uniform_sphere_with(&mut seed.rng(), d, field))
}

/// Independent uniform unit vectors, one per mode.
pub fn uniform_factors_with<R: Rng + ?Sized>(rng: &mut R, field: Field, dims: &[usize]) -> FactorTuple {
    FactorTuple::new(field, dims.iter().map(|&d| uniform_sphere_with(rng, d, field)).collect())
}
