//! Dense order-p tensors, Hermitian overlaps and the symmetric projector.
//!
//! Entries are stored as `Complex64` in row-major order for both fields; a
//! real tensor simply has zero imaginary parts. Every pairing conjugates its
//! first argument: `<T, X> = Σ_I conj(T_I) Π_m (x_m)_{I_m}`.

use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest number of entries a tensor may hold.
pub const MAX_ENTRIES: usize = 1 << 28;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Field {
    Real,
    Complex,
}

impl Field {
    pub fn name(self) -> &'static str {
        match self {
            Field::Real => "real",
            Field::Complex => "complex",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DenseTensor {
    field: Field,
    shape: Vec<usize>,
    strides: Vec<usize>,
    data: Vec<Complex64>,
}

/// Number of entries for `shape`, or a capacity error.
pub fn checked_len(shape: &[usize]) -> Result<usize> {
    if shape.contains(&0) {
        return Err(Error::Shape(format!("dimensions must be positive, got {shape:?}")));
    }
    let mut n: u128 = 1;
    for &d in shape {
        n = n.saturating_mul(d as u128);
    }
    if n > MAX_ENTRIES as u128 {
        return Err(Error::Capacity { entries: n, limit: MAX_ENTRIES });
    }
    Ok(n as usize)
}

fn row_major_strides(shape: &[usize]) -> Vec<usize> {
    let mut strides = vec![1; shape.len()];
    for i in (0..shape.len().saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * shape[i + 1];
    }
    strides
}

impl DenseTensor {
    pub fn zeros(field: Field, shape: &[usize]) -> Result<Self> {
        if shape.is_empty() {
            return Err(Error::Shape("a tensor needs at least one mode".into()));
        }
        let n = checked_len(shape)?;
        Ok(Self {
            field,
            shape: shape.to_vec(),
            strides: row_major_strides(shape),
            data: vec![Complex64::new(0.0, 0.0); n],
        })
    }

    pub fn from_data(field: Field, shape: &[usize], data: Vec<Complex64>) -> Result<Self> {
        let mut t = Self::zeros(field, shape)?;
        if data.len() != t.data.len() {
            return Err(Error::Shape(format!("shape {shape:?} needs {} entries, got {}", t.data.len(), data.len())));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Domain("tensor entries must be finite".into()));
        }
        if field == Field::Real && data.iter().any(|z| z.im != 0.0) {
            return Err(Error::Domain("real tensor with a nonzero imaginary part".into()));
        }
        t.data = data;
        Ok(t)
    }

    pub fn from_real(shape: &[usize], data: &[f64]) -> Result<Self> {
        Self::from_data(Field::Real, shape, data.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    /// Tensor with a single unit entry at `index`.
    pub fn basis(field: Field, shape: &[usize], index: &[usize]) -> Result<Self> {
        let mut t = Self::zeros(field, shape)?;
        let flat = t.flat_index(index)?;
        t.data[flat] = Complex64::new(1.0, 0.0);
        Ok(t)
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn strides(&self) -> &[usize] {
        &self.strides
    }

    pub fn order(&self) -> usize {
        self.shape.len()
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    /// True when all modes have the same dimension.
    pub fn is_cubic(&self) -> bool {
        self.shape.windows(2).all(|w| w[0] == w[1])
    }

    pub fn flat_index(&self, index: &[usize]) -> Result<usize> {
        if index.len() != self.shape.len() {
            return Err(Error::Shape(format!("index {index:?} has the wrong order")));
        }
        let mut flat = 0;
        for ((&i, &d), &s) in index.iter().zip(&self.shape).zip(&self.strides) {
            if i >= d {
                return Err(Error::Shape(format!("index {index:?} out of range for {:?}", self.shape)));
            }
            flat += i * s;
        }
        Ok(flat)
    }

    pub fn multi_index(&self, flat: usize) -> Vec<usize> {
        self.strides.iter().zip(&self.shape).map(|(&s, &d)| (flat / s) % d).collect()
    }

    pub fn get(&self, index: &[usize]) -> Result<Complex64> {
        Ok(self.data[self.flat_index(index)?])
    }

    /// Entrywise multiplication by a real scalar.
    pub fn scaled(&self, factor: f64) -> Self {
        let mut out = self.clone();
        out.data.iter_mut().for_each(|z| *z *= factor);
        out
    }

    /// Entrywise sum of two tensors of the same shape and field.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.shape != other.shape || self.field != other.field {
            return Err(Error::Shape("add needs matching shape and field".into()));
        }
        let mut out = self.clone();
        out.data.iter_mut().zip(&other.data).for_each(|(a, b)| *a += b);
        Ok(out)
    }

    /// Serialize to the plain text format: a header `field p d1 ... dp`
    /// followed by one entry per line (`re` for real, `re im` for complex).
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = write!(s, "{} {}", self.field.name(), self.order());
        for d in &self.shape {
            let _ = write!(s, " {d}");
        }
        s.push('\n');
        for z in &self.data {
            match self.field {
                Field::Real => {
                    let _ = writeln!(s, "{:e}", z.re);
                }
                Field::Complex => {
                    let _ = writeln!(s, "{:e} {:e}", z.re, z.im);
                }
            }
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines.next().ok_or_else(|| Error::Parse("empty tensor file".into()))?;
        let mut parts = header.split_whitespace();
        let field = match parts.next() {
            Some("real") => Field::Real,
            Some("complex") => Field::Complex,
            other => return Err(Error::Parse(format!("unknown field {other:?}"))),
        };
        let p: usize = parse_token(parts.next(), "order")?;
        let shape: Vec<usize> = parts.map(|t| parse_token(Some(t), "dimension")).collect::<Result<_>>()?;
        if shape.len() != p {
            return Err(Error::Parse(format!("header declares order {p} but lists {} dims", shape.len())));
        }
        let n = checked_len(&shape)?;
        let mut data = Vec::with_capacity(n);
        for line in lines {
            let mut it = line.split_whitespace();
            let re: f64 = parse_token(it.next(), "real part")?;
            let im: f64 = match field {
                Field::Real => 0.0,
                Field::Complex => parse_token(it.next(), "imaginary part")?,
            };
            if it.next().is_some() {
                return Err(Error::Parse(format!("trailing data on line {line:?}")));
            }
            data.push(Complex64::new(re, im));
        }
        Self::from_data(field, &shape, data)
    }
}

fn parse_token<T: std::str::FromStr>(tok: Option<&str>, what: &str) -> Result<T> {
    let tok = tok.ok_or_else(|| Error::Parse(format!("missing {what}")))?;
    tok.parse().map_err(|_| Error::Parse(format!("bad {what}: {tok:?}")))
}

/// One vector per tensor mode.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorTuple {
    pub field: Field,
    pub factors: Vec<Vec<Complex64>>,
}

impl FactorTuple {
    pub fn new(field: Field, factors: Vec<Vec<Complex64>>) -> Self {
        Self { field, factors }
    }

    pub fn from_real(factors: &[Vec<f64>]) -> Self {
        let factors = factors.iter().map(|v| v.iter().map(|&x| Complex64::new(x, 0.0)).collect()).collect();
        Self { field: Field::Real, factors }
    }

    /// The same vector repeated `p` times.
    pub fn replicated(field: Field, x: &[Complex64], p: usize) -> Self {
        Self { field, factors: vec![x.to_vec(); p] }
    }

    pub fn order(&self) -> usize {
        self.factors.len()
    }

    pub fn is_normalized(&self, tol: f64) -> bool {
        self.factors.iter().all(|v| (norm2(v) - 1.0).abs() <= tol)
    }

    /// Product of the factor norms.
    pub fn norm_product(&self) -> f64 {
        self.factors.iter().map(|v| norm2(v)).product()
    }
}

pub fn norm2(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `Σ conj(a_j) b_j`.
pub fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn check_factors(t: &DenseTensor, x: &FactorTuple) -> Result<()> {
    if x.field != t.field {
        return Err(Error::Shape(format!(
            "factor field {} does not match tensor field {}",
            x.field.name(),
            t.field.name()
        )));
    }
    if x.factors.len() != t.order() {
        return Err(Error::Shape(format!("{} factors for an order-{} tensor", x.factors.len(), t.order())));
    }
    for (i, (v, &d)) in x.factors.iter().zip(t.shape()).enumerate() {
        if v.len() != d {
            return Err(Error::Shape(format!("factor {i} has length {} but mode has {d}", v.len())));
        }
    }
    Ok(())
}

/// Contract the last axis of a row-major buffer of shape `(rest, d)` with `x`.
fn contract_last(buf: &[Complex64], x: &[Complex64]) -> Vec<Complex64> {
    let d = x.len();
    buf.chunks_exact(d).map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum()).collect()
}

/// Contract the first axis of a row-major buffer of shape `(d, rest)` with `x`.
fn contract_first(buf: &[Complex64], x: &[Complex64]) -> Vec<Complex64> {
    let rest = buf.len() / x.len();
    let mut out = vec![Complex64::new(0.0, 0.0); rest];
    for (row, &xi) in buf.chunks_exact(rest).zip(x) {
        for (o, &b) in out.iter_mut().zip(row) {
            *o += xi * b;
        }
    }
    out
}

/// `<T, x_1 ⊗ ... ⊗ x_p> = Σ_I conj(T_I) Π_m (x_m)_{I_m}`.
pub fn rank_one_overlap(t: &DenseTensor, x: &FactorTuple) -> Result<Complex64> {
    let w = partial_contraction(t, x, t.order() - 1)?;
    Ok(w.iter().zip(&x.factors[t.order() - 1]).map(|(a, b)| a * b).sum())
}

/// Contraction of `conj(T)` with every factor except the one at `slot`
/// (0-based). Pairing the result with `x_slot` gives the full overlap.
pub fn partial_contraction(t: &DenseTensor, x: &FactorTuple, slot: usize) -> Result<Vec<Complex64>> {
    check_factors(t, x)?;
    let p = t.order();
    if slot >= p {
        return Err(Error::Shape(format!("slot {slot} out of range for order {p}")));
    }
    let mut buf: Vec<Complex64> = t.data().iter().map(|z| z.conj()).collect();
    for m in (slot + 1..p).rev() {
        buf = contract_last(&buf, &x.factors[m]);
    }
    for m in 0..slot {
        buf = contract_first(&buf, &x.factors[m]);
    }
    Ok(buf)
}

pub fn frobenius_norm(t: &DenseTensor) -> f64 {
    norm2(t.data())
}

/// Visit every non-decreasing multi-index of length `p` over `0..d`.
pub fn for_each_sorted_index(d: usize, p: usize, mut f: impl FnMut(&[usize])) {
    let mut idx = vec![0usize; p];
    loop {
        f(&idx);
        // Advance to the next non-decreasing tuple.
        let mut pos = p;
        while pos > 0 && idx[pos - 1] == d - 1 {
            pos -= 1;
        }
        if pos == 0 {
            return;
        }
        let v = idx[pos - 1] + 1;
        for slot in &mut idx[pos - 1..] {
            *slot = v;
        }
    }
}

/// Lexicographic next permutation; false once the last one is reached.
pub fn next_permutation(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Flat offsets of every distinct permutation of a sorted multi-index.
pub fn orbit_offsets(sorted: &[usize], strides: &[usize], out: &mut Vec<usize>) {
    out.clear();
    let mut perm = sorted.to_vec();
    loop {
        out.push(perm.iter().zip(strides).map(|(i, s)| i * s).sum());
        if !next_permutation(&mut perm) {
            break;
        }
    }
}

fn require_cubic(t: &DenseTensor, what: &str) -> Result<()> {
    if !t.is_cubic() {
        return Err(Error::Shape(format!("{what} needs a cubic shape, got {:?}", t.shape())));
    }
    Ok(())
}

/// Average over all index permutations, computed orbit by orbit.
pub fn symmetrize(t: &DenseTensor) -> Result<DenseTensor> {
    require_cubic(t, "symmetrize")?;
    let (d, p) = (t.shape()[0], t.order());
    let mut out = t.clone();
    let mut offsets = Vec::new();
    for_each_sorted_index(d, p, |sorted| {
        orbit_offsets(sorted, t.strides(), &mut offsets);
        let mean = offsets.iter().map(|&o| t.data[o]).sum::<Complex64>() / offsets.len() as f64;
        for &o in &offsets {
            out.data[o] = mean;
        }
    });
    Ok(out)
}

pub fn is_symmetric(t: &DenseTensor, tol: f64) -> Result<bool> {
    require_cubic(t, "is_symmetric")?;
    let mut sorted = vec![0; t.order()];
    for (flat, z) in t.data.iter().enumerate() {
        sorted.copy_from_slice(&t.multi_index(flat));
        sorted.sort_unstable();
        let rep = t.data[t.flat_index(&sorted)?];
        if (z - rep).norm() > tol {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Build a tensor from a closure over multi-indices.
pub fn from_fn(field: Field, shape: &[usize], mut f: impl FnMut(&[usize]) -> Complex64) -> Result<DenseTensor> {
    let mut t = DenseTensor::zeros(field, shape)?;
    for flat in 0..t.len() {
        let idx = t.multi_index(flat);
        t.data[flat] = f(&idx);
    }
    DenseTensor::from_data(field, shape, t.data)
}

/// `x_1 ⊗ ... ⊗ x_p` as a dense tensor.
pub fn outer_product(x: &FactorTuple) -> Result<DenseTensor> {
    let shape: Vec<usize> = x.factors.iter().map(Vec::len).collect();
    from_fn(x.field, &shape, |idx| idx.iter().zip(&x.factors).map(|(&i, v)| v[i]).product())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_tensor(rng: &mut ChaCha8Rng, field: Field, shape: &[usize]) -> DenseTensor {
        let n: usize = shape.iter().product();
        let data = (0..n)
            .map(|_| match field {
                Field::Real => c(rng.random_range(-1.0..1.0), 0.0),
                Field::Complex => c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
            })
            .collect();
        DenseTensor::from_data(field, shape, data).unwrap()
    }

    fn random_unit_factors(rng: &mut ChaCha8Rng, field: Field, shape: &[usize]) -> FactorTuple {
        let factors = shape
            .iter()
            .map(|&d| {
                let v: Vec<Complex64> = (0..d)
                    .map(|_| match field {
                        Field::Real => c(rng.random_range(-1.0..1.0), 0.0),
                        Field::Complex => c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
                    })
                    .collect();
                let n = norm2(&v);
                v.into_iter().map(|z| z / n).collect()
            })
            .collect();
        FactorTuple::new(field, factors)
    }

    /// Direct entrywise evaluation of the overlap.
    fn overlap_oracle(t: &DenseTensor, x: &FactorTuple) -> Complex64 {
        (0..t.len())
            .map(|flat| {
                let idx = t.multi_index(flat);
                let prod: Complex64 = idx.iter().zip(&x.factors).map(|(&i, v)| v[i]).product();
                t.data()[flat].conj() * prod
            })
            .sum()
    }

    /// Explicit sum over all p! permutations.
    fn symmetrize_oracle(t: &DenseTensor) -> DenseTensor {
        let p = t.order();
        let mut perms = Vec::new();
        let mut sigma: Vec<usize> = (0..p).collect();
        loop {
            perms.push(sigma.clone());
            if !next_permutation(&mut sigma) {
                break;
            }
        }
        from_fn(t.field(), t.shape(), |idx| {
            let sum: Complex64 = perms
                .iter()
                .map(|s| {
                    let permuted: Vec<usize> = s.iter().map(|&j| idx[j]).collect();
                    t.get(&permuted).unwrap()
                })
                .sum();
            sum / perms.len() as f64
        })
        .unwrap()
    }

    #[test]
    fn basis_pairing() {
        for p in 1..=4 {
            let shape = vec![3; p];
            let t = DenseTensor::basis(Field::Complex, &shape, &vec![0; p]).unwrap();
            let mut e1 = vec![c(0.0, 0.0); 3];
            e1[0] = c(1.0, 0.0);
            let x = FactorTuple::replicated(Field::Complex, &e1, p);
            assert_eq!(rank_one_overlap(&t, &x).unwrap(), c(1.0, 0.0));
        }
    }

    #[test]
    fn vector_overlap_is_norm() {
        let t = DenseTensor::from_real(&[3], &[3.0, 4.0, 12.0]).unwrap();
        let x = FactorTuple::from_real(&[vec![3.0 / 13.0, 4.0 / 13.0, 12.0 / 13.0]]);
        let v = rank_one_overlap(&t, &x).unwrap();
        assert!((v.re - 13.0).abs() < 1e-12 && v.im == 0.0);
    }

    #[test]
    fn matrix_overlap_picks_conjugate_entry() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let t = random_tensor(&mut rng, Field::Complex, &[2, 2]);
        let e = |k: usize| {
            let mut v = vec![c(0.0, 0.0); 2];
            v[k] = c(1.0, 0.0);
            v
        };
        let x = FactorTuple::new(Field::Complex, vec![e(0), e(1)]);
        assert_eq!(rank_one_overlap(&t, &x).unwrap(), t.get(&[0, 1]).unwrap().conj());
    }

    #[test]
    fn contraction_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let v = random_tensor(&mut rng, Field::Complex, &[4]);
        let x = FactorTuple::new(Field::Complex, vec![vec![c(0.0, 0.0); 4]]);
        let w = partial_contraction(&v, &x, 0).unwrap();
        let expect: Vec<Complex64> = v.data().iter().map(|z| z.conj()).collect();
        assert_eq!(w, expect);

        let m = random_tensor(&mut rng, Field::Complex, &[3, 3]);
        let mut ek = vec![c(0.0, 0.0); 3];
        ek[2] = c(1.0, 0.0);
        let x = FactorTuple::new(Field::Complex, vec![vec![c(0.0, 0.0); 3], ek]);
        let w = partial_contraction(&m, &x, 0).unwrap();
        for (i, wi) in w.iter().enumerate() {
            assert_eq!(*wi, m.get(&[i, 2]).unwrap().conj());
        }
    }

    #[test]
    fn contraction_and_overlap_errors() {
        let t = DenseTensor::zeros(Field::Real, &[2, 3]).unwrap();
        let bad = FactorTuple::from_real(&[vec![1.0, 0.0], vec![1.0, 0.0]]);
        assert!(rank_one_overlap(&t, &bad).is_err());
        let ok = FactorTuple::from_real(&[vec![1.0, 0.0], vec![1.0, 0.0, 0.0]]);
        assert!(partial_contraction(&t, &ok, 2).is_err());
        let wrong_field = FactorTuple::new(Field::Complex, ok.factors.clone());
        assert!(rank_one_overlap(&t, &wrong_field).is_err());
    }

    #[test]
    fn frobenius_examples() {
        assert_eq!(frobenius_norm(&DenseTensor::zeros(Field::Real, &[3, 3]).unwrap()), 0.0);
        assert_eq!(frobenius_norm(&DenseTensor::basis(Field::Real, &[3, 3], &[0, 0]).unwrap()), 1.0);
    }

    #[test]
    fn symmetrize_examples() {
        let e12 = DenseTensor::basis(Field::Real, &[2, 2], &[0, 1]).unwrap();
        let s = symmetrize(&e12).unwrap();
        assert_eq!(s.get(&[0, 1]).unwrap(), c(0.5, 0.0));
        assert_eq!(s.get(&[1, 0]).unwrap(), c(0.5, 0.0));
        assert_eq!(s.get(&[0, 0]).unwrap(), c(0.0, 0.0));
        assert!(!is_symmetric(&e12, 0.0).unwrap());
        assert!(is_symmetric(&s, 0.0).unwrap());

        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let t = random_tensor(&mut rng, Field::Complex, &[3, 3, 3]);
        let once = symmetrize(&t).unwrap();
        let twice = symmetrize(&once).unwrap();
        for (a, b) in once.data().iter().zip(twice.data()) {
            assert!((a - b).norm() <= 1e-12);
        }
        assert!(symmetrize(&DenseTensor::zeros(Field::Real, &[2, 3]).unwrap()).is_err());
        assert!(is_symmetric(&DenseTensor::zeros(Field::Real, &[2, 3]).unwrap(), 0.0).is_err());
    }

    #[test]
    fn symmetrize_matches_permutation_sum() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for p in 1..=4 {
            for d in 1..=3 {
                let t = random_tensor(&mut rng, Field::Complex, &vec![d; p]);
                let fast = symmetrize(&t).unwrap();
                let slow = symmetrize_oracle(&t);
                for (a, b) in fast.data().iter().zip(slow.data()) {
                    assert!((a - b).norm() <= 1e-12, "p={p} d={d}");
                }
            }
        }
    }

    #[test]
    fn sorted_index_count_is_multiset_count() {
        for d in 1..=5 {
            for p in 1..=5 {
                let mut count = 0u64;
                for_each_sorted_index(d, p, |_| count += 1);
                let expect = crate::specialfn::log_binomial((d + p - 1) as u64, p as u64).unwrap().exp();
                assert_eq!(count, expect.round() as u64);
            }
        }
    }

    #[test]
    fn text_round_trip_is_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for field in [Field::Real, Field::Complex] {
            let t = random_tensor(&mut rng, field, &[2, 3, 2]);
            let back = DenseTensor::from_text(&t.to_text()).unwrap();
            assert_eq!(back, t);
        }
        assert!(DenseTensor::from_text("real 2 2 2\n1\n2\n3\n").is_err());
        assert!(DenseTensor::from_text("quaternion 1 1\n1\n").is_err());
    }

    #[test]
    fn capacity_is_enforced() {
        assert!(matches!(DenseTensor::zeros(Field::Real, &[1 << 10, 1 << 10, 1 << 10]), Err(Error::Capacity { .. })));
        assert!(DenseTensor::zeros(Field::Real, &[0, 2]).is_err());
    }

    fn shapes() -> impl Strategy<Value = Vec<usize>> {
        proptest::collection::vec(1usize..4, 1..5)
    }

    proptest! {
        #[test]
        fn overlap_matches_contraction_in_every_slot(shape in shapes(), seed in any::<u64>(), complex in any::<bool>()) {
            let field = if complex { Field::Complex } else { Field::Real };
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let t = random_tensor(&mut rng, field, &shape);
            let x = random_unit_factors(&mut rng, field, &shape);
            let direct = overlap_oracle(&t, &x);
            let fast = rank_one_overlap(&t, &x).unwrap();
            let scale = direct.norm().max(1.0);
            prop_assert!((direct - fast).norm() <= 1e-12 * scale);
            for slot in 0..shape.len() {
                let w = partial_contraction(&t, &x, slot).unwrap();
                let paired: Complex64 = w.iter().zip(&x.factors[slot]).map(|(a, b)| a * b).sum();
                prop_assert!((paired - direct).norm() <= 1e-12 * scale);
            }
        }

        #[test]
        fn overlap_bounded_by_frobenius(shape in shapes(), seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let t = random_tensor(&mut rng, Field::Complex, &shape);
            let x = random_unit_factors(&mut rng, Field::Complex, &shape);
            prop_assert!(rank_one_overlap(&t, &x).unwrap().norm() <= frobenius_norm(&t) + 1e-12);
        }

        #[test]
        fn symmetrize_is_nonexpansive(d in 1usize..4, p in 1usize..5, seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let t = random_tensor(&mut rng, Field::Complex, &vec![d; p]);
            let s = symmetrize(&t).unwrap();
            prop_assert!(frobenius_norm(&s) <= frobenius_norm(&t) + 1e-12);
            prop_assert!(is_symmetric(&s, 1e-12).unwrap());
        }
    }
}
