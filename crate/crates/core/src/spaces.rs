//! Scalar fields, vectors, `p`-norms and duality on `ℓ_p^d`, plus seeded
//! sampling on Euclidean spheres.
//!
//! Vectors always store complex entries; vectors over the real field keep
//! their imaginary parts at exactly zero, so real and complex code paths
//! share the same arithmetic.

use std::fmt;
use std::ops::{Deref, DerefMut};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The scalar field `K` of the ambient space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScalarField {
    Real,
    Complex,
}

impl ScalarField {
    /// Number of real degrees of freedom per coordinate.
    pub fn real_dim(self) -> usize {
        match self {
            ScalarField::Real => 1,
            ScalarField::Complex => 2,
        }
    }
}

impl fmt::Display for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScalarField::Real => f.write_str("real"),
            ScalarField::Complex => f.write_str("complex"),
        }
    }
}

impl std::str::FromStr for ScalarField {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "real" | "r" => Ok(ScalarField::Real),
            "complex" | "c" => Ok(ScalarField::Complex),
            other => Err(Error::InvalidArgument(format!("unknown field '{other}'"))),
        }
    }
}

/// Checks that `p` is a valid exponent in `[1, ∞]`.
pub fn check_exponent(p: f64) -> Result<f64> {
    if p.is_nan() || p < 1.0 {
        Err(Error::InvalidExponent(p))
    } else {
        Ok(p)
    }
}

/// Conjugate exponent `q` with `1/p + 1/q = 1`.
pub fn dual_exponent(p: f64) -> Result<f64> {
    let p = check_exponent(p)?;
    Ok(if p == 1.0 {
        f64::INFINITY
    } else if p.is_infinite() {
        1.0
    } else {
        p / (p - 1.0)
    })
}

/// The space `ℓ_p^d(K)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PSpace {
    p: f64,
    q: f64,
    d: usize,
    field: ScalarField,
}

impl PSpace {
    pub fn new(p: f64, d: usize, field: ScalarField) -> Result<Self> {
        let q = dual_exponent(p)?;
        if d == 0 {
            return Err(Error::InvalidDimension(d));
        }
        Ok(Self { p, q, d, field })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    /// The dual exponent.
    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn field(&self) -> ScalarField {
        self.field
    }

    /// The dual space `ℓ_q^d(K)`.
    pub fn dual(&self) -> PSpace {
        PSpace {
            p: self.q,
            q: self.p,
            d: self.d,
            field: self.field,
        }
    }
}

/// A vector of scalars.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Vector(Vec<Complex64>);

impl Vector {
    pub fn new(entries: Vec<Complex64>) -> Self {
        Vector(entries)
    }

    pub fn real(entries: &[f64]) -> Self {
        Vector(entries.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn zeros(d: usize) -> Self {
        Vector(vec![Complex64::new(0.0, 0.0); d])
    }

    /// The `k`-th standard basis vector of dimension `d`.
    pub fn basis(d: usize, k: usize) -> Self {
        let mut v = Self::zeros(d);
        v.0[k] = Complex64::new(1.0, 0.0);
        v
    }

    pub fn into_inner(self) -> Vec<Complex64> {
        self.0
    }

    /// True when every imaginary part is zero.
    pub fn is_real(&self) -> bool {
        self.0.iter().all(|z| z.im == 0.0)
    }

    pub fn p_norm(&self, p: f64) -> f64 {
        p_norm(&self.0, p)
    }

    pub fn scaled(&self, c: Complex64) -> Vector {
        Vector(self.0.iter().map(|z| z * c).collect())
    }

    /// Real parts, for vectors known to be real.
    pub fn re(&self) -> Vec<f64> {
        self.0.iter().map(|z| z.re).collect()
    }
}

impl Deref for Vector {
    type Target = [Complex64];

    fn deref(&self) -> &[Complex64] {
        &self.0
    }
}

impl DerefMut for Vector {
    fn deref_mut(&mut self) -> &mut [Complex64] {
        &mut self.0
    }
}

impl From<Vec<Complex64>> for Vector {
    fn from(v: Vec<Complex64>) -> Self {
        Vector(v)
    }
}

/// `(Σ|v_i|^p)^{1/p}` for finite `p`, `max|v_i|` for `p = ∞`.
///
/// Entries are rescaled by the largest modulus first so that very large
/// exponents neither overflow nor underflow.
pub fn p_norm(v: &[Complex64], p: f64) -> f64 {
    let m = v.iter().fold(0.0f64, |acc, z| acc.max(z.norm()));
    if m == 0.0 || p.is_infinite() {
        return m;
    }
    if p == 2.0 {
        let s: f64 = v.iter().map(|z| (z / m).norm_sqr()).sum();
        return m * s.sqrt();
    }
    if p == 1.0 {
        return v.iter().map(|z| z.norm()).sum();
    }
    let s: f64 = v.iter().map(|z| (z.norm() / m).powf(p)).sum();
    m * s.powf(1.0 / p)
}

/// Bilinear pairing `Σ ψ_i x_i` (no conjugation).
pub fn apply(psi: &[Complex64], x: &[Complex64]) -> Result<Complex64> {
    if psi.len() != x.len() {
        return Err(Error::DimensionMismatch {
            expected: psi.len(),
            found: x.len(),
        });
    }
    Ok(pair(psi, x))
}

#[inline]
pub(crate) fn pair(psi: &[Complex64], x: &[Complex64]) -> Complex64 {
    psi.iter().zip(x).fold(Complex64::new(0.0, 0.0), |acc, (a, b)| acc + a * b)
}

/// Normalizes `phi` to unit `q`-norm.
pub fn pushforward_to_q_sphere(phi: &[Complex64], q: f64) -> Result<Vector> {
    check_exponent(q)?;
    let n = p_norm(phi, q);
    if n == 0.0 {
        return Err(Error::ZeroVector);
    }
    Ok(Vector(phi.iter().map(|z| z / n).collect()))
}

/// The unit-`p`-norm point `x` with `⟨x, ψ⟩ = ‖ψ‖_q` (Hölder equality).
pub fn holder_witness(psi: &[Complex64], p: f64) -> Result<Vector> {
    let q = dual_exponent(p)?;
    let norm_q = p_norm(psi, q);
    if norm_q == 0.0 {
        return Err(Error::ZeroVector);
    }
    let d = psi.len();
    let phase = |z: Complex64| {
        if z.norm() == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            z.conj() / z.norm()
        }
    };
    let x = if p == 1.0 {
        let (k, _) = psi
            .iter()
            .enumerate()
            .fold((0, -1.0), |(bk, bm), (k, z)| if z.norm() > bm { (k, z.norm()) } else { (bk, bm) });
        let mut v = vec![Complex64::new(0.0, 0.0); d];
        v[k] = phase(psi[k]);
        v
    } else if p.is_infinite() {
        psi.iter().map(|&z| phase(z)).collect()
    } else {
        psi.iter()
            .map(|&z| phase(z) * (z.norm() / norm_q).powf(q - 1.0))
            .collect()
    };
    Ok(Vector(x))
}

/// Fills `buf` with a point drawn from the normalized surface measure of the
/// Euclidean unit sphere. Complex coordinates use two real Gaussians each.
pub fn fill_euclidean_sphere<R: Rng + ?Sized>(buf: &mut [Complex64], field: ScalarField, rng: &mut R) {
    loop {
        let mut s = 0.0;
        for z in buf.iter_mut() {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = match field {
                ScalarField::Real => 0.0,
                ScalarField::Complex => rng.sample(StandardNormal),
            };
            *z = Complex64::new(re, im);
            s += re * re + im * im;
        }
        // all-zero draws have probability zero; redraw
        if s > 0.0 {
            let inv = 1.0 / s.sqrt();
            for z in buf.iter_mut() {
                *z *= inv;
            }
            return;
        }
    }
}

pub fn sample_euclidean_sphere<R: Rng + ?Sized>(d: usize, field: ScalarField, rng: &mut R) -> Result<Vector> {
    if d == 0 {
        return Err(Error::InvalidDimension(d));
    }
    let mut v = Vector::zeros(d);
    fill_euclidean_sphere(&mut v, field, rng);
    Ok(v)
}

/// Seeded, stream-keyed randomness.
///
/// `(seed, stream)` forms the ChaCha key; parallel work is further split into
/// numbered chunks, each mapped to its own ChaCha stream, so results depend
/// only on the chunk layout and never on scheduling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RandomSource {
    pub seed: u64,
    pub stream: u64,
}

impl RandomSource {
    pub fn new(seed: u64) -> Self {
        Self { seed, stream: 0 }
    }

    pub fn with_stream(seed: u64, stream: u64) -> Self {
        Self { seed, stream }
    }

    /// A child source, independent of `self` and of other tags.
    pub fn substream(&self, tag: u64) -> Self {
        Self {
            seed: self.seed,
            stream: splitmix64(self.stream ^ splitmix64(tag.wrapping_add(0x9e37_79b9_7f4a_7c15))),
        }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        self.chunk_rng(0)
    }

    pub fn chunk_rng(&self, chunk: u64) -> ChaCha8Rng {
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&self.seed.to_le_bytes());
        key[8..16].copy_from_slice(&self.stream.to_le_bytes());
        let mut rng = ChaCha8Rng::from_seed(key);
        rng.set_stream(chunk);
        rng
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Kolmogorov–Smirnov statistic against the uniform law on `[lo, hi]`.
    fn ks_uniform(mut xs: Vec<f64>, lo: f64, hi: f64) -> f64 {
        xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let n = xs.len() as f64;
        xs.iter()
            .enumerate()
            .map(|(i, &x)| {
                let f = ((x - lo) / (hi - lo)).clamp(0.0, 1.0);
                (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn dual_exponent_examples() {
        assert_eq!(dual_exponent(2.0).unwrap(), 2.0);
        assert_eq!(dual_exponent(1.0).unwrap(), f64::INFINITY);
        assert_eq!(dual_exponent(f64::INFINITY).unwrap(), 1.0);
        assert!((dual_exponent(1.5).unwrap() - 3.0).abs() < 1e-15);
        assert!(dual_exponent(0.5).is_err());
        assert!(dual_exponent(f64::NAN).is_err());
        for &p in &[1.0, 1.25, 2.0, 3.0, 7.5, f64::INFINITY] {
            let back = dual_exponent(dual_exponent(p).unwrap()).unwrap();
            assert!(back == p || (back - p).abs() < 1e-12 * p);
        }
    }

    #[test]
    fn p_norm_examples() {
        assert_eq!(p_norm(&Vector::real(&[3.0, 4.0]), 2.0), 5.0);
        assert_eq!(p_norm(&Vector::real(&[1.0, -1.0, 2.0]), f64::INFINITY), 2.0);
        let ones = Vector::real(&[1.0; 7]);
        for &p in &[1.0, 1.5, 2.0, 3.0, 10.0] {
            assert!((p_norm(&ones, p) - 7f64.powf(1.0 / p)).abs() < 1e-13);
        }
        // very large exponents approach the max modulus without overflow
        let v = Vector::real(&[1e200, 2e200]);
        assert!((p_norm(&v, 1e6) / 2e200 - 1.0).abs() < 1e-5);
    }

    #[test]
    fn apply_examples() {
        let e1 = Vector::basis(2, 0);
        assert_eq!(apply(&e1, &Vector::real(&[5.0, 7.0])).unwrap(), c(5.0, 0.0));
        assert_eq!(apply(&Vector::real(&[1.0, 1.0]), &Vector::real(&[1.0, -1.0])).unwrap(), c(0.0, 0.0));
        let psi = Vector::new(vec![c(1.0, 0.0), c(0.0, 1.0)]);
        let x = Vector::new(vec![c(0.0, 1.0), c(1.0, 0.0)]);
        assert_eq!(apply(&psi, &x).unwrap(), c(0.0, 2.0));
        assert!(matches!(
            apply(&psi, &Vector::zeros(3)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn pushforward_examples() {
        let v = pushforward_to_q_sphere(&Vector::real(&[1.0, 0.0]), 3.0).unwrap();
        assert_eq!(v.re(), vec![1.0, 0.0]);
        let v = pushforward_to_q_sphere(&Vector::real(&[1.0, 1.0]), 1.0).unwrap();
        assert_eq!(v.re(), vec![0.5, 0.5]);
        let v = pushforward_to_q_sphere(&Vector::real(&[3.0, 4.0]), f64::INFINITY).unwrap();
        assert_eq!(v.re(), vec![0.75, 1.0]);
        assert_eq!(pushforward_to_q_sphere(&Vector::zeros(2), 2.0), Err(Error::ZeroVector));
    }

    #[test]
    fn pushforward_is_idempotent() {
        let mut rng = RandomSource::new(3).rng();
        for &q in &[1.0, 1.3, 2.0, 4.0, f64::INFINITY] {
            let phi = sample_euclidean_sphere(5, ScalarField::Complex, &mut rng).unwrap();
            let once = pushforward_to_q_sphere(&phi, q).unwrap();
            let twice = pushforward_to_q_sphere(&once, q).unwrap();
            assert!((once.p_norm(q) - 1.0).abs() < 1e-12);
            for (a, b) in once.iter().zip(twice.iter()) {
                assert!((a - b).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn holder_sharpness() {
        let mut rng = RandomSource::new(11).rng();
        for &field in &[ScalarField::Real, ScalarField::Complex] {
            for &p in &[1.0, 1.5, 2.0, 3.0, f64::INFINITY] {
                let q = dual_exponent(p).unwrap();
                let psi = sample_euclidean_sphere(4, field, &mut rng).unwrap().scaled(c(2.5, 0.0));
                let bound = psi.p_norm(q);
                let mut best: f64 = 0.0;
                for _ in 0..10_000 {
                    let z = sample_euclidean_sphere(4, field, &mut rng).unwrap();
                    let x = pushforward_to_q_sphere(&z, p).unwrap();
                    best = best.max(apply(&psi, &x).unwrap().norm());
                }
                assert!(best <= bound * (1.0 + 1e-12));
                let w = holder_witness(&psi, p).unwrap();
                assert!((w.p_norm(p) - 1.0).abs() < 1e-12);
                assert!((apply(&psi, &w).unwrap().norm() - bound).abs() < 1e-12 * bound.max(1.0));
            }
        }
    }

    #[test]
    fn sphere_samples_are_unit() {
        let mut rng = RandomSource::new(1).rng();
        for d in 1..20 {
            for &field in &[ScalarField::Real, ScalarField::Complex] {
                let v = sample_euclidean_sphere(d, field, &mut rng).unwrap();
                assert!((v.p_norm(2.0) - 1.0).abs() < 1e-12);
                if field == ScalarField::Real {
                    assert!(v.is_real());
                }
            }
        }
        assert!(sample_euclidean_sphere(0, ScalarField::Real, &mut rng).is_err());
    }

    #[test]
    fn one_dimensional_real_sphere_is_balanced() {
        let mut rng = RandomSource::new(5).rng();
        let n = 10_000;
        let plus = (0..n)
            .filter(|_| sample_euclidean_sphere(1, ScalarField::Real, &mut rng).unwrap()[0].re > 0.0)
            .count() as f64;
        let sigma = (n as f64 * 0.25).sqrt();
        assert!((plus - n as f64 / 2.0).abs() < 3.0 * sigma);
    }

    #[test]
    fn archimedes_projection_real_s2() {
        // first coordinate of a uniform point on S^2 is uniform on [-1, 1]
        let mut rng = RandomSource::new(7).rng();
        let xs: Vec<f64> = (0..100_000)
            .map(|_| sample_euclidean_sphere(3, ScalarField::Real, &mut rng).unwrap()[0].re)
            .collect();
        let ks = ks_uniform(xs, -1.0, 1.0);
        // critical value at level 0.01
        assert!(ks < 1.628 / (100_000f64).sqrt(), "ks = {ks}");
    }

    #[test]
    fn complex_c2_squared_modulus_is_uniform() {
        let mut rng = RandomSource::new(9).rng();
        let xs: Vec<f64> = (0..100_000)
            .map(|_| sample_euclidean_sphere(2, ScalarField::Complex, &mut rng).unwrap()[0].norm_sqr())
            .collect();
        let ks = ks_uniform(xs, 0.0, 1.0);
        assert!(ks < 1.628 / (100_000f64).sqrt(), "ks = {ks}");
    }

    #[test]
    fn coordinate_means_vanish() {
        let mut rng = RandomSource::new(13).rng();
        let n = 100_000;
        let xs: Vec<f64> = (0..n)
            .map(|_| sample_euclidean_sphere(4, ScalarField::Real, &mut rng).unwrap()[2].re)
            .collect();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        assert!(mean.abs() < 4.0 * (var / n as f64).sqrt());
    }

    #[test]
    fn random_source_reproducible_and_independent() {
        let a = RandomSource::with_stream(42, 1);
        let x: Vec<u64> = (0..4).map(|_| a.rng().random()).collect();
        let y: Vec<u64> = (0..4).map(|_| a.rng().random()).collect();
        assert_eq!(x, y);
        let mut r1 = a.rng();
        let mut r2 = RandomSource::with_stream(42, 2).rng();
        let u: Vec<u64> = (0..4).map(|_| r1.random()).collect();
        let v: Vec<u64> = (0..4).map(|_| r2.random()).collect();
        assert_ne!(u, v);
        let mut c0 = a.chunk_rng(0);
        let mut c1 = a.chunk_rng(1);
        assert_ne!(c0.random::<u64>(), c1.random::<u64>());
        assert_ne!(a.substream(1), a.substream(2));
    }
}
