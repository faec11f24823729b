//! Monte Carlo estimators for integrals over the Euclidean unit sphere, and a
//! log-log slope fit for asymptotic-order checks.
//!
//! Samples are split into fixed chunks of [`CHUNK`] draws. Chunk `c` uses
//! stream `c` of the caller's [`RandomSource`], so an estimate depends only on
//! `(seed, stream, samples)` and not on the number of worker threads.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spaces::{self, check_exponent, p_norm, pair, RandomSource, ScalarField};

/// Draws per chunk.
pub const CHUNK: usize = 8192;

// consecutive rejected draws tolerated before giving up on a chunk
const MAX_REDRAWS: usize = 1 << 20;

/// A Monte Carlo mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogIntegralEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub samples: usize,
    /// Floor level `m` of the log kernel; `∞` when untruncated.
    pub truncation_m: f64,
    /// Draws rejected because the integrand was not finite there.
    pub redraws: usize,
}

impl LogIntegralEstimate {
    /// `√(σ_a² + σ_b²)`.
    pub fn combined_error(&self, other: &Self) -> f64 {
        self.std_error.hypot(other.std_error)
    }
}

/// Neumaier sum plus Welford second moment for one chunk.
#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    n: usize,
    sum: f64,
    comp: f64,
    mean: f64,
    m2: f64,
    redraws: usize,
}

impl Moments {
    fn add_to_sum(sum: &mut f64, comp: &mut f64, x: f64) {
        let t = *sum + x;
        if sum.abs() >= x.abs() {
            *comp += (*sum - t) + x;
        } else {
            *comp += (x - t) + *sum;
        }
        *sum = t;
    }

    fn push(&mut self, x: f64) {
        self.n += 1;
        Self::add_to_sum(&mut self.sum, &mut self.comp, x);
        let delta = x - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (x - self.mean);
    }

    // Chan et al. pairwise update
    fn merge(mut self, o: Moments) -> Moments {
        if o.n == 0 {
            self.redraws += o.redraws;
            return self;
        }
        if self.n == 0 {
            let redraws = self.redraws + o.redraws;
            return Moments { redraws, ..o };
        }
        let n = self.n + o.n;
        let delta = o.mean - self.mean;
        self.m2 += o.m2 + delta * delta * (self.n as f64 * o.n as f64 / n as f64);
        self.mean += delta * (o.n as f64 / n as f64);
        Self::add_to_sum(&mut self.sum, &mut self.comp, o.sum);
        Self::add_to_sum(&mut self.sum, &mut self.comp, o.comp);
        self.n = n;
        self.redraws += o.redraws;
        self
    }

    fn estimate(&self, truncation_m: f64) -> LogIntegralEstimate {
        let n = self.n as f64;
        let var = if self.n > 1 { self.m2.max(0.0) / (n - 1.0) } else { 0.0 };
        LogIntegralEstimate {
            mean: (self.sum + self.comp) / n,
            std_error: (var / n).sqrt(),
            samples: self.n,
            truncation_m,
            redraws: self.redraws,
        }
    }
}

/// Mean of `f(z)` for `z` uniform on the unit sphere of `K^d`.
///
/// `f` returns `None` (or a non-finite value) where the integrand is
/// undefined; such draws are redrawn and counted in `redraws`.
pub fn mc_sphere_mean<F>(
    d: usize,
    field: ScalarField,
    samples: usize,
    source: &RandomSource,
    truncation_m: f64,
    f: F,
) -> Result<LogIntegralEstimate>
where
    F: Fn(&[Complex64]) -> Option<f64> + Sync,
{
    if d == 0 {
        return Err(Error::InvalidDimension(d));
    }
    if samples < 2 {
        return Err(Error::InvalidArgument(format!("need at least 2 samples, got {samples}")));
    }
    let chunks = samples.div_ceil(CHUNK);
    let parts: Vec<Result<Moments>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let count = CHUNK.min(samples - c * CHUNK);
            let mut rng = source.chunk_rng(c as u64);
            let mut z = vec![Complex64::new(0.0, 0.0); d];
            let mut m = Moments::default();
            let mut streak = 0;
            while m.n < count {
                spaces::fill_euclidean_sphere(&mut z, field, &mut rng);
                match f(&z) {
                    Some(v) if v.is_finite() => {
                        m.push(v);
                        streak = 0;
                    }
                    _ => {
                        m.redraws += 1;
                        streak += 1;
                        if streak > MAX_REDRAWS {
                            return Err(Error::InvalidArgument(
                                "integrand undefined on a set of positive measure".into(),
                            ));
                        }
                    }
                }
            }
            Ok(m)
        })
        .collect();
    let mut total = Moments::default();
    for part in parts {
        total = total.merge(part?);
    }
    Ok(total.estimate(truncation_m))
}

/// `max{log|⟨x, ψ⟩|, −m}`; `m = ∞` gives the plain log kernel (`−∞` on the
/// zero set).
pub fn truncated_log_kernel(x: &[Complex64], psi: &[Complex64], m: f64) -> Result<f64> {
    let v = spaces::apply(psi, x)?.norm().ln();
    Ok(v.max(-m))
}

/// Law of the functional `ψ` in [`mc_log_pairing_integral`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind", content = "q")]
pub enum Measure {
    /// Normalized surface measure of the Euclidean sphere.
    UniformEuclidean,
    /// Image of the uniform measure under `φ ↦ φ/‖φ‖_q`.
    QPushforward(f64),
}

/// `∫ max{log|⟨x0, ψ⟩|, −m} dη(ψ)` with `η` given by `measure`.
pub fn mc_log_pairing_integral(
    x0: &[Complex64],
    measure: Measure,
    field: ScalarField,
    samples: usize,
    m: f64,
    source: &RandomSource,
) -> Result<LogIntegralEstimate> {
    if x0.iter().all(|z| z.norm() == 0.0) {
        return Err(Error::ZeroVector);
    }
    if m.is_nan() || m < 0.0 {
        return Err(Error::InvalidArgument(format!("truncation level {m} must be nonnegative")));
    }
    let q = match measure {
        Measure::UniformEuclidean => None,
        Measure::QPushforward(q) => Some(check_exponent(q)?),
    };
    mc_sphere_mean(x0.len(), field, samples, source, m, |phi| {
        let mut v = pair(phi, x0).norm().ln();
        if let Some(q) = q {
            v -= p_norm(phi, q).ln();
        }
        Some(v.max(-m))
    })
}

/// Mean of `‖t‖_p^p` over the Euclidean sphere, `1 ≤ p < ∞`.
pub fn mc_pnorm_moment(
    p: f64,
    d: usize,
    field: ScalarField,
    samples: usize,
    source: &RandomSource,
) -> Result<LogIntegralEstimate> {
    check_exponent(p)?;
    if p.is_infinite() {
        return Err(Error::InvalidExponent(p));
    }
    if p == 2.0 {
        return mc_sphere_mean(d, field, samples, source, f64::INFINITY, |_| Some(1.0));
    }
    mc_sphere_mean(d, field, samples, source, f64::INFINITY, |t| {
        Some(t.iter().map(|z| z.norm().powf(p)).sum())
    })
}

/// Mean of `‖t‖_∞` over the Euclidean sphere.
pub fn mc_infnorm_moment(d: usize, field: ScalarField, samples: usize, source: &RandomSource) -> Result<LogIntegralEstimate> {
    if d < 2 {
        return Err(Error::InvalidDimension(d));
    }
    mc_sphere_mean(d, field, samples, source, f64::INFINITY, |t| Some(p_norm(t, f64::INFINITY)))
}

/// Mean of `log(1/‖z‖_p)` over the Euclidean sphere.
pub fn mc_log_inverse_pnorm(
    p: f64,
    d: usize,
    field: ScalarField,
    samples: usize,
    source: &RandomSource,
) -> Result<LogIntegralEstimate> {
    check_exponent(p)?;
    if p == 2.0 {
        return mc_sphere_mean(d, field, samples, source, f64::INFINITY, |_| Some(0.0));
    }
    mc_sphere_mean(d, field, samples, source, f64::INFINITY, |z| Some(-p_norm(z, p).ln()))
}

/// Least-squares line through `(log d, log value)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub points: Vec<(f64, f64)>,
}

impl SlopeFit {
    /// Residuals `log value − (intercept + slope·log d)`.
    pub fn residuals(&self) -> Vec<f64> {
        self.points
            .iter()
            .map(|&(d, v)| v.ln() - self.intercept - self.slope * d.ln())
            .collect()
    }
}

/// Fits `log value ≈ intercept + slope · log d`.
pub fn fit_asymptotic_slope(points: &[(f64, f64)]) -> Result<SlopeFit> {
    for &(d, v) in points {
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::InvalidArgument(format!("value {v} at d = {d} is not positive")));
        }
        if !(d > 0.0) || !d.is_finite() {
            return Err(Error::InvalidArgument(format!("abscissa {d} is not positive")));
        }
    }
    let mut ds: Vec<f64> = points.iter().map(|p| p.0).collect();
    ds.sort_by(f64::total_cmp);
    ds.dedup();
    if ds.len() < 3 {
        return Err(Error::InvalidArgument("need at least 3 distinct d values".into()));
    }
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| {
            let r = y - intercept - slope * x;
            r * r
        })
        .sum();
    let r_squared = if syy > 0.0 { 1.0 - sse / syy } else { 1.0 };
    Ok(SlopeFit {
        slope,
        intercept,
        r_squared,
        points: points.to_vec(),
    })
}
