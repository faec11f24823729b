//! Products of linear functionals `P = ψ_1⋯ψ_n` and their sup-norms on the
//! unit sphere of `ℓ_p^d`.
//!
//! The sup-norm search maximizes `log|P|` from many random starts:
//!
//! * for `1 < p < ∞` by ascent in the ambient space on the scale-invariant
//!   objective `log|P(x)| − n·log‖x‖_p`, retracting with `x ← x/‖x‖_p`;
//! * for `p ∈ {1, ∞}` (nonsmooth spheres) by projected ascent on the unit
//!   ball, whose maximizers lie on the sphere by homogeneity. Monomial
//!   systems on these spheres use the closed form instead.
//!
//! Every reported value is `|P|` at a unit-norm witness, hence a lower
//! certificate for the true sup-norm.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spaces::{self, pair, p_norm, PSpace, RandomSource, ScalarField, Vector};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const STARTS_TAG: u64 = 0x5354_4152_5453;

/// The functionals `ψ_1, …, ψ_n` of a product polynomial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionalSystem {
    rows: Vec<Vector>,
    space: PSpace,
}

impl FunctionalSystem {
    pub fn new(rows: Vec<Vector>, space: PSpace) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::InvalidArgument("a functional system needs at least one row".into()));
        }
        for (j, row) in rows.iter().enumerate() {
            if row.len() != space.dim() {
                return Err(Error::DimensionMismatch {
                    expected: space.dim(),
                    found: row.len(),
                });
            }
            if row.iter().all(|z| z.norm() == 0.0) {
                return Err(Error::InvalidArgument(format!("row {j} is zero")));
            }
            if space.field() == ScalarField::Real && !row.is_real() {
                return Err(Error::InvalidArgument(format!("row {j} is not real")));
            }
        }
        Ok(Self { rows, space })
    }

    pub fn from_real_rows(rows: &[Vec<f64>], space: PSpace) -> Result<Self> {
        Self::new(rows.iter().map(|r| Vector::real(r)).collect(), space)
    }

    pub fn rows(&self) -> &[Vector] {
        &self.rows
    }

    pub fn space(&self) -> &PSpace {
        &self.space
    }

    /// Number of factors.
    pub fn degree(&self) -> usize {
        self.rows.len()
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    /// True when every row has unit dual norm within `1e-12`.
    pub fn is_normalized(&self) -> bool {
        let q = self.space.q();
        self.rows.iter().all(|r| (r.p_norm(q) - 1.0).abs() <= 1e-12)
    }

    /// Rescales every row to unit dual norm.
    pub fn normalized(&self) -> Self {
        let q = self.space.q();
        let rows = self
            .rows
            .iter()
            .map(|r| r.scaled(Complex64::new(1.0 / r.p_norm(q), 0.0)))
            .collect();
        Self { rows, space: self.space }
    }

    /// `∏_j ‖ψ_j‖_q`.
    pub fn norm_product(&self) -> f64 {
        let q = self.space.q();
        self.rows.iter().map(|r| r.p_norm(q)).product()
    }

    /// Applies `perm` to the coordinates of every row: entry `k` moves to
    /// position `perm[k]`.
    pub fn permute_coordinates(&self, perm: &[usize]) -> Result<Self> {
        let d = self.dim();
        let mut seen = vec![false; d];
        if perm.len() != d || perm.iter().any(|&k| k >= d || std::mem::replace(&mut seen[k], true)) {
            return Err(Error::InvalidArgument("not a permutation".into()));
        }
        let rows = self
            .rows
            .iter()
            .map(|r| {
                let mut out = Vector::zeros(d);
                for (k, &z) in r.iter().enumerate() {
                    out[perm[k]] = z;
                }
                out
            })
            .collect();
        Ok(Self { rows, space: self.space })
    }

    /// Row `j` multiplied by `c`.
    pub fn scale_row(&self, j: usize, c: Complex64) -> Result<Self> {
        if j >= self.rows.len() || c.norm() == 0.0 {
            return Err(Error::InvalidArgument("bad row index or zero scale".into()));
        }
        let mut rows = self.rows.clone();
        rows[j] = rows[j].scaled(c);
        Self::new(rows, self.space)
    }

    fn check_dim(&self, x: &[Complex64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: x.len(),
            });
        }
        Ok(())
    }

    /// `log|P(x)|`, or `None` on the zero set.
    pub(crate) fn log_abs(&self, x: &[Complex64]) -> Option<f64> {
        let mut s = 0.0;
        for r in &self.rows {
            let v = pair(r, x).norm();
            if v == 0.0 {
                return None;
            }
            s += v.ln();
        }
        Some(s)
    }

    /// Real gradient of `log|P|` at `x`, as a complex vector whose real and
    /// imaginary parts are the partial derivatives along `Re x_k`, `Im x_k`.
    pub(crate) fn log_abs_gradient(&self, x: &[Complex64], out: &mut [Complex64]) -> Result<()> {
        out.iter_mut().for_each(|z| *z = ZERO);
        for (j, r) in self.rows.iter().enumerate() {
            let s = pair(r, x);
            if s.norm() == 0.0 {
                return Err(Error::ZeroFactor { index: j });
            }
            let inv = s.inv();
            for (o, &a) in out.iter_mut().zip(r.iter()) {
                *o += a * inv;
            }
        }
        // log|f| = Re log f, so the real gradient of a holomorphic f's
        // log-modulus is the conjugate of the complex derivative f'/f
        out.iter_mut().for_each(|z| *z = z.conj());
        Ok(())
    }
}

/// `P(x) = ∏_j ⟨x, ψ_j⟩`.
pub fn evaluate(sys: &FunctionalSystem, x: &[Complex64]) -> Result<Complex64> {
    sys.check_dim(x)?;
    Ok(sys.rows.iter().fold(Complex64::new(1.0, 0.0), |acc, r| acc * pair(r, x)))
}

/// Steepest-ascent direction of `log|P|` at `x` (`Σ_j ψ_j/ψ_j(x)` in the
/// real case). Fails with [`Error::ZeroFactor`] on the zero set of `P`.
pub fn log_abs_ascent_direction(sys: &FunctionalSystem, x: &[Complex64]) -> Result<Vector> {
    sys.check_dim(x)?;
    let mut g = Vector::zeros(x.len());
    sys.log_abs_gradient(x, &mut g)?;
    Ok(g)
}

/// Settings for the multi-start sup-norm search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    pub starts: usize,
    pub max_iter: usize,
    /// Stop once `log|P|` improves by less than this for a few steps running.
    pub tol: f64,
    pub source: RandomSource,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            starts: 64,
            max_iter: 500,
            tol: 1e-12,
            source: RandomSource::new(0),
        }
    }
}

/// How a [`NormEstimate`] was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SupMethod {
    /// Closed form; the value is exact.
    Exact,
    /// Multi-start ascent with retraction onto a smooth sphere.
    SphereAscent,
    /// Multi-start projected ascent on the unit ball.
    BallAscent,
    /// Covering-net enumeration on the torus.
    TorusNet,
    /// Random subsample of a covering net plus torus ascent.
    TorusSample,
}

/// A sup-norm result with its witness and optional upper certificate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormEstimate {
    pub value: f64,
    pub witness: Vector,
    pub upper_certificate: Option<f64>,
    /// The certificate relies on sampling rather than a full covering net.
    pub heuristic_certificate: bool,
    pub starts: usize,
    pub converged: bool,
    pub method: SupMethod,
}

/// Outcome of one local ascent run.
#[derive(Debug, Clone)]
pub(crate) struct AscentRun {
    pub x: Vec<Complex64>,
    pub value: f64,
    pub converged: bool,
}

/// Line-search ascent shared by the sphere, ball and torus searches.
///
/// `objective` returns `None` off the domain (zero set); `gradient` fills the
/// ascent direction; `step` maps `(x, unit direction, t)` to the next iterate.
pub(crate) fn line_search_ascent<O, G, S>(
    mut x: Vec<Complex64>,
    objective: O,
    mut gradient: G,
    step: S,
    max_iter: usize,
    tol: f64,
) -> AscentRun
where
    O: Fn(&[Complex64]) -> Option<f64>,
    G: FnMut(&[Complex64], &mut [Complex64]) -> bool,
    S: Fn(&[Complex64], &[Complex64], f64) -> Vec<Complex64>,
{
    let mut fx = match objective(&x) {
        Some(v) => v,
        None => {
            return AscentRun {
                x,
                value: f64::NEG_INFINITY,
                converged: false,
            }
        }
    };
    let mut g = vec![ZERO; x.len()];
    let mut t = 0.25;
    let mut small_steps = 0;
    let mut converged = false;
    for _ in 0..max_iter {
        if !gradient(&x, &mut g) {
            break;
        }
        let gn = g.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !(gn > 1e-300) || !gn.is_finite() {
            converged = gn.is_finite();
            break;
        }
        g.iter_mut().for_each(|z| *z /= gn);
        let mut accepted = None;
        while t > 1e-16 {
            let y = step(&x, &g, t);
            if let Some(fy) = objective(&y) {
                if fy > fx {
                    accepted = Some((y, fy));
                    break;
                }
            }
            t *= 0.5;
        }
        let Some((y, fy)) = accepted else {
            // no ascent at working precision
            converged = true;
            break;
        };
        let gain = fy - fx;
        x = y;
        fx = fy;
        t = (t * 2.0).min(1.0);
        if gain <= tol {
            small_steps += 1;
            if small_steps >= 3 {
                converged = true;
                break;
            }
        } else {
            small_steps = 0;
        }
    }
    AscentRun { x, value: fx, converged }
}

fn normalize_p(mut v: Vec<Complex64>, p: f64) -> Vec<Complex64> {
    let n = p_norm(&v, p);
    if n > 0.0 {
        v.iter_mut().for_each(|z| *z /= n);
    }
    v
}

/// Euclidean projection onto the unit ball of `ℓ_1^d` (real or complex):
/// soft-threshold the moduli, keep the phases.
pub(crate) fn project_l1_ball(v: &mut [Complex64]) {
    let total: f64 = v.iter().map(|z| z.norm()).sum();
    if total <= 1.0 {
        return;
    }
    let mut mags: Vec<f64> = v.iter().map(|z| z.norm()).collect();
    mags.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut cum = 0.0;
    let mut theta = 0.0;
    for (i, &m) in mags.iter().enumerate() {
        cum += m;
        let candidate = (cum - 1.0) / (i + 1) as f64;
        if m - candidate > 0.0 {
            theta = candidate;
        }
    }
    for z in v.iter_mut() {
        let m = z.norm();
        *z = if m > theta { *z * ((m - theta) / m) } else { ZERO };
    }
}

/// Projection onto the unit ball of `ℓ_∞^d`: clamp every modulus to 1.
pub(crate) fn project_linf_ball(v: &mut [Complex64]) {
    for z in v.iter_mut() {
        let m = z.norm();
        if m > 1.0 {
            *z /= m;
        }
    }
}

fn real_part_only(v: &mut [Complex64]) {
    v.iter_mut().for_each(|z| z.im = 0.0);
}

fn random_start(sys: &FunctionalSystem, source: &RandomSource, index: u64) -> Vec<Complex64> {
    let space = sys.space();
    let mut rng = source.substream(STARTS_TAG).chunk_rng(index);
    let mut z = vec![ZERO; space.dim()];
    loop {
        spaces::fill_euclidean_sphere(&mut z, space.field(), &mut rng);
        let x = normalize_p(z.clone(), space.p());
        // zero-set starts have measure zero; redraw
        if sys.log_abs(&x).is_some() {
            return x;
        }
    }
}

fn ascend_from(sys: &FunctionalSystem, x0: Vec<Complex64>, cfg: &OptimizerConfig) -> AscentRun {
    let space = *sys.space();
    let p = space.p();
    let n = sys.degree() as f64;
    let real = space.field() == ScalarField::Real;
    let smooth = p > 1.0 && p.is_finite();

    if smooth {
        let objective = |x: &[Complex64]| sys.log_abs(x).map(|v| v - n * p_norm(x, p).ln());
        let gradient = |x: &[Complex64], g: &mut [Complex64]| {
            if sys.log_abs_gradient(x, g).is_err() {
                return false;
            }
            // ∇ log‖x‖_p = |x_k|^{p-2} x_k / ‖x‖_p^p
            let np = p_norm(x, p);
            for (gk, &xk) in g.iter_mut().zip(x) {
                let m = xk.norm();
                if m > 0.0 {
                    *gk -= xk * (n * (m / np).powf(p - 2.0) / (np * np));
                }
            }
            if real {
                real_part_only(g);
            }
            true
        };
        let step = |x: &[Complex64], dir: &[Complex64], t: f64| {
            normalize_p(x.iter().zip(dir).map(|(a, b)| a + b * t).collect(), p)
        };
        line_search_ascent(x0, objective, gradient, step, cfg.max_iter, cfg.tol)
    } else {
        let objective = |x: &[Complex64]| sys.log_abs(x);
        let gradient = |x: &[Complex64], g: &mut [Complex64]| {
            if sys.log_abs_gradient(x, g).is_err() {
                return false;
            }
            if real {
                real_part_only(g);
            }
            true
        };
        let step = |x: &[Complex64], dir: &[Complex64], t: f64| {
            let mut y: Vec<Complex64> = x.iter().zip(dir).map(|(a, b)| a + b * t).collect();
            if p == 1.0 {
                project_l1_ball(&mut y);
            } else {
                project_linf_ball(&mut y);
            }
            y
        };
        let run = line_search_ascent(x0, objective, gradient, step, cfg.max_iter, cfg.tol);
        // maximizers lie on the sphere; push the iterate out by homogeneity
        let x = normalize_p(run.x, p);
        let value = sys.log_abs(&x).unwrap_or(f64::NEG_INFINITY);
        AscentRun {
            x,
            value,
            converged: run.converged,
        }
    }
}

/// Coordinate-functional systems: row `j` is `c_j e_{k_j}`.
fn as_monomial(sys: &FunctionalSystem) -> Option<(Vec<u32>, f64)> {
    let mut k = vec![0u32; sys.dim()];
    let mut coeff = 1.0;
    for r in sys.rows() {
        let mut nz = r.iter().enumerate().filter(|(_, z)| z.norm() != 0.0);
        let (i, z) = nz.next()?;
        if nz.next().is_some() {
            return None;
        }
        k[i] += 1;
        coeff *= z.norm();
    }
    Some((k, coeff))
}

/// Multi-start search for `‖ψ_1⋯ψ_n‖` on the unit sphere of the system's space.
pub fn sup_norm(sys: &FunctionalSystem, cfg: &OptimizerConfig) -> Result<NormEstimate> {
    if cfg.starts == 0 {
        return Err(Error::InvalidArgument("at least one start is required".into()));
    }
    let space = *sys.space();
    let p = space.p();

    if p == 1.0 || p.is_infinite() {
        if let Some((k, coeff)) = as_monomial(sys) {
            let n = sys.degree() as f64;
            let (value, witness) = if p == 1.0 {
                let w: Vec<f64> = k.iter().map(|&ki| ki as f64 / n).collect();
                let v: f64 = k.iter().filter(|&&ki| ki > 0).map(|&ki| (ki as f64 / n).powi(ki as i32)).product();
                (v * coeff, Vector::real(&w))
            } else {
                (coeff, Vector::real(&vec![1.0; space.dim()]))
            };
            return Ok(NormEstimate {
                value,
                witness,
                upper_certificate: Some(value),
                heuristic_certificate: false,
                starts: 0,
                converged: true,
                method: SupMethod::Exact,
            });
        }
    }

    let runs: Vec<AscentRun> = (0..cfg.starts as u64)
        .into_par_iter()
        .map(|i| ascend_from(sys, random_start(sys, &cfg.source, i), cfg))
        .collect();
    // deterministic selection: first index among the maxima
    let best = runs
        .into_iter()
        .reduce(|a, b| if b.value > a.value { b } else { a })
        .expect("at least one start");
    let witness = Vector::new(best.x);
    let value = evaluate(sys, &witness)?.norm();
    Ok(NormEstimate {
        value,
        witness,
        upper_certificate: None,
        heuristic_certificate: false,
        starts: cfg.starts,
        converged: best.converged,
        method: if p > 1.0 && p.is_finite() {
            SupMethod::SphereAscent
        } else {
            SupMethod::BallAscent
        },
    })
}

/// `sup_{‖x‖_p = 1} ∏ |x_i|^{k_i} = ∏_{k_i > 0} (k_i/n)^{k_i/p}` with `n = Σ k_i`.
pub fn monomial_norm_exact(k: &[u32], space: &PSpace) -> Result<f64> {
    if k.len() != space.dim() {
        return Err(Error::DimensionMismatch {
            expected: space.dim(),
            found: k.len(),
        });
    }
    let p = space.p();
    if p.is_infinite() {
        return Err(Error::InvalidExponent(p));
    }
    let n: u64 = k.iter().map(|&x| x as u64).sum();
    if n == 0 {
        return Err(Error::InvalidArgument("exponent vector is all zero".into()));
    }
    let n = n as f64;
    let log: f64 = k
        .iter()
        .filter(|&&ki| ki > 0)
        .map(|&ki| ki as f64 * (ki as f64 / n).ln())
        .sum();
    Ok((log / p).exp())
}
