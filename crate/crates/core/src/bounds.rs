//! Two-sided estimates of `c(ℓ_p^d)`.
//!
//! For unit `x ∈ S_X` and `ψ ∈ S_{X*}`, with `φ, z` uniform on the Euclidean
//! sphere and `η`, `μ` the images of the uniform measure on the unit spheres of
//! `X*` and `X`:
//!
//! * lower line: `exp(−∫ log|⟨x0, ψ⟩| dη(ψ))`, where the integral splits as
//!   `L(d) + E log(1/‖φ‖_q) + log‖x0‖_2`;
//! * upper line: `exp(−inf_ψ ∫ log|⟨x, ψ⟩| dμ(x))`, where the integrand's
//!   dependence on `ψ` is `L(d) + log‖ψ‖_2 + E log(1/‖z‖_p)`.
//!
//! The lower line is only guaranteed for the point `x0` that maximizes the
//! integral, which is the maximizer of `‖x‖_2` on `S_X`
//! ([`X0Strategy::WorstCase`]). The upper optimization therefore reduces to
//! minimizing `‖ψ‖_2` on `S_{X*}`; the reported value re-evaluates the raw
//! integral at the minimizer on a fresh sample stream.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert;
use crate::product_poly::{line_search_ascent, FunctionalSystem, OptimizerConfig};
use crate::sphere_integrals::{self, mc_sphere_mean, LogIntegralEstimate, Measure};
use crate::spaces::{self, p_norm, pair, PSpace, RandomSource, ScalarField, Vector};
use crate::torus;

const LOWER_TAG: u64 = 0x10;
const CANDIDATE_TAG: u64 = 0x11;
const FROZEN_TAG: u64 = 0x20;
const FRESH_TAG: u64 = 0x21;
const PSI_STARTS_TAG: u64 = 0x22;
const SEQUENCE_TAG: u64 = 0x30;

const UNIT_TOL: f64 = 1e-10;

/// A bound `exp(−mean)` with the underlying log-integral estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundLine {
    pub value: f64,
    /// `value · std_error(mean)`, first-order.
    pub std_error: f64,
    pub estimate: LogIntegralEstimate,
}

impl BoundLine {
    fn from_estimate(estimate: LogIntegralEstimate) -> Self {
        let value = (-estimate.mean).exp();
        Self {
            value,
            std_error: value * estimate.std_error,
            estimate,
        }
    }
}

fn ensure_unit(x: &[Complex64], space: &PSpace) -> Result<()> {
    if x.len() != space.dim() {
        return Err(Error::DimensionMismatch {
            expected: space.dim(),
            found: x.len(),
        });
    }
    let norm = p_norm(x, space.p());
    if (norm - 1.0).abs() > UNIT_TOL {
        return Err(Error::NotUnit { norm });
    }
    if space.field() == ScalarField::Real && x.iter().any(|z| z.im != 0.0) {
        return Err(Error::InvalidArgument("complex vector in a real space".into()));
    }
    Ok(())
}

/// `exp(−∫ log|⟨x0, ψ⟩| dη(ψ))` with `η` the image of the uniform measure
/// under `φ ↦ φ/‖φ‖_q`.
pub fn lower_bound_candidate(space: &PSpace, x0: &[Complex64], samples: usize, source: &RandomSource) -> Result<BoundLine> {
    lower_bound_truncated(space, x0, samples, f64::INFINITY, source)
}

/// [`lower_bound_candidate`] with the log kernel floored at `−m`.
pub fn lower_bound_truncated(
    space: &PSpace,
    x0: &[Complex64],
    samples: usize,
    m: f64,
    source: &RandomSource,
) -> Result<BoundLine> {
    ensure_unit(x0, space)?;
    let est = sphere_integrals::mc_log_pairing_integral(x0, Measure::QPushforward(space.q()), space.field(), samples, m, source)?;
    Ok(BoundLine::from_estimate(est))
}

/// Raw estimate of `g(ψ) = ∫ log|⟨x, ψ⟩| dμ(x)` with `x = z/‖z‖_p`.
pub fn g_estimate(space: &PSpace, psi: &[Complex64], samples: usize, source: &RandomSource) -> Result<LogIntegralEstimate> {
    ensure_unit(psi, &space.dual())?;
    let p = space.p();
    mc_sphere_mean(space.dim(), space.field(), samples, source, f64::INFINITY, |z| {
        Some(pair(psi, z).norm().ln() - p_norm(z, p).ln())
    })
}

/// Result of [`upper_bound`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UpperBound {
    pub line: BoundLine,
    pub psi0: Vector,
    /// `g(ψ0)` on the frozen sample set used during the search.
    pub frozen_objective: f64,
    pub converged: bool,
}

/// `log‖ψ‖_2 − log‖ψ‖_q` and its real gradient (the `q`-part is a
/// subgradient at `q ∈ {1, ∞}`).
fn ratio_objective(psi: &[Complex64], q: f64) -> Option<f64> {
    let n2 = p_norm(psi, 2.0);
    (n2 > 0.0).then(|| n2.ln() - p_norm(psi, q).ln())
}

fn ratio_descent_direction(psi: &[Complex64], q: f64, g: &mut [Complex64]) -> bool {
    let n2sq: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
    let nq = p_norm(psi, q);
    if n2sq == 0.0 {
        return false;
    }
    let linf = q.is_infinite();
    for (gk, &x) in g.iter_mut().zip(psi) {
        let m = x.norm();
        let dq = if m == 0.0 {
            Complex64::new(0.0, 0.0)
        } else if linf {
            if m == nq {
                x / (m * nq)
            } else {
                Complex64::new(0.0, 0.0)
            }
        } else if q == 1.0 {
            x / (m * nq)
        } else {
            x * ((m / nq).powf(q - 2.0) / (nq * nq))
        };
        // descent on log‖ψ‖_2 − log‖ψ‖_q
        *gk = dq - x / n2sq;
    }
    true
}

/// Minimizes `‖ψ‖_2` on the unit `q`-sphere from the analytic candidates
/// `e_1`, `(1,…,1)` and `starts` random points; returns the minimizer and
/// whether the winning run converged.
fn minimize_l2_on_dual_sphere(space: &PSpace, cfg: &OptimizerConfig) -> (Vec<Complex64>, bool) {
    let d = space.dim();
    let q = space.q();
    let src = cfg.source.substream(PSI_STARTS_TAG);
    let mut starts: Vec<Vec<Complex64>> = vec![Vector::basis(d, 0).into_inner(), vec![Complex64::new(1.0, 0.0); d]];
    starts.extend((0..cfg.starts as u64).map(|i| {
        let mut rng = src.chunk_rng(i);
        spaces::sample_euclidean_sphere(d, space.field(), &mut rng)
            .expect("d ≥ 1")
            .into_inner()
    }));
    let runs: Vec<(Vec<Complex64>, f64, bool)> = starts
        .into_par_iter()
        .map(|x0| {
            let run = line_search_ascent(
                x0,
                |x| ratio_objective(x, q).map(|v| -v),
                |x, g| ratio_descent_direction(x, q, g),
                |x, dir, t| {
                    let y: Vec<Complex64> = x.iter().zip(dir).map(|(a, b)| a + b * t).collect();
                    let n = p_norm(&y, 2.0);
                    y.into_iter().map(|z| z / n).collect()
                },
                cfg.max_iter,
                cfg.tol,
            );
            (run.x, run.value, run.converged)
        })
        .collect();
    let best = runs
        .into_iter()
        .reduce(|a, b| if b.1 > a.1 { b } else { a })
        .expect("nonempty");
    let nq = p_norm(&best.0, q);
    (best.0.into_iter().map(|z| z / nq).collect(), best.2)
}

/// Upper line `exp(−g(ψ0))` with `ψ0` the minimizer of `g` over `S_{X*}`.
///
/// The search runs on a frozen sample set (the `ψ`-dependence of `g` is exact
/// there), then `g(ψ0)` is re-estimated on a fresh stream.
pub fn upper_bound(space: &PSpace, samples: usize, opt: &OptimizerConfig, source: &RandomSource) -> Result<UpperBound> {
    if samples < 10_000 {
        return Err(Error::InvalidArgument(format!(
            "upper bound needs at least 10^4 samples, got {samples}"
        )));
    }
    let (psi0, converged) = minimize_l2_on_dual_sphere(space, opt);
    let frozen = sphere_integrals::mc_log_inverse_pnorm(space.p(), space.dim(), space.field(), samples, &source.substream(FROZEN_TAG))?;
    let l = hilbert::l_constant(space.dim(), space.field()).unwrap_or(0.0);
    let frozen_objective = if space.dim() == 1 {
        0.0
    } else {
        l + p_norm(&psi0, 2.0).ln() + frozen.mean
    };
    let fresh = g_estimate(space, &psi0, samples, &source.substream(FRESH_TAG))?;
    Ok(UpperBound {
        line: BoundLine::from_estimate(fresh),
        psi0: Vector::new(psi0),
        frozen_objective,
        converged,
    })
}

/// Lower bound for `c_{n_k}` and the per-factor bound, `n_k = d·k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepTwo {
    pub n: usize,
    /// `d^{n/p}`.
    pub cn_lower: f64,
    /// `d^{1/p}`.
    pub per_factor: f64,
}

/// `c_{dk}(ℓ_p^d) ≥ ‖(e_1⋯e_d)^k‖^{−1} = d^{dk/p}`.
pub fn step2_lower_bound(p: f64, d: usize, k: usize) -> Result<StepTwo> {
    spaces::check_exponent(p)?;
    if p.is_infinite() {
        return Err(Error::InvalidExponent(p));
    }
    if d == 0 {
        return Err(Error::InvalidDimension(d));
    }
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    let n = d * k;
    let df = d as f64;
    Ok(StepTwo {
        n,
        cn_lower: df.powf(n as f64 / p),
        per_factor: if p == 1.0 { df } else { df.powf(1.0 / p) },
    })
}

/// `n` independent draws from `η`, as a functional system on `space`.
pub fn empirical_functional_sequence(space: &PSpace, n: usize, source: &RandomSource) -> Result<FunctionalSystem> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    let q = space.q();
    let src = source.substream(SEQUENCE_TAG);
    let rows: Vec<Vector> = (0..n)
        .into_par_iter()
        .map(|j| {
            let mut rng = src.chunk_rng(j as u64);
            let phi = spaces::sample_euclidean_sphere(space.dim(), space.field(), &mut rng).expect("d ≥ 1");
            spaces::pushforward_to_q_sphere(&phi, q).expect("nonzero sample")
        })
        .collect();
    FunctionalSystem::new(rows, *space)
}

/// Choice of `x0` for the lower line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind", content = "candidates")]
pub enum X0Strategy {
    /// The maximizer of `‖x‖_2` on `S_X`: `e_1` for `p ≤ 2`, the flat vector
    /// for `p > 2`. The only choice that yields a guaranteed lower line.
    #[default]
    WorstCase,
    E1,
    /// A uniform Euclidean draw rescaled to `S_X`.
    Random,
    /// Best estimated bound among this many random candidates, re-estimated
    /// on a fresh stream.
    BestOfRandom(usize),
}

/// Settings for [`sandwich_report`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundsConfig {
    pub samples: usize,
    pub truncation_m: f64,
    pub optimizer: OptimizerConfig,
    pub source: RandomSource,
    /// `n` at which the polydisc line `(c_n lower bound)^{1/n}` is evaluated;
    /// the line increases with `n` towards `√d`.
    pub torus_n: f64,
}

impl Default for BoundsConfig {
    fn default() -> Self {
        Self {
            samples: 1_000_000,
            truncation_m: f64::INFINITY,
            optimizer: OptimizerConfig {
                starts: 16,
                ..OptimizerConfig::default()
            },
            source: RandomSource::new(0),
            torus_n: 1e12,
        }
    }
}

/// Which line attains [`BoundReport::lower`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LowerLine {
    MonteCarlo,
    StepTwo,
    Torus,
}

/// The sandwich for one space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub space: PSpace,
    /// Largest of the available lower lines.
    pub lower: f64,
    pub lower_line: LowerLine,
    pub mc_lower: BoundLine,
    pub lower_witness_x0: Vector,
    /// The Monte Carlo lower line is guaranteed (up to sampling error) only
    /// for [`X0Strategy::WorstCase`].
    pub lower_certified: bool,
    pub upper: BoundLine,
    pub upper_witness_psi0: Vector,
    pub upper_converged: bool,
    pub step2_lower: Option<f64>,
    pub torus_lower: Option<f64>,
}

impl BoundReport {
    /// `√(σ_lower² + σ_upper²)` of the Monte Carlo lines.
    pub fn combined_std_error(&self) -> f64 {
        self.mc_lower.std_error.hypot(self.upper.std_error)
    }
}

fn worst_case_x0(space: &PSpace) -> Vec<Complex64> {
    let d = space.dim();
    if space.p() <= 2.0 {
        Vector::basis(d, 0).into_inner()
    } else {
        let c = if space.p().is_infinite() { 1.0 } else { (d as f64).powf(-1.0 / space.p()) };
        vec![Complex64::new(c, 0.0); d]
    }
}

fn random_x0(space: &PSpace, source: &RandomSource, i: u64) -> Vec<Complex64> {
    let mut rng = source.substream(CANDIDATE_TAG).chunk_rng(i);
    let z = spaces::sample_euclidean_sphere(space.dim(), space.field(), &mut rng).expect("d ≥ 1");
    spaces::pushforward_to_q_sphere(&z, space.p()).expect("nonzero").into_inner()
}

/// Lower lines, upper line and their witnesses for one space.
pub fn sandwich_report(space: &PSpace, strategy: X0Strategy, cfg: &BoundsConfig) -> Result<BoundReport> {
    let lower_src = cfg.source.substream(LOWER_TAG);
    let m = cfg.truncation_m;
    let x0 = match strategy {
        X0Strategy::WorstCase => worst_case_x0(space),
        X0Strategy::E1 => Vector::basis(space.dim(), 0).into_inner(),
        X0Strategy::Random => random_x0(space, &cfg.source, 0),
        X0Strategy::BestOfRandom(k) => {
            if k == 0 {
                return Err(Error::InvalidArgument("need at least one candidate".into()));
            }
            let screen = cfg.source.substream(CANDIDATE_TAG ^ 1);
            let scored: Vec<Result<(Vec<Complex64>, f64)>> = (0..k as u64)
                .into_par_iter()
                .map(|i| {
                    let x = random_x0(space, &cfg.source, i);
                    let line = lower_bound_truncated(space, &x, cfg.samples, m, &screen)?;
                    Ok((x, line.value))
                })
                .collect();
            let mut best: Option<(Vec<Complex64>, f64)> = None;
            for s in scored {
                let s = s?;
                if best.as_ref().is_none_or(|b| s.1 > b.1) {
                    best = Some(s);
                }
            }
            best.expect("k ≥ 1").0
        }
    };
    let mc_lower = lower_bound_truncated(space, &x0, cfg.samples, m, &lower_src)?;
    let upper = upper_bound(space, cfg.samples, &cfg.optimizer, &cfg.source)?;

    let step2_lower = if space.p() <= 2.0 {
        Some(step2_lower_bound(space.p(), space.dim(), 1)?.per_factor)
    } else {
        None
    };
    let torus_lower = (space.p().is_infinite() && space.field() == ScalarField::Complex)
        .then(|| torus::cn_infty_per_factor(cfg.torus_n, space.dim() as f64));

    let mut lower = mc_lower.value;
    let mut lower_line = LowerLine::MonteCarlo;
    if let Some(s) = step2_lower.filter(|&s| s > lower) {
        lower = s;
        lower_line = LowerLine::StepTwo;
    }
    if let Some(t) = torus_lower.filter(|&t| t > lower) {
        lower = t;
        lower_line = LowerLine::Torus;
    }

    Ok(BoundReport {
        space: *space,
        lower,
        lower_line,
        mc_lower,
        lower_witness_x0: Vector::new(x0),
        lower_certified: strategy == X0Strategy::WorstCase,
        upper: upper.line,
        upper_witness_psi0: upper.psi0,
        upper_converged: upper.converged,
        step2_lower,
        torus_lower,
    })
}
