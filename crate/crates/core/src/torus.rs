//! Random `±1` functional products on `ℓ_∞^d(ℂ)`.
//!
//! A sign matrix `ε` (rows `j = 1..n`, columns `k = 1..d`) defines
//! `F(z) = ∏_j Σ_k ε_k^j z_k`. Its sup-norm over the polydisc is attained on
//! the torus `T^d`, and is computed by enumerating the net of `N`-th roots of
//! unity. Every net value is a lower bound; the Lipschitz estimate
//! `|F(w) − F(z)| ≤ n·e·‖F‖·‖w − z‖_∞` turns the net maximum into the upper
//! certificate `net_max / (1 − n·e·π/N)`.

use std::f64::consts::{E, PI};

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::product_poly::{line_search_ascent, NormEstimate, SupMethod};
use crate::spaces::{RandomSource, Vector};

/// Enumeration requests beyond `2^40` points are refused.
pub const NET_ENUMERATION_LIMIT: u128 = 1 << 40;

/// Largest reduced net that [`sup_norm_polydisc`] enumerates in full.
pub const NET_SEARCH_LIMIT: u64 = 1 << 25;

/// Net points sampled when the reduced net is over [`NET_SEARCH_LIMIT`].
pub const NET_SAMPLE_POINTS: u64 = 1 << 20;

const TOP_K: usize = 8;
const SAMPLE_TAG: u64 = 0x7a11;

/// An `n × d` table of `±1` entries, stored row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SignMatrix {
    n: usize,
    d: usize,
    entries: Vec<i8>,
}

impl SignMatrix {
    pub fn new(rows: &[Vec<i8>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::InvalidArgument("sign matrix needs at least one row".into()));
        }
        let d = rows[0].len();
        if d == 0 {
            return Err(Error::InvalidDimension(0));
        }
        let mut entries = Vec::with_capacity(n * d);
        for r in rows {
            if r.len() != d {
                return Err(Error::DimensionMismatch { expected: d, found: r.len() });
            }
            for &e in r {
                if e != 1 && e != -1 {
                    return Err(Error::InvalidArgument(format!("sign entry {e} is not ±1")));
                }
                entries.push(e);
            }
        }
        Ok(Self { n, d, entries })
    }

    /// Matrix number `index` in the enumeration of all `2^{nd}` matrices:
    /// bit `j·d + k` set means `ε_k^j = −1`.
    pub fn from_index(n: usize, d: usize, index: u64) -> Result<Self> {
        if n == 0 || d == 0 {
            return Err(Error::InvalidArgument("sign matrix dimensions must be positive".into()));
        }
        if n * d > 63 || index >> (n * d) != 0 {
            return Err(Error::InvalidArgument(format!("index {index} out of range for {n}×{d}")));
        }
        let entries = (0..n * d).map(|b| if index >> b & 1 == 1 { -1 } else { 1 }).collect();
        Ok(Self { n, d, entries })
    }

    /// Independent uniform signs.
    pub fn random<R: Rng + ?Sized>(n: usize, d: usize, rng: &mut R) -> Result<Self> {
        if n == 0 || d == 0 {
            return Err(Error::InvalidArgument("sign matrix dimensions must be positive".into()));
        }
        let entries = (0..n * d).map(|_| if rng.random::<bool>() { 1 } else { -1 }).collect();
        Ok(Self { n, d, entries })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn row(&self, j: usize) -> &[i8] {
        &self.entries[j * self.d..(j + 1) * self.d]
    }

    pub fn rows(&self) -> Vec<Vec<i8>> {
        (0..self.n).map(|j| self.row(j).to_vec()).collect()
    }

    pub fn entries(&self) -> &[i8] {
        &self.entries
    }

    pub fn negate_row(&self, j: usize) -> Result<Self> {
        if j >= self.n {
            return Err(Error::InvalidArgument(format!("row {j} out of range")));
        }
        let mut out = self.clone();
        out.entries[j * self.d..(j + 1) * self.d].iter_mut().for_each(|e| *e = -*e);
        Ok(out)
    }

    #[inline]
    fn factor(&self, j: usize, z: &[Complex64]) -> Complex64 {
        self.row(j)
            .iter()
            .zip(z)
            .fold(Complex64::new(0.0, 0.0), |acc, (&e, &zk)| if e > 0 { acc + zk } else { acc - zk })
    }

    #[inline]
    fn eval_unchecked(&self, z: &[Complex64]) -> Complex64 {
        (0..self.n).fold(Complex64::new(1.0, 0.0), |acc, j| acc * self.factor(j, z))
    }

    fn check_dim(&self, z: &[Complex64]) -> Result<()> {
        if z.len() != self.d {
            return Err(Error::DimensionMismatch { expected: self.d, found: z.len() });
        }
        Ok(())
    }
}

/// `F(z) = ∏_j Σ_k ε_k^j z_k`.
pub fn f_evaluate(sign: &SignMatrix, z: &[Complex64]) -> Result<Complex64> {
    sign.check_dim(z)?;
    Ok(sign.eval_unchecked(z))
}

fn check_torus(z: &[Complex64]) -> Result<()> {
    for (index, w) in z.iter().enumerate() {
        let modulus = w.norm();
        if (modulus - 1.0).abs() > 1e-12 {
            return Err(Error::OffTorus { index, modulus });
        }
    }
    Ok(())
}

/// How to average over sign matrices.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "mode")]
pub enum SignAverage {
    /// All `2^{nd}` matrices; requires `n·d ≤ 20`.
    Exhaustive,
    /// `trials` uniform matrices.
    MonteCarlo { trials: usize, source: RandomSource },
}

/// An average over sign matrices.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignMean {
    pub value: f64,
    pub std_error: f64,
    pub matrices: u64,
}

const EXHAUSTIVE_MAX_ND: usize = 20;

fn sign_mean<F>(n: usize, d: usize, mode: &SignAverage, f: F) -> Result<SignMean>
where
    F: Fn(&SignMatrix) -> f64 + Sync,
{
    if n == 0 || d == 0 {
        return Err(Error::InvalidArgument("n and d must be positive".into()));
    }
    match *mode {
        SignAverage::Exhaustive => {
            if n * d > EXHAUSTIVE_MAX_ND {
                return Err(Error::ResourceLimit(format!(
                    "exhaustive averaging needs n·d ≤ {EXHAUSTIVE_MAX_ND}, got {}",
                    n * d
                )));
            }
            let count = 1u64 << (n * d);
            let sum: f64 = (0..count)
                .into_par_iter()
                .map(|i| f(&SignMatrix::from_index(n, d, i).expect("index in range")))
                .collect::<Vec<_>>()
                .into_iter()
                .sum();
            Ok(SignMean {
                value: sum / count as f64,
                std_error: 0.0,
                matrices: count,
            })
        }
        SignAverage::MonteCarlo { trials, source } => {
            if trials < 2 {
                return Err(Error::InvalidArgument("need at least 2 trials".into()));
            }
            let vals: Vec<f64> = (0..trials as u64)
                .into_par_iter()
                .map(|t| f(&SignMatrix::random(n, d, &mut source.chunk_rng(t)).expect("positive dims")))
                .collect();
            let m = vals.len() as f64;
            let mean = vals.iter().sum::<f64>() / m;
            let var = vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (m - 1.0);
            Ok(SignMean {
                value: mean,
                std_error: (var / m).sqrt(),
                matrices: trials as u64,
            })
        }
    }
}

/// `E|F(z, ·)|²` over uniform `n × d` sign matrices, for `z ∈ T^d`.
pub fn second_moment(n: usize, z: &[Complex64], mode: &SignAverage) -> Result<SignMean> {
    check_torus(z)?;
    sign_mean(n, z.len(), mode, |s| s.eval_unchecked(z).norm_sqr())
}

/// Empirical tail `P(|F(z, ·)| > R)` next to the Chebyshev bound `d^n / R²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailCheck {
    pub empirical: f64,
    pub std_error: f64,
    pub bound: f64,
    /// `empirical ≤ bound`, allowing three binomial standard errors in
    /// Monte Carlo mode.
    pub holds: bool,
}

pub fn chebyshev_tail_check(n: usize, z: &[Complex64], r: f64, mode: &SignAverage) -> Result<TailCheck> {
    check_torus(z)?;
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::InvalidArgument(format!("radius {r} must be positive")));
    }
    let d = z.len();
    let tail = sign_mean(n, d, mode, |s| if s.eval_unchecked(z).norm() > r { 1.0 } else { 0.0 })?;
    let bound = (d as f64).powi(n as i32) / (r * r);
    let se = match mode {
        SignAverage::Exhaustive => 0.0,
        SignAverage::MonteCarlo { .. } => (tail.value * (1.0 - tail.value) / tail.matrices as f64).sqrt(),
    };
    Ok(TailCheck {
        empirical: tail.value,
        std_error: se,
        bound,
        holds: tail.value <= bound + 3.0 * se,
    })
}

/// The net `{(e^{2πi j_1/N}, …, e^{2πi j_d/N})}` of `N^d` torus points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorusNet {
    pub n_points: usize,
    pub d: usize,
}

impl TorusNet {
    pub fn new(n_points: usize, d: usize) -> Result<Self> {
        if n_points == 0 {
            return Err(Error::InvalidArgument("net resolution N must be at least 1".into()));
        }
        if d == 0 {
            return Err(Error::InvalidDimension(0));
        }
        Ok(Self { n_points, d })
    }

    /// `N^d`, or `None` beyond `u128`.
    pub fn size(&self) -> Option<u128> {
        (self.n_points as u128).checked_pow(self.d as u32)
    }

    /// `ℓ_∞` covering radius `π/N` (arc length, which dominates the chord).
    pub fn covering_radius(&self) -> f64 {
        PI / self.n_points as f64
    }

    /// Net point closest to `z` coordinatewise, and its `ℓ_∞` distance.
    pub fn nearest(&self, z: &[Complex64]) -> Result<(Vec<usize>, f64)> {
        if z.len() != self.d {
            return Err(Error::DimensionMismatch { expected: self.d, found: z.len() });
        }
        check_torus(z)?;
        let nn = self.n_points as f64;
        let roots = roots_of_unity(self.n_points);
        let mut idx = Vec::with_capacity(self.d);
        let mut dist = 0.0f64;
        for w in z {
            let j = (w.arg() * nn / (2.0 * PI)).round().rem_euclid(nn) as usize % self.n_points;
            dist = dist.max((w - roots[j]).norm());
            idx.push(j);
        }
        Ok((idx, dist))
    }
}

fn roots_of_unity(n: usize) -> Vec<Complex64> {
    (0..n).map(|j| Complex64::from_polar(1.0, 2.0 * PI * j as f64 / n as f64)).collect()
}

/// Lexicographic iterator over a [`TorusNet`], last coordinate fastest.
#[derive(Debug, Clone)]
pub struct NetPoints {
    roots: Vec<Complex64>,
    idx: Vec<usize>,
    done: bool,
}

impl Iterator for NetPoints {
    type Item = Vector;

    fn next(&mut self) -> Option<Vector> {
        if self.done {
            return None;
        }
        let v = Vector::new(self.idx.iter().map(|&j| self.roots[j]).collect());
        let n = self.roots.len();
        self.done = true;
        for j in self.idx.iter_mut().rev() {
            *j += 1;
            if *j < n {
                self.done = false;
                break;
            }
            *j = 0;
        }
        Some(v)
    }
}

/// All `N^d` net points in lexicographic index order.
pub fn net_points(net: &TorusNet) -> Result<NetPoints> {
    match net.size() {
        Some(s) if s <= NET_ENUMERATION_LIMIT => Ok(NetPoints {
            roots: roots_of_unity(net.n_points),
            idx: vec![0; net.d],
            done: false,
        }),
        _ => Err(Error::ResourceLimit(format!(
            "net of {}^{} points exceeds the 2^40 enumeration limit",
            net.n_points, net.d
        ))),
    }
}

/// `n^n / (n−1)^{n−1}`, with `1` at `n ≤ 1`.
pub fn harris_factor(n: usize) -> f64 {
    if n <= 1 {
        return 1.0;
    }
    let nf = n as f64;
    (nf * nf.ln() - (nf - 1.0) * (nf - 1.0).ln()).exp()
}

/// Smallest net resolution with a positive contraction `1 − n·e·π/N`
/// of at least one half.
pub fn min_net_resolution(n: usize) -> usize {
    (2.0 * PI * n as f64 * E).ceil() as usize
}

/// `1 / (1 − n·e·π/N)`.
pub fn certificate_factor(n: usize, net_n: usize) -> f64 {
    1.0 / (1.0 - n as f64 * E * PI / net_n as f64)
}

fn decode(mut index: u64, n_points: usize, out: &mut [usize]) {
    for j in out.iter_mut().rev() {
        *j = (index % n_points as u64) as usize;
        index /= n_points as u64;
    }
}

/// Top-`k` by value, ties broken by lower index.
fn push_top(top: &mut Vec<(f64, u64)>, cand: (f64, u64)) {
    let pos = top
        .iter()
        .position(|&(v, i)| cand.0 > v || (cand.0 == v && cand.1 < i))
        .unwrap_or(top.len());
    if pos < TOP_K {
        top.insert(pos, cand);
        top.truncate(TOP_K);
    }
}

fn theta_point(theta: &[Complex64]) -> Vec<Complex64> {
    theta.iter().map(|t| Complex64::from_polar(1.0, t.re)).collect()
}

/// Ascent of `log|F(e^{iθ})|` in the angles `θ`, keeping iterates on `T^d`.
fn torus_ascent(sign: &SignMatrix, z0: &[Complex64]) -> (Vec<Complex64>, f64) {
    let theta0: Vec<Complex64> = z0.iter().map(|z| Complex64::new(z.arg(), 0.0)).collect();
    let objective = |th: &[Complex64]| {
        let v = sign.eval_unchecked(&theta_point(th)).norm();
        (v > 0.0).then(|| v.ln())
    };
    let gradient = |th: &[Complex64], g: &mut [Complex64]| {
        let z = theta_point(th);
        g.iter_mut().for_each(|x| *x = Complex64::new(0.0, 0.0));
        for j in 0..sign.n() {
            let phi = sign.factor(j, &z);
            if phi.norm() == 0.0 {
                return false;
            }
            // ∂θ_k log|φ_j| = −Im(ε_k z_k / φ_j)
            for ((gk, &zk), &e) in g.iter_mut().zip(&z).zip(sign.row(j)) {
                gk.re -= (zk * e as f64 / phi).im;
            }
        }
        true
    };
    let step = |th: &[Complex64], dir: &[Complex64], t: f64| th.iter().zip(dir).map(|(a, b)| a + b * t).collect();
    let run = line_search_ascent(theta0, objective, gradient, step, 200, 1e-14);
    let z = theta_point(&run.x);
    let v = sign.eval_unchecked(&z).norm();
    (z, v)
}

/// Sup-norm of `F` over the unit polydisc via the reduced `N`-net.
///
/// `|F|` is invariant under `z ↦ λz` for unimodular `λ`, so the search fixes
/// `z_1 = 1` and enumerates the remaining `N^{d−1}` coordinates; the covering
/// radius is unchanged. With `refine`, the best net points are polished by
/// torus ascent. Nets over [`NET_SEARCH_LIMIT`] are subsampled, and the
/// certificate is then marked heuristic.
pub fn sup_norm_polydisc(sign: &SignMatrix, net_n: usize, refine: bool) -> Result<NormEstimate> {
    sup_norm_polydisc_with(sign, net_n, refine, &RandomSource::new(0))
}

/// [`sup_norm_polydisc`] with an explicit source for the subsampled case.
pub fn sup_norm_polydisc_with(
    sign: &SignMatrix,
    net_n: usize,
    refine: bool,
    source: &RandomSource,
) -> Result<NormEstimate> {
    let n = sign.n();
    let d = sign.d();
    let need = min_net_resolution(n);
    if net_n < need {
        return Err(Error::InvalidArgument(format!(
            "net resolution {net_n} is below ceil(2πne) = {need} for n = {n}"
        )));
    }
    let reduced = (net_n as u128).checked_pow(d as u32 - 1);
    if reduced.is_none() {
        return Err(Error::ResourceLimit(format!("torus net size {net_n}^{} overflows", d - 1)));
    }
    let full = reduced.is_some_and(|s| s <= NET_SEARCH_LIMIT as u128);
    let roots = roots_of_unity(net_n);
    let (count, sampled) = if full {
        (reduced.unwrap() as u64, false)
    } else {
        (NET_SAMPLE_POINTS, true)
    };

    const BLOCK: u64 = 4096;
    let blocks = count.div_ceil(BLOCK);
    let sample_src = source.substream(SAMPLE_TAG);
    let tops: Vec<Vec<(f64, u64)>> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut idx = vec![0usize; d - 1];
            let mut z = vec![Complex64::new(1.0, 0.0); d];
            let mut top = Vec::with_capacity(TOP_K + 1);
            let mut rng = sample_src.chunk_rng(b);
            for i in b * BLOCK..((b + 1) * BLOCK).min(count) {
                if sampled {
                    idx.iter_mut().for_each(|j| *j = rng.random_range(0..net_n));
                } else {
                    decode(i, net_n, &mut idx);
                }
                for (zk, &j) in z[1..].iter_mut().zip(&idx) {
                    *zk = roots[j];
                }
                let v = sign.eval_unchecked(&z).norm();
                let key = if sampled { encode(&idx, net_n) } else { i };
                push_top(&mut top, (v, key));
            }
            top
        })
        .collect();
    let mut top = Vec::with_capacity(TOP_K + 1);
    for t in tops {
        for c in t {
            push_top(&mut top, c);
        }
    }
    let point = |key: u64| {
        let mut idx = vec![0usize; d - 1];
        decode(key, net_n, &mut idx);
        let mut z = vec![Complex64::new(1.0, 0.0); d];
        for (zk, &j) in z[1..].iter_mut().zip(&idx) {
            *zk = roots[j];
        }
        z
    };
    let (net_max, best_key) = top[0];
    let mut witness = point(best_key);
    let mut value = net_max;
    if refine {
        let polished: Vec<(Vec<Complex64>, f64)> =
            top.par_iter().map(|&(_, key)| torus_ascent(sign, &point(key))).collect();
        for (z, v) in polished {
            if v > value {
                value = v;
                witness = z;
            }
        }
    }
    Ok(NormEstimate {
        value,
        witness: Vector::new(witness),
        upper_certificate: Some(net_max * certificate_factor(n, net_n)),
        heuristic_certificate: sampled,
        starts: count as usize,
        converged: true,
        method: if sampled { SupMethod::TorusSample } else { SupMethod::TorusNet },
    })
}

fn encode(idx: &[usize], n_points: usize) -> u64 {
    idx.iter().fold(0u64, |acc, &j| acc * n_points as u64 + j as u64)
}

/// How [`search_good_signs`] picks matrices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SignSearch {
    Random,
    /// Every matrix, in index order; requires `n·d ≤ 16`.
    Exhaustive,
}

/// Outcome of a search for a sign matrix with small sup-norm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RademacherReport {
    pub n: usize,
    pub d: usize,
    pub net_n: usize,
    pub sign: SignMatrix,
    pub sup_norm: NormEstimate,
    /// `2·√((24n)^d · d^n)`.
    pub threshold_2r: f64,
    /// The best certificate is at most `threshold_2r`.
    pub satisfied: bool,
    pub trials_used: usize,
}

const EXHAUSTIVE_SEARCH_MAX_ND: usize = 16;

/// Draws `trials` sign matrices (or all of them) and keeps the one with the
/// smallest upper certificate, lowest index on ties.
pub fn search_good_signs(
    n: usize,
    d: usize,
    trials: usize,
    mode: SignSearch,
    net_n: Option<usize>,
    source: &RandomSource,
) -> Result<RademacherReport> {
    if n == 0 || d == 0 {
        return Err(Error::InvalidArgument("n and d must be positive".into()));
    }
    let net_n = net_n.unwrap_or(24 * n);
    let count = match mode {
        SignSearch::Random => {
            if trials == 0 {
                return Err(Error::InvalidArgument("at least one trial is required".into()));
            }
            trials
        }
        SignSearch::Exhaustive => {
            if n * d > EXHAUSTIVE_SEARCH_MAX_ND {
                return Err(Error::ResourceLimit(format!(
                    "exhaustive sign search needs n·d ≤ {EXHAUSTIVE_SEARCH_MAX_ND}, got {}",
                    n * d
                )));
            }
            1usize << (n * d)
        }
    };
    let results: Vec<Result<(SignMatrix, NormEstimate)>> = (0..count as u64)
        .into_par_iter()
        .map(|t| {
            let sign = match mode {
                SignSearch::Random => SignMatrix::random(n, d, &mut source.chunk_rng(t))?,
                SignSearch::Exhaustive => SignMatrix::from_index(n, d, t)?,
            };
            let est = sup_norm_polydisc_with(&sign, net_n, true, &source.substream(t))?;
            Ok((sign, est))
        })
        .collect();
    let mut best: Option<(SignMatrix, NormEstimate)> = None;
    for r in results {
        let (s, e) = r?;
        let better = match &best {
            None => true,
            Some((_, b)) => e.upper_certificate < b.upper_certificate,
        };
        if better {
            best = Some((s, e));
        }
    }
    let (sign, sup_norm) = best.expect("at least one matrix");
    let r2 = ((24 * n) as f64).powi(d as i32) * (d as f64).powi(n as i32);
    let threshold_2r = if r2.is_finite() {
        2.0 * r2.sqrt()
    } else {
        2.0 * (0.5 * (d as f64 * ((24 * n) as f64).ln() + n as f64 * (d as f64).ln())).exp()
    };
    let satisfied = sup_norm.upper_certificate.is_some_and(|c| c <= threshold_2r);
    Ok(RademacherReport {
        n,
        d,
        net_n,
        sign,
        sup_norm,
        threshold_2r,
        satisfied,
        trials_used: count,
    })
}

/// `log((1/2)·√(d^n / (24n)^d))`.
pub fn cn_infty_lower_bound_ln(n: f64, d: f64) -> f64 {
    -std::f64::consts::LN_2 + 0.5 * (n * d.ln() - d * (24.0 * n).ln())
}

/// `(1/2)·√(d^n / (24n)^d)`, a lower bound for `c_n(ℓ_∞^d(ℂ))`.
pub fn cn_infty_lower_bound(n: usize, d: usize) -> Result<f64> {
    if n == 0 || d == 0 {
        return Err(Error::InvalidArgument("n and d must be positive".into()));
    }
    let num = (d as f64).powi(n as i32);
    let den = ((24 * n) as f64).powi(d as i32);
    let direct = 0.5 * (num / den).sqrt();
    if num.is_finite() && den.is_finite() && direct > 0.0 {
        Ok(direct)
    } else {
        Ok(cn_infty_lower_bound_ln(n as f64, d as f64).exp())
    }
}

/// `n`-th root of [`cn_infty_lower_bound`], a lower bound for
/// `c(ℓ_∞^d(ℂ))`. Increasing in `n` with limit `√d`.
pub fn cn_infty_per_factor(n: f64, d: f64) -> f64 {
    (cn_infty_lower_bound_ln(n, d) / n).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::RandomSource;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_torus(d: usize, rng: &mut impl Rng) -> Vec<Complex64> {
        (0..d).map(|_| Complex64::from_polar(1.0, rng.random_range(0.0..2.0 * PI))).collect()
    }

    #[test]
    fn evaluate_examples() {
        let s = SignMatrix::new(&[vec![1, 1]]).unwrap();
        assert_eq!(f_evaluate(&s, &[c(1.0, 0.0), c(1.0, 0.0)]).unwrap(), c(2.0, 0.0));
        let s = SignMatrix::new(&[vec![1, 1, 1], vec![1, 1, 1]]).unwrap();
        assert_eq!(f_evaluate(&s, &[c(1.0, 0.0); 3]).unwrap(), c(9.0, 0.0));
        let s = SignMatrix::new(&[vec![1, 1], vec![1, -1]]).unwrap();
        let z = [c(0.3, 0.7), c(-1.1, 0.2)];
        let want = z[0] * z[0] - z[1] * z[1];
        assert!((f_evaluate(&s, &z).unwrap() - want).norm() < 1e-14);
        assert!(f_evaluate(&s, &z[..1]).is_err());
        assert!(SignMatrix::new(&[vec![1, 0]]).is_err());
        assert!(SignMatrix::new(&[vec![1, 1], vec![1]]).is_err());
    }

    #[test]
    fn from_index_covers_all_matrices() {
        let mut seen = std::collections::HashSet::new();
        for i in 0..16 {
            seen.insert(SignMatrix::from_index(2, 2, i).unwrap());
        }
        assert_eq!(seen.len(), 16);
        assert!(SignMatrix::from_index(2, 2, 16).is_err());
    }

    #[test]
    fn second_moment_examples() {
        let m = second_moment(1, &[c(1.0, 0.0), c(0.0, 1.0)], &SignAverage::Exhaustive).unwrap();
        assert_eq!(m.value, 2.0);
        assert_eq!(m.matrices, 4);
        let z = [Complex64::from_polar(1.0, 0.3), Complex64::from_polar(1.0, 2.0), c(-1.0, 0.0)];
        let m = second_moment(2, &z, &SignAverage::Exhaustive).unwrap();
        assert!((m.value - 9.0).abs() < 1e-12);
        let mc = SignAverage::MonteCarlo {
            trials: 100_000,
            source: RandomSource::new(3),
        };
        let z4 = random_torus(4, &mut RandomSource::new(4).rng());
        let m = second_moment(3, &z4, &mc).unwrap();
        assert!((m.value - 64.0).abs() <= 3.0 * m.std_error, "{} ± {}", m.value, m.std_error);
        assert!(matches!(
            second_moment(1, &[c(0.5, 0.0)], &SignAverage::Exhaustive),
            Err(Error::OffTorus { .. })
        ));
        assert!(matches!(
            second_moment(3, &[c(1.0, 0.0); 7], &SignAverage::Exhaustive),
            Err(Error::ResourceLimit(_))
        ));
    }

    #[test]
    fn chebyshev_examples() {
        let z = [c(1.0, 0.0), c(1.0, 0.0)];
        let t = chebyshev_tail_check(1, &z, 3.0, &SignAverage::Exhaustive).unwrap();
        assert_eq!(t.empirical, 0.0);
        assert!((t.bound - 2.0 / 9.0).abs() < 1e-15 && t.holds);
        let t = chebyshev_tail_check(1, &z, 1.0, &SignAverage::Exhaustive).unwrap();
        assert_eq!((t.empirical, t.bound), (0.5, 2.0));
        let far = chebyshev_tail_check(2, &z, 1e3, &SignAverage::Exhaustive).unwrap();
        assert_eq!(far.empirical, 0.0);
        assert!(chebyshev_tail_check(1, &z, 0.0, &SignAverage::Exhaustive).is_err());
    }

    #[test]
    fn net_examples() {
        let pts: Vec<Vector> = net_points(&TorusNet::new(1, 3).unwrap()).unwrap().collect();
        assert_eq!(pts.len(), 1);
        assert!(pts[0].iter().all(|z| (z - c(1.0, 0.0)).norm() < 1e-15));

        let pts: Vec<Vector> = net_points(&TorusNet::new(4, 1).unwrap()).unwrap().collect();
        let want = [c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0), c(0.0, -1.0)];
        assert_eq!(pts.len(), 4);
        for (p, w) in pts.iter().zip(want) {
            assert!((p[0] - w).norm() < 1e-15);
        }

        let pts: Vec<Vector> = net_points(&TorusNet::new(3, 2).unwrap()).unwrap().collect();
        assert_eq!(pts.len(), 9);
        assert!((pts[1][1] - Complex64::from_polar(1.0, 2.0 * PI / 3.0)).norm() < 1e-15);
        assert!((pts[3][0] - Complex64::from_polar(1.0, 2.0 * PI / 3.0)).norm() < 1e-15);

        assert!(matches!(net_points(&TorusNet::new(1 << 14, 3).unwrap()), Err(Error::ResourceLimit(_))));
        assert!(TorusNet::new(0, 2).is_err());
    }

    #[test]
    fn covering_radius_holds() {
        let net = TorusNet::new(24, 2).unwrap();
        let mut rng = RandomSource::new(5).rng();
        for _ in 0..10_000 {
            let z = random_torus(2, &mut rng);
            let (_, dist) = net.nearest(&z).unwrap();
            assert!(dist <= net.covering_radius());
        }
    }

    #[test]
    fn harris_examples() {
        assert_eq!(harris_factor(1), 1.0);
        assert!((harris_factor(2) - 4.0).abs() < 1e-13);
        assert!((harris_factor(3) - 6.75).abs() < 1e-13);
        assert!((harris_factor(10) - 1e10 / 9f64.powi(9)).abs() < 1e-9);
        for n in 1..200 {
            assert!(harris_factor(n) <= n as f64 * E);
        }
    }

    #[test]
    fn polydisc_examples() {
        for idx in 0..4 {
            let s = SignMatrix::from_index(1, 2, idx).unwrap();
            let est = sup_norm_polydisc(&s, 24, true).unwrap();
            assert!((est.value - 2.0).abs() < 1e-12);
            assert!(est.upper_certificate.unwrap() <= 2.0 * certificate_factor(1, 24) + 1e-12);
        }
        let diff = SignMatrix::new(&[vec![1, 1], vec![1, -1]]).unwrap();
        let est = sup_norm_polydisc(&diff, 48, true).unwrap();
        assert!((est.value - 2.0).abs() < 1e-9);
        let same = SignMatrix::new(&[vec![1, 1], vec![1, 1]]).unwrap();
        let est = sup_norm_polydisc(&same, 48, false).unwrap();
        assert!((est.value - 4.0).abs() < 1e-12);
        assert!(est.upper_certificate.unwrap() <= 2.0 * est.value);
        assert!(sup_norm_polydisc(&same, 20, false).is_err());
    }

    #[test]
    fn reduced_net_matches_full_net() {
        let mut rng = RandomSource::new(6).rng();
        for _ in 0..10 {
            let s = SignMatrix::random(2, 3, &mut rng).unwrap();
            let full = net_points(&TorusNet::new(48, 3).unwrap())
                .unwrap()
                .map(|z| f_evaluate(&s, &z).unwrap().norm())
                .fold(0.0f64, f64::max);
            let est = sup_norm_polydisc(&s, 48, false).unwrap();
            assert!((full - est.value).abs() <= 1e-12 * full);
        }
    }

    #[test]
    fn lipschitz_bound() {
        let mut rng = RandomSource::new(7).rng();
        for _ in 0..1000 {
            let n = rng.random_range(1..=3);
            let d = rng.random_range(1..=3);
            let s = SignMatrix::random(n, d, &mut rng).unwrap();
            let cert = sup_norm_polydisc(&s, 24 * n, false).unwrap().upper_certificate.unwrap();
            let ball = |rng: &mut rand_chacha::ChaCha8Rng| -> Vec<Complex64> {
                (0..d)
                    .map(|_| Complex64::from_polar(rng.random_range(0.0..=1.0), rng.random_range(0.0..2.0 * PI)))
                    .collect()
            };
            let (w, z) = (ball(&mut rng), ball(&mut rng));
            let dist = w.iter().zip(&z).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
            let lhs = (f_evaluate(&s, &w).unwrap() - f_evaluate(&s, &z).unwrap()).norm();
            assert!(lhs <= n as f64 * E * cert * dist + 1e-12);
        }
    }

    #[test]
    fn invariances() {
        let mut rng = RandomSource::new(8).rng();
        let s = SignMatrix::random(3, 3, &mut rng).unwrap();
        let z = random_torus(3, &mut rng);
        let lambda = Complex64::from_polar(1.0, 1.234);
        let zl: Vec<Complex64> = z.iter().map(|w| w * lambda).collect();
        let f = f_evaluate(&s, &z).unwrap();
        assert!((f_evaluate(&s, &zl).unwrap() - f * lambda.powi(3)).norm() < 1e-12);
        let flipped = s.negate_row(1).unwrap();
        assert!((f_evaluate(&flipped, &z).unwrap() + f).norm() < 1e-12);
        let a = sup_norm_polydisc(&s, 72, true).unwrap();
        let b = sup_norm_polydisc(&flipped, 72, true).unwrap();
        assert_eq!(a.value, b.value);
    }

    #[test]
    fn search_examples() {
        let src = RandomSource::new(9);
        let r = search_good_signs(2, 2, 0, SignSearch::Exhaustive, None, &src).unwrap();
        assert_eq!(r.trials_used, 16);
        assert!((r.sup_norm.value - 2.0).abs() < 1e-9);
        assert_eq!(r.threshold_2r, 192.0);
        assert!(r.satisfied);

        let r = search_good_signs(3, 3, 20, SignSearch::Random, None, &src).unwrap();
        assert!(r.sup_norm.value >= 27f64.sqrt());
        assert!(r.sup_norm.upper_certificate.unwrap() <= 2.0 * r.sup_norm.value);
        let again = search_good_signs(3, 3, 20, SignSearch::Random, None, &src).unwrap();
        assert_eq!(r, again);
    }

    #[test]
    fn subsampled_net_is_flagged() {
        let s = SignMatrix::random(2, 7, &mut RandomSource::new(10).rng()).unwrap();
        let est = sup_norm_polydisc(&s, 48, true).unwrap();
        assert!(est.heuristic_certificate);
        assert_eq!(est.method, SupMethod::TorusSample);
        assert!(est.value >= 7.0);
    }

    #[test]
    fn polydisc_bound_examples() {
        let v = cn_infty_lower_bound(2, 2).unwrap();
        assert!((v - 0.5 * (4.0f64 / 2304.0).sqrt()).abs() < 1e-15);
        // n = 1: (1/2)√(d/24^d)
        for d in [1usize, 5, 100] {
            let v = cn_infty_lower_bound(1, d).unwrap();
            let want = 0.5 * (d as f64 / 24f64.powi(d as i32)).sqrt();
            assert!((v - want).abs() <= 1e-14 * want);
        }
        assert!((cn_infty_lower_bound(1, 1).unwrap() - 0.5 / 24f64.sqrt()).abs() < 1e-15);
        let huge = cn_infty_lower_bound(3, 400).unwrap();
        assert!(huge >= 0.0 && huge.is_finite());
        let ln = cn_infty_lower_bound_ln(3.0, 400.0);
        assert!((ln - (-(2f64.ln()) + 0.5 * (3.0 * 400f64.ln() - 400.0 * 72f64.ln()))).abs() < 1e-10);
        let d = 1e6;
        let mut last = f64::NEG_INFINITY;
        for n in 1..=50 {
            let r = cn_infty_lower_bound_ln(n as f64, d) / n as f64;
            assert!(r > last && r < 1000f64.ln());
            last = r;
        }
        assert!(cn_infty_per_factor(1e15, d) > 999.99);
    }
}
