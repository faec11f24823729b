//! Adaptive Gauss–Kronrod (7/15) quadrature and the one-dimensional
//! reductions of the sphere integrals `L(d, K)`.

use crate::error::{Error, Result};
use crate::spaces::ScalarField;

// 15-point Kronrod abscissae (positive half, descending) and weights; the
// 7-point Gauss rule uses every other abscissa.
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for i in 0..7 {
        let dx = h * XGK[i];
        let s = f(c - dx) + f(c + dx);
        kronrod += WGK[i] * s;
        if i % 2 == 1 {
            gauss += WG[i / 2] * s;
        }
    }
    (kronrod * h, ((kronrod - gauss) * h).abs())
}

/// Globally adaptive bisection: repeatedly splits the interval with the
/// largest error estimate until the summed estimate drops below
/// `max(abs_tol, rel_tol·|value|)`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> Result<Quadrature> {
    const MAX_INTERVALS: usize = 4000;
    let (v, e) = gk15(&f, a, b);
    let mut pieces = vec![(a, b, v, e)];
    let mut evaluations = 15;
    loop {
        let value: f64 = pieces.iter().map(|p| p.2).sum();
        let error: f64 = pieces.iter().map(|p| p.3).sum();
        if !value.is_finite() {
            return Err(Error::QuadratureNonConvergence {
                tolerance: abs_tol,
                estimate: f64::INFINITY,
            });
        }
        if error <= abs_tol.max(rel_tol * value.abs()) {
            return Ok(Quadrature {
                value,
                error,
                evaluations,
            });
        }
        if pieces.len() >= MAX_INTERVALS {
            return Err(Error::QuadratureNonConvergence {
                tolerance: abs_tol.max(rel_tol * value.abs()),
                estimate: error,
            });
        }
        let (i, _) = pieces
            .iter()
            .enumerate()
            .fold((0, -1.0), |(bi, be), (i, p)| if p.3 > be { (i, p.3) } else { (bi, be) });
        let (lo, hi, _, _) = pieces.swap_remove(i);
        let mid = 0.5 * (lo + hi);
        let (v1, e1) = gk15(&f, lo, mid);
        let (v2, e2) = gk15(&f, mid, hi);
        evaluations += 30;
        pieces.push((lo, mid, v1, e1));
        pieces.push((mid, hi, v2, e2));
    }
}

/// `∫_0^b f(u) du` for `f` with a logarithmic singularity at `0`: the piece
/// `[0, split]` is mapped by `u = e^{−v}` and integrated over
/// `v ∈ [−ln split, 745]`, the rest directly.
pub fn integrate_log_endpoint<F: Fn(f64) -> f64>(f: F, split: f64, b: f64, tol: f64) -> Result<Quadrature> {
    let v0 = -split.ln();
    let tail = integrate(|v: f64| {
        let u = (-v).exp();
        f(u) * u
    }, v0, 745.0, tol * 0.5, 0.0)?;
    let body = integrate(&f, split, b, tol * 0.5, 0.0)?;
    Ok(Quadrature {
        value: tail.value + body.value,
        error: tail.error + body.error,
        evaluations: tail.evaluations + body.evaluations,
    })
}

/// `L(d, K)` by one-dimensional quadrature.
///
/// Real: the law of `⟨x, e_1⟩` on the sphere has density proportional to
/// `(1 − u²)^{(d−3)/2}` on `[−1, 1]`, so `L = ∫ log|u| w / ∫ w`, both integrals
/// computed numerically on `[0, 1]`. The logarithmic end at `0` is split at
/// `1e−3` and exponentially substituted; the end at `1` (singular for `d = 2`)
/// uses `u = 1 − s²` on `[1/2, 1]`.
///
/// Complex: `|⟨x, e_1⟩|²` is `Beta(1, d−1)`, so
/// `L = ½ ∫_0^1 log(s) (d−1)(1−s)^{d−2} ds`.
pub fn quadrature_l(d: usize, field: ScalarField) -> Result<f64> {
    if d < 2 {
        return Err(Error::InvalidDimension(d));
    }
    const TOL: f64 = 1e-13;
    match field {
        ScalarField::Complex => {
            let k = (d - 2) as i32;
            let m = (d - 1) as f64;
            let q = integrate_log_endpoint(|s: f64| s.ln() * m * (1.0 - s).powi(k), 1e-3, 1.0, TOL)?;
            Ok(0.5 * q.value)
        }
        ScalarField::Real => {
            let e = (d as f64 - 3.0) / 2.0;
            let w = |u: f64| (1.0 - u * u).powf(e);
            // u = 1 − s², du = −2s ds, 1 − u² = s²(2 − s²)
            let w_sub = |s: f64| 2.0 * s.powi(d as i32 - 2) * (2.0 - s * s).powf(e);
            let s_half = 0.5f64.sqrt();

            let log_inner = integrate_log_endpoint(|u: f64| u.ln() * w(u), 1e-3, 0.5, TOL)?;
            let log_outer = integrate(|s: f64| (1.0 - s * s).ln() * w_sub(s), 0.0, s_half, TOL, 0.0)?;
            let mass_inner = integrate(w, 0.0, 0.5, TOL, 0.0)?;
            let mass_outer = integrate(w_sub, 0.0, s_half, TOL, 0.0)?;

            Ok((log_inner.value + log_outer.value) / (mass_inner.value + mass_outer.value))
        }
    }
}
