//! Closed-form polarization quantities of `d`-dimensional Hilbert spaces.
//!
//! `L(d, K)` is the average of `log|⟨x, ψ⟩|` over the unit sphere for a fixed
//! unit `ψ`, and `c(H_d) = exp(−L(d, K))`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spaces::ScalarField;

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.57721566490153286061;

/// `H_m = Σ_{j=1}^m 1/j`, summed from the smallest term up.
pub fn harmonic(m: usize) -> f64 {
    (1..=m).rev().map(|j| 1.0 / j as f64).sum()
}

fn check_dim(d: usize) -> Result<()> {
    if d < 2 {
        Err(Error::InvalidDimension(d))
    } else {
        Ok(())
    }
}

/// `L(d, K)`.
///
/// Complex: `−H_{d−1}/2`. Real even `d`: `−(Σ_{j=1}^{(d−2)/2} 1/(2j) + log 2)`.
/// Real odd `d`: `−Σ_{j=0}^{(d−3)/2} 1/(2j+1)`, which is what direct
/// integration gives; see [`printed_odd_l`] for the variant indexed from 1.
pub fn l_constant(d: usize, field: ScalarField) -> Result<f64> {
    check_dim(d)?;
    Ok(match field {
        ScalarField::Complex => -0.5 * harmonic(d - 1),
        ScalarField::Real if d.is_multiple_of(2) => {
            let s: f64 = (1..=(d - 2) / 2).rev().map(|j| 1.0 / (2 * j) as f64).sum();
            -(s + std::f64::consts::LN_2)
        }
        ScalarField::Real => -(0..=(d - 3) / 2).rev().map(|j| 1.0 / (2 * j + 1) as f64).sum::<f64>(),
    })
}

/// The odd-dimensional real formula with its sum indexed from `j = 1`,
/// `−Σ_{j=1}^{(d−3)/2} 1/(2j+1)`. It misses the `j = 0` term (it gives `0` at
/// `d = 3` where the integral is `−1`) and is kept only for side-by-side
/// reporting. `None` unless `d` is odd and `≥ 3`.
pub fn printed_odd_l(d: usize) -> Option<f64> {
    if d < 3 || d.is_multiple_of(2) {
        return None;
    }
    Some(-(1..=(d - 3) / 2).rev().map(|j| 1.0 / (2 * j + 1) as f64).sum::<f64>())
}

/// `c(H_d) = exp(−L(d, K))`.
pub fn hilbert_polarization(d: usize, field: ScalarField) -> Result<f64> {
    Ok((-l_constant(d, field)?).exp())
}

/// Value of `c_n(H)` for Hilbert spaces of dimension at least `n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", content = "value", rename_all = "lowercase")]
pub enum CnValue {
    Exact(f64),
    /// Open case; carries the conjectured value `n^{n/2}`.
    Unknown(f64),
}

impl CnValue {
    pub fn value(&self) -> f64 {
        match *self {
            CnValue::Exact(v) | CnValue::Unknown(v) => v,
        }
    }
}

/// `c_n(H) = n^{n/2}`: known for every `n` over `ℂ`, only for `n ≤ 5` over `ℝ`.
pub fn hilbert_cn(n: usize, field: ScalarField) -> Result<CnValue> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    let v = (n as f64).powf(n as f64 / 2.0);
    Ok(match field {
        ScalarField::Real if n >= 6 => CnValue::Unknown(v),
        _ => CnValue::Exact(v),
    })
}

/// Upper bound on `c(H_d)` from the monotone convergence of `H_m − log m` to `γ`:
/// `e^{γ/2}√(2d)` over `ℝ`, `e^{γ/2}√d` over `ℂ`.
///
/// The real bound covers odd `d` too; with the correctly indexed odd formula,
/// `e^{γ/2}√d` already fails at `d = 3` (`e > e^{γ/2}√3`).
pub fn euler_mascheroni_bound(d: usize, field: ScalarField) -> Result<f64> {
    check_dim(d)?;
    let scale = match field {
        ScalarField::Real => 2.0 * d as f64,
        ScalarField::Complex => d as f64,
    };
    Ok((EULER_GAMMA / 2.0).exp() * scale.sqrt())
}

/// All Hilbert-space quantities for one `(d, K)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HilbertConstants {
    pub d: usize,
    pub field: ScalarField,
    pub l: f64,
    pub c: f64,
    pub gamma_bound: f64,
    /// Index-from-one odd formula, reported next to `l` for odd real `d`.
    pub printed_odd_l: Option<f64>,
}

impl HilbertConstants {
    pub fn compute(d: usize, field: ScalarField) -> Result<Self> {
        let l = l_constant(d, field)?;
        Ok(Self {
            d,
            field,
            l,
            c: (-l).exp(),
            gamma_bound: euler_mascheroni_bound(d, field)?,
            printed_odd_l: match field {
                ScalarField::Real => printed_odd_l(d),
                ScalarField::Complex => None,
            },
        })
    }
}
