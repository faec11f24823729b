//! Exhaustive search over all `±1` matrices of a small shape.
//!
//! The torus sup-norm of each matrix is computed here from scratch: a full
//! `N^d` root-of-unity net (no phase reduction), then compass search in the
//! angles from the best net point.

use std::f64::consts::{E, PI};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::torus::SignMatrix;

const MAX_ND: usize = 16;
const MAX_NET: u64 = 1 << 22;

/// Minimizer of the torus sup-norm over all sign matrices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignMin {
    pub sign: SignMatrix,
    pub index: u64,
    /// Refined sup-norm of the minimizer (a lower bound for its true value).
    pub value: f64,
    /// `net_max / (1 − n·e·π/N)` for the minimizer.
    pub certificate: f64,
}

fn abs_f(entries: &[i8], n: usize, d: usize, z: &[Complex64]) -> f64 {
    let mut prod = 1.0;
    for j in 0..n {
        let mut s = Complex64::new(0.0, 0.0);
        for k in 0..d {
            s += z[k] * f64::from(entries[j * d + k]);
        }
        prod *= s.norm();
    }
    prod
}

fn at_angles(theta: &[f64]) -> Vec<Complex64> {
    theta.iter().map(|&t| Complex64::from_polar(1.0, t)).collect()
}

/// `(refined max, net max)` of `|F|` on the torus.
fn torus_max(entries: &[i8], n: usize, d: usize, net_n: usize) -> (f64, f64) {
    let total = (net_n as u64).pow(d as u32);
    let step = 2.0 * PI / net_n as f64;
    let angles = |mut i: u64| {
        let mut th = vec![0.0; d];
        for t in th.iter_mut().rev() {
            *t = step * (i % net_n as u64) as f64;
            i /= net_n as u64;
        }
        th
    };
    let mut best = (f64::NEG_INFINITY, 0u64);
    for i in 0..total {
        let v = abs_f(entries, n, d, &at_angles(&angles(i)));
        if v > best.0 {
            best = (v, i);
        }
    }
    let net_max = best.0;
    let mut th = angles(best.1);
    let mut val = net_max;
    let mut h = step / 2.0;
    while h > 1e-11 {
        let mut moved = false;
        for k in 0..d {
            for sgn in [1.0, -1.0] {
                th[k] += sgn * h;
                let v = abs_f(entries, n, d, &at_angles(&th));
                if v > val {
                    val = v;
                    moved = true;
                    break;
                }
                th[k] -= sgn * h;
            }
        }
        if !moved {
            h *= 0.5;
        }
    }
    (val, net_max)
}

/// Enumerates all `2^{nd}` sign matrices and returns one whose refined torus
/// sup-norm is smallest (lowest index on ties).
pub fn exhaustive_sign_min(n: usize, d: usize, net_n: usize) -> Result<SignMin> {
    if n == 0 || d == 0 {
        return Err(Error::InvalidArgument("n and d must be positive".into()));
    }
    if n * d > MAX_ND {
        return Err(Error::ResourceLimit(format!("sign enumeration needs n·d ≤ {MAX_ND}, got {}", n * d)));
    }
    let contraction = 1.0 - n as f64 * E * PI / net_n as f64;
    if contraction < 0.5 {
        return Err(Error::InvalidArgument(format!(
            "net resolution {net_n} too coarse for n = {n}"
        )));
    }
    if (net_n as u128).pow(d as u32) > MAX_NET as u128 {
        return Err(Error::ResourceLimit(format!("net {net_n}^{d} exceeds {MAX_NET} points")));
    }
    let count = 1u64 << (n * d);
    let (index, value, net_max) = (0..count)
        .into_par_iter()
        .map(|i| {
            let entries: Vec<i8> = (0..n * d).map(|b| if i >> b & 1 == 1 { -1 } else { 1 }).collect();
            let (v, m) = torus_max(&entries, n, d, net_n);
            (i, v, m)
        })
        .reduce(
            || (u64::MAX, f64::INFINITY, f64::INFINITY),
            |a, b| if b.1 < a.1 || (b.1 == a.1 && b.0 < a.0) { b } else { a },
        );
    Ok(SignMin {
        sign: SignMatrix::from_index(n, d, index)?,
        index,
        value,
        certificate: net_max / contraction,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        let r = exhaustive_sign_min(1, 2, 24).unwrap();
        assert!((r.value - 2.0).abs() < 1e-12);
        assert_eq!(r.index, 0);

        let r = exhaustive_sign_min(2, 2, 48).unwrap();
        assert!((r.value - 2.0).abs() < 1e-9, "{}", r.value);
        let rows = r.sign.rows();
        assert_ne!(rows[0], rows[1]);
        assert_ne!(rows[0], rows[1].iter().map(|e| -e).collect::<Vec<_>>());

        let r = exhaustive_sign_min(2, 1, 48).unwrap();
        assert!((r.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn second_moment_floor() {
        for (n, d) in [(1, 3), (2, 3), (3, 2)] {
            let r = exhaustive_sign_min(n, d, 24 * n).unwrap();
            let floor = (d as f64).powf(n as f64 / 2.0);
            assert!(r.certificate >= floor && r.value >= floor - 1e-9);
        }
    }

    #[test]
    fn guards() {
        assert!(matches!(exhaustive_sign_min(3, 6, 72), Err(Error::ResourceLimit(_))));
        assert!(exhaustive_sign_min(2, 2, 20).is_err());
    }
}
