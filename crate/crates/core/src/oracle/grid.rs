//! Dense angular grids on low-dimensional `ℓ_p` spheres.
//!
//! Real `d = 2, 3` use the signed power map `u ↦ sign(u)|u|^{2/p}` of the
//! Euclidean circle or sphere, which lands exactly on the unit `p`-sphere.
//! Complex `d = 2` fixes the phase of `x_1` (|P| is phase invariant) and
//! grids the modulus angle and the relative phase. `p = ∞` grids the faces of
//! the cube or polydisc instead. All angles are multiples of `π/R`, so
//! doubling the resolution refines the grid.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::product_poly::FunctionalSystem;
use crate::spaces::{pair, PSpace, ScalarField, Vector};

/// Grid resolution (points per angular dimension) and space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    resolution: usize,
    space: PSpace,
}

impl GridSpec {
    pub fn new(resolution: usize, space: PSpace) -> Result<Self> {
        if resolution < 8 {
            return Err(Error::InvalidArgument(format!("grid resolution {resolution} is below 8")));
        }
        let ok = match space.field() {
            ScalarField::Real => space.dim() <= 3,
            ScalarField::Complex => space.dim() <= 2,
        };
        if !ok {
            return Err(Error::ResourceLimit(format!(
                "grid oracle supports d ≤ 3 real, d ≤ 2 complex; got d = {} {}",
                space.dim(),
                space.field()
            )));
        }
        Ok(Self { resolution, space })
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn space(&self) -> &PSpace {
        &self.space
    }
}

/// Largest `|P|` found on the grid: a lower bound for the sup-norm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridNorm {
    pub value: f64,
    pub witness: Vector,
    pub points: usize,
}

fn spm(u: f64, p: f64) -> f64 {
    u.signum() * u.abs().powf(2.0 / p)
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

type PointFn = Box<dyn Fn(usize, &mut [Complex64]) + Sync>;

fn chart(spec: &GridSpec) -> (usize, PointFn) {
    let r = spec.resolution;
    let rf = r as f64;
    let p = spec.space.p();
    let inf = p.is_infinite();
    match (spec.space.field(), spec.space.dim()) {
        (_, 1) => (1, Box::new(|_, x| x[0] = c(1.0))),
        (ScalarField::Real, 2) if inf => (
            2 * (r + 1),
            Box::new(move |i, x| {
                let t = -1.0 + 2.0 * (i % (r + 1)) as f64 / rf;
                let face = i / (r + 1);
                x[face] = c(1.0);
                x[1 - face] = c(t);
            }),
        ),
        (ScalarField::Real, 2) => (
            2 * r,
            Box::new(move |i, x| {
                let th = PI * i as f64 / rf;
                x[0] = c(spm(th.cos(), p));
                x[1] = c(spm(th.sin(), p));
            }),
        ),
        (ScalarField::Real, 3) if inf => {
            let side = r + 1;
            (
                3 * side * side,
                Box::new(move |i, x| {
                    let face = i / (side * side);
                    let a = -1.0 + 2.0 * ((i / side) % side) as f64 / rf;
                    let b = -1.0 + 2.0 * (i % side) as f64 / rf;
                    x[face] = c(1.0);
                    x[(face + 1) % 3] = c(a);
                    x[(face + 2) % 3] = c(b);
                }),
            )
        }
        (ScalarField::Real, _) => (
            (r + 1) * 2 * r,
            Box::new(move |i, x| {
                let th = PI * (i / (2 * r)) as f64 / rf;
                let ph = PI * (i % (2 * r)) as f64 / rf;
                let u = [th.sin() * ph.cos(), th.sin() * ph.sin(), th.cos()];
                for (xk, uk) in x.iter_mut().zip(u) {
                    *xk = c(spm(uk, p));
                }
            }),
        ),
        (ScalarField::Complex, _) if inf => (
            2 * (r + 1) * 2 * r,
            Box::new(move |i, x| {
                let face = i / ((r + 1) * 2 * r);
                let j = i % ((r + 1) * 2 * r);
                let s = (j / (2 * r)) as f64 / rf;
                let alpha = PI * (j % (2 * r)) as f64 / rf;
                x[face] = c(1.0);
                x[1 - face] = Complex64::from_polar(s, alpha);
            }),
        ),
        (ScalarField::Complex, _) => (
            (r + 1) * 2 * r,
            Box::new(move |i, x| {
                let t = 0.5 * PI * (i / (2 * r)) as f64 / rf;
                let alpha = PI * (i % (2 * r)) as f64 / rf;
                x[0] = c(t.cos().powf(2.0 / p));
                x[1] = Complex64::from_polar(t.sin().powf(2.0 / p), alpha);
            }),
        ),
    }
}

/// `max |ψ_1(x)⋯ψ_n(x)|` over the grid.
pub fn grid_norm(sys: &FunctionalSystem, spec: &GridSpec) -> Result<GridNorm> {
    if sys.space() != spec.space() {
        return Err(Error::InvalidArgument("grid and system live on different spaces".into()));
    }
    let d = spec.space.dim();
    let (count, point) = chart(spec);
    let rows = sys.rows();
    let eval = |x: &[Complex64]| rows.iter().map(|r| pair(r, x).norm()).product::<f64>();
    let (value, best) = (0..count)
        .into_par_iter()
        .map_init(
            || vec![Complex64::new(0.0, 0.0); d],
            |x, i| {
                point(i, x);
                (eval(x), i)
            },
        )
        .reduce(
            || (f64::NEG_INFINITY, usize::MAX),
            |a, b| if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) { b } else { a },
        );
    let mut witness = vec![Complex64::new(0.0, 0.0); d];
    point(best, &mut witness);
    Ok(GridNorm {
        value,
        witness: Vector::new(witness),
        points: count,
    })
}
