//! C ABI for `polarlab`.
//!
//! Every function returns a [`PolarStatus`]; results go through out-pointers.
//! On failure a message is kept per thread and read with
//! [`polar_last_error`]. Handles are opaque and owned by the caller, who
//! releases them with the matching `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use num_complex::Complex64;
use polarlab::bounds::{sandwich_report, BoundsConfig, X0Strategy};
use polarlab::product_poly::{self, FunctionalSystem, OptimizerConfig};
use polarlab::spaces::{PSpace, RandomSource, ScalarField, Vector};
use polarlab::torus::{self, SignMatrix};
use polarlab::{hilbert, oracle, Error};

/// Real scalars.
pub const POLAR_FIELD_REAL: u32 = 0;
/// Complex scalars.
pub const POLAR_FIELD_COMPLEX: u32 = 1;

/// Result of every call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolarStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidExponent = 3,
    InvalidDimension = 4,
    DimensionMismatch = 5,
    ResourceLimit = 6,
    NonConvergence = 7,
    Numerical = 8,
    Panic = 9,
}

/// A system of linear functionals `ψ_1, …, ψ_n` on `ℓ_p^d`.
pub struct PolarFunctionalSystem(FunctionalSystem);

/// An `n × d` matrix of signs.
pub struct PolarSignMatrix(SignMatrix);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> PolarStatus {
    match e {
        Error::InvalidExponent(_) => PolarStatus::InvalidExponent,
        Error::InvalidDimension(_) => PolarStatus::InvalidDimension,
        Error::DimensionMismatch { .. } => PolarStatus::DimensionMismatch,
        Error::ResourceLimit(_) => PolarStatus::ResourceLimit,
        Error::QuadratureNonConvergence { .. } => PolarStatus::NonConvergence,
        Error::ZeroVector | Error::NotUnit { .. } | Error::ZeroFactor { .. } | Error::OffTorus { .. } => {
            PolarStatus::Numerical
        }
        Error::InvalidArgument(_) => PolarStatus::InvalidArgument,
    }
}

enum Fail {
    Null(&'static str),
    Lib(Error),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Lib(e)
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> PolarStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => PolarStatus::Ok,
        Ok(Err(Fail::Null(what))) => {
            set_error(format!("null pointer: {what}"));
            PolarStatus::NullPointer
        }
        Ok(Err(Fail::Lib(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            PolarStatus::Panic
        }
    }
}

fn field(f: u32) -> Result<ScalarField, Fail> {
    match f {
        POLAR_FIELD_REAL => Ok(ScalarField::Real),
        POLAR_FIELD_COMPLEX => Ok(ScalarField::Complex),
        _ => Err(Fail::Lib(Error::InvalidArgument(format!("unknown field code {f}")))),
    }
}

/// # Safety
/// `p` must be null or valid for writes.
unsafe fn out<'a, T>(p: *mut T, what: &'static str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or(Fail::Null(what))
}

/// # Safety
/// `p` must be null or point to `len` readable values.
unsafe fn slice<'a, T>(p: *const T, len: usize, what: &'static str) -> Result<&'a [T], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(Fail::Null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

/// # Safety
/// `re` must point to `len` values; `im` may be null (all zeros).
unsafe fn complex_vec(re: *const f64, im: *const f64, len: usize, what: &'static str) -> Result<Vec<Complex64>, Fail> {
    let re = slice(re, len, what)?;
    let im = if im.is_null() { None } else { Some(slice(im, len, what)?) };
    Ok((0..len)
        .map(|k| Complex64::new(re[k], im.map_or(0.0, |v| v[k])))
        .collect())
}

/// # Safety
/// Either pointer may be null; otherwise each must hold `v.len()` values.
unsafe fn write_complex(v: &[Complex64], re: *mut f64, im: *mut f64) {
    for (k, z) in v.iter().enumerate() {
        if !re.is_null() {
            *re.add(k) = z.re;
        }
        if !im.is_null() {
            *im.add(k) = z.im;
        }
    }
}

/// Message of the last failed call on this thread; empty if none. The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn polar_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn polar_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// `q` with `1/p + 1/q = 1`. Pass `INFINITY` for `p = ∞`.
///
/// # Safety
/// `q` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn polar_dual_exponent(p: f64, q: *mut f64) -> PolarStatus {
    guard(|| {
        *out(q, "q")? = polarlab::spaces::dual_exponent(p)?;
        Ok(())
    })
}

/// `L(d, K)`, the mean of `log|⟨x, ψ⟩|` over the Euclidean sphere.
///
/// # Safety
/// `l` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn polar_l_constant(d: usize, field_code: u32, l: *mut f64) -> PolarStatus {
    guard(|| {
        *out(l, "l")? = hilbert::l_constant(d, field(field_code)?)?;
        Ok(())
    })
}

/// `L(d, K)` by one-dimensional quadrature.
///
/// # Safety
/// `l` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn polar_quadrature_l(d: usize, field_code: u32, l: *mut f64) -> PolarStatus {
    guard(|| {
        *out(l, "l")? = oracle::quadrature_l(d, field(field_code)?)?;
        Ok(())
    })
}

/// `c(ℓ_2^d) = exp(−L(d, K))`.
///
/// # Safety
/// `c` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn polar_hilbert_polarization(d: usize, field_code: u32, c: *mut f64) -> PolarStatus {
    guard(|| {
        *out(c, "c")? = hilbert::hilbert_polarization(d, field(field_code)?)?;
        Ok(())
    })
}

/// `(1/2)·sqrt(d^n / (24n)^d)`.
///
/// # Safety
/// `value` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn polar_cn_infty_lower_bound(n: usize, d: usize, value: *mut f64) -> PolarStatus {
    guard(|| {
        *out(value, "value")? = torus::cn_infty_lower_bound(n, d)?;
        Ok(())
    })
}

/// Builds a system from `n` rows of length `d`, stored row-major in
/// `re` (and `im`, which may be null for real entries).
///
/// # Safety
/// `re` (and `im` if non-null) must hold `n·d` doubles; `system` must be a
/// valid pointer.
#[no_mangle]
pub unsafe extern "C" fn polar_system_new(
    p: f64,
    d: usize,
    field_code: u32,
    n: usize,
    re: *const f64,
    im: *const f64,
    system: *mut *mut PolarFunctionalSystem,
) -> PolarStatus {
    guard(|| {
        let slot = out(system, "system")?;
        *slot = ptr::null_mut();
        let space = PSpace::new(p, d, field(field_code)?)?;
        let len = n
            .checked_mul(d)
            .ok_or_else(|| Error::InvalidArgument("n·d overflows".into()))?;
        let all = complex_vec(re, im, len, "rows")?;
        let rows = if d == 0 {
            Vec::new()
        } else {
            all.chunks(d).map(|c| Vector::new(c.to_vec())).collect()
        };
        let sys = FunctionalSystem::new(rows, space)?;
        *slot = Box::into_raw(Box::new(PolarFunctionalSystem(sys)));
        Ok(())
    })
}

/// Releases a system; null is ignored.
///
/// # Safety
/// `system` must come from [`polar_system_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn polar_system_free(system: *mut PolarFunctionalSystem) {
    if !system.is_null() {
        drop(Box::from_raw(system));
    }
}

/// `∏_j ψ_j(x)` for `x` of length `d`.
///
/// # Safety
/// `system` must be live; `x_re` (and `x_im` if non-null) must hold `d`
/// doubles; the outputs must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn polar_system_evaluate(
    system: *const PolarFunctionalSystem,
    x_re: *const f64,
    x_im: *const f64,
    value_re: *mut f64,
    value_im: *mut f64,
) -> PolarStatus {
    guard(|| {
        let sys = &system.as_ref().ok_or(Fail::Null("system"))?.0;
        let x = complex_vec(x_re, x_im, sys.dim(), "x")?;
        let v = product_poly::evaluate(sys, &x)?;
        *out(value_re, "value_re")? = v.re;
        *out(value_im, "value_im")? = v.im;
        Ok(())
    })
}

/// Sup-norm over the unit sphere of `ℓ_p^d` by multi-start ascent.
/// `witness_re` / `witness_im` receive `d` entries each when non-null.
///
/// # Safety
/// `system` must be live; `value` must be valid; non-null witness buffers
/// must hold `d` doubles.
#[no_mangle]
pub unsafe extern "C" fn polar_system_sup_norm(
    system: *const PolarFunctionalSystem,
    starts: usize,
    seed: u64,
    value: *mut f64,
    witness_re: *mut f64,
    witness_im: *mut f64,
) -> PolarStatus {
    guard(|| {
        let sys = &system.as_ref().ok_or(Fail::Null("system"))?.0;
        let value = out(value, "value")?;
        if starts == 0 {
            return Err(Error::InvalidArgument("starts must be positive".into()).into());
        }
        let cfg = OptimizerConfig {
            starts,
            source: RandomSource::new(seed),
            ..OptimizerConfig::default()
        };
        let est = product_poly::sup_norm(sys, &cfg)?;
        *value = est.value;
        write_complex(&est.witness, witness_re, witness_im);
        Ok(())
    })
}

/// Builds a sign matrix from `n·d` entries (row-major), each `+1` or `−1`.
///
/// # Safety
/// `entries` must hold `n·d` values; `sign` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn polar_sign_matrix_new(
    n: usize,
    d: usize,
    entries: *const i8,
    sign: *mut *mut PolarSignMatrix,
) -> PolarStatus {
    guard(|| {
        let slot = out(sign, "sign")?;
        *slot = ptr::null_mut();
        let len = n
            .checked_mul(d)
            .ok_or_else(|| Error::InvalidArgument("n·d overflows".into()))?;
        let e = slice(entries, len, "entries")?;
        let rows: Vec<Vec<i8>> = if d == 0 { Vec::new() } else { e.chunks(d).map(<[i8]>::to_vec).collect() };
        *slot = Box::into_raw(Box::new(PolarSignMatrix(SignMatrix::new(&rows)?)));
        Ok(())
    })
}

/// Independent uniform signs from `seed`.
///
/// # Safety
/// `sign` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn polar_sign_matrix_random(
    n: usize,
    d: usize,
    seed: u64,
    sign: *mut *mut PolarSignMatrix,
) -> PolarStatus {
    guard(|| {
        let slot = out(sign, "sign")?;
        *slot = ptr::null_mut();
        let m = SignMatrix::random(n, d, &mut RandomSource::new(seed).rng())?;
        *slot = Box::into_raw(Box::new(PolarSignMatrix(m)));
        Ok(())
    })
}

/// Releases a sign matrix; null is ignored.
///
/// # Safety
/// `sign` must come from a `polar_sign_matrix_*` constructor and not be
/// used afterwards.
#[no_mangle]
pub unsafe extern "C" fn polar_sign_matrix_free(sign: *mut PolarSignMatrix) {
    if !sign.is_null() {
        drop(Box::from_raw(sign));
    }
}

/// `F(z) = ∏_j Σ_k ε_{jk} z_k`.
///
/// # Safety
/// `sign` must be live; `z_re` (and `z_im` if non-null) must hold `d`
/// doubles; the outputs must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn polar_sign_matrix_evaluate(
    sign: *const PolarSignMatrix,
    z_re: *const f64,
    z_im: *const f64,
    value_re: *mut f64,
    value_im: *mut f64,
) -> PolarStatus {
    guard(|| {
        let s = &sign.as_ref().ok_or(Fail::Null("sign"))?.0;
        let z = complex_vec(z_re, z_im, s.d(), "z")?;
        let v = torus::f_evaluate(s, &z)?;
        *out(value_re, "value_re")? = v.re;
        *out(value_im, "value_im")? = v.im;
        Ok(())
    })
}

/// Sup-norm of `|F|` over the polydisc from an `net_n`-point torus net
/// (`0` selects `24n`). `certificate` receives the upper bound, and
/// `heuristic` is set to 1 when the net had to be subsampled.
///
/// # Safety
/// `sign` must be live; `value` and `certificate` must be valid; `heuristic`
/// may be null.
#[no_mangle]
pub unsafe extern "C" fn polar_sign_matrix_sup_norm(
    sign: *const PolarSignMatrix,
    net_n: usize,
    refine: bool,
    value: *mut f64,
    certificate: *mut f64,
    heuristic: *mut bool,
) -> PolarStatus {
    guard(|| {
        let s = &sign.as_ref().ok_or(Fail::Null("sign"))?.0;
        let value = out(value, "value")?;
        let certificate = out(certificate, "certificate")?;
        let net = if net_n == 0 { 24 * s.n() } else { net_n };
        let est = torus::sup_norm_polydisc(s, net, refine)?;
        *value = est.value;
        *certificate = est.upper_certificate.unwrap_or(f64::NAN);
        if let Some(h) = heuristic.as_mut() {
            *h = est.heuristic_certificate;
        }
        Ok(())
    })
}

/// Monte Carlo lower and upper bounds for `c(ℓ_p^d)`; `std_error` is the
/// combined standard error of the two lines.
///
/// # Safety
/// The three outputs must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn polar_bounds(
    p: f64,
    d: usize,
    field_code: u32,
    samples: usize,
    seed: u64,
    lower: *mut f64,
    upper: *mut f64,
    std_error: *mut f64,
) -> PolarStatus {
    guard(|| {
        let (lower, upper, std_error) = (out(lower, "lower")?, out(upper, "upper")?, out(std_error, "std_error")?);
        let space = PSpace::new(p, d, field(field_code)?)?;
        let source = RandomSource::new(seed);
        let cfg = BoundsConfig {
            samples,
            source,
            optimizer: OptimizerConfig {
                starts: 16,
                source,
                ..OptimizerConfig::default()
            },
            ..BoundsConfig::default()
        };
        let r = sandwich_report(&space, X0Strategy::WorstCase, &cfg)?;
        *lower = r.lower;
        *upper = r.upper.value;
        *std_error = r.combined_std_error();
        Ok(())
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn panics_become_status() {
        let s = guard(|| panic!("boom"));
        assert_eq!(s, PolarStatus::Panic);
        let msg = unsafe { std::ffi::CStr::from_ptr(polar_last_error()) };
        assert_eq!(msg.to_str().unwrap(), "panic: boom");
    }

    #[test]
    fn error_mapping() {
        assert_eq!(status_of(&Error::ResourceLimit("x".into())), PolarStatus::ResourceLimit);
        assert_eq!(status_of(&Error::ZeroVector), PolarStatus::Numerical);
        assert_eq!(
            status_of(&Error::QuadratureNonConvergence {
                tolerance: 1e-10,
                estimate: 1.0
            }),
            PolarStatus::NonConvergence
        );
        assert_eq!(guard(|| Ok(())), PolarStatus::Ok);
    }
}
