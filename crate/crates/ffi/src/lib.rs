//! C ABI for `nctorus`.
//!
//! Objects are opaque handles created by `nct_*_new` style functions and
//! released with the matching `nct_*_free`. Every call returns an
//! [`NctStatus`]; on failure `nct_last_error` holds a message for the calling
//! thread. Outputs are written through pointer arguments only on success.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::OnceLock;

use nctorus::dirac::{matrix_element_closed_form, matrix_element_oracle, DiracCoefficients};
use nctorus::dynamics::{ConjugatorLift, DiffeoSpec};
use nctorus::fourier::{hat_functional, paren_functional};
use nctorus::gns::{state_eval, GnsSpace, TruncationBox};
use nctorus::modular::tomita_check;
use nctorus::weyl::{involution, star_product, trace, WeylElement};
use nctorus::{Error, C64};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NctStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    OutOfBox = 3,
    /// Aliasing, route disagreement, singular block or a failed inverse solve.
    Numerical = 4,
    AlphaMismatch = 5,
    Io = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NctComplex {
    pub re: f64,
    pub im: f64,
}

impl From<C64> for NctComplex {
    fn from(c: C64) -> Self {
        Self { re: c.re, im: c.im }
    }
}

/// Both evaluations of the state on an element.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NctStateValue {
    pub series: NctComplex,
    pub gns: NctComplex,
}

/// A circle diffeomorphism given by its conjugator lift and angle.
pub struct NctDiffeo {
    inner: DiffeoSpec,
}

/// A finitely supported element of the Weyl algebra.
pub struct NctWeyl {
    inner: WeylElement,
}

/// A truncated GNS space. Dirac coefficients are computed on first use.
pub struct NctSpace {
    inner: GnsSpace,
    coeffs: OnceLock<Result<DiracCoefficients, String>>,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

struct Failure(NctStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::OutOfBox { .. } => NctStatus::OutOfBox,
            Error::AlphaMismatch(..) => NctStatus::AlphaMismatch,
            Error::Aliasing { .. }
            | Error::RouteDisagreement { .. }
            | Error::SingularBlock { .. }
            | Error::InverseSolve { .. }
            | Error::NonPositiveDensity(_) => NctStatus::Numerical,
            Error::Io(_) | Error::Json(_) | Error::Csv(_) => NctStatus::Io,
            _ => NctStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(NctStatus::NullPointer, format!("{what} is null"))
}

fn invalid(msg: impl Into<String>) -> Failure {
    Failure(NctStatus::InvalidArgument, msg.into())
}

/// Runs `f`, turning errors and panics into a status and the thread's last error.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> NctStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_last_error("");
            NctStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_last_error(&msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_last_error(&msg);
            NctStatus::Panic
        }
    }
}

unsafe fn get<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn get_mut<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn write<T>(out: *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    out.write(value);
    Ok(())
}

unsafe fn slice<'a>(p: *const f64, len: usize, what: &str) -> Result<&'a [f64], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

fn boxed<T>(v: T) -> *mut T {
    Box::into_raw(Box::new(v))
}

/// Message of the last failed call on this thread, empty after a success.
/// Valid until the next `nct_*` call on the same thread.
#[no_mangle]
pub extern "C" fn nct_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn nct_version() -> *const c_char {
    static V: &CStr = match CStr::from_bytes_with_nul(concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes()) {
        Ok(v) => v,
        Err(_) => panic!("version string has no interior NUL"),
    };
    V.as_ptr()
}

/// The benchmark diffeomorphism `H(x) = x + (0.3/2π) sin 2πx` with `α = (√5 − 1)/4`.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn nct_diffeo_benchmark(out: *mut *mut NctDiffeo) -> NctStatus {
    guard(|| write(out, boxed(NctDiffeo { inner: DiffeoSpec::benchmark() })))
}

/// Diffeomorphism with conjugator `H(x) = x + Σ s_k sin 2πkx + Σ c_k (cos 2πkx − 1)`.
///
/// # Safety
/// `sin` and `cos` must point to `n_sin` and `n_cos` readable doubles (or be
/// null when the count is zero); `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nct_diffeo_new(
    sin: *const f64,
    n_sin: usize,
    cos: *const f64,
    n_cos: usize,
    alpha: f64,
    out: *mut *mut NctDiffeo,
) -> NctStatus {
    guard(|| {
        let lift = ConjugatorLift::new(slice(sin, n_sin, "sin")?.to_vec(), slice(cos, n_cos, "cos")?.to_vec())?;
        let inner = DiffeoSpec::new(lift, alpha, false)?;
        write(out, boxed(NctDiffeo { inner }))
    })
}

/// # Safety
/// `d` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nct_diffeo_alpha(d: *const NctDiffeo, out: *mut f64) -> NctStatus {
    guard(|| write(out, get(d, "diffeo")?.inner.alpha()))
}

/// `F_n(x)/n`, an estimate of the rotation number `2α`.
///
/// # Safety
/// `d` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nct_diffeo_rotation_number(d: *const NctDiffeo, iterations: usize, out: *mut f64) -> NctStatus {
    guard(|| write(out, get(d, "diffeo")?.inner.rotation_number(iterations)?))
}

/// Radon-Nikodym derivative `δ_n(x)`.
///
/// # Safety
/// `d` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nct_diffeo_radon_nikodym(d: *const NctDiffeo, n: i64, x: f64, out: *mut f64) -> NctStatus {
    guard(|| write(out, get(d, "diffeo")?.inner.iterate_derivative(n, x)?))
}

/// # Safety
/// `d` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn nct_diffeo_free(d: *mut NctDiffeo) {
    if !d.is_null() {
        drop(Box::from_raw(d));
    }
}

/// The zero element at deformation angle `alpha`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nct_weyl_new(alpha: f64, out: *mut *mut NctWeyl) -> NctStatus {
    guard(|| {
        if !alpha.is_finite() {
            return Err(invalid(format!("alpha must be finite, got {alpha}")));
        }
        write(out, boxed(NctWeyl { inner: WeylElement::zero(alpha) }))
    })
}

/// Sets the coefficient of `U^m V^n`.
///
/// # Safety
/// `w` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn nct_weyl_set(w: *mut NctWeyl, m: i64, n: i64, value: NctComplex) -> NctStatus {
    guard(|| {
        get_mut(w, "weyl")?.inner.set((m, n), C64::new(value.re, value.im));
        Ok(())
    })
}

/// # Safety
/// `w` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nct_weyl_get(w: *const NctWeyl, m: i64, n: i64, out: *mut NctComplex) -> NctStatus {
    guard(|| write(out, get(w, "weyl")?.inner.get((m, n)).into()))
}

/// Star product `f ⋆ g` as a new handle.
///
/// # Safety
/// `f`, `g` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nct_weyl_star(f: *const NctWeyl, g: *const NctWeyl, out: *mut *mut NctWeyl) -> NctStatus {
    guard(|| {
        let inner = star_product(&get(f, "f")?.inner, &get(g, "g")?.inner)?;
        write(out, boxed(NctWeyl { inner }))
    })
}

/// # Safety
/// `f` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nct_weyl_involution(f: *const NctWeyl, out: *mut *mut NctWeyl) -> NctStatus {
    guard(|| write(out, boxed(NctWeyl { inner: involution(&get(f, "f")?.inner) })))
}

/// # Safety
/// `f` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nct_weyl_trace(f: *const NctWeyl, out: *mut NctComplex) -> NctStatus {
    guard(|| write(out, trace(&get(f, "f")?.inner).into()))
}

/// # Safety
/// `w` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn nct_weyl_free(w: *mut NctWeyl) {
    if !w.is_null() {
        drop(Box::from_raw(w));
    }
}

/// Truncated GNS space with blocks `|k| ≤ k_bound`, modes `|l| ≤ m_bound` and
/// `grid` quadrature nodes. The diffeomorphism is copied.
///
/// # Safety
/// `d` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nct_space_new(
    d: *const NctDiffeo,
    k_bound: usize,
    m_bound: usize,
    grid: usize,
    out: *mut *mut NctSpace,
) -> NctStatus {
    guard(|| {
        let tbox = TruncationBox::new(k_bound, m_bound, grid)?;
        let inner = GnsSpace::new(get(d, "diffeo")?.inner.clone(), tbox)?;
        write(
            out,
            boxed(NctSpace {
                inner,
                coeffs: OnceLock::new(),
            }),
        )
    })
}

/// Dimension `(2K+1)(2M+1)`; the length of coefficient tables.
///
/// # Safety
/// `s` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nct_space_dim(s: *const NctSpace, out: *mut usize) -> NctStatus {
    guard(|| write(out, get(s, "space")?.inner.tbox().dim()))
}

/// # Safety
/// `s` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn nct_space_free(s: *mut NctSpace) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// `‖JΔ^{1/2}π(f)ξ − π(f*)ξ‖`.
///
/// # Safety
/// `s`, `f` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nct_tomita_check(s: *const NctSpace, f: *const NctWeyl, out: *mut f64) -> NctStatus {
    guard(|| write(out, tomita_check(&get(f, "f")?.inner, &get(s, "space")?.inner)?))
}

/// `ω(W(f))` by the moment series and by the GNS inner product.
///
/// # Safety
/// `s`, `f` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nct_state_eval(s: *const NctSpace, f: *const NctWeyl, out: *mut NctStateValue) -> NctStatus {
    guard(|| {
        let ev = state_eval(&get(f, "f")?.inner, &get(s, "space")?.inner)?;
        write(
            out,
            NctStateValue {
                series: ev.series.into(),
                gns: ev.gns.into(),
            },
        )
    })
}

/// Hat (`paren = false`) or paren table of `f`, written to `out[0..len]` with
/// entry `(k, l)` at index `(k + K)(2M + 1) + (l + M)`. `len` must equal the space dimension.
///
/// # Safety
/// `s`, `f` must be live handles; `out` must point to `len` writable values.
#[no_mangle]
pub unsafe extern "C" fn nct_fourier_table(
    s: *const NctSpace,
    f: *const NctWeyl,
    paren: bool,
    out: *mut NctComplex,
    len: usize,
) -> NctStatus {
    guard(|| {
        let space = &get(s, "space")?.inner;
        let f = &get(f, "f")?.inner;
        let dim = space.tbox().dim();
        if len != dim {
            return Err(invalid(format!("table length {len} does not match the space dimension {dim}")));
        }
        if out.is_null() {
            return Err(null("output table"));
        }
        let table = if paren { paren_functional(f, space)? } else { hat_functional(f, space)? };
        for (i, v) in table.values().iter().enumerate() {
            out.add(i).write((*v).into());
        }
        Ok(())
    })
}

fn coefficients(s: &NctSpace) -> Result<&DiracCoefficients, Failure> {
    s.coeffs
        .get_or_init(|| DiracCoefficients::for_space(&s.inner).map_err(|e| e.to_string()))
        .as_ref()
        .map_err(|e| Failure(NctStatus::Numerical, e.clone()))
}

/// Dirac matrix element `⟨D^(η) b^{kl}, b^{rs}⟩` for `η ∈ {0, 1/2, 1}` by the
/// closed form and by the quadrature oracle. Either output may be null.
///
/// # Safety
/// `s` must be a live handle; non-null outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn nct_dirac_matrix_element(
    s: *const NctSpace,
    eta: f64,
    k: i64,
    l: i64,
    r: i64,
    q: i64,
    closed: *mut NctComplex,
    oracle: *mut NctComplex,
) -> NctStatus {
    guard(|| {
        let space = get(s, "space")?;
        let coeffs = coefficients(space)?;
        let c = (!closed.is_null())
            .then(|| matrix_element_closed_form(eta, (k, l), (r, q), coeffs, &space.inner))
            .transpose()?;
        let o = (!oracle.is_null())
            .then(|| matrix_element_oracle(eta, (k, l), (r, q), coeffs, &space.inner))
            .transpose()?;
        if let Some(c) = c {
            closed.write(c.into());
        }
        if let Some(o) = o {
            oracle.write(o.into());
        }
        Ok(())
    })
}

/// Dirac coefficient `a_n`.
///
/// # Safety
/// `s` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nct_dirac_coefficient(s: *const NctSpace, n: i64, out: *mut f64) -> NctStatus {
    guard(|| write(out, coefficients(get(s, "space")?)?.a(n)?))
}
