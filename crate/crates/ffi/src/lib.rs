//! C ABI for `kepler-resum`.
//!
//! All state lives behind opaque handles created and destroyed by this
//! library. Every fallible function returns a [`KrStatus`]; on failure the
//! handle's last error message can be read with [`kr_last_error`].
//! Arbitrary-precision values cross the boundary as decimal strings;
//! convenience entry points take and return `double`.
//!
//! Output strings are written into caller-provided buffers and are always
//! NUL-terminated. When a buffer is too small, [`KrStatus::BufferTooSmall`]
//! is returned and `*needed` holds the required size including the NUL.

use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use kepler_resum::arith::{BigReal, Precision};
use kepler_resum::debye::{self, DebyeTable};
use kepler_resum::kepler::{finest_tolerance, solve_newton, solve_series, KeplerProblem};
use kepler_resum::repro::{self, ReproConfig, Target};
use kepler_resum::selfcheck::{self, SelfcheckConfig};
use kepler_resum::seqxform::{self, TermSequence, TransformKind};
use kepler_resum::Error;

/// Result codes of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KrStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Domain = 3,
    NoConvergence = 4,
    Range = 5,
    BufferTooSmall = 6,
    Internal = 7,
}

/// Sequence transformation selector.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KrKind {
    LevinD = 0,
    WenigerDelta = 1,
}

impl From<KrKind> for TransformKind {
    fn from(k: KrKind) -> Self {
        match k {
            KrKind::LevinD => TransformKind::LevinD,
            KrKind::WenigerDelta => TransformKind::WenigerDelta,
        }
    }
}

/// Solver selector for [`kr_solve`].
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KrMethod {
    Newton = 0,
    Levin = 1,
    Weniger = 2,
}

/// Working precision plus the last error message.
pub struct KrContext {
    prec: Precision,
    last_error: String,
}

/// Exact Debye polynomial coefficients up to some order.
pub struct KrDebyeTable {
    table: DebyeTable,
}

fn status_of(e: &Error) -> KrStatus {
    match e {
        Error::Config(_) | Error::Parse(_) | Error::Usage(_) => KrStatus::InvalidArgument,
        Error::Domain(_) | Error::DegenerateTerm { .. } | Error::TooFewTerms { .. } => KrStatus::Domain,
        Error::Range { .. } => KrStatus::Range,
        Error::NoConvergence { .. } | Error::Fit(_) => KrStatus::NoConvergence,
        _ => KrStatus::Internal,
    }
}

/// Runs `f` with panics turned into [`KrStatus::Internal`] and errors
/// recorded on the context.
fn guarded(ctx: *mut KrContext, f: impl FnOnce(&mut KrContext) -> Result<(), (KrStatus, String)>) -> KrStatus {
    if ctx.is_null() {
        return KrStatus::NullPointer;
    }
    // SAFETY: non-null handles come from kr_context_new and are not shared
    // across threads by contract.
    let ctx = unsafe { &mut *ctx };
    match catch_unwind(AssertUnwindSafe(|| f(ctx))) {
        Ok(Ok(())) => {
            ctx.last_error.clear();
            KrStatus::Ok
        }
        Ok(Err((status, msg))) => {
            ctx.last_error = msg;
            status
        }
        Err(_) => {
            ctx.last_error = "internal panic".into();
            KrStatus::Internal
        }
    }
}

fn lib_err(e: Error) -> (KrStatus, String) {
    (status_of(&e), e.to_string())
}

fn read_str<'a>(p: *const c_char, name: &str) -> Result<&'a str, (KrStatus, String)> {
    if p.is_null() {
        return Err((KrStatus::NullPointer, format!("{name} is null")));
    }
    // SAFETY: caller passes a NUL-terminated string.
    unsafe { CStr::from_ptr(p) }
        .to_str()
        .map_err(|_| (KrStatus::InvalidArgument, format!("{name} is not UTF-8")))
}

/// Copies `s` plus a NUL into `buf`; reports the size needed.
fn write_str(s: &str, buf: *mut c_char, len: usize, needed: *mut usize) -> Result<(), (KrStatus, String)> {
    let size = s.len() + 1;
    if !needed.is_null() {
        // SAFETY: caller-provided out pointer.
        unsafe { *needed = size };
    }
    if buf.is_null() || len < size {
        return Err((KrStatus::BufferTooSmall, format!("need a buffer of {size} bytes")));
    }
    // SAFETY: buf holds at least `size` bytes.
    unsafe {
        ptr::copy_nonoverlapping(s.as_ptr(), buf as *mut u8, s.len());
        *buf.add(s.len()) = 0;
    }
    Ok(())
}

fn write_out<T>(out: *mut T, v: T) -> Result<(), (KrStatus, String)> {
    if out.is_null() {
        return Err((KrStatus::NullPointer, "output pointer is null".into()));
    }
    // SAFETY: non-null caller-provided out pointer.
    unsafe { *out = v };
    Ok(())
}

/// Creates a context of `digits` decimal digits (at least 50). Returns NULL
/// when the precision is out of range.
#[no_mangle]
pub extern "C" fn kr_context_new(digits: u32) -> *mut KrContext {
    match Precision::new(digits) {
        Ok(prec) => Box::into_raw(Box::new(KrContext {
            prec,
            last_error: String::new(),
        })),
        Err(_) => ptr::null_mut(),
    }
}

/// Destroys a context; NULL is ignored.
#[no_mangle]
pub extern "C" fn kr_context_free(ctx: *mut KrContext) {
    if !ctx.is_null() {
        // SAFETY: pointer came from kr_context_new and is freed once.
        drop(unsafe { Box::from_raw(ctx) });
    }
}

/// Working precision of the context in decimal digits, 0 for NULL.
#[no_mangle]
pub extern "C" fn kr_context_digits(ctx: *const KrContext) -> u32 {
    if ctx.is_null() {
        return 0;
    }
    // SAFETY: valid handle by contract.
    unsafe { (*ctx).prec.digits() }
}

/// Copies the last error message of `ctx` (empty after a success).
#[no_mangle]
pub extern "C" fn kr_last_error(ctx: *const KrContext, buf: *mut c_char, len: usize, needed: *mut usize) -> KrStatus {
    if ctx.is_null() {
        return KrStatus::NullPointer;
    }
    // SAFETY: valid handle by contract.
    let msg = unsafe { &(*ctx).last_error };
    match write_str(msg, buf, len, needed) {
        Ok(()) => KrStatus::Ok,
        Err((s, _)) => s,
    }
}

fn parse(prec: Precision, p: *const c_char, name: &str) -> Result<BigReal, (KrStatus, String)> {
    prec.parse(read_str(p, name)?).map_err(lib_err)
}

fn solve_impl(prec: Precision, eps: BigReal, m: BigReal, method: KrMethod, order: usize) -> Result<BigReal, (KrStatus, String)> {
    let problem = KeplerProblem::new(eps, m).map_err(lib_err)?;
    match method {
        KrMethod::Newton => solve_newton(&problem, &finest_tolerance(prec)).map_err(lib_err),
        KrMethod::Levin | KrMethod::Weniger => {
            let kind = if method == KrMethod::Levin {
                TransformKind::LevinD
            } else {
                TransformKind::WenigerDelta
            };
            let sol = solve_series(&problem, kind, order).map_err(lib_err)?;
            Ok(sol.estimate(order).unwrap_or_else(|| sol.best()))
        }
    }
}

/// Solves `psi - eps sin psi = M` with `eps`, `M` given as decimal or
/// `p/q` strings; writes `psi` with `sig` significant digits into `buf`.
/// `order` is ignored by Newton.
#[no_mangle]
pub extern "C" fn kr_solve(
    ctx: *mut KrContext,
    eps: *const c_char,
    m: *const c_char,
    method: KrMethod,
    order: usize,
    sig: usize,
    buf: *mut c_char,
    len: usize,
    needed: *mut usize,
) -> KrStatus {
    guarded(ctx, |c| {
        let e = parse(c.prec, eps, "eps")?;
        let m = parse(c.prec, m, "M")?;
        let psi = solve_impl(c.prec, e, m, method, order)?;
        write_str(&psi.to_sig(sig.max(1)), buf, len, needed)
    })
}

/// [`kr_solve`] with `double` arguments and result.
#[no_mangle]
pub extern "C" fn kr_solve_f64(
    ctx: *mut KrContext,
    eps: f64,
    m: f64,
    method: KrMethod,
    order: usize,
    psi: *mut f64,
) -> KrStatus {
    guarded(ctx, |c| {
        if !eps.is_finite() || !m.is_finite() {
            return Err((KrStatus::InvalidArgument, "arguments must be finite".into()));
        }
        let v = solve_impl(c.prec, c.prec.from_f64(eps), c.prec.from_f64(m), method, order)?;
        write_out(psi, v.to_f64())
    })
}

/// Transforms the partial sums of `terms[0..n]` and writes the order-`order`
/// estimate to `*out`. The arithmetic runs at the context precision.
#[no_mangle]
pub extern "C" fn kr_transform_f64(
    ctx: *mut KrContext,
    terms: *const f64,
    n: usize,
    kind: KrKind,
    order: usize,
    out: *mut f64,
) -> KrStatus {
    guarded(ctx, |c| {
        if terms.is_null() {
            return Err((KrStatus::NullPointer, "terms is null".into()));
        }
        // SAFETY: caller passes n readable doubles.
        let slice = unsafe { std::slice::from_raw_parts(terms, n) };
        if slice.iter().any(|t| !t.is_finite()) {
            return Err((KrStatus::InvalidArgument, "terms must be finite".into()));
        }
        let big = slice.iter().map(|&t| c.prec.from_f64(t)).collect();
        let seq = TermSequence::from_reals("ffi", big).map_err(lib_err)?;
        let table = seqxform::transform(&seq, kind.into(), order).map_err(lib_err)?;
        let est = table
            .estimate(order)
            .ok_or_else(|| (KrStatus::Domain, format!("transformation stopped early: {:?}", table.stop)))?;
        write_out(out, est.re.to_f64())
    })
}

/// Generates the Debye coefficient table `U_0 ..= U_{k_max}`. Never fails;
/// free with [`kr_debye_free`].
#[no_mangle]
pub extern "C" fn kr_debye_new(k_max: usize) -> *mut KrDebyeTable {
    match catch_unwind(|| debye::generate(k_max)) {
        Ok(table) => Box::into_raw(Box::new(KrDebyeTable { table })),
        Err(_) => ptr::null_mut(),
    }
}

/// Destroys a Debye table; NULL is ignored.
#[no_mangle]
pub extern "C" fn kr_debye_free(table: *mut KrDebyeTable) {
    if !table.is_null() {
        // SAFETY: pointer came from kr_debye_new and is freed once.
        drop(unsafe { Box::from_raw(table) });
    }
}

/// Highest order held by the table.
#[no_mangle]
pub extern "C" fn kr_debye_k_max(table: *const KrDebyeTable) -> usize {
    if table.is_null() {
        return 0;
    }
    // SAFETY: valid handle by contract.
    unsafe { (*table).table.k_max() }
}

/// Writes the exact coefficient `a^k_m` as `"p/q"` (or `"p"`) into `buf`.
#[no_mangle]
pub extern "C" fn kr_debye_coeff(
    ctx: *mut KrContext,
    table: *const KrDebyeTable,
    k: usize,
    m: usize,
    buf: *mut c_char,
    len: usize,
    needed: *mut usize,
) -> KrStatus {
    guarded(ctx, |_| {
        if table.is_null() {
            return Err((KrStatus::NullPointer, "table is null".into()));
        }
        // SAFETY: valid handle by contract.
        let t = unsafe { &(*table).table };
        let row = t.row(k).map_err(lib_err)?;
        if m > row.degree() {
            return Err((KrStatus::Range, format!("m = {m} exceeds degree {}", row.degree())));
        }
        write_str(&row.coeff(m).to_string(), buf, len, needed)
    })
}

/// Evaluates `U_k(t)` at the context precision.
#[no_mangle]
pub extern "C" fn kr_debye_eval_f64(
    ctx: *mut KrContext,
    table: *const KrDebyeTable,
    k: usize,
    t: f64,
    out: *mut f64,
) -> KrStatus {
    guarded(ctx, |c| {
        if table.is_null() {
            return Err((KrStatus::NullPointer, "table is null".into()));
        }
        if !t.is_finite() {
            return Err((KrStatus::InvalidArgument, "t must be finite".into()));
        }
        // SAFETY: valid handle by contract.
        let tab = unsafe { &(*table).table };
        let v = tab.eval_poly(k, &c.prec.from_f64(t)).map_err(lib_err)?;
        write_out(out, v.to_f64())
    })
}

/// Regenerates a table or figure (`"table1"` .. `"fig10"`) and sets
/// `*passed` to 1 when every printed golden matches, 0 otherwise.
#[no_mangle]
pub extern "C" fn kr_reproduce(ctx: *mut KrContext, target: *const c_char, passed: *mut i32) -> KrStatus {
    guarded(ctx, |c| {
        let t: Target = read_str(target, "target")?.parse().map_err(lib_err)?;
        let cfg = ReproConfig {
            precision: c.prec,
            digits: 10,
        };
        let art = repro::reproduce(t, &cfg).map_err(lib_err)?;
        write_out(passed, art.passed() as i32)
    })
}

/// Runs the invariant suite; `*passed` is 1 when nothing failed.
#[no_mangle]
pub extern "C" fn kr_selfcheck(ctx: *mut KrContext, passed: *mut i32) -> KrStatus {
    guarded(ctx, |c| {
        let report = selfcheck::run(&SelfcheckConfig {
            precision: c.prec,
            corrupt_debye: None,
        });
        write_out(passed, report.passed() as i32)
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn kr_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}
