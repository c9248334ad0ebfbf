//! C ABI over `qcap`.
//!
//! Objects cross the boundary as opaque handles created by `qcap_*_new`/`from`
//! functions and released with the matching `_free`. Every fallible call
//! returns a [`QcapStatus`]; the message for the last failure on the calling
//! thread is available from [`qcap_last_error`].

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use qcap::capacity::{maximize_coherent_information, maximize_holevo, OptimizerOptions};
use qcap::channels::{
    apply, channel_from_json, channel_to_json, complementary, compose, tensor, DensityMatrix, KrausChannel,
};
use qcap::entropics::{coherent_information, von_neumann_entropy};
use qcap::numerics::{ComplexMatrix, C64};
use qcap::zoo::{is_ppt, parse_channel_spec};
use qcap::QcapError;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QcapStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    /// Input failed a CPTP, Hermiticity or positivity check.
    Validation = 3,
    Parse = 4,
    Dimension = 5,
    Numerical = 6,
    Panic = 7,
}

/// Opaque channel handle.
pub struct QcapChannel(KrausChannel);

/// Opaque density-matrix handle.
pub struct QcapState(DensityMatrix);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(CString::new(msg).expect("nul bytes removed")));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn status_of(err: &QcapError) -> QcapStatus {
    match err {
        QcapError::Dimension(_) | QcapError::Factorization { .. } | QcapError::KrausShape { .. } => {
            QcapStatus::Dimension
        }
        QcapError::NotHermitian { .. }
        | QcapError::NonFinite(_)
        | QcapError::EmptyKraus
        | QcapError::NotTracePreserving { .. }
        | QcapError::InvalidState(_)
        | QcapError::NegativeSpectrum(_)
        | QcapError::ChoiMarginal(_)
        | QcapError::Simplex(_) => QcapStatus::Validation,
        QcapError::Parse(_) => QcapStatus::Parse,
        QcapError::Parameter(_) | QcapError::Guard(_) => QcapStatus::InvalidArgument,
        _ => QcapStatus::Numerical,
    }
}

/// Runs `f`, converting errors and panics into status codes.
fn guard<F>(f: F) -> QcapStatus
where
    F: FnOnce() -> Result<(), (QcapStatus, String)>,
{
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            clear_error();
            QcapStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal panic: {msg}"));
            QcapStatus::Panic
        }
    }
}

fn lift<T>(r: qcap::Result<T>) -> Result<T, (QcapStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

unsafe fn borrow<'a, T>(p: *const T, what: &str) -> Result<&'a T, (QcapStatus, String)> {
    p.as_ref().ok_or((QcapStatus::NullPointer, format!("{what} is null")))
}

unsafe fn out_ptr<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, (QcapStatus, String)> {
    p.as_mut().ok_or((QcapStatus::NullPointer, format!("{what} is null")))
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, (QcapStatus, String)> {
    if p.is_null() {
        return Err((QcapStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (QcapStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

fn boxed<T>(v: T) -> *mut T {
    Box::into_raw(Box::new(v))
}

/// Message for the last failed call on this thread, or null. Valid until the
/// next call on the same thread.
#[no_mangle]
pub extern "C" fn qcap_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn qcap_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Builds a zoo channel from a spec such as `dep:q=0.1` or `erasure50`.
#[no_mangle]
pub unsafe extern "C" fn qcap_channel_from_spec(spec: *const c_char, out: *mut *mut QcapChannel) -> QcapStatus {
    guard(|| {
        let spec = read_str(spec, "spec")?;
        let out = out_ptr(out, "out")?;
        *out = boxed(QcapChannel(lift(parse_channel_spec(spec))?));
        Ok(())
    })
}

/// Parses a channel from its JSON encoding.
#[no_mangle]
pub unsafe extern "C" fn qcap_channel_from_json(json: *const c_char, out: *mut *mut QcapChannel) -> QcapStatus {
    guard(|| {
        let text = read_str(json, "json")?;
        let out = out_ptr(out, "out")?;
        *out = boxed(QcapChannel(lift(channel_from_json(text))?));
        Ok(())
    })
}

/// Builds a channel from Kraus operators stored back to back, each row-major
/// `dim_out x dim_in`, with separate real and imaginary arrays.
#[no_mangle]
pub unsafe extern "C" fn qcap_channel_from_kraus(
    dim_in: usize,
    dim_out: usize,
    count: usize,
    re: *const f64,
    im: *const f64,
    out: *mut *mut QcapChannel,
) -> QcapStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        if re.is_null() || im.is_null() {
            return Err((QcapStatus::NullPointer, "kraus data is null".into()));
        }
        if dim_in == 0 || dim_out == 0 || count == 0 {
            return Err((QcapStatus::InvalidArgument, "dimensions and count must be positive".into()));
        }
        let block = dim_in * dim_out;
        let re = std::slice::from_raw_parts(re, block * count);
        let im = std::slice::from_raw_parts(im, block * count);
        let mut ops = Vec::with_capacity(count);
        for k in 0..count {
            let data = (0..block).map(|i| C64::new(re[k * block + i], im[k * block + i])).collect();
            ops.push(lift(ComplexMatrix::new(dim_out, dim_in, data))?);
        }
        *out = boxed(QcapChannel(lift(qcap::channels::validate_cptp(ops, dim_in, dim_out))?));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn qcap_channel_free(ch: *mut QcapChannel) {
    if !ch.is_null() {
        drop(Box::from_raw(ch));
    }
}

#[no_mangle]
pub unsafe extern "C" fn qcap_channel_dims(
    ch: *const QcapChannel,
    dim_in: *mut usize,
    dim_out: *mut usize,
    kraus_count: *mut usize,
) -> QcapStatus {
    guard(|| {
        let ch = &borrow(ch, "channel")?.0;
        *out_ptr(dim_in, "dim_in")? = ch.dim_in();
        *out_ptr(dim_out, "dim_out")? = ch.dim_out();
        *out_ptr(kraus_count, "kraus_count")? = ch.kraus().len();
        Ok(())
    })
}

/// JSON encoding of the channel; release with [`qcap_string_free`].
#[no_mangle]
pub unsafe extern "C" fn qcap_channel_to_json(ch: *const QcapChannel, out: *mut *mut c_char) -> QcapStatus {
    guard(|| {
        let ch = &borrow(ch, "channel")?.0;
        let out = out_ptr(out, "out")?;
        *out = CString::new(channel_to_json(ch)).expect("json has no nul").into_raw();
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn qcap_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// `outer ∘ inner`: `inner` acts first.
#[no_mangle]
pub unsafe extern "C" fn qcap_channel_compose(
    outer: *const QcapChannel,
    inner: *const QcapChannel,
    out: *mut *mut QcapChannel,
) -> QcapStatus {
    guard(|| {
        let a = &borrow(outer, "outer")?.0;
        let b = &borrow(inner, "inner")?.0;
        let out = out_ptr(out, "out")?;
        *out = boxed(QcapChannel(lift(compose(a, b))?));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn qcap_channel_tensor(
    a: *const QcapChannel,
    b: *const QcapChannel,
    out: *mut *mut QcapChannel,
) -> QcapStatus {
    guard(|| {
        let a = &borrow(a, "a")?.0;
        let b = &borrow(b, "b")?.0;
        let out = out_ptr(out, "out")?;
        *out = boxed(QcapChannel(tensor(a, b)));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn qcap_channel_complementary(ch: *const QcapChannel, out: *mut *mut QcapChannel) -> QcapStatus {
    guard(|| {
        let ch = &borrow(ch, "channel")?.0;
        let out = out_ptr(out, "out")?;
        *out = boxed(QcapChannel(complementary(ch)));
        Ok(())
    })
}

/// PPT test of the Choi state; also reports the smallest partial-transpose eigenvalue.
#[no_mangle]
pub unsafe extern "C" fn qcap_channel_is_ppt(ch: *const QcapChannel, ppt: *mut bool, min_eigenvalue: *mut f64) -> QcapStatus {
    guard(|| {
        let ch = &borrow(ch, "channel")?.0;
        let (ok, min) = is_ppt(ch);
        *out_ptr(ppt, "ppt")? = ok;
        if let Some(m) = min_eigenvalue.as_mut() {
            *m = min;
        }
        Ok(())
    })
}

/// Density matrix from row-major real and imaginary parts of length `dim * dim`.
#[no_mangle]
pub unsafe extern "C" fn qcap_state_new(
    dim: usize,
    re: *const f64,
    im: *const f64,
    out: *mut *mut QcapState,
) -> QcapStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        if re.is_null() || im.is_null() {
            return Err((QcapStatus::NullPointer, "state data is null".into()));
        }
        if dim == 0 {
            return Err((QcapStatus::InvalidArgument, "dimension must be positive".into()));
        }
        let re = std::slice::from_raw_parts(re, dim * dim);
        let im = std::slice::from_raw_parts(im, dim * dim);
        let data = re.iter().zip(im).map(|(&a, &b)| C64::new(a, b)).collect();
        let m = lift(ComplexMatrix::new(dim, dim, data))?;
        *out = boxed(QcapState(lift(DensityMatrix::new(m))?));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn qcap_state_maximally_mixed(dim: usize, out: *mut *mut QcapState) -> QcapStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        if dim == 0 {
            return Err((QcapStatus::InvalidArgument, "dimension must be positive".into()));
        }
        *out = boxed(QcapState(DensityMatrix::maximally_mixed(dim)));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn qcap_state_free(s: *mut QcapState) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

#[no_mangle]
pub unsafe extern "C" fn qcap_state_dim(s: *const QcapState, dim: *mut usize) -> QcapStatus {
    guard(|| {
        *out_ptr(dim, "dim")? = borrow(s, "state")?.0.dim();
        Ok(())
    })
}

/// Copies the entries into caller buffers of length `dim * dim`.
#[no_mangle]
pub unsafe extern "C" fn qcap_state_entries(s: *const QcapState, re: *mut f64, im: *mut f64, len: usize) -> QcapStatus {
    guard(|| {
        let m = borrow(s, "state")?.0.matrix();
        let n = m.rows() * m.cols();
        if len < n {
            return Err((QcapStatus::InvalidArgument, format!("buffer holds {len} entries, need {n}")));
        }
        if re.is_null() || im.is_null() {
            return Err((QcapStatus::NullPointer, "output buffer is null".into()));
        }
        let re = std::slice::from_raw_parts_mut(re, n);
        let im = std::slice::from_raw_parts_mut(im, n);
        for (i, z) in m.data().iter().enumerate() {
            re[i] = z.re;
            im[i] = z.im;
        }
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn qcap_apply(ch: *const QcapChannel, s: *const QcapState, out: *mut *mut QcapState) -> QcapStatus {
    guard(|| {
        let ch = &borrow(ch, "channel")?.0;
        let s = &borrow(s, "state")?.0;
        let out = out_ptr(out, "out")?;
        *out = boxed(QcapState(lift(apply(ch, s))?));
        Ok(())
    })
}

/// Von Neumann entropy in bits.
#[no_mangle]
pub unsafe extern "C" fn qcap_entropy(s: *const QcapState, out: *mut f64) -> QcapStatus {
    guard(|| {
        *out_ptr(out, "out")? = von_neumann_entropy(&borrow(s, "state")?.0);
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn qcap_coherent_information(
    s: *const QcapState,
    ch: *const QcapChannel,
    out: *mut f64,
) -> QcapStatus {
    guard(|| {
        let s = &borrow(s, "state")?.0;
        let ch = &borrow(ch, "channel")?.0;
        *out_ptr(out, "out")? = lift(coherent_information(s, ch))?;
        Ok(())
    })
}

fn options(restarts: usize, seed: u64) -> Result<OptimizerOptions, (QcapStatus, String)> {
    let opts = OptimizerOptions {
        restarts,
        seed,
        ..Default::default()
    };
    lift(opts.validate())?;
    Ok(opts)
}

/// Optimized coherent information (a lower bound); `argmax` may be null.
#[no_mangle]
pub unsafe extern "C" fn qcap_maximize_coherent_information(
    ch: *const QcapChannel,
    restarts: usize,
    seed: u64,
    value: *mut f64,
    argmax: *mut *mut QcapState,
) -> QcapStatus {
    guard(|| {
        let ch = &borrow(ch, "channel")?.0;
        let value = out_ptr(value, "value")?;
        let est = lift(maximize_coherent_information(ch, &options(restarts, seed)?))?;
        *value = est.value;
        if let Some(a) = argmax.as_mut() {
            *a = boxed(QcapState(est.state().expect("state estimate").clone()));
        }
        Ok(())
    })
}

/// Optimized Holevo quantity over ensembles of `members` pure states; zero
/// members selects the default size.
#[no_mangle]
pub unsafe extern "C" fn qcap_maximize_holevo(
    ch: *const QcapChannel,
    members: usize,
    restarts: usize,
    seed: u64,
    value: *mut f64,
) -> QcapStatus {
    guard(|| {
        let ch = &borrow(ch, "channel")?.0;
        let value = out_ptr(value, "value")?;
        let m = if members == 0 { None } else { Some(members) };
        *value = lift(maximize_holevo(ch, m, &options(restarts, seed)?))?.value;
        Ok(())
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn error_round_trip() {
        let mut ch = ptr::null_mut();
        let spec = CString::new("nope:q=1").unwrap();
        let st = unsafe { qcap_channel_from_spec(spec.as_ptr(), &mut ch) };
        assert_eq!(st, QcapStatus::Parse);
        assert!(ch.is_null());
        let msg = unsafe { CStr::from_ptr(qcap_last_error()) }.to_str().unwrap();
        assert!(msg.contains("nope"));
    }

    #[test]
    fn null_arguments_are_reported() {
        let st = unsafe { qcap_channel_from_spec(ptr::null(), ptr::null_mut()) };
        assert_eq!(st, QcapStatus::NullPointer);
        let st = unsafe { qcap_channel_dims(ptr::null(), ptr::null_mut(), ptr::null_mut(), ptr::null_mut()) };
        assert_eq!(st, QcapStatus::NullPointer);
    }

    #[test]
    fn success_clears_error() {
        let bad = CString::new("dep:q=2").unwrap();
        let mut ch = ptr::null_mut();
        assert_eq!(unsafe { qcap_channel_from_spec(bad.as_ptr(), &mut ch) }, QcapStatus::InvalidArgument);
        assert!(!qcap_last_error().is_null());
        let good = CString::new("ebxy").unwrap();
        assert_eq!(unsafe { qcap_channel_from_spec(good.as_ptr(), &mut ch) }, QcapStatus::Ok);
        assert!(qcap_last_error().is_null());
        unsafe { qcap_channel_free(ch) };
    }
}
