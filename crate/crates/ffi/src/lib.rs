//! C ABI for `mopuc`.
//!
//! Objects are opaque heap handles released with their `_free` function.
//! Every fallible call returns a [`MopucStatus`]; on failure a message for the
//! calling thread is available through [`mopuc_last_error_message`]. Matrices
//! cross the boundary as interleaved row-major `re, im` pairs. Infinite rates
//! are reported as `+INFINITY`.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use mopuc::linalg::ComplexMatrix;
use mopuc::measures::spectral_measure;
use mopuc::mopuc::{ggt, theta, verblunsky_by_deflation, verblunsky_of_measure, VerblunskySeq};
use mopuc::rates::{rate_ball, rate_seq, Rate};
use mopuc::sampling::{corner_log_density, sample_corner, sample_ginibre, sample_haar};
use mopuc::{Error, RngStream};
use num_complex::Complex64;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MopucStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DimensionMismatch = 3,
    /// Input is not Hermitian, positive, unitary or inside the unit ball.
    InvalidInput = 4,
    /// The measure or sequence degenerates before the requested length.
    Degenerate = 5,
    /// Ill-conditioned or non-convergent computation.
    Numerical = 6,
    Internal = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MopucMethod {
    Moments = 0,
    Deflation = 1,
}

pub struct MopucMatrix {
    inner: ComplexMatrix,
}

pub struct MopucVerblunsky {
    inner: VerblunskySeq,
}

pub struct MopucRng {
    inner: RngStream,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior nuls removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> MopucStatus {
    match e {
        Error::NotSquare { .. } | Error::DimensionMismatch(_) => MopucStatus::DimensionMismatch,
        Error::NotHermitian { .. }
        | Error::NotPositive { .. }
        | Error::NotUnitary { .. }
        | Error::OutsideBall { .. }
        | Error::BadNormalization { .. } => MopucStatus::InvalidInput,
        Error::SupportExhausted { .. } | Error::BoundaryCoefficient { .. } => MopucStatus::Degenerate,
        Error::NoConvergence | Error::Conditioning { .. } | Error::SingularSample => MopucStatus::Numerical,
        Error::TooFewSamples { .. } | Error::InvalidArgument(_) => MopucStatus::InvalidArgument,
        Error::Postcondition(_) => MopucStatus::Internal,
    }
}

struct Failure(MopucStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(MopucStatus::NullPointer, format!("{what} is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> MopucStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => MopucStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(_) => {
            set_last_error("panic inside mopuc".into());
            MopucStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    unsafe { p.as_ref() }.ok_or_else(|| null(what))
}

unsafe fn write_out<T>(out: *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    unsafe { out.write(value) };
    Ok(())
}

unsafe fn out_matrix(out: *mut *mut MopucMatrix, m: ComplexMatrix) -> Result<(), Failure> {
    unsafe { write_out(out, Box::into_raw(Box::new(MopucMatrix { inner: m }))) }
}

fn rate_as_f64(r: Rate) -> f64 {
    r.finite().unwrap_or(f64::INFINITY)
}

/// Length in bytes of the last error message on this thread, including the
/// terminating nul, or 0 if there is none.
#[no_mangle]
pub extern "C" fn mopuc_last_error_length() -> usize {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(0, |c| c.as_bytes_with_nul().len()))
}

/// Copies the last error message into `buf`, truncating to `len - 1` bytes.
/// Returns the number of bytes written excluding the nul.
///
/// # Safety
/// `buf` must be valid for writes of `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn mopuc_last_error_message(buf: *mut c_char, len: usize) -> usize {
    if buf.is_null() || len == 0 {
        return 0;
    }
    LAST_ERROR.with(|e| {
        let bytes = e.borrow().as_ref().map_or(Vec::new(), |c| c.as_bytes().to_vec());
        let n = bytes.len().min(len - 1);
        unsafe {
            ptr::copy_nonoverlapping(bytes.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        n
    })
}

/// Builds a `rows x cols` matrix from `2 * rows * cols` interleaved values.
///
/// # Safety
/// `data` must point to `2 * rows * cols` doubles and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mopuc_matrix_new(
    rows: usize,
    cols: usize,
    data: *const f64,
    out: *mut *mut MopucMatrix,
) -> MopucStatus {
    guard(|| {
        if rows == 0 || cols == 0 {
            return Err(Failure(MopucStatus::InvalidArgument, "matrix must be non-empty".into()));
        }
        if data.is_null() {
            return Err(null("data"));
        }
        let values = unsafe { std::slice::from_raw_parts(data, 2 * rows * cols) };
        if values.iter().any(|x| !x.is_finite()) {
            return Err(Failure(MopucStatus::InvalidArgument, "entries must be finite".into()));
        }
        let m = ComplexMatrix::from_fn(rows, cols, |i, j| {
            let k = 2 * (i * cols + j);
            Complex64::new(values[k], values[k + 1])
        });
        unsafe { out_matrix(out, m) }
    })
}

/// # Safety
/// `m` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn mopuc_matrix_free(m: *mut MopucMatrix) {
    if !m.is_null() {
        drop(unsafe { Box::from_raw(m) });
    }
}

/// # Safety
/// `m` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mopuc_matrix_rows(m: *const MopucMatrix) -> usize {
    unsafe { m.as_ref() }.map_or(0, |m| m.inner.nrows())
}

/// # Safety
/// `m` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mopuc_matrix_cols(m: *const MopucMatrix) -> usize {
    unsafe { m.as_ref() }.map_or(0, |m| m.inner.ncols())
}

/// # Safety
/// `m` must be a live handle; `re` and `im` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mopuc_matrix_get(
    m: *const MopucMatrix,
    row: usize,
    col: usize,
    re: *mut f64,
    im: *mut f64,
) -> MopucStatus {
    guard(|| {
        let m = unsafe { deref(m, "matrix") }?;
        if row >= m.inner.nrows() || col >= m.inner.ncols() {
            return Err(Failure(
                MopucStatus::InvalidArgument,
                format!("index ({row}, {col}) outside {}x{}", m.inner.nrows(), m.inner.ncols()),
            ));
        }
        let z = m.inner[(row, col)];
        unsafe {
            write_out(re, z.re)?;
            write_out(im, z.im)
        }
    })
}

/// Copies all entries into `data`, interleaved row-major.
///
/// # Safety
/// `data` must be valid for writes of `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn mopuc_matrix_copy(m: *const MopucMatrix, data: *mut f64, len: usize) -> MopucStatus {
    guard(|| {
        let m = unsafe { deref(m, "matrix") }?;
        let (rows, cols) = m.inner.shape();
        if len < 2 * rows * cols {
            return Err(Failure(MopucStatus::DimensionMismatch, format!("need {} doubles, got {len}", 2 * rows * cols)));
        }
        if data.is_null() {
            return Err(null("data"));
        }
        let buf = unsafe { std::slice::from_raw_parts_mut(data, 2 * rows * cols) };
        for i in 0..rows {
            for j in 0..cols {
                let k = 2 * (i * cols + j);
                buf[k] = m.inner[(i, j)].re;
                buf[k + 1] = m.inner[(i, j)].im;
            }
        }
        Ok(())
    })
}

/// Seeded random stream; distinct `stream` values give independent streams.
#[no_mangle]
pub extern "C" fn mopuc_rng_new(seed: u64, stream: u64) -> *mut MopucRng {
    Box::into_raw(Box::new(MopucRng { inner: RngStream::new(seed, stream) }))
}

/// # Safety
/// `rng` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mopuc_rng_free(rng: *mut MopucRng) {
    if !rng.is_null() {
        drop(unsafe { Box::from_raw(rng) });
    }
}

unsafe fn sample_with(
    rng: *mut MopucRng,
    out: *mut *mut MopucMatrix,
    f: impl FnOnce(&mut RngStream) -> Result<ComplexMatrix, Error>,
) -> MopucStatus {
    guard(|| {
        let rng = unsafe { rng.as_mut() }.ok_or_else(|| null("rng"))?;
        let m = f(&mut rng.inner)?;
        unsafe { out_matrix(out, m) }
    })
}

fn positive(n: usize) -> Result<(), Error> {
    if n == 0 {
        Err(Error::InvalidArgument("size must be positive".into()))
    } else {
        Ok(())
    }
}

/// Haar unitary of size `n`.
///
/// # Safety
/// `rng` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mopuc_sample_haar(rng: *mut MopucRng, n: usize, out: *mut *mut MopucMatrix) -> MopucStatus {
    unsafe { sample_with(rng, out, |r| positive(n).map(|_| sample_haar(n, r))) }
}

/// Ginibre matrix of size `n` with unit-variance complex entries.
///
/// # Safety
/// `rng` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mopuc_sample_ginibre(rng: *mut MopucRng, n: usize, out: *mut *mut MopucMatrix) -> MopucStatus {
    unsafe { sample_with(rng, out, |r| positive(n).map(|_| sample_ginibre(n, r))) }
}

/// Top-left `p x p` corner of a Haar unitary of size `n`, `n > 2p`.
///
/// # Safety
/// `rng` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mopuc_sample_corner(
    rng: *mut MopucRng,
    n: usize,
    p: usize,
    out: *mut *mut MopucMatrix,
) -> MopucStatus {
    unsafe { sample_with(rng, out, |r| sample_corner(n, p, r)) }
}

/// First `count` Verblunsky coefficients of `(u, span{e_1..e_p})`.
///
/// # Safety
/// `u` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mopuc_verblunsky_from_unitary(
    u: *const MopucMatrix,
    p: usize,
    count: usize,
    method: MopucMethod,
    out: *mut *mut MopucVerblunsky,
) -> MopucStatus {
    guard(|| {
        let u = &unsafe { deref(u, "unitary") }?.inner;
        let seq = match method {
            MopucMethod::Moments => verblunsky_of_measure(&spectral_measure(u, p)?, count)?,
            MopucMethod::Deflation => verblunsky_by_deflation(u, p, count)?,
        };
        unsafe { write_out(out, Box::into_raw(Box::new(MopucVerblunsky { inner: seq }))) }
    })
}

/// Sequence from `count` coefficient handles of size `p x p`.
///
/// # Safety
/// `coeffs` must point to `count` live matrix handles and `out` be writable.
#[no_mangle]
pub unsafe extern "C" fn mopuc_verblunsky_new(
    p: usize,
    coeffs: *const *const MopucMatrix,
    count: usize,
    out: *mut *mut MopucVerblunsky,
) -> MopucStatus {
    guard(|| {
        if count > 0 && coeffs.is_null() {
            return Err(null("coeffs"));
        }
        let handles = if count == 0 { &[][..] } else { unsafe { std::slice::from_raw_parts(coeffs, count) } };
        let ms = handles
            .iter()
            .map(|&h| unsafe { deref(h, "coefficient") }.map(|m| m.inner.clone()))
            .collect::<Result<Vec<_>, _>>()?;
        let seq = VerblunskySeq::new(p, ms)?;
        unsafe { write_out(out, Box::into_raw(Box::new(MopucVerblunsky { inner: seq }))) }
    })
}

/// # Safety
/// `seq` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mopuc_verblunsky_free(seq: *mut MopucVerblunsky) {
    if !seq.is_null() {
        drop(unsafe { Box::from_raw(seq) });
    }
}

/// # Safety
/// `seq` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mopuc_verblunsky_len(seq: *const MopucVerblunsky) -> usize {
    unsafe { seq.as_ref() }.map_or(0, |s| s.inner.len())
}

/// # Safety
/// `seq` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mopuc_verblunsky_dim(seq: *const MopucVerblunsky) -> usize {
    unsafe { seq.as_ref() }.map_or(0, |s| s.inner.dim())
}

/// Copy of coefficient `index`.
///
/// # Safety
/// `seq` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mopuc_verblunsky_get(
    seq: *const MopucVerblunsky,
    index: usize,
    out: *mut *mut MopucMatrix,
) -> MopucStatus {
    guard(|| {
        let seq = &unsafe { deref(seq, "sequence") }?.inner;
        if index >= seq.len() {
            return Err(Failure(MopucStatus::InvalidArgument, format!("index {index} outside length {}", seq.len())));
        }
        unsafe { out_matrix(out, seq.alpha(index).clone()) }
    })
}

/// The `2p x 2p` unitary rotation built from a strict contraction.
///
/// # Safety
/// `alpha` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mopuc_theta(alpha: *const MopucMatrix, out: *mut *mut MopucMatrix) -> MopucStatus {
    guard(|| {
        let a = &unsafe { deref(alpha, "alpha") }?.inner;
        if a.nrows() != a.ncols() {
            return Err(Error::NotSquare { rows: a.nrows(), cols: a.ncols() }.into());
        }
        let t = theta(a)?;
        unsafe { out_matrix(out, t) }
    })
}

/// Leading `blocks x blocks` block section of the GGT matrix, the sequence
/// padded with zeros.
///
/// # Safety
/// `seq` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mopuc_ggt(
    seq: *const MopucVerblunsky,
    blocks: usize,
    out: *mut *mut MopucMatrix,
) -> MopucStatus {
    guard(|| {
        let seq = &unsafe { deref(seq, "sequence") }?.inner;
        if blocks == 0 {
            return Err(Failure(MopucStatus::InvalidArgument, "blocks must be positive".into()));
        }
        unsafe { out_matrix(out, ggt(seq, blocks)) }
    })
}

/// `-log det(I - vv^*)`, `+INFINITY` on or outside the unit ball.
///
/// # Safety
/// `v` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mopuc_rate_ball(v: *const MopucMatrix, out: *mut f64) -> MopucStatus {
    guard(|| {
        let v = &unsafe { deref(v, "v") }?.inner;
        if v.nrows() != v.ncols() {
            return Err(Error::NotSquare { rows: v.nrows(), cols: v.ncols() }.into());
        }
        unsafe { write_out(out, rate_as_f64(rate_ball(v).value)) }
    })
}

/// Sum of the ball rates of the coefficients.
///
/// # Safety
/// `seq` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mopuc_rate_seq(seq: *const MopucVerblunsky, out: *mut f64) -> MopucStatus {
    guard(|| {
        let seq = &unsafe { deref(seq, "sequence") }?.inner;
        unsafe { write_out(out, rate_as_f64(rate_seq(seq).value)) }
    })
}

/// Log-density of the `p x p` corner law of a Haar unitary of size `n > 2p`;
/// `-INFINITY` outside the ball.
///
/// # Safety
/// `v` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mopuc_corner_log_density(
    v: *const MopucMatrix,
    n: usize,
    p: usize,
    out: *mut f64,
) -> MopucStatus {
    guard(|| {
        let v = &unsafe { deref(v, "v") }?.inner;
        let d = corner_log_density(v, n, p)?;
        unsafe { write_out(out, d) }
    })
}
