//! C ABI over the geneo toolkit. Objects cross the boundary as opaque
//! handles created and freed here; every fallible call returns a
//! [`GeneoStatus`] and writes its result through out-pointers. A detailed
//! message for the most recent failure on the current thread is available
//! via [`geneo_last_error_message`].
//!
//! The companion header `include/geneo.h` is generated by cbindgen at build
//! time.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use geneo::measure::dim_pm;
use geneo::operator::equivariance_witness;
use geneo::represent::{certify_geneo, geo_to_permutant_measure, Tolerances};
use geneo::{Error, OperatorMatrix, PermutationGroup, SignedMeasure};

/// Status code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeneoStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 2,
    /// Malformed input (bad JSON, bad matrix shape, bad weights, ...).
    InvalidInput = 3,
    /// Operands have different degrees.
    DegreeMismatch = 4,
    /// The group does not act transitively on the domain.
    NotTransitive = 5,
    /// The matrix does not commute with the group action.
    NotEquivariant = 6,
    /// Internal verification failed (tolerances too tight for the input).
    VerificationFailed = 7,
    /// A panic was caught at the boundary.
    Panic = 8,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let stored = CString::new(message)
        .unwrap_or_else(|_| CString::new("error message contained NUL").unwrap());
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(stored));
}

fn status_of(err: &Error) -> GeneoStatus {
    match err {
        Error::DegreeMismatch { .. } => GeneoStatus::DegreeMismatch,
        Error::NotTransitive => GeneoStatus::NotTransitive,
        Error::NotEquivariant(_) => GeneoStatus::NotEquivariant,
        Error::VerificationFailed(_) | Error::NonConvergence { .. } => {
            GeneoStatus::VerificationFailed
        }
        _ => GeneoStatus::InvalidInput,
    }
}

fn fail(err: Error) -> GeneoStatus {
    let status = status_of(&err);
    set_error(err.to_string());
    status
}

fn guard(body: impl FnOnce() -> GeneoStatus) -> GeneoStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(_) => {
            set_error("panic caught at the FFI boundary".into());
            GeneoStatus::Panic
        }
    }
}

/// Opaque handle to a finite permutation group.
pub struct GeneoGroup(PermutationGroup);

/// Opaque handle to a dense operator matrix.
pub struct GeneoMatrix(OperatorMatrix);

/// Opaque handle to a finitely supported signed measure on permutations.
pub struct GeneoMeasure(SignedMeasure);

/// Certification summary of a matrix under a group.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct GeneoCheckResult {
    pub transitive: bool,
    pub equivariant: bool,
    pub nonexpansive: bool,
    pub inf_norm: f64,
}

/// Verified decomposition certificate.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct GeneoCertificate {
    pub is_geneo: bool,
    pub total_variation: f64,
    pub reconstruction_gap: f64,
    pub norm_identity_gap: f64,
}

/// Message for the most recent failure on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn geneo_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| {
        slot.borrow()
            .as_ref()
            .map_or(ptr::null(), |msg| msg.as_ptr())
    })
}

/// Parses group JSON `{ "degree": n, "generators": [[...] | "(1 2)"] }` and
/// closes the generators. On success writes a handle the caller must free
/// with [`geneo_group_free`].
///
/// # Safety
/// `json` must be a valid NUL-terminated C string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn geneo_group_parse(
    json: *const c_char,
    out: *mut *mut GeneoGroup,
) -> GeneoStatus {
    guard(|| {
        if json.is_null() || out.is_null() {
            return GeneoStatus::NullArgument;
        }
        let text = match CStr::from_ptr(json).to_str() {
            Ok(t) => t,
            Err(_) => return GeneoStatus::InvalidUtf8,
        };
        match geneo::io::parse_group_json(text) {
            Ok(group) => {
                *out = Box::into_raw(Box::new(GeneoGroup(group)));
                GeneoStatus::Ok
            }
            Err(err) => fail(err),
        }
    })
}

/// # Safety
/// `group` must be null or a pointer from [`geneo_group_parse`], not yet
/// freed.
#[no_mangle]
pub unsafe extern "C" fn geneo_group_free(group: *mut GeneoGroup) {
    if !group.is_null() {
        drop(Box::from_raw(group));
    }
}

/// Number of points the group acts on; 0 for null.
///
/// # Safety
/// `group` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn geneo_group_degree(group: *const GeneoGroup) -> usize {
    group.as_ref().map_or(0, |g| g.0.degree())
}

/// Number of group elements; 0 for null.
///
/// # Safety
/// `group` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn geneo_group_order(group: *const GeneoGroup) -> usize {
    group.as_ref().map_or(0, |g| g.0.order())
}

/// # Safety
/// `group` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn geneo_group_is_transitive(group: *const GeneoGroup) -> bool {
    group.as_ref().is_some_and(|g| g.0.is_transitive())
}

/// Wraps `n*n` row-major entries into a matrix handle; the buffer is copied.
/// Free with [`geneo_matrix_free`].
///
/// # Safety
/// `entries` must point to `n*n` readable doubles and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn geneo_matrix_create(
    n: usize,
    entries: *const f64,
    out: *mut *mut GeneoMatrix,
) -> GeneoStatus {
    guard(|| {
        if entries.is_null() || out.is_null() {
            return GeneoStatus::NullArgument;
        }
        if n == 0 {
            return fail(Error::InvalidInput("matrix dimension must be positive".into()));
        }
        let values = std::slice::from_raw_parts(entries, n * n);
        let rows: Vec<Vec<f64>> = values.chunks_exact(n).map(|r| r.to_vec()).collect();
        match OperatorMatrix::from_rows(rows) {
            Ok(matrix) => {
                *out = Box::into_raw(Box::new(GeneoMatrix(matrix)));
                GeneoStatus::Ok
            }
            Err(err) => fail(err),
        }
    })
}

/// # Safety
/// `matrix` must be null or a pointer from [`geneo_matrix_create`], not yet
/// freed.
#[no_mangle]
pub unsafe extern "C" fn geneo_matrix_free(matrix: *mut GeneoMatrix) {
    if !matrix.is_null() {
        drop(Box::from_raw(matrix));
    }
}

/// Certifies transitivity, equivariance and non-expansiveness.
///
/// # Safety
/// All pointers must be live handles / valid out-pointers.
#[no_mangle]
pub unsafe extern "C" fn geneo_check(
    matrix: *const GeneoMatrix,
    group: *const GeneoGroup,
    tol: f64,
    out: *mut GeneoCheckResult,
) -> GeneoStatus {
    guard(|| {
        let (Some(matrix), Some(group)) = (matrix.as_ref(), group.as_ref()) else {
            return GeneoStatus::NullArgument;
        };
        if out.is_null() {
            return GeneoStatus::NullArgument;
        }
        match equivariance_witness(&matrix.0, &group.0, tol) {
            Ok(witness) => {
                *out = GeneoCheckResult {
                    transitive: group.0.is_transitive(),
                    equivariant: witness.is_none(),
                    nonexpansive: matrix.0.is_nonexpansive(tol),
                    inf_norm: matrix.0.inf_norm(),
                };
                GeneoStatus::Ok
            }
            Err(err) => fail(err),
        }
    })
}

/// Recovers the conjugation-invariant measure representing an equivariant
/// matrix under a transitive group. On success writes a measure handle
/// (free with [`geneo_measure_free`]) and fills the certificate.
///
/// # Safety
/// All pointers must be live handles / valid out-pointers.
#[no_mangle]
pub unsafe extern "C" fn geneo_decompose(
    matrix: *const GeneoMatrix,
    group: *const GeneoGroup,
    tol: f64,
    out_measure: *mut *mut GeneoMeasure,
    out_certificate: *mut GeneoCertificate,
) -> GeneoStatus {
    guard(|| {
        let (Some(matrix), Some(group)) = (matrix.as_ref(), group.as_ref()) else {
            return GeneoStatus::NullArgument;
        };
        if out_measure.is_null() || out_certificate.is_null() {
            return GeneoStatus::NullArgument;
        }
        let tolerances = Tolerances::from_base(tol);
        let result = match geo_to_permutant_measure(&matrix.0, &group.0, &tolerances) {
            Ok(r) => r,
            Err(err) => return fail(err),
        };
        let certificate = match certify_geneo(&matrix.0, &group.0, &tolerances) {
            Ok(c) => c,
            Err(err) => return fail(err),
        };
        *out_certificate = GeneoCertificate {
            is_geneo: certificate.is_geneo,
            total_variation: result.measure.total_variation(),
            reconstruction_gap: result.reconstruction_gap,
            norm_identity_gap: result.norm_identity_gap,
        };
        *out_measure = Box::into_raw(Box::new(GeneoMeasure(result.measure)));
        GeneoStatus::Ok
    })
}

/// # Safety
/// `measure` must be null or a pointer from [`geneo_decompose`], not yet
/// freed.
#[no_mangle]
pub unsafe extern "C" fn geneo_measure_free(measure: *mut GeneoMeasure) {
    if !measure.is_null() {
        drop(Box::from_raw(measure));
    }
}

/// # Safety
/// `measure` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn geneo_measure_degree(measure: *const GeneoMeasure) -> usize {
    measure.as_ref().map_or(0, |m| m.0.degree())
}

/// # Safety
/// `measure` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn geneo_measure_support_size(measure: *const GeneoMeasure) -> usize {
    measure.as_ref().map_or(0, |m| m.0.support_size())
}

/// # Safety
/// `measure` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn geneo_measure_total_variation(measure: *const GeneoMeasure) -> f64 {
    measure.as_ref().map_or(0.0, |m| m.0.total_variation())
}

/// Copies the `index`-th support entry (canonical order): the image array
/// into `out_images` (`degree` slots) and its weight into `out_weight`.
///
/// # Safety
/// `out_images` must point to `geneo_measure_degree(measure)` writable
/// `size_t` slots; the other pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn geneo_measure_entry(
    measure: *const GeneoMeasure,
    index: usize,
    out_images: *mut usize,
    out_weight: *mut f64,
) -> GeneoStatus {
    guard(|| {
        let Some(measure) = measure.as_ref() else {
            return GeneoStatus::NullArgument;
        };
        if out_images.is_null() || out_weight.is_null() {
            return GeneoStatus::NullArgument;
        }
        match measure.0.support().nth(index) {
            Some((perm, weight)) => {
                let slots = std::slice::from_raw_parts_mut(out_images, perm.degree());
                slots.copy_from_slice(perm.images());
                *out_weight = weight;
                GeneoStatus::Ok
            }
            None => fail(Error::InvalidInput(format!(
                "support index {index} out of range"
            ))),
        }
    })
}

/// Serializes a measure as JSON; free the string with [`geneo_string_free`].
///
/// # Safety
/// `measure` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn geneo_measure_to_json(
    measure: *const GeneoMeasure,
    out: *mut *mut c_char,
) -> GeneoStatus {
    guard(|| {
        let Some(measure) = measure.as_ref() else {
            return GeneoStatus::NullArgument;
        };
        if out.is_null() {
            return GeneoStatus::NullArgument;
        }
        let json = geneo::io::measure_to_json(&measure.0);
        match CString::new(json) {
            Ok(text) => {
                *out = text.into_raw();
                GeneoStatus::Ok
            }
            Err(_) => fail(Error::InvalidInput("JSON contained NUL".into())),
        }
    })
}

/// Dimension of the space of conjugation-invariant measures under the
/// group, as a decimal string (the value can exceed any fixed-width
/// integer). Free with [`geneo_string_free`].
///
/// # Safety
/// `group` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn geneo_dim_pm(
    group: *const GeneoGroup,
    out: *mut *mut c_char,
) -> GeneoStatus {
    guard(|| {
        let Some(group) = group.as_ref() else {
            return GeneoStatus::NullArgument;
        };
        if out.is_null() {
            return GeneoStatus::NullArgument;
        }
        match dim_pm(&group.0) {
            Ok(dim) => {
                let text = CString::new(dim.to_string()).expect("decimal digits");
                *out = text.into_raw();
                GeneoStatus::Ok
            }
            Err(err) => fail(err),
        }
    })
}

/// Frees a string returned by this library.
///
/// # Safety
/// `text` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn geneo_string_free(text: *mut c_char) {
    if !text.is_null() {
        drop(CString::from_raw(text));
    }
}
