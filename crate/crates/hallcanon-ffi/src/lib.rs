//! C ABI for the hallcanon engine.
//!
//! Every function returns an [`HcStatus`]. Results come back through out
//! pointers; strings are owned by the caller and released with
//! [`hc_string_free`], handles with their matching `_free` function. After a
//! failure, [`hc_last_error`] describes it for the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use hallcanon::canonical::{canonical_basis, CanonError, CanonicalElement, MAX_BAR_RANK};
use hallcanon::cohp1_oracle::{aut_count, hall_number, KClass, OracleError, SheafIso};

/// Result of every call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Budget = 3,
    Unsupported = 4,
    Internal = 5,
    Panic = 6,
}

/// A computed canonical basis of one class in one window.
pub struct HcBasis {
    elements: Vec<CanonicalElement>,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior nul removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn fail(status: HcStatus, msg: impl AsRef<str>) -> HcStatus {
    set_error(msg.as_ref());
    status
}

/// Runs `f`, turning panics into [`HcStatus::Panic`].
fn guard(f: impl FnOnce() -> HcStatus) -> HcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(p) => {
            let msg = p
                .downcast_ref::<String>()
                .map(String::as_str)
                .or_else(|| p.downcast_ref::<&str>().copied())
                .unwrap_or("panic");
            fail(HcStatus::Panic, msg)
        }
    }
}

fn canon_status(e: &CanonError) -> HcStatus {
    match e {
        CanonError::RankTooLarge(_) => HcStatus::Unsupported,
        _ => HcStatus::Internal,
    }
}

fn oracle_status(e: &OracleError) -> HcStatus {
    match e {
        OracleError::Budget(_) => HcStatus::Budget,
        OracleError::Unsupported(_) => HcStatus::Unsupported,
        OracleError::Field(_) | OracleError::Parse(_) => HcStatus::InvalidArgument,
        _ => HcStatus::Internal,
    }
}

/// Copies `s` into a caller-owned C string.
///
/// # Safety
/// `out` must be valid for a pointer write.
unsafe fn write_string(s: &str, out: *mut *mut c_char) -> HcStatus {
    match CString::new(s) {
        Ok(c) => {
            *out = c.into_raw();
            HcStatus::Ok
        }
        Err(_) => fail(HcStatus::Internal, "string contains a nul byte"),
    }
}

fn check_field(q: u32) -> Result<(), HcStatus> {
    hallcanon::ff::Field::get(q).map(|_| ()).map_err(|e| fail(HcStatus::InvalidArgument, e.to_string()))
}

/// # Safety
/// `s` must be null or point to a nul-terminated string.
unsafe fn read_str<'a>(s: *const c_char) -> Result<&'a str, HcStatus> {
    if s.is_null() {
        return Err(fail(HcStatus::NullPointer, "null string argument"));
    }
    CStr::from_ptr(s).to_str().map_err(|_| fail(HcStatus::InvalidArgument, "string argument is not UTF-8"))
}

/// Computes the canonical basis of class `(rank, degree)` at `window`.
///
/// # Safety
/// `out` must be valid for a pointer write. On success `*out` owns a handle
/// that must be released with [`hc_basis_free`].
#[no_mangle]
pub unsafe extern "C" fn hc_basis_new(rank: i32, degree: i32, window: i32, out: *mut *mut HcBasis) -> HcStatus {
    guard(|| {
        if out.is_null() {
            return fail(HcStatus::NullPointer, "null out pointer");
        }
        *out = ptr::null_mut();
        if rank < 0 || (rank == 0 && degree < 0) {
            return fail(HcStatus::InvalidArgument, format!("({rank},{degree}) is not the class of a sheaf"));
        }
        if rank > MAX_BAR_RANK {
            return fail(HcStatus::Unsupported, format!("rank {rank} is beyond the supported rank {MAX_BAR_RANK}"));
        }
        match canonical_basis(KClass::new(rank, degree), window) {
            Ok(elements) => {
                *out = Box::into_raw(Box::new(HcBasis { elements }));
                HcStatus::Ok
            }
            Err(e) => fail(canon_status(&e), e.to_string()),
        }
    })
}

/// Releases a basis handle. Null is ignored.
///
/// # Safety
/// `basis` must be null or a handle from [`hc_basis_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hc_basis_free(basis: *mut HcBasis) {
    if !basis.is_null() {
        drop(Box::from_raw(basis));
    }
}

/// Number of canonical elements.
///
/// # Safety
/// `basis` must be a live handle and `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn hc_basis_len(basis: *const HcBasis, out: *mut usize) -> HcStatus {
    guard(|| {
        if basis.is_null() || out.is_null() {
            return fail(HcStatus::NullPointer, "null argument");
        }
        *out = (*basis).elements.len();
        HcStatus::Ok
    })
}

/// # Safety
/// `basis` must be a live handle.
unsafe fn element<'a>(basis: *const HcBasis, i: usize) -> Result<&'a CanonicalElement, HcStatus> {
    if basis.is_null() {
        return Err(fail(HcStatus::NullPointer, "null basis"));
    }
    let b = &*basis;
    b.elements.get(i).ok_or_else(|| fail(HcStatus::InvalidArgument, format!("index {i} out of range 0..{}", b.elements.len())))
}

/// The PBW monomial indexing element `i`, e.g. `E[-1] s[1]`.
///
/// # Safety
/// `basis` must be a live handle and `out` valid for a pointer write. The
/// string must be released with [`hc_string_free`].
#[no_mangle]
pub unsafe extern "C" fn hc_basis_index(basis: *const HcBasis, i: usize, out: *mut *mut c_char) -> HcStatus {
    guard(|| {
        if out.is_null() {
            return fail(HcStatus::NullPointer, "null out pointer");
        }
        match element(basis, i) {
            Ok(b) => write_string(&b.index.to_string(), out),
            Err(s) => s,
        }
    })
}

/// Element `i` as JSON: class, window and `[e_part, partition, coefficient]`
/// terms.
///
/// # Safety
/// As for [`hc_basis_index`].
#[no_mangle]
pub unsafe extern "C" fn hc_basis_element_json(basis: *const HcBasis, i: usize, out: *mut *mut c_char) -> HcStatus {
    guard(|| {
        if out.is_null() {
            return fail(HcStatus::NullPointer, "null out pointer");
        }
        let b = match element(basis, i) {
            Ok(b) => b,
            Err(s) => return s,
        };
        match serde_json::to_string(&b.element) {
            Ok(s) => write_string(&s, out),
            Err(e) => fail(HcStatus::Internal, e.to_string()),
        }
    })
}

/// Number of subsheaves `B <= C` with `C/B ~ A` over `F_q`. Sheaves use
/// the text form `O(-1)+O+T(inf;2,1)`.
///
/// # Safety
/// The strings must be nul-terminated and `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn hc_hall_number(
    q: u32,
    c: *const c_char,
    b: *const c_char,
    a: *const c_char,
    out: *mut u64,
) -> HcStatus {
    guard(|| {
        if out.is_null() {
            return fail(HcStatus::NullPointer, "null out pointer");
        }
        if let Err(s) = check_field(q) {
            return s;
        }
        let parse = |s: *const c_char| -> Result<SheafIso, HcStatus> {
            let text = read_str(s)?;
            SheafIso::parse(text, q).map_err(|e| fail(oracle_status(&e), format!("`{text}`: {e}")))
        };
        let (c, b, a) = match (parse(c), parse(b), parse(a)) {
            (Ok(c), Ok(b), Ok(a)) => (c, b, a),
            (Err(s), _, _) | (_, Err(s), _) | (_, _, Err(s)) => return s,
        };
        let (ca, cb) = (a.class(), b.class());
        if c.class() != KClass::new(ca.rank + cb.rank, ca.degree + cb.degree) {
            return fail(HcStatus::InvalidArgument, format!("class of C {} is not {} + {}", c.class(), ca, cb));
        }
        match hall_number(&c, &a, &b, q) {
            Ok(n) => match u64::try_from(n) {
                Ok(n) => {
                    *out = n;
                    HcStatus::Ok
                }
                Err(_) => fail(HcStatus::Unsupported, format!("{n} does not fit in 64 bits")),
            },
            Err(e) => fail(oracle_status(&e), e.to_string()),
        }
    })
}

/// Order of the automorphism group of a sheaf over `F_q`.
///
/// # Safety
/// `sheaf` must be nul-terminated and `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn hc_aut_count(q: u32, sheaf: *const c_char, out: *mut u64) -> HcStatus {
    guard(|| {
        if out.is_null() {
            return fail(HcStatus::NullPointer, "null out pointer");
        }
        if let Err(s) = check_field(q) {
            return s;
        }
        let text = match read_str(sheaf) {
            Ok(t) => t,
            Err(s) => return s,
        };
        let s = match SheafIso::parse(text, q) {
            Ok(s) => s,
            Err(e) => return fail(oracle_status(&e), format!("`{text}`: {e}")),
        };
        match u64::try_from(aut_count(&s, q)) {
            Ok(n) => {
                *out = n;
                HcStatus::Ok
            }
            Err(_) => fail(HcStatus::Unsupported, "automorphism count does not fit in 64 bits"),
        }
    })
}

/// Copy of the calling thread's last error message, or null if none.
///
/// # Safety
/// The returned string must be released with [`hc_string_free`].
#[no_mangle]
pub unsafe extern "C" fn hc_last_error() -> *mut c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null_mut(), |c| c.clone().into_raw()))
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must be null or a string from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Library version, a static string the caller must not free.
#[no_mangle]
pub extern "C" fn hc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
