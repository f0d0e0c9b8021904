//! C interface to the commprob engine.
//!
//! Groups are opaque `CpGroup` handles created by `cp_group_new` and released
//! by `cp_group_free`. Every fallible call returns a `CpStatus`; on failure
//! `cp_last_error` describes the problem for the calling thread. Exact values
//! come back as heap strings ("num/den" or a decimal integer) that the caller
//! releases with `cp_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::OnceLock;

use commprob::branching::{build_branching, c_tuples, cp_from_matrix, cp_via_lescot, BranchingMatrix};
use commprob::catalog::{self, Descriptor};
use commprob::feitfine::feit_fine_pairs;
use commprob::groups::Group;
use commprob::oracle::{commuting_tuples_count, Budget};
use commprob::rational::ExactRational;
use commprob::Error;
use num_bigint::BigUint;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CpStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidInput = 3,
    Unsupported = 4,
    SizeCap = 5,
    Budget = 6,
    Internal = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CpMethod {
    Branching = 0,
    Lescot = 1,
    Oracle = 2,
}

/// Opaque group handle.
pub struct CpGroup {
    descriptor: Descriptor,
    group: Group,
    branching: OnceLock<Result<BranchingMatrix, Error>>,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> CpStatus {
    match e {
        Error::Unsupported(_) => CpStatus::Unsupported,
        Error::SizeCap { .. } => CpStatus::SizeCap,
        Error::Budget { .. } => CpStatus::Budget,
        Error::Internal(_) | Error::Io(_) => CpStatus::Internal,
        _ => CpStatus::InvalidInput,
    }
}

/// Runs `f`, converting errors and panics into a status.
fn guard(f: impl FnOnce() -> Result<(), CpStatus>) -> CpStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => CpStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("panic inside commprob");
            CpStatus::Panic
        }
    }
}

fn fail(e: Error) -> CpStatus {
    set_error(&e.to_string());
    status_of(&e)
}

fn null(what: &str) -> CpStatus {
    set_error(&format!("{what} is null"));
    CpStatus::NullPointer
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, CpStatus> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        set_error(&format!("{what} is not valid UTF-8"));
        CpStatus::InvalidUtf8
    })
}

unsafe fn write_string(out: *mut *mut c_char, s: String) -> Result<(), CpStatus> {
    if out.is_null() {
        return Err(null("out"));
    }
    *out = CString::new(s).expect("numbers contain no nul").into_raw();
    Ok(())
}

unsafe fn group_ref<'a>(g: *const CpGroup) -> Result<&'a CpGroup, CpStatus> {
    g.as_ref().ok_or_else(|| null("group"))
}

impl CpGroup {
    fn branching(&self) -> Result<&BranchingMatrix, Error> {
        self.branching.get_or_init(|| build_branching(&self.group)).as_ref().map_err(Clone::clone)
    }
}

/// Message for the last failure on this thread. Valid until the next call
/// on the same thread; never null.
#[no_mangle]
pub extern "C" fn cp_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Builds the group named by `descriptor`, e.g. "GL(2,3)" or "Q8".
///
/// # Safety
/// `descriptor` must be a nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cp_group_new(descriptor: *const c_char, out: *mut *mut CpGroup) -> CpStatus {
    guard(|| {
        let text = read_str(descriptor, "descriptor")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let d = catalog::parse(text).map_err(fail)?;
        let group = catalog::build(&d).map_err(fail)?;
        *out = Box::into_raw(Box::new(CpGroup { descriptor: d, group, branching: OnceLock::new() }));
        Ok(())
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `g` must come from `cp_group_new` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn cp_group_free(g: *mut CpGroup) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// Canonical descriptor text of the group.
///
/// # Safety
/// `g` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cp_group_descriptor(g: *const CpGroup, out: *mut *mut c_char) -> CpStatus {
    guard(|| {
        let g = group_ref(g)?;
        write_string(out, g.descriptor.to_string())
    })
}

/// Group order.
///
/// # Safety
/// `g` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cp_group_order(g: *const CpGroup, out: *mut u64) -> CpStatus {
    guard(|| {
        let g = group_ref(g)?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = g.group.order() as u64;
        Ok(())
    })
}

/// Number of conjugacy classes.
///
/// # Safety
/// `g` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cp_group_class_count(g: *const CpGroup, out: *mut u64) -> CpStatus {
    guard(|| {
        let g = group_ref(g)?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = g.group.class_count(&g.group.whole()) as u64;
        Ok(())
    })
}

/// Commuting probability cp_n as "num/den".
///
/// # Safety
/// `g` must be a live handle and `out` a valid pointer. The string must be
/// released with `cp_string_free`.
#[no_mangle]
pub unsafe extern "C" fn cp_group_cp(g: *const CpGroup, n: u32, method: CpMethod, out: *mut *mut c_char) -> CpStatus {
    guard(|| {
        let g = group_ref(g)?;
        if n < 1 {
            return Err(fail(Error::InvalidInput("n must be at least 1".into())));
        }
        let cp = match method {
            CpMethod::Branching => g.branching().and_then(|b| cp_from_matrix(b, n)),
            CpMethod::Lescot => cp_via_lescot(&g.group, n),
            CpMethod::Oracle => commuting_tuples_count(&g.group, n, &Budget::default())
                .map(|t| ExactRational::from_ratio(&t, &BigUint::from(g.group.order()).pow(n))),
        }
        .map_err(fail)?;
        write_string(out, cp.to_string())
    })
}

/// c_G(n), the number of simultaneous conjugacy classes of commuting n-tuples.
///
/// # Safety
/// `g` must be a live handle and `out` a valid pointer. The string must be
/// released with `cp_string_free`.
#[no_mangle]
pub unsafe extern "C" fn cp_group_ctuples(g: *const CpGroup, n: u32, out: *mut *mut c_char) -> CpStatus {
    guard(|| {
        let g = group_ref(g)?;
        let b = g.branching().map_err(fail)?;
        write_string(out, c_tuples(b, n).to_string())
    })
}

/// Number of commuting pairs of d x d matrices over GF(q).
///
/// # Safety
/// `out` must be a valid pointer. The string must be released with
/// `cp_string_free`.
#[no_mangle]
pub unsafe extern "C" fn cp_feit_fine(d: u32, q: u64, out: *mut *mut c_char) -> CpStatus {
    guard(|| {
        let p = feit_fine_pairs(d, q).map_err(fail)?;
        write_string(out, p.to_string())
    })
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn cp_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn error_statuses_map() {
        assert_eq!(status_of(&Error::SizeCap { order: 1, cap: 0 }), CpStatus::SizeCap);
        assert_eq!(status_of(&Error::Unsupported("x".into())), CpStatus::Unsupported);
        assert_eq!(status_of(&Error::Parse { pos: 0, msg: "x".into() }), CpStatus::InvalidInput);
    }

    #[test]
    fn last_error_is_never_null() {
        assert!(!cp_last_error().is_null());
        set_error("a\0b");
        let msg = unsafe { CStr::from_ptr(cp_last_error()) };
        assert_eq!(msg.to_str().unwrap(), "a b");
    }
}
