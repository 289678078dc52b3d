//! C ABI for the `precedence` library.
//!
//! Objects cross the boundary as opaque handles created by `*_from_json`
//! or by an operation, and released with the matching `*_free`. Every
//! fallible call returns a [`PrecedenceStatus`]; on failure the message is
//! available from [`precedence_last_error`] on the same thread. Strings
//! returned through `char **` out-parameters are owned by the caller and
//! must be released with [`precedence_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use precedence::loadsharing::{distribution_of, AnyModel};
use precedence::montecarlo::estimate_alphas;
use precedence::signature::{probability_signature, StructureFunction};
use precedence::{
    alpha_family, certify_concordance, invert_to_ls, synthesize_voting_situation, Error, PermutationDistribution,
    RankingPattern, SubsetMask,
};

/// Result of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PrecedenceStatus {
    Ok = 0,
    /// A required pointer was null or a string was not UTF-8.
    NullOrInvalidArgument = 1,
    /// Malformed JSON or a malformed value inside it.
    Parse = 2,
    /// A value outside the domain of the operation.
    Domain = 3,
    /// A load-sharing model that cannot generate a failure order.
    InvalidModel = 4,
    /// A pattern with ties, or a schedule that yields non-positive rates.
    Unrealizable = 5,
    /// A caught panic; indicates a bug.
    Internal = 6,
}

/// A probability distribution on the permutations of `[m]`.
pub struct PrecedenceDistribution(PermutationDistribution);

/// A load-sharing model (order-dependent or set-invariant).
pub struct PrecedenceModel(AnyModel);

/// A ranking pattern.
pub struct PrecedencePattern(RankingPattern);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: String) {
    let text = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = text);
}

fn status_of(e: &Error) -> PrecedenceStatus {
    match e {
        Error::Parse(_) | Error::Io(_) => PrecedenceStatus::Parse,
        Error::InvalidModel(_) | Error::Simulation(_) => PrecedenceStatus::InvalidModel,
        Error::WeakPattern { .. } | Error::Schedule(_) => PrecedenceStatus::Unrealizable,
        _ => PrecedenceStatus::Domain,
    }
}

fn guard<F: FnOnce() -> Result<(), (PrecedenceStatus, String)>>(body: F) -> PrecedenceStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            set_error(String::new());
            PrecedenceStatus::Ok
        }
        Ok(Err((status, message))) => {
            set_error(message);
            status
        }
        Err(_) => {
            set_error("internal error".into());
            PrecedenceStatus::Internal
        }
    }
}

type Failure = (PrecedenceStatus, String);

fn lib<T>(r: precedence::Result<T>) -> Result<T, Failure> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn null(what: &str) -> Failure {
    (PrecedenceStatus::NullOrInvalidArgument, format!("{what} is null"))
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (PrecedenceStatus::NullOrInvalidArgument, format!("{what} is not UTF-8")))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

fn parse<T: serde::de::DeserializeOwned>(json: &str) -> Result<T, Failure> {
    serde_json::from_str(json).map_err(|e| (PrecedenceStatus::Parse, e.to_string()))
}

unsafe fn put_string(out: *mut *mut c_char, value: String) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    let c = CString::new(value).map_err(|_| (PrecedenceStatus::Internal, "interior NUL".to_string()))?;
    *out = c.into_raw();
    Ok(())
}

unsafe fn put_json<T: serde::Serialize>(out: *mut *mut c_char, value: &T) -> Result<(), Failure> {
    let text = serde_json::to_string(value).map_err(|e| (PrecedenceStatus::Internal, e.to_string()))?;
    put_string(out, text)
}

unsafe fn put_handle<T>(out: *mut *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

/// Message of the last failed call on this thread, or an empty string.
/// The pointer stays valid until the next call on this thread.
#[no_mangle]
pub extern "C" fn precedence_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn precedence_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses `{"m":3,"weights":[{"perm":[1,2,3],"p":"1/6"},...]}`.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn precedence_distribution_from_json(
    json: *const c_char,
    out: *mut *mut PrecedenceDistribution,
) -> PrecedenceStatus {
    guard(|| {
        let rho = parse(text(json, "json")?)?;
        put_handle(out, PrecedenceDistribution(rho))
    })
}

/// # Safety
/// `dist` must be null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn precedence_distribution_free(dist: *mut PrecedenceDistribution) {
    if !dist.is_null() {
        drop(Box::from_raw(dist));
    }
}

/// Serializes a distribution to JSON.
///
/// # Safety
/// `dist` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn precedence_distribution_to_json(
    dist: *const PrecedenceDistribution,
    out: *mut *mut c_char,
) -> PrecedenceStatus {
    guard(|| put_json(out, &handle(dist, "distribution")?.0))
}

/// `alpha_j(A)` as an exact rational string such as `"5/9"`. `set` lists
/// the `len` members of `A`.
///
/// # Safety
/// `dist` must be a live handle, `set` must point to `len` bytes and `out`
/// must be writable.
#[no_mangle]
pub unsafe extern "C" fn precedence_alpha(
    dist: *const PrecedenceDistribution,
    set: *const u8,
    len: usize,
    j: u8,
    out: *mut *mut c_char,
) -> PrecedenceStatus {
    guard(|| {
        let rho = &handle(dist, "distribution")?.0;
        if set.is_null() {
            return Err(null("set"));
        }
        let members = std::slice::from_raw_parts(set, len);
        let mask = lib(SubsetMask::from_elements(rho.m(), members))?;
        if mask.len() < 2 {
            return Err((PrecedenceStatus::Domain, format!("subset {mask} has fewer than two elements")));
        }
        let fam = alpha_family(rho);
        let value = lib(fam.alpha(mask, j))?;
        put_string(out, value.to_string())
    })
}

/// The whole family of winning probabilities as JSON.
///
/// # Safety
/// `dist` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn precedence_alpha_family_json(
    dist: *const PrecedenceDistribution,
    out: *mut *mut c_char,
) -> PrecedenceStatus {
    guard(|| put_json(out, &alpha_family(&handle(dist, "distribution")?.0)))
}

/// The order-dependent load-sharing model generating `dist`.
///
/// # Safety
/// `dist` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn precedence_invert_to_ls(
    dist: *const PrecedenceDistribution,
    out: *mut *mut PrecedenceModel,
) -> PrecedenceStatus {
    guard(|| {
        let model = lib(invert_to_ls(&handle(dist, "distribution")?.0))?;
        put_handle(out, PrecedenceModel(AnyModel::OrderDependent(model)))
    })
}

/// Parses either model layout (entries keyed by `prefix` or `survivors`).
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn precedence_model_from_json(
    json: *const c_char,
    out: *mut *mut PrecedenceModel,
) -> PrecedenceStatus {
    guard(|| {
        let model = lib(AnyModel::from_json_str(text(json, "json")?))?;
        put_handle(out, PrecedenceModel(model))
    })
}

/// # Safety
/// `model` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn precedence_model_to_json(
    model: *const PrecedenceModel,
    out: *mut *mut c_char,
) -> PrecedenceStatus {
    guard(|| put_json(out, &handle(model, "model")?.0))
}

/// # Safety
/// `model` must be null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn precedence_model_free(model: *mut PrecedenceModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// The failure-order distribution generated by a model.
///
/// # Safety
/// `model` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn precedence_model_distribution(
    model: *const PrecedenceModel,
    out: *mut *mut PrecedenceDistribution,
) -> PrecedenceStatus {
    guard(|| {
        let rho = lib(distribution_of(&handle(model, "model")?.0))?;
        put_handle(out, PrecedenceDistribution(rho))
    })
}

/// Parses `{"m":3,"functions":[{"set":[1,2],"ranks":{"1":1,"2":2}},...]}`.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn precedence_pattern_from_json(
    json: *const c_char,
    out: *mut *mut PrecedencePattern,
) -> PrecedenceStatus {
    guard(|| {
        let sigma = parse(text(json, "json")?)?;
        put_handle(out, PrecedencePattern(sigma))
    })
}

/// # Safety
/// `pattern` must be null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn precedence_pattern_free(pattern: *mut PrecedencePattern) {
    if !pattern.is_null() {
        drop(Box::from_raw(pattern));
    }
}

/// Certifies p-concordance of LS(eps, sigma) with `pattern` under the
/// universal schedule. Writes the certificate JSON to `out` and 1 or 0 to
/// `passed`.
///
/// # Safety
/// `pattern` must be a live handle; `out` and `passed` must be writable.
#[no_mangle]
pub unsafe extern "C" fn precedence_certify(
    pattern: *const PrecedencePattern,
    out: *mut *mut c_char,
    passed: *mut i32,
) -> PrecedenceStatus {
    guard(|| {
        if passed.is_null() {
            return Err(null("passed"));
        }
        let cert = lib(certify_concordance(&handle(pattern, "pattern")?.0))?;
        put_json(out, &cert)?;
        *passed = i32::from(cert.passed());
        Ok(())
    })
}

/// An integer voting situation realizing `pattern`, as JSON.
///
/// # Safety
/// `pattern` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn precedence_synthesize_votes(
    pattern: *const PrecedencePattern,
    out: *mut *mut c_char,
) -> PrecedenceStatus {
    guard(|| put_json(out, &lib(synthesize_voting_situation(&handle(pattern, "pattern")?.0))?))
}

/// Probability signature of the system given by `system_json`
/// (`{"r":3,"path_sets":[[1,2],[1,3]]}`) under `dist`, as JSON.
///
/// # Safety
/// `system_json` must be a NUL-terminated string, `dist` a live handle and
/// `out` writable.
#[no_mangle]
pub unsafe extern "C" fn precedence_signature(
    system_json: *const c_char,
    dist: *const PrecedenceDistribution,
    out: *mut *mut c_char,
) -> PrecedenceStatus {
    guard(|| {
        let phi: StructureFunction = parse(text(system_json, "system_json")?)?;
        let sig = lib(probability_signature(&phi, &handle(dist, "distribution")?.0))?;
        put_json(out, &sig)
    })
}

/// Simulates `samples` trajectories of `model` and writes the summary
/// JSON. `workers == 0` uses one thread per core.
///
/// # Safety
/// `model` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn precedence_simulate(
    model: *const PrecedenceModel,
    samples: u64,
    seed: u64,
    workers: usize,
    out: *mut *mut c_char,
) -> PrecedenceStatus {
    guard(|| {
        let summary = lib(estimate_alphas(&handle(model, "model")?.0, samples, seed, workers))?;
        put_json(out, &summary)
    })
}
