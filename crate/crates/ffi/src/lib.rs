//! C interface to `surplus-lab`.
//!
//! Excursions and maps are opaque handles, created by the `sample`,
//! `from_*`, `insert` and `explore` functions and released with the matching
//! `_free`. Every fallible call
//! returns an [`SlStatus`]; on failure [`sl_last_error`] describes it until
//! the next call on the same thread. Strings returned through out-pointers
//! are owned by the caller and released with [`sl_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use surplus_lab::estimators::wright_sequence;
use surplus_lab::maps::{insert, psi_count, sg_check, RootedMap};
use surplus_lab::samplers::{sample_uniform_excursion, sample_uniform_map};
use surplus_lab::{
    local_time, AdmissibleCorners, Error, LatticeExcursion, Mode, PermutationPairing, RngStream,
};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SlStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    CapExceeded = 3,
    Domain = 4,
    Io = 5,
    Overflow = 6,
    BufferTooSmall = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SlMode {
    Bf = 0,
    Df = 1,
}

impl From<SlMode> for Mode {
    fn from(m: SlMode) -> Mode {
        match m {
            SlMode::Bf => Mode::Bf,
            SlMode::Df => Mode::Df,
        }
    }
}

/// A lattice excursion `f ∈ 𝔉ₙ`.
pub struct SlExcursion {
    inner: LatticeExcursion,
}

/// A rooted map.
pub struct SlMap {
    inner: RootedMap,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).unwrap_or_default());
}

fn status_of(e: &Error) -> SlStatus {
    match e {
        Error::CapExceeded { .. } => SlStatus::CapExceeded,
        Error::Domain(_) | Error::EmptySupport(_) | Error::DegenerateEnsemble(_) | Error::EmptyLaw => SlStatus::Domain,
        Error::Io { .. } => SlStatus::Io,
        _ => SlStatus::InvalidArgument,
    }
}

struct Fail(SlStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> SlStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            SlStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            SlStatus::Panic
        }
    }
}

fn null(what: &str) -> Fail {
    Fail(SlStatus::NullPointer, format!("{what} is null"))
}

unsafe fn borrow<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn out<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn string<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail(SlStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

fn to_u64(x: u128, what: &str) -> Result<u64, Fail> {
    u64::try_from(x).map_err(|_| Fail(SlStatus::Overflow, format!("{what} = {x} does not fit in 64 bits")))
}

fn c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).unwrap_or_default().into_raw()
}

/// Message for the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn sl_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version, static storage.
#[no_mangle]
pub extern "C" fn sl_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `s` must come from this library, or be null.
#[no_mangle]
pub unsafe extern "C" fn sl_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Uniform excursion with `2n` steps from replicate stream `stream` of `seed`.
///
/// # Safety
/// `out_handle` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sl_excursion_sample(n: usize, seed: u64, stream: u64, out_handle: *mut *mut SlExcursion) -> SlStatus {
    guard(|| {
        let slot = out(out_handle, "out")?;
        let f = sample_uniform_excursion(n, &mut RngStream::new(seed, stream).rng())?;
        *slot = Box::into_raw(Box::new(SlExcursion { inner: f }));
        Ok(())
    })
}

/// Parses a `U`/`D` word.
///
/// # Safety
/// `steps` must be a NUL-terminated string and `out_handle` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sl_excursion_from_steps(steps: *const c_char, out_handle: *mut *mut SlExcursion) -> SlStatus {
    guard(|| {
        let slot = out(out_handle, "out")?;
        let f = LatticeExcursion::from_steps(string(steps, "steps")?)?;
        *slot = Box::into_raw(Box::new(SlExcursion { inner: f }));
        Ok(())
    })
}

/// # Safety
/// `e` must come from this library, or be null.
#[no_mangle]
pub unsafe extern "C" fn sl_excursion_free(e: *mut SlExcursion) {
    if !e.is_null() {
        drop(Box::from_raw(e));
    }
}

/// Writes `n`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn sl_excursion_n(e: *const SlExcursion, n: *mut usize) -> SlStatus {
    guard(|| {
        *out(n, "n")? = borrow(e, "excursion")?.inner.n();
        Ok(())
    })
}

/// Copies `f(0), …, f(2n)` into `buf`. `written` receives `2n + 1` even
/// when `len` is too small.
///
/// # Safety
/// `buf` must hold `len` values; other pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn sl_excursion_values(
    e: *const SlExcursion,
    buf: *mut u32,
    len: usize,
    written: *mut usize,
) -> SlStatus {
    guard(|| {
        let v = borrow(e, "excursion")?.inner.values();
        *out(written, "written")? = v.len();
        if len < v.len() {
            return Err(Fail(SlStatus::BufferTooSmall, format!("need {} values, got {len}", v.len())));
        }
        if buf.is_null() {
            return Err(null("buf"));
        }
        ptr::copy_nonoverlapping(v.as_ptr(), buf, v.len());
        Ok(())
    })
}

/// Total corner weight `B(f)` or `D(f)`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn sl_excursion_weight(e: *const SlExcursion, mode: SlMode, total: *mut u64) -> SlStatus {
    guard(|| {
        *out(total, "total")? = local_time::weights(&borrow(e, "excursion")?.inner, mode.into()).total;
        Ok(())
    })
}

/// Number of admissible corner tuples for the pairing `sigma`, written like
/// `(1,3)(2,4)`.
///
/// # Safety
/// `sigma` must be NUL-terminated; other pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn sl_psi_count(e: *const SlExcursion, sigma: *const c_char, count: *mut u64) -> SlStatus {
    guard(|| {
        let f = &borrow(e, "excursion")?.inner;
        let sigma: PermutationPairing = string(sigma, "sigma")?.parse()?;
        *out(count, "count")? = to_u64(psi_count(f, &sigma), "psi count")?;
        Ok(())
    })
}

/// Whether the pairing lies in `𝕊_g`, the pairings that glue a single face.
///
/// # Safety
/// `sigma` must be NUL-terminated; `result` must be valid.
#[no_mangle]
pub unsafe extern "C" fn sl_sg_check(sigma: *const c_char, result: *mut bool) -> SlStatus {
    guard(|| {
        let sigma: PermutationPairing = string(sigma, "sigma")?.parse()?;
        *out(result, "result")? = sg_check(&sigma);
        Ok(())
    })
}

/// `ω_s`, for `1 <= s <= 12`.
///
/// # Safety
/// `value` must be valid.
#[no_mangle]
pub unsafe extern "C" fn sl_wright(s: usize, value: *mut u64) -> SlStatus {
    guard(|| {
        if s == 0 {
            return Err(Fail(SlStatus::Domain, "s must be at least 1".into()));
        }
        let w = wright_sequence(s)?;
        *out(value, "value")? = to_u64(w[s - 1], "omega")?;
        Ok(())
    })
}

/// Builds the map of `e` decorated by `corners`, a JSON object
/// `{"mode": "bf", "i": [...], "k": [...]}`; an empty string means no
/// extra edges.
///
/// # Safety
/// `corners` must be NUL-terminated; other pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn sl_map_insert(e: *const SlExcursion, corners: *const c_char, out_handle: *mut *mut SlMap) -> SlStatus {
    guard(|| {
        let slot = out(out_handle, "out")?;
        let f = &borrow(e, "excursion")?.inner;
        let text = string(corners, "corners")?;
        let xi: AdmissibleCorners = if text.trim().is_empty() {
            AdmissibleCorners::empty(Mode::Bf)
        } else {
            serde_json::from_str(text).map_err(|e| Fail(SlStatus::InvalidArgument, format!("corners: {e}")))?
        };
        xi.validate(f)?;
        let m = insert(&surplus_lab::lattice_paths::tree_of_contour(f), &xi)?;
        *slot = Box::into_raw(Box::new(SlMap { inner: m }));
        Ok(())
    })
}

/// One proposal draw for the uniform map with `n` tree edges and surplus
/// `s`, with its importance weight.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn sl_map_sample(
    n: usize,
    s: usize,
    seed: u64,
    stream: u64,
    out_handle: *mut *mut SlMap,
    weight: *mut f64,
) -> SlStatus {
    guard(|| {
        let slot = out(out_handle, "out")?;
        let w = out(weight, "weight")?;
        let (m, wt) = sample_uniform_map(n, s, &mut RngStream::new(seed, stream).rng())?;
        *w = wt;
        *slot = Box::into_raw(Box::new(SlMap { inner: m }));
        Ok(())
    })
}

/// # Safety
/// `json` must be NUL-terminated and `out_handle` valid.
#[no_mangle]
pub unsafe extern "C" fn sl_map_from_json(json: *const c_char, out_handle: *mut *mut SlMap) -> SlStatus {
    guard(|| {
        let slot = out(out_handle, "out")?;
        let m = RootedMap::from_json(string(json, "json")?)?;
        *slot = Box::into_raw(Box::new(SlMap { inner: m }));
        Ok(())
    })
}

/// JSON text of the map; free with [`sl_string_free`].
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn sl_map_to_json(m: *const SlMap, json: *mut *mut c_char) -> SlStatus {
    guard(|| {
        let slot = out(json, "json")?;
        *slot = c_string(borrow(m, "map")?.inner.to_json());
        Ok(())
    })
}

/// # Safety
/// `m` must come from this library, or be null.
#[no_mangle]
pub unsafe extern "C" fn sl_map_free(m: *mut SlMap) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn sl_map_genus(m: *const SlMap, genus: *mut usize) -> SlStatus {
    guard(|| {
        *out(genus, "genus")? = borrow(m, "map")?.inner.genus();
        Ok(())
    })
}

/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn sl_map_faces(m: *const SlMap, faces: *mut usize) -> SlStatus {
    guard(|| {
        *out(faces, "faces")? = borrow(m, "map")?.inner.num_faces();
        Ok(())
    })
}

/// Largest graph distance from the root vertex.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn sl_map_radius(m: *const SlMap, radius: *mut u32) -> SlStatus {
    guard(|| {
        *out(radius, "radius")? = borrow(m, "map")?.inner.metric_from_root().radius;
        Ok(())
    })
}

/// Writes `(n, s)`: tree edges and surplus.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn sl_map_size(m: *const SlMap, n: *mut usize, s: *mut usize) -> SlStatus {
    guard(|| {
        let m = &borrow(m, "map")?.inner;
        *out(n, "n")? = m.n();
        *out(s, "s")? = m.s();
        Ok(())
    })
}

/// Breadth-first or depth-first encoding: the contour as a new excursion
/// handle and the corners as JSON (free with [`sl_string_free`]).
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn sl_map_explore(
    m: *const SlMap,
    mode: SlMode,
    contour: *mut *mut SlExcursion,
    corners: *mut *mut c_char,
) -> SlStatus {
    guard(|| {
        let m = &borrow(m, "map")?.inner;
        let c_slot = out(contour, "contour")?;
        let x_slot = out(corners, "corners")?;
        let (t, xi) = surplus_lab::maps::explore(m, mode.into())?;
        let json = serde_json::to_string(&xi).map_err(|e| Fail(SlStatus::InvalidArgument, e.to_string()))?;
        *c_slot = Box::into_raw(Box::new(SlExcursion {
            inner: surplus_lab::lattice_paths::contour_of_tree(&t),
        }));
        *x_slot = c_string(json);
        Ok(())
    })
}
