//! C ABI over the flowcob library.
//!
//! Objects are opaque handles created by `*_from_json` or derived from other
//! handles, and released with the matching `*_free`. Every entry point
//! returns a [`FlowcobStatus`]; on failure a message is available from
//! [`flowcob_last_error`] until the next failing call on the same thread.
//! Strings returned through out-parameters are owned by the caller and must
//! be released with [`flowcob_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use flowcob::cobordism::{reduce, Strategy};
use flowcob::field_graph::{
    poincare_hopf_residual, reconstruct_field_graph, sink_skeleton, source_skeleton, validate_field_graph,
    FieldGraph, SkeletonMap,
};
use flowcob::io::{FieldGraphFile, IoError, MapFile, SkeletonFile};
use flowcob::surface_map::{canonical_form, map_isomorphic, CombinatorialMap};
use flowcob::torus_mcg::{decompose, Matrix2};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlowcobStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    /// Input is not valid JSON or does not have the expected fields.
    Parse = 3,
    /// Input parsed but does not describe a valid map, field graph or skeleton.
    InvalidMap = 4,
    /// The operation is not defined for this input.
    Domain = 5,
    /// The caller's buffer is too small; the required size was written.
    BufferTooSmall = 6,
    /// Internal error; the library state is unaffected.
    Panic = 7,
}

/// Opaque combinatorial map.
pub struct FlowcobMap(CombinatorialMap);

/// Opaque field graph.
pub struct FlowcobFieldGraph(FieldGraph);

/// Opaque skeleton map (sink or source role, with optional marks).
pub struct FlowcobSkeleton(SkeletonMap);

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct FlowcobMapCounts {
    pub vertices: usize,
    pub edges: usize,
    pub faces: usize,
    pub genus: usize,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct FlowcobZeroCounts {
    pub sources: usize,
    pub sinks: usize,
    pub saddles: usize,
    pub genus: usize,
}

/// Reduction order for [`flowcob_skeleton_reduce`]: all sink merges first.
pub const FLOWCOB_STRATEGY_PHASED: u32 = 0;
/// Reduction order for [`flowcob_skeleton_reduce`]: alternate merge kinds.
pub const FLOWCOB_STRATEGY_INTERLEAVED: u32 = 1;

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(FlowcobStatus, String);

impl Failure {
    fn new(status: FlowcobStatus, msg: impl Into<String>) -> Self {
        Failure(status, msg.into())
    }
}

impl From<IoError> for Failure {
    fn from(e: IoError) -> Self {
        let status = match e {
            IoError::Json(_) => FlowcobStatus::Parse,
            _ => FlowcobStatus::InvalidMap,
        };
        Failure(status, e.to_string())
    }
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> FlowcobStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => FlowcobStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "internal error".into());
            set_last_error(format!("panic: {msg}"));
            FlowcobStatus::Panic
        }
    }
}

unsafe fn as_ref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| Failure::new(FlowcobStatus::NullPointer, format!("{what} is null")))
}

unsafe fn out_ptr<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| Failure::new(FlowcobStatus::NullPointer, format!("{what} is null")))
}

unsafe fn read_str<'a>(p: *const c_char) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure::new(FlowcobStatus::NullPointer, "input string is null"));
    }
    CStr::from_ptr(p).to_str().map_err(|e| Failure::new(FlowcobStatus::InvalidUtf8, e.to_string()))
}

fn parse<T: serde::de::DeserializeOwned>(json: &str) -> Result<T, Failure> {
    serde_json::from_str(json).map_err(|e| Failure::new(FlowcobStatus::Parse, e.to_string()))
}

fn write_string(out: &mut *mut c_char, s: String) -> Result<(), Failure> {
    let c = CString::new(s).map_err(|e| Failure::new(FlowcobStatus::Panic, e.to_string()))?;
    *out = c.into_raw();
    Ok(())
}

fn to_json<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("serializable")
}

fn boxed<T>(v: T) -> *mut T {
    Box::into_raw(Box::new(v))
}

/// Message for the last failing call on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn flowcob_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn flowcob_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a map from JSON (`n_darts`, `alpha`, `sigma`, optional
/// `isolated_vertices`).
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn flowcob_map_from_json(json: *const c_char, out: *mut *mut FlowcobMap) -> FlowcobStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let file: MapFile = parse(read_str(json)?)?;
        *out = boxed(FlowcobMap(file.to_map()?));
        Ok(())
    })
}

/// # Safety
/// `map` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn flowcob_map_free(map: *mut FlowcobMap) {
    if !map.is_null() {
        drop(Box::from_raw(map));
    }
}

/// # Safety
/// `map` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn flowcob_map_counts(map: *const FlowcobMap, out: *mut FlowcobMapCounts) -> FlowcobStatus {
    guard(|| {
        let m = &as_ref(map, "map")?.0;
        *out_ptr(out, "out")? = FlowcobMapCounts {
            vertices: m.num_vertices(),
            edges: m.num_edges(),
            faces: m.num_faces(),
            genus: m.genus(),
        };
        Ok(())
    })
}

/// Dual map on the same surface; the result is a new handle.
///
/// # Safety
/// `map` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn flowcob_map_dual(map: *const FlowcobMap, out: *mut *mut FlowcobMap) -> FlowcobStatus {
    guard(|| {
        let m = &as_ref(map, "map")?.0;
        *out_ptr(out, "out")? = boxed(FlowcobMap(m.dual()));
        Ok(())
    })
}

/// Writes whether an orientation-preserving isomorphism exists.
///
/// # Safety
/// `a` and `b` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn flowcob_map_isomorphic(
    a: *const FlowcobMap,
    b: *const FlowcobMap,
    out: *mut bool,
) -> FlowcobStatus {
    guard(|| {
        let (a, b) = (&as_ref(a, "a")?.0, &as_ref(b, "b")?.0);
        *out_ptr(out, "out")? = map_isomorphic(a, b).is_some();
        Ok(())
    })
}

/// Copies the canonical form into `buf`. `len` is always set to the full
/// size; if `capacity` is smaller, nothing is copied and
/// `FLOWCOB_STATUS_BUFFER_TOO_SMALL` is returned. `buf` may be null when
/// `capacity` is zero.
///
/// # Safety
/// `map` must be a live handle; `buf` must have room for `capacity` bytes;
/// `len` must be writable.
#[no_mangle]
pub unsafe extern "C" fn flowcob_map_canonical_form(
    map: *const FlowcobMap,
    buf: *mut u8,
    capacity: usize,
    len: *mut usize,
) -> FlowcobStatus {
    guard(|| {
        let m = &as_ref(map, "map")?.0;
        let len = out_ptr(len, "len")?;
        let form = canonical_form(m);
        *len = form.len();
        if capacity < form.len() {
            return Err(Failure::new(
                FlowcobStatus::BufferTooSmall,
                format!("canonical form needs {} bytes, buffer has {capacity}", form.len()),
            ));
        }
        if buf.is_null() {
            return Err(Failure::new(FlowcobStatus::NullPointer, "buf is null"));
        }
        ptr::copy_nonoverlapping(form.as_ptr(), buf, form.len());
        Ok(())
    })
}

/// # Safety
/// `map` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn flowcob_map_to_json(map: *const FlowcobMap, out: *mut *mut c_char) -> FlowcobStatus {
    guard(|| {
        let m = &as_ref(map, "map")?.0;
        write_string(out_ptr(out, "out")?, to_json(&MapFile::from(m)))
    })
}

/// Parses a field graph from JSON (map fields plus `kinds` and `tail`).
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn flowcob_field_graph_from_json(
    json: *const c_char,
    out: *mut *mut FlowcobFieldGraph,
) -> FlowcobStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let file: FieldGraphFile = parse(read_str(json)?)?;
        *out = boxed(FlowcobFieldGraph(file.to_field_graph()?));
        Ok(())
    })
}

/// # Safety
/// `fg` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn flowcob_field_graph_free(fg: *mut FlowcobFieldGraph) {
    if !fg.is_null() {
        drop(Box::from_raw(fg));
    }
}

/// # Safety
/// `fg` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn flowcob_field_graph_counts(
    fg: *const FlowcobFieldGraph,
    out: *mut FlowcobZeroCounts,
) -> FlowcobStatus {
    guard(|| {
        let fg = &as_ref(fg, "fg")?.0;
        let c = fg.counts();
        *out_ptr(out, "out")? =
            FlowcobZeroCounts { sources: c.sources, sinks: c.sinks, saddles: c.saddles, genus: fg.genus() };
        Ok(())
    })
}

/// Writes `valid`, the Poincare-Hopf residual and, if `report` is non-null,
/// the full validation report as JSON.
///
/// # Safety
/// `fg` must be a live handle; `valid` and `residual` must be writable;
/// `report` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn flowcob_field_graph_validate(
    fg: *const FlowcobFieldGraph,
    valid: *mut bool,
    residual: *mut i64,
    report: *mut *mut c_char,
) -> FlowcobStatus {
    guard(|| {
        let fg = &as_ref(fg, "fg")?.0;
        let (valid, residual) = (out_ptr(valid, "valid")?, out_ptr(residual, "residual")?);
        let r = validate_field_graph(fg);
        *valid = r.valid;
        *residual = poincare_hopf_residual(fg);
        if let Some(out) = report.as_mut() {
            write_string(out, to_json(&r))?;
        }
        Ok(())
    })
}

/// # Safety
/// `fg` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn flowcob_field_graph_to_json(
    fg: *const FlowcobFieldGraph,
    out: *mut *mut c_char,
) -> FlowcobStatus {
    guard(|| {
        let fg = &as_ref(fg, "fg")?.0;
        write_string(out_ptr(out, "out")?, to_json(&FieldGraphFile::from(fg)))
    })
}

/// Sink skeleton of a field graph.
///
/// # Safety
/// `fg` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn flowcob_field_graph_sink_skeleton(
    fg: *const FlowcobFieldGraph,
    out: *mut *mut FlowcobSkeleton,
) -> FlowcobStatus {
    guard(|| {
        let fg = &as_ref(fg, "fg")?.0;
        let out = out_ptr(out, "out")?;
        let s = sink_skeleton(fg).map_err(|e| Failure::new(FlowcobStatus::Domain, e.to_string()))?;
        *out = boxed(FlowcobSkeleton(s));
        Ok(())
    })
}

/// Source skeleton of a field graph.
///
/// # Safety
/// `fg` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn flowcob_field_graph_source_skeleton(
    fg: *const FlowcobFieldGraph,
    out: *mut *mut FlowcobSkeleton,
) -> FlowcobStatus {
    guard(|| {
        let fg = &as_ref(fg, "fg")?.0;
        let out = out_ptr(out, "out")?;
        let s = source_skeleton(fg).map_err(|e| Failure::new(FlowcobStatus::Domain, e.to_string()))?;
        *out = boxed(FlowcobSkeleton(s));
        Ok(())
    })
}

/// Parses a skeleton from JSON (map fields plus optional `role`,
/// `marked_vertices`, `marked_faces`).
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn flowcob_skeleton_from_json(
    json: *const c_char,
    out: *mut *mut FlowcobSkeleton,
) -> FlowcobStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let file: SkeletonFile = parse(read_str(json)?)?;
        *out = boxed(FlowcobSkeleton(file.to_skeleton()?));
        Ok(())
    })
}

/// # Safety
/// `s` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn flowcob_skeleton_free(s: *mut FlowcobSkeleton) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// # Safety
/// `s` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn flowcob_skeleton_to_json(s: *const FlowcobSkeleton, out: *mut *mut c_char) -> FlowcobStatus {
    guard(|| {
        let s = &as_ref(s, "skeleton")?.0;
        write_string(out_ptr(out, "out")?, to_json(&SkeletonFile::from(s)))
    })
}

/// Copy of the skeleton's underlying map.
///
/// # Safety
/// `s` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn flowcob_skeleton_map(s: *const FlowcobSkeleton, out: *mut *mut FlowcobMap) -> FlowcobStatus {
    guard(|| {
        let s = &as_ref(s, "skeleton")?.0;
        *out_ptr(out, "out")? = boxed(FlowcobMap(s.map.clone()));
        Ok(())
    })
}

/// Field graph whose sink (or source) skeleton is `s`.
///
/// # Safety
/// `s` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn flowcob_skeleton_reconstruct(
    s: *const FlowcobSkeleton,
    out: *mut *mut FlowcobFieldGraph,
) -> FlowcobStatus {
    guard(|| {
        let s = &as_ref(s, "skeleton")?.0;
        let out = out_ptr(out, "out")?;
        let fg = reconstruct_field_graph(s).map_err(|e| Failure::new(FlowcobStatus::Domain, e.to_string()))?;
        *out = boxed(FlowcobFieldGraph(fg));
        Ok(())
    })
}

/// Reduction trace of an unmarked skeleton, as JSON lines (one move per line).
///
/// # Safety
/// `s` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn flowcob_skeleton_reduce(
    s: *const FlowcobSkeleton,
    strategy: u32,
    out: *mut *mut c_char,
) -> FlowcobStatus {
    guard(|| {
        let s = &as_ref(s, "skeleton")?.0;
        let out = out_ptr(out, "out")?;
        let strategy = match strategy {
            FLOWCOB_STRATEGY_PHASED => Strategy::Phased,
            FLOWCOB_STRATEGY_INTERLEAVED => Strategy::Interleaved,
            other => return Err(Failure::new(FlowcobStatus::Domain, format!("unknown strategy {other}"))),
        };
        let trace = reduce(s, strategy).map_err(|e| Failure::new(FlowcobStatus::Domain, e.to_string()))?;
        write_string(out, trace.to_jsonl())
    })
}

/// Twist word for the determinant-one matrix `[[a, b], [c, d]]`, written as
/// text, for example `"G1 G2^-1"`, or `"(empty)"` for the identity.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn flowcob_torus_decompose(
    a: i64,
    b: i64,
    c: i64,
    d: i64,
    out: *mut *mut c_char,
) -> FlowcobStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let w = decompose(&Matrix2::new(a, b, c, d)).map_err(|e| Failure::new(FlowcobStatus::Domain, e.to_string()))?;
        write_string(out, w.to_string())
    })
}
