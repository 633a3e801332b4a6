//! C interface to `rsimp`.
//!
//! Meshes, simplification states and results are opaque handles created by
//! the library and released with the matching `*_free` function. Every
//! fallible call returns an [`RsimpStatus`]; on failure a description is
//! available from [`rsimp_last_error_message`] on the same thread.
//!
//! See `include/rsimp.h` for the generated declarations.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;
use std::time::Duration;

use rsimp::io;
use rsimp::metro;
use rsimp::rsimp::{refine, simplify, SimplificationState, SimplifiedMesh, SimplifyOptions};
use rsimp::{vclust, Error, Mesh, Vec3};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RsimpStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    EmptyInput = 3,
    IndexOutOfRange = 4,
    Parse = 5,
    Io = 6,
    Checkpoint = 7,
    DigestMismatch = 8,
    VersionMismatch = 9,
    Numeric = 10,
    Structure = 11,
    BufferTooSmall = 12,
    Panic = 13,
}

/// Opaque triangle mesh.
pub struct RsimpMesh(Mesh);

/// Opaque simplification state that can be refined or checkpointed.
pub struct RsimpState(SimplificationState);

/// Opaque simplified mesh plus run statistics.
pub struct RsimpResult {
    mesh: SimplifiedMesh,
    splits: usize,
    stopped_by_budget: bool,
}

/// Sampled surface error between two meshes.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct RsimpErrorReport {
    pub mean_forward: f64,
    pub mean_backward: f64,
    pub mean_symmetric: f64,
    /// Bounding-box diagonal of the original mesh.
    pub diagonal: f64,
    pub percent: f64,
    pub samples: usize,
    pub seed: u64,
    /// Nonzero when the simplified mesh had no usable faces.
    pub degenerate: u8,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(message: impl Into<Vec<u8>>) {
    let mut bytes = message.into();
    bytes.retain(|&b| b != 0);
    let text = CString::new(bytes).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = text);
}

fn status_of(e: &Error) -> RsimpStatus {
    match e {
        Error::EmptyInput => RsimpStatus::EmptyInput,
        Error::IndexOutOfRange { .. } => RsimpStatus::IndexOutOfRange,
        Error::Structure(_) => RsimpStatus::Structure,
        Error::Numeric(_) => RsimpStatus::Numeric,
        Error::Parse { .. } => RsimpStatus::Parse,
        Error::Checkpoint(_) => RsimpStatus::Checkpoint,
        Error::DigestMismatch => RsimpStatus::DigestMismatch,
        Error::VersionMismatch { .. } => RsimpStatus::VersionMismatch,
        Error::InvalidArgument(_) => RsimpStatus::InvalidArgument,
        Error::Io { .. } | Error::Stream(_) => RsimpStatus::Io,
    }
}

struct Failure(RsimpStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn fail(status: RsimpStatus, message: impl Into<String>) -> Failure {
    Failure(status, message.into())
}

/// Runs `body`, converting errors and panics into a status code.
fn guard(body: impl FnOnce() -> Result<(), Failure>) -> RsimpStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            set_last_error("");
            RsimpStatus::Ok
        }
        Ok(Err(Failure(status, message))) => {
            set_last_error(message);
            status
        }
        Err(_) => {
            set_last_error("internal panic");
            RsimpStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, name: &str) -> Result<&'a T, Failure> {
    p.as_ref()
        .ok_or_else(|| fail(RsimpStatus::NullPointer, format!("{name} is null")))
}

unsafe fn out_ptr<'a, T>(p: *mut T, name: &str) -> Result<&'a mut T, Failure> {
    p.as_mut()
        .ok_or_else(|| fail(RsimpStatus::NullPointer, format!("{name} is null")))
}

unsafe fn path_arg(p: *const c_char) -> Result<PathBuf, Failure> {
    if p.is_null() {
        return Err(fail(RsimpStatus::NullPointer, "path is null"));
    }
    let s = CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(RsimpStatus::InvalidArgument, "path is not valid UTF-8"))?;
    Ok(PathBuf::from(s))
}

fn budget(ms: i64) -> Option<Duration> {
    u64::try_from(ms).ok().map(Duration::from_millis)
}

fn boxed<T>(v: T) -> *mut T {
    Box::into_raw(Box::new(v))
}

/// Message for the last failed call on this thread, or an empty string.
/// The pointer stays valid until the next call into the library on the
/// same thread.
#[no_mangle]
pub extern "C" fn rsimp_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn rsimp_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Builds a mesh from `vertex_count` xyz triples and `face_count` index
/// triples.
///
/// # Safety
/// `positions` must point to `3 * vertex_count` doubles and `indices` to
/// `3 * face_count` integers.
#[no_mangle]
pub unsafe extern "C" fn rsimp_mesh_from_arrays(
    positions: *const f64,
    vertex_count: usize,
    indices: *const u32,
    face_count: usize,
    out: *mut *mut RsimpMesh,
) -> RsimpStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        *out = ptr::null_mut();
        if (positions.is_null() && vertex_count > 0) || (indices.is_null() && face_count > 0) {
            return Err(fail(RsimpStatus::NullPointer, "array is null"));
        }
        let coords = if vertex_count == 0 {
            &[][..]
        } else {
            std::slice::from_raw_parts(positions, 3 * vertex_count)
        };
        let idx = if face_count == 0 {
            &[][..]
        } else {
            std::slice::from_raw_parts(indices, 3 * face_count)
        };
        let vertices = coords.chunks_exact(3).map(|c| Vec3::new(c[0], c[1], c[2])).collect();
        let faces = idx.chunks_exact(3).map(|f| [f[0], f[1], f[2]]).collect();
        *out = boxed(RsimpMesh(Mesh::new(vertices, faces)?));
        Ok(())
    })
}

/// Reads an OBJ or PLY file, chosen by extension.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rsimp_mesh_read(path: *const c_char, out: *mut *mut RsimpMesh) -> RsimpStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        *out = ptr::null_mut();
        let path = path_arg(path)?;
        *out = boxed(RsimpMesh(io::read_mesh(path, None)?));
        Ok(())
    })
}

/// # Safety
/// `mesh` must be null or a handle from this library.
#[no_mangle]
pub unsafe extern "C" fn rsimp_mesh_vertex_count(mesh: *const RsimpMesh) -> usize {
    mesh.as_ref().map_or(0, |m| m.0.vertex_count())
}

/// # Safety
/// `mesh` must be null or a handle from this library.
#[no_mangle]
pub unsafe extern "C" fn rsimp_mesh_face_count(mesh: *const RsimpMesh) -> usize {
    mesh.as_ref().map_or(0, |m| m.0.face_count())
}

/// # Safety
/// `mesh` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rsimp_mesh_free(mesh: *mut RsimpMesh) {
    if !mesh.is_null() {
        drop(Box::from_raw(mesh));
    }
}

unsafe fn store_result(out: *mut *mut RsimpResult, outcome: &rsimp::rsimp::Outcome) {
    *out = boxed(RsimpResult {
        mesh: outcome.mesh.clone(),
        splits: outcome.report.splits,
        stopped_by_budget: outcome.report.stop == rsimp::rsimp::StopReason::TimeBudget,
    });
}

/// Simplifies `mesh` to at least `target_vertices` vertices.
///
/// A negative `time_budget_ms` means no budget. `state_out` may be null if
/// the state is not needed for later refinement.
///
/// # Safety
/// Handles must come from this library; out-pointers must be valid or null
/// where allowed.
#[no_mangle]
pub unsafe extern "C" fn rsimp_simplify(
    mesh: *const RsimpMesh,
    target_vertices: usize,
    time_budget_ms: i64,
    topology_check: bool,
    state_out: *mut *mut RsimpState,
    result_out: *mut *mut RsimpResult,
) -> RsimpStatus {
    guard(|| {
        let mesh = &deref(mesh, "mesh")?.0;
        let result_slot = out_ptr(result_out, "result_out")?;
        *result_slot = ptr::null_mut();
        if let Some(s) = state_out.as_mut() {
            *s = ptr::null_mut();
        }
        let outcome = simplify(mesh, target_vertices, budget(time_budget_ms), SimplifyOptions { topology_check })?;
        store_result(result_out, &outcome);
        if let Some(s) = state_out.as_mut() {
            *s = boxed(RsimpState(outcome.state));
        }
        Ok(())
    })
}

/// Continues `state` (updated in place) to `target_vertices` vertices.
///
/// # Safety
/// Handles must come from this library and `state` must have been made for
/// `mesh`.
#[no_mangle]
pub unsafe extern "C" fn rsimp_refine(
    state: *mut RsimpState,
    mesh: *const RsimpMesh,
    target_vertices: usize,
    time_budget_ms: i64,
    result_out: *mut *mut RsimpResult,
) -> RsimpStatus {
    guard(|| {
        let mesh = &deref(mesh, "mesh")?.0;
        let state = out_ptr(state, "state")?;
        let result_slot = out_ptr(result_out, "result_out")?;
        *result_slot = ptr::null_mut();
        let outcome = refine(state.0.clone(), mesh, target_vertices, budget(time_budget_ms))?;
        store_result(result_out, &outcome);
        state.0 = outcome.state;
        Ok(())
    })
}

/// Number of clusters (output vertices) in a state.
///
/// # Safety
/// `state` must be null or a handle from this library.
#[no_mangle]
pub unsafe extern "C" fn rsimp_state_cluster_count(state: *const RsimpState) -> usize {
    state.as_ref().map_or(0, |s| s.0.live_count())
}

/// # Safety
/// `state` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rsimp_state_free(state: *mut RsimpState) {
    if !state.is_null() {
        drop(Box::from_raw(state));
    }
}

/// Writes a checkpoint file atomically.
///
/// # Safety
/// `state` must be a handle from this library and `path` NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn rsimp_checkpoint_save(state: *const RsimpState, path: *const c_char) -> RsimpStatus {
    guard(|| {
        let state = &deref(state, "state")?.0;
        io::save_checkpoint(state, path_arg(path)?)?;
        Ok(())
    })
}

/// Loads a checkpoint made for `mesh`.
///
/// # Safety
/// `mesh` must be a handle from this library, `path` NUL-terminated and
/// `out` valid.
#[no_mangle]
pub unsafe extern "C" fn rsimp_checkpoint_load(
    path: *const c_char,
    mesh: *const RsimpMesh,
    out: *mut *mut RsimpState,
) -> RsimpStatus {
    guard(|| {
        let slot = out_ptr(out, "out")?;
        *slot = ptr::null_mut();
        let mesh = &deref(mesh, "mesh")?.0;
        *slot = boxed(RsimpState(io::load_checkpoint(path_arg(path)?, mesh)?));
        Ok(())
    })
}

/// Uniform-grid vertex clustering with `resolution` cells along the longest
/// axis.
///
/// # Safety
/// `mesh` must be a handle from this library and `result_out` valid.
#[no_mangle]
pub unsafe extern "C" fn rsimp_vertex_cluster(
    mesh: *const RsimpMesh,
    resolution: u32,
    result_out: *mut *mut RsimpResult,
) -> RsimpStatus {
    guard(|| {
        let slot = out_ptr(result_out, "result_out")?;
        *slot = ptr::null_mut();
        let mesh = &deref(mesh, "mesh")?.0;
        if resolution == 0 {
            return Err(fail(RsimpStatus::InvalidArgument, "resolution must be at least 1"));
        }
        *slot = boxed(RsimpResult {
            mesh: vclust::cluster_simplify(mesh, resolution),
            splits: 0,
            stopped_by_budget: false,
        });
        Ok(())
    })
}

/// # Safety
/// `result` must be null or a handle from this library.
#[no_mangle]
pub unsafe extern "C" fn rsimp_result_vertex_count(result: *const RsimpResult) -> usize {
    result.as_ref().map_or(0, |r| r.mesh.vertex_count())
}

/// # Safety
/// `result` must be null or a handle from this library.
#[no_mangle]
pub unsafe extern "C" fn rsimp_result_face_count(result: *const RsimpResult) -> usize {
    result.as_ref().map_or(0, |r| r.mesh.face_count())
}

/// Number of splits performed by the run that produced `result`.
///
/// # Safety
/// `result` must be null or a handle from this library.
#[no_mangle]
pub unsafe extern "C" fn rsimp_result_split_count(result: *const RsimpResult) -> usize {
    result.as_ref().map_or(0, |r| r.splits)
}

/// Whether the run stopped because its time budget ran out.
///
/// # Safety
/// `result` must be null or a handle from this library.
#[no_mangle]
pub unsafe extern "C" fn rsimp_result_stopped_by_budget(result: *const RsimpResult) -> bool {
    result.as_ref().is_some_and(|r| r.stopped_by_budget)
}

unsafe fn copy_out<T: Copy>(src: &[T], dst: *mut T, capacity: usize) -> Result<(), Failure> {
    if capacity < src.len() {
        return Err(fail(
            RsimpStatus::BufferTooSmall,
            format!("buffer holds {capacity} values, {} needed", src.len()),
        ));
    }
    if src.is_empty() {
        return Ok(());
    }
    if dst.is_null() {
        return Err(fail(RsimpStatus::NullPointer, "buffer is null"));
    }
    ptr::copy_nonoverlapping(src.as_ptr(), dst, src.len());
    Ok(())
}

/// Copies `3 * vertex_count` doubles (xyz per vertex) into `out`.
///
/// # Safety
/// `out` must have room for `capacity` doubles.
#[no_mangle]
pub unsafe extern "C" fn rsimp_result_copy_vertices(
    result: *const RsimpResult,
    out: *mut f64,
    capacity: usize,
) -> RsimpStatus {
    guard(|| {
        let r = deref(result, "result")?;
        let flat: Vec<f64> = r.mesh.vertices.iter().flat_map(|v| v.to_array()).collect();
        copy_out(&flat, out, capacity)
    })
}

/// Copies `3 * face_count` vertex indices into `out`.
///
/// # Safety
/// `out` must have room for `capacity` integers.
#[no_mangle]
pub unsafe extern "C" fn rsimp_result_copy_faces(
    result: *const RsimpResult,
    out: *mut u32,
    capacity: usize,
) -> RsimpStatus {
    guard(|| {
        let r = deref(result, "result")?;
        let flat: Vec<u32> = r.mesh.faces.iter().flatten().copied().collect();
        copy_out(&flat, out, capacity)
    })
}

/// Copies the output vertex of every input vertex (one integer per input
/// vertex) into `out`.
///
/// # Safety
/// `out` must have room for `capacity` integers.
#[no_mangle]
pub unsafe extern "C" fn rsimp_result_copy_vertex_map(
    result: *const RsimpResult,
    out: *mut u32,
    capacity: usize,
) -> RsimpStatus {
    guard(|| {
        let r = deref(result, "result")?;
        copy_out(&r.mesh.vertex_map, out, capacity)
    })
}

/// Writes the simplified mesh atomically; format from the extension.
///
/// # Safety
/// `result` must be a handle from this library and `path` NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn rsimp_result_write(result: *const RsimpResult, path: *const c_char) -> RsimpStatus {
    guard(|| {
        let r = deref(result, "result")?;
        io::write_mesh(path_arg(path)?, &r.mesh, None)?;
        Ok(())
    })
}

/// # Safety
/// `result` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rsimp_result_free(result: *mut RsimpResult) {
    if !result.is_null() {
        drop(Box::from_raw(result));
    }
}

/// Sampled mean error of `simplified` against `original`. `samples` of 0
/// selects the default (100 per original face, capped).
///
/// # Safety
/// Handles must come from this library and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn rsimp_measure(
    original: *const RsimpMesh,
    simplified: *const RsimpResult,
    samples: usize,
    seed: u64,
    out: *mut RsimpErrorReport,
) -> RsimpStatus {
    guard(|| {
        let slot = out_ptr(out, "out")?;
        let original = &deref(original, "original")?.0;
        let simplified = &deref(simplified, "simplified")?.mesh;
        let samples = if samples == 0 {
            metro::default_samples(original.face_count())
        } else {
            samples
        };
        let r = metro::mean_error(original, simplified, samples, seed)?;
        *slot = RsimpErrorReport {
            mean_forward: r.mean_forward,
            mean_backward: r.mean_backward,
            mean_symmetric: r.mean_symmetric,
            diagonal: r.normalizer,
            percent: r.percent,
            samples: r.sample_count,
            seed: r.seed,
            degenerate: u8::from(r.degenerate),
        };
        Ok(())
    })
}
