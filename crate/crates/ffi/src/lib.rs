//! C ABI over the mesh generator, the DtN spectra, and the scalar
//! companions.
//!
//! Objects cross the boundary as opaque handles that the caller frees with
//! the matching `*_free` function. Every fallible call returns an
//! [`FsStatus`]; on failure a message is kept per thread and can be read
//! with [`fs_last_error_message`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use formsteklov::mesh::{self, DomainSpec, Family, MeshError, SimplicialComplex};
use formsteklov::scalar::{self, ScalarError};
use formsteklov::steklov::{self, SpectrumResult, SteklovError};

/// Status codes returned by every fallible function.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    SolverFailure = 3,
    Io = 4,
    BufferTooSmall = 5,
    Panic = 6,
}

/// A simplicial mesh of a benchmark domain.
pub struct FsMesh(SimplicialComplex);

/// Lowest eigenvalues of one DtN problem on one mesh.
pub struct FsSpectrum(SpectrumResult);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).unwrap_or_default());
}

struct Failure(FsStatus, String);

impl From<MeshError> for Failure {
    fn from(e: MeshError) -> Self {
        let status = match e {
            MeshError::Io(_) => FsStatus::Io,
            _ => FsStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

impl From<SteklovError> for Failure {
    fn from(e: SteklovError) -> Self {
        let status = match e {
            SteklovError::DegreeOutOfRange { .. } | SteklovError::NoBoundary => {
                FsStatus::InvalidArgument
            }
            _ => FsStatus::SolverFailure,
        };
        Failure(status, e.to_string())
    }
}

impl From<ScalarError> for Failure {
    fn from(e: ScalarError) -> Self {
        let status = match e {
            ScalarError::NoBoundary | ScalarError::NoInterior => FsStatus::InvalidArgument,
            _ => FsStatus::SolverFailure,
        };
        Failure(status, e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(FsStatus::NullPointer, format!("{what} is null"))
}

/// Runs `f`, recording the message of an error or a panic.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> FsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            FsStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal error: {msg}"));
            FsStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(FsStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

unsafe fn put<T>(out: *mut T, v: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(v);
    Ok(())
}

/// Message of the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn fs_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn fs_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Generates a benchmark mesh. `family_json` names the family and its
/// parameters, e.g. `{"family":"ellipse","a":1.0,"b":0.7}`.
///
/// # Safety
/// `family_json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fs_mesh_generate(
    family_json: *const c_char,
    level: u32,
    out: *mut *mut FsMesh,
) -> FsStatus {
    guard(|| {
        let text = str_arg(family_json, "family_json")?;
        let family: Family = serde_json::from_str(text)
            .map_err(|e| Failure(FsStatus::InvalidArgument, format!("family: {e}")))?;
        let cx = mesh::generate(&DomainSpec::new(family, level as usize))?;
        put(out, Box::into_raw(Box::new(FsMesh(cx))), "out")
    })
}

/// Reads a mesh file written by [`fs_mesh_write`] or `formsteklov gen`.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fs_mesh_read(path: *const c_char, out: *mut *mut FsMesh) -> FsStatus {
    guard(|| {
        let cx = mesh::read_mesh(str_arg(path, "path")?)?;
        put(out, Box::into_raw(Box::new(FsMesh(cx))), "out")
    })
}

/// # Safety
/// `mesh` must come from this library and `path` be a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn fs_mesh_write(mesh: *const FsMesh, path: *const c_char) -> FsStatus {
    guard(|| {
        let m = mesh.as_ref().ok_or_else(|| null("mesh"))?;
        Ok(mesh::write_mesh(&m.0, str_arg(path, "path")?)?)
    })
}

/// Spatial dimension of the mesh (2 or 3).
///
/// # Safety
/// `mesh` must come from this library and `out` be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fs_mesh_dim(mesh: *const FsMesh, out: *mut u32) -> FsStatus {
    guard(|| {
        let m = mesh.as_ref().ok_or_else(|| null("mesh"))?;
        put(out, m.0.dim() as u32, "out")
    })
}

/// Number of k-simplices.
///
/// # Safety
/// `mesh` must come from this library and `out` be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fs_mesh_count(mesh: *const FsMesh, k: u32, out: *mut usize) -> FsStatus {
    guard(|| {
        let m = mesh.as_ref().ok_or_else(|| null("mesh"))?;
        let k = k as usize;
        if k > m.0.dim() {
            return Err(Failure(
                FsStatus::InvalidArgument,
                format!("no {k}-simplices in dimension {}", m.0.dim()),
            ));
        }
        put(out, m.0.count(k), "out")
    })
}

/// Betti numbers `b_0..b_dim` written into `buf`, which must hold
/// `dim + 1` entries.
///
/// # Safety
/// `mesh` must come from this library and `buf` hold `cap` entries.
#[no_mangle]
pub unsafe extern "C" fn fs_mesh_betti(
    mesh: *const FsMesh,
    buf: *mut usize,
    cap: usize,
) -> FsStatus {
    guard(|| {
        let m = mesh.as_ref().ok_or_else(|| null("mesh"))?;
        let b = mesh::betti(&m.0);
        copy_out(&b, buf, cap)
    })
}

/// # Safety
/// `mesh` must come from this library or be null; it is invalid afterwards.
#[no_mangle]
pub unsafe extern "C" fn fs_mesh_free(mesh: *mut FsMesh) {
    if !mesh.is_null() {
        drop(Box::from_raw(mesh));
    }
}

/// Lowest `count` eigenvalues of the absolute (`relative = false`) or
/// relative DtN problem in degree `degree`.
///
/// # Safety
/// `mesh` must come from this library and `out` be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fs_spectrum_compute(
    mesh: *const FsMesh,
    degree: u32,
    relative: bool,
    count: u32,
    out: *mut *mut FsSpectrum,
) -> FsStatus {
    guard(|| {
        let m = mesh.as_ref().ok_or_else(|| null("mesh"))?;
        let (p, k) = (degree as usize, count as usize);
        let r = if relative {
            steklov::dual_spectrum(&m.0, p, k)?
        } else {
            steklov::primal_spectrum(&m.0, p, k)?
        };
        put(out, Box::into_raw(Box::new(FsSpectrum(r))), "out")
    })
}

/// Number of eigenvalues held.
///
/// # Safety
/// `spectrum` must come from this library and `out` be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fs_spectrum_len(spectrum: *const FsSpectrum, out: *mut usize) -> FsStatus {
    guard(|| {
        let s = spectrum.as_ref().ok_or_else(|| null("spectrum"))?;
        put(out, s.0.eigenvalues.len(), "out")
    })
}

/// Copies the eigenvalues, ascending, into `buf`.
///
/// # Safety
/// `spectrum` must come from this library and `buf` hold `cap` entries.
#[no_mangle]
pub unsafe extern "C" fn fs_spectrum_eigenvalues(
    spectrum: *const FsSpectrum,
    buf: *mut f64,
    cap: usize,
) -> FsStatus {
    guard(|| {
        let s = spectrum.as_ref().ok_or_else(|| null("spectrum"))?;
        copy_out(&s.0.eigenvalues, buf, cap)
    })
}

/// Number of eigenvalues counted as kernel.
///
/// # Safety
/// `spectrum` must come from this library and `out` be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fs_spectrum_kernel_dim(
    spectrum: *const FsSpectrum,
    out: *mut usize,
) -> FsStatus {
    guard(|| {
        let s = spectrum.as_ref().ok_or_else(|| null("spectrum"))?;
        put(out, s.0.kernel_dim, "out")
    })
}

/// # Safety
/// `spectrum` must come from this library or be null; it is invalid
/// afterwards.
#[no_mangle]
pub unsafe extern "C" fn fs_spectrum_free(spectrum: *mut FsSpectrum) {
    if !spectrum.is_null() {
        drop(Box::from_raw(spectrum));
    }
}

/// Relative spread of the boundary flux of the mean exit time.
///
/// # Safety
/// `mesh` must come from this library and `out` be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fs_exit_time_defect(mesh: *const FsMesh, out: *mut f64) -> FsStatus {
    guard(|| {
        let m = mesh.as_ref().ok_or_else(|| null("mesh"))?;
        put(out, scalar::mean_exit_time(&m.0)?.defect, "out")
    })
}

/// First biharmonic Steklov eigenvalue.
///
/// # Safety
/// `mesh` must come from this library and `out` be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fs_biharmonic_mu1(mesh: *const FsMesh, out: *mut f64) -> FsStatus {
    guard(|| {
        let m = mesh.as_ref().ok_or_else(|| null("mesh"))?;
        put(out, scalar::biharmonic_mu1(&m.0)?, "out")
    })
}

unsafe fn copy_out<T: Copy>(src: &[T], buf: *mut T, cap: usize) -> Result<(), Failure> {
    if buf.is_null() {
        return Err(null("buf"));
    }
    if cap < src.len() {
        return Err(Failure(
            FsStatus::BufferTooSmall,
            format!("buffer holds {cap} entries, {} needed", src.len()),
        ));
    }
    ptr::copy_nonoverlapping(src.as_ptr(), buf, src.len());
    Ok(())
}
