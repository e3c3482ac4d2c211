//! C ABI over the laboratory core: opaque field handles, status codes and
//! flat audit structs so other languages can bind. The header is generated
//! into `include/lab.h` at build time.
//!
//! Conventions: every function returns a `LabStatus`; outputs go through
//! pointers; `lab_last_error_message` describes the most recent failure on
//! the calling thread. Handles from `lab_field_*` constructors must be
//! released with `lab_field_free`.

use lab_core::audits::{carlson_majorant_audit, f1_majorant_audit, AuditResult};
use lab_core::error::Error;
use lab_core::evolution::{run, trajectory_csv, Integrator, SolverConfig};
use lab_core::field::{random_solenoidal, read_snapshot, taylor_green, write_snapshot};
use lab_core::lattice::{Dealias, Lattice};
use lab_core::norms::{fr_norm, l2_norm, sobolev_norm};
use lab_core::quadrature::{carlson_integral_constant, euler_integral_constant};
use lab_core::rates::existence_time_bound_with_nu;
use lab_core::trilinear::{cancellation_residual, trilinear_fast};
use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;

/// Status codes returned by every entry point.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum LabStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    IoError = 3,
    NumericError = 4,
    GuardExceeded = 5,
    Panic = 6,
}

/// Dealiasing rule selector: 0 keeps the full cube, 1 applies the
/// two-thirds rule.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum LabDealias {
    None = 0,
    TwoThirds = 1,
}

/// One audited inequality in flat form.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct LabAudit {
    pub lhs: f64,
    pub rhs: f64,
    pub constant: f64,
    pub slack: f64,
    /// 1 when the audit passes, 0 otherwise.
    pub pass: i32,
}

/// Opaque handle around a spectral velocity field.
pub struct LabField {
    inner: lab_core::field::SpectralField,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::new("").unwrap());
}

fn set_error(msg: &str) {
    let sanitized = msg.replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).unwrap_or_default();
    });
}

fn status_of(err: &Error) -> LabStatus {
    match err {
        Error::Io { .. } | Error::SnapshotFormat { .. } => LabStatus::IoError,
        Error::GuardExceeded { .. } => LabStatus::GuardExceeded,
        Error::BlowUp { .. } | Error::CflViolation { .. } | Error::DivergentIntegral { .. } => {
            LabStatus::NumericError
        }
        _ => LabStatus::InvalidArgument,
    }
}

fn catch(op: impl FnOnce() -> LabStatus) -> LabStatus {
    match catch_unwind(AssertUnwindSafe(op)) {
        Ok(status) => status,
        Err(_) => {
            set_error("internal panic");
            LabStatus::Panic
        }
    }
}

fn finish<T>(result: Result<T, Error>, sink: impl FnOnce(T)) -> LabStatus {
    match result {
        Ok(value) => {
            sink(value);
            LabStatus::Ok
        }
        Err(e) => {
            let code = status_of(&e);
            set_error(&e.to_string());
            code
        }
    }
}

fn lattice_of(n: u32, dealias: LabDealias) -> Result<Lattice, Error> {
    let rule = match dealias {
        LabDealias::None => Dealias::None,
        LabDealias::TwoThirds => Dealias::TwoThirds,
    };
    Lattice::new(n as usize, rule)
}

unsafe fn path_from(ptr: *const c_char) -> Result<PathBuf, Error> {
    if ptr.is_null() {
        return Err(Error::InvalidArgument("null path".into()));
    }
    let text = CStr::from_ptr(ptr)
        .to_str()
        .map_err(|_| Error::InvalidArgument("path is not valid UTF-8".into()))?;
    Ok(PathBuf::from(text))
}

/// Message describing the most recent error on this thread. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn lab_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn lab_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Taylor-Green vortex coefficients at the given amplitude.
///
/// # Safety
/// `out` must point to writable storage for one handle pointer.
#[no_mangle]
pub unsafe extern "C" fn lab_field_taylor_green(
    n: u32,
    dealias: LabDealias,
    amplitude: f64,
    out: *mut *mut LabField,
) -> LabStatus {
    if out.is_null() {
        return LabStatus::NullPointer;
    }
    catch(|| {
        finish(
            lattice_of(n, dealias).and_then(|lat| taylor_green(lat, amplitude)),
            |field| *out = Box::into_raw(Box::new(LabField { inner: field })),
        )
    })
}

/// Deterministic random divergence-free field with `|k|^-slope` decay.
///
/// # Safety
/// `out` must point to writable storage for one handle pointer.
#[no_mangle]
pub unsafe extern "C" fn lab_field_random_solenoidal(
    n: u32,
    dealias: LabDealias,
    slope: f64,
    seed: u64,
    out: *mut *mut LabField,
) -> LabStatus {
    if out.is_null() {
        return LabStatus::NullPointer;
    }
    catch(|| {
        finish(
            lattice_of(n, dealias).map(|lat| random_solenoidal(lat, slope, seed)),
            |field| *out = Box::into_raw(Box::new(LabField { inner: field })),
        )
    })
}

/// Read a `SPECFIELD v1` snapshot.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` as above.
#[no_mangle]
pub unsafe extern "C" fn lab_field_read(
    path: *const c_char,
    dealias: LabDealias,
    out: *mut *mut LabField,
) -> LabStatus {
    if out.is_null() {
        return LabStatus::NullPointer;
    }
    catch(|| {
        let rule = match dealias {
            LabDealias::None => Dealias::None,
            LabDealias::TwoThirds => Dealias::TwoThirds,
        };
        finish(
            path_from(path).and_then(|p| read_snapshot(&p, rule)),
            |field| *out = Box::into_raw(Box::new(LabField { inner: field })),
        )
    })
}

/// Write a `SPECFIELD v1` snapshot.
///
/// # Safety
/// `field` must be a live handle; `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn lab_field_write(
    field: *const LabField,
    path: *const c_char,
) -> LabStatus {
    if field.is_null() {
        return LabStatus::NullPointer;
    }
    catch(|| {
        finish(
            path_from(path).and_then(|p| write_snapshot(&(*field).inner, &p)),
            |_| {},
        )
    })
}

/// Release a field handle. Null is accepted.
///
/// # Safety
/// `field` must come from a `lab_field_*` constructor and not be used
/// afterwards.
#[no_mangle]
pub unsafe extern "C" fn lab_field_free(field: *mut LabField) {
    if !field.is_null() {
        drop(Box::from_raw(field));
    }
}

/// Lattice resolution N of a field handle.
///
/// # Safety
/// `field` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn lab_field_resolution(field: *const LabField) -> u32 {
    if field.is_null() {
        return 0;
    }
    (*field).inner.lattice().n() as u32
}

/// Homogeneous Sobolev norm of order s.
///
/// # Safety
/// `field` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn lab_sobolev_norm(
    field: *const LabField,
    s: f64,
    out: *mut f64,
) -> LabStatus {
    if field.is_null() || out.is_null() {
        return LabStatus::NullPointer;
    }
    catch(|| {
        *out = sobolev_norm(&(*field).inner, s);
        LabStatus::Ok
    })
}

/// Absolute-sum norm with weight `|k|^r`.
///
/// # Safety
/// `field` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn lab_fr_norm(
    field: *const LabField,
    r: f64,
    out: *mut f64,
) -> LabStatus {
    if field.is_null() || out.is_null() {
        return LabStatus::NullPointer;
    }
    catch(|| {
        *out = fr_norm(&(*field).inner, r);
        LabStatus::Ok
    })
}

/// L2 norm of a field.
///
/// # Safety
/// `field` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn lab_l2_norm(field: *const LabField, out: *mut f64) -> LabStatus {
    if field.is_null() || out.is_null() {
        return LabStatus::NullPointer;
    }
    catch(|| {
        *out = l2_norm(&(*field).inner);
        LabStatus::Ok
    })
}

/// The convection trilinear form via the fast pseudo-spectral route.
///
/// # Safety
/// `field` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn lab_trilinear_form(
    field: *const LabField,
    s: f64,
    out: *mut f64,
) -> LabStatus {
    if field.is_null() || out.is_null() {
        return LabStatus::NullPointer;
    }
    catch(|| {
        *out = trilinear_fast(&(*field).inner, s);
        LabStatus::Ok
    })
}

/// Normalized residual of the cancellation identity.
///
/// # Safety
/// `field` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn lab_cancellation_residual(
    field: *const LabField,
    s: f64,
    out: *mut f64,
) -> LabStatus {
    if field.is_null() || out.is_null() {
        return LabStatus::NullPointer;
    }
    catch(|| finish(cancellation_residual(&(*field).inner, s), |v| *out = v))
}

/// Carlson integral constant `int_0^inf y^{3/2-s}/(1+y^2) dy`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lab_carlson_integral_constant(s: f64, out: *mut f64) -> LabStatus {
    if out.is_null() {
        return LabStatus::NullPointer;
    }
    catch(|| finish(carlson_integral_constant(s), |v| *out = v))
}

/// F^1 integral constant `int_0^inf y^2/(1+y^{2s-2}) dy`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lab_euler_integral_constant(s: f64, out: *mut f64) -> LabStatus {
    if out.is_null() {
        return LabStatus::NullPointer;
    }
    catch(|| finish(euler_integral_constant(s), |v| *out = v))
}

/// Existence-time lower bound `K_s ||u0||_s^{-4/(2s-1)}` at viscosity nu.
///
/// # Safety
/// `field` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn lab_existence_time_bound(
    field: *const LabField,
    s: f64,
    nu: f64,
    out: *mut f64,
) -> LabStatus {
    if field.is_null() || out.is_null() {
        return LabStatus::NullPointer;
    }
    catch(|| {
        finish(existence_time_bound_with_nu(&(*field).inner, s, nu), |v| {
            *out = v
        })
    })
}

fn audit_out(a: &AuditResult) -> LabAudit {
    LabAudit {
        lhs: a.lhs,
        rhs: a.rhs,
        constant: a.constant,
        slack: a.slack(),
        pass: a.pass() as i32,
    }
}

/// Carlson majorant audit of `sum |u_hat| |k|^{(s-1/2)/2}`.
///
/// # Safety
/// `field` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn lab_carlson_majorant_audit(
    field: *const LabField,
    s: f64,
    out: *mut LabAudit,
) -> LabStatus {
    if field.is_null() || out.is_null() {
        return LabStatus::NullPointer;
    }
    catch(|| {
        finish(carlson_majorant_audit(&(*field).inner, s), |a| {
            *out = audit_out(&a)
        })
    })
}

/// F^1 majorant audit for s > 5/2.
///
/// # Safety
/// `field` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn lab_f1_majorant_audit(
    field: *const LabField,
    s: f64,
    out: *mut LabAudit,
) -> LabStatus {
    if field.is_null() || out.is_null() {
        return LabStatus::NullPointer;
    }
    catch(|| {
        finish(f1_majorant_audit(&(*field).inner, s), |a| {
            *out = audit_out(&a)
        })
    })
}

/// Integrate the truncated dynamics from the handle's field and write the
/// trajectory CSV to `csv_path`. The handle itself is not modified.
///
/// # Safety
/// `field` must be a live handle; `csv_path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn lab_evolve_to_csv(
    field: *const LabField,
    nu: f64,
    dt: f64,
    t_end: f64,
    sample_every: u32,
    s: f64,
    csv_path: *const c_char,
) -> LabStatus {
    if field.is_null() {
        return LabStatus::NullPointer;
    }
    catch(|| {
        let inner = &(*field).inner;
        let cfg = SolverConfig {
            n: inner.lattice().n(),
            nu,
            dt,
            t_end,
            s_values: vec![s],
            dealias: inner.lattice().dealias(),
            integrator: Integrator::IfRk4,
            sample_every: sample_every.max(1) as usize,
        };
        let result = path_from(csv_path).and_then(|path| {
            let traj = run(&cfg, inner)?;
            std::fs::write(&path, trajectory_csv(&traj)).map_err(|e| Error::io(&path, e))
        });
        finish(result, |_| {})
    })
}
