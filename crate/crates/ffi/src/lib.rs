//! C ABI over `retrovir`.
//!
//! Every fallible function returns an [`RvStatus`]; results are written
//! through out-pointers. On failure, [`rv_last_error`] describes the most
//! recent error on the calling thread. Heap objects are opaque handles and
//! must be released with their matching `*_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use retrovir::equilibria::{self, Equilibrium};
use retrovir::integrator::{self, Trajectory};
use retrovir::lyapunov::{self, LyapunovCoeffs};
use retrovir::model;
use retrovir::stability;
use retrovir::sweep::{self, SweepGrid, SweepResult};
use retrovir::{CubicCoeffs, Error, ModelParams};

mod types;

pub use types::*;

/// A validated parameter set together with its inner equilibrium, if any.
pub struct RvModel {
    params: ModelParams,
    inner: Option<Equilibrium>,
}

/// Result of an integration run.
pub struct RvTrajectory(Trajectory);

/// Result of a parameter sweep over `(alpha, k)`.
pub struct RvSweep(SweepResult);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn fail(status: RvStatus, msg: impl Into<String>) -> RvStatus {
    set_last_error(msg);
    status
}

fn from_error(err: Error) -> RvStatus {
    let status = match err {
        Error::InvalidParameter { .. }
        | Error::InvalidOptions(_)
        | Error::InvalidGrid(_)
        | Error::Precondition(_) => RvStatus::InvalidArgument,
        Error::Domain(_) => RvStatus::DomainError,
        Error::NonFinite { .. } | Error::StepUnderflow { .. } | Error::MaxStepsExceeded(_) => {
            RvStatus::IntegrationFailed
        }
    };
    fail(status, err.to_string())
}

fn guard(f: impl FnOnce() -> Result<(), RvStatus>) -> RvStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_last_error("");
            RvStatus::Ok
        }
        Ok(Err(status)) => status,
        Err(_) => fail(RvStatus::Panic, "internal panic"),
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, RvStatus> {
    p.as_ref()
        .ok_or_else(|| fail(RvStatus::NullPointer, format!("{what} is null")))
}

unsafe fn write<T>(p: *mut T, value: T, what: &str) -> Result<(), RvStatus> {
    if p.is_null() {
        return Err(fail(RvStatus::NullPointer, format!("{what} is null")));
    }
    p.write(value);
    Ok(())
}

fn check_out<T>(p: *mut T, what: &str) -> Result<(), RvStatus> {
    if p.is_null() {
        Err(fail(RvStatus::NullPointer, format!("{what} is null")))
    } else {
        Ok(())
    }
}

fn inner_of(model: &RvModel) -> Result<&Equilibrium, RvStatus> {
    model.inner.as_ref().ok_or_else(|| {
        fail(
            RvStatus::NoInnerEquilibrium,
            "parameters admit no positive equilibrium",
        )
    })
}

/// Static description of a status code. Never null; do not free.
#[no_mangle]
pub extern "C" fn rv_status_message(status: RvStatus) -> *const c_char {
    let s: &'static [u8] = match status {
        RvStatus::Ok => b"ok\0",
        RvStatus::NoInnerEquilibrium => b"no inner equilibrium\0",
        RvStatus::InvalidArgument => b"invalid argument\0",
        RvStatus::NullPointer => b"null pointer\0",
        RvStatus::DomainError => b"state outside the positive orthant\0",
        RvStatus::IntegrationFailed => b"integration failed\0",
        RvStatus::IndexOutOfRange => b"index out of range\0",
        RvStatus::NotFound => b"not found\0",
        RvStatus::BufferTooSmall => b"buffer too small\0",
        RvStatus::Panic => b"internal panic\0",
    };
    s.as_ptr().cast()
}

/// Message for the last error raised on this thread, or an empty string.
///
/// The pointer stays valid until the next `rv_*` call on the same thread.
#[no_mangle]
pub extern "C" fn rv_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Validates `params` and solves for the inner equilibrium.
///
/// A model is created even when no inner equilibrium exists; the functions
/// that need one then return `NoInnerEquilibrium`.
///
/// # Safety
/// `params` must point to a readable `RvParams` and `out` to writable
/// storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn rv_model_new(params: *const RvParams, out: *mut *mut RvModel) -> RvStatus {
    guard(|| {
        check_out(out, "out")?;
        out.write(ptr::null_mut());
        let params: ModelParams = (*deref(params, "params")?).into();
        params.validate().map_err(from_error)?;
        let inner = equilibria::inner_equilibrium(&params).map_err(from_error)?;
        out.write(Box::into_raw(Box::new(RvModel { params, inner })));
        Ok(())
    })
}

/// # Safety
/// `model` must be null or a handle from [`rv_model_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rv_model_free(model: *mut RvModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Copies the model's parameters into `out`.
///
/// # Safety
/// `model` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rv_model_params(model: *const RvModel, out: *mut RvParams) -> RvStatus {
    guard(|| {
        let model = deref(model, "model")?;
        write(out, model.params.into(), "out")
    })
}

/// Right-hand side `(C', I', V')` at `state`.
///
/// # Safety
/// `model` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rv_vector_field(
    model: *const RvModel,
    state: RvState,
    out: *mut RvState,
) -> RvStatus {
    guard(|| {
        let model = deref(model, "model")?;
        let d = model::vector_field(&model.params, &state.into());
        write(
            out,
            RvState {
                c: d.dc,
                i: d.di,
                v: d.dv,
            },
            "out",
        )
    })
}

/// Jacobian at `state`, row-major in `(C, I, V)` order.
///
/// # Safety
/// `model` must be a live handle and `out` must point to 9 writable doubles.
#[no_mangle]
pub unsafe extern "C" fn rv_jacobian(
    model: *const RvModel,
    state: RvState,
    out: *mut f64,
) -> RvStatus {
    guard(|| {
        let model = deref(model, "model")?;
        check_out(out, "out")?;
        let j = model::jacobian(&model.params, &state.into());
        let flat: Vec<f64> = j.iter().flatten().copied().collect();
        ptr::copy_nonoverlapping(flat.as_ptr(), out, 9);
        Ok(())
    })
}

/// # Safety
/// `model` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rv_inner_equilibrium(
    model: *const RvModel,
    out: *mut RvEquilibrium,
) -> RvStatus {
    guard(|| {
        let model = deref(model, "model")?;
        let eq = inner_of(model)?;
        write(out, eq.into(), "out")
    })
}

/// Writes the boundary equilibria into `out[0..capacity]` and their number
/// into `len`.
///
/// When `capacity` is too small nothing is copied, `len` still receives the
/// required count and `BufferTooSmall` is returned. `out` may be null when
/// `capacity` is zero.
///
/// # Safety
/// `model` must be a live handle, `len` writable, and `out` valid for
/// `capacity` writes.
#[no_mangle]
pub unsafe extern "C" fn rv_boundary_equilibria(
    model: *const RvModel,
    out: *mut RvEquilibrium,
    capacity: usize,
    len: *mut usize,
) -> RvStatus {
    guard(|| {
        let model = deref(model, "model")?;
        let found = equilibria::boundary_equilibria(&model.params);
        write(len, found.len(), "len")?;
        if capacity < found.len() {
            return Err(fail(
                RvStatus::BufferTooSmall,
                format!("need room for {} equilibria", found.len()),
            ));
        }
        if !found.is_empty() {
            check_out(out, "out")?;
        }
        for (n, eq) in found.iter().enumerate() {
            out.add(n).write(eq.into());
        }
        Ok(())
    })
}

/// Routh–Hurwitz verdict for `λ³ + pλ² + qλ + r`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rv_routh_hurwitz(
    p: f64,
    q: f64,
    r: f64,
    out: *mut RvStabilityReport,
) -> RvStatus {
    guard(|| {
        let report = stability::routh_hurwitz_cubic(CubicCoeffs { p, q, r });
        write(out, (&report).into(), "out")
    })
}

/// Linear stability of the inner equilibrium.
///
/// # Safety
/// `model` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rv_classify_inner(
    model: *const RvModel,
    out: *mut RvStabilityReport,
) -> RvStatus {
    guard(|| {
        let model = deref(model, "model")?;
        let eq = inner_of(model)?;
        let report = stability::classify_equilibrium(&model.params, eq).map_err(from_error)?;
        write(out, (&report).into(), "out")
    })
}

/// # Safety
/// `model` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rv_condition4(
    model: *const RvModel,
    variant: RvCondition4Variant,
    out: *mut RvCondition4,
) -> RvStatus {
    guard(|| {
        let model = deref(model, "model")?;
        let eq = inner_of(model)?;
        let report = lyapunov::condition4(&model.params, eq, variant.into()).map_err(from_error)?;
        write(out, (&report).into(), "out")
    })
}

/// Searches the default weight grid for `(A, B, D)` making the form
/// positive definite. Returns `NotFound` when no grid point works.
///
/// # Safety
/// `model` must be a live handle; `coeffs` must be writable; `form` may be
/// null.
#[no_mangle]
pub unsafe extern "C" fn rv_search_coeffs(
    model: *const RvModel,
    coeffs: *mut RvLyapunovCoeffs,
    form: *mut RvOmegaForm,
) -> RvStatus {
    guard(|| {
        let model = deref(model, "model")?;
        check_out(coeffs, "coeffs")?;
        let eq = inner_of(model)?;
        let found = lyapunov::search_coeffs(&model.params, eq)
            .map_err(from_error)?
            .ok_or_else(|| {
                fail(
                    RvStatus::NotFound,
                    "no weights make the form positive definite",
                )
            })?;
        coeffs.write(found.coeffs.into());
        if !form.is_null() {
            form.write((&found.form).into());
        }
        Ok(())
    })
}

/// Quadratic form of `-Ẇ` evaluated at `state`.
///
/// # Safety
/// `model` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rv_omega_at(
    model: *const RvModel,
    coeffs: RvLyapunovCoeffs,
    state: RvState,
    out: *mut RvOmegaForm,
) -> RvStatus {
    guard(|| {
        let model = deref(model, "model")?;
        let eq = inner_of(model)?;
        let coeffs = valid_coeffs(coeffs)?;
        let form =
            lyapunov::omega_at(&model.params, &coeffs, eq, &state.into()).map_err(from_error)?;
        write(out, (&form).into(), "out")
    })
}

fn valid_coeffs(c: RvLyapunovCoeffs) -> Result<LyapunovCoeffs, RvStatus> {
    let c: LyapunovCoeffs = c.into();
    c.validate()
        .map_err(|e| fail(RvStatus::InvalidArgument, e.to_string()))?;
    Ok(c)
}

/// Lyapunov function `W` at `state`.
///
/// # Safety
/// `model` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rv_w_value(
    model: *const RvModel,
    coeffs: RvLyapunovCoeffs,
    state: RvState,
    out: *mut f64,
) -> RvStatus {
    guard(|| {
        let model = deref(model, "model")?;
        let eq = inner_of(model)?;
        let coeffs = valid_coeffs(coeffs)?;
        let w = lyapunov::w_value(&coeffs, eq, &state.into()).map_err(from_error)?;
        write(out, w, "out")
    })
}

/// Time derivative of `W` along the flow at `state`.
///
/// # Safety
/// `model` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rv_w_dot(
    model: *const RvModel,
    coeffs: RvLyapunovCoeffs,
    state: RvState,
    out: *mut f64,
) -> RvStatus {
    guard(|| {
        let model = deref(model, "model")?;
        let eq = inner_of(model)?;
        let coeffs = valid_coeffs(coeffs)?;
        let w = lyapunov::w_dot(&model.params, &coeffs, eq, &state.into()).map_err(from_error)?;
        write(out, w, "out")
    })
}

/// Default integration options: fixed-step RK4, `t_end = 10`, `dt = 0.01`.
#[no_mangle]
pub extern "C" fn rv_integration_defaults() -> RvIntegrationOptions {
    let d = integrator::IntegrationOptions::default();
    RvIntegrationOptions {
        t_end: d.t_end,
        dt: d.dt,
        rel_tol: d.rel_tol,
        abs_tol: d.abs_tol,
        mode: RvIntegrationMode::FixedRk4,
        max_steps: d.max_steps as u64,
    }
}

/// Integrates from `initial` over `[0, opts.t_end]`.
///
/// # Safety
/// `model` must be a live handle, `opts` readable and `out` writable.
/// Free the result with [`rv_trajectory_free`].
#[no_mangle]
pub unsafe extern "C" fn rv_integrate(
    model: *const RvModel,
    initial: RvState,
    opts: *const RvIntegrationOptions,
    out: *mut *mut RvTrajectory,
) -> RvStatus {
    guard(|| {
        check_out(out, "out")?;
        out.write(ptr::null_mut());
        let model = deref(model, "model")?;
        let opts = (*deref(opts, "opts")?).into();
        let traj =
            integrator::integrate(&model.params, &initial.into(), &opts).map_err(from_error)?;
        out.write(Box::into_raw(Box::new(RvTrajectory(traj))));
        Ok(())
    })
}

/// Like [`rv_integrate`] but also records `(W, Ẇ)` at every sample.
///
/// # Safety
/// Same as [`rv_integrate`].
#[no_mangle]
pub unsafe extern "C" fn rv_lyapunov_trace(
    model: *const RvModel,
    coeffs: RvLyapunovCoeffs,
    initial: RvState,
    opts: *const RvIntegrationOptions,
    out: *mut *mut RvTrajectory,
) -> RvStatus {
    guard(|| {
        check_out(out, "out")?;
        out.write(ptr::null_mut());
        let model = deref(model, "model")?;
        let eq = inner_of(model)?;
        let coeffs = valid_coeffs(coeffs)?;
        let opts = (*deref(opts, "opts")?).into();
        let traj = integrator::lyapunov_trace(&model.params, &coeffs, eq, &initial.into(), &opts)
            .map_err(from_error)?;
        out.write(Box::into_raw(Box::new(RvTrajectory(traj))));
        Ok(())
    })
}

/// Number of samples, or 0 for a null handle.
///
/// # Safety
/// `traj` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn rv_trajectory_len(traj: *const RvTrajectory) -> usize {
    traj.as_ref().map_or(0, |t| t.0.len())
}

/// Reads sample `index`. `w` and `w_dot` may be null; they are set to NaN
/// when the trajectory carries no Lyapunov samples.
///
/// # Safety
/// `traj` must be a live handle; non-null out-pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn rv_trajectory_sample(
    traj: *const RvTrajectory,
    index: usize,
    t: *mut f64,
    state: *mut RvState,
    w: *mut f64,
    w_dot: *mut f64,
) -> RvStatus {
    guard(|| {
        let traj = &deref(traj, "traj")?.0;
        if index >= traj.len() {
            return Err(fail(
                RvStatus::IndexOutOfRange,
                format!("sample {index} of {}", traj.len()),
            ));
        }
        if !t.is_null() {
            t.write(traj.times[index]);
        }
        if !state.is_null() {
            state.write(traj.states[index].into());
        }
        let sample = traj.lyapunov.as_ref().map(|l| l[index]);
        if !w.is_null() {
            w.write(sample.map_or(f64::NAN, |s| s.w));
        }
        if !w_dot.is_null() {
            w_dot.write(sample.map_or(f64::NAN, |s| s.w_dot));
        }
        Ok(())
    })
}

/// # Safety
/// `traj` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rv_trajectory_free(traj: *mut RvTrajectory) {
    if !traj.is_null() {
        drop(Box::from_raw(traj));
    }
}

/// Evaluates every `(alpha, k)` cell with the model's other parameters held
/// fixed.
///
/// # Safety
/// `model` must be a live handle, `alphas` and `ks` valid for `n_alpha` and
/// `n_k` reads, and `out` writable. Free the result with [`rv_sweep_free`].
#[no_mangle]
pub unsafe extern "C" fn rv_sweep(
    model: *const RvModel,
    alphas: *const f64,
    n_alpha: usize,
    ks: *const f64,
    n_k: usize,
    out: *mut *mut RvSweep,
) -> RvStatus {
    guard(|| {
        check_out(out, "out")?;
        out.write(ptr::null_mut());
        let model = deref(model, "model")?;
        let alphas = slice(alphas, n_alpha, "alphas")?;
        let ks = slice(ks, n_k, "ks")?;
        let grid = SweepGrid::new(model.params, alphas.to_vec(), ks.to_vec());
        let result = sweep::stability_map(&grid).map_err(from_error)?;
        out.write(Box::into_raw(Box::new(RvSweep(result))));
        Ok(())
    })
}

unsafe fn slice<'a>(p: *const f64, n: usize, what: &str) -> Result<&'a [f64], RvStatus> {
    if n == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(fail(RvStatus::NullPointer, format!("{what} is null")));
    }
    Ok(std::slice::from_raw_parts(p, n))
}

/// # Safety
/// `sweep` must be a live handle; `n_alpha` and `n_k` writable.
#[no_mangle]
pub unsafe extern "C" fn rv_sweep_shape(
    sweep: *const RvSweep,
    n_alpha: *mut usize,
    n_k: *mut usize,
) -> RvStatus {
    guard(|| {
        let s = &deref(sweep, "sweep")?.0;
        write(n_alpha, s.alpha_values.len(), "n_alpha")?;
        write(n_k, s.k_values.len(), "n_k")
    })
}

/// # Safety
/// `sweep` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rv_sweep_cell(
    sweep: *const RvSweep,
    alpha_index: usize,
    k_index: usize,
    out: *mut RvSweepCell,
) -> RvStatus {
    guard(|| {
        let s = &deref(sweep, "sweep")?.0;
        if alpha_index >= s.alpha_values.len() || k_index >= s.k_values.len() {
            return Err(fail(
                RvStatus::IndexOutOfRange,
                format!("cell ({alpha_index}, {k_index}) outside the grid"),
            ));
        }
        write(out, s.cell(alpha_index, k_index).into(), "out")
    })
}

/// Corner `(alpha0, k0)` of the largest stable rectangle anchored at the
/// smallest grid values. `NotFound` when the first cell is not stable.
///
/// # Safety
/// `sweep` must be a live handle; `alpha0` and `k0` writable.
#[no_mangle]
pub unsafe extern "C" fn rv_sweep_margins(
    sweep: *const RvSweep,
    alpha0: *mut f64,
    k0: *mut f64,
) -> RvStatus {
    guard(|| {
        let s = &deref(sweep, "sweep")?.0;
        match (s.alpha0, s.k0) {
            (Some(a), Some(k)) => {
                write(alpha0, a, "alpha0")?;
                write(k0, k, "k0")
            }
            _ => Err(fail(
                RvStatus::NotFound,
                "no stable rectangle at the grid origin",
            )),
        }
    })
}

/// # Safety
/// `sweep` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rv_sweep_free(sweep: *mut RvSweep) {
    if !sweep.is_null() {
        drop(Box::from_raw(sweep));
    }
}

/// Largest `alpha` in `(0, alpha_hi]` below which the inner equilibrium
/// stays stable at `k = k_fixed`, to relative precision `1e-6`.
///
/// # Safety
/// `model` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rv_find_alpha_margin(
    model: *const RvModel,
    k_fixed: f64,
    alpha_hi: f64,
    out: *mut f64,
) -> RvStatus {
    guard(|| {
        let model = deref(model, "model")?;
        check_out(out, "out")?;
        let margin = sweep::find_alpha_margin(&model.params, k_fixed, alpha_hi)
            .map_err(from_error)?
            .ok_or_else(|| fail(RvStatus::NotFound, "not stable at the smallest alpha"))?;
        out.write(margin);
        Ok(())
    })
}
