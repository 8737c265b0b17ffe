//! C ABI over the `mbcl` library.
//!
//! Every fallible function returns an [`MbclStatus`] and writes its result
//! through an out-pointer. On failure a message for the calling thread is
//! kept until the next call and can be read with
//! [`mbcl_last_error_message`]. Handles are opaque; each has a matching
//! `*_free` function that accepts NULL.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use mbcl::correlation::CorrelationRecord;
use mbcl::evolution::Scheme;
use mbcl::geometry::{build_geometry, BarrierLayout, PotentialSpec};
use mbcl::pipeline::{compute_record, Physics};
use mbcl::spectrum::{compose_transfer, find_levels, wigner_pdf, LevelScan, LevelSet};
use mbcl::{Error, Exact};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MbclStatus {
    Ok = 0,
    InvalidArgument = 1,
    NullPointer = 2,
    ComputationFailed = 3,
    BufferTooSmall = 4,
    Panic = 5,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MbclScheme {
    CrankNicolson = 0,
    PaperExplicit = 1,
}

/// `num / den` with `den != 0`.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MbclRational {
    pub num: i64,
    pub den: i64,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MbclPhysics {
    pub length: MbclRational,
    pub height: MbclRational,
    pub t_final: MbclRational,
    pub dx: MbclRational,
    pub dt: MbclRational,
    pub x_min: MbclRational,
    pub x_max: MbclRational,
    pub x0: MbclRational,
    pub p0: MbclRational,
    pub w0: MbclRational,
    pub mass: MbclRational,
    pub scheme: MbclScheme,
}

/// Barrier geometry.
pub struct MbclLayout(BarrierLayout);

/// Correlation record of one `(N, c)` run.
pub struct MbclRecord {
    record: CorrelationRecord,
    fingerprint: CString,
}

/// Sorted energy levels.
pub struct MbclLevelSet(LevelSet);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let text = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).ok());
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn status_of(err: &Error) -> MbclStatus {
    if err.is_invalid_input() { MbclStatus::InvalidArgument } else { MbclStatus::ComputationFailed }
}

/// Runs `f`, translating errors and panics into status codes.
fn guard<F>(f: F) -> MbclStatus
where
    F: FnOnce() -> Result<(), (MbclStatus, String)>,
{
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => MbclStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            MbclStatus::Panic
        }
    }
}

fn lib(err: Error) -> (MbclStatus, String) {
    (status_of(&err), err.to_string())
}

fn null(name: &str) -> (MbclStatus, String) {
    (MbclStatus::NullPointer, format!("{name} is NULL"))
}

fn exact(r: MbclRational, name: &str) -> Result<Exact, (MbclStatus, String)> {
    if r.den == 0 {
        return Err((MbclStatus::InvalidArgument, format!("{name} has zero denominator")));
    }
    Ok(Exact::new(r.num, r.den))
}

fn rational(x: Exact) -> MbclRational {
    let r = x.ratio();
    MbclRational { num: *r.numer(), den: *r.denom() }
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn mbcl_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Length in bytes of the last error message on this thread, excluding the
/// terminator; 0 if the last call succeeded.
#[no_mangle]
pub extern "C" fn mbcl_last_error_length() -> usize {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(0, |s| s.as_bytes().len()))
}

/// Copies the last error message, NUL-terminated and truncated to `cap`
/// bytes. Returns the number of bytes written excluding the terminator.
///
/// # Safety
/// `buf` must be NULL or point to `cap` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn mbcl_last_error_message(buf: *mut c_char, cap: usize) -> usize {
    if buf.is_null() || cap == 0 {
        return 0;
    }
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        let bytes = e.as_ref().map_or(&[][..], |s| s.as_bytes());
        let n = bytes.len().min(cap - 1);
        // SAFETY: caller guarantees `cap` writable bytes at `buf`.
        unsafe {
            ptr::copy_nonoverlapping(bytes.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        n
    })
}

/// Fills `out` with the default physical and numerical parameters.
///
/// # Safety
/// `out` must be NULL or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn mbcl_physics_default(out: *mut MbclPhysics) -> MbclStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let p = Physics::default();
        let physics = MbclPhysics {
            length: rational(p.length),
            height: rational(p.height),
            t_final: rational(p.t_final),
            dx: rational(p.dx),
            dt: rational(p.dt),
            x_min: rational(p.x_min),
            x_max: rational(p.x_max),
            x0: rational(p.x0),
            p0: rational(p.p0),
            w0: rational(p.w0),
            mass: rational(p.mass),
            scheme: MbclScheme::CrankNicolson,
        };
        // SAFETY: checked non-null; caller guarantees validity.
        unsafe { out.write(physics) };
        Ok(())
    })
}

fn physics_from(p: &MbclPhysics) -> Result<Physics, (MbclStatus, String)> {
    Ok(Physics {
        length: exact(p.length, "length")?,
        height: exact(p.height, "height")?,
        t_final: exact(p.t_final, "t_final")?,
        dx: exact(p.dx, "dx")?,
        dt: exact(p.dt, "dt")?,
        x_min: exact(p.x_min, "x_min")?,
        x_max: exact(p.x_max, "x_max")?,
        x0: exact(p.x0, "x0")?,
        p0: exact(p.p0, "p0")?,
        w0: exact(p.w0, "w0")?,
        mass: exact(p.mass, "mass")?,
        scheme: match p.scheme {
            MbclScheme::CrankNicolson => Scheme::CrankNicolson,
            MbclScheme::PaperExplicit => Scheme::PaperExplicit,
        },
    })
}

/// Builds the layout of `n` barriers with gap ratio `c` over `length`.
///
/// # Safety
/// `out` must be NULL or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn mbcl_layout_new(n: usize, c: MbclRational, length: f64, out: *mut *mut MbclLayout) -> MbclStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let spec = PotentialSpec { n_barriers: n, c: exact(c, "c")?.value(), total_length: length, height: 0.0 };
        let layout = build_geometry(&spec).map_err(lib)?;
        // SAFETY: checked non-null.
        unsafe { out.write(Box::into_raw(Box::new(MbclLayout(layout)))) };
        Ok(())
    })
}

/// # Safety
/// `layout` must be NULL or a handle from [`mbcl_layout_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn mbcl_layout_free(layout: *mut MbclLayout) {
    if !layout.is_null() {
        // SAFETY: handle was created by Box::into_raw.
        drop(unsafe { Box::from_raw(layout) });
    }
}

/// Writes `(a, b, barrier_width, gap_width)`: total barrier width, total
/// gap width, and the widths of one barrier and one gap.
///
/// # Safety
/// `layout` must be a live handle; `out` must point to 4 writable doubles.
#[no_mangle]
pub unsafe extern "C" fn mbcl_layout_widths(layout: *const MbclLayout, out: *mut f64) -> MbclStatus {
    guard(|| {
        // SAFETY: caller contract.
        let l = unsafe { layout.as_ref() }.ok_or_else(|| null("layout"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let v = [l.0.a, l.0.b, l.0.barrier_width, l.0.gap_width];
        // SAFETY: caller guarantees 4 doubles.
        unsafe { ptr::copy_nonoverlapping(v.as_ptr(), out, 4) };
        Ok(())
    })
}

/// Number of barriers, or 0 for a NULL handle.
///
/// # Safety
/// `layout` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mbcl_layout_barrier_count(layout: *const MbclLayout) -> usize {
    // SAFETY: caller contract.
    unsafe { layout.as_ref() }.map_or(0, |l| l.0.n_barriers())
}

/// Start and end of barrier `index`.
///
/// # Safety
/// `layout` must be a live handle; `start` and `end` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn mbcl_layout_interval(
    layout: *const MbclLayout,
    index: usize,
    start: *mut f64,
    end: *mut f64,
) -> MbclStatus {
    guard(|| {
        // SAFETY: caller contract.
        let l = unsafe { layout.as_ref() }.ok_or_else(|| null("layout"))?;
        if start.is_null() || end.is_null() {
            return Err(null("start/end"));
        }
        let iv = l
            .0
            .intervals
            .get(index)
            .ok_or_else(|| (MbclStatus::InvalidArgument, format!("barrier index {index} out of range")))?;
        // SAFETY: checked non-null.
        unsafe {
            start.write(iv.start);
            end.write(iv.end);
        }
        Ok(())
    })
}

/// Potential at `x` for barriers of `height`; 0 for a NULL handle.
///
/// # Safety
/// `layout` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mbcl_layout_potential_at(layout: *const MbclLayout, x: f64, height: f64) -> f64 {
    // SAFETY: caller contract.
    unsafe { layout.as_ref() }.map_or(0.0, |l| l.0.potential_at(x, height))
}

/// Transmission and reflection probabilities of the array at `energy`.
///
/// # Safety
/// `layout` must be a live handle; `transmission` and `reflection` valid
/// for writes.
#[no_mangle]
pub unsafe extern "C" fn mbcl_scatter(
    layout: *const MbclLayout,
    energy: f64,
    height: f64,
    transmission: *mut f64,
    reflection: *mut f64,
) -> MbclStatus {
    guard(|| {
        // SAFETY: caller contract.
        let l = unsafe { layout.as_ref() }.ok_or_else(|| null("layout"))?;
        if transmission.is_null() || reflection.is_null() {
            return Err(null("transmission/reflection"));
        }
        let q = compose_transfer(&l.0, energy, height).map_err(lib)?;
        // SAFETY: checked non-null.
        unsafe {
            transmission.write(q.transmission());
            reflection.write(q.reflection());
        }
        Ok(())
    })
}

/// Runs the evolution for `(n, c)` and reduces it to a record. `physics`
/// may be NULL for the defaults.
///
/// # Safety
/// `physics` must be NULL or valid for reads; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn mbcl_record_compute(
    n: usize,
    c: MbclRational,
    physics: *const MbclPhysics,
    out: *mut *mut MbclRecord,
) -> MbclStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        // SAFETY: caller contract.
        let physics = match unsafe { physics.as_ref() } {
            Some(p) => physics_from(p)?,
            None => Physics::default(),
        };
        let record = compute_record(&physics, n, exact(c, "c")?).map_err(lib)?;
        let fingerprint = CString::new(record.fingerprint.0.clone()).expect("hex has no NUL");
        // SAFETY: checked non-null.
        unsafe { out.write(Box::into_raw(Box::new(MbclRecord { record, fingerprint }))) };
        Ok(())
    })
}

/// # Safety
/// `record` must be NULL or a handle from [`mbcl_record_compute`] not yet
/// freed.
#[no_mangle]
pub unsafe extern "C" fn mbcl_record_free(record: *mut MbclRecord) {
    if !record.is_null() {
        // SAFETY: handle was created by Box::into_raw.
        drop(unsafe { Box::from_raw(record) });
    }
}

/// The correlation `C` (last diagonal entry), NaN for a NULL handle.
///
/// # Safety
/// `record` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mbcl_record_correlation(record: *const MbclRecord) -> f64 {
    // SAFETY: caller contract.
    unsafe { record.as_ref() }.map_or(f64::NAN, |r| r.record.correlation())
}

/// Tridiagonal entries `alpha[3]`, `beta[2]` and the Krylov order reached
/// (3 unless the recurrence broke down).
///
/// # Safety
/// `record` must be a live handle; `alpha` must point to 3 doubles, `beta`
/// to 2, `order` to one `size_t`.
#[no_mangle]
pub unsafe extern "C" fn mbcl_record_matrix(
    record: *const MbclRecord,
    alpha: *mut f64,
    beta: *mut f64,
    order: *mut usize,
) -> MbclStatus {
    guard(|| {
        // SAFETY: caller contract.
        let r = unsafe { record.as_ref() }.ok_or_else(|| null("record"))?;
        if alpha.is_null() || beta.is_null() || order.is_null() {
            return Err(null("alpha/beta/order"));
        }
        let m = &r.record.matrix;
        // SAFETY: caller guarantees sizes.
        unsafe {
            ptr::copy_nonoverlapping(m.alpha.as_ptr(), alpha, 3);
            ptr::copy_nonoverlapping(m.beta.as_ptr(), beta, 2);
            order.write(m.order);
        }
        Ok(())
    })
}

/// Hex fingerprint of the inputs, owned by the record.
///
/// # Safety
/// `record` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mbcl_record_fingerprint(record: *const MbclRecord) -> *const c_char {
    // SAFETY: caller contract.
    unsafe { record.as_ref() }.map_or(ptr::null(), |r| r.fingerprint.as_ptr())
}

/// Levels of the array (barrier `height`, 0 for the free ring) in a ring
/// of `radius`, for energies in `(e_min, e_max]`.
///
/// # Safety
/// `layout` must be a live handle; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn mbcl_levels_find(
    layout: *const MbclLayout,
    height: f64,
    e_min: f64,
    e_max: f64,
    radius: f64,
    resolution: usize,
    out: *mut *mut MbclLevelSet,
) -> MbclStatus {
    guard(|| {
        // SAFETY: caller contract.
        let l = unsafe { layout.as_ref() }.ok_or_else(|| null("layout"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        if !(height >= 0.0) {
            return Err(lib(Error::NonPositiveHeight(height)));
        }
        let set = find_levels(&l.0, height, &LevelScan { e_min, e_max, resolution, radius }).map_err(lib)?;
        // SAFETY: checked non-null.
        unsafe { out.write(Box::into_raw(Box::new(MbclLevelSet(set)))) };
        Ok(())
    })
}

/// # Safety
/// `set` must be NULL or a handle from [`mbcl_levels_find`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn mbcl_levels_free(set: *mut MbclLevelSet) {
    if !set.is_null() {
        // SAFETY: handle was created by Box::into_raw.
        drop(unsafe { Box::from_raw(set) });
    }
}

/// Number of levels, 0 for a NULL handle.
///
/// # Safety
/// `set` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mbcl_levels_count(set: *const MbclLevelSet) -> usize {
    // SAFETY: caller contract.
    unsafe { set.as_ref() }.map_or(0, |s| s.0.len())
}

/// Copies the energies into `buf`. Fails with `BUFFER_TOO_SMALL` (writing
/// nothing) when `cap` is less than the level count.
///
/// # Safety
/// `set` must be a live handle; `buf` must point to `cap` doubles.
#[no_mangle]
pub unsafe extern "C" fn mbcl_levels_energies(set: *const MbclLevelSet, buf: *mut f64, cap: usize) -> MbclStatus {
    guard(|| {
        // SAFETY: caller contract.
        let s = unsafe { set.as_ref() }.ok_or_else(|| null("set"))?;
        let energies = s.0.energies();
        if cap < energies.len() {
            return Err((MbclStatus::BufferTooSmall, format!("need {} doubles, got {cap}", energies.len())));
        }
        if buf.is_null() && !energies.is_empty() {
            return Err(null("buf"));
        }
        // SAFETY: capacity checked; caller guarantees `cap` doubles.
        unsafe { ptr::copy_nonoverlapping(energies.as_ptr(), buf, energies.len()) };
        Ok(())
    })
}

/// Wigner surmise `(pi s / 2) exp(-pi s^2 / 4)`.
#[no_mangle]
pub extern "C" fn mbcl_wigner_pdf(s: f64) -> f64 {
    wigner_pdf(s)
}
