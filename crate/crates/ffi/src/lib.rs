//! C ABI for `lofi-sched`.
//!
//! Channels and scheduler reports are opaque heap handles owned by the
//! caller and released with the matching `*_free` function. Every fallible
//! call returns a [`LofiStatus`]; on failure a human-readable message is
//! available from [`lofi_last_error_message`] on the same thread.
//!
//! UE indices crossing the boundary are 0-based.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use lofi_sched::channel::{load_channel, synth_channel, ChannelMatrix, SynthChannelConfig};
use lofi_sched::scheduling::{partition_count, run_scheduler, Algorithm, Deployment, ObjectiveKind, SchedulerConfig, SchedulerReport};
use lofi_sched::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LofiStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    OddUeCount = 3,
    InvalidChannel = 4,
    Parse = 5,
    Io = 6,
    EnumerationCap = 7,
    Numerical = 8,
    BufferTooSmall = 9,
    Panic = 10,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LofiAlgorithm {
    Lofi = 0,
    LofiPp = 1,
    Random = 2,
    NoScheduling = 3,
    GreedyMse = 4,
    Exhaustive = 5,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LofiObjective {
    MinSinr = 0,
    SumMse = 1,
}

impl From<LofiAlgorithm> for Algorithm {
    fn from(a: LofiAlgorithm) -> Self {
        match a {
            LofiAlgorithm::Lofi => Algorithm::Lofi,
            LofiAlgorithm::LofiPp => Algorithm::LofiPp,
            LofiAlgorithm::Random => Algorithm::Random,
            LofiAlgorithm::NoScheduling => Algorithm::None,
            LofiAlgorithm::GreedyMse => Algorithm::GreedyMse,
            LofiAlgorithm::Exhaustive => Algorithm::Exhaustive,
        }
    }
}

impl From<LofiObjective> for ObjectiveKind {
    fn from(o: LofiObjective) -> Self {
        match o {
            LofiObjective::MinSinr => ObjectiveKind::MinSinr,
            LofiObjective::SumMse => ObjectiveKind::SumMse,
        }
    }
}

/// Opaque channel matrix handle.
pub struct LofiChannel(ChannelMatrix);

/// Opaque scheduler result handle.
pub struct LofiReport(SchedulerReport);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> LofiStatus {
    match e {
        Error::OddUeCount(_) => LofiStatus::OddUeCount,
        Error::InvalidChannel(_) => LofiStatus::InvalidChannel,
        Error::Parse { .. } => LofiStatus::Parse,
        Error::Io { .. } => LofiStatus::Io,
        Error::EnumerationCap { .. } => LofiStatus::EnumerationCap,
        Error::DegenerateEqualizer { .. } | Error::NotPositiveDefinite => LofiStatus::Numerical,
        _ => LofiStatus::InvalidArgument,
    }
}

fn fail(status: LofiStatus, msg: impl Into<String>) -> LofiStatus {
    set_last_error(msg.into());
    status
}

/// Run `f`, turning library errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), LofiStatus>) -> LofiStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => LofiStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => fail(LofiStatus::Panic, "internal panic"),
    }
}

fn lib_err(e: Error) -> LofiStatus {
    fail(status_of(&e), e.to_string())
}

fn null(what: &str) -> LofiStatus {
    fail(LofiStatus::NullPointer, format!("{what} is null"))
}

unsafe fn store<T>(out: *mut *mut T, value: T) {
    *out = Box::into_raw(Box::new(value));
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn lofi_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message for the last failed call on this thread, or null if none.
///
/// The pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn lofi_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Number of distinct slot-1 subsets of size `ue_count / 2`.
///
/// # Safety
/// `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn lofi_partition_count(ue_count: usize, out: *mut u64) -> LofiStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let n = partition_count(ue_count).map_err(lib_err)?;
        *out = u64::try_from(n).map_err(|_| fail(LofiStatus::InvalidArgument, format!("count {n} overflows u64")))?;
        Ok(())
    })
}

/// Build a channel from column-major real and imaginary parts, each of
/// length `antennas * ue_count`.
///
/// # Safety
/// `re` and `im` must point to that many readable doubles; `out` must be
/// valid for writes.
#[no_mangle]
pub unsafe extern "C" fn lofi_channel_from_parts(
    antennas: usize,
    ue_count: usize,
    re: *const f64,
    im: *const f64,
    out: *mut *mut LofiChannel,
) -> LofiStatus {
    guard(|| {
        if re.is_null() || im.is_null() || out.is_null() {
            return Err(null("argument"));
        }
        let n = antennas
            .checked_mul(ue_count)
            .ok_or_else(|| fail(LofiStatus::InvalidArgument, "dimensions overflow"))?;
        let re = std::slice::from_raw_parts(re, n);
        let im = std::slice::from_raw_parts(im, n);
        let h = ChannelMatrix::from_parts(antennas, ue_count, re, im).map_err(lib_err)?;
        store(out, LofiChannel(h));
        Ok(())
    })
}

/// Load a channel from a text channel file.
///
/// # Safety
/// `path` must be a NUL-terminated UTF-8 string; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn lofi_channel_load(path: *const c_char, out: *mut *mut LofiChannel) -> LofiStatus {
    guard(|| {
        if path.is_null() || out.is_null() {
            return Err(null("argument"));
        }
        let path = CStr::from_ptr(path)
            .to_str()
            .map_err(|_| fail(LofiStatus::InvalidArgument, "path is not UTF-8"))?;
        let h = load_channel(Path::new(path)).map_err(lib_err)?;
        store(out, LofiChannel(h));
        Ok(())
    })
}

/// Draw a synthetic multipath channel. Pass `INFINITY` as `k_factor_db`
/// for a pure line-of-sight channel.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn lofi_channel_synth(
    antennas: usize,
    ue_count: usize,
    paths: usize,
    k_factor_db: f64,
    angle_spread: f64,
    seed: u64,
    out: *mut *mut LofiChannel,
) -> LofiStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let cfg = SynthChannelConfig {
            antennas,
            ues: ue_count,
            paths,
            k_factor_db,
            angle_spread,
            seed,
        };
        let h = synth_channel(&cfg).map_err(lib_err)?;
        store(out, LofiChannel(h));
        Ok(())
    })
}

/// # Safety
/// `channel` must be a live handle; `antennas` and `ue_count` may be null.
#[no_mangle]
pub unsafe extern "C" fn lofi_channel_dims(
    channel: *const LofiChannel,
    antennas: *mut usize,
    ue_count: *mut usize,
) -> LofiStatus {
    guard(|| {
        let h = &channel.as_ref().ok_or_else(|| null("channel"))?.0;
        if !antennas.is_null() {
            *antennas = h.antennas();
        }
        if !ue_count.is_null() {
            *ue_count = h.ue_count();
        }
        Ok(())
    })
}

/// # Safety
/// `channel` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lofi_channel_free(channel: *mut LofiChannel) {
    if !channel.is_null() {
        drop(Box::from_raw(channel));
    }
}

/// Schedule the UEs of `channel` into two slots.
///
/// `restarts` only matters for the LoFi variants. `n0_over_es` is the noise
/// to symbol energy ratio used in the objective. `enumeration_cap` bounds
/// exhaustive search; pass 0 for the library default.
///
/// # Safety
/// `channel` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn lofi_schedule(
    channel: *const LofiChannel,
    algorithm: LofiAlgorithm,
    restarts: usize,
    objective: LofiObjective,
    seed: u64,
    n0_over_es: f64,
    enumeration_cap: u64,
    out: *mut *mut LofiReport,
) -> LofiStatus {
    guard(|| {
        let h = &channel.as_ref().ok_or_else(|| null("channel"))?.0;
        if out.is_null() {
            return Err(null("out"));
        }
        let mut cfg = SchedulerConfig::new(algorithm.into(), restarts)
            .with_seed(seed)
            .with_objective(objective.into());
        if enumeration_cap > 0 {
            cfg.enumeration_cap = enumeration_cap;
        }
        let report = run_scheduler(h, &cfg, n0_over_es).map_err(lib_err)?;
        store(out, LofiReport(report));
        Ok(())
    })
}

/// Whether the report deploys a two-slot split. Schedulers that keep every
/// UE in both slots return false.
///
/// # Safety
/// `report` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn lofi_report_is_split(report: *const LofiReport) -> bool {
    report.as_ref().is_some_and(|r| matches!(r.0.deployed, Deployment::Split(_)))
}

/// Number of UEs in each slot of the deployed schedule.
///
/// # Safety
/// `report` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn lofi_report_slot_len(report: *const LofiReport) -> usize {
    report.as_ref().map_or(0, |r| match &r.0.deployed {
        Deployment::Split(s) => s.slot1().len(),
        Deployment::AllUes => r.0.per_ue_sinr.len(),
    })
}

/// Copy the 0-based UE indices of both slots into caller buffers of
/// `capacity` entries each.
///
/// # Safety
/// `report` must be a live handle; `slot1` and `slot2` must be valid for
/// `capacity` writes.
#[no_mangle]
pub unsafe extern "C" fn lofi_report_slots(
    report: *const LofiReport,
    slot1: *mut usize,
    slot2: *mut usize,
    capacity: usize,
) -> LofiStatus {
    guard(|| {
        let r = &report.as_ref().ok_or_else(|| null("report"))?.0;
        if slot1.is_null() || slot2.is_null() {
            return Err(null("slot buffer"));
        }
        let all: Vec<usize>;
        let (a, b) = match &r.deployed {
            Deployment::Split(s) => (s.slot1(), s.slot2()),
            Deployment::AllUes => {
                all = (0..r.per_ue_sinr.len()).collect();
                (&all[..], &all[..])
            }
        };
        if capacity < a.len() {
            return Err(fail(
                LofiStatus::BufferTooSmall,
                format!("need {} entries per slot, got {capacity}", a.len()),
            ));
        }
        ptr::copy_nonoverlapping(a.as_ptr(), slot1, a.len());
        ptr::copy_nonoverlapping(b.as_ptr(), slot2, b.len());
        Ok(())
    })
}

/// Objective value of the deployed schedule (larger is better), or NaN for
/// a null handle.
///
/// # Safety
/// `report` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn lofi_report_objective(report: *const LofiReport) -> f64 {
    report.as_ref().map_or(f64::NAN, |r| r.0.objective_value)
}

/// # Safety
/// `report` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn lofi_report_evaluations(report: *const LofiReport) -> u64 {
    report.as_ref().map_or(0, |r| r.0.objective_evaluations)
}

/// Copy the post-equalization SINR of every UE (linear, indexed by UE)
/// into `out`, which holds `capacity` doubles.
///
/// # Safety
/// `report` must be a live handle; `out` must be valid for `capacity` writes.
#[no_mangle]
pub unsafe extern "C" fn lofi_report_sinr(report: *const LofiReport, out: *mut f64, capacity: usize) -> LofiStatus {
    guard(|| {
        let r = &report.as_ref().ok_or_else(|| null("report"))?.0;
        if out.is_null() {
            return Err(null("out"));
        }
        let sinr = &r.per_ue_sinr;
        if capacity < sinr.len() {
            return Err(fail(
                LofiStatus::BufferTooSmall,
                format!("need {} entries, got {capacity}", sinr.len()),
            ));
        }
        ptr::copy_nonoverlapping(sinr.as_ptr(), out, sinr.len());
        Ok(())
    })
}

/// # Safety
/// `report` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lofi_report_free(report: *mut LofiReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}
