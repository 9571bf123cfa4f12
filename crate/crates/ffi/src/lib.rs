//! C ABI over the `citerank` library.
//!
//! Corpora are exposed as opaque [`CrCorpus`] handles created by
//! [`cr_corpus_from_counts`] or [`cr_corpus_from_csv`] and released with
//! [`cr_corpus_free`]. Every fallible function returns a [`CrStatus`]; on
//! failure [`cr_last_error_message`] describes the error for the calling
//! thread. Output parameters are written only on success.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::fs::File;
use std::io::BufReader;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use citerank::classify::{classify, ClassifyOptions, InstitutionType, SpreadDenominator};
use citerank::corpus::{
    load_corpus, rank_global, CorpusSchema, PaperRecord, RankPolicy, RankedCorpus,
};
use citerank::doublerank::{power_law_reference, Anchor, PowerLawReference};
use citerank::error::{Error, ErrorClass};
use citerank::percentile::{indicator_set, top_percentile_count, Ratio};

/// Status returned by every fallible function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CrStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Parse = 3,
    InsufficientData = 4,
    Invariant = 5,
    Io = 6,
    UnknownGroup = 7,
    Panic = 8,
}

/// Tie handling for global ranks.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CrRankPolicy {
    Mean = 0,
    Min = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CrSpreadDenominator {
    Min = 0,
    Max = 1,
    Mean = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CrInstitutionType {
    A = 0,
    B = 1,
    C = 2,
}

/// Opaque ranked corpus.
pub struct CrCorpus {
    inner: RankedCorpus,
}

/// Group size, fractional top-percentile counts and their ratios.
/// A ratio flag of 0 means the ratio is not calculable and its value is NaN.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrIndicators {
    pub papers: usize,
    pub p_top50: f64,
    pub p_top10: f64,
    pub p_top5: f64,
    pub p_top1: f64,
    pub r1: f64,
    pub r2: f64,
    pub r3: f64,
    pub r1_calculable: u8,
    pub r2_calculable: u8,
    pub r3_calculable: u8,
}

/// Reference power law `l = coeff · g^alpha` through two anchors.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrPowerLaw {
    pub alpha: f64,
    pub coeff: f64,
    pub global_size: usize,
    pub hi_fraction: f64,
    pub hi_count: f64,
    pub lo_fraction: f64,
    pub lo_count: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: impl Into<String>) {
    let text = message.into().replace('\0', " ");
    let c = CString::new(text).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn status_of(err: &Error) -> CrStatus {
    if matches!(err, Error::UnknownGroup(_)) {
        return CrStatus::UnknownGroup;
    }
    match err.class() {
        ErrorClass::Usage => CrStatus::InvalidArgument,
        ErrorClass::Parse => CrStatus::Parse,
        ErrorClass::InsufficientData => CrStatus::InsufficientData,
        ErrorClass::Invariant => CrStatus::Invariant,
        ErrorClass::Io => CrStatus::Io,
    }
}

struct Failure(CrStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(CrStatus::NullPointer, format!("`{what}` is NULL"))
}

/// Runs `body`, recording any error or panic for [`cr_last_error_message`].
fn guard(body: impl FnOnce() -> Result<(), Failure>) -> CrStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => CrStatus::Ok,
        Ok(Err(Failure(status, message))) => {
            set_error(message);
            status
        }
        Err(_) => {
            set_error("internal panic");
            CrStatus::Panic
        }
    }
}

/// # Safety
/// `ptr` must be NULL or a valid NUL-terminated string.
unsafe fn str_arg<'a>(ptr: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if ptr.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(ptr)
        .to_str()
        .map_err(|_| Failure(CrStatus::InvalidArgument, format!("`{what}` is not UTF-8")))
}

fn to_policy(p: CrRankPolicy) -> RankPolicy {
    match p {
        CrRankPolicy::Mean => RankPolicy::Mean,
        CrRankPolicy::Min => RankPolicy::Min,
    }
}

fn into_handle(corpus: RankedCorpus, out: *mut *mut CrCorpus) {
    let boxed = Box::new(CrCorpus { inner: corpus });
    // SAFETY: callers check `out` for NULL before building the corpus.
    unsafe { *out = Box::into_raw(boxed) };
}

/// Builds a corpus from `n` citation counts. `groups` may be NULL (no groups)
/// or point to `n` entries, each NULL or a group label.
///
/// # Safety
/// `citations` must point to `n` values; `groups`, when not NULL, to `n`
/// pointers that are NULL or NUL-terminated strings; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cr_corpus_from_counts(
    citations: *const u64,
    groups: *const *const c_char,
    n: usize,
    policy: CrRankPolicy,
    out: *mut *mut CrCorpus,
) -> CrStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        if citations.is_null() {
            return Err(null("citations"));
        }
        let counts = std::slice::from_raw_parts(citations, n);
        let labels = (!groups.is_null()).then(|| std::slice::from_raw_parts(groups, n));
        let mut records = Vec::with_capacity(n);
        for (i, &c) in counts.iter().enumerate() {
            let mut rec = PaperRecord::new(format!("p{i}"), c);
            if let Some(labels) = labels {
                if !labels[i].is_null() {
                    let label = str_arg(labels[i], "group label")?;
                    if !label.is_empty() {
                        rec = rec.with_group(label);
                    }
                }
            }
            records.push(rec);
        }
        into_handle(rank_global(records, to_policy(policy))?, out);
        Ok(())
    })
}

/// Loads a corpus CSV with columns `id`, `citations` and `group`.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cr_corpus_from_csv(
    path: *const c_char,
    policy: CrRankPolicy,
    out: *mut *mut CrCorpus,
) -> CrStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let path = str_arg(path, "path")?;
        let file = File::open(path)
            .map_err(|e| Failure(CrStatus::Io, format!("cannot open {path}: {e}")))?;
        let records = load_corpus(BufReader::new(file), &CorpusSchema::default())?;
        into_handle(rank_global(records, to_policy(policy))?, out);
        Ok(())
    })
}

/// Releases a corpus. NULL is ignored.
///
/// # Safety
/// `corpus` must come from a `cr_corpus_*` constructor and not be used again.
#[no_mangle]
pub unsafe extern "C" fn cr_corpus_free(corpus: *mut CrCorpus) {
    if !corpus.is_null() {
        drop(Box::from_raw(corpus));
    }
}

/// Number of papers in the corpus, or 0 for NULL.
///
/// # Safety
/// `corpus` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cr_corpus_size(corpus: *const CrCorpus) -> usize {
    corpus.as_ref().map_or(0, |c| c.inner.global_size())
}

/// Fractional count of `group` papers in the global top `x` percent.
/// The label `GLOBAL` addresses the whole corpus.
///
/// # Safety
/// `corpus` must be a live handle, `group` a NUL-terminated string and `out`
/// writable.
#[no_mangle]
pub unsafe extern "C" fn cr_top_percentile_count(
    corpus: *const CrCorpus,
    group: *const c_char,
    x: f64,
    out: *mut f64,
) -> CrStatus {
    guard(|| {
        let corpus = corpus.as_ref().ok_or_else(|| null("corpus"))?;
        let group = str_arg(group, "group")?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = top_percentile_count(&corpus.inner, group, x)?;
        Ok(())
    })
}

fn ratio_parts(r: Ratio) -> (f64, u8) {
    match r {
        Ratio::Value(v) => (v, 1),
        Ratio::NotCalculable => (f64::NAN, 0),
    }
}

/// Indicator set of `group` with default options.
///
/// # Safety
/// `corpus` must be a live handle, `group` a NUL-terminated string and `out`
/// writable.
#[no_mangle]
pub unsafe extern "C" fn cr_indicator_set(
    corpus: *const CrCorpus,
    group: *const c_char,
    out: *mut CrIndicators,
) -> CrStatus {
    guard(|| {
        let corpus = corpus.as_ref().ok_or_else(|| null("corpus"))?;
        let group = str_arg(group, "group")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let ps = indicator_set(&corpus.inner, group)?;
        let (r1, r1_ok) = ratio_parts(ps.r1);
        let (r2, r2_ok) = ratio_parts(ps.r2);
        let (r3, r3_ok) = ratio_parts(ps.r3);
        *out = CrIndicators {
            papers: ps.papers,
            p_top50: ps.p_top.top50,
            p_top10: ps.p_top.top10,
            p_top5: ps.p_top.top5,
            p_top1: ps.p_top.top1,
            r1,
            r2,
            r3,
            r1_calculable: r1_ok,
            r2_calculable: r2_ok,
            r3_calculable: r3_ok,
        };
        Ok(())
    })
}

/// Type A/B/C from the three ratios. `stability` is the largest relative
/// spread still counted as equal ratios.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cr_classify(
    r1: f64,
    r2: f64,
    r3: f64,
    stability: f64,
    denominator: CrSpreadDenominator,
    out: *mut CrInstitutionType,
) -> CrStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let options = ClassifyOptions {
            stability,
            denominator: match denominator {
                CrSpreadDenominator::Min => SpreadDenominator::Min,
                CrSpreadDenominator::Max => SpreadDenominator::Max,
                CrSpreadDenominator::Mean => SpreadDenominator::Mean,
            },
        };
        *out = match classify(r1, r2, r3, &options)? {
            InstitutionType::A => CrInstitutionType::A,
            InstitutionType::B => CrInstitutionType::B,
            InstitutionType::C => CrInstitutionType::C,
        };
        Ok(())
    })
}

fn to_c(r: &PowerLawReference) -> CrPowerLaw {
    CrPowerLaw {
        alpha: r.alpha,
        coeff: r.coeff,
        global_size: r.global_size,
        hi_fraction: r.anchor_hi.fraction,
        hi_count: r.anchor_hi.count,
        lo_fraction: r.anchor_lo.fraction,
        lo_count: r.anchor_lo.count,
    }
}

fn from_c(r: &CrPowerLaw) -> Result<PowerLawReference, Failure> {
    Ok(power_law_reference(
        Anchor::new(r.hi_fraction, r.hi_count),
        Anchor::new(r.lo_fraction, r.lo_count),
        r.global_size,
    )?)
}

/// Power law through `(hi_fraction, hi_count)` and `(lo_fraction, lo_count)`,
/// fractions of a global list of `global_size` papers.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cr_power_law_reference(
    hi_fraction: f64,
    hi_count: f64,
    lo_fraction: f64,
    lo_count: f64,
    global_size: usize,
    out: *mut CrPowerLaw,
) -> CrStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let r = power_law_reference(
            Anchor::new(hi_fraction, hi_count),
            Anchor::new(lo_fraction, lo_count),
            global_size,
        )?;
        *out = to_c(&r);
        Ok(())
    })
}

/// Local rank the reference predicts at `global_rank`.
///
/// # Safety
/// `reference` must point to a value filled by [`cr_power_law_reference`]
/// and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cr_expected_local_rank(
    reference: *const CrPowerLaw,
    global_rank: f64,
    out: *mut f64,
) -> CrStatus {
    guard(|| {
        let r = from_c(reference.as_ref().ok_or_else(|| null("reference"))?)?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = r.expected_local_rank(global_rank)?;
        Ok(())
    })
}

/// Expected group papers in the global top `fraction`, below the narrower
/// anchor.
///
/// # Safety
/// `reference` must point to a value filled by [`cr_power_law_reference`]
/// and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cr_extrapolate_breakthrough(
    reference: *const CrPowerLaw,
    fraction: f64,
    out: *mut f64,
) -> CrStatus {
    guard(|| {
        let r = from_c(reference.as_ref().ok_or_else(|| null("reference"))?)?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = r.extrapolate_breakthrough(fraction)?.expected_count;
        Ok(())
    })
}

/// Message for the last failed call on this thread, or NULL. The pointer is
/// valid until the next `cr_*` call on the same thread.
#[no_mangle]
pub extern "C" fn cr_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn cr_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
