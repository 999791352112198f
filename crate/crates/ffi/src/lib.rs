//! C ABI over `respart`.
//!
//! Graphs and distributions are opaque handles owned by the caller and
//! released with their `_free` function. Every fallible function returns an
//! [`RpStatus`]; on failure a message is available from
//! [`rp_last_error_message`] on the same thread. Strings returned through
//! out-parameters are NUL-terminated and must be released with
//! [`rp_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use respart::dist::{dist_even_even, dist_even_odd, dist_odd_odd, limit_dist, LimitKind};
use respart::fourier::expected_count;
use respart::gf2::{count_partitions_q2, count_partitions_q2_log2, Q2Condition};
use respart::partition::count_good;
use respart::pmf::ratio_to_f64;
use respart::{Error, Graph, PartitionSpec, Probability, RationalPmf};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RpStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Parse = 3,
    ScaleGuard = 4,
    Overflow = 5,
    Panic = 6,
}

/// Two-part parity condition for `q = 2`.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RpCondition {
    EvenEven = 0,
    EvenOdd = 1,
    OddOdd = 2,
}

impl From<RpCondition> for Q2Condition {
    fn from(c: RpCondition) -> Self {
        match c {
            RpCondition::EvenEven => Q2Condition::EvenEven,
            RpCondition::EvenOdd => Q2Condition::EvenOdd,
            RpCondition::OddOdd => Q2Condition::OddOdd,
        }
    }
}

/// Limiting law selector.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RpLimitKind {
    X = 0,
    Z = 1,
}

/// A simple graph.
pub struct RpGraph(Graph);

/// A finite distribution over non-negative integers, ascending by value.
pub struct RpPmf {
    entries: Vec<(BigUint, num_bigint::BigInt, num_bigint::BigInt, f64)>,
    tail_bound: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let c = CString::new(msg.into().replace('\0', " ")).expect("no interior NUL");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn fail(status: RpStatus, msg: impl Into<String>) -> RpStatus {
    set_error(msg);
    status
}

fn status_of(e: &Error) -> RpStatus {
    match e {
        Error::Parse { .. } | Error::InvalidProbability(_) => RpStatus::Parse,
        Error::ScaleGuard(_) => RpStatus::ScaleGuard,
        _ => RpStatus::InvalidArgument,
    }
}

fn from_error(e: Error) -> RpStatus {
    fail(status_of(&e), e.to_string())
}

/// Runs `f`, converting panics into `RpStatus::Panic`.
fn guard(f: impl FnOnce() -> RpStatus) -> RpStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            fail(RpStatus::Panic, format!("internal panic: {msg}"))
        }
    }
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s).expect("no interior NUL").into_raw()
}

unsafe fn spec_from(q: u32, a: *const u32, a_len: usize) -> Result<PartitionSpec, RpStatus> {
    if a.is_null() {
        return Err(fail(RpStatus::NullPointer, "multiplicity array is null"));
    }
    let mult = std::slice::from_raw_parts(a, a_len).to_vec();
    PartitionSpec::new(q, mult).map_err(from_error)
}

/// Message for the last failure on this thread, or null. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn rp_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn rp_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn rp_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Samples `G(n, p_num/p_den)` from `seed`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rp_graph_sample_gnp(
    n: usize,
    p_num: u64,
    p_den: u64,
    seed: u64,
    out: *mut *mut RpGraph,
) -> RpStatus {
    guard(|| {
        if out.is_null() {
            return fail(RpStatus::NullPointer, "out is null");
        }
        if n == 0 {
            return fail(RpStatus::InvalidArgument, "n must be at least 1");
        }
        let p = match Probability::new(p_num, p_den) {
            Ok(p) => p,
            Err(e) => return from_error(e),
        };
        *out = Box::into_raw(Box::new(RpGraph(Graph::sample_gnp(n, p, seed))));
        RpStatus::Ok
    })
}

/// Parses the edge-list text format.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rp_graph_parse_edge_list(text: *const c_char, out: *mut *mut RpGraph) -> RpStatus {
    guard(|| {
        if text.is_null() || out.is_null() {
            return fail(RpStatus::NullPointer, "text or out is null");
        }
        let Ok(s) = CStr::from_ptr(text).to_str() else {
            return fail(RpStatus::Parse, "edge list is not valid UTF-8");
        };
        match Graph::parse_edge_list(s) {
            Ok(g) => {
                *out = Box::into_raw(Box::new(RpGraph(g)));
                RpStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// Builds a graph from `m` 0-indexed pairs stored as `edges[2i], edges[2i+1]`.
///
/// # Safety
/// `edges` must point to `2 * m` values (may be null when `m == 0`) and
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn rp_graph_from_edges(
    n: usize,
    edges: *const u32,
    m: usize,
    out: *mut *mut RpGraph,
) -> RpStatus {
    guard(|| {
        if out.is_null() || (edges.is_null() && m > 0) {
            return fail(RpStatus::NullPointer, "edges or out is null");
        }
        if n == 0 {
            return fail(RpStatus::InvalidArgument, "n must be at least 1");
        }
        let flat = if m == 0 { &[][..] } else { std::slice::from_raw_parts(edges, 2 * m) };
        let mut g = Graph::empty(n);
        for e in flat.chunks_exact(2) {
            let (u, v) = (e[0] as usize, e[1] as usize);
            if u >= n || v >= n || u == v || g.has_edge(u, v) {
                return fail(RpStatus::InvalidArgument, format!("bad edge ({u}, {v}) for n = {n}"));
            }
            g.add_edge(u, v);
        }
        *out = Box::into_raw(Box::new(RpGraph(g)));
        RpStatus::Ok
    })
}

/// Releases a graph. Null is ignored.
///
/// # Safety
/// `g` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn rp_graph_free(g: *mut RpGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// Number of vertices, or 0 for null.
///
/// # Safety
/// `g` must be null or a live graph.
#[no_mangle]
pub unsafe extern "C" fn rp_graph_vertex_count(g: *const RpGraph) -> usize {
    g.as_ref().map_or(0, |g| g.0.n())
}

/// Number of edges, or 0 for null.
///
/// # Safety
/// `g` must be null or a live graph.
#[no_mangle]
pub unsafe extern "C" fn rp_graph_edge_count(g: *const RpGraph) -> usize {
    g.as_ref().map_or(0, |g| g.0.edge_count())
}

/// Canonical edge-list text of `g`, freed with `rp_string_free`.
///
/// # Safety
/// `g` must be a live graph and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn rp_graph_to_edge_list(g: *const RpGraph, out: *mut *mut c_char) -> RpStatus {
    guard(|| {
        let (Some(g), false) = (g.as_ref(), out.is_null()) else {
            return fail(RpStatus::NullPointer, "graph or out is null");
        };
        *out = into_c_string(g.0.emit_edge_list());
        RpStatus::Ok
    })
}

/// Number of two-part partitions of `g` under `cond`, as a decimal string.
///
/// # Safety
/// `g` must be a live graph and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn rp_count_partitions_q2(
    g: *const RpGraph,
    cond: RpCondition,
    out: *mut *mut c_char,
) -> RpStatus {
    guard(|| {
        let (Some(g), false) = (g.as_ref(), out.is_null()) else {
            return fail(RpStatus::NullPointer, "graph or out is null");
        };
        *out = into_c_string(count_partitions_q2(&g.0, cond.into()).to_string());
        RpStatus::Ok
    })
}

/// `log2` of the two-part partition count, or -1 when there are none.
///
/// # Safety
/// `g` must be a live graph and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn rp_count_partitions_q2_log2(g: *const RpGraph, cond: RpCondition, out: *mut i64) -> RpStatus {
    guard(|| {
        let (Some(g), false) = (g.as_ref(), out.is_null()) else {
            return fail(RpStatus::NullPointer, "graph or out is null");
        };
        *out = count_partitions_q2_log2(&g.0, cond.into()).map_or(-1, |k| k as i64);
        RpStatus::Ok
    })
}

/// Brute-force count of good partitions for the spec `(q; a[0..a_len])`.
///
/// # Safety
/// `g` must be a live graph, `a` must point to `a_len` values and `out`
/// must be valid.
#[no_mangle]
pub unsafe extern "C" fn rp_count_good(
    g: *const RpGraph,
    q: u32,
    a: *const u32,
    a_len: usize,
    out: *mut u64,
) -> RpStatus {
    guard(|| {
        let (Some(g), false) = (g.as_ref(), out.is_null()) else {
            return fail(RpStatus::NullPointer, "graph or out is null");
        };
        let spec = match spec_from(q, a, a_len) {
            Ok(s) => s,
            Err(status) => return status,
        };
        match count_good(&g.0, &spec) {
            Ok(c) => {
                *out = c;
                RpStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

fn pmf_handle(pmf: &RationalPmf, tail_bound: f64) -> *mut RpPmf {
    let entries = pmf.iter().map(|(v, m)| (v.clone(), m.numer().clone(), m.denom().clone(), ratio_to_f64(m))).collect();
    Box::into_raw(Box::new(RpPmf { entries, tail_bound }))
}

/// Exact distribution of the `q = 2` count in `G(n, 1/2)`.
///
/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn rp_dist_q2(cond: RpCondition, n: u32, out: *mut *mut RpPmf) -> RpStatus {
    guard(|| {
        if out.is_null() {
            return fail(RpStatus::NullPointer, "out is null");
        }
        let pmf = match cond {
            RpCondition::EvenEven => dist_even_even(n),
            RpCondition::EvenOdd => dist_even_odd(n),
            RpCondition::OddOdd => dist_odd_odd(n),
        };
        match pmf {
            Ok(p) => {
                *out = pmf_handle(&p, 0.0);
                RpStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// Limiting law truncated at `2^k_max`.
///
/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn rp_limit_dist(kind: RpLimitKind, k_max: u32, out: *mut *mut RpPmf) -> RpStatus {
    guard(|| {
        if out.is_null() {
            return fail(RpStatus::NullPointer, "out is null");
        }
        if k_max > 4096 {
            return fail(RpStatus::ScaleGuard, "k_max must be at most 4096");
        }
        let kind = match kind {
            RpLimitKind::X => LimitKind::X,
            RpLimitKind::Z => LimitKind::Z,
        };
        let t = limit_dist(kind, k_max);
        *out = pmf_handle(&t.pmf, t.tail_bound);
        RpStatus::Ok
    })
}

/// Number of support points, or 0 for null.
///
/// # Safety
/// `pmf` must be null or a live distribution.
#[no_mangle]
pub unsafe extern "C" fn rp_pmf_len(pmf: *const RpPmf) -> usize {
    pmf.as_ref().map_or(0, |p| p.entries.len())
}

/// Upper bound on the mass a truncated distribution omits (0 when exact).
///
/// # Safety
/// `pmf` must be null or a live distribution.
#[no_mangle]
pub unsafe extern "C" fn rp_pmf_tail_bound(pmf: *const RpPmf) -> f64 {
    pmf.as_ref().map_or(0.0, |p| p.tail_bound)
}

/// Entry `index` as a value and a double-precision mass. Values that do not
/// fit in 64 bits give `RP_STATUS_OVERFLOW`; use `rp_pmf_get_exact`.
///
/// # Safety
/// `pmf` must be a live distribution; `value` and `mass` must be valid.
#[no_mangle]
pub unsafe extern "C" fn rp_pmf_get(pmf: *const RpPmf, index: usize, value: *mut u64, mass: *mut f64) -> RpStatus {
    guard(|| {
        let (Some(p), false, false) = (pmf.as_ref(), value.is_null(), mass.is_null()) else {
            return fail(RpStatus::NullPointer, "pmf, value or mass is null");
        };
        let Some((v, _, _, m)) = p.entries.get(index) else {
            return fail(RpStatus::InvalidArgument, format!("index {index} out of range"));
        };
        let Some(v) = v.to_u64() else {
            return fail(RpStatus::Overflow, format!("value {v} exceeds 64 bits"));
        };
        *value = v;
        *mass = *m;
        RpStatus::Ok
    })
}

/// Entry `index` as decimal strings for the value and the reduced mass
/// numerator and denominator; each is freed with `rp_string_free`.
///
/// # Safety
/// `pmf` must be a live distribution and the out pointers valid.
#[no_mangle]
pub unsafe extern "C" fn rp_pmf_get_exact(
    pmf: *const RpPmf,
    index: usize,
    value: *mut *mut c_char,
    mass_num: *mut *mut c_char,
    mass_den: *mut *mut c_char,
) -> RpStatus {
    guard(|| {
        let Some(p) = pmf.as_ref() else {
            return fail(RpStatus::NullPointer, "pmf is null");
        };
        if value.is_null() || mass_num.is_null() || mass_den.is_null() {
            return fail(RpStatus::NullPointer, "out pointer is null");
        }
        let Some((v, num, den, _)) = p.entries.get(index) else {
            return fail(RpStatus::InvalidArgument, format!("index {index} out of range"));
        };
        *value = into_c_string(v.to_string());
        *mass_num = into_c_string(num.to_string());
        *mass_den = into_c_string(den.to_string());
        RpStatus::Ok
    })
}

/// Releases a distribution. Null is ignored.
///
/// # Safety
/// `pmf` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn rp_pmf_free(pmf: *mut RpPmf) {
    if !pmf.is_null() {
        drop(Box::from_raw(pmf));
    }
}

/// Exact `E[X_n]` for the spec `(q; a[0..a_len])` in `G(n, 1/2)`, as a
/// reduced fraction of decimal strings plus a double approximation. Any
/// of the out pointers may be null.
///
/// # Safety
/// `a` must point to `a_len` values; non-null out pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn rp_expected_count(
    n: usize,
    q: u32,
    a: *const u32,
    a_len: usize,
    num: *mut *mut c_char,
    den: *mut *mut c_char,
    value: *mut f64,
) -> RpStatus {
    guard(|| {
        let spec = match spec_from(q, a, a_len) {
            Ok(s) => s,
            Err(status) => return status,
        };
        match expected_count(n, &spec) {
            Ok(e) => {
                if !num.is_null() {
                    *num = into_c_string(e.numer().to_string());
                }
                if !den.is_null() {
                    *den = into_c_string(e.denom().to_string());
                }
                if !value.is_null() {
                    *value = ratio_to_f64(&e);
                }
                RpStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}
