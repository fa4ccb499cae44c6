//! C ABI over the exttsp solvers.
//!
//! Objects are opaque handles created by `*_new` functions and released with
//! the matching `*_free`. Every fallible call returns an `ExttspStatus`;
//! outputs go through pointer arguments. The message of the last failure on
//! the calling thread is available from `exttsp_last_error`.
//!
//! Vertex ids are 1-based, as in the instance format.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use exttsp::greedy::Start;
use exttsp::io::parse_instance;
use exttsp::{score, solve, Algorithm, Discount, Error, Graph, Layout, SolveOptions, SolveReport};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExttspStatus {
    Ok = 0,
    NullPointer = 1,
    /// Malformed graph, discount, layout or parameter.
    InvalidInput = 2,
    /// Well-formed request the solver refuses (non-tree, size limit, budget).
    Infeasible = 3,
    Internal = 4,
    /// The output buffer is too short; the required length was written.
    BufferTooSmall = 5,
}

/// Algorithm codes for `exttsp_solve`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExttspAlgorithm {
    Greedy = 0,
    CycleCover = 1,
    LocalSearch = 2,
    TreeExact = 3,
    BruteForce = 4,
}

/// Discount kinds for `exttsp_discount_new`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExttspDiscountKind {
    Step = 0,
    Linear = 1,
}

/// Solver settings. Zero fields select the defaults.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct ExttspSolveOptions {
    /// Greedy start vertex, 0 for automatic.
    pub start: usize,
    /// Local-search subset size, 0 for min(2k, n).
    pub ell: usize,
    /// Local-search improvement threshold.
    pub delta: f64,
    /// Brute-force vertex limit, 0 for the default.
    pub brute_force_limit: usize,
    /// Tree-exact work budget, 0 for the default.
    pub budget: f64,
}

pub struct ExttspGraph(Graph);
pub struct ExttspDiscount(Discount);
pub struct ExttspReport(SolveReport);

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(e: &Error) -> ExttspStatus {
    if e.is_infeasible() {
        ExttspStatus::Infeasible
    } else if matches!(e, Error::Internal(_)) {
        ExttspStatus::Internal
    } else {
        ExttspStatus::InvalidInput
    }
}

/// Runs `body`, turning errors and panics into status codes.
fn guard(body: impl FnOnce() -> Result<(), ExttspStatus>) -> ExttspStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => ExttspStatus::Ok,
        Ok(Err(status)) => status,
        Err(_) => {
            set_error("panic inside the library".into());
            ExttspStatus::Internal
        }
    }
}

fn fail(e: Error) -> ExttspStatus {
    set_error(e.to_string());
    status_of(&e)
}

fn null(what: &str) -> ExttspStatus {
    set_error(format!("{} is null", what));
    ExttspStatus::NullPointer
}

unsafe fn slice_or_empty<'a, T>(p: *const T, len: usize) -> Option<&'a [T]> {
    if len == 0 {
        Some(&[])
    } else if p.is_null() {
        None
    } else {
        Some(slice::from_raw_parts(p, len))
    }
}

unsafe fn store<T>(out: *mut *mut T, value: T) {
    *out = Box::into_raw(Box::new(value));
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn exttsp_status_message(status: u32) -> *const c_char {
    let s: &'static CStr = match status {
        0 => c"ok",
        1 => c"null pointer argument",
        2 => c"invalid input",
        3 => c"request is infeasible",
        4 => c"internal error",
        5 => c"buffer too small",
        _ => c"unknown status",
    };
    s.as_ptr()
}

/// Copies the last error message of this thread, NUL terminated, into `buf`.
/// `len` receives the message length without the terminator.
#[no_mangle]
pub unsafe extern "C" fn exttsp_last_error(buf: *mut c_char, cap: usize, len: *mut usize) -> ExttspStatus {
    if len.is_null() {
        return ExttspStatus::NullPointer;
    }
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        *len = msg.len();
        if cap < msg.len() + 1 {
            return ExttspStatus::BufferTooSmall;
        }
        if buf.is_null() {
            return ExttspStatus::NullPointer;
        }
        ptr::copy_nonoverlapping(msg.as_ptr() as *const c_char, buf, msg.len());
        *buf.add(msg.len()) = 0;
        ExttspStatus::Ok
    })
}

/// Builds a graph on vertices `1..=n` from `m` edges. With `directed` set,
/// opposite arcs are merged by adding their weights.
#[no_mangle]
pub unsafe extern "C" fn exttsp_graph_new(
    n: usize,
    us: *const usize,
    vs: *const usize,
    ws: *const f64,
    m: usize,
    directed: bool,
    out: *mut *mut ExttspGraph,
) -> ExttspStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let (Some(us), Some(vs), Some(ws)) = (slice_or_empty(us, m), slice_or_empty(vs, m), slice_or_empty(ws, m))
        else {
            return Err(null("edge array"));
        };
        let arcs: Vec<_> = (0..m).map(|i| (us[i], vs[i], ws[i])).collect();
        let g = if directed {
            exttsp::merge_directed(n, &arcs)
        } else {
            Graph::new(n, arcs)
        }
        .map_err(fail)?;
        store(out, ExttspGraph(g));
        Ok(())
    })
}

/// Parses an instance in the text format. Vertex ids must be `1..=n`.
#[no_mangle]
pub unsafe extern "C" fn exttsp_graph_parse(text: *const c_char, out: *mut *mut ExttspGraph) -> ExttspStatus {
    guard(|| {
        if text.is_null() || out.is_null() {
            return Err(null("argument"));
        }
        let text = CStr::from_ptr(text)
            .to_str()
            .map_err(|_| fail(Error::Parse { line: 0, msg: "input is not UTF-8".into() }))?;
        let inst = parse_instance(text).map_err(fail)?;
        if inst.ids.iter().enumerate().any(|(i, &id)| id != i as u64) {
            return Err(fail(Error::InvalidParameter("vertex ids must be 1..=n".into())));
        }
        store(out, ExttspGraph(inst.graph));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn exttsp_graph_free(g: *mut ExttspGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

#[no_mangle]
pub unsafe extern "C" fn exttsp_graph_size(g: *const ExttspGraph, n: *mut usize, m: *mut usize) -> ExttspStatus {
    if g.is_null() || n.is_null() || m.is_null() {
        return null("argument");
    }
    *n = (*g).0.n();
    *m = (*g).0.m();
    ExttspStatus::Ok
}

#[no_mangle]
pub unsafe extern "C" fn exttsp_discount_new(
    kind: u32,
    k: usize,
    out: *mut *mut ExttspDiscount,
) -> ExttspStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let f = match kind {
            x if x == ExttspDiscountKind::Step as u32 => Discount::step(k),
            x if x == ExttspDiscountKind::Linear as u32 => Discount::linear(k),
            x => Err(Error::InvalidDiscount(format!("unknown discount kind {}", x))),
        }
        .map_err(fail)?;
        store(out, ExttspDiscount(f));
        Ok(())
    })
}

/// Discount with values `f(1) .. f(k)`, `k = len`.
#[no_mangle]
pub unsafe extern "C" fn exttsp_discount_from_table(
    values: *const f64,
    len: usize,
    out: *mut *mut ExttspDiscount,
) -> ExttspStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let values = slice_or_empty(values, len).ok_or_else(|| null("values"))?;
        let f = Discount::from_table(values.to_vec()).map_err(fail)?;
        store(out, ExttspDiscount(f));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn exttsp_discount_free(f: *mut ExttspDiscount) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}

/// Scores the ordering `order[0..n]` of all vertices.
#[no_mangle]
pub unsafe extern "C" fn exttsp_score(
    g: *const ExttspGraph,
    f: *const ExttspDiscount,
    order: *const usize,
    n: usize,
    value: *mut f64,
) -> ExttspStatus {
    guard(|| {
        if g.is_null() || f.is_null() || value.is_null() {
            return Err(null("argument"));
        }
        let order = slice_or_empty(order, n).ok_or_else(|| null("order"))?;
        let g = &(*g).0;
        let layout = Layout::from_order(g.n(), order.to_vec()).map_err(fail)?;
        *value = score(g, &layout, &(*f).0).map_err(fail)?;
        Ok(())
    })
}

/// Runs a solver. `options` may be null for the defaults.
#[no_mangle]
pub unsafe extern "C" fn exttsp_solve(
    g: *const ExttspGraph,
    f: *const ExttspDiscount,
    algorithm: u32,
    options: *const ExttspSolveOptions,
    out: *mut *mut ExttspReport,
) -> ExttspStatus {
    guard(|| {
        if g.is_null() || f.is_null() || out.is_null() {
            return Err(null("argument"));
        }
        let mut opts = SolveOptions::default();
        if let Some(o) = options.as_ref() {
            if o.start != 0 {
                opts.start = Start::Vertex(o.start);
            }
            if o.ell != 0 {
                opts.ell = Some(o.ell);
            }
            opts.delta = o.delta;
            if o.brute_force_limit != 0 {
                opts.brute_force_limit = o.brute_force_limit;
            }
            if o.budget != 0.0 {
                opts.budget = o.budget;
            }
        }
        let algo = [
            (ExttspAlgorithm::Greedy, Algorithm::Greedy),
            (ExttspAlgorithm::CycleCover, Algorithm::CycleCover),
            (ExttspAlgorithm::LocalSearch, Algorithm::LocalSearch),
            (ExttspAlgorithm::TreeExact, Algorithm::TreeExact),
            (ExttspAlgorithm::BruteForce, Algorithm::BruteForce),
        ]
        .into_iter()
        .find(|(c, _)| *c as u32 == algorithm)
        .map(|(_, a)| a)
        .ok_or_else(|| fail(Error::InvalidParameter(format!("unknown algorithm {}", algorithm))))?;
        let report = solve(algo, &(*g).0, &(*f).0, &opts).map_err(fail)?;
        store(out, ExttspReport(report));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn exttsp_report_value(r: *const ExttspReport, value: *mut f64) -> ExttspStatus {
    if r.is_null() || value.is_null() {
        return null("argument");
    }
    *value = (*r).0.value;
    ExttspStatus::Ok
}

/// Copies the layout (vertex ids in position order) into `buf`. `len`
/// receives the vertex count; a short buffer yields `BufferTooSmall`.
#[no_mangle]
pub unsafe extern "C" fn exttsp_report_layout(
    r: *const ExttspReport,
    buf: *mut usize,
    cap: usize,
    len: *mut usize,
) -> ExttspStatus {
    if r.is_null() || len.is_null() {
        return null("argument");
    }
    let order = (*r).0.layout.order();
    *len = order.len();
    if cap < order.len() {
        return ExttspStatus::BufferTooSmall;
    }
    if buf.is_null() && !order.is_empty() {
        return null("buf");
    }
    if !order.is_empty() {
        ptr::copy_nonoverlapping(order.as_ptr(), buf, order.len());
    }
    ExttspStatus::Ok
}

/// Named counter of the run, for example `millis` or `moves_accepted`.
#[no_mangle]
pub unsafe extern "C" fn exttsp_report_stat(
    r: *const ExttspReport,
    name: *const c_char,
    value: *mut u64,
) -> ExttspStatus {
    if r.is_null() || name.is_null() || value.is_null() {
        return null("argument");
    }
    let Ok(name) = CStr::from_ptr(name).to_str() else {
        set_error("stat name is not UTF-8".into());
        return ExttspStatus::InvalidInput;
    };
    match (*r).0.stat(name) {
        Some(v) => {
            *value = v;
            ExttspStatus::Ok
        }
        None => {
            set_error(format!("no stat named '{}'", name));
            ExttspStatus::InvalidInput
        }
    }
}

#[no_mangle]
pub unsafe extern "C" fn exttsp_report_free(r: *mut ExttspReport) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}
