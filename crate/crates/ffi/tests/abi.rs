use std::ffi::{CStr, CString};
use std::process::Command;
use std::ptr;

use exttsp_ffi::*;

unsafe fn graph(n: usize, edges: &[(usize, usize, f64)], directed: bool) -> *mut ExttspGraph {
    let us: Vec<_> = edges.iter().map(|e| e.0).collect();
    let vs: Vec<_> = edges.iter().map(|e| e.1).collect();
    let ws: Vec<_> = edges.iter().map(|e| e.2).collect();
    let mut g = ptr::null_mut();
    let st = exttsp_graph_new(n, us.as_ptr(), vs.as_ptr(), ws.as_ptr(), edges.len(), directed, &mut g);
    assert_eq!(st, ExttspStatus::Ok);
    g
}

unsafe fn discount(kind: ExttspDiscountKind, k: usize) -> *mut ExttspDiscount {
    let mut f = ptr::null_mut();
    assert_eq!(exttsp_discount_new(kind as u32, k, &mut f), ExttspStatus::Ok);
    f
}

unsafe fn last_error() -> String {
    let mut buf = vec![0 as std::ffi::c_char; 256];
    let mut len = 0;
    assert_eq!(exttsp_last_error(buf.as_mut_ptr(), buf.len(), &mut len), ExttspStatus::Ok);
    CStr::from_ptr(buf.as_ptr()).to_string_lossy().into_owned()
}

#[test]
fn score_and_solve_a_path() {
    unsafe {
        let g = graph(4, &[(1, 2, 3.0), (2, 3, 1.0), (3, 4, 2.0)], false);
        let f = discount(ExttspDiscountKind::Step, 2);
        let mut value = 0.0;
        let order = [2usize, 1, 3, 4];
        assert_eq!(exttsp_score(g, f, order.as_ptr(), 4, &mut value), ExttspStatus::Ok);
        assert_eq!(value, 6.0);

        for algo in [
            ExttspAlgorithm::Greedy,
            ExttspAlgorithm::CycleCover,
            ExttspAlgorithm::LocalSearch,
            ExttspAlgorithm::TreeExact,
            ExttspAlgorithm::BruteForce,
        ] {
            let mut r = ptr::null_mut();
            assert_eq!(exttsp_solve(g, f, algo as u32, ptr::null(), &mut r), ExttspStatus::Ok);
            let mut v = 0.0;
            assert_eq!(exttsp_report_value(r, &mut v), ExttspStatus::Ok);
            assert_eq!(v, 6.0);
            let mut len = 0;
            assert_eq!(
                exttsp_report_layout(r, ptr::null_mut(), 0, &mut len),
                ExttspStatus::BufferTooSmall
            );
            assert_eq!(len, 4);
            let mut buf = [0usize; 4];
            assert_eq!(exttsp_report_layout(r, buf.as_mut_ptr(), 4, &mut len), ExttspStatus::Ok);
            let mut again = 0.0;
            assert_eq!(exttsp_score(g, f, buf.as_ptr(), 4, &mut again), ExttspStatus::Ok);
            assert_eq!(again, v);
            let mut millis = 0;
            let name = CString::new("millis").unwrap();
            assert_eq!(exttsp_report_stat(r, name.as_ptr(), &mut millis), ExttspStatus::Ok);
            exttsp_report_free(r);
        }
        exttsp_discount_free(f);
        exttsp_graph_free(g);
    }
}

#[test]
fn directed_input_is_merged() {
    unsafe {
        let g = graph(2, &[(1, 2, 3.0), (2, 1, 2.0)], true);
        let (mut n, mut m) = (0, 0);
        assert_eq!(exttsp_graph_size(g, &mut n, &mut m), ExttspStatus::Ok);
        assert_eq!((n, m), (2, 1));
        let f = discount(ExttspDiscountKind::Linear, 1);
        let mut v = 0.0;
        assert_eq!(exttsp_score(g, f, [2usize, 1].as_ptr(), 2, &mut v), ExttspStatus::Ok);
        assert_eq!(v, 5.0);
        exttsp_discount_free(f);
        exttsp_graph_free(g);
    }
}

#[test]
fn parse_and_table_discount() {
    unsafe {
        let text = CString::new("p exttsp 3 2 undirected\ne 1 2 1\ne 2 3 2\n").unwrap();
        let mut g = ptr::null_mut();
        assert_eq!(exttsp_graph_parse(text.as_ptr(), &mut g), ExttspStatus::Ok);
        let table = [1.0, 0.5];
        let mut f = ptr::null_mut();
        assert_eq!(exttsp_discount_from_table(table.as_ptr(), 2, &mut f), ExttspStatus::Ok);
        let mut v = 0.0;
        assert_eq!(exttsp_score(g, f, [1usize, 3, 2].as_ptr(), 3, &mut v), ExttspStatus::Ok);
        assert_eq!(v, 0.5 + 2.0);
        exttsp_discount_free(f);
        exttsp_graph_free(g);
    }
}

#[test]
fn error_codes() {
    unsafe {
        let mut g = ptr::null_mut();
        let bad = [(1usize, 1usize, 1.0f64)];
        assert_eq!(
            exttsp_graph_new(2, &bad[0].0, &bad[0].1, &bad[0].2, 1, false, &mut g),
            ExttspStatus::InvalidInput
        );
        assert!(last_error().contains("self-loop"));
        assert_eq!(
            exttsp_graph_new(2, ptr::null(), ptr::null(), ptr::null(), 1, false, &mut g),
            ExttspStatus::NullPointer
        );
        let mut f = ptr::null_mut();
        assert_eq!(exttsp_discount_new(9, 2, &mut f), ExttspStatus::InvalidInput);
        assert_eq!(exttsp_discount_new(0, 0, &mut f), ExttspStatus::InvalidInput);
        let rising = [1.0, 0.2, 0.5];
        assert_eq!(exttsp_discount_from_table(rising.as_ptr(), 3, &mut f), ExttspStatus::InvalidInput);

        let triangle = graph(3, &[(1, 2, 1.0), (2, 3, 1.0), (1, 3, 1.0)], false);
        let f = discount(ExttspDiscountKind::Step, 1);
        let mut r = ptr::null_mut();
        assert_eq!(
            exttsp_solve(triangle, f, ExttspAlgorithm::TreeExact as u32, ptr::null(), &mut r),
            ExttspStatus::Infeasible
        );
        assert!(last_error().contains("not a tree"));
        assert_eq!(exttsp_solve(triangle, f, 77, ptr::null(), &mut r), ExttspStatus::InvalidInput);
        let opts = ExttspSolveOptions {
            start: 0,
            ell: 0,
            delta: 0.0,
            brute_force_limit: 2,
            budget: 0.0,
        };
        assert_eq!(
            exttsp_solve(triangle, f, ExttspAlgorithm::BruteForce as u32, &opts, &mut r),
            ExttspStatus::Infeasible
        );
        let mut v = 0.0;
        assert_eq!(exttsp_score(triangle, f, [1usize, 1, 2].as_ptr(), 3, &mut v), ExttspStatus::InvalidInput);
        assert_eq!(exttsp_score(ptr::null(), f, [1usize].as_ptr(), 1, &mut v), ExttspStatus::NullPointer);
        let mut len = 0;
        assert_eq!(exttsp_last_error(ptr::null_mut(), 0, &mut len), ExttspStatus::BufferTooSmall);
        assert!(len > 0);
        exttsp_discount_free(f);
        exttsp_graph_free(triangle);
        exttsp_graph_free(ptr::null_mut());
        exttsp_report_free(ptr::null_mut());
        assert_eq!(CStr::from_ptr(exttsp_status_message(3)).to_str().unwrap(), "request is infeasible");
        assert_eq!(CStr::from_ptr(exttsp_status_message(99)).to_str().unwrap(), "unknown status");
    }
}

#[test]
fn header_compiles_as_c() {
    let header = concat!(env!("CARGO_MANIFEST_DIR"), "/include/exttsp.h");
    let text = std::fs::read_to_string(header).unwrap();
    for name in ["exttsp_solve", "exttsp_graph_new", "exttsp_report_layout", "EXTTSP_STATUS_INFEASIBLE"] {
        assert!(text.contains(name), "{} missing from the header", name);
    }
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("probe.c");
    std::fs::write(
        &src,
        format!(
            "#include \"{}\"\nint main(void) {{ ExttspGraph *g = 0; exttsp_graph_free(g); return EXTTSP_STATUS_OK; }}\n",
            header
        ),
    )
    .unwrap();
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    match Command::new(&cc).args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only"]).arg(&src).status() {
        Ok(status) => assert!(status.success(), "{} rejected the header", cc),
        Err(e) => eprintln!("skipping C compile check: {} not available ({})", cc, e),
    }
}

#[test]
fn c_program_links_against_the_static_library() {
    let manifest = env!("CARGO_MANIFEST_DIR");
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().and_then(|d| d.parent()).unwrap();
    let lib = profile_dir.join("libexttsp_ffi.a");
    if !lib.exists() {
        eprintln!("skipping link check: {} not built", lib.display());
        return;
    }
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    let dir = tempfile::tempdir().unwrap();
    let bin = dir.path().join("smoke");
    let built = Command::new(&cc)
        .arg(format!("{}/tests/c/smoke.c", manifest))
        .arg(format!("-I{}/include", manifest))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status();
    match built {
        Ok(status) => assert!(status.success(), "linking the C smoke test failed"),
        Err(e) => {
            eprintln!("skipping link check: {} not available ({})", cc, e);
            return;
        }
    }
    let out = Command::new(&bin).output().unwrap();
    assert!(out.status.success(), "smoke test exited with {:?}", out.status);
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.starts_with("6.0 "), "unexpected output {}", stdout);
}
