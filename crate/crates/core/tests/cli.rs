use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use grassmann_newton::cli::{validate_report, RunReport};
use tempfile::TempDir;

fn grnewton(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_grnewton")).args(args).output().expect("binary runs")
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn report(out: &Output) -> RunReport {
    validate_report(std::str::from_utf8(&out.stdout).unwrap()).expect("valid report on stdout")
}

#[test]
fn rayleigh_gr_converges_to_dominant_projector() {
    let dir = TempDir::new().unwrap();
    let a = write(&dir, "a.txt", "4 0 0 0\n0 3 0 0\n0 0 2 0\n0 0 0 1\n");
    let out = grnewton(&["rayleigh-gr", "--m", "2", s(&a)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(&out);
    assert_eq!(r.status, "converged");
    assert_eq!(r.rate.verdict, "quadratic");
    assert!((r.final_state.trace - 2.0).abs() < 1e-10);
    assert!(String::from_utf8_lossy(&out.stderr).contains("converged"));
}

#[test]
fn bad_inputs_exit_1() {
    let dir = TempDir::new().unwrap();
    let sym = write(&dir, "sym.txt", "2 0 0\n0 1 0\n0 0 0\n");
    let asym = write(&dir, "asym.txt", "2 1\n0 1\n");
    let odd = write(&dir, "odd.txt", "1 0 0\n0 2 0\n0 0 3\n");
    let unstructured = write(&dir, "h.txt", "1 0 0 0\n0 2 0 0\n0 0 3 0\n0 0 0 4\n");
    let ragged = write(&dir, "ragged.txt", "1 2\n3\n");
    let cases: [&[&str]; 7] = [
        &["rayleigh-gr", "--m", "0", s(&sym)],
        &["rayleigh-gr", "--m", "3", s(&sym)],
        &["rayleigh-gr", "--m", "1", s(&asym)],
        &["rayleigh-lg", s(&odd)],
        &["rayleigh-lg", s(&unstructured)],
        &["invariant", "--m", "1", s(&ragged)],
        &["rayleigh-gr", "--m", "1", "/nonexistent/matrix.txt"],
    ];
    for args in cases {
        let out = grnewton(args);
        assert_eq!(out.status.code(), Some(1), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
    let named = grnewton(&["rayleigh-gr", "--m", "1", s(&asym)]);
    assert!(String::from_utf8_lossy(&named.stderr).contains("InputNotSymmetric"));
    let named = grnewton(&["rayleigh-lg", s(&unstructured)]);
    assert!(String::from_utf8_lossy(&named.stderr).contains("InputNotHamiltonianSymmetric"));
}

#[test]
fn usage_errors_exit_1_and_help_exits_0() {
    assert_eq!(grnewton(&["rayleigh-gr"]).status.code(), Some(1));
    assert_eq!(grnewton(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(grnewton(&["--help"]).status.code(), Some(0));
}

#[test]
fn identity_matrix_is_degenerate_for_invariant() {
    let dir = TempDir::new().unwrap();
    let a = write(&dir, "i.txt", "1 0 0 0\n0 1 0 0\n0 0 1 0\n0 0 0 1\n");
    let out = grnewton(&["invariant", "--m", "2", s(&a)]);
    assert_eq!(out.status.code(), Some(3));
    let r = report(&out);
    assert_eq!(r.status, "singular_hessian");
    assert!(r.diagnostic.is_some());
}

#[test]
fn iteration_budget_exits_2() {
    let dir = TempDir::new().unwrap();
    let a = write(&dir, "a.txt", "4 0 0 0\n0 3 0 0\n0 0 2 0\n0 0 0 1\n");
    let out = grnewton(&["rayleigh-gr", "--m", "2", "--max-iters", "1", s(&a)]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(report(&out).status, "max_iters");
}

#[test]
fn rayleigh_lg_seeded_run_is_quadratic() {
    let dir = TempDir::new().unwrap();
    let h = write(&dir, "h.txt", "2 0.5 0 0\n0.5 1 0 0\n0 0 -2 -0.5\n0 0 -0.5 -1\n");
    let out = grnewton(&["rayleigh-lg", "--seed", "3", s(&h)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(&out);
    assert_eq!(r.rate.verdict, "quadratic");
    assert!(r.final_state.extra_residuals["lagrangian"] <= 1e-10);
    assert!(r.final_state.extra_residuals["symplecticity"] <= 1e-10);
}

#[test]
fn generic_engine_is_selected_by_charts() {
    let dir = TempDir::new().unwrap();
    let a = write(&dir, "a.txt", "4 0 0 0\n0 3 0 0\n0 0 2 0\n0 0 0 1\n");
    let out = grnewton(&["rayleigh-gr", "--m", "2", "--mu", "cayley", "--nu", "exp", s(&a)]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r.config.engine, "generic");
    assert!((r.final_state.trace - 2.0).abs() < 1e-10);
}

#[test]
fn invariant_solvers_agree() {
    let dir = TempDir::new().unwrap();
    let a = write(&dir, "a.txt", "4 1 0.5 0.2\n0.3 5 0.1 0.4\n0 0 1 0.5\n0 0 0.2 -1\n");
    let mut projectors = Vec::new();
    for solver in ["direct", "recursive"] {
        let out = grnewton(&["invariant", "--m", "2", "--solver", solver, s(&a)]);
        assert_eq!(out.status.code(), Some(0), "{solver}: {}", String::from_utf8_lossy(&out.stderr));
        let r = report(&out);
        assert!(r.final_state.extra_residuals["invariance"] <= 1e-10, "{solver}");
        assert_eq!(r.config.solver.as_deref(), Some(solver));
        projectors.push(r.final_state.projector);
    }
    for (x, y) in projectors[0].iter().flatten().zip(projectors[1].iter().flatten()) {
        assert!((x - y).abs() <= 1e-8);
    }
    // span(e1, e2) is the invariant subspace the start is perturbed from
    for (i, row) in projectors[0].iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            let want = if i == j && i < 2 { 1.0 } else { 0.0 };
            assert!((v - want).abs() <= 1e-8);
        }
    }
}

#[test]
fn out_flag_and_start_file() {
    let dir = TempDir::new().unwrap();
    let a = write(&dir, "a.txt", "1 0 0\n0 3 0\n0 0 2\n");
    let y = write(&dir, "y.txt", "0.1\n1\n0\n");
    let out_path = dir.path().join("r.json");
    let out = grnewton(&["rayleigh-gr", "--m", "1", "--start", s(&y), "--out", s(&out_path), s(&a)]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let r = validate_report(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    assert!((r.final_state.projector[1][1] - 1.0).abs() <= 1e-10);
    assert_eq!(r.config.start.as_deref(), Some(s(&y)));
}

#[test]
fn check_command() {
    assert_eq!(grnewton(&["check", "--sizes", "2,3"]).status.code(), Some(0));
    let out = grnewton(&["check", "--sizes", "3", "--inject-fault"]);
    assert_ne!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("FAIL"));
    assert_eq!(grnewton(&["check", "--sizes", "1"]).status.code(), Some(1));
}

#[test]
fn full_check_grid_passes() {
    let out = grnewton(&["check"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
}
