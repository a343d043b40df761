use std::ffi::CStr;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use percolab_ffi::*;

fn last_error() -> String {
    let p = percolab_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn lattice(kind: PercolabLattice, n: usize, d: usize) -> *mut PercolabGraph {
    let mut g = ptr::null_mut();
    assert_eq!(
        unsafe { percolab_graph_lattice(kind, n, d, &mut g) },
        PercolabStatus::Ok
    );
    assert!(!g.is_null());
    g
}

#[test]
fn graph_handles() {
    let g = lattice(PercolabLattice::Torus, 4, 2);
    unsafe {
        assert_eq!(percolab_graph_vertex_count(g), 16);
        let mut deg = 0usize;
        assert_eq!(percolab_graph_degree(g, 5, &mut deg), PercolabStatus::Ok);
        assert_eq!(deg, 4);
        assert_eq!(percolab_graph_degree(g, 16, &mut deg), PercolabStatus::InvalidArgument);
        assert!(last_error().contains("out of range"));
        percolab_graph_free(g);
        percolab_graph_free(ptr::null_mut());
        assert_eq!(percolab_graph_vertex_count(ptr::null()), 0);
    }
}

#[test]
fn error_codes() {
    let mut g = ptr::null_mut();
    unsafe {
        assert_eq!(
            percolab_graph_lattice(PercolabLattice::Torus, 2, 2, &mut g),
            PercolabStatus::InvalidArgument
        );
        assert!(g.is_null());
        assert_eq!(
            percolab_graph_random_regular(5, 3, 1, &mut g),
            PercolabStatus::InvalidArgument
        );
        assert!(last_error().contains("even"));
        assert_eq!(
            percolab_graph_lattice(PercolabLattice::Box, 3, 2, ptr::null_mut()),
            PercolabStatus::NullPointer
        );
        let mut est = PercolabEstimate::default();
        assert_eq!(
            percolab_estimate_success(ptr::null(), 2, 0.5, 10, 1, &mut est),
            PercolabStatus::NullPointer
        );
    }
    let g = lattice(PercolabLattice::Box, 3, 2);
    let mut est = PercolabEstimate::default();
    unsafe {
        assert_eq!(
            percolab_estimate_noise_corr(g, 2, 1.0, 0.5, 100, 1, &mut est),
            PercolabStatus::Degenerate
        );
        percolab_graph_free(g);
    }
}

#[test]
fn closure_through_the_abi() {
    let g = lattice(PercolabLattice::Box, 2, 2);
    let mut out = [0u8; 4];
    let mut complete = false;
    unsafe {
        let diag = [1u8, 0, 0, 1];
        assert_eq!(
            percolab_closure(g, 2, diag.as_ptr(), 4, out.as_mut_ptr(), &mut complete),
            PercolabStatus::Ok
        );
        assert!(complete);
        assert_eq!(out, [1, 1, 1, 1]);
        let single = [1u8, 0, 0, 0];
        assert_eq!(
            percolab_closure(g, 2, single.as_ptr(), 4, ptr::null_mut(), &mut complete),
            PercolabStatus::Ok
        );
        assert!(!complete);
        assert_eq!(
            percolab_closure(g, 2, single.as_ptr(), 3, ptr::null_mut(), &mut complete),
            PercolabStatus::InvalidArgument
        );
        percolab_graph_free(g);
    }
}

#[test]
fn estimators_match_the_library() {
    let g = lattice(PercolabLattice::Box, 2, 2);
    let mut est = PercolabEstimate::default();
    unsafe {
        assert_eq!(
            percolab_estimate_success(g, 2, 0.5, 20_000, 3, &mut est),
            PercolabStatus::Ok
        );
    }
    let lib = percolab::estimator::estimate_success(
        &percolab::build_lattice(percolab::LatticeKind::Box, 2, 2).unwrap(),
        2,
        0.5,
        &percolab::estimator::McParams::new(20_000, 3),
    )
    .unwrap();
    assert_eq!(est.mean, lib.mean);
    assert_eq!(est.ci_half_width, lib.ci_half_width);
    assert!((est.mean - 7.0 / 16.0).abs() <= 4.0 * est.ci_half_width);

    let mut inf = PercolabEstimate::default();
    let mut pc = PercolabPcResult::default();
    unsafe {
        assert_eq!(
            percolab_estimate_influence(g, 2, 0.5, 0, 20_000, 3, &mut inf),
            PercolabStatus::Ok
        );
        assert_eq!(
            percolab_estimate_pc(g, 2, 0.5, 1e-3, 2_000, 3, &mut pc),
            PercolabStatus::Ok
        );
        percolab_graph_free(g);
    }
    assert!((inf.mean - 3.0 / 8.0).abs() <= 4.0 * inf.ci_half_width);
    assert!(pc.p_hi - pc.p_lo <= 1e-3);
    assert!((pc.p_c_hat - (1.0 - 0.5f64.sqrt()).sqrt()).abs() < 5e-3);
}

#[test]
fn tree_critical_point() {
    let (mut y, mut p) = (0.0, 0.0);
    unsafe {
        assert_eq!(percolab_p_star(4, 2, &mut y, &mut p), PercolabStatus::Ok);
        assert!((y - 0.75).abs() < 1e-10 && (p - 1.0 / 9.0).abs() < 1e-10);
        assert_eq!(percolab_p_star(5, 4, &mut y, &mut p), PercolabStatus::Ok);
        assert!(y.is_nan());
        assert!((p - 0.75).abs() < 1e-12);
        assert_eq!(percolab_p_star(2, 2, &mut y, &mut p), PercolabStatus::InvalidArgument);
    }
}

#[test]
fn version_string() {
    let v = unsafe { CStr::from_ptr(percolab_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

fn header_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("include")
}

const C_PROGRAM: &str = r#"
#include <math.h>
#include <stdio.h>
#include "percolab.h"

int main(void) {
    PercolabGraph *g = NULL;
    if (percolab_graph_lattice(PERCOLAB_LATTICE_BOX, 2, 2, &g) != PERCOLAB_STATUS_OK) return 1;
    unsigned char init[4] = {1, 0, 0, 1};
    bool complete = false;
    if (percolab_closure(g, 2, init, 4, NULL, &complete) != PERCOLAB_STATUS_OK || !complete) return 2;
    PercolabEstimate est;
    if (percolab_estimate_success(g, 2, 0.5, 10000, 1, &est) != PERCOLAB_STATUS_OK) return 3;
    if (fabs(est.mean - 0.4375) > 4.0 * est.ci_half_width) return 4;
    percolab_graph_free(g);
    if (percolab_graph_lattice(PERCOLAB_LATTICE_TORUS, 1, 2, &g) != PERCOLAB_STATUS_INVALID_ARGUMENT) return 5;
    if (percolab_last_error() == NULL) return 6;
    printf("ok %s\n", percolab_version());
    return 0;
}
"#;

fn have_cc() -> bool {
    Command::new("cc")
        .arg("--version")
        .output()
        .is_ok_and(|o| o.status.success())
}

#[test]
fn header_compiles_as_c_and_cpp() {
    if !have_cc() {
        eprintln!("cc not available; skipping header check");
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("check.c");
    std::fs::write(&src, C_PROGRAM).unwrap();
    for lang in ["c", "c++"] {
        let status = Command::new("cc")
            .args(["-x", lang, "-fsyntax-only", "-Wall", "-Werror", "-I"])
            .arg(header_dir())
            .arg(&src)
            .status()
            .unwrap();
        assert!(status.success(), "header does not compile as {lang}");
    }
}

#[test]
fn c_program_links_against_the_static_library() {
    // target/<profile>/deps/<this test> -> target/<profile>
    let profile_dir = std::env::current_exe()
        .unwrap()
        .parent()
        .unwrap()
        .parent()
        .unwrap()
        .to_path_buf();
    let lib = profile_dir.join("libpercolab_ffi.a");
    if !have_cc() || !lib.exists() {
        eprintln!("cc or {} not available; skipping link check", lib.display());
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("main.c");
    let exe = dir.path().join("main");
    std::fs::write(&src, C_PROGRAM).unwrap();
    let status = Command::new("cc")
        .arg("-I")
        .arg(header_dir())
        .arg(&src)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success(), "linking failed");
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "C program exited with {:?}", out.status);
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("ok "));
}
