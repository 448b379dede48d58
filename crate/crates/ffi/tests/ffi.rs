use covqec_ffi::*;
use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

#[test]
fn sample_report_and_free() {
    let mut code = ptr::null_mut();
    unsafe {
        assert_eq!(covqec_u1_code_sample(5, 1, 2, 3, &mut code), CovqecStatus::Ok);
        let mut report = CovqecErrorReport::default();
        assert_eq!(covqec_u1_code_errors(code, 1, &mut report), CovqecStatus::Ok);
        assert!(report.triangle_holds());
        covqec_u1_code_free(code);
        covqec_u1_code_free(ptr::null_mut());
    }
}

trait Triangle {
    fn triangle_holds(&self) -> bool;
}

impl Triangle for CovqecErrorReport {
    fn triangle_holds(&self) -> bool {
        self.eps_choi_upper <= self.decoupling_term + self.symmetry_term + 1e-10
    }
}

#[test]
fn errors_set_status_and_message() {
    let mut code = ptr::null_mut();
    unsafe {
        assert_eq!(covqec_u1_code_sample(3, 2, 2, 0, &mut code), CovqecStatus::InvalidArgument);
        assert!(code.is_null());
        let msg = CStr::from_ptr(covqec_last_error()).to_str().unwrap();
        assert!(msg.contains("exceeds"), "{msg}");
        assert_eq!(covqec_u1_code_sample(3, 1, 1, 0, ptr::null_mut()), CovqecStatus::NullPointer);
        let mut out = 0.0;
        assert_eq!(covqec_u1_worst_symmetry_term(1, 1, 1, 1, &mut out), CovqecStatus::InvalidArgument);
        let mut s = ptr::null_mut();
        assert_eq!(covqec_schur_new(40, 2, &mut s), CovqecStatus::DimensionCap);
        let bad = CString::new("/nonexistent/dir/code.bin").unwrap();
        assert_eq!(covqec_u1_code_load(bad.as_ptr(), &mut code), CovqecStatus::Io);
    }
}

#[test]
fn save_load_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = CString::new(dir.path().join("c.bin").to_str().unwrap()).unwrap();
    let (mut a, mut b) = (ptr::null_mut(), ptr::null_mut());
    unsafe {
        assert_eq!(covqec_u1_code_sample(5, 2, 1, 11, &mut a), CovqecStatus::Ok);
        assert_eq!(covqec_u1_code_save(a, path.as_ptr()), CovqecStatus::Ok);
        assert_eq!(covqec_u1_code_load(path.as_ptr(), &mut b), CovqecStatus::Ok);
        let (mut ra, mut rb) = (CovqecErrorReport::default(), CovqecErrorReport::default());
        covqec_u1_code_errors(a, 2, &mut ra);
        covqec_u1_code_errors(b, 2, &mut rb);
        assert_eq!(ra, rb);
        covqec_u1_code_free(a);
        covqec_u1_code_free(b);
    }
}

#[test]
fn closed_forms() {
    unsafe {
        let mut sym = CovqecSymmetryTerm::default();
        assert_eq!(covqec_u1_choi_symmetry_term(10_000, 1, 1, 5_000, &mut sym), CovqecStatus::Ok);
        assert!((sym.purified * 20_000.0 - 1.0).abs() < 0.05);
        let (mut lo, mut hi) = (0.0, 0.0);
        assert_eq!(covqec_u1_hmin_bounds(10, 1, 1, 5, &mut lo, &mut hi), CovqecStatus::Ok);
        assert!(lo < hi && lo > 0.0);
        let re = [0.25, 0.0, 0.0, 0.0, 0.0, 0.25, 0.0, 0.0, 0.0, 0.0, 0.25, 0.0, 0.0, 0.0, 0.0, 0.25];
        let im = [0.0; 16];
        let mut h = 0.0;
        assert_eq!(covqec_hmin_sdp(re.as_ptr(), im.as_ptr(), 2, 2, &mut h), CovqecStatus::Ok);
        assert!((h - 1.0).abs() < 1e-6);
        assert!(CStr::from_ptr(covqec_version()).to_str().unwrap().starts_with("0."));
    }
}

#[test]
fn header_declares_every_export() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/covqec.h")).unwrap();
    for name in [
        "covqec_last_error",
        "covqec_version",
        "covqec_u1_code_sample",
        "covqec_u1_code_free",
        "covqec_u1_code_errors",
        "covqec_u1_code_save",
        "covqec_u1_code_load",
        "covqec_u1_choi_symmetry_term",
        "covqec_u1_worst_symmetry_term",
        "covqec_u1_hmin_bounds",
        "covqec_hmin_sdp",
        "covqec_schur_new",
        "covqec_schur_free",
        "covqec_schur_block_count",
        "covqec_schur_block_dims",
        "typedef struct CovqecU1Code CovqecU1Code",
    ] {
        assert!(header.contains(name), "header lacks {name}");
    }
}

/// Compiles the C smoke test against the static library when a C compiler
/// is available.
#[test]
fn c_program_links_and_runs() {
    let profile_dir = std::env::current_exe().unwrap().parent().unwrap().parent().unwrap().to_path_buf();
    let lib = profile_dir.join("libcovqec_ffi.a");
    if !lib.exists() || Command::new("cc").arg("--version").output().is_err() {
        eprintln!("skipping: no static library or C compiler");
        return;
    }
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let dir = tempfile::tempdir().unwrap();
    let exe = dir.path().join("smoke");
    let status = Command::new("cc")
        .arg(manifest.join("tests/smoke.c"))
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success());
    let out = Command::new(&exe).arg(dir.path().join("code.bin")).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("ok "));
}
