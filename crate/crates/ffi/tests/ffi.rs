use std::ffi::{CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use bvstar_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(bvs_last_error_message()) }.to_string_lossy().into_owned()
}

#[test]
fn riemann_handle_round_trip() {
    let (ul, ur) = ([1.0, 0.0], [0.5, -(0.5f64).sqrt()]);
    let mut h = ptr::null_mut();
    let status = unsafe { bvs_riemann_solve(BvsFlux::PSystem, 1.0, 1.0, ul.as_ptr(), ur.as_ptr(), 2, &mut h) };
    assert_eq!(status, BvsStatus::Ok);
    unsafe {
        assert_eq!(bvs_riemann_dim(h), 2);
        assert_eq!(bvs_riemann_wave_count(h), 1);
        let mut w = BvsWaveInfo { kind: BvsWaveKind::Contact, family: 0, speed_lo: 0.0, speed_hi: 0.0 };
        assert_eq!(bvs_riemann_wave(h, 0, &mut w), BvsStatus::Ok);
        assert_eq!(w.kind, BvsWaveKind::Shock);
        assert_eq!(w.family, 1);
        assert!((w.speed_lo + 2f64.sqrt()).abs() < 1e-12);
        let mut u = [0.0; 2];
        assert_eq!(bvs_riemann_sample(h, 0.0, 1.0, u.as_mut_ptr(), 2), BvsStatus::Ok);
        assert_eq!(u, ur);
        assert_eq!(bvs_riemann_sample(h, 0.0, 1.0, u.as_mut_ptr(), 1), BvsStatus::InvalidArgument);
        bvs_riemann_free(h);
    }
}

#[test]
fn riemann_errors_map_to_codes() {
    let mut h = ptr::null_mut();
    let (ul, ur) = ([-1.0, 0.0], [1.0, 0.0]);
    let status = unsafe { bvs_riemann_solve(BvsFlux::PSystem, 1.0, 1.4, ul.as_ptr(), ur.as_ptr(), 2, &mut h) };
    assert_eq!(status, BvsStatus::Inadmissible);
    assert!(h.is_null());
    assert!(!last_error().is_empty());
    let status = unsafe { bvs_riemann_solve(BvsFlux::Burgers, 0.0, 0.0, ptr::null(), ur.as_ptr(), 1, &mut h) };
    assert_eq!(status, BvsStatus::NullPointer);
    let status = unsafe { bvs_riemann_solve(BvsFlux::PSystem, -1.0, 1.4, ul.as_ptr(), ur.as_ptr(), 2, &mut h) };
    assert_eq!(status, BvsStatus::Config);
    unsafe { bvs_riemann_free(ptr::null_mut()) };
}

#[test]
fn bv_handles() {
    let json = CString::new(r#"{"window": [0, 1], "pieces": [[0]], "cantor": {"lo": 0, "hi": 1}}"#).unwrap();
    let mut h = ptr::null_mut();
    unsafe {
        assert_eq!(bvs_bv_from_json(json.as_ptr(), &mut h), BvsStatus::Ok);
        let mut tv = 0.0;
        assert_eq!(bvs_bv_total_variation(h, &mut tv), BvsStatus::Ok);
        assert!((tv - 1.0).abs() < 1e-12);
        assert_eq!(bvs_bv_jump_count(h), 0);
        let mut v = 0.0;
        assert_eq!(bvs_bv_eval(h, 0.5, &mut v), BvsStatus::Ok);
        assert!((v - 0.5).abs() < 1e-12);
        bvs_bv_free(h);

        let (bps, coeffs, lens) = ([0.3], [0.0, 1.0, 2.0, 1.0], [2usize, 2]);
        assert_eq!(
            bvs_bv_from_monomials(0.0, 1.0, bps.as_ptr(), 1, coeffs.as_ptr(), lens.as_ptr(), &mut h),
            BvsStatus::Ok
        );
        let (mut x, mut s) = (0.0, 0.0);
        assert_eq!(bvs_bv_jump(h, 0, &mut x, &mut s), BvsStatus::Ok);
        assert_eq!(x, 0.3);
        assert!((s - 2.0).abs() < 1e-12);
        assert_eq!(bvs_bv_jump(h, 1, &mut x, &mut s), BvsStatus::OutOfRange);
        bvs_bv_free(h);

        let bad = [0.3, 0.2];
        let status = bvs_bv_from_monomials(0.0, 1.0, bad.as_ptr(), 2, coeffs.as_ptr(), [1usize, 1, 2].as_ptr(), &mut h);
        assert_eq!(status, BvsStatus::InvalidArgument);
        assert!(h.is_null());
    }
}

fn run(command: &str, config: &str, seed: i64) -> (BvsStatus, Option<String>) {
    let (c, j) = (CString::new(command).unwrap(), CString::new(config).unwrap());
    let mut out = ptr::null_mut();
    let status = unsafe { bvs_run_json(c.as_ptr(), j.as_ptr(), seed, &mut out) };
    let text = (!out.is_null()).then(|| {
        let s = unsafe { CStr::from_ptr(out) }.to_string_lossy().into_owned();
        unsafe { bvs_string_free(out) };
        s
    });
    (status, text)
}

#[test]
fn json_entry_point() {
    let shock = r#"{"name": "s", "flux": {"model": "burgers"}, "left": [1], "right": [0], "window": [-2, 2], "checks": ["rh_check", "entropy_check"]}"#;
    let (status, report) = run("verify", shock, 9);
    assert_eq!(status, BvsStatus::Ok);
    let report: serde_json::Value = serde_json::from_str(&report.unwrap()).unwrap();
    assert_eq!(report["seed"], 9);
    assert_eq!(report["overall_pass"], true);

    let reversed =
        shock.replace(r#""left": [1], "right": [0]"#, r#""left": [0], "right": [1], "solution": "forced_jump""#);
    let (status, report) = run("verify", &reversed, -1);
    assert_eq!(status, BvsStatus::CertificationFailed);
    assert!(report.unwrap().contains("\"overall_pass\": false"));

    let (status, report) = run("riemann", &shock.replace("burgers", "fooflux"), -1);
    assert_eq!(status, BvsStatus::Config);
    assert!(report.is_none());
    assert!(last_error().contains("fooflux"));

    let (status, report) = run("decompose", r#"{"window": [0, 1], "pieces": [[1]]}"#, -1);
    assert_eq!(status, BvsStatus::Ok);
    assert!(report.unwrap().contains("\"tv\": 0.0"));
    assert_eq!(run("plot", shock, -1).0, BvsStatus::InvalidArgument);
}

fn target_dir() -> PathBuf {
    let exe = std::env::current_exe().unwrap();
    exe.parent().and_then(Path::parent).unwrap().to_path_buf()
}

#[test]
fn c_program_links_against_static_library() {
    let manifest = Path::new(env!("CARGO_MANIFEST_DIR"));
    let lib = target_dir().join("libbvstar_ffi.a");
    assert!(lib.exists(), "{} missing", lib.display());
    let out_dir = tempfile::tempdir().unwrap();
    let exe = out_dir.path().join("smoke");
    let status = Command::new("cc")
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(manifest.join("tests/c/smoke.c"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success());
    let run = Command::new(&exe).output().unwrap();
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    assert!(String::from_utf8_lossy(&run.stdout).starts_with("ok 0.1.0"));
}
