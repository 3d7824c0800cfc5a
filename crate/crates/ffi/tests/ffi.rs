use std::ffi::{CStr, CString};
use std::ptr;

use fhn_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(fhn_last_error()) }.to_string_lossy().into_owned()
}

#[test]
fn regime_json_and_admits() {
    let mut s = ptr::null_mut();
    let st = unsafe { fhn_regime_json(0.45, 50.0, 1e-5, &mut s) };
    assert_eq!(st, FhnStatus::Ok);
    let text = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_owned();
    unsafe { fhn_string_free(s) };
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["regime"], "subcritical");
    let mut a = -1;
    assert_eq!(unsafe { fhn_regime_admits(0.45, 70.0, 1e-5, FhnWaveKind::ReversedFront, &mut a) }, FhnStatus::Ok);
    assert_eq!(a, 0);
    assert_eq!(unsafe { fhn_regime_admits(0.45, 50.0, 1e-5, FhnWaveKind::Front, &mut a) }, FhnStatus::Ok);
    assert_eq!(a, 1);
}

#[test]
fn errors_are_reported() {
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { fhn_regime_json(0.6, 50.0, 1e-5, &mut s) }, FhnStatus::InvalidInput);
    assert!(last_error().contains("0 < beta < 1/2"));
    assert!(s.is_null());
    assert_eq!(unsafe { fhn_regime_json(0.45, 50.0, 1e-5, ptr::null_mut()) }, FhnStatus::NullPointer);
    let mut w = ptr::null_mut();
    assert_eq!(unsafe { fhn_solve_wave(0.45, 50.0, 0.1, FhnWaveKind::Front, &mut w) }, FhnStatus::Inadmissible);
    assert!(w.is_null());
    let (mut c, mut k) = (0.0, 0.0);
    assert_eq!(unsafe { fhn_wave_speed(ptr::null(), &mut c, &mut k) }, FhnStatus::NullPointer);
    let dir = CString::new("/nonexistent/fhn").unwrap();
    assert_eq!(unsafe { fhn_wave_load(dir.as_ptr(), &mut w) }, FhnStatus::Io);
    unsafe {
        fhn_wave_free(ptr::null_mut());
        fhn_string_free(ptr::null_mut());
    }
    assert!(!unsafe { CStr::from_ptr(fhn_version()) }.to_bytes().is_empty());
}

#[test]
fn wave_handle_lifecycle() {
    let mut w = ptr::null_mut();
    let st = unsafe { fhn_solve_wave(0.45, 50.0, 1e-5, FhnWaveKind::ReversedFront, &mut w) };
    assert_eq!(st, FhnStatus::Ok, "{}", last_error());
    assert_eq!(last_error(), "");
    let (mut c, mut k) = (0.0, 0.0);
    assert_eq!(unsafe { fhn_wave_speed(w, &mut c, &mut k) }, FhnStatus::Ok);
    assert!(c > 0.0 && (k - 1e-5 * c * c).abs() < 1e-15);
    let mut n = 0usize;
    assert_eq!(unsafe { fhn_wave_len(w, &mut n) }, FhnStatus::Ok);
    let (mut z, mut u, mut v) = (vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    assert_eq!(unsafe { fhn_wave_profile(w, z.as_mut_ptr(), u.as_mut_ptr(), v.as_mut_ptr(), n - 1) }, FhnStatus::BufferTooSmall);
    assert_eq!(unsafe { fhn_wave_profile(w, z.as_mut_ptr(), u.as_mut_ptr(), v.as_mut_ptr(), n) }, FhnStatus::Ok);
    assert!(z.windows(2).all(|p| p[1] > p[0]));
    let mut js = ptr::null_mut();
    assert_eq!(unsafe { fhn_wave_report_json(w, &mut js) }, FhnStatus::Ok);
    let report: serde_json::Value = serde_json::from_str(unsafe { CStr::from_ptr(js) }.to_str().unwrap()).unwrap();
    unsafe { fhn_string_free(js) };
    assert_eq!(report["kind"], "reversed_front");
    assert_eq!(report["c"].as_f64().unwrap(), c);

    let dir = tempfile::tempdir().unwrap();
    let path = CString::new(dir.path().to_str().unwrap()).unwrap();
    assert_eq!(unsafe { fhn_wave_save(w, path.as_ptr()) }, FhnStatus::Ok);
    let mut back = ptr::null_mut();
    assert_eq!(unsafe { fhn_wave_load(path.as_ptr(), &mut back) }, FhnStatus::Ok);
    let (mut c2, mut k2) = (0.0, 0.0);
    assert_eq!(unsafe { fhn_wave_speed(back, &mut c2, &mut k2) }, FhnStatus::Ok);
    assert_eq!((c, k), (c2, k2));
    unsafe {
        fhn_wave_free(w);
        fhn_wave_free(back);
    }
}

#[test]
fn header_declares_the_api() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/../../include/fhn.h")).unwrap();
    for name in [
        "fhn_last_error",
        "fhn_regime_json",
        "fhn_solve_wave",
        "fhn_wave_free",
        "fhn_wave_profile",
        "fhn_simulate",
        "typedef struct FhnWave FhnWave",
        "FHN_STATUS_OK = 0",
    ] {
        assert!(header.contains(name), "missing {name}");
    }
}

#[test]
fn header_compiles_as_c() {
    let Ok(cc) = which_cc() else { return };
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("probe.c");
    std::fs::write(
        &src,
        "#include \"fhn.h\"\nint main(void) { FhnWave *w = NULL; void (*release)(FhnWave *) = fhn_wave_free; (void)w; (void)release; return (int)FHN_STATUS_OK; }\n",
    )
    .unwrap();
    let inc = concat!(env!("CARGO_MANIFEST_DIR"), "/../../include");
    let out = std::process::Command::new(cc).args(["-std=c99", "-fsyntax-only", "-Wall", "-Werror", "-I", inc]).arg(&src).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

fn which_cc() -> Result<&'static str, ()> {
    for cc in ["cc", "gcc", "clang"] {
        if std::process::Command::new(cc).arg("--version").output().is_ok() {
            return Ok(cc);
        }
    }
    Err(())
}

#[test]
fn c_program_links_and_runs() {
    let Ok(cc) = which_cc() else { return };
    let profile_dir = std::env::current_exe().unwrap().parent().unwrap().parent().unwrap().to_path_buf();
    // Tests link the rlib only, so refresh the static archive first.
    let Ok(cargo) = std::env::var("CARGO") else { return };
    let mut build = std::process::Command::new(cargo);
    build.args(["build", "--quiet", "-p", "fhn-ffi", "--lib"]);
    if profile_dir.ends_with("release") {
        build.arg("--release");
    }
    assert!(build.status().unwrap().success());
    let lib = profile_dir.join("libfhn_ffi.a");
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("main.c");
    std::fs::write(
        &src,
        r#"#include <stdio.h>
#include <string.h>
#include "fhn.h"
int main(void) {
    char *json = NULL;
    if (fhn_regime_json(0.45, 50.0, 1e-5, &json) != FHN_STATUS_OK) return 1;
    int ok = strstr(json, "subcritical") != NULL;
    fhn_string_free(json);
    if (fhn_regime_json(0.6, 50.0, 1e-5, &json) != FHN_STATUS_INVALID_INPUT) return 2;
    if (strlen(fhn_last_error()) == 0) return 3;
    printf("%s\n", fhn_version());
    return ok ? 0 : 4;
}
"#,
    )
    .unwrap();
    let exe = dir.path().join("probe");
    let inc = concat!(env!("CARGO_MANIFEST_DIR"), "/../../include");
    let out = std::process::Command::new(cc)
        .args(["-std=c99", "-I", inc])
        .arg(&src)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let run = std::process::Command::new(&exe).output().unwrap();
    assert_eq!(run.status.code(), Some(0), "{}", String::from_utf8_lossy(&run.stdout));
}
