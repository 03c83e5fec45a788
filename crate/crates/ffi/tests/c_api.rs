use std::ffi::{c_char, CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use shellcore::fixtures;
use shellcore_ffi::*;

fn c(text: &str) -> CString {
    CString::new(text).unwrap()
}

fn parse_system(text: &str) -> *mut ScSystem {
    let mut sys = ptr::null_mut();
    assert_eq!(
        unsafe { sc_system_parse(c(text).as_ptr(), &mut sys) },
        ScStatus::Ok
    );
    sys
}

#[test]
fn first_example_through_the_c_api() {
    let sys = parse_system(fixtures::TWO_STATE);
    let mut check = ScCheck::default();
    assert_eq!(
        unsafe { sc_system_check(sys, c("G p | F G q").as_ptr(), &mut check) },
        ScStatus::Ok
    );
    assert_eq!(
        (check.alpha_mask, check.state_mask, check.branchable),
        (0b11, 0b10, false)
    );
    assert_eq!(
        unsafe { sc_system_check(sys, c("p").as_ptr(), &mut check) },
        ScStatus::Ok
    );
    assert!(check.branchable && check.deterministic);
    assert_eq!(
        unsafe { sc_system_check(sys, c("p &").as_ptr(), &mut check) },
        ScStatus::Parse
    );
    unsafe { sc_system_free(sys) };
}

#[test]
fn system_queries() {
    let sys = parse_system(fixtures::TRAFFIC_LIGHT);
    let (mut states, mut added, mut injective, mut symmetric, mut kept) = (0, 0, false, true, 0);
    unsafe {
        assert_eq!(sc_system_size(sys, &mut states, &mut added), ScStatus::Ok);
        assert_eq!(
            sc_system_properties(sys, &mut injective, &mut symmetric),
            ScStatus::Ok
        );
        assert_eq!(sc_system_core_next_count(sys, 12, &mut kept), ScStatus::Ok);
        assert_eq!(sc_system_core_next_count(sys, 2, &mut kept), ScStatus::Cap);
        sc_system_free(sys);
    }
    assert_eq!(
        (states, added, injective, symmetric, kept),
        (3, 0, true, false, 8)
    );

    let one_way = parse_system(fixtures::ONE_WAY);
    unsafe {
        assert_eq!(
            sc_system_size(one_way, &mut states, &mut added),
            ScStatus::Ok
        );
        sc_system_free(one_way);
    }
    assert!(added > 0);
}

#[test]
fn shells_and_cores_through_the_c_api() {
    let mut lat = ptr::null_mut();
    assert_eq!(
        unsafe { sc_lattice_parse(c(fixtures::SIGN_PLUS).as_ptr(), &mut lat) },
        ScStatus::Ok
    );
    let mut out: *mut c_char = ptr::null_mut();
    let status = unsafe {
        sc_lattice_shellcore(
            lat,
            c("Sign+").as_ptr(),
            c("sq").as_ptr(),
            ScMode::Core,
            &mut out,
        )
    };
    assert_eq!(status, ScStatus::Ok);
    assert_eq!(unsafe { CStr::from_ptr(out) }.to_str().unwrap(), "Sign");
    unsafe { sc_string_free(out) };
    let status = unsafe {
        sc_lattice_shellcore(
            lat,
            c("Nope").as_ptr(),
            c("sq").as_ptr(),
            ScMode::Shell,
            &mut out,
        )
    };
    assert_eq!(status, ScStatus::Parse);
    assert!(out.is_null());
    assert!(unsafe { CStr::from_ptr(sc_last_error()) }
        .to_str()
        .unwrap()
        .contains("Nope"));
    unsafe { sc_lattice_free(lat) };
}

#[test]
fn header_compiles_as_c() {
    let include: PathBuf = [env!("CARGO_MANIFEST_DIR"), "include"].iter().collect();
    let header = include.join("shellcore.h");
    let text = std::fs::read_to_string(&header).expect("header is generated by the build script");
    for name in [
        "sc_system_parse",
        "sc_system_check",
        "sc_lattice_shellcore",
        "SC_STATUS_CAP = 5",
    ] {
        assert!(text.contains(name), "{name} missing from the header");
    }
    let Ok(status) = Command::new("cc")
        .args(["-fsyntax-only", "-Wall", "-Werror", "-x", "c", "-"])
        .arg(format!("-I{}", include.display()))
        .stdin(std::process::Stdio::piped())
        .spawn()
        .and_then(|mut child| {
            use std::io::Write;
            child.stdin.take().expect("piped").write_all(
                b"#include \"shellcore.h\"\nint main(void) { return SC_STATUS_OK; }\n",
            )?;
            child.wait()
        })
    else {
        eprintln!("no C compiler found; skipping the compile check");
        return;
    };
    assert!(status.success());
}
