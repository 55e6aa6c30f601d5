use std::ffi::{CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use coded_pir::construct::example2_code;
use coded_pir_ffi::*;

fn last_error() -> String {
    let p = cp_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn builtin_code_round_trip() {
    let mut code = ptr::null_mut();
    assert_eq!(unsafe { cp_code_builtin(0, &mut code) }, CpStatus::Ok);
    let (mut m, mut rows, mut parts, mut k, mut q) = (0, 0, 0, 0, 0);
    assert_eq!(unsafe { cp_code_params(code, &mut m, &mut rows, &mut parts, &mut k, &mut q) }, CpStatus::Ok);
    assert_eq!((m, rows, parts, k, q), (8, 1, 4, 3, 2));
    let symbols: Vec<u8> = (0..32).map(|i| (i * 7 % 5 % 2) as u8).collect();
    let mut store = ptr::null_mut();
    assert_eq!(unsafe { cp_store_new(code, symbols.as_ptr(), symbols.len(), &mut store) }, CpStatus::Ok);
    for (i, &x) in symbols.iter().enumerate() {
        let (mut v, mut up, mut down) = (9u8, 0, 0);
        assert_eq!(unsafe { cp_retrieve(store, 0, i, i as u64, &mut v, &mut up, &mut down) }, CpStatus::Ok);
        assert_eq!((v, up, down), (x, 64, 8));
    }
    let mut v = 0;
    let st = unsafe { cp_retrieve(store, 0, 32, 1, &mut v, ptr::null_mut(), ptr::null_mut()) };
    assert_eq!(st, CpStatus::OutOfRange);
    assert!(last_error().contains("32"));
    unsafe {
        cp_store_free(store);
        cp_code_free(code);
    }
}

#[test]
fn json_and_errors() {
    let json = CString::new(example2_code().to_json().to_string_pretty()).unwrap();
    let mut code = ptr::null_mut();
    assert_eq!(unsafe { cp_code_from_json(json.as_ptr(), &mut code) }, CpStatus::Ok);
    unsafe { cp_code_free(code) };

    let mut tampered = example2_code().to_json();
    tampered.g[0][0] = 0;
    let bad = CString::new(tampered.to_string_pretty()).unwrap();
    assert_eq!(unsafe { cp_code_from_json(bad.as_ptr(), &mut code) }, CpStatus::Verification);
    let junk = CString::new("{").unwrap();
    assert_eq!(unsafe { cp_code_from_json(junk.as_ptr(), &mut code) }, CpStatus::InvalidArgument);
    assert_eq!(unsafe { cp_code_from_json(ptr::null(), &mut code) }, CpStatus::NullPointer);
    assert_eq!(unsafe { cp_code_builtin(9, &mut code) }, CpStatus::InvalidArgument);
    assert_eq!(unsafe { cp_code_builtin(0, ptr::null_mut()) }, CpStatus::NullPointer);

    let (mut lo, mut hi) = (0, 0);
    assert_eq!(unsafe { cp_bounds_cell(3, 8, &mut lo, &mut hi) }, CpStatus::Ok);
    assert_eq!((lo, hi), (14, 14));
    assert_eq!(unsafe { cp_bounds_cell(0, 8, &mut lo, &mut hi) }, CpStatus::OutOfRange);
    let v = unsafe { CStr::from_ptr(cp_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn array_code_through_the_abi() {
    let mut code = ptr::null_mut();
    assert_eq!(unsafe { cp_code_builtin(2, &mut code) }, CpStatus::Ok);
    let (mut m, mut rows, mut parts, mut k) = (0, 0, 0, 0);
    let st = unsafe { cp_code_params(code, &mut m, &mut rows, &mut parts, &mut k, ptr::null_mut()) };
    assert_eq!((st, m, rows, parts, k), (CpStatus::Ok, 25, 2, 6, 15));
    let symbols: Vec<u8> = (0..24).map(|i| (i % 3 == 0) as u8).collect();
    let mut store = ptr::null_mut();
    assert_eq!(unsafe { cp_store_new(code, symbols.as_ptr(), symbols.len(), &mut store) }, CpStatus::Ok);
    for (i, &x) in symbols.iter().enumerate() {
        let mut v = 0;
        let st = unsafe { cp_retrieve(store, 0, i, 5, &mut v, ptr::null_mut(), ptr::null_mut()) };
        assert_eq!((st, v), (CpStatus::Ok, x));
    }
    unsafe {
        cp_store_free(store);
        cp_code_free(code);
    }
}

fn target_dir() -> PathBuf {
    let exe = std::env::current_exe().unwrap();
    exe.parent().and_then(Path::parent).unwrap().to_path_buf()
}

#[test]
fn c_program_links_against_the_static_library() {
    let dir = env!("CARGO_MANIFEST_DIR");
    let header = Path::new(dir).join("include/coded_pir.h");
    assert!(header.exists(), "header generated by the build script");
    let lib = target_dir().join("libcoded_pir_ffi.a");
    if !lib.exists() || Command::new("cc").arg("--version").output().is_err() {
        eprintln!("skipping: no C compiler or static library");
        return;
    }
    let tmp = tempfile::tempdir().unwrap();
    let src = tmp.path().join("main.c");
    std::fs::write(
        &src,
        r#"#include <stdio.h>
#include "coded_pir.h"
int main(void) {
    CpCode *code = NULL;
    CpStore *store = NULL;
    uint8_t data[16] = {1,0,1,1, 0,0,1,0, 1,1,1,0, 0,1,0,1};
    if (cp_code_builtin(0, &code) != CpStatus_Ok) return 1;
    if (cp_store_new(code, data, 16, &store) != CpStatus_Ok) return 2;
    for (size_t i = 0; i < 16; i++) {
        uint8_t v = 7;
        uint64_t up = 0, down = 0;
        if (cp_retrieve(store, 0, i, i, &v, &up, &down) != CpStatus_Ok) return 3;
        if (v != data[i] || up != 32 || down != 8) return 4;
    }
    if (cp_retrieve(store, 0, 99, 0, NULL, NULL, NULL) != CpStatus_NullPointer) return 5;
    printf("%s\n", cp_last_error());
    cp_store_free(store);
    cp_code_free(code);
    return 0;
}
"#,
    )
    .unwrap();
    let bin = tmp.path().join("main");
    let status = Command::new("cc")
        .arg(&src)
        .arg("-I")
        .arg(header.parent().unwrap())
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .unwrap();
    assert!(status.success());
    let out = Command::new(&bin).output().unwrap();
    assert!(out.status.success(), "exit {:?}", out.status.code());
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "null pointer argument");
}
