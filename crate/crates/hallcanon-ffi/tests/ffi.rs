use std::ffi::{CStr, CString};
use std::ptr;

use hallcanon_ffi::*;

unsafe fn take(s: *mut std::ffi::c_char) -> String {
    assert!(!s.is_null());
    let out = CStr::from_ptr(s).to_str().unwrap().to_string();
    hc_string_free(s);
    out
}

unsafe fn last_error() -> String {
    take(hc_last_error())
}

#[test]
fn rank_one_basis_round_trip() {
    unsafe {
        let mut b = ptr::null_mut();
        assert_eq!(hc_basis_new(1, 0, -2, &mut b), HcStatus::Ok);
        let mut n = 0usize;
        assert_eq!(hc_basis_len(b, &mut n), HcStatus::Ok);
        assert!(n > 0);
        let mut idx = Vec::new();
        for i in 0..n {
            let mut s = ptr::null_mut();
            assert_eq!(hc_basis_index(b, i, &mut s), HcStatus::Ok);
            idx.push(take(s));
        }
        let e0 = idx.iter().position(|s| s == "E[0]").expect("E[0] indexes an element");
        let mut s = ptr::null_mut();
        assert_eq!(hc_basis_element_json(b, e0, &mut s), HcStatus::Ok);
        let json: serde_json::Value = serde_json::from_str(&take(s)).unwrap();
        assert_eq!(json["class"], serde_json::json!([1, 0]));
        assert_eq!(json["window"], -2);
        assert_eq!(json["terms"].as_array().unwrap().len(), 3, "{json}");
        let mut s = ptr::null_mut();
        assert_eq!(hc_basis_index(b, n, &mut s), HcStatus::InvalidArgument);
        assert!(s.is_null());
        assert!(last_error().contains("out of range"));
        hc_basis_free(b);
    }
}

#[test]
fn invalid_and_unsupported_classes() {
    unsafe {
        let mut b = ptr::null_mut();
        assert_eq!(hc_basis_new(0, -1, 0, &mut b), HcStatus::InvalidArgument);
        assert!(b.is_null());
        assert_eq!(hc_basis_new(3, 0, 0, &mut b), HcStatus::Unsupported);
        assert!(last_error().contains("rank 3"));
        assert_eq!(hc_basis_new(1, 0, 0, ptr::null_mut()), HcStatus::NullPointer);
    }
}

#[test]
fn null_arguments_are_reported() {
    unsafe {
        let mut n = 0usize;
        assert_eq!(hc_basis_len(ptr::null(), &mut n), HcStatus::NullPointer);
        let mut out = 0u64;
        assert_eq!(hc_aut_count(2, ptr::null(), &mut out), HcStatus::NullPointer);
        hc_basis_free(ptr::null_mut());
        hc_string_free(ptr::null_mut());
    }
}

#[test]
fn oracle_counts() {
    unsafe {
        let (c, b, a) = (CString::new("O+O").unwrap(), CString::new("O(-1)").unwrap(), CString::new("O(1)").unwrap());
        let mut n = 0u64;
        assert_eq!(hc_hall_number(2, c.as_ptr(), b.as_ptr(), a.as_ptr(), &mut n), HcStatus::Ok);
        assert_eq!(n, 6);
        assert_eq!(hc_aut_count(2, c.as_ptr(), &mut n), HcStatus::Ok);
        assert_eq!(n, 6);
        let bad = CString::new("O(2)").unwrap();
        assert_eq!(hc_hall_number(2, c.as_ptr(), b.as_ptr(), bad.as_ptr(), &mut n), HcStatus::InvalidArgument);
        assert_eq!(hc_aut_count(6, c.as_ptr(), &mut n), HcStatus::InvalidArgument);
        assert!(!last_error().is_empty());
    }
}

#[test]
fn version_is_static() {
    let v = unsafe { CStr::from_ptr(hc_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_declares_every_export() {
    let h = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/hallcanon.h")).unwrap();
    for name in [
        "typedef struct HcBasis HcBasis",
        "HC_STATUS_OK = 0",
        "HC_STATUS_PANIC = 6",
        "hc_basis_new(",
        "hc_basis_free(",
        "hc_basis_len(",
        "hc_basis_index(",
        "hc_basis_element_json(",
        "hc_hall_number(",
        "hc_aut_count(",
        "hc_last_error(",
        "hc_string_free(",
        "hc_version(",
    ] {
        assert!(h.contains(name), "header lacks {name}");
    }
}
