use std::ffi::CStr;
use std::path::Path;
use std::process::Command;
use std::ptr;

use mbcl_ffi::*;

fn last_error() -> String {
    let mut buf = vec![0 as std::ffi::c_char; 256];
    let n = unsafe { mbcl_last_error_message(buf.as_mut_ptr(), buf.len()) };
    let s = unsafe { CStr::from_ptr(buf.as_ptr()) }.to_string_lossy().into_owned();
    assert_eq!(s.len(), n);
    s
}

fn layout(n: usize, num: i64, den: i64) -> *mut MbclLayout {
    let mut out = ptr::null_mut();
    let st = unsafe { mbcl_layout_new(n, MbclRational { num, den }, 20.0, &mut out) };
    assert_eq!(st, MbclStatus::Ok);
    out
}

#[test]
fn version_is_crate_version() {
    let v = unsafe { CStr::from_ptr(mbcl_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn layout_round_trip() {
    let l = layout(10, 1, 1);
    unsafe {
        assert_eq!(mbcl_layout_barrier_count(l), 10);
        let mut w = [0.0; 4];
        assert_eq!(mbcl_layout_widths(l, w.as_mut_ptr()), MbclStatus::Ok);
        assert!((w[0] + w[1] - 20.0).abs() < 1e-12);
        assert!((10.0 * w[2] - w[0]).abs() < 1e-12);
        assert!((9.0 * w[3] - w[1]).abs() < 1e-12);
        let (mut s, mut e) = (0.0, 0.0);
        assert_eq!(mbcl_layout_interval(l, 0, &mut s, &mut e), MbclStatus::Ok);
        assert_eq!(s, -10.0);
        assert_eq!(mbcl_layout_potential_at(l, 0.5 * (s + e), 2.0), 2.0);
        assert_eq!(mbcl_layout_interval(l, 10, &mut s, &mut e), MbclStatus::InvalidArgument);
        assert!(last_error().contains("out of range"));
        assert_eq!(mbcl_layout_potential_at(ptr::null(), 0.1, 2.0), 0.0);
        mbcl_layout_free(l);
        mbcl_layout_free(ptr::null_mut());
    }
}

#[test]
fn bad_arguments_set_status_and_message() {
    let mut out = ptr::null_mut();
    let st = unsafe { mbcl_layout_new(1, MbclRational { num: 1, den: 1 }, 20.0, &mut out) };
    assert_eq!(st, MbclStatus::InvalidArgument);
    assert!(out.is_null());
    assert!(mbcl_last_error_length() > 0);
    assert!(!last_error().is_empty());

    let st = unsafe { mbcl_layout_new(4, MbclRational { num: 1, den: 0 }, 20.0, &mut out) };
    assert_eq!(st, MbclStatus::InvalidArgument);
    assert!(last_error().contains("denominator"));

    let st = unsafe { mbcl_layout_new(4, MbclRational { num: 1, den: 1 }, 20.0, ptr::null_mut()) };
    assert_eq!(st, MbclStatus::NullPointer);

    // A successful call clears the message.
    let l = layout(4, 1, 1);
    assert_eq!(mbcl_last_error_length(), 0);
    unsafe { mbcl_layout_free(l) };
}

#[test]
fn scattering_conserves_flux() {
    let l = layout(6, 1, 2);
    let (mut t, mut r) = (0.0, 0.0);
    for e in [0.3, 1.0, 2.5, 7.0] {
        assert_eq!(unsafe { mbcl_scatter(l, e, 2.0, &mut t, &mut r) }, MbclStatus::Ok);
        assert!((t + r - 1.0).abs() < 1e-9, "E={e}: T+R={}", t + r);
    }
    unsafe { mbcl_layout_free(l) };
}

#[test]
fn record_matches_core() {
    let mut p = std::mem::MaybeUninit::<MbclPhysics>::uninit();
    assert_eq!(unsafe { mbcl_physics_default(p.as_mut_ptr()) }, MbclStatus::Ok);
    let mut p = unsafe { p.assume_init() };
    p.t_final = MbclRational { num: 1, den: 5 };

    let mut rec = ptr::null_mut();
    let c = MbclRational { num: 1, den: 1 };
    assert_eq!(unsafe { mbcl_record_compute(6, c, &p, &mut rec) }, MbclStatus::Ok);
    let (mut alpha, mut beta, mut order) = ([0.0; 3], [0.0; 2], 0usize);
    unsafe {
        assert_eq!(mbcl_record_matrix(rec, alpha.as_mut_ptr(), beta.as_mut_ptr(), &mut order), MbclStatus::Ok);
        assert!(order <= 3);
        assert_eq!(mbcl_record_correlation(rec), alpha[2]);
        let fp = CStr::from_ptr(mbcl_record_fingerprint(rec)).to_str().unwrap().to_string();
        assert_eq!(fp.len(), 64);

        let mut again = ptr::null_mut();
        assert_eq!(mbcl_record_compute(6, c, &p, &mut again), MbclStatus::Ok);
        assert_eq!(mbcl_record_correlation(again).to_bits(), alpha[2].to_bits());
        assert_eq!(CStr::from_ptr(mbcl_record_fingerprint(again)).to_str().unwrap(), fp);
        mbcl_record_free(again);
        mbcl_record_free(rec);
        assert!(mbcl_record_correlation(ptr::null()).is_nan());
        assert!(mbcl_record_fingerprint(ptr::null()).is_null());
    }
}

#[test]
fn free_ring_levels() {
    let l = layout(4, 1, 1);
    let radius = 200.0;
    let mut set = ptr::null_mut();
    unsafe {
        let st = mbcl_levels_find(l, 0.0, 0.0, 0.1, radius, 32, &mut set);
        assert_eq!(st, MbclStatus::Ok, "{}", last_error());
        let n = mbcl_levels_count(set);
        assert!(n > 0);
        let mut small = vec![0.0; n - 1];
        assert_eq!(mbcl_levels_energies(set, small.as_mut_ptr(), small.len()), MbclStatus::BufferTooSmall);
        let mut buf = vec![0.0; n];
        assert_eq!(mbcl_levels_energies(set, buf.as_mut_ptr(), n), MbclStatus::Ok);
        assert!(buf.windows(2).all(|w| w[0] <= w[1]));
        let scale = (std::f64::consts::PI / radius).powi(2);
        for e in &buf {
            let m = (e / scale).sqrt();
            assert!((m - m.round()).abs() < 1e-6, "E={e} is not a free level");
        }
        mbcl_levels_free(set);
        mbcl_layout_free(l);
    }
}

#[test]
fn wigner_is_normalized() {
    let h = 1e-3;
    let sum: f64 = (0..20_000).map(|i| mbcl_wigner_pdf((i as f64 + 0.5) * h) * h).sum();
    assert!((sum - 1.0).abs() < 1e-6);
}

#[test]
fn header_declares_the_api() {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/mbcl.h");
    let text = std::fs::read_to_string(&path).unwrap();
    for name in [
        "MBCL_STATUS_OK",
        "MBCL_STATUS_BUFFER_TOO_SMALL",
        "typedef struct MbclLayout MbclLayout",
        "mbcl_layout_new",
        "mbcl_record_compute",
        "mbcl_levels_energies",
        "mbcl_last_error_message",
        "mbcl_wigner_pdf",
    ] {
        assert!(text.contains(name), "header lacks {name}");
    }

    let Ok(out) = Command::new("cc").args(["-fsyntax-only", "-x", "c", "-std=c99"]).arg(&path).output() else {
        eprintln!("cc not found; skipping compile check");
        return;
    };
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}
