use std::ffi::CStr;
use std::ptr;

use mopuc_ffi::*;

fn matrix(rows: usize, cols: usize, data: &[f64]) -> *mut MopucMatrix {
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { mopuc_matrix_new(rows, cols, data.as_ptr(), &mut out) }, MopucStatus::Ok);
    out
}

fn entries(m: *const MopucMatrix) -> Vec<f64> {
    let n = 2 * unsafe { mopuc_matrix_rows(m) * mopuc_matrix_cols(m) };
    let mut buf = vec![0.0; n];
    assert_eq!(unsafe { mopuc_matrix_copy(m, buf.as_mut_ptr(), n) }, MopucStatus::Ok);
    buf
}

fn last_error() -> String {
    let len = mopuc_last_error_length();
    let mut buf = vec![0 as std::ffi::c_char; len.max(1)];
    unsafe { mopuc_last_error_message(buf.as_mut_ptr(), buf.len()) };
    unsafe { CStr::from_ptr(buf.as_ptr()) }.to_string_lossy().into_owned()
}

#[test]
fn matrix_roundtrip_is_row_major() {
    let m = matrix(2, 3, &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0, 11.0, 12.0]);
    let (mut re, mut im) = (0.0, 0.0);
    assert_eq!(unsafe { mopuc_matrix_get(m, 1, 0, &mut re, &mut im) }, MopucStatus::Ok);
    assert_eq!((re, im), (7.0, 8.0));
    assert_eq!(entries(m)[10], 11.0);
    assert_eq!(unsafe { mopuc_matrix_get(m, 2, 0, &mut re, &mut im) }, MopucStatus::InvalidArgument);
    assert!(last_error().contains("outside"));
    unsafe { mopuc_matrix_free(m) };
}

#[test]
fn null_pointers_are_reported() {
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { mopuc_matrix_new(1, 1, ptr::null(), &mut out) }, MopucStatus::NullPointer);
    assert!(last_error().contains("null"));
    let mut r = 0.0;
    assert_eq!(unsafe { mopuc_rate_ball(ptr::null(), &mut r) }, MopucStatus::NullPointer);
    unsafe {
        mopuc_matrix_free(ptr::null_mut());
        mopuc_verblunsky_free(ptr::null_mut());
        mopuc_rng_free(ptr::null_mut());
    }
}

#[test]
fn seeded_sampling_is_reproducible() {
    let draw = || {
        let rng = mopuc_rng_new(5, 1);
        let mut u = ptr::null_mut();
        assert_eq!(unsafe { mopuc_sample_haar(rng, 4, &mut u) }, MopucStatus::Ok);
        let e = entries(u);
        unsafe {
            mopuc_matrix_free(u);
            mopuc_rng_free(rng);
        }
        e
    };
    let e = draw();
    assert_eq!(e, draw());
    // first column has unit norm
    let norm: f64 = (0..4).map(|i| e[8 * i].powi(2) + e[8 * i + 1].powi(2)).sum();
    assert!((norm - 1.0).abs() < 1e-12);
}

#[test]
fn corner_regime_is_checked() {
    let rng = mopuc_rng_new(1, 0);
    let mut v = ptr::null_mut();
    assert_eq!(unsafe { mopuc_sample_corner(rng, 4, 2, &mut v) }, MopucStatus::InvalidArgument);
    assert_eq!(unsafe { mopuc_sample_corner(rng, 9, 2, &mut v) }, MopucStatus::Ok);
    let mut d = 0.0;
    assert_eq!(unsafe { mopuc_corner_log_density(v, 9, 2, &mut d) }, MopucStatus::Ok);
    assert!(d.is_finite());
    unsafe {
        mopuc_matrix_free(v);
        mopuc_rng_free(rng);
    }
}

#[test]
fn extraction_methods_agree() {
    let rng = mopuc_rng_new(8, 0);
    let mut u = ptr::null_mut();
    assert_eq!(unsafe { mopuc_sample_haar(rng, 12, &mut u) }, MopucStatus::Ok);
    let (mut a, mut b) = (ptr::null_mut(), ptr::null_mut());
    assert_eq!(unsafe { mopuc_verblunsky_from_unitary(u, 3, 3, MopucMethod::Moments, &mut a) }, MopucStatus::Ok);
    assert_eq!(unsafe { mopuc_verblunsky_from_unitary(u, 3, 3, MopucMethod::Deflation, &mut b) }, MopucStatus::Ok);
    assert_eq!(unsafe { (mopuc_verblunsky_len(a), mopuc_verblunsky_dim(a)) }, (3, 3));
    for j in 0..3 {
        let (mut x, mut y) = (ptr::null_mut(), ptr::null_mut());
        unsafe {
            assert_eq!(mopuc_verblunsky_get(a, j, &mut x), MopucStatus::Ok);
            assert_eq!(mopuc_verblunsky_get(b, j, &mut y), MopucStatus::Ok);
        }
        let gap = entries(x).iter().zip(entries(y)).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
        assert!(gap < 1e-8, "j = {j}: {gap}");
        unsafe {
            mopuc_matrix_free(x);
            mopuc_matrix_free(y);
        }
    }
    let mut bad = ptr::null_mut();
    assert_eq!(unsafe { mopuc_verblunsky_from_unitary(u, 3, 4, MopucMethod::Deflation, &mut bad) }, MopucStatus::InvalidArgument);
    unsafe {
        mopuc_verblunsky_free(a);
        mopuc_verblunsky_free(b);
        mopuc_matrix_free(u);
        mopuc_rng_free(rng);
    }
}

#[test]
fn theta_ggt_and_rates() {
    let alpha = matrix(1, 1, &[0.6, 0.0]);
    let mut t = ptr::null_mut();
    assert_eq!(unsafe { mopuc_theta(alpha, &mut t) }, MopucStatus::Ok);
    // [[a^*, rho], [rho, -a]] with rho = 0.8, up to the placement of signs
    let e = entries(t);
    let moduli: Vec<f64> = e.chunks(2).map(|z| z[0].hypot(z[1])).collect();
    for (m, want) in moduli.iter().zip([0.6, 0.8, 0.8, 0.6]) {
        assert!((m - want).abs() < 1e-15);
    }

    let mut seq = ptr::null_mut();
    let handles = [alpha as *const MopucMatrix];
    assert_eq!(unsafe { mopuc_verblunsky_new(1, handles.as_ptr(), 1, &mut seq) }, MopucStatus::Ok);
    let mut g = ptr::null_mut();
    assert_eq!(unsafe { mopuc_ggt(seq, 3, &mut g) }, MopucStatus::Ok);
    assert_eq!(unsafe { (mopuc_matrix_rows(g), mopuc_matrix_cols(g)) }, (3, 3));

    let (mut r_ball, mut r_seq) = (0.0, 0.0);
    unsafe {
        assert_eq!(mopuc_rate_ball(alpha, &mut r_ball), MopucStatus::Ok);
        assert_eq!(mopuc_rate_seq(seq, &mut r_seq), MopucStatus::Ok);
    }
    assert!((r_ball + 0.64f64.ln()).abs() < 1e-15);
    assert_eq!(r_ball, r_seq);

    let edge = matrix(1, 1, &[0.0, 1.0]);
    let mut r = 0.0;
    assert_eq!(unsafe { mopuc_rate_ball(edge, &mut r) }, MopucStatus::Ok);
    assert_eq!(r, f64::INFINITY);
    let mut bad = ptr::null_mut();
    let edge_handles = [edge as *const MopucMatrix];
    assert_eq!(unsafe { mopuc_verblunsky_new(1, edge_handles.as_ptr(), 1, &mut bad) }, MopucStatus::Ok);
    let mut t_edge = ptr::null_mut();
    assert_eq!(unsafe { mopuc_theta(edge, &mut t_edge) }, MopucStatus::Ok);
    let outside = matrix(1, 1, &[1.5, 0.0]);
    let mut none = ptr::null_mut();
    assert_eq!(unsafe { mopuc_verblunsky_new(1, [outside as *const _].as_ptr(), 1, &mut none) }, MopucStatus::InvalidInput);

    unsafe {
        for m in [alpha, t, g, edge, outside, t_edge] {
            mopuc_matrix_free(m);
        }
        mopuc_verblunsky_free(seq);
        mopuc_verblunsky_free(bad);
    }
}

#[test]
fn errors_are_thread_local() {
    let mut r = 0.0;
    assert_eq!(unsafe { mopuc_rate_ball(ptr::null(), &mut r) }, MopucStatus::NullPointer);
    let other = std::thread::spawn(|| mopuc_last_error_length()).join().unwrap();
    assert_eq!(other, 0);
    assert!(mopuc_last_error_length() > 0);
}

#[test]
fn header_declares_the_api() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/mopuc.h")).unwrap();
    for name in [
        "typedef struct MopucMatrix MopucMatrix;",
        "typedef struct MopucVerblunsky MopucVerblunsky;",
        "MOPUC_STATUS_OK = 0",
        "MOPUC_METHOD_DEFLATION = 1",
        "mopuc_last_error_message(char *buf, size_t len)",
        "mopuc_matrix_new(",
        "mopuc_sample_haar(",
        "mopuc_verblunsky_from_unitary(",
        "mopuc_theta(",
        "mopuc_ggt(",
        "mopuc_rate_ball(",
        "mopuc_rate_seq(",
        "mopuc_corner_log_density(",
    ] {
        assert!(header.contains(name), "missing {name}");
    }
}
