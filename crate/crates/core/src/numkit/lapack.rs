//! Thin safe wrappers over the system LAPACK routines used by this crate.
//!
//! LAPACK expects column-major storage; the wrappers pack/unpack from the
//! row-major [`CMat`](super::CMat) layout.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

unsafe extern "C" {
    fn zgesvd_(
        jobu: *const u8,
        jobvt: *const u8,
        m: *const i32,
        n: *const i32,
        a: *mut C64,
        lda: *const i32,
        s: *mut f64,
        u: *mut C64,
        ldu: *const i32,
        vt: *mut C64,
        ldvt: *const i32,
        work: *mut C64,
        lwork: *const i32,
        rwork: *mut f64,
        info: *mut i32,
    );

    fn zgeev_(
        jobvl: *const u8,
        jobvr: *const u8,
        n: *const i32,
        a: *mut C64,
        lda: *const i32,
        w: *mut C64,
        vl: *mut C64,
        ldvl: *const i32,
        vr: *mut C64,
        ldvr: *const i32,
        work: *mut C64,
        lwork: *const i32,
        rwork: *mut f64,
        info: *mut i32,
    );

    fn zgelsd_(
        m: *const i32,
        n: *const i32,
        nrhs: *const i32,
        a: *mut C64,
        lda: *const i32,
        b: *mut C64,
        ldb: *const i32,
        s: *mut f64,
        rcond: *const f64,
        rank: *mut i32,
        work: *mut C64,
        lwork: *const i32,
        rwork: *mut f64,
        iwork: *mut i32,
        info: *mut i32,
    );
}

/// Full SVD. `a_rowmajor` is m x n; returns (u: m x m col of left vectors,
/// s: min(m,n) singular values, v: n x n right vectors as columns).
pub fn svd_full(a_rowmajor: &[C64], m: usize, n: usize) -> Result<(Vec<C64>, Vec<f64>, Vec<C64>)> {
    let mi = m as i32;
    let ni = n as i32;
    let mut a = to_col_major(a_rowmajor, m, n);
    let k = m.min(n);
    let mut s = vec![0f64; k];
    let mut u = vec![C64::new(0.0, 0.0); m * m];
    let mut vt = vec![C64::new(0.0, 0.0); n * n];
    let mut rwork = vec![0f64; 5 * k.max(1)];
    let mut info = 0i32;

    // workspace query
    let mut wkopt = [C64::new(0.0, 0.0)];
    let query = -1i32;
    unsafe {
        zgesvd_(
            b"A".as_ptr(),
            b"A".as_ptr(),
            &mi,
            &ni,
            a.as_mut_ptr(),
            &mi,
            s.as_mut_ptr(),
            u.as_mut_ptr(),
            &mi,
            vt.as_mut_ptr(),
            &ni,
            wkopt.as_mut_ptr(),
            &query,
            rwork.as_mut_ptr(),
            &mut info,
        );
    }
    if info != 0 {
        return Err(Error::Lapack { routine: "zgesvd(query)", info });
    }
    let lwork = wkopt[0].re as i32;
    let mut work = vec![C64::new(0.0, 0.0); lwork.max(1) as usize];
    unsafe {
        zgesvd_(
            b"A".as_ptr(),
            b"A".as_ptr(),
            &mi,
            &ni,
            a.as_mut_ptr(),
            &mi,
            s.as_mut_ptr(),
            u.as_mut_ptr(),
            &mi,
            vt.as_mut_ptr(),
            &ni,
            work.as_mut_ptr(),
            &lwork,
            rwork.as_mut_ptr(),
            &mut info,
        );
    }
    if info != 0 {
        return Err(Error::Lapack { routine: "zgesvd", info });
    }
    // u: col-major m x m -> row-major; vt holds V^H col-major n x n.
    // Right vectors as columns of V: V = (V^H)^H, so V[i][j] = conj(vt[j][i]).
    let u_rm = col_to_row_major(&u, m, m);
    let mut v_rm = vec![C64::new(0.0, 0.0); n * n];
    for i in 0..n {
        for j in 0..n {
            // vt col-major: vt[row=j, col=i] = vt[j + i*n]
            v_rm[i * n + j] = vt[j + i * n].conj();
        }
    }
    Ok((u_rm, s, v_rm))
}

/// Eigenvalues of a square complex matrix (no eigenvectors).
pub fn eigenvalues(a_rowmajor: &[C64], n: usize) -> Result<Vec<C64>> {
    if n == 0 {
        return Ok(Vec::new());
    }
    let ni = n as i32;
    let mut a = to_col_major(a_rowmajor, n, n);
    let mut w = vec![C64::new(0.0, 0.0); n];
    let mut rwork = vec![0f64; 2 * n];
    let mut info = 0i32;
    let ldv = 1i32;
    let mut wkopt = [C64::new(0.0, 0.0)];
    let query = -1i32;
    unsafe {
        zgeev_(
            b"N".as_ptr(),
            b"N".as_ptr(),
            &ni,
            a.as_mut_ptr(),
            &ni,
            w.as_mut_ptr(),
            std::ptr::null_mut(),
            &ldv,
            std::ptr::null_mut(),
            &ldv,
            wkopt.as_mut_ptr(),
            &query,
            rwork.as_mut_ptr(),
            &mut info,
        );
    }
    if info != 0 {
        return Err(Error::Lapack { routine: "zgeev(query)", info });
    }
    let lwork = wkopt[0].re as i32;
    let mut work = vec![C64::new(0.0, 0.0); lwork.max(1) as usize];
    unsafe {
        zgeev_(
            b"N".as_ptr(),
            b"N".as_ptr(),
            &ni,
            a.as_mut_ptr(),
            &ni,
            w.as_mut_ptr(),
            std::ptr::null_mut(),
            &ldv,
            std::ptr::null_mut(),
            &ldv,
            work.as_mut_ptr(),
            &lwork,
            rwork.as_mut_ptr(),
            &mut info,
        );
    }
    if info != 0 {
        return Err(Error::Lapack { routine: "zgeev", info });
    }
    Ok(w)
}

/// Minimum-norm least-squares solution via SVD (zgelsd).
/// Returns (solution, effective rank).
pub fn lstsq(a_rowmajor: &[C64], m: usize, n: usize, b: &[C64]) -> Result<(Vec<C64>, usize)> {
    let mi = m as i32;
    let ni = n as i32;
    let nrhs = 1i32;
    let mut a = to_col_major(a_rowmajor, m, n);
    let ldb = m.max(n) as i32;
    let mut bb = vec![C64::new(0.0, 0.0); ldb as usize];
    bb[..m].copy_from_slice(b);
    let mut s = vec![0f64; m.min(n).max(1)];
    let rcond = -1f64; // machine-precision rank cutoff
    let mut rank = 0i32;
    let mut info = 0i32;

    let mut wkopt = [C64::new(0.0, 0.0)];
    let mut rwopt = [0f64];
    let mut iwopt = [0i32];
    let query = -1i32;
    unsafe {
        zgelsd_(
            &mi,
            &ni,
            &nrhs,
            a.as_mut_ptr(),
            &mi,
            bb.as_mut_ptr(),
            &ldb,
            s.as_mut_ptr(),
            &rcond,
            &mut rank,
            wkopt.as_mut_ptr(),
            &query,
            rwopt.as_mut_ptr(),
            iwopt.as_mut_ptr(),
            &mut info,
        );
    }
    if info != 0 {
        return Err(Error::Lapack { routine: "zgelsd(query)", info });
    }
    let lwork = wkopt[0].re as i32;
    let mut work = vec![C64::new(0.0, 0.0); lwork.max(1) as usize];
    let mut rwork = vec![0f64; (rwopt[0] as usize).max(1)];
    let mut iwork = vec![0i32; (iwopt[0] as usize).max(1)];
    unsafe {
        zgelsd_(
            &mi,
            &ni,
            &nrhs,
            a.as_mut_ptr(),
            &mi,
            bb.as_mut_ptr(),
            &ldb,
            s.as_mut_ptr(),
            &rcond,
            &mut rank,
            work.as_mut_ptr(),
            &lwork,
            rwork.as_mut_ptr(),
            iwork.as_mut_ptr(),
            &mut info,
        );
    }
    if info != 0 {
        return Err(Error::Lapack { routine: "zgelsd", info });
    }
    Ok((bb[..n].to_vec(), rank as usize))
}

fn to_col_major(a: &[C64], m: usize, n: usize) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); m * n];
    for i in 0..m {
        for j in 0..n {
            out[j * m + i] = a[i * n + j];
        }
    }
    out
}

fn col_to_row_major(a: &[C64], m: usize, n: usize) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); m * n];
    for i in 0..m {
        for j in 0..n {
            out[i * n + j] = a[j * m + i];
        }
    }
    out
}
