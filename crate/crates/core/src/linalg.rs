//! Thin safe wrappers over the system LAPACK for the dense kernels used here:
//! Hermitian eigendecomposition, general complex inversion, singular values,
//! and eigenvalues of real non-symmetric matrices.
//!
//! All wrappers copy into column-major scratch buffers; matrices stay small
//! enough at desk scale (side <= ~8000) that the O(n^2) copies are noise next
//! to the O(n^3) factorizations.

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

fn to_col_major(a: &Array2<C64>) -> Vec<C64> {
    let (rows, cols) = a.dim();
    let mut out = vec![C64::new(0.0, 0.0); rows * cols];
    for j in 0..cols {
        for i in 0..rows {
            out[j * rows + i] = a[[i, j]];
        }
    }
    out
}

fn to_col_major_f64(a: &Array2<f64>) -> Vec<f64> {
    let (rows, cols) = a.dim();
    let mut out = vec![0.0; rows * cols];
    for j in 0..cols {
        for i in 0..rows {
            out[j * rows + i] = a[[i, j]];
        }
    }
    out
}

// OpenBLAS factorizations use multi-MiB stack frames, which overflows the
// 2 MiB default test-thread stack; route anything nontrivial through a
// worker thread with a generous stack.
const INLINE_DIM_LIMIT: usize = 48;
const WORKER_STACK: usize = 256 * 1024 * 1024;

fn on_big_stack<T: Send>(dim: usize, f: impl FnOnce() -> T + Send) -> T {
    if dim <= INLINE_DIM_LIMIT {
        return f();
    }
    std::thread::scope(|scope| {
        std::thread::Builder::new()
            .stack_size(WORKER_STACK)
            .spawn_scoped(scope, f)
            .expect("spawn lapack worker")
            .join()
            .expect("lapack worker panicked")
    })
}

fn square_dim(a: &Array2<C64>) -> Result<usize> {
    let (rows, cols) = a.dim();
    if rows != cols {
        return Err(Error::InvalidParameter(format!(
            "expected square matrix, got {rows}x{cols}"
        )));
    }
    Ok(rows)
}

/// Eigenvalues of a Hermitian matrix, ascending. The strict lower triangle is
/// taken as authoritative (LAPACK `uplo = 'L'`).
pub fn hermitian_eigenvalues(a: &Array2<C64>) -> Result<Vec<f64>> {
    hermitian_eig_impl(a, false).map(|(w, _)| w)
}

/// Full Hermitian eigendecomposition; eigenvectors are returned as the
/// columns of the second component.
pub fn hermitian_eigen(a: &Array2<C64>) -> Result<(Vec<f64>, Array2<C64>)> {
    let (w, v) = hermitian_eig_impl(a, true)?;
    Ok((w, v.expect("vectors requested")))
}

fn hermitian_eig_impl(a: &Array2<C64>, vectors: bool) -> Result<(Vec<f64>, Option<Array2<C64>>)> {
    let n = square_dim(a)?;
    if n == 0 {
        return Err(Error::InvalidParameter("empty matrix".into()));
    }
    let buf = to_col_major(a);
    on_big_stack(n, move || hermitian_eig_lapack(n, buf, vectors))
}

fn hermitian_eig_lapack(
    n: usize,
    mut buf: Vec<C64>,
    vectors: bool,
) -> Result<(Vec<f64>, Option<Array2<C64>>)> {
    let mut w = vec![0.0f64; n];
    let jobz = if vectors { b'V' } else { b'N' } as i8;
    let uplo = b'L' as i8;
    let n_i = n as i32;
    let mut info = 0i32;

    // workspace query
    let mut work_q = C64::new(0.0, 0.0);
    let mut rwork_q = 0.0f64;
    let mut iwork_q = 0i32;
    unsafe {
        lapack_sys::zheevd_(
            &jobz,
            &uplo,
            &n_i,
            buf.as_mut_ptr().cast(),
            &n_i,
            w.as_mut_ptr(),
            (&mut work_q as *mut C64).cast(),
            &(-1),
            &mut rwork_q,
            &(-1),
            &mut iwork_q,
            &(-1),
            &mut info,
        );
    }
    if info != 0 {
        return Err(Error::Lapack { routine: "zheevd (query)", info });
    }
    let lwork = work_q.re as i32;
    let lrwork = rwork_q as i32;
    let liwork = iwork_q;
    let mut work = vec![C64::new(0.0, 0.0); lwork.max(1) as usize];
    let mut rwork = vec![0.0f64; lrwork.max(1) as usize];
    let mut iwork = vec![0i32; liwork.max(1) as usize];
    unsafe {
        lapack_sys::zheevd_(
            &jobz,
            &uplo,
            &n_i,
            buf.as_mut_ptr().cast(),
            &n_i,
            w.as_mut_ptr(),
            work.as_mut_ptr().cast(),
            &lwork,
            rwork.as_mut_ptr(),
            &lrwork,
            iwork.as_mut_ptr(),
            &liwork,
            &mut info,
        );
    }
    if info != 0 {
        return Err(Error::EigFailure { info });
    }
    let vecs = vectors.then(|| {
        Array2::from_shape_fn((n, n), |(i, k)| buf[k * n + i])
    });
    Ok((w, vecs))
}

/// Inverse of a general complex matrix via LU (`zgetrf` + `zgetri`).
pub fn invert(a: &Array2<C64>) -> Result<Array2<C64>> {
    let n = square_dim(a)?;
    if n == 0 {
        return Err(Error::InvalidParameter("empty matrix".into()));
    }
    let buf = to_col_major(a);
    on_big_stack(n, move || invert_lapack(n, buf))
}

fn invert_lapack(n: usize, mut buf: Vec<C64>) -> Result<Array2<C64>> {
    let n_i = n as i32;
    let mut ipiv = vec![0i32; n];
    let mut info = 0i32;
    unsafe {
        lapack_sys::zgetrf_(&n_i, &n_i, buf.as_mut_ptr().cast(), &n_i, ipiv.as_mut_ptr(), &mut info);
    }
    if info > 0 {
        return Err(Error::SingularMatrix);
    }
    if info < 0 {
        return Err(Error::Lapack { routine: "zgetrf", info });
    }
    let mut work_q = C64::new(0.0, 0.0);
    unsafe {
        lapack_sys::zgetri_(
            &n_i,
            buf.as_mut_ptr().cast(),
            &n_i,
            ipiv.as_ptr(),
            (&mut work_q as *mut C64).cast(),
            &(-1),
            &mut info,
        );
    }
    if info != 0 {
        return Err(Error::Lapack { routine: "zgetri (query)", info });
    }
    let lwork = work_q.re as i32;
    let mut work = vec![C64::new(0.0, 0.0); lwork.max(1) as usize];
    unsafe {
        lapack_sys::zgetri_(
            &n_i,
            buf.as_mut_ptr().cast(),
            &n_i,
            ipiv.as_ptr(),
            work.as_mut_ptr().cast(),
            &lwork,
            &mut info,
        );
    }
    if info > 0 {
        return Err(Error::SingularMatrix);
    }
    if info < 0 {
        return Err(Error::Lapack { routine: "zgetri", info });
    }
    Ok(Array2::from_shape_fn((n, n), |(i, j)| buf[j * n + i]))
}

/// Singular values of a general complex matrix, ascending.
pub fn singular_values(a: &Array2<C64>) -> Result<Vec<f64>> {
    let (m, n) = a.dim();
    if m == 0 || n == 0 {
        return Err(Error::InvalidParameter("empty matrix".into()));
    }
    let buf = to_col_major(a);
    on_big_stack(m.max(n), move || singular_values_lapack(m, n, buf))
}

fn singular_values_lapack(m: usize, n: usize, mut buf: Vec<C64>) -> Result<Vec<f64>> {
    let (m_i, n_i) = (m as i32, n as i32);
    let k = m.min(n);
    let mut s = vec![0.0f64; k];
    let jobz = b'N' as i8;
    let mut info = 0i32;
    let mut work_q = C64::new(0.0, 0.0);
    // zgesdd rwork for jobz='N': >= 7*min(m,n) per LAPACK docs (use a margin)
    let mut rwork = vec![0.0f64; 8 * k.max(1)];
    let mut iwork = vec![0i32; 8 * k.max(1)];
    unsafe {
        lapack_sys::zgesdd_(
            &jobz,
            &m_i,
            &n_i,
            buf.as_mut_ptr().cast(),
            &m_i,
            s.as_mut_ptr(),
            std::ptr::null_mut(),
            &1,
            std::ptr::null_mut(),
            &1,
            (&mut work_q as *mut C64).cast(),
            &(-1),
            rwork.as_mut_ptr(),
            iwork.as_mut_ptr(),
            &mut info,
        );
    }
    if info != 0 {
        return Err(Error::Lapack { routine: "zgesdd (query)", info });
    }
    let lwork = work_q.re as i32;
    let mut work = vec![C64::new(0.0, 0.0); lwork.max(1) as usize];
    unsafe {
        lapack_sys::zgesdd_(
            &jobz,
            &m_i,
            &n_i,
            buf.as_mut_ptr().cast(),
            &m_i,
            s.as_mut_ptr(),
            std::ptr::null_mut(),
            &1,
            std::ptr::null_mut(),
            &1,
            work.as_mut_ptr().cast(),
            &lwork,
            rwork.as_mut_ptr(),
            iwork.as_mut_ptr(),
            &mut info,
        );
    }
    if info != 0 {
        return Err(Error::Lapack { routine: "zgesdd", info });
    }
    s.reverse(); // LAPACK returns descending
    Ok(s)
}

/// All eigenvalues of a real general (non-symmetric) matrix.
pub fn real_matrix_eigenvalues(a: &Array2<f64>) -> Result<Vec<C64>> {
    let (rows, cols) = a.dim();
    if rows != cols {
        return Err(Error::InvalidParameter(format!(
            "expected square matrix, got {rows}x{cols}"
        )));
    }
    let n = rows;
    if n == 0 {
        return Err(Error::InvalidParameter("empty matrix".into()));
    }
    let buf = to_col_major_f64(a);
    on_big_stack(n, move || real_eigenvalues_lapack(n, buf))
}

fn real_eigenvalues_lapack(n: usize, mut buf: Vec<f64>) -> Result<Vec<C64>> {
    let n_i = n as i32;
    let jobv = b'N' as i8;
    let mut wr = vec![0.0f64; n];
    let mut wi = vec![0.0f64; n];
    let mut info = 0i32;
    let mut work_q = 0.0f64;
    unsafe {
        lapack_sys::dgeev_(
            &jobv,
            &jobv,
            &n_i,
            buf.as_mut_ptr(),
            &n_i,
            wr.as_mut_ptr(),
            wi.as_mut_ptr(),
            std::ptr::null_mut(),
            &1,
            std::ptr::null_mut(),
            &1,
            &mut work_q,
            &(-1),
            &mut info,
        );
    }
    if info != 0 {
        return Err(Error::Lapack { routine: "dgeev (query)", info });
    }
    let lwork = work_q as i32;
    let mut work = vec![0.0f64; lwork.max(1) as usize];
    unsafe {
        lapack_sys::dgeev_(
            &jobv,
            &jobv,
            &n_i,
            buf.as_mut_ptr(),
            &n_i,
            wr.as_mut_ptr(),
            wi.as_mut_ptr(),
            std::ptr::null_mut(),
            &1,
            std::ptr::null_mut(),
            &1,
            work.as_mut_ptr(),
            &lwork,
            &mut info,
        );
    }
    if info != 0 {
        return Err(Error::EigFailure { info });
    }
    Ok(wr.into_iter().zip(wi).map(|(re, im)| C64::new(re, im)).collect())
}

/// Resolvent trace helper: mean of 1/(lambda_i - z) over a real spectrum.
pub fn resolvent_trace_from_spectrum(eigenvalues: &[f64], z: C64) -> C64 {
    let mut acc = C64::new(0.0, 0.0);
    for &lam in eigenvalues {
        acc += (C64::new(lam, 0.0) - z).inv();
    }
    acc / eigenvalues.len() as f64
}
