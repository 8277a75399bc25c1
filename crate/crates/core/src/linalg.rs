//! Small dense helpers on complex matrices shared by every module.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type C64 = Complex64;
pub type Mat = DMatrix<C64>;
pub type Vector = DVector<C64>;

/// Singular values below this fraction of the largest one count as zero.
pub const RANK_CUTOFF: f64 = 1e-9;

pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn eye(n: usize) -> Mat {
    Mat::identity(n, n)
}

/// Kronecker product with the first factor most significant.
pub fn kron(a: &Mat, b: &Mat) -> Mat {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    let mut out = Mat::zeros(ar * br, ac * bc);
    for j in 0..ac {
        for i in 0..ar {
            let x = a[(i, j)];
            if x == C64::new(0.0, 0.0) {
                continue;
            }
            for q in 0..bc {
                for p in 0..br {
                    out[(i * br + p, j * bc + q)] = x * b[(p, q)];
                }
            }
        }
    }
    out
}

fn nnz(a: &Mat) -> usize {
    a.iter().filter(|z| z.re != 0.0 || z.im != 0.0).count()
}

/// Matrix product that exploits structural zeros.
///
/// Braidings, Kac-Takesaki unitaries and their embeddings are permutation or
/// monomial matrices, so most products in the checks are cheap when one side is
/// sparse.
pub fn matmul(a: &Mat, b: &Mat) -> Mat {
    assert_eq!(a.ncols(), b.nrows(), "matmul shape mismatch");
    let (m, k) = a.shape();
    let n = b.ncols();
    if m * k * n < 4096 {
        return a * b;
    }
    let nb = nnz(b);
    if nb * 4 <= k * n {
        let mut out = Mat::zeros(m, n);
        for j in 0..n {
            for p in 0..k {
                let x = b[(p, j)];
                if x.re == 0.0 && x.im == 0.0 {
                    continue;
                }
                let src = a.column(p);
                let mut dst = out.column_mut(j);
                dst.axpy(x, &src, C64::new(1.0, 0.0));
            }
        }
        return out;
    }
    let na = nnz(a);
    if na * 4 <= m * k {
        let mut out = Mat::zeros(m, n);
        for p in 0..k {
            for i in 0..m {
                let x = a[(i, p)];
                if x.re == 0.0 && x.im == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += x * b[(p, j)];
                }
            }
        }
        return out;
    }
    a * b
}

pub fn hs_norm(a: &Mat) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn hs_inner(a: &Mat, b: &Mat) -> C64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

/// Row-major vectorization, matching the leg-index convention.
pub fn vec_rm(a: &Mat) -> Vector {
    let (r, c) = a.shape();
    Vector::from_fn(r * c, |idx, _| a[(idx / c, idx % c)])
}

pub fn unvec_rm(v: &[C64], rows: usize, cols: usize) -> Mat {
    assert_eq!(v.len(), rows * cols);
    Mat::from_fn(rows, cols, |i, j| v[i * cols + j])
}

/// Stack vectorized matrices as columns.
pub fn stack_columns<'a, I: IntoIterator<Item = &'a Mat>>(ops: I, len: usize) -> Mat {
    let cols: Vec<Vector> = ops.into_iter().map(vec_rm).collect();
    let mut m = Mat::zeros(len, cols.len());
    for (j, v) in cols.iter().enumerate() {
        assert_eq!(v.len(), len, "stack_columns length mismatch");
        m.set_column(j, v);
    }
    m
}

fn clean(mut m: Mat) -> Mat {
    for mut col in m.column_iter_mut() {
        let mx = col.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let floor = mx * 1e-15;
        for z in col.iter_mut() {
            if z.re.abs() < floor {
                z.re = 0.0;
            }
            if z.im.abs() < floor {
                z.im = 0.0;
            }
        }
    }
    m
}

/// Thin SVD `m = U diag(s) V*` with singular values in decreasing order.
///
/// Computed with faer: nalgebra's bidiagonal SVD returns wrong factors on
/// some highly degenerate inputs (e.g. slice matrices of the S₃ unitary).
pub fn svd(m: &Mat) -> (Mat, Vec<f64>, Mat) {
    let (r, c) = m.shape();
    let k = r.min(c);
    if k == 0 {
        return (Mat::zeros(r, 0), Vec::new(), Mat::zeros(c, 0));
    }
    let fm = faer::Mat::<faer::c64>::from_fn(r, c, |i, j| {
        let z = m[(i, j)];
        faer::c64::new(z.re, z.im)
    });
    let d = fm.thin_svd().expect("svd converges");
    let (fu, fv, fs) = (d.U(), d.V(), d.S());
    let u = Mat::from_fn(r, k, |i, j| {
        let z = fu[(i, j)];
        c64(z.re, z.im)
    });
    let v = Mat::from_fn(c, k, |i, j| {
        let z = fv[(i, j)];
        c64(z.re, z.im)
    });
    let s: Vec<f64> = (0..k).map(|i| fs.column_vector()[i].re).collect();
    (u, s, v)
}

fn cutoff(s: &[f64]) -> f64 {
    RANK_CUTOFF * s.iter().cloned().fold(0.0, f64::max)
}

/// Orthonormal basis (as columns) of the column space of `m`.
pub fn orthonormal_basis(m: &Mat) -> Mat {
    let (u, s, _) = svd(m);
    let keep: Vec<usize> = (0..s.len()).filter(|&i| s[i] > 0.0 && s[i] > cutoff(&s)).collect();
    let mut q = Mat::zeros(m.nrows(), keep.len());
    for (j, &i) in keep.iter().enumerate() {
        q.set_column(j, &u.column(i));
    }
    clean(q)
}

pub fn rank(m: &Mat) -> usize {
    let (_, s, _) = svd(m);
    s.iter().filter(|&&x| x > 0.0 && x > cutoff(&s)).count()
}

/// Orthonormal basis (as columns) of the null space of `m`.
pub fn null_space(m: &Mat) -> Mat {
    let (r, c) = m.shape();
    if c == 0 {
        return Mat::zeros(0, 0);
    }
    let padded = if r < c {
        let mut p = Mat::zeros(c, c);
        p.view_mut((0, 0), (r, c)).copy_from(m);
        p
    } else {
        m.clone()
    };
    let (_, s, v) = svd(&padded);
    let cut = cutoff(&s);
    let null: Vec<usize> = (0..s.len()).filter(|&i| s[i] == 0.0 || s[i] <= cut).collect();
    let mut out = Mat::zeros(c, null.len());
    for (j, &i) in null.iter().enumerate() {
        out.set_column(j, &v.column(i));
    }
    clean(out)
}

/// Least squares solution of `m x = b` with the rank cutoff; returns the
/// solution and the absolute residual norm.
pub fn lstsq(m: &Mat, b: &Vector) -> (Vector, f64) {
    if m.ncols() == 0 {
        return (Vector::zeros(0), b.norm());
    }
    let (u, s, v) = svd(m);
    let cut = cutoff(&s);
    let mut x = Vector::zeros(m.ncols());
    for i in 0..s.len() {
        if s[i] > 0.0 && s[i] > cut {
            let coef = u.column(i).dotc(b) / s[i];
            x += v.column(i) * coef;
        }
    }
    let res = (m * &x - b).norm();
    (x, res)
}

/// Unitary exp(iH) for Hermitian H together with its eigen-decomposition.
pub fn expi_hermitian(h: &Mat) -> (Mat, Mat, Vec<f64>) {
    let eig = h.clone().symmetric_eigen();
    let q = eig.eigenvectors;
    let lam: Vec<f64> = eig.eigenvalues.iter().cloned().collect();
    let d = Mat::from_diagonal(&Vector::from_iterator(
        lam.len(),
        lam.iter().map(|&l| C64::new(0.0, l).exp()),
    ));
    let u = &q * d * q.adjoint();
    (u, q, lam)
}

pub fn is_unitary_mat(m: &Mat, tol: f64) -> bool {
    if m.nrows() != m.ncols() {
        return false;
    }
    let id = eye(m.nrows());
    hs_norm(&(m.adjoint() * m - &id)) < tol && hs_norm(&(m * m.adjoint() - &id)) < tol
}

/// Distance to the nearest unimodular multiple of the identity.
pub fn distance_to_scalar(m: &Mat) -> f64 {
    let n = m.nrows();
    let tr = m.trace();
    let lam = if tr.norm() > 0.0 { tr / tr.norm() } else { C64::new(1.0, 0.0) };
    hs_norm(&(m - eye(n) * lam))
}
