//! Symmetric-matrix vectorization, symmetric Kronecker products and the
//! small dense matrix functions used by the rest of the crate.
//!
//! `svec` stacks the lower triangle column by column, diagonal entry first,
//! with off-diagonal entries scaled by √2 so that `‖svec(G)‖₂ = ‖G‖_F`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Relative tolerance used by [`svec`] to reject non-symmetric input.
pub const SYMMETRY_TOL: f64 = 1e-12;

/// Default relative positive-definiteness threshold for matrix functions.
pub const PD_TOL: f64 = 1e-12;

/// Length of `svec` for an `n × n` matrix.
pub fn svec_len(n: usize) -> usize {
    n * (n + 1) / 2
}

/// Position of entry `(i, j)`, `i ≥ j`, inside `svec`.
pub fn svec_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i >= j && i < n);
    j * n - j * j.saturating_sub(1) / 2 + (i - j)
}

/// Inverse of [`svec_len`]: the `n` with `n(n+1)/2 == len`.
pub fn triangular_dim(len: usize) -> Option<usize> {
    let n = ((((8 * len + 1) as f64).sqrt() - 1.0) / 2.0).round() as usize;
    (svec_len(n) == len).then_some(n)
}

fn check_square(g: &DMatrix<f64>, what: &str) -> Result<usize> {
    if g.nrows() != g.ncols() {
        return Err(Error::Dimension(format!(
            "{what} must be square, got {}x{}",
            g.nrows(),
            g.ncols()
        )));
    }
    Ok(g.nrows())
}

/// Largest absolute asymmetry `|g_ij − g_ji|`.
pub fn symmetry_defect(g: &DMatrix<f64>) -> f64 {
    let n = g.nrows();
    let mut worst = 0.0f64;
    for j in 0..n {
        for i in (j + 1)..n {
            worst = worst.max((g[(i, j)] - g[(j, i)]).abs());
        }
    }
    worst
}

/// `(G + Gᵀ)/2`.
pub fn symmetrize(g: &DMatrix<f64>) -> DMatrix<f64> {
    (g + g.transpose()) * 0.5
}

pub fn svec(g: &DMatrix<f64>) -> Result<DVector<f64>> {
    let n = check_square(g, "svec argument")?;
    let defect = symmetry_defect(g);
    if defect > SYMMETRY_TOL * g.norm() {
        return Err(Error::NotSymmetric { defect });
    }
    let r2 = std::f64::consts::SQRT_2;
    let mut v = DVector::zeros(svec_len(n));
    let mut p = 0;
    for j in 0..n {
        v[p] = g[(j, j)];
        p += 1;
        for i in (j + 1)..n {
            v[p] = r2 * 0.5 * (g[(i, j)] + g[(j, i)]);
            p += 1;
        }
    }
    Ok(v)
}

pub fn smat(v: &DVector<f64>) -> Result<DMatrix<f64>> {
    let n = triangular_dim(v.len()).ok_or_else(|| {
        Error::Dimension(format!("svec length {} is not a triangular number", v.len()))
    })?;
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut g = DMatrix::zeros(n, n);
    let mut p = 0;
    for j in 0..n {
        g[(j, j)] = v[p];
        p += 1;
        for i in (j + 1)..n {
            let x = s * v[p];
            g[(i, j)] = x;
            g[(j, i)] = x;
            p += 1;
        }
    }
    Ok(g)
}

/// Column-major `vec`.
pub fn vec_cm(g: &DMatrix<f64>) -> DVector<f64> {
    DVector::from_column_slice(g.as_slice())
}

/// The `n(n+1)/2 × n²` matrix with `svec(G) = V vec(G)` and `V Vᵀ = I`.
pub fn build_v(n: usize) -> DMatrix<f64> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut v = DMatrix::zeros(svec_len(n), n * n);
    let mut p = 0;
    for j in 0..n {
        v[(p, j + j * n)] = 1.0;
        p += 1;
        for i in (j + 1)..n {
            v[(p, i + j * n)] = s;
            v[(p, j + i * n)] = s;
            p += 1;
        }
    }
    v
}

fn check_pair(g: &DMatrix<f64>, k: &DMatrix<f64>) -> Result<usize> {
    let n = check_square(g, "left factor")?;
    let nk = check_square(k, "right factor")?;
    if n != nk {
        return Err(Error::Dimension(format!(
            "symmetric Kronecker factors differ in size: {n} vs {nk}"
        )));
    }
    Ok(n)
}

/// Symmetric Kronecker product `G ⊗_s K`, built column by column from the
/// action `svec(H) ↦ svec(½(G H Kᵀ + K H Gᵀ))` on the orthonormal svec basis.
/// `G` and `K` may be any square matrices of equal size.
pub fn sym_kron(g: &DMatrix<f64>, k: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = check_pair(g, k)?;
    let big = svec_len(n);
    let r2 = std::f64::consts::SQRT_2;
    let c_off = 0.5 * std::f64::consts::FRAC_1_SQRT_2;
    let mut out = DMatrix::zeros(big, big);
    let mut col = 0;
    for j in 0..n {
        for i in j..n {
            let mut row = 0;
            for b in 0..n {
                for a in b..n {
                    let t = if i == j {
                        0.5 * (g[(a, i)] * k[(b, i)] + k[(a, i)] * g[(b, i)])
                    } else {
                        c_off
                            * (g[(a, i)] * k[(b, j)]
                                + g[(a, j)] * k[(b, i)]
                                + k[(a, i)] * g[(b, j)]
                                + k[(a, j)] * g[(b, i)])
                    };
                    out[(row, col)] = if a == b { t } else { r2 * t };
                    row += 1;
                }
            }
            col += 1;
        }
    }
    Ok(out)
}

/// `½ V (G ⊗ K + K ⊗ G) Vᵀ` evaluated literally. Kept as a cross-check for
/// [`sym_kron`]; it materializes `n² × n²` matrices.
pub fn sym_kron_explicit(g: &DMatrix<f64>, k: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = check_pair(g, k)?;
    let v = build_v(n);
    let sum = g.kronecker(k) + k.kronecker(g);
    Ok(&v * sum * v.transpose() * 0.5)
}

/// `svec(½(G H Kᵀ + K H Gᵀ))`, the action of `G ⊗_s K` on `svec(H)`.
pub fn sym_kron_apply(g: &DMatrix<f64>, k: &DMatrix<f64>, h: &DMatrix<f64>) -> Result<DVector<f64>> {
    let n = check_pair(g, k)?;
    if h.nrows() != n || h.ncols() != n {
        return Err(Error::Dimension("operand size differs from factors".into()));
    }
    let t = (g * h * k.transpose() + k * h * g.transpose()) * 0.5;
    svec(&symmetrize(&t))
}

/// Eigen-decomposition of a symmetric matrix with eigenvalues sorted in
/// descending order (columns of the returned matrix follow the same order).
pub fn sym_eigen(g: &DMatrix<f64>) -> Result<(DVector<f64>, DMatrix<f64>)> {
    let n = check_square(g, "eigen argument")?;
    let eig = symmetrize(g).symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let vals = DVector::from_iterator(n, order.iter().map(|&i| eig.eigenvalues[i]));
    let mut vecs = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vecs.set_column(dst, &eig.eigenvectors.column(src));
    }
    Ok((vals, vecs))
}

/// Smallest eigenvalue of a symmetric matrix.
pub fn lambda_min(g: &DMatrix<f64>) -> Result<f64> {
    let (vals, _) = sym_eigen(g)?;
    Ok(vals[vals.len() - 1])
}

fn spectral_fn(g: &DMatrix<f64>, rel_tol: f64, f: impl Fn(f64) -> f64) -> Result<DMatrix<f64>> {
    let (vals, vecs) = sym_eigen(g)?;
    let n = vals.len();
    if n == 0 {
        return Ok(DMatrix::zeros(0, 0));
    }
    let scale = vals[0].abs().max(vals[n - 1].abs());
    let lmin = vals[n - 1];
    if !(lmin > rel_tol * scale) || !lmin.is_finite() {
        return Err(Error::NotPositiveDefinite { lambda_min: lmin });
    }
    let mut scaled = vecs.clone();
    for (c, &l) in vals.iter().enumerate() {
        let fl = f(l);
        scaled.column_mut(c).scale_mut(fl);
    }
    Ok(symmetrize(&(scaled * vecs.transpose())))
}

/// Principal square root of a symmetric positive definite matrix.
pub fn mat_sqrt(g: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    spectral_fn(g, PD_TOL, f64::sqrt)
}

/// Inverse principal square root of a symmetric positive definite matrix.
pub fn mat_inv_sqrt(g: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    spectral_fn(g, PD_TOL, |l| 1.0 / l.sqrt())
}

pub fn mat_sqrt_tol(g: &DMatrix<f64>, rel_tol: f64) -> Result<DMatrix<f64>> {
    spectral_fn(g, rel_tol, f64::sqrt)
}

/// Inverse of a symmetric positive definite matrix through its eigenvalues.
pub fn spd_inverse(g: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    spectral_fn(g, PD_TOL, |l| 1.0 / l)
}

/// 2-norm condition number `σ_max/σ_min`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Condition {
    pub value: f64,
    pub sigma_max: f64,
    pub sigma_min: f64,
    pub singular: bool,
}

pub fn cond_2(m: &DMatrix<f64>) -> Condition {
    let (sigma_max, sigma_min) = extreme_singular_values(m);
    if sigma_min <= 0.0 || !sigma_min.is_finite() {
        return Condition {
            value: f64::INFINITY,
            sigma_max,
            sigma_min: 0.0,
            singular: true,
        };
    }
    Condition {
        value: sigma_max / sigma_min,
        sigma_max,
        sigma_min,
        singular: false,
    }
}

/// Largest and smallest singular values. The smallest is taken over
/// `min(rows, cols)` values.
pub fn extreme_singular_values(m: &DMatrix<f64>) -> (f64, f64) {
    if m.nrows() == 0 || m.ncols() == 0 {
        return (0.0, 0.0);
    }
    let sv = m.singular_values();
    let max = sv.iter().cloned().fold(0.0f64, f64::max);
    let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    (max, min)
}

pub fn spectral_norm(m: &DMatrix<f64>) -> f64 {
    extreme_singular_values(m).0
}

/// Dot product accumulated with error-free transformations, accurate to
/// about twice working precision.
pub fn dot2(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let mut s = 0.0f64;
    let mut c = 0.0f64;
    for (&x, &y) in a.iter().zip(b) {
        let p = x * y;
        let pe = x.mul_add(y, -p);
        let t = s + p;
        let z = t - s;
        let se = (s - (t - z)) + (p - z);
        s = t;
        c += se + pe;
    }
    s + c
}

/// Trace inner product `A • B = tr(AᵀB)`.
pub fn frob_inner(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    assert_eq!(a.shape(), b.shape());
    dot2(a.as_slice(), b.as_slice())
}
