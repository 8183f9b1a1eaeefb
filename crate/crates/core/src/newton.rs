//! Newton systems in svec coordinates.
//!
//! The feasible method writes `svec(ΔX) = Q₂Δz` and `svec(ΔS) = −𝒜_sᵀΔy`,
//! where the columns of `Q₂` span the nullspace of `𝒜_s`. Any `(Δz, Δy)`,
//! exact or not, then keeps the iterate feasible and `ΔX • ΔS = 0`; only the
//! complementarity row
//!
//! ```text
//! [ℰ_s Q₂  −ℱ_s 𝒜_sᵀ] (Δz, Δy) = R^c_s
//! ```
//!
//! has to be solved. The infeasible method keeps the full block system.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::scaling::ScalingData;
use crate::tensor::{smat, svec};

/// Relative threshold on `|R_kk| / |R_00|` below which a pivot counts as zero.
pub const RANK_TOL: f64 = 1e-10;

/// Householder QR with column pivoting, `A Π = Q R`, with the full
/// orthogonal factor formed explicitly.
#[derive(Debug, Clone)]
pub struct PivotedQr {
    pub q: DMatrix<f64>,
    pub r: DMatrix<f64>,
    /// `perm[k]` is the original column placed at position `k`.
    pub perm: Vec<usize>,
    pub rank: usize,
}

pub fn pivoted_qr(a: &DMatrix<f64>) -> PivotedQr {
    let (rows, cols) = a.shape();
    let mut r = a.clone();
    let mut perm: Vec<usize> = (0..cols).collect();
    let steps = rows.min(cols);
    let mut reflectors: Vec<(usize, DVector<f64>, f64)> = Vec::with_capacity(steps);

    for k in 0..steps {
        let mut best = k;
        let mut best_norm = -1.0;
        for j in k..cols {
            let nrm = r.view((k, j), (rows - k, 1)).norm_squared();
            if nrm > best_norm {
                best_norm = nrm;
                best = j;
            }
        }
        if best != k {
            r.swap_columns(k, best);
            perm.swap(k, best);
        }
        let x = r.view((k, k), (rows - k, 1)).clone_owned();
        let xnorm = x.norm();
        if xnorm == 0.0 {
            continue;
        }
        let alpha = if x[0] >= 0.0 { -xnorm } else { xnorm };
        let mut v = DVector::from_column_slice(x.as_slice());
        v[0] -= alpha;
        let vtv = v.norm_squared();
        if vtv == 0.0 {
            continue;
        }
        let beta = 2.0 / vtv;
        let mut block = r.view_mut((k, k), (rows - k, cols - k));
        let w = block.tr_mul(&v) * beta;
        block.ger(-1.0, &v, &w, 1.0);
        for i in (k + 1)..rows {
            r[(i, k)] = 0.0;
        }
        reflectors.push((k, v, beta));
    }

    let mut q = DMatrix::identity(rows, rows);
    for (k, v, beta) in reflectors.iter().rev() {
        let mut block = q.view_mut((*k, 0), (rows - k, rows));
        let w = block.tr_mul(v) * *beta;
        block.ger(-1.0, v, &w, 1.0);
    }

    let lead = if steps > 0 { r[(0, 0)].abs() } else { 0.0 };
    let rank = (0..steps)
        .take_while(|&k| lead > 0.0 && r[(k, k)].abs() > RANK_TOL * lead)
        .count();
    PivotedQr { q, r, perm, rank }
}

/// Orthonormal bases for `range(𝒜_sᵀ)` (`q1`) and its complement, the
/// nullspace of `𝒜_s` (`q2`), from `𝒜_sᵀ Π = [Q₁ Q₂][R₁; 0]`.
#[derive(Debug, Clone)]
pub struct NullspaceBasis {
    pub q1: DMatrix<f64>,
    pub q2: DMatrix<f64>,
    pub r1: DMatrix<f64>,
    pub perm: Vec<usize>,
}

impl NullspaceBasis {
    /// `‖𝒜⁺ζ‖` with `𝒜⁺ = 𝒜_sᵀ(𝒜_s𝒜_sᵀ)⁻¹`, evaluated as `‖R₁⁻ᵀ Πᵀ ζ‖`.
    pub fn pinv_norm(&self, zeta: &DVector<f64>) -> f64 {
        let m = self.r1.nrows();
        let permuted = DVector::from_iterator(m, self.perm.iter().map(|&i| zeta[i]));
        match self.r1.transpose().solve_lower_triangular(&permuted) {
            Some(w) => w.norm(),
            None => f64::INFINITY,
        }
    }

    /// `𝒜⁺ζ` itself.
    pub fn pinv_apply(&self, zeta: &DVector<f64>) -> DVector<f64> {
        let m = self.r1.nrows();
        let permuted = DVector::from_iterator(m, self.perm.iter().map(|&i| zeta[i]));
        let w = self
            .r1
            .transpose()
            .solve_lower_triangular(&permuted)
            .unwrap_or_else(|| DVector::from_element(m, f64::NAN));
        &self.q1 * w
    }

    /// Smallest singular value of `𝒜_s`.
    pub fn sigma_min(&self) -> f64 {
        if self.r1.nrows() == 0 {
            return 0.0;
        }
        crate::tensor::extreme_singular_values(&self.r1).1
    }
}

pub fn nullspace_basis(a_s: &DMatrix<f64>) -> Result<NullspaceBasis> {
    let (m, big) = a_s.shape();
    if m > big {
        return Err(Error::Dimension(format!(
            "{m} constraints exceed the svec width {big}"
        )));
    }
    let qr = pivoted_qr(&a_s.transpose());
    if qr.rank < m {
        return Err(Error::RankDeficient {
            index: qr.perm[qr.rank],
        });
    }
    Ok(NullspaceBasis {
        q1: qr.q.columns(0, m).clone_owned(),
        q2: qr.q.columns(m, big - m).clone_owned(),
        r1: qr.r.view((0, 0), (m, m)).clone_owned(),
        perm: qr.perm,
    })
}

/// `M (Δz, Δy) = R^c_s` with `M = [ℰ_s Q₂ | −ℱ_s 𝒜_sᵀ]`.
#[derive(Debug, Clone)]
pub struct IfNewtonSystem {
    pub m: DMatrix<f64>,
    pub rhs: DVector<f64>,
    /// Number of `Δz` unknowns; `Δy` follows.
    pub split: usize,
}

pub fn assemble_if(sd: &ScalingData, nb: &NullspaceBasis, a_s: &DMatrix<f64>) -> Result<IfNewtonSystem> {
    let big = sd.es.nrows();
    if nb.q2.nrows() != big || a_s.ncols() != big {
        return Err(Error::Dimension("Newton blocks and constraint width differ".into()));
    }
    let split = nb.q2.ncols();
    let m = a_s.nrows();
    let mut mat = DMatrix::zeros(big, split + m);
    mat.columns_mut(0, split).copy_from(&(&sd.es * &nb.q2));
    mat.columns_mut(split, m).copy_from(&(-(&sd.fs * a_s.transpose())));
    Ok(IfNewtonSystem {
        m: mat,
        rhs: sd.rcs.clone(),
        split,
    })
}

impl IfNewtonSystem {
    /// `R^r = smat(M u − R^c_s)`, the third-row residual left by `u`.
    pub fn residual_matrix(&self, u: &DVector<f64>) -> Result<DMatrix<f64>> {
        smat(&(&self.m * u - &self.rhs))
    }
}

#[derive(Debug, Clone)]
pub struct Directions {
    pub dx: DMatrix<f64>,
    pub dy: DVector<f64>,
    pub ds: DMatrix<f64>,
}

pub fn reconstruct_directions(
    nb: &NullspaceBasis,
    a_s: &DMatrix<f64>,
    dz: &DVector<f64>,
    dy: &DVector<f64>,
) -> Result<Directions> {
    if dz.len() != nb.q2.ncols() || dy.len() != a_s.nrows() {
        return Err(Error::Dimension("direction lengths do not match the split".into()));
    }
    let dx = smat(&(&nb.q2 * dz))?;
    let ds = smat(&(-(a_s.transpose() * dy)))?;
    Ok(Directions {
        dx,
        dy: dy.clone(),
        ds,
    })
}

/// Split a stacked `(Δz, Δy)` vector and reconstruct.
pub fn directions_from_solution(
    sys: &IfNewtonSystem,
    nb: &NullspaceBasis,
    a_s: &DMatrix<f64>,
    u: &DVector<f64>,
) -> Result<Directions> {
    let dz = u.rows(0, sys.split).clone_owned();
    let dy = u.rows(sys.split, u.len() - sys.split).clone_owned();
    reconstruct_directions(nb, a_s, &dz, &dy)
}

/// Residual injections for the infeasible system.
#[derive(Debug, Clone)]
pub struct Injection {
    pub rp: DVector<f64>,
    pub rd: DVector<f64>,
    pub rc: DMatrix<f64>,
}

impl Injection {
    pub fn zero(n: usize, m: usize) -> Self {
        Self {
            rp: DVector::zeros(m),
            rd: DVector::zeros(crate::tensor::svec_len(n)),
            rc: DMatrix::zeros(n, n),
        }
    }
}

/// Full block system in the unknowns `(svec ΔX, Δy, svec ΔS)`:
///
/// ```text
/// [ 0    𝒜_sᵀ  I  ] [svec ΔX]   [ −η₁(R^d_s + r^d)    ]
/// [ 𝒜_s  0     0  ] [  Δy   ] = [ −η₁(R^p_s + r^p)    ]
/// [ ℰ_s  0     ℱ_s] [svec ΔS]   [ R^c_s + svec(r^c)   ]
/// ```
#[derive(Debug, Clone)]
pub struct IiNewtonSystem {
    pub m: DMatrix<f64>,
    pub rhs: DVector<f64>,
    pub width: usize,
    pub constraints: usize,
}

/// `sd` carries `R^c_s` for the desired centering target; `rd`, `rp` are
/// the current dual and primal residual vectors.
pub fn assemble_ii(
    sd: &ScalingData,
    a_s: &DMatrix<f64>,
    rd: &DVector<f64>,
    rp: &DVector<f64>,
    eta1: f64,
    inj: &Injection,
) -> Result<IiNewtonSystem> {
    let big = sd.es.nrows();
    let m = a_s.nrows();
    if a_s.ncols() != big || rd.len() != big || rp.len() != m || inj.rd.len() != big || inj.rp.len() != m {
        return Err(Error::Dimension("infeasible Newton system blocks differ in size".into()));
    }
    let dim = 2 * big + m;
    let mut mat = DMatrix::zeros(dim, dim);
    mat.view_mut((0, big), (big, m)).copy_from(&a_s.transpose());
    for i in 0..big {
        mat[(i, big + m + i)] = 1.0;
    }
    mat.view_mut((big, 0), (m, big)).copy_from(a_s);
    mat.view_mut((big + m, 0), (big, big)).copy_from(&sd.es);
    mat.view_mut((big + m, big + m), (big, big)).copy_from(&sd.fs);

    let mut rhs = DVector::zeros(dim);
    rhs.rows_mut(0, big).copy_from(&((rd + &inj.rd) * -eta1));
    rhs.rows_mut(big, m).copy_from(&((rp + &inj.rp) * -eta1));
    rhs.rows_mut(big + m, big).copy_from(&(&sd.rcs + svec(&inj.rc)?));
    Ok(IiNewtonSystem {
        m: mat,
        rhs,
        width: big,
        constraints: m,
    })
}

impl IiNewtonSystem {
    pub fn split(&self, u: &DVector<f64>) -> Result<Directions> {
        let big = self.width;
        let m = self.constraints;
        Ok(Directions {
            dx: smat(&u.rows(0, big).clone_owned())?,
            dy: u.rows(big, m).clone_owned(),
            ds: smat(&u.rows(big + m, big).clone_owned())?,
        })
    }
}
