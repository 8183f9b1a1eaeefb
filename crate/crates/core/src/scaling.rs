//! Monteiro-Zhang scalings (AHO, HKM, NT), the symmetrization map
//! `H_P(M) = ½(P M P⁻¹ + P⁻ᵀ Mᵀ Pᵀ)` and the blocks of the scaled Newton
//! equation `ℰ_s svec(ΔX) + ℱ_s svec(ΔS) = R^c_s`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tensor::{mat_inv_sqrt, mat_sqrt, svec, sym_kron, symmetrize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScalingChoice {
    Aho,
    Hkm,
    Nt,
}

impl std::str::FromStr for ScalingChoice {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "aho" => Ok(Self::Aho),
            "hkm" => Ok(Self::Hkm),
            "nt" => Ok(Self::Nt),
            other => Err(Error::Config(format!("unknown scaling '{other}'"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ScalingData {
    pub choice: ScalingChoice,
    pub p: DMatrix<f64>,
    pub p_inv_t: DMatrix<f64>,
    pub px: DMatrix<f64>,
    pub p_inv_t_s: DMatrix<f64>,
    /// Nesterov-Todd scaling matrix (NT only).
    pub w: Option<DMatrix<f64>>,
    /// `H_P(XS)` at the point the data was built for.
    pub hp_xs: DMatrix<f64>,
    pub es: DMatrix<f64>,
    pub fs: DMatrix<f64>,
    pub rcs: DVector<f64>,
}

fn inverse(p: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    p.clone().lu().try_inverse().ok_or(Error::Singular)
}

/// `H_P(M)` with `P⁻¹` computed here.
pub fn h_p(m: &DMatrix<f64>, p: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let p_inv = inverse(p)?;
    Ok(h_p_with_inverse(m, p, &p_inv))
}

pub fn h_p_with_inverse(m: &DMatrix<f64>, p: &DMatrix<f64>, p_inv: &DMatrix<f64>) -> DMatrix<f64> {
    let t = p * m * p_inv;
    symmetrize(&t)
}

/// Nesterov-Todd scaling `W = S^{-1/2}(S^{1/2} X S^{1/2})^{1/2} S^{-1/2}`,
/// the unique symmetric positive definite `W` with `W S W = X`.
pub fn nt_scaling(x: &DMatrix<f64>, s: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let s_half = mat_sqrt(s)?;
    let s_ihalf = mat_inv_sqrt(s)?;
    let mid = mat_sqrt(&symmetrize(&(&s_half * x * &s_half)))?;
    Ok(symmetrize(&(&s_ihalf * mid * &s_ihalf)))
}

/// The same matrix through `W = X^{1/2}(X^{1/2} S X^{1/2})^{-1/2} X^{1/2}`.
pub fn nt_scaling_primal_form(x: &DMatrix<f64>, s: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let x_half = mat_sqrt(x)?;
    let mid = mat_inv_sqrt(&symmetrize(&(&x_half * s * &x_half)))?;
    Ok(symmetrize(&(&x_half * mid * &x_half)))
}

/// Builds the scaling and the Newton blocks at `(X, S)` for the centering
/// target `σν`:
/// `ℰ_s = P ⊗_s P⁻ᵀS`, `ℱ_s = PX ⊗_s P⁻ᵀ`, `R^c_s = svec(σνI − H_P(XS))`.
pub fn build_scaling(
    choice: ScalingChoice,
    x: &DMatrix<f64>,
    s: &DMatrix<f64>,
    sigma: f64,
    nu: f64,
) -> Result<ScalingData> {
    let n = x.nrows();
    if s.nrows() != n || x.ncols() != n || s.ncols() != n {
        return Err(Error::Dimension("X and S must be square of equal size".into()));
    }
    let (p, p_inv_t, w) = match choice {
        ScalingChoice::Aho => (DMatrix::identity(n, n), DMatrix::identity(n, n), None),
        ScalingChoice::Hkm => (mat_sqrt(s)?, mat_inv_sqrt(s)?, None),
        ScalingChoice::Nt => {
            let w = nt_scaling(x, s)?;
            (mat_inv_sqrt(&w)?, mat_sqrt(&w)?, Some(w))
        }
    };
    let px = &p * x;
    let p_inv_t_s = &p_inv_t * s;
    // P X S P⁻¹ = (PX)(P⁻ᵀS)ᵀ because S is symmetric.
    let hp_xs = symmetrize(&(&px * p_inv_t_s.transpose()));
    let es = sym_kron(&p, &p_inv_t_s)?;
    let fs = sym_kron(&px, &p_inv_t)?;
    let mut target = -hp_xs.clone();
    for i in 0..n {
        target[(i, i)] += sigma * nu;
    }
    let rcs = svec(&target)?;
    Ok(ScalingData {
        choice,
        p,
        p_inv_t,
        px,
        p_inv_t_s,
        w,
        hp_xs,
        es,
        fs,
        rcs,
    })
}
