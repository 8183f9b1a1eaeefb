//! Block-encoding calculus and quantum running-time formulas.
//!
//! A block-encoding of `A` is tracked as the tuple `(α, a, ξ, T)`: a unitary
//! on `a` extra qubits whose top-left block `Ã` satisfies `‖αÃ − A‖ ≤ ξ`,
//! implemented in `T` abstract time units. All big-O constants and polylog
//! factors are 1 and every logarithm is base 2, so the numbers are a
//! unit-constant model intended for exponent and structure checks.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scaling::{build_scaling, ScalingChoice};
use crate::tensor::svec_len;

/// Label attached to every reported figure.
pub const MODEL_LABEL: &str = "unit-constant model";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlockEncodingSpec {
    pub alpha: f64,
    pub a: u32,
    pub xi: f64,
    pub cost_t: f64,
}

impl BlockEncodingSpec {
    pub fn new(alpha: f64, a: u32, xi: f64, cost_t: f64) -> Result<Self> {
        if !(alpha > 0.0) || !(xi >= 0.0) || !(cost_t >= 0.0) {
            return Err(Error::Config(format!(
                "block-encoding needs alpha > 0, xi >= 0, cost >= 0 (got {alpha}, {xi}, {cost_t})"
            )));
        }
        Ok(Self { alpha, a, xi, cost_t })
    }

    /// Exact, free encoding; `(1, 0, 0, 0)` is the identity of [`be_product`].
    pub fn exact(alpha: f64, a: u32) -> Self {
        Self { alpha, a, xi: 0.0, cost_t: 0.0 }
    }
}

/// Number of qubits needed to index `dim` items.
pub fn index_qubits(dim: usize) -> u32 {
    if dim <= 1 {
        0
    } else {
        usize::BITS - (dim - 1).leading_zeros()
    }
}

/// Product `UV`: `(α₁α₂, a₁+a₂, α₁ξ₂+α₂ξ₁, T₁+T₂)`.
pub fn be_product(u: &BlockEncodingSpec, v: &BlockEncodingSpec) -> BlockEncodingSpec {
    BlockEncodingSpec {
        alpha: u.alpha * v.alpha,
        a: u.a + v.a,
        xi: u.alpha * v.xi + v.alpha * u.xi,
        cost_t: u.cost_t + v.cost_t,
    }
}

/// Product of preamplified encodings: `(2, a₁+a₂+2, √2(ξ₁+ξ₂+ξ₃))`, cost
/// `(α₁(T₁+a₁) + α₂(T₂+a₂))·log(1/ξ₃)`.
pub fn be_preamp_product(u: &BlockEncodingSpec, v: &BlockEncodingSpec, xi3: f64) -> Result<BlockEncodingSpec> {
    if !(xi3 > 0.0 && xi3 < 1.0) {
        return Err(Error::Config(format!("preamplification error must lie in (0, 1), got {xi3}")));
    }
    let amp = u.alpha * (u.cost_t + u.a as f64) + v.alpha * (v.cost_t + v.a as f64);
    Ok(BlockEncodingSpec {
        alpha: 2.0,
        a: u.a + v.a + 2,
        xi: std::f64::consts::SQRT_2 * (u.xi + v.xi + xi3),
        cost_t: amp * (1.0 / xi3).log2(),
    })
}

/// Same operator with a larger normalization `α' ≥ α`.
pub fn be_relax(u: &BlockEncodingSpec, alpha: f64) -> Result<BlockEncodingSpec> {
    if alpha < u.alpha {
        return Err(Error::Config(format!("cannot relax alpha {} down to {alpha}", u.alpha)));
    }
    Ok(BlockEncodingSpec { alpha, ..*u })
}

/// Linear combination `Σ yⱼAⱼ` through a `(β, p, ξ₁)` state-preparation
/// pair for `y`. The terms are relaxed to their largest `α` and share the
/// largest error `ξ₂`; the result is `(αβ, a+p, αξ₁ + αβξ₂)` with cost
/// `ΣTⱼ` plus one state preparation and its inverse.
pub fn be_lincomb(terms: &[BlockEncodingSpec], beta: f64, p: u32, xi1: f64) -> Result<BlockEncodingSpec> {
    if terms.is_empty() {
        return Err(Error::Config("linear combination of no terms".into()));
    }
    if !(beta > 0.0) || !(xi1 >= 0.0) {
        return Err(Error::Config(format!("state preparation needs beta > 0, xi1 >= 0 (got {beta}, {xi1})")));
    }
    let alpha = terms.iter().map(|t| t.alpha).fold(0.0, f64::max);
    let a = terms.iter().map(|t| t.a).max().unwrap_or(0);
    let xi2 = terms.iter().map(|t| t.xi).fold(0.0, f64::max);
    let cost: f64 = terms.iter().map(|t| t.cost_t).sum::<f64>() + 2.0;
    Ok(BlockEncodingSpec {
        alpha: alpha * beta,
        a: a + p,
        xi: alpha * xi1 + alpha * beta * xi2,
        cost_t: cost,
    })
}

/// Encoding of a matrix held in QRAM: `(‖A‖_F, ⌈log dim⌉+2, ξ)`, one access.
pub fn be_qram(frob: f64, dim: usize, xi: f64) -> Result<BlockEncodingSpec> {
    BlockEncodingSpec::new(frob.max(f64::MIN_POSITIVE), index_qubits(dim) + 2, xi, 1.0)
}

/// Sparse-access encoding: `(√(s_r s_c), w+3, ξ)`, one use of each oracle.
pub fn be_sparse(s_r: usize, s_c: usize, w: u32, xi: f64) -> Result<BlockEncodingSpec> {
    BlockEncodingSpec::new(((s_r * s_c) as f64).sqrt(), w + 3, xi, 1.0)
}

/// A matrix assembled from `r·c` pieces of size `dim`, each in QRAM with
/// Frobenius norm at most `piece_frob`, combined with uniform weights:
/// `(rc‖A‖_F, log dim + 2 + log rc, ξ)`.
pub fn blockencrule(piece_frob: f64, dim: usize, r: usize, c: usize, xi: f64) -> Result<BlockEncodingSpec> {
    let pieces = r * c;
    if pieces == 0 {
        return Err(Error::Config("block matrix with no pieces".into()));
    }
    let beta = pieces as f64;
    let piece = be_qram(piece_frob, dim, xi / (beta * piece_frob))?;
    be_lincomb(&vec![piece; pieces], beta, index_qubits(pieces), 0.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainStep {
    pub label: String,
    pub spec: BlockEncodingSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainReport {
    pub spec: BlockEncodingSpec,
    pub target_xi: f64,
    /// Frobenius norm of the encoded matrix where it is known.
    pub frob_norm: Option<f64>,
    pub steps: Vec<ChainStep>,
}

fn step(steps: &mut Vec<ChainStep>, label: &str, spec: BlockEncodingSpec) -> BlockEncodingSpec {
    steps.push(ChainStep { label: label.to_string(), spec });
    spec
}

/// Normalization used for `G ⊗_s K`: `‖G⊗K‖_F²`, or `2‖G⊗K‖_F` when that
/// is larger (only for `‖G⊗K‖_F < 2`).
pub fn sym_kron_normalization(gk_frob: f64) -> f64 {
    (gk_frob * gk_frob).max(2.0 * gk_frob)
}

/// Encoding of `G ⊗_s K = ½ V(G⊗K + K⊗G)Vᵀ` for `n×n` factors with
/// `‖G⊗K‖_F = gk_frob`. The error budget is split so the result is exactly
/// `(N, a, ξ)` with `N` from [`sym_kron_normalization`].
pub fn be_sym_kron_cost(gk_frob: f64, xi: f64, n: usize) -> Result<ChainReport> {
    if !(gk_frob > 0.0) || !(xi >= 0.0) || n == 0 {
        return Err(Error::Config(format!("sym_kron cost needs positive norm and n (got {gk_frob}, n={n})")));
    }
    let mut steps = Vec::new();
    let norm = sym_kron_normalization(gk_frob);
    let w = index_qubits(n * n);
    // The doubled product V(G⊗K + K⊗G)Vᵀ has normalization 2N and must
    // carry error 2ξ; half goes to the middle factor, half to the two V's.
    let xi_mid = xi / 2.0;
    let xi_v = xi / (2.0 * std::f64::consts::SQRT_2 * norm);
    let xi_piece = xi_mid / (2.0 * gk_frob);
    let gk = step(&mut steps, "G⊗K (qram)", be_qram(gk_frob, n * n, xi_piece)?);
    let kg = step(&mut steps, "K⊗G (qram)", be_qram(gk_frob, n * n, xi_piece)?);
    let sum = step(&mut steps, "G⊗K + K⊗G", be_lincomb(&[gk, kg], 2.0, 1, 0.0)?);
    let sum = step(&mut steps, "relax", be_relax(&sum, norm)?);
    let v = step(&mut steps, "V (sparse)", be_sparse(2, 1, w, xi_v)?);
    let left = step(&mut steps, "V·(G⊗K + K⊗G)", be_product(&v, &sum));
    let full = step(&mut steps, "V·(G⊗K + K⊗G)·Vᵀ", be_product(&left, &v));
    // √2·N·√2 / 2 = N exactly; avoid the rounding of the float product.
    let half = BlockEncodingSpec {
        alpha: norm,
        xi: full.xi / 2.0,
        ..full
    };
    let spec = step(&mut steps, "½ (symmetric Kronecker product)", half);
    Ok(ChainReport {
        spec,
        target_xi: xi,
        frob_norm: None,
        steps,
    })
}

/// `ξ/(κ² log²(κ/ξ))`, the precision the system encoding must reach for a
/// linear-system solve to precision `ξ`.
pub fn system_encoding_precision(xi: f64, kappa: f64) -> f64 {
    let l = (kappa / xi).log2();
    xi / (kappa * kappa * l * l)
}

fn frob(m: &DMatrix<f64>) -> f64 {
    m.norm()
}

/// `(G⊗_sK)·B` for `B` in QRAM with error exactly `xi`.
fn sym_kron_times(
    steps: &mut Vec<ChainStep>,
    label: &str,
    g: &DMatrix<f64>,
    k: &DMatrix<f64>,
    b_frob: f64,
    b_dim: usize,
    xi: f64,
) -> Result<BlockEncodingSpec> {
    let n = g.nrows();
    let gk = frob(g) * frob(k);
    let norm = sym_kron_normalization(gk);
    let sk = be_sym_kron_cost(gk, xi / (2.0 * b_frob), n)?.spec;
    let b = be_qram(b_frob, b_dim, xi / (2.0 * norm))?;
    Ok(step(steps, label, be_product(&sk, &b)))
}

/// Factor pairs `(G, K)` of `ℰ_s = G₁ ⊗_s K₁` and `ℱ_s = G₂ ⊗_s K₂` for a
/// scaling at `(X, S)`.
pub fn newton_factors(
    choice: ScalingChoice,
    x: &DMatrix<f64>,
    s: &DMatrix<f64>,
) -> Result<[(DMatrix<f64>, DMatrix<f64>); 2]> {
    let sd = build_scaling(choice, x, s, 0.0, 0.0)?;
    Ok([(sd.p.clone(), sd.p_inv_t_s.clone()), (sd.px.clone(), sd.p_inv_t.clone())])
}

/// Encoding of the feasible Newton matrix `[ℰ_s Q₂ | −ℱ_s 𝒜_sᵀ]` as the sum
/// of its two column blocks, reaching [`system_encoding_precision`].
pub fn if_newton_chain(
    choice: ScalingChoice,
    x: &DMatrix<f64>,
    s: &DMatrix<f64>,
    a_s: &DMatrix<f64>,
    q2: &DMatrix<f64>,
    kappa: f64,
    xi: f64,
) -> Result<ChainReport> {
    let n = x.nrows();
    let big = svec_len(n);
    let target = system_encoding_precision(xi, kappa);
    let [(g1, k1), (g2, k2)] = newton_factors(choice, x, s)?;
    let mut steps = Vec::new();
    // Both blocks are first sized with a unit error to learn their
    // normalizations, then rebuilt at the shared error target/(2α).
    let probe1 = sym_kron_times(&mut Vec::new(), "", &g1, &k1, frob(q2), big, 1.0)?;
    let probe2 = sym_kron_times(&mut Vec::new(), "", &g2, &k2, frob(a_s), big, 1.0)?;
    let alpha = probe1.alpha.max(probe2.alpha);
    let xi_block = target / (2.0 * alpha);
    let m1 = sym_kron_times(&mut steps, "[ℰ_s Q₂ | 0]", &g1, &k1, frob(q2), big, xi_block)?;
    let m2 = sym_kron_times(&mut steps, "[0 | −ℱ_s 𝒜_sᵀ]", &g2, &k2, frob(a_s), big, xi_block)?;
    let spec = step(&mut steps, "M₁ + M₂", be_lincomb(&[m1, m2], 2.0, 1, 0.0)?);
    let mut mat = DMatrix::zeros(big, q2.ncols() + a_s.nrows());
    let e = crate::tensor::sym_kron(&g1, &k1)?;
    let f = crate::tensor::sym_kron(&g2, &k2)?;
    mat.columns_mut(0, q2.ncols()).copy_from(&(e * q2));
    mat.columns_mut(q2.ncols(), a_s.nrows()).copy_from(&(-(f * a_s.transpose())));
    Ok(ChainReport {
        spec,
        target_xi: target,
        frob_norm: Some(mat.norm()),
        steps,
    })
}

/// Encoding of the infeasible Newton matrix
/// `[[0, 𝒜_sᵀ, I], [𝒜_s, 0, 0], [ℰ_s, 0, ℱ_s]]` as `M₁ + M₂ + M₃`.
pub fn ii_newton_chain(
    choice: ScalingChoice,
    x: &DMatrix<f64>,
    s: &DMatrix<f64>,
    a_s: &DMatrix<f64>,
    kappa: f64,
    xi: f64,
) -> Result<ChainReport> {
    let n = x.nrows();
    let big = svec_len(n);
    let m = a_s.nrows();
    let dim = 2 * big + m;
    let target = system_encoding_precision(xi, kappa);
    let [(g1, k1), (g2, k2)] = newton_factors(choice, x, s)?;
    let a_frob = frob(a_s);
    let m1_frob = (2.0 * a_frob * a_frob + big as f64).sqrt();
    let norm_e = sym_kron_normalization(frob(&g1) * frob(&k1));
    let norm_f = sym_kron_normalization(frob(&g2) * frob(&k2));
    let alpha = m1_frob.max(norm_e).max(norm_f);
    let xi_block = target / (3.0 * alpha);
    let w = index_qubits(dim);
    let mut steps = Vec::new();
    let m1 = step(&mut steps, "M₁ = [[0, 𝒜_sᵀ, I], [𝒜_s, 0, 0], 0] (qram)", be_qram(m1_frob, dim, xi_block)?);
    let place = be_sparse(1, 1, w, 0.0)?;
    let mut placed = |label: &str, g: &DMatrix<f64>, k: &DMatrix<f64>| -> Result<BlockEncodingSpec> {
        let sk = be_sym_kron_cost(frob(g) * frob(k), xi_block, n)?.spec;
        let inner = be_product(&sk, &place);
        Ok(step(&mut steps, label, be_product(&place, &inner)))
    };
    let m2 = placed("M₂ = ℰ_s in block (3,1)", &g1, &k1)?;
    let m3 = placed("M₃ = ℱ_s in block (3,3)", &g2, &k2)?;
    let spec = step(&mut steps, "M₁ + M₂ + M₃", be_lincomb(&[m1, m2, m3], 3.0, 2, 0.0)?);

    let mut mat = DMatrix::zeros(dim, dim);
    mat.view_mut((0, big), (big, m)).copy_from(&a_s.transpose());
    for i in 0..big {
        mat[(i, big + m + i)] = 1.0;
    }
    mat.view_mut((big, 0), (m, big)).copy_from(a_s);
    mat.view_mut((big + m, 0), (big, big)).copy_from(&crate::tensor::sym_kron(&g1, &k1)?);
    mat.view_mut((big + m, big + m), (big, big)).copy_from(&crate::tensor::sym_kron(&g2, &k2)?);
    Ok(ChainReport {
        spec,
        target_xi: target,
        frob_norm: Some(mat.norm()),
        steps,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QlsaCost {
    pub time: f64,
    /// Largest encoding error the solver tolerates.
    pub xi_threshold: f64,
    pub precondition_ok: bool,
}

fn check_kappa_delta(kappa: f64, delta: f64) -> Result<()> {
    if !(kappa >= 1.0) || !(delta > 0.0 && delta < kappa) {
        return Err(Error::Config(format!("need kappa >= 1 and 0 < delta < kappa (got {kappa}, {delta})")));
    }
    Ok(())
}

/// Quantum linear-system solve: `κ(α(a+T_U) log²(κ/δ) + T_v) log κ`.
pub fn qlsa_cost(be: &BlockEncodingSpec, kappa: f64, delta: f64, t_v: f64) -> Result<QlsaCost> {
    check_kappa_delta(kappa, delta)?;
    let l = (kappa / delta).log2();
    let inner = be.alpha * (be.a as f64 + be.cost_t) * l * l + t_v;
    let time = kappa * inner * kappa.log2();
    let xi_threshold = delta / (kappa * kappa * (kappa * kappa / delta).log2().powi(3));
    Ok(QlsaCost {
        time,
        xi_threshold,
        precondition_ok: be.xi <= xi_threshold,
    })
}

/// Norm estimate of the solution to relative error `δ`:
/// `(κ/δ)(α(a+T_U) log²(κ/δ) + T_v) log³κ · log(log κ/ξ)`.
pub fn norm_est_cost(be: &BlockEncodingSpec, kappa: f64, delta: f64, t_v: f64) -> Result<f64> {
    check_kappa_delta(kappa, delta)?;
    if !(be.xi > 0.0) {
        return Err(Error::Config("norm estimation needs a positive encoding error".into()));
    }
    let l = (kappa / delta).log2();
    let inner = be.alpha * (be.a as f64 + be.cost_t) * l * l + t_v;
    let lk = kappa.log2();
    let tail = (lk / be.xi).log2().max(0.0);
    Ok(kappa / delta * inner * lk.powi(3) * tail)
}

/// Tomography of a `d`-dimensional solution to absolute error `ξ` when its
/// norm is at most `ϱ`: `(d/ξ)·ϱ·T_LS`.
pub fn tomography_cost(d: usize, xi: f64, varrho: f64, t_ls: f64) -> Result<f64> {
    if !(xi > 0.0) || !(varrho > 0.0) || !(t_ls >= 0.0) {
        return Err(Error::Config(format!("tomography needs xi > 0, varrho > 0 (got {xi}, {varrho})")));
    }
    Ok(d as f64 / xi * varrho * t_ls)
}

/// Parameters entering the running-time formulas.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostInputs {
    pub n: f64,
    pub m: f64,
    pub kappa: f64,
    pub epsilon: f64,
    /// Condition number of `𝒜_s`.
    pub kappa_a: f64,
    pub rho: f64,
    pub a_frob: f64,
    /// `Rr/ε_abs` for the multiplicative-weights row.
    pub r_over_eps: f64,
}

impl CostInputs {
    pub fn new(n: usize, m: usize, kappa: f64, epsilon: f64) -> Self {
        Self {
            n: n as f64,
            m: m as f64,
            kappa,
            epsilon,
            kappa_a: 1.0,
            rho: 1.0,
            a_frob: 1.0,
            r_over_eps: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostTerm {
    pub label: String,
    pub formula: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostReport {
    pub model: String,
    pub qram_accesses: f64,
    pub classical_ops: f64,
    pub breakdown: Vec<CostTerm>,
}

impl CostReport {
    pub fn term(&self, label: &str) -> Option<f64> {
        self.breakdown.iter().find(|t| t.label == label).map(|t| t.value)
    }
}

/// Leading-order totals of the feasible method (quantum and classical), the
/// infeasible method, and the linear-optimization specialization.
pub fn predict_if_totals(inp: &CostInputs) -> Result<CostReport> {
    let CostInputs { n, kappa, epsilon, .. } = *inp;
    if !(n >= 1.0) || !(kappa >= 1.0) || !(epsilon > 0.0) {
        return Err(Error::Config(format!("need n >= 1, kappa >= 1, epsilon > 0 (got {n}, {kappa}, {epsilon})")));
    }
    let mut terms = Vec::new();
    let mut push = |label: &str, formula: &str, value: f64| {
        terms.push(CostTerm {
            label: label.into(),
            formula: formula.into(),
            value,
        });
        value
    };
    let iters_if = push("if.iterations", "√n", n.sqrt());
    // Solution dimension d, system norm √d, solution norm κ.
    let d_sdo = n * n;
    let t_ls = push("if.t_ls", "κ·‖M‖_F = κn", kappa * d_sdo.sqrt());
    let per_q = push("if.qram_per_iteration", "(n²/ε)·κ·T_LS = n³κ²/ε", tomography_cost(d_sdo as usize, epsilon, kappa, t_ls)?);
    let per_c = push("if.arith_per_iteration", "n⁴", n.powi(4));
    let qram = push("if.qram_total", "n^3.5·κ²/ε", iters_if * per_q);
    let arith = push("if.arith_total", "n^4.5", iters_if * per_c);
    push("if_classical.total", "n^4.5·κ", iters_if * n.powi(4) * kappa);

    let iters_ii = push("ii.iterations", "n²", n * n);
    let varrho = inp.kappa_a * inp.rho * n.powf(1.5);
    let t_ls_ii = kappa * (inp.a_frob + inp.rho * n.powf(1.5));
    let per_ii = push(
        "ii.qram_per_iteration",
        "n^3.5·κ·κ_A·ρ(‖𝒜‖_F + ρn^1.5)/ε",
        tomography_cost(d_sdo as usize, epsilon, varrho, t_ls_ii)?,
    );
    push("ii.qram_total", "n^5.5·κ·κ_A·ρ(‖𝒜‖_F + ρn^1.5)/ε", iters_ii * per_ii);
    push("ii.arith_total", "n²·n³", iters_ii * n.powi(3));

    let t_ls_lo = kappa * n.sqrt();
    let per_lo = tomography_cost(n as usize, epsilon, kappa, t_ls_lo)?;
    push("lo.qram_total", "n²κ²/ε", iters_if * per_lo);
    push("lo.arith_total", "n^2.5", iters_if * n * n);
    push("lo_classical.total", "n^2.5·κ", iters_if * n * n * kappa);

    Ok(CostReport {
        model: MODEL_LABEL.into(),
        qram_accesses: qram,
        classical_ops: arith,
        breakdown: terms,
    })
}

/// `coeff · n^n · κ^kappa · (1/ε)^inv_eps · κ_A^kappa_a · ρ^rho ·
/// ‖𝒜‖_F^a_frob · (Rr/ε_abs)^r_over_eps`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Monomial {
    pub coeff: f64,
    pub n: f64,
    pub kappa: f64,
    pub inv_eps: f64,
    pub kappa_a: f64,
    pub rho: f64,
    pub a_frob: f64,
    pub r_over_eps: f64,
}

impl Monomial {
    pub fn n_pow(e: f64) -> Self {
        Self { coeff: 1.0, n: e, ..Self::default() }
    }

    pub fn eval(&self, inp: &CostInputs) -> f64 {
        self.coeff
            * inp.n.powf(self.n)
            * inp.kappa.powf(self.kappa)
            * (1.0 / inp.epsilon).powf(self.inv_eps)
            * inp.kappa_a.powf(self.kappa_a)
            * inp.rho.powf(self.rho)
            * inp.a_frob.powf(self.a_frob)
            * inp.r_over_eps.powf(self.r_over_eps)
    }

    pub fn render(&self) -> String {
        let mut parts = Vec::new();
        for (sym, e) in [
            ("n", self.n),
            ("κ", self.kappa),
            ("(1/ε)", self.inv_eps),
            ("κ_A", self.kappa_a),
            ("ρ", self.rho),
            ("‖𝒜‖_F", self.a_frob),
            ("(Rr/ε)", self.r_over_eps),
        ] {
            if e == 1.0 {
                parts.push(sym.to_string());
            } else if e != 0.0 {
                parts.push(format!("{sym}^{e}"));
            }
        }
        if parts.is_empty() {
            return format!("{}", self.coeff);
        }
        parts.join("·")
    }
}

/// A running time as a sum of monomials.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostExpr {
    pub method: String,
    pub terms: Vec<Monomial>,
}

impl CostExpr {
    /// Largest power of `n` over all terms.
    pub fn n_exponent(&self) -> f64 {
        self.terms.iter().map(|t| t.n).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn eval(&self, inp: &CostInputs) -> f64 {
        self.terms.iter().map(|t| t.eval(inp)).sum()
    }

    pub fn render(&self) -> String {
        self.terms.iter().map(Monomial::render).collect::<Vec<_>>().join(" + ")
    }
}

/// Total running times of classical and quantum SDO solvers for
/// `m = O(n²)` and dense data.
pub fn cost_table_rows() -> Vec<CostExpr> {
    let row = |method: &str, terms: Vec<Monomial>| CostExpr { method: method.into(), terms };
    let one = Monomial::n_pow(0.0);
    vec![
        row("IPM", vec![Monomial::n_pow(6.5)]),
        row("IPM (fast matrix multiplication)", vec![Monomial::n_pow(5.246)]),
        row("CPM", vec![Monomial::n_pow(6.0)]),
        row(
            "QMWU",
            vec![
                Monomial { n: 2.0, r_over_eps: 4.0, ..one },
                Monomial { n: 1.5, r_over_eps: 5.0, ..one },
            ],
        ),
        row(
            "IF-QIPM",
            vec![Monomial { n: 3.5, kappa: 2.0, inv_eps: 1.0, ..one }, Monomial::n_pow(4.5)],
        ),
        row("IF-IPM", vec![Monomial { n: 4.5, kappa: 1.0, ..one }]),
        row(
            "II-QIPM",
            vec![
                Monomial { n: 5.5, kappa: 1.0, kappa_a: 1.0, rho: 1.0, a_frob: 1.0, inv_eps: 1.0, ..one },
                Monomial { n: 7.0, kappa: 1.0, kappa_a: 1.0, rho: 2.0, inv_eps: 1.0, ..one },
            ],
        ),
    ]
}
