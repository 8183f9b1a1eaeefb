//! Oracles shared by the integration tests. They are written from the
//! definitions and deliberately avoid the library's own helpers.

#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gauss(rng: &mut ChaCha8Rng) -> f64 {
    // Box-Muller keeps the oracle free of the library's sampler.
    let u1: f64 = rng.random::<f64>().max(f64::MIN_POSITIVE);
    let u2: f64 = rng.random();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

pub fn random_matrix(n: usize, c: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    DMatrix::from_fn(n, c, |_, _| gauss(rng))
}

pub fn random_sym(n: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let g = random_matrix(n, n, rng);
    (&g + g.transpose()) * 0.5
}

/// `B Bᵀ/n + shift·I`, positive definite with moderate condition number.
pub fn random_spd(n: usize, shift: f64, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let b = random_matrix(n, n, rng);
    &b * b.transpose() / n as f64 + DMatrix::identity(n, n) * shift
}

/// `I + t·G`, nonsingular for small `t`.
pub fn random_nonsingular(n: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    DMatrix::identity(n, n) + random_matrix(n, n, rng) * (0.3 / (n as f64).sqrt())
}

/// `svec` straight from the definition: for `j ≤ i` in column order, the
/// diagonal entry or `√2` times the off-diagonal one.
pub fn svec_oracle(g: &DMatrix<f64>) -> DVector<f64> {
    let n = g.nrows();
    let mut out = Vec::new();
    for j in 0..n {
        for i in j..n {
            out.push(if i == j { g[(i, j)] } else { std::f64::consts::SQRT_2 * g[(i, j)] });
        }
    }
    DVector::from_vec(out)
}

/// `V` as the matrix of `vec(H) ↦ svec(sym H)`, built column by column
/// from unit matrices.
pub fn v_oracle(n: usize) -> DMatrix<f64> {
    let rows = n * (n + 1) / 2;
    let mut v = DMatrix::zeros(rows, n * n);
    for col in 0..n * n {
        let mut e = DMatrix::zeros(n, n);
        e[(col % n, col / n)] = 1.0;
        let sym = (&e + e.transpose()) * 0.5;
        v.set_column(col, &svec_oracle(&sym));
    }
    v
}

/// `½ V (G ⊗ K + K ⊗ G) Vᵀ` with an explicit Kronecker product.
pub fn sym_kron_oracle(g: &DMatrix<f64>, k: &DMatrix<f64>) -> DMatrix<f64> {
    let n = g.nrows();
    let kron = |a: &DMatrix<f64>, b: &DMatrix<f64>| {
        DMatrix::from_fn(n * n, n * n, |r, c| a[(r / n, c / n)] * b[(r % n, c % n)])
    };
    let v = v_oracle(n);
    &v * (kron(g, k) + kron(k, g)) * v.transpose() * 0.5
}

pub fn rel_err(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).norm() / b.norm().max(f64::MIN_POSITIVE)
}

/// Symmetric principal square root by Denman-Beavers iteration.
pub fn sqrt_oracle(a: &DMatrix<f64>) -> DMatrix<f64> {
    let n = a.nrows();
    let mut y = a.clone();
    let mut z = DMatrix::identity(n, n);
    for _ in 0..100 {
        let yi = y.clone().try_inverse().expect("nonsingular iterate");
        let zi = z.clone().try_inverse().expect("nonsingular iterate");
        let y_next = (&y + zi) * 0.5;
        z = (&z + yi) * 0.5;
        let done = (&y_next - &y).norm() <= 1e-15 * y_next.norm();
        y = y_next;
        if done {
            break;
        }
    }
    (&y + y.transpose()) * 0.5
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(points: &[(f64, f64)]) -> f64 {
    let k = points.len() as f64;
    let (sx, sy) = points.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x.ln(), b + y.ln()));
    let (mx, my) = (sx / k, sy / k);
    let (num, den) = points.iter().fold((0.0, 0.0), |(n, d), (x, y)| {
        let dx = x.ln() - mx;
        (n + dx * (y.ln() - my), d + dx * dx)
    });
    num / den
}
