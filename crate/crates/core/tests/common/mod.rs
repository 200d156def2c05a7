#![allow(dead_code)]

//! Shared test oracles, independent of the library's integration path.

use nalgebra::{DMatrix, Matrix3};
use num_complex::Complex64;
use stirap_core::qdyn::{CMat3, DensityMatrix3};

/// Elementwise damping rates restated from the master-equation definition:
/// Γ/2 on every entry touching |e⟩ (Γ on ρ_ee), relative-linewidth dephasing
/// γ on ρ_fg and ρ_eg.
pub fn damping_from_rates(gamma_e: f64, gamma_laser: f64) -> Matrix3<f64> {
    let mut d = Matrix3::zeros();
    for i in 0..3 {
        for j in 0..3 {
            let mut r = 0.5 * gamma_e * (((i == 1) as u8 + (j == 1) as u8) as f64);
            if (i == 2) != (j == 2) {
                r += gamma_laser;
            }
            d[(i, j)] = r;
        }
    }
    d
}

/// Column-stacked vectorization index of element (i, j).
fn idx(i: usize, j: usize) -> usize {
    3 * j + i
}

/// Vectorized Liouvillian: d vec(ρ)/dt = L vec(ρ) with
/// dρ_ij/dt = −i Σ_k (H_ik ρ_kj − ρ_ik H_kj) − D_ij ρ_ij.
pub fn liouvillian(h: &CMat3, damping: &Matrix3<f64>) -> DMatrix<Complex64> {
    let mi = Complex64::new(0.0, -1.0);
    let mut l = DMatrix::<Complex64>::zeros(9, 9);
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                // −i H_ik ρ_kj
                l[(idx(i, j), idx(k, j))] += mi * h[(i, k)];
                // +i ρ_ik H_kj
                l[(idx(i, j), idx(i, k))] -= mi * h[(k, j)];
            }
            l[(idx(i, j), idx(i, j))] -= Complex64::new(damping[(i, j)], 0.0);
        }
    }
    l
}

/// Matrix exponential by scaling and squaring with a Taylor series.
pub fn expm(m: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let n = m.nrows();
    let norm: f64 = m.iter().map(|c| c.norm()).fold(0.0, f64::max) * n as f64;
    let s = if norm > 0.5 { (norm / 0.5).log2().ceil() as u32 } else { 0 };
    let scaled = m.map(|c| c / (2.0f64.powi(s as i32)));
    let mut result = DMatrix::<Complex64>::identity(n, n);
    let mut term = DMatrix::<Complex64>::identity(n, n);
    for k in 1..60 {
        term = (&term * &scaled).map(|c| c / (k as f64));
        result += &term;
        let t: f64 = term.iter().map(|c| c.norm()).fold(0.0, f64::max);
        if t < 1e-22 {
            break;
        }
    }
    for _ in 0..s {
        result = &result * &result;
    }
    result
}

/// Evolve a density matrix for time `t` under constant H via the
/// matrix-exponential route.
pub fn expm_evolve(rho0: &DensityMatrix3, h: &CMat3, damping: &Matrix3<f64>, t: f64) -> CMat3 {
    let l = liouvillian(h, damping);
    let u = expm(&l.map(|c| c * t));
    let mut v = DMatrix::<Complex64>::zeros(9, 1);
    for i in 0..3 {
        for j in 0..3 {
            v[(idx(i, j), 0)] = rho0.rho[(i, j)];
        }
    }
    let w = u * v;
    let mut out = CMat3::zeros();
    for i in 0..3 {
        for j in 0..3 {
            out[(i, j)] = w[(idx(i, j), 0)];
        }
    }
    out
}

/// Deterministic standard-normal samples (Box-Muller over a seeded stream).
pub fn gaussian_noise(seed: u64, n: usize) -> Vec<f64> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let u1: f64 = rng.gen_range(1e-12..1.0);
            let u2: f64 = rng.gen();
            (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
        })
        .collect()
}
