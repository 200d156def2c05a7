//! Bloch bands of the sinusoidal lattice by plane-wave diagonalization.
//!
//! At quasimomentum q̃ (units of π/a, spanning (−1, 1]) the Hamiltonian in
//! the plane-wave basis e^{i2πlx/a}, |l| ≤ L, is tridiagonal in E_r units:
//! diagonal (2l + q̃)² + s/2, off-diagonal −s/4 between l and l±1. Energies
//! are measured from the potential minimum V = 0.

use super::{recoil_energy, LatticeError, LatticeParams};
use nalgebra::{DMatrix, DVector};

/// Default quasimomentum grid size.
pub const DEFAULT_N_Q: usize = 64;
/// Default number of retained bands.
pub const DEFAULT_N_BANDS: usize = 12;

/// Bloch energies and plane-wave eigenvectors on a quasimomentum grid.
#[derive(Debug, Clone, PartialEq)]
pub struct BandStructure {
    pub params: LatticeParams,
    /// q̃ grid in units of π/a: −1 + 2(j+1)/n_q, j = 0..n_q−1 (spans (−1, 1]).
    q_grid: Vec<f64>,
    /// E_n(q) in E_r units, index [iq * n_bands + n].
    energies: Vec<f64>,
    /// Plane-wave coefficients, index [(iq * n_bands + n) * dim + (l + L)].
    coeffs: Vec<f64>,
    n_bands: usize,
    dim: usize,
    /// E_r/ħ in rad/μs, cached for band-basis time evolution.
    er_rad_per_us: f64,
}

impl BandStructure {
    pub fn n_q(&self) -> usize {
        self.q_grid.len()
    }

    pub fn n_bands(&self) -> usize {
        self.n_bands
    }

    /// Plane-wave basis size 2L+1.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn q_grid(&self) -> &[f64] {
        &self.q_grid
    }

    pub fn er_rad_per_us(&self) -> f64 {
        self.er_rad_per_us
    }

    /// E_n(q̃_iq) in E_r units.
    pub fn energy(&self, iq: usize, band: usize) -> f64 {
        self.energies[iq * self.n_bands + band]
    }

    /// Plane-wave coefficients of band `band` at grid point `iq`.
    pub fn coeffs(&self, iq: usize, band: usize) -> &[f64] {
        let start = (iq * self.n_bands + band) * self.dim;
        &self.coeffs[start..start + self.dim]
    }

    /// Mean of E_n(q) over the grid (E_r units).
    pub fn mean_band_energy(&self, band: usize) -> f64 {
        let s: f64 = (0..self.n_q()).map(|iq| self.energy(iq, band)).sum();
        s / self.n_q() as f64
    }

    /// max − min of E_n(q) over the grid (E_r units).
    pub fn bandwidth(&self, band: usize) -> f64 {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for iq in 0..self.n_q() {
            let e = self.energy(iq, band);
            lo = lo.min(e);
            hi = hi.max(e);
        }
        hi - lo
    }

    /// Grid index of q̃ = 0.
    pub fn iq_zero(&self) -> usize {
        self.q_grid
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.abs().partial_cmp(&b.1.abs()).unwrap())
            .unwrap()
            .0
    }

    /// Grid index of the zone edge q̃ = 1.
    pub fn iq_edge(&self) -> usize {
        self.q_grid.len() - 1
    }

    pub(crate) fn compatible(&self, other: &BandStructure) -> Result<(), LatticeError> {
        let a = &self.params;
        let b = &other.params;
        if (a.period_nm - b.period_nm).abs() > 1e-12 || (a.mass_kg - b.mass_kg).abs() > 1e-40 {
            return Err(LatticeError::Mismatch("period or mass differs".into()));
        }
        if self.n_q() != other.n_q() || self.dim != other.dim {
            return Err(LatticeError::Mismatch("grid or basis size differs".into()));
        }
        Ok(())
    }
}

/// Diagonalize with the default grid (64 quasimomenta, 12 bands).
pub fn bloch_bands(params: &LatticeParams) -> Result<BandStructure, LatticeError> {
    bloch_bands_with(params, DEFAULT_N_Q, DEFAULT_N_BANDS)
}

/// Diagonalize on an `n_q`-point grid retaining `n_bands` bands.
pub fn bloch_bands_with(
    params: &LatticeParams,
    n_q: usize,
    n_bands: usize,
) -> Result<BandStructure, LatticeError> {
    params.validate()?;
    if n_q < 2 {
        return Err(LatticeError::InvalidParameter("need at least 2 quasimomenta".into()));
    }
    let dim = 2 * params.cutoff + 1;
    // the top few plane-wave states are truncation artifacts
    if n_bands + 4 > dim {
        return Err(LatticeError::BasisTooSmall { needed: n_bands, got: dim });
    }
    let er = recoil_energy(params)?;
    let l_max = params.cutoff as isize;
    let s = params.depth;
    let q_grid: Vec<f64> = (0..n_q).map(|j| -1.0 + 2.0 * (j + 1) as f64 / n_q as f64).collect();
    let mut energies = vec![0.0; n_q * n_bands];
    let mut coeffs = vec![0.0; n_q * n_bands * dim];

    for (iq, &qt) in q_grid.iter().enumerate() {
        let mut h = DMatrix::<f64>::zeros(dim, dim);
        for (i, l) in (-l_max..=l_max).enumerate() {
            let k = 2.0 * l as f64 + qt;
            h[(i, i)] = k * k + 0.5 * s;
            if i + 1 < dim {
                h[(i, i + 1)] = -0.25 * s;
                h[(i + 1, i)] = -0.25 * s;
            }
        }
        let eig = h.symmetric_eigen();
        let mut order: Vec<usize> = (0..dim).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());

        let mut vecs: Vec<DVector<f64>> = (0..n_bands)
            .map(|n| eig.eigenvectors.column(order[n]).into_owned())
            .collect();
        let evs: Vec<f64> = (0..n_bands).map(|n| eig.eigenvalues[order[n]]).collect();

        // at the parity-symmetric quasimomenta, resolve (near-)degenerate
        // pairs into parity eigenstates; see `purify_parity`
        let at_zero = qt.abs() < 1e-12;
        let at_edge = (qt - 1.0).abs() < 1e-12;
        if at_zero || at_edge {
            purify_parity(&mut vecs, &evs, dim, at_edge);
        }

        for (n, v) in vecs.iter_mut().enumerate() {
            fix_sign(v);
            energies[iq * n_bands + n] = evs[n];
            let start = (iq * n_bands + n) * dim;
            coeffs[start..start + dim].copy_from_slice(v.as_slice());
        }
    }

    Ok(BandStructure {
        params: *params,
        q_grid,
        energies,
        coeffs,
        n_bands,
        dim,
        er_rad_per_us: er.rad_per_us(),
    })
}

/// Reflect the coefficient index under the point symmetry of H(q̃):
/// l → −l at q̃ = 0, l → −1−l at q̃ = 1 (the unpaired l = L entry maps
/// outside the basis and is treated as zero there).
fn reflect(v: &DVector<f64>, dim: usize, edge: bool) -> DVector<f64> {
    let mut r = DVector::zeros(dim);
    for i in 0..dim {
        let j = if edge {
            // i = l + L → l' = −1−l → j = dim − 2 − i
            if i + 2 > dim {
                continue;
            }
            dim - 2 - i
        } else {
            dim - 1 - i
        };
        r[j] = v[i];
    }
    r
}

/// Nearly-free band pairs are degenerate to below machine precision at the
/// symmetric quasimomenta, so the eigensolver returns arbitrary rotations
/// within each pair. Project every eigenvector onto its dominant parity
/// component; for degenerate pairs assign parity (−1)^n, the pattern the
/// resolved bands follow (Mathieu ce/se alternation).
fn purify_parity(vecs: &mut [DVector<f64>], evs: &[f64], dim: usize, edge: bool) {
    let n = vecs.len();
    let mut i = 0;
    while i < n {
        let degenerate = i + 1 < n && (evs[i + 1] - evs[i]).abs() < 1e-6 * evs[i].abs().max(1.0);
        if degenerate {
            let sym = {
                let a = &vecs[i];
                let s = (a + reflect(a, dim, edge)) * 0.5;
                if s.norm() > 0.3 {
                    s.normalize()
                } else {
                    let b = &vecs[i + 1];
                    ((b + reflect(b, dim, edge)) * 0.5).normalize()
                }
            };
            let anti = {
                let a = &vecs[i];
                let s = (a - reflect(a, dim, edge)) * 0.5;
                if s.norm() > 0.3 {
                    s.normalize()
                } else {
                    let b = &vecs[i + 1];
                    ((b - reflect(b, dim, edge)) * 0.5).normalize()
                }
            };
            if i % 2 == 0 {
                vecs[i] = sym;
                vecs[i + 1] = anti;
            } else {
                vecs[i] = anti;
                vecs[i + 1] = sym;
            }
            i += 2;
        } else {
            let v = &vecs[i];
            let r = reflect(v, dim, edge);
            let sym = (v + &r) * 0.5;
            let anti = (v - &r) * 0.5;
            vecs[i] = if sym.norm() >= anti.norm() { sym.normalize() } else { anti.normalize() };
            i += 1;
        }
    }
}

/// Global phase convention: the largest-magnitude coefficient (lowest l on
/// ties) is made positive.
fn fix_sign(v: &mut DVector<f64>) {
    let mut max = 0.0f64;
    for i in 0..v.len() {
        max = max.max(v[i].abs());
    }
    let mut k = 0;
    for i in 0..v.len() {
        if v[i].abs() >= max - 1e-12 * max.max(1.0) {
            k = i;
            break;
        }
    }
    if v[k] < 0.0 {
        for i in 0..v.len() {
            v[i] = -v[i];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn rb2_bands(depth: f64) -> BandStructure {
        bloch_bands(&LatticeParams::rb2(depth)).unwrap()
    }

    #[test]
    fn free_particle_limit() {
        let b = rb2_bands(0.0);
        let iq0 = b.iq_zero();
        assert_abs_diff_eq!(b.energy(iq0, 0), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(b.energy(b.iq_edge(), 0), 1.0, epsilon = 1e-12);
        // folded parabola: E_1(0) = E_2(0) = 4
        assert_abs_diff_eq!(b.energy(iq0, 1), 4.0, epsilon = 1e-12);
        assert_abs_diff_eq!(b.energy(iq0, 2), 4.0, epsilon = 1e-12);
    }

    #[test]
    fn deep_lattice_harmonic_gap() {
        // E₁(0) − E₀(0) ≈ 2√s E_r within 10% at s = 60 (anharmonic shift ≈ E_r)
        let b = rb2_bands(60.0);
        let iq0 = b.iq_zero();
        let gap = b.energy(iq0, 1) - b.energy(iq0, 0);
        let harmonic = 2.0 * 60.0f64.sqrt();
        assert!((gap / harmonic - 1.0).abs() < 0.10, "gap {gap}, harmonic {harmonic}");
        assert_abs_diff_eq!(gap, 14.4137, epsilon = 1e-3);
    }

    #[test]
    fn harmonic_limit_tightens_with_depth() {
        // 5% agreement at s = 200
        let b = rb2_bands(200.0);
        let iq0 = b.iq_zero();
        let gap = b.energy(iq0, 1) - b.energy(iq0, 0);
        assert!((gap / (2.0 * 200.0f64.sqrt()) - 1.0).abs() < 0.05);
    }

    #[test]
    fn shallow_lattice_band_energies() {
        let b = rb2_bands(6.0);
        let iq0 = b.iq_zero();
        assert_abs_diff_eq!(b.energy(iq0, 0), 2.0632, epsilon = 1e-3);
        assert_abs_diff_eq!(b.energy(iq0, 1), 6.8143, epsilon = 1e-3);
        assert_abs_diff_eq!(b.energy(iq0, 2), 7.7468, epsilon = 1e-3);
        // low bands narrow, higher bands quasi-free
        assert!(b.bandwidth(0) < 0.25);
        assert!(b.bandwidth(2) > 10.0 * b.bandwidth(0));
    }

    #[test]
    fn band_symmetry_and_ordering() {
        let b = rb2_bands(6.0);
        let nq = b.n_q();
        for j in 0..nq - 1 {
            let jm = nq - 2 - j; // q̃ partner with opposite sign
            for n in 0..b.n_bands() {
                assert!((b.energy(j, n) - b.energy(jm, n)).abs() < 1e-10);
            }
        }
        for iq in 0..nq {
            for n in 0..b.n_bands() - 1 {
                assert!(b.energy(iq, n) <= b.energy(iq, n + 1) + 1e-12);
            }
        }
    }

    #[test]
    fn cutoff_convergence() {
        // energies of the lowest 10 bands move < 1e-8 E_r when L → L+5
        for depth in [6.0, 100.0] {
            let p = LatticeParams::rb2(depth);
            let small = bloch_bands_with(&p, 16, 10).unwrap();
            let mut bigger = p;
            bigger.cutoff += 5;
            let large = bloch_bands_with(&bigger, 16, 10).unwrap();
            for iq in 0..16 {
                for n in 0..10 {
                    assert!(
                        (small.energy(iq, n) - large.energy(iq, n)).abs() < 1e-8,
                        "s={depth} iq={iq} n={n}"
                    );
                }
            }
        }
    }

    #[test]
    fn parity_pure_at_symmetric_quasimomenta() {
        let b = rb2_bands(6.0);
        for (iq, edge) in [(b.iq_zero(), false), (b.iq_edge(), true)] {
            for n in 0..b.n_bands() {
                let v = DVector::from_column_slice(b.coeffs(iq, n));
                let r = reflect(&v, b.dim(), edge);
                let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
                let err = (&v - r * sign).norm();
                assert!(err < 1e-9, "iq={iq} n={n} err={err:.2e}");
            }
        }
    }

    #[test]
    fn basis_size_guard() {
        let mut p = LatticeParams::rb2(6.0);
        p.cutoff = 6; // 13 plane waves
        assert!(matches!(
            bloch_bands_with(&p, 8, 12),
            Err(LatticeError::BasisTooSmall { .. })
        ));
    }
}
