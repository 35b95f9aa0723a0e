//! Hilbert-Schmidt (flat) random density matrices over the three rings.
//!
//! Real and complex: `rho = G G^† / tr(G G^†)` with a Ginibre `G` of width
//! 5 and 4 respectively. Quaternion: Laguerre eigenvalues conjugated by a
//! Haar symplectic unitary (see [`laguerre_symplectic`]).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::matrix::{Matrix4, Ring};
use super::quaternion::Quaternion;

/// A sampled density matrix (Hermitian, unit trace, positive semidefinite).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix {
    matrix: Matrix4,
}

impl DensityMatrix {
    pub fn matrix(&self) -> &Matrix4 {
        &self.matrix
    }

    pub fn ring(&self) -> Ring {
        self.matrix.ring
    }

    /// Wraps a matrix after checking Hermiticity and unit trace within
    /// `tol`. Positivity is not re-checked here; see
    /// [`min_embedding_eigenvalue`](super::min_embedding_eigenvalue).
    pub fn try_from_matrix(matrix: Matrix4, tol: f64) -> Option<Self> {
        (matrix.is_hermitian(tol) && (matrix.trace() - 1.0).abs() <= tol)
            .then_some(DensityMatrix { matrix })
    }
}

/// Deterministic random stream for sample `index` under `seed`.
///
/// ChaCha's 64-bit stream id carries the sample index, so sample `i` sees
/// the same numbers no matter how samples are spread over threads.
pub fn sample_stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn normal_entry<R: Rng + ?Sized>(ring: Ring, rng: &mut R) -> Quaternion {
    let mut g = || rng.sample::<f64, _>(StandardNormal);
    match ring {
        Ring::Real => Quaternion::real(g()),
        Ring::Complex => {
            let re = g();
            Quaternion::complex(re, g())
        }
        Ring::Quaternion => {
            let w = g();
            let x = g();
            let y = g();
            Quaternion::new(w, x, y, g())
        }
    }
}

/// Square root of a chi-squared variate with an integer number of degrees
/// of freedom.
fn chi<R: Rng + ?Sized>(dof: u32, rng: &mut R) -> f64 {
    (0..dof)
        .map(|_| rng.sample::<f64, _>(StandardNormal).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// Columns of the Ginibre factor giving a flat eigenvalue weight: the
/// Wishart eigenvalue density carries `prod lambda^((K - N + 1) beta/2 - 1)`,
/// which vanishes at `K = N + 1` for reals and `K = N` for complexes.
fn ginibre_columns(ring: Ring) -> usize {
    match ring {
        Ring::Real => 5,
        _ => 4,
    }
}

/// `W = G G^†` for a 4 x K Ginibre `G`.
fn wishart<R: Rng + ?Sized>(ring: Ring, rng: &mut R) -> [[Quaternion; 4]; 4] {
    let cols = ginibre_columns(ring);
    let mut g = [[Quaternion::ZERO; 5]; 4];
    for row in g.iter_mut() {
        for e in row.iter_mut().take(cols) {
            *e = normal_entry(ring, rng);
        }
    }
    let mut w = [[Quaternion::ZERO; 4]; 4];
    for i in 0..4 {
        for j in i..4 {
            let mut s = Quaternion::ZERO;
            for k in 0..cols {
                s += g[i][k] * g[j][k].conj();
            }
            if i == j {
                s = Quaternion::real(s.w);
            }
            w[i][j] = s;
            w[j][i] = s.conj();
        }
    }
    w
}

/// Haar-distributed 4x4 quaternionic unitary, by Gram-Schmidt on a
/// quaternionic Ginibre matrix (right-module inner product).
fn haar_symplectic<R: Rng + ?Sized>(rng: &mut R) -> [[Quaternion; 4]; 4] {
    let mut cols = [[Quaternion::ZERO; 4]; 4];
    for col in cols.iter_mut() {
        for e in col.iter_mut() {
            *e = normal_entry(Ring::Quaternion, rng);
        }
    }
    for k in 0..4 {
        for j in 0..k {
            // v_k -= u_j <u_j, v_k>
            let mut ip = Quaternion::ZERO;
            for i in 0..4 {
                ip += cols[j][i].conj() * cols[k][i];
            }
            for i in 0..4 {
                let t = cols[j][i] * ip;
                cols[k][i] = cols[k][i] - t;
            }
        }
        let norm = cols[k].iter().map(|q| q.norm_sqr()).sum::<f64>().sqrt();
        for e in cols[k].iter_mut() {
            *e = e.scale(1.0 / norm);
        }
    }
    let mut u = [[Quaternion::ZERO; 4]; 4];
    for (c, col) in cols.iter().enumerate() {
        for (r, &e) in col.iter().enumerate() {
            u[r][c] = e;
        }
    }
    u
}

/// Quaternionic analogue of [`wishart`] with a flat eigenvalue weight.
///
/// No integer Ginibre width works for quaternions (it would need
/// K = N - 1/2), so the eigenvalues come from the beta = 4 Laguerre
/// tridiagonal model with parameter `a = 1 + 2 (N - 1)`, and the
/// eigenvectors from conjugation by a Haar symplectic unitary. The real
/// tridiagonal `L` has real orthogonal eigenvectors, which Haar measure
/// absorbs, so `U L U^†` needs no diagonalisation.
fn laguerre_symplectic<R: Rng + ?Sized>(rng: &mut R) -> [[Quaternion; 4]; 4] {
    // Bidiagonal B: diagonal chi_{14}, chi_{10}, chi_6, chi_2,
    // subdiagonal chi_{12}, chi_8, chi_4.
    let d = [chi(14, rng), chi(10, rng), chi(6, rng), chi(2, rng)];
    let s = [chi(12, rng), chi(8, rng), chi(4, rng)];
    let mut b = [[0.0f64; 4]; 4];
    for i in 0..4 {
        b[i][i] = d[i];
        if i < 3 {
            b[i + 1][i] = s[i];
        }
    }
    let mut l = [[0.0f64; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            l[i][j] = (0..4).map(|k| b[i][k] * b[j][k]).sum();
        }
    }
    let u = haar_symplectic(rng);
    let mut w = [[Quaternion::ZERO; 4]; 4];
    for i in 0..4 {
        for j in i..4 {
            let mut acc = Quaternion::ZERO;
            for k in 0..4 {
                for m in 0..4 {
                    if l[k][m] != 0.0 {
                        acc += (u[i][k] * u[j][m].conj()).scale(l[k][m]);
                    }
                }
            }
            if i == j {
                acc = Quaternion::real(acc.w);
            }
            w[i][j] = acc;
            w[j][i] = acc.conj();
        }
    }
    w
}

/// Draws one density matrix. Returns it with the number of degenerate
/// (zero-trace) draws that had to be discarded first.
pub fn sample_density_counted<R: Rng + ?Sized>(ring: Ring, rng: &mut R) -> (DensityMatrix, u64) {
    let mut rejected = 0;
    loop {
        let mut w = match ring {
            Ring::Quaternion => laguerre_symplectic(rng),
            _ => wishart(ring, rng),
        };
        let tr: f64 = (0..4).map(|i| w[i][i].w).sum();
        if tr <= 0.0 || !tr.is_finite() {
            rejected += 1;
            continue;
        }
        let inv = 1.0 / tr;
        for row in w.iter_mut() {
            for e in row.iter_mut() {
                *e = e.scale(inv);
            }
        }
        let matrix = Matrix4 { ring, entries: w };
        return (DensityMatrix { matrix }, rejected);
    }
}

pub fn sample_density<R: Rng + ?Sized>(ring: Ring, rng: &mut R) -> DensityMatrix {
    sample_density_counted(ring, rng).0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::matrix::hermitian_eigenvalues;
    use crate::quantum::min_embedding_eigenvalue;

    #[test]
    fn construction_invariants() {
        for ring in Ring::ALL {
            for i in 0..200 {
                let rho = sample_density(ring, &mut sample_stream(7, i));
                let m = rho.matrix();
                assert!((m.trace() - 1.0).abs() < 1e-12);
                assert_eq!(m.hermitian_defect(), 0.0);
                assert!(min_embedding_eigenvalue(m) >= -1e-12);
            }
        }
    }

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a = sample_density(Ring::Complex, &mut sample_stream(1, 5));
        let b = sample_density(Ring::Complex, &mut sample_stream(1, 5));
        let c = sample_density(Ring::Complex, &mut sample_stream(1, 6));
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn quaternion_embedding_eigenvalues_pair_up() {
        for i in 0..50 {
            let rho = sample_density(Ring::Quaternion, &mut sample_stream(3, i));
            let e = rho.matrix().complex_embedding();
            let rows: Vec<Vec<_>> = e.iter().map(|r| r.to_vec()).collect();
            let ev = hermitian_eigenvalues(&rows);
            assert_eq!(ev.len(), 8);
            for pair in ev.chunks(2) {
                assert!((pair[0] - pair[1]).abs() < 1e-9, "{ev:?}");
            }
        }
    }

    #[test]
    fn real_samples_stay_real() {
        let rho = sample_density(Ring::Real, &mut sample_stream(11, 0));
        for q in rho.matrix().entries.iter().flatten() {
            assert_eq!((q.x, q.y, q.z), (0.0, 0.0, 0.0));
        }
    }
}
