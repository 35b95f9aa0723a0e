//! 4x4 Hermitian matrices over the real, complex and quaternion rings, the
//! partial transpose, and determinants (ordinary and Moore).

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::quaternion::Quaternion;
use crate::error::{Error, Result};
use crate::numeric::BigRational;

/// Entry ring of a density matrix, labelled by its Dyson-like index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Ring {
    #[serde(rename = "rebit")]
    Real,
    #[serde(rename = "qubit")]
    Complex,
    #[serde(rename = "quabit")]
    Quaternion,
}

impl Ring {
    pub const ALL: [Ring; 3] = [Ring::Real, Ring::Complex, Ring::Quaternion];

    /// Real 1/2, complex 1, quaternion 2.
    pub fn alpha(self) -> BigRational {
        match self {
            Ring::Real => BigRational::from((1, 2)),
            Ring::Complex => BigRational::from(1),
            Ring::Quaternion => BigRational::from(2),
        }
    }

    /// Real normal components per matrix entry.
    pub fn components(self) -> usize {
        match self {
            Ring::Real => 1,
            Ring::Complex => 2,
            Ring::Quaternion => 4,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Ring::Real => "rebit",
            Ring::Complex => "qubit",
            Ring::Quaternion => "quabit",
        }
    }

    /// Whether `q` only uses components this ring allows.
    fn admits(self, q: Quaternion) -> bool {
        match self {
            Ring::Real => q.x == 0.0 && q.y == 0.0 && q.z == 0.0,
            Ring::Complex => q.y == 0.0 && q.z == 0.0,
            Ring::Quaternion => true,
        }
    }
}

impl fmt::Display for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Ring {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rebit" | "real" => Ok(Ring::Real),
            "qubit" | "complex" => Ok(Ring::Complex),
            "quabit" | "quaternion" => Ok(Ring::Quaternion),
            other => Err(Error::Invalid(format!(
                "unknown ensemble {other:?} (expected rebit, qubit or quabit)"
            ))),
        }
    }
}

/// Hermiticity tolerance for matrices supplied from outside the sampler.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Tolerance on the discarded imaginary part of a complex Hermitian
/// determinant.
pub const DET_IMAG_TOL: f64 = 1e-10;

/// Residual allowed in the polynomial square root behind the Moore
/// determinant.
pub const SQRT_RESIDUAL_TOL: f64 = 1e-8;

/// A 4x4 matrix whose entries live in `ring`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Matrix4 {
    pub ring: Ring,
    pub entries: [[Quaternion; 4]; 4],
}

impl Matrix4 {
    pub fn new(ring: Ring, entries: [[Quaternion; 4]; 4]) -> Result<Self> {
        for row in &entries {
            for &q in row {
                if !ring.admits(q) {
                    return Err(Error::Invalid(format!("entry {q:?} is not in the {ring} ring")));
                }
            }
        }
        Ok(Matrix4 { ring, entries })
    }

    pub fn from_real(ring: Ring, rows: [[f64; 4]; 4]) -> Self {
        let mut entries = [[Quaternion::ZERO; 4]; 4];
        for (r, row) in rows.iter().enumerate() {
            for (c, &v) in row.iter().enumerate() {
                entries[r][c] = Quaternion::real(v);
            }
        }
        Matrix4 { ring, entries }
    }

    pub fn diagonal(ring: Ring, d: [f64; 4]) -> Self {
        let mut rows = [[0.0; 4]; 4];
        for i in 0..4 {
            rows[i][i] = d[i];
        }
        Matrix4::from_real(ring, rows)
    }

    pub fn identity_over_4(ring: Ring) -> Self {
        Matrix4::diagonal(ring, [0.25; 4])
    }

    /// Largest deviation from `entry[i][j] = conj(entry[j][i])`.
    pub fn hermitian_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..4 {
            for j in i..4 {
                worst = worst.max(self.entries[i][j].max_abs_diff(self.entries[j][i].conj()));
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_defect() <= tol * self.scale().max(1.0)
    }

    fn scale(&self) -> f64 {
        self.entries
            .iter()
            .flatten()
            .map(|q| q.norm_sqr().sqrt())
            .fold(0.0, f64::max)
    }

    pub fn trace(&self) -> f64 {
        (0..4).map(|i| self.entries[i][i].w).sum()
    }

    /// Swaps the off-diagonal 2x2 blocks: `[[A, B], [B^†, D]] -> [[A, B^†], [B, D]]`.
    ///
    /// This is the partial transpose on the first subsystem. It only moves
    /// entries, so trace and Hermiticity survive exactly and applying it
    /// twice is the identity.
    pub fn partial_transpose(&self) -> Result<Matrix4> {
        if !self.is_hermitian(HERMITIAN_TOL) {
            return Err(Error::Invalid(format!(
                "partial transpose needs a Hermitian matrix (defect {:e})",
                self.hermitian_defect()
            )));
        }
        Ok(self.block_swap())
    }

    pub(crate) fn block_swap(&self) -> Matrix4 {
        let mut out = *self;
        for r in 0..2 {
            for c in 0..2 {
                out.entries[r][2 + c] = self.entries[2 + r][c];
                out.entries[2 + r][c] = self.entries[r][2 + c];
            }
        }
        out
    }

    /// Entries as complex numbers; only meaningful for the real and complex
    /// rings.
    pub fn to_complex(&self) -> [[Complex64; 4]; 4] {
        let mut m = [[Complex64::new(0.0, 0.0); 4]; 4];
        for r in 0..4 {
            for c in 0..4 {
                m[r][c] = self.entries[r][c].as_complex();
            }
        }
        m
    }

    /// The 8x8 complex matrix replacing each entry by its 2x2 block.
    pub fn complex_embedding(&self) -> [[Complex64; 8]; 8] {
        let mut e = [[Complex64::new(0.0, 0.0); 8]; 8];
        for r in 0..4 {
            for c in 0..4 {
                let b = self.entries[r][c].complex_block();
                for i in 0..2 {
                    for j in 0..2 {
                        e[2 * r + i][2 * c + j] = b[i][j];
                    }
                }
            }
        }
        e
    }
}

/// Determinant of a real or complex Hermitian 4x4 matrix.
pub fn determinant(m: &Matrix4) -> Result<f64> {
    if m.ring == Ring::Quaternion {
        return Err(Error::Invalid(
            "ordinary determinant is undefined over the quaternions; use moore_determinant".into(),
        ));
    }
    let mut a = m.to_complex();
    let d = lu_determinant(&mut a);
    if d.im.abs() > DET_IMAG_TOL {
        return Err(Error::Numerical(format!(
            "determinant has imaginary part {:e}",
            d.im
        )));
    }
    Ok(d.re)
}

/// Moore determinant of a quaternionic Hermitian 4x4 matrix.
///
/// The characteristic polynomial of the 8x8 complex embedding is the square
/// of a monic quartic `q`; the Moore determinant is `q(0)`.
pub fn moore_determinant(m: &Matrix4) -> Result<f64> {
    let e = m.complex_embedding();
    let p = characteristic_polynomial(&e)?;
    let (q, residual) = polynomial_sqrt_monic(&p);
    let scale = p.iter().fold(1.0f64, |s, c| s.max(c.abs()));
    if residual > SQRT_RESIDUAL_TOL * scale {
        return Err(Error::Numerical(format!(
            "characteristic polynomial is not a square (residual {residual:e}); input is not Hermitian-embeddable"
        )));
    }
    Ok(q[0])
}

/// Determinant appropriate to the ring: ordinary for real/complex, Moore for
/// quaternion.
pub fn ring_determinant(m: &Matrix4) -> Result<f64> {
    match m.ring {
        Ring::Quaternion => moore_determinant(m),
        _ => determinant(m),
    }
}

/// Gaussian elimination with partial pivoting; destroys `a`.
pub(crate) fn lu_determinant<const N: usize>(a: &mut [[Complex64; N]; N]) -> Complex64 {
    let mut det = Complex64::new(1.0, 0.0);
    for col in 0..N {
        let pivot = (col..N)
            .max_by(|&i, &j| a[i][col].norm().total_cmp(&a[j][col].norm()))
            .unwrap();
        if a[pivot][col].norm() == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        if pivot != col {
            a.swap(pivot, col);
            det = -det;
        }
        let p = a[col][col];
        det *= p;
        for r in col + 1..N {
            let f = a[r][col] / p;
            if f == Complex64::new(0.0, 0.0) {
                continue;
            }
            for c in col..N {
                let v = a[col][c];
                a[r][c] -= f * v;
            }
        }
    }
    det
}

/// Coefficients `c_0..c_8` (ascending) of `det(t I - A)` for a Hermitian 8x8
/// `A`, by the Faddeev-LeVerrier recursion.
fn characteristic_polynomial(a: &[[Complex64; 8]; 8]) -> Result<[f64; 9]> {
    const N: usize = 8;
    let zero = Complex64::new(0.0, 0.0);
    let mut coeffs = [0.0f64; N + 1];
    coeffs[N] = 1.0;
    // M_1 = I, c_{n-1} = -tr(A)
    let mut m = [[zero; N]; N];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = Complex64::new(1.0, 0.0);
    }
    let mut worst_imag = 0.0f64;
    for k in 1..=N {
        let mut am = [[zero; N]; N];
        for i in 0..N {
            for l in 0..N {
                let ail = a[i][l];
                if ail == zero {
                    continue;
                }
                for j in 0..N {
                    am[i][j] += ail * m[l][j];
                }
            }
        }
        let tr: Complex64 = (0..N).map(|i| am[i][i]).sum();
        let c = -tr / k as f64;
        worst_imag = worst_imag.max(c.im.abs());
        coeffs[N - k] = c.re;
        if k < N {
            m = am;
            for i in 0..N {
                m[i][i] += Complex64::new(c.re, 0.0);
            }
        }
    }
    if worst_imag > 1e-9 {
        return Err(Error::Numerical(format!(
            "characteristic polynomial has imaginary coefficients ({worst_imag:e}); input is not Hermitian"
        )));
    }
    Ok(coeffs)
}

/// Monic quartic `q` (ascending coefficients, `q[4] = 1`) with `q^2 = p`
/// for a monic octic `p`, by back-substitution from the top coefficients.
/// Returns `q` and the largest mismatch in the low coefficients.
fn polynomial_sqrt_monic(p: &[f64; 9]) -> ([f64; 5], f64) {
    let mut q = [0.0f64; 5];
    q[4] = 1.0;
    // Coefficient of t^(4+i) in q^2 determines q[i], for i = 3, 2, 1, 0.
    for i in (0..4).rev() {
        let mut known = 0.0;
        for a in i + 1..=4 {
            let b = 4 + i - a;
            if b > i && b <= 4 {
                known += q[a] * q[b];
            }
        }
        q[i] = (p[4 + i] - known) / 2.0;
    }
    let mut residual = 0.0f64;
    for deg in 0..4 {
        let mut s = 0.0;
        for a in 0..=deg {
            s += q[a] * q[deg - a];
        }
        residual = residual.max((s - p[deg]).abs());
    }
    (q, residual)
}

/// Eigenvalues (ascending) of a complex Hermitian matrix given as rows, via
/// cyclic Jacobi on the real symmetric embedding `[[Re, -Im], [Im, Re]]`.
pub fn hermitian_eigenvalues(h: &[Vec<Complex64>]) -> Vec<f64> {
    let n = h.len();
    let m = 2 * n;
    let mut s = vec![vec![0.0f64; m]; m];
    for r in 0..n {
        for c in 0..n {
            let z = h[r][c];
            s[r][c] = z.re;
            s[n + r][n + c] = z.re;
            s[r][n + c] = -z.im;
            s[n + r][c] = z.im;
        }
    }
    let mut eig = jacobi_symmetric(s);
    eig.sort_by(f64::total_cmp);
    // every eigenvalue of the embedding is doubled
    eig.into_iter().step_by(2).collect()
}

fn jacobi_symmetric(mut a: Vec<Vec<f64>>) -> Vec<f64> {
    let n = a.len();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    (0..n).map(|i| a[i][i]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bell() -> Matrix4 {
        let mut rows = [[0.0; 4]; 4];
        for &(r, c) in &[(0, 0), (0, 3), (3, 0), (3, 3)] {
            rows[r][c] = 0.5;
        }
        Matrix4::from_real(Ring::Complex, rows)
    }

    #[test]
    fn mixed_state_values() {
        for ring in Ring::ALL {
            let m = Matrix4::identity_over_4(ring);
            let pt = m.partial_transpose().unwrap();
            assert_eq!(pt, m);
            let d = ring_determinant(&pt).unwrap();
            assert!((d - 1.0 / 256.0).abs() < 1e-15, "{ring}: {d}");
        }
    }

    #[test]
    fn bell_state_partial_transpose_determinant() {
        let pt = bell().partial_transpose().unwrap();
        let d = determinant(&pt).unwrap();
        assert!((d + 1.0 / 16.0).abs() < 1e-15);
        let mut q = bell();
        q.ring = Ring::Quaternion;
        let dq = moore_determinant(&q.partial_transpose().unwrap()).unwrap();
        assert!((dq + 1.0 / 16.0).abs() < 1e-12);
    }

    #[test]
    fn diagonal_determinants() {
        let d = [0.5, 0.25, 0.125, 0.125];
        for ring in Ring::ALL {
            let m = Matrix4::diagonal(ring, d);
            let v = ring_determinant(&m).unwrap();
            assert!((v - 1.0 / 512.0).abs() < 1e-15);
        }
    }

    #[test]
    fn pure_product_state_is_singular() {
        // |00><00|
        let m = Matrix4::diagonal(Ring::Complex, [1.0, 0.0, 0.0, 0.0]);
        assert!(determinant(&m).unwrap().abs() < 1e-12);
        assert!(determinant(&m.partial_transpose().unwrap()).unwrap().abs() < 1e-12);
    }

    #[test]
    fn non_hermitian_rejected() {
        let mut m = Matrix4::identity_over_4(Ring::Complex);
        m.entries[0][1] = Quaternion::complex(0.1, 0.2);
        assert!(m.partial_transpose().is_err());
    }

    #[test]
    fn ordinary_determinant_refuses_quaternions() {
        assert!(determinant(&Matrix4::identity_over_4(Ring::Quaternion)).is_err());
    }

    #[test]
    fn ring_membership_enforced() {
        let mut e = [[Quaternion::ZERO; 4]; 4];
        e[0][0] = Quaternion::new(1.0, 0.0, 1.0, 0.0);
        assert!(Matrix4::new(Ring::Complex, e).is_err());
        assert!(Matrix4::new(Ring::Quaternion, e).is_ok());
    }

    #[test]
    fn polynomial_square_root_detects_non_squares() {
        // (t^4 + 1)^2 = t^8 + 2 t^4 + 1
        let p = [1.0, 0.0, 0.0, 0.0, 2.0, 0.0, 0.0, 0.0, 1.0];
        let (q, r) = polynomial_sqrt_monic(&p);
        assert_eq!(q, [1.0, 0.0, 0.0, 0.0, 1.0]);
        assert_eq!(r, 0.0);
        let mut bad = p;
        bad[1] = 0.5;
        assert!(polynomial_sqrt_monic(&bad).1 >= 0.5);
    }

    #[test]
    fn eigenvalues_of_diagonal() {
        let h: Vec<Vec<Complex64>> = (0..3)
            .map(|r| {
                (0..3)
                    .map(|c| Complex64::new(if r == c { r as f64 } else { 0.0 }, 0.0))
                    .collect()
            })
            .collect();
        let e = hermitian_eigenvalues(&h);
        assert_eq!(e.len(), 3);
        for (i, v) in e.iter().enumerate() {
            assert!((v - i as f64).abs() < 1e-12);
        }
    }
}
