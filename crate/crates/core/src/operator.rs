//! Dense complex matrices, states and the ω-seminorm.
//!
//! `ComplexMatrix` is a thin newtype over `nalgebra::DMatrix<Complex64>`; it
//! exists so that the JSON layout (nested `[re, im]` pairs) and the handful of
//! algebra operations the crate needs live in one place.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{invalid, Error, Result};

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Clone, PartialEq)]
pub struct ComplexMatrix(DMatrix<Complex64>);

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ComplexMatrix({}×{})", self.dim(), self.dim())?;
        if self.dim() <= 4 {
            write!(f, " {}", self.0)?;
        }
        Ok(())
    }
}

impl ComplexMatrix {
    pub fn from_inner(m: DMatrix<Complex64>) -> Result<Self> {
        if m.nrows() != m.ncols() || m.nrows() == 0 {
            return invalid(format!("matrix must be square and nonempty, got {}×{}", m.nrows(), m.ncols()));
        }
        Ok(Self(m))
    }

    pub(crate) fn wrap(m: DMatrix<Complex64>) -> Self {
        debug_assert_eq!(m.nrows(), m.ncols());
        Self(m)
    }

    pub fn zeros(n: usize) -> Self {
        Self(DMatrix::zeros(n, n))
    }

    pub fn identity(n: usize) -> Self {
        Self(DMatrix::identity(n, n))
    }

    pub fn from_fn(n: usize, f: impl FnMut(usize, usize) -> Complex64) -> Self {
        Self(DMatrix::from_fn(n, n, f))
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return invalid("matrix rows must form a nonempty square array");
        }
        Ok(Self::from_fn(n, |i, j| rows[i][j]))
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let rows: Vec<Vec<Complex64>> =
            rows.iter().map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)).collect()).collect();
        Self::from_rows(&rows)
    }

    pub fn diag(values: &[Complex64]) -> Self {
        let n = values.len();
        Self::from_fn(n, |i, j| if i == j { values[i] } else { ZERO })
    }

    /// Matrix unit `E_{ij}`.
    pub fn unit(n: usize, i: usize, j: usize) -> Self {
        Self::from_fn(n, |r, c| if r == i && c == j { ONE } else { ZERO })
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn inner(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<Complex64> {
        self.0
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.0[(i, j)]
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    /// Entrywise conjugate, the concrete image of `a` in the conjugate algebra.
    pub fn conjugate(&self) -> Self {
        Self(self.0.map(|z| z.conj()))
    }

    pub fn trace(&self) -> Complex64 {
        self.0.trace()
    }

    pub fn normalized_trace(&self) -> Complex64 {
        self.trace() / self.dim() as f64
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self(&self.0 * c)
    }

    pub fn kron(&self, other: &Self) -> Self {
        Self(self.0.kronecker(&other.0))
    }

    pub fn commutator(&self, other: &Self) -> Self {
        Self(&self.0 * &other.0 - &other.0 * &self.0)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest singular value.
    pub fn operator_norm(&self) -> f64 {
        let sv = self.0.clone().svd(false, false).singular_values;
        sv.iter().copied().fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.0.iter().zip(other.0.iter()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.max_abs_diff(&self.adjoint()) <= tol
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        let p = Self(self.0.adjoint() * &self.0);
        p.max_abs_diff(&Self::identity(self.dim())) <= tol
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn hermitian_eigenvalues(&self) -> Vec<f64> {
        let h = (&self.0 + self.0.adjoint()) * Complex64::new(0.5, 0.0);
        let mut ev: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    /// Non-negative integer power by repeated squaring.
    pub fn pow(&self, mut e: u64) -> Self {
        let mut base = self.0.clone();
        let mut acc = DMatrix::identity(self.dim(), self.dim());
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        Self(acc)
    }

    /// Integer power of a unitary, with `U^{-k} = (U*)^k`.
    pub fn unitary_pow(&self, e: i64) -> Self {
        if e >= 0 {
            self.pow(e as u64)
        } else {
            self.adjoint().pow(e.unsigned_abs())
        }
    }

    /// Row-major entry vector.
    pub fn to_vec(&self) -> Vec<Complex64> {
        let n = self.dim();
        (0..n * n).map(|k| self.0[(k / n, k % n)]).collect()
    }

    pub fn from_vec(n: usize, v: &[Complex64]) -> Self {
        assert_eq!(v.len(), n * n);
        Self::from_fn(n, |i, j| v[i * n + j])
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 + &rhs.0)
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 - &rhs.0)
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 * &rhs.0)
    }
}

impl Serialize for ComplexMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let n = self.dim();
        let rows: Vec<Vec<[f64; 2]>> =
            (0..n).map(|i| (0..n).map(|j| [self.0[(i, j)].re, self.0[(i, j)].im]).collect()).collect();
        rows.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ComplexMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let rows: Vec<Vec<[f64; 2]>> = Vec::deserialize(deserializer)?;
        let rows: Vec<Vec<Complex64>> =
            rows.into_iter().map(|r| r.into_iter().map(|[re, im]| Complex64::new(re, im)).collect()).collect();
        ComplexMatrix::from_rows(&rows).map_err(D::Error::custom)
    }
}

/// A positive normalized functional `a ↦ tr(ρa)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct State {
    density: ComplexMatrix,
    tracial: bool,
}

impl State {
    /// Validates Hermiticity, positivity and unit trace of `density`.
    pub fn new(density: ComplexMatrix) -> Result<Self> {
        let n = density.dim();
        if !density.is_hermitian(1e-12) {
            return invalid("density matrix is not Hermitian");
        }
        let tr = density.trace();
        if (tr - ONE).norm() > 1e-12 {
            return invalid(format!("density matrix has trace {tr}, expected 1"));
        }
        let min = density.hermitian_eigenvalues()[0];
        if min < -1e-12 {
            return Err(Error::NotPositive(min));
        }
        // on a full matrix algebra the only trace is the normalized trace
        let tracial =
            density.max_abs_diff(&ComplexMatrix::identity(n).scale(Complex64::new(1.0 / n as f64, 0.0))) <= 1e-12;
        Ok(Self { density, tracial })
    }

    pub fn normalized_trace(n: usize) -> Self {
        Self { density: ComplexMatrix::identity(n).scale(Complex64::new(1.0 / n as f64, 0.0)), tracial: true }
    }

    /// Pure state on the `k`-th basis vector.
    pub fn basis(n: usize, k: usize) -> Self {
        Self { density: ComplexMatrix::unit(n, k, k), tracial: n == 1 }
    }

    pub fn dim(&self) -> usize {
        self.density.dim()
    }

    pub fn density(&self) -> &ComplexMatrix {
        &self.density
    }

    pub fn is_tracial(&self) -> bool {
        self.tracial
    }

    pub fn apply(&self, a: &ComplexMatrix) -> Result<Complex64> {
        if a.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: a.dim() });
        }
        Ok(self.apply_unchecked(a))
    }

    /// `tr(ρa) = Σ_ij ρ_ij a_ji`.
    pub(crate) fn apply_unchecked(&self, a: &ComplexMatrix) -> Complex64 {
        let n = self.dim();
        let rho = self.density.inner();
        let a = a.inner();
        let mut acc = crate::reduce::ComplexSum::new();
        for i in 0..n {
            for j in 0..n {
                acc.add(rho[(i, j)] * a[(j, i)]);
            }
        }
        acc.value()
    }

    pub fn seminorm(&self) -> OmegaSeminorm<'_> {
        OmegaSeminorm { state: self }
    }
}

/// `‖a‖_ω = √ω(a*a)`.
#[derive(Clone, Copy, Debug)]
pub struct OmegaSeminorm<'a> {
    state: &'a State,
}

impl OmegaSeminorm<'_> {
    /// `⟨a, b⟩_ω = ω(a*b)`.
    pub fn inner(&self, a: &ComplexMatrix, b: &ComplexMatrix) -> Result<Complex64> {
        self.state.apply(&(&a.adjoint() * b))
    }

    pub fn norm(&self, a: &ComplexMatrix) -> Result<f64> {
        Ok(self.inner(a, a)?.re.max(0.0).sqrt())
    }
}

pub fn apply_state(state: &State, a: &ComplexMatrix) -> Result<Complex64> {
    state.apply(a)
}

pub fn omega_norm(state: &State, a: &ComplexMatrix) -> Result<f64> {
    state.seminorm().norm(a)
}

pub fn operator_norm(a: &ComplexMatrix) -> f64 {
    a.operator_norm()
}

pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kron(b)
}

pub fn conjugate_lift(a: &ComplexMatrix) -> ComplexMatrix {
    a.conjugate()
}

/// `Σ_j (∏_{l<j} c_l)(c_j − d_j)(∏_{l>j} d_l)`, which equals `∏c − ∏d`.
pub fn telescope_decompose(c: &[ComplexMatrix], d: &[ComplexMatrix]) -> Result<ComplexMatrix> {
    if c.is_empty() || c.len() != d.len() {
        return invalid(format!("telescope needs equal nonzero lengths, got {} and {}", c.len(), d.len()));
    }
    let n = c[0].dim();
    if let Some(m) = c.iter().chain(d).find(|m| m.dim() != n) {
        return Err(Error::DimensionMismatch { expected: n, found: m.dim() });
    }
    let k = c.len();
    // suffix[j] = d_j d_{j+1} … d_{k-1}
    let mut suffix = vec![ComplexMatrix::identity(n); k + 1];
    for j in (0..k).rev() {
        suffix[j] = &d[j] * &suffix[j + 1];
    }
    let mut prefix = ComplexMatrix::identity(n);
    let mut total = ComplexMatrix::zeros(n);
    for j in 0..k {
        let term = &(&prefix * &(&c[j] - &d[j])) * &suffix[j + 1];
        total = &total + &term;
        prefix = &prefix * &c[j];
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn state_examples() {
        let tr = State::normalized_trace(2);
        assert_eq!(tr.apply(&ComplexMatrix::identity(2)).unwrap(), ONE);
        assert_eq!(tr.apply(&ComplexMatrix::diag(&[c(1.0), c(-1.0)])).unwrap(), ZERO);
        let pure = State::basis(2, 0);
        assert_eq!(pure.apply(&ComplexMatrix::diag(&[c(3.5), c(-2.0)])).unwrap(), c(3.5));
        assert!(tr.apply(&ComplexMatrix::identity(3)).is_err());
    }

    #[test]
    fn state_validation() {
        assert!(State::new(ComplexMatrix::diag(&[c(0.5), c(0.6)])).is_err());
        assert!(matches!(State::new(ComplexMatrix::diag(&[c(1.5), c(-0.5)])), Err(Error::NotPositive(_))));
        let s = State::new(ComplexMatrix::diag(&[c(0.5), c(0.5)])).unwrap();
        assert!(s.is_tracial());
        let s = State::new(ComplexMatrix::diag(&[c(0.7), c(0.3)])).unwrap();
        assert!(!s.is_tracial());
    }

    #[test]
    fn omega_norm_examples() {
        let tr = State::normalized_trace(2);
        assert_eq!(omega_norm(&tr, &ComplexMatrix::identity(2)).unwrap(), 1.0);
        assert_eq!(omega_norm(&tr, &ComplexMatrix::diag(&[c(1.0), c(-1.0)])).unwrap(), 1.0);
        assert_eq!(omega_norm(&tr, &ComplexMatrix::zeros(2)).unwrap(), 0.0);
    }

    #[test]
    fn operator_norm_examples() {
        assert!((operator_norm(&ComplexMatrix::identity(3)) - 1.0).abs() < 1e-12);
        assert!((operator_norm(&ComplexMatrix::diag(&[c(2.0), c(1.0)])) - 2.0).abs() < 1e-12);
        let zeta = Complex64::from_polar(1.0, std::f64::consts::TAU / 5.0);
        let clock = ComplexMatrix::diag(&(0..5).map(|k| zeta.powi(k)).collect::<Vec<_>>());
        assert!((operator_norm(&clock) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn tensor_identity() {
        assert_eq!(tensor(&ComplexMatrix::identity(2), &ComplexMatrix::identity(3)), ComplexMatrix::identity(6));
    }

    #[test]
    fn pow_matches_repeated_product() {
        let m = ComplexMatrix::from_real_rows(&[vec![0.0, 1.0], vec![1.0, 1.0]]).unwrap();
        let p = m.pow(10);
        // Fibonacci: [[F9, F10],[F10, F11]]
        assert_eq!(p.get(0, 1), c(55.0));
        assert_eq!(p.get(1, 1), c(89.0));
        assert_eq!(m.pow(0), ComplexMatrix::identity(2));
    }

    #[test]
    fn telescope_edge_cases() {
        let a = ComplexMatrix::from_real_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        let b = ComplexMatrix::from_real_rows(&[vec![0.0, 1.0], vec![-1.0, 0.5]]).unwrap();
        assert_eq!(telescope_decompose(std::slice::from_ref(&a), std::slice::from_ref(&b)).unwrap(), &a - &b);
        let same = telescope_decompose(&[a.clone(), b.clone()], &[a.clone(), b.clone()]).unwrap();
        assert_eq!(same, ComplexMatrix::zeros(2));
        assert!(telescope_decompose(std::slice::from_ref(&a), &[]).is_err());
        assert!(telescope_decompose(&[a], &[ComplexMatrix::identity(3)]).is_err());
    }

    #[test]
    fn json_layout() {
        let m =
            ComplexMatrix::from_rows(&[vec![Complex64::new(1.0, 0.5), ZERO], vec![ZERO, Complex64::new(-0.25, 2.0)]])
                .unwrap();
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(s, "[[[1.0,0.5],[0.0,0.0]],[[0.0,0.0],[-0.25,2.0]]]");
        assert!(serde_json::from_str::<ComplexMatrix>("[[[1,0],[0,0]]]").is_err());
    }
}
