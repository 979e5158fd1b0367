//! Dynamical-system backends and the shared evaluation interface.

pub mod finite;
pub mod quasilocal;

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::lattice::{GroupElement, Homomorphism};
use crate::operator::{ComplexMatrix, ONE};

pub use finite::{
    clock_shift_system, cyclic_system, product_system, rotation_algebra_system, trivial_system, FiniteSystem,
};
pub use quasilocal::{shift_system, LocalObservable, QuasiLocalSystem};

/// A C*-algebra with an invariant state and a Z^q-action by automorphisms.
///
/// Observables are checked once with [`DynamicalSystem::check`]; the other
/// methods assume valid input.
pub trait DynamicalSystem: Sync {
    type Obs: Clone + Send + Sync;

    fn lattice_dim(&self) -> usize;
    fn check(&self, a: &Self::Obs) -> Result<()>;
    fn identity(&self) -> Self::Obs;
    fn act(&self, g: &GroupElement, a: &Self::Obs) -> Self::Obs;
    fn multiply(&self, factors: &[Self::Obs]) -> Self::Obs;
    fn adjoint(&self, a: &Self::Obs) -> Self::Obs;
    fn combine(&self, terms: &[(Complex64, &Self::Obs)]) -> Self::Obs;
    fn expectation(&self, a: &Self::Obs) -> Complex64;
    fn operator_norm(&self, a: &Self::Obs) -> f64;
    /// Smallest eigenvalue, or `None` when `a` is not self-adjoint.
    fn min_eigenvalue(&self, a: &Self::Obs) -> Option<f64>;
    fn is_tracial(&self) -> bool;

    fn product_expectation(&self, factors: &[Self::Obs]) -> Complex64 {
        self.expectation(&self.multiply(factors))
    }

    /// `‖a‖_ω = ω(a*a)^{1/2}`.
    fn omega_norm(&self, a: &Self::Obs) -> f64 {
        let v = self.product_expectation(&[self.adjoint(a), a.clone()]).re;
        v.max(0.0).sqrt()
    }

    fn difference(&self, a: &Self::Obs, b: &Self::Obs) -> Self::Obs {
        self.combine(&[(ONE, a), (-ONE, b)])
    }

    fn commutator_norm(&self, a: &Self::Obs, b: &Self::Obs) -> f64 {
        let ab = self.multiply(&[a.clone(), b.clone()]);
        let ba = self.multiply(&[b.clone(), a.clone()]);
        self.operator_norm(&self.difference(&ab, &ba))
    }

    fn is_positive(&self, a: &Self::Obs) -> bool {
        self.min_eigenvalue(a).is_some_and(|m| m >= -1e-12)
    }

    fn check_hom(&self, phi: &Homomorphism) -> Result<()> {
        if phi.dim() != self.lattice_dim() {
            return Err(Error::DimensionMismatch { expected: self.lattice_dim(), found: phi.dim() });
        }
        Ok(())
    }

    fn check_element(&self, g: &GroupElement) -> Result<()> {
        if g.dim() != self.lattice_dim() {
            return Err(Error::DimensionMismatch { expected: self.lattice_dim(), found: g.dim() });
        }
        Ok(())
    }
}

/// `ω(∏_j τ_{φ_j(g)}(a_j))`.
pub fn evaluate<S: DynamicalSystem>(
    sys: &S,
    factors: &[(&S::Obs, &Homomorphism)],
    g: &GroupElement,
) -> Result<Complex64> {
    if factors.is_empty() {
        return invalid("evaluate needs at least one factor");
    }
    sys.check_element(g)?;
    for (a, phi) in factors {
        sys.check(a)?;
        sys.check_hom(phi)?;
    }
    Ok(evaluate_unchecked(sys, factors, g))
}

pub(crate) fn evaluate_unchecked<S: DynamicalSystem>(
    sys: &S,
    factors: &[(&S::Obs, &Homomorphism)],
    g: &GroupElement,
) -> Complex64 {
    let moved: Vec<S::Obs> = factors.iter().map(|(a, phi)| sys.act(&phi.apply(g), a)).collect();
    sys.product_expectation(&moved)
}

/// `‖[a, τ_{φ(g)}(b)]‖`.
pub fn commutator_norm<S: DynamicalSystem>(
    sys: &S,
    a: &S::Obs,
    b: &S::Obs,
    phi: &Homomorphism,
    g: &GroupElement,
) -> Result<f64> {
    sys.check(a)?;
    sys.check(b)?;
    sys.check_hom(phi)?;
    sys.check_element(g)?;
    Ok(sys.commutator_norm(a, &sys.act(&phi.apply(g), b)))
}

/// Observable of either backend.
#[derive(Clone, Debug, PartialEq)]
pub enum Observable {
    Matrix(ComplexMatrix),
    Local(LocalObservable),
}

impl From<ComplexMatrix> for Observable {
    fn from(m: ComplexMatrix) -> Self {
        Observable::Matrix(m)
    }
}

impl From<LocalObservable> for Observable {
    fn from(a: LocalObservable) -> Self {
        Observable::Local(a)
    }
}

impl Observable {
    pub fn as_matrix(&self) -> Option<&ComplexMatrix> {
        match self {
            Observable::Matrix(m) => Some(m),
            Observable::Local(_) => None,
        }
    }

    pub fn as_local(&self) -> Option<&LocalObservable> {
        match self {
            Observable::Local(a) => Some(a),
            Observable::Matrix(_) => None,
        }
    }
}

/// Either backend behind one interface.
#[derive(Clone, Debug)]
pub enum SystemHandle {
    Finite(FiniteSystem),
    QuasiLocal(QuasiLocalSystem),
}

impl From<FiniteSystem> for SystemHandle {
    fn from(s: FiniteSystem) -> Self {
        SystemHandle::Finite(s)
    }
}

impl From<QuasiLocalSystem> for SystemHandle {
    fn from(s: QuasiLocalSystem) -> Self {
        SystemHandle::QuasiLocal(s)
    }
}

fn matrices(obs: &[Observable]) -> Vec<ComplexMatrix> {
    obs.iter().map(|o| mat(o).clone()).collect()
}

fn locals(obs: &[Observable]) -> Vec<LocalObservable> {
    obs.iter().map(|o| loc(o).clone()).collect()
}

fn mat(o: &Observable) -> &ComplexMatrix {
    o.as_matrix().expect("matrix observable on the finite backend")
}

fn loc(o: &Observable) -> &LocalObservable {
    o.as_local().expect("local observable on the quasi-local backend")
}

impl SystemHandle {
    pub fn as_finite(&self) -> Option<&FiniteSystem> {
        match self {
            SystemHandle::Finite(s) => Some(s),
            SystemHandle::QuasiLocal(_) => None,
        }
    }

    pub fn as_quasi_local(&self) -> Option<&QuasiLocalSystem> {
        match self {
            SystemHandle::QuasiLocal(s) => Some(s),
            SystemHandle::Finite(_) => None,
        }
    }

    pub fn backend_name(&self) -> &'static str {
        match self {
            SystemHandle::Finite(_) => "finite",
            SystemHandle::QuasiLocal(_) => "quasi_local",
        }
    }
}

impl DynamicalSystem for SystemHandle {
    type Obs = Observable;

    fn lattice_dim(&self) -> usize {
        match self {
            SystemHandle::Finite(s) => s.lattice_dim(),
            SystemHandle::QuasiLocal(s) => s.lattice_dim(),
        }
    }

    fn check(&self, a: &Observable) -> Result<()> {
        match (self, a) {
            (SystemHandle::Finite(s), Observable::Matrix(m)) => s.check(m),
            (SystemHandle::QuasiLocal(s), Observable::Local(l)) => s.check(l),
            (SystemHandle::Finite(_), _) => Err(Error::BackendMismatch("finite system needs a matrix observable")),
            (SystemHandle::QuasiLocal(_), _) => {
                Err(Error::BackendMismatch("quasi-local system needs a local observable"))
            }
        }
    }

    fn identity(&self) -> Observable {
        match self {
            SystemHandle::Finite(s) => s.identity().into(),
            SystemHandle::QuasiLocal(s) => s.identity().into(),
        }
    }

    fn act(&self, g: &GroupElement, a: &Observable) -> Observable {
        match self {
            SystemHandle::Finite(s) => s.act(g, mat(a)).into(),
            SystemHandle::QuasiLocal(s) => s.act(g, loc(a)).into(),
        }
    }

    fn multiply(&self, factors: &[Observable]) -> Observable {
        match self {
            SystemHandle::Finite(s) => s.multiply(&matrices(factors)).into(),
            SystemHandle::QuasiLocal(s) => s.multiply(&locals(factors)).into(),
        }
    }

    fn adjoint(&self, a: &Observable) -> Observable {
        match self {
            SystemHandle::Finite(s) => s.adjoint(mat(a)).into(),
            SystemHandle::QuasiLocal(s) => s.adjoint(loc(a)).into(),
        }
    }

    fn combine(&self, terms: &[(Complex64, &Observable)]) -> Observable {
        match self {
            SystemHandle::Finite(s) => {
                let t: Vec<_> = terms.iter().map(|(c, a)| (*c, mat(a))).collect();
                s.combine(&t).into()
            }
            SystemHandle::QuasiLocal(s) => {
                let t: Vec<_> = terms.iter().map(|(c, a)| (*c, loc(a))).collect();
                s.combine(&t).into()
            }
        }
    }

    fn expectation(&self, a: &Observable) -> Complex64 {
        match self {
            SystemHandle::Finite(s) => s.expectation(mat(a)),
            SystemHandle::QuasiLocal(s) => s.expectation(loc(a)),
        }
    }

    fn operator_norm(&self, a: &Observable) -> f64 {
        match self {
            SystemHandle::Finite(s) => s.operator_norm(mat(a)),
            SystemHandle::QuasiLocal(s) => s.operator_norm(loc(a)),
        }
    }

    fn min_eigenvalue(&self, a: &Observable) -> Option<f64> {
        match self {
            SystemHandle::Finite(s) => s.min_eigenvalue(mat(a)),
            SystemHandle::QuasiLocal(s) => s.min_eigenvalue(loc(a)),
        }
    }

    fn is_tracial(&self) -> bool {
        match self {
            SystemHandle::Finite(s) => s.is_tracial(),
            SystemHandle::QuasiLocal(s) => s.is_tracial(),
        }
    }

    fn product_expectation(&self, factors: &[Observable]) -> Complex64 {
        match self {
            SystemHandle::Finite(s) => s.product_expectation(&matrices(factors)),
            SystemHandle::QuasiLocal(s) => s.product_expectation(&locals(factors)),
        }
    }

    fn commutator_norm(&self, a: &Observable, b: &Observable) -> f64 {
        match self {
            SystemHandle::Finite(s) => s.commutator_norm(mat(a), mat(b)),
            SystemHandle::QuasiLocal(s) => s.commutator_norm(loc(a), loc(b)),
        }
    }
}
