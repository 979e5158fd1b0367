use std::collections::BTreeMap;
use std::f64::consts::TAU;

use num_complex::Complex64;

use super::DynamicalSystem;
use crate::error::{invalid, Error, Result};
use crate::lattice::GroupElement;
use crate::operator::{ComplexMatrix, State, ONE, ZERO};

const UNITARY_TOL: f64 = 1e-10;

/// A matrix algebra `M_N` with an invariant state and a Z^q-action by
/// conjugation, `τ_g(a) = (U^g)* a U^g` with `U^g = U_1^{g_1} ⋯ U_q^{g_q}`.
///
/// The generators must be unitary and commute up to scalar phases; the phases
/// cancel under conjugation, which makes `g ↦ τ_g` a group action.
#[derive(Clone, Debug)]
pub struct FiniteSystem {
    label: String,
    state: State,
    generators: Vec<ComplexMatrix>,
    named: BTreeMap<String, ComplexMatrix>,
}

impl FiniteSystem {
    pub fn new(state: State, generators: Vec<ComplexMatrix>) -> Result<Self> {
        if generators.is_empty() {
            return invalid("finite system needs at least one generator");
        }
        let n = state.dim();
        for (i, u) in generators.iter().enumerate() {
            if u.dim() != n {
                return Err(Error::DimensionMismatch { expected: n, found: u.dim() });
            }
            if !u.is_unitary(UNITARY_TOL) {
                return invalid(format!("generator {i} is not unitary"));
            }
            let moved = &(u * state.density()) * &u.adjoint();
            if moved.max_abs_diff(state.density()) > UNITARY_TOL {
                return invalid(format!("state is not invariant under generator {i}"));
            }
        }
        for i in 0..generators.len() {
            for j in i + 1..generators.len() {
                if phase_commutator(&generators[i], &generators[j]).is_none() {
                    return invalid(format!("generators {i} and {j} do not commute up to a phase"));
                }
            }
        }
        Ok(Self { label: "finite".into(), state, generators, named: BTreeMap::new() })
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn with_named(mut self, name: impl Into<String>, m: ComplexMatrix) -> Result<Self> {
        if m.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: m.dim() });
        }
        self.named.insert(name.into(), m);
        Ok(self)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn dim(&self) -> usize {
        self.state.dim()
    }

    pub fn state(&self) -> &State {
        &self.state
    }

    pub fn generators(&self) -> &[ComplexMatrix] {
        &self.generators
    }

    pub fn named(&self, name: &str) -> Option<&ComplexMatrix> {
        self.named.get(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.named.keys().map(String::as_str)
    }

    /// `U^g = U_1^{g_1} ⋯ U_q^{g_q}`.
    pub fn implementing_unitary(&self, g: &GroupElement) -> ComplexMatrix {
        assert_eq!(g.dim(), self.generators.len(), "lattice dimension mismatch");
        let mut w = ComplexMatrix::identity(self.dim());
        for (u, &e) in self.generators.iter().zip(g.coords()) {
            if e != 0 {
                w = &w * &u.unitary_pow(e);
            }
        }
        w
    }

    /// `a ⊗ ā`, the element whose product-system correlations are squared moduli.
    pub fn lift(a: &ComplexMatrix) -> ComplexMatrix {
        a.kron(&a.conjugate())
    }
}

/// Returns `c` with `UV = c·VU`, `|c| = 1`, if it exists.
pub fn phase_commutator(u: &ComplexMatrix, v: &ComplexMatrix) -> Option<Complex64> {
    let uv = u * v;
    let vu = v * u;
    let c = (&vu.adjoint() * &uv).trace() / u.dim() as f64;
    if (c.norm() - 1.0).abs() > UNITARY_TOL {
        return None;
    }
    (uv.max_abs_diff(&vu.scale(c)) <= UNITARY_TOL).then_some(c)
}

impl DynamicalSystem for FiniteSystem {
    type Obs = ComplexMatrix;

    fn lattice_dim(&self) -> usize {
        self.generators.len()
    }

    fn check(&self, a: &ComplexMatrix) -> Result<()> {
        if a.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: a.dim() });
        }
        Ok(())
    }

    fn identity(&self) -> ComplexMatrix {
        ComplexMatrix::identity(self.dim())
    }

    fn act(&self, g: &GroupElement, a: &ComplexMatrix) -> ComplexMatrix {
        if g.is_zero() {
            return a.clone();
        }
        let w = self.implementing_unitary(g);
        &(&w.adjoint() * a) * &w
    }

    fn multiply(&self, factors: &[ComplexMatrix]) -> ComplexMatrix {
        let mut it = factors.iter();
        let Some(first) = it.next() else {
            return self.identity();
        };
        it.fold(first.clone(), |acc, f| &acc * f)
    }

    fn adjoint(&self, a: &ComplexMatrix) -> ComplexMatrix {
        a.adjoint()
    }

    fn combine(&self, terms: &[(Complex64, &ComplexMatrix)]) -> ComplexMatrix {
        terms.iter().fold(ComplexMatrix::zeros(self.dim()), |acc, (c, a)| &acc + &a.scale(*c))
    }

    fn expectation(&self, a: &ComplexMatrix) -> Complex64 {
        self.state.apply_unchecked(a)
    }

    fn operator_norm(&self, a: &ComplexMatrix) -> f64 {
        a.operator_norm()
    }

    fn min_eigenvalue(&self, a: &ComplexMatrix) -> Option<f64> {
        let scale = a.operator_norm().max(1.0);
        a.is_hermitian(1e-12 * scale).then(|| a.hermitian_eigenvalues()[0])
    }

    fn is_tracial(&self) -> bool {
        self.state.is_tracial()
    }
}

/// `(A ⊗ Ā, ω ⊗ ω̄, τ ⊗ τ)`, generated by `U_j ⊗ Ū_j`.
pub fn product_system(sys: &FiniteSystem) -> Result<FiniteSystem> {
    let rho = sys.state.density();
    let state = State::new(rho.kron(&rho.conjugate()))?;
    let generators = sys.generators.iter().map(FiniteSystem::lift).collect();
    Ok(FiniteSystem::new(state, generators)?.with_label(format!("{}⊗conj", sys.label)))
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Clock `diag(1, ζ, …, ζ^{Q−1})` with `ζ = e^{2πi p/Q}`.
pub fn clock_matrix(p: i64, q_den: usize) -> ComplexMatrix {
    let values: Vec<Complex64> = (0..q_den)
        .map(|k| {
            // reduce k·p mod Q before forming the angle to keep phases exact
            root_of_unity((k as i64 * p).rem_euclid(q_den as i64) as usize, q_den)
        })
        .collect();
    ComplexMatrix::diag(&values)
}

/// `e^{2πi r/Q}` with the quarter turns exact.
pub fn root_of_unity(r: usize, q_den: usize) -> Complex64 {
    let r = r % q_den;
    if r == 0 {
        ONE
    } else if 4 * r == q_den {
        Complex64::new(0.0, 1.0)
    } else if 2 * r == q_den {
        -ONE
    } else if 4 * r == 3 * q_den {
        Complex64::new(0.0, -1.0)
    } else {
        Complex64::from_polar(1.0, TAU * r as f64 / q_den as f64)
    }
}

/// Cyclic shift `V e_j = e_{j+1 mod Q}`.
pub fn shift_matrix(q_den: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(q_den, |i, j| if i == (j + 1) % q_den { ONE } else { ZERO })
}

/// The rational rotation algebra `UV = e^{2πi p/Q} VU` on `M_Q` with its
/// unique trace and the Z-action `τ^n = Ad((U*)^n)`.
pub fn rotation_algebra_system(p: i64, q_den: usize) -> Result<FiniteSystem> {
    if q_den < 2 {
        return invalid("rotation algebra needs Q ≥ 2");
    }
    if gcd(p.unsigned_abs(), q_den as u64) != 1 {
        return invalid(format!("gcd({p}, {q_den}) ≠ 1"));
    }
    let u = clock_matrix(p, q_den);
    let v = shift_matrix(q_den);
    let zeta = Complex64::from_polar(1.0, TAU * p as f64 / q_den as f64);
    let uv = &u * &v;
    let vu = &v * &u;
    if uv.max_abs_diff(&vu.scale(zeta)) > 1e-12 {
        return Err(Error::Numerical("clock and shift fail the rotation relation".into()));
    }
    FiniteSystem::new(State::normalized_trace(q_den), vec![u.clone()])?
        .with_label(format!("rotation(p={p},Q={q_den})"))
        .with_named("U", u)?
        .with_named("V", v)
}

/// Clock and shift on `M_Q` as a Z²-action generated by `Ad(U*)` and `Ad(V*)`.
pub fn clock_shift_system(q_den: usize) -> Result<FiniteSystem> {
    if q_den < 2 {
        return invalid("clock-shift system needs Q ≥ 2");
    }
    let u = clock_matrix(1, q_den);
    let v = shift_matrix(q_den);
    FiniteSystem::new(State::normalized_trace(q_den), vec![u.clone(), v.clone()])?
        .with_label(format!("clock_shift(Q={q_den})"))
        .with_named("U", u)?
        .with_named("V", v)
}

/// The classical rotation of Z_n, realized on the diagonal of `M_n` with the
/// cyclic permutation and the uniform trace.
pub fn cyclic_system(n: usize) -> Result<FiniteSystem> {
    if n < 2 {
        return invalid("cyclic system needs n ≥ 2");
    }
    let p = shift_matrix(n);
    FiniteSystem::new(State::normalized_trace(n), vec![p.clone()])?
        .with_label(format!("cyclic(n={n})"))
        .with_named("P", p)
}

/// All generators equal to the identity.
pub fn trivial_system(n: usize, q: usize) -> Result<FiniteSystem> {
    FiniteSystem::new(State::normalized_trace(n), vec![ComplexMatrix::identity(n); q.max(1)])
        .map(|s| s.with_label(format!("trivial(N={n})")))
}
