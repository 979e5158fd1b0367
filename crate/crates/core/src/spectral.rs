//! GNS space, Koopman unitaries and the eigenvector splitting of finite
//! systems, plus the multiple-recurrence driver for both backends.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::compactness::{szemeredi_average_compact, CompactSzemerediReport};
use crate::error::{invalid, Error, Result};
use crate::lattice::{FolnerWindow, GroupElement, HomSet, Homomorphism};
use crate::mixing::{collision_bound, window_means, HigherOrderSpec};
use crate::operator::{ComplexMatrix, ONE, ZERO};
use crate::systems::{DynamicalSystem, FiniteSystem, LocalObservable, Observable, QuasiLocalSystem, SystemHandle};

const FAITHFUL_TOL: f64 = 1e-10;
const UNITARY_TOL: f64 = 1e-10;
pub const CLUSTER_TOL: f64 = 1e-8;
const DOUBLE_COMMUTANT_MAX_N: usize = 6;

/// The GNS space of `(M_N, ω)` for a faithful state, realized on the
/// row-major matrix-unit basis with Gram form `⟨E_ij, E_kl⟩ = δ_ik ρ_lj`.
#[derive(Clone, Debug)]
pub struct GnsSpace {
    n: usize,
    gram: DMatrix<Complex64>,
    /// `R = L*` with `gram = L L*`; orthonormal coordinates are `R·vec(a)`.
    r: DMatrix<Complex64>,
    r_inv: DMatrix<Complex64>,
}

fn vec_of(a: &ComplexMatrix) -> DVector<Complex64> {
    DVector::from_vec(a.to_vec())
}

impl GnsSpace {
    pub fn algebra_dim(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.n * self.n
    }

    pub fn gram(&self) -> &DMatrix<Complex64> {
        &self.gram
    }

    /// `⟨ι(a), ι(b)⟩` through the Gram form.
    pub fn inner(&self, a: &ComplexMatrix, b: &ComplexMatrix) -> Complex64 {
        let x = vec_of(a);
        let y = vec_of(b);
        (x.adjoint() * &self.gram * y)[(0, 0)]
    }

    /// Orthonormal coordinates of `ι(a)`.
    pub fn embed(&self, a: &ComplexMatrix) -> DVector<Complex64> {
        &self.r * vec_of(a)
    }

    /// `ι⁻¹`, defined since `ω` is faithful.
    pub fn operator(&self, z: &DVector<Complex64>) -> ComplexMatrix {
        let x = &self.r_inv * z;
        ComplexMatrix::from_vec(self.n, x.as_slice())
    }

    /// `Ω = ι(1)` in orthonormal coordinates.
    pub fn cyclic_vector(&self) -> DVector<Complex64> {
        self.embed(&ComplexMatrix::identity(self.n))
    }
}

/// Builds the GNS space; a state with a nontrivial Gram kernel is rejected
/// with a null vector.
pub fn gns_build(sys: &FiniteSystem) -> Result<GnsSpace> {
    let n = sys.dim();
    let rho = sys.state().density();
    let d = n * n;
    let gram = DMatrix::from_fn(d, d, |p, s| {
        let (i, j) = (p / n, p % n);
        let (k, l) = (s / n, s % n);
        if i == k {
            rho.get(l, j)
        } else {
            ZERO
        }
    });
    let eig = gram.clone().symmetric_eigen();
    let (pos, &min) =
        eig.eigenvalues.iter().enumerate().min_by(|a, b| a.1.total_cmp(b.1)).expect("nonempty Gram matrix");
    if min <= FAITHFUL_TOL {
        let null_vector = eig.eigenvectors.column(pos).iter().map(|z| [z.re, z.im]).collect();
        return Err(Error::NotFaithful { min_eigenvalue: min, null_vector });
    }
    let chol = gram
        .clone()
        .cholesky()
        .ok_or_else(|| Error::Numerical("Cholesky factorization of the Gram matrix failed".into()))?;
    let r = chol.l().adjoint();
    let r_inv = r.clone().try_inverse().ok_or_else(|| Error::Numerical("Gram factor is singular".into()))?;
    Ok(GnsSpace { n, gram, r, r_inv })
}

/// One joint eigenspace of the Koopman unitaries.
#[derive(Clone, Debug)]
pub struct JointEigenspace {
    /// `λ(e_j)` for each generator.
    pub character: Vec<Complex64>,
    /// Orthonormal basis (columns) in GNS coordinates.
    pub basis: DMatrix<Complex64>,
}

impl JointEigenspace {
    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn is_fixed(&self, tol: f64) -> bool {
        self.character.iter().all(|l| (l - ONE).norm() <= tol)
    }
}

#[derive(Clone, Debug)]
pub struct KoopmanSplitting {
    /// `K_j` in orthonormal GNS coordinates.
    pub koopman: Vec<DMatrix<Complex64>>,
    pub spaces: Vec<JointEigenspace>,
    pub dim_h1: usize,
    pub dim_h0: usize,
    pub tolerance: f64,
}

impl KoopmanSplitting {
    pub fn is_ergodic(&self) -> bool {
        self.dim_h1 == 1
    }

    pub fn is_weakly_mixing(&self) -> bool {
        self.dim_h0 == 1
    }

    pub fn fixed_space(&self) -> Option<&JointEigenspace> {
        self.spaces.iter().find(|s| s.is_fixed(self.tolerance))
    }
}

fn max_abs(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Matrix of `a ↦ τ_{e_j}(a)` on row-major vectorizations.
fn transfer_matrix(sys: &FiniteSystem, j: usize) -> DMatrix<Complex64> {
    let n = sys.dim();
    let g = GroupElement::unit(sys.lattice_dim(), j);
    let mut t = DMatrix::from_element(n * n, n * n, ZERO);
    for col in 0..n * n {
        let image = sys.act(&g, &ComplexMatrix::unit(n, col / n, col % n));
        for (row, z) in image.to_vec().into_iter().enumerate() {
            t[(row, col)] = z;
        }
    }
    t
}

/// Groups sorted real eigenvalues into runs whose consecutive gaps are at
/// most `tol`.
fn cluster_sorted(values: &[(f64, usize)], tol: f64) -> Vec<Vec<usize>> {
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut last = f64::NEG_INFINITY;
    for &(v, i) in values {
        match groups.last_mut() {
            Some(g) if v - last <= tol => g.push(i),
            _ => groups.push(vec![i]),
        }
        last = v;
    }
    groups
}

/// Splits the span of `basis` into eigenspaces of the Hermitian operator `h`
/// restricted to it.
fn hermitian_split(basis: &DMatrix<Complex64>, h: &DMatrix<Complex64>, tol: f64) -> Vec<DMatrix<Complex64>> {
    let restricted = basis.adjoint() * h * basis;
    let restricted = (&restricted + restricted.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = restricted.symmetric_eigen();
    let mut order: Vec<(f64, usize)> = eig.eigenvalues.iter().copied().zip(0..).collect();
    order.sort_by(|a, b| a.0.total_cmp(&b.0));
    cluster_sorted(&order, tol)
        .into_iter()
        .map(|group| {
            let cols: Vec<_> = group.iter().map(|&i| eig.eigenvectors.column(i).clone_owned()).collect();
            basis * DMatrix::from_columns(&cols)
        })
        .collect()
}

/// Jointly diagonalizes commuting unitaries by successive restriction to the
/// eigenspaces of the Hermitian and skew parts of each generator.
fn joint_eigenspaces(ks: &[DMatrix<Complex64>], tol: f64) -> Result<Vec<JointEigenspace>> {
    let d = ks[0].nrows();
    let mut spaces = vec![DMatrix::<Complex64>::identity(d, d)];
    let half = Complex64::new(0.5, 0.0);
    let minus_half_i = Complex64::new(0.0, -0.5);
    for k in ks {
        let re = (k + k.adjoint()) * half;
        let im = (k - k.adjoint()) * minus_half_i;
        spaces = spaces
            .iter()
            .flat_map(|b| hermitian_split(b, &re, tol))
            .flat_map(|b| hermitian_split(&b, &im, tol))
            .collect();
    }
    let mut out = Vec::with_capacity(spaces.len());
    for basis in spaces {
        let m = basis.ncols() as f64;
        let character: Vec<Complex64> = ks.iter().map(|k| (basis.adjoint() * k * &basis).trace() / m).collect();
        for (k, l) in ks.iter().zip(&character) {
            let residual = max_abs(&(k * &basis - &basis * *l));
            if residual > 10.0 * tol {
                return Err(Error::Numerical(format!("joint eigenvector residual {residual}")));
            }
        }
        out.push(JointEigenspace { character, basis });
    }
    Ok(out)
}

/// Simultaneous diagonalization of the generator Koopman maps
/// `ι(a) ↦ ι(τ_{e_j}(a))`.
pub fn koopman_split(sys: &FiniteSystem, gns: &GnsSpace, tol: f64) -> Result<KoopmanSplitting> {
    if gns.algebra_dim() != sys.dim() {
        return Err(Error::DimensionMismatch { expected: sys.dim(), found: gns.algebra_dim() });
    }
    if !(tol > 0.0 && tol.is_finite()) {
        return invalid("clustering tolerance must be positive");
    }
    let d = gns.dim();
    let koopman: Vec<DMatrix<Complex64>> =
        (0..sys.lattice_dim()).map(|j| &gns.r * transfer_matrix(sys, j) * &gns.r_inv).collect();
    let eye = DMatrix::<Complex64>::identity(d, d);
    for (j, k) in koopman.iter().enumerate() {
        let residual = max_abs(&(k.adjoint() * k - &eye));
        if residual > UNITARY_TOL {
            return Err(Error::Numerical(format!("Koopman map {j} is not unitary (residual {residual})")));
        }
    }
    for i in 0..koopman.len() {
        for j in i + 1..koopman.len() {
            let residual = max_abs(&(&koopman[i] * &koopman[j] - &koopman[j] * &koopman[i]));
            if residual > UNITARY_TOL {
                return Err(Error::Numerical(format!("Koopman maps {i} and {j} do not commute (residual {residual})")));
            }
        }
    }
    let spaces = joint_eigenspaces(&koopman, tol)?;
    let dim_h1 = spaces.iter().filter(|s| s.is_fixed(tol)).map(JointEigenspace::dim).sum();
    let dim_h0 = spaces.iter().map(JointEigenspace::dim).sum();
    Ok(KoopmanSplitting { koopman, spaces, dim_h1, dim_h0, tolerance: tol })
}

/// An operator `x` with `τ_{e_j}(x) = λ_j x` for every generator.
#[derive(Clone, Debug)]
pub struct Eigenoperator {
    pub operator: ComplexMatrix,
    pub character: Vec<Complex64>,
}

/// The *-subalgebra generated by the eigenoperators.
#[derive(Clone, Debug)]
pub struct CompactFactor {
    pub eigenoperators: Vec<Eigenoperator>,
    /// Rank of the eigenoperator family.
    pub independent_eigenoperators: usize,
    /// Frobenius-orthonormal basis of the generated algebra.
    pub basis: Vec<ComplexMatrix>,
    /// Largest distance of `τ_{e_j}(basis)` from the span of the basis.
    pub invariance_residual: f64,
    /// Dimension of the double commutant, computed for small algebras only.
    pub double_commutant_dim: Option<usize>,
}

impl CompactFactor {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }
}

fn frob_inner(a: &ComplexMatrix, b: &ComplexMatrix) -> Complex64 {
    a.inner().iter().zip(b.inner().iter()).map(|(x, y)| x.conj() * y).sum()
}

/// Residual of `x` after projecting onto an orthonormal family.
fn residual(basis: &[ComplexMatrix], x: &ComplexMatrix) -> ComplexMatrix {
    let mut r = x.clone();
    // two passes of modified Gram–Schmidt keep the basis orthonormal to ~1e-15
    for _ in 0..2 {
        for b in basis {
            let c = frob_inner(b, &r);
            r = &r - &b.scale(c);
        }
    }
    r
}

/// Extends `basis` by `x` if it is independent at relative tolerance `tol`.
fn try_extend(basis: &mut Vec<ComplexMatrix>, x: &ComplexMatrix, tol: f64) -> bool {
    let scale = x.frobenius_norm();
    if scale == 0.0 {
        return false;
    }
    let r = residual(basis, x);
    let norm = r.frobenius_norm();
    if norm <= tol * scale.max(1.0) {
        return false;
    }
    basis.push(r.scale(Complex64::new(1.0 / norm, 0.0)));
    true
}

/// Generated unital *-algebra: closes `{1}` under right multiplication by
/// the generators and their adjoints.
pub fn generated_algebra(n: usize, generators: &[ComplexMatrix]) -> Result<Vec<ComplexMatrix>> {
    const TOL: f64 = 1e-9;
    let mut letters: Vec<ComplexMatrix> = Vec::new();
    for g in generators {
        letters.push(g.clone());
        letters.push(g.adjoint());
    }
    let mut basis = Vec::new();
    let one = ComplexMatrix::identity(n);
    try_extend(&mut basis, &one, TOL);
    let mut queue = vec![one];
    let mut steps = 0usize;
    while let Some(x) = queue.pop() {
        for s in &letters {
            let y = &x * s;
            if try_extend(&mut basis, &y, TOL) {
                queue.push(y);
            }
        }
        steps += 1;
        if basis.len() > n * n || steps > n * n * (letters.len() + 1) + 1 {
            return Err(Error::Numerical("generated algebra failed to stabilize".into()));
        }
    }
    Ok(basis)
}

/// Null space of the linear map `X ↦ ([B_i, X])_i` on `M_n`.
fn commutant(n: usize, family: &[ComplexMatrix]) -> Vec<ComplexMatrix> {
    let d = n * n;
    let rows = family.len().max(1) * d;
    let mut m = DMatrix::from_element(rows.max(d), d, ZERO);
    for col in 0..d {
        let e = ComplexMatrix::unit(n, col / n, col % n);
        for (i, b) in family.iter().enumerate() {
            for (row, z) in b.commutator(&e).to_vec().into_iter().enumerate() {
                m[(i * d + row, col)] = z;
            }
        }
    }
    let svd = m.svd(false, true);
    let v_t = svd.v_t.expect("requested V");
    let smax = svd.singular_values.iter().copied().fold(0.0, f64::max).max(1.0);
    svd.singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| s <= 1e-9 * smax)
        .map(|(i, _)| {
            let row: Vec<Complex64> = v_t.row(i).iter().map(|z| z.conj()).collect();
            ComplexMatrix::from_vec(n, &row)
        })
        .collect()
}

pub fn double_commutant_dim(n: usize, algebra: &[ComplexMatrix]) -> usize {
    commutant(n, &commutant(n, algebra)).len()
}

/// Pulls the joint eigenvectors back to eigenoperators and generates the
/// *-algebra they span.
pub fn eigenoperator_factor(sys: &FiniteSystem, gns: &GnsSpace, split: &KoopmanSplitting) -> Result<CompactFactor> {
    let n = sys.dim();
    let mut eigenoperators = Vec::new();
    for space in &split.spaces {
        for c in 0..space.dim() {
            let z = space.basis.column(c).clone_owned();
            eigenoperators.push(Eigenoperator { operator: gns.operator(&z), character: space.character.clone() });
        }
    }
    let mut independent = Vec::new();
    for e in &eigenoperators {
        try_extend(&mut independent, &e.operator, 1e-9);
    }
    let generators: Vec<ComplexMatrix> = eigenoperators.iter().map(|e| e.operator.clone()).collect();
    let basis = generated_algebra(n, &generators)?;
    let mut invariance_residual: f64 = 0.0;
    for j in 0..sys.lattice_dim() {
        let g = GroupElement::unit(sys.lattice_dim(), j);
        for b in &basis {
            let image = sys.act(&g, b);
            invariance_residual = invariance_residual.max(residual(&basis, &image).frobenius_norm());
        }
    }
    let double_commutant_dim = (n <= DOUBLE_COMMUTANT_MAX_N).then(|| double_commutant_dim(n, &basis));
    Ok(CompactFactor {
        eigenoperators,
        independent_eigenoperators: independent.len(),
        basis,
        invariance_residual,
        double_commutant_dim,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DichotomyVerdict {
    TrivialSystem,
    NotErgodic,
    WeaklyMixing,
    HasNontrivialCompactFactor { dim: usize },
}

impl DichotomyVerdict {
    pub fn label(&self) -> String {
        match self {
            DichotomyVerdict::TrivialSystem => "trivial system".into(),
            DichotomyVerdict::NotErgodic => "not ergodic — dichotomy not applicable".into(),
            DichotomyVerdict::WeaklyMixing => "weakly-mixing".into(),
            DichotomyVerdict::HasNontrivialCompactFactor { dim } => format!("has-nontrivial-compact-factor({dim})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub ergodic: bool,
    pub dim_h1: usize,
    pub dim_h0: usize,
    pub factor_dim: usize,
    pub independent_eigenoperators: usize,
    pub verdict: DichotomyVerdict,
}

impl Classification {
    pub fn to_json(&self) -> Value {
        json!({
            "ergodic": self.ergodic,
            "dim_H1": self.dim_h1,
            "dim_H0": self.dim_h0,
            "factor_dim": self.factor_dim,
            "eigenoperator_count": self.independent_eigenoperators,
            "verdict": self.verdict.label(),
        })
    }
}

/// Splits the GNS space, builds the eigenoperator factor and applies the
/// weak-mixing / compact-factor dichotomy.
pub fn dichotomy_classify(sys: &FiniteSystem) -> Result<Classification> {
    let gns = gns_build(sys)?;
    let split = koopman_split(sys, &gns, CLUSTER_TOL)?;
    let factor = eigenoperator_factor(sys, &gns, &split)?;
    let verdict = if sys.dim() == 1 {
        DichotomyVerdict::TrivialSystem
    } else if !split.is_ergodic() {
        DichotomyVerdict::NotErgodic
    } else if split.is_weakly_mixing() {
        DichotomyVerdict::WeaklyMixing
    } else {
        DichotomyVerdict::HasNontrivialCompactFactor { dim: factor.dim() }
    };
    Ok(Classification {
        ergodic: split.is_ergodic(),
        dim_h1: split.dim_h1,
        dim_h0: split.dim_h0,
        factor_dim: factor.dim(),
        independent_eigenoperators: factor.independent_eigenoperators,
        verdict,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Branch {
    Compact,
    WeaklyMixing,
}

impl Branch {
    pub fn as_str(self) -> &'static str {
        match self {
            Branch::Compact => "compact",
            Branch::WeaklyMixing => "weakly-mixing",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SzemerediDriverReport {
    pub branch: Branch,
    pub averages: Vec<(usize, f64)>,
    pub tail_min: f64,
    pub classification: Option<Classification>,
    pub compact: Option<CompactSzemerediReport>,
    /// `ω(a)^{k+1}` on the weakly mixing branch.
    pub limit: Option<f64>,
    /// `c` with `|average − limit| ≤ c/|Λ_n|` on the weakly mixing branch.
    pub constant: Option<f64>,
    /// Per-window `(n, |average − limit|, c/|Λ_n|)`.
    pub deviations: Vec<(usize, f64, f64)>,
    pub bound_holds: bool,
}

impl SzemerediDriverReport {
    pub fn to_json(&self) -> Value {
        let mut v = json!({
            "branch": self.branch.as_str(),
            "averages": self.averages.iter().map(|(n, x)| json!([n, x])).collect::<Vec<_>>(),
            "szemeredi_tail_min": self.tail_min,
            "bound_holds": self.bound_holds,
        });
        let obj = v.as_object_mut().expect("object");
        if let Some(c) = &self.classification {
            obj.insert("ergodic".into(), json!(c.ergodic));
            obj.insert("dim_H1".into(), json!(c.dim_h1));
            obj.insert("dim_H0".into(), json!(c.dim_h0));
            obj.insert("factor_dim".into(), json!(c.factor_dim));
            obj.insert("verdict".into(), json!(c.verdict.label()));
        }
        if let Some(c) = &self.compact {
            obj.insert("compact".into(), c.to_json());
        }
        if let Some(l) = self.limit {
            obj.insert("limit".into(), json!(l));
        }
        if let Some(c) = self.constant {
            obj.insert("constant".into(), json!(c));
            obj.insert("deviations".into(), self.deviations.iter().map(|(n, d, b)| json!([n, d, b])).collect());
        }
        v
    }
}

/// Multiple-recurrence averages `|ω(a ∏_j τ_{m_j g}(a))|` along Følner windows.
///
/// Finite systems are never weakly mixing, so they take the compact branch
/// (shifted windows aligned with a return-time set). The shift system takes
/// the weakly mixing branch, where the averages converge to `ω(a)^{k+1}`
/// with an explicit `c/|Λ_n|` boundary term.
pub fn szemeredi_driver(
    sys: &SystemHandle,
    a: &Observable,
    exponents: &[i64],
    windows: &[FolnerWindow],
) -> Result<SzemerediDriverReport> {
    sys.check(a)?;
    match (sys, a) {
        (SystemHandle::Finite(fin), Observable::Matrix(m)) => finite_branch(fin, m, exponents, windows),
        (SystemHandle::QuasiLocal(ql), Observable::Local(l)) => weakly_mixing_branch(ql, l, exponents, windows),
        _ => unreachable!("checked above"),
    }
}

fn finite_branch(
    sys: &FiniteSystem,
    a: &ComplexMatrix,
    exponents: &[i64],
    windows: &[FolnerWindow],
) -> Result<SzemerediDriverReport> {
    let classification = dichotomy_classify(sys)?;
    if !classification.ergodic {
        return invalid("the finite branch needs an ergodic system");
    }
    let compact = szemeredi_average_compact(sys, a, exponents, windows, None)?;
    Ok(SzemerediDriverReport {
        branch: Branch::Compact,
        averages: compact.averages.clone(),
        tail_min: compact.tail_min,
        bound_holds: compact.bound_holds && compact.tail_min > 0.0,
        classification: Some(classification),
        compact: Some(compact),
        limit: None,
        constant: None,
        deviations: Vec::new(),
    })
}

fn weakly_mixing_branch(
    sys: &QuasiLocalSystem,
    a: &LocalObservable,
    exponents: &[i64],
    windows: &[FolnerWindow],
) -> Result<SzemerediDriverReport> {
    if windows.is_empty() {
        return invalid("at least one window is required");
    }
    match sys.min_eigenvalue(a) {
        Some(m) if m >= -1e-10 => {}
        Some(m) => return Err(Error::NotPositive(m)),
        None => return Err(Error::NotPositive(f64::NAN)),
    }
    let mean = sys.expectation(a).re;
    if mean <= 0.0 {
        return invalid(format!("ω(a) must be positive, got {mean}"));
    }
    let q = sys.lattice_dim();
    let homs = HomSet::new(exponents.iter().map(|&m| Homomorphism::scalar(q, m)).collect())?;
    let spec = HigherOrderSpec::new(vec![a.clone(); exponents.len() + 1], homs)?;
    let bound = collision_bound(sys, &spec)?;
    let (zero, factors) = spec.factors();
    let mut all = vec![(a, &zero)];
    all.extend(factors);
    let values = window_means(windows, |g| crate::systems::evaluate_unchecked(sys, &all, g).norm());
    let limit = mean.powi(exponents.len() as i32 + 1);
    let averages: Vec<(usize, f64)> = windows.iter().map(FolnerWindow::index).zip(values).collect();
    let deviations: Vec<(usize, f64, f64)> =
        windows.iter().zip(&averages).map(|(w, &(n, v))| (n, (v - limit).abs(), bound.bound(w))).collect();
    let bound_holds = deviations.iter().all(|&(_, d, b)| d <= b + 1e-12);
    let tail_min = averages.iter().map(|&(_, v)| v).fold(f64::INFINITY, f64::min);
    Ok(SzemerediDriverReport {
        branch: Branch::WeaklyMixing,
        averages,
        tail_min,
        classification: None,
        compact: None,
        limit: Some(limit),
        constant: Some(bound.constant),
        deviations,
        bound_holds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::WindowSchedule;
    use crate::operator::State;
    use crate::systems::{clock_shift_system, rotation_algebra_system, shift_system, trivial_system};

    #[test]
    fn gns_of_trace() {
        let sys = rotation_algebra_system(1, 2).unwrap();
        let gns = gns_build(&sys).unwrap();
        assert_eq!(gns.dim(), 4);
        let omega = gns.cyclic_vector();
        assert!((omega.norm() - 1.0).abs() < 1e-14);
        let v = sys.named("V").unwrap();
        let a = &ComplexMatrix::identity(2) + &v.scale(Complex64::new(0.3, 0.7));
        let via_gram = gns.inner(&a, &a).re;
        let via_coords = gns.embed(&a).norm_squared();
        let direct = sys.omega_norm(&a).powi(2);
        assert!((via_gram - direct).abs() < 1e-14 && (via_coords - direct).abs() < 1e-14);
    }

    #[test]
    fn pure_state_is_not_faithful() {
        let sys = FiniteSystem::new(State::basis(2, 0), vec![ComplexMatrix::identity(2)]).unwrap();
        assert!(matches!(gns_build(&sys), Err(Error::NotFaithful { .. })));
    }

    #[test]
    fn clock_shift_is_ergodic_with_full_factor() {
        for q in [2, 3, 5] {
            let sys = clock_shift_system(q).unwrap();
            let c = dichotomy_classify(&sys).unwrap();
            assert_eq!((c.dim_h1, c.dim_h0, c.factor_dim, c.independent_eigenoperators), (1, q * q, q * q, q * q));
            assert_eq!(c.verdict, DichotomyVerdict::HasNontrivialCompactFactor { dim: q * q });
        }
    }

    #[test]
    fn single_clock_is_not_ergodic() {
        let sys = rotation_algebra_system(1, 4).unwrap();
        let gns = gns_build(&sys).unwrap();
        let split = koopman_split(&sys, &gns, CLUSTER_TOL).unwrap();
        assert_eq!(split.dim_h1, 4);
        let factor = eigenoperator_factor(&sys, &gns, &split).unwrap();
        assert_eq!(factor.dim(), 16);
        assert!(factor.invariance_residual < 1e-10);
        assert_eq!(factor.double_commutant_dim, Some(16));
        assert_eq!(dichotomy_classify(&sys).unwrap().verdict, DichotomyVerdict::NotErgodic);
    }

    #[test]
    fn trivial_action_fixes_everything() {
        let sys = trivial_system(3, 1).unwrap();
        let gns = gns_build(&sys).unwrap();
        let split = koopman_split(&sys, &gns, CLUSTER_TOL).unwrap();
        assert_eq!(split.dim_h1, 9);
        let factor = eigenoperator_factor(&sys, &gns, &split).unwrap();
        assert_eq!(factor.dim(), 9);
        assert!(factor.eigenoperators.iter().all(|e| (e.character[0] - ONE).norm() < 1e-12));
        let one = trivial_system(1, 1).unwrap();
        assert_eq!(dichotomy_classify(&one).unwrap().verdict, DichotomyVerdict::TrivialSystem);
    }

    #[test]
    fn eigenoperators_satisfy_their_characters() {
        let sys = clock_shift_system(3).unwrap();
        let gns = gns_build(&sys).unwrap();
        let split = koopman_split(&sys, &gns, CLUSTER_TOL).unwrap();
        let factor = eigenoperator_factor(&sys, &gns, &split).unwrap();
        for e in &factor.eigenoperators {
            for (j, l) in e.character.iter().enumerate() {
                let image = sys.act(&GroupElement::unit(2, j), &e.operator);
                assert!(image.max_abs_diff(&e.operator.scale(*l)) < 1e-10);
            }
        }
    }

    #[test]
    fn commutant_of_diagonal_algebra() {
        let n = 3;
        let diag: Vec<ComplexMatrix> = (0..n).map(|i| ComplexMatrix::unit(n, i, i)).collect();
        assert_eq!(commutant(n, &diag).len(), 3);
        assert_eq!(double_commutant_dim(n, &diag), 3);
        assert_eq!(generated_algebra(n, &diag).unwrap().len(), 3);
    }

    #[test]
    fn weakly_mixing_driver_on_projector() {
        let sys: SystemHandle = shift_system(1, 2).unwrap().into();
        let z = LocalObservable::pauli(2, &[GroupElement::scalar(0)], "Z").unwrap();
        let ql = sys.as_quasi_local().unwrap();
        let half = Complex64::new(0.5, 0.0);
        let p = ql.combine(&[(half, &ql.identity()), (half, &z)]);
        let windows = WindowSchedule::new(1, 1, 40, 1).unwrap().windows().unwrap();
        let r = szemeredi_driver(&sys, &Observable::Local(p), &[1, 2], &windows).unwrap();
        assert_eq!(r.branch, Branch::WeaklyMixing);
        assert_eq!(r.limit, Some(0.125));
        assert!((r.constant.unwrap() - 9.0 / 8.0).abs() < 1e-12);
        for &(n, d, _) in &r.deviations {
            assert!((d - 0.375 / (2 * n + 1) as f64).abs() < 1e-12);
        }
        assert!(r.bound_holds);
    }

    #[test]
    fn identity_driver_is_one_on_both_branches() {
        let windows = WindowSchedule::new(1, 1, 6, 1).unwrap().windows().unwrap();
        let ql: SystemHandle = shift_system(1, 2).unwrap().into();
        let r = szemeredi_driver(&ql, &ql.identity(), &[1, 2], &windows).unwrap();
        assert!(r.averages.iter().all(|(_, v)| *v == 1.0));
        let fin: SystemHandle = clock_shift_system(3).unwrap().into();
        let windows2 = WindowSchedule::new(2, 1, 3, 1).unwrap().windows().unwrap();
        let r = szemeredi_driver(&fin, &fin.identity(), &[1], &windows2).unwrap();
        assert!(r.averages.iter().all(|(_, v)| (v - 1.0).abs() < 1e-12));
    }
}
