use std::collections::BTreeSet;

use num_complex::Complex64;

use super::DynamicalSystem;
use crate::error::{invalid, Error, Result};
use crate::lattice::GroupElement;
use crate::operator::{ComplexMatrix, ONE, ZERO};
use crate::systems::finite::{clock_matrix, shift_matrix};

const IDENTITY_TOL: f64 = 1e-12;

/// An observable of a spin lattice with finite support.
///
/// The tensor acts on `(C^d)^{⊗m}` for the `m` sorted support sites; the
/// first site carries the most significant digit of the basis index. Sites
/// on which the tensor acts as the identity are stripped on construction.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalObservable {
    site_dim: usize,
    sites: Vec<GroupElement>,
    tensor: ComplexMatrix,
}

impl LocalObservable {
    /// Builds from sites in any order; tensor legs follow the given order.
    pub fn new(site_dim: usize, sites: Vec<GroupElement>, tensor: ComplexMatrix) -> Result<Self> {
        if site_dim < 2 {
            return invalid("site dimension must be at least 2");
        }
        let expected = checked_pow(site_dim, sites.len())?;
        if tensor.dim() != expected {
            return Err(Error::DimensionMismatch { expected, found: tensor.dim() });
        }
        if let Some(q) = sites.first().map(GroupElement::dim) {
            if sites.iter().any(|s| s.dim() != q) {
                return invalid("support sites have mixed lattice dimensions");
            }
        }
        let distinct: BTreeSet<_> = sites.iter().collect();
        if distinct.len() != sites.len() {
            return invalid("support sites must be distinct");
        }
        let mut order: Vec<usize> = (0..sites.len()).collect();
        order.sort_by(|&a, &b| sites[a].cmp(&sites[b]));
        let tensor = permute_legs(&tensor, site_dim, &order);
        let sites = order.iter().map(|&i| sites[i].clone()).collect();
        Ok(Self { site_dim, sites, tensor }.minimized())
    }

    pub fn scalar(site_dim: usize, c: Complex64) -> Self {
        Self { site_dim, sites: Vec::new(), tensor: ComplexMatrix::from_fn(1, |_, _| c) }
    }

    pub fn identity(site_dim: usize) -> Self {
        Self::scalar(site_dim, ONE)
    }

    pub fn single_site(site: GroupElement, m: ComplexMatrix) -> Result<Self> {
        let d = m.dim();
        Self::new(d, vec![site], m)
    }

    /// Product of one-site operators named by `pauli` (`I`, `X`, `Y`, `Z`).
    ///
    /// For `d > 2`, `X` and `Z` are the generalized shift and clock; `Y` is
    /// only defined for qubits.
    pub fn pauli(site_dim: usize, sites: &[GroupElement], pauli: &str) -> Result<Self> {
        let letters: Vec<char> = pauli.chars().collect();
        if letters.len() != sites.len() {
            return invalid(format!("Pauli string of length {} for {} sites", letters.len(), sites.len()));
        }
        let mut tensor = ComplexMatrix::identity(1);
        for &c in &letters {
            tensor = tensor.kron(&pauli_matrix(site_dim, c)?);
        }
        Self::new(site_dim, sites.to_vec(), tensor)
    }

    pub fn site_dim(&self) -> usize {
        self.site_dim
    }

    pub fn support(&self) -> &[GroupElement] {
        &self.sites
    }

    pub fn tensor(&self) -> &ComplexMatrix {
        &self.tensor
    }

    pub fn lattice_dim(&self) -> Option<usize> {
        self.sites.first().map(GroupElement::dim)
    }

    /// Support translation; the tensor is unchanged.
    pub fn translate(&self, g: &GroupElement) -> Self {
        Self { site_dim: self.site_dim, sites: self.sites.iter().map(|s| s + g).collect(), tensor: self.tensor.clone() }
    }

    /// The matrix of `self ⊗ 1` on the sorted site list `window ⊇ support`.
    pub fn embed(&self, window: &[GroupElement]) -> Result<ComplexMatrix> {
        let mut positions = Vec::with_capacity(self.sites.len());
        for s in &self.sites {
            match window.binary_search(s) {
                Ok(p) => positions.push(p),
                Err(_) => return invalid(format!("site {s} is not in the embedding window")),
            }
        }
        let d = self.site_dim;
        let total = checked_pow(d, window.len())?;
        let local = self.tensor.dim();
        let rest = total / local;
        let layout = split_indices(d, window.len(), &positions);
        // blocks[r][i] = global index whose local part is i and remaining part is r
        let mut blocks = vec![0usize; total];
        for (global, &(i, r)) in layout.iter().enumerate() {
            blocks[r * local + i] = global;
        }
        let a = self.tensor.inner();
        let mut m = nalgebra::DMatrix::from_element(total, total, ZERO);
        for r in 0..rest {
            let block = &blocks[r * local..(r + 1) * local];
            for (i, &gi) in block.iter().enumerate() {
                for (j, &gj) in block.iter().enumerate() {
                    m[(gi, gj)] = a[(i, j)];
                }
            }
        }
        Ok(ComplexMatrix::wrap(m))
    }

    /// Normalized partial trace over the support leg at `pos`.
    fn trace_out(&self, pos: usize) -> ComplexMatrix {
        let d = self.site_dim;
        let m = self.sites.len();
        let reduced = self.tensor.dim() / d;
        let stride = d.pow((m - 1 - pos) as u32);
        let lift = |i: usize, s: usize| {
            let hi = i / stride;
            let lo = i % stride;
            (hi * d + s) * stride + lo
        };
        ComplexMatrix::from_fn(reduced, |i, j| {
            let mut acc = ZERO;
            for s in 0..d {
                acc += self.tensor.get(lift(i, s), lift(j, s));
            }
            acc / d as f64
        })
    }

    fn minimized(mut self) -> Self {
        let scale = self.tensor.inner().iter().map(|z| z.norm()).fold(1.0, f64::max);
        let mut pos = 0;
        while pos < self.sites.len() {
            let reduced = self.trace_out(pos);
            let mut rest = self.sites.clone();
            rest.remove(pos);
            let candidate = Self { site_dim: self.site_dim, sites: rest, tensor: reduced };
            let back = candidate.embed(&self.sites).expect("support is contained in itself");
            if back.max_abs_diff(&self.tensor) <= IDENTITY_TOL * scale {
                self = candidate;
            } else {
                pos += 1;
            }
        }
        self
    }
}

fn checked_pow(d: usize, m: usize) -> Result<usize> {
    u32::try_from(m)
        .ok()
        .and_then(|m| d.checked_pow(m))
        .filter(|&n| n <= 1 << 14)
        .ok_or_else(|| Error::InvalidArgument(format!("local dimension {d}^{m} is too large")))
}

/// For each global index over `len` sites, its (local, rest) index pair where
/// local digits are the sites at `positions` (increasing).
fn split_indices(d: usize, len: usize, positions: &[usize]) -> Vec<(usize, usize)> {
    let total = d.pow(len as u32);
    let mut is_local = vec![false; len];
    for &p in positions {
        is_local[p] = true;
    }
    let mut out = Vec::with_capacity(total);
    let mut digits = vec![0usize; len];
    for _ in 0..total {
        let (mut i, mut r) = (0, 0);
        for (p, &x) in digits.iter().enumerate() {
            if is_local[p] {
                i = i * d + x;
            } else {
                r = r * d + x;
            }
        }
        out.push((i, r));
        for p in (0..len).rev() {
            digits[p] += 1;
            if digits[p] < d {
                break;
            }
            digits[p] = 0;
        }
    }
    out
}

/// Reorders tensor legs so that new leg `k` is old leg `order[k]`.
fn permute_legs(t: &ComplexMatrix, d: usize, order: &[usize]) -> ComplexMatrix {
    if order.iter().enumerate().all(|(k, &o)| k == o) {
        return t.clone();
    }
    let m = order.len();
    let n = t.dim();
    let remap = |new: usize| {
        let mut digits = vec![0usize; m];
        let mut x = new;
        for k in (0..m).rev() {
            digits[k] = x % d;
            x /= d;
        }
        let mut old_digits = vec![0usize; m];
        for (k, &o) in order.iter().enumerate() {
            old_digits[o] = digits[k];
        }
        old_digits.iter().fold(0, |acc, &x| acc * d + x)
    };
    let map: Vec<usize> = (0..n).map(remap).collect();
    ComplexMatrix::from_fn(n, |i, j| t.get(map[i], map[j]))
}

pub fn pauli_matrix(d: usize, letter: char) -> Result<ComplexMatrix> {
    match letter {
        'I' => Ok(ComplexMatrix::identity(d)),
        'X' => Ok(shift_matrix(d)),
        'Z' => Ok(clock_matrix(1, d)),
        'Y' if d == 2 => {
            ComplexMatrix::from_rows(&[vec![ZERO, Complex64::new(0.0, -1.0)], vec![Complex64::new(0.0, 1.0), ZERO]])
        }
        'Y' => invalid("Y is only defined for d = 2"),
        other => invalid(format!("unknown Pauli letter {other:?}")),
    }
}

/// A spin lattice over Z^q with site dimension `d`, the product normalized
/// trace and the shift action `τ_g(a) = a` translated by `g`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuasiLocalSystem {
    q: usize,
    d: usize,
}

impl QuasiLocalSystem {
    pub fn site_dim(&self) -> usize {
        self.d
    }

    fn union_support<'a>(&self, obs: impl IntoIterator<Item = &'a LocalObservable>) -> Vec<GroupElement> {
        let set: BTreeSet<&GroupElement> = obs.into_iter().flat_map(|o| o.sites.iter()).collect();
        set.into_iter().cloned().collect()
    }

    /// Product on the union of supports without minimizing.
    fn raw_product(&self, factors: &[LocalObservable]) -> (Vec<GroupElement>, ComplexMatrix) {
        let window = self.union_support(factors);
        let mut acc: Option<ComplexMatrix> = None;
        for f in factors {
            let m = f.embed(&window).expect("window contains every support");
            acc = Some(match acc {
                None => m,
                Some(a) => &a * &m,
            });
        }
        let dim = self.d.pow(window.len() as u32);
        (window, acc.unwrap_or_else(|| ComplexMatrix::identity(dim)))
    }

    /// `ω` evaluated after padding `a` with identities up to `window`.
    pub fn expectation_on(&self, a: &LocalObservable, window: &[GroupElement]) -> Result<Complex64> {
        Ok(a.embed(window)?.normalized_trace())
    }
}

/// The spin lattice `(C^d)^{⊗Z^q}` with the product trace and shift action.
pub fn shift_system(q: usize, d: usize) -> Result<QuasiLocalSystem> {
    if q == 0 {
        return invalid("lattice dimension must be at least 1");
    }
    if d < 2 {
        return invalid("site dimension must be at least 2");
    }
    Ok(QuasiLocalSystem { q, d })
}

impl DynamicalSystem for QuasiLocalSystem {
    type Obs = LocalObservable;

    fn lattice_dim(&self) -> usize {
        self.q
    }

    fn check(&self, a: &LocalObservable) -> Result<()> {
        if a.site_dim != self.d {
            return Err(Error::DimensionMismatch { expected: self.d, found: a.site_dim });
        }
        if let Some(q) = a.lattice_dim() {
            if q != self.q {
                return Err(Error::DimensionMismatch { expected: self.q, found: q });
            }
        }
        Ok(())
    }

    fn identity(&self) -> LocalObservable {
        LocalObservable::identity(self.d)
    }

    fn act(&self, g: &GroupElement, a: &LocalObservable) -> LocalObservable {
        a.translate(g)
    }

    fn multiply(&self, factors: &[LocalObservable]) -> LocalObservable {
        let (sites, tensor) = self.raw_product(factors);
        LocalObservable { site_dim: self.d, sites, tensor }.minimized()
    }

    fn adjoint(&self, a: &LocalObservable) -> LocalObservable {
        LocalObservable { site_dim: a.site_dim, sites: a.sites.clone(), tensor: a.tensor.adjoint() }
    }

    fn combine(&self, terms: &[(Complex64, &LocalObservable)]) -> LocalObservable {
        let window = self.union_support(terms.iter().map(|(_, a)| *a));
        let dim = self.d.pow(window.len() as u32);
        let tensor = terms.iter().fold(ComplexMatrix::zeros(dim), |acc, (c, a)| {
            &acc + &a.embed(&window).expect("window contains every support").scale(*c)
        });
        LocalObservable { site_dim: self.d, sites: window, tensor }.minimized()
    }

    fn expectation(&self, a: &LocalObservable) -> Complex64 {
        a.tensor.normalized_trace()
    }

    fn operator_norm(&self, a: &LocalObservable) -> f64 {
        a.tensor.operator_norm()
    }

    fn min_eigenvalue(&self, a: &LocalObservable) -> Option<f64> {
        let scale = a.tensor.operator_norm().max(1.0);
        a.tensor.is_hermitian(1e-12 * scale).then(|| a.tensor.hermitian_eigenvalues()[0])
    }

    fn is_tracial(&self) -> bool {
        true
    }

    fn product_expectation(&self, factors: &[LocalObservable]) -> Complex64 {
        self.raw_product(factors).1.normalized_trace()
    }

    fn commutator_norm(&self, a: &LocalObservable, b: &LocalObservable) -> f64 {
        if a.sites.iter().all(|s| b.sites.binary_search(s).is_err()) {
            return 0.0;
        }
        let window = self.union_support([a, b]);
        let ma = a.embed(&window).expect("window contains support");
        let mb = b.embed(&window).expect("window contains support");
        ma.commutator(&mb).operator_norm()
    }
}
