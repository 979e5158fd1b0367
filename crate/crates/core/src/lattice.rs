//! The lattice Z^q: group elements, integer homomorphisms, Følner windows and
//! density bookkeeping along window sequences.
//!
//! All measures are counting measures, so every integral over a window is a
//! finite sum. Windows keep their elements sorted lexicographically; that order
//! is the canonical summation order used throughout the crate.

use std::collections::BTreeSet;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// A point of Z^q.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GroupElement(Vec<i64>);

impl GroupElement {
    pub fn new(coords: Vec<i64>) -> Self {
        Self(coords)
    }

    pub fn zero(q: usize) -> Self {
        Self(vec![0; q])
    }

    /// The `axis`-th generator of Z^q.
    pub fn unit(q: usize, axis: usize) -> Self {
        let mut c = vec![0; q];
        c[axis] = 1;
        Self(c)
    }

    pub fn scalar(x: i64) -> Self {
        Self(vec![x])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    /// `m·g`, the additive form of g^m.
    pub fn scale(&self, m: i64) -> Self {
        Self(self.0.iter().map(|c| c * m).collect())
    }

    pub fn max_abs(&self) -> i64 {
        self.0.iter().map(|c| c.abs()).max().unwrap_or(0)
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.len() == 1 {
            write!(f, "{}", self.0[0])
        } else {
            write!(f, "(")?;
            for (i, c) in self.0.iter().enumerate() {
                if i > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{c}")?;
            }
            write!(f, ")")
        }
    }
}

impl From<i64> for GroupElement {
    fn from(x: i64) -> Self {
        Self::scalar(x)
    }
}

impl Add for &GroupElement {
    type Output = GroupElement;
    fn add(self, rhs: &GroupElement) -> GroupElement {
        assert_eq!(self.dim(), rhs.dim(), "lattice dimension mismatch");
        GroupElement(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &GroupElement {
    type Output = GroupElement;
    fn sub(self, rhs: &GroupElement) -> GroupElement {
        assert_eq!(self.dim(), rhs.dim(), "lattice dimension mismatch");
        GroupElement(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &GroupElement {
    type Output = GroupElement;
    fn neg(self) -> GroupElement {
        GroupElement(self.0.iter().map(|c| -c).collect())
    }
}

/// An endomorphism of Z^q given by an integer matrix acting on column vectors.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Homomorphism {
    matrix: Vec<Vec<i64>>,
}

impl Homomorphism {
    pub fn from_matrix(matrix: Vec<Vec<i64>>) -> Result<Self> {
        let q = matrix.len();
        if q == 0 || matrix.iter().any(|row| row.len() != q) {
            return invalid("homomorphism matrix must be square and non-empty");
        }
        Ok(Self { matrix })
    }

    /// `g ↦ m·g`.
    pub fn scalar(q: usize, m: i64) -> Self {
        let matrix = (0..q).map(|i| (0..q).map(|j| if i == j { m } else { 0 }).collect()).collect();
        Self { matrix }
    }

    pub fn identity(q: usize) -> Self {
        Self::scalar(q, 1)
    }

    /// The trivial homomorphism `g ↦ e`.
    pub fn zero(q: usize) -> Self {
        Self::scalar(q, 0)
    }

    pub fn dim(&self) -> usize {
        self.matrix.len()
    }

    pub fn matrix(&self) -> &[Vec<i64>] {
        &self.matrix
    }

    pub fn is_zero(&self) -> bool {
        self.matrix.iter().flatten().all(|&x| x == 0)
    }

    pub fn apply(&self, g: &GroupElement) -> GroupElement {
        assert_eq!(self.dim(), g.dim(), "lattice dimension mismatch");
        GroupElement(self.matrix.iter().map(|row| row.iter().zip(g.coords()).map(|(a, b)| a * b).sum()).collect())
    }

    /// Pointwise difference `g ↦ φ₁(g) − φ₂(g)`.
    pub fn difference(&self, other: &Self) -> Self {
        assert_eq!(self.dim(), other.dim(), "lattice dimension mismatch");
        let matrix = self
            .matrix
            .iter()
            .zip(&other.matrix)
            .map(|(r1, r2)| r1.iter().zip(r2).map(|(a, b)| a - b).collect())
            .collect();
        Self { matrix }
    }

    pub fn determinant(&self) -> i128 {
        let m: Vec<Vec<i128>> = self.matrix.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
        bareiss_determinant(m)
    }

    /// All integer solutions of `φ(g) = target`, provided `φ` is injective.
    ///
    /// Returns `None` when the matrix is singular (the solution set is then
    /// either empty or infinite, and callers must not rely on finiteness).
    pub fn solve_integer(&self, target: &GroupElement) -> Option<Option<GroupElement>> {
        let q = self.dim();
        let det = self.determinant();
        if det == 0 {
            return None;
        }
        // Cramer's rule in exact integer arithmetic.
        let mut coords = Vec::with_capacity(q);
        for col in 0..q {
            let m: Vec<Vec<i128>> = self
                .matrix
                .iter()
                .enumerate()
                .map(|(i, r)| {
                    r.iter()
                        .enumerate()
                        .map(|(j, &x)| if j == col { target.coords()[i] as i128 } else { x as i128 })
                        .collect()
                })
                .collect();
            let num = bareiss_determinant(m);
            if num % det != 0 {
                return Some(None);
            }
            coords.push((num / det) as i64);
        }
        Some(Some(GroupElement(coords)))
    }
}

fn bareiss_determinant(mut m: Vec<Vec<i128>>) -> i128 {
    let n = m.len();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n {
        if m[k][k] == 0 {
            match (k + 1..n).find(|&i| m[i][k] != 0) {
                Some(i) => {
                    m.swap(i, k);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
            }
        }
        prev = m[k][k];
    }
    sign * m[n - 1][n - 1]
}

/// A finite set of nonzero homomorphisms.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomSet {
    homs: Vec<Homomorphism>,
}

impl HomSet {
    pub fn new(homs: Vec<Homomorphism>) -> Result<Self> {
        if homs.is_empty() {
            return invalid("homomorphism set is empty");
        }
        let q = homs[0].dim();
        if homs.iter().any(|h| h.dim() != q) {
            return invalid("homomorphisms act on different lattices");
        }
        if homs.iter().any(Homomorphism::is_zero) {
            return invalid("homomorphism set may not contain the zero map");
        }
        Ok(Self { homs })
    }

    pub fn homs(&self) -> &[Homomorphism] {
        &self.homs
    }

    /// Whether `φ₁ − φ₂` lies in the set for every pair of distinct members.
    pub fn is_translational(&self) -> bool {
        self.homs.iter().all(|a| self.homs.iter().filter(|b| *b != a).all(|b| self.homs.contains(&a.difference(b))))
    }

    pub fn all_distinct(&self) -> bool {
        self.homs.iter().enumerate().all(|(i, a)| self.homs[i + 1..].iter().all(|b| a != b))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WindowShape {
    Box,
    Custom,
}

/// A finite averaging window `Λ_n ⊂ Z^q`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FolnerWindow {
    index: usize,
    q: usize,
    shape: WindowShape,
    elements: Vec<GroupElement>,
}

impl FolnerWindow {
    /// Builds a custom window; elements are sorted and deduplicated.
    pub fn custom(index: usize, elements: impl IntoIterator<Item = GroupElement>) -> Result<Self> {
        let set: BTreeSet<GroupElement> = elements.into_iter().collect();
        let Some(first) = set.first() else {
            return invalid("window must be nonempty");
        };
        let q = first.dim();
        if q == 0 || set.iter().any(|g| g.dim() != q) {
            return invalid("window elements must share a positive lattice dimension");
        }
        Ok(Self { index, q, shape: WindowShape::Custom, elements: set.into_iter().collect() })
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn lattice_dim(&self) -> usize {
        self.q
    }

    pub fn shape(&self) -> WindowShape {
        self.shape
    }

    pub fn elements(&self) -> &[GroupElement] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, g: &GroupElement) -> bool {
        match self.shape {
            WindowShape::Box => g.max_abs() <= self.index as i64,
            WindowShape::Custom => self.elements.binary_search(g).is_ok(),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = &GroupElement> {
        self.elements.iter()
    }
}

fn box_elements(q: usize, radius: i64) -> Vec<GroupElement> {
    let side = (2 * radius + 1) as usize;
    let total = side.pow(q as u32);
    let mut out = Vec::with_capacity(total);
    let mut coords = vec![-radius; q];
    for _ in 0..total {
        out.push(GroupElement(coords.clone()));
        // odometer increment, last axis fastest: lexicographic order
        for axis in (0..q).rev() {
            if coords[axis] < radius {
                coords[axis] += 1;
                break;
            }
            coords[axis] = -radius;
        }
    }
    out
}

/// The box `{−n,…,n}^q`.
pub fn box_window(q: usize, n: usize) -> Result<FolnerWindow> {
    if q == 0 || n == 0 {
        return invalid(format!("box window needs q ≥ 1 and n ≥ 1 (got q={q}, n={n})"));
    }
    Ok(FolnerWindow { index: n, q, shape: WindowShape::Box, elements: box_elements(q, n as i64) })
}

/// `Λ⁻¹Λ = {b − a : a, b ∈ Λ}`.
pub fn inverse_product(window: &FolnerWindow) -> FolnerWindow {
    if window.shape == WindowShape::Box {
        let n = window.index;
        return FolnerWindow {
            index: 2 * n,
            q: window.q,
            shape: WindowShape::Box,
            elements: box_elements(window.q, 2 * n as i64),
        };
    }
    let mut diffs = BTreeSet::new();
    for a in window.iter() {
        for b in window.iter() {
            diffs.insert(b - a);
        }
    }
    FolnerWindow { index: window.index, q: window.q, shape: WindowShape::Custom, elements: diffs.into_iter().collect() }
}

/// `|Λ⁻¹Λ| / |Λ|`.
pub fn tempelman_ratio(window: &FolnerWindow) -> f64 {
    inverse_product(window).len() as f64 / window.len() as f64
}

/// `|Λ ∩ (Λ + g)|`.
pub fn overlap_count(window: &FolnerWindow, g: &GroupElement) -> usize {
    if window.shape == WindowShape::Box {
        let side = 2 * window.index as i64 + 1;
        return g.coords().iter().map(|&x| (side - x.abs()).max(0) as usize).product();
    }
    window.iter().filter(|x| window.contains(&(*x - g))).count()
}

/// `|Λ Δ (Λ+g)| / |Λ|`.
pub fn folner_defect(window: &FolnerWindow, g: &GroupElement) -> f64 {
    let n = window.len();
    let sym = 2 * (n - overlap_count(window, g));
    sym as f64 / n as f64
}

/// `Λ + g`.
pub fn shift_window(window: &FolnerWindow, g: &GroupElement) -> FolnerWindow {
    if g.is_zero() {
        return window.clone();
    }
    FolnerWindow {
        index: window.index,
        q: window.q,
        shape: WindowShape::Custom,
        elements: window.iter().map(|x| x + g).collect(),
    }
}

/// Nested box windows `n = n_min, n_min + stride, …, ≤ n_max`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowSchedule {
    pub q: usize,
    pub n_min: usize,
    pub n_max: usize,
    pub stride: usize,
}

impl WindowSchedule {
    pub fn new(q: usize, n_min: usize, n_max: usize, stride: usize) -> Result<Self> {
        if n_min == 0 || n_max < n_min || stride == 0 || q == 0 {
            return invalid(format!("bad window schedule q={q} n_min={n_min} n_max={n_max} stride={stride}"));
        }
        Ok(Self { q, n_min, n_max, stride })
    }

    pub fn indices(&self) -> Vec<usize> {
        (self.n_min..=self.n_max).step_by(self.stride).collect()
    }

    pub fn windows(&self) -> Result<Vec<FolnerWindow>> {
        self.indices().into_iter().map(|n| box_window(self.q, n)).collect()
    }
}

/// Membership predicate for subsets of Z^q.
pub trait Membership: Sync {
    fn contains(&self, g: &GroupElement) -> bool;
}

impl<F> Membership for F
where
    F: Fn(&GroupElement) -> bool + Sync,
{
    fn contains(&self, g: &GroupElement) -> bool {
        self(g)
    }
}

/// Serializable set descriptions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SetSpec {
    All,
    Empty,
    Finite {
        elements: Vec<GroupElement>,
    },
    /// `{g : g[axis] mod modulus ∈ residues}`.
    Residue {
        modulus: i64,
        residues: Vec<i64>,
        #[serde(default)]
        axis: usize,
    },
    /// `{start + i·step : i ≥ 0}` along `axis` (optionally `count` terms).
    Progression {
        start: i64,
        step: i64,
        #[serde(default)]
        count: Option<u64>,
        #[serde(default)]
        axis: usize,
    },
    /// Nonnegative perfect squares along `axis`.
    Squares {
        #[serde(default)]
        axis: usize,
    },
    Complement {
        set: Box<SetSpec>,
    },
}

fn on_axis(g: &GroupElement, axis: usize) -> Option<i64> {
    let c = g.coords();
    if axis >= c.len() {
        return None;
    }
    // sets along an axis live on that axis' line through the origin in q > 1
    if c.iter().enumerate().any(|(i, &x)| i != axis && x != 0) {
        return None;
    }
    Some(c[axis])
}

fn isqrt(x: i64) -> i64 {
    let mut r = (x as f64).sqrt() as i64;
    while r * r > x {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= x {
        r += 1;
    }
    r
}

impl Membership for SetSpec {
    fn contains(&self, g: &GroupElement) -> bool {
        match self {
            SetSpec::All => true,
            SetSpec::Empty => false,
            SetSpec::Finite { elements } => elements.contains(g),
            SetSpec::Residue { modulus, residues, axis } => {
                g.coords().get(*axis).is_some_and(|&x| residues.iter().any(|r| (x - r).rem_euclid(*modulus) == 0))
            }
            SetSpec::Progression { start, step, count, axis } => {
                let Some(x) = on_axis(g, *axis) else { return false };
                if *step == 0 {
                    return x == *start;
                }
                let d = x - start;
                if d % step != 0 || d / step < 0 {
                    return false;
                }
                count.is_none_or(|c| ((d / step) as u64) < c)
            }
            SetSpec::Squares { axis } => {
                let Some(x) = on_axis(g, *axis) else { return false };
                x >= 0 && isqrt(x).pow(2) == x
            }
            SetSpec::Complement { set } => !set.contains(g),
        }
    }
}

impl SetSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            SetSpec::Residue { modulus, .. } if *modulus <= 0 => invalid("residue modulus must be positive"),
            SetSpec::Complement { set } => set.validate(),
            _ => Ok(()),
        }
    }
}

/// Ratios `|Λ_n ∩ E| / |Λ_n|` and their minimum over the supplied tail.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityReport {
    pub lower_density: f64,
    pub per_n_ratios: Vec<(usize, f64)>,
}

pub fn intersection_count(window: &FolnerWindow, set: &dyn Membership) -> usize {
    window.iter().filter(|g| set.contains(g)).count()
}

pub fn lower_density(set: &dyn Membership, windows: &[FolnerWindow]) -> Result<DensityReport> {
    if windows.is_empty() {
        return invalid("lower_density needs at least one window");
    }
    let per_n_ratios: Vec<(usize, f64)> =
        windows.iter().map(|w| (w.index(), intersection_count(w, set) as f64 / w.len() as f64)).collect();
    let lower_density = per_n_ratios.iter().map(|&(_, r)| r).fold(f64::INFINITY, f64::min);
    Ok(DensityReport { lower_density, per_n_ratios })
}

/// Checks that `E ∩ {g + g_1, …, g + g_r} ≠ ∅` for every `g` in `scan`.
///
/// On failure every uncovered `g` is returned, in lexicographic order.
pub fn relative_density_witness(
    set: &dyn Membership,
    scan: &FolnerWindow,
    candidates: &[GroupElement],
) -> std::result::Result<Vec<GroupElement>, Vec<GroupElement>> {
    let uncovered: Vec<GroupElement> =
        scan.iter().filter(|g| !candidates.iter().any(|c| set.contains(&(*g + c)))).cloned().collect();
    if uncovered.is_empty() {
        Ok(candidates.to_vec())
    } else {
        Err(uncovered)
    }
}

/// Picks the candidate shift maximizing `|(Λ + g_j) ∩ E|`; ties go to the
/// lowest candidate index.
pub fn best_shift_for_density(
    window: &FolnerWindow,
    set: &dyn Membership,
    candidates: &[GroupElement],
) -> Result<(GroupElement, f64)> {
    if candidates.is_empty() {
        return invalid("best_shift_for_density needs at least one candidate");
    }
    let mut best = 0usize;
    let mut best_count = 0usize;
    for (j, c) in candidates.iter().enumerate() {
        let count = window.iter().filter(|g| set.contains(&(*g + c))).count();
        if j == 0 || count > best_count {
            best = j;
            best_count = count;
        }
    }
    Ok((candidates[best].clone(), best_count as f64 / window.len() as f64))
}
