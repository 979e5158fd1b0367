//! Van der Corput inequalities for bounded vector-valued sequences on Z^q.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{invalid, Error, Result};
use crate::lattice::{folner_defect, inverse_product, overlap_count, FolnerWindow, GroupElement};
use crate::operator::ZERO;
use crate::reduce::{ordered_map, sum, CompensatedSum, ComplexSum};

const BOUND_SLACK: f64 = 1e-12;
const RELATIVE_SLACK: f64 = 1e-9;

type SequenceFn = dyn Fn(&GroupElement) -> Vec<Complex64> + Send + Sync;

/// A bounded map `g ↦ f(g) ∈ C^D` with a declared bound `‖f(g)‖ ≤ B`.
#[derive(Clone)]
pub struct VectorSequence {
    q: usize,
    dim: usize,
    bound: f64,
    f: Arc<SequenceFn>,
}

impl fmt::Debug for VectorSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("VectorSequence")
            .field("q", &self.q)
            .field("dim", &self.dim)
            .field("bound", &self.bound)
            .finish_non_exhaustive()
    }
}

fn norm_sqr(v: &[Complex64]) -> f64 {
    sum(v.iter().map(|z| z.norm_sqr()))
}

fn norm(v: &[Complex64]) -> f64 {
    norm_sqr(v).sqrt()
}

fn inner(x: &[Complex64], y: &[Complex64]) -> Complex64 {
    let mut acc = ComplexSum::new();
    for (a, b) in x.iter().zip(y) {
        acc.add(a.conj() * b);
    }
    acc.value()
}

impl VectorSequence {
    pub fn from_fn<F>(q: usize, dim: usize, bound: f64, f: F) -> Result<Self>
    where
        F: Fn(&GroupElement) -> Vec<Complex64> + Send + Sync + 'static,
    {
        if q == 0 || dim == 0 {
            return invalid("vector sequence needs q ≥ 1 and dimension ≥ 1");
        }
        if !(bound.is_finite() && bound >= 0.0) {
            return invalid(format!("bound must be finite and nonnegative, got {bound}"));
        }
        Ok(Self { q, dim, bound, f: Arc::new(f) })
    }

    pub fn constant(q: usize, v: Vec<Complex64>) -> Result<Self> {
        let bound = norm(&v);
        let dim = v.len();
        Self::from_fn(q, dim, bound, move |_| v.clone())
    }

    /// `f(g) = e^{2πi α g^degree} v` on Z.
    pub fn polynomial_phase(alpha: f64, degree: u32, v: Vec<Complex64>) -> Result<Self> {
        if !alpha.is_finite() {
            return invalid("α must be finite");
        }
        let bound = norm(&v);
        let dim = v.len();
        Self::from_fn(1, dim, bound, move |g| {
            // Exact integer power; `powi` may round differently across builds.
            let x = (g.coords()[0] as i128).pow(degree) as f64;
            let phase = (alpha * x).fract();
            let z = Complex64::from_polar(1.0, std::f64::consts::TAU * phase);
            v.iter().map(|c| c * z).collect()
        })
    }

    /// Tabulated values, zero off the table.
    pub fn tabulated(q: usize, dim: usize, table: BTreeMap<GroupElement, Vec<Complex64>>) -> Result<Self> {
        if table.values().any(|v| v.len() != dim) || table.keys().any(|g| g.dim() != q) {
            return invalid("table entries must match the declared dimensions");
        }
        let bound = table.values().map(|v| norm(v)).fold(0.0, f64::max);
        Self::from_fn(q, dim, bound, move |g| table.get(g).cloned().unwrap_or_else(|| vec![ZERO; dim]))
    }

    pub fn lattice_dim(&self) -> usize {
        self.q
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn bound(&self) -> f64 {
        self.bound
    }

    /// Evaluates and checks the declared bound.
    pub fn eval(&self, g: &GroupElement) -> Result<Vec<Complex64>> {
        if g.dim() != self.q {
            return Err(Error::DimensionMismatch { expected: self.q, found: g.dim() });
        }
        let v = (self.f)(g);
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: v.len() });
        }
        let n = norm(&v);
        if n > self.bound * (1.0 + BOUND_SLACK) + BOUND_SLACK {
            return invalid(format!("‖f({g})‖ = {n} exceeds the declared bound {}", self.bound));
        }
        Ok(v)
    }

    fn check_window(&self, w: &FolnerWindow) -> Result<()> {
        if w.lattice_dim() != self.q {
            return Err(Error::DimensionMismatch { expected: self.q, found: w.lattice_dim() });
        }
        Ok(())
    }

    fn eval_all(&self, points: &[GroupElement]) -> Result<Vec<Vec<Complex64>>> {
        ordered_map(points, |g| self.eval(g)).into_iter().collect()
    }
}

/// `(1/|Λ|) Σ_{g∈Λ} f(g)`.
pub fn average_vector(f: &VectorSequence, window: &FolnerWindow) -> Result<Vec<Complex64>> {
    f.check_window(window)?;
    let values = f.eval_all(window.elements())?;
    Ok(average_of(&values, f.dim, window.len()))
}

fn vector_sum<'a>(values: impl IntoIterator<Item = &'a Vec<Complex64>>, dim: usize) -> Vec<Complex64> {
    let mut acc = vec![ComplexSum::new(); dim];
    for v in values {
        for (a, z) in acc.iter_mut().zip(v) {
            a.add(*z);
        }
    }
    acc.iter().map(ComplexSum::value).collect()
}

fn average_of(values: &[Vec<Complex64>], dim: usize, len: usize) -> Vec<Complex64> {
    let w = 1.0 / len as f64;
    vector_sum(values, dim).into_iter().map(|z| z * w).collect()
}

/// Both sides of an inequality `lhs ≤ rhs`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InequalityCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

impl InequalityCheck {
    fn new(lhs: f64, rhs: f64) -> Self {
        Self { lhs, rhs, holds: lhs <= rhs + RELATIVE_SLACK * rhs.abs() }
    }
}

/// `‖Σ_Λ f‖² ≤ |Λ| · Σ_Λ ‖f‖²`.
pub fn check_norm_square_bound(f: &VectorSequence, window: &FolnerWindow) -> Result<InequalityCheck> {
    f.check_window(window)?;
    let values = f.eval_all(window.elements())?;
    let total = vector_sum(&values, f.dim);
    let lhs = norm_sqr(&total);
    let rhs = window.len() as f64 * sum(values.iter().map(|v| norm_sqr(v)));
    Ok(InequalityCheck::new(lhs, rhs))
}

/// `‖Σ_{g∈Λ2} Σ_{h∈Λ1} f(g+h)‖² ≤ |Λ2| · Σ_{h1,h2∈Λ1} Σ_{g∈Λ2} ⟨f(g+h1), f(g+h2)⟩`.
///
/// The right side is a sum of squared norms, so an imaginary residue above
/// `1e−9·max(1, |rhs|)` is reported as a numerical error.
pub fn check_double_average_bound(
    f: &VectorSequence,
    inner_window: &FolnerWindow,
    outer_window: &FolnerWindow,
) -> Result<InequalityCheck> {
    f.check_window(inner_window)?;
    f.check_window(outer_window)?;
    let rows: Vec<Vec<Vec<Complex64>>> = ordered_map(outer_window.elements(), |g| {
        inner_window.iter().map(|h| f.eval(&(g + h))).collect::<Result<Vec<_>>>()
    })
    .into_iter()
    .collect::<Result<_>>()?;
    let total = vector_sum(rows.iter().flatten(), f.dim);
    let lhs = norm_sqr(&total);
    let per_g: Vec<Complex64> = ordered_map(&rows, |row| {
        let mut acc = ComplexSum::new();
        for x in row {
            for y in row {
                acc.add(inner(x, y));
            }
        }
        acc.value()
    });
    let mut acc = ComplexSum::new();
    for z in per_g {
        acc.add(z);
    }
    let rhs = acc.value() * outer_window.len() as f64;
    if rhs.im.abs() > RELATIVE_SLACK * rhs.re.abs().max(1.0) {
        return Err(Error::Numerical(format!("imaginary residue {} in a sum of squared norms", rhs.im)));
    }
    Ok(InequalityCheck::new(lhs, rhs.re))
}

/// `Σ_{h1,h2∈Λ} γ(h2 − h1) ≤ |Λ| · Σ_{h∈Λ⁻¹Λ} γ(h)` for `γ ≥ 0`.
pub fn check_difference_set_bound<F>(gamma: F, window: &FolnerWindow) -> Result<InequalityCheck>
where
    F: Fn(&GroupElement) -> f64 + Sync + Send,
{
    let diffs = inverse_product(window);
    let table: Vec<f64> = ordered_map(diffs.elements(), |h| gamma(h));
    if let Some(bad) = table.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
        return invalid(format!("γ must be finite and nonnegative, found {bad}"));
    }
    let at = |h: &GroupElement| table[diffs.elements().binary_search(h).expect("difference lies in Λ⁻¹Λ")];
    let mut lhs = CompensatedSum::new();
    for h1 in window.iter() {
        for h2 in window.iter() {
            lhs.add(at(&(h2 - h1)));
        }
    }
    let rhs = window.len() as f64 * sum(table.iter().copied());
    Ok(InequalityCheck::new(lhs.value(), rhs))
}

/// Compares `avg_{Λm} f` with `avg_{Λm}` of the inner averages
/// `avg_{h∈Λn} f(·+h)`; the gap is at most `B · max_{h∈Λn} defect(Λm, h)`.
pub fn check_shift_average_bound(
    f: &VectorSequence,
    outer_window: &FolnerWindow,
    inner_window: &FolnerWindow,
) -> Result<InequalityCheck> {
    f.check_window(outer_window)?;
    f.check_window(inner_window)?;
    let plain = average_vector(f, outer_window)?;
    let smoothed_rows: Vec<Vec<Complex64>> = ordered_map(outer_window.elements(), |g| {
        let vals = inner_window.iter().map(|h| f.eval(&(g + h))).collect::<Result<Vec<_>>>()?;
        Ok(average_of(&vals, f.dim, inner_window.len()))
    })
    .into_iter()
    .collect::<Result<_>>()?;
    let smoothed = average_of(&smoothed_rows, f.dim, outer_window.len());
    let gap: Vec<Complex64> = plain.iter().zip(&smoothed).map(|(a, b)| a - b).collect();
    let max_defect = inner_window.iter().map(|h| folner_defect(outer_window, h)).fold(0.0, f64::max);
    Ok(InequalityCheck::new(norm(&gap), f.bound * max_defect))
}

/// Values of a sequence on an axis-aligned bounding box, densely indexed.
struct PointTable {
    lo: Vec<i64>,
    side: Vec<usize>,
    dim: usize,
    data: Vec<Complex64>,
}

impl PointTable {
    fn build(f: &VectorSequence, lo: Vec<i64>, hi: Vec<i64>) -> Result<Self> {
        let side: Vec<usize> = lo.iter().zip(&hi).map(|(l, h)| (h - l + 1) as usize).collect();
        let total: usize = side.iter().product();
        let points: Vec<GroupElement> = (0..total)
            .map(|mut k| {
                let mut coords = vec![0i64; lo.len()];
                for axis in (0..lo.len()).rev() {
                    coords[axis] = lo[axis] + (k % side[axis]) as i64;
                    k /= side[axis];
                }
                GroupElement::new(coords)
            })
            .collect();
        let data = f.eval_all(&points)?.into_iter().flatten().collect();
        Ok(Self { lo, side, dim: f.dim, data })
    }

    /// Row-major point index of `g`.
    fn index(&self, g: &GroupElement) -> usize {
        let mut k = 0usize;
        for (axis, &x) in g.coords().iter().enumerate() {
            k = k * self.side[axis] + (x - self.lo[axis]) as usize;
        }
        k
    }

    /// Index offset of a translation by `h`.
    fn offset(&self, h: &GroupElement) -> isize {
        let mut k = 0isize;
        for (axis, &x) in h.coords().iter().enumerate() {
            k = k * self.side[axis] as isize + x as isize;
        }
        k
    }

    fn at(&self, k: usize) -> &[Complex64] {
        &self.data[k * self.dim..(k + 1) * self.dim]
    }
}

fn bounding_box<'a>(points: impl IntoIterator<Item = &'a GroupElement>, q: usize) -> (Vec<i64>, Vec<i64>) {
    let mut lo = vec![i64::MAX; q];
    let mut hi = vec![i64::MIN; q];
    for g in points {
        for (axis, &x) in g.coords().iter().enumerate() {
            lo[axis] = lo[axis].min(x);
            hi[axis] = hi[axis].max(x);
        }
    }
    (lo, hi)
}

/// `γ_h = (1/|Λ|) Σ_{g∈Λ} ⟨f(g), f(g+h)⟩` for every `h` in `hs`.
pub fn empirical_gamma(f: &VectorSequence, window: &FolnerWindow, hs: &[GroupElement]) -> Result<Vec<Complex64>> {
    f.check_window(window)?;
    if hs.is_empty() {
        return Ok(Vec::new());
    }
    let q = f.q;
    let (wlo, whi) = bounding_box(window.iter(), q);
    let (hlo, hhi) = bounding_box(hs, q);
    let lo: Vec<i64> = wlo.iter().zip(&hlo).map(|(&a, &b)| a.min(a + b)).collect();
    let hi: Vec<i64> = whi.iter().zip(&hhi).map(|(&a, &b)| a.max(a + b)).collect();
    let table = PointTable::build(f, lo, hi)?;
    let w = 1.0 / window.len() as f64;
    let base: Vec<usize> = window.iter().map(|g| table.index(g)).collect();
    Ok(ordered_map(hs, |h| {
        let shift = table.offset(h);
        let mut acc = ComplexSum::new();
        for &k in &base {
            acc.add(inner(table.at(k), table.at(k.wrapping_add_signed(shift))));
        }
        acc.value() * w
    }))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VdcVerdict {
    pub hypothesis_satisfied: bool,
    pub conclusion_observed: bool,
}

impl VdcVerdict {
    pub fn label(&self) -> &'static str {
        match (self.hypothesis_satisfied, self.conclusion_observed) {
            (true, true) => "hypothesis satisfied; conclusion observed",
            (true, false) => "hypothesis satisfied; conclusion violated",
            (false, _) => "hypothesis not satisfied; conclusion not implied",
        }
    }
}

/// Outcome of the van der Corput harness on one sequence.
#[derive(Clone, Debug, PartialEq)]
pub struct VdcReport {
    pub q: usize,
    /// Index of the window at which `γ_h` is estimated.
    pub window_index: usize,
    pub gamma: Vec<(GroupElement, Complex64)>,
    /// `(1/|Λ_n|) Σ_{h∈Λ_n⁻¹Λ_n} |γ_h|` per window.
    pub difference_set_statistic: Vec<(usize, f64)>,
    /// `|(1/|Λ_n|²) Σ_{h1,h2∈Λ_n} γ_{h2−h1}|` per window; no rate is implied.
    pub double_average: Vec<(usize, f64)>,
    /// `‖avg_{Λ_n} f‖` per window.
    pub averages: Vec<(usize, f64)>,
    pub tolerance: f64,
    pub verdict: VdcVerdict,
}

impl VdcReport {
    pub fn to_json(&self) -> Value {
        let h_json = |h: &GroupElement| -> Value {
            if self.q == 1 {
                json!(h.coords()[0])
            } else {
                json!(h.coords())
            }
        };
        let pairs = |v: &[(usize, f64)]| -> Value { v.iter().map(|(n, x)| json!([n, x])).collect() };
        json!({
            "window_index": self.window_index,
            "gamma": self.gamma.iter().map(|(h, z)| json!([h_json(h), z.re, z.im])).collect::<Value>(),
            "difference_set_statistic": pairs(&self.difference_set_statistic),
            "double_average": pairs(&self.double_average),
            "averages": pairs(&self.averages),
            "verdict": {
                "hypothesis_satisfied": self.verdict.hypothesis_satisfied,
                "conclusion_observed": self.verdict.conclusion_observed,
                "label": self.verdict.label(),
                "tolerance": self.tolerance,
            },
        })
    }
}

/// Runs the van der Corput chain: estimates `γ_h` at the largest window for
/// `h ∈ Λ⁻¹Λ` (restricted to `‖h‖_∞ ≤ truncation` if given), then reports the
/// difference-set statistic, the double average and the average norms.
///
/// The hypothesis counts as satisfied when the difference-set statistic at
/// the largest window is at most `tolerance · B²`, and the conclusion as
/// observed when the average norm there is at most `tolerance · B`.
pub fn vdc_verdict(
    f: &VectorSequence,
    windows: &[FolnerWindow],
    truncation: Option<i64>,
    tolerance: f64,
) -> Result<VdcReport> {
    if windows.is_empty() {
        return invalid("vdc_verdict needs at least one window");
    }
    if !(tolerance.is_finite() && tolerance >= 0.0) {
        return invalid("tolerance must be finite and nonnegative");
    }
    for w in windows {
        f.check_window(w)?;
    }
    let (last_pos, largest) = windows.iter().enumerate().max_by_key(|(_, w)| w.len()).expect("nonempty");
    let keep = |h: &GroupElement| truncation.is_none_or(|t| h.max_abs() <= t);
    let hs: Vec<GroupElement> = inverse_product(largest).iter().filter(|h| keep(h)).cloned().collect();
    let gammas = empirical_gamma(f, largest, &hs)?;
    let gamma_at: BTreeMap<&GroupElement, Complex64> = hs.iter().zip(gammas.iter().copied()).collect();

    let mut difference_set_statistic = Vec::with_capacity(windows.len());
    let mut double_average = Vec::with_capacity(windows.len());
    for w in windows {
        let diffs = inverse_product(w);
        let mut stat = CompensatedSum::new();
        let mut dbl = ComplexSum::new();
        for h in diffs.iter() {
            let Some(&g) = gamma_at.get(h) else { continue };
            stat.add(g.norm());
            dbl.add(g * overlap_count(w, h) as f64);
        }
        let len = w.len() as f64;
        difference_set_statistic.push((w.index(), stat.value() / len));
        double_average.push((w.index(), (dbl.value() / (len * len)).norm()));
    }

    let averages: Vec<(usize, f64)> =
        windows.iter().map(|w| Ok((w.index(), norm(&average_vector(f, w)?)))).collect::<Result<_>>()?;

    let b = f.bound;
    let verdict = VdcVerdict {
        hypothesis_satisfied: difference_set_statistic[last_pos].1 <= tolerance * b * b,
        conclusion_observed: averages[last_pos].1 <= tolerance * b,
    };
    Ok(VdcReport {
        q: f.q,
        window_index: largest.index(),
        gamma: hs.into_iter().zip(gammas).collect(),
        difference_set_statistic,
        double_average,
        averages,
        tolerance,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{box_window, WindowSchedule};
    use crate::operator::ONE;

    fn v2() -> Vec<Complex64> {
        vec![Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)]
    }

    fn close(a: &[Complex64], b: &[Complex64], tol: f64) -> bool {
        a.iter().zip(b).all(|(x, y)| (x - y).norm() < tol)
    }

    #[test]
    fn averages() {
        let w = box_window(1, 5).unwrap();
        let c = VectorSequence::constant(1, v2()).unwrap();
        assert!(close(&average_vector(&c, &w).unwrap(), &v2(), 1e-15));
        let v = v2();
        let alt = VectorSequence::from_fn(1, 2, 1.0, move |g| {
            let s = if g.coords()[0].rem_euclid(2) == 0 { 1.0 } else { -1.0 };
            v.iter().map(|z| z * s).collect()
        })
        .unwrap();
        let half = VectorSequence::polynomial_phase(0.5, 1, v2()).unwrap();
        // n = 5 is odd, so the endpoints are odd and the alternating sum is −v
        let expected: Vec<Complex64> = v2().iter().map(|z| -z / 11.0).collect();
        assert!(close(&average_vector(&alt, &w).unwrap(), &expected, 1e-15));
        assert!(close(&average_vector(&half, &w).unwrap(), &expected, 1e-12));
        let w4 = box_window(1, 4).unwrap();
        let expected: Vec<Complex64> = v2().iter().map(|z| z / 9.0).collect();
        assert!(close(&average_vector(&alt, &w4).unwrap(), &expected, 1e-15));
    }

    #[test]
    fn norm_square_examples() {
        let w = box_window(1, 3).unwrap();
        let c = check_norm_square_bound(&VectorSequence::constant(1, v2()).unwrap(), &w).unwrap();
        assert!((c.lhs - 49.0).abs() < 1e-12 && (c.rhs - 49.0).abs() < 1e-12 && c.holds);
        let basis = VectorSequence::from_fn(1, 7, 1.0, |g| {
            let mut v = vec![ZERO; 7];
            v[(g.coords()[0] + 3) as usize] = ONE;
            v
        })
        .unwrap();
        let c = check_norm_square_bound(&basis, &w).unwrap();
        assert_eq!((c.lhs, c.rhs), (7.0, 49.0));
    }

    #[test]
    fn double_average_constant_saturates() {
        let inner_w = box_window(1, 2).unwrap();
        let outer_w = box_window(1, 3).unwrap();
        let c = check_double_average_bound(&VectorSequence::constant(1, v2()).unwrap(), &inner_w, &outer_w).unwrap();
        let expected = 25.0 * 49.0;
        assert!((c.lhs - expected).abs() < 1e-9 && (c.rhs - expected).abs() < 1e-9 && c.holds);
        let weyl = VectorSequence::polynomial_phase(std::f64::consts::SQRT_2 - 1.0, 2, v2()).unwrap();
        let w4 = box_window(1, 4).unwrap();
        let c = check_double_average_bound(&weyl, &w4, &w4).unwrap();
        assert!(c.lhs < c.rhs);
    }

    #[test]
    fn difference_set_bound_on_boxes() {
        let w = box_window(2, 2).unwrap();
        let c = check_difference_set_bound(|h: &GroupElement| (h.coords()[0] as f64).abs() + 0.5, &w).unwrap();
        assert!(c.holds && c.lhs <= c.rhs);
        assert!(check_difference_set_bound(|_: &GroupElement| -1.0, &w).is_err());
    }

    #[test]
    fn bound_is_enforced() {
        let f = VectorSequence::from_fn(1, 1, 0.5, |_| vec![ONE]).unwrap();
        assert!(f.eval(&GroupElement::scalar(0)).is_err());
    }

    #[test]
    fn shift_average_bound() {
        let weyl = VectorSequence::polynomial_phase(0.3, 2, v2()).unwrap();
        let c = check_shift_average_bound(&weyl, &box_window(1, 20).unwrap(), &box_window(1, 3).unwrap()).unwrap();
        assert!(c.holds, "{c:?}");
    }

    #[test]
    fn linear_phase_fails_hypothesis() {
        let f = VectorSequence::polynomial_phase(std::f64::consts::SQRT_2 - 1.0, 1, v2()).unwrap();
        let windows = WindowSchedule::new(1, 10, 60, 10).unwrap().windows().unwrap();
        let r = vdc_verdict(&f, &windows, None, 0.05).unwrap();
        for (h, g) in &r.gamma {
            assert!((g.norm() - 1.0).abs() < 1e-9, "h = {h}");
        }
        for &(n, s) in &r.difference_set_statistic {
            let exact = (4 * n + 1) as f64 / (2 * n + 1) as f64;
            assert!((s - exact).abs() < 1e-9);
        }
        assert!(!r.verdict.hypothesis_satisfied);
        assert_eq!(r.verdict.label(), "hypothesis not satisfied; conclusion not implied");
        let json = r.to_json();
        assert!(json["gamma"][0][0].is_i64());
        assert_eq!(json["difference_set_statistic"].as_array().unwrap().len(), 6);
    }

    #[test]
    fn constant_fails_both() {
        let f = VectorSequence::constant(1, v2()).unwrap();
        let windows = WindowSchedule::new(1, 5, 20, 5).unwrap().windows().unwrap();
        let r = vdc_verdict(&f, &windows, Some(10), 0.05).unwrap();
        assert!(r.gamma.iter().all(|(h, g)| h.max_abs() <= 10 && (g - ONE).norm() < 1e-12));
        assert!(!r.verdict.hypothesis_satisfied && !r.verdict.conclusion_observed);
    }
}
