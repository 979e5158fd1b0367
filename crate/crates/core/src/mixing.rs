//! Følner-averaged correlation statistics: ergodic averages, weak-mixing and
//! asymptotic-abelianness defects, the multi-correlation defect and its
//! autocorrelation sequence `γ_h`.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::lattice::{inverse_product, FolnerWindow, GroupElement, HomSet, Homomorphism};
use crate::operator::ONE;
use crate::reduce::{ordered_map, CompensatedSum, ComplexSum};
use crate::systems::{
    evaluate_unchecked, DynamicalSystem, LocalObservable, Observable, QuasiLocalSystem, SystemHandle,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Decaying,
    NonDecaying,
    Inconclusive,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Decaying => "decaying",
            Verdict::NonDecaying => "non-decaying",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

/// Finite-horizon decay rule.
///
/// The threshold is `threshold_factor × (first value)`. The tail is the last
/// `tail_fraction` of the windows (at least one). The statistic is decaying
/// when every tail value is at most the threshold, and non-decaying when every
/// tail value stays above both the threshold and `persist_factor × (first value)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerdictRule {
    pub threshold_factor: f64,
    pub tail_fraction: f64,
    pub persist_factor: f64,
}

impl Default for VerdictRule {
    fn default() -> Self {
        Self { threshold_factor: 0.05, tail_fraction: 0.25, persist_factor: 0.5 }
    }
}

impl VerdictRule {
    pub fn validate(&self) -> Result<()> {
        let ok = self.threshold_factor.is_finite()
            && self.threshold_factor >= 0.0
            && self.tail_fraction > 0.0
            && self.tail_fraction <= 1.0
            && self.persist_factor.is_finite()
            && self.persist_factor >= 0.0;
        if ok {
            Ok(())
        } else {
            invalid(format!("bad verdict rule {self:?}"))
        }
    }

    pub fn classify(&self, values: &[f64]) -> (f64, Verdict) {
        let Some(&first) = values.first() else {
            return (0.0, Verdict::Inconclusive);
        };
        let threshold = self.threshold_factor * first;
        let tail_len = ((values.len() as f64 * self.tail_fraction).ceil() as usize).clamp(1, values.len());
        let tail = &values[values.len() - tail_len..];
        let max = tail.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min = tail.iter().copied().fold(f64::INFINITY, f64::min);
        let verdict = if max <= threshold {
            Verdict::Decaying
        } else if min > threshold && min >= self.persist_factor * first {
            Verdict::NonDecaying
        } else {
            Verdict::Inconclusive
        };
        (threshold, verdict)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WindowValue {
    pub n: usize,
    pub size: usize,
    pub value: f64,
}

/// A nonnegative per-window statistic with its decay verdict.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MixingStatistic {
    pub per_window: Vec<WindowValue>,
    pub verdict_threshold: f64,
    pub verdict: Verdict,
}

impl MixingStatistic {
    pub fn new(windows: &[FolnerWindow], values: Vec<f64>, rule: &VerdictRule) -> Self {
        let (verdict_threshold, verdict) = rule.classify(&values);
        let per_window =
            windows.iter().zip(values).map(|(w, value)| WindowValue { n: w.index(), size: w.len(), value }).collect();
        Self { per_window, verdict_threshold, verdict }
    }

    pub fn values(&self) -> Vec<f64> {
        self.per_window.iter().map(|w| w.value).collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,window_size,value\n");
        for w in &self.per_window {
            let _ = writeln!(out, "{},{},{:.16e}", w.n, w.size, w.value);
        }
        out
    }
}

/// Evaluates `f` once on every point of the union of `windows`, in
/// parallel, and returns the points in lexicographic order with their values.
fn union_values<T, F>(windows: &[FolnerWindow], f: F) -> (Vec<GroupElement>, Vec<T>)
where
    T: Send,
    F: Fn(&GroupElement) -> T + Sync + Send,
{
    let points: Vec<GroupElement> = match windows.iter().max_by_key(|w| w.len()) {
        Some(big) if windows.iter().all(|w| w.iter().all(|g| big.contains(g))) => big.elements().to_vec(),
        _ => {
            let set: BTreeSet<&GroupElement> = windows.iter().flat_map(|w| w.iter()).collect();
            set.into_iter().cloned().collect()
        }
    };
    let values = ordered_map(&points, |g| f(g));
    (points, values)
}

fn lookup<'a, T>(points: &[GroupElement], values: &'a [T], g: &GroupElement) -> &'a T {
    let i = points.binary_search(g).expect("point lies in the union of windows");
    &values[i]
}

/// `(1/|Λ_n|) Σ_{g∈Λ_n} f(g)` for every window; `f` is evaluated once per point.
pub fn window_means<F>(windows: &[FolnerWindow], f: F) -> Vec<f64>
where
    F: Fn(&GroupElement) -> f64 + Sync + Send,
{
    let (points, values) = union_values(windows, f);
    windows
        .iter()
        .map(|w| {
            let mut acc = CompensatedSum::new();
            for g in w.iter() {
                acc.add(*lookup(&points, &values, g));
            }
            acc.value() * (1.0 / w.len() as f64)
        })
        .collect()
}

pub fn window_means_complex<F>(windows: &[FolnerWindow], f: F) -> Vec<Complex64>
where
    F: Fn(&GroupElement) -> Complex64 + Sync + Send,
{
    let (points, values) = union_values(windows, f);
    windows
        .iter()
        .map(|w| {
            let mut acc = ComplexSum::new();
            for g in w.iter() {
                acc.add(*lookup(&points, &values, g));
            }
            acc.value() * (1.0 / w.len() as f64)
        })
        .collect()
}

fn check_pair<S: DynamicalSystem>(
    sys: &S,
    a: &S::Obs,
    b: &S::Obs,
    phi: &Homomorphism,
    windows: &[FolnerWindow],
) -> Result<()> {
    sys.check(a)?;
    sys.check(b)?;
    sys.check_hom(phi)?;
    check_windows(sys, windows)
}

fn check_windows<S: DynamicalSystem>(sys: &S, windows: &[FolnerWindow]) -> Result<()> {
    if windows.is_empty() {
        return invalid("at least one window is required");
    }
    for w in windows {
        if w.lattice_dim() != sys.lattice_dim() {
            return Err(Error::DimensionMismatch { expected: sys.lattice_dim(), found: w.lattice_dim() });
        }
    }
    Ok(())
}

/// `ω(a τ_{φ(g)}(b))`.
fn correlation<S: DynamicalSystem>(sys: &S, a: &S::Obs, b: &S::Obs, phi: &Homomorphism, g: &GroupElement) -> Complex64 {
    sys.product_expectation(&[a.clone(), sys.act(&phi.apply(g), b)])
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErgodicAverage {
    pub per_window: Vec<(usize, Complex64)>,
    /// `ω(a)ω(b)`.
    pub reference: Complex64,
}

/// `(1/|Λ_n|) Σ_g ω(a τ_{φ(g)}(b))` for every window.
pub fn ergodic_average<S: DynamicalSystem>(
    sys: &S,
    a: &S::Obs,
    b: &S::Obs,
    phi: &Homomorphism,
    windows: &[FolnerWindow],
) -> Result<ErgodicAverage> {
    check_pair(sys, a, b, phi, windows)?;
    let means = window_means_complex(windows, |g| correlation(sys, a, b, phi, g));
    Ok(ErgodicAverage {
        per_window: windows.iter().map(FolnerWindow::index).zip(means).collect(),
        reference: sys.expectation(a) * sys.expectation(b),
    })
}

fn defect_with<S: DynamicalSystem>(
    sys: &S,
    a: &S::Obs,
    b: &S::Obs,
    phi: &Homomorphism,
    windows: &[FolnerWindow],
    rule: &VerdictRule,
    transform: fn(f64) -> f64,
) -> Result<MixingStatistic> {
    check_pair(sys, a, b, phi, windows)?;
    rule.validate()?;
    let product = sys.expectation(a) * sys.expectation(b);
    let values = window_means(windows, |g| transform((correlation(sys, a, b, phi, g) - product).norm()));
    Ok(MixingStatistic::new(windows, values, rule))
}

/// Mean of `|ω(a τ_{φ(g)}(b)) − ω(a)ω(b)|` over each window.
pub fn weak_mixing_defect<S: DynamicalSystem>(
    sys: &S,
    a: &S::Obs,
    b: &S::Obs,
    phi: &Homomorphism,
    windows: &[FolnerWindow],
    rule: &VerdictRule,
) -> Result<MixingStatistic> {
    defect_with(sys, a, b, phi, windows, rule, |x| x)
}

/// Mean of `|ω(a τ_{φ(g)}(b)) − ω(a)ω(b)|²` over each window.
pub fn square_defect<S: DynamicalSystem>(
    sys: &S,
    a: &S::Obs,
    b: &S::Obs,
    phi: &Homomorphism,
    windows: &[FolnerWindow],
    rule: &VerdictRule,
) -> Result<MixingStatistic> {
    defect_with(sys, a, b, phi, windows, rule, |x| x * x)
}

/// Mean of `‖[a, τ_{φ(g)}(b)]‖` over each window.
pub fn asymptotic_abelianness<S: DynamicalSystem>(
    sys: &S,
    a: &S::Obs,
    b: &S::Obs,
    phi: &Homomorphism,
    windows: &[FolnerWindow],
    rule: &VerdictRule,
) -> Result<MixingStatistic> {
    check_pair(sys, a, b, phi, windows)?;
    rule.validate()?;
    let values = window_means(windows, |g| sys.commutator_norm(a, &sys.act(&phi.apply(g), b)));
    Ok(MixingStatistic::new(windows, values, rule))
}

/// Observables `a_0, …, a_k` with distinct homomorphisms `φ_1, …, φ_k`;
/// `φ_0` is the zero map.
#[derive(Clone, Debug)]
pub struct HigherOrderSpec<O> {
    observables: Vec<O>,
    homs: HomSet,
}

impl<O> HigherOrderSpec<O> {
    pub fn new(observables: Vec<O>, homs: HomSet) -> Result<Self> {
        if observables.len() != homs.homs().len() + 1 {
            return invalid(format!(
                "{} observables for {} homomorphisms; expected one more observable than maps",
                observables.len(),
                homs.homs().len()
            ));
        }
        if !homs.all_distinct() {
            return invalid("homomorphisms must be pairwise distinct");
        }
        Ok(Self { observables, homs })
    }

    pub fn order(&self) -> usize {
        self.homs.homs().len()
    }

    pub fn observables(&self) -> &[O] {
        &self.observables
    }

    pub fn homs(&self) -> &[Homomorphism] {
        self.homs.homs()
    }

    pub fn hom_set(&self) -> &HomSet {
        &self.homs
    }

    /// `(a_j, φ_j)` for `j = 0..=k`, with `φ_0 = 0`.
    pub fn factors(&self) -> (Homomorphism, Vec<(&O, &Homomorphism)>) {
        let q = self.homs.homs()[0].dim();
        (Homomorphism::zero(q), self.observables[1..].iter().zip(self.homs.homs()).collect())
    }
}

fn check_spec<S: DynamicalSystem>(sys: &S, spec: &HigherOrderSpec<S::Obs>) -> Result<()> {
    for a in spec.observables() {
        sys.check(a)?;
    }
    for phi in spec.homs() {
        sys.check_hom(phi)?;
    }
    Ok(())
}

fn all_factors<'a, O>(spec: &'a HigherOrderSpec<O>, zero: &'a Homomorphism) -> Vec<(&'a O, &'a Homomorphism)> {
    std::iter::once((&spec.observables[0], zero)).chain(spec.observables[1..].iter().zip(spec.homs())).collect()
}

/// Mean of `|ω(∏_{j=0}^k τ_{φ_j(g)}(a_j)) − ∏_j ω(a_j)|` over each window.
pub fn higher_order_defect<S: DynamicalSystem>(
    sys: &S,
    spec: &HigherOrderSpec<S::Obs>,
    windows: &[FolnerWindow],
    rule: &VerdictRule,
) -> Result<MixingStatistic> {
    check_spec(sys, spec)?;
    check_windows(sys, windows)?;
    rule.validate()?;
    let zero = Homomorphism::zero(sys.lattice_dim());
    let factors = all_factors(spec, &zero);
    let product = spec.observables().iter().fold(ONE, |acc, a| acc * sys.expectation(a));
    let values = window_means(windows, |g| (evaluate_unchecked(sys, &factors, g) - product).norm());
    Ok(MixingStatistic::new(windows, values, rule))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GammaEntry {
    pub h: GroupElement,
    pub empirical: Complex64,
    pub closed_form: Complex64,
    pub difference: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GammaReport {
    /// `κ = ∏_{j=1}^k ω(a_j)`.
    pub kappa: Complex64,
    /// Index of the window used for the empirical column.
    pub window_index: usize,
    pub entries: Vec<GammaEntry>,
}

impl GammaReport {
    pub fn max_difference(&self) -> f64 {
        self.entries.iter().map(|e| e.difference).fold(0.0, f64::max)
    }
}

/// `γ_h` two ways: the window average of `⟨u_g, u_{g+h}⟩` with
/// `u_g = ∏_{j≥1} τ_{φ_j(g)}(a_j) − κ` in the GNS space, at the largest window,
/// and the limit formula `∏_j ω(a_j* τ_{φ_j(h)}(a_j)) − |κ|²`.
///
/// `h_range` defaults to `Λ⁻¹Λ` of the largest window.
pub fn gamma_sequence<S: DynamicalSystem>(
    sys: &S,
    spec: &HigherOrderSpec<S::Obs>,
    h_range: Option<&[GroupElement]>,
    windows: &[FolnerWindow],
) -> Result<GammaReport> {
    check_spec(sys, spec)?;
    check_windows(sys, windows)?;
    let largest = windows.iter().max_by_key(|w| w.len()).expect("windows checked nonempty");
    let default_range;
    let hs: &[GroupElement] = match h_range {
        Some(hs) => {
            for h in hs {
                sys.check_element(h)?;
            }
            hs
        }
        None => {
            default_range = inverse_product(largest);
            default_range.elements()
        }
    };
    let (_, factors) = spec.factors();
    let kappa = factors.iter().fold(ONE, |acc, (a, _)| acc * sys.expectation(a));
    let adjoints: Vec<S::Obs> = factors.iter().map(|(a, _)| sys.adjoint(a)).collect();
    let x_at = |g: &GroupElement| -> S::Obs {
        let moved: Vec<S::Obs> = factors.iter().map(|(a, phi)| sys.act(&phi.apply(g), a)).collect();
        sys.multiply(&moved)
    };
    let entries = ordered_map(hs, |h| {
        let closed = factors.iter().zip(&adjoints).fold(ONE, |acc, ((a, phi), a_star)| {
            acc * sys.product_expectation(&[a_star.clone(), sys.act(&phi.apply(h), a)])
        }) - kappa.norm_sqr();
        let mut acc = ComplexSum::new();
        for g in largest.iter() {
            let x = x_at(g);
            let y = x_at(&(g + h));
            let xy = sys.product_expectation(&[sys.adjoint(&x), y.clone()]);
            let inner = xy - kappa * sys.expectation(&x).conj() - kappa.conj() * sys.expectation(&y) + kappa.norm_sqr();
            acc.add(inner);
        }
        let empirical = acc.value() * (1.0 / largest.len() as f64);
        GammaEntry { h: h.clone(), empirical, closed_form: closed, difference: (empirical - closed).norm() }
    });
    Ok(GammaReport { kappa, window_index: largest.index(), entries })
}

/// The constant `c` with `higher_order_defect ≤ c/|Λ_n|` on the shift system.
///
/// Shifted supports overlap only for `g` in the collision set
/// `C = {g : (φ_j − φ_l)g ∈ supp(a_l) − supp(a_j)}`; elsewhere the product
/// state factorizes and the integrand vanishes. Each collision term is at
/// most `∏‖a_j‖ + ∏|ω(a_j)|`, so `c = |C| · (∏‖a_j‖ + ∏|ω(a_j)|)`.
pub fn collision_bound(sys: &QuasiLocalSystem, spec: &HigherOrderSpec<LocalObservable>) -> Result<CollisionBound> {
    check_spec(sys, spec)?;
    let zero = Homomorphism::zero(sys.lattice_dim());
    let factors = all_factors(spec, &zero);
    let mut collisions = BTreeSet::new();
    for j in 0..factors.len() {
        for l in j + 1..factors.len() {
            let (aj, pj) = factors[j];
            let (al, pl) = factors[l];
            let diff = pj.difference(pl);
            for sj in aj.support() {
                for sl in al.support() {
                    match diff.solve_integer(&(sl - sj)) {
                        None => {
                            return invalid(format!("φ_{j} − φ_{l} is singular; the collision set may be infinite"))
                        }
                        Some(Some(g)) => {
                            collisions.insert(g);
                        }
                        Some(None) => {}
                    }
                }
            }
        }
    }
    let norm_product: f64 = factors.iter().map(|(a, _)| sys.operator_norm(a)).product();
    let mean_product: f64 = factors.iter().map(|(a, _)| sys.expectation(a).norm()).product();
    let per_term = norm_product + mean_product;
    Ok(CollisionBound { collisions: collisions.into_iter().collect(), per_term, constant: 0.0 }.finish())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CollisionBound {
    pub collisions: Vec<GroupElement>,
    pub per_term: f64,
    pub constant: f64,
}

impl CollisionBound {
    fn finish(mut self) -> Self {
        self.constant = self.collisions.len() as f64 * self.per_term;
        self
    }

    pub fn bound(&self, window: &FolnerWindow) -> f64 {
        self.constant / window.len() as f64
    }
}

/// [`collision_bound`] through the tagged handle; only the quasi-local backend qualifies.
pub fn collision_bound_for(sys: &SystemHandle, spec: &HigherOrderSpec<Observable>) -> Result<CollisionBound> {
    let SystemHandle::QuasiLocal(ql) = sys else {
        return Err(Error::BackendMismatch("collision bounds need the quasi-local backend"));
    };
    let locals = spec
        .observables()
        .iter()
        .map(|o| o.as_local().cloned().ok_or(Error::BackendMismatch("expected local observables")))
        .collect::<Result<Vec<_>>>()?;
    collision_bound(ql, &HigherOrderSpec::new(locals, spec.hom_set().clone())?)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LimitVerdict {
    Zero,
    Nonzero,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelSetDensity {
    pub epsilon: f64,
    pub per_window: Vec<(usize, f64)>,
    pub verdict: LimitVerdict,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityLimitReport {
    pub averages: Vec<(usize, f64)>,
    pub average_verdict: LimitVerdict,
    pub level_sets: Vec<LevelSetDensity>,
    pub density_verdict: LimitVerdict,
    pub tolerance: f64,
    pub agree: bool,
}

/// Compares the two sides of the Koopman–von Neumann equivalence at a finite
/// horizon: the window averages of `f ≥ 0`, and the densities of the level
/// sets `S_ε = {f ≥ ε}`. Each side is called zero when its value at the
/// largest window is at most `tolerance`.
pub fn density_limit_check<F>(
    f: F,
    windows: &[FolnerWindow],
    epsilons: &[f64],
    tolerance: f64,
) -> Result<DensityLimitReport>
where
    F: Fn(&GroupElement) -> f64 + Sync + Send,
{
    if windows.is_empty() {
        return invalid("density_limit_check needs at least one window");
    }
    if epsilons.is_empty() || epsilons.iter().any(|&e| !(e > 0.0 && e.is_finite())) {
        return invalid("ε-grid must be nonempty and positive");
    }
    let (points, values) = union_values(windows, |g| f(g));
    if let Some(bad) = values.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
        return invalid(format!("f must be finite and nonnegative, found {bad}"));
    }
    let last = windows.iter().enumerate().max_by_key(|(_, w)| w.len()).map(|(i, _)| i).unwrap_or(0);
    let verdict = |x: f64| if x <= tolerance { LimitVerdict::Zero } else { LimitVerdict::Nonzero };
    let averages: Vec<(usize, f64)> = windows
        .iter()
        .map(|w| {
            let mut acc = CompensatedSum::new();
            for g in w.iter() {
                acc.add(*lookup(&points, &values, g));
            }
            (w.index(), acc.value() / w.len() as f64)
        })
        .collect();
    let average_verdict = verdict(averages[last].1);
    let level_sets: Vec<LevelSetDensity> = epsilons
        .iter()
        .map(|&epsilon| {
            let per_window: Vec<(usize, f64)> = windows
                .iter()
                .map(|w| {
                    let count = w.iter().filter(|g| *lookup(&points, &values, g) >= epsilon).count();
                    (w.index(), count as f64 / w.len() as f64)
                })
                .collect();
            let v = verdict(per_window[last].1);
            LevelSetDensity { epsilon, per_window, verdict: v }
        })
        .collect();
    let density_verdict = if level_sets.iter().all(|l| l.verdict == LimitVerdict::Zero) {
        LimitVerdict::Zero
    } else {
        LimitVerdict::Nonzero
    };
    Ok(DensityLimitReport {
        agree: average_verdict == density_verdict,
        averages,
        average_verdict,
        level_sets,
        density_verdict,
        tolerance,
    })
}

/// `|ω(a τ_{φ(g)}(b))|²`.
pub fn squared_correlation<S: DynamicalSystem>(
    sys: &S,
    a: &S::Obs,
    b: &S::Obs,
    phi: &Homomorphism,
    g: &GroupElement,
) -> f64 {
    correlation(sys, a, b, phi, g).norm_sqr()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{shift_window, WindowSchedule};
    use crate::operator::ZERO;
    use crate::systems::{rotation_algebra_system, shift_system};

    fn boxes(n_max: usize) -> Vec<FolnerWindow> {
        WindowSchedule::new(1, 1, n_max, 1).unwrap().windows().unwrap()
    }

    fn z0() -> LocalObservable {
        LocalObservable::pauli(2, &[GroupElement::scalar(0)], "Z").unwrap()
    }

    #[test]
    fn shift_system_weak_mixing_law() {
        let sys = shift_system(1, 2).unwrap();
        let id = Homomorphism::identity(1);
        let windows = boxes(50);
        let stat = weak_mixing_defect(&sys, &z0(), &z0(), &id, &windows, &VerdictRule::default()).unwrap();
        for w in &stat.per_window {
            assert!((w.value - 1.0 / (2 * w.n + 1) as f64).abs() < 1e-15, "n = {}", w.n);
        }
        assert_eq!(stat.verdict, Verdict::Decaying);
        let sq = square_defect(&sys, &z0(), &z0(), &id, &windows, &VerdictRule::default()).unwrap();
        assert_eq!(sq.values(), stat.values());
        assert_eq!(sq.verdict, stat.verdict);
    }

    #[test]
    fn shift_system_ergodic_average() {
        let sys = shift_system(1, 2).unwrap();
        let id = Homomorphism::identity(1);
        let avg = ergodic_average(&sys, &z0(), &z0(), &id, &boxes(10)).unwrap();
        for (n, v) in avg.per_window {
            assert!((v - Complex64::new(1.0 / (2 * n + 1) as f64, 0.0)).norm() < 1e-15);
        }
        assert_eq!(avg.reference, ZERO);
    }

    #[test]
    fn rotation_average_matches_geometric_sum() {
        let sys = rotation_algebra_system(1, 5).unwrap();
        let v = sys.named("V").unwrap().clone();
        let vs = v.adjoint();
        let id = Homomorphism::identity(1);
        let avg = ergodic_average(&sys, &vs, &v, &id, &boxes(12)).unwrap();
        for (n, value) in avg.per_window {
            let n = n as i64;
            let oracle: Complex64 = (-n..=n)
                .map(|g| Complex64::from_polar(1.0, -std::f64::consts::TAU * g as f64 / 5.0))
                .sum::<Complex64>()
                / (2 * n + 1) as f64;
            assert!((value - oracle).norm() < 1e-12);
        }
        let stat = weak_mixing_defect(&sys, &vs, &v, &id, &boxes(20), &VerdictRule::default()).unwrap();
        assert!(stat.values().iter().all(|x| (x - 1.0).abs() < 1e-12));
        assert_eq!(stat.verdict, Verdict::NonDecaying);
    }

    #[test]
    fn identity_factor_gives_zero_defect() {
        let sys = shift_system(1, 2).unwrap();
        let id = Homomorphism::identity(1);
        let one = sys.identity();
        let stat = weak_mixing_defect(&sys, &z0(), &one, &id, &boxes(5), &VerdictRule::default()).unwrap();
        assert!(stat.values().iter().all(|&x| x == 0.0));
        let ab = asymptotic_abelianness(&sys, &z0(), &one, &id, &boxes(5), &VerdictRule::default()).unwrap();
        assert!(ab.values().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn abelianness_examples() {
        let sys = shift_system(1, 2).unwrap();
        let id = Homomorphism::identity(1);
        let x0 = LocalObservable::pauli(2, &[GroupElement::scalar(0)], "X").unwrap();
        let stat = asymptotic_abelianness(&sys, &x0, &z0(), &id, &boxes(10), &VerdictRule::default()).unwrap();
        for w in &stat.per_window {
            assert!((w.value - 2.0 / (2 * w.n + 1) as f64).abs() < 1e-12);
        }
        let rot = rotation_algebra_system(1, 2).unwrap();
        let u = rot.named("U").unwrap().clone();
        let v = rot.named("V").unwrap().clone();
        let stat = asymptotic_abelianness(&rot, &u, &v, &id, &boxes(10), &VerdictRule::default()).unwrap();
        assert!(stat.values().iter().all(|x| (x - 2.0).abs() < 1e-12));
        assert_eq!(stat.verdict, Verdict::NonDecaying);
    }

    #[test]
    fn shifted_windows_give_same_verdict() {
        let sys = shift_system(1, 2).unwrap();
        let id = Homomorphism::identity(1);
        let plain = WindowSchedule::new(1, 4, 60, 1).unwrap().windows().unwrap();
        let shifted: Vec<_> =
            plain.iter().map(|w| shift_window(w, &GroupElement::scalar((w.index() % 7) as i64 - 3))).collect();
        let rule = VerdictRule::default();
        let a = weak_mixing_defect(&sys, &z0(), &z0(), &id, &plain, &rule).unwrap();
        let b = weak_mixing_defect(&sys, &z0(), &z0(), &id, &shifted, &rule).unwrap();
        assert_eq!(a.verdict, b.verdict);
    }

    fn scalar_homs(ms: &[i64]) -> HomSet {
        HomSet::new(ms.iter().map(|&m| Homomorphism::scalar(1, m)).collect()).unwrap()
    }

    #[test]
    fn higher_order_pauli_z() {
        let sys = shift_system(1, 2).unwrap();
        let windows = boxes(20);
        let rule = VerdictRule::default();
        // three σ_z factors multiply to σ_z at the origin, so the only
        // collision term vanishes
        let spec = HigherOrderSpec::new(vec![z0(); 3], scalar_homs(&[1, 2])).unwrap();
        let stat = higher_order_defect(&sys, &spec, &windows, &rule).unwrap();
        assert!(stat.values().iter().all(|&x| x == 0.0));
        let spec = HigherOrderSpec::new(vec![z0(); 4], scalar_homs(&[1, 2, 3])).unwrap();
        let stat = higher_order_defect(&sys, &spec, &windows, &rule).unwrap();
        let bound = collision_bound(&sys, &spec).unwrap();
        assert_eq!(bound.collisions, vec![GroupElement::scalar(0)]);
        for (w, s) in windows.iter().zip(&stat.per_window) {
            assert!((s.value - 1.0 / w.len() as f64).abs() < 1e-15);
            assert!(s.value <= bound.bound(w) + 1e-12);
        }
    }

    #[test]
    fn k_equals_one_is_weak_mixing() {
        let sys = shift_system(1, 2).unwrap();
        let windows = boxes(8);
        let rule = VerdictRule::default();
        let x = LocalObservable::pauli(2, &[GroupElement::scalar(0), GroupElement::scalar(1)], "XZ").unwrap();
        let y = sys.combine(&[(ONE, &z0()), (ONE, &sys.identity())]);
        let spec = HigherOrderSpec::new(vec![x.clone(), y.clone()], scalar_homs(&[1])).unwrap();
        let a = higher_order_defect(&sys, &spec, &windows, &rule).unwrap();
        let b = weak_mixing_defect(&sys, &x, &y, &Homomorphism::identity(1), &windows, &rule).unwrap();
        assert_eq!(a.values(), b.values());
    }

    #[test]
    fn spec_rejects_repeated_maps() {
        let homs = HomSet::new(vec![Homomorphism::scalar(1, 2), Homomorphism::scalar(1, 2)]);
        if let Ok(homs) = homs {
            assert!(HigherOrderSpec::new(vec![z0(); 3], homs).is_err());
        }
        assert!(HigherOrderSpec::new(vec![z0(); 2], scalar_homs(&[1, 2])).is_err());
    }

    #[test]
    fn gamma_shift_system() {
        let sys = shift_system(1, 2).unwrap();
        let spec = HigherOrderSpec::new(vec![z0(), z0()], scalar_homs(&[1])).unwrap();
        let report = gamma_sequence(&sys, &spec, None, &boxes(6)).unwrap();
        assert_eq!(report.entries.len(), 25);
        for e in &report.entries {
            let expected = if e.h.is_zero() { ONE } else { ZERO };
            assert_eq!(e.closed_form, expected);
            assert!(e.difference < 1e-12);
        }
    }

    #[test]
    fn gamma_of_identities_is_zero() {
        let sys = shift_system(1, 2).unwrap();
        let one = sys.identity();
        let spec = HigherOrderSpec::new(vec![one.clone(), one.clone(), one], scalar_homs(&[1, 2])).unwrap();
        let h0 = [GroupElement::scalar(0)];
        let report = gamma_sequence(&sys, &spec, Some(&h0), &boxes(3)).unwrap();
        assert_eq!(report.entries[0].closed_form, ZERO);
        assert_eq!(report.entries[0].empirical, ZERO);
    }

    #[test]
    fn density_limit_examples() {
        let windows = WindowSchedule::new(1, 10, 200, 10).unwrap().windows().unwrap();
        let zero = density_limit_check(|_| 0.0, &windows, &[0.5], 0.05).unwrap();
        assert_eq!(zero.average_verdict, LimitVerdict::Zero);
        assert!(zero.agree);
        let one = density_limit_check(|_| 1.0, &windows, &[0.5], 0.05).unwrap();
        assert_eq!(one.average_verdict, LimitVerdict::Nonzero);
        assert_eq!(one.density_verdict, LimitVerdict::Nonzero);
        assert_eq!(one.level_sets[0].per_window.last().unwrap().1, 1.0);
        let squares = |g: &GroupElement| {
            let x = g.coords()[0];
            let r = (x.max(0) as f64).sqrt().round() as i64;
            if x >= 0 && r * r == x {
                1.0
            } else {
                0.0
            }
        };
        let sq = density_limit_check(squares, &windows, &[1.0], 0.05).unwrap();
        assert_eq!(sq.average_verdict, LimitVerdict::Zero);
        assert_eq!(sq.density_verdict, LimitVerdict::Zero);
        assert!(sq.averages.last().unwrap().1 < sq.averages[0].1);
        assert!(density_limit_check(|_| -1.0, &windows, &[0.5], 0.05).is_err());
    }
}
