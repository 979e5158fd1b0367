//! Property suites over seeded random inputs and fixed reference systems.
//!
//! Every trial draws from its own ChaCha stream, so a suite reproduces the
//! same report for a given seed regardless of the thread count.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::compactness::orbit_epsilon_structure;
use crate::error::{invalid, Result};
use crate::lattice::{
    best_shift_for_density, box_window, folner_defect, inverse_product, lower_density, relative_density_witness,
    shift_window, tempelman_ratio, FolnerWindow, GroupElement, Homomorphism, SetSpec, WindowSchedule,
};
use crate::mixing::{square_defect, squared_correlation, weak_mixing_defect, VerdictRule};
use crate::operator::{telescope_decompose, ComplexMatrix, ONE};
use crate::random::{gaussian, gaussian_matrix, random_finite_system, random_sequence, trial_rng, SeededRng};
use crate::reduce::ordered_map;
use crate::spectral::{eigenoperator_factor, gns_build, koopman_split, szemeredi_driver, CLUSTER_TOL};
use crate::systems::{
    clock_shift_system, cyclic_system, evaluate, product_system, rotation_algebra_system, shift_system,
    DynamicalSystem, FiniteSystem, LocalObservable, Observable, SystemHandle,
};
use crate::vdc::{
    check_difference_set_bound, check_double_average_bound, check_norm_square_bound, check_shift_average_bound,
};

/// Outcome of one trial: the largest observed excess and the first failed check.
#[derive(Clone, Debug, Default)]
pub struct Tally {
    excess: f64,
    failure: Option<String>,
}

impl Tally {
    /// Records `lhs ≤ rhs` with slack `rel·|rhs| + abs`.
    pub fn le(&mut self, what: &str, lhs: f64, rhs: f64, rel: f64, abs: f64) {
        let excess = lhs - rhs;
        if excess.is_nan() || excess > rel * rhs.abs() + abs {
            self.failure.get_or_insert_with(|| format!("{what}: {lhs:e} > {rhs:e}"));
        }
        if excess > self.excess {
            self.excess = excess;
        }
    }

    pub fn close(&mut self, what: &str, a: f64, b: f64, tol: f64) {
        self.le(what, (a - b).abs(), 0.0, 0.0, tol);
    }

    pub fn holds(&mut self, what: &str, condition: bool) {
        if !condition {
            self.failure.get_or_insert_with(|| what.to_string());
        }
    }

    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

type TrialFn = fn(&mut SeededRng, usize) -> Result<Tally>;

struct Suite {
    name: &'static str,
    default_trials: usize,
    trial: TrialFn,
}

const SUITES: &[Suite] = &[
    Suite { name: "state-inequalities", default_trials: 1000, trial: state_inequalities },
    Suite { name: "automorphism", default_trials: 200, trial: automorphism },
    Suite { name: "quasi-local-embedding", default_trials: 200, trial: quasi_local_embedding },
    Suite { name: "product-identity", default_trials: 100, trial: product_identity },
    Suite { name: "vdc-norm-square", default_trials: 1000, trial: vdc_norm_square },
    Suite { name: "vdc-double-average", default_trials: 1000, trial: vdc_double_average },
    Suite { name: "vdc-difference-set", default_trials: 1000, trial: vdc_difference_set },
    Suite { name: "shift-average", default_trials: 200, trial: shift_average },
    Suite { name: "folner", default_trials: 200, trial: folner },
    Suite { name: "chain-inequality", default_trials: 100, trial: chain_inequality },
    Suite { name: "perturbation", default_trials: 200, trial: perturbation },
    Suite { name: "separated-monotone", default_trials: 100, trial: separated_monotone },
    Suite { name: "koopman", default_trials: 50, trial: koopman },
    Suite { name: "orbit-boundedness", default_trials: 3, trial: orbit_boundedness },
    Suite { name: "verdict-agreement", default_trials: 5, trial: verdict_agreement },
    Suite { name: "quasi-local-recurrence", default_trials: 6, trial: quasi_local_recurrence },
];

pub fn suite_names() -> Vec<&'static str> {
    SUITES.iter().map(|s| s.name).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialFailure {
    pub trial: usize,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub name: String,
    pub trials: usize,
    pub failures: usize,
    pub max_excess: f64,
    pub first_failure: Option<TrialFailure>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InvariantsReport {
    pub seed: u64,
    pub suites: Vec<SuiteReport>,
}

impl InvariantsReport {
    pub fn passed(&self) -> bool {
        self.suites.iter().all(SuiteReport::passed)
    }

    pub fn failed(&self) -> Vec<&SuiteReport> {
        self.suites.iter().filter(|s| !s.passed()).collect()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "seed": self.seed,
            "passed": self.passed(),
            "suites": self.suites,
        })
    }
}

/// Runs one suite; `trials` overrides the suite's default count.
pub fn run_suite(name: &str, seed: u64, trials: Option<usize>) -> Result<SuiteReport> {
    let Some((index, suite)) = SUITES.iter().enumerate().find(|(_, s)| s.name == name) else {
        return invalid(format!("unknown invariant suite {name:?}; known: {}", suite_names().join(", ")));
    };
    let count = trials.unwrap_or(suite.default_trials);
    let ids: Vec<usize> = (0..count).collect();
    let outcomes = ordered_map(&ids, |&i| {
        let mut rng = trial_rng(seed, ((index as u64) << 32) | i as u64);
        match (suite.trial)(&mut rng, i) {
            Ok(t) => t,
            Err(e) => Tally { excess: 0.0, failure: Some(format!("error: {e}")) },
        }
    });
    let mut report =
        SuiteReport { name: suite.name.to_string(), trials: count, failures: 0, max_excess: 0.0, first_failure: None };
    for (i, t) in outcomes.into_iter().enumerate() {
        report.max_excess = report.max_excess.max(t.excess);
        if let Some(detail) = t.failure {
            report.failures += 1;
            if report.first_failure.is_none() {
                report.first_failure = Some(TrialFailure { trial: i, detail });
            }
        }
    }
    Ok(report)
}

/// Runs the named suites (all suites when `names` is empty) in registry order.
pub fn run_invariants(seed: u64, names: &[String], trials: Option<usize>) -> Result<InvariantsReport> {
    for n in names {
        if !SUITES.iter().any(|s| s.name == n) {
            return invalid(format!("unknown invariant suite {n:?}; known: {}", suite_names().join(", ")));
        }
    }
    let suites = SUITES
        .iter()
        .filter(|s| names.is_empty() || names.iter().any(|n| n == s.name))
        .map(|s| run_suite(s.name, seed, trials))
        .collect::<Result<Vec<_>>>()?;
    Ok(InvariantsReport { seed, suites })
}

fn random_element(rng: &mut SeededRng, q: usize, radius: i64) -> GroupElement {
    GroupElement::new((0..q).map(|_| rng.random_range(-radius..=radius)).collect())
}

fn random_system(rng: &mut SeededRng, max_n: usize, tracial: bool) -> Result<FiniteSystem> {
    let n = rng.random_range(1..=max_n);
    let q = rng.random_range(1..=2);
    random_finite_system(rng, n, q, tracial)
}

fn state_inequalities(rng: &mut SeededRng, _: usize) -> Result<Tally> {
    let tracial = rng.random_bool(0.5);
    let sys = random_system(rng, 5, tracial)?;
    let n = sys.dim();
    let (a, b, c) = (gaussian_matrix(rng, n), gaussian_matrix(rng, n), gaussian_matrix(rng, n));
    let w = |x: &ComplexMatrix| sys.omega_norm(x);
    let mut t = Tally::default();
    let ab = sys.expectation(&(&a.adjoint() * &b)).norm();
    t.le("Cauchy-Schwarz", ab, w(&a) * w(&b), 1e-10, 1e-12);
    t.le("state bound", w(&a), a.operator_norm(), 1e-10, 1e-12);
    t.le("positivity", -sys.expectation(&(&a.adjoint() * &a)).re, 0.0, 0.0, 1e-12);
    t.le("triangle", w(&(&a + &b)), w(&a) + w(&b), 1e-10, 1e-12);
    if sys.is_tracial() {
        let abc = sys.expectation(&(&(&a * &b) * &c)).norm();
        t.le("tracial bound", abc, a.operator_norm() * w(&b) * c.operator_norm(), 1e-10, 1e-12);
    }
    Ok(t)
}

fn automorphism(rng: &mut SeededRng, _: usize) -> Result<Tally> {
    let sys = random_system(rng, 5, false)?;
    let (n, q) = (sys.dim(), sys.lattice_dim());
    let (a, b) = (gaussian_matrix(rng, n), gaussian_matrix(rng, n));
    let (g, h) = (random_element(rng, q, 3), random_element(rng, q, 3));
    let tau = |x: &ComplexMatrix| sys.act(&g, x);
    let mut t = Tally::default();
    t.le("multiplicative", tau(&(&a * &b)).max_abs_diff(&(&tau(&a) * &tau(&b))), 0.0, 0.0, 1e-10);
    t.le("adjoint", tau(&a.adjoint()).max_abs_diff(&tau(&a).adjoint()), 0.0, 0.0, 1e-10);
    let composed = sys.act(&g, &sys.act(&h, &a));
    t.le("group law", composed.max_abs_diff(&sys.act(&(&g + &h), &a)), 0.0, 0.0, 1e-10);
    t.close("norm invariance", tau(&a).operator_norm(), a.operator_norm(), 1e-10);
    t.close("ω-norm invariance", sys.omega_norm(&tau(&a)), sys.omega_norm(&a), 1e-10);
    t.close("isometry", sys.omega_norm(&(&tau(&a) - &tau(&b))), sys.omega_norm(&(&a - &b)), 1e-10);
    Ok(t)
}

fn quasi_local_embedding(rng: &mut SeededRng, _: usize) -> Result<Tally> {
    let d = rng.random_range(2..=3);
    let q = rng.random_range(1..=2);
    let sys = shift_system(q, d)?;
    let mut sites: Vec<GroupElement> = Vec::new();
    let k = rng.random_range(1..=3);
    while sites.len() < k {
        let g = random_element(rng, q, 2);
        if !sites.contains(&g) {
            sites.push(g);
        }
    }
    let dim = d.pow(k as u32);
    let a = LocalObservable::new(d, sites.clone(), gaussian_matrix(rng, dim))?;
    let mut window = a.support().to_vec();
    let pad = rng.random_range(0..=2);
    while window.len() < a.support().len() + pad {
        let g = random_element(rng, q, 3);
        if !window.contains(&g) {
            window.push(g);
        }
    }
    window.sort();
    let mut t = Tally::default();
    let direct = sys.expectation(&a);
    let padded = sys.expectation_on(&a, &window)?;
    t.le("padding", (direct - padded).norm(), 0.0, 0.0, 1e-12 * a.tensor().operator_norm().max(1.0));
    let g = random_element(rng, q, 5);
    t.le("shift invariance", (sys.expectation(&sys.act(&g, &a)) - direct).norm(), 0.0, 0.0, 1e-12);
    Ok(t)
}

fn product_identity(rng: &mut SeededRng, _: usize) -> Result<Tally> {
    let sys = random_system(rng, 4, false)?;
    let (n, q) = (sys.dim(), sys.lattice_dim());
    let prod = product_system(&sys)?;
    let (a, b) = (gaussian_matrix(rng, n), gaussian_matrix(rng, n));
    let phi = Homomorphism::scalar(q, rng.random_range(1..=3));
    let g = random_element(rng, q, 5);
    let (la, lb) = (FiniteSystem::lift(&a), FiniteSystem::lift(&b));
    let integrand = evaluate(&prod, &[(&la, &Homomorphism::zero(q)), (&lb, &phi)], &g)?;
    let direct = squared_correlation(&sys, &a, &b, &phi, &g);
    let mut t = Tally::default();
    t.close("product integrand", integrand.re, direct, 1e-10);
    t.close("imaginary part", integrand.im, 0.0, 1e-10);
    Ok(t)
}

/// Lattice dimension and window index: indices up to 8 on Z, up to 3 on Z².
fn small_box(rng: &mut SeededRng) -> (usize, usize) {
    let q = rng.random_range(1..=2);
    let n = if q == 1 { rng.random_range(1..=8) } else { rng.random_range(1..=3) };
    (q, n)
}

fn vdc_norm_square(rng: &mut SeededRng, _: usize) -> Result<Tally> {
    let (q, n) = small_box(rng);
    let dim = rng.random_range(1..=8);
    let bound = rng.random_range(0.1..3.0);
    let f = random_sequence(rng, q, dim, n + 2, bound)?;
    let w = shift_window(&box_window(q, n)?, &random_element(rng, q, 2));
    let c = check_norm_square_bound(&f, &w)?;
    let mut t = Tally::default();
    t.le("norm-square bound", c.lhs, c.rhs, 1e-9, 0.0);
    Ok(t)
}

fn vdc_double_average(rng: &mut SeededRng, _: usize) -> Result<Tally> {
    let (q, n1) = small_box(rng);
    let n2 = if q == 1 { rng.random_range(1..=8) } else { rng.random_range(1..=3) };
    let dim = rng.random_range(1..=8);
    let bound = rng.random_range(0.1..3.0);
    let f = random_sequence(rng, q, dim, n1 + n2, bound)?;
    let c = check_double_average_bound(&f, &box_window(q, n1)?, &box_window(q, n2)?)?;
    let mut t = Tally::default();
    t.le("double-average bound", c.lhs, c.rhs, 1e-9, 0.0);
    Ok(t)
}

fn vdc_difference_set(rng: &mut SeededRng, _: usize) -> Result<Tally> {
    let (q, n) = small_box(rng);
    let full = box_window(q, n)?;
    let keep = rng.random_range(0.2..1.0);
    let mut elements: Vec<GroupElement> = full.iter().filter(|_| rng.random_bool(keep)).cloned().collect();
    if elements.is_empty() {
        elements.push(GroupElement::zero(q));
    }
    let window = FolnerWindow::custom(n, elements)?;
    let gamma: BTreeMap<GroupElement, f64> =
        inverse_product(&window).iter().map(|h| (h.clone(), rng.random::<f64>())).collect();
    let c = check_difference_set_bound(|h| gamma[h], &window)?;
    let mut t = Tally::default();
    t.le("difference-set bound", c.lhs, c.rhs, 1e-9, 0.0);
    Ok(t)
}

fn shift_average(rng: &mut SeededRng, _: usize) -> Result<Tally> {
    let (q, m) = small_box(rng);
    let n = rng.random_range(1..=if q == 1 { 4 } else { 2 });
    let dim = rng.random_range(1..=4);
    let bound = rng.random_range(0.1..3.0);
    let f = random_sequence(rng, q, dim, m + n + 1, bound)?;
    let c = check_shift_average_bound(&f, &box_window(q, m)?, &box_window(q, n)?)?;
    let mut t = Tally::default();
    t.le("shifted-average gap", c.lhs, c.rhs, 1e-9, 1e-12);
    Ok(t)
}

fn folner(rng: &mut SeededRng, _: usize) -> Result<Tally> {
    let q = rng.random_range(1..=3);
    let n = rng.random_range(1..=if q == 3 { 3 } else { 6 });
    let w = box_window(q, n)?;
    let h = random_element(rng, q, 10);
    let g = random_element(rng, q, 2 * n as i64);
    let shifted = shift_window(&w, &h);
    let mut t = Tally::default();
    t.holds("shift preserves size", shifted.len() == w.len());
    t.close("shift preserves defect", folner_defect(&shifted, &g), folner_defect(&w, &g), 0.0);
    t.le("Tempelman bound", tempelman_ratio(&w), (1u64 << q) as f64, 0.0, 0.0);
    t.close("unit defect", folner_defect(&w, &GroupElement::unit(q, 0)), 2.0 / (2 * n + 1) as f64, 1e-15);

    let modulus = rng.random_range(2..=5);
    let residue = rng.random_range(0..modulus);
    let axis = rng.random_range(0..q);
    let set = SetSpec::Residue { modulus, residues: vec![residue], axis };
    let complement = SetSpec::Complement { set: Box::new(set.clone()) };
    let windows = [w.clone(), shifted.clone()];
    let (de, dc) = (lower_density(&set, &windows)?, lower_density(&complement, &windows)?);
    for ((_, x), (_, y)) in de.per_n_ratios.iter().zip(&dc.per_n_ratios) {
        t.close("density complement", x + y, 1.0, 1e-12);
    }
    let candidates: Vec<GroupElement> = (0..modulus).map(|r| GroupElement::unit(q, axis).scale(r)).collect();
    if relative_density_witness(&set, &w, &candidates).is_ok() {
        let (_, ratio) = best_shift_for_density(&w, &set, &candidates)?;
        t.le("best shift density", 1.0 / candidates.len() as f64, ratio, 1e-12, 0.0);
    } else {
        t.holds("residue class is relatively dense", false);
    }
    Ok(t)
}

fn chain_inequality(rng: &mut SeededRng, _: usize) -> Result<Tally> {
    let sys = random_system(rng, 5, false)?;
    let a = gaussian_matrix(rng, sys.dim());
    let g = random_element(rng, sys.lattice_dim(), 3);
    let step = sys.omega_norm(&(&sys.act(&g, &a) - &a));
    let mut t = Tally::default();
    for m in 1..=6i64 {
        let far = sys.omega_norm(&(&sys.act(&g.scale(m), &a) - &a));
        t.le("chain inequality", far, m as f64 * step, 1e-10, 1e-12);
    }
    Ok(t)
}

fn unit_ball(rng: &mut SeededRng, n: usize) -> ComplexMatrix {
    let a = gaussian_matrix(rng, n);
    let norm = a.operator_norm();
    if norm > 1.0 {
        a.scale(Complex64::new(1.0 / norm, 0.0))
    } else {
        a
    }
}

fn perturbation(rng: &mut SeededRng, _: usize) -> Result<Tally> {
    let sys = random_system(rng, 5, true)?;
    let n = sys.dim();
    let k = rng.random_range(1..=3);
    let scale = rng.random_range(1e-3..0.3);
    let a: Vec<ComplexMatrix> = (0..=k).map(|_| unit_ball(rng, n)).collect();
    let b: Vec<ComplexMatrix> = a
        .iter()
        .map(|x| {
            let y = x + &gaussian_matrix(rng, n).scale(Complex64::new(scale, 0.0));
            let norm = y.operator_norm();
            if norm > 1.0 {
                y.scale(Complex64::new(1.0 / norm, 0.0))
            } else {
                y
            }
        })
        .collect();
    let product = |xs: &[ComplexMatrix]| xs.iter().skip(1).fold(xs[0].clone(), |acc, x| &acc * x);
    let (pa, pb) = (product(&a), product(&b));
    let mut t = Tally::default();
    let tele = telescope_decompose(&a, &b)?;
    t.le("telescope", tele.max_abs_diff(&(&pa - &pb)), 0.0, 0.0, 1e-10);
    let gap = (sys.expectation(&pa) - sys.expectation(&pb)).norm();
    let dists: Vec<f64> = a.iter().zip(&b).map(|(x, y)| sys.omega_norm(&(x - y))).collect();
    t.le("telescoped bound", gap, dists.iter().sum(), 1e-10, 1e-12);
    let eps = (k + 1) as f64 * dists.iter().copied().fold(0.0, f64::max);
    t.le("uniform perturbation", gap, eps, 1e-10, 1e-12);
    Ok(t)
}

fn separated_monotone(rng: &mut SeededRng, _: usize) -> Result<Tally> {
    let n = rng.random_range(2..=4);
    let sys = random_finite_system(rng, n, 1, false)?;
    let a = gaussian_matrix(rng, n);
    let scale = sys.omega_norm(&a).max(1e-3);
    let e1 = rng.random_range(0.05..1.5) * scale;
    let e2 = rng.random_range(0.05..1.5) * scale;
    let (lo, hi) = if e1 <= e2 { (e1, e2) } else { (e2, e1) };
    let scan = box_window(1, 12)?;
    let small = orbit_epsilon_structure(&sys, &a, lo, &scan)?;
    let large = orbit_epsilon_structure(&sys, &a, hi, &scan)?;
    let mut t = Tally::default();
    t.le("certificate size", large.len() as f64, small.len() as f64, 0.0, 0.0);
    Ok(t)
}

fn koopman(rng: &mut SeededRng, _: usize) -> Result<Tally> {
    let n = rng.random_range(1..=4);
    let q = rng.random_range(1..=2);
    let sys = random_finite_system(rng, n, q, false)?;
    let gns = gns_build(&sys)?;
    let split = koopman_split(&sys, &gns, CLUSTER_TOL)?;
    let d = gns.dim();
    let x = nalgebra::DVector::from_fn(d, |_, _| gaussian(rng));
    let y = nalgebra::DVector::from_fn(d, |_, _| gaussian(rng));
    let mut t = Tally::default();
    for k in &split.koopman {
        let lhs = ((k * &x).adjoint() * (k * &y))[(0, 0)];
        let rhs = (x.adjoint() * &y)[(0, 0)];
        t.le("Koopman unitarity", (lhs - rhs).norm(), 0.0, 0.0, 1e-10 * x.norm() * y.norm());
    }
    let factor = eigenoperator_factor(&sys, &gns, &split)?;
    t.holds("dim H_0 = N²", split.dim_h0 == n * n);
    t.holds("eigenoperator count = N²", factor.independent_eigenoperators == n * n);
    t.le("factor invariance", factor.invariance_residual, 0.0, 0.0, 1e-10);
    Ok(t)
}

fn orbit_boundedness(_: &mut SeededRng, trial: usize) -> Result<Tally> {
    let q_den = [2, 3, 5][trial % 3];
    let sys = clock_shift_system(q_den)?;
    let gns = gns_build(&sys)?;
    let split = koopman_split(&sys, &gns, CLUSTER_TOL)?;
    let factor = eigenoperator_factor(&sys, &gns, &split)?;
    let scan = box_window(2, q_den)?;
    let mut t = Tally::default();
    for e in &factor.eigenoperators {
        let cert = orbit_epsilon_structure(&sys, &e.operator, 1e-6, &scan)?;
        let mut image: Vec<Complex64> = Vec::new();
        for g in scan.iter() {
            let lambda = g.coords().iter().zip(&e.character).fold(ONE, |acc, (&c, l)| acc * l.powi(c as i32));
            if image.iter().all(|z| (z - lambda).norm() > 1e-9) {
                image.push(lambda);
            }
        }
        t.le("orbit size", cert.len() as f64, image.len() as f64, 0.0, 0.0);
    }
    Ok(t)
}

fn verdict_agreement(_: &mut SeededRng, trial: usize) -> Result<Tally> {
    let rule = VerdictRule::default();
    let z = |q: usize| LocalObservable::pauli(2, &[GroupElement::zero(q)], "Z");
    let x = LocalObservable::pauli(2, &[GroupElement::zero(1)], "X")?;
    let (sys, a, b): (SystemHandle, Observable, Observable) = match trial % 5 {
        0 => (shift_system(1, 2)?.into(), z(1)?.into(), z(1)?.into()),
        1 => (shift_system(2, 2)?.into(), z(2)?.into(), z(2)?.into()),
        2 => (shift_system(1, 2)?.into(), x.into(), z(1)?.into()),
        3 => {
            let sys = rotation_algebra_system(1, 5)?;
            let v = sys.named("V").cloned().expect("rotation system names V");
            (sys.into(), v.adjoint().into(), v.into())
        }
        _ => {
            let sys = cyclic_system(3)?;
            let p = sys.named("P").cloned().expect("cyclic system names P");
            (sys.into(), p.adjoint().into(), p.into())
        }
    };
    let q = sys.lattice_dim();
    let windows = WindowSchedule::new(q, 1, if q == 1 { 40 } else { 12 }, 1)?.windows()?;
    let phi = Homomorphism::identity(q);
    let plain = weak_mixing_defect(&sys, &a, &b, &phi, &windows, &rule)?;
    let squared = square_defect(&sys, &a, &b, &phi, &windows, &rule)?;
    let mut t = Tally::default();
    t.holds(
        &format!("verdicts differ: {} vs {}", plain.verdict.as_str(), squared.verdict.as_str()),
        plain.verdict == squared.verdict,
    );
    Ok(t)
}

fn quasi_local_recurrence(_: &mut SeededRng, trial: usize) -> Result<Tally> {
    let cases: [(i64, &[i64]); 6] =
        [(0, &[1, 2]), (3, &[1, 2]), (0, &[2, 1]), (-2, &[1, 3]), (0, &[1, 2, 3]), (1, &[2, 3])];
    let (site, exponents) = cases[trial % cases.len()];
    let sys: SystemHandle = shift_system(1, 2)?.into();
    let ql = sys.as_quasi_local().expect("quasi-local");
    let z = LocalObservable::pauli(2, &[GroupElement::scalar(site)], "Z")?;
    let half = Complex64::new(0.5, 0.0);
    let p = ql.combine(&[(half, &ql.identity()), (half, &z)]);
    let windows = WindowSchedule::new(1, 1, 20, 1)?.windows()?;
    let report = szemeredi_driver(&sys, &Observable::Local(p), exponents, &windows)?;
    let mut t = Tally::default();
    for &(n, dev, bound) in &report.deviations {
        t.le(&format!("recurrence bound at n={n}"), dev, bound, 0.0, 1e-12);
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_suite_passes_on_a_reduced_run() {
        for name in suite_names() {
            let r = run_suite(name, 11, Some(20)).unwrap();
            assert!(r.passed(), "{name}: {:?}", r.first_failure);
        }
    }

    #[test]
    fn reports_are_reproducible() {
        let names = vec!["vdc-norm-square".to_string(), "koopman".to_string()];
        let a = run_invariants(5, &names, Some(10)).unwrap();
        let b = run_invariants(5, &names, Some(10)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.suites.len(), 2);
    }

    #[test]
    fn unknown_suite_is_rejected() {
        assert!(run_invariants(0, &["nope".to_string()], None).is_err());
    }

    #[test]
    fn tally_records_first_failure() {
        let mut t = Tally::default();
        t.le("ok", 1.0, 2.0, 0.0, 0.0);
        t.le("bad", 3.0, 2.0, 0.0, 0.0);
        t.le("worse", 5.0, 2.0, 0.0, 0.0);
        assert!(!t.passed());
        assert!(t.failure.as_deref().unwrap().starts_with("bad"));
        assert_eq!(t.excess, 3.0);
    }
}
