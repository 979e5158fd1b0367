//! Orbit total boundedness, return-time sets and multi-correlation lower
//! bounds for compact systems.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{invalid, Error, Result};
use crate::lattice::{
    best_shift_for_density, box_window, relative_density_witness, shift_window, FolnerWindow, GroupElement, Membership,
    WindowShape,
};
use crate::mixing::window_means;
use crate::reduce::ordered_map;
use crate::systems::DynamicalSystem;

const CHAIN_SLACK: f64 = 1e-12;
const MAX_CANDIDATE_SIDE: usize = 32;

pub const SCAN_NOTE: &str = "certified on scan window only";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CertificateKind {
    SeparatedMaximal,
    Net,
}

/// A maximal `ε`-separated subset of a scanned orbit `{τ_g(a) : g ∈ scan}`.
///
/// Maximality makes it an `ε`-net of the scanned orbit as well.
#[derive(Clone, Debug)]
pub struct EpsilonNetCertificate<O> {
    pub epsilon: f64,
    pub kind: CertificateKind,
    /// Group elements whose orbit points were kept, in scan order.
    pub elements: Vec<GroupElement>,
    pub points: Vec<O>,
    pub scan_index: usize,
    pub scan_size: usize,
}

impl<O> EpsilonNetCertificate<O> {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return invalid(format!("ε must be positive and finite, got {epsilon}"));
    }
    Ok(())
}

fn check_scan<S: DynamicalSystem>(sys: &S, scan: &FolnerWindow) -> Result<()> {
    if scan.lattice_dim() != sys.lattice_dim() {
        return Err(Error::DimensionMismatch { expected: sys.lattice_dim(), found: scan.lattice_dim() });
    }
    Ok(())
}

/// Greedy maximal `ε`-separated subset of the scanned orbit in `‖·‖_ω`,
/// scanning `g` in lexicographic order.
pub fn orbit_epsilon_structure<S: DynamicalSystem>(
    sys: &S,
    a: &S::Obs,
    epsilon: f64,
    scan: &FolnerWindow,
) -> Result<EpsilonNetCertificate<S::Obs>> {
    check_epsilon(epsilon)?;
    sys.check(a)?;
    check_scan(sys, scan)?;
    let orbit: Vec<S::Obs> = ordered_map(scan.elements(), |g| sys.act(g, a));
    let mut elements = Vec::new();
    let mut points: Vec<S::Obs> = Vec::new();
    for (g, x) in scan.iter().zip(orbit) {
        if points.iter().all(|p| sys.omega_norm(&sys.difference(&x, p)) >= epsilon) {
            elements.push(g.clone());
            points.push(x);
        }
    }
    Ok(EpsilonNetCertificate {
        epsilon,
        kind: CertificateKind::SeparatedMaximal,
        elements,
        points,
        scan_index: scan.index(),
        scan_size: scan.len(),
    })
}

/// Largest distance from a scanned orbit point to the nearest certificate point.
pub fn net_radius<S: DynamicalSystem>(
    sys: &S,
    a: &S::Obs,
    cert: &EpsilonNetCertificate<S::Obs>,
    scan: &FolnerWindow,
) -> f64 {
    let dists = ordered_map(scan.elements(), |g| {
        let x = sys.act(g, a);
        cert.points.iter().map(|p| sys.omega_norm(&sys.difference(&x, p))).fold(f64::INFINITY, f64::min)
    });
    dists.into_iter().fold(0.0, f64::max)
}

/// The return-time set `{g : max_j ‖τ_{m_j g}(a) − a‖_ω < ε}` on a scan window.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReturnSet {
    pub epsilon: f64,
    pub exponents: Vec<i64>,
    pub members: Vec<GroupElement>,
    /// `‖τ_{mg}(a) − a‖_ω ≤ |m|·‖τ_g(a) − a‖_ω` held at every member.
    pub chain_certificate: bool,
    /// Candidates `{0..r−1}^q` with the smallest `r` that witness relative
    /// density inside the scan, if any.
    pub gap_witness: Option<Vec<GroupElement>>,
    pub scan_index: usize,
}

impl ReturnSet {
    pub fn contains(&self, g: &GroupElement) -> bool {
        self.members.binary_search(g).is_ok()
    }
}

/// Smallest cube `{0..r−1}^q` witnessing relative density of `set` on `scan`.
pub fn find_cube_witness(set: &dyn Membership, scan: &FolnerWindow, max_side: usize) -> Option<Vec<GroupElement>> {
    let q = scan.lattice_dim();
    (1..=max_side).find_map(|r| {
        let candidates = cube(q, r);
        relative_density_witness(set, scan, &candidates).ok()
    })
}

/// `{0..r−1}^q` in lexicographic order.
pub fn cube(q: usize, r: usize) -> Vec<GroupElement> {
    let total = r.pow(q as u32);
    (0..total)
        .map(|mut k| {
            let mut coords = vec![0i64; q];
            for axis in (0..q).rev() {
                coords[axis] = (k % r) as i64;
                k /= r;
            }
            GroupElement::new(coords)
        })
        .collect()
}

/// All scanned `g` with `‖τ_{m_j g}(a) − a‖_ω < ε` for every exponent `m_j`.
///
/// Exponent `0` contributes the identity factor and is always satisfied.
pub fn return_set<S: DynamicalSystem>(
    sys: &S,
    a: &S::Obs,
    epsilon: f64,
    exponents: &[i64],
    scan: &FolnerWindow,
) -> Result<ReturnSet> {
    check_epsilon(epsilon)?;
    sys.check(a)?;
    check_scan(sys, scan)?;
    if exponents.is_empty() {
        return invalid("at least one exponent is required");
    }
    let dist = |g: &GroupElement| sys.omega_norm(&sys.difference(&sys.act(g, a), a));
    let rows: Vec<Option<bool>> = ordered_map(scan.elements(), |g| {
        let dists: Vec<f64> = exponents.iter().map(|&m| dist(&g.scale(m))).collect();
        if dists.iter().all(|&d| d < epsilon) {
            let base = dist(g);
            let chain = exponents.iter().zip(&dists).all(|(&m, &d)| d <= m.unsigned_abs() as f64 * base + CHAIN_SLACK);
            Some(chain)
        } else {
            None
        }
    });
    let members: Vec<GroupElement> =
        scan.iter().zip(&rows).filter(|(_, r)| r.is_some()).map(|(g, _)| g.clone()).collect();
    let chain_certificate = rows.iter().flatten().all(|&c| c);
    let gap_witness = if scan.shape() == WindowShape::Box {
        let set: BTreeSet<GroupElement> = members.iter().cloned().collect();
        let n = scan.index();
        (1..=MAX_CANDIDATE_SIDE.min(n)).find_map(|r| {
            let inner = box_window(scan.lattice_dim(), n + 1 - r).ok()?;
            let candidates = cube(scan.lattice_dim(), r);
            relative_density_witness(&|g: &GroupElement| set.contains(g), &inner, &candidates).ok()
        })
    } else {
        None
    };
    Ok(ReturnSet {
        epsilon,
        exponents: exponents.to_vec(),
        members,
        chain_certificate,
        gap_witness,
        scan_index: scan.index(),
    })
}

fn check_positive_tracial<S: DynamicalSystem>(sys: &S, a: &S::Obs) -> Result<f64> {
    if !sys.is_tracial() {
        return Err(Error::NotTracial);
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
    Ok(mean)
}

/// `ω(a^{p})`, real for positive `a`.
fn moment<S: DynamicalSystem>(sys: &S, a: &S::Obs, p: usize) -> f64 {
    sys.product_expectation(&vec![a.clone(); p]).re
}

/// `|ω(∏_j τ_{m_j g}(a))|`.
fn multi_correlation<S: DynamicalSystem>(sys: &S, a: &S::Obs, exponents: &[i64], g: &GroupElement) -> f64 {
    let factors: Vec<S::Obs> = exponents.iter().map(|&m| sys.act(&g.scale(m), a)).collect();
    sys.product_expectation(&factors).norm()
}

/// Return radius that makes the lower bound work: `ε / (‖a‖^k (k+1))`.
pub fn rescaled_radius(epsilon: f64, norm: f64, k: usize) -> f64 {
    epsilon / (norm.powi(k as i32) * (k + 1) as f64)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LowerBoundCheck {
    pub value: f64,
    pub bound: f64,
    pub holds: bool,
    /// Whether `g` lies in the return set with the rescaled radius.
    pub in_return_set: bool,
    pub radius: f64,
}

/// `|ω(∏_{j=0}^k τ_{m_j g}(a))| > ω(a^{k+1}) − ε` for `g` in the return set
/// of radius `ε / (‖a‖^k (k+1))`; `exponents` lists `m_0, …, m_k`.
pub fn correlation_lower_bound<S: DynamicalSystem>(
    sys: &S,
    a: &S::Obs,
    exponents: &[i64],
    epsilon: f64,
    g: &GroupElement,
) -> Result<LowerBoundCheck> {
    sys.check(a)?;
    sys.check_element(g)?;
    check_epsilon(epsilon)?;
    check_positive_tracial(sys, a)?;
    if exponents.is_empty() {
        return invalid("at least one exponent is required");
    }
    let k = exponents.len() - 1;
    let ceiling = moment(sys, a, k + 1);
    if epsilon >= ceiling {
        return invalid(format!("ε = {epsilon} must be below ω(a^{}) = {ceiling}", k + 1));
    }
    let radius = rescaled_radius(epsilon, sys.operator_norm(a), k);
    let in_return_set =
        exponents.iter().all(|&m| sys.omega_norm(&sys.difference(&sys.act(&g.scale(m), a), a)) < radius);
    let value = multi_correlation(sys, a, exponents, g);
    let bound = ceiling - epsilon;
    Ok(LowerBoundCheck { value, bound, holds: value > bound, in_return_set, radius })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ShiftChoice {
    pub n: usize,
    pub shift: GroupElement,
    pub density: f64,
}

/// Shifted-window multi-correlation averages for a compact system.
#[derive(Clone, Debug, PartialEq)]
pub struct CompactSzemerediReport {
    pub epsilon: f64,
    pub radius: f64,
    pub moment: f64,
    pub candidates: Vec<GroupElement>,
    pub scan_index: usize,
    pub e_members: Vec<GroupElement>,
    pub shifts_per_window: Vec<ShiftChoice>,
    pub averages: Vec<(usize, f64)>,
    /// `density × (ω(a^{k+1}) − ε)` per window.
    pub lower_bounds: Vec<(usize, f64)>,
    pub tail_min: f64,
    pub bound_holds: bool,
}

impl CompactSzemerediReport {
    pub fn to_json(&self) -> Value {
        json!({
            "epsilon": self.epsilon,
            "radius": self.radius,
            "E_members": self.e_members.iter().map(|g| g.coords().to_vec()).collect::<Vec<_>>(),
            "candidates": self.candidates.iter().map(|g| g.coords().to_vec()).collect::<Vec<_>>(),
            "shifts_per_window": self
                .shifts_per_window
                .iter()
                .map(|s| json!([s.n, s.shift.coords(), s.density]))
                .collect::<Vec<_>>(),
            "averages": self.averages.iter().map(|(n, v)| json!([n, v])).collect::<Vec<_>>(),
            "lower_bounds": self.lower_bounds.iter().map(|(n, v)| json!([n, v])).collect::<Vec<_>>(),
            "tail_min": self.tail_min,
            "bound_holds": self.bound_holds,
            "note": SCAN_NOTE,
        })
    }
}

/// Builds the return set `E` with `ε = ω(a^{k+1})/2`, shifts each window by
/// the candidate that maximizes its overlap with `E`, and averages
/// `|ω(a ∏_{j≥1} τ_{m_j g}(a))|` over the shifted windows.
///
/// `exponents` lists `m_1, …, m_k`. Without explicit candidates, the smallest
/// cube `{0..r−1}^q` that witnesses relative density of `E` on the largest
/// window is used.
pub fn szemeredi_average_compact<S: DynamicalSystem>(
    sys: &S,
    a: &S::Obs,
    exponents: &[i64],
    windows: &[FolnerWindow],
    candidates: Option<&[GroupElement]>,
) -> Result<CompactSzemerediReport> {
    sys.check(a)?;
    check_positive_tracial(sys, a)?;
    if exponents.is_empty() {
        return invalid("at least one exponent is required");
    }
    if windows.is_empty() {
        return invalid("at least one window is required");
    }
    for w in windows {
        check_scan(sys, w)?;
    }
    let q = sys.lattice_dim();
    let k = exponents.len();
    let full: Vec<i64> = std::iter::once(0).chain(exponents.iter().copied()).collect();
    let ceiling = moment(sys, a, k + 1);
    let epsilon = ceiling / 2.0;
    let radius = rescaled_radius(epsilon, sys.operator_norm(a), k);

    let reach = windows.iter().flat_map(|w| w.iter()).map(GroupElement::max_abs).max().unwrap_or(0) as usize;
    let margin = match candidates {
        Some(c) => c.iter().map(GroupElement::max_abs).max().unwrap_or(0) as usize,
        None => MAX_CANDIDATE_SIDE,
    };
    let scan = box_window(q, reach.max(1) + margin)?;
    let e = return_set(sys, a, radius, &full, &scan)?;
    if e.members.is_empty() {
        return Err(Error::EmptyReturnSet);
    }
    let member_set: BTreeSet<GroupElement> = e.members.iter().cloned().collect();
    let in_e = |g: &GroupElement| member_set.contains(g);

    let candidates: Vec<GroupElement> = match candidates {
        Some(c) if !c.is_empty() => {
            for g in c {
                sys.check_element(g)?;
            }
            c.to_vec()
        }
        Some(_) => return invalid("candidate list is empty"),
        None => {
            let inner = box_window(q, reach.max(1))?;
            find_cube_witness(&in_e, &inner, MAX_CANDIDATE_SIDE)
                .ok_or_else(|| Error::Numerical("return set is not relatively dense on the scan window".into()))?
        }
    };

    let mut shifts_per_window = Vec::with_capacity(windows.len());
    let mut shifted = Vec::with_capacity(windows.len());
    for w in windows {
        let (shift, density) = best_shift_for_density(w, &in_e, &candidates)?;
        shifted.push(shift_window(w, &shift));
        shifts_per_window.push(ShiftChoice { n: w.index(), shift, density });
    }
    let values = window_means(&shifted, |g| multi_correlation(sys, a, &full, g));
    let averages: Vec<(usize, f64)> = windows.iter().map(FolnerWindow::index).zip(values).collect();
    let lower_bounds: Vec<(usize, f64)> =
        shifts_per_window.iter().map(|s| (s.n, s.density * (ceiling - epsilon))).collect();
    let bound_holds = averages.iter().zip(&lower_bounds).all(|((_, v), (_, b))| *v >= *b - 1e-12);
    let tail_min = averages.iter().map(|&(_, v)| v).fold(f64::INFINITY, f64::min);
    Ok(CompactSzemerediReport {
        epsilon,
        radius,
        moment: ceiling,
        candidates,
        scan_index: scan.index(),
        e_members: e.members,
        shifts_per_window,
        averages,
        lower_bounds,
        tail_min,
        bound_holds,
    })
}
