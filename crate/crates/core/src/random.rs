//! Seeded generators for randomized property checks.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::Result;
use crate::lattice::{box_window, GroupElement};
use crate::operator::{ComplexMatrix, State};
use crate::systems::FiniteSystem;
use crate::vdc::VectorSequence;

pub type SeededRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream for trial `index` of a run seeded with `seed`.
pub fn trial_rng(seed: u64, index: u64) -> SeededRng {
    let mut rng = seeded(seed);
    rng.set_stream(index);
    rng
}

pub fn gaussian(rng: &mut impl Rng) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Complex Gaussian matrix with entries of variance `1/n`.
pub fn gaussian_matrix(rng: &mut impl Rng, n: usize) -> ComplexMatrix {
    let scale = 1.0 / (n as f64).sqrt();
    ComplexMatrix::from_fn(n, |_, _| gaussian(rng) * scale)
}

/// Haar-distributed unitary from the QR factorization of a Gaussian matrix.
pub fn haar_unitary(rng: &mut impl Rng, n: usize) -> ComplexMatrix {
    let g = DMatrix::from_fn(n, n, |_, _| gaussian(rng));
    let (q, r) = g.qr().unpack();
    let phases = DMatrix::from_fn(n, n, |i, j| {
        if i == j && r[(i, i)].norm() > 0.0 {
            r[(i, i)] / r[(i, i)].norm()
        } else if i == j {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    ComplexMatrix::from_inner(q * phases).expect("square")
}

pub fn unit_phase(rng: &mut impl Rng) -> Complex64 {
    Complex64::from_polar(1.0, std::f64::consts::TAU * rng.random::<f64>())
}

/// Faithful probability vector with entries bounded away from zero.
pub fn probabilities(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| rng.random_range(0.1..1.0)).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|p| p / total).collect()
}

/// Commuting unitaries and an invariant faithful state, all diagonal in a
/// common random basis; `tracial` selects the normalized trace.
pub fn random_finite_system(rng: &mut impl Rng, n: usize, q: usize, tracial: bool) -> Result<FiniteSystem> {
    let w = haar_unitary(rng, n);
    let conj = |d: &ComplexMatrix| &(&w * d) * &w.adjoint();
    let generators = (0..q)
        .map(|_| {
            let phases: Vec<Complex64> = (0..n).map(|_| unit_phase(rng)).collect();
            conj(&ComplexMatrix::diag(&phases))
        })
        .collect();
    let state = if tracial {
        State::normalized_trace(n)
    } else {
        let p: Vec<Complex64> = probabilities(rng, n).into_iter().map(|x| Complex64::new(x, 0.0)).collect();
        let rho = conj(&ComplexMatrix::diag(&p));
        let herm = (&rho + &rho.adjoint()).scale(Complex64::new(0.5, 0.0));
        State::new(herm)?
    };
    Ok(FiniteSystem::new(state, generators)?.with_label(format!("random(n={n},q={q})")))
}

/// Random vector of norm at most `bound`.
pub fn bounded_vector(rng: &mut impl Rng, dim: usize, bound: f64) -> Vec<Complex64> {
    let v: Vec<Complex64> = (0..dim).map(|_| gaussian(rng)).collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let target = bound * rng.random::<f64>();
    if norm == 0.0 {
        return v;
    }
    v.into_iter().map(|z| z * (target / norm)).collect()
}

/// Tabulated sequence on the box of radius `radius`, zero elsewhere.
pub fn random_sequence(rng: &mut impl Rng, q: usize, dim: usize, radius: usize, bound: f64) -> Result<VectorSequence> {
    let support = box_window(q, radius.max(1))?;
    let table: BTreeMap<GroupElement, Vec<Complex64>> =
        support.iter().map(|g| (g.clone(), bounded_vector(rng, dim, bound))).collect();
    VectorSequence::tabulated(q, dim, table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::systems::DynamicalSystem;

    #[test]
    fn seeds_reproduce() {
        let a = gaussian_matrix(&mut trial_rng(7, 3), 4);
        let b = gaussian_matrix(&mut trial_rng(7, 3), 4);
        let c = gaussian_matrix(&mut trial_rng(7, 4), 4);
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn haar_unitary_is_unitary() {
        let mut rng = seeded(1);
        for n in 1..8 {
            assert!(haar_unitary(&mut rng, n).is_unitary(1e-12));
        }
    }

    #[test]
    fn random_systems_validate() {
        let mut rng = seeded(2);
        for n in 1..6 {
            for q in 1..3 {
                for tracial in [false, true] {
                    let sys = random_finite_system(&mut rng, n, q, tracial).unwrap();
                    assert_eq!(sys.is_tracial(), tracial || n == 1);
                }
            }
        }
    }

    #[test]
    fn sequences_respect_bound() {
        let mut rng = seeded(3);
        let f = random_sequence(&mut rng, 2, 3, 4, 2.0).unwrap();
        assert!(f.bound() <= 2.0);
        assert!(f.eval(&GroupElement::new(vec![9, 9])).unwrap().iter().all(|z| z.norm() == 0.0));
    }
}
