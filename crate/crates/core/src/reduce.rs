//! Deterministic summation.
//!
//! Every average in the crate is computed as `(1/|Λ|) · Σ` where the sum is a
//! Neumaier-compensated fold over values laid out in the window's canonical
//! (lexicographic) order. Per-element values may be produced in parallel, but
//! they are always collected into an ordered buffer before reduction, so the
//! result is bit-identical for any number of worker threads.

use num_complex::Complex64;
use rayon::prelude::*;

/// Neumaier compensated accumulator.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Component-wise compensated accumulator for complex values.
#[derive(Clone, Copy, Debug, Default)]
pub struct ComplexSum {
    re: CompensatedSum,
    im: CompensatedSum,
}

impl ComplexSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

pub fn sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut acc = CompensatedSum::new();
    for v in values {
        acc.add(v);
    }
    acc.value()
}

pub fn sum_complex(values: impl IntoIterator<Item = Complex64>) -> Complex64 {
    let mut acc = ComplexSum::new();
    for v in values {
        acc.add(v);
    }
    acc.value()
}

/// Exact-weight mean: compensated sum times `1/len`.
pub fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    sum(values.iter().copied()) * (1.0 / values.len() as f64)
}

pub fn mean_complex(values: &[Complex64]) -> Complex64 {
    if values.is_empty() {
        return Complex64::new(0.0, 0.0);
    }
    sum_complex(values.iter().copied()) * (1.0 / values.len() as f64)
}

/// Evaluates `f` on every item, possibly in parallel, preserving input order.
pub fn ordered_map<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    items.par_iter().map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensation_recovers_small_terms() {
        let mut values = vec![1.0e16];
        values.extend(std::iter::repeat_n(1.0, 1000));
        values.push(-1.0e16);
        assert_eq!(sum(values), 1000.0);
    }

    #[test]
    fn ordered_map_is_thread_count_independent() {
        let xs: Vec<f64> = (0..10_000).map(|i| (i as f64).sin() * 1e-3).collect();
        let one = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| sum(ordered_map(&xs, |x| x * x)));
        let many = rayon::ThreadPoolBuilder::new()
            .num_threads(8)
            .build()
            .unwrap()
            .install(|| sum(ordered_map(&xs, |x| x * x)));
        assert_eq!(one.to_bits(), many.to_bits());
    }

    #[test]
    fn empty_mean_is_zero() {
        assert_eq!(mean(&[]), 0.0);
    }
}
