//! Scalar abstraction and compensated summation.

use std::fmt;

/// Floating-point scalar the measure/propagator layer is generic over.
///
/// `f64` is the working type everywhere in the simulation and certification
/// layers; `f32` is supported for the pure arithmetic only.
pub trait Scalar:
    num_traits::Float + num_traits::FromPrimitive + fmt::Debug + fmt::Display + Send + Sync + 'static
{
    /// Shorthand for converting an `f64` literal into the scalar type.
    fn real(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Concrete scalar used by the simulation, spectral and I/O layers.
pub type Real = f64;

/// Kahan–Babuška compensated accumulator.
///
/// All inner products and measure normalizations go through this; plain
/// left-to-right summation loses too much over long level chains for the
/// 1e-10..1e-12 tolerances the invariants are checked at.
#[derive(Clone, Copy, Debug)]
pub struct KahanSum<T> {
    sum: T,
    comp: T,
}

impl<T: Scalar> Default for KahanSum<T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T: Scalar> KahanSum<T> {
    pub fn new() -> Self {
        KahanSum {
            sum: T::zero(),
            comp: T::zero(),
        }
    }

    #[inline]
    pub fn add(&mut self, x: T) {
        // Neumaier's variant: pick the compensation branch by magnitude.
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp = self.comp + ((self.sum - t) + x);
        } else {
            self.comp = self.comp + ((x - t) + self.sum);
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> T {
        self.sum + self.comp
    }
}

/// Compensated sum of a sequence.
pub fn ksum<T: Scalar>(xs: impl IntoIterator<Item = T>) -> T {
    let mut acc = KahanSum::new();
    for x in xs {
        acc.add(x);
    }
    acc.value()
}

/// Compensated inner product `sum_i a[i] * b[i]`.
pub fn kdot<T: Scalar>(a: &[T], b: &[T]) -> T {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = KahanSum::new();
    for (&x, &y) in a.iter().zip(b) {
        acc.add(x * y);
    }
    acc.value()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kahan_recovers_cancellation() {
        // 1 + 1e-16 repeated: naive summation in f64 drops every increment.
        let mut acc = KahanSum::<f64>::new();
        acc.add(1.0);
        for _ in 0..1_000_000 {
            acc.add(1e-16);
        }
        let exact = 1.0 + 1e-10;
        assert!((acc.value() - exact).abs() < 1e-15);
    }

    #[test]
    fn kdot_matches_exact_small() {
        let a = [0.5f64, 0.25, 0.25];
        let b = [1.0f64, 3.0, 5.0];
        assert_eq!(kdot(&a, &b), 0.5 + 0.75 + 1.25);
    }

    #[test]
    fn generic_over_f32() {
        let s: f32 = ksum([0.25f32, 0.5, 0.25]);
        assert_eq!(s, 1.0f32);
    }
}
