//! The measure-valued model on finite state spaces.
//!
//! A model is a chain of levels `0..=n`. Level `k` carries a finite state
//! space `E_k` (dense integer ids), a probability measure `mu_k`, and for
//! `k < n` a strictly positive weight function `g_k` on `E_k` together with a
//! row-stochastic kernel `K_{k+1}` from `E_k` to `E_{k+1}`. The measures are
//! linked by
//!
//! ```text
//! mu_{k+1}(f) = mu_k(g_k * K_{k+1}(f)) / mu_k(g_k)
//! ```
//!
//! and the propagator `q_{j,k}` transports a function at level `k` to level
//! `j` so that `mu_j(q_{j,k}(f)) = mu_k(f)`. Everything here is exact linear
//! algebra with compensated summation; models are immutable after
//! construction, and all derived measures and normalizers are computed once
//! in the constructor.

use crate::error::{Error, Result};
use crate::scalar::{kdot, ksum, KahanSum, Scalar};

/// Tolerance for probability vectors and kernel rows summing to one.
pub const PROB_TOL: f64 = 1e-12;
/// Weight entries below this are rejected to avoid silent underflow in
/// normalizers.
pub const WEIGHT_FLOOR: f64 = 1e-300;

/// Dense row-major matrix with row-stochastic validation on construction.
#[derive(Clone, Debug, PartialEq)]
pub struct Kernel<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Kernel<T> {
    /// Builds a kernel from rows, checking each row is a probability vector.
    ///
    /// `index` only labels error messages (which kernel of a model this is).
    pub fn from_rows(index: usize, rows: Vec<Vec<T>>) -> Result<Self> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(nrows * ncols);
        for (r, row) in rows.iter().enumerate() {
            if row.len() != ncols {
                return Err(Error::Dimension {
                    what: "kernel row length",
                    expected: ncols,
                    got: row.len(),
                });
            }
            let negative = row.iter().any(|&x| x < T::zero());
            let sum = ksum(row.iter().copied());
            if negative || (sum - T::one()).abs() > T::real(PROB_TOL) {
                return Err(Error::NotStochastic {
                    kernel: index,
                    row: r,
                    sum: sum.to_f64().unwrap_or(f64::NAN),
                    negative,
                });
            }
            data.extend_from_slice(row);
        }
        Ok(Kernel {
            rows: nrows,
            cols: ncols,
            data,
        })
    }

    /// Identity kernel on a space of `n` states.
    pub fn identity(n: usize) -> Self {
        let mut data = vec![T::zero(); n * n];
        for i in 0..n {
            data[i * n + i] = T::one();
        }
        Kernel {
            rows: n,
            cols: n,
            data,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub fn entry(&self, i: usize, j: usize) -> T {
        self.data[i * self.cols + j]
    }

    /// `K(f)(x) = sum_y K(x, y) f(y)`.
    pub fn apply(&self, f: &[T]) -> Vec<T> {
        debug_assert_eq!(f.len(), self.cols);
        (0..self.rows).map(|i| kdot(self.row(i), f)).collect()
    }

    /// Measure pushforward `(m K)(y) = sum_x m(x) K(x, y)`.
    pub fn pushforward(&self, m: &[T]) -> Vec<T> {
        debug_assert_eq!(m.len(), self.rows);
        let mut acc = vec![KahanSum::new(); self.cols];
        for (i, &mi) in m.iter().enumerate() {
            for (j, &kij) in self.row(i).iter().enumerate() {
                acc[j].add(mi * kij);
            }
        }
        acc.iter().map(KahanSum::value).collect()
    }
}

/// A measure on the state space of one level.
#[derive(Clone, Debug, PartialEq)]
pub struct Measure<T> {
    pub level: usize,
    pub weights: Vec<T>,
}

impl<T: Scalar> Measure<T> {
    /// A validated probability measure (nonnegative, sums to one).
    pub fn probability(level: usize, weights: Vec<T>) -> Result<Self> {
        if weights.iter().any(|&w| w < T::zero() || !w.is_finite()) {
            return Err(Error::NotAProbability {
                level,
                sum: f64::NAN,
                tol: PROB_TOL,
            });
        }
        let sum = ksum(weights.iter().copied());
        if (sum - T::one()).abs() > T::real(PROB_TOL) {
            return Err(Error::NotAProbability {
                level,
                sum: sum.to_f64().unwrap_or(f64::NAN),
                tol: PROB_TOL,
            });
        }
        Ok(Measure { level, weights })
    }

    /// Integral `mu(f)`.
    pub fn integrate(&self, f: &FnOnLevel<T>) -> Result<T> {
        if f.level != self.level {
            return Err(Error::LevelMismatch {
                expected: self.level,
                got: f.level,
            });
        }
        Ok(kdot(&self.weights, &f.values))
    }

    pub fn total_mass(&self) -> T {
        ksum(self.weights.iter().copied())
    }
}

/// A real-valued function on the state space of one level.
#[derive(Clone, Debug, PartialEq)]
pub struct FnOnLevel<T> {
    pub level: usize,
    pub values: Vec<T>,
}

impl<T: Scalar> FnOnLevel<T> {
    pub fn new(level: usize, values: Vec<T>) -> Result<Self> {
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { level, index });
        }
        Ok(FnOnLevel { level, values })
    }

    pub fn constant(level: usize, size: usize, c: T) -> Self {
        FnOnLevel {
            level,
            values: vec![c; size],
        }
    }

    pub fn one(level: usize, size: usize) -> Self {
        Self::constant(level, size, T::one())
    }

    /// Indicator of a single point.
    pub fn indicator(level: usize, size: usize, point: usize) -> Self {
        let mut values = vec![T::zero(); size];
        values[point] = T::one();
        FnOnLevel { level, values }
    }

    pub fn max_norm(&self) -> T {
        self.values
            .iter()
            .fold(T::zero(), |m, &v| if v.abs() > m { v.abs() } else { m })
    }
}

/// Finite-state sequential model; the ground truth everything else consumes.
#[derive(Clone, Debug)]
pub struct FkModel<T> {
    sizes: Vec<usize>,
    g: Vec<Vec<T>>,
    kernels: Vec<Kernel<T>>,
    labels: Option<Vec<Vec<String>>>,
    // Derived at construction: mu[k] on E_k, mu_hat[k-1] = hat(mu)_k on
    // E_{k-1}, normalizer[k] = mu_k(g_k).
    mu: Vec<Vec<T>>,
    mu_hat: Vec<Vec<T>>,
    normalizers: Vec<T>,
}

impl<T: Scalar> FkModel<T> {
    /// Builds and validates a model from its defining data.
    ///
    /// `g.len()` and `kernels.len()` must both equal the number of steps `n`;
    /// `kernels[k]` is the kernel from `E_k` into `E_{k+1}`.
    pub fn new(mu0: Vec<T>, g: Vec<Vec<T>>, kernels: Vec<Kernel<T>>) -> Result<Self> {
        if g.len() != kernels.len() {
            return Err(Error::Dimension {
                what: "one weight function per kernel",
                expected: kernels.len(),
                got: g.len(),
            });
        }
        let n = kernels.len();
        let mut sizes = Vec::with_capacity(n + 1);
        sizes.push(mu0.len());
        for k in 0..n {
            if kernels[k].rows() != sizes[k] {
                return Err(Error::Dimension {
                    what: "kernel rows",
                    expected: sizes[k],
                    got: kernels[k].rows(),
                });
            }
            if kernels[k].cols() == 0 {
                return Err(Error::Dimension {
                    what: "kernel columns",
                    expected: 1,
                    got: 0,
                });
            }
            sizes.push(kernels[k].cols());
        }
        for (k, gk) in g.iter().enumerate() {
            if gk.len() != sizes[k] {
                return Err(Error::Dimension {
                    what: "weight function length",
                    expected: sizes[k],
                    got: gk.len(),
                });
            }
            for (i, &v) in gk.iter().enumerate() {
                if !(v.is_finite() && v > T::real(WEIGHT_FLOOR)) {
                    return Err(Error::NonPositiveWeight {
                        level: k,
                        index: i,
                        value: v.to_f64().unwrap_or(f64::NAN),
                        floor: WEIGHT_FLOOR,
                    });
                }
            }
        }
        let mu0 = Measure::probability(0, mu0)?.weights;

        // Evolve all measures once; the model is immutable afterwards.
        let mut mu = vec![mu0];
        let mut mu_hat = Vec::with_capacity(n);
        let mut normalizers = Vec::with_capacity(n);
        for k in 0..n {
            let prev = &mu[k];
            let norm = kdot(prev, &g[k]);
            if !(norm > T::zero()) {
                return Err(Error::Normalization {
                    level: k,
                    value: norm.to_f64().unwrap_or(f64::NAN),
                });
            }
            let hat: Vec<T> = prev
                .iter()
                .zip(&g[k])
                .map(|(&m, &w)| m * w / norm)
                .collect();
            let mut next = kernels[k].pushforward(&hat);
            // Keep evolved measures exactly normalized; the pushforward only
            // drifts at rounding level.
            let total = ksum(next.iter().copied());
            for w in &mut next {
                *w = *w / total;
            }
            mu_hat.push(hat);
            normalizers.push(norm);
            mu.push(next);
        }

        Ok(FkModel {
            sizes,
            g,
            kernels,
            labels: None,
            mu,
            mu_hat,
            normalizers,
        })
    }

    /// Attaches display labels for the points of each level.
    pub fn with_labels(mut self, labels: Vec<Vec<String>>) -> Self {
        self.labels = Some(labels);
        self
    }

    /// Number of steps `n` (levels are `0..=n`).
    pub fn levels(&self) -> usize {
        self.sizes.len() - 1
    }

    pub fn size(&self, level: usize) -> usize {
        self.sizes[level]
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn labels(&self) -> Option<&[Vec<String>]> {
        self.labels.as_deref()
    }

    /// Weight function `g_k` on `E_k`, `k < n`.
    pub fn g(&self, level: usize) -> &[T] {
        &self.g[level]
    }

    /// Kernel `K_k` from `E_{k-1}` to `E_k`, `1 <= k <= n`.
    pub fn kernel(&self, k: usize) -> &Kernel<T> {
        &self.kernels[k - 1]
    }

    /// Evolved weights of `mu_k`.
    pub fn mu_weights(&self, k: usize) -> &[T] {
        &self.mu[k]
    }

    /// Normalizer `mu_k(g_k)` for `k < n`.
    pub fn normalizer(&self, k: usize) -> T {
        self.normalizers[k]
    }

    /// The evolved chain `mu_0..mu_n` and the reweighted chain
    /// `hat(mu)_1..hat(mu)_n` (where `hat(mu)_k` lives on `E_{k-1}`).
    pub fn evolve_measures(&self) -> (Vec<Measure<T>>, Vec<Measure<T>>) {
        let mu = self
            .mu
            .iter()
            .enumerate()
            .map(|(k, w)| Measure {
                level: k,
                weights: w.clone(),
            })
            .collect();
        let hat = self
            .mu_hat
            .iter()
            .enumerate()
            .map(|(k, w)| Measure {
                level: k,
                weights: w.clone(),
            })
            .collect();
        (mu, hat)
    }

    pub fn mu(&self, k: usize) -> Measure<T> {
        Measure {
            level: k,
            weights: self.mu[k].clone(),
        }
    }

    /// One-step propagator applied to raw values at level `l`:
    /// `q_{l-1,l}(f) = g_{l-1} * K_l(f) / mu_{l-1}(g_{l-1})`.
    fn one_step(&self, l: usize, f: &[T]) -> Vec<T> {
        let applied = self.kernels[l - 1].apply(f);
        let norm = self.normalizers[l - 1];
        self.g[l - 1]
            .iter()
            .zip(&applied)
            .map(|(&w, &a)| w * a / norm)
            .collect()
    }

    /// Propagator `q_{j,k}(f)`, computed by a right-to-left sweep of one-step
    /// maps; never materializes a dense level-to-level operator.
    pub fn propagator_apply(&self, j: usize, k: usize, f: &FnOnLevel<T>) -> Result<FnOnLevel<T>> {
        if j > k {
            return Err(Error::LevelOrder { j, k });
        }
        if f.level != k {
            return Err(Error::LevelMismatch {
                expected: k,
                got: f.level,
            });
        }
        if f.values.len() != self.sizes[k] {
            return Err(Error::Dimension {
                what: "function length",
                expected: self.sizes[k],
                got: f.values.len(),
            });
        }
        let mut values = f.values.clone();
        for l in (j + 1..=k).rev() {
            values = self.one_step(l, &values);
        }
        Ok(FnOnLevel { level: j, values })
    }

    /// `Var_as_k(f) = sum_{j=0..k} Var_{mu_j}(q_{j,k}(f))`, by a single sweep.
    pub fn asymptotic_variance(&self, k: usize, f: &FnOnLevel<T>) -> Result<T> {
        if f.level != k {
            return Err(Error::LevelMismatch {
                expected: k,
                got: f.level,
            });
        }
        let mut acc = KahanSum::new();
        let mut values = f.values.clone();
        for l in (0..=k).rev() {
            acc.add(variance_weights(&self.mu[l], &values));
            if l > 0 {
                values = self.one_step(l, &values);
            }
        }
        Ok(acc.value())
    }
}

/// `Var_mu(f) = mu(f^2) - mu(f)^2`, evaluated in the numerically stable
/// centered form and clamped at zero.
pub fn variance_under<T: Scalar>(measure: &Measure<T>, f: &FnOnLevel<T>) -> Result<T> {
    if measure.level != f.level {
        return Err(Error::LevelMismatch {
            expected: measure.level,
            got: f.level,
        });
    }
    Ok(variance_weights(&measure.weights, &f.values))
}

fn variance_weights<T: Scalar>(weights: &[T], values: &[T]) -> T {
    let mean = kdot(weights, values);
    let mut acc = KahanSum::new();
    for (&w, &v) in weights.iter().zip(values) {
        let d = v - mean;
        acc.add(w * d * d);
    }
    let var = acc.value();
    if var < T::zero() {
        T::zero()
    } else {
        var
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_state_model(g: [f64; 2]) -> FkModel<f64> {
        FkModel::new(
            vec![0.5, 0.5],
            vec![vec![g[0], g[1]]],
            vec![Kernel::identity(2)],
        )
        .unwrap()
    }

    #[test]
    fn identity_model_keeps_mu0() {
        let model = FkModel::new(
            vec![0.3, 0.7],
            vec![vec![1.0, 1.0]; 3],
            vec![Kernel::identity(2); 3],
        )
        .unwrap();
        for k in 0..=3 {
            let mu = model.mu_weights(k);
            assert!((mu[0] - 0.3).abs() < 1e-14);
            assert!((mu[1] - 0.7).abs() < 1e-14);
        }
    }

    #[test]
    fn one_level_normalization() {
        let model = two_state_model([1.0, 3.0]);
        let mu1 = model.mu_weights(1);
        assert!((mu1[0] - 0.25).abs() < 1e-15);
        assert!((mu1[1] - 0.75).abs() < 1e-15);
    }

    #[test]
    fn mu_hat_lives_one_level_down() {
        let model = two_state_model([1.0, 3.0]);
        let (_, hats) = model.evolve_measures();
        assert_eq!(hats.len(), 1);
        assert_eq!(hats[0].level, 0);
        assert!((hats[0].weights[0] - 0.25).abs() < 1e-15);
    }

    #[test]
    fn propagator_is_identity_at_equal_levels() {
        let model = two_state_model([1.0, 3.0]);
        let f = FnOnLevel::new(1, vec![2.0, -1.0]).unwrap();
        let q = model.propagator_apply(1, 1, &f).unwrap();
        assert_eq!(q.values, f.values);
    }

    #[test]
    fn propagator_rejects_reversed_levels() {
        let model = two_state_model([1.0, 3.0]);
        let f = FnOnLevel::one(0, 2);
        assert!(matches!(
            model.propagator_apply(1, 0, &f),
            Err(Error::LevelOrder { j: 1, k: 0 })
        ));
    }

    #[test]
    fn propagator_of_one_is_one_when_g_trivial() {
        let model = FkModel::new(
            vec![0.25, 0.75],
            vec![vec![1.0, 1.0]; 2],
            vec![
                Kernel::from_rows(1, vec![vec![0.5, 0.5], vec![0.1, 0.9]]).unwrap(),
                Kernel::from_rows(2, vec![vec![0.7, 0.3], vec![0.4, 0.6]]).unwrap(),
            ],
        )
        .unwrap();
        let one = FnOnLevel::one(2, 2);
        let q = model.propagator_apply(0, 2, &one).unwrap();
        for v in q.values {
            assert!((v - 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn variance_of_constant_is_zero() {
        let mu = Measure::probability(0, vec![0.5, 0.5]).unwrap();
        let f = FnOnLevel::constant(0, 2, 3.25);
        assert_eq!(variance_under(&mu, &f).unwrap(), 0.0);
    }

    #[test]
    fn bernoulli_variance() {
        let mu = Measure::probability(0, vec![0.5, 0.5]).unwrap();
        let f = FnOnLevel::new(0, vec![0.0, 1.0]).unwrap();
        assert!((variance_under(&mu, &f).unwrap() - 0.25).abs() < 1e-16);
    }

    #[test]
    fn variance_level_mismatch() {
        let mu = Measure::probability(0, vec![1.0]).unwrap();
        let f = FnOnLevel::one(1, 1);
        assert!(matches!(
            variance_under(&mu, &f),
            Err(Error::LevelMismatch { .. })
        ));
    }

    #[test]
    fn asymptotic_variance_identity_model() {
        // g = 1 and identity kernels: q_{j,k}(f) = f at every level, so the
        // asymptotic variance is (k+1) times the variance under mu_0.
        let model = FkModel::new(
            vec![0.25, 0.75],
            vec![vec![1.0, 1.0]; 3],
            vec![Kernel::identity(2); 3],
        )
        .unwrap();
        let f = FnOnLevel::new(3, vec![0.0, 1.0]).unwrap();
        let base = 0.25 * 0.75;
        let got = model.asymptotic_variance(3, &f).unwrap();
        assert!((got - 4.0 * base).abs() < 1e-13);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(FkModel::<f64>::new(
            vec![0.6, 0.6],
            vec![vec![1.0, 1.0]],
            vec![Kernel::identity(2)]
        )
        .is_err());
        assert!(FkModel::<f64>::new(
            vec![0.5, 0.5],
            vec![vec![1.0, 0.0]],
            vec![Kernel::identity(2)]
        )
        .is_err());
        assert!(FkModel::<f64>::new(
            vec![0.5, 0.5],
            vec![vec![1.0, 1e-310]],
            vec![Kernel::identity(2)]
        )
        .is_err());
        assert!(
            Kernel::from_rows(0, vec![vec![0.5, 0.6], vec![0.5, 0.5]]).is_err(),
            "non-stochastic row must be rejected"
        );
        assert!(Kernel::from_rows(0, vec![vec![1.5, -0.5]]).is_err());
    }

    #[test]
    fn f32_instantiation_smoke() {
        let model = FkModel::<f32>::new(
            vec![0.5, 0.5],
            vec![vec![1.0, 3.0]],
            vec![Kernel::identity(2)],
        )
        .unwrap();
        let mu1 = model.mu_weights(1);
        assert!((mu1[1] - 0.75).abs() < 1e-6);
    }
}
