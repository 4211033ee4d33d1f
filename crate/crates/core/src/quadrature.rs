//! Composite Simpson and trapezoid rules on uniform grids.

use std::ops::{Add, Mul, Sub};

use crate::error::{Error, Result};

/// Quadrature step count used when none is given (per period `T`).
pub const DEFAULT_STEPS: usize = 4096;

/// Smallest accepted step count.
pub const MIN_STEPS: usize = 16;

/// Values that can be integrated: reals and complex numbers.
pub trait Integrand: Copy + Default + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {}

impl<T> Integrand for T where T: Copy + Default + Add<Output = T> + Sub<Output = T> + Mul<f64, Output = T> {}

pub fn check_steps(steps: usize) -> Result<()> {
    if steps < MIN_STEPS {
        return Err(Error::TooFewSteps { got: steps, min: MIN_STEPS });
    }
    if !steps.is_multiple_of(2) {
        return Err(Error::OddSteps(steps));
    }
    Ok(())
}

/// Uniform grid `0, h, …, steps·h = end`.
pub fn uniform_grid(end: f64, steps: usize) -> Vec<f64> {
    let h = end / steps as f64;
    (0..=steps).map(|k| if k == steps { end } else { k as f64 * h }).collect()
}

/// Composite Simpson over samples with spacing `h`; `values.len() - 1` must be even.
pub fn simpson<T: Integrand>(values: &[T], h: f64) -> T {
    let intervals = values.len().saturating_sub(1);
    debug_assert!(intervals.is_multiple_of(2), "Simpson needs an even interval count");
    let mut acc = T::default();
    for pair in (0..intervals).step_by(2) {
        acc = acc + (values[pair] + values[pair + 1] * 4.0 + values[pair + 2]) * (h / 3.0);
    }
    acc
}

/// Running integral `∫₀^{t_k}` at every node.
///
/// Even nodes carry the composite Simpson sum. Odd nodes add the quadratic
/// half-panel rule `h/12 (5 f₀ + 8 f₁ − f₂)` to the preceding even node, so
/// every sample is accurate to fourth order.
pub fn cumulative_simpson<T: Integrand>(values: &[T], h: f64) -> Vec<T> {
    let intervals = values.len().saturating_sub(1);
    debug_assert!(intervals.is_multiple_of(2), "Simpson needs an even interval count");
    let mut out = vec![T::default(); values.len()];
    let mut acc = T::default();
    for pair in (0..intervals).step_by(2) {
        let (f0, f1, f2) = (values[pair], values[pair + 1], values[pair + 2]);
        out[pair + 1] = acc + (f0 * 5.0 + f1 * 8.0 - f2) * (h / 12.0);
        acc = acc + (f0 + f1 * 4.0 + f2) * (h / 3.0);
        out[pair + 2] = acc;
    }
    out
}

/// Running trapezoid integral at every node.
pub fn cumulative_trapezoid<T: Integrand>(values: &[T], h: f64) -> Vec<T> {
    let mut out = Vec::with_capacity(values.len());
    let mut acc = T::default();
    out.push(acc);
    for w in values.windows(2) {
        acc = acc + (w[0] + w[1]) * (h / 2.0);
        out.push(acc);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use num_complex::Complex64;

    #[test]
    fn step_validation() {
        assert_eq!(check_steps(8), Err(Error::TooFewSteps { got: 8, min: 16 }));
        assert_eq!(check_steps(17), Err(Error::OddSteps(17)));
        assert!(check_steps(16).is_ok());
    }

    #[test]
    fn simpson_is_exact_for_cubics() {
        let grid = uniform_grid(2.0, 16);
        let f: Vec<f64> = grid.iter().map(|t| t * t * t - 2.0 * t + 1.0).collect();
        assert_abs_diff_eq!(simpson(&f, 2.0 / 16.0), 4.0 - 4.0 + 2.0, epsilon = 1e-13);
        let running = cumulative_simpson(&f, 2.0 / 16.0);
        for (t, value) in grid.iter().zip(&running) {
            // half-panel rule is exact for quadratics only; cubic term leaves O(h^4)
            let exact = t.powi(4) / 4.0 - t * t + t;
            assert_abs_diff_eq!(*value, exact, epsilon = 1e-4);
        }
        assert_abs_diff_eq!(running[16], 2.0, epsilon = 1e-13);
    }

    #[test]
    fn cumulative_simpson_converges_at_fourth_order() {
        let err = |steps: usize| {
            let t = uniform_grid(3.0, steps);
            let f: Vec<Complex64> = t.iter().map(|&x| Complex64::new(0.0, 2.0 * x).exp()).collect();
            let running = cumulative_simpson(&f, 3.0 / steps as f64);
            t.iter()
                .zip(&running)
                .map(|(&x, v)| {
                    let exact = (Complex64::new(0.0, 2.0 * x).exp() - 1.0) / Complex64::new(0.0, 2.0);
                    (v - exact).norm()
                })
                .fold(0.0, f64::max)
        };
        let ratio = err(64) / err(128);
        assert!(ratio > 14.0 && ratio < 18.0, "ratio {ratio}");
    }

    #[test]
    fn trapezoid_running_sum() {
        let f = [0.0, 1.0, 2.0, 3.0];
        assert_eq!(cumulative_trapezoid(&f, 1.0), vec![0.0, 0.5, 2.0, 4.5]);
    }
}
