//! Difference stencils shared by the polar and rectangular grids.

use num_complex::Complex64;
use rustfft::FftPlanner;

/// Derivative at every node of samples on the increasing abscissae `xs`,
/// by three-point Lagrange interpolation: central in the interior and
/// one-sided at the ends, exact for quadratics on any spacing.
pub(crate) fn lagrange_derivative(xs: &[f64], vals: &[Complex64]) -> Vec<Complex64> {
    let n = xs.len();
    debug_assert!(n >= 3 && vals.len() == n);
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    for i in 1..n - 1 {
        let h1 = xs[i] - xs[i - 1];
        let h2 = xs[i + 1] - xs[i];
        let c0 = -h2 / (h1 * (h1 + h2));
        let c1 = (h2 - h1) / (h1 * h2);
        let c2 = h1 / (h2 * (h1 + h2));
        out[i] = vals[i - 1] * c0 + vals[i] * c1 + vals[i + 1] * c2;
    }
    let one_sided = |x0: f64, x1: f64, x2: f64, f0: Complex64, f1: Complex64, f2: Complex64| {
        let h1 = x1 - x0;
        let h2 = x2 - x1;
        f0 * (-(2.0 * h1 + h2) / (h1 * (h1 + h2))) + f1 * ((h1 + h2) / (h1 * h2)) + f2 * (-h1 / (h2 * (h1 + h2)))
    };
    out[0] = one_sided(xs[0], xs[1], xs[2], vals[0], vals[1], vals[2]);
    // Mirror the formula: reversing the abscissae gives the derivative with
    // the opposite sign.
    out[n - 1] = -one_sided(-xs[n - 1], -xs[n - 2], -xs[n - 3], vals[n - 1], vals[n - 2], vals[n - 3]);
    out
}

/// Derivative of `n` equispaced samples of a `period`-periodic function by
/// multiplication with `ik` in Fourier space. The Nyquist mode is dropped.
pub(crate) struct Spectral {
    n: usize,
    forward: std::sync::Arc<dyn rustfft::Fft<f64>>,
    inverse: std::sync::Arc<dyn rustfft::Fft<f64>>,
    factors: Vec<Complex64>,
}

impl Spectral {
    pub(crate) fn new(n: usize, period: f64) -> Self {
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(n);
        let inverse = planner.plan_fft_inverse(n);
        let scale = 2.0 * std::f64::consts::PI / period / n as f64;
        let factors = (0..n)
            .map(|k| {
                let freq = if 2 * k < n {
                    k as f64
                } else if 2 * k == n {
                    0.0
                } else {
                    k as f64 - n as f64
                };
                Complex64::new(0.0, freq * scale)
            })
            .collect();
        Self { n, forward, inverse, factors }
    }

    pub(crate) fn differentiate(&self, buf: &mut [Complex64]) {
        debug_assert_eq!(buf.len(), self.n);
        self.forward.process(buf);
        for (v, f) in buf.iter_mut().zip(&self.factors) {
            *v *= f;
        }
        self.inverse.process(buf);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lagrange_exact_for_quadratics() {
        let xs: Vec<f64> = (0..7).map(|i| (0.3 * i as f64).exp()).collect();
        let vals: Vec<Complex64> = xs.iter().map(|&x| Complex64::new(2.0 * x * x - x + 3.0, x * x)).collect();
        let d = lagrange_derivative(&xs, &vals);
        for (x, dv) in xs.iter().zip(&d) {
            assert!((dv.re - (4.0 * x - 1.0)).abs() < 1e-12);
            assert!((dv.im - 2.0 * x).abs() < 1e-12);
        }
    }

    #[test]
    fn spectral_derivative_of_trig_polynomial() {
        let n = 16;
        let s = Spectral::new(n, 2.0 * std::f64::consts::PI);
        let th: Vec<f64> = (0..n).map(|j| 2.0 * std::f64::consts::PI * j as f64 / n as f64).collect();
        let mut buf: Vec<Complex64> = th.iter().map(|&t| Complex64::new((3.0 * t).sin(), (2.0 * t).cos())).collect();
        s.differentiate(&mut buf);
        for (t, v) in th.iter().zip(&buf) {
            assert!((v.re - 3.0 * (3.0 * t).cos()).abs() < 1e-13);
            assert!((v.im + 2.0 * (2.0 * t).sin()).abs() < 1e-13);
        }
    }
}
