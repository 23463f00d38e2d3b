//! Special functions underlying fractional relaxation and subordination:
//! the Gamma function, the two-parameter Mittag-Leffler function, the
//! Wright-type density, and the mode-wise mild-propagator kernel.
//!
//! Everything here is a pure function of its arguments and safe to call
//! concurrently.

mod dd;
mod gamma;
mod mittag_leffler;
mod wright;

pub use gamma::{gamma, GAMMA_OVERFLOW_THRESHOLD};
pub use mittag_leffler::{mittag_leffler, mittag_leffler_with};
pub use wright::{wright_phi, wright_phi_asymptotic};

/// Accuracy contract for series/integral evaluations.
#[derive(Clone, Copy, Debug)]
pub struct PrecisionPolicy {
    target_abs_tol: f64,
    max_series_terms: usize,
}

impl PrecisionPolicy {
    pub fn new(target_abs_tol: f64, max_series_terms: usize) -> Result<Self, SpecFunError> {
        if target_abs_tol.is_nan() || target_abs_tol <= 0.0 {
            return Err(SpecFunError::InvalidArgument {
                what: "PrecisionPolicy: target_abs_tol must be positive",
                value: target_abs_tol,
            });
        }
        if max_series_terms < 50 {
            return Err(SpecFunError::InvalidArgument {
                what: "PrecisionPolicy: max_series_terms must be at least 50",
                value: max_series_terms as f64,
            });
        }
        Ok(Self {
            target_abs_tol,
            max_series_terms,
        })
    }

    pub fn target_abs_tol(&self) -> f64 {
        self.target_abs_tol
    }

    pub fn max_series_terms(&self) -> usize {
        self.max_series_terms
    }
}

impl Default for PrecisionPolicy {
    fn default() -> Self {
        Self {
            target_abs_tol: 1e-13,
            max_series_terms: 500,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum SpecFunError {
    #[error("gamma pole at nonpositive integer x = {x}")]
    GammaPole { x: f64 },
    #[error("{what} overflows f64 at argument {argument}")]
    Overflow { what: &'static str, argument: f64 },
    #[error("{what}: invalid value {value}")]
    InvalidArgument { what: &'static str, value: f64 },
    #[error("{what}: no representation reached tolerance {target:.3e} (achieved {achieved:.3e})")]
    AccuracyNotReached {
        what: &'static str,
        target: f64,
        achieved: f64,
    },
}

/// Scalar convolution kernel of the mild-solution propagator acting on one
/// spectral mode: `s^{rho-1} E_{rho,rho}(-d * mu_sig * s^rho)`. At `rho = 1`
/// this degenerates to the classical semigroup factor `exp(-d * mu_sig * s)`.
pub fn ml_kernel(rho: f64, mu_sig: f64, d: f64, s: f64) -> Result<f64, SpecFunError> {
    if rho.is_nan() || rho <= 0.0 || rho > 1.0 {
        return Err(SpecFunError::InvalidArgument {
            what: "ml_kernel: order must lie in (0,1]",
            value: rho,
        });
    }
    if d.is_nan() || d <= 0.0 {
        return Err(SpecFunError::InvalidArgument {
            what: "ml_kernel: diffusion coefficient must be positive",
            value: d,
        });
    }
    if mu_sig.is_nan() || mu_sig < 0.0 {
        return Err(SpecFunError::InvalidArgument {
            what: "ml_kernel: eigenvalue power must be nonnegative",
            value: mu_sig,
        });
    }
    if s.is_nan() || s <= 0.0 {
        return Err(SpecFunError::InvalidArgument {
            what: "ml_kernel: time must be positive",
            value: s,
        });
    }
    if rho == 1.0 {
        return Ok((-d * mu_sig * s).exp());
    }
    let e = mittag_leffler(rho, rho, -d * mu_sig * s.powf(rho))?;
    Ok(s.powf(rho - 1.0) * e)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn policy_invariants() {
        assert!(PrecisionPolicy::new(0.0, 100).is_err());
        assert!(PrecisionPolicy::new(1e-12, 10).is_err());
        let p = PrecisionPolicy::new(1e-10, 80).unwrap();
        assert_eq!(p.target_abs_tol(), 1e-10);
        assert_eq!(p.max_series_terms(), 80);
    }

    #[test]
    fn kernel_classical_limit() {
        for (mu, d, s) in [(1.0, 1.0, 0.5), (4.0, 0.3, 2.0), (0.0, 1.0, 1.0)] {
            let got = ml_kernel(1.0, mu, d, s).unwrap();
            assert!((got - (-d * mu * s).exp()).abs() < 1e-15);
        }
    }

    #[test]
    fn kernel_zero_mode() {
        // E_{rho,rho}(0) = 1/Gamma(rho) so the kernel is s^{rho-1}/Gamma(rho)
        for rho in [0.3, 0.5, 0.8] {
            let s: f64 = 0.7;
            let want = s.powf(rho - 1.0) / gamma(rho).unwrap();
            let got = ml_kernel(rho, 0.0, 1.0, s).unwrap();
            assert!((got - want).abs() < 1e-13);
        }
    }

    #[test]
    fn kernel_half_order_value() {
        // ml_kernel(0.5, 1, 1, 1) = E_{0.5,0.5}(-1) = 1/sqrt(pi) - e*erfc(1)
        let got = ml_kernel(0.5, 1.0, 1.0, 1.0).unwrap();
        let want = mittag_leffler(0.5, 0.5, -1.0).unwrap();
        assert_eq!(got, want);
    }

    #[test]
    fn kernel_rejects_bad_inputs() {
        assert!(ml_kernel(0.0, 1.0, 1.0, 1.0).is_err());
        assert!(ml_kernel(0.5, 1.0, 0.0, 1.0).is_err());
        assert!(ml_kernel(0.5, 1.0, 1.0, 0.0).is_err());
        assert!(ml_kernel(0.5, -1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn subordination_ties_wright_to_mittag_leffler() {
        // E_{rho,rho}(-x) = rho * int_0^inf tau Phi_rho(tau) e^{-x tau} dtau.
        // Quadrature over the series-accurate range; the e^{-x tau} factor
        // makes the truncated tail negligible for x >= 1.
        let policy = PrecisionPolicy::new(1e-10, 500).unwrap();
        for (rho, tau_max) in [(0.4f64, 7.0f64), (0.5, 6.0), (0.6, 5.0)] {
            for x in [1.0f64, 2.0, 4.0] {
                let n = 3000usize;
                let h = tau_max / n as f64;
                let f = |tau: f64| {
                    if tau == 0.0 {
                        0.0
                    } else {
                        tau * wright_phi(rho, tau, &policy).unwrap() * (-x * tau).exp()
                    }
                };
                let mut s = f(0.0) + f(tau_max);
                for i in 1..n {
                    let w = if i % 2 == 1 { 4.0 } else { 2.0 };
                    s += w * f(i as f64 * h);
                }
                let integral = rho * s * h / 3.0;
                let want = mittag_leffler(rho, rho, -x).unwrap();
                assert!(
                    (integral - want).abs() < 5e-6,
                    "rho={rho} x={x}: {integral} vs {want}"
                );
            }
        }
    }
}
