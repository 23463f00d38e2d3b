//! Wright-type function `Phi_rho(tau) = sum (-tau)^n / (n! Gamma(-rho n + 1 - rho))`
//! for `rho in (0,1)`, `tau >= 0`.
//!
//! This is the subordination density tying the fractional propagator to the
//! classical semigroup; as a probability density it is nonnegative with unit
//! mass and first moment `1/Gamma(1 + rho)`.
//!
//! The series alternates and its condition number explodes like
//! `exp(c tau^{1/(1-rho)})`, so terms are built in log form, accumulated in
//! double-double, and the achieved accuracy `~eps * max |t_n|` is compared
//! against the policy: past the representable range the function reports
//! `AccuracyNotReached` instead of returning noise.

use super::dd::Dd;
use super::gamma::ln_abs_gamma;
use super::{PrecisionPolicy, SpecFunError};

const EPS: f64 = f64::EPSILON;

/// Phi_rho(tau) within the policy tolerance.
pub fn wright_phi(rho: f64, tau: f64, policy: &PrecisionPolicy) -> Result<f64, SpecFunError> {
    if rho.is_nan() || rho <= 0.0 || rho >= 1.0 {
        return Err(SpecFunError::InvalidArgument {
            what: "wright_phi: order must lie in (0,1)",
            value: rho,
        });
    }
    if !tau.is_finite() || tau < 0.0 {
        return Err(SpecFunError::InvalidArgument {
            what: "wright_phi: argument must be finite and nonnegative",
            value: tau,
        });
    }

    let target = policy.target_abs_tol();
    let ln_tau = if tau > 0.0 {
        tau.ln()
    } else {
        f64::NEG_INFINITY
    };

    let mut acc = Dd::ZERO;
    let mut max_abs = 0.0f64;
    let mut prev_abs = f64::INFINITY;
    let mut ln_fact = 0.0f64; // ln(n!)
    let mut truncation = f64::INFINITY;

    for n in 0..policy.max_series_terms() {
        let nf = n as f64;
        if n > 0 {
            ln_fact += nf.ln();
        }
        let arg = -rho * nf + 1.0 - rho;
        // Arguments that drift off a Gamma pole by rounding are pole terms;
        // evaluating them would inject spurious tiny magnitudes into the
        // convergence logic.
        let near_pole = arg < 0.5 && (arg - arg.round()).abs() <= 32.0 * EPS * (1.0 + rho * nf);
        let (ln_g, sign_g) = ln_abs_gamma(arg);
        let term = if sign_g == 0.0 || near_pole {
            0.0
        } else {
            let ln_term = if n == 0 {
                -ln_g
            } else {
                nf * ln_tau - ln_fact - ln_g
            };
            if ln_term > 700.0 {
                // the series needs magnitudes beyond f64: give up cleanly
                return Err(SpecFunError::AccuracyNotReached {
                    what: "wright_phi",
                    target,
                    achieved: f64::INFINITY,
                });
            }
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            sign * sign_g * ln_term.exp()
        };

        acc = acc.add_f64(term);
        let t_abs = term.abs();
        max_abs = max_abs.max(t_abs);

        if tau == 0.0 {
            truncation = 0.0;
            break;
        }
        if t_abs > 0.0 {
            if t_abs < prev_abs && t_abs < 0.05 * target {
                truncation = t_abs;
                break;
            }
            prev_abs = t_abs;
        }
    }

    let achieved = 8.0 * EPS * max_abs
        + if truncation.is_finite() {
            truncation
        } else {
            f64::INFINITY
        };
    if achieved <= target {
        Ok(acc.to_f64())
    } else {
        Err(SpecFunError::AccuracyNotReached {
            what: "wright_phi",
            target,
            achieved,
        })
    }
}

/// Leading-order large-argument behaviour of Phi_rho; used by tests to bound
/// quadrature tails, not by the evaluator itself (its relative error is only
/// `O(tau^{-1/(1-rho)})`).
pub fn wright_phi_asymptotic(rho: f64, tau: f64) -> f64 {
    let one_m = 1.0 - rho;
    let prefactor =
        rho.powf((2.0 * rho - 1.0) / (2.0 * one_m)) / (2.0 * std::f64::consts::PI * one_m).sqrt();
    let decay = one_m * rho.powf(rho / one_m);
    prefactor * tau.powf((rho - 0.5) / one_m) * (-decay * tau.powf(1.0 / one_m)).exp()
}
