//! Reversible mass-action kinetics, parameter-regime classification, and
//! the Lyapunov weight construction.
//!
//! The two species react through a single reversible channel; both rates
//! share the bracket `k_f u^{a1} v^{b1} - k_b u^{a2} v^{b2}`, scaled by the
//! net stoichiometric change of each species. Global-existence regimes are
//! classified by the structural hypotheses on the exponents; regimes I/II
//! admit an explicit Lyapunov functional whose weights are built here.

use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum ReactionError {
    #[error("kinetics: {0}")]
    InvalidKinetics(String),
    #[error("diffusion: {0}")]
    InvalidDiffusion(String),
    #[error("concentration {value} is negative beyond the clamp tolerance {tol}")]
    NegativeConcentration { value: f64, tol: f64 },
    #[error("operation requires a regime I/II classification, got {0:?}")]
    RegimeMismatch(Option<RegimeTag>),
}

/// Tolerance below which small negative concentrations are treated as
/// discretization noise and clamped to zero before powering.
pub const CLAMP_TOL: f64 = 1e-12;

/// Stoichiometric exponents and rate constants of the reversible channel.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct KineticParams {
    pub alpha1: f64,
    pub alpha2: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub k_f: f64,
    pub k_b: f64,
}

impl KineticParams {
    pub fn new(
        alpha1: f64,
        alpha2: f64,
        beta1: f64,
        beta2: f64,
        k_f: f64,
        k_b: f64,
    ) -> Result<Self, ReactionError> {
        for (name, v) in [
            ("alpha1", alpha1),
            ("alpha2", alpha2),
            ("beta1", beta1),
            ("beta2", beta2),
        ] {
            if !v.is_finite() || v < 0.0 {
                return Err(ReactionError::InvalidKinetics(format!(
                    "{name} must be nonnegative and finite, got {v}"
                )));
            }
        }
        for (name, v) in [("k_f", k_f), ("k_b", k_b)] {
            if !v.is_finite() || v <= 0.0 {
                return Err(ReactionError::InvalidKinetics(format!(
                    "{name} must be positive and finite, got {v}"
                )));
            }
        }
        Ok(Self {
            alpha1,
            alpha2,
            beta1,
            beta2,
            k_f,
            k_b,
        })
    }
}

/// Diffusion coefficients, spatial orders, and the Caputo order.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct DiffusionParams {
    pub d_u: f64,
    pub d_v: f64,
    pub sigma1: f64,
    pub sigma2: f64,
    pub rho: f64,
}

impl DiffusionParams {
    pub fn new(
        d_u: f64,
        d_v: f64,
        sigma1: f64,
        sigma2: f64,
        rho: f64,
    ) -> Result<Self, ReactionError> {
        for (name, v) in [("d_u", d_u), ("d_v", d_v)] {
            if !v.is_finite() || v <= 0.0 {
                return Err(ReactionError::InvalidDiffusion(format!(
                    "{name} must be positive and finite, got {v}"
                )));
            }
        }
        for (name, v) in [("sigma1", sigma1), ("sigma2", sigma2)] {
            if v.is_nan() || v <= 0.0 || v >= 1.0 {
                return Err(ReactionError::InvalidDiffusion(format!(
                    "{name} must lie in (0,1), got {v}"
                )));
            }
        }
        if rho.is_nan() || rho <= 0.0 || rho > 1.0 {
            return Err(ReactionError::InvalidDiffusion(format!(
                "rho must lie in (0,1], got {rho}"
            )));
        }
        Ok(Self {
            d_u,
            d_v,
            sigma1,
            sigma2,
            rho,
        })
    }
}

/// Global-existence regime labels, ordered as the classifier checks them.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RegimeTag {
    I,
    II,
    III,
    IV,
    V,
    VI,
}

impl std::fmt::Display for RegimeTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            RegimeTag::I => "I",
            RegimeTag::II => "II",
            RegimeTag::III => "III",
            RegimeTag::IV => "IV",
            RegimeTag::V => "V",
            RegimeTag::VI => "VI",
        };
        f.write_str(s)
    }
}

/// Classification result: the first matching tag in order I..VI (or none),
/// the positive exponent gaps for regimes I/II, and every matching clause
/// for overlap diagnostics.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Regime {
    pub tag: Option<RegimeTag>,
    /// `|alpha_2 - alpha_1|` under regime I (or the mirrored gap under II).
    pub alpha_hat: Option<f64>,
    /// `beta_1 - beta_2` under regime I (or the mirrored gap under II).
    pub beta_hat: Option<f64>,
    /// All clauses whose hypotheses hold, in check order.
    pub matches: Vec<RegimeTag>,
}

/// Mass-action rates `(f, g)` at concentrations `(u, v)`:
/// both proportional to the shared bracket, with the convention `0^0 = 1`
/// and sub-tolerance negatives clamped to zero before powering.
pub fn reaction_rates(u: f64, v: f64, kp: &KineticParams) -> Result<(f64, f64), ReactionError> {
    let u = clamp_concentration(u)?;
    let v = clamp_concentration(v)?;
    let bracket = kp.k_f * pow_mass_action(u, kp.alpha1) * pow_mass_action(v, kp.beta1)
        - kp.k_b * pow_mass_action(u, kp.alpha2) * pow_mass_action(v, kp.beta2);
    Ok((
        (kp.alpha2 - kp.alpha1) * bracket,
        (kp.beta2 - kp.beta1) * bracket,
    ))
}

fn clamp_concentration(x: f64) -> Result<f64, ReactionError> {
    if x >= 0.0 {
        Ok(x)
    } else if x >= -CLAMP_TOL {
        Ok(0.0)
    } else {
        Err(ReactionError::NegativeConcentration {
            value: x,
            tol: CLAMP_TOL,
        })
    }
}

/// `x^e` with the mass-action convention `anything^0 = 1` (including 0^0).
#[inline]
pub fn pow_mass_action(x: f64, e: f64) -> f64 {
    if e == 0.0 {
        1.0
    } else {
        x.powf(e)
    }
}

/// First-match classification against the six global-existence clauses.
/// Rate equality for I/II is exact equality of the configured values, and
/// V/VI require `rho = 1` and `sigma1 <= sigma2` with no slack.
pub fn classify_regime(kp: &KineticParams, dp: &DiffusionParams) -> Regime {
    let mut matches = Vec::new();

    let clause_i = 0.0 < kp.alpha1
        && kp.alpha1 < kp.alpha2
        && 0.0 < kp.beta2
        && kp.beta2 < kp.beta1
        && kp.alpha1 + kp.beta1 > kp.alpha2 + kp.beta2
        && kp.k_f == kp.k_b;
    if clause_i {
        matches.push(RegimeTag::I);
    }
    let clause_ii = 0.0 < kp.alpha2
        && kp.alpha2 < kp.alpha1
        && 0.0 < kp.beta1
        && kp.beta1 < kp.beta2
        && kp.alpha1 + kp.beta1 < kp.alpha2 + kp.beta2
        && kp.k_f == kp.k_b;
    if clause_ii {
        matches.push(RegimeTag::II);
    }
    if kp.alpha1 == kp.alpha2 {
        matches.push(RegimeTag::III);
    }
    if kp.beta1 == kp.beta2 {
        matches.push(RegimeTag::IV);
    }
    let frac_ok = dp.rho == 1.0 && dp.sigma1 <= dp.sigma2;
    if frac_ok
        && 0.0 < kp.alpha1
        && kp.alpha1 < kp.alpha2
        && 0.0 < kp.beta1
        && kp.beta1 < kp.beta2
        && kp.alpha1 + kp.beta1 <= 1.0
    {
        matches.push(RegimeTag::V);
    }
    if frac_ok
        && 0.0 < kp.alpha2
        && kp.alpha2 < kp.alpha1
        && 0.0 < kp.beta2
        && kp.beta2 < kp.beta1
        && kp.alpha2 + kp.beta2 <= 1.0
    {
        matches.push(RegimeTag::VI);
    }

    let tag = matches.first().copied();
    let (alpha_hat, beta_hat) = match tag {
        Some(RegimeTag::I) => (Some(kp.alpha2 - kp.alpha1), Some(kp.beta1 - kp.beta2)),
        Some(RegimeTag::II) => (Some(kp.alpha1 - kp.alpha2), Some(kp.beta2 - kp.beta1)),
        _ => (None, None),
    };
    Regime {
        tag,
        alpha_hat,
        beta_hat,
        matches,
    }
}

/// Lyapunov exponents and weights for regimes I/II:
/// `q = (p-1) bh/ah + 1`, `delta_1 = 1/(p ah)`, `delta_2 = 1/(q bh)`.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct LyapunovWeights {
    pub p: f64,
    pub q: f64,
    pub delta1: f64,
    pub delta2: f64,
}

pub fn lyapunov_weights(regime: &Regime, p: f64) -> Result<LyapunovWeights, ReactionError> {
    if !matches!(regime.tag, Some(RegimeTag::I) | Some(RegimeTag::II)) {
        return Err(ReactionError::RegimeMismatch(regime.tag));
    }
    if p.is_nan() || p <= 1.0 {
        return Err(ReactionError::InvalidKinetics(format!(
            "lyapunov exponent p must exceed 1, got {p}"
        )));
    }
    let ah = regime.alpha_hat.expect("regime I/II carries alpha_hat");
    let bh = regime.beta_hat.expect("regime I/II carries beta_hat");
    let q = (p - 1.0) * bh / ah + 1.0;
    Ok(LyapunovWeights {
        p,
        q,
        delta1: 1.0 / (p * ah),
        delta2: 1.0 / (q * bh),
    })
}

/// Explicit a priori sup-norm bounds for regimes I/II given the initial
/// bound `0 <= u0, v0 <= lambda`:
/// `lambda_u = max(2, 2 lambda^{bh/ah})`,
/// `lambda_v = (2 (bh/ah)^2 + 1) max(1, lambda)`.
pub fn linf_bounds(regime: &Regime, lambda: f64) -> Result<(f64, f64), ReactionError> {
    if !matches!(regime.tag, Some(RegimeTag::I) | Some(RegimeTag::II)) {
        return Err(ReactionError::RegimeMismatch(regime.tag));
    }
    if lambda.is_nan() || lambda <= 0.0 {
        return Err(ReactionError::InvalidKinetics(format!(
            "initial bound must be positive, got {lambda}"
        )));
    }
    let ratio = regime.beta_hat.unwrap() / regime.alpha_hat.unwrap();
    let lambda_u = 2.0f64.max(2.0 * lambda.powf(ratio));
    let lambda_v = (2.0 * ratio * ratio + 1.0) * 1.0f64.max(lambda);
    Ok((lambda_u, lambda_v))
}

/// Product `(x^s - y^t)(x^{rs/t} - y^r)` of the algebraic positivity lemma,
/// with a sign verdict at a scale-aware tolerance.
pub fn check_pointwise_inequality(x: f64, y: f64, r: f64, s: f64, t: f64) -> (f64, bool) {
    debug_assert!(x >= 0.0 && y >= 0.0 && r > 0.0 && s > t && t > 0.0);
    let f1 = x.powf(s) - y.powf(t);
    let f2 = x.powf(r * s / t) - y.powf(r);
    let value = f1 * f2;
    let scale = 1.0f64.max(f1.abs()).max(f2.abs());
    (value, value >= -1e-15 * scale)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kp(a1: f64, a2: f64, b1: f64, b2: f64, kf: f64, kb: f64) -> KineticParams {
        KineticParams::new(a1, a2, b1, b2, kf, kb).unwrap()
    }

    fn dp(rho: f64) -> DiffusionParams {
        DiffusionParams::new(1.0, 1.0, 0.5, 0.5, rho).unwrap()
    }

    #[test]
    fn validation() {
        assert!(KineticParams::new(-1.0, 2.0, 3.0, 1.0, 1.0, 1.0).is_err());
        assert!(KineticParams::new(1.0, 2.0, 3.0, 1.0, 0.0, 1.0).is_err());
        assert!(DiffusionParams::new(1.0, 1.0, 0.5, 0.5, 0.0).is_err());
        assert!(DiffusionParams::new(1.0, 1.0, 1.0, 0.5, 0.5).is_err());
        assert!(DiffusionParams::new(0.0, 1.0, 0.5, 0.5, 0.5).is_err());
    }

    #[test]
    fn rates_vanish_at_symmetric_equilibrium() {
        let k = kp(1.0, 2.0, 3.0, 1.0, 2.5, 2.5);
        let (f, g) = reaction_rates(1.0, 1.0, &k).unwrap();
        assert_eq!(f, 0.0);
        assert_eq!(g, 0.0);
    }

    #[test]
    fn rates_hand_evaluated() {
        // a = (1,2), b = (2,1), k = 1, u = 2, v = 1:
        // bracket = 2 - 4 = -2, f = (1)(-2) = -2, g = (-1)(-2) = 2
        let k = kp(1.0, 2.0, 2.0, 1.0, 1.0, 1.0);
        let (f, g) = reaction_rates(2.0, 1.0, &k).unwrap();
        assert!((f + 2.0).abs() < 1e-14);
        assert!((g - 2.0).abs() < 1e-14);
    }

    #[test]
    fn equal_alpha_zeroes_f() {
        let k = kp(1.5, 1.5, 2.0, 0.5, 1.0, 3.0);
        for (u, v) in [(0.3, 0.9), (2.0, 0.1), (0.0, 1.0)] {
            let (f, _) = reaction_rates(u, v, &k).unwrap();
            assert_eq!(f, 0.0);
        }
    }

    #[test]
    fn shared_bracket_identity() {
        // f (b2 - b1) = g (a2 - a1) exactly
        let k = kp(0.7, 1.9, 2.4, 0.3, 1.1, 0.9);
        for (u, v) in [(0.5, 1.5), (2.0, 0.25), (1.0, 1.0)] {
            let (f, g) = reaction_rates(u, v, &k).unwrap();
            let lhs = f * (k.beta2 - k.beta1);
            let rhs = g * (k.alpha2 - k.alpha1);
            assert!((lhs - rhs).abs() <= 1e-15 * lhs.abs().max(1.0));
        }
    }

    #[test]
    fn zero_power_convention() {
        assert_eq!(pow_mass_action(0.0, 0.0), 1.0);
        assert_eq!(pow_mass_action(0.0, 2.0), 0.0);
        let k = kp(0.0, 1.0, 0.0, 2.0, 1.0, 1.0);
        let (f, _) = reaction_rates(0.0, 0.0, &k).unwrap();
        assert_eq!(f, 1.0); // k_f * 0^0 * 0^0 = 1 survives
    }

    #[test]
    fn clamp_policy() {
        let k = kp(1.0, 2.0, 3.0, 1.0, 1.0, 1.0);
        assert!(reaction_rates(-1e-13, 1.0, &k).is_ok());
        assert!(matches!(
            reaction_rates(-1e-9, 1.0, &k),
            Err(ReactionError::NegativeConcentration { .. })
        ));
    }

    #[test]
    fn quasi_positivity_sampling() {
        // f(0, v) >= 0 when a2 > a1 > 0; g(u, 0) >= 0 when b2 > b1 > 0
        let k = kp(1.0, 2.0, 3.0, 1.0, 1.3, 0.8);
        let mut s = 9u64;
        for _ in 0..10_000 {
            s ^= s << 13;
            s ^= s >> 7;
            s ^= s << 17;
            let v = (s % 1000) as f64 / 100.0;
            let (f, _) = reaction_rates(0.0, v, &k).unwrap();
            assert!(f >= 0.0, "f(0,{v}) = {f}");
        }
        let k2 = kp(2.0, 1.0, 1.0, 3.0, 0.7, 1.9);
        let mut s = 11u64;
        for _ in 0..10_000 {
            s ^= s << 13;
            s ^= s >> 7;
            s ^= s << 17;
            let u = (s % 1000) as f64 / 100.0;
            let (_, g) = reaction_rates(u, 0.0, &k2).unwrap();
            assert!(g >= 0.0, "g({u},0) = {g}");
        }
    }

    #[test]
    fn detailed_balance_manifold() {
        // on k_f u^{a1} v^{b1} = k_b u^{a2} v^{b2} the rates vanish
        let k = kp(1.0, 2.0, 3.0, 1.0, 2.0, 1.0);
        // pick u, solve for v: 2 u v^3 = u^2 v -> v^2 = u/2
        for u in [0.5f64, 1.0, 2.0, 8.0] {
            let v = (u / 2.0).sqrt();
            let (f, g) = reaction_rates(u, v, &k).unwrap();
            let scale = k.k_f * u.powf(k.alpha1) * v.powf(k.beta1);
            assert!(f.abs() <= 1e-12 * scale.max(1.0), "u={u} f={f}");
            assert!(g.abs() <= 1e-12 * scale.max(1.0));
        }
    }

    #[test]
    fn classify_regime_i() {
        let r = classify_regime(&kp(1.0, 2.0, 3.0, 1.0, 1.0, 1.0), &dp(0.5));
        assert_eq!(r.tag, Some(RegimeTag::I));
        assert_eq!(r.alpha_hat, Some(1.0));
        assert_eq!(r.beta_hat, Some(2.0));
    }

    #[test]
    fn classify_regime_iii_any_rates() {
        let r = classify_regime(&kp(1.0, 1.0, 0.0, 5.0, 2.0, 3.0), &dp(0.5));
        assert_eq!(r.tag, Some(RegimeTag::III));
    }

    #[test]
    fn classify_regime_v() {
        let k = kp(0.4, 1.0, 0.5, 2.0, 1.0, 2.0);
        let d = DiffusionParams::new(1.0, 1.0, 0.3, 0.7, 1.0).unwrap();
        let r = classify_regime(&k, &d);
        assert_eq!(r.tag, Some(RegimeTag::V));
        // same kinetics at fractional rho matches nothing
        let r2 = classify_regime(&k, &dp(0.5));
        assert_eq!(r2.tag, None);
    }

    #[test]
    fn classify_none() {
        let r = classify_regime(&kp(1.0, 2.0, 1.0, 2.0, 1.0, 2.0), &dp(0.5));
        assert_eq!(r.tag, None);
        assert!(r.matches.is_empty());
    }

    #[test]
    fn rate_equality_is_exact_not_approximate() {
        let r = classify_regime(&kp(1.0, 2.0, 3.0, 1.0, 1.0, 1.0 + 1e-15), &dp(0.5));
        assert_ne!(r.tag, Some(RegimeTag::I));
    }

    #[test]
    fn overlap_reported_in_matches() {
        // alpha1 = alpha2 and beta1 = beta2 satisfy both III and IV;
        // first-match returns III, diagnostics list both.
        let r = classify_regime(&kp(1.0, 1.0, 2.0, 2.0, 1.0, 1.0), &dp(0.5));
        assert_eq!(r.tag, Some(RegimeTag::III));
        assert_eq!(r.matches, vec![RegimeTag::III, RegimeTag::IV]);
    }

    #[test]
    fn weights_symmetric_case() {
        // equal gaps tie the exponent sums, so no kinetics reaches clause I
        // with ah = bh = 1; exercise the formula on a hand-built regime.
        let r = Regime {
            tag: Some(RegimeTag::I),
            alpha_hat: Some(1.0),
            beta_hat: Some(1.0),
            matches: vec![RegimeTag::I],
        };
        let w = lyapunov_weights(&r, 3.0).unwrap();
        assert_eq!(w.q, 3.0);
        assert!((w.delta1 - 1.0 / 3.0).abs() < 1e-15);
        assert!((w.delta2 - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn weights_formula_evaluation() {
        // ah = 1, bh = 2, p = 2 -> q = 3, d1 = 1/2, d2 = 1/6
        let r = classify_regime(&kp(1.0, 2.0, 3.0, 1.0, 1.0, 1.0), &dp(0.5));
        let w = lyapunov_weights(&r, 2.0).unwrap();
        assert_eq!(w.q, 3.0);
        assert!((w.delta1 - 0.5).abs() < 1e-15);
        assert!((w.delta2 - 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn weights_q_exceeds_one() {
        let r = classify_regime(&kp(0.5, 2.5, 4.0, 0.5, 1.0, 1.0), &dp(0.5));
        for p in [1.01, 1.5, 2.0, 10.0, 100.0] {
            let w = lyapunov_weights(&r, p).unwrap();
            assert!(w.q > 1.0);
        }
    }

    #[test]
    fn weights_regime_mismatch() {
        let r = classify_regime(&kp(1.0, 1.0, 2.0, 2.0, 1.0, 1.0), &dp(0.5));
        assert!(matches!(
            lyapunov_weights(&r, 2.0),
            Err(ReactionError::RegimeMismatch(_))
        ));
    }

    #[test]
    fn linf_bounds_examples() {
        // lambda = 1: lambda_u = 2 regardless of the ratio
        let r = classify_regime(&kp(1.0, 2.0, 3.0, 1.0, 1.0, 1.0), &dp(0.5));
        let (lu, lv) = linf_bounds(&r, 1.0).unwrap();
        assert_eq!(lu, 2.0);
        assert_eq!(lv, 9.0); // (2*4+1)*1
        let (lu4, _) = linf_bounds(&r, 4.0).unwrap();
        assert_eq!(lu4, 32.0); // max(2, 2*16)
    }

    #[test]
    fn pointwise_inequality_cases() {
        let (v, ok) = check_pointwise_inequality(1.0, 1.0, 2.0, 3.0, 1.0);
        assert_eq!(v, 0.0);
        assert!(ok);
        let (v, ok) = check_pointwise_inequality(0.0, 1.0, 2.0, 3.0, 1.0);
        assert_eq!(v, 1.0);
        assert!(ok);
    }

    #[test]
    fn pointwise_inequality_randomized() {
        let mut s = 77u64;
        let mut rand01 = move || {
            s ^= s << 13;
            s ^= s >> 7;
            s ^= s << 17;
            (s % 1_000_000) as f64 / 1_000_000.0
        };
        for _ in 0..100_000 {
            let x = 4.0 * rand01();
            let y = 4.0 * rand01();
            let r = 3.0 * rand01() + 0.01;
            let t = 2.0 * rand01() + 0.01;
            let s_exp = t + 2.0 * rand01() + 0.01;
            let (_, ok) = check_pointwise_inequality(x, y, r, s_exp, t);
            assert!(ok, "x={x} y={y} r={r} s={s_exp} t={t}");
        }
    }
}
