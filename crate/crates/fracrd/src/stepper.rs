//! Time integration of the coupled fractional reaction-diffusion system
//! with two interchangeable schemes and blow-up detection.
//!
//! * **L1-IMEX**: the Caputo derivative is discretized by the L1
//!   convolution weights on a uniform grid, the fractional Laplacian is
//!   treated implicitly (diagonal in the eigenbasis), and the reaction is
//!   evaluated explicitly at the previous step. One step at index `n`
//!   touches the whole history: O(n) per mode, O(n^2) per run, measured by
//!   the `history_ops` counter.
//!
//! * **ML-mild**: the variation-of-constants form. Per mode,
//!   `w(t_{n+1}) = E_{rho,1}(-lam t_{n+1}^rho) w(0) + sum_m I_m r_m` where
//!   `I_m` is the exact integral of the propagator kernel over one lag
//!   interval and `r_m` the reaction coefficient held piecewise constant.
//!   With zero reaction the mode decay is exact up to the special-function
//!   tolerance.
//!
//! Divergence is detected by a sup-norm threshold (default `1e8`) plus a
//! secondary 10x-growth-in-10-steps trigger; the trajectory records the
//! termination cause and the time reached, a lower bound for the maximal
//! existence time.

use serde::Serialize;

use crate::operators::{linf_norm, BoundaryKind, Domain1D, Field, OperatorError, SpectralBasis};
use crate::reactions::{
    classify_regime, lyapunov_weights, reaction_rates, DiffusionParams, KineticParams,
    LyapunovWeights, ReactionError, Regime,
};
use crate::specfun::{gamma, mittag_leffler_with, PrecisionPolicy, SpecFunError};

#[derive(Debug, thiserror::Error)]
pub enum SolverError {
    #[error("config: {0}")]
    InvalidConfig(String),
    #[error("initial data: {0}")]
    InvalidInitialData(String),
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error(transparent)]
    Reaction(#[from] ReactionError),
    #[error(transparent)]
    SpecFun(#[from] SpecFunError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    L1Imex,
    MlMild,
}

#[derive(Clone, Copy, Debug)]
pub struct SolverConfig {
    pub dt: f64,
    pub t_end: f64,
    pub scheme: Scheme,
    /// Sup-norm level treated as numerical blow-up.
    pub blowup_threshold: f64,
    /// Keep a field snapshot every this many steps; 0 disables snapshots.
    pub snapshot_stride: usize,
    /// Negative nodal values above this magnitude are clamped to zero;
    /// initial data more negative than this is rejected.
    pub clamp_tol: f64,
    /// Exponent p used for the Lyapunov diagnostic column in regimes I/II.
    pub lyapunov_p: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            dt: 1e-2,
            t_end: 1.0,
            scheme: Scheme::L1Imex,
            blowup_threshold: 1e8,
            snapshot_stride: 0,
            clamp_tol: 1e-12,
            lyapunov_p: 2.0,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<(), SolverError> {
        if !self.dt.is_finite() || self.dt <= 0.0 {
            return Err(SolverError::InvalidConfig(format!(
                "dt must be positive, got {}",
                self.dt
            )));
        }
        if self.t_end.is_nan() || self.t_end <= self.dt {
            return Err(SolverError::InvalidConfig(format!(
                "t_end {} must exceed dt {}",
                self.t_end, self.dt
            )));
        }
        if self.blowup_threshold.is_nan() || self.blowup_threshold <= 0.0 {
            return Err(SolverError::InvalidConfig(
                "blowup_threshold must be positive".into(),
            ));
        }
        if self.clamp_tol.is_nan() || self.clamp_tol < 0.0 {
            return Err(SolverError::InvalidConfig("clamp_tol must be >= 0".into()));
        }
        if self.lyapunov_p.is_nan() || self.lyapunov_p <= 1.0 {
            return Err(SolverError::InvalidConfig(
                "lyapunov_p must exceed 1".into(),
            ));
        }
        Ok(())
    }
}

/// L1 convolution weights `b_j = ((j+1)^{1-rho} - j^{1-rho}) dt^{-rho} /
/// Gamma(2-rho)` for `j = 0..n-1`. At `rho = 1` only `b_0 = 1/dt` survives
/// and the scheme collapses to the backward difference.
pub fn caputo_l1_coeffs(rho: f64, dt: f64, n: usize) -> Vec<f64> {
    assert!(rho > 0.0 && rho <= 1.0, "rho must lie in (0,1]");
    assert!(dt > 0.0);
    let scale = dt.powf(-rho) / gamma(2.0 - rho).expect("2-rho in [1,2)");
    let e = 1.0 - rho;
    // 0^0 must be 0 here (limit of 0^{1-rho} as rho -> 1), unlike IEEE powf,
    // so that b_0 = dt^{-rho}/Gamma(2-rho) for every rho including 1.
    let jpow = |jf: f64| if jf == 0.0 { 0.0 } else { jf.powf(e) };
    (0..n)
        .map(|j| {
            let jf = j as f64;
            (jpow(jf + 1.0) - jpow(jf)) * scale
        })
        .collect()
}

/// Discrete Caputo derivative of a sampled path on a uniform grid by the
/// L1 rule; entry 0 is zero by convention. Exact for piecewise-linear
/// input.
pub fn caputo_l1_apply(samples: &[f64], rho: f64, dt: f64) -> Vec<f64> {
    let n = samples.len();
    let mut out = vec![0.0; n];
    if n < 2 {
        return out;
    }
    let b = caputo_l1_coeffs(rho, dt, n - 1);
    for (i, o) in out.iter_mut().enumerate().skip(1) {
        let mut acc = 0.0;
        for j in 0..i {
            acc += b[j] * (samples[i - j] - samples[i - j - 1]);
        }
        *o = acc;
    }
    out
}

/// Evolving state: current fields plus the step index and time.
pub struct SolverState {
    pub step: usize,
    pub t: f64,
    pub u: Field,
    pub v: Field,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct DiagnosticsRow {
    pub t: f64,
    pub linf_u: f64,
    pub linf_v: f64,
    pub l2_u: f64,
    pub l2_v: f64,
    pub mass_u: f64,
    pub mass_v: f64,
    pub lyapunov: Option<f64>,
    /// Most negative nodal values seen before clamping at this step.
    pub min_u: f64,
    pub min_v: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Snapshot {
    pub t: f64,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    Completed,
    BlowupDetected,
    SchemeFailure,
}

/// Time-stamped diagnostics of one run plus metadata the verification
/// checks need (domain, initial bound, regime, Lyapunov weights, counters).
#[derive(Clone, Debug, Serialize)]
pub struct Trajectory {
    pub rows: Vec<DiagnosticsRow>,
    pub snapshots: Vec<Snapshot>,
    pub termination: Termination,
    /// Time reached before stopping; a lower bound for the maximal
    /// existence time when the run blew up.
    pub t_max_lower_bound: f64,
    pub domain_length: f64,
    pub n_modes: usize,
    pub boundary: BoundaryKind,
    pub dt: f64,
    pub rho: f64,
    /// Sup bound of the initial data.
    pub lambda_bound: f64,
    pub regime: Regime,
    pub weights: Option<LyapunovWeights>,
    /// Multiply-adds spent on convolution history (the O(n^2) cost).
    pub history_ops: u64,
    /// Mittag-Leffler kernel evaluations (mild scheme).
    pub ml_evals: u64,
}

struct StepOutcome {
    min_u: f64,
    min_v: f64,
}

/// Reaction terms of both species in the eigenbasis.
type ReactionCoeffs = (Vec<f64>, Vec<f64>);

/// Shared pieces both steppers need.
struct SchemeContext<'a> {
    basis: &'a SpectralBasis,
    lam_u: Vec<f64>,
    lam_v: Vec<f64>,
    kp: KineticParams,
    reaction_active: bool,
}

impl<'a> SchemeContext<'a> {
    fn new(basis: &'a SpectralBasis, dp: &DiffusionParams, kp: &KineticParams) -> Self {
        let lam_u: Vec<f64> = basis
            .eigenvalues()
            .iter()
            .map(|mu| dp.d_u * mu.powf(dp.sigma1))
            .collect();
        let lam_v: Vec<f64> = basis
            .eigenvalues()
            .iter()
            .map(|mu| dp.d_v * mu.powf(dp.sigma2))
            .collect();
        let reaction_active = kp.alpha1 != kp.alpha2 || kp.beta1 != kp.beta2;
        Self {
            basis,
            lam_u,
            lam_v,
            kp: *kp,
            reaction_active,
        }
    }

    /// Nodal reaction terms analyzed into the eigenbasis; `None` when the
    /// net stoichiometry is zero on both species.
    fn reaction_coefficients(
        &self,
        state: &mut SolverState,
    ) -> Result<Option<ReactionCoeffs>, SolverError> {
        if !self.reaction_active {
            return Ok(None);
        }
        let n = state.u.len();
        let mut f = vec![0.0; n];
        let mut g = vec![0.0; n];
        {
            let u = state.u.nodal(self.basis).to_vec();
            let v = state.v.nodal(self.basis);
            for i in 0..n {
                let (fi, gi) = reaction_rates(u[i], v[i], &self.kp)?;
                f[i] = fi;
                g[i] = gi;
            }
        }
        let mut ff = Field::from_nodal(f).map_err(|_| {
            SolverError::InvalidInitialData("reaction produced non-finite values".into())
        })?;
        let mut gf = Field::from_nodal(g).map_err(|_| {
            SolverError::InvalidInitialData("reaction produced non-finite values".into())
        })?;
        Ok(Some((
            ff.spectral(self.basis).to_vec(),
            gf.spectral(self.basis).to_vec(),
        )))
    }

    /// Record the pre-clamp minimum; when negatives are present, clamp the
    /// nodal values to zero and re-analyze so the spectral history matches
    /// the observable state. Untouched fields keep the solve's coefficients
    /// bit-exact.
    fn clamp_and_sync(&self, field: &mut Field) -> f64 {
        let min = field
            .nodal(self.basis)
            .iter()
            .fold(f64::INFINITY, |m, &v| m.min(v));
        if min < 0.0 {
            let clamped: Vec<f64> = field
                .nodal(self.basis)
                .iter()
                .map(|&v| v.max(0.0))
                .collect();
            field.set_nodal(clamped);
            self.basis.analyze(field);
        }
        min
    }
}

/// L1-IMEX stepper: implicit fractional diffusion, explicit reaction,
/// full-history Caputo convolution. Owns the spectral history of both
/// fields (the nodal states are recoverable from it exactly).
pub struct L1ImexStepper {
    rho: f64,
    dt: f64,
    weights: Vec<f64>,
    u_hist: Vec<Vec<f64>>,
    v_hist: Vec<Vec<f64>>,
    pub history_ops: u64,
}

impl L1ImexStepper {
    pub fn new(
        dp: &DiffusionParams,
        cfg: &SolverConfig,
        state: &mut SolverState,
        basis: &SpectralBasis,
    ) -> Self {
        let u0 = state.u.spectral(basis).to_vec();
        let v0 = state.v.spectral(basis).to_vec();
        Self {
            rho: dp.rho,
            dt: cfg.dt,
            weights: caputo_l1_coeffs(dp.rho, cfg.dt, 1),
            u_hist: vec![u0],
            v_hist: vec![v0],
            history_ops: 0,
        }
    }

    pub fn history_len(&self) -> usize {
        self.u_hist.len() - 1
    }

    fn step(
        &mut self,
        state: &mut SolverState,
        ctx: &SchemeContext,
    ) -> Result<StepOutcome, SolverError> {
        let n = state.step;
        let n_modes = state.u.len();
        if self.weights.len() < n + 1 {
            self.weights = caputo_l1_coeffs(self.rho, self.dt, n + 1);
        }
        let b = &self.weights;
        let b0 = b[0];

        let reaction = ctx.reaction_coefficients(state)?;

        let mut new_u = vec![0.0; n_modes];
        let mut new_v = vec![0.0; n_modes];
        let classical = self.rho == 1.0;
        for k in 0..n_modes {
            let mut hist_u = 0.0;
            let mut hist_v = 0.0;
            if !classical {
                for (j, &bj) in b.iter().enumerate().take(n + 1).skip(1) {
                    let du = self.u_hist[n + 1 - j][k] - self.u_hist[n - j][k];
                    let dv = self.v_hist[n + 1 - j][k] - self.v_hist[n - j][k];
                    hist_u += bj * du;
                    hist_v += bj * dv;
                }
                self.history_ops += 2 * n as u64;
            }
            let (ru, rv) = match &reaction {
                Some((f, g)) => (f[k], g[k]),
                None => (0.0, 0.0),
            };
            new_u[k] = (b0 * self.u_hist[n][k] - hist_u + ru) / (b0 + ctx.lam_u[k]);
            new_v[k] = (b0 * self.v_hist[n][k] - hist_v + rv) / (b0 + ctx.lam_v[k]);
        }

        state.u = Field::from_spectral(new_u)
            .map_err(|e| SolverError::InvalidInitialData(e.to_string()))?;
        state.v = Field::from_spectral(new_v)
            .map_err(|e| SolverError::InvalidInitialData(e.to_string()))?;
        let min_u = ctx.clamp_and_sync(&mut state.u);
        let min_v = ctx.clamp_and_sync(&mut state.v);
        self.u_hist.push(state.u.spectral(ctx.basis).to_vec());
        self.v_hist.push(state.v.spectral(ctx.basis).to_vec());
        state.step += 1;
        state.t = state.step as f64 * self.dt;
        Ok(StepOutcome { min_u, min_v })
    }
}

/// Mild-solution stepper built from the mode-wise propagator kernel with
/// piecewise-constant reaction history; exact on the linear problem.
pub struct MlMildStepper {
    rho: f64,
    dt: f64,
    policy: PrecisionPolicy,
    w0_u: Vec<f64>,
    w0_v: Vec<f64>,
    /// `e1[j][k] = E_{rho,1}(-lam_k t_j^rho)`, row per time level.
    e1_u: Vec<Vec<f64>>,
    e1_v: Vec<Vec<f64>>,
    /// `delta[l][k]`: kernel integral over the l-th lag interval.
    delta_u: Vec<Vec<f64>>,
    delta_v: Vec<Vec<f64>>,
    r_u: Vec<Vec<f64>>,
    r_v: Vec<Vec<f64>>,
    pub history_ops: u64,
    pub ml_evals: u64,
}

impl MlMildStepper {
    pub fn new(
        dp: &DiffusionParams,
        cfg: &SolverConfig,
        state: &mut SolverState,
        basis: &SpectralBasis,
    ) -> Self {
        let n_modes = basis.domain().n_modes();
        let w0_u = state.u.spectral(basis).to_vec();
        let w0_v = state.v.spectral(basis).to_vec();
        Self {
            rho: dp.rho,
            dt: cfg.dt,
            policy: PrecisionPolicy::new(1e-12, 500).expect("valid policy"),
            w0_u,
            w0_v,
            e1_u: vec![vec![1.0; n_modes]],
            e1_v: vec![vec![1.0; n_modes]],
            delta_u: vec![vec![0.0; n_modes]],
            delta_v: vec![vec![0.0; n_modes]],
            r_u: Vec::new(),
            r_v: Vec::new(),
            history_ops: 0,
            ml_evals: 0,
        }
    }

    pub fn history_len(&self) -> usize {
        self.r_u.len()
    }

    /// Extend the decay tables to time level `j = t_j/dt`.
    fn extend_tables(&mut self, j: usize, lam_u: &[f64], lam_v: &[f64]) -> Result<(), SolverError> {
        debug_assert_eq!(self.e1_u.len(), j);
        let t_j = j as f64 * self.dt;
        let t_prev = (j - 1) as f64 * self.dt;
        let t_pow = t_j.powf(self.rho);
        let t_prev_pow = t_prev.powf(self.rho);
        let gamma_1p = gamma(1.0 + self.rho).expect("1+rho in (1,2]");

        let mut row_e_u = Vec::with_capacity(lam_u.len());
        let mut row_d_u = Vec::with_capacity(lam_u.len());
        for (k, &lam) in lam_u.iter().enumerate() {
            let (e, d) =
                self.decay_and_increment(lam, t_pow, t_prev_pow, gamma_1p, &self.e1_u[j - 1], k)?;
            row_e_u.push(e);
            row_d_u.push(d);
        }
        let mut row_e_v = Vec::with_capacity(lam_v.len());
        let mut row_d_v = Vec::with_capacity(lam_v.len());
        for (k, &lam) in lam_v.iter().enumerate() {
            let (e, d) =
                self.decay_and_increment(lam, t_pow, t_prev_pow, gamma_1p, &self.e1_v[j - 1], k)?;
            row_e_v.push(e);
            row_d_v.push(d);
        }
        self.e1_u.push(row_e_u);
        self.delta_u.push(row_d_u);
        self.e1_v.push(row_e_v);
        self.delta_v.push(row_d_v);
        Ok(())
    }

    fn decay_and_increment(
        &self,
        lam: f64,
        t_pow: f64,
        t_prev_pow: f64,
        gamma_1p: f64,
        prev_row: &[f64],
        k: usize,
    ) -> Result<(f64, f64), SolverError> {
        if lam == 0.0 {
            // zero mode integrates the forcing directly
            return Ok((1.0, (t_pow - t_prev_pow) / gamma_1p));
        }
        let e = if self.rho == 1.0 {
            (-lam * t_pow).exp()
        } else {
            mittag_leffler_with(self.rho, 1.0, -lam * t_pow, &self.policy)?
        };
        let d = (prev_row[k] - e) / lam;
        Ok((e, d))
    }

    fn step(
        &mut self,
        state: &mut SolverState,
        ctx: &SchemeContext,
    ) -> Result<StepOutcome, SolverError> {
        let n = state.step;
        let n_modes = state.u.len();

        match ctx.reaction_coefficients(state)? {
            Some((f, g)) => {
                self.r_u.push(f);
                self.r_v.push(g);
            }
            None => {
                self.r_u.push(vec![0.0; n_modes]);
                self.r_v.push(vec![0.0; n_modes]);
            }
        }

        self.extend_tables(n + 1, &ctx.lam_u, &ctx.lam_v)?;
        self.ml_evals += 2 * n_modes as u64;

        let mut new_u = vec![0.0; n_modes];
        let mut new_v = vec![0.0; n_modes];
        for k in 0..n_modes {
            new_u[k] = self.e1_u[n + 1][k] * self.w0_u[k];
            new_v[k] = self.e1_v[n + 1][k] * self.w0_v[k];
        }
        for m in 0..=n {
            let lag = n + 1 - m;
            let du = &self.delta_u[lag];
            let dv = &self.delta_v[lag];
            let ru = &self.r_u[m];
            let rv = &self.r_v[m];
            for k in 0..n_modes {
                new_u[k] += du[k] * ru[k];
                new_v[k] += dv[k] * rv[k];
            }
        }
        self.history_ops += 2 * ((n + 1) * n_modes) as u64;

        state.u = Field::from_spectral(new_u)
            .map_err(|e| SolverError::InvalidInitialData(e.to_string()))?;
        state.v = Field::from_spectral(new_v)
            .map_err(|e| SolverError::InvalidInitialData(e.to_string()))?;
        let min_u = ctx.clamp_and_sync(&mut state.u);
        let min_v = ctx.clamp_and_sync(&mut state.v);
        state.step += 1;
        state.t = state.step as f64 * self.dt;
        Ok(StepOutcome { min_u, min_v })
    }
}

enum AnyStepper {
    L1(L1ImexStepper),
    Mild(MlMildStepper),
}

impl AnyStepper {
    fn step(
        &mut self,
        state: &mut SolverState,
        ctx: &SchemeContext,
    ) -> Result<StepOutcome, SolverError> {
        match self {
            AnyStepper::L1(s) => s.step(state, ctx),
            AnyStepper::Mild(s) => s.step(state, ctx),
        }
    }

    fn counters(&self) -> (u64, u64) {
        match self {
            AnyStepper::L1(s) => (s.history_ops, 0),
            AnyStepper::Mild(s) => (s.history_ops, s.ml_evals),
        }
    }
}

/// Run the configured scheme from `(u0, v0)` to `t_end` or until the
/// blow-up detector fires, returning the trajectory of diagnostics.
pub fn simulate(
    u0: Field,
    v0: Field,
    dom: &Domain1D,
    dp: &DiffusionParams,
    kp: &KineticParams,
    cfg: &SolverConfig,
) -> Result<Trajectory, SolverError> {
    cfg.validate()?;
    let basis = SpectralBasis::new(dom);
    let n = dom.n_modes();
    if u0.len() != n || v0.len() != n {
        return Err(SolverError::InvalidInitialData(format!(
            "field length must match n_modes = {n}"
        )));
    }

    let mut u0 = u0;
    let mut v0 = v0;
    let lambda = validate_initial(&mut u0, &mut v0, &basis, cfg)?;
    if cfg.blowup_threshold <= lambda {
        return Err(SolverError::InvalidConfig(format!(
            "blowup_threshold {} must exceed the initial bound {lambda}",
            cfg.blowup_threshold
        )));
    }

    let regime = classify_regime(kp, dp);
    let weights = match regime.tag {
        Some(crate::reactions::RegimeTag::I) | Some(crate::reactions::RegimeTag::II) => {
            Some(lyapunov_weights(&regime, cfg.lyapunov_p)?)
        }
        _ => None,
    };

    let mut state = SolverState {
        step: 0,
        t: 0.0,
        u: u0,
        v: v0,
    };
    let ctx = SchemeContext::new(&basis, dp, kp);
    let mut stepper = match cfg.scheme {
        Scheme::L1Imex => AnyStepper::L1(L1ImexStepper::new(dp, cfg, &mut state, &basis)),
        Scheme::MlMild => AnyStepper::Mild(MlMildStepper::new(dp, cfg, &mut state, &basis)),
    };

    let n_steps = (cfg.t_end / cfg.dt).round() as usize;
    let n_steps = n_steps.max(1);

    let mut rows = Vec::with_capacity(n_steps + 1);
    let mut snapshots = Vec::new();
    rows.push(diagnostics_row(&mut state, &basis, &weights, 0.0, 0.0));
    maybe_snapshot(&mut snapshots, &mut state, &basis, cfg, 0);

    let mut termination = Termination::Completed;
    for _ in 0..n_steps {
        let outcome = match stepper.step(&mut state, &ctx) {
            Ok(o) => o,
            Err(SolverError::SpecFun(e)) => return Err(SolverError::SpecFun(e)),
            Err(_) => {
                termination = Termination::SchemeFailure;
                break;
            }
        };
        let row = diagnostics_row(&mut state, &basis, &weights, outcome.min_u, outcome.min_v);
        let finite = row.linf_u.is_finite() && row.linf_v.is_finite();
        rows.push(row);
        let step_now = state.step;
        maybe_snapshot(&mut snapshots, &mut state, &basis, cfg, step_now);
        if !finite {
            termination = Termination::SchemeFailure;
            break;
        }
        let sup = row.linf_u.max(row.linf_v);
        if sup > cfg.blowup_threshold {
            termination = Termination::BlowupDetected;
            break;
        }
        if rows.len() > 11 {
            let past = &rows[rows.len() - 11];
            let past_sup = past.linf_u.max(past.linf_v);
            if past_sup > 0.0 && sup > 10.0 * past_sup {
                termination = Termination::BlowupDetected;
                break;
            }
        }
    }

    let (history_ops, ml_evals) = stepper.counters();
    Ok(Trajectory {
        rows,
        snapshots,
        termination,
        t_max_lower_bound: state.t,
        domain_length: dom.length(),
        n_modes: n,
        boundary: dom.boundary(),
        dt: cfg.dt,
        rho: dp.rho,
        lambda_bound: lambda,
        regime,
        weights,
        history_ops,
        ml_evals,
    })
}

fn validate_initial(
    u0: &mut Field,
    v0: &mut Field,
    basis: &SpectralBasis,
    cfg: &SolverConfig,
) -> Result<f64, SolverError> {
    let mut lambda = 0.0f64;
    for (name, field) in [("u0", &mut *u0), ("v0", &mut *v0)] {
        let nodal = field.nodal_mut(basis);
        let mut all_zero = true;
        for v in nodal.iter_mut() {
            if !v.is_finite() {
                return Err(SolverError::InvalidInitialData(format!(
                    "{name} contains a non-finite value"
                )));
            }
            if *v < -cfg.clamp_tol {
                return Err(SolverError::InvalidInitialData(format!(
                    "{name} has a negative value {v} beyond the clamp tolerance"
                )));
            }
            if *v < 0.0 {
                *v = 0.0;
            }
            if *v > 0.0 {
                all_zero = false;
            }
        }
        if all_zero {
            return Err(SolverError::InvalidInitialData(format!(
                "{name} is identically zero"
            )));
        }
        lambda = lambda.max(linf_norm(nodal));
    }
    Ok(lambda)
}

fn diagnostics_row(
    state: &mut SolverState,
    basis: &SpectralBasis,
    weights: &Option<LyapunovWeights>,
    min_u: f64,
    min_v: f64,
) -> DiagnosticsRow {
    let t = state.t;
    let lyap = weights.map(|w| {
        let u = state.u.nodal(basis).to_vec();
        let v = state.v.nodal(basis);
        basis.domain().h()
            * u.iter()
                .zip(v.iter())
                .map(|(&ui, &vi)| w.delta1 * ui.powf(w.p) + w.delta2 * vi.powf(w.q))
                .sum::<f64>()
    });
    let u = state.u.nodal(basis).to_vec();
    let v = state.v.nodal(basis).to_vec();
    DiagnosticsRow {
        t,
        linf_u: linf_norm(&u),
        linf_v: linf_norm(&v),
        l2_u: basis.l2_norm(&u),
        l2_v: basis.l2_norm(&v),
        mass_u: basis.integrate(&u),
        mass_v: basis.integrate(&v),
        lyapunov: lyap,
        min_u,
        min_v,
    }
}

fn maybe_snapshot(
    snapshots: &mut Vec<Snapshot>,
    state: &mut SolverState,
    basis: &SpectralBasis,
    cfg: &SolverConfig,
    step: usize,
) {
    if cfg.snapshot_stride > 0 && step.is_multiple_of(cfg.snapshot_stride) {
        let u = state.u.nodal(basis).to_vec();
        let v = state.v.nodal(basis).to_vec();
        snapshots.push(Snapshot { t: state.t, u, v });
    }
}

/// Linear single-mode benchmark problem for convergence studies: one
/// Dirichlet eigenmode decaying under pure fractional diffusion, with the
/// closed-form reference `w0 E_{rho,1}(-d mu_k^sigma t^rho)`.
#[derive(Clone, Copy, Debug)]
pub struct SingleModeProblem {
    pub length: f64,
    pub n_modes: usize,
    pub mode_k: usize,
    pub d: f64,
    pub sigma: f64,
    pub rho: f64,
}

#[derive(Clone, Debug)]
pub struct ConvergenceStudy {
    pub dts: Vec<f64>,
    pub errors: Vec<f64>,
    /// Least-squares slope of log error against log dt; `None` when the
    /// errors sit at the special-function tolerance floor.
    pub observed_order: Option<f64>,
}

pub fn convergence_study(
    problem: &SingleModeProblem,
    scheme: Scheme,
    dts: &[f64],
    t_end: f64,
) -> Result<ConvergenceStudy, SolverError> {
    if dts.len() < 3 {
        return Err(SolverError::InvalidConfig(
            "need at least 3 dt values".into(),
        ));
    }
    for w in dts.windows(2) {
        if (w[1] - 0.5 * w[0]).abs() > 1e-12 * w[0] {
            return Err(SolverError::InvalidConfig(
                "dt values must halve at each refinement".into(),
            ));
        }
    }
    let dom = Domain1D::dirichlet(problem.length, problem.n_modes)?;
    let basis = SpectralBasis::new(&dom);
    let mu = basis.eigenvalues()[problem.mode_k - 1];
    let lam = problem.d * mu.powf(problem.sigma);
    let exact = if problem.rho == 1.0 {
        (-lam * t_end).exp()
    } else {
        mittag_leffler_with(
            problem.rho,
            1.0,
            -lam * t_end.powf(problem.rho),
            &PrecisionPolicy::default(),
        )?
    };

    let dp = DiffusionParams::new(
        problem.d,
        problem.d,
        problem.sigma,
        problem.sigma,
        problem.rho,
    )?;
    let kp = KineticParams::new(1.0, 1.0, 1.0, 1.0, 1.0, 1.0)?; // zero net reaction
    let nodes = dom.nodes();
    let l = dom.length();
    let profile: Vec<f64> = nodes
        .iter()
        .map(|&x| (problem.mode_k as f64 * std::f64::consts::PI * x / l).sin())
        .collect();

    let mut errors = Vec::with_capacity(dts.len());
    for &dt in dts {
        let cfg = SolverConfig {
            dt,
            t_end,
            scheme,
            ..SolverConfig::default()
        };
        cfg.validate()?;
        let mut state = SolverState {
            step: 0,
            t: 0.0,
            u: Field::from_nodal(profile.clone())?,
            v: Field::zeros(problem.n_modes),
        };
        let ctx = SchemeContext::new(&basis, &dp, &kp);
        let n_steps = (t_end / dt).round() as usize;
        let mut stepper = match scheme {
            Scheme::L1Imex => AnyStepper::L1(L1ImexStepper::new(&dp, &cfg, &mut state, &basis)),
            Scheme::MlMild => AnyStepper::Mild(MlMildStepper::new(&dp, &cfg, &mut state, &basis)),
        };
        for _ in 0..n_steps {
            stepper.step(&mut state, &ctx)?;
        }
        let w = state.u.spectral(&basis)[problem.mode_k - 1];
        let w_exact = exact * (l / 2.0).sqrt();
        errors.push(((w - w_exact) / w_exact).abs());
    }

    let floor = 1e-9;
    let observed_order = if errors.iter().all(|e| *e < floor) {
        None
    } else {
        // least squares on (ln dt, ln err)
        let n = dts.len() as f64;
        let xs: Vec<f64> = dts.iter().map(|d| d.ln()).collect();
        let ys: Vec<f64> = errors.iter().map(|e| e.max(1e-300).ln()).collect();
        let sx: f64 = xs.iter().sum();
        let sy: f64 = ys.iter().sum();
        let sxx: f64 = xs.iter().map(|x| x * x).sum();
        let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| x * y).sum();
        Some((n * sxy - sx * sy) / (n * sxx - sx * sx))
    };

    Ok(ConvergenceStudy {
        dts: dts.to_vec(),
        errors,
        observed_order,
    })
}
