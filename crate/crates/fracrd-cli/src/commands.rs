//! The four subcommands. Contract lines (regime classification, termination
//! status, and one `wrote <path>` line per emitted file) always go to
//! standard output; everything else respects `FRACRD_LOG`.

use std::path::Path;

use fracrd::reactions::{classify_regime, linf_bounds, RegimeTag};
use fracrd::stepper::{convergence_study, simulate, SingleModeProblem, Termination, Trajectory};
use fracrd::verify::{run_suite, SuiteConfig};

use crate::config::{
    apply_override, parse_with_path, ConvergeSpec, InitialProfile, RunSpec, SweepSpec,
};
use crate::outputs::{diagnostics_csv, fmt_f64, snapshot_csv, trajectory_svg, FileSink};
use crate::{log, CliError};

fn read_config(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("reading {}: {e}", path.display())))
}

fn override_profile_seed(profile: &mut InitialProfile, seed: u64) {
    if let InitialProfile::Random { seed: s, .. } = profile {
        *s = seed;
    }
}

/// Run one simulation and write its artifacts. Exit code 0 when the run
/// completed, 2 when the blow-up detector fired.
pub fn cmd_simulate(
    config: &Path,
    out: &Path,
    seed: Option<u64>,
    plot: bool,
) -> Result<u8, CliError> {
    let mut spec: RunSpec = parse_with_path(&read_config(config)?)?;
    if let Some(s) = seed {
        override_profile_seed(&mut spec.initial_u, s);
        override_profile_seed(&mut spec.initial_v, s.wrapping_add(1));
    }
    let mut sink = FileSink::new();
    let traj = run_spec(&spec, out, plot, &mut sink)?;

    print_classification(&traj);
    print_termination(&traj);
    for p in sink.emitted() {
        println!("wrote {}", p.display());
    }
    Ok(match traj.termination {
        Termination::Completed => 0,
        Termination::BlowupDetected => 2,
        Termination::SchemeFailure => 1,
    })
}

fn run_spec(
    spec: &RunSpec,
    out: &Path,
    plot_flag: bool,
    sink: &mut FileSink,
) -> Result<Trajectory, CliError> {
    let dom = spec.build_domain()?;
    let kp = spec.build_kinetics()?;
    let dp = spec.build_diffusion()?;
    let cfg = spec.build_solver()?;
    let (u0, v0) = spec.build_initial(&dom)?;

    log::debug(&format!(
        "running {:?} scheme to t = {} with dt = {}",
        cfg.scheme, cfg.t_end, cfg.dt
    ));
    let traj = simulate(u0, v0, &dom, &dp, &kp, &cfg).map_err(|e| CliError::Run(e.to_string()))?;

    let csv_name = spec
        .output
        .csv
        .clone()
        .unwrap_or_else(|| "diagnostics.csv".into());
    sink.write(&out.join(&csv_name), &diagnostics_csv(&traj))?;

    if cfg.snapshot_stride > 0 {
        let xs = dom.nodes();
        for (i, snap) in traj.snapshots.iter().enumerate() {
            let name = format!("snapshot_{i:04}.csv");
            sink.write(&out.join(name), &snapshot_csv(&xs, &snap.u, &snap.v))?;
        }
    }
    if plot_flag || spec.output.plot {
        sink.write(&out.join("diagnostics.svg"), &trajectory_svg(&traj))?;
    }
    Ok(traj)
}

fn print_classification(traj: &Trajectory) {
    let tag = traj
        .regime
        .tag
        .map(|t| t.to_string())
        .unwrap_or_else(|| "none".into());
    let all: Vec<String> = traj.regime.matches.iter().map(|t| t.to_string()).collect();
    println!("regime: {tag} (matching clauses: [{}])", all.join(", "));
    if let (Some(ah), Some(bh)) = (traj.regime.alpha_hat, traj.regime.beta_hat) {
        println!("regime gaps: alpha_hat = {ah}, beta_hat = {bh}");
    }
}

fn print_termination(traj: &Trajectory) {
    let status = match traj.termination {
        Termination::Completed => "completed",
        Termination::BlowupDetected => "blowup_detected",
        Termination::SchemeFailure => "scheme_failure",
    };
    println!(
        "termination: {status} at t = {} ({} steps, history_ops = {})",
        fmt_f64(traj.t_max_lower_bound),
        traj.rows.len() - 1,
        traj.history_ops
    );
}

/// Run the verification suite; exit 0 iff every check holds.
pub fn cmd_verify(config: &Path, out: &Path, seed: Option<u64>) -> Result<u8, CliError> {
    let mut cfg: SuiteConfig = parse_with_path(&read_config(config)?)?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    let report = run_suite(&cfg).map_err(|e| CliError::Run(e.to_string()))?;
    for r in &report.results {
        println!(
            "[{}] {} margin={:.3e} tol={:.1e} | {}",
            if r.holds { "PASS" } else { "FAIL" },
            r.name,
            r.margin,
            r.tolerance,
            r.context
        );
    }
    println!(
        "suite: {} passed, {} failed (seed {}, config {})",
        report.passed, report.failed, report.seed, report.config_digest
    );
    let json = serde_json::to_string_pretty(&report)
        .map_err(|e| CliError::Run(format!("serializing report: {e}")))?;
    let mut sink = FileSink::new();
    sink.write(&out.join("verification_report.json"), &json)?;
    for p in sink.emitted() {
        println!("wrote {}", p.display());
    }
    Ok(if report.all_hold() { 0 } else { 1 })
}

struct SweepRow {
    index: usize,
    values: Vec<f64>,
    regime: String,
    termination: &'static str,
    max_linf_u: f64,
    max_linf_v: f64,
    margin_u: Option<f64>,
    margin_v: Option<f64>,
    error: Option<String>,
}

/// Cartesian sweep of independent runs, one output directory per run,
/// one summary row per run.
pub fn cmd_sweep(
    config: &Path,
    out: &Path,
    workers: Option<usize>,
    seed: Option<u64>,
    plot: bool,
) -> Result<u8, CliError> {
    let spec: SweepSpec = parse_with_path(&read_config(config)?)?;
    let axes = &spec.grid.0;
    if axes.is_empty() {
        return Err(CliError::Config(
            "sweep grid must name at least one parameter".into(),
        ));
    }
    for (path, values) in axes {
        if values.is_empty() {
            return Err(CliError::Config(format!(
                "sweep axis `{path}` has no values"
            )));
        }
    }

    // cartesian product in row-major order of the axes as configured
    let mut combos: Vec<Vec<f64>> = vec![vec![]];
    for (_, values) in axes {
        let mut next = Vec::with_capacity(combos.len() * values.len());
        for c in &combos {
            for v in values {
                let mut c2 = c.clone();
                c2.push(*v);
                next.push(c2);
            }
        }
        combos = next;
    }
    log::info(&format!(
        "sweep: {} runs over {} axes",
        combos.len(),
        axes.len()
    ));

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Run(format!("building worker pool: {e}")))?;

    let results: Vec<SweepRow> = pool.install(|| {
        use rayon::prelude::*;
        combos
            .par_iter()
            .enumerate()
            .map(|(index, values)| {
                let mut combo_spec = spec.base.clone();
                for ((path, _), v) in axes.iter().zip(values) {
                    if let Err(e) = apply_override(&mut combo_spec, path, *v) {
                        return SweepRow {
                            index,
                            values: values.clone(),
                            regime: "-".into(),
                            termination: "error",
                            max_linf_u: f64::NAN,
                            max_linf_v: f64::NAN,
                            margin_u: None,
                            margin_v: None,
                            error: Some(e.to_string()),
                        };
                    }
                }
                if let Some(s) = seed {
                    override_profile_seed(&mut combo_spec.initial_u, s.wrapping_add(index as u64));
                    override_profile_seed(
                        &mut combo_spec.initial_v,
                        s.wrapping_add(index as u64).wrapping_add(1),
                    );
                }
                let run_dir = out.join(format!("run_{index:04}"));
                let mut sink = FileSink::new();
                match run_spec(&combo_spec, &run_dir, plot, &mut sink) {
                    Ok(traj) => {
                        let max_u = traj.rows.iter().fold(0.0f64, |m, r| m.max(r.linf_u));
                        let max_v = traj.rows.iter().fold(0.0f64, |m, r| m.max(r.linf_v));
                        let (margin_u, margin_v) = match (
                            traj.regime.tag,
                            combo_spec.build_kinetics(),
                            combo_spec.build_diffusion(),
                        ) {
                            (Some(RegimeTag::I) | Some(RegimeTag::II), Ok(kp), Ok(dp)) => {
                                let regime = classify_regime(&kp, &dp);
                                match linf_bounds(&regime, traj.lambda_bound) {
                                    Ok((lu, lv)) => {
                                        (Some((lu - max_u) / lu), Some((lv - max_v) / lv))
                                    }
                                    Err(_) => (None, None),
                                }
                            }
                            _ => (None, None),
                        };
                        SweepRow {
                            index,
                            values: values.clone(),
                            regime: traj
                                .regime
                                .tag
                                .map(|t| t.to_string())
                                .unwrap_or_else(|| "none".into()),
                            termination: match traj.termination {
                                Termination::Completed => "completed",
                                Termination::BlowupDetected => "blowup_detected",
                                Termination::SchemeFailure => "scheme_failure",
                            },
                            max_linf_u: max_u,
                            max_linf_v: max_v,
                            margin_u,
                            margin_v,
                            error: None,
                        }
                    }
                    Err(e) => SweepRow {
                        index,
                        values: values.clone(),
                        regime: "-".into(),
                        termination: "error",
                        max_linf_u: f64::NAN,
                        max_linf_v: f64::NAN,
                        margin_u: None,
                        margin_v: None,
                        error: Some(e.to_string()),
                    },
                }
            })
            .collect()
    });

    // summary rows in run order regardless of completion order
    let mut csv = String::from("run,");
    for (path, _) in axes {
        csv.push_str(path);
        csv.push(',');
    }
    csv.push_str("regime,termination,max_linf_u,max_linf_v,bound_margin_u,bound_margin_v\n");
    let mut any_error = false;
    for row in &results {
        if let Some(e) = &row.error {
            any_error = true;
            log::error(&format!("run {}: {e}", row.index));
        }
        csv.push_str(&format!("{},", row.index));
        for v in &row.values {
            csv.push_str(&fmt_f64(*v));
            csv.push(',');
        }
        csv.push_str(&format!(
            "{},{},{},{},{},{}\n",
            row.regime,
            row.termination,
            fmt_f64(row.max_linf_u),
            fmt_f64(row.max_linf_v),
            row.margin_u.map(fmt_f64).unwrap_or_default(),
            row.margin_v.map(fmt_f64).unwrap_or_default(),
        ));
    }
    let mut sink = FileSink::new();
    sink.write(&out.join("summary.csv"), &csv)?;
    for p in sink.emitted() {
        println!("wrote {}", p.display());
    }
    Ok(if any_error { 1 } else { 0 })
}

/// Convergence study on the linear single-mode benchmark.
pub fn cmd_converge(config: &Path, out: &Path) -> Result<u8, CliError> {
    let spec: ConvergeSpec = parse_with_path(&read_config(config)?)?;
    if spec.levels < 3 {
        return Err(CliError::Config("levels must be at least 3".into()));
    }
    let problem = SingleModeProblem {
        length: spec.length,
        n_modes: spec.n_modes,
        mode_k: spec.mode_k,
        d: spec.d,
        sigma: spec.sigma,
        rho: spec.rho,
    };
    let dts: Vec<f64> = (0..spec.levels)
        .map(|i| spec.dt_start / 2f64.powi(i as i32))
        .collect();
    let study = convergence_study(&problem, spec.scheme, &dts, spec.t_end)
        .map_err(|e| CliError::Run(e.to_string()))?;

    let mut csv = String::from("dt,rel_error\n");
    for (dt, err) in study.dts.iter().zip(&study.errors) {
        println!("dt = {:10.3e}  rel_error = {:.6e}", dt, err);
        csv.push_str(&format!("{},{}\n", fmt_f64(*dt), fmt_f64(*err)));
    }
    match study.observed_order {
        Some(order) => println!("observed order: {order:.4}"),
        None => println!("observed order: skipped (errors at the integrator tolerance floor)"),
    }
    let mut sink = FileSink::new();
    sink.write(&out.join("convergence.csv"), &csv)?;
    for p in sink.emitted() {
        println!("wrote {}", p.display());
    }
    Ok(0)
}
