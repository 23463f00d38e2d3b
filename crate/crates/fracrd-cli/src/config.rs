//! Configuration schema: a single JSON document per run, numbers parsed as
//! 64-bit floats, schema violations reported with their field path.

use serde::{Deserialize, Serialize};

use fracrd::operators::{BoundaryKind, Domain1D, Field};
use fracrd::reactions::{DiffusionParams, KineticParams};
use fracrd::stepper::{Scheme, SolverConfig};

use crate::CliError;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainSpec {
    pub length: f64,
    pub n_modes: usize,
    pub boundary: BoundaryKind,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KineticsSpec {
    pub alpha1: f64,
    pub alpha2: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub k_f: f64,
    pub k_b: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiffusionSpec {
    pub d_u: f64,
    pub d_v: f64,
    pub sigma1: f64,
    pub sigma2: f64,
    pub rho: f64,
}

/// Named initial profiles. All of them are nonnegative by construction
/// except `single_mode`, which is intended for linear studies.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "profile", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialProfile {
    /// `amplitude * sin(k pi x / L)` (Dirichlet) or `amplitude * cos(k pi x / L)`
    /// (Neumann).
    SingleMode {
        k: usize,
        #[serde(default = "one")]
        amplitude: f64,
    },
    /// Raised cosine of the given width centered at `center`, zero outside.
    Bump {
        center: f64,
        width: f64,
        height: f64,
    },
    Constant {
        c: f64,
    },
    /// Square of a band-limited random field, rescaled to sup = `lambda`.
    Random {
        seed: u64,
        lambda: f64,
    },
}

fn one() -> f64 {
    1.0
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSpec {
    pub scheme: Scheme,
    pub dt: f64,
    pub t_end: f64,
    #[serde(default)]
    pub snapshot_stride: usize,
    #[serde(default = "default_blowup")]
    pub blowup_threshold: f64,
    #[serde(default = "default_clamp")]
    pub clamp_tol: f64,
    #[serde(default = "default_lyapunov_p")]
    pub lyapunov_p: f64,
}

fn default_blowup() -> f64 {
    1e8
}

fn default_clamp() -> f64 {
    1e-12
}

fn default_lyapunov_p() -> f64 {
    2.0
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSpec {
    pub csv: Option<String>,
    pub plot: bool,
}

/// One simulation run, fully specified.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSpec {
    pub domain: DomainSpec,
    pub kinetics: KineticsSpec,
    pub diffusion: DiffusionSpec,
    pub initial_u: InitialProfile,
    pub initial_v: InitialProfile,
    pub solver: SolverSpec,
    #[serde(default)]
    pub output: OutputSpec,
}

/// Parse a JSON document into `T`, reporting the JSON path on failure.
pub fn parse_with_path<T: serde::de::DeserializeOwned>(text: &str) -> Result<T, CliError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de)
        .map_err(|e| CliError::Config(format!("config error at `{}`: {}", e.path(), e.inner())))
}

impl RunSpec {
    pub fn build_domain(&self) -> Result<Domain1D, CliError> {
        Domain1D::new(
            self.domain.length,
            self.domain.n_modes,
            self.domain.boundary,
        )
        .map_err(|e| CliError::Config(format!("domain: {e}")))
    }

    pub fn build_kinetics(&self) -> Result<KineticParams, CliError> {
        let k = &self.kinetics;
        KineticParams::new(k.alpha1, k.alpha2, k.beta1, k.beta2, k.k_f, k.k_b)
            .map_err(|e| CliError::Config(prefix_kinetics(&e.to_string())))
    }

    pub fn build_diffusion(&self) -> Result<DiffusionParams, CliError> {
        let d = &self.diffusion;
        DiffusionParams::new(d.d_u, d.d_v, d.sigma1, d.sigma2, d.rho)
            .map_err(|e| CliError::Config(format!("diffusion: {e}")))
    }

    pub fn build_solver(&self) -> Result<SolverConfig, CliError> {
        let s = &self.solver;
        let cfg = SolverConfig {
            dt: s.dt,
            t_end: s.t_end,
            scheme: s.scheme,
            blowup_threshold: s.blowup_threshold,
            snapshot_stride: s.snapshot_stride,
            clamp_tol: s.clamp_tol,
            lyapunov_p: s.lyapunov_p,
        };
        cfg.validate()
            .map_err(|e| CliError::Config(format!("solver: {e}")))?;
        Ok(cfg)
    }

    pub fn build_initial(&self, dom: &Domain1D) -> Result<(Field, Field), CliError> {
        let u = profile_values(&self.initial_u, dom)
            .map_err(|m| CliError::Config(format!("initial_u: {m}")))?;
        let v = profile_values(&self.initial_v, dom)
            .map_err(|m| CliError::Config(format!("initial_v: {m}")))?;
        let fu = Field::from_nodal(u).map_err(|e| CliError::Config(format!("initial_u: {e}")))?;
        let fv = Field::from_nodal(v).map_err(|e| CliError::Config(format!("initial_v: {e}")))?;
        Ok((fu, fv))
    }
}

/// `kinetics.alpha1 must be ...` style paths from the library's messages.
fn prefix_kinetics(msg: &str) -> String {
    let msg = msg.trim_start_matches("kinetics: ");
    format!("kinetics.{msg}")
}

pub fn profile_values(profile: &InitialProfile, dom: &Domain1D) -> Result<Vec<f64>, String> {
    let l = dom.length();
    let nodes = dom.nodes();
    match profile {
        InitialProfile::SingleMode { k, amplitude } => {
            if *k == 0 || *k > dom.n_modes() {
                return Err(format!(
                    "mode index k = {k} out of range 1..={}",
                    dom.n_modes()
                ));
            }
            let kf = *k as f64;
            Ok(nodes
                .iter()
                .map(|&x| {
                    let arg = kf * std::f64::consts::PI * x / l;
                    amplitude
                        * match dom.boundary() {
                            BoundaryKind::Dirichlet => arg.sin(),
                            BoundaryKind::Neumann => arg.cos(),
                        }
                })
                .collect())
        }
        InitialProfile::Bump {
            center,
            width,
            height,
        } => {
            if width.is_nan() || *width <= 0.0 {
                return Err("bump width must be positive".into());
            }
            if height.is_nan() || *height <= 0.0 {
                return Err("bump height must be positive".into());
            }
            Ok(nodes
                .iter()
                .map(|&x| {
                    let r = (x - center) / width;
                    if r.abs() <= 0.5 {
                        height * 0.5 * (1.0 + (2.0 * std::f64::consts::PI * r).cos())
                    } else {
                        0.0
                    }
                })
                .collect())
        }
        InitialProfile::Constant { c } => {
            if c.is_nan() || *c <= 0.0 {
                return Err(
                    "constant profile must be positive (initial data must not vanish)".into(),
                );
            }
            Ok(vec![*c; dom.n_modes()])
        }
        InitialProfile::Random { seed, lambda } => {
            if lambda.is_nan() || *lambda <= 0.0 {
                return Err("random profile needs lambda > 0".into());
            }
            Ok(fracrd::verify::random_smooth_nonneg_seeded(
                dom, *seed, *lambda,
            ))
        }
    }
}

/// Sweep over a cartesian grid of parameter values applied onto a base run.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub base: RunSpec,
    /// Dotted parameter path to the list of values, e.g.
    /// `"diffusion.rho": [0.4, 0.7, 1.0]`.
    pub grid: indexmap_compat::OrderedMap,
}

/// Minimal insertion-ordered map so sweep axes keep their config order.
pub mod indexmap_compat {
    use serde::de::{MapAccess, Visitor};
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Clone, Debug, Default)]
    pub struct OrderedMap(pub Vec<(String, Vec<f64>)>);

    impl Serialize for OrderedMap {
        fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
            use serde::ser::SerializeMap;
            let mut m = serializer.serialize_map(Some(self.0.len()))?;
            for (k, v) in &self.0 {
                m.serialize_entry(k, v)?;
            }
            m.end()
        }
    }

    impl<'de> Deserialize<'de> for OrderedMap {
        fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
            struct V;
            impl<'de> Visitor<'de> for V {
                type Value = OrderedMap;
                fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
                    f.write_str("a map of parameter path to list of values")
                }
                fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> Result<Self::Value, A::Error> {
                    let mut out = Vec::new();
                    while let Some((k, v)) = map.next_entry::<String, Vec<f64>>()? {
                        out.push((k, v));
                    }
                    Ok(OrderedMap(out))
                }
            }
            deserializer.deserialize_map(V)
        }
    }
}

/// Apply one `path = value` override onto a run spec.
pub fn apply_override(spec: &mut RunSpec, path: &str, value: f64) -> Result<(), CliError> {
    let target: &mut f64 = match path {
        "kinetics.alpha1" => &mut spec.kinetics.alpha1,
        "kinetics.alpha2" => &mut spec.kinetics.alpha2,
        "kinetics.beta1" => &mut spec.kinetics.beta1,
        "kinetics.beta2" => &mut spec.kinetics.beta2,
        "kinetics.k_f" => &mut spec.kinetics.k_f,
        "kinetics.k_b" => &mut spec.kinetics.k_b,
        "diffusion.d_u" => &mut spec.diffusion.d_u,
        "diffusion.d_v" => &mut spec.diffusion.d_v,
        "diffusion.sigma1" => &mut spec.diffusion.sigma1,
        "diffusion.sigma2" => &mut spec.diffusion.sigma2,
        "diffusion.rho" => &mut spec.diffusion.rho,
        "solver.dt" => &mut spec.solver.dt,
        "solver.t_end" => &mut spec.solver.t_end,
        "domain.length" => &mut spec.domain.length,
        _ => {
            return Err(CliError::Config(format!(
                "sweep grid parameter `{path}` is not sweepable"
            )))
        }
    };
    *target = value;
    Ok(())
}

/// Convergence-study configuration.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvergeSpec {
    pub length: f64,
    pub n_modes: usize,
    pub mode_k: usize,
    pub d: f64,
    pub sigma: f64,
    pub rho: f64,
    pub scheme: Scheme,
    pub dt_start: f64,
    pub levels: usize,
    pub t_end: f64,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal_json() -> String {
        r#"{
            "domain": {"length": 1.0, "n_modes": 16, "boundary": "dirichlet"},
            "kinetics": {"alpha1": 1, "alpha2": 2, "beta1": 3, "beta2": 1, "k_f": 1, "k_b": 1},
            "diffusion": {"d_u": 0.1, "d_v": 0.1, "sigma1": 0.4, "sigma2": 0.8, "rho": 0.7},
            "initial_u": {"profile": "bump", "center": 0.5, "width": 1.0, "height": 1.0},
            "initial_v": {"profile": "constant", "c": 0.5},
            "solver": {"scheme": "l1_imex", "dt": 0.01, "t_end": 0.1}
        }"#
        .to_string()
    }

    #[test]
    fn parses_and_builds() {
        let spec: RunSpec = parse_with_path(&minimal_json()).unwrap();
        let dom = spec.build_domain().unwrap();
        spec.build_kinetics().unwrap();
        spec.build_diffusion().unwrap();
        spec.build_solver().unwrap();
        let (u, v) = spec.build_initial(&dom).unwrap();
        assert_eq!(u.len(), 16);
        assert_eq!(v.len(), 16);
    }

    #[test]
    fn negative_alpha_names_the_field() {
        let bad = minimal_json().replace(r#""alpha1": 1"#, r#""alpha1": -1"#);
        let spec: RunSpec = parse_with_path(&bad).unwrap();
        let err = spec.build_kinetics().unwrap_err();
        let msg = format!("{err}");
        assert!(msg.contains("kinetics.alpha1"), "message: {msg}");
    }

    #[test]
    fn unknown_key_reports_path() {
        let bad = minimal_json().replace(r#""d_u": 0.1"#, r#""du": 0.1"#);
        let err = parse_with_path::<RunSpec>(&bad).unwrap_err();
        let msg = format!("{err}");
        assert!(msg.contains("diffusion"), "message: {msg}");
    }

    #[test]
    fn bump_matches_raised_cosine_identity() {
        // center L/2, width L reproduces (1 - cos 2 pi x / L) / 2
        let dom = Domain1D::dirichlet(2.0, 32).unwrap();
        let p = InitialProfile::Bump {
            center: 1.0,
            width: 2.0,
            height: 1.0,
        };
        let vals = profile_values(&p, &dom).unwrap();
        for (x, v) in dom.nodes().iter().zip(&vals) {
            let want = 0.5 * (1.0 - (std::f64::consts::PI * x).cos());
            assert!((v - want).abs() < 1e-12);
        }
    }

    #[test]
    fn random_profile_nonneg_and_bounded() {
        let dom = Domain1D::neumann(1.0, 64).unwrap();
        let p = InitialProfile::Random {
            seed: 7,
            lambda: 2.0,
        };
        let vals = profile_values(&p, &dom).unwrap();
        assert!(vals.iter().all(|&v| v >= 0.0));
        let max = vals.iter().cloned().fold(0.0f64, f64::max);
        assert!((max - 2.0).abs() < 1e-12);
    }

    #[test]
    fn sweep_override_paths() {
        let mut spec: RunSpec = parse_with_path(&minimal_json()).unwrap();
        apply_override(&mut spec, "diffusion.rho", 0.5).unwrap();
        assert_eq!(spec.diffusion.rho, 0.5);
        assert!(apply_override(&mut spec, "nope.nope", 1.0).is_err());
    }
}
