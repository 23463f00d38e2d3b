//! Interval geometry, eigenbasis transforms, and the fractional Laplacians.
//!
//! The spectral fractional Laplacian acts diagonally on the eigenbasis of
//! the classical Dirichlet/Neumann Laplacian with multipliers `mu_k^sigma`;
//! the Riesz form is discretized by fractional centered differences with the
//! field extended by zero outside the interval.

mod riesz;
mod transforms;

pub use riesz::{apply_riesz_flaplacian, riesz_weights};

use transforms::{CosineTransform, SineTransform};

#[derive(Debug, thiserror::Error)]
pub enum OperatorError {
    #[error("domain: {0}")]
    InvalidDomain(String),
    #[error("fractional order must lie in (0,1), got {0}")]
    OrderOutOfRange(f64),
    #[error("field: {0}")]
    InvalidField(String),
    #[error("{0}")]
    IncompatibleBoundary(String),
}

/// Homogeneous boundary condition kind; `lambda = 1` is Dirichlet,
/// `lambda = 0` is Neumann.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryKind {
    Dirichlet,
    Neumann,
}

impl BoundaryKind {
    pub fn lambda(self) -> u8 {
        match self {
            BoundaryKind::Dirichlet => 1,
            BoundaryKind::Neumann => 0,
        }
    }
}

/// Exterior marker: the spectral form couples to the topological boundary,
/// the Riesz form to the complement of the interval in the real line.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Exterior {
    #[default]
    Boundary,
    Complement,
}

/// Interval `(0, L)` with a uniform interior grid of `n_modes` points.
///
/// Dirichlet excludes the endpoints (`x_j = j L/(n+1)`, values pinned to
/// zero there); Neumann uses half-offset nodes (`x_j = (j+1/2) L/n`). Both
/// choices make the discrete transforms exactly orthogonal.
#[derive(Clone, Copy, Debug)]
pub struct Domain1D {
    length: f64,
    n_modes: usize,
    boundary: BoundaryKind,
    exterior: Exterior,
}

impl Domain1D {
    pub fn new(length: f64, n_modes: usize, boundary: BoundaryKind) -> Result<Self, OperatorError> {
        if !length.is_finite() || length <= 0.0 {
            return Err(OperatorError::InvalidDomain(format!(
                "length must be positive and finite, got {length}"
            )));
        }
        if n_modes < 4 {
            return Err(OperatorError::InvalidDomain(format!(
                "n_modes must be at least 4, got {n_modes}"
            )));
        }
        Ok(Self {
            length,
            n_modes,
            boundary,
            exterior: Exterior::Boundary,
        })
    }

    pub fn dirichlet(length: f64, n_modes: usize) -> Result<Self, OperatorError> {
        Self::new(length, n_modes, BoundaryKind::Dirichlet)
    }

    pub fn neumann(length: f64, n_modes: usize) -> Result<Self, OperatorError> {
        Self::new(length, n_modes, BoundaryKind::Neumann)
    }

    /// Dirichlet domain with the exterior-complement marker used by the
    /// Riesz operator (zero extension on the rest of the line).
    pub fn riesz(length: f64, n_modes: usize) -> Result<Self, OperatorError> {
        let mut d = Self::new(length, n_modes, BoundaryKind::Dirichlet)?;
        d.exterior = Exterior::Complement;
        Ok(d)
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn boundary(&self) -> BoundaryKind {
        self.boundary
    }

    pub fn exterior(&self) -> Exterior {
        self.exterior
    }

    /// Grid spacing.
    pub fn h(&self) -> f64 {
        match self.boundary {
            BoundaryKind::Dirichlet => self.length / (self.n_modes + 1) as f64,
            BoundaryKind::Neumann => self.length / self.n_modes as f64,
        }
    }

    /// Interior node coordinates.
    pub fn nodes(&self) -> Vec<f64> {
        let h = self.h();
        match self.boundary {
            BoundaryKind::Dirichlet => (1..=self.n_modes).map(|j| j as f64 * h).collect(),
            BoundaryKind::Neumann => (0..self.n_modes).map(|j| (j as f64 + 0.5) * h).collect(),
        }
    }

    /// Eigenvalues of the classical Laplacian on this domain, one per mode.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let l = self.length;
        match self.boundary {
            BoundaryKind::Dirichlet => (1..=self.n_modes)
                .map(|k| (k as f64 * std::f64::consts::PI / l).powi(2))
                .collect(),
            BoundaryKind::Neumann => (0..self.n_modes)
                .map(|k| (k as f64 * std::f64::consts::PI / l).powi(2))
                .collect(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Repr {
    NodalOnly,
    SpectralOnly,
    Both,
}

/// Concentration profile carrying paired nodal and eigenbasis
/// representations with a dirty flag for which one is current.
#[derive(Clone, Debug)]
pub struct Field {
    nodal: Vec<f64>,
    spectral: Vec<f64>,
    repr: Repr,
}

impl Field {
    pub fn from_nodal(values: Vec<f64>) -> Result<Self, OperatorError> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(OperatorError::InvalidField(
                "nodal values must be finite".into(),
            ));
        }
        let n = values.len();
        Ok(Self {
            nodal: values,
            spectral: vec![0.0; n],
            repr: Repr::NodalOnly,
        })
    }

    pub fn from_spectral(coeffs: Vec<f64>) -> Result<Self, OperatorError> {
        if coeffs.iter().any(|v| !v.is_finite()) {
            return Err(OperatorError::InvalidField(
                "spectral coefficients must be finite".into(),
            ));
        }
        let n = coeffs.len();
        Ok(Self {
            nodal: vec![0.0; n],
            spectral: coeffs,
            repr: Repr::SpectralOnly,
        })
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            nodal: vec![0.0; n],
            spectral: vec![0.0; n],
            repr: Repr::Both,
        }
    }

    pub fn len(&self) -> usize {
        self.nodal.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodal.is_empty()
    }

    /// Nodal view, transforming first if the spectral side is current.
    pub fn nodal<'a>(&'a mut self, basis: &SpectralBasis) -> &'a [f64] {
        if self.repr == Repr::SpectralOnly {
            basis.synthesize(self);
        }
        &self.nodal
    }

    /// Spectral view, transforming first if the nodal side is current.
    pub fn spectral<'a>(&'a mut self, basis: &SpectralBasis) -> &'a [f64] {
        if self.repr == Repr::NodalOnly {
            basis.analyze(self);
        }
        &self.spectral
    }

    /// Replace nodal values, invalidating the spectral side.
    pub fn set_nodal(&mut self, values: Vec<f64>) {
        assert_eq!(values.len(), self.nodal.len());
        self.nodal = values;
        self.repr = Repr::NodalOnly;
    }

    /// Mutable nodal access, invalidating the spectral side.
    pub fn nodal_mut(&mut self, basis: &SpectralBasis) -> &mut Vec<f64> {
        if self.repr == Repr::SpectralOnly {
            basis.synthesize(self);
        }
        self.repr = Repr::NodalOnly;
        &mut self.nodal
    }
}

/// Eigenbasis of the interval plus the fast transforms tied to its grid.
/// Immutable after construction and safe to share across threads.
pub struct SpectralBasis {
    domain: Domain1D,
    eigenvalues: Vec<f64>,
    sine: Option<SineTransform>,
    cosine: Option<CosineTransform>,
}

impl SpectralBasis {
    pub fn new(domain: &Domain1D) -> Self {
        let (sine, cosine) = match domain.boundary() {
            BoundaryKind::Dirichlet => (Some(SineTransform::new(domain.n_modes())), None),
            BoundaryKind::Neumann => (None, Some(CosineTransform::new(domain.n_modes()))),
        };
        Self {
            domain: *domain,
            eigenvalues: domain.eigenvalues(),
            sine,
            cosine,
        }
    }

    pub fn domain(&self) -> &Domain1D {
        &self.domain
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Sampled orthonormal eigenfunctions paired with their eigenvalues.
    pub fn eigenpairs(&self) -> Vec<(f64, Vec<f64>)> {
        let l = self.domain.length();
        let nodes = self.domain.nodes();
        let n = self.domain.n_modes();
        match self.domain.boundary() {
            BoundaryKind::Dirichlet => (1..=n)
                .map(|k| {
                    let mu = (k as f64 * std::f64::consts::PI / l).powi(2);
                    let e: Vec<f64> = nodes
                        .iter()
                        .map(|&x| {
                            (2.0 / l).sqrt() * (k as f64 * std::f64::consts::PI * x / l).sin()
                        })
                        .collect();
                    (mu, e)
                })
                .collect(),
            BoundaryKind::Neumann => (0..n)
                .map(|k| {
                    let mu = (k as f64 * std::f64::consts::PI / l).powi(2);
                    let e: Vec<f64> = if k == 0 {
                        nodes.iter().map(|_| (1.0 / l).sqrt()).collect()
                    } else {
                        nodes
                            .iter()
                            .map(|&x| {
                                (2.0 / l).sqrt() * (k as f64 * std::f64::consts::PI * x / l).cos()
                            })
                            .collect()
                    };
                    (mu, e)
                })
                .collect(),
        }
    }

    /// Project nodal values onto the eigenbasis:
    /// `w_k = int u e_k dx` by the grid quadrature (exact for band-limited
    /// fields up to `n_modes`).
    pub fn analyze(&self, field: &mut Field) {
        assert_eq!(field.nodal.len(), self.domain.n_modes());
        let h = self.domain.h();
        let l = self.domain.length();
        match self.domain.boundary() {
            BoundaryKind::Dirichlet => {
                let scale = h * (2.0 / l).sqrt();
                self.sine
                    .as_ref()
                    .unwrap()
                    .apply(&field.nodal, &mut field.spectral);
                for w in field.spectral.iter_mut() {
                    *w *= scale;
                }
            }
            BoundaryKind::Neumann => {
                self.cosine
                    .as_ref()
                    .unwrap()
                    .dct2(&field.nodal, &mut field.spectral);
                let scale = h * (2.0 / l).sqrt();
                field.spectral[0] *= h * (1.0 / l).sqrt();
                for w in field.spectral.iter_mut().skip(1) {
                    *w *= scale;
                }
            }
        }
        field.repr = Repr::Both;
    }

    /// Evaluate the eigenbasis expansion back on the grid; exact inverse of
    /// [`SpectralBasis::analyze`].
    pub fn synthesize(&self, field: &mut Field) {
        assert_eq!(field.spectral.len(), self.domain.n_modes());
        let l = self.domain.length();
        match self.domain.boundary() {
            BoundaryKind::Dirichlet => {
                let scale = (2.0 / l).sqrt();
                self.sine
                    .as_ref()
                    .unwrap()
                    .apply(&field.spectral, &mut field.nodal);
                for u in field.nodal.iter_mut() {
                    *u *= scale;
                }
            }
            BoundaryKind::Neumann => {
                let mut a = field.spectral.clone();
                a[0] *= (1.0 / l).sqrt();
                let scale = (2.0 / l).sqrt();
                for v in a.iter_mut().skip(1) {
                    *v *= scale;
                }
                self.cosine.as_ref().unwrap().dct3(&a, &mut field.nodal);
            }
        }
        field.repr = Repr::Both;
    }

    /// Grid quadrature `h * sum` of a nodal profile (trapezoid on the
    /// Dirichlet grid where endpoint values vanish, midpoint on Neumann).
    pub fn integrate(&self, nodal: &[f64]) -> f64 {
        self.domain.h() * nodal.iter().sum::<f64>()
    }

    pub fn l2_norm(&self, nodal: &[f64]) -> f64 {
        (self.domain.h() * nodal.iter().map(|u| u * u).sum::<f64>()).sqrt()
    }
}

/// Sup norm of a nodal profile.
pub fn linf_norm(nodal: &[f64]) -> f64 {
    nodal.iter().fold(0.0f64, |m, &u| m.max(u.abs()))
}

/// Diagonal action `w_k -> d * mu_k^sigma * w_k` on the eigenbasis.
/// Multipliers are precomputed at construction; application is pure.
#[derive(Clone, Debug)]
pub struct SpectralOperator {
    d: f64,
    sigma: f64,
    multipliers: Vec<f64>,
}

impl SpectralOperator {
    pub fn new(d: f64, sigma: f64, basis: &SpectralBasis) -> Result<Self, OperatorError> {
        if sigma.is_nan() || sigma <= 0.0 || sigma >= 1.0 {
            return Err(OperatorError::OrderOutOfRange(sigma));
        }
        if !d.is_finite() || d <= 0.0 {
            return Err(OperatorError::InvalidDomain(format!(
                "diffusion coefficient must be positive, got {d}"
            )));
        }
        Ok(Self {
            d,
            sigma,
            multipliers: basis
                .eigenvalues()
                .iter()
                .map(|mu| mu.powf(sigma))
                .collect(),
        })
    }

    pub fn d(&self) -> f64 {
        self.d
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// `mu_k^sigma` without the diffusion coefficient.
    pub fn multipliers(&self) -> &[f64] {
        &self.multipliers
    }
}

/// `(-Delta)^sigma u` in the eigenbasis (diffusion coefficient not applied).
pub fn apply_spectral_flaplacian(
    field: &mut Field,
    op: &SpectralOperator,
    basis: &SpectralBasis,
) -> Field {
    let coeffs = field.spectral(basis);
    let out: Vec<f64> = coeffs
        .iter()
        .zip(op.multipliers())
        .map(|(w, m)| w * m)
        .collect();
    Field::from_spectral(out).expect("multipliers and coefficients are finite")
}

/// Fractional Sobolev seminorm squared `sum mu_k^sigma w_k^2`, equal to
/// `int |(-Delta)^{sigma/2} w|^2 dx`.
pub fn sobolev_seminorm(field: &mut Field, sigma: f64, basis: &SpectralBasis) -> f64 {
    let coeffs = field.spectral(basis);
    coeffs
        .iter()
        .zip(basis.eigenvalues())
        .map(|(w, mu)| mu.powf(sigma) * w * w)
        .sum()
}
