//! The two chain families in momentum space: dispersions, static Bogoliubov
//! amplitudes, momentum grids and closed-form order parameters.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fmath;

const PARAM_SLACK: f64 = 1e-12;

/// Hamiltonian parameters of one of the two supported chains.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModelSpec {
    /// XY chain in a transverse field: anisotropy `gamma` in (0, 1], field `h >= 0`.
    Xy { gamma: f64, h: f64 },
    /// N-cluster Ising chain: cluster size `N >= 1`, mixing angle `phi` in [0, pi/2].
    ClusterIsing { cluster_size: u32, phi: f64 },
}

impl ModelSpec {
    pub fn xy(gamma: f64, h: f64) -> Result<Self> {
        let m = ModelSpec::Xy { gamma, h };
        m.validate()?;
        Ok(m)
    }

    pub fn cluster(cluster_size: u32, phi: f64) -> Result<Self> {
        let m = ModelSpec::ClusterIsing { cluster_size, phi };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            ModelSpec::Xy { gamma, h } => {
                if !(gamma > 0.0 && gamma <= 1.0) {
                    return Err(Error::InvalidModel(format!("gamma = {gamma} not in (0, 1]")));
                }
                if !(h >= 0.0 && h.is_finite()) {
                    return Err(Error::InvalidModel(format!("h = {h} must be finite and >= 0")));
                }
            }
            ModelSpec::ClusterIsing { cluster_size, phi } => {
                if cluster_size == 0 {
                    return Err(Error::InvalidModel("cluster_size must be >= 1".into()));
                }
                if !(-PARAM_SLACK..=FRAC_PI_2 + PARAM_SLACK).contains(&phi) {
                    return Err(Error::InvalidModel(format!("phi = {phi} not in [0, pi/2]")));
                }
            }
        }
        Ok(())
    }

    /// Whether the parameters lie in the magnetically ordered phase.
    pub fn is_ordered(&self) -> bool {
        match *self {
            ModelSpec::Xy { h, .. } => h < 1.0,
            ModelSpec::ClusterIsing { phi, .. } => phi >= FRAC_PI_4,
        }
    }

    pub fn is_cluster(&self) -> bool {
        matches!(self, ModelSpec::ClusterIsing { .. })
    }

    pub fn dispersion(&self, k: f64) -> Dispersion {
        dispersion(self, k)
    }
}

/// Coefficients of the number and pairing terms of one (k, -k) block.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dispersion {
    pub epsilon: f64,
    pub delta: f64,
}

impl Dispersion {
    pub fn ground_energy(&self) -> f64 {
        ground_energy(self.epsilon, self.delta)
    }

    pub fn amplitudes(&self) -> ModePair {
        let (alpha, beta) = bogoliubov_amplitudes(self.epsilon, self.delta);
        ModePair { alpha, beta }
    }
}

/// (epsilon_k, delta_k) for the given chain.
///
/// Cluster chain: epsilon = cos((N+1)k) cos(phi) - cos(k) sin(phi) and
/// delta = sin((N+1)k) cos(phi) + sin(k) sin(phi). The `+` in delta is what
/// the Jordan-Wigner image of the y-y Ising coupling produces.
pub fn dispersion(model: &ModelSpec, k: f64) -> Dispersion {
    match *model {
        ModelSpec::Xy { gamma, h } => Dispersion { epsilon: fmath::cos(k) - h, delta: gamma * fmath::sin(k) },
        ModelSpec::ClusterIsing { cluster_size, phi } => {
            let q = f64::from(cluster_size + 1) * k;
            let (c, s) = (fmath::cos(phi), fmath::sin(phi));
            Dispersion { epsilon: fmath::cos(q) * c - fmath::cos(k) * s, delta: fmath::sin(q) * c + fmath::sin(k) * s }
        }
    }
}

/// Ground energy of a (k, -k) block: -2 sqrt(eps^2 + delta^2).
pub fn ground_energy(epsilon: f64, delta: f64) -> f64 {
    -2.0 * fmath::hypot(epsilon, delta)
}

/// Ground-state amplitudes of the doubly occupied and empty pair states.
///
/// alpha = i (eps - E) / n and beta = delta / n with E = sqrt(eps^2 + delta^2);
/// alpha is purely imaginary and beta real. At delta = 0 the 0/0 is resolved
/// by the delta -> 0+ limit.
pub fn bogoliubov_amplitudes(epsilon: f64, delta: f64) -> (Complex64, Complex64) {
    let e = fmath::hypot(epsilon, delta);
    // eps - E without cancellation when eps > 0
    let d = if epsilon > 0.0 { -(delta * delta) / (epsilon + e) } else { epsilon - e };
    let n = fmath::hypot(delta, d);
    if n == 0.0 {
        return (Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0));
    }
    (Complex64::new(0.0, d / n), Complex64::new(delta / n, 0.0))
}

/// Closed-form order parameter in the ordered phase: uniform sigma^x
/// magnetization for XY, staggered sigma^y magnetization for the cluster chain.
pub fn analytic_order_parameter(model: &ModelSpec) -> Result<f64> {
    model.validate()?;
    match *model {
        ModelSpec::Xy { gamma, h } => {
            if h > 1.0 {
                return Err(Error::NotOrdered);
            }
            let num = 2.0 * fmath::pow(gamma * gamma * (1.0 - h * h), 0.125);
            Ok(num / fmath::sqrt(2.0 * (1.0 + gamma)))
        }
        ModelSpec::ClusterIsing { cluster_size, phi } => {
            if phi < FRAC_PI_4 {
                return Err(Error::NotOrdered);
            }
            let cot = fmath::cos(phi) / fmath::sin(phi);
            let base = (1.0 - cot * cot).max(0.0);
            Ok(fmath::pow(base, f64::from(cluster_size + 2) / 8.0))
        }
    }
}

/// Quadrature rule for the thermodynamic-limit integral over (0, pi).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum QuadratureRule {
    /// Equal-weight midpoint rule; identical to the antiperiodic grid of a
    /// chain with 2M sites.
    #[default]
    Midpoint,
    GaussLegendre,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MomentumGrid {
    /// Even-parity (antiperiodic) modes k = pi(2m+1)/n of an n-site ring.
    Finite { n_sites: usize },
    /// Quadrature on (0, pi) standing in for the infinite chain.
    Thermodynamic { n_points: usize, rule: QuadratureRule },
}

impl MomentumGrid {
    pub fn thermodynamic(n_points: usize) -> Self {
        MomentumGrid::Thermodynamic { n_points, rule: QuadratureRule::Midpoint }
    }

    pub fn points(&self) -> Result<Vec<MomentumPoint>> {
        momentum_grid(self)
    }

    /// Largest |r| for which correlators on this grid describe distinct sites.
    pub fn max_distance(&self) -> Option<usize> {
        match *self {
            MomentumGrid::Finite { n_sites } => Some(n_sites - 1),
            MomentumGrid::Thermodynamic { .. } => None,
        }
    }
}

/// One quadrature node. `weight` is normalized to the measure dk/pi, so the
/// weights of every grid sum to 1 (finite grids: 2/n_sites each).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentumPoint {
    pub k: f64,
    pub weight: f64,
}

impl MomentumPoint {
    /// Weight with respect to plain dk; these sum to pi.
    pub fn measure(&self) -> f64 {
        self.weight * PI
    }
}

pub fn momentum_grid(spec: &MomentumGrid) -> Result<Vec<MomentumPoint>> {
    match *spec {
        MomentumGrid::Finite { n_sites } => {
            if n_sites == 0 || n_sites % 2 != 0 {
                return Err(Error::OddSites(n_sites));
            }
            let n = n_sites as f64;
            Ok((0..n_sites / 2).map(|m| MomentumPoint { k: PI * (2 * m + 1) as f64 / n, weight: 2.0 / n }).collect())
        }
        MomentumGrid::Thermodynamic { n_points, rule } => {
            if n_points < 2 {
                return Err(Error::TooFewPoints(n_points));
            }
            Ok(match rule {
                QuadratureRule::Midpoint => {
                    let m = n_points as f64;
                    (0..n_points).map(|i| MomentumPoint { k: PI * (i as f64 + 0.5) / m, weight: 1.0 / m }).collect()
                }
                QuadratureRule::GaussLegendre => gauss_legendre(n_points)
                    .into_iter()
                    .map(|(x, w)| MomentumPoint { k: FRAC_PI_2 * (x + 1.0), weight: 0.5 * w })
                    .collect(),
            })
        }
    }
}

/// Gauss-Legendre nodes and weights on (-1, 1), ascending in x.
fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut nodes = alloc::vec![(0.0, 0.0); n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut z = fmath::cos(PI * (i as f64 + 0.75) / (nf + 0.5));
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p1, mut p2) = (1.0, 0.0);
            for j in 1..=n {
                let jf = j as f64;
                let p3 = p2;
                p2 = p1;
                p1 = ((2.0 * jf - 1.0) * z * p2 - (jf - 1.0) * p3) / jf;
            }
            dp = nf * (z * p1 - p2) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        nodes[i] = (-z, w);
        nodes[n - 1 - i] = (z, w);
    }
    nodes
}

/// Complex pair (alpha_k, beta_k) of one momentum block.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModePair {
    pub alpha: Complex64,
    pub beta: Complex64,
}

impl ModePair {
    pub fn norm_sqr(&self) -> f64 {
        self.alpha.norm_sqr() + self.beta.norm_sqr()
    }
}

/// Static ground-state amplitudes on every node of a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeAmplitudes {
    pub points: Vec<MomentumPoint>,
    pub modes: Vec<ModePair>,
}

impl ModeAmplitudes {
    pub fn ground_state(model: &ModelSpec, grid: &MomentumGrid) -> Result<Self> {
        model.validate()?;
        let points = grid.points()?;
        let modes = points.iter().map(|p| model.dispersion(p.k).amplitudes()).collect();
        Ok(ModeAmplitudes { points, modes })
    }
}
