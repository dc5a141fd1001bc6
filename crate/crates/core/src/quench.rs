//! Sudden quench of each (k, -k) block: the 2x2 propagator of the final
//! Hamiltonian applied to the initial ground-state amplitudes.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fmath;
use crate::model::{Dispersion, ModePair, ModelSpec, MomentumGrid, MomentumPoint};

/// Initial and final Hamiltonians on a shared momentum grid, with the
/// per-mode data every time sample needs already evaluated.
///
/// Cross-family pairs (XY into cluster or back) are accepted; they are free
/// fermion problems like any other but have no reference results.
#[derive(Debug, Clone, PartialEq)]
pub struct QuenchProtocol {
    model_initial: ModelSpec,
    model_final: ModelSpec,
    grid: MomentumGrid,
    points: Vec<MomentumPoint>,
    initial: Vec<ModePair>,
    dispersion_final: Vec<Dispersion>,
}

impl QuenchProtocol {
    pub fn new(model_initial: ModelSpec, model_final: ModelSpec, grid: MomentumGrid) -> Result<Self> {
        model_initial.validate()?;
        model_final.validate()?;
        let points = grid.points()?;
        let initial = points.iter().map(|p| model_initial.dispersion(p.k).amplitudes()).collect();
        let dispersion_final = points.iter().map(|p| model_final.dispersion(p.k)).collect();
        Ok(QuenchProtocol { model_initial, model_final, grid, points, initial, dispersion_final })
    }

    /// The ground state of `model` left alone.
    pub fn stationary(model: ModelSpec, grid: MomentumGrid) -> Result<Self> {
        Self::new(model, model, grid)
    }

    pub fn model_initial(&self) -> &ModelSpec {
        &self.model_initial
    }

    pub fn model_final(&self) -> &ModelSpec {
        &self.model_final
    }

    pub fn grid(&self) -> &MomentumGrid {
        &self.grid
    }

    pub fn points(&self) -> &[MomentumPoint] {
        &self.points
    }

    pub fn initial_modes(&self) -> &[ModePair] {
        &self.initial
    }

    pub fn is_trivial(&self) -> bool {
        self.model_initial == self.model_final
    }

    pub fn evolve(&self, t: f64) -> Result<EvolvedAmplitudes> {
        evolve_amplitudes(self, t)
    }
}

/// exp(-i H_k t) of one block in the (doubly occupied, empty) basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolutionMatrix {
    pub u11: Complex64,
    pub u12: Complex64,
    pub u21: Complex64,
    pub u22: Complex64,
}

impl EvolutionMatrix {
    pub fn identity() -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        EvolutionMatrix { u11: one, u12: zero, u21: zero, u22: one }
    }

    pub fn determinant(&self) -> Complex64 {
        self.u11 * self.u22 - self.u12 * self.u21
    }

    pub fn apply(&self, m: ModePair) -> ModePair {
        ModePair { alpha: self.u11 * m.alpha + self.u12 * m.beta, beta: self.u21 * m.alpha + self.u22 * m.beta }
    }
}

fn check_time(t: f64) -> Result<()> {
    if t.is_finite() && t >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidTime(t))
    }
}

/// Propagator of the pair block K = [[2 eps, 2i delta], [-2i delta, -2 eps]],
/// whose eigenvalues are +-omega with omega = -2 sqrt(eps^2 + delta^2):
///
/// U11 = cos(wt) - i (2 eps / w) sin(wt), U12 = (2 delta / w) sin(wt),
/// U21 = -U12, U22 = conj(U11).
///
/// At omega = 0, sin(wt)/w is replaced by its limit t.
pub fn evolution_matrix(d: Dispersion, t: f64) -> Result<EvolutionMatrix> {
    check_time(t)?;
    Ok(propagator(d, t))
}

fn propagator(d: Dispersion, t: f64) -> EvolutionMatrix {
    let w = d.ground_energy();
    let (c, sinc) = if w == 0.0 { (1.0, t) } else { (fmath::cos(w * t), fmath::sin(w * t) / w) };
    let u11 = Complex64::new(c, -2.0 * d.epsilon * sinc);
    let u12 = Complex64::new(2.0 * d.delta * sinc, 0.0);
    EvolutionMatrix { u11, u12, u21: -u12, u22: u11.conj() }
}

/// Amplitudes of every mode at one time; immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct EvolvedAmplitudes {
    pub t: f64,
    pub points: Vec<MomentumPoint>,
    pub modes: Vec<ModePair>,
}

impl EvolvedAmplitudes {
    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn max_norm_error(&self) -> f64 {
        self.modes.iter().map(|m| (m.norm_sqr() - 1.0).abs()).fold(0.0, f64::max)
    }
}

pub fn evolve_amplitudes(protocol: &QuenchProtocol, t: f64) -> Result<EvolvedAmplitudes> {
    check_time(t)?;
    let modes =
        protocol.initial.iter().zip(&protocol.dispersion_final).map(|(m, d)| propagator(*d, t).apply(*m)).collect();
    Ok(EvolvedAmplitudes { t, points: protocol.points.clone(), modes })
}
