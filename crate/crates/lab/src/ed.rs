//! Brute-force exact diagonalization of small periodic chains.
//!
//! Basis index bit `j` is 1 when spin `j` points down, so index 0 is the
//! all-up state and reduced matrices come out in the same ordering as
//! [`brokensym_core::rdm::pauli_matrix`]. Hamiltonians of both families are
//! real in this basis and block-diagonal in the parity `P_z = prod sigma^z`.

use brokensym_core::fermion_corr::CorrelatorTable;
use brokensym_core::model::ModelSpec;
use brokensym_core::rdm::{trace_distance, CMatrix, ReducedDensityMatrix};
use brokensym_core::wick::{Axis, Orientation, PauliString, Species};
use faer::diag::Diag;
use faer::dyn_stack::{MemBuffer, MemStack};
use faer::linalg::evd::{self_adjoint_evd, self_adjoint_evd_scratch, ComputeEigenvectors};
use faer::linalg::matmul::matmul;
use faer::{Accum, Col, Mat, MatRef, Par};
use num_complex::Complex64;

pub const MAX_SITES: usize = 14;
/// Within-sector ground states closer than this are refused as ambiguous.
pub const DEGENERACY_TOLERANCE: f64 = 1e-10;
/// Phases scanned when building the maximally broken superposition.
pub const PHASE_SCAN: usize = 64;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EdError {
    #[error("{n} sites exceed the exact-diagonalization cap of {cap}")]
    TooManySites { n: usize, cap: usize },
    #[error("{n} sites cannot host the model's couplings (need at least {need})")]
    TooFewSites { n: usize, need: usize },
    #[error("{parity:?} sector ground state is degenerate (splitting {splitting:e})")]
    Degenerate { parity: Parity, splitting: f64 },
    #[error("eigensolver failed on the {0:?} sector")]
    Eigensolver(Parity),
    #[error("state has weight in the {0:?} sector, which was not diagonalized")]
    MissingSector(Parity),
    #[error("operator of span {span} does not fit on a ring of {n} sites")]
    DoesNotFit { span: usize, n: usize },
    #[error(transparent)]
    Core(#[from] brokensym_core::Error),
}

pub type EdResult<T> = Result<T, EdError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    /// Eigenvalue of P_z on a basis state: (-1)^(number of down spins).
    pub fn of_index(index: usize) -> Parity {
        if index.count_ones().is_multiple_of(2) {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn sign(self) -> f64 {
        match self {
            Parity::Even => 1.0,
            Parity::Odd => -1.0,
        }
    }
}

/// Action of a product of single-site Paulis on one basis state.
fn apply_factors(factors: &[(usize, Axis)], index: usize) -> (Complex64, usize) {
    let mut phase = Complex64::new(1.0, 0.0);
    let mut out = index;
    for &(site, axis) in factors {
        let down = (out >> site) & 1 == 1;
        match axis {
            Axis::I => {}
            Axis::X => out ^= 1 << site,
            Axis::Y => {
                phase *= if down { Complex64::new(0.0, -1.0) } else { Complex64::new(0.0, 1.0) };
                out ^= 1 << site;
            }
            Axis::Z => {
                if down {
                    phase = -phase;
                }
            }
        }
    }
    (phase, out)
}

/// Sites of `op` folded onto the ring.
fn ring_factors(op: &PauliString, n: usize) -> EdResult<Vec<(usize, Axis)>> {
    if op.span() >= n {
        return Err(EdError::DoesNotFit { span: op.span(), n });
    }
    Ok(op.factors().iter().map(|&(s, a)| (s.rem_euclid(n as i64) as usize, a)).collect())
}

#[derive(Debug, Clone, PartialEq)]
struct Term {
    coeff: f64,
    factors: Vec<(usize, Axis)>,
}

/// Spin Hamiltonian on a periodic ring, kept as a list of Pauli terms.
#[derive(Debug, Clone, PartialEq)]
pub struct Hamiltonian {
    n_sites: usize,
    terms: Vec<Term>,
}

/// Periodic-chain Hamiltonian of either model family.
pub fn build_hamiltonian(model: &ModelSpec, n_sites: usize) -> EdResult<Hamiltonian> {
    model.validate()?;
    if n_sites > MAX_SITES {
        return Err(EdError::TooManySites { n: n_sites, cap: MAX_SITES });
    }
    let n = n_sites;
    let mut terms = Vec::new();
    match *model {
        ModelSpec::Xy { gamma, h } => {
            if n < 2 {
                return Err(EdError::TooFewSites { n, need: 2 });
            }
            for j in 0..n {
                let k = (j + 1) % n;
                terms.push(Term { coeff: -(1.0 + gamma) / 2.0, factors: vec![(j, Axis::X), (k, Axis::X)] });
                terms.push(Term { coeff: -(1.0 - gamma) / 2.0, factors: vec![(j, Axis::Y), (k, Axis::Y)] });
                terms.push(Term { coeff: -h, factors: vec![(j, Axis::Z)] });
            }
        }
        ModelSpec::ClusterIsing { cluster_size, phi } => {
            let size = cluster_size as usize;
            if n < size + 2 {
                return Err(EdError::TooFewSites { n, need: size + 2 });
            }
            for j in 0..n {
                let mut cluster = vec![(j, Axis::X)];
                cluster.extend((1..=size).map(|m| ((j + m) % n, Axis::Z)));
                cluster.push(((j + size + 1) % n, Axis::X));
                terms.push(Term { coeff: -phi.cos(), factors: cluster });
                terms.push(Term { coeff: phi.sin(), factors: vec![(j, Axis::Y), ((j + 1) % n, Axis::Y)] });
            }
        }
    }
    Ok(Hamiltonian { n_sites, terms })
}

impl Hamiltonian {
    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn dim(&self) -> usize {
        1 << self.n_sites
    }

    /// Basis indices of one parity sector, ascending.
    pub fn sector_basis(&self, parity: Parity) -> Vec<usize> {
        (0..self.dim()).filter(|&i| Parity::of_index(i) == parity).collect()
    }

    /// Dense real block of one parity sector in the `sector_basis` order.
    pub fn sector_matrix(&self, parity: Parity) -> Mat<f64> {
        let basis = self.sector_basis(parity);
        let mut position = vec![usize::MAX; self.dim()];
        for (p, &i) in basis.iter().enumerate() {
            position[i] = p;
        }
        let mut m = Mat::zeros(basis.len(), basis.len());
        for (col, &i) in basis.iter().enumerate() {
            for term in &self.terms {
                let (phase, j) = apply_factors(&term.factors, i);
                debug_assert!(phase.im.abs() < 1e-14, "model terms are real in this basis");
                *m.get_mut(position[j], col) += term.coeff * phase.re;
            }
        }
        m
    }

    /// Full complex matrix; only sensible for small rings.
    pub fn dense(&self) -> CMatrix {
        let mut m = CMatrix::zeros(self.dim(), self.dim());
        for i in 0..self.dim() {
            for term in &self.terms {
                let (phase, j) = apply_factors(&term.factors, i);
                m[(j, i)] += phase * term.coeff;
            }
        }
        m
    }

    pub fn expectation(&self, state: &DenseState) -> f64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, &a) in state.amps.iter().enumerate() {
            if a.norm_sqr() == 0.0 {
                continue;
            }
            for term in &self.terms {
                let (phase, j) = apply_factors(&term.factors, i);
                acc += state.amps[j].conj() * phase * a * term.coeff;
            }
        }
        acc.re
    }
}

/// Diagonal of P_z in the computational basis.
pub fn parity_diagonal(n_sites: usize) -> Vec<f64> {
    (0..1usize << n_sites).map(|i| Parity::of_index(i).sign()).collect()
}

/// Eigen-decomposition of one parity block, energies ascending.
#[derive(Debug, Clone)]
pub struct SectorSpectrum {
    pub parity: Parity,
    pub basis: Vec<usize>,
    pub energies: Vec<f64>,
    /// Eigenvectors as columns, in the order of `energies`.
    pub vectors: Mat<f64>,
}

fn product(m: MatRef<'_, f64>, v: &Col<f64>) -> Col<f64> {
    let mut out = Col::zeros(m.nrows());
    matmul(out.as_mat_mut(), Accum::Replace, m, v.as_mat(), 1.0, Par::Seq);
    out
}

impl SectorSpectrum {
    pub fn new(h: &Hamiltonian, parity: Parity) -> EdResult<Self> {
        // Sequential on purpose: a thread-count dependent split would make
        // oracle output depend on the worker count.
        let a = h.sector_matrix(parity);
        let n = a.nrows();
        let mut u = Mat::zeros(n, n);
        let mut s = Diag::zeros(n);
        let mut mem =
            MemBuffer::new(self_adjoint_evd_scratch::<f64>(n, ComputeEigenvectors::Yes, Par::Seq, Default::default()));
        self_adjoint_evd(
            a.as_ref(),
            s.as_mut(),
            Some(u.as_mut()),
            Par::Seq,
            MemStack::new(&mut mem),
            Default::default(),
        )
        .map_err(|_| EdError::Eigensolver(parity))?;
        let values = s.column_vector();
        let mut order: Vec<usize> = (0..values.nrows()).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        let energies = order.iter().map(|&i| values[i]).collect();
        let vectors = Mat::from_fn(u.nrows(), order.len(), |r, c| u[(r, order[c])]);
        Ok(SectorSpectrum { parity, basis: h.sector_basis(parity), energies, vectors })
    }

    fn ground(&self, n_sites: usize) -> EdResult<DenseState> {
        if self.energies.len() > 1 {
            let splitting = self.energies[1] - self.energies[0];
            if splitting < DEGENERACY_TOLERANCE {
                return Err(EdError::Degenerate { parity: self.parity, splitting });
            }
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n_sites];
        for (p, &i) in self.basis.iter().enumerate() {
            amps[i] = Complex64::new(self.vectors[(p, 0)], 0.0);
        }
        Ok(DenseState { n_sites, amps })
    }

    /// exp(-i H t) restricted to this sector, written into `out`.
    fn propagate(&self, state: &DenseState, t: f64, out: &mut [Complex64]) {
        let re = Col::from_fn(self.basis.len(), |p| state.amps[self.basis[p]].re);
        let im = Col::from_fn(self.basis.len(), |p| state.amps[self.basis[p]].im);
        let c_re = product(self.vectors.transpose(), &re);
        let c_im = product(self.vectors.transpose(), &im);
        // (a + ib)(cos - i sin)
        let rot_re = Col::from_fn(c_re.nrows(), |k| {
            let (s, c) = (self.energies[k] * t).sin_cos();
            c_re[k] * c + c_im[k] * s
        });
        let rot_im = Col::from_fn(c_re.nrows(), |k| {
            let (s, c) = (self.energies[k] * t).sin_cos();
            c_im[k] * c - c_re[k] * s
        });
        let back_re = product(self.vectors.as_ref(), &rot_re);
        let back_im = product(self.vectors.as_ref(), &rot_im);
        for (p, &i) in self.basis.iter().enumerate() {
            out[i] = Complex64::new(back_re[p], back_im[p]);
        }
    }
}

/// Diagonalized parity blocks of one Hamiltonian.
#[derive(Debug, Clone)]
pub struct Spectrum {
    n_sites: usize,
    sectors: Vec<SectorSpectrum>,
}

impl Spectrum {
    /// Both sectors.
    pub fn new(h: &Hamiltonian) -> EdResult<Self> {
        Self::for_sectors(h, &[Parity::Even, Parity::Odd])
    }

    /// Only the listed sectors; enough to evolve states confined to them.
    pub fn for_sectors(h: &Hamiltonian, parities: &[Parity]) -> EdResult<Self> {
        let sectors = parities.iter().map(|&p| SectorSpectrum::new(h, p)).collect::<EdResult<_>>()?;
        Ok(Spectrum { n_sites: h.n_sites, sectors })
    }

    pub fn sector(&self, parity: Parity) -> Option<&SectorSpectrum> {
        self.sectors.iter().find(|s| s.parity == parity)
    }

    /// Exact exp(-i H t) applied sector by sector.
    pub fn evolve(&self, state: &DenseState, t: f64) -> EdResult<DenseState> {
        if !(t >= 0.0) || !t.is_finite() {
            return Err(brokensym_core::Error::InvalidTime(t).into());
        }
        for parity in [Parity::Even, Parity::Odd] {
            if self.sector(parity).is_none() {
                let weight: f64 = state
                    .amps
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| Parity::of_index(*i) == parity)
                    .map(|(_, a)| a.norm_sqr())
                    .sum();
                if weight > 1e-24 {
                    return Err(EdError::MissingSector(parity));
                }
            }
        }
        let mut out = vec![Complex64::new(0.0, 0.0); state.amps.len()];
        for sector in &self.sectors {
            sector.propagate(state, t, &mut out);
        }
        Ok(DenseState { n_sites: self.n_sites, amps: out })
    }

    /// Lowest state of one diagonalized sector.
    pub fn ground_state(&self, parity: Parity) -> EdResult<(DenseState, f64)> {
        let sector = self.sector(parity).ok_or(EdError::MissingSector(parity))?;
        Ok((sector.ground(self.n_sites)?, sector.energies[0]))
    }
}

/// Lowest states of each parity sector and their splitting.
#[derive(Debug, Clone)]
pub struct GroundStates {
    pub even: DenseState,
    pub odd: DenseState,
    pub energy_even: f64,
    pub energy_odd: f64,
    /// E_odd - E_even.
    pub gap: f64,
}

pub fn parity_ground_states(spectrum: &Spectrum) -> EdResult<GroundStates> {
    let (even, energy_even) = spectrum.ground_state(Parity::Even)?;
    let (odd, energy_odd) = spectrum.ground_state(Parity::Odd)?;
    Ok(GroundStates { even, odd, energy_even, energy_odd, gap: energy_odd - energy_even })
}

/// Normalized amplitude vector over the 2^n computational basis.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseState {
    n_sites: usize,
    amps: Vec<Complex64>,
}

impl DenseState {
    /// Computational basis state.
    pub fn basis(n_sites: usize, index: usize) -> Self {
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n_sites];
        amps[index] = Complex64::new(1.0, 0.0);
        DenseState { n_sites, amps }
    }

    /// a |x> + b |y>, normalized.
    pub fn superpose(a: Complex64, x: &DenseState, b: Complex64, y: &DenseState) -> Self {
        let amps: Vec<Complex64> = x.amps.iter().zip(&y.amps).map(|(p, q)| a * p + b * q).collect();
        let norm = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        DenseState { n_sites: x.n_sites, amps: amps.into_iter().map(|z| z / norm).collect() }
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn inner(&self, other: &DenseState) -> Complex64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    fn apply_ring(&self, factors: &[(usize, Axis)], scale: Complex64) -> DenseState {
        let mut out = vec![Complex64::new(0.0, 0.0); self.amps.len()];
        for (i, &a) in self.amps.iter().enumerate() {
            if a.norm_sqr() != 0.0 {
                let (phase, j) = apply_factors(factors, i);
                out[j] += phase * a * scale;
            }
        }
        DenseState { n_sites: self.n_sites, amps: out }
    }

    /// <psi| op |psi> with sites taken modulo the ring length.
    pub fn pauli_expectation(&self, op: &PauliString) -> EdResult<Complex64> {
        let factors = ring_factors(op, self.n_sites)?;
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, &a) in self.amps.iter().enumerate() {
            if a.norm_sqr() != 0.0 {
                let (phase, j) = apply_factors(&factors, i);
                acc += self.amps[j].conj() * phase * a;
            }
        }
        Ok(acc)
    }

    pub fn parity_expectation(&self) -> f64 {
        self.amps.iter().enumerate().map(|(i, a)| Parity::of_index(i).sign() * a.norm_sqr()).sum()
    }

    /// A_j = S_j sigma^x_j or B_j = -i S_j sigma^y_j applied to the state,
    /// with S_j the sigma^z string over sites 0..j.
    pub fn apply_majorana(&self, site: usize, species: Species) -> DenseState {
        let mut factors: Vec<(usize, Axis)> = (0..site).map(|m| (m, Axis::Z)).collect();
        let (axis, scale) = match species {
            Species::A => (Axis::X, Complex64::new(1.0, 0.0)),
            Species::B => (Axis::Y, Complex64::new(0.0, -1.0)),
        };
        factors.push((site, axis));
        self.apply_ring(&factors, scale)
    }

    /// <M_i M_k> for two Majoranas on the open segment 0..n.
    pub fn contraction(&self, i: (usize, Species), k: (usize, Species)) -> Complex64 {
        let right = self.apply_majorana(k.0, k.1);
        self.inner(&right.apply_majorana(i.0, i.1))
    }

    /// f, g, h read off the state directly, for |r| <= r_max < n.
    pub fn correlator_table(&self, t: f64, r_max: usize) -> EdResult<CorrelatorTable> {
        if r_max >= self.n_sites {
            return Err(EdError::DoesNotFit { span: r_max, n: self.n_sites });
        }
        let rm = r_max as i64;
        let (mut f, mut g, mut h) = (Vec::new(), Vec::new(), Vec::new());
        for r in -rm..=rm {
            let k = (-r).max(0) as usize;
            let i = (k as i64 + r) as usize;
            f.push(self.contraction((i, Species::A), (k, Species::A)));
            g.push(self.contraction((i, Species::B), (k, Species::A)).re);
            h.push(self.contraction((i, Species::B), (k, Species::B)));
        }
        Ok(CorrelatorTable::from_columns(t, r_max, f, g, h)?)
    }

    /// Partial trace onto `sites`, first site most significant, |up> first.
    pub fn reduced_density(&self, sites: &[i64]) -> EdResult<ReducedDensityMatrix> {
        let n = self.n_sites;
        let ring: Vec<usize> = sites.iter().map(|s| s.rem_euclid(n as i64) as usize).collect();
        let mut sorted = ring.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != ring.len() || ring.is_empty() {
            return Err(brokensym_core::Error::InvalidSubset.into());
        }
        let l = ring.len();
        let mask: usize = ring.iter().map(|s| 1 << s).sum();
        let local = |i: usize| ring.iter().enumerate().map(|(p, &s)| ((i >> s) & 1) << (l - 1 - p)).sum::<usize>();
        let embed = |b: usize| ring.iter().enumerate().map(|(p, &s)| ((b >> (l - 1 - p)) & 1) << s).sum::<usize>();
        let mut rho = CMatrix::zeros(1 << l, 1 << l);
        for (i, &amp) in self.amps.iter().enumerate() {
            if amp.norm_sqr() == 0.0 {
                continue;
            }
            let a = local(i);
            let env = i & !mask;
            for b in 0..1 << l {
                rho[(a, b)] += amp * self.amps[env | embed(b)].conj();
            }
        }
        Ok(ReducedDensityMatrix(rho))
    }
}

/// Trace distance between the reductions of two states onto `sites`.
pub fn oracle_distance(state_max: &DenseState, state_sym: &DenseState, sites: &[i64]) -> EdResult<f64> {
    Ok(trace_distance(&state_max.reduced_density(sites)?, &state_sym.reduced_density(sites)?)?)
}

/// Equal-weight even/odd superposition whose relative phase, scanned over
/// [`PHASE_SCAN`] values, maximizes the oriented order parameter at site 0.
pub fn max_broken_state(ground: &GroundStates, orientation: Orientation) -> EdResult<(DenseState, f64)> {
    let (reference, sign) = orientation.reference(0);
    let w = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let mut best: Option<(DenseState, f64, f64)> = None;
    for m in 0..PHASE_SCAN {
        let theta = 2.0 * std::f64::consts::PI * m as f64 / PHASE_SCAN as f64;
        let state = DenseState::superpose(w, &ground.even, w * Complex64::from_polar(1.0, theta), &ground.odd);
        let value = sign * state.pauli_expectation(&reference)?.re;
        if best.as_ref().is_none_or(|b| value > b.2) {
            best = Some((state, theta, value));
        }
    }
    let (state, theta, _) = best.expect("scan is non-empty");
    Ok((state, theta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use brokensym_core::model::{momentum_grid, MomentumGrid};
    use std::f64::consts::PI;

    fn xy(gamma: f64, h: f64) -> ModelSpec {
        ModelSpec::xy(gamma, h).unwrap()
    }

    #[test]
    fn two_site_ising_by_hand() {
        // the periodic image doubles the single bond: H = -2 X0 X1
        let h = build_hamiltonian(&xy(1.0, 0.0), 2).unwrap();
        let dense = h.dense();
        let mut expect = CMatrix::zeros(4, 4);
        for (i, j) in [(0, 3), (3, 0), (1, 2), (2, 1)] {
            expect[(i, j)] = Complex64::new(-2.0, 0.0);
        }
        assert_eq!(dense, expect);
        let spectrum = Spectrum::new(&h).unwrap();
        assert_eq!(spectrum.sector(Parity::Even).unwrap().energies, vec![-2.0, 2.0]);
        assert_eq!(spectrum.sector(Parity::Odd).unwrap().energies, vec![-2.0, 2.0]);
    }

    #[test]
    fn hermitian_and_parity_conserving() {
        let p = parity_diagonal(6);
        for model in
            [xy(0.3, 0.7), xy(0.9, 1.4), ModelSpec::cluster(1, 1.1).unwrap(), ModelSpec::cluster(2, 0.4).unwrap()]
        {
            let m = build_hamiltonian(&model, 6).unwrap().dense();
            assert!((&m - m.adjoint()).iter().all(|z| z.norm() < 1e-12));
            for i in 0..64 {
                for j in 0..64 {
                    assert!((m[(i, j)] * (p[j] - p[i])).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn ground_energy_matches_mode_sum() {
        for model in [xy(0.5, 0.2), xy(1.0, 0.0), ModelSpec::cluster(1, 3.0 * PI / 8.0).unwrap()] {
            let n = 12;
            let spectrum = Spectrum::for_sectors(&build_hamiltonian(&model, n).unwrap(), &[Parity::Even]).unwrap();
            let modes: f64 = momentum_grid(&MomentumGrid::Finite { n_sites: n })
                .unwrap()
                .iter()
                .map(|p| model.dispersion(p.k).ground_energy())
                .sum();
            assert!((spectrum.sector(Parity::Even).unwrap().energies[0] - modes).abs() < 1e-10);
        }
    }

    #[test]
    fn ordered_phase_has_small_splitting() {
        let gap = |h: f64, n: usize| {
            parity_ground_states(&Spectrum::new(&build_hamiltonian(&xy(0.5, h), n).unwrap()).unwrap())
                .unwrap()
                .gap
                .abs()
        };
        assert!(gap(0.2, 10) < 1e-2);
        assert!(gap(0.2, 10) < gap(0.2, 8));
        assert!(gap(2.0, 8) > 0.5);
    }

    #[test]
    fn evolution_preserves_norm_parity_and_energy() {
        let n = 8;
        let g = parity_ground_states(&Spectrum::new(&build_hamiltonian(&xy(0.5, 0.2), n).unwrap()).unwrap()).unwrap();
        assert!((g.even.parity_expectation() - 1.0).abs() < 1e-12);
        assert!((g.odd.parity_expectation() + 1.0).abs() < 1e-12);
        let h1 = build_hamiltonian(&xy(0.5, 0.8), n).unwrap();
        let spectrum = Spectrum::new(&h1).unwrap();
        assert_eq!(spectrum.evolve(&g.even, 0.0).unwrap().amplitudes().len(), 256);
        assert!((spectrum.evolve(&g.even, 0.0).unwrap().inner(&g.even).re - 1.0).abs() < 1e-12);
        let e0 = h1.expectation(&g.even);
        for t in [0.3, 1.0, 4.0] {
            let s = spectrum.evolve(&g.even, t).unwrap();
            assert!((s.norm() - 1.0).abs() < 1e-12);
            assert!((s.parity_expectation() - 1.0).abs() < 1e-10);
            assert!((h1.expectation(&s) - e0).abs() < 1e-10);
        }
    }

    #[test]
    fn product_state_reduction_is_pure() {
        let up = DenseState::basis(5, 0);
        let rho = up.reduced_density(&[1, 3]).unwrap();
        assert_eq!(rho.0[(0, 0)], Complex64::new(1.0, 0.0));
        assert!((rho.0.iter().map(|z| z.norm()).sum::<f64>() - 1.0).abs() < 1e-15);
        assert_eq!(oracle_distance(&up, &up, &[0, 2]).unwrap(), 0.0);
        // one spin down on site 3: reduction onto (1, 3) is |up, down>
        let flipped = DenseState::basis(5, 1 << 3);
        assert_eq!(flipped.reduced_density(&[1, 3]).unwrap().0[(1, 1)], Complex64::new(1.0, 0.0));
        assert!((oracle_distance(&up, &flipped, &[3]).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn reduction_reproduces_pauli_expectations() {
        use brokensym_core::rdm::pauli_matrix;
        let g = parity_ground_states(&Spectrum::new(&build_hamiltonian(&xy(0.6, 0.3), 8).unwrap()).unwrap()).unwrap();
        let (state, _) = max_broken_state(&g, Orientation::Uniform(Axis::X)).unwrap();
        let rho = state.reduced_density(&[2, 4]).unwrap();
        for axes in [[Axis::X, Axis::Z], [Axis::Y, Axis::Y], [Axis::Z, Axis::I], [Axis::X, Axis::X]] {
            let op = PauliString::new([(2, axes[0]), (4, axes[1])]).unwrap();
            let direct = state.pauli_expectation(&op).unwrap();
            let via_rho = (&rho.0 * pauli_matrix(&axes)).trace();
            assert!((direct - via_rho).norm() < 1e-12, "{op}");
        }
    }

    #[test]
    fn broken_state_is_x_magnetized() {
        let g = parity_ground_states(&Spectrum::new(&build_hamiltonian(&xy(0.5, 0.2), 10).unwrap()).unwrap()).unwrap();
        let (state, _) = max_broken_state(&g, Orientation::Uniform(Axis::X)).unwrap();
        let mx = state.pauli_expectation(&PauliString::single(0, Axis::X)).unwrap().re;
        assert!(mx > 0.9, "{mx}");
        let c = ModelSpec::cluster(1, 3.0 * PI / 8.0).unwrap();
        let g = parity_ground_states(&Spectrum::new(&build_hamiltonian(&c, 12).unwrap()).unwrap()).unwrap();
        let (state, _) = max_broken_state(&g, Orientation::Staggered(Axis::Y)).unwrap();
        let y0 = state.pauli_expectation(&PauliString::single(0, Axis::Y)).unwrap().re;
        let y1 = state.pauli_expectation(&PauliString::single(1, Axis::Y)).unwrap().re;
        assert!(y0 > 0.5 && y1 < -0.5, "{y0} {y1}");
    }

    #[test]
    fn caps_and_fits() {
        assert_eq!(build_hamiltonian(&xy(0.5, 0.2), 15).unwrap_err(), EdError::TooManySites { n: 15, cap: 14 });
        let s = DenseState::basis(4, 0);
        assert!(matches!(s.pauli_expectation(&PauliString::parse("X0 X4").unwrap()), Err(EdError::DoesNotFit { .. })));
    }
}
