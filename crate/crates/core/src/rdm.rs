//! Reduced density matrices of spin subsets and the maximal local
//! distinguishability between symmetric and symmetry-broken ground states.
//!
//! Operators on a subset of l spins are 2^l x 2^l matrices in the product
//! basis with the first site most significant and |up> (sigma^z = +1) first.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fermion_corr::{CorrelatorTable, TableBuilder};
use crate::quench::QuenchProtocol;
use crate::wick::{symmetric_expectation, Axis, BrokenEvaluator, Orientation, PauliString};

pub const DEFAULT_L_MAX: usize = 4;

pub type CMatrix = DMatrix<Complex64>;

/// Ordered set of distinct spin positions.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SpinSubset {
    sites: Vec<i64>,
}

impl SpinSubset {
    pub fn new(mut sites: Vec<i64>) -> Result<Self> {
        sites.sort_unstable();
        if sites.is_empty() || sites.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidSubset);
        }
        Ok(SpinSubset { sites })
    }

    pub fn sites(&self) -> &[i64] {
        &self.sites
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn span(&self) -> usize {
        (self.sites[self.sites.len() - 1] - self.sites[0]) as usize
    }

    /// Column label such as `s1_2_3`.
    pub fn label(&self) -> String {
        let parts: Vec<String> = self.sites.iter().map(|s| format!("{s}")).collect();
        format!("s{}", parts.join("_"))
    }
}

/// One element of the Pauli basis on a subset.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisString {
    pub axes: Vec<Axis>,
    pub op: PauliString,
    pub even: bool,
}

/// All 4^l Pauli strings on `subset`, lexicographic in (site, axis).
pub fn enumerate_basis(subset: &SpinSubset, l_max: usize) -> Result<Vec<BasisString>> {
    let l = subset.len();
    if l > l_max {
        return Err(Error::SubsetTooLarge { l, l_max });
    }
    let mut out = Vec::with_capacity(1 << (2 * l));
    for code in 0..(1usize << (2 * l)) {
        let axes: Vec<Axis> = (0..l).map(|i| Axis::ALL[(code >> (2 * (l - 1 - i))) & 3]).collect();
        let op = PauliString::new(subset.sites.iter().copied().zip(axes.iter().copied()))?;
        let even = op.is_even();
        out.push(BasisString { axes, op, even });
    }
    Ok(out)
}

fn single_site(axis: Axis) -> [[Complex64; 2]; 2] {
    let o = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    match axis {
        Axis::I => [[one, o], [o, one]],
        Axis::X => [[o, one], [one, o]],
        Axis::Y => [[o, -i], [i, o]],
        Axis::Z => [[one, o], [o, -one]],
    }
}

/// Dense matrix of a product of Pauli factors, first factor most significant.
pub fn pauli_matrix(axes: &[Axis]) -> CMatrix {
    let dim = 1usize << axes.len();
    let l = axes.len();
    CMatrix::from_fn(dim, dim, |row, col| {
        let mut v = Complex64::new(1.0, 0.0);
        for (i, &a) in axes.iter().enumerate() {
            let shift = l - 1 - i;
            v *= single_site(a)[(row >> shift) & 1][(col >> shift) & 1];
            if v == Complex64::new(0.0, 0.0) {
                break;
            }
        }
        v
    })
}

/// (1/2^l) sum_O c_O O over the given basis elements.
fn assemble(basis: &[BasisString], coeffs: impl Iterator<Item = (usize, f64)>, l: usize) -> CMatrix {
    let dim = 1usize << l;
    let mut m = CMatrix::zeros(dim, dim);
    for (i, c) in coeffs {
        if c != 0.0 {
            m += pauli_matrix(&basis[i].axes) * Complex64::new(c, 0.0);
        }
    }
    m / Complex64::new(dim as f64, 0.0)
}

/// Hermitian matrix with unit trace.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedDensityMatrix(pub CMatrix);

/// Traceless Hermitian part carried by the parity-odd correlators.
#[derive(Debug, Clone, PartialEq)]
pub struct ChiMatrix(pub CMatrix);

fn hermiticity_error(m: &CMatrix) -> f64 {
    (m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let sym = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let mut ev: Vec<f64> = sym.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

impl ReducedDensityMatrix {
    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn trace(&self) -> Complex64 {
        self.0.trace()
    }

    pub fn hermiticity_error(&self) -> f64 {
        hermiticity_error(&self.0)
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.0)
    }
}

impl ChiMatrix {
    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn hermiticity_error(&self) -> f64 {
        hermiticity_error(&self.0)
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.0)
    }

    pub fn negated(&self) -> ChiMatrix {
        ChiMatrix(-self.0.clone())
    }
}

/// Ground-state superposition u|e> + v|o>.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuperpositionCoeffs {
    pub u: Complex64,
    pub v: Complex64,
}

impl SuperpositionCoeffs {
    pub fn new(u: Complex64, v: Complex64) -> Result<Self> {
        let n = u.norm_sqr() + v.norm_sqr();
        if (n - 1.0).abs() > 1e-12 {
            return Err(Error::NotNormalized(n));
        }
        Ok(SuperpositionCoeffs { u, v })
    }

    pub fn symmetric() -> Self {
        SuperpositionCoeffs { u: Complex64::new(1.0, 0.0), v: Complex64::new(0.0, 0.0) }
    }

    pub fn maximally_broken() -> Self {
        let a = core::f64::consts::FRAC_1_SQRT_2;
        SuperpositionCoeffs { u: Complex64::new(a, 0.0), v: Complex64::new(a, 0.0) }
    }

    /// u* v + v* u
    pub fn mixing(&self) -> f64 {
        2.0 * (self.u.conj() * self.v).re
    }
}

/// Symmetric-state reduction from parity-even correlators.
pub fn build_rho_sym(subset: &SpinSubset, table: &CorrelatorTable) -> Result<ReducedDensityMatrix> {
    let basis = enumerate_basis(subset, DEFAULT_L_MAX)?;
    rho_sym_from_basis(&basis, subset.len(), |op| Ok(symmetric_expectation(op, table)?.re))
}

fn rho_sym_from_basis(
    basis: &[BasisString],
    l: usize,
    mut even: impl FnMut(&PauliString) -> Result<f64>,
) -> Result<ReducedDensityMatrix> {
    let mut coeffs = Vec::new();
    for (i, b) in basis.iter().enumerate() {
        if b.even {
            coeffs.push((i, even(&b.op)?));
        }
    }
    Ok(ReducedDensityMatrix(assemble(basis, coeffs.into_iter(), l)))
}

/// chi~ from the signed broken correlators of every odd basis string.
pub fn build_chi_tilde(subset: &SpinSubset, evaluator: &mut BrokenEvaluator<'_>) -> Result<ChiMatrix> {
    let basis = enumerate_basis(subset, DEFAULT_L_MAX)?;
    chi_from_basis(&basis, subset.len(), evaluator)
}

fn chi_from_basis(basis: &[BasisString], l: usize, evaluator: &mut BrokenEvaluator<'_>) -> Result<ChiMatrix> {
    let idx: Vec<usize> = (0..basis.len()).filter(|&i| !basis[i].even).collect();
    let ops: Vec<PauliString> = idx.iter().map(|&i| basis[i].op.clone()).collect();
    let values = evaluator.signed(&ops)?;
    Ok(ChiMatrix(assemble(basis, idx.into_iter().zip(values), l)))
}

/// rho(u, v) = rho_sym + (u* v + v* u) chi~.
pub fn build_rho(
    coeffs: SuperpositionCoeffs,
    rho_sym: &ReducedDensityMatrix,
    chi: &ChiMatrix,
) -> Result<ReducedDensityMatrix> {
    if rho_sym.dim() != chi.dim() {
        return Err(Error::DimensionMismatch(rho_sym.dim(), chi.dim()));
    }
    Ok(ReducedDensityMatrix(&rho_sym.0 + &chi.0 * Complex64::new(coeffs.mixing(), 0.0)))
}

/// (1/2) sum |eig(a - b)|.
pub fn trace_distance(a: &ReducedDensityMatrix, b: &ReducedDensityMatrix) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(a.dim(), b.dim()));
    }
    Ok(0.5 * hermitian_eigenvalues(&(&a.0 - &b.0)).iter().map(|x| x.abs()).sum::<f64>())
}

/// D_S = (1/2) sum |nu_i| over the spectrum of chi~.
pub fn max_distance(chi: &ChiMatrix) -> f64 {
    0.5 * chi.eigenvalues().iter().map(|x| x.abs()).sum::<f64>()
}

/// Refuse samples at or past the validity horizon unless overridden.
pub fn check_horizon(t: f64, t_star: f64, allow_unconverged: bool) -> Result<()> {
    if t >= t_star && !allow_unconverged {
        return Err(Error::PastHorizon { t, t_star });
    }
    Ok(())
}

/// Separations and threshold of the factorization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WickSettings {
    pub r: usize,
    pub delta_r: usize,
    pub threshold: f64,
}

impl Default for WickSettings {
    fn default() -> Self {
        WickSettings {
            r: crate::wick::DEFAULT_R,
            delta_r: crate::wick::DEFAULT_DELTA_R,
            threshold: crate::wick::DEFAULT_THRESHOLD,
        }
    }
}

/// Everything computed at one time sample.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceSample {
    pub t: f64,
    /// D_S per subset, in subset order.
    pub distances: Vec<f64>,
    /// |<O>| at separation R per tracked operator; NaN when <W> went negative.
    pub magnitudes: Vec<f64>,
    /// |b(R) - b(R + delta_R)| per tracked operator; +inf when <W> went negative.
    pub gaps: Vec<f64>,
}

/// Evaluates D_S(t) for a fixed list of subsets along a quench.
#[derive(Debug, Clone)]
pub struct DistanceEngine {
    protocol: QuenchProtocol,
    builder: TableBuilder,
    subsets: Vec<(SpinSubset, Vec<BasisString>)>,
    tracked: Vec<PauliString>,
    settings: WickSettings,
    orientation: Orientation,
}

impl DistanceEngine {
    pub fn new(
        protocol: QuenchProtocol,
        subsets: &[SpinSubset],
        tracked: &[PauliString],
        settings: WickSettings,
        l_max: usize,
    ) -> Result<Self> {
        if !(settings.threshold > 0.0) {
            return Err(Error::NonPositiveThreshold(settings.threshold));
        }
        let orientation = Orientation::for_model(protocol.model_initial());
        if let Orientation::Staggered(_) = orientation {
            for s in [settings.r, settings.delta_r] {
                if s % 2 == 1 {
                    return Err(Error::OddSeparation(s));
                }
            }
        }
        let mut span = 0;
        let mut with_basis = Vec::with_capacity(subsets.len());
        for s in subsets {
            span = span.max(s.span());
            with_basis.push((s.clone(), enumerate_basis(s, l_max)?));
        }
        for op in tracked {
            if op.is_even() {
                return Err(Error::ParityMismatch { expected_even: false });
            }
            span = span.max(op.span());
        }
        if settings.r <= span {
            return Err(Error::OverlappingSupport { r: settings.r, span });
        }
        let builder = TableBuilder::for_protocol(&protocol, settings.r + settings.delta_r + span + 1);
        Ok(DistanceEngine { protocol, builder, subsets: with_basis, tracked: tracked.to_vec(), settings, orientation })
    }

    pub fn protocol(&self) -> &QuenchProtocol {
        &self.protocol
    }

    pub fn settings(&self) -> WickSettings {
        self.settings
    }

    pub fn subsets(&self) -> impl Iterator<Item = &SpinSubset> {
        self.subsets.iter().map(|(s, _)| s)
    }

    pub fn tracked(&self) -> &[PauliString] {
        &self.tracked
    }

    pub fn table(&self, t: f64) -> Result<CorrelatorTable> {
        self.builder.build(&self.protocol.evolve(t)?)
    }

    /// rho_sym and chi~ for every subset at time t.
    pub fn matrices(&self, t: f64) -> Result<Vec<(ReducedDensityMatrix, ChiMatrix)>> {
        let table = self.table(t)?;
        let mut ev = BrokenEvaluator::new(&table, self.settings.r, self.orientation);
        let mut out = Vec::with_capacity(self.subsets.len());
        for (s, basis) in &self.subsets {
            let rho = rho_sym_from_basis(basis, s.len(), |op| ev.even(op))?;
            let chi = chi_from_basis(basis, s.len(), &mut ev)?;
            out.push((rho, chi));
        }
        Ok(out)
    }

    pub fn sample(&self, t: f64) -> Result<DistanceSample> {
        let table = self.table(t)?;
        let mut ev = BrokenEvaluator::new(&table, self.settings.r, self.orientation);
        let mut distances = Vec::with_capacity(self.subsets.len());
        for (s, basis) in &self.subsets {
            distances.push(max_distance(&chi_from_basis(basis, s.len(), &mut ev)?));
        }
        let far = self.settings.r + self.settings.delta_r;
        let mut magnitudes = Vec::with_capacity(self.tracked.len());
        let mut gaps = Vec::with_capacity(self.tracked.len());
        for op in &self.tracked {
            let near = ev.magnitude(op);
            magnitudes.push(near.as_ref().copied().unwrap_or(f64::NAN));
            let gap = match (near, ev.magnitude_at(op, far)) {
                (Ok(a), Ok(b)) => (a - b).abs(),
                (Err(Error::NegativeW(_)), _) | (_, Err(Error::NegativeW(_))) => f64::INFINITY,
                (Err(e), _) | (_, Err(e)) => return Err(e),
            };
            gaps.push(gap);
        }
        Ok(DistanceSample { t, distances, magnitudes, gaps })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fermion_corr::build_table;
    use crate::model::{analytic_order_parameter, ModelSpec, MomentumGrid};
    use core::f64::consts::{FRAC_1_SQRT_2, PI};
    use proptest::prelude::*;

    fn subset(s: &[i64]) -> SpinSubset {
        SpinSubset::new(s.to_vec()).unwrap()
    }

    fn engine(model0: ModelSpec, model1: ModelSpec, subsets: &[SpinSubset], r: usize) -> DistanceEngine {
        let q = QuenchProtocol::new(model0, model1, MomentumGrid::thermodynamic(2048)).unwrap();
        DistanceEngine::new(q, subsets, &[], WickSettings { r, delta_r: 10, threshold: 1e-9 }, 4).unwrap()
    }

    #[test]
    fn basis_sizes_and_order() {
        for (l, odd) in [(1, 2), (2, 8), (3, 32)] {
            let sites: Vec<i64> = (0..l).collect();
            let b = enumerate_basis(&subset(&sites), 4).unwrap();
            assert_eq!(b.len(), 1 << (2 * l));
            assert_eq!(b.iter().filter(|x| !x.even).count(), odd);
        }
        let b = enumerate_basis(&subset(&[4]), 4).unwrap();
        let axes: Vec<Axis> = b.iter().map(|x| x.axes[0]).collect();
        assert_eq!(axes, vec![Axis::I, Axis::X, Axis::Y, Axis::Z]);
        let b = enumerate_basis(&subset(&[0, 1]), 4).unwrap();
        assert_eq!(b[1].axes, vec![Axis::I, Axis::X]);
        assert_eq!(b[4].axes, vec![Axis::X, Axis::I]);
        assert_eq!(enumerate_basis(&subset(&[0, 1, 2, 3, 4]), 4), Err(Error::SubsetTooLarge { l: 5, l_max: 4 }));
    }

    #[test]
    fn subset_validation() {
        assert_eq!(SpinSubset::new(vec![]), Err(Error::InvalidSubset));
        assert_eq!(SpinSubset::new(vec![1, 1]), Err(Error::InvalidSubset));
        assert_eq!(subset(&[3, 1]).sites(), &[1, 3]);
        assert_eq!(subset(&[1, 2, 3]).label(), "s1_2_3");
    }

    #[test]
    fn pauli_matrices_compose() {
        let zx = pauli_matrix(&[Axis::Z, Axis::X]);
        // |up,down> -> |up,up> with +1; |down,up> -> -|down,down>
        assert_eq!(zx[(0, 1)], Complex64::new(1.0, 0.0));
        assert_eq!(zx[(2, 3)], Complex64::new(-1.0, 0.0));
        let y = pauli_matrix(&[Axis::Y]);
        assert_eq!(&y * &y, CMatrix::identity(2, 2));
    }

    #[test]
    fn single_spin_closed_forms() {
        let model = ModelSpec::xy(0.5, 0.2).unwrap();
        let e = engine(model, model, &[subset(&[0])], 100);
        let (rho, chi) = e.matrices(0.0).unwrap().remove(0);
        let table = e.table(0.0).unwrap();
        let sz = -table.g(0).unwrap();
        let ev = rho.eigenvalues();
        assert!((ev[0] - (1.0 - sz) / 2.0).abs() < 1e-12 && (ev[1] - (1.0 + sz) / 2.0).abs() < 1e-12);
        let m = analytic_order_parameter(&model).unwrap();
        assert!((chi.0[(0, 1)].re - m / 2.0).abs() < 1e-6);
        assert!((max_distance(&chi) - m / 2.0).abs() < 1e-6);
        assert!((max_distance(&chi) - 0.4830).abs() < 1e-4);
    }

    #[test]
    fn saturated_field_is_polarized() {
        let q =
            QuenchProtocol::stationary(ModelSpec::xy(0.5, 40.0).unwrap(), MomentumGrid::thermodynamic(512)).unwrap();
        let rho = build_rho_sym(&subset(&[0]), &build_table(&q, 0.0, 2).unwrap()).unwrap();
        assert!((rho.0[(0, 0)].re - 1.0).abs() < 1e-3 && rho.0[(1, 1)].re.abs() < 1e-3);
    }

    #[test]
    fn symmetric_phase_has_no_broken_part() {
        let model = ModelSpec::xy(0.5, 1.5).unwrap();
        let e = engine(model, model, &[subset(&[0]), subset(&[0, 1, 2])], 60);
        for d in e.sample(0.0).unwrap().distances {
            assert!(d < 1e-6, "{d}");
        }
    }

    #[test]
    fn rho_invariants_and_maximality() {
        let e = engine(
            ModelSpec::xy(0.5, 0.2).unwrap(),
            ModelSpec::xy(0.5, 0.8).unwrap(),
            &[subset(&[1, 2, 3]), subset(&[1, 3])],
            60,
        );
        for t in [0.0, 1.3] {
            for (rho, chi) in e.matrices(t).unwrap() {
                assert!((rho.trace().re - 1.0).abs() < 1e-9);
                assert!(rho.hermiticity_error() < 1e-10 && chi.hermiticity_error() < 1e-10);
                assert!(chi.0.trace().norm() < 1e-10);
                let d = max_distance(&chi);
                assert!(d > 0.0);
                let rmax = build_rho(SuperpositionCoeffs::maximally_broken(), &rho, &chi).unwrap();
                assert!(rmax.eigenvalues()[0] > -1e-8);
                assert!((trace_distance(&rmax, &rho).unwrap() - d).abs() < 1e-10);
                assert!((max_distance(&chi.negated()) - d).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn superposition_special_cases() {
        let rho = ReducedDensityMatrix(CMatrix::identity(2, 2) * Complex64::new(0.5, 0.0));
        let chi = ChiMatrix(pauli_matrix(&[Axis::X]) * Complex64::new(0.3, 0.0));
        let sym = build_rho(SuperpositionCoeffs::symmetric(), &rho, &chi).unwrap();
        assert_eq!(sym, rho);
        let i_phase =
            SuperpositionCoeffs::new(Complex64::new(FRAC_1_SQRT_2, 0.0), Complex64::new(0.0, FRAC_1_SQRT_2)).unwrap();
        assert!((build_rho(i_phase, &rho, &chi).unwrap().0 - &rho.0).norm() < 1e-15);
        assert!(SuperpositionCoeffs::new(Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)).is_err());
    }

    #[test]
    fn trace_distance_examples() {
        let up = ReducedDensityMatrix(CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
        ])));
        let down = ReducedDensityMatrix(CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
        ])));
        assert_eq!(trace_distance(&up, &up).unwrap(), 0.0);
        assert!((trace_distance(&up, &down).unwrap() - 1.0).abs() < 1e-15);
        let big = ReducedDensityMatrix(CMatrix::identity(4, 4));
        assert_eq!(trace_distance(&up, &big), Err(Error::DimensionMismatch(2, 4)));
    }

    #[test]
    fn cluster_small_subsets_are_degenerate() {
        let model0 = ModelSpec::cluster(1, 5.0 * PI / 16.0).unwrap();
        let model1 = ModelSpec::cluster(1, 7.0 * PI / 16.0).unwrap();
        let e = engine(model0, model1, &[subset(&[1]), subset(&[1, 2]), subset(&[1, 3])], 100);
        for t in [0.0, 0.7, 2.0] {
            let d = e.sample(t).unwrap().distances;
            assert!((d[0] - d[1]).abs() < 1e-8 && (d[0] - d[2]).abs() < 1e-8, "{t}: {d:?}");
        }
    }

    #[test]
    fn cluster_rejects_odd_separation() {
        let m = ModelSpec::cluster(1, 1.2).unwrap();
        let q = QuenchProtocol::stationary(m, MomentumGrid::thermodynamic(64)).unwrap();
        let s = WickSettings { r: 21, delta_r: 10, threshold: 1e-9 };
        assert_eq!(DistanceEngine::new(q, &[subset(&[0])], &[], s, 4).unwrap_err(), Error::OddSeparation(21));
    }

    #[test]
    fn horizon_clip() {
        assert!(check_horizon(1.0, 2.0, false).is_ok());
        assert_eq!(check_horizon(2.0, 2.0, false), Err(Error::PastHorizon { t: 2.0, t_star: 2.0 }));
        assert!(check_horizon(3.0, 2.0, true).is_ok());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        #[test]
        fn random_superpositions_never_exceed_d(theta in 0.0..PI, phase in 0.0..(2.0 * PI), t in 0.0..3.0f64) {
            let e = engine(ModelSpec::xy(0.5, 0.2).unwrap(), ModelSpec::xy(0.5, 0.8).unwrap(), &[subset(&[0, 1])], 40);
            let (rho, chi) = e.matrices(t).unwrap().remove(0);
            let d = max_distance(&chi);
            let c = SuperpositionCoeffs::new(
                Complex64::new((theta / 2.0).cos(), 0.0),
                Complex64::from_polar((theta / 2.0).sin(), phase),
            ).unwrap();
            let r = build_rho(c, &rho, &chi).unwrap();
            prop_assert!(trace_distance(&r, &rho).unwrap() <= d + 1e-10);
        }
    }
}
