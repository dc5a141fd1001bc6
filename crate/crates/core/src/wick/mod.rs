//! Pauli-string expectations on the evolving symmetric state.
//!
//! A parity-even string becomes a Majorana monomial under Jordan-Wigner and
//! its expectation is the Pfaffian of the pairwise contractions. Parity-odd
//! (symmetry-breaking) expectations are recovered from the clustering of
//! `O_S O_{S+R}` at large separation R.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_complex::Complex64;

pub mod majorana;
pub mod pauli;
pub mod pfaffian;

pub use majorana::{pauli_to_majorana, Majorana, MajoranaMonomial, Species};
pub use pauli::{Axis, PauliString};
pub use pfaffian::{pfaffian, ContractionMatrix, PfScalar, DIMENSION_CAP};

use crate::error::{Error, Result};
use crate::fermion_corr::{CorrelatorTable, TableBuilder};
use crate::fmath;
use crate::model::ModelSpec;
use crate::quench::QuenchProtocol;

/// Separation used for the factorization unless configured otherwise.
pub const DEFAULT_R: usize = 100;
/// Step to the second separation of the convergence check.
pub const DEFAULT_DELTA_R: usize = 10;
/// Default convergence threshold on broken correlators.
pub const DEFAULT_THRESHOLD: f64 = 1e-9;
/// `<W>` below this is a bug, not roundoff.
pub const NEGATIVE_W_TOLERANCE: f64 = 1e-9;
/// Broken magnitudes below this get no sign of their own.
pub const SIGN_FLOOR: f64 = 1e-9;

/// <gamma_p gamma_q> for two Majoranas in canonical order.
fn contraction(table: &CorrelatorTable, p: Majorana, q: Majorana) -> Result<Complex64> {
    let (i, k) = (p.site, q.site);
    Ok(match (p.species, q.species) {
        (Species::A, Species::A) => table.f(i - k)?,
        (Species::A, Species::B) => Complex64::new(-table.g(k - i)?, 0.0),
        (Species::B, Species::A) => Complex64::new(table.g(i - k)?, 0.0),
        (Species::B, Species::B) => table.h(i - k)?,
    })
}

/// Complex contraction matrix M_pq = <gamma_p gamma_q>, p < q.
pub fn contraction_matrix(mono: &MajoranaMonomial, table: &CorrelatorTable) -> Result<ContractionMatrix<Complex64>> {
    let n = mono.len();
    let mut m = ContractionMatrix::zeros(n)?;
    for p in 0..n {
        for q in p + 1..n {
            m.set(p, q, contraction(table, mono.factors[p], mono.factors[q])?);
        }
    }
    Ok(m)
}

/// Real form: with b = iB every contraction is i times a real number, so
/// <prod gamma> = prefactor (-i)^{n_B} i^{n/2} Pf(K) with K real.
fn real_contraction_matrix(mono: &MajoranaMonomial, table: &CorrelatorTable) -> Result<ContractionMatrix<f64>> {
    let n = mono.len();
    let mut m = ContractionMatrix::zeros(n)?;
    for p in 0..n {
        let a = mono.factors[p];
        for q in p + 1..n {
            let b = mono.factors[q];
            let (i, k) = (a.site, b.site);
            let v = match (a.species, b.species) {
                (Species::A, Species::A) => table.f(i - k)?.im,
                (Species::A, Species::B) => -table.g(k - i)?,
                (Species::B, Species::A) => table.g(i - k)?,
                (Species::B, Species::B) => -table.h(i - k)?.im,
            };
            m.set(p, q, v);
        }
    }
    Ok(m)
}

/// Expectation of a Majorana monomial on the Gaussian state of `table`.
pub fn monomial_expectation(mono: &MajoranaMonomial, table: &CorrelatorTable) -> Result<Complex64> {
    if mono.vanishes_structurally() {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let pf = real_contraction_matrix(mono, table)?.pfaffian();
    let quarter_turns = (3 * mono.count_b() + mono.len() / 2) % 4;
    Ok(mono.prefactor * Complex64::new(0.0, 1.0).powu(quarter_turns as u32) * pf)
}

/// <op> on the evolved symmetric state; `op` must commute with the parity.
pub fn symmetric_expectation(op: &PauliString, table: &CorrelatorTable) -> Result<Complex64> {
    if op.is_identity() {
        return Ok(Complex64::new(1.0, 0.0));
    }
    if !op.is_even() {
        return Err(Error::ParityMismatch { expected_even: true });
    }
    monomial_expectation(&pauli_to_majorana(op)?, table)
}

fn require_odd(op: &PauliString) -> Result<()> {
    if op.is_even() {
        Err(Error::ParityMismatch { expected_even: false })
    } else {
        Ok(())
    }
}

fn clamp_root(w: f64) -> Result<f64> {
    if w < -NEGATIVE_W_TOLERANCE {
        return Err(Error::NegativeW(w));
    }
    Ok(fmath::sqrt(w.max(0.0)))
}

/// |<op>| in the maximally broken state, as sqrt(<op_S op_{S+R}>).
pub fn broken_expectation(op: &PauliString, table: &CorrelatorTable, r: usize) -> Result<f64> {
    require_odd(op)?;
    clamp_root(symmetric_expectation(&op.doubled(r)?, table)?.re)
}

/// <op_S partner_{S+R}>, which factorizes into <op> <partner>.
pub fn broken_cross(op: &PauliString, partner: &PauliString, table: &CorrelatorTable, r: usize) -> Result<f64> {
    require_odd(op)?;
    require_odd(partner)?;
    let w = op
        .disjoint_product(&partner.translate(r as i64))
        .map_err(|_| Error::OverlappingSupport { r, span: op.span().max(partner.span()) })?;
    Ok(symmetric_expectation(&w, table)?.re)
}

/// Fixes the overall sign of broken correlators: which magnetization the
/// maximally broken state carries with positive sign.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    /// <sigma^axis_i> > 0 on every site.
    Uniform(Axis),
    /// (-1)^i <sigma^axis_i> > 0.
    Staggered(Axis),
}

impl Orientation {
    pub fn for_model(model: &ModelSpec) -> Self {
        match model {
            ModelSpec::Xy { .. } => Orientation::Uniform(Axis::X),
            ModelSpec::ClusterIsing { .. } => Orientation::Staggered(Axis::Y),
        }
    }

    /// The single-site reference operator at `site` and the sign its
    /// expectation carries.
    pub fn reference(&self, site: i64) -> (PauliString, f64) {
        match *self {
            Orientation::Uniform(axis) => (PauliString::single(site, axis), 1.0),
            Orientation::Staggered(axis) => {
                let s = if site.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
                (PauliString::single(site, axis), s)
            }
        }
    }
}

/// Expectations at one time sample, with parity-even values cached by
/// their translation class.
#[derive(Debug)]
pub struct BrokenEvaluator<'a> {
    table: &'a CorrelatorTable,
    r: usize,
    orientation: Orientation,
    cache: BTreeMap<PauliString, f64>,
}

impl<'a> BrokenEvaluator<'a> {
    pub fn new(table: &'a CorrelatorTable, r: usize, orientation: Orientation) -> Self {
        BrokenEvaluator { table, r, orientation, cache: BTreeMap::new() }
    }

    pub fn table(&self) -> &CorrelatorTable {
        self.table
    }

    pub fn r(&self) -> usize {
        self.r
    }

    /// Real part of an even expectation, cached.
    pub fn even(&mut self, op: &PauliString) -> Result<f64> {
        let key = op.anchored();
        if let Some(v) = self.cache.get(&key) {
            return Ok(*v);
        }
        let v = symmetric_expectation(&key, self.table)?.re;
        self.cache.insert(key, v);
        Ok(v)
    }

    pub fn magnitude_at(&mut self, op: &PauliString, r: usize) -> Result<f64> {
        require_odd(op)?;
        let w = op.doubled(r)?;
        clamp_root(self.even(&w)?)
    }

    pub fn magnitude(&mut self, op: &PauliString) -> Result<f64> {
        self.magnitude_at(op, self.r)
    }

    pub fn cross(&mut self, op: &PauliString, partner: &PauliString) -> Result<f64> {
        require_odd(op)?;
        require_odd(partner)?;
        let w = op
            .disjoint_product(&partner.translate(self.r as i64))
            .map_err(|_| Error::OverlappingSupport { r: self.r, span: op.span().max(partner.span()) })?;
        self.even(&w)
    }

    /// Signed broken correlators of `ops` in the maximally broken state.
    ///
    /// Magnitudes come from sqrt(<O_S O_{S+R}>). The largest one becomes the
    /// pivot P; every other sign is read off <O_S P_{S+R}>, and P's own sign
    /// off its cross correlator with the orientation reference.
    pub fn signed(&mut self, ops: &[PauliString]) -> Result<Vec<f64>> {
        let mags = ops.iter().map(|op| self.magnitude(op)).collect::<Result<Vec<f64>>>()?;
        let mut ip = 0;
        for (i, m) in mags.iter().enumerate() {
            if *m > mags[ip] {
                ip = i;
            }
        }
        if mags.is_empty() || mags[ip] < SIGN_FLOOR {
            return Ok(mags);
        }
        let pivot = ops[ip].clone();
        let site = pivot.first_site().unwrap_or(0);
        let (reference, near_sign) = self.orientation.reference(site);
        let pivot_sign = if pivot == reference {
            near_sign
        } else {
            let far_sign = self.orientation.reference(site + self.r as i64).1;
            let c = self.cross(&pivot, &reference)?;
            if c.abs() < SIGN_FLOOR * SIGN_FLOOR {
                1.0
            } else {
                c.signum() * far_sign
            }
        };
        let mut out = Vec::with_capacity(ops.len());
        for (i, op) in ops.iter().enumerate() {
            let m = mags[i];
            if i == ip {
                out.push(pivot_sign * m);
            } else if m < SIGN_FLOOR {
                out.push(m);
            } else {
                let c = self.cross(op, &pivot)?;
                out.push(c.signum() * pivot_sign * m);
            }
        }
        Ok(out)
    }
}

/// First time whose difference exceeds `threshold`, or +inf.
pub fn horizon_from_differences(times: &[f64], diffs: &[f64], threshold: f64) -> Result<f64> {
    if !(threshold > 0.0) {
        return Err(Error::NonPositiveThreshold(threshold));
    }
    Ok(times.iter().zip(diffs).find(|(_, d)| !(d.abs() <= threshold)).map(|(t, _)| *t).unwrap_or(f64::INFINITY))
}

/// |b(R) - b(R + delta_R)| for one broken correlator at one time sample.
/// A negative `<W>` beyond roundoff counts as unconverged (infinite).
pub fn convergence_gap(op: &PauliString, table: &CorrelatorTable, r: usize, delta_r: usize) -> Result<f64> {
    let near = broken_expectation(op, table, r);
    let far = broken_expectation(op, table, r + delta_r);
    match (near, far) {
        (Ok(a), Ok(b)) => Ok((a - b).abs()),
        (Err(Error::NegativeW(_)), _) | (_, Err(Error::NegativeW(_))) => Ok(f64::INFINITY),
        (Err(e), _) | (_, Err(e)) => Err(e),
    }
}

/// Time t* up to which the broken correlator of `op` is converged in R.
pub fn validity_horizon(
    op: &PauliString,
    protocol: &QuenchProtocol,
    times: &[f64],
    r: usize,
    delta_r: usize,
    threshold: f64,
) -> Result<f64> {
    if !(threshold > 0.0) {
        return Err(Error::NonPositiveThreshold(threshold));
    }
    require_odd(op)?;
    let builder = TableBuilder::for_protocol(protocol, r + delta_r + op.span() + 1);
    for &t in times {
        let table = builder.build(&protocol.evolve(t)?)?;
        if !(convergence_gap(op, &table, r, delta_r)? <= threshold) {
            return Ok(t);
        }
    }
    Ok(f64::INFINITY)
}

/// Table window needed to evaluate strings of span `span` at separation `r`.
pub fn required_window(span: usize, r: usize) -> usize {
    r + span + 1
}
