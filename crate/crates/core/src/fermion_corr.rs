//! Equal-time Majorana two-point functions of the evolved state,
//! f(r) = <A_r A_0>, g(r) = <B_r A_0>, h(r) = <B_r B_0>.
//!
//! With weights w_k normalized to sum 1 over the grid,
//!
//! g(r) = sum w [(|b|^2 - |a|^2) cos kr + i(a* b - a b*) sin kr]
//! f(r) = delta_r0 - i sum w (a* b + a b*) sin kr
//! h(r) = f(r) - 2 delta_r0
//!
//! All sums run in ascending k so results do not depend on scheduling.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fmath;
use crate::model::MomentumPoint;
use crate::quench::{EvolvedAmplitudes, QuenchProtocol};

/// Tolerance on the structurally vanishing parts (Im g, Re f - delta, ...).
pub const RESIDUE_TOLERANCE: f64 = 1e-9;

/// f, g, h on the window -r_max ..= r_max at one time.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelatorTable {
    t: f64,
    r_max: usize,
    f: Vec<Complex64>,
    g: Vec<f64>,
    h: Vec<Complex64>,
}

impl CorrelatorTable {
    /// Assemble a table from columns indexed by r + r_max. Used by external
    /// sources of contractions (e.g. exact diagonalization).
    pub fn from_columns(t: f64, r_max: usize, f: Vec<Complex64>, g: Vec<f64>, h: Vec<Complex64>) -> Result<Self> {
        let n = 2 * r_max + 1;
        for len in [f.len(), g.len(), h.len()] {
            if len != n {
                return Err(Error::DimensionMismatch(len, n));
            }
        }
        Ok(CorrelatorTable { t, r_max, f, g, h })
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn r_max(&self) -> usize {
        self.r_max
    }

    fn index(&self, r: i64) -> Result<usize> {
        if r.unsigned_abs() as usize > self.r_max {
            return Err(Error::OutOfWindow { r, r_max: self.r_max });
        }
        Ok((r + self.r_max as i64) as usize)
    }

    pub fn f(&self, r: i64) -> Result<Complex64> {
        self.index(r).map(|i| self.f[i])
    }

    pub fn g(&self, r: i64) -> Result<f64> {
        self.index(r).map(|i| self.g[i])
    }

    pub fn h(&self, r: i64) -> Result<Complex64> {
        self.index(r).map(|i| self.h[i])
    }

    /// Largest violation of f(r) + f(-r) = 2 delta, h(r) + h(-r) = -2 delta,
    /// Re f = delta, Re h = -delta.
    pub fn invariant_violation(&self) -> f64 {
        let mut worst: f64 = 0.0;
        let rm = self.r_max as i64;
        for r in -rm..=rm {
            let d = if r == 0 { 1.0 } else { 0.0 };
            let i = (r + rm) as usize;
            let j = (rm - r) as usize;
            worst = worst
                .max((self.f[i] + self.f[j] - 2.0 * d).norm())
                .max((self.h[i] + self.h[j] + 2.0 * d).norm())
                .max((self.f[i].re - d).abs())
                .max((self.h[i].re + d).abs());
        }
        worst
    }

    pub fn rows(&self) -> impl Iterator<Item = CorrelatorRow> + '_ {
        let rm = self.r_max as i64;
        (-rm..=rm).map(move |r| {
            let i = (r + rm) as usize;
            CorrelatorRow { t: self.t, r, f: self.f[i], g: self.g[i], h: self.h[i] }
        })
    }
}

/// One line of the correlator dump.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelatorRow {
    pub t: f64,
    pub r: i64,
    pub f: Complex64,
    pub g: f64,
    pub h: Complex64,
}

fn kronecker(r: i64) -> f64 {
    if r == 0 {
        1.0
    } else {
        0.0
    }
}

/// g(r) evaluated directly in complex arithmetic; the imaginary residue is
/// checked against [`RESIDUE_TOLERANCE`] and dropped.
pub fn g_func(amps: &EvolvedAmplitudes, r: i64) -> Result<f64> {
    let i = Complex64::new(0.0, 1.0);
    let mut acc = Complex64::new(0.0, 0.0);
    for (p, m) in amps.points.iter().zip(&amps.modes) {
        let kr = p.k * r as f64;
        let a = m.alpha;
        let b = m.beta;
        let diag = b.norm_sqr() - a.norm_sqr();
        let cross = i * (a.conj() * b - a * b.conj());
        acc += p.weight * (diag * fmath::cos(kr) + cross * fmath::sin(kr));
    }
    if acc.im.abs() > RESIDUE_TOLERANCE {
        return Err(Error::ImaginaryResidue { r, residue: acc.im });
    }
    Ok(acc.re)
}

fn pairing_sum(amps: &EvolvedAmplitudes, r: i64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for (p, m) in amps.points.iter().zip(&amps.modes) {
        let s = m.alpha.conj() * m.beta + m.alpha * m.beta.conj();
        acc += p.weight * s * fmath::sin(p.k * r as f64);
    }
    Complex64::new(0.0, -1.0) * acc
}

pub fn f_func(amps: &EvolvedAmplitudes, r: i64) -> Result<Complex64> {
    let d = kronecker(r);
    let v = d + pairing_sum(amps, r);
    if (v.re - d).abs() > RESIDUE_TOLERANCE {
        return Err(Error::RealPartDrift { which: 'f', r, drift: v.re - d });
    }
    Ok(v)
}

pub fn h_func(amps: &EvolvedAmplitudes, r: i64) -> Result<Complex64> {
    let d = kronecker(r);
    let v = -d + pairing_sum(amps, r);
    if (v.re + d).abs() > RESIDUE_TOLERANCE {
        return Err(Error::RealPartDrift { which: 'h', r, drift: v.re + d });
    }
    Ok(v)
}

/// Batched table construction with cos(kr), sin(kr) tabulated once per grid.
#[derive(Debug, Clone)]
pub struct TableBuilder {
    points: Vec<MomentumPoint>,
    r_max: usize,
    // row r (0..=r_max) holds w_k cos(kr) / w_k sin(kr) for every k
    wcos: Vec<f64>,
    wsin: Vec<f64>,
}

impl TableBuilder {
    pub fn new(points: &[MomentumPoint], r_max: usize) -> Self {
        let m = points.len();
        let mut wcos = vec![0.0; (r_max + 1) * m];
        let mut wsin = vec![0.0; (r_max + 1) * m];
        for r in 0..=r_max {
            for (j, p) in points.iter().enumerate() {
                let kr = p.k * r as f64;
                wcos[r * m + j] = p.weight * fmath::cos(kr);
                wsin[r * m + j] = p.weight * fmath::sin(kr);
            }
        }
        TableBuilder { points: points.to_vec(), r_max, wcos, wsin }
    }

    pub fn for_protocol(protocol: &QuenchProtocol, r_max: usize) -> Self {
        Self::new(protocol.points(), r_max)
    }

    pub fn r_max(&self) -> usize {
        self.r_max
    }

    pub fn build(&self, amps: &EvolvedAmplitudes) -> Result<CorrelatorTable> {
        let m = self.points.len();
        if amps.modes.len() != m {
            return Err(Error::DimensionMismatch(amps.modes.len(), m));
        }
        // diag_k = |b|^2 - |a|^2, twist_k = 2 Im(a* b), pair_k = 2 Re(a* b)
        let mut diag = Vec::with_capacity(m);
        let mut twist = Vec::with_capacity(m);
        let mut pair = Vec::with_capacity(m);
        for md in &amps.modes {
            let ab = md.alpha.conj() * md.beta;
            diag.push(md.beta.norm_sqr() - md.alpha.norm_sqr());
            twist.push(2.0 * ab.im);
            pair.push(2.0 * ab.re);
        }
        let rm = self.r_max;
        let n = 2 * rm + 1;
        let mut f = vec![Complex64::new(0.0, 0.0); n];
        let mut g = vec![0.0; n];
        let mut h = vec![Complex64::new(0.0, 0.0); n];
        for r in 0..=rm {
            let wc = &self.wcos[r * m..(r + 1) * m];
            let ws = &self.wsin[r * m..(r + 1) * m];
            let (mut c, mut s, mut p) = (0.0, 0.0, 0.0);
            for j in 0..m {
                c += diag[j] * wc[j];
                s += twist[j] * ws[j];
                p += pair[j] * ws[j];
            }
            // i(a*b - ab*) = -2 Im(a*b), so g(+-r) = c -+ s; sin is odd in r.
            g[rm + r] = c - s;
            g[rm - r] = c + s;
            let d = kronecker(r as i64);
            f[rm + r] = Complex64::new(d, -p);
            f[rm - r] = Complex64::new(d, p);
            h[rm + r] = Complex64::new(-d, -p);
            h[rm - r] = Complex64::new(-d, p);
        }
        Ok(CorrelatorTable { t: amps.t, r_max: rm, f, g, h })
    }
}

/// One-shot evolution plus table construction.
pub fn build_table(protocol: &QuenchProtocol, t: f64, r_max: usize) -> Result<CorrelatorTable> {
    let amps = protocol.evolve(t)?;
    TableBuilder::for_protocol(protocol, r_max).build(&amps)
}
