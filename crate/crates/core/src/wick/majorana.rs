use alloc::vec::Vec;

use num_complex::Complex64;

use super::pauli::{Axis, PauliString};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Species {
    /// A_j = c_j + c_j^dag, Hermitian, squares to 1.
    A,
    /// B_j = c_j - c_j^dag, anti-Hermitian, squares to -1.
    B,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Majorana {
    pub site: i64,
    pub species: Species,
}

/// `prefactor` times an ordered product of distinct Majoranas, sorted by
/// (site, species) with A before B.
#[derive(Debug, Clone, PartialEq)]
pub struct MajoranaMonomial {
    pub prefactor: Complex64,
    pub factors: Vec<Majorana>,
}

impl MajoranaMonomial {
    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    /// Odd monomials change fermion parity and have zero expectation on
    /// every parity eigenstate.
    pub fn vanishes_structurally(&self) -> bool {
        self.factors.len() % 2 == 1
    }

    pub fn count_b(&self) -> usize {
        self.factors.iter().filter(|m| m.species == Species::B).count()
    }
}

/// Product of two canonical index lists (index 2s for A_s, 2s+1 for B_s).
/// Returns the sign and the canonical list of the result.
pub(crate) fn multiply_canonical(x: &[u32], y: &[u32]) -> (f64, Vec<u32>) {
    let mut sign = 1.0;
    let mut out = Vec::with_capacity(x.len() + y.len());
    let (mut i, mut j) = (0, 0);
    while i < x.len() || j < y.len() {
        if j == y.len() || (i < x.len() && x[i] < y[j]) {
            out.push(x[i]);
            i += 1;
        } else if i == x.len() || y[j] < x[i] {
            // y[j] moves left past every remaining element of x
            if (x.len() - i) % 2 == 1 {
                sign = -sign;
            }
            out.push(y[j]);
            j += 1;
        } else {
            // y[j] == x[i]: it passes x[i+1..] and then meets its partner
            if (x.len() - i - 1) % 2 == 1 {
                sign = -sign;
            }
            if x[i] % 2 == 1 {
                sign = -sign;
            }
            i += 1;
            j += 1;
        }
    }
    (sign, out)
}

/// Jordan-Wigner image of a Pauli string, with
/// sigma^x_j = S_j A_j, sigma^y_j = i S_j B_j, sigma^z_j = A_j B_j and
/// S_j the string of sigma^z below site j.
///
/// Strings are cut at the first support site. For even operators the cut
/// tails cancel exactly; for odd operators the dropped tail is a parity-even
/// factor far to the left and the expectation vanishes either way.
pub fn pauli_to_majorana(op: &PauliString) -> Result<MajoranaMonomial> {
    let base = op.first_site().ok_or(Error::EmptyString)?;
    let mut prefactor = Complex64::new(1.0, 0.0);
    let mut acc: Vec<u32> = Vec::new();
    let mut image: Vec<u32> = Vec::new();
    for &(site, axis) in op.factors() {
        let a = 2 * (site - base) as u32;
        image.clear();
        match axis {
            Axis::I => continue,
            Axis::X => {
                image.extend(0..a);
                image.push(a);
            }
            Axis::Y => {
                image.extend(0..a);
                image.push(a + 1);
                prefactor *= Complex64::new(0.0, 1.0);
            }
            Axis::Z => image.extend([a, a + 1]),
        }
        let (s, next) = multiply_canonical(&acc, &image);
        prefactor *= s;
        acc = next;
    }
    let factors = acc
        .into_iter()
        .map(|c| Majorana { site: base + i64::from(c / 2), species: if c % 2 == 0 { Species::A } else { Species::B } })
        .collect();
    Ok(MajoranaMonomial { prefactor, factors })
}
