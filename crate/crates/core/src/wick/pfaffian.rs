//! Pfaffians by Parlett-Reid elimination with complete pivoting.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Matrices larger than this are refused rather than silently slow.
pub const DIMENSION_CAP: usize = 512;

/// Scalars the elimination runs on.
pub trait PfScalar:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Div<Output = Self> + Neg<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn modulus(self) -> f64;
}

impl PfScalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn modulus(self) -> f64 {
        self.abs()
    }
}

impl PfScalar for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn modulus(self) -> f64 {
        self.norm()
    }
}

/// Dense square antisymmetric matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ContractionMatrix<T> {
    dim: usize,
    data: Vec<T>,
}

impl<T: PfScalar> ContractionMatrix<T> {
    /// Zero matrix of even dimension `dim`.
    pub fn zeros(dim: usize) -> Result<Self> {
        if dim % 2 == 1 {
            return Err(Error::OddDimension(dim));
        }
        if dim > DIMENSION_CAP {
            return Err(Error::DimensionCap { dim, cap: DIMENSION_CAP });
        }
        Ok(ContractionMatrix { dim, data: vec![T::zero(); dim * dim] })
    }

    /// Fill from the strict upper triangle; the lower triangle is its negative.
    pub fn from_upper(dim: usize, mut upper: impl FnMut(usize, usize) -> T) -> Result<Self> {
        let mut m = Self::zeros(dim)?;
        for p in 0..dim {
            for q in p + 1..dim {
                m.set(p, q, upper(p, q));
            }
        }
        Ok(m)
    }

    /// Row-major dense input; must be antisymmetric to within `tol`.
    pub fn from_dense(dim: usize, data: Vec<T>, tol: f64) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(Error::DimensionMismatch(data.len(), dim * dim));
        }
        let mut m = Self::zeros(dim)?;
        let mut worst: f64 = 0.0;
        for p in 0..dim {
            worst = worst.max(data[p * dim + p].modulus());
            for q in p + 1..dim {
                worst = worst.max((data[p * dim + q] + data[q * dim + p]).modulus());
            }
        }
        if worst > tol {
            return Err(Error::NotAntisymmetric(worst));
        }
        m.data = data;
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Sets (p, q) and (q, p) together.
    pub fn set(&mut self, p: usize, q: usize, v: T) {
        self.data[p * self.dim + q] = v;
        self.data[q * self.dim + p] = -v;
    }

    pub fn get(&self, p: usize, q: usize) -> T {
        self.data[p * self.dim + q]
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn pfaffian(&self) -> T {
        pfaffian_in_place(self.dim, &mut self.data.clone())
    }
}

/// Pfaffian of an antisymmetric matrix.
pub fn pfaffian<T: PfScalar>(m: &ContractionMatrix<T>) -> T {
    m.pfaffian()
}

/// Symmetric swap of indices i and j within the trailing block from k.
fn swap_indices<T: Copy>(n: usize, a: &mut [T], k: usize, i: usize, j: usize) {
    for c in k..n {
        a.swap(i * n + c, j * n + c);
    }
    for r in k..n {
        a.swap(r * n + i, r * n + j);
    }
}

/// Pf of the row-major `a`, which is overwritten.
///
/// Each step moves the largest entry of the trailing block to (k, k+1).
/// With every multiplier bounded by 1, structurally zero blocks that carry
/// only roundoff cannot be amplified.
pub(crate) fn pfaffian_in_place<T: PfScalar>(n: usize, a: &mut [T]) -> T {
    if n == 0 {
        return T::one();
    }
    let mut pf = T::one();
    let mut tau = vec![T::zero(); n];
    let mut col = vec![T::zero(); n];
    let mut k = 0;
    while k + 1 < n {
        let (mut p, mut q, mut best) = (k, k + 1, -1.0);
        for i in k..n {
            for j in i + 1..n {
                let v = a[i * n + j].modulus();
                if v > best {
                    best = v;
                    p = i;
                    q = j;
                }
            }
        }
        if best == 0.0 {
            return T::zero();
        }
        if p != k {
            swap_indices(n, a, k, k, p);
            pf = -pf;
            if q == k {
                q = p;
            }
        }
        if q != k + 1 {
            swap_indices(n, a, k, k + 1, q);
            pf = -pf;
        }
        let piv = a[k * n + k + 1];
        pf = pf * piv;
        if k + 2 < n {
            for j in k + 2..n {
                tau[j] = a[k * n + j] / piv;
                col[j] = a[j * n + k + 1];
            }
            for i in k + 2..n {
                let ti = tau[i];
                let ci = col[i];
                let row = &mut a[i * n..(i + 1) * n];
                for j in k + 2..n {
                    row[j] = row[j] + ti * col[j] - ci * tau[j];
                }
            }
        }
        k += 2;
    }
    pf
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;
    use proptest::prelude::*;

    fn random_antisym(n: usize, seed: u64) -> ContractionMatrix<f64> {
        let mut s = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        ContractionMatrix::from_upper(n, |_, _| {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((s >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
        })
        .unwrap()
    }

    #[test]
    fn two_by_two() {
        let m = ContractionMatrix::from_upper(2, |_, _| 3.5).unwrap();
        assert_eq!(m.pfaffian(), 3.5);
    }

    #[test]
    fn four_by_four_expansion() {
        let v = [0.0, 1.3, -0.4, 2.2, 0.0, 0.7, 0.0, -1.9, 0.0, 0.5];
        // a12 a13 a14 a23 a24 a34 at (0,1) (0,2) (0,3) (1,2) (1,3) (2,3)
        let (a12, a13, a14, a23, a24, a34) = (v[1], v[2], v[3], v[5], v[7], v[9]);
        let m = ContractionMatrix::from_upper(4, |p, q| match (p, q) {
            (0, 1) => a12,
            (0, 2) => a13,
            (0, 3) => a14,
            (1, 2) => a23,
            (1, 3) => a24,
            _ => a34,
        })
        .unwrap();
        let expect = a12 * a34 - a13 * a24 + a14 * a23;
        assert!((m.pfaffian() - expect).abs() < 1e-15);
    }

    #[test]
    fn pivoting_handles_zero_leading_entry() {
        // (0,1) vanishes: without pivoting the first step divides by zero
        let m = ContractionMatrix::from_upper(4, |p, q| match (p, q) {
            (0, 1) | (2, 3) => 0.0,
            (0, 2) => 2.0,
            (1, 3) => 3.0,
            (0, 3) => 0.0,
            _ => 0.0,
        })
        .unwrap();
        assert_eq!(m.pfaffian(), -6.0);
    }

    #[test]
    fn identity_of_empty() {
        assert_eq!(ContractionMatrix::<f64>::zeros(0).unwrap().pfaffian(), 1.0);
    }

    #[test]
    fn errors() {
        assert_eq!(ContractionMatrix::<f64>::zeros(3), Err(Error::OddDimension(3)));
        assert_eq!(ContractionMatrix::<f64>::zeros(514), Err(Error::DimensionCap { dim: 514, cap: 512 }));
        let bad = ContractionMatrix::from_dense(2, vec![0.0, 1.0, 1.0, 0.0], 1e-12);
        assert_eq!(bad, Err(Error::NotAntisymmetric(2.0)));
    }

    #[test]
    fn squared_equals_determinant_up_to_200() {
        for (n, seed) in [(10, 1), (40, 2), (120, 3), (200, 4)] {
            let m = random_antisym(n, seed);
            let pf = m.pfaffian();
            let det = DMatrix::from_row_slice(n, n, m.as_slice()).lu().determinant();
            assert!(((pf * pf - det) / det).abs() < 1e-8, "n={n}: {} vs {}", pf * pf, det);
        }
    }

    #[test]
    fn complex_matches_real_scaled() {
        // Pf(i K) = i^m Pf(K) for a 2m x 2m real K
        let k = random_antisym(8, 9);
        let ik = ContractionMatrix::from_upper(8, |p, q| Complex64::new(0.0, k.get(p, q))).unwrap();
        let expect = Complex64::new(0.0, 1.0).powu(4) * k.pfaffian();
        assert!((ik.pfaffian() - expect).norm() < 1e-12);
    }

    #[test]
    fn block_diagonal_is_product() {
        let m = ContractionMatrix::from_upper(6, |p, q| match (p, q) {
            (0, 1) => 2.0,
            (2, 3) => -3.0,
            (4, 5) => 0.5,
            _ => 0.0,
        })
        .unwrap();
        assert!((m.pfaffian() + 3.0).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn complex_pf_squared_is_det(seed in 0u64..10_000, half in 1usize..8) {
            let n = 2 * half;
            let re = random_antisym(n, seed);
            let im = random_antisym(n, seed + 77);
            let m = ContractionMatrix::from_upper(n, |p, q| Complex64::new(re.get(p, q), im.get(p, q))).unwrap();
            let pf = m.pfaffian();
            let det = DMatrix::from_row_slice(n, n, m.as_slice()).lu().determinant();
            prop_assert!((pf * pf - det).norm() <= 1e-8 * det.norm().max(1e-300));
        }

        #[test]
        fn row_column_swap_flips_sign(seed in 0u64..10_000) {
            let m = random_antisym(6, seed);
            let perm = [1usize, 0, 2, 3, 4, 5];
            let swapped = ContractionMatrix::from_upper(6, |p, q| m.get(perm[p], perm[q])).unwrap();
            prop_assert!((m.pfaffian() + swapped.pfaffian()).abs() < 1e-12);
        }
    }
}
