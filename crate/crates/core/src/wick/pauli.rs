use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};

/// Single-site Pauli factor. The declaration order is the basis order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Axis {
    I,
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 4] = [Axis::I, Axis::X, Axis::Y, Axis::Z];

    /// X and Y flip the local sigma^z and so anticommute with the global parity.
    pub fn is_flip(self) -> bool {
        matches!(self, Axis::X | Axis::Y)
    }

    pub fn symbol(self) -> char {
        match self {
            Axis::I => 'I',
            Axis::X => 'X',
            Axis::Y => 'Y',
            Axis::Z => 'Z',
        }
    }

    pub fn from_symbol(c: char) -> Option<Axis> {
        match c.to_ascii_uppercase() {
            'I' => Some(Axis::I),
            'X' => Some(Axis::X),
            'Y' => Some(Axis::Y),
            'Z' => Some(Axis::Z),
            _ => None,
        }
    }
}

/// Tensor product of Pauli matrices on strictly ascending sites. Identity
/// factors are dropped, so the empty string is the identity operator.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PauliString {
    factors: Vec<(i64, Axis)>,
}

impl PauliString {
    pub fn new(factors: impl IntoIterator<Item = (i64, Axis)>) -> Result<Self> {
        let factors: Vec<(i64, Axis)> = factors.into_iter().collect();
        if factors.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(Error::UnsortedSupport);
        }
        Ok(PauliString { factors: factors.into_iter().filter(|&(_, a)| a != Axis::I).collect() })
    }

    pub fn identity() -> Self {
        PauliString { factors: Vec::new() }
    }

    pub fn single(site: i64, axis: Axis) -> Self {
        PauliString::new([(site, axis)]).expect("one factor is always ordered")
    }

    /// Parse compact labels such as `"X0 Z1 Y3"`.
    pub fn parse(label: &str) -> Result<Self> {
        let mut factors = Vec::new();
        for tok in label.split_whitespace() {
            let mut chars = tok.chars();
            let axis = chars.next().and_then(Axis::from_symbol).ok_or(Error::EmptyString)?;
            let site = chars.as_str().parse::<i64>().map_err(|_| Error::UnsortedSupport)?;
            factors.push((site, axis));
        }
        PauliString::new(factors)
    }

    pub fn factors(&self) -> &[(i64, Axis)] {
        &self.factors
    }

    pub fn is_identity(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    /// Commutes with the global parity operator.
    pub fn is_even(&self) -> bool {
        self.factors.iter().filter(|(_, a)| a.is_flip()).count() % 2 == 0
    }

    pub fn first_site(&self) -> Option<i64> {
        self.factors.first().map(|f| f.0)
    }

    pub fn last_site(&self) -> Option<i64> {
        self.factors.last().map(|f| f.0)
    }

    /// last - first, 0 for single-site and identity strings.
    pub fn span(&self) -> usize {
        match (self.first_site(), self.last_site()) {
            (Some(a), Some(b)) => (b - a) as usize,
            _ => 0,
        }
    }

    pub fn translate(&self, by: i64) -> Self {
        PauliString { factors: self.factors.iter().map(|&(s, a)| (s + by, a)).collect() }
    }

    /// Same string moved so its first site is 0.
    pub fn anchored(&self) -> Self {
        match self.first_site() {
            Some(s) => self.translate(-s),
            None => self.clone(),
        }
    }

    /// Product with a string living entirely to the right of this one.
    pub fn disjoint_product(&self, right: &PauliString) -> Result<Self> {
        if let (Some(a), Some(b)) = (self.last_site(), right.first_site()) {
            if b <= a {
                return Err(Error::OverlappingSupport { r: 0, span: self.span() });
            }
        }
        let mut factors = self.factors.clone();
        factors.extend_from_slice(&right.factors);
        Ok(PauliString { factors })
    }

    /// `self` times its translate by `r`: the even operator whose
    /// expectation factorizes into the square of a broken correlator.
    pub fn doubled(&self, r: usize) -> Result<Self> {
        if r <= self.span() {
            return Err(Error::OverlappingSupport { r, span: self.span() });
        }
        self.disjoint_product(&self.translate(r as i64))
    }

    pub fn label(&self) -> String {
        use core::fmt::Write;
        let mut s = String::new();
        for (i, (site, axis)) in self.factors.iter().enumerate() {
            if i > 0 {
                s.push(' ');
            }
            let _ = write!(s, "{}{}", axis.symbol(), site);
        }
        s
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_identity() {
            f.write_str("I")
        } else {
            f.write_str(&self.label())
        }
    }
}
