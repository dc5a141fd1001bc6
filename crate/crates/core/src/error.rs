use alloc::string::String;

/// Everything that can go wrong inside the free-fermion pipeline.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid model parameter: {0}")]
    InvalidModel(String),
    #[error("model is outside its ordered phase, order parameter undefined")]
    NotOrdered,
    #[error("finite momentum grid needs an even number of sites, got {0}")]
    OddSites(usize),
    #[error("thermodynamic grid needs at least 2 points, got {0}")]
    TooFewPoints(usize),
    #[error("time must be finite and non-negative, got {0}")]
    InvalidTime(f64),
    #[error("imaginary residue {residue:e} of g({r}) exceeds tolerance")]
    ImaginaryResidue { r: i64, residue: f64 },
    #[error("real part of {which}({r}) drifted from the Kronecker term by {drift:e}")]
    RealPartDrift { which: char, r: i64, drift: f64 },
    #[error("distance r = {r} outside the correlator table window +-{r_max}")]
    OutOfWindow { r: i64, r_max: usize },
    #[error("Pfaffian needs an even dimension, got {0}")]
    OddDimension(usize),
    #[error("matrix dimension {dim} exceeds the Pfaffian cap {cap}")]
    DimensionCap { dim: usize, cap: usize },
    #[error("matrix is not antisymmetric (deviation {0:e})")]
    NotAntisymmetric(f64),
    #[error("Pauli string has no non-identity factor")]
    EmptyString,
    #[error("Pauli string sites must be strictly ascending")]
    UnsortedSupport,
    #[error("operator has the wrong parity class (expected {})", if *expected_even { "even" } else { "odd" })]
    ParityMismatch { expected_even: bool },
    #[error("translation R = {r} does not separate a support of span {span}")]
    OverlappingSupport { r: usize, span: usize },
    #[error("staggered order needs even separations, got {0}")]
    OddSeparation(usize),
    #[error("<W> = {0:e} is negative beyond roundoff")]
    NegativeW(f64),
    #[error("threshold must be positive, got {0}")]
    NonPositiveThreshold(f64),
    #[error("spin subset must be non-empty with distinct sites")]
    InvalidSubset,
    #[error("subset size {l} exceeds l_max = {l_max}")]
    SubsetTooLarge { l: usize, l_max: usize },
    #[error("superposition coefficients not normalized: |u|^2+|v|^2 = {0}")]
    NotNormalized(f64),
    #[error("matrix dimensions differ: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("t = {t} is past the validity horizon t* = {t_star}")]
    PastHorizon { t: f64, t_star: f64 },
    #[error("series has {len} samples, need at least {need}")]
    SeriesTooShort { len: usize, need: usize },
    #[error("series times must be strictly increasing")]
    NonIncreasingTimes,
    #[error("distance {0} lies outside [0, 1]")]
    DistanceOutOfRange(f64),
    #[error("log-linear fit has non-negative slope {0}, no decay to fit")]
    NonDecaying(f64),
    #[error("fit window holds {usable} usable samples above the noise floor, need {need}")]
    InsufficientRange { usable: usize, need: usize },
}

pub type Result<T> = core::result::Result<T, Error>;
