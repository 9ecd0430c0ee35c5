//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by kernel, character, and coefficient evaluation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Gamma function evaluated at a non-positive integer.
    #[error("gamma pole at non-positive integer {0}")]
    Pole(i64),

    /// Division by zero in a negative-shift Pochhammer product.
    #[error("pochhammer product hits zero factor at {0}")]
    PochhammerZeroDivisor(f64),

    /// No signature satisfies the requested bound.
    #[error("no {family} signature of rank {rank} exists within bound {bound}")]
    EmptyEnumeration {
        family: &'static str,
        rank: usize,
        bound: i64,
    },

    /// Signature parts violate the family's ordering constraints.
    #[error("invalid signature: {0}")]
    InvalidSignature(String),

    /// Torus point too close to a zero of the Weyl denominator.
    #[error("degenerate torus point: denominator magnitude {det_mag:.3e} below threshold")]
    DegenerateTorusPoint { det_mag: f64 },

    /// Kernel evaluated where it is singular (zero angle, nonpositive exponent).
    #[error("singular kernel point: angle {angle} with exponent {exponent}")]
    SingularKernelPoint { angle: f64, exponent: f64 },

    /// Matrix input failed its unitarity / orthogonality / symplectic check.
    #[error("input matrix is not in the target group (deviation {0:.3e})")]
    NonUnitaryInput(f64),

    /// The resolvent block of a Mobius element is numerically singular.
    #[error("ill-conditioned denominator block (cond estimate {0:.3e})")]
    IllConditionedDenominator(f64),

    /// Vector lengths inconsistent with the requested identity.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// A structured-matrix denominator is below the separation threshold.
    #[error("near-singular denominator: |{0:.6e}| below gap threshold")]
    NearSingularDenominator(f64),

    /// Operands belong to different group families.
    #[error("mixed group families: {0} vs {1}")]
    MixedFamily(&'static str, &'static str),

    /// The signature-independent Gamma prefactor has a pole at these parameters.
    #[error("coefficient prefactor pole at {0}; use the blow-up machinery")]
    PrefactorPole(f64),

    /// Empirical coefficient signs contradict the closed-form positivity criterion.
    #[error("analytic/empirical positivity mismatch: {0}")]
    AnalyticEmpiricalMismatch(String),

    /// Blow-up coordinates on the excluded pole line s + t = 0.
    #[error("blow-up point on the pole line s + t = 0 (s={s}, t={t})")]
    PoleLine { s: f64, t: f64 },

    /// The residual factor failed its two-point constancy check.
    #[error("non-constant blow-up residue: {0:.6e} vs {1:.6e}")]
    NonConstantResidue(f64, f64),

    /// A formula invariant that should hold by construction failed.
    #[error("internal error: {0}")]
    InternalError(String),
}

pub type Result<T> = std::result::Result<T, Error>;
