//! Coefficient degeneration at integer parameter points.
//!
//! Around (sigma, tau) = (-n + alpha, 0) the U-family coefficients are
//! resolved in blow-up coordinates sigma = -n + alpha + s eps, tau = t eps,
//! where each coefficient takes the form
//!
//!   c_m = eps^k * t^j s^{n-alpha-j} / (s + t)^{n-alpha} * R_m(s, t, eps)
//!
//! with R holomorphic and R(s, t, 0) a constant depending only on m. The
//! exponents (k, j) are counted arithmetically from the integer crossings of
//! the Gamma arguments; k = 0 exactly on the block classes Z_theta, and the
//! epsilon-ladder limits here only validate that arithmetic.
//!
//! The O-family analogue at lambda = -n + alpha keeps a single parameter:
//! the surviving labels are those whose trailing alpha parts are
//! (alpha-1, ..., 1, 0), and their limits share one sign.

use crate::coefficients::{coefficient_parts, richardson};
use crate::error::{Error, Result};
use crate::kernels::SpectralParameter;
use crate::signatures::{GroupFamily, Signature};

/// Class of a signature at the unipotent point with parameter alpha.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignatureClass {
    /// Coefficient survives the limit; theta bottom entries are negative.
    Ztheta(usize),
    /// Coefficient vanishes as eps^k with k >= 1.
    Tail,
}

/// Real slice of the blow-up chart (5.3): sigma = -n + alpha + s eps,
/// tau = t eps, with the equivalence (s, t, eps) ~ (s u, t u, eps / u).
#[derive(Debug, Clone, Copy)]
pub struct BlowupPoint {
    pub alpha: usize,
    pub s: f64,
    pub t: f64,
    pub eps: f64,
}

impl BlowupPoint {
    pub fn new(alpha: usize, s: f64, t: f64, eps: f64) -> Result<Self> {
        if s == 0.0 && t == 0.0 {
            return Err(Error::PoleLine { s, t });
        }
        Ok(Self { alpha, s, t, eps })
    }

    pub fn sigma_tau(&self, n: usize) -> (f64, f64) {
        (
            -(n as f64) + self.alpha as f64 + self.s * self.eps,
            self.t * self.eps,
        )
    }
}

/// classify by the literal block template: top entries >= alpha, then the
/// consecutive block alpha-1, ..., 1, 0, then theta negative entries.
pub fn classify_signature(alpha: usize, sig: &Signature) -> SignatureClass {
    let parts = sig.parts();
    let n = parts.len();
    debug_assert!(alpha >= 1 && alpha <= n);
    for theta in 0..=(n - alpha) {
        let top = n - alpha - theta;
        let block_ok = (0..alpha).all(|i| parts[top + i] == (alpha - 1 - i) as i64);
        let top_ok = parts[..top].iter().all(|&m| m >= alpha as i64);
        let bottom_ok = parts[(top + alpha)..].iter().all(|&m| m <= -1);
        if block_ok && top_ok && bottom_ok {
            return SignatureClass::Ztheta(theta);
        }
    }
    SignatureClass::Tail
}

/// Zero/pole orders (k, j) of the coefficient in the blow-up chart, by
/// integer crossing counts: each part >= alpha contributes one s-zero, each
/// part <= -1 one t-zero, and the prefactor removes n - alpha of them.
/// k = 0 iff the signature lies in some Z_theta, and then j = theta.
pub fn coefficient_orders(alpha: usize, sig: &Signature) -> (usize, usize) {
    let parts = sig.parts();
    let n = parts.len();
    let s_zeros = parts.iter().filter(|&&m| m >= alpha as i64).count();
    let t_zeros = parts.iter().filter(|&&m| m <= -1).count();
    let k = (s_zeros + t_zeros) - (n - alpha);
    (k, t_zeros.min(n - alpha))
}

/// The coefficient at a concrete blow-up point, through the pole-free closed
/// form (kappa = the U-family calibration constant of the rank).
pub fn blowup_coefficient(
    bp: &BlowupPoint,
    n: usize,
    sig: &Signature,
    kappa: f64,
) -> Result<f64> {
    if bp.s.abs().max(bp.t.abs()) * 1e-6 > (bp.s + bp.t).abs() {
        return Err(Error::PoleLine { s: bp.s, t: bp.t });
    }
    let (sigma, tau) = bp.sigma_tau(n);
    let p = SpectralParameter::Unitary { n, sigma, tau };
    Ok(coefficient_parts(&p, sig)?.total()?.value() * kappa)
}

/// Epsilon ladder used for all numerical limits here.
pub const EPS_LADDER: [f64; 3] = [1e-2, 1e-3, 1e-4];

/// lim_{eps -> 0} of the coefficient along fixed (s, t), by Richardson
/// extrapolation over the ladder.
pub fn blowup_limit(alpha: usize, s: f64, t: f64, n: usize, sig: &Signature) -> Result<f64> {
    let mut values = [0.0f64; 3];
    for (i, &eps) in EPS_LADDER.iter().enumerate() {
        let bp = BlowupPoint::new(alpha, s, t, eps)?;
        values[i] = blowup_coefficient(&bp, n, sig, 1.0)?;
    }
    Ok(richardson(&EPS_LADDER, &values))
}

/// Least-squares slope of log |c| against log eps over the ladder; validates
/// the arithmetic order k.
pub fn empirical_order(alpha: usize, s: f64, t: f64, n: usize, sig: &Signature) -> Result<f64> {
    let lo = {
        let bp = BlowupPoint::new(alpha, s, t, EPS_LADDER[2])?;
        blowup_coefficient(&bp, n, sig, 1.0)?
    };
    let hi = {
        let bp = BlowupPoint::new(alpha, s, t, EPS_LADDER[0])?;
        blowup_coefficient(&bp, n, sig, 1.0)?
    };
    if lo == 0.0 || hi == 0.0 {
        return Err(Error::InternalError("zero coefficient in slope probe".into()));
    }
    Ok((hi.abs().ln() - lo.abs().ln()) / (EPS_LADDER[0].ln() - EPS_LADDER[2].ln()))
}

/// Generic evaluation points for the residue-constancy check, both away from
/// the pole line s + t = 0 and from the axes.
const XI_POINTS: [(f64, f64); 2] = [(1.0, 1.0), (1.0, 2.0)];

/// The residual factor R_m(s, t, 0) on its block: the eps -> 0 limit of
/// c_m (s + t)^{n - alpha} / (t^j s^{n - alpha - j}), which is independent
/// of (s, t). Returns 0 off Z_j; errors if the two-point constancy check
/// fails.
pub fn xi_coefficient(alpha: usize, j: usize, n: usize, sig: &Signature) -> Result<f64> {
    if classify_signature(alpha, sig) != SignatureClass::Ztheta(j) {
        return Ok(0.0);
    }
    let p = n - alpha;
    let mut values = [0.0f64; 2];
    for (slot, &(s, t)) in XI_POINTS.iter().enumerate() {
        let c = blowup_limit(alpha, s, t, n, sig)?;
        values[slot] = c * (s + t).powi(p as i32) / (t.powi(j as i32) * s.powi((p - j) as i32));
    }
    let scale = values[0].abs().max(values[1].abs()).max(1e-300);
    if (values[0] - values[1]).abs() > 1e-8 * scale {
        return Err(Error::NonConstantResidue(values[0], values[1]));
    }
    Ok(values[0])
}

/// Whether an O-family label survives the limit lambda -> -n + alpha:
/// the trailing alpha parts must be exactly alpha-1, ..., 1, 0.
pub fn classify_o_unipotent(alpha: usize, sig: &Signature) -> bool {
    let parts = sig.parts();
    let n = parts.len();
    debug_assert!(alpha >= 1 && alpha <= n);
    (0..alpha).all(|i| parts[n - alpha + i] == (alpha - 1 - i) as i64)
}

/// lim_{eps -> 0} of the O coefficient at lambda = -n + alpha + eps.
pub fn o_unipotent_limit(alpha: usize, n: usize, sig: &Signature, kappa: f64) -> Result<f64> {
    let mut values = [0.0f64; 3];
    for (i, &eps) in EPS_LADDER.iter().enumerate() {
        let p = SpectralParameter::Orthogonal {
            n,
            lambda: -(n as f64) + alpha as f64 + eps,
        };
        values[i] = coefficient_parts(&p, sig)?.total()?.value() * kappa;
    }
    Ok(richardson(&EPS_LADDER, &values))
}
