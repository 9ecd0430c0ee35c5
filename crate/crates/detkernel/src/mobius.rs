//! Linear-fractional action of the noncompact block groups U(n,n),
//! O(2n,2n), Sp(n,n) on their compact partners, and the pointwise
//! covariance / Jacobian checks for the determinant kernels.
//!
//! The kernel covariance implemented here is
//!
//!   L(u^[g], v^[g]) = L(u, v) * |det(alpha + u gamma)|^{-e}
//!                            * |det(alpha + v gamma)|^{-e},
//!
//! with e = 2 sigma for U(n) (sigma = tau), e = lambda for O(2n) on the
//! real 2n x 2n determinant, and e = 2 lambda for Sp(n) on the quaternionic
//! determinant. The negative exponent is forced by the n = 1 chordal
//! computation |u' - v'| = |u - v| / (|alpha + u gamma| |alpha + v gamma|),
//! which the `covariance_exponent_sign` test re-derives numerically.

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::kernels::{group_deviation, kernel_l, SpectralParameter};
use crate::linalg::{
    det, quaternion_det, quaternionic_deviation, random_special_orthogonal, random_symplectic,
    random_unitary, solve, CMat,
};
use crate::signatures::GroupFamily;

/// Element of the noncompact block group, stored as four rank-sized blocks.
/// For the U family the blocks are n x n complex; for O they are 2n x 2n
/// real; for Sp they are 2n x 2n complex images of quaternionic n x n.
#[derive(Debug, Clone)]
pub struct BlockMobiusElement {
    pub family: GroupFamily,
    pub alpha: CMat,
    pub beta: CMat,
    pub gamma: CMat,
    pub delta: CMat,
}

/// Tolerance for the pseudo-unitarity invariant of block elements.
const PSEUDO_UNITARY_TOL: f64 = 1e-10;

impl BlockMobiusElement {
    pub fn new(family: GroupFamily, alpha: CMat, beta: CMat, gamma: CMat, delta: CMat) -> Result<Self> {
        let g = Self {
            family,
            alpha,
            beta,
            gamma,
            delta,
        };
        let dev = g.pseudo_unitarity_deviation();
        if dev > PSEUDO_UNITARY_TOL {
            return Err(Error::NonUnitaryInput(dev));
        }
        Ok(g)
    }

    pub fn identity(family: GroupFamily) -> Self {
        let d = block_dim(family);
        Self {
            family,
            alpha: CMat::identity(d),
            beta: CMat::zeros(d, d),
            gamma: CMat::zeros(d, d),
            delta: CMat::identity(d),
        }
    }

    /// Deviation from the defining relation of the block group:
    /// g J g* = J for U and Sp (with quaternionic structure for Sp),
    /// g^t J g = J for O.
    pub fn pseudo_unitarity_deviation(&self) -> f64 {
        let d = self.alpha.rows;
        let id = CMat::identity(d);
        match self.family {
            GroupFamily::UnitaryU(_) | GroupFamily::SymplecticSp(_) => {
                // alpha alpha* - beta beta* = 1, gamma gamma* - delta delta* = -1,
                // alpha gamma* - beta delta* = 0.
                let e1 = self
                    .alpha
                    .mul(&self.alpha.adjoint())
                    .sub(&self.beta.mul(&self.beta.adjoint()))
                    .max_abs_diff(&id);
                let e2 = self
                    .delta
                    .mul(&self.delta.adjoint())
                    .sub(&self.gamma.mul(&self.gamma.adjoint()))
                    .max_abs_diff(&id);
                let e3 = self
                    .alpha
                    .mul(&self.gamma.adjoint())
                    .sub(&self.beta.mul(&self.delta.adjoint()))
                    .max_abs();
                let quat = if matches!(self.family, GroupFamily::SymplecticSp(_)) {
                    quaternionic_deviation(&self.alpha)
                        .max(quaternionic_deviation(&self.beta))
                        .max(quaternionic_deviation(&self.gamma))
                        .max(quaternionic_deviation(&self.delta))
                } else {
                    0.0
                };
                e1.max(e2).max(e3).max(quat)
            }
            GroupFamily::OrthogonalO(_) => {
                // alpha^t alpha - gamma^t gamma = 1, beta^t beta - delta^t delta = -1,
                // alpha^t beta - gamma^t delta = 0, plus realness of all blocks.
                let realness = [&self.alpha, &self.beta, &self.gamma, &self.delta]
                    .iter()
                    .flat_map(|m| m.data.iter())
                    .map(|z| z.im.abs())
                    .fold(0.0, f64::max);
                let e1 = self
                    .alpha
                    .transpose()
                    .mul(&self.alpha)
                    .sub(&self.gamma.transpose().mul(&self.gamma))
                    .max_abs_diff(&id);
                let e2 = self
                    .delta
                    .transpose()
                    .mul(&self.delta)
                    .sub(&self.beta.transpose().mul(&self.beta))
                    .max_abs_diff(&id);
                let e3 = self
                    .alpha
                    .transpose()
                    .mul(&self.beta)
                    .sub(&self.gamma.transpose().mul(&self.delta))
                    .max_abs();
                e1.max(e2).max(e3).max(realness)
            }
        }
    }

    /// Group product, blockwise.
    pub fn compose(&self, other: &BlockMobiusElement) -> BlockMobiusElement {
        let a = CMat::from_blocks(&self.alpha, &self.beta, &self.gamma, &self.delta);
        let b = CMat::from_blocks(&other.alpha, &other.beta, &other.gamma, &other.delta);
        let (alpha, beta, gamma, delta) = a.mul(&b).to_blocks();
        BlockMobiusElement {
            family: self.family,
            alpha,
            beta,
            gamma,
            delta,
        }
    }

    /// The denominator block alpha + h gamma of the action at h.
    pub fn denominator_at(&self, h: &CMat) -> CMat {
        self.alpha.add(&h.mul(&self.gamma))
    }
}

fn block_dim(family: GroupFamily) -> usize {
    match family {
        GroupFamily::UnitaryU(n) => n,
        GroupFamily::OrthogonalO(n) | GroupFamily::SymplecticSp(n) => 2 * n,
    }
}

/// The linear-fractional action h |-> (alpha + h gamma)^{-1} (beta + h delta).
pub fn mobius_apply(g: &BlockMobiusElement, h: &CMat) -> Result<CMat> {
    let dev = group_deviation(g.family, h);
    if dev > 1e-9 {
        return Err(Error::NonUnitaryInput(dev));
    }
    let den = g.denominator_at(h);
    let num = g.beta.add(&h.mul(&g.delta));
    solve(&den, &num)
}

/// The covariance exponent e on |det(alpha + . gamma)| per side, for real
/// spectral parameters on the kernel's own determinant scale.
fn covariance_exponent(p: &SpectralParameter) -> Result<f64> {
    match *p {
        SpectralParameter::Unitary { sigma, tau, .. } => {
            if (sigma - tau).abs() > 1e-12 {
                return Err(Error::InternalError(
                    "covariance check is restricted to sigma = tau (single-valued powers)".into(),
                ));
            }
            Ok(2.0 * sigma)
        }
        SpectralParameter::Orthogonal { lambda, .. } => Ok(lambda),
        SpectralParameter::Symplectic { lambda, .. } => Ok(2.0 * lambda),
    }
}

/// |det| on the scale the family's covariance is stated in: complex modulus
/// for U, real absolute determinant for O, quaternionic determinant for Sp.
fn abs_det_for_family(family: GroupFamily, m: &CMat) -> Result<f64> {
    match family {
        GroupFamily::UnitaryU(_) | GroupFamily::OrthogonalO(_) => Ok(det(m).norm()),
        GroupFamily::SymplecticSp(_) => quaternion_det(m),
    }
}

/// Relative residual of the kernel covariance identity at (g, u, v).
pub fn covariance_residual(
    p: &SpectralParameter,
    g: &BlockMobiusElement,
    u: &CMat,
    v: &CMat,
) -> Result<f64> {
    if p.family() != g.family {
        return Err(Error::MixedFamily(p.family().tag(), g.family.tag()));
    }
    let e = covariance_exponent(p)?;
    let u_img = mobius_apply(g, u)?;
    let v_img = mobius_apply(g, v)?;
    let lhs = kernel_l(p, &u_img, &v_img)?;
    let base = kernel_l(p, u, v)?;
    let du = abs_det_for_family(g.family, &g.denominator_at(u))?;
    let dv = abs_det_for_family(g.family, &g.denominator_at(v))?;
    let rhs = base * (du * dv).powf(-e);
    Ok((lhs - rhs).norm() / base.norm())
}

/// |int f dmu - int f(h^[g]) |det(alpha + h gamma)|^{-2} dmu| on U(1), by
/// N-node trapezoid on the circle.
pub fn jacobian_residual_1d(
    g: &BlockMobiusElement,
    f: impl Fn(Complex64) -> Complex64,
    nodes: usize,
) -> Result<f64> {
    if !matches!(g.family, GroupFamily::UnitaryU(1)) {
        return Err(Error::MixedFamily(g.family.tag(), "U(1)"));
    }
    let mut plain = Complex64::new(0.0, 0.0);
    let mut pushed = Complex64::new(0.0, 0.0);
    for i in 0..nodes {
        let phi = 2.0 * std::f64::consts::PI * (i as f64 + 0.5) / nodes as f64;
        let h = CMat::from_fn(1, 1, |_, _| Complex64::from_polar(1.0, phi));
        plain += f(h[(0, 0)]);
        let img = mobius_apply(g, &h)?;
        let d = det(&g.denominator_at(&h)).norm();
        pushed += f(img[(0, 0)]) * d.powi(-2);
    }
    Ok(((plain - pushed) / nodes as f64).norm())
}

/// Seeded random element of the block group via a K A K product: two
/// block-diagonal compact rotations around a cosh/sinh middle factor.
pub fn random_block_mobius<R: Rng>(
    family: GroupFamily,
    scale: f64,
    rng: &mut R,
) -> BlockMobiusElement {
    let d = block_dim(family);
    let compact = |rng: &mut R| -> (CMat, CMat) {
        match family {
            GroupFamily::UnitaryU(n) => (random_unitary(n, rng), random_unitary(n, rng)),
            GroupFamily::OrthogonalO(n) => (
                random_special_orthogonal(2 * n, rng),
                random_special_orthogonal(2 * n, rng),
            ),
            GroupFamily::SymplecticSp(n) => (random_symplectic(n, rng), random_symplectic(n, rng)),
        }
    };
    // Middle factor [[cosh L, sinh L], [sinh L, cosh L]]; for Sp the diagonal
    // must itself be quaternionic, i.e. the two n-blocks of the image carry
    // equal entries.
    let mut lam = vec![0.0f64; d];
    match family {
        GroupFamily::SymplecticSp(n) => {
            for i in 0..n {
                let v = rng.gen_range(0.0..scale);
                lam[i] = v;
                lam[i + n] = v;
            }
        }
        _ => {
            for l in lam.iter_mut() {
                *l = rng.gen_range(0.0..scale);
            }
        }
    }
    let ch = CMat::from_real_fn(d, d, |i, j| if i == j { lam[i].cosh() } else { 0.0 });
    let sh = CMat::from_real_fn(d, d, |i, j| if i == j { lam[i].sinh() } else { 0.0 });
    let (u1, u2) = compact(rng);
    let (u3, u4) = compact(rng);
    let k1 = CMat::from_blocks(&u1, &CMat::zeros(d, d), &CMat::zeros(d, d), &u2);
    let a = CMat::from_blocks(&ch, &sh, &sh, &ch);
    let k2 = CMat::from_blocks(&u3, &CMat::zeros(d, d), &CMat::zeros(d, d), &u4);
    let (alpha, beta, gamma, delta) = k1.mul(&a).mul(&k2).to_blocks();
    let g = BlockMobiusElement {
        family,
        alpha,
        beta,
        gamma,
        delta,
    };
    debug_assert!(g.pseudo_unitarity_deviation() < 1e-9);
    g
}

/// A random element of the compact group itself.
pub fn random_compact<R: Rng>(family: GroupFamily, rng: &mut R) -> CMat {
    match family {
        GroupFamily::UnitaryU(n) => random_unitary(n, rng),
        GroupFamily::OrthogonalO(n) => random_special_orthogonal(2 * n, rng),
        GroupFamily::SymplecticSp(n) => random_symplectic(n, rng),
    }
}
