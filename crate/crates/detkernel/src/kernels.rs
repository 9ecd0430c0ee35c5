//! The determinant kernels ell and L on the three families, evaluated from
//! eigenangles or from explicit group elements.
//!
//! On U(n), with eigenangles psi_k in [0, 2pi),
//!
//!   ell_{sigma,tau}(g) = exp{ i (sigma - tau) sum_k (psi_k - pi) / 2 }
//!                        * prod_k sin^{sigma+tau}(psi_k / 2),
//!
//! the imaginary unit in the phase being required for consistency with
//! det(1 - z)^{sigma} det(1 - conj z)^{tau} on U(1) (checked in the tests
//! below). On O(2n) and Sp(n) the kernel is prod_j |sin(psi_j / 2)|^{2 lambda},
//! with the O kernel vanishing off SO(2n).

use num_complex::Complex64;

use crate::characters::TorusPoint;
use crate::error::{Error, Result};
use crate::linalg::{det, quaternionic_deviation, unitary_eigenangles, CMat};
use crate::signatures::GroupFamily;

/// Spectral parameter of a kernel: (sigma, tau) for the unitary family, a
/// single lambda for the orthogonal and symplectic families.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpectralParameter {
    Unitary { n: usize, sigma: f64, tau: f64 },
    Orthogonal { n: usize, lambda: f64 },
    Symplectic { n: usize, lambda: f64 },
}

impl SpectralParameter {
    pub fn family(&self) -> GroupFamily {
        match *self {
            SpectralParameter::Unitary { n, .. } => GroupFamily::UnitaryU(n),
            SpectralParameter::Orthogonal { n, .. } => GroupFamily::OrthogonalO(n),
            SpectralParameter::Symplectic { n, .. } => GroupFamily::SymplecticSp(n),
        }
    }

    /// Whether the character expansion converges: sigma + tau < 1 for U,
    /// lambda < 1/2 for O and Sp.
    pub fn expansion_valid(&self) -> bool {
        match *self {
            SpectralParameter::Unitary { sigma, tau, .. } => sigma + tau < 1.0,
            SpectralParameter::Orthogonal { lambda, .. }
            | SpectralParameter::Symplectic { lambda, .. } => lambda < 0.5,
        }
    }

    /// The exponent on each |sin(psi/2)| factor: sigma + tau or 2 lambda.
    pub fn sin_exponent(&self) -> f64 {
        match *self {
            SpectralParameter::Unitary { sigma, tau, .. } => sigma + tau,
            SpectralParameter::Orthogonal { lambda, .. }
            | SpectralParameter::Symplectic { lambda, .. } => 2.0 * lambda,
        }
    }
}

/// The central function ell at a torus point.
pub fn ell(p: &SpectralParameter, t: &TorusPoint) -> Result<Complex64> {
    if p.family() != t.family {
        return Err(Error::MixedFamily(p.family().tag(), t.family.tag()));
    }
    if t.off_component {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let exponent = p.sin_exponent();
    let mut magnitude = 1.0f64;
    for &psi in &t.angles {
        let s = (psi / 2.0).sin().abs();
        if s == 0.0 {
            if exponent > 0.0 {
                return Ok(Complex64::new(0.0, 0.0));
            }
            return Err(Error::SingularKernelPoint {
                angle: psi,
                exponent,
            });
        }
        magnitude *= s.powf(exponent);
    }
    match *p {
        SpectralParameter::Unitary { sigma, tau, .. } => {
            let phase: f64 = t
                .angles
                .iter()
                .map(|&psi| (sigma - tau) * (psi - std::f64::consts::PI) / 2.0)
                .sum();
            Ok(Complex64::from_polar(magnitude, phase))
        }
        _ => Ok(Complex64::new(magnitude, 0.0)),
    }
}

/// Deviation of a matrix from the family's compact group, for input checks.
pub fn group_deviation(family: GroupFamily, g: &CMat) -> f64 {
    let n = family.rank();
    match family {
        GroupFamily::UnitaryU(_) => {
            if g.rows != n || g.cols != n {
                return f64::INFINITY;
            }
            g.unitary_deviation()
        }
        GroupFamily::OrthogonalO(_) => {
            if g.rows != 2 * n || g.cols != 2 * n {
                return f64::INFINITY;
            }
            let realness = g.data.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
            g.unitary_deviation().max(realness)
        }
        GroupFamily::SymplecticSp(_) => {
            if g.rows != 2 * n || g.cols != 2 * n {
                return f64::INFINITY;
            }
            g.unitary_deviation().max(quaternionic_deviation(g))
        }
    }
}

/// Eigenangles of a group element as a torus point: n angles for U(n); the
/// n nonnegative representatives of the +-psi pairs for O(2n) and Sp(n).
/// An O element with determinant -1 maps to the off-component marker.
pub fn torus_point_of(family: GroupFamily, g: &CMat) -> Result<TorusPoint> {
    let dev = group_deviation(family, g);
    if dev > 1e-10 {
        return Err(Error::NonUnitaryInput(dev));
    }
    match family {
        GroupFamily::UnitaryU(_) => {
            let angles = unitary_eigenangles(g);
            TorusPoint::new(family, angles)
        }
        GroupFamily::OrthogonalO(_) | GroupFamily::SymplecticSp(_) => {
            if matches!(family, GroupFamily::OrthogonalO(_)) {
                let d = det(g);
                if d.re < 0.0 {
                    return Ok(TorusPoint::off_so_component(family));
                }
            }
            let all = unitary_eigenangles(g);
            let mut folded: Vec<f64> = all
                .iter()
                .map(|&psi| {
                    if psi > std::f64::consts::PI {
                        2.0 * std::f64::consts::PI - psi
                    } else {
                        psi
                    }
                })
                .collect();
            folded.sort_by(|a, b| a.partial_cmp(b).unwrap());
            // Each angle appears twice (once from each of e^{+-i psi}).
            let angles: Vec<f64> = folded.chunks(2).map(|c| 0.5 * (c[0] + c[1])).collect();
            TorusPoint::new(family, angles)
        }
    }
}

/// Two-point kernel L(g, h) = ell(g h^{-1}).
pub fn kernel_l(p: &SpectralParameter, g: &CMat, h: &CMat) -> Result<Complex64> {
    let family = p.family();
    let m = g.mul(&h.adjoint());
    let t = torus_point_of(family, &m)?;
    ell(p, &t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{random_special_orthogonal, random_symplectic, random_unitary};
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn diag_unitary(angles: &[f64]) -> CMat {
        CMat::from_fn(angles.len(), angles.len(), |i, j| {
            if i == j {
                Complex64::from_polar(1.0, angles[i])
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    #[test]
    fn ell_unitary_special_values() {
        let n = 3;
        let t = TorusPoint::new(GroupFamily::UnitaryU(n), vec![0.4, 1.3, 2.2]).unwrap();
        // sigma = tau = 0 gives 1 everywhere.
        let p0 = SpectralParameter::Unitary {
            n,
            sigma: 0.0,
            tau: 0.0,
        };
        assert!((ell(&p0, &t).unwrap() - Complex64::new(1.0, 0.0)).norm() < 1e-14);
        // All angles at pi gives 1 for any (sigma, tau).
        let tpi =
            TorusPoint::new(GroupFamily::UnitaryU(n), vec![std::f64::consts::PI; 3]).unwrap();
        let p = SpectralParameter::Unitary {
            n,
            sigma: 0.37,
            tau: -0.21,
        };
        assert!((ell(&p, &tpi).unwrap() - Complex64::new(1.0, 0.0)).norm() < 1e-13);
        // U(1), sigma = tau = 1/2, psi = pi/2: sin(pi/4).
        let p1 = SpectralParameter::Unitary {
            n: 1,
            sigma: 0.5,
            tau: 0.5,
        };
        let t1 =
            TorusPoint::new(GroupFamily::UnitaryU(1), vec![std::f64::consts::FRAC_PI_2]).unwrap();
        let v = ell(&p1, &t1).unwrap();
        assert!((v.re - std::f64::consts::FRAC_PI_4.sin()).abs() < 1e-14);
        assert!(v.im.abs() < 1e-14);
    }

    #[test]
    fn ell_unitary_matches_det_power_on_u1() {
        // 2^{-(sigma+tau)} (1 - e^{i psi})^sigma (1 - e^{-i psi})^tau computed
        // through principal-branch complex powers, against the angle formula.
        let mut rng = ChaCha8Rng::seed_from_u64(44);
        for _ in 0..200 {
            let sigma: f64 = rng.gen_range(-0.8..0.8);
            let tau: f64 = rng.gen_range(-0.8..0.8);
            let psi: f64 = rng.gen_range(0.05..std::f64::consts::TAU - 0.05);
            let z = Complex64::from_polar(1.0, psi);
            let one = Complex64::new(1.0, 0.0);
            let direct = ((one - z) / 2.0).powc(Complex64::new(sigma, 0.0))
                * ((one - z.conj()) / 2.0).powc(Complex64::new(tau, 0.0));
            let p = SpectralParameter::Unitary { n: 1, sigma, tau };
            let t = TorusPoint::new(GroupFamily::UnitaryU(1), vec![psi]).unwrap();
            let v = ell(&p, &t).unwrap();
            assert!(
                (v - direct).norm() < 1e-12 * direct.norm().max(1.0),
                "sigma={sigma}, tau={tau}, psi={psi}: {v} vs {direct}"
            );
        }
    }

    #[test]
    fn ell_singularities_and_zeros() {
        let fam = GroupFamily::UnitaryU(2);
        let t0 = TorusPoint::new(fam, vec![0.0, 1.0]).unwrap();
        let pos = SpectralParameter::Unitary {
            n: 2,
            sigma: 0.3,
            tau: 0.2,
        };
        assert_eq!(ell(&pos, &t0).unwrap(), Complex64::new(0.0, 0.0));
        let neg = SpectralParameter::Unitary {
            n: 2,
            sigma: -0.3,
            tau: 0.1,
        };
        assert!(matches!(
            ell(&neg, &t0),
            Err(Error::SingularKernelPoint { .. })
        ));
        let zero_exp = SpectralParameter::Unitary {
            n: 2,
            sigma: -0.25,
            tau: 0.25,
        };
        assert!(matches!(
            ell(&zero_exp, &t0),
            Err(Error::SingularKernelPoint { .. })
        ));
    }

    #[test]
    fn o_family_kernel_vanishes_off_so() {
        let p = SpectralParameter::Orthogonal { n: 2, lambda: -0.3 };
        let t = TorusPoint::off_so_component(GroupFamily::OrthogonalO(2));
        assert_eq!(ell(&p, &t).unwrap(), Complex64::new(0.0, 0.0));
        // And from an explicit reflection matrix.
        let mut refl = CMat::identity(4);
        refl[(3, 3)] = Complex64::new(-1.0, 0.0);
        let v = kernel_l(&p, &refl, &CMat::identity(4)).unwrap();
        assert_eq!(v, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn kernel_on_diagonal_matrices_matches_ell() {
        let p = SpectralParameter::Unitary {
            n: 2,
            sigma: 0.35,
            tau: 0.15,
        };
        let g = diag_unitary(&[1.2, 2.7]);
        let h = diag_unitary(&[0.4, 0.9]);
        let lv = kernel_l(&p, &g, &h).unwrap();
        let t = TorusPoint::new(GroupFamily::UnitaryU(2), vec![1.2 - 0.4, 2.7 - 0.9]).unwrap();
        assert!((lv - ell(&p, &t).unwrap()).norm() < 1e-11);
        // g = h: all angles zero, positive exponent -> 0.
        assert_eq!(kernel_l(&p, &g, &g).unwrap(), Complex64::new(0.0, 0.0));
        let pneg = SpectralParameter::Unitary {
            n: 2,
            sigma: -0.4,
            tau: 0.1,
        };
        assert!(matches!(
            kernel_l(&pneg, &g, &g),
            Err(Error::SingularKernelPoint { .. })
        ));
    }

    #[test]
    fn kernel_bi_invariance_u2() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let p = SpectralParameter::Unitary {
            n: 2,
            sigma: 0.3,
            tau: 0.3,
        };
        for _ in 0..100 {
            let g = random_unitary(2, &mut rng);
            let h = random_unitary(2, &mut rng);
            let r1 = random_unitary(2, &mut rng);
            let r2 = random_unitary(2, &mut rng);
            let lv = kernel_l(&p, &g, &h).unwrap();
            let lw = kernel_l(&p, &r1.mul(&g).mul(&r2), &r1.mul(&h).mul(&r2)).unwrap();
            assert!((lv - lw).norm() <= 1e-10 * lv.norm().max(1.0));
        }
    }

    #[test]
    fn ell_conjugation_invariance_from_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for (family, p) in [
            (
                GroupFamily::UnitaryU(3),
                SpectralParameter::Unitary {
                    n: 3,
                    sigma: 0.2,
                    tau: 0.1,
                },
            ),
            (
                GroupFamily::OrthogonalO(2),
                SpectralParameter::Orthogonal { n: 2, lambda: 0.2 },
            ),
            (
                GroupFamily::SymplecticSp(2),
                SpectralParameter::Symplectic { n: 2, lambda: 0.2 },
            ),
        ] {
            for _ in 0..20 {
                let g = match family {
                    GroupFamily::UnitaryU(n) => random_unitary(n, &mut rng),
                    GroupFamily::OrthogonalO(n) => random_special_orthogonal(2 * n, &mut rng),
                    GroupFamily::SymplecticSp(n) => random_symplectic(n, &mut rng),
                };
                let r = match family {
                    GroupFamily::UnitaryU(n) => random_unitary(n, &mut rng),
                    GroupFamily::OrthogonalO(n) => random_special_orthogonal(2 * n, &mut rng),
                    GroupFamily::SymplecticSp(n) => random_symplectic(n, &mut rng),
                };
                let direct = ell(&p, &torus_point_of(family, &g).unwrap()).unwrap();
                let conj = r.adjoint().mul(&g).mul(&r);
                let conjv = ell(&p, &torus_point_of(family, &conj).unwrap()).unwrap();
                assert!(
                    (direct - conjv).norm() < 1e-9 * direct.norm().max(1.0),
                    "{family:?}"
                );
            }
        }
    }

    #[test]
    fn shift_identity_pointwise() {
        // ell_{sigma+1, tau-1}(g) = (-1)^n det(g) ell_{sigma, tau}(g).
        let mut rng = ChaCha8Rng::seed_from_u64(64);
        for n in 1..=3usize {
            let family = GroupFamily::UnitaryU(n);
            for _ in 0..100 {
                let sigma: f64 = rng.gen_range(-0.9..0.4);
                let tau: f64 = rng.gen_range(-0.4..0.5);
                let angles: Vec<f64> = (0..n)
                    .map(|_| rng.gen_range(0.05..std::f64::consts::TAU - 0.05))
                    .collect();
                let t = TorusPoint::new(family, angles.clone()).unwrap();
                let p = SpectralParameter::Unitary { n, sigma, tau };
                let p_shift = SpectralParameter::Unitary {
                    n,
                    sigma: sigma + 1.0,
                    tau: tau - 1.0,
                };
                let lhs = ell(&p_shift, &t).unwrap();
                let det_g: Complex64 = angles
                    .iter()
                    .map(|&a| Complex64::from_polar(1.0, a))
                    .product();
                let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
                let rhs = ell(&p, &t).unwrap() * det_g * sign;
                assert!((lhs - rhs).norm() <= 1e-10 * lhs.norm().max(1e-10));
            }
        }
    }

    #[test]
    fn conjugation_swaps_sigma_tau() {
        // ell_{tau, sigma} = conj(ell_{sigma, tau}) pointwise.
        let mut rng = ChaCha8Rng::seed_from_u64(65);
        for _ in 0..100 {
            let n = rng.gen_range(1..=3usize);
            let sigma: f64 = rng.gen_range(-0.8..0.8);
            let tau: f64 = rng.gen_range(-0.8..0.8);
            let angles: Vec<f64> = (0..n)
                .map(|_| rng.gen_range(0.05..std::f64::consts::TAU - 0.05))
                .collect();
            let t = TorusPoint::new(GroupFamily::UnitaryU(n), angles).unwrap();
            let a = ell(&SpectralParameter::Unitary { n, sigma, tau }, &t).unwrap();
            let b = ell(
                &SpectralParameter::Unitary {
                    n,
                    sigma: tau,
                    tau: sigma,
                },
                &t,
            )
            .unwrap();
            assert!((a.conj() - b).norm() < 1e-12 * a.norm().max(1.0));
        }
    }

    #[test]
    fn o_family_ell_even_in_angles() {
        let p = SpectralParameter::Orthogonal { n: 2, lambda: -0.35 };
        let t = TorusPoint::new(GroupFamily::OrthogonalO(2), vec![0.8, 2.1]).unwrap();
        let tneg = TorusPoint::new(GroupFamily::OrthogonalO(2), vec![-0.8, 2.1]).unwrap();
        assert!((ell(&p, &t).unwrap() - ell(&p, &tneg).unwrap()).norm() < 1e-13);
    }
}
