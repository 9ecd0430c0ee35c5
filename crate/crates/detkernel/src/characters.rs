//! Irreducible characters on the maximal torus of U(n), O(2n), Sp(n),
//! evaluated as ratios of alternating determinants.
//!
//! Sign convention: both numerator and denominator rows are ordered by the
//! descending parts of their signatures, with the denominator fixed at the
//! family's trivial signature. This forces chi_trivial == 1 identically and
//! removes the Vandermonde-orientation ambiguity of the classical displays.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{det, CMat};
use crate::signatures::{GroupFamily, Signature};

/// A conjugacy class on the maximal torus: one eigenangle per rank unit.
///
/// For the O family, `off_component` marks elements of O(2n) \ SO(2n); the
/// determinant kernel vanishes there and the angle data is not used.
#[derive(Debug, Clone, PartialEq)]
pub struct TorusPoint {
    pub family: GroupFamily,
    pub angles: Vec<f64>,
    pub off_component: bool,
}

impl TorusPoint {
    pub fn new(family: GroupFamily, angles: Vec<f64>) -> Result<Self> {
        if angles.len() != family.rank() {
            return Err(Error::DimensionMismatch(format!(
                "expected {} angles, got {}",
                family.rank(),
                angles.len()
            )));
        }
        let tau = 2.0 * std::f64::consts::PI;
        let angles = angles.iter().map(|a| a.rem_euclid(tau)).collect();
        Ok(Self {
            family,
            angles,
            off_component: false,
        })
    }

    /// O(2n) \ SO(2n) marker; kernel evaluation returns 0 on this component.
    pub fn off_so_component(family: GroupFamily) -> Self {
        Self {
            angles: vec![0.0; family.rank()],
            family,
            off_component: true,
        }
    }

    /// Quality metric: min over j != k of the distance between psi_j and
    /// +-psi_k mod 2pi (the +- identification only for O and Sp).
    pub fn distinctness_gap(&self) -> f64 {
        let tau = 2.0 * std::f64::consts::PI;
        let reflect = !matches!(self.family, GroupFamily::UnitaryU(_));
        let mut gap = f64::INFINITY;
        let n = self.angles.len();
        for j in 0..n {
            for k in 0..n {
                if j == k {
                    continue;
                }
                let d = (self.angles[j] - self.angles[k]).rem_euclid(tau);
                gap = gap.min(d.min(tau - d));
                if reflect {
                    let d = (self.angles[j] + self.angles[k]).rem_euclid(tau);
                    gap = gap.min(d.min(tau - d));
                }
            }
        }
        gap
    }
}

/// Basis function of the alternating determinant for each family.
fn basis(family: GroupFamily, part: i64, psi: f64) -> Complex64 {
    let arg = part as f64 * psi;
    match family {
        GroupFamily::UnitaryU(_) => Complex64::from_polar(1.0, arg),
        GroupFamily::OrthogonalO(_) => Complex64::new(arg.cos(), 0.0),
        GroupFamily::SymplecticSp(_) => Complex64::new(arg.sin(), 0.0),
    }
}

fn alternant(family: GroupFamily, parts: &[i64], angles: &[f64]) -> CMat {
    let n = parts.len();
    CMat::from_fn(n, n, |j, k| basis(family, parts[j], angles[k]))
}

/// Relative floor under which the denominator determinant is considered
/// degenerate (fraction of its Hadamard bound).
const DEGENERACY_FLOOR: f64 = 1e-12;

fn denominator_det(family: GroupFamily, angles: &[f64]) -> Result<Complex64> {
    let den = alternant(family, &family.trivial_parts(), angles);
    let n = angles.len();
    let hadamard: f64 = (0..n)
        .map(|i| (0..n).map(|j| den[(i, j)].norm_sqr()).sum::<f64>().sqrt())
        .product();
    let d = det(&den);
    if d.norm() < DEGENERACY_FLOOR * hadamard.max(f64::MIN_POSITIVE) {
        return Err(Error::DegenerateTorusPoint { det_mag: d.norm() });
    }
    Ok(d)
}

/// Character value chi_sig at a torus point, as a determinant ratio.
///
/// U(n) values are complex; O and Sp values are real (the alternants are
/// real matrices) and are returned with zero imaginary part.
pub fn character(sig: &Signature, t: &TorusPoint) -> Result<Complex64> {
    if sig.family() != t.family {
        return Err(Error::MixedFamily(sig.family().tag(), t.family.tag()));
    }
    let den = denominator_det(t.family, &t.angles)?;
    let num = det(&alternant(t.family, sig.parts(), &t.angles));
    Ok(num / den)
}

/// The two genuinely irreducible O(2n) characters behind a merged label with
/// l_n > 0: chi^eps = (det cos + eps det sin) / (2 det cos_trivial).
///
/// Satisfies chi^+ + chi^- = character(sig, t) pointwise, and negating the
/// last angle swaps the two.
pub fn character_pm(sig: &Signature, t: &TorusPoint, eps: i8) -> Result<Complex64> {
    let GroupFamily::OrthogonalO(_) = sig.family() else {
        return Err(Error::MixedFamily(sig.family().tag(), "O"));
    };
    if sig.family() != t.family {
        return Err(Error::MixedFamily(sig.family().tag(), t.family.tag()));
    }
    if *sig.parts().last().unwrap() == 0 {
        return Err(Error::InvalidSignature(
            "character_pm needs l_n > 0 (the l_n = 0 label is a single irreducible)".into(),
        ));
    }
    let den = denominator_det(t.family, &t.angles)?;
    let cos_det = det(&alternant(t.family, sig.parts(), &t.angles));
    let sin_mat = CMat::from_fn(sig.rank(), sig.rank(), |j, k| {
        Complex64::new((sig.parts()[j] as f64 * t.angles[k]).sin(), 0.0)
    });
    let sin_det = det(&sin_mat);
    Ok((cos_det + Complex64::new(f64::from(eps), 0.0) * sin_det) / (den * 2.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signatures::{dimension_unitary, enumerate_signatures};
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn generic_point(family: GroupFamily, rng: &mut ChaCha8Rng) -> TorusPoint {
        loop {
            let angles: Vec<f64> = (0..family.rank())
                .map(|_| rng.gen_range(0.05..std::f64::consts::PI - 0.05))
                .collect();
            let t = TorusPoint::new(family, angles).unwrap();
            if t.distinctness_gap() > 1e-2 || family.rank() == 1 {
                return t;
            }
        }
    }

    #[test]
    fn u2_standard_character_is_exponential_sum() {
        let sig = Signature::new(GroupFamily::UnitaryU(2), vec![1, 0]).unwrap();
        // (1, 0) is the trivial signature of U(2); the standard representation
        // in strict coordinates is (2, 0).
        let std_rep = Signature::new(GroupFamily::UnitaryU(2), vec![2, 0]).unwrap();
        let t = TorusPoint::new(GroupFamily::UnitaryU(2), vec![0.7, 0.3]).unwrap();
        let chi = character(&std_rep, &t).unwrap();
        let expect = Complex64::from_polar(1.0, 0.7) + Complex64::from_polar(1.0, 0.3);
        assert!((chi - expect).norm() < 1e-12);
        assert!((character(&sig, &t).unwrap() - Complex64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn trivial_character_is_one_for_all_families() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for family in [
            GroupFamily::UnitaryU(3),
            GroupFamily::OrthogonalO(2),
            GroupFamily::OrthogonalO(3),
            GroupFamily::SymplecticSp(2),
            GroupFamily::SymplecticSp(3),
        ] {
            for _ in 0..20 {
                let t = generic_point(family, &mut rng);
                let chi = character(&Signature::trivial(family), &t).unwrap();
                assert!(
                    (chi - Complex64::new(1.0, 0.0)).norm() < 1e-9,
                    "{family:?}: {chi}"
                );
            }
        }
    }

    #[test]
    fn sp1_character_is_sine_ratio() {
        let sig = Signature::new(GroupFamily::SymplecticSp(1), vec![3]).unwrap();
        let t = TorusPoint::new(GroupFamily::SymplecticSp(1), vec![0.8]).unwrap();
        let chi = character(&sig, &t).unwrap();
        assert!((chi.re - (3.0 * 0.8f64).sin() / 0.8f64.sin()).abs() < 1e-12);
        assert!(chi.im.abs() < 1e-14);
    }

    #[test]
    fn character_symmetric_under_angle_permutation_and_reflection() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for family in [
            GroupFamily::UnitaryU(3),
            GroupFamily::OrthogonalO(3),
            GroupFamily::SymplecticSp(3),
        ] {
            let sigs = enumerate_signatures(family, 4).unwrap();
            for _ in 0..20 {
                let sig = &sigs[rng.gen_range(0..sigs.len())];
                let t = generic_point(family, &mut rng);
                let v = character(sig, &t).unwrap();
                let mut perm = t.angles.clone();
                perm.swap(0, 2);
                let tp = TorusPoint::new(family, perm).unwrap();
                assert!((character(sig, &tp).unwrap() - v).norm() < 1e-9);
                if !matches!(family, GroupFamily::UnitaryU(_)) {
                    let mut refl = t.angles.clone();
                    refl[1] = -refl[1];
                    let tr = TorusPoint::new(family, refl).unwrap();
                    assert!((character(sig, &tr).unwrap() - v).norm() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn u_denominator_matches_vandermonde_factorization() {
        // The trivial-ordered denominator equals prod_{l<k}(e^{i psi_l} - e^{i psi_k})
        // up to a global sign that does not depend on the point.
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        for n in 2..=4usize {
            let family = GroupFamily::UnitaryU(n);
            let mut ratios = Vec::new();
            for _ in 0..10 {
                let t = generic_point(family, &mut rng);
                let den = det(&alternant(family, &family.trivial_parts(), &t.angles));
                let mut prod = Complex64::new(1.0, 0.0);
                for l in 0..n {
                    for k in (l + 1)..n {
                        prod *= Complex64::from_polar(1.0, t.angles[l])
                            - Complex64::from_polar(1.0, t.angles[k]);
                    }
                }
                ratios.push(den / prod);
            }
            for r in &ratios {
                assert!((r.norm() - 1.0).abs() < 1e-9, "|ratio| = {}", r.norm());
                assert!((r - ratios[0]).norm() < 1e-9, "ratio drifts: {ratios:?}");
            }
        }
    }

    #[test]
    fn character_at_near_identity_approaches_dimension() {
        // Torus-limit oracle for the dimension formula's denominator: chi at
        // eps * v extrapolated to eps = 0 by three-point Richardson. The
        // wrong denominator (factorials up to n instead of n-1) would miss by
        // a factor n!, far outside the 5% tolerance here.
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for n in 2..=3usize {
            let family = GroupFamily::UnitaryU(n);
            let sigs = enumerate_signatures(family, 3).unwrap();
            for _ in 0..10 {
                let sig = &sigs[rng.gen_range(0..sigs.len())];
                let chi_at = |eps: f64| {
                    let angles: Vec<f64> = (0..n).map(|k| eps * (k as f64 + 1.0)).collect();
                    character(sig, &TorusPoint::new(family, angles).unwrap()).unwrap()
                };
                let h = 0.04;
                let extrap =
                    chi_at(h / 4.0) * (8.0 / 3.0) - chi_at(h / 2.0) * 2.0 + chi_at(h) / 3.0;
                let dim = dimension_unitary(sig).unwrap() as f64;
                assert!(
                    (extrap - Complex64::new(dim, 0.0)).norm() < 5e-2 * dim,
                    "sig {:?}: extrapolated {extrap}, dim = {dim}",
                    sig.parts()
                );
            }
        }
    }

    #[test]
    fn merged_o_character_splits_into_pm_pair() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let family = GroupFamily::OrthogonalO(2);
        let sig = Signature::new(family, vec![3, 1]).unwrap();
        for _ in 0..20 {
            let t = generic_point(family, &mut rng);
            let plus = character_pm(&sig, &t, 1).unwrap();
            let minus = character_pm(&sig, &t, -1).unwrap();
            let merged = character(&sig, &t).unwrap();
            assert!((plus + minus - merged).norm() < 1e-10);
            // Negating the last angle swaps the pair.
            let mut neg = t.angles.clone();
            neg[1] = -neg[1];
            let tn = TorusPoint::new(family, neg).unwrap();
            assert!((character_pm(&sig, &tn, 1).unwrap() - minus).norm() < 1e-9);
            assert!((character_pm(&sig, &tn, -1).unwrap() - plus).norm() < 1e-9);
        }
    }

    #[test]
    fn rank1_pm_characters_match_display() {
        // SO(2): chi_l^{+-}(psi) = (cos l psi +- sin l psi) / 2 from the
        // 1x1 determinant substitution.
        let family = GroupFamily::OrthogonalO(1);
        let sig = Signature::new(family, vec![2]).unwrap();
        let t = TorusPoint::new(family, vec![0.9]).unwrap();
        let plus = character_pm(&sig, &t, 1).unwrap();
        let expect = ((2.0 * 0.9f64).cos() + (2.0 * 0.9f64).sin()) / 2.0;
        assert!((plus.re - expect).abs() < 1e-13);
    }

    #[test]
    fn pm_character_requires_positive_last_part() {
        let family = GroupFamily::OrthogonalO(2);
        let sig = Signature::new(family, vec![2, 0]).unwrap();
        let t = TorusPoint::new(family, vec![0.5, 1.1]).unwrap();
        assert!(matches!(
            character_pm(&sig, &t, 1),
            Err(Error::InvalidSignature(_))
        ));
    }

    #[test]
    fn degenerate_point_is_rejected() {
        let family = GroupFamily::UnitaryU(2);
        let sig = Signature::new(family, vec![2, 0]).unwrap();
        let t = TorusPoint::new(family, vec![1.0, 1.0]).unwrap();
        assert!(matches!(
            character(&sig, &t),
            Err(Error::DegenerateTorusPoint { .. })
        ));
    }
}
