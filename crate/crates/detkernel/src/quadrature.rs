//! Weyl-integration quadrature over the maximal torus, plus the adaptive
//! tanh-sinh rule used as the independent oracle for closed-form
//! coefficients.
//!
//! Normalization conventions (total Haar mass 1 per group):
//!   U(n):  density |prod_{m<k}(e^{i psi_m} - e^{i psi_k})|^2 / ((2pi)^n n!).
//!   Sp(n): density (det sin(k psi_j))^2 / (pi^n n!).
//!   O(2n): the torus parametrizes SO(2n) classes only; with total mass 1 on
//!          O(2n) the SO component carries mass 1/2, so the density is
//!          (det cos((k-1) phi_m))^2 / (4 pi^n n!).
//!
//! Projections are computed division-free: chi * |den|^2 = num * conj(den),
//! so grid nodes near the Weyl-denominator zero set need no special casing.

use num_complex::Complex64;

use crate::characters::TorusPoint;
use crate::kernels::SpectralParameter;
use crate::error::{Error, Result};
use crate::linalg::{det, CMat};
use crate::signatures::{GroupFamily, Signature};

/// Uniform product grid over the torus with optional half-step offset.
#[derive(Debug, Clone, Copy)]
pub struct QuadratureGrid {
    pub points_per_dimension: usize,
    pub offset: bool,
    pub family: GroupFamily,
}

impl QuadratureGrid {
    /// Half-step-offset grid, the default for every projection (the offset
    /// dodges the kernel singularities at lattice angles).
    pub fn offset(family: GroupFamily, points_per_dimension: usize) -> Self {
        Self {
            points_per_dimension,
            offset: true,
            family,
        }
    }

    pub fn node_angle(&self, i: usize) -> f64 {
        let shift = if self.offset { 0.5 } else { 0.0 };
        2.0 * std::f64::consts::PI * (i as f64 + shift) / self.points_per_dimension as f64
    }

    fn node_count(&self) -> usize {
        self.points_per_dimension.pow(self.family.rank() as u32)
    }

    fn angles_of_flat(&self, mut flat: usize) -> Vec<f64> {
        let n = self.family.rank();
        let mut angles = vec![0.0; n];
        for slot in (0..n).rev() {
            angles[slot] = self.node_angle(flat % self.points_per_dimension);
            flat /= self.points_per_dimension;
        }
        angles
    }

    /// Overall constant mapping a raw node sum of f * den^2-type terms to the
    /// normalized integral.
    fn norm_constant(&self) -> f64 {
        let n = self.family.rank() as i32;
        let n_fact: f64 = (1..=self.family.rank()).map(|k| k as f64).product();
        let nodes = (self.points_per_dimension as f64).powi(n);
        match self.family {
            GroupFamily::UnitaryU(_) => 1.0 / (nodes * n_fact),
            GroupFamily::OrthogonalO(_) => 2f64.powi(n) / (4.0 * nodes * n_fact),
            GroupFamily::SymplecticSp(_) => 2f64.powi(n) / (nodes * n_fact),
        }
    }
}

fn alternant_det(family: GroupFamily, parts: &[i64], angles: &[f64]) -> Complex64 {
    let n = parts.len();
    let m = CMat::from_fn(n, n, |j, k| {
        let arg = parts[j] as f64 * angles[k];
        match family {
            GroupFamily::UnitaryU(_) => Complex64::from_polar(1.0, arg),
            GroupFamily::OrthogonalO(_) => Complex64::new(arg.cos(), 0.0),
            GroupFamily::SymplecticSp(_) => Complex64::new(arg.sin(), 0.0),
        }
    });
    det(&m)
}

/// Deterministic pairwise reduction: chunked straight sums combined on a
/// fixed binary tree, independent of any threading of the node loop.
fn pairwise_reduce(mut partial: Vec<Complex64>) -> Complex64 {
    if partial.is_empty() {
        return Complex64::new(0.0, 0.0);
    }
    while partial.len() > 1 {
        let mut next = Vec::with_capacity(partial.len().div_ceil(2));
        for pair in partial.chunks(2) {
            next.push(pair.iter().sum());
        }
        partial = next;
    }
    partial[0]
}

const CHUNK: usize = 4096;

/// Trapezoidal Weyl integral of a central function given on the torus.
pub fn weyl_integrate(
    f: impl Fn(&TorusPoint) -> Complex64,
    grid: &QuadratureGrid,
) -> Complex64 {
    let family = grid.family;
    let triv = family.trivial_parts();
    let total = grid.node_count();
    let mut chunks = Vec::with_capacity(total.div_ceil(CHUNK));
    let mut acc = Complex64::new(0.0, 0.0);
    for flat in 0..total {
        let angles = grid.angles_of_flat(flat);
        let den = alternant_det(family, &triv, &angles);
        let weight = match family {
            GroupFamily::UnitaryU(_) => Complex64::new(den.norm_sqr(), 0.0),
            _ => den * den,
        };
        let t = TorusPoint {
            family,
            angles,
            off_component: false,
        };
        acc += f(&t) * weight;
        if (flat + 1) % CHUNK == 0 {
            chunks.push(acc);
            acc = Complex64::new(0.0, 0.0);
        }
    }
    chunks.push(acc);
    pairwise_reduce(chunks) * grid.norm_constant()
}

/// weyl_integrate(f * conj(chi_sig)), the quadrature side of every
/// closed-form coefficient.
pub fn project_harmonic(
    f: impl Fn(&TorusPoint) -> Complex64,
    sig: &Signature,
    grid: &QuadratureGrid,
) -> Result<Complex64> {
    let out = project_many(f, std::slice::from_ref(sig), grid)?;
    Ok(out[0])
}

/// One grid sweep projecting `f` onto every signature in `sigs`.
pub fn project_many(
    f: impl Fn(&TorusPoint) -> Complex64,
    sigs: &[Signature],
    grid: &QuadratureGrid,
) -> Result<Vec<Complex64>> {
    let family = grid.family;
    for sig in sigs {
        if sig.family() != family {
            return Err(Error::MixedFamily(sig.family().tag(), family.tag()));
        }
    }
    let triv = family.trivial_parts();
    let total = grid.node_count();
    let mut chunk_sums: Vec<Vec<Complex64>> = vec![Vec::new(); sigs.len()];
    let mut acc = vec![Complex64::new(0.0, 0.0); sigs.len()];
    for flat in 0..total {
        let angles = grid.angles_of_flat(flat);
        let den = alternant_det(family, &triv, &angles);
        let t = TorusPoint {
            family,
            angles,
            off_component: false,
        };
        let fv = f(&t);
        if fv != Complex64::new(0.0, 0.0) {
            for (slot, sig) in sigs.iter().enumerate() {
                let num = alternant_det(family, sig.parts(), &t.angles);
                // chi-bar * |den|^2 = conj(num) * den; for O/Sp the dets are
                // real so the conjugation is immaterial.
                acc[slot] += fv * num.conj() * den;
            }
        }
        if (flat + 1) % CHUNK == 0 {
            for (slot, a) in acc.iter_mut().enumerate() {
                chunk_sums[slot].push(*a);
                *a = Complex64::new(0.0, 0.0);
            }
        }
    }
    for (slot, a) in acc.iter().enumerate() {
        chunk_sums[slot].push(*a);
    }
    let c = grid.norm_constant();
    Ok(chunk_sums
        .into_iter()
        .map(|v| pairwise_reduce(v) * c)
        .collect())
}

/// Gram matrix of merged characters under the family's quadrature measure;
/// entry (i, j) = <chi_i, chi_j>. Exact to roundoff once the grid resolves
/// the trigonometric degrees involved.
pub fn weyl_gram(sigs: &[Signature], grid: &QuadratureGrid) -> Vec<Vec<Complex64>> {
    let family = grid.family;
    let total = grid.node_count();
    let k = sigs.len();
    let mut gram = vec![vec![Complex64::new(0.0, 0.0); k]; k];
    let mut nums = vec![Complex64::new(0.0, 0.0); k];
    for flat in 0..total {
        let angles = grid.angles_of_flat(flat);
        for (slot, sig) in sigs.iter().enumerate() {
            nums[slot] = alternant_det(family, sig.parts(), &angles);
        }
        for i in 0..k {
            for j in i..k {
                gram[i][j] += nums[i] * nums[j].conj();
            }
        }
    }
    let c = grid.norm_constant();
    for i in 0..k {
        for j in i..k {
            gram[i][j] *= c;
            if i != j {
                gram[j][i] = gram[i][j].conj();
            }
        }
    }
    gram
}

/// Exact per-harmonic quadrature mass <chi_sig, chi_sig> under the family
/// conventions above: 1 for U and Sp; for O, 1/2 when l_n = 0 and 1/4 when
/// l_n > 0 (the merged label with l_n > 0 covers two irreducibles and the SO
/// component carries half the O(2n) mass).
pub fn harmonic_mass(sig: &Signature) -> f64 {
    match sig.family() {
        GroupFamily::UnitaryU(_) | GroupFamily::SymplecticSp(_) => 1.0,
        GroupFamily::OrthogonalO(_) => {
            if *sig.parts().last().unwrap() == 0 {
                0.5
            } else {
                0.25
            }
        }
    }
}

/// Normalized projection coefficient: project_harmonic / harmonic_mass.
/// This is the quadrature oracle the calibration procedure fits against.
pub fn project_coefficient(
    f: impl Fn(&TorusPoint) -> Complex64,
    sig: &Signature,
    grid: &QuadratureGrid,
) -> Result<Complex64> {
    Ok(project_harmonic(f, sig, grid)? / harmonic_mass(sig))
}

// ---------------------------------------------------------------------------
// Adaptive tanh-sinh quadrature (1-D and tensored 2-D)
// ---------------------------------------------------------------------------

const DE_T_MAX: f64 = 6.1;
const DE_ENDPOINT_FLOOR: f64 = 1e-280;

/// Integrate f over (a, b) by the double-exponential transform, refining the
/// step until successive levels agree within `tol` (absolute). Endpoint
/// algebraic singularities integrable against dx are handled by the
/// transform; nodes whose distance to an endpoint underflows are skipped.
pub fn integrate_de(
    f: impl Fn(f64) -> Complex64,
    a: f64,
    b: f64,
    tol: f64,
    max_level: u32,
) -> Complex64 {
    let half = 0.5 * (b - a);
    let eval_t = |t: f64| -> Complex64 {
        let u = std::f64::consts::FRAC_PI_2 * t.sinh();
        let e2u = (2.0 * u).exp();
        let dist_a = (b - a) / (1.0 + 1.0 / e2u);
        let dist_b = (b - a) / (1.0 + e2u);
        if dist_a.min(dist_b) < DE_ENDPOINT_FLOOR {
            return Complex64::new(0.0, 0.0);
        }
        // Evaluate from the nearer endpoint so the distance keeps full
        // relative accuracy deep into the singular corners.
        let x = if dist_a <= dist_b { a + dist_a } else { b - dist_b };
        let ch = u.cosh();
        let w = half * std::f64::consts::FRAC_PI_2 * t.cosh() / (ch * ch);
        f(x) * w
    };
    let mut h = 1.0f64;
    let mut sum = eval_t(0.0);
    let mut k = 1;
    while (k as f64) * h <= DE_T_MAX {
        sum += eval_t(k as f64 * h) + eval_t(-(k as f64) * h);
        k += 1;
    }
    let mut value = sum * h;
    for _level in 1..=max_level {
        h *= 0.5;
        // Add the odd multiples of the new step.
        let mut extra = Complex64::new(0.0, 0.0);
        let mut k = 1;
        while (k as f64) * h <= DE_T_MAX {
            extra += eval_t(k as f64 * h) + eval_t(-(k as f64) * h);
            k += 2;
        }
        sum += extra;
        let new_value = sum * h;
        let diff = (new_value - value).norm();
        value = new_value;
        if diff <= tol {
            break;
        }
    }
    value
}

/// Tensor-product tanh-sinh over (a, b)^2 at a fixed level, with one level
/// refinement convergence check.
pub fn integrate_de_2d(
    f: impl Fn(f64, f64) -> Complex64,
    a: f64,
    b: f64,
    level: u32,
) -> Complex64 {
    let nodes = de_nodes(a, b, level);
    let mut total = Complex64::new(0.0, 0.0);
    for &(x, wx) in &nodes {
        let mut inner = Complex64::new(0.0, 0.0);
        for &(y, wy) in &nodes {
            inner += f(x, y) * wy;
        }
        total += inner * wx;
    }
    total
}

fn de_nodes(a: f64, b: f64, level: u32) -> Vec<(f64, f64)> {
    let half = 0.5 * (b - a);
    let h = 0.5f64.powi(level as i32);
    let mut out = Vec::new();
    let kmax = (DE_T_MAX / h) as i64;
    for k in -kmax..=kmax {
        let t = k as f64 * h;
        let u = std::f64::consts::FRAC_PI_2 * t.sinh();
        let e2u = (2.0 * u).exp();
        let dist_a = (b - a) / (1.0 + 1.0 / e2u);
        let dist_b = (b - a) / (1.0 + e2u);
        if dist_a.min(dist_b) < DE_ENDPOINT_FLOOR {
            continue;
        }
        let x = if dist_a <= dist_b { a + dist_a } else { b - dist_b };
        let ch = u.cosh();
        let w = h * half * std::f64::consts::FRAC_PI_2 * t.cosh() / (ch * ch);
        out.push((x, w));
    }
    out
}

/// Projection of the determinant kernel onto one character by tanh-sinh
/// quadrature (ranks 1 and 2), in the same measure conventions as the grid
/// version: returns weyl_integrate(ell * conj(chi_sig)) evaluated with the
/// continuous tanh-sinh rule instead of the trapezoid.
///
/// Each dimension is folded onto (0, pi) and the 2^n reflected images
/// psi -> 2pi - psi are assembled through exact trigonometric reflection
/// rules. The kernel's algebraic singularity then sits only at the fold's
/// zero endpoint, where |sin(psi/2)| is computed without the cancellation
/// that floats suffer near psi = 2pi.
pub fn de_project_kernel(
    p: &SpectralParameter,
    sig: &Signature,
    level: u32,
) -> Result<Complex64> {
    let family = sig.family();
    if p.family() != family {
        return Err(Error::MixedFamily(p.family().tag(), family.tag()));
    }
    let n = family.rank();
    let triv = family.trivial_parts();
    let tau = 2.0 * std::f64::consts::PI;
    let n_fact: f64 = (1..=n).map(|k| k as f64).product();
    let constant = match family {
        GroupFamily::UnitaryU(_) => 1.0 / (tau.powi(n as i32) * n_fact),
        GroupFamily::OrthogonalO(_) => 1.0 / (4.0 * std::f64::consts::PI.powi(n as i32) * n_fact),
        GroupFamily::SymplecticSp(_) => 1.0 / (std::f64::consts::PI.powi(n as i32) * n_fact),
    };
    let exponent = p.sin_exponent();
    let phase_rate = match *p {
        SpectralParameter::Unitary { sigma, tau, .. } => sigma - tau,
        _ => 0.0,
    };
    // One summand: folded angles in (0, pi), reflection mask selecting which
    // coordinates stand for 2pi - psi, and the quadrature weight. The kernel
    // magnitude is carried in log scale: for negative exponents the singular
    // factors of separate coordinates can overflow f64 individually even
    // though the weighted contribution is tiny.
    let term = |folded: &[f64], mask: usize, w: f64| -> Complex64 {
        let signed: Vec<f64> = folded
            .iter()
            .enumerate()
            .map(|(k, &psi)| if mask >> k & 1 == 1 { -psi } else { psi })
            .collect();
        let num = alternant_det(family, sig.parts(), &signed);
        let den = alternant_det(family, &triv, &signed);
        let weight = match family {
            GroupFamily::UnitaryU(_) => num.conj() * den,
            _ => num * den,
        } * w;
        if weight == Complex64::new(0.0, 0.0) {
            return weight;
        }
        let mut log_magnitude = 0.0f64;
        let mut phase = 0.0f64;
        for (k, &psi) in folded.iter().enumerate() {
            log_magnitude += exponent * (psi / 2.0).sin().ln();
            let sign = if mask >> k & 1 == 1 { -1.0 } else { 1.0 };
            phase += phase_rate * sign * (psi - std::f64::consts::PI) / 2.0;
        }
        let scale = log_magnitude + weight.norm().ln();
        if scale < -710.0 {
            return Complex64::new(0.0, 0.0);
        }
        (weight / weight.norm()) * Complex64::from_polar(scale.exp(), phase)
    };
    let nodes = de_nodes(0.0, std::f64::consts::PI, level);
    let mut acc = Complex64::new(0.0, 0.0);
    match n {
        1 => {
            for mask in 0..2usize {
                for &(x, w) in &nodes {
                    acc += term(&[x], mask, w);
                }
            }
        }
        2 => {
            for mask in 0..4usize {
                for &(x, wx) in &nodes {
                    for &(y, wy) in &nodes {
                        acc += term(&[x, y], mask, wx * wy);
                    }
                }
            }
        }
        _ => {
            return Err(Error::DimensionMismatch(format!(
                "tanh-sinh projection supports ranks 1 and 2, got {n}"
            )))
        }
    }
    Ok(acc * constant)
}
