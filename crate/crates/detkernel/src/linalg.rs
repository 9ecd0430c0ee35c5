//! Dense complex linear algebra for the small matrices this crate works with
//! (sizes stay below ~20 in every code path: group elements, block Mobius
//! elements, structured-identity instances).
//!
//! Includes partially pivoted LU with a signed-log determinant, a cyclic
//! Jacobi eigensolver for Hermitian matrices, Gram-Schmidt QR for Haar-ish
//! random unitaries, and eigenangle extraction for unitary matrices.

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::special::SignedLogValue;

/// Row-major dense complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMat {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Complex64>,
}

impl CMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn from_real_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        Self::from_fn(rows, cols, |i, j| Complex64::new(f(i, j), 0.0))
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn mul(&self, other: &CMat) -> CMat {
        assert_eq!(self.cols, other.rows);
        let mut out = CMat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn add(&self, other: &CMat) -> CMat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (x, y) in out.data.iter_mut().zip(&other.data) {
            *x += y;
        }
        out
    }

    pub fn sub(&self, other: &CMat) -> CMat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (x, y) in out.data.iter_mut().zip(&other.data) {
            *x -= y;
        }
        out
    }

    pub fn scale(&self, s: Complex64) -> CMat {
        let mut out = self.clone();
        for x in out.data.iter_mut() {
            *x *= s;
        }
        out
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> CMat {
        CMat::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> CMat {
        CMat::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> CMat {
        CMat::from_fn(self.rows, self.cols, |i, j| self[(i, j)].conj())
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// max |self - other| entrywise.
    pub fn max_abs_diff(&self, other: &CMat) -> f64 {
        self.sub(other).max_abs()
    }

    /// Deviation from the target group: max |A A* - I|.
    pub fn unitary_deviation(&self) -> f64 {
        let n = self.rows;
        self.mul(&self.adjoint()).max_abs_diff(&CMat::identity(n))
    }

    /// Assemble a 2x2 block matrix [[a, b], [c, d]].
    pub fn from_blocks(a: &CMat, b: &CMat, c: &CMat, d: &CMat) -> CMat {
        let n = a.rows;
        assert!(
            [a, b, c, d].iter().all(|m| m.rows == n && m.cols == n),
            "blocks must be square and equal-sized"
        );
        CMat::from_fn(2 * n, 2 * n, |i, j| match (i < n, j < n) {
            (true, true) => a[(i, j)],
            (true, false) => b[(i, j - n)],
            (false, true) => c[(i - n, j)],
            (false, false) => d[(i - n, j - n)],
        })
    }

    /// Split a 2n x 2n matrix into its four n x n blocks.
    pub fn to_blocks(&self) -> (CMat, CMat, CMat, CMat) {
        assert!(self.is_square() && self.rows % 2 == 0);
        let n = self.rows / 2;
        (
            CMat::from_fn(n, n, |i, j| self[(i, j)]),
            CMat::from_fn(n, n, |i, j| self[(i, j + n)]),
            CMat::from_fn(n, n, |i, j| self[(i + n, j)]),
            CMat::from_fn(n, n, |i, j| self[(i + n, j + n)]),
        )
    }
}

impl std::ops::Index<(usize, usize)> for CMat {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

// ---------------------------------------------------------------------------
// LU decomposition: determinant and solve
// ---------------------------------------------------------------------------

/// Complex division that survives operands far outside the range where
/// norm_sqr is representable (num_complex's `/` underflows below ~1e-154).
fn cdiv(z: Complex64, w: Complex64) -> Complex64 {
    let s = w.re.abs().max(w.im.abs());
    let ws = Complex64::new(w.re / s, w.im / s);
    let zs = Complex64::new(z.re / s, z.im / s);
    zs * ws.conj() / ws.norm_sqr()
}

/// Determinant by partially pivoted elimination.
pub fn det(matrix: &CMat) -> Complex64 {
    let (slv_re, phase) = det_signed_log(matrix);
    phase * slv_re.value()
}

/// Determinant as (signed-log magnitude, unit phase). For real matrices the
/// phase is +-1 and the product of pivots is accumulated without overflow.
/// Rows are equilibrated first so that extreme scales (down to ~1e-290)
/// cannot underflow the complex divisions inside the elimination.
pub fn det_signed_log(matrix: &CMat) -> (SignedLogValue, Complex64) {
    assert!(matrix.is_square());
    let n = matrix.rows;
    let mut a = matrix.clone();
    let mut log_mag = 0.0f64;
    let mut phase = Complex64::new(1.0, 0.0);
    for i in 0..n {
        let s = (0..n).map(|j| a[(i, j)].norm()).fold(0.0f64, f64::max);
        if s < 1e-290 {
            return (SignedLogValue::ZERO, Complex64::new(1.0, 0.0));
        }
        if s < 1e-100 || s > 1e100 {
            for j in 0..n {
                a[(i, j)] /= s;
            }
            log_mag += s.ln();
        }
    }
    for col in 0..n {
        let mut pivot_row = col;
        let mut pivot_mag = a[(col, col)].norm();
        for r in (col + 1)..n {
            let m = a[(r, col)].norm();
            if m > pivot_mag {
                pivot_mag = m;
                pivot_row = r;
            }
        }
        if pivot_mag == 0.0 {
            return (SignedLogValue::ZERO, Complex64::new(1.0, 0.0));
        }
        if pivot_row != col {
            for j in 0..n {
                let tmp = a[(col, j)];
                a[(col, j)] = a[(pivot_row, j)];
                a[(pivot_row, j)] = tmp;
            }
            phase = -phase;
        }
        let pivot = a[(col, col)];
        log_mag += pivot.norm().ln();
        phase *= pivot / pivot.norm();
        for r in (col + 1)..n {
            let factor = cdiv(a[(r, col)], pivot);
            if factor == Complex64::new(0.0, 0.0) {
                continue;
            }
            for j in (col + 1)..n {
                let sub = factor * a[(col, j)];
                a[(r, j)] -= sub;
            }
        }
    }
    (
        SignedLogValue {
            log_magnitude: log_mag,
            sign: 1,
        },
        phase,
    )
}

/// Solve A X = B by LU with partial pivoting. Returns the estimated
/// reciprocal pivot ratio alongside the solution for conditioning checks.
pub fn solve(a: &CMat, b: &CMat) -> Result<CMat> {
    assert!(a.is_square());
    assert_eq!(a.rows, b.rows);
    let n = a.rows;
    let mut lu = a.clone();
    let mut x = b.clone();
    let mut max_pivot = 0.0f64;
    let mut min_pivot = f64::INFINITY;
    for col in 0..n {
        let mut pivot_row = col;
        let mut pivot_mag = lu[(col, col)].norm();
        for r in (col + 1)..n {
            let m = lu[(r, col)].norm();
            if m > pivot_mag {
                pivot_mag = m;
                pivot_row = r;
            }
        }
        if pivot_mag == 0.0 {
            return Err(Error::IllConditionedDenominator(f64::INFINITY));
        }
        max_pivot = max_pivot.max(pivot_mag);
        min_pivot = min_pivot.min(pivot_mag);
        if pivot_row != col {
            for j in 0..n {
                let tmp = lu[(col, j)];
                lu[(col, j)] = lu[(pivot_row, j)];
                lu[(pivot_row, j)] = tmp;
            }
            for j in 0..x.cols {
                let tmp = x[(col, j)];
                x[(col, j)] = x[(pivot_row, j)];
                x[(pivot_row, j)] = tmp;
            }
        }
        let pivot = lu[(col, col)];
        for r in (col + 1)..n {
            let factor = cdiv(lu[(r, col)], pivot);
            lu[(r, col)] = factor;
            for j in (col + 1)..n {
                let sub = factor * lu[(col, j)];
                lu[(r, j)] -= sub;
            }
            for j in 0..x.cols {
                let sub = factor * x[(col, j)];
                x[(r, j)] -= sub;
            }
        }
    }
    if max_pivot / min_pivot > 1e12 {
        return Err(Error::IllConditionedDenominator(max_pivot / min_pivot));
    }
    // Back substitution.
    for col in (0..n).rev() {
        let pivot = lu[(col, col)];
        for j in 0..x.cols {
            let mut s = x[(col, j)];
            for k in (col + 1)..n {
                s -= lu[(col, k)] * x[(k, j)];
            }
            x[(col, j)] = cdiv(s, pivot);
        }
    }
    Ok(x)
}

pub fn inverse(a: &CMat) -> Result<CMat> {
    solve(a, &CMat::identity(a.rows))
}

// ---------------------------------------------------------------------------
// Hermitian eigensolver (cyclic Jacobi)
// ---------------------------------------------------------------------------

/// Eigenvalues (ascending) and eigenvectors (columns of the returned matrix)
/// of a Hermitian matrix, by cyclic Jacobi with complex rotations.
pub fn hermitian_eigen(h: &CMat) -> (Vec<f64>, CMat) {
    assert!(h.is_square());
    let n = h.rows;
    let mut a = h.clone();
    let mut v = CMat::identity(n);
    let tol = 1e-30 * h.max_abs().max(1.0);
    for _sweep in 0..64 {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[(p, q)].norm_sqr();
            }
        }
        if off.sqrt() <= tol {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq.norm() < 1e-300 {
                    continue;
                }
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                // Unitary plane rotation U = [[c, s e^{i phi}], [-s e^{-i phi}, c]]
                // with phi = arg(a_pq), chosen so (U* A U)_{pq} = 0.
                let phase = apq / apq.norm();
                let tau = (aqq - app) / (2.0 * apq.norm());
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let sp = s * phase;
                let spc = s * phase.conj();
                // A <- A U (columns), then A <- U* A (rows); V <- V U.
                for i in 0..n {
                    let aip = a[(i, p)];
                    let aiq = a[(i, q)];
                    a[(i, p)] = c * aip - spc * aiq;
                    a[(i, q)] = sp * aip + c * aiq;
                }
                for j in 0..n {
                    let apj = a[(p, j)];
                    let aqj = a[(q, j)];
                    a[(p, j)] = c * apj - sp * aqj;
                    a[(q, j)] = spc * apj + c * aqj;
                }
                for i in 0..n {
                    let vip = v[(i, p)];
                    let viq = v[(i, q)];
                    v[(i, p)] = c * vip - spc * viq;
                    v[(i, q)] = sp * vip + c * viq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    order.sort_by(|&i, &j| diag[i].partial_cmp(&diag[j]).unwrap());
    let values: Vec<f64> = order.iter().map(|&i| diag[i]).collect();
    let vectors = CMat::from_fn(n, n, |i, j| v[(i, order[j])]);
    (values, vectors)
}

// ---------------------------------------------------------------------------
// Eigenangles of unitary matrices
// ---------------------------------------------------------------------------

/// Eigenangles of a unitary matrix U, wrapped to [0, 2pi) and sorted
/// ascending.
///
/// Works through the commuting Hermitian pair (U + U*)/2, (U - U*)/(2i):
/// eigenvectors of the first split U into normal blocks, and each block is
/// resolved by the second. Exact degeneracies (the +-psi pairs of orthogonal
/// and symplectic elements) land in shared cos-clusters and are separated
/// there.
pub fn unitary_eigenangles(u: &CMat) -> Vec<f64> {
    assert!(u.is_square());
    let n = u.rows;
    let ustar = u.adjoint();
    let re = u.add(&ustar).scale(Complex64::new(0.5, 0.0));
    let (cos_vals, vecs) = hermitian_eigen(&re);

    // Cluster equal cosines.
    let mut angles = Vec::with_capacity(n);
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && (cos_vals[end] - cos_vals[start]).abs() < 1e-8 {
            end += 1;
        }
        let k = end - start;
        if k == 1 {
            // v* U v recovers e^{i psi} directly.
            let v = CMat::from_fn(n, 1, |i, _| vecs[(i, start)]);
            let lam = v.adjoint().mul(&u.mul(&v))[(0, 0)];
            angles.push(angle_of(lam));
        } else {
            // Diagonalize the skew part restricted to the cluster.
            let b = u.sub(&ustar).scale(Complex64::new(0.0, -0.5));
            let basis = CMat::from_fn(n, k, |i, j| vecs[(i, start + j)]);
            let b_sub = basis.adjoint().mul(&b.mul(&basis));
            let (_sins, w) = hermitian_eigen(&b_sub);
            let full = basis.mul(&w);
            for j in 0..k {
                let v = CMat::from_fn(n, 1, |i, _| full[(i, j)]);
                let lam = v.adjoint().mul(&u.mul(&v))[(0, 0)];
                angles.push(angle_of(lam));
            }
        }
        start = end;
    }
    angles.sort_by(|a, b| a.partial_cmp(b).unwrap());
    angles
}

fn angle_of(lam: Complex64) -> f64 {
    let mut psi = lam.arg();
    if psi < 0.0 {
        psi += 2.0 * std::f64::consts::PI;
    }
    if psi >= 2.0 * std::f64::consts::PI {
        psi -= 2.0 * std::f64::consts::PI;
    }
    psi
}

// ---------------------------------------------------------------------------
// Random matrix generation
// ---------------------------------------------------------------------------

/// Haar-distributed unitary: QR of a complex Ginibre matrix with the R
/// diagonal phases divided out.
pub fn random_unitary<R: Rng>(n: usize, rng: &mut R) -> CMat {
    let g = CMat::from_fn(n, n, |_, _| {
        Complex64::new(gaussian(rng), gaussian(rng))
    });
    gram_schmidt_unitary(&g)
}

/// Haar-ish random real orthogonal matrix in SO(n): QR of a real Ginibre
/// matrix, with the determinant fixed to +1 by flipping one column.
pub fn random_special_orthogonal<R: Rng>(n: usize, rng: &mut R) -> CMat {
    let g = CMat::from_real_fn(n, n, |_, _| gaussian(rng));
    let mut q = gram_schmidt_unitary(&g);
    let (_, phase) = det_signed_log(&q);
    if phase.re < 0.0 {
        for i in 0..n {
            q[(i, 0)] = -q[(i, 0)];
        }
    }
    q
}

/// Random quaternionic-unitary matrix in Sp(n), returned as its complex
/// 2n x 2n image: exp of a quaternionic anti-Hermitian matrix.
pub fn random_symplectic<R: Rng>(n: usize, rng: &mut R) -> CMat {
    // Anti-Hermitian quaternionic X = A + B j with A* = -A (complex n x n)
    // and B symmetric-complex; complex image [[A, B], [-conj(B), conj(A)]].
    let mut a = CMat::zeros(n, n);
    for i in 0..n {
        a[(i, i)] = Complex64::new(0.0, gaussian(rng));
        for j in (i + 1)..n {
            let z = Complex64::new(gaussian(rng), gaussian(rng));
            a[(i, j)] = z;
            a[(j, i)] = -z.conj();
        }
    }
    let mut b = CMat::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let z = Complex64::new(gaussian(rng), gaussian(rng));
            b[(i, j)] = z;
            b[(j, i)] = z;
        }
    }
    let x = CMat::from_blocks(&a, &b, &b.conj().scale(Complex64::new(-1.0, 0.0)), &a.conj());
    unitary_exp(&x.scale(Complex64::new(0.5, 0.0)))
}

/// exp(X) for anti-Hermitian X, via the Hermitian eigensystem of -iX.
pub fn unitary_exp(x: &CMat) -> CMat {
    let n = x.rows;
    let h = x.scale(Complex64::new(0.0, -1.0));
    let (vals, vecs) = hermitian_eigen(&h);
    // X = iH with H Hermitian, so exp(X) = V diag(e^{i vals}) V*.
    let mut d = CMat::zeros(n, n);
    for i in 0..n {
        d[(i, i)] = Complex64::from_polar(1.0, vals[i]);
    }
    vecs.mul(&d).mul(&vecs.adjoint())
}

/// Modified Gram-Schmidt orthonormalization with R-diagonal phase fixing.
fn gram_schmidt_unitary(g: &CMat) -> CMat {
    let n = g.rows;
    let mut q = g.clone();
    for j in 0..n {
        for k in 0..j {
            let mut dot = Complex64::new(0.0, 0.0);
            for i in 0..n {
                dot += q[(i, k)].conj() * q[(i, j)];
            }
            for i in 0..n {
                let sub = dot * q[(i, k)];
                q[(i, j)] -= sub;
            }
        }
        let norm: f64 = (0..n).map(|i| q[(i, j)].norm_sqr()).sum::<f64>().sqrt();
        for i in 0..n {
            q[(i, j)] /= norm;
        }
    }
    q
}

fn gaussian<R: Rng>(rng: &mut R) -> f64 {
    // Box-Muller; rejection-free and dependency-free.
    let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
    let u2: f64 = rng.gen_range(0.0..1.0);
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// Whether the 2n x 2n complex matrix is the image of a quaternionic matrix:
/// Omega conj(X) Omega^{-1} = X with Omega = [[0, I], [-I, 0]].
pub fn quaternionic_deviation(x: &CMat) -> f64 {
    assert!(x.is_square() && x.rows % 2 == 0);
    let (a, b, c, d) = x.to_blocks();
    let e1 = d.max_abs_diff(&a.conj());
    let e2 = c.max_abs_diff(&b.conj().scale(Complex64::new(-1.0, 0.0)));
    e1.max(e2)
}

/// Quaternionic determinant of a quaternionic-image matrix: the complex
/// determinant is real nonnegative, and det_H is its square root.
pub fn quaternion_det(x: &CMat) -> Result<f64> {
    let (slv, phase) = det_signed_log(x);
    if slv.is_zero() {
        return Ok(0.0);
    }
    if phase.im.abs() > 1e-8 || phase.re < 0.0 {
        return Err(Error::InternalError(format!(
            "quaternionic determinant not real nonnegative (phase {phase})"
        )));
    }
    Ok((slv.log_magnitude / 2.0).exp())
}
