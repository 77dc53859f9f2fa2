//! Dense complex matrix kernel: Hermitian eigendecomposition (cyclic Jacobi),
//! positive-semidefinite square root, trace norm, and a small SVD used by the
//! Uhlmann machinery.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{real, to_f64, tol, Scalar};

/// Dense complex matrix, row-major storage.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix<F> {
    rows: usize,
    cols: usize,
    data: Vec<Complex<F>>,
}

impl<F: Scalar> ComplexMatrix<F> {
    pub fn new(rows: usize, cols: usize, data: Vec<Complex<F>>) -> Result<Self> {
        if rows == 0 || cols == 0 || data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                got: data.len(),
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex::new(F::zero(), F::zero()); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex::new(F::one(), F::zero());
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex<F>) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    /// Real diagonal matrix.
    pub fn from_diagonal(diag: &[F]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = Complex::new(d, F::zero());
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[Complex<F>] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn conjugate(&self) -> Self {
        Self::from_fn(self.rows, self.cols, |r, c| self[(r, c)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)])
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows, "matmul dimension mismatch");
        let mut out = Self::zeros(self.rows, rhs.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(r, k)];
                if a.re == F::zero() && a.im == F::zero() {
                    continue;
                }
                for c in 0..rhs.cols {
                    out[(r, c)] = out[(r, c)] + a * rhs[(k, c)];
                }
            }
        }
        out
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Self::from_fn(self.rows, self.cols, |r, c| self[(r, c)] + rhs[(r, c)])
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Self::from_fn(self.rows, self.cols, |r, c| self[(r, c)] - rhs[(r, c)])
    }

    pub fn scale(&self, s: F) -> Self {
        Self::from_fn(self.rows, self.cols, |r, c| self[(r, c)] * s)
    }

    pub fn trace(&self) -> Complex<F> {
        debug_assert!(self.is_square());
        (0..self.rows).map(|i| self[(i, i)]).fold(
            Complex::new(F::zero(), F::zero()),
            |acc, z| acc + z,
        )
    }

    pub fn kron(&self, rhs: &Self) -> Self {
        Self::from_fn(self.rows * rhs.rows, self.cols * rhs.cols, |r, c| {
            self[(r / rhs.rows, c / rhs.cols)] * rhs[(r % rhs.rows, c % rhs.cols)]
        })
    }

    pub fn max_abs_entry(&self) -> F {
        self.data
            .iter()
            .map(|z| z.norm())
            .fold(F::zero(), |a, b| a.max(b))
    }

    /// Max-abs-entry of `self - self^H`.
    pub fn hermitian_deviation(&self) -> F {
        debug_assert!(self.is_square());
        let mut dev = F::zero();
        for r in 0..self.rows {
            for c in r..self.cols {
                let d = (self[(r, c)] - self[(c, r)].conj()).norm();
                dev = dev.max(d);
            }
        }
        dev
    }

    pub fn is_hermitian(&self, tau: F) -> bool {
        self.is_square() && self.hermitian_deviation() <= tau
    }

    /// Max-abs-entry of `U^H U - I`.
    pub fn unitary_deviation(&self) -> F {
        debug_assert!(self.is_square());
        let gram = self.adjoint().matmul(self);
        let mut dev = F::zero();
        for r in 0..self.rows {
            for c in 0..self.cols {
                let target = if r == c { F::one() } else { F::zero() };
                let d = (gram[(r, c)] - Complex::new(target, F::zero())).norm();
                dev = dev.max(d);
            }
        }
        dev
    }

    pub fn column(&self, c: usize) -> Vec<Complex<F>> {
        (0..self.rows).map(|r| self[(r, c)]).collect()
    }

    fn require_square(&self) -> Result<()> {
        if !self.is_square() {
            return Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        Ok(())
    }

    fn require_hermitian(&self) -> Result<()> {
        self.require_square()?;
        let dev = self.hermitian_deviation();
        if dev > tol::herm() {
            return Err(Error::NotHermitian {
                deviation: to_f64(dev),
            });
        }
        Ok(())
    }
}

impl<F> std::ops::Index<(usize, usize)> for ComplexMatrix<F> {
    type Output = Complex<F>;

    #[inline]
    fn index(&self, (r, c): (usize, usize)) -> &Complex<F> {
        &self.data[r * self.cols + c]
    }
}

impl<F> std::ops::IndexMut<(usize, usize)> for ComplexMatrix<F> {
    #[inline]
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex<F> {
        &mut self.data[r * self.cols + c]
    }
}

/// Result of a Hermitian eigendecomposition. Eigenvalues are sorted
/// descending; `eigenvectors` holds the matching eigenvectors as columns.
#[derive(Clone, Debug)]
pub struct EigenSystem<F> {
    pub eigenvalues: Vec<F>,
    pub eigenvectors: ComplexMatrix<F>,
}

/// Hermitian eigendecomposition by cyclic Jacobi with complex rotations.
pub fn hermitian_eig<F: Scalar>(m: &ComplexMatrix<F>) -> Result<EigenSystem<F>> {
    m.require_hermitian()?;
    let (vals, vecs) = jacobi(m, true);
    Ok(EigenSystem {
        eigenvalues: vals,
        eigenvectors: vecs.expect("vectors requested"),
    })
}

/// Eigenvalues only (skips accumulating the eigenvector matrix).
pub fn hermitian_eigvals<F: Scalar>(m: &ComplexMatrix<F>) -> Result<Vec<F>> {
    m.require_hermitian()?;
    Ok(jacobi(m, false).0)
}

/// Cyclic Jacobi on a Hermitian matrix. Returns eigenvalues sorted
/// descending and, optionally, the unitary of eigenvectors in matching
/// column order (stable tie handling).
fn jacobi<F: Scalar>(m: &ComplexMatrix<F>, want_vectors: bool) -> (Vec<F>, Option<ComplexMatrix<F>>) {
    let n = m.rows();
    // Symmetrize once so rotation arithmetic sees an exactly Hermitian input.
    let mut a = ComplexMatrix::from_fn(n, n, |r, c| {
        (m[(r, c)] + m[(c, r)].conj()) * real::<F>(0.5)
    });
    let mut v = want_vectors.then(|| ComplexMatrix::identity(n));

    let scale = a.max_abs_entry().max(F::one());
    let thresh = F::epsilon() * scale * real(0.5);
    let max_sweeps = 64;

    for _ in 0..max_sweeps {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let w = a[(p, q)];
                let wn = w.norm();
                if wn <= thresh {
                    continue;
                }
                rotated = true;
                // Phase that makes the pivot real, then a real Jacobi rotation.
                let phase = w / wn; // e^{i phi}
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let theta = (aqq - app) / (wn + wn);
                let t = if theta >= F::zero() {
                    F::one() / (theta + (theta * theta + F::one()).sqrt())
                } else {
                    -F::one() / (-theta + (theta * theta + F::one()).sqrt())
                };
                let c = F::one() / (t * t + F::one()).sqrt();
                let s = t * c;
                // J embeds [[c, s], [-s e^{-i phi}, c e^{-i phi}]] at (p, q).
                let jpp = Complex::new(c, F::zero());
                let jpq = Complex::new(s, F::zero());
                let jqp = -phase.conj() * s;
                let jqq = phase.conj() * c;

                // A <- J^H A J: columns first, then rows.
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * jpp + akq * jqp;
                    a[(k, q)] = akp * jpq + akq * jqq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = apk * jpp.conj() + aqk * jqp.conj();
                    a[(q, k)] = apk * jpq.conj() + aqk * jqq.conj();
                }
                // Clean the pivot pair.
                a[(p, q)] = Complex::new(F::zero(), F::zero());
                a[(q, p)] = Complex::new(F::zero(), F::zero());
                a[(p, p)].im = F::zero();
                a[(q, q)].im = F::zero();

                if let Some(v) = v.as_mut() {
                    for k in 0..n {
                        let vkp = v[(k, p)];
                        let vkq = v[(k, q)];
                        v[(k, p)] = vkp * jpp + vkq * jqp;
                        v[(k, q)] = vkp * jpq + vkq * jqq;
                    }
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<F> = (0..n).map(|i| a[(i, i)].re).collect();
    order.sort_by(|&i, &j| {
        diag[j]
            .partial_cmp(&diag[i])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(i.cmp(&j))
    });

    let vals: Vec<F> = order.iter().map(|&i| diag[i]).collect();
    let vecs = v.map(|v| ComplexMatrix::from_fn(n, n, |r, c| v[(r, order[c])]));
    (vals, vecs)
}

/// Square root of a positive-semidefinite Hermitian matrix. Eigenvalues in
/// `[-tol_psd, 0)` are clamped to zero first.
pub fn psd_sqrt<F: Scalar>(m: &ComplexMatrix<F>) -> Result<ComplexMatrix<F>> {
    let eig = hermitian_eig(m)?;
    let min = eig
        .eigenvalues
        .iter()
        .fold(F::infinity(), |a, &b| a.min(b));
    if min < -tol::psd::<F>() {
        return Err(Error::NegativeSpectrum { min: to_f64(min) });
    }
    let roots: Vec<F> = eig
        .eigenvalues
        .iter()
        .map(|&l| l.max(F::zero()).sqrt())
        .collect();
    Ok(rebuild(&eig.eigenvectors, &roots))
}

/// V diag(d) V^H.
pub(crate) fn rebuild<F: Scalar>(vectors: &ComplexMatrix<F>, diag: &[F]) -> ComplexMatrix<F> {
    let n = vectors.rows();
    let mut out = ComplexMatrix::zeros(n, n);
    for (k, &d) in diag.iter().enumerate() {
        if d == F::zero() {
            continue;
        }
        for r in 0..n {
            let vr = vectors[(r, k)] * d;
            for c in 0..n {
                out[(r, c)] = out[(r, c)] + vr * vectors[(c, k)].conj();
            }
        }
    }
    out
}

/// Trace norm tr|m| of a Hermitian matrix: sum of absolute eigenvalues.
pub fn trace_norm<F: Scalar>(m: &ComplexMatrix<F>) -> Result<F> {
    let vals = hermitian_eigvals(m)?;
    Ok(vals.iter().map(|l| l.abs()).sum())
}

/// Singular value decomposition of a square complex matrix, via the Hermitian
/// eigendecomposition of `m^H m`. Returns `(u, s, v)` with `m = u diag(s) v^H`
/// and singular values sorted descending.
pub fn svd_square<F: Scalar>(m: &ComplexMatrix<F>) -> Result<(ComplexMatrix<F>, Vec<F>, ComplexMatrix<F>)> {
    m.require_square()?;
    let n = m.rows();
    let gram = m.adjoint().matmul(m);
    let eig = hermitian_eig(&gram)?;
    let v = eig.eigenvectors;
    let s: Vec<F> = eig
        .eigenvalues
        .iter()
        .map(|&l| l.max(F::zero()).sqrt())
        .collect();

    let smax = s.first().copied().unwrap_or(F::zero());
    let rank_tol = smax * F::epsilon() * real(to_f64(real::<F>(n as f64)));
    let mut u_cols: Vec<Vec<Complex<F>>> = Vec::with_capacity(n);
    for k in 0..n {
        if s[k] > rank_tol && s[k] > F::zero() {
            let vk = v.column(k);
            let mut col = vec![Complex::new(F::zero(), F::zero()); n];
            for (r, c) in col.iter_mut().enumerate() {
                for (j, &vj) in vk.iter().enumerate() {
                    *c = *c + m[(r, j)] * vj;
                }
            }
            let inv = F::one() / s[k];
            for c in col.iter_mut() {
                *c = *c * inv;
            }
            u_cols.push(col);
        }
    }
    complete_orthonormal(&mut u_cols, n);
    let u = ComplexMatrix::from_fn(n, n, |r, c| u_cols[c][r]);
    Ok((u, s, v))
}

/// Extend a set of orthonormal columns to a full orthonormal basis of C^n
/// using modified Gram-Schmidt against the canonical basis.
pub(crate) fn complete_orthonormal<F: Scalar>(cols: &mut Vec<Vec<Complex<F>>>, n: usize) {
    let mut cand = 0;
    while cols.len() < n {
        assert!(cand < n, "failed to complete orthonormal basis");
        let mut v = vec![Complex::new(F::zero(), F::zero()); n];
        v[cand] = Complex::new(F::one(), F::zero());
        cand += 1;
        for _ in 0..2 {
            for base in cols.iter() {
                let overlap = inner(base, &v);
                for (vi, bi) in v.iter_mut().zip(base.iter()) {
                    *vi = *vi - overlap * *bi;
                }
            }
        }
        let norm: F = v.iter().map(|z| z.norm_sqr()).sum::<F>().sqrt();
        if norm > real(1e-6) {
            let inv = F::one() / norm;
            for vi in v.iter_mut() {
                *vi = *vi * inv;
            }
            cols.push(v);
        }
    }
}

/// <a|b> with conjugation on the first argument.
pub(crate) fn inner<F: Scalar>(a: &[Complex<F>], b: &[Complex<F>]) -> Complex<F> {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| x.conj() * *y)
        .fold(Complex::new(F::zero(), F::zero()), |acc, z| acc + z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn mat(rows: usize, cols: usize, entries: &[(f64, f64)]) -> ComplexMatrix<f64> {
        ComplexMatrix::new(rows, cols, entries.iter().map(|&(r, i)| c(r, i)).collect()).unwrap()
    }

    fn random_hermitian(n: usize, seed: u64) -> ComplexMatrix<f64> {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let g = ComplexMatrix::from_fn(n, n, |_, _| c(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5));
        g.add(&g.adjoint()).scale(0.5)
    }

    #[test]
    fn eig_identity() {
        let eig = hermitian_eig(&ComplexMatrix::<f64>::identity(2)).unwrap();
        assert_eq!(eig.eigenvalues, vec![1.0, 1.0]);
    }

    #[test]
    fn eig_diagonal() {
        let m = ComplexMatrix::from_diagonal(&[0.4, 0.6]);
        let eig = hermitian_eig(&m).unwrap();
        assert_eq!(eig.eigenvalues, vec![0.6, 0.4]);
    }

    #[test]
    fn eig_pauli_x() {
        let m = mat(2, 2, &[(0.0, 0.0), (1.0, 0.0), (1.0, 0.0), (0.0, 0.0)]);
        let eig = hermitian_eig(&m).unwrap();
        assert!((eig.eigenvalues[0] - 1.0).abs() < 1e-12);
        assert!((eig.eigenvalues[1] + 1.0).abs() < 1e-12);
        // Eigenvectors are (1, +-1)/sqrt(2) up to phase.
        for k in 0..2 {
            let v = eig.eigenvectors.column(k);
            assert!((v[0].norm() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-10);
            assert!((v[1].norm() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-10);
        }
        let recon = rebuild(&eig.eigenvectors, &eig.eigenvalues);
        assert!(recon.sub(&m).max_abs_entry() < 1e-10);
    }

    #[test]
    fn eig_rejects_non_square_and_non_hermitian() {
        let rect = ComplexMatrix::<f64>::zeros(2, 3);
        assert!(matches!(hermitian_eig(&rect), Err(Error::NotSquare { .. })));
        let m = mat(2, 2, &[(0.0, 0.0), (1.0, 0.0), (0.5, 0.0), (0.0, 0.0)]);
        assert!(matches!(hermitian_eig(&m), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn eig_reconstructs_random_hermitian() {
        for n in [2usize, 3, 5, 8, 16] {
            let m = random_hermitian(n, 100 + n as u64);
            let eig = hermitian_eig(&m).unwrap();
            let recon = rebuild(&eig.eigenvectors, &eig.eigenvalues);
            assert!(recon.sub(&m).max_abs_entry() < 1e-8, "n = {n}");
            assert!(eig.eigenvectors.unitary_deviation() < 1e-10, "n = {n}");
            let sum: f64 = eig.eigenvalues.iter().sum();
            assert!((sum - m.trace().re).abs() < 1e-9, "n = {n}");
        }
    }

    #[test]
    fn psd_sqrt_identity_and_diagonal() {
        let r = psd_sqrt(&ComplexMatrix::<f64>::identity(3)).unwrap();
        assert!(r.sub(&ComplexMatrix::identity(3)).max_abs_entry() < 1e-12);

        let r = psd_sqrt(&ComplexMatrix::<f64>::from_diagonal(&[4.0, 9.0])).unwrap();
        assert!((r[(0, 0)].re - 2.0).abs() < 1e-10);
        assert!((r[(1, 1)].re - 3.0).abs() < 1e-10);

        let r = psd_sqrt(&ComplexMatrix::<f64>::from_diagonal(&[0.5, 0.5])).unwrap();
        assert!((r[(0, 0)].re - 0.5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn psd_sqrt_squares_back() {
        for n in [2usize, 4, 8, 16, 32] {
            let g = random_hermitian(n, 7 + n as u64);
            let m = g.matmul(&g); // PSD by construction
            let r = psd_sqrt(&m).unwrap();
            assert!(r.matmul(&r).sub(&m).max_abs_entry() < 1e-8, "n = {n}");
        }
    }

    #[test]
    fn psd_sqrt_rejects_negative_spectrum() {
        let m = ComplexMatrix::from_diagonal(&[1.0, -0.5]);
        assert!(matches!(psd_sqrt(&m), Err(Error::NegativeSpectrum { .. })));
    }

    #[test]
    fn trace_norm_examples() {
        assert_eq!(trace_norm(&ComplexMatrix::<f64>::zeros(2, 2)).unwrap(), 0.0);
        let m = ComplexMatrix::<f64>::from_diagonal(&[0.1, -0.1]);
        assert!((trace_norm(&m).unwrap() - 0.2).abs() < 1e-12);
        let x = mat(2, 2, &[(0.0, 0.0), (1.0, 0.0), (1.0, 0.0), (0.0, 0.0)]);
        assert!((trace_norm(&x).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn trace_norm_matches_eigenvalue_sum() {
        for n in [2usize, 3, 6, 12] {
            let m = random_hermitian(n, 40 + n as u64);
            let vals = hermitian_eigvals(&m).unwrap();
            let direct: f64 = vals.iter().map(|l| l.abs()).sum();
            assert!((trace_norm(&m).unwrap() - direct).abs() < 1e-9);
        }
    }

    #[test]
    fn svd_reconstructs() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for n in [2usize, 3, 5, 9] {
            let m = ComplexMatrix::from_fn(n, n, |_, _| {
                c(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
            });
            let (u, s, v) = svd_square(&m).unwrap();
            assert!(u.unitary_deviation() < 1e-9);
            assert!(v.unitary_deviation() < 1e-9);
            let recon = u.matmul(&ComplexMatrix::from_diagonal(&s)).matmul(&v.adjoint());
            assert!(recon.sub(&m).max_abs_entry() < 1e-9, "n = {n}");
        }
    }

    #[test]
    fn svd_handles_rank_deficiency() {
        let m = ComplexMatrix::from_diagonal(&[1.0, 0.0, 0.0]);
        let (u, s, v) = svd_square(&m).unwrap();
        assert!(u.unitary_deviation() < 1e-9);
        let recon = u.matmul(&ComplexMatrix::from_diagonal(&s)).matmul(&v.adjoint());
        assert!(recon.sub(&m).max_abs_entry() < 1e-9);
    }

    #[test]
    fn works_in_f32() {
        let m = ComplexMatrix::<f32>::from_diagonal(&[0.25, 0.75]);
        let eig = hermitian_eig(&m).unwrap();
        assert!((eig.eigenvalues[0] - 0.75).abs() < 1e-5);
    }
}
