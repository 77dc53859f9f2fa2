//! State containers, bipartite structure, partial trace, purification, and
//! seeded random-state sampling.
//!
//! Composite index convention, fixed globally: for a bipartite system the
//! joint index is `a * dB + b` (A is the slow index). Purifications place the
//! system first and the reference second under the same convention.

use std::io::{BufRead, Write};

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, hermitian_eigvals, ComplexMatrix};
use crate::scalar::{real, to_f64, tol, Scalar};

/// Deterministic RNG handle: a root seed plus a substream counter. Identical
/// `(seed, stream)` pairs yield identical sample sequences.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RngSeed {
    pub seed: u64,
    pub stream: u64,
}

impl RngSeed {
    pub fn new(seed: u64) -> Self {
        Self { seed, stream: 0 }
    }

    pub fn with_stream(seed: u64, stream: u64) -> Self {
        Self { seed, stream }
    }

    /// Derive an independent substream, e.g. one per trial or per restart.
    pub fn substream(&self, tag: u64) -> Self {
        // splitmix64-style mix so (stream, tag) pairs do not collide.
        let mut z = self
            .stream
            .wrapping_mul(0x9E37_79B9_7F4A_7C15)
            .wrapping_add(tag)
            .wrapping_add(0x2545_F491_4F6C_DD1D);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        Self {
            seed: self.seed,
            stream: z ^ (z >> 31),
        }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }
}

/// Hermitian, positive-semidefinite, unit-trace operator.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix<F> {
    mat: ComplexMatrix<F>,
}

impl<F: Scalar> DensityMatrix<F> {
    /// Validating constructor: Hermitian within tolerance, unit trace, and no
    /// eigenvalue below `-tol_psd`.
    pub fn new(mat: ComplexMatrix<F>) -> Result<Self> {
        if !mat.is_square() {
            return Err(Error::NotSquare {
                rows: mat.rows(),
                cols: mat.cols(),
            });
        }
        let dev = mat.hermitian_deviation();
        if dev > tol::herm() {
            return Err(Error::NotHermitian {
                deviation: to_f64(dev),
            });
        }
        let tr = mat.trace();
        if (tr.re - F::one()).abs() > tol::trace() || tr.im.abs() > tol::trace() {
            return Err(Error::InvalidState(format!(
                "trace = {:?}, expected 1",
                (to_f64(tr.re), to_f64(tr.im))
            )));
        }
        let vals = hermitian_eigvals(&mat)?;
        let min = vals.iter().fold(F::infinity(), |a, &b| a.min(b));
        if min < -tol::psd::<F>() {
            return Err(Error::NegativeSpectrum { min: to_f64(min) });
        }
        Ok(Self { mat })
    }

    /// For matrices valid by construction (partial traces, convex mixtures,
    /// explicit diagonal states). Debug builds still verify Hermiticity.
    pub(crate) fn from_valid(mat: ComplexMatrix<F>) -> Self {
        debug_assert!(mat.is_hermitian(tol::herm::<F>() * real(10.0)));
        Self { mat }
    }

    pub fn dim(&self) -> usize {
        self.mat.rows()
    }

    pub fn mat(&self) -> &ComplexMatrix<F> {
        &self.mat
    }

    pub fn into_mat(self) -> ComplexMatrix<F> {
        self.mat
    }

    /// Eigenvalues sorted descending.
    pub fn spectrum(&self) -> Vec<F> {
        hermitian_eigvals(&self.mat).expect("density matrix is Hermitian")
    }

    /// tr(rho^2).
    pub fn purity(&self) -> F {
        let mut p = F::zero();
        for r in 0..self.dim() {
            for c in 0..self.dim() {
                p += self.mat[(r, c)].norm_sqr();
            }
        }
        p
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self::from_valid(ComplexMatrix::identity(dim).scale(F::one() / real(dim as f64)))
    }

    /// Number of eigenvalues above the PSD tolerance.
    pub fn rank(&self) -> usize {
        self.spectrum()
            .iter()
            .filter(|&&l| l > tol::psd())
            .count()
    }
}

/// Unit vector on a finite-dimensional space.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState<F> {
    amplitudes: Vec<Complex<F>>,
}

impl<F: Scalar> PureState<F> {
    pub fn new(amplitudes: Vec<Complex<F>>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::InvalidState("empty amplitude vector".into()));
        }
        let norm: F = amplitudes.iter().map(|z| z.norm_sqr()).sum::<F>().sqrt();
        if (norm - F::one()).abs() > tol::trace() {
            return Err(Error::InvalidState(format!(
                "norm = {}, expected 1",
                to_f64(norm)
            )));
        }
        Ok(Self { amplitudes })
    }

    /// Normalize an arbitrary nonzero vector.
    pub fn normalized(mut amplitudes: Vec<Complex<F>>) -> Result<Self> {
        let norm: F = amplitudes.iter().map(|z| z.norm_sqr()).sum::<F>().sqrt();
        if norm <= F::zero() {
            return Err(Error::InvalidState("zero vector".into()));
        }
        let inv = F::one() / norm;
        for z in amplitudes.iter_mut() {
            *z = *z * inv;
        }
        Ok(Self { amplitudes })
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex<F>] {
        &self.amplitudes
    }

    pub fn overlap(&self, other: &Self) -> Complex<F> {
        crate::linalg::inner(&self.amplitudes, &other.amplitudes)
    }

    /// |psi><psi| as a density matrix.
    pub fn projector(&self) -> DensityMatrix<F> {
        let n = self.dim();
        let mat = ComplexMatrix::from_fn(n, n, |r, c| {
            self.amplitudes[r] * self.amplitudes[c].conj()
        });
        DensityMatrix::from_valid(mat)
    }

    /// Computational basis vector |k>.
    pub fn basis_state(dim: usize, k: usize) -> Self {
        let mut amps = vec![Complex::new(F::zero(), F::zero()); dim];
        amps[k] = Complex::new(F::one(), F::zero());
        Self { amplitudes: amps }
    }

    pub fn tensor(&self, other: &Self) -> Self {
        let mut amps = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amplitudes {
            for b in &other.amplitudes {
                amps.push(*a * *b);
            }
        }
        Self { amplitudes: amps }
    }
}

/// Factor dimensions of a bipartite system.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BipartiteDims {
    pub da: usize,
    pub db: usize,
}

impl BipartiteDims {
    pub fn new(da: usize, db: usize) -> Result<Self> {
        if da == 0 || db == 0 {
            return Err(Error::DimensionMismatch {
                expected: 1,
                got: 0,
            });
        }
        Ok(Self { da, db })
    }

    pub fn total(&self) -> usize {
        self.da * self.db
    }
}

/// A density matrix tagged with a tensor factorization `dim = dA * dB`.
#[derive(Clone, Debug, PartialEq)]
pub struct BipartiteState<F> {
    pub dims: BipartiteDims,
    pub rho: DensityMatrix<F>,
}

impl<F: Scalar> BipartiteState<F> {
    pub fn new(dims: BipartiteDims, rho: DensityMatrix<F>) -> Result<Self> {
        if dims.total() != rho.dim() {
            return Err(Error::DimensionMismatch {
                expected: dims.total(),
                got: rho.dim(),
            });
        }
        Ok(Self { dims, rho })
    }
}

/// Which subsystem the partial trace keeps.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Subsystem {
    A,
    B,
}

/// Reduced density matrix of the kept subsystem.
pub fn partial_trace<F: Scalar>(state: &BipartiteState<F>, keep: Subsystem) -> DensityMatrix<F> {
    let BipartiteDims { da, db } = state.dims;
    let keep_mask = match keep {
        Subsystem::A => [true, false],
        Subsystem::B => [false, true],
    };
    let mat = partial_trace_general(state.rho.mat(), &[da, db], &keep_mask);
    DensityMatrix::from_valid(mat)
}

/// Partial trace over an arbitrary tensor factorization: `dims` are the factor
/// dimensions (slowest index first), `keep[i]` marks factors that survive.
pub fn partial_trace_general<F: Scalar>(
    rho: &ComplexMatrix<F>,
    dims: &[usize],
    keep: &[bool],
) -> ComplexMatrix<F> {
    assert_eq!(dims.len(), keep.len());
    let total: usize = dims.iter().product();
    assert_eq!(rho.rows(), total, "factorization must match matrix size");

    let kept_dim: usize = dims
        .iter()
        .zip(keep)
        .filter(|(_, &k)| k)
        .map(|(&d, _)| d)
        .product();
    let mut out = ComplexMatrix::zeros(kept_dim, kept_dim);

    // Decompose a joint index into (kept part, traced part).
    let split = |mut idx: usize| -> (usize, usize) {
        let mut kept = 0usize;
        let mut traced = 0usize;
        for (i, &d) in dims.iter().enumerate().rev() {
            let digit = idx % d;
            idx /= d;
            if keep[i] {
                kept += digit * (dims[i + 1..]
                    .iter()
                    .zip(&keep[i + 1..])
                    .filter(|(_, &k)| k)
                    .map(|(&d, _)| d)
                    .product::<usize>());
            } else {
                traced += digit * (dims[i + 1..]
                    .iter()
                    .zip(&keep[i + 1..])
                    .filter(|(_, &k)| !k)
                    .map(|(&d, _)| d)
                    .product::<usize>());
            }
        }
        (kept, traced)
    };

    for i in 0..total {
        let (ki, ti) = split(i);
        for j in 0..total {
            let (kj, tj) = split(j);
            if ti == tj {
                out[(ki, kj)] = out[(ki, kj)] + rho[(i, j)];
            }
        }
    }
    out
}

/// Spectral purification: `|rho> = sum_i sqrt(lambda_i) |e_i> (x) |i>` with
/// eigenvalues descending and the computational reference basis.
pub fn purify<F: Scalar>(rho: &DensityMatrix<F>, ref_dim: usize) -> Result<PureState<F>> {
    let d = rho.dim();
    let eig = hermitian_eig(rho.mat())?;
    if ref_dim < d {
        let rank = eig
            .eigenvalues
            .iter()
            .filter(|&&l| l > tol::psd())
            .count();
        if ref_dim < rank {
            return Err(Error::RefTooSmall { ref_dim, rank });
        }
    }
    let mut amps = vec![Complex::new(F::zero(), F::zero()); d * ref_dim];
    for (i, &l) in eig.eigenvalues.iter().enumerate() {
        if i >= ref_dim || l <= F::zero() {
            continue;
        }
        let w = l.max(F::zero()).sqrt();
        for x in 0..d {
            amps[x * ref_dim + i] = eig.eigenvectors[(x, i)] * w;
        }
    }
    PureState::normalized(amps)
}

/// Haar-random pure state: normalized vector of iid standard complex
/// Gaussian amplitudes.
pub fn sample_haar_pure<F: Scalar>(dim: usize, seed: &RngSeed) -> PureState<F>
where
    StandardNormal: Distribution<F>,
{
    let mut rng = seed.rng();
    let amps: Vec<Complex<F>> = (0..dim)
        .map(|_| Complex::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    PureState::normalized(amps).expect("Gaussian vector is nonzero almost surely")
}

/// Haar-random unitary: modified Gram-Schmidt of a Gaussian matrix (the
/// positive-diagonal QR convention, which is Haar-distributed).
pub fn sample_haar_unitary<F: Scalar>(dim: usize, seed: &RngSeed) -> ComplexMatrix<F>
where
    StandardNormal: Distribution<F>,
{
    let mut rng = seed.rng();
    let mut cols: Vec<Vec<Complex<F>>> = (0..dim)
        .map(|_| {
            (0..dim)
                .map(|_| Complex::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
                .collect()
        })
        .collect();
    for k in 0..dim {
        for _ in 0..2 {
            for j in 0..k {
                let overlap = crate::linalg::inner(&cols[j], &cols[k]);
                for i in 0..dim {
                    let prev = cols[j][i];
                    cols[k][i] = cols[k][i] - overlap * prev;
                }
            }
        }
        let norm: F = cols[k].iter().map(|z| z.norm_sqr()).sum::<F>().sqrt();
        let inv = F::one() / norm;
        for z in cols[k].iter_mut() {
            *z = *z * inv;
        }
    }
    ComplexMatrix::from_fn(dim, dim, |r, c| cols[c][r])
}

/// Induced-measure mixed state: partial trace of a Haar pure state on
/// `dim * ancilla_dim`. `ancilla_dim = 1` yields pure states.
pub fn sample_density<F: Scalar>(dim: usize, ancilla_dim: usize, seed: &RngSeed) -> DensityMatrix<F>
where
    StandardNormal: Distribution<F>,
{
    let psi = sample_haar_pure::<F>(dim * ancilla_dim, seed);
    let state = BipartiteState {
        dims: BipartiteDims {
            da: dim,
            db: ancilla_dim,
        },
        rho: psi.projector(),
    };
    partial_trace(&state, Subsystem::A)
}

/// Convex mix toward a fresh induced-measure state:
/// `(1 - amplitude) rho + amplitude rho_random`. The trace distance to the
/// input is at most `2 * amplitude`.
pub fn perturb<F: Scalar>(
    state: &DensityMatrix<F>,
    amplitude: F,
    seed: &RngSeed,
) -> Result<DensityMatrix<F>>
where
    StandardNormal: Distribution<F>,
{
    if amplitude < F::zero() || amplitude > F::one() {
        return Err(Error::AmplitudeOutOfRange(to_f64(amplitude)));
    }
    if amplitude == F::zero() {
        return Ok(state.clone());
    }
    let d = state.dim();
    let random = sample_density(d, d, seed);
    let mat = state
        .mat()
        .scale(F::one() - amplitude)
        .add(&random.mat().scale(amplitude));
    Ok(DensityMatrix::from_valid(mat))
}

/// Pure-state analogue of [`perturb`]: renormalized `psi + amplitude * chi`
/// with Haar-random `chi`. Used by the pure-state continuity campaigns.
pub fn perturb_pure<F: Scalar>(psi: &PureState<F>, amplitude: F, seed: &RngSeed) -> Result<PureState<F>>
where
    StandardNormal: Distribution<F>,
{
    if amplitude < F::zero() || amplitude > F::one() {
        return Err(Error::AmplitudeOutOfRange(to_f64(amplitude)));
    }
    if amplitude == F::zero() {
        return Ok(psi.clone());
    }
    let chi = sample_haar_pure::<F>(psi.dim(), seed);
    let amps: Vec<Complex<F>> = psi
        .amplitudes()
        .iter()
        .zip(chi.amplitudes())
        .map(|(&a, &b)| a + b * amplitude)
        .collect();
    PureState::normalized(amps)
}

// ---------------------------------------------------------------------------
// Named states

/// (|00> + |11>)/sqrt(2).
pub fn bell_state<F: Scalar>() -> PureState<F> {
    let h = real::<F>(0.5).sqrt();
    PureState::new(vec![
        Complex::new(h, F::zero()),
        Complex::new(F::zero(), F::zero()),
        Complex::new(F::zero(), F::zero()),
        Complex::new(h, F::zero()),
    ])
    .expect("unit norm")
}

/// Werner state `p |beta><beta| + (1 - p) I/4` on two qubits.
pub fn werner_state<F: Scalar>(p: F) -> Result<BipartiteState<F>> {
    if p < F::zero() || p > F::one() {
        return Err(Error::OutOfDomain {
            value: to_f64(p),
            lo: 0.0,
            hi: 1.0,
        });
    }
    let bell = bell_state::<F>().projector();
    let mixed = DensityMatrix::<F>::maximally_mixed(4);
    let mat = bell.mat().scale(p).add(&mixed.mat().scale(F::one() - p));
    BipartiteState::new(BipartiteDims { da: 2, db: 2 }, DensityMatrix::from_valid(mat))
}

// ---------------------------------------------------------------------------
// Plain-text state serialization: first line "dim dA dB", then dim^2 lines of
// "re im" in row-major order.

pub fn write_state<F: Scalar, W: Write>(out: &mut W, state: &BipartiteState<F>) -> Result<()> {
    let d = state.rho.dim();
    writeln!(out, "{} {} {}", d, state.dims.da, state.dims.db)?;
    for r in 0..d {
        for c in 0..d {
            let z = state.rho.mat()[(r, c)];
            writeln!(out, "{:?} {:?}", to_f64(z.re), to_f64(z.im))?;
        }
    }
    Ok(())
}

pub fn read_state<F: Scalar, R: BufRead>(input: &mut R) -> Result<BipartiteState<F>> {
    let mut header = String::new();
    input.read_line(&mut header)?;
    let parts: Vec<&str> = header.split_whitespace().collect();
    if parts.len() != 3 {
        return Err(Error::Parse(format!(
            "expected header 'dim dA dB', got {header:?}"
        )));
    }
    let dim: usize = parts[0]
        .parse()
        .map_err(|e| Error::Parse(format!("bad dim: {e}")))?;
    let da: usize = parts[1]
        .parse()
        .map_err(|e| Error::Parse(format!("bad dA: {e}")))?;
    let db: usize = parts[2]
        .parse()
        .map_err(|e| Error::Parse(format!("bad dB: {e}")))?;
    if da * db != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: da * db,
        });
    }
    let mut data = Vec::with_capacity(dim * dim);
    let mut line = String::new();
    for k in 0..dim * dim {
        line.clear();
        if input.read_line(&mut line)? == 0 {
            return Err(Error::Parse(format!("expected {} entries, got {k}", dim * dim)));
        }
        let nums: Vec<&str> = line.split_whitespace().collect();
        if nums.len() != 2 {
            return Err(Error::Parse(format!("expected 're im' on line: {line:?}")));
        }
        let re: f64 = nums[0]
            .parse()
            .map_err(|e| Error::Parse(format!("bad real part: {e}")))?;
        let im: f64 = nums[1]
            .parse()
            .map_err(|e| Error::Parse(format!("bad imaginary part: {e}")))?;
        data.push(Complex::new(real::<F>(re), real::<F>(im)));
    }
    let mat = ComplexMatrix::new(dim, dim, data)?;
    let rho = DensityMatrix::new(mat)?;
    BipartiteState::new(BipartiteDims::new(da, db)?, rho)
}
