//! Pure-state entanglement, entanglement of formation (closed-form two-qubit
//! oracle and a general variational upper bound), and the purity-based
//! monotone -log2 tr(rho_A^2).
//!
//! The minimizer searches over orthonormal measurement bases on a reference
//! system purifying the input: measuring the reference realizes an ensemble
//! for the state, and the minimum average reduced entropy over visited bases
//! is an upper bound on the entanglement of formation. A reference of
//! dimension (dA*dB)^2 suffices to reach every candidate ensemble.

use num_complex::Complex;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigvals, ComplexMatrix};
use crate::metrics::{binary_entropy, entropy, shannon, ProbVector};
use crate::scalar::{log2, real, to_f64, tol, Scalar};
use crate::states::{
    partial_trace, purify, sample_haar_unitary, BipartiteDims, BipartiteState, DensityMatrix,
    PureState, RngSeed, Subsystem,
};

/// Probability-weighted list of pure states realizing a mixed state.
#[derive(Clone, Debug)]
pub struct Ensemble<F> {
    pub weights: ProbVector<F>,
    pub members: Vec<PureState<F>>,
}

impl<F: Scalar> Ensemble<F> {
    /// sum_m p_m |psi_m><psi_m|.
    pub fn mixture(&self) -> DensityMatrix<F> {
        let dim = self.members[0].dim();
        let mut mat = ComplexMatrix::zeros(dim, dim);
        for (&p, psi) in self.weights.probabilities().iter().zip(&self.members) {
            for r in 0..dim {
                let ar = psi.amplitudes()[r] * p;
                for c in 0..dim {
                    mat[(r, c)] = mat[(r, c)] + ar * psi.amplitudes()[c].conj();
                }
            }
        }
        DensityMatrix::from_valid(mat)
    }

    /// Average reduced entropy sum_m p_m S(tr_B |psi_m><psi_m|).
    pub fn average_entanglement(&self, dims: BipartiteDims) -> Result<F> {
        let mut total = F::zero();
        for (&p, psi) in self.weights.probabilities().iter().zip(&self.members) {
            total += p * pure_entanglement(psi, dims)?;
        }
        Ok(total)
    }
}

/// Outcome of the variational minimization. `value` is an UPPER bound on the
/// entanglement of formation, certified by the stored ensemble.
#[derive(Clone, Debug)]
pub struct EofResult<F> {
    pub value: F,
    pub ensemble: Ensemble<F>,
    /// Winning measurement basis on the reference, as columns.
    pub basis: ComplexMatrix<F>,
    pub converged: bool,
    pub restarts_used: usize,
    pub objective_history: Vec<F>,
}

/// Entropies of the reference and system+reference after measuring the
/// reference, plus the induced ensemble: `s_ar - s_r` equals the ensemble's
/// average reduced entropy.
#[derive(Clone, Debug)]
pub struct MeasuredSplit<F> {
    pub s_ar: F,
    pub s_r: F,
    pub ensemble: Ensemble<F>,
}

/// Entanglement of a bipartite pure state: entropy of the reduced state of A.
pub fn pure_entanglement<F: Scalar>(psi: &PureState<F>, dims: BipartiteDims) -> Result<F> {
    let rho_a = reduced_a(psi, dims)?;
    Ok(entropy(&rho_a))
}

/// -log2 tr(rho_A^2): an entanglement monotone that is not proportional to
/// the reduced entropy.
pub fn monotone_tilde<F: Scalar>(psi: &PureState<F>, dims: BipartiteDims) -> Result<F> {
    let rho_a = reduced_a(psi, dims)?;
    Ok(-log2(rho_a.purity()))
}

fn reduced_a<F: Scalar>(psi: &PureState<F>, dims: BipartiteDims) -> Result<DensityMatrix<F>> {
    if psi.dim() != dims.total() {
        return Err(Error::DimensionMismatch {
            expected: dims.total(),
            got: psi.dim(),
        });
    }
    // rho_A = W W^H for the amplitude matrix W[a, b].
    let w = ComplexMatrix::from_fn(dims.da, dims.db, |a, b| psi.amplitudes()[a * dims.db + b]);
    let mat = w.matmul(&w.adjoint());
    Ok(DensityMatrix::from_valid(mat))
}

/// Wootters' closed-form entanglement of formation for two qubits:
/// E = h((1 + sqrt(1 - C^2))/2) with the concurrence C from the spin-flipped
/// spectrum. Used as the exact oracle in every two-qubit cross-check.
pub fn eof_two_qubit<F: Scalar>(state: &BipartiteState<F>) -> Result<F> {
    let BipartiteDims { da, db } = state.dims;
    if da != 2 || db != 2 {
        return Err(Error::WrongDimensions { da, db });
    }
    Ok(binary_entropy(
        (F::one() + (F::one() - concurrence(state)?.powi(2)).max(F::zero()).sqrt())
            / real(2.0),
    ))
}

/// Concurrence C(rho) = max(0, l1 - l2 - l3 - l4), where l_i are the
/// descending square roots of the eigenvalues of rho (Y x Y) rho* (Y x Y).
pub fn concurrence<F: Scalar>(state: &BipartiteState<F>) -> Result<F> {
    let BipartiteDims { da, db } = state.dims;
    if da != 2 || db != 2 {
        return Err(Error::WrongDimensions { da, db });
    }
    let rho = state.rho.mat();
    // sigma_y (x) sigma_y is real: antidiagonal (-1, 1, 1, -1).
    let mut yy = ComplexMatrix::<F>::zeros(4, 4);
    yy[(0, 3)] = Complex::new(-F::one(), F::zero());
    yy[(1, 2)] = Complex::new(F::one(), F::zero());
    yy[(2, 1)] = Complex::new(F::one(), F::zero());
    yy[(3, 0)] = Complex::new(-F::one(), F::zero());

    let flipped = yy.matmul(&rho.conjugate()).matmul(&yy);
    let sqrt_rho = crate::linalg::psd_sqrt(rho)?;
    let m = sqrt_rho.matmul(&flipped).matmul(&sqrt_rho);
    let m = m.add(&m.adjoint()).scale(real(0.5));
    let mut vals = hermitian_eigvals(&m)?;
    // Same noise floor as the fidelity: zeros of the product pick up O(eps)
    // that the square root would amplify.
    let scale = vals.iter().fold(F::zero(), |a, &b| a.max(b.abs()));
    let cutoff = scale * F::epsilon() * real(16.0);
    for v in vals.iter_mut() {
        *v = if *v > cutoff { v.sqrt() } else { F::zero() };
    }
    let c = vals[0] - vals[1] - vals[2] - vals[3];
    Ok(c.max(F::zero()))
}

/// Measure the reference factor of a purification in the given orthonormal
/// basis and collect the induced ensemble on the system.
///
/// The purification lives on `dA * dB * ref_dim` with the reference as the
/// fastest index; `basis` holds the measurement vectors as columns. Members
/// with weight below the pruning tolerance are dropped and the weights
/// renormalized.
pub fn ensemble_from_measurement<F: Scalar>(
    purification: &PureState<F>,
    dims: BipartiteDims,
    ref_dim: usize,
    basis: &ComplexMatrix<F>,
) -> Result<MeasuredSplit<F>> {
    let sys = dims.total();
    if purification.dim() != sys * ref_dim {
        return Err(Error::DimensionMismatch {
            expected: sys * ref_dim,
            got: purification.dim(),
        });
    }
    if basis.rows() != ref_dim || basis.cols() != ref_dim {
        return Err(Error::DimensionMismatch {
            expected: ref_dim,
            got: basis.rows(),
        });
    }
    let dev = basis.unitary_deviation();
    if dev > tol::herm::<F>() * real(100.0) {
        return Err(Error::NotUnitary {
            deviation: to_f64(dev),
        });
    }

    // Posterior amplitudes: column m of M conj(B), with M[x, r] the
    // purification amplitudes.
    let m_mat = ComplexMatrix::from_fn(sys, ref_dim, |x, r| {
        purification.amplitudes()[x * ref_dim + r]
    });
    let posterior = m_mat.matmul(&basis.conjugate());

    let mut weights = Vec::new();
    let mut members = Vec::new();
    for m in 0..ref_dim {
        let col = posterior.column(m);
        let p: F = col.iter().map(|z| z.norm_sqr()).sum();
        if p < tol::prune() {
            continue;
        }
        weights.push(p);
        members.push(PureState::normalized(col)?);
    }
    let total: F = weights.iter().copied().sum();
    for w in weights.iter_mut() {
        *w = *w / total;
    }
    let weights = ProbVector::new(weights)?;
    let s_r = shannon(&weights);

    // S(AR') from the explicit post-measurement state on A x R, which is
    // block diagonal in the measurement basis.
    let da = dims.da;
    let kept = members.len();
    let mut ar = ComplexMatrix::zeros(da * kept, da * kept);
    for (m, (&p, psi)) in weights.probabilities().iter().zip(&members).enumerate() {
        let w = ComplexMatrix::from_fn(da, dims.db, |a, b| psi.amplitudes()[a * dims.db + b]);
        let rho_a = w.matmul(&w.adjoint());
        for r in 0..da {
            for c in 0..da {
                ar[(r * kept + m, c * kept + m)] = rho_a[(r, c)] * p;
            }
        }
    }
    let s_ar = entropy(&DensityMatrix::from_valid(ar));

    Ok(MeasuredSplit {
        s_ar,
        s_r,
        ensemble: Ensemble { weights, members },
    })
}

/// Knobs of the variational minimizer.
#[derive(Clone, Debug)]
pub struct OptimizerConfig<F> {
    pub restarts: usize,
    pub max_sweeps: usize,
    pub initial_step: F,
    pub step_shrink: F,
    pub min_step: F,
    pub tol_objective: F,
    pub stall_sweeps: usize,
    pub agree_tol: F,
    pub dim_cap: usize,
}

impl<F: Scalar> Default for OptimizerConfig<F> {
    fn default() -> Self {
        Self {
            restarts: 32,
            max_sweeps: 400,
            initial_step: real(0.3),
            step_shrink: real(0.5),
            min_step: real(1e-5),
            tol_objective: real(1e-7),
            stall_sweeps: 3,
            agree_tol: real(1e-4),
            dim_cap: 16,
        }
    }
}

/// Variational upper bound on the entanglement of formation: random-restart
/// coordinate descent over measurement bases on a reference of dimension
/// `(dA*dB)^2`. Deterministic for a fixed `(seed, restarts)` regardless of
/// scheduling; restarts run in parallel.
pub fn eof_minimize<F: Scalar>(
    state: &BipartiteState<F>,
    config: &OptimizerConfig<F>,
    seed: &RngSeed,
) -> Result<EofResult<F>>
where
    StandardNormal: Distribution<F>,
{
    let dims = state.dims;
    let sys = dims.total();
    if sys > config.dim_cap {
        return Err(Error::DimensionCap {
            dim: sys,
            cap: config.dim_cap,
        });
    }
    let ref_dim = sys * sys;
    let purification = purify(&state.rho, ref_dim)?;
    let m_mat = ComplexMatrix::from_fn(sys, ref_dim, |x, r| {
        purification.amplitudes()[x * ref_dim + r]
    });

    let outcomes: Vec<(F, ComplexMatrix<F>, Vec<F>)> = (0..config.restarts)
        .into_par_iter()
        .map(|r| {
            let start = sample_haar_unitary(ref_dim, &seed.substream(r as u64));
            descend(&m_mat, dims, ref_dim, start, config)
        })
        .collect();

    let best_idx = (0..outcomes.len())
        .min_by(|&i, &j| {
            outcomes[i]
                .0
                .partial_cmp(&outcomes[j].0)
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(i.cmp(&j))
        })
        .expect("at least one restart");
    let mut sorted: Vec<F> = outcomes.iter().map(|o| o.0).collect();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let converged = sorted.len() >= 2 && sorted[1] - sorted[0] <= config.agree_tol;

    let (_, best_basis, history) = &outcomes[best_idx];
    let split = ensemble_from_measurement(&purification, dims, ref_dim, best_basis)?;
    // The certified value comes from the stored ensemble, not the descent's
    // running objective.
    let value = split.ensemble.average_entanglement(dims)?;

    Ok(EofResult {
        value,
        ensemble: split.ensemble,
        basis: best_basis.clone(),
        converged,
        restarts_used: config.restarts,
        objective_history: history.clone(),
    })
}

/// Greedy coordinate descent over Givens rotations of the measurement basis.
/// Returns (objective, basis, per-sweep objective history).
fn descend<F: Scalar>(
    m_mat: &ComplexMatrix<F>,
    dims: BipartiteDims,
    ref_dim: usize,
    mut basis: ComplexMatrix<F>,
    config: &OptimizerConfig<F>,
) -> (F, ComplexMatrix<F>, Vec<F>) {
    let sys = dims.total();
    // Posterior columns and their per-column objective contributions.
    let mut posterior = m_mat.matmul(&basis.conjugate());
    let mut contrib: Vec<F> = (0..ref_dim)
        .map(|m| column_contribution(&posterior, m, dims))
        .collect();
    let mut objective: F = contrib.iter().copied().sum();
    let mut history = vec![objective];

    let mut step = config.initial_step;
    let mut stall = 0usize;
    let accept_tol = F::epsilon() * real(64.0);

    for _ in 0..config.max_sweeps {
        let sweep_start = objective;
        let mut improved = false;
        for i in 0..ref_dim {
            for j in (i + 1)..ref_dim {
                for kind in 0..2u8 {
                    // exp of the (i, j) generator coordinate: a Givens
                    // rotation, real (kind 0) or with an i phase (kind 1).
                    let (c, s) = (step.cos(), step.sin());
                    let s = if kind == 0 {
                        Complex::new(s, F::zero())
                    } else {
                        Complex::new(F::zero(), s)
                    };
                    let mut best: Option<(Complex<F>, F, F, Vec<Complex<F>>, Vec<Complex<F>>)> =
                        None;
                    for dir in [s, -s] {
                        // Candidate posterior columns i and j: the rotation
                        // of the basis columns acts conjugated on P.
                        let mut pi = Vec::with_capacity(sys);
                        let mut pj = Vec::with_capacity(sys);
                        for x in 0..sys {
                            let a = posterior[(x, i)];
                            let b = posterior[(x, j)];
                            pi.push(a * c - b * dir.conj());
                            pj.push(a * dir + b * c);
                        }
                        let ci = contribution_of(&pi, dims);
                        let cj = contribution_of(&pj, dims);
                        let delta = ci + cj - contrib[i] - contrib[j];
                        if delta < -accept_tol
                            && best.as_ref().map_or(true, |b| ci + cj < b.1 + b.2)
                        {
                            best = Some((dir, ci, cj, pi, pj));
                        }
                    }
                    if let Some((dir, ci, cj, pi, pj)) = best {
                        for x in 0..sys {
                            posterior[(x, i)] = pi[x];
                            posterior[(x, j)] = pj[x];
                        }
                        // Keep the basis in sync: B columns rotate with the
                        // un-conjugated coefficients.
                        for r in 0..ref_dim {
                            let bi = basis[(r, i)];
                            let bj = basis[(r, j)];
                            basis[(r, i)] = bi * c - bj * dir;
                            basis[(r, j)] = bi * dir.conj() + bj * c;
                        }
                        objective += ci + cj - contrib[i] - contrib[j];
                        contrib[i] = ci;
                        contrib[j] = cj;
                        improved = true;
                    }
                }
            }
        }
        history.push(objective);
        let gain = sweep_start - objective;
        if !improved {
            step = step * config.step_shrink;
            if step < config.min_step {
                break;
            }
            stall = 0;
        } else if gain < config.tol_objective {
            // Accepted moves but negligible total gain: the step is too
            // coarse for the remaining landscape, shrink it too.
            stall += 1;
            if stall >= config.stall_sweeps {
                step = step * config.step_shrink;
                if step < config.min_step {
                    break;
                }
                stall = 0;
            }
        } else {
            stall = 0;
        }
    }

    // Recompute once to shed accumulated drift.
    let posterior = m_mat.matmul(&basis.conjugate());
    let objective = (0..ref_dim)
        .map(|m| column_contribution(&posterior, m, dims))
        .sum();
    (objective, basis, history)
}

fn column_contribution<F: Scalar>(
    posterior: &ComplexMatrix<F>,
    m: usize,
    dims: BipartiteDims,
) -> F {
    let col: Vec<Complex<F>> = (0..posterior.rows()).map(|x| posterior[(x, m)]).collect();
    contribution_of(&col, dims)
}

/// p_m * S(rho_{A,m}) for an unnormalized posterior column.
fn contribution_of<F: Scalar>(col: &[Complex<F>], dims: BipartiteDims) -> F {
    let p: F = col.iter().map(|z| z.norm_sqr()).sum();
    if p < tol::prune() {
        return F::zero();
    }
    let da = dims.da;
    let db = dims.db;
    if da == 2 {
        // Closed form via the determinant of the normalized 2x2 reduced state.
        let mut g00 = F::zero();
        let mut g11 = F::zero();
        let mut g01 = Complex::new(F::zero(), F::zero());
        for b in 0..db {
            let x = col[b];
            let y = col[db + b];
            g00 += x.norm_sqr();
            g11 += y.norm_sqr();
            g01 = g01 + x * y.conj();
        }
        let det = (g00 * g11 - g01.norm_sqr()) / (p * p);
        let disc = (F::one() - real::<F>(4.0) * det).max(F::zero()).sqrt();
        let lam = (F::one() + disc) / real(2.0);
        return p * binary_entropy(lam.min(F::one()));
    }
    // General small dA: eigenvalues of the reduced state.
    let w = ComplexMatrix::from_fn(da, db, |a, b| col[a * db + b]);
    let mut rho_a = w.matmul(&w.adjoint());
    let inv = F::one() / p;
    for r in 0..da {
        for c in 0..da {
            rho_a[(r, c)] = rho_a[(r, c)] * inv;
        }
    }
    let vals = hermitian_eigvals(&rho_a).expect("reduced state is Hermitian");
    let s: F = vals
        .iter()
        .map(|&l| {
            if l > F::zero() {
                -l * log2(l)
            } else {
                F::zero()
            }
        })
        .sum();
    p * s
}
