//! Entropies (base 2, reported in bits) and the three distance measures:
//! trace distance in the unhalved convention tr|rho - sigma| with range
//! [0, 2], fidelity tr sqrt(rho^{1/2} sigma rho^{1/2}), and the Bures
//! distance 2 sqrt(1 - F), normalized to agree with the trace distance on
//! pure states.


use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix};
use crate::scalar::{log2, real, to_f64, tol, Scalar};
use crate::states::{DensityMatrix, PureState};

/// Probability vector: nonnegative entries summing to one.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbVector<F> {
    probabilities: Vec<F>,
}

impl<F: Scalar> ProbVector<F> {
    pub fn new(probabilities: Vec<F>) -> Result<Self> {
        if probabilities.is_empty() {
            return Err(Error::InvalidDistribution("empty".into()));
        }
        let mut sum = F::zero();
        for &p in &probabilities {
            if p < -tol::trace::<F>() {
                return Err(Error::InvalidDistribution(format!(
                    "negative weight {}",
                    to_f64(p)
                )));
            }
            sum += p;
        }
        if (sum - F::one()).abs() > tol::trace() {
            return Err(Error::InvalidDistribution(format!(
                "sum = {}, expected 1",
                to_f64(sum)
            )));
        }
        Ok(Self { probabilities })
    }

    pub fn probabilities(&self) -> &[F] {
        &self.probabilities
    }

    pub fn len(&self) -> usize {
        self.probabilities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probabilities.is_empty()
    }
}

/// eta(x) = -x log2(x), with eta(0) = 0. Increasing on [0, 1/e].
pub fn eta<F: Scalar>(x: F) -> Result<F> {
    if x < F::zero() || x > F::one() {
        return Err(Error::OutOfDomain {
            value: to_f64(x),
            lo: 0.0,
            hi: 1.0,
        });
    }
    if x == F::zero() {
        return Ok(F::zero());
    }
    Ok(-x * log2(x))
}

/// Shannon entropy H(p) in bits; zero weights contribute zero.
pub fn shannon<F: Scalar>(p: &ProbVector<F>) -> F {
    p.probabilities()
        .iter()
        .map(|&x| if x > F::zero() { -x * log2(x) } else { F::zero() })
        .sum()
}

/// Binary entropy h(p).
pub fn binary_entropy<F: Scalar>(p: F) -> F {
    let q = F::one() - p;
    let term = |x: F| if x > F::zero() { -x * log2(x) } else { F::zero() };
    term(p) + term(q)
}

/// Von Neumann entropy S(rho) = -tr(rho log2 rho) in bits. Eigenvalues in
/// [-tol_psd, 0) are clamped to zero.
pub fn entropy<F: Scalar>(rho: &DensityMatrix<F>) -> F {
    rho.spectrum()
        .iter()
        .map(|&l| {
            let l = l.max(F::zero());
            if l > F::zero() {
                -l * log2(l)
            } else {
                F::zero()
            }
        })
        .sum()
}

fn require_same_dim<F: Scalar>(rho: &DensityMatrix<F>, sigma: &DensityMatrix<F>) -> Result<()> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            got: sigma.dim(),
        });
    }
    Ok(())
}

/// Trace distance T(rho, sigma) = tr|rho - sigma|, range [0, 2].
pub fn trace_distance<F: Scalar>(rho: &DensityMatrix<F>, sigma: &DensityMatrix<F>) -> Result<F> {
    require_same_dim(rho, sigma)?;
    linalg::trace_norm(&rho.mat().sub(sigma.mat()))
}

/// Fidelity F(rho, sigma) = tr sqrt(rho^{1/2} sigma rho^{1/2}), computed
/// spectrally: F = sum_i sqrt(max(mu_i, 0)) over the eigenvalues mu_i of
/// rho^{1/2} sigma rho^{1/2}.
pub fn fidelity<F: Scalar>(rho: &DensityMatrix<F>, sigma: &DensityMatrix<F>) -> Result<F> {
    require_same_dim(rho, sigma)?;
    let r = linalg::psd_sqrt(rho.mat())?;
    let m = r.matmul(sigma.mat()).matmul(&r);
    // Spectral noise can leave m slightly non-Hermitian; symmetrize.
    let m = m.add(&m.adjoint()).scale(real(0.5));
    let vals = linalg::hermitian_eigvals(&m)?;
    // The square root amplifies O(eps) eigenvalue noise on true zeros to
    // O(sqrt(eps)); cut below the spectral noise floor before taking it.
    let scale = vals.iter().fold(F::zero(), |a, &b| a.max(b.abs()));
    let cutoff = scale * F::epsilon() * real(4.0 * rho.dim() as f64);
    let f: F = vals
        .iter()
        .filter(|&&mu| mu > cutoff)
        .map(|&mu| mu.sqrt())
        .sum();
    Ok(f.min(F::one()))
}

/// Bures distance D(rho, sigma) = 2 sqrt(1 - F(rho, sigma)).
pub fn bures_distance<F: Scalar>(rho: &DensityMatrix<F>, sigma: &DensityMatrix<F>) -> Result<F> {
    let f = fidelity(rho, sigma)?;
    Ok(bures_from_fidelity(f))
}

/// D = 2 sqrt(1 - F), shared so that D^2 = 4 (1 - F) holds exactly.
pub fn bures_from_fidelity<F: Scalar>(f: F) -> F {
    let two = real::<F>(2.0);
    two * (F::one() - f.min(F::one())).max(F::zero()).sqrt()
}

/// A pair of purifications achieving Uhlmann's maximum: the overlap of the
/// two members equals the fidelity of the inputs.
#[derive(Clone, Debug)]
pub struct UhlmannPair<F> {
    pub pur_rho: PureState<F>,
    pub pur_sigma: PureState<F>,
    pub achieved_overlap: F,
}

/// Closed-form Uhlmann maximizer. Both states are spectrally purified into
/// `dim * ref_dim`; the reference side of sigma's purification is rotated by
/// the unitary from the polar decomposition of the reference-side overlap
/// operator.
pub fn uhlmann_purifications<F: Scalar>(
    rho: &DensityMatrix<F>,
    sigma: &DensityMatrix<F>,
    ref_dim: usize,
) -> Result<UhlmannPair<F>> {
    require_same_dim(rho, sigma)?;
    let d = rho.dim();
    if ref_dim < d {
        return Err(Error::RefTooSmall {
            ref_dim,
            rank: d,
        });
    }
    let pur_rho = crate::states::purify(rho, ref_dim)?;
    let pur_sigma_raw = crate::states::purify(sigma, ref_dim)?;

    // Amplitude matrices, system index slow: A[x, r].
    let a_rho = amplitude_matrix(&pur_rho, d, ref_dim);
    let a_sigma = amplitude_matrix(&pur_sigma_raw, d, ref_dim);

    // Reference-side overlap C = A_rho^H A_sigma; |tr(C W^T)| is maximized at
    // W^T = V U^H for the SVD C = U S V^H.
    let c = a_rho.adjoint().matmul(&a_sigma);
    let (u, _s, v) = linalg::svd_square(&c)?;
    let wt = v.matmul(&u.adjoint());
    let a_rotated = a_sigma.matmul(&wt);

    let mut amps = Vec::with_capacity(d * ref_dim);
    for x in 0..d {
        for r in 0..ref_dim {
            amps.push(a_rotated[(x, r)]);
        }
    }
    let pur_sigma = PureState::normalized(amps)?;
    let achieved_overlap = pur_rho.overlap(&pur_sigma).norm();
    Ok(UhlmannPair {
        pur_rho,
        pur_sigma,
        achieved_overlap,
    })
}

fn amplitude_matrix<F: Scalar>(psi: &PureState<F>, d: usize, ref_dim: usize) -> ComplexMatrix<F> {
    ComplexMatrix::from_fn(d, ref_dim, |x, r| psi.amplitudes()[x * ref_dim + r])
}

/// Unnormalized Bloch-style helper used in tests: builds a density matrix
/// from real diagonal entries.
pub fn diagonal_state<F: Scalar>(diag: &[F]) -> Result<DensityMatrix<F>> {
    DensityMatrix::new(ComplexMatrix::from_diagonal(diag))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{
        bell_state, partial_trace, sample_density, sample_haar_pure, sample_haar_unitary,
        BipartiteDims, BipartiteState, PureState, RngSeed, Subsystem,
    };

    use num_complex::Complex;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn entropy_examples() {
        let pure = PureState::<f64>::basis_state(3, 1).projector();
        assert!(entropy(&pure).abs() < 1e-12);

        let mixed = crate::states::DensityMatrix::<f64>::maximally_mixed(4);
        assert!((entropy(&mixed) - 2.0).abs() < 1e-12);

        let rho = diagonal_state::<f64>(&[0.6, 0.4]).unwrap();
        assert!((entropy(&rho) - 0.9709505944546686).abs() < 1e-12);
    }

    #[test]
    fn shannon_examples() {
        let h = |v: &[f64]| shannon(&ProbVector::new(v.to_vec()).unwrap());
        assert_eq!(h(&[1.0, 0.0]), 0.0);
        assert!((h(&[0.5, 0.5]) - 1.0).abs() < 1e-12);
        assert!((h(&[0.9, 0.1]) - 0.46899559358928133).abs() < 1e-12);
    }

    #[test]
    fn prob_vector_rejects_invalid() {
        assert!(ProbVector::new(vec![0.5f64, 0.4]).is_err());
        assert!(ProbVector::new(vec![1.2f64, -0.2]).is_err());
    }

    #[test]
    fn eta_examples() {
        assert_eq!(eta(0.0f64).unwrap(), 0.0);
        assert!((eta(0.5f64).unwrap() - 0.5).abs() < 1e-12);
        assert!((eta(0.2f64).unwrap() - 0.46438561897747244).abs() < 1e-12);
        assert!(eta(1.5f64).is_err());
    }

    #[test]
    fn trace_distance_examples() {
        let zero = PureState::<f64>::basis_state(2, 0).projector();
        let one = PureState::<f64>::basis_state(2, 1).projector();
        assert!(trace_distance(&zero, &zero).unwrap().abs() < 1e-12);
        assert!((trace_distance(&zero, &one).unwrap() - 2.0).abs() < 1e-12);

        let mixed = crate::states::DensityMatrix::<f64>::maximally_mixed(2);
        let rho = diagonal_state::<f64>(&[0.6, 0.4]).unwrap();
        assert!((trace_distance(&mixed, &rho).unwrap() - 0.2).abs() < 1e-12);

        let three = crate::states::DensityMatrix::<f64>::maximally_mixed(3);
        assert!(trace_distance(&zero, &three).is_err());
    }

    #[test]
    fn fidelity_examples() {
        let zero = PureState::<f64>::basis_state(2, 0).projector();
        let one = PureState::<f64>::basis_state(2, 1).projector();
        assert!((fidelity(&zero, &zero).unwrap() - 1.0).abs() < 1e-9);
        assert!(fidelity(&zero, &one).unwrap() < 1e-9);

        let mixed = crate::states::DensityMatrix::<f64>::maximally_mixed(2);
        let rho = diagonal_state::<f64>(&[0.6, 0.4]).unwrap();
        let expect = 0.3f64.sqrt() + 0.2f64.sqrt();
        assert!((fidelity(&mixed, &rho).unwrap() - expect).abs() < 1e-10);
    }

    #[test]
    fn bures_examples() {
        let zero = PureState::<f64>::basis_state(2, 0).projector();
        let one = PureState::<f64>::basis_state(2, 1).projector();
        assert!(bures_distance(&zero, &zero).unwrap().abs() < 1e-9);
        assert!((bures_distance(&zero, &one).unwrap() - 2.0).abs() < 1e-9);

        let mixed = crate::states::DensityMatrix::<f64>::maximally_mixed(2);
        let rho = diagonal_state::<f64>(&[0.6, 0.4]).unwrap();
        let f = 0.3f64.sqrt() + 0.2f64.sqrt();
        let expect = 2.0 * (1.0 - f).sqrt();
        assert!((bures_distance(&mixed, &rho).unwrap() - expect).abs() < 1e-10);
    }

    #[test]
    fn fidelity_symmetry_and_pure_overlap() {
        for trial in 0..10u64 {
            let seed = RngSeed::with_stream(31, trial);
            let rho = sample_density::<f64>(3, 3, &seed.substream(0));
            let sigma = sample_density::<f64>(3, 3, &seed.substream(1));
            let f1 = fidelity(&rho, &sigma).unwrap();
            let f2 = fidelity(&sigma, &rho).unwrap();
            assert!((f1 - f2).abs() < 1e-9);

            let psi = sample_haar_pure::<f64>(4, &seed.substream(2));
            let phi = sample_haar_pure::<f64>(4, &seed.substream(3));
            let f = fidelity(&psi.projector(), &phi.projector()).unwrap();
            assert!((f - psi.overlap(&phi).norm()).abs() < 1e-9);
        }
    }

    #[test]
    fn fuchs_van_de_graaf_for_pure_states() {
        // Cross-check oracle: T = 2 sqrt(1 - F^2) for pure states.
        for trial in 0..10u64 {
            let seed = RngSeed::with_stream(33, trial);
            let psi = sample_haar_pure::<f64>(5, &seed.substream(0));
            let phi = sample_haar_pure::<f64>(5, &seed.substream(1));
            let t = trace_distance(&psi.projector(), &phi.projector()).unwrap();
            let f = psi.overlap(&phi).norm();
            assert!((t - 2.0 * (1.0 - f * f).sqrt()).abs() < 1e-8);
        }
    }

    #[test]
    fn bures_squared_identity() {
        for trial in 0..5u64 {
            let seed = RngSeed::with_stream(35, trial);
            let rho = sample_density::<f64>(3, 3, &seed.substream(0));
            let sigma = sample_density::<f64>(3, 3, &seed.substream(1));
            let f = fidelity(&rho, &sigma).unwrap();
            let d = bures_distance(&rho, &sigma).unwrap();
            assert!((d * d - 4.0 * (1.0 - f)).abs() < 1e-12);
        }
    }

    #[test]
    fn trace_distance_contracts_under_partial_trace() {
        for trial in 0..20u64 {
            let seed = RngSeed::with_stream(37, trial);
            let dims = BipartiteDims { da: 3, db: 2 };
            let rho = BipartiteState::new(dims, sample_density::<f64>(6, 6, &seed.substream(0)))
                .unwrap();
            let sigma = BipartiteState::new(dims, sample_density::<f64>(6, 6, &seed.substream(1)))
                .unwrap();
            let t_full = trace_distance(&rho.rho, &sigma.rho).unwrap();
            for keep in [Subsystem::A, Subsystem::B] {
                let t_red = trace_distance(
                    &partial_trace(&rho, keep),
                    &partial_trace(&sigma, keep),
                )
                .unwrap();
                assert!(t_red <= t_full + 1e-9, "keep = {keep:?}");
            }
        }
    }

    #[test]
    fn entropy_unitary_invariance() {
        for dim in [2usize, 5, 16] {
            let seed = RngSeed::with_stream(39, dim as u64);
            let rho = sample_density::<f64>(dim, dim, &seed.substream(0));
            let u = sample_haar_unitary::<f64>(dim, &seed.substream(1));
            let rotated = crate::states::DensityMatrix::new(
                u.matmul(rho.mat()).matmul(&u.adjoint()),
            )
            .unwrap();
            assert!((entropy(&rho) - entropy(&rotated)).abs() < 1e-9, "dim = {dim}");
        }
    }

    #[test]
    fn uhlmann_identical_states() {
        let seed = RngSeed::new(41);
        let rho = sample_density::<f64>(3, 3, &seed);
        let pair = uhlmann_purifications(&rho, &rho, 3).unwrap();
        assert!((pair.achieved_overlap - 1.0).abs() < 1e-9);
    }

    #[test]
    fn uhlmann_orthogonal_pure_states() {
        let zero = PureState::<f64>::basis_state(2, 0).projector();
        let one = PureState::<f64>::basis_state(2, 1).projector();
        let pair = uhlmann_purifications(&zero, &one, 2).unwrap();
        assert!(pair.achieved_overlap < 1e-9);
    }

    #[test]
    fn uhlmann_matches_spectral_fidelity() {
        for trial in 0..10u64 {
            let seed = RngSeed::with_stream(43, trial);
            let rho = sample_density::<f64>(3, 3, &seed.substream(0));
            let sigma = sample_density::<f64>(3, 3, &seed.substream(1));
            let f = fidelity(&rho, &sigma).unwrap();
            let pair = uhlmann_purifications(&rho, &sigma, 4).unwrap();
            assert!((pair.achieved_overlap - f).abs() < 1e-7, "trial = {trial}");

            // Both members trace down to their inputs.
            let dims = BipartiteDims { da: 3, db: 4 };
            let back_rho = partial_trace(
                &BipartiteState::new(dims, pair.pur_rho.projector()).unwrap(),
                Subsystem::A,
            );
            assert!(back_rho.mat().sub(rho.mat()).max_abs_entry() < 1e-8);
            let back_sigma = partial_trace(
                &BipartiteState::new(dims, pair.pur_sigma.projector()).unwrap(),
                Subsystem::A,
            );
            assert!(back_sigma.mat().sub(sigma.mat()).max_abs_entry() < 1e-8);
        }
    }

    #[test]
    fn uhlmann_rejects_small_reference() {
        let rho = crate::states::DensityMatrix::<f64>::maximally_mixed(3);
        assert!(matches!(
            uhlmann_purifications(&rho, &rho, 2),
            Err(Error::RefTooSmall { .. })
        ));
    }

    #[test]
    fn bell_entropy_is_one_bit() {
        let bell = BipartiteState::new(
            BipartiteDims { da: 2, db: 2 },
            bell_state::<f64>().projector(),
        )
        .unwrap();
        let red = partial_trace(&bell, Subsystem::A);
        assert!((entropy(&red) - 1.0).abs() < 1e-12);
        let _ = c(0.0, 0.0);
    }
}
