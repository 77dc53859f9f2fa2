//! Scalar abstraction: every numerical routine in the crate is generic over a
//! real floating type implementing [`Scalar`]. Concrete aliases for `f64` live
//! at the crate root.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

pub trait Scalar:
    Float
    + FloatConst
    + NumAssign
    + FromPrimitive
    + ToPrimitive
    + Sum<Self>
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
}

impl<T> Scalar for T where
    T: Float
        + FloatConst
        + NumAssign
        + FromPrimitive
        + ToPrimitive
        + Sum<T>
        + Debug
        + Display
        + Send
        + Sync
        + 'static
{
}

/// Lossless-enough conversion from a literal tolerance or coefficient.
#[inline]
pub fn real<F: Scalar>(x: f64) -> F {
    F::from_f64(x).expect("f64 literal must convert into the scalar type")
}

#[inline]
pub fn to_f64<F: Scalar>(x: F) -> f64 {
    x.to_f64().expect("scalar must convert to f64")
}

/// Base-2 logarithm.
#[inline]
pub fn log2<F: Scalar>(x: F) -> F {
    x.ln() / F::LN_2()
}

/// Tolerances from the crate-wide numerical contract. The spec values assume
/// f64; for narrower types they widen proportionally to the machine epsilon.
pub mod tol {
    use super::{real, Scalar};

    fn widened<F: Scalar>(spec: f64, eps_factor: f64) -> F {
        let floor = F::epsilon() * real(eps_factor);
        real::<F>(spec).max(floor)
    }

    /// Hermiticity check, max-abs-entry.
    pub fn herm<F: Scalar>() -> F {
        widened(1e-9, 200.0)
    }

    /// Slack allowed below zero in a PSD spectrum.
    pub fn psd<F: Scalar>() -> F {
        widened(1e-9, 200.0)
    }

    /// Reconstruction error, max-abs-entry.
    pub fn recon<F: Scalar>() -> F {
        widened(1e-8, 2000.0)
    }

    /// Unit-trace / unit-norm check.
    pub fn trace<F: Scalar>() -> F {
        widened(1e-9, 200.0)
    }

    /// Ensemble weights below this are dropped.
    pub fn prune<F: Scalar>() -> F {
        widened(1e-12, 10.0)
    }

    /// Slack tolerance for bound reports.
    pub fn check<F: Scalar>() -> F {
        widened(1e-9, 200.0)
    }
}
