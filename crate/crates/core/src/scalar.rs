//! Field scalars for the Markov-chain linear algebra.
//!
//! Transition matrices, stationary vectors and absorption probabilities are
//! generic over [`Scalar`]. The exact analysis runs on [`crate::Rational`];
//! Monte Carlo estimates use `f64`.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, Signed, ToPrimitive, Zero};

pub trait Scalar: Num + Signed + Clone + Debug + PartialOrd + Send + Sync {
    fn from_rational(r: &BigRational) -> Self;

    fn from_ratio(num: u64, den: u64) -> Self {
        Self::from_rational(&BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    fn to_f64(&self) -> f64;

    /// Pivot magnitudes at or below this are treated as zero.
    fn is_negligible(&self) -> bool;
}

impl Scalar for BigRational {
    fn from_rational(r: &BigRational) -> Self {
        r.clone()
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn is_negligible(&self) -> bool {
        self.is_zero()
    }
}

macro_rules! impl_float_scalar {
    ($f:ty, $eps:expr) => {
        impl Scalar for $f {
            fn from_rational(r: &BigRational) -> Self {
                let n = r.numer().to_f64().unwrap_or(f64::NAN);
                let d = r.denom().to_f64().unwrap_or(f64::NAN);
                <$f>::from_f64(n / d).unwrap_or(<$f>::NAN)
            }

            fn to_f64(&self) -> f64 {
                *self as f64
            }

            fn is_negligible(&self) -> bool {
                self.abs() <= $eps
            }
        }
    };
}

impl_float_scalar!(f32, 1e-6);
impl_float_scalar!(f64, 1e-12);

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratio_roundtrip() {
        let third = <BigRational as Scalar>::from_ratio(1, 3);
        assert_eq!(third, BigRational::new(1.into(), 3.into()));
        assert!((<f64 as Scalar>::from_ratio(1, 3) - 1.0 / 3.0).abs() < 1e-15);
        assert!((Scalar::to_f64(&third) - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn negligible() {
        assert!(BigRational::zero().is_negligible());
        assert!(!<BigRational as Scalar>::from_ratio(1, 1 << 40).is_negligible());
        assert!(1e-14_f64.is_negligible());
        assert!(!1e-3_f32.is_negligible());
    }
}
