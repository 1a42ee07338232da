//! Scalar abstraction shared by the lattice and statistics code.
//!
//! Lattice routines are written once over [`Scalar`] and instantiated with
//! `f32`, `f64` (treated as exact dyadic values where certification matters)
//! and [`Rational`] for exact work.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Float, FromPrimitive, Num, Signed, ToPrimitive};

pub type Rational = BigRational;

pub trait Scalar: Clone + Debug + PartialOrd + Num + Signed + Send + Sync + 'static {
    /// `true` when arithmetic in this type is exact.
    const EXACT: bool;

    fn from_f64(x: f64) -> Self;
    fn to_f64(&self) -> f64;
    fn from_bigint(n: &BigInt) -> Self;
    /// Nearest integer (ties away from zero).
    fn round_int(&self) -> BigInt;
    /// Exact rational value of this scalar.
    fn to_rational(&self) -> Rational;
}

macro_rules! impl_float_scalar {
    ($t:ty) => {
        impl Scalar for $t {
            const EXACT: bool = false;

            fn from_f64(x: f64) -> Self {
                x as $t
            }

            fn to_f64(&self) -> f64 {
                *self as f64
            }

            fn from_bigint(n: &BigInt) -> Self {
                n.to_f64().unwrap_or(f64::NAN) as $t
            }

            fn round_int(&self) -> BigInt {
                BigInt::from_f64(self.round() as f64).expect("finite value")
            }

            fn to_rational(&self) -> Rational {
                Rational::from_float(*self as f64).expect("finite value")
            }
        }
    };
}

impl_float_scalar!(f32);
impl_float_scalar!(f64);

impl Scalar for Rational {
    const EXACT: bool = true;

    fn from_f64(x: f64) -> Self {
        Rational::from_float(x).expect("finite value")
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn from_bigint(n: &BigInt) -> Self {
        Rational::from_integer(n.clone())
    }

    fn round_int(&self) -> BigInt {
        self.round().to_integer()
    }

    fn to_rational(&self) -> Rational {
        self.clone()
    }
}

/// Floating scalars that support roots and transcendental functions.
pub trait RealScalar: Scalar + Float {}

impl RealScalar for f32 {}
impl RealScalar for f64 {}

pub fn rational(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}
