//! Scalar abstractions shared by the generic modules.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Float, FloatConst, FromPrimitive, Num, Signed, ToPrimitive};

/// Ordered field elements with integer rounding: enough for exact group
/// arithmetic and lattice reduction.
pub trait Scalar: Clone + Debug + PartialOrd + Num + Signed + Send + Sync {
    fn from_i64(v: i64) -> Self;
    fn integer_floor(&self) -> Self;
    fn integer_ceil(&self) -> Self;
    fn to_f64_lossy(&self) -> f64;

    fn half() -> Self {
        Self::one() / Self::from_i64(2)
    }
}

macro_rules! float_scalar {
    ($t:ty) => {
        impl Scalar for $t {
            fn from_i64(v: i64) -> Self {
                v as $t
            }
            fn integer_floor(&self) -> Self {
                <$t>::floor(*self)
            }
            fn integer_ceil(&self) -> Self {
                <$t>::ceil(*self)
            }
            fn to_f64_lossy(&self) -> f64 {
                *self as f64
            }
        }
    };
}

float_scalar!(f32);
float_scalar!(f64);

impl Scalar for BigRational {
    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
    fn integer_floor(&self) -> Self {
        self.floor()
    }
    fn integer_ceil(&self) -> Self {
        self.ceil()
    }
    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

/// Floating-point scalars used for Fourier evaluation and metrics.
pub trait FloatScalar: Scalar + Float + FloatConst + FromPrimitive + Copy + 'static {
    fn of(v: f64) -> Self {
        <Self as FromPrimitive>::from_f64(v).expect("finite conversion")
    }
}

impl FloatScalar for f32 {}
impl FloatScalar for f64 {}
