//! Scalar abstraction over the floating-point element type.
//!
//! All numerical kernels in this crate are generic over [`Real`], which is
//! implemented for `f32` and `f64`. Concrete type aliases for the common
//! instantiations live at the crate root.

use rand::Rng;
use rand_distr::StandardNormal;

/// Floating-point scalar usable throughout the crate.
///
/// Extends `num_traits::Float` with conversion from `f64` literals, string
/// parsing, and seeded sampling of the two noise laws the generators use.
pub trait Real:
    num_traits::Float
    + num_traits::FromPrimitive
    + num_traits::ToPrimitive
    + num_traits::NumAssignOps
    + ndarray::ScalarOperand
    + std::iter::Sum
    + std::fmt::Display
    + std::fmt::Debug
    + Send
    + Sync
    + 'static
{
    /// Convert an `f64` constant into this type.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("f64 constant not representable")
    }

    /// Lossless-enough widening for accumulation and reporting.
    fn to_f64_(self) -> f64 {
        self.to_f64().expect("scalar not representable as f64")
    }

    fn parse_str(s: &str) -> Option<Self>;

    /// One draw from N(0, 1).
    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self;

    /// One draw from Uniform[0, 1).
    fn uniform_01<R: Rng + ?Sized>(rng: &mut R) -> Self;

    /// One draw from Uniform(-a, a).
    fn uniform_symmetric<R: Rng + ?Sized>(rng: &mut R, a: Self) -> Self;
}

impl Real for f64 {
    fn parse_str(s: &str) -> Option<Self> {
        s.trim().parse().ok()
    }

    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
        rng.sample(StandardNormal)
    }

    fn uniform_01<R: Rng + ?Sized>(rng: &mut R) -> Self {
        rng.gen()
    }

    fn uniform_symmetric<R: Rng + ?Sized>(rng: &mut R, a: Self) -> Self {
        rng.gen_range(-a..a)
    }
}

impl Real for f32 {
    fn parse_str(s: &str) -> Option<Self> {
        s.trim().parse().ok()
    }

    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
        rng.sample(StandardNormal)
    }

    fn uniform_01<R: Rng + ?Sized>(rng: &mut R) -> Self {
        rng.gen()
    }

    fn uniform_symmetric<R: Rng + ?Sized>(rng: &mut R, a: Self) -> Self {
        rng.gen_range(-a..a)
    }
}
