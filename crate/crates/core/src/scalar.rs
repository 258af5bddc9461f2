use num_traits::{Float, FloatConst, FromPrimitive};
use rand::Rng;
use rand_distr::StandardNormal;

/// Floating-point scalar the signal-processing core is generic over.
///
/// `f32` and `f64` are the two implementations; `rustfft::FftNum` pulls in
/// everything the FFT engine needs.
pub trait Scalar: Float + FloatConst + FromPrimitive + rustfft::FftNum {
    /// Draws one standard-normal sample from `rng`.
    fn std_normal<R: Rng + ?Sized>(rng: &mut R) -> Self;

    /// Lossy cast from `f64`, for constants and configuration values.
    fn cast(x: f64) -> Self {
        <Self as FromPrimitive>::from_f64(x).expect("finite f64 converts to any Scalar")
    }

    fn to_f64(self) -> f64;
}

impl Scalar for f32 {
    fn std_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
        rng.sample(StandardNormal)
    }

    fn to_f64(self) -> f64 {
        self as f64
    }
}

impl Scalar for f64 {
    fn std_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
        rng.sample(StandardNormal)
    }

    fn to_f64(self) -> f64 {
        self
    }
}
