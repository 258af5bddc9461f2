//! Noise and fading generation with exact Eb/N0 calibration.
//!
//! All constellations have unit average symbol energy, so with information
//! rate `code_rate * bits_per_symbol` bits per symbol the total complex noise
//! variance at a given Eb/N0 is
//! `N0 = 1 / (code_rate * bits_per_symbol * 10^(ebno_db/10))`.

use num_complex::Complex;
use rand::Rng;

use crate::{Error, Result, Scalar};

/// Additive complex Gaussian noise level.
#[derive(Debug, Clone, Copy)]
pub struct NoiseSpec<S> {
    /// Total variance per complex sample (per real dimension: variance/2).
    pub variance: S,
}

impl<S: Scalar> NoiseSpec<S> {
    pub fn new(variance: S) -> Result<Self> {
        if variance < S::zero() || variance.is_nan() {
            return Err(Error::Parameter("noise variance must be >= 0".into()));
        }
        Ok(Self { variance })
    }

    pub fn noiseless() -> Self {
        Self { variance: S::zero() }
    }
}

/// Total complex noise variance N0 for unit-energy symbols at `ebno_db`.
pub fn ebno_to_noise_variance<S: Scalar>(
    ebno_db: S,
    bits_per_symbol: usize,
    code_rate: S,
) -> Result<S> {
    if bits_per_symbol < 1 {
        return Err(Error::Parameter("bits_per_symbol must be >= 1".into()));
    }
    if code_rate <= S::zero() || code_rate > S::one() {
        return Err(Error::Parameter(format!(
            "code_rate must be in (0, 1], got {}",
            code_rate.to_f64()
        )));
    }
    let ebno_lin = S::cast(10.0).powf(ebno_db / S::cast(10.0));
    Ok((code_rate * S::cast(bits_per_symbol as f64) * ebno_lin).recip())
}

/// Adds i.i.d. circular complex Gaussian noise of total variance
/// `noise.variance` per sample. Deterministic given the RNG state.
pub fn awgn<S: Scalar, R: Rng + ?Sized>(
    samples: &[Complex<S>],
    noise: &NoiseSpec<S>,
    rng: &mut R,
) -> Vec<Complex<S>> {
    let mut out = samples.to_vec();
    add_awgn(&mut out, noise, rng);
    out
}

/// In-place variant of [`awgn`].
pub fn add_awgn<S: Scalar, R: Rng + ?Sized>(
    samples: &mut [Complex<S>],
    noise: &NoiseSpec<S>,
    rng: &mut R,
) {
    if noise.variance == S::zero() {
        return;
    }
    let sigma = (noise.variance / S::cast(2.0)).sqrt();
    for s in samples {
        *s = *s
            + Complex::new(
                sigma * S::std_normal(rng),
                sigma * S::std_normal(rng),
            );
    }
}

/// Quasi-static complex gains of one link, constant across an STBC block.
///
/// For the 2x2 case the flattening follows the channel-definition table of
/// the Alamouti scheme: `h0` = tx0->rx0, `h1` = tx1->rx0, `h2` = tx0->rx1,
/// `h3` = tx1->rx1.
#[derive(Debug, Clone)]
pub struct ChannelRealization<S> {
    gains: Vec<Complex<S>>,
    n_tx: usize,
    n_rx: usize,
}

impl<S: Scalar> ChannelRealization<S> {
    pub fn new(gains: Vec<Complex<S>>, n_tx: usize, n_rx: usize) -> Result<Self> {
        check_dims(n_tx, n_rx)?;
        if gains.len() != n_tx * n_rx {
            return Err(Error::Parameter(format!(
                "expected {} gains for a {}x{} link, got {}",
                n_tx * n_rx,
                n_tx,
                n_rx,
                gains.len()
            )));
        }
        Ok(Self { gains, n_tx, n_rx })
    }

    /// Non-fading link: every gain is exactly 1.
    pub fn unit(n_tx: usize, n_rx: usize) -> Result<Self> {
        check_dims(n_tx, n_rx)?;
        Ok(Self {
            gains: vec![Complex::new(S::one(), S::zero()); n_tx * n_rx],
            n_tx,
            n_rx,
        })
    }

    pub fn n_tx(&self) -> usize {
        self.n_tx
    }

    pub fn n_rx(&self) -> usize {
        self.n_rx
    }

    /// Gain from `tx` to `rx`.
    pub fn gain(&self, tx: usize, rx: usize) -> Complex<S> {
        self.gains[rx * self.n_tx + tx]
    }

    /// `h_i` in the flattened 2x2 indexing (h0..h3).
    pub fn h(&self, i: usize) -> Complex<S> {
        self.gains[i]
    }

    /// Sum of squared amplitudes over all paths.
    pub fn gain_sum(&self) -> S {
        self.gains
            .iter()
            .fold(S::zero(), |acc, h| acc + h.norm_sqr())
    }
}

fn check_dims(n_tx: usize, n_rx: usize) -> Result<()> {
    if !(1..=2).contains(&n_tx) || !(1..=2).contains(&n_rx) {
        return Err(Error::Parameter(format!(
            "unsupported antenna configuration {n_tx}x{n_rx}"
        )));
    }
    Ok(())
}

/// Draws one quasi-static unit-power Rayleigh realization: each gain is
/// i.i.d. circular complex Gaussian with `E[|h|^2] = 1`.
pub fn rayleigh_block<S: Scalar, R: Rng + ?Sized>(
    n_tx: usize,
    n_rx: usize,
    rng: &mut R,
) -> Result<ChannelRealization<S>> {
    check_dims(n_tx, n_rx)?;
    let sigma = S::cast(0.5).sqrt();
    let gains = (0..n_tx * n_rx)
        .map(|_| {
            Complex::new(
                sigma * S::std_normal(rng),
                sigma * S::std_normal(rng),
            )
        })
        .collect();
    ChannelRealization::new(gains, n_tx, n_rx)
}
