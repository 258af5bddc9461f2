//! OFDM symbol mapping: inverse FFT onto orthogonal subcarriers plus a
//! cyclic-prefix guard interval (1/8 of the symbol by default).

use std::sync::Arc;

use num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::{Error, Result, Scalar};

/// OFDM framing parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OfdmConfig {
    fft_size: usize,
    cp_num: u32,
    cp_den: u32,
}

impl OfdmConfig {
    /// `cp_num/cp_den` is the guard fraction; `fft_size * cp_num / cp_den`
    /// must be a positive integer.
    pub fn new(fft_size: usize, cp_num: u32, cp_den: u32) -> Result<Self> {
        if fft_size < 2 || !fft_size.is_power_of_two() {
            return Err(Error::Config(format!(
                "fft_size {fft_size} must be a power of two >= 2"
            )));
        }
        if cp_den == 0 {
            return Err(Error::Config("cp fraction denominator is zero".into()));
        }
        if (fft_size as u64 * cp_num as u64) % cp_den as u64 != 0
            || fft_size as u64 * cp_num as u64 / cp_den as u64 == 0
        {
            return Err(Error::Config(format!(
                "guard length {fft_size}*{cp_num}/{cp_den} is not a positive integer"
            )));
        }
        Ok(Self {
            fft_size,
            cp_num,
            cp_den,
        })
    }

    /// 256 subcarriers with a 1/8 guard interval.
    pub fn default_256() -> Self {
        Self::new(256, 1, 8).expect("valid default")
    }

    pub fn fft_size(&self) -> usize {
        self.fft_size
    }

    pub fn cp_len(&self) -> usize {
        self.fft_size * self.cp_num as usize / self.cp_den as usize
    }

    /// Time-domain samples per OFDM symbol, prefix included.
    pub fn block_len(&self) -> usize {
        self.fft_size + self.cp_len()
    }
}

/// One time-domain OFDM symbol (cyclic prefix included).
#[derive(Debug, Clone)]
pub struct TimeDomainBlock<S> {
    pub samples: Vec<Complex<S>>,
    pub config: OfdmConfig,
}

/// FFT engine bound to one [`OfdmConfig`]. Immutable and shareable across
/// threads.
pub struct Ofdm<S: Scalar> {
    cfg: OfdmConfig,
    fwd: Arc<dyn Fft<S>>,
    inv: Arc<dyn Fft<S>>,
}

impl<S: Scalar> Ofdm<S> {
    pub fn new(cfg: OfdmConfig) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            cfg,
            fwd: planner.plan_fft_forward(cfg.fft_size),
            inv: planner.plan_fft_inverse(cfg.fft_size),
        }
    }

    pub fn config(&self) -> OfdmConfig {
        self.cfg
    }

    /// Inverse FFT (1/N normalized) of one subcarrier block, with the last
    /// `cp_len` time samples copied in front as the cyclic prefix.
    pub fn modulate(&self, symbols: &[Complex<S>]) -> Result<TimeDomainBlock<S>> {
        let n = self.cfg.fft_size;
        if symbols.len() != n {
            return Err(Error::InputShape(format!(
                "expected {n} subcarrier symbols, got {}",
                symbols.len()
            )));
        }
        let mut time = symbols.to_vec();
        self.inv.process(&mut time);
        let norm = S::cast(1.0 / n as f64);
        for s in &mut time {
            *s = s.scale(norm);
        }
        let cp = self.cfg.cp_len();
        let mut samples = Vec::with_capacity(n + cp);
        samples.extend_from_slice(&time[n - cp..]);
        samples.extend_from_slice(&time);
        Ok(TimeDomainBlock {
            samples,
            config: self.cfg,
        })
    }

    /// Drops the guard interval and applies the forward FFT; exact inverse of
    /// [`Ofdm::modulate`].
    pub fn demodulate(&self, block: &TimeDomainBlock<S>) -> Result<Vec<Complex<S>>> {
        self.demodulate_samples(&block.samples)
    }

    /// Same as [`Ofdm::demodulate`] but on a raw sample slice.
    pub fn demodulate_samples(&self, samples: &[Complex<S>]) -> Result<Vec<Complex<S>>> {
        let n = self.cfg.fft_size;
        let cp = self.cfg.cp_len();
        if samples.len() != n + cp {
            return Err(Error::InputShape(format!(
                "expected {} time samples, got {}",
                n + cp,
                samples.len()
            )));
        }
        let mut freq = samples[cp..].to_vec();
        self.fwd.process(&mut freq);
        Ok(freq)
    }
}
