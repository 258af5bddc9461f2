//! Alamouti two-branch transmit diversity with up to two receive antennas:
//! block encoding, channel application, linear combining, and
//! maximum-likelihood detection.

use num_complex::Complex;
use rand::Rng;

use crate::channel::{add_awgn, ChannelRealization, NoiseSpec};
use crate::modem::Constellation;
use crate::{Error, Result, Scalar};

/// One space-time block: rows are the two time slots, columns the two
/// transmit antennas, `[[s0, s1], [-s1*, s0*]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StbcBlock<S> {
    pub tx: [[Complex<S>; 2]; 2],
}

/// The four received samples: `r0`, `r1` at receive antenna 0 (times t and
/// t+T), `r2`, `r3` at receive antenna 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StbcReceived<S> {
    pub r: [Complex<S>; 4],
}

/// Output of the linear combiner, plus the combining gain
/// `a0^2 + a1^2 + a2^2 + a3^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CombinedPair<S> {
    pub s0: Complex<S>,
    pub s1: Complex<S>,
    pub gain: S,
}

/// Builds the two-slot transmission block for a symbol pair.
pub fn encode<S: Scalar>(s0: Complex<S>, s1: Complex<S>) -> StbcBlock<S> {
    StbcBlock {
        tx: [[s0, s1], [-s1.conj(), s0.conj()]],
    }
}

/// Applies the quasi-static 2x2 channel and per-sample noise:
///
/// ```text
/// r0 = h0 s0 + h1 s1 + n0      r2 = h2 s0 + h3 s1 + n2
/// r1 = -h0 s1* + h1 s0* + n1   r3 = -h2 s1* + h3 s0* + n3
/// ```
pub fn transmit<S: Scalar, R: Rng + ?Sized>(
    block: &StbcBlock<S>,
    ch: &ChannelRealization<S>,
    noise: &NoiseSpec<S>,
    rng: &mut R,
) -> Result<StbcReceived<S>> {
    if ch.n_tx() != 2 || ch.n_rx() != 2 {
        return Err(Error::Parameter(format!(
            "STBC transmission needs a 2x2 channel, got {}x{}",
            ch.n_tx(),
            ch.n_rx()
        )));
    }
    let mut r = [Complex::new(S::zero(), S::zero()); 4];
    for rx in 0..2 {
        for slot in 0..2 {
            let mut acc = Complex::new(S::zero(), S::zero());
            for tx in 0..2 {
                acc = acc + ch.gain(tx, rx) * block.tx[slot][tx];
            }
            r[rx * 2 + slot] = acc;
        }
    }
    add_awgn(&mut r, noise, rng);
    Ok(StbcReceived { r })
}

/// The linear combiner:
///
/// ```text
/// s0~ = h0* r0 + h1 r1* + h2* r2 + h3 r3*
/// s1~ = h1* r0 - h0 r1* + h3* r2 - h2 r3*
/// ```
pub fn combine<S: Scalar>(
    rx: &StbcReceived<S>,
    ch: &ChannelRealization<S>,
) -> CombinedPair<S> {
    let [r0, r1, r2, r3] = rx.r;
    let (h0, h1, h2, h3) = (ch.h(0), ch.h(1), ch.h(2), ch.h(3));
    let s0 = h0.conj() * r0 + h1 * r1.conj() + h2.conj() * r2 + h3 * r3.conj();
    let s1 = h1.conj() * r0 - h0 * r1.conj() + h3.conj() * r2 - h2 * r3.conj();
    CombinedPair {
        s0,
        s1,
        gain: ch.gain_sum(),
    }
}

/// Maximum-likelihood decision on one combined signal: argmin over the
/// constellation of `(gain - 1)|p|^2 + |s~ - p|^2`, ties to the lowest
/// label. Equivalent to nearest-point detection on `s~/gain` when every
/// point has equal energy.
pub fn ml_detect_one<S: Scalar>(
    combined: Complex<S>,
    gain: S,
    c: &Constellation<S>,
) -> usize {
    let mut best = 0;
    let mut best_metric = S::infinity();
    for (i, p) in c.points().iter().enumerate() {
        let metric = (gain - S::one()) * p.norm_sqr() + (combined - p).norm_sqr();
        if metric < best_metric {
            best_metric = metric;
            best = i;
        }
    }
    best
}

/// ML detection of both combined signals. A non-positive gain means the
/// channel collapsed; the caller erases the block.
pub fn ml_detect<S: Scalar>(
    pair: &CombinedPair<S>,
    c: &Constellation<S>,
) -> Result<(usize, usize)> {
    if pair.gain <= S::zero() {
        return Err(Error::DegenerateChannel(
            "combining gain is not positive".into(),
        ));
    }
    Ok((
        ml_detect_one(pair.s0, pair.gain, c),
        ml_detect_one(pair.s1, pair.gain, c),
    ))
}
