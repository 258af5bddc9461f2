//! End-to-end packet transmission for the three chains.
//!
//! Framing: the (coded) bit stream is zero-padded up to a whole number of
//! OFDM symbols (an even number for the STBC chain, which consumes symbol
//! blocks in pairs). Padding is excluded from BER accounting.

use num_complex::Complex;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::channel::{
    add_awgn, ebno_to_noise_variance, rayleigh_block, ChannelRealization, NoiseSpec,
};
use crate::modem::Scheme;
use crate::stbc;
use crate::turbo::{self, Codeword};
use crate::{Cplx, Result};

use super::{ChannelKind, PacketOutcome, Simulator};

/// Demapper variance floor so a zero-noise run produces huge finite LLRs
/// instead of infinities.
const MIN_SOFT_VARIANCE: f64 = 1e-12;

fn random_bits(rng: &mut ChaCha8Rng, n: usize) -> Vec<u8> {
    (0..n).map(|_| rng.random_range(0..2u8)).collect()
}

/// Pads `bits` with zeros to fill a whole number of OFDM symbol blocks
/// (rounded up to a multiple of `block_multiple` blocks).
fn frame_bits(
    bits: &[u8],
    bits_per_symbol: usize,
    fft_size: usize,
    block_multiple: usize,
) -> Vec<u8> {
    let symbols = bits.len().div_ceil(bits_per_symbol);
    let blocks = symbols
        .div_ceil(fft_size)
        .div_ceil(block_multiple)
        .max(1)
        * block_multiple;
    let total_bits = blocks * fft_size * bits_per_symbol;
    let mut framed = bits.to_vec();
    framed.resize(total_bits, 0);
    framed
}

fn count_errors(sent: &[u8], received: &[u8]) -> u64 {
    sent.iter()
        .zip(received)
        .filter(|(a, b)| a != b)
        .count() as u64
}

fn draw_siso_channel(
    kind: ChannelKind,
    rng: &mut ChaCha8Rng,
) -> Result<ChannelRealization<f64>> {
    match kind {
        ChannelKind::Awgn => ChannelRealization::unit(1, 1),
        ChannelKind::Rayleigh => rayleigh_block(1, 1, rng),
    }
}

/// Single-antenna transmission of one OFDM symbol: flat gain, AWGN, guard
/// removal, FFT. Returns the frequency-domain observation together with the
/// flat channel gain.
fn siso_transmit_block(
    sim: &Simulator,
    freq_in: &[Cplx],
    noise: &NoiseSpec<f64>,
    kind: ChannelKind,
    rng: &mut ChaCha8Rng,
) -> Result<(Vec<Cplx>, Complex<f64>)> {
    let time = sim.ofdm().modulate(freq_in)?;
    let h = draw_siso_channel(kind, rng)?.h(0);
    let mut received: Vec<Cplx> = time.samples.iter().map(|s| h * s).collect();
    add_awgn(&mut received, noise, rng);
    let freq_out = sim.ofdm().demodulate_samples(&received)?;
    Ok((freq_out, h))
}

/// Adaptive-modulation OFDM chain: modulate, IFFT + guard, flat channel,
/// guard removal + FFT, zero-forcing equalization, hard demapping.
pub(super) fn run_baseline(
    sim: &Simulator,
    scheme: Scheme,
    ebno_db: f64,
    rng: &mut ChaCha8Rng,
) -> Result<PacketOutcome> {
    let cfg = sim.config();
    let c = sim.constellation(scheme);
    let bps = scheme.bits_per_symbol();
    let n = cfg.ofdm.fft_size();
    let bits = random_bits(rng, cfg.packet_bits);
    let framed = frame_bits(&bits, bps, n, 1);
    let symbols = c.modulate(&framed)?.symbols;
    let n0 = ebno_to_noise_variance(ebno_db, bps, 1.0)?;
    // The 1/N-normalized IFFT puts Es/N per time sample; noise at N0/N per
    // time sample yields exactly N0 per subcarrier after the plain FFT.
    let noise = NoiseSpec::new(n0 / n as f64)?;
    let mut decoded = Vec::with_capacity(framed.len());
    for block in symbols.chunks(n) {
        let (freq, h) = siso_transmit_block(sim, block, &noise, cfg.channel_kind, rng)?;
        let h2 = h.norm_sqr();
        if h2 <= f64::MIN_POSITIVE {
            // Collapsed channel: the whole block is erased.
            decoded.extend(std::iter::repeat_n(2u8, n * bps));
            continue;
        }
        let equalized: Vec<Cplx> = freq.iter().map(|y| y * h.conj() / h2).collect();
        decoded.extend(c.demodulate_hard(&equalized));
    }
    let errors = count_errors(&bits, &decoded[..bits.len()]);
    Ok(PacketOutcome {
        bits_sent: bits.len() as u64,
        bit_errors: errors,
        turbo_iters: 0,
    })
}

/// Alamouti chain: pairs of time-domain OFDM symbols are space-time encoded
/// sample by sample (each antenna at half power), sent through a
/// quasi-static 2x2 channel, linearly combined, and ML-detected per
/// subcarrier after the FFT.
pub(super) fn run_stbc(
    sim: &Simulator,
    scheme: Scheme,
    ebno_db: f64,
    rng: &mut ChaCha8Rng,
) -> Result<PacketOutcome> {
    let cfg = sim.config();
    let c = sim.constellation(scheme);
    let bps = scheme.bits_per_symbol();
    let n = cfg.ofdm.fft_size();
    let bits = random_bits(rng, cfg.packet_bits);
    let framed = frame_bits(&bits, bps, n, 2);
    let symbols = c.modulate(&framed)?.symbols;
    let n0 = ebno_to_noise_variance(ebno_db, bps, 1.0)?;
    // Per-time-sample noise at N0/N gives N0 per subcarrier post-FFT; see
    // run_baseline.
    let noise = NoiseSpec::new(n0 / n as f64)?;
    let power_split = 0.5f64.sqrt();
    let push_label = |out: &mut Vec<u8>, label: usize| {
        for b in (0..bps).rev() {
            out.push(((label >> b) & 1) as u8);
        }
    };
    let mut decoded_bits = Vec::with_capacity(framed.len());
    for pair in symbols.chunks(2 * n) {
        let time_a = sim.ofdm().modulate(&pair[..n])?;
        let time_b = sim.ofdm().modulate(&pair[n..])?;
        let ch = match cfg.channel_kind {
            ChannelKind::Awgn => ChannelRealization::unit(2, 2)?,
            ChannelKind::Rayleigh => rayleigh_block(2, 2, rng)?,
        };
        let mut combined_a = Vec::with_capacity(time_a.samples.len());
        let mut combined_b = Vec::with_capacity(time_a.samples.len());
        for (sa, sb) in time_a.samples.iter().zip(&time_b.samples) {
            let block = stbc::encode(sa.scale(power_split), sb.scale(power_split));
            let received = stbc::transmit(&block, &ch, &noise, rng)?;
            let combined = stbc::combine(&received, &ch);
            combined_a.push(combined.s0);
            combined_b.push(combined.s1);
        }
        let effective_gain = ch.gain_sum() * power_split;
        if effective_gain <= f64::MIN_POSITIVE {
            // Collapsed channel: both blocks of the pair are erased.
            decoded_bits.extend(std::iter::repeat_n(2u8, 2 * n * bps));
            continue;
        }
        let freq_a = sim.ofdm().demodulate_samples(&combined_a)?;
        let freq_b = sim.ofdm().demodulate_samples(&combined_b)?;
        // Detection runs per subcarrier across both blocks; bits for block A
        // land before block B in the framed stream.
        let mut labels_b = Vec::with_capacity(n);
        for (ya, yb) in freq_a.iter().zip(&freq_b) {
            let (ia, ib) = stbc::ml_detect(
                &stbc::CombinedPair {
                    s0: *ya,
                    s1: *yb,
                    gain: effective_gain,
                },
                c,
            )?;
            push_label(&mut decoded_bits, ia);
            labels_b.push(ib);
        }
        for label in labels_b {
            push_label(&mut decoded_bits, label);
        }
    }
    let errors = count_errors(&bits, &decoded_bits[..bits.len()]);
    Ok(PacketOutcome {
        bits_sent: bits.len() as u64,
        bit_errors: errors,
        turbo_iters: 0,
    })
}

/// Turbo chain: rate-1/3 encoding, modulation, OFDM, flat channel, soft
/// demapping to LLRs, iterative Log-MAP decoding.
pub(super) fn run_turbo(
    sim: &Simulator,
    scheme: Scheme,
    ebno_db: f64,
    rng: &mut ChaCha8Rng,
) -> Result<PacketOutcome> {
    let cfg = sim.config();
    let c = sim.constellation(scheme);
    let bps = scheme.bits_per_symbol();
    let n = cfg.ofdm.fft_size();
    let trellis = sim.trellis();
    let il = sim.interleaver();
    let bits = random_bits(rng, cfg.packet_bits);
    let codeword = turbo::turbo_encode(&bits, trellis, il)?;
    let coded = codeword.transmit_bits();
    let code_rate = cfg.packet_bits as f64
        / Codeword::transmit_len(cfg.packet_bits, trellis) as f64;
    let framed = frame_bits(&coded, bps, n, 1);
    let symbols = c.modulate(&framed)?.symbols;
    let n0 = ebno_to_noise_variance(ebno_db, bps, code_rate)?;
    // Per-time-sample noise at N0/N gives N0 per subcarrier post-FFT; see
    // run_baseline.
    let noise = NoiseSpec::new(n0 / n as f64)?;
    let soft_variance = (n0 / 2.0).max(MIN_SOFT_VARIANCE);
    let mut channel_llrs = Vec::with_capacity(framed.len());
    for block in symbols.chunks(n) {
        let (freq, h) = siso_transmit_block(sim, block, &noise, cfg.channel_kind, rng)?;
        let amplitude = h.norm();
        // Phase derotation leaves a real channel amplitude for the demapper;
        // circular noise is unaffected.
        let derotated: Vec<Cplx> = if amplitude <= f64::MIN_POSITIVE {
            freq
        } else {
            let phase = h / amplitude;
            freq.iter().map(|y| y * phase.conj()).collect()
        };
        channel_llrs.extend(c.demodulate_soft(&derotated, soft_variance, amplitude)?);
    }
    channel_llrs.truncate(coded.len());
    // Demapper LLRs are log(P0/P1); the decoder wants log(P1/P0).
    for l in &mut channel_llrs {
        *l = -*l;
    }
    let (sys, p1, p2) = turbo::split_llrs(&channel_llrs, cfg.packet_bits, trellis)?;
    let (decoded, iters) =
        turbo::turbo_decode(&sys, &p1, &p2, trellis, il, cfg.max_turbo_iters)?;
    let errors = count_errors(&bits, &decoded);
    Ok(PacketOutcome {
        bits_sent: bits.len() as u64,
        bit_errors: errors,
        turbo_iters: iters as u32,
    })
}
