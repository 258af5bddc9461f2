//! Bit/symbol mapping for the four WiMAX modulation schemes, with hard and
//! soft (LLR) demapping.
//!
//! Every constellation is Gray-labeled and normalized to unit average symbol
//! energy, so all Eb/N0 accounting lives in [`crate::channel`].

use num_complex::Complex;

use crate::math::log_sum_exp;
use crate::{Error, Result, Scalar};

/// Modulation scheme identifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scheme {
    Bpsk,
    Qpsk,
    Qam16,
    Qam64,
}

impl Scheme {
    pub fn bits_per_symbol(self) -> usize {
        match self {
            Scheme::Bpsk => 1,
            Scheme::Qpsk => 2,
            Scheme::Qam16 => 4,
            Scheme::Qam64 => 6,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Bpsk => "bpsk",
            Scheme::Qpsk => "qpsk",
            Scheme::Qam16 => "qam16",
            Scheme::Qam64 => "qam64",
        }
    }

    pub const ALL: [Scheme; 4] = [Scheme::Bpsk, Scheme::Qpsk, Scheme::Qam16, Scheme::Qam64];
}

impl std::str::FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "bpsk" => Ok(Scheme::Bpsk),
            "qpsk" => Ok(Scheme::Qpsk),
            "qam16" | "16qam" => Ok(Scheme::Qam16),
            "qam64" | "64qam" => Ok(Scheme::Qam64),
            other => Err(Error::Parameter(format!("unknown scheme '{other}'"))),
        }
    }
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// A normalized, Gray-labeled constellation.
///
/// `points[label]` is the symbol carrying bit pattern `label`
/// (`bits_per_symbol` bits, first bit of the group is the MSB), so the label
/// set is by construction a bijection onto `{0,1}^bits_per_symbol`.
#[derive(Debug, Clone)]
pub struct Constellation<S> {
    scheme: Scheme,
    points: Vec<Complex<S>>,
    bits_per_symbol: usize,
}

/// A block of modulated symbols, tagged with the scheme that produced it.
#[derive(Debug, Clone)]
pub struct SymbolBlock<S> {
    pub symbols: Vec<Complex<S>>,
    pub scheme: Scheme,
}

/// Inverse of the reflected binary Gray code (up to 32 bits).
fn gray_to_index(g: u32) -> u32 {
    let mut n = g;
    let mut shift = 1;
    while shift < 32 {
        n ^= n >> shift;
        shift <<= 1;
    }
    n
}

impl<S: Scalar> Constellation<S> {
    /// Builds the normalized Gray-mapped constellation for `scheme`.
    pub fn new(scheme: Scheme) -> Self {
        let bps = scheme.bits_per_symbol();
        let points = match scheme {
            Scheme::Bpsk => vec![
                Complex::new(S::one(), S::zero()),
                Complex::new(-S::one(), S::zero()),
            ],
            // Square QAM (QPSK is 4-QAM): per-axis Gray code, the high
            // half of the label selects the in-phase level.
            _ => {
                let m = bps / 2;
                let levels = 1u32 << m;
                let mean_energy: f64 = (0..levels)
                    .map(|i| {
                        let a = (2 * i as i64 - (levels as i64 - 1)) as f64;
                        a * a
                    })
                    .sum::<f64>()
                    / levels as f64
                    * 2.0;
                let scale = S::cast(1.0 / mean_energy.sqrt());
                (0..1u32 << bps)
                    .map(|label| {
                        let gi = label >> m;
                        let gq = label & (levels - 1);
                        let ai = 2 * gray_to_index(gi) as i64 - (levels as i64 - 1);
                        let aq = 2 * gray_to_index(gq) as i64 - (levels as i64 - 1);
                        Complex::new(
                            S::cast(ai as f64) * scale,
                            S::cast(aq as f64) * scale,
                        )
                    })
                    .collect()
            }
        };
        Self {
            scheme,
            points,
            bits_per_symbol: bps,
        }
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn bits_per_symbol(&self) -> usize {
        self.bits_per_symbol
    }

    /// Symbols indexed by label.
    pub fn points(&self) -> &[Complex<S>] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Maps a bit sequence onto constellation points, one symbol per
    /// `bits_per_symbol` group (first bit of a group is the MSB).
    pub fn modulate(&self, bits: &[u8]) -> Result<SymbolBlock<S>> {
        if bits.len() % self.bits_per_symbol != 0 {
            return Err(Error::InputShape(format!(
                "{} bits not divisible by {} bits/symbol",
                bits.len(),
                self.bits_per_symbol
            )));
        }
        let symbols = bits
            .chunks(self.bits_per_symbol)
            .map(|group| {
                let label = group.iter().fold(0usize, |acc, &b| (acc << 1) | (b as usize & 1));
                self.points[label]
            })
            .collect();
        Ok(SymbolBlock {
            symbols,
            scheme: self.scheme,
        })
    }

    /// Label of the Euclidean-nearest point; ties break to the lowest label.
    pub fn nearest(&self, y: Complex<S>) -> usize {
        let mut best = 0;
        let mut best_d = S::infinity();
        for (i, p) in self.points.iter().enumerate() {
            let d = (y - p).norm_sqr();
            if d < best_d {
                best_d = d;
                best = i;
            }
        }
        best
    }

    /// Hard demapping: nearest-point labels, unpacked MSB-first.
    pub fn demodulate_hard(&self, symbols: &[Complex<S>]) -> Vec<u8> {
        let mut bits = Vec::with_capacity(symbols.len() * self.bits_per_symbol);
        for &y in symbols {
            let label = self.nearest(y);
            for b in (0..self.bits_per_symbol).rev() {
                bits.push(((label >> b) & 1) as u8);
            }
        }
        bits
    }

    /// Soft demapping to per-bit LLRs, `log(P(bit=0)/P(bit=1))`.
    ///
    /// `noise_variance` is the noise variance per real dimension (N0/2 for
    /// total complex noise power N0); `channel_gain` is the known real
    /// channel amplitude after phase derotation, so the likelihood of point
    /// `p` is `exp(-|y - g*p|^2 / (2*noise_variance))`. Computed with exact
    /// log-sum-exp over the point set.
    pub fn demodulate_soft(
        &self,
        symbols: &[Complex<S>],
        noise_variance: S,
        channel_gain: S,
    ) -> Result<Vec<S>> {
        if noise_variance <= S::zero() {
            return Err(Error::Parameter(
                "noise_variance must be positive".into(),
            ));
        }
        if channel_gain < S::zero() {
            return Err(Error::Parameter("channel_gain must be >= 0".into()));
        }
        let inv = (S::cast(2.0) * noise_variance).recip();
        let mut llrs = Vec::with_capacity(symbols.len() * self.bits_per_symbol);
        let mut metric = vec![S::zero(); self.points.len()];
        let mut m0 = Vec::with_capacity(self.points.len() / 2);
        let mut m1 = Vec::with_capacity(self.points.len() / 2);
        for &y in symbols {
            for (label, p) in self.points.iter().enumerate() {
                metric[label] = -(y - p.scale(channel_gain)).norm_sqr() * inv;
            }
            for b in (0..self.bits_per_symbol).rev() {
                m0.clear();
                m1.clear();
                for (label, &m) in metric.iter().enumerate() {
                    if (label >> b) & 1 == 0 {
                        m0.push(m);
                    } else {
                        m1.push(m);
                    }
                }
                llrs.push(log_sum_exp(&m0) - log_sum_exp(&m1));
            }
        }
        Ok(llrs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    type C = Complex<f64>;

    fn random_bits(rng: &mut impl Rng, n: usize) -> Vec<u8> {
        (0..n).map(|_| rng.random_range(0..2u8)).collect()
    }

    #[test]
    fn unit_energy_exact() {
        for scheme in Scheme::ALL {
            let c = Constellation::<f64>::new(scheme);
            let mean: f64 =
                c.points().iter().map(|p| p.norm_sqr()).sum::<f64>() / c.len() as f64;
            assert!((mean - 1.0).abs() < 1e-12, "{scheme}: mean energy {mean}");
        }
    }

    #[test]
    fn label_set_is_bijection() {
        for scheme in Scheme::ALL {
            let c = Constellation::<f64>::new(scheme);
            assert_eq!(c.len(), 1 << scheme.bits_per_symbol());
            // Points must be pairwise distinct for labels to be recoverable.
            for i in 0..c.len() {
                for j in 0..i {
                    assert!((c.points()[i] - c.points()[j]).norm() > 1e-9);
                }
            }
        }
    }

    #[test]
    fn gray_adjacency_exhaustive() {
        for scheme in Scheme::ALL {
            let c = Constellation::<f64>::new(scheme);
            // Nearest-neighbor distance.
            let mut dmin = f64::INFINITY;
            for i in 0..c.len() {
                for j in 0..i {
                    dmin = dmin.min((c.points()[i] - c.points()[j]).norm());
                }
            }
            for i in 0..c.len() {
                for j in 0..i {
                    let d = (c.points()[i] - c.points()[j]).norm();
                    if d < dmin * 1.0001 {
                        let h = (i ^ j).count_ones();
                        assert_eq!(h, 1, "{scheme}: labels {i} and {j} at distance {d}");
                    }
                }
            }
        }
    }

    #[test]
    fn bpsk_points() {
        let c = Constellation::<f64>::new(Scheme::Bpsk);
        assert_eq!(c.points()[0], C::new(1.0, 0.0));
        assert_eq!(c.points()[1], C::new(-1.0, 0.0));
        assert_eq!(c.modulate(&[0]).unwrap().symbols, vec![C::new(1.0, 0.0)]);
    }

    #[test]
    fn qpsk_points_on_unit_diagonals() {
        let c = Constellation::<f64>::new(Scheme::Qpsk);
        let s = 1.0 / 2f64.sqrt();
        for p in c.points() {
            assert!((p.re.abs() - s).abs() < 1e-15);
            assert!((p.im.abs() - s).abs() < 1e-15);
        }
        let sb = c.modulate(&[0, 1, 1, 0]).unwrap();
        assert_eq!(sb.symbols.len(), 2);
        for y in &sb.symbols {
            assert!(c.points().iter().any(|p| (p - y).norm() < 1e-15));
        }
    }

    #[test]
    fn qam16_grid_scale() {
        // Mean energy of the {±1,±3}² grid is 10, so points live on the grid
        // scaled by 1/sqrt(10).
        let c = Constellation::<f64>::new(Scheme::Qam16);
        let s = 10f64.sqrt().recip();
        for p in c.points() {
            let i = p.re / s;
            let q = p.im / s;
            assert!((i.abs() - 1.0).abs() < 1e-12 || (i.abs() - 3.0).abs() < 1e-12);
            assert!((q.abs() - 1.0).abs() < 1e-12 || (q.abs() - 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn modulate_rejects_bad_length() {
        let c = Constellation::<f64>::new(Scheme::Qpsk);
        assert!(matches!(c.modulate(&[1]), Err(Error::InputShape(_))));
    }

    #[test]
    fn hard_demap_examples() {
        let c = Constellation::<f64>::new(Scheme::Bpsk);
        assert_eq!(c.demodulate_hard(&[C::new(0.9, 0.0)]), vec![0]);
        for scheme in Scheme::ALL {
            let c = Constellation::<f64>::new(scheme);
            let pts: Vec<C> = c.points().to_vec();
            let bits = c.demodulate_hard(&pts);
            for (label, group) in bits.chunks(c.bits_per_symbol()).enumerate() {
                let val = group.iter().fold(0usize, |a, &b| (a << 1) | b as usize);
                assert_eq!(val, label);
            }
        }
    }

    #[test]
    fn roundtrip_all_schemes() {
        let mut rng = StdRng::seed_from_u64(7);
        for scheme in Scheme::ALL {
            let c = Constellation::<f64>::new(scheme);
            for _ in 0..50 {
                let bits = random_bits(&mut rng, scheme.bits_per_symbol() * 40);
                let sb = c.modulate(&bits).unwrap();
                assert_eq!(c.demodulate_hard(&sb.symbols), bits);
            }
        }
    }

    #[test]
    fn noisy_hard_demap_recovers_at_small_sigma() {
        let mut rng = StdRng::seed_from_u64(11);
        let c = Constellation::<f64>::new(Scheme::Qam64);
        let bits = random_bits(&mut rng, 6 * 2000);
        let sb = c.modulate(&bits).unwrap();
        let sigma = 1e-3;
        let noisy: Vec<C> = sb
            .symbols
            .iter()
            .map(|s| {
                s + C::new(
                    sigma * f64::std_normal(&mut rng),
                    sigma * f64::std_normal(&mut rng),
                )
            })
            .collect();
        assert_eq!(c.demodulate_hard(&noisy), bits);
    }

    #[test]
    fn soft_bpsk_closed_form() {
        // Antipodal signaling: LLR = 2*g*y/sigma^2 per real dimension, i.e.
        // 4*g*y/N0. Checked against the log-sum-exp definition.
        let c = Constellation::<f64>::new(Scheme::Bpsk);
        let y = C::new(1.0, 0.0);
        let llr = c.demodulate_soft(&[y], 0.5, 1.0).unwrap();
        assert!((llr[0] - 4.0).abs() < 1e-12, "llr = {}", llr[0]);
        for (y, g, var) in [(0.3, 1.0, 0.2), (-1.7, 0.4, 1.3), (2.0, 2.5, 0.05)] {
            let llr = c
                .demodulate_soft(&[C::new(y, 0.0)], var, g)
                .unwrap()[0];
            assert!((llr - 2.0 * g * y / var).abs() < 1e-9);
        }
    }

    #[test]
    fn soft_midway_is_zero() {
        let c = Constellation::<f64>::new(Scheme::Bpsk);
        let llr = c.demodulate_soft(&[C::new(0.0, 0.7)], 0.3, 1.0).unwrap();
        assert!(llr[0].abs() < 1e-12);
    }

    #[test]
    fn soft_hard_sign_agreement_bpsk() {
        let mut rng = StdRng::seed_from_u64(3);
        let c = Constellation::<f64>::new(Scheme::Bpsk);
        for _ in 0..1000 {
            let y = C::new(
                2.0 * f64::std_normal(&mut rng),
                f64::std_normal(&mut rng),
            );
            if y.re.abs() < 1e-12 {
                continue;
            }
            let hard = c.demodulate_hard(&[y])[0];
            let soft = c.demodulate_soft(&[y], 0.7, 1.0).unwrap()[0];
            assert_eq!(hard == 0, soft > 0.0);
        }
    }

    #[test]
    fn soft_rejects_bad_variance() {
        let c = Constellation::<f64>::new(Scheme::Qpsk);
        assert!(c.demodulate_soft(&[C::new(0.0, 0.0)], 0.0, 1.0).is_err());
    }

    #[test]
    fn empirical_energy_of_random_bits() {
        let mut rng = StdRng::seed_from_u64(19);
        for scheme in Scheme::ALL {
            let c = Constellation::<f64>::new(scheme);
            let n = 20_000;
            let bits = random_bits(&mut rng, scheme.bits_per_symbol() * n);
            let sb = c.modulate(&bits).unwrap();
            let mean: f64 =
                sb.symbols.iter().map(|s| s.norm_sqr()).sum::<f64>() / n as f64;
            // 3-sigma Monte Carlo bound; symbol energy variance is < 1 for
            // all four schemes.
            assert!((mean - 1.0).abs() < 3.0 / (n as f64).sqrt() * 1.0_f64.max(1.0));
        }
    }
}
