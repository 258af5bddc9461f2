//! Monte Carlo harness: chain assembly, the AMC feedback loop, seeded
//! parallel sweeps, and result output.

mod chain;
mod output;

pub use output::{emit_plot_script, write_csv, write_csv_string};

use std::collections::BTreeMap;

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::amc::{self, AmcPolicy};
use crate::modem::{Constellation, Scheme};
use crate::ofdm::{Ofdm, OfdmConfig};
use crate::turbo::{Interleaver, Trellis};
use crate::{Error, Result};

/// Which transmit/receive chain to simulate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChainKind {
    Baseline,
    Stbc,
    Turbo,
}

impl ChainKind {
    pub fn name(self) -> &'static str {
        match self {
            ChainKind::Baseline => "baseline",
            ChainKind::Stbc => "stbc",
            ChainKind::Turbo => "turbo",
        }
    }
}

impl std::str::FromStr for ChainKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "baseline" => Ok(ChainKind::Baseline),
            "stbc" => Ok(ChainKind::Stbc),
            "turbo" => Ok(ChainKind::Turbo),
            other => Err(Error::Config(format!("unknown chain '{other}'"))),
        }
    }
}

impl std::fmt::Display for ChainKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Channel model for the sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChannelKind {
    Awgn,
    Rayleigh,
}

impl ChannelKind {
    pub fn name(self) -> &'static str {
        match self {
            ChannelKind::Awgn => "awgn",
            ChannelKind::Rayleigh => "rayleigh",
        }
    }
}

impl std::str::FromStr for ChannelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "awgn" => Ok(ChannelKind::Awgn),
            "rayleigh" => Ok(ChannelKind::Rayleigh),
            other => Err(Error::Config(format!("unknown channel '{other}'"))),
        }
    }
}

impl std::fmt::Display for ChannelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Full sweep configuration. The whole sweep output is a pure function of
/// this struct, regardless of worker count.
#[derive(Debug, Clone)]
pub struct SimConfig {
    pub chain: ChainKind,
    pub ebno_grid_db: Vec<f64>,
    pub packet_bits: usize,
    pub packets_per_point: usize,
    pub master_seed: u64,
    pub ofdm: OfdmConfig,
    pub amc: AmcPolicy,
    pub channel_kind: ChannelKind,
    pub max_turbo_iters: usize,
}

impl SimConfig {
    /// Desk-scale defaults: 1e4-bit packets, 50 packets per point.
    pub fn default_for(chain: ChainKind) -> Self {
        Self {
            chain,
            ebno_grid_db: (0..=10).map(f64::from).collect(),
            packet_bits: 10_000,
            packets_per_point: 50,
            master_seed: 1,
            ofdm: OfdmConfig::default_256(),
            amc: AmcPolicy::default_policy(),
            channel_kind: match chain {
                ChainKind::Stbc => ChannelKind::Rayleigh,
                _ => ChannelKind::Awgn,
            },
            max_turbo_iters: 8,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.packet_bits == 0 {
            return Err(Error::Config("packet_bits must be positive".into()));
        }
        if self.ebno_grid_db.is_empty() {
            return Err(Error::Config("Eb/N0 grid is empty".into()));
        }
        if self.packets_per_point == 0 {
            return Err(Error::Config("packets_per_point must be positive".into()));
        }
        if self.max_turbo_iters == 0 {
            return Err(Error::Config("max_turbo_iters must be >= 1".into()));
        }
        self.amc.validate()?;
        Ok(())
    }
}

/// One sweep point (or per-scheme slice of a point).
#[derive(Debug, Clone, PartialEq)]
pub struct BerRecord {
    pub chain: ChainKind,
    pub ebno_db: f64,
    pub scheme: Scheme,
    pub bits_sent: u64,
    pub bit_errors: u64,
    pub ber: f64,
    pub packets: u64,
    pub seed: u64,
    pub channel: ChannelKind,
    pub turbo_iters_mean: f64,
}

/// Result of a single packet transmission.
#[derive(Debug, Clone, Copy)]
pub struct PacketOutcome {
    pub bits_sent: u64,
    pub bit_errors: u64,
    /// Turbo iterations consumed; 0 for the uncoded chains.
    pub turbo_iters: u32,
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Independent stream for one (point, packet) pair, so results do not
/// depend on worker scheduling.
pub fn packet_rng(master_seed: u64, point: u64, packet: u64) -> ChaCha8Rng {
    let mut s = splitmix64(master_seed);
    s = splitmix64(s ^ splitmix64(point.wrapping_add(1)));
    s = splitmix64(s ^ splitmix64(packet.wrapping_add(0x5151_5151)));
    ChaCha8Rng::seed_from_u64(s)
}

fn interleaver_rng(master_seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(splitmix64(master_seed ^ 0x17EA_7E55_1A7E_0001))
}

/// Immutable simulation context: one chain, one configuration, shared
/// constellations, FFT plans, trellis, and the run's interleaver.
pub struct Simulator {
    cfg: SimConfig,
    ofdm: Ofdm<f64>,
    trellis: Trellis,
    interleaver: Interleaver,
    constellations: Vec<(Scheme, Constellation<f64>)>,
}

impl Simulator {
    pub fn new(cfg: SimConfig) -> Result<Self> {
        cfg.validate()?;
        let ofdm = Ofdm::new(cfg.ofdm);
        let trellis = Trellis::wimax();
        // One permutation per run, drawn from the master stream so it is
        // recoverable from the recorded seed.
        let mut il_rng = interleaver_rng(cfg.master_seed);
        let interleaver = Interleaver::random(cfg.packet_bits, &mut il_rng);
        let constellations = Scheme::ALL
            .iter()
            .map(|&s| (s, Constellation::new(s)))
            .collect();
        Ok(Self {
            cfg,
            ofdm,
            trellis,
            interleaver,
            constellations,
        })
    }

    pub fn config(&self) -> &SimConfig {
        &self.cfg
    }

    pub fn interleaver(&self) -> &Interleaver {
        &self.interleaver
    }

    pub(crate) fn constellation(&self, scheme: Scheme) -> &Constellation<f64> {
        &self
            .constellations
            .iter()
            .find(|(s, _)| *s == scheme)
            .expect("all schemes built")
            .1
    }

    pub(crate) fn ofdm(&self) -> &Ofdm<f64> {
        &self.ofdm
    }

    pub(crate) fn trellis(&self) -> &Trellis {
        &self.trellis
    }

    /// Runs one packet end to end through the configured chain at the given
    /// scheme and operating point, counting errors against the known
    /// payload.
    pub fn run_packet(
        &self,
        scheme: Scheme,
        ebno_db: f64,
        rng: &mut ChaCha8Rng,
    ) -> Result<PacketOutcome> {
        match self.cfg.chain {
            ChainKind::Baseline => chain::run_baseline(self, scheme, ebno_db, rng),
            ChainKind::Stbc => chain::run_stbc(self, scheme, ebno_db, rng),
            ChainKind::Turbo => chain::run_turbo(self, scheme, ebno_db, rng),
        }
    }

    fn run_point(&self, point_idx: usize, ebno_db: f64) -> Result<Vec<BerRecord>> {
        #[derive(Default)]
        struct Tally {
            bits: u64,
            errors: u64,
            packets: u64,
            iters: u64,
        }
        let mut per_scheme: BTreeMap<Scheme, Tally> = BTreeMap::new();
        let mut state = amc::initial_state(&self.cfg.amc);
        let mut steady_scheme = state.current;
        for pkt in 0..self.cfg.packets_per_point {
            let mut rng =
                packet_rng(self.cfg.master_seed, point_idx as u64, pkt as u64);
            let scheme = state.current;
            let out = self.run_packet(scheme, ebno_db, &mut rng)?;
            let t = per_scheme.entry(scheme).or_default();
            t.bits += out.bits_sent;
            t.errors += out.bit_errors;
            t.packets += 1;
            t.iters += u64::from(out.turbo_iters);
            steady_scheme = scheme;
            let measured = out.bit_errors as f64 / out.bits_sent as f64;
            state = amc::update(&state, measured, &self.cfg.amc);
        }
        let total_bits: u64 = per_scheme.values().map(|t| t.bits).sum();
        let total_errors: u64 = per_scheme.values().map(|t| t.errors).sum();
        let total_packets: u64 = per_scheme.values().map(|t| t.packets).sum();
        let total_iters: u64 = per_scheme.values().map(|t| t.iters).sum();
        let record = |scheme, t: &Tally| BerRecord {
            chain: self.cfg.chain,
            ebno_db,
            scheme,
            bits_sent: t.bits,
            bit_errors: t.errors,
            ber: t.errors as f64 / t.bits as f64,
            packets: t.packets,
            seed: self.cfg.master_seed,
            channel: self.cfg.channel_kind,
            turbo_iters_mean: if self.cfg.chain == ChainKind::Turbo {
                t.iters as f64 / t.packets as f64
            } else {
                0.0
            },
        };
        // Aggregate record first (tagged with the steady-state scheme),
        // then per-scheme sub-records when the point mixed schemes.
        let mut records = vec![record(
            steady_scheme,
            &Tally {
                bits: total_bits,
                errors: total_errors,
                packets: total_packets,
                iters: total_iters,
            },
        )];
        if per_scheme.len() > 1 {
            for (scheme, t) in &per_scheme {
                records.push(record(*scheme, t));
            }
        }
        Ok(records)
    }

    /// Runs the full Eb/N0 sweep. Points may execute on a worker pool; the
    /// output order and content are schedule-independent.
    pub fn run_sweep(&self) -> Result<Vec<BerRecord>> {
        let per_point: Vec<Result<Vec<BerRecord>>> = self
            .cfg
            .ebno_grid_db
            .par_iter()
            .enumerate()
            .map(|(idx, &ebno)| {
                self.run_point(idx, ebno).map_err(|e| {
                    Error::Config(format!("at Eb/N0 {ebno} dB: {e}"))
                })
            })
            .collect();
        let mut records = Vec::new();
        for point in per_point {
            records.extend(point?);
        }
        Ok(records)
    }
}

/// Convenience wrapper: build and run in one call.
pub fn run_sweep(cfg: SimConfig) -> Result<Vec<BerRecord>> {
    Simulator::new(cfg)?.run_sweep()
}
