//! BER sweep driver. Exit codes: 0 success, 1 invalid configuration,
//! 2 I/O failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use wimax_phy::amc::AmcPolicy;
use wimax_phy::ofdm::OfdmConfig;
use wimax_phy::sim::{
    emit_plot_script, run_sweep, write_csv, ChainKind, ChannelKind, SimConfig,
};
use wimax_phy::{Error, Result};

#[derive(Parser, Debug)]
#[command(
    name = "simulate",
    about = "Monte Carlo BER sweeps for adaptive-modulation OFDM, Alamouti STBC, and turbo-coded chains"
)]
struct Args {
    /// Transmit/receive chain: baseline, stbc, or turbo.
    #[arg(long)]
    chain: ChainKind,

    /// First Eb/N0 point in dB.
    #[arg(long, default_value_t = 0.0)]
    ebno_start: f64,

    /// Last Eb/N0 point in dB (inclusive).
    #[arg(long, default_value_t = 10.0)]
    ebno_stop: f64,

    /// Grid spacing in dB.
    #[arg(long, default_value_t = 1.0)]
    ebno_step: f64,

    /// Information bits per packet.
    #[arg(long, default_value_t = 10_000)]
    packet_bits: usize,

    /// Packets per Eb/N0 point.
    #[arg(long, default_value_t = 50)]
    packets: usize,

    /// Master seed; the whole sweep is reproducible from it.
    #[arg(long, default_value_t = 1)]
    seed: u64,

    /// Channel model: awgn or rayleigh. Default depends on the chain.
    #[arg(long)]
    channel: Option<ChannelKind>,

    /// FFT size (power of two).
    #[arg(long, default_value_t = 256)]
    fft_size: usize,

    /// Cyclic prefix as a fraction of the FFT size, e.g. 1/8.
    #[arg(long, default_value = "1/8")]
    cp: String,

    /// Measured BER below this steps the modulation one rung up.
    #[arg(long, default_value_t = 1e-2)]
    amc_up: f64,

    /// Measured BER above this steps the modulation one rung down.
    #[arg(long, default_value_t = 5e-2)]
    amc_down: f64,

    /// Maximum turbo decoder iterations.
    #[arg(long, default_value_t = 8)]
    iters: usize,

    /// Output CSV path.
    #[arg(long)]
    out: PathBuf,

    /// Also write a matplotlib script that plots the CSV.
    #[arg(long)]
    plot: Option<PathBuf>,

    /// Worker threads for the sweep (default: all cores). Results are
    /// identical for any value.
    #[arg(long)]
    workers: Option<usize>,
}

fn parse_cp(s: &str) -> Result<(u32, u32)> {
    let (num, den) = s
        .split_once('/')
        .ok_or_else(|| Error::Config(format!("cp must look like 1/8, got '{s}'")))?;
    let num = num
        .trim()
        .parse()
        .map_err(|_| Error::Config(format!("bad cp numerator '{num}'")))?;
    let den = den
        .trim()
        .parse()
        .map_err(|_| Error::Config(format!("bad cp denominator '{den}'")))?;
    Ok((num, den))
}

fn ebno_grid(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    if !start.is_finite() || !stop.is_finite() || !step.is_finite() || step <= 0.0 {
        return Err(Error::Config(
            "Eb/N0 grid needs finite endpoints and a positive step".into(),
        ));
    }
    if stop < start {
        return Err(Error::Config("ebno-stop is below ebno-start".into()));
    }
    let n = ((stop - start) / step).round() as usize;
    let mut grid: Vec<f64> = (0..=n)
        .map(|i| start + step * i as f64)
        .filter(|&x| x <= stop + 1e-9)
        .collect();
    if grid.is_empty() {
        grid.push(start);
    }
    Ok(grid)
}

fn build_config(args: &Args) -> Result<SimConfig> {
    let (cp_num, cp_den) = parse_cp(&args.cp)?;
    let mut cfg = SimConfig::default_for(args.chain);
    cfg.ebno_grid_db = ebno_grid(args.ebno_start, args.ebno_stop, args.ebno_step)?;
    cfg.packet_bits = args.packet_bits;
    cfg.packets_per_point = args.packets;
    cfg.master_seed = args.seed;
    cfg.ofdm = OfdmConfig::new(args.fft_size, cp_num, cp_den)?;
    cfg.amc = AmcPolicy {
        up_threshold: args.amc_up,
        down_threshold: args.amc_down,
        ..AmcPolicy::default_policy()
    };
    if let Some(channel) = args.channel {
        cfg.channel_kind = channel;
    }
    cfg.max_turbo_iters = args.iters;
    cfg.validate()?;
    Ok(cfg)
}

fn run(args: &Args) -> Result<()> {
    let cfg = build_config(args)?;
    let records = match args.workers {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Config(format!("worker pool: {e}")))?
            .install(|| run_sweep(cfg)),
        None => run_sweep(cfg),
    }?;
    write_csv(&records, &args.out)?;
    eprintln!(
        "wrote {} records to {}",
        records.len(),
        args.out.display()
    );
    if let Some(script) = &args.plot {
        emit_plot_script(&args.out, script)?;
        eprintln!("wrote plot script to {}", script.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(args) => args,
        Err(e) => {
            // clap handles --help/--version itself; argument errors are
            // configuration errors.
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e @ Error::Io { .. }) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
