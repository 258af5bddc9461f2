//! Harness-level integration tests: sweep behavior, CSV format, and the
//! `simulate` binary's interface contract.

use std::process::Command;

use wimax_phy::sim::{
    write_csv_string, ChainKind, ChannelKind, SimConfig, Simulator,
};

fn small_cfg(chain: ChainKind) -> SimConfig {
    let mut cfg = SimConfig::default_for(chain);
    cfg.ebno_grid_db = vec![0.0, 4.0, 8.0];
    cfg.packet_bits = 1_000;
    cfg.packets_per_point = 5;
    cfg
}

#[test]
fn zero_noise_all_chains() {
    for chain in [ChainKind::Baseline, ChainKind::Stbc, ChainKind::Turbo] {
        let mut cfg = small_cfg(chain);
        cfg.ebno_grid_db = vec![f64::INFINITY];
        let records = Simulator::new(cfg).unwrap().run_sweep().unwrap();
        assert!(records.iter().all(|r| r.bit_errors == 0), "{chain}: errors at zero noise");
    }
}

#[test]
fn repeat_runs_are_identical() {
    let cfg = small_cfg(ChainKind::Stbc);
    let a = Simulator::new(cfg.clone()).unwrap().run_sweep().unwrap();
    let b = Simulator::new(cfg).unwrap().run_sweep().unwrap();
    assert_eq!(write_csv_string(&a).unwrap(), write_csv_string(&b).unwrap());
}

#[test]
fn csv_round_trips() {
    let cfg = small_cfg(ChainKind::Turbo);
    let records = Simulator::new(cfg).unwrap().run_sweep().unwrap();
    let text = write_csv_string(&records).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "chain,ebno_db,scheme,bits_sent,bit_errors,ber,packets,seed,channel,turbo_iters_mean"
    );
    for (line, r) in lines.zip(&records) {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields.len(), 10);
        assert_eq!(fields[0], r.chain.name());
        assert_eq!(fields[1].parse::<f64>().unwrap(), r.ebno_db);
        assert_eq!(fields[2], r.scheme.name());
        assert_eq!(fields[3].parse::<u64>().unwrap(), r.bits_sent);
        assert_eq!(fields[4].parse::<u64>().unwrap(), r.bit_errors);
        let ber: f64 = fields[5].parse().unwrap();
        assert!((ber - r.bit_errors as f64 / r.bits_sent as f64).abs() <= 1e-12);
        assert_eq!(fields[8], r.channel.name());
    }
}

#[test]
fn baseline_ber_is_monotone_within_noise() {
    let mut cfg = SimConfig::default_for(ChainKind::Baseline);
    cfg.ebno_grid_db = (0..=10).step_by(2).map(f64::from).collect();
    cfg.packet_bits = 5_000;
    cfg.packets_per_point = 10;
    cfg.channel_kind = ChannelKind::Awgn;
    // Pin one scheme: the adaptive aggregate curve jumps up at upgrades.
    cfg.amc = wimax_phy::amc::AmcPolicy {
        ladder: vec![wimax_phy::modem::Scheme::Qpsk],
        initial: wimax_phy::modem::Scheme::Qpsk,
        ..wimax_phy::amc::AmcPolicy::default_policy()
    };
    let records = Simulator::new(cfg).unwrap().run_sweep().unwrap();
    // Compare aggregate rows only (first record per point); allow small
    // Monte Carlo slack.
    let mut prev = f64::INFINITY;
    let mut prev_db = f64::NEG_INFINITY;
    for r in &records {
        if r.ebno_db == prev_db {
            continue;
        }
        assert!(
            r.ber <= prev + 0.01,
            "BER rose from {prev} to {} at {} dB",
            r.ber,
            r.ebno_db
        );
        prev = r.ber;
        prev_db = r.ebno_db;
    }
}

#[test]
fn config_validation_rejects_bad_inputs() {
    let mut cfg = small_cfg(ChainKind::Baseline);
    cfg.packet_bits = 0;
    assert!(Simulator::new(cfg).is_err());
    let mut cfg = small_cfg(ChainKind::Baseline);
    cfg.ebno_grid_db.clear();
    assert!(Simulator::new(cfg).is_err());
    let mut cfg = small_cfg(ChainKind::Turbo);
    cfg.max_turbo_iters = 0;
    assert!(Simulator::new(cfg).is_err());
}

// ---------------------------------------------------------------------------
// CLI contract.
// ---------------------------------------------------------------------------

fn simulate_cmd() -> Command {
    Command::new(env!("CARGO_BIN_EXE_simulate"))
}

#[test]
fn cli_writes_csv_and_plot_script() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("out.csv");
    let script = dir.path().join("plot.py");
    let status = simulate_cmd()
        .args([
            "--chain", "stbc",
            "--ebno-start", "0",
            "--ebno-stop", "4",
            "--ebno-step", "2",
            "--packet-bits", "1000",
            "--packets", "3",
            "--seed", "5",
            "--channel", "rayleigh",
            "--fft-size", "64",
            "--cp", "1/8",
        ])
        .arg("--out")
        .arg(&csv)
        .arg("--plot")
        .arg(&script)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with(
        "chain,ebno_db,scheme,bits_sent,bit_errors,ber,packets,seed,channel,turbo_iters_mean\n"
    ));
    assert!(text.lines().count() >= 4);
    let plot = std::fs::read_to_string(&script).unwrap();
    assert!(plot.contains("out.csv"));
}

#[test]
fn cli_exit_code_1_on_bad_config() {
    let dir = tempfile::tempdir().unwrap();
    for bad in [
        vec!["--chain", "warp"],
        vec!["--chain", "baseline", "--ebno-step", "0"],
        vec!["--chain", "baseline", "--fft-size", "100"],
        vec!["--chain", "baseline", "--cp", "eighth"],
        vec!["--chain", "baseline", "--amc-up", "0.5", "--amc-down", "0.1"],
    ] {
        let status = simulate_cmd()
            .args(&bad)
            .args(["--packet-bits", "100", "--packets", "1"])
            .arg("--out")
            .arg(dir.path().join("x.csv"))
            .status()
            .unwrap();
        assert_eq!(status.code(), Some(1), "args: {bad:?}");
    }
}

#[test]
fn cli_exit_code_2_on_unwritable_output() {
    let status = simulate_cmd()
        .args([
            "--chain", "baseline",
            "--ebno-stop", "0",
            "--packet-bits", "100",
            "--packets", "1",
            "--out", "/nonexistent-dir/out.csv",
        ])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
}

#[test]
fn cli_is_deterministic_across_worker_counts() {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for workers in ["1", "4"] {
        let csv = dir.path().join(format!("w{workers}.csv"));
        let status = simulate_cmd()
            .args([
                "--chain", "baseline",
                "--ebno-stop", "4",
                "--packet-bits", "2000",
                "--packets", "5",
                "--seed", "11",
                "--workers", workers,
            ])
            .arg("--out")
            .arg(&csv)
            .status()
            .unwrap();
        assert_eq!(status.code(), Some(0));
        outputs.push(std::fs::read(&csv).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
}
