//! CSV results and an optional plotting script.

use std::fmt::Write as _;
use std::path::Path;

use crate::{Error, Result};

use super::BerRecord;

pub const CSV_HEADER: &str =
    "chain,ebno_db,scheme,bits_sent,bit_errors,ber,packets,seed,channel,turbo_iters_mean";

/// Renders records to CSV text, one row per record, header first.
pub fn write_csv_string(records: &[BerRecord]) -> Result<String> {
    if records.is_empty() {
        return Err(Error::Parameter("no records to write".into()));
    }
    let mut out = String::new();
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in records {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            r.chain,
            r.ebno_db,
            r.scheme,
            r.bits_sent,
            r.bit_errors,
            r.ber,
            r.packets,
            r.seed,
            r.channel,
            r.turbo_iters_mean,
        )
        .expect("string formatting is infallible");
    }
    Ok(out)
}

/// Writes records to a CSV file.
pub fn write_csv(records: &[BerRecord], path: &Path) -> Result<()> {
    let text = write_csv_string(records)?;
    std::fs::write(path, text).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Writes a standalone matplotlib script that plots BER curves from the
/// given CSV (aggregate rows only, grouped by chain).
pub fn emit_plot_script(csv_path: &Path, script_path: &Path) -> Result<()> {
    let script = format!(
        r#"#!/usr/bin/env python3
"""Plot BER curves from {csv}."""
import csv
from collections import defaultdict

import matplotlib.pyplot as plt

curves = defaultdict(list)
seen = set()
with open({csv:?}) as f:
    for row in csv.DictReader(f):
        key = (row["chain"], row["ebno_db"])
        if key in seen:
            continue  # aggregate row comes first; skip per-scheme rows
        seen.add(key)
        curves[row["chain"]].append((float(row["ebno_db"]), float(row["ber"])))

fig, ax = plt.subplots()
for chain, points in sorted(curves.items()):
    points.sort()
    xs = [x for x, _ in points]
    ys = [max(y, 1e-12) for _, y in points]
    ax.semilogy(xs, ys, marker="o", label=chain)
ax.set_xlabel("Eb/N0 (dB)")
ax.set_ylabel("BER")
ax.grid(True, which="both", alpha=0.3)
ax.legend()
fig.savefig("ber.png", dpi=150, bbox_inches="tight")
print("wrote ber.png")
"#,
        csv = csv_path.display().to_string(),
    );
    std::fs::write(script_path, script).map_err(|source| Error::Io {
        path: script_path.display().to_string(),
        source,
    })
}
