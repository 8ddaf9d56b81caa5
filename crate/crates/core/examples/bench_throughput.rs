//! Throughput of each (h_c, h_i) configuration against ChaCha20.
//!
//! ```text
//! cargo run --release --example bench_throughput [-- --json]
//! ```

use std::time::Duration;

use freestyle::analysis::{bench, BenchConfig, BenchOptions};

fn main() -> freestyle::Result<()> {
    let opts = BenchOptions {
        sample_time: Duration::from_millis(50),
        ..BenchOptions::default()
    };
    let report = bench(&BenchConfig::default_grid(), &opts)?;
    if std::env::args().any(|a| a == "--json") {
        print!("{}", report.json_lines());
    } else {
        print!("{}", report.table());
    }
    Ok(())
}
