//! Throughput comparison against plain ChaCha20.
//!
//! Bootstrap time is excluded: each Freestyle session is built from fixed
//! random words and only the per-block work is timed. Configurations are
//! measured round-robin and the best sample of each is kept, which keeps
//! slow drift on a shared machine from favouring one configuration.

use std::time::{Duration, Instant};

use serde::Serialize;

use super::chacha::chacha20_xor;
use crate::entropy::RandomSource;
use crate::error::Result;
use crate::state::{CipherParameter, Key, KeyMaterial, Nonce, RandomWords};
use crate::stream::{Role, Session};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct BenchConfig {
    pub r_min: u16,
    pub r_max: u16,
    pub h_i: u16,
    pub h_c: u8,
}

impl BenchConfig {
    /// `r_min = 8`, `r_max = 32` over `h_c` in 1..=3 and `h_i` in {1, 2, 4, 8}.
    pub fn default_grid() -> Vec<BenchConfig> {
        let mut v = Vec::new();
        for h_c in 1..=3 {
            for h_i in [1, 2, 4, 8] {
                v.push(BenchConfig {
                    r_min: 8,
                    r_max: 32,
                    h_i,
                    h_c,
                });
            }
        }
        v
    }

    fn parameter(&self) -> Result<CipherParameter> {
        CipherParameter::new(self.r_min, self.r_max, self.h_i, self.h_c, 20)
    }
}

#[derive(Clone, Debug)]
pub struct BenchOptions {
    pub message_sizes: Vec<usize>,
    /// Time spent per sample of one configuration.
    pub sample_time: Duration,
    pub samples: usize,
}

impl Default for BenchOptions {
    fn default() -> Self {
        Self {
            message_sizes: vec![16, 256, 4096, 65536],
            sample_time: Duration::from_millis(100),
            samples: 5,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BenchRow {
    pub cipher: String,
    pub config: Option<BenchConfig>,
    pub message_bytes: usize,
    pub mb_per_s: f64,
    /// ChaCha20 throughput divided by this row's throughput.
    pub slowdown: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
}

impl BenchReport {
    pub fn table(&self) -> String {
        let mut out = format!(
            "{:<28} {:>10} {:>12} {:>9}\n",
            "cipher", "bytes", "MB/s", "slowdown"
        );
        for r in &self.rows {
            out.push_str(&format!(
                "{:<28} {:>10} {:>12.2} {:>9.3}\n",
                r.cipher, r.message_bytes, r.mb_per_s, r.slowdown
            ));
        }
        out
    }

    /// One JSON record per row.
    pub fn json_lines(&self) -> String {
        self.rows
            .iter()
            .map(|r| serde_json::to_string(r).expect("plain data") + "\n")
            .collect()
    }

    pub fn rows_for(&self, message_bytes: usize) -> impl Iterator<Item = &BenchRow> {
        self.rows
            .iter()
            .filter(move |r| r.message_bytes == message_bytes)
    }
}

enum Subject {
    ChaCha20,
    Freestyle(Box<(Session, RandomSource)>),
}

impl Subject {
    fn run(&mut self, buf: &mut [u8]) -> Result<()> {
        match self {
            Subject::ChaCha20 => chacha20_xor(&[0x42; 32], &[0x24; 12], 0, buf),
            Subject::Freestyle(inner) => {
                let (session, rng) = &mut **inner;
                session.seek(0);
                for chunk in buf.chunks_mut(64) {
                    session.encrypt_block(chunk, rng)?;
                }
            }
        }
        Ok(())
    }
}

/// Bytes per second over one sample of roughly `time`.
fn sample(subject: &mut Subject, buf: &mut [u8], time: Duration) -> Result<f64> {
    let start = Instant::now();
    let mut bytes = 0usize;
    loop {
        subject.run(buf)?;
        std::hint::black_box(&buf);
        bytes += buf.len();
        let elapsed = start.elapsed();
        if elapsed >= time {
            return Ok(bytes as f64 / elapsed.as_secs_f64());
        }
    }
}

pub fn bench(configs: &[BenchConfig], opts: &BenchOptions) -> Result<BenchReport> {
    let km = KeyMaterial::new(Key::from_bytes(&[0x42; 32])?, Nonce([0x24; 12]));
    let mut rows = Vec::new();
    for &size in &opts.message_sizes {
        let mut subjects = vec![(String::from("chacha20"), None, Subject::ChaCha20)];
        for c in configs {
            let cp = c.parameter()?;
            let session = Session::from_parts(&km, &cp, RandomWords([1, 2, 3, 4]), Role::Sender);
            let label = format!(
                "freestyle({},{},hi={},hc={})",
                c.r_min, c.r_max, c.h_i, c.h_c
            );
            subjects.push((
                label,
                Some(*c),
                Subject::Freestyle(Box::new((session, RandomSource::seeded(7)))),
            ));
        }
        let mut best = vec![0f64; subjects.len()];
        let mut buf = vec![0u8; size];
        for _ in 0..opts.samples.max(1) {
            for (b, (_, _, subject)) in best.iter_mut().zip(subjects.iter_mut()) {
                *b = b.max(sample(subject, &mut buf, opts.sample_time)?);
            }
        }
        let baseline = best[0];
        for ((label, config, _), rate) in subjects.into_iter().zip(best) {
            rows.push(BenchRow {
                cipher: label,
                config,
                message_bytes: size,
                mb_per_s: rate / 1e6,
                slowdown: baseline / rate,
            });
        }
    }
    Ok(BenchReport { rows })
}
