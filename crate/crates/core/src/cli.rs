//! Command-line front end.
//!
//! Exit codes: 0 success, 1 other failure, 2 wrong key, 3 malformed frame or
//! a block that never halts, 4 invalid parameters, 5 entropy failure.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::analysis::{self, BenchConfig, BenchOptions, KgpInputs, ParamGuessRange};
use crate::entropy::{PepperDistribution, RandomSource};
use crate::error::{Error, Result};
use crate::init::InitHashes;
use crate::state::{CipherParameter, Key, KeyMaterial, Nonce, KEY_LEN, NONCE_LEN};
use crate::stream::frame::{split_blocks, FrameHeader, FRAMED_BLOCK_LEN, HEADER_LEN};
use crate::stream::{decrypt_stream, encrypt_message, encrypt_stream};

/// Test hook for the entropy source: `seed:<u64>` or `fail`.
pub const ENTROPY_ENV: &str = "FREESTYLE_ENTROPY";

/// PBKDF2-HMAC-SHA256 iterations for `--passphrase`.
pub const PASSPHRASE_ITERATIONS: u32 = 100_000;
const PASSPHRASE_SALT: &[u8] = b"freestyle-passphrase-v1";

pub const EXIT_OK: i32 = 0;
pub const EXIT_OTHER: i32 = 1;
pub const EXIT_WRONG_KEY: i32 = 2;
pub const EXIT_MALFORMED: i32 = 3;
pub const EXIT_INVALID: i32 = 4;
pub const EXIT_ENTROPY: i32 = 5;

#[derive(Debug, Parser)]
#[command(
    name = "freestyle",
    version,
    about = "Randomized variable-round stream cipher and its cost analysis"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Encrypt a file or stdin into a frame.
    Encrypt {
        /// Input path; stdin when absent or `-`.
        input: Option<PathBuf>,
        #[command(flatten)]
        key: KeyArgs,
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        seed: SeedArgs,
        /// Skew the pepper towards small values (truncated geometric, 0 < q < 1).
        #[arg(long)]
        skew_q: Option<f64>,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Decrypt a frame. Nothing is written to `--out` unless decryption succeeds.
    Decrypt {
        input: Option<PathBuf>,
        #[command(flatten)]
        key: KeyArgs,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Show header fields, bootstrap tags and the block map. Needs no key.
    Inspect {
        input: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Key-guessing penalty for given pepper and message statistics.
    Kgp {
        #[arg(long, default_value_t = 20)]
        ic: u8,
        /// Expected pepper; defaults to the mean of the chosen distribution.
        #[arg(long)]
        e_pepper: Option<f64>,
        #[arg(long)]
        skew_q: Option<f64>,
        /// Expected rounds per message block.
        #[arg(long, default_value_t = 20.0)]
        er: f64,
        /// Message blocks.
        #[arg(long, default_value_t = 1)]
        nb: u64,
        #[arg(long)]
        json: bool,
    },
    /// Size of the parameter space an adversary must cover.
    Params {
        #[arg(long, num_args = 2, value_names = ["A", "B"], default_values_t = [8, 32])]
        guess: Vec<u32>,
        #[arg(long)]
        json: bool,
    },
    /// Throughput against ChaCha20 at r_min=8, r_max=32.
    Bench {
        /// Message sizes in bytes.
        #[arg(long, value_delimiter = ',', default_values_t = [16, 256, 4096, 65536])]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 100)]
        sample_ms: u64,
        #[arg(long, default_value_t = 5)]
        samples: usize,
        #[arg(long)]
        json: bool,
    },
    /// Quick correctness checks.
    Selftest,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct KeyArgs {
    /// 32-byte key (or 16 bytes, doubled) as hex.
    #[arg(long)]
    pub key: Option<String>,
    /// File holding a raw 16/32-byte key or its hex encoding.
    #[arg(long)]
    pub key_file: Option<PathBuf>,
    /// Passphrase, stretched with PBKDF2-HMAC-SHA256 salted by the nonce.
    #[arg(long)]
    pub passphrase: Option<String>,
}

#[derive(Debug, Args)]
pub struct ParamArgs {
    #[arg(long, default_value_t = 8)]
    pub rmin: u16,
    #[arg(long, default_value_t = 32)]
    pub rmax: u16,
    #[arg(long, default_value_t = 2)]
    pub hi: u16,
    #[arg(long, default_value_t = 2)]
    pub hc: u8,
    #[arg(long, default_value_t = 20)]
    pub ic: u8,
}

#[derive(Debug, Args)]
pub struct SeedArgs {
    /// Deterministic randomness. Insecure; needs --allow-insecure-seed.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub allow_insecure_seed: bool,
}

enum KeySource {
    Raw(Key),
    Passphrase(String),
}

impl KeySource {
    fn from_args(args: &KeyArgs) -> Result<Self> {
        if let Some(hex) = &args.key {
            return Ok(Self::Raw(parse_hex_key(hex)?));
        }
        if let Some(path) = &args.key_file {
            let bytes = std::fs::read(path)?;
            return match bytes.len() {
                16 | KEY_LEN => Ok(Self::Raw(Key::from_bytes(&bytes)?)),
                _ => Ok(Self::Raw(parse_hex_key(
                    String::from_utf8_lossy(&bytes).trim(),
                )?)),
            };
        }
        match &args.passphrase {
            Some(p) if !p.is_empty() => Ok(Self::Passphrase(p.clone())),
            _ => Err(Error::InvalidParameter("empty passphrase".into())),
        }
    }

    fn key_for(&self, nonce: &Nonce) -> Result<Key> {
        match self {
            Self::Raw(k) => Ok(*k),
            Self::Passphrase(p) => Ok(passphrase_key(p, nonce)),
        }
    }
}

fn parse_hex_key(s: &str) -> Result<Key> {
    let bytes =
        hex::decode(s).map_err(|e| Error::InvalidParameter(format!("key is not hex: {e}")))?;
    Key::from_bytes(&bytes)
}

/// `PBKDF2-HMAC-SHA256(passphrase, "freestyle-passphrase-v1" || nonce, 100000, 32)`.
pub fn passphrase_key(passphrase: &str, nonce: &Nonce) -> Key {
    let mut salt = PASSPHRASE_SALT.to_vec();
    salt.extend_from_slice(&nonce.0);
    let mut out = [0u8; KEY_LEN];
    pbkdf2::pbkdf2_hmac::<sha2::Sha256>(
        passphrase.as_bytes(),
        &salt,
        PASSPHRASE_ITERATIONS,
        &mut out,
    );
    Key::from_bytes(&out).expect("32 bytes")
}

/// Entropy for this invocation: the `FREESTYLE_ENTROPY` override, then a
/// gated `--seed`, then the system source.
fn entropy(seed: Option<&SeedArgs>, stderr: &mut dyn Write) -> Result<RandomSource> {
    if let Ok(v) = std::env::var(ENTROPY_ENV) {
        if v == "fail" {
            return Ok(RandomSource::failing());
        }
        if let Some(n) = v.strip_prefix("seed:") {
            let n = n
                .parse()
                .map_err(|_| Error::InvalidParameter(format!("{ENTROPY_ENV}={v}")))?;
            let _ = writeln!(
                stderr,
                "warning: deterministic entropy from {ENTROPY_ENV}; output is not secure"
            );
            return Ok(RandomSource::seeded(n));
        }
        return Err(Error::InvalidParameter(format!(
            "{ENTROPY_ENV} must be `seed:<n>` or `fail`, got {v:?}"
        )));
    }
    match seed {
        Some(SeedArgs {
            seed: Some(n),
            allow_insecure_seed: true,
        }) => {
            let _ = writeln!(
                stderr,
                "warning: --seed makes encryption deterministic and insecure"
            );
            Ok(RandomSource::seeded(*n))
        }
        Some(SeedArgs {
            seed: Some(_),
            allow_insecure_seed: false,
        }) => Err(Error::InvalidParameter(
            "--seed is refused without --allow-insecure-seed".into(),
        )),
        _ => RandomSource::system(),
    }
}

fn pepper_distribution(skew_q: Option<f64>) -> Result<PepperDistribution> {
    match skew_q {
        None => Ok(PepperDistribution::Uniform),
        Some(q) if q > 0.0 && q < 1.0 => Ok(PepperDistribution::Skewed { q }),
        Some(q) => Err(Error::InvalidParameter(format!(
            "--skew-q {q} must lie in (0, 1)"
        ))),
    }
}

/// Recommendations that are warned about but not enforced.
pub fn parameter_warnings(cp: &CipherParameter) -> Vec<String> {
    let mut w = Vec::new();
    if cp.r_min() < 8 {
        w.push(format!("r_min = {} is below the recommended 8", cp.r_min()));
    }
    let steps = (cp.r_max() - cp.r_min()) / cp.h_i();
    if steps < 3 {
        w.push(format!(
            "(r_max - r_min) / h_i = {steps}; at least 3 is recommended"
        ));
    }
    if cp.i_c() < 20 {
        w.push(format!("i_c = {} is below the recommended 20", cp.i_c()));
    }
    w
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::WrongKey { .. } => EXIT_WRONG_KEY,
        Error::MalformedFrame(_) | Error::BlockHalt { .. } => EXIT_MALFORMED,
        Error::InvalidParameter(_) | Error::InvalidKeyLength(_) | Error::Domain(_) => EXIT_INVALID,
        Error::Entropy(_) => EXIT_ENTROPY,
        Error::CounterOverflow | Error::Io(_) => EXIT_OTHER,
    }
}

fn open_input(path: Option<&Path>) -> Result<Box<dyn Read>> {
    Ok(match path {
        None => Box::new(io::stdin().lock()),
        Some(p) if p == Path::new("-") => Box::new(io::stdin().lock()),
        Some(p) => Box::new(BufReader::new(File::open(p)?)),
    })
}

/// Writes through a temporary file beside `path` and renames it into place
/// only if `f` succeeds, so a failure leaves `path` untouched.
fn write_atomically(path: &Path, f: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let tmp = tempfile::NamedTempFile::new_in(dir)?;
    let mut w = BufWriter::new(tmp);
    f(&mut w)?;
    let tmp = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn encrypt(
    input: Option<&Path>,
    key: &KeyArgs,
    params: &ParamArgs,
    seed: &SeedArgs,
    skew_q: Option<f64>,
    out: Option<&Path>,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<()> {
    let cp = CipherParameter::new(params.rmin, params.rmax, params.hi, params.hc, params.ic)?;
    let dist = pepper_distribution(skew_q)?;
    let source = KeySource::from_args(key)?;
    let _ = writeln!(
        stderr,
        "warning: Freestyle output is not authenticated; pair it with a MAC"
    );
    for w in parameter_warnings(&cp) {
        let _ = writeln!(stderr, "warning: {w}");
    }
    let mut rng = entropy(Some(seed), stderr)?;
    let mut nonce = [0u8; NONCE_LEN];
    rng.fill_bytes(&mut nonce)?;
    let nonce = Nonce(nonce);
    let km = KeyMaterial::new(source.key_for(&nonce)?, nonce);
    let reader = open_input(input)?;
    match out {
        Some(path) => write_atomically(path, |w| {
            encrypt_stream(&km, &cp, &mut rng, dist, reader, w).map(drop)
        }),
        None => encrypt_stream(&km, &cp, &mut rng, dist, reader, BufWriter::new(stdout)).map(drop),
    }
}

fn decrypt(
    input: Option<&Path>,
    key: &KeyArgs,
    out: Option<&Path>,
    stdout: &mut dyn Write,
) -> Result<()> {
    let source = KeySource::from_args(key)?;
    let mut reader = open_input(input)?;
    let header = FrameHeader::read_from(&mut reader)?;
    let key = source.key_for(&header.nonce)?;
    let framed = io::Cursor::new(header.to_bytes()).chain(reader);
    match out {
        Some(path) => write_atomically(path, |w| decrypt_stream(&key, framed, w).map(drop)),
        None => {
            // stdout cannot be rolled back, so hold everything until the end
            let mut buf = Vec::new();
            decrypt_stream(&key, framed, &mut buf)?;
            stdout.write_all(&buf)?;
            Ok(stdout.flush()?)
        }
    }
}

#[derive(Serialize)]
struct InspectBlock {
    index: usize,
    offset: usize,
    len: usize,
    tag: u16,
}

#[derive(Serialize)]
struct InspectReport {
    r_min: u16,
    r_max: u16,
    h_i: u16,
    h_c: u8,
    i_c: u8,
    packed: String,
    nonce: String,
    bootstrap_tags: Vec<u16>,
    payload_bytes: usize,
    blocks: Vec<InspectBlock>,
}

fn inspect(input: Option<&Path>, json: bool, stdout: &mut dyn Write) -> Result<()> {
    let mut bytes = Vec::new();
    open_input(input)?.read_to_end(&mut bytes)?;
    let header = FrameHeader::parse(&bytes)?;
    let blocks: Vec<InspectBlock> = split_blocks(&bytes[HEADER_LEN..])?
        .enumerate()
        .map(|(index, (tag, body))| InspectBlock {
            index,
            offset: HEADER_LEN + index * FRAMED_BLOCK_LEN,
            len: body.len(),
            tag: tag.0,
        })
        .collect();
    let cp = header.parameter;
    let report = InspectReport {
        r_min: cp.r_min(),
        r_max: cp.r_max(),
        h_i: cp.h_i(),
        h_c: cp.h_c(),
        i_c: cp.i_c(),
        packed: format!("{:016x}", cp.pack()),
        nonce: hex::encode(header.nonce.0),
        bootstrap_tags: tag_list(&header.boot),
        payload_bytes: blocks.iter().map(|b| b.len).sum(),
        blocks,
    };
    if json {
        writeln!(
            stdout,
            "{}",
            serde_json::to_string(&report).expect("plain data")
        )?;
        return Ok(());
    }
    writeln!(
        stdout,
        "parameter   r_min={} r_max={} h_i={} h_c={} i_c={} (packed {})",
        report.r_min, report.r_max, report.h_i, report.h_c, report.i_c, report.packed
    )?;
    writeln!(stdout, "nonce       {}", report.nonce)?;
    writeln!(stdout, "round choices per block {}", cp.round_choices())?;
    writeln!(stdout, "bootstrap tags")?;
    for (i, row) in report.bootstrap_tags.chunks(7).enumerate() {
        let cells: Vec<String> = row.iter().map(|t| format!("{t:04x}")).collect();
        writeln!(stdout, "  {:>2}: {}", i * 7, cells.join(" "))?;
    }
    writeln!(
        stdout,
        "blocks      {} ({} payload bytes)",
        report.blocks.len(),
        report.payload_bytes
    )?;
    writeln!(
        stdout,
        "  {:>8} {:>10} {:>4} {:>6}",
        "index", "offset", "len", "tag"
    )?;
    for b in &report.blocks {
        writeln!(
            stdout,
            "  {:>8} {:>10} {:>4} {:>6}",
            b.index,
            b.offset,
            b.len,
            format!("{:04x}", b.tag)
        )?;
    }
    Ok(())
}

fn tag_list(h: &InitHashes) -> Vec<u16> {
    h.0.iter().map(|t| t.0).collect()
}

#[derive(Serialize)]
struct KgpReport {
    i_c: u8,
    e_pepper: f64,
    e_r: f64,
    n_b: u64,
    expected_rounds_wrong: f64,
    kgp: f64,
    kgp_with_false_accept: f64,
    break_even_pepper: f64,
}

fn kgp_report(
    ic: u8,
    e_pepper: Option<f64>,
    skew_q: Option<f64>,
    er: f64,
    nb: u64,
) -> Result<KgpReport> {
    if !(CipherParameter::MIN_PEPPER_BITS..=CipherParameter::MAX_PEPPER_BITS).contains(&ic) {
        return Err(Error::InvalidParameter(format!(
            "i_c = {ic} outside [8, 32]"
        )));
    }
    let e_pepper = match e_pepper {
        Some(e) => e,
        None => pepper_distribution(skew_q)?.mean(ic),
    };
    if !(0.0..(1u64 << ic) as f64).contains(&e_pepper) || !er.is_finite() || er <= 0.0 {
        return Err(Error::InvalidParameter(
            "e_pepper must lie in [0, 2^i_c) and e_r must be positive".into(),
        ));
    }
    let inputs = KgpInputs {
        i_c: ic,
        e_pepper,
        e_r: er,
        n_b: nb,
    };
    Ok(KgpReport {
        i_c: ic,
        e_pepper,
        e_r: er,
        n_b: nb,
        expected_rounds_wrong: analysis::expected_rounds_wrong(),
        kgp: analysis::kgp(&inputs),
        kgp_with_false_accept: analysis::kgp_with_false_accept(&inputs),
        break_even_pepper: analysis::break_even_pepper(ic, er, nb),
    })
}

/// One line per check, in the same PASS/FAIL form as the acceptance suite.
pub fn selftest(out: &mut dyn Write) -> Result<bool> {
    let mut all = true;
    let mut check = |name: &str, ok: bool| -> Result<()> {
        all &= ok;
        writeln!(out, "{} {name}", if ok { "PASS" } else { "FAIL" })?;
        Ok(())
    };

    check(
        "quarter round vector",
        crate::state::quarter_round(0x1111_1111, 0x0102_0304, 0x9b8d_6f43, 0x0123_4567)
            == (0xea2a_92f4, 0xcb1c_f8ce, 0x4581_472e, 0x5881_c4bb),
    )?;

    let mut rng = RandomSource::seeded(1);
    let mut same = true;
    for _ in 0..10 {
        let mut key = [0u8; 32];
        let mut nonce = [0u8; 12];
        rng.fill_bytes(&mut key)?;
        rng.fill_bytes(&mut nonce)?;
        let counter = rng.next_u32()?;
        let km = KeyMaterial::new(Key::from_bytes(&key)?, Nonce(nonce)).with_counter(counter);
        let s0 = crate::state::CipherState::initial(&km, 0, &crate::state::RandomWords::ZERO);
        let mut s = s0;
        for r in 1..=20 {
            s.round(r);
        }
        same &= crate::state::keystream(&s0, &s) == analysis::chacha20_block(&key, &nonce, counter);
    }
    check("20 fixed rounds equal ChaCha20", same)?;

    let cp = CipherParameter::new(8, 32, 2, 2, 8)?;
    let km = KeyMaterial::new(Key::from_bytes(&[9; 32])?, Nonce([3; 12]));
    let mut trip = true;
    for len in [0usize, 1, 63, 64, 65, 1000] {
        let plain: Vec<u8> = (0..len).map(|i| i as u8).collect();
        let msg = encrypt_message(&km, &cp, &plain, &mut rng)?;
        trip &= crate::stream::decrypt_frame(&km.key, &msg.to_bytes())? == plain;
    }
    check("round trip at i_c = 8", trip)?;

    let wrong = Key::from_bytes(&[10; 32])?;
    let msg = encrypt_message(&km, &cp, b"x", &mut rng)?;
    check(
        "wrong key scans every offset",
        matches!(
            crate::stream::decrypt_message(&wrong, &msg),
            Err(Error::WrongKey { offsets: 256 })
        ),
    )?;

    check(
        "expected wrong-key rounds 36.0095",
        (analysis::expected_rounds_wrong() - 36.0095).abs() < 1e-3,
    )?;
    let ceiling = analysis::kgp(&KgpInputs::uniform(32, 20.0, 1));
    check(
        "uniform-pepper penalty near 2",
        (ceiling - 2.0).abs() < 0.02,
    )?;
    check(
        "overhead 3.225% at 1000 blocks",
        (analysis::bandwidth_overhead(512_000)? - 3.225).abs() < 1e-9,
    )?;
    let report = analysis::param_space_count(&ParamGuessRange::new(8, 32)?);
    check(
        "parameter space 42525 by enumeration",
        report.enumerated_matches_claim() == Some(true),
    )?;
    Ok(all)
}

fn execute(cli: Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32> {
    match cli.command {
        Command::Encrypt {
            input,
            key,
            params,
            seed,
            skew_q,
            out,
        } => encrypt(
            input.as_deref(),
            &key,
            &params,
            &seed,
            skew_q,
            out.as_deref(),
            stdout,
            stderr,
        )?,
        Command::Decrypt { input, key, out } => {
            decrypt(input.as_deref(), &key, out.as_deref(), stdout)?
        }
        Command::Inspect { input, json } => inspect(input.as_deref(), json, stdout)?,
        Command::Kgp {
            ic,
            e_pepper,
            skew_q,
            er,
            nb,
            json,
        } => {
            let r = kgp_report(ic, e_pepper, skew_q, er, nb)?;
            if json {
                writeln!(stdout, "{}", serde_json::to_string(&r).expect("plain data"))?;
            } else {
                writeln!(
                    stdout,
                    "i_c {}  E[pepper] {}  E[R] {}  N_b {}",
                    r.i_c, r.e_pepper, r.e_r, r.n_b
                )?;
                writeln!(
                    stdout,
                    "wrong-key rounds per offset  {:.6}",
                    r.expected_rounds_wrong
                )?;
                writeln!(stdout, "key-guessing penalty         {:.6}", r.kgp)?;
                writeln!(
                    stdout,
                    "  with false accept          {:.6}",
                    r.kgp_with_false_accept
                )?;
                writeln!(
                    stdout,
                    "break-even E[pepper]         {:.3}",
                    r.break_even_pepper
                )?;
            }
        }
        Command::Params { guess, json } => {
            let report = analysis::param_space_count(&ParamGuessRange::new(guess[0], guess[1])?);
            if json {
                writeln!(
                    stdout,
                    "{}",
                    serde_json::to_string(&report).expect("plain data")
                )?;
            } else {
                write!(stdout, "{}", report.summary())?;
            }
        }
        Command::Bench {
            sizes,
            sample_ms,
            samples,
            json,
        } => {
            let opts = BenchOptions {
                message_sizes: sizes,
                sample_time: Duration::from_millis(sample_ms),
                samples,
            };
            let report = analysis::bench(&BenchConfig::default_grid(), &opts)?;
            if json {
                write!(stdout, "{}", report.json_lines())?;
            } else {
                write!(stdout, "{}", report.table())?;
            }
        }
        Command::Selftest => {
            if !selftest(stdout)? {
                return Ok(EXIT_OTHER);
            }
        }
    }
    Ok(EXIT_OK)
}

/// Parses `args` and runs the command against the process's stdio.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                EXIT_INVALID
            } else {
                EXIT_OK
            };
        }
    };
    let mut stdout = io::stdout().lock();
    let mut stderr = io::stderr();
    match execute(cli, &mut stdout, &mut stderr) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            exit_code(&e)
        }
    }
}
