use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::Rng;

use smuche_bench::error::{BenchError, Result};
use smuche_bench::workload::parse_synthetic_arg;
use smuche_bench::{
    emit_report, gen_synthetic, load_dataset, run_benchmark, BenchConfig, Format, Scheme,
};
use smuche_core::he::{decrypt, encrypt, keygen};
use smuche_core::serialize::{
    ciphertext_from_bytes, ciphertext_to_bytes, params_from_bytes, params_to_bytes,
    public_key_from_bytes, public_key_to_bytes, secret_key_from_bytes, secret_key_to_bytes,
};
use smuche_core::smuche::{finer_radix_precision, radix_exponent};
use smuche_core::{
    Params, Plaintext, PublicKey, RachePivotCache, RandomStream, Ring, SecretKey, SmuchePivotCache,
};

const PARAMS_FILE: &str = "params.bin";
const PUBLIC_KEY_FILE: &str = "pk.bin";
const SECRET_KEY_FILE: &str = "sk.bin";

#[derive(Parser)]
#[command(name = "smuche", version, about = "Cached RLWE encryption benchmarks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a key pair and write params.bin, pk.bin and sk.bin to DIR.
    Keygen {
        #[arg(long, value_enum, default_value_t = Profile::Default)]
        profile: Profile,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        radix: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Time and verify encryption of a workload.
    Bench(BenchArgs),
    /// Encrypt one value with the keys in DIR.
    Enc {
        #[arg(long)]
        scheme: String,
        #[arg(long, allow_hyphen_values = true)]
        value: f64,
        /// Fractional step; rounded down to a power of 1/radix.
        #[arg(long, default_value_t = 1.0)]
        precision: f64,
        /// Rache cache size. Defaults to the smallest that fits the value.
        #[arg(long)]
        npivot: Option<usize>,
        #[arg(long)]
        keys: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Decrypt a ciphertext file and print the value.
    Dec {
        #[arg(long)]
        keys: PathBuf,
        #[arg(long = "in")]
        input: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Profile {
    Default,
    Desk,
}

impl Profile {
    fn params(self) -> Params {
        match self {
            Profile::Default => Params::default_profile(),
            Profile::Desk => Params::desk(),
        }
    }
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, default_value = "ckks,rache,smuche")]
    schemes: String,
    /// Rache cache sizes, comma separated.
    #[arg(long, value_delimiter = ',')]
    npivot: Vec<usize>,
    /// Message counts, comma separated. Defaults to the workload size.
    #[arg(long, value_delimiter = ',')]
    messages: Vec<usize>,
    #[arg(long, conflicts_with = "synthetic", requires = "column")]
    dataset: Option<PathBuf>,
    #[arg(long)]
    column: Option<String>,
    /// e.g. `uniform(0,1):1000` or `integers(0,10^12):1086`.
    #[arg(long)]
    synthetic: Option<String>,
    #[arg(long, default_value_t = 2)]
    radix: u64,
    #[arg(long, default_value_t = 5)]
    repeat: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Profile::Default)]
    profile: Profile,
    #[arg(long, default_value = "markdown")]
    format: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Keygen {
            profile,
            seed,
            radix,
            out,
        } => cmd_keygen(profile, seed, radix, &out),
        Command::Bench(args) => cmd_bench(args),
        Command::Enc {
            scheme,
            value,
            precision,
            npivot,
            keys,
            out,
            seed,
        } => cmd_enc(&scheme, value, precision, npivot, &keys, &out, seed),
        Command::Dec { keys, input } => cmd_dec(&keys, &input),
    }
}

fn read(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(|e| BenchError::io(path, e))
}

fn write(path: &Path, bytes: &[u8]) -> Result<()> {
    std::fs::write(path, bytes).map_err(|e| BenchError::io(path, e))
}

fn cmd_keygen(profile: Profile, seed: u64, radix: Option<u64>, out: &Path) -> Result<()> {
    let mut params = profile.params().with_seed(seed);
    if let Some(r) = radix {
        params = params.with_radix(r);
    }
    let ring = Ring::new(params.clone())?;
    let (pk, sk) = keygen(&ring, &mut RandomStream::from_seed(seed))?;
    std::fs::create_dir_all(out).map_err(|e| BenchError::io(out, e))?;
    write(&out.join(PARAMS_FILE), &params_to_bytes(&params))?;
    write(&out.join(PUBLIC_KEY_FILE), &public_key_to_bytes(&pk))?;
    write(&out.join(SECRET_KEY_FILE), &secret_key_to_bytes(&sk))?;
    println!("wrote keys for N={} to {}", params.n, out.display());
    Ok(())
}

fn load_ring(dir: &Path) -> Result<std::sync::Arc<Ring>> {
    let params = params_from_bytes(&read(&dir.join(PARAMS_FILE))?)?;
    Ok(Ring::new(params)?)
}

fn load_public(dir: &Path) -> Result<PublicKey> {
    let ring = load_ring(dir)?;
    Ok(public_key_from_bytes(
        &read(&dir.join(PUBLIC_KEY_FILE))?,
        &ring,
    )?)
}

fn load_secret(dir: &Path) -> Result<SecretKey> {
    let ring = load_ring(dir)?;
    Ok(secret_key_from_bytes(
        &read(&dir.join(SECRET_KEY_FILE))?,
        &ring,
    )?)
}

fn cmd_bench(args: BenchArgs) -> Result<()> {
    let schemes = smuche_bench::runner::parse_schemes(&args.schemes)?;
    let format: Format = args.format.parse()?;
    if args.radix < 2 {
        return Err(BenchError::Usage("radix must be at least 2".into()));
    }
    let workload = match (&args.dataset, &args.synthetic) {
        (Some(path), None) => {
            let column = args.column.as_deref().unwrap_or_default();
            load_dataset(path, column, args.radix)?
        }
        (None, Some(spec)) => {
            let (spec, count) = parse_synthetic_arg(spec)?;
            gen_synthetic(&spec, count, args.seed, args.radix)?
        }
        _ => {
            return Err(BenchError::Usage(
                "give either --dataset PATH --column NAME or --synthetic SPEC:COUNT".into(),
            ))
        }
    };
    if workload.skipped > 0 {
        eprintln!("warning: skipped {} unparseable rows", workload.skipped);
    }

    let config = BenchConfig {
        schemes,
        params: args
            .profile
            .params()
            .with_radix(args.radix)
            .with_seed(args.seed),
        n_pivots: args.npivot,
        message_counts: args.messages,
        repeat: args.repeat,
        seed: args.seed,
    };
    let report = run_benchmark(&config, &workload)?;
    let text = emit_report(&report, format);
    match &args.out {
        Some(path) => write(path, text.as_bytes())?,
        None => print!("{text}"),
    }
    if report.passed() {
        Ok(())
    } else {
        let failed = report.rows.iter().filter(|r| !r.passed()).count();
        Err(BenchError::Correctness(format!(
            "{failed} configuration(s) failed"
        )))
    }
}

fn cmd_enc(
    scheme: &str,
    value: f64,
    precision: f64,
    npivot: Option<usize>,
    keys: &Path,
    out: &Path,
    seed: Option<u64>,
) -> Result<()> {
    let scheme: Scheme = scheme.parse()?;
    if !(precision > 0.0 && precision.is_finite()) {
        return Err(BenchError::Usage(format!(
            "precision {precision} must be positive"
        )));
    }
    if !value.is_finite() {
        return Err(BenchError::Usage(format!("value {value} is not finite")));
    }
    let pk = load_public(keys)?;
    let params = pk.ring().params().clone();
    let seed = seed.unwrap_or_else(|| rand::rng().random());
    let mut rng = RandomStream::from_seed(seed);
    let p = finer_radix_precision(precision.min(1.0), params.radix);

    let ct = match scheme {
        Scheme::Ckks => encrypt(&pk, &Plaintext::new(value, params.delta)?, &mut rng)?,
        Scheme::Smuche => {
            let cache = SmuchePivotCache::precompute(&pk, p, &mut rng)?;
            cache.encrypt(&pk, value, p, &mut rng)?
        }
        Scheme::Rache => {
            let k = radix_exponent(p, params.radix).expect("power of 1/radix");
            let step = (params.radix as f64).powi(k as i32);
            let z = (value * step).round();
            if z.abs() >= 2f64.powi(100) {
                return Err(BenchError::Usage(format!(
                    "value {value} too large for Rache"
                )));
            }
            let z = z as i128;
            let digits =
                smuche_core::rache::digit_decompose(z.unsigned_abs(), params.radix, 128)?.len();
            let n_pivot = npivot.unwrap_or((digits + 1).max(2));
            let cache = RachePivotCache::precompute(&pk, n_pivot, &mut rng)?;
            let scale = (params.radix as u128)
                .checked_pow(k)
                .and_then(|t| t.checked_mul(params.delta))
                .ok_or_else(|| BenchError::Usage("precision too fine".into()))?;
            cache.encrypt_signed(z, &mut rng)?.with_scale(scale)?
        }
    };
    write(out, &ciphertext_to_bytes(&ct))?;
    Ok(())
}

fn cmd_dec(keys: &Path, input: &Path) -> Result<()> {
    let sk = load_secret(keys)?;
    let ct = ciphertext_from_bytes(&read(input)?, sk.ring())?;
    println!("{}", decrypt(&sk, &ct)?);
    Ok(())
}
