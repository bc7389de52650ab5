//! Timed, verified encryption runs for CKKS, Rache and Smuche.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use smuche_core::he::{decrypt, encrypt, keygen};
use smuche_core::rache::digit_decompose;
use smuche_core::ring::counter::{self, OpCounts};
use smuche_core::smuche::radix_exponent;
use smuche_core::{
    Ciphertext, Params, Plaintext, PublicKey, RachePivotCache, RandomStream, Ring, SmuchePivotCache,
};

use crate::error::{BenchError, Result};
use crate::workload::Workload;

/// Fewest timing repeats accepted; the reported time is their median.
pub const MIN_REPEAT: usize = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Scheme {
    Ckks,
    Rache,
    Smuche,
}

impl Scheme {
    pub fn label(self) -> &'static str {
        match self {
            Scheme::Ckks => "CkksEnc",
            Scheme::Rache => "RacheEnc",
            Scheme::Smuche => "SmucheEnc",
        }
    }

    fn stream_id(self) -> u64 {
        match self {
            Scheme::Ckks => 10,
            Scheme::Rache => 20,
            Scheme::Smuche => 30,
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::Ckks => "ckks",
            Scheme::Rache => "rache",
            Scheme::Smuche => "smuche",
        })
    }
}

impl FromStr for Scheme {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "ckks" => Ok(Scheme::Ckks),
            "rache" => Ok(Scheme::Rache),
            "smuche" => Ok(Scheme::Smuche),
            other => Err(BenchError::Usage(format!(
                "unknown scheme {other:?} (expected ckks, rache or smuche)"
            ))),
        }
    }
}

/// Parses `ckks,rache,smuche`.
pub fn parse_schemes(list: &str) -> Result<Vec<Scheme>> {
    let mut out = Vec::new();
    for s in list.split(',').filter(|s| !s.trim().is_empty()) {
        let scheme = s.parse()?;
        if !out.contains(&scheme) {
            out.push(scheme);
        }
    }
    if out.is_empty() {
        return Err(BenchError::Usage("no schemes given".into()));
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct BenchConfig {
    pub schemes: Vec<Scheme>,
    pub params: Params,
    /// Rache cache sizes to sweep. Empty picks the smallest size that holds
    /// the largest message.
    pub n_pivots: Vec<usize>,
    /// Message counts to sweep. Empty means the whole workload once.
    pub message_counts: Vec<usize>,
    pub repeat: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum RowStatus {
    Passed,
    Failed(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchRow {
    pub scheme: Scheme,
    pub n_pivot: Option<usize>,
    pub message_count: usize,
    /// Median over the repeats of the whole encryption loop.
    pub total_ms: f64,
    pub per_message_ms: f64,
    pub ring_ops: OpCounts,
    pub max_abs_decrypt_error: f64,
    pub status: RowStatus,
}

impl BenchRow {
    pub fn passed(&self) -> bool {
        self.status == RowStatus::Passed
    }

    fn failed(scheme: Scheme, n_pivot: Option<usize>, message_count: usize, why: String) -> Self {
        BenchRow {
            scheme,
            n_pivot,
            message_count,
            total_ms: 0.0,
            per_message_ms: 0.0,
            ring_ops: OpCounts::default(),
            max_abs_decrypt_error: 0.0,
            status: RowStatus::Failed(why),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchReport {
    pub workload: String,
    pub params: Params,
    pub seed: u64,
    pub repeat: usize,
    pub rows: Vec<BenchRow>,
}

impl BenchReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(BenchRow::passed)
    }

    /// `row.total_ms` over the passing CKKS row with the same message count.
    pub fn ratio_over_ckks(&self, row: &BenchRow) -> Option<f64> {
        let base = self.rows.iter().find(|r| {
            r.scheme == Scheme::Ckks && r.message_count == row.message_count && r.passed()
        })?;
        (row.passed() && base.total_ms > 0.0).then(|| row.total_ms / base.total_ms)
    }
}

/// Encrypts every message of every configuration `repeat` times on this
/// thread. Only the encryption loop is timed; keys and caches are built
/// beforehand. Each ciphertext is then decrypted and compared with its
/// plaintext.
pub fn run_benchmark(config: &BenchConfig, workload: &Workload) -> Result<BenchReport> {
    if config.repeat < MIN_REPEAT {
        return Err(BenchError::Usage(format!(
            "repeat must be at least {MIN_REPEAT}, got {}",
            config.repeat
        )));
    }
    if config.schemes.is_empty() {
        return Err(BenchError::Usage("no schemes given".into()));
    }
    if workload.is_empty() {
        return Err(BenchError::Dataset("empty workload".into()));
    }
    if config.message_counts.contains(&0) {
        return Err(BenchError::Usage("message counts must be positive".into()));
    }
    let params = &config.params;
    let radix = params.radix;
    let precision_k = radix_exponent(workload.precision_inv, radix).ok_or_else(|| {
        BenchError::Usage(format!(
            "workload precision {} is not a power of 1/{radix}",
            workload.precision_inv
        ))
    })?;

    let ring = Ring::new(params.clone())?;
    let (pk, sk) = keygen(&ring, &mut RandomStream::for_stream(config.seed, 0))?;
    let tol = params.tolerance();

    let smuche = if config.schemes.contains(&Scheme::Smuche) {
        let mut rng = RandomStream::for_stream(config.seed, 1);
        Some(SmuchePivotCache::precompute(
            &pk,
            workload.precision_inv,
            &mut rng,
        )?)
    } else {
        None
    };

    let counts = if config.message_counts.is_empty() {
        vec![workload.len()]
    } else {
        config.message_counts.clone()
    };

    let mut rows = Vec::new();
    for &count in &counts {
        let messages = workload.take_cycled(count);
        for &scheme in &config.schemes {
            match scheme {
                Scheme::Ckks => {
                    let delta = params.delta;
                    rows.push(measure_row(
                        config,
                        scheme,
                        None,
                        &messages,
                        |m, rng| encrypt(&pk, &Plaintext::new(m, delta)?, rng),
                        |m| Some((m, tol)),
                        &sk,
                    ));
                }
                Scheme::Smuche => {
                    let cache = smuche.as_ref().expect("cache built above");
                    let p = workload.precision_inv;
                    rows.push(measure_row(
                        config,
                        scheme,
                        None,
                        &messages,
                        |m, rng| cache.encrypt(&pk, m, p, rng),
                        |m| {
                            let (idx, z) = cache.scalar_for(m, p).ok()?;
                            let exact = z as f64 / (radix as f64).powi(idx as i32);
                            Some((exact, z.unsigned_abs().max(1) as f64 * tol))
                        },
                        &sk,
                    ));
                }
                Scheme::Rache => {
                    let sizes = if config.n_pivots.is_empty() {
                        vec![auto_n_pivot(&messages, workload.precision_inv, radix)]
                    } else {
                        config.n_pivots.clone()
                    };
                    for n_pivot in sizes {
                        rows.push(rache_row(config, &pk, &sk, n_pivot, precision_k, &messages));
                    }
                }
            }
        }
    }

    Ok(BenchReport {
        workload: workload.name.clone(),
        params: params.clone(),
        seed: config.seed,
        repeat: config.repeat,
        rows,
    })
}

fn rache_row(
    config: &BenchConfig,
    pk: &PublicKey,
    sk: &smuche_core::SecretKey,
    n_pivot: usize,
    precision_k: u32,
    messages: &[f64],
) -> BenchRow {
    let params = &config.params;
    let tol = params.tolerance();
    let mut rng = RandomStream::for_stream(config.seed, 2 + n_pivot as u64);
    let cache = match RachePivotCache::precompute(pk, n_pivot, &mut rng) {
        Ok(c) => c,
        Err(e) => {
            return BenchRow::failed(Scheme::Rache, Some(n_pivot), messages.len(), e.to_string())
        }
    };
    let step = (params.radix as f64).powi(precision_k as i32);
    let Some(scale) = (params.radix as u128)
        .checked_pow(precision_k)
        .and_then(|t| t.checked_mul(params.delta))
    else {
        return BenchRow::failed(
            Scheme::Rache,
            Some(n_pivot),
            messages.len(),
            "precision too fine for the encoding scale".into(),
        );
    };
    // Fractional values are encrypted as the integer m * r^k and relabelled
    // to scale delta * r^k.
    measure_row(
        config,
        Scheme::Rache,
        Some(n_pivot),
        messages,
        |m, rng| {
            let z = (m * step).round() as i128;
            cache.encrypt_signed(z, rng)?.with_scale(scale)
        },
        |m| Some(((m * step).round() / step, tol)),
        sk,
    )
}

/// Smallest cache that holds every quantized message: one pivot per digit
/// plus the top pivot used by randomization.
fn auto_n_pivot(messages: &[f64], precision_inv: f64, radix: u64) -> usize {
    let max = messages
        .iter()
        .map(|m| (m / precision_inv).round().abs())
        .fold(0.0f64, f64::max);
    let digits = digit_decompose(max as u128, radix, 128).map_or(127, |d| d.len());
    (digits + 1).max(2)
}

fn measure_row(
    config: &BenchConfig,
    scheme: Scheme,
    n_pivot: Option<usize>,
    messages: &[f64],
    mut enc: impl FnMut(f64, &mut RandomStream) -> smuche_core::Result<Ciphertext>,
    expected: impl Fn(f64) -> Option<(f64, f64)>,
    sk: &smuche_core::SecretKey,
) -> BenchRow {
    let count = messages.len();
    let mut times = Vec::with_capacity(config.repeat);
    let mut ops = OpCounts::default();
    let mut cts = Vec::with_capacity(count);
    for rep in 0..config.repeat {
        // Same stream every repeat, so each repeat does identical work.
        let mut rng = RandomStream::for_stream(config.seed, scheme.stream_id());
        cts.clear();
        let start = Instant::now();
        let (res, counted) = counter::measure(|| -> smuche_core::Result<()> {
            for &m in messages {
                cts.push(enc(m, &mut rng)?);
            }
            Ok(())
        });
        let elapsed = start.elapsed().as_secs_f64() * 1e3;
        if let Err(e) = res {
            return BenchRow::failed(scheme, n_pivot, count, e.to_string());
        }
        if rep == 0 {
            ops = counted;
        }
        times.push(elapsed);
    }
    times.sort_by(f64::total_cmp);
    let total_ms = median(&times);

    let mut max_err = 0.0f64;
    let mut status = RowStatus::Passed;
    for (&m, ct) in messages.iter().zip(&cts) {
        let Some((want, bound)) = expected(m) else {
            status = RowStatus::Failed(format!("no reference value for {m}"));
            break;
        };
        let got = match decrypt(sk, ct) {
            Ok(v) => v,
            Err(e) => {
                status = RowStatus::Failed(e.to_string());
                break;
            }
        };
        let err = (got - want).abs();
        max_err = max_err.max(err);
        if err > bound && status == RowStatus::Passed {
            status = RowStatus::Failed(format!(
                "decrypted {got} for {want}: error {err:e} above {bound:e}"
            ));
        }
    }

    BenchRow {
        scheme,
        n_pivot,
        message_count: count,
        total_ms,
        per_message_ms: total_ms / count as f64,
        ring_ops: ops,
        max_abs_decrypt_error: max_err,
        status,
    }
}

/// Median of sorted, non-empty samples.
fn median(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::workload::{gen_synthetic, Source};

    fn config(schemes: Vec<Scheme>) -> BenchConfig {
        BenchConfig {
            schemes,
            params: Params::default_profile().with_seed(3),
            n_pivots: vec![],
            message_counts: vec![],
            repeat: MIN_REPEAT,
            seed: 3,
        }
    }

    #[test]
    fn scheme_parsing() {
        assert_eq!(
            parse_schemes("ckks, Smuche,ckks").unwrap(),
            vec![Scheme::Ckks, Scheme::Smuche]
        );
        assert!(parse_schemes("bfv").is_err());
        assert!(parse_schemes("").is_err());
    }

    #[test]
    fn median_examples() {
        assert_eq!(median(&[1.0, 2.0, 9.0]), 2.0);
        assert_eq!(median(&[1.0, 2.0, 4.0, 9.0]), 3.0);
    }

    #[test]
    fn auto_n_pivot_examples() {
        assert_eq!(auto_n_pivot(&[0.0], 1.0, 2), 2);
        assert_eq!(auto_n_pivot(&[13.0, 2.0], 1.0, 2), 5);
        // 3.75 at step 0.25 is the integer 15: four digits.
        assert_eq!(auto_n_pivot(&[3.75], 0.25, 2), 5);
    }

    #[test]
    fn all_schemes_pass_on_small_workload() {
        let w = gen_synthetic("uniform(-50,50)", 12, 1, 2).unwrap();
        let report = run_benchmark(
            &config(vec![Scheme::Ckks, Scheme::Rache, Scheme::Smuche]),
            &w,
        )
        .unwrap();
        assert_eq!(report.rows.len(), 3);
        assert!(report.passed(), "{:?}", report.rows);
        for row in &report.rows {
            assert_eq!(row.message_count, 12);
            assert!(row.ring_ops.total() > 0);
            assert!((row.per_message_ms - row.total_ms / 12.0).abs() < 1e-12);
        }
    }

    #[test]
    fn op_counts_are_reproducible() {
        let w = gen_synthetic("integers(0,1000)", 8, 5, 2).unwrap();
        let cfg = BenchConfig {
            n_pivots: vec![12],
            ..config(vec![Scheme::Rache, Scheme::Smuche])
        };
        let a = run_benchmark(&cfg, &w).unwrap();
        let b = run_benchmark(&cfg, &w).unwrap();
        let ops = |r: &BenchReport| r.rows.iter().map(|x| x.ring_ops).collect::<Vec<_>>();
        assert_eq!(ops(&a), ops(&b));
    }

    #[test]
    fn rache_range_error_is_a_failed_row() {
        let w = Workload {
            name: "big".into(),
            values: vec![1000.0],
            precision_inv: 1.0,
            source: Source::Synthetic,
            skipped: 0,
        };
        let cfg = BenchConfig {
            n_pivots: vec![4, 12],
            ..config(vec![Scheme::Rache, Scheme::Smuche])
        };
        let report = run_benchmark(&cfg, &w).unwrap();
        assert!(!report.rows[0].passed());
        assert!(report.rows[1].passed());
        assert!(report.rows[2].passed());
        assert!(!report.passed());
    }

    #[test]
    fn rejects_short_repeat() {
        let w = gen_synthetic("uniform(0,1)", 4, 1, 2).unwrap();
        let cfg = BenchConfig {
            repeat: 2,
            ..config(vec![Scheme::Ckks])
        };
        assert!(matches!(run_benchmark(&cfg, &w), Err(BenchError::Usage(_))));
    }
}
