//! Benchmark inputs: a column of a CSV file or a seeded synthetic draw.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::error::{BenchError, Result};

/// Fractional radix digits kept by `uniform(lo,hi)` workloads.
pub const UNIFORM_FRACTION_DIGITS: u32 = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Source {
    Csv,
    Synthetic,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Workload {
    pub name: String,
    pub values: Vec<f64>,
    /// Finest fractional step of any value, a power of `1/radix`.
    pub precision_inv: f64,
    pub source: Source,
    /// Rows whose cell did not parse as a number.
    pub skipped: usize,
}

impl Workload {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// The first `count` values, wrapping around when the workload is
    /// shorter.
    pub fn take_cycled(&self, count: usize) -> Vec<f64> {
        self.values.iter().copied().cycle().take(count).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |a, v| a.max(v.abs()))
    }
}

/// Loads one column, selected by header name or zero-based index.
pub fn load_dataset(path: &Path, column: &str, radix: u64) -> Result<Workload> {
    let file = std::fs::File::open(path).map_err(|e| BenchError::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(file);
    let csv_err = |source| BenchError::Csv {
        path: path.to_path_buf(),
        source,
    };
    let headers = reader.headers().map_err(csv_err)?.clone();
    let idx = headers
        .iter()
        .position(|h| h.trim() == column)
        .or_else(|| column.parse::<usize>().ok().filter(|&i| i < headers.len()))
        .ok_or_else(|| {
            BenchError::Dataset(format!(
                "{}: no column {column:?} (have {:?})",
                path.display(),
                headers.iter().collect::<Vec<_>>()
            ))
        })?;

    let mut values = Vec::new();
    let mut max_k = 0u32;
    let mut skipped = 0usize;
    for record in reader.records() {
        let record = record.map_err(csv_err)?;
        let cell = record.get(idx).unwrap_or("").trim();
        match parse_cell(cell) {
            Some(v) => {
                max_k = max_k.max(radix_places(v, decimal_places(cell), radix));
                values.push(v);
            }
            None => skipped += 1,
        }
    }
    if values.is_empty() {
        return Err(BenchError::Dataset(format!(
            "{}: column {column:?} has no numeric rows",
            path.display()
        )));
    }
    Ok(Workload {
        name: format!(
            "{}:{column}",
            path.file_name().map_or_else(
                || path.display().to_string(),
                |f| f.to_string_lossy().into_owned()
            )
        ),
        values,
        precision_inv: (radix as f64).powi(-(max_k as i32)),
        source: Source::Csv,
        skipped,
    })
}

fn parse_cell(cell: &str) -> Option<f64> {
    cell.parse::<f64>().ok().filter(|v| v.is_finite())
}

/// Digits after the decimal point, adjusted for an exponent suffix.
fn decimal_places(cell: &str) -> u32 {
    let (mantissa, exp) = match cell.find(['e', 'E']) {
        Some(i) => (&cell[..i], cell[i + 1..].parse::<i64>().unwrap_or(0)),
        None => (cell, 0),
    };
    let frac = mantissa
        .split_once('.')
        .map_or(0, |(_, f)| f.trim_end_matches('0').len() as i64);
    (frac - exp).max(0) as u32
}

/// Smallest `k` with `v * r^k` integral, capped at the radix digits needed
/// to resolve `d` decimal places.
fn radix_places(v: f64, d: u32, r: u64) -> u32 {
    let cap = (d as f64 * 10f64.ln() / (r as f64).ln()).ceil() as u32;
    let mut x = v;
    for k in 0..cap {
        if x.fract() == 0.0 {
            return k;
        }
        x *= r as f64;
    }
    cap
}

/// Parses `uniform(lo,hi)` or `integers(lo,hi)`. Bounds accept `10^12` and
/// `1e12` forms.
pub fn gen_synthetic(spec: &str, count: usize, seed: u64, radix: u64) -> Result<Workload> {
    if count == 0 {
        return Err(BenchError::Usage(
            "synthetic workload needs count >= 1".into(),
        ));
    }
    let bad = || {
        BenchError::Usage(format!(
            "bad synthetic spec {spec:?}: expected uniform(lo,hi) or integers(lo,hi)"
        ))
    };
    let spec_trim = spec.replace(' ', "");
    let (kind, rest) = spec_trim.split_once('(').ok_or_else(bad)?;
    let args = rest.strip_suffix(')').ok_or_else(bad)?;
    let (lo, hi) = args.split_once(',').ok_or_else(bad)?;
    let (lo, hi) = (
        parse_bound(lo).ok_or_else(bad)?,
        parse_bound(hi).ok_or_else(bad)?,
    );
    if lo >= hi {
        return Err(bad());
    }

    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let (values, precision_inv) = match kind {
        "uniform" => {
            let step = (radix as f64).powi(UNIFORM_FRACTION_DIGITS as i32);
            let values = (0..count)
                .map(|_| {
                    let v = (rng.random_range(lo..hi) * step).floor() / step;
                    v.max(lo)
                })
                .collect();
            (values, 1.0 / step)
        }
        "integers" => {
            let (lo, hi) = (lo.ceil() as i128, hi.floor() as i128);
            if lo >= hi {
                return Err(bad());
            }
            let values = (0..count)
                .map(|_| rng.random_range(lo..hi) as f64)
                .collect();
            (values, 1.0)
        }
        _ => return Err(bad()),
    };
    Ok(Workload {
        name: format!("{spec_trim}:{count}"),
        values,
        precision_inv,
        source: Source::Synthetic,
        skipped: 0,
    })
}

fn parse_bound(s: &str) -> Option<f64> {
    let v = match s.split_once('^') {
        Some((b, e)) => b.parse::<f64>().ok()?.powf(e.parse::<f64>().ok()?),
        None => s.parse::<f64>().ok()?,
    };
    v.is_finite().then_some(v)
}

/// Splits a CLI `SPEC:COUNT` argument.
pub fn parse_synthetic_arg(arg: &str) -> Result<(String, usize)> {
    let (spec, count) = arg
        .rsplit_once(':')
        .ok_or_else(|| BenchError::Usage(format!("expected SPEC:COUNT, got {arg:?}")))?;
    let count = count
        .trim()
        .parse()
        .map_err(|_| BenchError::Usage(format!("bad count in {arg:?}")))?;
    Ok((spec.to_string(), count))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimal_places_examples() {
        assert_eq!(decimal_places("1.5"), 1);
        assert_eq!(decimal_places("2.250"), 2);
        assert_eq!(decimal_places("3"), 0);
        assert_eq!(decimal_places("1.25e1"), 1);
        assert_eq!(decimal_places("5e-3"), 3);
    }

    #[test]
    fn radix_places_examples() {
        assert_eq!(radix_places(1.5, 1, 2), 1);
        assert_eq!(radix_places(2.25, 2, 2), 2);
        assert_eq!(radix_places(3.0, 0, 2), 0);
        // 0.1 has no finite binary form: capped at ceil(log2 10) = 4.
        assert_eq!(radix_places(0.1, 1, 2), 4);
        assert_eq!(radix_places(0.01, 2, 10), 2);
    }

    #[test]
    fn synthetic_bounds() {
        assert_eq!(parse_bound("10^12"), Some(1e12));
        assert_eq!(parse_bound("1e3"), Some(1000.0));
        assert_eq!(parse_bound("x"), None);
        assert_eq!(
            parse_synthetic_arg("uniform(0,1):40").unwrap(),
            ("uniform(0,1)".to_string(), 40)
        );
        assert!(parse_synthetic_arg("uniform(0,1)").is_err());
    }
}
