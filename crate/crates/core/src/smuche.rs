//! Scalar-multiplicative caching.
//!
//! The cache holds encryptions of `r^0, r^-1, ..., r^-k`. A plaintext with
//! precision `r^-idx` is built as `z (.) cache[idx]` with
//! `z = round(m * r^idx)`, then re-randomized by adding the encryption of
//! zero `(pk1 * xi, pk2 * xi)` for a fresh ternary `xi`:
//!
//! ```text
//! dec(z (.) c + rnd) = z*m + (z*e1 + s*z*e2 + e*xi)
//! ```
//!
//! Every encryption costs two scalar multiplications, one transform of `xi`,
//! two pointwise products and two additions, whatever the plaintext.

use crate::error::{Error, Result};
use crate::he::{encrypt, Ciphertext, Plaintext, PublicKey};
use crate::ring::{sample_ternary, RandomStream};

/// Relative slack for comparing float precisions against powers of `r`.
const PRECISION_EPS: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct SmuchePivotCache {
    /// `pivots[i]` encrypts `radix^-i` at the ring's encoding scale.
    pivots: Vec<Ciphertext>,
    radix: u64,
    noise_bound: f64,
    quarter_q: u128,
}

impl SmuchePivotCache {
    /// Caches `enc(r^-i)` for every pivot `1, 1/r, ...` down to `delta_inv`,
    /// which must be `r^-k` for some `k >= 0` with `r^k` no larger than the
    /// encoding scale.
    pub fn precompute(pk: &PublicKey, delta_inv: f64, rng: &mut RandomStream) -> Result<Self> {
        let params = pk.ring().params();
        let radix = params.radix;
        let k = radix_exponent(delta_inv, radix).ok_or_else(|| {
            Error::InvalidParams(format!("precision {delta_inv} is not a power of 1/{radix}"))
        })?;
        if (radix as f64).powi(k as i32) > params.delta as f64 {
            return Err(Error::InvalidParams(format!(
                "precision {radix}^-{k} is finer than the encoding scale {}",
                params.delta
            )));
        }

        let mut pivots = Vec::with_capacity(k as usize + 1);
        let mut pivot = 1.0f64;
        for _ in 0..=k {
            pivots.push(encrypt(pk, &Plaintext::new(pivot, params.delta)?, rng)?);
            pivot /= radix as f64;
        }
        Ok(Self {
            pivots,
            radix,
            noise_bound: params.noise_bound(),
            quarter_q: params.quarter_q(),
        })
    }

    pub fn pivots(&self) -> &[Ciphertext] {
        &self.pivots
    }

    pub fn radix(&self) -> u64 {
        self.radix
    }

    pub fn max_idx(&self) -> usize {
        self.pivots.len() - 1
    }

    pub fn scale(&self) -> u128 {
        self.pivots[0].scale()
    }

    /// The scalar `z` and pivot index used for `m` at `precision_inv`.
    pub fn scalar_for(&self, m: f64, precision_inv: f64) -> Result<(usize, i128)> {
        let idx = select_pivot(precision_inv, self.radix, self.max_idx())?;
        let scaled = (m * (self.radix as f64).powi(idx as i32)).round();
        // Keeps the value, and |z| times the pivot noise, below q/4.
        let pivot_coeff = (self.scale() as f64) / (self.radix as f64).powi(idx as i32);
        let limit = (self.quarter_q as f64 / (pivot_coeff + self.noise_bound)).floor();
        if !scaled.is_finite() || scaled.abs() >= limit {
            return Err(Error::ScalarOverflow {
                scalar: if scaled.is_finite() {
                    scaled as i128
                } else {
                    i128::MAX
                },
                limit: limit as u128,
            });
        }
        Ok((idx, scaled as i128))
    }

    /// `m` rounded to the grid the cache encodes it on, `z * r^-idx`.
    pub fn quantize(&self, m: f64, precision_inv: f64) -> Result<f64> {
        let (idx, z) = self.scalar_for(m, precision_inv)?;
        Ok(z as f64 / (self.radix as f64).powi(idx as i32))
    }

    /// `z (.) cache[idx]` for the largest usable pivot. Deterministic.
    pub fn construct(&self, m: f64, precision_inv: f64) -> Result<Ciphertext> {
        let (idx, z) = self.scalar_for(m, precision_inv)?;
        Ok(self.pivots[idx].scalar_mul(z))
    }

    /// Construction followed by randomization.
    pub fn encrypt(
        &self,
        pk: &PublicKey,
        m: f64,
        precision_inv: f64,
        rng: &mut RandomStream,
    ) -> Result<Ciphertext> {
        let cprime = self.construct(m, precision_inv)?;
        randomize(pk, &cprime, rng)
    }
}

/// `cprime + (pk1 * xi, pk2 * xi)` with `xi` ternary.
pub fn randomize(
    pk: &PublicKey,
    cprime: &Ciphertext,
    rng: &mut RandomStream,
) -> Result<Ciphertext> {
    let ring = pk.ring();
    let xi = sample_ternary(ring, rng).into_representation(ring.ciphertext_representation())?;
    let (r1, r2) = pk.mul_pair(&xi)?;
    let rnd = Ciphertext::from_parts(r1, r2, cprime.scale())?;
    cprime.add(&rnd)
}

/// Smallest `idx` with `r^-idx <= precision_inv`; errors when that exceeds
/// `max_idx`.
pub fn select_pivot(precision_inv: f64, r: u64, max_idx: usize) -> Result<usize> {
    if !(precision_inv > 0.0 && precision_inv.is_finite()) {
        return Err(Error::OutOfRange(format!(
            "precision {precision_inv} must be positive"
        )));
    }
    let r = r as f64;
    let mut idx = 0usize;
    let mut pivot = 1.0f64;
    while pivot > precision_inv * (1.0 + PRECISION_EPS) {
        idx += 1;
        pivot /= r;
        if idx > max_idx {
            return Err(Error::OutOfRange(format!(
                "precision {precision_inv} finer than the smallest cached pivot {}^-{max_idx}",
                r
            )));
        }
    }
    Ok(idx)
}

/// `k` such that `value == r^-k`, if any.
pub fn radix_exponent(value: f64, r: u64) -> Option<u32> {
    if !(value > 0.0 && value <= 1.0) || r < 2 {
        return None;
    }
    let mut pivot = 1.0f64;
    for k in 0..=1100u32 {
        if ((pivot - value) / value).abs() <= PRECISION_EPS {
            return Some(k);
        }
        if pivot < value {
            return None;
        }
        pivot /= r as f64;
    }
    None
}

/// Finest power of `1/r` that is not coarser than `step`: `r^-k` with the
/// smallest `k` such that `r^-k <= step`.
pub fn finer_radix_precision(step: f64, r: u64) -> f64 {
    let mut pivot = 1.0f64;
    while pivot > step * (1.0 + PRECISION_EPS) {
        pivot /= r as f64;
    }
    pivot
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::he::{decrypt, keygen, SecretKey};
    use crate::params::Params;
    use crate::ring::{counter, Ring};

    fn setup(seed: u64) -> (PublicKey, SecretKey, RandomStream) {
        let ring = Ring::new(Params::default_profile()).unwrap();
        let mut rng = RandomStream::from_seed(seed);
        let (pk, sk) = keygen(&ring, &mut rng).unwrap();
        (pk, sk, rng)
    }

    #[test]
    fn select_pivot_examples() {
        assert_eq!(select_pivot(0.25, 2, 10).unwrap(), 2);
        assert_eq!(select_pivot(1.0, 2, 10).unwrap(), 0);
        assert_eq!(select_pivot(0.3, 2, 10).unwrap(), 2);
        assert_eq!(select_pivot(5.0, 2, 10).unwrap(), 0);
        assert_eq!(select_pivot(1.0 / 9.0, 3, 10).unwrap(), 2);
        assert!(select_pivot(2f64.powi(-11), 2, 10).is_err());
        assert!(select_pivot(0.0, 2, 10).is_err());
    }

    #[test]
    fn radix_exponents() {
        assert_eq!(radix_exponent(1.0, 2), Some(0));
        assert_eq!(radix_exponent(0.25, 2), Some(2));
        assert_eq!(radix_exponent(2f64.powi(-50), 2), Some(50));
        assert_eq!(radix_exponent(1.0 / 27.0, 3), Some(3));
        assert_eq!(radix_exponent(0.3, 2), None);
        assert_eq!(radix_exponent(0.01, 10), Some(2));
        assert_eq!(radix_exponent(2.0, 2), None);
        assert_eq!(finer_radix_precision(0.01, 2), 2f64.powi(-7));
        assert_eq!(finer_radix_precision(0.25, 2), 0.25);
        assert_eq!(finer_radix_precision(3.0, 2), 1.0);
    }

    #[test]
    fn precompute_examples() {
        let (pk, sk, mut rng) = setup(1);
        let tol = pk.ring().params().tolerance();
        let cache = SmuchePivotCache::precompute(&pk, 0.25, &mut rng).unwrap();
        assert_eq!(cache.pivots().len(), 3);
        assert_eq!(cache.max_idx(), 2);
        for (i, expect) in [1.0, 0.5, 0.25].into_iter().enumerate() {
            let got = decrypt(&sk, &cache.pivots()[i]).unwrap();
            assert!((got - expect).abs() <= tol, "pivot {i}: {got}");
        }
        let single = SmuchePivotCache::precompute(&pk, 1.0, &mut rng).unwrap();
        assert_eq!(single.pivots().len(), 1);
        assert!(SmuchePivotCache::precompute(&pk, 0.3, &mut rng).is_err());
        // Finer than the 2^50 encoding scale.
        assert!(SmuchePivotCache::precompute(&pk, 2f64.powi(-51), &mut rng).is_err());
    }

    #[test]
    fn construct_examples() {
        let (pk, sk, mut rng) = setup(2);
        let tol = pk.ring().params().tolerance();
        let cache = SmuchePivotCache::precompute(&pk, 2f64.powi(-10), &mut rng).unwrap();

        assert_eq!(cache.scalar_for(0.75, 0.25).unwrap(), (2, 3));
        let ct = cache.construct(0.75, 0.25).unwrap();
        assert!((decrypt(&sk, &ct).unwrap() - 0.75).abs() <= 3.0 * tol);

        let one = cache.construct(1.0, 1.0).unwrap();
        assert_eq!(one, cache.pivots()[0]);

        assert_eq!(cache.scalar_for(-2.5, 0.5).unwrap(), (1, -5));
        let neg = cache.construct(-2.5, 0.5).unwrap();
        assert!((decrypt(&sk, &neg).unwrap() + 2.5).abs() <= 5.0 * tol);
    }

    #[test]
    fn construct_rejects_oversized_scalar() {
        let (pk, _, mut rng) = setup(3);
        let cache = SmuchePivotCache::precompute(&pk, 1.0, &mut rng).unwrap();
        assert!(cache.construct(1e12, 1.0).is_ok());
        assert!(matches!(
            cache.construct(1e25, 1.0),
            Err(Error::ScalarOverflow { .. })
        ));
        assert!(cache.construct(f64::INFINITY, 1.0).is_err());
    }

    #[test]
    fn randomize_examples() {
        let (pk, sk, mut rng) = setup(4);
        let tol = pk.ring().params().tolerance();
        let cache = SmuchePivotCache::precompute(&pk, 0.25, &mut rng).unwrap();
        let cprime = cache.construct(3.75, 0.25).unwrap();

        assert_eq!(
            randomize(&pk, &cprime, &mut RandomStream::zeroed()).unwrap(),
            cprime
        );
        let a = randomize(&pk, &cprime, &mut rng).unwrap();
        let b = randomize(&pk, &cprime, &mut rng).unwrap();
        assert_ne!(a, b);
        let base = decrypt(&sk, &cprime).unwrap();
        for c in [&a, &b] {
            assert!((decrypt(&sk, c).unwrap() - base).abs() <= tol);
        }
    }

    #[test]
    fn randomize_op_count() {
        let (pk, _, mut rng) = setup(5);
        let cache = SmuchePivotCache::precompute(&pk, 0.25, &mut rng).unwrap();
        let cprime = cache.construct(1.0, 1.0).unwrap();
        let (_, ops) = counter::measure(|| randomize(&pk, &cprime, &mut rng).unwrap());
        assert_eq!(ops.mul, 2);
        assert_eq!(ops.add, 2);
        assert_eq!(ops.ntt_forward, 1);
        assert_eq!(ops.total(), 5);
    }

    #[test]
    fn encrypt_examples() {
        let (pk, sk, mut rng) = setup(6);
        let tol = pk.ring().params().tolerance();
        let cache = SmuchePivotCache::precompute(&pk, 2f64.powi(-10), &mut rng).unwrap();

        // 2.71 * 2^7 = 346.88 -> z = 347 -> 347 / 128 = 2.7109375.
        let p = 2f64.powi(-7);
        assert_eq!(cache.quantize(2.71, p).unwrap(), 2.7109375);
        let ct = cache.encrypt(&pk, 2.71, p, &mut rng).unwrap();
        assert!((decrypt(&sk, &ct).unwrap() - 2.7109375).abs() <= 347.0 * tol);

        let zero = cache.encrypt(&pk, 0.0, 1.0, &mut rng).unwrap();
        assert!(decrypt(&sk, &zero).unwrap().abs() <= tol);
        assert!(!zero.c1().is_zero() && !zero.c2().is_zero());
    }

    #[test]
    fn encrypt_op_count_is_constant() {
        let (pk, _, mut rng) = setup(7);
        let cache = SmuchePivotCache::precompute(&pk, 2f64.powi(-10), &mut rng).unwrap();
        let counts: Vec<_> = [0.0, 1.0, 1e3, 1e9]
            .into_iter()
            .map(|m| counter::measure(|| cache.encrypt(&pk, m, 1.0, &mut rng).unwrap()).1)
            .collect();
        assert!(counts.windows(2).all(|w| w[0] == w[1]), "{counts:?}");
        assert_eq!(counts[0].scalar_mul, 2);
        assert_eq!(counts[0].mul, 2);
        assert_eq!(counts[0].add, 2);
    }
}
