//! Radix-additive caching: encrypt the powers `r^i` once, then build a
//! ciphertext of an integer from its base-`r` digits and mask it with random
//! encryptions of zero of the form `c_{i+1} - r * c_i`.
//!
//! Both construction and randomization touch one pivot per digit, so the
//! cost of an encryption grows with the magnitude of the plaintext.

use crate::error::{Error, Result};
use crate::he::{encrypt_integer, Ciphertext, PublicKey};
use crate::ring::RandomStream;

#[derive(Clone, Debug)]
pub struct RachePivotCache {
    /// `pivots[i]` encrypts `radix^i` at the ring's encoding scale.
    pivots: Vec<Ciphertext>,
    radix: u64,
}

impl RachePivotCache {
    /// Encrypts `r^0 .. r^(n_pivot - 1)` with the radix from the key's
    /// parameters.
    pub fn precompute(pk: &PublicKey, n_pivot: usize, rng: &mut RandomStream) -> Result<Self> {
        let params = pk.ring().params();
        let radix = params.radix;
        if n_pivot < 2 {
            return Err(Error::InvalidParams(format!(
                "n_pivot = {n_pivot}: randomization needs at least two pivots"
            )));
        }
        checked_pow(radix, n_pivot - 1)
            .and_then(|t| t.checked_mul(params.delta))
            .filter(|&t| t < params.quarter_q())
            .ok_or_else(|| {
                Error::InvalidParams(format!(
                    "top pivot {radix}^{} overflows q/4 at scale {}",
                    n_pivot - 1,
                    params.delta
                ))
            })?;

        let mut pivots = Vec::with_capacity(n_pivot);
        let mut power: u128 = 1;
        for i in 0..n_pivot {
            if i > 0 {
                power *= radix as u128;
            }
            pivots.push(encrypt_integer(pk, power as i128, params.delta, rng)?);
        }
        Ok(Self { pivots, radix })
    }

    pub fn pivots(&self) -> &[Ciphertext] {
        &self.pivots
    }

    pub fn radix(&self) -> u64 {
        self.radix
    }

    pub fn n_pivot(&self) -> usize {
        self.pivots.len()
    }

    pub fn scale(&self) -> u128 {
        self.pivots[0].scale()
    }

    /// Exclusive upper bound on plaintexts accepted by [`Self::encrypt`].
    pub fn max_plaintext(&self) -> Option<u128> {
        checked_pow(self.radix, self.n_pivot() - 1)
    }

    /// `sum_i d_i (.) pivots[i]`, skipping zero digits. An empty digit list
    /// yields the zero ciphertext.
    pub fn construct(&self, digits: &[u64]) -> Result<Ciphertext> {
        if digits.len() > self.n_pivot() {
            return Err(Error::OutOfRange(format!(
                "{} digits but only {} pivots",
                digits.len(),
                self.n_pivot()
            )));
        }
        let mut acc = Ciphertext::zero(self.pivots[0].ring(), self.scale());
        for (pivot, &d) in self.pivots.iter().zip(digits) {
            if d >= self.radix {
                return Err(Error::OutOfRange(format!(
                    "digit {d} not below radix {}",
                    self.radix
                )));
            }
            if d != 0 {
                acc.add_assign(&pivot.scalar_mul(d as i128))?;
            }
        }
        Ok(acc)
    }

    /// Adds `rnd_i (.) (pivots[i+1] - r (.) pivots[i])` for `i < top_idx`
    /// with independent uniform bits `rnd_i`. Every term encrypts
    /// `r^{i+1} - r * r^i = 0`, so the plaintext is unchanged.
    pub fn randomize(
        &self,
        cprime: &Ciphertext,
        top_idx: usize,
        rng: &mut RandomStream,
    ) -> Result<Ciphertext> {
        if top_idx >= self.n_pivot() {
            return Err(Error::OutOfRange(format!(
                "top index {top_idx} needs pivot {top_idx}, cache has {}",
                self.n_pivot()
            )));
        }
        let r = self.radix as i128;
        let mut out = cprime.clone();
        for i in 0..top_idx {
            if rng.bit() {
                let mut term = self.pivots[i + 1].clone();
                term.sub_assign(&self.pivots[i].scalar_mul(r))?;
                out.add_assign(&term)?;
            }
        }
        Ok(out)
    }

    /// Digit decomposition, construction and randomization in one call.
    /// Requires `m < r^(n_pivot - 1)` so the highest randomization term has
    /// its pivot.
    pub fn encrypt(&self, m: u128, rng: &mut RandomStream) -> Result<Ciphertext> {
        let digits = digit_decompose(m, self.radix, self.n_pivot() - 1)?;
        let cprime = self.construct(&digits)?;
        // Zero still gets one mask term so its ciphertext is randomized.
        self.randomize(&cprime, digits.len().max(1), rng)
    }

    /// [`Self::encrypt`] of `|m|`, negated for negative `m`.
    pub fn encrypt_signed(&self, m: i128, rng: &mut RandomStream) -> Result<Ciphertext> {
        let ct = self.encrypt(m.unsigned_abs(), rng)?;
        Ok(if m < 0 { ct.scalar_mul(-1) } else { ct })
    }
}

/// Base-`r` digits of `m`, least significant first, without trailing zeros.
/// `m` must be below `r^n_pivot`.
pub fn digit_decompose(m: u128, r: u64, n_pivot: usize) -> Result<Vec<u64>> {
    if r < 2 {
        return Err(Error::InvalidParams(format!("radix {r} below 2")));
    }
    if let Some(limit) = checked_pow(r, n_pivot) {
        if m >= limit {
            return Err(Error::OutOfRange(format!(
                "{m} needs more than {n_pivot} base-{r} digits"
            )));
        }
    }
    let mut digits = Vec::new();
    let mut rest = m;
    while rest > 0 {
        digits.push((rest % r as u128) as u64);
        rest /= r as u128;
    }
    Ok(digits)
}

fn checked_pow(r: u64, e: usize) -> Option<u128> {
    (r as u128).checked_pow(u32::try_from(e).ok()?)
}
