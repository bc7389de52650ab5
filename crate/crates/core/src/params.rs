use crate::error::{Error, Result};
use crate::ring::modulus::{Modulus, MAX_MODULUS_BITS};

/// 119-bit prime with `q = 1 mod 2^17`, so negacyclic NTTs exist for every
/// `N <= 2^16`.
pub const DEFAULT_MODULUS: u128 = 0x7f_ffff_ffff_ffff_ffff_ffff_ff78_0001;

/// NTT-friendly 14-bit prime used by the small oracle profile.
pub const DESK_MODULUS: u128 = 12289;

#[derive(Clone, Debug, PartialEq)]
pub struct Params {
    /// Ring degree, a power of two.
    pub n: usize,
    /// Coefficient modulus.
    pub q: u128,
    /// Encoding scale.
    pub delta: u128,
    /// Standard deviation of the error distribution.
    pub sigma: f64,
    /// Radix used by both pivot caches.
    pub radix: u64,
    pub seed: u64,
}

impl Default for Params {
    fn default() -> Self {
        Self::default_profile()
    }
}

impl Params {
    /// `N = 4096`, 119-bit `q`, `delta = 2^50`.
    pub fn default_profile() -> Self {
        Self {
            n: 4096,
            q: DEFAULT_MODULUS,
            delta: 1 << 50,
            sigma: 3.2,
            radix: 2,
            seed: 0,
        }
    }

    /// Tiny ring for exhaustive and oracle tests. Too small for meaningful
    /// security or decryption headroom.
    pub fn desk() -> Self {
        Self {
            n: 8,
            q: DESK_MODULUS,
            delta: 1 << 6,
            sigma: 3.2,
            radix: 2,
            seed: 0,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_radix(mut self, radix: u64) -> Self {
        self.radix = radix;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParams(msg));
        if !self.n.is_power_of_two() || self.n < 8 {
            return bad(format!("N = {} must be a power of two >= 8", self.n));
        }
        if Modulus::new(self.q).is_none() {
            return bad(format!(
                "q = {} must be odd, >= 3 and below 2^{MAX_MODULUS_BITS}",
                self.q
            ));
        }
        if self.delta == 0 {
            return bad("delta must be positive".into());
        }
        let headroom = self
            .delta
            .checked_mul(self.delta)
            .and_then(|d2| d2.checked_mul(2));
        if !matches!(headroom, Some(h) if h < self.q) {
            return bad(format!("q = {} must exceed 2 * delta^2", self.q));
        }
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return bad(format!("sigma = {} must be positive", self.sigma));
        }
        if self.radix < 2 {
            return bad(format!("radix = {} must be at least 2", self.radix));
        }
        Ok(())
    }

    /// Conservative bound on the decryption noise of a fresh ciphertext,
    /// `N * (6 sigma)^2 * 8`, in coefficient units.
    pub fn noise_bound(&self) -> f64 {
        let tail = 6.0 * self.sigma;
        self.n as f64 * tail * tail * 8.0
    }

    /// Decryption tolerance in plaintext units at scale `delta`.
    pub fn tolerance(&self) -> f64 {
        self.noise_bound() / self.delta as f64
    }

    /// Largest integer coefficient magnitude that decodes unambiguously.
    pub fn quarter_q(&self) -> u128 {
        self.q / 4
    }
}
