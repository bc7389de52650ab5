//! Seeded randomness and the three coefficient distributions used by keys,
//! encryption and randomization.

use std::sync::Arc;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Normal};

use super::{Poly, Representation, Ring};

/// Source of all randomness in the library.
///
/// A seeded stream is ChaCha20. The zeroed stream is a test stub: every
/// sampler it feeds returns the zero polynomial and every mask bit is 0,
/// which makes encryption and randomization degenerate to their
/// deterministic parts.
#[derive(Clone, Debug)]
pub struct RandomStream {
    inner: Inner,
}

#[derive(Clone, Debug)]
enum Inner {
    Seeded(Box<ChaCha20Rng>),
    Zeroed,
}

impl RandomStream {
    pub fn from_seed(seed: u64) -> Self {
        Self {
            inner: Inner::Seeded(Box::new(ChaCha20Rng::seed_from_u64(seed))),
        }
    }

    /// Independent stream number `id` under `seed`; one per worker thread.
    pub fn for_stream(seed: u64, id: u64) -> Self {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        rng.set_stream(id);
        Self {
            inner: Inner::Seeded(Box::new(rng)),
        }
    }

    pub fn zeroed() -> Self {
        Self {
            inner: Inner::Zeroed,
        }
    }

    pub fn is_zeroed(&self) -> bool {
        matches!(self.inner, Inner::Zeroed)
    }

    /// Derives a child stream keyed from this stream's output. Splitting a
    /// zeroed stream yields another zeroed stream.
    pub fn split(&mut self) -> Self {
        match &mut self.inner {
            Inner::Seeded(rng) => {
                let mut key = [0u8; 32];
                rng.fill_bytes(&mut key);
                Self {
                    inner: Inner::Seeded(Box::new(ChaCha20Rng::from_seed(key))),
                }
            }
            Inner::Zeroed => Self::zeroed(),
        }
    }

    /// Uniform bit; always `false` on a zeroed stream.
    pub fn bit(&mut self) -> bool {
        match &mut self.inner {
            Inner::Seeded(rng) => rng.random::<bool>(),
            Inner::Zeroed => false,
        }
    }

    /// Raw generator, or `None` for the zeroed stub.
    pub fn rng(&mut self) -> Option<&mut ChaCha20Rng> {
        match &mut self.inner {
            Inner::Seeded(rng) => Some(rng),
            Inner::Zeroed => None,
        }
    }
}

/// Coefficients independently uniform in `[0, q)`.
pub fn sample_uniform(ring: &Arc<Ring>, rng: &mut RandomStream) -> Poly {
    let q = ring.q();
    let coeffs = match rng.rng() {
        Some(r) => (0..ring.n()).map(|_| r.random_range(0..q)).collect(),
        None => vec![0; ring.n()],
    };
    Poly::from_raw(ring.clone(), coeffs, Representation::Coefficient)
}

/// Coefficients uniform over `{-1, 0, 1}`, stored as `{q-1, 0, 1}`.
pub fn sample_ternary(ring: &Arc<Ring>, rng: &mut RandomStream) -> Poly {
    let minus_one = ring.q() - 1;
    let coeffs = match rng.rng() {
        Some(r) => (0..ring.n())
            .map(|_| match r.random_range(0..3u32) {
                0 => 0,
                1 => 1,
                _ => minus_one,
            })
            .collect(),
        None => vec![0; ring.n()],
    };
    Poly::from_raw(ring.clone(), coeffs, Representation::Coefficient)
}

/// Rounded continuous Gaussian with standard deviation `sigma`, resampled
/// outside `[-ceil(6 sigma), ceil(6 sigma)]`.
pub fn sample_gaussian(ring: &Arc<Ring>, rng: &mut RandomStream) -> Poly {
    let modulus = ring.modulus();
    let coeffs = match rng.rng() {
        Some(r) => {
            let normal = ring.gaussian();
            let bound = gaussian_tail(ring.params().sigma);
            (0..ring.n())
                .map(|_| modulus.reduce_i128(draw_rounded(normal, bound, r) as i128))
                .collect()
        }
        None => vec![0; ring.n()],
    };
    Poly::from_raw(ring.clone(), coeffs, Representation::Coefficient)
}

/// `ceil(6 sigma)`, the largest magnitude the Gaussian sampler emits.
pub fn gaussian_tail(sigma: f64) -> i64 {
    (6.0 * sigma).ceil() as i64
}

fn draw_rounded(normal: &Normal<f64>, bound: i64, rng: &mut ChaCha20Rng) -> i64 {
    loop {
        let x = normal.sample(rng).round() as i64;
        if x.abs() <= bound {
            return x;
        }
    }
}
