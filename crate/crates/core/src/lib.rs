//! RLWE encryption of scaled scalars with two ciphertext caches.
//!
//! * [`he`]: key generation, encoding, encryption, decryption and the
//!   additive / scalar homomorphic operations.
//! * [`rache`]: radix-additive caching. Cost grows with the number of
//!   base-`r` digits of the plaintext.
//! * [`smuche`]: scalar-multiplicative caching. One scalar multiplication of
//!   a cached pivot plus one fresh encryption of zero, constant cost.
//! * [`ring`]: arithmetic in `Z_q[X]/(X^N + 1)`, samplers and operation
//!   counters.
//!
//! ```
//! use smuche_core::{he, smuche::SmuchePivotCache, Params, RandomStream, Ring};
//!
//! let ring = Ring::new(Params::default_profile()).unwrap();
//! let mut rng = RandomStream::from_seed(42);
//! let (pk, sk) = he::keygen(&ring, &mut rng).unwrap();
//!
//! let cache = SmuchePivotCache::precompute(&pk, 0.25, &mut rng).unwrap();
//! let ct = cache.encrypt(&pk, 3.75, 0.25, &mut rng).unwrap();
//! let m = he::decrypt(&sk, &ct).unwrap();
//! assert!((m - 3.75).abs() < 1e-6);
//! ```

pub mod error;
pub mod he;
pub mod params;
pub mod rache;
pub mod ring;
pub mod serialize;
pub mod smuche;

pub use error::{Error, Result};
pub use he::{Ciphertext, Plaintext, PublicKey, SecretKey};
pub use params::Params;
pub use rache::RachePivotCache;
pub use ring::{Poly, RandomStream, Representation, Ring};
pub use smuche::SmuchePivotCache;
