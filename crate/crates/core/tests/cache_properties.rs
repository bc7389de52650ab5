//! Randomized checks of the decryption guarantees of both caches.

use std::sync::OnceLock;

use proptest::prelude::*;
use smuche_core::he::{decrypt, keygen};
use smuche_core::serialize::{ciphertext_from_bytes, ciphertext_to_bytes};
use smuche_core::{
    Params, PublicKey, RachePivotCache, RandomStream, Ring, SecretKey, SmuchePivotCache,
};

struct Fixture {
    pk: PublicKey,
    sk: SecretKey,
    smuche: SmuchePivotCache,
    rache: RachePivotCache,
}

fn fixture() -> &'static Fixture {
    static F: OnceLock<Fixture> = OnceLock::new();
    F.get_or_init(|| {
        let ring = Ring::new(Params::default_profile()).unwrap();
        let mut rng = RandomStream::from_seed(77);
        let (pk, sk) = keygen(&ring, &mut rng).unwrap();
        let smuche = SmuchePivotCache::precompute(&pk, 2f64.powi(-20), &mut rng).unwrap();
        let rache = RachePivotCache::precompute(&pk, 48, &mut rng).unwrap();
        Fixture {
            pk,
            sk,
            smuche,
            rache,
        }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    // Quantization error is at most half a step, and the decrypted value
    // stays within |z| noise tolerances of the quantized plaintext.
    #[test]
    fn smuche_decrypts_within_bound(m in -1.0e6f64..1.0e6, k in 0i32..=20, seed: u64) {
        let f = fixture();
        let tol = f.pk.ring().params().tolerance();
        let p = 2f64.powi(-k);
        let (_, z) = f.smuche.scalar_for(m, p).unwrap();
        let quantized = f.smuche.quantize(m, p).unwrap();
        prop_assert!((quantized - m).abs() <= p / 2.0 + 1e-9 * m.abs());
        let ct = f.smuche.encrypt(&f.pk, m, p, &mut RandomStream::from_seed(seed)).unwrap();
        let got = decrypt(&f.sk, &ct).unwrap();
        let bound = (z.unsigned_abs().max(1) as f64) * tol;
        prop_assert!((got - quantized).abs() <= bound, "m={m} p={p} got={got}");
    }

    #[test]
    fn rache_decrypts_within_tolerance(m in 0u64..(1u64 << 46), seed: u64) {
        let f = fixture();
        let tol = f.pk.ring().params().tolerance();
        let ct = f.rache.encrypt(m as u128, &mut RandomStream::from_seed(seed)).unwrap();
        // Each digit adds one pivot noise, each mask term three.
        let terms = 4.0 * 47.0 + 1.0;
        prop_assert!((decrypt(&f.sk, &ct).unwrap() - m as f64).abs() <= terms * tol);
    }

    #[test]
    fn ciphertext_bytes_roundtrip(m in -1.0e3f64..1.0e3, seed: u64) {
        let f = fixture();
        let ct = f.smuche.encrypt(&f.pk, m, 1.0 / 1024.0, &mut RandomStream::from_seed(seed)).unwrap();
        let back = ciphertext_from_bytes(&ciphertext_to_bytes(&ct), f.pk.ring()).unwrap();
        prop_assert_eq!(back, ct);
    }
}
