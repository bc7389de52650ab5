//! Public-key RLWE encryption of scaled scalars.
//!
//! A real `m` at scale `s` is encoded as the constant polynomial
//! `round(m * s)`. Keys and ciphertexts live in the ring's ciphertext
//! representation (evaluation form when an NTT exists), so encryption costs
//! one forward transform per fresh noise polynomial and decryption one
//! inverse transform.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::ring::{
    sample_gaussian, sample_ternary, sample_uniform, Poly, PreparedPoly, RandomStream,
    Representation, Ring,
};

#[derive(Clone, Debug)]
pub struct SecretKey {
    /// Ternary secret, coefficient form.
    s: Poly,
    /// Same secret in the ciphertext representation.
    s_ct: Poly,
}

impl SecretKey {
    pub(crate) fn from_ternary(s: Poly) -> Result<Self> {
        let repr = s.ring().ciphertext_representation();
        let s_ct = s.clone().into_representation(repr)?;
        Ok(Self { s, s_ct })
    }

    pub fn poly(&self) -> &Poly {
        &self.s
    }

    pub fn ring(&self) -> &Arc<Ring> {
        self.s.ring()
    }
}

#[derive(Clone, Debug)]
pub struct PublicKey {
    pk1: PreparedPoly,
    pk2: PreparedPoly,
}

impl PublicKey {
    pub(crate) fn from_parts(pk1: Poly, pk2: Poly) -> Result<Self> {
        let repr = pk1.ring().ciphertext_representation();
        if pk1.representation() != repr || pk2.representation() != repr {
            return Err(Error::RepresentationMismatch);
        }
        // Surfaces ring mismatches between the two halves.
        pk1.check_compatible(&pk2)?;
        Ok(Self {
            pk1: PreparedPoly::new(pk1),
            pk2: PreparedPoly::new(pk2),
        })
    }

    /// `-a*s + e`, ciphertext representation.
    pub fn pk1(&self) -> &Poly {
        self.pk1.poly()
    }

    /// The uniform `a`, ciphertext representation.
    pub fn pk2(&self) -> &Poly {
        self.pk2.poly()
    }

    pub fn ring(&self) -> &Arc<Ring> {
        self.pk1.poly().ring()
    }

    /// `(pk1 * x, pk2 * x)` for `x` already in ciphertext representation.
    pub(crate) fn mul_pair(&self, x: &Poly) -> Result<(Poly, Poly)> {
        Ok((self.pk1.mul(x)?, self.pk2.mul(x)?))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Plaintext {
    pub value: f64,
    pub scale: u128,
}

impl Plaintext {
    pub fn new(value: f64, scale: u128) -> Result<Self> {
        if scale == 0 {
            return Err(Error::InvalidParams(
                "plaintext scale must be positive".into(),
            ));
        }
        if !value.is_finite() {
            return Err(Error::OutOfRange(format!("non-finite plaintext {value}")));
        }
        Ok(Self { value, scale })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ciphertext {
    c1: Poly,
    c2: Poly,
    scale: u128,
}

impl Ciphertext {
    pub fn from_parts(c1: Poly, c2: Poly, scale: u128) -> Result<Self> {
        if scale == 0 {
            return Err(Error::InvalidParams(
                "ciphertext scale must be positive".into(),
            ));
        }
        // Validates ring and representation agreement.
        c1.check_compatible(&c2)?;
        Ok(Self { c1, c2, scale })
    }

    /// `(0, 0)`: the deterministic encryption of zero.
    pub fn zero(ring: &Arc<Ring>, scale: u128) -> Self {
        let repr = ring.ciphertext_representation();
        Self {
            c1: Poly::zero_in(ring, repr),
            c2: Poly::zero_in(ring, repr),
            scale,
        }
    }

    pub fn c1(&self) -> &Poly {
        &self.c1
    }

    pub fn c2(&self) -> &Poly {
        &self.c2
    }

    pub fn scale(&self) -> u128 {
        self.scale
    }

    pub fn ring(&self) -> &Arc<Ring> {
        self.c1.ring()
    }

    /// Reinterprets the encrypted integer under a different scale, e.g. an
    /// encryption of `k` at scale `s` becomes an encryption of `k / t` at
    /// scale `s * t`. Polynomials are untouched.
    pub fn with_scale(mut self, scale: u128) -> Result<Self> {
        if scale == 0 {
            return Err(Error::InvalidParams(
                "ciphertext scale must be positive".into(),
            ));
        }
        self.scale = scale;
        Ok(self)
    }

    fn check_scale(&self, other: &Ciphertext) -> Result<()> {
        if self.scale != other.scale {
            return Err(Error::ScaleMismatch {
                left: self.scale,
                right: other.scale,
            });
        }
        Ok(())
    }

    pub fn add_assign(&mut self, other: &Ciphertext) -> Result<()> {
        self.check_scale(other)?;
        self.c1.add_assign(&other.c1)?;
        self.c2.add_assign(&other.c2)
    }

    pub fn sub_assign(&mut self, other: &Ciphertext) -> Result<()> {
        self.check_scale(other)?;
        self.c1.sub_assign(&other.c1)?;
        self.c2.sub_assign(&other.c2)
    }

    /// Homomorphic addition, component-wise on `(c1, c2)`.
    #[allow(clippy::should_implement_trait)]
    pub fn add(&self, other: &Ciphertext) -> Result<Ciphertext> {
        let mut out = self.clone();
        out.add_assign(other)?;
        Ok(out)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn sub(&self, other: &Ciphertext) -> Result<Ciphertext> {
        let mut out = self.clone();
        out.sub_assign(other)?;
        Ok(out)
    }

    /// `z (.) c = (z*c1 mod q, z*c2 mod q)`. Noise grows by `|z|`.
    pub fn scalar_mul(&self, z: i128) -> Ciphertext {
        Ciphertext {
            c1: self.c1.scalar_mul(z),
            c2: self.c2.scalar_mul(z),
            scale: self.scale,
        }
    }
}

/// The randomness of one encryption: ternary `u`, Gaussian `e1`, `e2`, all in
/// coefficient form.
#[derive(Clone, Debug)]
pub struct EncryptionNoise {
    pub u: Poly,
    pub e1: Poly,
    pub e2: Poly,
}

impl EncryptionNoise {
    pub fn sample(ring: &Arc<Ring>, rng: &mut RandomStream) -> Self {
        Self {
            u: sample_ternary(ring, rng),
            e1: sample_gaussian(ring, rng),
            e2: sample_gaussian(ring, rng),
        }
    }
}

pub fn keygen(ring: &Arc<Ring>, rng: &mut RandomStream) -> Result<(PublicKey, SecretKey)> {
    keygen_with_error(ring, rng).map(|(pk, sk, _)| (pk, sk))
}

/// Key generation that also hands back the Gaussian error `e` of
/// `pk1 = -a*s + e`, for noise accounting in tests and diagnostics.
pub fn keygen_with_error(
    ring: &Arc<Ring>,
    rng: &mut RandomStream,
) -> Result<(PublicKey, SecretKey, Poly)> {
    let repr = ring.ciphertext_representation();
    let sk = SecretKey::from_ternary(sample_ternary(ring, rng))?;
    let a = sample_uniform(ring, rng).into_representation(repr)?;
    let e = sample_gaussian(ring, rng);
    let mut pk1 = e.clone().into_representation(repr)?;
    pk1.sub_assign(&a.mul(&sk.s_ct)?)?;
    Ok((PublicKey::from_parts(pk1, a)?, sk, e))
}

/// Constant polynomial `round(m * scale) mod q`, coefficient form.
pub fn encode(m: f64, scale: u128, ring: &Arc<Ring>) -> Result<Poly> {
    let v = scaled_integer(m, scale, ring)?;
    Ok(Poly::constant(ring, v))
}

fn scaled_integer(m: f64, scale: u128, ring: &Arc<Ring>) -> Result<i128> {
    let overflow = || Error::EncodeOverflow { value: m, scale };
    if scale == 0 || !m.is_finite() {
        return Err(overflow());
    }
    let scaled = (m * scale as f64).round();
    let limit = ring.params().quarter_q() as f64;
    if scaled.abs() >= limit {
        return Err(overflow());
    }
    let v = scaled as i128;
    if v.unsigned_abs() >= ring.params().quarter_q() {
        return Err(overflow());
    }
    Ok(v)
}

/// Signed lift of the constant coefficient divided by `scale`.
pub fn decode(p: &Poly, scale: u128) -> f64 {
    let c0 = match p.representation() {
        Representation::Coefficient => p.coeffs()[0],
        Representation::Evaluation => p.to_coefficient().coeffs()[0],
    };
    let v = p.ring().modulus().lift_signed(c0);
    divide_exact(v, scale)
}

/// `v / scale` without losing the fractional part to a huge integer part.
fn divide_exact(v: i128, scale: u128) -> f64 {
    let s = scale as i128;
    let whole = v / s;
    let rem = v % s;
    whole as f64 + rem as f64 / scale as f64
}

pub fn encrypt(pk: &PublicKey, pt: &Plaintext, rng: &mut RandomStream) -> Result<Ciphertext> {
    let noise = EncryptionNoise::sample(pk.ring(), rng);
    encrypt_with(pk, pt, &noise)
}

/// `c1 = pk1*u + e1 + m`, `c2 = pk2*u + e2` with caller-supplied noise.
pub fn encrypt_with(pk: &PublicKey, pt: &Plaintext, noise: &EncryptionNoise) -> Result<Ciphertext> {
    let m = encode(pt.value, pt.scale, pk.ring())?;
    encrypt_encoded(pk, m, pt.scale, noise)
}

/// Encrypts the integer `k` at `scale` exactly, without passing through
/// `f64`. Used for pivots beyond 2^53.
pub fn encrypt_integer(
    pk: &PublicKey,
    k: i128,
    scale: u128,
    rng: &mut RandomStream,
) -> Result<Ciphertext> {
    let ring = pk.ring();
    let overflow = || Error::EncodeOverflow {
        value: k as f64,
        scale,
    };
    if scale == 0 {
        return Err(overflow());
    }
    let v = k
        .checked_mul(i128::try_from(scale).map_err(|_| overflow())?)
        .filter(|v| v.unsigned_abs() < ring.params().quarter_q())
        .ok_or_else(overflow)?;
    let noise = EncryptionNoise::sample(ring, rng);
    encrypt_encoded(pk, Poly::constant(ring, v), scale, &noise)
}

fn encrypt_encoded(
    pk: &PublicKey,
    m: Poly,
    scale: u128,
    noise: &EncryptionNoise,
) -> Result<Ciphertext> {
    let ring = pk.ring();
    let repr = ring.ciphertext_representation();

    let u = noise.u.clone().into_representation(repr)?;
    let (mut c1, mut c2) = pk.mul_pair(&u)?;

    let mut e1m = noise.e1.clone();
    e1m.add_assign(&m)?;
    c1.add_assign(&e1m.into_representation(repr)?)?;
    c2.add_assign(&noise.e2.clone().into_representation(repr)?)?;

    Ok(Ciphertext { c1, c2, scale })
}

/// `c1 + c2*s`, coefficient form. Its constant term is the scaled message
/// plus noise.
pub fn decrypt_phase(sk: &SecretKey, ct: &Ciphertext) -> Result<Poly> {
    let repr = ct.c1.representation();
    let s = if repr == sk.s_ct.representation() {
        &sk.s_ct
    } else {
        &sk.s
    };
    let mut phase = ct.c2.mul(s)?;
    phase.add_assign(&ct.c1)?;
    Ok(phase.into_coefficient())
}

pub fn decrypt(sk: &SecretKey, ct: &Ciphertext) -> Result<f64> {
    Ok(decode(&decrypt_phase(sk, ct)?, ct.scale))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::Params;

    fn setup(seed: u64) -> (Arc<Ring>, PublicKey, SecretKey, RandomStream) {
        let ring = Ring::new(Params::default_profile()).unwrap();
        let mut rng = RandomStream::from_seed(seed);
        let (pk, sk) = keygen(&ring, &mut rng).unwrap();
        (ring, pk, sk, rng)
    }

    fn delta(ring: &Arc<Ring>) -> u128 {
        ring.params().delta
    }

    #[test]
    fn encode_examples() {
        let ring = Ring::new(Params::default_profile()).unwrap();
        assert_eq!(encode(1.02, 100, &ring).unwrap().coeffs()[0], 102);
        assert!(encode(0.0, 12345, &ring).unwrap().is_zero());

        let small = Ring::new(Params {
            q: 17,
            delta: 2,
            ..Params::desk()
        })
        .unwrap();
        let p = encode(-1.5, 2, &small).unwrap();
        assert_eq!(p.coeffs()[0], 14);
        assert!(p.coeffs()[1..].iter().all(|&c| c == 0));
        assert_eq!(decode(&p, 2), -1.5);
    }

    #[test]
    fn encode_overflow() {
        let small = Ring::new(Params {
            q: 17,
            delta: 2,
            ..Params::desk()
        })
        .unwrap();
        // q/4 = 4: |m * scale| must be < 4.
        assert!(encode(1.5, 2, &small).is_ok());
        assert!(matches!(
            encode(2.0, 2, &small),
            Err(Error::EncodeOverflow { .. })
        ));
        assert!(encode(f64::NAN, 2, &small).is_err());
        let ring = Ring::new(Params::default_profile()).unwrap();
        assert!(encode(1e30, 1 << 50, &ring).is_err());
    }

    #[test]
    fn decode_roundtrips() {
        let ring = Ring::new(Params::default_profile()).unwrap();
        assert_eq!(decode(&encode(1.02, 100, &ring).unwrap(), 100), 1.02);
        assert_eq!(decode(&Poly::zero(&ring), 7), 0.0);
        assert_eq!(decode(&encode(-1.5, 2, &ring).unwrap(), 2), -1.5);
        // Large integer part keeps its fractional bits.
        let p = encode(123_456_789_012.25, 1 << 50, &ring).unwrap();
        assert_eq!(decode(&p, 1 << 50), 123_456_789_012.25);
    }

    #[test]
    fn keygen_residual_is_the_error() {
        let ring = Ring::new(Params::default_profile()).unwrap();
        let mut rng = RandomStream::from_seed(1);
        let (pk, sk, e) = keygen_with_error(&ring, &mut rng).unwrap();
        let residual = pk
            .pk2()
            .mul(&sk.s_ct)
            .unwrap()
            .add(pk.pk1())
            .unwrap()
            .into_coefficient();
        assert_eq!(residual, e);
        let bound = (6.0 * 3.2 * (ring.n() as f64 + 1.0)) as u128;
        assert!(residual.infinity_norm() <= bound);
        assert!(sk
            .poly()
            .coeffs()
            .iter()
            .all(|&c| c == 0 || c == 1 || c == ring.q() - 1));
    }

    #[test]
    fn distinct_seeds_distinct_keys() {
        let (_, pk_a, _, _) = setup(1);
        let (_, pk_b, _, _) = setup(2);
        assert_ne!(pk_a.pk2(), pk_b.pk2());
    }

    #[test]
    fn roundtrip_examples() {
        let (ring, pk, sk, mut rng) = setup(3);
        let tol = ring.params().tolerance();
        let d = delta(&ring);
        for m in [0.0, 3.25, 7.0, -2.5, 999_999.984375] {
            let ct = encrypt(&pk, &Plaintext::new(m, d).unwrap(), &mut rng).unwrap();
            let got = decrypt(&sk, &ct).unwrap();
            assert!((got - m).abs() <= tol, "{m} -> {got}");
        }
    }

    #[test]
    fn zeroed_randomness_is_plain_encoding() {
        let (ring, pk, sk, _) = setup(4);
        let pt = Plaintext::new(2.75, delta(&ring)).unwrap();
        let ct = encrypt(&pk, &pt, &mut RandomStream::zeroed()).unwrap();
        assert_eq!(
            ct.c1().to_coefficient(),
            encode(2.75, delta(&ring), &ring).unwrap()
        );
        assert!(ct.c2().is_zero());
        assert_eq!(decrypt(&sk, &ct).unwrap(), 2.75);
    }

    #[test]
    fn noiseless_ciphertext_decrypts_exactly() {
        let (ring, _, sk, _) = setup(5);
        let repr = ring.ciphertext_representation();
        let c1 = encode(-41.5, 4, &ring)
            .unwrap()
            .into_representation(repr)
            .unwrap();
        let ct = Ciphertext::from_parts(c1, Poly::zero_in(&ring, repr), 4).unwrap();
        assert_eq!(decrypt(&sk, &ct).unwrap(), -41.5);
    }

    #[test]
    fn randomized_encryption() {
        let (ring, pk, _, _) = setup(6);
        let pt = Plaintext::new(0.0, delta(&ring)).unwrap();
        let a = encrypt(&pk, &pt, &mut RandomStream::from_seed(100)).unwrap();
        let b = encrypt(&pk, &pt, &mut RandomStream::from_seed(101)).unwrap();
        assert_ne!(a, b);
    }

    #[test]
    fn homomorphic_add_sub() {
        let (ring, pk, sk, mut rng) = setup(7);
        let tol = ring.params().tolerance();
        let d = delta(&ring);
        let mut enc = |m: f64| encrypt(&pk, &Plaintext::new(m, d).unwrap(), &mut rng).unwrap();
        let (a, b, five) = (enc(1.5), enc(2.5), enc(5.0));
        let (two, three) = (enc(2.0), enc(3.0));
        assert!((decrypt(&sk, &a.add(&b).unwrap()).unwrap() - 4.0).abs() <= 2.0 * tol);
        assert!((decrypt(&sk, &two.add(&three).unwrap()).unwrap() - 5.0).abs() <= 2.0 * tol);
        assert!(decrypt(&sk, &five.sub(&five).unwrap()).unwrap().abs() <= tol);
        let zero = Ciphertext::zero(&ring, d);
        assert_eq!(a.add(&zero).unwrap(), a);
    }

    #[test]
    fn scale_mismatch_is_an_error() {
        let (ring, pk, _, mut rng) = setup(8);
        let a = encrypt(&pk, &Plaintext::new(1.0, 100).unwrap(), &mut rng).unwrap();
        let b = encrypt(&pk, &Plaintext::new(1.0, delta(&ring)).unwrap(), &mut rng).unwrap();
        assert!(matches!(a.add(&b), Err(Error::ScaleMismatch { .. })));
        assert!(matches!(a.sub(&b), Err(Error::ScaleMismatch { .. })));
    }

    #[test]
    fn scalar_mul_homomorphism() {
        let (ring, pk, sk, mut rng) = setup(9);
        let tol = ring.params().tolerance();
        let ct = encrypt(&pk, &Plaintext::new(2.0, delta(&ring)).unwrap(), &mut rng).unwrap();
        assert_eq!(ct.scalar_mul(1), ct);
        assert!((decrypt(&sk, &ct.scalar_mul(3)).unwrap() - 6.0).abs() <= 3.0 * tol);
        assert!((decrypt(&sk, &ct.scalar_mul(-7)).unwrap() + 14.0).abs() <= 7.0 * tol);
        let mut acc = Ciphertext::zero(&ring, ct.scale());
        for z in 0..=16 {
            assert_eq!(ct.scalar_mul(z), acc);
            acc = acc.add(&ct).unwrap();
        }
    }

    #[test]
    fn phase_cancellation_matches_noise_algebra() {
        // c1 + s*c2 = m + (e*u + e1 + s*e2) exactly, with every term known.
        let ring = Ring::new(Params::default_profile()).unwrap();
        let mut rng = RandomStream::from_seed(10);
        let (pk, sk, e) = keygen_with_error(&ring, &mut rng).unwrap();
        let noise = EncryptionNoise::sample(&ring, &mut rng);
        let d = delta(&ring);
        let pt = Plaintext::new(12.5, d).unwrap();
        let ct = encrypt_with(&pk, &pt, &noise).unwrap();
        let phase = decrypt_phase(&sk, &ct).unwrap();

        let expected = encode(12.5, d, &ring)
            .unwrap()
            .add(&e.mul(&noise.u).unwrap())
            .unwrap()
            .add(&noise.e1)
            .unwrap()
            .add(&sk.poly().mul(&noise.e2).unwrap())
            .unwrap();
        assert_eq!(phase, expected);
        let noise_only = phase.sub(&encode(12.5, d, &ring).unwrap()).unwrap();
        assert!((noise_only.infinity_norm() as f64) < ring.params().noise_bound());
    }

    #[test]
    fn coefficient_form_ring_still_works() {
        // 2^61 - 2 is not divisible by 2N = 32, so there is no NTT: keys and
        // ciphertexts stay in coefficient form and multiplication falls back
        // to schoolbook.
        let params = Params {
            n: 16,
            q: (1u128 << 61) - 1,
            delta: 1 << 20,
            ..Params::desk()
        };
        let ring = Ring::new(params).unwrap();
        assert!(!ring.has_ntt());
        let mut rng = RandomStream::from_seed(11);
        let (pk, sk) = keygen(&ring, &mut rng).unwrap();
        let ct = encrypt(&pk, &Plaintext::new(-3.25, 1 << 20).unwrap(), &mut rng).unwrap();
        assert_eq!(ct.c1().representation(), Representation::Coefficient);
        let got = decrypt(&sk, &ct).unwrap();
        assert!((got + 3.25).abs() < 1e-3, "{got}");
    }
}
