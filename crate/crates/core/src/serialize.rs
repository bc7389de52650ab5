//! Little-endian byte layout for parameters, keys and ciphertexts.
//!
//! ```text
//! header     = "SMC1" | kind:u8 | N:u128 | q:u128 | delta:u128
//! params     = header('P') | sigma:f64 | radix:u64 | seed:u64
//! public key = header('K') | poly(pk1) | poly(pk2)
//! secret key = header('S') | poly(s)
//! ciphertext = header('C') | scale:u128 | poly(c1) | poly(c2)
//! poly       = repr:u8 (0 = coefficient, 1 = evaluation) | len:u64 | len * u128
//! ```
//!
//! All integers are little-endian.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::he::{Ciphertext, PublicKey, SecretKey};
use crate::params::Params;
use crate::ring::{Poly, Representation, Ring};

pub const MAGIC: &[u8; 4] = b"SMC1";

const KIND_PARAMS: u8 = b'P';
const KIND_PUBLIC_KEY: u8 = b'K';
const KIND_SECRET_KEY: u8 = b'S';
const KIND_CIPHERTEXT: u8 = b'C';

fn header(out: &mut Vec<u8>, kind: u8, params: &Params) {
    out.extend_from_slice(MAGIC);
    out.push(kind);
    out.extend_from_slice(&(params.n as u128).to_le_bytes());
    out.extend_from_slice(&params.q.to_le_bytes());
    out.extend_from_slice(&params.delta.to_le_bytes());
}

fn write_poly(out: &mut Vec<u8>, p: &Poly) {
    out.push(match p.representation() {
        Representation::Coefficient => 0,
        Representation::Evaluation => 1,
    });
    out.extend_from_slice(&(p.coeffs().len() as u64).to_le_bytes());
    for c in p.coeffs() {
        out.extend_from_slice(&c.to_le_bytes());
    }
}

pub fn params_to_bytes(params: &Params) -> Vec<u8> {
    let mut out = Vec::with_capacity(4 + 1 + 48 + 24);
    header(&mut out, KIND_PARAMS, params);
    out.extend_from_slice(&params.sigma.to_le_bytes());
    out.extend_from_slice(&params.radix.to_le_bytes());
    out.extend_from_slice(&params.seed.to_le_bytes());
    out
}

pub fn public_key_to_bytes(pk: &PublicKey) -> Vec<u8> {
    let mut out = Vec::new();
    header(&mut out, KIND_PUBLIC_KEY, pk.ring().params());
    write_poly(&mut out, pk.pk1());
    write_poly(&mut out, pk.pk2());
    out
}

pub fn secret_key_to_bytes(sk: &SecretKey) -> Vec<u8> {
    let mut out = Vec::new();
    header(&mut out, KIND_SECRET_KEY, sk.ring().params());
    write_poly(&mut out, sk.poly());
    out
}

pub fn ciphertext_to_bytes(ct: &Ciphertext) -> Vec<u8> {
    let mut out = Vec::new();
    header(&mut out, KIND_CIPHERTEXT, ct.ring().params());
    out.extend_from_slice(&ct.scale().to_le_bytes());
    write_poly(&mut out, ct.c1());
    write_poly(&mut out, ct.c2());
    out
}

struct Reader<'a> {
    buf: &'a [u8],
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.buf.len() < n {
            return Err(Error::Format(format!(
                "truncated input: wanted {n} bytes, {} left",
                self.buf.len()
            )));
        }
        let (head, rest) = self.buf.split_at(n);
        self.buf = rest;
        Ok(head)
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn u128(&mut self) -> Result<u128> {
        Ok(u128::from_le_bytes(self.take(16)?.try_into().unwrap()))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn finish(&self) -> Result<()> {
        if self.buf.is_empty() {
            Ok(())
        } else {
            Err(Error::Format(format!("{} trailing bytes", self.buf.len())))
        }
    }

    /// Reads the header and returns `(N, q, delta)`.
    fn header(&mut self, kind: u8) -> Result<(u128, u128, u128)> {
        if self.take(4)? != MAGIC {
            return Err(Error::Format("bad magic".into()));
        }
        let found = self.u8()?;
        if found != kind {
            return Err(Error::Format(format!(
                "expected record kind {:?}, found {:?}",
                kind as char, found as char
            )));
        }
        Ok((self.u128()?, self.u128()?, self.u128()?))
    }

    fn header_for(&mut self, kind: u8, ring: &Ring) -> Result<()> {
        let (n, q, delta) = self.header(kind)?;
        let p = ring.params();
        if n != p.n as u128 || q != p.q || delta != p.delta {
            return Err(Error::Format(format!(
                "record for N={n}, q={q}, delta={delta} does not match ring N={}, q={}, delta={}",
                p.n, p.q, p.delta
            )));
        }
        Ok(())
    }

    fn poly(&mut self, ring: &Arc<Ring>) -> Result<Poly> {
        let repr = match self.u8()? {
            0 => Representation::Coefficient,
            1 => Representation::Evaluation,
            other => return Err(Error::Format(format!("unknown representation tag {other}"))),
        };
        let len = self.u64()? as usize;
        if len != ring.n() {
            return Err(Error::Format(format!(
                "polynomial of length {len}, ring degree {}",
                ring.n()
            )));
        }
        let coeffs = (0..len).map(|_| self.u128()).collect::<Result<Vec<_>>>()?;
        Poly::from_values(ring, coeffs, repr)
    }
}

pub fn params_from_bytes(bytes: &[u8]) -> Result<Params> {
    let mut r = Reader { buf: bytes };
    let (n, q, delta) = r.header(KIND_PARAMS)?;
    let params = Params {
        n: usize::try_from(n).map_err(|_| Error::Format(format!("N = {n} too large")))?,
        q,
        delta,
        sigma: r.f64()?,
        radix: r.u64()?,
        seed: r.u64()?,
    };
    r.finish()?;
    params.validate()?;
    Ok(params)
}

pub fn public_key_from_bytes(bytes: &[u8], ring: &Arc<Ring>) -> Result<PublicKey> {
    let mut r = Reader { buf: bytes };
    r.header_for(KIND_PUBLIC_KEY, ring)?;
    let pk1 = r.poly(ring)?;
    let pk2 = r.poly(ring)?;
    r.finish()?;
    PublicKey::from_parts(pk1, pk2)
}

pub fn secret_key_from_bytes(bytes: &[u8], ring: &Arc<Ring>) -> Result<SecretKey> {
    let mut r = Reader { buf: bytes };
    r.header_for(KIND_SECRET_KEY, ring)?;
    let s = r.poly(ring)?;
    r.finish()?;
    if s.representation() != Representation::Coefficient {
        return Err(Error::Format(
            "secret key must be in coefficient form".into(),
        ));
    }
    let q = ring.q();
    if s.coeffs().iter().any(|&c| c > 1 && c != q - 1) {
        return Err(Error::Format("secret key is not ternary".into()));
    }
    SecretKey::from_ternary(s)
}

pub fn ciphertext_from_bytes(bytes: &[u8], ring: &Arc<Ring>) -> Result<Ciphertext> {
    let mut r = Reader { buf: bytes };
    r.header_for(KIND_CIPHERTEXT, ring)?;
    let scale = r.u128()?;
    let c1 = r.poly(ring)?;
    let c2 = r.poly(ring)?;
    r.finish()?;
    Ciphertext::from_parts(c1, c2, scale)
}
