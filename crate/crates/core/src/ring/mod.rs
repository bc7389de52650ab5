//! The quotient ring `Z_q[X]/(X^N + 1)`.
//!
//! A [`Poly`] carries a handle to its [`Ring`] so that mixing operands from
//! different parameter sets is caught at the call site. Polynomials are in
//! either coefficient or evaluation (NTT) representation; addition and
//! scalar multiplication work the same in both, multiplication is pointwise
//! in evaluation form.

pub mod counter;
pub mod modulus;
pub mod ntt;
pub mod sampling;

use std::fmt;
use std::sync::Arc;

use rand_distr::Normal;

use crate::error::{Error, Result};
use crate::params::Params;
use counter::Op;
use modulus::{Modulus, ShoupConst};
use ntt::NttTables;

pub use sampling::{sample_gaussian, sample_ternary, sample_uniform, RandomStream};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Representation {
    Coefficient,
    Evaluation,
}

pub struct Ring {
    params: Params,
    modulus: Modulus,
    ntt: Option<NttTables>,
    gaussian: Normal<f64>,
}

impl fmt::Debug for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Ring")
            .field("n", &self.params.n)
            .field("q", &self.params.q)
            .field("ntt", &self.ntt.is_some())
            .finish()
    }
}

impl Ring {
    pub fn new(params: Params) -> Result<Arc<Self>> {
        params.validate()?;
        let modulus = Modulus::new(params.q).expect("validated modulus");
        let ntt = NttTables::new(&modulus, params.n);
        let gaussian = Normal::new(0.0, params.sigma)
            .map_err(|e| Error::InvalidParams(format!("sigma: {e}")))?;
        Ok(Arc::new(Self {
            params,
            modulus,
            ntt,
            gaussian,
        }))
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.params.n
    }

    #[inline]
    pub fn q(&self) -> u128 {
        self.params.q
    }

    pub fn params(&self) -> &Params {
        &self.params
    }

    pub fn modulus(&self) -> &Modulus {
        &self.modulus
    }

    pub fn has_ntt(&self) -> bool {
        self.ntt.is_some()
    }

    /// Representation that keys and ciphertexts are kept in: evaluation form
    /// when the modulus admits an NTT, coefficient form otherwise.
    pub fn ciphertext_representation(&self) -> Representation {
        if self.has_ntt() {
            Representation::Evaluation
        } else {
            Representation::Coefficient
        }
    }

    pub(crate) fn gaussian(&self) -> &Normal<f64> {
        &self.gaussian
    }

    fn same_as(&self, other: &Ring) -> bool {
        self.params.n == other.params.n && self.params.q == other.params.q
    }
}

#[derive(Clone)]
pub struct Poly {
    ring: Arc<Ring>,
    coeffs: Vec<u128>,
    repr: Representation,
}

impl PartialEq for Poly {
    fn eq(&self, other: &Self) -> bool {
        self.ring.same_as(&other.ring) && self.repr == other.repr && self.coeffs == other.coeffs
    }
}

impl Eq for Poly {}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        const SHOWN: usize = 8;
        let mut list = f.debug_list();
        list.entries(self.coeffs.iter().take(SHOWN));
        if self.coeffs.len() > SHOWN {
            list.entry(&format_args!("... {} more", self.coeffs.len() - SHOWN));
        }
        list.finish()?;
        write!(f, " ({:?})", self.repr)
    }
}

impl Poly {
    pub(crate) fn from_raw(ring: Arc<Ring>, coeffs: Vec<u128>, repr: Representation) -> Self {
        debug_assert_eq!(coeffs.len(), ring.n());
        Self { ring, coeffs, repr }
    }

    pub fn zero(ring: &Arc<Ring>) -> Self {
        Self::from_raw(ring.clone(), vec![0; ring.n()], Representation::Coefficient)
    }

    /// Zero polynomial in the given representation (zero is zero in both).
    pub fn zero_in(ring: &Arc<Ring>, repr: Representation) -> Self {
        Self::from_raw(ring.clone(), vec![0; ring.n()], repr)
    }

    /// Constant polynomial `c` (reduced mod q), coefficient form.
    pub fn constant(ring: &Arc<Ring>, c: i128) -> Self {
        let mut p = Self::zero(ring);
        p.coeffs[0] = ring.modulus.reduce_i128(c);
        p
    }

    /// `X^k` for `k < N`.
    pub fn monomial(ring: &Arc<Ring>, k: usize) -> Result<Self> {
        if k >= ring.n() {
            return Err(Error::OutOfRange(format!("monomial degree {k} >= N")));
        }
        let mut p = Self::zero(ring);
        p.coeffs[k] = 1;
        Ok(p)
    }

    /// Coefficient-form polynomial; every entry must already lie in `[0, q)`.
    pub fn from_coeffs(ring: &Arc<Ring>, coeffs: Vec<u128>) -> Result<Self> {
        Self::from_values(ring, coeffs, Representation::Coefficient)
    }

    pub fn from_values(ring: &Arc<Ring>, coeffs: Vec<u128>, repr: Representation) -> Result<Self> {
        if coeffs.len() != ring.n() {
            return Err(Error::LengthMismatch {
                expected: ring.n(),
                actual: coeffs.len(),
            });
        }
        if let Some(&value) = coeffs.iter().find(|&&c| c >= ring.q()) {
            return Err(Error::UnreducedCoefficient { value, q: ring.q() });
        }
        if repr == Representation::Evaluation && !ring.has_ntt() {
            return Err(Error::NttUnavailable);
        }
        Ok(Self::from_raw(ring.clone(), coeffs, repr))
    }

    /// Coefficient-form polynomial from signed integers.
    pub fn from_signed(ring: &Arc<Ring>, values: &[i128]) -> Result<Self> {
        if values.len() != ring.n() {
            return Err(Error::LengthMismatch {
                expected: ring.n(),
                actual: values.len(),
            });
        }
        let coeffs = values
            .iter()
            .map(|&v| ring.modulus.reduce_i128(v))
            .collect();
        Ok(Self::from_raw(
            ring.clone(),
            coeffs,
            Representation::Coefficient,
        ))
    }

    pub fn ring(&self) -> &Arc<Ring> {
        &self.ring
    }

    pub fn coeffs(&self) -> &[u128] {
        &self.coeffs
    }

    pub fn representation(&self) -> Representation {
        self.repr
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    /// Coefficients lifted to `(-q/2, q/2]`.
    pub fn signed_coeffs(&self) -> Vec<i128> {
        self.coeffs
            .iter()
            .map(|&c| self.ring.modulus.lift_signed(c))
            .collect()
    }

    /// Largest `|c|` over the signed lift.
    pub fn infinity_norm(&self) -> u128 {
        self.signed_coeffs()
            .into_iter()
            .map(|c| c.unsigned_abs())
            .max()
            .unwrap_or(0)
    }

    pub fn to_evaluation(&self) -> Result<Self> {
        self.clone().into_evaluation()
    }

    pub fn into_evaluation(mut self) -> Result<Self> {
        if self.repr == Representation::Evaluation {
            return Ok(self);
        }
        let tables = self.ring.ntt.as_ref().ok_or(Error::NttUnavailable)?;
        tables.forward(&self.ring.modulus, &mut self.coeffs);
        counter::record(Op::NttForward);
        self.repr = Representation::Evaluation;
        Ok(self)
    }

    pub fn to_coefficient(&self) -> Self {
        self.clone().into_coefficient()
    }

    pub fn into_coefficient(mut self) -> Self {
        if self.repr == Representation::Coefficient {
            return self;
        }
        let tables = self
            .ring
            .ntt
            .as_ref()
            .expect("evaluation form implies NTT tables");
        tables.inverse(&self.ring.modulus, &mut self.coeffs);
        counter::record(Op::NttInverse);
        self.repr = Representation::Coefficient;
        self
    }

    /// Converts to `repr`, a no-op when already there.
    pub fn into_representation(self, repr: Representation) -> Result<Self> {
        match repr {
            Representation::Coefficient => Ok(self.into_coefficient()),
            Representation::Evaluation => self.into_evaluation(),
        }
    }

    pub(crate) fn check_compatible(&self, other: &Poly) -> Result<()> {
        if !self.ring.same_as(&other.ring) {
            return Err(Error::ParamMismatch {
                left_n: self.ring.n(),
                left_q: self.ring.q(),
                right_n: other.ring.n(),
                right_q: other.ring.q(),
            });
        }
        if self.repr != other.repr {
            return Err(Error::RepresentationMismatch);
        }
        Ok(())
    }

    pub fn add_assign(&mut self, other: &Poly) -> Result<()> {
        self.check_compatible(other)?;
        let m = &self.ring.modulus;
        for (a, &b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a = m.add(*a, b);
        }
        counter::record(Op::Add);
        Ok(())
    }

    pub fn sub_assign(&mut self, other: &Poly) -> Result<()> {
        self.check_compatible(other)?;
        let m = &self.ring.modulus;
        for (a, &b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a = m.sub(*a, b);
        }
        counter::record(Op::Sub);
        Ok(())
    }

    /// Coefficient-wise `(a + b) mod q`.
    #[allow(clippy::should_implement_trait)]
    pub fn add(&self, other: &Poly) -> Result<Poly> {
        let mut out = self.clone();
        out.add_assign(other)?;
        Ok(out)
    }

    /// Coefficient-wise `(a - b) mod q`.
    #[allow(clippy::should_implement_trait)]
    pub fn sub(&self, other: &Poly) -> Result<Poly> {
        let mut out = self.clone();
        out.sub_assign(other)?;
        Ok(out)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn neg(&self) -> Poly {
        let m = &self.ring.modulus;
        let coeffs = self.coeffs.iter().map(|&c| m.neg(c)).collect();
        Self::from_raw(self.ring.clone(), coeffs, self.repr)
    }

    /// Product in the ring. Coefficient-form operands go through the NTT
    /// when available and fall back to schoolbook otherwise; evaluation-form
    /// operands multiply pointwise.
    #[allow(clippy::should_implement_trait)]
    pub fn mul(&self, other: &Poly) -> Result<Poly> {
        self.check_compatible(other)?;
        match self.repr {
            Representation::Evaluation => {
                let m = &self.ring.modulus;
                let coeffs = self
                    .coeffs
                    .iter()
                    .zip(&other.coeffs)
                    .map(|(&a, &b)| m.mul(a, b))
                    .collect();
                counter::record(Op::Mul);
                Ok(Self::from_raw(self.ring.clone(), coeffs, self.repr))
            }
            Representation::Coefficient if self.ring.has_ntt() => {
                let a = self.to_evaluation()?;
                let b = other.to_evaluation()?;
                Ok(a.mul(&b)?.into_coefficient())
            }
            Representation::Coefficient => self.mul_schoolbook(other),
        }
    }

    /// O(N^2) negacyclic convolution; the reference the NTT path must match.
    pub fn mul_schoolbook(&self, other: &Poly) -> Result<Poly> {
        self.check_compatible(other)?;
        if self.repr != Representation::Coefficient {
            return Err(Error::RepresentationMismatch);
        }
        let n = self.ring.n();
        let m = &self.ring.modulus;
        let mut out = vec![0u128; n];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                let prod = m.mul(a, b);
                let k = i + j;
                if k < n {
                    out[k] = m.add(out[k], prod);
                } else {
                    out[k - n] = m.sub(out[k - n], prod);
                }
            }
        }
        counter::record(Op::Mul);
        Ok(Self::from_raw(self.ring.clone(), out, self.repr))
    }

    /// `(z * a_i) mod q` for every coefficient, with `z` reduced mod q first.
    pub fn scalar_mul(&self, z: i128) -> Poly {
        let m = &self.ring.modulus;
        let w = m.shoup(m.reduce_i128(z));
        let coeffs = self.coeffs.iter().map(|&c| m.mul_shoup(c, w)).collect();
        counter::record(Op::ScalarMul);
        Self::from_raw(self.ring.clone(), coeffs, self.repr)
    }
}

/// A fixed multiplicand with per-coefficient Shoup companions, for operands
/// that are multiplied many times (public-key components).
#[derive(Clone, Debug)]
pub struct PreparedPoly {
    poly: Poly,
    shoup: Vec<ShoupConst>,
}

impl PreparedPoly {
    pub fn new(poly: Poly) -> Self {
        let m = poly.ring.modulus.clone();
        let shoup = poly.coeffs.iter().map(|&c| m.shoup(c)).collect();
        Self { poly, shoup }
    }

    pub fn poly(&self) -> &Poly {
        &self.poly
    }

    /// Pointwise product with an evaluation-form operand, or a full ring
    /// product when the ring has no NTT.
    pub fn mul(&self, other: &Poly) -> Result<Poly> {
        self.poly.check_compatible(other)?;
        if self.poly.repr == Representation::Coefficient {
            return self.poly.mul(other);
        }
        let m = &self.poly.ring.modulus;
        let coeffs = other
            .coeffs
            .iter()
            .zip(&self.shoup)
            .map(|(&a, &w)| m.mul_shoup(a, w))
            .collect();
        counter::record(Op::Mul);
        Ok(Poly::from_raw(
            self.poly.ring.clone(),
            coeffs,
            self.poly.repr,
        ))
    }
}
