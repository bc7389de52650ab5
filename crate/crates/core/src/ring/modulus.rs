//! Arithmetic modulo an odd `q < 2^125` held in `u128`.
//!
//! Products need 256 bits, so multiplication goes through either Montgomery
//! reduction (generic operands) or Shoup's precomputed-quotient trick (one
//! operand fixed, e.g. NTT twiddles or a scalar).

/// Largest supported modulus bit width. Leaves headroom for `a + b` and the
/// `[0, 2q)` intermediates of Montgomery and Shoup reduction.
pub const MAX_MODULUS_BITS: u32 = 125;

const LO: u128 = u64::MAX as u128;

/// Full 128x128 -> 256 bit product as `(hi, lo)`.
#[inline(always)]
pub fn widening_mul(a: u128, b: u128) -> (u128, u128) {
    let (a0, a1) = (a & LO, a >> 64);
    let (b0, b1) = (b & LO, b >> 64);
    let p00 = a0 * b0;
    let p01 = a0 * b1;
    let p10 = a1 * b0;
    let p11 = a1 * b1;
    let mid = (p00 >> 64) + (p01 & LO) + (p10 & LO);
    let lo = (p00 & LO) | (mid << 64);
    let hi = p11 + (p01 >> 64) + (p10 >> 64) + (mid >> 64);
    (hi, lo)
}

#[inline(always)]
fn mul_hi(a: u128, b: u128) -> u128 {
    widening_mul(a, b).0
}

/// A value `w < q` together with its Shoup companion `floor(w * 2^128 / q)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ShoupConst {
    pub value: u128,
    pub quotient: u128,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Modulus {
    q: u128,
    // -q^{-1} mod 2^128
    q_inv_neg: u128,
    // 2^256 mod q
    r2: u128,
}

impl Modulus {
    /// Returns `None` for even moduli, `q < 3` or `q >= 2^125`.
    pub fn new(q: u128) -> Option<Self> {
        if q < 3 || q.is_multiple_of(2) || 128 - q.leading_zeros() > MAX_MODULUS_BITS {
            return None;
        }
        // Newton iteration doubles the number of correct low bits each round.
        let mut inv = q;
        for _ in 0..7 {
            inv = inv.wrapping_mul(2u128.wrapping_sub(q.wrapping_mul(inv)));
        }
        debug_assert_eq!(q.wrapping_mul(inv), 1);

        let mut r = (u128::MAX % q + 1) % q;
        for _ in 0..128 {
            r = add_mod(r, r, q);
        }
        Some(Self {
            q,
            q_inv_neg: inv.wrapping_neg(),
            r2: r,
        })
    }

    #[inline(always)]
    pub fn value(&self) -> u128 {
        self.q
    }

    #[inline(always)]
    pub fn add(&self, a: u128, b: u128) -> u128 {
        add_mod(a, b, self.q)
    }

    #[inline(always)]
    pub fn sub(&self, a: u128, b: u128) -> u128 {
        if a >= b {
            a - b
        } else {
            a + self.q - b
        }
    }

    #[inline(always)]
    pub fn neg(&self, a: u128) -> u128 {
        if a == 0 {
            0
        } else {
            self.q - a
        }
    }

    /// `a * b * 2^-128 mod q` for `a, b < q`.
    #[inline(always)]
    fn mont_mul(&self, a: u128, b: u128) -> u128 {
        let (hi, lo) = widening_mul(a, b);
        let m = lo.wrapping_mul(self.q_inv_neg);
        let (mh, _) = widening_mul(m, self.q);
        // lo + m*q is 0 mod 2^128; it carries exactly when lo != 0.
        let t = hi + mh + (lo != 0) as u128;
        if t >= self.q {
            t - self.q
        } else {
            t
        }
    }

    #[inline(always)]
    pub fn mul(&self, a: u128, b: u128) -> u128 {
        self.mont_mul(self.mont_mul(a, b), self.r2)
    }

    pub fn pow(&self, base: u128, mut exp: u128) -> u128 {
        let mut acc = 1 % self.q;
        let mut b = base % self.q;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, b);
            }
            b = self.mul(b, b);
            exp >>= 1;
        }
        acc
    }

    /// Inverse via Fermat; only meaningful when `q` is prime.
    pub fn inv_prime(&self, a: u128) -> u128 {
        self.pow(a, self.q - 2)
    }

    /// Reduces a signed integer into `[0, q)`.
    pub fn reduce_i128(&self, v: i128) -> u128 {
        let q = self.q as i128;
        let r = v % q;
        if r < 0 {
            (r + q) as u128
        } else {
            r as u128
        }
    }

    /// Maps `v` to the signed range `(-q/2, q/2]`.
    pub fn lift_signed(&self, v: u128) -> i128 {
        if v > self.q / 2 {
            -((self.q - v) as i128)
        } else {
            v as i128
        }
    }

    pub fn shoup(&self, w: u128) -> ShoupConst {
        debug_assert!(w < self.q);
        // Long division of w * 2^128 by q; w < q keeps the quotient in 128 bits.
        let mut rem = w;
        let mut quotient = 0u128;
        for _ in 0..128 {
            rem <<= 1;
            quotient <<= 1;
            if rem >= self.q {
                rem -= self.q;
                quotient |= 1;
            }
        }
        ShoupConst { value: w, quotient }
    }

    /// `a * w mod q` for any `a < 2^128`; result in `[0, q)`.
    #[inline(always)]
    pub fn mul_shoup(&self, a: u128, w: ShoupConst) -> u128 {
        let r = self.mul_shoup_lazy(a, w);
        if r >= self.q {
            r - self.q
        } else {
            r
        }
    }

    /// Same as [`Self::mul_shoup`] but leaves the result in `[0, 2q)`.
    #[inline(always)]
    pub fn mul_shoup_lazy(&self, a: u128, w: ShoupConst) -> u128 {
        let est = mul_hi(a, w.quotient);
        a.wrapping_mul(w.value)
            .wrapping_sub(est.wrapping_mul(self.q))
    }

    /// Miller-Rabin over the first 24 prime bases.
    pub fn is_probably_prime(&self) -> bool {
        const BASES: [u128; 24] = [
            2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83,
            89,
        ];
        let q = self.q;
        if BASES.contains(&q) {
            return true;
        }
        if BASES.iter().any(|&p| q.is_multiple_of(p)) {
            return false;
        }
        let mut d = q - 1;
        let mut s = 0;
        while d.is_multiple_of(2) {
            d /= 2;
            s += 1;
        }
        'witness: for &a in BASES.iter() {
            let mut x = self.pow(a, d);
            if x == 1 || x == q - 1 {
                continue;
            }
            for _ in 1..s {
                x = self.mul(x, x);
                if x == q - 1 {
                    continue 'witness;
                }
            }
            return false;
        }
        true
    }
}

#[inline(always)]
fn add_mod(a: u128, b: u128, q: u128) -> u128 {
    let s = a + b;
    if s >= q {
        s - q
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const Q119: u128 = 0x7f_ffff_ffff_ffff_ffff_ffff_ff78_0001;

    // Reference product reduced with shift-and-add; independent of the
    // Montgomery and Shoup paths.
    fn mul_mod_slow(a: u128, b: u128, q: u128) -> u128 {
        let mut acc = 0u128;
        let mut x = a % q;
        let mut y = b;
        while y > 0 {
            if y & 1 == 1 {
                acc = add_mod(acc, x, q);
            }
            x = add_mod(x, x, q);
            y >>= 1;
        }
        acc
    }

    #[test]
    fn rejects_bad_moduli() {
        assert!(Modulus::new(0).is_none());
        assert!(Modulus::new(2).is_none());
        assert!(Modulus::new(1024).is_none());
        assert!(Modulus::new(1u128 << 126 | 1).is_none());
        assert!(Modulus::new(17).is_some());
    }

    #[test]
    fn widening_mul_small_cases() {
        assert_eq!(widening_mul(u128::MAX, u128::MAX), (u128::MAX - 1, 1));
        assert_eq!(widening_mul(1 << 64, 1 << 64), (1, 0));
        assert_eq!(widening_mul(3, 5), (0, 15));
    }

    #[test]
    fn primality() {
        assert!(Modulus::new(12289).unwrap().is_probably_prime());
        assert!(Modulus::new(17).unwrap().is_probably_prime());
        assert!(Modulus::new(Q119).unwrap().is_probably_prime());
        assert!(!Modulus::new(12289 * 17).unwrap().is_probably_prime());
    }

    #[test]
    fn signed_lift_and_reduce() {
        let m = Modulus::new(17).unwrap();
        assert_eq!(m.reduce_i128(-3), 14);
        assert_eq!(m.lift_signed(14), -3);
        assert_eq!(m.lift_signed(8), 8);
        assert_eq!(m.lift_signed(9), -8);
    }

    proptest! {
        #[test]
        fn mul_matches_slow(a in 0..Q119, b in 0..Q119) {
            let m = Modulus::new(Q119).unwrap();
            let expect = mul_mod_slow(a, b, Q119);
            prop_assert_eq!(m.mul(a, b), expect);
            prop_assert_eq!(m.mul_shoup(a, m.shoup(b)), expect);
        }

        #[test]
        fn mul_small_modulus(a in 0u128..12289, b in 0u128..12289) {
            let m = Modulus::new(12289).unwrap();
            prop_assert_eq!(m.mul(a, b), a * b % 12289);
            prop_assert_eq!(m.mul_shoup(a, m.shoup(b)), a * b % 12289);
        }

        #[test]
        fn inverse_roundtrip(a in 1..Q119) {
            let m = Modulus::new(Q119).unwrap();
            prop_assert_eq!(m.mul(a, m.inv_prime(a)), 1);
        }
    }
}
