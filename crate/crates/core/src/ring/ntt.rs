//! Negacyclic number-theoretic transform over `Z_q[X]/(X^N + 1)`.
//!
//! Forward is Cooley-Tukey (natural order in, bit-reversed out), inverse is
//! Gentleman-Sande (bit-reversed in, natural out) with `N^{-1}` folded into
//! the last pass. Both only need `q` prime with `q = 1 mod 2N`.

use super::modulus::{Modulus, ShoupConst};

#[derive(Clone, Debug)]
pub struct NttTables {
    n: usize,
    // psi^{bitrev(i)}
    roots: Vec<ShoupConst>,
    // psi^{-bitrev(i)}
    inv_roots: Vec<ShoupConst>,
    n_inv: ShoupConst,
}

fn bit_reverse(mut x: usize, bits: u32) -> usize {
    let mut r = 0;
    for _ in 0..bits {
        r = (r << 1) | (x & 1);
        x >>= 1;
    }
    r
}

impl NttTables {
    /// Builds tables for degree `n`, or `None` when `q` has no primitive
    /// `2n`-th root of unity.
    pub fn new(modulus: &Modulus, n: usize) -> Option<Self> {
        let q = modulus.value();
        let two_n = 2 * n as u128;
        if !n.is_power_of_two() || !(q - 1).is_multiple_of(two_n) || !modulus.is_probably_prime() {
            return None;
        }
        let psi = find_primitive_root(modulus, n)?;
        let psi_inv = modulus.inv_prime(psi);
        let bits = n.trailing_zeros();

        let mut pow = vec![1u128; n];
        let mut pow_inv = vec![1u128; n];
        for i in 1..n {
            pow[i] = modulus.mul(pow[i - 1], psi);
            pow_inv[i] = modulus.mul(pow_inv[i - 1], psi_inv);
        }
        let roots = (0..n)
            .map(|i| modulus.shoup(pow[bit_reverse(i, bits)]))
            .collect();
        let inv_roots = (0..n)
            .map(|i| modulus.shoup(pow_inv[bit_reverse(i, bits)]))
            .collect();
        let n_inv = modulus.shoup(modulus.inv_prime(n as u128 % q));
        Some(Self {
            n,
            roots,
            inv_roots,
            n_inv,
        })
    }

    pub fn forward(&self, modulus: &Modulus, a: &mut [u128]) {
        debug_assert_eq!(a.len(), self.n);
        let mut t = self.n;
        let mut m = 1;
        while m < self.n {
            t >>= 1;
            for i in 0..m {
                let w = self.roots[m + i];
                let start = 2 * i * t;
                let (lo, hi) = a[start..start + 2 * t].split_at_mut(t);
                for (x, y) in lo.iter_mut().zip(hi.iter_mut()) {
                    let u = *x;
                    let v = modulus.mul_shoup(*y, w);
                    *x = modulus.add(u, v);
                    *y = modulus.sub(u, v);
                }
            }
            m <<= 1;
        }
    }

    pub fn inverse(&self, modulus: &Modulus, a: &mut [u128]) {
        debug_assert_eq!(a.len(), self.n);
        let mut t = 1;
        let mut m = self.n;
        while m > 1 {
            let h = m >> 1;
            for i in 0..h {
                let w = self.inv_roots[h + i];
                let start = 2 * i * t;
                let (lo, hi) = a[start..start + 2 * t].split_at_mut(t);
                for (x, y) in lo.iter_mut().zip(hi.iter_mut()) {
                    let u = *x;
                    let v = *y;
                    *x = modulus.add(u, v);
                    *y = modulus.mul_shoup(modulus.sub(u, v), w);
                }
            }
            t <<= 1;
            m = h;
        }
        for x in a.iter_mut() {
            *x = modulus.mul_shoup(*x, self.n_inv);
        }
    }
}

/// Smallest-generator search for `psi` with `psi^n = -1`, which for a
/// power-of-two `n` means `psi` has order exactly `2n`.
fn find_primitive_root(modulus: &Modulus, n: usize) -> Option<u128> {
    let q = modulus.value();
    let exp = (q - 1) / (2 * n as u128);
    (2..q.min(1 << 16)).find_map(|g| {
        let psi = modulus.pow(g, exp);
        (modulus.pow(psi, n as u128) == q - 1).then_some(psi)
    })
}
