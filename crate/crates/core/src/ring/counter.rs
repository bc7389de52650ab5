//! Per-thread instrumentation of polynomial-level operations.
//!
//! Counts are exact and machine independent, which makes them the stable
//! complement to wall-clock timings.

use std::cell::Cell;
use std::ops::{Add, Sub};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct OpCounts {
    pub add: u64,
    pub sub: u64,
    pub mul: u64,
    pub scalar_mul: u64,
    pub ntt_forward: u64,
    pub ntt_inverse: u64,
}

impl OpCounts {
    pub fn total(&self) -> u64 {
        self.add + self.sub + self.mul + self.scalar_mul + self.ntt_forward + self.ntt_inverse
    }
}

impl Add for OpCounts {
    type Output = OpCounts;

    fn add(self, o: OpCounts) -> OpCounts {
        OpCounts {
            add: self.add + o.add,
            sub: self.sub + o.sub,
            mul: self.mul + o.mul,
            scalar_mul: self.scalar_mul + o.scalar_mul,
            ntt_forward: self.ntt_forward + o.ntt_forward,
            ntt_inverse: self.ntt_inverse + o.ntt_inverse,
        }
    }
}

impl Sub for OpCounts {
    type Output = OpCounts;

    fn sub(self, o: OpCounts) -> OpCounts {
        OpCounts {
            add: self.add - o.add,
            sub: self.sub - o.sub,
            mul: self.mul - o.mul,
            scalar_mul: self.scalar_mul - o.scalar_mul,
            ntt_forward: self.ntt_forward - o.ntt_forward,
            ntt_inverse: self.ntt_inverse - o.ntt_inverse,
        }
    }
}

#[derive(Clone, Copy)]
pub(crate) enum Op {
    Add,
    Sub,
    Mul,
    ScalarMul,
    NttForward,
    NttInverse,
}

thread_local! {
    static COUNTS: Cell<OpCounts> = const { Cell::new(OpCounts {
        add: 0, sub: 0, mul: 0, scalar_mul: 0, ntt_forward: 0, ntt_inverse: 0,
    }) };
}

#[inline]
pub(crate) fn record(op: Op) {
    COUNTS.with(|c| {
        let mut v = c.get();
        match op {
            Op::Add => v.add += 1,
            Op::Sub => v.sub += 1,
            Op::Mul => v.mul += 1,
            Op::ScalarMul => v.scalar_mul += 1,
            Op::NttForward => v.ntt_forward += 1,
            Op::NttInverse => v.ntt_inverse += 1,
        }
        c.set(v);
    });
}

/// Running totals for the current thread.
pub fn snapshot() -> OpCounts {
    COUNTS.with(|c| c.get())
}

/// Runs `f` and returns its result together with the operations it performed
/// on this thread.
pub fn measure<R>(f: impl FnOnce() -> R) -> (R, OpCounts) {
    let before = snapshot();
    let out = f();
    (out, snapshot() - before)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn measure_isolates_block() {
        record(Op::Add);
        let ((), counts) = measure(|| {
            record(Op::Mul);
            record(Op::Mul);
            record(Op::NttForward);
        });
        assert_eq!(counts.mul, 2);
        assert_eq!(counts.add, 0);
        assert_eq!(counts.total(), 3);
    }
}
