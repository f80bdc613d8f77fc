//! Exact subset enumeration and compensated summation.

use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Largest ground set enumerated exactly.
pub const MAX_POINTS: usize = 20;

pub fn check_size(n: usize) -> Result<()> {
    if n > MAX_POINTS {
        Err(Error::SubsetBlowup(n))
    } else {
        Ok(())
    }
}

/// Bit masks of all subsets of `{0, .., n-1}` with exactly `k` elements, in increasing order.
pub fn masks_of_size(n: usize, k: usize) -> Vec<u32> {
    (0u32..(1u32 << n)).filter(|m| m.count_ones() as usize == k).collect()
}

/// Indices set in `mask`.
pub fn members(mask: u32) -> impl Iterator<Item = usize> {
    (0..32).filter(move |i| mask & (1 << i) != 0)
}

/// Binomial coefficient as `f64`, exact while the result fits in 53 bits.
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    libm::round(acc)
}

/// Neumaier's compensated sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}
