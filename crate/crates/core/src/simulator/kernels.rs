//! Amplitude sweeps. Each kernel touches every amplitude pair (or amplitude)
//! independently, so the parallel variants produce bit-identical output to
//! the sequential ones.

use num_complex::Complex64;

/// Selects basis states whose masked bits equal `value`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Condition {
    pub mask: usize,
    pub value: usize,
}

impl Condition {
    #[inline]
    pub fn holds(self, index: usize) -> bool {
        index & self.mask == self.value
    }
}

/// Applies `op(lo, hi)` to every pair `(i, i | 1 << target)` with bit
/// `target` of `i` clear and `cond` true for `i`.
pub(crate) fn pairs_seq<F>(amps: &mut [Complex64], target: usize, cond: Condition, op: F)
where
    F: Fn(&mut Complex64, &mut Complex64),
{
    let half = 1usize << target;
    for (block, chunk) in amps.chunks_mut(half << 1).enumerate() {
        let base = block * (half << 1);
        let (lo, hi) = chunk.split_at_mut(half);
        for (k, (a, b)) in lo.iter_mut().zip(hi.iter_mut()).enumerate() {
            if cond.holds(base + k) {
                op(a, b);
            }
        }
    }
}

/// Multiplies every amplitude with `cond` true by -1.
pub(crate) fn negate_seq(amps: &mut [Complex64], cond: Condition) {
    for (i, a) in amps.iter_mut().enumerate() {
        if cond.holds(i) {
            *a = -*a;
        }
    }
}

#[cfg(feature = "parallel")]
mod par {
    use super::Condition;
    use num_complex::Complex64;
    use rayon::prelude::*;

    /// Pairs per rayon task.
    const MIN_LEN: usize = 1 << 10;

    pub(crate) fn pairs_par<F>(amps: &mut [Complex64], target: usize, cond: Condition, op: F)
    where
        F: Fn(&mut Complex64, &mut Complex64) + Sync,
    {
        let half = 1usize << target;
        if half >= MIN_LEN {
            // few wide blocks: split inside each block
            for (block, chunk) in amps.chunks_mut(half << 1).enumerate() {
                let base = block * (half << 1);
                let (lo, hi) = chunk.split_at_mut(half);
                lo.par_iter_mut()
                    .zip(hi.par_iter_mut())
                    .enumerate()
                    .with_min_len(MIN_LEN)
                    .for_each(|(k, (a, b))| {
                        if cond.holds(base + k) {
                            op(a, b);
                        }
                    });
            }
        } else {
            let blocks_per_task = (MIN_LEN / half).max(1);
            amps.par_chunks_mut(half << 1)
                .enumerate()
                .with_min_len(blocks_per_task)
                .for_each(|(block, chunk)| {
                    let base = block * (half << 1);
                    let (lo, hi) = chunk.split_at_mut(half);
                    for (k, (a, b)) in lo.iter_mut().zip(hi.iter_mut()).enumerate() {
                        if cond.holds(base + k) {
                            op(a, b);
                        }
                    }
                });
        }
    }

    pub(crate) fn negate_par(amps: &mut [Complex64], cond: Condition) {
        amps.par_iter_mut()
            .enumerate()
            .with_min_len(MIN_LEN)
            .for_each(|(i, a)| {
                if cond.holds(i) {
                    *a = -*a;
                }
            });
    }
}

#[cfg(feature = "parallel")]
pub(crate) use par::{negate_par, pairs_par};
