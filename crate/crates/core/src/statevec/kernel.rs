//! Bit-mask gate kernels over a little-endian amplitude array.
//!
//! Every kernel updates disjoint amplitude groups, so splitting the loop
//! across rayon workers produces the same bits as the sequential order.

use num_complex::Complex64;
use rayon::prelude::*;

/// Arrays at least this long are split across workers.
const PAR_MIN_LEN: usize = 1 << 14;
/// Sub-chunk length handed to one worker.
const PAR_CHUNK: usize = 1 << 11;

/// Which amplitude groups a gate acts on: all `ctrl_mask` bits set and, if
/// `parity_mask` is nonzero, an odd number of `parity_mask` bits set.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct Selector {
    pub ctrl_mask: usize,
    pub parity_mask: usize,
}

impl Selector {
    #[inline(always)]
    fn accepts(&self, index: usize) -> bool {
        index & self.ctrl_mask == self.ctrl_mask
            && (self.parity_mask == 0 || (index & self.parity_mask).count_ones() & 1 == 1)
    }
}

#[derive(Clone, Copy)]
pub(crate) enum SingleOp {
    Swap,
    Matrix([Complex64; 4]),
}

#[inline(always)]
fn pair_loop(lo: &mut [Complex64], hi: &mut [Complex64], base: usize, op: SingleOp, sel: Selector) {
    match op {
        SingleOp::Swap => {
            for (j, (a, b)) in lo.iter_mut().zip(hi.iter_mut()).enumerate() {
                if sel.accepts(base + j) {
                    std::mem::swap(a, b);
                }
            }
        }
        SingleOp::Matrix([m00, m01, m10, m11]) => {
            for (j, (a, b)) in lo.iter_mut().zip(hi.iter_mut()).enumerate() {
                if sel.accepts(base + j) {
                    let (x0, x1) = (*a, *b);
                    *a = m00 * x0 + m01 * x1;
                    *b = m10 * x0 + m11 * x1;
                }
            }
        }
    }
}

/// Applies a 2x2 operation to `target` on every selected amplitude pair.
pub(crate) fn apply_single(amps: &mut [Complex64], target: usize, op: SingleOp, sel: Selector) {
    let stride = 1usize << target;
    let block = stride << 1;
    let blocks = amps.len() / block;

    let run_block = |b: usize, chunk: &mut [Complex64]| {
        let (lo, hi) = chunk.split_at_mut(stride);
        pair_loop(lo, hi, b * block, op, sel);
    };

    if amps.len() < PAR_MIN_LEN {
        amps.chunks_mut(block).enumerate().for_each(|(b, c)| run_block(b, c));
    } else if blocks >= 64 {
        amps.par_chunks_mut(block).enumerate().for_each(|(b, c)| run_block(b, c));
    } else {
        // Few, long blocks: split each pair of halves instead.
        for (b, chunk) in amps.chunks_mut(block).enumerate() {
            let (lo, hi) = chunk.split_at_mut(stride);
            lo.par_chunks_mut(PAR_CHUNK)
                .zip(hi.par_chunks_mut(PAR_CHUNK))
                .enumerate()
                .for_each(|(k, (l, h))| pair_loop(l, h, b * block + k * PAR_CHUNK, op, sel));
        }
    }
}

/// Applies a `2^k x 2^k` matrix to `targets` (first target = most significant
/// bit of the gate index) on every selected group.
pub(crate) fn apply_multi(amps: &mut [Complex64], matrix: &[Complex64], targets: &[usize], sel: Selector) {
    let k = targets.len();
    let dim = 1usize << k;
    let offsets: Vec<usize> = (0..dim)
        .map(|s| {
            targets
                .iter()
                .enumerate()
                .filter(|(b, _)| s >> (k - 1 - b) & 1 == 1)
                .map(|(_, &t)| 1usize << t)
                .sum()
        })
        .collect();
    let target_mask: usize = targets.iter().map(|&t| 1usize << t).sum();
    let block = 1usize << (targets.iter().max().copied().unwrap_or(0) + 1);

    let run_block = |b: usize, chunk: &mut [Complex64]| {
        let mut gathered = vec![Complex64::new(0.0, 0.0); dim];
        let base = b * block;
        for local in 0..chunk.len() {
            if local & target_mask != 0 || !sel.accepts(base + local) {
                continue;
            }
            for (s, g) in gathered.iter_mut().enumerate() {
                *g = chunk[local + offsets[s]];
            }
            for r in 0..dim {
                let row = &matrix[r * dim..(r + 1) * dim];
                chunk[local + offsets[r]] = row.iter().zip(&gathered).map(|(m, g)| m * g).sum();
            }
        }
    };

    if amps.len() >= PAR_MIN_LEN && amps.len() / block >= 16 {
        amps.par_chunks_mut(block).enumerate().for_each(|(b, c)| run_block(b, c));
    } else {
        amps.chunks_mut(block).enumerate().for_each(|(b, c)| run_block(b, c));
    }
}

/// Multiplies by `-1` every amplitude whose index satisfies `flip`.
pub(crate) fn apply_sign<F>(amps: &mut [Complex64], flip: F)
where
    F: Fn(usize) -> bool + Sync,
{
    let apply = |(offset, chunk): (usize, &mut [Complex64])| {
        for (j, a) in chunk.iter_mut().enumerate() {
            if flip(offset * PAR_CHUNK + j) {
                *a = -*a;
            }
        }
    };
    if amps.len() >= PAR_MIN_LEN {
        amps.par_chunks_mut(PAR_CHUNK).enumerate().for_each(apply);
    } else {
        amps.chunks_mut(PAR_CHUNK).enumerate().for_each(apply);
    }
}
