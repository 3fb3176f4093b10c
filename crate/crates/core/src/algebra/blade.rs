//! Basis-blade bitmask arithmetic.
//!
//! A basis blade is a bitmask over the basis vectors; bit i set means the
//! blade contains e_i. Canonical order is ascending bit index, and the sign
//! of a product is the parity of the transpositions needed to restore it.

use crate::algebra::sig::Signature;

/// Grade of a basis blade.
pub fn grade(mask: usize) -> usize {
    mask.count_ones() as usize
}

/// Sign from reordering e_A e_B into ascending canonical order, ignoring the
/// metric. Counts pairs (i in A, j in B) with j < i.
pub fn reorder_sign(a: usize, b: usize) -> f64 {
    let mut a = a >> 1;
    let mut swaps = 0u32;
    while a != 0 {
        swaps += (a & b).count_ones();
        a >>= 1;
    }
    if swaps % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Product of two basis blades under the metric. Returns `None` when the
/// product vanishes (a shared degenerate vector squares to zero).
pub fn product(sig: &Signature, a: usize, b: usize) -> Option<(f64, usize)> {
    let mut sign = reorder_sign(a, b);
    let mut common = a & b;
    while common != 0 {
        let bit = common.trailing_zeros() as usize;
        let g = sig.metric(bit);
        if g == 0.0 {
            return None;
        }
        sign *= g;
        common &= common - 1;
    }
    Some((sign, a ^ b))
}

/// Sign of the reverse on a grade-k blade: (-1)^{k(k-1)/2}.
pub fn reverse_sign(k: usize) -> f64 {
    if (k * k.wrapping_sub(1) / 2) % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Sign of the grade involution on a grade-k blade: (-1)^k.
pub fn involution_sign(k: usize) -> f64 {
    if k % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Sign of the Clifford conjugate on a grade-k blade: (-1)^{k(k+1)/2}.
pub fn conjugate_sign(k: usize) -> f64 {
    if (k * (k + 1) / 2) % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}
