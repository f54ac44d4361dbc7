//! Exact LCS computation.
//!
//! The slice functions (`length`, `length_bitparallel`, `traceback`) take raw
//! symbol slices and are what the Monte Carlo code calls in its inner loops.
//! The `SymbolSequence` wrappers check that both inputs share an alphabet.

use crate::error::Result;
use crate::seq::{Alignment, SymbolSequence};

/// LCS length by the quadratic DP, keeping two rows.
pub fn length(x: &[u8], y: &[u8]) -> usize {
    if x.is_empty() || y.is_empty() {
        return 0;
    }
    let mut prev = vec![0u32; y.len() + 1];
    let mut cur = vec![0u32; y.len() + 1];
    for &a in x {
        for (j, &b) in y.iter().enumerate() {
            cur[j + 1] = if a == b {
                prev[j] + 1
            } else {
                prev[j + 1].max(cur[j])
            };
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[y.len()] as usize
}

/// LCS length by the word-parallel bit-vector recurrence.
///
/// `y` is packed into 64-bit words with one occurrence mask per symbol. For
/// each symbol of `x` the state vector `v` is updated as
/// `v = (v + (v & m)) | (v & !m)` with carries propagated across words; the
/// LCS length is the number of zero bits among the first `|y|` bits of `v`.
pub fn length_bitparallel(x: &[u8], y: &[u8]) -> usize {
    if x.is_empty() || y.is_empty() {
        return 0;
    }
    let words = y.len().div_ceil(64);
    let sigma = y.iter().chain(x).copied().max().unwrap_or(0) as usize + 1;
    let mut masks = vec![0u64; sigma * words];
    for (j, &b) in y.iter().enumerate() {
        masks[b as usize * words + j / 64] |= 1u64 << (j % 64);
    }

    let mut v = vec![!0u64; words];
    for &a in x {
        let m = &masks[a as usize * words..(a as usize + 1) * words];
        let mut carry = 0u64;
        for (vw, &mw) in v.iter_mut().zip(m) {
            let u = *vw & mw;
            let (s1, c1) = vw.overflowing_add(u);
            let (s2, c2) = s1.overflowing_add(carry);
            carry = (c1 | c2) as u64;
            *vw = s2 | (*vw & !mw);
        }
    }

    let tail = y.len() % 64;
    let mut zeros = 0usize;
    for (w, &vw) in v.iter().enumerate() {
        let live = if w + 1 == words && tail != 0 {
            (1u64 << tail) - 1
        } else {
            !0u64
        };
        zeros += (!vw & live).count_ones() as usize;
    }
    zeros
}

/// Full `(|x|+1) x (|y|+1)` table of prefix LCS lengths, row-major.
pub(crate) fn prefix_table(x: &[u8], y: &[u8]) -> Vec<u32> {
    let w = y.len() + 1;
    let mut t = vec![0u32; (x.len() + 1) * w];
    for i in 1..=x.len() {
        for j in 1..=y.len() {
            t[i * w + j] = if x[i - 1] == y[j - 1] {
                t[(i - 1) * w + j - 1] + 1
            } else {
                t[(i - 1) * w + j].max(t[i * w + j - 1])
            };
        }
    }
    t
}

/// One optimal alignment, traced back from `(|x|, |y|)` with the fixed
/// preference diagonal > up (skip `x[i-1]`) > left (skip `y[j-1]`).
pub fn traceback(x: &[u8], y: &[u8]) -> Alignment {
    let t = prefix_table(x, y);
    let w = y.len() + 1;
    let (mut i, mut j) = (x.len(), y.len());
    let mut pairs = Vec::with_capacity(t[i * w + j] as usize);
    while i > 0 && j > 0 {
        let here = t[i * w + j];
        if x[i - 1] == y[j - 1] && here == t[(i - 1) * w + j - 1] + 1 {
            pairs.push((i - 1, j - 1));
            i -= 1;
            j -= 1;
        } else if here == t[(i - 1) * w + j] {
            i -= 1;
        } else {
            j -= 1;
        }
    }
    pairs.reverse();
    Alignment::from_pairs_unchecked(pairs)
}

/// `|LCS(x, y)|`.
pub fn lcs_length(x: &SymbolSequence, y: &SymbolSequence) -> Result<usize> {
    x.check_same_alphabet(y)?;
    Ok(length(x.symbols(), y.symbols()))
}

/// `|LCS(x, y)|` via the bit-parallel path; always equal to [`lcs_length`].
pub fn lcs_length_bitparallel(x: &SymbolSequence, y: &SymbolSequence) -> Result<usize> {
    x.check_same_alphabet(y)?;
    Ok(length_bitparallel(x.symbols(), y.symbols()))
}

/// A deterministic optimal alignment of `x` and `y`.
pub fn one_optimal_alignment(x: &SymbolSequence, y: &SymbolSequence) -> Result<Alignment> {
    x.check_same_alphabet(y)?;
    Ok(traceback(x.symbols(), y.symbols()))
}
