//! Small-instance oracles used to check the fast paths.
//!
//! Neither function shares code with the DP in [`crate::lcs`]: the brute
//! force enumerates subsequences, and the enumeration walks a suffix table.

use crate::error::{LabError, Result};
use crate::seq::{Alignment, SymbolSequence};

/// Combined length limit for [`brute_force_lcs`].
pub const BRUTE_FORCE_MAX_TOTAL: usize = 30;
/// Per-string length limit for [`enumerate_optimal_alignments`].
pub const ENUMERATION_MAX_LEN: usize = 14;

/// Exhaustive LCS length: tries every subsequence of the shorter string,
/// largest first, and greedily tests whether it is a subsequence of the other.
pub fn brute_force_lcs(x: &SymbolSequence, y: &SymbolSequence) -> Result<usize> {
    x.check_same_alphabet(y)?;
    if x.len() + y.len() > BRUTE_FORCE_MAX_TOTAL {
        return Err(LabError::invalid(format!(
            "brute force limited to |x|+|y| <= {BRUTE_FORCE_MAX_TOTAL}, got {}",
            x.len() + y.len()
        )));
    }
    Ok(brute_force(x.symbols(), y.symbols()))
}

pub(crate) fn brute_force(x: &[u8], y: &[u8]) -> usize {
    let (short, long) = if x.len() <= y.len() { (x, y) } else { (y, x) };
    let n = short.len();
    let mut best = 0;
    let mut buf = Vec::with_capacity(n);
    for mask in 0u32..(1u32 << n) {
        let size = mask.count_ones() as usize;
        if size <= best {
            continue;
        }
        buf.clear();
        buf.extend((0..n).filter(|&i| mask >> i & 1 == 1).map(|i| short[i]));
        if is_subsequence(&buf, long) {
            best = size;
        }
    }
    best
}

fn is_subsequence(needle: &[u8], hay: &[u8]) -> bool {
    let mut it = hay.iter();
    needle.iter().all(|c| it.any(|h| h == c))
}

/// Result of [`enumerate_optimal_alignments`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlignmentEnumeration {
    pub alignments: Vec<Alignment>,
    /// Set when more optimal alignments exist than `cap` allowed.
    pub truncated: bool,
}

/// Every optimal alignment of `x` and `y` (as a set of matched pairs),
/// each listed once, up to `cap` of them.
pub fn enumerate_optimal_alignments(
    x: &SymbolSequence,
    y: &SymbolSequence,
    cap: usize,
) -> Result<AlignmentEnumeration> {
    x.check_same_alphabet(y)?;
    if cap == 0 {
        return Err(LabError::invalid("cap must be positive"));
    }
    if x.len() > ENUMERATION_MAX_LEN || y.len() > ENUMERATION_MAX_LEN {
        return Err(LabError::invalid(format!(
            "enumeration limited to strings of length <= {ENUMERATION_MAX_LEN}"
        )));
    }
    Ok(enumerate(x.symbols(), y.symbols(), cap))
}

pub(crate) fn enumerate(x: &[u8], y: &[u8], cap: usize) -> AlignmentEnumeration {
    // suffix[i][j] = |LCS(x[i..], y[j..])|
    let w = y.len() + 1;
    let mut suffix = vec![0usize; (x.len() + 1) * w];
    for i in (0..x.len()).rev() {
        for j in (0..y.len()).rev() {
            suffix[i * w + j] = if x[i] == y[j] {
                1 + suffix[(i + 1) * w + j + 1]
            } else {
                suffix[(i + 1) * w + j].max(suffix[i * w + j + 1])
            };
        }
    }

    let mut walk = Walk {
        x,
        y,
        suffix: &suffix,
        w,
        cap,
        chain: Vec::new(),
        out: Vec::new(),
        truncated: false,
    };
    walk.extend(0, 0);
    AlignmentEnumeration {
        alignments: walk.out,
        truncated: walk.truncated,
    }
}

struct Walk<'a> {
    x: &'a [u8],
    y: &'a [u8],
    suffix: &'a [usize],
    w: usize,
    cap: usize,
    chain: Vec<(usize, usize)>,
    out: Vec<Alignment>,
    truncated: bool,
}

impl Walk<'_> {
    /// Extends the current chain with every next pair `(i, j)`, `i >= i0`,
    /// `j >= j0`, that keeps the chain on an optimal alignment.
    fn extend(&mut self, i0: usize, j0: usize) {
        let need = self.suffix[i0 * self.w + j0];
        if need == 0 {
            if self.out.len() == self.cap {
                self.truncated = true;
            } else {
                self.out
                    .push(Alignment::from_pairs_unchecked(self.chain.clone()));
            }
            return;
        }
        for i in i0..self.x.len() {
            for j in j0..self.y.len() {
                if self.truncated {
                    return;
                }
                if self.x[i] == self.y[j] && 1 + self.suffix[(i + 1) * self.w + j + 1] == need {
                    self.chain.push((i, j));
                    self.extend(i + 1, j + 1);
                    self.chain.pop();
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seq::Alphabet;
    use std::collections::HashSet;

    fn s(t: &str) -> SymbolSequence {
        SymbolSequence::parse_with(t, Alphabet::new(4).unwrap()).unwrap()
    }

    #[test]
    fn brute_force_examples() {
        assert_eq!(brute_force_lcs(&s("00011100"), &s("00011001")).unwrap(), 7);
        assert_eq!(brute_force_lcs(&s("0"), &s("1")).unwrap(), 0);
        assert_eq!(brute_force_lcs(&s(""), &s("0123")).unwrap(), 0);
        let long = s(&"0".repeat(16));
        assert!(brute_force_lcs(&long, &long).is_err());
    }

    #[test]
    fn enumeration_examples() {
        let e = enumerate_optimal_alignments(&s("01"), &s("10"), 100).unwrap();
        assert!(!e.truncated);
        let got: HashSet<_> = e.alignments.iter().map(|a| a.pairs().to_vec()).collect();
        let want: HashSet<_> = [vec![(0, 1)], vec![(1, 0)]].into_iter().collect();
        assert_eq!(got, want);

        let e = enumerate_optimal_alignments(&s("0123"), &s("0123"), 100).unwrap();
        assert_eq!(e.alignments.len(), 1);
        assert_eq!(e.alignments[0].pairs(), &[(0, 0), (1, 1), (2, 2), (3, 3)]);

        // "00" vs "00": the only score-2 matching is the identity.
        let e = enumerate_optimal_alignments(&s("00"), &s("00"), 100).unwrap();
        assert!(e.alignments.iter().all(|a| a.score() == 2));
        assert_eq!(e.alignments.len(), 1);

        // "0" against "000" has three optimal alignments.
        let e = enumerate_optimal_alignments(&s("0"), &s("000"), 100).unwrap();
        assert_eq!(e.alignments.len(), 3);
    }

    #[test]
    fn enumeration_cap_truncates() {
        let e = enumerate_optimal_alignments(&s("000"), &s("000000"), 5).unwrap();
        assert!(e.truncated);
        assert_eq!(e.alignments.len(), 5);
        // C(6,3) = 20 in total.
        let e = enumerate_optimal_alignments(&s("000"), &s("000000"), 20).unwrap();
        assert!(!e.truncated);
        assert_eq!(e.alignments.len(), 20);
        assert!(enumerate_optimal_alignments(&s("0"), &s("0"), 0).is_err());
        assert!(enumerate_optimal_alignments(&s(&"0".repeat(15)), &s("0"), 1).is_err());
    }
}
