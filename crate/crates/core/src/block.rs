//! Gap counts of a designated block over optimal alignments.
//!
//! Several optimal alignments usually exist, and they can leave different
//! numbers of block positions unmatched. [`extremal_block_gaps`] returns the
//! maximum or minimum of that number over *all* optimal alignments, by running
//! the LCS recurrence on pairs `(length, matched_in_block)` ordered
//! lexicographically.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::seq::{Alignment, SymbolSequence};

/// A contiguous interval `[start, start + length)` of `x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct BlockSpec {
    pub start: usize,
    pub length: usize,
}

impl BlockSpec {
    pub fn new(start: usize, length: usize) -> Self {
        BlockSpec { start, length }
    }

    pub fn end(&self) -> usize {
        self.start + self.length
    }

    pub fn contains(&self, i: usize) -> bool {
        i >= self.start && i < self.end()
    }

    /// Errors unless the block is non-empty and fits in a string of `len`.
    pub fn validate(&self, len: usize) -> Result<()> {
        if self.length == 0 {
            return Err(LabError::invalid("block length must be positive"));
        }
        if self.end() > len {
            return Err(LabError::invalid(format!(
                "block [{}, {}) exceeds string length {len}",
                self.start,
                self.end()
            )));
        }
        Ok(())
    }

    /// Twice the midpoint, kept integral.
    fn midpoint2(&self) -> usize {
        2 * self.start + self.length
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GapObjective {
    MaximizeGaps,
    MinimizeGaps,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockGapStats {
    pub lcs_len: usize,
    pub gaps: usize,
    pub matched_in_block: usize,
}

/// Number of block positions that `a` leaves unmatched.
pub fn gaps_of_alignment(a: &Alignment, block: BlockSpec) -> usize {
    let matched = a
        .pairs()
        .iter()
        .filter(|&&(i, _)| block.contains(i))
        .count();
    block.length - matched
}

/// Extremal gap count of `block` over all optimal alignments of `x` and `y`.
pub fn extremal_block_gaps(
    x: &SymbolSequence,
    y: &SymbolSequence,
    block: BlockSpec,
    objective: GapObjective,
) -> Result<BlockGapStats> {
    x.check_same_alphabet(y)?;
    block.validate(x.len())?;
    Ok(extremal_gaps(x.symbols(), y.symbols(), block, objective))
}

/// `(lcs length, matched in block)` for one cell.
#[derive(Clone, Copy)]
struct Cell {
    len: u32,
    matched: u32,
}

pub(crate) fn extremal_gaps(
    x: &[u8],
    y: &[u8],
    block: BlockSpec,
    objective: GapObjective,
) -> BlockGapStats {
    // `better(a, b)` is true when a is strictly preferred to b.
    let prefer_fewer = objective == GapObjective::MaximizeGaps;
    let better = |a: Cell, b: Cell| -> bool {
        match a.len.cmp(&b.len) {
            Ordering::Greater => true,
            Ordering::Less => false,
            Ordering::Equal => {
                if prefer_fewer {
                    a.matched < b.matched
                } else {
                    a.matched > b.matched
                }
            }
        }
    };

    let zero = Cell { len: 0, matched: 0 };
    let mut prev = vec![zero; y.len() + 1];
    let mut cur = vec![zero; y.len() + 1];
    for (i, &a) in x.iter().enumerate() {
        let bonus = block.contains(i) as u32;
        cur[0] = zero;
        for (j, &b) in y.iter().enumerate() {
            // Order of consideration follows the traceback preference:
            // diagonal, then up, then left; ties keep the earlier one.
            let mut best = prev[j + 1];
            if a == b {
                let diag = Cell {
                    len: prev[j].len + 1,
                    matched: prev[j].matched + bonus,
                };
                if !better(best, diag) {
                    best = diag;
                }
            }
            if better(cur[j], best) {
                best = cur[j];
            }
            cur[j + 1] = best;
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    let end = if x.is_empty() { zero } else { prev[y.len()] };
    BlockGapStats {
        lcs_len: end.len as usize,
        gaps: block.length - end.matched as usize,
        matched_in_block: end.matched as usize,
    }
}

/// Which maximal constant runs count as natural blocks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum RunMatch {
    /// Runs of exactly the target length.
    #[default]
    Exact,
    /// Runs at least the target length; the returned block is the whole run.
    AtLeast,
}

/// The maximal constant run of `x` of the target length whose midpoint is
/// nearest `|x|/2`. Equidistant runs resolve to the leftmost.
pub fn find_natural_block(x: &[u8], target_len: usize, mode: RunMatch) -> Option<BlockSpec> {
    if target_len == 0 {
        return None;
    }
    let centre2 = x.len();
    let mut best: Option<(usize, BlockSpec)> = None;
    let mut start = 0;
    while start < x.len() {
        let mut end = start + 1;
        while end < x.len() && x[end] == x[start] {
            end += 1;
        }
        let len = end - start;
        let fits = match mode {
            RunMatch::Exact => len == target_len,
            RunMatch::AtLeast => len >= target_len,
        };
        if fits {
            let run = BlockSpec::new(start, len);
            let dist = run.midpoint2().abs_diff(centre2);
            if best.is_none_or(|(d, _)| dist < d) {
                best = Some((dist, run));
            }
        }
        start = end;
    }
    best.map(|(_, b)| b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seq::Alphabet;

    fn s(t: &str) -> SymbolSequence {
        SymbolSequence::parse_with(t, Alphabet::BINARY).unwrap()
    }

    #[test]
    fn counting_example() {
        // The displayed alignment of 00011100 / 00011001 leaves one of the
        // three ones unmatched.
        let x = s("00011100");
        let y = s("00011001");
        let a = Alignment::new(
            vec![(0, 0), (1, 1), (2, 2), (3, 3), (4, 4), (6, 5), (7, 6)],
            x.symbols(),
            y.symbols(),
        )
        .unwrap();
        assert_eq!(gaps_of_alignment(&a, BlockSpec::new(3, 3)), 1);

        let max =
            extremal_block_gaps(&x, &y, BlockSpec::new(3, 3), GapObjective::MaximizeGaps).unwrap();
        assert_eq!(max.lcs_len, 7);
        assert!(max.gaps >= 1);
        assert_eq!(max.gaps + max.matched_in_block, 3);
    }

    #[test]
    fn gaps_of_trivial_alignments() {
        let empty = Alignment::default();
        assert_eq!(gaps_of_alignment(&empty, BlockSpec::new(2, 5)), 5);
        let x = [0u8, 1, 1, 0, 1];
        let id = Alignment::new((0..5).map(|i| (i, i)).collect(), &x, &x).unwrap();
        assert_eq!(gaps_of_alignment(&id, BlockSpec::new(1, 3)), 0);
    }

    #[test]
    fn constant_and_disjoint_strings() {
        let x = s("0000000");
        for obj in [GapObjective::MaximizeGaps, GapObjective::MinimizeGaps] {
            let r = extremal_block_gaps(&x, &x, BlockSpec::new(0, 7), obj).unwrap();
            assert_eq!((r.lcs_len, r.gaps), (7, 0));
            let r = extremal_block_gaps(&x, &s("1111"), BlockSpec::new(0, 7), obj).unwrap();
            assert_eq!((r.lcs_len, r.gaps), (0, 7));
        }
    }

    #[test]
    fn invalid_blocks() {
        let x = s("0101");
        let err = extremal_block_gaps(&x, &x, BlockSpec::new(2, 3), GapObjective::MaximizeGaps);
        assert!(err.is_err());
        let err = extremal_block_gaps(&x, &x, BlockSpec::new(0, 0), GapObjective::MinimizeGaps);
        assert!(err.is_err());
    }

    #[test]
    fn natural_blocks() {
        let f = |t: &str, n| find_natural_block(s(t).symbols(), n, RunMatch::Exact);
        assert_eq!(f("0011100", 3), Some(BlockSpec::new(2, 3)));
        assert_eq!(f("0101", 2), None);
        // Runs 11 / 00 / 11 with midpoints 1, 3, 5 around centre 3.
        assert_eq!(f("110011", 2), Some(BlockSpec::new(2, 2)));
        // Runs 00 at 0 and 11 at 4 in "0010110": midpoints 1 and 5, centre 3.5.
        // Doubled: 2 and 10 vs 7 -> distances 5 and 3, so the right one.
        assert_eq!(f("0010110", 2), Some(BlockSpec::new(4, 2)));
        // Equidistant: "00111100" target 2 -> runs at 0 and 6 both 3 away.
        assert_eq!(f("00111100", 2), Some(BlockSpec::new(0, 2)));
        assert_eq!(f("", 2), None);
        assert_eq!(f("0000", 0), None);

        let x = s("0001111100");
        assert_eq!(
            find_natural_block(x.symbols(), 3, RunMatch::Exact),
            Some(BlockSpec::new(0, 3))
        );
        assert_eq!(
            find_natural_block(x.symbols(), 3, RunMatch::AtLeast),
            Some(BlockSpec::new(3, 5))
        );
    }
}
