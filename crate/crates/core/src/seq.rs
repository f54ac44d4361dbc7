//! Alphabets, symbol sequences and alignments.
//!
//! Symbols are small integers `0..k`. The textual form maps `'0'..'9'` to
//! `0..=9` and `'a'..'z'` to `10..=35`, so the largest supported alphabet has
//! 36 letters.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

/// Largest alphabet representable in the text format.
pub const MAX_ALPHABET: usize = 36;

/// Number of equiprobable symbols, `1 ..= 36`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Alphabet(u8);

impl Alphabet {
    pub const BINARY: Alphabet = Alphabet(2);

    pub fn new(k: usize) -> Result<Self> {
        if k == 0 || k > MAX_ALPHABET {
            return Err(LabError::invalid(format!(
                "alphabet size must be in 1..={MAX_ALPHABET}, got {k}"
            )));
        }
        Ok(Alphabet(k as u8))
    }

    pub fn size(self) -> usize {
        self.0 as usize
    }
}

/// Maps a text character to its symbol value.
pub fn symbol_from_char(c: char) -> Option<u8> {
    match c {
        '0'..='9' => Some(c as u8 - b'0'),
        'a'..='z' => Some(c as u8 - b'a' + 10),
        _ => None,
    }
}

/// Maps a symbol value back to its text character.
pub fn char_from_symbol(s: u8) -> Option<char> {
    match s {
        0..=9 => Some((b'0' + s) as char),
        10..=35 => Some((b'a' + s - 10) as char),
        _ => None,
    }
}

/// A finite string over an [`Alphabet`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SymbolSequence {
    symbols: Vec<u8>,
    alphabet: Alphabet,
}

impl SymbolSequence {
    /// Checks that every symbol lies in `0..k`.
    pub fn new(symbols: Vec<u8>, alphabet: Alphabet) -> Result<Self> {
        if let Some(&bad) = symbols.iter().find(|&&s| s as usize >= alphabet.size()) {
            return Err(LabError::invalid(format!(
                "symbol {bad} outside alphabet of size {}",
                alphabet.size()
            )));
        }
        Ok(SymbolSequence { symbols, alphabet })
    }

    pub(crate) fn from_raw(symbols: Vec<u8>, alphabet: Alphabet) -> Self {
        debug_assert!(symbols.iter().all(|&s| (s as usize) < alphabet.size()));
        SymbolSequence { symbols, alphabet }
    }

    /// Parses text using the character map, with an explicit alphabet.
    pub fn parse_with(text: &str, alphabet: Alphabet) -> Result<Self> {
        let symbols = parse_symbols(text)?;
        SymbolSequence::new(symbols, alphabet)
    }

    pub fn symbols(&self) -> &[u8] {
        &self.symbols
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn into_symbols(self) -> Vec<u8> {
        self.symbols
    }

    /// Errors unless both sequences share an alphabet.
    pub fn check_same_alphabet(&self, other: &SymbolSequence) -> Result<()> {
        if self.alphabet != other.alphabet {
            return Err(LabError::AlphabetMismatch {
                left: self.alphabet.size(),
                right: other.alphabet.size(),
            });
        }
        Ok(())
    }

    /// Number of positions where `self` and `other` differ. Lengths must match.
    pub fn hamming(&self, other: &SymbolSequence) -> Result<usize> {
        if self.len() != other.len() {
            return Err(LabError::invalid("hamming distance needs equal lengths"));
        }
        Ok(self
            .symbols
            .iter()
            .zip(&other.symbols)
            .filter(|(a, b)| a != b)
            .count())
    }
}

fn parse_symbols(text: &str) -> Result<Vec<u8>> {
    text.chars()
        .filter(|c| !c.is_whitespace())
        .map(|c| {
            symbol_from_char(c)
                .ok_or_else(|| LabError::invalid(format!("unsupported symbol character {c:?}")))
        })
        .collect()
}

/// Parses text, inferring the smallest alphabet (at least binary) that holds it.
impl FromStr for SymbolSequence {
    type Err = LabError;

    fn from_str(text: &str) -> Result<Self> {
        let symbols = parse_symbols(text)?;
        let k = symbols
            .iter()
            .map(|&s| s as usize + 1)
            .max()
            .unwrap_or(0)
            .max(2);
        SymbolSequence::new(symbols, Alphabet::new(k)?)
    }
}

impl fmt::Display for SymbolSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &s in &self.symbols {
            // Alphabet::new caps k at 36, so every symbol has a character.
            f.write_fmt(format_args!("{}", char_from_symbol(s).unwrap_or('?')))?;
        }
        Ok(())
    }
}

/// An ordered set of matched index pairs `(i, j)` into `(x, y)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
pub struct Alignment {
    pairs: Vec<(usize, usize)>,
}

impl Alignment {
    /// Builds an alignment and validates it against `x` and `y`.
    pub fn new(pairs: Vec<(usize, usize)>, x: &[u8], y: &[u8]) -> Result<Self> {
        let a = Alignment { pairs };
        a.validate(x, y)?;
        Ok(a)
    }

    pub(crate) fn from_pairs_unchecked(pairs: Vec<(usize, usize)>) -> Self {
        Alignment { pairs }
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    /// Number of aligned letter pairs.
    pub fn score(&self) -> usize {
        self.pairs.len()
    }

    /// Pairs must be strictly increasing in both coordinates, in range, and
    /// join equal letters.
    pub fn validate(&self, x: &[u8], y: &[u8]) -> Result<()> {
        let mut prev: Option<(usize, usize)> = None;
        for &(i, j) in &self.pairs {
            if i >= x.len() || j >= y.len() {
                return Err(LabError::invalid(format!("pair ({i}, {j}) out of range")));
            }
            if x[i] != y[j] {
                return Err(LabError::invalid(format!(
                    "pair ({i}, {j}) joins different symbols"
                )));
            }
            if let Some((pi, pj)) = prev {
                if i <= pi || j <= pj {
                    return Err(LabError::invalid("pairs not strictly increasing"));
                }
            }
            prev = Some((i, j));
        }
        Ok(())
    }
}

/// Round half up, the rounding used whenever a real length becomes an index.
pub fn round_half_up(v: f64) -> i64 {
    (v + 0.5).floor() as i64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_round_trip_and_inferred_alphabet() {
        let s: SymbolSequence = "0a9z".parse().unwrap();
        assert_eq!(s.symbols(), &[0, 10, 9, 35]);
        assert_eq!(s.alphabet().size(), 36);
        assert_eq!(s.to_string(), "0a9z");

        let b: SymbolSequence = "0000".parse().unwrap();
        assert_eq!(b.alphabet(), Alphabet::BINARY);
        let e: SymbolSequence = "".parse().unwrap();
        assert!(e.is_empty());
    }

    #[test]
    fn rejects_out_of_range_symbols() {
        assert!(SymbolSequence::parse_with("012", Alphabet::BINARY).is_err());
        assert!("01-".parse::<SymbolSequence>().is_err());
        assert!(Alphabet::new(0).is_err());
        assert!(Alphabet::new(37).is_err());
    }

    #[test]
    fn alignment_validation() {
        let x = [0, 1, 0];
        let y = [1, 0];
        assert!(Alignment::new(vec![(1, 0), (2, 1)], &x, &y).is_ok());
        assert!(Alignment::new(vec![(0, 0)], &x, &y).is_err());
        assert!(Alignment::new(vec![(2, 1), (1, 0)], &x, &y).is_err());
        assert!(Alignment::new(vec![(0, 1), (2, 1)], &x, &y).is_err());
        assert!(Alignment::new(vec![(5, 1)], &x, &y).is_err());
    }

    #[test]
    fn rounding() {
        assert_eq!(round_half_up(52.5), 53);
        assert_eq!(round_half_up(52.49), 52);
        assert_eq!(round_half_up(0.5), 1);
    }
}
