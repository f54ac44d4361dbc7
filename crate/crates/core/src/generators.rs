//! Seeded random-string ensembles.
//!
//! Every random draw comes from a ChaCha8 stream selected by
//! `(master seed, stream id)`. ChaCha is a counter-based cipher, so any
//! stream can be produced independently of the others and the output is
//! identical across platforms. A trial index and a role (first string,
//! second string, resampled block, ...) together pick the stream id.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::block::BlockSpec;
use crate::error::{LabError, Result};
use crate::seq::{round_half_up, Alphabet, SymbolSequence};

/// Selects one reproducible random stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngSeed {
    pub master: u64,
    pub stream: u64,
}

/// Roles get the low 16 bits of the ChaCha stream id, the trial the rest.
const ROLE_BITS: u32 = 16;

pub(crate) mod role {
    pub const X: u16 = 0;
    pub const Y: u16 = 1;
    pub const X_STAR: u16 = 2;
    pub const BLOCK_SYMBOL: u16 = 3;
    /// Natural-block resampling attempt `a` uses `NATURAL_RETRY + a`.
    pub const NATURAL_RETRY: u16 = 16;
}

impl RngSeed {
    pub fn new(master: u64, stream: u64) -> Self {
        RngSeed { master, stream }
    }

    /// Generator for one role within this seed's stream.
    pub fn rng(self, role: u16) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master);
        rng.set_stream((self.stream << ROLE_BITS) | role as u64);
        rng
    }
}

pub(crate) fn iid_symbols(rng: &mut impl Rng, k: usize, n: usize) -> Vec<u8> {
    if k == 1 {
        return vec![0; n];
    }
    (0..n).map(|_| rng.gen_range(0..k as u8)).collect()
}

/// `n` iid uniform symbols over `k` letters.
pub fn gen_iid(k: usize, n: usize, seed: RngSeed) -> Result<SymbolSequence> {
    let alphabet = Alphabet::new(k)?;
    let symbols = iid_symbols(&mut seed.rng(role::X), k, n);
    Ok(SymbolSequence::from_raw(symbols, alphabet))
}

/// Block length for half-length `d`: `2 * round(d^beta / 2)`, always even.
pub fn block_length(d: usize, beta: f64) -> usize {
    2 * round_half_up((d as f64).powf(beta) / 2.0).max(0) as usize
}

/// Block of length `ell` centred in a string of length `n`.
///
/// For `n = 2d` and even `ell` this is `[d - ell/2, d + ell/2)`.
pub fn centred_block(n: usize, ell: usize) -> BlockSpec {
    BlockSpec::new((n - ell) / 2, ell)
}

/// One draw of the block-insertion model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelInstance {
    /// iid except on `block`, where it is constant.
    pub x: SymbolSequence,
    pub y: SymbolSequence,
    pub block: BlockSpec,
    /// `x` with the block replaced by fresh iid symbols.
    pub x_star: SymbolSequence,
}

/// Strings of length `2d` with a constant block of length
/// `2 * round(d^beta / 2)` inserted in the middle of `x`.
///
/// `block_symbol = None` draws the block symbol uniformly.
pub fn make_model_instance(
    k: usize,
    d: usize,
    beta: f64,
    block_symbol: Option<u8>,
    seed: RngSeed,
) -> Result<ModelInstance> {
    if !(beta > 0.5 && beta < 1.0) {
        return Err(LabError::invalid(format!(
            "beta must lie in (1/2, 1), got {beta}"
        )));
    }
    if d < 4 {
        return Err(LabError::invalid(format!("d must be at least 4, got {d}")));
    }
    let ell = block_length(d, beta);
    make_instance(k, 2 * d, ell, block_symbol, seed)
}

/// Model instance with explicit total length `n` and block length `ell`.
pub fn make_instance(
    k: usize,
    n: usize,
    ell: usize,
    block_symbol: Option<u8>,
    seed: RngSeed,
) -> Result<ModelInstance> {
    let alphabet = Alphabet::new(k)?;
    if k < 2 {
        return Err(LabError::invalid("the block model needs k >= 2"));
    }
    if ell == 0 {
        return Err(LabError::invalid("block length must be positive"));
    }
    if ell > n {
        return Err(LabError::invalid(format!(
            "block length {ell} exceeds string length {n}"
        )));
    }
    if let Some(s) = block_symbol {
        if s as usize >= k {
            return Err(LabError::invalid(format!(
                "block symbol {s} outside alphabet"
            )));
        }
    }
    let block = centred_block(n, ell);
    let symbol = match block_symbol {
        Some(s) => s,
        None => seed.rng(role::BLOCK_SYMBOL).gen_range(0..k as u8),
    };

    let mut x = iid_symbols(&mut seed.rng(role::X), k, n);
    let y = iid_symbols(&mut seed.rng(role::Y), k, n);
    let fresh = iid_symbols(&mut seed.rng(role::X_STAR), k, ell);

    let mut x_star = x.clone();
    x_star[block.start..block.end()].copy_from_slice(&fresh);
    x[block.start..block.end()].fill(symbol);

    Ok(ModelInstance {
        x: SymbolSequence::from_raw(x, alphabet),
        y: SymbolSequence::from_raw(y, alphabet),
        block,
        x_star: SymbolSequence::from_raw(x_star, alphabet),
    })
}

/// `x` with the whole block removed.
pub fn excise_block(x: &SymbolSequence, block: BlockSpec) -> Result<SymbolSequence> {
    excise_block_prefix(x, block, block.length)
}

/// `x` with the first `m` symbols of the block removed.
pub fn excise_block_prefix(
    x: &SymbolSequence,
    block: BlockSpec,
    m: usize,
) -> Result<SymbolSequence> {
    block.validate(x.len())?;
    if m == 0 || m > block.length {
        return Err(LabError::invalid(format!(
            "prefix length {m} outside 1..={}",
            block.length
        )));
    }
    Ok(SymbolSequence::from_raw(
        splice(x.symbols(), block.start, m),
        x.alphabet(),
    ))
}

pub(crate) fn splice(x: &[u8], start: usize, m: usize) -> Vec<u8> {
    let mut out = Vec::with_capacity(x.len() - m);
    out.extend_from_slice(&x[..start]);
    out.extend_from_slice(&x[start + m..]);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn iid_trivial_cases() {
        let s = gen_iid(1, 5, RngSeed::new(3, 0)).unwrap();
        assert_eq!(s.to_string(), "00000");
        assert!(gen_iid(2, 0, RngSeed::new(3, 0)).unwrap().is_empty());
    }

    #[test]
    fn iid_is_reproducible_and_stream_sensitive() {
        let a = gen_iid(4, 200, RngSeed::new(11, 5)).unwrap();
        let b = gen_iid(4, 200, RngSeed::new(11, 5)).unwrap();
        let c = gen_iid(4, 200, RngSeed::new(11, 6)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn block_length_rounding() {
        // 500^0.75 = 105.74 -> 2 * round(52.87) = 106
        assert_eq!(block_length(500, 0.75), 106);
        // 500^0.8 = 144.27 -> 144
        assert_eq!(block_length(500, 0.8), 144);
        assert_eq!(block_length(4, 0.51), 2);
    }

    #[test]
    fn model_instance_shape() {
        let m = make_model_instance(2, 500, 0.75, Some(0), RngSeed::new(1, 0)).unwrap();
        assert_eq!(m.block, BlockSpec::new(500 - 53, 106));
        assert_eq!(m.x.len(), 1000);
        assert_eq!(m.y.len(), 1000);
        let xs = m.x.symbols();
        assert!(xs[m.block.start..m.block.end()].iter().all(|&s| s == 0));
        for i in (0..1000).filter(|&i| !m.block.contains(i)) {
            assert_eq!(xs[i], m.x_star.symbols()[i]);
        }
        assert!(m.x.hamming(&m.x_star).unwrap() <= 106);
    }

    #[test]
    fn model_instance_errors() {
        let seed = RngSeed::new(1, 0);
        assert!(make_model_instance(2, 500, 0.5, None, seed).is_err());
        assert!(make_model_instance(2, 500, 1.0, None, seed).is_err());
        assert!(make_model_instance(2, 3, 0.7, None, seed).is_err());
        assert!(make_model_instance(1, 500, 0.7, None, seed).is_err());
        assert!(make_instance(2, 10, 11, None, seed).is_err());
        assert!(make_instance(2, 10, 0, None, seed).is_err());
        assert!(make_instance(2, 10, 4, Some(2), seed).is_err());
    }

    #[test]
    fn excisions() {
        let x = SymbolSequence::parse_with("01000001", Alphabet::BINARY).unwrap();
        assert_eq!(
            excise_block(&x, BlockSpec::new(2, 5)).unwrap().to_string(),
            "011"
        );
        assert!(excise_block(&x, BlockSpec::new(0, 8)).unwrap().is_empty());
        assert!(excise_block(&x, BlockSpec::new(0, 0)).is_err());

        let x = SymbolSequence::parse_with("aa000bb", Alphabet::new(12).unwrap()).unwrap();
        let b = BlockSpec::new(2, 3);
        assert_eq!(excise_block_prefix(&x, b, 2).unwrap().to_string(), "aa0bb");
        assert_eq!(
            excise_block_prefix(&x, b, 3).unwrap(),
            excise_block(&x, b).unwrap()
        );
        assert!(excise_block_prefix(&x, b, 4).is_err());
        assert!(excise_block_prefix(&x, b, 0).is_err());
    }
}
