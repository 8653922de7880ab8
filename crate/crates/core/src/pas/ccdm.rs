//! Constant-composition distribution matching by exact arithmetic coding.
//!
//! The `M` sequences of a composition are ordered lexicographically. A
//! `k = floor(log2 M)`-bit input `j` selects the sequence of index
//! `floor(j M / 2^k)`, so distinct inputs land on distinct sequences and
//! decoding recovers `j = ceil(I 2^k / M)` from the index `I`.

use num_bigint::BigUint;
use num_traits::{One, Zero};

use super::{Composition, PasError, Result};

/// Number of sequences with the given composition.
pub fn sequence_count(comp: &Composition) -> BigUint {
    let mut w = BigUint::one();
    let mut placed = 0u64;
    for &c in comp.counts() {
        for i in 1..=c as u64 {
            placed += 1;
            w = w * placed / i;
        }
    }
    w
}

/// Input length in bits, `floor(log2 M)`.
pub fn input_bits(comp: &Composition) -> usize {
    (sequence_count(comp).bits() - 1) as usize
}

fn bits_to_int(bits: &[bool]) -> BigUint {
    let mut j = BigUint::zero();
    for &b in bits {
        j <<= 1u32;
        if b {
            j += 1u32;
        }
    }
    j
}

/// Maps exactly [`input_bits`] bits to a sequence of class indices having
/// exactly the composition `comp`.
pub fn ccdm_encode(bits: &[bool], comp: &Composition) -> Result<Vec<u16>> {
    let total = sequence_count(comp);
    let k = (total.bits() - 1) as usize;
    if bits.len() != k {
        return Err(PasError::Length(format!(
            "matcher expects {k} input bits, got {}",
            bits.len()
        )));
    }
    let mut index = (bits_to_int(bits) * &total) >> k;
    let mut left = comp.counts().to_vec();
    let mut remaining = comp.len();
    let mut weight = total;
    let mut out = Vec::with_capacity(remaining);
    while remaining > 0 {
        for (c, n) in left.iter_mut().enumerate() {
            if *n == 0 {
                continue;
            }
            let w = &weight * *n / remaining;
            if index < w {
                out.push(c as u16);
                *n -= 1;
                weight = w;
                break;
            }
            index -= w;
        }
        remaining -= 1;
    }
    Ok(out)
}

/// Inverse of [`ccdm_encode`]. Sequences with a different composition, or
/// outside the image of the encoder, are rejected.
pub fn ccdm_decode(symbols: &[u16], comp: &Composition) -> Result<Vec<bool>> {
    if symbols.len() != comp.len() {
        return Err(PasError::Length(format!(
            "matcher block has {} symbols, composition needs {}",
            symbols.len(),
            comp.len()
        )));
    }
    if Composition::of_sequence(symbols, comp.classes())? != *comp {
        return Err(PasError::Composition(
            "symbol sequence does not have the declared composition".into(),
        ));
    }
    let total = sequence_count(comp);
    let k = (total.bits() - 1) as usize;
    let mut left = comp.counts().to_vec();
    let mut remaining = comp.len();
    let mut weight = total.clone();
    let mut index = BigUint::zero();
    for &s in symbols {
        let s = usize::from(s);
        for n in left.iter().take(s) {
            if *n > 0 {
                index += &weight * *n / remaining;
            }
        }
        weight = &weight * left[s] / remaining;
        left[s] -= 1;
        remaining -= 1;
    }
    let j = ((&index << k) + &total - 1u32) / &total;
    if j.bits() as usize > k || (&j * &total) >> k != index {
        return Err(PasError::Composition(
            "sequence is not a matcher codeword".into(),
        ));
    }
    Ok((0..k).rev().map(|b| j.bit(b as u64)).collect())
}
