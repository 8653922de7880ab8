use super::{Constellation, ConstellationError, Result};

/// Cyclic 3-bit Gray sequence used for the ring and phase indices of
/// 8x8 circular constellations. Entry `k` labels index `k`.
pub const STAR_GRAY_3BIT: [u32; 8] = [0b111, 0b110, 0b100, 0b101, 0b001, 0b000, 0b010, 0b011];

/// Binary reflected Gray code of `k`.
pub fn reflected_gray(k: u32) -> u32 {
    k ^ (k >> 1)
}

/// Fixed-width binary labels, most significant bit first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryLabels {
    width: usize,
    words: Vec<u32>,
}

impl BinaryLabels {
    pub fn from_words(width: usize, words: Vec<u32>) -> Result<Self> {
        if width == 0 || width > 16 {
            return Err(ConstellationError::Labels(format!(
                "binary label width must lie in 1..=16, got {width}"
            )));
        }
        if words.iter().any(|&w| w >> width != 0) {
            return Err(ConstellationError::Labels(format!(
                "label word wider than {width} bits"
            )));
        }
        Ok(BinaryLabels { width, words })
    }

    /// Parses strings such as `"010110"`.
    pub fn from_strings<S: AsRef<str>>(labels: &[S]) -> Result<Self> {
        let width = labels.first().map_or(0, |s| s.as_ref().len());
        let mut words = Vec::with_capacity(labels.len());
        for s in labels {
            let s = s.as_ref();
            if s.len() != width || !s.bytes().all(|b| b == b'0' || b == b'1') {
                return Err(ConstellationError::Labels(format!(
                    "bad binary label {s:?}"
                )));
            }
            words.push(u32::from_str_radix(s, 2).expect("checked digits"));
        }
        Self::from_words(width, words)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn words(&self) -> &[u32] {
        &self.words
    }

    /// Bit `k` (0 = leftmost) of label `i`.
    pub fn bit(&self, i: usize, k: usize) -> u16 {
        ((self.words[i] >> (self.width - 1 - k)) & 1) as u16
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.words
            .iter()
            .map(|w| format!("{:0width$b}", w, width = self.width))
            .collect()
    }

    pub(crate) fn is_injective(&self) -> bool {
        let mut w = self.words.clone();
        w.sort_unstable();
        w.windows(2).all(|p| p[0] != p[1])
    }
}

/// Attaches 6-bit labels to an 8x8 ring constellation: the phase index and
/// the ring index are each mapped through [`STAR_GRAY_3BIT`] and
/// concatenated (phase bits first).
///
/// Requires `q == 8` and the `(phase, ring)` symbolic labels that the CQAM
/// constructors attach. Since the labels depend only on indices, the Gray
/// adjacency holds for any such ring layout, star or not.
pub fn gray_label_star(c: &Constellation) -> Result<Constellation> {
    if c.q() != 8 {
        return Err(ConstellationError::Labels(format!(
            "ring Gray labeling supports q = 8 only, got q = {}",
            c.q()
        )));
    }
    let sym = c.symbolic_labels().ok_or_else(|| {
        ConstellationError::Labels("ring Gray labeling needs (phase, ring) symbolic labels".into())
    })?;
    let mut words = Vec::with_capacity(sym.len());
    for s in sym {
        if s.len() != 2 || s[0] >= 8 || s[1] >= 8 {
            return Err(ConstellationError::Labels(format!(
                "expected (phase, ring) label in 0..8, got {s:?}"
            )));
        }
        words.push((STAR_GRAY_3BIT[s[0] as usize] << 3) | STAR_GRAY_3BIT[s[1] as usize]);
    }
    c.clone()
        .with_binary_labels(BinaryLabels::from_words(6, words)?)
}
