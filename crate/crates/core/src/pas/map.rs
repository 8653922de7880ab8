//! Assembly of points from (fundamental point, region) pairs: the point for
//! amplitude index `a` and region `s` is `exp(i 2 pi s / q) b_a`.

use num_complex::Complex64;

use super::{PasError, Result};
use crate::constellation::Constellation;

/// Lookup tables between constellation indices and `(a, s)` pairs.
#[derive(Debug, Clone)]
pub struct RegionMap {
    q: usize,
    base_len: usize,
    /// Constellation index of `(a, s)` at `a * q + s`.
    index_of: Vec<usize>,
    /// `(a, s)` of every constellation index.
    pairs: Vec<(usize, usize)>,
    points: Vec<Complex64>,
}

impl RegionMap {
    pub fn new(c: &Constellation) -> Result<Self> {
        let pairs = c.region_decomposition()?;
        let q = c.q();
        let base_len = c.len() / q;
        let mut index_of = vec![0; c.len()];
        for (i, &(a, s)) in pairs.iter().enumerate() {
            index_of[a * q + s] = i;
        }
        Ok(RegionMap {
            q,
            base_len,
            index_of,
            pairs,
            points: c.points().to_vec(),
        })
    }

    pub fn q(&self) -> usize {
        self.q
    }

    /// Size of the fundamental set.
    pub fn base_len(&self) -> usize {
        self.base_len
    }

    /// Constellation index of `(a, s)`.
    pub fn index(&self, a: usize, s: usize) -> Result<usize> {
        if a >= self.base_len || s >= self.q {
            return Err(PasError::OutOfRange(format!(
                "pair (a={a}, s={s}) outside {} amplitudes x {} regions",
                self.base_len, self.q
            )));
        }
        Ok(self.index_of[a * self.q + s])
    }

    pub fn pair(&self, index: usize) -> (usize, usize) {
        self.pairs[index]
    }

    /// Index of the constellation point nearest to `y`.
    pub fn nearest(&self, y: Complex64) -> usize {
        let mut best = (f64::INFINITY, 0);
        for (i, x) in self.points.iter().enumerate() {
            let d = (y - x).norm_sqr();
            if d < best.0 {
                best = (d, i);
            }
        }
        best.1
    }

    /// Probability of each fundamental point summed over its rotations.
    pub fn amplitude_distribution(&self, c: &Constellation) -> Vec<f64> {
        let mut p = vec![0.0; self.base_len];
        for (i, &(a, _)) in self.pairs.iter().enumerate() {
            p[a] += c.probs()[i];
        }
        p
    }
}

/// Points for paired amplitude and region sequences.
pub fn pas_map(amplitudes: &[u16], regions: &[u16], c: &Constellation) -> Result<Vec<Complex64>> {
    if amplitudes.len() != regions.len() {
        return Err(PasError::Length(format!(
            "{} amplitudes but {} regions",
            amplitudes.len(),
            regions.len()
        )));
    }
    let map = RegionMap::new(c)?;
    amplitudes
        .iter()
        .zip(regions)
        .map(|(&a, &s)| Ok(c.points()[map.index(a.into(), s.into())?]))
        .collect()
}

/// Minimum-distance inverse of [`pas_map`].
pub fn pas_demap_hard(points: &[Complex64], c: &Constellation) -> Result<(Vec<u16>, Vec<u16>)> {
    let map = RegionMap::new(c)?;
    Ok(points
        .iter()
        .map(|&y| {
            let (a, s) = map.pair(map.nearest(y));
            (a as u16, s as u16)
        })
        .unzip())
}
