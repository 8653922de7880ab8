use serde::{Deserialize, Serialize};

use super::{PasError, Result};

/// Symbol counts per amplitude class over a block of `n` symbols.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Composition {
    counts: Vec<usize>,
}

impl Composition {
    pub fn new(counts: Vec<usize>) -> Result<Self> {
        if counts.is_empty() || counts.iter().sum::<usize>() == 0 {
            return Err(PasError::InvalidParameter(
                "composition must contain at least one symbol".into(),
            ));
        }
        if counts.len() > usize::from(u16::MAX) {
            return Err(PasError::InvalidParameter(
                "too many amplitude classes".into(),
            ));
        }
        Ok(Composition { counts })
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn classes(&self) -> usize {
        self.counts.len()
    }

    pub fn len(&self) -> usize {
        self.counts.iter().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn distribution(&self) -> Vec<f64> {
        let n = self.len() as f64;
        self.counts.iter().map(|&c| c as f64 / n).collect()
    }

    /// Histogram of `symbols` over the same classes.
    pub fn of_sequence(symbols: &[u16], classes: usize) -> Result<Self> {
        let mut counts = vec![0; classes];
        for &s in symbols {
            *counts.get_mut(usize::from(s)).ok_or_else(|| {
                PasError::OutOfRange(format!("symbol {s} with {classes} classes"))
            })? += 1;
        }
        Composition::new(counts)
    }
}

/// `KL(p || q)` in bits; infinite if `p` puts mass where `q` has none.
pub fn kl_bits(p: &[f64], q: &[f64]) -> f64 {
    p.iter()
        .zip(q)
        .filter(|(a, _)| **a > 0.0)
        .map(|(a, b)| {
            if *b > 0.0 {
                a * (a / b).log2()
            } else {
                f64::INFINITY
            }
        })
        .sum()
}

/// n-type approximating `target`: every class gets the floor of `n p_i`
/// and the remaining symbols go to the classes whose round-up costs the
/// least KL divergence. The result has the smallest `KL(type || target)`
/// among all floor/ceil roundings.
pub fn quantize_composition(target: &[f64], n: usize) -> Result<Composition> {
    if target.is_empty() || target.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
        return Err(PasError::InvalidParameter(
            "target must be a non-empty vector of probabilities".into(),
        ));
    }
    let total: f64 = target.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(PasError::InvalidParameter(format!(
            "target sums to {total}, not 1"
        )));
    }
    if n < target.len() {
        return Err(PasError::InvalidParameter(format!(
            "block length {n} is shorter than the {} classes",
            target.len()
        )));
    }
    let nf = n as f64;
    let mut counts: Vec<usize> = target.iter().map(|p| (p * nf).floor() as usize).collect();
    let placed: usize = counts.iter().sum();
    let missing = n.saturating_sub(placed);
    // term of the divergence contributed by a class holding `c` symbols
    let term = |c: usize, p: f64| {
        if c == 0 {
            0.0
        } else {
            let e = c as f64 / nf;
            e * (e / p).ln()
        }
    };
    let mut order: Vec<(f64, usize)> = target
        .iter()
        .enumerate()
        .filter(|(_, p)| **p > 0.0)
        .map(|(i, &p)| (term(counts[i] + 1, p) - term(counts[i], p), i))
        .collect();
    order.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    for &(_, i) in order.iter().take(missing) {
        counts[i] += 1;
    }
    Composition::new(counts)
}
