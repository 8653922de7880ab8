//! Posterior evaluation shared by the quadrature and Monte Carlo estimators.
//!
//! Channel: `y = sqrt(snr) x + z` with `z` circular complex Gaussian of
//! variance 1/2 per real dimension, so `p(y|x) = exp(-|y - sqrt(snr) x|^2) / pi`.
//! All posteriors are computed in the log domain with the running maximum
//! subtracted before exponentiation.

use num_complex::Complex64;

use crate::constellation::Constellation;

/// Terms more than this many nats below the maximum are dropped from sums.
const PRUNE_NATS: f64 = 50.0;

/// One labeling family (symbolic or binary): each component assigns every
/// point a class.
#[derive(Debug, Clone)]
pub(crate) struct LabelFamily {
    /// `classes[k][j]` is the class of point `j` in component `k`.
    classes: Vec<Vec<u16>>,
    n_classes: Vec<usize>,
}

impl LabelFamily {
    pub(crate) fn symbolic(c: &Constellation) -> Option<Self> {
        let sym = c.symbolic_labels()?;
        let m = sym[0].len();
        let classes: Vec<Vec<u16>> = (0..m).map(|k| sym.iter().map(|s| s[k]).collect()).collect();
        Some(Self::from_classes(classes))
    }

    pub(crate) fn binary(c: &Constellation) -> Option<Self> {
        let bin = c.binary_labels()?;
        let classes = (0..bin.width())
            .map(|k| (0..bin.len()).map(|i| bin.bit(i, k)).collect())
            .collect();
        Some(Self::from_classes(classes))
    }

    /// A family with no components; contributes zero to every posterior.
    pub(crate) fn empty() -> Self {
        LabelFamily {
            classes: Vec::new(),
            n_classes: Vec::new(),
        }
    }

    fn from_classes(classes: Vec<Vec<u16>>) -> Self {
        let n_classes = classes
            .iter()
            .map(|col| col.iter().copied().max().unwrap_or(0) as usize + 1)
            .collect();
        LabelFamily { classes, n_classes }
    }
}

/// Per-(x, y) log posteriors, natural log.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct Posterior {
    /// `ln P(X = x | y)`.
    pub x: f64,
    /// `sum_k ln P(S_k = s_k(x) | y)` per label family.
    pub families: [f64; 2],
}

pub(crate) struct Engine<'a> {
    scaled: Vec<Complex64>,
    log_p: Vec<f64>,
    /// Indices with positive probability.
    support: Vec<usize>,
    families: Vec<&'a LabelFamily>,
}

pub(crate) struct Scratch {
    e: Vec<f64>,
    ex: Vec<f64>,
    sums: Vec<f64>,
}

impl<'a> Engine<'a> {
    pub(crate) fn new(c: &Constellation, snr_lin: f64, families: Vec<&'a LabelFamily>) -> Self {
        assert!(families.len() <= 2);
        let s = snr_lin.sqrt();
        Engine {
            scaled: c.points().iter().map(|x| x * s).collect(),
            log_p: c.probs().iter().map(|p| p.ln()).collect(),
            support: (0..c.len()).filter(|&j| c.probs()[j] > 0.0).collect(),
            families,
        }
    }

    pub(crate) fn scratch(&self) -> Scratch {
        let max_classes = self
            .families
            .iter()
            .flat_map(|f| f.n_classes.iter().copied())
            .max()
            .unwrap_or(0);
        Scratch {
            e: vec![0.0; self.scaled.len()],
            ex: vec![0.0; self.scaled.len()],
            sums: vec![0.0; max_classes],
        }
    }

    pub(crate) fn scaled_point(&self, i: usize) -> Complex64 {
        self.scaled[i]
    }

    /// Posterior of transmitted point `i` given `y = sqrt(snr) x_i + noise`.
    pub(crate) fn posterior(&self, i: usize, noise: Complex64, sc: &mut Scratch) -> Posterior {
        let y = self.scaled[i] + noise;
        let mut m = f64::NEG_INFINITY;
        for &j in &self.support {
            let e = self.log_p[j] - (y - self.scaled[j]).norm_sqr();
            sc.e[j] = e;
            if e > m {
                m = e;
            }
        }
        let mut total = 0.0;
        for &j in &self.support {
            let d = sc.e[j] - m;
            let v = if d > -PRUNE_NATS { d.exp() } else { 0.0 };
            sc.ex[j] = v;
            total += v;
        }
        let lse = m + total.ln();
        let own = sc.e[i] - m;
        let mut out = Posterior {
            x: sc.e[i] - lse,
            families: [0.0; 2],
        };
        for (f, fam) in self.families.iter().enumerate() {
            let mut acc = 0.0;
            for (k, col) in fam.classes.iter().enumerate() {
                let sums = &mut sc.sums[..fam.n_classes[k]];
                sums.iter_mut().for_each(|s| *s = 0.0);
                for &j in &self.support {
                    sums[col[j] as usize] += sc.ex[j];
                }
                let mine = sums[col[i] as usize];
                // the own class always contains x_i even when it was pruned
                let log_class = if mine > 0.0 {
                    mine.max(own.exp()).ln()
                } else {
                    own
                };
                acc += log_class + m - lse;
            }
            out.families[f] = acc;
        }
        out
    }
}
