//! Achievable information rates over the complex AWGN channel
//! `Y = sqrt(SNR) X + Z`, where `Z` has variance 1/2 per real dimension and
//! the constellation has unit mean power, so SNR is the ratio of mean
//! symbol power to total noise power.
//!
//! Three rates are provided:
//!
//! * CM: `I(X;Y)`.
//! * S-CM: `H(S_1..S_m) - sum_i H(S_i|Y)` for the symbolic labels.
//! * B-CM: the same expression for the binary labels.
//!
//! Each is estimated either by a tensor Gauss-Hermite rule placed around
//! every conditional Gaussian, or by Monte Carlo. The quadrature grid for
//! point `x` is rotated to align with `x - centroid`; because the noise is
//! circularly symmetric this is still an exact rule, and it makes every
//! quadrature rate invariant under rotations of the constellation.

mod curve;
mod engine;
pub mod hermite;

use std::f64::consts::{LN_2, PI};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use thiserror::Error;

use crate::constellation::{is_rotation_invariant, Constellation};
use engine::{Engine, LabelFamily, Posterior};

pub use curve::{rate_curve, RateCurve};

pub const DEFAULT_ORDER: usize = 48;
pub const MIN_ORDER: usize = 8;
pub const MAX_ORDER: usize = 128;
pub const MIN_MC_SAMPLES: usize = 1000;
/// Monte Carlo samples per independently seeded chunk.
const MC_CHUNK: usize = 1 << 16;
/// Quadrature nodes whose 2-D weight falls below this are skipped.
const NODE_WEIGHT_FLOOR: f64 = 1e-22;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RateError {
    #[error("quadrature order must lie in [{MIN_ORDER}, {MAX_ORDER}], got {0}")]
    Order(usize),
    #[error("Monte Carlo needs at least {MIN_MC_SAMPLES} samples, got {0}")]
    Samples(usize),
    #[error("{0} rate needs {1} labels on the constellation")]
    MissingLabels(Metric, &'static str),
    #[error("constellation is not normalized to unit mean power (mean power {0})")]
    NotNormalized(f64),
    #[error("SNR must be finite or -inf, got {0}")]
    Snr(f64),
    #[error("target rate {target} bits is unreachable (achievable below {max} bits)")]
    Unreachable { target: f64, max: f64 },
}

pub type Result<T> = std::result::Result<T, RateError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Metric {
    Cm,
    Scm,
    Bcm,
}

impl std::fmt::Display for Metric {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Metric::Cm => "CM",
            Metric::Scm => "S-CM",
            Metric::Bcm => "B-CM",
        })
    }
}

impl std::str::FromStr for Metric {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "cm" => Ok(Metric::Cm),
            "scm" | "s-cm" => Ok(Metric::Scm),
            "bcm" | "b-cm" => Ok(Metric::Bcm),
            other => Err(format!(
                "unknown metric {other:?} (expected cm, scm or bcm)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Method {
    Quadrature { order: usize },
    MonteCarlo { samples: usize, seed: u64 },
}

impl Method {
    pub const fn quad() -> Self {
        Method::Quadrature {
            order: DEFAULT_ORDER,
        }
    }
}

/// A rate in bits with its Monte Carlo standard error, if any.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub bits: f64,
    pub stderr: Option<f64>,
}

/// Rates of one format at one SNR.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatePoint {
    pub snr_db: f64,
    pub capacity_bits: f64,
    pub cm: Estimate,
    pub scm: Option<Estimate>,
    pub bcm: Option<Estimate>,
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

/// Gaussian-input capacity `log2(1 + SNR)`.
pub fn capacity(snr_db: f64) -> f64 {
    db_to_linear(snr_db).ln_1p() / LN_2
}

/// SNR in dB at which the Gaussian capacity equals `bits`.
pub fn capacity_inverse_db(bits: f64) -> f64 {
    linear_to_db(bits.exp2() - 1.0)
}

fn check_input(c: &Constellation, snr_db: f64) -> Result<()> {
    if !(snr_db.is_finite() || snr_db == f64::NEG_INFINITY) {
        return Err(RateError::Snr(snr_db));
    }
    if !c.is_normalized() {
        return Err(RateError::NotNormalized(c.mean_power()));
    }
    Ok(())
}

fn families_for<'a>(
    c: &Constellation,
    metrics: &[Metric],
    sym: &'a mut Option<LabelFamily>,
    bin: &'a mut Option<LabelFamily>,
) -> Result<()> {
    if metrics.contains(&Metric::Scm) {
        *sym = Some(
            LabelFamily::symbolic(c).ok_or(RateError::MissingLabels(Metric::Scm, "symbolic"))?,
        );
    }
    if metrics.contains(&Metric::Bcm) {
        *bin = Some(LabelFamily::binary(c).ok_or(RateError::MissingLabels(Metric::Bcm, "binary"))?);
    }
    Ok(())
}

/// Unit vector along `x - centroid`, or 1 for a point at the centroid.
fn frame(x: Complex64, centroid: Complex64) -> Complex64 {
    let d = x - centroid;
    let r = d.norm();
    if r > 1e-12 {
        d / r
    } else {
        Complex64::new(1.0, 0.0)
    }
}

/// Transmitted points to integrate over, with their weights. For a
/// rotation-invariant format and CM only, one representative per orbit
/// suffices.
fn representatives(c: &Constellation, cm_only: bool) -> Vec<(usize, f64)> {
    if cm_only && c.q() >= 2 && is_rotation_invariant(c, 1e-9) {
        if let Ok(dec) = c.region_decomposition() {
            let base = c.fundamental_set();
            let mut w = vec![0.0; base.len()];
            for (j, &(a, _)) in dec.iter().enumerate() {
                w[a] += c.probs()[j];
            }
            return base.into_iter().zip(w).filter(|(_, w)| *w > 0.0).collect();
        }
    }
    (0..c.len())
        .filter(|&i| c.probs()[i] > 0.0)
        .map(|i| (i, c.probs()[i]))
        .collect()
}

struct Nodes {
    points: Vec<Complex64>,
    weights: Vec<f64>,
}

fn nodes(order: usize) -> Nodes {
    let (t, w) = hermite::gauss_hermite(order);
    let mut points = Vec::new();
    let mut weights = Vec::new();
    for (a, wa) in t.iter().zip(&w) {
        for (b, wb) in t.iter().zip(&w) {
            let weight = wa * wb / PI;
            if weight >= NODE_WEIGHT_FLOOR {
                points.push(Complex64::new(*a, *b));
                weights.push(weight);
            }
        }
    }
    let total: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|x| *x /= total);
    Nodes { points, weights }
}

/// Raw per-metric expectations in bits: `E[log2 P(.|Y) - log2 p(X)]`, before
/// clamping at zero.
#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    sum: [f64; 3],
    sum_sq: [f64; 3],
    n: usize,
}

impl Moments {
    fn push(&mut self, v: [f64; 3]) {
        for k in 0..3 {
            self.sum[k] += v[k];
            self.sum_sq[k] += v[k] * v[k];
        }
        self.n += 1;
    }

    fn merge(&mut self, o: &Moments) {
        for k in 0..3 {
            self.sum[k] += o.sum[k];
            self.sum_sq[k] += o.sum_sq[k];
        }
        self.n += o.n;
    }

    fn estimate(&self, k: usize) -> Estimate {
        let n = self.n as f64;
        let mean = self.sum[k] / n;
        let var = ((self.sum_sq[k] - n * mean * mean) / (n - 1.0)).max(0.0);
        Estimate {
            bits: mean.max(0.0),
            stderr: Some((var / n).sqrt()),
        }
    }
}

fn sample_values(p: Posterior, log_px: f64) -> [f64; 3] {
    [
        (p.x - log_px) / LN_2,
        (p.families[0] - log_px) / LN_2,
        (p.families[1] - log_px) / LN_2,
    ]
}

fn quad_rates(
    c: &Constellation,
    snr_db: f64,
    order: usize,
    metrics: &[Metric],
) -> Result<[f64; 3]> {
    if !(MIN_ORDER..=MAX_ORDER).contains(&order) {
        return Err(RateError::Order(order));
    }
    check_input(c, snr_db)?;
    let (mut sym, mut bin) = (None, None);
    families_for(c, metrics, &mut sym, &mut bin)?;
    if snr_db == f64::NEG_INFINITY {
        return Ok([0.0; 3]);
    }
    let fams: Vec<&LabelFamily> = [sym.as_ref(), bin.as_ref()]
        .into_iter()
        .map(|f| f.unwrap_or_else(|| empty_family()))
        .collect();
    let engine = Engine::new(c, db_to_linear(snr_db), fams);
    let nodes = nodes(order);
    let centroid = c.centroid() * db_to_linear(snr_db).sqrt();
    let reps = representatives(c, metrics.iter().all(|m| *m == Metric::Cm));
    let per_rep: Vec<[f64; 3]> = reps
        .par_iter()
        .map(|&(i, w)| {
            let mut sc = engine.scratch();
            let u = frame(engine.scaled_point(i), centroid);
            let log_px = c.probs()[i].ln();
            let mut acc = [0.0; 3];
            for (z, nw) in nodes.points.iter().zip(&nodes.weights) {
                let v = sample_values(engine.posterior(i, u * z, &mut sc), log_px);
                for k in 0..3 {
                    acc[k] += nw * v[k];
                }
            }
            acc.map(|a| a * w)
        })
        .collect();
    let mut total = [0.0; 3];
    for r in &per_rep {
        for k in 0..3 {
            total[k] += r[k];
        }
    }
    Ok(total.map(|t| t.max(0.0)))
}

fn empty_family() -> &'static LabelFamily {
    use std::sync::OnceLock;
    static EMPTY: OnceLock<LabelFamily> = OnceLock::new();
    EMPTY.get_or_init(|| LabelFamily::empty())
}

fn mc_rates(
    c: &Constellation,
    snr_db: f64,
    samples: usize,
    seed: u64,
    metrics: &[Metric],
) -> Result<[Estimate; 3]> {
    if samples < MIN_MC_SAMPLES {
        return Err(RateError::Samples(samples));
    }
    check_input(c, snr_db)?;
    let (mut sym, mut bin) = (None, None);
    families_for(c, metrics, &mut sym, &mut bin)?;
    if snr_db == f64::NEG_INFINITY {
        let zero = Estimate {
            bits: 0.0,
            stderr: Some(0.0),
        };
        return Ok([zero; 3]);
    }
    let fams: Vec<&LabelFamily> = [sym.as_ref(), bin.as_ref()]
        .into_iter()
        .map(|f| f.unwrap_or_else(|| empty_family()))
        .collect();
    let engine = Engine::new(c, db_to_linear(snr_db), fams);
    let mut cdf = Vec::with_capacity(c.len());
    let mut acc = 0.0;
    for p in c.probs() {
        acc += p;
        cdf.push(acc);
    }
    let n_chunks = samples.div_ceil(MC_CHUNK);
    let chunks: Vec<Moments> = (0..n_chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(chunk as u64);
            let mut sc = engine.scratch();
            let mut m = Moments::default();
            let count = MC_CHUNK.min(samples - chunk * MC_CHUNK);
            for _ in 0..count {
                let u: f64 = rng.random::<f64>() * acc;
                let i = cdf.partition_point(|&c| c <= u).min(cdf.len() - 1);
                let i = nearest_supported(c.probs(), i);
                let zr: f64 = rng.sample(StandardNormal);
                let zi: f64 = rng.sample(StandardNormal);
                let z = Complex64::new(zr, zi) * std::f64::consts::FRAC_1_SQRT_2;
                m.push(sample_values(
                    engine.posterior(i, z, &mut sc),
                    c.probs()[i].ln(),
                ));
            }
            m
        })
        .collect();
    let mut total = Moments::default();
    for m in &chunks {
        total.merge(m);
    }
    Ok([total.estimate(0), total.estimate(1), total.estimate(2)])
}

/// Skips over zero-probability points that a boundary draw may land on.
fn nearest_supported(probs: &[f64], i: usize) -> usize {
    if probs[i] > 0.0 {
        return i;
    }
    (0..i)
        .rev()
        .find(|&j| probs[j] > 0.0)
        .unwrap_or_else(|| (i..probs.len()).find(|&j| probs[j] > 0.0).unwrap())
}

/// CM rate by Gauss-Hermite quadrature of the given order.
pub fn cm_mi_quad(c: &Constellation, snr_db: f64, order: usize) -> Result<f64> {
    Ok(quad_rates(c, snr_db, order, &[Metric::Cm])?[0])
}

/// CM rate by Monte Carlo; reproducible for a fixed seed and independent of
/// the worker count.
pub fn cm_mi_mc(c: &Constellation, snr_db: f64, samples: usize, seed: u64) -> Result<Estimate> {
    Ok(mc_rates(c, snr_db, samples, seed, &[Metric::Cm])?[0])
}

fn single(c: &Constellation, snr_db: f64, metric: Metric, method: Method) -> Result<Estimate> {
    let k = metric as usize;
    match method {
        Method::Quadrature { order } => Ok(Estimate {
            bits: quad_rates(c, snr_db, order, &[metric])?[k],
            stderr: None,
        }),
        Method::MonteCarlo { samples, seed } => {
            Ok(mc_rates(c, snr_db, samples, seed, &[metric])?[k])
        }
    }
}

/// Symbol-metric rate using the symbolic labels.
pub fn scm_mi(c: &Constellation, snr_db: f64, method: Method) -> Result<Estimate> {
    single(c, snr_db, Metric::Scm, method)
}

/// Bit-metric rate using the binary labels.
pub fn bcm_mi(c: &Constellation, snr_db: f64, method: Method) -> Result<Estimate> {
    single(c, snr_db, Metric::Bcm, method)
}

/// Any single rate.
pub fn rate(c: &Constellation, snr_db: f64, metric: Metric, method: Method) -> Result<Estimate> {
    single(c, snr_db, metric, method)
}

/// CM plus whichever of S-CM / B-CM is requested, in one pass.
pub fn evaluate(
    c: &Constellation,
    snr_db: f64,
    metrics: &[Metric],
    method: Method,
) -> Result<RatePoint> {
    let want = |m| metrics.contains(&m);
    let est = match method {
        Method::Quadrature { order } => {
            quad_rates(c, snr_db, order, metrics)?.map(|bits| Estimate { bits, stderr: None })
        }
        Method::MonteCarlo { samples, seed } => mc_rates(c, snr_db, samples, seed, metrics)?,
    };
    Ok(RatePoint {
        snr_db,
        capacity_bits: capacity(snr_db),
        cm: est[0],
        scm: want(Metric::Scm).then_some(est[1]),
        bcm: want(Metric::Bcm).then_some(est[2]),
    })
}

/// Lower and upper ends of the SNR bracket searched by [`snr_gap_with`].
pub const GAP_SNR_RANGE_DB: (f64, f64) = (-30.0, 60.0);

/// SNR gap in dB between a rate function and the Gaussian capacity at a
/// target rate: `SNR* - SNR_cap`, where `rate_fn(SNR*) = target` is found
/// by bisection and `capacity(SNR_cap) = target`.
pub fn snr_gap_with<F>(target_bits: f64, mut rate_fn: F) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let (mut lo, mut hi) = GAP_SNR_RANGE_DB;
    let top = rate_fn(hi)?;
    if !(target_bits > 0.0) || top < target_bits {
        return Err(RateError::Unreachable {
            target: target_bits,
            max: top,
        });
    }
    if rate_fn(lo)? >= target_bits {
        return Ok(lo - capacity_inverse_db(target_bits));
    }
    while hi - lo > 1e-7 {
        let mid = 0.5 * (lo + hi);
        if rate_fn(mid)? < target_bits {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi) - capacity_inverse_db(target_bits))
}

/// [`snr_gap_with`] for a rate of `c`.
pub fn snr_gap(c: &Constellation, target_bits: f64, metric: Metric, method: Method) -> Result<f64> {
    let h = c.entropy_bits();
    if target_bits >= h {
        return Err(RateError::Unreachable {
            target: target_bits,
            max: h,
        });
    }
    snr_gap_with(target_bits, |s| Ok(rate(c, s, metric, method)?.bits))
}

/// Gap at a fixed operating SNR: `snr_db - SNR_cap(rate(snr_db))`. Cheaper
/// than [`snr_gap`] and used as a search objective.
pub fn operating_gap_db(rate_bits: f64, snr_db: f64) -> f64 {
    snr_db - capacity_inverse_db(rate_bits)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constellation::{make_pam, make_square_qam, rotate};

    #[test]
    fn capacity_values() {
        assert!((capacity(0.0) - 1.0).abs() < 1e-15);
        assert!((capacity(10.0) - 11f64.log2()).abs() < 1e-12);
        assert_eq!(capacity(f64::NEG_INFINITY), 0.0);
        assert!((capacity_inverse_db(capacity(7.3)) - 7.3).abs() < 1e-12);
    }

    #[test]
    fn cm_limits() {
        let q64 = make_square_qam(3).unwrap();
        assert!(cm_mi_quad(&q64, -40.0, 48).unwrap() < 1e-3);
        let hi = cm_mi_quad(&q64, 40.0, 48).unwrap();
        assert!(6.0 - hi < 1e-6 && hi <= 6.0 + 1e-12, "{hi}");
        assert_eq!(cm_mi_quad(&q64, f64::NEG_INFINITY, 48).unwrap(), 0.0);
    }

    #[test]
    fn bpsk_matches_one_dimensional_integral() {
        // BPSK: I = 1 - E[log2(1 + exp(-4 sqrt(s) (sqrt(s) + n)))], n ~ N(0, 1/2);
        // evaluated with a fine trapezoid rule
        let c = make_pam(1).unwrap();
        for snr_db in [-5.0, 0.0, 5.0] {
            let s: f64 = db_to_linear(snr_db);
            let mut acc = 0.0;
            let h = 1e-4;
            let mut t: f64 = -12.0;
            while t <= 12.0 {
                let dens = (-t * t).exp() / PI.sqrt();
                let arg = -4.0 * s.sqrt() * (s.sqrt() + t);
                let softplus = if arg > 0.0 {
                    arg + (-arg).exp().ln_1p()
                } else {
                    arg.exp().ln_1p()
                };
                acc += h * dens * softplus / LN_2;
                t += h;
            }
            let oracle = 1.0 - acc;
            let fine = cm_mi_quad(&c, snr_db, 128).unwrap();
            assert!((fine - oracle).abs() < 1e-8, "{snr_db}: {fine} vs {oracle}");
            let default = cm_mi_quad(&c, snr_db, DEFAULT_ORDER).unwrap();
            assert!(
                (default - oracle).abs() < 1e-6,
                "{snr_db}: {default} vs {oracle}"
            );
        }
    }

    #[test]
    fn order_and_sample_bounds() {
        let c = make_square_qam(1).unwrap();
        assert_eq!(cm_mi_quad(&c, 0.0, 7), Err(RateError::Order(7)));
        assert_eq!(cm_mi_quad(&c, 0.0, 129), Err(RateError::Order(129)));
        assert_eq!(cm_mi_mc(&c, 0.0, 999, 1), Err(RateError::Samples(999)));
    }

    #[test]
    fn missing_labels_are_reported() {
        let c = make_square_qam(2).unwrap().without_labels();
        assert!(matches!(
            scm_mi(&c, 5.0, Method::quad()),
            Err(RateError::MissingLabels(Metric::Scm, _))
        ));
        assert!(matches!(
            bcm_mi(&c, 5.0, Method::quad()),
            Err(RateError::MissingLabels(Metric::Bcm, _))
        ));
    }

    #[test]
    fn unnormalized_input_is_rejected() {
        let c = make_square_qam(2).unwrap().scaled(2.0);
        assert!(matches!(
            cm_mi_quad(&c, 5.0, 48),
            Err(RateError::NotNormalized(_))
        ));
    }

    #[test]
    fn mc_is_deterministic_and_agrees_with_quadrature() {
        let c = make_square_qam(1).unwrap();
        let a = cm_mi_mc(&c, 5.0, 200_000, 7).unwrap();
        let b = cm_mi_mc(&c, 5.0, 200_000, 7).unwrap();
        assert_eq!(a.bits.to_bits(), b.bits.to_bits());
        let q = cm_mi_quad(&c, 5.0, 48).unwrap();
        assert!(
            (a.bits - q).abs() <= 3.0 * a.stderr.unwrap(),
            "{} vs {q}",
            a.bits
        );

        let z = cm_mi_mc(&make_square_qam(3).unwrap(), -40.0, 1_000_000, 3).unwrap();
        assert!(z.bits <= 3.0 * z.stderr.unwrap() + 1e-4);
    }

    #[test]
    fn mc_is_independent_of_thread_count() {
        let c = make_square_qam(2).unwrap();
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(3)
            .build()
            .unwrap();
        let a = pool.install(|| cm_mi_mc(&c, 8.0, 150_000, 11).unwrap());
        let b = cm_mi_mc(&c, 8.0, 150_000, 11).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn single_symbol_scm_equals_cm() {
        let c = make_square_qam(2).unwrap();
        let idx: Vec<Vec<u16>> = (0..16u16).map(|k| vec![k]).collect();
        let c = c.with_symbolic_labels(idx).unwrap();
        for snr in [0.0, 7.0, 14.0] {
            let cm = cm_mi_quad(&c, snr, 48).unwrap();
            let scm = scm_mi(&c, snr, Method::quad()).unwrap().bits;
            assert!((cm - scm).abs() < 1e-12);
        }
    }

    #[test]
    fn gray_qpsk_bcm_equals_cm() {
        let c = make_square_qam(1).unwrap();
        for snr in [-3.0, 4.0, 12.0] {
            let p = evaluate(&c, snr, &[Metric::Cm, Metric::Bcm], Method::quad()).unwrap();
            assert!((p.cm.bits - p.bcm.unwrap().bits).abs() < 1e-12, "{snr}");
        }
    }

    #[test]
    fn rotation_leaves_quadrature_unchanged() {
        let c = make_square_qam(3).unwrap();
        let base = evaluate(
            &c,
            9.0,
            &[Metric::Cm, Metric::Scm, Metric::Bcm],
            Method::quad(),
        )
        .unwrap();
        let r = rotate(&c, 0.3);
        let rot = evaluate(
            &r,
            9.0,
            &[Metric::Cm, Metric::Scm, Metric::Bcm],
            Method::quad(),
        )
        .unwrap();
        assert!((base.cm.bits - rot.cm.bits).abs() < 1e-12);
        assert!((base.scm.unwrap().bits - rot.scm.unwrap().bits).abs() < 1e-12);
        assert!((base.bcm.unwrap().bits - rot.bcm.unwrap().bits).abs() < 1e-12);
        // orbit-reduced CM equals the full sum
        let full = quad_rates(&c, 9.0, 48, &[Metric::Cm, Metric::Scm]).unwrap()[0];
        assert!((full - base.cm.bits).abs() < 1e-12);
    }

    #[test]
    fn gaussian_reference_gap_is_zero() {
        for target in [0.5, 2.0, 4.0] {
            let g = snr_gap_with(target, |s| Ok(capacity(s))).unwrap();
            assert!(g.abs() < 1e-6);
        }
    }

    #[test]
    fn gap_rejects_unreachable_targets() {
        let c = make_square_qam(1).unwrap();
        assert!(matches!(
            snr_gap(&c, 2.0, Metric::Cm, Method::quad()),
            Err(RateError::Unreachable { .. })
        ));
        let g = snr_gap(&c, 1.0, Metric::Cm, Method::quad()).unwrap();
        assert!(g > 0.0 && g < 1.0, "{g}");
    }
}
