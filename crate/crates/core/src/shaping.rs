//! Maxwell-Boltzmann shaping of a fixed geometry: `p_i ∝ exp(-λ |x_i|^2)`
//! on the points as given, after which the constellation is rescaled to
//! unit mean power under the new distribution.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::constellation::{entropy_bits, stretch, Constellation, ConstellationError};
use crate::fmt::to_json_string;
use crate::rates::{operating_gap_db, rate, Method, Metric, RateError};

/// Upper end of the λ search used for rate maximization.
pub const LAMBDA_MAX: f64 = 4.0;
/// λ tolerance of the golden-section search.
pub const LAMBDA_TOL: f64 = 1e-4;
/// Entropy tolerance of [`lambda_for_entropy`], in bits.
pub const ENTROPY_TOL: f64 = 1e-7;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ShapingError {
    #[error("invalid shaping parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Constellation(#[from] ConstellationError),
    #[error(transparent)]
    Rate(#[from] RateError),
}

pub type Result<T> = std::result::Result<T, ShapingError>;

/// How the MB weights are formed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ShapingMode {
    /// `exp(-λ|x|^2)` over the whole 2-D point set.
    Joint,
    /// Independent MB laws on the in-phase and quadrature amplitudes of a
    /// Cartesian grid, multiplied together.
    PerAxis,
}

impl ShapingMode {
    /// Per-axis for Cartesian grids (square QAM), joint otherwise.
    pub fn default_for(c: &Constellation) -> Self {
        if grid_axes(c).is_some() {
            ShapingMode::PerAxis
        } else {
            ShapingMode::Joint
        }
    }
}

/// What a profile was chosen for.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Objective {
    /// λ given directly.
    Fixed,
    EntropyTarget {
        target_bits: f64,
    },
    MiMax {
        metric: String,
        snr_db: f64,
        rate_bits: f64,
        at_boundary: bool,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShapingProfile {
    pub lambda: f64,
    pub mode: ShapingMode,
    pub probs: Vec<f64>,
    pub entropy_bits: f64,
    pub objective: Objective,
    /// The input geometry carrying `probs`, rescaled to unit mean power.
    pub constellation: Constellation,
}

#[derive(Serialize)]
struct Sidecar<'a> {
    lambda: f64,
    entropy_bits: f64,
    mode: ShapingMode,
    objective: &'a Objective,
}

impl ShapingProfile {
    /// `{"lambda", "entropy_bits", "mode", "objective"}`; the probabilities
    /// travel in the constellation JSON.
    pub fn sidecar_json(&self) -> String {
        to_json_string(&Sidecar {
            lambda: self.lambda,
            entropy_bits: self.entropy_bits,
            mode: self.mode,
            objective: &self.objective,
        })
        .expect("sidecar serializes")
    }
}

/// Distinct in-phase and quadrature amplitudes, and each point's index into
/// them, when the points form a full Cartesian grid.
fn grid_axes(c: &Constellation) -> Option<(Vec<f64>, Vec<f64>, Vec<(usize, usize)>)> {
    const TOL: f64 = 1e-9;
    let axis = |vals: Vec<f64>| {
        let mut v = vals;
        v.sort_by(f64::total_cmp);
        v.dedup_by(|a, b| (*a - *b).abs() <= TOL);
        v
    };
    let re = axis(c.points().iter().map(|x| x.re).collect());
    let im = axis(c.points().iter().map(|x| x.im).collect());
    if re.len() < 2 || im.len() < 2 || re.len() * im.len() != c.len() {
        return None;
    }
    let find = |v: &[f64], a: f64| v.iter().position(|b| (a - b).abs() <= TOL);
    let mut seen = vec![false; c.len()];
    let mut idx = Vec::with_capacity(c.len());
    for x in c.points() {
        let (i, j) = (find(&re, x.re)?, find(&im, x.im)?);
        let cell = i * im.len() + j;
        if std::mem::replace(&mut seen[cell], true) {
            return None;
        }
        idx.push((i, j));
    }
    Some((re, im, idx))
}

fn mb_law(energies: impl Iterator<Item = f64> + Clone, lambda: f64) -> Vec<f64> {
    let floor = energies.clone().fold(f64::INFINITY, f64::min);
    let w: Vec<f64> = energies.map(|e| (-lambda * (e - floor)).exp()).collect();
    let z: f64 = w.iter().sum();
    w.into_iter().map(|v| v / z).collect()
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(ShapingError::InvalidParameter(format!(
            "lambda must be finite and >= 0, got {lambda}"
        )));
    }
    Ok(())
}

fn weights(c: &Constellation, lambda: f64, mode: ShapingMode) -> Result<Vec<f64>> {
    check_lambda(lambda)?;
    match mode {
        ShapingMode::Joint => Ok(mb_law(c.points().iter().map(|x| x.norm_sqr()), lambda)),
        ShapingMode::PerAxis => {
            let (re, im, idx) = grid_axes(c).ok_or_else(|| {
                ShapingError::InvalidParameter("per-axis shaping needs a Cartesian grid".into())
            })?;
            let p_re = mb_law(re.iter().map(|a| a * a), lambda);
            let p_im = mb_law(im.iter().map(|a| a * a), lambda);
            Ok(idx.iter().map(|&(i, j)| p_re[i] * p_im[j]).collect())
        }
    }
}

fn profile(
    c: &Constellation,
    lambda: f64,
    mode: ShapingMode,
    objective: Objective,
) -> Result<ShapingProfile> {
    let probs = weights(c, lambda, mode)?;
    let constellation = c.clone().with_probs(probs.clone())?.normalize();
    Ok(ShapingProfile {
        lambda,
        mode,
        entropy_bits: entropy_bits(&probs),
        probs,
        objective,
        constellation,
    })
}

/// MB distribution with parameter `lambda` in the format's default mode.
pub fn mb_weights(c: &Constellation, lambda: f64) -> Result<ShapingProfile> {
    mb_weights_with(c, lambda, ShapingMode::default_for(c))
}

pub fn mb_weights_with(
    c: &Constellation,
    lambda: f64,
    mode: ShapingMode,
) -> Result<ShapingProfile> {
    profile(c, lambda, mode, Objective::Fixed)
}

/// Entropy approached as λ grows: all mass on the smallest-energy points.
pub fn entropy_floor(c: &Constellation) -> f64 {
    let e: Vec<f64> = c.points().iter().map(|x| x.norm_sqr()).collect();
    let min = e.iter().copied().fold(f64::INFINITY, f64::min);
    let n = e
        .iter()
        .filter(|&&v| v - min <= 1e-9 * min.max(1.0))
        .count();
    (n as f64).log2()
}

/// λ whose MB law has entropy `target_bits`, by bracketing then bisection.
pub fn lambda_for_entropy(c: &Constellation, target_bits: f64) -> Result<ShapingProfile> {
    let mode = ShapingMode::default_for(c);
    let top = (c.len() as f64).log2();
    let floor = entropy_floor(c);
    if !(target_bits > floor && target_bits <= top + 1e-12) {
        return Err(ShapingError::InvalidParameter(format!(
            "target entropy {target_bits} bits outside ({floor}, {top}]"
        )));
    }
    let objective = Objective::EntropyTarget { target_bits };
    if target_bits >= top - ENTROPY_TOL {
        return profile(c, 0.0, mode, objective);
    }
    let h = |l: f64| weights(c, l, mode).map(|p| entropy_bits(&p));
    let (mut lo, mut hi) = (0.0, 1.0);
    while h(hi)? > target_bits {
        lo = hi;
        hi *= 2.0;
        if hi > 1e12 {
            return Err(ShapingError::InvalidParameter(format!(
                "entropy {target_bits} bits not reached below lambda {hi}"
            )));
        }
    }
    let mut mid = 0.5 * (lo + hi);
    for _ in 0..200 {
        mid = 0.5 * (lo + hi);
        let v = h(mid)?;
        if (v - target_bits).abs() <= ENTROPY_TOL {
            break;
        }
        if v > target_bits {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    profile(c, mid, mode, objective)
}

/// λ in `[0, LAMBDA_MAX]` maximizing `metric` at `snr_db`, by golden-section
/// search. Endpoint maxima are reported through `at_boundary`.
pub fn optimize_lambda_for_mi(
    c: &Constellation,
    snr_db: f64,
    metric: Metric,
    method: Method,
) -> Result<ShapingProfile> {
    let mode = ShapingMode::default_for(c);
    let eval = |l: f64| -> Result<f64> {
        let shaped = profile(c, l, mode, Objective::Fixed)?.constellation;
        Ok(rate(&shaped, snr_db, metric, method)?.bits)
    };
    let (lambda, best) = golden_max(eval, 0.0, LAMBDA_MAX, LAMBDA_TOL)?;
    let at_boundary = lambda <= LAMBDA_TOL || lambda >= LAMBDA_MAX - LAMBDA_TOL;
    let objective = Objective::MiMax {
        metric: metric.to_string(),
        snr_db,
        rate_bits: best,
        at_boundary,
    };
    profile(c, lambda, mode, objective)
}

/// Golden-section maximization on `[a, b]`; the endpoints are also compared
/// so a monotone objective returns its better end exactly.
fn golden_max<F>(mut f: F, a: f64, b: f64, tol: f64) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = (a, b);
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let (mut f1, mut f2) = (f(x1)?, f(x2)?);
    while hi - lo > tol {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2)?;
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1)?;
        }
    }
    let mid = 0.5 * (lo + hi);
    let mut best = (mid, f(mid)?);
    for x in [a, b] {
        let v = f(x)?;
        if v > best.1 {
            best = (x, v);
        }
    }
    Ok(best)
}

/// One SNR of a stretch search.
#[derive(Debug, Clone, PartialEq)]
pub struct GapPoint {
    pub snr_db: f64,
    pub lambda: f64,
    pub rate_bits: f64,
    /// `snr_db` minus the SNR at which capacity equals `rate_bits`.
    pub gap_db: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StretchSearch {
    pub alpha: f64,
    pub worst_gap_db: f64,
    pub points: Vec<GapPoint>,
    /// Stretched, still uniform constellation.
    pub constellation: Constellation,
}

/// Gap profile of `c` with λ re-optimized at every SNR.
pub fn shaped_gaps(
    c: &Constellation,
    snr_db: &[f64],
    metric: Metric,
    method: Method,
) -> Result<Vec<GapPoint>> {
    snr_db
        .iter()
        .map(|&s| {
            let p = optimize_lambda_for_mi(c, s, metric, method)?;
            let Objective::MiMax { rate_bits, .. } = p.objective else {
                unreachable!()
            };
            Ok(GapPoint {
                snr_db: s,
                lambda: p.lambda,
                rate_bits,
                gap_db: operating_gap_db(rate_bits, s),
            })
        })
        .collect()
}

/// Radial stretch exponent minimizing the worst shaped gap over `snr_db`:
/// a 0.1 grid on `[0.5, 2]`, refined at 0.01 around the coarse winner.
pub fn optimize_stretch(
    c: &Constellation,
    snr_db: &[f64],
    metric: Metric,
    method: Method,
) -> Result<StretchSearch> {
    let score = |alpha: f64| -> Result<StretchSearch> {
        let s = stretch(c, alpha)?;
        let points = shaped_gaps(&s, snr_db, metric, method)?;
        let worst_gap_db = points
            .iter()
            .map(|p| p.gap_db)
            .fold(f64::NEG_INFINITY, f64::max);
        Ok(StretchSearch {
            alpha,
            worst_gap_db,
            points,
            constellation: s,
        })
    };
    let pick = |grid: Vec<f64>| -> Result<StretchSearch> {
        let mut best: Option<StretchSearch> = None;
        for a in grid {
            let cand = score(a)?;
            if best
                .as_ref()
                .is_none_or(|b| cand.worst_gap_db < b.worst_gap_db)
            {
                best = Some(cand);
            }
        }
        Ok(best.expect("non-empty grid"))
    };
    let coarse = pick((5..=20).map(|k| k as f64 / 10.0).collect())?;
    let centre = (coarse.alpha * 100.0).round() as i64;
    pick(
        ((centre - 9)..=(centre + 9))
            .map(|k| k as f64 / 100.0)
            .filter(|a| (0.25..=4.0).contains(a))
            .collect(),
    )
}
