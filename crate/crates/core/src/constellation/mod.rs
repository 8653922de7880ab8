//! Two-dimensional signal constellations.
//!
//! A [`Constellation`] is a point set in the complex plane together with a
//! probability per point, a declared rotational symmetry order `q`, and
//! optional symbolic and binary labels. Constructors cover 2^m-PAM, square
//! QAM and several circular QAM (CQAM) families built from `q` shells of `q`
//! points each.

mod cqam;
mod io;
mod labels;

use std::f64::consts::PI;

use num_complex::Complex64;
use thiserror::Error;

pub use cqam::{
    make_cqam_greedy, make_cqam_hybrid, make_cqam_star, make_cqam_two_dist, star_default_gap,
    Shell, DEFAULT_PHASE_GRID, DEFAULT_RADIUS_STEP,
};
pub use io::ConstellationJson;
pub use labels::{gray_label_star, reflected_gray, BinaryLabels, STAR_GRAY_3BIT};

/// Tolerance on `sum(probs) == 1`.
pub const PROB_SUM_TOL: f64 = 1e-12;
/// Tolerance on unit mean power for normalized constellations.
pub const POWER_TOL: f64 = 1e-9;
/// Two points closer than this are considered identical.
pub const DISTINCT_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConstellationError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid constellation: {0}")]
    Invalid(String),
    #[error("invalid labels: {0}")]
    Labels(String),
    #[error("construction failed: {0}")]
    Construction(String),
    #[error("json: {0}")]
    Json(String),
}

pub type Result<T> = std::result::Result<T, ConstellationError>;

fn invalid_param<T>(msg: impl Into<String>) -> Result<T> {
    Err(ConstellationError::InvalidParameter(msg.into()))
}

/// A modulation format: the pair (alphabet, input distribution).
#[derive(Debug, Clone, PartialEq)]
pub struct Constellation {
    name: String,
    q: usize,
    normalized: bool,
    points: Vec<Complex64>,
    probs: Vec<f64>,
    symbolic: Option<Vec<Vec<u16>>>,
    binary: Option<BinaryLabels>,
}

impl Constellation {
    /// Builds a constellation after checking every structural invariant.
    ///
    /// `normalized` is not trusted: it is set only if the mean power really
    /// is one within [`POWER_TOL`].
    pub fn new(
        name: impl Into<String>,
        q: usize,
        points: Vec<Complex64>,
        probs: Vec<f64>,
    ) -> Result<Self> {
        if q == 0 {
            return Err(ConstellationError::Invalid("q must be at least 1".into()));
        }
        if points.is_empty() {
            return Err(ConstellationError::Invalid("empty point set".into()));
        }
        if points.len() != probs.len() {
            return Err(ConstellationError::Invalid(format!(
                "{} points but {} probabilities",
                points.len(),
                probs.len()
            )));
        }
        if points
            .iter()
            .any(|p| !p.re.is_finite() || !p.im.is_finite())
        {
            return Err(ConstellationError::Invalid("non-finite point".into()));
        }
        check_probs(&probs)?;
        if let Some(d) = min_distance_sq(&points) {
            if d.sqrt() <= DISTINCT_TOL {
                return Err(ConstellationError::Invalid(
                    "points are not pairwise distinct".into(),
                ));
            }
        }
        let mut c = Constellation {
            name: name.into(),
            q,
            normalized: false,
            points,
            probs,
            symbolic: None,
            binary: None,
        };
        c.normalized = (c.mean_power() - 1.0).abs() <= POWER_TOL;
        Ok(c)
    }

    /// Uniform distribution over `points`.
    pub fn uniform(name: impl Into<String>, q: usize, points: Vec<Complex64>) -> Result<Self> {
        let n = points.len();
        Self::new(name, q, points, vec![1.0 / n as f64; n])
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn symbolic_labels(&self) -> Option<&[Vec<u16>]> {
        self.symbolic.as_deref()
    }

    pub fn binary_labels(&self) -> Option<&BinaryLabels> {
        self.binary.as_ref()
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Redeclares the symmetry order. No check is made that the point set
    /// actually has it; see [`is_rotation_invariant`].
    pub fn with_q(mut self, q: usize) -> Result<Self> {
        if q == 0 {
            return Err(ConstellationError::Invalid("q must be at least 1".into()));
        }
        self.q = q;
        Ok(self)
    }

    /// Replaces the distribution, keeping geometry and labels.
    pub fn with_probs(mut self, probs: Vec<f64>) -> Result<Self> {
        if probs.len() != self.points.len() {
            return Err(ConstellationError::Invalid(format!(
                "{} points but {} probabilities",
                self.points.len(),
                probs.len()
            )));
        }
        check_probs(&probs)?;
        self.probs = probs;
        self.normalized = (self.mean_power() - 1.0).abs() <= POWER_TOL;
        Ok(self)
    }

    /// Attaches symbolic labels `(s_1, .., s_m)`, one tuple per point.
    /// The labeling must be a bijection onto the point set.
    pub fn with_symbolic_labels(mut self, labels: Vec<Vec<u16>>) -> Result<Self> {
        if labels.len() != self.points.len() {
            return Err(ConstellationError::Labels(format!(
                "{} labels for {} points",
                labels.len(),
                self.points.len()
            )));
        }
        let width = labels[0].len();
        if width == 0 || labels.iter().any(|l| l.len() != width) {
            return Err(ConstellationError::Labels(
                "symbolic labels must share one non-zero length".into(),
            ));
        }
        let mut sorted = labels.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != labels.len() {
            return Err(ConstellationError::Labels(
                "symbolic labels are not unique".into(),
            ));
        }
        self.symbolic = Some(labels);
        Ok(self)
    }

    pub fn with_binary_labels(mut self, labels: BinaryLabels) -> Result<Self> {
        if labels.len() != self.points.len() {
            return Err(ConstellationError::Labels(format!(
                "{} labels for {} points",
                labels.len(),
                self.points.len()
            )));
        }
        if !labels.is_injective() {
            return Err(ConstellationError::Labels(
                "binary labels are not unique".into(),
            ));
        }
        self.binary = Some(labels);
        Ok(self)
    }

    pub fn without_labels(mut self) -> Self {
        self.symbolic = None;
        self.binary = None;
        self
    }

    /// `sum p |x|^2`.
    pub fn mean_power(&self) -> f64 {
        self.points
            .iter()
            .zip(&self.probs)
            .map(|(x, p)| p * x.norm_sqr())
            .sum()
    }

    /// Probability-weighted centroid.
    pub fn centroid(&self) -> Complex64 {
        self.points
            .iter()
            .zip(&self.probs)
            .map(|(x, p)| x * *p)
            .sum()
    }

    /// Entropy of the input distribution in bits.
    pub fn entropy_bits(&self) -> f64 {
        entropy_bits(&self.probs)
    }

    /// Scales the points to unit mean power under the current distribution.
    pub fn normalize(mut self) -> Self {
        let scale = self.mean_power().sqrt().recip();
        for x in &mut self.points {
            *x *= scale;
        }
        self.normalized = true;
        self
    }

    /// Scales every point by `factor`.
    pub fn scaled(mut self, factor: f64) -> Self {
        for x in &mut self.points {
            *x *= factor;
        }
        self.normalized = (self.mean_power() - 1.0).abs() <= POWER_TOL;
        self
    }

    /// Indices of the fundamental set B: points whose phase lies in
    /// `[0, 2pi/q)`, ordered by increasing modulus (then phase).
    pub fn fundamental_set(&self) -> Vec<usize> {
        let sector = 2.0 * PI / self.q as f64;
        let mut idx: Vec<usize> = (0..self.len())
            .filter(|&i| sector_of(self.points[i], sector, self.q) == 0)
            .collect();
        idx.sort_by(|&a, &b| {
            let (pa, pb) = (self.points[a], self.points[b]);
            pa.norm()
                .partial_cmp(&pb.norm())
                .unwrap()
                .then(phase_0_2pi(pa).partial_cmp(&phase_0_2pi(pb)).unwrap())
        });
        idx
    }

    /// Decomposition of every point as `exp(i 2 pi s / q) * b_a` with `b_a`
    /// the a-th element of [`Constellation::fundamental_set`].
    ///
    /// Returns `(a, s)` per point. Fails when the constellation is not
    /// generated by its fundamental set under rotation by `2 pi / q`.
    pub fn region_decomposition(&self) -> Result<Vec<(usize, usize)>> {
        let q = self.q;
        let base = self.fundamental_set();
        if base.len() * q != self.len() {
            return Err(ConstellationError::Invalid(format!(
                "fundamental set has {} points, expected {} / {}",
                base.len(),
                self.len(),
                q
            )));
        }
        let mut out = vec![(usize::MAX, usize::MAX); self.len()];
        for (a, &bi) in base.iter().enumerate() {
            let b = self.points[bi];
            for s in 0..q {
                let target = b * Complex64::from_polar(1.0, 2.0 * PI * s as f64 / q as f64);
                let j = self
                    .points
                    .iter()
                    .position(|x| (x - target).norm() <= 1e-9)
                    .ok_or_else(|| {
                        ConstellationError::Invalid(
                            "point set is not closed under rotation by 2pi/q".into(),
                        )
                    })?;
                if out[j].0 != usize::MAX {
                    return Err(ConstellationError::Invalid(
                        "rotated fundamental points collide".into(),
                    ));
                }
                out[j] = (a, s);
            }
        }
        Ok(out)
    }
}

fn check_probs(probs: &[f64]) -> Result<()> {
    if probs.iter().any(|p| !p.is_finite() || *p < 0.0) {
        return Err(ConstellationError::Invalid(
            "probabilities must be finite and non-negative".into(),
        ));
    }
    let s: f64 = probs.iter().sum();
    if (s - 1.0).abs() > PROB_SUM_TOL {
        return Err(ConstellationError::Invalid(format!(
            "probabilities sum to {s}, not 1"
        )));
    }
    Ok(())
}

/// `-sum p log2 p`, with `0 log 0 = 0`.
pub fn entropy_bits(probs: &[f64]) -> f64 {
    probs
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.log2())
        .sum()
}

fn phase_0_2pi(x: Complex64) -> f64 {
    let a = x.arg();
    if a < 0.0 {
        a + 2.0 * PI
    } else {
        a
    }
}

fn sector_of(x: Complex64, sector: f64, q: usize) -> usize {
    // points sitting on a sector boundary up to rounding belong to the upper sector
    let t = phase_0_2pi(x) / sector + 1e-9;
    (t.floor() as usize) % q
}

fn min_distance_sq(points: &[Complex64]) -> Option<f64> {
    let mut best: Option<f64> = None;
    for i in 0..points.len() {
        for j in (i + 1)..points.len() {
            let d = (points[i] - points[j]).norm_sqr();
            best = Some(best.map_or(d, |b: f64| b.min(d)));
        }
    }
    best
}

/// `E(m) = (2^(2m) - 1) / 3`, the mean power of unnormalized 2^m-PAM.
pub fn pam_energy(m: u32) -> f64 {
    ((1u64 << (2 * m)) - 1) as f64 / 3.0
}

/// Unnormalized PAM amplitudes `-(2^m - 1), .., -1, 1, .., 2^m - 1`.
fn pam_levels(m: u32) -> Vec<f64> {
    let p = 1i64 << m;
    (0..p).map(|k| (2 * k - (p - 1)) as f64).collect()
}

/// 2^m-PAM on the real axis, scaled by `1/sqrt(E(m))` and uniformly
/// distributed. Declared symmetry order is 2 (antipodal).
pub fn make_pam(m: u32) -> Result<Constellation> {
    if !(1..=8).contains(&m) {
        return invalid_param(format!("PAM order m must satisfy 1 <= m <= 8, got {m}"));
    }
    let scale = pam_energy(m).sqrt().recip();
    let points = pam_levels(m)
        .into_iter()
        .map(|a| Complex64::new(a * scale, 0.0))
        .collect();
    let n = 1usize << m;
    let c = Constellation::uniform(format!("{}-PAM", n), 2, points)?
        .with_symbolic_labels((0..n as u16).map(|k| vec![k]).collect())?
        .with_binary_labels(BinaryLabels::from_words(
            m as usize,
            (0..n as u32).map(reflected_gray).collect(),
        )?)?;
    Ok(c)
}

/// Square 2^(2m)-QAM, the Cartesian product of two 2^m-PAM alphabets,
/// normalized to unit mean power. Point `k = i * 2^m + j` has in-phase
/// level `i` and quadrature level `j`; its symbolic label is `(i, j)` and its
/// binary label is the concatenation of the reflected Gray codes of `i` and
/// `j`. Declared symmetry order is 4.
pub fn make_square_qam(m_per_axis: u32) -> Result<Constellation> {
    if !(1..=4).contains(&m_per_axis) {
        return invalid_param(format!(
            "QAM bits per axis must satisfy 1 <= m <= 4, got {m_per_axis}"
        ));
    }
    let m = m_per_axis;
    let levels = pam_levels(m);
    let scale = (2.0 * pam_energy(m)).sqrt().recip();
    let p = levels.len();
    let mut points = Vec::with_capacity(p * p);
    let mut sym = Vec::with_capacity(p * p);
    let mut words = Vec::with_capacity(p * p);
    for (i, &a) in levels.iter().enumerate() {
        for (j, &b) in levels.iter().enumerate() {
            points.push(Complex64::new(a * scale, b * scale));
            sym.push(vec![i as u16, j as u16]);
            words.push((reflected_gray(i as u32) << m) | reflected_gray(j as u32));
        }
    }
    Constellation::uniform(format!("{}-QAM", p * p), 4, points)?
        .with_symbolic_labels(sym)?
        .with_binary_labels(BinaryLabels::from_words(2 * m as usize, words)?)
}

/// Summary geometry of a constellation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FigureReport {
    /// Squared minimum Euclidean distance.
    pub d_min_sq: f64,
    /// `sum p |x|^2`.
    pub mean_power: f64,
    /// `|X| d_min^2 / sum_x |x|^2` with an unweighted denominator.
    pub fom: f64,
    /// `E|X|^4`.
    pub mu4: f64,
    /// `E|X|^6`.
    pub mu6: f64,
}

/// Exhaustive pair scan plus power moments.
pub fn measure(c: &Constellation) -> FigureReport {
    let d_min_sq = min_distance_sq(&c.points).unwrap_or(f64::INFINITY);
    let sum_sq: f64 = c.points.iter().map(|x| x.norm_sqr()).sum();
    let mut mean_power = 0.0;
    let mut mu4 = 0.0;
    let mut mu6 = 0.0;
    for (x, &p) in c.points.iter().zip(&c.probs) {
        let e = x.norm_sqr();
        mean_power += p * e;
        mu4 += p * e * e;
        mu6 += p * e * e * e;
    }
    FigureReport {
        d_min_sq,
        mean_power,
        fom: c.len() as f64 * d_min_sq / sum_sq,
        mu4,
        mu6,
    }
}

/// Radial power-law stretch `r -> r^alpha` (phase kept), renormalized to
/// unit mean power. Labels, probabilities and `q` carry over.
pub fn stretch(c: &Constellation, alpha: f64) -> Result<Constellation> {
    if !(0.25..=4.0).contains(&alpha) {
        return invalid_param(format!(
            "stretch exponent must lie in [0.25, 4], got {alpha}"
        ));
    }
    let mut out = c.clone();
    for x in &mut out.points {
        let (r, th) = x.to_polar();
        *x = Complex64::from_polar(r.powf(alpha), th);
    }
    if min_distance_sq(&out.points).is_some_and(|d| d.sqrt() <= DISTINCT_TOL) {
        return Err(ConstellationError::Invalid(
            "stretch merged distinct points".into(),
        ));
    }
    Ok(out.normalize())
}

/// Multiplies every point by `exp(i theta)`.
pub fn rotate(c: &Constellation, theta: f64) -> Constellation {
    let w = Complex64::from_polar(1.0, theta);
    let mut out = c.clone();
    for x in &mut out.points {
        *x *= w;
    }
    out
}

/// Whether rotation by `2 pi / q` maps the point multiset onto itself with
/// matching probabilities, both within `tol`.
pub fn is_rotation_invariant(c: &Constellation, tol: f64) -> bool {
    let w = Complex64::from_polar(1.0, 2.0 * PI / c.q as f64);
    let mut used = vec![false; c.len()];
    for (x, p) in c.points.iter().zip(&c.probs) {
        let y = x * w;
        let hit = (0..c.len()).find(|&j| {
            !used[j] && (c.points[j] - y).norm() <= tol && (c.probs[j] - p).abs() <= tol
        });
        match hit {
            Some(j) => used[j] = true,
            None => return false,
        }
    }
    true
}
