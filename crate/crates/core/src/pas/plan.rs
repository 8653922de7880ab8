//! Rate algebra of the layered PAS scheme. All rates are in q-ary symbols:
//!
//! * `r_am`: symbols needed to label one fundamental point,
//! * `r_dm`: matcher rate,
//! * `r_c`: systematic channel-code rate,
//! * `split`: fraction of the information that bypasses the matcher,
//! * `r_t`: information symbols per region symbol.
//!
//! The layers are compatible when
//! `R_C - rR_C - R_AM + R_AM R_C + rR_AM - rR_AM R_C - rR_AM R_DM = 0`.

use serde::{Deserialize, Serialize};

use super::{PasError, Result};

const RATE_TOL: f64 = 1e-12;

/// How region symbols map onto two-dimensional channel uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Layering {
    /// One q-ary region symbol per 2-D symbol (CQAM rotations, QAM quadrants).
    Circular { q: usize },
    /// Binary PAS on each quadrature of a square QAM: a sign bit per real
    /// dimension, so two region symbols per 2-D symbol.
    BinaryPerAxis,
}

impl Layering {
    pub fn q(self) -> usize {
        match self {
            Layering::Circular { q } => q,
            Layering::BinaryPerAxis => 2,
        }
    }

    fn bits_per_rate_unit(self) -> f64 {
        match self {
            Layering::Circular { q } => (q as f64).log2(),
            Layering::BinaryPerAxis => 2.0,
        }
    }
}

/// Frame lengths once a plan is instantiated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrameLengths {
    /// Information length in q-ary symbols.
    #[serde(rename = "M")]
    pub info_symbols: usize,
    /// Output length in region symbols.
    #[serde(rename = "N")]
    pub output_symbols: usize,
    pub padding_bits: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PasPlan {
    pub layering: Layering,
    pub q: usize,
    pub r_am: f64,
    pub r_dm: f64,
    pub r_c: f64,
    pub split: f64,
    pub r_t: f64,
    pub r_t_bits: f64,
    #[serde(flatten)]
    pub lengths: Option<FrameLengths>,
}

/// Smallest compatible code rate, reached with no split: `R_AM / (1 + R_AM)`.
pub fn min_code_rate(r_am: f64) -> f64 {
    r_am / (1.0 + r_am)
}

/// Upper bound on the input entropy in bits, `log2(q) (1 + R_DM)`.
pub fn max_entropy(q: usize, r_dm: f64) -> f64 {
    (q as f64).log2() * (1.0 + r_dm)
}

/// Residual of the compatibility polynomial.
pub fn compatibility_residual(r_am: f64, r_dm: f64, r_c: f64, split: f64) -> f64 {
    r_c - split * r_c - r_am + r_am * r_c + split * r_am - split * r_am * r_c - split * r_am * r_dm
}

fn check_common(layering: Layering, r_am: f64, r_dm: f64) -> Result<()> {
    if layering.q() < 2 {
        return Err(PasError::InvalidParameter(format!(
            "q must be at least 2, got {}",
            layering.q()
        )));
    }
    if !(r_am >= 1.0 && r_am.is_finite()) {
        return Err(PasError::IncompatibleRates(format!(
            "R_AM must be >= 1, got {r_am}"
        )));
    }
    if !(r_dm > 0.0 && r_dm <= 1.0) {
        return Err(PasError::IncompatibleRates(format!(
            "R_DM must lie in (0, 1], got {r_dm}"
        )));
    }
    Ok(())
}

pub(super) fn finish(layering: Layering, r_am: f64, r_dm: f64, r_c: f64, split: f64) -> PasPlan {
    let r_t = r_c - r_am + r_am * r_c + r_am * r_dm;
    PasPlan {
        layering,
        q: layering.q(),
        r_am,
        r_dm,
        r_c,
        split,
        r_t,
        r_t_bits: layering.bits_per_rate_unit() * r_t,
        lengths: None,
    }
}

/// Plan from the split ratio; the code rate follows from compatibility.
pub fn plan_rates(layering: Layering, r_am: f64, r_dm: f64, split: f64) -> Result<PasPlan> {
    check_common(layering, r_am, r_dm)?;
    if !(0.0..1.0).contains(&split) {
        return Err(PasError::IncompatibleRates(format!(
            "split r must lie in [0, 1), got {split}"
        )));
    }
    let r_c = min_code_rate(r_am) * (1.0 + split / (1.0 - split) * r_dm);
    if !(r_c > 0.0 && r_c < 1.0) {
        return Err(PasError::IncompatibleRates(format!(
            "code rate R_C = {r_c} implied by r = {split} is not in (0, 1)"
        )));
    }
    Ok(finish(layering, r_am, r_dm, r_c, split))
}

/// Plan from the code rate; the split follows from compatibility.
pub fn split_for(layering: Layering, r_am: f64, r_dm: f64, r_c: f64) -> Result<PasPlan> {
    check_common(layering, r_am, r_dm)?;
    if !(r_c > 0.0 && r_c < 1.0) {
        return Err(PasError::IncompatibleRates(format!(
            "R_C must lie in (0, 1), got {r_c}"
        )));
    }
    let floor = min_code_rate(r_am);
    if r_c < floor - RATE_TOL {
        return Err(PasError::IncompatibleRates(format!(
            "R_C = {r_c} is below the minimum R_AM/(1+R_AM) = {floor}"
        )));
    }
    let split = (1.0 - r_am * r_dm / (r_c - r_am + r_am * r_c + r_am * r_dm)).max(0.0);
    Ok(finish(layering, r_am, r_dm, r_c, split))
}

impl PasPlan {
    pub fn to_json(&self) -> String {
        crate::fmt::to_json_string(self).expect("plan serializes")
    }
}
