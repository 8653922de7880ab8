//! Constellation shaping workbench.
//!
//! * [`constellation`]: PAM, square QAM and circular QAM (CQAM) construction,
//!   labeling and geometric figures.
//! * [`shaping`]: Maxwell-Boltzmann input distributions.
//! * [`rates`]: CM / S-CM / B-CM achievable rates over the complex AWGN
//!   channel, by Gauss-Hermite quadrature or Monte Carlo.
//! * [`pas`]: probabilistic amplitude shaping rate planning, constant
//!   composition distribution matching and frame assembly.
//! * [`linksim`]: AWGN transmission and a cubic nonlinear-noise link model.

pub mod constellation;
pub mod fmt;
pub mod linksim;
pub mod pas;
pub mod rates;
pub mod shaping;
