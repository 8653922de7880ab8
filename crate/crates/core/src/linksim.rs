//! AWGN transmission and a toy nonlinear fiber link.
//!
//! The link treats nonlinear interference as extra Gaussian noise growing
//! with the cube of the launch power:
//!
//! ```text
//! SNR(P) = P / (spans * ase_per_span + eta_eff * P^3)
//! eta_eff = spans^nli_exponent * (eta0 + eta_moment_slope * (mu4 - 2))
//! ```
//!
//! `mu4 = E|X|^4` of the unit-power input; 2 is the circular Gaussian value,
//! so Gaussian-like inputs see `eta0`. Powers are in normalized units.

use std::str::FromStr;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::constellation::{measure, Constellation, FigureReport};
use crate::fmt::f64_17;
use crate::rates::{db_to_linear, linear_to_db, rate, Method, Metric, RateError};
use crate::shaping::{mb_weights, ShapingError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinkError {
    #[error("invalid link parameter: {0}")]
    InvalidParameter(String),
    #[error("no finite optimum launch power: effective nonlinear coefficient is {0}")]
    Unbounded(f64),
    #[error("malformed link config: {0}")]
    Config(String),
    #[error(transparent)]
    Rate(#[from] RateError),
    #[error(transparent)]
    Shaping(#[from] ShapingError),
}

pub type Result<T> = std::result::Result<T, LinkError>;

/// Received samples `sqrt(SNR) x + z`, `z` with variance 1/2 per real
/// dimension, reproducible for a fixed seed.
pub fn awgn_transmit(points: &[Complex64], snr_db: f64, seed: u64) -> Vec<Complex64> {
    let gain = db_to_linear(snr_db).sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sigma = std::f64::consts::FRAC_1_SQRT_2;
    points
        .iter()
        .map(|x| {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            x * gain + Complex64::new(re, im) * sigma
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LinkModel {
    pub spans: usize,
    pub ase_per_span: f64,
    pub eta0: f64,
    pub eta_moment_slope: f64,
    /// Reporting only.
    pub span_km: f64,
    /// 1 for incoherent accumulation of nonlinear noise over spans.
    pub nli_exponent: f64,
}

impl Default for LinkModel {
    fn default() -> Self {
        LinkModel {
            spans: 10,
            ase_per_span: 1e-3,
            eta0: 5e-3,
            eta_moment_slope: 1e-3,
            span_km: 80.0,
            nli_exponent: 1.0,
        }
    }
}

impl LinkModel {
    pub fn validate(&self) -> Result<()> {
        if self.spans == 0 {
            return Err(LinkError::InvalidParameter(
                "spans must be at least 1".into(),
            ));
        }
        let fields = [
            ("ase_per_span", self.ase_per_span),
            ("eta0", self.eta0),
            ("span_km", self.span_km),
            ("nli_exponent", self.nli_exponent),
        ];
        for (name, v) in fields {
            if !(v.is_finite() && v >= 0.0) {
                return Err(LinkError::InvalidParameter(format!(
                    "{name} must be finite and >= 0, got {v}"
                )));
            }
        }
        if !self.eta_moment_slope.is_finite() {
            return Err(LinkError::InvalidParameter(
                "eta_moment_slope must be finite".into(),
            ));
        }
        Ok(())
    }

    pub fn with_spans(mut self, spans: usize) -> Self {
        self.spans = spans;
        self
    }

    pub fn distance_km(&self) -> f64 {
        self.spans as f64 * self.span_km
    }

    /// Accumulated ASE noise power.
    pub fn ase_total(&self) -> f64 {
        self.spans as f64 * self.ase_per_span
    }

    /// Nonlinear coefficient for an input with fourth moment `mu4`.
    pub fn eta_eff(&self, mu4: f64) -> f64 {
        (self.spans as f64).powf(self.nli_exponent)
            * (self.eta0 + self.eta_moment_slope * (mu4 - 2.0))
    }

    /// Parses `key = value` lines (blank lines and `#` comments allowed) or a
    /// JSON object; absent keys keep their defaults.
    pub fn parse_config(text: &str) -> Result<Self> {
        let model = if text.trim_start().starts_with('{') {
            serde_json::from_str(text).map_err(|e| LinkError::Config(e.to_string()))?
        } else {
            let mut m = LinkModel::default();
            for (n, raw) in text.lines().enumerate() {
                let line = raw.split('#').next().unwrap_or("").trim();
                if line.is_empty() {
                    continue;
                }
                let (key, value) = line.split_once('=').ok_or_else(|| {
                    LinkError::Config(format!("line {}: expected key = value", n + 1))
                })?;
                let value = value.trim();
                let real = || {
                    f64::from_str(value).map_err(|_| {
                        LinkError::Config(format!("line {}: {value:?} is not a number", n + 1))
                    })
                };
                match key.trim() {
                    "spans" => {
                        m.spans = value.parse().map_err(|_| {
                            LinkError::Config(format!("line {}: spans must be an integer", n + 1))
                        })?
                    }
                    "ase_per_span" => m.ase_per_span = real()?,
                    "eta0" => m.eta0 = real()?,
                    "eta_moment_slope" => m.eta_moment_slope = real()?,
                    "span_km" => m.span_km = real()?,
                    "nli_exponent" => m.nli_exponent = real()?,
                    other => {
                        return Err(LinkError::Config(format!(
                            "line {}: unknown key {other:?}",
                            n + 1
                        )))
                    }
                }
            }
            m
        };
        model.validate()?;
        Ok(model)
    }
}

/// Linear SNR at launch power `p_launch`.
pub fn effective_snr(p_launch: f64, model: &LinkModel, report: &FigureReport) -> Result<f64> {
    if !(p_launch > 0.0 && p_launch.is_finite()) {
        return Err(LinkError::InvalidParameter(format!(
            "launch power must be positive, got {p_launch}"
        )));
    }
    Ok(p_launch / (model.ase_total() + model.eta_eff(report.mu4) * p_launch.powi(3)))
}

/// `(p_opt, snr_opt)` with `p_opt = (ase_total / (2 eta_eff))^(1/3)`, where
/// the nonlinear noise is half the ASE noise.
pub fn optimal_launch(model: &LinkModel, report: &FigureReport) -> Result<(f64, f64)> {
    let eta = model.eta_eff(report.mu4);
    if !(eta > 0.0) {
        return Err(LinkError::Unbounded(eta));
    }
    let ase = model.ase_total();
    if !(ase > 0.0) {
        return Err(LinkError::InvalidParameter(
            "ASE noise must be positive".into(),
        ));
    }
    let p = (ase / (2.0 * eta)).cbrt();
    Ok((p, p / (1.5 * ase)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReachPoint {
    pub spans: usize,
    pub distance_km: f64,
    pub p_opt: f64,
    pub snr_opt_db: f64,
    pub mi_bits: f64,
    pub lambda_opt: f64,
}

/// MB parameters swept by [`reach_curve`].
pub fn lambda_grid() -> Vec<f64> {
    (0..=80).map(|k| k as f64 * 0.05).collect()
}

/// For each span count, the MB parameter maximizing the optimum SNR (ties
/// within 1e-12 relative broken by the larger rate) and the rate there.
pub fn reach_curve(
    c: &Constellation,
    model: &LinkModel,
    span_counts: &[usize],
    metric: Metric,
    method: Method,
) -> Result<Vec<ReachPoint>> {
    model.validate()?;
    let profiles = lambda_grid()
        .into_iter()
        .map(|l| Ok((l, mb_weights(c, l)?.constellation)))
        .collect::<Result<Vec<_>>>()?;
    let reports: Vec<FigureReport> = profiles.iter().map(|(_, p)| measure(p)).collect();
    span_counts
        .par_iter()
        .map(|&spans| {
            let m = model.with_spans(spans);
            m.validate()?;
            let snrs = reports
                .iter()
                .map(|r| optimal_launch(&m, r))
                .collect::<Result<Vec<_>>>()?;
            let best = snrs.iter().map(|s| s.1).fold(f64::NEG_INFINITY, f64::max);
            let mut pick: Option<(usize, f64)> = None;
            for (k, s) in snrs.iter().enumerate() {
                if s.1 < best * (1.0 - 1e-12) {
                    continue;
                }
                let mi = rate(&profiles[k].1, linear_to_db(s.1), metric, method)?.bits;
                if pick.is_none_or(|(_, v)| mi > v) {
                    pick = Some((k, mi));
                }
            }
            let (k, mi) = pick.expect("non-empty lambda grid");
            Ok(ReachPoint {
                spans,
                distance_km: m.distance_km(),
                p_opt: snrs[k].0,
                snr_opt_db: linear_to_db(snrs[k].1),
                mi_bits: mi,
                lambda_opt: profiles[k].0,
            })
        })
        .collect()
}

pub const REACH_CSV_HEADER: &str = "distance_km,p_opt_dbm_norm,snr_opt_db,mi_bits,lambda_opt";

/// Reach CSV; launch power is reported as `10 log10(p_opt)` in normalized
/// units.
pub fn reach_csv(points: &[ReachPoint]) -> String {
    let mut out = String::from(REACH_CSV_HEADER);
    out.push('\n');
    for p in points {
        let row = [
            p.distance_km,
            linear_to_db(p.p_opt),
            p.snr_opt_db,
            p.mi_bits,
            p.lambda_opt,
        ]
        .map(f64_17);
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constellation::make_square_qam;

    fn report(mu4: f64) -> FigureReport {
        FigureReport {
            d_min_sq: 0.1,
            mean_power: 1.0,
            fom: 1.0,
            mu4,
            mu6: 0.0,
        }
    }

    #[test]
    fn awgn_statistics_and_determinism() {
        let x = vec![Complex64::new(0.0, 0.0); 1_000_000];
        let y = awgn_transmit(&x, 10.0, 4);
        let n = y.len() as f64;
        let var_re = y.iter().map(|v| v.re * v.re).sum::<f64>() / n;
        let var_im = y.iter().map(|v| v.im * v.im).sum::<f64>() / n;
        assert!((var_re - 0.5).abs() < 0.005 && (var_im - 0.5).abs() < 0.005);
        assert_eq!(y, awgn_transmit(&x, 10.0, 4));

        let c = make_square_qam(3).unwrap();
        let sent: Vec<Complex64> = (0..1_000_000).map(|k| c.points()[k % 64]).collect();
        let rx = awgn_transmit(&sent, 10.0, 9);
        let noise: f64 = rx
            .iter()
            .zip(&sent)
            .map(|(r, s)| (r - s * 10f64.sqrt()).norm_sqr())
            .sum::<f64>()
            / n;
        let signal: f64 = sent.iter().map(|s| s.norm_sqr() * 10.0).sum::<f64>() / n;
        assert!((linear_to_db(signal / noise) - 10.0).abs() < 0.05);
    }

    #[test]
    fn snr_formula_cases() {
        let lin = LinkModel {
            spans: 1,
            ase_per_span: 1.0,
            eta0: 0.0,
            eta_moment_slope: 0.0,
            ..LinkModel::default()
        };
        assert_eq!(effective_snr(2.0, &lin, &report(1.3)).unwrap(), 2.0);
        assert!(matches!(
            optimal_launch(&lin, &report(1.3)),
            Err(LinkError::Unbounded(_))
        ));
        let m = LinkModel { eta0: 0.5, ..lin };
        assert!((effective_snr(1.0, &m, &report(2.0)).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        let (p, s) = optimal_launch(&m, &report(2.0)).unwrap();
        assert!((p - 1.0).abs() < 1e-15 && (s - 2.0 / 3.0).abs() < 1e-15);
        assert!(effective_snr(0.0, &m, &report(2.0)).is_err());
    }

    #[test]
    fn optimum_meets_first_order_condition() {
        let m = LinkModel::default();
        let r = report(1.38);
        let (p, s) = optimal_launch(&m, &r).unwrap();
        let eta = m.eta_eff(r.mu4);
        assert!((eta * p.powi(3) - m.ase_total() / 2.0).abs() < 1e-9 * m.ase_total());
        assert!((effective_snr(p, &m, &r).unwrap() - s).abs() < 1e-12 * s);
        for f in [0.99, 1.01] {
            assert!(effective_snr(p * f, &m, &r).unwrap() < s);
        }
    }

    #[test]
    fn config_formats() {
        let kv = "# toy link\nspans = 12\neta0=0.004  # per span\n\nspan_km = 100\n";
        let m = LinkModel::parse_config(kv).unwrap();
        assert_eq!(m.spans, 12);
        assert_eq!(m.eta0, 0.004);
        assert_eq!(m.span_km, 100.0);
        assert_eq!(m.ase_per_span, LinkModel::default().ase_per_span);
        let j = LinkModel::parse_config(r#"{"spans": 3, "nli_exponent": 1.2}"#).unwrap();
        assert_eq!((j.spans, j.nli_exponent), (3, 1.2));
        assert!(LinkModel::parse_config("spans = 0").is_err());
        assert!(LinkModel::parse_config("bogus = 1").is_err());
        assert!(LinkModel::parse_config("spans 3").is_err());
        assert!(LinkModel::parse_config(r#"{"bogus": 1}"#).is_err());
    }

    #[test]
    fn reach_is_monotone_and_consistent() {
        let c = make_square_qam(2).unwrap();
        let m = LinkModel::default();
        let pts = reach_curve(&c, &m, &[5, 10, 20], Metric::Cm, Method::quad()).unwrap();
        for w in pts.windows(2) {
            assert!(w[1].snr_opt_db < w[0].snr_opt_db);
        }
        for p in &pts {
            let shaped = mb_weights(&c, p.lambda_opt).unwrap().constellation;
            let mi = rate(&shaped, p.snr_opt_db, Metric::Cm, Method::quad())
                .unwrap()
                .bits;
            assert!((mi - p.mi_bits).abs() < 1e-9);
        }
        let csv = reach_csv(&pts);
        assert!(csv.starts_with(REACH_CSV_HEADER));
        assert_eq!(csv.lines().count(), 4);
    }

    #[test]
    fn flat_moment_slope_breaks_ties_by_rate() {
        let c = make_square_qam(3).unwrap();
        let m = LinkModel {
            eta_moment_slope: 0.0,
            ..LinkModel::default()
        };
        let pts = reach_curve(&c, &m, &[10], Metric::Cm, Method::Quadrature { order: 16 }).unwrap();
        let best = lambda_grid()
            .into_iter()
            .map(|l| {
                let s = mb_weights(&c, l).unwrap().constellation;
                rate(
                    &s,
                    pts[0].snr_opt_db,
                    Metric::Cm,
                    Method::Quadrature { order: 16 },
                )
                .unwrap()
                .bits
            })
            .fold(f64::NEG_INFINITY, f64::max);
        assert_eq!(pts[0].mi_bits, best);
        assert!(pts[0].lambda_opt > 0.0);
    }
}
