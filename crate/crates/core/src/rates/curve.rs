use super::{evaluate, Estimate, Method, Metric, RatePoint, Result};
use crate::constellation::Constellation;
use crate::fmt::f64_17;

/// Rates of one format over an SNR sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct RateCurve {
    pub format_id: String,
    /// Free-form description of the input distribution, e.g. `uniform` or
    /// `mb lambda=0.7`.
    pub shaping: String,
    pub points: Vec<RatePoint>,
}

/// Evaluates `metrics` (CM is always included) at every SNR, in increasing
/// order of SNR.
pub fn rate_curve(
    c: &Constellation,
    snr_db: &[f64],
    metrics: &[Metric],
    method: Method,
    shaping: impl Into<String>,
) -> Result<RateCurve> {
    let mut grid = snr_db.to_vec();
    grid.sort_by(f64::total_cmp);
    let points = grid
        .iter()
        .map(|&s| evaluate(c, s, metrics, method))
        .collect::<Result<Vec<_>>>()?;
    Ok(RateCurve {
        format_id: c.name().to_string(),
        shaping: shaping.into(),
        points,
    })
}

impl RateCurve {
    pub const CSV_HEADER: &'static str = "snr_db,capacity,cm,scm,bcm,stderr";

    /// CSV with one row per SNR; absent rates are empty cells. The stderr
    /// column carries the CM standard error for Monte Carlo curves.
    pub fn to_csv(&self) -> String {
        let cell = |e: Option<Estimate>| e.map(|e| f64_17(e.bits)).unwrap_or_default();
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for p in &self.points {
            let row = [
                f64_17(p.snr_db),
                f64_17(p.capacity_bits),
                f64_17(p.cm.bits),
                cell(p.scm),
                cell(p.bcm),
                p.cm.stderr.map(f64_17).unwrap_or_default(),
            ];
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    /// Whether CM never decreases along the sweep, allowing two standard
    /// errors of slack on Monte Carlo points.
    pub fn cm_is_monotone(&self) -> bool {
        self.points.windows(2).all(|w| {
            let slack = 2.0 * (w[0].cm.stderr.unwrap_or(0.0) + w[1].cm.stderr.unwrap_or(0.0));
            w[1].cm.bits + slack + 1e-12 >= w[0].cm.bits
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constellation::make_square_qam;

    #[test]
    fn csv_layout() {
        let c = make_square_qam(2).unwrap();
        let curve = rate_curve(
            &c,
            &[10.0, 0.0],
            &[Metric::Cm, Metric::Bcm],
            Method::quad(),
            "uniform",
        )
        .unwrap();
        assert!(curve.cm_is_monotone());
        let csv = curve.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], RateCurve::CSV_HEADER);
        assert_eq!(lines.len(), 3);
        let cells: Vec<&str> = lines[1].split(',').collect();
        assert_eq!(cells.len(), 6);
        assert_eq!(cells[0].parse::<f64>().unwrap(), 0.0);
        assert_eq!(cells[1].parse::<f64>().unwrap(), 1.0);
        assert!(cells[3].is_empty() && cells[5].is_empty());
        assert!(!cells[4].is_empty());
    }
}
