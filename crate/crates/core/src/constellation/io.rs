//! Constellation JSON:
//!
//! ```text
//! {"name": str, "q": int, "normalized": bool,
//!  "points": [[re, im], ...], "probs": [p, ...],
//!  "labels": {"symbolic": [[s1, s2], ...] | null, "binary": ["010101", ...] | null}}
//! ```

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{BinaryLabels, Constellation, ConstellationError, Result, POWER_TOL};
use crate::fmt::to_json_string;

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct LabelsJson {
    pub symbolic: Option<Vec<Vec<u16>>>,
    pub binary: Option<Vec<String>>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ConstellationJson {
    pub name: String,
    pub q: usize,
    pub normalized: bool,
    pub points: Vec<[f64; 2]>,
    pub probs: Vec<f64>,
    pub labels: LabelsJson,
}

impl From<&Constellation> for ConstellationJson {
    fn from(c: &Constellation) -> Self {
        ConstellationJson {
            name: c.name.clone(),
            q: c.q,
            normalized: c.normalized,
            points: c.points.iter().map(|x| [x.re, x.im]).collect(),
            probs: c.probs.clone(),
            labels: LabelsJson {
                symbolic: c.symbolic.clone(),
                binary: c.binary.as_ref().map(|b| b.to_strings()),
            },
        }
    }
}

impl TryFrom<ConstellationJson> for Constellation {
    type Error = ConstellationError;

    fn try_from(j: ConstellationJson) -> Result<Self> {
        let points = j
            .points
            .iter()
            .map(|p| Complex64::new(p[0], p[1]))
            .collect();
        let mut c = Constellation::new(j.name, j.q, points, j.probs)?;
        if j.normalized && !c.normalized {
            return Err(ConstellationError::Invalid(format!(
                "flagged normalized but mean power is {} (tolerance {POWER_TOL})",
                c.mean_power()
            )));
        }
        if let Some(sym) = j.labels.symbolic {
            c = c.with_symbolic_labels(sym)?;
        }
        if let Some(bin) = j.labels.binary {
            c = c.with_binary_labels(BinaryLabels::from_strings(&bin)?)?;
        }
        Ok(c)
    }
}

impl Constellation {
    pub fn to_json(&self) -> String {
        to_json_string(&ConstellationJson::from(self)).expect("constellation serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let j: ConstellationJson =
            serde_json::from_str(s).map_err(|e| ConstellationError::Json(e.to_string()))?;
        Constellation::try_from(j)
    }
}

#[cfg(test)]
mod tests {
    use crate::constellation::Constellation;
    use crate::constellation::{
        gray_label_star, make_cqam_star, make_square_qam, star_default_gap,
    };

    #[test]
    fn json_round_trip_is_exact() {
        let c = gray_label_star(&make_cqam_star(8, star_default_gap(8)).unwrap()).unwrap();
        let s = c.to_json();
        let back = Constellation::from_json(&s).unwrap();
        assert_eq!(back, c);
        assert!(s.contains("\"binary\":[\""));
        let q = make_square_qam(2).unwrap();
        assert_eq!(Constellation::from_json(&q.to_json()).unwrap(), q);
    }

    #[test]
    fn json_rejects_inconsistent_input() {
        let bad = r#"{"name":"x","q":1,"normalized":true,"points":[[1,0],[2,0]],"probs":[0.5,0.5],"labels":{"symbolic":null,"binary":null}}"#;
        assert!(Constellation::from_json(bad).is_err());
        let bad_labels = r#"{"name":"x","q":1,"normalized":false,"points":[[1,0],[2,0]],"probs":[0.5,0.5],"labels":{"symbolic":[[0],[0]],"binary":null}}"#;
        assert!(Constellation::from_json(bad_labels).is_err());
    }
}
