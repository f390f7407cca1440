//! Richardson extrapolation over uniformly refined levels.

use serde::{Deserialize, Serialize};

use super::VerifyError;

/// Why an extrapolation should not be taken at face value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StudyFlag {
    /// The tail is constant to rounding; no order can be estimated.
    Constant,
    /// The last two differences change sign or do not shrink; the finest
    /// value is reported with a doubled error bar.
    NonMonotone,
    /// The estimated order lies outside `[1, 3]`.
    OrderOutOfRange,
}

/// Values of one quantity across refinement levels and their limit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceStudy {
    pub quantity: String,
    pub levels: Vec<usize>,
    pub values: Vec<f64>,
    pub order: Option<f64>,
    pub extrapolated: f64,
    /// `|extrapolated - finest|`, doubled on the fallback path.
    pub error_bar: f64,
    pub flag: Option<StudyFlag>,
}

impl ConvergenceStudy {
    pub fn finest(&self) -> f64 {
        *self
            .values
            .last()
            .expect("studies hold at least three values")
    }

    /// Study of a quantity that does not depend on the mesh.
    pub fn exact(quantity: &str, value: f64) -> Self {
        Self {
            quantity: quantity.to_string(),
            levels: Vec::new(),
            values: vec![value],
            order: None,
            extrapolated: value,
            error_bar: 0.0,
            flag: None,
        }
    }
}

/// Relative size below which consecutive differences count as rounding.
const FLAT: f64 = 1e-12;

/// Extrapolates from the last three levels, assuming the mesh size halves
/// between consecutive levels.
pub fn richardson(
    quantity: &str,
    levels: &[usize],
    values: &[f64],
) -> Result<ConvergenceStudy, VerifyError> {
    if values.len() < 3 || levels.len() != values.len() {
        return Err(VerifyError::TooFewLevels(values.len()));
    }
    if levels.windows(2).any(|w| w[1] != w[0] + 1) {
        return Err(VerifyError::NonConsecutiveLevels(levels.to_vec()));
    }
    let m = values.len();
    let (v1, v2, v3) = (values[m - 3], values[m - 2], values[m - 1]);
    let (d1, d2) = (v2 - v1, v3 - v2);
    let base = |order, extrapolated, error_bar, flag| ConvergenceStudy {
        quantity: quantity.to_string(),
        levels: levels.to_vec(),
        values: values.to_vec(),
        order,
        extrapolated,
        error_bar,
        flag,
    };
    let scale = FLAT * v1.abs().max(v3.abs()).max(1.0);
    if d1.abs() <= scale && d2.abs() <= scale {
        return Ok(base(None, v3, d2.abs(), Some(StudyFlag::Constant)));
    }
    if d1 * d2 <= 0.0 || d2.abs() >= d1.abs() {
        return Ok(base(None, v3, 2.0 * d2.abs(), Some(StudyFlag::NonMonotone)));
    }
    let q = (d1 / d2).log2();
    let limit = v3 + d2 / (q.exp2() - 1.0);
    let flag = (!(1.0..=3.0).contains(&q)).then_some(StudyFlag::OrderOutOfRange);
    Ok(base(Some(q), limit, (limit - v3).abs(), flag))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometric_sequence_recovers_order_two() {
        let s = richardson("q", &[1, 2, 3], &[2.10, 2.025, 2.00625]).unwrap();
        assert!((s.order.unwrap() - 2.0).abs() < 1e-12);
        assert!((s.extrapolated - 2.0).abs() < 1e-12);
        assert!((s.error_bar - 0.00625).abs() < 1e-12);
        assert_eq!(s.flag, None);
    }

    #[test]
    fn constant_sequence_is_flagged() {
        let s = richardson("q", &[0, 1, 2], &[1.5, 1.5, 1.5]).unwrap();
        assert_eq!(s.flag, Some(StudyFlag::Constant));
        assert_eq!(s.extrapolated, 1.5);
        assert_eq!(s.order, None);
    }

    #[test]
    fn oscillating_tail_falls_back_to_finest() {
        let s = richardson("q", &[2, 3, 4, 5], &[9.0, 3.1, 2.9, 3.0]).unwrap();
        assert_eq!(s.flag, Some(StudyFlag::NonMonotone));
        assert_eq!(s.extrapolated, 3.0);
        assert!((s.error_bar - 0.2).abs() < 1e-12);
    }

    #[test]
    fn slow_convergence_is_flagged() {
        let s = richardson("q", &[1, 2, 3], &[1.0, 1.9, 2.6]).unwrap();
        assert_eq!(s.flag, Some(StudyFlag::OrderOutOfRange));
        assert!(s.extrapolated > 2.6);
    }

    #[test]
    fn too_few_levels() {
        assert!(matches!(
            richardson("q", &[1, 2], &[1.0, 2.0]),
            Err(VerifyError::TooFewLevels(2))
        ));
        assert!(richardson("q", &[1, 3, 4], &[1.0, 2.0, 2.5]).is_err());
    }
}
