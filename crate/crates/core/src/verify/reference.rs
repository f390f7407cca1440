//! Closed-form first eigenvalues of the unit ball.

use serde::{Deserialize, Serialize};

use super::VerifyError;

/// Known spectrum data of the unit ball `B^{n+1}` in one degree.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BallReference {
    pub n: usize,
    pub degree: usize,
    /// `ν_{1,p}`.
    pub first: f64,
    /// `ν_{2,0}`; only recorded in degree zero.
    pub second: Option<f64>,
    /// The value is announced without proof, so a mismatch only warns.
    pub unproven: bool,
}

/// `ν_{1,p}(B^{n+1})` for `n ∈ {1, 2}`: `p + 1` when `2p >= n + 1`,
/// `(n + 3) p / (n + 1)` for `1 <= p` below that, and `0` (with `ν_{2,0} = 1`)
/// for functions.
pub fn reference_ball(n: usize, p: usize) -> Result<BallReference, VerifyError> {
    if !(1..=2).contains(&n) || p > n {
        return Err(VerifyError::ReferenceOutOfRange { n, p });
    }
    let r = |first, second, unproven| BallReference {
        n,
        degree: p,
        first,
        second,
        unproven,
    };
    Ok(if p == 0 {
        r(0.0, Some(1.0), false)
    } else if 2 * p > n {
        r((p + 1) as f64, None, false)
    } else {
        r(((n + 3) * p) as f64 / (n + 1) as f64, None, true)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tabulated_values() {
        assert_eq!(reference_ball(1, 1).unwrap().first, 2.0);
        let r = reference_ball(2, 1).unwrap();
        assert!((r.first - 5.0 / 3.0).abs() < 1e-15 && r.unproven);
        assert_eq!(reference_ball(2, 2).unwrap().first, 3.0);
        let f = reference_ball(2, 0).unwrap();
        assert_eq!((f.first, f.second), (0.0, Some(1.0)));
        assert!(reference_ball(3, 1).is_err());
        assert!(reference_ball(1, 2).is_err());
    }
}
