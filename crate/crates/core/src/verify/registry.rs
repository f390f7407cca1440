//! The registered checks and the hypotheses each one depends on.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::geometry::Hypothesis;

/// Identifier of a registered check.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum CheckId {
    #[serde(rename = "CHK-SYM")]
    Sym,
    #[serde(rename = "CHK-PSD")]
    Psd,
    #[serde(rename = "CHK-KER")]
    Ker,
    #[serde(rename = "CHK-DUAL")]
    Dual,
    #[serde(rename = "CHK-LOW-A")]
    LowA,
    #[serde(rename = "CHK-LOW-B")]
    LowB,
    #[serde(rename = "CHK-EQ1")]
    Eq1,
    #[serde(rename = "CHK-CONS")]
    Cons,
    #[serde(rename = "CHK-MONO")]
    Mono,
    #[serde(rename = "CHK-ISO-N")]
    IsoN,
    #[serde(rename = "CHK-ISO-PAIR")]
    IsoPair,
    #[serde(rename = "CHK-FIELD")]
    Field,
    #[serde(rename = "CHK-HODGE")]
    Hodge,
    #[serde(rename = "CHK-ESC")]
    Esc,
    #[serde(rename = "CHK-BIH")]
    Bih,
    #[serde(rename = "CHK-MV")]
    Mv,
    #[serde(rename = "CHK-BALL")]
    Ball,
}

/// How a check's margin is judged.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    /// `lhs >= rhs`; near-equality is reported.
    Inequality,
    /// `lhs > rhs` must hold with margin beyond the tolerance.
    Strict,
    /// `|lhs - rhs|` within tolerance.
    Identity,
}

impl CheckId {
    pub const ALL: [CheckId; 17] = [
        CheckId::Sym,
        CheckId::Psd,
        CheckId::Ker,
        CheckId::Dual,
        CheckId::LowA,
        CheckId::LowB,
        CheckId::Eq1,
        CheckId::Cons,
        CheckId::Mono,
        CheckId::IsoN,
        CheckId::IsoPair,
        CheckId::Field,
        CheckId::Hodge,
        CheckId::Esc,
        CheckId::Bih,
        CheckId::Mv,
        CheckId::Ball,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            CheckId::Sym => "CHK-SYM",
            CheckId::Psd => "CHK-PSD",
            CheckId::Ker => "CHK-KER",
            CheckId::Dual => "CHK-DUAL",
            CheckId::LowA => "CHK-LOW-A",
            CheckId::LowB => "CHK-LOW-B",
            CheckId::Eq1 => "CHK-EQ1",
            CheckId::Cons => "CHK-CONS",
            CheckId::Mono => "CHK-MONO",
            CheckId::IsoN => "CHK-ISO-N",
            CheckId::IsoPair => "CHK-ISO-PAIR",
            CheckId::Field => "CHK-FIELD",
            CheckId::Hodge => "CHK-HODGE",
            CheckId::Esc => "CHK-ESC",
            CheckId::Bih => "CHK-BIH",
            CheckId::Mv => "CHK-MV",
            CheckId::Ball => "CHK-BALL",
        }
    }

    /// The mathematical statement the check tests.
    pub fn statement(&self) -> &'static str {
        match self {
            CheckId::Sym => "the discrete DtN matrix is symmetric",
            CheckId::Psd => "the discrete DtN matrix is positive semidefinite",
            CheckId::Ker => "dim ker T^[p] equals the p-th Betti number",
            CheckId::Dual => "first relative eigenvalue in degree p equals nu_{1,n-p}",
            CheckId::LowA => "nu_{1,p} > sigma_p (n-p+2)/(n-p+1) for p < (n+1)/2 on strictly p-convex domains",
            CheckId::LowB => "nu_{1,p} >= sigma_p (p+1)/p for p >= (n+1)/2 on strictly p-convex domains",
            CheckId::Eq1 => "nu_{1,n} >= (n+1) H on mean-convex domains, equality for balls",
            CheckId::Cons => "nu_{1,p} >= nu_{1,p-1} + sigma_p / p for every Euclidean domain",
            CheckId::Mono => "nu_{1,1} <= .. <= nu_{1,n} and nu_{1,p} > 0 on convex domains",
            CheckId::IsoN => "nu_{1,n} <= Vol(Σ)/Vol(Ω), equality only for harmonic domains",
            CheckId::IsoPair => "nu_{1,p-1} + nu_{1,n-p} <= Vol(Σ)/Vol(Ω) (and nu_{2,0} + nu_{1,n-1} for p = 1)",
            CheckId::Field => "eigenvalues bounded by boundary-to-volume energy ratios of harmonic fields",
            CheckId::Hodge => "lambda'_{1,p}(Σ) >= (sigma_p nu_{1,n-p} + sigma_{n-p+1} nu_{1,p-1}) / 2",
            CheckId::Esc => "lambda_1(Σ) >= (sigma_1 nu_{1,n-1} + n H nu_{2,0}) / 2 and lambda_1(Σ) > n H nu_{2,0} / 2",
            CheckId::Bih => "nu_{1,n} <= mu_1 <= Vol(Σ)/Vol(Ω) and mu_1 >= (n+1) H",
            CheckId::Mv => "mean-value gap and exit-time flux defect vanish together",
            CheckId::Ball => "unit-ball first eigenvalues: p+1 for p >= (n+1)/2, (n+3)p/(n+1) below",
        }
    }

    pub fn kind(&self) -> Kind {
        match self {
            CheckId::LowA => Kind::Strict,
            CheckId::Sym
            | CheckId::Psd
            | CheckId::Ker
            | CheckId::Dual
            | CheckId::Mv
            | CheckId::Ball => Kind::Identity,
            _ => Kind::Inequality,
        }
    }

    /// Degrees at which the check is instantiated on a domain with boundary
    /// dimension `n`.
    pub fn degrees(&self, n: usize) -> Vec<usize> {
        let half = |p: usize| 2 * p < n + 1;
        match self {
            CheckId::Sym | CheckId::Psd | CheckId::Ker => (0..=n).collect(),
            CheckId::Dual => (0..=n).collect(),
            CheckId::LowA => (1..=n).filter(|&p| half(p)).collect(),
            CheckId::LowB => (1..=n).filter(|&p| !half(p)).collect(),
            CheckId::Cons => (1..=n).collect(),
            CheckId::IsoPair => (1..=n).collect(),
            CheckId::Hodge => (1..=n).collect(),
            CheckId::Ball => (0..=n).collect(),
            _ => vec![n],
        }
    }

    /// Hypotheses at degree `p`; the Euclidean ambient space makes every
    /// curvature-term assumption automatic.
    pub fn hypotheses(&self, n: usize, p: usize) -> Vec<Hypothesis> {
        match self {
            CheckId::LowA | CheckId::LowB => vec![Hypothesis::StrictlyPConvex(p.max(1))],
            CheckId::Eq1 => vec![Hypothesis::MeanConvex],
            CheckId::Mono => vec![Hypothesis::Convex],
            CheckId::IsoPair if p >= 2 => {
                vec![
                    Hypothesis::AbsoluteVanishing(p),
                    Hypothesis::RelativeVanishing(p),
                ]
            }
            CheckId::IsoPair => vec![Hypothesis::RelativeVanishing(1)],
            CheckId::Hodge => {
                let p = p.clamp(1, n);
                vec![
                    Hypothesis::RelativeVanishing(p),
                    Hypothesis::NonnegativeCurvatures(p, n + 1 - p),
                ]
            }
            CheckId::Esc => vec![Hypothesis::StrictlyConvex],
            CheckId::Ball => vec![Hypothesis::UnitBall],
            _ => Vec::new(),
        }
    }
}

impl fmt::Display for CheckId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownCheck(pub String);

impl fmt::Display for UnknownCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "unknown check id `{}`", self.0)
    }
}

impl std::error::Error for UnknownCheck {}

impl FromStr for CheckId {
    type Err = UnknownCheck;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm = s.trim().to_ascii_uppercase();
        let norm = if norm.starts_with("CHK-") {
            norm
        } else {
            format!("CHK-{norm}")
        };
        CheckId::ALL
            .iter()
            .copied()
            .find(|c| c.as_str() == norm)
            .ok_or_else(|| UnknownCheck(s.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn registry_is_complete_and_statements_unique() {
        let ids: HashSet<_> = CheckId::ALL.iter().map(|c| c.as_str()).collect();
        assert_eq!(ids.len(), 17);
        let statements: HashSet<_> = CheckId::ALL.iter().map(|c| c.statement()).collect();
        assert_eq!(statements.len(), 17);
        for c in CheckId::ALL {
            assert_eq!(c.as_str().parse::<CheckId>().unwrap(), c);
            let json = serde_json::to_string(&c).unwrap();
            assert_eq!(json, format!("\"{}\"", c.as_str()));
        }
        assert_eq!("iso-n".parse::<CheckId>().unwrap(), CheckId::IsoN);
        assert!("CHK-NOPE".parse::<CheckId>().is_err());
    }

    #[test]
    fn degree_split_at_half_dimension() {
        assert_eq!(CheckId::LowA.degrees(1), Vec::<usize>::new());
        assert_eq!(CheckId::LowB.degrees(1), vec![1]);
        assert_eq!(CheckId::LowA.degrees(2), vec![1]);
        assert_eq!(CheckId::LowB.degrees(2), vec![2]);
    }
}
