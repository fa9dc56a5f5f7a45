use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `27^{1/4}`, from `(a + b + c)^4 <= 27 (a^4 + b^4 + c^4)`.
pub fn fourth_root_27() -> f64 {
    27f64.powf(0.25)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Analytic,
    Calibrated,
    Derived,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LedgerProvenance {
    pub c1: Provenance,
    pub c2: Provenance,
    pub l: Provenance,
}

/// Existence constants.
///
/// * `c1`: `||v||_{L^4} <= C1 ||v||_{H^{1/2}}`
/// * `c2`: `||v||_{H^{1/2}} <= C2 ||v||_H^{1/2} ||v||_V^{1/2}`
/// * `k = c1 c2 / 2`: `||u||_E <= K (||u||_{Linf H} + ||u||_{L2 V})`
/// * `l`: `||y||_{Linf H} + ||y||_{L2 V} <= L (||y0||_H + ||g||_{L2 V'})`
/// * `m = 27^{1/4} K L`, `alpha = 1 / (6 M)`
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstantsLedger {
    #[serde(rename = "C1")]
    pub c1: f64,
    #[serde(rename = "C2")]
    pub c2: f64,
    #[serde(rename = "K")]
    pub k: f64,
    #[serde(rename = "L")]
    pub l: f64,
    #[serde(rename = "M")]
    pub m: f64,
    pub alpha: f64,
    pub provenance: LedgerProvenance,
}

impl ConstantsLedger {
    /// Assemble a ledger from the independent constants, deriving `K`, `M` and `alpha`.
    pub fn from_base(c1: f64, c2: f64, l: f64, provenance: LedgerProvenance) -> Result<Self> {
        for (name, v) in [("C1", c1), ("C2", c2), ("L", l)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::arg("ledger", format!("{name} must be positive, got {v}")));
            }
        }
        let k = c1 * c2 / 2.0;
        let m = fourth_root_27() * k * l;
        Ok(ConstantsLedger {
            c1,
            c2,
            k,
            l,
            m,
            alpha: 1.0 / (6.0 * m),
            provenance,
        })
    }

    /// Ledger whose constants are all supplied by hand.
    pub fn analytic(c1: f64, c2: f64, l: f64) -> Result<Self> {
        Self::from_base(
            c1,
            c2,
            l,
            LedgerProvenance {
                c1: Provenance::Analytic,
                c2: Provenance::Analytic,
                l: Provenance::Analytic,
            },
        )
    }

    /// Check the stored relations between the constants.
    pub fn is_consistent(&self) -> bool {
        let positive = [self.c1, self.c2, self.k, self.l, self.m, self.alpha]
            .iter()
            .all(|v| *v > 0.0 && v.is_finite());
        positive
            && self.k == self.c1 * self.c2 / 2.0
            && self.m == fourth_root_27() * self.k * self.l
            && (self.alpha * 6.0 * self.m - 1.0).abs() <= 4.0 * f64::EPSILON
    }
}
