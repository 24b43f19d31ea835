//! One record for every numeric threshold used by the analysis.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NumericPolicy {
    /// Relative Hermiticity slack: `max |A_ij - conj(A_ji)| <= hermitian * max(1, ‖A‖_F)`.
    pub hermitian: f64,
    /// Eigenvalues above `-psd_slack` count as nonnegative.
    pub psd_slack: f64,
    /// A state is faithful when its smallest eigenvalue exceeds this.
    pub faithful: f64,
    /// Generic equality threshold for derived identities.
    pub equality: f64,
    /// Relative singular-value cutoff for kernels and commutants.
    pub kernel_rel: f64,
    /// Degenerate divided differences switch to the derivative below this relative gap.
    pub divided_difference: f64,
    /// Eigenvalue floor used when taking logarithms of nearly singular states.
    pub log_floor: f64,
    /// Off-block leakage allowed after block decomposition.
    pub leakage: f64,
    /// Eigenvalue clustering threshold when grouping spectra.
    pub cluster: f64,
}

impl Default for NumericPolicy {
    fn default() -> Self {
        Self {
            hermitian: 1e-12,
            psd_slack: 1e-12,
            faithful: 1e-10,
            equality: 1e-8,
            kernel_rel: 1e-10,
            divided_difference: 1e-10,
            log_floor: 1e-14,
            leakage: 1e-8,
            cluster: 1e-7,
        }
    }
}

impl NumericPolicy {
    /// Scales every threshold by `factor`; used to tighten or loosen a whole suite.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            hermitian: self.hermitian * factor,
            psd_slack: self.psd_slack * factor,
            faithful: self.faithful * factor,
            equality: self.equality * factor,
            kernel_rel: self.kernel_rel * factor,
            divided_difference: self.divided_difference * factor,
            log_floor: self.log_floor,
            leakage: self.leakage * factor,
            cluster: self.cluster * factor,
        }
    }
}
