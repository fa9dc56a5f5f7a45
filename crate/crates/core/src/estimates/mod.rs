//! Numerical checks of the a priori inequalities and the constants they use.

mod calibrate;
mod checks;
mod dependence;
mod ledger;
mod report;
mod sampling;

pub use calibrate::{
    calibrate_constants, embedding_ratio, interpolation_ratio, regularity_ratio, Calibration,
    CalibrationSummary, INTERPOLATION_TOL, MIN_CALIBRATION_SAMPLES,
};
pub use checks::{
    check_embedding, check_energy, check_f_contraction, check_g_lipschitz,
    check_semigroup_regularity, energy_series, EnergySeries,
};
pub use dependence::{
    check_continuous_dependence, check_gronwall_bound, check_perturbation_scaling,
    DependenceSeries, GronwallFit,
};
pub use ledger::{fourth_root_27, ConstantsLedger, LedgerProvenance, Provenance};
pub use report::{CheckReport, ContextValue, DEFAULT_SLACK};
pub use sampling::{gaussian_field, knotted_path, smooth_path, CALIBRATION_DECAY};
