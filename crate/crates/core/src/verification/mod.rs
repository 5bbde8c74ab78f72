//! Executable checks of the kernel identities, the isometry and the
//! regularity of discrete solutions.

mod integrals;
mod isometry;
mod regularity;

pub use integrals::{
    check_lambda_phi_bound, check_phi_cell_integral, fit_smoothing_exponent, smoothing_integral,
    PhiCellCheck, SmoothingExponentFit,
};
pub use isometry::{check_ito_isometry, isometry_rhs, IsometryCheck, MIN_ISOMETRY_SAMPLES};
pub use regularity::{
    estimate_space_regularity, estimate_time_regularity, regularity_threshold, sobolev_growth,
    RegularityReport, SobolevVerdict, SpaceRegularityReport,
};
