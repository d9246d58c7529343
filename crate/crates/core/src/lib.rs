//! Information-theoretic tools for common information, Gray–Wyner
//! inefficiencies, assisted residual information regions and secure
//! sampling checks on finite joint distributions.
//!
//! Distributions are dense [`JointPmf`] tables, auxiliary variables are
//! [`AuxChannel`] conditionals `p_{Q|X_A}`, and all logarithms are base 2.

pub mod channel;
pub mod config;
pub mod error;
pub mod functional;
pub mod gray_wyner;
pub mod info;
pub mod optim;
pub mod partition;
pub mod pmf;
pub mod region;
pub mod resolvability;
pub mod sampling;

pub use channel::{cardinality_bound, AuxChannel};
pub use error::{Error, Result};
pub use gray_wyner::{
    gw_lower_bound_check, gw_rates_for_channel, inefficiencies, GwRates, Inefficiency,
};
pub use info::{
    conditional_entropy, conditional_mutual_information, entropy, mutual_information,
    total_correlation, total_correlation_chain, total_variation,
};
pub use pmf::{JointPmf, MarginSpec};
pub use region::{
    default_directions, intercept_delta1, intercept_delta2, intercepts, minkowski_sum,
    region_approx, region_included, region_point_for_channel, region_t2k, scale_region,
    support_function, Direction, Inclusion, InclusionVerdict, InterceptResult, InterceptValue,
    RegionApprox, RegionKind, RegionOptions, RegionPoint,
};
pub use resolvability::{
    common_part, gk_common_information, is_perfectly_resolvable, wyner_common_information,
    wyner_with, CIResult, Certification, CommonPart, Resolvability, WynerOptions,
};
pub use sampling::{
    feasibility_test, monotonicity_harness, privacy_check, residual_total_correlation_dpi_check,
    scratch_characterization_perfect, scratch_check_statistical, simulate_pi_s, FeasibilityReport,
    MonotoneOp, PrivacyVerdict, ScratchCertificate, ViewLayout,
};
