//! Secrecy capacity of the Gaussian MIMO wiretap channel.
//!
//! A channel is described by the Gram matrices `W1 = H1†H1` (legitimate
//! receiver) and `W2 = H2†H2` (eavesdropper), with unit noise. The secrecy
//! capacity is
//!
//! ```text
//! C_s = max_{R ⪰ 0, tr R <= P_T} ln|I + W1 R| - ln|I + W2 R|
//! ```
//!
//! in nats. The crate provides closed-form solutions for the structured
//! cases (weak, isotropic, omnidirectional eavesdropper, shared right
//! singular vectors), optimality certificates for zero-forcing, water-filling
//! and isotropic signaling, and brute-force oracles to check all of them.

pub mod certificates;
pub mod channel;
pub mod error;
pub mod isotropic;
pub mod matrix;
pub mod omni;
pub mod oracle;
pub mod rate;
pub mod rsv;
pub mod search;
pub mod solution;
pub mod weak;

pub use certificates::{
    construct_is_optimal_channel, construct_wf_optimal_channel, is_certify, kkt_residual_general, wf_certify,
    zf_certify, zf_necessity_check, CertificateReport, CertifyConfig, KktForm, Verdict,
};
pub use channel::ChannelPair;
pub use error::{Result, WiretapError};
pub use isotropic::{
    asymptotic_capacity, capacity_bounds_isotropic, negligibility_margins, solve_isotropic, threshold_powers,
    IsotropicProblem, SnrRegime,
};
pub use matrix::{CMatrix, HermitianMatrix};
pub use omni::{classify_omni, solve_omni, OmniClassification, OmniOutcome};
pub use oracle::{mc_capacity, separable_oracle, McOutcome, Objective, OracleConfig};
pub use rate::{secrecy_rate, weak_rate};
pub use rsv::{detect_common_rsv, solve_common_rsv, CommonBasisChannel};
pub use search::MultiplierSearch;
pub use solution::{CapacityBounds, SolveResult, SolveStatus};
pub use weak::{
    capacity_bounds_weak, kkt_residual_weak, saturation_capacities, solve_weak, threshold_power, KktReport,
    WeakSolveConfig,
};
