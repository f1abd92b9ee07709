//! Bounds and capacity results for Gaussian interference channels.
//!
//! The crate evaluates genie-aided outer bounds on the capacity region of the
//! two-user Gaussian interference channel in standard form, classifies
//! channels whose sum-rate capacity is known in closed form (noisy
//! interference, the mixed-interference corner point and the Z channel), runs
//! the m-user noisy-interference feasibility search, and turns families of
//! weighted-sum-rate constraints into explicit region boundaries.
//!
//! All rates are in bits per channel use and all gains and powers are linear.
//!
//! Heavy sweeps (grid probes of the genie optimizer, weight grids of the
//! outer region, brute-force oracles) run on rayon when the `parallel`
//! feature is enabled and fall back to plain iteration otherwise. Every
//! reduction happens after an order-preserving collect, so both paths give
//! bit-identical results.

pub mod capacity;
pub mod channel;
pub mod error;
pub mod genie;
pub mod multiuser;
pub mod optim;
pub mod par;
pub mod region;

pub use capacity::{
    classify, mixed_condition, noisy_certificate, noisy_condition, symmetric_noisy_threshold,
    CapacityVerdict, ConditionCheck, MixedCheck, VerdictKind,
};
pub use channel::{
    db_to_linear, gaussian_rate, linear_to_db, m_user_interference_powers,
    single_user_capacities, tdm_fdm_point, tdm_fdm_sum_rate, tin_rates, MUserChannel, RatePoint,
    TwoUserChannel,
};
pub use error::{Error, Result};
pub use genie::{
    effective_powers, eval_constraint1, eval_constraint2, eval_constraint3, optimize_constraint1,
    sigma_feasible, Certificate, GenieParams, SupportingLine, WeightKind,
};
pub use multiuser::{
    check_conditions, find_rho, oracle_grid_feasibility, symmetric_threshold, MUserVerdict,
    RhoVector,
};
pub use par::Execution;
pub use region::{build_inner_region, build_outer_region, HalfPlane, RateRegion};
