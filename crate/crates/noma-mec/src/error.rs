use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("users must be sorted ascending by channel gain")]
    UnsortedUsers,

    #[error("user index {index} out of range for {count} users")]
    UserIndex { index: usize, count: usize },

    #[error("candidate completion time must be positive, got {0}")]
    NonPositiveAlpha(f64),

    #[error("Lambert W argument {0} below branch point -1/e")]
    LambertDomain(f64),

    #[error("operation requires exactly two users, scenario has {0}")]
    TwoUserOnly(usize),

    #[error("recovered task split {value} for user {user} outside [0,1]; equal-time interior solution does not exist")]
    BetaOutOfRange { user: usize, value: f64 },

    #[error("energy budget cannot be met at any offload power (user {0})")]
    EnergyInfeasible(usize),

    #[error("closed-form power {lambert} disagrees with energy-equality root {root}")]
    ClosedFormMismatch { lambert: f64, root: f64 },

    #[error("closed-form structure does not hold here: {0}")]
    ClosedFormInvalid(String),

    #[error("scenario infeasible even at the local-computing upper bound")]
    InfeasibleScenario,
}

pub type Result<T> = std::result::Result<T, Error>;
