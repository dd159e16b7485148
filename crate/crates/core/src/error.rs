use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("negative rate: {name} = {value}")]
    NegativeRate { name: &'static str, value: f64 },

    #[error("mode frequency must be positive, got {0}")]
    NonPositiveFrequency(f64),

    #[error("charger and battery frequencies differ: {charger} != {battery}")]
    FrequencyMismatch { charger: f64, battery: f64 },

    #[error("parameter {name} is not finite")]
    NonFinite { name: &'static str },

    #[error("shared-reservoir coupling vanishes (Gamma = 0 or p_a * p_b = 0)")]
    ZeroSharedCoupling,

    #[error("configuration is not nonreciprocal: |J + i mu Gamma/2| = {residual:e}")]
    NotNonreciprocal { residual: f64 },

    #[error("drive is detuned (delta = {delta}); resonant formula requires delta = 0")]
    NotResonant { delta: f64 },

    #[error("total rates differ (Lambda_a = {lambda_a}, Lambda_b = {lambda_b}); symmetric formula requires equality")]
    NotSymmetric { lambda_a: f64, lambda_b: f64 },

    #[error("local damping rates must both be positive (kappa_a = {kappa_a}, kappa_b = {kappa_b})")]
    ZeroLocalDamping { kappa_a: f64, kappa_b: f64 },

    #[error("coupling is not underdamped: 16|J|^2 = {coupling} <= (kappa_a - kappa_b)^2 = {mismatch}")]
    NotUnderdamped { coupling: f64, mismatch: f64 },

    #[error("ratio undefined at t = {t}: both energies vanish")]
    DivisionByZero { t: f64 },

    #[error("step too large: dt_max * max rate = {product} > {limit}")]
    StepTooLarge { product: f64, limit: f64 },

    #[error("invalid integration horizon: t_end = {t_end}, dt_max = {dt_max}")]
    InvalidHorizon { t_end: f64, dt_max: f64 },

    #[error("moment state violates physical bounds: {0}")]
    UnphysicalState(String),

    #[error("linear fixed-point system is singular")]
    SingularSystem,

    #[error("configurations are not comparable: {0}")]
    IncompatibleConfigs(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("numerical cross-check failed: {0}")]
    CrossCheck(String),

    #[error("config error: {0}")]
    Config(String),
}
