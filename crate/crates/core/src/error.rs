use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GameError {
    #[error("radius {r} is below the speed ratio {nu}; F(r; ν) is undefined")]
    Domain { r: f64, nu: f64 },
    #[error("runner escapes: no capture outside the perimeter (r = {r}, relative angle = {theta_rel}, ν = {nu})")]
    NoCapture { r: f64, theta_rel: f64, nu: f64 },
    #[error("invalid speed ratios: need 0 < ν_slow < ν_fast <= 1, got ν_slow = {slow}, ν_fast = {fast}")]
    InvalidSpeeds { slow: f64, fast: f64 },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("unknown policy `{0}`")]
    UnknownPolicy(String),
    #[error("invalid simulation config: {0}")]
    InvalidConfig(String),
}

pub type Result<T, E = GameError> = std::result::Result<T, E>;
